//! Reference computations for the `ngppca` test suites.
//!
//! Everything here is deliberately slow and shares no code with the
//! production crate: integrals are done by adaptive Gauss–Kronrod
//! quadrature in log space, selectors by brute-force enumeration, and the
//! small amount of linear algebra needed is hand-rolled on `Vec<Vec<f64>>`.

pub mod bessel;
pub mod cf;
pub mod eig;
pub mod gamma;
pub mod mixture;
pub mod quad;
pub mod selectors;
pub mod stats;

pub use bessel::log_bessel_k_quad;
pub use gamma::ln_gamma_lanczos;
pub use mixture::{gal_log_density_mixture, isotropic_log_evidence_mixture};
pub use quad::{log_integrate, log_integrate_peaked};
