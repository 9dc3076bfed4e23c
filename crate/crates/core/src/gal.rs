//! Multivariate generalized asymmetric Laplace (GAL) distribution.
//!
//! `z ~ GAL_p(Σ, μ, s)` has characteristic function
//! `(1 + ½ uᵀΣu − i μᵀu)^(−s)` and the Gaussian variance-mean mixture
//! representation `z = μu + √u·g` with `u ~ Gamma(s, 1)` and `g ~ N(0, Σ)`.
//! `GAL_1(2, 0, 1)` is the standard Laplace distribution.

use std::f64::consts::{LN_2, PI};

use nalgebra::{Cholesky, DMatrix, DVector};
use rand_distr::{Distribution, Gamma};

use crate::error::{Error, Result};
use crate::linalg::gaussian_vector;
use crate::rng::RngStream;
use crate::special::{log_bessel_k, log_gamma};

#[derive(Debug, Clone)]
pub struct GalParams {
    sigma: DMatrix<f64>,
    mu: DVector<f64>,
    s: f64,
    // Lower Cholesky factor, Σ = LLᵀ.
    l: DMatrix<f64>,
    // L⁻¹μ, so that μᵀΣ⁻¹x = (L⁻¹μ)·(L⁻¹x).
    whitened_mu: DVector<f64>,
    log_det_sigma: f64,
}

impl GalParams {
    /// Validates `Σ` (square, symmetric, positive definite), `μ` and `s > 0`.
    pub fn new(sigma: DMatrix<f64>, mu: DVector<f64>, s: f64) -> Result<Self> {
        let p = sigma.nrows();
        if p == 0 || sigma.ncols() != p || mu.len() != p {
            return Err(Error::Precondition(format!(
                "GAL parameters need a square Σ and matching μ, got {}x{} and {}",
                sigma.nrows(),
                sigma.ncols(),
                mu.len()
            )));
        }
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::domain("GalParams::new", format!("shape must be positive, got {s}")));
        }
        if sigma.iter().chain(mu.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Precondition("GAL parameters must be finite".into()));
        }
        let scale = sigma.amax().max(f64::MIN_POSITIVE);
        if (&sigma - sigma.transpose()).amax() > 1e-12 * scale {
            return Err(Error::Precondition("Σ must be symmetric".into()));
        }
        let l = Cholesky::new(sigma.clone()).ok_or(Error::NotPositiveDefinite)?.l();
        let whitened_mu = l.solve_lower_triangular(&mu).ok_or(Error::NotPositiveDefinite)?;
        let log_det_sigma = 2.0 * l.diagonal().iter().map(|v| v.ln()).sum::<f64>();
        Ok(GalParams { sigma, mu, s, l, whitened_mu, log_det_sigma })
    }

    /// `GAL_p(scale·I, 0, s)`.
    pub fn isotropic(p: usize, scale: f64, s: f64) -> Result<Self> {
        GalParams::new(DMatrix::identity(p, p) * scale, DVector::zeros(p), s)
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    pub fn sigma(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    pub fn mu(&self) -> &DVector<f64> {
        &self.mu
    }

    pub fn shape(&self) -> f64 {
        self.s
    }

    /// `E z = sμ`.
    pub fn mean(&self) -> DVector<f64> {
        &self.mu * self.s
    }

    /// `Cov z = s(Σ + μμᵀ)`.
    pub fn covariance(&self) -> DMatrix<f64> {
        (&self.sigma + &self.mu * self.mu.transpose()) * self.s
    }

    /// Natural log of the density at `x`.
    pub fn log_density(&self, x: &DVector<f64>) -> Result<f64> {
        let p = self.dim();
        if x.len() != p {
            return Err(Error::Precondition(format!("point has length {}, expected {p}", x.len())));
        }
        let wx = self.l.solve_lower_triangular(x).ok_or(Error::NotPositiveDefinite)?;
        let pf = p as f64;
        let nu = self.s - 0.5 * pf;
        let c = (2.0 + self.whitened_mu.norm_squared()).sqrt();
        let q = wx.norm();
        let head = self.whitened_mu.dot(&wx) - 0.5 * pf * (2.0 * PI).ln() - log_gamma(self.s)? - 0.5 * self.log_det_sigma;

        if q == 0.0 {
            if nu <= 0.0 {
                return Err(Error::domain(
                    "gal_log_density",
                    format!("density is unbounded at the origin when s <= p/2 (s = {}, p = {p})", self.s),
                ));
            }
            // K_ν(z) ~ ½Γ(ν)(2/z)^ν as z → 0.
            return Ok(head + LN_2 + log_gamma(nu)? + (nu - 1.0) * LN_2 - 2.0 * nu * c.ln());
        }
        Ok(head + LN_2 + nu * (q.ln() - c.ln()) + log_bessel_k(nu, q * c)?)
    }

    /// One draw via `z = μu + √u·Lg`.
    pub fn sample(&self, rng: &mut RngStream) -> DVector<f64> {
        let u = gamma_sample(self.s, 1.0, rng);
        let g = &self.l * gaussian_vector(self.dim(), rng);
        &self.mu * u + g * u.sqrt()
    }
}

pub fn gal_log_density(x: &DVector<f64>, params: &GalParams) -> Result<f64> {
    params.log_density(x)
}

pub fn gal_sample(params: &GalParams, rng: &mut RngStream) -> DVector<f64> {
    params.sample(rng)
}

/// A draw from `Gamma(shape, rate)`, density `∝ t^(shape−1) e^(−rate·t)`.
///
/// # Panics
/// If `shape` or `rate` is not a positive finite number.
pub fn gamma_sample(shape: f64, rate: f64, rng: &mut RngStream) -> f64 {
    assert!(
        shape > 0.0 && rate > 0.0 && shape.is_finite() && rate.is_finite(),
        "gamma_sample: shape and rate must be positive, got ({shape}, {rate})"
    );
    Gamma::new(shape, 1.0 / rate).expect("validated gamma parameters").sample(rng)
}
