pub mod baselines;
pub mod error;
pub mod evidence;
pub mod gal;
pub mod io;
pub mod linalg;
pub mod ppca;
pub mod rng;
pub mod selection;
pub mod simulation;
pub mod special;

pub use error::{Error, Result};
pub use evidence::{
    evidence_curve, hyperparams_for_d, log_evidence, sigma2_ml, EvidenceCurve, NgHyperParams, SampleSummary,
    SigmaConvention,
};
pub use linalg::{DataMatrix, EigenSpectrum};
pub use ppca::fit_ppca_ml;
pub use selection::{heuristic_phi, posterior_probs, select_dimension, SelectionOptions, SelectionReport, SlopeTest};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/evidence.md")]
    mod evidence {}
    #[doc = include_str!("../../../book/src/selection.md")]
    mod selection {}
    #[doc = include_str!("../../../book/src/gal.md")]
    mod gal {}
    #[doc = include_str!("../../../book/src/baselines.md")]
    mod baselines {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/numerics.md")]
    mod numerics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
