//! Maximum-likelihood PPCA fit at a given dimension.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::evidence::sigma2_ml;
use crate::linalg::EigenSpectrum;

/// `W = A(Λ − σ²I)^{1/2}` with the rotation fixed to the identity, where `A`
/// holds the leading `d` eigenvectors and `Λ` their eigenvalues.
///
/// Returns `(W, σ²)`; fails when `λ_d ≤ σ²`.
pub fn fit_ppca_ml(spectrum: &EigenSpectrum, d: usize) -> Result<(DMatrix<f64>, f64)> {
    let sigma2 = sigma2_ml(spectrum, d)?;
    let lambda = spectrum.eigenvalues();
    if lambda[d - 1] <= sigma2 {
        return Err(Error::ModelMismatch { d, lambda_d: lambda[d - 1], sigma2 });
    }
    let vectors = spectrum.eigenvectors();
    let mut w = vectors.columns(0, d).into_owned();
    for (k, mut col) in w.column_iter_mut().enumerate() {
        col *= (lambda[k] - sigma2).sqrt();
    }
    Ok((w, sigma2))
}
