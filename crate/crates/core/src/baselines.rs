//! Competing dimension selectors: Laplace-approximated evidence, profile
//! likelihood of a two-block scree split, and the isotropic two-eigenvalue
//! maximum likelihood.
//!
//! All of them consume the same `1/n`-scaled spectrum as the evidence code.

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::evidence::{argmax_first, sigma2_ml};
use crate::linalg::EigenSpectrum;
use crate::special::log_gamma;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Baseline {
    Laplace,
    ProfileLikelihood,
    IsotropicMl,
}

impl Baseline {
    pub const ALL: [Baseline; 3] = [Baseline::Laplace, Baseline::ProfileLikelihood, Baseline::IsotropicMl];

    pub fn name(&self) -> &'static str {
        match self {
            Baseline::Laplace => "laplace",
            Baseline::ProfileLikelihood => "profile_likelihood",
            Baseline::IsotropicMl => "isotropic_ml",
        }
    }

    /// Runs the selector over `d_range` (which must lie in `[1, p − 1]`).
    pub fn select(&self, spectrum: &EigenSpectrum, n: usize, d_range: RangeInclusive<usize>) -> Result<BaselineResult> {
        match self {
            Baseline::Laplace => laplace_select(spectrum, n, d_range),
            Baseline::ProfileLikelihood => profile_likelihood_select(spectrum.eigenvalues(), d_range),
            Baseline::IsotropicMl => isotropic_ml_select(spectrum.eigenvalues(), n, d_range),
        }
    }
}

impl fmt::Display for Baseline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Baseline {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Baseline::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown baseline method '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineResult {
    pub method: Baseline,
    pub chosen_d: usize,
    pub d_values: Vec<usize>,
    pub scores: Vec<f64>,
}

impl BaselineResult {
    fn from_scores(method: Baseline, d_values: Vec<usize>, scores: Vec<f64>) -> Self {
        let chosen_d = d_values[argmax_first(&scores)];
        BaselineResult { method, chosen_d, d_values, scores }
    }
}

fn check_range(p: usize, d_range: &RangeInclusive<usize>) -> Result<()> {
    let (lo, hi) = (*d_range.start(), *d_range.end());
    if lo == 0 || lo > hi || hi >= p {
        return Err(Error::Config(format!("d range {lo}..={hi} must satisfy 1 <= min <= max <= {}", p.saturating_sub(1))));
    }
    Ok(())
}

/// Laplace approximation to the PPCA evidence at dimension `d`, integrating
/// over the Stiefel manifold of loadings with a uniform prior.
pub fn laplace_evidence(spectrum: &EigenSpectrum, n: usize, d: usize) -> Result<f64> {
    let p = spectrum.dim();
    sigma2_ml(spectrum, d)?;
    if n <= d {
        return Err(Error::domain("laplace_evidence", format!("needs n > d, got n={n}, d={d}")));
    }
    let lambda = strictly_decreasing(spectrum.eigenvalues());
    // Positive and at most λ_d < λ_{d−1}, so every Hessian factor is positive.
    let sigma2 = lambda[d..].iter().sum::<f64>() / (p - d) as f64;
    let (nf, pf, df) = (n as f64, p as f64, d as f64);

    let mut log_pu = -df * LN_2;
    for i in 1..=d {
        let k = (p - i + 1) as f64 / 2.0;
        log_pu += log_gamma(k)? - k * PI.ln();
    }
    let log_lik = -0.5 * nf * lambda[..d].iter().map(|l| l.ln()).sum::<f64>() - 0.5 * nf * (pf - df) * sigma2.ln();
    let m = pf * df - df * (df + 1.0) / 2.0;
    let log_vol = 0.5 * (m + df) * (2.0 * PI).ln();

    let hat = |j: usize| if j < d { lambda[j] } else { sigma2 };
    let mut log_det_az = 0.0;
    for i in 0..d {
        for j in i + 1..p {
            log_det_az += (1.0 / hat(j) - 1.0 / hat(i)).ln() + (lambda[i] - lambda[j]).ln() + nf.ln();
        }
    }
    let total = log_pu + log_lik + log_vol - 0.5 * log_det_az - 0.5 * df * nf.ln();
    if !total.is_finite() {
        return Err(Error::domain("laplace_evidence", format!("non-finite value at d={d}")));
    }
    Ok(total)
}

// Floors at 1e-12·λ₁ and breaks ties multiplicatively, which would
// otherwise put ln 0 in the Hessian term.
fn strictly_decreasing(values: &[f64]) -> Vec<f64> {
    let floor = (1e-12 * values[0]).max(1e-300);
    let mut out: Vec<f64> = values.iter().map(|v| v.max(floor)).collect();
    for k in 1..out.len() {
        out[k] = out[k].min(out[k - 1] * (1.0 - 1e-9));
    }
    out
}

pub fn laplace_select(spectrum: &EigenSpectrum, n: usize, d_range: RangeInclusive<usize>) -> Result<BaselineResult> {
    check_range(spectrum.dim(), &d_range)?;
    let d_values: Vec<usize> = d_range.collect();
    let scores = d_values.iter().map(|&d| laplace_evidence(spectrum, n, d)).collect::<Result<Vec<_>>>()?;
    Ok(BaselineResult::from_scores(Baseline::Laplace, d_values, scores))
}

/// Profile log-likelihood of splitting the eigenvalues after the first `q`
/// into two normal samples with a common variance.
pub fn profile_likelihood_score(eigenvalues: &[f64], q: usize) -> f64 {
    let p = eigenvalues.len();
    let (head, tail) = eigenvalues.split_at(q);
    let m1 = head.iter().sum::<f64>() / q as f64;
    let m2 = tail.iter().sum::<f64>() / (p - q) as f64;
    let ss = head.iter().map(|l| (l - m1) * (l - m1)).sum::<f64>() + tail.iter().map(|l| (l - m2) * (l - m2)).sum::<f64>();
    let floor = (1e-12 * eigenvalues[0] * eigenvalues[0]).max(f64::MIN_POSITIVE);
    let var = (ss / p as f64).max(floor);
    -0.5 * p as f64 * (2.0 * PI * var).ln() - ss / (2.0 * var)
}

pub fn profile_likelihood_select(eigenvalues: &[f64], d_range: RangeInclusive<usize>) -> Result<BaselineResult> {
    let p = eigenvalues.len();
    if p < 3 {
        return Err(Error::Precondition(format!("profile likelihood needs p >= 3, got {p}")));
    }
    check_range(p, &d_range)?;
    let d_values: Vec<usize> = d_range.collect();
    let scores = d_values.iter().map(|&q| profile_likelihood_score(eigenvalues, q)).collect();
    Ok(BaselineResult::from_scores(Baseline::ProfileLikelihood, d_values, scores))
}

/// Maximized Gaussian log-likelihood of a covariance with eigenvalue `â` on
/// the leading `d` directions and `b̂` on the rest.
pub fn isotropic_ml_score(eigenvalues: &[f64], n: usize, d: usize) -> f64 {
    let p = eigenvalues.len();
    let (pf, df) = (p as f64, d as f64);
    let a_hat = eigenvalues[..d].iter().sum::<f64>() / df;
    let floor = (1e-12 * eigenvalues[0]).max(f64::MIN_POSITIVE);
    let b_hat = (eigenvalues[d..].iter().sum::<f64>() / (pf - df)).max(floor);
    -0.5 * n as f64 * (df * a_hat.ln() + (pf - df) * b_hat.ln() + pf * (2.0 * PI).ln() + pf)
}

pub fn isotropic_ml_select(eigenvalues: &[f64], n: usize, d_range: RangeInclusive<usize>) -> Result<BaselineResult> {
    check_range(eigenvalues.len(), &d_range)?;
    let d_values: Vec<usize> = d_range.collect();
    let scores = d_values.iter().map(|&d| isotropic_ml_score(eigenvalues, n, d)).collect();
    Ok(BaselineResult::from_scores(Baseline::IsotropicMl, d_values, scores))
}
