//! Exact log-marginal likelihood of PPCA under a normal-gamma prior.
//!
//! Model `M_d`: `x = Wy + ε` with `W` a `p × d` matrix of i.i.d.
//! `N(0, 1/φ)` entries, `y ~ N(0, I_d)`, and `ε | σ ~ N(0, σ²I_p)` with
//! `σ² ~ Gamma(a, b)`. With `b = φ/2` both `W` and `σ` integrate out in
//! closed form and each observation is marginally `GAL_p(2φ⁻¹I, 0, a + d/2)`,
//! so the evidence depends on the data only through the norms `‖xᵢ‖`.

use std::f64::consts::{LN_2, PI};
use std::ops::RangeInclusive;

use crate::error::{Error, Result};
use crate::linalg::{DataMatrix, EigenSpectrum};
use crate::special::{log_bessel_k, log_gamma};

const A_FLOOR: f64 = 1e-8;

/// How the noise scale estimate `σ̂` enters `a = σ̂²/φ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SigmaConvention {
    /// `σ̂²` is the mean of the trailing eigenvalues (the ML noise variance).
    #[default]
    Variance,
    /// `σ̂` itself is the mean of the trailing eigenvalues.
    MeanEigenvalue,
}

/// Prior hyperparameters. The gamma rate is tied to the weight precision,
/// `b = φ/2`, and is never stored separately.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NgHyperParams {
    a: f64,
    phi: f64,
}

impl NgHyperParams {
    pub fn new(a: f64, phi: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) || !(phi > 0.0 && phi.is_finite()) {
            return Err(Error::domain("NgHyperParams::new", format!("a and phi must be positive, got a={a}, phi={phi}")));
        }
        Ok(NgHyperParams { a, phi })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn b(&self) -> f64 {
        self.phi / 2.0
    }
}

fn check_d(func: &'static str, p: usize, d: usize) -> Result<()> {
    if d == 0 || d >= p {
        return Err(Error::domain(func, format!("d must lie in [1, {}], got {d}", p.saturating_sub(1))));
    }
    Ok(())
}

/// Mean of the `p − d` smallest eigenvalues, floored at `1e-12·λ₁`.
pub fn sigma2_ml(spectrum: &EigenSpectrum, d: usize) -> Result<f64> {
    let lambda = spectrum.eigenvalues();
    check_d("sigma2_ml", lambda.len(), d)?;
    let tail = &lambda[d..];
    let mean = tail.iter().sum::<f64>() / tail.len() as f64;
    let floor = if lambda[0] > 0.0 { 1e-12 * lambda[0] } else { 1e-300 };
    Ok(mean.max(floor))
}

/// `a = σ̂²/φ` (floored at `1e-8`) and `b = φ/2`.
pub fn hyperparams_for_d(spectrum: &EigenSpectrum, d: usize, phi: f64) -> Result<NgHyperParams> {
    hyperparams_for_d_with(spectrum, d, phi, SigmaConvention::Variance)
}

pub fn hyperparams_for_d_with(
    spectrum: &EigenSpectrum,
    d: usize,
    phi: f64,
    convention: SigmaConvention,
) -> Result<NgHyperParams> {
    if !(phi > 0.0 && phi.is_finite()) {
        return Err(Error::domain("hyperparams_for_d", format!("phi must be positive, got {phi}")));
    }
    let tail_mean = sigma2_ml(spectrum, d)?;
    let sigma2_hat = match convention {
        SigmaConvention::Variance => tail_mean,
        SigmaConvention::MeanEigenvalue => tail_mean * tail_mean,
    };
    NgHyperParams::new((sigma2_hat / phi).max(A_FLOOR), phi)
}

/// Log evidence `ln p(X | a, φ, M_d)` from the observation norms.
///
/// Each observation contributes
/// `ln 2 − (p/2)ln 2π − (p/2)ln(2/φ) − ln Γ(a + d/2) + ν ln(√φ‖x‖/2) + ln K_ν(√φ‖x‖)`
/// with `ν = a + (d − p)/2`.
pub fn log_evidence(norms: &[f64], p: usize, d: usize, params: &NgHyperParams) -> Result<f64> {
    check_d("log_evidence", p, d)?;
    let (a, phi) = (params.a, params.phi);
    let (pf, df) = (p as f64, d as f64);
    let nu = a + 0.5 * (df - pf);
    let constant = LN_2 - 0.5 * pf * (2.0 * PI).ln() - 0.5 * pf * (2.0 / phi).ln() - log_gamma(a + 0.5 * df)?;
    let sqrt_phi = phi.sqrt();

    let mut total = constant * norms.len() as f64;
    for (row, &r) in norms.iter().enumerate() {
        if r == 0.0 {
            return Err(Error::ZeroNorm { row });
        }
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::domain("log_evidence", format!("norm of observation {row} is {r}")));
        }
        let z = sqrt_phi * r;
        total += nu * (0.5 * z).ln() + log_bessel_k(nu, z)?;
    }
    if !total.is_finite() {
        return Err(Error::domain("log_evidence", format!("non-finite evidence at d={d}, a={a}, phi={phi}")));
    }
    Ok(total)
}

/// `[1, r − 1]` where `r = min(n − 1, p)` bounds the rank of a centred
/// `n × p` sample. Beyond it every trailing eigenvalue is a structural zero
/// and the noise estimate would sit on its floor.
pub fn default_d_range(n: usize, p: usize) -> RangeInclusive<usize> {
    1..=n.saturating_sub(1).min(p).saturating_sub(1).max(1)
}

/// Observation norms and covariance spectrum of a centred data matrix,
/// computed once and shared by every curve.
#[derive(Debug, Clone)]
pub struct SampleSummary {
    n: usize,
    norms: Vec<f64>,
    spectrum: EigenSpectrum,
}

impl SampleSummary {
    pub fn new(x: &DataMatrix) -> Result<Self> {
        if !x.is_centered() {
            return Err(Error::Precondition("evidence requires centred data".into()));
        }
        let norms = x.row_norms();
        if let Some(row) = norms.iter().position(|&r| r == 0.0) {
            return Err(Error::ZeroNorm { row });
        }
        Ok(SampleSummary { n: x.nrows(), norms, spectrum: x.spectrum()? })
    }

    /// From precomputed parts; `norms.len()` is the sample size.
    pub fn from_parts(norms: Vec<f64>, spectrum: EigenSpectrum) -> Self {
        SampleSummary { n: norms.len(), norms, spectrum }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.spectrum.dim()
    }

    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    pub fn spectrum(&self) -> &EigenSpectrum {
        &self.spectrum
    }

    pub fn default_d_range(&self) -> RangeInclusive<usize> {
        default_d_range(self.n, self.p())
    }

    pub(crate) fn check_d_range(&self, d_range: &RangeInclusive<usize>) -> Result<()> {
        let (lo, hi) = (*d_range.start(), *d_range.end());
        if lo == 0 || lo > hi || hi >= self.p() {
            return Err(Error::Config(format!("d range {lo}..={hi} must satisfy 1 <= min <= max <= {}", self.p() - 1)));
        }
        Ok(())
    }

    pub fn curve(&self, phi: f64, d_range: RangeInclusive<usize>, convention: SigmaConvention) -> Result<EvidenceCurve> {
        self.check_d_range(&d_range)?;
        let p = self.p();
        let mut d_values = Vec::new();
        let mut log_ev = Vec::new();
        let mut a_used = Vec::new();
        for d in d_range {
            let params = hyperparams_for_d_with(&self.spectrum, d, phi, convention)?;
            log_ev.push(log_evidence(&self.norms, p, d, &params)?);
            a_used.push(params.a());
            d_values.push(d);
        }
        Ok(EvidenceCurve { d_values, log_evidence: log_ev, phi, a_used })
    }
}

/// Log evidence as a function of `d` at a fixed `φ`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvidenceCurve {
    d_values: Vec<usize>,
    log_evidence: Vec<f64>,
    phi: f64,
    a_used: Vec<f64>,
}

impl EvidenceCurve {
    pub fn d_values(&self) -> &[usize] {
        &self.d_values
    }

    pub fn log_evidence(&self) -> &[f64] {
        &self.log_evidence
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn a_used(&self) -> &[f64] {
        &self.a_used
    }

    pub fn len(&self) -> usize {
        self.d_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d_values.is_empty()
    }

    /// Index of the largest value, the first one on ties.
    pub fn argmax_index(&self) -> usize {
        argmax_first(&self.log_evidence)
    }
}

pub(crate) fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Evidence curve of centred `X` over `d_range` at a fixed `φ`.
pub fn evidence_curve(x: &DataMatrix, phi: f64, d_range: RangeInclusive<usize>) -> Result<EvidenceCurve> {
    SampleSummary::new(x)?.curve(phi, d_range, SigmaConvention::Variance)
}
