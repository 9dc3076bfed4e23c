//! Choosing `φ` from the shape of the evidence curves, and the resulting
//! posterior over the latent dimension.

use std::ops::RangeInclusive;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evidence::{argmax_first, EvidenceCurve, SampleSummary, SigmaConvention};
use crate::linalg::{DataMatrix, EigenSpectrum};

pub const DEFAULT_GRID_SIZE: usize = 40;

/// `count` log-spaced values over `[1e-2/λ̄, 1e2/λ̄]`, `λ̄` the mean eigenvalue.
pub fn default_phi_grid(spectrum: &EigenSpectrum, count: usize) -> Result<Vec<f64>> {
    let mean = spectrum.mean_eigenvalue();
    if !(mean > 0.0 && mean.is_finite()) {
        return Err(Error::Config(format!("cannot scale the phi grid: mean eigenvalue is {mean}")));
    }
    log_spaced(1e-2 / mean, 1e2 / mean, count)
}

pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if count == 0 || !(lo > 0.0) || !(hi >= lo) || !hi.is_finite() {
        return Err(Error::Config(format!("bad grid: {count} points over [{lo}, {hi}]")));
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let (l0, l1) = (lo.ln(), hi.ln());
    Ok((0..count)
        .map(|i| match i {
            0 => lo,
            i if i == count - 1 => hi,
            i => (l0 + (l1 - l0) * i as f64 / (count - 1) as f64).exp(),
        })
        .collect())
}

/// Shape summary of one evidence curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveShape {
    /// Index of the maximum (first on ties).
    pub peak: usize,
    /// Mean forward difference from the first point to the peak.
    pub slope_before: Option<f64>,
    /// Mean forward difference from the peak to the last point.
    pub slope_after: Option<f64>,
    /// `−(L[k+1] − 2L[k] + L[k−1])` at the peak, when the peak is interior.
    pub curvature: Option<f64>,
}

/// How the mean slopes before and after the peak are compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SlopeTest {
    /// Keep `φ` when the rise to the peak is steeper than the fall after it,
    /// `|slope_before| > |slope_after|`. A gentle rise into a steep fall is
    /// the signature of a peak placed too early.
    #[default]
    Magnitude,
    /// Keep `φ` when `slope_before > slope_after` as signed numbers. Every
    /// interior peak passes this form, so only endpoint peaks are discarded.
    Signed,
}

impl CurveShape {
    pub fn is_interior(&self) -> bool {
        self.curvature.is_some()
    }

    pub fn passes_slope_test(&self, test: SlopeTest) -> bool {
        match (self.curvature, self.slope_before, self.slope_after) {
            (Some(_), Some(before), Some(after)) => match test {
                SlopeTest::Magnitude => before.abs() > after.abs(),
                SlopeTest::Signed => before > after,
            },
            _ => false,
        }
    }
}

pub fn assess_curve(values: &[f64]) -> CurveShape {
    assert!(!values.is_empty(), "assess_curve: empty curve");
    let k = argmax_first(values);
    let last = values.len() - 1;
    let slope_before = (k > 0).then(|| (values[k] - values[0]) / k as f64);
    let slope_after = (k < last).then(|| (values[last] - values[k]) / (last - k) as f64);
    let curvature = (k > 0 && k < last).then(|| -(values[k + 1] - 2.0 * values[k] + values[k - 1]));
    CurveShape { peak: k, slope_before, slope_after, curvature }
}

/// How the heuristic arrived at `φ*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiChoice {
    /// Largest curvature among curves passing the slope test.
    Accepted,
    /// No curve passed the slope test; largest curvature among interior peaks.
    NoSlopePass,
    /// No curve had an interior peak; the median grid value was used.
    NoInteriorPeak,
    /// `d` range too short to judge curve shape; the median grid value was used.
    RangeTooNarrow,
}

impl PhiChoice {
    pub fn warning(&self) -> Option<&'static str> {
        match self {
            PhiChoice::Accepted => None,
            PhiChoice::NoSlopePass => {
                Some("no phi passed the slope test; used the largest curvature among interior maxima")
            }
            PhiChoice::NoInteriorPeak => Some("no phi gave an interior maximum; used the median grid value"),
            PhiChoice::RangeTooNarrow => Some("d range has fewer than 3 points; used the median grid value of phi"),
        }
    }
}

/// Index into `shapes` of the chosen `φ` and how it was chosen.
pub fn choose_phi(shapes: &[CurveShape], test: SlopeTest) -> (usize, PhiChoice) {
    assert!(!shapes.is_empty(), "choose_phi: no curves");
    let best = |keep: &dyn Fn(&CurveShape) -> bool| {
        let mut best: Option<(usize, f64)> = None;
        for (i, s) in shapes.iter().enumerate() {
            if let (true, Some(c)) = (keep(s), s.curvature) {
                if best.is_none_or(|(_, bc)| c > bc) {
                    best = Some((i, c));
                }
            }
        }
        best.map(|(i, _)| i)
    };
    if let Some(i) = best(&|s| s.passes_slope_test(test)) {
        return (i, PhiChoice::Accepted);
    }
    if let Some(i) = best(&|s| s.is_interior()) {
        return (i, PhiChoice::NoSlopePass);
    }
    ((shapes.len() - 1) / 2, PhiChoice::NoInteriorPeak)
}

#[derive(Debug, Clone)]
pub struct PhiSearch {
    pub phi_star: f64,
    pub index: usize,
    pub choice: PhiChoice,
    pub curves: Vec<EvidenceCurve>,
    pub shapes: Vec<CurveShape>,
}

fn check_grid(phi_grid: &[f64]) -> Result<()> {
    if phi_grid.is_empty() {
        return Err(Error::Config("phi grid is empty".into()));
    }
    if let Some(bad) = phi_grid.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::Config(format!("phi grid values must be positive, got {bad}")));
    }
    if phi_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("phi grid must be strictly ascending".into()));
    }
    Ok(())
}

impl SampleSummary {
    /// Evidence curves for every grid value, in grid order.
    pub fn curves(
        &self,
        phi_grid: &[f64],
        d_range: RangeInclusive<usize>,
        convention: SigmaConvention,
    ) -> Result<Vec<EvidenceCurve>> {
        check_grid(phi_grid)?;
        self.check_d_range(&d_range)?;
        phi_grid.par_iter().map(|&phi| self.curve(phi, d_range.clone(), convention)).collect()
    }

    pub fn heuristic_phi(
        &self,
        phi_grid: &[f64],
        d_range: RangeInclusive<usize>,
        convention: SigmaConvention,
        slope_test: SlopeTest,
    ) -> Result<PhiSearch> {
        if d_range.clone().count() < 3 {
            return Err(Error::Config(format!(
                "the phi heuristic needs at least 3 values of d, got {}..={}",
                d_range.start(),
                d_range.end()
            )));
        }
        let curves = self.curves(phi_grid, d_range, convention)?;
        let shapes: Vec<CurveShape> = curves.iter().map(|c| assess_curve(c.log_evidence())).collect();
        let (index, choice) = choose_phi(&shapes, slope_test);
        Ok(PhiSearch { phi_star: phi_grid[index], index, choice, curves, shapes })
    }

    pub fn select(&self, options: &SelectionOptions) -> Result<SelectionReport> {
        let d_range = options.d_range.clone().unwrap_or_else(|| self.default_d_range());
        self.check_d_range(&d_range)?;
        let grid = match &options.phi_grid {
            Some(g) => g.clone(),
            None => default_phi_grid(self.spectrum(), DEFAULT_GRID_SIZE)?,
        };
        check_grid(&grid)?;

        let (curve, choice) = if d_range.clone().count() < 3 {
            let phi = grid[(grid.len() - 1) / 2];
            (self.curve(phi, d_range, options.convention)?, PhiChoice::RangeTooNarrow)
        } else {
            let search = self.heuristic_phi(&grid, d_range, options.convention, options.slope_test)?;
            let choice = search.choice;
            (search.curves.into_iter().nth(search.index).expect("index within grid"), choice)
        };

        let posterior = posterior_probs(&curve);
        let best = argmax_first(&posterior);
        let shape = assess_curve(curve.log_evidence());
        let mut warnings: Vec<String> = choice.warning().map(str::to_owned).into_iter().collect();
        if shape.peak == 0 || shape.peak == curve.len() - 1 {
            warnings.push(format!("evidence maximum lies at the edge of the d range (d = {})", curve.d_values()[shape.peak]));
        }
        Ok(SelectionReport {
            chosen_d: curve.d_values()[best],
            posterior,
            phi_star: curve.phi(),
            second_diff_at_max: shape.curvature.map(|c| -c),
            choice,
            warnings,
            curve,
        })
    }
}

/// Normalized model probabilities under a uniform prior over `d`.
pub fn posterior_probs(curve: &EvidenceCurve) -> Vec<f64> {
    softmax(curve.log_evidence())
}

pub fn softmax(log_values: &[f64]) -> Vec<f64> {
    assert!(!log_values.is_empty(), "softmax: empty input");
    let max = log_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = log_values.iter().map(|v| (v - max).exp()).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|v| v / total).collect()
}

#[derive(Debug, Clone, Default)]
pub struct SelectionOptions {
    /// Defaults to [`default_phi_grid`] with [`DEFAULT_GRID_SIZE`] points.
    pub phi_grid: Option<Vec<f64>>,
    /// Defaults to [`crate::evidence::default_d_range`].
    pub d_range: Option<RangeInclusive<usize>>,
    pub convention: SigmaConvention,
    pub slope_test: SlopeTest,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionReport {
    pub chosen_d: usize,
    /// Aligned with `curve.d_values()`.
    pub posterior: Vec<f64>,
    pub phi_star: f64,
    pub curve: EvidenceCurve,
    /// `L[k+1] − 2L[k] + L[k−1]` at the curve maximum; `None` at an endpoint.
    pub second_diff_at_max: Option<f64>,
    pub choice: PhiChoice,
    pub warnings: Vec<String>,
}

impl SelectionReport {
    pub fn posterior_of(&self, d: usize) -> Option<f64> {
        self.curve.d_values().iter().position(|&v| v == d).map(|i| self.posterior[i])
    }
}

/// Heuristic `φ*` over `phi_grid` for centred `X`.
pub fn heuristic_phi(x: &DataMatrix, phi_grid: &[f64], d_range: RangeInclusive<usize>) -> Result<PhiSearch> {
    SampleSummary::new(x)?.heuristic_phi(phi_grid, d_range, SigmaConvention::Variance, SlopeTest::default())
}

/// End-to-end dimension selection on centred `X`.
pub fn select_dimension(x: &DataMatrix, phi_grid: &[f64], d_range: RangeInclusive<usize>) -> Result<SelectionReport> {
    let options = SelectionOptions { phi_grid: Some(phi_grid.to_vec()), d_range: Some(d_range), ..Default::default() };
    SampleSummary::new(x)?.select(&options)
}
