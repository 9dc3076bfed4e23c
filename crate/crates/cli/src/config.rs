//! Run options merged from flags, an optional TOML file, and defaults, in
//! that order of precedence.

use std::path::Path;

use ngppca::selection::SlopeTest;
use ngppca::SigmaConvention;
use serde::Deserialize;

use crate::{ConventionArg, DataArgs, Failure, SelectArgs, SlopeArg};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    has_header: Option<bool>,
    center: Option<bool>,
    d_min: Option<usize>,
    d_max: Option<usize>,
    sigma_convention: Option<String>,
    phi_min: Option<f64>,
    phi_max: Option<f64>,
    phi_count: Option<usize>,
    slope_test: Option<String>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub has_header: bool,
    pub center: bool,
    pub d_min: Option<usize>,
    pub d_max: Option<usize>,
    pub convention: SigmaConvention,
    pub phi_min: Option<f64>,
    pub phi_max: Option<f64>,
    pub phi_count: Option<usize>,
    pub slope_test: SlopeTest,
}

fn load(path: &Path) -> Result<FileConfig, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn convention(name: &str) -> Result<SigmaConvention, Failure> {
    match name {
        "variance" => Ok(SigmaConvention::Variance),
        "mean-eigenvalue" => Ok(SigmaConvention::MeanEigenvalue),
        _ => Err(Failure::Usage(format!("unknown sigma_convention '{name}'"))),
    }
}

fn slope_test(name: &str) -> Result<SlopeTest, Failure> {
    match name {
        "magnitude" => Ok(SlopeTest::Magnitude),
        "signed" => Ok(SlopeTest::Signed),
        _ => Err(Failure::Usage(format!("unknown slope_test '{name}'"))),
    }
}

impl RunConfig {
    pub fn resolve(data: &DataArgs, select: Option<&SelectArgs>) -> Result<RunConfig, Failure> {
        let file = match &data.config {
            Some(p) => load(p)?,
            None => FileConfig::default(),
        };
        let convention = match (data.sigma_convention, &file.sigma_convention) {
            (Some(c), _) => SigmaConvention::from(c),
            (None, Some(name)) => convention(name)?,
            (None, None) => SigmaConvention::from(ConventionArg::Variance),
        };
        let slope = match (select.and_then(|s| s.slope_test), &file.slope_test) {
            (Some(s), _) => SlopeTest::from(s),
            (None, Some(name)) => slope_test(name)?,
            (None, None) => SlopeTest::from(SlopeArg::Magnitude),
        };
        let cfg = RunConfig {
            has_header: data.has_header.or(file.has_header).unwrap_or(false),
            center: data.center.or(file.center).unwrap_or(true),
            d_min: data.d_min.or(file.d_min),
            d_max: data.d_max.or(file.d_max),
            convention,
            phi_min: select.and_then(|s| s.phi_min).or(file.phi_min),
            phi_max: select.and_then(|s| s.phi_max).or(file.phi_max),
            phi_count: select.and_then(|s| s.phi_count).or(file.phi_count),
            slope_test: slope,
        };
        if cfg.phi_count == Some(0) {
            return Err(Failure::Usage("phi_count must be at least 1".into()));
        }
        Ok(cfg)
    }
}
