//! Isotropic PPCA data generator and the accuracy benchmark.
//!
//! Data are drawn from `N(0, Qᵀ diag(a, …, a, 1, …, 1) Q)` with `Q` Haar
//! distributed and `a = snr·(p − d)/d`.

use std::fmt;
use std::str::FromStr;

use log::warn;
use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::baselines::Baseline;
use crate::error::{Error, Result};
use crate::evidence::{default_d_range, SampleSummary, SigmaConvention};
use crate::linalg::{gaussian_matrix, haar_orthogonal, DataMatrix};
use crate::rng::{stream_id_for, RngStream};
use crate::selection::SelectionOptions;

/// `a = snr·(p − d)/d`, required to exceed 1.
pub fn snr_to_signal_eigenvalue(snr: f64, d: usize, p: usize) -> Result<f64> {
    if d == 0 || d >= p {
        return Err(Error::domain("snr_to_signal_eigenvalue", format!("d must lie in [1, {}], got {d}", p.saturating_sub(1))));
    }
    let a = snr * (p - d) as f64 / d as f64;
    if !(a > 1.0 && a.is_finite()) {
        return Err(Error::domain(
            "snr_to_signal_eigenvalue",
            format!("signal eigenvalue {a} must exceed the noise eigenvalue 1 (snr={snr}, d={d}, p={p})"),
        ));
    }
    Ok(a)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub n: usize,
    pub p: usize,
    pub d_true: usize,
    pub snr: f64,
    pub seed: u64,
}

impl SimConfig {
    /// Checks the invariants and returns the signal eigenvalue.
    pub fn validate(&self) -> Result<f64> {
        if self.n < 2 {
            return Err(Error::Config(format!("n must be at least 2, got {}", self.n)));
        }
        if !(self.snr > 0.0) {
            return Err(Error::Config(format!("snr must be positive, got {}", self.snr)));
        }
        snr_to_signal_eigenvalue(self.snr, self.d_true, self.p)
    }
}

/// `X = Z·diag(√a, …, √a, 1, …, 1)·Q` with `Q` drawn before `Z`.
pub fn simulate_isotropic(cfg: &SimConfig, rng: &mut RngStream) -> Result<DataMatrix> {
    let a = cfg.validate()?;
    let q = haar_orthogonal(cfg.p, rng);
    let mut z = gaussian_matrix(cfg.n, cfg.p, rng);
    z.columns_mut(0, cfg.d_true).scale_mut(a.sqrt());
    DataMatrix::new(z * q)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Ng,
    Baseline(Baseline),
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Ng,
        Method::Baseline(Baseline::Laplace),
        Method::Baseline(Baseline::ProfileLikelihood),
        Method::Baseline(Baseline::IsotropicMl),
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Ng => "ng",
            Method::Baseline(b) => b.name(),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "ng" {
            return Ok(Method::Ng);
        }
        s.parse().map(Method::Baseline).map_err(|_| Error::Config(format!("unknown method '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkConfig {
    pub n_values: Vec<usize>,
    pub snr_values: Vec<f64>,
    pub p: usize,
    pub d_true: usize,
    pub replications: usize,
    pub methods: Vec<Method>,
    pub master_seed: u64,
    /// Worker threads; `None` uses rayon's default.
    pub threads: Option<usize>,
    pub convention: SigmaConvention,
}

pub const DEFAULT_N_VALUES: [usize; 4] = [40, 50, 70, 100];
pub const DEFAULT_SNR_VALUES: [f64; 6] = [1.5, 3.0, 5.0, 10.0, 20.0, 30.0];

impl Default for BenchmarkConfig {
    fn default() -> Self {
        BenchmarkConfig {
            n_values: DEFAULT_N_VALUES.to_vec(),
            snr_values: DEFAULT_SNR_VALUES.to_vec(),
            p: 50,
            d_true: 20,
            replications: 50,
            methods: Method::ALL.to_vec(),
            master_seed: 0,
            threads: None,
            convention: SigmaConvention::Variance,
        }
    }
}

impl BenchmarkConfig {
    fn validate(&self) -> Result<()> {
        if self.n_values.is_empty() || self.snr_values.is_empty() {
            return Err(Error::Config("benchmark grid is empty".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("no methods selected".into()));
        }
        if self.replications == 0 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        for &n in &self.n_values {
            for &snr in &self.snr_values {
                SimConfig { n, p: self.p, d_true: self.d_true, snr, seed: self.master_seed }.validate()?;
            }
        }
        Ok(())
    }

    /// Stream for replication `r` of cell `(n, snr)`.
    pub fn replication_stream(&self, n: usize, snr: f64, r: usize) -> RngStream {
        let id = stream_id_for(&[n as u64, snr.to_bits(), self.p as u64, self.d_true as u64, r as u64]);
        RngStream::new(self.master_seed, id)
    }

    /// The dataset every method sees in replication `r` of cell `(n, snr)`.
    pub fn replication_dataset(&self, n: usize, snr: f64, r: usize) -> Result<DataMatrix> {
        let cfg = SimConfig { n, p: self.p, d_true: self.d_true, snr, seed: self.master_seed };
        simulate_isotropic(&cfg, &mut self.replication_stream(n, snr, r))
    }
}

/// Counts for one method in one `(n, snr)` cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellCounts {
    pub method: Method,
    pub n: usize,
    pub snr_bits: u64,
    pub replications: usize,
    pub correct: usize,
    pub under: usize,
    pub over: usize,
    /// Replications on which the method returned an error.
    pub failed: usize,
}

impl CellCounts {
    pub fn snr(&self) -> f64 {
        f64::from_bits(self.snr_bits)
    }

    pub fn accuracy(&self) -> f64 {
        100.0 * self.correct as f64 / self.replications as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkTable {
    pub config: BenchmarkConfig,
    /// Ordered by `n`, then `snr`, then method, each as given in the config.
    pub cells: Vec<CellCounts>,
}

impl BenchmarkTable {
    pub fn cell(&self, method: Method, n: usize, snr: f64) -> Option<&CellCounts> {
        self.cells.iter().find(|c| c.method == method && c.n == n && c.snr_bits == snr.to_bits())
    }

    /// Long-format CSV: `method,n,snr,replications,accuracy,under,over`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,n,snr,replications,accuracy,under,over\n");
        for c in &self.cells {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                c.method,
                c.n,
                c.snr(),
                c.replications,
                c.accuracy(),
                c.under,
                c.over
            ));
        }
        out
    }
}

/// Chosen dimension per method for one dataset; `None` where a method failed.
pub fn run_methods(x: &DataMatrix, methods: &[Method], convention: SigmaConvention) -> Vec<Option<usize>> {
    let x = if x.is_centered() { x.clone() } else { x.center() };
    let summary = match SampleSummary::new(&x) {
        Ok(s) => s,
        Err(e) => {
            warn!("could not summarize dataset: {e}");
            return vec![None; methods.len()];
        }
    };
    let d_range = default_d_range(summary.n(), summary.p());
    methods
        .iter()
        .map(|m| {
            let chosen = match m {
                Method::Ng => {
                    let options = SelectionOptions { d_range: Some(d_range.clone()), convention, ..Default::default() };
                    summary.select(&options).map(|r| r.chosen_d)
                }
                Method::Baseline(b) => b.select(summary.spectrum(), summary.n(), d_range.clone()).map(|r| r.chosen_d),
            };
            chosen.map_err(|e| warn!("{m} failed: {e}")).ok()
        })
        .collect()
}

pub fn run_benchmark(config: &BenchmarkConfig) -> Result<BenchmarkTable> {
    config.validate()?;
    let tasks: Vec<(usize, f64, usize)> = config
        .n_values
        .iter()
        .flat_map(|&n| config.snr_values.iter().flat_map(move |&snr| (0..config.replications).map(move |r| (n, snr, r))))
        .collect();

    let run = || -> Vec<Vec<Option<usize>>> {
        tasks
            .par_iter()
            .map(|&(n, snr, r)| match config.replication_dataset(n, snr, r) {
                Ok(x) => run_methods(&x, &config.methods, config.convention),
                Err(e) => {
                    warn!("simulation failed for n={n}, snr={snr}, replication {r}: {e}");
                    vec![None; config.methods.len()]
                }
            })
            .collect()
    };
    let results = match config.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Config(format!("could not start thread pool: {e}")))?
            .install(run),
        None => run(),
    };

    let mut cells = Vec::new();
    let reps = config.replications;
    for (cell_index, chunk) in results.chunks(reps).enumerate() {
        let (n, snr, _) = tasks[cell_index * reps];
        for (k, &method) in config.methods.iter().enumerate() {
            let mut counts = CellCounts {
                method,
                n,
                snr_bits: snr.to_bits(),
                replications: reps,
                correct: 0,
                under: 0,
                over: 0,
                failed: 0,
            };
            for choices in chunk {
                match choices[k] {
                    None => counts.failed += 1,
                    Some(d) if d == config.d_true => counts.correct += 1,
                    Some(d) if d < config.d_true => counts.under += 1,
                    Some(_) => counts.over += 1,
                }
            }
            cells.push(counts);
        }
    }
    Ok(BenchmarkTable { config: config.clone(), cells })
}

/// FNV-1a checksum of a matrix's entries, bit for bit, in storage order.
pub fn matrix_checksum(m: &DMatrix<f64>) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for v in m.iter() {
        for b in v.to_bits().to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}
