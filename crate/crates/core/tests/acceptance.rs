//! Acceptance criteria, one PASS/FAIL line each. Run with
//! `cargo test -p ngppca --test acceptance`.

use std::process::ExitCode;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use ngppca::baselines::{isotropic_ml_select, profile_likelihood_select, Baseline};
use ngppca::evidence::{log_evidence, NgHyperParams, SampleSummary};
use ngppca::gal::{gal_log_density, gal_sample, gamma_sample, GalParams};
use ngppca::linalg::{gaussian_matrix, gaussian_vector};
use ngppca::rng::RngStream;
use ngppca::selection::SelectionOptions;
use ngppca::simulation::{run_benchmark, BenchmarkConfig, Method};
use ngppca::special::log_bessel_k;
use ngppca_oracle::selectors::{isotropic_ml_choice, profile_likelihood_choice};
use ngppca_oracle::stats::{cov_with_se, ks_critical_1pct, ks_statistic, mean, mean_se};
use ngppca_oracle::{isotropic_log_evidence_mixture, log_bessel_k_quad, log_integrate};
use rand::Rng;

/// Master seed for every simulated scenario below, fixed before any of them
/// was run.
const MASTER_SEED: u64 = 2025;
const DRAWS: usize = 100_000;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn scenario_config() -> BenchmarkConfig {
    BenchmarkConfig { master_seed: MASTER_SEED, p: 50, d_true: 20, ..Default::default() }
}

fn evidence_exactness() -> Outcome {
    let start = Instant::now();
    let mut rng = RngStream::new(101, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let n = rng.random_range(1..=5);
        let p = rng.random_range(2..=8);
        let d = rng.random_range(1..p);
        let a = 10f64.powf(rng.random_range(-2.0..1.5));
        let phi = 10f64.powf(rng.random_range(-1.5..1.5));
        let x = gaussian_matrix(n, p, &mut rng) * 10f64.powf(rng.random_range(-1.0..1.0));
        let norms: Vec<f64> = x.row_iter().map(|r| r.norm()).collect();
        let got = log_evidence(&norms, p, d, &NgHyperParams::new(a, phi).unwrap()).unwrap();
        let want: f64 = norms.iter().map(|&r| isotropic_log_evidence_mixture(r, p, d, a, phi)).sum();
        worst = worst.max(((got - want) / want).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(worst <= 1e-8 && secs < 10.0, format!("max relative error {worst:.2e} over 50 instances (tol 1e-8), {secs:.2} s (limit 10 s)"))
}

fn hand_derived_value() -> Outcome {
    let got = log_evidence(&[1.0], 2, 1, &NgHyperParams::new(1.0, 4.0).unwrap()).unwrap();
    let target = -3.1447213;
    outcome(
        (got - target).abs() <= 1e-6,
        format!("log_evidence = {got:.10}, target {target} ± 1e-6 (closed form of the normalized density: ln 2 − 2 − ln π = {:.10})", std::f64::consts::LN_2 - 2.0 - std::f64::consts::PI.ln()),
    )
}

struct ScenarioRun {
    chosen: usize,
    posterior_true: f64,
    runner_up: usize,
    laplace_runner_up: usize,
}

fn runner_up(d_values: &[usize], scores: &[f64]) -> usize {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&i, &j| scores[j].total_cmp(&scores[i]).then(i.cmp(&j)));
    d_values[idx[1]]
}

fn scenario(n: usize) -> Vec<ScenarioRun> {
    let config = scenario_config();
    (0..20)
        .map(|r| {
            let x = config.replication_dataset(n, 20.0, r).unwrap().center();
            let summary = SampleSummary::new(&x).unwrap();
            let report = summary.select(&SelectionOptions::default()).unwrap();
            let laplace = Baseline::Laplace.select(summary.spectrum(), n, summary.default_d_range()).unwrap();
            ScenarioRun {
                chosen: report.chosen_d,
                posterior_true: report.posterior_of(20).unwrap_or(0.0),
                runner_up: runner_up(report.curve.d_values(), &report.posterior),
                laplace_runner_up: runner_up(&laplace.d_values, &laplace.scores),
            }
        })
        .collect()
}

fn simple_scenario() -> Outcome {
    let start = Instant::now();
    let runs = scenario(100);
    let correct = runs.iter().filter(|r| r.chosen == 20).count();
    let confident = runs.iter().filter(|r| r.chosen == 20 && r.posterior_true > 0.99).count();
    let secs = start.elapsed().as_secs_f64();
    let chosen: Vec<usize> = runs.iter().map(|r| r.chosen).collect();
    outcome(
        correct >= 18 && confident >= 15 && secs < 300.0,
        format!("d=20 in {correct}/20 (need 18), posterior > 0.99 in {confident}/20 (need 15), {secs:.1} s; choices {chosen:?}"),
    )
}

fn challenging_scenario() -> Outcome {
    let runs = scenario(40);
    let correct = runs.iter().filter(|r| r.chosen == 20).count();
    let count = |f: &dyn Fn(&ScenarioRun) -> usize, d: usize| runs.iter().filter(|r| f(r) == d).count();
    let (ng21, ng19) = (count(&|r| r.runner_up, 21), count(&|r| r.runner_up, 19));
    let (lp19, lp21) = (count(&|r| r.laplace_runner_up, 19), count(&|r| r.laplace_runner_up, 21));
    let chosen: Vec<usize> = runs.iter().map(|r| r.chosen).collect();
    outcome(
        correct >= 14 && ng21 > ng19 && lp19 > lp21,
        format!(
            "NG d=20 in {correct}/20 (need 14); NG runner-up M21 {ng21} vs M19 {ng19}; Laplace runner-up M19 {lp19} vs M21 {lp21}; NG choices {chosen:?}"
        ),
    )
}

fn benchmark_orientation() -> Outcome {
    let config = BenchmarkConfig {
        n_values: vec![40, 100],
        snr_values: vec![5.0, 20.0],
        replications: 20,
        methods: vec![Method::Ng, Method::Baseline(Baseline::ProfileLikelihood)],
        ..scenario_config()
    };
    let table = run_benchmark(&config).unwrap();
    let mut pass = true;
    let mut cells = Vec::new();
    for &n in &config.n_values {
        for &snr in &config.snr_values {
            let ng = table.cell(Method::Ng, n, snr).unwrap().accuracy();
            let pl = table.cell(Method::Baseline(Baseline::ProfileLikelihood), n, snr).unwrap().accuracy();
            pass &= ng >= pl;
            cells.push(format!("(n={n}, snr={snr}) NG {ng:.0}% vs PL {pl:.0}%"));
        }
    }
    let headline = table.cell(Method::Ng, 100, 20.0).unwrap().accuracy();
    pass &= headline >= 90.0;
    outcome(pass, format!("{}; NG at (100, 20) {headline:.0}% (need 90%)", cells.join(", ")))
}

fn column(draws: &[Vec<f64>], j: usize) -> Vec<f64> {
    draws.iter().map(|d| d[j]).collect()
}

fn gal_draws(params: &GalParams, n: usize, rng: &mut RngStream) -> Vec<Vec<f64>> {
    (0..n).map(|_| gal_sample(params, rng).iter().copied().collect()).collect()
}

/// Largest componentwise or norm KS statistic as a fraction of the 1% critical
/// value; below 1 passes.
fn ks_ratio(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let crit = ks_critical_1pct(a.len(), b.len());
    let norm = |d: &Vec<f64>| d.iter().map(|v| v * v).sum::<f64>().sqrt();
    let na: Vec<f64> = a.iter().map(norm).collect();
    let nb: Vec<f64> = b.iter().map(norm).collect();
    (0..a[0].len()).map(|j| ks_statistic(&column(a, j), &column(b, j))).fold(ks_statistic(&na, &nb), f64::max) / crit
}

fn gal_properties() -> Outcome {
    let mut failures = Vec::new();
    let mut ratios = Vec::new();
    let mut ks_check = |label: &'static str, a: &[Vec<f64>], b: &[Vec<f64>], failures: &mut Vec<&str>| {
        let r = ks_ratio(a, b);
        ratios.push(format!("{label} {r:.2}"));
        if r >= 1.0 {
            failures.push(label);
        }
    };

    let mut rng = RngStream::new(601, 0);
    let sigma = DMatrix::from_row_slice(3, 3, &[1.0, 0.4, 0.0, 0.4, 2.0, -0.3, 0.0, -0.3, 0.5]);
    let params = GalParams::new(sigma, DVector::from_vec(vec![0.5, -0.2, 1.0]), 1.7).unwrap();
    let z = gal_draws(&params, DRAWS, &mut rng);
    let (m, c) = (params.mean(), params.covariance());
    let moments_ok = (0..3).all(|j| {
        let col = column(&z, j);
        (mean(&col) - m[j]).abs() < 5.0 * mean_se(&col)
            && (0..3).all(|k| {
                let (est, se) = cov_with_se(&z, j, k);
                (est - c[(j, k)]).abs() < 5.0 * se
            })
    });
    if !moments_ok {
        failures.push("moments");
    }

    let sigma2 = DMatrix::from_row_slice(2, 2, &[1.0, 0.25, 0.25, 0.5]);
    let mu2 = DVector::from_vec(vec![0.3, -0.6]);
    let p1 = GalParams::new(sigma2.clone(), mu2.clone(), 0.7).unwrap();
    let p2 = GalParams::new(sigma2.clone(), mu2.clone(), 1.8).unwrap();
    let p12 = GalParams::new(sigma2, mu2, 2.5).unwrap();
    let sums: Vec<Vec<f64>> =
        (0..DRAWS).map(|_| (gal_sample(&p1, &mut rng) + gal_sample(&p2, &mut rng)).iter().copied().collect()).collect();
    ks_check("convolution", &sums, &gal_draws(&p12, DRAWS, &mut rng), &mut failures);

    let (p, d, phi, a) = (5usize, 2usize, 1.5f64, 0.9f64);
    let projected: Vec<Vec<f64>> = (0..DRAWS)
        .map(|_| {
            let w = gaussian_matrix(p, d, &mut rng) / phi.sqrt();
            (w * gaussian_vector(d, &mut rng)).iter().copied().collect()
        })
        .collect();
    let direct = gal_draws(&GalParams::isotropic(p, 2.0 / phi, d as f64 / 2.0).unwrap(), DRAWS, &mut rng);
    ks_check("projection", &projected, &direct, &mut failures);

    let noise: Vec<Vec<f64>> = (0..DRAWS)
        .map(|_| {
            let s = gamma_sample(a, phi / 2.0, &mut rng).sqrt();
            (gaussian_vector(p, &mut rng) * s).iter().copied().collect()
        })
        .collect();
    let direct = gal_draws(&GalParams::isotropic(p, 2.0 / phi, a).unwrap(), DRAWS, &mut rng);
    ks_check("noise", &noise, &direct, &mut failures);

    let marginal: Vec<Vec<f64>> = (0..DRAWS)
        .map(|_| {
            let w = gaussian_matrix(p, d, &mut rng) / phi.sqrt();
            let s = gamma_sample(a, phi / 2.0, &mut rng).sqrt();
            (w * gaussian_vector(d, &mut rng) + gaussian_vector(p, &mut rng) * s).iter().copied().collect()
        })
        .collect();
    let direct = gal_draws(&GalParams::isotropic(p, 2.0 / phi, a + d as f64 / 2.0).unwrap(), DRAWS, &mut rng);
    ks_check("marginal", &marginal, &direct, &mut failures);

    let mut worst_mass: f64 = 0.0;
    for &(s, m, shape) in &[(2.0, 0.0, 1.0), (0.7, 0.4, 0.8), (1.5, -1.1, 2.6)] {
        let params = GalParams::new(DMatrix::from_element(1, 1, s), DVector::from_element(1, m), shape).unwrap();
        let f = |t: f64| gal_log_density(&DVector::from_element(1, t), &params).unwrap();
        let mass = log_integrate(f, -400.0, 0.0, 1e-10).exp() + log_integrate(f, 0.0, 400.0, 1e-10).exp();
        worst_mass = worst_mass.max((mass - 1.0).abs());
    }
    let params = GalParams::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 0.8]), DVector::from_vec(vec![0.2, -0.4]), 1.6).unwrap();
    let inner = |x1: f64| {
        let f = |x2: f64| gal_log_density(&DVector::from_vec(vec![x1, x2]), &params).unwrap();
        let (u, v) = (log_integrate(f, -120.0, 0.0, 1e-9), log_integrate(f, 0.0, 120.0, 1e-9));
        u.max(v) + (-(u - v).abs()).exp().ln_1p()
    };
    let mass = log_integrate(inner, -120.0, 0.0, 1e-7).exp() + log_integrate(inner, 0.0, 120.0, 1e-7).exp();
    worst_mass = worst_mass.max((mass - 1.0).abs());
    if worst_mass > 1e-4 {
        failures.push("normalization");
    }

    let ratios = ratios.join(", ");
    let detail = format!(
        "{} at {DRAWS} draws; KS/critical(1%): {ratios}; worst mass error {worst_mass:.1e} (tol 1e-4)",
        if failures.is_empty() { "all checks pass".to_string() } else { format!("failed: {}", failures.join(", ")) }
    );
    outcome(failures.is_empty(), detail)
}

fn special_functions() -> Outcome {
    let rel = |a: f64, b: f64| (a - b).exp_m1().abs();
    let mut grid_worst: f64 = 0.0;
    let mut finite = true;
    for &nu in &[0.0, 0.3, 1.0, 5.0, 25.0, 100.0, 250.0, 500.0] {
        for &x in &[1e-3, 0.1, 1.0, 10.0, 100.0, 700.0] {
            let got = log_bessel_k(nu, x).unwrap();
            finite &= got.is_finite();
            grid_worst = grid_worst.max(rel(got, log_bessel_k_quad(nu, x)));
        }
    }
    let mut rng = RngStream::new(701, 0);
    let mut rec_worst: f64 = 0.0;
    for _ in 0..500 {
        let (nu, x) = (rng.random_range(0.0..50.0), rng.random_range(0.1..100.0));
        let up = log_bessel_k(nu + 1.0, x).unwrap();
        let rhs = (log_bessel_k(nu - 1.0, x).unwrap() - up).exp() + 2.0 * nu / x * (log_bessel_k(nu, x).unwrap() - up).exp();
        rec_worst = rec_worst.max((rhs - 1.0).abs());
    }
    let mut half_worst: f64 = 0.0;
    for _ in 0..500 {
        let x: f64 = rng.random_range(1e-2..600.0);
        let closed = [1.0, 1.0 + 1.0 / x, 1.0 + 3.0 / x + 3.0 / (x * x)];
        for (k, poly) in closed.iter().enumerate() {
            let want = 0.5 * (std::f64::consts::PI / (2.0 * x)).ln() - x + poly.ln();
            half_worst = half_worst.max(rel(log_bessel_k(0.5 + k as f64, x).unwrap(), want));
        }
    }
    outcome(
        finite && grid_worst <= 1e-8 && rec_worst <= 1e-9 && half_worst <= 1e-11,
        format!("grid max rel {grid_worst:.1e} (tol 1e-8), recurrence {rec_worst:.1e} (tol 1e-9), half-integer {half_worst:.1e} (tol 1e-11), all finite: {finite}"),
    )
}

fn determinism() -> Outcome {
    let base = BenchmarkConfig { replications: 2, master_seed: 1, ..Default::default() };
    let csvs: Vec<String> = [Some(1), Some(2), Some(8), Some(8)]
        .into_iter()
        .map(|threads| run_benchmark(&BenchmarkConfig { threads, ..base.clone() }).unwrap().to_csv())
        .collect();
    let same = csvs.windows(2).all(|w| w[0] == w[1]);
    outcome(same, format!("default grid, 2 replications, threads 1/2/8 and a repeat: {} bytes each, identical: {same}", csvs[0].len()))
}

fn baseline_oracles() -> Outcome {
    let mut rng = RngStream::new(901, 0);
    let mut mismatches = 0;
    for _ in 0..100 {
        let p = rng.random_range(3..=10);
        let mut l: Vec<f64> = (0..p).map(|_| 10f64.powf(rng.random_range(-2.0..2.0))).collect();
        l.sort_by(|a, b| b.total_cmp(a));
        let n = rng.random_range(5..200);
        if profile_likelihood_select(&l, 1..=p - 1).unwrap().chosen_d != profile_likelihood_choice(&l) {
            mismatches += 1;
        }
        if isotropic_ml_select(&l, n, 1..=p - 1).unwrap().chosen_d != isotropic_ml_choice(&l, n) {
            mismatches += 1;
        }
    }
    let worked = isotropic_ml_select(&[3.0, 3.0, 1.0, 1.0, 1.0], 17, 1..=4).unwrap().chosen_d;
    outcome(mismatches == 0 && worked == 2, format!("{mismatches} mismatches over 100 spectra x 2 selectors; worked example d = {worked}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("evidence matches mixture quadrature", evidence_exactness),
        ("hand-derived evidence value", hand_derived_value),
        ("simple scenario n=100", simple_scenario),
        ("challenging scenario n=40", challenging_scenario),
        ("benchmark orientation", benchmark_orientation),
        ("GAL property suite", gal_properties),
        ("special functions", special_functions),
        ("benchmark determinism", determinism),
        ("baseline oracles", baseline_oracles),
    ];
    let mut failed = 0;
    for (i, (label, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!("{} {}. {label}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
