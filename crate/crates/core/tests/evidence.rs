use nalgebra::DMatrix;
use ngppca::evidence::{evidence_curve, hyperparams_for_d, log_evidence, NgHyperParams, SampleSummary};
use ngppca::gal::gamma_sample;
use ngppca::linalg::{gaussian_matrix, haar_orthogonal, DataMatrix};
use ngppca::rng::RngStream;
use ngppca::selection::{posterior_probs, select_dimension, softmax, SelectionOptions};
use ngppca::{fit_ppca_ml, EigenSpectrum};
use ngppca_oracle::isotropic_log_evidence_mixture;
use ngppca_oracle::stats::{mean, mean_se};
use rand::Rng;

fn oracle_evidence(norms: &[f64], p: usize, d: usize, a: f64, phi: f64) -> f64 {
    norms.iter().map(|&r| isotropic_log_evidence_mixture(r, p, d, a, phi)).sum()
}

#[test]
fn random_instance_matches_mixture_oracle() {
    let mut rng = RngStream::new(11, 0);
    let x = DataMatrix::new(gaussian_matrix(3, 4, &mut rng)).unwrap();
    let norms = x.row_norms();
    let params = NgHyperParams::new(0.7, 2.5).unwrap();
    let got = log_evidence(&norms, 4, 2, &params).unwrap();
    let want = oracle_evidence(&norms, 4, 2, 0.7, 2.5);
    assert!(((got - want) / want).abs() < 1e-8, "{got} vs {want}");
}

#[test]
fn small_instances_match_mixture_oracle() {
    let mut rng = RngStream::new(12, 0);
    for _ in 0..50 {
        let n = rng.random_range(1..=5);
        let p = rng.random_range(2..=8);
        let d = rng.random_range(1..p);
        let a = 10f64.powf(rng.random_range(-2.0..1.5));
        let phi = 10f64.powf(rng.random_range(-1.5..1.5));
        let scale = 10f64.powf(rng.random_range(-1.0..1.0));
        let x = gaussian_matrix(n, p, &mut rng) * scale;
        let norms: Vec<f64> = x.row_iter().map(|row| row.norm()).collect();
        let params = NgHyperParams::new(a, phi).unwrap();
        let got = log_evidence(&norms, p, d, &params).unwrap();
        let want = oracle_evidence(&norms, p, d, a, phi);
        let rel = ((got - want) / want).abs();
        assert!(rel < 1e-8, "n={n} p={p} d={d} a={a} phi={phi}: {got} vs {want}");
    }
}

#[test]
fn observations_add() {
    let params = NgHyperParams::new(1.0, 4.0).unwrap();
    let one = log_evidence(&[1.3], 3, 1, &params).unwrap();
    let two = log_evidence(&[1.3, 1.3], 3, 1, &params).unwrap();
    assert!((two - 2.0 * one).abs() < 1e-14);
}

// Averages the Gaussian likelihood over draws of the loadings and the noise
// variance, without using the closed form at all.
#[test]
fn monte_carlo_over_the_prior() {
    let (p, d, a, phi) = (2, 1, 1.5, 2.0f64);
    let x = [0.8, -0.5];
    let mut rng = RngStream::new(13, 0);
    let draws = 200_000;
    let mut lik = Vec::with_capacity(draws);
    for _ in 0..draws {
        let w = gaussian_matrix(p, d, &mut rng) / phi.sqrt();
        let sigma2 = gamma_sample(a, phi / 2.0, &mut rng);
        let c = &w * w.transpose() + DMatrix::identity(p, p) * sigma2;
        let det = c[(0, 0)] * c[(1, 1)] - c[(0, 1)] * c[(1, 0)];
        let q = (c[(1, 1)] * x[0] * x[0] - 2.0 * c[(0, 1)] * x[0] * x[1] + c[(0, 0)] * x[1] * x[1]) / det;
        lik.push((-0.5 * q).exp() / (2.0 * std::f64::consts::PI * det.sqrt()));
    }
    let (m, se) = (mean(&lik), mean_se(&lik));
    let norm = (x[0] * x[0] + x[1] * x[1]).sqrt();
    let exact = log_evidence(&[norm], p, d, &NgHyperParams::new(a, phi).unwrap()).unwrap().exp();
    assert!((m - exact).abs() < 5.0 * se, "MC {m} ± {se} vs {exact}");
}

#[test]
fn rotation_leaves_the_curve_unchanged() {
    let mut rng = RngStream::new(14, 0);
    let x = DataMatrix::new(gaussian_matrix(30, 6, &mut rng)).unwrap().center();
    let q = haar_orthogonal(6, &mut rng);
    let xr = DataMatrix::new(x.values() * q).unwrap().center();
    let c0 = evidence_curve(&x, 0.7, 1..=5).unwrap();
    let c1 = evidence_curve(&xr, 0.7, 1..=5).unwrap();
    for (u, v) in c0.log_evidence().iter().zip(c1.log_evidence()) {
        assert!((u - v).abs() < 1e-9 * u.abs(), "{u} vs {v}");
    }
}

#[test]
fn posterior_ignores_a_common_shift() {
    let l = [-3.0, 1.5, 0.2, -10.0];
    let shifted: Vec<f64> = l.iter().map(|v| v + 1234.5).collect();
    for (u, v) in softmax(&l).iter().zip(softmax(&shifted)) {
        assert!((u - v).abs() < 1e-14);
    }
    assert!((softmax(&l).iter().sum::<f64>() - 1.0).abs() < 1e-14);
}

#[test]
fn one_point_curve_is_direct_evidence() {
    let mut rng = RngStream::new(15, 0);
    let x = DataMatrix::new(gaussian_matrix(12, 5, &mut rng)).unwrap().center();
    let curve = evidence_curve(&x, 1.3, 3..=3).unwrap();
    let params = hyperparams_for_d(&x.spectrum().unwrap(), 3, 1.3).unwrap();
    let direct = log_evidence(&x.row_norms(), 5, 3, &params).unwrap();
    assert_eq!(curve.log_evidence(), &[direct]);
    assert_eq!(posterior_probs(&curve), vec![1.0]);
}

#[test]
fn selection_is_deterministic() {
    let mut rng = RngStream::new(16, 0);
    let x = DataMatrix::new(gaussian_matrix(40, 8, &mut rng)).unwrap().center();
    let summary = SampleSummary::new(&x).unwrap();
    let a = summary.select(&SelectionOptions::default()).unwrap();
    let b = summary.select(&SelectionOptions::default()).unwrap();
    assert_eq!(a, b);
}

// At the natural scale φ = 1/λ̄ (the centre of the default grid). The full
// selector is not expected to do this: it discards endpoint maxima.
#[test]
fn pure_noise_curve_peaks_at_small_dimensions() {
    let mut small = 0;
    for r in 0..50 {
        let mut rng = RngStream::new(17, r);
        let x = DataMatrix::new(gaussian_matrix(60, 10, &mut rng)).unwrap().center();
        let phi = 1.0 / x.spectrum().unwrap().mean_eigenvalue();
        let curve = evidence_curve(&x, phi, 1..=9).unwrap();
        if curve.d_values()[curve.argmax_index()] <= 2 {
            small += 1;
        }
    }
    assert!(small >= 45, "only {small}/50 curves peaked at d <= 2");
}

#[test]
fn uncentred_input_is_rejected() {
    let x = DataMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 5.0], vec![0.0, 1.0]]).unwrap();
    assert!(select_dimension(&x, &[1.0], 1..=1).is_err());
}

#[test]
fn ppca_fit_recovers_generating_loadings() {
    let (p, d, sigma) = (5, 2, 0.5);
    let mut rng = RngStream::new(18, 0);
    let w = gaussian_matrix(p, d, &mut rng) * 1.5;
    let target = &w * w.transpose();
    let mut errors = Vec::new();
    for n in [2_500, 40_000] {
        let y = gaussian_matrix(n, d, &mut rng);
        let e = gaussian_matrix(n, p, &mut rng);
        let x = DataMatrix::new(y * w.transpose() + e * sigma).unwrap().center();
        let (w_hat, s2) = fit_ppca_ml(&x.spectrum().unwrap(), d).unwrap();
        let err = (&w_hat * w_hat.transpose() - &target).abs().max();
        errors.push(err);
        assert!((s2 - sigma * sigma).abs() < 0.05, "sigma2 {s2}");
    }
    assert!(errors[1] < errors[0], "{errors:?}");
    assert!(errors[1] < 0.05 * target.abs().max(), "{errors:?}");
}

#[test]
fn ppca_fit_rejects_flat_spectrum() {
    let e = EigenSpectrum::from_eigenvalues(vec![1.0; 4]);
    assert!(fit_ppca_ml(&e, 2).is_err());
}
