//! Brute-force evaluations of the baseline dimension selectors, written as
//! literally as possible (products of densities, no log-space shortcuts
//! unless a product would leave the `f64` range).

use crate::gamma::gamma_half_integer;

/// First index (1-based `d`) of the maximum of `scores`, scanning `d` upward.
pub fn argmax_first(d_values: &[usize], scores: &[f64]) -> usize {
    let mut best = 0;
    for i in 1..scores.len() {
        if scores[i] > scores[best] {
            best = i;
        }
    }
    d_values[best]
}

fn normal_pdf(x: f64, m: f64, var: f64) -> f64 {
    (-(x - m) * (x - m) / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
}

/// Profile log-likelihood of the two-block split at `q` with pooled MLE
/// variance, evaluated as the log of a product of normal densities.
pub fn profile_likelihood_score(eigenvalues: &[f64], q: usize, var_floor: f64) -> f64 {
    let p = eigenvalues.len();
    let (head, tail) = eigenvalues.split_at(q);
    let m1 = head.iter().sum::<f64>() / head.len() as f64;
    let m2 = tail.iter().sum::<f64>() / tail.len() as f64;
    let ss: f64 = head.iter().map(|l| (l - m1).powi(2)).sum::<f64>()
        + tail.iter().map(|l| (l - m2).powi(2)).sum::<f64>();
    let var = (ss / p as f64).max(var_floor);
    let mut log_l = 0.0;
    for &l in head {
        log_l += normal_pdf(l, m1, var).ln();
    }
    for &l in tail {
        log_l += normal_pdf(l, m2, var).ln();
    }
    log_l
}

pub fn profile_likelihood_choice(eigenvalues: &[f64]) -> usize {
    let p = eigenvalues.len();
    let floor = 1e-12 * eigenvalues[0] * eigenvalues[0];
    let qs: Vec<usize> = (1..p).collect();
    let scores: Vec<f64> = qs.iter().map(|&q| profile_likelihood_score(eigenvalues, q, floor)).collect();
    argmax_first(&qs, &scores)
}

/// Isotropic two-eigenvalue Gaussian log-likelihood at its maximum for a
/// given `d`, as `-(n/2) ln(â^d b̂^(p-d) (2π e)^p)`.
pub fn isotropic_ml_score(eigenvalues: &[f64], n: usize, d: usize) -> f64 {
    let p = eigenvalues.len();
    let a_hat = eigenvalues[..d].iter().sum::<f64>() / d as f64;
    let b_hat = (eigenvalues[d..].iter().sum::<f64>() / (p - d) as f64).max(1e-12 * eigenvalues[0]);
    let det = a_hat.powi(d as i32) * b_hat.powi((p - d) as i32);
    let two_pi_e = 2.0 * std::f64::consts::PI * std::f64::consts::E;
    -0.5 * n as f64 * (det * two_pi_e.powi(p as i32)).ln()
}

pub fn isotropic_ml_choice(eigenvalues: &[f64], n: usize) -> usize {
    let p = eigenvalues.len();
    let ds: Vec<usize> = (1..p).collect();
    let scores: Vec<f64> = ds.iter().map(|&d| isotropic_ml_score(eigenvalues, n, d)).collect();
    argmax_first(&ds, &scores)
}

/// Laplace-approximated PPCA evidence evaluated straight-line as a product
/// (only for tiny `p` and `n`, where nothing leaves the `f64` range).
pub fn laplace_evidence_plain(eigenvalues: &[f64], n: usize, d: usize) -> f64 {
    let p = eigenvalues.len();
    let nf = n as f64;
    let pi = std::f64::consts::PI;
    let mut p_u = 0.5f64.powi(d as i32);
    for i in 1..=d {
        let k = (p - i + 1) as u32;
        p_u *= gamma_half_integer(k) * pi.powf(-(k as f64) / 2.0);
    }
    let sigma2 = eigenvalues[d..].iter().sum::<f64>() / (p - d) as f64;
    let mut lik = 1.0;
    for &l in &eigenvalues[..d] {
        lik *= l.powf(-nf / 2.0);
    }
    lik *= sigma2.powf(-nf * (p - d) as f64 / 2.0);
    let m = (p * d) as f64 - (d * (d + 1)) as f64 / 2.0;
    let vol = (2.0 * pi).powf((m + d as f64) / 2.0);
    let hat = |j: usize| if j < d { eigenvalues[j] } else { sigma2 };
    let mut a_z = 1.0;
    for i in 0..d {
        for j in i + 1..p {
            a_z *= (1.0 / hat(j) - 1.0 / hat(i)) * (eigenvalues[i] - eigenvalues[j]) * nf;
        }
    }
    p_u * lik * vol / a_z.sqrt() * nf.powf(-(d as f64) / 2.0)
}
