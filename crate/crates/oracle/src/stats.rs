//! Monte Carlo summaries and two-sample Kolmogorov–Smirnov tests.

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Standard error of the mean.
pub fn mean_se(xs: &[f64]) -> f64 {
    (variance(xs) / xs.len() as f64).sqrt()
}

/// Sample covariance of `x_j` and `x_k` across draws, with the standard
/// error of that estimate (from the variance of the centred products).
pub fn cov_with_se(draws: &[Vec<f64>], j: usize, k: usize) -> (f64, f64) {
    let mj = mean(&draws.iter().map(|d| d[j]).collect::<Vec<_>>());
    let mk = mean(&draws.iter().map(|d| d[k]).collect::<Vec<_>>());
    let prods: Vec<f64> = draws.iter().map(|d| (d[j] - mj) * (d[k] - mk)).collect();
    (mean(&prods), mean_se(&prods))
}

/// Two-sample Kolmogorov–Smirnov statistic `sup |F_a − F_b|`.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let t = a[i].min(b[j]);
        while i < a.len() && a[i] <= t {
            i += 1;
        }
        while j < b.len() && b[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic critical value of the two-sample KS statistic at level 1%.
pub fn ks_critical_1pct(na: usize, nb: usize) -> f64 {
    let (na, nb) = (na as f64, nb as f64);
    1.627_6 * ((na + nb) / (na * nb)).sqrt()
}

/// Asymptotic one-sample critical value at level 1%.
pub fn ks_one_sample_critical_1pct(n: usize) -> f64 {
    1.627_6 / (n as f64).sqrt()
}
