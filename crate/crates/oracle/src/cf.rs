//! Characteristic functions for distributional checks.

use num_complex::Complex64;

/// `(1 + ½ uᵀΣu − i μᵀu)^(−s)`.
pub fn gal_cf(u: &[f64], sigma: &[Vec<f64>], mu: &[f64], s: f64) -> Complex64 {
    let mut quad = 0.0;
    for i in 0..u.len() {
        for j in 0..u.len() {
            quad += u[i] * sigma[i][j] * u[j];
        }
    }
    let drift: f64 = u.iter().zip(mu).map(|(a, b)| a * b).sum();
    Complex64::new(1.0 + 0.5 * quad, -drift).powf(-s)
}

/// Empirical characteristic function `mean exp(i uᵀz)`.
pub fn empirical_cf(u: &[f64], draws: &[Vec<f64>]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for z in draws {
        let t: f64 = u.iter().zip(z).map(|(a, b)| a * b).sum();
        acc += Complex64::from_polar(1.0, t);
    }
    acc / draws.len() as f64
}
