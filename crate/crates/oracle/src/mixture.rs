//! Generalized asymmetric Laplace densities via their Gaussian scale-mixture
//! representation, integrated numerically over the gamma mixing variable.

use crate::gamma::ln_gamma_lanczos;
use crate::quad::log_integrate_peaked;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Returns `(inverse, ln det)` of a small SPD matrix by Gauss–Jordan with
/// partial pivoting.
pub fn invert(a: &[Vec<f64>]) -> (Vec<Vec<f64>>, f64) {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut inv: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut log_det = 0.0;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())
            .unwrap();
        m.swap(col, piv);
        inv.swap(col, piv);
        let d = m[col][col];
        assert!(d != 0.0, "singular matrix");
        log_det += d.abs().ln();
        for j in 0..n {
            m[col][j] /= d;
            inv[col][j] /= d;
        }
        for i in 0..n {
            if i != col {
                let f = m[i][col];
                for j in 0..n {
                    m[i][j] -= f * m[col][j];
                    inv[i][j] -= f * inv[col][j];
                }
            }
        }
    }
    (inv, log_det)
}

fn quad_form(m: &[Vec<f64>], a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..a.len() {
        for j in 0..b.len() {
            s += a[i] * m[i][j] * b[j];
        }
    }
    s
}

/// `ln ∫_0^∞ N(x; μu, uΣ) Gamma(u; s, 1) du`.
pub fn gal_log_density_mixture(x: &[f64], sigma: &[Vec<f64>], mu: &[f64], s: f64) -> f64 {
    let p = x.len() as f64;
    let (inv, log_det) = invert(sigma);
    let q = quad_form(&inv, x, x);
    let cross = quad_form(&inv, mu, x);
    let m = quad_form(&inv, mu, mu);
    let lg = ln_gamma_lanczos(s);
    // Substitute u = e^v.
    let g = move |v: f64| {
        let u = v.exp();
        -0.5 * p * LN_2PI - 0.5 * p * v - 0.5 * log_det - 0.5 * q / u + cross - 0.5 * m * u
            + (s - 1.0) * v
            - u
            - lg
            + v
    };
    log_integrate_peaked(g, -200.0, 60.0, 1e-14)
}

/// Per-observation marginal log-likelihood of the isotropic normal-gamma
/// PPCA model, `x ~ GAL_p(2φ⁻¹ I, 0, a + d/2)`, depending on `x` only via
/// its Euclidean norm.
pub fn isotropic_log_evidence_mixture(norm: f64, p: usize, d: usize, a: f64, phi: f64) -> f64 {
    let p = p as f64;
    let s = a + d as f64 / 2.0;
    let lg = ln_gamma_lanczos(s);
    let r2 = norm * norm;
    let g = move |v: f64| {
        let u = v.exp();
        let var = 2.0 * u / phi;
        -0.5 * p * (LN_2PI + var.ln()) - 0.5 * r2 / var + (s - 1.0) * v - u - lg + v
    };
    log_integrate_peaked(g, -200.0, 60.0, 1e-14)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_laplace() {
        // GAL_1(2, 0, 1) is ½ e^{-|x|}.
        let v = gal_log_density_mixture(&[3.0], &[vec![2.0]], &[0.0], 1.0);
        assert!((v - (0.5f64.ln() - 3.0)).abs() < 1e-12);
    }

    #[test]
    fn invert_2x2() {
        let (inv, ld) = invert(&[vec![2.0, 1.0], vec![1.0, 3.0]]);
        assert!((ld - 5.0f64.ln()).abs() < 1e-14);
        assert!((inv[0][0] - 0.6).abs() < 1e-14 && (inv[0][1] + 0.2).abs() < 1e-14);
    }
}
