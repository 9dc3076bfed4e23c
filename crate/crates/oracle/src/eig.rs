//! Eigenvalues of a small symmetric matrix as roots of `det(S − λI)`,
//! bracketed by a scan over the Gershgorin interval and refined by bisection.

fn det(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    let mut d = 1.0;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())
            .unwrap();
        if m[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            m.swap(piv, col);
            d = -d;
        }
        d *= m[col][col];
        for i in col + 1..n {
            let f = m[i][col] / m[col][col];
            for j in col..n {
                m[i][j] -= f * m[col][j];
            }
        }
    }
    d
}

fn char_poly(s: &[Vec<f64>], lambda: f64) -> f64 {
    let mut m = s.to_vec();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] -= lambda;
    }
    det(m)
}

/// Eigenvalues in descending order. Panics if fewer than `n` sign changes
/// are found (near-degenerate spectra are outside this oracle's reach).
pub fn eigenvalues_by_root_finding(s: &[Vec<f64>]) -> Vec<f64> {
    let n = s.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r: f64 = (0..n).filter(|&j| j != i).map(|j| s[i][j].abs()).sum();
        lo = lo.min(s[i][i] - r);
        hi = hi.max(s[i][i] + r);
    }
    lo -= 1e-9 * (hi - lo).max(1.0);
    hi += 1e-9 * (hi - lo).max(1.0);
    const SCAN: usize = 200_000;
    let step = (hi - lo) / SCAN as f64;
    let mut roots = Vec::with_capacity(n);
    let mut prev_x = lo;
    let mut prev_f = char_poly(s, lo);
    for k in 1..=SCAN {
        let x = lo + step * k as f64;
        let f = char_poly(s, x);
        if f == 0.0 {
            roots.push(x);
        } else if prev_f != 0.0 && (f > 0.0) != (prev_f > 0.0) {
            let (mut a, mut b, mut fa) = (prev_x, x, prev_f);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                let fm = char_poly(s, mid);
                if (fm > 0.0) == (fa > 0.0) {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            roots.push(0.5 * (a + b));
        }
        prev_x = x;
        prev_f = f;
    }
    assert_eq!(roots.len(), n, "root scan missed eigenvalues");
    roots.sort_by(|a, b| b.partial_cmp(a).unwrap());
    roots
}
