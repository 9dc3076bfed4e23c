//! Dense symmetric linear algebra and random matrices.

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::rng::RngStream;

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_REL_TOL: f64 = 1e-14;

/// An `n × p` observation matrix, one row per observation.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    values: DMatrix<f64>,
    centered: bool,
}

impl DataMatrix {
    /// Wraps an `n × p` matrix; requires `n >= 2`, `p >= 2` and finite entries.
    pub fn new(values: DMatrix<f64>) -> Result<Self> {
        if values.nrows() < 2 || values.ncols() < 2 {
            return Err(Error::Precondition(format!(
                "data must have at least 2 rows and 2 columns, got {}x{}",
                values.nrows(),
                values.ncols()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            let (col, row) = (pos / values.nrows(), pos % values.nrows());
            return Err(Error::Precondition(format!("non-finite entry at row {row}, column {col}")));
        }
        Ok(DataMatrix { values, centered: false })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let p = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != p) {
            return Err(Error::Precondition("rows have differing lengths".into()));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        DataMatrix::new(DMatrix::from_row_slice(rows.len(), p, &flat))
    }

    pub fn nrows(&self) -> usize {
        self.values.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn is_centered(&self) -> bool {
        self.centered
    }

    pub fn center(&self) -> DataMatrix {
        center(self)
    }

    /// Accepts the data as already centred if every column mean is within
    /// `rel_tol` of the largest absolute entry.
    pub fn assume_centered(self, rel_tol: f64) -> Result<DataMatrix> {
        let scale = self.values.amax().max(f64::MIN_POSITIVE);
        let n = self.nrows() as f64;
        for (j, col) in self.values.column_iter().enumerate() {
            let mean = col.sum() / n;
            if mean.abs() > rel_tol * scale {
                return Err(Error::Precondition(format!("column {j} has mean {mean}, data are not centred")));
            }
        }
        Ok(DataMatrix { centered: true, ..self })
    }

    /// Euclidean norm of each observation.
    pub fn row_norms(&self) -> Vec<f64> {
        self.values.row_iter().map(|r| r.norm()).collect()
    }

    /// Eigen-spectrum of the `1/n` sample covariance, with negative roundoff
    /// clamped to zero.
    pub fn spectrum(&self) -> Result<EigenSpectrum> {
        Ok(sym_eig(&covariance(self)?)?.clamp_nonnegative())
    }
}

/// Subtracts column means; row order is preserved.
pub fn center(x: &DataMatrix) -> DataMatrix {
    let mut values = x.values.clone();
    let n = values.nrows() as f64;
    for mut col in values.column_iter_mut() {
        let mean = col.sum() / n;
        col.add_scalar_mut(-mean);
    }
    DataMatrix { values, centered: true }
}

/// `S = XᵀX / n` for centred `X`, stored exactly symmetric.
pub fn covariance(x: &DataMatrix) -> Result<DMatrix<f64>> {
    if !x.centered {
        return Err(Error::Precondition("covariance requires centred data".into()));
    }
    let n = x.nrows() as f64;
    let s = x.values.tr_mul(&x.values) / n;
    Ok((&s + s.transpose()) * 0.5)
}

/// Eigenvalues in descending order with matching orthonormal eigenvectors
/// (column `k` of `vectors` pairs with `values[k]`).
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSpectrum {
    values: Vec<f64>,
    vectors: DMatrix<f64>,
}

impl EigenSpectrum {
    /// From precomputed eigenvalues, sorted here; eigenvectors default to the
    /// identity. Mainly for building synthetic spectra.
    pub fn from_eigenvalues(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        let p = values.len();
        EigenSpectrum { values, vectors: DMatrix::identity(p, p) }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.values
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn mean_eigenvalue(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Zeroes eigenvalues that are negative by no more than roundoff
    /// (`1e-10 · λ_max`); larger negative values are left untouched.
    pub fn clamp_nonnegative(mut self) -> Self {
        let top = self.values.first().copied().unwrap_or(0.0).max(0.0);
        for v in &mut self.values {
            if *v < 0.0 && *v >= -1e-10 * top {
                *v = 0.0;
            }
        }
        self
    }
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
pub fn sym_eig(s: &DMatrix<f64>) -> Result<EigenSpectrum> {
    let p = s.nrows();
    if s.ncols() != p {
        return Err(Error::Precondition(format!("matrix must be square, got {}x{}", p, s.ncols())));
    }
    if s.iter().any(|v| !v.is_finite()) {
        return Err(Error::Precondition("matrix has non-finite entries".into()));
    }
    let mut a = s.clone();
    let mut v = DMatrix::<f64>::identity(p, p);
    let target = JACOBI_REL_TOL * s.norm();

    let off_norm = |a: &DMatrix<f64>| {
        let mut acc = 0.0;
        for j in 0..p {
            for i in 0..p {
                if i != j {
                    acc += a[(i, j)] * a[(i, j)];
                }
            }
        }
        acc.sqrt()
    };

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_norm(&a) <= target {
            converged = true;
            break;
        }
        for q in 1..p {
            for r in 0..q {
                let apq = a[(r, q)];
                if apq == 0.0 {
                    continue;
                }
                let tau = (a[(q, q)] - a[(r, r)]) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + tau.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let sn = t * c;
                rotate_columns(&mut a, r, q, c, sn);
                rotate_rows(&mut a, r, q, c, sn);
                rotate_columns(&mut v, r, q, c, sn);
                // Rotations zero this entry exactly; don't let roundoff linger.
                a[(r, q)] = 0.0;
                a[(q, r)] = 0.0;
            }
        }
    }
    if !converged && off_norm(&a) > target {
        return Err(Error::NoConvergence { sweeps: JACOBI_MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = DMatrix::from_fn(p, p, |row, k| v[(row, order[k])]);
    Ok(EigenSpectrum { values, vectors })
}

fn rotate_columns(m: &mut DMatrix<f64>, r: usize, q: usize, c: f64, s: f64) {
    for k in 0..m.nrows() {
        let mr = m[(k, r)];
        let mq = m[(k, q)];
        m[(k, r)] = c * mr - s * mq;
        m[(k, q)] = s * mr + c * mq;
    }
}

fn rotate_rows(m: &mut DMatrix<f64>, r: usize, q: usize, c: f64, s: f64) {
    for k in 0..m.ncols() {
        let mr = m[(r, k)];
        let mq = m[(q, k)];
        m[(r, k)] = c * mr - s * mq;
        m[(q, k)] = s * mr + c * mq;
    }
}

/// `n × p` matrix of i.i.d. standard normals, drawn row by row.
pub fn gaussian_matrix(n: usize, p: usize, rng: &mut RngStream) -> DMatrix<f64> {
    let draws: Vec<f64> = (0..n * p).map(|_| StandardNormal.sample(rng)).collect();
    DMatrix::from_row_slice(n, p, &draws)
}

pub fn gaussian_vector(p: usize, rng: &mut RngStream) -> DVector<f64> {
    DVector::from_iterator(p, (0..p).map(|_| StandardNormal.sample(rng)))
}

/// Haar-distributed `p × p` orthogonal matrix: QR of a standard Gaussian
/// matrix with the signs of `diag(R)` folded into the columns of `Q`.
pub fn haar_orthogonal(p: usize, rng: &mut RngStream) -> DMatrix<f64> {
    assert!(p >= 1, "haar_orthogonal: p must be at least 1");
    let qr = gaussian_matrix(p, p, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for k in 0..p {
        if r[(k, k)] < 0.0 {
            q.column_mut(k).neg_mut();
        }
    }
    q
}
