//! Dense symmetric linear algebra for small problems.
//!
//! Everything in this module is sized for quadric problems (n up to a few
//! dozen): eigendecompositions use cyclic Jacobi rotations, which keep the
//! eigenvector matrix orthogonal to machine precision. Empty (0×0 and n×0)
//! matrices are ordinary values; the hyperplane of a one-dimensional problem
//! is a single point and its basis has no columns.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Maximum number of cyclic Jacobi sweeps before giving up.
pub const MAX_JACOBI_SWEEPS: usize = 100;

/// Relative and absolute thresholds shared by every numerical decision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub tol_rel: f64,
    pub tol_abs: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tol_rel: 1e-9,
            tol_abs: 1e-12,
        }
    }
}

impl Tolerances {
    pub fn new(tol_rel: f64, tol_abs: f64) -> Result<Self> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !ok(tol_rel) || !ok(tol_abs) {
            return Err(Error::InvalidTolerances { tol_rel, tol_abs });
        }
        Ok(Tolerances { tol_rel, tol_abs })
    }

    /// `tol_rel * max(1, scale) + tol_abs`.
    pub fn band(&self, scale: f64) -> f64 {
        self.tol_rel * scale.max(1.0) + self.tol_abs
    }
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds a matrix from rows; every row must have `cols` entries.
    pub fn from_rows(rows: &[Vec<f64>], cols: usize) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Matrix whose columns are the given vectors, all of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<f64>]) -> Self {
        Matrix::from_fn(rows, columns.len(), |i, j| columns[j][i])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len(), "matvec dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `selfᵀ · x`.
    pub fn tr_matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.rows, x.len(), "tr_matvec dimension mismatch");
        let mut out = vec![0.0; self.cols];
        for (i, &xi) in x.iter().enumerate() {
            for (o, &m) in out.iter_mut().zip(self.row(i)) {
                *o += m * xi;
            }
        }
        out
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)] - other[(i, j)])
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Square symmetric matrix. Construction symmetrizes the input exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix(Matrix);

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix(Matrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        SymMatrix(Matrix::identity(n))
    }

    pub fn diag(d: &[f64]) -> Self {
        let n = d.len();
        SymMatrix(Matrix::from_fn(n, n, |i, j| if i == j { d[i] } else { 0.0 }))
    }

    /// Symmetrizes `m` as `(m + mᵀ) / 2`.
    pub fn from_matrix(m: Matrix) -> Result<Self> {
        if m.rows != m.cols {
            return Err(Error::DimensionMismatch {
                expected: m.rows,
                got: m.cols,
            });
        }
        let n = m.rows;
        let sym = Matrix::from_fn(n, n, |i, j| {
            if i == j {
                m[(i, i)]
            } else {
                0.5 * (m[(i, j)] + m[(j, i)])
            }
        });
        Ok(SymMatrix(sym))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        SymMatrix::from_matrix(Matrix::from_rows(rows, rows.len())?)
    }

    pub fn n(&self) -> usize {
        self.0.rows
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn max_abs(&self) -> f64 {
        self.0.max_abs()
    }

    pub fn scale(&self, s: f64) -> SymMatrix {
        SymMatrix(Matrix::from_fn(self.n(), self.n(), |i, j| s * self.0[(i, j)]))
    }

    /// `alpha * self + beta * other`.
    pub fn combine(&self, alpha: f64, other: &SymMatrix, beta: f64) -> SymMatrix {
        assert_eq!(self.n(), other.n());
        let n = self.n();
        SymMatrix(Matrix::from_fn(n, n, |i, j| {
            alpha * self.0[(i, j)] + beta * other.0[(i, j)]
        }))
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        self.0.matvec(x)
    }

    /// `xᵀ M x`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        dot(x, &self.0.matvec(x))
    }

    /// Congruence `Vᵀ M V`.
    pub fn congruence(&self, v: &Matrix) -> SymMatrix {
        let inner = v.transpose().matmul(&self.0).matmul(v);
        SymMatrix::from_matrix(inner).expect("congruence of a square matrix is square")
    }

    /// Frobenius inner product.
    pub fn frobenius_dot(&self, other: &SymMatrix) -> f64 {
        dot(&self.0.data, &other.0.data)
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Eigenvalues in ascending order; column `i` of `vectors` pairs with
/// `values[i]`. Each eigenvector is sign-normalized so that its entry of
/// largest magnitude is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl EigenDecomposition {
    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, i: usize) -> Vec<f64> {
        self.vectors.column(i)
    }

    /// `Q Λ Qᵀ`.
    pub fn reconstruct(&self) -> Matrix {
        let n = self.n();
        let q = &self.vectors;
        Matrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| q[(i, k)] * self.values[k] * q[(j, k)]).sum()
        })
    }
}

/// Cyclic Jacobi eigensolver.
pub fn eig_sym(m: &SymMatrix) -> Result<EigenDecomposition> {
    let n = m.n();
    let mut a = m.as_matrix().clone();
    let mut q = Matrix::identity(n);

    let total: f64 = a.data.iter().map(|x| x * x).sum::<f64>().sqrt();
    let off_norm = |a: &Matrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += 2.0 * a[(i, j)] * a[(i, j)];
            }
        }
        s.sqrt()
    };

    let mut converged = total == 0.0 || n < 2;
    let mut sweeps = 0;
    while !converged {
        if off_norm(&a) <= f64::EPSILON * total {
            converged = true;
            break;
        }
        if sweeps == MAX_JACOBI_SWEEPS {
            break;
        }
        sweeps += 1;
        for p in 0..n {
            for r in (p + 1)..n {
                let apr = a[(p, r)];
                if apr == 0.0 {
                    continue;
                }
                let tau = (a[(r, r)] - a[(p, p)]) / (2.0 * apr);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // A <- Jᵀ A J, with J the (p, r) plane rotation.
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akr = a[(k, r)];
                    a[(k, p)] = c * akp - s * akr;
                    a[(k, r)] = s * akp + c * akr;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let ark = a[(r, k)];
                    a[(p, k)] = c * apk - s * ark;
                    a[(r, k)] = s * apk + c * ark;
                }
                a[(p, r)] = 0.0;
                a[(r, p)] = 0.0;
                for k in 0..n {
                    let qkp = q[(k, p)];
                    let qkr = q[(k, r)];
                    q[(k, p)] = c * qkp - s * qkr;
                    q[(k, r)] = s * qkp + c * qkr;
                }
            }
        }
    }
    if !converged {
        return Err(Error::EigenNotConverged {
            sweeps,
            residual: off_norm(&a),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = Matrix::from_fn(n, n, |i, j| q[(i, order[j])]);
    for j in 0..n {
        let mut pivot = 0;
        for i in 1..n {
            if vectors[(i, j)].abs() > vectors[(pivot, j)].abs() {
                pivot = i;
            }
        }
        if vectors[(pivot, j)] < 0.0 {
            for i in 0..n {
                vectors[(i, j)] = -vectors[(i, j)];
            }
        }
    }
    Ok(EigenDecomposition { values, vectors })
}

/// Eigenvalue sign counts under tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InertiaReport {
    pub n_neg: usize,
    pub n_zero: usize,
    pub n_pos: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Definiteness {
    Zero,
    Psd,
    Nsd,
    Indefinite,
}

impl Definiteness {
    pub fn is_psd(self) -> bool {
        matches!(self, Definiteness::Zero | Definiteness::Psd)
    }

    pub fn is_nsd(self) -> bool {
        matches!(self, Definiteness::Zero | Definiteness::Nsd)
    }
}

/// An eigendecomposition together with the zero threshold used to classify
/// its eigenvalues. Every rank-dependent query in the crate goes through
/// this type so that inertia, pseudoinverse, and range tests agree.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eig: EigenDecomposition,
    pub zero_threshold: f64,
    tol: Tolerances,
}

impl Spectrum {
    pub fn new(m: &SymMatrix, tol: Tolerances) -> Result<Self> {
        let eig = eig_sym(m)?;
        let radius = eig.values.iter().fold(0.0f64, |r, v| r.max(v.abs()));
        let zero_threshold = tol.tol_rel * radius.max(1.0) + tol.tol_abs;
        Ok(Spectrum {
            eig,
            zero_threshold,
            tol,
        })
    }

    pub fn n(&self) -> usize {
        self.eig.n()
    }

    pub fn is_zero(&self, i: usize) -> bool {
        self.eig.values[i].abs() <= self.zero_threshold
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eig.values.iter().fold(0.0, |r, v| r.max(v.abs()))
    }

    pub fn negative(&self) -> Vec<usize> {
        (0..self.n())
            .filter(|&i| !self.is_zero(i) && self.eig.values[i] < 0.0)
            .collect()
    }

    pub fn positive(&self) -> Vec<usize> {
        (0..self.n())
            .filter(|&i| !self.is_zero(i) && self.eig.values[i] > 0.0)
            .collect()
    }

    pub fn kernel(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.is_zero(i)).collect()
    }

    pub fn inertia(&self) -> InertiaReport {
        let n_neg = self.negative().len();
        let n_pos = self.positive().len();
        InertiaReport {
            n_neg,
            n_zero: self.n() - n_neg - n_pos,
            n_pos,
        }
    }

    pub fn definiteness(&self) -> Definiteness {
        let r = self.inertia();
        match (r.n_neg, r.n_pos) {
            (0, 0) => Definiteness::Zero,
            (0, _) => Definiteness::Psd,
            (_, 0) => Definiteness::Nsd,
            _ => Definiteness::Indefinite,
        }
    }

    /// Moore–Penrose pseudoinverse, inverting only the nonzero eigenvalues.
    pub fn pinv(&self) -> SymMatrix {
        let n = self.n();
        let q = &self.eig.vectors;
        let inv: Vec<f64> = (0..n)
            .map(|k| {
                if self.is_zero(k) {
                    0.0
                } else {
                    1.0 / self.eig.values[k]
                }
            })
            .collect();
        let m = Matrix::from_fn(n, n, |i, j| (0..n).map(|k| q[(i, k)] * inv[k] * q[(j, k)]).sum());
        SymMatrix::from_matrix(m).expect("square")
    }

    /// Largest |1/λ| over the nonzero eigenvalues (spectral norm of the
    /// pseudoinverse); zero when the matrix is numerically zero.
    pub fn pinv_norm(&self) -> f64 {
        (0..self.n())
            .filter(|&k| !self.is_zero(k))
            .fold(0.0, |m, k| m.max(1.0 / self.eig.values[k].abs()))
    }

    /// `M M† v`: orthogonal projection of `v` onto the range.
    pub fn project_onto_range(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut out = vec![0.0; n];
        for k in (0..n).filter(|&k| !self.is_zero(k)) {
            let qk = self.eig.vector(k);
            let coef = dot(&qk, v);
            for (o, q) in out.iter_mut().zip(&qk) {
                *o += coef * q;
            }
        }
        out
    }

    /// `‖v − M M† v‖`.
    pub fn range_residual(&self, v: &[f64]) -> f64 {
        let p = self.project_onto_range(v);
        let diff: Vec<f64> = v.iter().zip(&p).map(|(a, b)| a - b).collect();
        norm2(&diff)
    }

    pub fn range_contains(&self, v: &[f64]) -> Result<bool> {
        if v.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: v.len(),
            });
        }
        Ok(self.range_residual(v) <= self.tol.band(norm2(v)))
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tol
    }
}

pub fn inertia(m: &SymMatrix, t: Tolerances) -> Result<InertiaReport> {
    Ok(Spectrum::new(m, t)?.inertia())
}

pub fn pinv_sym(m: &SymMatrix, t: Tolerances) -> Result<SymMatrix> {
    Ok(Spectrum::new(m, t)?.pinv())
}

pub fn range_contains(m: &SymMatrix, v: &[f64], t: Tolerances) -> Result<bool> {
    if v.len() != m.n() {
        return Err(Error::DimensionMismatch {
            expected: m.n(),
            got: v.len(),
        });
    }
    Spectrum::new(m, t)?.range_contains(v)
}

pub fn definiteness(m: &SymMatrix, t: Tolerances) -> Result<Definiteness> {
    Ok(Spectrum::new(m, t)?.definiteness())
}

/// Orthonormal basis of `{x : cᵀx = 0}` as the columns of an n×(n−1)
/// matrix: the trailing columns of the Householder reflector that maps
/// `c/‖c‖` onto a multiple of the first axis.
pub fn nullspace_basis_of_covector(c: &[f64], t: Tolerances) -> Result<Matrix> {
    let n = c.len();
    let norm = norm2(c);
    if n == 0 || norm <= t.tol_abs {
        return Err(Error::ZeroCovector);
    }
    let mut w: Vec<f64> = c.iter().map(|x| x / norm).collect();
    // w = u + sign(u₀) e₀ avoids cancellation.
    w[0] += if w[0] >= 0.0 { 1.0 } else { -1.0 };
    let ww = dot(&w, &w);
    Ok(Matrix::from_fn(n, n - 1, |i, j| {
        let col = j + 1;
        let delta = if i == col { 1.0 } else { 0.0 };
        delta - 2.0 * w[i] * w[col] / ww
    }))
}
