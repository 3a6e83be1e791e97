//! Quadratic functions `x ↦ xᵀAx + 2aᵀx + a₀` and their canonical forms.
//!
//! Canonical forms are reached by an invertible affine substitution
//! `y = Sx + s` together with a positive rescaling `μ` of the function, so
//! that `μ·f(x) = canonical(Sx + s)`. The sign of `f` is never flipped; callers
//! that need the `−f` branch canonicalize `f.negate()` explicitly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    dot, max_abs, norm2, nullspace_basis_of_covector, Matrix, Spectrum, SymMatrix, Tolerances,
};

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticFunction {
    matrix: SymMatrix,
    linear: Vec<f64>,
    constant: f64,
}

impl QuadraticFunction {
    pub fn new(matrix: SymMatrix, linear: Vec<f64>, constant: f64) -> Result<Self> {
        if linear.len() != matrix.n() {
            return Err(Error::DimensionMismatch {
                expected: matrix.n(),
                got: linear.len(),
            });
        }
        let finite = matrix.as_matrix().max_abs().is_finite()
            && linear.iter().all(|x| x.is_finite())
            && constant.is_finite();
        if !finite {
            return Err(Error::NonFinite);
        }
        Ok(QuadraticFunction {
            matrix,
            linear,
            constant,
        })
    }

    /// Convenience constructor from row vectors.
    pub fn from_parts(rows: &[Vec<f64>], linear: &[f64], constant: f64) -> Result<Self> {
        QuadraticFunction::new(SymMatrix::from_rows(rows)?, linear.to_vec(), constant)
    }

    /// The affine function `cᵀx + c₀` viewed as a quadratic (`a = c/2`).
    pub fn from_affine(h: &AffineFunction) -> Self {
        let n = h.dim();
        QuadraticFunction {
            matrix: SymMatrix::zeros(n),
            linear: h.c.iter().map(|c| 0.5 * c).collect(),
            constant: h.c0,
        }
    }

    pub fn dim(&self) -> usize {
        self.linear.len()
    }

    /// `A`.
    pub fn matrix(&self) -> &SymMatrix {
        &self.matrix
    }

    /// `a`; the linear term of the function is `2aᵀx`.
    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    /// `a₀`.
    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(self.value(x))
    }

    /// Unchecked evaluation; panics on dimension mismatch.
    pub fn value(&self, x: &[f64]) -> f64 {
        self.matrix.quad_form(x) + 2.0 * dot(&self.linear, x) + self.constant
    }

    /// `∇f(x) = 2(Ax + a)`.
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.matrix
            .matvec(x)
            .iter()
            .zip(&self.linear)
            .map(|(ax, a)| 2.0 * (ax + a))
            .collect()
    }

    /// Largest coefficient magnitude among `A`, `a`, `a₀`.
    pub fn coefficient_scale(&self) -> f64 {
        self.matrix
            .max_abs()
            .max(max_abs(&self.linear))
            .max(self.constant.abs())
    }

    pub fn negate(&self) -> Self {
        self.scale(-1.0)
    }

    pub fn scale(&self, s: f64) -> Self {
        QuadraticFunction {
            matrix: self.matrix.scale(s),
            linear: self.linear.iter().map(|x| s * x).collect(),
            constant: s * self.constant,
        }
    }

    fn zero_band(&self, t: Tolerances) -> f64 {
        t.band(self.coefficient_scale())
    }

    /// Returns the affine function when `A` vanishes under tolerance.
    pub fn is_affine(&self, t: Tolerances) -> Option<AffineFunction> {
        if self.matrix.max_abs() > self.zero_band(t) {
            return None;
        }
        Some(AffineFunction {
            c: self.linear.iter().map(|a| 2.0 * a).collect(),
            c0: self.constant,
        })
    }

    pub fn is_constant(&self, t: Tolerances) -> bool {
        let band = self.zero_band(t);
        self.matrix.max_abs() <= band && norm2(&self.linear) <= band
    }

    /// Threshold separating a critical value from zero.
    pub fn critical_value_band(&self, t: Tolerances) -> f64 {
        t.tol_rel * self.coefficient_scale().max(1.0)
    }

    pub fn spectrum(&self, t: Tolerances) -> Result<Spectrum> {
        Spectrum::new(&self.matrix, t)
    }
}

/// `a₀ − aᵀA†a` when `a ∈ R(A)`: the value of `f` on its stationary set.
pub fn critical_value(q: &QuadraticFunction, t: Tolerances) -> Result<Option<f64>> {
    let spec = q.spectrum(t)?;
    Ok(critical_value_with(q, &spec))
}

pub(crate) fn critical_value_with(q: &QuadraticFunction, spec: &Spectrum) -> Option<f64> {
    if !spec.range_contains(q.linear()).unwrap_or(false) {
        return None;
    }
    let pinv_a = spec.pinv().matvec(q.linear());
    Some(q.constant() - dot(q.linear(), &pinv_a))
}

pub fn evaluate(q: &QuadraticFunction, x: &[f64]) -> Result<f64> {
    q.evaluate(x)
}

/// `(αA + βB, αa + βb, αa₀ + βb₀)`.
pub fn linear_combination(
    alpha: f64,
    f: &QuadraticFunction,
    beta: f64,
    g: &QuadraticFunction,
) -> Result<QuadraticFunction> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: g.dim(),
        });
    }
    QuadraticFunction::new(
        f.matrix.combine(alpha, &g.matrix, beta),
        f.linear
            .iter()
            .zip(&g.linear)
            .map(|(a, b)| alpha * a + beta * b)
            .collect(),
        alpha * f.constant + beta * g.constant,
    )
}

/// Returns `λ` with `B = λA` under tolerance, using the Frobenius projection
/// `λ = ⟨A,B⟩/⟨A,A⟩` and a max-norm residual test.
pub fn multiple_of(b: &SymMatrix, a: &SymMatrix, t: Tolerances) -> Option<f64> {
    if a.n() != b.n() {
        return None;
    }
    let a_max = a.max_abs();
    let b_max = b.max_abs();
    let band = t.tol_rel * 1f64.max(a_max).max(b_max);
    if a_max <= t.tol_abs {
        return (b_max <= band).then_some(0.0);
    }
    let lambda = a.frobenius_dot(b) / a.frobenius_dot(a);
    let residual = b.combine(1.0, a, -lambda).max_abs();
    (residual <= band).then_some(lambda)
}

/// `h(x) = cᵀx + c₀`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineFunction {
    pub c: Vec<f64>,
    pub c0: f64,
}

impl AffineFunction {
    pub fn new(c: Vec<f64>, c0: f64) -> Self {
        AffineFunction { c, c0 }
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        dot(&self.c, x) + self.c0
    }
}

/// Invertible change of variables `y = Sx + s` with function scale `μ > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineChange {
    pub forward: Matrix,
    pub inverse: Matrix,
    pub shift: Vec<f64>,
    pub mu: f64,
}

impl AffineChange {
    /// `y = Sx + s`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.forward
            .matvec(x)
            .iter()
            .zip(&self.shift)
            .map(|(a, b)| a + b)
            .collect()
    }

    /// `x = S⁻¹(y − s)`.
    pub fn pull_back(&self, y: &[f64]) -> Vec<f64> {
        let d: Vec<f64> = y.iter().zip(&self.shift).map(|(a, b)| a - b).collect();
        self.inverse.matvec(&d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FormId {
    /// `−x₁²−⋯−x_k² + δ(x_{k+1}²+⋯+x_m²) + θ`
    F1,
    /// `−x₁²−⋯−x_k² + δ(x_{k+1}²+⋯+x_m²) − 1`
    F2,
    /// `−x₁²−⋯−x_k² + δ(x_{k+1}²+⋯+x_m²) + x_{m+1}`
    F3,
    /// `x₁²+⋯+x_m² + δx_{m+1} + c′`
    F4,
    /// `δx₁ + c′`
    F5,
}

/// One of the five normal forms, in 0-based coordinates: indices `0..k` carry
/// `−1`, `k..m` carry `+1` (F1–F3) and index `m` holds the linear coordinate
/// when there is one. For F4 the squares occupy `0..m`.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalForm {
    pub form: FormId,
    pub k: usize,
    pub m: usize,
    pub delta: u8,
    pub theta: u8,
    pub cprime: f64,
    pub change: AffineChange,
}

impl CanonicalForm {
    pub fn dim(&self) -> usize {
        self.change.shift.len()
    }

    /// Evaluates the canonical expression at canonical coordinates `y`.
    pub fn expression(&self, y: &[f64]) -> f64 {
        let sq = |r: std::ops::Range<usize>| -> f64 { y[r].iter().map(|v| v * v).sum() };
        let delta = f64::from(self.delta);
        match self.form {
            FormId::F1 => -sq(0..self.k) + delta * sq(self.k..self.m) + f64::from(self.theta),
            FormId::F2 => -sq(0..self.k) + delta * sq(self.k..self.m) - 1.0,
            FormId::F3 => -sq(0..self.k) + delta * sq(self.k..self.m) + y[self.m],
            FormId::F4 => {
                let lin = if self.delta == 1 { y[self.m] } else { 0.0 };
                sq(0..self.m) + lin + self.cprime
            }
            FormId::F5 => delta * y[0] + self.cprime,
        }
    }

    /// Number of `+1` squared coefficients.
    pub fn positive_squares(&self) -> usize {
        match self.form {
            FormId::F1 | FormId::F2 | FormId::F3 => self.m - self.k,
            FormId::F4 => self.m,
            FormId::F5 => 0,
        }
    }

    /// Number of `−1` squared coefficients.
    pub fn negative_squares(&self) -> usize {
        match self.form {
            FormId::F1 | FormId::F2 | FormId::F3 => self.k,
            FormId::F4 | FormId::F5 => 0,
        }
    }

    /// Index of the linear coordinate, if the form has one.
    pub fn linear_index(&self) -> Option<usize> {
        match self.form {
            FormId::F3 => Some(self.m),
            FormId::F4 if self.delta == 1 => Some(self.m),
            FormId::F5 => Some(0),
            _ => None,
        }
    }

    /// Constant term of a purely quadratic form.
    pub fn constant_term(&self) -> Option<f64> {
        match self.form {
            FormId::F1 => Some(f64::from(self.theta)),
            FormId::F2 => Some(-1.0),
            FormId::F4 if self.delta == 0 => Some(self.cprime),
            _ => None,
        }
    }
}

/// Reduces a non-constant quadratic to one of the five canonical forms.
pub fn canonical_form(q: &QuadraticFunction, t: Tolerances) -> Result<CanonicalForm> {
    let spec = q.spectrum(t)?;
    canonical_form_with(q, &spec, t)
}

pub(crate) fn canonical_form_with(
    q: &QuadraticFunction,
    spec: &Spectrum,
    t: Tolerances,
) -> Result<CanonicalForm> {
    let n = q.dim();
    let neg = spec.negative();
    let pos = spec.positive();
    let ker = spec.kernel();
    let values = &spec.eig.values;
    let q_mat = &spec.eig.vectors;

    // Coordinates of a along the eigenbasis.
    let b = q_mat.tr_matvec(q.linear());
    let nonzero: Vec<usize> = neg.iter().chain(&pos).copied().collect();
    let v_star = q.constant() - nonzero.iter().map(|&i| b[i] * b[i] / values[i]).sum::<f64>();

    let kernel_linear_vanishes = spec.range_contains(q.linear())?;
    if nonzero.is_empty() && kernel_linear_vanishes {
        return Err(Error::ConstantFunction);
    }

    let k = neg.len();
    let p = pos.len();
    let band = q.critical_value_band(t);

    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut inv_cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut shift: Vec<f64> = Vec::with_capacity(n);

    let (form, mu, theta, cprime) = if kernel_linear_vanishes {
        if k >= 1 {
            if v_star > band {
                (FormId::F1, 1.0 / v_star, 1u8, 0.0)
            } else if v_star < -band {
                (FormId::F2, 1.0 / (-v_star), 0, 0.0)
            } else {
                (FormId::F1, 1.0, 0, 0.0)
            }
        } else {
            let c = if v_star.abs() <= band { 0.0 } else { v_star };
            (FormId::F4, 1.0, 0, c)
        }
    } else if k >= 1 {
        (FormId::F3, 1.0, 0, 0.0)
    } else if p >= 1 {
        (FormId::F4, 1.0, 0, 0.0)
    } else {
        (FormId::F5, 1.0, 0, 0.0)
    };

    for &i in &nonzero {
        let scale = (mu * values[i].abs()).sqrt();
        let qi = q_mat.column(i);
        rows.push(qi.iter().map(|x| scale * x).collect());
        inv_cols.push(qi.iter().map(|x| x / scale).collect());
        shift.push(scale * b[i] / values[i]);
    }

    let m = k + p;
    if kernel_linear_vanishes {
        for &j in &ker {
            let qj = q_mat.column(j);
            rows.push(qj.clone());
            inv_cols.push(qj);
            shift.push(0.0);
        }
    } else {
        // Kernel component of a, expressed in the kernel eigenbasis.
        let b_ker: Vec<f64> = ker.iter().map(|&j| b[j]).collect();
        let a_ker: Vec<f64> = (0..n)
            .map(|r| ker.iter().zip(&b_ker).map(|(&j, bj)| q_mat[(r, j)] * bj).sum())
            .collect();
        let nn = dot(&b_ker, &b_ker);
        rows.push(a_ker.iter().map(|x| 2.0 * mu * x).collect());
        inv_cols.push(a_ker.iter().map(|x| x / (2.0 * mu * nn)).collect());
        shift.push(mu * v_star);
        let complement = nullspace_basis_of_covector(&b_ker, t)?;
        for r in 0..complement.cols() {
            let col: Vec<f64> = (0..n)
                .map(|row| {
                    ker.iter()
                        .enumerate()
                        .map(|(idx, &j)| q_mat[(row, j)] * complement[(idx, r)])
                        .sum()
                })
                .collect();
            rows.push(col.clone());
            inv_cols.push(col);
            shift.push(0.0);
        }
    }

    let forward = Matrix::from_rows(&rows, n)?;
    let inverse = Matrix::from_columns(n, &inv_cols);
    let change = AffineChange {
        forward,
        inverse,
        shift,
        mu,
    };

    let (m_out, delta) = match form {
        FormId::F1 | FormId::F2 | FormId::F3 => (m, u8::from(p > 0)),
        FormId::F4 => (p, u8::from(!kernel_linear_vanishes)),
        FormId::F5 => (0, 1),
    };

    Ok(CanonicalForm {
        form,
        k,
        m: m_out,
        delta,
        theta,
        cprime,
        change,
    })
}
