#![allow(dead_code)]

use quadsep::{AffineFunction, Matrix, QuadraticFunction, SymMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn signed(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let m = rng.random_range(lo..hi);
    if rng.random_bool(0.5) {
        m
    } else {
        -m
    }
}

pub fn log_uniform(rng: &mut ChaCha8Rng, lo_exp: f64, hi_exp: f64) -> f64 {
    10f64.powf(rng.random_range(lo_exp..hi_exp))
}

pub fn random_sym(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> SymMatrix {
    let m = Matrix::from_fn(n, n, |_, _| scale * gauss(rng));
    SymMatrix::from_matrix(m).unwrap()
}

pub fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    quadsep::eig_sym(&random_sym(rng, n, 1.0)).unwrap().vectors
}

/// `Q diag(d) Qᵀ` for a random orthogonal `Q`.
pub fn sym_with_spectrum(rng: &mut ChaCha8Rng, d: &[f64]) -> SymMatrix {
    let n = d.len();
    let q = random_orthogonal(rng, n);
    SymMatrix::diag(d).congruence(&q.transpose())
}

/// Well-conditioned invertible matrix with singular values in `[0.5, 2]`.
pub fn random_invertible(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    let q1 = random_orthogonal(rng, n);
    let q2 = random_orthogonal(rng, n);
    let s: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
    let scaled = Matrix::from_fn(n, n, |i, j| q1[(i, j)] * s[j]);
    scaled.matmul(&q2)
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| scale * gauss(rng)).collect()
}

pub fn random_quadratic(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> QuadraticFunction {
    QuadraticFunction::new(
        random_sym(rng, n, scale),
        random_vec(rng, n, scale),
        scale * gauss(rng),
    )
    .unwrap()
}

/// `x ↦ Σ dᵢ (Px + s)ᵢ² + c`.
pub fn pull_back_diag(d: &[f64], c: f64, p: &Matrix, s: &[f64]) -> QuadraticFunction {
    let n = d.len();
    let a = SymMatrix::diag(d).congruence(p);
    let ds: Vec<f64> = (0..n).map(|i| d[i] * s[i]).collect();
    let lin = p.tr_matvec(&ds);
    let c0 = c + (0..n).map(|i| d[i] * s[i] * s[i]).sum::<f64>();
    QuadraticFunction::new(a, lin, c0).unwrap()
}

/// `x ↦ eᵀ(Px + s) + e₀`.
pub fn pull_back_affine(e: &[f64], e0: f64, p: &Matrix, s: &[f64]) -> AffineFunction {
    let c = p.tr_matvec(e);
    let c0 = e0 + e.iter().zip(s).map(|(a, b)| a * b).sum::<f64>();
    AffineFunction::new(c, c0)
}

/// A pair built on the two-sheet hyperboloid `−y₀² + Σ dᵢyᵢ² + 1` with a
/// hyperplane `y₀ = t + Σ cᵢyᵢ`, pulled back by a random affine map.
#[derive(Debug, Clone)]
pub struct HyperboloidCase {
    pub f: QuadraticFunction,
    pub h: AffineFunction,
    pub expect_separated: bool,
}

/// `want` selects a separating or non-separating plane. Parameters stay a
/// fixed distance from the boundary `t² = 1 − |c|²` so borderline margins do
/// not occur.
pub fn hyperboloid_case(rng: &mut ChaCha8Rng, n: usize, want: bool) -> HyperboloidCase {
    let mut d = vec![-1.0];
    let mut active = vec![false];
    for _ in 1..n {
        let on = rng.random_bool(0.8);
        d.push(if on { 1.0 } else { 0.0 });
        active.push(on);
    }
    let n_active = active.iter().filter(|a| **a).count();
    let mut dir: Vec<f64> = (0..n)
        .map(|i| if active[i] { gauss(rng) } else { 0.0 })
        .collect();
    let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        for v in &mut dir {
            *v /= norm;
        }
    }
    let (r, t) = if n_active == 0 {
        let t = if want {
            signed(rng, 0.0, 0.85)
        } else {
            signed(rng, 1.15, 3.0)
        };
        (0.0, t)
    } else if want {
        let r: f64 = rng.random_range(0.0..0.9);
        (r, signed(rng, 0.0, 0.85) * (1.0 - r * r).sqrt())
    } else if rng.random_bool(0.5) {
        let r: f64 = rng.random_range(0.0..0.9);
        (r, signed(rng, 1.15, 2.5) * (1.0 - r * r).sqrt())
    } else {
        (rng.random_range(1.3..3.0), signed(rng, 0.0, 2.0))
    };
    // e·y + e0 = y₀ − t − r·dirᵀy
    let mut e: Vec<f64> = dir.iter().map(|v| -r * v).collect();
    e[0] = 1.0;
    let p = random_invertible(rng, n);
    let s = random_vec(rng, n, 1.0);
    let kappa = signed(rng, 0.2, 5.0);
    let f = pull_back_diag(&d, 1.0, &p, &s).scale(kappa);
    let nu = signed(rng, 0.2, 5.0);
    let h = pull_back_affine(&e, -t, &p, &s);
    let h = AffineFunction::new(h.c.iter().map(|v| nu * v).collect(), nu * h.c0);
    HyperboloidCase {
        f,
        h,
        expect_separated: want,
    }
}

/// `λf + h` as a quadratic.
pub fn lift(f: &QuadraticFunction, lambda: f64, h: &AffineFunction) -> QuadraticFunction {
    let hq = QuadraticFunction::from_affine(h);
    quadsep::linear_combination(lambda, f, 1.0, &hq).unwrap()
}

pub fn quad(d: &[f64], a: &[f64], a0: f64) -> QuadraticFunction {
    QuadraticFunction::new(SymMatrix::diag(d), a.to_vec(), a0).unwrap()
}

pub fn quad_rows(rows: &[Vec<f64>], a: &[f64], a0: f64) -> QuadraticFunction {
    QuadraticFunction::from_parts(rows, a, a0).unwrap()
}

/// Crossing lines: `f = −x² + 4y²`, `g = 2x − y`.
pub fn crossing_lines() -> (QuadraticFunction, QuadraticFunction) {
    (
        quad(&[-1.0, 4.0], &[0.0, 0.0], 0.0),
        quad(&[0.0, 0.0], &[1.0, -0.5], 0.0),
    )
}

/// Hyperbola: `f = −x² + 4y² − 1`, `g = x − 5y`.
pub fn hyperbola() -> (QuadraticFunction, QuadraticFunction) {
    (
        quad(&[-1.0, 4.0], &[0.0, 0.0], -1.0),
        quad(&[0.0, 0.0], &[0.5, -2.5], 0.0),
    )
}

/// `f = x² − 1`, `g = x² − 2x`.
pub fn two_points() -> (QuadraticFunction, QuadraticFunction) {
    (quad(&[1.0], &[0.0], -1.0), quad(&[1.0], &[-1.0], 0.0))
}

/// `f = −x² + y² + 1`, `g = −x² + y² + 2x + 1`.
pub fn mutual_hyperbolas() -> (QuadraticFunction, QuadraticFunction) {
    (
        quad(&[-1.0, 1.0], &[0.0, 0.0], 1.0),
        quad(&[-1.0, 1.0], &[1.0, 0.0], 1.0),
    )
}

pub fn frobenius(m: &Matrix) -> f64 {
    let mut s = 0.0;
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            s += m[(i, j)] * m[(i, j)];
        }
    }
    s.sqrt()
}

/// A random 2D pair for the grid comparison, mixing hyperboloid
/// constructions, multiples `λf + h`, and unrelated generic `g`.
pub fn random_planar_pair(rng: &mut ChaCha8Rng) -> (QuadraticFunction, QuadraticFunction) {
    match rng.random_range(0..5) {
        0 | 1 => {
            let want = rng.random_bool(0.5);
            let case = hyperboloid_case(rng, 2, want);
            let lambda = if rng.random_bool(0.5) {
                0.0
            } else {
                signed(rng, 0.2, 3.0)
            };
            let g = lift(&case.f, lambda, &case.h);
            (case.f, g)
        }
        2 => {
            let f = random_quadratic(rng, 2, 1.0);
            let g = random_quadratic(rng, 2, 1.0);
            (f, g)
        }
        3 => {
            let f = random_quadratic(rng, 2, 1.0);
            let h = AffineFunction::new(random_vec(rng, 2, 1.0), gauss(rng));
            let g = lift(&f, signed(rng, 0.2, 3.0), &h);
            (f, g)
        }
        _ => {
            let want = rng.random_bool(0.5);
            let case = hyperboloid_case(rng, 2, want);
            let g = random_quadratic(rng, 2, 1.0);
            (case.f, g)
        }
    }
}
