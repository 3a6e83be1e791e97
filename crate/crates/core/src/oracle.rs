//! Definition-level checks that do not go through the separation criterion.
//!
//! Two independent routes are provided. The grid route evaluates `f` on a
//! lattice in the plane, marks cells whose corners change sign, and counts
//! components by flood fill. The sampling route draws points on `{f=0}` from
//! its canonical parameterization and reads off the sign of `g` on each
//! sheet. Neither consults the multiplier `λ`, the reduction, or the margin.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::connectivity::{components_level, Tag};
use crate::error::{Error, Result};
use crate::linalg::{eig_sym, norm2, Tolerances};
use crate::quadratic::{canonical_form, CanonicalForm, FormId, QuadraticFunction};

pub const DEFAULT_RESOLUTION: usize = 512;
pub const DEFAULT_HALF_WIDTH: f64 = 8.0;

/// Axis-aligned window and lattice resolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub center: [f64; 2],
    pub half_widths: [f64; 2],
    pub resolution: usize,
}

impl GridSpec {
    pub fn new(center: [f64; 2], half_widths: [f64; 2], resolution: usize) -> Result<Self> {
        if resolution < 16 {
            return Err(Error::InvalidGrid(format!("resolution {resolution} < 16")));
        }
        if !half_widths.iter().all(|h| h.is_finite() && *h > 0.0) {
            return Err(Error::InvalidGrid(format!("half-widths {half_widths:?} must be positive")));
        }
        if !center.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidGrid("non-finite center".into()));
        }
        Ok(GridSpec {
            center,
            half_widths,
            resolution,
        })
    }

    pub fn square(center: [f64; 2], half_width: f64, resolution: usize) -> Result<Self> {
        GridSpec::new(center, [half_width, half_width], resolution)
    }

    /// Window centered at the canonical origin of `f`, covering the pullback
    /// of the canonical box of the given half-width. For ellipsoid-type forms
    /// the box is enlarged when needed so the level set fits inside.
    pub fn around(
        f: &QuadraticFunction,
        half_width: f64,
        resolution: usize,
        t: Tolerances,
    ) -> Result<Self> {
        if f.dim() != 2 {
            return Err(Error::GridDimension(f.dim()));
        }
        let cf = canonical_form(f, t)?;
        let stretch = match cf.form {
            FormId::F4 if cf.delta == 0 => (1.25 * cf.cprime.abs().sqrt() / half_width).max(1.0),
            _ => 1.0,
        };
        let center = cf.change.pull_back(&[0.0, 0.0]);
        let inv = &cf.change.inverse;
        let hw = |i: usize| half_width * stretch * (inv[(i, 0)].abs() + inv[(i, 1)].abs());
        GridSpec::new([center[0], center[1]], [hw(0), hw(1)], resolution)
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        GridSpec::new(
            self.center,
            [self.half_widths[0] * factor, self.half_widths[1] * factor],
            self.resolution,
        )
    }

    fn cell_size(&self) -> [f64; 2] {
        let r = self.resolution as f64;
        [2.0 * self.half_widths[0] / r, 2.0 * self.half_widths[1] / r]
    }

    fn vertex(&self, i: usize, j: usize) -> [f64; 2] {
        let [dx, dy] = self.cell_size();
        [
            self.center[0] - self.half_widths[0] + i as f64 * dx,
            self.center[1] - self.half_widths[1] + j as f64 * dy,
        ]
    }

    /// Center of cell `(i, j)`.
    pub fn cell_center(&self, i: usize, j: usize) -> [f64; 2] {
        let [dx, dy] = self.cell_size();
        let v = self.vertex(i, j);
        [v[0] + 0.5 * dx, v[1] + 0.5 * dy]
    }

    fn half_diagonal(&self) -> f64 {
        let [dx, dy] = self.cell_size();
        0.5 * (dx * dx + dy * dy).sqrt()
    }
}

/// A lattice cell crossed by the zero set, with its flood-fill label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZeroCell {
    pub i: usize,
    pub j: usize,
    pub component: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridComponents {
    pub spec: GridSpec,
    pub count: usize,
    pub cells: Vec<ZeroCell>,
    /// Some zero cell lies on the window boundary.
    pub touches_boundary: bool,
    /// Every zero cell passes the local gradient test, so no two distinct
    /// pieces of the curve can share an 8-neighbourhood.
    pub resolved: bool,
    /// The count is unchanged on the doubled window.
    pub stable: bool,
    pub confident: bool,
}

fn spectral_norm_2x2(f: &QuadraticFunction) -> f64 {
    let m = f.matrix();
    let (a, b, d) = (m.get(0, 0), m.get(0, 1), m.get(1, 1));
    let mean = 0.5 * (a + d);
    let rad = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    (mean.abs() + rad).max((mean - rad).abs())
}

/// Values of `f` at the lattice vertices.
struct Lattice<'a> {
    f: &'a QuadraticFunction,
    spec: GridSpec,
    values: Vec<f64>,
}

impl<'a> Lattice<'a> {
    fn new(f: &'a QuadraticFunction, spec: &GridSpec) -> Self {
        let nv = spec.resolution + 1;
        let mut values = Vec::with_capacity(nv * nv);
        for i in 0..nv {
            for j in 0..nv {
                values.push(f.value(&spec.vertex(i, j)));
            }
        }
        Lattice {
            f,
            spec: *spec,
            values,
        }
    }

    fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * (self.spec.resolution + 1) + j]
    }

    fn corners(&self, i: usize, j: usize) -> [(usize, usize); 4] {
        [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)]
    }

    fn is_zero_cell(&self, i: usize, j: usize) -> bool {
        let v = self.corners(i, j).map(|(a, b)| self.value(a, b));
        v.contains(&0.0) || v.iter().any(|x| (*x > 0.0) != (v[0] > 0.0))
    }

    /// Points of `{f = 0}` on the boundary of cell `(i, j)`: zero vertices
    /// and bisected sign changes along the edges.
    fn crossings(&self, i: usize, j: usize) -> Vec<[f64; 2]> {
        let c = self.corners(i, j);
        let mut out = Vec::new();
        for e in 0..4 {
            let (p, q) = (c[e], c[(e + 1) % 4]);
            let (fp, fq) = (self.value(p.0, p.1), self.value(q.0, q.1));
            let (xp, xq) = (self.spec.vertex(p.0, p.1), self.spec.vertex(q.0, q.1));
            if fp == 0.0 {
                out.push(xp);
            } else if fq != 0.0 && (fp > 0.0) != (fq > 0.0) {
                out.push(bisect(self.f, xp, xq, fp));
            }
        }
        out
    }
}

fn bisect(f: &QuadraticFunction, mut lo: [f64; 2], mut hi: [f64; 2], f_lo: f64) -> [f64; 2] {
    let lo_positive = f_lo > 0.0;
    for _ in 0..60 {
        let mid = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])];
        let v = f.value(&mid);
        if v == 0.0 {
            return mid;
        }
        if (v > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])]
}

struct Labelling {
    count: usize,
    cells: Vec<ZeroCell>,
    touches_boundary: bool,
    resolved: bool,
}

fn label_zero_cells(lattice: &Lattice) -> Labelling {
    let f = lattice.f;
    let spec = &lattice.spec;
    let res = spec.resolution;
    let mut zero = vec![false; res * res];
    for i in 0..res {
        for j in 0..res {
            zero[i * res + j] = lattice.is_zero_cell(i, j);
        }
    }

    let reach = 3.0 * spec.half_diagonal();
    let curvature = 2.0 * spectral_norm_2x2(f) * reach;
    let mut label = vec![usize::MAX; res * res];
    let mut resolved = true;
    let mut touches_boundary = false;
    let mut cells = Vec::new();
    let mut count = 0;
    let mut queue = VecDeque::new();
    for i0 in 0..res {
        for j0 in 0..res {
            if !zero[i0 * res + j0] || label[i0 * res + j0] != usize::MAX {
                continue;
            }
            label[i0 * res + j0] = count;
            queue.push_back((i0, j0));
            while let Some((i, j)) = queue.pop_front() {
                cells.push(ZeroCell {
                    i,
                    j,
                    component: count,
                });
                if i == 0 || j == 0 || i + 1 == res || j + 1 == res {
                    touches_boundary = true;
                }
                let c = spec.cell_center(i, j);
                if norm2(&f.gradient(&c)) <= curvature {
                    resolved = false;
                }
                for di in -1i64..=1 {
                    for dj in -1i64..=1 {
                        let (ni, nj) = (i as i64 + di, j as i64 + dj);
                        if ni < 0 || nj < 0 || ni >= res as i64 || nj >= res as i64 {
                            continue;
                        }
                        let idx = ni as usize * res + nj as usize;
                        if zero[idx] && label[idx] == usize::MAX {
                            label[idx] = count;
                            queue.push_back((ni as usize, nj as usize));
                        }
                    }
                }
            }
            count += 1;
        }
    }
    Labelling {
        count,
        cells,
        touches_boundary,
        resolved,
    }
}

fn analyse<'a>(f: &'a QuadraticFunction, spec: &GridSpec) -> Result<(Lattice<'a>, GridComponents)> {
    if f.dim() != 2 {
        return Err(Error::GridDimension(f.dim()));
    }
    let lattice = Lattice::new(f, spec);
    let base = label_zero_cells(&lattice);
    let doubled = label_zero_cells(&Lattice::new(f, &spec.scaled(2.0)?));
    let stable = doubled.count == base.count;
    let comps = GridComponents {
        spec: *spec,
        count: base.count,
        touches_boundary: base.touches_boundary,
        resolved: base.resolved,
        stable,
        confident: base.resolved && stable,
        cells: base.cells,
    };
    Ok((lattice, comps))
}

/// Approximate component count of `{f = 0}` in the plane.
pub fn grid_components_2d(f: &QuadraticFunction, spec: &GridSpec) -> Result<GridComponents> {
    analyse(f, spec).map(|(_, comps)| comps)
}

/// Sign of `g` observed on one component of `{f = 0}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ComponentSign {
    Positive,
    Negative,
    /// Both signs were observed with certainty.
    Mixed,
    /// Some observations were too close to zero to be trusted.
    Uncertain,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub component_count_estimate: usize,
    pub confident: bool,
    pub touches_boundary: bool,
    pub sign_pattern: Vec<ComponentSign>,
    pub min_abs_g_on_zero_set: Option<f64>,
    /// Definition-level verdict: two components on which `g` has strictly
    /// opposite signs.
    pub separated: bool,
}

#[derive(Default, Clone, Copy)]
struct SignTally {
    pos: bool,
    neg: bool,
    uncertain: bool,
}

impl SignTally {
    fn pattern(self) -> ComponentSign {
        match (self.pos, self.neg, self.uncertain) {
            (true, true, _) => ComponentSign::Mixed,
            (_, _, true) => ComponentSign::Uncertain,
            (true, false, false) => ComponentSign::Positive,
            (false, true, false) => ComponentSign::Negative,
            (false, false, false) => ComponentSign::Uncertain,
        }
    }
}

/// Decides separation from per-component tallies. Returns
/// `(separated, confident)`.
fn decide(tallies: &[SignTally]) -> (bool, bool) {
    if tallies.len() != 2 {
        return (false, true);
    }
    if tallies.iter().any(|t| t.pos && t.neg) {
        return (false, true);
    }
    let (a, b) = (tallies[0], tallies[1]);
    let certain_a = a.pos || a.neg;
    let certain_b = b.pos || b.neg;
    if !certain_a || !certain_b {
        return (false, false);
    }
    if a.pos == b.pos {
        // Same certified sign on both components.
        return (false, true);
    }
    if a.uncertain || b.uncertain {
        return (false, false);
    }
    (true, true)
}

/// Directions along which unbounded pieces of `{f = 0}` escape: the two
/// asymptotes of a hyperbola, or the kernel direction of a parabola or a
/// pair of parallel lines. Both orientations are listed.
fn escape_directions(f: &QuadraticFunction) -> Vec<[f64; 2]> {
    let Ok(eig) = eig_sym(f.matrix()) else {
        return Vec::new();
    };
    let (l0, l1) = (eig.values[0], eig.values[1]);
    let (e0, e1) = (eig.vector(0), eig.vector(1));
    let zero = 1e-9 * spectral_norm_2x2(f).max(1.0);
    let mut dirs = Vec::new();
    if l0 < -zero && l1 > zero {
        let (s0, s1) = (l1.sqrt(), (-l0).sqrt());
        for sign in [1.0, -1.0] {
            let v = [s0 * e0[0] + sign * s1 * e1[0], s0 * e0[1] + sign * s1 * e1[1]];
            let n = norm2(&v);
            dirs.push([v[0] / n, v[1] / n]);
        }
    } else if l0.abs() <= zero && l1.abs() > zero {
        dirs.push([e0[0], e0[1]]);
    } else if l1.abs() <= zero && l0.abs() > zero {
        dirs.push([e1[0], e1[1]]);
    }
    let negated: Vec<[f64; 2]> = dirs.iter().map(|d| [-d[0], -d[1]]).collect();
    dirs.extend(negated);
    dirs
}

/// Grid check of whether `{g = 0}` separates `{f = 0}` in the plane.
///
/// `g` is evaluated at points of `{f = 0}` on cell edges. A cell's piece of
/// the curve is certified sign-constant when those values agree in sign and
/// exceed a bound on how far `g` can dip along an arc of the cell's length.
/// Pieces that leave the window also contribute the sign of `g` at infinity
/// along the escape direction, when the quadratic part of `g` decides it.
pub fn grid_separation_2d(
    g: &QuadraticFunction,
    f: &QuadraticFunction,
    spec: &GridSpec,
) -> Result<(OracleReport, GridComponents)> {
    if g.dim() != 2 {
        return Err(Error::GridDimension(g.dim()));
    }
    let (lattice, comps) = analyse(f, spec)?;
    let d = spec.half_diagonal();
    let arc = 2.5 * d;
    let a_norm = spectral_norm_2x2(f);
    let b_norm = spectral_norm_2x2(g);
    let g_scale = g.coefficient_scale().max(1.0);
    let res = spec.resolution;
    let escapes = escape_directions(f);
    let end_threshold = 1e-9 * b_norm.max(1.0);

    let mut tallies = vec![SignTally::default(); comps.count];
    let mut min_abs: Option<f64> = None;
    for cell in &comps.cells {
        let tally = &mut tallies[cell.component];
        let points = lattice.crossings(cell.i, cell.j);
        let c = spec.cell_center(cell.i, cell.j);
        let f_grad = norm2(&f.gradient(&c)) - 2.0 * a_norm * d;
        let g_grad = norm2(&g.gradient(&c)) + 2.0 * b_norm * d;
        let dip = if f_grad > 0.0 {
            (2.0 * b_norm + g_grad * 2.0 * a_norm / f_grad) * arc * arc / 8.0
        } else {
            f64::INFINITY
        };
        let (mut pos, mut neg, mut unsure) = (false, false, points.is_empty());
        let mut cell_min = f64::INFINITY;
        for p in &points {
            let gv = g.value(p);
            cell_min = cell_min.min(gv.abs());
            min_abs = Some(min_abs.map_or(gv.abs(), |m: f64| m.min(gv.abs())));
            let noise = 1e-12 * g_scale * (1.0 + p[0] * p[0] + p[1] * p[1]);
            if gv > noise {
                pos = true;
            } else if gv < -noise {
                neg = true;
            } else {
                unsure = true;
            }
        }
        tally.pos |= pos;
        tally.neg |= neg;
        if unsure || (pos && neg) || cell_min <= dip {
            tally.uncertain = true;
        }

        let on_edge = cell.i == 0 || cell.j == 0 || cell.i + 1 == res || cell.j + 1 == res;
        if on_edge && !escapes.is_empty() {
            let u = [c[0] - spec.center[0], c[1] - spec.center[1]];
            let v = escapes
                .iter()
                .max_by(|a, b| {
                    let da = a[0] * u[0] + a[1] * u[1];
                    let db = b[0] * u[0] + b[1] * u[1];
                    da.total_cmp(&db)
                })
                .expect("nonempty");
            let q = g.matrix().quad_form(v);
            if q > end_threshold {
                tally.pos = true;
            } else if q < -end_threshold {
                tally.neg = true;
            }
        }
    }
    let (separated, sign_confident) = decide(&tallies);
    let report = OracleReport {
        component_count_estimate: comps.count,
        confident: comps.confident && sign_confident,
        touches_boundary: comps.touches_boundary,
        sign_pattern: tallies.iter().map(|t| t.pattern()).collect(),
        min_abs_g_on_zero_set: min_abs,
        separated,
    };
    Ok((report, comps))
}

/// A point on `{f = 0}` and the sheet it was drawn from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSample {
    pub point: Vec<f64>,
    pub sheet: Tag,
}

const MAX_REJECTIONS: usize = 10_000;

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn sum_sq(y: &[f64]) -> f64 {
    y.iter().map(|v| v * v).sum()
}

/// Draws canonical coordinates on the zero set of `cf`. When `sheet` is
/// given the first coordinate is forced to that sign.
fn sample_canonical(cf: &CanonicalForm, rng: &mut ChaCha8Rng, sheet: Option<f64>) -> Result<Vec<f64>> {
    let n = cf.dim();
    let (k, m) = (cf.k, cf.m);
    let delta = f64::from(cf.delta);
    for _ in 0..MAX_REJECTIONS {
        let mut y: Vec<f64> = (0..n).map(|_| gaussian(rng)).collect();
        match cf.form {
            FormId::F3 => {
                y[m] = sum_sq(&y[0..k]) - delta * sum_sq(&y[k..m]);
                return Ok(y);
            }
            FormId::F4 if cf.delta == 1 => {
                y[m] = -sum_sq(&y[0..m]) - cf.cprime;
                return Ok(y);
            }
            FormId::F5 => {
                y[0] = -cf.cprime;
                return Ok(y);
            }
            _ => {}
        }
        let kappa = cf.constant_term().expect("purely quadratic form");
        let (neg, pos) = match cf.form {
            FormId::F4 => (0..0, 0..m),
            _ if cf.delta == 1 => (0..k, k..m),
            _ => (0..k, k..k),
        };
        if pos.is_empty() || neg.is_empty() {
            // Sphere: Σ y² = r² over the squared block.
            let (block, r2) = if pos.is_empty() {
                (neg, kappa)
            } else {
                (pos, -kappa)
            };
            if r2 < 0.0 || block.is_empty() {
                return Err(Error::EmptyLevelSet);
            }
            let norm = sum_sq(&y[block.clone()]).sqrt();
            if norm == 0.0 {
                continue;
            }
            let scale = r2.sqrt() / norm;
            for v in &mut y[block.clone()] {
                *v *= scale;
            }
            if let Some(s) = sheet {
                y[0] = s * y[0].abs();
            }
            return Ok(y);
        }
        // Mixed signs: −Σneg + Σpos + κ = 0, solved for y₀ or for y_k.
        let first = neg.start;
        let r0 = kappa - sum_sq(&y[first + 1..neg.end]) + sum_sq(&y[pos.clone()]);
        if r0 >= 0.0 {
            let s = sheet.unwrap_or(if y[first] < 0.0 { -1.0 } else { 1.0 });
            y[first] = s * r0.sqrt();
            return Ok(y);
        }
        if sheet.is_some() {
            continue;
        }
        let j = pos.start;
        let rk = -kappa + sum_sq(&y[neg.clone()]) - sum_sq(&y[j + 1..pos.end]);
        if rk >= 0.0 {
            y[j] = y[j].signum() * rk.sqrt();
            return Ok(y);
        }
    }
    Err(Error::Inconsistency("level-set sampler exhausted its rejection budget".into()))
}

/// Newton steps along the gradient; only improvements are kept.
fn polish(f: &QuadraticFunction, x: &mut Vec<f64>) {
    for _ in 0..3 {
        let v = f.value(x);
        if v == 0.0 {
            return;
        }
        let grad = f.gradient(x);
        let gg: f64 = grad.iter().map(|g| g * g).sum();
        if gg == 0.0 {
            return;
        }
        let cand: Vec<f64> = x.iter().zip(&grad).map(|(xi, gi)| xi - v * gi / gg).collect();
        if f.value(&cand).abs() < v.abs() {
            *x = cand;
        } else {
            return;
        }
    }
}

/// Points on `{f = 0}`, deterministic given `seed`. When the level set has
/// two components the samples alternate between them.
pub fn sample_level_set(
    f: &QuadraticFunction,
    count: usize,
    seed: u64,
    t: Tolerances,
) -> Result<Vec<LevelSample>> {
    let report = components_level(f, t)?;
    if report.count == 0 {
        return Err(Error::EmptyLevelSet);
    }
    let cf = report.basis.expect("nonempty level set has a canonical basis");
    let two = report.count == 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let (sheet, sign) = match (two, i % 2) {
            (true, 0) => (Tag::Minus, Some(-1.0)),
            (true, _) => (Tag::Plus, Some(1.0)),
            (false, _) => (Tag::Single, None),
        };
        let y = sample_canonical(&cf, &mut rng, sign)?;
        let mut x = cf.change.pull_back(&y);
        polish(f, &mut x);
        out.push(LevelSample { point: x, sheet });
    }
    Ok(out)
}

/// Sign threshold below which a sampled `g` value is not trusted.
pub fn sign_margin(g: &QuadraticFunction, t: Tolerances) -> f64 {
    t.tol_rel * g.coefficient_scale().max(1.0)
}

/// Sampling check of whether `{g = 0}` separates `{f = 0}`: uniform and
/// opposite signs of `g` on the two sheets.
pub fn oracle_separates(
    g: &QuadraticFunction,
    f: &QuadraticFunction,
    count: usize,
    seed: u64,
    t: Tolerances,
) -> Result<OracleReport> {
    if g.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: g.dim(),
        });
    }
    let samples = sample_level_set(f, count, seed, t)?;
    let two = samples.iter().any(|s| s.sheet != Tag::Single);
    let sheets = if two { 2 } else { 1 };
    let threshold = sign_margin(g, t);
    let mut tallies = vec![SignTally::default(); sheets];
    let mut min_abs: Option<f64> = None;
    for s in &samples {
        let gv = g.value(&s.point);
        min_abs = Some(min_abs.map_or(gv.abs(), |m: f64| m.min(gv.abs())));
        let idx = usize::from(s.sheet == Tag::Plus);
        let tally = &mut tallies[idx];
        if gv.abs() <= threshold {
            tally.uncertain = true;
        } else if gv > 0.0 {
            tally.pos = true;
        } else {
            tally.neg = true;
        }
    }
    let (separated, _) = decide(&tallies);
    Ok(OracleReport {
        component_count_estimate: sheets,
        confident: true,
        touches_boundary: false,
        sign_pattern: tallies.iter().map(|t| t.pattern()).collect(),
        min_abs_g_on_zero_set: min_abs,
        separated,
    })
}
