//! Connected components of `{f<0}`, `{f≤0}` and `{f=0}`.
//!
//! Each set has zero, one, or two components. Two components only occur for
//! the hyperboloid-type form `−x₁² + δ(x₂²+⋯+x_m²) + 1` (for `f` itself, or for
//! `−f` when looking at the level set), and the components are then split by
//! the sign of the first canonical coordinate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadratic::{
    canonical_form_with, critical_value_with, AffineChange, CanonicalForm, FormId,
    QuadraticFunction,
};
use crate::linalg::{Spectrum, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Target {
    StrictSublevel,
    Sublevel,
    Level,
}

impl Target {
    pub fn holds(self, value: f64, tol: f64) -> bool {
        match self {
            Target::StrictSublevel => value < 0.0,
            Target::Sublevel => value <= tol,
            Target::Level => value.abs() <= tol,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Tag {
    Minus,
    Plus,
    /// The set is connected; the point is not tied to a side.
    Single,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub tag: Tag,
    pub point: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentReport {
    pub target: Target,
    pub count: usize,
    pub witnesses: Vec<Witness>,
    /// Canonical form whose coordinates the witnesses were taken in. For a
    /// disconnected level set this is the hyperboloid form of `f` or `−f`.
    pub basis: Option<CanonicalForm>,
    /// True when `basis` is the canonical form of `−f`.
    pub negated: bool,
}

impl ComponentReport {
    pub fn change(&self) -> Option<&AffineChange> {
        self.basis.as_ref().map(|b| &b.change)
    }

    fn empty(target: Target, basis: CanonicalForm) -> Self {
        ComponentReport {
            target,
            count: 0,
            witnesses: Vec::new(),
            basis: Some(basis),
            negated: false,
        }
    }
}

fn axis_point(n: usize, idx: usize, value: f64) -> Vec<f64> {
    let mut y = vec![0.0; n];
    y[idx] = value;
    y
}

fn pair(cf: &CanonicalForm, magnitude: f64) -> Vec<Witness> {
    let n = cf.dim();
    vec![
        Witness {
            tag: Tag::Minus,
            point: cf.change.pull_back(&axis_point(n, 0, -magnitude)),
        },
        Witness {
            tag: Tag::Plus,
            point: cf.change.pull_back(&axis_point(n, 0, magnitude)),
        },
    ]
}

fn single(cf: &CanonicalForm, y: Vec<f64>) -> Vec<Witness> {
    vec![Witness {
        tag: Tag::Single,
        point: cf.change.pull_back(&y),
    }]
}

/// A canonical point where the form is strictly negative.
fn negative_point(cf: &CanonicalForm) -> Vec<f64> {
    let n = cf.dim();
    match cf.form {
        FormId::F1 => axis_point(n, 0, 2.0),
        FormId::F2 => vec![0.0; n],
        FormId::F3 => axis_point(n, cf.m, -1.0),
        FormId::F4 if cf.delta == 1 => axis_point(n, cf.m, -1.0),
        FormId::F4 => vec![0.0; n],
        FormId::F5 => axis_point(n, 0, -1.0 - cf.cprime),
    }
}

/// A canonical point on the zero set, assuming it is nonempty.
fn zero_point(cf: &CanonicalForm) -> Vec<f64> {
    let n = cf.dim();
    match cf.form {
        FormId::F1 if cf.theta == 1 => axis_point(n, 0, 1.0),
        FormId::F1 | FormId::F3 => vec![0.0; n],
        FormId::F2 => axis_point(n, cf.k, 1.0),
        FormId::F4 if cf.delta == 1 => vec![0.0; n],
        FormId::F4 => {
            if cf.m >= 1 && cf.cprime < 0.0 {
                axis_point(n, 0, (-cf.cprime).sqrt())
            } else {
                vec![0.0; n]
            }
        }
        FormId::F5 => axis_point(n, 0, -cf.cprime),
    }
}

fn prepare(f: &QuadraticFunction, t: Tolerances) -> Result<(Spectrum, CanonicalForm)> {
    if f.is_constant(t) {
        return Err(Error::ConstantFunction);
    }
    let spec = f.spectrum(t)?;
    let cf = canonical_form_with(f, &spec, t)?;
    Ok((spec, cf))
}

/// Components of `{f < 0}`.
pub fn components_strict_sublevel(f: &QuadraticFunction, t: Tolerances) -> Result<ComponentReport> {
    let (_, cf) = prepare(f, t)?;
    let target = Target::StrictSublevel;
    if cf.form == FormId::F4 && cf.delta == 0 && cf.cprime >= 0.0 {
        return Ok(ComponentReport::empty(target, cf));
    }
    let (count, witnesses) = if cf.form == FormId::F1 && cf.k == 1 {
        (2, pair(&cf, 2.0))
    } else {
        (1, single(&cf, negative_point(&cf)))
    };
    Ok(ComponentReport {
        target,
        count,
        witnesses,
        basis: Some(cf),
        negated: false,
    })
}

/// Components of `{f ≤ 0}`.
pub fn components_sublevel(f: &QuadraticFunction, t: Tolerances) -> Result<ComponentReport> {
    let (_, cf) = prepare(f, t)?;
    let target = Target::Sublevel;
    if cf.form == FormId::F4 && cf.delta == 0 && cf.cprime > 0.0 {
        return Ok(ComponentReport::empty(target, cf));
    }
    let (count, witnesses) = if cf.form == FormId::F1 && cf.k == 1 && cf.theta == 1 {
        (2, pair(&cf, 2.0))
    } else if cf.form == FormId::F4 && cf.delta == 0 && cf.cprime == 0.0 {
        (1, single(&cf, vec![0.0; cf.dim()]))
    } else {
        (1, single(&cf, negative_point(&cf)))
    };
    Ok(ComponentReport {
        target,
        count,
        witnesses,
        basis: Some(cf),
        negated: false,
    })
}

/// Which of `f`, `−f` has the hyperboloid form when `{f = 0}` is disconnected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Disconnection {
    Own,
    Negated,
}

/// Inertia/critical-value test for a disconnected level set: `a ∈ R(A)` and
/// either one negative eigenvalue with positive critical value, or one
/// positive eigenvalue with negative critical value.
pub(crate) fn level_disconnection(
    f: &QuadraticFunction,
    spec: &Spectrum,
    t: Tolerances,
) -> Option<Disconnection> {
    let v = critical_value_with(f, spec)?;
    let band = f.critical_value_band(t);
    let inertia = spec.inertia();
    if inertia.n_neg == 1 && v > band {
        Some(Disconnection::Own)
    } else if inertia.n_pos == 1 && v < -band {
        Some(Disconnection::Negated)
    } else {
        None
    }
}

/// Components of `{f = 0}`.
pub fn components_level(f: &QuadraticFunction, t: Tolerances) -> Result<ComponentReport> {
    let (spec, cf) = prepare(f, t)?;
    let target = Target::Level;
    if let Some(which) = level_disconnection(f, &spec, t) {
        let (basis, negated) = match which {
            Disconnection::Own => (cf, false),
            Disconnection::Negated => {
                let g = f.negate();
                let gspec = g.spectrum(t)?;
                (canonical_form_with(&g, &gspec, t)?, true)
            }
        };
        if !(basis.form == FormId::F1 && basis.k == 1 && basis.theta == 1) {
            return Err(Error::Inconsistency(format!(
                "disconnected level set without hyperboloid form: {:?}",
                basis.form
            )));
        }
        return Ok(ComponentReport {
            target,
            count: 2,
            witnesses: pair(&basis, 1.0),
            basis: Some(basis),
            negated,
        });
    }
    let empty = match cf.form {
        FormId::F2 => cf.delta == 0,
        FormId::F4 => cf.delta == 0 && cf.cprime > 0.0,
        _ => false,
    };
    if empty {
        return Ok(ComponentReport::empty(target, cf));
    }
    let witnesses = single(&cf, zero_point(&cf));
    Ok(ComponentReport {
        target,
        count: 1,
        witnesses,
        basis: Some(cf),
        negated: false,
    })
}

pub fn components(f: &QuadraticFunction, target: Target, t: Tolerances) -> Result<ComponentReport> {
    match target {
        Target::StrictSublevel => components_strict_sublevel(f, t),
        Target::Sublevel => components_sublevel(f, t),
        Target::Level => components_level(f, t),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SymMatrix;

    fn t() -> Tolerances {
        Tolerances::default()
    }

    fn quad(d: &[f64], a: &[f64], a0: f64) -> QuadraticFunction {
        QuadraticFunction::new(SymMatrix::diag(d), a.to_vec(), a0).unwrap()
    }

    fn assert_witnesses(f: &QuadraticFunction, r: &ComponentReport) {
        let tol = 1e-12 * f.coefficient_scale().max(1.0);
        for w in &r.witnesses {
            assert!(r.target.holds(f.value(&w.point), tol), "{w:?}");
        }
        if r.count == 2 {
            assert_eq!(r.witnesses[0].tag, Tag::Minus);
            assert_eq!(r.witnesses[1].tag, Tag::Plus);
        }
        assert_eq!(r.count == 0, r.witnesses.is_empty());
    }

    #[test]
    fn strict_sublevel_examples() {
        let cone = quad(&[-1.0, 4.0], &[0.0, 0.0], 0.0);
        let r = components_strict_sublevel(&cone, t()).unwrap();
        assert_eq!(r.count, 2);
        assert_witnesses(&cone, &r);

        let disk = quad(&[1.0, 1.0], &[0.0, 0.0], -1.0);
        let r = components_strict_sublevel(&disk, t()).unwrap();
        assert_eq!(r.count, 1);
        assert_witnesses(&disk, &r);

        let empty = quad(&[1.0], &[0.0], 1.0);
        assert_eq!(components_strict_sublevel(&empty, t()).unwrap().count, 0);

        let square = quad(&[1.0], &[0.0], 0.0);
        assert_eq!(components_strict_sublevel(&square, t()).unwrap().count, 0);
        assert_eq!(components_sublevel(&square, t()).unwrap().count, 1);
    }

    #[test]
    fn sublevel_examples() {
        let f = quad(&[-1.0, 4.0], &[0.0, 0.0], -1.0);
        let r = components_sublevel(&f, t()).unwrap();
        assert_eq!(r.count, 1);
        assert_witnesses(&f, &r);

        let f = quad(&[-1.0], &[0.0], 1.0);
        let r = components_sublevel(&f, t()).unwrap();
        assert_eq!(r.count, 2);
        assert_witnesses(&f, &r);

        let f = quad(&[1.0], &[0.0], -1.0);
        assert_eq!(components_sublevel(&f, t()).unwrap().count, 1);
    }

    #[test]
    fn level_examples() {
        let f = quad(&[-1.0, 4.0], &[0.0, 0.0], -1.0);
        let r = components_level(&f, t()).unwrap();
        assert_eq!(r.count, 2);
        assert!(r.negated);
        assert_witnesses(&f, &r);
        let mut ys: Vec<f64> = r.witnesses.iter().map(|w| w.point[1]).collect();
        ys.sort_by(f64::total_cmp);
        assert!((ys[0] + 0.5).abs() < 1e-15 && (ys[1] - 0.5).abs() < 1e-15);
        assert!(r.witnesses.iter().all(|w| w.point[0].abs() < 1e-15));

        let cone = quad(&[-1.0, 4.0], &[0.0, 0.0], 0.0);
        assert_eq!(components_level(&cone, t()).unwrap().count, 1);

        let f = quad(&[1.0], &[0.0], -1.0);
        let r = components_level(&f, t()).unwrap();
        assert_eq!(r.count, 2);
        assert_eq!(r.witnesses[0].point, vec![-1.0]);
        assert_eq!(r.witnesses[1].point, vec![1.0]);
    }

    #[test]
    fn level_empty_and_connected_cases() {
        assert_eq!(components_level(&quad(&[1.0, 1.0], &[0.0, 0.0], 1.0), t()).unwrap().count, 0);
        assert_eq!(components_level(&quad(&[-1.0, -1.0], &[0.0, 0.0], -1.0), t()).unwrap().count, 0);
        for f in [
            quad(&[1.0, 1.0], &[0.0, 0.0], -1.0),
            quad(&[-1.0, -1.0, 1.0], &[0.0, 0.0, 0.0], 1.0),
            quad(&[1.0, 0.0], &[0.0, 1.0], 0.0),
            quad(&[0.0, 0.0], &[1.0, 0.0], 2.0),
            quad(&[-1.0, 1.0, 1.0], &[0.0, 0.0, 0.0], -1.0),
        ] {
            let r = components_level(&f, t()).unwrap();
            assert_eq!(r.count, 1, "{f:?}");
            assert_witnesses(&f, &r);
        }
    }

    #[test]
    fn constant_is_rejected() {
        let c = quad(&[0.0], &[0.0], 1.0);
        assert_eq!(components_level(&c, t()).unwrap_err(), Error::ConstantFunction);
    }
}
