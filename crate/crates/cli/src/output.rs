//! JSON shapes written to stdout.

use quadsep::separation::{BranchCheck, SignedWitness};
use quadsep::{
    critical_value, inertia, Branch, CanonicalForm, ComponentReport, FailureReason, FormId,
    InertiaReport, QuadraticFunction, Reverse, SeparationVerdict, Tag, Tolerances, Witness,
};
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct Classification {
    pub form: FormId,
    pub k: usize,
    pub m: usize,
    pub delta: u8,
    pub theta: u8,
    pub cprime: f64,
    pub mu: f64,
    pub inertia: InertiaReport,
    pub critical_value: Option<f64>,
    /// Rows of `S` in `y = Sx + s`.
    pub forward: Vec<Vec<f64>>,
    pub shift: Vec<f64>,
}

impl Classification {
    pub fn new(q: &QuadraticFunction, cf: &CanonicalForm, t: Tolerances) -> quadsep::Result<Self> {
        Ok(Classification {
            form: cf.form,
            k: cf.k,
            m: cf.m,
            delta: cf.delta,
            theta: cf.theta,
            cprime: cf.cprime,
            mu: cf.change.mu,
            inertia: inertia(q.matrix(), t)?,
            critical_value: critical_value(q, t)?,
            forward: cf.change.forward.to_rows(),
            shift: cf.change.shift.clone(),
        })
    }
}

#[derive(Debug, Serialize)]
pub struct Components {
    pub count: usize,
    pub witnesses: Vec<Witness>,
}

impl From<&ComponentReport> for Components {
    fn from(r: &ComponentReport) -> Self {
        Components {
            count: r.count,
            witnesses: r.witnesses.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct AllComponents {
    pub strict_sublevel: Components,
    pub sublevel: Components,
    pub level: Components,
}

#[derive(Debug, Serialize)]
pub struct Reduction {
    pub c: Vec<f64>,
    pub c0: f64,
}

#[derive(Debug, Serialize)]
pub struct WitnessPoint {
    pub tag: Tag,
    pub point: Vec<f64>,
    pub g_value: f64,
}

impl From<&SignedWitness> for WitnessPoint {
    fn from(w: &SignedWitness) -> Self {
        WitnessPoint {
            tag: w.tag,
            point: w.point.clone(),
            g_value: w.g_value,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Witnesses {
    pub minus: WitnessPoint,
    pub plus: WitnessPoint,
}

#[derive(Debug, Serialize)]
pub struct Verdict {
    pub separated: bool,
    pub lambda: Option<f64>,
    pub reduction: Option<Reduction>,
    pub branch: Option<Branch>,
    pub margin: Option<f64>,
    pub witnesses: Option<Witnesses>,
    pub failure: Option<FailureReason>,
    pub borderline: bool,
    pub checks: Vec<BranchCheck>,
}

impl From<&SeparationVerdict> for Verdict {
    fn from(v: &SeparationVerdict) -> Self {
        Verdict {
            separated: v.separated,
            lambda: v.lambda,
            reduction: v.reduction.as_ref().map(|h| Reduction {
                c: h.c.clone(),
                c0: h.c0,
            }),
            branch: v.branch(),
            margin: v.certificate.as_ref().map(|c| c.margin),
            witnesses: v.witnesses.as_ref().map(|(m, p)| Witnesses {
                minus: m.into(),
                plus: p.into(),
            }),
            failure: v.failure,
            borderline: v.borderline,
            checks: v.checks.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum ReverseVerdict {
    Verdict(Verdict),
    NotApplicable(&'static str),
}

#[derive(Debug, Serialize)]
pub struct Mutual {
    pub forward: Verdict,
    pub reverse: ReverseVerdict,
}

impl Mutual {
    pub fn new(forward: &SeparationVerdict, reverse: &Reverse) -> Self {
        Mutual {
            forward: forward.into(),
            reverse: match reverse {
                Reverse::Verdict(v) => ReverseVerdict::Verdict(v.as_ref().into()),
                Reverse::NotApplicableAffine => ReverseVerdict::NotApplicable("NOT_APPLICABLE_AFFINE"),
            },
        }
    }
}
