//! Deciding whether one zero level set separates another.
//!
//! A quadratic `g` can only separate `{f=0}` when its Hessian is a multiple
//! `λA` of the Hessian of `f`; then `g − λf` is affine and agrees with `g` on
//! `{f=0}`, so the question reduces to a hyperplane. For a hyperplane
//! `{cᵀx + c₀ = 0}` the decision is a finite inertia/range/pseudoinverse test
//! on `f` restricted to the hyperplane, parameterized as `x₀ + Vu`.

use serde::{Deserialize, Serialize};

use crate::connectivity::{components_level, level_disconnection, Disconnection, Tag};
use crate::error::{Error, Result};
use crate::linalg::{dot, norm2, nullspace_basis_of_covector, Matrix, Spectrum, Tolerances};
use crate::quadratic::{linear_combination, multiple_of, AffineFunction, QuadraticFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Branch {
    /// `f` itself has one negative eigenvalue; `f > 0` on the hyperplane.
    Unprimed,
    /// `f` has one positive eigenvalue; `f < 0` on the hyperplane.
    Primed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FailureReason {
    BNotMultiple,
    LevelSetConnected,
    LevelSetEmpty,
    ReductionConstant,
    CriterionFailed,
}

/// Outcome of one branch of the hyperplane criterion, condition by condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchCheck {
    pub branch: Branch,
    /// Exactly one negative (unprimed) or positive (primed) eigenvalue.
    pub single_eigenvalue: bool,
    pub linear_in_range: bool,
    pub normal_in_range: bool,
    /// `VᵀAV ⪰ 0` (unprimed) or `⪯ 0` (primed).
    pub restricted_semidefinite: bool,
    pub w_in_range: bool,
    /// `f(x₀) − wᵀ(VᵀAV)†w`, negated on the primed branch.
    pub margin: f64,
    pub margin_positive: bool,
    /// The level-set test independently finds two components on this
    /// branch's side (`f` for unprimed, `−f` for primed).
    pub level_set_split: bool,
    pub passed: bool,
}

impl BranchCheck {
    fn structural(&self) -> bool {
        self.single_eigenvalue
            && self.linear_in_range
            && self.normal_in_range
            && self.restricted_semidefinite
            && self.w_in_range
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AffineSeparationCertificate {
    pub branch: Branch,
    /// Foot point `−c₀c/(cᵀc)` on the hyperplane.
    pub x0: Vec<f64>,
    /// Orthonormal basis of the hyperplane directions (n×(n−1)).
    pub basis: Matrix,
    /// `Vᵀ(Ax₀ + a)`.
    pub w: Vec<f64>,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignedWitness {
    pub tag: Tag,
    pub point: Vec<f64>,
    pub g_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparationVerdict {
    pub separated: bool,
    pub lambda: Option<f64>,
    pub reduction: Option<AffineFunction>,
    pub certificate: Option<AffineSeparationCertificate>,
    /// `(u_minus, u_plus)` on `{f=0}` with opposite signs of the separating
    /// function.
    pub witnesses: Option<(SignedWitness, SignedWitness)>,
    pub failure: Option<FailureReason>,
    /// The margin fell inside the tolerance band around zero.
    pub borderline: bool,
    pub checks: Vec<BranchCheck>,
}

impl SeparationVerdict {
    fn failed(reason: FailureReason) -> Self {
        SeparationVerdict {
            separated: false,
            lambda: None,
            reduction: None,
            certificate: None,
            witnesses: None,
            failure: Some(reason),
            borderline: false,
            checks: Vec::new(),
        }
    }

    pub fn branch(&self) -> Option<Branch> {
        self.certificate.as_ref().map(|c| c.branch)
    }
}

/// Does the hyperplane `{h = 0}` separate `{f = 0}`?
pub fn separates_affine_level(
    h: &AffineFunction,
    f: &QuadraticFunction,
    t: Tolerances,
) -> Result<SeparationVerdict> {
    let n = f.dim();
    if h.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: h.dim(),
        });
    }
    if f.is_constant(t) {
        return Err(Error::ConstantFunction);
    }
    let c = &h.c;
    let basis = nullspace_basis_of_covector(c, t)?;

    let spec = f.spectrum(t)?;
    let inertia = spec.inertia();
    let linear_in_range = spec.range_contains(f.linear())?;
    let normal_in_range = spec.range_contains(c)?;

    let cc = dot(c, c);
    let x0: Vec<f64> = c.iter().map(|ci| -h.c0 * ci / cc).collect();
    let grad_half: Vec<f64> = f
        .matrix()
        .matvec(&x0)
        .iter()
        .zip(f.linear())
        .map(|(ax, a)| ax + a)
        .collect();
    let w = basis.tr_matvec(&grad_half);
    let restricted = f.matrix().congruence(&basis);
    let rspec = Spectrum::new(&restricted, t)?;
    let definiteness = rspec.definiteness();
    let w_in_range = rspec.range_contains(&w)?;
    let fx0 = f.value(&x0);
    let raw_margin = fx0 - dot(&w, &rspec.pinv().matvec(&w));
    let band = t.tol_rel * 1f64.max(fx0.abs()).max(dot(&w, &w) * rspec.pinv_norm());
    let split = level_disconnection(f, &spec, t);

    let check = |branch: Branch| {
        let (single_eigenvalue, restricted_semidefinite, margin, side) = match branch {
            Branch::Unprimed => (
                inertia.n_neg == 1,
                definiteness.is_psd(),
                raw_margin,
                Disconnection::Own,
            ),
            Branch::Primed => (
                inertia.n_pos == 1,
                definiteness.is_nsd(),
                -raw_margin,
                Disconnection::Negated,
            ),
        };
        let mut bc = BranchCheck {
            branch,
            single_eigenvalue,
            linear_in_range,
            normal_in_range,
            restricted_semidefinite,
            w_in_range,
            margin,
            margin_positive: margin > band,
            level_set_split: split == Some(side),
            passed: false,
        };
        bc.passed = bc.structural() && bc.margin_positive && bc.level_set_split;
        bc
    };
    let checks = vec![check(Branch::Unprimed), check(Branch::Primed)];

    if let Some(accepted) = checks.iter().find(|c| c.passed) {
        let certificate = AffineSeparationCertificate {
            branch: accepted.branch,
            x0,
            basis,
            w,
            margin: accepted.margin,
        };
        let witnesses = level_witnesses(f, t, |x| h.value(x))?;
        return Ok(SeparationVerdict {
            separated: true,
            lambda: None,
            reduction: Some(h.clone()),
            certificate: Some(certificate),
            witnesses: Some(witnesses),
            failure: None,
            borderline: false,
            checks,
        });
    }

    let reaches_criterion = checks
        .iter()
        .any(|c| c.single_eigenvalue && c.linear_in_range);
    let failure = if reaches_criterion {
        FailureReason::CriterionFailed
    } else if components_level(f, t)?.count == 0 {
        FailureReason::LevelSetEmpty
    } else {
        FailureReason::LevelSetConnected
    };
    // Inside the margin band, or the margin and the level-set test fall on
    // opposite sides of their tolerance bands.
    let borderline = checks
        .iter()
        .any(|c| c.structural() && (c.margin.abs() <= band || c.margin_positive));
    Ok(SeparationVerdict {
        reduction: Some(h.clone()),
        borderline,
        checks,
        ..SeparationVerdict::failed(failure)
    })
}

/// Witnesses on the two components of `{f=0}`, labelled by the given
/// separating function.
fn level_witnesses(
    f: &QuadraticFunction,
    t: Tolerances,
    sep: impl Fn(&[f64]) -> f64,
) -> Result<(SignedWitness, SignedWitness)> {
    let report = components_level(f, t)?;
    if report.count != 2 {
        return Err(Error::Inconsistency(format!(
            "separation certified but level set has {} component(s)",
            report.count
        )));
    }
    let mut it = report.witnesses.into_iter().map(|w| SignedWitness {
        g_value: sep(&w.point),
        tag: w.tag,
        point: w.point,
    });
    let minus = it.next().expect("two witnesses");
    let plus = it.next().expect("two witnesses");
    if minus.g_value * plus.g_value >= 0.0 {
        return Err(Error::Inconsistency(format!(
            "certified separation but witness values {} and {} share a sign",
            minus.g_value, plus.g_value
        )));
    }
    Ok((minus, plus))
}

/// Does the quadratic level set `{g = 0}` separate `{f = 0}`?
pub fn separates_level(
    g: &QuadraticFunction,
    f: &QuadraticFunction,
    t: Tolerances,
) -> Result<SeparationVerdict> {
    if g.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: g.dim(),
        });
    }
    if f.is_constant(t) || g.is_constant(t) {
        return Err(Error::ConstantFunction);
    }
    let Some(lambda) = multiple_of(g.matrix(), f.matrix(), t) else {
        return Ok(SeparationVerdict::failed(FailureReason::BNotMultiple));
    };
    let reduced = linear_combination(-lambda, f, 1.0, g)?;
    let h = AffineFunction::new(
        reduced.linear().iter().map(|b| 2.0 * b).collect(),
        reduced.constant(),
    );
    let scale = g
        .coefficient_scale()
        .max(lambda.abs() * f.coefficient_scale());
    if norm2(&h.c) <= t.band(scale) {
        return Ok(SeparationVerdict {
            lambda: Some(lambda),
            reduction: Some(h),
            ..SeparationVerdict::failed(FailureReason::ReductionConstant)
        });
    }
    let mut verdict = separates_affine_level(&h, f, t)?;
    verdict.lambda = Some(lambda);
    if let Some((minus, plus)) = verdict.witnesses.as_mut() {
        minus.g_value = g.value(&minus.point);
        plus.g_value = g.value(&plus.point);
        if minus.g_value * plus.g_value >= 0.0 {
            return Err(Error::Inconsistency(format!(
                "reduction separates but g-values {} and {} share a sign",
                minus.g_value, plus.g_value
            )));
        }
    }
    Ok(verdict)
}

/// Second half of a mutual-separation check.
#[derive(Debug, Clone, PartialEq)]
pub enum Reverse {
    Verdict(Box<SeparationVerdict>),
    /// `g` is affine: its zero set is a hyperplane, which is connected.
    NotApplicableAffine,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MutualVerdict {
    /// Does `{g=0}` separate `{f=0}`?
    pub forward: SeparationVerdict,
    /// Does `{f=0}` separate `{g=0}`?
    pub reverse: Reverse,
}

/// Both directions; a separated forward verdict with quadratic `g` and a
/// non-separated reverse verdict is reported as an inconsistency.
pub fn check_mutual(
    f: &QuadraticFunction,
    g: &QuadraticFunction,
    t: Tolerances,
) -> Result<MutualVerdict> {
    let forward = separates_level(g, f, t)?;
    if g.is_affine(t).is_some() {
        return Ok(MutualVerdict {
            forward,
            reverse: Reverse::NotApplicableAffine,
        });
    }
    let reverse = separates_level(f, g, t)?;
    if forward.separated && !reverse.separated {
        return Err(Error::Inconsistency(format!(
            "{{g=0}} separates {{f=0}} but {{f=0}} does not separate {{g=0}} (reverse failure {:?})",
            reverse.failure
        )));
    }
    Ok(MutualVerdict {
        forward,
        reverse: Reverse::Verdict(Box::new(reverse)),
    })
}

/// Does `{γf + δg = 0}` separate `{αf + βg = 0}`?
pub fn combined_separation(
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
    f: &QuadraticFunction,
    g: &QuadraticFunction,
    t: Tolerances,
) -> Result<SeparationVerdict> {
    let det = alpha * delta - beta * gamma;
    let scale = (alpha * delta).abs().max((beta * gamma).abs()).max(1.0);
    if det.abs() <= t.tol_rel * scale {
        return Err(Error::SingularCombination { det });
    }
    let separated_set = linear_combination(alpha, f, beta, g)?;
    let separator = linear_combination(gamma, f, delta, g)?;
    separates_level(&separator, &separated_set, t)
}
