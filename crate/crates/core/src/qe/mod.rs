//! Specialized quantifier elimination for the convergence-set formula.
//!
//! Membership of a parameter point in the convergence set asks for a
//! positive-definite candidate matrix whose expected Lyapunov difference is
//! negative definite. The universal part (negativity for all states) is
//! removed analytically through the 2x2 definiteness lemma, and the single
//! remaining existential parameter of each normalized candidate family is
//! eliminated by real-root isolation with a sign table: the constraint
//! polynomials' roots decompose the search interval into cells of constant
//! sign, and each open cell is probed at its midpoint.
//!
//! Only one candidate parameter is ever quantified; taking the union over
//! the three normalized families stands in for eliminating all three at
//! once.

pub mod poly;

pub use poly::{UniPoly, ROOT_TOL, TRIM_TOL};

use crate::error::{Error, Result};
use crate::lyapunov::{expected_delta_v, QuadForm};
use crate::model::{PMatrix, PTemplate, SwarmParams};

/// Strict-inequality slack below which a point is treated as undecidable and
/// excluded from membership; boundary ambiguity is handled by the raster
/// layer instead.
pub const MARGIN_TOL: f64 = 1e-10;

/// `q(x, v) < 0` for all `(x, v) != 0`, i.e. `d < 0` and `4 a d - e² > 0`
/// (which jointly force `a < 0`).
pub fn neg_def_condition(q: &QuadForm) -> bool {
    q.d < 0.0 && 4.0 * q.a * q.d - q.e * q.e > 0.0
}

/// Required strict sign of a constraint polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintSign {
    Positive,
    Negative,
}

/// One strict polynomial inequality in the quantified variable.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub poly: UniPoly,
    pub sign: ConstraintSign,
}

impl Constraint {
    pub fn positive(poly: UniPoly) -> Self {
        Constraint {
            poly,
            sign: ConstraintSign::Positive,
        }
    }

    pub fn negative(poly: UniPoly) -> Self {
        Constraint {
            poly,
            sign: ConstraintSign::Negative,
        }
    }

    fn holds_with_margin(&self, x: f64) -> bool {
        let val = self.poly.eval(x);
        match self.sign {
            ConstraintSign::Positive => val > MARGIN_TOL,
            ConstraintSign::Negative => val < -MARGIN_TOL,
        }
    }
}

/// Decides whether a system of strict univariate inequalities has a solution
/// in the open interval `(lo, hi)` and returns a satisfying point if so.
///
/// All constraint roots inside the domain are collected, the sorted cell
/// decomposition is formed, and every open cell is probed at its midpoint
/// (pseudo-midpoints one unit inside the last root, or the finite endpoint,
/// stand in for unbounded cells). The first probe satisfying every
/// constraint with slack above `MARGIN_TOL` is returned.
pub fn feasible_1d(constraints: &[Constraint], lo: f64, hi: f64) -> Result<Option<f64>> {
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(Error::Domain(format!(
            "invalid feasibility interval ({lo}, {hi})"
        )));
    }
    let mut roots: Vec<f64> = Vec::new();
    for c in constraints {
        if c.poly.degree() > 4 {
            return Err(Error::DegreeTooHigh(c.poly.degree()));
        }
        if c.poly.is_zero() {
            // a zero polynomial can never hold strictly
            return Ok(None);
        }
        if !c.poly.is_constant() {
            roots.extend(c.poly.real_roots_in(lo, hi)?);
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).expect("finite roots"));
    roots.dedup_by(|b, a| (*b - *a).abs() <= ROOT_TOL * b.abs().max(1.0));

    for probe in cell_probes(&roots, lo, hi) {
        if constraints.iter().all(|c| c.holds_with_margin(probe)) {
            return Ok(Some(probe));
        }
    }
    Ok(None)
}

/// One probe point per open cell of the decomposition, left to right.
fn cell_probes(roots: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let left = |bound: f64, first_root: f64| {
        if bound.is_finite() {
            0.5 * (bound + first_root)
        } else {
            first_root - 1.0
        }
    };
    let right = |last_root: f64, bound: f64| {
        if bound.is_finite() {
            0.5 * (last_root + bound)
        } else {
            last_root + 1.0
        }
    };
    if roots.is_empty() {
        let probe = match (lo.is_finite(), hi.is_finite()) {
            (true, true) => 0.5 * (lo + hi),
            (true, false) => lo + 1.0,
            (false, true) => hi - 1.0,
            (false, false) => 0.0,
        };
        return vec![probe];
    }
    let mut probes = Vec::with_capacity(roots.len() + 1);
    probes.push(left(lo, roots[0]));
    for pair in roots.windows(2) {
        probes.push(0.5 * (pair[0] + pair[1]));
    }
    probes.push(right(roots[roots.len() - 1], hi));
    probes
}

/// Outcome of a membership query, with the certifying candidate on success.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub member: bool,
    pub witness: Option<PMatrix>,
    /// Smallest slack among the strict inequalities at the witness. For
    /// fixed-candidate templates this is reported (possibly negative) even
    /// on non-membership; for quantified templates without a feasible cell
    /// it is negative infinity.
    pub certificate_margin: f64,
}

impl Decision {
    fn non_member(margin: f64) -> Self {
        Decision {
            member: false,
            witness: None,
            certificate_margin: margin,
        }
    }
}

/// Slacks of the full strict system at a concrete candidate:
/// `-d`, `4 a d - e²`, `p1`, `p1 p3 - p2²`.
pub fn certificate_margin(params: &SwarmParams, p: &PMatrix) -> f64 {
    let q = expected_delta_v(params, p);
    let (s1, s2) = p.sylvester_margins();
    (-q.d).min(4.0 * q.a * q.d - q.e * q.e).min(s1).min(s2)
}

fn decide_fixed(params: &SwarmParams, p: PMatrix) -> Decision {
    let margin = certificate_margin(params, &p);
    let member = margin > MARGIN_TOL;
    Decision {
        member,
        witness: member.then_some(p),
        certificate_margin: margin,
    }
}

/// Constraint system for a one-parameter candidate family
/// `P(t) = base + t * dir`: the quadratic-form coefficients are linear in
/// `P`, so `-d(t)` is degree <= 1 and `4 a d - e²` is degree <= 2 in `t`.
fn family_constraints(params: &SwarmParams, base: PMatrix, dir: PMatrix) -> Vec<Constraint> {
    let q0 = expected_delta_v(params, &base);
    let q1 = expected_delta_v(params, &dir);
    let neg_d = UniPoly::new(vec![-q0.d, -q1.d]).expect("finite");
    let disc = UniPoly::new(vec![
        4.0 * q0.a * q0.d - q0.e * q0.e,
        4.0 * (q0.a * q1.d + q1.a * q0.d) - 2.0 * q0.e * q1.e,
        4.0 * q1.a * q1.d - q1.e * q1.e,
    ])
    .expect("finite");
    vec![Constraint::positive(neg_d), Constraint::positive(disc)]
}

fn decide_quantified(
    params: &SwarmParams,
    base: PMatrix,
    dir: PMatrix,
    domain: (f64, f64),
    domain_polys: &[UniPoly],
    witness_of: impl Fn(f64) -> PMatrix,
) -> Result<Decision> {
    let mut constraints = family_constraints(params, base, dir);
    for p in domain_polys {
        constraints.push(Constraint::positive(p.clone()));
    }
    match feasible_1d(&constraints, domain.0, domain.1)? {
        Some(t) => {
            let witness = witness_of(t);
            let margin = certificate_margin(params, &witness);
            if margin > 0.0 {
                Ok(Decision {
                    member: true,
                    witness: Some(witness),
                    certificate_margin: margin,
                })
            } else {
                Ok(Decision::non_member(margin))
            }
        }
        None => Ok(Decision::non_member(f64::NEG_INFINITY)),
    }
}

/// Decides the prenex membership formula for one candidate family.
///
/// `Identity` and `Explicit` evaluate the fixed candidate directly.
/// `DiagonalFree` quantifies `p3` over `(0, ∞)` with `p1 = 1, p2 = 0`;
/// `OffDiagFree` quantifies `p2` over `(-1, 1)` with `p1 = p3 = 1`.
pub fn decide_membership(params: &SwarmParams, template: &PTemplate) -> Result<Decision> {
    match template {
        PTemplate::Identity => Ok(decide_fixed(params, PMatrix::identity())),
        PTemplate::Explicit(p) => {
            if ![p.p1, p.p2, p.p3].iter().all(|x| x.is_finite()) {
                return Err(Error::InvalidParam(
                    "explicit candidate entries must be finite".into(),
                ));
            }
            Ok(decide_fixed(params, *p))
        }
        PTemplate::DiagonalFree => decide_quantified(
            params,
            PMatrix::new(1.0, 0.0, 0.0),
            PMatrix::new(0.0, 0.0, 1.0),
            (0.0, f64::INFINITY),
            &[UniPoly::new(vec![0.0, 1.0]).expect("finite")],
            |t| PMatrix::new(1.0, 0.0, t),
        ),
        PTemplate::OffDiagFree => decide_quantified(
            params,
            PMatrix::new(1.0, 0.0, 1.0),
            PMatrix::new(0.0, 1.0, 0.0),
            (-1.0, 1.0),
            &[UniPoly::new(vec![1.0, 0.0, -1.0]).expect("finite")],
            |t| PMatrix::new(1.0, t, 1.0),
        ),
    }
}

/// Membership under any of the three normalized families, tried in the
/// order identity, diagonal, off-diagonal; the non-overlapping family
/// regions add up to the whole convergence set.
pub fn union_membership(params: &SwarmParams) -> Result<Decision> {
    for template in [
        PTemplate::Identity,
        PTemplate::DiagonalFree,
        PTemplate::OffDiagFree,
    ] {
        let decision = decide_membership(params, &template)?;
        if decision.member {
            return Ok(decision);
        }
    }
    Ok(Decision::non_member(f64::NEG_INFINITY))
}
