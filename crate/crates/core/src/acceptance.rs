//! The verification suite: eight numbered criteria covering moment
//! identities, Monte-Carlo agreement, oracle-vs-closed-form consistency,
//! published area statistics, containments, decision-procedure properties,
//! the diagonal-boundary algebra, and simulation consistency.
//!
//! `Full` runs every criterion at its nominal size; `Quick` shrinks the
//! expensive grids and ensembles for a fast smoke pass with identical
//! logic and tolerances.

use rayon::prelude::*;

use crate::lyapunov::{expected_delta_v, mc_expected_delta_v};
use crate::model::{PMatrix, PTemplate, StateVec, SwarmParams, SystemVariant};
use crate::qe::{certificate_margin, decide_membership, neg_def_condition, union_membership, MARGIN_TOL};
use crate::raster::{agreement, set_ops, subset_violations, GridSpec, Raster};
use crate::regions::{sys1_diagonal_boundary, RegionId, RegionRegistry};
use crate::report::MATCHED_PAIRS;
use crate::rng::TrialStream;
use crate::sim::{
    classify, run_ensemble, step_once, witness_decay_check, Dynamics, SimConfig, StepRandoms,
    VerdictKind,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

pub const CRITERION_COUNT: usize = 8;

pub fn run_all(level: Level) -> Vec<CriterionOutcome> {
    (1..=CRITERION_COUNT)
        .map(|id| run_criterion(id, level))
        .collect()
}

pub fn run_criterion(id: usize, level: Level) -> CriterionOutcome {
    match id {
        1 => moment_identities(),
        2 => mc_agreement(level),
        3 => oracle_vs_closed_form(),
        4 => paper_areas(level),
        5 => containments(),
        6 => qe_property_suite(level),
        7 => quartic_branch_math(),
        8 => simulation_consistency(level),
        _ => panic!("criterion ids run 1..=8, got {id}"),
    }
}

struct Draw {
    stream: TrialStream,
    ctr: u64,
}

impl Draw {
    fn new(seed: u64) -> Self {
        Draw {
            stream: TrialStream::new(seed, 0),
            ctr: 0,
        }
    }

    fn unit(&mut self) -> f64 {
        self.ctr += 1;
        self.stream.uniform(self.ctr, 0)
    }

    fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }
}

fn outcome(id: usize, name: &'static str, passed: bool, detail: String) -> CriterionOutcome {
    CriterionOutcome {
        id,
        name,
        passed,
        detail,
    }
}

/// 1. Scaled-drive moments match the closed forms to machine precision.
fn moment_identities() -> CriterionOutcome {
    let mut draw = Draw::new(0xC1);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let c = draw.range(0.01, 5.0);
        let m = crate::model::scaled_moments(&SwarmParams::sigma1(c, 0.0).unwrap());
        let err1 = rel_err(m.m1, c).max(rel_err(m.m2, 7.0 * c * c / 6.0));

        let c1 = draw.range(0.0, 3.0);
        let c2 = draw.range(0.01, 3.0);
        let m = crate::model::scaled_moments(&SwarmParams::sigma2(c1, c2, 0.0).unwrap());
        let s = c1 + c2;
        let err2 = rel_err(m.m1, s / 2.0).max(rel_err(m.m2, s * s / 3.0));
        worst = worst.max(err1).max(err2);
    }
    outcome(
        1,
        "moment identities",
        worst <= 1e-15,
        format!("worst relative error {worst:.2e} over 100 draws (bar 1e-15)"),
    )
}

fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1e-300)
}

/// 2. Monte-Carlo estimates of E{ΔV} agree with the closed form within four
/// standard errors.
fn mc_agreement(level: Level) -> CriterionOutcome {
    let trials: u64 = match level {
        Level::Full => 1_000_000,
        Level::Quick => 1_000,
    };
    let tuples: Vec<(SwarmParams, PMatrix, StateVec, u64)> = {
        let mut draw = Draw::new(0xC2);
        (0..50)
            .map(|k| {
                let w = draw.range(-0.95, 0.95);
                let params = if k % 2 == 0 {
                    SwarmParams::sigma1(draw.range(0.05, 3.0), w).unwrap()
                } else {
                    SwarmParams::sigma2(draw.range(0.05, 1.5), draw.range(0.05, 1.5), w).unwrap()
                };
                let p = PMatrix::new(
                    draw.range(-2.0, 2.0),
                    draw.range(-2.0, 2.0),
                    draw.range(-2.0, 2.0),
                );
                let z = StateVec::new(draw.range(-2.0, 2.0), draw.range(-2.0, 2.0));
                (params, p, z, 1000 + k as u64)
            })
            .collect()
    };
    let failures: Vec<String> = tuples
        .par_iter()
        .filter_map(|(params, p, z, seed)| {
            let closed = expected_delta_v(params, p).eval(*z);
            let (mean, stderr) = mc_expected_delta_v(params, p, *z, trials, *seed).unwrap();
            let gap = (mean - closed).abs();
            (gap > 4.0 * stderr).then(|| format!("gap {gap:.3e} > 4*stderr {:.3e}", 4.0 * stderr))
        })
        .collect();
    outcome(
        2,
        "E{dV} Monte-Carlo agreement",
        failures.is_empty(),
        if failures.is_empty() {
            format!("50 tuples x {trials} trials all within 4 standard errors")
        } else {
            format!("{} of 50 tuples out of band: {}", failures.len(), failures.join("; "))
        },
    )
}

/// 3. Oracle decisions agree with the printed closed forms on dense grids
/// away from boundary bands.
fn oracle_vs_closed_form() -> CriterionOutcome {
    let registry = RegionRegistry::global();
    let mut min_frac = 1.0f64;
    let mut detail = Vec::new();
    for (closed, oracle) in MATCHED_PAIRS {
        let sigma1 = matches!(
            closed,
            RegionId::Sys1Identity | RegionId::Sys1Diagonal | RegionId::Sys1OffDiag
        );
        let c_max = if sigma1 { 2.0 } else { 4.0 };
        let grid = GridSpec::new(0.0, c_max, -1.0, 1.0, 400, 400).unwrap();
        let a = Raster::build(registry.get(closed), &grid).unwrap();
        let b = Raster::build(registry.get(oracle), &grid).unwrap();
        let frac = agreement(&a, &b).unwrap();
        min_frac = min_frac.min(frac);
        detail.push(format!("{}:{:.5}", closed.name(), frac));
    }
    outcome(
        3,
        "oracle vs closed form",
        min_frac >= 0.995,
        format!("agreement {} (bar 0.995)", detail.join(" ")),
    )
}

/// 4. Published area statistics on the (0,4] x (-1,1) window.
fn paper_areas(level: Level) -> CriterionOutcome {
    let n = match level {
        Level::Full => 2000,
        Level::Quick => 400,
    };
    let grid = GridSpec::default_window(n, n).unwrap();
    let registry = RegionRegistry::global();
    let u2 = Raster::build(
        registry.get(RegionId::OracleUnion(SystemVariant::Sigma2)),
        &grid,
    )
    .unwrap();
    let gazi = Raster::build(registry.get(RegionId::Gazi), &grid).unwrap();
    let area_u2 = u2.area();
    let area_gazi = gazi.area();
    let overlap = set_ops(&u2, &gazi).unwrap().overlap_fraction_of_b;
    let share = (area_u2 - area_gazi) / area_u2;
    let pass = (area_u2 - 3.44).abs() <= 0.03
        && (area_gazi - 2.65).abs() <= 0.02
        && (overlap - 0.98).abs() <= 0.01;
    outcome(
        4,
        "published areas and overlap",
        pass,
        format!(
            "area(sigma2 union)={area_u2:.4} (3.44±0.03) area(gazi)={area_gazi:.4} (2.65±0.02) \
             overlap={overlap:.4} (0.98±0.01); size gain reported, not asserted: \
             share_of_sigma2={share:.4} vs 0.2309, ratio-1={:.4}",
            area_u2 / area_gazi - 1.0
        ),
    )
}

/// 5. Containments with zero violating non-boundary cells, plus the small
/// Σ1-minus-Σ2 remainder.
fn containments() -> CriterionOutcome {
    let registry = RegionRegistry::global();
    let grid = GridSpec::default_window(400, 400).unwrap();
    let raster = |id: RegionId| Raster::build(registry.get(id), &grid).unwrap();

    let mut violations = Vec::new();
    let checks = [
        (RegionId::Sys1Identity, RegionId::Sys1Diagonal),
        (RegionId::Sys1Identity, RegionId::Sys1OffDiag),
        (RegionId::Sys2Identity, RegionId::Sys2Diagonal),
        (RegionId::Sys2Identity, RegionId::Sys2OffDiag),
        (
            RegionId::Kadirkamanathan,
            RegionId::OracleUnion(SystemVariant::Sigma2),
        ),
        (
            RegionId::OracleUnion(SystemVariant::Sigma2),
            RegionId::Poli,
        ),
    ];
    let mut u2_raster = None;
    for (a, b) in checks {
        let ra = raster(a);
        let rb = raster(b);
        let v = subset_violations(&ra, &rb).unwrap();
        if v > 0 {
            violations.push(format!("{} <= {}: {v}", a.name(), b.name()));
        }
        if b == RegionId::OracleUnion(SystemVariant::Sigma2) {
            u2_raster = Some(rb);
        }
    }

    let u1 = raster(RegionId::OracleUnion(SystemVariant::Sigma1));
    let u2 = u2_raster.unwrap();
    let only_sigma1 = set_ops(&u1, &u2).unwrap().a_minus_b.member_count();
    let frac = only_sigma1 as f64 / u1.member_count().max(1) as f64;

    let pass = violations.is_empty() && frac < 0.05;
    outcome(
        5,
        "containments",
        pass,
        format!(
            "subset violations: [{}]; |sigma1\\sigma2|/|sigma1| = {frac:.4} (bar 0.05)",
            violations.join(", ")
        ),
    )
}

/// 6. Soundness/completeness properties of the decision procedure.
fn qe_property_suite(level: Level) -> CriterionOutcome {
    let points = match level {
        Level::Full => 500,
        Level::Quick => 100,
    };
    let mut draw = Draw::new(0xC6);
    let cases: Vec<(SwarmParams, PMatrix)> = (0..points)
        .map(|k| {
            let w = draw.range(-0.99, 0.99);
            let c_or_s = draw.range(0.05, 3.5);
            let params = if k % 2 == 0 {
                SwarmParams::sigma1(c_or_s, w).unwrap()
            } else {
                SwarmParams::sigma2(c_or_s / 2.0, c_or_s / 2.0, w).unwrap()
            };
            // a random positive-definite explicit candidate
            let p1 = draw.range(0.2, 2.0);
            let p2 = draw.range(-0.5, 0.5);
            let p3 = (p2 * p2 + draw.range(0.05, 2.0)) / p1;
            (params, PMatrix::new(p1, p2, p3))
        })
        .collect();

    let failures: Vec<String> = cases
        .par_iter()
        .filter_map(|(params, explicit)| {
            let mut errs = Vec::new();

            for template in [PTemplate::DiagonalFree, PTemplate::OffDiagFree] {
                let decision = decide_membership(params, &template).unwrap();
                // dense-scan completeness: a clearly valid scanned witness
                // forces membership
                let scan_hit = match template {
                    PTemplate::DiagonalFree => (0..10_000).any(|i| {
                        let t = 1e-6 * 10f64.powf(12.0 * i as f64 / 9999.0);
                        certificate_margin(params, &PMatrix::new(1.0, 0.0, t)) > 1e-6
                    }),
                    PTemplate::OffDiagFree => (0..10_000).any(|i| {
                        let t = -1.0 + 2.0 * (i as f64 + 0.5) / 10_000.0;
                        certificate_margin(params, &PMatrix::new(1.0, t, 1.0)) > 1e-6
                    }),
                    _ => unreachable!(),
                };
                if scan_hit && !decision.member {
                    errs.push(format!("scan found witness but decide refused ({template:?})"));
                }
                // soundness: every reported witness validates
                if decision.member {
                    let witness = decision.witness.expect("member has witness");
                    let q = expected_delta_v(params, &witness);
                    if !witness.is_positive_definite()
                        || !neg_def_condition(&q)
                        || certificate_margin(params, &witness) < MARGIN_TOL
                    {
                        errs.push(format!("witness fails validation ({template:?})"));
                    }
                }
            }

            // scaling invariance of explicit decisions
            let reference = decide_membership(params, &PTemplate::Explicit(*explicit))
                .unwrap()
                .member;
            for beta in [1e-3, 1e3] {
                let scaled = decide_membership(
                    params,
                    &PTemplate::Explicit(explicit.scaled(beta)),
                )
                .unwrap()
                .member;
                if scaled != reference {
                    errs.push(format!("scaling beta={beta} flipped the decision"));
                }
            }

            // w-symmetry for the p2-free templates
            let mirrored = match *params {
                SwarmParams::Sigma1 { c, w } => SwarmParams::sigma1(c, -w).unwrap(),
                SwarmParams::Sigma2 { c1, c2, w } => SwarmParams::sigma2(c1, c2, -w).unwrap(),
            };
            for template in [PTemplate::Identity, PTemplate::DiagonalFree] {
                let a = decide_membership(params, &template).unwrap().member;
                let b = decide_membership(&mirrored, &template).unwrap().member;
                if a != b {
                    errs.push(format!("w-symmetry broken ({template:?})"));
                }
            }

            (!errs.is_empty()).then(|| format!("{params:?}: {}", errs.join(", ")))
        })
        .collect();

    outcome(
        6,
        "decision-procedure properties",
        failures.is_empty(),
        if failures.is_empty() {
            format!("{points} points: scan-vs-decide, witness validity, scaling, w-symmetry all hold")
        } else {
            format!("{} failures, first: {}", failures.len(), failures[0])
        },
    )
}

/// 7. Discriminant identity and double root of the diagonal boundary.
fn quartic_branch_math() -> CriterionOutcome {
    let mut draw = Draw::new(0xC7);
    let mut worst = 0.0f64;
    let bound = 7f64.sqrt();
    for _ in 0..10_000 {
        let w = draw.range(-bound, bound);
        let w2 = w * w;
        let lhs = (48.0 * w2 - 168.0) * (48.0 * w2 - 168.0)
            - 196.0 * (24.0 * w2 * w2 - 168.0 * w2 + 144.0);
        let rhs = 2400.0 * w2 * (7.0 - w2);
        worst = worst.max((lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0));
    }
    let (lo, hi) = sys1_diagonal_boundary(0.0).unwrap();
    let double_root_err = (lo - 12.0 / 7.0).abs().max((hi - 12.0 / 7.0).abs());
    let pass = worst <= 1e-9 && double_root_err <= 1e-12;
    outcome(
        7,
        "diagonal-boundary algebra",
        pass,
        format!(
            "discriminant identity worst rel err {worst:.2e} (bar 1e-9); \
             double root |c - 12/7| = {double_root_err:.2e} (bar 1e-12)"
        ),
    )
}

/// 8. Simulation never contradicts the theory: member points do not
/// diverge, certificates decay, and the two Σ1 update forms coincide.
fn simulation_consistency(level: Level) -> CriterionOutcome {
    let trials = match level {
        Level::Full => 10_000,
        Level::Quick => 1_000,
    };
    let registry = RegionRegistry::global();
    let grid = GridSpec::new(0.0, 2.0, -1.0, 1.0, 400, 400).unwrap();
    let union = Raster::build(
        registry.get(RegionId::OracleUnion(SystemVariant::Sigma1)),
        &grid,
    )
    .unwrap();
    let member_cells: Vec<(f64, f64)> = (0..grid.n_w)
        .flat_map(|j| (0..grid.n_c).map(move |i| (i, j)))
        .filter(|&(i, j)| union.bit(i, j))
        .map(|(i, j)| (grid.c_at(i), grid.w_at(j)))
        .collect();
    let stride = (member_cells.len() / 200).max(1);
    let sample: Vec<(f64, f64)> = member_cells.iter().step_by(stride).take(200).copied().collect();

    let divergent: Vec<String> = sample
        .iter()
        .filter_map(|&(c, w)| {
            let cfg = SimConfig::new(SwarmParams::sigma1(c, w).unwrap(), trials, 500, 0x51);
            let stats = run_ensemble(&cfg, None).unwrap();
            let verdict = classify(&stats, cfg.theta_conv, cfg.theta_div);
            (verdict.kind == VerdictKind::Divergent)
                .then(|| format!("(c={c:.3}, w={w:.3}) ratio {:.2}", verdict.decay_ratio))
        })
        .collect();

    let decay_stride = (sample.len() / 20).max(1);
    let decay_failures: Vec<String> = sample
        .iter()
        .step_by(decay_stride)
        .take(20)
        .filter_map(|&(c, w)| {
            let params = SwarmParams::sigma1(c, w).unwrap();
            let witness = union_membership(&params).unwrap().witness?;
            let cfg = SimConfig::new(params, trials, 200, 0x52);
            (!witness_decay_check(&cfg, &witness).unwrap())
                .then(|| format!("(c={c:.3}, w={w:.3})"))
        })
        .collect();

    // the two Σ1 dynamics transcriptions follow the same trajectories when
    // fed identical draws
    let params = SwarmParams::sigma1(1.1, 0.55).unwrap();
    let mut forms_match = true;
    'outer: for trial in 0..50u64 {
        let stream = TrialStream::new(0x53, trial);
        let (i1, i2) = stream.uniform_pair(0);
        let mut za = StateVec::new(2.0 * i1 - 1.0, 2.0 * i2 - 1.0);
        let mut zb = za;
        for t in 1..=100u64 {
            let (u1, u2) = stream.uniform_pair(t);
            let r = StepRandoms { u1, u2 };
            za = step_once(&params, Dynamics::OriginalUpdate, za, r);
            zb = step_once(&params, Dynamics::SystemForm, zb, r);
            let scale = za.x.abs().max(za.v.abs()).max(1.0);
            if (za.x - zb.x).abs() > 1e-12 * scale || (za.v - zb.v).abs() > 1e-12 * scale {
                forms_match = false;
                break 'outer;
            }
        }
    }

    let pass = divergent.is_empty() && decay_failures.is_empty() && forms_match;
    outcome(
        8,
        "simulation consistency",
        pass,
        format!(
            "{} member points, {} divergent [{}]; decay check failures [{}]; forms match: {forms_match}",
            sample.len(),
            divergent.len(),
            divergent.join(", "),
            decay_failures.join(", ")
        ),
    )
}
