//! Property tests for the structural invariants of the analysis.

use proptest::prelude::*;

use pso_stability::lyapunov::expected_delta_v;
use pso_stability::model::{PMatrix, PTemplate, SwarmParams};
use pso_stability::qe::{certificate_margin, decide_membership, MARGIN_TOL};
use pso_stability::scaled_moments;
use pso_stability::UniPoly;

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn drive_variance_is_nonnegative(c in 0.0..10.0f64, split in 0.0..1.0f64) {
        let m = scaled_moments(&SwarmParams::sigma1(c, 0.0).unwrap());
        prop_assert!(m.m2 - m.m1 * m.m1 >= -1e-12);
        let m = scaled_moments(&SwarmParams::sigma2(c * split, c * (1.0 - split), 0.0).unwrap());
        prop_assert!(m.m2 - m.m1 * m.m1 >= -1e-12);
    }

    #[test]
    fn matched_gain_second_moments_differ(s in 0.1..5.0f64) {
        let m1 = scaled_moments(&SwarmParams::sigma1(s, 0.0).unwrap());
        let m2 = scaled_moments(&SwarmParams::sigma2(s / 2.0, s / 2.0, 0.0).unwrap());
        prop_assert!(rel_close(m1.m2, 7.0 * s * s / 6.0, 1e-14));
        prop_assert!(rel_close(m2.m2, s * s / 3.0, 1e-14));
        prop_assert!(m1.m2 > m2.m2);
    }

    #[test]
    fn expected_delta_v_is_linear_in_p(
        c in 0.0..3.0f64,
        w in -0.99..0.99f64,
        p1 in -2.0..2.0f64,
        p2 in -2.0..2.0f64,
        p3 in -2.0..2.0f64,
        beta in 1e-3..1e3f64,
    ) {
        let params = SwarmParams::sigma1(c, w).unwrap();
        let p = PMatrix::new(p1, p2, p3);
        let q = expected_delta_v(&params, &p);
        let q_scaled = expected_delta_v(&params, &p.scaled(beta));
        prop_assert!(rel_close(q_scaled.d, beta * q.d, 1e-12));
        prop_assert!(rel_close(q_scaled.e, beta * q.e, 1e-12));
        prop_assert!(rel_close(q_scaled.a, beta * q.a, 1e-12));
    }

    #[test]
    fn w_parity_flips_only_the_cross_term(
        c in 0.0..3.0f64,
        w in 0.0..0.99f64,
        p1 in 0.1..2.0f64,
        p3 in 0.1..2.0f64,
    ) {
        let p = PMatrix::new(p1, 0.0, p3);
        let plus = expected_delta_v(&SwarmParams::sigma1(c, w).unwrap(), &p);
        let minus = expected_delta_v(&SwarmParams::sigma1(c, -w).unwrap(), &p);
        prop_assert_eq!(plus.a, minus.a);
        prop_assert_eq!(plus.d, minus.d);
        prop_assert_eq!(plus.e, -minus.e);
    }

    #[test]
    fn membership_is_scale_invariant(
        c in 0.05..3.0f64,
        w in -0.95..0.95f64,
        p1 in 0.2..2.0f64,
        p2 in -0.5..0.5f64,
        excess in 0.05..2.0f64,
        beta in prop::sample::select(vec![1e-3, 0.1, 10.0, 1e3]),
    ) {
        let params = SwarmParams::sigma1(c, w).unwrap();
        let p = PMatrix::new(p1, p2, (p2 * p2 + excess) / p1);
        let base = decide_membership(&params, &PTemplate::Explicit(p)).unwrap();
        let scaled = decide_membership(&params, &PTemplate::Explicit(p.scaled(beta))).unwrap();
        prop_assert_eq!(base.member, scaled.member);
    }

    #[test]
    fn quantified_witnesses_validate(
        c in 0.05..2.0f64,
        w in -0.95..0.95f64,
        diagonal in any::<bool>(),
    ) {
        let params = SwarmParams::sigma1(c, w).unwrap();
        let template = if diagonal { PTemplate::DiagonalFree } else { PTemplate::OffDiagFree };
        let decision = decide_membership(&params, &template).unwrap();
        if decision.member {
            let witness = decision.witness.unwrap();
            prop_assert!(witness.is_positive_definite());
            prop_assert!(certificate_margin(&params, &witness) >= MARGIN_TOL);
        }
    }

    #[test]
    fn synthesized_roots_are_recovered(
        r1 in -5.0..5.0f64,
        r2 in -5.0..5.0f64,
        r3 in -5.0..5.0f64,
        r4 in -5.0..5.0f64,
        scale in prop::sample::select(vec![0.5, 1.0, 3.0]),
    ) {
        // build (x - r1)...(x - r4) with comfortably separated roots only
        let mut roots = [r1, r2, r3, r4];
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        prop_assume!(roots.windows(2).all(|p| p[1] - p[0] > 1e-3));
        let mut coeffs = vec![1.0f64];
        for r in roots {
            let mut next = vec![0.0; coeffs.len() + 1];
            for (i, &ci) in coeffs.iter().enumerate() {
                next[i] -= r * ci;
                next[i + 1] += ci;
            }
            coeffs = next;
        }
        for c in &mut coeffs {
            *c *= scale;
        }
        let poly = UniPoly::new(coeffs).unwrap();
        let found = poly.real_roots_in(f64::NEG_INFINITY, f64::INFINITY).unwrap();
        prop_assert_eq!(found.len(), 4, "{:?} vs {:?}", found, roots);
        for (f, r) in found.iter().zip(roots) {
            prop_assert!((f - r).abs() < 1e-7, "{} vs {}", f, r);
        }
    }
}
