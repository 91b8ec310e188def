//! The expected one-step Lyapunov difference as a quadratic form.
//!
//! For `V(z) = zᵀ P z` the conditional expectation of `V(z(t+1)) - V(z(t))`
//! given `z(t) = (x, v)` is itself a quadratic form in `(x, v)`. Its
//! coefficients are evaluated from the closed forms obtained by substituting
//! the first and second moments of the scaled drive; a Monte-Carlo estimator
//! over the actual drive distribution serves as an independent oracle.
//!
//! The cross coefficient is stored as the full `x·v` coefficient `e`, not
//! the half-coefficient of a symmetric-matrix representation.

use crate::error::{Error, Result};
use crate::model::{PMatrix, StateVec, SwarmParams, SystemVariant};
use crate::rng::TrialStream;

/// `q(x, v) = d·x² + e·x·v + a·v²`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadForm {
    /// coefficient of `x²`
    pub d: f64,
    /// coefficient of `x·v`
    pub e: f64,
    /// coefficient of `v²`
    pub a: f64,
}

impl QuadForm {
    pub fn eval(&self, z: StateVec) -> f64 {
        self.d * z.x * z.x + self.e * z.x * z.v + self.a * z.v * z.v
    }
}

/// Closed-form coefficients of `E{ΔV(z)}` for a concrete candidate `P`.
///
/// Positive definiteness of `P` is not required here; the decision layer
/// checks it separately.
pub fn expected_delta_v(params: &SwarmParams, p: &PMatrix) -> QuadForm {
    let (p1, p2, p3) = (p.p1, p.p2, p.p3);
    let w = params.w();
    let a = -p3 + (p1 + 2.0 * p2 + p3) * w * w;
    match *params {
        SwarmParams::Sigma1 { c, .. } => {
            let e = -2.0 * (p2 + w * ((-1.0 + c) * p1 + (-1.0 + 2.0 * c) * p2 + c * p3));
            let d = c / 6.0 * ((-12.0 + 7.0 * c) * p1 + 2.0 * (-6.0 + 7.0 * c) * p2 + 7.0 * c * p3);
            QuadForm { d, e, a }
        }
        SwarmParams::Sigma2 { c1, c2, .. } => {
            let s = c1 + c2;
            let e = -(2.0 * p2 + w * ((-2.0 + s) * p1 + 2.0 * (-1.0 + s) * p2 + s * p3));
            let d = s / 3.0 * ((-3.0 + s) * p1 - 3.0 * p2 + s * (2.0 * p2 + p3));
            QuadForm { d, e, a }
        }
    }
}

/// Monte-Carlo estimate of `E{V(Az + Bzr) - V(z)}` at a fixed state.
///
/// Draws `r` from the variant's actual drive distribution and returns the
/// sample mean and its standard error. Independent of the closed-form path,
/// so it can arbitrate transcription errors there.
pub fn mc_expected_delta_v(
    params: &SwarmParams,
    p: &PMatrix,
    z: StateVec,
    trials: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    if trials < 1000 {
        return Err(Error::InvalidParam(format!(
            "mc_expected_delta_v needs trials >= 1000, got {trials}"
        )));
    }
    let w = params.w();
    let v_now = p.quad(z);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for trial in 0..trials {
        let stream = TrialStream::new(seed, trial);
        let r = match params.variant() {
            SystemVariant::Sigma1 => {
                let (u1, u2) = stream.uniform_pair(0);
                u1 + u2
            }
            SystemVariant::Sigma2 => stream.uniform(0, 0),
        };
        let g = params.gain();
        let noise = -g * r * z.x;
        let z_next = StateVec::new(z.x + w * z.v + noise, w * z.v + noise);
        let dv = p.quad(z_next) - v_now;
        sum += dv;
        sum_sq += dv * dv;
    }
    let n = trials as f64;
    let mean = sum / n;
    let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    Ok((mean, (var / n).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PMatrix;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn closed_form_sigma1_identity() {
        let p = SwarmParams::sigma1(0.5, 0.0).unwrap();
        let q = expected_delta_v(&p, &PMatrix::identity());
        assert!(close(q.d, -5.0 / 12.0, 1e-15));
        assert_eq!(q.e, 0.0);
        assert_eq!(q.a, -1.0);
    }

    #[test]
    fn closed_form_sigma1_vanishing_gain() {
        let p = SwarmParams::sigma1(0.0, 0.0).unwrap();
        let q = expected_delta_v(&p, &PMatrix::identity());
        assert_eq!((q.d, q.e, q.a), (0.0, 0.0, -1.0));
    }

    #[test]
    fn closed_form_sigma2_identity() {
        let p = SwarmParams::sigma2(0.5, 0.5, 0.0).unwrap();
        let q = expected_delta_v(&p, &PMatrix::identity());
        assert!(close(q.d, -1.0 / 3.0, 1e-15));
        assert_eq!(q.e, 0.0);
        assert_eq!(q.a, -1.0);
    }

    #[test]
    fn quad_form_evaluation() {
        let q = QuadForm { d: -5.0 / 12.0, e: 0.0, a: -1.0 };
        assert!(close(q.eval(StateVec::new(1.0, 0.0)), -5.0 / 12.0, 1e-15));
        let q = QuadForm { d: 0.0, e: 0.0, a: -1.0 };
        assert_eq!(q.eval(StateVec::new(3.0, 2.0)), -4.0);
        let q = QuadForm { d: 1.0, e: 2.0, a: 1.0 };
        assert_eq!(q.eval(StateVec::new(1.0, 1.0)), 4.0);
    }

    #[test]
    fn linearity_in_p() {
        let params = SwarmParams::sigma1(1.7, -0.6).unwrap();
        let p = PMatrix::new(0.8, -0.3, 1.9);
        for beta in [0.001, 0.5, 3.0, 1e3] {
            let q1 = expected_delta_v(&params, &p.scaled(beta));
            let q0 = expected_delta_v(&params, &p);
            assert!(close(q1.d, beta * q0.d, 1e-12 * (1.0 + (beta * q0.d).abs())));
            assert!(close(q1.e, beta * q0.e, 1e-12 * (1.0 + (beta * q0.e).abs())));
            assert!(close(q1.a, beta * q0.a, 1e-12 * (1.0 + (beta * q0.a).abs())));
        }
    }

    #[test]
    fn w_parity_with_zero_off_diagonal() {
        for (c, w) in [(0.5, 0.3), (1.2, 0.9), (2.0, 0.05)] {
            let p = PMatrix::new(1.4, 0.0, 0.7);
            let plus = expected_delta_v(&SwarmParams::sigma1(c, w).unwrap(), &p);
            let minus = expected_delta_v(&SwarmParams::sigma1(c, -w).unwrap(), &p);
            assert_eq!(plus.a, minus.a);
            assert_eq!(plus.d, minus.d);
            assert_eq!(plus.e, -minus.e);
        }
    }

    #[test]
    fn zero_gain_limit_matches_direct_substitution() {
        // At c = 0 (or s = 0) the stochastic part vanishes:
        // d = 0 and e = -2 p2 + 2 w (p1 + p2) for both variants.
        let p = PMatrix::new(1.3, -0.4, 0.9);
        for (params, tag) in [
            (SwarmParams::sigma1(0.0, 0.7).unwrap(), "sigma1"),
            (SwarmParams::sigma2(0.0, 0.0, 0.7).unwrap(), "sigma2"),
        ] {
            let q = expected_delta_v(&params, &p);
            let w = 0.7;
            let e_direct = -2.0 * p.p2 + 2.0 * w * (p.p1 + p.p2);
            assert_eq!(q.d, 0.0, "{tag}");
            assert!(close(q.e, e_direct, 1e-15), "{tag}");
            let a_direct = -p.p3 + (p.p1 + 2.0 * p.p2 + p.p3) * w * w;
            assert!(close(q.a, a_direct, 1e-15), "{tag}");
        }
    }

    #[test]
    fn mc_matches_closed_form_sigma1() {
        let params = SwarmParams::sigma1(0.5, 0.0).unwrap();
        let z = StateVec::new(1.0, 0.0);
        let (mean, stderr) =
            mc_expected_delta_v(&params, &PMatrix::identity(), z, 1_000_000, 11).unwrap();
        assert!((mean - (-5.0 / 12.0)).abs() <= 4.0 * stderr, "mean={mean} stderr={stderr}");
    }

    #[test]
    fn mc_matches_closed_form_sigma2() {
        let params = SwarmParams::sigma2(0.5, 0.5, 0.0).unwrap();
        let z = StateVec::new(1.0, 0.0);
        let (mean, stderr) =
            mc_expected_delta_v(&params, &PMatrix::identity(), z, 1_000_000, 12).unwrap();
        assert!((mean - (-1.0 / 3.0)).abs() <= 4.0 * stderr, "mean={mean} stderr={stderr}");
    }

    #[test]
    fn mc_at_equilibrium_is_exactly_zero() {
        let params = SwarmParams::sigma1(1.0, 0.5).unwrap();
        let (mean, stderr) =
            mc_expected_delta_v(&params, &PMatrix::identity(), StateVec::new(0.0, 0.0), 1000, 1)
                .unwrap();
        assert_eq!(mean, 0.0);
        assert_eq!(stderr, 0.0);
    }

    #[test]
    fn mc_rejects_too_few_trials() {
        let params = SwarmParams::sigma1(1.0, 0.5).unwrap();
        assert!(mc_expected_delta_v(
            &params,
            &PMatrix::identity(),
            StateVec::new(1.0, 1.0),
            999,
            1
        )
        .is_err());
    }
}
