//! System formulations of PSO under stagnation, their parameters, the
//! moments of the random drive, and the Lyapunov candidate family.
//!
//! Everything is expressed in shifted coordinates `z = (x - p, v)` with the
//! stagnant best position `p` translated to the origin, which removes the
//! input term of the update. The one-particle, one-dimensional dynamics then
//! read `z(t+1) = A z(t) + B z(t) r(t)` with multiplicative uniform noise
//! `r(t)`. Two formulations are kept apart because they drive the recursion
//! with differently aggregated random variables and therefore have different
//! second moments:
//!
//! * `Sigma1`: a common coefficient `c` scales the sum of two independent
//!   uniforms, `r = r1 + r2`.
//! * `Sigma2`: separate coefficients `c1`, `c2` scale one shared uniform, so
//!   only the sum `s = c1 + c2` enters the dynamics.

use crate::error::{Error, Result};

/// The two system formulations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SystemVariant {
    Sigma1,
    Sigma2,
}

impl SystemVariant {
    pub fn label(&self) -> &'static str {
        match self {
            SystemVariant::Sigma1 => "sigma1",
            SystemVariant::Sigma2 => "sigma2",
        }
    }
}

/// One analysis point: inertia weight plus acceleration coefficients.
///
/// Construction checks finiteness and nonnegativity only, so limiting cases
/// such as `c = 0` stay expressible for simulation and for the vanishing
/// stochastic-part checks. Operations that require a genuinely stochastic
/// system (`build_system`, the membership deciders, region predicates)
/// additionally demand a strictly positive gain, and region predicates
/// demand `w` inside `(-1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SwarmParams {
    /// Common coefficient, summed uniform drive.
    Sigma1 { c: f64, w: f64 },
    /// Separate coefficients, single shared uniform drive.
    Sigma2 { c1: f64, c2: f64, w: f64 },
}

impl SwarmParams {
    pub fn sigma1(c: f64, w: f64) -> Result<Self> {
        if !c.is_finite() || !w.is_finite() {
            return Err(Error::InvalidParam("sigma1 params must be finite".into()));
        }
        if c < 0.0 {
            return Err(Error::InvalidParam(format!("c must be >= 0, got {c}")));
        }
        Ok(SwarmParams::Sigma1 { c, w })
    }

    pub fn sigma2(c1: f64, c2: f64, w: f64) -> Result<Self> {
        if !c1.is_finite() || !c2.is_finite() || !w.is_finite() {
            return Err(Error::InvalidParam("sigma2 params must be finite".into()));
        }
        if c1 < 0.0 || c2 < 0.0 {
            return Err(Error::InvalidParam(format!(
                "c1, c2 must be >= 0, got ({c1}, {c2})"
            )));
        }
        Ok(SwarmParams::Sigma2 { c1, c2, w })
    }

    pub fn variant(&self) -> SystemVariant {
        match self {
            SwarmParams::Sigma1 { .. } => SystemVariant::Sigma1,
            SwarmParams::Sigma2 { .. } => SystemVariant::Sigma2,
        }
    }

    pub fn w(&self) -> f64 {
        match *self {
            SwarmParams::Sigma1 { w, .. } | SwarmParams::Sigma2 { w, .. } => w,
        }
    }

    /// Magnitude of the stochastic gain in `B`: `c` for Σ1, `c1 + c2` for Σ2.
    pub fn gain(&self) -> f64 {
        match *self {
            SwarmParams::Sigma1 { c, .. } => c,
            SwarmParams::Sigma2 { c1, c2, .. } => c1 + c2,
        }
    }

    pub(crate) fn require_positive_gain(&self) -> Result<()> {
        if self.gain() > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidParam(match self.variant() {
                SystemVariant::Sigma1 => "c must be > 0".into(),
                SystemVariant::Sigma2 => "c1 + c2 must be > 0".into(),
            }))
        }
    }
}

/// How the scalar drive `r(t)` is distributed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriveKind {
    /// `r = r1 + r2`, both uniform on [0, 1].
    SumOfTwoUniforms,
    /// One uniform on [0, 1].
    SingleUniform,
}

/// The matrices of `z(t+1) = A z(t) + B z(t) r(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemMatrices {
    pub a: [[f64; 2]; 2],
    pub b: [[f64; 2]; 2],
    pub drive: DriveKind,
}

/// Exact transcription of the Σ1/Σ2 matrix definitions.
pub fn build_system(params: &SwarmParams) -> Result<SystemMatrices> {
    params.require_positive_gain()?;
    let w = params.w();
    let g = params.gain();
    Ok(SystemMatrices {
        a: [[1.0, w], [0.0, w]],
        b: [[-g, 0.0], [-g, 0.0]],
        drive: match params.variant() {
            SystemVariant::Sigma1 => DriveKind::SumOfTwoUniforms,
            SystemVariant::Sigma2 => DriveKind::SingleUniform,
        },
    })
}

/// State in shifted coordinates: position offset from the stagnant best, and
/// velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVec {
    pub x: f64,
    pub v: f64,
}

impl StateVec {
    pub fn new(x: f64, v: f64) -> Self {
        StateVec { x, v }
    }

    pub fn norm_sq(&self) -> f64 {
        self.x * self.x + self.v * self.v
    }
}

/// First and second moment of the scaled drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub m1: f64,
    pub m2: f64,
}

/// Moments of the scaled drive entering the expected Lyapunov difference.
///
/// Σ1: `E{c r} = c` and `E{c² r²} = 7c²/6` for `r = r1 + r2`.
/// Σ2: `E{s r} = s/2` and `E{s² r²} = s²/3` for a single uniform, `s = c1 + c2`.
pub fn scaled_moments(params: &SwarmParams) -> Moments {
    match *params {
        SwarmParams::Sigma1 { c, .. } => Moments {
            m1: c,
            m2: 7.0 * c * c / 6.0,
        },
        SwarmParams::Sigma2 { c1, c2, .. } => {
            let s = c1 + c2;
            Moments {
                m1: s / 2.0,
                m2: s * s / 3.0,
            }
        }
    }
}

/// Symmetric 2x2 Lyapunov candidate `P = [[p1, p2], [p2, p3]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PMatrix {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
}

impl PMatrix {
    pub fn new(p1: f64, p2: f64, p3: f64) -> Self {
        PMatrix { p1, p2, p3 }
    }

    pub fn identity() -> Self {
        PMatrix::new(1.0, 0.0, 1.0)
    }

    pub fn scaled(&self, beta: f64) -> Self {
        PMatrix::new(beta * self.p1, beta * self.p2, beta * self.p3)
    }

    /// Sylvester slacks `(p1, p1 p3 - p2²)`; both must be strictly positive
    /// for positive definiteness.
    pub fn sylvester_margins(&self) -> (f64, f64) {
        (self.p1, self.p1 * self.p3 - self.p2 * self.p2)
    }

    /// Strict Sylvester criterion: `p1 > 0` and `p1 p3 - p2² > 0`.
    pub fn is_positive_definite(&self) -> bool {
        let (m1, m2) = self.sylvester_margins();
        m1 > 0.0 && m2 > 0.0
    }

    /// `zᵀ P z`
    pub fn quad(&self, z: StateVec) -> f64 {
        self.p1 * z.x * z.x + 2.0 * self.p2 * z.x * z.v + self.p3 * z.v * z.v
    }
}

/// Candidate families for the membership decision.
///
/// The free families are normalized: scaling `P` by any positive factor does
/// not change the strict-sign conditions, so one diagonal entry can be pinned
/// to 1 without loss of generality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PTemplate {
    /// `P = I`; nothing is quantified.
    Identity,
    /// `p1 = 1, p2 = 0`, `p3 > 0` quantified.
    DiagonalFree,
    /// `p1 = p3 = 1`, `p2 ∈ (-1, 1)` quantified.
    OffDiagFree,
    /// A concrete candidate. Witnesses returned by the deciders are always
    /// positive-definite; arbitrary explicit candidates are decided, not
    /// rejected.
    Explicit(PMatrix),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_system_sigma1_transcription() {
        let p = SwarmParams::sigma1(1.0, 0.5).unwrap();
        let m = build_system(&p).unwrap();
        assert_eq!(m.a, [[1.0, 0.5], [0.0, 0.5]]);
        assert_eq!(m.b, [[-1.0, 0.0], [-1.0, 0.0]]);
        assert_eq!(m.drive, DriveKind::SumOfTwoUniforms);
    }

    #[test]
    fn build_system_sigma2_transcription() {
        let p = SwarmParams::sigma2(1.0, 1.0, 0.0).unwrap();
        let m = build_system(&p).unwrap();
        assert_eq!(m.a, [[1.0, 0.0], [0.0, 0.0]]);
        assert_eq!(m.b, [[-2.0, 0.0], [-2.0, 0.0]]);
        assert_eq!(m.drive, DriveKind::SingleUniform);
    }

    #[test]
    fn build_system_rejects_zero_gain() {
        let p = SwarmParams::sigma1(0.0, 0.5).unwrap();
        assert!(build_system(&p).is_err());
        let p = SwarmParams::sigma2(0.0, 0.0, 0.5).unwrap();
        assert!(build_system(&p).is_err());
    }

    #[test]
    fn params_reject_nonfinite_and_negative() {
        assert!(SwarmParams::sigma1(f64::NAN, 0.0).is_err());
        assert!(SwarmParams::sigma1(1.0, f64::INFINITY).is_err());
        assert!(SwarmParams::sigma1(-0.5, 0.0).is_err());
        assert!(SwarmParams::sigma2(-1.0, 2.0, 0.0).is_err());
    }

    #[test]
    fn moments_sigma1() {
        let m = scaled_moments(&SwarmParams::sigma1(1.0, 0.0).unwrap());
        assert_eq!(m.m1, 1.0);
        assert_eq!(m.m2, 7.0 / 6.0);
    }

    #[test]
    fn moments_sigma2() {
        let m = scaled_moments(&SwarmParams::sigma2(1.0, 1.0, 0.0).unwrap());
        assert_eq!(m.m1, 1.0);
        assert_eq!(m.m2, 4.0 / 3.0);

        let m = scaled_moments(&SwarmParams::sigma2(0.5, 0.5, 0.0).unwrap());
        assert_eq!(m.m1, 0.5);
        assert!((m.m2 - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn variance_of_scaled_drive_is_nonnegative() {
        for i in 0..200 {
            let c = 0.01 + 0.05 * i as f64;
            let m = scaled_moments(&SwarmParams::sigma1(c, 0.0).unwrap());
            assert!(m.m2 - m.m1 * m.m1 >= -1e-12);
            let m = scaled_moments(&SwarmParams::sigma2(0.7 * c, 0.3 * c, 0.0).unwrap());
            assert!(m.m2 - m.m1 * m.m1 >= -1e-12);
        }
    }

    #[test]
    fn same_matrices_different_moments_for_matched_gain() {
        // With c = c1 + c2 = s the matrices coincide but the second moments
        // differ: 7s²/6 vs s²/3. The formulations are not equivalent.
        let s = 1.3;
        let p1 = SwarmParams::sigma1(s, 0.4).unwrap();
        let p2 = SwarmParams::sigma2(0.8, 0.5, 0.4).unwrap();
        let m1 = build_system(&p1).unwrap();
        let m2 = build_system(&p2).unwrap();
        assert_eq!(m1.a, m2.a);
        assert_eq!(m1.b, m2.b);
        let mo1 = scaled_moments(&p1);
        let mo2 = scaled_moments(&p2);
        assert!((mo1.m2 - 7.0 * s * s / 6.0).abs() < 1e-15);
        assert!((mo2.m2 - s * s / 3.0).abs() < 1e-15);
        assert!(mo1.m2 != mo2.m2);
    }

    #[test]
    fn sylvester_criterion() {
        assert!(PMatrix::new(1.0, 0.0, 1.0).is_positive_definite());
        assert!(!PMatrix::new(1.0, 2.0, 1.0).is_positive_definite());
        assert!(PMatrix::new(2.0, 1.0, 1.0).is_positive_definite());
        // boundary: zero determinant is not strictly definite
        assert!(!PMatrix::new(1.0, 1.0, 1.0).is_positive_definite());
        assert!(!PMatrix::new(0.0, 0.0, 1.0).is_positive_definite());
    }
}
