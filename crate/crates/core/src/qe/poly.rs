//! Univariate real polynomials of degree at most four, with guaranteed real
//! root isolation.
//!
//! Roots are isolated by recursive monotone splitting: the critical points
//! (roots of the derivative, degree <= 3) partition the line into intervals
//! on which the polynomial is monotone, so each sign change brackets exactly
//! one simple root, found by bisection and one Newton polish step. Multiple
//! roots sit at critical points and are detected there directly, which
//! collapses multiplicities to single entries.

use crate::error::{Error, Result};

/// Leading coefficients below this magnitude are dropped before root
/// isolation; `w = 0` collapses several constraint terms to exact zeros and
/// rounding can leave residues of this size.
pub const TRIM_TOL: f64 = 1e-13;

/// Absolute accuracy of isolated roots after polishing.
pub const ROOT_TOL: f64 = 1e-12;

/// Coefficient list, lowest degree first, trimmed of negligible leading
/// coefficients. The zero polynomial has an empty list.
#[derive(Debug, Clone, PartialEq)]
pub struct UniPoly {
    coeffs: Vec<f64>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParam(
                "polynomial coefficients must be finite".into(),
            ));
        }
        while let Some(&last) = coeffs.last() {
            if last.abs() < TRIM_TOL {
                coeffs.pop();
            } else {
                break;
            }
        }
        Ok(UniPoly { coeffs })
    }

    pub fn from_slice(coeffs: &[f64]) -> Result<Self> {
        UniPoly::new(coeffs.to_vec())
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Degree after trimming; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> UniPoly {
        let coeffs: Vec<f64> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| i as f64 * c)
            .collect();
        // derivative of a trimmed polynomial never needs re-trimming beyond
        // the constructor's own rule
        UniPoly::new(coeffs).expect("finite coefficients stay finite")
    }

    pub fn negated(&self) -> UniPoly {
        UniPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    /// All real roots inside the open interval `(lo, hi)`, sorted ascending,
    /// multiplicities collapsed. Endpoints may be infinite.
    pub fn real_roots_in(&self, lo: f64, hi: f64) -> Result<Vec<f64>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if self.degree() > 4 {
            return Err(Error::DegreeTooHigh(self.degree()));
        }
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(Error::Domain(format!(
                "invalid root-isolation interval ({lo}, {hi})"
            )));
        }
        let mut roots = all_real_roots(&self.coeffs);
        roots.retain(|r| *r > lo && *r < hi);
        Ok(roots)
    }
}

/// Bound on the evaluation magnitude of the polynomial near `x`, used for
/// scale-aware zero tests.
fn eval_scale(coeffs: &[f64], x: f64) -> f64 {
    let ax = x.abs().max(1.0);
    let mut scale = 0.0;
    let mut pow = 1.0;
    for &c in coeffs {
        scale += c.abs() * pow;
        pow *= ax;
    }
    scale.max(f64::MIN_POSITIVE)
}

fn all_real_roots(coeffs: &[f64]) -> Vec<f64> {
    match coeffs.len() {
        0 | 1 => Vec::new(),
        2 => vec![-coeffs[0] / coeffs[1]],
        3 => quadratic_roots(coeffs[2], coeffs[1], coeffs[0]),
        _ => isolate_by_monotone_splitting(coeffs),
    }
}

/// Roots of `a x² + b x + c` with a scale-aware double-root collapse.
fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let disc = b * b - 4.0 * a * c;
    let scale = (b * b).max((4.0 * a * c).abs());
    let tol = 8.0 * f64::EPSILON * scale;
    if disc < -tol {
        return Vec::new();
    }
    if disc <= tol {
        return vec![-b / (2.0 * a)];
    }
    let q = -(b + disc.sqrt().copysign(b)) / 2.0;
    let (r1, r2) = if q == 0.0 {
        (0.0, 0.0)
    } else {
        (q / a, c / q)
    };
    let mut out = vec![r1.min(r2), r1.max(r2)];
    out.dedup();
    out
}

/// Degree 3 or 4: split the line at the critical points and bisect every
/// monotone interval with a sign change.
fn isolate_by_monotone_splitting(coeffs: &[f64]) -> Vec<f64> {
    let lead = *coeffs.last().expect("nonempty");
    let deg = coeffs.len() - 1;

    // Cauchy bound: all roots lie in [-radius, radius].
    let radius = 1.0
        + coeffs[..deg]
            .iter()
            .map(|c| (c / lead).abs())
            .fold(0.0, f64::max);

    let deriv: Vec<f64> = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| i as f64 * c)
        .collect();
    let mut breaks = all_real_roots(&deriv);
    breaks.retain(|x| x.abs() < radius);
    breaks.insert(0, -radius);
    breaks.push(radius);

    // signs at breakpoints; a critical value indistinguishable from zero is
    // a multiple root and counts as sign 0
    let signs: Vec<i8> = breaks
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            if k == 0 {
                let s = if lead > 0.0 { 1i8 } else { -1 };
                if deg % 2 == 0 {
                    s
                } else {
                    -s
                }
            } else if k == breaks.len() - 1 {
                if lead > 0.0 {
                    1
                } else {
                    -1
                }
            } else {
                let y = horner(coeffs, x);
                if y.abs() <= 4.0 * f64::EPSILON * eval_scale(coeffs, x) {
                    0
                } else if y > 0.0 {
                    1
                } else {
                    -1
                }
            }
        })
        .collect();

    let mut roots: Vec<f64> = Vec::new();
    for (k, (&x, &s)) in breaks.iter().zip(&signs).enumerate() {
        if k > 0 && k < breaks.len() - 1 && s == 0 {
            roots.push(x);
        }
    }
    for k in 0..breaks.len() - 1 {
        if signs[k] * signs[k + 1] < 0 {
            roots.push(bisect_and_polish(coeffs, &deriv, breaks[k], breaks[k + 1]));
        }
    }

    roots.sort_by(|a, b| a.partial_cmp(b).expect("finite roots"));
    collapse_close(&mut roots);
    roots
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn bisect_and_polish(coeffs: &[f64], deriv: &[f64], mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = horner(coeffs, lo);
    for _ in 0..90 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = horner(coeffs, mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_lo > 0.0) != (f_mid > 0.0) {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    let x = 0.5 * (lo + hi);
    // one Newton step sharpens the bisection estimate to full precision
    let dfx = horner(deriv, x);
    if dfx != 0.0 {
        let step = horner(coeffs, x) / dfx;
        if step.is_finite() && step.abs() <= (hi - lo).max(ROOT_TOL) {
            return x - step;
        }
    }
    x
}

fn collapse_close(roots: &mut Vec<f64>) {
    roots.dedup_by(|b, a| (*b - *a).abs() <= 1e-9 * b.abs().max(1.0));
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(coeffs: &[f64]) -> UniPoly {
        UniPoly::from_slice(coeffs).unwrap()
    }

    #[test]
    fn double_root_collapses() {
        // 49 c² - 168 c + 144 has a vanishing discriminant; double root 12/7
        let roots = poly(&[144.0, -168.0, 49.0])
            .real_roots_in(0.0, f64::INFINITY)
            .unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0] - 12.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn no_real_roots() {
        let roots = poly(&[1.0, 0.0, 1.0])
            .real_roots_in(f64::NEG_INFINITY, f64::INFINITY)
            .unwrap();
        assert!(roots.is_empty());
    }

    #[test]
    fn biquadratic_roots() {
        // 24 w⁴ - 168 w² + 144 = 24 (w² - 1)(w² - 6)
        let roots = poly(&[144.0, 0.0, -168.0, 0.0, 24.0])
            .real_roots_in(f64::NEG_INFINITY, f64::INFINITY)
            .unwrap();
        let expected = [-(6.0f64.sqrt()), -1.0, 1.0, 6.0f64.sqrt()];
        assert_eq!(roots.len(), 4);
        for (r, e) in roots.iter().zip(expected) {
            assert!((r - e).abs() < 1e-12, "root {r} vs {e}");
        }
    }

    #[test]
    fn domain_filters_roots() {
        let p = poly(&[144.0, 0.0, -168.0, 0.0, 24.0]);
        let roots = p.real_roots_in(0.0, 2.0).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cubic_with_triple_root() {
        // (x - 1)³ = x³ - 3x² + 3x - 1
        let roots = poly(&[-1.0, 3.0, -3.0, 1.0])
            .real_roots_in(f64::NEG_INFINITY, f64::INFINITY)
            .unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0] - 1.0).abs() < 1e-7);
    }

    #[test]
    fn quartic_with_double_and_simple_roots() {
        // (x - 1)² (x - 2)(x - 3)
        let roots = poly(&[6.0, -17.0, 17.0, -7.0, 1.0])
            .real_roots_in(f64::NEG_INFINITY, f64::INFINITY)
            .unwrap();
        assert_eq!(roots.len(), 3, "{roots:?}");
        for (r, e) in roots.iter().zip([1.0, 2.0, 3.0]) {
            assert!((r - e).abs() < 1e-7, "root {r} vs {e}");
        }
    }

    #[test]
    fn rejects_zero_and_high_degree() {
        let zero = poly(&[0.0, 0.0]);
        assert!(matches!(
            zero.real_roots_in(0.0, 1.0),
            Err(Error::ZeroPolynomial)
        ));
        let quintic = poly(&[1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        assert!(matches!(
            quintic.real_roots_in(0.0, 1.0),
            Err(Error::DegreeTooHigh(5))
        ));
    }

    #[test]
    fn trim_demotes_degenerate_leading_coefficients() {
        let p = poly(&[1.0, -2.0, 1e-14]);
        assert_eq!(p.degree(), 1);
        let roots = p.real_roots_in(f64::NEG_INFINITY, f64::INFINITY).unwrap();
        assert_eq!(roots, vec![0.5]);
    }

    #[test]
    fn close_simple_roots_stay_separate() {
        // (x - 1)(x - 1.001): genuinely distinct roots must not collapse
        let roots = poly(&[1.001, -2.001, 1.0])
            .real_roots_in(f64::NEG_INFINITY, f64::INFINITY)
            .unwrap();
        assert_eq!(roots.len(), 2);
    }
}
