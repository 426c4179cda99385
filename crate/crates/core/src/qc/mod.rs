//! Explicit quasiconformal maps between the annuli of two rays.
//!
//! For one half-cylinder with modulus ratio `M = m'/m` the map `F_t` is
//! built in three radial layers of the annulus `{δ(t) <= |z| < 1}`:
//!
//! * `δ <= |z| <= Δ`: [`LogAffineMap`], affine in `log z`, absorbing the
//!   modulus change and the leading coefficient `c` of the end map;
//! * `Δ <= |z| <= 2Δ`: [`BlendMap`], a radial blend from `c z` to the
//!   power series `c z + ψ(z)`;
//! * `2Δ <= |z| < 1`: the end map itself, known only through `K(h)`.
//!
//! `Δ(t) = δ(t)^{M^X}` for an exponent `X` chosen by [`choose_x`]. All
//! radii are handled as logarithms.

mod assemble;
mod beltrami;
mod cross_ratio;
mod interp;
mod node;
mod piecewise;
mod quasisymmetry;

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ray::log_inner_radius;

pub use assemble::{annuli_for_pair, assemble_f, assemble_f_with_offset, AnnulusAssembly, AnnulusSpec, FAssembly};
pub use beltrami::{beltrami_checked, beltrami_numeric, BeltramiSample};
pub use cross_ratio::{cross_ratio, ExtComplex};
pub use interp::{dilatation_p, eval_p, eval_q, BlendMap, LogAffineMap, PDilatation};
pub use node::{jacobian_dilatation, NodeCorrection, NodePiece};
pub use piecewise::{Piece, PieceMap, PiecewiseMap, PowerSeries, Region};
pub use quasisymmetry::{quasisymmetry_quotient, quasisymmetry_sup, QsResult, QsSearch};

/// Inner exponent used when `M = 1`, where `M^X` carries no information.
const UNIT_RATIO_INNER_EXPONENT: f64 = 0.5;

/// Exponent `X = 2B`, `B = log(ε'/(M+ε'-1)) / log M`, strictly below the
/// admissible bound `B < 0`.
pub fn choose_x(ratio: f64, eps: f64) -> Result<f64> {
    if !(ratio.is_finite() && ratio > 1.0) {
        return Err(Error::UseReciprocal(ratio));
    }
    check_eps(eps)?;
    Ok(2.0 * x_bound(ratio, eps))
}

fn x_bound(ratio: f64, eps: f64) -> f64 {
    (eps / (ratio + eps - 1.0)).ln() / ratio.ln()
}

/// Exponent for `M < 1`. With `N = 1/M` and `y = M^X` the limit dilatation
/// `N(1-y)/(1-Ny)` stays below `N + ε'` iff `y < ε'/(N(N+ε'-1))`; the same
/// factor-two rule is applied to that bound.
fn choose_x_reciprocal(ratio: f64, eps: f64) -> f64 {
    let n = 1.0 / ratio;
    let bound = (eps / (n * (n + eps - 1.0))).ln() / n.ln();
    -2.0 * bound
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::domain(format!("eps' = {eps} not in (0, 1)")));
    }
    Ok(())
}

/// Per-annulus data for the interpolating map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterpolationParams {
    /// `M = m'/m`.
    pub ratio: f64,
    /// `X`; unused when `M = 1`.
    pub exponent: f64,
    /// Leading coefficient `c` of the end map at the node.
    pub c: Complex64,
    /// Lift of `arg c` used for the twist; congruent to `arg c` mod 2π.
    pub twist: f64,
    /// Coefficients of `z^2, z^3, ...` in the tail `ψ`.
    pub psi: Vec<Complex64>,
    pub eps: f64,
    /// Base modulus `m` of the left cylinder.
    pub base_modulus: f64,
}

impl InterpolationParams {
    pub fn new(ratio: f64, base_modulus: f64, c: Complex64, psi: Vec<Complex64>, eps: f64) -> Result<Self> {
        if !(ratio.is_finite() && ratio > 0.0) {
            return Err(Error::domain(format!("modulus ratio {ratio} must be positive")));
        }
        if !(base_modulus.is_finite() && base_modulus > 0.0) {
            return Err(Error::domain(format!("base modulus {base_modulus} must be positive")));
        }
        if !(c.norm() > 0.0 && c.norm().is_finite()) {
            return Err(Error::domain("leading coefficient c must be nonzero"));
        }
        if psi.iter().any(|p| !(p.re.is_finite() && p.im.is_finite())) {
            return Err(Error::domain("tail coefficients must be finite"));
        }
        check_eps(eps)?;
        let exponent = if ratio > 1.0 {
            choose_x(ratio, eps)?
        } else if ratio < 1.0 {
            choose_x_reciprocal(ratio, eps)
        } else {
            0.0
        };
        Ok(InterpolationParams {
            ratio,
            exponent,
            c,
            twist: c.arg(),
            psi,
            eps,
            base_modulus,
        })
    }

    /// Identity data: `M = 1`, `c = 1`, `ψ = 0`.
    pub fn identity(base_modulus: f64, eps: f64) -> Result<Self> {
        Self::new(1.0, base_modulus, Complex64::new(1.0, 0.0), Vec::new(), eps)
    }

    /// Overrides `X`. Any negative `X` defines a valid map for `M > 1`;
    /// whether it also meets the strict bound is reported by
    /// [`exponent_within_bound`](Self::exponent_within_bound).
    pub fn with_exponent(mut self, x: f64) -> Result<Self> {
        if self.ratio > 1.0 {
            if !(x < 0.0) {
                return Err(Error::domain(format!("X = {x} must be negative when M > 1")));
            }
        } else if self.ratio < 1.0 && !(x > 1.0) {
            return Err(Error::domain(format!("X = {x} must exceed 1 when M < 1")));
        }
        self.exponent = x;
        Ok(self)
    }

    /// Sets the twist lift; it must agree with `arg c` modulo 2π.
    pub fn with_twist(mut self, twist: f64) -> Result<Self> {
        let diff = (twist - self.c.arg()) / TAU;
        if !twist.is_finite() || (diff - diff.round()).abs() > 1e-9 {
            return Err(Error::domain(format!(
                "twist {twist} is not a lift of arg c = {}",
                self.c.arg()
            )));
        }
        self.twist = twist;
        Ok(self)
    }

    /// `X < log(ε'/(M+ε'-1))/log M`, the condition under which the limit
    /// dilatation stays below `M + ε'`. Always true for `M <= 1`.
    pub fn exponent_within_bound(&self) -> bool {
        self.ratio <= 1.0 || self.exponent < x_bound(self.ratio, self.eps)
    }

    pub fn is_unit_ratio(&self) -> bool {
        self.ratio == 1.0
    }

    /// `M^X`, so that `log Δ = M^X log δ`.
    pub fn inner_exponent(&self) -> f64 {
        if self.is_unit_ratio() {
            UNIT_RATIO_INNER_EXPONENT
        } else {
            self.ratio.powf(self.exponent)
        }
    }

    pub fn log_c(&self) -> Complex64 {
        Complex64::new(self.c.norm().ln(), self.twist)
    }

    /// `log δ(t) = -e^{2t} m π`.
    pub fn log_delta(&self, t: f64) -> f64 {
        log_inner_radius(self.base_modulus, t)
    }

    /// `log Δ(t)`.
    pub fn log_outer(&self, t: f64) -> f64 {
        self.inner_exponent() * self.log_delta(t)
    }

    /// Limit of `K(P)` as `t → ∞`; `(M - M^X)/(1 - M^X)` for `M > 1`.
    pub fn limit_dilatation(&self) -> f64 {
        let e = self.inner_exponent();
        let a = (self.ratio - e) / (1.0 - e);
        a.max(1.0 / a)
    }
}

/// Smallest `t >= 0` with `δ(t)^M < |c| Δ(t)`, i.e.
/// `(M - M^X) log δ(t) < log |c|`. At the returned time the inequality is
/// an equality unless the result is 0.
pub fn threshold_time(params: &InterpolationParams) -> f64 {
    let gap = params.ratio - params.inner_exponent();
    let log_c = params.c.norm().ln();
    if gap <= 0.0 {
        return if log_c > 0.0 { 0.0 } else { f64::INFINITY };
    }
    // need e^{2t} > -log|c| / (gap m π)
    let rhs = -log_c / (gap * params.base_modulus * PI);
    if rhs <= 1.0 {
        0.0
    } else {
        0.5 * rhs.ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn choose_x_examples() {
        assert_abs_diff_eq!(choose_x(2.0, 0.5).unwrap(), -3.169_925_001_442_312_6, epsilon = 1e-12);
        assert_abs_diff_eq!(choose_x(1.0001, 0.5).unwrap(), -3.999_800_029_995_177, epsilon = 1e-9);
        for (m, e) in [(1.5, 0.1), (7.0, 0.3), (10.0, 0.49)] {
            let x = choose_x(m, e).unwrap();
            assert!(x < x_bound(m, e) && x_bound(m, e) < 0.0);
        }
        assert!(matches!(choose_x(1.0, 0.5), Err(Error::UseReciprocal(_))));
        assert!(matches!(choose_x(0.5, 0.5), Err(Error::UseReciprocal(_))));
        assert!(choose_x(2.0, 1.0).is_err());
    }

    #[test]
    fn reciprocal_exponent_keeps_strict_bound() {
        for m in [0.1, 0.5, 0.9, 0.999] {
            for eps in [0.01, 0.2, 0.5] {
                let p = InterpolationParams::new(m, 1.0, one(), vec![], eps).unwrap();
                assert!(p.exponent > 1.0);
                assert!(p.limit_dilatation() < 1.0 / m + eps);
            }
        }
    }

    #[test]
    fn threshold_examples() {
        let p = InterpolationParams::new(2.0, 1.0, one(), vec![], 0.5).unwrap();
        assert_eq!(threshold_time(&p), 0.0);
        for t in [0.0, 1.0, 2.0] {
            let lhs = (p.ratio - p.inner_exponent()) * p.log_delta(t);
            assert!(lhs < 0.0);
        }

        let c = Complex64::new((-10.0f64).exp(), 0.0);
        let p = InterpolationParams::new(2.0, 1.0, c, vec![], 0.5)
            .unwrap()
            .with_exponent(-1.0)
            .unwrap();
        let t = threshold_time(&p);
        assert_abs_diff_eq!(t, 0.376_195_049_518_240_6, epsilon = 1e-12);
        let holds = |t: f64| (p.ratio - p.inner_exponent()) * p.log_delta(t) < c.norm().ln();
        assert!(holds(t + 0.01));
        assert!(!holds(t - 0.01));

        let big = Complex64::new(1e300, 0.0);
        let p = InterpolationParams::new(2.0, 1.0, big, vec![], 0.5).unwrap();
        assert_eq!(threshold_time(&p), 0.0);
    }

    #[test]
    fn params_validation() {
        assert!(InterpolationParams::new(0.0, 1.0, one(), vec![], 0.5).is_err());
        assert!(InterpolationParams::new(2.0, 1.0, Complex64::new(0.0, 0.0), vec![], 0.5).is_err());
        assert!(InterpolationParams::new(2.0, 1.0, one(), vec![], 0.0).is_err());
        let p = InterpolationParams::new(2.0, 1.0, one(), vec![], 0.5).unwrap();
        assert!(p.exponent_within_bound());
        let loose = p.clone().with_exponent(-1.0).unwrap();
        assert!(!loose.exponent_within_bound());
        assert!(p.clone().with_exponent(0.5).is_err());
        assert!(p.clone().with_twist(TAU).is_ok());
        assert!(p.with_twist(1.0).is_err());
    }

    #[test]
    fn unit_ratio_is_identity_limit() {
        let p = InterpolationParams::identity(1.0, 0.1).unwrap();
        assert_eq!(p.limit_dilatation(), 1.0);
        assert_eq!(p.log_outer(0.0), 0.5 * p.log_delta(0.0));
    }
}
