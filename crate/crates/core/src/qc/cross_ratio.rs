use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtComplex {
    Finite(Complex64),
    Infinity,
}

impl From<Complex64> for ExtComplex {
    fn from(z: Complex64) -> Self {
        ExtComplex::Finite(z)
    }
}

impl From<f64> for ExtComplex {
    fn from(x: f64) -> Self {
        ExtComplex::Finite(Complex64::new(x, 0.0))
    }
}

fn ratio(num: Complex64, den: Complex64) -> Result<Complex64> {
    if den == Complex64::new(0.0, 0.0) {
        return Err(Error::UndefinedCrossRatio("zero denominator"));
    }
    Ok(num / den)
}

/// `(z1, z2, z3, z4) = (z1 - z2)/(z1 - z3) · (z3 - z4)/(z2 - z4)`.
///
/// A point at infinity cancels within the factor pair containing it:
/// the pair tends to `1` for `z1` or `z4` and to `-1` for `z2` or `z3`.
pub fn cross_ratio(z1: ExtComplex, z2: ExtComplex, z3: ExtComplex, z4: ExtComplex) -> Result<Complex64> {
    use ExtComplex::{Finite as F, Infinity as Inf};
    match (z1, z2, z3, z4) {
        (F(a), F(b), F(c), F(d)) => Ok(ratio(a - b, a - c)? * ratio(c - d, b - d)?),
        (Inf, F(b), F(c), F(d)) => ratio(c - d, b - d),
        (F(a), Inf, F(c), F(d)) => Ok(-ratio(c - d, a - c)?),
        (F(a), F(b), Inf, F(d)) => Ok(-ratio(a - b, b - d)?),
        (F(a), F(b), F(c), Inf) => ratio(a - b, a - c),
        _ => Err(Error::UndefinedCrossRatio("more than one point at infinity")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> ExtComplex {
        ExtComplex::Finite(Complex64::new(re, im))
    }

    fn mobius(z: ExtComplex, a: Complex64, b: Complex64, cc: Complex64, d: Complex64) -> ExtComplex {
        match z {
            ExtComplex::Finite(z) => {
                let den = cc * z + d;
                if den.norm() == 0.0 {
                    ExtComplex::Infinity
                } else {
                    ExtComplex::Finite((a * z + b) / den)
                }
            }
            ExtComplex::Infinity => {
                if cc.norm() == 0.0 {
                    ExtComplex::Infinity
                } else {
                    ExtComplex::Finite(a / cc)
                }
            }
        }
    }

    #[test]
    fn infinity_limit_rule() {
        let z = Complex64::new(0.3, 1.7);
        let v = cross_ratio(z.into(), 0.0.into(), 1.0.into(), ExtComplex::Infinity).unwrap();
        let expected = z / (z - 1.0);
        assert_abs_diff_eq!((v - expected).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn infinity_agrees_with_large_finite_point() {
        let pts = [c(0.2, 0.1), c(-1.0, 0.5), c(2.0, -0.3), c(0.7, 0.7)];
        let big = c(1e9, 3e8);
        for slot in 0..4 {
            let mut with_inf = pts;
            with_inf[slot] = ExtComplex::Infinity;
            let mut with_big = pts;
            with_big[slot] = big;
            let a = cross_ratio(with_inf[0], with_inf[1], with_inf[2], with_inf[3]).unwrap();
            let b = cross_ratio(with_big[0], with_big[1], with_big[2], with_big[3]).unwrap();
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-7);
        }
    }

    #[test]
    fn affine_invariance() {
        let q = [c(0.2, 0.1), c(-1.0, 0.5), c(2.0, -0.3), c(0.7, 0.7)];
        let f = |z: ExtComplex| match z {
            ExtComplex::Finite(z) => ExtComplex::Finite(2.0 * z + 3.0),
            inf => inf,
        };
        let a = cross_ratio(q[0], q[1], q[2], q[3]).unwrap();
        let b = cross_ratio(f(q[0]), f(q[1]), f(q[2]), f(q[3])).unwrap();
        assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn mobius_invariance_through_infinity() {
        let (a, b, cc, d) = (
            Complex64::new(1.0, 2.0),
            Complex64::new(-0.5, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(-2.0, 0.0),
        );
        // z = 2 is sent to infinity
        let q = [c(2.0, 0.0), c(-1.0, 0.5), c(0.3, -0.3), c(0.7, 0.7)];
        let img: Vec<ExtComplex> = q.iter().map(|&z| mobius(z, a, b, cc, d)).collect();
        assert_eq!(img[0], ExtComplex::Infinity);
        let x = cross_ratio(q[0], q[1], q[2], q[3]).unwrap();
        let y = cross_ratio(img[0], img[1], img[2], img[3]).unwrap();
        assert_abs_diff_eq!((x - y).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn quasisymmetry_sign_convention() {
        let (x, t) = (0.4, 1.3);
        let f = |v: f64| v * v * v + v;
        let v = cross_ratio(f(x).into(), f(x + t).into(), f(x - t).into(), ExtComplex::Infinity).unwrap();
        let quotient = (f(x + t) - f(x)) / (f(x) - f(x - t));
        assert_abs_diff_eq!(v.re, -quotient, epsilon = 1e-14);
        assert_eq!(v.im, 0.0);
        let plain = cross_ratio(x.into(), (x + t).into(), (x - t).into(), ExtComplex::Infinity).unwrap();
        assert_abs_diff_eq!(plain.re, -1.0, epsilon = 1e-15);
    }

    #[test]
    fn degenerate_quadruples() {
        assert!(cross_ratio(c(1.0, 0.0), c(2.0, 0.0), c(1.0, 0.0), c(3.0, 0.0)).is_err());
        assert!(cross_ratio(ExtComplex::Infinity, c(2.0, 0.0), c(1.0, 0.0), ExtComplex::Infinity).is_err());
    }
}
