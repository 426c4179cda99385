//! Finite-difference Beltrami coefficients, used as an independent check on
//! the closed-form dilatations.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeltramiSample {
    pub dz: Complex64,
    pub dz_bar: Complex64,
    pub mu: Complex64,
    pub k: f64,
    pub jacobian: f64,
}

/// Central differences with step `h` for `∂_z f` and `∂_z̄ f` at `z`.
pub fn beltrami_numeric<F>(f: F, z: Complex64, h: f64) -> Result<BeltramiSample>
where
    F: Fn(Complex64) -> Complex64,
{
    if !(h > 0.0) {
        return Err(Error::domain(format!("step {h} must be positive")));
    }
    let dx = Complex64::new(h, 0.0);
    let dy = Complex64::new(0.0, h);
    let fx = (f(z + dx) - f(z - dx)) / (2.0 * h);
    let fy = (f(z + dy) - f(z - dy)) / (2.0 * h);
    let i = Complex64::i();
    let dz = (fx - i * fy) * 0.5;
    let dz_bar = (fx + i * fy) * 0.5;
    let mu = dz_bar / dz;
    let jacobian = dz.norm_sqr() - dz_bar.norm_sqr();
    let mu_abs = mu.norm();
    if !(mu_abs < 1.0) {
        return Err(Error::NotOrientationPreserving {
            at: format!("{z}"),
            mu_abs,
        });
    }
    Ok(BeltramiSample {
        dz,
        dz_bar,
        mu,
        k: (1.0 + mu_abs) / (1.0 - mu_abs),
        jacobian,
    })
}

/// [`beltrami_numeric`] at steps `h` and `h/2`; refuses when the two
/// dilatations differ by more than `10 * tol` relative. Returns the `h/2`
/// sample.
pub fn beltrami_checked<F>(f: F, z: Complex64, h: f64, tol: f64) -> Result<BeltramiSample>
where
    F: Fn(Complex64) -> Complex64,
{
    let coarse = beltrami_numeric(&f, z, h)?;
    let fine = beltrami_numeric(&f, z, h / 2.0)?;
    if (coarse.k - fine.k).abs() > 10.0 * tol * fine.k {
        return Err(Error::FiniteDifferenceUnstable {
            k_h: coarse.k,
            k_half: fine.k,
        });
    }
    Ok(fine)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn identity_is_conformal() {
        let s = beltrami_numeric(|z| z, Complex64::new(0.3, -1.2), 1e-4).unwrap();
        assert_abs_diff_eq!(s.mu.norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.k, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.jacobian, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn vertical_stretch() {
        let f = |z: Complex64| Complex64::new(z.re, 2.0 * z.im);
        let s = beltrami_checked(f, Complex64::new(1.0, 1.0), 1e-3, 1e-8).unwrap();
        assert_abs_diff_eq!(s.mu.norm(), 1.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.k, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.jacobian, 2.0, epsilon = 1e-10);
    }

    #[test]
    fn orientation_reversal_is_an_error() {
        let r = beltrami_numeric(|z: Complex64| z.conj(), Complex64::new(0.5, 0.5), 1e-4);
        assert!(matches!(r, Err(Error::NotOrientationPreserving { .. })));
    }

    #[test]
    fn unstable_step_refused() {
        // kink at the origin: steps straddling it disagree
        let f = |z: Complex64| Complex64::new(z.re, z.im + 0.4 * z.re.abs());
        let r = beltrami_checked(f, Complex64::new(1e-4, 0.0), 1.5e-4, 1e-6);
        assert!(matches!(r, Err(Error::FiniteDifferenceUnstable { .. })));
    }
}
