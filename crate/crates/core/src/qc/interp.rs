use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::InterpolationParams;
use crate::error::{Error, Result};

/// Relative slack for radius-domain checks.
const RADIUS_TOL: f64 = 1e-12;

fn log_radius_in(s: f64, lo: f64, hi: f64) -> bool {
    let slack = RADIUS_TOL * lo.abs().max(hi.abs()).max(1.0);
    s >= lo - slack && s <= hi + slack
}

/// The inner layer `δ <= |z| <= Δ`. In `w = log z` it is the affine map
/// `w ↦ κ + a Re(w) + i Im(w)`; it sends `|z| = δ` to radius `δ^M` with
/// no rotation and `|z| = Δ` onto `c z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogAffineMap {
    pub log_inner: f64,
    pub log_outer: f64,
    pub slope: Complex64,
    pub offset: Complex64,
}

impl LogAffineMap {
    pub fn new(params: &InterpolationParams, t: f64) -> Result<Self> {
        let e = params.inner_exponent();
        let log_inner = params.log_delta(t);
        let log_outer = e * log_inner;
        let width = log_outer - log_inner;
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::SingularConfiguration(format!(
                "empty layer: log δ = {log_inner}, log Δ = {log_outer}"
            )));
        }
        let beta = (1.0 - params.ratio) / (1.0 - e);
        let log_c = params.log_c();
        let slope = Complex64::new(1.0 - beta, 0.0) + log_c / width;
        let offset = Complex64::new(beta * log_outer, 0.0) + log_c / (1.0 - e);
        Ok(LogAffineMap {
            log_inner,
            log_outer,
            slope,
            offset,
        })
    }

    /// Image of `w = log z`, as a logarithm.
    pub fn eval_log(&self, w: Complex64) -> Result<Complex64> {
        if !log_radius_in(w.re, self.log_inner, self.log_outer) {
            return Err(Error::domain(format!(
                "log|z| = {} outside [{}, {}]",
                w.re, self.log_inner, self.log_outer
            )));
        }
        Ok(self.eval_log_unchecked(w))
    }

    pub fn eval_log_unchecked(&self, w: Complex64) -> Complex64 {
        self.offset + self.slope * w.re + Complex64::new(0.0, w.im)
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let r = z.norm();
        if r == 0.0 {
            return Err(Error::domain("z = 0 is outside the annulus"));
        }
        self.eval_log(Complex64::new(r.ln(), 0.0))?;
        Ok(self.eval_unchecked(z))
    }

    pub fn eval_unchecked(&self, z: Complex64) -> Complex64 {
        let r = z.norm();
        let v = self.offset + self.slope * r.ln();
        // exp(v) * (z / |z|), without forming arg z
        Complex64::from_polar(v.re.exp(), v.im) * (z / r)
    }

    /// Beltrami coefficient in log coordinates, constant on the layer.
    pub fn beltrami(&self) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        (self.slope - one) / (self.slope + one)
    }

    pub fn dilatation(&self) -> f64 {
        let one = Complex64::new(1.0, 0.0);
        let (p, q) = ((self.slope + one).norm(), (self.slope - one).norm());
        (p + q) / (p - q)
    }
}

/// `P(z)` for `δ(t) <= |z| <= Δ(t)`.
pub fn eval_p(params: &InterpolationParams, t: f64, z: Complex64) -> Result<Complex64> {
    LogAffineMap::new(params, t)?.eval(z)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PDilatation {
    pub value: f64,
    pub limit: f64,
}

fn dilatation_from(u: Complex64) -> Result<f64> {
    let (p, q) = ((u + 1.0).norm(), u.norm());
    if !(p - q > 0.0) {
        return Err(Error::SingularConfiguration(format!(
            "|u + 1| = {p} does not exceed |u| = {q}"
        )));
    }
    Ok((p + q) / (p - q))
}

/// Closed-form maximal dilatation of `P`,
/// `(|u+1| + |u|) / (|u+1| - |u|)` with
/// `u = log c / (2 (M^X - 1) log δ(t)) + α/2`, `α = -(1-M)/(1-M^X)`,
/// and its `t → ∞` limit.
pub fn dilatation_p(params: &InterpolationParams, t: f64) -> Result<PDilatation> {
    let e = params.inner_exponent();
    let alpha = -(1.0 - params.ratio) / (1.0 - e);
    let log_delta = params.log_delta(t);
    let u = params.log_c() / (2.0 * (e - 1.0) * log_delta) + alpha / 2.0;
    let value = dilatation_from(u)?;
    let limit = dilatation_from(Complex64::new(alpha / 2.0, 0.0))?;
    Ok(PDilatation { value, limit })
}

/// The middle layer `Δ <= |z| <= 2Δ`:
/// `Q(z) = c z + (|z|/Δ - 1) ψ(z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlendMap {
    pub c: Complex64,
    pub psi: Vec<Complex64>,
    pub log_delta: f64,
}

impl BlendMap {
    pub fn new(c: Complex64, psi: Vec<Complex64>, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::domain(format!("Δ = {delta} must be positive")));
        }
        Ok(BlendMap {
            c,
            psi,
            log_delta: delta.ln(),
        })
    }

    pub fn from_params(params: &InterpolationParams, t: f64) -> Self {
        BlendMap {
            c: params.c,
            psi: params.psi.clone(),
            log_delta: params.log_outer(t),
        }
    }

    pub fn delta(&self) -> f64 {
        self.log_delta.exp()
    }

    /// `ψ(z)`.
    pub fn tail(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for coef in self.psi.iter().rev() {
            acc = (acc + coef) * z;
        }
        acc * z
    }

    fn tail_derivative(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, coef) in self.psi.iter().enumerate().rev() {
            acc = acc * z + coef * (i + 2) as f64;
        }
        acc * z
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let s = z.norm().ln();
        if !log_radius_in(s, self.log_delta, self.log_delta + std::f64::consts::LN_2) {
            return Err(Error::domain(format!(
                "|z| = {} outside [Δ, 2Δ] with Δ = {}",
                z.norm(),
                self.delta()
            )));
        }
        Ok(self.eval_unchecked(z))
    }

    pub fn eval_unchecked(&self, z: Complex64) -> Complex64 {
        let phi = z.norm() / self.delta() - 1.0;
        self.c * z + self.tail(z) * phi
    }

    /// `(∂_z Q, ∂_z̄ Q)` from the closed-form partial derivatives,
    /// `∂_z̄ Q = e^{i arg z} ψ / (2Δ)` and
    /// `∂_z Q = c + e^{-i arg z} ψ / (2Δ) + φ ψ'`.
    pub fn derivatives(&self, z: Complex64) -> (Complex64, Complex64) {
        let delta = self.delta();
        let unit = z / z.norm();
        let psi = self.tail(z);
        let phi = z.norm() / delta - 1.0;
        let dzb = unit * psi / (2.0 * delta);
        let dz = self.c + unit.conj() * psi / (2.0 * delta) + self.tail_derivative(z) * phi;
        (dz, dzb)
    }

    /// Same derivatives at `z = Δ ζ`, `1 <= |ζ| <= 2`, evaluated without
    /// forming `Δ` so that underflowing layers stay exact.
    pub fn derivatives_scaled(&self, zeta: Complex64) -> (Complex64, Complex64) {
        let mut psi_over_delta = Complex64::new(0.0, 0.0);
        let mut dpsi = Complex64::new(0.0, 0.0);
        for (i, coef) in self.psi.iter().enumerate() {
            let p = i as i32 + 2;
            let scale = ((p - 1) as f64 * self.log_delta).exp();
            psi_over_delta += coef * scale * zeta.powi(p);
            dpsi += coef * (p as f64) * scale * zeta.powi(p - 1);
        }
        let unit = zeta / zeta.norm();
        let phi = zeta.norm() - 1.0;
        let dzb = unit * psi_over_delta / 2.0;
        let dz = self.c + unit.conj() * psi_over_delta / 2.0 + dpsi * phi;
        (dz, dzb)
    }

    pub fn dilatation_scaled(&self, zeta: Complex64) -> Result<f64> {
        let (dz, dzb) = self.derivatives_scaled(zeta);
        let mu = dzb.norm() / dz.norm();
        if !(mu < 1.0) {
            return Err(Error::NotOrientationPreserving {
                at: format!("z = Δ·{zeta}"),
                mu_abs: mu,
            });
        }
        Ok((1.0 + mu) / (1.0 - mu))
    }

    /// Supremum of the pointwise dilatation over an `n_r × n_theta` polar
    /// sample of the closed layer. `theta_offset` rotates the angular grid.
    pub fn sup_dilatation(&self, n_r: usize, n_theta: usize, theta_offset: f64) -> Result<f64> {
        let n_r = n_r.max(2);
        let mut sup: f64 = 1.0;
        for i in 0..n_r {
            let rho = 1.0 + i as f64 / (n_r - 1) as f64;
            for k in 0..n_theta {
                let theta = theta_offset + std::f64::consts::TAU * k as f64 / n_theta as f64;
                sup = sup.max(self.dilatation_scaled(Complex64::from_polar(rho, theta))?);
            }
        }
        Ok(sup)
    }

    /// `C = max_{|z| = 2Δ} |ψ(z)| / Δ²`, sampled at `n_theta` angles, so
    /// that `|ψ| <= C Δ²` on the layer.
    pub fn tail_constant(&self, n_theta: usize) -> f64 {
        (0..n_theta)
            .map(|k| {
                let zeta = Complex64::from_polar(2.0, std::f64::consts::TAU * k as f64 / n_theta as f64);
                let mut v = Complex64::new(0.0, 0.0);
                for (i, coef) in self.psi.iter().enumerate() {
                    let p = i as i32 + 2;
                    v += coef * ((p - 2) as f64 * self.log_delta).exp() * zeta.powi(p);
                }
                v.norm()
            })
            .fold(0.0, f64::max)
    }
}

/// `Q(z)` for `Δ(t) <= |z| <= 2Δ(t)`.
pub fn eval_q(params: &InterpolationParams, t: f64, z: Complex64) -> Result<Complex64> {
    BlendMap::from_params(params, t).eval(z)
}
