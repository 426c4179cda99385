//! Numerical supremum of the quasisymmetry quotient
//! `(f(x+t) - f(x)) / (f(x) - f(x-t))` of an increasing map of the line.
//!
//! This is a numerical sup over a grid plus local refinement, not a
//! certified bound. Sample points are rounded to 20 significant bits so
//! that `x ± t` is exact over the default search box; then affine maps
//! with short dyadic coefficients give exactly 1.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SNAP_BITS: i32 = 20;
const GOLDEN: f64 = 0.618_033_988_749_894_9;

fn snap(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    let e = v.abs().log2().floor() as i32;
    let scale = 2f64.powi(SNAP_BITS - 1 - e);
    (v * scale).round() / scale
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QsSearch {
    /// Range of `|x|`; the grid covers both signs and zero.
    pub x_range: (f64, f64),
    pub t_range: (f64, f64),
    pub grid: usize,
    pub refine_rounds: usize,
}

impl Default for QsSearch {
    fn default() -> Self {
        QsSearch {
            x_range: (1e-3, 1e3),
            t_range: (1e-3, 1e3),
            grid: 200,
            refine_rounds: 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QsResult {
    pub sup: f64,
    pub x: f64,
    pub t: f64,
}

/// The quotient at `(x, t)`; both differences must be positive for
/// `t > 0` (they swap roles for `t < 0`).
pub fn quasisymmetry_quotient<F: Fn(f64) -> f64>(f: &F, x: f64, t: f64) -> Result<f64> {
    if t == 0.0 {
        return Err(Error::domain("t must be nonzero"));
    }
    let fx = f(x);
    let (up, down) = (f(x + t) - fx, fx - f(x - t));
    let sign = t.signum();
    if !(sign * up > 0.0 && sign * down > 0.0) {
        return Err(Error::NonMonotone { x, t });
    }
    Ok(up / down)
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![snap(lo)];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| snap((a + (b - a) * i as f64 / (n - 1) as f64).exp()))
        .collect()
}

/// Golden-section maximization of `g` on `[a, b]`.
fn golden_max<G: FnMut(f64) -> Result<f64>>(mut g: G, mut a: f64, mut b: f64, iters: usize) -> Result<(f64, f64)> {
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut gc, mut gd) = (g(c)?, g(d)?);
    for _ in 0..iters {
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - GOLDEN * (b - a);
            gc = g(c)?;
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + GOLDEN * (b - a);
            gd = g(d)?;
        }
    }
    Ok(if gc > gd { (c, gc) } else { (d, gd) })
}

pub fn quasisymmetry_sup<F>(f: F, search: &QsSearch) -> Result<QsResult>
where
    F: Fn(f64) -> f64 + Sync,
{
    let (xlo, xhi) = search.x_range;
    let (tlo, thi) = search.t_range;
    if !(xlo > 0.0 && xhi > xlo && tlo > 0.0 && thi > tlo && search.grid >= 4) {
        return Err(Error::domain("search ranges must be positive and nonempty, grid >= 4"));
    }
    let half = search.grid / 2;
    let pos = log_grid(xlo, xhi, half);
    let mut xs: Vec<f64> = pos.iter().rev().map(|v| -v).collect();
    xs.push(0.0);
    xs.extend(pos.iter().copied().take(search.grid - half - 1));
    let ts = log_grid(tlo, thi, search.grid);

    let rows: Vec<Result<(f64, usize)>> = xs
        .par_iter()
        .map(|&x| {
            let mut best = (f64::NEG_INFINITY, 0);
            for (j, &t) in ts.iter().enumerate() {
                let q = quasisymmetry_quotient(&f, x, t)?;
                if q > best.0 {
                    best = (q, j);
                }
            }
            Ok(best)
        })
        .collect();
    let mut best = (f64::NEG_INFINITY, 0, 0);
    for (i, row) in rows.into_iter().enumerate() {
        let (q, j) = row?;
        if q > best.0 {
            best = (q, i, j);
        }
    }
    let (grid_sup, bi, bj) = best;
    let mut result = QsResult {
        sup: grid_sup,
        x: xs[bi],
        t: ts[bj],
    };

    // Local refinement, alternating in x and log t inside the best cell's
    // neighbourhood.
    let xa = xs[bi.saturating_sub(1)];
    let xb = xs[(bi + 1).min(xs.len() - 1)];
    let la = ts[bj.saturating_sub(1)].ln();
    let lb = ts[(bj + 1).min(ts.len() - 1)].ln();
    let (mut x, mut lt) = (result.x, result.t.ln());
    for _ in 0..search.refine_rounds {
        let t = snap(lt.exp());
        if xb > xa {
            let (nx, _) = golden_max(|v| quasisymmetry_quotient(&f, snap(v), t), xa, xb, 60)?;
            x = snap(nx);
        }
        if lb > la {
            let (nl, _) = golden_max(|v| quasisymmetry_quotient(&f, x, snap(v.exp())), la, lb, 60)?;
            lt = nl;
        }
        let t = snap(lt.exp());
        let q = quasisymmetry_quotient(&f, x, t)?;
        if q > result.sup {
            result = QsResult { sup: q, x, t };
        }
    }
    Ok(result)
}
