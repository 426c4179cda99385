use std::collections::BTreeMap;
use std::f64::consts::{LN_2, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::interp::{dilatation_p, BlendMap, LogAffineMap};
use super::piecewise::{Piece, PieceMap, PiecewiseMap, PowerSeries, Region};
use super::{threshold_time, InterpolationParams};
use crate::error::{Error, Result};
use crate::surface::SimilarPair;

/// Polar sample used for the supremum of `K(Q)`.
const Q_SAMPLES_R: usize = 33;
const Q_SAMPLES_THETA: usize = 128;

/// Data for one half-cylinder `(j, l)`: interpolation parameters and the
/// dilatation of the end map on the matching disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnulusSpec {
    pub cylinder: usize,
    pub side: u8,
    pub params: InterpolationParams,
    pub k_h: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnulusAssembly {
    pub cylinder: usize,
    pub side: u8,
    pub map: PiecewiseMap,
    pub k_p: f64,
    pub k_q_sup: f64,
    pub k_h: f64,
    pub k_f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FAssembly {
    pub t: f64,
    pub annuli: Vec<AnnulusAssembly>,
    /// `K(F_t)`, the maximum over all pieces of all annuli.
    pub dilatation: f64,
}

impl FAssembly {
    pub fn half_log_dilatation(&self) -> f64 {
        0.5 * self.dilatation.ln()
    }

    pub fn max_k_p(&self) -> f64 {
        self.annuli.iter().map(|a| a.k_p).fold(1.0, f64::max)
    }

    pub fn max_k_q(&self) -> f64 {
        self.annuli.iter().map(|a| a.k_q_sup).fold(1.0, f64::max)
    }

    pub fn max_k_h(&self) -> f64 {
        self.annuli.iter().map(|a| a.k_h).fold(1.0, f64::max)
    }
}

fn assemble_one(spec: &AnnulusSpec, t: f64, theta_offset: f64) -> Result<AnnulusAssembly> {
    if !(spec.k_h.is_finite() && spec.k_h >= 1.0) {
        return Err(Error::domain(format!("K(h) = {} must be >= 1", spec.k_h)));
    }
    let threshold = threshold_time(&spec.params);
    if t < threshold {
        return Err(Error::BelowThreshold {
            cylinder: spec.cylinder,
            t,
            threshold,
        });
    }
    let p = LogAffineMap::new(&spec.params, t)?;
    let q = BlendMap::from_params(&spec.params, t);
    let k_p = dilatation_p(&spec.params, t)?.value;
    let k_q_sup = q.sup_dilatation(Q_SAMPLES_R, Q_SAMPLES_THETA, theta_offset)?;
    let k_f = k_p.max(k_q_sup).max(spec.k_h);

    let (ld, lo) = (p.log_inner, p.log_outer);
    let map = PiecewiseMap {
        pieces: vec![
            Piece {
                label: "P".into(),
                region: Region::Annulus {
                    log_inner: ld,
                    log_outer: lo,
                },
                map: PieceMap::LogAffine(p),
            },
            Piece {
                label: "Q".into(),
                region: Region::Annulus {
                    log_inner: lo,
                    log_outer: lo + LN_2,
                },
                map: PieceMap::Blend(q),
            },
            Piece {
                label: "h".into(),
                region: Region::Annulus {
                    log_inner: lo + LN_2,
                    log_outer: 0.0,
                },
                map: PieceMap::Series(PowerSeries {
                    c: spec.params.c,
                    psi: spec.params.psi.clone(),
                }),
            },
        ],
    };
    Ok(AnnulusAssembly {
        cylinder: spec.cylinder,
        side: spec.side,
        map,
        k_p,
        k_q_sup,
        k_h: spec.k_h,
        k_f,
    })
}

/// Checks `|arg c_j^1 + arg c_j^2| < 2π` for every cylinder with both
/// sides present. The twist lift on side 2 uses `[-π, π)` when it was not
/// set explicitly.
fn twist_audit(specs: &[AnnulusSpec]) -> Result<()> {
    let mut sums: BTreeMap<usize, (f64, u8)> = BTreeMap::new();
    for s in specs {
        let mut twist = s.params.twist;
        if s.side == 2 && twist == PI {
            twist = -PI;
        }
        let entry = sums.entry(s.cylinder).or_insert((0.0, 0));
        entry.0 += twist;
        entry.1 |= s.side;
    }
    for (cylinder, (sum, sides)) in sums {
        if sides == 3 && sum.abs() >= TAU {
            return Err(Error::HomotopyViolation { cylinder, sum: sum.abs() });
        }
    }
    Ok(())
}

/// Builds `F_t` on every listed half-cylinder and reports its dilatation,
/// `max{K(P), sup K(Q), K(h)}` per annulus and overall.
pub fn assemble_f(specs: &[AnnulusSpec], t: f64) -> Result<FAssembly> {
    assemble_f_with_offset(specs, t, 0.0)
}

/// [`assemble_f`] with the angular sample grid for `K(Q)` rotated by
/// `theta_offset`.
pub fn assemble_f_with_offset(specs: &[AnnulusSpec], t: f64, theta_offset: f64) -> Result<FAssembly> {
    if specs.is_empty() {
        return Err(Error::domain("no annuli to assemble"));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::domain(format!("t = {t} must be >= 0")));
    }
    for s in specs {
        if s.side != 1 && s.side != 2 {
            return Err(Error::domain(format!("side {} is not 1 or 2", s.side)));
        }
    }
    twist_audit(specs)?;
    let annuli = specs
        .iter()
        .map(|s| assemble_one(s, t, theta_offset))
        .collect::<Result<Vec<_>>>()?;
    let dilatation = annuli.iter().map(|a| a.k_f).fold(1.0, f64::max);
    Ok(FAssembly { t, annuli, dilatation })
}

/// Both half-cylinders of every matched cylinder of `pair`, with the same
/// end-map data `c`, `ψ` and `K(h)` on each and `M_j = m'_j / m_j`.
pub fn annuli_for_pair(
    pair: &SimilarPair,
    c: Complex64,
    psi: &[Complex64],
    eps: f64,
    k_h: f64,
) -> Result<Vec<AnnulusSpec>> {
    let mut out = Vec::with_capacity(2 * pair.k());
    for (j, (m, mp)) in pair.moduli_pairs().into_iter().enumerate() {
        for side in [1, 2] {
            out.push(AnnulusSpec {
                cylinder: j,
                side,
                params: InterpolationParams::new(mp / m, m, c, psi.to_vec(), eps)?,
                k_h,
            });
        }
    }
    Ok(out)
}
