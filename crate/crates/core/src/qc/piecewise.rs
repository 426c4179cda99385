use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::interp::{BlendMap, LogAffineMap};
use super::node::{NodeCorrection, NodePiece};
use crate::error::{Error, Result};

/// `z ↦ c z + ψ(z)`, the end map near a node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerSeries {
    pub c: Complex64,
    pub psi: Vec<Complex64>,
}

impl PowerSeries {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for coef in self.psi.iter().rev() {
            acc = (acc + coef) * z;
        }
        self.c * z + acc * z
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    /// `log_inner <= log|z| <= log_outer`.
    Annulus { log_inner: f64, log_outer: f64 },
    /// Closed rectangle.
    Rect { x0: f64, x1: f64, y0: f64, y1: f64 },
    /// Everything not claimed by an earlier piece.
    Rest,
}

impl Region {
    pub fn contains(&self, z: Complex64) -> bool {
        match *self {
            Region::Annulus { log_inner, log_outer } => {
                let s = z.norm().ln();
                s >= log_inner && s <= log_outer
            }
            Region::Rect { x0, x1, y0, y1 } => z.re >= x0 && z.re <= x1 && z.im >= y0 && z.im <= y1,
            Region::Rest => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PieceMap {
    LogAffine(LogAffineMap),
    Blend(BlendMap),
    Series(PowerSeries),
    Node { map: NodeCorrection, piece: NodePiece },
}

impl PieceMap {
    /// Closed-form value, ignoring the region.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            PieceMap::LogAffine(p) => p.eval_unchecked(z),
            PieceMap::Blend(q) => q.eval_unchecked(z),
            PieceMap::Series(h) => h.eval(z),
            PieceMap::Node { map, piece } => map.eval_piece(*piece, z),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub label: String,
    pub region: Region,
    pub map: PieceMap,
}

/// A map given by closed forms on regions that tile its domain. Lookup is
/// first-match, so on a shared seam the earlier piece wins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseMap {
    pub pieces: Vec<Piece>,
}

impl PiecewiseMap {
    pub fn piece_index(&self, z: Complex64) -> Option<usize> {
        self.pieces.iter().position(|p| p.region.contains(z))
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let i = self
            .piece_index(z)
            .ok_or_else(|| Error::domain(format!("{z} is outside every piece")))?;
        Ok(self.pieces[i].map.eval(z))
    }

    /// `|f_a(z) - f_b(z)|` for the closed forms of pieces `a` and `b`.
    pub fn seam_gap(&self, a: usize, b: usize, z: Complex64) -> f64 {
        (self.pieces[a].map.eval(z) - self.pieces[b].map.eval(z)).norm()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.pieces.iter().position(|p| p.label == label)
    }
}

impl NodeCorrection {
    /// The correction as a [`PiecewiseMap`] on the upper half plane:
    /// the four quadrant pieces, their mirror images, then the outer map.
    pub fn as_piecewise(&self) -> PiecewiseMap {
        let e = self.eps;
        let e2 = e * e;
        let boxes = [
            (NodePiece::Identity, (0.0, e2), (0.0, e2)),
            (NodePiece::VerticalStrip, (0.0, e2), (e2, e)),
            (NodePiece::HorizontalStrip, (e2, e), (0.0, e2)),
            (NodePiece::Corner, (e2, e), (e2, e)),
        ];
        let mut pieces = Vec::new();
        for mirrored in [false, true] {
            for &(piece, (x0, x1), (y0, y1)) in &boxes {
                let (x0, x1) = if mirrored { (-x1, -x0) } else { (x0, x1) };
                pieces.push(Piece {
                    label: format!("{}{:?}", if mirrored { "-" } else { "+" }, piece),
                    region: Region::Rect { x0, x1, y0, y1 },
                    map: PieceMap::Node { map: *self, piece },
                });
            }
        }
        pieces.push(Piece {
            label: "Outer".into(),
            region: Region::Rest,
            map: PieceMap::Node {
                map: *self,
                piece: NodePiece::Outer,
            },
        });
        PiecewiseMap { pieces }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_piecewise_agrees_with_direct_eval() {
        let h = NodeCorrection::new(0.3).unwrap();
        let pw = h.as_piecewise();
        for (x, y) in [(0.01, 0.02), (0.05, 0.2), (0.2, 0.05), (0.2, 0.2), (-0.2, 0.25), (0.5, 0.1), (0.1, 0.6)] {
            let z = Complex64::new(x, y);
            assert_eq!(pw.eval(z).unwrap(), h.eval(z).unwrap(), "at {z}");
        }
    }

    #[test]
    fn series_eval() {
        let s = PowerSeries {
            c: Complex64::new(2.0, 0.0),
            psi: vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)],
        };
        let z = Complex64::new(0.5, 0.0);
        let expected = 2.0 * z + z * z + Complex64::i() * z * z * z;
        assert!((s.eval(z) - expected).norm() < 1e-15);
    }
}
