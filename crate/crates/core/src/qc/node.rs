use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pieces of the node correction on `[-ε', ε'] × [0, ε']`, named for the
/// quadrant `x >= 0`; the half `x < 0` is the mirror image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodePiece {
    /// `0 <= x, y <= ε'²`.
    Identity,
    /// `0 <= x <= ε'²`, `ε'² <= y <= ε'`.
    VerticalStrip,
    /// `ε'² <= x <= ε'`, `0 <= y <= ε'²`.
    HorizontalStrip,
    /// `ε'² <= x, y <= ε'`.
    Corner,
    /// Outside the box: `x + i(1+ε')y`.
    Outer,
}

impl NodePiece {
    pub const ALL: [NodePiece; 5] = [
        NodePiece::Identity,
        NodePiece::VerticalStrip,
        NodePiece::HorizontalStrip,
        NodePiece::Corner,
        NodePiece::Outer,
    ];
}

/// Deformation of the end map `x + i(1+ε')y` that is conformal near a node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeCorrection {
    pub eps: f64,
}

impl NodeCorrection {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::domain(format!("eps' = {eps} not in (0, 1)")));
        }
        Ok(NodeCorrection { eps })
    }

    pub fn piece_of(&self, z: Complex64) -> NodePiece {
        let e = self.eps;
        let e2 = e * e;
        let (x, y) = (z.re.abs(), z.im);
        if x > e || y > e {
            NodePiece::Outer
        } else if x <= e2 && y <= e2 {
            NodePiece::Identity
        } else if x <= e2 {
            NodePiece::VerticalStrip
        } else if y <= e2 {
            NodePiece::HorizontalStrip
        } else {
            NodePiece::Corner
        }
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if z == Complex64::new(0.0, 0.0) {
            return Err(Error::domain("z = 0 is the node"));
        }
        if z.im < 0.0 {
            return Err(Error::domain(format!("y = {} < 0 is outside the chart", z.im)));
        }
        Ok(self.eval_piece(self.piece_of(z), z))
    }

    /// Closed form of `piece`, applied to `z` regardless of which region
    /// contains it. Used to compare neighbouring pieces along seams.
    pub fn eval_piece(&self, piece: NodePiece, z: Complex64) -> Complex64 {
        let e = self.eps;
        let e2 = e * e;
        let (x, y) = (z.re.abs(), z.im);
        let v = match piece {
            NodePiece::Identity => y,
            NodePiece::VerticalStrip => (y - e2 * e) / (1.0 - e),
            NodePiece::HorizontalStrip => (x + 1.0 - e - e2) / (1.0 - e) * y,
            NodePiece::Corner => {
                ((1.0 - e2 - e * (x + 1.0 - e - e2)) * y + e2 * (x - e)) / ((1.0 - e) * (1.0 - e))
            }
            NodePiece::Outer => (1.0 + e) * y,
        };
        Complex64::new(z.re, v)
    }

    /// Analytic Jacobian `[[∂u/∂x, ∂u/∂y], [∂v/∂x, ∂v/∂y]]` of a piece,
    /// for `x >= 0`.
    pub fn jacobian(&self, piece: NodePiece, z: Complex64) -> [[f64; 2]; 2] {
        let e = self.eps;
        let e2 = e * e;
        let (x, y) = (z.re.abs(), z.im);
        let (vx, vy) = match piece {
            NodePiece::Identity => (0.0, 1.0),
            NodePiece::VerticalStrip => (0.0, 1.0 / (1.0 - e)),
            NodePiece::HorizontalStrip => (y / (1.0 - e), (x + 1.0 - e - e2) / (1.0 - e)),
            NodePiece::Corner => {
                let d = (1.0 - e) * (1.0 - e);
                ((-e * y + e2) / d, (1.0 - e2 - e * (x + 1.0 - e - e2)) / d)
            }
            NodePiece::Outer => (0.0, 1.0 + e),
        };
        [[1.0, 0.0], [vx, vy]]
    }

    /// Largest dilatation of the closed-form Jacobians over an `n x n`
    /// grid of cell centres in `[0, 1.25ε']²`, which reaches into the outer
    /// piece. The left half is the mirror image and has the same dilatations.
    pub fn sup_dilatation(&self, n: usize) -> Result<f64> {
        let e = 1.25 * self.eps;
        let mut sup = 1.0f64;
        for i in 0..n {
            for j in 0..n {
                let z = Complex64::new(e * (i as f64 + 0.5) / n as f64, e * (j as f64 + 0.5) / n as f64);
                let k = jacobian_dilatation(self.jacobian(self.piece_of(z), z)).ok_or_else(|| {
                    Error::NotOrientationPreserving {
                        at: format!("{z}"),
                        mu_abs: 1.0,
                    }
                })?;
                sup = sup.max(k);
            }
        }
        Ok(sup)
    }
}

/// `K` of the linear map with matrix `j`, or `None` if it reverses or
/// collapses orientation.
pub fn jacobian_dilatation(j: [[f64; 2]; 2]) -> Option<f64> {
    let [[a, b], [c, d]] = j;
    let dz = Complex64::new(a + d, c - b).norm() / 2.0;
    let dz_bar = Complex64::new(a - d, c + b).norm() / 2.0;
    (dz > dz_bar).then(|| (dz + dz_bar) / (dz - dz_bar))
}
