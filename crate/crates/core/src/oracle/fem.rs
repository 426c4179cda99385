//! Piecewise-linear Dirichlet energy on triangulated lattices.
//!
//! On a rectangular lattice split along one diagonal the P1 stiffness
//! matrix is exactly the 5-point Laplacian, so the quadrilateral solver is
//! the classical stencil. Annuli use the same assembly on a log-polar
//! lattice placed at its physical positions with straight edges.

use rayon::prelude::*;

use crate::error::{Error, Result};

pub(crate) const CG_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone)]
pub(crate) struct Mesh {
    pub nodes: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
}

impl Mesh {
    /// Lattice of `(nu + 1) x nv` nodes (or `(nu + 1) x (nv + 1)` when not
    /// periodic) at `pos(i, j)`. Cells are split along the `(i,j)-(i+1,j+1)`
    /// diagonal; triangles are counterclockwise when `pos` preserves
    /// orientation in `(i, j)`.
    pub fn lattice<P>(nu: usize, nv: usize, periodic_v: bool, pos: P) -> Mesh
    where
        P: Fn(usize, usize) -> [f64; 2],
    {
        let rows_v = if periodic_v { nv } else { nv + 1 };
        let id = |i: usize, j: usize| i * rows_v + (j % rows_v);
        let mut nodes = Vec::with_capacity((nu + 1) * rows_v);
        for i in 0..=nu {
            for j in 0..rows_v {
                nodes.push(pos(i, j));
            }
        }
        let mut triangles = Vec::with_capacity(2 * nu * nv);
        for i in 0..nu {
            for j in 0..nv {
                let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            }
        }
        Mesh { nodes, triangles }
    }

    pub fn signed_area(&self, t: [usize; 3]) -> f64 {
        let [p, q, r] = t.map(|k| self.nodes[k]);
        0.5 * ((q[0] - p[0]) * (r[1] - p[1]) - (r[0] - p[0]) * (q[1] - p[1]))
    }

    /// Every triangle must keep positive area.
    pub fn check_orientation(&self) -> Result<()> {
        for (k, &t) in self.triangles.iter().enumerate() {
            let area = self.signed_area(t);
            if !(area > 0.0) {
                let c = t.map(|i| self.nodes[i]);
                let cx = (c[0][0] + c[1][0] + c[2][0]) / 3.0;
                let cy = (c[0][1] + c[1][1] + c[2][1]) / 3.0;
                return Err(Error::Orientation(format!(
                    "triangle {k} near ({cx:.6e}, {cy:.6e}) has area {area:e}"
                )));
            }
        }
        Ok(())
    }

    fn local_stiffness(&self, t: [usize; 3]) -> [[f64; 3]; 3] {
        let p = t.map(|k| self.nodes[k]);
        let area = self.signed_area(t);
        let mut b = [0.0; 3];
        let mut c = [0.0; 3];
        for i in 0..3 {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            b[i] = p[j][1] - p[k][1];
            c[i] = p[k][0] - p[j][0];
        }
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = (b[i] * b[j] + c[i] * c[j]) / (4.0 * area);
            }
        }
        out
    }

    /// `∫ |∇u|^2` of the piecewise-linear interpolant of `u`.
    pub fn energy(&self, u: &[f64]) -> f64 {
        let mut e = 0.0;
        for &t in &self.triangles {
            let k = self.local_stiffness(t);
            for i in 0..3 {
                for j in 0..3 {
                    e += u[t[i]] * k[i][j] * u[t[j]];
                }
            }
        }
        e
    }
}

struct Csr {
    row_start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl Csr {
    fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Csr {
        // stable, so duplicates are summed in assembly order
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_start = vec![0; n + 1];
        let mut cols = Vec::with_capacity(triplets.len() / 3);
        let mut vals: Vec<f64> = Vec::with_capacity(triplets.len() / 3);
        let mut last = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_start[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..n {
            row_start[r + 1] += row_start[r];
        }
        Csr { row_start, cols, vals }
    }

    fn matvec(&self, x: &[f64], y: &mut [f64]) {
        y.par_iter_mut().enumerate().for_each(|(r, out)| {
            let mut s = 0.0;
            for k in self.row_start[r]..self.row_start[r + 1] {
                s += self.vals[k] * x[self.cols[k]];
            }
            *out = s;
        });
    }

    fn diagonal(&self) -> Vec<f64> {
        (0..self.row_start.len() - 1)
            .map(|r| {
                (self.row_start[r]..self.row_start[r + 1])
                    .find(|&k| self.cols[k] == r)
                    .map_or(0.0, |k| self.vals[k])
            })
            .collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Jacobi-preconditioned conjugate gradients to relative residual `tol`.
fn conjugate_gradient(a: &Csr, b: &[f64], tol: f64) -> Result<(Vec<f64>, usize)> {
    let n = b.len();
    let mut x = vec![0.0; n];
    let b_norm = dot(b, b).sqrt();
    if b_norm == 0.0 {
        return Ok((x, 0));
    }
    let inv_diag: Vec<f64> = a.diagonal().iter().map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 }).collect();
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let max_iter = 10 * n + 100;
    for it in 1..=max_iter {
        a.matvec(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::Solver {
                residual: dot(&r, &r).sqrt() / b_norm,
                iterations: it,
            });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let res = dot(&r, &r).sqrt() / b_norm;
        if res <= tol {
            log::debug!("cg converged in {it} iterations, residual {res:e}");
            return Ok((x, it));
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::Solver {
        residual: dot(&r, &r).sqrt() / b_norm,
        iterations: max_iter,
    })
}

/// Minimizes the Dirichlet energy with the given nodal values held fixed
/// and returns `(energy, potential)`.
pub(crate) fn harmonic_energy(mesh: &Mesh, fixed: &[Option<f64>]) -> Result<(f64, Vec<f64>)> {
    let n = mesh.nodes.len();
    let mut free_index = vec![usize::MAX; n];
    let mut n_free = 0;
    for (k, f) in fixed.iter().enumerate() {
        if f.is_none() {
            free_index[k] = n_free;
            n_free += 1;
        }
    }
    let mut rhs = vec![0.0; n_free];
    let mut triplets = Vec::with_capacity(9 * mesh.triangles.len());
    for &t in &mesh.triangles {
        let k = mesh.local_stiffness(t);
        for i in 0..3 {
            let fi = free_index[t[i]];
            if fi == usize::MAX {
                continue;
            }
            for j in 0..3 {
                match fixed[t[j]] {
                    None => triplets.push((fi, free_index[t[j]], k[i][j])),
                    Some(v) => rhs[fi] -= k[i][j] * v,
                }
            }
        }
    }
    let a = Csr::from_triplets(n_free, triplets);
    let (x, _) = conjugate_gradient(&a, &rhs, CG_TOLERANCE)?;
    let u: Vec<f64> = (0..n)
        .map(|k| fixed[k].unwrap_or_else(|| x[free_index[k]]))
        .collect();
    Ok((mesh.energy(&u), u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn rect(nx: usize, ny: usize, a: f64, b: f64) -> Mesh {
        Mesh::lattice(nx, ny, false, |i, j| [a * i as f64 / nx as f64, b * j as f64 / ny as f64])
    }

    #[test]
    fn stiffness_is_five_point_stencil() {
        // interior row of the unit-spacing stiffness matrix: 4 on the
        // diagonal, -1 to the four axis neighbours, 0 on diagonals
        let m = rect(4, 4, 4.0, 4.0);
        let centre = 2 * 5 + 2;
        let mut row = vec![0.0; m.nodes.len()];
        for &t in &m.triangles {
            let k = m.local_stiffness(t);
            for i in 0..3 {
                if t[i] == centre {
                    for j in 0..3 {
                        row[t[j]] += k[i][j];
                    }
                }
            }
        }
        assert_abs_diff_eq!(row[centre], 4.0, epsilon = 1e-14);
        for nb in [centre - 1, centre + 1, centre - 5, centre + 5] {
            assert_abs_diff_eq!(row[nb], -1.0, epsilon = 1e-14);
        }
        for nb in [centre - 6, centre - 4, centre + 4, centre + 6] {
            assert_abs_diff_eq!(row[nb], 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn linear_potential_energy() {
        let m = rect(10, 5, 2.0, 1.0);
        let u: Vec<f64> = m.nodes.iter().map(|p| p[1]).collect();
        assert_abs_diff_eq!(m.energy(&u), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn flipped_triangle_detected() {
        let mut m = rect(3, 3, 1.0, 1.0);
        m.nodes[5] = [2.0, 2.0];
        assert!(matches!(m.check_orientation(), Err(Error::Orientation(_))));
    }

    #[test]
    fn solver_recovers_linear_solution() {
        let m = rect(12, 8, 3.0, 2.0);
        let fixed: Vec<Option<f64>> = m
            .nodes
            .iter()
            .map(|p| {
                if p[1] == 0.0 {
                    Some(0.0)
                } else if p[1] == 2.0 {
                    Some(1.0)
                } else {
                    None
                }
            })
            .collect();
        let (e, u) = harmonic_energy(&m, &fixed).unwrap();
        assert_abs_diff_eq!(e, 1.5, epsilon = 1e-9);
        for (p, v) in m.nodes.iter().zip(&u) {
            assert_abs_diff_eq!(*v, p[1] / 2.0, epsilon = 1e-8);
        }
    }
}
