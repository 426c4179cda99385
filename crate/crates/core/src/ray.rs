//! Teichmüller geodesic flow along Jenkins-Strebel rays.
//!
//! At time `t` each half-cylinder of modulus `m_j/2` is the round annulus
//! `{exp(L_j(t)) <= |z| < 1}` with `L_j(t) = -e^{2t} m_j π`. The inner
//! radius underflows an f64 near `t ≈ 2.9` for `m_j = 1`, so every radius
//! is carried as its logarithm.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::surface::CylinderDecomposition;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayPoint {
    pub t: f64,
    pub base_moduli: Vec<f64>,
    pub scaled_moduli: Vec<f64>,
    pub log_inner_radii: Vec<f64>,
}

impl RayPoint {
    fn at(base_moduli: Vec<f64>, t: f64) -> Self {
        let stretch = (2.0 * t).exp();
        let scaled_moduli: Vec<f64> = base_moduli.iter().map(|m| stretch * m).collect();
        let log_inner_radii = scaled_moduli.iter().map(|m| -m * PI).collect();
        RayPoint {
            t,
            base_moduli,
            scaled_moduli,
            log_inner_radii,
        }
    }

    /// Inner radius `δ_j(t)`; zero once it underflows.
    pub fn inner_radius(&self, j: usize) -> f64 {
        self.log_inner_radii[j].exp()
    }

    /// Flows the point forward by `dt`.
    pub fn flow(&self, dt: f64) -> Result<RayPoint> {
        if !(dt.is_finite() && dt >= 0.0) {
            return Err(Error::domain(format!("flow time {dt} must be >= 0")));
        }
        Ok(RayPoint::at(self.base_moduli.clone(), self.t + dt))
    }
}

pub fn log_inner_radius(modulus: f64, t: f64) -> f64 {
    -(2.0 * t).exp() * modulus * PI
}

pub fn ray_point(spec: &CylinderDecomposition, t: f64) -> Result<RayPoint> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::domain(format!("ray time {t} must be finite and >= 0")));
    }
    let report = spec.validate();
    if !report.is_valid() {
        return Err(Error::Validation(report));
    }
    Ok(RayPoint::at(spec.moduli(), t))
}

/// `r ↦ r^{e^{2t}}`, carrying the inner circle of the annulus at time 0 to
/// the inner circle at time `t`.
pub fn radial_stretch(t: f64, r: f64) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::domain(format!("radius {r} not in (0, 1)")));
    }
    Ok(((2.0 * t).exp() * r.ln()).exp())
}

/// Teichmüller distance between two points of the same ray.
pub fn distance_along_ray(s: f64, t: f64) -> f64 {
    (s - t).abs()
}

/// Normal form `x + iy ↦ k^{-1/2} x + i k^{1/2} y` of a Teichmüller map.
///
/// `k > 0`; values below 1 compress the vertical direction. The maximal
/// dilatation is `max(k, 1/k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineStretch {
    pub k: f64,
}

impl AffineStretch {
    pub fn new(k: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::domain(format!("stretch factor {k} must be positive")));
        }
        Ok(AffineStretch { k })
    }

    /// The map `g_t` from the base surface to `r(t)`.
    pub fn along_ray(t: f64) -> Self {
        AffineStretch { k: (2.0 * t).exp() }
    }

    pub fn compose(self, other: AffineStretch) -> AffineStretch {
        AffineStretch { k: self.k * other.k }
    }

    pub fn inverse(self) -> AffineStretch {
        AffineStretch { k: 1.0 / self.k }
    }

    pub fn dilatation(&self) -> f64 {
        self.k.max(1.0 / self.k)
    }

    pub fn half_log_dilatation(&self) -> f64 {
        0.5 * self.dilatation().ln()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let s = self.k.sqrt();
        Complex64::new(z.re / s, z.im * s)
    }
}

/// Boundary side `side` of cylinder `cylinder`, i.e. one of the disks
/// `A_j^l(∞)` of the limit surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DiskId {
    pub cylinder: usize,
    pub side: u8,
}

impl DiskId {
    fn index(self) -> usize {
        2 * self.cylinder + (self.side as usize - 1)
    }

    fn from_index(i: usize) -> Self {
        DiskId {
            cylinder: i / 2,
            side: (i % 2) as u8 + 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub cylinder: usize,
    pub core_label: String,
    pub disks: [DiskId; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub disks: Vec<DiskId>,
}

/// The noded surface at the end of the ray: one node per pinched core
/// curve, components ordered by their smallest disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodedLimit {
    pub nodes: Vec<Node>,
    pub components: Vec<Component>,
}

impl NodedLimit {
    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn component_of(&self, disk: DiskId) -> Option<usize> {
        self.components.iter().position(|c| c.disks.contains(&disk))
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

pub fn limit_point(spec: &CylinderDecomposition) -> Result<NodedLimit> {
    let report = spec.validate();
    if !report.is_valid() {
        return Err(Error::Validation(report));
    }
    let n_disks = 2 * spec.k();
    let mut parent: Vec<usize> = (0..n_disks).collect();
    for g in &spec.gluings {
        let (a, b) = (find(&mut parent, g.a.disk().index()), find(&mut parent, g.b.disk().index()));
        if a != b {
            let (lo, hi) = (a.min(b), a.max(b));
            parent[hi] = lo;
        }
    }
    // Roots are the smallest members, so iterating disks in order yields
    // components sorted by smallest disk id.
    let mut root_to_component = vec![usize::MAX; n_disks];
    let mut components: Vec<Component> = Vec::new();
    for i in 0..n_disks {
        let r = find(&mut parent, i);
        if root_to_component[r] == usize::MAX {
            root_to_component[r] = components.len();
            components.push(Component { disks: Vec::new() });
        }
        components[root_to_component[r]].disks.push(DiskId::from_index(i));
    }
    let nodes = spec
        .cylinders
        .iter()
        .enumerate()
        .map(|(j, c)| Node {
            cylinder: j,
            core_label: c.core_label.clone(),
            disks: [DiskId { cylinder: j, side: 1 }, DiskId { cylinder: j, side: 2 }],
        })
        .collect();
    Ok(NodedLimit { nodes, components })
}
