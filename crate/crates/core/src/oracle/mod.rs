//! Discrete conformal moduli by Dirichlet-energy minimization, used as an
//! independent check on cylinder moduli and on dilatation bounds.
//!
//! Conventions: a quadrilateral with `u = 0` on the bottom side and
//! `u = 1` on the top has modulus equal to the energy, `width/height` for a
//! rectangle. An annulus with `u = 0` inside and `u = 1` outside has
//! modulus `1/energy = log(r_out/r_in)/(2π)`, so the half-cylinder
//! `{e^{-mπ} <= |z| < 1}` has modulus `m/2`.

mod fem;

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qc::PiecewiseMap;
use fem::{harmonic_energy, Mesh};

pub const MIN_RESOLUTION: usize = 8;
/// Below this inner radius only the analytic modulus is reported.
pub const MIN_DISCRETE_RADIUS: f64 = 1e-8;
/// Cap on angular cells, as a multiple of the radial resolution.
const MAX_ANGULAR_FACTOR: usize = 4;

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainKind {
    /// `width x height` rectangle. The marked pair is bottom/top, or
    /// left/right when `swap_marked` is set.
    Quadrilateral {
        width: f64,
        height: f64,
        #[serde(default)]
        swap_marked: bool,
    },
    Annulus {
        r_in: f64,
        #[serde(default = "one")]
        r_out: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridDomain {
    #[serde(flatten)]
    pub kind: DomainKind,
    /// Cells per side; radial cells for an annulus.
    pub resolution: usize,
}

impl GridDomain {
    pub fn quadrilateral(width: f64, height: f64, resolution: usize) -> Result<Self> {
        let d = GridDomain {
            kind: DomainKind::Quadrilateral {
                width,
                height,
                swap_marked: false,
            },
            resolution,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn annulus(r_in: f64, r_out: f64, resolution: usize) -> Result<Self> {
        let d = GridDomain {
            kind: DomainKind::Annulus { r_in, r_out },
            resolution,
        };
        d.validate()?;
        Ok(d)
    }

    /// The conjugate quadrilateral; annuli are returned unchanged.
    pub fn swapped(mut self) -> Self {
        if let DomainKind::Quadrilateral { swap_marked, .. } = &mut self.kind {
            *swap_marked = !*swap_marked;
        }
        self
    }

    pub fn with_resolution(mut self, resolution: usize) -> Self {
        self.resolution = resolution;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.resolution < MIN_RESOLUTION {
            return Err(Error::domain(format!(
                "resolution {} is below {MIN_RESOLUTION}",
                self.resolution
            )));
        }
        match self.kind {
            DomainKind::Quadrilateral { width, height, .. } => {
                if !(width > 0.0 && height > 0.0 && width.is_finite() && height.is_finite()) {
                    return Err(Error::domain(format!("rectangle {width} x {height} must have positive sides")));
                }
            }
            DomainKind::Annulus { r_in, r_out } => {
                if !(r_in > 0.0 && r_out > r_in && r_out.is_finite()) {
                    return Err(Error::domain(format!("annulus radii need 0 < r_in < r_out, got {r_in}, {r_out}")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulusEstimate {
    pub value: f64,
    pub err_est: f64,
    pub resolution: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnulusModulus {
    pub analytic: f64,
    pub discrete: Option<f64>,
    pub err_est: Option<f64>,
    pub resolution: usize,
    /// Set when the inner radius is too small for the discrete solve.
    pub flagged: bool,
}

/// `log(r_out/r_in)/(2π)`.
pub fn analytic_annulus_modulus(r_in: f64, r_out: f64) -> f64 {
    (r_out / r_in).ln() / TAU
}

/// Richardson estimate for a second-order scheme.
fn richardson(fine: f64, coarse: f64) -> f64 {
    (fine - coarse).abs() / 3.0
}

fn quad_mesh(width: f64, height: f64, n: usize) -> Mesh {
    Mesh::lattice(n, n, false, |i, j| {
        [width * i as f64 / n as f64, height * j as f64 / n as f64]
    })
}

fn quad_energy(width: f64, height: f64, swap: bool, n: usize) -> Result<f64> {
    let mesh = quad_mesh(width, height, n);
    let rows = n + 1;
    let fixed: Vec<Option<f64>> = (0..mesh.nodes.len())
        .map(|k| {
            let (i, j) = (k / rows, k % rows);
            let pos = if swap { i } else { j };
            if pos == 0 {
                Some(0.0)
            } else if pos == n {
                Some(1.0)
            } else {
                None
            }
        })
        .collect();
    Ok(harmonic_energy(&mesh, &fixed)?.0)
}

pub fn quad_modulus(dom: &GridDomain) -> Result<ModulusEstimate> {
    dom.validate()?;
    let DomainKind::Quadrilateral {
        width,
        height,
        swap_marked,
    } = dom.kind
    else {
        return Err(Error::domain("quad_modulus needs a quadrilateral domain"));
    };
    let n = dom.resolution;
    let fine = quad_energy(width, height, swap_marked, n)?;
    let coarse = quad_energy(width, height, swap_marked, n / 2)?;
    Ok(ModulusEstimate {
        value: fine,
        err_est: richardson(fine, coarse),
        resolution: n,
    })
}

/// Angular cell count: roughly square cells in log-polar coordinates,
/// between `n` and `MAX_ANGULAR_FACTOR * n`.
fn angular_cells(log_ratio: f64, n: usize) -> usize {
    let square = (TAU * n as f64 / log_ratio).round() as usize;
    square.clamp(n, MAX_ANGULAR_FACTOR * n)
}

fn annulus_mesh(r_in: f64, r_out: f64, n: usize) -> Mesh {
    let (s0, s1) = (r_in.ln(), r_out.ln());
    let nt = angular_cells(s1 - s0, n);
    Mesh::lattice(n, nt, true, |i, j| {
        let s = s0 + (s1 - s0) * i as f64 / n as f64;
        let th = TAU * j as f64 / nt as f64;
        let r = s.exp();
        [r * th.cos(), r * th.sin()]
    })
}

fn annulus_boundary(mesh: &Mesh, n: usize) -> Vec<Option<f64>> {
    let per_ring = mesh.nodes.len() / (n + 1);
    (0..mesh.nodes.len())
        .map(|k| match k / per_ring {
            0 => Some(0.0),
            i if i == n => Some(1.0),
            _ => None,
        })
        .collect()
}

fn annulus_discrete(mesh: &Mesh, n: usize) -> Result<f64> {
    let fixed = annulus_boundary(mesh, n);
    let (energy, _) = harmonic_energy(mesh, &fixed)?;
    Ok(1.0 / energy)
}

pub fn annulus_modulus(dom: &GridDomain) -> Result<AnnulusModulus> {
    dom.validate()?;
    let DomainKind::Annulus { r_in, r_out } = dom.kind else {
        return Err(Error::domain("annulus_modulus needs an annulus domain"));
    };
    let analytic = analytic_annulus_modulus(r_in, r_out);
    let n = dom.resolution;
    if r_in / r_out < MIN_DISCRETE_RADIUS {
        log::warn!("r_in/r_out = {:e} too small for the grid; analytic value only", r_in / r_out);
        return Ok(AnnulusModulus {
            analytic,
            discrete: None,
            err_est: None,
            resolution: n,
            flagged: true,
        });
    }
    let fine = annulus_discrete(&annulus_mesh(r_in, r_out, n), n)?;
    let coarse = annulus_discrete(&annulus_mesh(r_in, r_out, n / 2), n / 2)?;
    Ok(AnnulusModulus {
        analytic,
        discrete: Some(fine),
        err_est: Some(richardson(fine, coarse)),
        resolution: n,
        flagged: false,
    })
}

fn pushforward_once<F>(f: &F, r_in: f64, r_out: f64, n: usize) -> Result<f64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let mut mesh = annulus_mesh(r_in, r_out, n);
    for p in &mut mesh.nodes {
        let w = f(Complex64::new(p[0], p[1]))?;
        if !(w.re.is_finite() && w.im.is_finite()) {
            return Err(Error::domain(format!("map is not finite at ({}, {})", p[0], p[1])));
        }
        *p = [w.re, w.im];
    }
    mesh.check_orientation()?;
    annulus_discrete(&mesh, n)
}

/// Modulus of the image of the annulus `dom` under `f`, computed with the
/// image of the source lattice as the mesh. `f` must send the inner circle
/// to the inner boundary of the image.
pub fn pushforward_modulus<F>(f: F, dom: &GridDomain) -> Result<ModulusEstimate>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    dom.validate()?;
    let DomainKind::Annulus { r_in, r_out } = dom.kind else {
        return Err(Error::domain("pushforward needs an annulus domain"));
    };
    if r_in / r_out < MIN_DISCRETE_RADIUS {
        return Err(Error::domain("annulus too thin for the discrete pushforward"));
    }
    let n = dom.resolution;
    let fine = pushforward_once(&f, r_in, r_out, n)?;
    let coarse = pushforward_once(&f, r_in, r_out, n / 2)?;
    Ok(ModulusEstimate {
        value: fine,
        err_est: richardson(fine, coarse),
        resolution: n,
    })
}

/// [`pushforward_modulus`] for a [`PiecewiseMap`]; every lattice node must
/// lie in some piece.
pub fn pushforward_piecewise(map: &PiecewiseMap, dom: &GridDomain) -> Result<ModulusEstimate> {
    pushforward_modulus(|z| map.eval(z), dom)
}

/// Radial stretch `z |z|^{k-1}`, which multiplies `log|z|` by `k`.
pub fn radial_power(k: f64) -> impl Fn(Complex64) -> Result<Complex64> {
    move |z: Complex64| Ok(z * z.norm().powf(k - 1.0))
}

/// Inner radius of the half-cylinder of modulus `m` in the annulus model.
pub fn half_cylinder_radius(m: f64) -> f64 {
    (-m * PI).exp()
}
