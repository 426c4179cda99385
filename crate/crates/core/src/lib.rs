//! Asymptotic distance between Jenkins-Strebel rays in Teichmüller space,
//! the explicit quasiconformal maps behind the upper bound, and discrete
//! modulus oracles to check them.
//!
//! * [`surface`]: cylinder decompositions, validation, similarity of rays.
//! * [`ray`]: points along a ray and the noded limit surface.
//! * [`asymptotics`]: the limit distance, detour metric and optimal shift.
//! * [`qc`]: the interpolating maps `P`, `Q`, `F_t`, the node correction
//!   and the quasisymmetry functional.
//! * [`oracle`]: finite-element moduli of rectangles and annuli.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::large_enum_variant)]

pub mod asymptotics;
pub mod error;
pub mod io;
pub mod oracle;
pub mod qc;
pub mod ray;
pub mod surface;

pub use num_complex::Complex64;

pub use asymptotics::{
    asymptotic_distance, detour_metric, lower_bound, modulus_ratio_term, optimal_shift,
    shifted_asymptotic_distance, AsymptoticKind, AsymptoticResult, Contributions,
};
pub use error::{Error, Result};
pub use oracle::{annulus_modulus, pushforward_modulus, quad_modulus, GridDomain, ModulusEstimate};
pub use qc::{InterpolationParams, PiecewiseMap};
pub use ray::{distance_along_ray, limit_point, ray_point, AffineStretch, NodedLimit, RayPoint};
pub use surface::{
    similarity_check, validate_decomposition, CylinderDecomposition, RaySpec, SimilarPair, Similarity,
    ValidationReport,
};
