//! Jenkins-Strebel cylinder decompositions.
//!
//! A decomposition records the flat structure of a Jenkins-Strebel
//! differential combinatorially: one cylinder per core curve, with its
//! circumference and modulus, plus the gluing of boundary arcs. Boundary
//! circles are parameterized by arc length in `[0, c_j)` and gluing
//! intervals are half-open, so the gluing is an involution on intervals
//! without endpoint ambiguity.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ray::{limit_point, DiskId};

/// Relative tolerance for comparing arc lengths.
const LENGTH_TOL: f64 = 1e-9;

/// Tolerance for the unit-norm area check.
const AREA_TOL: f64 = 1e-9;

/// Largest cylinder count for which side-flip matching is enumerated.
const MAX_FLIP_SEARCH: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cylinder {
    pub core_label: String,
    pub circumference: f64,
    pub modulus: f64,
}

impl Cylinder {
    /// Flat area, height times circumference.
    pub fn area(&self) -> f64 {
        self.modulus * self.circumference * self.circumference
    }
}

/// A half-open arc `[start, end)` on boundary `side` (1 or 2) of a cylinder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryInterval {
    pub cylinder: usize,
    pub side: u8,
    pub start: f64,
    pub end: f64,
}

impl BoundaryInterval {
    pub fn length(&self) -> f64 {
        self.end - self.start
    }

    pub fn disk(&self) -> DiskId {
        DiskId {
            cylinder: self.cylinder,
            side: self.side,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gluing {
    pub a: BoundaryInterval,
    pub b: BoundaryInterval,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub order: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CylinderDecomposition {
    pub genus: u32,
    pub punctures: u32,
    #[serde(default)]
    pub unit_norm: bool,
    pub cylinders: Vec<Cylinder>,
    pub gluings: Vec<Gluing>,
    #[serde(default)]
    pub critical_points: Vec<CriticalPoint>,
}

impl CylinderDecomposition {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("decomposition serializes")
    }

    pub fn k(&self) -> usize {
        self.cylinders.len()
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.cylinders.iter().map(|c| c.modulus).collect()
    }

    pub fn curve_system(&self) -> CurveSystem {
        CurveSystem(self.cylinders.iter().map(|c| c.core_label.clone()).collect())
    }

    pub fn cylinder_index(&self, label: &str) -> Option<usize> {
        self.cylinders.iter().position(|c| c.core_label == label)
    }

    pub fn total_area(&self) -> f64 {
        self.cylinders.iter().map(Cylinder::area).sum()
    }

    pub fn validate(&self) -> ValidationReport {
        validate_decomposition(self)
    }
}

/// Ordered system of disjoint core curves, identified by opaque ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveSystem(pub Vec<String>);

impl CurveSystem {
    pub fn new(ids: Vec<String>) -> Result<Self> {
        if ids.is_empty() {
            return Err(Error::domain("curve system must contain at least one curve"));
        }
        let distinct: BTreeSet<&String> = ids.iter().collect();
        if distinct.len() != ids.len() {
            return Err(Error::domain("curve ids must be distinct"));
        }
        Ok(CurveSystem(ids))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Hyperbolicity,
    EmptyDecomposition,
    NonPositiveCylinder,
    DuplicateLabel,
    UnknownCylinder,
    BadSide,
    IntervalOutOfRange,
    IntervalLengthMismatch,
    SelfGluing,
    BoundaryCoverage,
    CriticalOrder,
    PunctureCount,
    GaussBonnet,
    UnitNorm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub message: String,
}

/// Outcome of [`validate_decomposition`]. `violations` are fatal; the
/// Gauss-Bonnet count only ever produces a warning.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    fn push(&mut self, kind: ViolationKind, message: impl Into<String>) {
        self.violations.push(Violation {
            kind,
            message: message.into(),
        });
    }

    fn warn(&mut self, kind: ViolationKind, message: impl Into<String>) {
        self.warnings.push(Violation {
            kind,
            message: message.into(),
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        let msgs: Vec<&str> = self.violations.iter().map(|v| v.message.as_str()).collect();
        write!(f, "{}", msgs.join("; "))
    }
}

fn length_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= LENGTH_TOL * a.abs().max(b.abs()).max(1.0)
}

/// Checks every structural invariant of a decomposition and reports all
/// violations at once.
pub fn validate_decomposition(spec: &CylinderDecomposition) -> ValidationReport {
    let mut report = ValidationReport::default();
    let g = spec.genus as i64;
    let n = spec.punctures as i64;

    if 3 * g - 3 + n <= 0 {
        report.push(
            ViolationKind::Hyperbolicity,
            format!("3g-3+n = {} must be positive", 3 * g - 3 + n),
        );
    }
    if spec.cylinders.is_empty() {
        report.push(ViolationKind::EmptyDecomposition, "no cylinders");
    }

    let mut labels = BTreeSet::new();
    for (j, cyl) in spec.cylinders.iter().enumerate() {
        if !(cyl.circumference.is_finite() && cyl.circumference > 0.0) {
            report.push(
                ViolationKind::NonPositiveCylinder,
                format!("cylinder {j}: circumference {} is not positive", cyl.circumference),
            );
        }
        if !(cyl.modulus.is_finite() && cyl.modulus > 0.0) {
            report.push(
                ViolationKind::NonPositiveCylinder,
                format!("cylinder {j}: modulus {} is not positive", cyl.modulus),
            );
        }
        if !labels.insert(cyl.core_label.as_str()) {
            report.push(
                ViolationKind::DuplicateLabel,
                format!("core label {:?} used twice", cyl.core_label),
            );
        }
    }

    // Per-boundary list of (start, end, gluing index).
    type Spans = Vec<(f64, f64, usize)>;
    let mut boundaries: BTreeMap<(usize, u8), Spans> = BTreeMap::new();
    for (gi, gluing) in spec.gluings.iter().enumerate() {
        let mut ok = true;
        for iv in [&gluing.a, &gluing.b] {
            if iv.cylinder >= spec.cylinders.len() {
                report.push(
                    ViolationKind::UnknownCylinder,
                    format!("gluing {gi}: cylinder {} does not exist", iv.cylinder),
                );
                ok = false;
                continue;
            }
            if iv.side != 1 && iv.side != 2 {
                report.push(
                    ViolationKind::BadSide,
                    format!("gluing {gi}: side {} is not 1 or 2", iv.side),
                );
                ok = false;
                continue;
            }
            let c = spec.cylinders[iv.cylinder].circumference;
            let in_range = iv.start.is_finite()
                && iv.end.is_finite()
                && iv.start >= -LENGTH_TOL
                && iv.start < iv.end
                && iv.end <= c * (1.0 + LENGTH_TOL);
            if !in_range {
                report.push(
                    ViolationKind::IntervalOutOfRange,
                    format!(
                        "gluing {gi}: interval [{}, {}) not inside [0, {c})",
                        iv.start, iv.end
                    ),
                );
                ok = false;
            }
        }
        if !ok {
            continue;
        }
        if !length_close(gluing.a.length(), gluing.b.length()) {
            report.push(
                ViolationKind::IntervalLengthMismatch,
                format!(
                    "gluing {gi}: interval length mismatch ({} vs {})",
                    gluing.a.length(),
                    gluing.b.length()
                ),
            );
        }
        if gluing.a == gluing.b {
            report.push(
                ViolationKind::SelfGluing,
                format!("gluing {gi}: interval glued to itself"),
            );
        }
        for iv in [&gluing.a, &gluing.b] {
            boundaries
                .entry((iv.cylinder, iv.side))
                .or_default()
                .push((iv.start, iv.end, gi));
        }
    }

    // Every boundary circle must be tiled exactly once by glued intervals.
    for (j, cyl) in spec.cylinders.iter().enumerate() {
        for side in [1u8, 2] {
            let c = cyl.circumference;
            let Some(ivs) = boundaries.get_mut(&(j, side)) else {
                report.push(
                    ViolationKind::BoundaryCoverage,
                    format!("cylinder {j} side {side}: boundary is not glued"),
                );
                continue;
            };
            ivs.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut cursor = 0.0;
            for &(start, end, gi) in ivs.iter() {
                if !length_close(start, cursor) {
                    let what = if start < cursor { "overlaps" } else { "leaves a gap before" };
                    report.push(
                        ViolationKind::BoundaryCoverage,
                        format!("cylinder {j} side {side}: gluing {gi} {what} arc position {cursor}"),
                    );
                }
                cursor = end;
            }
            if !length_close(cursor, c) {
                report.push(
                    ViolationKind::BoundaryCoverage,
                    format!("cylinder {j} side {side}: glued length {cursor} != circumference {c}"),
                );
            }
        }
    }

    let mut poles = 0i64;
    let mut order_sum = 0i64;
    for (i, cp) in spec.critical_points.iter().enumerate() {
        if cp.order < -1 {
            report.push(
                ViolationKind::CriticalOrder,
                format!("critical point {i}: order {} < -1", cp.order),
            );
        }
        if cp.order == -1 {
            poles += 1;
        }
        order_sum += cp.order as i64;
    }
    if poles != n {
        report.push(
            ViolationKind::PunctureCount,
            format!("{poles} simple poles but {n} punctures"),
        );
    }
    if order_sum != 4 * g - 4 {
        report.warn(
            ViolationKind::GaussBonnet,
            format!("sum of critical orders {order_sum} != 4g-4 = {}", 4 * g - 4),
        );
    }

    if spec.unit_norm {
        let area = spec.total_area();
        if (area - 1.0).abs() > AREA_TOL {
            report.push(
                ViolationKind::UnitNorm,
                format!("unit_norm set but total area sum m_j c_j^2 = {area}"),
            );
        }
    }

    report
}

/// Evaluates the natural coordinate `(2/(n+2)) z^((n+2)/2)` around a
/// critical point of order `n`, principal branch `arg z in (-pi, pi]`.
pub fn critical_local_chart(order: i32, z: Complex64) -> Result<Complex64> {
    if order < -1 {
        return Err(Error::InvalidOrder(order));
    }
    let n2 = order + 2;
    let scale = 2.0 / n2 as f64;
    if n2 % 2 == 0 {
        return Ok(z.powi(n2 / 2) * scale);
    }
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::domain(format!(
            "z = 0 is a branch point for odd order {order}"
        )));
    }
    let (r, theta) = z.to_polar();
    let e = n2 as f64 / 2.0;
    Ok(Complex64::from_polar(scale * r.powf(e), theta * e))
}

/// A validated base decomposition for a Jenkins-Strebel ray.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RaySpec {
    decomposition: CylinderDecomposition,
}

impl RaySpec {
    pub fn new(decomposition: CylinderDecomposition) -> Result<Self> {
        let report = decomposition.validate();
        if !report.is_valid() {
            return Err(Error::Validation(report));
        }
        Ok(RaySpec { decomposition })
    }

    pub fn decomposition(&self) -> &CylinderDecomposition {
        &self.decomposition
    }

    pub fn k(&self) -> usize {
        self.decomposition.k()
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.decomposition.moduli()
    }

    /// Replaces every modulus, keeping the combinatorics.
    pub fn with_moduli(&self, moduli: &[f64]) -> Result<Self> {
        if moduli.len() != self.k() {
            return Err(Error::domain("modulus count does not match cylinder count"));
        }
        let mut d = self.decomposition.clone();
        for (c, &m) in d.cylinders.iter_mut().zip(moduli) {
            c.modulus = m;
        }
        d.unit_norm = false;
        RaySpec::new(d)
    }
}

impl<'de> Deserialize<'de> for RaySpec {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let d = CylinderDecomposition::deserialize(de)?;
        RaySpec::new(d).map_err(serde::de::Error::custom)
    }
}

/// Two similar rays with their curves and limit components matched.
///
/// `curve_match[j]` is the right-hand cylinder carrying the left curve `j`;
/// `side_flip[j]` records whether boundary sides 1 and 2 are exchanged on
/// that cylinder; `component_match[λ]` is the right component matched to
/// left component `λ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimilarPair {
    pub left: RaySpec,
    pub right: RaySpec,
    pub curve_match: Vec<usize>,
    pub side_flip: Vec<bool>,
    pub component_match: Vec<usize>,
    pub end_distance: Option<f64>,
}

impl SimilarPair {
    pub fn with_end_distance(mut self, d: f64) -> Result<Self> {
        if !(d.is_finite() && d >= 0.0) {
            return Err(Error::domain(format!("end distance {d} must be finite and >= 0")));
        }
        self.end_distance = Some(d);
        Ok(self)
    }

    pub fn k(&self) -> usize {
        self.curve_match.len()
    }

    /// Matched moduli `(m_j, m'_j)` in left cylinder order.
    pub fn moduli_pairs(&self) -> Vec<(f64, f64)> {
        let l = self.left.decomposition().cylinders.as_slice();
        let r = self.right.decomposition().cylinders.as_slice();
        self.curve_match
            .iter()
            .enumerate()
            .map(|(j, &jr)| (l[j].modulus, r[jr].modulus))
            .collect()
    }

    pub fn swapped(&self) -> SimilarPair {
        let k = self.k();
        let mut inv = vec![0; k];
        let mut flip = vec![false; k];
        for (j, &jr) in self.curve_match.iter().enumerate() {
            inv[jr] = j;
            flip[jr] = self.side_flip[j];
        }
        let mut comp_inv = vec![0; self.component_match.len()];
        for (a, &b) in self.component_match.iter().enumerate() {
            comp_inv[b] = a;
        }
        SimilarPair {
            left: self.right.clone(),
            right: self.left.clone(),
            curve_match: inv,
            side_flip: flip,
            component_match: comp_inv,
            end_distance: self.end_distance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NotSimilarReason {
    CurveCount { left: usize, right: usize },
    Labels,
    GluingGraph,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Similarity {
    Similar(SimilarPair),
    NotSimilar(NotSimilarReason),
}

impl Similarity {
    pub fn is_similar(&self) -> bool {
        matches!(self, Similarity::Similar(_))
    }

    pub fn pair(&self) -> Option<&SimilarPair> {
        match self {
            Similarity::Similar(p) => Some(p),
            Similarity::NotSimilar(_) => None,
        }
    }
}

/// Undirected disk adjacency of the gluing graph, keyed by curve id.
fn adjacency(spec: &CylinderDecomposition) -> BTreeSet<((String, u8), (String, u8))> {
    let key = |iv: &BoundaryInterval| (spec.cylinders[iv.cylinder].core_label.clone(), iv.side);
    spec.gluings
        .iter()
        .map(|g| {
            let (a, b) = (key(&g.a), key(&g.b));
            if a <= b {
                (a, b)
            } else {
                (b, a)
            }
        })
        .collect()
}

/// Decides whether two rays are similar: same number of curves, the same
/// curve ids, and gluing graphs that agree up to exchanging the two sides
/// of individual cylinders. The end distance of the returned pair is unset.
pub fn similarity_check(a: &RaySpec, b: &RaySpec) -> Result<Similarity> {
    let (da, db) = (a.decomposition(), b.decomposition());
    if da.k() != db.k() {
        return Ok(Similarity::NotSimilar(NotSimilarReason::CurveCount {
            left: da.k(),
            right: db.k(),
        }));
    }
    let mut curve_match = Vec::with_capacity(da.k());
    for cyl in &da.cylinders {
        match db.cylinder_index(&cyl.core_label) {
            Some(i) => curve_match.push(i),
            None => return Ok(Similarity::NotSimilar(NotSimilarReason::Labels)),
        }
    }

    let k = da.k();
    if k > MAX_FLIP_SEARCH {
        return Err(Error::domain(format!(
            "side matching is enumerated for at most {MAX_FLIP_SEARCH} cylinders, got {k}"
        )));
    }
    let target = adjacency(da);
    let right_adj = adjacency(db);
    let flip_side = |s: u8| 3 - s;
    let mut found = None;
    for mask in 0u32..(1u32 << k) {
        let flipped: BTreeSet<_> = right_adj
            .iter()
            .map(|((la, sa), (lb, sb))| {
                let f = |l: &String, s: u8| {
                    let j = da.cylinder_index(l).expect("labels already matched");
                    if mask & (1 << j) != 0 {
                        (l.clone(), flip_side(s))
                    } else {
                        (l.clone(), s)
                    }
                };
                let (x, y) = (f(la, *sa), f(lb, *sb));
                if x <= y {
                    (x, y)
                } else {
                    (y, x)
                }
            })
            .collect();
        if flipped == target {
            found = Some(mask);
            break;
        }
    }
    let Some(mask) = found else {
        return Ok(Similarity::NotSimilar(NotSimilarReason::GluingGraph));
    };
    let side_flip: Vec<bool> = (0..k).map(|j| mask & (1 << j) != 0).collect();

    let la = limit_point(a.decomposition())?;
    let lb = limit_point(b.decomposition())?;
    let mut component_match = vec![usize::MAX; la.components.len()];
    for (lam, comp) in la.components.iter().enumerate() {
        let disk = comp.disks[0];
        let side = if side_flip[disk.cylinder] {
            flip_side(disk.side)
        } else {
            disk.side
        };
        let image = DiskId {
            cylinder: curve_match[disk.cylinder],
            side,
        };
        component_match[lam] = lb
            .component_of(image)
            .expect("every disk belongs to a component");
    }

    Ok(Similarity::Similar(SimilarPair {
        left: a.clone(),
        right: b.clone(),
        curve_match,
        side_flip,
        component_match,
        end_distance: None,
    }))
}

/// Small decompositions for examples and tests.
pub mod fixtures {
    use super::*;

    pub fn iv(cylinder: usize, side: u8, start: f64, end: f64) -> BoundaryInterval {
        BoundaryInterval {
            cylinder,
            side,
            start,
            end,
        }
    }

    /// One-cylinder torus with one marked point.
    pub fn torus(modulus: f64, circumference: f64) -> CylinderDecomposition {
        CylinderDecomposition {
            genus: 1,
            punctures: 1,
            unit_norm: false,
            cylinders: vec![Cylinder {
                core_label: "a".into(),
                circumference,
                modulus,
            }],
            gluings: vec![Gluing {
                a: iv(0, 1, 0.0, circumference),
                b: iv(0, 2, 0.0, circumference),
            }],
            critical_points: vec![CriticalPoint { order: -1 }],
        }
    }

    /// Chain of circumference-1 cylinders labelled `g0, g1, ...`: the top
    /// of each is glued half to itself and half to the next cylinder's
    /// bottom, cyclically. Genus and critical points are those of the
    /// two-cylinder surface; for other lengths the Gauss-Bonnet check only
    /// warns.
    pub fn chain(moduli: &[f64]) -> CylinderDecomposition {
        let k = moduli.len();
        let cylinders = moduli
            .iter()
            .enumerate()
            .map(|(j, &m)| Cylinder {
                core_label: format!("g{j}"),
                circumference: 1.0,
                modulus: m,
            })
            .collect();
        let mut gluings = Vec::new();
        for j in 0..k {
            // top of j [0, 0.5) to bottom of j+1 (cyclically) [0.5, 1)
            let next = (j + 1) % k;
            gluings.push(Gluing {
                a: iv(j, 2, 0.0, 0.5),
                b: iv(next, 1, 0.5, 1.0),
            });
            gluings.push(Gluing {
                a: iv(j, 2, 0.5, 1.0),
                b: iv(j, 1, 0.0, 0.5),
            });
        }
        CylinderDecomposition {
            genus: 2,
            punctures: 0,
            unit_norm: false,
            cylinders,
            gluings,
            critical_points: vec![CriticalPoint { order: 2 }, CriticalPoint { order: 2 }],
        }
    }

    /// Similar pair of chains with moduli `m` and `mp` and end distance `d`.
    pub fn similar_pair(m: &[f64], mp: &[f64], d: f64) -> Result<SimilarPair> {
        let a = RaySpec::new(chain(m))?;
        let b = RaySpec::new(chain(mp))?;
        match similarity_check(&a, &b)? {
            Similarity::Similar(p) => p.with_end_distance(d),
            Similarity::NotSimilar(r) => Err(Error::domain(format!("chains not similar: {r:?}"))),
        }
    }
}
