//! Input file schemas shared by the command-line tool and the tests.
//! Complex numbers are written as `[re, im]`.

use std::collections::BTreeSet;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qc::{AnnulusSpec, InterpolationParams};
use crate::surface::{similarity_check, CylinderDecomposition, RaySpec, Similarity};

fn one() -> f64 {
    1.0
}

fn side_one() -> u8 {
    1
}

fn unit() -> [f64; 2] {
    [1.0, 0.0]
}

fn default_eps() -> f64 {
    DEFAULT_EPS
}

/// `ε'` used for the upper bound when a pair file does not set one.
pub const DEFAULT_EPS: f64 = 0.05;

pub fn complex(v: [f64; 2]) -> Complex64 {
    Complex64::new(v[0], v[1])
}

/// Sweep grids that may be given in a scenario file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    #[serde(default)]
    pub t: Option<Vec<f64>>,
    #[serde(default)]
    pub alpha: Option<Vec<f64>>,
    #[serde(default)]
    pub eps: Option<Vec<f64>>,
}

/// End-map data used to build the upper-bound map `F_t` for a pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairInterpolation {
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "unit")]
    pub c: [f64; 2],
    #[serde(default)]
    pub psi: Vec<[f64; 2]>,
    /// Dilatation of the end maps; defaults to `exp(2 d)`.
    #[serde(rename = "K_h", default)]
    pub k_h: Option<f64>,
}

impl Default for PairInterpolation {
    fn default() -> Self {
        PairInterpolation {
            eps: DEFAULT_EPS,
            c: unit(),
            psi: Vec::new(),
            k_h: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairFile {
    pub left: CylinderDecomposition,
    pub right: CylinderDecomposition,
    /// `(left label, right label)`; right cylinders are renamed before the
    /// similarity check. Unlisted cylinders are matched by label.
    #[serde(default)]
    pub curve_match: Option<Vec<(String, String)>>,
    #[serde(default)]
    pub end_distance: Option<f64>,
    #[serde(default)]
    pub interpolation: Option<PairInterpolation>,
    #[serde(default)]
    pub sweep: Sweep,
}

impl PairFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    fn relabeled_right(&self) -> Result<CylinderDecomposition> {
        let mut right = self.right.clone();
        let Some(pairs) = &self.curve_match else {
            return Ok(right);
        };
        let mut seen_left = BTreeSet::new();
        let mut seen_right = BTreeSet::new();
        for (l, r) in pairs {
            if !seen_left.insert(l) || !seen_right.insert(r) {
                return Err(Error::domain(format!("curve_match repeats {l} or {r}")));
            }
        }
        let original: Vec<String> = right.cylinders.iter().map(|c| c.core_label.clone()).collect();
        for (l, r) in pairs {
            let idx = original
                .iter()
                .position(|x| x == r)
                .ok_or_else(|| Error::domain(format!("curve_match names unknown right cylinder {r}")))?;
            right.cylinders[idx].core_label = l.clone();
        }
        Ok(right)
    }

    /// Validates both sides and decides similarity. A similar pair gets
    /// the file's end distance, which is then required.
    pub fn resolve(&self) -> Result<Similarity> {
        let left = RaySpec::new(self.left.clone())?;
        let right = RaySpec::new(self.relabeled_right()?)?;
        match similarity_check(&left, &right)? {
            Similarity::Similar(pair) => {
                let d = self.end_distance.ok_or(Error::MissingEndDistance)?;
                Ok(Similarity::Similar(pair.with_end_distance(d)?))
            }
            other => Ok(other),
        }
    }

    pub fn interpolation(&self) -> PairInterpolation {
        self.interpolation.clone().unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnulusEntry {
    #[serde(default)]
    pub cylinder: usize,
    #[serde(default = "side_one")]
    pub side: u8,
    #[serde(rename = "M")]
    pub ratio: f64,
    pub m: f64,
    #[serde(default = "unit")]
    pub c: [f64; 2],
    /// Lift of `arg c` for the twist audit.
    #[serde(default)]
    pub arg: Option<f64>,
    #[serde(default)]
    pub psi: Vec<[f64; 2]>,
    pub eps: f64,
    #[serde(rename = "X", default)]
    pub exponent: Option<f64>,
    #[serde(rename = "K_h", default = "one")]
    pub k_h: f64,
}

impl AnnulusEntry {
    pub fn params(&self) -> Result<InterpolationParams> {
        let psi = self.psi.iter().copied().map(complex).collect();
        let mut p = InterpolationParams::new(self.ratio, self.m, complex(self.c), psi, self.eps)?;
        if let Some(x) = self.exponent {
            p = p.with_exponent(x)?;
        }
        if let Some(arg) = self.arg {
            p = p.with_twist(arg)?;
        }
        Ok(p)
    }

    /// Same entry with `ε'` replaced; an explicit `X` is kept.
    pub fn params_with_eps(&self, eps: f64) -> Result<InterpolationParams> {
        AnnulusEntry { eps, ..self.clone() }.params()
    }

    pub fn spec(&self) -> Result<AnnulusSpec> {
        Ok(AnnulusSpec {
            cylinder: self.cylinder,
            side: self.side,
            params: self.params()?,
            k_h: self.k_h,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsFile {
    pub annuli: Vec<AnnulusEntry>,
    #[serde(default)]
    pub sweep: Sweep,
}

impl ParamsFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn specs(&self) -> Result<Vec<AnnulusSpec>> {
        self.annuli.iter().map(AnnulusEntry::spec).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::fixtures::chain;

    fn pair_json(right_labels: Option<&[&str]>, d: Option<f64>) -> String {
        let left = chain(&[1.0, 2.0]);
        let mut right = chain(&[2.0, 2.0]);
        if let Some(labels) = right_labels {
            for (c, l) in right.cylinders.iter_mut().zip(labels) {
                c.core_label = l.to_string();
            }
        }
        let mut v = serde_json::json!({ "left": left, "right": right });
        if let Some(d) = d {
            v["end_distance"] = d.into();
        }
        v.to_string()
    }

    #[test]
    fn pair_file_resolves() {
        let f = PairFile::from_json(&pair_json(None, Some(0.0))).unwrap();
        let s = f.resolve().unwrap();
        assert_eq!(s.pair().unwrap().end_distance, Some(0.0));
        assert_eq!(f.interpolation().eps, DEFAULT_EPS);
    }

    #[test]
    fn missing_end_distance() {
        let f = PairFile::from_json(&pair_json(None, None)).unwrap();
        assert!(matches!(f.resolve(), Err(Error::MissingEndDistance)));
    }

    #[test]
    fn curve_match_relabels() {
        let left = chain(&[1.0, 2.0]);
        let labels: Vec<String> = left.cylinders.iter().map(|c| c.core_label.clone()).collect();
        let text = pair_json(Some(&["p", "q"]), Some(0.0));
        let f = PairFile::from_json(&text).unwrap();
        assert!(!f.resolve().unwrap().is_similar());

        let mut f = f;
        f.curve_match = Some(vec![(labels[0].clone(), "p".into()), (labels[1].clone(), "q".into())]);
        assert!(f.resolve().unwrap().is_similar());

        f.curve_match = Some(vec![(labels[0].clone(), "zz".into())]);
        assert!(f.resolve().is_err());
    }

    #[test]
    fn params_file() {
        let text = r#"{"annuli":[{"M":2,"m":1,"c":[1,0],"psi":[[1,0]],"eps":0.1,"X":-1,"K_h":1.5}],
                       "sweep":{"t":[1,2]}}"#;
        let f = ParamsFile::from_json(text).unwrap();
        let s = f.specs().unwrap();
        assert_eq!(s[0].params.exponent, -1.0);
        assert_eq!(s[0].side, 1);
        assert_eq!(s[0].k_h, 1.5);
        assert_eq!(f.sweep.t, Some(vec![1.0, 2.0]));
        assert!(ParamsFile::from_json(r#"{"annuli":[{"M":2,"m":1,"eps":0.1,"bogus":1}]}"#).is_err());
    }
}
