//! Limits of the distance between two Jenkins-Strebel rays.
//!
//! For similar rays with moduli `m_j`, `m'_j` and end-point distance `d`
//! between the noded limit surfaces,
//!
//! ```text
//! lim d(r(t), r'(t)) = max{ ½ log max_j max(m'_j/m_j, m_j/m'_j), d }
//! ```
//!
//! and the limit is `+∞` for rays that are not similar. All maxima break
//! ties toward the smallest cylinder index.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::surface::{SimilarPair, Similarity};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AsymptoticKind {
    Finite { value: f64 },
    Divergent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Contributions {
    pub modulus_term: f64,
    pub end_term: f64,
    /// Left cylinder attaining the modulus term.
    pub dominant_cylinder: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticResult {
    #[serde(flatten)]
    pub kind: AsymptoticKind,
    pub contributions: Option<Contributions>,
}

impl AsymptoticResult {
    pub fn divergent() -> Self {
        AsymptoticResult {
            kind: AsymptoticKind::Divergent,
            contributions: None,
        }
    }

    pub fn value(&self) -> Option<f64> {
        match self.kind {
            AsymptoticKind::Finite { value } => Some(value),
            AsymptoticKind::Divergent => None,
        }
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self.kind, AsymptoticKind::Divergent)
    }
}

/// First index attaining the maximum.
fn argmax(values: impl IntoIterator<Item = f64>) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.into_iter().enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best
}

/// Ratios `M_j = m'_j / m_j`, each scaled by `e^{2α}`.
fn ratios(pair: &SimilarPair, alpha: f64) -> Result<Vec<f64>> {
    let scale = (2.0 * alpha).exp();
    pair.moduli_pairs()
        .into_iter()
        .map(|(m, mp)| {
            if !(m > 0.0 && mp > 0.0) {
                return Err(Error::domain(format!("moduli must be positive, got {m} and {mp}")));
            }
            Ok(scale * mp / m)
        })
        .collect()
}

fn modulus_term_of(ratios: &[f64]) -> (usize, f64) {
    let (j, worst) = argmax(ratios.iter().map(|&r| r.max(1.0 / r)));
    (j, 0.5 * worst.ln())
}

fn end_distance(pair: &SimilarPair) -> Result<f64> {
    pair.end_distance.ok_or(Error::MissingEndDistance)
}

/// `½ log max_j max(m'_j/m_j, m_j/m'_j)`.
pub fn modulus_ratio_term(pair: &SimilarPair) -> Result<f64> {
    Ok(modulus_term_of(&ratios(pair, 0.0)?).1)
}

fn finite(pair: &SimilarPair, alpha: f64) -> Result<AsymptoticResult> {
    let end_term = end_distance(pair)?;
    let (dominant_cylinder, modulus_term) = modulus_term_of(&ratios(pair, alpha)?);
    Ok(AsymptoticResult {
        kind: AsymptoticKind::Finite {
            value: modulus_term.max(end_term),
        },
        contributions: Some(Contributions {
            modulus_term,
            end_term,
            dominant_cylinder,
        }),
    })
}

pub fn asymptotic_distance(similarity: &Similarity) -> Result<AsymptoticResult> {
    match similarity {
        Similarity::Similar(pair) => finite(pair, 0.0),
        Similarity::NotSimilar(_) => Ok(AsymptoticResult::divergent()),
    }
}

/// The detour metric `½ log max_j M_j + ½ log max_j 1/M_j`.
pub fn detour_metric(pair: &SimilarPair) -> Result<f64> {
    let r = ratios(pair, 0.0)?;
    let up = argmax(r.iter().copied()).1;
    let down = argmax(r.iter().map(|&x| 1.0 / x)).1;
    // nonnegative exactly; for k = 1 the two logs cancel to a few ulp either way
    Ok((0.5 * up.ln() + 0.5 * down.ln()).max(0.0))
}

/// Shift `α = ¼ log(max_j 1/M_j / max_j M_j)` that balances the two
/// one-sided maxima once the right ray starts at `r'(α)`.
pub fn optimal_shift(pair: &SimilarPair) -> Result<f64> {
    let r = ratios(pair, 0.0)?;
    let up = argmax(r.iter().copied()).1;
    let down = argmax(r.iter().map(|&x| 1.0 / x)).1;
    Ok(0.25 * (down / up).ln())
}

/// The limit with every `m'_j` replaced by `e^{2α} m'_j`.
pub fn shifted_asymptotic_distance(pair: &SimilarPair, alpha: f64) -> Result<AsymptoticResult> {
    if !alpha.is_finite() {
        return Err(Error::domain(format!("shift {alpha} must be finite")));
    }
    finite(pair, alpha)
}

/// Largest of the two known lower bounds for `liminf d(r(t), r'(t))`: the
/// modulus-ratio bound and the end-point distance.
pub fn lower_bound(pair: &SimilarPair) -> Result<f64> {
    let end = end_distance(pair)?;
    Ok(modulus_ratio_term(pair)?.max(end))
}


#[cfg(test)]
mod tests {
    use super::test_support::pair;
    use super::*;
    use crate::surface::fixtures::chain;
    use crate::surface::{similarity_check, RaySpec};
    use approx::assert_abs_diff_eq;

    const HALF_LOG2: f64 = 0.346_573_590_279_972_64;

    #[test]
    fn modulus_ratio_examples() {
        assert_abs_diff_eq!(modulus_ratio_term(&pair(&[1.0, 2.0], &[2.0, 2.0], 0.0)).unwrap(), HALF_LOG2, epsilon = 1e-15);
        assert_eq!(modulus_ratio_term(&pair(&[1.5, 0.5], &[1.5, 0.5], 0.0)).unwrap(), 0.0);
        assert_abs_diff_eq!(modulus_ratio_term(&pair(&[1.0], &[3.0], 0.0)).unwrap(), 0.5 * 3f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn asymptotic_distance_examples() {
        let s = Similarity::Similar(pair(&[1.0, 2.0], &[2.0, 2.0], 0.0));
        let r = asymptotic_distance(&s).unwrap();
        assert_abs_diff_eq!(r.value().unwrap(), HALF_LOG2, epsilon = 1e-15);
        let c = r.contributions.unwrap();
        assert_eq!(c.dominant_cylinder, 0);
        assert_eq!(c.end_term, 0.0);

        let s = Similarity::Similar(pair(&[1.0, 2.0], &[1.0, 2.0], 0.7));
        assert_eq!(asymptotic_distance(&s).unwrap().value(), Some(0.7));

        let a = RaySpec::new(chain(&[1.0, 2.0])).unwrap();
        let b = RaySpec::new(chain(&[1.0, 2.0, 3.0])).unwrap();
        let s = similarity_check(&a, &b).unwrap();
        assert!(asymptotic_distance(&s).unwrap().is_divergent());
    }

    #[test]
    fn missing_end_distance() {
        let mut p = pair(&[1.0], &[2.0], 0.0);
        p.end_distance = None;
        assert!(matches!(
            asymptotic_distance(&Similarity::Similar(p.clone())),
            Err(Error::MissingEndDistance)
        ));
        assert!(matches!(lower_bound(&p), Err(Error::MissingEndDistance)));
        // the modulus-only quantities do not need it
        assert!(detour_metric(&p).is_ok());
    }

    #[test]
    fn detour_examples() {
        assert_abs_diff_eq!(detour_metric(&pair(&[1.0, 2.0], &[2.0, 2.0], 0.0)).unwrap(), HALF_LOG2, epsilon = 1e-15);
        assert_abs_diff_eq!(detour_metric(&pair(&[1.0, 4.0], &[2.0, 2.0], 0.0)).unwrap(), 2f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(detour_metric(&pair(&[0.7, 1.9], &[2.1, 5.7], 0.0)).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn optimal_shift_examples() {
        let p = pair(&[1.0, 2.0], &[2.0, 2.0], 0.0);
        let a = optimal_shift(&p).unwrap();
        assert_abs_diff_eq!(a, -0.173_286_795_139_986_3, epsilon = 1e-15);
        let r = ratios(&p, a).unwrap();
        let up = r.iter().cloned().fold(f64::MIN, f64::max);
        let down = r.iter().map(|x| 1.0 / x).fold(f64::MIN, f64::max);
        assert_abs_diff_eq!(up, 2f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(down, 2f64.sqrt(), epsilon = 1e-12);

        assert_eq!(optimal_shift(&pair(&[1.0, 3.0], &[1.0, 3.0], 0.0)).unwrap(), 0.0);
        assert_abs_diff_eq!(optimal_shift(&pair(&[1.0, 4.0], &[2.0, 2.0], 0.0)).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn shifted_examples() {
        let p = pair(&[1.0, 2.0], &[2.0, 2.0], 0.0);
        let v = shifted_asymptotic_distance(&p, -0.25 * 2f64.ln()).unwrap().value().unwrap();
        assert_abs_diff_eq!(v, 0.25 * 2f64.ln(), epsilon = 1e-15);
        assert_eq!(
            shifted_asymptotic_distance(&p, 0.0).unwrap(),
            asymptotic_distance(&Similarity::Similar(p.clone())).unwrap()
        );
        let far = pair(&[1.0, 2.0], &[2.0, 2.0], 10.0);
        for a in [-3.0, -1.0, 0.0, 0.5, 2.0] {
            assert_eq!(shifted_asymptotic_distance(&far, a).unwrap().value(), Some(10.0));
        }
        assert!(shifted_asymptotic_distance(&p, f64::NAN).is_err());
    }

    #[test]
    fn lower_bound_examples() {
        let p = pair(&[1.0, 3.0], &[3.0, 1.0], 0.2);
        assert_abs_diff_eq!(lower_bound(&p).unwrap(), 0.5 * 3f64.ln(), epsilon = 1e-15);
        assert_eq!(lower_bound(&pair(&[2.0], &[2.0], 0.0)).unwrap(), 0.0);
        let s = Similarity::Similar(p.clone());
        assert_eq!(Some(lower_bound(&p).unwrap()), asymptotic_distance(&s).unwrap().value());
    }

    #[test]
    fn ties_go_to_smallest_index() {
        let p = pair(&[1.0, 1.0, 1.0], &[2.0, 0.5, 2.0], 0.0);
        let r = asymptotic_distance(&Similarity::Similar(p)).unwrap();
        assert_eq!(r.contributions.unwrap().dominant_cylinder, 0);
    }

    #[test]
    fn result_json_shape() {
        let r = asymptotic_distance(&Similarity::Similar(pair(&[1.0], &[1.0], 0.5))).unwrap();
        let v: serde_json::Value = serde_json::to_value(r).unwrap();
        assert_eq!(v["kind"], "finite");
        assert_eq!(v["value"], 0.5);
        let d = serde_json::to_value(AsymptoticResult::divergent()).unwrap();
        assert_eq!(d["kind"], "divergent");
    }
}
