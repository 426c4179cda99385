//! Sweep grids: `a:b:step` (inclusive of `b` up to rounding) or `x,y,z`.

use std::str::FromStr;

#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

const MAX_POINTS: usize = 1_000_000;

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s.is_empty() {
            return Err("empty grid".into());
        }
        let num = |x: &str| -> Result<f64, String> {
            let v: f64 = x.trim().parse().map_err(|_| format!("not a number: {x:?}"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("grid value {x} is not finite"))
            }
        };
        if s.contains(':') {
            let parts: Vec<&str> = s.split(':').collect();
            let [a, b, step] = parts[..] else {
                return Err(format!("range {s:?} must be start:stop:step"));
            };
            let (a, b, step) = (num(a)?, num(b)?, num(step)?);
            if !(step > 0.0) || b < a {
                return Err(format!("range {s:?} needs step > 0 and stop >= start"));
            }
            // count from the ratio so that 0:1:0.1 keeps its endpoint
            let n = ((b - a) / step + 1e-9).floor();
            if n >= MAX_POINTS as f64 {
                return Err(format!("range {s:?} has more than {MAX_POINTS} points"));
            }
            Ok(Grid((0..=n as usize).map(|i| a + i as f64 * step).collect()))
        } else {
            s.split(',').map(num).collect::<Result<Vec<_>, _>>().map(Grid)
        }
    }
}

/// Evenly spaced `n` points over `[a, b]`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}
