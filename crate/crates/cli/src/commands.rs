use std::f64::consts::PI;
use std::path::Path;

use log::{info, warn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};
use strebel_core::asymptotics::{asymptotic_distance, lower_bound, optimal_shift, shifted_asymptotic_distance};
use strebel_core::io::{complex, PairFile, ParamsFile};
use strebel_core::oracle::{annulus_modulus, quad_modulus, DomainKind, GridDomain};
use strebel_core::qc::{annuli_for_pair, assemble_f_with_offset, NodeCorrection};
use strebel_core::surface::{validate_decomposition, CylinderDecomposition, Similarity, SimilarPair};
use strebel_core::Error;

use crate::grid::linspace;
use crate::output::{json_cell, Cell, Format, Table};

/// Angular samples used for `sup K(Q)`; the seed rotates this grid.
const Q_THETA_SAMPLES: f64 = 128.0;
const DEFAULT_NODE_GRID: usize = 200;
const SHIFT_POINTS: usize = 1001;

#[derive(Debug)]
pub enum CliError {
    /// Unreadable input, malformed JSON, bad flags. Exit 2.
    Input(String),
    /// Valid input that the mathematics rejects. Exit 1.
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Domain(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) | CliError::Domain(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Json(e) => CliError::Input(format!("parse error: {e}")),
            Error::Validation(report) => CliError::Domain(format!("invalid decomposition:\n{}", report_text(&report))),
            e => CliError::Domain(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// What a command produced: text for stdout or `--out`, and an exit code.
pub struct Outcome {
    pub text: String,
    pub code: u8,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, code: 0 }
    }
}

pub struct Globals {
    pub format: Option<Format>,
    pub resolution: Option<usize>,
    pub seed: Option<u64>,
}

impl Globals {
    fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    /// Rotation of the `K(Q)` angular grid: zero unless a seed is given.
    fn theta_offset(&self) -> f64 {
        match self.seed {
            Some(s) => ChaCha8Rng::seed_from_u64(s).gen_range(0.0..2.0 * PI / Q_THETA_SAMPLES),
            None => 0.0,
        }
    }
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn check_grid(name: &str, g: &[f64], nonnegative: bool) -> CliResult<()> {
    if g.is_empty() {
        return Err(CliError::Domain(format!("{name} grid is empty")));
    }
    if let Some(x) = g.iter().find(|x| !x.is_finite() || (nonnegative && **x < 0.0)) {
        return Err(CliError::Domain(format!("{name} grid value {x} is not allowed")));
    }
    Ok(())
}

fn report_text(report: &strebel_core::ValidationReport) -> String {
    let mut out = String::new();
    for v in &report.violations {
        out.push_str(&format!("error {}: {}\n", kind_name(&v.kind), v.message));
    }
    for v in &report.warnings {
        out.push_str(&format!("warning {}: {}\n", kind_name(&v.kind), v.message));
    }
    out
}

fn kind_name<T: serde::Serialize>(k: &T) -> String {
    match serde_json::to_value(k) {
        Ok(Value::String(s)) => s,
        _ => "unknown".into(),
    }
}

pub fn validate(path: &Path, g: &Globals) -> CliResult<Outcome> {
    let spec = CylinderDecomposition::from_json(&read(path)?)?;
    let report = validate_decomposition(&spec);
    let code = if report.is_valid() { 0 } else { 1 };
    let text = match g.format_or(Format::Csv) {
        Format::Json => {
            let v = json!({ "valid": report.is_valid(), "violations": report.violations, "warnings": report.warnings });
            serde_json::to_string_pretty(&v).expect("serializable") + "\n"
        }
        Format::Csv => {
            let head = if report.is_valid() { "valid\n" } else { "invalid\n" };
            format!("{head}{}", report_text(&report))
        }
    };
    Ok(Outcome { text, code })
}

fn divergent(header: Vec<&'static str>, format: Format) -> Outcome {
    let mut t = Table::new(header);
    t.push(vec!["divergent".into()]);
    Outcome::ok(t.render(format))
}

fn load_pair(path: &Path) -> CliResult<(PairFile, Option<SimilarPair>)> {
    let file = PairFile::from_json(&read(path)?)?;
    let pair = match file.resolve()? {
        Similarity::Similar(p) => Some(p),
        Similarity::NotSimilar(reason) => {
            info!("pair is not similar: {reason:?}");
            None
        }
    };
    Ok((file, pair))
}

pub fn distance(path: &Path, t_flag: Option<Vec<f64>>, g: &Globals) -> CliResult<Outcome> {
    let header = vec!["t", "lower_bound", "K_F_t_upper", "theorem_value"];
    let format = g.format_or(Format::Csv);
    let (file, pair) = load_pair(path)?;
    let ts = t_flag.or(file.sweep.t.clone()).unwrap_or_else(|| (1..=10).map(f64::from).collect());
    check_grid("t", &ts, true)?;
    let Some(pair) = pair else {
        return Ok(divergent(header, format));
    };
    let theorem = asymptotic_distance(&Similarity::Similar(pair.clone()))?
        .value()
        .expect("similar pairs have a finite limit");
    let lower = lower_bound(&pair)?;
    let interp = file.interpolation();
    let d = pair.end_distance.unwrap_or(0.0);
    let k_h = interp.k_h.unwrap_or((2.0 * d).exp());
    let psi: Vec<_> = interp.psi.iter().copied().map(complex).collect();
    let specs = annuli_for_pair(&pair, complex(interp.c), &psi, interp.eps, k_h)?;
    let offset = g.theta_offset();
    let uppers: Vec<CliResult<f64>> = ts
        .par_iter()
        .map(|&t| match assemble_f_with_offset(&specs, t, offset) {
            Ok(f) => Ok(f.half_log_dilatation()),
            // the construction only exists for large t
            Err(e @ (Error::BelowThreshold { .. } | Error::NotOrientationPreserving { .. })) => {
                warn!("no upper bound at t = {t}: {e}");
                Ok(f64::NAN)
            }
            Err(e) => Err(e.into()),
        })
        .collect();
    let mut table = Table::new(header);
    for (&t, upper) in ts.iter().zip(uppers) {
        table.push(vec![t.into(), lower.into(), upper?.into(), theorem.into()]);
    }
    Ok(Outcome::ok(table.render(format)))
}

pub fn shift(path: &Path, alpha_flag: Option<Vec<f64>>, g: &Globals) -> CliResult<Outcome> {
    let header = vec!["alpha", "shifted_value"];
    let format = g.format_or(Format::Csv);
    let (file, pair) = load_pair(path)?;
    let Some(pair) = pair else {
        eprintln!("pair is not similar; every shift diverges");
        return Ok(divergent(header, format));
    };
    let best = optimal_shift(&pair)?;
    let alphas = alpha_flag
        .or(file.sweep.alpha.clone())
        .unwrap_or_else(|| linspace(best - 2.0, best + 2.0, SHIFT_POINTS));
    check_grid("alpha", &alphas, false)?;
    let values: Vec<CliResult<f64>> = alphas
        .par_iter()
        .map(|&a| {
            let r = shifted_asymptotic_distance(&pair, a)?;
            Ok(r.value().unwrap_or(f64::INFINITY))
        })
        .collect();
    let mut table = Table::new(header);
    let mut min = (f64::NAN, f64::INFINITY);
    for (&a, v) in alphas.iter().zip(values) {
        let v = v?;
        if v < min.1 {
            min = (a, v);
        }
        table.push(vec![a.into(), v.into()]);
    }
    let at_best = shifted_asymptotic_distance(&pair, best)?.value().unwrap_or(f64::INFINITY);
    eprintln!(
        "alpha* = {}  value at alpha* = {}  grid minimum {} at alpha = {}",
        crate::output::fmt_g12(best),
        crate::output::fmt_g12(at_best),
        crate::output::fmt_g12(min.1),
        crate::output::fmt_g12(min.0)
    );
    Ok(Outcome::ok(table.render(format)))
}

pub enum QcGrid {
    T(Vec<f64>),
    Eps(Vec<f64>),
}

pub fn qc_sweep(path: &Path, grid: Option<QcGrid>, g: &Globals) -> CliResult<Outcome> {
    let format = g.format_or(Format::Csv);
    let file = ParamsFile::from_json(&read(path)?)?;
    if file.annuli.is_empty() {
        return Err(CliError::Domain("params file lists no annuli".into()));
    }
    let grid = grid.unwrap_or_else(|| match (&file.sweep.t, &file.sweep.eps) {
        (None, Some(e)) => QcGrid::Eps(e.clone()),
        (t, _) => QcGrid::T(t.clone().unwrap_or_else(|| (1..=10).map(f64::from).collect())),
    });
    match grid {
        QcGrid::T(ts) => {
            check_grid("t", &ts, true)?;
            let specs = file.specs()?;
            let offset = g.theta_offset();
            let rows: Vec<CliResult<Vec<Cell>>> = ts
                .par_iter()
                .map(|&t| {
                    let f = assemble_f_with_offset(&specs, t, offset)?;
                    Ok(vec![
                        t.into(),
                        f.max_k_p().into(),
                        f.max_k_q().into(),
                        f.max_k_h().into(),
                        f.dilatation.into(),
                    ])
                })
                .collect();
            let mut table = Table::new(vec!["t", "K_P", "K_Q_sup", "K_h", "K_F"]);
            for r in rows {
                table.push(r?);
            }
            Ok(Outcome::ok(table.render(format)))
        }
        QcGrid::Eps(eps) => {
            check_grid("eps", &eps, true)?;
            let n = g.resolution.unwrap_or(DEFAULT_NODE_GRID);
            let rows: Vec<CliResult<Vec<Cell>>> = eps
                .par_iter()
                .map(|&e| {
                    let k_h = NodeCorrection::new(e)?.sup_dilatation(n)?;
                    let mut k_p = 1.0f64;
                    for a in &file.annuli {
                        k_p = k_p.max(a.params_with_eps(e)?.limit_dilatation());
                    }
                    Ok(vec![e.into(), k_h.into(), k_p.into()])
                })
                .collect();
            let mut table = Table::new(vec!["eps", "K_H", "K_P_limit"]);
            for r in rows {
                table.push(r?);
            }
            Ok(Outcome::ok(table.render(format)))
        }
    }
}

pub fn oracle(path: &Path, g: &Globals) -> CliResult<Outcome> {
    let mut dom: GridDomain = serde_json::from_str(&read(path)?).map_err(|e| CliError::Input(format!("parse error: {e}")))?;
    if let Some(n) = g.resolution {
        dom = dom.with_resolution(n);
    }
    let mut fields: Vec<(&'static str, Cell)> = match dom.kind {
        DomainKind::Quadrilateral { .. } => {
            let r = quad_modulus(&dom)?;
            vec![
                ("kind", "quadrilateral".into()),
                ("value", r.value.into()),
                ("err_est", r.err_est.into()),
                ("resolution", r.resolution.into()),
            ]
        }
        DomainKind::Annulus { .. } => {
            let r = annulus_modulus(&dom)?;
            vec![
                ("kind", "annulus".into()),
                ("value", r.discrete.unwrap_or(r.analytic).into()),
                ("err_est", r.err_est.map_or(Cell::Text("none".into()), Cell::from)),
                ("resolution", r.resolution.into()),
                ("analytic", r.analytic.into()),
                ("flagged", r.flagged.into()),
            ]
        }
    };
    let text = match g.format_or(Format::Json) {
        Format::Json => {
            let obj: serde_json::Map<String, Value> = fields
                .drain(..)
                .map(|(k, c)| {
                    let v = match c {
                        Cell::Text(s) if s == "none" => Value::Null,
                        c => json_cell(&c),
                    };
                    (k.to_string(), v)
                })
                .collect();
            serde_json::to_string_pretty(&Value::Object(obj)).expect("serializable") + "\n"
        }
        Format::Csv => {
            let mut t = Table::new(fields.iter().map(|f| f.0).collect());
            t.push(fields.into_iter().map(|f| f.1).collect());
            t.render(Format::Csv)
        }
    };
    Ok(Outcome::ok(text))
}
