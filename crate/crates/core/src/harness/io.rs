use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::metrics::ReferenceDataset;
use super::sweep::SweepResult;
use crate::analytic::{coefficients, w_analytic};
use crate::constants::{ChamberGeometry, PhysicalConstants};
use crate::field::adiabaticity;
use crate::{Error, Result};

pub const RESULTS_HEADER: &str = "current_A,W_num,W_num_stderr,W_ana,N";

/// Fixed 12-significant-digit rendering used for every emitted float.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.11e}")
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Render a sweep as `#` metadata lines, the header and one row per current.
/// Failed rows keep their place with `nan` fractions and a `# failed` note.
pub fn render_results(result: &SweepResult) -> String {
    let c = &result.config;
    let mut out = String::new();
    let _ = writeln!(out, "# cqdsim {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(out, "# seed = {}", c.seed);
    let _ = writeln!(out, "# atoms_per_current = {}", c.atoms_per_current);
    let _ = writeln!(out, "# grid = {}", c.describe_grid());
    let _ = writeln!(
        out,
        "# rel_tol = {}, abs_tol = {}, max_step = {}, dense_output_step = {}",
        format_float(c.ode.rel_tol),
        format_float(c.ode.abs_tol),
        format_float(c.ode.max_step),
        format_float(c.ode.dense_output_step)
    );
    let _ = writeln!(out, "# averaging_window = {}", format_float(c.averaging_window));
    let g = &c.geometry;
    let _ = writeln!(
        out,
        "# wire_depth = {}, length = {}, speed = {}, remnant_field = {}",
        format_float(g.wire_depth),
        format_float(g.length),
        format_float(g.speed),
        format_float(g.remnant_field)
    );
    for row in &result.rows {
        if row.failures > 0 {
            let _ = writeln!(
                out,
                "# {} current = {}, failures = {}/{}, first: {}",
                if row.failed() { "failed" } else { "warning" },
                format_float(row.current),
                row.failures,
                row.requested,
                row.first_failure.as_deref().unwrap_or("").replace('\n', " ")
            );
        }
    }
    if let Some(r2) = result.r_squared {
        let _ = writeln!(
            out,
            "# r_squared_num = {}, r_squared_ana = {}",
            format_float(r2.numerical),
            format_float(r2.analytic)
        );
    }
    out.push_str(RESULTS_HEADER);
    out.push('\n');
    for row in &result.rows {
        let (w, se, n) = match (&row.flip, row.failed()) {
            (Some(f), false) => (f.value, f.std_error, f.atoms),
            (f, _) => (f64::NAN, f64::NAN, f.as_ref().map_or(0, |f| f.atoms)),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            format_float(row.current),
            format_float(w),
            format_float(se),
            format_float(row.w_analytic),
            n
        );
    }
    out
}

pub fn emit_results(result: &SweepResult, path: &Path) -> Result<()> {
    write_file(path, &render_results(result))
}

/// One data row of a results file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResultRow {
    pub current: f64,
    pub w_num: f64,
    pub w_num_stderr: f64,
    pub w_ana: f64,
    pub atoms: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultsFile {
    /// Metadata lines without the leading `#`.
    pub metadata: Vec<String>,
    pub rows: Vec<ResultRow>,
}

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn number(path: &Path, line: usize, field: &str) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| parse_error(path, line, format!("not a number: {:?}", field.trim())))
}

pub fn parse_results(text: &str, path: &Path) -> Result<ResultsFile> {
    let mut metadata = Vec::new();
    let mut rows = Vec::new();
    let mut header_seen = false;
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if let Some(meta) = line.strip_prefix('#') {
            metadata.push(meta.trim().to_string());
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        if !header_seen {
            if line.trim() != RESULTS_HEADER {
                return Err(parse_error(path, lineno, format!("expected header {RESULTS_HEADER:?}")));
            }
            header_seen = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(parse_error(path, lineno, format!("expected 5 fields, found {}", fields.len())));
        }
        rows.push(ResultRow {
            current: number(path, lineno, fields[0])?,
            w_num: number(path, lineno, fields[1])?,
            w_num_stderr: number(path, lineno, fields[2])?,
            w_ana: number(path, lineno, fields[3])?,
            atoms: fields[4]
                .trim()
                .parse()
                .map_err(|_| parse_error(path, lineno, format!("bad atom count {:?}", fields[4])))?,
        });
    }
    if !header_seen {
        return Err(parse_error(path, text.lines().count().max(1), "missing header"));
    }
    Ok(ResultsFile { metadata, rows })
}

pub fn load_results(path: &Path) -> Result<ResultsFile> {
    parse_results(&read_file(path)?, path)
}

/// Parse a two-column reference file: current in A and flip fraction,
/// separated by a comma or whitespace. `#` starts a comment; a single
/// non-numeric header line is allowed before the data.
pub fn parse_reference(text: &str, path: &Path) -> Result<ReferenceDataset> {
    let mut rows: Vec<(f64, f64)> = Vec::new();
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        last_line = lineno;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        if rows.is_empty() && fields.iter().all(|f| f.parse::<f64>().is_err()) {
            continue;
        }
        if fields.len() != 2 {
            return Err(parse_error(path, lineno, format!("expected 2 columns, found {}", fields.len())));
        }
        let current = number(path, lineno, fields[0])?;
        let fraction = number(path, lineno, fields[1])?;
        if !(current > 0.0 && current.is_finite()) {
            return Err(parse_error(path, lineno, format!("current must be positive, got {current}")));
        }
        if !(0.0..=1.0).contains(&fraction) {
            return Err(parse_error(path, lineno, format!("fraction {fraction} outside [0, 1]")));
        }
        if rows.iter().any(|r| r.0 == current) {
            return Err(parse_error(path, lineno, format!("duplicate current {current}")));
        }
        rows.push((current, fraction));
    }
    if rows.is_empty() {
        return Err(parse_error(path, last_line.max(1), "no data rows"));
    }
    Ok(ReferenceDataset { rows })
}

pub fn load_reference(path: &Path) -> Result<ReferenceDataset> {
    parse_reference(&read_file(path)?, path)
}

/// Closed-form curve `current_A,W_ana` with the coefficients as metadata.
pub fn render_analytic_curve(currents: &[f64], geom: &ChamberGeometry) -> Result<String> {
    let constants = PhysicalConstants::potassium39();
    let k = coefficients(geom, &constants, &constants.hyperfine_fields())?;
    let mut out = String::new();
    let _ = writeln!(out, "# cqdsim {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(
        out,
        "# c_r0 = {} A, c_rs = {}, c_rr = {} A^-3",
        format_float(k.c_r0),
        format_float(k.c_rs),
        format_float(k.c_rr)
    );
    out.push_str("current_A,W_ana\n");
    for &i in currents {
        let _ = writeln!(out, "{},{}", format_float(i), format_float(w_analytic(i, &k)?));
    }
    Ok(out)
}

pub fn write_analytic_curve(currents: &[f64], geom: &ChamberGeometry, path: &Path) -> Result<()> {
    write_file(path, &render_analytic_curve(currents, geom)?)
}

/// Adiabaticity series `current_A,t_s,k`, `points` samples per current
/// across the chamber transit. Divergent values are written as `inf`.
pub fn render_adiabaticity_profile(
    currents: &[f64],
    geom: &ChamberGeometry,
    constants: &PhysicalConstants,
    points: usize,
) -> Result<String> {
    if let Some(bad) = currents.iter().find(|i| !(**i > 0.0)) {
        return Err(Error::domain(format!("currents must be positive, got {bad}")));
    }
    if points < 2 {
        return Err(Error::domain("need at least two samples per series"));
    }
    geom.validate()?;
    let half = geom.half_transit_time();
    let mut out = String::new();
    let _ = writeln!(out, "# cqdsim {}", env!("CARGO_PKG_VERSION"));
    out.push_str("current_A,t_s,k\n");
    for &i in currents {
        for p in 0..points {
            let t = -half + 2.0 * half * p as f64 / (points - 1) as f64;
            let _ = writeln!(
                out,
                "{},{},{}",
                format_float(i),
                format_float(t),
                format_float(adiabaticity(t, i, geom, constants))
            );
        }
    }
    Ok(out)
}

pub fn write_adiabaticity_profile(
    currents: &[f64],
    geom: &ChamberGeometry,
    constants: &PhysicalConstants,
    points: usize,
    path: &Path,
) -> Result<()> {
    write_file(path, &render_adiabaticity_profile(currents, geom, constants, points)?)
}
