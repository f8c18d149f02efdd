//! Benchmark problems, convergence sweeps and the CSV/JSON formats they are
//! exchanged in.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::driver::{integrate, SolveOptions};
use crate::error::{Error, Result};
use crate::ivp::{global_error, observed_order, IvProblem};
use crate::method::MethodId;
use crate::stability::RegionScan;

pub const PROBLEM_IDS: [&str; 4] = ["ex1", "ex2", "ex3", "ex4"];

/// One-line description of a registered problem.
pub fn problem_summary(id: &str) -> Option<&'static str> {
    Some(match id {
        "ex1" => "u' = -u^2, t in (0, 1], u(0) = 1, exact 1/(t+1)",
        "ex2" => {
            "u' = (2t^2 - u)/(t^2 u - t), t in (1, 2], u(1) = 2, exact 1/t + sqrt(1/t^2 + 4t - 4)"
        }
        "ex3" => "u' = -4t^3 u^2, t in (-10, 0], u(-10) = 1/10001, exact 1/(t^4+1)",
        "ex4" => "u' = u + 2, t in (0, 1], u(0) = -1, exact e^t - 2",
        _ => return None,
    })
}

fn unknown_problem(id: &str) -> Error {
    Error::InvalidProblem {
        id: id.to_string(),
        reason: format!("unknown problem; valid ids: {}", PROBLEM_IDS.join(", ")),
    }
}

pub fn problem(id: &str) -> Result<IvProblem> {
    match id {
        "ex1" => IvProblem::new(id, |_, u| -u * u, 0.0, 1.0, 1.0)?.with_exact(|t| 1.0 / (t + 1.0)),
        "ex2" => IvProblem::new(
            id,
            |t, u| (2.0 * t * t - u) / (t * t * u - t),
            1.0,
            2.0,
            2.0,
        )?
        .with_exact(|t| 1.0 / t + (1.0 / (t * t) + 4.0 * t - 4.0).sqrt()),
        "ex3" => IvProblem::new(
            id,
            |t, u| -4.0 * t * t * t * u * u,
            -10.0,
            0.0,
            1.0 / 10001.0,
        )?
        .with_exact(|t| 1.0 / (t.powi(4) + 1.0)),
        "ex4" => IvProblem::new(id, |_, u| u + 2.0, 0.0, 1.0, -1.0)?.with_exact(|t| t.exp() - 2.0),
        other => Err(unknown_problem(other)),
    }
}

/// Step counts used when none are given.
pub fn default_ns(id: &str) -> Vec<usize> {
    if id == "ex3" {
        vec![400, 800, 1600, 3200, 6400]
    } else {
        vec![10, 20, 40, 80, 160, 320]
    }
}

/// One run of a convergence sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub method: MethodId,
    pub problem: String,
    #[serde(rename = "N")]
    pub n: usize,
    /// NaN when the run failed.
    pub global_error: f64,
    /// Absent for the first N of a sweep; NaN when undefined.
    pub observed_order: Option<f64>,
    pub fe_count: u64,
    pub fallback_count: usize,
    /// Why the run failed, if it did. Not part of the exchange formats.
    #[serde(skip)]
    pub failure: Option<String>,
}

fn check_ns(ns: &[usize]) -> Result<()> {
    if ns.is_empty() {
        return Err(Error::Domain("no step counts given".into()));
    }
    if let Some(w) = ns.windows(2).find(|w| w[1] != 2 * w[0]) {
        return Err(Error::Domain(format!(
            "step counts must double: {} is followed by {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// Runs `method` on `problem` for each N. A failed run is recorded in its
/// row and the sweep continues.
pub fn run_convergence(
    problem: &IvProblem,
    method: MethodId,
    ns: &[usize],
    opts: &SolveOptions,
) -> Result<Vec<ConvergenceRow>> {
    check_ns(ns)?;
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(ns.len());
    for &n in ns {
        let (global_error, fe_count, fallback_count, failure) =
            match integrate(problem, method, n, opts)
                .and_then(|tr| Ok((global_error(&tr, problem)?, tr)))
            {
                Ok((e, tr)) => (e, tr.fe_count, tr.fallback_count, None),
                Err(e @ Error::MissingExact(_)) => return Err(e),
                Err(e) => (f64::NAN, 0, 0, Some(e.to_string())),
            };
        let observed_order = rows
            .last()
            .map(|prev| observed_order(prev.global_error, global_error));
        rows.push(ConvergenceRow {
            method,
            problem: problem.id().to_string(),
            n,
            global_error,
            observed_order,
            fe_count,
            fallback_count,
            failure,
        });
    }
    Ok(rows)
}

/// Sweeps every method in turn; rows are grouped by method.
pub fn run_sweep(
    problem: &IvProblem,
    methods: &[MethodId],
    ns: &[usize],
    opts: &SolveOptions,
) -> Result<Vec<ConvergenceRow>> {
    let mut rows = Vec::with_capacity(methods.len() * ns.len());
    for &m in methods {
        rows.extend(run_convergence(problem, m, ns, opts)?);
    }
    Ok(rows)
}

pub const CONVERGENCE_HEADER: [&str; 7] = [
    "method",
    "problem",
    "N",
    "global_error",
    "observed_order",
    "fe_count",
    "fallback_count",
];

/// Scientific notation with 15 significant digits and a signed two-digit
/// exponent, e.g. `3.03421329305198e-03`.
pub fn format_sci(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.14e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

fn format_order(order: Option<f64>) -> String {
    match order {
        None => String::new(),
        Some(p) if p.is_nan() => "NaN".into(),
        Some(p) => format!("{p}"),
    }
}

pub fn write_convergence_csv<W: Write>(rows: &[ConvergenceRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CONVERGENCE_HEADER)?;
    for r in rows {
        w.write_record([
            r.method.name().to_string(),
            r.problem.clone(),
            r.n.to_string(),
            format_sci(r.global_error),
            format_order(r.observed_order),
            r.fe_count.to_string(),
            r.fallback_count.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, line: usize) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    let raw = rec.get(i).unwrap_or("");
    raw.trim().parse::<T>().map_err(|e| {
        Error::Parse(format!(
            "line {line}, column {}: `{raw}`: {e}",
            CONVERGENCE_HEADER.get(i).copied().unwrap_or("?")
        ))
    })
}

pub fn read_convergence_csv<R: Read>(input: R) -> Result<Vec<ConvergenceRow>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers()?.clone();
    if header.iter().ne(CONVERGENCE_HEADER) {
        return Err(Error::Parse(format!(
            "unexpected header `{}`",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = k + 2;
        let method: MethodId = rec
            .get(0)
            .unwrap_or("")
            .parse()
            .map_err(|e| Error::Parse(format!("line {line}: {e}")))?;
        let order = match rec.get(4).unwrap_or("").trim() {
            "" => None,
            _ => Some(field::<f64>(&rec, 4, line)?),
        };
        rows.push(ConvergenceRow {
            method,
            problem: rec.get(1).unwrap_or("").to_string(),
            n: field(&rec, 2, line)?,
            global_error: field(&rec, 3, line)?,
            observed_order: order,
            fe_count: field(&rec, 5, line)?,
            fallback_count: field(&rec, 6, line)?,
            failure: None,
        });
    }
    Ok(rows)
}

pub fn write_convergence_json<W: Write>(rows: &[ConvergenceRow], mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, rows)?;
    writeln!(out)?;
    Ok(())
}

/// One cell of a stability scan as exchanged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityCell {
    pub re: f64,
    pub im: f64,
    pub stable: bool,
}

pub fn write_stability_csv<W: Write>(scan: &RegionScan, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["re", "im", "stable"])?;
    for (re, im, s) in scan.cells() {
        w.write_record([
            format!("{re}"),
            format!("{im}"),
            if s { "1" } else { "0" }.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_stability_csv<R: Read>(input: R) -> Result<Vec<StabilityCell>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers()?.clone();
    if header.iter().ne(["re", "im", "stable"]) {
        return Err(Error::Parse("expected header `re,im,stable`".into()));
    }
    let mut cells = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let bad = |what: &str| Error::Parse(format!("line {}: bad {what}", k + 2));
        let num = |i: usize, what: &str| {
            rec.get(i)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| bad(what))
        };
        let stable = match rec.get(2).map(str::trim) {
            Some("0") => false,
            Some("1") => true,
            _ => return Err(bad("stable flag")),
        };
        cells.push(StabilityCell {
            re: num(0, "re")?,
            im: num(1, "im")?,
            stable,
        });
    }
    Ok(cells)
}

pub fn write_stability_json<W: Write>(scan: &RegionScan, mut out: W) -> Result<()> {
    let cells: Vec<StabilityCell> = scan
        .cells()
        .map(|(re, im, stable)| StabilityCell { re, im, stable })
        .collect();
    serde_json::to_writer(&mut out, &cells)?;
    writeln!(out)?;
    Ok(())
}
