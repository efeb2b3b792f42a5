use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use rayon::prelude::*;
use rw_entangle::entanglement::entropy;
use rw_entangle::{gamma_sq, ExpansionParams, ModeParams, Statistics};

use crate::report::{rows_to_json, timestamp, to_json, Fields, Value};
use crate::{CliError, StatsChoice};

pub const COLUMNS: [&str; 8] = [
    "k",
    "mass",
    "rho",
    "epsilon",
    "log_gamma_sq_fermion",
    "entropy_fermion_bits",
    "log_gamma_sq_boson",
    "entropy_boson_bits",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    K,
    Mass,
    Epsilon,
    Rho,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub k: f64,
    pub mass: f64,
    pub rho: f64,
    pub epsilon: f64,
}

impl Point {
    fn with(mut self, axis: Axis, v: f64) -> Self {
        match axis {
            Axis::K => self.k = v,
            Axis::Mass => self.mass = v,
            Axis::Epsilon => self.epsilon = v,
            Axis::Rho => self.rho = v,
        }
        self
    }

    pub fn params(&self) -> Result<(ExpansionParams, ModeParams), rw_entangle::Error> {
        Ok((
            ExpansionParams::new(self.epsilon, self.rho)?,
            ModeParams::new(self.mass, self.k)?,
        ))
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub axis: Axis,
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub spacing: Spacing,
    pub fixed: Point,
    pub stats: StatsChoice,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(CliError::Usage(format!(
                "--lo {} must be below --hi {}",
                self.lo, self.hi
            )));
        }
        if self.count < 2 {
            return Err(CliError::Usage("--count must be at least 2".into()));
        }
        if self.spacing == Spacing::Log && self.lo <= 0.0 {
            return Err(CliError::Usage("--lo must be > 0 for log spacing".into()));
        }
        // the grid is monotone, so valid endpoints imply valid rows
        for v in [self.lo, self.hi] {
            self.fixed
                .with(self.axis, v)
                .params()
                .map_err(|e| CliError::Usage(crate::flag_error(&e)))?;
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|i| {
                if i == 0 {
                    return self.lo;
                }
                if i == n - 1 {
                    return self.hi;
                }
                let t = i as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Linear => self.lo + (self.hi - self.lo) * t,
                    Spacing::Log => (self.lo.ln() + (self.hi / self.lo).ln() * t).exp(),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    pub point: Point,
    pub fermion: Option<(f64, f64)>,
    pub boson: Option<(f64, f64)>,
}

fn evaluate(
    p: &ExpansionParams,
    mp: &ModeParams,
    stats: Statistics,
) -> Result<(f64, f64), rw_entangle::Error> {
    let g = gamma_sq(p, mp, stats);
    Ok((g.log_value(), entropy(&g)?))
}

pub fn run(spec: &SweepSpec) -> Result<Vec<Row>, CliError> {
    spec.values()
        .par_iter()
        .map(|&v| {
            let point = spec.fixed.with(spec.axis, v);
            let (p, mp) = point.params().map_err(|e| CliError::Usage(crate::flag_error(&e)))?;
            let fail = |e: rw_entangle::Error| {
                CliError::Failure(format!(
                    "{}: {e} at k={} mass={} rho={} epsilon={}",
                    e.kind(),
                    point.k,
                    point.mass,
                    point.rho,
                    point.epsilon
                ))
            };
            let fermion = match spec.stats.fermion() {
                true => Some(evaluate(&p, &mp, Statistics::Fermion).map_err(fail)?),
                false => None,
            };
            let boson = match spec.stats.boson() {
                true => Some(evaluate(&p, &mp, Statistics::Boson).map_err(fail)?),
                false => None,
            };
            Ok(Row {
                point,
                fermion,
                boson,
            })
        })
        .collect()
}

fn cells(r: &Row) -> [Value; 8] {
    let pair = |x: Option<(f64, f64)>| -> (Value, Value) {
        (x.map(|v| v.0).into(), x.map(|v| v.1).into())
    };
    let (lf, sf) = pair(r.fermion);
    let (lb, sb) = pair(r.boson);
    [
        r.point.k.into(),
        r.point.mass.into(),
        r.point.rho.into(),
        r.point.epsilon.into(),
        lf,
        sf,
        lb,
        sb,
    ]
}

pub fn render(rows: &[Row], format: SweepFormat) -> Result<String, CliError> {
    match format {
        SweepFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| CliError::Failure(format!("csv: {e}"));
            w.write_record(COLUMNS).map_err(io)?;
            for r in rows {
                w.write_record(cells(r).iter().map(Value::text)).map_err(io)?;
            }
            let bytes = w
                .into_inner()
                .map_err(|e| CliError::Failure(format!("csv: {e}")))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
        SweepFormat::Json => {
            let objects: Vec<Fields> = rows
                .iter()
                .map(|r| {
                    Fields(
                        COLUMNS
                            .iter()
                            .zip(cells(r))
                            .map(|(c, v)| (c.to_string(), v))
                            .collect(),
                    )
                })
                .collect();
            Ok(rows_to_json(&objects))
        }
    }
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

/// Writes the sweep and its provenance sidecar, removing both on failure.
pub fn write_files(
    out: &Path,
    body: &str,
    config: &Fields,
    rows: usize,
    reproducible: bool,
) -> Result<(), CliError> {
    let meta_path = sidecar_path(out);
    let mut meta = Fields::default();
    meta.push("tool", crate::TOOL);
    meta.push("version", env!("CARGO_PKG_VERSION"));
    meta.push("command", "sweep");
    if let Some(t) = timestamp(reproducible) {
        meta.push("timestamp_unix", t as usize);
    }
    meta.push("rows", rows);
    meta.push("columns", COLUMNS.join(","));
    let mut text = to_json(&MetaDoc { meta: &meta, config });
    text.push('\n');

    let result = write_atomic(out, body.as_bytes()).and_then(|_| write_atomic(&meta_path, text.as_bytes()));
    if let Err(e) = result {
        let _ = fs::remove_file(out);
        let _ = fs::remove_file(&meta_path);
        return Err(e);
    }
    Ok(())
}

struct MetaDoc<'a> {
    meta: &'a Fields,
    config: &'a Fields,
}

impl serde::Serialize for MetaDoc<'_> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(None)?;
        for (k, v) in &self.meta.0 {
            map.serialize_entry(k, v)?;
        }
        map.serialize_entry("config", self.config)?;
        map.end()
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let fail = |e: std::io::Error| CliError::Failure(format!("cannot write {}: {e}", path.display()));
    let mut f = fs::File::create(path).map_err(fail)?;
    if let Err(e) = f.write_all(bytes).and_then(|_| f.sync_all()) {
        drop(f);
        let _ = fs::remove_file(path);
        return Err(fail(e));
    }
    Ok(())
}
