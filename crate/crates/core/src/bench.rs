//! Multi-run experiments, gap statistics and performance profiles.

use std::fmt::Write as _;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{best_solution, run_with, RunConfig, RunReport};
use crate::error::{ConfigError, Error};
use crate::instance::{read_instance, BksRegistry, Instance, NeighborLists};

/// `100 * (avg - bks) / bks`, unrounded.
pub fn compute_gap(avg: f64, bks: f64) -> Result<f64, Error> {
    if !(bks > 0.0) {
        return Err(Error::NonPositiveBks(bks));
    }
    Ok(100.0 * (avg - bks) / bks)
}

/// Rounds half away from zero to `decimals` places.
pub fn round_to(x: f64, decimals: i32) -> f64 {
    let f = 10f64.powi(decimals);
    (x * f).round() / f
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

/// How [`summarize`] computes quartiles; written next to the numbers.
pub const QUANTILE_METHOD: &str = "linear interpolation between closest ranks";

/// Five-number summary. Quantile `p` sits at rank `(len - 1) * p` of the
/// sorted sample, interpolating linearly between neighbouring ranks.
pub fn summarize(values: &[f64]) -> Result<Summary, Error> {
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let q = |p: f64| {
        let h = (v.len() - 1) as f64 * p;
        let lo = h.floor() as usize;
        let hi = h.ceil() as usize;
        v[lo] + (h - lo as f64) * (v[hi] - v[lo])
    };
    Ok(Summary {
        min: v[0],
        q1: q(0.25),
        median: q(0.5),
        q3: q(0.75),
        max: v[v.len() - 1],
    })
}

pub fn summary_csv(rows: &[(String, Summary)]) -> String {
    let mut out = format!("# quartiles: {QUANTILE_METHOD}\nlabel,min,q1,median,q3,max\n");
    for (label, s) in rows {
        let _ = writeln!(out, "{label},{:.4},{:.4},{:.4},{:.4},{:.4}", s.min, s.q1, s.median, s.q3, s.max);
    }
    out
}

/// Shift added to gaps before taking ratios, so that zero gaps are usable.
pub const PROFILE_SHIFT: f64 = 0.0001;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileCurve {
    pub algorithm: String,
    /// Sorted `(tau, fraction of instances with ratio <= tau)` breakpoints.
    pub points: Vec<(f64, f64)>,
}

impl ProfileCurve {
    /// Step-function value at `tau`.
    pub fn at(&self, tau: f64) -> f64 {
        self.points.iter().take_while(|(t, _)| *t <= tau).last().map_or(0.0, |p| p.1)
    }
}

/// Performance profile over a gap matrix (`gaps[instance][algorithm]`).
/// Each ratio is `(gap + shift) / (best gap on the instance + shift)`.
pub fn performance_profile(algorithms: &[String], gaps: &[Vec<f64>]) -> Result<Vec<ProfileCurve>, ConfigError> {
    if gaps.is_empty() || algorithms.is_empty() {
        return Err(ConfigError::Invalid("profile needs at least one instance and one algorithm".into()));
    }
    if let Some(row) = gaps.iter().find(|r| r.len() != algorithms.len()) {
        return Err(ConfigError::Invalid(format!(
            "row with {} gaps for {} algorithms",
            row.len(),
            algorithms.len()
        )));
    }
    let ratios: Vec<Vec<f64>> = gaps
        .iter()
        .map(|row| {
            let best = row.iter().copied().fold(f64::INFINITY, f64::min);
            row.iter().map(|g| (g + PROFILE_SHIFT) / (best + PROFILE_SHIFT)).collect()
        })
        .collect();
    let m = gaps.len() as f64;
    Ok(algorithms
        .iter()
        .enumerate()
        .map(|(a, name)| {
            let mut r: Vec<f64> = ratios.iter().map(|row| row[a]).collect();
            r.sort_by(|x, y| x.total_cmp(y));
            let mut points: Vec<(f64, f64)> = Vec::new();
            for (i, &tau) in r.iter().enumerate() {
                let frac = (i + 1) as f64 / m;
                match points.last_mut() {
                    Some(last) if last.0 == tau => last.1 = frac,
                    _ => points.push((tau, frac)),
                }
            }
            ProfileCurve {
                algorithm: name.clone(),
                points,
            }
        })
        .collect())
}

pub fn profile_csv(curves: &[ProfileCurve]) -> String {
    let mut out = format!("# ratio = (gap + {PROFILE_SHIFT}) / (best gap + {PROFILE_SHIFT})\nalgorithm,tau,phi\n");
    for c in curves {
        for (tau, phi) in &c.points {
            let _ = writeln!(out, "{},{tau:.6},{phi:.6}", c.algorithm);
        }
    }
    out
}

/// Reads a gap matrix: header `instance,<algorithm>...`, one row per instance.
pub fn read_gap_matrix(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>), Error> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let algorithms: Vec<String> = reader.headers()?.iter().skip(1).map(str::to_string).collect();
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row = record
            .iter()
            .skip(1)
            .map(|g| {
                g.parse::<f64>().map_err(|_| {
                    crate::error::ParseError::new(i + 2, format!("malformed gap `{g}`"))
                })
            })
            .collect::<Result<Vec<f64>, _>>()?;
        rows.push(row);
    }
    Ok((algorithms, rows))
}

/// One line of the results table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub instance: String,
    pub bks: Option<i64>,
    /// Mean best cost over the runs, to 2 decimals.
    pub avg: f64,
    /// Percent gap of `avg` to `bks`, to 4 decimals.
    pub gap: Option<f64>,
    pub best: i64,
    /// Mean minutes to reach each run's best solution, to 4 decimals.
    pub t_min: f64,
}

pub const GAP_HEADER: &str = "instance,bks,avg,gap,best,t_min";

impl GapRow {
    pub fn from_reports(instance: &str, bks: Option<i64>, reports: &[RunReport]) -> Result<Self, Error> {
        if reports.is_empty() {
            return Err(Error::EmptySample);
        }
        let k = reports.len() as f64;
        let avg = round_to(reports.iter().map(|r| r.best_cost as f64).sum::<f64>() / k, 2);
        let gap = bks.map(|b| compute_gap(avg, b as f64).map(|g| round_to(g, 4))).transpose()?;
        Ok(GapRow {
            instance: instance.to_string(),
            bks,
            avg,
            gap,
            best: reports.iter().map(|r| r.best_cost).min().expect("non-empty"),
            t_min: round_to(reports.iter().map(|r| r.time_to_best_seconds).sum::<f64>() / k / 60.0, 4),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Format {
    Csv,
    JsonLines,
}

pub fn write_rows(rows: &[GapRow], format: Format) -> Result<String, Error> {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
            for r in rows {
                w.serialize(r)?;
            }
            if rows.is_empty() {
                return Ok(format!("{GAP_HEADER}\n"));
            }
            let bytes = w.into_inner().map_err(|e| Error::Io {
                path: "<memory>".into(),
                source: e.into_error(),
            })?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
        Format::JsonLines => {
            let mut out = String::new();
            for r in rows {
                out.push_str(&serde_json::to_string(r)?);
                out.push('\n');
            }
            Ok(out)
        }
    }
}

pub fn read_rows(text: &str, format: Format) -> Result<Vec<GapRow>, Error> {
    match format {
        Format::Csv => {
            let mut reader = csv::Reader::from_reader(text.as_bytes());
            Ok(reader.deserialize().collect::<Result<Vec<GapRow>, _>>()?)
        }
        Format::JsonLines => text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| serde_json::from_str(l).map_err(Error::from))
            .collect(),
    }
}

/// Where the instances of an experiment come from.
#[derive(Debug, Clone)]
pub enum InstanceSource {
    Path(PathBuf),
    Loaded(Instance),
}

impl InstanceSource {
    fn load(&self) -> Result<Instance, Error> {
        match self {
            InstanceSource::Path(p) => read_instance(p),
            InstanceSource::Loaded(inst) => Ok(inst.clone()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub instances: Vec<InstanceSource>,
    pub runs: usize,
    /// Template; run `k` uses seed `seed_base + k`.
    pub config: RunConfig,
    pub seed_base: u64,
    pub bks: BksRegistry,
    /// Worker threads; 0 uses all cores.
    pub threads: usize,
}

impl ExperimentSpec {
    pub fn new(instances: Vec<InstanceSource>, config: RunConfig) -> Self {
        Self {
            instances,
            runs: 1,
            config,
            seed_base: 0,
            bks: BksRegistry::builtin(),
            threads: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct InstanceResult {
    pub instance: Instance,
    pub reports: Vec<RunReport>,
}

impl InstanceResult {
    pub fn gap_row(&self, bks: &BksRegistry) -> Result<GapRow, Error> {
        GapRow::from_reports(self.instance.name(), bks.get(self.instance.name()), &self.reports)
    }

    /// Indices of runs whose best solution fails validation.
    pub fn invalid_runs(&self) -> Vec<usize> {
        self.reports
            .iter()
            .enumerate()
            .filter(|(_, r)| {
                let s = best_solution(&self.instance, r);
                s.validate(&self.instance).is_err() || s.cost() != r.best_cost
            })
            .map(|(i, _)| i)
            .collect()
    }
}

/// Runs every (instance, seed) pair, in parallel across a worker pool.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<InstanceResult>, Error> {
    if spec.runs == 0 {
        return Err(ConfigError::OutOfRange { name: "runs", value: 0.0 }.into());
    }
    spec.config.validate()?;
    let instances = spec.instances.iter().map(InstanceSource::load).collect::<Result<Vec<_>, _>>()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.threads)
        .build()
        .map_err(|e| ConfigError::Invalid(format!("thread pool: {e}")))?;
    pool.install(|| {
        instances
            .into_iter()
            .map(|instance| {
                let nl = NeighborLists::build(&instance, spec.config.phi);
                let reports = (0..spec.runs)
                    .into_par_iter()
                    .map(|k| {
                        let cfg = spec.config.clone().with_seed(spec.seed_base + k as u64);
                        run_with(&instance, &nl, cfg)
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(InstanceResult { instance, reports })
            })
            .collect()
    })
}
