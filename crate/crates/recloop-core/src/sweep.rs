//! Monte Carlo sweep harness: parameter grids, replication management,
//! canonical CSV outputs, and resumable execution.
//!
//! A sweep is a cartesian grid over recommender parameters and initial
//! distributions, with a fixed number of replications per point. Run
//! seeds are pure functions of (master seed, canonical grid key,
//! replication index), so declaring axes in a different order never
//! changes a single run. Outputs are canonically sorted before writing;
//! identical inputs produce byte-identical files.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{BufWriter, Write as IoWrite};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use thiserror::Error;

use crate::engine::{run, ConfigError, RunResult, SimulationConfig};
use crate::metrics::{aggregate, pct_change, AggregateStat};
use crate::population::InitialDistribution;
use crate::rng::{derive_run_seed, fnv1a};

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid sweep configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("sweep has no grid points")]
    EmptyGrid,
    #[error("need at least 1 replication")]
    NoReplications,
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path} belongs to a different sweep (found plan hash {found}, expected {expected}); use a fresh output directory")]
    ManifestMismatch {
        path: PathBuf,
        expected: String,
        found: String,
    },
    #[error("cannot parse {path}: {reason}")]
    Corrupt { path: PathBuf, reason: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> SweepError + '_ {
    move |source| SweepError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// One materialised grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub distribution: InitialDistribution,
    pub alpha: f64,
    pub k: usize,
    pub omega: f64,
    pub delta: usize,
    pub lambda: f64,
}

impl GridPoint {
    /// Canonical key: alphabetical fields, plain decimal values. Seeds and
    /// resume bookkeeping key off this string, never off axis order.
    pub fn canonical_key(&self) -> String {
        format!(
            "alpha={};delta={};dist={};k={};lambda={};omega={}",
            self.alpha,
            self.delta,
            self.distribution.label(),
            self.k,
            self.lambda,
            self.omega,
        )
    }

    fn run_id(&self, rep: u32) -> String {
        format!(
            "{}-a{}-k{}-w{}-d{}-l{}-r{:03}",
            self.distribution.label(),
            self.alpha,
            self.k,
            self.omega,
            self.delta,
            self.lambda,
            rep
        )
    }
}

/// A parameter grid around a base configuration. Empty axes fall back to
/// the base value, so a spec with all axes empty is a single-point sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub base: SimulationConfig,
    pub alphas: Vec<f64>,
    pub ks: Vec<usize>,
    pub omegas: Vec<f64>,
    pub deltas: Vec<usize>,
    pub distributions: Vec<InitialDistribution>,
    pub replications: u32,
    pub master_seed: u64,
}

impl SweepSpec {
    fn single(base: SimulationConfig) -> Self {
        Self {
            base,
            alphas: Vec::new(),
            ks: Vec::new(),
            omegas: Vec::new(),
            deltas: Vec::new(),
            distributions: vec![InitialDistribution::Ndic, InitialDistribution::Bdic],
            replications: 50,
            master_seed: 1,
        }
    }

    /// Softmax-sharpness campaign: k = 21, omega = 0.5, delta = 5, alpha
    /// swept 2..=20 in steps of 2, both canonical populations, 50 reps.
    pub fn preset_rq1() -> Self {
        let base = SimulationConfig {
            k: 21,
            omega: 0.5,
            delta: 5,
            ..SimulationConfig::default()
        };
        Self {
            alphas: (1..=10).map(|i| (2 * i) as f64).collect(),
            ..Self::single(base)
        }
    }

    /// Content-diversity campaign: alpha = 7, omega = 0.5, delta = 5, k
    /// over the uneven grid {2..=11, 21}.
    pub fn preset_rq2() -> Self {
        let base = SimulationConfig {
            alpha: 7.0,
            omega: 0.5,
            delta: 5,
            k: 21,
            ..SimulationConfig::default()
        };
        Self {
            ks: (2..=11).chain([21]).collect(),
            ..Self::single(base)
        }
    }

    /// Content-diversity campaign extended with k = 41 and k = 101.
    pub fn preset_rq2_extended() -> Self {
        let mut spec = Self::preset_rq2();
        spec.ks.extend([41, 101]);
        spec
    }

    /// Virality-weight campaign: alpha = 7, k = 11, delta = 5, omega swept
    /// 0.0..=1.0 in steps of 0.1.
    pub fn preset_rq3_omega() -> Self {
        let base = SimulationConfig {
            alpha: 7.0,
            k: 11,
            delta: 5,
            ..SimulationConfig::default()
        };
        Self {
            omegas: (0..=10).map(|i| f64::from(i) / 10.0).collect(),
            ..Self::single(base)
        }
    }

    /// Virality dominance heatmap: alpha = 7, k = 11, omega 0.0..=1.0 in
    /// steps of 0.1 crossed with delta in {1, 11, 21, ...} up to the run
    /// length. 50 replications by default; 10 already shows the virality
    /// region boundaries at desk scale.
    pub fn preset_rq3_heatmap() -> Self {
        let base = SimulationConfig {
            alpha: 7.0,
            k: 11,
            ..SimulationConfig::default()
        };
        let deltas: Vec<usize> = std::iter::once(1)
            .chain((11..=base.steps).step_by(10))
            .collect();
        Self {
            omegas: (0..=10).map(|i| f64::from(i) / 10.0).collect(),
            deltas,
            ..Self::single(base)
        }
    }

    fn axis_or<T: Clone>(axis: &[T], base: &T) -> Vec<T> {
        if axis.is_empty() {
            vec![base.clone()]
        } else {
            axis.to_vec()
        }
    }

    /// Materialise the cartesian grid in canonical order.
    pub fn grid(&self) -> Vec<GridPoint> {
        let mut points = Vec::new();
        for dist in Self::axis_or(&self.distributions, &self.base.initial_opinions) {
            for &alpha in &Self::axis_or(&self.alphas, &self.base.alpha) {
                for &k in &Self::axis_or(&self.ks, &self.base.k) {
                    for &omega in &Self::axis_or(&self.omegas, &self.base.omega) {
                        for &delta in &Self::axis_or(&self.deltas, &self.base.delta) {
                            points.push(GridPoint {
                                distribution: dist.clone(),
                                alpha,
                                k,
                                omega,
                                delta,
                                lambda: self.base.lambda,
                            });
                        }
                    }
                }
            }
        }
        points.sort_by(|a, b| {
            point_order(a)
                .partial_cmp(&point_order(b))
                .expect("grid axis values are never NaN")
        });
        points
    }

    /// The simulation a (grid point, replication) pair runs.
    pub fn config_for(&self, point: &GridPoint, rep: u32) -> SimulationConfig {
        SimulationConfig {
            alpha: point.alpha,
            k: point.k,
            omega: point.omega,
            delta: point.delta,
            initial_opinions: point.distribution.clone(),
            seed: derive_run_seed(self.master_seed, &point.canonical_key(), rep),
            ..self.base.clone()
        }
    }

    /// Every run of the sweep in canonical order, plus the canonical keys
    /// of grid points whose configuration fails validation (those points
    /// are skipped; they never abort the rest of the sweep).
    pub fn plan(&self) -> Result<(Vec<PlannedRun>, Vec<String>), SweepError> {
        if self.replications == 0 {
            return Err(SweepError::NoReplications);
        }
        let grid = self.grid();
        if grid.is_empty() {
            return Err(SweepError::EmptyGrid);
        }
        let mut runs = Vec::with_capacity(grid.len() * self.replications as usize);
        let mut skipped = Vec::new();
        for point in grid {
            let probe = self.config_for(&point, 0);
            if let Err(err) = probe.validate() {
                skipped.push(format!("{}: {err}", point.canonical_key()));
                continue;
            }
            for rep in 0..self.replications {
                let config = self.config_for(&point, rep);
                runs.push(PlannedRun {
                    run_id: point.run_id(rep),
                    seed: config.seed,
                    point: point.clone(),
                    rep,
                    config,
                });
            }
        }
        Ok((runs, skipped))
    }

    /// Hash of the full run plan (ids and seeds); a directory can only be
    /// resumed by a spec whose plan hashes identically.
    pub fn plan_hash(&self) -> Result<String, SweepError> {
        let (runs, _) = self.plan()?;
        let mut ids: Vec<String> = runs
            .iter()
            .map(|r| format!("{}#{}", r.run_id, r.seed))
            .collect();
        ids.sort_unstable();
        Ok(format!("{:016x}", fnv1a(ids.join("\n").as_bytes())))
    }
}

fn point_order(p: &GridPoint) -> (String, f64, usize, f64, usize, f64) {
    (
        p.distribution.label(),
        p.alpha,
        p.k,
        p.omega,
        p.delta,
        p.lambda,
    )
}

/// One scheduled simulation of a sweep.
#[derive(Debug, Clone)]
pub struct PlannedRun {
    pub run_id: String,
    pub seed: u64,
    pub point: GridPoint,
    pub rep: u32,
    pub config: SimulationConfig,
}

/// One finished run, as written to the raw CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRow {
    pub run_id: String,
    pub seed: u64,
    pub distribution: String,
    pub alpha: f64,
    pub k: usize,
    pub omega: f64,
    pub delta: usize,
    pub lambda: f64,
    pub likes_pct: f64,
    pub wr_pct: f64,
    pub md_0: f64,
    pub md_tau: f64,
    pub mr_0: f64,
    pub mr_tau: f64,
    /// Missing when the initial metric is exactly zero.
    pub md_pct_change: Option<f64>,
    pub mr_pct_change: Option<f64>,
    pub dominance: f64,
    pub viral_stance: f64,
}

pub const RAW_HEADER: &str = "run_id,seed,distribution,alpha,k,omega,delta,lambda,\
likes_pct,wr_pct,md_0,md_tau,mr_0,mr_tau,md_pct_change,mr_pct_change,dominance,viral_stance";

impl RawRow {
    pub fn from_result(planned: &PlannedRun, result: &RunResult) -> Self {
        let md_0 = result.dispersion_initial;
        let mr_0 = result.radicalisation_initial;
        let md_tau = result.metrics.dispersion;
        let mr_tau = result.metrics.radicalisation;
        Self {
            run_id: planned.run_id.clone(),
            seed: planned.seed,
            distribution: planned.point.distribution.label(),
            alpha: planned.point.alpha,
            k: planned.point.k,
            omega: planned.point.omega,
            delta: planned.point.delta,
            lambda: planned.point.lambda,
            likes_pct: result.metrics.likes_pct,
            wr_pct: result.metrics.watch_rate_pct,
            md_0,
            md_tau,
            mr_0,
            mr_tau,
            md_pct_change: pct_change(md_tau, md_0),
            mr_pct_change: pct_change(mr_tau, mr_0),
            dominance: result.metrics.dominance,
            viral_stance: result.metrics.viral_stance,
        }
    }

    fn csv_line(&self) -> String {
        fn opt(v: Option<f64>) -> String {
            v.map(|x| x.to_string()).unwrap_or_default()
        }
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.run_id,
            self.seed,
            self.distribution,
            self.alpha,
            self.k,
            self.omega,
            self.delta,
            self.lambda,
            self.likes_pct,
            self.wr_pct,
            self.md_0,
            self.md_tau,
            self.mr_0,
            self.mr_tau,
            opt(self.md_pct_change),
            opt(self.mr_pct_change),
            self.dominance,
            self.viral_stance
        )
    }

    fn parse_line(line: &str, path: &Path) -> Result<Self, SweepError> {
        let corrupt = |reason: String| SweepError::Corrupt {
            path: path.to_path_buf(),
            reason,
        };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 18 {
            return Err(corrupt(format!("expected 18 fields in {line:?}")));
        }
        fn num(s: &str) -> Result<f64, String> {
            s.parse().map_err(|_| format!("bad number {s:?}"))
        }
        fn opt_num(s: &str) -> Result<Option<f64>, String> {
            if s.is_empty() {
                Ok(None)
            } else {
                num(s).map(Some)
            }
        }
        let parse = || -> Result<Self, String> {
            Ok(Self {
                run_id: fields[0].to_string(),
                seed: fields[1].parse().map_err(|_| "bad seed".to_string())?,
                distribution: fields[2].to_string(),
                alpha: num(fields[3])?,
                k: fields[4].parse().map_err(|_| "bad k".to_string())?,
                omega: num(fields[5])?,
                delta: fields[6].parse().map_err(|_| "bad delta".to_string())?,
                lambda: num(fields[7])?,
                likes_pct: num(fields[8])?,
                wr_pct: num(fields[9])?,
                md_0: num(fields[10])?,
                md_tau: num(fields[11])?,
                mr_0: num(fields[12])?,
                mr_tau: num(fields[13])?,
                md_pct_change: opt_num(fields[14])?,
                mr_pct_change: opt_num(fields[15])?,
                dominance: num(fields[16])?,
                viral_stance: num(fields[17])?,
            })
        };
        parse().map_err(corrupt)
    }
}

/// Aggregated statistics of one grid point. Metric stats are missing when
/// fewer than two replications produced a value (e.g. undefined percent
/// changes).
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub distribution: String,
    pub alpha: f64,
    pub k: usize,
    pub omega: f64,
    pub delta: usize,
    pub lambda: f64,
    pub rep_count: usize,
    pub likes_pct: Option<AggregateStat>,
    pub wr_pct: Option<AggregateStat>,
    pub md_pct_change: Option<AggregateStat>,
    pub mr_pct_change: Option<AggregateStat>,
    pub dominance: Option<AggregateStat>,
}

pub const AGGREGATE_HEADER: &str = "distribution,alpha,k,omega,delta,lambda,rep_count,\
likes_pct_mean,likes_pct_std,likes_pct_ci_low,likes_pct_ci_high,\
wr_pct_mean,wr_pct_std,wr_pct_ci_low,wr_pct_ci_high,\
md_pct_change_mean,md_pct_change_std,md_pct_change_ci_low,md_pct_change_ci_high,\
mr_pct_change_mean,mr_pct_change_std,mr_pct_change_ci_low,mr_pct_change_ci_high,\
dominance_mean,dominance_std,dominance_ci_low,dominance_ci_high";

impl AggregateRow {
    fn csv_line(&self) -> String {
        fn stat(s: &Option<AggregateStat>) -> String {
            match s {
                Some(s) => format!("{},{},{},{}", s.mean, s.std, s.ci_low, s.ci_high),
                None => ",,,".to_string(),
            }
        }
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.distribution,
            self.alpha,
            self.k,
            self.omega,
            self.delta,
            self.lambda,
            self.rep_count,
            stat(&self.likes_pct),
            stat(&self.wr_pct),
            stat(&self.md_pct_change),
            stat(&self.mr_pct_change),
            stat(&self.dominance)
        )
    }
}

/// Raw rows plus per-point aggregates for a completed sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultsTable {
    pub raw: Vec<RawRow>,
    pub aggregate: Vec<AggregateRow>,
    /// Simulations executed by this invocation (0 when fully resumed).
    pub executed_runs: usize,
}

impl ResultsTable {
    /// Aggregate row for a grid point, looked up by axis values.
    pub fn aggregate_for(
        &self,
        distribution: &str,
        alpha: f64,
        k: usize,
        omega: f64,
        delta: usize,
    ) -> Option<&AggregateRow> {
        self.aggregate.iter().find(|r| {
            r.distribution == distribution
                && r.alpha == alpha
                && r.k == k
                && r.omega == omega
                && r.delta == delta
        })
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    tool: String,
    version: String,
    status: String,
    master_seed: u64,
    replications: u32,
    plan_hash: String,
    grid_points: usize,
    total_runs: usize,
    seed_scheme: String,
    skipped_points: Vec<String>,
    base: SimulationConfig,
    axes: ManifestAxes,
}

#[derive(Debug, Serialize, Deserialize)]
struct ManifestAxes {
    alphas: Vec<f64>,
    ks: Vec<usize>,
    omegas: Vec<f64>,
    deltas: Vec<usize>,
    distributions: Vec<String>,
}

const SEED_SCHEME: &str =
    "run_seed = splitmix64(master ^ splitmix64(fnv1a(grid_key) ^ splitmix64(rep)))";

fn build_manifest(spec: &SweepSpec, status: &str, skipped: &[String], hash: &str) -> Manifest {
    let grid = spec.grid();
    Manifest {
        tool: "recloop".to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        status: status.to_string(),
        master_seed: spec.master_seed,
        replications: spec.replications,
        plan_hash: hash.to_string(),
        grid_points: grid.len(),
        total_runs: grid.len() * spec.replications as usize,
        seed_scheme: SEED_SCHEME.to_string(),
        skipped_points: skipped.to_vec(),
        base: spec.base.clone(),
        axes: ManifestAxes {
            alphas: spec.alphas.clone(),
            ks: spec.ks.clone(),
            omegas: spec.omegas.clone(),
            deltas: spec.deltas.clone(),
            distributions: spec.distributions.iter().map(|d| d.label()).collect(),
        },
    }
}

fn write_manifest(path: &Path, manifest: &Manifest) -> Result<(), SweepError> {
    let json = serde_json::to_string_pretty(manifest).expect("manifest serialises");
    fs::write(path, json + "\n").map_err(io_err(path))
}

fn sort_rows(rows: &mut [RawRow]) {
    rows.sort_by(|a, b| {
        (
            &a.distribution,
            a.alpha,
            a.k,
            a.omega,
            a.delta,
            a.lambda,
            &a.run_id,
        )
            .partial_cmp(&(
                &b.distribution,
                b.alpha,
                b.k,
                b.omega,
                b.delta,
                b.lambda,
                &b.run_id,
            ))
            .expect("no NaN keys in result rows")
    });
}

fn aggregate_rows(plan_points: &[GridPoint], rows: &[RawRow]) -> Vec<AggregateRow> {
    let mut by_key: BTreeMap<String, Vec<&RawRow>> = BTreeMap::new();
    for row in rows {
        let key = format!(
            "alpha={};delta={};dist={};k={};lambda={};omega={}",
            row.alpha, row.delta, row.distribution, row.k, row.lambda, row.omega
        );
        by_key.entry(key).or_default().push(row);
    }
    let mut out = Vec::new();
    for point in plan_points {
        let Some(group) = by_key.get(&point.canonical_key()) else {
            continue;
        };
        let collect = |f: fn(&RawRow) -> Option<f64>| -> Option<AggregateStat> {
            let values: Vec<f64> = group.iter().filter_map(|r| f(r)).collect();
            aggregate(&values).ok()
        };
        out.push(AggregateRow {
            distribution: point.distribution.label(),
            alpha: point.alpha,
            k: point.k,
            omega: point.omega,
            delta: point.delta,
            lambda: point.lambda,
            rep_count: group.len(),
            likes_pct: collect(|r| Some(r.likes_pct)),
            wr_pct: collect(|r| Some(r.wr_pct)),
            md_pct_change: collect(|r| r.md_pct_change),
            mr_pct_change: collect(|r| r.mr_pct_change),
            dominance: collect(|r| Some(r.dominance)),
        });
    }
    out
}

fn write_raw_csv(path: &Path, rows: &[RawRow]) -> Result<(), SweepError> {
    let mut out = String::with_capacity(rows.len() * 160 + 200);
    out.push_str(RAW_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.csv_line());
        out.push('\n');
    }
    fs::write(path, out).map_err(io_err(path))
}

fn write_aggregate_csv(path: &Path, rows: &[AggregateRow]) -> Result<(), SweepError> {
    let mut out = String::with_capacity(rows.len() * 260 + 400);
    out.push_str(AGGREGATE_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.csv_line());
        out.push('\n');
    }
    fs::write(path, out).map_err(io_err(path))
}

fn read_raw_csv(path: &Path) -> Result<Vec<RawRow>, SweepError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header == RAW_HEADER => {}
        _ => {
            return Err(SweepError::Corrupt {
                path: path.to_path_buf(),
                reason: "missing or unexpected header".to_string(),
            })
        }
    }
    lines.map(|line| RawRow::parse_line(line, path)).collect()
}

fn read_partial_rows(path: &Path) -> Result<Vec<RawRow>, SweepError> {
    // The partial file is append-only with no header; a torn final line
    // from an interrupted run is dropped rather than treated as corruption.
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut rows = Vec::new();
    for line in text.lines() {
        if line.is_empty() {
            continue;
        }
        match RawRow::parse_line(line, path) {
            Ok(row) => rows.push(row),
            Err(_) => break,
        }
    }
    Ok(rows)
}

/// Execute a sweep into `out_dir` using `workers` threads (0 = all cores).
///
/// Resumable: runs already recorded under `out_dir` are not executed
/// again, and rerunning a completed sweep performs zero simulations.
/// `progress(done, total)` fires after every finished run.
pub fn run_sweep_with_progress(
    spec: &SweepSpec,
    workers: usize,
    out_dir: &Path,
    progress: impl Fn(usize, usize) + Sync,
) -> Result<ResultsTable, SweepError> {
    let (planned, skipped) = spec.plan()?;
    let hash = spec.plan_hash()?;
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let manifest_path = out_dir.join("manifest.json");
    let raw_path = out_dir.join("runs.csv");
    let aggregate_path = out_dir.join("aggregate.csv");
    let partial_path = out_dir.join("runs.partial.csv");

    let plan_points: Vec<GridPoint> = {
        let mut points: Vec<GridPoint> = Vec::new();
        for planned_run in &planned {
            if points.last() != Some(&planned_run.point) {
                points.push(planned_run.point.clone());
            }
        }
        points
    };

    // A completed manifest with a matching plan means nothing to run.
    if manifest_path.exists() {
        let text = fs::read_to_string(&manifest_path).map_err(io_err(&manifest_path))?;
        let manifest: Manifest = serde_json::from_str(&text).map_err(|e| SweepError::Corrupt {
            path: manifest_path.clone(),
            reason: e.to_string(),
        })?;
        if manifest.plan_hash != hash {
            return Err(SweepError::ManifestMismatch {
                path: manifest_path.clone(),
                expected: hash,
                found: manifest.plan_hash,
            });
        }
        if manifest.status == "complete" && raw_path.exists() {
            let mut raw = read_raw_csv(&raw_path)?;
            sort_rows(&mut raw);
            let aggregate = aggregate_rows(&plan_points, &raw);
            return Ok(ResultsTable {
                raw,
                aggregate,
                executed_runs: 0,
            });
        }
    }

    write_manifest(
        &manifest_path,
        &build_manifest(spec, "in_progress", &skipped, &hash),
    )?;

    // Rows rescued from an interrupted invocation.
    let mut completed: Vec<RawRow> = if partial_path.exists() {
        let expected: BTreeSet<&str> = planned.iter().map(|r| r.run_id.as_str()).collect();
        read_partial_rows(&partial_path)?
            .into_iter()
            .filter(|r| expected.contains(r.run_id.as_str()))
            .collect()
    } else {
        Vec::new()
    };
    let done_ids: BTreeSet<String> = completed.iter().map(|r| r.run_id.clone()).collect();
    let pending: Vec<&PlannedRun> = planned
        .iter()
        .filter(|r| !done_ids.contains(&r.run_id))
        .collect();

    let file = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(&partial_path)
        .map_err(io_err(&partial_path))?;
    let writer = Mutex::new(BufWriter::new(file));
    let finished = AtomicUsize::new(completed.len());
    let total = planned.len();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool construction");
    let new_rows: Vec<RawRow> = pool.install(|| {
        pending
            .par_iter()
            .map(|planned_run| {
                let result = run(planned_run.config.clone())
                    .expect("sweep configs validated during planning");
                let row = RawRow::from_result(planned_run, &result);
                {
                    let mut w = writer.lock().expect("partial writer lock");
                    let _ = writeln!(w, "{}", row.csv_line()).and_then(|_| w.flush());
                }
                let done = finished.fetch_add(1, Ordering::Relaxed) + 1;
                progress(done, total);
                row
            })
            .collect()
    });
    let executed_runs = new_rows.len();

    completed.extend(new_rows);
    sort_rows(&mut completed);
    let aggregate = aggregate_rows(&plan_points, &completed);
    write_raw_csv(&raw_path, &completed)?;
    write_aggregate_csv(&aggregate_path, &aggregate)?;
    write_manifest(
        &manifest_path,
        &build_manifest(spec, "complete", &skipped, &hash),
    )?;
    let _ = fs::remove_file(&partial_path);

    Ok(ResultsTable {
        raw: completed,
        aggregate,
        executed_runs,
    })
}

/// [`run_sweep_with_progress`] without a progress callback.
pub fn run_sweep(
    spec: &SweepSpec,
    workers: usize,
    out_dir: &Path,
) -> Result<ResultsTable, SweepError> {
    run_sweep_with_progress(spec, workers, out_dir, |_, _| {})
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rq1_grid_matches_campaign_shape() {
        let spec = SweepSpec::preset_rq1();
        let grid = spec.grid();
        assert_eq!(grid.len(), 20); // 10 alphas x 2 distributions
        assert!(grid
            .iter()
            .all(|p| p.k == 21 && p.omega == 0.5 && p.delta == 5));
        let (runs, skipped) = spec.plan().unwrap();
        assert_eq!(runs.len(), 1000);
        assert!(skipped.is_empty());
        let mut seeds: Vec<u64> = runs.iter().map(|r| r.seed).collect();
        seeds.sort_unstable();
        seeds.dedup();
        assert_eq!(seeds.len(), 1000, "replication seeds must be distinct");
        for planned in &runs {
            assert!(planned.config.validate().is_ok());
        }
    }

    #[test]
    fn rq2_grids_cover_the_campaign_axes() {
        let spec = SweepSpec::preset_rq2();
        let mut ks: Vec<usize> = spec.grid().iter().map(|p| p.k).collect();
        ks.dedup();
        assert_eq!(
            ks,
            vec![2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 21, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 21]
        );
        assert!(spec.grid().iter().all(|p| p.alpha == 7.0));
        let ext = SweepSpec::preset_rq2_extended();
        assert!(ext.ks.contains(&41) && ext.ks.contains(&101));
    }

    #[test]
    fn rq3_grids_cover_omega_and_delta() {
        let omega = SweepSpec::preset_rq3_omega();
        assert_eq!(omega.omegas.len(), 11);
        assert_eq!(omega.grid().len(), 22);

        let heatmap = SweepSpec::preset_rq3_heatmap();
        assert_eq!(heatmap.deltas[0], 1);
        assert_eq!(heatmap.deltas[1], 11);
        assert!(*heatmap.deltas.last().unwrap() <= heatmap.base.steps);
        assert_eq!(heatmap.omegas.len(), 11);
        // Every point still validates (delta <= steps).
        let (_, skipped) = heatmap.plan().unwrap();
        assert!(skipped.is_empty());
    }

    #[test]
    fn seeds_are_independent_of_axis_declaration_order() {
        let spec = SweepSpec::preset_rq1();
        let mut permuted = spec.clone();
        permuted.alphas.reverse();
        permuted.distributions.reverse();
        let (a, _) = spec.plan().unwrap();
        let (b, _) = permuted.plan().unwrap();
        let mut a_pairs: Vec<(String, u64)> =
            a.iter().map(|r| (r.run_id.clone(), r.seed)).collect();
        let mut b_pairs: Vec<(String, u64)> =
            b.iter().map(|r| (r.run_id.clone(), r.seed)).collect();
        a_pairs.sort();
        b_pairs.sort();
        assert_eq!(a_pairs, b_pairs);
        assert_eq!(spec.plan_hash().unwrap(), permuted.plan_hash().unwrap());
    }

    #[test]
    fn invalid_grid_points_are_skipped_not_fatal() {
        let mut spec = SweepSpec::preset_rq3_omega();
        spec.base.steps = 4;
        spec.deltas = vec![2, 9]; // 9 > steps: that point must be skipped
        spec.omegas = vec![0.5];
        spec.replications = 1;
        let (runs, skipped) = spec.plan().unwrap();
        assert_eq!(skipped.len(), 2); // one bad point per distribution
        assert!(runs.iter().all(|r| r.point.delta == 2));
    }

    #[test]
    fn raw_rows_round_trip_through_csv_lines() {
        let row = RawRow {
            run_id: "NDIC-a7-k21-w0.5-d5-l0.9-r007".to_string(),
            seed: 123456789,
            distribution: "NDIC".to_string(),
            alpha: 7.0,
            k: 21,
            omega: 0.5,
            delta: 5,
            lambda: 0.9,
            likes_pct: 85.62,
            wr_pct: 59.76,
            md_0: 0.6091,
            md_tau: 0.7018,
            mr_0: 0.1432,
            mr_tau: 0.1823,
            md_pct_change: Some(15.21),
            mr_pct_change: None,
            dominance: 0.077,
            viral_stance: -0.1,
        };
        let line = row.csv_line();
        let parsed = RawRow::parse_line(&line, Path::new("test.csv")).unwrap();
        assert_eq!(parsed, row);
        assert_eq!(RAW_HEADER.split(',').count(), line.split(',').count());
    }
}
