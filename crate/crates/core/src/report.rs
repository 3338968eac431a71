//! Benchmark execution, aggregation and file outputs.
//!
//! Runs are independent and scheduled across `(problem, seed)` pairs; within
//! a run everything is sequential, so results never depend on scheduling.
//! Files written under an output directory:
//!
//! - `results.csv` / `results.txt`: PR, Best and Worst per problem and
//!   accuracy level, 6 decimal places.
//! - `raw/P{n}.csv`: `seed,env,peaks,npf@<eps_f>...` per run and environment.
//! - `snapshots/P{n}_s{seed}.snap`: scored populations and ground truth,
//!   readable by [`read_snapshot_file`] for re-scoring.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::config::RunConfig;
use crate::controller::{EnvironmentSequence, PopulationSnapshot, ProblemInstance};
use crate::error::{DmmopError, Result};
use crate::exec::Execution;
use crate::landscape::Landscape;
use crate::metrics::{best_worst, count_npf, peak_ratio, AccuracyLevel, RunRecord};
use crate::model::{Optimum, SolutionVector, DOMAIN_MAX, DOMAIN_MIN};
use crate::optimizer::OptimizerKind;
use crate::problem::{Group, ProblemSpec};
use crate::rng::RngStream;

/// Everything a finished run leaves behind.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub spec: ProblemSpec,
    pub seed: u64,
    pub snapshots: Vec<PopulationSnapshot>,
    pub ground_truth: Vec<Vec<Optimum>>,
}

/// Per-environment counts of one run at every accuracy level.
#[derive(Debug, Clone, PartialEq)]
pub struct RunScores {
    pub spec: ProblemSpec,
    pub seed: u64,
    pub peaks: Vec<usize>,
    /// `npf[level][env]`.
    pub npf: Vec<Vec<usize>>,
}

/// Runs one optimizer on one `(problem, seed)` pair to completion.
pub fn execute_run(spec: ProblemSpec, seed: u64, optimizer: OptimizerKind, config: &RunConfig) -> Result<RunOutcome> {
    let mut instance = ProblemInstance::new(spec, seed, config)?;
    let mut rng = RngStream::for_optimizer(seed);
    optimizer.build(&config.optimizer()).run(&mut instance, &mut rng)?;
    if !instance.is_frozen() {
        return Err(DmmopError::Internal(format!(
            "{optimizer} stopped before exhausting the budget"
        )));
    }
    let (snapshots, ground_truth) = instance.into_parts();
    Ok(RunOutcome {
        spec,
        seed,
        snapshots,
        ground_truth,
    })
}

/// Scores every environment of a run at all levels in one pass.
pub fn score_run(outcome: &RunOutcome, levels: &[AccuracyLevel]) -> RunScores {
    let peaks = outcome.ground_truth.iter().map(Vec::len).collect();
    let npf = levels
        .iter()
        .map(|&level| {
            outcome
                .snapshots
                .iter()
                .zip(&outcome.ground_truth)
                .map(|(snap, truth)| count_npf(snap, truth, level))
                .collect()
        })
        .collect();
    RunScores {
        spec: outcome.spec,
        seed: outcome.seed,
        peaks,
        npf,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResultCell {
    pub pr: f64,
    pub best: f64,
    pub worst: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultsRow {
    pub group: Group,
    pub spec: ProblemSpec,
    pub runs: usize,
    /// One cell per accuracy level, in table order.
    pub cells: Vec<ResultCell>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultsTable {
    pub levels: Vec<AccuracyLevel>,
    pub rows: Vec<ResultsRow>,
}

fn level_label(level: &AccuracyLevel) -> String {
    format!("{:e}", level.eps_f)
}

impl ResultsTable {
    /// Groups scores by problem (ascending index) and reduces each level.
    pub fn aggregate(scores: &[RunScores], levels: &[AccuracyLevel]) -> Result<Self> {
        let mut by_problem: BTreeMap<usize, Vec<&RunScores>> = BTreeMap::new();
        for s in scores {
            by_problem.entry(s.spec.index).or_default().push(s);
        }
        let mut rows = Vec::with_capacity(by_problem.len());
        for (_, mut runs) in by_problem {
            runs.sort_by_key(|r| r.seed);
            let spec = runs[0].spec;
            let cells = (0..levels.len())
                .map(|l| {
                    let mut record = RunRecord::new();
                    for r in &runs {
                        record.push_run(r.npf[l].clone(), r.peaks.clone());
                    }
                    let pr = peak_ratio(&record)?;
                    let (best, worst) = best_worst(&record)?;
                    Ok(ResultCell { pr, best, worst })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(ResultsRow {
                group: spec.group(),
                spec,
                runs: runs.len(),
                cells,
            });
        }
        Ok(ResultsTable {
            levels: levels.to_vec(),
            rows,
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("group,problem,runs");
        for l in &self.levels {
            let e = level_label(l);
            write!(out, ",pr@{e},best@{e},worst@{e}").unwrap();
        }
        out.push('\n');
        for row in &self.rows {
            write!(out, "{},{},{}", row.group, row.spec.label(), row.runs).unwrap();
            for c in &row.cells {
                write!(out, ",{:.6},{:.6},{:.6}", c.pr, c.best, c.worst).unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// Fixed-width rendering in the layout of the official results record.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let cell_w = 3 * 9 + 2;
        write!(out, "{:<6}{:<6}", "Group", "Index").unwrap();
        for l in &self.levels {
            write!(out, "| {:<w$}", format!("eps_f={}", level_label(l)), w = cell_w - 2).unwrap();
        }
        out.push('\n');
        write!(out, "{:<12}", "").unwrap();
        for _ in &self.levels {
            write!(out, "| {:>8} {:>8} {:>8} ", "PR", "Best", "Worst").unwrap();
        }
        out.push('\n');
        let mut last_group = None;
        for row in &self.rows {
            let g = if last_group == Some(row.group) {
                String::new()
            } else {
                row.group.to_string()
            };
            last_group = Some(row.group);
            write!(out, "{:<6}{:<6}", g, row.spec.label()).unwrap();
            for c in &row.cells {
                write!(out, "| {:>8.6} {:>8.6} {:>8.6} ", c.pr, c.best, c.worst).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// A batch of runs to execute.
#[derive(Debug, Clone)]
pub struct BenchmarkRequest {
    pub problems: Vec<ProblemSpec>,
    pub seeds: Vec<u64>,
    pub optimizer: OptimizerKind,
    pub config: RunConfig,
    pub execution: Execution,
}

#[derive(Debug, Clone)]
pub struct RunFailure {
    pub spec: ProblemSpec,
    pub seed: u64,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct BenchmarkOutput {
    pub table: ResultsTable,
    pub outcomes: Vec<RunOutcome>,
    pub scores: Vec<RunScores>,
    pub failures: Vec<RunFailure>,
}

/// Executes every `(problem, seed)` pair and aggregates the successful runs.
/// A failing run is reported in `failures` and excluded from the table.
pub fn run_benchmark(request: &BenchmarkRequest) -> Result<BenchmarkOutput> {
    request.config.validate()?;
    let levels = request.config.accuracy_levels();
    let pairs: Vec<(ProblemSpec, u64)> = request
        .problems
        .iter()
        .flat_map(|&p| request.seeds.iter().map(move |&s| (p, s)))
        .collect();
    let results = request.execution.map(&pairs, |&(spec, seed)| {
        execute_run(spec, seed, request.optimizer, &request.config).map(|o| {
            let s = score_run(&o, &levels);
            (o, s)
        })
    });
    let mut outcomes = Vec::new();
    let mut scores = Vec::new();
    let mut failures = Vec::new();
    for ((spec, seed), r) in pairs.into_iter().zip(results) {
        match r {
            Ok((o, s)) => {
                outcomes.push(o);
                scores.push(s);
            }
            Err(e) => failures.push(RunFailure {
                spec,
                seed,
                message: e.to_string(),
            }),
        }
    }
    let table = ResultsTable::aggregate(&scores, &levels)?;
    Ok(BenchmarkOutput {
        table,
        outcomes,
        scores,
        failures,
    })
}

/// Raw per-environment counts of one problem, sorted by seed.
pub fn raw_record_csv(scores: &[&RunScores], levels: &[AccuracyLevel]) -> String {
    let mut out = String::from("seed,env,peaks");
    for l in levels {
        write!(out, ",npf@{}", level_label(l)).unwrap();
    }
    out.push('\n');
    let mut sorted: Vec<&&RunScores> = scores.iter().collect();
    sorted.sort_by_key(|s| s.seed);
    for s in sorted {
        for (j, peaks) in s.peaks.iter().enumerate() {
            write!(out, "{},{},{}", s.seed, j + 1, peaks).unwrap();
            for per_level in &s.npf {
                write!(out, ",{}", per_level[j]).unwrap();
            }
            out.push('\n');
        }
    }
    out
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| DmmopError::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| DmmopError::io(path, e))
}

/// Writes the results table and raw records; snapshots too when asked.
/// Returns the paths written.
pub fn write_outputs(output: &BenchmarkOutput, levels: &[AccuracyLevel], out_dir: &Path, snapshots: bool) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let mut put = |rel: String, contents: String| -> Result<()> {
        let path = out_dir.join(rel);
        write_file(&path, &contents)?;
        written.push(path);
        Ok(())
    };
    put("results.csv".into(), output.table.to_csv())?;
    put("results.txt".into(), output.table.render())?;
    let mut by_problem: BTreeMap<usize, Vec<&RunScores>> = BTreeMap::new();
    for s in &output.scores {
        by_problem.entry(s.spec.index).or_default().push(s);
    }
    for (index, runs) in by_problem {
        put(format!("raw/P{index}.csv"), raw_record_csv(&runs, levels))?;
    }
    if snapshots {
        for o in &output.outcomes {
            put(snapshot_file_name(o.spec, o.seed), snapshot_text(o))?;
        }
    }
    Ok(written)
}

pub fn snapshot_file_name(spec: ProblemSpec, seed: u64) -> String {
    format!("snapshots/{}_s{seed}.snap", spec.label())
}

const SNAPSHOT_HEADER: &str = "# dmmop snapshots v1";

fn push_point(out: &mut String, tag: &str, f: f64, x: &SolutionVector) {
    write!(out, "{tag} {f:.16e} ").unwrap();
    for (k, c) in x.iter().enumerate() {
        if k > 0 {
            out.push(',');
        }
        write!(out, "{c:.16e}").unwrap();
    }
    out.push('\n');
}

/// Serializes a run's snapshots and ground truth.
pub fn snapshot_text(outcome: &RunOutcome) -> String {
    let mut out = String::new();
    writeln!(out, "{SNAPSHOT_HEADER}").unwrap();
    writeln!(out, "run {} {}", outcome.spec.label(), outcome.seed).unwrap();
    for (snap, truth) in outcome.snapshots.iter().zip(&outcome.ground_truth) {
        writeln!(out, "env {}", snap.environment).unwrap();
        for o in truth {
            push_point(&mut out, "opt", o.fitness, &o.position);
        }
        for (x, f) in snap.individuals.iter().zip(&snap.fitness) {
            push_point(&mut out, "ind", *f, x);
        }
    }
    out
}

pub fn parse_snapshot_text(text: &str) -> Result<RunOutcome> {
    let mut run: Option<(ProblemSpec, u64)> = None;
    let mut snapshots: Vec<PopulationSnapshot> = Vec::new();
    let mut truths: Vec<Vec<Optimum>> = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let err = |message: String| DmmopError::Parse {
            what: "snapshot file",
            line: n + 1,
            message,
        };
        if n == 0 {
            if line != SNAPSHOT_HEADER {
                return Err(err(format!("expected header `{SNAPSHOT_HEADER}`")));
            }
            continue;
        }
        let mut parts = line.split_whitespace();
        match parts.next() {
            None => continue,
            Some("run") => {
                let spec: ProblemSpec = parts.next().ok_or_else(|| err("missing problem".into()))?.parse()?;
                let seed = parts
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| err("missing or bad seed".into()))?;
                run = Some((spec, seed));
            }
            Some("env") => {
                let env = parts
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| err("bad environment index".into()))?;
                snapshots.push(PopulationSnapshot {
                    environment: env,
                    individuals: Vec::new(),
                    fitness: Vec::new(),
                });
                truths.push(Vec::new());
            }
            Some(tag @ ("opt" | "ind")) => {
                let f: f64 = parts
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| err("bad fitness".into()))?;
                let x: Vec<f64> = parts
                    .next()
                    .unwrap_or("")
                    .split(',')
                    .map(|c| c.parse().map_err(|_| err(format!("bad coordinate `{c}`"))))
                    .collect::<Result<_>>()?;
                let (Some(snap), Some(truth)) = (snapshots.last_mut(), truths.last_mut()) else {
                    return Err(err("point before any `env` line".into()));
                };
                if tag == "opt" {
                    truth.push(Optimum {
                        position: x.into(),
                        fitness: f,
                    });
                } else {
                    snap.individuals.push(x.into());
                    snap.fitness.push(f);
                }
            }
            Some(other) => return Err(err(format!("unknown record `{other}`"))),
        }
    }
    let (spec, seed) = run.ok_or_else(|| DmmopError::Parse {
        what: "snapshot file",
        line: 0,
        message: "missing `run` line".into(),
    })?;
    Ok(RunOutcome {
        spec,
        seed,
        snapshots,
        ground_truth: truths,
    })
}

pub fn read_snapshot_file(path: &Path) -> Result<RunOutcome> {
    let text = fs::read_to_string(path).map_err(|e| DmmopError::io(path, e))?;
    parse_snapshot_text(&text)
}

/// Re-scores every `*.snap` file under `dir/snapshots` (or `dir` itself).
pub fn score_directory(dir: &Path, levels: &[AccuracyLevel], execution: Execution) -> Result<(ResultsTable, Vec<RunScores>)> {
    let snap_dir = if dir.join("snapshots").is_dir() {
        dir.join("snapshots")
    } else {
        dir.to_path_buf()
    };
    let mut files: Vec<PathBuf> = fs::read_dir(&snap_dir)
        .map_err(|e| DmmopError::io(&snap_dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "snap"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(DmmopError::Config(format!("no .snap files in {}", snap_dir.display())));
    }
    let scored = execution.map(&files, |p| read_snapshot_file(p).map(|o| score_run(&o, levels)));
    let scores = scored.into_iter().collect::<Result<Vec<_>>>()?;
    let table = ResultsTable::aggregate(&scores, levels)?;
    Ok((table, scores))
}

/// Fitness samples on a regular grid over `[-5, 5]^2`; coordinates beyond
/// the first two are fixed at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct LandscapeGrid {
    pub resolution: usize,
    pub axis: Vec<f64>,
    /// Row-major: `values[i * resolution + j]` is at `(axis[i], axis[j])`.
    pub values: Vec<f64>,
    pub optima: Vec<Optimum>,
}

impl LandscapeGrid {
    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,fitness\n");
        for (i, x) in self.axis.iter().enumerate() {
            for (j, y) in self.axis.iter().enumerate() {
                writeln!(out, "{x:.16e},{y:.16e},{:.16e}", self.values[i * self.resolution + j]).unwrap();
            }
        }
        out
    }

    pub fn optima_csv(&self) -> String {
        let mut out = String::from("index,fitness,position\n");
        for (k, o) in self.optima.iter().enumerate() {
            let pos: Vec<String> = o.position.iter().map(|c| format!("{c:.16e}")).collect();
            writeln!(out, "{},{:.16e},\"{}\"", k + 1, o.fitness, pos.join(",")).unwrap();
        }
        out
    }
}

pub fn landscape_grid(landscape: &Landscape, resolution: usize, execution: Execution) -> Result<LandscapeGrid> {
    if resolution < 2 {
        return Err(DmmopError::Config("grid resolution must be at least 2".into()));
    }
    let dim = landscape.dim();
    if dim < 2 {
        return Err(DmmopError::Config("grid export needs dimension >= 2".into()));
    }
    let step = (DOMAIN_MAX - DOMAIN_MIN) / (resolution - 1) as f64;
    let axis: Vec<f64> = (0..resolution).map(|i| DOMAIN_MIN + step * i as f64).collect();
    let values = execution.map_range(resolution * resolution, |k| {
        let mut x = vec![0.0; dim];
        x[0] = axis[k / resolution];
        x[1] = axis[k % resolution];
        landscape.evaluate_unchecked(&x)
    });
    Ok(LandscapeGrid {
        resolution,
        axis,
        values,
        optima: landscape.global_optima(),
    })
}

/// Grid of environment `env` of run `seed` of `spec`.
pub fn export_landscape_grid(
    spec: ProblemSpec,
    seed: u64,
    env: usize,
    resolution: usize,
    config: &RunConfig,
    execution: Execution,
) -> Result<LandscapeGrid> {
    if env == 0 || env > config.environments {
        return Err(DmmopError::EnvironmentOutOfRange {
            env,
            max: config.environments,
        });
    }
    let mut seq = EnvironmentSequence::new(spec, seed, config)?;
    seq.advance_to(env)?;
    landscape_grid(seq.landscape(), resolution, execution)
}
