//! Optimizers that drive a [`ProblemInstance`] to completion.
//!
//! The baseline is a multi-population DE/rand/1/bin with crowding
//! replacement: a trial vector competes with the nearest member of its own
//! subpopulation. On an environmental change the best member of every
//! subpopulation is remembered, the worst `reinit_fraction` of each
//! subpopulation is replaced by remembered points and fresh random points,
//! and everything is re-evaluated.

use std::fmt;
use std::str::FromStr;

use crate::controller::{PopulationSnapshot, ProblemInstance};
use crate::error::{DmmopError, Result};
use crate::model::{reflect_into_domain, squared_distance, SolutionVector, DOMAIN_MAX, DOMAIN_MIN};
use crate::rng::RngStream;

/// Baseline settings. Defaults (10 x 10, F = 0.5, CR = 0.9, memory 20,
/// reinit 0.5) are arbitrary but fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub subpopulations: usize,
    pub population_size: usize,
    pub scale_factor: f64,
    pub crossover_rate: f64,
    pub memory_size: usize,
    pub reinit_fraction: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            subpopulations: 10,
            population_size: 10,
            scale_factor: 0.5,
            crossover_rate: 0.9,
            memory_size: 20,
            reinit_fraction: 0.5,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(DmmopError::Config(m.to_string()));
        if self.population_size < 4 {
            return bad("de_population_size must be at least 4");
        }
        if self.subpopulations == 0 {
            return bad("de_subpopulations must be positive");
        }
        if !(self.scale_factor > 0.0 && self.scale_factor <= 2.0) {
            return bad("de_scale_factor must lie in (0, 2]");
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return bad("de_crossover_rate must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.reinit_fraction) {
            return bad("de_reinit_fraction must lie in [0, 1]");
        }
        Ok(())
    }
}

/// Something that consumes an instance's whole budget.
pub trait Optimizer {
    fn name(&self) -> &'static str;

    /// Runs until the instance is frozen.
    fn run(&mut self, instance: &mut ProblemInstance, rng: &mut RngStream) -> Result<()>;
}

/// Optimizers selectable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimizerKind {
    CrowdingDe,
    RandomSearch,
    Null,
}

impl OptimizerKind {
    pub fn build(self, config: &OptimizerConfig) -> Box<dyn Optimizer + Send> {
        match self {
            OptimizerKind::CrowdingDe => Box::new(CrowdingDe::new(config.clone())),
            OptimizerKind::RandomSearch => Box::new(RandomSearch::new(config.subpopulations * config.population_size)),
            OptimizerKind::Null => Box::new(NullOptimizer),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            OptimizerKind::CrowdingDe => "crowding-de",
            OptimizerKind::RandomSearch => "random-search",
            OptimizerKind::Null => "null",
        }
    }
}

impl fmt::Display for OptimizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OptimizerKind {
    type Err = DmmopError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "crowding-de" | "baseline" | "de" => Ok(OptimizerKind::CrowdingDe),
            "random-search" | "random" => Ok(OptimizerKind::RandomSearch),
            "null" => Ok(OptimizerKind::Null),
            other => Err(DmmopError::Config(format!(
                "unknown optimizer `{other}` (expected crowding-de, random-search or null)"
            ))),
        }
    }
}

/// Runs the baseline on a fresh instance and returns one snapshot per
/// environment.
pub fn optimize(
    instance: &mut ProblemInstance,
    config: &OptimizerConfig,
    rng: &mut RngStream,
) -> Result<Vec<PopulationSnapshot>> {
    CrowdingDe::new(config.clone()).run(instance, rng)?;
    Ok(instance.snapshots().to_vec())
}

/// Notices environment changes, through the exposed index when available and
/// otherwise through the per-environment budget jumping back up.
#[derive(Debug, Clone, Copy)]
struct ChangeWatch {
    env: Option<usize>,
    remaining: usize,
}

impl ChangeWatch {
    fn new(instance: &ProblemInstance) -> Self {
        ChangeWatch {
            env: instance.current_environment(),
            remaining: instance.remaining_budget(),
        }
    }

    fn changed(&mut self, instance: &ProblemInstance) -> bool {
        let env = instance.current_environment();
        let remaining = instance.remaining_budget();
        let changed = match env {
            Some(_) => env != self.env,
            None => remaining > self.remaining,
        };
        self.env = env;
        self.remaining = remaining;
        changed
    }
}

#[derive(Debug, Clone)]
struct Member {
    x: SolutionVector,
    f: f64,
}

/// Outcome of one budgeted evaluation.
enum Step {
    /// Evaluated in the environment that is still current.
    Same(f64),
    /// The evaluation exhausted the environment; the value belongs to the old one.
    Changed,
    Frozen,
}

pub struct CrowdingDe {
    config: OptimizerConfig,
    subpops: Vec<Vec<Member>>,
    memory: Vec<SolutionVector>,
}

impl CrowdingDe {
    pub fn new(config: OptimizerConfig) -> Self {
        CrowdingDe {
            config,
            subpops: Vec::new(),
            memory: Vec::new(),
        }
    }

    fn step(instance: &mut ProblemInstance, watch: &mut ChangeWatch, x: &[f64]) -> Result<Step> {
        if instance.is_frozen() {
            return Ok(Step::Frozen);
        }
        let f = instance.evaluate(x)?;
        if instance.is_frozen() {
            return Ok(Step::Frozen);
        }
        Ok(if watch.changed(instance) { Step::Changed } else { Step::Same(f) })
    }

    /// Reports the whole population when the next evaluation is the last
    /// one of the environment.
    fn report_if_last(&self, instance: &mut ProblemInstance) -> Result<()> {
        if instance.remaining_budget() == 1 {
            instance.report_population(&self.population())?;
        }
        Ok(())
    }

    fn population(&self) -> Vec<SolutionVector> {
        self.subpops.iter().flatten().map(|m| m.x.clone()).collect()
    }

    fn random_point(dim: usize, rng: &mut RngStream) -> SolutionVector {
        rng.uniform_point(dim, DOMAIN_MIN, DOMAIN_MAX).into()
    }

    /// Evaluates every member; restarts whenever a change interrupts.
    /// Returns false once the instance is frozen.
    fn evaluate_all(&mut self, instance: &mut ProblemInstance, watch: &mut ChangeWatch, rng: &mut RngStream) -> Result<bool> {
        'restart: loop {
            for s in 0..self.subpops.len() {
                for i in 0..self.subpops[s].len() {
                    self.report_if_last(instance)?;
                    let x = self.subpops[s][i].x.clone();
                    match Self::step(instance, watch, &x)? {
                        Step::Same(f) => self.subpops[s][i].f = f,
                        Step::Changed => {
                            self.respond_to_change(instance.dim(), rng);
                            continue 'restart;
                        }
                        Step::Frozen => return Ok(false),
                    }
                }
            }
            return Ok(true);
        }
    }

    fn respond_to_change(&mut self, dim: usize, rng: &mut RngStream) {
        for sp in &self.subpops {
            if let Some(best) = sp.iter().max_by(|a, b| a.f.total_cmp(&b.f)) {
                self.memory.push(best.x.clone());
            }
        }
        if self.memory.len() > self.config.memory_size {
            let excess = self.memory.len() - self.config.memory_size;
            self.memory.drain(..excess);
        }
        let k = (self.config.reinit_fraction * self.config.population_size as f64).round() as usize;
        let mut recalled = self.memory.iter().rev();
        for sp in &mut self.subpops {
            sp.sort_by(|a, b| b.f.total_cmp(&a.f));
            let n = sp.len();
            for m in sp.iter_mut().skip(n.saturating_sub(k)) {
                m.x = match recalled.next() {
                    Some(x) if rng.unit() < 0.5 => x.clone(),
                    _ => Self::random_point(dim, rng),
                };
                m.f = f64::NEG_INFINITY;
            }
        }
    }

    fn trial(&self, s: usize, i: usize, dim: usize, rng: &mut RngStream) -> SolutionVector {
        let sp = &self.subpops[s];
        let n = sp.len();
        let mut pick = |taken: &[usize]| loop {
            let r = rng.uniform_int(0, n - 1);
            if !taken.contains(&r) {
                return r;
            }
        };
        let r1 = pick(&[i]);
        let r2 = pick(&[i, r1]);
        let r3 = pick(&[i, r1, r2]);
        let jrand = rng.uniform_int(0, dim - 1);
        let target = &sp[i].x;
        let coords = (0..dim)
            .map(|j| {
                if j == jrand || rng.unit() < self.config.crossover_rate {
                    let v = sp[r1].x[j] + self.config.scale_factor * (sp[r2].x[j] - sp[r3].x[j]);
                    reflect_into_domain(v)
                } else {
                    target[j]
                }
            })
            .collect::<Vec<_>>();
        coords.into()
    }
}

impl Optimizer for CrowdingDe {
    fn name(&self) -> &'static str {
        OptimizerKind::CrowdingDe.name()
    }

    fn run(&mut self, instance: &mut ProblemInstance, rng: &mut RngStream) -> Result<()> {
        self.config.validate()?;
        let dim = instance.dim();
        let mut watch = ChangeWatch::new(instance);
        self.memory.clear();
        self.subpops = (0..self.config.subpopulations)
            .map(|_| {
                (0..self.config.population_size)
                    .map(|_| Member {
                        x: Self::random_point(dim, rng),
                        f: f64::NEG_INFINITY,
                    })
                    .collect()
            })
            .collect();
        if !self.evaluate_all(instance, &mut watch, rng)? {
            return Ok(());
        }
        loop {
            for s in 0..self.subpops.len() {
                for i in 0..self.subpops[s].len() {
                    let trial = self.trial(s, i, dim, rng);
                    self.report_if_last(instance)?;
                    match Self::step(instance, &mut watch, &trial)? {
                        Step::Same(f) => {
                            let sp = &mut self.subpops[s];
                            let nearest = sp
                                .iter()
                                .enumerate()
                                .map(|(k, m)| (k, squared_distance(&m.x, &trial)))
                                .min_by(|a, b| a.1.total_cmp(&b.1))
                                .map(|(k, _)| k)
                                .expect("subpopulation is never empty");
                            if f > sp[nearest].f {
                                sp[nearest] = Member { x: trial, f };
                            }
                        }
                        Step::Changed => {
                            self.respond_to_change(dim, rng);
                            if !self.evaluate_all(instance, &mut watch, rng)? {
                                return Ok(());
                            }
                        }
                        Step::Frozen => return Ok(()),
                    }
                }
            }
        }
    }
}

/// Uniform random sampling that reports the best points seen in the current
/// environment. Used as a control.
pub struct RandomSearch {
    keep: usize,
}

impl RandomSearch {
    pub fn new(keep: usize) -> Self {
        RandomSearch { keep: keep.max(1) }
    }
}

impl Optimizer for RandomSearch {
    fn name(&self) -> &'static str {
        OptimizerKind::RandomSearch.name()
    }

    fn run(&mut self, instance: &mut ProblemInstance, rng: &mut RngStream) -> Result<()> {
        let dim = instance.dim();
        let mut watch = ChangeWatch::new(instance);
        let mut best: Vec<(f64, SolutionVector)> = Vec::with_capacity(self.keep + 1);
        while !instance.is_frozen() {
            if instance.remaining_budget() == 1 {
                let pts: Vec<SolutionVector> = best.iter().map(|(_, x)| x.clone()).collect();
                instance.report_population(&pts)?;
            }
            let x: SolutionVector = rng.uniform_point(dim, DOMAIN_MIN, DOMAIN_MAX).into();
            let f = instance.evaluate(&x)?;
            if watch.changed(instance) {
                best.clear();
                continue;
            }
            let pos = best.partition_point(|(g, _)| *g >= f);
            if pos < self.keep {
                best.insert(pos, (f, x));
                best.truncate(self.keep);
            }
        }
        Ok(())
    }
}

/// Spends the budget on the origin and never reports.
pub struct NullOptimizer;

impl Optimizer for NullOptimizer {
    fn name(&self) -> &'static str {
        OptimizerKind::Null.name()
    }

    fn run(&mut self, instance: &mut ProblemInstance, _rng: &mut RngStream) -> Result<()> {
        let x = vec![0.0; instance.dim()];
        while !instance.is_frozen() {
            instance.evaluate(&x)?;
        }
        Ok(())
    }
}
