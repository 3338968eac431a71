//! Run lifecycle: problem construction, budget accounting, change triggering,
//! population snapshots and per-environment ground truth.

use crate::config::RunConfig;
use crate::dynamics::{advance_environment, enter_cycle, ChangeState, DynamicsConfig};
use crate::error::{DmmopError, Result};
use crate::landscape::Landscape;
use crate::model::{check_dim, Optimum, SolutionVector};
use crate::problem::ProblemSpec;
use crate::rng::{make_rng, RngStream};

/// The environments of one run, generated without any evaluation budget.
///
/// A [`ProblemInstance`] drives the same sequence, so dumps and grids
/// produced from it match what an optimizer sees during a run.
#[derive(Debug, Clone)]
pub struct EnvironmentSequence {
    spec: ProblemSpec,
    seed: u64,
    landscape: Landscape,
    state: ChangeState,
    dynamics: DynamicsConfig,
    rng: RngStream,
}

impl EnvironmentSequence {
    pub fn new(spec: ProblemSpec, seed: u64, config: &RunConfig) -> Result<Self> {
        let dynamics = config.dynamics();
        let mut rng = make_rng(seed);
        let mut landscape = Landscape::init(spec.family, spec.dim, dynamics.min_spacing, &mut rng)?;
        let mut state = ChangeState::new(&landscape, spec.mode, &mut rng);
        enter_cycle(&mut landscape, &mut state, &dynamics, &mut rng)?;
        Ok(EnvironmentSequence {
            spec,
            seed,
            landscape,
            state,
            dynamics,
            rng,
        })
    }

    pub fn spec(&self) -> ProblemSpec {
        self.spec
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn landscape(&self) -> &Landscape {
        &self.landscape
    }

    pub fn state(&self) -> &ChangeState {
        &self.state
    }

    /// Current environment, 1-based.
    pub fn environment(&self) -> usize {
        self.state.environment
    }

    pub fn advance(&mut self) -> Result<()> {
        advance_environment(&mut self.landscape, &mut self.state, &self.dynamics, &mut self.rng)
    }

    /// Advances until environment `env` is current.
    pub fn advance_to(&mut self, env: usize) -> Result<()> {
        while self.environment() < env {
            self.advance()?;
        }
        Ok(())
    }
}

/// The population scored for one environment.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationSnapshot {
    pub environment: usize,
    pub individuals: Vec<SolutionVector>,
    /// Fitness of each individual under the environment it was reported in.
    pub fitness: Vec<f64>,
}

/// One run of one problem under the evaluation-budget protocol.
///
/// Instances are single-owner: evaluations mutate the budget counter and may
/// trigger an environmental change, so concurrent use must be externally
/// ordered. Independent instances can run on separate threads.
#[derive(Debug)]
pub struct ProblemInstance {
    sequence: EnvironmentSequence,
    budget_per_env: usize,
    environments: usize,
    expose_environment: bool,
    used_in_env: usize,
    total_used: u64,
    pending: Vec<SolutionVector>,
    snapshots: Vec<PopulationSnapshot>,
    ground_truth: Vec<Vec<Optimum>>,
    frozen: bool,
}

/// Problem `P{index}` under the official protocol.
pub fn create_problem(index: usize, seed: u64) -> Result<ProblemInstance> {
    ProblemInstance::new(ProblemSpec::get(index)?, seed, &RunConfig::default())
}

impl ProblemInstance {
    pub fn new(spec: ProblemSpec, seed: u64, config: &RunConfig) -> Result<Self> {
        config.validate()?;
        let sequence = EnvironmentSequence::new(spec, seed, config)?;
        let first_truth = sequence.landscape().global_optima();
        Ok(ProblemInstance {
            sequence,
            budget_per_env: config.budget_per_environment(spec.dim),
            environments: config.environments,
            expose_environment: config.expose_environment,
            used_in_env: 0,
            total_used: 0,
            pending: Vec::new(),
            snapshots: Vec::with_capacity(config.environments),
            ground_truth: vec![first_truth],
            frozen: false,
        })
    }

    pub fn spec(&self) -> ProblemSpec {
        self.sequence.spec()
    }

    pub fn seed(&self) -> u64 {
        self.sequence.seed()
    }

    pub fn dim(&self) -> usize {
        self.sequence.spec().dim
    }

    pub fn environments(&self) -> usize {
        self.environments
    }

    pub fn budget_per_environment(&self) -> usize {
        self.budget_per_env
    }

    /// Evaluations left in the current environment (0 once frozen).
    pub fn remaining_budget(&self) -> usize {
        if self.frozen {
            0
        } else {
            self.budget_per_env - self.used_in_env
        }
    }

    /// Current environment index, or `None` when change visibility is
    /// disabled in the configuration.
    pub fn current_environment(&self) -> Option<usize> {
        self.expose_environment.then(|| self.sequence.environment())
    }

    pub fn total_evaluations(&self) -> u64 {
        self.total_used
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen
    }

    /// Fitness of `x` in the current environment. Consumes one evaluation;
    /// the evaluation that exhausts an environment's budget seals its snapshot
    /// and triggers the change to the next environment.
    pub fn evaluate(&mut self, x: &[f64]) -> Result<f64> {
        if self.frozen {
            return Err(DmmopError::Frozen);
        }
        check_dim(self.dim(), x.len())?;
        let f = self.sequence.landscape().evaluate_unchecked(x);
        self.used_in_env += 1;
        self.total_used += 1;
        if self.used_in_env == self.budget_per_env {
            self.seal();
            if self.sequence.environment() == self.environments {
                self.frozen = true;
            } else {
                self.sequence.advance()?;
                self.used_in_env = 0;
                self.ground_truth.push(self.sequence.landscape().global_optima());
            }
        }
        Ok(f)
    }

    /// Replaces the pending population of the current environment. The last
    /// report before the budget runs out is the one scored.
    pub fn report_population(&mut self, individuals: &[SolutionVector]) -> Result<()> {
        if self.frozen {
            return Err(DmmopError::Frozen);
        }
        for x in individuals {
            check_dim(self.dim(), x.dim())?;
        }
        self.pending.clear();
        self.pending.extend_from_slice(individuals);
        Ok(())
    }

    fn seal(&mut self) {
        let individuals = std::mem::take(&mut self.pending);
        let landscape = self.sequence.landscape();
        // scoring evaluations are free of budget
        let fitness = individuals.iter().map(|x| landscape.evaluate_unchecked(x)).collect();
        self.snapshots.push(PopulationSnapshot {
            environment: self.sequence.environment(),
            individuals,
            fitness,
        });
    }

    /// Known global optima of environment `env` (1-based), recorded when the
    /// environment began.
    pub fn ground_truth(&self, env: usize) -> Result<&[Optimum]> {
        if env == 0 || env > self.ground_truth.len() {
            return Err(DmmopError::EnvironmentOutOfRange {
                env,
                max: self.ground_truth.len(),
            });
        }
        Ok(&self.ground_truth[env - 1])
    }

    pub fn ground_truths(&self) -> &[Vec<Optimum>] {
        &self.ground_truth
    }

    pub fn snapshots(&self) -> &[PopulationSnapshot] {
        &self.snapshots
    }

    pub fn into_parts(self) -> (Vec<PopulationSnapshot>, Vec<Vec<Optimum>>) {
        (self.snapshots, self.ground_truth)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(index: usize, seed: u64) -> ProblemInstance {
        let cfg = RunConfig {
            budget_multiplier: 2,
            environments: 4,
            ..RunConfig::default()
        };
        ProblemInstance::new(ProblemSpec::get(index).unwrap(), seed, &cfg).unwrap()
    }

    #[test]
    fn fresh_instance_state() {
        let inst = create_problem(1, 1).unwrap();
        assert_eq!(inst.remaining_budget(), 25_000);
        assert_eq!(inst.current_environment(), Some(1));
        assert!(create_problem(25, 1).is_err());
    }

    #[test]
    fn counter_and_boundaries() {
        let mut inst = small(1, 1);
        let x = vec![0.0; 5];
        inst.evaluate(&x).unwrap();
        assert_eq!(inst.remaining_budget(), 9);
        for _ in 0..9 {
            inst.evaluate(&x).unwrap();
        }
        assert_eq!(inst.current_environment(), Some(2));
        assert_eq!(inst.remaining_budget(), 10);
        assert_eq!(inst.snapshots().len(), 1);
    }

    #[test]
    fn freezes_after_last_environment() {
        let mut inst = small(2, 1);
        let x = vec![0.0; 5];
        for _ in 0..40 {
            inst.evaluate(&x).unwrap();
        }
        assert!(inst.is_frozen());
        assert_eq!(inst.remaining_budget(), 0);
        assert!(matches!(inst.evaluate(&x), Err(DmmopError::Frozen)));
        assert!(matches!(inst.report_population(&[]), Err(DmmopError::Frozen)));
        assert_eq!(inst.snapshots().len(), 4);
        assert_eq!(inst.total_evaluations(), 40);
    }

    #[test]
    fn last_report_wins_and_missing_report_is_empty() {
        let mut inst = small(2, 1);
        let a: SolutionVector = vec![1.0; 5].into();
        let b: SolutionVector = vec![-1.0; 5].into();
        inst.report_population(std::slice::from_ref(&a)).unwrap();
        inst.report_population(&[b.clone(), a.clone()]).unwrap();
        for _ in 0..20 {
            inst.evaluate(&[0.0; 5]).unwrap();
        }
        let snaps = inst.snapshots();
        assert_eq!(snaps[0].individuals, vec![b, a]);
        assert_eq!(snaps[0].fitness.len(), 2);
        assert!(snaps[1].individuals.is_empty());
    }

    #[test]
    fn dimension_checks() {
        let mut inst = small(2, 1);
        assert!(inst.evaluate(&[0.0; 4]).is_err());
        assert!(inst.report_population(&[vec![0.0; 3].into()]).is_err());
        assert_eq!(inst.remaining_budget(), 10);
    }

    #[test]
    fn ground_truth_range() {
        let inst = small(5, 1);
        assert_eq!(inst.ground_truth(1).unwrap().len(), 6);
        assert!(inst.ground_truth(0).is_err());
        assert!(inst.ground_truth(2).is_err());
    }

    #[test]
    fn hidden_environment_index() {
        let cfg = RunConfig {
            expose_environment: false,
            ..RunConfig::default()
        };
        let inst = ProblemInstance::new(ProblemSpec::get(1).unwrap(), 1, &cfg).unwrap();
        assert_eq!(inst.current_environment(), None);
    }
}
