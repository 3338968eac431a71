//! Run configuration.
//!
//! A flat `key = value` file (valid TOML with only top-level keys). Every key
//! is optional and defaults to the official protocol value:
//!
//! ```text
//! # change-rule constants
//! alpha = 0.04
//! alpha_max = 0.01          # 0.1 is a widely used alternative
//! chaos_a = 3.67
//! period = 12
//! noise_severity = 0.8
//! dpeaks = 0.1
//! repair_cap = 10000
//! # protocol
//! budget_multiplier = 5000  # evaluations per environment = budget_multiplier * D
//! environments = 60
//! expose_environment = true
//! # scoring
//! eps_d = 0.05
//! eps_f = [1e-3, 1e-4, 1e-5]
//! # baseline optimizer (arbitrary but fixed defaults)
//! de_subpopulations = 10
//! de_population_size = 10
//! de_scale_factor = 0.5
//! de_crossover_rate = 0.9
//! de_memory_size = 20
//! de_reinit_fraction = 0.5
//! ```

use std::path::Path;

use serde::Deserialize;

use crate::dynamics::DynamicsConfig;
use crate::error::{DmmopError, Result};
use crate::metrics::AccuracyLevel;
use crate::optimizer::OptimizerConfig;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub alpha: f64,
    pub alpha_max: f64,
    pub chaos_a: f64,
    pub period: usize,
    pub noise_severity: f64,
    pub dpeaks: f64,
    pub repair_cap: usize,
    pub budget_multiplier: usize,
    pub environments: usize,
    pub expose_environment: bool,
    pub eps_d: f64,
    pub eps_f: Vec<f64>,
    pub de_subpopulations: usize,
    pub de_population_size: usize,
    pub de_scale_factor: f64,
    pub de_crossover_rate: f64,
    pub de_memory_size: usize,
    pub de_reinit_fraction: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let dynamics = DynamicsConfig::default();
        let opt = OptimizerConfig::default();
        RunConfig {
            alpha: dynamics.alpha,
            alpha_max: dynamics.alpha_max,
            chaos_a: dynamics.chaos_a,
            period: dynamics.period,
            noise_severity: dynamics.noise_severity,
            dpeaks: dynamics.min_spacing,
            repair_cap: dynamics.repair_cap,
            budget_multiplier: 5000,
            environments: 60,
            expose_environment: true,
            eps_d: 0.05,
            eps_f: vec![1e-3, 1e-4, 1e-5],
            de_subpopulations: opt.subpopulations,
            de_population_size: opt.population_size,
            de_scale_factor: opt.scale_factor,
            de_crossover_rate: opt.crossover_rate,
            de_memory_size: opt.memory_size,
            de_reinit_fraction: opt.reinit_fraction,
        }
    }
}

// false for NaN as well
fn positive(x: f64) -> bool {
    x > 0.0
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| DmmopError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| DmmopError::io(path, e))?;
        RunConfig::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(DmmopError::Config(msg.to_string()));
        if self.period == 0 {
            return bad("period must be positive");
        }
        if !positive(self.dpeaks) {
            return bad("dpeaks must be positive");
        }
        if self.budget_multiplier == 0 || self.environments == 0 {
            return bad("budget_multiplier and environments must be positive");
        }
        if !positive(self.eps_d) || self.eps_f.is_empty() || !self.eps_f.iter().all(|&e| positive(e)) {
            return bad("eps_d and every eps_f level must be positive");
        }
        self.optimizer().validate()
    }

    pub fn dynamics(&self) -> DynamicsConfig {
        DynamicsConfig {
            alpha: self.alpha,
            alpha_max: self.alpha_max,
            chaos_a: self.chaos_a,
            period: self.period,
            noise_severity: self.noise_severity,
            min_spacing: self.dpeaks,
            repair_cap: self.repair_cap,
        }
    }

    pub fn accuracy_levels(&self) -> Vec<AccuracyLevel> {
        self.eps_f
            .iter()
            .map(|&f| AccuracyLevel {
                eps_f: f,
                eps_d: self.eps_d,
            })
            .collect()
    }

    pub fn optimizer(&self) -> OptimizerConfig {
        OptimizerConfig {
            subpopulations: self.de_subpopulations,
            population_size: self.de_population_size,
            scale_factor: self.de_scale_factor,
            crossover_rate: self.de_crossover_rate,
            memory_size: self.de_memory_size,
            reinit_fraction: self.de_reinit_fraction,
        }
    }

    pub fn budget_per_environment(&self, dim: usize) -> usize {
        self.budget_multiplier * dim
    }
}
