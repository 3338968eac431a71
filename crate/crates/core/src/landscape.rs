//! Family-independent view of an environment's fitness landscape.

use crate::composition::{init_composition, CompositionLandscape};
use crate::df::{init_df, DfLandscape, PeakKind};
use crate::error::Result;
use crate::model::{Optimum, SolutionVector};
use crate::problem::Family;
use crate::rng::RngStream;

#[derive(Debug, Clone, PartialEq)]
pub enum Landscape {
    Peaks(DfLandscape),
    Composition(CompositionLandscape),
}

impl Landscape {
    pub fn init(family: Family, dim: usize, min_spacing: f64, rng: &mut RngStream) -> Result<Self> {
        if family.is_peak_family() {
            init_df(family, dim, min_spacing, rng).map(Landscape::Peaks)
        } else {
            init_composition(family, dim, min_spacing, rng).map(Landscape::Composition)
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Landscape::Peaks(l) => l.dim,
            Landscape::Composition(l) => l.dim,
        }
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        match self {
            Landscape::Peaks(l) => l.evaluate(x),
            Landscape::Composition(l) => l.evaluate(x),
        }
    }

    /// Evaluation without the dimension check; callers guarantee `x.len() == dim`.
    pub fn evaluate_unchecked(&self, x: &[f64]) -> f64 {
        match self {
            Landscape::Peaks(l) => l.evaluate_unchecked(x),
            Landscape::Composition(l) => l.evaluate_unchecked(x),
        }
    }

    pub fn global_optima(&self) -> Vec<Optimum> {
        match self {
            Landscape::Peaks(l) => l.global_optima(),
            Landscape::Composition(l) => l.global_optima(),
        }
    }

    /// Number of global optima when all are active.
    pub fn max_global_optima(&self) -> usize {
        match self {
            Landscape::Peaks(l) => l.global_count(),
            Landscape::Composition(l) => l.len(),
        }
    }

    pub fn set_active_optima(&mut self, active: usize) {
        match self {
            Landscape::Peaks(l) => l.set_active_globals(active),
            Landscape::Composition(l) => l.set_active(active),
        }
    }

    /// Every point subject to the minimum-spacing rule: all peak positions,
    /// or all component shifts.
    pub fn positions(&self) -> Vec<SolutionVector> {
        match self {
            Landscape::Peaks(l) => l.peaks.iter().map(|p| p.position.clone()).collect(),
            Landscape::Composition(l) => l.components.iter().map(|c| c.shift.clone()).collect(),
        }
    }

    pub fn set_positions(&mut self, positions: Vec<SolutionVector>) {
        match self {
            Landscape::Peaks(l) => {
                for (p, x) in l.peaks.iter_mut().zip(positions) {
                    p.position = x;
                }
            }
            Landscape::Composition(l) => {
                for (c, x) in l.components.iter_mut().zip(positions) {
                    c.shift = x;
                }
            }
        }
    }

    /// Number of peaks (or components) tracked by the dynamics.
    pub fn len(&self) -> usize {
        match self {
            Landscape::Peaks(l) => l.peaks.len(),
            Landscape::Composition(l) => l.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub(crate) fn is_local_peak(&self, i: usize) -> bool {
        matches!(self, Landscape::Peaks(l) if l.peaks[i].kind == PeakKind::Local)
    }
}
