//! Cone-peak landscapes (families F1–F4).
//!
//! Fitness is the maximum over all peaks of `height - width * distance`.

use crate::error::{DmmopError, Result};
use crate::model::{check_dim, distance_unchecked, Optimum, SolutionVector, DOMAIN_MAX, DOMAIN_MIN};
use crate::problem::Family;
use crate::rng::RngStream;

pub const GLOBAL_HEIGHT: f64 = 75.0;
/// Height a deactivated global peak is evaluated at.
pub const INACTIVE_HEIGHT: f64 = 70.0;
pub const HEIGHT_RANGE: (f64, f64) = (30.0, 70.0);
pub const WIDTH_RANGE: (f64, f64) = (1.0, 12.0);
pub const GLOBAL_PEAKS: usize = 4;
pub const MAX_LOCAL_PEAKS: usize = 4;

const PLACEMENT_ATTEMPTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeakKind {
    Global,
    Local,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DfPeak {
    pub height: f64,
    pub width: f64,
    pub position: SolutionVector,
    pub kind: PeakKind,
    pub active: bool,
}

impl DfPeak {
    /// The height this peak contributes during evaluation.
    pub fn effective_height(&self) -> f64 {
        match (self.kind, self.active) {
            (PeakKind::Global, false) => INACTIVE_HEIGHT,
            _ => self.height,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DfLandscape {
    pub peaks: Vec<DfPeak>,
    pub dim: usize,
}

impl DfLandscape {
    pub fn global_count(&self) -> usize {
        self.peaks.iter().filter(|p| p.kind == PeakKind::Global).count()
    }

    pub fn active_global_count(&self) -> usize {
        self.peaks
            .iter()
            .filter(|p| p.kind == PeakKind::Global && p.active)
            .count()
    }

    pub fn local_count(&self) -> usize {
        self.peaks.len() - self.global_count()
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        Ok(self.evaluate_unchecked(x))
    }

    pub(crate) fn evaluate_unchecked(&self, x: &[f64]) -> f64 {
        self.peaks
            .iter()
            .map(|p| p.effective_height() - p.width * distance_unchecked(x, &p.position))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Positions and heights of the active global peaks.
    pub fn global_optima(&self) -> Vec<Optimum> {
        self.peaks
            .iter()
            .filter(|p| p.kind == PeakKind::Global && p.active)
            .map(|p| Optimum {
                position: p.position.clone(),
                fitness: p.height,
            })
            .collect()
    }

    /// Marks the first `active` global peaks active and the rest inactive.
    pub fn set_active_globals(&mut self, active: usize) {
        for (k, p) in self
            .peaks
            .iter_mut()
            .filter(|p| p.kind == PeakKind::Global)
            .enumerate()
        {
            p.active = k < active;
        }
    }
}

/// Builds the environment-1 landscape of a cone-peak family.
pub fn init_df(family: Family, dim: usize, min_spacing: f64, rng: &mut RngStream) -> Result<DfLandscape> {
    if dim == 0 {
        return Err(DmmopError::Config("dimension must be at least 1".into()));
    }
    let fixed = |coords: [f64; 4], width: f64| -> DfLandscape {
        let peaks = coords
            .iter()
            .map(|&c| DfPeak {
                height: GLOBAL_HEIGHT,
                width,
                position: SolutionVector::new(vec![c; dim]),
                kind: PeakKind::Global,
                active: true,
            })
            .collect();
        DfLandscape { peaks, dim }
    };
    match family {
        Family::F1 => init_random(dim, min_spacing, rng),
        Family::F2 => Ok(fixed([-3.0, -2.0, 2.0, 3.0], 12.0)),
        Family::F3 => Ok(fixed([-2.5, -1.5, 0.5, 4.5], 5.0)),
        Family::F4 => Ok(fixed([-3.0, -1.0, 1.0, 3.0], 5.0)),
        other => Err(DmmopError::Config(format!("{other} is not a cone-peak family"))),
    }
}

fn init_random(dim: usize, min_spacing: f64, rng: &mut RngStream) -> Result<DfLandscape> {
    let locals = rng.uniform_int(0, MAX_LOCAL_PEAKS);
    let mut peaks: Vec<DfPeak> = Vec::with_capacity(GLOBAL_PEAKS + locals);
    for k in 0..GLOBAL_PEAKS + locals {
        let position = place(dim, min_spacing, &peaks, rng)?;
        let width = rng.uniform(WIDTH_RANGE.0, WIDTH_RANGE.1);
        let (kind, height) = if k < GLOBAL_PEAKS {
            (PeakKind::Global, GLOBAL_HEIGHT)
        } else {
            (PeakKind::Local, rng.uniform(HEIGHT_RANGE.0, HEIGHT_RANGE.1))
        };
        peaks.push(DfPeak {
            height,
            width,
            position,
            kind,
            active: true,
        });
    }
    Ok(DfLandscape { peaks, dim })
}

fn place(dim: usize, min_spacing: f64, existing: &[DfPeak], rng: &mut RngStream) -> Result<SolutionVector> {
    for _ in 0..PLACEMENT_ATTEMPTS {
        let candidate = rng.uniform_point(dim, DOMAIN_MIN, DOMAIN_MAX);
        if existing
            .iter()
            .all(|p| distance_unchecked(&candidate, &p.position) >= min_spacing)
        {
            return Ok(candidate.into());
        }
    }
    Err(DmmopError::Internal(format!(
        "could not place a peak {min_spacing} away from {} others after {PLACEMENT_ATTEMPTS} attempts",
        existing.len()
    )))
}
