//! Shared geometric value types.

use std::ops::Deref;

use crate::error::{DmmopError, Result};

/// Lower bound of every search-space coordinate.
pub const DOMAIN_MIN: f64 = -5.0;
/// Upper bound of every search-space coordinate.
pub const DOMAIN_MAX: f64 = 5.0;

/// A candidate point in the D-dimensional search space.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolutionVector(Vec<f64>);

impl SolutionVector {
    pub fn new(coords: Vec<f64>) -> Self {
        SolutionVector(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        SolutionVector(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// True when every coordinate lies in `[DOMAIN_MIN, DOMAIN_MAX]`.
    pub fn in_domain(&self) -> bool {
        self.0.iter().all(|c| (DOMAIN_MIN..=DOMAIN_MAX).contains(c))
    }
}

impl Deref for SolutionVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for SolutionVector {
    fn from(coords: Vec<f64>) -> Self {
        SolutionVector(coords)
    }
}

impl From<&[f64]> for SolutionVector {
    fn from(coords: &[f64]) -> Self {
        SolutionVector(coords.to_vec())
    }
}

/// A known global optimum: its position and fitness.
#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub position: SolutionVector,
    pub fitness: f64,
}

/// L2 distance between two points of equal dimension.
pub fn euclidean_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(DmmopError::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(distance_unchecked(a, b))
}

#[inline]
pub(crate) fn distance_unchecked(a: &[f64], b: &[f64]) -> f64 {
    squared_distance(a, b).sqrt()
}

#[inline]
pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Folds a coordinate back into the domain by mirror reflection at the bounds.
pub fn reflect_into_domain(c: f64) -> f64 {
    if (DOMAIN_MIN..=DOMAIN_MAX).contains(&c) {
        return c;
    }
    let width = DOMAIN_MAX - DOMAIN_MIN;
    let m = (c - DOMAIN_MIN).rem_euclid(2.0 * width);
    let folded = if m > width { 2.0 * width - m } else { m };
    DOMAIN_MIN + folded
}

pub(crate) fn clamp_to_domain(c: f64) -> f64 {
    c.clamp(DOMAIN_MIN, DOMAIN_MAX)
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(DmmopError::DimensionMismatch { expected, got })
    }
}
