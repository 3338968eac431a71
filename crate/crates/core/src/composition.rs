//! Composition landscapes (families F5–F8).
//!
//! Fitness is `-sum_i w_i(x) * fhat_i((x - o_i) / lambda_i * M_i)` where
//! `fhat_i = C * f_i / |f_max,i|`. Weights come from Gaussian kernels of
//! width `sigma_i` around each shift, with every non-maximal weight damped by
//! `1 - w_max^10` before normalization. Each active shift is a global optimum
//! at fitness 0.

use crate::basic::BasicFunctionKind::{self, *};
use crate::error::{DmmopError, Result};
use crate::model::{check_dim, distance_unchecked, squared_distance, Optimum, SolutionVector, DOMAIN_MAX, DOMAIN_MIN};
use crate::problem::Family;
use crate::rng::RngStream;
use crate::rotation::{random_orthogonal, row_times, Matrix};

/// Normalization constant applied to every basic function.
pub const NORMALIZATION: f64 = 2000.0;
/// Added to a deactivated component's normalized value.
pub const DEACTIVATION_OFFSET: f64 = 1.0;

const PLACEMENT_ATTEMPTS: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct CompositionComponent {
    pub kind: BasicFunctionKind,
    pub shift: SolutionVector,
    pub rotation: Matrix,
    pub lambda: f64,
    pub sigma: f64,
    pub f_max: f64,
    pub active: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompositionLandscape {
    pub components: Vec<CompositionComponent>,
    pub dim: usize,
}

/// Basic-function kinds, stretch factors and kernel widths of a family.
pub fn family_recipe(family: Family) -> Option<(Vec<BasicFunctionKind>, Vec<f64>, Vec<f64>)> {
    let r = match family {
        Family::F5 => (
            vec![Griewank, Griewank, Weierstrass, Weierstrass, Sphere, Sphere],
            vec![1.0, 1.0, 8.0, 8.0, 1.0 / 5.0, 1.0 / 5.0],
            vec![1.0; 6],
        ),
        Family::F6 => (
            vec![Rastrigin, Rastrigin, Weierstrass, Weierstrass, Griewank, Griewank, Sphere, Sphere],
            vec![1.0, 1.0, 10.0, 10.0, 1.0 / 10.0, 1.0 / 10.0, 1.0 / 7.0, 1.0 / 7.0],
            vec![1.0; 8],
        ),
        Family::F7 => (
            vec![
                ExpandedGriewankRosenbrock,
                ExpandedGriewankRosenbrock,
                Weierstrass,
                Weierstrass,
                Griewank,
                Griewank,
            ],
            vec![1.0 / 4.0, 1.0 / 10.0, 2.0, 1.0, 2.0, 5.0],
            vec![1.0, 1.0, 2.0, 2.0, 2.0, 2.0],
        ),
        Family::F8 => (
            vec![
                Rastrigin,
                Rastrigin,
                ExpandedGriewankRosenbrock,
                ExpandedGriewankRosenbrock,
                Weierstrass,
                Weierstrass,
                Griewank,
                Griewank,
            ],
            vec![4.0, 1.0, 4.0, 1.0, 1.0 / 10.0, 1.0 / 5.0, 1.0 / 10.0, 1.0 / 40.0],
            vec![1.0, 1.0, 1.0, 1.0, 1.0, 2.0, 2.0, 2.0],
        ),
        _ => return None,
    };
    Some(r)
}

impl CompositionComponent {
    /// Maps `x` into this component's local frame: `(x - o) / lambda * M`.
    fn local(&self, x: &[f64], scratch: &mut [f64], out: &mut [f64]) {
        for ((s, xi), oi) in scratch.iter_mut().zip(x).zip(self.shift.iter()) {
            *s = (xi - oi) / self.lambda;
        }
        row_times(scratch, &self.rotation, out);
    }

    fn normalized(&self, z: &[f64]) -> f64 {
        let v = NORMALIZATION * self.kind.evaluate(z) / self.f_max.abs();
        if self.active {
            v
        } else {
            v + DEACTIVATION_OFFSET
        }
    }
}

fn reference_f_max(kind: BasicFunctionKind, lambda: f64, rotation: &Matrix) -> f64 {
    let dim = rotation.nrows();
    let scaled = vec![DOMAIN_MAX / lambda; dim];
    let mut z = vec![0.0; dim];
    row_times(&scaled, rotation, &mut z);
    kind.evaluate(&z)
}

impl CompositionLandscape {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn active_count(&self) -> usize {
        self.components.iter().filter(|c| c.active).count()
    }

    /// Normalized blending weights at `x`.
    pub fn weights(&self, x: &[f64]) -> Vec<f64> {
        let dim = self.dim as f64;
        let mut w: Vec<f64> = self
            .components
            .iter()
            .map(|c| {
                let d2 = squared_distance(x, &c.shift);
                (-d2 / (2.0 * dim * c.sigma * c.sigma)).exp()
            })
            .collect();
        let (imax, wmax) = w
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
        let damp = 1.0 - wmax.powi(10);
        for (i, v) in w.iter_mut().enumerate() {
            if i != imax {
                *v *= damp;
            }
        }
        let total: f64 = w.iter().sum();
        if total > 0.0 {
            w.iter_mut().for_each(|v| *v /= total);
        } else {
            let n = w.len() as f64;
            w.iter_mut().for_each(|v| *v = 1.0 / n);
        }
        w
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        Ok(self.evaluate_unchecked(x))
    }

    pub(crate) fn evaluate_unchecked(&self, x: &[f64]) -> f64 {
        let weights = self.weights(x);
        let mut scratch = vec![0.0; self.dim];
        let mut z = vec![0.0; self.dim];
        let mut total = 0.0;
        for (c, w) in self.components.iter().zip(&weights) {
            if *w == 0.0 {
                continue;
            }
            c.local(x, &mut scratch, &mut z);
            total += w * c.normalized(&z);
        }
        -total
    }

    /// `(o_i, 0)` for every active component.
    pub fn global_optima(&self) -> Vec<Optimum> {
        self.components
            .iter()
            .filter(|c| c.active)
            .map(|c| Optimum {
                position: c.shift.clone(),
                fitness: 0.0,
            })
            .collect()
    }

    /// Marks the first `active` components active and the rest inactive.
    pub fn set_active(&mut self, active: usize) {
        for (k, c) in self.components.iter_mut().enumerate() {
            c.active = k < active;
        }
    }
}

/// Builds the environment-1 landscape of a composition family.
pub fn init_composition(
    family: Family,
    dim: usize,
    min_spacing: f64,
    rng: &mut RngStream,
) -> Result<CompositionLandscape> {
    if dim < 2 {
        return Err(DmmopError::Config("composition landscapes need dimension >= 2".into()));
    }
    let (kinds, lambdas, sigmas) = family_recipe(family)
        .ok_or_else(|| DmmopError::Config(format!("{family} is not a composition family")))?;
    let mut components: Vec<CompositionComponent> = Vec::with_capacity(kinds.len());
    for ((kind, lambda), sigma) in kinds.into_iter().zip(lambdas).zip(sigmas) {
        let shift = place(dim, min_spacing, &components, rng)?;
        let rotation = random_orthogonal(dim, rng);
        let f_max = reference_f_max(kind, lambda, &rotation);
        components.push(CompositionComponent {
            kind,
            shift,
            rotation,
            lambda,
            sigma,
            f_max,
            active: true,
        });
    }
    Ok(CompositionLandscape { components, dim })
}

fn place(
    dim: usize,
    min_spacing: f64,
    existing: &[CompositionComponent],
    rng: &mut RngStream,
) -> Result<SolutionVector> {
    for _ in 0..PLACEMENT_ATTEMPTS {
        let candidate = rng.uniform_point(dim, DOMAIN_MIN, DOMAIN_MAX);
        if existing
            .iter()
            .all(|c| distance_unchecked(&candidate, &c.shift) >= min_spacing)
        {
            return Ok(candidate.into());
        }
    }
    Err(DmmopError::Internal(format!(
        "could not place a shift {min_spacing} away from {} others after {PLACEMENT_ATTEMPTS} attempts",
        existing.len()
    )))
}
