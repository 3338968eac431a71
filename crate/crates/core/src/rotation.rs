//! Plane-rotation machinery shared by initialization and dynamics.
//!
//! A rotation is the product of Givens rotations by one angle over a random
//! pairing of the coordinate axes. For odd dimensions one randomly chosen axis
//! is left out of the pairing and stays fixed.

use nalgebra::DMatrix;

use crate::rng::RngStream;

pub type Matrix = DMatrix<f64>;

/// Disjoint axis pairs covering `2 * floor(dim / 2)` randomly chosen axes.
pub fn random_pairing(dim: usize, rng: &mut RngStream) -> Vec<(usize, usize)> {
    let order = rng.shuffled_indices(dim);
    order.chunks_exact(2).map(|p| (p[0], p[1])).collect()
}

/// Product of plane rotations by `theta` in each listed axis pair.
pub fn rotation_from_pairing(dim: usize, pairs: &[(usize, usize)], theta: f64) -> Matrix {
    let mut r = Matrix::identity(dim, dim);
    let (s, c) = theta.sin_cos();
    for &(i, j) in pairs {
        r[(i, i)] = c;
        r[(j, j)] = c;
        r[(i, j)] = s;
        r[(j, i)] = -s;
    }
    r
}

/// Rotation by `theta` over a fresh random pairing of the axes.
pub fn build_rotation(dim: usize, theta: f64, rng: &mut RngStream) -> Matrix {
    let pairs = random_pairing(dim, rng);
    rotation_from_pairing(dim, &pairs, theta)
}

/// Random orthogonal matrix: `dim` layers of paired plane rotations, each
/// layer with its own pairing and an angle uniform in `[-pi, pi]`.
pub fn random_orthogonal(dim: usize, rng: &mut RngStream) -> Matrix {
    let mut m = Matrix::identity(dim, dim);
    for _ in 0..dim.max(1) {
        let theta = rng.uniform(-std::f64::consts::PI, std::f64::consts::PI);
        let r = build_rotation(dim, theta, rng);
        m *= r;
    }
    m
}

/// Largest absolute entry of `M Mᵀ - I`.
pub fn orthogonality_error(m: &Matrix) -> f64 {
    let n = m.nrows();
    let prod = m * m.transpose();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((prod[(i, j)] - target).abs());
        }
    }
    worst
}

/// Row vector times matrix: `out_j = sum_i x_i * m[i][j]`.
pub fn row_times(x: &[f64], m: &Matrix, out: &mut [f64]) {
    let n = m.ncols();
    debug_assert_eq!(x.len(), m.nrows());
    for (j, o) in out.iter_mut().enumerate().take(n) {
        let col = m.column(j);
        *o = x.iter().zip(col.iter()).map(|(a, b)| a * b).sum();
    }
}
