//! Basic functions blended by composition landscapes. Each attains its
//! minimum 0 at the zero vector.

use std::f64::consts::PI;
use std::sync::LazyLock;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasicFunctionKind {
    Sphere,
    Griewank,
    Rastrigin,
    Weierstrass,
    ExpandedGriewankRosenbrock,
}

impl BasicFunctionKind {
    pub fn name(self) -> &'static str {
        match self {
            BasicFunctionKind::Sphere => "sphere",
            BasicFunctionKind::Griewank => "griewank",
            BasicFunctionKind::Rastrigin => "rastrigin",
            BasicFunctionKind::Weierstrass => "weierstrass",
            BasicFunctionKind::ExpandedGriewankRosenbrock => "expanded_griewank_rosenbrock",
        }
    }

    pub fn evaluate(self, z: &[f64]) -> f64 {
        match self {
            BasicFunctionKind::Sphere => sphere(z),
            BasicFunctionKind::Griewank => griewank(z),
            BasicFunctionKind::Rastrigin => rastrigin(z),
            BasicFunctionKind::Weierstrass => weierstrass(z),
            BasicFunctionKind::ExpandedGriewankRosenbrock => expanded_griewank_rosenbrock(z),
        }
    }
}

pub fn sphere(z: &[f64]) -> f64 {
    z.iter().map(|v| v * v).sum()
}

pub fn griewank(z: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut prod = 1.0;
    for (j, v) in z.iter().enumerate() {
        sum += v * v;
        prod *= (v / ((j + 1) as f64).sqrt()).cos();
    }
    1.0 + sum / 4000.0 - prod
}

pub fn rastrigin(z: &[f64]) -> f64 {
    z.iter()
        .map(|v| v * v - 10.0 * (2.0 * PI * v).cos() + 10.0)
        .sum()
}

const WEIERSTRASS_A: f64 = 0.5;
const WEIERSTRASS_B: f64 = 3.0;
const WEIERSTRASS_KMAX: i32 = 20;

// b^k u is reduced modulo 1 before scaling by 2 pi to keep cos arguments small
fn weierstrass_term(v: f64) -> f64 {
    let u = v + 0.5;
    let (mut a, mut b) = (1.0, 1.0);
    let mut sum = 0.0;
    for _ in 0..=WEIERSTRASS_KMAX {
        let y = b * u;
        sum += a * (2.0 * PI * (y - y.floor())).cos();
        a *= WEIERSTRASS_A;
        b *= WEIERSTRASS_B;
    }
    sum
}

static WEIERSTRASS_OFFSET: LazyLock<f64> = LazyLock::new(|| weierstrass_term(0.0));

pub fn weierstrass(z: &[f64]) -> f64 {
    z.iter().map(|&v| weierstrass_term(v)).sum::<f64>() - z.len() as f64 * *WEIERSTRASS_OFFSET
}

fn griewank1(v: f64) -> f64 {
    v * v / 4000.0 - v.cos() + 1.0
}

fn rosenbrock2(a: f64, b: f64) -> f64 {
    let t = a * a - b;
    100.0 * t * t + (a - 1.0) * (a - 1.0)
}

/// Griewank of two-variable Rosenbrock over cyclic neighbour pairs,
/// evaluated at `z + 1` so the minimum sits at the origin.
pub fn expanded_griewank_rosenbrock(z: &[f64]) -> f64 {
    let d = z.len();
    (0..d)
        .map(|j| griewank1(rosenbrock2(z[j] + 1.0, z[(j + 1) % d] + 1.0)))
        .sum()
}
