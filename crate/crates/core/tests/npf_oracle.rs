mod common;

use common::{npf_case, npf_oracle};
use dmmop::metrics::{count_npf_raw, AccuracyLevel};
use dmmop::rng::RngStream;
use dmmop::{Optimum, SolutionVector};

#[test]
fn matches_brute_force_on_random_cases() {
    let mut rng = RngStream::new(2024);
    let mut nonzero = 0;
    for i in 0..5000 {
        let c = npf_case(&mut rng);
        let n = count_npf_raw(&c.individuals, &c.fitness, &c.optima, c.level);
        assert_eq!(n, npf_oracle(&c), "case {i}");
        nonzero += usize::from(n > 0);
    }
    // the generator must actually exercise matches
    assert!(nonzero > 2000, "{nonzero}");
}

#[test]
fn nearest_optimum_only() {
    // the individual sits within eps_d of both optima but only the nearer
    // one is a candidate, and its fitness matches the farther one
    let optima = [
        Optimum { position: SolutionVector::new(vec![0.0, 0.0]), fitness: 10.0 },
        Optimum { position: SolutionVector::new(vec![0.06, 0.0]), fitness: 20.0 },
    ];
    let x = [SolutionVector::new(vec![0.02, 0.0])];
    assert_eq!(count_npf_raw(&x, &[20.0], &optima, AccuracyLevel::new(1e-3)), 0);
    assert_eq!(count_npf_raw(&x, &[10.0], &optima, AccuracyLevel::new(1e-3)), 1);
}

#[test]
fn equidistant_ties_go_to_the_first_optimum() {
    let optima = [
        Optimum { position: SolutionVector::new(vec![-0.01]), fitness: 1.0 },
        Optimum { position: SolutionVector::new(vec![0.01]), fitness: 2.0 },
    ];
    let x = [SolutionVector::new(vec![0.0])];
    assert_eq!(count_npf_raw(&x, &[1.0], &optima, AccuracyLevel::new(1e-3)), 1);
    assert_eq!(count_npf_raw(&x, &[2.0], &optima, AccuracyLevel::new(1e-3)), 0);
}
