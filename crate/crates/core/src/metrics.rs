//! Found-peak counting and the peak-ratio score.

use crate::controller::PopulationSnapshot;
use crate::error::{DmmopError, Result};
use crate::model::{squared_distance, Optimum, SolutionVector};

/// Fitness and distance tolerances for counting an optimum as found.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccuracyLevel {
    pub eps_f: f64,
    pub eps_d: f64,
}

impl AccuracyLevel {
    pub const EPS_D: f64 = 0.05;

    pub fn new(eps_f: f64) -> Self {
        AccuracyLevel {
            eps_f,
            eps_d: Self::EPS_D,
        }
    }

    /// The three official levels: 1e-3, 1e-4, 1e-5.
    pub fn standard() -> [AccuracyLevel; 3] {
        [Self::new(1e-3), Self::new(1e-4), Self::new(1e-5)]
    }
}

/// Number of distinct optima found by a population.
///
/// Each individual is matched to its nearest optimum only (ties go to the
/// lowest index); that optimum counts as found when both the fitness gap is
/// below `eps_f` and the distance is below `eps_d`.
pub fn count_npf_raw(
    individuals: &[SolutionVector],
    fitness: &[f64],
    optima: &[Optimum],
    level: AccuracyLevel,
) -> usize {
    if optima.is_empty() {
        return 0;
    }
    let mut found = vec![false; optima.len()];
    for (x, fx) in individuals.iter().zip(fitness) {
        let mut nearest = 0;
        let mut best = f64::INFINITY;
        for (k, o) in optima.iter().enumerate() {
            let d2 = squared_distance(x, &o.position);
            if d2 < best {
                best = d2;
                nearest = k;
            }
        }
        let o = &optima[nearest];
        if (fx - o.fitness).abs() < level.eps_f && best.sqrt() < level.eps_d {
            found[nearest] = true;
        }
    }
    found.into_iter().filter(|&f| f).count()
}

pub fn count_npf(snapshot: &PopulationSnapshot, optima: &[Optimum], level: AccuracyLevel) -> usize {
    count_npf_raw(&snapshot.individuals, &snapshot.fitness, optima, level)
}

/// Found and total peak counts, indexed `[run][environment]`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunRecord {
    pub npf: Vec<Vec<usize>>,
    pub peaks: Vec<Vec<usize>>,
}

impl RunRecord {
    pub fn new() -> Self {
        RunRecord::default()
    }

    pub fn push_run(&mut self, npf: Vec<usize>, peaks: Vec<usize>) {
        self.npf.push(npf);
        self.peaks.push(peaks);
    }

    pub fn runs(&self) -> usize {
        self.npf.len()
    }

    fn validate(&self) -> Result<()> {
        if self.npf.is_empty() || self.npf.len() != self.peaks.len() {
            return Err(DmmopError::Metric("record has no runs or ragged tables".into()));
        }
        for (n_row, p_row) in self.npf.iter().zip(&self.peaks) {
            if n_row.is_empty() || n_row.len() != p_row.len() {
                return Err(DmmopError::Metric("run rows differ in length".into()));
            }
            for (n, p) in n_row.iter().zip(p_row) {
                if *p == 0 {
                    return Err(DmmopError::Metric("an environment has zero peaks".into()));
                }
                if n > p {
                    return Err(DmmopError::Metric(format!("found {n} of only {p} peaks")));
                }
            }
        }
        Ok(())
    }
}

/// Found peaks over total peaks, summed across every run and environment.
pub fn peak_ratio(record: &RunRecord) -> Result<f64> {
    record.validate()?;
    let found: usize = record.npf.iter().flatten().sum();
    let total: usize = record.peaks.iter().flatten().sum();
    Ok(found as f64 / total as f64)
}

/// `(best, worst)` per-run peak ratio.
pub fn best_worst(record: &RunRecord) -> Result<(f64, f64)> {
    record.validate()?;
    let ratios = record.npf.iter().zip(&record.peaks).map(|(n, p)| {
        n.iter().sum::<usize>() as f64 / p.iter().sum::<usize>() as f64
    });
    Ok(ratios.fold((f64::NEG_INFINITY, f64::INFINITY), |(b, w), r| (b.max(r), w.min(r))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn opt(x: &[f64], f: f64) -> Optimum {
        Optimum {
            position: x.into(),
            fitness: f,
        }
    }

    fn f2_optima() -> Vec<Optimum> {
        [-3.0, -2.0, 2.0, 3.0].iter().map(|&c| opt(&[c; 5], 75.0)).collect()
    }

    #[test]
    fn exact_optima_are_all_found() {
        let optima = f2_optima();
        let inds: Vec<SolutionVector> = optima.iter().map(|o| o.position.clone()).collect();
        let fit = vec![75.0; 4];
        for level in AccuracyLevel::standard() {
            assert_eq!(count_npf_raw(&inds, &fit, &optima, level), 4);
        }
    }

    #[test]
    fn duplicates_count_once() {
        let optima = f2_optima();
        let mut a = vec![-3.0; 5];
        a[0] += 0.01;
        let mut b = vec![-3.0; 5];
        b[1] -= 0.01;
        let n = count_npf_raw(&[a.into(), b.into()], &[75.0, 75.0], &optima, AccuracyLevel::new(1e-3));
        assert_eq!(n, 1);
    }

    #[test]
    fn just_outside_distance_threshold() {
        let optima = f2_optima();
        let mut a = vec![-3.0; 5];
        a[0] += 0.06;
        assert_eq!(count_npf_raw(&[a.into()], &[75.0], &optima, AccuracyLevel::new(1e-3)), 0);
    }

    #[test]
    fn fitness_gap_threshold_is_strict() {
        let optima = vec![opt(&[0.0, 0.0], 0.0)];
        let x: SolutionVector = vec![0.0, 0.0].into();
        assert_eq!(count_npf_raw(std::slice::from_ref(&x), &[-0.5e-3], &optima, AccuracyLevel::new(1e-3)), 1);
        assert_eq!(count_npf_raw(&[x], &[-2e-3], &optima, AccuracyLevel::new(1e-3)), 0);
    }

    #[test]
    fn only_the_nearest_optimum_is_considered() {
        // the individual is nearest to optimum 0 but only matches optimum 1's fitness
        let optima = vec![opt(&[0.0], 10.0), opt(&[0.08], 0.0)];
        let n = count_npf_raw(&[vec![0.03].into()], &[0.0], &optima, AccuracyLevel::new(1e-3));
        assert_eq!(n, 0);
    }

    #[test]
    fn equidistant_tie_goes_to_lowest_index() {
        let optima = vec![opt(&[-0.01], 1.0), opt(&[0.01], 0.0)];
        // fitness matches optimum 1, but the tie picks optimum 0
        assert_eq!(count_npf_raw(&[vec![0.0].into()], &[0.0], &optima, AccuracyLevel::new(1e-3)), 0);
        assert_eq!(count_npf_raw(&[vec![0.0].into()], &[1.0], &optima, AccuracyLevel::new(1e-3)), 1);
    }

    #[test]
    fn empty_inputs() {
        assert_eq!(count_npf_raw(&[], &[], &f2_optima(), AccuracyLevel::new(1e-3)), 0);
        assert_eq!(count_npf_raw(&[vec![0.0; 5].into()], &[0.0], &[], AccuracyLevel::new(1e-3)), 0);
    }

    #[test]
    fn ratio_examples() {
        let full = RunRecord {
            npf: vec![vec![4; 60]; 30],
            peaks: vec![vec![4; 60]; 30],
        };
        assert_eq!(peak_ratio(&full).unwrap(), 1.0);
        let null = RunRecord {
            npf: vec![vec![0; 60]; 30],
            peaks: vec![vec![4; 60]; 30],
        };
        assert_eq!(peak_ratio(&null).unwrap(), 0.0);
        let half = RunRecord {
            npf: vec![vec![2; 60]; 30],
            peaks: vec![vec![4; 60]; 30],
        };
        assert_eq!(peak_ratio(&half).unwrap(), 0.5);
        assert_eq!(best_worst(&half).unwrap(), (0.5, 0.5));
    }

    #[test]
    fn one_perfect_run_among_null_runs() {
        let mut r = RunRecord::new();
        r.push_run(vec![4; 60], vec![4; 60]);
        for _ in 0..29 {
            r.push_run(vec![0; 60], vec![4; 60]);
        }
        assert_eq!(best_worst(&r).unwrap(), (1.0, 0.0));
    }

    #[test]
    fn contract_violations() {
        assert!(peak_ratio(&RunRecord::new()).is_err());
        let zero = RunRecord {
            npf: vec![vec![0]],
            peaks: vec![vec![0]],
        };
        assert!(peak_ratio(&zero).is_err());
        let over = RunRecord {
            npf: vec![vec![5]],
            peaks: vec![vec![4]],
        };
        assert!(best_worst(&over).is_err());
    }

    fn record_strategy() -> impl Strategy<Value = RunRecord> {
        (1usize..8, 1usize..12).prop_flat_map(|(runs, envs)| {
            prop::collection::vec(prop::collection::vec((1usize..9, 0.0f64..=1.0), envs), runs).prop_map(|rows| {
                let mut r = RunRecord::new();
                for row in rows {
                    let peaks: Vec<usize> = row.iter().map(|(p, _)| *p).collect();
                    let npf = row.iter().map(|(p, u)| ((*p as f64) * u).floor() as usize).collect();
                    r.push_run(npf, peaks);
                }
                r
            })
        })
    }

    proptest! {
        #[test]
        fn best_and_worst_bracket_the_ratio(record in record_strategy()) {
            let pr = peak_ratio(&record).unwrap();
            let (best, worst) = best_worst(&record).unwrap();
            prop_assert!(worst <= pr + 1e-15 && pr <= best + 1e-15);
            prop_assert!((0.0..=1.0).contains(&pr));
        }

        #[test]
        fn tighter_fitness_tolerance_never_finds_more(
            pts in prop::collection::vec((prop::collection::vec(-1.0f64..1.0, 3), -2e-3f64..2e-3), 0..30),
            opts in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 3), 1..6),
        ) {
            let optima: Vec<Optimum> = opts.iter().map(|o| opt(o, 0.0)).collect();
            let inds: Vec<SolutionVector> = pts.iter().map(|(x, _)| x.clone().into()).collect();
            let fit: Vec<f64> = pts.iter().map(|(_, f)| *f).collect();
            let level = |e| AccuracyLevel { eps_f: e, eps_d: 0.5 };
            let a = count_npf_raw(&inds, &fit, &optima, level(1e-3));
            let b = count_npf_raw(&inds, &fit, &optima, level(1e-4));
            let c = count_npf_raw(&inds, &fit, &optima, level(1e-5));
            prop_assert!(a >= b && b >= c);
        }

        #[test]
        fn shuffling_individuals_is_irrelevant(
            pts in prop::collection::vec((prop::collection::vec(-1.0f64..1.0, 2), -1e-3f64..1e-3), 1..20),
            opts in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 2), 1..5),
            seed in 0u64..1000,
        ) {
            let optima: Vec<Optimum> = opts.iter().map(|o| opt(o, 0.0)).collect();
            let inds: Vec<SolutionVector> = pts.iter().map(|(x, _)| x.clone().into()).collect();
            let fit: Vec<f64> = pts.iter().map(|(_, f)| *f).collect();
            let level = AccuracyLevel { eps_f: 5e-4, eps_d: 0.3 };
            let base = count_npf_raw(&inds, &fit, &optima, level);
            let order = crate::rng::make_rng(seed).shuffled_indices(inds.len());
            let inds2: Vec<SolutionVector> = order.iter().map(|&i| inds[i].clone()).collect();
            let fit2: Vec<f64> = order.iter().map(|&i| fit[i]).collect();
            prop_assert_eq!(base, count_npf_raw(&inds2, &fit2, &optima, level));
        }
    }
}
