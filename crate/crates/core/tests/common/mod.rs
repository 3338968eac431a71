//! Shared oracles and case generators for the integration suites.
#![allow(dead_code)]

use std::collections::BTreeSet;

use dmmop::metrics::AccuracyLevel;
use dmmop::rng::RngStream;
use dmmop::{Optimum, SolutionVector};

/// A synthetic scoring case.
pub struct NpfCase {
    pub individuals: Vec<SolutionVector>,
    pub fitness: Vec<f64>,
    pub optima: Vec<Optimum>,
    pub level: AccuracyLevel,
}

/// Brute force: full distance table, nearest optimum by `(distance, index)`
/// order, both thresholds strict, distinct matches collected in a set.
pub fn npf_oracle(case: &NpfCase) -> usize {
    let table: Vec<Vec<f64>> = case
        .individuals
        .iter()
        .map(|x| {
            case.optima
                .iter()
                .map(|o| x.iter().zip(o.position.iter()).map(|(a, b)| (a - b) * (a - b)).sum())
                .collect()
        })
        .collect();
    let mut found = BTreeSet::new();
    for (i, row) in table.iter().enumerate() {
        let mut order: Vec<usize> = (0..row.len()).collect();
        order.sort_by(|&a, &b| row[a].total_cmp(&row[b]).then(a.cmp(&b)));
        let Some(&k) = order.first() else { continue };
        let gap = (case.fitness[i] - case.optima[k].fitness).abs();
        if gap < case.level.eps_f && row[k].sqrt() < case.level.eps_d {
            found.insert(k);
        }
    }
    found.len()
}

/// Random case mixing exact hits, near misses on both thresholds,
/// duplicated individuals and uniform noise.
pub fn npf_case(rng: &mut RngStream) -> NpfCase {
    let dim = rng.uniform_int(1, 5);
    let eps_f = [1e-3, 1e-4, 1e-5][rng.uniform_int(0, 2)];
    let level = AccuracyLevel::new(eps_f);
    let k = rng.uniform_int(0, 8);
    let optima: Vec<Optimum> = (0..k)
        .map(|_| Optimum {
            position: rng.uniform_point(dim, -5.0, 5.0).into(),
            fitness: if rng.unit() < 0.5 { 0.0 } else { rng.uniform(-100.0, 100.0) },
        })
        .collect();
    let n = rng.uniform_int(0, 30);
    let mut individuals: Vec<SolutionVector> = Vec::with_capacity(n);
    let mut fitness = Vec::with_capacity(n);
    for _ in 0..n {
        if !individuals.is_empty() && rng.unit() < 0.15 {
            let j = rng.uniform_int(0, individuals.len() - 1);
            individuals.push(individuals[j].clone());
            fitness.push(fitness[j]);
            continue;
        }
        if optima.is_empty() || rng.unit() < 0.2 {
            individuals.push(rng.uniform_point(dim, -5.0, 5.0).into());
            fitness.push(rng.uniform(-100.0, 100.0));
            continue;
        }
        let o = &optima[rng.uniform_int(0, optima.len() - 1)];
        let mut x = o.position.clone();
        let axis = rng.uniform_int(0, dim - 1);
        let offset = match rng.uniform_int(0, 4) {
            0 => 0.0,
            1 => level.eps_d,
            2 => level.eps_d * 0.999,
            3 => level.eps_d * 1.001,
            _ => rng.uniform(0.0, 0.2),
        };
        x.as_mut_slice()[axis] += if rng.unit() < 0.5 { offset } else { -offset };
        let gap = match rng.uniform_int(0, 3) {
            0 => 0.0,
            1 => eps_f,
            2 => eps_f * 0.999,
            _ => eps_f * 1.001,
        };
        individuals.push(x);
        fitness.push(o.fitness + if rng.unit() < 0.5 { gap } else { -gap });
    }
    NpfCase {
        individuals,
        fitness,
        optima,
        level,
    }
}

/// Random `(npf, peaks)` tables with `npf <= peaks` everywhere.
pub fn random_record(rng: &mut RngStream) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let runs = rng.uniform_int(1, 30);
    let envs = rng.uniform_int(1, 60);
    let mut npf = Vec::new();
    let mut peaks = Vec::new();
    for _ in 0..runs {
        let p: Vec<usize> = (0..envs).map(|_| rng.uniform_int(1, 8)).collect();
        npf.push(p.iter().map(|&q| rng.uniform_int(0, q)).collect());
        peaks.push(p);
    }
    (npf, peaks)
}
