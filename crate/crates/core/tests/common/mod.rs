//! Random instance generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use dynmeasure::decomposition::DecompositionInstance;
use dynmeasure::{make_measure, DiscreteMeasure, FiniteMetricSpace, RationalWeight};
use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// `n` random points in the unit square.
pub fn random_space<R: Rng>(rng: &mut R, n: usize) -> Arc<FiniteMetricSpace> {
    loop {
        let coords: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()]).collect();
        if let Ok(s) = FiniteMetricSpace::euclidean(coords) {
            return Arc::new(s);
        }
    }
}

/// `n` points with small integer coordinates, so many distances repeat.
pub fn grid_space<R: Rng>(rng: &mut R, n: usize) -> Arc<FiniteMetricSpace> {
    loop {
        let coords: Vec<Vec<f64>> = (0..n)
            .map(|_| vec![rng.gen_range(0..4) as f64, rng.gen_range(0..4) as f64])
            .collect();
        if let Ok(s) = FiniteMetricSpace::euclidean(coords) {
            return Arc::new(s);
        }
    }
}

/// A probability measure on at most `max_atoms` random points, weights with
/// denominator `den`.
pub fn random_measure<R: Rng>(
    rng: &mut R,
    space: &Arc<FiniteMetricSpace>,
    max_atoms: usize,
    den: u32,
) -> DiscreteMeasure {
    let k = rng.gen_range(1..=max_atoms.min(space.len()).min(den as usize));
    let atoms = sample(rng, space.len(), k);
    let mut units = vec![1u32; k];
    for _ in k as u32..den {
        units[rng.gen_range(0..k)] += 1;
    }
    make_measure(
        space,
        atoms
            .iter()
            .zip(units)
            .map(|(a, u)| (a, RationalWeight::ratio(u as i64, den as i64))),
    )
    .unwrap()
}

/// Exact max flow by depth-first augmenting paths on a dense capacity matrix.
pub fn max_flow(mut cap: Vec<Vec<RationalWeight>>, s: usize, t: usize) -> RationalWeight {
    let n = cap.len();
    let mut total = RationalWeight::zero();
    loop {
        let mut prev = vec![usize::MAX; n];
        let mut stack = vec![s];
        prev[s] = s;
        while let Some(u) = stack.pop() {
            for v in 0..n {
                if prev[v] == usize::MAX && cap[u][v].is_positive() {
                    prev[v] = u;
                    stack.push(v);
                }
            }
        }
        if prev[t] == usize::MAX {
            return total;
        }
        let mut push = None::<RationalWeight>;
        let mut v = t;
        while v != s {
            let u = prev[v];
            let c = cap[u][v].clone();
            push = Some(match push {
                Some(p) if p < c => p,
                _ => c,
            });
            v = u;
        }
        let push = push.unwrap();
        let mut v = t;
        while v != s {
            let u = prev[v];
            cap[u][v] -= &push;
            cap[v][u] += &push;
            v = u;
        }
        total += push;
    }
}

/// ξ splits as required iff the atoms → sets network saturates every target.
pub fn flow_feasible(inst: &DecompositionInstance) -> bool {
    let atoms = inst.xi.support();
    let m = inst.sets.len();
    let n = 2 + atoms.len() + m;
    let (s, t) = (0, n - 1);
    let mut cap = vec![vec![RationalWeight::zero(); n]; n];
    for (k, &a) in atoms.iter().enumerate() {
        cap[s][1 + k] = inst.xi.weight(a);
        for (i, set) in inst.sets.iter().enumerate() {
            if set.contains(&a) {
                cap[1 + k][1 + atoms.len() + i] = inst.xi.weight(a);
            }
        }
    }
    for i in 0..m {
        cap[1 + atoms.len() + i][t] = inst.targets[i].clone();
    }
    let targets: RationalWeight = inst.targets.iter().sum();
    max_flow(cap, s, t) == targets && inst.xi.total_mass() == &targets
}

/// Feasible by construction: components are drawn first and summed.
pub fn feasible_instance(rng: &mut ChaCha8Rng) -> DecompositionInstance {
    let n = rng.gen_range(2..=10);
    let space = random_space(rng, n);
    let m = rng.gen_range(1..=5);
    let mut sets = Vec::new();
    let mut parts: Vec<DiscreteMeasure> = Vec::new();
    for _ in 0..m {
        let size = rng.gen_range(1..=n);
        let set: BTreeSet<usize> = rand::seq::index::sample(rng, n, size).into_iter().collect();
        let den = rng.gen_range(1..=12);
        let atoms: Vec<usize> = set.iter().copied().collect();
        let part = make_measure(
            &space,
            atoms
                .iter()
                .map(|&a| (a, RationalWeight::ratio(rng.gen_range(0..=3), den))),
        )
        .unwrap();
        sets.push(set);
        parts.push(part);
    }
    let mut xi = DiscreteMeasure::zero(&space);
    for p in &parts {
        xi = xi.plus(p).unwrap();
    }
    let targets = parts.iter().map(|p| p.total_mass().clone()).collect();
    DecompositionInstance::new(xi, sets, targets).unwrap()
}
