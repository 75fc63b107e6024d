//! Bottleneck (∞-Wasserstein) transport between discrete probability
//! measures, plus W₁/W₂ for comparison.
//!
//! The bottleneck value is always attained at an entry of the distance
//! matrix, so the solver searches the sorted distinct candidate distances
//! and decides each candidate with an exact rational max-flow.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::{ArcId, FlowNetwork};
use crate::measure::DiscreteMeasure;
use crate::rational::RationalWeight;

/// Default cap on `|supp μ|·|supp ν|` for [`w_infinity_bruteforce`].
pub const BRUTEFORCE_PAIR_LIMIT: usize = 36;
/// Largest support size (per side) handled by vertex enumeration in [`w_p`].
pub const VERTEX_ENUMERATION_LIMIT: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlanEntry {
    pub source: usize,
    pub target: usize,
    pub mass: RationalWeight,
}

/// A coupling of `mu` and `nu` stored as its positive-mass entries.
#[derive(Debug, Clone)]
pub struct TransportPlan {
    pub mu: DiscreteMeasure,
    pub nu: DiscreteMeasure,
    pub entries: Vec<PlanEntry>,
}

impl TransportPlan {
    /// Checks positivity and both marginals exactly.
    pub fn validate(&self) -> Result<()> {
        self.mu.check_space(&self.nu)?;
        let mut rows: HashMap<usize, RationalWeight> = HashMap::new();
        let mut cols: HashMap<usize, RationalWeight> = HashMap::new();
        for e in &self.entries {
            if !e.mass.is_positive() {
                return Err(Error::Invalid(format!(
                    "non-positive plan entry {} -> {}",
                    e.source, e.target
                )));
            }
            *rows.entry(e.source).or_default() += &e.mass;
            *cols.entry(e.target).or_default() += &e.mass;
        }
        let marginal_ok = |m: &DiscreteMeasure, sums: &HashMap<usize, RationalWeight>| {
            sums.len() == m.len() && m.weights().iter().all(|(a, w)| sums.get(a) == Some(w))
        };
        if !marginal_ok(&self.mu, &rows) {
            return Err(Error::Invalid("plan rows do not sum to the source measure".into()));
        }
        if !marginal_ok(&self.nu, &cols) {
            return Err(Error::Invalid("plan columns do not sum to the target measure".into()));
        }
        Ok(())
    }

    /// `C_p(γ) = Σ d(i,j)^p γ_ij`, compensated.
    pub fn cost(&self, p: u32) -> f64 {
        let space = self.mu.space();
        kahan_sum(
            self.entries
                .iter()
                .map(|e| space.d(e.source, e.target).powi(p as i32) * e.mass.to_f64()),
        )
    }
}

/// Max distance over the plan's support.
pub fn bottleneck_of_plan(plan: &TransportPlan) -> f64 {
    let space = plan.mu.space();
    plan.entries
        .iter()
        .map(|e| space.d(e.source, e.target))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub value: f64,
    pub plan: TransportPlan,
    pub thresholds_tested: usize,
    pub feasibility_calls: usize,
}

fn kahan_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for t in terms {
        let y = t - c;
        let s = sum + y;
        c = (s - sum) - y;
        sum = s;
    }
    sum
}

fn check_pair(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<()> {
    mu.check_space(nu)?;
    mu.ensure_probability()?;
    nu.ensure_probability()
}

/// Runs the threshold max-flow. Returns the plan when all mass can be moved.
fn plan_at_threshold(mu: &DiscreteMeasure, nu: &DiscreteMeasure, t: f64) -> Option<TransportPlan> {
    let space = mu.space();
    let src = mu.support();
    let dst = nu.support();
    let (s, sink) = (0, 1 + src.len() + dst.len());
    let mut g = FlowNetwork::new(sink + 1);
    for (k, a) in src.iter().enumerate() {
        g.add_arc(s, 1 + k, mu.weight(*a));
    }
    for (k, b) in dst.iter().enumerate() {
        g.add_arc(1 + src.len() + k, sink, nu.weight(*b));
    }
    let mut middle: Vec<(usize, usize, ArcId)> = Vec::new();
    for (i, a) in src.iter().enumerate() {
        for (j, b) in dst.iter().enumerate() {
            if space.d(*a, *b) <= t {
                let cap = mu.weight(*a).min(nu.weight(*b));
                middle.push((*a, *b, g.add_arc(1 + i, 1 + src.len() + j, cap)));
            }
        }
    }
    let value = g.max_flow(s, sink);
    if &value != mu.total_mass() {
        return None;
    }
    let entries = middle
        .into_iter()
        .filter_map(|(a, b, arc)| {
            let m = g.flow(arc);
            m.is_positive().then_some(PlanEntry {
                source: a,
                target: b,
                mass: m,
            })
        })
        .collect();
    Some(TransportPlan {
        mu: mu.clone(),
        nu: nu.clone(),
        entries,
    })
}

/// Whether some coupling uses only pairs at distance `≤ t`.
pub fn feasible_at_threshold(mu: &DiscreteMeasure, nu: &DiscreteMeasure, t: f64) -> Result<bool> {
    check_pair(mu, nu)?;
    Ok(plan_at_threshold(mu, nu, t).is_some())
}

/// Candidate bottleneck values: `{0} ∪ {d(i,j) : i ∈ supp μ, j ∈ supp ν}`, sorted and deduplicated.
pub fn candidate_thresholds(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Vec<f64> {
    let space = mu.space();
    let mut c = vec![0.0];
    for a in mu.weights().keys() {
        for b in nu.weights().keys() {
            c.push(space.d(*a, *b));
        }
    }
    c.sort_by(f64::total_cmp);
    c.dedup();
    c
}

/// Exact `Δ∞(μ,ν)` with an optimal plan.
pub fn w_infinity(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<SolveReport> {
    check_pair(mu, nu)?;
    let cands = candidate_thresholds(mu, nu);
    let mut calls = 0;
    // the largest candidate admits every pair, so it is always feasible
    let (mut lo, mut hi) = (0usize, cands.len() - 1);
    let mut best: Option<TransportPlan> = None;
    while lo < hi {
        let mid = (lo + hi) / 2;
        calls += 1;
        match plan_at_threshold(mu, nu, cands[mid]) {
            Some(plan) => {
                hi = mid;
                best = Some(plan);
            }
            None => lo = mid + 1,
        }
    }
    let plan = match best {
        Some(p) if bottleneck_of_plan(&p) <= cands[lo] => p,
        _ => {
            calls += 1;
            plan_at_threshold(mu, nu, cands[lo]).expect("upper end of the search is feasible")
        }
    };
    let value = bottleneck_of_plan(&plan);
    debug_assert_eq!(value, cands[lo]);
    Ok(SolveReport {
        value,
        plan,
        thresholds_tested: cands.len(),
        feasibility_calls: calls,
    })
}

/// Subset-condition oracle: the smallest candidate `t` with
/// `μ(S) ≤ ν(N_t(S))` for every `S ⊆ supp μ`. Independent of the flow code.
pub fn w_infinity_bruteforce(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<f64> {
    w_infinity_bruteforce_with_limit(mu, nu, BRUTEFORCE_PAIR_LIMIT)
}

pub fn w_infinity_bruteforce_with_limit(mu: &DiscreteMeasure, nu: &DiscreteMeasure, max_pairs: usize) -> Result<f64> {
    check_pair(mu, nu)?;
    let src = mu.support();
    let dst = nu.support();
    if src.len() * dst.len() > max_pairs || src.len() >= 24 || dst.len() >= 64 {
        return Err(Error::TooLarge(format!(
            "{}x{} supports exceed the exhaustive limit of {max_pairs} pairs",
            src.len(),
            dst.len()
        )));
    }
    let space = mu.space();
    let mut cands: Vec<f64> = vec![0.0];
    cands.extend(src.iter().flat_map(|a| dst.iter().map(move |b| space.d(*a, *b))));
    cands.sort_by(f64::total_cmp);
    cands.dedup();

    let src_w: Vec<RationalWeight> = src.iter().map(|a| mu.weight(*a)).collect();
    let dst_w: Vec<RationalWeight> = dst.iter().map(|b| nu.weight(*b)).collect();
    for &t in &cands {
        let reach: Vec<u64> = src
            .iter()
            .map(|a| {
                dst.iter()
                    .enumerate()
                    .filter(|(_, b)| space.d(*a, **b) <= t)
                    .fold(0u64, |m, (j, _)| m | (1 << j))
            })
            .collect();
        let hall = (1u32..(1 << src.len())).all(|s| {
            let mut mass = RationalWeight::zero();
            let mut nbhd = 0u64;
            for (i, w) in src_w.iter().enumerate() {
                if s & (1 << i) != 0 {
                    mass += w;
                    nbhd |= reach[i];
                }
            }
            let cover: RationalWeight = dst_w
                .iter()
                .enumerate()
                .filter(|(j, _)| nbhd & (1 << j) != 0)
                .map(|(_, w)| w)
                .sum();
            mass <= cover
        });
        if hall {
            return Ok(t);
        }
    }
    unreachable!("the largest candidate admits every pair")
}

/// `W_p(μ,ν)` for `p ∈ {1, 2}`.
///
/// Supports up to 6 atoms per side go through exhaustive vertex enumeration
/// of the transport polytope; larger ones through min-cost flow.
pub fn w_p(mu: &DiscreteMeasure, nu: &DiscreteMeasure, p: u32) -> Result<f64> {
    if mu.len() <= VERTEX_ENUMERATION_LIMIT && nu.len() <= VERTEX_ENUMERATION_LIMIT {
        w_p_vertex_enumeration(mu, nu, p)
    } else {
        w_p_min_cost_flow(mu, nu, p).map(|(v, _)| v)
    }
}

fn check_p(p: u32) -> Result<()> {
    if p == 1 || p == 2 {
        Ok(())
    } else {
        Err(Error::UnsupportedP(p))
    }
}

fn finish_p(cost: f64, p: u32) -> f64 {
    if p == 1 {
        cost
    } else {
        cost.max(0.0).sqrt()
    }
}

/// W_p through min-cost flow; also returns an optimal plan.
pub fn w_p_min_cost_flow(mu: &DiscreteMeasure, nu: &DiscreteMeasure, p: u32) -> Result<(f64, TransportPlan)> {
    check_p(p)?;
    check_pair(mu, nu)?;
    let space = mu.space();
    let src = mu.support();
    let dst = nu.support();
    let (s, sink) = (0, 1 + src.len() + dst.len());
    let mut g = FlowNetwork::new(sink + 1);
    for (k, a) in src.iter().enumerate() {
        g.add_arc(s, 1 + k, mu.weight(*a));
    }
    for (k, b) in dst.iter().enumerate() {
        g.add_arc(1 + src.len() + k, sink, nu.weight(*b));
    }
    let mut middle = Vec::new();
    for (i, a) in src.iter().enumerate() {
        for (j, b) in dst.iter().enumerate() {
            let cap = mu.weight(*a).min(nu.weight(*b));
            let cost = space.d(*a, *b).powi(p as i32);
            middle.push((*a, *b, g.add_arc_with_cost(1 + i, 1 + src.len() + j, cap, cost)));
        }
    }
    let sent = g.min_cost_flow(s, sink, None);
    debug_assert_eq!(&sent, mu.total_mass());
    let entries = middle
        .into_iter()
        .filter_map(|(a, b, arc)| {
            let m = g.flow(arc);
            m.is_positive().then_some(PlanEntry {
                source: a,
                target: b,
                mass: m,
            })
        })
        .collect();
    let plan = TransportPlan {
        mu: mu.clone(),
        nu: nu.clone(),
        entries,
    };
    Ok((finish_p(plan.cost(p), p), plan))
}

/// W_p by exhaustive enumeration of the vertices of the transport polytope.
///
/// Every vertex has a forest as support, so it can be peeled leaf by leaf:
/// some cell carries `min(row residual, column residual)` and saturates its
/// row or column. Minimizing over all peel sequences therefore visits every
/// vertex; states are memoized on the residual problem.
pub fn w_p_vertex_enumeration(mu: &DiscreteMeasure, nu: &DiscreteMeasure, p: u32) -> Result<f64> {
    check_p(p)?;
    check_pair(mu, nu)?;
    let src = mu.support();
    let dst = nu.support();
    if src.len() > VERTEX_ENUMERATION_LIMIT || dst.len() > VERTEX_ENUMERATION_LIMIT {
        return Err(Error::TooLarge(format!(
            "{}x{} supports exceed the vertex enumeration limit",
            src.len(),
            dst.len()
        )));
    }
    let space = mu.space();
    let cost: Vec<Vec<f64>> = src
        .iter()
        .map(|a| dst.iter().map(|b| space.d(*a, *b).powi(p as i32)).collect())
        .collect();
    let rows: Vec<RationalWeight> = src.iter().map(|a| mu.weight(*a)).collect();
    let cols: Vec<RationalWeight> = dst.iter().map(|b| nu.weight(*b)).collect();
    let mut memo = HashMap::new();
    let best = peel(&cost, rows, cols, &mut memo);
    Ok(finish_p(best, p))
}

type PeelKey = (Vec<RationalWeight>, Vec<RationalWeight>);

fn peel(
    cost: &[Vec<f64>],
    rows: Vec<RationalWeight>,
    cols: Vec<RationalWeight>,
    memo: &mut HashMap<PeelKey, f64>,
) -> f64 {
    let live_rows: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].is_positive()).collect();
    if live_rows.is_empty() {
        return 0.0;
    }
    let key = (rows, cols);
    if let Some(v) = memo.get(&key) {
        return *v;
    }
    let (rows, cols) = &key;
    let mut best = f64::INFINITY;
    for &i in &live_rows {
        for j in (0..cols.len()).filter(|&j| cols[j].is_positive()) {
            let m = rows[i].clone().min(cols[j].clone());
            let mut r2 = rows.clone();
            let mut c2 = cols.clone();
            r2[i] -= &m;
            c2[j] -= &m;
            let v = cost[i][j] * m.to_f64() + peel(cost, r2, c2, memo);
            if v < best {
                best = v;
            }
        }
    }
    memo.insert(key, best);
    best
}
