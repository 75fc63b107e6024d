//! Finite-prefix diagnostics for convergence in the bottleneck metric.
//!
//! A sequence `μ_n → μ` converges in `Δ` exactly when it converges weakly
//! and, for every separating set `A` of the limit, the mass near `A`
//! eventually equals `μ(A)`. On a finite support every subset is separating,
//! so both conditions can be evaluated on the observed prefix and compared
//! with the directly computed `Δ(μ_n, μ)`.
//!
//! Verdicts are evidence from finitely many terms, never proofs. A
//! `NotDConvergent` verdict always carries the concrete witness behind it.

use std::fmt::Write as _;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::DiscreteMeasure;
use crate::rational::RationalWeight;
use crate::space::{hausdorff, FiniteMetricSpace};
use crate::transport::{w_infinity, w_p};

pub const MAX_SEPARATING_SUPPORT: usize = 12;
pub const DEFAULT_TREND_THRESHOLD: f64 = 1e-6;
/// Number of consecutive strict decreases accepted as a trend to zero.
pub const TREND_RUN: usize = 3;

#[derive(Debug, Clone)]
pub struct MeasureSequence {
    space: Arc<FiniteMetricSpace>,
    terms: Vec<DiscreteMeasure>,
    limit: DiscreteMeasure,
}

impl MeasureSequence {
    pub fn new(terms: Vec<DiscreteMeasure>, limit: DiscreteMeasure) -> Result<Self> {
        limit.ensure_probability()?;
        for t in &terms {
            t.check_space(&limit)?;
            t.ensure_probability()?;
        }
        Ok(MeasureSequence {
            space: limit.space().clone(),
            terms,
            limit,
        })
    }

    pub fn space(&self) -> &Arc<FiniteMetricSpace> {
        &self.space
    }

    pub fn terms(&self) -> &[DiscreteMeasure] {
        &self.terms
    }

    pub fn limit(&self) -> &DiscreteMeasure {
        &self.limit
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparatingSet {
    pub atoms: Vec<usize>,
    /// Distance from the set to the rest of the support (the space diameter
    /// when the set is the whole support).
    pub clearance: f64,
}

/// All nonempty subsets of `supp μ`, by size then lexicographically.
pub fn separating_subsets(mu: &DiscreteMeasure) -> Result<Vec<SeparatingSet>> {
    let supp = mu.support();
    if supp.len() > MAX_SEPARATING_SUPPORT {
        return Err(Error::SupportTooLarge(supp.len()));
    }
    let space = mu.space();
    let supp = &supp;
    let k = supp.len();
    let mut masks: Vec<u32> = (1u32..(1 << k)).collect();
    masks.sort_by(|a, b| {
        a.count_ones().cmp(&b.count_ones()).then_with(|| {
            let la: Vec<u32> = (0..k as u32).filter(|i| a & (1 << i) != 0).collect();
            let lb: Vec<u32> = (0..k as u32).filter(|i| b & (1 << i) != 0).collect();
            la.cmp(&lb)
        })
    });
    Ok(masks
        .into_iter()
        .map(|m| {
            let (inside, outside): (Vec<usize>, Vec<usize>) = (0..k).partition(|i| m & (1 << i) != 0);
            let atoms: Vec<usize> = inside.iter().map(|&i| supp[i]).collect();
            let clearance = if outside.is_empty() {
                space.diameter()
            } else {
                atoms
                    .iter()
                    .flat_map(|&a| outside.iter().map(move |&j| (a, supp[j])))
                    .map(|(a, b)| space.d(a, b))
                    .fold(f64::INFINITY, f64::min)
            };
            SeparatingSet { atoms, clearance }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum MassCheck {
    /// `μ_n(N_ε(A)) = μ(A)` for every `n ≥ n0` in the prefix.
    Stabilized { n0: usize },
    /// The final term still disagrees; `last_violation` is the last index
    /// where the masses differ.
    Failed {
        last_violation: usize,
        observed: RationalWeight,
        expected: RationalWeight,
    },
}

/// Compares `μ_n(N_ε(A))` against `μ(A)` along the prefix.
pub fn separating_mass_check(seq: &MeasureSequence, set: &SeparatingSet, eps: f64) -> Result<MassCheck> {
    if !(eps > 0.0 && eps < set.clearance) {
        return Err(Error::EpsilonTooLarge {
            eps,
            clearance: set.clearance,
        });
    }
    let nbhd = seq.space.neighborhood(&set.atoms, eps, false);
    let expected = seq.limit.mass_of(&set.atoms);
    let mut last_bad: Option<(usize, RationalWeight)> = None;
    for (n, term) in seq.terms.iter().enumerate() {
        let observed = term.mass_of(&nbhd);
        if observed != expected {
            last_bad = Some((n, observed));
        }
    }
    let len = seq.terms.len();
    Ok(match last_bad {
        None => MassCheck::Stabilized { n0: 0 },
        Some((n, observed)) if n + 1 == len => MassCheck::Failed {
            last_violation: n,
            observed,
            expected,
        },
        Some((n, _)) => MassCheck::Stabilized { n0: n + 1 },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaSequence {
    pub delta: Vec<f64>,
    pub w1: Vec<f64>,
}

/// `Δ(μ_n, μ)` and `W₁(μ_n, μ)` for every term.
pub fn delta_sequence(seq: &MeasureSequence) -> Result<DeltaSequence> {
    let mut delta = Vec::with_capacity(seq.terms.len());
    let mut w1 = Vec::with_capacity(seq.terms.len());
    for t in &seq.terms {
        delta.push(w_infinity(t, &seq.limit)?.value);
        w1.push(w_p(t, &seq.limit, 1)?);
    }
    Ok(DeltaSequence { delta, w1 })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendCheck {
    pub passed: bool,
    /// First index from which every value is at most the threshold, if any.
    pub settled_from: Option<usize>,
    pub last: f64,
}

/// A sequence "tends to 0 on the prefix" when its last value is within the
/// threshold or its last [`TREND_RUN`] steps are strict decreases.
pub fn trend_to_zero(values: &[f64], threshold: f64) -> TrendCheck {
    let last = values.last().copied().unwrap_or(0.0);
    let settled_from = match values.iter().rposition(|v| *v > threshold) {
        None => Some(0),
        Some(i) if i + 1 < values.len() => Some(i + 1),
        Some(_) => None,
    };
    let decreasing = values.len() > TREND_RUN && values[values.len() - TREND_RUN - 1..].windows(2).all(|w| w[1] < w[0]);
    TrendCheck {
        passed: last <= threshold || decreasing,
        settled_from,
        last,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparatingResult {
    pub set: SeparatingSet,
    pub epsilon: f64,
    pub check: MassCheck,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    SeparatingSet {
        atoms: Vec<usize>,
        epsilon: f64,
        index: usize,
        observed: RationalWeight,
        expected: RationalWeight,
    },
    SupportHausdorff {
        index: usize,
        value: f64,
    },
    DeltaFloor {
        index: usize,
        value: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Overall {
    ConsistentWithDConvergence,
    NotDConvergent { witness: Witness },
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub terms: usize,
    pub w_proxy: TrendCheck,
    pub separating: Vec<SeparatingResult>,
    /// Index of the largest stabilization point over all separating sets, when all stabilize.
    pub separating_n0: Option<usize>,
    pub support_hausdorff: TrendCheck,
    pub direct_delta: TrendCheck,
    pub delta: Vec<f64>,
    pub w1: Vec<f64>,
    pub hausdorff: Vec<f64>,
    /// Weak convergence proxy together with the separating-set condition.
    pub characterization_holds: bool,
    /// Trend of the directly computed `Δ` sequence.
    pub direct_holds: bool,
    pub overall: Overall,
    pub finite_evidence: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct ConvergenceOptions {
    pub threshold: f64,
}

impl Default for ConvergenceOptions {
    fn default() -> Self {
        ConvergenceOptions {
            threshold: DEFAULT_TREND_THRESHOLD,
        }
    }
}

pub fn d_convergence_verdict(seq: &MeasureSequence) -> Result<ConvergenceReport> {
    d_convergence_verdict_with(seq, ConvergenceOptions::default())
}

pub fn d_convergence_verdict_with(seq: &MeasureSequence, opts: ConvergenceOptions) -> Result<ConvergenceReport> {
    if seq.terms.len() < 2 {
        return Err(Error::Invalid("need at least two terms".into()));
    }
    let DeltaSequence { delta, w1 } = delta_sequence(seq)?;
    let limit_support = seq.limit.support();
    let hausdorff_seq = seq
        .terms
        .iter()
        .map(|t| hausdorff(&seq.space, &t.support(), &limit_support))
        .collect::<Result<Vec<_>>>()?;

    let mut separating = Vec::new();
    for set in separating_subsets(&seq.limit)? {
        let epsilon = set.clearance / 2.0;
        let check = separating_mass_check(seq, &set, epsilon)?;
        separating.push(SeparatingResult { set, epsilon, check });
    }
    let first_failure = separating.iter().find(|r| matches!(r.check, MassCheck::Failed { .. }));
    let separating_n0 = match first_failure {
        Some(_) => None,
        None => separating
            .iter()
            .map(|r| match r.check {
                MassCheck::Stabilized { n0 } => n0,
                MassCheck::Failed { .. } => unreachable!(),
            })
            .max(),
    };

    let w_proxy = trend_to_zero(&w1, opts.threshold);
    let support_hausdorff = trend_to_zero(&hausdorff_seq, opts.threshold);
    let direct_delta = trend_to_zero(&delta, opts.threshold);
    let last = seq.terms.len() - 1;

    let overall = if let Some(r) = first_failure {
        let MassCheck::Failed {
            last_violation,
            observed,
            expected,
        } = &r.check
        else {
            unreachable!()
        };
        Overall::NotDConvergent {
            witness: Witness::SeparatingSet {
                atoms: r.set.atoms.clone(),
                epsilon: r.epsilon,
                index: *last_violation,
                observed: observed.clone(),
                expected: expected.clone(),
            },
        }
    } else if !support_hausdorff.passed {
        Overall::NotDConvergent {
            witness: Witness::SupportHausdorff {
                index: last,
                value: hausdorff_seq[last],
            },
        }
    } else if !direct_delta.passed {
        Overall::NotDConvergent {
            witness: Witness::DeltaFloor {
                index: last,
                value: delta[last],
            },
        }
    } else if w_proxy.passed {
        Overall::ConsistentWithDConvergence
    } else {
        Overall::Inconclusive
    };

    Ok(ConvergenceReport {
        terms: seq.terms.len(),
        characterization_holds: w_proxy.passed && first_failure.is_none(),
        direct_holds: direct_delta.passed,
        w_proxy,
        separating,
        separating_n0,
        support_hausdorff,
        direct_delta,
        delta,
        w1,
        hausdorff: hausdorff_seq,
        overall,
        finite_evidence: true,
    })
}

impl ConvergenceReport {
    /// Plain-text table of the per-term sequences followed by the verdict.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:>5}  {:>18}  {:>18}  {:>18}", "n", "delta", "w1", "hausdorff");
        for n in 0..self.terms {
            let _ = writeln!(
                out,
                "{:>5}  {:>18}  {:>18}  {:>18}",
                n,
                crate::fmt_distance(self.delta[n]),
                crate::fmt_distance(self.w1[n]),
                crate::fmt_distance(self.hausdorff[n])
            );
        }
        let _ = writeln!(out, "w-proxy: {}", pass(self.w_proxy.passed));
        match self.separating_n0 {
            Some(n0) => {
                let _ = writeln!(out, "separating sets: stabilized from n0 = {n0}");
            }
            None => {
                let _ = writeln!(out, "separating sets: failed");
            }
        }
        let _ = writeln!(out, "support hausdorff: {}", pass(self.support_hausdorff.passed));
        let _ = writeln!(out, "direct delta: {}", pass(self.direct_delta.passed));
        let verdict = match &self.overall {
            Overall::ConsistentWithDConvergence => "consistent with d-convergence (finite evidence)".to_string(),
            Overall::Inconclusive => "inconclusive (finite evidence)".to_string(),
            Overall::NotDConvergent { witness } => format!("not d-convergent, witness {}", describe(witness)),
        };
        let _ = writeln!(out, "verdict: {verdict}");
        out
    }
}

fn pass(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "fail"
    }
}

fn describe(w: &Witness) -> String {
    match w {
        Witness::SeparatingSet {
            atoms,
            epsilon,
            index,
            observed,
            expected,
        } => format!(
            "separating set {atoms:?} (eps {}) at n = {index}: mass {observed} != {expected}",
            crate::fmt_distance(*epsilon)
        ),
        Witness::SupportHausdorff { index, value } => {
            format!("support hausdorff {} at n = {index}", crate::fmt_distance(*value))
        }
        Witness::DeltaFloor { index, value } => format!("delta floor {} at n = {index}", crate::fmt_distance(*value)),
    }
}
