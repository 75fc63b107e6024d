//! Constructive splitting of a measure `ξ` into components `ν_1..ν_m`, each
//! living on its set `B_i` with prescribed mass `x_i`.
//!
//! Given the covering conditions
//!
//! * `ξ(B_{i₁} ∪ … ∪ B_{i_k}) ≥ x_{i₁} + … + x_{i_k}` for every nonempty index set,
//! * `ξ(X) = x_1 + … + x_m`,
//!
//! [`decompose`] returns measures with `ν_i(B_iᶜ) = 0`, `ν_i(X) = x_i` and
//! `Σ ν_i = ξ`, following an induction on the pair `(m, ρ)` where `ρ` is the
//! arrangement (number of occupied intersection cells). Indices are 0-based.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::DiscreteMeasure;
use crate::rational::RationalWeight;

/// Limit for exhaustive subset checks.
pub const MAX_CHECK_SETS: usize = 14;
/// Limit for [`decompose`].
pub const MAX_DECOMPOSE_SETS: usize = 12;

#[derive(Debug, Clone)]
pub struct DecompositionInstance {
    /// Positive measure, not necessarily normalized.
    pub xi: DiscreteMeasure,
    pub sets: Vec<BTreeSet<usize>>,
    pub targets: Vec<RationalWeight>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CaseLabel {
    Base,
    Case1,
    Case2,
    #[serde(rename = "Case3.1")]
    Case3_1,
    #[serde(rename = "Case3.2")]
    Case3_2,
    #[serde(rename = "Case3.3")]
    Case3_3,
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CaseLabel::Base => "Base",
            CaseLabel::Case1 => "Case1",
            CaseLabel::Case2 => "Case2",
            CaseLabel::Case3_1 => "Case3.1",
            CaseLabel::Case3_2 => "Case3.2",
            CaseLabel::Case3_3 => "Case3.3",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub case: CaseLabel,
    pub depth: usize,
    pub m: usize,
    pub rho: usize,
}

#[derive(Debug, Clone)]
pub struct DecompositionResult {
    pub components: Vec<DiscreteMeasure>,
    pub trace: Vec<TraceStep>,
}

impl DecompositionResult {
    pub fn max_depth(&self) -> usize {
        self.trace.iter().map(|s| s.depth).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    Feasible,
    /// Union of the listed sets carries less mass than their targets.
    Deficient {
        subset: Vec<usize>,
        mass: RationalWeight,
        target: RationalWeight,
    },
    /// `ξ(X)` differs from the sum of all targets.
    TotalMismatch {
        total: RationalWeight,
        target: RationalWeight,
    },
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Arrangement {
    pub rho: usize,
    /// `per_k[k-1]` is the number of occupied cells lying in exactly `k` sets.
    pub per_k: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Condition {
    /// Component has mass outside its set.
    #[serde(rename = "outside_set")]
    OutsideSet,
    /// Component mass differs from its target.
    #[serde(rename = "wrong_total")]
    WrongTotal,
    /// Components do not sum to `ξ`.
    #[serde(rename = "wrong_sum")]
    WrongSum,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::OutsideSet => "outside_set",
            Condition::WrongTotal => "wrong_total",
            Condition::WrongSum => "wrong_sum",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    /// `index` is the component for the first two conditions and the atom for the sum.
    Violation {
        condition: Condition,
        index: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EpsilonZero {
    Bounded(RationalWeight),
    Unbounded,
}

/// Membership mask of every support atom of `ξ`.
fn atom_masks(xi: &DiscreteMeasure, sets: &[BTreeSet<usize>]) -> Vec<(u32, RationalWeight)> {
    xi.weights()
        .iter()
        .map(|(a, w)| {
            let mask = sets
                .iter()
                .enumerate()
                .filter(|(_, b)| b.contains(a))
                .fold(0u32, |m, (i, _)| m | (1 << i));
            (mask, w.clone())
        })
        .collect()
}

/// `ξ(∪_{i ∈ φ} B_i)`.
fn union_mass(masks: &[(u32, RationalWeight)], phi: u32) -> RationalWeight {
    masks.iter().filter(|(m, _)| m & phi != 0).map(|(_, w)| w).sum()
}

fn target_sum(targets: &[RationalWeight], phi: u32) -> RationalWeight {
    targets
        .iter()
        .enumerate()
        .filter(|(i, _)| phi & (1 << i) != 0)
        .map(|(_, x)| x)
        .sum()
}

fn indices(phi: u32) -> Vec<usize> {
    (0..32).filter(|i| phi & (1 << i) != 0).collect()
}

/// Index subsets of `{0..m}` with `1 ≤ |φ| ≤ max_k`, by cardinality then
/// lexicographically on their sorted index lists.
fn subsets_by_size(m: usize, max_k: usize) -> Vec<u32> {
    fn rec(start: usize, m: usize, left: usize, acc: u32, out: &mut Vec<u32>) {
        if left == 0 {
            out.push(acc);
            return;
        }
        for i in start..m {
            rec(i + 1, m, left - 1, acc | (1 << i), out);
        }
    }
    let mut out = Vec::new();
    for k in 1..=max_k.min(m) {
        rec(0, m, k, 0, &mut out);
    }
    out
}

impl DecompositionInstance {
    pub fn new(xi: DiscreteMeasure, sets: Vec<BTreeSet<usize>>, targets: Vec<RationalWeight>) -> Result<Self> {
        if sets.is_empty() {
            return Err(Error::Invalid("at least one set is required".into()));
        }
        if sets.len() != targets.len() {
            return Err(Error::Invalid(format!(
                "{} sets but {} targets",
                sets.len(),
                targets.len()
            )));
        }
        let n = xi.space().len();
        if let Some(a) = sets.iter().flatten().find(|&&a| a >= n) {
            return Err(Error::UnknownAtom(a.to_string()));
        }
        if let Some(x) = targets.iter().find(|x| x.is_negative()) {
            return Err(Error::Invalid(format!("negative target {x}")));
        }
        Ok(DecompositionInstance { xi, sets, targets })
    }

    pub fn m(&self) -> usize {
        self.sets.len()
    }
}

/// Checks both covering conditions over all `2^m − 1` index subsets.
pub fn check_feasibility(inst: &DecompositionInstance) -> Result<Feasibility> {
    let m = inst.m();
    if m > MAX_CHECK_SETS {
        return Err(Error::TooManySets {
            m,
            limit: MAX_CHECK_SETS,
        });
    }
    let masks = atom_masks(&inst.xi, &inst.sets);
    for phi in subsets_by_size(m, m) {
        let mass = union_mass(&masks, phi);
        let target = target_sum(&inst.targets, phi);
        if mass < target {
            return Ok(Feasibility::Deficient {
                subset: indices(phi),
                mass,
                target,
            });
        }
    }
    let total = inst.xi.total_mass().clone();
    let target: RationalWeight = inst.targets.iter().sum();
    if total != target {
        return Ok(Feasibility::TotalMismatch { total, target });
    }
    Ok(Feasibility::Feasible)
}

/// Counts occupied cells `B_φ = ∩_{i∈φ} B_i ∩ ∩_{j∉φ} B_jᶜ` with `φ ≠ ∅`.
pub fn arrangement(inst: &DecompositionInstance) -> Result<Arrangement> {
    let m = inst.m();
    if m > MAX_CHECK_SETS {
        return Err(Error::TooManySets {
            m,
            limit: MAX_CHECK_SETS,
        });
    }
    Ok(arrangement_of(&atom_masks(&inst.xi, &inst.sets), m))
}

fn arrangement_of(masks: &[(u32, RationalWeight)], m: usize) -> Arrangement {
    let cells: BTreeSet<u32> = masks
        .iter()
        .filter(|(mask, w)| *mask != 0 && w.is_positive())
        .map(|(mask, _)| *mask)
        .collect();
    let mut per_k = vec![0; m];
    for c in &cells {
        per_k[c.count_ones() as usize - 1] += 1;
    }
    Arrangement {
        rho: cells.len(),
        per_k,
    }
}

fn strict_case_holds(masks: &[(u32, RationalWeight)], targets: &[RationalWeight]) -> bool {
    let m = targets.len();
    targets.iter().all(|x| x.is_positive())
        && subsets_by_size(m, m - 1)
            .into_iter()
            .all(|phi| union_mass(masks, phi) > target_sum(targets, phi))
}

/// Largest `ε` that can be taken from cell `ψ` and charged to set `p` while
/// keeping every proper covering inequality: the minimum slack over proper
/// `φ` meeting `ψ` and avoiding `p`.
pub fn epsilon_zero(inst: &DecompositionInstance, psi: u32, p: usize) -> Result<EpsilonZero> {
    let m = inst.m();
    if m > MAX_CHECK_SETS {
        return Err(Error::TooManySets {
            m,
            limit: MAX_CHECK_SETS,
        });
    }
    if psi == 0 || psi >> m != 0 || psi & (1 << p) == 0 {
        return Err(Error::CasePreconditionViolated(format!(
            "p = {p} must belong to the nonempty cell index set {:?}",
            indices(psi)
        )));
    }
    let masks = atom_masks(&inst.xi, &inst.sets);
    if !strict_case_holds(&masks, &inst.targets) {
        return Err(Error::CasePreconditionViolated(
            "some proper covering inequality is tight or some target is zero".into(),
        ));
    }
    Ok(epsilon_zero_of(&masks, &inst.targets, psi, p))
}

fn epsilon_zero_of(masks: &[(u32, RationalWeight)], targets: &[RationalWeight], psi: u32, p: usize) -> EpsilonZero {
    let m = targets.len();
    subsets_by_size(m, m - 1)
        .into_iter()
        .filter(|phi| phi & psi != 0 && phi & (1 << p) == 0)
        .map(|phi| union_mass(masks, phi) - target_sum(targets, phi))
        .min()
        .map_or(EpsilonZero::Unbounded, EpsilonZero::Bounded)
}

/// Splits `inst.xi` into components supported in their sets, with the target masses, summing to `xi`.
pub fn decompose(inst: &DecompositionInstance) -> Result<DecompositionResult> {
    let m = inst.m();
    if m > MAX_DECOMPOSE_SETS {
        return Err(Error::TooManySets {
            m,
            limit: MAX_DECOMPOSE_SETS,
        });
    }
    match check_feasibility(inst)? {
        Feasibility::Feasible => {}
        Feasibility::Deficient { subset, mass, target } => {
            return Err(Error::InfeasibleInstance {
                subset,
                mass: mass.to_string(),
                target: target.to_string(),
            })
        }
        Feasibility::TotalMismatch { total, target } => {
            return Err(Error::InfeasibleInstance {
                subset: (0..m).collect(),
                mass: total.to_string(),
                target: target.to_string(),
            })
        }
    }
    let mut trace = Vec::new();
    let components = solve(&inst.xi, &inst.sets, &inst.targets, 0, &mut trace);
    Ok(DecompositionResult { components, trace })
}

fn solve(
    xi: &DiscreteMeasure,
    sets: &[BTreeSet<usize>],
    targets: &[RationalWeight],
    depth: usize,
    trace: &mut Vec<TraceStep>,
) -> Vec<DiscreteMeasure> {
    let m = sets.len();
    let masks = atom_masks(xi, sets);
    let rho = arrangement_of(&masks, m).rho;
    let mut step = |case| {
        trace.push(TraceStep { case, depth, m, rho });
    };

    if m == 1 {
        step(CaseLabel::Base);
        return vec![xi.clone()];
    }

    // zero target: that component is empty
    if let Some(k) = targets.iter().position(|x| x.is_zero()) {
        step(CaseLabel::Case2);
        let rest_sets: Vec<_> = sets
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != k)
            .map(|(_, b)| b.clone())
            .collect();
        let rest_targets: Vec<_> = targets
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != k)
            .map(|(_, x)| x.clone())
            .collect();
        let mut parts = solve(xi, &rest_sets, &rest_targets, depth + 1, trace);
        parts.insert(k, DiscreteMeasure::zero(xi.space()));
        return parts;
    }

    // tight proper subset: split along its union
    let tight = subsets_by_size(m, m - 1)
        .into_iter()
        .find(|&phi| union_mass(&masks, phi) == target_sum(targets, phi));
    if let Some(iota) = tight {
        step(CaseLabel::Case1);
        let inside: BTreeSet<usize> = indices(iota).iter().flat_map(|&i| sets[i].iter().copied()).collect();
        let xi_in = xi.restrict(|a| inside.contains(&a));
        let xi_out = xi.restrict(|a| !inside.contains(&a));
        let (mut sets_in, mut targets_in, mut sets_out, mut targets_out) = (vec![], vec![], vec![], vec![]);
        for i in 0..m {
            if iota & (1 << i) != 0 {
                sets_in.push(sets[i].clone());
                targets_in.push(targets[i].clone());
            } else {
                sets_out.push(sets[i].difference(&inside).copied().collect());
                targets_out.push(targets[i].clone());
            }
        }
        let mut left = solve(&xi_in, &sets_in, &targets_in, depth + 1, trace).into_iter();
        let mut right = solve(&xi_out, &sets_out, &targets_out, depth + 1, trace).into_iter();
        return (0..m)
            .map(|i| {
                if iota & (1 << i) != 0 {
                    left.next()
                } else {
                    right.next()
                }
                .expect("sub-solution has one component per set")
            })
            .collect();
    }

    // every proper inequality strict, every target positive
    let psi = masks
        .iter()
        .filter(|(mask, w)| *mask != 0 && w.is_positive())
        .map(|(mask, _)| *mask)
        .min()
        .expect("positive targets force an occupied cell");
    let p = psi.trailing_zeros() as usize;
    let cell_mass: RationalWeight = masks.iter().filter(|(mask, _)| *mask == psi).map(|(_, w)| w).sum();
    let eps0 = epsilon_zero_of(&masks, targets, psi, p);
    let mut eps = targets[p].clone().min(cell_mass.clone());
    if let EpsilonZero::Bounded(e0) = &eps0 {
        eps = eps.min(e0.clone());
    }
    let label = match &eps0 {
        EpsilonZero::Bounded(e0) if *e0 == eps => CaseLabel::Case3_1,
        _ if eps == targets[p] => CaseLabel::Case3_2,
        _ => CaseLabel::Case3_3,
    };
    step(label);

    let cell = xi.restrict(|a| {
        sets.iter()
            .enumerate()
            .fold(0u32, |mm, (i, b)| if b.contains(&a) { mm | (1 << i) } else { mm })
            == psi
    });
    let slice = cell.scale(&(&eps / &cell_mass));
    let reduced = xi.minus(&slice).expect("slice is dominated by the cell");
    let mut reduced_targets = targets.to_vec();
    reduced_targets[p] -= &eps;
    let mut parts = solve(&reduced, sets, &reduced_targets, depth + 1, trace);
    parts[p] = parts[p].plus(&slice).expect("same space");
    parts
}

/// Checks support, totals and the sum exactly, reporting the first failure.
pub fn verify_decomposition(inst: &DecompositionInstance, result: &DecompositionResult) -> Verdict {
    let comps = &result.components;
    if comps.len() != inst.m() {
        return Verdict::Violation {
            condition: Condition::WrongSum,
            index: comps.len(),
        };
    }
    for (i, nu) in comps.iter().enumerate() {
        if nu.weights().keys().any(|a| !inst.sets[i].contains(a)) {
            return Verdict::Violation {
                condition: Condition::OutsideSet,
                index: i,
            };
        }
    }
    for (i, nu) in comps.iter().enumerate() {
        if nu.total_mass() != &inst.targets[i] {
            return Verdict::Violation {
                condition: Condition::WrongTotal,
                index: i,
            };
        }
    }
    let mut sum = DiscreteMeasure::zero(inst.xi.space());
    for nu in comps {
        match sum.plus(nu) {
            Ok(s) => sum = s,
            Err(_) => {
                return Verdict::Violation {
                    condition: Condition::WrongSum,
                    index: 0,
                }
            }
        }
    }
    let atoms: BTreeSet<usize> = sum.support_set().union(&inst.xi.support_set()).copied().collect();
    if let Some(a) = atoms.into_iter().find(|a| sum.weight(*a) != inst.xi.weight(*a)) {
        return Verdict::Violation {
            condition: Condition::WrongSum,
            index: a,
        };
    }
    Verdict::Valid
}
