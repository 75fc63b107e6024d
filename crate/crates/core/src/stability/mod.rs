//! Stability of invariant sets and invariant measures under the pushforward
//! `f♯` of a finite map, measured in the bottleneck metric.
//!
//! A set `A` is lifted to `A♯`, the probability measures supported in `A`.
//! The distance from `μ` to `A♯` has the closed form
//! `max_{x ∈ supp μ} d(x, A)`, which lets every set-level notion be probed
//! with measures.

mod probes;
mod scenarios;

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Write;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::DiscreteMeasure;
use crate::rational::RationalWeight;
use crate::space::{hausdorff, FiniteMetricSpace};
use crate::transport::w_infinity;

pub use probes::{
    probe_asymptotic, probe_attractor, probe_exponential, probe_lyapunov, probe_measure_lyapunov, replay_witness,
    ProbeConfig,
};
pub use scenarios::{scenario_sink_source, scenario_torus_shear, SinkSource, TorusShear};

/// A map on the points of a finite space.
#[derive(Debug, Clone)]
pub struct MapSystem {
    space: Arc<FiniteMetricSpace>,
    map: Vec<usize>,
}

impl MapSystem {
    pub fn new(space: Arc<FiniteMetricSpace>, map: Vec<usize>) -> Result<Self> {
        if map.len() != space.len() {
            return Err(Error::Invalid(format!(
                "map has {} entries for {} points",
                map.len(),
                space.len()
            )));
        }
        if let Some(&bad) = map.iter().find(|&&y| y >= space.len()) {
            return Err(Error::UnknownAtom(bad.to_string()));
        }
        Ok(MapSystem { space, map })
    }

    pub fn identity(space: Arc<FiniteMetricSpace>) -> Self {
        let map = (0..space.len()).collect();
        MapSystem { space, map }
    }

    pub fn space(&self) -> &Arc<FiniteMetricSpace> {
        &self.space
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    /// `f^n(x)`, with `f^0` the identity.
    pub fn iterate(&self, x: usize, n: usize) -> usize {
        (0..n).fold(x, |y, _| self.map[y])
    }

    pub fn image(&self, set: &BTreeSet<usize>) -> BTreeSet<usize> {
        set.iter().map(|&x| self.map[x]).collect()
    }

    pub fn is_invariant(&self, set: &BTreeSet<usize>) -> bool {
        set.iter().all(|&x| set.contains(&self.map[x]))
    }

    pub fn push(&self, mu: &DiscreteMeasure) -> Result<DiscreteMeasure> {
        mu.pushforward(&self.map)
    }

    /// `f♯^n μ`.
    pub fn push_n(&self, mu: &DiscreteMeasure, n: usize) -> Result<DiscreteMeasure> {
        let mut cur = mu.clone();
        for _ in 0..n {
            cur = self.push(&cur)?;
        }
        Ok(cur)
    }
}

/// `A♯ = { μ : supp μ ⊆ A }`, represented by `A` itself.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LiftedSet {
    atoms: BTreeSet<usize>,
}

impl LiftedSet {
    pub fn new<I: IntoIterator<Item = usize>>(atoms: I) -> Result<Self> {
        let atoms: BTreeSet<usize> = atoms.into_iter().collect();
        if atoms.is_empty() {
            return Err(Error::EmptySet);
        }
        Ok(LiftedSet { atoms })
    }

    pub fn atoms(&self) -> &BTreeSet<usize> {
        &self.atoms
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.atoms.iter().copied().collect()
    }

    pub fn contains(&self, mu: &DiscreteMeasure) -> bool {
        mu.weights().keys().all(|a| self.atoms.contains(a))
    }
}

/// `Δ(μ, A♯) = max_{x ∈ supp μ} d(x, A)`.
pub fn dist_to_lift(mu: &DiscreteMeasure, set: &LiftedSet) -> Result<f64> {
    let target = set.to_vec();
    let space = mu.space();
    let mut worst = 0.0_f64;
    for &x in mu.weights().keys() {
        worst = worst.max(space.dist_to_set(x, &target)?);
    }
    Ok(worst)
}

/// Minimum of `Δ(μ, ν)` over all `ν ∈ A♯` whose weights are multiples of
/// `1/grid`. Exhaustive; used to validate [`dist_to_lift`].
pub fn dist_to_lift_grid(mu: &DiscreteMeasure, set: &LiftedSet, grid: u32) -> Result<f64> {
    if grid == 0 {
        return Err(Error::Invalid("grid must be positive".into()));
    }
    let atoms = set.to_vec();
    if atoms.len() > 6 {
        return Err(Error::TooLarge(format!("{} atoms in the lifted set", atoms.len())));
    }
    let mut best = f64::INFINITY;
    let mut parts = vec![0u32; atoms.len()];
    fn compositions(k: usize, left: u32, parts: &mut Vec<u32>, visit: &mut dyn FnMut(&[u32])) {
        if k + 1 == parts.len() {
            parts[k] = left;
            visit(parts);
            return;
        }
        for v in 0..=left {
            parts[k] = v;
            compositions(k + 1, left - v, parts, visit);
        }
    }
    let mut failure = None;
    compositions(0, grid, &mut parts, &mut |p| {
        let nu = crate::measure::make_measure(
            mu.space(),
            atoms
                .iter()
                .zip(p)
                .map(|(&a, &k)| (a, RationalWeight::ratio(k as i64, grid as i64))),
        );
        match nu.and_then(|nu| w_infinity(mu, &nu)) {
            Ok(rep) => best = best.min(rep.value),
            Err(e) => failure = Some(e),
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(best),
    }
}

/// `d_H(U, V)`, which equals the Hausdorff distance between the lifts.
pub fn lift_hausdorff(space: &FiniteMetricSpace, u: &[usize], v: &[usize]) -> Result<f64> {
    hausdorff(space, u, v)
}

/// Hausdorff distance between `U♯` and `V♯` computed from the measure side:
/// the suprema of [`dist_to_lift`] over point masses of each set.
pub fn lifted_hausdorff_from_probes(space: &Arc<FiniteMetricSpace>, u: &[usize], v: &[usize]) -> Result<f64> {
    let lu = LiftedSet::new(u.iter().copied())?;
    let lv = LiftedSet::new(v.iter().copied())?;
    let mut worst = 0.0_f64;
    for &x in u {
        worst = worst.max(dist_to_lift(&DiscreteMeasure::point_mass(space, x)?, &lv)?);
    }
    for &y in v {
        worst = worst.max(dist_to_lift(&DiscreteMeasure::point_mass(space, y)?, &lu)?);
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Notion {
    Lyapunov,
    Asymptotic,
    Attractor,
    Exponential,
}

impl std::str::FromStr for Notion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lyapunov" => Ok(Notion::Lyapunov),
            "asymptotic" => Ok(Notion::Asymptotic),
            "attractor" => Ok(Notion::Attractor),
            "exponential" => Ok(Notion::Exponential),
            other => Err(Error::Parse(format!("unknown stability notion `{other}`"))),
        }
    }
}

/// What is being probed: an invariant set or an invariant measure.
#[derive(Debug, Clone)]
pub enum Target {
    Set(LiftedSet),
    Measure(DiscreteMeasure),
}

/// A concrete violating orbit. Replaying it with [`replay_witness`]
/// reproduces `distance` exactly.
#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub probe_id: String,
    #[serde(serialize_with = "crate::io::serialize_measure_weights")]
    pub probe: DiscreteMeasure,
    pub step: usize,
    pub distance: f64,
    pub delta: Option<f64>,
    pub eps: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum StabilityVerdict {
    StableAtResolution,
    UnstableWitness { witness: Box<Witness> },
    Inconclusive { reason: String },
}

impl StabilityVerdict {
    pub fn is_stable(&self) -> bool {
        matches!(self, StabilityVerdict::StableAtResolution)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            StabilityVerdict::UnstableWitness { witness } => Some(witness),
            _ => None,
        }
    }
}

/// Distances along one probe orbit, `distances[n]` at step `n`.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeTrace {
    pub probe_id: String,
    pub delta: Option<f64>,
    pub distances: Vec<f64>,
}

impl ProbeTrace {
    pub fn sup(&self) -> f64 {
        self.distances.iter().cloned().fold(0.0, f64::max)
    }
}

/// Outcome of one `(ε, δ)` cell or one `δ` neighborhood.
#[derive(Debug, Clone, Serialize)]
pub struct CellResult {
    pub eps: Option<f64>,
    pub delta: Option<f64>,
    pub probes: usize,
    pub worst: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Parameters {
    pub eps_grid: Vec<f64>,
    pub delta_grid: Vec<f64>,
    pub horizon: usize,
    pub probes_per_cell: usize,
    pub seed: u64,
    pub fitted_c: Option<f64>,
    pub fitted_lambda: Option<f64>,
    pub r_squared: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub notion: Notion,
    pub target: String,
    pub parameters: Parameters,
    pub verdict: StabilityVerdict,
    pub cells: Vec<CellResult>,
    pub traces: Vec<ProbeTrace>,
    pub notes: Vec<String>,
}

impl StabilityReport {
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "notion: {:?}", self.notion);
        let _ = writeln!(out, "target: {}", self.target);
        let _ = writeln!(
            out,
            "seed: {}  horizon: {}",
            self.parameters.seed, self.parameters.horizon
        );
        if let (Some(c), Some(l)) = (self.parameters.fitted_c, self.parameters.fitted_lambda) {
            let _ = writeln!(
                out,
                "fit: C = {}  lambda = {}",
                crate::fmt_distance(c),
                crate::fmt_distance(l)
            );
        }
        let _ = writeln!(
            out,
            "{:>14}  {:>14}  {:>7}  {:>18}  {:>4}",
            "eps", "delta", "probes", "worst", "ok"
        );
        let opt = |v: Option<f64>| v.map(crate::fmt_distance).unwrap_or_else(|| "-".into());
        for c in &self.cells {
            let _ = writeln!(
                out,
                "{:>14}  {:>14}  {:>7}  {:>18}  {:>4}",
                opt(c.eps),
                opt(c.delta),
                c.probes,
                crate::fmt_distance(c.worst),
                if c.ok { "yes" } else { "no" }
            );
        }
        match &self.verdict {
            StabilityVerdict::StableAtResolution => {
                let _ = writeln!(out, "verdict: stable at tested resolution");
            }
            StabilityVerdict::UnstableWitness { witness } => {
                let _ = writeln!(
                    out,
                    "verdict: unstable, witness {} = {} at n = {}, distance {}",
                    witness.probe_id,
                    witness.probe,
                    witness.step,
                    crate::fmt_distance(witness.distance)
                );
            }
            StabilityVerdict::Inconclusive { reason } => {
                let _ = writeln!(out, "verdict: inconclusive ({reason})");
            }
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        out
    }

    /// Orbit traces as CSV rows `n,probe_id,distance`.
    pub fn write_traces_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "probe_id", "distance"])?;
        for t in &self.traces {
            for (n, d) in t.distances.iter().enumerate() {
                w.write_record([n.to_string(), t.probe_id.clone(), format!("{d}")])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}
