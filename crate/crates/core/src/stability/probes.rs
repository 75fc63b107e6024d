//! Sampled probes for the four stability notions.
//!
//! Every probe is a measure; its orbit under `f♯` is computed exactly and
//! measured either against a lifted set (closed form) or against an
//! invariant measure (bottleneck solver). Each `δ` cell draws from its own
//! ChaCha stream, so a report depends only on the seed.

use std::collections::{BTreeSet, HashMap};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    dist_to_lift, lifted_hausdorff_from_probes, CellResult, LiftedSet, MapSystem, Notion, Parameters, ProbeTrace,
    StabilityReport, StabilityVerdict, Target, Witness,
};
use crate::error::{Error, Result};
use crate::measure::{make_measure, DiscreteMeasure};
use crate::rational::RationalWeight;
use crate::space::hausdorff;
use crate::transport::w_infinity;

/// Weights of random probes are multiples of `1/WEIGHT_GRID`.
const WEIGHT_GRID: u32 = 8;
const MAX_PROBE_ATOMS: usize = 4;
/// A distance at most this is treated as having reached the target.
const CONVERGED: f64 = 1e-12;
const MIN_R_SQUARED: f64 = 0.99;
/// Cap on the number of image sets followed when intersecting `f^n(U)`.
const MAX_IMAGE_STEPS: usize = 100_000;

#[derive(Debug, Clone)]
pub struct ProbeConfig {
    pub eps_grid: Vec<f64>,
    pub delta_grid: Vec<f64>,
    pub horizon: usize,
    pub probes_per_cell: usize,
    pub seed: u64,
    /// Fixed probes added to every cell whose radius admits them.
    pub extra_probes: Vec<(String, DiscreteMeasure)>,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            eps_grid: vec![0.25, 0.5],
            delta_grid: vec![0.125, 0.25],
            horizon: 32,
            probes_per_cell: 8,
            seed: 0,
            extra_probes: Vec::new(),
        }
    }
}

impl ProbeConfig {
    fn parameters(&self) -> Parameters {
        Parameters {
            eps_grid: self.eps_grid.clone(),
            delta_grid: self.delta_grid.clone(),
            horizon: self.horizon,
            probes_per_cell: self.probes_per_cell,
            seed: self.seed,
            ..Parameters::default()
        }
    }

    fn rng(&self, cell: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(cell as u64);
        rng
    }

    fn check(&self) -> Result<()> {
        for &v in self.eps_grid.iter().chain(&self.delta_grid) {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Invalid(format!("grid value {v} must be finite and nonnegative")));
            }
        }
        Ok(())
    }
}

fn check_invariant(system: &MapSystem, a: &LiftedSet) -> Result<()> {
    if a.atoms().iter().any(|&x| x >= system.space().len()) {
        return Err(Error::UnknownAtom(format!("{:?}", a.to_vec())));
    }
    if system.is_invariant(a.atoms()) {
        Ok(())
    } else {
        Err(Error::NotInvariant)
    }
}

fn describe_set(system: &MapSystem, a: &LiftedSet) -> String {
    let labels: Vec<&str> = a.atoms().iter().map(|&x| system.space().label(x)).collect();
    format!("set {{{}}}", labels.join(", "))
}

/// A probability measure on `k` random points of `pool` with weights on the
/// `1/8` grid, every atom getting at least one unit.
fn random_measure(rng: &mut ChaCha8Rng, system: &MapSystem, pool: &[usize]) -> Result<DiscreteMeasure> {
    let k = rng.gen_range(1..=pool.len().min(MAX_PROBE_ATOMS));
    let picks = sample(rng, pool.len(), k);
    let mut units = vec![1u32; k];
    for _ in k as u32..WEIGHT_GRID {
        units[rng.gen_range(0..k)] += 1;
    }
    make_measure(
        system.space(),
        picks
            .iter()
            .zip(units)
            .map(|(i, u)| (pool[i], RationalWeight::ratio(u as i64, WEIGHT_GRID as i64))),
    )
}

fn set_trace(system: &MapSystem, a: &LiftedSet, probe: &DiscreteMeasure, horizon: usize) -> Result<Vec<f64>> {
    let mut cur = probe.clone();
    let mut out = Vec::with_capacity(horizon + 1);
    for n in 0..=horizon {
        if n > 0 {
            cur = system.push(&cur)?;
        }
        out.push(dist_to_lift(&cur, a)?);
    }
    Ok(out)
}

fn measure_trace(
    system: &MapSystem,
    mu: &DiscreteMeasure,
    probe: &DiscreteMeasure,
    horizon: usize,
) -> Result<Vec<f64>> {
    let mut cur = probe.clone();
    let mut out = Vec::with_capacity(horizon + 1);
    for n in 0..=horizon {
        if n > 0 {
            cur = system.push(&cur)?;
        }
        out.push(w_infinity(&cur, mu)?.value);
    }
    Ok(out)
}

struct Probe {
    id: String,
    measure: DiscreteMeasure,
}

struct Cell {
    delta: f64,
    probes: Vec<Probe>,
    traces: Vec<Vec<f64>>,
}

impl Cell {
    fn worst(&self) -> f64 {
        self.traces.iter().flatten().cloned().fold(0.0, f64::max)
    }

    /// The probe reaching the largest distance (earliest on ties) and the
    /// first step where it does, if that distance exceeds `eps`.
    fn worst_violation(&self, eps: f64) -> Option<(usize, usize, f64)> {
        let mut best: Option<(usize, usize, f64)> = None;
        for (k, t) in self.traces.iter().enumerate() {
            let sup = t.iter().cloned().fold(0.0, f64::max);
            if sup > eps && best.is_none_or(|b| sup > b.2) {
                let n = t.iter().position(|&d| d == sup).expect("sup is attained");
                best = Some((k, n, sup));
            }
        }
        best
    }
}

/// Shared `(ε, δ)` evaluation for the two Lyapunov probes.
fn lyapunov_report(
    notion: Notion,
    target: String,
    cfg: &ProbeConfig,
    cells: Vec<Cell>,
    mut notes: Vec<String>,
) -> StabilityReport {
    let mut results = Vec::new();
    let mut failure: Option<(f64, &Cell, usize, usize, f64)> = None;
    for &eps in &cfg.eps_grid {
        let mut any_ok = false;
        for cell in &cells {
            let worst = cell.worst();
            let ok = worst <= eps;
            any_ok |= ok;
            results.push(CellResult {
                eps: Some(eps),
                delta: Some(cell.delta),
                probes: cell.probes.len(),
                worst,
                ok,
            });
        }
        if !any_ok && failure.is_none() && !cells.is_empty() {
            // report the violation found at the finest radius
            let finest = cells
                .iter()
                .min_by(|a, b| a.delta.total_cmp(&b.delta))
                .expect("a failing ε implies at least one cell");
            let (k, n, d) = finest.worst_violation(eps).expect("cell fails at this ε");
            failure = Some((eps, finest, k, n, d));
        }
    }
    let verdict = match failure {
        Some((eps, cell, k, n, d)) => StabilityVerdict::UnstableWitness {
            witness: Box::new(Witness {
                probe_id: cell.probes[k].id.clone(),
                probe: cell.probes[k].measure.clone(),
                step: n,
                distance: d,
                delta: Some(cell.delta),
                eps: Some(eps),
            }),
        },
        None if cfg.eps_grid.is_empty() || cells.is_empty() => StabilityVerdict::Inconclusive {
            reason: "empty ε or δ grid".into(),
        },
        None => StabilityVerdict::StableAtResolution,
    };
    notes.push("stability is certified only at the tested grid resolution; witnesses are exact".into());
    let traces = cells
        .iter()
        .flat_map(|c| {
            c.probes.iter().zip(&c.traces).map(|(p, t)| ProbeTrace {
                probe_id: p.id.clone(),
                delta: Some(c.delta),
                distances: t.clone(),
            })
        })
        .collect();
    StabilityReport {
        notion,
        target,
        parameters: cfg.parameters(),
        verdict,
        cells: results,
        traces,
        notes,
    }
}

/// Lyapunov stability of `A♯`: for each `δ`, probes supported in the closed
/// `δ`-neighborhood of `A` (every point mass there, plus random measures)
/// are followed for `horizon` steps. An `ε` passes when some `δ` keeps every
/// probe within `ε` of `A♯`.
pub fn probe_lyapunov(system: &MapSystem, a: &LiftedSet, cfg: &ProbeConfig) -> Result<StabilityReport> {
    check_invariant(system, a)?;
    cfg.check()?;
    let space = system.space();
    let atoms = a.to_vec();
    let mut cells = Vec::new();
    let mut notes = Vec::new();
    for (c, &delta) in cfg.delta_grid.iter().enumerate() {
        let pool = space.neighborhood(&atoms, delta, true);
        let mut rng = cfg.rng(c);
        let mut probes: Vec<Probe> = pool
            .iter()
            .map(|&x| {
                Ok(Probe {
                    id: format!("d{c}:point:{}", space.label(x)),
                    measure: DiscreteMeasure::point_mass(space, x)?,
                })
            })
            .collect::<Result<_>>()?;
        for k in 0..cfg.probes_per_cell {
            probes.push(Probe {
                id: format!("d{c}:random:{k}"),
                measure: random_measure(&mut rng, system, &pool)?,
            });
        }
        for (name, m) in &cfg.extra_probes {
            if dist_to_lift(m, a)? <= delta {
                probes.push(Probe {
                    id: format!("d{c}:{name}"),
                    measure: m.clone(),
                });
            }
        }
        let traces = probes
            .iter()
            .map(|p| set_trace(system, a, &p.measure, cfg.horizon))
            .collect::<Result<Vec<_>>>()?;
        // a measure probe never exceeds the worst point orbit of its support
        let point_worst: HashMap<usize, &Vec<f64>> = pool.iter().copied().zip(&traces).collect();
        for (p, t) in probes.iter().zip(&traces).skip(pool.len()) {
            if !p.measure.weights().keys().all(|x| point_worst.contains_key(x)) {
                continue;
            }
            for (n, &d) in t.iter().enumerate() {
                let bound = p
                    .measure
                    .weights()
                    .keys()
                    .map(|x| point_worst[x][n])
                    .fold(0.0, f64::max);
                if d > bound {
                    notes.push(format!("probe {} exceeds its point orbits at n = {n}", p.id));
                }
            }
        }
        cells.push(Cell { delta, probes, traces });
    }
    Ok(lyapunov_report(
        Notion::Lyapunov,
        describe_set(system, a),
        cfg,
        cells,
        notes,
    ))
}

/// Lyapunov stability of the invariant measure `{μ}` in the bottleneck
/// metric. Probes within `δ` of `μ` are built by moving part of one or more
/// atoms to points at most `δ` away, by mixing in a point mass, and from
/// `cfg.extra_probes`; each is kept only if its distance to `μ` is at most
/// `δ`.
pub fn probe_measure_lyapunov(system: &MapSystem, mu: &DiscreteMeasure, cfg: &ProbeConfig) -> Result<StabilityReport> {
    mu.ensure_probability()?;
    if !crate::measure::same_space(mu.space(), system.space()) {
        return Err(Error::SpaceMismatch);
    }
    if &system.push(mu)? != mu {
        return Err(Error::NotInvariantMeasure);
    }
    cfg.check()?;
    let space = system.space();
    let supp = mu.support();
    let mut cells = Vec::new();
    let mut notes = Vec::new();
    for (c, &delta) in cfg.delta_grid.iter().enumerate() {
        let mut rng = cfg.rng(c);
        let mut candidates: Vec<(String, DiscreteMeasure)> = vec![(format!("d{c}:self"), mu.clone())];
        let balls: Vec<Vec<usize>> = supp.iter().map(|&x| space.neighborhood(&[x], delta, true)).collect();
        let reach = space.neighborhood(&supp, delta, true);
        for k in 0..cfg.probes_per_cell {
            if k % 2 == 0 {
                // split: move a grid fraction of some atoms to nearby points
                let mut pairs = Vec::new();
                for (s, &x) in supp.iter().enumerate() {
                    let w = mu.weight(x);
                    if rng.gen_bool(0.5) {
                        let frac = RationalWeight::ratio(rng.gen_range(1..=WEIGHT_GRID) as i64, WEIGHT_GRID as i64);
                        let z = balls[s][rng.gen_range(0..balls[s].len())];
                        let moved = &w * &frac;
                        pairs.push((z, moved.clone()));
                        pairs.push((x, w - moved));
                    } else {
                        pairs.push((x, w));
                    }
                }
                candidates.push((format!("d{c}:split:{k}"), make_measure(space, pairs)?));
            } else {
                let z = reach[rng.gen_range(0..reach.len())];
                let eta = RationalWeight::ratio(rng.gen_range(1..=WEIGHT_GRID) as i64, WEIGHT_GRID as i64);
                let mixed = mu
                    .scale(&(RationalWeight::one() - &eta))
                    .plus(&DiscreteMeasure::point_mass(space, z)?.scale(&eta))?;
                candidates.push((format!("d{c}:mix:{k}"), mixed));
            }
        }
        for (name, m) in &cfg.extra_probes {
            candidates.push((format!("d{c}:{name}"), m.clone()));
        }
        let mut probes = Vec::new();
        let mut dropped = 0;
        for (id, m) in candidates {
            if w_infinity(&m, mu)?.value <= delta {
                probes.push(Probe { id, measure: m });
            } else {
                dropped += 1;
            }
        }
        if dropped > 0 {
            notes.push(format!(
                "δ = {}: {dropped} candidate probes farther than δ were discarded",
                crate::fmt_distance(delta)
            ));
        }
        let traces = probes
            .iter()
            .map(|p| measure_trace(system, mu, &p.measure, cfg.horizon))
            .collect::<Result<Vec<_>>>()?;
        cells.push(Cell { delta, probes, traces });
    }
    Ok(lyapunov_report(
        Notion::Lyapunov,
        format!("measure {mu}"),
        cfg,
        cells,
        notes,
    ))
}

/// Asymptotic stability of `A♯`: every probe supported in the open
/// `ε`-neighborhood must reach `A♯` within the horizon.
pub fn probe_asymptotic(system: &MapSystem, a: &LiftedSet, eps: f64, cfg: &ProbeConfig) -> Result<StabilityReport> {
    check_invariant(system, a)?;
    cfg.check()?;
    let space = system.space();
    let pool = space.neighborhood(&a.to_vec(), eps, false);
    let mut rng = cfg.rng(0);
    let mut probes: Vec<Probe> = pool
        .iter()
        .map(|&x| {
            Ok(Probe {
                id: format!("point:{}", space.label(x)),
                measure: DiscreteMeasure::point_mass(space, x)?,
            })
        })
        .collect::<Result<_>>()?;
    for k in 0..cfg.probes_per_cell {
        probes.push(Probe {
            id: format!("random:{k}"),
            measure: random_measure(&mut rng, system, &pool)?,
        });
    }
    for (name, m) in &cfg.extra_probes {
        if dist_to_lift(m, a)? < eps {
            probes.push(Probe {
                id: name.clone(),
                measure: m.clone(),
            });
        }
    }
    let traces = probes
        .iter()
        .map(|p| set_trace(system, a, &p.measure, cfg.horizon))
        .collect::<Result<Vec<_>>>()?;
    let stuck = traces.iter().position(|t| t[cfg.horizon] > CONVERGED);
    let worst_final = traces.iter().map(|t| t[cfg.horizon]).fold(0.0, f64::max);
    let verdict = match stuck {
        Some(k) => StabilityVerdict::UnstableWitness {
            witness: Box::new(Witness {
                probe_id: probes[k].id.clone(),
                probe: probes[k].measure.clone(),
                step: cfg.horizon,
                distance: traces[k][cfg.horizon],
                delta: None,
                eps: Some(eps),
            }),
        },
        None => StabilityVerdict::StableAtResolution,
    };
    Ok(StabilityReport {
        notion: Notion::Asymptotic,
        target: describe_set(system, a),
        parameters: Parameters {
            eps_grid: vec![eps],
            delta_grid: Vec::new(),
            ..cfg.parameters()
        },
        verdict,
        cells: vec![CellResult {
            eps: Some(eps),
            delta: None,
            probes: probes.len(),
            worst: worst_final,
            ok: stuck.is_none(),
        }],
        traces: probes
            .iter()
            .zip(traces)
            .map(|(p, t)| ProbeTrace {
                probe_id: p.id.clone(),
                delta: None,
                distances: t,
            })
            .collect(),
        notes: vec![format!(
            "convergence means distance ≤ {CONVERGED:e} at n = {}",
            cfg.horizon
        )],
    })
}

/// `∩_{n ≥ 1} f^n(U)` for a finite set, following images until they cycle.
fn limit_intersection(system: &MapSystem, u: &BTreeSet<usize>) -> Option<BTreeSet<usize>> {
    let mut seen: HashMap<BTreeSet<usize>, usize> = HashMap::new();
    let mut cur = system.image(u);
    let mut acc = cur.clone();
    for step in 0..MAX_IMAGE_STEPS {
        if seen.insert(cur.clone(), step).is_some() {
            return Some(acc);
        }
        acc = acc.intersection(&cur).copied().collect();
        cur = system.image(&cur);
    }
    None
}

/// Attractor test on `U = N_ε(A)` (open): look for `N ≤ n_max` with
/// `f^N(U) ⊆ U`, then compare `∩ f^n(U)` with `A`.
pub fn probe_attractor(system: &MapSystem, a: &LiftedSet, eps: f64, n_max: usize) -> Result<StabilityReport> {
    check_invariant(system, a)?;
    let space = system.space();
    let u: BTreeSet<usize> = space.neighborhood(&a.to_vec(), eps, false).into_iter().collect();
    let mut img = u.clone();
    let mut trapping = None;
    for n in 1..=n_max {
        img = system.image(&img);
        if img.is_subset(&u) {
            trapping = Some(n);
            break;
        }
    }
    let mut notes = vec![format!("U has {} points", u.len())];
    let witness_at = |x: usize, step: usize| -> Result<StabilityVerdict> {
        let probe = DiscreteMeasure::point_mass(space, x)?;
        let distance = dist_to_lift(&system.push_n(&probe, step)?, a)?;
        Ok(StabilityVerdict::UnstableWitness {
            witness: Box::new(Witness {
                probe_id: format!("point:{}", space.label(x)),
                probe,
                step,
                distance,
                delta: None,
                eps: Some(eps),
            }),
        })
    };
    let verdict = match trapping {
        None => {
            let x = *u
                .iter()
                .find(|&&x| !u.contains(&system.iterate(x, n_max)))
                .expect("f^N(U) ⊄ U has an escaping point");
            notes.push(format!("no N ≤ {n_max} with f^N(U) ⊆ U"));
            witness_at(x, n_max)?
        }
        Some(n) => {
            notes.push(format!("f^{n}(U) ⊆ U"));
            match limit_intersection(system, &u) {
                None => StabilityVerdict::Inconclusive {
                    reason: format!("images of U did not cycle within {MAX_IMAGE_STEPS} steps"),
                },
                Some(inter) if &inter == a.atoms() => StabilityVerdict::StableAtResolution,
                Some(inter) => {
                    let labels: Vec<&str> = inter.iter().map(|&x| space.label(x)).collect();
                    notes.push(format!("∩ f^n(U) = {{{}}}", labels.join(", ")));
                    match inter.iter().find(|x| !a.atoms().contains(x)) {
                        Some(&x) => witness_at(x, 0)?,
                        None => StabilityVerdict::Inconclusive {
                            reason: "∩ f^n(U) is a proper subset of A".into(),
                        },
                    }
                }
            }
        }
    };
    let ok = verdict.is_stable();
    Ok(StabilityReport {
        notion: Notion::Attractor,
        target: describe_set(system, a),
        parameters: Parameters {
            eps_grid: vec![eps],
            horizon: n_max,
            ..Parameters::default()
        },
        verdict,
        cells: vec![CellResult {
            eps: Some(eps),
            delta: None,
            probes: u.len(),
            worst: 0.0,
            ok,
        }],
        traces: Vec::new(),
        notes,
    })
}

struct Fit {
    c: f64,
    lambda: f64,
    r_squared: f64,
}

/// Least squares of `ln h_n` against `n` over the nonzero terms.
fn fit_exponential(h: &[f64]) -> Option<Fit> {
    let pts: Vec<(f64, f64)> = h
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > 0.0)
        .map(|(n, &v)| (n as f64, v.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 0.0 } else { sxy * sxy / (sxx * syy) };
    let lambda = -slope;
    let c = h
        .iter()
        .enumerate()
        .map(|(n, &v)| v * (lambda * n as f64).exp() / h[0])
        .fold(0.0, f64::max);
    Some(Fit { c, lambda, r_squared })
}

/// Exponential stability: for each closed `δ`-neighborhood `U` of `A`,
/// the exact sequence `h_n = d_H(A, f^n(U))` is fitted by `C e^{−λn} h_0`.
/// A cell passes when `λ > 0` with `R² ≥ 0.99`, or when fewer than two
/// terms are nonzero (any `λ` works). Cells with `U = A` are skipped.
pub fn probe_exponential(system: &MapSystem, a: &LiftedSet, cfg: &ProbeConfig) -> Result<StabilityReport> {
    check_invariant(system, a)?;
    cfg.check()?;
    let space = system.space();
    let atoms = a.to_vec();
    let mut cells = Vec::new();
    let mut traces = Vec::new();
    let mut notes = Vec::new();
    let mut params = cfg.parameters();
    let mut fitted = false;
    let mut failure: Option<(usize, f64)> = None;
    let mut degenerate = 0;
    for (c, &delta) in cfg.delta_grid.iter().enumerate() {
        let mut u: BTreeSet<usize> = space.neighborhood(&atoms, delta, true).into_iter().collect();
        let mut h = Vec::with_capacity(cfg.horizon + 1);
        for n in 0..=cfg.horizon {
            if n > 0 {
                u = system.image(&u);
            }
            let uv: Vec<usize> = u.iter().copied().collect();
            let direct = hausdorff(space, &atoms, &uv)?;
            let lifted = lifted_hausdorff_from_probes(space, &atoms, &uv)?;
            if direct != lifted {
                notes.push(format!("δ = {delta}: d_H and lifted Hausdorff differ at n = {n}"));
            }
            h.push(direct);
        }
        traces.push(ProbeTrace {
            probe_id: format!("d{c}:hausdorff"),
            delta: Some(delta),
            distances: h.clone(),
        });
        if h[0] == 0.0 {
            degenerate += 1;
            notes.push(format!("δ = {}: U = A, skipped", crate::fmt_distance(delta)));
            continue;
        }
        let ok = match fit_exponential(&h) {
            None => {
                notes.push(format!(
                    "δ = {}: at most one nonzero term, any λ > 0 admissible",
                    crate::fmt_distance(delta)
                ));
                true
            }
            Some(fit) => {
                let ok = fit.lambda > 0.0 && fit.r_squared >= MIN_R_SQUARED;
                if ok && !fitted {
                    params.fitted_c = Some(fit.c);
                    params.fitted_lambda = Some(fit.lambda);
                    params.r_squared = Some(fit.r_squared);
                }
                if !ok {
                    notes.push(format!(
                        "δ = {}: fit λ = {}, R² = {}",
                        crate::fmt_distance(delta),
                        crate::fmt_distance(fit.lambda),
                        crate::fmt_distance(fit.r_squared)
                    ));
                }
                ok
            }
        };
        fitted |= ok;
        if !ok && failure.is_none() {
            failure = Some((c, delta));
        }
        cells.push(CellResult {
            eps: None,
            delta: Some(delta),
            probes: 1,
            worst: h.iter().cloned().fold(0.0, f64::max),
            ok,
        });
    }
    let verdict = if fitted {
        StabilityVerdict::StableAtResolution
    } else if let Some((c, delta)) = failure {
        // the point of U whose orbit stays farthest from A at the horizon
        let u0 = space.neighborhood(&atoms, delta, true);
        let t = cfg.horizon;
        let far = u0
            .iter()
            .map(|&x| (x, space.dist_to_set(system.iterate(x, t), &atoms).unwrap_or(0.0)))
            .max_by(|p, q| p.1.total_cmp(&q.1).then(q.0.cmp(&p.0)));
        match far {
            Some((x, d)) if d > 0.0 => StabilityVerdict::UnstableWitness {
                witness: Box::new(Witness {
                    probe_id: format!("d{c}:point:{}", space.label(x)),
                    probe: DiscreteMeasure::point_mass(space, x)?,
                    step: t,
                    distance: d,
                    delta: Some(delta),
                    eps: None,
                }),
            },
            _ => StabilityVerdict::Inconclusive {
                reason: "no exponential fit, and no point orbit stays away from A".into(),
            },
        }
    } else {
        StabilityVerdict::Inconclusive {
            reason: format!("all {degenerate} neighborhoods coincide with A"),
        }
    };
    Ok(StabilityReport {
        notion: Notion::Exponential,
        target: describe_set(system, a),
        parameters: params,
        verdict,
        cells,
        traces,
        notes,
    })
}

/// Recomputes the distance recorded in a witness by pushing its probe
/// forward `step` times.
pub fn replay_witness(system: &MapSystem, target: &Target, witness: &Witness) -> Result<f64> {
    let pushed = system.push_n(&witness.probe, witness.step)?;
    match target {
        Target::Set(a) => dist_to_lift(&pushed, a),
        Target::Measure(mu) => Ok(w_infinity(&pushed, mu)?.value),
    }
}
