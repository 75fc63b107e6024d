//! Command-line front end. `main.rs` only parses arguments and maps the
//! result of [`run`] to a process exit code.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::convergence::{d_convergence_verdict_with, ConvergenceOptions, Overall};
use crate::decomposition::{decompose, verify_decomposition, Verdict};
use crate::error::{Error, Result};
use crate::io;
use crate::measure::DiscreteMeasure;
use crate::stability::{
    probe_asymptotic, probe_attractor, probe_exponential, probe_lyapunov, probe_measure_lyapunov, scenario_sink_source,
    scenario_torus_shear, LiftedSet, MapSystem, Notion, ProbeConfig, StabilityReport, StabilityVerdict, Target,
};
use crate::transport::{w_infinity, w_p, w_p_min_cost_flow, TransportPlan};
use crate::{fmt_distance, hausdorff};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MALFORMED: i32 = 2;
pub const EXIT_SPACE_MISMATCH: i32 = 3;
pub const EXIT_INFEASIBLE: i32 = 4;
pub const EXIT_NOT_CONVERGENT: i32 = 5;
pub const EXIT_INCONCLUSIVE: i32 = 6;
pub const EXIT_UNSTABLE: i32 = 7;

const EXIT_CODES_HELP: &str = "\
Exit codes:
  0  success (consistent / valid / stable at the tested resolution)
  2  malformed input or invalid arguments
  3  measures live on different spaces
  4  decomposition instance is infeasible (witness subset printed)
  5  sequence is not d-convergent (witness printed)
  6  convergence verdict is inconclusive
  7  unstable, with a replayable witness";

#[derive(Debug, Parser)]
#[command(name = "dynmeasure", version, about = "Bottleneck distances, decompositions, convergence and stability of finitely supported measures", after_help = EXIT_CODES_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Seed for every random choice [default: the config's seed, else 0].
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bottleneck distance between two measures, optionally with W1/W2.
    Dist {
        a: PathBuf,
        b: PathBuf,
        /// Also report W_p (repeatable).
        #[arg(long = "p", value_parser = clap::value_parser!(u32).range(1..=2))]
        p: Vec<u32>,
        /// Print the optimal bottleneck plan.
        #[arg(long)]
        plan: bool,
    },
    /// Optimal plan: bottleneck by default, or W_p-optimal with --p.
    Plan {
        a: PathBuf,
        b: PathBuf,
        #[arg(long = "p", value_parser = clap::value_parser!(u32).range(1..=2))]
        p: Option<u32>,
    },
    /// Split a measure into components with prescribed supports and masses.
    Decompose { instance: PathBuf },
    /// Convergence diagnostics of a measure sequence against its limit.
    Converge {
        sequence: PathBuf,
        /// Threshold below which a distance sequence counts as zero.
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Probe a stability notion for a scenario or explicit map.
    Stability {
        config: PathBuf,
        /// lyapunov | asymptotic | attractor | exponential (overrides the config).
        #[arg(long)]
        notion: Option<String>,
        #[arg(long)]
        horizon: Option<usize>,
        /// ε grid, comma separated.
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
        /// δ grid, comma separated.
        #[arg(long, value_delimiter = ',')]
        delta: Option<Vec<f64>>,
        #[arg(long)]
        probes: Option<usize>,
    },
    /// Per-term W1, W2, bottleneck and support Hausdorff distance to the limit.
    Compare { sequence: PathBuf },
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::SpaceMismatch => EXIT_SPACE_MISMATCH,
        Error::InfeasibleInstance { .. } => EXIT_INFEASIBLE,
        _ => EXIT_MALFORMED,
    }
}

/// A finished command: the text to emit and the exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub text: String,
    pub code: i32,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, code: EXIT_OK }
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

/// Runs a parsed command. Errors carry their exit code via [`exit_code`].
pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Dist { a, b, p, plan } => cmd_dist(cli.format, a, b, p, *plan),
        Command::Plan { a, b, p } => cmd_plan(cli.format, a, b, *p),
        Command::Decompose { instance } => cmd_decompose(cli.format, instance),
        Command::Converge { sequence, eps } => cmd_converge(cli.format, sequence, *eps),
        Command::Stability {
            config,
            notion,
            horizon,
            eps,
            delta,
            probes,
        } => {
            let overrides = Overrides {
                notion: notion.clone(),
                horizon: *horizon,
                eps: eps.clone(),
                delta: delta.clone(),
                probes: *probes,
                seed: cli.seed,
            };
            cmd_stability(cli.format, config, &overrides)
        }
        Command::Compare { sequence } => cmd_compare(cli.format, sequence),
    }
}

/// Writes the outcome and returns the process exit code.
pub fn emit(cli: &Cli, result: Result<Outcome>) -> i32 {
    match result {
        Ok(outcome) => {
            let written = match &cli.output {
                Some(path) => std::fs::write(path, &outcome.text),
                None => std::io::stdout().write_all(outcome.text.as_bytes()),
            };
            match written {
                Ok(()) => outcome.code,
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_MALFORMED
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn read_pair(a: &Path, b: &Path) -> Result<(DiscreteMeasure, DiscreteMeasure)> {
    let mu = io::read_measure(a)?;
    let nu = io::read_measure(b)?;
    mu.check_space(&nu)?;
    mu.ensure_probability()?;
    nu.ensure_probability()?;
    Ok((mu, nu))
}

#[derive(Serialize)]
struct PlanRow {
    source: String,
    target: String,
    mass: crate::RationalWeight,
    distance: f64,
}

fn plan_rows(plan: &TransportPlan) -> Vec<PlanRow> {
    let space = plan.mu.space();
    plan.entries
        .iter()
        .map(|e| PlanRow {
            source: space.label(e.source).to_string(),
            target: space.label(e.target).to_string(),
            mass: e.mass.clone(),
            distance: space.d(e.source, e.target),
        })
        .collect()
}

fn plan_table(rows: &[PlanRow], out: &mut String) {
    let _ = writeln!(
        out,
        "{:>12}  {:>12}  {:>14}  {:>18}",
        "source", "target", "mass", "distance"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:>12}  {:>12}  {:>14}  {:>18}",
            r.source,
            r.target,
            r.mass.to_string(),
            fmt_distance(r.distance)
        );
    }
}

fn plan_csv(rows: &[PlanRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["source", "target", "mass", "distance"])?;
    for r in rows {
        w.write_record([
            r.source.clone(),
            r.target.clone(),
            r.mass.to_string(),
            fmt_distance(r.distance),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?).expect("csv is utf-8"))
}

fn cmd_dist(format: Format, a: &Path, b: &Path, ps: &[u32], with_plan: bool) -> Result<Outcome> {
    let (mu, nu) = read_pair(a, b)?;
    let report = w_infinity(&mu, &nu)?;
    let mut ps = ps.to_vec();
    ps.sort_unstable();
    ps.dedup();
    let wp = ps
        .iter()
        .map(|&p| Ok((p, w_p(&mu, &nu, p)?)))
        .collect::<Result<Vec<_>>>()?;
    let rows = plan_rows(&report.plan);
    let text = match format {
        Format::Json => {
            let mut v = json!({ "delta_inf": report.value });
            for (p, d) in &wp {
                v[format!("w{p}")] = json!(d);
            }
            if with_plan {
                v["plan"] = serde_json::to_value(&rows)?;
            }
            to_json(&v)?
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["metric", "value"])?;
            w.write_record(["delta_inf".to_string(), fmt_distance(report.value)])?;
            for (p, d) in &wp {
                w.write_record([format!("w{p}"), fmt_distance(*d)])?;
            }
            let mut s =
                String::from_utf8(w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?).expect("csv is utf-8");
            if with_plan {
                s.push('\n');
                s.push_str(&plan_csv(&rows)?);
            }
            s
        }
        Format::Table => {
            let mut s = String::new();
            let _ = writeln!(s, "delta_inf  {}", fmt_distance(report.value));
            for (p, d) in &wp {
                let _ = writeln!(s, "w{p}         {}", fmt_distance(*d));
            }
            if with_plan {
                s.push('\n');
                plan_table(&rows, &mut s);
            }
            s
        }
    };
    Ok(Outcome::ok(text))
}

fn cmd_plan(format: Format, a: &Path, b: &Path, p: Option<u32>) -> Result<Outcome> {
    let (mu, nu) = read_pair(a, b)?;
    let (label, value, plan) = match p {
        None => {
            let rep = w_infinity(&mu, &nu)?;
            ("delta_inf".to_string(), rep.value, rep.plan)
        }
        Some(p) => {
            let (value, plan) = w_p_min_cost_flow(&mu, &nu, p)?;
            (format!("w{p}"), value, plan)
        }
    };
    let rows = plan_rows(&plan);
    let text = match format {
        Format::Json => to_json(&json!({ "objective": label, "value": value, "plan": rows }))?,
        Format::Csv => plan_csv(&rows)?,
        Format::Table => {
            let mut s = format!("{label}  {}\n\n", fmt_distance(value));
            plan_table(&rows, &mut s);
            s
        }
    };
    Ok(Outcome::ok(text))
}

fn cmd_decompose(format: Format, path: &Path) -> Result<Outcome> {
    let inst = io::read_instance(path)?;
    let result = decompose(&inst)?;
    let verdict = verify_decomposition(&inst, &result);
    let space = inst.xi.space();
    let code = if verdict == Verdict::Valid {
        EXIT_OK
    } else {
        EXIT_INFEASIBLE
    };
    let verdict_text = match &verdict {
        Verdict::Valid => "valid".to_string(),
        Verdict::Violation { condition, index } => format!("violation of {condition} at {index}"),
    };
    let text = match format {
        Format::Json => {
            let comps: Vec<_> = result
                .components
                .iter()
                .map(|c| serde_json::json!({ "weights": io::weight_specs(c), "mass": c.total_mass() }))
                .collect();
            to_json(&json!({
                "components": comps,
                "trace": result.trace,
                "max_depth": result.max_depth(),
                "verdict": verdict_text,
            }))?
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["component", "atom", "mass"])?;
            for (i, c) in result.components.iter().enumerate() {
                for (&a, m) in c.weights() {
                    w.write_record([i.to_string(), space.label(a).to_string(), m.to_string()])?;
                }
            }
            String::from_utf8(w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?).expect("csv is utf-8")
        }
        Format::Table => {
            let mut s = String::new();
            for (i, c) in result.components.iter().enumerate() {
                let _ = writeln!(s, "component {i}: {c}");
            }
            let cases: Vec<String> = result.trace.iter().map(|t| t.case.to_string()).collect();
            let _ = writeln!(s, "trace: {}", cases.join(" "));
            let _ = writeln!(s, "max depth: {}", result.max_depth());
            let _ = writeln!(s, "verdict: {verdict_text}");
            s
        }
    };
    Ok(Outcome { text, code })
}

fn cmd_converge(format: Format, path: &Path, eps: Option<f64>) -> Result<Outcome> {
    let seq = io::read_sequence(path)?;
    let mut opts = ConvergenceOptions::default();
    if let Some(t) = eps {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::Invalid(format!("threshold must be positive, got {t}")));
        }
        opts.threshold = t;
    }
    let report = d_convergence_verdict_with(&seq, opts)?;
    let code = match report.overall {
        Overall::ConsistentWithDConvergence => EXIT_OK,
        Overall::NotDConvergent { .. } => EXIT_NOT_CONVERGENT,
        Overall::Inconclusive => EXIT_INCONCLUSIVE,
    };
    let text = match format {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["n", "delta", "w1", "hausdorff"])?;
            for n in 0..report.terms {
                w.write_record([
                    n.to_string(),
                    fmt_distance(report.delta[n]),
                    fmt_distance(report.w1[n]),
                    fmt_distance(report.hausdorff[n]),
                ])?;
            }
            String::from_utf8(w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?).expect("csv is utf-8")
        }
        Format::Table => {
            let mut s = report.to_table();
            if let Overall::NotDConvergent {
                witness: crate::convergence::Witness::SeparatingSet { atoms, .. },
            } = &report.overall
            {
                let labels: Vec<&str> = atoms.iter().map(|&a| seq.space().label(a)).collect();
                let _ = writeln!(s, "witness set: {{{}}}", labels.join(", "));
            }
            s
        }
    };
    Ok(Outcome { text, code })
}

fn cmd_compare(format: Format, path: &Path) -> Result<Outcome> {
    let seq = io::read_sequence(path)?;
    let limit = seq.limit();
    let limit_supp = limit.support();
    let mut rows = Vec::new();
    for (n, term) in seq.terms().iter().enumerate() {
        let w1 = w_p(term, limit, 1)?;
        let w2 = w_p(term, limit, 2)?;
        let d = w_infinity(term, limit)?.value;
        let h = hausdorff(seq.space(), &term.support(), &limit_supp)?;
        rows.push((n, w1, w2, d, h));
    }
    let text = match format {
        Format::Json => {
            let v: Vec<_> = rows
                .iter()
                .map(|&(n, w1, w2, d, h)| json!({ "n": n, "w1": w1, "w2": w2, "delta_inf": d, "hausdorff": h }))
                .collect();
            to_json(&v)?
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["n", "w1", "w2", "delta_inf", "hausdorff"])?;
            for &(n, w1, w2, d, h) in &rows {
                w.write_record([
                    n.to_string(),
                    fmt_distance(w1),
                    fmt_distance(w2),
                    fmt_distance(d),
                    fmt_distance(h),
                ])?;
            }
            String::from_utf8(w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?).expect("csv is utf-8")
        }
        Format::Table => {
            let mut s = String::new();
            let _ = writeln!(
                s,
                "{:>5}  {:>18}  {:>18}  {:>18}  {:>18}",
                "n", "w1", "w2", "delta_inf", "hausdorff"
            );
            for &(n, w1, w2, d, h) in &rows {
                let _ = writeln!(
                    s,
                    "{:>5}  {:>18}  {:>18}  {:>18}  {:>18}",
                    n,
                    fmt_distance(w1),
                    fmt_distance(w2),
                    fmt_distance(d),
                    fmt_distance(h)
                );
            }
            s
        }
    };
    Ok(Outcome::ok(text))
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub notion: Option<String>,
    pub horizon: Option<usize>,
    pub eps: Option<Vec<f64>>,
    pub delta: Option<Vec<f64>>,
    pub probes: Option<usize>,
    pub seed: Option<u64>,
}

/// A stability run resolved from a config: the system, the target, the
/// notion and the probe settings.
pub struct StabilityRun {
    pub system: MapSystem,
    pub target: Target,
    pub notion: Notion,
    pub config: ProbeConfig,
}

pub fn resolve_stability(cfg: &io::StabilityConfig, over: &Overrides) -> Result<StabilityRun> {
    let notion: Notion = over.notion.as_deref().unwrap_or(&cfg.notion).parse()?;
    let mut probe = ProbeConfig::default();
    let mut extras: Vec<(String, DiscreteMeasure)> = Vec::new();
    let (system, target) = match &cfg.system {
        io::SystemSpec::SinkSource { n_basin, d_xy, .. } => {
            let s = scenario_sink_source(*n_basin, *d_xy)?;
            probe.eps_grid = vec![d_xy / 2.0];
            probe.delta_grid = vec![*d_xy];
            let target = match &cfg.target {
                io::TargetSpec::Named(name) => match name.as_str() {
                    "delta_sink" => Target::Measure(s.delta_sink()),
                    "delta_source" => Target::Measure(s.delta_source()),
                    "sink" => Target::Set(LiftedSet::new([s.sink])?),
                    "source" => Target::Set(LiftedSet::new([s.source])?),
                    other => return Err(Error::Invalid(format!("unknown sink_source target `{other}`"))),
                },
                other => explicit_target(s.space(), other)?,
            };
            extras = s.named_probes();
            (s.system, target)
        }
        io::SystemSpec::TorusShear { n, .. } => {
            let t = scenario_torus_shear(*n)?;
            probe.eps_grid = vec![0.125];
            probe.delta_grid = vec![1.0 / *n as f64];
            probe.horizon = *n;
            let target = match &cfg.target {
                io::TargetSpec::Named(name) => match name.as_str() {
                    "uniform_row0" | "lambda" => Target::Measure(t.uniform_row(0)),
                    "lopsided_row0" | "nu" => Target::Measure(t.lopsided_row(0)),
                    "row0" => Target::Set(LiftedSet::new(t.row(0))?),
                    other => return Err(Error::Invalid(format!("unknown torus_shear target `{other}`"))),
                },
                other => explicit_target(t.space(), other)?,
            };
            if let Target::Measure(mu) = &target {
                extras = t.row_probes(mu);
            }
            (t.system, target)
        }
        io::SystemSpec::Explicit { space, map } => {
            let space = std::sync::Arc::new(io::space_from_spec(space)?);
            let map = io::resolve_atoms(&space, map)?;
            let system = MapSystem::new(space.clone(), map)?;
            let target = match &cfg.target {
                io::TargetSpec::Named(name) => {
                    return Err(Error::Invalid(format!("named target `{name}` needs a scenario")))
                }
                other => explicit_target(&space, other)?,
            };
            (system, target)
        }
    };
    probe.extra_probes = extras;
    if let Some(v) = over.eps.clone().or_else(|| cfg.eps.clone()) {
        probe.eps_grid = v;
    }
    if let Some(v) = over.delta.clone().or_else(|| cfg.delta.clone()) {
        probe.delta_grid = v;
    }
    if let Some(h) = over.horizon.or(cfg.horizon) {
        probe.horizon = h;
    }
    if let Some(k) = over.probes.or(cfg.probes_per_cell) {
        probe.probes_per_cell = k;
    }
    probe.seed = over.seed.or(cfg.seed).unwrap_or(0);
    Ok(StabilityRun {
        system,
        target,
        notion,
        config: probe,
    })
}

fn explicit_target(space: &std::sync::Arc<crate::FiniteMetricSpace>, spec: &io::TargetSpec) -> Result<Target> {
    match spec {
        io::TargetSpec::Set(atoms) => Ok(Target::Set(LiftedSet::new(io::resolve_atoms(space, atoms)?)?)),
        io::TargetSpec::Measure(weights) => Ok(Target::Measure(io::measure_from_weights(space, weights)?)),
        io::TargetSpec::Named(name) => Err(Error::Invalid(format!("unknown target `{name}`"))),
    }
}

/// Joins per-ε reports of a single-ε probe into one report.
fn merge(mut reports: Vec<StabilityReport>) -> Result<StabilityReport> {
    if reports.is_empty() {
        return Err(Error::Invalid("empty ε grid".into()));
    }
    let mut first = reports.remove(0);
    for r in reports {
        first.parameters.eps_grid.extend(r.parameters.eps_grid);
        first.cells.extend(r.cells);
        first.traces.extend(r.traces);
        first.notes.extend(r.notes);
        if first.verdict.is_stable() && !r.verdict.is_stable() {
            first.verdict = r.verdict;
        }
    }
    Ok(first)
}

pub fn run_stability(run: &StabilityRun) -> Result<StabilityReport> {
    let cfg = &run.config;
    match (&run.target, run.notion) {
        (Target::Measure(mu), Notion::Lyapunov) => probe_measure_lyapunov(&run.system, mu, cfg),
        (Target::Measure(_), other) => Err(Error::Invalid(format!(
            "notion {other:?} is only probed for sets; measure targets support lyapunov"
        ))),
        (Target::Set(a), Notion::Lyapunov) => probe_lyapunov(&run.system, a, cfg),
        (Target::Set(a), Notion::Asymptotic) => merge(
            cfg.eps_grid
                .iter()
                .map(|&e| probe_asymptotic(&run.system, a, e, cfg))
                .collect::<Result<_>>()?,
        ),
        (Target::Set(a), Notion::Attractor) => merge(
            cfg.eps_grid
                .iter()
                .map(|&e| probe_attractor(&run.system, a, e, cfg.horizon))
                .collect::<Result<_>>()?,
        ),
        (Target::Set(a), Notion::Exponential) => probe_exponential(&run.system, a, cfg),
    }
}

fn cmd_stability(format: Format, path: &Path, over: &Overrides) -> Result<Outcome> {
    let cfg = io::read_stability_config(path)?;
    let run = resolve_stability(&cfg, over)?;
    let report = run_stability(&run)?;
    let code = match report.verdict {
        StabilityVerdict::StableAtResolution => EXIT_OK,
        StabilityVerdict::UnstableWitness { .. } => EXIT_UNSTABLE,
        StabilityVerdict::Inconclusive { .. } => EXIT_INCONCLUSIVE,
    };
    let text = match format {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let mut buf = Vec::new();
            report.write_traces_csv(&mut buf)?;
            String::from_utf8(buf).expect("csv is utf-8")
        }
        Format::Table => report.to_table(),
    };
    Ok(Outcome { text, code })
}
