//! A sink and a source on a line. Mixtures (1 − ε) δ_sink + ε δ_source are
//! fixed by the pushforward and stay at the full sink-source distance from
//! δ_sink in the bottleneck metric, however small ε is.

use dynmeasure::stability::{
    probe_attractor, probe_measure_lyapunov, replay_witness, scenario_sink_source, LiftedSet, ProbeConfig, Target,
};
use dynmeasure::{fmt_distance, w_infinity, w_p, RationalWeight, Result};

fn main() -> Result<()> {
    let s = scenario_sink_source(4, 1.0)?;
    let sink = s.delta_sink();
    for eps in [RationalWeight::ratio(1, 8), RationalWeight::ratio(1, 4)] {
        let mu = s.mu_eps(&eps)?;
        println!(
            "eps = {eps}: fixed = {}, delta_inf = {}, w1 = {}",
            s.system.push(&mu)? == mu,
            fmt_distance(w_infinity(&mu, &sink)?.value),
            fmt_distance(w_p(&mu, &sink, 1)?)
        );
    }

    let cfg = ProbeConfig {
        eps_grid: vec![0.5],
        delta_grid: vec![0.2, 1.0],
        horizon: 12,
        probes_per_cell: 8,
        seed: 1,
        extra_probes: s.named_probes(),
    };
    let report = probe_measure_lyapunov(&s.system, &sink, &cfg)?;
    print!("\n{}", report.to_table());

    let cfg = ProbeConfig {
        delta_grid: vec![1.0],
        ..cfg
    };
    let report = probe_measure_lyapunov(&s.system, &sink, &cfg)?;
    print!("\n{}", report.to_table());
    if let Some(w) = report.verdict.witness() {
        let again = replay_witness(&s.system, &Target::Measure(sink.clone()), w)?;
        println!("replayed witness distance: {}", fmt_distance(again));
    }

    let attractor = probe_attractor(&s.system, &LiftedSet::new([s.sink])?, 0.9, 10)?;
    println!("\n{{sink}} with eps 0.9 as an attractor: {:?}", attractor.verdict);
    Ok(())
}
