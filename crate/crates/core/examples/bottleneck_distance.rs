//! Bottleneck distance against W1 on the two-point family
//! μ_n = (1/n) δ_x + (1 − 1/n) δ_y, which converges to δ_y weakly but not
//! in the bottleneck metric.

use std::sync::Arc;

use dynmeasure::transport::bottleneck_of_plan;
use dynmeasure::{
    fmt_distance, make_measure, w_infinity, w_p, DiscreteMeasure, FiniteMetricSpace, RationalWeight, Result,
};

fn main() -> Result<()> {
    let space = Arc::new(FiniteMetricSpace::line(&[0.0, 1.0])?);
    let (x, y) = (0, 1);
    let delta_y = DiscreteMeasure::point_mass(&space, y)?;
    println!("{:>4}  {:>10}  {:>10}", "n", "delta_inf", "w1");
    for n in [2, 4, 8, 16, 64] {
        let mu = make_measure(
            &space,
            [(x, RationalWeight::ratio(1, n)), (y, RationalWeight::ratio(n - 1, n))],
        )?;
        let rep = w_infinity(&mu, &delta_y)?;
        assert_eq!(bottleneck_of_plan(&rep.plan), rep.value);
        println!(
            "{:>4}  {:>10}  {:>10}",
            n,
            fmt_distance(rep.value),
            fmt_distance(w_p(&mu, &delta_y, 1)?)
        );
    }

    let mu = make_measure(
        &space,
        [(x, RationalWeight::ratio(1, 4)), (y, RationalWeight::ratio(3, 4))],
    )?;
    let rep = w_infinity(&mu, &delta_y)?;
    println!(
        "\noptimal plan for n = 4 ({} thresholds, {} max-flow calls):",
        rep.thresholds_tested, rep.feasibility_calls
    );
    for e in &rep.plan.entries {
        println!("  {} -> {}  {}", space.label(e.source), space.label(e.target), e.mass);
    }
    Ok(())
}
