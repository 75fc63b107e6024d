//! W1, W2 and the bottleneck distance side by side on the family
//! μ_n = ((n+1)/2n) δ_x + ((n−1)/2n) δ_y against ½ δ_x + ½ δ_y: the supports
//! coincide, W_p tends to zero, the bottleneck distance stays at d(x, y).

use std::sync::Arc;

use dynmeasure::transport::{w_p_min_cost_flow, w_p_vertex_enumeration};
use dynmeasure::{fmt_distance, hausdorff, make_measure, w_infinity, w_p, FiniteMetricSpace, RationalWeight, Result};

fn main() -> Result<()> {
    let d_xy = 3.0;
    let space = Arc::new(FiniteMetricSpace::line(&[0.0, d_xy])?);
    let r = RationalWeight::ratio;
    let half = make_measure(&space, [(0, r(1, 2)), (1, r(1, 2))])?;
    println!(
        "{:>5}  {:>16}  {:>16}  {:>10}  {:>10}",
        "n", "w1", "w2", "delta_inf", "hausdorff"
    );
    for n in [1, 2, 4, 8, 16, 32, 64] {
        let mu = make_measure(&space, [(0, r(n + 1, 2 * n)), (1, r(n - 1, 2 * n))])?;
        let h = hausdorff(&space, &mu.support(), &half.support())?;
        println!(
            "{:>5}  {:>16}  {:>16}  {:>10}  {:>10}",
            n,
            fmt_distance(w_p(&mu, &half, 1)?),
            fmt_distance(w_p(&mu, &half, 2)?),
            fmt_distance(w_infinity(&mu, &half)?.value),
            fmt_distance(h)
        );
    }

    // the two W_p routes agree
    let line = Arc::new(FiniteMetricSpace::line(&[0.0, 0.5, 1.5, 4.0])?);
    let a = make_measure(&line, [(0, r(1, 3)), (2, r(2, 3))])?;
    let b = make_measure(&line, [(1, r(1, 2)), (3, r(1, 4)), (0, r(1, 4))])?;
    let (mcf, plan) = w_p_min_cost_flow(&a, &b, 2)?;
    plan.validate()?;
    println!(
        "\nW2 by min-cost flow {} and by vertex enumeration {}",
        fmt_distance(mcf),
        fmt_distance(w_p_vertex_enumeration(&a, &b, 2)?)
    );
    Ok(())
}
