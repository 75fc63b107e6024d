//! Interval representations: step maps on [0, 1] pushing Lebesgue measure
//! to a given measure. The canonical layouts of two measures give an upper
//! bound on the bottleneck distance; laying both out along an optimal plan
//! attains it.

use std::sync::Arc;

use dynmeasure::interval::{interval_representation, sup_distance, IntervalRepresentation};
use dynmeasure::{fmt_distance, make_measure, w_infinity, FiniteMetricSpace, RationalWeight, Result};

fn main() -> Result<()> {
    let space = Arc::new(FiniteMetricSpace::line(&[0.0, 1.0, 2.0, 5.0])?);
    let r = RationalWeight::ratio;
    let mu = make_measure(&space, [(0, r(1, 2)), (3, r(1, 2))])?;
    let nu = make_measure(&space, [(1, r(1, 4)), (2, r(1, 4)), (3, r(1, 2))])?;

    let f = interval_representation(&mu)?;
    let g = interval_representation(&nu)?;
    for (name, rep) in [("mu", &f), ("nu", &g)] {
        print!("{name}:");
        for p in rep.pieces() {
            print!("  [{}, {}) -> {}", p.start, p.end, space.label(p.atom));
        }
        println!();
    }
    println!(
        "canonical layouts: sup distance {}",
        fmt_distance(sup_distance(&f, &g)?)
    );

    let best = w_infinity(&mu, &nu)?;
    let along = |pick: fn(&dynmeasure::transport::PlanEntry) -> usize| {
        IntervalRepresentation::from_chunks(&space, best.plan.entries.iter().map(|e| (pick(e), e.mass.clone())))
    };
    let fp = along(|e| e.source)?;
    let gp = along(|e| e.target)?;
    println!(
        "plan-aligned layouts: sup distance {}",
        fmt_distance(sup_distance(&fp, &gp)?)
    );
    println!("bottleneck distance: {}", fmt_distance(best.value));
    Ok(())
}
