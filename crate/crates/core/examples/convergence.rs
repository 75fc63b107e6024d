//! Convergence diagnostics: a weight-stabilizing sequence against the
//! two-point family whose mass on x tends to zero.

use std::sync::Arc;

use dynmeasure::convergence::{d_convergence_verdict, MeasureSequence};
use dynmeasure::{make_measure, DiscreteMeasure, FiniteMetricSpace, RationalWeight, Result};

fn main() -> Result<()> {
    let space = Arc::new(FiniteMetricSpace::line(&[0.0, 1.0])?);
    let r = RationalWeight::ratio;
    let two = |a: (i64, i64), b: (i64, i64)| make_measure(&space, [(0, r(a.0, a.1)), (1, r(b.0, b.1))]);

    let fading = (1..=12).map(|n| two((1, n), (n - 1, n))).collect::<Result<Vec<_>>>()?;
    let seq = MeasureSequence::new(fading, DiscreteMeasure::point_mass(&space, 1)?)?;
    println!("fading mass on x:\n{}", d_convergence_verdict(&seq)?.to_table());

    let mut settling = vec![two((1, 3), (2, 3))?, two((2, 5), (3, 5))?];
    settling.extend((0..6).map(|_| two((1, 2), (1, 2))).collect::<Result<Vec<_>>>()?);
    let seq = MeasureSequence::new(settling, two((1, 2), (1, 2))?)?;
    println!(
        "eventually constant weights:\n{}",
        d_convergence_verdict(&seq)?.to_table()
    );
    Ok(())
}
