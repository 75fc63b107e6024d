//! Splitting a measure ξ into components ν_i carried by prescribed sets B_i
//! with prescribed masses, and checking the result exactly.
//!
//!     cargo run --example decomposition

use std::collections::BTreeSet;
use std::sync::Arc;

use dynmeasure::decomposition::{
    arrangement, check_feasibility, decompose, verify_decomposition, DecompositionInstance,
};
use dynmeasure::{make_measure, FiniteMetricSpace, RationalWeight, Result};

fn main() -> Result<()> {
    let space = Arc::new(FiniteMetricSpace::line(&[0.0, 1.0, 2.0, 3.0, 4.0])?);
    let r = RationalWeight::ratio;
    let xi = make_measure(&space, (0..5).map(|a| (a, r(1, 5))))?;
    let sets: Vec<BTreeSet<usize>> = vec![[0, 1].into(), [1, 2, 3].into(), [0, 3, 4].into()];
    let inst = DecompositionInstance::new(xi, sets, vec![r(1, 5), r(2, 5), r(2, 5)])?;

    println!("feasibility: {:?}", check_feasibility(&inst)?);
    println!("arrangement: rho = {}", arrangement(&inst)?.rho);
    let result = decompose(&inst)?;
    for (i, c) in result.components.iter().enumerate() {
        println!("nu_{i} = {c}");
    }
    for step in &result.trace {
        println!(
            "{:>width$}{} (m = {}, rho = {})",
            "",
            step.case,
            step.m,
            step.rho,
            width = 2 * step.depth
        );
    }
    println!("verdict: {:?}", verify_decomposition(&inst, &result));

    let short = DecompositionInstance::new(
        inst.xi.clone(),
        vec![[0].into(), [0].into(), [1, 2, 3, 4].into()],
        vec![r(1, 5), r(1, 5), r(3, 5)],
    )?;
    println!("\nsecond instance: {:?}", check_feasibility(&short)?);
    Ok(())
}
