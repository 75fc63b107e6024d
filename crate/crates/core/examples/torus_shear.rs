//! Shear on the flat torus grid: the uniform row measure stays within the
//! row gap of its row-1 copy, the lopsided one does not.
//!
//!     cargo run --release --example torus_shear -- 32

use dynmeasure::stability::{scenario_torus_shear, TorusShear};
use dynmeasure::{fmt_distance, w_infinity, DiscreteMeasure, Result};

fn trace(t: &TorusShear, mu0: &DiscreteMeasure) -> Result<Vec<f64>> {
    let mut cur = t.row_shift(mu0, 1);
    let mut out = Vec::new();
    for n in 0..=t.n {
        if n > 0 {
            cur = t.system.push(&cur)?;
        }
        out.push(w_infinity(&cur, mu0)?.value);
    }
    Ok(out)
}

fn main() -> Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(32);
    let t = scenario_torus_shear(n)?;
    let lam = trace(&t, &t.uniform_row(0))?;
    let nu = trace(&t, &t.lopsided_row(0))?;
    println!("{:>4}  {:>16}  {:>16}", "n", "uniform", "lopsided");
    for k in 0..=n {
        println!("{:>4}  {:>16}  {:>16}", k, fmt_distance(lam[k]), fmt_distance(nu[k]));
    }
    let sup = |v: &[f64]| v.iter().cloned().fold(0.0, f64::max);
    println!("sup uniform  = {}", fmt_distance(sup(&lam)));
    println!("sup lopsided = {}", fmt_distance(sup(&nu)));
    Ok(())
}
