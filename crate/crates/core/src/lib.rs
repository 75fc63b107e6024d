//! Exact bottleneck (∞-Wasserstein) distance between finitely supported
//! probability measures, with the tooling built around it: interval
//! representations, a constructive Hall-type decomposition, convergence
//! diagnostics and stability probes for pushforward dynamics.
//!
//! Masses are exact rationals ([`RationalWeight`]); distances are `f64`
//! entries of the space's distance matrix. Because the bottleneck value
//! only ever compares distances, [`w_infinity`] returns a matrix entry
//! bit for bit.

pub mod cli;
pub mod convergence;
pub mod decomposition;
pub mod error;
pub mod flow;
pub mod interval;
pub mod io;
pub mod measure;
pub mod rational;
pub mod space;
pub mod stability;
pub mod transport;

pub use error::{Error, Result};
pub use measure::{make_measure, DiscreteMeasure};
pub use rational::RationalWeight;
pub use space::{build_space, hausdorff, FiniteMetricSpace, MetricRule};
pub use transport::{w_infinity, w_infinity_bruteforce, w_p, SolveReport, TransportPlan};

/// Formats a distance with 12 significant digits.
pub fn fmt_distance(d: f64) -> String {
    if d == 0.0 || !d.is_finite() {
        return format!("{d}");
    }
    let digits = 12 - 1 - d.abs().log10().floor() as i32;
    if (0..=20).contains(&digits) {
        let s = format!("{:.*}", digits as usize, d);
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{d:.11e}")
    }
}
