//! The two worked systems: a sink/source pair on a line, and the shear
//! `(x, y) ↦ (x + y, y)` on a grid of the flat torus.

use std::sync::Arc;

use super::MapSystem;
use crate::error::{Error, Result};
use crate::measure::{make_measure, DiscreteMeasure};
use crate::rational::RationalWeight;
use crate::space::{build_space, FiniteMetricSpace, MetricRule, PointData};

/// Sink at 0, basin points evenly spaced in `(0, d_xy)`, source at `d_xy`.
/// Basin points step one place toward the sink; sink and source are fixed.
#[derive(Debug, Clone)]
pub struct SinkSource {
    pub system: MapSystem,
    pub sink: usize,
    pub source: usize,
    pub basin: Vec<usize>,
    pub d_xy: f64,
}

pub fn scenario_sink_source(n_basin: usize, d_xy: f64) -> Result<SinkSource> {
    if n_basin == 0 {
        return Err(Error::Invalid("the basin needs at least one point".into()));
    }
    if !(d_xy.is_finite() && d_xy > 0.0) {
        return Err(Error::Invalid(format!("d_xy must be positive, got {d_xy}")));
    }
    let mut labels = vec!["sink".to_string()];
    let mut coords = vec![vec![0.0]];
    for k in 1..=n_basin {
        labels.push(format!("b{k}"));
        coords.push(vec![k as f64 * d_xy / (n_basin + 1) as f64]);
    }
    labels.push("source".to_string());
    coords.push(vec![d_xy]);
    let space = Arc::new(build_space(
        labels,
        MetricRule::Euclidean,
        PointData::Coords(coords),
        true,
    )?);
    let source = n_basin + 1;
    let mut map: Vec<usize> = (0..space.len()).map(|x| x.saturating_sub(1)).collect();
    map[source] = source;
    let system = MapSystem::new(space, map)?;
    Ok(SinkSource {
        system,
        sink: 0,
        source,
        basin: (1..=n_basin).collect(),
        d_xy,
    })
}

impl SinkSource {
    pub fn space(&self) -> &Arc<FiniteMetricSpace> {
        self.system.space()
    }

    pub fn delta_sink(&self) -> DiscreteMeasure {
        DiscreteMeasure::point_mass(self.space(), self.sink).expect("sink is a point")
    }

    pub fn delta_source(&self) -> DiscreteMeasure {
        DiscreteMeasure::point_mass(self.space(), self.source).expect("source is a point")
    }

    /// `μ_ε = (1 − ε) δ_sink + ε δ_source`.
    pub fn mu_eps(&self, eps: &RationalWeight) -> Result<DiscreteMeasure> {
        if eps.is_negative() || eps > &RationalWeight::one() {
            return Err(Error::Invalid(format!("mixing weight {eps} outside [0, 1]")));
        }
        make_measure(
            self.space(),
            [(self.sink, RationalWeight::one() - eps), (self.source, eps.clone())],
        )
    }

    /// Fixed perturbations of `δ_sink` worth probing: `μ_ε` for a few `ε`.
    pub fn named_probes(&self) -> Vec<(String, DiscreteMeasure)> {
        [(1, 8), (1, 4), (1, 2)]
            .into_iter()
            .map(|(n, d)| {
                let eps = RationalWeight::ratio(n, d);
                (format!("mu_eps={eps}"), self.mu_eps(&eps).expect("eps in range"))
            })
            .collect()
    }
}

/// `N × N` grid `(i/N, j/N)` on the unit flat torus, point `(i, j)` stored
/// at index `j·N + i`, with `f(i, j) = ((i + j) mod N, j)`.
#[derive(Debug, Clone)]
pub struct TorusShear {
    pub system: MapSystem,
    pub n: usize,
}

pub fn scenario_torus_shear(n: usize) -> Result<TorusShear> {
    if n < 4 || n % 2 == 1 {
        return Err(Error::Invalid(format!(
            "grid size must be even and at least 4, got {n}"
        )));
    }
    let mut labels = Vec::with_capacity(n * n);
    let mut coords = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            labels.push(format!("({i},{j})"));
            coords.push(vec![i as f64 / n as f64, j as f64 / n as f64]);
        }
    }
    // the torus rule is a metric by construction; the cubic check is skipped
    let space = Arc::new(build_space(
        labels,
        MetricRule::FlatTorus,
        PointData::Coords(coords),
        false,
    )?);
    let map = (0..n * n)
        .map(|p| {
            let (i, j) = (p % n, p / n);
            j * n + (i + j) % n
        })
        .collect();
    Ok(TorusShear {
        system: MapSystem::new(space, map)?,
        n,
    })
}

impl TorusShear {
    pub fn space(&self) -> &Arc<FiniteMetricSpace> {
        self.system.space()
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        (j % self.n) * self.n + i % self.n
    }

    pub fn row(&self, j: usize) -> Vec<usize> {
        (0..self.n).map(|i| self.index(i, j)).collect()
    }

    /// Uniform measure on row `j`.
    pub fn uniform_row(&self, j: usize) -> DiscreteMeasure {
        DiscreteMeasure::uniform(self.space(), &self.row(j)).expect("row is nonempty")
    }

    /// Mass ¾ spread evenly over columns `0..N/2` of row `j`, ¼ over the rest.
    pub fn lopsided_row(&self, j: usize) -> DiscreteMeasure {
        let half = self.n / 2;
        let heavy = RationalWeight::ratio(3, 2 * self.n as i64);
        let light = RationalWeight::ratio(1, 2 * self.n as i64);
        make_measure(
            self.space(),
            (0..self.n).map(|i| (self.index(i, j), if i < half { heavy.clone() } else { light.clone() })),
        )
        .expect("row atoms are points")
    }

    /// Moves every atom `k` rows up, keeping its column.
    pub fn row_shift(&self, mu: &DiscreteMeasure, k: usize) -> DiscreteMeasure {
        let n = self.n;
        let pairs: Vec<_> = mu
            .weights()
            .iter()
            .map(|(&p, w)| (self.index(p % n, p / n + k), w.clone()))
            .collect();
        make_measure(self.space(), pairs).expect("shifted atoms are points")
    }

    /// Row shifts of `mu` by one and two rows up and down.
    pub fn row_probes(&self, mu: &DiscreteMeasure) -> Vec<(String, DiscreteMeasure)> {
        [1, 2, self.n - 1, self.n - 2]
            .into_iter()
            .map(|k| (format!("row_shift+{k}"), self.row_shift(mu, k)))
            .collect()
    }
}
