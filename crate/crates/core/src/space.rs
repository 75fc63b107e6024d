//! Finite metric spaces and point-set geometry.

use std::collections::HashMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack for the triangle inequality on computed (float) metrics.
const TRIANGLE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricRule {
    Euclidean,
    /// Unit flat torus: each coordinate difference wraps to `min(|t|, 1 - |t|)`
    /// before the Euclidean norm.
    #[serde(rename = "torus")]
    FlatTorus,
    #[serde(rename = "matrix")]
    ExplicitMatrix,
}

/// Raw point data handed to [`build_space`].
#[derive(Debug, Clone)]
pub enum PointData {
    Coords(Vec<Vec<f64>>),
    Matrix(Vec<Vec<f64>>),
}

/// A finite set of labeled points with a validated distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: Vec<f64>,
    coords: Option<Vec<Vec<f64>>>,
    rule: MetricRule,
    index: HashMap<String, usize>,
}

fn torus_gap(a: f64, b: f64) -> f64 {
    let t = (a - b).rem_euclid(1.0);
    t.min(1.0 - t)
}

fn coordinate_distance(rule: MetricRule, a: &[f64], b: &[f64]) -> f64 {
    let sq: f64 = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| {
            let g = match rule {
                MetricRule::FlatTorus => torus_gap(x, y),
                _ => (x - y).abs(),
            };
            g * g
        })
        .sum();
    sq.sqrt()
}

/// Builds a space from labels and either coordinates or an explicit matrix.
///
/// With `validate` set, the matrix is checked for a zero diagonal, symmetry,
/// positive off-diagonal entries and the triangle inequality.
pub fn build_space(
    labels: Vec<String>,
    rule: MetricRule,
    data: PointData,
    validate: bool,
) -> Result<FiniteMetricSpace> {
    let n = labels.len();
    if n == 0 {
        return Err(Error::EmptySet);
    }
    let mut index = HashMap::with_capacity(n);
    for (i, l) in labels.iter().enumerate() {
        if index.insert(l.clone(), i).is_some() {
            return Err(Error::Invalid(format!("duplicate point label `{l}`")));
        }
    }
    let (dist, coords) = match (rule, data) {
        (MetricRule::ExplicitMatrix, PointData::Matrix(m)) => {
            if m.len() != n || m.iter().any(|row| row.len() != n) {
                return Err(Error::Invalid(format!("distance matrix must be {n}x{n}")));
            }
            (m.into_iter().flatten().collect::<Vec<_>>(), None)
        }
        (MetricRule::Euclidean | MetricRule::FlatTorus, PointData::Coords(c)) => {
            if c.len() != n {
                return Err(Error::Invalid(format!("expected {n} coordinate vectors")));
            }
            let dim = c[0].len();
            if dim == 0 || c.iter().any(|p| p.len() != dim) {
                return Err(Error::Invalid(
                    "coordinate vectors must share a positive dimension".into(),
                ));
            }
            let mut d = vec![0.0; n * n];
            for i in 0..n {
                for j in (i + 1)..n {
                    let v = coordinate_distance(rule, &c[i], &c[j]);
                    d[i * n + j] = v;
                    d[j * n + i] = v;
                }
            }
            (d, Some(c))
        }
        (rule, _) => {
            return Err(Error::Invalid(format!(
                "metric rule {rule:?} does not match the supplied point data"
            )))
        }
    };
    if dist.iter().any(|v| !v.is_finite()) {
        return Err(Error::MetricViolation("non-finite distance".into()));
    }
    let space = FiniteMetricSpace {
        labels,
        dist,
        coords,
        rule,
        index,
    };
    if validate {
        space.validate()?;
    }
    Ok(space)
}

impl FiniteMetricSpace {
    fn numbered(n: usize) -> Vec<String> {
        (0..n).map(|i| i.to_string()).collect()
    }

    /// Points on the real line (or in ℝ^k) labeled `0..n`.
    pub fn euclidean(coords: Vec<Vec<f64>>) -> Result<Self> {
        build_space(
            Self::numbered(coords.len()),
            MetricRule::Euclidean,
            PointData::Coords(coords),
            true,
        )
    }

    pub fn line(xs: &[f64]) -> Result<Self> {
        Self::euclidean(xs.iter().map(|&x| vec![x]).collect())
    }

    pub fn torus(coords: Vec<Vec<f64>>) -> Result<Self> {
        build_space(
            Self::numbered(coords.len()),
            MetricRule::FlatTorus,
            PointData::Coords(coords),
            true,
        )
    }

    pub fn from_matrix(matrix: Vec<Vec<f64>>) -> Result<Self> {
        build_space(
            Self::numbered(matrix.len()),
            MetricRule::ExplicitMatrix,
            PointData::Matrix(matrix),
            true,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.len();
        let scale = self.dist.iter().cloned().fold(0.0_f64, f64::max);
        for i in 0..n {
            if self.d(i, i) != 0.0 {
                return Err(Error::MetricViolation(format!(
                    "d({0},{0}) = {1} is not zero",
                    self.labels[i],
                    self.d(i, i)
                )));
            }
            for j in 0..n {
                if i == j {
                    continue;
                }
                if self.d(i, j) != self.d(j, i) {
                    return Err(Error::MetricViolation(format!(
                        "asymmetric: d({},{}) = {} but d({},{}) = {}",
                        self.labels[i],
                        self.labels[j],
                        self.d(i, j),
                        self.labels[j],
                        self.labels[i],
                        self.d(j, i)
                    )));
                }
                if self.d(i, j) <= 0.0 {
                    return Err(Error::MetricViolation(format!(
                        "distinct points {} and {} at distance {}",
                        self.labels[i],
                        self.labels[j],
                        self.d(i, j)
                    )));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if self.d(i, k) > self.d(i, j) + self.d(j, k) + TRIANGLE_SLACK * scale {
                        return Err(Error::MetricViolation(format!(
                            "triangle inequality fails for ({}, {}, {})",
                            self.labels[i], self.labels[j], self.labels[k]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.labels.len() + j]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownAtom(label.to_string()))
    }

    pub fn rule(&self) -> MetricRule {
        self.rule
    }

    pub fn coords(&self) -> Option<&[Vec<f64>]> {
        self.coords.as_deref()
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().cloned().fold(0.0, f64::max)
    }

    /// `d(x, A) = min_{a ∈ A} d(x, a)`.
    pub fn dist_to_set(&self, x: usize, set: &[usize]) -> Result<f64> {
        set.iter()
            .map(|&a| self.d(x, a))
            .reduce(f64::min)
            .ok_or(Error::EmptySet)
    }

    /// Directed distance `d(A, B) = max_{a ∈ A} d(a, B)`.
    pub fn directed_distance(&self, a: &[usize], b: &[usize]) -> Result<f64> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut worst = 0.0_f64;
        for &x in a {
            worst = worst.max(self.dist_to_set(x, b)?);
        }
        Ok(worst)
    }

    /// Points within distance `eps` of `set`. `closed` selects `≤` over `<`.
    pub fn neighborhood(&self, set: &[usize], eps: f64, closed: bool) -> Vec<usize> {
        (0..self.len())
            .filter(|&x| {
                set.iter().any(|&a| {
                    let d = self.d(x, a);
                    if closed {
                        d <= eps
                    } else {
                        d < eps
                    }
                })
            })
            .collect()
    }

    /// Sorted distinct off-diagonal distances.
    pub fn distinct_distances(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.dist.iter().copied().filter(|&d| d > 0.0).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    /// Writes the distance matrix as CSV with a label header row and column.
    pub fn write_distance_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec![String::new()];
        header.extend(self.labels.iter().cloned());
        w.write_record(&header)?;
        for i in 0..self.len() {
            let mut row = vec![self.labels[i].clone()];
            row.extend((0..self.len()).map(|j| format!("{}", self.d(i, j))));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Hausdorff distance `max{d(A,B), d(B,A)}` between nonempty point sets.
pub fn hausdorff(space: &FiniteMetricSpace, a: &[usize], b: &[usize]) -> Result<f64> {
    Ok(space.directed_distance(a, b)?.max(space.directed_distance(b, a)?))
}
