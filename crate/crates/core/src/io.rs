//! File formats. Everything that touches the filesystem or a wire format
//! lives here; the other modules work on in-memory values.
//!
//! A measure file looks like
//!
//! ```json
//! { "space": { "points": ["x", "y"], "metric": "euclidean", "coords": [[0.0], [1.0]] },
//!   "weights": [ { "atom": "x", "num": 1, "den": 2 }, { "atom": "y", "num": 1, "den": 2 } ] }
//! ```
//!
//! Point labels and atom references may be strings or integers.

use std::collections::BTreeSet;
use std::path::Path;
use std::sync::Arc;

use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::Value;

use crate::convergence::MeasureSequence;
use crate::decomposition::DecompositionInstance;
use crate::error::{Error, Result};
use crate::measure::{make_measure, DiscreteMeasure};
use crate::rational::{RationalRepr, RationalWeight};
use crate::space::{build_space, FiniteMetricSpace, MetricRule, PointData};

/// Full validation is cubic; larger coordinate spaces only get the
/// distinct-points check (their rule is a metric by construction).
const FULL_VALIDATION_LIMIT: usize = 256;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceSpec {
    pub points: Vec<Value>,
    pub metric: MetricRule,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightSpec {
    pub atom: Value,
    pub num: Value,
    pub den: Value,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureFile {
    pub space: SpaceSpec,
    pub weights: Vec<WeightSpec>,
}

/// A sequence term: either `{"weights": [...]}` or the bare weight list.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum TermSpec {
    Wrapped { weights: Vec<WeightSpec> },
    Bare(Vec<WeightSpec>),
}

impl TermSpec {
    fn weights(&self) -> &[WeightSpec] {
        match self {
            TermSpec::Wrapped { weights } | TermSpec::Bare(weights) => weights,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct SequenceFile {
    pub space: SpaceSpec,
    pub terms: Vec<TermSpec>,
    pub limit: TermSpec,
}

#[derive(Debug, Clone, Deserialize)]
pub struct InstanceFile {
    pub xi: MeasureFile,
    pub sets: Vec<Vec<Value>>,
    pub targets: Vec<RationalRepr>,
}

fn label_of(v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        other => Err(Error::Parse(format!(
            "point labels must be strings or integers, got {other}"
        ))),
    }
}

pub fn space_from_spec(spec: &SpaceSpec) -> Result<FiniteMetricSpace> {
    let labels = spec.points.iter().map(label_of).collect::<Result<Vec<_>>>()?;
    let data = match (spec.metric, &spec.coords, &spec.matrix) {
        (MetricRule::ExplicitMatrix, _, Some(m)) => PointData::Matrix(m.clone()),
        (MetricRule::ExplicitMatrix, _, None) => {
            return Err(Error::Parse("metric \"matrix\" needs a \"matrix\" field".into()))
        }
        (_, Some(c), _) => PointData::Coords(c.clone()),
        (_, None, _) => return Err(Error::Parse("coordinate metrics need a \"coords\" field".into())),
    };
    let full = spec.metric == MetricRule::ExplicitMatrix || labels.len() <= FULL_VALIDATION_LIMIT;
    let space = build_space(labels, spec.metric, data, full)?;
    if !full {
        for i in 0..space.len() {
            for j in (i + 1)..space.len() {
                if space.d(i, j) <= 0.0 {
                    return Err(Error::MetricViolation(format!(
                        "points {} and {} coincide",
                        space.label(i),
                        space.label(j)
                    )));
                }
            }
        }
    }
    Ok(space)
}

/// The spec that rebuilds `space`.
pub fn spec_from_space(space: &FiniteMetricSpace) -> SpaceSpec {
    let points = space.labels().iter().map(|l| Value::String(l.clone())).collect();
    match space.coords() {
        Some(c) => SpaceSpec {
            points,
            metric: space.rule(),
            coords: Some(c.to_vec()),
            matrix: None,
        },
        None => SpaceSpec {
            points,
            metric: MetricRule::ExplicitMatrix,
            coords: None,
            matrix: Some(
                (0..space.len())
                    .map(|i| (0..space.len()).map(|j| space.d(i, j)).collect())
                    .collect(),
            ),
        },
    }
}

pub fn resolve_atom(space: &FiniteMetricSpace, v: &Value) -> Result<usize> {
    let label = label_of(v)?;
    space.index_of(&label)
}

fn weights_to_measure(space: &Arc<FiniteMetricSpace>, weights: &[WeightSpec]) -> Result<DiscreteMeasure> {
    let pairs = weights
        .iter()
        .map(|w| {
            let atom = resolve_atom(space, &w.atom)?;
            let mass = RationalWeight::try_from(&RationalRepr {
                num: w.num.clone(),
                den: w.den.clone(),
            })?;
            Ok((atom, mass))
        })
        .collect::<Result<Vec<_>>>()?;
    make_measure(space, pairs)
}

pub fn measure_from_file(file: &MeasureFile) -> Result<DiscreteMeasure> {
    let space = Arc::new(space_from_spec(&file.space)?);
    weights_to_measure(&space, &file.weights)
}

pub fn weight_specs(mu: &DiscreteMeasure) -> Vec<WeightSpec> {
    mu.weights()
        .iter()
        .map(|(&a, w)| {
            let r = RationalRepr::from(w);
            WeightSpec {
                atom: Value::String(mu.space().label(a).to_string()),
                num: r.num,
                den: r.den,
            }
        })
        .collect()
}

pub fn measure_to_file(mu: &DiscreteMeasure) -> MeasureFile {
    MeasureFile {
        space: spec_from_space(mu.space()),
        weights: weight_specs(mu),
    }
}

/// Serializes only the weight list of a measure; used inside reports.
pub fn serialize_measure_weights<S: Serializer>(mu: &DiscreteMeasure, s: S) -> std::result::Result<S::Ok, S::Error> {
    let specs = weight_specs(mu);
    let mut seq = s.serialize_seq(Some(specs.len()))?;
    for w in &specs {
        seq.serialize_element(w)?;
    }
    seq.end()
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn read_text(path: &Path) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

pub fn parse_measure(text: &str) -> Result<DiscreteMeasure> {
    measure_from_file(&parse(text)?)
}

pub fn read_measure(path: &Path) -> Result<DiscreteMeasure> {
    parse_measure(&read_text(path)?)
}

pub fn write_measure(mu: &DiscreteMeasure, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(&measure_to_file(mu))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

pub fn parse_sequence(text: &str) -> Result<MeasureSequence> {
    let file: SequenceFile = parse(text)?;
    let space = Arc::new(space_from_spec(&file.space)?);
    let terms = file
        .terms
        .iter()
        .map(|t| weights_to_measure(&space, t.weights()))
        .collect::<Result<Vec<_>>>()?;
    let limit = weights_to_measure(&space, file.limit.weights())?;
    MeasureSequence::new(terms, limit)
}

pub fn read_sequence(path: &Path) -> Result<MeasureSequence> {
    parse_sequence(&read_text(path)?)
}

pub fn parse_instance(text: &str) -> Result<DecompositionInstance> {
    let file: InstanceFile = parse(text)?;
    let xi = measure_from_file(&file.xi)?;
    let sets = file
        .sets
        .iter()
        .map(|s| {
            s.iter()
                .map(|v| resolve_atom(xi.space(), v))
                .collect::<Result<BTreeSet<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let targets = file
        .targets
        .iter()
        .map(RationalWeight::try_from)
        .collect::<Result<Vec<_>>>()?;
    DecompositionInstance::new(xi, sets, targets)
}

pub fn read_instance(path: &Path) -> Result<DecompositionInstance> {
    parse_instance(&read_text(path)?)
}

/// The dynamical system of a stability run.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum SystemSpec {
    SinkSource {
        scenario: SinkSourceTag,
        #[serde(default = "default_basin")]
        n_basin: usize,
        #[serde(default = "default_dxy")]
        d_xy: f64,
    },
    TorusShear {
        scenario: TorusTag,
        #[serde(default = "default_grid")]
        n: usize,
    },
    Explicit {
        space: SpaceSpec,
        map: Vec<Value>,
    },
}

#[derive(Debug, Clone, Copy, Deserialize)]
pub enum SinkSourceTag {
    #[serde(rename = "sink_source")]
    SinkSource,
}

#[derive(Debug, Clone, Copy, Deserialize)]
pub enum TorusTag {
    #[serde(rename = "torus_shear")]
    TorusShear,
}

fn default_basin() -> usize {
    4
}

fn default_dxy() -> f64 {
    1.0
}

fn default_grid() -> usize {
    32
}

/// What a stability run probes: a scenario's named set or measure, an
/// explicit set of atoms, or an explicit measure.
#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetSpec {
    Named(String),
    Set(Vec<Value>),
    Measure(Vec<WeightSpec>),
}

#[derive(Debug, Clone, Deserialize)]
pub struct StabilityConfig {
    pub system: SystemSpec,
    #[serde(default = "default_notion")]
    pub notion: String,
    pub target: TargetSpec,
    #[serde(default)]
    pub eps: Option<Vec<f64>>,
    #[serde(default)]
    pub delta: Option<Vec<f64>>,
    #[serde(default)]
    pub horizon: Option<usize>,
    #[serde(default)]
    pub probes_per_cell: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
}

fn default_notion() -> String {
    "lyapunov".into()
}

pub fn parse_stability_config(text: &str) -> Result<StabilityConfig> {
    parse(text)
}

pub fn read_stability_config(path: &Path) -> Result<StabilityConfig> {
    parse_stability_config(&read_text(path)?)
}

/// Atom references for an explicit map or set, resolved against `space`.
pub fn resolve_atoms(space: &FiniteMetricSpace, values: &[Value]) -> Result<Vec<usize>> {
    values.iter().map(|v| resolve_atom(space, v)).collect()
}

pub fn measure_from_weights(space: &Arc<FiniteMetricSpace>, weights: &[WeightSpec]) -> Result<DiscreteMeasure> {
    weights_to_measure(space, weights)
}
