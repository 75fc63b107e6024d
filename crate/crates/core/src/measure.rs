//! Finitely supported measures with exact rational weights.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::rational::RationalWeight;
use crate::space::FiniteMetricSpace;

/// A nonnegative measure on a [`FiniteMetricSpace`] with finitely many atoms.
///
/// Zero-weight atoms are never stored, so the key set is exactly the support.
#[derive(Clone)]
pub struct DiscreteMeasure {
    space: Arc<FiniteMetricSpace>,
    weights: BTreeMap<usize, RationalWeight>,
    total: RationalWeight,
}

pub fn same_space(a: &Arc<FiniteMetricSpace>, b: &Arc<FiniteMetricSpace>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Builds a measure from `(atom, weight)` pairs. Duplicates are summed and
/// zero weights dropped.
pub fn make_measure<I>(space: &Arc<FiniteMetricSpace>, pairs: I) -> Result<DiscreteMeasure>
where
    I: IntoIterator<Item = (usize, RationalWeight)>,
{
    let mut weights: BTreeMap<usize, RationalWeight> = BTreeMap::new();
    for (atom, w) in pairs {
        if atom >= space.len() {
            return Err(Error::UnknownAtom(atom.to_string()));
        }
        if w.is_negative() {
            return Err(Error::Invalid(format!("negative weight {w} on atom {atom}")));
        }
        *weights.entry(atom).or_default() += w;
    }
    Ok(DiscreteMeasure::from_map(space.clone(), weights))
}

impl DiscreteMeasure {
    fn from_map(space: Arc<FiniteMetricSpace>, mut weights: BTreeMap<usize, RationalWeight>) -> Self {
        weights.retain(|_, w| !w.is_zero());
        let total = weights.values().sum();
        DiscreteMeasure { space, weights, total }
    }

    pub fn zero(space: &Arc<FiniteMetricSpace>) -> Self {
        Self::from_map(space.clone(), BTreeMap::new())
    }

    pub fn point_mass(space: &Arc<FiniteMetricSpace>, x: usize) -> Result<Self> {
        make_measure(space, [(x, RationalWeight::one())])
    }

    /// Builds a measure from `(label, weight)` pairs.
    pub fn from_labels<'a, I>(space: &Arc<FiniteMetricSpace>, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, RationalWeight)>,
    {
        let pairs = pairs
            .into_iter()
            .map(|(l, w)| Ok((space.index_of(l)?, w)))
            .collect::<Result<Vec<_>>>()?;
        make_measure(space, pairs)
    }

    /// Uniform probability measure on the given atoms.
    pub fn uniform(space: &Arc<FiniteMetricSpace>, atoms: &[usize]) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::EmptySet);
        }
        let w = RationalWeight::ratio(1, atoms.len() as i64);
        make_measure(space, atoms.iter().map(|&a| (a, w.clone())))
    }

    pub fn space(&self) -> &Arc<FiniteMetricSpace> {
        &self.space
    }

    pub fn weights(&self) -> &BTreeMap<usize, RationalWeight> {
        &self.weights
    }

    pub fn weight(&self, atom: usize) -> RationalWeight {
        self.weights.get(&atom).cloned().unwrap_or_default()
    }

    pub fn total_mass(&self) -> &RationalWeight {
        &self.total
    }

    pub fn is_probability(&self) -> bool {
        self.total == RationalWeight::one()
    }

    pub fn ensure_probability(&self) -> Result<()> {
        if self.is_probability() {
            Ok(())
        } else {
            Err(Error::NotProbability(self.total.to_string()))
        }
    }

    /// Atoms with positive weight, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.weights.keys().copied().collect()
    }

    pub fn support_set(&self) -> BTreeSet<usize> {
        self.weights.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn mass_of<'a, I: IntoIterator<Item = &'a usize>>(&self, atoms: I) -> RationalWeight {
        atoms.into_iter().map(|a| self.weight(*a)).sum()
    }

    /// `ξ | A`: the restriction to a set of atoms.
    pub fn restrict(&self, keep: impl Fn(usize) -> bool) -> Self {
        let weights = self
            .weights
            .iter()
            .filter(|(a, _)| keep(**a))
            .map(|(a, w)| (*a, w.clone()))
            .collect();
        Self::from_map(self.space.clone(), weights)
    }

    pub fn scale(&self, factor: &RationalWeight) -> Self {
        let weights = self.weights.iter().map(|(a, w)| (*a, w * factor)).collect();
        Self::from_map(self.space.clone(), weights)
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        self.check_space(other)?;
        let mut weights = self.weights.clone();
        for (a, w) in &other.weights {
            *weights.entry(*a).or_default() += w;
        }
        Ok(Self::from_map(self.space.clone(), weights))
    }

    /// `self − other`; fails if any atom would go negative.
    pub fn minus(&self, other: &Self) -> Result<Self> {
        self.check_space(other)?;
        let mut weights = self.weights.clone();
        for (a, w) in &other.weights {
            let slot = weights.entry(*a).or_default();
            *slot -= w;
            if slot.is_negative() {
                return Err(Error::Invalid(format!("subtraction leaves negative mass on atom {a}")));
            }
        }
        Ok(Self::from_map(self.space.clone(), weights))
    }

    pub fn check_space(&self, other: &Self) -> Result<()> {
        if same_space(&self.space, &other.space) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    /// `f♯μ`: moves the mass of each atom to its image under `map`.
    pub fn pushforward(&self, map: &[usize]) -> Result<Self> {
        if map.len() != self.space.len() {
            return Err(Error::Invalid(format!(
                "map has {} entries for a space of {} points",
                map.len(),
                self.space.len()
            )));
        }
        let mut weights: BTreeMap<usize, RationalWeight> = BTreeMap::new();
        for (a, w) in &self.weights {
            let image = map[*a];
            if image >= self.space.len() {
                return Err(Error::UnknownAtom(image.to_string()));
            }
            *weights.entry(image).or_default() += w;
        }
        Ok(Self::from_map(self.space.clone(), weights))
    }
}

pub fn support(mu: &DiscreteMeasure) -> Vec<usize> {
    mu.support()
}

pub fn pushforward(mu: &DiscreteMeasure, map: &[usize]) -> Result<DiscreteMeasure> {
    mu.pushforward(map)
}

impl PartialEq for DiscreteMeasure {
    fn eq(&self, other: &Self) -> bool {
        same_space(&self.space, &other.space) && self.weights == other.weights
    }
}

impl Eq for DiscreteMeasure {}

impl fmt::Debug for DiscreteMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for DiscreteMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, (a, w)) in self.weights.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}: {}", self.space.label(*a), w)?;
        }
        write!(f, "}}")
    }
}
