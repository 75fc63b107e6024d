//! Piecewise-constant maps `[0,1] → X` that push Lebesgue measure onto an
//! atomic measure, and the uniform distance between two such maps.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::measure::{make_measure, same_space, DiscreteMeasure};
use crate::rational::RationalWeight;
use crate::space::FiniteMetricSpace;

/// One piece `[start, end)` mapped to `atom`. The last piece of a
/// representation is closed at 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub start: RationalWeight,
    pub end: RationalWeight,
    pub atom: usize,
}

impl Piece {
    pub fn len(&self) -> RationalWeight {
        &self.end - &self.start
    }
}

#[derive(Debug, Clone)]
pub struct IntervalRepresentation {
    space: Arc<FiniteMetricSpace>,
    pieces: Vec<Piece>,
}

impl IntervalRepresentation {
    /// Lays out `(atom, length)` chunks left to right starting at 0. Zero-length
    /// chunks are skipped; the lengths must sum to 1.
    pub fn from_chunks<I>(space: &Arc<FiniteMetricSpace>, chunks: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, RationalWeight)>,
    {
        let mut pieces = Vec::new();
        let mut cursor = RationalWeight::zero();
        for (atom, len) in chunks {
            if atom >= space.len() {
                return Err(Error::UnknownAtom(atom.to_string()));
            }
            if len.is_negative() {
                return Err(Error::Invalid("negative piece length".into()));
            }
            if len.is_zero() {
                continue;
            }
            let end = &cursor + &len;
            pieces.push(Piece {
                start: cursor,
                end: end.clone(),
                atom,
            });
            cursor = end;
        }
        if cursor != RationalWeight::one() {
            return Err(Error::NotProbability(cursor.to_string()));
        }
        Ok(IntervalRepresentation {
            space: space.clone(),
            pieces,
        })
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn space(&self) -> &Arc<FiniteMetricSpace> {
        &self.space
    }

    /// Value of the map at `a ∈ [0,1]`.
    pub fn eval(&self, a: &RationalWeight) -> Option<usize> {
        let last = self.pieces.len().checked_sub(1)?;
        self.pieces
            .iter()
            .enumerate()
            .find(|(k, p)| &p.start <= a && (a < &p.end || (*k == last && a == &p.end)))
            .map(|(_, p)| p.atom)
    }

    /// The measure `f♯λ`.
    pub fn pushforward_lebesgue(&self) -> DiscreteMeasure {
        make_measure(&self.space, self.pieces.iter().map(|p| (p.atom, p.len())))
            .expect("pieces reference atoms of their own space")
    }
}

/// Canonical representation: atoms in ascending index order, each occupying
/// an interval of length equal to its weight.
pub fn interval_representation(mu: &DiscreteMeasure) -> Result<IntervalRepresentation> {
    mu.ensure_probability()?;
    IntervalRepresentation::from_chunks(mu.space(), mu.weights().iter().map(|(a, w)| (*a, w.clone())))
}

/// `sup_{a ∈ [0,1]} d(f(a), g(a))` evaluated on the common refinement of the
/// two partitions.
pub fn sup_distance(f: &IntervalRepresentation, g: &IntervalRepresentation) -> Result<f64> {
    if !same_space(&f.space, &g.space) {
        return Err(Error::SpaceMismatch);
    }
    let (mut i, mut j) = (0, 0);
    let mut worst = 0.0_f64;
    while i < f.pieces.len() && j < g.pieces.len() {
        let (p, q) = (&f.pieces[i], &g.pieces[j]);
        // overlap has positive length by construction of the two-pointer walk
        worst = worst.max(f.space.d(p.atom, q.atom));
        match p.end.cmp(&q.end) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    Ok(worst)
}
