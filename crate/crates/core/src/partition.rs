//! Finite clopen partitions, common refinement, and mesh.

use serde::{Deserialize, Serialize};

use crate::clopen::ClopenSet;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::word::Word;

/// A partition of `ambient` into nonempty, pairwise disjoint clopen cells.
/// Cells are kept sorted by their first antichain word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClopenPartition {
    ambient: ClopenSet,
    cells: Vec<ClopenSet>,
}

impl ClopenPartition {
    /// Validates and normalizes a partition of the union of `cells`.
    pub fn new(cells: Vec<ClopenSet>) -> Result<Self> {
        let ambient = ClopenSet::canonicalize(cells.iter().flat_map(|c| c.words().iter().cloned()));
        Self::with_ambient(ambient, cells)
    }

    pub fn with_ambient(ambient: ClopenSet, mut cells: Vec<ClopenSet>) -> Result<Self> {
        if cells.iter().any(ClopenSet::is_empty) {
            return Err(Error::NotPartition("empty cell".into()));
        }
        cells.sort_by(|a, b| a.layout_cmp(b));
        // disjointness: the union of all antichains must stay prefix-free and
        // every word must belong to exactly one cell
        let mut all: Vec<&Word> = cells.iter().flat_map(|c| c.words()).collect();
        all.sort();
        for pair in all.windows(2) {
            if pair[0].is_prefix_of(pair[1]) {
                return Err(Error::NotPartition(format!("cells overlap at [{}]", pair[1])));
            }
        }
        let union = ClopenSet::canonicalize(all.into_iter().cloned());
        if union != ambient {
            return Err(Error::NotPartition("cells do not cover the ambient set".into()));
        }
        Ok(ClopenPartition { ambient, cells })
    }

    /// The partition of the whole space into the `2^k` depth-`k` cylinders.
    pub fn cylinders(k: usize) -> Self {
        let cells = Word::all_of_length(k).map(ClopenSet::cylinder).collect();
        ClopenPartition { ambient: ClopenSet::whole(), cells }
    }

    /// `{A, ambient ∖ A}` with empty pieces dropped.
    pub fn binary(ambient: &ClopenSet, a: &ClopenSet) -> Result<Self> {
        let inside = a.intersection(ambient);
        let outside = ambient.difference(a);
        let cells = [inside, outside].into_iter().filter(|c| !c.is_empty()).collect();
        Self::with_ambient(ambient.clone(), cells)
    }

    pub fn ambient(&self) -> &ClopenSet {
        &self.ambient
    }

    pub fn cells(&self) -> &[ClopenSet] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// All nonempty pairwise intersections.
    pub fn common_refinement(&self, other: &ClopenPartition) -> Result<Self> {
        if self.ambient != other.ambient {
            return Err(Error::AmbientMismatch);
        }
        let mut cells = Vec::new();
        for a in &self.cells {
            for b in &other.cells {
                let c = a.intersection(b);
                if !c.is_empty() {
                    cells.push(c);
                }
            }
        }
        cells.sort_by(|a, b| a.layout_cmp(b));
        Ok(ClopenPartition { ambient: self.ambient.clone(), cells })
    }

    /// True if every cell of `self` lies inside exactly one cell of `other`.
    pub fn refines(&self, other: &ClopenPartition) -> bool {
        self.ambient == other.ambient
            && self.cells.iter().all(|c| other.cells.iter().filter(|d| c.is_subset(d)).count() == 1)
    }

    /// Index of the cell containing `[u]`, if one does.
    pub fn cell_containing(&self, u: &Word) -> Option<usize> {
        self.cells.iter().position(|c| c.contains_cylinder(u))
    }

    /// Maximum cell diameter.
    pub fn mesh(&self) -> Rational {
        self.cells.iter().map(ClopenSet::diameter).max().unwrap_or_else(|| Rational::from_integer(0.into()))
    }
}

impl<'de> Deserialize<'de> for ClopenPartition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let cells = Vec::<ClopenSet>::deserialize(d)?;
        ClopenPartition::new(cells).map_err(serde::de::Error::custom)
    }
}
