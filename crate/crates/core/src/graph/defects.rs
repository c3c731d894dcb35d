use std::collections::BTreeMap;

use super::{Multiset, Vertex, VirtualGraph};
use crate::error::{Error, Result};

/// Two requested phases for the same multiset agree if they differ by at most this.
const PHASE_MATCH_TOL: f64 = 1e-12;

/// Phase defects on virtual-graph vertices, keyed by position multiset.
///
/// Because keys are multisets the pattern is symmetric under exchange of
/// walkers by construction.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DefectPattern {
    entries: BTreeMap<Multiset, f64>,
}

impl DefectPattern {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn phase_at(&self, vertex: &Multiset) -> Option<f64> {
        self.entries.get(vertex).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Multiset, f64)> {
        self.entries.iter().map(|(k, &v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Canonicalises and validates a requested defect layout.
pub fn etch_defects(vg: &VirtualGraph, requested: &[(Vec<Vertex>, f64)]) -> Result<DefectPattern> {
    let mut entries: BTreeMap<Multiset, f64> = BTreeMap::new();
    for (positions, phase) in requested {
        if positions.len() != vg.walkers() {
            return Err(Error::Validation(format!(
                "defect position {positions:?} has {} components, virtual graph has {} walkers",
                positions.len(),
                vg.walkers()
            )));
        }
        if let Some(&bad) = positions.iter().find(|&&x| x >= vg.base().vertex_count()) {
            return Err(Error::lookup("vertex", bad));
        }
        let key = Multiset::new(positions.clone());
        match entries.get(&key) {
            Some(&prev) if (prev - *phase).abs() > PHASE_MATCH_TOL => {
                return Err(Error::SymmetryConflict {
                    key: key.to_string(),
                    first: prev,
                    second: *phase,
                });
            }
            Some(_) => {}
            None => {
                entries.insert(key, *phase);
            }
        }
    }
    Ok(DefectPattern { entries })
}
