use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FockState, OccupationVector};
use crate::graph::{Graph, Mode, Multiset, Vertex};

/// Diagonal (occupation-dependent) phase operators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DefectOperator {
    /// `exp(i φ n_a n_b)`: with single occupancy, phase `φ` exactly when both
    /// modes are occupied.
    Cphase { a: Mode, b: Mode, phase: f64 },
    /// Phase `φ` on every term whose walker positions include `positions`
    /// (as a multiset). With as many walkers as components this is a phase
    /// defect on one virtual-graph vertex.
    PositionPhase { positions: Multiset, phase: f64 },
    /// Phase `φ · n(n-1)/2` where `n` walkers sit at `position`.
    Kerr { position: Vertex, phase: f64 },
}

impl DefectOperator {
    pub fn validate(&self, g: &Graph) -> Result<()> {
        match self {
            DefectOperator::Cphase { a, b, .. } => {
                g.mode_index(*a)?;
                g.mode_index(*b)?;
                if a == b {
                    return Err(Error::Validation(format!(
                        "cphase needs two distinct modes, got {a} twice"
                    )));
                }
            }
            DefectOperator::PositionPhase { positions, .. } => {
                if positions.is_empty() {
                    return Err(Error::Validation("position phase with no positions".into()));
                }
                if let Some(&x) = positions
                    .as_slice()
                    .iter()
                    .find(|&&x| x >= g.vertex_count())
                {
                    return Err(Error::lookup("vertex", x));
                }
            }
            DefectOperator::Kerr { position, .. } => {
                if *position >= g.vertex_count() {
                    return Err(Error::lookup("vertex", position));
                }
            }
        }
        Ok(())
    }

    pub(crate) fn resolve(&self, g: &Graph) -> Result<Resolved> {
        self.validate(g)?;
        Ok(match self {
            DefectOperator::Cphase { a, b, phase } => Resolved::Cphase {
                a: g.mode_index(*a)?,
                b: g.mode_index(*b)?,
                phase: *phase,
            },
            DefectOperator::PositionPhase { positions, phase } => Resolved::PositionPhase {
                positions: positions.clone(),
                phase: *phase,
                mode_position: g.modes().map(|m| m.position).collect(),
            },
            DefectOperator::Kerr { position, phase } => Resolved::Kerr {
                bundle: g.bundle(*position),
                phase: *phase,
            },
        })
    }
}

pub(crate) enum Resolved {
    Cphase {
        a: usize,
        b: usize,
        phase: f64,
    },
    PositionPhase {
        positions: Multiset,
        phase: f64,
        mode_position: Vec<Vertex>,
    },
    Kerr {
        bundle: std::ops::Range<usize>,
        phase: f64,
    },
}

impl Resolved {
    fn phase(&self, key: &OccupationVector) -> f64 {
        match self {
            Resolved::Cphase { a, b, phase } => {
                phase * f64::from(key.count(*a)) * f64::from(key.count(*b))
            }
            Resolved::PositionPhase {
                positions,
                phase,
                mode_position,
            } => {
                let here = Multiset::new(key.bosons().map(|m| mode_position[m]).collect());
                if here.contains_all(positions) {
                    *phase
                } else {
                    0.0
                }
            }
            Resolved::Kerr { bundle, phase } => {
                let n = key.bosons().filter(|m| bundle.contains(m)).count() as f64;
                phase * n * (n - 1.0) / 2.0
            }
        }
    }
}

pub(crate) fn apply_all(state: &FockState, defects: &[Resolved]) -> FockState {
    if defects.is_empty() {
        return state.clone();
    }
    state.apply_diagonal_phase(|k| defects.iter().map(|d| d.phase(k)).sum())
}
