//! Linear-optics networks and their relation to quantum walks.
//!
//! An [`OpticalNetwork`] is an ordered list of two-mode beamsplitters,
//! single-mode phase shifters, and CPHASE gates over `M` labelled modes.
//! Beamsplitters and phases compose into a single-particle mode map; CPHASE
//! gates are diagonal in the Fock basis and only act at the multi-photon level.

mod commute;
mod compile;
mod reck;
mod serial;

pub use commute::{
    check_commutation, hoist_cphases, is_swap_symmetric, Commutation, CommutationRule,
    HoistOutcome, REWRITE_TOL,
};
pub use compile::{
    compile_network_to_walk, compile_walk_to_network, padded_mode_map_distance, NetToWalkOptions,
    NetworkWalk, RoutingOp, RoutingPlan, HUB_POSITION,
};
pub use reck::{reck_decompose, RECK_INPUT_TOL};
pub use serial::{ElementRecord, NetworkDocument, NETWORK_SCHEMA_VERSION};

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{FockState, ModeUnitary, OccupationVector};
use crate::linalg::{self, Matrix, ZERO};

/// Entries this small count as zero when classifying beamsplitter blocks.
const STRUCTURE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    /// `a_i† -> B00 a_i† + B01 a_j†`, `a_j† -> B10 a_i† + B11 a_j†`.
    Beamsplitter {
        modes: (usize, usize),
        block: Matrix,
    },
    /// `a_i† -> e^{iθ} a_i†`.
    Phase { mode: usize, phase: f64 },
    /// `exp(iθ n_i n_j)`.
    Cphase { modes: (usize, usize), phase: f64 },
}

impl Element {
    pub fn beamsplitter(i: usize, j: usize, block: Matrix) -> Self {
        Element::Beamsplitter {
            modes: (i, j),
            block,
        }
    }

    pub fn swap(i: usize, j: usize) -> Self {
        Element::beamsplitter(i, j, linalg::swap_block())
    }

    pub fn phase(mode: usize, phase: f64) -> Self {
        Element::Phase { mode, phase }
    }

    pub fn cphase(i: usize, j: usize, phase: f64) -> Self {
        Element::Cphase {
            modes: (i, j),
            phase,
        }
    }

    pub fn support(&self) -> Vec<usize> {
        match self {
            Element::Beamsplitter { modes: (i, j), .. } | Element::Cphase { modes: (i, j), .. } => {
                vec![*i, *j]
            }
            Element::Phase { mode, .. } => vec![*mode],
        }
    }

    pub fn is_cphase(&self) -> bool {
        matches!(self, Element::Cphase { .. })
    }

    /// Diagonal in the Fock basis.
    pub fn is_diagonal(&self) -> bool {
        match self {
            Element::Beamsplitter { block, .. } => {
                block[[0, 1]].norm() <= STRUCTURE_TOL && block[[1, 0]].norm() <= STRUCTURE_TOL
            }
            _ => true,
        }
    }

    /// A beamsplitter whose block is exactly the two-mode swap.
    pub fn is_swap(&self) -> bool {
        match self {
            Element::Beamsplitter { block, .. } => {
                linalg::max_abs_diff(block, &linalg::swap_block()) <= STRUCTURE_TOL
            }
            _ => false,
        }
    }

    /// Same operation with every mode `m` renamed to `map(m)`.
    pub fn relabeled(&self, map: impl Fn(usize) -> usize) -> Element {
        match self {
            Element::Beamsplitter {
                modes: (i, j),
                block,
            } => Element::Beamsplitter {
                modes: (map(*i), map(*j)),
                block: block.clone(),
            },
            Element::Phase { mode, phase } => Element::Phase {
                mode: map(*mode),
                phase: *phase,
            },
            Element::Cphase {
                modes: (i, j),
                phase,
            } => Element::Cphase {
                modes: (map(*i), map(*j)),
                phase: *phase,
            },
        }
    }

    /// Beamsplitters listed with ascending modes; the block is conjugated by
    /// the swap when the order flips.
    pub fn canonical(&self) -> Element {
        match self {
            Element::Beamsplitter {
                modes: (i, j),
                block,
            } if i > j => {
                let x = linalg::swap_block();
                Element::Beamsplitter {
                    modes: (*j, *i),
                    block: x.dot(block).dot(&x),
                }
            }
            Element::Cphase {
                modes: (i, j),
                phase,
            } if i > j => Element::Cphase {
                modes: (*j, *i),
                phase: *phase,
            },
            other => other.clone(),
        }
    }

    fn validate(&self, mode_count: usize) -> Result<()> {
        if let Some(&m) = self.support().iter().find(|&&m| m >= mode_count) {
            return Err(Error::lookup(
                "mode index",
                format!("{m} in network over {mode_count} modes"),
            ));
        }
        match self {
            Element::Beamsplitter {
                modes: (i, j),
                block,
            } => {
                if i == j {
                    return Err(Error::Validation(format!("beamsplitter on mode {i} twice")));
                }
                if block.dim() != (2, 2) {
                    return Err(Error::Validation(format!(
                        "beamsplitter block is {:?}, expected 2x2",
                        block.dim()
                    )));
                }
                linalg::ensure_unitary(
                    block,
                    linalg::UNITARY_TOL,
                    &format!("beamsplitter on ({i},{j})"),
                )
            }
            Element::Cphase { modes: (i, j), .. } if i == j => {
                Err(Error::Validation(format!("cphase on mode {i} twice")))
            }
            _ => Ok(()),
        }
    }

    /// Mode map of a linear element over `mode_count` modes.
    pub fn mode_map(&self, mode_count: usize) -> Result<Matrix> {
        match self {
            Element::Beamsplitter {
                modes: (i, j),
                block,
            } => Ok(linalg::embed(block, &[*i, *j], mode_count)),
            Element::Phase { mode, phase } => {
                let mut m = linalg::identity(mode_count);
                m[[*mode, *mode]] = Complex64::from_polar(1.0, *phase);
                Ok(m)
            }
            Element::Cphase { .. } => Err(Error::Unsupported(
                "cphase has no single-particle mode map".into(),
            )),
        }
    }

    pub fn apply(&self, state: &FockState) -> Result<FockState> {
        match self {
            Element::Beamsplitter {
                modes: (i, j),
                block,
            } => state.apply_mode_unitary(&ModeUnitary::new(vec![*i, *j], block.clone())?),
            Element::Phase { mode, phase } => {
                let (m, p) = (*mode, *phase);
                Ok(state.apply_diagonal_phase(|k| p * f64::from(k.count(m))))
            }
            Element::Cphase {
                modes: (i, j),
                phase,
            } => {
                let (i, j, p) = (*i, *j, *phase);
                Ok(state
                    .apply_diagonal_phase(|k| p * f64::from(k.count(i)) * f64::from(k.count(j))))
            }
        }
    }
}

/// True when `theta` is π modulo 2π.
pub(crate) fn is_pi(theta: f64) -> bool {
    let d = (theta - PI).rem_euclid(2.0 * PI);
    d <= STRUCTURE_TOL || 2.0 * PI - d <= STRUCTURE_TOL
}

#[derive(Debug, Clone, PartialEq)]
pub struct OpticalNetwork {
    mode_count: usize,
    elements: Vec<Element>,
}

impl OpticalNetwork {
    pub fn new(mode_count: usize, elements: Vec<Element>) -> Result<Self> {
        for (k, e) in elements.iter().enumerate() {
            e.validate(mode_count)
                .map_err(|err| Error::Validation(format!("element {k}: {err}")))?;
        }
        Ok(OpticalNetwork {
            mode_count,
            elements,
        })
    }

    pub fn empty(mode_count: usize) -> Self {
        OpticalNetwork {
            mode_count,
            elements: Vec::new(),
        }
    }

    pub fn push(&mut self, element: Element) -> Result<()> {
        element.validate(self.mode_count)?;
        self.elements.push(element);
        Ok(())
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn cphase_count(&self) -> usize {
        self.elements.iter().filter(|e| e.is_cphase()).count()
    }

    pub fn beamsplitter_count(&self) -> usize {
        self.elements
            .iter()
            .filter(|e| matches!(e, Element::Beamsplitter { .. }))
            .count()
    }

    /// Composed single-particle mode map, in application order.
    pub fn mode_map(&self) -> Result<Matrix> {
        let mut total = linalg::identity(self.mode_count);
        for e in &self.elements {
            total = total.dot(&e.mode_map(self.mode_count)?);
        }
        Ok(total)
    }

    pub fn apply(&self, state: &FockState) -> Result<FockState> {
        if state.mode_count() != self.mode_count {
            return Err(Error::Validation(format!(
                "state over {} modes, network over {}",
                state.mode_count(),
                self.mode_count
            )));
        }
        self.elements
            .iter()
            .try_fold(state.clone(), |s, e| e.apply(&s))
    }

    /// This network followed by `other`.
    pub fn then(&self, other: &OpticalNetwork) -> Result<OpticalNetwork> {
        if other.mode_count != self.mode_count {
            return Err(Error::Validation(
                "concatenating networks of different size".into(),
            ));
        }
        let mut elements = self.elements.clone();
        elements.extend(other.elements.iter().cloned());
        Ok(OpticalNetwork {
            mode_count: self.mode_count,
            elements,
        })
    }
}

/// All occupation vectors with `n` bosons over `mode_count` modes.
pub(crate) fn basis_states(mode_count: usize, n: usize) -> Vec<OccupationVector> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(
        start: usize,
        m: usize,
        n: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<OccupationVector>,
    ) {
        if cur.len() == n {
            out.push(OccupationVector::from_modes(cur.clone()));
            return;
        }
        for x in start..m {
            cur.push(x);
            rec(x, m, n, cur, out);
            cur.pop();
        }
    }
    rec(0, mode_count, n, &mut cur, &mut out);
    out
}

/// Largest amplitude difference between two element sequences acting on
/// every Fock basis state with `1..=max_bosons` bosons over their joint
/// support.
pub fn operator_distance(a: &[Element], b: &[Element], max_bosons: usize) -> Result<f64> {
    let mut support: Vec<usize> = a.iter().chain(b).flat_map(Element::support).collect();
    support.sort_unstable();
    support.dedup();
    let local: BTreeMap<usize, usize> = support.iter().enumerate().map(|(k, &m)| (m, k)).collect();
    let relabel = |seq: &[Element]| -> Vec<Element> {
        seq.iter().map(|e| e.relabeled(|m| local[&m])).collect()
    };
    let m = support.len();
    let net_a = OpticalNetwork::new(m, relabel(a))?;
    let net_b = OpticalNetwork::new(m, relabel(b))?;
    let mut worst: f64 = 0.0;
    for n in 1..=max_bosons {
        for key in basis_states(m, n) {
            let s = FockState::from_terms([(key, Complex64::new(1.0, 0.0))], m)?;
            let out_a = net_a.apply(&s)?;
            let out_b = net_b.apply(&s)?;
            for (k, amp) in out_a.terms() {
                worst = worst.max((amp - out_b.amplitude(k)).norm());
            }
            for (k, amp) in out_b.terms() {
                if out_a.amplitude(k) == ZERO {
                    worst = worst.max(amp.norm());
                }
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{balanced_beamsplitter, hadamard};

    #[test]
    fn validation() {
        assert!(OpticalNetwork::new(3, vec![Element::phase(3, 0.1)]).is_err());
        assert!(OpticalNetwork::new(
            3,
            vec![Element::beamsplitter(1, 1, balanced_beamsplitter())]
        )
        .is_err());
        assert!(OpticalNetwork::new(3, vec![Element::cphase(2, 2, PI)]).is_err());
        let mut bad = balanced_beamsplitter();
        bad[[0, 0]] = Complex64::new(1.0, 0.0);
        assert!(OpticalNetwork::new(3, vec![Element::beamsplitter(0, 1, bad)]).is_err());
    }

    #[test]
    fn canonical_form_is_same_operator() {
        let e = Element::beamsplitter(3, 1, hadamard(2).unwrap());
        let c = e.canonical();
        assert_eq!(c.support(), vec![1, 3]);
        assert!(operator_distance(&[e], &[c], 2).unwrap() < 1e-15);
    }

    #[test]
    fn classification() {
        assert!(Element::swap(0, 1).is_swap());
        assert!(!Element::swap(0, 1).is_diagonal());
        assert!(Element::beamsplitter(0, 1, linalg::identity(2)).is_diagonal());
        assert!(Element::cphase(0, 1, 1.0).is_diagonal());
        assert!(is_pi(PI) && is_pi(-PI) && is_pi(3.0 * PI) && !is_pi(0.0));
    }

    #[test]
    fn mode_map_matches_fock_single_photon() {
        let net = OpticalNetwork::new(
            3,
            vec![
                Element::beamsplitter(0, 2, balanced_beamsplitter()),
                Element::phase(2, 0.7),
                Element::beamsplitter(1, 2, hadamard(2).unwrap()),
            ],
        )
        .unwrap();
        let u = net.mode_map().unwrap();
        for i in 0..3 {
            let out = net.apply(&FockState::create(&[i], 3).unwrap()).unwrap();
            for j in 0..3 {
                let a = out.amplitude(&OccupationVector::from_modes(vec![j]));
                assert!((a - u[[i, j]]).norm() < 1e-15);
            }
        }
    }
}
