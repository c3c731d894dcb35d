//! Moving CPHASE gates towards the start of a network.
//!
//! Two rewrite rules are applied, each one checked as an operator identity on
//! the two-boson Fock space before it is accepted:
//!
//! * π-phase: a π phase on one mode of a beamsplitter passes through it and
//!   the block's off-diagonal entries change sign (`Z B Z`).
//! * swap: an element passes through a swap of modes `i, j` and has `i` and
//!   `j` exchanged in its targets.
//!
//! Elements on disjoint modes, and pairs of diagonal elements, commute as they
//! stand.

use super::{is_pi, operator_distance, Element, OpticalNetwork};
use crate::linalg::Matrix;

/// Rewrites are accepted when both orderings differ by at most this on the
/// two-boson Fock space.
pub const REWRITE_TOL: f64 = 1e-10;

/// Boson number up to which rewrites are verified.
const VERIFY_BOSONS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommutationRule {
    DisjointSupport,
    Diagonal,
    PiPhase,
    Swap,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Commutation {
    /// `a` then `b` equals `moved` then `passed`.
    Commute {
        rule: CommutationRule,
        moved: Element,
        passed: Element,
    },
    /// No rule applies. `distance` is the largest amplitude difference
    /// between `a, b` and the plain reordering `b, a`.
    Blocked { distance: f64 },
}

/// Tries to move `b` in front of `a`.
pub fn check_commutation(a: &Element, b: &Element) -> Commutation {
    let original = [a.clone(), b.clone()];
    for (rule, candidate) in candidates(a, b) {
        let (moved, passed) = candidate;
        let rewritten = [moved.clone(), passed.clone()];
        if operator_distance(&original, &rewritten, VERIFY_BOSONS).is_ok_and(|d| d <= REWRITE_TOL) {
            return Commutation::Commute {
                rule,
                moved,
                passed,
            };
        }
    }
    let distance = operator_distance(&original, &[b.clone(), a.clone()], VERIFY_BOSONS)
        .unwrap_or(f64::INFINITY);
    Commutation::Blocked { distance }
}

fn candidates(a: &Element, b: &Element) -> Vec<(CommutationRule, (Element, Element))> {
    let mut out = Vec::new();
    let (sa, sb) = (a.support(), b.support());
    if sa.iter().all(|m| !sb.contains(m)) {
        out.push((CommutationRule::DisjointSupport, (b.clone(), a.clone())));
    }
    if a.is_diagonal() && b.is_diagonal() {
        out.push((CommutationRule::Diagonal, (b.clone(), a.clone())));
    }
    match (a, b) {
        (Element::Beamsplitter { modes, block }, Element::Phase { mode, phase })
            if is_pi(*phase) =>
        {
            if let Some(flipped) = pi_conjugate(*modes, block, *mode) {
                out.push((CommutationRule::PiPhase, (b.clone(), flipped)));
            }
        }
        (Element::Phase { mode, phase }, Element::Beamsplitter { modes, block })
            if is_pi(*phase) =>
        {
            if let Some(flipped) = pi_conjugate(*modes, block, *mode) {
                out.push((CommutationRule::PiPhase, (flipped, a.clone())));
            }
        }
        _ => {}
    }
    if let Some((i, j)) = swap_modes(a) {
        out.push((
            CommutationRule::Swap,
            (b.relabeled(|m| exchange(m, i, j)), a.clone()),
        ));
    }
    if let Some((i, j)) = swap_modes(b) {
        out.push((
            CommutationRule::Swap,
            (b.clone(), a.relabeled(|m| exchange(m, i, j))),
        ));
    }
    out
}

fn pi_conjugate(modes: (usize, usize), block: &Matrix, mode: usize) -> Option<Element> {
    if mode != modes.0 && mode != modes.1 {
        return None;
    }
    let mut b = block.clone();
    b[[0, 1]] = -b[[0, 1]];
    b[[1, 0]] = -b[[1, 0]];
    Some(Element::beamsplitter(modes.0, modes.1, b))
}

fn swap_modes(e: &Element) -> Option<(usize, usize)> {
    match e {
        Element::Beamsplitter { modes, .. } if e.is_swap() => Some(*modes),
        _ => None,
    }
}

fn exchange(m: usize, i: usize, j: usize) -> usize {
    if m == i {
        j
    } else if m == j {
        i
    } else {
        m
    }
}

/// True when the block is unchanged by exchanging its two modes, i.e. a swap
/// on both sides passes through it without relabeling.
pub fn is_swap_symmetric(block: &Matrix) -> bool {
    let tol = 1e-12;
    (block[[0, 0]] - block[[1, 1]]).norm() <= tol && (block[[0, 1]] - block[[1, 0]]).norm() <= tol
}

#[derive(Debug, Clone, PartialEq)]
pub enum HoistOutcome {
    /// `prefix` holds only CPHASE gates, `suffix` only linear elements, and
    /// `prefix` then `suffix` is the input circuit.
    Hoisted {
        prefix: OpticalNetwork,
        suffix: OpticalNetwork,
        cphase_count: usize,
    },
    /// The CPHASE at `cphase` could not pass the element at `blocker`
    /// (positions in the partially rewritten circuit).
    Blocked {
        cphase: usize,
        blocker: usize,
        cphase_element: Element,
        blocker_element: Element,
        distance: f64,
    },
}

/// Moves every CPHASE to the front using [`check_commutation`] rewrites.
pub fn hoist_cphases(net: &OpticalNetwork) -> HoistOutcome {
    let mut elements = net.elements().to_vec();
    let mut boundary = 0;
    for idx in 0..elements.len() {
        if !elements[idx].is_cphase() {
            continue;
        }
        let mut pos = idx;
        while pos > boundary {
            match check_commutation(&elements[pos - 1], &elements[pos]) {
                Commutation::Commute { moved, passed, .. } => {
                    elements[pos - 1] = moved;
                    elements[pos] = passed;
                    pos -= 1;
                }
                Commutation::Blocked { distance } => {
                    return HoistOutcome::Blocked {
                        cphase: pos,
                        blocker: pos - 1,
                        cphase_element: elements[pos].clone(),
                        blocker_element: elements[pos - 1].clone(),
                        distance,
                    };
                }
            }
        }
        boundary += 1;
    }
    let suffix = elements.split_off(boundary);
    let m = net.mode_count();
    HoistOutcome::Hoisted {
        cphase_count: elements.len(),
        prefix: OpticalNetwork::new(m, elements).expect("rewrites keep modes in range"),
        suffix: OpticalNetwork::new(m, suffix).expect("rewrites keep modes in range"),
    }
}
