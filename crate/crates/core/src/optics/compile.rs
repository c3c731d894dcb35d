//! Compilation between walk schedules and optical networks.
//!
//! Walk to network: each coin becomes a triangular beamsplitter mesh on its
//! bundle of modes and each step becomes the swaps `(x,j) <-> (j,x)`.
//!
//! Network to walk: modes are laid out on the complete graph with self-loops
//! on `N = ⌈√M⌉` vertices, network mode `m` becoming walk mode
//! `(m / N, m % N)`. A beamsplitter between modes at different positions is
//! routed through the hub position 0: permutation coins move both modes to
//! coin value 0, a step brings them to the hub bundle as coins `x1` and `x2`,
//! a coin there applies the beamsplitter, and the step and permutations are
//! repeated to route them back.

use std::collections::BTreeSet;

use num_complex::Complex64;

use super::{reck_decompose, Element, OpticalNetwork};
use crate::error::{Error, Result};
use crate::graph::{build_complete_with_loops, Graph, Mode, Vertex};
use crate::linalg::{self, Matrix};
use crate::walk::{CoinAssignment, DefectOperator, DefectTiming, WalkSchedule, WalkStep};

/// Position every routed beamsplitter passes through. Coin value 0 at each
/// position is the slot used to reach it.
pub const HUB_POSITION: Vertex = 0;

/// Largest complete graph the network compiler will build.
const MAX_EMBED_VERTICES: usize = 64;

pub fn compile_walk_to_network(g: &Graph, schedule: &WalkSchedule) -> Result<OpticalNetwork> {
    schedule.validate(g)?;
    let perm = g.step_permutation();
    let mut elements = Vec::new();
    for step in &schedule.steps {
        let mut defects = Vec::new();
        for d in &step.defects {
            defects.extend(defect_elements(g, d)?);
        }
        if schedule.defect_timing == DefectTiming::BeforeCoin {
            elements.append(&mut defects);
        }
        for x in 0..g.vertex_count() {
            let coin = step.coins.matrix(x);
            if coin.nrows() == 0
                || linalg::max_abs_diff(coin, &linalg::identity(coin.nrows())) == 0.0
            {
                continue;
            }
            let offset = g.bundle(x).start;
            let mesh = reck_decompose(coin)?;
            elements.extend(mesh.elements().iter().map(|e| e.relabeled(|s| offset + s)));
        }
        if step.shift {
            for (i, &j) in perm.iter().enumerate() {
                if j > i {
                    elements.push(Element::swap(i, j));
                }
            }
        }
        elements.append(&mut defects);
    }
    OpticalNetwork::new(g.mode_count(), elements)
}

fn defect_elements(g: &Graph, d: &DefectOperator) -> Result<Vec<Element>> {
    match d {
        DefectOperator::Cphase { a, b, phase } => Ok(vec![Element::cphase(
            g.mode_index(*a)?,
            g.mode_index(*b)?,
            *phase,
        )]),
        // exact for two walkers: n(x1) n(x2) is 1 iff both positions are occupied
        DefectOperator::PositionPhase { positions, phase }
            if positions.len() == 2 && positions.all_distinct() =>
        {
            let (x1, x2) = (positions.as_slice()[0], positions.as_slice()[1]);
            let mut out = Vec::new();
            for a in g.bundle(x1) {
                for b in g.bundle(x2) {
                    out.push(Element::cphase(a, b, *phase));
                }
            }
            Ok(out)
        }
        other => Err(Error::Unsupported(format!(
            "defect {other:?} has no cphase/phase network form"
        ))),
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct NetToWalkOptions {
    /// Share one coin/step round between consecutive elements on disjoint
    /// positions.
    pub batch_parallel: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RoutingOp {
    /// Coin at `position` exchanging coin values `coins.0` and `coins.1`.
    Permutation {
        position: Vertex,
        coins: (Vertex, Vertex),
    },
    Step,
    /// Coin at `position` applying `block` to coin values `coins`.
    Beamsplitter {
        position: Vertex,
        coins: (Vertex, Vertex),
        block: Matrix,
    },
}

/// A beamsplitter between walk modes on different positions, realised as
/// `P P S B S P P` (written as an operator product; it reads the same in
/// application order).
#[derive(Debug, Clone, PartialEq)]
pub struct RoutingPlan {
    pub target: (Mode, Mode),
    pub block: Matrix,
    pub operators: Vec<RoutingOp>,
}

impl RoutingPlan {
    pub fn new(a: Mode, b: Mode, block: Matrix) -> Self {
        let perm = |m: Mode| RoutingOp::Permutation {
            position: m.position,
            coins: (HUB_POSITION, m.coin),
        };
        let operators = vec![
            perm(a),
            perm(b),
            RoutingOp::Step,
            RoutingOp::Beamsplitter {
                position: HUB_POSITION,
                coins: (a.position, b.position),
                block: block.clone(),
            },
            RoutingOp::Step,
            perm(a),
            perm(b),
        ];
        RoutingPlan {
            target: (a, b),
            block,
            operators,
        }
    }

    /// The sequence reads the same backwards around the central beamsplitter,
    /// with runs of permutation coins (which commute) compared as sets.
    pub fn is_palindromic(&self) -> bool {
        let mut runs: Vec<Vec<String>> = Vec::new();
        let mut in_perm_run = false;
        for op in &self.operators {
            let label = format!("{op:?}");
            let is_perm = matches!(op, RoutingOp::Permutation { .. });
            if is_perm && in_perm_run {
                let run = runs.last_mut().expect("run open");
                run.push(label);
                run.sort();
            } else {
                runs.push(vec![label]);
            }
            in_perm_run = is_perm;
        }
        let mid = runs.len() / 2;
        runs.len() % 2 == 1
            && matches!(
                self.operators.get(self.operators.len() / 2),
                Some(RoutingOp::Beamsplitter { .. })
            )
            && (0..mid).all(|i| runs[i] == runs[runs.len() - 1 - i])
    }
}

/// Result of [`compile_network_to_walk`].
#[derive(Debug, Clone)]
pub struct NetworkWalk {
    pub graph: Graph,
    pub schedule: WalkSchedule,
    /// Modes of the source network; walk modes beyond this are padding.
    pub network_modes: usize,
    pub plans: Vec<RoutingPlan>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RoundKind {
    Routed,
    Local,
    Cphase,
}

pub fn compile_network_to_walk(
    net: &OpticalNetwork,
    options: NetToWalkOptions,
) -> Result<NetworkWalk> {
    let m = net.mode_count();
    if m == 0 {
        return Err(Error::Sizing {
            modes: 0,
            reason: "network has no modes".into(),
        });
    }
    let n = (1..).find(|k: &usize| k * k >= m).expect("finite");
    if n > MAX_EMBED_VERTICES {
        return Err(Error::Sizing {
            modes: m,
            reason: format!(
                "needs a complete graph on {n} vertices, limit is {MAX_EMBED_VERTICES}"
            ),
        });
    }
    let g = build_complete_with_loops(n)?;

    let mut rounds: Vec<(RoundKind, Vec<&Element>)> = Vec::new();
    let mut round_positions: BTreeSet<Vertex> = BTreeSet::new();
    for e in net.elements() {
        let (kind, positions) = classify(&g, e);
        let joins = options.batch_parallel
            && rounds.last().is_some_and(|(k, _)| *k == kind)
            && (kind == RoundKind::Cphase || positions.is_disjoint(&round_positions));
        if joins {
            rounds.last_mut().expect("checked").1.push(e);
            round_positions.extend(positions);
        } else {
            rounds.push((kind, vec![e]));
            round_positions = positions;
        }
    }

    let mut steps = Vec::new();
    let mut plans = Vec::new();
    for (kind, elements) in rounds {
        match kind {
            RoundKind::Routed => {
                let mut route = identity_coins(&g);
                let mut hub = identity_coins(&g);
                for e in elements {
                    let Element::Beamsplitter {
                        modes: (i, j),
                        block,
                    } = e
                    else {
                        unreachable!("routed rounds hold beamsplitters")
                    };
                    let (a, b) = (g.mode(*i), g.mode(*j));
                    for t in [a, b] {
                        transpose_slots(&mut route[t.position], HUB_POSITION, t.coin);
                    }
                    place_block(&mut hub[HUB_POSITION], (a.position, b.position), block);
                    plans.push(RoutingPlan::new(a, b, block.clone()));
                }
                let route = CoinAssignment::new(&g, route)?;
                steps.push(WalkStep::new(route.clone()));
                steps.push(WalkStep::new(CoinAssignment::new(&g, hub)?));
                steps.push(WalkStep::new(route).coin_only());
            }
            RoundKind::Local => {
                let mut coins = identity_coins(&g);
                for e in elements {
                    match e {
                        Element::Beamsplitter {
                            modes: (i, j),
                            block,
                        } => {
                            let (a, b) = (g.mode(*i), g.mode(*j));
                            place_block(&mut coins[a.position], (a.coin, b.coin), block);
                        }
                        Element::Phase { mode, phase } => {
                            let a = g.mode(*mode);
                            coins[a.position][[a.coin, a.coin]] *=
                                Complex64::from_polar(1.0, *phase);
                        }
                        Element::Cphase { .. } => unreachable!("cphase rounds are separate"),
                    }
                }
                steps.push(WalkStep::new(CoinAssignment::new(&g, coins)?).coin_only());
            }
            RoundKind::Cphase => {
                let defects = elements
                    .into_iter()
                    .map(|e| match e {
                        Element::Cphase {
                            modes: (i, j),
                            phase,
                        } => DefectOperator::Cphase {
                            a: g.mode(*i),
                            b: g.mode(*j),
                            phase: *phase,
                        },
                        _ => unreachable!("cphase round"),
                    })
                    .collect();
                let coins = CoinAssignment::new(&g, identity_coins(&g))?;
                steps.push(WalkStep::new(coins).coin_only().with_defects(defects));
            }
        }
    }
    Ok(NetworkWalk {
        graph: g,
        schedule: WalkSchedule::new(steps),
        network_modes: m,
        plans,
    })
}

fn classify(g: &Graph, e: &Element) -> (RoundKind, BTreeSet<Vertex>) {
    match e {
        Element::Beamsplitter { modes: (i, j), .. } => {
            let (a, b) = (g.mode(*i), g.mode(*j));
            if a.position == b.position {
                (RoundKind::Local, BTreeSet::from([a.position]))
            } else {
                (RoundKind::Routed, BTreeSet::from([a.position, b.position]))
            }
        }
        Element::Phase { mode, .. } => (RoundKind::Local, BTreeSet::from([g.mode(*mode).position])),
        Element::Cphase { .. } => (RoundKind::Cphase, BTreeSet::new()),
    }
}

fn identity_coins(g: &Graph) -> Vec<Matrix> {
    (0..g.vertex_count())
        .map(|x| linalg::identity(g.degree(x)))
        .collect()
}

fn transpose_slots(m: &mut Matrix, a: usize, b: usize) {
    if a != b {
        let mut perm: Vec<usize> = (0..m.nrows()).collect();
        perm.swap(a, b);
        *m = m.dot(&linalg::permutation_matrix(&perm));
    }
}

fn place_block(m: &mut Matrix, slots: (usize, usize), block: &Matrix) {
    let full = linalg::embed(block, &[slots.0, slots.1], m.nrows());
    *m = m.dot(&full);
}

/// Distance between an `M x M` mode map and a larger one that should act as
/// it on the first `M` modes and as the identity on the rest.
pub fn padded_mode_map_distance(small: &Matrix, big: &Matrix) -> f64 {
    let support: Vec<usize> = (0..small.nrows()).collect();
    let padded = linalg::embed(small, &support, big.nrows());
    linalg::max_abs_diff(&padded, big)
}
