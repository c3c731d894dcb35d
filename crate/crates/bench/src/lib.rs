//! Fixed workloads shared by the benchmarks, seeded so every run measures
//! the same inputs.

use qwalk_core::graph::{build_line, build_virtual_graph};
use qwalk_core::linalg::random_unitary;
use qwalk_core::walk::{symmetric_walker, walker_state, CoinPreset, VirtualConfiguration};
use qwalk_core::{CoinAssignment, FockState, Graph, Matrix, VirtualGraph};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn seeded_unitary(k: usize, seed: u64) -> Matrix {
    random_unitary(k, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Hadamard line of `v` vertices with `n` symmetric walkers packed around
/// the centre.
pub struct LineWalk {
    pub graph: Graph,
    pub coins: CoinAssignment,
    pub initial: FockState,
}

impl LineWalk {
    pub fn new(v: usize, n: usize) -> Self {
        let graph = build_line(v).expect("line builds");
        let coins =
            CoinAssignment::preset(&graph, CoinPreset::Hadamard).expect("hadamard fits a line");
        let start = v / 2 - n / 2;
        let walkers: Vec<_> = (0..n)
            .map(|i| symmetric_walker(&graph, start + i))
            .collect();
        let initial = walker_state(&graph, &walkers).expect("walkers fit");
        LineWalk {
            graph,
            coins,
            initial,
        }
    }

    /// The same start as a superposition of labelled configurations, for
    /// the virtual-graph simulator.
    pub fn virtual_setup(&self) -> (VirtualGraph, Vec<VirtualConfiguration>) {
        let vg =
            build_virtual_graph(&self.graph, self.initial.walkers()).expect("virtual graph builds");
        let configs = self
            .initial
            .terms()
            .map(|(occ, amp)| (occ.bosons().map(|i| self.graph.mode(i)).collect(), amp))
            .collect();
        (vg, configs)
    }
}
