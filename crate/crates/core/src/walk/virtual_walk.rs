//! A single walker on the virtual graph.
//!
//! The walker's position is a virtual vertex (multiset of base positions) and
//! its coin is an assignment of base coins to the co-located components: at a
//! position visited `m` times, a size-`m` multiset of that vertex's
//! neighbours. The coin at a virtual vertex is the product of the base coins
//! restricted to that symmetric coin space, with entries given by permanents
//! of the base coin blocks. This code path never touches [`FockState`]; the
//! two are compared in tests.
//!
//! [`FockState`]: crate::fock::FockState

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;

use super::{CoinAssignment, DefectTiming};
use crate::error::{Error, Result};
use crate::fock::{permanent_amplitude, OccupationVector};
use crate::graph::{DefectPattern, Graph, Mode, Multiset, Vertex, VirtualGraph};
use crate::linalg::{Matrix, ZERO};

/// One term of an initial virtual-walker state: the base modes of the `n`
/// walkers and an amplitude.
pub type VirtualConfiguration = (Vec<Mode>, Complex64);

type VirtualMode = Vec<Mode>;

struct CoinBlock {
    states: Vec<VirtualMode>,
    index: HashMap<VirtualMode, usize>,
    matrix: Matrix,
}

/// Runs `steps` steps with a constant coin assignment and returns the
/// probability of each virtual vertex.
pub fn simulate_virtual(
    vg: &VirtualGraph,
    defects: &DefectPattern,
    initial: &[VirtualConfiguration],
    coins: &CoinAssignment,
    steps: usize,
) -> Result<BTreeMap<Multiset, f64>> {
    let schedule = vec![coins.clone(); steps];
    simulate_virtual_with(vg, defects, initial, &schedule, DefectTiming::AfterStep)
}

/// Time-dependent variant: one coin assignment per step.
pub fn simulate_virtual_with(
    vg: &VirtualGraph,
    defects: &DefectPattern,
    initial: &[VirtualConfiguration],
    coin_schedule: &[CoinAssignment],
    timing: DefectTiming,
) -> Result<BTreeMap<Multiset, f64>> {
    let g = vg.base();
    for (key, _) in defects.entries() {
        vg.index_of(key)?;
    }
    for coins in coin_schedule {
        coins.check_graph(g)?;
    }
    let mut state = initial_state(vg, initial)?;
    let mut blocks: HashMap<Multiset, CoinBlock> = HashMap::new();
    for (t, coins) in coin_schedule.iter().enumerate() {
        if t > 0 && coin_schedule[t - 1] != *coins {
            blocks.clear();
        }
        if timing == DefectTiming::BeforeCoin {
            apply_defects(&mut state, defects);
        }
        state = apply_coins(g, coins, &state, &mut blocks)?;
        state = state
            .into_iter()
            .map(|(modes, a)| (step(&modes), a))
            .collect();
        if timing == DefectTiming::AfterStep {
            apply_defects(&mut state, defects);
        }
    }
    let mut dist = BTreeMap::new();
    for (modes, a) in &state {
        *dist.entry(position_of(modes)).or_insert(0.0) += a.norm_sqr();
    }
    Ok(dist)
}

fn initial_state(
    vg: &VirtualGraph,
    initial: &[VirtualConfiguration],
) -> Result<BTreeMap<VirtualMode, Complex64>> {
    let mut state: BTreeMap<VirtualMode, Complex64> = BTreeMap::new();
    for (modes, amp) in initial {
        if modes.len() != vg.walkers() {
            return Err(Error::Validation(format!(
                "initial configuration has {} walkers, virtual graph has {}",
                modes.len(),
                vg.walkers()
            )));
        }
        for &m in modes {
            vg.base().mode_index(m)?;
        }
        let mut key = modes.clone();
        key.sort_unstable();
        *state.entry(key).or_insert(ZERO) += amp;
    }
    let norm = state.values().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::Validation(
            "initial virtual state has zero norm".into(),
        ));
    }
    for a in state.values_mut() {
        *a /= norm;
    }
    Ok(state)
}

fn position_of(modes: &[Mode]) -> Multiset {
    Multiset::new(modes.iter().map(|m| m.position).collect())
}

fn step(modes: &[Mode]) -> VirtualMode {
    let mut out: Vec<Mode> = modes.iter().map(|m| m.stepped()).collect();
    out.sort_unstable();
    out
}

fn apply_defects(state: &mut BTreeMap<VirtualMode, Complex64>, defects: &DefectPattern) {
    if defects.is_empty() {
        return;
    }
    for (modes, a) in state.iter_mut() {
        if let Some(phase) = defects.phase_at(&position_of(modes)) {
            *a *= Complex64::from_polar(1.0, phase);
        }
    }
}

fn apply_coins(
    g: &Graph,
    coins: &CoinAssignment,
    state: &BTreeMap<VirtualMode, Complex64>,
    blocks: &mut HashMap<Multiset, CoinBlock>,
) -> Result<BTreeMap<VirtualMode, Complex64>> {
    let mut by_vertex: BTreeMap<Multiset, Vec<(&VirtualMode, Complex64)>> = BTreeMap::new();
    for (modes, &a) in state {
        by_vertex
            .entry(position_of(modes))
            .or_default()
            .push((modes, a));
    }
    let mut out: BTreeMap<VirtualMode, Complex64> = BTreeMap::new();
    for (vertex, terms) in by_vertex {
        if !blocks.contains_key(&vertex) {
            let block = coin_block(g, coins, &vertex)?;
            blocks.insert(vertex.clone(), block);
        }
        let block = &blocks[&vertex];
        let dim = block.states.len();
        let mut psi = vec![ZERO; dim];
        for (modes, a) in terms {
            psi[block.index[modes]] += a;
        }
        for d in 0..dim {
            let amp: Complex64 = (0..dim).map(|c| psi[c] * block.matrix[[c, d]]).sum();
            if amp != ZERO {
                *out.entry(block.states[d].clone()).or_insert(ZERO) += amp;
            }
        }
    }
    Ok(out)
}

fn multisets_from(items: &[Vertex], size: usize) -> Vec<Vec<Vertex>> {
    if size == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        for mut rest in multisets_from(&items[i..], size - 1) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}

fn coin_block(g: &Graph, coins: &CoinAssignment, vertex: &Multiset) -> Result<CoinBlock> {
    let groups = vertex.groups();
    // per group: list of coin multisets (as coin vertex ids)
    let options: Vec<Vec<Vec<Vertex>>> = groups
        .iter()
        .map(|&(x, m)| multisets_from(g.neighbors(x), m))
        .collect();
    let mut states: Vec<Vec<usize>> = vec![Vec::new()];
    for opts in &options {
        states = states
            .into_iter()
            .flat_map(|s| {
                (0..opts.len()).map(move |i| {
                    let mut next = s.clone();
                    next.push(i);
                    next
                })
            })
            .collect();
    }
    let dim = states.len();
    // slot occupation for each (group, option)
    let occupations: Vec<Vec<OccupationVector>> = groups
        .iter()
        .zip(&options)
        .map(|(&(x, _), opts)| {
            opts.iter()
                .map(|cs| {
                    OccupationVector::from_modes(
                        cs.iter()
                            .map(|&c| g.coin_slot(x, c).expect("neighbour"))
                            .collect(),
                    )
                })
                .collect()
        })
        .collect();
    let mut matrix = Matrix::from_elem((dim, dim), ZERO);
    for (ci, c) in states.iter().enumerate() {
        for (di, d) in states.iter().enumerate() {
            let mut entry = Complex64::new(1.0, 0.0);
            for (k, &(x, _)) in groups.iter().enumerate() {
                entry *= permanent_amplitude(
                    coins.matrix(x),
                    &occupations[k][c[k]],
                    &occupations[k][d[k]],
                )?;
                if entry == ZERO {
                    break;
                }
            }
            matrix[[ci, di]] = entry;
        }
    }
    let modes: Vec<VirtualMode> = states
        .iter()
        .map(|choice| {
            let mut modes = Vec::with_capacity(vertex.len());
            for (k, &(x, _)) in groups.iter().enumerate() {
                modes.extend(options[k][choice[k]].iter().map(|&c| Mode::new(x, c)));
            }
            modes.sort_unstable();
            modes
        })
        .collect();
    let index = modes
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, m)| (m, i))
        .collect();
    Ok(CoinBlock {
        states: modes,
        index,
        matrix,
    })
}
