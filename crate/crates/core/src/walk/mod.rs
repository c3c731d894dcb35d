//! Discrete-time evolution of bosonic walkers on a [`Graph`].
//!
//! One schedule step applies the coin at every vertex, then the step operator
//! `w(x,j)† -> w(j,x)†`, then any defect operators. The defect placement can
//! be moved ahead of the coin with [`DefectTiming::BeforeCoin`].

mod coin;
mod defect;
mod measure;
mod virtual_walk;

pub use coin::{CoinAssignment, CoinPreset};
pub use defect::DefectOperator;
pub use measure::{
    classical_line_walk, coincidence_distribution, l1_distance, position_distribution,
    spread_statistics, Spread,
};
pub use virtual_walk::{simulate_virtual, simulate_virtual_with, VirtualConfiguration};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{FockState, SparseRows};
use crate::graph::{Graph, LineDirection, Mode, Vertex};
use crate::linalg::{self, Matrix};

/// Walker count accepted by default; larger runs leave desk scale.
pub const DEFAULT_MAX_WALKERS: usize = 4;
/// Ceiling for any caller-supplied override of the walker cap.
pub const HARD_MAX_WALKERS: usize = 6;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DefectTiming {
    /// coin, step, defect
    #[default]
    AfterStep,
    /// defect, coin, step
    BeforeCoin,
}

#[derive(Debug, Clone)]
pub struct WalkStep {
    pub coins: CoinAssignment,
    pub defects: Vec<DefectOperator>,
    /// Whether the step operator runs after the coin. Compiled schedules end
    /// with a coin-only layer.
    pub shift: bool,
}

impl WalkStep {
    pub fn new(coins: CoinAssignment) -> Self {
        WalkStep {
            coins,
            defects: Vec::new(),
            shift: true,
        }
    }

    pub fn with_defects(mut self, defects: Vec<DefectOperator>) -> Self {
        self.defects = defects;
        self
    }

    pub fn coin_only(mut self) -> Self {
        self.shift = false;
        self
    }
}

#[derive(Debug, Clone, Default)]
pub struct WalkSchedule {
    pub steps: Vec<WalkStep>,
    pub defect_timing: DefectTiming,
}

impl WalkSchedule {
    pub fn new(steps: Vec<WalkStep>) -> Self {
        WalkSchedule {
            steps,
            defect_timing: DefectTiming::AfterStep,
        }
    }

    /// The same coin assignment for `t` steps.
    pub fn repeated(coins: &CoinAssignment, t: usize) -> Self {
        Self::new((0..t).map(|_| WalkStep::new(coins.clone())).collect())
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn has_defects(&self) -> bool {
        self.steps.iter().any(|s| !s.defects.is_empty())
    }

    pub fn validate(&self, g: &Graph) -> Result<()> {
        for (t, step) in self.steps.iter().enumerate() {
            step.coins
                .check_graph(g)
                .map_err(|e| Error::Validation(format!("step {t}: {e}")))?;
            for d in &step.defects {
                d.validate(g)
                    .map_err(|e| Error::Validation(format!("step {t}: {e}")))?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EvolveOptions {
    pub max_walkers: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            max_walkers: DEFAULT_MAX_WALKERS,
        }
    }
}

/// Runs `schedule` on `initial` and returns the final state.
pub fn evolve(g: &Graph, initial: &FockState, schedule: &WalkSchedule) -> Result<FockState> {
    evolve_observed(g, initial, schedule, &EvolveOptions::default(), |_, _| {})
}

/// Like [`evolve`], calling `observe(t, state)` after each completed step
/// (`t` counts from 1).
pub fn evolve_observed(
    g: &Graph,
    initial: &FockState,
    schedule: &WalkSchedule,
    options: &EvolveOptions,
    mut observe: impl FnMut(usize, &FockState),
) -> Result<FockState> {
    let cap = options.max_walkers.min(HARD_MAX_WALKERS);
    if initial.walkers() > cap {
        return Err(Error::Cap {
            what: "walker number",
            requested: initial.walkers(),
            cap,
        });
    }
    if initial.mode_count() != g.mode_count() {
        return Err(Error::Validation(format!(
            "state has {} modes, graph has {}",
            initial.mode_count(),
            g.mode_count()
        )));
    }
    schedule.validate(g)?;
    let step_perm = g.step_permutation();
    let mut state = initial.clone();
    for (t, step) in schedule.steps.iter().enumerate() {
        let defects: Vec<_> = step
            .defects
            .iter()
            .map(|d| d.resolve(g))
            .collect::<Result<_>>()?;
        if schedule.defect_timing == DefectTiming::BeforeCoin {
            state = defect::apply_all(&state, &defects);
        }
        state = state.apply_rows(&coin_rows(g, &step.coins));
        if step.shift {
            state = state.relabel(&step_perm);
        }
        if schedule.defect_timing == DefectTiming::AfterStep {
            state = defect::apply_all(&state, &defects);
        }
        observe(t + 1, &state);
    }
    Ok(state)
}

fn coin_rows(g: &Graph, coins: &CoinAssignment) -> SparseRows {
    let mut rows: SparseRows = vec![None; g.mode_count()];
    for x in 0..g.vertex_count() {
        let m = coins.matrix(x);
        if m.nrows() == 0 || coin::is_identity(m) {
            continue;
        }
        let base = g.bundle(x).start;
        for a in 0..m.nrows() {
            let row = (0..m.ncols())
                .filter(|&b| m[[a, b]] != linalg::ZERO)
                .map(|b| (base + b, m[[a, b]]))
                .collect();
            rows[base + a] = Some(row);
        }
    }
    rows
}

/// Single-particle mode map of a defect-free schedule, composed in
/// application order.
pub fn mode_map(g: &Graph, schedule: &WalkSchedule) -> Result<Matrix> {
    if schedule.has_defects() {
        return Err(Error::Unsupported(
            "defect operators act on occupations and have no single-particle mode map".into(),
        ));
    }
    schedule.validate(g)?;
    let step = linalg::permutation_matrix(&g.step_permutation());
    let mut total = linalg::identity(g.mode_count());
    for s in &schedule.steps {
        total = total.dot(&s.coins.block_matrix(g));
        if s.shift {
            total = total.dot(&step);
        }
    }
    Ok(total)
}

/// Basis state with one walker in each listed mode.
pub fn create_walkers(g: &Graph, modes: &[Mode]) -> Result<FockState> {
    let idx: Vec<usize> = modes
        .iter()
        .map(|&m| g.mode_index(m))
        .collect::<Result<_>>()?;
    FockState::create(&idx, g.mode_count())
}

/// Product state of walkers, each given as a superposition over modes.
pub fn walker_state(g: &Graph, walkers: &[Vec<(Mode, Complex64)>]) -> Result<FockState> {
    let resolved: Vec<Vec<(usize, Complex64)>> = walkers
        .iter()
        .map(|w| {
            w.iter()
                .map(|&(m, a)| Ok((g.mode_index(m)?, a)))
                .collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;
    FockState::from_walkers(&resolved, g.mode_count())
}

/// Coin superposition used for symmetric spreading profiles: at a degree-2
/// vertex `(|L⟩ + i|R⟩)/√2` with `L` the lower neighbour id, otherwise the
/// uniform real superposition over the neighbourhood.
pub fn symmetric_walker(g: &Graph, x: Vertex) -> Vec<(Mode, Complex64)> {
    let nbrs = g.neighbors(x);
    if nbrs.len() == 2 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        vec![
            (Mode::new(x, nbrs[0]), Complex64::new(s, 0.0)),
            (Mode::new(x, nbrs[1]), Complex64::new(0.0, s)),
        ]
    } else {
        let a = Complex64::new(1.0 / (nbrs.len() as f64).sqrt(), 0.0);
        nbrs.iter().map(|&c| (Mode::new(x, c), a)).collect()
    }
}

/// Mode of a line walker at `x` with coin pointing in `direction`.
pub fn line_mode(g: &Graph, x: Vertex, direction: LineDirection) -> Result<Mode> {
    g.line_coin(x, direction)
        .map(|c| Mode::new(x, c))
        .ok_or_else(|| Error::lookup("line neighbour", format!("{direction:?} of {x}")))
}
