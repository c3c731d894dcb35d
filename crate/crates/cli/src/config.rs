//! Configuration documents: `RunConfig` for simulations and `WalkDocument`
//! for walk schedules consumed or produced by the compiler.

use std::collections::BTreeMap;

use num_complex::Complex64;
use qwalk_core::graph::{build_complete_with_loops, build_cycle, build_line, Multiset, Vertex};
use qwalk_core::linalg::{self, Matrix};
use qwalk_core::walk::{symmetric_walker, CoinPreset};
use qwalk_core::{
    CoinAssignment, DefectOperator, DefectTiming, Graph, Mode, WalkSchedule, WalkStep,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

/// A complex number as `[re, im]`.
pub type Pair = [f64; 2];

fn complex(p: Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

fn is_default<T: Default + PartialEq>(v: &T) -> bool {
    *v == T::default()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphPreset {
    Line,
    Cycle,
    CompleteWithLoops,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GraphSpec {
    Preset {
        preset: GraphPreset,
        size: usize,
    },
    Edges {
        vertices: usize,
        edges: Vec<[Vertex; 2]>,
    },
}

impl GraphSpec {
    pub fn build(&self) -> Result<Graph, CliError> {
        let g = match self {
            GraphSpec::Preset {
                preset: GraphPreset::Line,
                size,
            } => build_line(*size),
            GraphSpec::Preset {
                preset: GraphPreset::Cycle,
                size,
            } => build_cycle(*size),
            GraphSpec::Preset {
                preset: GraphPreset::CompleteWithLoops,
                size,
            } => build_complete_with_loops(*size),
            GraphSpec::Edges { vertices, edges } => {
                let pairs: Vec<(Vertex, Vertex)> = edges.iter().map(|e| (e[0], e[1])).collect();
                Graph::from_edges(*vertices, &pairs)
            }
        };
        g.map_err(|e| CliError::invalid("graph", e))
    }
}

/// Coin per vertex as a list of rows of `[re, im]` entries.
pub type MatrixSpec = Vec<Vec<Pair>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoinSpec {
    Preset(CoinPreset),
    /// Listed vertices (keys are vertex ids as strings, as JSON requires)
    /// get their matrix; the rest use `default`.
    Explicit {
        matrices: BTreeMap<String, MatrixSpec>,
        #[serde(
            default = "identity_preset",
            skip_serializing_if = "is_identity_preset"
        )]
        default: CoinPreset,
    },
}

fn identity_preset() -> CoinPreset {
    CoinPreset::Identity
}

fn is_identity_preset(p: &CoinPreset) -> bool {
    *p == CoinPreset::Identity
}

impl CoinSpec {
    pub fn build(&self, g: &Graph, field: &str) -> Result<CoinAssignment, CliError> {
        let wrap = |e| CliError::invalid(field, e);
        match self {
            CoinSpec::Preset(p) => CoinAssignment::preset(g, *p).map_err(wrap),
            CoinSpec::Explicit { matrices, default } => {
                let mut coins = CoinAssignment::preset(g, *default).map_err(wrap)?;
                for (key, rows) in matrices {
                    let x: Vertex = key.parse().map_err(|_| CliError::Config {
                        field: format!("{field}.matrices"),
                        message: format!("key {key:?} is not a vertex id"),
                    })?;
                    let m = linalg::from_pairs(rows)
                        .map_err(|e| CliError::invalid(&format!("{field}.matrices.{x}"), e))?;
                    coins = coins.with_vertex(g, x, m).map_err(wrap)?;
                }
                Ok(coins)
            }
        }
    }

    /// Lists every vertex whose coin is not the identity.
    pub fn from_assignment(coins: &CoinAssignment) -> CoinSpec {
        let matrices = coins
            .matrices()
            .iter()
            .enumerate()
            .filter(|(_, m)| !is_identity(m))
            .map(|(x, m)| (x.to_string(), linalg::to_pairs(m)))
            .collect();
        CoinSpec::Explicit {
            matrices,
            default: CoinPreset::Identity,
        }
    }
}

fn is_identity(m: &Matrix) -> bool {
    *m == linalg::identity(m.nrows())
}

/// A defect operator with the steps (1-based) it acts on; all steps when
/// `steps` is absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum DefectSpec {
    Cphase {
        a: [Vertex; 2],
        b: [Vertex; 2],
        phase: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        steps: Option<Vec<usize>>,
    },
    PositionPhase {
        positions: Vec<Vertex>,
        phase: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        steps: Option<Vec<usize>>,
    },
    Kerr {
        position: Vertex,
        phase: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        steps: Option<Vec<usize>>,
    },
}

impl DefectSpec {
    pub fn operator(&self) -> DefectOperator {
        match self {
            DefectSpec::Cphase { a, b, phase, .. } => DefectOperator::Cphase {
                a: Mode::new(a[0], a[1]),
                b: Mode::new(b[0], b[1]),
                phase: *phase,
            },
            DefectSpec::PositionPhase {
                positions, phase, ..
            } => DefectOperator::PositionPhase {
                positions: Multiset::new(positions.clone()),
                phase: *phase,
            },
            DefectSpec::Kerr {
                position, phase, ..
            } => DefectOperator::Kerr {
                position: *position,
                phase: *phase,
            },
        }
    }

    pub fn steps(&self) -> Option<&[usize]> {
        match self {
            DefectSpec::Cphase { steps, .. }
            | DefectSpec::PositionPhase { steps, .. }
            | DefectSpec::Kerr { steps, .. } => steps.as_deref(),
        }
    }

    pub fn applies_at(&self, step: usize) -> bool {
        self.steps().is_none_or(|s| s.contains(&step))
    }

    pub fn from_operator(op: &DefectOperator) -> DefectSpec {
        match op {
            DefectOperator::Cphase { a, b, phase } => DefectSpec::Cphase {
                a: [a.position, a.coin],
                b: [b.position, b.coin],
                phase: *phase,
                steps: None,
            },
            DefectOperator::PositionPhase { positions, phase } => DefectSpec::PositionPhase {
                positions: positions.as_slice().to_vec(),
                phase: *phase,
                steps: None,
            },
            DefectOperator::Kerr { position, phase } => DefectSpec::Kerr {
                position: *position,
                phase: *phase,
                steps: None,
            },
        }
    }
}

/// One walker's amplitude on one mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeAmplitude {
    pub mode: [Vertex; 2],
    #[serde(default = "unit", skip_serializing_if = "is_unit")]
    pub amp: Pair,
}

fn unit() -> Pair {
    [1.0, 0.0]
}

fn is_unit(p: &Pair) -> bool {
    *p == unit()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialSpec {
    /// One walker per listed position, each in the symmetric coin state.
    Symmetric { positions: Vec<Vertex> },
    /// One superposition per walker; amplitudes are normalised.
    Modes { walkers: Vec<Vec<ModeAmplitude>> },
    /// One walker per listed position with a random coin state drawn from
    /// the config seed.
    Random { positions: Vec<Vertex> },
}

impl InitialSpec {
    pub fn walker_count(&self) -> usize {
        match self {
            InitialSpec::Symmetric { positions } | InitialSpec::Random { positions } => {
                positions.len()
            }
            InitialSpec::Modes { walkers } => walkers.len(),
        }
    }

    pub fn walkers(&self, g: &Graph, seed: u64) -> Result<Vec<Vec<(Mode, Complex64)>>, CliError> {
        let check = |x: Vertex| {
            if x < g.vertex_count() {
                Ok(())
            } else {
                Err(CliError::Config {
                    field: "initial.positions".into(),
                    message: format!(
                        "vertex {x} is not in a graph of {} vertices",
                        g.vertex_count()
                    ),
                })
            }
        };
        match self {
            InitialSpec::Symmetric { positions } => positions
                .iter()
                .map(|&x| check(x).map(|_| symmetric_walker(g, x)))
                .collect(),
            InitialSpec::Random { positions } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                positions
                    .iter()
                    .map(|&x| {
                        check(x)?;
                        Ok(g.neighbors(x)
                            .iter()
                            .map(|&c| {
                                let z = Complex64::new(
                                    rng.random::<f64>() - 0.5,
                                    rng.random::<f64>() - 0.5,
                                );
                                (Mode::new(x, c), z)
                            })
                            .collect())
                    })
                    .collect()
            }
            InitialSpec::Modes { walkers } => Ok(walkers
                .iter()
                .map(|w| {
                    w.iter()
                        .map(|m| (Mode::new(m.mode[0], m.mode[1]), complex(m.amp)))
                        .collect()
                })
                .collect()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputKind {
    Position,
    Coincidence,
    Spread,
    VirtualCompare,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: u32,
    pub graph: GraphSpec,
    pub walkers: usize,
    pub initial: InitialSpec,
    pub coin: CoinSpec,
    /// Overrides `coin` step by step; must list exactly `steps` entries.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coin_per_step: Option<Vec<CoinSpec>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub defects: Vec<DefectSpec>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub defect_timing: DefectTiming,
    pub steps: usize,
    pub outputs: Vec<OutputKind>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub seed: u64,
    /// Origin for spread statistics; defaults to the walkers' mean start.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spread_origin: Option<Vertex>,
}

impl RunConfig {
    pub fn schedule(&self, g: &Graph) -> Result<WalkSchedule, CliError> {
        uniform_schedule(
            g,
            &self.coin,
            self.coin_per_step.as_deref(),
            &self.defects,
            self.steps,
            self.defect_timing,
        )
    }
}

fn uniform_schedule(
    g: &Graph,
    coin: &CoinSpec,
    coin_per_step: Option<&[CoinSpec]>,
    defects: &[DefectSpec],
    steps: usize,
    timing: DefectTiming,
) -> Result<WalkSchedule, CliError> {
    if let Some(list) = coin_per_step {
        if list.len() != steps {
            return Err(CliError::Config {
                field: "coin_per_step".into(),
                message: format!("has {} entries for {steps} steps", list.len()),
            });
        }
    }
    let base = coin.build(g, "coin")?;
    for (k, d) in defects.iter().enumerate() {
        d.operator()
            .validate(g)
            .map_err(|e| CliError::invalid(&format!("defects[{k}]"), e))?;
    }
    let mut out = Vec::with_capacity(steps);
    for t in 1..=steps {
        let coins = match coin_per_step {
            Some(list) => list[t - 1].build(g, &format!("coin_per_step[{}]", t - 1))?,
            None => base.clone(),
        };
        let ops = defects
            .iter()
            .filter(|d| d.applies_at(t))
            .map(DefectSpec::operator)
            .collect();
        out.push(WalkStep::new(coins).with_defects(ops));
    }
    let mut schedule = WalkSchedule::new(out);
    schedule.defect_timing = timing;
    Ok(schedule)
}

/// One explicit layer of a walk schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepSpec {
    pub coin: CoinSpec,
    /// `false` for a coin-only layer with no step operator.
    #[serde(default = "yes", skip_serializing_if = "is_yes")]
    pub shift: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub defects: Vec<DefectSpec>,
}

fn yes() -> bool {
    true
}

fn is_yes(b: &bool) -> bool {
    *b
}

/// A walk without an initial state: the input of `compile walk-to-net` and
/// the output of `compile net-to-walk`. Either `coin` with `steps` (plus
/// optional `coin_per_step` and `defects`) or an explicit `schedule`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WalkDocument {
    pub schema: u32,
    pub graph: GraphSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coin: Option<CoinSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coin_per_step: Option<Vec<CoinSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub defects: Vec<DefectSpec>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub defect_timing: DefectTiming,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Vec<StepSpec>>,
    /// Number of leading modes that carry a compiled network; the rest are
    /// padding.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub network_modes: Option<usize>,
    /// Informational: routing sandwiches used for cross-position
    /// beamsplitters. Ignored on input.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub routing: Vec<serde_json::Value>,
}

impl WalkDocument {
    pub fn build(&self) -> Result<(Graph, WalkSchedule), CliError> {
        if self.schema != CONFIG_SCHEMA_VERSION {
            return Err(schema_error(self.schema));
        }
        let g = self.graph.build()?;
        let schedule = match (&self.schedule, &self.coin) {
            (Some(layers), None) => {
                let mut steps = Vec::with_capacity(layers.len());
                for (k, layer) in layers.iter().enumerate() {
                    let coins = layer.coin.build(&g, &format!("schedule[{k}].coin"))?;
                    let mut ops = Vec::new();
                    for (d, spec) in layer.defects.iter().enumerate() {
                        let op = spec.operator();
                        op.validate(&g).map_err(|e| {
                            CliError::invalid(&format!("schedule[{k}].defects[{d}]"), e)
                        })?;
                        ops.push(op);
                    }
                    let mut step = WalkStep::new(coins).with_defects(ops);
                    step.shift = layer.shift;
                    steps.push(step);
                }
                let mut s = WalkSchedule::new(steps);
                s.defect_timing = self.defect_timing;
                s
            }
            (None, Some(coin)) => uniform_schedule(
                &g,
                coin,
                self.coin_per_step.as_deref(),
                &self.defects,
                self.steps.unwrap_or(1),
                self.defect_timing,
            )?,
            _ => {
                return Err(CliError::Config {
                    field: "schedule".into(),
                    message: "give exactly one of `coin` (with `steps`) or `schedule`".into(),
                })
            }
        };
        Ok((g, schedule))
    }

    pub fn from_schedule(graph: GraphSpec, schedule: &WalkSchedule) -> WalkDocument {
        let layers = schedule
            .steps
            .iter()
            .map(|s| StepSpec {
                coin: CoinSpec::from_assignment(&s.coins),
                shift: s.shift,
                defects: s.defects.iter().map(DefectSpec::from_operator).collect(),
            })
            .collect();
        WalkDocument {
            schema: CONFIG_SCHEMA_VERSION,
            graph,
            coin: None,
            coin_per_step: None,
            steps: None,
            defects: Vec::new(),
            defect_timing: schedule.defect_timing,
            schedule: Some(layers),
            network_modes: None,
            routing: Vec::new(),
        }
    }
}

pub(crate) fn schema_error(found: u32) -> CliError {
    CliError::Config {
        field: "schema".into(),
        message: format!("version {found} is not supported (expected {CONFIG_SCHEMA_VERSION})"),
    }
}

/// Parses JSON, reporting the field path and position of any error.
pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        CliError::Config {
            field: if path == "." {
                "(document)".into()
            } else {
                path
            },
            message: e.into_inner().to_string(),
        }
    })
}

pub fn parse_run_config(text: &str) -> Result<RunConfig, CliError> {
    let config: RunConfig = parse_json(text)?;
    if config.schema != CONFIG_SCHEMA_VERSION {
        return Err(schema_error(config.schema));
    }
    if config.initial.walker_count() != config.walkers {
        return Err(CliError::Config {
            field: "initial".into(),
            message: format!(
                "describes {} walkers, `walkers` is {}",
                config.initial.walker_count(),
                config.walkers
            ),
        });
    }
    if config.walkers == 0 {
        return Err(CliError::Config {
            field: "walkers".into(),
            message: "must be at least 1".into(),
        });
    }
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    const LINE: &str = r#"{
        "schema": 1,
        "graph": {"preset": "line", "size": 41},
        "walkers": 1,
        "initial": {"kind": "symmetric", "positions": [20]},
        "coin": "hadamard",
        "steps": 20,
        "outputs": ["position", "spread"]
    }"#;

    #[test]
    fn parses_and_round_trips() {
        let c = parse_run_config(LINE).unwrap();
        assert_eq!(
            c.graph,
            GraphSpec::Preset {
                preset: GraphPreset::Line,
                size: 41
            }
        );
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(parse_run_config(&text).unwrap(), c);
    }

    #[test]
    fn full_config_round_trips() {
        let c = RunConfig {
            schema: 1,
            graph: GraphSpec::Edges {
                vertices: 3,
                edges: vec![[0, 1], [1, 2], [2, 2]],
            },
            walkers: 2,
            initial: InitialSpec::Modes {
                walkers: vec![
                    vec![ModeAmplitude {
                        mode: [0, 1],
                        amp: [0.5, -0.25],
                    }],
                    vec![ModeAmplitude {
                        mode: [2, 2],
                        amp: unit(),
                    }],
                ],
            },
            coin: CoinSpec::Explicit {
                matrices: BTreeMap::from([(
                    "1".to_string(),
                    vec![vec![[0.0, 1.0], [0.0, 0.0]], vec![[0.0, 0.0], [1.0, 0.0]]],
                )]),
                default: CoinPreset::Dft,
            },
            coin_per_step: Some(vec![CoinSpec::Preset(CoinPreset::Identity)]),
            defects: vec![
                DefectSpec::Kerr {
                    position: 1,
                    phase: 0.1,
                    steps: Some(vec![1]),
                },
                DefectSpec::PositionPhase {
                    positions: vec![0, 2],
                    phase: 3.0,
                    steps: None,
                },
            ],
            defect_timing: DefectTiming::BeforeCoin,
            steps: 1,
            outputs: vec![OutputKind::Coincidence, OutputKind::VirtualCompare],
            seed: 99,
            spread_origin: Some(1),
        };
        let text = serde_json::to_string_pretty(&c).unwrap();
        assert_eq!(parse_json::<RunConfig>(&text).unwrap(), c);
    }

    #[test]
    fn errors_carry_field_path() {
        let bad = LINE.replace("\"hadamard\"", "\"hadamrd\"");
        let err = parse_run_config(&bad).unwrap_err();
        assert!(err.to_string().contains("coin"), "{err}");
        let bad = LINE.replace("\"steps\": 20", "\"steps\": -2");
        let err = parse_run_config(&bad).unwrap_err();
        assert!(
            err.to_string().contains("steps") && err.to_string().contains("line"),
            "{err}"
        );
    }

    #[test]
    fn walker_count_must_match() {
        let bad = LINE.replace("\"walkers\": 1", "\"walkers\": 2");
        assert!(parse_run_config(&bad)
            .unwrap_err()
            .to_string()
            .contains("initial"));
    }

    #[test]
    fn defects_respect_steps() {
        let d = DefectSpec::Kerr {
            position: 0,
            phase: 1.0,
            steps: Some(vec![2, 3]),
        };
        assert!(!d.applies_at(1) && d.applies_at(3));
        let json = serde_json::to_string(&d).unwrap();
        assert_eq!(json, r#"{"kerr":{"position":0,"phase":1.0,"steps":[2,3]}}"#);
    }
}
