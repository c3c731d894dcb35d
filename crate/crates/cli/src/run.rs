//! `qwalk run`: simulate a configured walk and write distributions.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use qwalk_core::graph::{build_virtual_graph, Multiset, Vertex};
use qwalk_core::walk::{
    coincidence_distribution, evolve_observed, l1_distance, position_distribution,
    simulate_virtual_with, spread_statistics, walker_state, EvolveOptions, Spread,
    VirtualConfiguration, DEFAULT_MAX_WALKERS, HARD_MAX_WALKERS,
};
use qwalk_core::{DefectPattern, Error, FockState, Graph, WalkSchedule};
use serde::Serialize;

use crate::config::{DefectSpec, OutputKind, RunConfig};
use crate::{fmt_f64, write_file, CliError};

/// Largest Fock basis (`C(M + n - 1, n)`) a run may span.
pub const STATE_SPACE_CAP: u64 = 2_000_000;

/// Agreement threshold reported by `virtual-compare`.
pub const VIRTUAL_COMPARE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub max_walkers: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            max_walkers: DEFAULT_MAX_WALKERS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpreadPoint {
    pub step: usize,
    pub mean: f64,
    pub std_dev: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpreadReport {
    pub origin: Vertex,
    #[serde(rename = "final")]
    pub last: Spread,
    pub series: Vec<SpreadPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VirtualCompareReport {
    pub walkers: usize,
    pub virtual_vertices: usize,
    pub l1_distance: f64,
    pub tolerance: f64,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub vertices: usize,
    pub modes: usize,
    pub walkers: usize,
    pub steps: usize,
    pub state_space_estimate: u64,
    pub final_norm: f64,
    pub files: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spread: Option<Spread>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub virtual_l1_distance: Option<f64>,
}

/// `C(m + n - 1, n)`, saturating.
pub fn state_space_estimate(modes: usize, walkers: usize) -> u64 {
    let mut acc: u128 = 1;
    for k in 1..=walkers as u128 {
        acc = acc * (modes as u128 + k - 1) / k;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

pub fn run(
    config: &RunConfig,
    out_dir: &Path,
    options: &RunOptions,
) -> Result<RunReport, CliError> {
    if options.max_walkers > HARD_MAX_WALKERS {
        return Err(Error::Cap {
            what: "walker cap override",
            requested: options.max_walkers,
            cap: HARD_MAX_WALKERS,
        }
        .into());
    }
    if config.walkers > options.max_walkers {
        return Err(Error::Cap {
            what: "walkers",
            requested: config.walkers,
            cap: options.max_walkers,
        }
        .into());
    }
    let g = config.graph.build()?;
    let estimate = state_space_estimate(g.mode_count(), config.walkers);
    if estimate > STATE_SPACE_CAP {
        return Err(Error::Cap {
            what: "state-space size",
            requested: estimate.try_into().unwrap_or(usize::MAX),
            cap: STATE_SPACE_CAP as usize,
        }
        .into());
    }
    let schedule = config.schedule(&g)?;
    let walkers = config.initial.walkers(&g, config.seed)?;
    let initial = walker_state(&g, &walkers).map_err(|e| CliError::invalid("initial", e))?;

    let wants = |k| config.outputs.contains(&k);
    if wants(OutputKind::Coincidence) && config.walkers < 2 {
        return Err(CliError::Config {
            field: "outputs".into(),
            message: "coincidence needs at least two walkers".into(),
        });
    }
    let virtual_pattern = if wants(OutputKind::VirtualCompare) {
        Some(virtual_defects(config)?)
    } else {
        None
    };
    let origin = config
        .spread_origin
        .unwrap_or_else(|| mean_position(&g, &initial));
    if origin >= g.vertex_count() {
        return Err(CliError::Config {
            field: "spread_origin".into(),
            message: format!("vertex {origin} is not in the graph"),
        });
    }

    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;

    let mut series = Vec::new();
    let mut spread_error = None;
    let track_spread = wants(OutputKind::Spread);
    if track_spread {
        let sp = spread_statistics(&position_distribution(&g, &initial), origin)?;
        series.push(SpreadPoint {
            step: 0,
            mean: sp.mean,
            std_dev: sp.std_dev,
        });
    }
    let final_state = evolve_observed(
        &g,
        &initial,
        &schedule,
        &EvolveOptions {
            max_walkers: options.max_walkers,
        },
        |t, s| {
            if track_spread && spread_error.is_none() {
                match spread_statistics(&position_distribution(&g, s), origin) {
                    Ok(sp) => series.push(SpreadPoint {
                        step: t,
                        mean: sp.mean,
                        std_dev: sp.std_dev,
                    }),
                    Err(e) => spread_error = Some(e),
                }
            }
        },
    )?;
    if let Some(e) = spread_error {
        return Err(e.into());
    }

    let mut files = Vec::new();
    let mut outputs = config.outputs.clone();
    outputs.sort();
    outputs.dedup();
    let mut report_spread = None;
    let mut virtual_l1 = None;
    for kind in outputs {
        match kind {
            OutputKind::Position => {
                let dist = position_distribution(&g, &final_state);
                let rows =
                    (0..g.vertex_count()).map(|x| (vec![x], dist.get(&x).copied().unwrap_or(0.0)));
                files.push(write_csv(out_dir, "position.csv", &["position"], rows)?);
            }
            OutputKind::Coincidence => {
                let dist = coincidence_distribution(&g, &final_state)?;
                let header: Vec<String> = (1..=config.walkers).map(|k| format!("x{k}")).collect();
                let header: Vec<&str> = header.iter().map(String::as_str).collect();
                let rows = dist.iter().map(|(k, &p)| (k.as_slice().to_vec(), p));
                files.push(write_csv(out_dir, "coincidence.csv", &header, rows)?);
            }
            OutputKind::Spread => {
                let last = spread_statistics(&position_distribution(&g, &final_state), origin)?;
                report_spread = Some(last);
                let doc = SpreadReport {
                    origin,
                    last,
                    series: std::mem::take(&mut series),
                };
                files.push(write_json(out_dir, "spread.json", &doc)?);
            }
            OutputKind::VirtualCompare => {
                let pattern = virtual_pattern.as_ref().expect("built above");
                let doc = virtual_compare(&g, &initial, &final_state, &schedule, pattern)?;
                virtual_l1 = Some(doc.l1_distance);
                files.push(write_json(out_dir, "virtual_compare.json", &doc)?);
            }
        }
    }
    files.push("report.json".into());
    let report = RunReport {
        schema: config.schema,
        vertices: g.vertex_count(),
        modes: g.mode_count(),
        walkers: config.walkers,
        steps: config.steps,
        state_space_estimate: estimate,
        final_norm: final_state.norm_sqr().sqrt(),
        files,
        spread: report_spread,
        virtual_l1_distance: virtual_l1,
    };
    write_json(out_dir, "report.json", &report)?;
    Ok(report)
}

fn mean_position(g: &Graph, s: &FockState) -> Vertex {
    let mean: f64 = position_distribution(g, s)
        .iter()
        .map(|(&x, &p)| x as f64 * p)
        .sum();
    mean.round() as Vertex
}

/// Position-level defects as virtual-graph phases. Only defects acting on
/// every step and expressible as a phase on one virtual vertex qualify.
fn virtual_defects(config: &RunConfig) -> Result<Vec<(Vec<Vertex>, f64)>, CliError> {
    let n = config.walkers;
    let mut out = Vec::new();
    for (k, d) in config.defects.iter().enumerate() {
        let field = format!("defects[{k}]");
        let unsupported = |why: &str| CliError::Config {
            field: field.clone(),
            message: format!("virtual-compare: {why}"),
        };
        if d.steps().is_some() {
            return Err(unsupported(
                "step-restricted defects have no virtual-graph form",
            ));
        }
        match d {
            DefectSpec::PositionPhase { positions, phase, .. } if positions.len() == n => {
                out.push((positions.clone(), *phase));
            }
            DefectSpec::Kerr { position, phase, .. } if n == 2 => {
                out.push((vec![*position, *position], *phase));
            }
            _ => {
                return Err(unsupported(
                    "only position-phase defects with one position per walker (or kerr with two walkers) map to virtual vertices",
                ))
            }
        }
    }
    Ok(out)
}

fn virtual_compare(
    g: &Graph,
    initial: &FockState,
    final_state: &FockState,
    schedule: &WalkSchedule,
    pattern: &[(Vec<Vertex>, f64)],
) -> Result<VirtualCompareReport, CliError> {
    let n = initial.walkers();
    let vg = build_virtual_graph(g, n)?;
    let pattern: DefectPattern = qwalk_core::graph::etch_defects(&vg, pattern)?;
    let configs: Vec<VirtualConfiguration> = initial
        .terms()
        .map(|(k, a)| (k.bosons().map(|b| g.mode(b)).collect(), a))
        .collect();
    let coins: Vec<_> = schedule.steps.iter().map(|s| s.coins.clone()).collect();
    let virt = simulate_virtual_with(&vg, &pattern, &configs, &coins, schedule.defect_timing)?;
    let fock: BTreeMap<Multiset, f64> = if n >= 2 {
        coincidence_distribution(g, final_state)?
    } else {
        position_distribution(g, final_state)
            .into_iter()
            .map(|(x, p)| (Multiset::new(vec![x]), p))
            .collect()
    };
    let l1 = l1_distance(&fock, &virt);
    Ok(VirtualCompareReport {
        walkers: n,
        virtual_vertices: vg.vertex_count(),
        l1_distance: l1,
        tolerance: VIRTUAL_COMPARE_TOL,
        agree: l1 <= VIRTUAL_COMPARE_TOL,
    })
}

fn write_csv(
    dir: &Path,
    name: &str,
    key_columns: &[&str],
    rows: impl Iterator<Item = (Vec<Vertex>, f64)>,
) -> Result<String, CliError> {
    let path: PathBuf = dir.join(name);
    let csv_err = |e: csv::Error| CliError::io(&path, std::io::Error::other(e));
    let mut w = csv::Writer::from_path(&path).map_err(csv_err)?;
    let mut header: Vec<&str> = key_columns.to_vec();
    header.push("probability");
    w.write_record(&header).map_err(csv_err)?;
    for (key, p) in rows {
        let mut record: Vec<String> = key.iter().map(ToString::to_string).collect();
        record.push(fmt_f64(p));
        w.write_record(&record).map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::io(&path, e))?;
    Ok(name.to_string())
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("report types serialize");
    text.push('\n');
    write_file(&dir.join(name), &text)?;
    Ok(name.to_string())
}
