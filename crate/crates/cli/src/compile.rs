//! `qwalk compile`: translate walks to optical networks and back, verifying
//! each result against its input.

use std::path::Path;

use qwalk_core::linalg::max_abs_diff;
use qwalk_core::optics::{
    compile_network_to_walk, compile_walk_to_network, padded_mode_map_distance, NetToWalkOptions,
    NetworkDocument, RoutingOp, RoutingPlan,
};
use qwalk_core::walk::mode_map;
use qwalk_core::{Graph, Matrix, OpticalNetwork, WalkSchedule};
use serde::Serialize;
use serde_json::json;

use crate::config::{parse_json, GraphPreset, GraphSpec, WalkDocument};
use crate::{read_file, write_file, CliError};

/// Largest mode-map distance a compiled artifact may have from its input.
pub const VERIFY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum CompileDirection {
    WalkToNet,
    NetToWalk,
}

impl CompileDirection {
    fn label(self) -> &'static str {
        match self {
            CompileDirection::WalkToNet => "walk-to-net",
            CompileDirection::NetToWalk => "net-to-walk",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompileReport {
    pub direction: &'static str,
    pub input_modes: usize,
    pub output_modes: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub network_elements: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub walk_layers: Option<usize>,
    pub cphase_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub routed_beamsplitters: Option<usize>,
    /// Entrywise distance between input and output mode maps, CPHASE
    /// gates and defects excluded.
    pub mode_map_distance: f64,
    /// walk-to-net only: distance after compiling the network back to a walk.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub round_trip_distance: Option<f64>,
    pub tolerance: f64,
    pub ok: bool,
}

/// Report path for a compiled artifact: `<output>.report.json`.
pub fn report_path(output: &Path) -> std::path::PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".report.json");
    name.into()
}

pub fn compile(
    direction: CompileDirection,
    input: &Path,
    output: &Path,
    options: NetToWalkOptions,
) -> Result<CompileReport, CliError> {
    let text = read_file(input)?;
    let (artifact, report) = match direction {
        CompileDirection::WalkToNet => walk_to_net(&text, options)?,
        CompileDirection::NetToWalk => net_to_walk(&text, options)?,
    };
    write_file(output, &artifact)?;
    let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
    json.push('\n');
    write_file(&report_path(output), &json)?;
    let worst = report
        .mode_map_distance
        .max(report.round_trip_distance.unwrap_or(0.0));
    if !report.ok {
        return Err(CliError::Verification {
            what: report.direction,
            distance: worst,
            tolerance: VERIFY_TOL,
        });
    }
    Ok(report)
}

fn linear_network(net: &OpticalNetwork) -> Result<Matrix, CliError> {
    let elements = net
        .elements()
        .iter()
        .filter(|e| !e.is_cphase())
        .cloned()
        .collect();
    Ok(OpticalNetwork::new(net.mode_count(), elements)?.mode_map()?)
}

fn linear_walk(g: &Graph, schedule: &WalkSchedule) -> Result<Matrix, CliError> {
    let mut linear = schedule.clone();
    for step in &mut linear.steps {
        step.defects.clear();
    }
    Ok(mode_map(g, &linear)?)
}

fn walk_to_net(text: &str, options: NetToWalkOptions) -> Result<(String, CompileReport), CliError> {
    let doc: WalkDocument = parse_json(text)?;
    let (g, schedule) = doc.build()?;
    let net = compile_walk_to_network(&g, &schedule)?;
    let walk_map = linear_walk(&g, &schedule)?;
    let distance = max_abs_diff(&linear_network(&net)?, &walk_map);
    let back = compile_network_to_walk(&net, options)?;
    let round_trip =
        padded_mode_map_distance(&walk_map, &linear_walk(&back.graph, &back.schedule)?);
    let report = CompileReport {
        direction: CompileDirection::WalkToNet.label(),
        input_modes: g.mode_count(),
        output_modes: net.mode_count(),
        network_elements: Some(net.len()),
        walk_layers: Some(schedule.len()),
        cphase_count: net.cphase_count(),
        routed_beamsplitters: None,
        mode_map_distance: distance,
        round_trip_distance: Some(round_trip),
        tolerance: VERIFY_TOL,
        ok: distance <= VERIFY_TOL && round_trip <= VERIFY_TOL,
    };
    Ok((NetworkDocument::render(&net), report))
}

fn net_to_walk(text: &str, options: NetToWalkOptions) -> Result<(String, CompileReport), CliError> {
    let net = NetworkDocument::parse(text)?;
    let walk = compile_network_to_walk(&net, options)?;
    let distance = padded_mode_map_distance(
        &linear_network(&net)?,
        &linear_walk(&walk.graph, &walk.schedule)?,
    );
    let mut doc = WalkDocument::from_schedule(
        GraphSpec::Preset {
            preset: GraphPreset::CompleteWithLoops,
            size: walk.graph.vertex_count(),
        },
        &walk.schedule,
    );
    doc.network_modes = Some(walk.network_modes);
    doc.routing = walk.plans.iter().map(routing_json).collect();
    let report = CompileReport {
        direction: CompileDirection::NetToWalk.label(),
        input_modes: net.mode_count(),
        output_modes: walk.graph.mode_count(),
        network_elements: Some(net.len()),
        walk_layers: Some(walk.schedule.len()),
        cphase_count: net.cphase_count(),
        routed_beamsplitters: Some(walk.plans.len()),
        mode_map_distance: distance,
        round_trip_distance: None,
        tolerance: VERIFY_TOL,
        ok: distance <= VERIFY_TOL,
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("walk document serializes");
    out.push('\n');
    Ok((out, report))
}

fn routing_json(plan: &RoutingPlan) -> serde_json::Value {
    let (a, b) = plan.target;
    let ops: Vec<String> = plan
        .operators
        .iter()
        .map(|op| match op {
            RoutingOp::Permutation { position, coins } => {
                format!("P(x={position}; {}<->{})", coins.0, coins.1)
            }
            RoutingOp::Step => "S".to_string(),
            RoutingOp::Beamsplitter {
                position, coins, ..
            } => {
                format!("B(x={position}; {},{})", coins.0, coins.1)
            }
        })
        .collect();
    json!({
        "target": [[a.position, a.coin], [b.position, b.coin]],
        "operators": ops,
    })
}
