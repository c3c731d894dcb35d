use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qwalk_core::graph::{build_complete_with_loops, build_line};
use qwalk_core::linalg::{balanced_beamsplitter, max_abs_diff};
use qwalk_core::optics::{NetworkDocument, OpticalNetwork};
use qwalk_core::walk::{
    evolve, mode_map, position_distribution, spread_statistics, symmetric_walker, walker_state,
    CoinAssignment, CoinPreset, WalkSchedule,
};
use qwalk_core::Element;
use serde_json::Value;

fn qwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qwalk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run_config(dir: &Path, config: &str, out: &str) -> Output {
    let cfg = write(dir, &format!("{out}.json"), config);
    qwalk(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out-dir",
        dir.join(out).to_str().unwrap(),
    ])
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn line_position_and_spread_match_engine() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(
        dir.path(),
        r#"{"schema": 1, "graph": {"preset": "line", "size": 41}, "walkers": 1,
            "initial": {"kind": "symmetric", "positions": [20]}, "coin": "hadamard",
            "steps": 20, "outputs": ["position", "spread"]}"#,
        "line",
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = read_csv(&dir.path().join("line/position.csv"));
    assert_eq!(rows.len(), 41);

    let g = build_line(41).unwrap();
    let coins = CoinAssignment::preset(&g, CoinPreset::Hadamard).unwrap();
    let s = walker_state(&g, &[symmetric_walker(&g, 20)]).unwrap();
    let expected = position_distribution(
        &g,
        &evolve(&g, &s, &WalkSchedule::repeated(&coins, 20)).unwrap(),
    );
    let mut total = 0.0;
    for row in &rows {
        let x: usize = row[0].parse().unwrap();
        let p: f64 = row[1].parse().unwrap();
        total += p;
        assert!((p - expected.get(&x).copied().unwrap_or(0.0)).abs() < 1e-15);
    }
    assert!((total - 1.0).abs() < 1e-9);

    let spread = read_json(&dir.path().join("line/spread.json"));
    let sp = spread_statistics(&expected, 20).unwrap();
    assert_eq!(spread["origin"], 20);
    assert!((spread["final"]["std_dev"].as_f64().unwrap() - sp.std_dev).abs() < 1e-12);
    assert_eq!(spread["series"].as_array().unwrap().len(), 21);
    let report = read_json(&dir.path().join("line/report.json"));
    assert!((report["final_norm"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn two_walkers_coincidence_and_virtual_compare() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(
        dir.path(),
        r#"{"schema": 1, "graph": {"preset": "line", "size": 15}, "walkers": 2,
            "initial": {"kind": "symmetric", "positions": [6, 8]}, "coin": "hadamard",
            "defects": [{"position-phase": {"positions": [7, 8], "phase": 3.141592653589793}}],
            "steps": 7, "outputs": ["coincidence", "virtual-compare"]}"#,
        "pair",
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = read_csv(&dir.path().join("pair/coincidence.csv"));
    assert_eq!(rows[0].len(), 3);
    let total: f64 = rows.iter().map(|r| r[2].parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-9);
    let cmp = read_json(&dir.path().join("pair/virtual_compare.json"));
    assert!(cmp["l1_distance"].as_f64().unwrap() <= 1e-10);
    assert_eq!(cmp["agree"], true);
    assert_eq!(cmp["virtual_vertices"], 120);
}

#[test]
fn invalid_coin_names_vertex() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(
        dir.path(),
        r#"{"schema": 1, "graph": {"preset": "line", "size": 5}, "walkers": 1,
            "initial": {"kind": "symmetric", "positions": [2]},
            "coin": {"matrices": {"3": [[[1, 0]]]}},
            "steps": 2, "outputs": ["position"]}"#,
        "bad",
    );
    assert!(!out.status.success());
    let msg = stderr(&out);
    assert!(msg.contains("vertex 3"), "{msg}");
    assert!(!dir.path().join("bad").exists());
}

#[test]
fn schema_errors_report_field_and_position() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(
        dir.path(),
        "{\"schema\": 1,\n \"graph\": {\"preset\": \"line\", \"size\": 5},\n \"walkers\": \"two\"}",
        "schema",
    );
    assert_eq!(out.status.code(), Some(2));
    let msg = stderr(&out);
    assert!(msg.contains("walkers") && msg.contains("line 3"), "{msg}");
}

#[test]
fn walker_cap_is_enforced_before_compute() {
    let dir = tempfile::tempdir().unwrap();
    let five = r#"{"schema": 1, "graph": {"preset": "line", "size": 9}, "walkers": 5,
        "initial": {"kind": "symmetric", "positions": [1, 2, 3, 4, 5]}, "coin": "hadamard",
        "steps": 1, "outputs": ["position"]}"#;
    let out = run_config(dir.path(), five, "capped");
    assert!(!out.status.success());
    assert!(stderr(&out).contains("cap"), "{}", stderr(&out));
    assert!(!dir.path().join("capped").exists());

    let cfg = write(dir.path(), "five.json", five);
    let raised = qwalk(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out-dir",
        dir.path().join("raised").to_str().unwrap(),
        "--max-walkers",
        "5",
    ]);
    assert!(raised.status.success(), "{}", stderr(&raised));
    let over = qwalk(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out-dir",
        dir.path().join("over").to_str().unwrap(),
        "--max-walkers",
        "7",
    ]);
    assert!(!over.status.success());
}

#[test]
fn identical_configs_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let config = r#"{"schema": 1, "graph": {"preset": "cycle", "size": 9}, "walkers": 2,
        "initial": {"kind": "random", "positions": [0, 4]}, "coin": "dft", "seed": 11,
        "steps": 5, "outputs": ["position", "coincidence", "spread", "virtual-compare"]}"#;
    assert!(run_config(dir.path(), config, "a").status.success());
    assert!(run_config(dir.path(), config, "b").status.success());
    let names = [
        "position.csv",
        "coincidence.csv",
        "spread.json",
        "virtual_compare.json",
        "report.json",
    ];
    for name in names {
        let a = std::fs::read(dir.path().join("a").join(name)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs");
    }
    let other = config.replace("\"seed\": 11", "\"seed\": 12");
    assert!(run_config(dir.path(), &other, "c").status.success());
    assert_ne!(
        std::fs::read(dir.path().join("a/position.csv")).unwrap(),
        std::fs::read(dir.path().join("c/position.csv")).unwrap()
    );
}

#[test]
fn walk_to_net_on_complete_three() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "walk.json",
        r#"{"schema": 1, "graph": {"preset": "complete-with-loops", "size": 3}, "coin": "dft", "steps": 1}"#,
    );
    let net_path = dir.path().join("net.jsonl");
    let out = qwalk(&[
        "compile",
        "walk-to-net",
        "--in",
        input.to_str().unwrap(),
        "--out",
        net_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let net = NetworkDocument::parse(&std::fs::read_to_string(&net_path).unwrap()).unwrap();
    assert_eq!(net.mode_count(), 9);

    let g = build_complete_with_loops(3).unwrap();
    let coins = CoinAssignment::preset(&g, CoinPreset::Dft).unwrap();
    let expected = mode_map(&g, &WalkSchedule::repeated(&coins, 1)).unwrap();
    assert!(max_abs_diff(&net.mode_map().unwrap(), &expected) <= 1e-9);

    let report = read_json(&dir.path().join("net.jsonl.report.json"));
    assert_eq!(report["ok"], true);
    assert!(report["mode_map_distance"].as_f64().unwrap() <= 1e-9);
    assert!(report["round_trip_distance"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn net_to_walk_single_beamsplitter_sandwich() {
    let dir = tempfile::tempdir().unwrap();
    let net = OpticalNetwork::new(
        9,
        vec![Element::beamsplitter(4, 7, balanced_beamsplitter())],
    )
    .unwrap();
    let input = write(dir.path(), "bs.jsonl", &NetworkDocument::render(&net));
    let walk_path = dir.path().join("walk.json");
    let out = qwalk(&[
        "compile",
        "net-to-walk",
        "--in",
        input.to_str().unwrap(),
        "--out",
        walk_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let walk = read_json(&walk_path);
    assert_eq!(walk["graph"]["preset"], "complete-with-loops");
    assert_eq!(walk["graph"]["size"], 3);
    let ops: Vec<&str> = walk["routing"][0]["operators"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(
        ops,
        [
            "P(x=1; 0<->1)",
            "P(x=2; 0<->1)",
            "S",
            "B(x=0; 1,2)",
            "S",
            "P(x=1; 0<->1)",
            "P(x=2; 0<->1)"
        ]
    );
    assert_eq!(walk["schedule"].as_array().unwrap().len(), 3);
    assert_eq!(walk["schedule"][2]["shift"], false);

    // the emitted walk compiles back to the same network map
    let back_path = dir.path().join("back.jsonl");
    let out = qwalk(&[
        "compile",
        "walk-to-net",
        "--in",
        walk_path.to_str().unwrap(),
        "--out",
        back_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let back = NetworkDocument::parse(&std::fs::read_to_string(&back_path).unwrap()).unwrap();
    assert!(max_abs_diff(&back.mode_map().unwrap(), &net.mode_map().unwrap()) <= 1e-9);
}

#[test]
fn round_trip_through_both_directions() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "walk.json",
        r#"{"schema": 1, "graph": {"preset": "line", "size": 4}, "coin": "hadamard", "steps": 3,
            "defects": [{"cphase": {"a": [1, 0], "b": [2, 3], "phase": 1.0}}]}"#,
    );
    let net_path = dir.path().join("net.jsonl");
    let walk_path = dir.path().join("walk2.json");
    let a = qwalk(&[
        "compile",
        "walk-to-net",
        "--in",
        input.to_str().unwrap(),
        "--out",
        net_path.to_str().unwrap(),
    ]);
    assert!(a.status.success(), "{}", stderr(&a));
    let b = qwalk(&[
        "compile",
        "net-to-walk",
        "--in",
        net_path.to_str().unwrap(),
        "--out",
        walk_path.to_str().unwrap(),
        "--batch",
    ]);
    assert!(b.status.success(), "{}", stderr(&b));
    for report in ["net.jsonl.report.json", "walk2.json.report.json"] {
        let r = read_json(&dir.path().join(report));
        assert!(r["mode_map_distance"].as_f64().unwrap() <= 1e-9, "{report}");
        assert_eq!(r["cphase_count"], 3);
    }
}

#[test]
fn network_parse_errors_have_position() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "broken.jsonl",
        "{\"schema\":1,\"modes\":3,\"elements\":[\n{\"ph\":[0,0.5]},\n{\"bs\":[0,1]}\n]}\n",
    );
    let out = qwalk(&[
        "compile",
        "net-to-walk",
        "--in",
        input.to_str().unwrap(),
        "--out",
        dir.path().join("w.json").to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    let msg = stderr(&out);
    assert!(msg.contains("line 3"), "{msg}");
}

#[test]
fn position_file_covers_every_vertex() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(
        dir.path(),
        r#"{"schema": 1, "graph": {"vertices": 4, "edges": [[0, 1], [1, 2], [2, 3], [3, 3]]}, "walkers": 1,
            "initial": {"kind": "modes", "walkers": [[{"mode": [3, 3]}, {"mode": [3, 2], "amp": [0, 1]}]]},
            "coin": {"matrices": {"3": [[[0.6, 0], [0.8, 0]], [[0.8, 0], [-0.6, 0]]]}, "default": "dft"},
            "steps": 4, "outputs": ["position"]}"#,
        "edges",
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = read_csv(&dir.path().join("edges/position.csv"));
    let dist: BTreeMap<usize, f64> = rows
        .iter()
        .map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap()))
        .collect();
    assert_eq!(dist.keys().copied().collect::<Vec<_>>(), vec![0, 1, 2, 3]);
    assert!((dist.values().sum::<f64>() - 1.0).abs() < 1e-9);
}
