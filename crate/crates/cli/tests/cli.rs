use std::fs;
use std::path::Path;
use std::process::Command;

use serde_json::Value;
use spindle_cli::dispatch_to;
use spindle_core::io::read_table;
use spindle_core::pneumatics::{self, PneumaticCircuit};

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("spindle").chain(args.iter().copied());
    let code = dispatch_to(argv, &mut out, &mut err);
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn json(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.extend(["--format", "json"]);
    let r = run(&a);
    assert_eq!(r.code, 0, "{}", r.stderr);
    serde_json::from_str(&r.stdout).unwrap()
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_spindle");
    let ok = Command::new(bin)
        .args(["haa", "torque", "--points", "3"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));

    let bad = Command::new(bin)
        .args(["haa", "torque", "--nope"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let err = String::from_utf8_lossy(&bad.stderr);
    assert!(err.starts_with("error[E_USAGE]"));
    assert!(err.contains("Usage:"));

    let domain = Command::new(bin)
        .args(["haa", "torque", "--pressure-kpa", "500"])
        .output()
        .unwrap();
    assert_eq!(domain.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&domain.stderr).starts_with("error[E_DOMAIN]"));
}

#[test]
fn help_and_version_succeed() {
    let h = run(&["--help"]);
    assert_eq!(h.code, 0);
    assert!(h.stdout.contains("geometry"));
    assert_eq!(run(&["--version"]).code, 0);
    assert_eq!(run(&[]).code, 2);
}

#[test]
fn geometry_volume_json() {
    let v = json(&["geometry", "volume"]);
    let ml = v["volume_ml"].as_f64().unwrap();
    assert!((ml - 357.0).abs() <= 35.7, "{ml}");
    assert_eq!(v["ucaa_volume_ml"].as_f64().unwrap(), 555.0);
    let red = v["reduction_vs_ucaa_percent"].as_f64().unwrap();
    assert!((red - 100.0 * (1.0 - ml / 555.0)).abs() < 1e-9);

    let u = json(&["geometry", "volume", "--profile", "ucaa"]);
    assert_eq!(u["volume_ml"].as_f64().unwrap(), 555.0);
    assert_eq!(run(&["geometry", "volume", "--profile", "nope"]).code, 2);
}

#[test]
fn zero_pressure_gives_zero_force_and_torque() {
    let r = run(&["haa", "torque", "--pressure-kpa", "0"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let t = read_table(&r.stdout).unwrap();
    assert_eq!(t.rows.len(), 211);
    for col in ["force_n", "torque_nm"] {
        assert!(t.column(col).unwrap().iter().all(|&v| v == 0.0));
    }
}

#[test]
fn csv_round_trips_through_core_reader() {
    let r = run(&["pouch", "curve", "--points", "21", "--pressure-kpa", "50"]);
    assert_eq!(r.code, 0);
    let t = read_table(&r.stdout).unwrap();
    t.expect_header(&[
        "h_mm",
        "w4_mm",
        "w5_mm",
        "area_mm2",
        "force_n",
        "short_regime",
    ])
    .unwrap();
    assert_eq!(t.rows.len(), 21);
    for row in &t.rows {
        assert!((row[4] - 0.05 * row[3]).abs() <= 1e-9 * row[3].max(1.0));
    }
    let flags = t.column("short_regime").unwrap();
    assert_eq!(flags[0], 0.0);
    assert_eq!(*flags.last().unwrap(), 1.0);
}

#[test]
fn design_frontier_round_trips() {
    let r = run(&["design", "optimize", "--m-target-nm", "9.5"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let t = read_table(&r.stdout).unwrap();
    let feasible = t.column("feasible").unwrap();
    assert!(feasible.iter().any(|&f| f == 1.0));
    let v = json(&["design", "optimize", "--m-target-nm", "9.5"]);
    let best = v["report"]["volume_ml"].as_f64().unwrap();
    let min_feasible = t
        .rows
        .iter()
        .filter(|r| r[8] == 1.0)
        .map(|r| r[5])
        .fold(f64::INFINITY, f64::min);
    assert!((best - min_feasible).abs() <= 1e-9 * best);
}

#[test]
fn infeasible_design_is_a_domain_failure() {
    let r = run(&["design", "optimize", "--m-target-nm", "40"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.starts_with("error[E_INFEASIBLE]"));
    assert!(r.stdout.is_empty());
}

#[test]
fn outputs_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [a.path(), b.path()] {
        let d = dir.to_str().unwrap();
        for cmd in [
            &[
                "pouch",
                "curve",
                "--oracle-grid",
                "60",
                "--points",
                "5",
                "--seed",
                "7",
            ][..],
            &["pneumo", "bode", "--points", "6"],
            &["sim", "assist"],
        ] {
            let mut args = cmd.to_vec();
            args.extend(["--out-dir", d, "--plot", "svg"]);
            assert_eq!(run(&args).code, 0);
        }
    }
    for f in [
        "pouch_curve.csv",
        "pouch_curve.svg",
        "pneumo_bode.csv",
        "pneumo_bode.svg",
        "sim_assist.svg",
    ] {
        let x = fs::read(a.path().join(f)).unwrap();
        assert!(!x.is_empty());
        assert_eq!(x, fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let t = read_table(&fs::read_to_string(a.path().join("pouch_curve.csv")).unwrap()).unwrap();
    let area = t.column("area_mm2").unwrap();
    let mc = t.column("mc_area_mm2").unwrap();
    assert!((mc[0] - area[0]).abs() / area[0] < 0.05);
}

#[test]
fn svg_without_out_dir_is_usage_error() {
    let r = run(&["haa", "torque", "--plot", "svg"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.starts_with("error[E_USAGE]"));
}

fn attr_values<'a>(svg: &'a str, class: &str) -> Vec<&'a str> {
    svg.split("<line")
        .filter(|l| l.contains(&format!("class=\"{class}\"")))
        .filter_map(|l| l.split("data-t=\"").nth(1)?.split('"').next())
        .collect()
}

#[test]
fn step_plot_marks_rise_crossings() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let r = run(&[
        "pneumo",
        "step",
        "--pressure-kpa",
        "60",
        "--out-dir",
        d,
        "--plot",
        "svg",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let svg = fs::read_to_string(dir.path().join("pneumo_step.svg")).unwrap();
    assert_eq!(svg.matches("class=\"threshold\"").count(), 2);
    let ts: Vec<f64> = attr_values(&svg, "crossing")
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    assert_eq!(ts.len(), 2);

    let step = pneumatics::step_response(
        &PneumaticCircuit::default(),
        60.0,
        6.0,
        pneumatics::DEFAULT_DT,
    )
    .unwrap();
    let rise = step.rise_time.unwrap();
    assert!(((ts[1] - ts[0]) - rise).abs() <= 1e-9, "{ts:?} vs {rise}");
    let t = read_table(&fs::read_to_string(dir.path().join("pneumo_step.csv")).unwrap()).unwrap();
    assert_eq!(t.rows.len(), step.trace.len());
}

#[test]
fn config_merges_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        "[global]\nformat = \"json\"\n\n[haa_torque]\npressure_kpa = 40.0\npoints = 3\n",
    )
    .unwrap();
    let c = cfg.to_str().unwrap();
    let r = run(&["--config", c, "haa", "torque"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["pressure_kpa"].as_f64().unwrap(), 40.0);
    assert_eq!(v["points"].as_array().unwrap().len(), 3);

    let r = run(&[
        "--config",
        c,
        "haa",
        "torque",
        "--pressure-kpa",
        "70",
        "--format",
        "csv",
    ]);
    let t = read_table(&r.stdout).unwrap();
    assert_eq!(t.rows.len(), 3);
    let direct = run(&["haa", "torque", "--pressure-kpa", "70", "--points", "3"]);
    assert_eq!(r.stdout, direct.stdout);

    fs::write(&cfg, "[haa_torque]\npresure_kpa = 40.0\n").unwrap();
    let r = run(&["--config", c, "haa", "torque"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.starts_with("error[E_CONFIG]"));

    let r = run(&["--config", "/nonexistent/spindle.toml", "haa", "torque"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.starts_with("error[E_IO]"));
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_spindle"))
        .args(["geometry", "volume", "--format", "json"])
        .env("SPINDLE_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("geometry_volume.json")).unwrap())
            .unwrap();
    assert!(v["volume_ml"].is_number());
}

#[test]
fn sim_zero_pressure_has_no_actuator_moment() {
    let r = run(&["sim", "assist", "--pressure-kpa", "0", "--load-kg", "1.56"]);
    assert_eq!(r.code, 0);
    let t = read_table(&r.stdout).unwrap();
    let mg = t.column("m_g_nm").unwrap();
    let res = t.column("residual_nm").unwrap();
    assert!(t.column("m_act_nm").unwrap().iter().all(|&v| v == 0.0));
    assert_eq!(mg, res);
}

fn write_recording(path: &Path, gain: f64, phase: f64) {
    let fs_hz = 1000.0;
    let mut s = String::from("time_s,AD,MD\n");
    for i in 0..4000 {
        let t = i as f64 / fs_hz;
        let active = (0.5..1.5).contains(&t) || (2.0..3.0).contains(&t);
        let env = if active { gain } else { 0.05 };
        let carrier = (2.0 * std::f64::consts::PI * 97.0 * t + phase).sin()
            + 0.5 * (2.0 * std::f64::consts::PI * 173.0 * t + 2.0 * phase).sin();
        s.push_str(&format!("{t},{},{}\n", env * carrier, 0.5 * env * carrier));
    }
    fs::write(path, s).unwrap();
    let stem = path.file_stem().unwrap().to_str().unwrap();
    fs::write(
        path.with_file_name(format!("{stem}.markers.csv")),
        "onset_s,offset_s\n0.6,1.4\n2.1,2.9\n",
    )
    .unwrap();
}

#[test]
fn emg_pipeline_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let rec = dir.path().join("rec");
    fs::create_dir(&rec).unwrap();
    let mut map = String::from("file,subject,condition\n");
    let mut mvc = String::from("subject,AD,MD\n");
    for s in 0..6 {
        let phase = 0.3 * s as f64;
        write_recording(
            &rec.join(format!("s{s}_noexo.csv")),
            1.0 + 0.1 * s as f64,
            phase,
        );
        write_recording(
            &rec.join(format!("s{s}_exo.csv")),
            0.6 + 0.05 * s as f64,
            phase,
        );
        map.push_str(&format!(
            "s{s}_noexo.csv,s{s},noexo\ns{s}_exo.csv,s{s},exo\n"
        ));
        mvc.push_str(&format!("s{s},2.0,1.0\n"));
    }
    fs::write(dir.path().join("map.csv"), map).unwrap();
    fs::write(dir.path().join("mvc.csv"), mvc).unwrap();
    let out = dir.path().join("out");
    let p = |x: &str| dir.path().join(x).to_str().unwrap().to_string();
    let (r, m, c, o) = (
        p("rec"),
        p("mvc.csv"),
        p("map.csv"),
        out.to_str().unwrap().to_string(),
    );
    let res = run(&[
        "emg",
        "run",
        "--recordings",
        &r,
        "--mvc",
        &m,
        "--conditions",
        &c,
        "--out-dir",
        &o,
    ]);
    assert_eq!(res.code, 0, "{}", res.stderr);

    let report: Value =
        serde_json::from_str(&fs::read_to_string(out.join("emg_report.json")).unwrap()).unwrap();
    assert_eq!(report["baseline"], "noexo");
    assert_eq!(report["comparisons_per_muscle"], 1);
    let muscles = report["muscles"].as_array().unwrap();
    assert_eq!(muscles.len(), 2);
    for mr in muscles {
        let cmp = &mr["pairwise"][0]["result"];
        assert_eq!(cmp["n"], 6);
        assert!((cmp["p_value"].as_f64().unwrap() - 2.0 / 64.0).abs() < 1e-12);
        assert!(cmp["reduction_percent"].as_f64().unwrap() > 30.0);
    }
    let csv = fs::read_to_string(out.join("emg_report.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);

    fs::remove_file(rec.join("s0_exo.markers.csv")).unwrap();
    let res = run(&[
        "emg",
        "run",
        "--recordings",
        &r,
        "--mvc",
        &m,
        "--conditions",
        &c,
    ]);
    assert_eq!(res.code, 1);
    assert!(res.stderr.contains("s0_exo.markers.csv"));
}
