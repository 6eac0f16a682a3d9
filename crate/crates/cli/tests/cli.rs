use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lorentz-forge")).args(args).output().expect("binary runs")
}

fn write_grid(dir: &Path, name: &str, json: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, json).unwrap();
    p.to_str().unwrap().to_owned()
}

/// The record line of a JSON norm/interp output (the line after the header).
fn record(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    let head: Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    assert_eq!(head["kind"], "header");
    assert_eq!(head["content_hash"].as_str().unwrap().len(), 64);
    serde_json::from_str(lines.next().unwrap()).unwrap()
}

#[test]
fn lorentz_norm_of_the_constant() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_grid(dir.path(), "one.json", r#"{"levels":[0,0],"values":[[1.0]]}"#);
    let out = run(&["norm", "--kind", "lorentz", "--p", "2", "2", "--q", "1", "1", "--in", &f]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = record(&out);
    assert!((r["value"].as_f64().unwrap() - 4.0).abs() < 1e-12);
    assert_eq!(r["approx_direction"], "exact");
}

#[test]
fn grand_norm_at_theta_zero_is_the_lorentz_norm() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_grid(dir.path(), "g.json", r#"{"levels":[1,1],"values":[[1.0,4.0],[3.0,2.0]]}"#);
    let common = ["--p", "2", "4", "--q", "1", "inf", "--in", f.as_str()];
    let lor = record(&run(&[&["norm", "--kind", "lorentz"][..], &common].concat()));
    let grand = record(&run(&[&["norm", "--kind", "grand", "--theta", "0", "0"][..], &common].concat()));
    assert_eq!(lor["value"], grand["value"]);
    assert_eq!(grand["approx_direction"], "exact");
    assert_eq!(grand["q"][1], "inf");
}

#[test]
fn inf_form_and_sequence_norm() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_grid(dir.path(), "g.json", r#"{"levels":[1,0],"values":[[1.0,0.5]]}"#);
    let inf = record(&run(&["norm", "--kind", "grand", "--theta", "-1", "-1", "--q", "inf", "inf", "--in", &f]));
    assert_eq!(inf["approx_direction"], "over");
    let seq = record(&run(&["norm", "--kind", "seq_grand", "--theta", "1", "1", "--q", "inf", "inf", "--J", "6", "--in", &f]));
    assert_eq!(seq["sign"], "minus");
    assert_eq!(seq["epsJ"], 6);
    assert!(seq["value"].as_f64().unwrap() > 0.0);
}

#[test]
fn csv_output_and_refinement() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_grid(dir.path(), "g.json", r#"{"levels":[0,0],"values":[[2.0]]}"#);
    let out = run(&["norm", "--kind", "mixed", "--p", "1", "1", "--level", "2", "3", "--format", "csv", "--in", &f]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().contains("value"));
    let row = lines.next().unwrap();
    assert_eq!(row.rsplit(',').next().unwrap().parse::<f64>().unwrap(), 2.0);
}

#[test]
fn missing_file_and_bad_values_exit_2() {
    let out = run(&["norm", "--kind", "lorentz", "--in", "/nonexistent/grid.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    let dir = tempfile::tempdir().unwrap();
    let f = write_grid(dir.path(), "neg.json", r#"{"levels":[0,0],"values":[[-1.0]]}"#);
    assert_eq!(run(&["norm", "--kind", "lorentz", "--in", &f]).status.code(), Some(2));
}

#[test]
fn coefficient_dumps() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_grid(dir.path(), "one.json", r#"{"levels":[2,2],"values":[[1,1,1,1],[1,1,1,1],[1,1,1,1],[1,1,1,1]]}"#);
    let dump = dir.path().join("c.json");
    let out = run(&["coeffs", "--system", "trig", "--in", &f, "--out", dump.to_str().unwrap()]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&fs::read_to_string(&dump).unwrap()).unwrap();
    let re = v["re"].as_array().unwrap();
    let im = v["im"].as_array().unwrap();
    let nonzero: usize = re
        .iter()
        .zip(im)
        .flat_map(|(r, i)| r.as_array().unwrap().iter().zip(i.as_array().unwrap()))
        .filter(|(r, i)| r.as_f64().unwrap().hypot(i.as_f64().unwrap()) > 1e-14)
        .count();
    assert_eq!(nonzero, 1);
    assert_eq!(v["system"], serde_json::json!(["trig", "trig"]));

    let out = run(&["coeffs", "--system", "walsh", "--K", "4", "4", "--in", &f]);
    assert!(out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    let resid: f64 = err.trim().rsplit(' ').next().unwrap().parse().unwrap();
    assert!(err.starts_with("parseval residual") && resid <= 1e-10, "{err}");
}

#[test]
fn walsh_beyond_resolution_exits_3_and_bad_system_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_grid(dir.path(), "g.json", r#"{"levels":[1,1],"values":[[1,2],[3,4]]}"#);
    let out = run(&["coeffs", "--system", "walsh", "--K", "4", "2", "--in", &f]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(run(&["coeffs", "--system", "haar", "--in", &f]).status.code(), Some(2));
}

#[test]
fn interp_reports_the_bound_and_terms() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_grid(dir.path(), "one.json", r#"{"levels":[0,0],"values":[[1.0]]}"#);
    let r = record(&run(&["interp", "--theta", "0.5", "0.5", "--q", "2", "2", "--t", "0.5", "0.5", "--in", &f]));
    assert_eq!(r["D"], 4.0);
    assert!(r["interp_norm"].as_f64().unwrap() <= 1.05 * r["bound_6D_lorentz"].as_f64().unwrap());
    // f₁₁ is the tail in both variables: (∫_{1/4}^1 ∫_{1/4}^1 1)^{1/2}
    assert!((r["T11"].as_f64().unwrap() - 0.75).abs() < 1e-14);
}

#[test]
fn verify_writes_reports_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    let out = run(&["verify", "--suite", "embeddings", "--seed", "7", "--out", a.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    run(&["verify", "--suite", "embeddings", "--seed", "7", "--out", b.to_str().unwrap()]);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert!(dir.path().join("a.csv").exists() && dir.path().join("a.plot.csv").exists());
    let first: Value = serde_json::from_str(fs::read_to_string(&a).unwrap().lines().next().unwrap()).unwrap();
    assert_eq!(first["config"]["suite"], "embeddings");
}

#[test]
fn verify_exit_codes() {
    assert_eq!(run(&["verify", "--suite", "nosuch"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("h.jsonl");
    // the α-uniformity criterion does not hold for every (q, r)
    assert_eq!(run(&["verify", "--suite", "hardy", "--out", out.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn help_lists_every_flag_with_its_default() {
    for (cmd, flags) in [
        ("norm", &["--kind", "--p", "--q", "--theta", "--sign", "--J", "--in", "--level", "--out", "--format"][..]),
        ("coeffs", &["--system", "--K", "--in", "--level", "--out", "--format"][..]),
        ("interp", &["--theta", "--q", "--J", "--t", "--in", "--level", "--out", "--format"][..]),
        ("verify", &["--suite", "--seed", "--out", "--thresholds", "--J"][..]),
    ] {
        let help = String::from_utf8(run(&[cmd, "--help"]).stdout).unwrap();
        for flag in flags {
            assert!(help.contains(flag), "{cmd} --help lacks {flag}");
        }
        for default in ["--p", "--q", "--theta", "--sign", "--J", "--format", "--seed", "--system"] {
            if let Some(line) = help.lines().find(|l| l.trim_start().starts_with(default)) {
                let block: String = help[help.find(line).unwrap()..].lines().take(2).collect();
                assert!(block.contains("[default:"), "{cmd}: {default} shows no default");
            }
        }
    }
}
