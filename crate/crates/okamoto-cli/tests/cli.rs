use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_okamoto"))
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Run {
    let o: Output = bin().args(args).output().expect("binary runs");
    Run {
        code: o.status.code().expect("exit code"),
        stdout: String::from_utf8(o.stdout).unwrap(),
        stderr: String::from_utf8(o.stderr).unwrap(),
    }
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const MONO: &str = r#"{"lambda": [0.11, 0.12, 0.13, 0.15], "point": {"q": [0.7, 0.4], "h1": [0.3, -0.2]}}"#;
const PVI: &str = r#"{"lambda": [0.11, 0.12, 0.13, 0.15], "pvi": {"x": [0.4, 0.2], "y": [0.3, -0.1], "t0": [0.5, 0.5], "t1": [0.7, 0.6]}}"#;
const CONT: &str = r#"{"lambda": [0.11, 0.12, 0.13, 0.15], "point": {"q": [0.7, 0.4], "h1": [0.3, -0.2]},
    "continuation": {"path": [[2, 0], [2.2, 0.2]], "steps": 12}}"#;

fn report(r: &Run) -> Value {
    serde_json::from_str(&r.stdout).unwrap_or_else(|e| panic!("{e}: {}", r.stderr))
}

#[test]
fn verify_surface_default() {
    let r = run(&["verify-surface"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = report(&r);
    assert_eq!(v["schema"], "report-v1");
    assert_eq!(v["results"]["dynkin"], "D4(1)");
    assert_eq!(v["results"]["kodaira"], "I0*");
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
    assert_eq!(v["tool"]["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn verify_surface_coincident() {
    let d = TempDir::new().unwrap();
    let c = write(d.path(), "c.json", r#"{"coincidences": [true, false, true, false]}"#);
    let r = run(&["verify-surface", "--config", s(&c)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = report(&r);
    let names: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"C2[1]^2 = -2") && names.contains(&"C1[3]^2 = -1"));
    assert_eq!(v["results"]["dynkin"], "D4(1)");
}

#[test]
fn monodromy_traces() {
    let d = TempDir::new().unwrap();
    let c = write(d.path(), "m.json", MONO);
    let r = run(&["monodromy", "--config", s(&c)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = report(&r);
    let traces = v["results"]["rep"]["traces"].as_array().unwrap();
    for (i, l) in [0.11f64, 0.12, 0.13, 0.15].iter().enumerate() {
        let t = traces[i].as_array().unwrap();
        assert!((t[0].as_f64().unwrap() - 2.0 * (std::f64::consts::TAU * l).cos()).abs() <= 1e-6);
        assert!(t[1].as_f64().unwrap().abs() <= 1e-6);
    }
    assert_eq!(v["results"]["speciality"], "generic");
    assert_eq!(v["results"]["classification"]["verdict"], "smooth-locus");
    assert_eq!(v["results"]["conn"]["schema"], "conn-v1");
}

#[test]
fn stability_verdicts() {
    let d = TempDir::new().unwrap();
    let stable = write(d.path(), "a.json", r#"{"lambda": ["11/100", "12/100", "13/100", "15/100"], "point": {"q": ["1/3", "1/2"], "h1": 2}}"#);
    let r = run(&["stability", "--config", s(&stable)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(report(&r)["results"]["alpha"]["verdict"], "stable");

    let zero = r#"{"lambda": ["11/100", "12/100", "13/100", "15/100"], "point": {"q": ["1/3", "1/2"], "h1": 2}, "omega3_zero": true"#;
    let expect = write(d.path(), "b.json", &format!("{zero}, \"expect\": \"unstable\"}}"));
    let r = run(&["stability", "--config", s(&expect)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = report(&r);
    assert_eq!(v["results"]["alpha"]["witness"], "O+0");

    let plain = write(d.path(), "c.json", &format!("{zero}}}"));
    let r = run(&["stability", "--config", s(&plain)]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("check failed: alpha verdict"), "{}", r.stderr);
}

#[test]
fn exit_code_two_for_usage_and_schema_errors() {
    let d = TempDir::new().unwrap();
    let cases = [
        ("missing-lambda.json", r#"{"point": {"q": 1, "h1": 1}}"#, "monodromy"),
        ("not-json.json", "{lambda: ", "monodromy"),
        ("unknown.json", r#"{"lambda": [0.1, 0.2, 0.3, 0.4], "colour": 1}"#, "monodromy"),
        ("three.json", r#"{"lambda": [0.1, 0.2, 0.3]}"#, "monodromy"),
        ("bad-number.json", r#"{"lambda": ["x", 0.2, 0.3, 0.4]}"#, "monodromy"),
        ("zero-tol.json", r#"{"lambda": [0.11, 0.12, 0.13, 0.15], "monodromy": {"tol": 0}}"#, "monodromy"),
        ("threshold.json", r#"{"thresholds": {"trace": -1}}"#, "verify-surface"),
        ("wrong-cmd.json", r#"{"command": "pvi"}"#, "verify-surface"),
        ("on-pole.json", r#"{"lambda": [0.11, 0.12, 0.13, 0.15], "point": {"q": 1, "h1": 1}}"#, "monodromy"),
        ("same-t.json", r#"{"lambda": [0.11, 0.12, 0.13, 0.15], "t": [0, 1, 1, 3]}"#, "monodromy"),
        ("pvi-missing.json", r#"{"lambda": [0.11, 0.12, 0.13, 0.15], "pvi": {"x": 1}}"#, "pvi"),
        ("pvi-t0.json", r#"{"lambda": [0.11, 0.12, 0.13, 0.15], "pvi": {"x": 1, "y": 1, "t0": 0, "t1": 0.5}}"#, "pvi"),
        ("special.json", r#"{"lambda": [0.5, 0.12, 0.13, 0.15], "point": {"q": [0.7, 0.4], "h1": 1}}"#, "continue"),
        ("weights.json", r#"{"lambda": ["11/100", "12/100", "13/100", "15/100"], "weight": {"alpha_prime": [1, 2]}}"#, "stability"),
    ];
    for (name, body, cmd) in cases {
        let c = write(d.path(), name, body);
        let r = run(&[cmd, "--config", s(&c)]);
        assert_eq!(r.code, 2, "{name}: {}", r.stderr);
        assert!(r.stderr.starts_with("error: "), "{name}: {}", r.stderr);
    }
    let m = write(d.path(), "m.json", MONO);
    for args in [
        vec!["monodromy", "--config", s(&m), "--tol=-1"],
        vec!["monodromy", "--config", s(&m), "--tol", "0"],
        vec!["monodromy", "--config", "/nonexistent/config.json"],
        vec!["report", "--config", s(&m)],
        vec!["report"],
        vec!["frobnicate"],
        vec!["monodromy", "--seed", "minus-one"],
        vec!["verify-surface", "--csv", "/tmp/never-written.csv"],
    ] {
        let r = run(&args);
        assert_eq!(r.code, 2, "{args:?}: {}", r.stderr);
    }
}

#[test]
fn exit_code_one_for_numerical_failures() {
    let d = TempDir::new().unwrap();
    let tight = write(d.path(), "t.json", r#"{"lambda": [0.11, 0.12, 0.13, 0.15], "point": {"q": [0.7, 0.4], "h1": [0.3, -0.2]}, "thresholds": {"trace": 1e-30}}"#);
    let r = run(&["monodromy", "--config", s(&tight)]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("check failed: trace contract"));
    assert_eq!(report(&r)["passed"], false);

    let clear = write(
        d.path(),
        "c.json",
        r#"{"lambda": [0.11, 0.12, 0.13, 0.15], "point": {"q": [0.7, 0.4], "h1": [0.3, -0.2]}, "monodromy": {"clearance_factor": 0.5}}"#,
    );
    let r = run(&["monodromy", "--config", s(&clear)]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("check failed: monodromy"), "{}", r.stderr);

    let pvi = write(d.path(), "p.json", &PVI.replace("\"pvi\"", "\"thresholds\": {\"residual\": 1e-30}, \"pvi\""));
    let r = run(&["pvi", "--config", s(&pvi)]);
    assert_eq!(r.code, 1, "{}", r.stderr);
    assert!(r.stderr.contains("check failed: grid residual"), "{}", r.stderr);
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(run(&["--help"]).code, 0);
    assert!(run(&["--version"]).stdout.contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn identical_runs_are_byte_identical() {
    let d = TempDir::new().unwrap();
    for (name, body, cmd) in [("m.json", MONO, "monodromy"), ("c.json", CONT, "continue"), ("p.json", PVI, "pvi")] {
        let c = write(d.path(), name, body);
        let a = run(&[cmd, "--config", s(&c), "--seed", "7"]);
        let b = run(&[cmd, "--config", s(&c), "--seed", "7"]);
        assert_eq!(a.code, 0, "{cmd}: {}", a.stderr);
        assert_eq!(a.stdout, b.stdout, "{cmd}");
    }
}

#[test]
fn reports_round_trip() {
    let d = TempDir::new().unwrap();
    let stab = r#"{"lambda": ["11/100", "12/100", "13/100", "15/100"]}"#;
    for (name, body, cmd) in [("v.json", "{}", "verify-surface"), ("s.json", stab, "stability"), ("m.json", MONO, "monodromy"), ("c.json", CONT, "continue"), ("p.json", PVI, "pvi")] {
        let c = write(d.path(), name, body);
        let out = d.path().join(format!("{cmd}.report.json"));
        let r = run(&[cmd, "--config", s(&c), "--out", s(&out)]);
        assert_eq!(r.code, 0, "{cmd}: {}", r.stderr);
        assert!(r.stdout.is_empty());
        let again = run(&["report", "--config", s(&out)]);
        assert_eq!(again.code, 0);
        assert_eq!(again.stdout, std::fs::read_to_string(&out).unwrap(), "{cmd}");
    }
}

#[test]
fn failed_report_keeps_exit_status() {
    let d = TempDir::new().unwrap();
    let c = write(d.path(), "t.json", r#"{"lambda": [0.11, 0.12, 0.13, 0.15], "thresholds": {"relation": 1e-30}}"#);
    let out = d.path().join("r.json");
    assert_eq!(run(&["monodromy", "--config", s(&c), "--out", s(&out)]).code, 1);
    assert_eq!(run(&["report", "--config", s(&out)]).code, 1);
}

#[test]
fn continuation_series_as_csv() {
    let d = TempDir::new().unwrap();
    let c = write(d.path(), "c.json", CONT);
    let csv = d.path().join("drift.csv");
    let out = d.path().join("r.json");
    let r = run(&["continue", "--config", s(&c), "--csv", s(&csv), "--out", s(&out)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|h| *h == "drift").unwrap();
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    let steps = v["results"]["steps"].as_array().unwrap();
    assert_eq!(rows.len(), 13);
    assert_eq!(rows.len(), steps.len());
    for (row, step) in rows.iter().zip(steps) {
        assert_eq!(row[k], step["drift"].as_f64().unwrap());
        assert!(row[k] <= 1e-6);
    }
    let pvi = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "PVI cross-check").unwrap();
    assert_eq!(pvi["blocking"], false);
}

#[test]
fn pvi_csv_columns() {
    let d = TempDir::new().unwrap();
    let c = write(d.path(), "p.json", PVI);
    let csv = d.path().join("t.csv");
    let r = run(&["pvi", "--config", s(&c), "--csv", s(&csv)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("t_re,t_im,x_re,x_im,y_re,y_im,h_re,h_im,residual\n"));
    assert!(text.lines().count() > 3);
}

#[test]
fn seed_and_config_hash() {
    let d = TempDir::new().unwrap();
    let c = write(d.path(), "a.json", r#"{"lambda": [0.11, 0.12, 0.13, 0.15]}"#);
    let spaced = write(d.path(), "b.json", "{ \"lambda\" : [0.11,0.12,  0.13, 0.15] }\n");
    let a = report(&run(&["monodromy", "--config", s(&c), "--seed", "1"]));
    let b = report(&run(&["monodromy", "--config", s(&spaced), "--seed", "1"]));
    let other = report(&run(&["monodromy", "--config", s(&c), "--seed", "2"]));
    assert_eq!(a["config_sha256"], b["config_sha256"]);
    assert_eq!(a["config_sha256"].as_str().unwrap().len(), 64);
    assert_eq!(a["results"]["point"], b["results"]["point"]);
    assert_ne!(a["results"]["point"], other["results"]["point"]);
    assert_eq!(other["seed"], 2);
    let seeded = write(d.path(), "c.json", r#"{"lambda": [0.11, 0.12, 0.13, 0.15], "seed": 2}"#);
    let s2 = report(&run(&["monodromy", "--config", s(&seeded)]));
    assert_eq!(s2["results"]["point"], other["results"]["point"]);
    assert_ne!(s2["config_sha256"], a["config_sha256"]);
}

#[test]
fn output_field_in_config() {
    let d = TempDir::new().unwrap();
    let out = d.path().join("via-config.json");
    let c = write(d.path(), "c.json", &format!(r#"{{"output": {:?}}}"#, s(&out)));
    let r = run(&["verify-surface", "--config", s(&c)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.is_empty());
    assert!(std::fs::read_to_string(&out).unwrap().contains("\"report-v1\""));
}
