use std::io::Write;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isochrone"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}

#[test]
fn sample_quintic_five_points() {
    let o = run(&["sample", "--family", "quintic", "--points", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,h,V,g,margin");
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[3], "0,0,0,0,0");
    let xs: Vec<f64> = lines[1..]
        .iter()
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(xs.first(), Some(&-5.0));
    assert_eq!(xs.last(), Some(&5.0));
}

#[test]
fn sample_is_deterministic() {
    let args = [
        "sample",
        "--family",
        "lambert:rho=1,a=1",
        "--points",
        "101",
        "--range=-3:3",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn csv_floats_round_trip() {
    let o = run(&["export", "--family", "dorignac:beta=1", "--points", "7"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for line in text.lines().skip(1) {
        for field in line.split(',') {
            let v: f64 = field.parse().unwrap();
            assert!(v.is_finite());
        }
    }
}

#[test]
fn gcmp_rejects_non_global_parameters() {
    let o = run(&["compare-gcmp", "--b", "1", "--c", "0.1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("b² - 4c < 0"));
}

#[test]
fn gcmp_matches_stillinger() {
    let o = run(&["compare-gcmp", "--b=-1", "--c", "3", "--omega", "1.5"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["pass"], true);
    assert_eq!(v["lambda"], 2.75);
    assert_eq!(v["a"], -0.5);
}

#[test]
fn isochrony_pass_and_fail() {
    let o = run(&[
        "verify-isochrony",
        "--family",
        "stillinger:lambda=1,a=1",
        "--energies",
        "0.01,1,100",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["pass"], true);

    let o = run(&[
        "verify-isochrony",
        "--family",
        "quartic-control",
        "--energies",
        "0.1,1",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["pass"], false);
    assert_eq!(v["first_offending_energy"], 0.1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("E = 0.1"));
}

#[test]
fn necessary_and_inequality_checks() {
    let o = run(&["verify-necessary", "--family", "rational:a=1"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["verify-necessary", "--family", "quartic-control"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["verify-inequality", "--family", "quartic-control"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["verify-involution", "--family", "exp"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(
        run(&["sample", "--family", "quintic", "--points", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["sample", "--family", "nonesuch"]).status.code(), Some(2));
    assert_eq!(
        run(&["sample", "--family", "stillinger:lambda=-1,a=0"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn config_file_and_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let out = dir.path().join("out.csv");
    let mut f = std::fs::File::create(&cfg).unwrap();
    write!(f, r#"{{"family": "dorignac:beta=0.5", "points": 3, "omega": 2}}"#).unwrap();
    drop(f);
    let o = run(&[
        "sample",
        "--config",
        cfg.to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 4);

    // Flags override the file.
    let o = run(&["sample", "--config", cfg.to_str().unwrap(), "--points", "4"]);
    assert_eq!(stdout(&o).lines().count(), 5);

    let mut f = std::fs::File::create(&cfg).unwrap();
    write!(f, r#"{{"famly": "quintic"}}"#).unwrap();
    drop(f);
    assert_eq!(
        run(&["sample", "--config", cfg.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn list_names_families() {
    let o = run(&["list"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for name in ["rational", "stillinger", "dorignac", "lambert", "quintic"] {
        assert!(text.contains(name), "{name}");
    }
}
