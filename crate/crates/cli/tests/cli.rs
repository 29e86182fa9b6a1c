use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::tempdir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_homoclinic")).args(args).output().expect("spawn homoclinic")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows of a CSV document: skips `#` metadata and the header.
fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn csv_header(text: &str) -> String {
    text.lines().find(|l| !l.starts_with('#')).unwrap().to_string()
}

fn meta(text: &str, key: &str) -> Option<String> {
    text.lines()
        .filter_map(|l| l.strip_prefix("# "))
        .find_map(|l| l.strip_prefix(&format!("{key}=")).map(str::to_string))
}

#[test]
fn equilibria_reference() {
    let o = run(&[]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let rows = csv_rows(&s);
    assert_eq!(rows.len(), 3);
    assert_eq!(rows.iter().filter(|r| r[8] == "saddle").count(), 1);
    assert_eq!(csv_header(&s), "a,b,rho,theta,eig1_re,eig1_im,eig2_re,eig2_im,class,residual");
}

#[test]
fn equilibria_single_root_and_continuum() {
    let o = run(&["--A", "1", "--B", "0", "--J", "1e-3", "--gamma", "0", "--C", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(csv_rows(&stdout(&o)).len(), 1);

    let o = run(&["--A", "0", "--B", "0", "--J", "0"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("continuum"));
}

#[test]
fn orbit_files_conserve_energy() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("orbit.csv");
    let o = run(&["--command", "orbit", "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for b in ["lower", "upper"] {
        let text = std::fs::read_to_string(dir.path().join(format!("orbit_{b}.csv"))).unwrap();
        assert_eq!(csv_header(&text), "t,rho,theta,a,b,energy_err,ode_residual");
        assert_eq!(meta(&text, "branch").as_deref(), Some(b));
        for key in ["rho_star", "q_coeff", "energy", "A", "C"] {
            assert!(meta(&text, key).is_some(), "{key}");
        }
        let rows = csv_rows(&text);
        assert_eq!(rows.len(), 2001);
        assert!(rows.iter().all(|r| r[5].parse::<f64>().unwrap() < 1e-8));
    }
}

#[test]
fn orbit_two_samples_are_endpoints() {
    let o = run(&["--command", "orbit", "--branch", "lower", "--samples", "2", "--t-min", "-5", "--t-max", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][0].parse::<f64>().unwrap(), -5.0);
    assert_eq!(rows[1][0].parse::<f64>().unwrap(), 5.0);
}

#[test]
fn orbit_json_matches_csv_bitwise() {
    let args = ["--command", "orbit", "--branch", "upper", "--samples", "101"];
    let csv = stdout(&run(&args));
    let json: Value = serde_json::from_str(&stdout(&run(&[&args[..], &["--format", "json"]].concat()))).unwrap();
    let rows = json["rows"].as_array().unwrap();
    let cols = ["t", "rho", "theta", "a", "b", "energy_err", "ode_residual"];
    for (r, c) in rows.iter().zip(csv_rows(&csv)) {
        for (k, col) in cols.iter().enumerate() {
            assert_eq!(r[col].as_f64().unwrap().to_bits(), c[k].parse::<f64>().unwrap().to_bits());
        }
    }
    assert_eq!(json["meta"]["branch"], "upper");
}

#[test]
fn orbit_without_saddle_is_nonexistence() {
    let o = run(&["--command", "orbit", "--A", "1", "--B", "0", "--J", "1e-3", "--gamma", "0"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn verify_is_deterministic_and_detects_perturbation() {
    let a = run(&["--command", "verify", "--seed", "7"]);
    let b = run(&["--command", "verify", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let rep: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(rep["meta"]["passed"], true);
    assert!(String::from_utf8_lossy(&a.stderr).contains("all 20 checks passed"));

    let bad = run(&["--command", "verify", "--rho-star-scale", "1.01"]);
    assert_eq!(bad.status.code(), Some(5));
    let rep: Value = serde_json::from_slice(&bad.stdout).unwrap();
    let failed: Vec<&str> = rep["rows"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["passed"] == false)
        .map(|r| r["check"].as_str().unwrap())
        .collect();
    assert!(failed.contains(&"lower.q_eigenvalue"), "{failed:?}");
}

#[test]
fn portrait_sizes_and_origin() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("p.csv");
    let o = run(&["--command", "portrait", "--bounds", "-0.8,0.8", "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv_rows(&text).len(), 40000);
    assert!(meta(&text, "saddle_level").unwrap().parse::<f64>().is_ok());

    let o = run(&["--command", "portrait", "--grid-nx", "2", "--grid-ny", "2"]);
    assert_eq!(csv_rows(&stdout(&o)).len(), 4);

    let o = run(&["--command", "portrait", "--grid-nx", "3", "--grid-ny", "3", "--bounds", "1"]);
    let rows = csv_rows(&stdout(&o));
    let origin = rows.iter().find(|r| r[0].parse::<f64>().unwrap() == 0.0 && r[1].parse::<f64>().unwrap() == 0.0);
    assert_eq!(origin.unwrap()[2].parse::<f64>().unwrap(), 0.0);
}

#[test]
fn sweep_rows_and_validation() {
    let o = run(&["--command", "sweep", "--sweep-x", "A", "--bounds", "0,0.5", "--grid-nx", "101"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 101);
    for r in &rows {
        if r[5] == "false" {
            assert_eq!(r[6], "1");
        }
    }
    assert_eq!(run(&["--command", "sweep", "--grid-nx", "0"]).status.code(), Some(2));

    let o =
        run(&["--command", "sweep", "--sweep-y", "J", "--bounds", "0,0.4,0,0.01", "--grid-nx", "3", "--grid-ny", "2"]);
    assert_eq!(csv_rows(&stdout(&o)).len(), 6);
}

#[test]
fn config_precedence() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# reference run\nA = 0.2\ngamma=20\ndegrees=true\n").unwrap();
    let c = cfg.to_str().unwrap();

    let from_file = stdout(&run(&["--config", c]));
    assert_eq!(meta(&from_file, "A").unwrap().parse::<f64>().unwrap(), 0.2);
    let g = meta(&from_file, "gamma").unwrap().parse::<f64>().unwrap();
    assert!((g - 20f64.to_radians()).abs() < 1e-15);

    let flag_wins = stdout(&run(&["--config", c, "--A", "0.05"]));
    assert_eq!(meta(&flag_wins, "A").unwrap().parse::<f64>().unwrap(), 0.05);

    let missing = run(&["--config", dir.path().join("nope").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
    std::fs::write(&cfg, "bogus=1\n").unwrap();
    assert_eq!(run(&["--config", c]).status.code(), Some(2));
}

#[test]
fn bad_flags_are_config_errors() {
    assert_eq!(run(&["--samples", "1", "--command", "orbit"]).status.code(), Some(2));
    assert_eq!(run(&["--nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["--C", "-1"]).status.code(), Some(2));
    assert!(Path::new(env!("CARGO_BIN_EXE_homoclinic")).exists());
}
