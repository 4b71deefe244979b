use std::path::Path;
use std::process::{Command, Output};

fn frameflow(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frameflow"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("FRAMEFLOW_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn trivial_cocycle_has_no_transitivity() {
    let dir = tempfile::tempdir().unwrap();
    let o = frameflow(&["transitivity", "--set", "transitivity.cocycle.family=trivial"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_json(&dir.path().join("transitivity.json"));
    assert_eq!(v["payload"]["dimension"], 0);
    assert_eq!(v["payload"]["verdict"], "not_ergodic");
}

#[test]
fn calibrated_threshold_reproduces_the_anchor_at_seven() {
    let dir = tempfile::tempdir().unwrap();
    let o = frameflow(&["threshold", "--set", "threshold.n_min=7", "--set", "threshold.n_max=7"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("threshold.csv")).unwrap();
    let row = csv.lines().find(|l| l.starts_with("7,")).unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields[1], "lambda2");
    let t: f64 = fields[3].parse().unwrap();
    assert!((t - 0.497).abs() < 1e-6, "{t}");
}

#[test]
fn direct_mode_without_every_case_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = frameflow(&["threshold", "--set", "threshold.mode=direct", "--set", "threshold.q.lambda2=1.0"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("normal"));
}

#[test]
fn tables_pass_their_consistency_check() {
    let dir = tempfile::tempdir().unwrap();
    let o = frameflow(&["tables", "--set", "tables.parity_max=1000"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_json(&dir.path().join("tables.json"));
    assert_eq!(v["payload"]["consistency"]["passed"], true);
    let row7 = &v["payload"]["rows"][4];
    assert_eq!(row7["n"], 7);
    assert_eq!(row7["candidates"].as_array().unwrap().len(), 1);
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    // randomized run without a seed
    assert_eq!(frameflow(&["transitivity"], dir.path()).status.code(), Some(2));
    // unknown key
    assert_eq!(frameflow(&["threshold", "--set", "threshold.nmax=9"], dir.path()).status.code(), Some(2));
    // non-hyperbolic matrix
    let o = frameflow(&["simulate", "--set", "seed=1", "--set", "simulate.matrix=[[1,1],[0,1]]"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    // missing config file
    assert_eq!(frameflow(&["tables", "--config", "/nonexistent.toml"], dir.path()).status.code(), Some(2));
}

#[test]
fn underresolved_spectrum_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = frameflow(&["harmonics", "--set", "seed=1", "--set", "harmonics.exactness=4"], dir.path());
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn config_file_and_overrides_combine() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        r#"
seed = 5

[harmonics]
n = 4
k_max = 4

[harmonics.section]
kind = "polynomial"
terms = [{ coeff = 1.0, monomial = [0, 1] }, { coeff = 3.0, monomial = [] }]
"#,
    )
    .unwrap();
    let out = dir.path().join("o");
    let o = frameflow(&["harmonics", "--config", cfg.to_str().unwrap(), "--set", "harmonics.method=zonal"], &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_json(&out.join("harmonics.json"));
    assert_eq!(v["payload"]["spectrum"]["parity"], "even");
    assert_eq!(v["payload"]["spectrum"]["method"], "zonal");
    assert_eq!(v["payload"]["spectrum"]["degree"]["finite"], 2);
}

#[test]
fn output_dir_falls_back_to_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_frameflow"))
        .args(["threshold", "--set", "threshold.n_max=10"])
        .env("FRAMEFLOW_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("threshold.csv").exists());
}

#[test]
fn every_file_carries_version_and_hash() {
    let dir = tempfile::tempdir().unwrap();
    let o = frameflow(&["simulate", "--set", "seed=2", "--set", "simulate.steps=2000"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("orbit.csv")).unwrap();
    let v = read_json(&dir.path().join("equidistribution.json"));
    let hash = v["config_sha256"].as_str().unwrap();
    assert_eq!(hash.len(), 64);
    assert!(csv.lines().any(|l| l == format!("# config_sha256 {hash}")));
    assert!(csv.starts_with(&format!("# frameflow {}", env!("CARGO_PKG_VERSION"))));
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn geodesic_simulation_runs_in_the_octagon() {
    let dir = tempfile::tempdir().unwrap();
    let o = frameflow(
        &[
            "simulate",
            "--set",
            "seed=4",
            "--set",
            "simulate.base=geodesic",
            "--set",
            "simulate.start=[0.1, -0.2, 0.3]",
            "--set",
            "simulate.steps=1000",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("orbit.csv")).unwrap();
    assert!(csv.lines().any(|l| l.starts_with("step,re_z,im_z,angle,r00")));
}

#[test]
fn seeded_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for cmd in ["simulate", "transitivity", "harmonics"] {
        let args = [cmd, "--set", "seed=9", "--set", "simulate.steps=5000"];
        assert_eq!(frameflow(&args, a.path()).status.code(), Some(0));
        assert_eq!(frameflow(&args, b.path()).status.code(), Some(0));
    }
    for name in ["orbit.csv", "equidistribution.json", "transitivity.json", "spectrum.csv", "harmonics.json"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name}");
    }
}
