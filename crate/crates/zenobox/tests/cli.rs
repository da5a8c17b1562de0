use std::path::Path;
use std::process::{Command, Output};

use zenobox::read_records;

const SMALL: &str = "schema_version = 1
experiment = \"telegraph-diffusion\"
seed = 3
[params]
walkers = 10000
duration = 20
record_points = 4
";

fn zenobox(args: &[&str], out_env: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_zenobox"));
    cmd.args(args).env_remove("ZENOBOX_OUT");
    if let Some(dir) = out_env {
        cmd.env("ZENOBOX_OUT", dir);
    }
    cmd.output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn list_names_every_experiment() {
    let out = zenobox(&["list"], None);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for e in zenobox::Experiment::ALL {
        assert!(text.contains(e.name()), "{} missing", e.name());
    }
}

#[test]
fn validate_accepts_presets_and_rejects_bad_configs() {
    let presets = Path::new(env!("CARGO_MANIFEST_DIR")).join("presets");
    for e in zenobox::Experiment::ALL {
        let path = presets.join(format!("{}.toml", e.name()));
        let out = zenobox(&["validate", path.to_str().unwrap()], None);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let dir = tempfile::tempdir().unwrap();
    let unknown = write(
        dir.path(),
        "a.toml",
        "schema_version = 1\nexperiment = \"berry-spatial\"\nbogus = 1\n",
    );
    let empty = write(
        dir.path(),
        "b.toml",
        "schema_version = 1\nexperiment = \"zeno-cutoff\"\n[params]\ndts = []\n",
    );
    for path in [unknown, empty] {
        let out = zenobox(&["validate", &path], None);
        assert_eq!(out.status.code(), Some(2));
        assert!(String::from_utf8_lossy(&out.stderr).contains("invalid config"));
    }
    let missing = zenobox(&["validate", "/nonexistent/config.toml"], None);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn run_writes_csv_to_flag_dir_over_env() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "t.toml", SMALL);
    let env_dir = dir.path().join("from-env");
    let flag_dir = dir.path().join("from-flag");

    let out = zenobox(&["run", &cfg, "--threads", "2"], Some(&env_dir));
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(env_dir.join("telegraph-diffusion.csv").exists());

    let out = zenobox(
        &[
            "run",
            &cfg,
            "--out",
            flag_dir.to_str().unwrap(),
            "--seed",
            "9",
        ],
        Some(&env_dir),
    );
    assert!(out.status.success());
    let records = read_records(&flag_dir.join("telegraph-diffusion.csv")).unwrap();
    assert_eq!(records.len(), 4);
    assert!(records.iter().all(|r| r.provenance.seed == 9));
    assert_eq!(records[0].provenance.config_hash.len(), 64);
    assert_eq!(
        records[0].provenance.code_version,
        env!("CARGO_PKG_VERSION")
    );
    for suffix in ["-summary.csv", "-series.csv", "-report.txt"] {
        assert!(flag_dir
            .join(format!("telegraph-diffusion{suffix}"))
            .exists());
    }
    // the env dir still holds the seed-3 run
    let earlier = read_records(&env_dir.join("telegraph-diffusion.csv")).unwrap();
    assert!(earlier.iter().all(|r| r.provenance.seed == 3));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "t.toml", SMALL);
    let mut files = Vec::new();
    for (k, threads) in ["1", "3"].iter().enumerate() {
        let out_dir = dir.path().join(format!("run{k}"));
        let out = zenobox(
            &[
                "run",
                &cfg,
                "--out",
                out_dir.to_str().unwrap(),
                "--threads",
                threads,
            ],
            None,
        );
        assert!(out.status.success());
        files.push(std::fs::read(out_dir.join("telegraph-diffusion.csv")).unwrap());
    }
    assert_eq!(files[0], files[1]);
}

#[test]
fn zero_threads_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "t.toml", SMALL);
    let out = zenobox(
        &[
            "run",
            &cfg,
            "--threads",
            "0",
            "--out",
            dir.path().to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exhausted_quadrature_budget_exits_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "q.toml",
        "schema_version = 1
experiment = \"epsilon-equivalence\"
[params]
modes = 1
projections = 1
grid_intervals = 512
scales = 8
quad_tol = 1e-300
",
    );
    let out = zenobox(&["run", &cfg, "--out", dir.path().to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
}
