use std::process::{Command, Output};

use logic_purify::harness::{read_csv, ExperimentConfig};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_logic-purify"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn purify_prints_headline_row() {
    let out = run(&["purify", "--fidelity", "0.8"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        text,
        "n,error_kind,round,input_fidelity,output_fidelity,success_probability,shots,seed,wall_time_ms\n\
         2,logic-bit,1,0.8,0.941176470588,0.68,0,0,0\n"
    );
}

#[test]
fn sweep_writes_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = run(&[
        "sweep", "--error", "logic-phase", "--n", "3", "--f-min", "0.5", "--f-max", "1.0", "--steps", "6", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let rows = read_csv(std::fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(rows.len(), 6);
    for r in &rows {
        let f = r.input_fidelity;
        assert!((r.output_fidelity - f * f / (f * f + (1.0 - f) * (1.0 - f))).abs() < 1e-11);
        r.validate(1).unwrap();
    }
    let sidecar = std::fs::read_to_string(dir.path().join("sweep.csv.json")).unwrap();
    let cfg: ExperimentConfig = serde_json::from_str(&sidecar).unwrap();
    assert_eq!(cfg.n, 3);
}

#[test]
fn seeded_sampling_is_byte_identical() {
    let args = ["purify", "--shots", "20000", "--seed", "99", "--rounds", "2"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["purify", "--shots", "20000", "--seed", "100", "--rounds", "2"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# two rounds\nrounds = 2\nfidelity = 0.6\n").unwrap();
    let out = run(&["purify", "--config", cfg.to_str().unwrap(), "--fidelity", "0.8"]);
    assert_eq!(code(&out), 0);
    let rows = read_csv(out.stdout.as_slice()).unwrap();
    assert_eq!(rows.len(), 2);
    assert!((rows[1].output_fidelity - 256.0 / 257.0).abs() < 1e-11);
}

#[test]
fn correct_subcommand() {
    let out = run(&["correct", "--n", "5", "--flip-position", "4", "--oracle"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rows = read_csv(out.stdout.as_slice()).unwrap();
    assert_eq!(rows[0].output_fidelity, 1.0);
    assert_eq!(rows[0].success_probability, 1.0);
}

#[test]
fn control_mode_flip_is_unsupported() {
    let out = run(&["correct", "--n", "3", "--flip-position", "1"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn invalid_config_exits_two() {
    for args in [
        &["sweep", "--f-min", "0.9", "--f-max", "0.5"][..],
        &["purify", "--n", "1"],
        &["purify", "--rounds", "0"],
        &["purify", "--fidelity", "1.5"],
        &["purify", "--error", "depolarizing"],
        &["purify", "--out", "/nonexistent-dir/x.csv"],
        &["correct", "--error", "logic-bit"],
        &["sweep", "--steps", "1"],
    ] {
        assert_eq!(code(&run(args)), 2, "{args:?}");
    }
}

#[test]
fn verify_passes_and_detects_fault() {
    let ok = run(&["verify", "--oracle"]);
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stdout));
    let report = String::from_utf8(ok.stdout).unwrap();
    assert!(report.contains("oracle-agreement-n2"));
    assert!(!report.contains("FAIL"));

    let bad = run(&["verify", "--inject-fault", "skip-reduction-hadamard"]);
    assert_eq!(code(&bad), 1);
    assert!(String::from_utf8(bad.stdout).unwrap().contains("FAIL"));
}
