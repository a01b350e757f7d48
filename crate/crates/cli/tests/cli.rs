use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qmaxent::io::{read_json, StateFile};
use tempfile::TempDir;

fn qmaxent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmaxent")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Value printed on the line starting with `key = `.
fn field(out: &str, key: &str) -> f64 {
    let prefix = format!("{key} = ");
    let line = out.lines().find(|l| l.starts_with(&prefix)).unwrap_or_else(|| panic!("no {key} in {out}"));
    line[prefix.len()..].split_whitespace().next().unwrap().parse().unwrap()
}

const MIXED_QUBIT: &str = r#"{"rows": 2, "cols": 2, "entries": [[0.5, 0], [0, 0], [0, 0], [0.5, 0]]}"#;
const PURE_QUBIT: &str = r#"{"rows": 2, "cols": 2, "entries": [[0.5, 0], [0.5, 0], [0.5, 0], [0.5, 0]]}"#;
const IDENTITY: &str =
    r#"{"dim_in": 2, "dim_out": 2, "kraus": [{"rows": 2, "cols": 2, "entries": [[1, 0], [0, 0], [0, 0], [1, 0]]}]}"#;

fn replacer_file() -> String {
    // omega = diag(3/4, 1/4): Kraus operators sqrt(p_k) |k><j|
    let mut ops = Vec::new();
    for (k, p) in [(0usize, 0.75f64), (1, 0.25)] {
        for j in 0..2 {
            let mut e = [[0.0, 0.0]; 4];
            e[2 * k + j] = [p.sqrt(), 0.0];
            ops.push(format!(
                r#"{{"rows": 2, "cols": 2, "entries": [{}]}}"#,
                e.iter().map(|[a, b]| format!("[{a}, {b}]")).collect::<Vec<_>>().join(", ")
            ));
        }
    }
    format!(r#"{{"dim_in": 2, "dim_out": 2, "kraus": [{}]}}"#, ops.join(", "))
}

#[test]
fn entropy_of_mixed_and_pure_states() {
    let dir = TempDir::new().unwrap();
    let o = qmaxent(&["entropy-state", arg(&write(&dir, "mixed.json", MIXED_QUBIT))]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0.693147180560 nats"));
    assert!(stdout(&o).contains("1.000000000000 bits"));

    let o = qmaxent(&["entropy-state", arg(&write(&dir, "pure.json", PURE_QUBIT))]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0.000000000000 nats"));

    let o = qmaxent(&["--units", "bits", "entropy-state", arg(&dir.path().join("mixed.json"))]);
    assert!(stdout(&o).starts_with("1.000000000000 bits"));
}

#[test]
fn malformed_and_invalid_states_exit_2() {
    let dir = TempDir::new().unwrap();
    let o = qmaxent(&["entropy-state", arg(&write(&dir, "bad.json", r#"{"rows": 2, "cols": 2}"#))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("entries"));

    let negative = r#"{"rows": 2, "cols": 2, "entries": [[1.5, 0], [0, 0], [0, 0], [-0.5, 0]]}"#;
    let o = qmaxent(&["entropy-state", arg(&write(&dir, "neg.json", negative))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("positive semidefinite") || stderr(&o).contains("eigenvalue"), "{}", stderr(&o));

    let o = qmaxent(&["entropy-state", arg(&dir.path().join("missing.json"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn thermal_examples() {
    let o = qmaxent(&["thermal", "--hamiltonian", "qubit01", "--beta", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!((field(&out, "E") - 0.5).abs() < 1e-12);
    assert!(out.contains("[0.500000000000, 0.000000000000]"));
    assert!(out.contains("[0.000000000000, 0.500000000000]"));

    let o = qmaxent(&["thermal", "--hamiltonian", "qubit01", "--energy", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(field(&stdout(&o), "beta").abs() < 1e-12);

    let o = qmaxent(&["thermal", "--hamiltonian", "qubit01", "--energy", "1.5"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("(0, 1)"));

    let o = qmaxent(&["thermal", "--hamiltonian", "qubit01"]);
    assert_eq!(o.status.code(), Some(2));
    let o = qmaxent(&["thermal", "--hamiltonian", "qubit01", "--beta", "1", "--energy", "0.3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn thermal_state_file_round_trips() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("gamma.json");
    let o = qmaxent(&["--output", arg(&out), "thermal", "--hamiltonian", "qutrit012", "--energy", "-0.5"]);
    assert_eq!(o.status.code(), Some(3));
    let o = qmaxent(&["--output", arg(&out), "thermal", "--hamiltonian", "qutrit012", "--beta", "-0.7"]);
    assert_eq!(o.status.code(), Some(0));
    let gamma = read_json::<StateFile>(&out).unwrap().to_state().unwrap();
    assert_eq!(gamma.dim(), 3);
    let e = field(&stdout(&o), "E");
    assert!(e > 1.0 && e < 2.0, "negative beta should invert the populations, E = {e}");
}

#[test]
fn degenerate_hamiltonian_exits_3() {
    let dir = TempDir::new().unwrap();
    let h = write(&dir, "flat.json", r#"{"rows": 2, "cols": 2, "entries": [[1, 0], [0, 0], [0, 0], [1, 0]], "units": "eV"}"#);
    let o = qmaxent(&["thermal", "--hamiltonian", arg(&h), "--energy", "1"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn channel_entropy_golden_values() {
    let dir = TempDir::new().unwrap();
    let witness = dir.path().join("witness.json");
    let o = qmaxent(&["--output", arg(&witness), "channel-entropy", arg(&write(&dir, "id.json", IDENTITY))]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!((field(&out, "channel entropy") + 2f64.ln()).abs() < 1e-4);
    assert!(out.contains("converged = true"));
    assert!(out.contains("restarts = 8"));
    let w = read_json::<StateFile>(&witness).unwrap().to_bipartite().unwrap();
    assert_eq!(w.dims(), (2, 2));

    let o = qmaxent(&["channel-entropy", "--restarts", "3", arg(&write(&dir, "rep.json", &replacer_file()))]);
    assert_eq!(o.status.code(), Some(0));
    let golden = 0.75 * (4.0f64 / 3.0).ln() + 0.25 * 4.0f64.ln();
    assert!((field(&stdout(&o), "channel entropy") - golden).abs() < 1e-9);
    assert!(stdout(&o).contains("restarts = 3"));
}

#[test]
fn choi_files_are_accepted() {
    let dir = TempDir::new().unwrap();
    // Choi matrix of the identity qubit channel: |00><00| + |00><11| + |11><00| + |11><11|
    let mut e = vec!["[0, 0]"; 16];
    for k in [0, 3, 12, 15] {
        e[k] = "[1, 0]";
    }
    let text = format!(r#"{{"dim_r": 2, "dim_a": 2, "choi": {{"rows": 4, "cols": 4, "entries": [{}]}}}}"#, e.join(", "));
    let o = qmaxent(&["channel-entropy", arg(&write(&dir, "choi.json", &text))]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!((field(&stdout(&o), "channel entropy") + 2f64.ln()).abs() < 1e-4);
}

#[test]
fn invalid_channels_exit_2_with_quantified_violation() {
    let dir = TempDir::new().unwrap();
    let not_tp =
        r#"{"dim_in": 2, "dim_out": 2, "kraus": [{"rows": 2, "cols": 2, "entries": [[1, 0], [0, 0], [0, 0], [0.5, 0]]}]}"#;
    let o = qmaxent(&["channel-entropy", arg(&write(&dir, "ntp.json", not_tp))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Σ K†K deviates by 7.500e-1"), "{}", stderr(&o));

    // transpose map: its Choi matrix is the swap, with eigenvalue -1
    let mut e = vec!["[0, 0]"; 16];
    for k in [0, 6, 9, 15] {
        e[k] = "[1, 0]";
    }
    let text = format!(r#"{{"dim_r": 2, "dim_a": 2, "choi": {{"rows": 4, "cols": 4, "entries": [{}]}}}}"#, e.join(", "));
    let o = qmaxent(&["channel-entropy", arg(&write(&dir, "swap.json", &text))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("negative eigenvalue -1.000e0"), "{}", stderr(&o));
}

#[test]
fn min_output_entropy_of_identity_is_zero() {
    let dir = TempDir::new().unwrap();
    let o = qmaxent(&["min-output-entropy", arg(&write(&dir, "id.json", IDENTITY))]);
    assert_eq!(o.status.code(), Some(0));
    assert!(field(&stdout(&o), "min output entropy").abs() < 1e-9);
}

fn verify_config(dir: &TempDir, body: &str) -> PathBuf {
    write(dir, "run.toml", body)
}

#[test]
fn verify_qubit_run_has_no_violations() {
    let dir = TempDir::new().unwrap();
    let cfg = verify_config(&dir, "hamiltonian = \"qubit01\"\ntarget_energies = [0.3]\nsamples = 100\nseed = 5\noutput = \"report.md\"\n");
    let o = qmaxent(&["verify", "--config", arg(&cfg)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = std::fs::read_to_string(dir.path().join("report.md")).unwrap();
    let block = qmaxent_cli::report::extract_machine_block(&report).unwrap();
    assert_eq!(block.lines().count(), 2 + 1 + 100 + 1);
    assert!(report.contains("100 pinned samples, 0 violations"));
    assert!(report.contains("Gap min/median/max"));
}

#[test]
fn verify_without_samples_reports_the_thermalizer_only() {
    let dir = TempDir::new().unwrap();
    let cfg = verify_config(&dir, "hamiltonian = \"qutrit012\"\ntarget_energies = [\"q0.5\"]\nsamples = 0\n");
    let o = qmaxent(&["verify", "--config", arg(&cfg)]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let block = qmaxent_cli::report::extract_machine_block(&out).unwrap();
    let rows: Vec<&str> = block.lines().skip(2).filter(|l| !l.starts_with("```")).collect();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].starts_with("e0-thermalizer,"));
}

#[test]
fn verify_rejects_out_of_span_energy_before_sampling() {
    let dir = TempDir::new().unwrap();
    let cfg = verify_config(&dir, "hamiltonian = \"qubit01\"\ntarget_energies = [0.3, 1.2]\nsamples = 100\noutput = \"r.md\"\n");
    let o = qmaxent(&["verify", "--config", arg(&cfg)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("(0, 1)"));
    assert!(!dir.path().join("r.md").exists());

    let cfg = verify_config(&dir, "hamiltonian = \"qubit01\"\ntarget_energies = [0.3]\n");
    assert_eq!(qmaxent(&["verify", "--config", arg(&cfg)]).status.code(), Some(2));
}

#[test]
fn verify_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let cfg = verify_config(&dir, "hamiltonian = \"qubitX\"\ntarget_energies = [-0.2, 0.4]\nsamples = 5\nfact1_samples = 50\nseed = 99\n");
    let a = stdout(&qmaxent(&["verify", "--config", arg(&cfg)]));
    let b = stdout(&qmaxent(&["verify", "--config", arg(&cfg)]));
    assert_eq!(a, b);
    let c = stdout(&qmaxent(&["--seed", "100", "verify", "--config", arg(&cfg)]));
    assert_ne!(
        qmaxent_cli::report::extract_machine_block(&a).unwrap(),
        qmaxent_cli::report::extract_machine_block(&c).unwrap()
    );
}
