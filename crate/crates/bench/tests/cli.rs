use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn rcslab(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rcslab"));
    cmd.args(args).env_remove("RCSLAB_MAX_QUBITS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const CONFIG: &str = "[layout]\nrows = 2\ncols = 3\nscheme = \"EFGH\"\n\n[rcs]\nm = 6\nseed = 3\n\n[run]\nk = 400\nseed = 5\n";

#[test]
fn run_writes_outputs_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", CONFIG);
    let out = dir.path().join("out");
    let csv = dir.path().join("r.csv");
    let o = rcslab(
        &["run", "--rcs-config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--csv", csv.to_str().unwrap()],
        &[],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let record: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(record["n"], 6);
    assert_eq!(record["xeb"]["k"], 400);
    assert_eq!(record["peak_memory_source"], "allocator");
    for f in ["record.json", "samples.txt", "amplitudes.txt"] {
        assert!(out.join(f).exists(), "{f}");
    }
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 2);

    // the CLI xeb command reproduces the run's score from its own files
    let o = rcslab(
        &[
            "xeb",
            "--samples",
            out.join("samples.txt").to_str().unwrap(),
            "--amplitudes",
            out.join("amplitudes.txt").to_str().unwrap(),
            "--strict-amplitudes",
        ],
        &[],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let score: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(score["f_xeb"].as_f64().unwrap(), record["xeb"]["f_xeb"].as_f64().unwrap());
}

#[test]
fn parse_errors_exit_2_with_locations() {
    let dir = tempfile::tempdir().unwrap();
    let q = write(dir.path(), "bad.qasm", "OPENQASM 2.0;\nqreg q[2];\nU(0,0,0) q[2];\n");
    let o = rcslab(&["run", "--qasm", q.to_str().unwrap(), "--k", "5"], &[]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("bad.qasm:3:"), "{}", stderr(&o));
    let c = write(dir.path(), "c.toml", "[rcs]\nm = 1\nbogus = 2\n");
    assert_eq!(code(&rcslab(&["run", "--rcs-config", c.to_str().unwrap()], &[])), 2);
}

#[test]
fn capacity_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let q = write(dir.path(), "five.qasm", "OPENQASM 2.0;\nqreg q[5];\nU(0,0,0) q[4];\n");
    let o = rcslab(&["run", "--qasm", q.to_str().unwrap(), "--k", "5"], &[("RCSLAB_MAX_QUBITS", "4")]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("capacity"), "{}", stderr(&o));
    let o = rcslab(&["run", "--qasm", q.to_str().unwrap(), "--k", "5"], &[("RCSLAB_MAX_QUBITS", "5")]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn missing_file_exits_4() {
    let o = rcslab(&["run", "--qasm", "/nonexistent/x.qasm"], &[]);
    assert_eq!(code(&o), 4);
}

#[test]
fn strict_missing_amplitude_exits_5() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.txt", "00 0.5\n01 0.5\n");
    let s = write(dir.path(), "s.txt", "00\n11\n");
    let args = ["xeb", "--samples", s.to_str().unwrap(), "--amplitudes", a.to_str().unwrap()];
    let o = rcslab(&[&args[..], &["--strict-amplitudes"]].concat(), &[]);
    assert_eq!(code(&o), 5);
    assert!(stderr(&o).contains("11"), "{}", stderr(&o));
    let o = rcslab(&args, &[]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("warning"));
}

#[test]
fn generate_emits_parseable_qasm() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", CONFIG);
    let o = rcslab(&["generate", "--rcs-config", cfg.to_str().unwrap()], &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let circuit = rcslab::qasm::circuit_from_qasm(&text).unwrap();
    assert_eq!(circuit.n(), 6);
    assert!(text.contains("// cycle 0"));
}

#[test]
fn layout_and_sample_commands() {
    let o = rcslab(&["layout", "--n", "6"], &[]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("layout n=6\n"));
    let layout: rcslab::circuit::DeviceLayout = text.parse().unwrap();
    assert_eq!(layout.edges().len(), 7);

    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", CONFIG);
    let o = rcslab(&["sample", "--rcs-config", cfg.to_str().unwrap(), "--k", "7"], &[]);
    assert_eq!(code(&o), 0);
    let lines: Vec<&str> = std::str::from_utf8(&o.stdout).unwrap().lines().collect();
    assert_eq!(lines.len(), 7);
    assert!(lines.iter().all(|l| l.len() == 6));
}

#[test]
fn bench_sweep_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.toml", "[run]\nk = 200\n\n[sweep]\nn = [4, 6]\nm = [3, 5]\n");
    let csv = dir.path().join("sweep.csv");
    let out = dir.path().join("runs");
    let o = rcslab(
        &["bench", "--rcs-config", cfg.to_str().unwrap(), "--csv", csv.to_str().unwrap(), "--out", out.to_str().unwrap()],
        &[],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let mut reader = csv::Reader::from_path(&csv).unwrap();
    let ns: Vec<String> = reader.records().map(|r| r.unwrap()[2].to_string()).collect();
    assert_eq!(ns, ["4", "4", "6", "6"]);
    assert_eq!(std::fs::read_dir(&out).unwrap().count(), 4);
}
