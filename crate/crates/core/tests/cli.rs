use std::process::Command;

fn hydro() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hog-hydro"))
}

#[test]
fn short_run_writes_csv_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.csv");
    let status = hydro()
        .args(["--problem", "vortex", "--order", "3", "--nx", "8", "--ny", "8", "--nz", "8", "--steps", "2"])
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let stdout = String::from_utf8_lossy(&status.stdout);
    assert!(stdout.contains("predictor fraction"));

    let mut reader = csv::Reader::from_path(&out).unwrap();
    let headers = reader.headers().unwrap().clone();
    let rows: Vec<_> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 1);
    let col = |name: &str| &rows[0][headers.iter().position(|h| h == name).unwrap()];
    assert_eq!(col("order"), "3");
    assert_eq!(col("steps_taken"), "2");
    assert_eq!(col("strategy"), "skinny");
    // 14^3 zones with ghosts, 5 values each, two steps
    assert_eq!(col("ledger_uploads"), (2 * 14u64.pow(3) * 5).to_string());
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# small sod run\nproblem = sod\nnx = 16\nny = 4\nnz = 4\nsteps = 50\n").unwrap();
    let out = dir.path().join("run.csv");
    let status = hydro()
        .arg("--config")
        .arg(&cfg)
        .args(["--steps", "3", "--strategy", "full"])
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(status.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| row[header.iter().position(|h| *h == name).unwrap()];
    assert_eq!(col("problem"), "sod");
    assert_eq!(col("steps_taken"), "3");
    assert_eq!(col("strategy"), "full");
}

#[test]
fn convergence_check_reports_orders() {
    let out = hydro()
        .args(["--check", "convergence", "--meshes", "8,16", "--tfinal", "0.5"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("order"));
    // CSV goes to stdout when no path is given
    assert!(text.contains("run_id,problem"));
}

#[test]
fn repro_check_passes() {
    let out = hydro()
        .args(["--check", "repro", "--nx", "8", "--ny", "8", "--nz", "8", "--steps", "3", "--repro-workers", "3"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn errors_map_to_exit_codes() {
    let bad_split = hydro().args(["--nx", "10", "--split", "3x1x1", "--steps", "1"]).output().unwrap();
    assert_eq!(bad_split.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad_split.stderr).contains("error"));

    let missing = hydro().args(["--config", "/nonexistent/run.cfg"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(6));

    let both = hydro().args(["--steps", "1", "--tfinal", "1.0"]).output().unwrap();
    assert!(!both.status.success());

    let bad_convergence = hydro().args(["--problem", "sod", "--check", "convergence"]).output().unwrap();
    assert_eq!(bad_convergence.status.code(), Some(2));
}
