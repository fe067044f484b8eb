use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn steklov(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_steklov")).args(args).output().expect("binary runs")
}

fn run_config(sub: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![sub, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    steklov(&args)
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn bundled_disk_spectrum_has_unit_first_eigenvalue() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config("spectrum", &configs().join("disk_spectrum.ini"), dir.path(), &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    let first = csv.lines().next().unwrap();
    assert!(first.starts_with("# config-sha256: ") && first.len() == 17 + 64);
    assert_eq!(csv.lines().nth(1).unwrap(), "index,sigma,cluster_id,boundary_norm_residual");
    let rows = data_rows(&csv);
    let sigma = |k: usize| rows[k][1].parse::<f64>().unwrap();
    for (k, exact) in [(1, 1.0), (2, 1.0), (3, 2.0), (4, 2.0), (5, 3.0)] {
        assert!((sigma(k) - exact).abs() / exact < 1e-2, "sigma_{k} = {}", sigma(k));
    }
    assert_eq!(rows[1][2], rows[2][2]);
    assert!(dir.path().join("eigenfunctions.csv").exists());
}

#[test]
fn same_config_twice_gives_identical_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = configs().join("glue_disk.ini");
    assert!(run_config("glue", &cfg, a.path(), &["--threads", "1"]).status.success());
    assert!(run_config("glue", &cfg, b.path(), &["--threads", "3"]).status.success());
    for name in ["glue.csv", "glued_mesh.txt", "spectrum.csv"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name} differs");
    }
}

#[test]
fn sweep_over_three_eps_gives_three_rows_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.ini");
    std::fs::write(
        &cfg,
        "[run]\nkind = sweep\n[sweep]\nexperiment = cusp-law\nlayers = 12\n[grid]\neps = 0.2, 0.1, 0.05\nalpha = 0.4\n",
    )
    .unwrap();
    let out = run_config("sweep", &cfg, &dir.path().join("out"), &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = data_rows(&std::fs::read_to_string(dir.path().join("out/sweep.csv")).unwrap());
    assert_eq!(rows.len(), 4);
    assert_eq!(rows.iter().map(|r| r[0].as_str()).collect::<Vec<_>>(), ["0", "1", "2", "summary"]);
}

#[test]
fn seed_flag_overrides_config_and_changes_hash() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("opt.ini");
    std::fs::write(&cfg, "[run]\nkind = optimize\nseed = 1\n[geometry]\nrefinement = 2\n[optimize]\nmax_iter = 3\n").unwrap();
    let hash = |out: &Path| std::fs::read_to_string(out.join("history.csv")).unwrap().lines().next().unwrap().to_string();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(run_config("optimize", &cfg, &a, &[]).status.success());
    assert!(run_config("optimize", &cfg, &b, &["--seed", "9"]).status.success());
    assert_ne!(hash(&a), hash(&b));
    let d = std::fs::read_to_string(a.join("density.csv")).unwrap();
    assert_eq!(d.lines().nth(1).unwrap(), "vertex,x,y,log_density");
}

#[test]
fn config_errors_exit_with_two_and_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.ini");
    std::fs::write(&cfg, "[run]\nkind = spectrum\n[solver]\nmass = heavy\n").unwrap();
    let out = run_config("spectrum", &cfg, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("solver.mass"));

    let out = run_config("glue", &configs().join("disk_spectrum.ini"), dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("run.kind"));
}

#[test]
fn solver_failures_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("glue.ini");
    // Both ends on the same boundary point cannot be glued.
    std::fs::write(&cfg, "[run]\nkind = glue\n[geometry]\nrefinement = 2\n[glue]\np0 = 0\np1 = 0\n").unwrap();
    let out = run_config("glue", &cfg, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn mesh_round_trips_through_file_base() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_config("mesh", &configs().join("disk_mesh.ini"), dir.path(), &[]).status.success());
    let cfg = dir.path().join("file.ini");
    std::fs::write(&cfg, "[run]\nkind = mesh\n[geometry]\nbase = file\npath = mesh.txt\n").unwrap();
    let again = dir.path().join("again");
    let out = run_config("mesh", &cfg, &again, &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::read(dir.path().join("mesh.txt")).unwrap(), std::fs::read(again.join("mesh.txt")).unwrap());
}
