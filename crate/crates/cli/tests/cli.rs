//! End-to-end tests of the binary: exit codes, CSV determinism, and row
//! self-consistency.

use std::process::{Command, Output};

fn unext(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unext"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn check_quick_passes() {
    let out = unext(&["check", "--depth", "quick"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("all checks passed"));
}

#[test]
fn usage_errors_exit_2() {
    let out = unext(&["sweep", "--channel", "depol", "--p", "0.15", "--n-min", "5", "--n-max", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    let out = unext(&["nonsense"]);
    assert_eq!(out.status.code(), Some(2));
    let out = unext(&["psc", "--eps", "0.6", "--k", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_sweep_makes_no_output_file(
) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let out = unext(&[
        "sweep", "--channel", "depol", "--p", "0.15", "--n-min", "5", "--n-max", "2",
        "--output", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!path.exists());
}

#[test]
fn sweep_deterministic_bytes() {
    let args = &[
        "sweep", "--channel", "depol", "--p", "0.15", "--eps", "0.05",
        "--n-min", "1", "--n-max", "4", "--k-list", "limit,2-5",
        "--t-grid-size", "800",
    ];
    let a = unext(args);
    let b = unext(args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    // and independent of worker count
    let c = Command::new(env!("CARGO_BIN_EXE_unext"))
        .args(args)
        .env("UNEXT_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn sweep_rows_reconstruct_from_divergence() {
    let out = unext(&[
        "sweep", "--channel", "erasure", "--p", "0.35", "--eps", "0.05",
        "--n-min", "1", "--n-max", "6", "--k-list", "2-6",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut rows = 0;
    for line in text.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), 7, "row {line:?}");
        if cells[2] != "valid" {
            continue;
        }
        let k: u64 = cells[1].parse().unwrap();
        let log2m: f64 = cells[3].parse().unwrap();
        let e: f64 = cells[5].parse().unwrap();
        let r = unext::bounds::rate_from_divergence(e, k).unwrap();
        assert!(
            (r.log2m_total - log2m).abs() < 1e-9,
            "row {line:?}: reconstructed {}",
            r.log2m_total
        );
        rows += 1;
    }
    assert_eq!(rows, 30);
}

#[test]
fn config_file_defaults_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.conf");
    std::fs::write(
        &cfg,
        "# depolarizing figure grid\nchannel = depol\np = 0.25\neps = 0.05\nn_min = 1\nn_max = 2\nk_list = 2\nt_grid_size = 500\n",
    )
    .unwrap();
    let from_config = unext(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(from_config.status.code(), Some(0), "{}", stdout(&from_config));
    // antidegradable regime: log2M is n-independent at 0.152003...
    for line in stdout(&from_config).lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        let log2m: f64 = cells[3].parse().unwrap();
        assert!((log2m - 0.152003093445049985).abs() < 1e-9, "{line:?}");
    }
    // flag overrides the config's n_max
    let overridden = unext(&[
        "sweep", "--config", cfg.to_str().unwrap(), "--n-max", "1",
    ]);
    assert_eq!(overridden.status.code(), Some(0));
    assert_eq!(stdout(&overridden).lines().count(), 2);
}

#[test]
fn depol_subcommand_closed_form() {
    let out = unext(&["depol", "--p", "0.25", "--n", "4", "--eps", "0.05", "--k", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let row = text.lines().nth(1).unwrap();
    let cells: Vec<&str> = row.split(',').collect();
    let rate: f64 = cells[4].parse().unwrap();
    assert!((rate - 0.152003093445049985 / 4.0).abs() < 1e-9, "{row:?}");
}

#[test]
fn thresholds_subcommand() {
    let out = unext(&["thresholds", "--family", "isotropic", "--d", "2", "--k-list", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().next().unwrap(), "family,d,k,threshold");
    assert!(text.lines().nth(1).unwrap().starts_with("isotropic,2,2,7.5"));
}
