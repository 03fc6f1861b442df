use std::fs;
use std::path::Path;
use std::process::Command;

use tbc_sim::{runner, Config, Scenario};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tbc-sim"))
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap())
        })
        .collect();
    out.sort();
    out
}

#[test]
fn free_1d_run_writes_every_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = Config::defaults(Scenario::Free1d);
    cfg.output = dir.path().to_owned();
    let summary = runner::run(&cfg).unwrap();
    let conservation = summary.checks.iter().find(|c| c.name == "conservation").unwrap();
    assert!(conservation.passed(), "{conservation:?}");
    for name in ["snapshot_0.dat", "snapshot_40.dat", "ledger.dat", "manifest.txt"] {
        assert!(dir.path().join(name).exists(), "missing {name}");
    }
    let ledger = fs::read_to_string(dir.path().join("ledger.dat")).unwrap();
    assert_eq!(ledger.lines().count(), 1 + 41);
    assert!(ledger.starts_with("# step t_scaled interior left right total"));
}

#[test]
fn manifest_lists_parameters_and_checks() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = Config::defaults(Scenario::ScatterStatic);
    cfg.output = dir.path().to_owned();
    cfg.n_steps = 20;
    cfg.oracle = true;
    runner::run(&cfg).unwrap();
    let text = fs::read_to_string(dir.path().join("manifest.txt")).unwrap();
    for key in ["scenario", "depth", "width", "sigma0", "n-steps", "closure"] {
        assert!(
            text.lines().any(|l| l.replace('_', "-").starts_with(key)),
            "{key} missing from manifest:\n{text}"
        );
    }
    assert!(text.contains("check.conservation"));
    assert!(text.contains("check.oracle_rel_l2"));
    // The manifest is itself a loadable config.
    let body: String = text.lines().filter(|l| !l.starts_with("check.")).map(|l| format!("{l}\n")).collect();
    assert_eq!(Config::parse(&body).unwrap().n_steps, 20);
}

#[test]
fn identical_config_gives_identical_files() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        let status = bin()
            .args(["run", "tunneling", "--n-steps", "60", "--stride", "20", "--output"])
            .arg(dir.path())
            .status()
            .unwrap();
        assert!(status.success());
    }
    let (fa, fb) = (read_dir_sorted(a.path()), read_dir_sorted(b.path()));
    assert_eq!(fa.len(), fb.len());
    for ((na, ca), (nb, cb)) in fa.iter().zip(&fb) {
        assert_eq!(na, nb);
        if na != "manifest.txt" {
            assert!(ca == cb, "{na} differs between identical runs");
        }
    }
}

#[test]
fn zero_steps_is_a_usage_error() {
    let out = bin().args(["run", "free-1d", "--n-steps", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n-steps"));
}

#[test]
fn unknown_scenario_and_key_are_usage_errors() {
    let out = bin().args(["run", "free-3d"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["run", "free-1d", "--colour", "blue"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failed_check_exits_nonzero_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["run", "free-1d", "--conservation-tol", "1e-30", "--output"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.lines().any(|l| l.starts_with("conservation") && l.ends_with("FAIL")), "{stdout}");
}

#[test]
fn oracle_flag_reports_agreement() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["run", "scatter-static", "--oracle", "--n-steps", "50", "--output"])
        .arg(dir.path())
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    let line = stdout.lines().find(|l| l.starts_with("oracle_rel_l2")).expect("oracle line");
    assert!(line.ends_with("PASS"), "{line}");
}

#[test]
fn validate_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.cfg");
    fs::write(&good, Config::defaults(Scenario::Free2d).to_text()).unwrap();
    let out = bin().arg("validate").arg(&good).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));

    let leaky = dir.path().join("leaky.cfg");
    fs::write(&leaky, "scenario = free-1d\nsigma0 = 0.5\nx0 = 0.9\n").unwrap();
    let out = bin().arg("validate").arg(&leaky).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("warning"));

    let aliased = dir.path().join("aliased.cfg");
    fs::write(&aliased, "scenario = free-2d\nny = 15\n").unwrap();
    let out = bin().arg("validate").arg(&aliased).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn kernels_dump_prints_both_tables() {
    let out = bin().args(["kernels", "--dump", "--n-steps", "12"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# q C_q"));
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip_while(|l| !l.starts_with("# p"))
        .skip(1)
        .map(|l| l.split_whitespace().map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 13);
    // Odd sums vanish exactly, so measure against the p = 0 scale.
    let scale = rows[0][3].hypot(rows[0][4]);
    for r in rows {
        let diff = (r[1] - r[3]).hypot(r[2] - r[4]);
        assert!(diff <= 1e-9 * scale, "{r:?}");
    }
}

#[test]
fn delta_and_2d_scenarios_run() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = Config::defaults(Scenario::DrivenDelta);
    cfg.output = dir.path().join("delta");
    let s = runner::run(&cfg).unwrap();
    assert!(s.passed(), "{:?}", s.checks);
    assert!(cfg.output.join("delta_series.dat").exists());

    let mut cfg = Config::defaults(Scenario::Free2d);
    cfg.output = dir.path().join("band");
    cfg.n_steps = 20;
    cfg.stride = 10;
    runner::run(&cfg).unwrap();
    let text = fs::read_to_string(cfg.output.join("density_20.dat")).unwrap();
    let header: Vec<&str> = text.lines().nth(1).unwrap().split_whitespace().collect();
    assert_eq!(header[..2], ["101", "45"]);
    assert_eq!(text.lines().count(), 2 + 101);
}
