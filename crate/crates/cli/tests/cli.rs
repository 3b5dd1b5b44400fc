use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vblast-perf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn curve(scenario: &str, out: &Path, extra: &[&str]) -> Output {
    let out = out.to_str().unwrap();
    let mut args = vec![
        scenario, "--n", "2", "--tx", "2", "--mn", "1", "--snr", "0:10:5", "--mod", "bpsk",
        "--out", out,
    ];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn help_and_version_exit_zero() {
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("aser-total"));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&["mc-ser", "--help"]).status.code(), Some(0));
}

#[test]
fn analytic_run_writes_lf_csv_with_method_columns() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("total.csv");
    let o = curve("aser-total", &out, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(!text.contains('\r'));
    assert!(text.ends_with('\n'));
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    for col in ["stage1", "stage2", "cross", "total"] {
        let i = header.iter().position(|h| *h == col).unwrap();
        assert_eq!(header[i + 1], format!("{col}_method"));
    }
    assert_eq!(lines.count(), 3);
    // No temporary file is left next to the output.
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn bad_arguments_exit_one_with_a_single_line() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("x.csv");
    let cases: [&[&str]; 5] = [
        &[
            "aser-total",
            "--n",
            "2",
            "--tx",
            "2",
            "--mn",
            "1",
            "--snr",
            "10:0:1",
            "--mod",
            "bpsk",
            "--out",
            "x.csv",
        ],
        &[
            "aser-total",
            "--n",
            "2",
            "--tx",
            "2",
            "--mn",
            "1",
            "--snr",
            "0:10:1",
            "--mod",
            "qam:5",
            "--out",
            "x.csv",
        ],
        &[
            "outage", "--n", "2", "--tx", "2", "--mn", "1", "--snr", "0:10:1", "--mod", "bpsk",
            "--out", "x.csv",
        ],
        &[
            "aser-stage",
            "--n",
            "2",
            "--tx",
            "3",
            "--mn",
            "1",
            "--snr",
            "0:10:1",
            "--mod",
            "bpsk",
            "--out",
            "x.csv",
        ],
        &["no-such-scenario"],
    ];
    for args in cases {
        let o = run(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        let e = stderr(&o);
        assert_eq!(e.trim_end().lines().count(), 1, "{args:?}: {e}");
        assert!(e.starts_with("vblast-perf: "));
    }
    let o = curve("mc-ser", &out, &["--mn", "-1"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn exhausted_budget_exits_two_without_output() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("cross.csv");
    let o = curve(
        "cross-aser",
        &out,
        &["--rho", "0.5", "--mn", "0.5", "--max-subdivisions", "1"],
    );
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("did not converge"));
    assert!(!out.exists());
}

#[test]
fn monte_carlo_output_ignores_thread_count() {
    let dir = TempDir::new().unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "2", "7", "0"] {
        let out = dir.path().join(format!("mc{threads}.csv"));
        let o = curve(
            "mc-ser",
            &out,
            &["--trials", "30000", "--seed", "42", "--threads", threads],
        );
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        outputs.push(std::fs::read(&out).unwrap());
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn validate_scenario_passes_on_a_small_grid() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("validate.csv");
    let o = curve(
        "validate",
        &out,
        &["--rho", "0.5", "--xth-db", "0", "--mod", "bpsk,qam:16"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(std::fs::read_to_string(&out).unwrap().lines().count() > 1);
}

#[test]
fn figures_and_discrepancy_commands_write_files() {
    let dir = TempDir::new().unwrap();
    let o = run(&[
        "figures",
        "--out-dir",
        dir.path().to_str().unwrap(),
        "--trials",
        "2000",
        "--snr",
        "0:10:5",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for i in 1..=4 {
        assert!(dir.path().join(format!("fig{i}.csv")).exists());
    }
    let report = dir.path().join("discrepancy.csv");
    let o = run(&["discrepancy", "--out", report.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(std::fs::read_to_string(&report)
        .unwrap()
        .starts_with("item,point,"));
}
