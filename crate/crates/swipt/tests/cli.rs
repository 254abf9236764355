use std::path::PathBuf;
use std::process::{Command, Output};

fn swipt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_swipt")).args(args).output().unwrap()
}

fn tmp(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

#[test]
fn complexity_table_lists_all_methods() {
    let out = swipt(&["complexity-table", "--M", "8", "--KI", "2", "--KE", "2"]);
    assert!(out.status.success());
    let s = text(&out.stdout);
    assert_eq!(s.lines().count(), 1 + 5 + 4);
    assert!(s.contains("reduction_pct,alg2,p24,8,2,2,1,2,91.43"));
    assert!(s.contains("complexity,alg2,,8,2,2,1,2,1160.00"));
    let out = swipt(&["complexity-table", "--M", "16", "--KI", "4", "--KE", "4"]);
    let s = text(&out.stdout);
    for v in ["98.54", "99.26", "99.25"] {
        assert!(s.contains(v), "{v} missing");
    }
}

#[test]
fn complexity_table_rejects_impossible_sizes() {
    let out = swipt(&["complexity-table", "--M", "3", "--KI", "2", "--KE", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_scenario_lists_known_ones() {
    let out = swipt(&["run-scenario", "fig99"]);
    assert_eq!(out.status.code(), Some(2));
    let err = text(&out.stderr);
    assert!(err.contains("unknown scenario"));
    assert!(err.contains("tab4_power_ratio") && err.contains("fig9_waveform"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(swipt(&[]).status.code(), Some(2));
    assert_eq!(swipt(&["solve"]).status.code(), Some(2));
    assert_eq!(swipt(&["list-scenarios", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(swipt(&["run-scenario", "tab4_power_ratio", "--tol", "2"]).status.code(), Some(2));
    assert_eq!(swipt(&["run-scenario", "tab4_power_ratio", "--trials", "0"]).status.code(), Some(2));
    assert!(swipt(&["--help"]).status.success());
}

#[test]
fn list_scenarios() {
    let out = swipt(&["list-scenarios"]);
    assert!(out.status.success());
    assert_eq!(text(&out.stdout).lines().count(), 8);
}

#[test]
fn tab4_rows_and_byte_identical_reruns() {
    let a = tmp("t4_a.csv");
    let b = tmp("t4_b.csv");
    for p in [&a, &b] {
        let out = swipt(&["run-scenario", "tab4_power_ratio", "--seed", "7", "--trials", "5", "--out", p.to_str().unwrap()]);
        assert!(out.status.success(), "{}", text(&out.stderr));
    }
    let a = std::fs::read(&a).unwrap();
    assert_eq!(a, std::fs::read(&b).unwrap());
    let s = text(&a);
    assert_eq!(s.lines().count(), 1 + 10 * 2 * 2);
    assert!(s.lines().skip(1).all(|l| l.contains(",alg2,power_ratio_db,") && l.ends_with(",5,5,0,0,7")));
}

#[test]
fn plotdata_format() {
    let out = swipt(&["run-scenario", "fig8_eh_efficiency", "--format", "plotdata"]);
    assert!(out.status.success());
    let s = text(&out.stdout);
    assert!(s.starts_with("x,series,y,y_stderr\n"));
    assert!(s.contains("eh/dc_power/logistic"));
}

#[test]
fn solve_reports_shortfall_with_exit_one() {
    let cfg = tmp("tiny.toml");
    std::fs::write(&cfg, "[system]\np_max = 1e-9\n").unwrap();
    let out = swipt(&["solve", "--config", cfg.to_str().unwrap(), "--method", "alg2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("power shortfall"));
    let out = swipt(&["solve", "--config", cfg.to_str().unwrap(), "--method", "alg1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn solve_prints_record_and_evaluation() {
    let cfg = tmp("demo.toml");
    std::fs::write(&cfg, "[system]\nm = 8\np_max = 4.0\n[csi]\nrho = 0.05\n").unwrap();
    for method in ["alg1", "p22", "p24", "alg2", "benchmark", "benchmark_no_v"] {
        let out = swipt(&["solve", "--config", cfg.to_str().unwrap(), "--method", method, "--seed", "3"]);
        assert!(out.status.success(), "{method}: {}", text(&out.stderr));
        let s = text(&out.stdout);
        assert!(s.lines().any(|l| l.starts_with("iu 1 sinr")), "{method}");
        assert!(s.lines().any(|l| l.starts_with("eu 1 rf") && l.contains(" dc ")), "{method}");
        assert!(s.lines().any(|l| l.starts_with("w 0 ")));
    }
}

#[test]
fn config_errors_exit_two() {
    let cfg = tmp("bad.toml");
    std::fs::write(&cfg, "[system]\nantennas = 8\n").unwrap();
    let out = swipt(&["solve", "--config", cfg.to_str().unwrap(), "--method", "alg1"]);
    assert_eq!(out.status.code(), Some(2));
    let good = tmp("good.toml");
    std::fs::write(&good, "").unwrap();
    let out = swipt(&["solve", "--config", good.to_str().unwrap(), "--method", "mrt"]);
    assert_eq!(out.status.code(), Some(2));
    let out = swipt(&["solve", "--config", tmp("missing.toml").to_str().unwrap(), "--method", "alg1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn scenario_from_file() {
    let path = tmp("sweep.toml");
    std::fs::write(
        &path,
        "[system]\nm = 8\nrng_seed = 4\n[scenario]\nname = \"p_sweep\"\nmethods = [\"alg2\", \"alg1\"]\nsweep = \"p_max\"\nvalues = [1, 2]\ntrials = 3\n",
    )
    .unwrap();
    let out = swipt(&["run-scenario", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    let s = text(&out.stdout);
    assert!(s.lines().nth(1).unwrap().starts_with("p_sweep,p_max=1,1,p_max,alg2,worst_capacity,"));
    assert!(s.lines().skip(1).all(|l| l.ends_with(",3,3,0,0,4")));
}
