use std::path::Path;
use std::process::Command;

fn weightlab(args: &[&str], cwd: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_weightlab")).args(args).current_dir(cwd).output().expect("binary runs")
}

#[test]
fn list_prints_all_scenarios() {
    let dir = tempfile::tempdir().unwrap();
    let out = weightlab(&["suite", "--list"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in weightlab::cli::scenarios::SCENARIOS {
        assert!(text.lines().any(|l| l == name), "{name} missing");
    }
}

#[test]
fn repro_report_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    for out in ["a", "b"] {
        let o = weightlab(&["repro", "spike", "--out", out], dir.path());
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let a = std::fs::read(dir.path().join("a/spike/report.json")).unwrap();
    let b = std::fs::read(dir.path().join("b/spike/report.json")).unwrap();
    assert_eq!(a, b);
    assert!(dir.path().join("a/spike/spike.svg").is_file());
    assert!(dir.path().join("a/spike/spike.csv").is_file());
}

#[test]
fn no_plots_skips_svg() {
    let dir = tempfile::tempdir().unwrap();
    let o = weightlab(&["repro", "constant-one", "--no-plots", "--out", "o"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("o/constant-one/report.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    let svgs = std::fs::read_dir(dir.path().join("o/constant-one"))
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "svg"))
        .count();
    assert_eq!(svgs, 0);
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(weightlab(&["repro", "bogus"], dir.path()).status.code(), Some(2));
    assert_eq!(weightlab(&["apconst", "--weight", "what:ever"], dir.path()).status.code(), Some(2));
    assert_eq!(weightlab(&["nonsense-verb"], dir.path()).status.code(), Some(2));
}

#[test]
fn config_file_is_picked_up_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("weightlab.toml"), "depth = 4\nformat = \"csv\"\n").unwrap();
    let o = weightlab(&["maximal", "--fn", "indicator:0,0.25", "--interval", "0,1"], dir.path());
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 16, "{text}");

    let o = weightlab(&["maximal", "--fn", "indicator:0,0.25", "--interval", "0,1", "--depth", "3"], dir.path());
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 1 + 8);

    std::fs::write(dir.path().join("weightlab.toml"), "dept = 4\n").unwrap();
    assert_eq!(weightlab(&["suite", "--list"], dir.path()).status.code(), Some(2));
}

#[test]
fn apconst_of_constant_weight_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = weightlab(&["apconst", "--weight", "const:3", "--depth", "6"], dir.path());
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["constant"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn hardy_outer_writes_boundary_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = weightlab(&["hardy", "outer", "--weight", "2-2cos", "--m", "8", "--out", "h"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("h/hardy/outer.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 256);
}
