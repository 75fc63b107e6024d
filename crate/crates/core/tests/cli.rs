use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("examples/data")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dynmeasure"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_data(sub: &str, files: &[&str], extra: &[&str]) -> Output {
    let paths: Vec<String> = files.iter().map(|f| data(f).to_string_lossy().into_owned()).collect();
    let mut args = vec![sub];
    args.extend(paths.iter().map(|s| s.as_str()));
    args.extend_from_slice(extra);
    run(&args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn dist_point_masses() {
    let o = run_data("dist", &["delta_x.json", "delta_y.json"], &[]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "delta_inf  1\n");
}

#[test]
fn dist_two_point_family_with_w1() {
    let o = run_data(
        "dist",
        &["vanishing_n4.json", "delta_y.json"],
        &["--p", "1", "--format", "json"],
    );
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["delta_inf"], 1.0);
    assert_eq!(v["w1"], 0.25);
}

#[test]
fn dist_same_measure_is_zero() {
    let o = run_data(
        "dist",
        &["vanishing_n4.json", "vanishing_n4.json"],
        &["--p", "1", "--p", "2"],
    );
    assert_eq!(stdout(&o), "delta_inf  0\nw1         0\nw2         0\n");
}

#[test]
fn malformed_input_exits_2() {
    let o = run_data("dist", &["malformed.json", "delta_y.json"], &[]);
    assert_eq!(o.status.code(), Some(2));
    let o = run_data("dist", &["delta_x.json", "delta_y.json"], &["--p", "3"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["dist", "/nonexistent/a.json", "/nonexistent/b.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn space_mismatch_exits_3() {
    let o = run_data("dist", &["delta_x.json", "other_space.json"], &[]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn plan_lists_entries() {
    let o = run_data("plan", &["vanishing_n4.json", "delta_y.json"], &["--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "source,target,mass,distance\nx,y,1/4,1\ny,y,3/4,0\n");
    let o = run_data(
        "plan",
        &["vanishing_n4.json", "delta_y.json"],
        &["--p", "2", "--format", "json"],
    );
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["value"], 0.5);
}

#[test]
fn decompose_exit_codes() {
    let o = run_data("decompose", &["instance_m1.json"], &[]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("trace: Base\n"));
    let o = run_data("decompose", &["instance_m3.json"], &[]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verdict: valid"));
    let o = run_data("decompose", &["instance_infeasible.json"], &[]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("subset [0, 1]"));
}

#[test]
fn converge_exit_codes() {
    assert_eq!(
        run_data("converge", &["constant_sequence.json"], &[]).status.code(),
        Some(0)
    );
    let o = run_data("converge", &["stabilizing_sequence.json"], &[]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("n0 = 3"));
    let o = run_data("converge", &["vanishing_sequence.json"], &[]);
    assert_eq!(o.status.code(), Some(5));
    assert!(stdout(&o).contains("witness set: {y}"));
    assert_eq!(
        run_data("converge", &["inconclusive_sequence.json"], &[]).status.code(),
        Some(6)
    );
}

#[test]
fn stability_exit_codes() {
    assert_eq!(
        run_data("stability", &["stability_sink.json"], &[]).status.code(),
        Some(7)
    );
    assert_eq!(
        run_data("stability", &["stability_identity.json"], &[]).status.code(),
        Some(0)
    );
    assert_eq!(
        run_data("stability", &["stability_torus_lambda.json"], &[])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        run_data("stability", &["stability_torus_nu.json"], &[]).status.code(),
        Some(7)
    );
    let o = run_data("stability", &["stability_sink.json"], &["--notion", "attractor"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn compare_columns() {
    let o = run_data("compare", &["vanishing_sequence.json"], &["--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<serde_json::Value> = serde_json::from_slice(&o.stdout).unwrap();
    assert!(rows.iter().all(|r| r["delta_inf"] == 1.0));
    assert_eq!(rows.last().unwrap()["w1"], 0.0625);
    let o = run_data("compare", &["constant_sequence.json"], &["--format", "csv"]);
    assert!(stdout(&o).lines().skip(1).all(|l| l.ends_with(",0,0,0,0")));
    let o = run_data("compare", &["drift_sequence.json"], &["--format", "json"]);
    let rows: Vec<serde_json::Value> = serde_json::from_slice(&o.stdout).unwrap();
    let last = rows.last().unwrap();
    for k in ["w1", "w2", "delta_inf", "hausdorff"] {
        assert!(last[k].as_f64().unwrap() < 0.01);
    }
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.txt");
    let o = run_data(
        "dist",
        &["delta_x.json", "delta_y.json"],
        &["-o", out.to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(out).unwrap(), "delta_inf  1\n");
}

#[test]
fn help_documents_exit_codes() {
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for code in [
        "2  malformed",
        "3  measures",
        "4  decomposition",
        "5  sequence",
        "6  convergence",
        "7  unstable",
    ] {
        assert!(text.contains(code), "missing `{code}`");
    }
}
