use std::process::{Command, Output};

fn bcrbf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bcrbf")).args(args).env_remove("BCRBF_PRECISION").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const HEADER: &str = "example,method,grid,shape,precision_digits,max_abs_err,rel_err,cond_A,cond_AL,seconds";

#[test]
fn list_shows_every_example() {
    let o = bcrbf(&["list"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for id in ["ex1", "ex2", "ex3", "ex4", "ex5", "ex6", "ex7"] {
        assert!(text.lines().any(|l| l.starts_with(id)), "{id} missing");
    }
}

#[test]
fn bad_arguments_exit_with_two() {
    for args in [
        &["solve", "--example", "ex4", "--n", "5x5x5"][..],
        &["solve", "--example", "ex9"],
        &["solve", "--example", "ex4", "--precision", "quad"],
        &["solve", "--example", "ex4", "--shape", "-1"],
        &["sweep", "--example", "ex4", "--shape-min", "2", "--shape-max", "1"],
    ] {
        assert_eq!(bcrbf(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn solve_writes_header_and_one_row() {
    let o = bcrbf(&["solve", "--example", "ex3", "--n", "4x3", "--shape", "0.7"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], HEADER);
    assert!(lines[1].starts_with("ex3,constrained,4x3,0.7,16,"), "{}", lines[1]);
}

#[test]
fn singular_run_is_a_nan_row_and_exit_three() {
    let o = bcrbf(&["solve", "--example", "ex4", "--n", "5", "--shape", "0.01"]);
    assert_eq!(o.status.code(), Some(3));
    let text = stdout(&o);
    assert!(text.lines().nth(1).unwrap().contains(",NaN,"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("singular"));
}

#[test]
fn out_file_and_environment_precision() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.csv");
    let o = Command::new(env!("CARGO_BIN_EXE_bcrbf"))
        .args(["solve", "--example", "ex3", "--n", "4x3", "--shape", "0.7", "--out"])
        .arg(&path)
        .env("BCRBF_PRECISION", "mp:40")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let rows = bcrbf::harness::parse(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].precision_digits, 40);
}

#[test]
fn sweep_rows_follow_the_shape_grid() {
    let o = bcrbf(&[
        "sweep",
        "--example",
        "ex3",
        "--n",
        "4x3",
        "--method",
        "both",
        "--shape-min",
        "0.5",
        "--shape-max",
        "2",
        "--steps",
        "4",
        "--jobs",
        "2",
    ]);
    assert!(o.status.code() == Some(0) || o.status.code() == Some(3));
    let rows = bcrbf::harness::parse(&stdout(&o)).unwrap();
    assert_eq!(rows.len(), 8);
    assert!(rows.windows(2).all(|w| w[0].shape <= w[1].shape));
    assert_eq!((rows[0].shape, rows[7].shape), (0.5, 2.0));
}

#[test]
fn no_timing_output_is_reproducible() {
    let args = ["solve", "--example", "ex2", "--n", "4", "--shape", "1", "--method", "both", "--no-timing"];
    let (a, b) = (bcrbf(&args), bcrbf(&args));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).lines().skip(1).all(|l| l.ends_with(",0.000")));
}

#[test]
fn markdown_and_csv_agree() {
    let base = ["solve", "--example", "ex3", "--n", "4x3", "--shape", "0.7", "--method", "both", "--no-timing"];
    let csv = bcrbf(&base);
    let md = bcrbf(&[&base[..], &["--format", "markdown"]].concat());
    assert!(stdout(&md).starts_with("| example |"));
    let (a, b) = (bcrbf::harness::parse(&stdout(&csv)).unwrap(), bcrbf::harness::parse(&stdout(&md)).unwrap());
    assert_eq!(a.len(), 2);
    assert_eq!(format!("{a:?}"), format!("{b:?}"));
}
