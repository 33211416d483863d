use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_contour-eig"));
    c.env_remove("CONTOUR_EIG_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn laplace_table() {
    let o = run(&["run", "laplace", "ssrr"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("inside the contour: 4 (expected 4)"), "{s}");
    let inside: Vec<&str> = s.lines().filter(|l| l.contains(" yes ")).collect();
    assert_eq!(inside.len(), 4);
    for line in inside {
        let err: f64 = line.split_whitespace().last().unwrap().parse().unwrap();
        assert!(err < 1e-12, "{line}");
    }
    let flags = run(&["run", "--case", "laplace", "--method", "ssrr"]);
    assert_eq!(stdout(&flags).lines().next(), s.lines().next());
}

#[test]
fn csv_report_layout() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["run", "laplace", "feast", "--ell", "3", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let (h, rows) = read_csv(&dir.path().join("laplace_feast_eigenvalues.csv"));
    assert_eq!(h, ["index", "re", "im", "residual", "in_region", "filter_abs", "error"]);
    assert_eq!(rows.len(), 8);
    assert_eq!(rows.iter().filter(|r| r[4] == "true").count(), 4);
    let (h, rows) = read_csv(&dir.path().join("laplace_feast_history.csv"));
    assert_eq!(h, ["iteration", "index", "re", "im", "residual", "in_region"]);
    assert_eq!(rows.len(), 24);
    let (h, rows) = read_csv(&dir.path().join("laplace_feast_singular_values.csv"));
    assert_eq!(h, ["index", "sigma"]);
    assert_eq!(rows.len(), 8);
    let (h, rows) = read_csv(&dir.path().join("laplace_feast_timings.csv"));
    assert_eq!(h, ["solve_odes", "orthonormalization", "matrix_eig", "misc", "total", "ode_solves"]);
    // real problem: half of the 16 points, 8 sources, 3 sweeps
    assert_eq!(rows[0][5], "192");
}

#[test]
fn eigenvalue_file_is_reproducible() {
    let file = |args: &[&str]| {
        let dir = tempfile::tempdir().unwrap();
        let mut all = vec!["run", "mathieu", "ssrr", "--out", dir.path().to_str().unwrap()];
        all.extend_from_slice(args);
        assert!(run(&all).status.success());
        fs::read(dir.path().join("mathieu_ssrr_eigenvalues.csv")).unwrap()
    };
    let a = file(&[]);
    assert_eq!(a, file(&[]));
    assert_eq!(file(&["--threads", "1"]), file(&["--threads", "4"]));
    assert_eq!(a, file(&["--threads", "4"]));
    assert_ne!(a, file(&["--seed", "7"]));
}

#[test]
fn mathieu_feast_count() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["run", "mathieu", "feast", "--ell", "3", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let (_, rows) = read_csv(&dir.path().join("mathieu_feast_eigenvalues.csv"));
    let inside: Vec<_> = rows.iter().filter(|r| r[4] == "true").collect();
    assert_eq!(inside.len(), 15);
    assert!(inside.iter().all(|r| r[6].parse::<f64>().unwrap() < 1e-6));
}

#[test]
fn json_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["run", "laplace", "sscaa", "--format", "json", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let text = fs::read_to_string(dir.path().join("laplace_sscaa.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["method"], "sscaa");
    assert_eq!(v["in_region"], 4);
    assert_eq!(v["config"]["L"], 3);
    assert_eq!(v["eigenvalues"].as_array().unwrap().len(), v["rank"].as_u64().unwrap() as usize);
    let u: contour_eig::Fun = serde_json::from_value(v["eigenfunctions"][0].clone()).unwrap();
    assert_eq!((u.domain().a, u.domain().b), (0.0, std::f64::consts::PI));
    assert!((u.norm() - 1.0).abs() < 1e-12);
}

#[test]
fn problem_file_input() {
    let dir = tempfile::tempdir().unwrap();
    let mut file = contour_eig::problems::laplace().file;
    file.name = "my_laplace".into();
    let path = dir.path().join("p.json");
    fs::write(&path, file.to_json()).unwrap();
    let o = run(&["run", path.to_str().unwrap(), "ssrr", "--L", "3", "--M", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert!(s.starts_with("my_laplace / ssrr"));
    assert!(s.contains("inside the contour: 4\n"));

    file.contour = None;
    fs::write(&path, file.to_json()).unwrap();
    assert_eq!(run(&["run", path.to_str().unwrap()]).status.code(), Some(2));
    fs::write(&path, "{not json").unwrap();
    assert_eq!(run(&["run", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn configuration_errors_exit_with_2() {
    for args in [
        &["run", "heat"][..],
        &["run", "laplace", "arnoldi"],
        &["run", "laplace", "ssrr", "--bogus"],
        &["run", "laplace", "ssrr", "--L", "0"],
        &["run", "laplace", "ssrr", "--delta", "2"],
        &["experiment", "exp9"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn thread_count_from_environment() {
    let o = bin().args(["run", "laplace", "ssrr"]).env("CONTOUR_EIG_THREADS", "2").output().unwrap();
    assert!(o.status.success());
    let o = bin().args(["run", "laplace", "ssrr"]).env("CONTOUR_EIG_THREADS", "many").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn cases_listing() {
    let s = stdout(&run(&["cases"]));
    assert_eq!(s.lines().count(), 7);
    assert!(s.lines().any(|l| l.starts_with("orr_sommerfeld_2000") && l.contains("m = 28")));
}

#[test]
fn exp1_files() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(&["experiment", "exp1", "--out", dir.path().to_str().unwrap()]).status.success());
    let (h, rows) = read_csv(&dir.path().join("exp1_discrete.csv"));
    assert_eq!(h, ["n", "err1", "err2", "err3", "err4"]);
    assert_eq!(rows.len(), 21);
    let row = rows.iter().find(|r| r[0] == "1000").unwrap();
    let want = (contour_eig::problems::discrete_laplace_eigs(1000)[3] - 16.0).abs();
    assert_eq!(row[4].parse::<f64>().unwrap(), want);
    let (h, rows) = read_csv(&dir.path().join("exp1_contour.csv"));
    assert_eq!(h, ["i", "exact", "re", "im", "abs_error", "residual"]);
    assert_eq!(rows.len(), 4);
}

#[test]
fn exp2_rates_track_prediction() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(&["experiment", "exp2", "--out", dir.path().to_str().unwrap()]).status.success());
    let (h, rows) = read_csv(&dir.path().join("exp2_rates.csv"));
    assert_eq!(h, ["method", "l", "m", "observed", "predicted"]);
    assert_eq!(rows.len(), 7);
    for r in rows {
        let (obs, pred): (f64, f64) = (r[3].parse().unwrap(), r[4].parse().unwrap());
        assert!(obs <= 1.1 * pred && obs >= 0.1 * pred, "{r:?}");
    }
    let (_, hist) = read_csv(&dir.path().join("exp2_history.csv"));
    assert_eq!(hist.len(), 7 * 6);
}

#[test]
fn exp3_single_case() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(&["experiment", "exp3", "--case", "bessel", "--out", dir.path().to_str().unwrap()]).status.success());
    let (h, rows) = read_csv(&dir.path().join("exp3_timings.csv"));
    assert_eq!(h[..5], ["case", "method", "ell", "in_region", "expected"]);
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r[3] == "11"));
    let (_, pairs) = read_csv(&dir.path().join("exp3_pairs.csv"));
    assert!(!pairs.is_empty());
}

#[test]
fn exp4_scaling_curve() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(&["experiment", "exp4", "--case", "laplace", "--out", dir.path().to_str().unwrap()]).status.success());
    let (h, rows) = read_csv(&dir.path().join("exp4_scaling.csv"));
    assert_eq!(h, ["method", "processes", "total_time", "speedup"]);
    assert_eq!(rows.len(), 4 * 1024);
    for method in ["feast", "ssrr", "sshankel", "sscaa"] {
        let t: Vec<f64> = rows.iter().filter(|r| r[0] == method).map(|r| r[2].parse().unwrap()).collect();
        assert_eq!(t.len(), 1024);
        assert!(t.windows(2).all(|w| w[1] <= w[0]), "{method}");
    }
    let inputs: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("exp4_inputs.json")).unwrap()).unwrap();
    assert_eq!(inputs.as_array().unwrap().len(), 4);
}

#[test]
fn filter_figure() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(&["experiment", "filterfig", "--out", dir.path().to_str().unwrap()]).status.success());
    let (h, rows) = read_csv(&dir.path().join("filterfig.csv"));
    assert_eq!(h, ["n", "re", "im", "abs_f"]);
    assert_eq!(rows.len(), 3 * 601);
    for n in ["16", "32", "64"] {
        let at0 = rows.iter().find(|r| r[0] == n && r[1].parse::<f64>().unwrap() == 0.0).unwrap();
        assert!((at0[3].parse::<f64>().unwrap() - 1.0).abs() < 1e-14);
    }
}
