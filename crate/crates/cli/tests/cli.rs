use std::process::{Command, Output};

fn ttolab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ttolab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn shift_symbol_on_monomial_is_exact() {
    let o = ttolab(&["tto", "build", "--theta", "z^4", "--symbol", "z"]);
    assert_eq!(o.status.code(), Some(0));
    let neg = ttolab(&["tto", "build", "--theta", "z^4", "--symbol", "-z"]);
    assert_eq!(neg.status.code(), Some(0), "{}", stderr(&neg));
    assert_eq!(stderr(&o).trim(), "sarason_residual=0.0e0");
    // Row-major, entries as [re, im].
    let m = json(&o)["matrix"].clone();
    let entries = m.as_array().unwrap();
    assert_eq!(entries.len(), 16);
    for (k, v) in entries.iter().enumerate() {
        let (i, j) = (k / 4, k % 4);
        let want = if i == j + 1 { 1.0 } else { 0.0 };
        assert_eq!(v[0].as_f64().unwrap(), want);
        assert_eq!(v[1].as_f64().unwrap(), 0.0);
    }
}

#[test]
fn random_factorization_meets_the_residual() {
    let o = ttolab(&["factor", "run", "--theta", "z^9", "--random-f", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = json(&o);
    assert!(r["residual_rel"].as_f64().unwrap() <= 1e-6);
    assert!(r["pairs"].as_array().unwrap().len() <= 4);
    assert!(r.get("stage_timings").is_none());
    assert!(r["constant"].as_f64().unwrap() >= r["f_l1"].as_f64().unwrap() * (1.0 - 1e-6));
}

#[test]
fn volberg_sweep_is_a_csv_over_doubling_n() {
    let o = ttolab(&["sweep", "volberg", "--nmax", "64", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout.clone()).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header[0], "n");
    let ratio_col = header.iter().position(|h| *h == "constant_ratio_max").unwrap();
    let ns: Vec<usize> = lines
        .map(|l| {
            let cells: Vec<&str> = l.split(',').collect();
            assert_eq!(cells.len(), header.len());
            assert!(cells[ratio_col].parse::<f64>().unwrap() >= 1.0 - 1e-6);
            cells[0].parse().unwrap()
        })
        .collect();
    assert_eq!(ns, [1, 2, 4, 8, 16, 32, 64]);

    let again = ttolab(&["sweep", "volberg", "--nmax", "64", "--seed", "1"]);
    assert_eq!(o.stdout, again.stdout);
}

#[test]
fn same_seed_gives_identical_bytes() {
    let dir = std::env::temp_dir().join(format!("ttolab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let a = dir.join("a.json");
    let b = dir.join("b.json");
    for path in [&a, &b] {
        let o = ttolab(&[
            "factor",
            "run",
            "--theta",
            "B[0.3+0.2i,-0.5i,0]",
            "--random-f",
            "--seed",
            "11",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert!(o.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let other = ttolab(&["factor", "run", "--theta", "B[0.3+0.2i,-0.5i,0]", "--random-f", "--seed", "12"]);
    assert_ne!(std::fs::read(&a).unwrap(), other.stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        vec!["tto", "build", "--theta", "z^4", "--symbol", "q"],
        vec!["tto", "build", "--symbol", "z"],
        vec!["inner", "info", "--theta", "B[1.2]"],
        vec!["factor", "run", "--theta", "z^3", "--random-f", "--tol", "nonsense=1"],
        vec!["factor", "run", "--theta", "z^3"],
        vec!["embed", "norm", "--theta", "z^3"],
        vec!["frobnicate"],
    ] {
        let o = ttolab(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", stderr(&o));
        assert!(o.stdout.is_empty());
    }
}

#[test]
fn tolerance_failures_exit_two_and_name_the_invariant() {
    let o = ttolab(&["factor", "run", "--theta", "z^4", "--random-f", "--tol", "residual=1e-300"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("factorization_residual_rel"));
    assert!(o.stdout.is_empty());

    let o = ttolab(&["embed", "commutator", "--theta", "B[0.4]", "--measure", "m"]);
    assert_eq!(o.status.code(), Some(1), "θ(0) ≠ 0 is rejected as usage: {}", stderr(&o));
}

#[test]
fn inner_info_reports_boundary_derivative() {
    let o = ttolab(&["inner", "info", "--theta", "z^3", "--at", "i"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["degree"], 3);
    assert!((r["boundary_deriv_mod"].as_f64().unwrap() - 3.0).abs() < 1e-12);
    let v = &r["value"];
    assert!((v[0].as_f64().unwrap()).abs() < 1e-15 && (v[1].as_f64().unwrap() + 1.0).abs() < 1e-15);
}

#[test]
fn clark_measures_are_isometric() {
    let o = ttolab(&["clark", "measure", "--theta", "B[0.5,-0.3+0.6i]", "--alpha", "-i"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["atoms"].as_array().unwrap().len(), 2);
    assert!(stderr(&o).starts_with("atoms=2 isometry_deviation="));
}

#[test]
fn tto_space_has_dimension_two_n_minus_one() {
    let o = ttolab(&["tto", "basis", "--theta", "B[0,0.5,0.2i]"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o).as_array().unwrap().len(), 5);
}

#[test]
fn embedding_constants_of_lebesgue_and_clark_are_one() {
    let o = ttolab(&["embed", "norm", "--theta", "B[0,0.5]", "--measure", "m", "--measure", "sigma:1"]);
    assert_eq!(o.status.code(), Some(0));
    for row in json(&o).as_array().unwrap() {
        assert!((row["c2"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn dashboard_csv_has_one_row_per_measure() {
    let o = ttolab(&[
        "embed",
        "dashboard",
        "--theta",
        "z^3",
        "--measure",
        "m",
        "--measure",
        "dirac:0.5",
        "--pairs",
        "40",
        "--pp-trials",
        "5",
        "--factor-trials",
        "1",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.starts_with("theta_id,measure_id,n,"));
}

#[test]
fn json_only_commands_reject_csv() {
    let o = ttolab(&["tto", "basis", "--theta", "z^2", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn paley_wiener_factorization() {
    let o = ttolab(&["factor", "pw", "--random-f", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = json(&o);
    assert!(r["factorization"]["residual"].as_f64().unwrap() <= 1e-4);
    let o = ttolab(&["factor", "pw", "--random-f", "--window", "48"]);
    assert_eq!(o.status.code(), Some(1));
}
