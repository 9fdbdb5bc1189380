use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cfdim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cfdim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "status {:?}, stderr: {}",
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

fn num(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("missing {key} in {v}"))
}

#[test]
fn tail_reproduces_printed_values() {
    let v = json_of(&cfdim(&["tail", "--set", "I1", "--s", "1.86", "--r", "100"]));
    assert!((num(&v, "delta") - 0.00071).abs() < 5e-6);
    assert!((num(&v, "eta") - 0.00059).abs() < 5e-6);
    let out = cfdim(&["tail", "--set", "I3", "--s", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn higher_order_special_example() {
    let v = json_of(&cfdim(&["higher-order", "--set", "special", "--degree", "2", "--h", "0.01"]));
    assert!((num(&v, "s") - 0.999999997912829).abs() < 1e-9);
    assert_eq!(v["n"], 100);
}

#[test]
fn dimension_json_verifies_and_tampering_is_caught() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("i3.json");
    let out = cfdim(&["dimension", "--set", "I3", "--n", "50", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    for key in [
        "set", "h", "R", "s_lower", "s_upper", "r_at_lower", "r_at_upper", "alpha_lower",
        "alpha_upper", "dof", "runtime_s",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert!((num(&v, "s_lower") - 1.53706).abs() < 2e-4);
    assert!((num(&v, "s_upper") - 1.53790).abs() < 2e-4);
    assert!(num(&v, "r_at_upper") <= 1.0 && num(&v, "r_at_lower") >= 1.0);

    assert!(cfdim(&["verify-from", path.to_str().unwrap()]).status.success());

    let mut bad = v.clone();
    let w = bad["certificate_upper"].as_array_mut().unwrap();
    w[0] = Value::from(w[0].as_f64().unwrap() * 0.5);
    let bad_path = dir.path().join("bad.json");
    std::fs::write(&bad_path, serde_json::to_string(&bad).unwrap()).unwrap();
    assert_eq!(cfdim(&["verify-from", bad_path.to_str().unwrap()]).status.code(), Some(1));

    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{ not json").unwrap();
    assert_eq!(cfdim(&["verify-from", garbage.to_str().unwrap()]).status.code(), Some(2));
}

fn read_triplets(path: &Path) -> Vec<(usize, usize, f64)> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| {
            let mut it = l.split_whitespace();
            let i = it.next().unwrap().parse().unwrap();
            let j = it.next().unwrap().parse().unwrap();
            let v = it.next().unwrap().parse().unwrap();
            (i, j, v)
        })
        .collect()
}

/// `M v` from dumped triplets, summed in file order.
fn product(triplets: &[(usize, usize, f64)], v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    for &(i, j, m) in triplets {
        out[i] += m * v[j];
    }
    out
}

#[test]
fn dumped_matrices_satisfy_the_stored_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("i2.json");
    let prefix = dir.path().join("mat");
    let out = cfdim(&[
        "dimension",
        "--set",
        "I2",
        "--n",
        "20",
        "--r",
        "30",
        "--out",
        json.to_str().unwrap(),
        "--dump-matrix",
        prefix.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    let vec_of = |key: &str| -> Vec<f64> {
        v[key].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
    };
    let (u, w) = (vec_of("certificate_lower"), vec_of("certificate_upper"));
    let a = read_triplets(&dir.path().join("mat_A.txt"));
    let b = read_triplets(&dir.path().join("mat_B.txt"));
    assert!(a.iter().chain(&b).all(|t| t.2 >= 0.0));
    let au = product(&a, &u);
    let bw = product(&b, &w);
    assert!(au.iter().zip(&u).all(|(x, y)| x >= y));
    assert!(bw.iter().zip(&w).all(|(x, y)| x <= y));
}

#[test]
fn fine_and_infinite_brackets_match_published_values() {
    let v = json_of(&cfdim(&["dimension", "--set", "I3", "--n", "200"]));
    assert!((num(&v, "s_lower") - 1.53765).abs() < 1e-4);
    assert!((num(&v, "s_upper") - 1.53770).abs() < 1e-4);
    let v = json_of(&cfdim(&["dimension", "--set", "I1", "--n", "50", "--r", "100"]));
    assert!((num(&v, "s_lower") - 1.85516).abs() < 2e-4);
    assert_eq!(num(&v, "R"), 100.0);
}

#[test]
fn thread_count_does_not_change_results() {
    let run = |t: &str| {
        let v = json_of(&cfdim(&["--threads", t, "dimension", "--set", "I3", "--n", "30"]));
        (v["s_lower"].clone(), v["s_upper"].clone(), v["certificate_upper"].clone())
    };
    assert_eq!(run("1"), run("3"));
}

#[test]
fn radius_examples() {
    let v = json_of(&cfdim(&["radius", "--set", "I3", "--n", "50", "--s", "1.5380"]));
    assert!(num(&v, "r_upper") <= 1.0);
    assert!(num(&v, "r_lower") <= num(&v, "r_upper"));

    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("one.txt");
    std::fs::write(&file, "1,0\n").unwrap();
    let set = format!("custom:{}", file.display());
    let mut prev = f64::INFINITY;
    for s in ["1", "2", "4"] {
        let v = json_of(&cfdim(&["radius", "--set", &set, "--n", "40", "--s", s]));
        assert!(num(&v, "r_upper") < prev);
        prev = num(&v, "r_upper");
    }
}

#[test]
fn custom_alphabet_bracket_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("digits.txt");
    std::fs::write(&file, "# 1±i, 2±i, 3±i\n1,1\n1,-1\n2,1\n2,-1\n3,1\n3,-1\n").unwrap();
    let json = dir.path().join("b.json");
    let set = format!("custom:{}", file.display());
    let out = cfdim(&["dimension", "--set", &set, "--n", "24", "--out", json.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert!(num(&v, "s_lower") <= num(&v, "s_upper"));
    assert!(v["R"].is_null());
    assert!(cfdim(&["verify-from", json.to_str().unwrap()]).status.success());
}

#[test]
fn eigenfunction_dump_is_positive() {
    let out = cfdim(&["dump-eigenfunction", "--set", "I3", "--n", "50", "--s", "1.5377"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y,v"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 1096);
    assert!(rows.iter().all(|r| r.len() == 3 && r[2] > 0.0));
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["dimension", "--set", "I4"][..],
        &["dimension", "--set", "I3", "--n", "7"],
        &["dimension", "--set", "I3", "--h", "0.03"],
        &["dimension", "--set", "special"],
        &["higher-order", "--set", "I3", "--degree", "5"],
        &["radius", "--set", "I1", "--s", "0.9"],
        &["dimension", "--set", "custom:/no/such/file"],
    ] {
        assert_eq!(cfdim(args).status.code(), Some(2), "{args:?}");
    }
}
