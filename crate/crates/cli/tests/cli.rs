use std::process::{Command, Output};

use serde_json::Value;

fn starsys(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_starsys")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn item_labels(report: &Value) -> Vec<String> {
    report["items"]
        .as_array()
        .unwrap()
        .iter()
        .map(|it| {
            let (h, k) = (it["gen_dim"][0].as_u64().unwrap(), it["gen_dim"][1].as_u64().unwrap());
            match &it["count"] {
                Value::String(s) if s == "family" => format!("family({h};{k})"),
                n => format!("{}x({h};{k})", n.as_u64().unwrap()),
            }
        })
        .collect()
}

#[test]
fn classify_truncated_cosines_within_band_is_xi_zero() {
    // 0.35355 ≈ 1/(2√2) leaves ξ ≈ 2.4e-6, inside a band of 1e-5
    let r = json(&starsys(&["classify", "--m", "3", "--r", "1", "--tau", "0.25,0.35355,0.5,0.75", "--eq-tol", "1e-5"]));
    assert_eq!(r["regime"], "xi_zero_unique");
    assert_eq!(item_labels(&r), ["1x(4;1)"]);
}

#[test]
fn classify_exact_cosines_is_xi_zero() {
    let tau = format!("0.25,{},0.5,0.75", 0.125f64.sqrt());
    let r = json(&starsys(&["classify", "--m", "3", "--r", "1", "--tau", &tau]));
    assert_eq!(r["regime"], "xi_zero_unique");
    assert!(r["xi"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn classify_large_cosines_is_empty() {
    let r = json(&starsys(&["classify", "--m", "0", "--r", "2", "--tau", "0.9,0.9"]));
    assert_eq!(r["regime"], "empty");
    assert!(r["items"].as_array().unwrap().is_empty());
}

#[test]
fn invalid_parameters_exit_with_two() {
    for args in [
        &["classify", "--m", "1", "--r", "0", "--tau", "0.5,0.2"][..],
        &["classify", "--m", "1", "--r", "0", "--tau", "1.5"][..],
        &["classify", "--m", "1", "--r", "0", "--tau", "abc"][..],
    ] {
        let out = starsys(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn sweep_crosses_the_regimes() {
    let out = starsys(&["sweep", "--min", "0.21", "--max", "0.26", "--steps", "6"]);
    assert!(out.status.success());
    let mut rd = csv::Reader::from_reader(&out.stdout[..]);
    let headers = rd.headers().unwrap().clone();
    assert_eq!(headers.iter().collect::<Vec<_>>(), ["tau0", "xi", "regime", "items", "phi_tau", "boundary"]);
    let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
    let regimes: Vec<&str> = rows.iter().map(|r| &r[2]).collect();
    assert_eq!(regimes, ["wild", "wild", "tame_family", "finite", "xi_zero_unique", "empty"]);
    assert_eq!(&rows[4][5], "true");
    assert_eq!(&rows[2][3], "1x(5;1) 2x(6;1) family(12;2) 1x(11;2)");
    assert!(!rows[2][4].is_empty());
}

#[test]
fn single_point_sweeps() {
    for (tau0, regime) in [("0.30", "empty"), ("0.20", "wild")] {
        let out = starsys(&["sweep", "--family", "paper-example", "--min", tau0, "--max", tau0]);
        assert!(out.status.success());
        let mut rd = csv::Reader::from_reader(&out.stdout[..]);
        let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
        assert_eq!(rows.len(), 1);
        assert_eq!(&rows[0][2], regime);
    }
}

#[test]
fn sweep_rows_agree_with_classify() {
    let out = starsys(&["sweep", "--min", "0.215", "--max", "0.245", "--steps", "7"]);
    let mut rd = csv::Reader::from_reader(&out.stdout[..]);
    for row in rd.records().map(Result::unwrap) {
        let t: f64 = row[0].parse().unwrap();
        let tau = format!("{},{},{},{}", t, 2f64.sqrt() * t, 2.0 * t, 3.0 * t);
        let r = json(&starsys(&["classify", "--m", "3", "--r", "1", "--tau", &tau]));
        assert_eq!(r["regime"], &row[2]);
        assert_eq!(item_labels(&r).join(" "), &row[3]);
    }
}

#[test]
fn construct_representative_has_empty_report() {
    let tau = format!("0.25,{},0.5,0.75", 0.125f64.sqrt());
    let r = json(&starsys(&["construct", "--m", "3", "--r", "1", "--tau", &tau, "--case", "xi-zero"]));
    assert_eq!(r["system"]["ambient_dim"], 4);
    assert_eq!(r["gen_dim"], "(4;1)");
    assert!(r["verification"]["violations"].as_array().unwrap().is_empty());
}

#[test]
fn construct_unknown_case_fails() {
    let out = starsys(&["construct", "--m", "1", "--r", "0", "--tau", "0.5", "--case", "no-such-case"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn kernel_formula_matches_numeric() {
    let r = json(&starsys(&["kernel", "--m", "1", "--r", "0", "--tau", "0.5", "--case", "all-zero"]));
    assert_eq!(r["formula"], 1);
    assert_eq!(r["numeric"], 1);
}

#[test]
fn verify_representative_passes() {
    let r = json(&starsys(&["verify", "--m", "1", "--r", "0", "--tau", "0.5", "--case", "all-zero"]));
    assert_eq!(r["passed"], true);
}

#[test]
fn wild_embed_of_zero_pair_is_reducible() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("pair.json");
    std::fs::write(&input, r#"{"a": [[0, 0], [0, 0]], "b": [[0, 0], [0, 0]]}"#).unwrap();
    let r = json(&starsys(&["wild-embed", "--input", input.to_str().unwrap()]));
    assert!(r["commutant_dim"].as_u64().unwrap() > 1);
    assert!(r["sum_excess"].as_f64().unwrap() <= 0.1);
}

#[test]
fn wild_embed_rejects_large_pair() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("pair.json");
    std::fs::write(&input, r#"{"a": [[1, 0], [0, 0]], "b": [[0, 0], [0, 0]]}"#).unwrap();
    assert_eq!(starsys(&["wild-embed", "--input", input.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = starsys(&["classify", "--m", "0", "--r", "2", "--tau", "0.9,0.9", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r["regime"], "empty");
}
