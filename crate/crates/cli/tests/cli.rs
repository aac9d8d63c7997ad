use std::process::Command;

fn skeinkit(args: &[&str]) -> (String, String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_skeinkit"))
        .args(args)
        .env_remove("SKEINKIT_ORDER")
        .output()
        .expect("binary runs");
    (
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
        out.status.code().unwrap_or(-1),
    )
}

#[test]
fn jw_two_strands_pinned_text() {
    let (stdout, _, code) = skeinkit(&["jw", "--n", "2"]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "[id] + 1/(q+q^-1) [U1]\n");
}

#[test]
fn approx_two_one_pinned_text() {
    let (stdout, _, code) = skeinkit(&["approx", "--n", "2", "--m", "1", "--order", "16"]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "order=5 bound=5 PASS\n");
}

#[test]
fn kh_hopf_defaults_to_json() {
    let (stdout, _, code) = skeinkit(&["kh", "--torus", "2,1"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    let mut spots: Vec<(i64, i64)> = rows
        .iter()
        .map(|r| (r["h"].as_i64().unwrap(), r["q2"].as_i64().unwrap()))
        .collect();
    spots.sort();
    assert_eq!(spots, vec![(-2, 4), (-2, 8), (0, -4), (0, 0)]);
    for r in rows {
        assert_eq!(r["betti"], 1);
        assert!(r["torsion"].as_array().unwrap().is_empty());
    }
}

#[test]
fn kh_output_is_deterministic() {
    let a = skeinkit(&["kh", "--torus", "2,2"]);
    let b = skeinkit(&["kh", "--torus", "2,2"]);
    assert_eq!(a, b);
    assert_eq!(a.2, 0);
}

#[test]
fn trefoil_torsion_visible_in_text_table() {
    let (stdout, _, code) = skeinkit(&["kh", "--torus", "2,2", "--format", "text"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("Z/2"));
}

#[test]
fn cone_order_meets_bound() {
    let (stdout, _, code) = skeinkit(&["cone-order", "--n", "2", "--m", "1"]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "order=3 bound=3 PASS\n");
}

#[test]
fn unknown_strategy_is_usage_error() {
    let (_, stderr, code) = skeinkit(&["jw", "--n", "2", "--strategy", "lazy"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("strategy"));
}

#[test]
fn negative_order_is_usage_error() {
    let (_, _, code) = skeinkit(&["jw", "--n", "2", "--order", "-1"]);
    assert_eq!(code, 2);
}

#[test]
fn bad_word_is_usage_error() {
    let (_, _, code) = skeinkit(&["bracket", "--n", "2", "--word", "-1 x"]);
    assert_eq!(code, 2);
}

#[test]
fn check_suites_pass() {
    for suite in ["skein", "complex", "homology"] {
        let (stdout, _, code) = skeinkit(&["check", "--suite", suite]);
        assert_eq!(code, 0, "suite {} failed:\n{}", suite, stdout);
        assert!(stdout.contains("PASS"));
    }
}

#[test]
fn approx_csv_emits_convergence_curve() {
    let (stdout, _, code) = skeinkit(&["approx", "--n", "2", "--m", "2", "--format", "csv"]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "m,order,bound\n1,5,5\n2,9,9\n");
}
