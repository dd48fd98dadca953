use std::process::{Command, Output};

use serde_json::Value;
use skewdet::polyring::MultiPoly;

fn skewdet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skewdet"))
        .args(args)
        .env_remove("SKEWDET_JOBS")
        .output()
        .expect("binary runs")
}

fn json_out(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON object")
}

fn lines(out: &Output) -> Vec<Value> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn euler_castelnuovo_case() {
    let out = skewdet(&[
        "euler", "--g", "4", "--r", "1", "--d", "3", "--a", "0,1", "--b", "0,1",
    ]);
    assert_eq!(code(&out), 0);
    let v = json_out(&out);
    assert_eq!(v["chi"], 2);
    assert_eq!(v["rho"], 0);
    assert_eq!(v["agree"], true);
    for method in [
        "thm1",
        "tableau",
        "series",
        "classical",
        "closed",
        "chan_pflueger",
    ] {
        assert_eq!(v["values"][method], 2, "{method}");
    }
}

#[test]
fn euler_rho_one_case() {
    let out = skewdet(&[
        "euler", "--g", "5", "--r", "1", "--d", "4", "--a", "0,1", "--b", "0,1",
    ]);
    assert_eq!(code(&out), 0);
    let v = json_out(&out);
    assert_eq!(v["chi"], -10);
    assert_eq!(v["rho"], 1);
    assert_eq!(v["values"]["clpt"], -10);
}

#[test]
fn euler_negative_rho_is_empty_expected() {
    let out = skewdet(&["euler", "--g", "3", "--r", "1", "--d", "2"]);
    assert_eq!(code(&out), 0);
    let v = json_out(&out);
    assert_eq!(v["chi"], 0);
    assert_eq!(v["empty_expected"], true);
}

#[test]
fn euler_single_method_and_explicit_n() {
    let out = skewdet(&[
        "euler", "--g", "7", "--r", "1", "--d", "6", "--a", "0,2", "--b", "0,2", "--method",
        "tableau", "--n", "12",
    ]);
    assert_eq!(code(&out), 0);
    let v = json_out(&out);
    assert_eq!(v["n"], 12);
    assert_eq!(v["rho"], 1);
    let values = v["values"].as_object().unwrap();
    assert_eq!(values.keys().collect::<Vec<_>>(), vec!["tableau"]);
    let default = json_out(&skewdet(&[
        "euler", "--g", "7", "--r", "1", "--d", "6", "--a", "0,2", "--b", "0,2",
    ]));
    assert_eq!(default["chi"], v["values"]["tableau"]);
}

#[test]
fn euler_input_errors_exit_2() {
    let bad = [
        vec![
            "euler", "--g", "4", "--r", "1", "--d", "3", "--a", "1,0", "--b", "0,1",
        ],
        vec!["euler", "--g", "4", "--r", "1", "--d", "3", "--a", "0,1,2"],
        vec!["euler", "--g", "4", "--r", "1", "--d", "3", "--n", "1"],
        vec!["euler", "--g", "13", "--r", "1", "--d", "3"],
        vec![
            "euler", "--g", "4", "--r", "1", "--d", "4", "--a", "0,2", "--method", "closed",
        ],
        vec!["euler", "--g", "four", "--r", "1", "--d", "3"],
    ];
    for args in bad {
        assert_eq!(code(&skewdet(&args)), 2, "{args:?}");
    }
}

#[test]
fn poly_printed_example() {
    let out = skewdet(&[
        "poly",
        "--w",
        "3 1 2 5 4",
        "--kind",
        "schubert",
        "--double",
        "--check",
    ]);
    assert_eq!(code(&out), 0);
    let v = json_out(&out);
    let got: MultiPoly = v["polynomial"].as_str().unwrap().parse().unwrap();
    let expected: MultiPoly = "x1 + x2 + x3 + x4 - y1 - y2 - y3 - y4"
        .parse::<MultiPoly>()
        .unwrap()
        * "x1^2 - x1*y1 - x1*y2 + y1*y2".parse::<MultiPoly>().unwrap();
    assert_eq!(got, expected);
    assert_eq!(v["check"]["oracle"]["agree"], true);
}

#[test]
fn poly_grothendieck_example() {
    let out = skewdet(&[
        "poly",
        "--w",
        "1 3 2",
        "--kind",
        "grothendieck",
        "--check",
        "--expect",
        "x1 + x2 + b*x1*x2",
    ]);
    assert_eq!(code(&out), 0);
    let v = json_out(&out);
    assert_eq!(v["polynomial"], "x1*x2*b + x1 + x2");
    assert_eq!(v["check"]["set_valued_tableaux"]["agree"], true);
}

#[test]
fn poly_expect_mismatch_exits_3() {
    let out = skewdet(&[
        "poly",
        "--w",
        "1 3 2",
        "--kind",
        "grothendieck",
        "--expect",
        "x1 + x2",
    ]);
    assert_eq!(code(&out), 3);
}

#[test]
fn poly_rejects_321_in_determinant_mode() {
    assert_eq!(
        code(&skewdet(&["poly", "--w", "3 2 1", "--kind", "schubert"])),
        2
    );
    let out = skewdet(&[
        "poly", "--w", "3 2 1", "--kind", "schubert", "--mode", "oracle",
    ]);
    assert_eq!(code(&out), 0);
    let v = json_out(&out);
    assert_eq!(v["polynomial"], "x1^2*x2");
}

#[test]
fn poly_size_cap_and_bad_input() {
    assert_eq!(code(&skewdet(&["poly", "--w", "1 2 3 4 5 6 8 7"])), 2);
    assert_eq!(code(&skewdet(&["poly", "--w", "1 1 2"])), 2);
    assert_eq!(
        code(&skewdet(&[
            "poly",
            "--w",
            "1 3 2",
            "--kind",
            "grothendieck",
            "--cap",
            "0"
        ])),
        2
    );
}

#[test]
fn poly_output_is_deterministic() {
    let args = [
        "poly",
        "--w",
        "2 4 1 3",
        "--kind",
        "grothendieck",
        "--double",
    ];
    assert_eq!(skewdet(&args).stdout, skewdet(&args).stdout);
}

#[test]
fn sweep_classical_agrees() {
    let out = skewdet(&["sweep", "--g", "0..6", "--r", "0..1", "--classical"]);
    assert_eq!(code(&out), 0);
    let recs = lines(&out);
    assert!(!recs.is_empty());
    for rec in &recs {
        assert_eq!(rec["agree"], true);
        let values = rec["values"].as_object().unwrap();
        assert!(values.contains_key("thm1") && values.contains_key("tableau"));
        if rec["g"].as_i64().unwrap() - rec["d"].as_i64().unwrap() + rec["r"].as_i64().unwrap() >= 0
        {
            assert!(values.contains_key("closed"), "{rec}");
        }
    }
}

#[test]
fn sweep_rho_one_carries_clpt() {
    let out = skewdet(&["sweep", "--g", "2..4", "--r", "1", "--rho", "1"]);
    assert_eq!(code(&out), 0);
    let recs = lines(&out);
    assert!(!recs.is_empty());
    assert!(recs
        .iter()
        .all(|r| r["rho"] == 1 && r["values"]["clpt"] == r["chi"]));
}

#[test]
fn sweep_empty_range_and_bad_syntax() {
    let out = skewdet(&["sweep", "--g", "3..2"]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    assert_eq!(code(&skewdet(&["sweep", "--g", "a..b"])), 2);
    assert_eq!(code(&skewdet(&["sweep", "--g", "0..20"])), 2);
}

#[test]
fn sweep_writes_file_and_jobs_do_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.jsonl");
    let args = [
        "sweep",
        "--g",
        "0..3",
        "--r",
        "0..2",
        "--out",
        path.to_str().unwrap(),
    ];
    let out = skewdet(&args);
    assert_eq!(code(&out), 0);
    let first = std::fs::read(&path).unwrap();
    assert!(!first.is_empty());
    let out = Command::new(env!("CARGO_BIN_EXE_skewdet"))
        .args(args)
        .env("SKEWDET_JOBS", "1")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert_eq!(std::fs::read(&path).unwrap(), first);
}

#[test]
fn selfcheck_quick_passes() {
    let out = skewdet(&["selfcheck", "--quick"]);
    assert_eq!(code(&out), 0);
    let v = json_out(&out);
    assert_eq!(v["pass"], true);
    assert_eq!(v["suites"].as_object().unwrap().len(), 5);
}

#[test]
fn selfcheck_injected_fault_names_the_suite() {
    let out = skewdet(&["selfcheck", "--quick", "--inject-fault", "n-invariance"]);
    assert_eq!(code(&out), 3);
    let v = json_out(&out);
    assert_eq!(v["failed"], serde_json::json!(["n-invariance"]));
    assert_eq!(v["suites"]["n-invariance"]["pass"], false);
    assert_eq!(v["suites"]["lemma-powers"]["pass"], true);
}

#[test]
fn timing_is_opt_in() {
    let plain = json_out(&skewdet(&["euler", "--g", "4", "--r", "1", "--d", "3"]));
    assert!(plain.get("timing_ms").is_none());
    let timed = json_out(&skewdet(&[
        "--timing", "euler", "--g", "4", "--r", "1", "--d", "3",
    ]));
    assert!(timed.get("timing_ms").is_some());
}
