use std::process::{Command, Output};

use serde_json::Value;

fn mgcat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mgcat"))
        .args(args)
        .env_remove("MGCAT_CACHE_DIR")
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn graph_a1() {
    let out = mgcat(&["graph", "--system", "A1"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["vertices"].as_array().unwrap().len(), 2);
    assert_eq!(v["edges"].as_array().unwrap().len(), 1);
    assert_eq!(v["vertices"][1]["word"], serde_json::json!([0]));
}

#[test]
fn kl_singular_pair() {
    let out = mgcat(&["kl", "--system", "A3", "--pair", "s2", "s2s1s3s2"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["P"], "1+q");
}

#[test]
fn bmp_matches_kl_on_a3_pair() {
    let v = json(&mgcat(&["bmp", "--system", "A3", "--element", "s2s1s3s2"]));
    assert_eq!(v["stalks"]["s2"], serde_json::json!([[0, 1], [2, 1]]));
    assert_eq!(v["stalks"]["s2s1s3s2"], serde_json::json!([[0, 1]]));
}

#[test]
fn verify_a2_all_passes() {
    let out = mgcat(&["verify", "--system", "A2", "--suite", "all"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["passed"].as_u64().unwrap() >= 10);
    assert_eq!(v["failed"], 0);
}

#[test]
fn output_is_byte_stable() {
    for args in [
        &["algebra", "--system", "A1"][..],
        &["verma-homs", "--system", "A2"],
        &["verify", "--system", "A1"],
    ] {
        assert_eq!(mgcat(args).stdout, mgcat(args).stdout);
    }
}

#[test]
fn algebra_dump() {
    let v = json(&mgcat(&["algebra", "--system", "A1"]));
    assert_eq!(v["dim"], 5);
    assert_eq!(v["basis"].as_array().unwrap().len(), 5);
    let degrees: Vec<i64> = v["basis"]
        .as_array()
        .unwrap()
        .iter()
        .map(|b| b["degree"].as_i64().unwrap())
        .collect();
    assert_eq!(degrees.iter().filter(|&&d| d == 0).count(), 2);
    // every constant is an exact rational string
    for p in v["products"].as_array().unwrap() {
        for t in p["ab"].as_array().unwrap() {
            assert!(
                t[1].as_str().unwrap().parse::<f64>().is_ok()
                    || t[1].as_str().unwrap().contains('/')
            );
        }
    }
}

#[test]
fn verma_hom_table() {
    let v = json(&mgcat(&["verma-homs", "--system", "A2"]));
    assert_eq!(v["nonzero"], 19);
}

#[test]
fn translate_and_twist() {
    let v = json(&mgcat(&[
        "translate",
        "--system",
        "A2",
        "--s",
        "1",
        "--module",
        "P(s1)",
    ]));
    assert_eq!(v["result"]["projective_summands"]["s1"], 2);
    assert_eq!(v["tensor_dim_agrees"], true);
    let v = json(&mgcat(&[
        "twist", "--system", "A2", "--word", "1", "--module", "M(e)",
    ]));
    assert_eq!(v["result"]["isomorphic_to"], serde_json::json!(["M(s1)"]));
    let v = json(&mgcat(&[
        "twist", "--system", "A2", "--word", "s1s2s1", "--module", "M(e)",
    ]));
    assert_eq!(v["result"]["dim"], 1);
}

#[test]
fn config_errors_exit_2() {
    assert_eq!(mgcat(&["graph", "--system", "Q7"]).status.code(), Some(2));
    assert_eq!(mgcat(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(
        mgcat(&["twist", "--word", "11", "--module", "M(e)"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        mgcat(&["translate", "--s", "1", "--module", "X(e)"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(mgcat(&["graph", "--margin", "0"]).status.code(), Some(2));
    assert_eq!(mgcat(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn realization_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a1.json");
    let text = r#"{"rank":1,"coxeter_matrix":[[1]],"dimV":1,"generators":[{"matrix":[["-1"]],"alpha":["1"]}]}"#;
    std::fs::write(&path, text).unwrap();
    let out = mgcat(&["graph", "--realization", path.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(json(&out)["vertices"].as_array().unwrap().len(), 2);
}

#[test]
fn sheaf_cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_mgcat"))
            .args(["verify", "--system", "B2", "--suite", "sheaves"])
            .env("MGCAT_CACHE_DIR", dir.path())
            .output()
            .unwrap()
    };
    let first = run();
    let files = std::fs::read_dir(dir.path()).unwrap().count();
    assert_eq!(files, 8);
    let second = run();
    assert!(second.status.success());
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(
        first.stdout,
        mgcat(&["verify", "--system", "B2", "--suite", "sheaves"]).stdout
    );
}
