use std::process::Command;

use orthoiso::canonical::SegmentSpec;
use orthoiso::json;
use orthoiso::random;
use orthoiso::solver::CongruenceProblem;
use orthoiso::toeplitz::{Parity, ToeplitzElement};
use orthoiso::{ExactScalar as X, Matrix};
use serde_json::{json, Value};

fn run(args: &[&str]) -> (i32, Value, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_orthoiso"))
        .args(args)
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    let v = if text.trim().is_empty() {
        Value::Null
    } else {
        serde_json::from_str(&text).unwrap()
    };
    (out.status.code().unwrap(), v, text)
}

fn scratch(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("orthoiso-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn dim_of_a_nonzero_spec() {
    let (code, v, _) = run(&[
        "dim",
        "--spec",
        r#"{"case":"nonzero","lambda":1,"alpha":[2,1],"mu":[1,1]}"#,
    ]);
    assert_eq!(code, 0);
    assert_eq!(v, json!({ "dim": 5 }));
    let (_, v, _) = run(&["dim", "--spec", r#"{"case":"nilpotent","alpha":[1],"mu":[4]}"#]);
    assert_eq!(v, json!({ "dim": 6 }));
}

#[test]
fn verify_reports_exit_codes() {
    let k = r#"{"rows":2,"cols":2,"backend":"exact","entries":[["0","1"],["-1","0"]]}"#;
    let (code, v, _) = run(&["verify", "--matrix", k, "--q", "[[1,0],[0,1]]"]);
    assert_eq!(code, 0);
    assert_eq!(v["stabilizes"], json!(true));
    assert_eq!(v["residual"], json!("0"));
    let (code, v, _) = run(&["verify", "--matrix", k, "--q", "[[1,1],[0,1]]"]);
    assert_eq!(code, 1);
    assert_eq!(v["stabilizes"], json!(false));
    let (code, v, _) = run(&["verify", "--matrix", k, "--q", "[[1,0,0],[0,1,0],[0,0,1]]"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], json!("ShapeError"));
}

#[test]
fn invalid_input_exits_2() {
    let (code, v, _) = run(&["dim", "--spec", r#"{"case":"nilpotent","alpha":[1,2],"mu":[1,1]}"#]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], json!("InvalidSpec"));
    let (code, v, _) = run(&["canonical", "--spec", "{not json"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], json!("JsonError"));
    let (code, v, _) = run(&["dim", "--spec", "/nonexistent/spec.json"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], json!("Io"));
    let (code, v, _) = run(&[
        "canonical",
        "--spec",
        r#"{"case":"orth-generic","lambda":1,"alpha":[1],"mu":[1]}"#,
    ]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], json!("BackendUnavailable"));
}

#[test]
fn sampling_is_deterministic_and_round_trips() {
    let spec = r#"{"case":"nilpotent","alpha":[2],"mu":[1]}"#;
    let args = ["sample", "--spec", spec, "--count", "3", "--seed", "7"];
    let (code, v, text) = run(&args);
    assert_eq!(code, 0);
    assert_eq!(run(&args).2, text);
    assert_ne!(run(&["sample", "--spec", spec, "--count", "3", "--seed", "8"]).2, text);
    let elements = v["elements"].as_array().unwrap();
    assert_eq!(elements.len(), 3);
    let form = v["form"].to_string();
    for e in elements {
        assert_eq!(e["certificate"]["verified"], json!(true));
        assert_eq!(e["certificate"]["stabilizer"], json!("0"));
        let q: Matrix<X> = json::matrix_from_json(&e["q"]).unwrap();
        assert_eq!(json::matrix_to_json(&q), e["q"]);
        let (code, w, _) = run(&["verify", "--matrix", &form, "--q", &e["q"].to_string()]);
        assert_eq!((code, &w["residual"]), (0, &json!("0")));
    }
}

#[test]
fn orthogonal_and_float_samples() {
    let (code, v, _) = run(&[
        "sample",
        "--spec",
        r#"{"case":"unipotent","epsilon":-1,"alpha":[3,1],"mu":[1,1]}"#,
        "--count",
        "2",
    ]);
    assert_eq!(code, 0);
    assert!(v["elements"]
        .as_array()
        .unwrap()
        .iter()
        .all(|e| e["certificate"]["verified"] == json!(true)));
    let spec = r#"{"case":"orth-generic","lambda":{"re":0,"im":1},"alpha":[2],"mu":[1]}"#;
    let (code, v, _) = run(&["sample", "--backend", "float", "--spec", spec, "--count", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["form"]["backend"], json!("float"));
    assert_eq!(v["elements"][1]["certificate"]["verified"], json!(true));
}

#[test]
fn solve_from_json_documents() {
    let spec = SegmentSpec::new(vec![3, 2], vec![2, 1]).unwrap();
    let (problem, free) = CongruenceProblem::<X>::random(&spec, Parity::Flipped, &mut random::rng(3)).unwrap();
    let p = scratch("problem.json");
    std::fs::write(&p, json::problem_to_json(&problem).to_string()).unwrap();
    let f = json::free_to_json(&free).to_string();
    let (code, v, _) = run(&["solve", "--problem", p.to_str().unwrap(), "--free", &f]);
    assert_eq!(code, 0);
    assert_eq!(v["residual"], json!("0"));
    let x: ToeplitzElement<X> = json::toeplitz_from_json(&v["solution"]).unwrap();
    assert_eq!(json::matrix_to_json(&x.assemble()), v["matrix"]);

    let mut bad = json::free_to_json(&free);
    bad["zees"][0][0] = json::matrix_to_json(&Matrix::<X>::from_ints(&[&[0, 1], &[2, 0]]));
    let (code, v, _) = run(&["solve", "--problem", p.to_str().unwrap(), "--free", &bad.to_string()]);
    assert_eq!(code, 2);
    assert!(v["error"]["kind"].is_string());
}

#[test]
fn reshuffle_round_trip() {
    let spec = SegmentSpec::new(vec![2, 1], vec![1, 2]).unwrap();
    let x = ToeplitzElement::<X>::random(&spec, &mut random::rng(5)).assemble();
    let s = json::segment_spec_to_json(&spec).to_string();
    let (code, v, _) = run(&[
        "reshuffle",
        "--inverse",
        "--spec",
        &s,
        "--matrix",
        &json::matrix_to_json(&x).to_string(),
    ]);
    assert_eq!(code, 0);
    let (code, w, _) = run(&["reshuffle", "--spec", &s, "--matrix", &v["matrix"].to_string()]);
    assert_eq!(code, 0);
    assert_eq!(json::matrix_from_json::<X>(&w["matrix"]).unwrap(), x);
    let (code, _, _) = run(&[
        "reshuffle",
        "--spec",
        &s,
        "--matrix",
        &json::matrix_to_json(&Matrix::<X>::identity(4)).to_string(),
    ]);
    assert_eq!(code, 0);
    let (code, v, _) = run(&[
        "reshuffle",
        "--inverse",
        "--spec",
        &s,
        "--matrix",
        "[[1,2,3,4],[5,6,7,8],[9,1,2,3],[4,5,6,7]]",
    ]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], json!("NotInGroup"));
}

#[test]
fn oracle_commands() {
    let (code, v, _) = run(&["oracle-dim", "--matrix", "[[0,0,0],[0,0,0],[0,0,0]]"]);
    assert_eq!((code, v), (0, json!({ "dim": 3 })));
    let report = scratch("sweep.json");
    let out = scratch("out.json");
    let (code, v, _) = run(&[
        "oracle-sweep",
        "--max-size",
        "5",
        "--report",
        report.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!((code, v), (0, Value::Null));
    let table: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(
        table,
        serde_json::from_str::<Value>(&std::fs::read_to_string(&out).unwrap()).unwrap()
    );
    assert_eq!(table["all_match"], json!(true));
    assert!(table["rows"]
        .as_array()
        .unwrap()
        .iter()
        .all(|r| r["formula"] == r["oracle"]));
}

#[test]
fn canonical_forms_in_both_backends() {
    let spec = r#"{"case":"nonzero","lambda":"1/2","alpha":[1],"mu":[1]}"#;
    let (code, v, _) = run(&["canonical", "--spec", spec]);
    assert_eq!(code, 0);
    assert_eq!(
        v["matrix"]["entries"][0][1],
        json!({ "a": "0", "b": "0", "c": "1/2", "d": "0" })
    );
    let (code, v, _) = run(&["canonical", "--backend", "float", "--spec", spec]);
    assert_eq!(code, 0);
    assert_eq!(v["matrix"]["entries"][0][1], json!({ "re": 0.0, "im": 0.5 }));
}
