use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn minsos(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_minsos")).args(args).output().expect("binary runs")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn gram_space_of_the_genus_one_form() {
    let out = minsos(&["gram-space", data("genus_one.json").to_str().unwrap(), "--surface", "scroll(1,1)"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["dim"], 1);
    assert_eq!(v["kernel"].as_array().unwrap().len(), 1);

    let out = minsos(&["gram-space", data("genus_two.json").to_str().unwrap(), "--surface", "scroll(2,1)"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["dim"], 3);
}

#[test]
fn enumerate_writes_certificates_that_verify() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("g1.json");
    let csv = dir.path().join("curve.csv");
    let out = minsos(&[
        "enumerate",
        data("genus_one.json").to_str().unwrap(),
        "--surface",
        "scroll(1,1)",
        "--exact",
        "--json-out",
        out_path.to_str().unwrap(),
        "--dump-curve-samples",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out_path);
    assert_eq!(v["report"]["counts"]["complex"], 4);
    assert_eq!(v["report"]["counts"]["psd"], 2);
    assert_eq!(v["certificates"].as_array().unwrap().len(), 4);
    assert_eq!(v["exact_certificates"].as_array().unwrap().len(), 2);
    assert!(std::fs::read_to_string(&csv).unwrap().starts_with("curve,s,x\n"));

    let out = minsos(&["verify", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));

    // a tampered certificate fails verification with exit code 4
    let mut v = v;
    v["certificates"][0]["signs"][0] = serde_json::json!(-1);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, v.to_string()).unwrap();
    assert_eq!(minsos(&["verify", bad.to_str().unwrap()]).status.code(), Some(4));
}

#[test]
fn identical_seeds_give_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let p = dir.path().join(name);
        let out = minsos(&[
            "enumerate",
            data("genus_two.json").to_str().unwrap(),
            "--surface",
            "scroll(2,1)",
            "--seed",
            "11",
            "--json-out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        std::fs::read(p).unwrap()
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn factor_and_two_squares_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.json");
    let out = minsos(&["factor", data("genus_one_matrix.json").to_str().unwrap(), "--json-out", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&f)["b"][0].as_array().unwrap().len(), 3);
    assert_eq!(minsos(&["verify", f.to_str().unwrap()]).status.code(), Some(0));

    let t = dir.path().join("t.json");
    let out = minsos(&["two-squares", data("binary_quartic.json").to_str().unwrap(), "--json-out", t.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&t)["count"], 2);
    assert_eq!(minsos(&["verify", t.to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{not json").unwrap();
    let out = minsos(&["enumerate", bad.to_str().unwrap(), "--surface", "scroll(1,1)"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());

    let g1 = data("genus_one.json");
    assert_eq!(minsos(&["enumerate", g1.to_str().unwrap(), "--surface", "scroll(0,1)"]).status.code(), Some(2));
    // wrong surface for the form
    assert_eq!(minsos(&["gram-space", g1.to_str().unwrap(), "--surface", "scroll(2,1)"]).status.code(), Some(2));
    // not psd
    let m = dir.path().join("m.json");
    std::fs::write(
        &m,
        r#"{"n":2,"entries":{"0,0":{"deg":2,"coeffs":[{"num":1,"den":1},{"num":0,"den":1},{"num":1,"den":1}]},
            "0,1":{"deg":2,"coeffs":[{"num":0,"den":1},{"num":3,"den":1},{"num":0,"den":1}]},
            "1,1":{"deg":2,"coeffs":[{"num":1,"den":1},{"num":0,"den":1},{"num":1,"den":1}]}}}"#,
    )
    .unwrap();
    assert_eq!(minsos(&["factor", m.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn cone_table_row() {
    let out = minsos(&["table", "--surfaces", "cone_rnc(4)"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rows: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rows[0]["counts"]["psd"], 8);
    assert_eq!(rows[0]["counts"]["real"], 11);
    assert_eq!(rows[0]["counts"]["complex"], 35);
    assert_eq!(rows[0]["matches"], true);
}
