mod support;

use std::fs;
use std::path::Path;

use serde_json::Value;
use support::{data_dir, lowform, GOLDENS};

fn read_json(path: &Path) -> Value {
    serde_json::from_slice(&fs::read(path).unwrap()).unwrap()
}

#[test]
fn golden_reports_are_bitwise_stable() {
    let tmp = tempfile::tempdir().unwrap();
    for golden in &GOLDENS {
        let out = tmp.path().join(golden.name);
        let run = golden.run(&out, Some(1));
        assert!(run.status.success(), "{}: {}", golden.name, String::from_utf8_lossy(&run.stderr));
        assert_eq!(fs::read(out.join("report.json")).unwrap(), golden.expected_report(), "{}", golden.name);
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let tmp = tempfile::tempdir().unwrap();
    let golden = &GOLDENS[1];
    let one = tmp.path().join("one");
    let four = tmp.path().join("four");
    assert!(golden.run(&one, Some(1)).status.success());
    assert!(golden.run(&four, Some(4)).status.success());
    assert_eq!(fs::read(one.join("report.json")).unwrap(), fs::read(four.join("report.json")).unwrap());
}

#[test]
fn manifest_records_inputs_and_settings() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    assert!(GOLDENS[0].run(&out, None).status.success());
    let manifest = read_json(&out.join("manifest.json"));
    assert_eq!(manifest["seed"], 3);
    assert_eq!(manifest["command"][0], "pipeline");
    assert_eq!(manifest["inputs"].as_array().unwrap().len(), 1);
    assert_eq!(manifest["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    assert_eq!(manifest["tolerances"]["rank_tol"], 1e-8);
    assert!(manifest["wall_time_seconds"].as_f64().unwrap() >= 0.0);
    assert!(manifest["version"].is_string());
}

#[test]
fn gen_is_deterministic_and_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let dirs: Vec<_> = ["a", "b"].iter().map(|d| tmp.path().join(d)).collect();
    for dir in &dirs {
        let run = lowform()
            .args(["gen", "--n", "5", "--m", "2", "--seed", "9", "--out"])
            .arg(dir)
            .output()
            .unwrap();
        assert!(run.status.success());
    }
    for file in ["h.json", "truth.json"] {
        assert_eq!(fs::read(dirs[0].join(file)).unwrap(), fs::read(dirs[1].join(file)).unwrap());
    }
    let out = tmp.path().join("detect");
    let run = lowform()
        .arg("detect")
        .arg("--input")
        .arg(dirs[0].join("h.json"))
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(run.status.success());
    assert_eq!(read_json(&out.join("report.json"))["m"], 2);
}

#[test]
fn malformed_input_exits_2_without_output() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.json");
    fs::write(&bad, "{\"num_vars\":").unwrap();
    let out = tmp.path().join("out");
    let run = lowform()
        .arg("detect")
        .arg("--input")
        .arg(&bad)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn empty_polytope_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = tmp.path().join(name);
        fs::write(&p, text).unwrap();
        p
    };
    let sparse = write(
        "sf.json",
        r#"{"f":{"num_vars":1,"terms":[{"exp":[2],"coef":1.0}]},"ell":[[1.0],[1.0]]}"#,
    );
    let a = write("A.json", "[[1, 1]]");
    let b = write("b.json", "[-1]");
    let run = lowform()
        .arg("reduce-polytope")
        .arg("--sparse")
        .arg(sparse)
        .arg("--A")
        .arg(a)
        .arg("--b")
        .arg(b)
        .arg("--out")
        .arg(tmp.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(3), "{}", String::from_utf8_lossy(&run.stderr));
}

#[test]
fn non_convergence_exits_4_with_partial_report() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let run = lowform()
        .arg("solve")
        .arg("--objective")
        .arg(data_dir().join("sphere_h.json"))
        .args(["--domain", "sphere", "--max-iter", "1", "--starts", "2", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(4));
    let report = read_json(&out.join("report.json"));
    assert_eq!(report["status"], "max_iter");
    assert!(out.join("manifest.json").exists());
}
