use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use jsonschema::{Resource, Validator};
use serde_json::Value;

fn anosurf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anosurf"))
        .args(args)
        .env_remove("ANOSURF_CATALOG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.extend(["--format", "json"]);
    let o = anosurf(&a);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/schemas")
}

fn validator(name: &str) -> Validator {
    let read =
        |f: &str| -> Value { serde_json::from_str(&std::fs::read_to_string(schema_dir().join(f)).unwrap()).unwrap() };
    let common = read("common.v1.json");
    let id = common["$id"].as_str().unwrap().to_string();
    jsonschema::options()
        .with_resource(id, Resource::from_contents(common).unwrap())
        .build(&read(name))
        .unwrap()
}

fn assert_valid(name: &str, v: &Value) {
    let val = validator(name);
    let errors: Vec<String> = val
        .iter_errors(v)
        .map(|e| format!("{} at {}", e, e.instance_path))
        .collect();
    assert!(errors.is_empty(), "{name}: {errors:#?}");
}

fn catalog_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/catalog")
}

#[test]
fn classify_integer_slope() {
    let o = anosurf(&["classify", "5"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("UniqueAnosov"), "{out}");
    assert!(out.contains("5-Dehn-Fried-Goodman surgery"));
    let v = json(&["classify", "5", "--traces", "full"]);
    assert_valid("classify.v1.json", &v);
    assert_eq!(v["verdict"], "UniqueAnosov");
    assert_eq!(v["hyperbolic"], true);
}

#[test]
fn classify_fraction_lists_traces() {
    let v = json(&["classify", "9/2", "--traces", "digest"]);
    assert_valid("classify.v1.json", &v);
    assert_eq!(v["verdict"], "NoAnosov");
    let n = v["candidates"].as_array().unwrap().len();
    assert!(n > 0);
    assert_eq!(v["traces"].as_array().unwrap().len(), n);
    let full = json(&["classify", "9/2", "--traces", "full"]);
    assert_valid("classify.v1.json", &full);
    let none = json(&["classify", "9/2"]);
    assert!(none.get("traces").is_none());
    let text = stdout(&anosurf(&["classify", "9/2", "--traces", "full"]));
    assert!(text.contains("none of them carries any Anosov lamination"));
}

#[test]
fn exit_codes() {
    assert_eq!(anosurf(&["classify", "0/0"]).status.code(), Some(2));
    assert_eq!(anosurf(&["classify", "x"]).status.code(), Some(2));
    let inf = anosurf(&["classify", "inf"]);
    assert_eq!(inf.status.code(), Some(3));
    assert!(inf.stdout.is_empty());
    assert!(!inf.stderr.is_empty());
    assert_eq!(anosurf(&["catalog", "show", "NOPE"]).status.code(), Some(2));
    assert_eq!(anosurf(&["track", "Q99"]).status.code(), Some(2));
    assert_eq!(anosurf(&["sweep", "0"]).status.code(), Some(2));
    assert_eq!(anosurf(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn sweep_rows() {
    let v = json(&["sweep", "1"]);
    assert_valid("sweep.v1.json", &v);
    let slopes: Vec<&str> = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["slope"].as_str().unwrap())
        .collect();
    assert_eq!(slopes, ["-1", "0", "1"]);
    let v = json(&["sweep", "2"]);
    let half = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["slope"] == "1/2")
        .unwrap();
    assert_eq!(half["verdict"], "NoAnosov");
}

#[test]
fn sweep_row_count_and_order() {
    let h = 7i64;
    let mut want = Vec::new();
    for p in 1..=h {
        for q in -h..=h {
            let (mut a, mut b) = (p, q.abs());
            while b != 0 {
                (a, b) = (b, a % b);
            }
            if a == 1 {
                want.push(if p == 1 { q.to_string() } else { format!("{q}/{p}") });
            }
        }
    }
    let v = json(&["sweep", &h.to_string()]);
    let rows = v["rows"].as_array().unwrap();
    let got: Vec<&str> = rows.iter().map(|r| r["slope"].as_str().unwrap()).collect();
    assert_eq!(got, want);
    let table = stdout(&anosurf(&["sweep", &h.to_string()]));
    let lines: Vec<&str> = table.lines().skip(1).collect();
    assert_eq!(lines.len(), rows.len());
    for (line, row) in lines.iter().zip(rows) {
        let cols: Vec<&str> = line.split_whitespace().collect();
        assert_eq!(cols[0], row["slope"].as_str().unwrap());
        assert_eq!(cols[1], row["verdict"].as_str().unwrap());
        assert_eq!(cols[2], row["hyperbolic"].to_string());
    }
}

#[test]
fn track_reports() {
    let five = json(&["track", "Q5", "--bound", "10"]);
    assert_valid("track.v1.json", &five);
    let slopes: Vec<&str> = five["slopes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["slope"].as_str().unwrap())
        .collect();
    assert_eq!(slopes, ["4"]);
    let six = json(&["track", "Q6", "--bound", "10"]);
    assert_eq!(six["slopes"][0]["slope"], "inf");
    assert_eq!(six["slopes"].as_array().unwrap().len(), 1);
    let b3 = json(&["track", "B3", "--bound", "6"]);
    assert_eq!(b3["slopes"][0]["slope"], "4");
}

#[test]
fn track_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("loop.json");
    std::fs::write(
        &path,
        r#"{"branches": [{"name": "a", "label": [1, 0]}], "switches": []}"#,
    )
    .unwrap();
    let v = json(&["track", path.to_str().unwrap(), "--bound", "3"]);
    assert_valid("track.v1.json", &v);
    assert_eq!(v["slopes"].as_array().unwrap().len(), 1);
    assert_eq!(v["slopes"][0]["slope"], "0");
    std::fs::write(&path, "not json").unwrap();
    assert_eq!(anosurf(&["track", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn catalog_commands() {
    let list = json(&["catalog", "list"]);
    assert_valid("catalog-list.v1.json", &list);
    assert_eq!(list["count"], 38);
    let b3 = json(&["catalog", "show", "B3"]);
    assert_valid("catalog-show.v1.json", &b3);
    assert_eq!(b3["entry"]["orientable"], false);
    let text = stdout(&anosurf(&["catalog", "show", "B3"]));
    assert!(text.contains("Klein bottle"), "{text}");
    let o = anosurf(&["catalog", "check", "--bound", "8"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("39"));
    let check = json(&["catalog", "check", "--bound", "8"]);
    assert_valid("catalog-check.v1.json", &check);
    assert_eq!(check["passed"], true);
    assert_eq!(check["warnings"].as_array().unwrap().len(), 1);
}

#[test]
fn pinned_catalog_directory() {
    let dir = catalog_dir();
    let v = json(&["catalog", "list", "--catalog", dir.to_str().unwrap()]);
    assert_eq!(v["count"], 38);
    let o = Command::new(env!("CARGO_BIN_EXE_anosurf"))
        .args(["catalog", "list", "--format", "json"])
        .env("ANOSURF_CATALOG", "/nonexistent/catalog")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn corrupted_catalog_exits_5() {
    let tmp = tempfile::tempdir().unwrap();
    for f in std::fs::read_dir(catalog_dir()).unwrap() {
        let f = f.unwrap().path();
        std::fs::copy(&f, tmp.path().join(f.file_name().unwrap())).unwrap();
    }
    let b1 = tmp.path().join("B1.json");
    let text = std::fs::read_to_string(&b1).unwrap();
    std::fs::write(&b1, text.replacen("\"B1\"", "\"B1x\"", 1)).unwrap();
    let o = anosurf(&["classify", "1/2", "--catalog", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(5));
    assert!(String::from_utf8_lossy(&o.stderr).contains("checksum"));
    assert!(o.stdout.is_empty());
}

#[test]
fn table_and_json_agree_on_verdicts() {
    for r in ["0", "3", "-7", "5/2", "-11/3"] {
        let v = json(&["classify", r]);
        let text = stdout(&anosurf(&["classify", r]));
        let line = text.lines().find(|l| l.starts_with("verdict")).unwrap();
        assert_eq!(
            line.split_whitespace().nth(1).unwrap(),
            v["verdict"].as_str().unwrap(),
            "{r}"
        );
    }
}
