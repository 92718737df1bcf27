use std::path::{Path, PathBuf};
use std::process::Command;

use admgraph::{parse_graph_document, run_command, DocumentError};
use serde_json::Value;
use tempfile::TempDir;

const SG: &str = r#"{
  "vertices": [
    {
      "id": "P"
    },
    {
      "id": "Q"
    }
  ],
  "edges": [
    {
      "id": "e1",
      "ends": [
        "P",
        "Q"
      ],
      "length": "1"
    },
    {
      "id": "e2",
      "ends": [
        "P",
        "Q"
      ],
      "length": "1"
    }
  ],
  "involution": {
    "vertices": {},
    "edges": {
      "e1": "e2"
    }
  },
  "divisor": {
    "P": "1",
    "Q": "1"
  }
}
"#;

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> (u8, Value) {
    let mut argv = vec!["admgraph"];
    argv.extend_from_slice(args);
    let out = run_command(argv);
    let v = serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", out.stdout));
    (out.code, v)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn error_code(v: &Value) -> &str {
    v["error"]["code"].as_str().unwrap()
}

/// Every number in an output is an integer count; rationals are strings.
fn no_floats(v: &Value) -> bool {
    match v {
        Value::Number(n) => n.is_u64() || n.is_i64(),
        Value::Array(a) => a.iter().all(no_floats),
        Value::Object(o) => o.values().all(no_floats),
        _ => true,
    }
}

#[test]
fn binary_prints_exact_epsilon() {
    let dir = TempDir::new().unwrap();
    let sg = write(&dir, "sg.json", SG);
    let out = Command::new(env!("CARGO_BIN_EXE_admgraph"))
        .arg("epsilon")
        .arg(&sg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "{\"epsilon\":\"7/12\",\"c\":\"5/32\"}\n"
    );
}

#[test]
fn bound_from_counts() {
    let (code, v) = run(&["bound", "--genus", "3", "--xi0", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v.to_string(), r#"{"r0":"1/63"}"#);
    let (code, v) = run(&["bound", "--genus", "5", "--xi", "1=1"]);
    assert_eq!((code, v["r0"].as_str().unwrap()), (0, "64/165"));
    let (code, v) = run(&[
        "bound", "--genus", "5", "--xi0", "2", "--delta", "1=1", "--delta", "2=3", "--report",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["counts"]["delta"], serde_json::json!([1, 3]));
    assert!(no_floats(&v));
    let (code, v) = run(&["bound", "--genus", "2", "--xi0", "1"]);
    assert_eq!((code, error_code(&v)), (1, "genus-below-three"));
    let (code, v) = run(&["bound", "--genus", "3", "--xi", "7=1"]);
    assert_eq!((code, error_code(&v)), (1, "index-out-of-range"));
    let (code, v) = run(&["bound", "--xi0", "1"]);
    assert_eq!((code, error_code(&v)), (2, "usage"));
}

#[test]
fn missing_file_is_a_usage_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_admgraph"))
        .args(["epsilon", "missing.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(error_code(&v), "file-not-found");
}

#[test]
fn schema_errors_are_reported_with_paths() {
    let dir = TempDir::new().unwrap();
    let dangling = SG.replacen("\"Q\"\n      ],", "\"R\"\n      ],", 1);
    let p = write(&dir, "d.json", &dangling);
    let (code, v) = run(&["validate", s(&p)]);
    assert_eq!((code, error_code(&v)), (2, "schema"));
    assert_eq!(v["error"]["issues"][0]["path"], "edges[0].ends");
    assert_eq!(v["error"]["issues"][0]["kind"], "dangling-id");

    let bad = SG.replacen("\"length\": \"1\"", "\"length\": \"3/0\"", 1);
    let p = write(&dir, "b.json", &bad);
    let (code, v) = run(&["epsilon", s(&p)]);
    assert_eq!((code, error_code(&v)), (2, "schema"));
    assert_eq!(v["error"]["issues"][0]["kind"], "bad-rational");
    assert!(matches!(
        parse_graph_document(bad.as_bytes()),
        Err(DocumentError::Schema(_))
    ));

    let p = write(&dir, "m.json", "{\"vertices\": [");
    let (code, v) = run(&["epsilon", s(&p)]);
    assert_eq!((code, error_code(&v)), (2, "malformed-json"));
}

#[test]
fn domain_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    let sg = write(&dir, "sg.json", SG);
    let (code, v) = run(&["epsilon", s(&sg), "--divisor", r#"{"P":"-1","Q":"-1"}"#]);
    assert_eq!((code, error_code(&v)), (1, "degree-minus-two"));
    let (code, v) = run(&["epsilon-closed", s(&sg), "--divisor", r#"{"Z":"1"}"#]);
    assert_eq!((code, error_code(&v)), (1, "unknown-vertex"));
    let (code, v) = run(&["epsilon", s(&sg), "--divisor", r#"{"P":"x"}"#]);
    assert_eq!((code, error_code(&v)), (2, "bad-divisor"));

    let split = SG.replacen("\"P\",\n        \"Q\"", "\"P\",\n        \"P\"", 2);
    let p = write(&dir, "loops.json", &split);
    let (code, v) = run(&["validate", s(&p)]);
    assert_eq!(code, 1);
    assert_eq!(v["valid"], false);
    assert_eq!(v["connected"], false);

    let broken = SG.replacen("\"e1\": \"e2\"", "\"e1\": \"e1\"", 1);
    let p = write(&dir, "fixed.json", &broken);
    let (code, v) = run(&["validate", s(&p)]);
    assert_eq!(code, 1);
    assert_eq!(v["hyperelliptic"]["valid"], false);
}

#[test]
fn commands_on_the_simple_graph() {
    let dir = TempDir::new().unwrap();
    let sg = write(&dir, "sg.json", SG);
    let (code, v) = run(&["validate", "--graph", s(&sg)]);
    assert_eq!(code, 0);
    assert_eq!(v["hyperelliptic"]["size"], 1);
    let (_, v) = run(&["resistance", s(&sg), "--source", "P"]);
    assert_eq!(v["resistance"]["Q"], "1/2");
    let (_, v) = run(&["resistance", s(&sg)]);
    assert_eq!(v["resistance"][0][1], "1/2");
    let (_, v) = run(&["measure", s(&sg)]);
    assert_eq!(v["canonical"]["edges"]["e1"], "1/2");
    assert_eq!(v["admissible"]["vertices"]["P"], "1/4");
    assert_eq!(v["admissible"]["total"], "1");
    let (_, v) = run(&["green", s(&sg)]);
    assert_eq!(v["green"][0], serde_json::json!(["13/96", "-11/96"]));
    let (_, v) = run(&["green", s(&sg), "--source", "P"]);
    assert_eq!(v["vertices"]["Q"], "-11/96");
    let (_, v) = run(&["epsilon-closed", s(&sg), "--strategy", "definition"]);
    assert_eq!(v["epsilon"], "7/12");
    let (_, v) = run(&["lpoly", s(&sg)]);
    assert_eq!(v["text"], "e1");
    let (_, v) = run(&["mpoly", s(&sg)]);
    assert_eq!(v["terms"], serde_json::json!([]));
    let (_, v) = run(&["classify-edges", s(&sg)]);
    assert_eq!(v["edges"]["e2"], "two-jointed");
    let (code, v) = run(&["compare", s(&sg)]);
    assert_eq!((code, &v["agree"]), (0, &Value::Bool(true)));
}

#[test]
fn generated_documents_round_trip_and_agree() {
    let dir = TempDir::new().unwrap();
    for seed in 0..25u64 {
        let seed_text = seed.to_string();
        for fiber in [false, true] {
            let mut args = vec!["admgraph", "gen", "--seed", &seed_text, "--max-size", "4"];
            if fiber {
                args.push("--fiber");
            }
            let out = run_command(args);
            assert_eq!(out.code, 0);
            let doc = parse_graph_document(out.stdout.as_bytes()).unwrap();
            assert_eq!(doc.to_canonical_string(), out.stdout);
            let p = write(&dir, &format!("g{seed}-{fiber}.json"), &out.stdout);
            if fiber {
                let (code, v) = run(&["classify-nodes", s(&p)]);
                assert_eq!(code, 0, "{v}");
                let (code, v) = run(&["bound", s(&p), "--report"]);
                assert_eq!(code, 0, "{v}");
                assert!(no_floats(&v));
            } else {
                let (code, v) = run(&["compare", s(&p), "--strategy", "definition"]);
                assert_eq!(code, 0, "{v}");
                let (_, sym) = run(&["lpoly", s(&p)]);
                let (_, def) = run(&["lpoly", s(&p), "--strategy", "definition"]);
                assert_eq!(sym["terms"], def["terms"]);
                let (_, eps) = run(&["epsilon", s(&p)]);
                assert_eq!(eps["epsilon"], v["numeric"]);
                assert!(no_floats(&v) && no_floats(&sym));
            }
        }
    }
}

#[test]
fn generation_is_deterministic() {
    let a = run_command(["admgraph", "gen", "--seed", "42"]).stdout;
    let b = run_command(["admgraph", "gen", "--seed", "42"]).stdout;
    assert_eq!(a, b);
    let (code, v) = run(&["gen", "--min-size", "3", "--max-size", "2"]);
    assert_eq!((code, error_code(&v)), (2, "usage"));
}

#[test]
fn enumeration_cap() {
    let dir = TempDir::new().unwrap();
    let sg = write(&dir, "sg.json", SG);
    let (code, v) = run(&["lpoly", s(&sg), "--max-classes", "0"]);
    assert_eq!((code, error_code(&v)), (1, "too-many-classes"));
    let bin = env!("CARGO_BIN_EXE_admgraph");
    let out = Command::new(bin)
        .args(["lpoly", s(&sg)])
        .env("ADMGRAPH_MAX_CLASSES", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = Command::new(bin)
        .args(["lpoly", s(&sg), "--max-classes", "1"])
        .env("ADMGRAPH_MAX_CLASSES", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let out = Command::new(bin)
        .args(["lpoly", s(&sg)])
        .env("ADMGRAPH_MAX_CLASSES", "lots")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
