use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn pslrack(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pslrack"))
        .args(args)
        .env_remove("PSLRACK_MAX_Q")
        .env_remove("PSLRACK_LATTICE_BOUND")
        .env_remove("PSLRACK_COSET_LIMIT")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.push("--json");
    let o = pslrack(&a);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(&o)).unwrap()
}

fn schema(name: &str) -> Value {
    let path: PathBuf =
        [env!("CARGO_MANIFEST_DIR"), "..", "..", "schemas", &format!("{name}.v1.json")].iter().collect();
    serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

fn assert_valid(schema_name: &str, instance: &Value) {
    let v = jsonschema::validator_for(&schema(schema_name)).unwrap();
    let errors: Vec<String> = v.iter_errors(instance).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "{schema_name}: {errors:#?}");
}

/// Validates envelope and payload, returning the payload.
fn validated(args: &[&str]) -> Value {
    let env = json(args);
    assert_valid("envelope", &env);
    let command = env["command"].as_str().unwrap().to_string();
    assert_eq!(env["schema"], format!("pslrack/{command}/v1"));
    assert_valid(&command, &env["payload"]);
    env
}

fn class_sizes(env: &Value) -> Vec<u64> {
    let mut s: Vec<u64> =
        env["payload"]["classes"].as_array().unwrap().iter().map(|c| c["size"].as_u64().unwrap()).collect();
    s.sort_unstable();
    s
}

#[test]
fn classes_for_small_q() {
    let e = validated(&["classes", "2"]);
    assert_eq!(e["oracle_status"], "oracle-verified");
    assert_eq!(e["field"]["p"], 2);
    let rows: Vec<(String, u64, u64, bool)> = e["payload"]["classes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| {
            (
                c["label"].as_str().unwrap().to_string(),
                c["size"].as_u64().unwrap(),
                c["order"].as_u64().unwrap(),
                c["generates"].as_bool().unwrap(),
            )
        })
        .collect();
    assert_eq!(rows, vec![("1".into(), 1, 1, false), ("O_{1,1}".into(), 3, 2, true), ("O_{0,1}".into(), 2, 3, false)]);
    assert_eq!(class_sizes(&validated(&["classes", "5"])), vec![1, 12, 12, 15, 20]);
    // A5 again
    assert_eq!(class_sizes(&validated(&["classes", "4"])), vec![1, 12, 12, 15, 20]);
    let e9 = validated(&["classes", "9"]);
    assert_eq!(e9["field"]["modulus"], "x^2+1");
}

#[test]
fn csv_class_table() {
    let o = pslrack(&["classes", "3", "--csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "id,label,type,size,order,char poly,real,generates");
    assert_eq!(lines.len(), 5);
    assert!(lines[2].starts_with("unip:b=1,\"O_{1,1}\",unipotent,4,3,"));
    let o = pslrack(&["verify", "2", "--csv"]);
    assert!(!o.status.success());
}

#[test]
fn every_command_validates() {
    validated(&["subracks", "7", "nonsplit:t=0", "--verify"]);
    validated(&["subracks", "5", "split:a=4", "--verify", "--mode", "power-set"]);
    validated(&["subracks", "13", "unip:b=1"]);
    validated(&["minimal", "8"]);
    validated(&["minimal", "5", "unip:b=1"]);
    for q in ["4", "5", "8", "9"] {
        let classes = json(&["classes", q]);
        for c in classes["payload"]["classes"].as_array().unwrap().iter().skip(1) {
            let id = c["id"].as_str().unwrap();
            let a = validated(&["ass", q, id]);
            assert_eq!(a["oracle_status"], "oracle-verified", "ass {q} {id}");
            validated(&["h2", q, id]);
        }
    }
    validated(&["fpgroup", "@a5"]);
    validated(&["verify", "2-3"]);
}

#[test]
fn subracks_cross_check_passes() {
    let e = validated(&["subracks", "8", "nonsplit:t=1", "--verify"]);
    assert_eq!(e["oracle_status"], "oracle-verified");
    assert_eq!(e["payload"]["validation"]["mode"], "lattice");
    assert_eq!(e["payload"]["report"]["minimality"]["verdict"], "minimal_non_abelian");
    let plain = validated(&["subracks", "8", "nonsplit:t=1"]);
    assert_eq!(plain["oracle_status"], "symbolic-only");
    assert!(plain["payload"]["validation"].is_null());
}

#[test]
fn h2_examples() {
    let h = validated(&["h2", "5", "unip:b=1"]);
    assert_eq!(h["payload"]["h2"], "C10");
    let h = validated(&["h2", "5", "split:a=4"]);
    assert_eq!(h["payload"]["h2"], "C2 x C2");
    assert_eq!(h["oracle_status"], "oracle-verified");
    let h = validated(&["h2", "7", "nonsplit:t=0"]);
    assert_eq!(h["payload"]["h2_invariants"]["invariant_factors"], serde_json::json!([2, 2]));
    assert_eq!(h["payload"]["involution_centralizer"]["centralizer_order"], 8);
}

#[test]
fn a6_cover_from_file() {
    let path = format!("{}/../core/presentations/a6cover_robertson.txt", env!("CARGO_MANIFEST_DIR"));
    let e = validated(&["fpgroup", &path, "--cosets", "--classes", "--quotient", "6"]);
    let p = &e["payload"];
    assert_eq!(p["order"], 2160);
    assert_eq!(p["classes"]["count"], 31);
    assert_eq!(p["classes"]["centre_order"], 6);
    assert_eq!(p["quotient"]["class_sizes"], serde_json::json!([1, 40, 40, 45, 72, 72, 90]));
    assert_eq!(p["quotient"]["fibration"].as_array().unwrap().len(), 5);
    let o = pslrack(&["fpgroup", &path, "--quotient", "4"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_exit_codes() {
    let o = pslrack(&["verify", "2-5"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("all checks passed"));
    let o = pslrack(&["verify", "6"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not a prime power"));
    let e = validated(&["verify", "7,8,9"]);
    assert_eq!(e["payload"]["passed"], true);
    assert_eq!(e["oracle_status"], "oracle-verified");
}

#[test]
fn bad_inputs() {
    assert_eq!(pslrack(&["classes", "6"]).status.code(), Some(2));
    assert_eq!(pslrack(&["subracks", "5", "identity"]).status.code(), Some(2));
    assert_eq!(pslrack(&["subracks", "5", "unip:b=9"]).status.code(), Some(2));
    assert_eq!(pslrack(&["fpgroup", "/nonexistent/file"]).status.code(), Some(2));
}

#[test]
fn environment_overrides() {
    let run = |var: &str, val: &str, args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_pslrack")).args(args).env(var, val).output().unwrap()
    };
    let o = run("PSLRACK_MAX_Q", "7", &["classes", "8"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("exceeds"));
    let o = run("PSLRACK_COSET_LIMIT", "100", &["fpgroup", "@a6cover"]);
    assert_eq!(o.status.code(), Some(2));
    // with the lattice bound lowered the q=7 lattice check is skipped
    let o = run("PSLRACK_LATTICE_BOUND", "100", &["verify", "7", "--json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let checks = v["payload"]["reports"][0]["checks"].as_array().unwrap();
    let dickson = checks.iter().find(|c| c["name"] == "dickson_labels").unwrap();
    assert_eq!(dickson["status"], "skipped");
    // the flag beats the environment
    let o = run("PSLRACK_MAX_Q", "7", &["classes", "8", "--max-q", "8"]);
    assert!(o.status.success());
}

#[test]
fn output_is_reproducible() {
    for args in [
        vec!["classes", "9", "--json"],
        vec!["subracks", "7", "nonsplit:t=0", "--verify", "--json"],
        vec!["ass", "9", "unip:b=1", "--json"],
        vec!["verify", "2-4", "--json"],
        vec!["fpgroup", "@a6cover-schur", "--classes", "--json"],
        vec!["classes", "8"],
    ] {
        let a = pslrack(&args);
        let b = pslrack(&args);
        assert!(a.status.success(), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn json_keys_are_sorted() {
    let text = stdout(&pslrack(&["ass", "7", "unip:b=1", "--json"]));
    let top: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("  \"") && !l.starts_with("   "))
        .map(|l| l.trim().split('"').nth(1).unwrap())
        .collect();
    let mut sorted = top.clone();
    sorted.sort_unstable();
    assert_eq!(top, sorted);
    assert_eq!(top, ["command", "field", "oracle_status", "payload", "schema", "tool"]);
}

#[test]
fn schemas_reject_malformed_reports() {
    let mut e = json(&["minimal", "5"]);
    e["oracle_status"] = "verified".into();
    assert!(!jsonschema::validator_for(&schema("envelope")).unwrap().is_valid(&e));
    let mut p = json(&["minimal", "5"])["payload"].clone();
    p["classes"][0]["verdict"] = "minimal".into();
    assert!(!jsonschema::validator_for(&schema("minimal")).unwrap().is_valid(&p));
    let mut c = json(&["classes", "5"])["payload"].clone();
    c["classes"][0]["extra"] = 1.into();
    assert!(!jsonschema::validator_for(&schema("classes")).unwrap().is_valid(&c));
}
