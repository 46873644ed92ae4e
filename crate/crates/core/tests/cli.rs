mod common;

use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn grp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grp")).args(args).env_remove("GRP_MAX_COSETS").output().expect("binary runs")
}

fn grp_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_grp"))
        .args(args)
        .env_remove("GRP_MAX_COSETS")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

fn json_ok(args: &[&str], schema: &str) -> Value {
    let o = grp(args);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).expect("valid JSON");
    let errors = common::schema_errors(schema, &v);
    assert!(errors.is_empty(), "{args:?} violates {schema}: {errors:?}");
    v
}

#[test]
fn outputs_match_schemas() {
    let z2 = "<x,y|[x,y]>";
    let v = json_ok(&["--format", "json", "parse", z2], "presentation");
    assert_eq!(v["def_lower_bound"], 1);
    let v = json_ok(&["--format", "json", "tc", "<a,b|a^3,b^2,(a b)^2>"], "coset_table");
    assert_eq!(v["index"], 6);
    let v = json_ok(&["--format", "json", "rs", z2, "-H", "x^2;y"], "subgroup");
    assert_eq!(v["ledger"]["schreier_gen_count"], 3);
    json_ok(&["--format", "json", "rs", "<x,y|>", "-H", "x^2;y", "--normal", "--simplify"], "subgroup");
    let v = json_ok(&["--format", "json", "b1", "<a,b|a^2 b^-3, a b a^-1 b^-1>", "--p", "2,3"], "homology");
    assert_eq!(v["rank"], 1);
    let v = json_ok(&["--format", "json", "chain", "<x,y|>"], "chain");
    assert_eq!(v["stages"].as_array().unwrap().len(), 3);
    json_ok(&["approx", z2, "--p", "3"], "approx");
    let v = json_ok(&["vd", "<x,y|>", "--depth", "1"], "vd");
    assert_eq!(v["certificate"]["value"], "1");
    let v = json_ok(&["cert", "<a1,b1,a2,b2|[a1,b1][a2,b2]>", "--depth", "1"], "cert");
    assert!(v["certificates"].as_array().unwrap().iter().any(|c| c["value"] == "33"));
}

#[test]
fn tower_lines_match_schemas() {
    let o = grp(&["tower"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let (summary, steps) = lines.split_last().unwrap();
    for s in steps {
        let errors = common::schema_errors("tower_step", s);
        assert!(errors.is_empty(), "{errors:?}");
    }
    assert!(common::schema_errors("tower_summary", summary).is_empty());
}

#[test]
fn chain_csv_is_exact() {
    let o = grp(&["chain", "<x,y|>"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# grp "));
    assert_eq!(lines.next(), Some("depth,index,b1,ratio,ratio_exact"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows, ["0,1,2,2.0,2", "1,4,5,1.25,5/4", "2,128,129,1.0078125,129/128"]);
}

#[test]
fn domain_errors_exit_1() {
    for args in [
        &["parse", "<x,y|"][..],
        &["tc", "<x|x^2>", "-H", "z"],
        &["chain", "<x|>", "--p", "4"],
        &["approx", "<x|>", "--eps", "abc"],
        &["tower", "--gens", "1"],
        &["parse", "/no/such/file"],
    ] {
        let o = grp(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn limit_exits_2() {
    let o = grp(&["tc", "<x,y|[x,y]>"]);
    assert_eq!(o.status.code(), Some(2));
    let o = grp(&["--max-cosets", "50", "tc", "<x,y|>", "-H", "x^2;y^2;x y x y"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn env_limit_override() {
    let args = ["chain", "<x,y|>", "--depth", "2"];
    let o = Command::new(env!("CARGO_BIN_EXE_grp")).args(args).env("GRP_MAX_COSETS", "100").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let text = stdout(&o);
    assert!(text.contains("1,4,5"), "stages before the cut are still written");
    assert!(!text.contains("128"));
    let o = Command::new(env!("CARGO_BIN_EXE_grp")).args(args).env("GRP_MAX_COSETS", "1000").output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let o = Command::new(env!("CARGO_BIN_EXE_grp"))
        .args(["--max-cosets", "1000"].iter().chain(&args))
        .env("GRP_MAX_COSETS", "100")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "the flag wins over the variable");
}

#[test]
fn truncated_chain_json_is_valid() {
    let o = grp(&["--format", "json", "--max-cosets", "100", "chain", "<x,y|>"]);
    assert_eq!(o.status.code(), Some(2));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(common::schema_errors("chain", &v).is_empty());
    assert_eq!(v["truncated"]["reason"], "predicted_index");
}

#[test]
fn output_file_and_from_chain() {
    let dir = std::env::temp_dir().join(format!("grp-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("chain.json");
    let path_s = path.to_str().unwrap();
    let o = grp(&["--format", "json", "-o", path_s, "chain", "<x,y|[x,y]>", "--p", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let direct = json_ok(&["approx", "<x,y|[x,y]>", "--p", "3"], "approx");
    let o = grp(&["approx", "--from-chain", path_s]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let from_file: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(common::schema_errors("approx", &from_file).is_empty());
    assert_eq!(direct["report"], from_file["report"]);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn reads_stdin_and_files() {
    let o = grp_stdin(&["parse", "-"], "<x, y | x^2, y^3>\n");
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("x^2"));
    let path = std::env::temp_dir().join(format!("grp-pres-{}.txt", std::process::id()));
    std::fs::write(&path, "<a,b|[a,b]>").unwrap();
    let o = grp(&["b1", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn deterministic_output() {
    for args in [&["--format", "json", "chain", "<x,y|x^2 y^2>"][..], &["cert", "<x,y|>"], &["tower", "--steps", "2"]] {
        assert_eq!(grp(args).stdout, grp(args).stdout, "{args:?}");
    }
}
