use std::process::{Command, Output};

fn k3fib(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_k3fib")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_lattices_passes() {
    let o = k3fib(&["verify", "--suite", "lattices", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let checks = v[0]["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["status"] == "pass"));
}

// The printed statements that fail keep the full run from passing.
#[test]
fn verify_all_reports_every_suite_in_order() {
    let o = k3fib(&["verify", "--suite", "all", "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|s| s["suite"].as_str().unwrap()).collect();
    assert_eq!(names, ["lattices", "divisors", "quartic", "fibrations", "duality"]);
}

#[test]
fn alt_table_markdown() {
    let o = k3fib(&["tables", "--fibration", "alt", "--format", "markdown"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("| generic | 16 | I8* + 2I2 + 6I1 | Z/2Z | H+E7+E7 | Z2^2 | pass |"), "{s}");
    assert_eq!(s.matches("| pass |").count(), 6);
}

#[test]
fn tables_json_is_byte_identical_and_written_to_file() {
    let dir = std::env::temp_dir().join(format!("k3fib-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("tables.json");
    let o = k3fib(&["tables", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let a = std::fs::read_to_string(&path).unwrap();
    let b = stdout(&k3fib(&["tables", "--format", "json"]));
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 4);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn classify_bfd_on_j4_zero() {
    let o = k3fib(&["classify", "--fibration", "bfd", "--set", "J4=0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("bfd: II* + III* + 5I1"));
}

#[test]
fn classify_json_schema() {
    let o = k3fib(&[
        "classify", "--fibration", "alt", "--set", "J4=s^2", "--set", "J5=2*s*u", "--set", "J6=u^2", "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    for key in ["fibration", "assignments", "fibers", "mw_torsion", "mw_rank", "euler"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["euler"], 24);
    assert_eq!(v["mw_torsion"], "Z/2Z");
    let kinds: Vec<&str> = v["fibers"].as_array().unwrap().iter().map(|f| f["kodaira"].as_str().unwrap()).collect();
    assert_eq!(kinds, ["I4", "I1", "I8*"]);
    for f in v["fibers"].as_array().unwrap() {
        assert!(f.get("place").is_some() && f.get("ade").is_some());
    }
}

#[test]
fn witness_and_lattice() {
    let o = k3fib(&["witness", "--locus", "j30"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("on locus: true"));
    let o = k3fib(&["witness", "--locus", "resDE", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["on_locus"], true);
    let o = k3fib(&["lattice", "disc", "--spec", "D12+A1+A1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["group"], "Z2^4");
    assert_eq!(v["det"], "16");
    assert_eq!(v["isomorphic_to_target"], false);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["bogus"],
        vec!["classify", "--fibration", "nope"],
        vec!["classify", "--fibration", "std", "--set", "X=1"],
        vec!["classify", "--fibration", "std", "--set", "J4"],
        vec!["verify", "--suite", "nope"],
        vec!["witness", "--locus", "nope"],
        vec!["lattice", "disc", "--spec", "F4"],
    ] {
        let o = k3fib(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn irrational_aa_exits_1() {
    let o = k3fib(&["classify", "--fibration", "std", "--set", "J2=1", "--set", "J3=1", "--set", "J4=1", "--set", "J5=3", "--set", "J6=1"]);
    assert_eq!(o.status.code(), Some(1));
}
