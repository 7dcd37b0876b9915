use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rootshell")).args(args).env_remove("ROOTSHELL_THREADS").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(args: &[&str]) -> (serde_json::Value, i32) {
    let mut a = args.to_vec();
    a.push("--json");
    let o = run(&a);
    (serde_json::from_slice(&o.stdout).expect("valid json"), o.status.code().unwrap_or(-1))
}

#[test]
fn weyl_table_has_e7_row() {
    let o = run(&["tables", "weyl"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let e7 = out.lines().find(|l| l.starts_with("E7")).expect("E7 row");
    for v in ["2903040", "51840", "56"] {
        assert!(e7.contains(v), "{e7}");
    }
}

#[test]
fn weyl_table_csv_has_nine_rows() {
    let dir = std::env::temp_dir().join(format!("rootshell-weyl-{}.csv", std::process::id()));
    let o = run(&["tables", "weyl", "--csv", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&dir).unwrap();
    let _ = std::fs::remove_file(&dir);
    assert_eq!(text.lines().count(), 10);
    assert!(text.lines().any(|l| l.starts_with("E8,8,696729600,2903040,240,")));
}

#[test]
fn b3_short_pair_is_not_semidense() {
    let (v, code) = json(&["semidense", "check", "--type", "B", "--rank", "3", "--nodes", "1,3", "--expect", "fails"]);
    assert_eq!(code, 0);
    let verdict = &v["results"]["verdict"];
    assert_eq!(verdict["holds"], false);
    let w = &verdict["witness"];
    assert_eq!(w["psi_size"], 18);
    assert_eq!(w["psi_rank"], 3);
    assert_eq!(w["intersection"], 4);
}

#[test]
fn wrong_expectation_exits_one() {
    let o = run(&["semidense", "check", "--type", "B", "--rank", "3", "--nodes", "1,3", "--expect", "holds"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn g2_counts() {
    let (v, code) = json(&["rootsys", "--type", "G", "--rank", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["roots"], 12);
    assert_eq!(v["results"]["positive_roots"], 6);
    assert_eq!(v["results"]["weyl_order"], "12");
}

#[test]
fn invalid_input_exits_two() {
    assert_eq!(run(&["rootsys", "--type", "E", "--rank", "5"]).status.code(), Some(2));
    assert_eq!(run(&["rootsys", "--type", "X", "--rank", "2"]).status.code(), Some(2));
    assert_eq!(run(&["semidense", "check", "--type", "A", "--rank", "2", "--nodes", "3"]).status.code(), Some(2));
    assert_eq!(run(&["mc", "intersect", "--n", "5"]).status.code(), Some(2));
    assert_eq!(run(&["spherical", "verify-bd", "--t-grid", "1,0,3"]).status.code(), Some(2));
    assert_eq!(run(&["nonsense"]).status.code(), Some(2));
}

#[test]
fn failed_verification_exits_one() {
    // Stated-exponent growth on A2 varies by more than the default allowance.
    let o = run(&["exponent", "verify", "--type", "A", "--rank", "2", "--t", "100,10000"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("power_k_stated: FAIL"));
}

#[test]
fn monte_carlo_reruns_are_byte_identical() {
    let args = ["mc", "intersect", "--t", "6", "--samples", "20000", "--seed", "7", "--json"];
    let a = run(&args);
    let b = run(&[&args[..], &["--threads", "1"]].concat());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["mc", "intersect", "--t", "6", "--samples", "20000", "--seed", "8", "--json"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn baseline_detects_drift() {
    let path = std::env::temp_dir().join(format!("rootshell-base-{}.json", std::process::id()));
    let base = run(&["mc", "triangle", "--n", "2", "--samples", "500", "--json"]);
    std::fs::write(&path, &base.stdout).unwrap();
    let same = run(&["mc", "triangle", "--n", "2", "--samples", "500", "--baseline", path.to_str().unwrap()]);
    let other = run(&["mc", "triangle", "--n", "2", "--samples", "400", "--baseline", path.to_str().unwrap()]);
    let _ = std::fs::remove_file(&path);
    assert_eq!(same.status.code(), Some(0));
    assert_eq!(other.status.code(), Some(1));
}

#[test]
fn config_values_sit_under_flags() {
    let path = std::env::temp_dir().join(format!("rootshell-cfg-{}.txt", std::process::id()));
    std::fs::write(&path, "# defaults\nsamples = 300\nn=2\n").unwrap();
    let (v, _) = json(&["mc", "triangle", "--config", path.to_str().unwrap()]);
    assert_eq!(v["results"]["trials"], 300);
    let (v, _) = json(&["mc", "triangle", "--samples", "200", "--config", path.to_str().unwrap()]);
    let _ = std::fs::remove_file(&path);
    assert_eq!(v["results"]["trials"], 200);
    assert_eq!(v["results"]["n"], 2);
}

#[test]
fn timestamp_only_with_stamp() {
    let (v, _) = json(&["rootsys", "--type", "A", "--rank", "1"]);
    assert!(v["timestamp"].is_null());
    let (v, _) = json(&["rootsys", "--type", "A", "--rank", "1", "--stamp"]);
    assert!(v["timestamp"].as_u64().is_some());
}

#[test]
fn exponent_table_csv_columns() {
    let o = run(&["exponent", "table", "--type", "A", "--rank", "2", "--csv", "-"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("sigma,i_or_l,w_index,n,s,S,e\n"));
    // 6 Weyl elements × 2 permutations × 3 values of i.
    assert_eq!(out.lines().filter(|l| l.starts_with(|c: char| c.is_ascii_digit())).count(), 36);
}
