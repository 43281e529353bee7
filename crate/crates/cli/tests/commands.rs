use serde_json::Value;
use std::process::{Command, Output};

fn pomega(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pomega")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_lines(o: &Output) -> Vec<Value> {
    stdout(o).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn list_shows_every_identity() {
    let o = pomega(&["list"]);
    assert!(o.status.success());
    let ids: Vec<String> = stdout(&o).lines().map(|l| l.split_whitespace().next().unwrap().to_string()).collect();
    for id in ["spt-andrews", "thm-pwz", "cor-pwrep", "brz-F", "phat-weight1", "heine"] {
        assert!(ids.iter().any(|x| x == id), "{id} missing");
    }
}

#[test]
fn run_exact_identity() {
    let o = pomega(&["run", "spt-omega"]);
    assert_eq!(o.status.code(), Some(0));
    let r = &json_lines(&o)[0];
    assert_eq!(r["id"], "spt-omega");
    assert_eq!(r["status"], "pass");
    assert_eq!(r["schema_version"], 1);
}

#[test]
fn unknown_identity_is_a_usage_error() {
    let o = pomega(&["run", "no-such-identity"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
}

#[test]
fn bad_flags_are_usage_errors() {
    assert_eq!(pomega(&["run", "thm-pwz", "--tau", "0.1,-1"]).status.code(), Some(2));
    assert_eq!(pomega(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(pomega(&["expand", "not-a-thing", "--order", "3"]).status.code(), Some(2));
}

#[test]
fn filter_selects_one_report() {
    let o = pomega(&["suite", "--filter", "thm-pwz"]);
    assert_eq!(o.status.code(), Some(0));
    let rs = json_lines(&o);
    assert_eq!(rs.len(), 1);
    assert_eq!(rs[0]["id"], "thm-pwz");
}

#[test]
fn suite_order_does_not_depend_on_jobs() {
    let strip = |mut v: Vec<Value>| {
        for r in v.iter_mut() {
            r.as_object_mut().unwrap().remove("elapsed_ms");
        }
        v
    };
    let a = strip(json_lines(&pomega(&["suite", "--filter", "spt*", "--jobs", "1"])));
    let b = strip(json_lines(&pomega(&["suite", "--filter", "spt*", "--jobs", "4"])));
    assert_eq!(a.len(), 4);
    assert_eq!(a, b);
    let ids: Vec<&str> = a.iter().map(|r| r["id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["spt-andrews", "spt-omega", "sptbar-omega", "sptG2-equiv"]);
}

#[test]
fn zero_tolerance_forces_failure_with_witness() {
    let o = pomega(&["suite", "--filter", "brz-F", "--tolerance", "0", "--prec", "64", "--tau", "0.1,1.0"]);
    assert_eq!(o.status.code(), Some(1));
    let r = &json_lines(&o)[0];
    assert_eq!(r["status"], "fail");
    assert!(r["witness"].is_object());
}

#[test]
fn expand_examples() {
    let o = pomega(&["expand", "pbar-omega", "--order", "10"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v[0][0], "24/24");
    assert!(v[0][1].as_str().unwrap().starts_with("1/1 "));

    let o = pomega(&["expand", "pbar-omega", "--order", "0"]);
    assert_eq!(stdout(&o).trim(), "[]");

    let o = pomega(&["expand", "eta", "--order", "2", "--format", "csv"]);
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("1/24,"));
    assert!(lines[2].starts_with("25/24,\"-1/1"));
}

#[test]
fn expand_routes_agree() {
    let a = stdout(&pomega(&["expand", "pbar-omega", "--order", "12"]));
    let b = stdout(&pomega(&["expand", "pbar-omega:triple-sum", "--order", "12"]));
    assert_eq!(a, b);
}

#[test]
fn oracle_counts() {
    let o = pomega(&["oracle", "spt", "--n", "4"]);
    assert!(o.status.success());
    // spt(1..4) = 1, 3, 5, 10
    assert_eq!(stdout(&o).trim(), "n,count\n1,1\n2,3\n3,5\n4,10");
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = std::env::temp_dir().join(format!("pomega-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("c.toml");
    std::fs::write(&cfg, "order = 3\n").unwrap();
    let c = cfg.to_str().unwrap();
    let from_config = stdout(&pomega(&["--config", c, "expand", "eta"]));
    assert_eq!(from_config, stdout(&pomega(&["expand", "eta", "--order", "3"])));
    let flag_wins = stdout(&pomega(&["--config", c, "expand", "eta", "--order", "2"]));
    assert_eq!(flag_wins, stdout(&pomega(&["expand", "eta", "--order", "2"])));

    std::fs::write(&cfg, "order = \"many\"\n").unwrap();
    assert_eq!(pomega(&["--config", c, "list"]).status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}
