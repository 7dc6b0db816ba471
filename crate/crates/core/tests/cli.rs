use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn tempora(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tempora")).args(args).env_remove("TEMPORA_DATA").output().expect("binary runs")
}

fn example(name: &str) -> String {
    examples_dir().join(name).display().to_string()
}

fn examples_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/examples")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn analyze_prints_relations() {
    let out = tempora(&["analyze", "-i", &example("j1.disc")]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).lines().any(|l| l == "e2 precede e1"), "{}", stdout(&out));
}

#[test]
fn shipped_example_name_resolves() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_tempora"))
        .args(["analyze", "-i", "vvg_b.disc"])
        .current_dir(dir.path())
        .env_remove("TEMPORA_DATA")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("e3b just_after e2"));
}

#[test]
fn parse_failure_exits_two() {
    let out = tempora(&["analyze", "-i", &example("ruled.disc")]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("as_a_result") && err.contains("temprel=precede"), "{err}");
}

#[test]
fn input_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.disc");
    fs::write(&empty, "# nothing here\n").unwrap();
    let out = tempora(&["analyze", "-i", empty.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));

    let bad = dir.path().join("bad.disc");
    fs::write(&bad, "clause id=e1 tense=past aspect=simple sem=event\nclause id=e2 tense=past aspect=simple sem=event mood=sad\n").unwrap();
    let out = tempora(&["analyze", "-i", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));

    let out = tempora(&["analyze", "-i", dir.path().join("missing.disc").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));

    let out = tempora(&["analyze", "-i", &example("j1.disc"), "--w-sem=-1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("w_sem"), "{}", stderr(&out));

    let out = tempora(&["analyze", "-i", &example("j1.disc"), "--mode", "fastest"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn json_output_is_deterministic() {
    let args = ["analyze", "-i", &example("vvg_a.disc"), "--mode", "enumerate", "--format", "json"];
    let a = stdout(&tempora(&args));
    let b = stdout(&tempora(&args));
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["mode"], "enumerate");
    assert_eq!(v["readings"].as_array().unwrap().len(), 4);
}

#[test]
fn dot_and_underspec() {
    let out = stdout(&tempora(&["analyze", "-i", &example("vvg_a.disc"), "--format", "dot"]));
    assert!(out.starts_with("digraph reading_1"), "{out}");
    assert!(out.contains("cluster_T1"));
    let out = stdout(&tempora(&["analyze", "-i", &example("jjk.disc"), "--mode", "underspec"]));
    assert!(out.contains("e2 any_rel e1x2"), "{out}");
}

#[test]
fn oracle_counts_and_tier_label() {
    let out = stdout(&tempora(&["oracle", "-i", &example("vvg_a.disc")]));
    assert!(out.contains("unconstrained: 17\nconstrained: 4\npreferred: 2\nbuilder agrees: yes"), "{out}");
    let out = stdout(&tempora(&["oracle", "-i", &example("vvg_a.disc"), "--no-tier-prune"]));
    assert!(out.contains("constrained: 6 (2 tier-1"), "{out}");
    assert_eq!(out.matches("[tier-1]").count(), 2, "{out}");
}

#[test]
fn conformance_stock_and_flipped_cell() {
    let out = tempora(&["conformance"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("cells 32/32 examples 35/35"), "{}", stdout(&out));

    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("table1.txt");
    let stock = fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("data/table1.txt")).unwrap();
    let flipped = stock.replace("s1=past,activity anchor=s1 rel=precede allow=no", "s1=past,activity anchor=s1 rel=precede allow=yes");
    assert_ne!(flipped, stock);
    fs::write(&table, flipped).unwrap();
    let out = tempora(&["conformance", "--table", table.to_str().unwrap(), "--examples", examples_dir().to_str().unwrap()]);
    assert_ne!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| l.starts_with("FAIL cell")).count(), 1, "{text}");
}

#[test]
fn data_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    // a lexicon where the key thread no longer looks close
    fs::write(dir.path().join("lexicon.tsv"), "door\tbell\t0.6\n").unwrap();
    let run = |env: Option<&Path>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_tempora"));
        cmd.args(["analyze", "-i", &example("third.disc")]).env_remove("TEMPORA_DATA");
        if let Some(p) = env {
            cmd.env("TEMPORA_DATA", p);
        }
        stdout(&cmd.output().unwrap())
    };
    assert!(run(None).contains("e3 just_after e2"));
    assert!(run(Some(dir.path())).contains("e3 just_after e1"));
}
