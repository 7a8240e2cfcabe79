use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_deskcat"));
    c.env_remove("DESKCAT_LIMITS");
    c
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn text(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned() + &String::from_utf8_lossy(&o.stderr)
}

fn write(dir: &Path, name: &str, doc: &Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string_pretty(doc).unwrap()).unwrap();
    p
}

fn run(path: &Path, extra: &[&str]) -> Output {
    bin().arg("run").arg(path).args(extra).output().unwrap()
}

fn trace_doc(expect: Value) -> Value {
    json!({
        "kernels": { "K": { "dims": [[5, 1], [2, 7]] } },
        "tasks": [{ "op": "trace", "args": ["K"], "expect": expect }]
    })
}

fn scenarios() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    v.sort();
    v
}

#[test]
fn bundled_scenarios_pass() {
    let files = scenarios();
    assert!(files.len() >= 5);
    for f in files {
        let o = run(&f, &[]);
        assert_eq!(code(&o), 0, "{}\n{}", f.display(), text(&o));
    }
}

#[test]
fn matching_expectation_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "t.json", &trace_doc(json!({ "value": "12/1" })));
    let o = run(&p, &[]);
    assert_eq!(code(&o), 0, "{}", text(&o));
    assert!(text(&o).contains("12/1"));
}

#[test]
fn mismatch_exits_two_with_diff() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "t.json", &trace_doc(json!({ "value": "13/1" })));
    let o = run(&p, &["--json"]);
    assert_eq!(code(&o), 2);
    let rep: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rep["tasks"][0]["status"], "mismatch");
    let diff = rep["tasks"][0]["diff"][0].as_str().unwrap();
    assert!(diff.contains("13/1") && diff.contains("12/1"), "{diff}");
    assert_eq!(rep["exit"], 2);
}

#[test]
fn input_problems_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("syntax.json", None, "{ not json".to_string()),
        ("undeclared.json", Some("'L'"), json!({ "tasks": [{ "op": "trace", "args": ["L"] }] }).to_string()),
        ("unknown_op.json", Some("frobnicate"), json!({ "tasks": [{ "op": "frobnicate", "args": [] }] }).to_string()),
        ("section.json", Some("widgets"), json!({ "widgets": {}, "tasks": [] }).to_string()),
        (
            "dangling.json",
            Some("'G'"),
            json!({ "groupoids": { "Y": { "classifying": "G" } }, "tasks": [] }).to_string(),
        ),
    ];
    for (name, needle, body) in cases {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        let o = run(&p, &[]);
        assert_eq!(code(&o), 1, "{name}: {}", text(&o));
        if let Some(n) = needle {
            assert!(text(&o).contains(n), "{name}: {}", text(&o));
        }
    }
    let o = run(&dir.path().join("missing.json"), &[]);
    assert_eq!(code(&o), 1);
}

#[test]
fn law_failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let doc = json!({
        "quantales": { "chain3": {
            "labels": ["bot", "1", "top"],
            "join": [["bot", "1", "top"], ["1", "1", "top"], ["top", "top", "top"]],
            "tensor": [["bot", "bot", "bot"], ["bot", "1", "top"], ["bot", "top", "top"]],
            "unit": "1"
        } },
        "groups": { "C2": { "cyclic": 2 } },
        "posets": { "G": { "group": "C2" } },
        "functors": { "F": { "source": "G", "target": "chain3", "values": ["top", "top"] } },
        "tasks": [{ "op": "ambidexterity", "args": ["F"] }]
    });
    let p = write(dir.path(), "law.json", &doc);
    assert_eq!(code(&run(&p, &[])), 2);
}

#[test]
fn expected_errors_count_as_success() {
    let dir = tempfile::tempdir().unwrap();
    let doc = json!({
        "categories": { "P": { "quantale": "boolean", "objects": ["x", "y"], "hom": [["1", "1"], ["0", "1"]] } },
        "tasks": [{ "op": "change_enrichment", "args": ["P", "tropical:3", ["0", "inf"]], "expect": { "error": "monotone" } }]
    });
    let p = write(dir.path(), "e.json", &doc);
    let o = run(&p, &[]);
    assert_eq!(code(&o), 0, "{}", text(&o));
}

#[test]
fn empty_task_list_is_fine() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "e.json", &json!({ "tasks": [] }));
    let o = run(&p, &[]);
    assert_eq!(code(&o), 0);
    assert!(text(&o).contains("0/0"));
}

#[test]
fn json_report_is_deterministic() {
    for f in scenarios() {
        let a = run(&f, &["--json"]);
        let b = run(&f, &["--json"]);
        let c = run(&f, &["--json", "--parallel"]);
        assert_eq!(a.stdout, b.stdout, "{}", f.display());
        assert_eq!(a.stdout, c.stdout, "{}", f.display());
        let rep: Value = serde_json::from_slice(&a.stdout).unwrap();
        assert_eq!(rep["summary"]["failed"], 0);
    }
}

#[test]
fn limits_are_enforced() {
    let dir = tempfile::tempdir().unwrap();
    let doc = json!({ "groups": { "S5": { "symmetric": 5 } }, "tasks": [] });
    let p = write(dir.path(), "big.json", &doc);
    assert_eq!(code(&run(&p, &[])), 0);
    let o = bin().arg("run").arg(&p).env("DESKCAT_LIMITS", "order=100").output().unwrap();
    assert_eq!(code(&o), 1);
    assert!(text(&o).contains("limit"), "{}", text(&o));
    let o = run(&p, &["--limits", "order=100"]);
    assert_eq!(code(&o), 1);

    let doc = json!({ "kernels": { "K": { "dims": [[20]] } }, "tasks": [] });
    let p = write(dir.path(), "dim.json", &doc);
    assert_eq!(code(&run(&p, &[])), 1);
    assert_eq!(code(&run(&p, &["--limits", "dim=32"])), 0);

    let o = run(&p, &["--limits", "bogus=3"]);
    assert_eq!(code(&o), 1);
}

fn selftest(size: usize, seed: u64, out: &Path, mutations: &[&str]) -> Output {
    let mut c = bin();
    c.args(["selftest", "--corpus-size", &size.to_string(), "--seed", &seed.to_string(), "--out"]).arg(out);
    for m in mutations {
        c.args(["--mutate", m]);
    }
    c.output().unwrap()
}

#[test]
fn selftest_passes_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = selftest(50, 0, dir.path(), &[]);
    assert_eq!(code(&a), 0, "{}", text(&a));
    let out = String::from_utf8_lossy(&a.stdout);
    assert_eq!(out.lines().filter(|l| l.contains("50/50 passed")).count(), 10, "{out}");
    let b = selftest(50, 0, dir.path(), &[]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn empty_corpus_passes_vacuously() {
    let dir = tempfile::tempdir().unwrap();
    let o = selftest(0, 0, dir.path(), &[]);
    assert_eq!(code(&o), 0, "{}", text(&o));
}

#[test]
fn unknown_mutation_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&selftest(5, 0, dir.path(), &["nonsense"])), 1);
}

#[test]
fn mutations_are_caught_and_counterexamples_replay() {
    let dir = tempfile::tempdir().unwrap();
    let o = selftest(50, 0, dir.path(), &["convolution-order", "residuation"]);
    assert_eq!(code(&o), 2, "{}", text(&o));
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.contains("FAILED"));
    for prop in ["associativity", "yoneda"] {
        let file = dir.path().join(format!("counterexample-{prop}.json"));
        assert!(file.exists(), "{prop}: {out}");
        let doc: Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
        assert!(!doc["tasks"].as_array().unwrap().is_empty());
        assert_eq!(code(&run(&file, &[])), 2, "{prop} should fail again");
        // without the mutation the same scenario is fine
        let mut clean = doc.clone();
        clean.as_object_mut().unwrap().remove("mutations");
        let p = write(dir.path(), &format!("clean-{prop}.json"), &clean);
        let r = run(&p, &[]);
        assert_eq!(code(&r), 0, "{prop}: {}", text(&r));
    }
    let again = selftest(50, 0, dir.path(), &["convolution-order", "residuation"]);
    assert_eq!(o.stdout, again.stdout);
}
