use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::scenario::{Scenario, Task};
use crate::tasks::{execute, TaskError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// The result differs from the expectation.
    Mismatch,
    /// A property task reported `holds: false` with nothing expected.
    Violation,
    /// The library raised a law or precondition failure.
    LawError,
    InputError,
}

impl Status {
    fn name(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Mismatch => "mismatch",
            Status::Violation => "violation",
            Status::LawError => "law-error",
            Status::InputError => "input-error",
        }
    }
}

pub struct TaskReport {
    pub task: Task,
    pub status: Status,
    pub result: Option<Value>,
    pub error: Option<String>,
    pub diff: Vec<String>,
    pub elapsed: Duration,
}

pub struct Report {
    pub tasks: Vec<TaskReport>,
}

/// Differences between an expected value and the actual one. Objects match
/// when every expected key matches; everything else must be equal.
pub fn diff(path: &str, want: &Value, got: &Value, out: &mut Vec<String>) {
    match (want, got) {
        (Value::Object(w), Value::Object(g)) => {
            for (k, wv) in w {
                let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                match g.get(k) {
                    Some(gv) => diff(&p, wv, gv, out),
                    None => out.push(format!("{p}: expected {wv}, missing")),
                }
            }
        }
        (Value::Array(w), Value::Array(g)) if w.len() == g.len() => {
            for (i, (wv, gv)) in w.iter().zip(g).enumerate() {
                diff(&format!("{path}[{i}]"), wv, gv, out);
            }
        }
        _ if want == got => {}
        _ => out.push(format!("{}: expected {want}, got {got}", if path.is_empty() { "result" } else { path })),
    }
}

fn run_one(s: &Scenario, task: &Task) -> TaskReport {
    let start = Instant::now();
    let outcome = execute(s, task);
    let elapsed = start.elapsed();
    let mut rep = TaskReport { task: task.clone(), status: Status::Ok, result: None, error: None, diff: vec![], elapsed };
    let expected_error = task.expect.as_ref().and_then(|e| e.get("error")).and_then(Value::as_str);
    match outcome {
        Ok(v) => {
            match (&task.expect, expected_error) {
                (_, Some(e)) => {
                    rep.status = Status::Mismatch;
                    rep.diff.push(format!("error: expected an error containing {e:?}, got a result"));
                }
                (Some(want), None) => {
                    diff("", want, &v, &mut rep.diff);
                    if !rep.diff.is_empty() {
                        rep.status = Status::Mismatch;
                    }
                }
                (None, None) => {
                    if v.get("holds") == Some(&Value::Bool(false)) {
                        rep.status = Status::Violation;
                    }
                }
            }
            rep.result = Some(v);
        }
        Err(e) => {
            let msg = e.message().to_string();
            match expected_error {
                Some(want) if msg.contains(want) => {}
                Some(want) => {
                    rep.status = Status::Mismatch;
                    rep.diff.push(format!("error: expected an error containing {want:?}, got {msg:?}"));
                }
                None => {
                    rep.status = match e {
                        TaskError::Input(_) => Status::InputError,
                        TaskError::Law(_) => Status::LawError,
                    }
                }
            }
            rep.error = Some(msg);
        }
    }
    rep
}

pub fn run(s: &Scenario, parallel: bool) -> Report {
    let tasks = if parallel {
        s.tasks.par_iter().map(|t| run_one(s, t)).collect()
    } else {
        s.tasks.iter().map(|t| run_one(s, t)).collect()
    };
    Report { tasks }
}

impl Report {
    pub fn exit_code(&self) -> u8 {
        let statuses = || self.tasks.iter().map(|t| t.status);
        if statuses().any(|s| matches!(s, Status::Mismatch | Status::Violation | Status::LawError)) {
            2
        } else if statuses().any(|s| s == Status::InputError) {
            1
        } else {
            0
        }
    }

    /// Keys come out sorted and nothing depends on timing, so equal runs
    /// give equal bytes.
    pub fn json(&self) -> String {
        let tasks: Vec<Value> = self
            .tasks
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let mut m = Map::new();
                m.insert("index".into(), json!(i));
                m.insert("op".into(), json!(t.task.op));
                m.insert("args".into(), Value::Array(t.task.args.clone()));
                m.insert("status".into(), json!(t.status.name()));
                if let Some(r) = &t.result {
                    m.insert("result".into(), r.clone());
                }
                if let Some(e) = &t.error {
                    m.insert("error".into(), json!(e));
                }
                if !t.diff.is_empty() {
                    m.insert("diff".into(), json!(t.diff));
                }
                Value::Object(m)
            })
            .collect();
        let ok = self.tasks.iter().filter(|t| t.status == Status::Ok).count();
        let doc = json!({
            "tasks": tasks,
            "summary": { "total": self.tasks.len(), "ok": ok, "failed": self.tasks.len() - ok },
            "exit": self.exit_code(),
        });
        serde_json::to_string_pretty(&doc).expect("values serialize")
    }

    pub fn human(&self) -> String {
        let mut out = String::new();
        for (i, t) in self.tasks.iter().enumerate() {
            let args: Vec<String> = t.task.args.iter().map(|a| a.as_str().map_or_else(|| a.to_string(), String::from)).collect();
            let _ = writeln!(
                out,
                "[{i}] {}({})  {}  {:.1} ms",
                t.task.op,
                args.join(", "),
                t.status.name(),
                t.elapsed.as_secs_f64() * 1e3
            );
            if let Some(Value::Object(r)) = &t.result {
                render(&mut out, r);
            }
            if let Some(e) = &t.error {
                let _ = writeln!(out, "    error: {e}");
            }
            for d in &t.diff {
                let _ = writeln!(out, "    diff: {d}");
            }
        }
        let ok = self.tasks.iter().filter(|t| t.status == Status::Ok).count();
        let _ = writeln!(out, "{ok}/{} tasks ok", self.tasks.len());
        out
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn render(out: &mut String, r: &Map<String, Value>) {
    let width = r.keys().map(|k| k.chars().count()).max().unwrap_or(0);
    for (k, v) in r {
        match v {
            Value::Array(rows) if !rows.is_empty() && rows.iter().all(Value::is_array) => {
                let cells: Vec<Vec<String>> = rows.iter().map(|r| r.as_array().map_or(vec![], |r| r.iter().map(scalar).collect())).collect();
                let cols = cells.iter().map(Vec::len).max().unwrap_or(0);
                let widths: Vec<usize> =
                    (0..cols).map(|j| cells.iter().filter_map(|r| r.get(j)).map(|c| c.chars().count()).max().unwrap_or(0)).collect();
                let _ = writeln!(out, "    {k}:");
                for row in &cells {
                    let line: Vec<String> = row.iter().enumerate().map(|(j, c)| format!("{c:>w$}", w = widths[j])).collect();
                    let _ = writeln!(out, "      {}", line.join("  "));
                }
            }
            Value::Object(m) => {
                let _ = writeln!(out, "    {k}:");
                for (kk, vv) in m {
                    let _ = writeln!(out, "      {kk}  {}", scalar(vv));
                }
            }
            Value::Array(xs) => {
                let _ = writeln!(out, "    {k:<width$}  {}", xs.iter().map(scalar).collect::<Vec<_>>().join(", "));
            }
            _ => {
                let _ = writeln!(out, "    {k:<width$}  {}", scalar(v));
            }
        }
    }
}
