use heckekit::coxeter::CoxeterSystem;
use heckekit::field::Field;
use heckekit::hecke::{HeckeAlgebra, HeckeElement};
use heckekit::homotopy::Complex;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Format;

pub const SCHEMA: &str = "heckekit/v1";

/// One named check with its verdict.
#[derive(Clone, Debug, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckLine {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        CheckLine { name: name.into(), passed, detail: detail.into() }
    }
}

/// The outcome of one command.
#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub result: Value,
    pub text: Vec<String>,
    pub checks: Vec<CheckLine>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report { command: command.into(), result: json!({}), text: Vec::new(), checks: Vec::new() }
    }

    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.text.push(s.into());
    }

    pub fn check(&mut self, c: CheckLine) {
        self.checks.push(c);
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": SCHEMA,
            "command": self.command,
            "ok": self.ok(),
            "result": self.result,
            "checks": self.checks,
        })
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(&self.to_json()).expect("report serializes"),
            Format::Text => {
                let mut out = self.text.clone();
                for c in &self.checks {
                    let tag = if c.passed { "pass" } else { "FAIL" };
                    if c.detail.is_empty() {
                        out.push(format!("[{tag}] {}", c.name));
                    } else {
                        out.push(format!("[{tag}] {}: {}", c.name, c.detail));
                    }
                }
                out.join("\n")
            }
        }
    }
}

pub fn error_json(command: &str, err: &anyhow::Error) -> Value {
    json!({"schema": SCHEMA, "command": command, "ok": false, "error": format!("{err:#}")})
}

pub fn complex_json<F: Field>(sys: &CoxeterSystem, hecke: &HeckeAlgebra, c: &Complex<F>, tag: &str) -> Value {
    let terms: Vec<Value> = c
        .degrees()
        .filter(|&d| !c.term(d).is_empty())
        .map(|d| {
            let summands: Vec<Value> =
                c.term(d).iter().map(|t| json!({"word": sys.word_string(&t.word), "shift": t.shift})).collect();
            json!({"degree": d, "summands": summands})
        })
        .collect();
    json!({
        "tag": tag,
        "terms": terms,
        "num_terms": c.num_terms(),
        "character": hecke_json(sys, &c.character(hecke)),
    })
}

pub fn hecke_json(sys: &CoxeterSystem, h: &HeckeElement) -> Value {
    let terms: Vec<Value> = h.terms().map(|(w, p)| json!({"element": sys.elem_string(w), "coeff": p.to_string()})).collect();
    json!({"display": h.display(sys), "terms": terms})
}

pub fn complex_text<F: Field>(sys: &CoxeterSystem, c: &Complex<F>) -> String {
    if c.is_zero() {
        return "0".into();
    }
    c.describe(&|w| format!("B_{}", sys.expr_string(w)))
}
