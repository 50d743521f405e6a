use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StepStatus {
    Pass,
    Fail,
    Skipped,
    /// Observational step: recorded, never fails.
    Info,
}

#[derive(Debug, Clone, Serialize)]
pub struct Step {
    pub name: String,
    pub status: StepStatus,
    pub detail: String,
    pub metrics: BTreeMap<String, Value>,
    /// Largest n up to which the step's numeric claims were checked.
    pub checked_up_to: Option<u64>,
    pub elapsed_ms: u64,
}

impl Step {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            status: StepStatus::Pass,
            detail: String::new(),
            metrics: BTreeMap::new(),
            checked_up_to: None,
            elapsed_ms: 0,
        }
    }

    pub fn metric(&mut self, key: &str, value: impl Into<Value>) {
        self.metrics.insert(key.into(), value.into());
    }

    pub fn checked(&mut self, upto: u64) {
        self.checked_up_to = Some(upto);
    }

    pub fn detail(&mut self, text: impl Into<String>) {
        self.detail = text.into();
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub command: String,
    pub passed: bool,
    /// Name and SHA-256 digest of every data file read.
    pub inputs: BTreeMap<String, String>,
    pub steps: Vec<Step>,
}

impl VerificationReport {
    pub fn step(&self, name: &str) -> Option<&Step> {
        self.steps.iter().find(|s| s.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// JSON with every timing field zeroed, for comparing runs.
    pub fn to_json_without_timing(&self) -> String {
        let mut copy = self.clone();
        copy.steps.iter_mut().for_each(|s| s.elapsed_ms = 0);
        copy.to_json()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{}: {verdict}", self.command);
        for (name, digest) in &self.inputs {
            let _ = writeln!(out, "  input {name} sha256={digest}");
        }
        for s in &self.steps {
            let tag = match s.status {
                StepStatus::Pass => "pass",
                StepStatus::Fail => "FAIL",
                StepStatus::Skipped => "skip",
                StepStatus::Info => "info",
            };
            let _ = write!(out, "  [{tag}] {} ({} ms)", s.name, s.elapsed_ms);
            if let Some(n) = s.checked_up_to {
                let _ = write!(out, " checked n <= {n}");
            }
            if !s.detail.is_empty() {
                let _ = write!(out, ": {}", s.detail);
            }
            let _ = writeln!(out);
            for (k, v) in &s.metrics {
                let _ = writeln!(out, "      {k} = {v}");
            }
        }
        out
    }
}

/// Runs steps in order. After the first failing step every later step is
/// recorded as skipped and its closure is not run.
pub(crate) struct Recorder {
    report: VerificationReport,
    halted: bool,
}

impl Recorder {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            report: VerificationReport {
                command: command.into(),
                passed: true,
                inputs: BTreeMap::new(),
                steps: vec![],
            },
            halted: false,
        }
    }

    pub fn input(&mut self, name: &str, digest: String) {
        self.report.inputs.insert(name.into(), digest);
    }

    pub fn run<T>(&mut self, name: &str, f: impl FnOnce(&mut Step) -> Result<T, String>) -> Option<T> {
        self.record(name, false, f)
    }

    /// Like `run`, but the step is informational and cannot fail.
    pub fn observe<T>(&mut self, name: &str, f: impl FnOnce(&mut Step) -> T) -> Option<T> {
        self.record(name, true, |s| Ok(f(s)))
    }

    fn record<T>(&mut self, name: &str, info: bool, f: impl FnOnce(&mut Step) -> Result<T, String>) -> Option<T> {
        let mut step = Step::new(name);
        if self.halted {
            step.status = StepStatus::Skipped;
            step.detail = "earlier step failed".into();
            self.report.steps.push(step);
            return None;
        }
        let start = Instant::now();
        let result = f(&mut step);
        step.elapsed_ms = start.elapsed().as_millis() as u64;
        let value = match result {
            Ok(v) => {
                if info {
                    step.status = StepStatus::Info;
                }
                Some(v)
            }
            Err(msg) => {
                step.status = StepStatus::Fail;
                step.detail = msg;
                self.report.passed = false;
                self.halted = true;
                None
            }
        };
        self.report.steps.push(step);
        value
    }

    pub fn finish(self) -> VerificationReport {
        self.report
    }
}
