//! The JSON report every command emits.

use mudra::Guards;
use serde::Serialize;
use serde_json::Value;

use crate::enumerate::DomainSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// The checked property holds.
    Holds,
    /// The checked property fails; a certificate is attached.
    Fails,
    /// Every scripted expectation was met.
    Pass,
    /// At least one expectation was not met.
    Discrepancy,
}

/// One scripted comparison of an expected value against the computed one.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub expected: Value,
    pub observed: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, expected: impl Serialize, observed: impl Serialize) -> Self {
        let expected = to_value(expected);
        let observed = to_value(observed);
        Check {
            name: name.into(),
            pass: expected == observed,
            expected,
            observed,
            note: None,
        }
    }

    pub fn flag(name: impl Into<String>, pass: bool) -> Self {
        Check {
            name: name.into(),
            pass,
            expected: Value::Bool(true),
            observed: Value::Bool(pass),
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

pub fn to_value(value: impl Serialize) -> Value {
    serde_json::to_value(value).expect("report values serialize")
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub property: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainSpec>,
    pub guards: Guards,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub certificates: Vec<Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// Wall-clock time; the only field that varies between identical runs.
    pub elapsed_ms: u64,
}

impl VerificationReport {
    pub fn new(command: impl Into<String>, guards: &Guards) -> Self {
        VerificationReport {
            command: command.into(),
            property: None,
            domain: None,
            guards: guards.clone(),
            verdict: Verdict::Pass,
            checks: Vec::new(),
            certificates: Vec::new(),
            notes: Vec::new(),
            elapsed_ms: 0,
        }
    }

    pub fn check(&mut self, check: Check) -> &mut Self {
        self.checks.push(check);
        self
    }

    pub fn certificate(&mut self, value: impl Serialize) -> &mut Self {
        self.certificates.push(to_value(value));
        self
    }

    pub fn note(&mut self, note: impl Into<String>) -> &mut Self {
        self.notes.push(note.into());
        self
    }

    /// Sets the verdict from the checks: `Pass` iff all pass.
    pub fn settle(&mut self) -> &mut Self {
        self.verdict = if self.checks.iter().all(|c| c.pass) {
            Verdict::Pass
        } else {
            Verdict::Discrepancy
        };
        self
    }

    pub fn failed_checks(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
}
