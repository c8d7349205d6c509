//! Structured verification outcomes shared by all verifiers and the CLI.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseStatus {
    Pass,
    Fail,
    Skipped,
    Limit,
}

impl CaseStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseStatus::Pass => "pass",
            CaseStatus::Fail => "fail",
            CaseStatus::Skipped => "skipped",
            CaseStatus::Limit => "limit",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Case {
    pub id: String,
    pub description: String,
    pub status: CaseStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Case {
    pub fn pass(id: impl Into<String>, description: impl Into<String>) -> Self {
        Case {
            id: id.into(),
            description: description.into(),
            status: CaseStatus::Pass,
            witness: None,
        }
    }

    pub fn fail(id: impl Into<String>, description: impl Into<String>, witness: impl Into<String>) -> Self {
        Case {
            id: id.into(),
            description: description.into(),
            status: CaseStatus::Fail,
            witness: Some(witness.into()),
        }
    }

    pub fn check(id: impl Into<String>, description: impl Into<String>, ok: bool, witness: impl FnOnce() -> String) -> Self {
        if ok {
            Self::pass(id, description)
        } else {
            Self::fail(id, description, witness())
        }
    }

    /// Maps an engine error to a case: term-cap overruns become `limit`,
    /// everything else `fail` with the error as witness.
    pub fn from_error(id: impl Into<String>, description: impl Into<String>, err: &Error) -> Self {
        let status = match err {
            Error::LimitExceeded { .. } => CaseStatus::Limit,
            _ => CaseStatus::Fail,
        };
        Case {
            id: id.into(),
            description: description.into(),
            status,
            witness: Some(err.to_string()),
        }
    }
}

/// Serialized form: `{ tool, version, command, params, cases, status, seed }`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub params: BTreeMap<String, String>,
    pub cases: Vec<Case>,
    #[serde(rename = "status")]
    pub overall: CaseStatus,
    pub seed: Option<u64>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Report {
            tool: "conflap".to_string(),
            version: crate::VERSION.to_string(),
            command: command.into(),
            params: BTreeMap::new(),
            cases: Vec::new(),
            overall: CaseStatus::Pass,
            seed: None,
        }
    }

    pub fn with_param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn set_param(&mut self, key: &str, value: impl ToString) {
        self.params.insert(key.to_string(), value.to_string());
    }

    pub fn push(&mut self, case: Case) {
        self.cases.push(case);
        self.overall = Self::status_of(&self.cases);
    }

    pub fn extend(&mut self, cases: impl IntoIterator<Item = Case>) {
        self.cases.extend(cases);
        self.overall = Self::status_of(&self.cases);
    }

    /// Appends the cases of `other` and carries over its parameters under a prefix.
    pub fn absorb(&mut self, other: Report) {
        for (k, v) in other.params {
            self.params.insert(format!("{}.{}", other.command, k), v);
        }
        self.extend(other.cases);
    }

    /// Sorts cases by id; output order is canonical regardless of scheduling.
    pub fn finalize(mut self) -> Self {
        self.cases.sort_by(|a, b| a.id.cmp(&b.id));
        self.overall = Self::status_of(&self.cases);
        self
    }

    fn status_of(cases: &[Case]) -> CaseStatus {
        if cases.iter().any(|c| c.status == CaseStatus::Fail) {
            CaseStatus::Fail
        } else if cases.iter().any(|c| c.status == CaseStatus::Limit) {
            CaseStatus::Limit
        } else {
            CaseStatus::Pass
        }
    }

    pub fn passed(&self) -> bool {
        self.overall == CaseStatus::Pass
    }

    pub fn count(&self, status: CaseStatus) -> usize {
        self.cases.iter().filter(|c| c.status == status).count()
    }

    /// First case that is not a pass or skip.
    pub fn first_problem(&self) -> Option<&Case> {
        self.cases
            .iter()
            .find(|c| matches!(c.status, CaseStatus::Fail | CaseStatus::Limit))
    }

    /// One line per case followed by a summary line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.cases {
            out.push_str(&format!("[{}] {}: {}", c.status.as_str(), c.id, c.description));
            if let Some(w) = &c.witness {
                out.push_str(&format!(" | witness: {}", w));
            }
            out.push('\n');
        }
        out.push_str(&format!(
            "{} {}: {} ({} pass, {} fail, {} limit, {} skipped)\n",
            self.tool,
            self.command,
            self.overall.as_str(),
            self.count(CaseStatus::Pass),
            self.count(CaseStatus::Fail),
            self.count(CaseStatus::Limit),
            self.count(CaseStatus::Skipped),
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overall_status_rules() {
        let mut r = Report::new("t");
        r.push(Case::pass("a", "ok"));
        r.push(Case {
            id: "b".into(),
            description: "skip".into(),
            status: CaseStatus::Skipped,
            witness: None,
        });
        assert!(r.passed());
        r.push(Case::from_error("c", "cap", &Error::LimitExceeded { terms: 10, cap: 5 }));
        assert_eq!(r.overall, CaseStatus::Limit);
        r.push(Case::fail("d", "bad", "x"));
        assert_eq!(r.overall, CaseStatus::Fail);
    }

    #[test]
    fn finalize_sorts_by_id() {
        let mut r = Report::new("t");
        r.push(Case::pass("b", ""));
        r.push(Case::pass("a", ""));
        let r = r.finalize();
        assert_eq!(r.cases[0].id, "a");
    }
}
