//! Uniform pass/fail records for relation checks.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    /// Proven exactly (identity or explicit ideal certificate).
    Pass,
    /// Held at every sampled point, not proven symbolically.
    Sampled,
    Fail,
    /// Check was not attempted (size cap or missing precondition).
    Skipped,
}

impl Status {
    pub fn ok(self) -> bool {
        matches!(self, Status::Pass | Status::Sampled)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Entry {
    pub relation: String,
    pub instance: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct Report {
    pub entries: Vec<Entry>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn push(&mut self, relation: impl Into<String>, instance: impl Into<String>, status: Status) -> &mut Entry {
        self.entries.push(Entry {
            relation: relation.into(),
            instance: instance.into(),
            status,
            witness_degree: None,
            detail: None,
        });
        self.entries.last_mut().unwrap()
    }

    pub fn extend(&mut self, other: Report) {
        self.entries.extend(other.entries);
    }

    pub fn all_ok(&self) -> bool {
        !self.entries.iter().any(|e| e.status == Status::Fail)
    }

    pub fn failures(&self) -> Vec<&Entry> {
        self.entries.iter().filter(|e| e.status == Status::Fail).collect()
    }

    pub fn count(&self, s: Status) -> usize {
        self.entries.iter().filter(|e| e.status == s).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let st = match e.status {
                Status::Pass => "PASS",
                Status::Sampled => "SAMPLED",
                Status::Fail => "FAIL",
                Status::Skipped => "SKIP",
            };
            out.push_str(&format!("{st:8} {} [{}]", e.relation, e.instance));
            if let Some(w) = e.witness_degree {
                out.push_str(&format!(" deg<={w}"));
            }
            if let Some(d) = &e.detail {
                out.push_str(&format!(" {d}"));
            }
            out.push('\n');
        }
        out.push_str(&format!(
            "total {} pass {} sampled {} fail {} skipped {}\n",
            self.entries.len(),
            self.count(Status::Pass),
            self.count(Status::Sampled),
            self.count(Status::Fail),
            self.count(Status::Skipped)
        ));
        out
    }
}
