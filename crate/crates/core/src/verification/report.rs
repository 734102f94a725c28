use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// pass iff |value| <= tolerance
    Equality,
    /// pass iff value <= tolerance
    OneSided,
    /// recorded only
    Info,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
    /// Failing non-binding entries are reported but do not fail the audit.
    pub binding: bool,
    pub anchor: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub entries: Vec<AuditEntry>,
}

impl AuditReport {
    pub fn push(
        &mut self,
        name: impl Into<String>,
        value: f64,
        tolerance: f64,
        comparison: Comparison,
        anchor: impl Into<String>,
    ) -> &mut AuditEntry {
        let pass = match comparison {
            Comparison::Equality => value.abs() <= tolerance,
            Comparison::OneSided => value <= tolerance,
            Comparison::Info => true,
        };
        self.entries.push(AuditEntry {
            name: name.into(),
            value,
            tolerance,
            comparison,
            pass,
            binding: comparison != Comparison::Info,
            anchor: anchor.into(),
        });
        self.entries.last_mut().expect("just pushed")
    }

    pub fn equality(
        &mut self,
        name: impl Into<String>,
        value: f64,
        tolerance: f64,
        anchor: impl Into<String>,
    ) {
        self.push(name, value, tolerance, Comparison::Equality, anchor);
    }

    pub fn one_sided(
        &mut self,
        name: impl Into<String>,
        value: f64,
        tolerance: f64,
        anchor: impl Into<String>,
    ) {
        self.push(name, value, tolerance, Comparison::OneSided, anchor);
    }

    pub fn info(&mut self, name: impl Into<String>, value: f64, anchor: impl Into<String>) {
        self.push(name, value, 0.0, Comparison::Info, anchor);
    }

    /// Record without letting a failure fail the whole report.
    pub fn advisory(
        &mut self,
        name: impl Into<String>,
        value: f64,
        tolerance: f64,
        comparison: Comparison,
        anchor: impl Into<String>,
    ) {
        self.push(name, value, tolerance, comparison, anchor)
            .binding = false;
    }

    pub fn extend(&mut self, other: AuditReport) {
        self.entries.extend(other.entries);
    }

    pub fn passes(&self) -> bool {
        self.entries.iter().all(|e| e.pass || !e.binding)
    }

    pub fn failures(&self) -> impl Iterator<Item = &AuditEntry> {
        self.entries.iter().filter(|e| e.binding && !e.pass)
    }

    pub fn get(&self, name: &str) -> Option<&AuditEntry> {
        self.entries.iter().find(|e| e.name == name)
    }
}
