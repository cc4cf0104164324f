//! The `report.json` document written by `audit` and `report`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use synthaudit::memaudit::{AuditSummary, AuditedPair};
use synthaudit::stats::{BootstrapCI, WilcoxonResult};

use crate::{CliError, CliResult};

pub const SCHEMA_ID: &str = "synthaudit-report/1";

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub toolkit: &'static str,
    pub version: &'static str,
    /// Echo of the parameters and inputs that produced the report.
    pub config: BTreeMap<String, serde_json::Value>,
    pub audit: AuditSection,
    pub wilcoxon: Option<WilcoxonResult>,
    pub bootstrap: Vec<NamedInterval>,
    pub roc: Vec<RocSummary>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditSection {
    pub threshold: f64,
    pub group_by: Option<String>,
    pub n_pairs: usize,
    pub n_flagged: usize,
    pub groups: Vec<AuditSummary>,
    pub flagged_pairs: Vec<AuditedPair>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NamedInterval {
    pub name: String,
    pub interval: BootstrapCI,
}

#[derive(Debug, Clone, Serialize)]
pub struct RocSummary {
    pub name: String,
    pub classes: Vec<String>,
    pub per_class_auroc: Vec<f64>,
    pub macro_auroc: f64,
}

impl Report {
    pub fn new(audit: AuditSection) -> Self {
        Report {
            schema: SCHEMA_ID,
            toolkit: "synthaudit",
            version: synthaudit::VERSION,
            config: BTreeMap::new(),
            audit,
            wilcoxon: None,
            bootstrap: Vec::new(),
            roc: Vec::new(),
            notes: vec!["std columns are sample standard deviations (n - 1 denominator)".into()],
        }
    }

    pub fn echo(&mut self, key: &str, value: impl Serialize) {
        self.config.insert(
            key.to_string(),
            serde_json::to_value(value).expect("config values serialize"),
        );
    }

    pub fn write(&self, path: &Path) -> CliResult {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        std::fs::write(path, text).map_err(|e| CliError::io(path, e))
    }
}

impl AuditSection {
    pub fn new(threshold: f64, group_by: Option<String>, audited: &[AuditedPair], groups: Vec<AuditSummary>) -> Self {
        AuditSection {
            threshold,
            group_by,
            n_pairs: audited.len(),
            n_flagged: audited.iter().filter(|a| a.flagged).count(),
            groups,
            flagged_pairs: audited.iter().filter(|a| a.flagged).cloned().collect(),
        }
    }
}
