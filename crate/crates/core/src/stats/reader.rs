use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::predictions::csv_err;
use super::StatsError;
use crate::memaudit::mean_std;

/// One reader's answer for one item.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReaderResponse {
    pub reader_id: String,
    pub item_id: String,
    pub true_class: String,
    pub chosen_class: String,
    /// 1 (guess) to 5 (certain).
    pub confidence: u8,
    pub is_synthetic: bool,
}

/// Accuracy and confidence of one reader on real or synthetic items.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReaderGroupScore {
    pub reader_id: String,
    pub group: String,
    pub n_items: usize,
    pub accuracy: f64,
    pub mean_confidence: f64,
}

/// Across-reader mean and sample standard deviation for one group.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupAggregate {
    pub group: String,
    pub n_readers: usize,
    pub accuracy_mean: f64,
    pub accuracy_std: f64,
    pub confidence_mean: f64,
    pub confidence_std: f64,
}

impl GroupAggregate {
    /// `"83.67 ± 3.51%"`.
    pub fn accuracy_percent(&self) -> String {
        format!("{:.2} ± {:.2}%", 100.0 * self.accuracy_mean, 100.0 * self.accuracy_std)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReaderStudyScores {
    /// Sorted by reader, real before synthetic.
    pub per_reader: Vec<ReaderGroupScore>,
    pub groups: Vec<GroupAggregate>,
    /// Denominator of the spread columns.
    pub std_kind: &'static str,
}

const GROUPS: [(&str, bool); 2] = [("real", false), ("synthetic", true)];

pub fn reader_study_scores(responses: &[ReaderResponse]) -> Result<ReaderStudyScores, StatsError> {
    if let Some(r) = responses.iter().find(|r| !(1..=5).contains(&r.confidence)) {
        return Err(StatsError::InvalidInput(format!(
            "confidence {} outside 1..=5 (reader {}, item {})",
            r.confidence, r.reader_id, r.item_id
        )));
    }
    if responses.is_empty() {
        return Err(StatsError::EmptyGroup("no responses".into()));
    }
    let mut by_reader: BTreeMap<&str, [(usize, usize, u64); 2]> = BTreeMap::new();
    for r in responses {
        let cell = &mut by_reader.entry(&r.reader_id).or_default()[r.is_synthetic as usize];
        cell.0 += 1;
        cell.1 += (r.chosen_class == r.true_class) as usize;
        cell.2 += r.confidence as u64;
    }

    let mut per_reader = Vec::new();
    for (reader, cells) in &by_reader {
        for (g, (name, _)) in GROUPS.iter().enumerate() {
            let (n, correct, conf) = cells[g];
            if n == 0 {
                return Err(StatsError::EmptyGroup(format!("reader {reader} has no {name} items")));
            }
            per_reader.push(ReaderGroupScore {
                reader_id: reader.to_string(),
                group: name.to_string(),
                n_items: n,
                accuracy: correct as f64 / n as f64,
                mean_confidence: conf as f64 / n as f64,
            });
        }
    }

    let groups = GROUPS
        .iter()
        .map(|(name, _)| {
            let rows: Vec<&ReaderGroupScore> = per_reader.iter().filter(|s| s.group == *name).collect();
            let acc: Vec<f64> = rows.iter().map(|s| s.accuracy).collect();
            let conf: Vec<f64> = rows.iter().map(|s| s.mean_confidence).collect();
            let (accuracy_mean, accuracy_std) = mean_std(&acc);
            let (confidence_mean, confidence_std) = mean_std(&conf);
            GroupAggregate {
                group: name.to_string(),
                n_readers: rows.len(),
                accuracy_mean,
                accuracy_std,
                confidence_mean,
                confidence_std,
            }
        })
        .collect();
    Ok(ReaderStudyScores {
        per_reader,
        groups,
        std_kind: "sample",
    })
}

pub fn read_responses(path: impl AsRef<Path>) -> Result<Vec<ReaderResponse>, StatsError> {
    let path = path.as_ref();
    let mut rdr = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    rdr.deserialize()
        .map(|r| r.map_err(|e| csv_err(path, e)))
        .collect()
}
