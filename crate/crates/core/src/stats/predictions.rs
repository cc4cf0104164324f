use std::path::Path;

use super::StatsError;

/// Per-example, per-class classifier scores with multi-hot labels.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredPredictions {
    ids: Vec<String>,
    classes: Vec<String>,
    /// Row-major `N × K`.
    scores: Vec<f64>,
    labels: Vec<bool>,
}

impl ScoredPredictions {
    pub fn new(
        ids: Vec<String>,
        classes: Vec<String>,
        scores: Vec<f64>,
        labels: Vec<bool>,
    ) -> Result<Self, StatsError> {
        let cells = ids.len() * classes.len();
        if classes.is_empty() || scores.len() != cells || labels.len() != cells {
            return Err(StatsError::InvalidInput(format!(
                "{} ids × {} classes needs {cells} scores and labels, got {} and {}",
                ids.len(),
                classes.len(),
                scores.len(),
                labels.len()
            )));
        }
        if scores.iter().any(|s| !s.is_finite()) {
            return Err(StatsError::InvalidInput("scores must be finite".into()));
        }
        Ok(ScoredPredictions {
            ids,
            classes,
            scores,
            labels,
        })
    }

    /// Single-class predictions from parallel score/label columns.
    pub fn binary(class: &str, scores: Vec<f64>, labels: Vec<bool>) -> Result<Self, StatsError> {
        let ids = (0..scores.len()).map(|i| i.to_string()).collect();
        Self::new(ids, vec![class.to_string()], scores, labels)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn score(&self, i: usize, k: usize) -> f64 {
        self.scores[i * self.classes.len() + k]
    }

    pub fn label(&self, i: usize, k: usize) -> bool {
        self.labels[i * self.classes.len() + k]
    }

    pub fn class_scores(&self, k: usize) -> Vec<f64> {
        (0..self.len()).map(|i| self.score(i, k)).collect()
    }

    pub fn class_labels(&self, k: usize) -> Vec<bool> {
        (0..self.len()).map(|i| self.label(i, k)).collect()
    }

    /// Checks that `other` describes the same examples, classes and labels.
    pub fn check_paired(&self, other: &ScoredPredictions) -> Result<(), StatsError> {
        if self.ids != other.ids {
            return Err(StatsError::IdMismatch("example ids differ".into()));
        }
        if self.classes != other.classes {
            return Err(StatsError::IdMismatch("class names differ".into()));
        }
        if self.labels != other.labels {
            return Err(StatsError::IdMismatch("labels differ".into()));
        }
        Ok(())
    }
}

pub(super) fn csv_err(path: &Path, e: impl std::fmt::Display) -> StatsError {
    StatsError::Csv {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn parse_label(s: &str) -> Option<bool> {
    match s.trim() {
        "1" | "true" | "True" | "TRUE" => Some(true),
        "0" | "false" | "False" | "FALSE" => Some(false),
        _ => None,
    }
}

/// Reads `id, score:<class>…, label:<class>…` CSV.
pub fn read_predictions(path: impl AsRef<Path>) -> Result<ScoredPredictions, StatsError> {
    let path = path.as_ref();
    let mut rdr = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let header = rdr.headers().map_err(|e| csv_err(path, e))?.clone();
    if header.get(0) != Some("id") {
        return Err(csv_err(path, "first column must be `id`"));
    }
    let score_classes: Vec<String> = header
        .iter()
        .filter_map(|h| h.strip_prefix("score:").map(str::to_string))
        .collect();
    let label_classes: Vec<String> = header
        .iter()
        .filter_map(|h| h.strip_prefix("label:").map(str::to_string))
        .collect();
    let k = score_classes.len();
    if k == 0 || score_classes != label_classes || header.len() != 1 + 2 * k {
        return Err(csv_err(
            path,
            "header must be id, score:<class>…, label:<class>… with matching classes",
        ));
    }
    for (i, h) in header.iter().enumerate().skip(1) {
        let expected = if i <= k { "score:" } else { "label:" };
        if !h.starts_with(expected) {
            return Err(csv_err(path, "score columns must precede label columns"));
        }
    }

    let (mut ids, mut scores, mut labels) = (Vec::new(), Vec::new(), Vec::new());
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        ids.push(rec[0].to_string());
        for j in 0..k {
            let s: f64 = rec[1 + j]
                .trim()
                .parse()
                .map_err(|_| csv_err(path, format!("row {}: bad score {:?}", line + 2, &rec[1 + j])))?;
            scores.push(s);
        }
        for j in 0..k {
            let l = parse_label(&rec[1 + k + j])
                .ok_or_else(|| csv_err(path, format!("row {}: bad label {:?}", line + 2, &rec[1 + k + j])))?;
            labels.push(l);
        }
    }
    ScoredPredictions::new(ids, score_classes, scores, labels)
}

pub fn write_predictions(p: &ScoredPredictions, path: impl AsRef<Path>) -> Result<(), StatsError> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    let mut header = vec!["id".to_string()];
    header.extend(p.classes().iter().map(|c| format!("score:{c}")));
    header.extend(p.classes().iter().map(|c| format!("label:{c}")));
    w.write_record(&header).map_err(|e| csv_err(path, e))?;
    let k = p.classes().len();
    for i in 0..p.len() {
        let mut row = vec![p.ids()[i].clone()];
        row.extend((0..k).map(|j| format!("{:?}", p.score(i, j))));
        row.extend((0..k).map(|j| if p.label(i, j) { "1" } else { "0" }.to_string()));
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| csv_err(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let p = ScoredPredictions::new(
            vec!["a".into(), "b".into()],
            vec!["x".into(), "y z".into()],
            vec![0.1, 0.9, 0.3333333333333333, -2.5],
            vec![true, false, false, true],
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.csv");
        write_predictions(&p, &path).unwrap();
        assert_eq!(read_predictions(&path).unwrap(), p);
    }

    #[test]
    fn rejects_mismatched_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.csv");
        std::fs::write(&path, "id,score:a,label:b\n1,0.5,1\n").unwrap();
        assert!(read_predictions(&path).is_err());
        std::fs::write(&path, "id,score:a,label:a\n1,0.5,maybe\n").unwrap();
        assert!(read_predictions(&path).is_err());
    }

    #[test]
    fn pairing_checks() {
        let a = ScoredPredictions::binary("c", vec![0.1, 0.2], vec![true, false]).unwrap();
        let b = ScoredPredictions::binary("c", vec![0.5, 0.2], vec![false, true]).unwrap();
        assert!(matches!(a.check_paired(&b), Err(StatsError::IdMismatch(_))));
        assert!(a.check_paired(&a.clone()).is_ok());
    }
}
