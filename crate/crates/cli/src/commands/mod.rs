mod audit;
mod data;
mod evaluate;

use std::path::{Path, PathBuf};

use synthaudit::memaudit::AuditedPair;
use synthaudit::Manifest;

use crate::args::{Command, GroupArgs};
use crate::{CliError, CliResult};

pub fn dispatch(command: Command) -> CliResult {
    match command {
        Command::Preprocess(a) => data::preprocess(a),
        Command::Split(a) => data::split(a),
        Command::Prompt(a) => data::prompt(a),
        Command::NnSearch(a) => audit::nn_search(a),
        Command::Audit(a) => audit::audit(a),
        Command::Summarize(a) => audit::summarize(a),
        Command::Report(a) => audit::report(a),
        Command::Wilcoxon(a) => evaluate::wilcoxon(a),
        Command::Roc(a) => evaluate::roc(a),
        Command::BootstrapDiff(a) => evaluate::bootstrap(a),
        Command::Fid(a) => evaluate::fid(a),
        Command::Rank(a) => evaluate::rank(a),
        Command::ReaderStudy(a) => evaluate::reader_study(a),
    }
}

fn load_manifest(path: &Path) -> CliResult<Manifest> {
    crate::require_input(path)?;
    Ok(synthaudit::dataio::load_manifest(path)?)
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> CliResult {
    let mut text = serde_json::to_string_pretty(value).expect("values serialize");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn create_dir(path: &Path) -> CliResult {
    std::fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}

/// Resolves a manifest `image_path` against the manifest's own directory.
fn resolve(manifest_path: &Path, image_path: &Path) -> PathBuf {
    if image_path.is_absolute() {
        image_path.to_path_buf()
    } else {
        manifest_path.parent().unwrap_or(Path::new(".")).join(image_path)
    }
}

fn check_threshold(t: f64) -> CliResult {
    if t > 0.0 && t < 1.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--threshold must lie in (0, 1), got {t}")))
    }
}

/// Group name of each audited pair, taken from the real image's record.
struct Grouping {
    field: Option<String>,
    keys: Vec<String>,
}

impl Grouping {
    fn new(args: &GroupArgs, audited: &[AuditedPair]) -> CliResult<Self> {
        let Some(path) = &args.manifest else {
            return Ok(Grouping {
                field: None,
                keys: vec!["all".into(); audited.len()],
            });
        };
        let manifest = load_manifest(path)?;
        let index = manifest.index();
        let field = args.group_by.as_str();
        if !matches!(field, "specialty" | "image_type" | "split") {
            return Err(CliError::Usage(format!(
                "--group-by must be specialty, image_type or split, got {field:?}"
            )));
        }
        let keys = audited
            .iter()
            .map(|a| {
                let r = index.get(a.real_id.as_str()).ok_or_else(|| {
                    CliError::schema(path, format!("real id {:?} not in manifest", a.real_id))
                })?;
                Ok(match field {
                    "specialty" => r.specialty.to_string(),
                    "image_type" => r.image_type.to_string(),
                    _ => r.split.map_or("unassigned".to_string(), |s| s.to_string()),
                })
            })
            .collect::<CliResult<_>>()?;
        Ok(Grouping {
            field: Some(field.to_string()),
            keys,
        })
    }

    fn summarize(&self, audited: &[AuditedPair]) -> CliResult<Vec<synthaudit::AuditSummary>> {
        let lookup: std::collections::HashMap<(&str, &str), &str> = audited
            .iter()
            .zip(&self.keys)
            .map(|(a, k)| ((a.synthetic_id.as_str(), a.real_id.as_str()), k.as_str()))
            .collect();
        Ok(synthaudit::memaudit::summarize(audited, |a| {
            lookup[&(a.synthetic_id.as_str(), a.real_id.as_str())].to_string()
        })?)
    }

    fn label(&self) -> String {
        match self.field.as_deref() {
            Some("specialty") | None => "Specialty".into(),
            Some("image_type") => "Image type".into(),
            Some(other) => other.to_string(),
        }
    }
}
