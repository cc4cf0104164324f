//! `--config` files: flat `key = value` pairs turned into flags.
//!
//! The file is read before argument parsing. Each key the chosen subcommand
//! accepts becomes `--key value` inserted right after the subcommand name, so
//! any flag given on the command line appears later and overrides it.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::CommandFactory;

use crate::args::Cli;
use crate::CliError;

fn config_path(argv: &[OsString]) -> Option<PathBuf> {
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

fn scalar(v: &toml::Value) -> Result<String, String> {
    match v {
        toml::Value::String(s) => Ok(s.clone()),
        toml::Value::Integer(i) => Ok(i.to_string()),
        toml::Value::Float(f) => Ok(f.to_string()),
        toml::Value::Boolean(b) => Ok(b.to_string()),
        other => Err(format!("unsupported value {other}")),
    }
}

/// Flags encoded by the file at `path`, restricted to those `subcommand`
/// declares.
fn flags_from_file(path: &Path, subcommand: &str) -> Result<Vec<OsString>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let table: toml::Table = text
        .parse()
        .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
    let cmd = Cli::command();
    let Some(sub) = cmd.find_subcommand(subcommand) else {
        return Ok(Vec::new());
    };
    let known: Vec<String> = sub
        .get_arguments()
        .filter_map(|a| a.get_long().map(str::to_string))
        .collect();

    let mut out = Vec::new();
    for (key, value) in &table {
        let flag = key.replace('_', "-");
        if flag == "config" || !known.contains(&flag) {
            continue;
        }
        out.push(OsString::from(format!("--{flag}")));
        let values = match value {
            toml::Value::Array(items) => items.iter().map(scalar).collect(),
            v => scalar(v).map(|s| vec![s]),
        }
        .map_err(|e| CliError::Usage(format!("config key {key}: {e}")))?;
        out.extend(values.into_iter().map(OsString::from));
    }
    Ok(out)
}

/// `argv` with config-file flags spliced in after the subcommand.
pub fn expand(argv: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let names: Vec<String> = Cli::command()
        .get_subcommands()
        .map(|s| s.get_name().to_string())
        .collect();
    let mut skip_next = false;
    let position = argv.iter().enumerate().skip(1).find_map(|(i, a)| {
        let s = a.to_string_lossy();
        if std::mem::take(&mut skip_next) {
            return None;
        }
        if s == "--config" {
            skip_next = true;
            return None;
        }
        names.contains(&s.to_string()).then_some(i)
    });
    let Some(position) = position else {
        return Ok(argv);
    };
    let sub = argv[position].to_string_lossy().into_owned();
    let injected = flags_from_file(&path, &sub)?;
    let mut out = argv[..=position].to_vec();
    out.extend(injected);
    out.extend_from_slice(&argv[position + 1..]);
    Ok(out)
}
