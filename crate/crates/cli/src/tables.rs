//! CSV layouts exchanged between subcommands.

use std::path::Path;

use synthaudit::memaudit::{AuditSummary, AuditedPair};
use synthaudit::NeighborPair;

use crate::{CliError, CliResult};

pub const PAIRS_HEADER: [&str; 3] = ["query_id", "neighbor_id", "cosine"];
pub const AUDIT_HEADER: [&str; 5] = ["synthetic_id", "real_id", "cosine", "distance", "flagged"];

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        other => CliError::schema(path, format!("{other:?}")),
    }
}

fn writer(path: &Path) -> CliResult<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(|e| csv_error(path, e))
}

fn reader(path: &Path) -> CliResult<csv::Reader<std::fs::File>> {
    crate::require_input(path)?;
    csv::Reader::from_path(path).map_err(|e| csv_error(path, e))
}

fn expect_header(path: &Path, rdr: &mut csv::Reader<std::fs::File>, want: &[&str]) -> CliResult {
    let header = rdr.headers().map_err(|e| csv_error(path, e))?;
    if header.iter().take(want.len()).ne(want.iter().copied()) {
        return Err(CliError::schema(
            path,
            format!("header must start with {}", want.join(",")),
        ));
    }
    Ok(())
}

fn parse_f64(path: &Path, row: usize, field: &str) -> CliResult<f64> {
    field
        .trim()
        .parse()
        .map_err(|_| CliError::schema(path, format!("row {row}: {field:?} is not a number")))
}

fn flush(path: &Path, mut w: csv::Writer<std::fs::File>) -> CliResult {
    w.flush().map_err(|e| CliError::io(path, e))
}

/// `query_id,neighbor_id,cosine` with nine decimals; a `rank` column is
/// appended when more than one neighbor per query is listed.
pub fn write_pairs(path: &Path, pairs: &[Vec<NeighborPair>]) -> CliResult {
    let ranked = pairs.iter().any(|p| p.len() > 1);
    let mut w = writer(path)?;
    let mut header = PAIRS_HEADER.to_vec();
    if ranked {
        header.push("rank");
    }
    w.write_record(&header).map_err(|e| csv_error(path, e))?;
    for per_query in pairs {
        for (rank, p) in per_query.iter().enumerate() {
            let mut row = vec![p.query_id.clone(), p.neighbor_id.clone(), format!("{:.9}", p.cosine)];
            if ranked {
                row.push((rank + 1).to_string());
            }
            w.write_record(&row).map_err(|e| csv_error(path, e))?;
        }
    }
    flush(path, w)
}

pub fn read_pairs(path: &Path) -> CliResult<Vec<NeighborPair>> {
    let mut rdr = reader(path)?;
    expect_header(path, &mut rdr, &PAIRS_HEADER)?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        out.push(NeighborPair {
            query_id: rec[0].to_string(),
            neighbor_id: rec[1].to_string(),
            cosine: parse_f64(path, i + 2, &rec[2])?,
        });
    }
    Ok(out)
}

pub fn write_audit(path: &Path, audited: &[AuditedPair]) -> CliResult {
    let mut w = writer(path)?;
    w.write_record(AUDIT_HEADER).map_err(|e| csv_error(path, e))?;
    for a in audited {
        w.write_record([
            a.synthetic_id.as_str(),
            a.real_id.as_str(),
            &format!("{:.9}", a.cosine),
            &format!("{:.9}", a.distance),
            if a.flagged { "true" } else { "false" },
        ])
        .map_err(|e| csv_error(path, e))?;
    }
    flush(path, w)
}

/// Reads an audit table; a file with no data rows is a schema error.
pub fn read_audit(path: &Path) -> CliResult<Vec<AuditedPair>> {
    let mut rdr = reader(path)?;
    expect_header(path, &mut rdr, &AUDIT_HEADER)?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let flagged = match rec[4].trim() {
            "true" | "1" => true,
            "false" | "0" => false,
            other => return Err(CliError::schema(path, format!("row {}: flagged {other:?}", i + 2))),
        };
        out.push(AuditedPair {
            synthetic_id: rec[0].to_string(),
            real_id: rec[1].to_string(),
            cosine: parse_f64(path, i + 2, &rec[2])?,
            distance: parse_f64(path, i + 2, &rec[3])?,
            flagged,
        });
    }
    if out.is_empty() {
        return Err(CliError::schema(path, "no data rows"));
    }
    Ok(out)
}

/// Every value of the named numeric column.
pub fn read_column(path: &Path, column: &str) -> CliResult<Vec<f64>> {
    let mut rdr = reader(path)?;
    let header = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    let idx = header
        .iter()
        .position(|h| h == column)
        .ok_or_else(|| CliError::schema(path, format!("no column {column:?}")))?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        out.push(parse_f64(path, i + 2, &rec[idx])?);
    }
    if out.is_empty() {
        return Err(CliError::schema(path, "no data rows"));
    }
    Ok(out)
}

/// Table layout: group, distance mean ± std, pair count, pairs at or below
/// the threshold.
pub fn write_summary(path: &Path, summaries: &[AuditSummary], group_label: &str, threshold: f64) -> CliResult {
    let mut w = writer(path)?;
    w.write_record([
        group_label.to_string(),
        "Distance".to_string(),
        "Image Pairs".to_string(),
        format!("Pairs ≤ {threshold}"),
    ])
    .map_err(|e| csv_error(path, e))?;
    for s in summaries {
        w.write_record([
            s.group.clone(),
            format!("{:.3} ± {:.3}", s.mean, s.std),
            s.n_pairs.to_string(),
            s.n_flagged.to_string(),
        ])
        .map_err(|e| csv_error(path, e))?;
    }
    flush(path, w)
}

pub fn write_rows(path: &Path, header: &[&str], rows: &[Vec<String>]) -> CliResult {
    let mut w = writer(path)?;
    w.write_record(header).map_err(|e| csv_error(path, e))?;
    for r in rows {
        w.write_record(r).map_err(|e| csv_error(path, e))?;
    }
    flush(path, w)
}
