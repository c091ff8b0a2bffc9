//! Versioned CSV result files.
//!
//! Every data row starts with the schema tag. Reals use the shortest decimal
//! that round-trips, in exponent form; flagged rows leave the numeric
//! columns empty.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use srcore::RoundingMode;

use crate::config::ExperimentKind;
use crate::error::{LabError, Result};
use crate::run::ResultRow;

pub const SCHEMA: &str = "srlab-v1";
pub const HEADER: [&str; 11] = [
    "schema",
    "kind",
    "format",
    "n",
    "mode",
    "seed",
    "reps",
    "rel_err_of_avg",
    "mean_rel_err",
    "bound",
    "cond",
];

fn real(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

pub fn write_rows<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record([
            SCHEMA.to_string(),
            r.kind.to_string(),
            r.format.clone(),
            r.n.to_string(),
            r.mode.to_string(),
            r.seed.to_string(),
            r.reps.to_string(),
            real(r.rel_err_of_avg),
            real(r.mean_rel_err),
            real(r.bound),
            real(r.cond),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv_string(rows: &[ResultRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_rows(rows, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

pub fn write_csv_file(path: &Path, rows: &[ResultRow]) -> Result<()> {
    let mut file = File::create(path)?;
    write_rows(rows, &mut file)?;
    file.sync_all()?;
    Ok(())
}

/// Parses a file written by [`write_rows`]; flagged rows come back with
/// `error` set to a placeholder.
pub fn read_rows<R: Read>(input: R) -> Result<Vec<ResultRow>> {
    let mut rd = csv::Reader::from_reader(input);
    let header = rd.headers()?.clone();
    if header.iter().ne(HEADER) {
        return Err(LabError::Schema(format!("unexpected header {:?}", header.iter().collect::<Vec<_>>())));
    }
    let mut rows = Vec::new();
    for (line, rec) in rd.records().enumerate() {
        let rec = rec?;
        let bad = |what: &str| LabError::Schema(format!("row {}: bad {what}", line + 1));
        if &rec[0] != SCHEMA {
            return Err(LabError::Schema(format!("row {}: schema {:?}, expected {SCHEMA}", line + 1, &rec[0])));
        }
        let real = |i: usize, what: &str| -> Result<Option<f64>> {
            match &rec[i] {
                "" => Ok(None),
                t => t.parse().map(Some).map_err(|_| bad(what)),
            }
        };
        let rel_err_of_avg = real(7, "rel_err_of_avg")?;
        rows.push(ResultRow {
            kind: rec[1].parse::<ExperimentKind>().map_err(|_| bad("kind"))?,
            format: rec[2].to_string(),
            n: rec[3].parse().map_err(|_| bad("n"))?,
            mode: rec[4].parse::<RoundingMode>().map_err(|_| bad("mode"))?,
            seed: rec[5].parse().map_err(|_| bad("seed"))?,
            reps: rec[6].parse().map_err(|_| bad("reps"))?,
            rel_err_of_avg,
            mean_rel_err: real(8, "mean_rel_err")?,
            bound: real(9, "bound")?,
            cond: real(10, "cond")?,
            error: rel_err_of_avg.is_none().then(|| "flagged".to_string()),
        });
    }
    Ok(rows)
}
