//! One CSV row per bilateral replicate.

use std::io::{Read, Write};

use thiserror::Error;

/// Fixed column order of the replicate CSV.
pub const CSV_COLUMNS: [&str; 15] = [
    "n",
    "dist",
    "rep",
    "seed",
    "a_n",
    "ce_n",
    "h1",
    "h2",
    "hn",
    "wn",
    "bfs_dist",
    "r_overshoot",
    "discarded",
    "reason",
    "ms",
];

/// The column list, for callers that want it by function.
pub fn csv_schema() -> &'static [&'static str] {
    &CSV_COLUMNS
}

#[derive(Debug, Error)]
pub enum CsvError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("header does not match the replicate schema")]
    Header,
    #[error("line {line}: bad value {value:?} in column {column}")]
    Field { line: u64, column: &'static str, value: String },
}

/// Path statistics of a kept replicate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kept {
    pub ce_n: u64,
    pub h1: u32,
    pub h2: u32,
    pub hn: u32,
    pub wn: f64,
    pub r_overshoot: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateRecord {
    pub n: u64,
    pub dist: String,
    pub rep: u64,
    pub seed: u64,
    pub a_n: u64,
    /// `Ok` for kept replicates, `Err(reason)` for discarded ones.
    pub outcome: Result<Kept, String>,
    pub bfs_dist: Option<u32>,
    pub ms: Option<f64>,
}

impl ReplicateRecord {
    pub fn kept(&self) -> Option<&Kept> {
        self.outcome.as_ref().ok()
    }

    fn fields(&self) -> [String; 15] {
        let opt = |v: Option<String>| v.unwrap_or_default();
        let k = self.kept();
        [
            self.n.to_string(),
            self.dist.clone(),
            self.rep.to_string(),
            self.seed.to_string(),
            self.a_n.to_string(),
            opt(k.map(|k| k.ce_n.to_string())),
            opt(k.map(|k| k.h1.to_string())),
            opt(k.map(|k| k.h2.to_string())),
            opt(k.map(|k| k.hn.to_string())),
            opt(k.map(|k| float(k.wn))),
            opt(self.bfs_dist.map(|d| d.to_string())),
            opt(k.map(|k| k.r_overshoot.to_string())),
            u8::from(k.is_none()).to_string(),
            self.outcome.as_ref().err().cloned().unwrap_or_default(),
            opt(self.ms.map(float)),
        ]
    }
}

/// Floats carry 17 significant digits so they read back bit for bit.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes the header and all rows.
pub fn write_csv<W: Write>(out: W, records: &[ReplicateRecord]) -> Result<(), CsvError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in records {
        w.write_record(r.fields())?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reads a CSV written by [`write_csv`].
pub fn read_csv<R: Read>(input: R) -> Result<Vec<ReplicateRecord>, CsvError> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    if rd.headers()?.iter().ne(CSV_COLUMNS) {
        return Err(CsvError::Header);
    }
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let get = |i: usize| row.get(i).unwrap_or_default();
        let parse = |i: usize| -> Result<Option<f64>, CsvError> {
            let v = get(i);
            if v.is_empty() {
                return Ok(None);
            }
            v.parse::<f64>().map(Some).map_err(|_| CsvError::Field { line, column: CSV_COLUMNS[i], value: v.into() })
        };
        let int = |i: usize| -> Result<Option<u64>, CsvError> {
            let v = get(i);
            if v.is_empty() {
                return Ok(None);
            }
            v.parse::<u64>().map(Some).map_err(|_| CsvError::Field { line, column: CSV_COLUMNS[i], value: v.into() })
        };
        let need = |i: usize| -> Result<u64, CsvError> {
            int(i)?.ok_or(CsvError::Field { line, column: CSV_COLUMNS[i], value: String::new() })
        };
        let discarded = need(12)? == 1;
        let outcome = if discarded {
            Err(get(13).to_string())
        } else {
            Ok(Kept {
                ce_n: need(5)?,
                h1: need(6)? as u32,
                h2: need(7)? as u32,
                hn: need(8)? as u32,
                wn: parse(9)?.ok_or(CsvError::Field { line, column: "wn", value: String::new() })?,
                r_overshoot: need(11)?,
            })
        };
        out.push(ReplicateRecord {
            n: need(0)?,
            dist: get(1).to_string(),
            rep: need(2)?,
            seed: need(3)?,
            a_n: need(4)?,
            outcome,
            bfs_dist: int(10)?.map(|d| d as u32),
            ms: parse(14)?,
        });
    }
    Ok(out)
}
