use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{CliError, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Enough to re-run a command exactly.
#[derive(Debug, Serialize)]
pub struct Provenance<'a, C: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub seed: u64,
    pub config: &'a C,
}

impl<'a, C: Serialize> Provenance<'a, C> {
    pub fn new(command: &'static str, seed: u64, config: &'a C) -> Self {
        Self { tool: "nflp", version: VERSION, command, seed, config }
    }
}

/// Opens `path` for writing, or stdout when there is none.
pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::data(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| CliError::data(format!("writing JSON: {e}")))?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

pub fn write_csv<T: Serialize>(out: &mut dyn Write, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::Writer::from_writer(&mut *out);
    for row in rows {
        w.serialize(row).map_err(|e| CliError::data(format!("writing CSV: {e}")))?;
    }
    w.flush()?;
    Ok(())
}

/// Fixed-width text table.
pub struct TextTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl TextTable {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    pub fn write(&self, out: &mut dyn Write) -> io::Result<()> {
        let mut widths: Vec<usize> = self.header.iter().map(String::len).collect();
        for r in &self.rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |cells: &[String]| {
            cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect::<Vec<_>>().join("  ")
        };
        writeln!(out, "{}", line(&self.header))?;
        for r in &self.rows {
            writeln!(out, "{}", line(r))?;
        }
        Ok(())
    }
}

/// Four significant decimals for text output; non-finite values as `inf`.
pub fn num(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else if v != 0.0 && v.abs() < 1e-3 {
        format!("{v:.3e}")
    } else {
        format!("{v:.4}")
    }
}

pub fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}
