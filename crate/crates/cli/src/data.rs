use std::path::Path;

use nflp::{Data, Dataset, Matrix};

use crate::error::{CliError, Result};

/// A CSV file with a header row, addressed by column name.
pub struct Table {
    headers: Vec<String>,
    records: Vec<csv::StringRecord>,
    /// File line of each record, for error messages.
    lines: Vec<u64>,
}

const MAX_LISTED_ROWS: usize = 10;

impl Table {
    pub fn read(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| CliError::data(format!("cannot open {}: {e}", path.display())))?;
        let headers: Vec<String> = reader
            .headers()
            .map_err(|e| CliError::data(format!("{}: header: {e}", path.display())))?
            .iter()
            .map(str::to_owned)
            .collect();
        if headers.iter().all(String::is_empty) {
            return Err(CliError::data(format!("{}: empty header row", path.display())));
        }
        let mut records = Vec::new();
        let mut lines = Vec::new();
        for rec in reader.records() {
            let rec = rec.map_err(|e| {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                CliError::data(format!("{}: line {line}: {e}", path.display()))
            })?;
            lines.push(rec.position().map(|p| p.line()).unwrap_or(0));
            records.push(rec);
        }
        if records.is_empty() {
            return Err(CliError::data(format!("{}: no data rows", path.display())));
        }
        Ok(Self { headers, records, lines })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    /// File line of data row `i` (0-based).
    pub fn line(&self, i: usize) -> u64 {
        self.lines[i]
    }

    fn index(&self, name: &str) -> Result<usize> {
        self.headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::data(format!("no column named '{name}' (columns: {})", self.headers.join(", "))))
    }

    pub fn text_column(&self, name: &str) -> Result<Vec<String>> {
        let j = self.index(name)?;
        let mut bad = Vec::new();
        let out = self
            .records
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let v = r.get(j).unwrap_or("");
                if v.is_empty() {
                    bad.push(self.lines[i]);
                }
                v.to_owned()
            })
            .collect();
        if !bad.is_empty() {
            return Err(CliError::data(format!("column '{name}': missing values on lines {}", list(&bad))));
        }
        Ok(out)
    }

    /// Parses several numeric columns, rejecting every row in which any of
    /// them is missing or not a finite number.
    pub fn numeric_columns(&self, names: &[&str]) -> Result<Vec<Vec<f64>>> {
        let idx = names.iter().map(|n| self.index(n)).collect::<Result<Vec<_>>>()?;
        let mut cols = vec![Vec::with_capacity(self.len()); names.len()];
        let mut bad: Vec<u64> = Vec::new();
        let mut first_problem = None;
        for (i, rec) in self.records.iter().enumerate() {
            let mut row_ok = true;
            for (k, &j) in idx.iter().enumerate() {
                let raw = rec.get(j).unwrap_or("");
                match parse_number(raw) {
                    Some(v) => cols[k].push(v),
                    None => {
                        row_ok = false;
                        first_problem.get_or_insert_with(|| {
                            if raw.is_empty() {
                                format!("missing value in '{}'", names[k])
                            } else {
                                format!("'{raw}' in '{}' is not a finite number", names[k])
                            }
                        });
                    }
                }
            }
            if !row_ok {
                bad.push(self.lines[i]);
            }
        }
        if let Some(problem) = first_problem {
            return Err(CliError::data(format!("rejected rows on lines {} (first: {problem})", list(&bad))));
        }
        Ok(cols)
    }

    pub fn dataset(&self, response: &str, covariates: &[String], intercept: bool) -> Result<Data> {
        let mut names: Vec<&str> = vec![response];
        names.extend(covariates.iter().map(String::as_str));
        let mut cols = self.numeric_columns(&names)?;
        let y = cols.remove(0);
        let n = y.len();
        let p = covariates.len() + usize::from(intercept);
        let mut x = Matrix::zeros(n, p);
        let offset = usize::from(intercept);
        for i in 0..n {
            if intercept {
                x[(i, 0)] = 1.0;
            }
            for (k, c) in cols.iter().enumerate() {
                x[(i, k + offset)] = c[i];
            }
        }
        let mut col_names = Vec::with_capacity(p);
        if intercept {
            col_names.push("(intercept)".to_owned());
        }
        col_names.extend(covariates.iter().cloned());
        Ok(Dataset::new(x, y, col_names, intercept)?)
    }
}

/// Dot-decimal numbers only, independent of locale; rejects NaN and
/// infinities.
fn parse_number(raw: &str) -> Option<f64> {
    raw.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn list(lines: &[u64]) -> String {
    let mut s: Vec<String> = lines.iter().take(MAX_LISTED_ROWS).map(u64::to_string).collect();
    if lines.len() > MAX_LISTED_ROWS {
        s.push(format!("... ({} rows)", lines.len()));
    }
    s.join(", ")
}
