//! Numeric result tables and their CSV form: leading `#` metadata lines
//! (including a config echo that reproduces the run), a header row, then one
//! line per grid point. Cells use shortest round-trip formatting, so a table
//! re-read from disk is bit-identical to the one written.

use super::HarnessError;
use std::path::Path;

const CONFIG_BEGIN: &str = "--- config ---";
const CONFIG_END: &str = "--- end config ---";

/// Column-labelled numeric rows plus run metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Freeform `key = value` metadata (build id, summary flags).
    pub info: Vec<(String, String)>,
    /// Config-format text reproducing the run.
    pub config_echo: String,
}

impl ResultTable {
    pub fn new(columns: &[&str], config_echo: String) -> Self {
        let info = vec![(
            "build".to_string(),
            format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION")),
        )];
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            info,
            config_echo,
        }
    }

    pub fn push_row(&mut self, row: Vec<f64>) -> Result<(), HarnessError> {
        if row.len() != self.columns.len() {
            return Err(HarnessError::Numerics(format!(
                "row width {} does not match {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn add_info(&mut self, key: &str, value: impl std::fmt::Display) {
        self.info.push((key.to_string(), value.to_string()));
    }

    pub fn info_value(&self, key: &str) -> Option<&str> {
        self.info
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Column count, finite-or-infinite cells (NaN never leaves the
    /// harness), and a parseable config echo.
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.columns.is_empty() {
            return Err(HarnessError::Numerics("table has no columns".to_string()));
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != self.columns.len() {
                return Err(HarnessError::Numerics(format!(
                    "row {i} has width {} instead of {}",
                    row.len(),
                    self.columns.len()
                )));
            }
            if let Some(j) = row.iter().position(|x| x.is_nan()) {
                return Err(HarnessError::Numerics(format!(
                    "row {i}, column `{}` is NaN",
                    self.columns[j]
                )));
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (key, value) in &self.info {
            out.push_str(&format!("# {key} = {value}\n"));
        }
        out.push_str(&format!("# {CONFIG_BEGIN}\n"));
        for line in self.config_echo.lines() {
            out.push_str(&format!("# {line}\n"));
        }
        out.push_str(&format!("# {CONFIG_END}\n"));
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|x| format!("{x}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), HarnessError> {
        std::fs::write(path, self.to_csv()).map_err(|e| {
            HarnessError::Config(format!("cannot write {}: {e}", path.display()))
        })
    }

    pub fn from_csv(text: &str) -> Result<Self, HarnessError> {
        let bad = |msg: String| HarnessError::Numerics(msg);
        let mut info = Vec::new();
        let mut config_echo = String::new();
        let mut in_config = false;
        let mut columns: Option<Vec<String>> = None;
        let mut rows = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            if let Some(meta) = line.strip_prefix('#') {
                let meta = meta.strip_prefix(' ').unwrap_or(meta);
                if meta == CONFIG_BEGIN {
                    in_config = true;
                } else if meta == CONFIG_END {
                    in_config = false;
                } else if in_config {
                    config_echo.push_str(meta);
                    config_echo.push('\n');
                } else if let Some((key, value)) = meta.split_once(" = ") {
                    info.push((key.to_string(), value.to_string()));
                } else {
                    return Err(bad(format!("line {}: malformed metadata", ln + 1)));
                }
                continue;
            }
            match &columns {
                None => columns = Some(line.split(',').map(|c| c.to_string()).collect()),
                Some(cols) => {
                    let row: Result<Vec<f64>, _> = line
                        .split(',')
                        .map(|c| {
                            c.parse::<f64>()
                                .map_err(|_| bad(format!("line {}: bad cell `{c}`", ln + 1)))
                        })
                        .collect();
                    let row = row?;
                    if row.len() != cols.len() {
                        return Err(bad(format!("line {}: wrong column count", ln + 1)));
                    }
                    rows.push(row);
                }
            }
        }
        let columns = columns.ok_or_else(|| bad("missing header row".to_string()))?;
        let table = Self {
            columns,
            rows,
            info,
            config_echo,
        };
        table.validate()?;
        Ok(table)
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// One column as a vector, by name.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }
}

/// Pairwise (cascade) summation: deterministic for a fixed element order and
/// accurate to O(log n) rounding growth, so totals do not depend on how
/// trials were scheduled across threads.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_table() -> ResultTable {
        let mut t = ResultTable::new(&["x", "y"], "experiment = \"crlb-map\"\n".to_string());
        t.push_row(vec![0.0, 1.5]).unwrap();
        t.push_row(vec![1.0, f64::INFINITY]).unwrap();
        t.add_info("flag", true);
        t
    }

    #[test]
    fn csv_round_trips_bit_for_bit() {
        let t = sample_table();
        let text = t.to_csv();
        let back = ResultTable::from_csv(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.to_csv(), text);
    }

    #[test]
    fn infinities_are_encoded_as_inf() {
        let text = sample_table().to_csv();
        let data_line = text.lines().last().unwrap();
        assert_eq!(data_line, "1,inf");
    }

    #[test]
    fn metadata_lines_lead_with_hash() {
        let text = sample_table().to_csv();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("# build = "));
        let header_pos = text.lines().position(|l| l == "x,y").unwrap();
        assert!(text.lines().take(header_pos).all(|l| l.starts_with("# ")));
    }

    #[test]
    fn config_echo_is_recovered() {
        let t = sample_table();
        let back = ResultTable::from_csv(&t.to_csv()).unwrap();
        assert_eq!(back.config_echo, "experiment = \"crlb-map\"\n");
        assert_eq!(back.info_value("flag"), Some("true"));
    }

    #[test]
    fn validation_rejects_ragged_rows_and_nan() {
        let mut t = sample_table();
        assert!(t.push_row(vec![1.0]).is_err());
        t.rows[0][1] = f64::NAN;
        assert!(t.validate().is_err());
        assert!(ResultTable::from_csv("x,y\n1,2,3\n").is_err());
        assert!(ResultTable::from_csv("x,y\n1,abc\n").is_err());
        assert!(ResultTable::from_csv("# stray words\nx,y\n").is_err());
    }

    #[test]
    fn column_access_by_name() {
        let t = sample_table();
        assert_eq!(t.column("x").unwrap(), vec![0.0, 1.0]);
        assert!(t.column("z").is_none());
    }

    #[test]
    fn pairwise_sum_matches_exact_sums() {
        let xs: Vec<f64> = (1..=1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 500_500.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
        assert_eq!(pairwise_sum(&[3.5]), 3.5);
        // invariance under the split points actually used by chunked sums
        let ys: Vec<f64> = (0..513).map(|i| (i as f64 * 0.7).sin() / 3.0).collect();
        let total = pairwise_sum(&ys);
        assert_eq!(pairwise_sum(&ys[..]), total);
    }
}
