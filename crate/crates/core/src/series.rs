//! Sampled trajectories with metadata.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// A table whose first column is the strictly increasing abscissa (usually time).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TimeSeries {
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
    metadata: BTreeMap<String, String>,
}

impl TimeSeries {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Result<Self> {
        let columns: Vec<String> = columns.into_iter().map(Into::into).collect();
        if columns.is_empty() {
            return Err(Error::Series("a series needs at least one column".into()));
        }
        Ok(TimeSeries { columns, rows: Vec::new(), metadata: BTreeMap::new() })
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::Series(format!(
                "row has {} values, header has {}",
                row.len(),
                self.columns.len()
            )));
        }
        if let Some(last) = self.rows.last() {
            if !(row[0] > last[0]) {
                return Err(Error::Series(format!(
                    "{} must be strictly increasing ({} after {})",
                    self.columns[0], row[0], last[0]
                )));
            }
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn set_meta(&mut self, key: impl Into<String>, value: impl ToString) {
        self.metadata.insert(key.into(), value.to_string());
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.get(key).map(String::as_str)
    }

    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }
}

/// `samples` evenly spaced points on `[0, t_max]`, both ends included.
pub fn linspace(t_max: f64, samples: usize) -> Vec<f64> {
    match samples {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..samples).map(|k| t_max * k as f64 / (samples - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_rows() {
        let mut s = TimeSeries::new(["t", "x"]).unwrap();
        s.push(vec![0.0, 1.0]).unwrap();
        assert!(s.push(vec![0.0, 2.0]).is_err());
        assert!(s.push(vec![1.0]).is_err());
        s.push(vec![1.0, 2.0]).unwrap();
        assert_eq!(s.column("x"), Some(vec![1.0, 2.0]));
        assert_eq!(s.column("y"), None);
        assert!(TimeSeries::new(Vec::<String>::new()).is_err());
    }

    #[test]
    fn linspace_endpoints() {
        assert_eq!(linspace(1.0, 3), vec![0.0, 0.5, 1.0]);
        assert_eq!(linspace(1.0, 1), vec![0.0]);
        assert!(linspace(1.0, 0).is_empty());
    }
}
