//! Dense embedding matrices with a row label per word or node.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read, Write};

use ndarray::{Array2, ArrayView1};

use crate::error::{Error, Result};

/// `n × d` matrix, one row per word or graph node.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    labels: Vec<String>,
    data: Array2<f64>,
}

impl EmbeddingMatrix {
    pub fn new(labels: Vec<String>, data: Array2<f64>) -> Result<Self> {
        let (n, d) = data.dim();
        if n == 0 || d == 0 {
            return Err(Error::InvalidArgument(format!("embedding must be non-empty, got {n}x{d}")));
        }
        if labels.len() != n {
            return Err(Error::DimensionMismatch(format!("{} labels for {n} rows", labels.len())));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("embedding contains non-finite entries".into()));
        }
        Ok(Self { labels, data })
    }

    /// Rows labelled by their index, as used for graph nodes.
    pub fn with_index_labels(data: Array2<f64>) -> Result<Self> {
        let labels = (0..data.nrows()).map(|i| i.to_string()).collect();
        Self::new(labels, data)
    }

    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    pub fn dim(&self) -> usize {
        self.data.ncols()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn data(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn into_data(self) -> Array2<f64> {
        self.data
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.data.row(i)
    }

    pub fn relabel(self, labels: Vec<String>) -> Result<Self> {
        Self::new(labels, self.data)
    }

    /// Row index by label, built on demand.
    pub fn index(&self) -> std::collections::HashMap<&str, usize> {
        self.labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect()
    }

    /// Header `n d`, then `label v1 … vd` per row with 9 significant digits.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{} {}", self.n(), self.dim())?;
        let mut line = String::new();
        for (label, row) in self.labels.iter().zip(self.data.rows()) {
            line.clear();
            line.push_str(label);
            for v in row {
                let _ = write!(line, " {v:.8e}");
            }
            line.push('\n');
            w.write_all(line.as_bytes())?;
        }
        Ok(())
    }

    pub fn read_text<R: Read>(r: R, path: &str) -> Result<Self> {
        let mut lines = BufReader::new(r).lines();
        let header = lines.next().ok_or_else(|| Error::parse(path, 1, "missing 'n d' header"))??;
        let hdr: Vec<&str> = header.split_whitespace().collect();
        let [n, d] = hdr.as_slice() else {
            return Err(Error::parse(path, 1, "expected 'n d' header"));
        };
        let n: usize = n.parse().map_err(|_| Error::parse(path, 1, "bad row count"))?;
        let d: usize = d.parse().map_err(|_| Error::parse(path, 1, "bad dimension"))?;
        let mut labels = Vec::with_capacity(n);
        let mut values = Vec::with_capacity(n * d);
        for (k, line) in lines.enumerate() {
            let line = line?;
            let lineno = k + 2;
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split(' ');
            let label = parts.next().unwrap_or_default();
            let before = values.len();
            for p in parts {
                values.push(p.parse::<f64>().map_err(|e| Error::parse(path, lineno, e.to_string()))?);
            }
            if values.len() - before != d {
                return Err(Error::parse(path, lineno, format!("expected {d} values")));
            }
            labels.push(label.to_owned());
        }
        if labels.len() != n {
            return Err(Error::parse(path, 0, format!("header says {n} rows, found {}", labels.len())));
        }
        let data = Array2::from_shape_vec((n, d), values).map_err(|e| Error::parse(path, 0, e.to_string()))?;
        Self::new(labels, data)
    }
}
