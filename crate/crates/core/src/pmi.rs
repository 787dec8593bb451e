//! PMI, shifted PMI and squashed shifted PMI (σSPMI) over observed pairs.

use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};
use std::str::FromStr;

use crate::corpus::CooccurrenceCounts;
use crate::error::{Error, Result};
use crate::histogram::Histogram;
use crate::math::sigmoid;
use crate::spectral::{CsrMatrix, SymmetricOperator};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreKind {
    Pmi,
    Spmi,
    SigmaSpmi,
}

impl fmt::Display for ScoreKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScoreKind::Pmi => "PMI",
            ScoreKind::Spmi => "SPMI",
            ScoreKind::SigmaSpmi => "SigmaSPMI",
        })
    }
}

impl FromStr for ScoreKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "PMI" => Ok(ScoreKind::Pmi),
            "SPMI" => Ok(ScoreKind::Spmi),
            "SigmaSPMI" => Ok(ScoreKind::SigmaSpmi),
            _ => Err(Error::InvalidArgument(format!("unknown matrix kind {s:?}"))),
        }
    }
}

/// Scores over the support `#(i, j) > 0`. Unobserved pairs are absent, which
/// for σSPMI means exactly 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseScoreMatrix {
    kind: ScoreKind,
    shift_k: f64,
    matrix: CsrMatrix,
}

impl SparseScoreMatrix {
    pub fn kind(&self) -> ScoreKind {
        self.kind
    }

    pub fn shift_k(&self) -> f64 {
        self.shift_k
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub fn nnz(&self) -> usize {
        self.matrix.nnz()
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn values(&self) -> &[f64] {
        self.matrix.values()
    }

    pub fn get(&self, i: u32, j: u32) -> Option<f64> {
        self.matrix.get(i, j)
    }

    /// Header `kind n shift_k`, then `i<TAB>j<TAB>value` for `i <= j`.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{} {} {}", self.kind, self.n(), self.shift_k)?;
        for (i, j, v) in self.matrix.triples().filter(|t| t.0 <= t.1) {
            writeln!(w, "{i}\t{j}\t{v}")?;
        }
        Ok(())
    }

    pub fn read_tsv<R: Read>(r: R, path: &str) -> Result<Self> {
        let mut lines = BufReader::new(r).lines();
        let header = lines.next().ok_or_else(|| Error::parse(path, 1, "missing header"))??;
        let h: Vec<&str> = header.split_whitespace().collect();
        let [kind, n, k] = h.as_slice() else {
            return Err(Error::parse(path, 1, "expected 'kind n shift_k'"));
        };
        let kind: ScoreKind = kind.parse().map_err(|e: Error| Error::parse(path, 1, e.to_string()))?;
        let n: usize = n.parse().map_err(|_| Error::parse(path, 1, "bad n"))?;
        let shift_k: f64 = k.parse().map_err(|_| Error::parse(path, 1, "bad shift_k"))?;
        let mut triples = Vec::new();
        for (k, line) in lines.enumerate() {
            let line = line?;
            let lineno = k + 2;
            let f: Vec<&str> = line.split('\t').collect();
            let [i, j, v] = f.as_slice() else {
                return Err(Error::parse(path, lineno, "expected i<TAB>j<TAB>value"));
            };
            let i: u32 = i.parse().map_err(|_| Error::parse(path, lineno, "bad i"))?;
            let j: u32 = j.parse().map_err(|_| Error::parse(path, lineno, "bad j"))?;
            let v: f64 = v.parse().map_err(|_| Error::parse(path, lineno, "bad value"))?;
            if i > j {
                return Err(Error::parse(path, lineno, "expected i <= j"));
            }
            triples.push((i, j, v));
            if i != j {
                triples.push((j, i, v));
            }
        }
        triples.sort_by_key(|t| (t.0, t.1));
        let matrix = CsrMatrix::from_sorted_triples(n, triples).map_err(|e| Error::parse(path, 0, e.to_string()))?;
        Ok(Self { kind, shift_k, matrix })
    }
}

impl SymmetricOperator for SparseScoreMatrix {
    fn dim(&self) -> usize {
        self.matrix.n()
    }

    fn apply_block(&self, x: &ndarray::Array2<f64>) -> ndarray::Array2<f64> {
        self.matrix.apply_block(x)
    }
}

/// `log p(i,j) / (p(i) p(j))` for every observed pair, with marginals taken
/// from the co-occurrence row sums. Computed in log space.
pub fn pmi_matrix(counts: &CooccurrenceCounts) -> Result<SparseScoreMatrix> {
    if counts.is_empty() {
        return Err(Error::EmptyCorpus("no co-occurrences to score".into()));
    }
    let log_total = (counts.total() as f64).ln();
    let log_rows: Vec<f64> = counts.row_sums().iter().map(|&s| (s as f64).ln()).collect();
    let triples = counts.entries().iter().map(|&(i, j, c)| {
        // Same operand order for (i, j) and (j, i) keeps the matrix exactly symmetric.
        let (a, b) = (i.min(j) as usize, i.max(j) as usize);
        let v = (c as f64).ln() + log_total - log_rows[a] - log_rows[b];
        (i, j, v)
    });
    Ok(SparseScoreMatrix {
        kind: ScoreKind::Pmi,
        shift_k: 1.0,
        matrix: CsrMatrix::from_sorted_triples(counts.n(), triples)?,
    })
}

/// Subtracts `log k` from every stored PMI value.
pub fn shift(mut m: SparseScoreMatrix, k: f64) -> Result<SparseScoreMatrix> {
    if m.kind != ScoreKind::Pmi {
        return Err(Error::InvalidArgument(format!("shift expects a PMI matrix, got {}", m.kind)));
    }
    if !(k > 0.0) {
        return Err(Error::InvalidArgument(format!("shift k must be > 0, got {k}")));
    }
    let lk = k.ln();
    m.matrix.values_mut().iter_mut().for_each(|v| *v -= lk);
    m.kind = ScoreKind::Spmi;
    m.shift_k = k;
    Ok(m)
}

/// Elementwise logistic sigmoid of a shifted PMI matrix.
pub fn sigma_spmi(mut m: SparseScoreMatrix) -> Result<SparseScoreMatrix> {
    if m.kind != ScoreKind::Spmi {
        return Err(Error::InvalidArgument(format!("sigma_spmi expects an SPMI matrix, got {}", m.kind)));
    }
    m.matrix.values_mut().iter_mut().for_each(|v| *v = sigmoid(*v));
    m.kind = ScoreKind::SigmaSpmi;
    Ok(m)
}

/// Equal-width histogram of the stored values.
pub fn pmi_histogram(m: &SparseScoreMatrix, bins: usize) -> Result<Histogram> {
    Histogram::from_values(m.values(), bins)
}
