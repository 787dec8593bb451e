//! The method × benchmark results table.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Sgns,
    PmiSvd,
    SigmaSpmiSvd,
    RhgSvdAlign,
    RandomAlign,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Sgns,
        Method::PmiSvd,
        Method::SigmaSpmiSvd,
        Method::RhgSvdAlign,
        Method::RandomAlign,
    ];

    /// Short id used in file names and score files.
    pub fn id(self) -> &'static str {
        match self {
            Method::Sgns => "sgns",
            Method::PmiSvd => "pmi-svd",
            Method::SigmaSpmiSvd => "sigmaspmi-svd",
            Method::RhgSvdAlign => "rhg-svd-align",
            Method::RandomAlign => "random-align",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Method::Sgns => "SGNS",
            Method::PmiSvd => "PMI + SVD",
            Method::SigmaSpmiSvd => "sigmaSPMI + SVD",
            Method::RhgSvdAlign => "RHG + SVD + Align",
            Method::RandomAlign => "Random + Align",
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.id() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method {s:?}")))
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    Ws353,
    Men,
    MTurk,
    Conll2000,
    Brown,
}

impl Metric {
    pub const ALL: [Metric; 5] = [Metric::Ws353, Metric::Men, Metric::MTurk, Metric::Conll2000, Metric::Brown];

    pub fn id(self) -> &'static str {
        match self {
            Metric::Ws353 => "WS353",
            Metric::Men => "MEN",
            Metric::MTurk => "MTurk",
            Metric::Conll2000 => "CoNLL-2000",
            Metric::Brown => "Brown",
        }
    }

    /// Similarity columns hold Spearman correlations, tagging columns hold
    /// accuracy in percent.
    pub fn is_similarity(self) -> bool {
        matches!(self, Metric::Ws353 | Metric::Men | Metric::MTurk)
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.id() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown metric {s:?}")))
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultsTable {
    cells: [[Option<f64>; 5]; 5],
}

impl ResultsTable {
    pub fn set(&mut self, method: Method, metric: Metric, value: f64) {
        self.cells[method as usize][metric as usize] = Some(value);
    }

    pub fn get(&self, method: Method, metric: Metric) -> Option<f64> {
        self.cells[method as usize][metric as usize]
    }

    /// Header `method,WS353,MEN,MTurk,CoNLL-2000,Brown`; one row per method,
    /// empty cells where no score was produced.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let head: Vec<&str> = Metric::ALL.iter().map(|m| m.id()).collect();
        writeln!(w, "method,{}", head.join(","))?;
        for m in Method::ALL {
            let cells: Vec<String> = Metric::ALL
                .iter()
                .map(|&k| match self.get(m, k) {
                    Some(v) if k.is_similarity() => format!("{v:.3}"),
                    Some(v) => format!("{v:.2}"),
                    None => String::new(),
                })
                .collect();
            writeln!(w, "{},{}", m.label(), cells.join(","))?;
        }
        Ok(())
    }
}
