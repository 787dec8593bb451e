//! Equal-width histograms for figure data.

use std::io::Write;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    lo: f64,
    hi: f64,
    counts: Vec<u64>,
}

impl Histogram {
    /// Bins span `[min, max]` of the finite values. A degenerate range is
    /// widened to `[v - 0.5, v + 0.5]`.
    pub fn from_values(values: &[f64], bins: usize) -> Result<Self> {
        if bins < 2 {
            return Err(Error::InvalidArgument(format!("need at least 2 bins, got {bins}")));
        }
        let (mut lo, mut hi) = values
            .iter()
            .filter(|v| v.is_finite())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        if lo > hi {
            return Err(Error::Degenerate("no finite values to bin".into()));
        }
        if lo == hi {
            lo -= 0.5;
            hi += 0.5;
        }
        Self::with_range(values, bins, lo, hi)
    }

    /// Values outside `[lo, hi]` are ignored; `hi` falls in the last bin.
    pub fn with_range(values: &[f64], bins: usize, lo: f64, hi: f64) -> Result<Self> {
        if bins < 2 || !(hi > lo) {
            return Err(Error::InvalidArgument(format!("bad histogram range [{lo}, {hi}] x {bins}")));
        }
        let mut counts = vec![0u64; bins];
        let width = (hi - lo) / bins as f64;
        for &v in values {
            if !(lo..=hi).contains(&v) {
                continue;
            }
            let b = (((v - lo) / width) as usize).min(bins - 1);
            counts[b] += 1;
        }
        Ok(Self { lo, hi, counts })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.bins() as f64
    }

    pub fn edges(&self, b: usize) -> (f64, f64) {
        let w = self.width();
        (self.lo + b as f64 * w, if b + 1 == self.bins() { self.hi } else { self.lo + (b + 1) as f64 * w })
    }

    /// Index of the fullest bin, and whether no other bin ties with it.
    pub fn mode(&self) -> (usize, bool) {
        let max = *self.counts.iter().max().unwrap_or(&0);
        let first = self.counts.iter().position(|&c| c == max).unwrap_or(0);
        let unique = self.counts.iter().filter(|&&c| c == max).count() == 1;
        (first, unique)
    }

    /// CSV `bin_left,bin_right,count` with a header row.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "bin_left,bin_right,count")?;
        for (b, c) in self.counts.iter().enumerate() {
            let (l, r) = self.edges(b);
            writeln!(w, "{l},{r},{c}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_value_lands_in_one_bin() {
        for bins in [2, 3, 10] {
            let h = Histogram::from_values(&[3.7], bins).unwrap();
            assert_eq!(h.total(), 1);
            assert_eq!(h.counts().iter().filter(|&&c| c > 0).count(), 1);
        }
    }

    #[test]
    fn two_values_two_bins() {
        let h = Histogram::from_values(&[0.0, 1.0], 2).unwrap();
        assert_eq!(h.counts(), &[1, 1]);
        assert!(!h.mode().1);
        assert!(Histogram::from_values(&[0.0, 1.0], 1).is_err());
    }

    #[test]
    fn csv_layout() {
        let h = Histogram::from_values(&[0.0, 0.25, 1.0], 2).unwrap();
        let mut buf = Vec::new();
        h.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "bin_left,bin_right,count\n0,0.5,2\n0.5,1,1\n");
        assert_eq!(h.mode(), (0, true));
    }
}
