//! Degree and clustering statistics of realized graphs.

use super::rhg::Rhg;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct GraphStats {
    pub mean_degree: f64,
    /// `(degree, number of nodes)` for every degree present, ascending.
    pub degree_histogram: Vec<(usize, usize)>,
    pub power_law: PowerLawFit,
    /// Mean local clustering over nodes of degree ≥ 2.
    pub mean_clustering: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub kmin: usize,
    pub tail_size: usize,
    /// KS distance between the tail and the fitted law.
    pub ks: f64,
}

/// Smallest tail considered when scanning `kmin`.
const MIN_TAIL: usize = 50;

/// Discrete power-law fit: for each candidate `kmin` the exponent is the
/// approximate MLE `1 + m / Σ ln(k / (kmin − ½))`; the `kmin` whose tail
/// has the smallest KS distance to its fit wins.
pub fn fit_power_law(degrees: &[usize]) -> Result<PowerLawFit> {
    let mut ks: Vec<usize> = degrees.iter().copied().filter(|&k| k > 0).collect();
    ks.sort_unstable();
    if ks.len() < MIN_TAIL {
        return Err(Error::Degenerate(format!("need at least {MIN_TAIL} positive degrees, got {}", ks.len())));
    }
    let mut candidates: Vec<usize> = ks.clone();
    candidates.dedup();
    let mut best: Option<PowerLawFit> = None;
    for &kmin in &candidates {
        let start = ks.partition_point(|&k| k < kmin);
        let tail = &ks[start..];
        let m = tail.len();
        if m < MIN_TAIL {
            break;
        }
        let shift = kmin as f64 - 0.5;
        let denom: f64 = tail.iter().map(|&k| (k as f64 / shift).ln()).sum();
        if denom <= 0.0 {
            continue;
        }
        let exponent = 1.0 + m as f64 / denom;
        // CCDF comparison at each distinct tail degree
        let mut d = 0.0f64;
        let mut i = 0;
        while i < m {
            let k = tail[i];
            let emp = (m - i) as f64 / m as f64;
            let fit = ((k as f64 - 0.5) / shift).powf(1.0 - exponent);
            d = d.max((emp - fit).abs());
            while i < m && tail[i] == k {
                i += 1;
            }
        }
        if best.is_none_or(|b| d < b.ks) {
            best = Some(PowerLawFit { exponent, kmin, tail_size: m, ks: d });
        }
    }
    best.ok_or_else(|| Error::Degenerate("no admissible kmin".into()))
}

/// Local clustering `2 T_v / (k_v (k_v − 1))` for each node; `None` below
/// degree 2.
pub fn local_clustering(adj: &[Vec<u32>]) -> Vec<Option<f64>> {
    adj.iter()
        .map(|nb| {
            let k = nb.len();
            if k < 2 {
                return None;
            }
            let mut links = 0usize;
            for (a, &u) in nb.iter().enumerate() {
                let nu = &adj[u as usize];
                // neighbours of v after u that are also neighbours of u
                links += count_common(&nb[a + 1..], nu);
            }
            Some(2.0 * links as f64 / (k * (k - 1)) as f64)
        })
        .collect()
}

fn count_common(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

pub fn graph_stats(g: &Rhg) -> Result<GraphStats> {
    stats_from_adjacency(&g.adjacency())
}

pub fn stats_from_adjacency(adj: &[Vec<u32>]) -> Result<GraphStats> {
    if adj.is_empty() {
        return Err(Error::Degenerate("empty graph".into()));
    }
    let degrees: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mean_degree = degrees.iter().sum::<usize>() as f64 / adj.len() as f64;
    let mut hist = std::collections::BTreeMap::new();
    for &k in &degrees {
        *hist.entry(k).or_insert(0usize) += 1;
    }
    let cc: Vec<f64> = local_clustering(adj).into_iter().flatten().collect();
    let mean_clustering = if cc.is_empty() { 0.0 } else { cc.iter().sum::<f64>() / cc.len() as f64 };
    let power_law = fit_power_law(&degrees).unwrap_or(PowerLawFit {
        exponent: f64::NAN,
        kmin: 0,
        tail_size: 0,
        ks: f64::NAN,
    });
    Ok(GraphStats {
        mean_degree,
        degree_histogram: hist.into_iter().collect(),
        power_law,
        mean_clustering,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn triangle() {
        let adj = vec![vec![1, 2], vec![0, 2], vec![0, 1]];
        let s = stats_from_adjacency(&adj).unwrap();
        assert_eq!(s.mean_degree, 2.0);
        assert_eq!(s.mean_clustering, 1.0);
    }

    #[test]
    fn star() {
        let adj = vec![vec![1, 2, 3], vec![0], vec![0], vec![0]];
        let s = stats_from_adjacency(&adj).unwrap();
        assert_eq!(s.mean_clustering, 0.0);
        assert_eq!(s.mean_degree, 1.5);
        assert_eq!(s.degree_histogram, vec![(1, 3), (3, 1)]);
        assert!(s.power_law.exponent.is_nan());
    }

    #[test]
    fn square_with_diagonal() {
        // 0-1-2-3-0 plus 0-2: nodes 1 and 3 have C = 1, nodes 0 and 2 have C = 2/3
        let adj = vec![vec![1, 2, 3], vec![0, 2], vec![0, 1, 3], vec![0, 2]];
        let c = local_clustering(&adj);
        assert_eq!(c[1], Some(1.0));
        assert!((c[0].unwrap() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn recovers_planted_exponent() {
        // Discrete power law with exponent 2.5 via inverse transform on the
        // continuous approximation.
        let mut rng = crate::rng::rng_from_seed(8);
        let degrees: Vec<usize> = (0..20_000)
            .map(|_| {
                let u: f64 = rng.random();
                ((3.0 - 0.5) * (1.0 - u).powf(-1.0 / 1.5) + 0.5).floor() as usize
            })
            .collect();
        let fit = fit_power_law(&degrees).unwrap();
        assert!((fit.exponent - 2.5).abs() < 0.1, "{fit:?}");
    }
}
