//! Corpus ingestion: vocabulary, frequent-word subsampling and windowed
//! co-occurrence counting.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::pair_uniform;

/// Marker for a token position that is not in the vocabulary.
pub const OOV: u32 = u32::MAX;

/// Positions per counting chunk. Chunking never changes the result.
const COUNT_CHUNK: usize = 1 << 20;

/// Token ↔ id bijection with raw corpus frequencies. Ids are dense, 0-based
/// and ordered by descending frequency with lexicographic tie-breaking.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    counts: Vec<u64>,
    index: HashMap<String, u32>,
}

impl Vocabulary {
    /// Keeps exactly the tokens seen at least `min_count` times.
    pub fn build<I, S>(tokens: I, min_count: u64) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        if min_count == 0 {
            return Err(Error::InvalidArgument("min_count must be >= 1".into()));
        }
        let mut freq: HashMap<String, u64> = HashMap::new();
        for tok in tokens {
            let tok = tok.as_ref();
            if let Some(c) = freq.get_mut(tok) {
                *c += 1;
            } else {
                freq.insert(tok.to_owned(), 1);
            }
        }
        if freq.is_empty() {
            return Err(Error::EmptyCorpus("no tokens in input".into()));
        }
        let mut kept: Vec<(String, u64)> = freq.into_iter().filter(|(_, c)| *c >= min_count).collect();
        if kept.is_empty() {
            return Err(Error::EmptyCorpus(format!(
                "no token occurs at least {min_count} times"
            )));
        }
        kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        Self::from_entries(kept)
    }

    /// Builds from `(token, count)` pairs, keeping their order as the id order.
    pub fn from_entries(entries: Vec<(String, u64)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyCorpus("empty vocabulary".into()));
        }
        if entries.len() >= OOV as usize {
            return Err(Error::InvalidArgument("vocabulary too large".into()));
        }
        let mut index = HashMap::with_capacity(entries.len());
        let mut tokens = Vec::with_capacity(entries.len());
        let mut counts = Vec::with_capacity(entries.len());
        for (id, (tok, c)) in entries.into_iter().enumerate() {
            if index.insert(tok.clone(), id as u32).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate token {tok:?}")));
            }
            tokens.push(tok);
            counts.push(c);
        }
        Ok(Self {
            tokens,
            counts,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    pub fn token(&self, id: u32) -> &str {
        &self.tokens[id as usize]
    }

    pub fn count(&self, id: u32) -> u64 {
        self.counts[id as usize]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Sum of all in-vocabulary counts.
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Maps tokens to ids; unknown tokens become [`OOV`].
    pub fn encode<I, S>(&self, tokens: I) -> Vec<u32>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        tokens
            .into_iter()
            .map(|t| self.id(t.as_ref()).unwrap_or(OOV))
            .collect()
    }

    /// `token<TAB>count`, one line per id.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> Result<()> {
        for (t, c) in self.tokens.iter().zip(&self.counts) {
            writeln!(w, "{t}\t{c}")?;
        }
        Ok(())
    }

    pub fn read_tsv<R: Read>(r: R, path: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (lineno, line) in BufReader::new(r).lines().enumerate() {
            let line = line?;
            let mut parts = line.split('\t');
            let (Some(tok), Some(cnt), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::parse(path, lineno + 1, "expected token<TAB>count"));
            };
            let cnt = cnt
                .parse::<u64>()
                .map_err(|e| Error::parse(path, lineno + 1, e.to_string()))?;
            entries.push((tok.to_owned(), cnt));
        }
        Self::from_entries(entries)
    }
}

/// Reads a whitespace-separated corpus into memory.
pub fn read_corpus(path: &Path) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

/// Probability of discarding one occurrence of a word with relative
/// frequency `freq` under threshold `t`.
#[inline]
pub fn discard_probability(freq: f64, t: f64) -> f64 {
    (1.0 - (t / freq).sqrt()).max(0.0)
}

/// Frequent-word subsampling. Each occurrence of word `w` is dropped with
/// probability `max(0, 1 - sqrt(t / f(w)))`, where `f(w) = count(w) / total`.
/// Out-of-vocabulary positions are always dropped; the remaining stream is
/// closed up before any windowing.
///
/// The draw for position `p` is a pure function of `(seed, p)`.
pub fn subsample(stream: &[u32], vocab: &Vocabulary, t: f64, seed: u64) -> Result<Vec<u32>> {
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!("subsample threshold must be > 0, got {t}")));
    }
    let total = vocab.total() as f64;
    let discard: Vec<f64> = vocab
        .counts()
        .iter()
        .map(|&c| discard_probability(c as f64 / total, t))
        .collect();
    Ok(stream
        .par_iter()
        .enumerate()
        .filter_map(|(pos, &id)| {
            if id == OOV {
                return None;
            }
            let p = discard[id as usize];
            (p == 0.0 || pair_uniform(seed, pos as u64, 0) >= p).then_some(id)
        })
        .collect())
}

/// Sparse symmetric co-occurrence counts `#(i, j)`, stored in both
/// directions and sorted by `(i, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CooccurrenceCounts {
    n: usize,
    window: usize,
    entries: Vec<(u32, u32, u64)>,
    total: u64,
}

impl CooccurrenceCounts {
    /// Builds from canonical `(i <= j, count)` entries. Off-diagonal counts are
    /// mirrored; diagonal entries are taken as-is.
    pub fn from_canonical(n: usize, window: usize, canon: &[(u32, u32, u64)]) -> Result<Self> {
        let mut entries = Vec::with_capacity(canon.len() * 2);
        for &(i, j, c) in canon {
            if i > j {
                return Err(Error::InvalidArgument(format!("non-canonical pair ({i}, {j})")));
            }
            if i as usize >= n || j as usize >= n {
                return Err(Error::InvalidArgument(format!("pair ({i}, {j}) out of range n={n}")));
            }
            if c == 0 {
                continue;
            }
            entries.push((i, j, c));
            if i != j {
                entries.push((j, i, c));
            }
        }
        entries.sort_unstable_by_key(|&(i, j, _)| (i, j));
        for w in entries.windows(2) {
            if (w[0].0, w[0].1) == (w[1].0, w[1].1) {
                return Err(Error::InvalidArgument(format!("duplicate pair ({}, {})", w[0].0, w[0].1)));
            }
        }
        let total = entries.iter().map(|e| e.2).sum();
        Ok(Self {
            n,
            window,
            entries,
            total,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// All stored `(i, j, count)` entries in `(i, j)` order.
    pub fn entries(&self) -> &[(u32, u32, u64)] {
        &self.entries
    }

    pub fn get(&self, i: u32, j: u32) -> u64 {
        self.entries
            .binary_search_by_key(&(i, j), |&(a, b, _)| (a, b))
            .map_or(0, |k| self.entries[k].2)
    }

    /// `Σ_j #(i, j)` for each row.
    pub fn row_sums(&self) -> Vec<u64> {
        let mut sums = vec![0u64; self.n];
        for &(i, _, c) in &self.entries {
            sums[i as usize] += c;
        }
        sums
    }

    /// Triples `i<TAB>j<TAB>count` with `i <= j`, after a `# n <n> window <w>` header.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# n {} window {}", self.n, self.window)?;
        let mut buf = String::new();
        for &(i, j, c) in self.entries.iter().filter(|e| e.0 <= e.1) {
            buf.clear();
            let _ = writeln!(buf, "{i}\t{j}\t{c}");
            w.write_all(buf.as_bytes())?;
        }
        Ok(())
    }

    pub fn read_tsv<R: Read>(r: R, path: &str) -> Result<Self> {
        let mut lines = BufReader::new(r).lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::parse(path, 1, "missing header"))??;
        let h: Vec<&str> = header.split_whitespace().collect();
        let (n, window) = match h.as_slice() {
            ["#", "n", n, "window", w] => (
                n.parse::<usize>().map_err(|e| Error::parse(path, 1, e.to_string()))?,
                w.parse::<usize>().map_err(|e| Error::parse(path, 1, e.to_string()))?,
            ),
            _ => return Err(Error::parse(path, 1, "expected '# n <n> window <w>'")),
        };
        let mut canon = Vec::new();
        for (k, line) in lines.enumerate() {
            let line = line?;
            let lineno = k + 2;
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 3 {
                return Err(Error::parse(path, lineno, "expected i<TAB>j<TAB>count"));
            }
            let perr = |e: std::num::ParseIntError| Error::parse(path, lineno, e.to_string());
            canon.push((
                f[0].parse::<u32>().map_err(perr)?,
                f[1].parse::<u32>().map_err(perr)?,
                f[2].parse::<u64>().map_err(perr)?,
            ));
        }
        Self::from_canonical(n, window, &canon)
            .map_err(|e| Error::parse(path, 0, e.to_string()))
    }
}

#[inline]
fn pack(i: u32, j: u32) -> u64 {
    (u64::from(i) << 32) | u64::from(j)
}

/// Canonical `(min, max)` pair keys for windows whose left endpoint lies in
/// `range`, run-length encoded after sorting.
fn count_range(stream: &[u32], window: usize, range: std::ops::Range<usize>) -> Vec<(u64, u64)> {
    let mut keys = Vec::with_capacity(range.len() * window);
    for t in range {
        let a = stream[t];
        if a == OOV {
            continue;
        }
        for o in 1..=window {
            let Some(&b) = stream.get(t + o) else { break };
            if b == OOV {
                continue;
            }
            keys.push(pack(a.min(b), a.max(b)));
        }
    }
    keys.sort_unstable();
    run_length(keys.into_iter().map(|k| (k, 1)))
}

fn run_length(sorted: impl Iterator<Item = (u64, u64)>) -> Vec<(u64, u64)> {
    let mut out: Vec<(u64, u64)> = Vec::new();
    for (k, c) in sorted {
        match out.last_mut() {
            Some((lk, lc)) if *lk == k => *lc += c,
            _ => out.push((k, c)),
        }
    }
    out
}

fn merge_runs(mut parts: Vec<Vec<(u64, u64)>>) -> Vec<(u64, u64)> {
    if parts.len() == 1 {
        return parts.pop().unwrap_or_default();
    }
    let mut all: Vec<(u64, u64)> = parts.into_iter().flatten().collect();
    all.sort_unstable_by_key(|e| e.0);
    run_length(all.into_iter())
}

fn finish(canonical: Vec<(u64, u64)>, n: usize, window: usize) -> CooccurrenceCounts {
    // Every scanned pair (a, b) increments both #(a, b) and #(b, a), so the
    // diagonal receives twice its canonical count.
    let canon: Vec<(u32, u32, u64)> = canonical
        .into_iter()
        .map(|(k, c)| {
            let (i, j) = ((k >> 32) as u32, k as u32);
            (i, j, if i == j { 2 * c } else { c })
        })
        .collect();
    CooccurrenceCounts::from_canonical(n, window, &canon).expect("canonical pairs are valid")
}

/// Counts co-occurrences within `window` positions. Each in-vocabulary pair
/// of positions `(t, t + o)`, `1 <= o <= window`, adds one to `#(a, b)` and
/// one to `#(b, a)`.
pub fn count_cooccurrences(stream: &[u32], vocab: &Vocabulary, window: usize) -> Result<CooccurrenceCounts> {
    count_cooccurrences_chunked(stream, vocab, window, COUNT_CHUNK)
}

/// Same as [`count_cooccurrences`] with an explicit chunk length. Chunks are
/// counted in parallel and merged; the result does not depend on `chunk`.
pub fn count_cooccurrences_chunked(
    stream: &[u32],
    vocab: &Vocabulary,
    window: usize,
    chunk: usize,
) -> Result<CooccurrenceCounts> {
    if window == 0 {
        return Err(Error::InvalidArgument("window must be >= 1".into()));
    }
    let n = vocab.len();
    if let Some(&bad) = stream.iter().find(|&&id| id != OOV && id as usize >= n) {
        return Err(Error::InvalidArgument(format!("token id {bad} out of range n={n}")));
    }
    let chunk = chunk.max(1);
    let starts: Vec<usize> = (0..stream.len()).step_by(chunk).collect();
    let parts: Vec<Vec<(u64, u64)>> = starts
        .par_iter()
        .map(|&s| count_range(stream, window, s..(s + chunk).min(stream.len())))
        .collect();
    Ok(finish(merge_runs(parts), n, window))
}

/// Smoothed unigram distribution used for negative sampling.
#[derive(Debug, Clone, PartialEq)]
pub struct UnigramDistribution {
    probs: Vec<f64>,
    exponent: f64,
}

impl UnigramDistribution {
    /// `p(i) ∝ count(i)^exponent`.
    pub fn new(vocab: &Vocabulary, exponent: f64) -> Result<Self> {
        Self::from_counts(vocab.counts(), exponent)
    }

    pub fn from_counts(counts: &[u64], exponent: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&exponent) {
            return Err(Error::InvalidArgument(format!("exponent {exponent} outside [0, 1]")));
        }
        if counts.is_empty() || counts.contains(&0) {
            return Err(Error::InvalidArgument("counts must be non-empty and positive".into()));
        }
        let weights: Vec<f64> = counts.iter().map(|&c| (c as f64).powf(exponent)).collect();
        let z: f64 = weights.iter().sum();
        Ok(Self {
            probs: weights.into_iter().map(|w| w / z).collect(),
            exponent,
        })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toks(s: &str) -> Vec<&str> {
        s.split_whitespace().collect()
    }

    #[test]
    fn threshold_filters_rare_tokens() {
        let v = Vocabulary::build(toks("a a b"), 2).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v.count(v.id("a").unwrap()), 2);
        assert_eq!(v.id("b"), None);
    }

    #[test]
    fn ties_broken_lexicographically() {
        let v = Vocabulary::build(toks("b a b a"), 1).unwrap();
        assert_eq!(v.id("a"), Some(0));
        assert_eq!(v.id("b"), Some(1));
        let v = Vocabulary::build(toks("c b b a a a"), 1).unwrap();
        assert_eq!(v.tokens(), &["a", "b", "c"]);
    }

    #[test]
    fn empty_corpus_errors() {
        assert!(matches!(Vocabulary::build(Vec::<&str>::new(), 1), Err(Error::EmptyCorpus(_))));
        assert!(matches!(Vocabulary::build(toks("a b"), 2), Err(Error::EmptyCorpus(_))));
        assert!(matches!(Vocabulary::build(toks("a"), 0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn vocab_tsv_roundtrip() {
        let v = Vocabulary::build(toks("x y y z z z"), 1).unwrap();
        let mut buf = Vec::new();
        v.write_tsv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "z\t3\ny\t2\nx\t1\n");
        assert_eq!(Vocabulary::read_tsv(&buf[..], "v").unwrap(), v);
        assert!(matches!(Vocabulary::read_tsv(&b"a 1\n"[..], "v"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn discard_probabilities() {
        assert_eq!(discard_probability(1e-5, 1e-5), 0.0);
        assert!((discard_probability(4e-5, 1e-5) - 0.5).abs() < 1e-15);
        assert_eq!(discard_probability(1e-7, 1e-5), 0.0);
    }

    #[test]
    fn subsample_keeps_rare_and_drops_oov() {
        let v = Vocabulary::build(toks("a a a b"), 1).unwrap();
        let mut stream = v.encode(toks("a b a zz b a"));
        stream.push(OOV);
        // f(b) = 1/4 <= t keeps every b; a has f = 3/4 > t.
        let out = subsample(&stream, &v, 0.25, 9).unwrap();
        assert_eq!(out.iter().filter(|&&x| x == v.id("b").unwrap()).count(), 2);
        assert!(!out.contains(&OOV));
        assert!(subsample(&stream, &v, 0.0, 9).is_err());
    }

    #[test]
    fn subsample_rate_matches_formula() {
        // f(a) = 0.8, t = 0.2 -> discard 1 - sqrt(0.25) = 0.5
        let v = Vocabulary::from_entries(vec![("a".into(), 8), ("b".into(), 2)]).unwrap();
        let stream = vec![0u32; 200_000];
        let kept = subsample(&stream, &v, 0.2, 1).unwrap().len() as f64 / 200_000.0;
        assert!((kept - 0.5).abs() < 0.005, "{kept}");
    }

    #[test]
    fn one_pair_window() {
        let v = Vocabulary::build(toks("a b"), 1).unwrap();
        let c = count_cooccurrences(&v.encode(toks("a b")), &v, 2).unwrap();
        let (a, b) = (v.id("a").unwrap(), v.id("b").unwrap());
        assert_eq!(c.get(a, b), 1);
        assert_eq!(c.get(b, a), 1);
        assert_eq!(c.total(), 2);
    }

    #[test]
    fn window_one_and_two() {
        let v = Vocabulary::build(toks("a b c"), 1).unwrap();
        let s = v.encode(toks("a b c"));
        let (a, b, cc) = (0, 1, 2);
        let c1 = count_cooccurrences(&s, &v, 1).unwrap();
        assert_eq!((c1.get(a, b), c1.get(b, cc), c1.get(a, cc)), (1, 1, 0));
        assert_eq!(c1.total(), 4);
        let c2 = count_cooccurrences(&s, &v, 2).unwrap();
        assert_eq!((c2.get(a, cc), c2.get(cc, a)), (1, 1));
        assert_eq!(c2.total(), 6);
    }

    #[test]
    fn repeated_word_fills_diagonal() {
        let v = Vocabulary::build(toks("a a"), 1).unwrap();
        let c = count_cooccurrences(&v.encode(toks("a a")), &v, 1).unwrap();
        assert_eq!(c.get(0, 0), 2);
        assert_eq!(c.total(), 2);
    }

    #[test]
    fn oov_positions_are_not_closed_up() {
        let v = Vocabulary::build(toks("a a b b"), 2).unwrap();
        let s = v.encode(toks("a zz b"));
        let c = count_cooccurrences(&s, &v, 1).unwrap();
        assert_eq!(c.total(), 0);
        let c = count_cooccurrences(&s, &v, 2).unwrap();
        assert_eq!(c.get(0, 1), 1);
    }

    #[test]
    fn cooc_tsv_roundtrip() {
        let v = Vocabulary::build(toks("a b c a a b"), 1).unwrap();
        let c = count_cooccurrences(&v.encode(toks("a b c a a b")), &v, 2).unwrap();
        let mut buf = Vec::new();
        c.write_tsv(&mut buf).unwrap();
        assert_eq!(CooccurrenceCounts::read_tsv(&buf[..], "c").unwrap(), c);
    }

    #[test]
    fn unigram_examples() {
        let u = UnigramDistribution::from_counts(&[1, 1], 0.75).unwrap();
        assert_eq!(u.probs(), &[0.5, 0.5]);
        let u = UnigramDistribution::from_counts(&[3, 1], 0.75).unwrap();
        let p0 = 3f64.powf(0.75) / (3f64.powf(0.75) + 1.0);
        assert!((u.probs()[0] - 0.6951).abs() < 1e-4 && (u.probs()[0] - p0).abs() < 1e-15);
        assert!((u.probs()[1] - 0.3049).abs() < 1e-4);
        let u = UnigramDistribution::from_counts(&[10, 3, 7], 0.0).unwrap();
        assert!(u.probs().iter().all(|&p| (p - 1.0 / 3.0).abs() < 1e-15));
        assert!(UnigramDistribution::from_counts(&[1], 1.5).is_err());
    }

    fn brute_force(stream: &[u32], n: usize, window: usize) -> HashMap<(u32, u32), u64> {
        let mut m = HashMap::new();
        for t in 0..stream.len() {
            for o in 1..=window {
                if t + o >= stream.len() {
                    break;
                }
                let (a, b) = (stream[t], stream[t + o]);
                if a == OOV || b == OOV {
                    continue;
                }
                assert!((a as usize) < n && (b as usize) < n);
                *m.entry((a, b)).or_insert(0) += 1;
                *m.entry((b, a)).or_insert(0) += 1;
            }
        }
        m
    }

    proptest! {
        #[test]
        fn counting_matches_enumeration(
            raw in prop::collection::vec(0u32..6, 0..300),
            window in 1usize..5,
            chunk in 1usize..40,
        ) {
            let stream: Vec<u32> = raw.into_iter().map(|x| if x == 5 { OOV } else { x }).collect();
            let v = Vocabulary::from_entries((0..5).map(|i| (format!("w{i}"), 1)).collect()).unwrap();
            let single = count_cooccurrences_chunked(&stream, &v, window, usize::MAX).unwrap();
            let chunked = count_cooccurrences_chunked(&stream, &v, window, chunk).unwrap();
            prop_assert_eq!(&single, &chunked);

            let oracle = brute_force(&stream, 5, window);
            prop_assert_eq!(single.nnz(), oracle.len());
            for &(i, j, c) in single.entries() {
                prop_assert_eq!(oracle.get(&(i, j)).copied(), Some(c));
                prop_assert_eq!(single.get(j, i), c);
            }
            let scanned: u64 = (0..stream.len())
                .flat_map(|t| (1..=window).map(move |o| (t, t + o)))
                .filter(|&(a, b)| b < stream.len() && stream[a] != OOV && stream[b] != OOV)
                .count() as u64;
            prop_assert_eq!(single.total(), 2 * scanned);
        }
    }
}
