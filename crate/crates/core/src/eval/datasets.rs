//! Benchmark file readers. Parsing is strict: a malformed line is an error
//! carrying its 1-based line number.

use std::collections::BTreeSet;
use std::path::Path;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityDataset {
    pub name: String,
    pub pairs: Vec<(String, String, f64)>,
}

impl SimilarityDataset {
    pub fn new(name: impl Into<String>, pairs: Vec<(String, String, f64)>) -> Result<Self> {
        let name = name.into();
        if pairs.len() < 2 {
            return Err(Error::InvalidArgument(format!("{name}: need at least 2 pairs")));
        }
        if pairs.iter().any(|p| !p.2.is_finite()) {
            return Err(Error::InvalidArgument(format!("{name}: non-finite score")));
        }
        Ok(Self { name, pairs })
    }
}

/// Lowercases and drops a trailing part-of-speech marker such as `-n`.
fn normalize_word(w: &str) -> String {
    let w = w.trim().to_lowercase();
    match w.rsplit_once('-') {
        Some((head, tag)) if !head.is_empty() && matches!(tag, "n" | "v" | "j" | "a" | "r") => head.to_string(),
        _ => w,
    }
}

fn split_fields(line: &str) -> Vec<&str> {
    if line.contains(',') {
        line.split(',').map(str::trim).collect()
    } else if line.contains('\t') {
        line.split('\t').map(str::trim).collect()
    } else {
        line.split_whitespace().collect()
    }
}

/// `word1 word2 score` per line, separated by commas, tabs or spaces. A
/// first line whose score field is not numeric is taken as a header.
pub fn parse_similarity(text: &str, name: &str, path: &str) -> Result<SimilarityDataset> {
    let mut pairs = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let f = split_fields(line);
        if f.len() < 3 {
            return Err(Error::parse(path, no + 1, format!("expected 3 fields, got {}", f.len())));
        }
        match f[2].parse::<f64>() {
            Ok(score) if score.is_finite() => {
                pairs.push((normalize_word(f[0]), normalize_word(f[1]), score));
            }
            _ if no == 0 => continue,
            _ => return Err(Error::parse(path, no + 1, format!("bad score {:?}", f[2]))),
        }
    }
    if pairs.is_empty() {
        return Err(Error::parse(path, 0, "no pairs"));
    }
    SimilarityDataset::new(name, pairs).map_err(|e| Error::parse(path, 0, e.to_string()))
}

pub fn load_similarity_dataset(path: &Path, name: &str) -> Result<SimilarityDataset> {
    let text = std::fs::read_to_string(path)?;
    parse_similarity(&text, name, &path.display().to_string())
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TaggedCorpus {
    pub sentences: Vec<Vec<(String, String)>>,
    pub tagset: BTreeSet<String>,
}

impl TaggedCorpus {
    pub fn new(sentences: Vec<Vec<(String, String)>>) -> Result<Self> {
        if sentences.iter().any(|s| s.is_empty()) {
            return Err(Error::InvalidArgument("tagged corpus contains an empty sentence".into()));
        }
        let tagset = sentences.iter().flatten().map(|(_, t)| t.clone()).collect();
        Ok(Self { sentences, tagset })
    }

    pub fn tokens(&self) -> usize {
        self.sentences.iter().map(Vec::len).sum()
    }
}

/// `token POS chunk` per line, blank lines between sentences. The chunk
/// column is discarded.
pub fn parse_conll2000(text: &str, path: &str) -> Result<TaggedCorpus> {
    let mut sentences = Vec::new();
    let mut cur = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            if !cur.is_empty() {
                sentences.push(std::mem::take(&mut cur));
            }
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 3 {
            return Err(Error::parse(path, no + 1, format!("expected `token POS chunk`, got {} fields", f.len())));
        }
        cur.push((f[0].to_string(), f[1].to_string()));
    }
    if !cur.is_empty() {
        sentences.push(cur);
    }
    if sentences.is_empty() {
        return Err(Error::parse(path, 0, "no sentences"));
    }
    TaggedCorpus::new(sentences)
}

pub fn load_conll2000(path: &Path) -> Result<TaggedCorpus> {
    parse_conll2000(&std::fs::read_to_string(path)?, &path.display().to_string())
}

/// Whitespace-separated `word/TAG` tokens, one sentence per non-blank line.
/// The tag is everything after the last `/`.
pub fn parse_brown(text: &str, path: &str) -> Result<TaggedCorpus> {
    let mut sentences = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut sent = Vec::new();
        for tok in line.split_whitespace() {
            match tok.rsplit_once('/') {
                Some((w, t)) if !w.is_empty() && !t.is_empty() => sent.push((w.to_string(), t.to_string())),
                _ => return Err(Error::parse(path, no + 1, format!("token {tok:?} is not word/TAG"))),
            }
        }
        sentences.push(sent);
    }
    if sentences.is_empty() {
        return Err(Error::parse(path, 0, "no sentences"));
    }
    TaggedCorpus::new(sentences)
}

pub fn load_brown(path: &Path) -> Result<TaggedCorpus> {
    parse_brown(&std::fs::read_to_string(path)?, &path.display().to_string())
}

/// Shuffles sentences with `seed` and splits off the first `train_fraction`.
pub fn split_sentences(corpus: &TaggedCorpus, train_fraction: f64, seed: u64) -> Result<(TaggedCorpus, TaggedCorpus)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!("train fraction {train_fraction} outside (0, 1)")));
    }
    let n = corpus.sentences.len();
    if n < 2 {
        return Err(Error::InvalidArgument("need at least 2 sentences to split".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng_from_seed(seed));
    let cut = ((n as f64 * train_fraction).round() as usize).clamp(1, n - 1);
    let pick = |ids: &[usize]| TaggedCorpus::new(ids.iter().map(|&i| corpus.sentences[i].clone()).collect());
    Ok((pick(&order[..cut])?, pick(&order[cut..])?))
}
