//! Small synthetic corpus with topic structure, a similarity list and a
//! tagged corpus, enough to drive every pipeline stage quickly.

#![allow(dead_code)]

pub mod oracle;

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rhgvec::pipeline::PipelineConfig;

pub const TOPICS: usize = 6;
pub const WORDS: usize = 24;
const FUNCTION: [&str; 6] = ["the", "of", "and", "to", "in", "a"];

fn topic_word(t: usize, w: usize) -> String {
    format!("t{t}w{w}")
}

fn sentence(rng: &mut ChaCha8Rng) -> (usize, Vec<(String, String)>) {
    let t = rng.random_range(0..TOPICS);
    let len = rng.random_range(8..16);
    let tokens = (0..len)
        .map(|_| {
            if rng.random_bool(0.25) {
                (FUNCTION[rng.random_range(0..FUNCTION.len())].to_string(), "F".to_string())
            } else {
                // skewed within-topic frequencies
                let u: f64 = rng.random();
                let w = ((u * u) * WORDS as f64) as usize;
                (topic_word(t, w.min(WORDS - 1)), format!("T{t}"))
            }
        })
        .collect();
    (t, tokens)
}

/// Writes corpus, similarity and tagged files under `dir` and returns a
/// matching configuration with outputs in `dir/out`.
pub fn write_fixture(dir: &Path) -> PipelineConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut corpus = String::new();
    for _ in 0..2500 {
        let (_, s) = sentence(&mut rng);
        for (w, _) in s {
            corpus.push_str(&w);
            corpus.push(' ');
        }
    }
    std::fs::write(dir.join("corpus.txt"), corpus).unwrap();

    let mut sim = String::from("word1,word2,score\n");
    for _ in 0..80 {
        let (t1, t2) = (rng.random_range(0..TOPICS), rng.random_range(0..TOPICS));
        let (w1, w2) = (rng.random_range(0..WORDS / 2), rng.random_range(0..WORDS / 2));
        let base = if t1 == t2 { 7.0 } else { 2.0 };
        let score = base + rng.random_range(-1.5..1.5);
        writeln!(sim, "{},{},{score:.2}", topic_word(t1, w1), topic_word(t2, w2)).unwrap();
    }
    std::fs::write(dir.join("sim.csv"), sim).unwrap();

    for (name, count) in [("train.txt", 300), ("test.txt", 100)] {
        let mut text = String::new();
        for _ in 0..count {
            let (_, s) = sentence(&mut rng);
            for (w, tag) in s {
                writeln!(text, "{w} {tag} O").unwrap();
            }
            text.push('\n');
        }
        std::fs::write(dir.join(name), text).unwrap();
    }

    let toml = format!(
        r#"
corpus = "{d}/corpus.txt"
outdir = "{d}/out"
seed = 3
dim = 12
subsample = 1e-3
[rhg]
kbar = 8.0
[align]
epochs = 2
batch_size = 64
[sgns]
epochs = 2
[pos]
epochs = 3
[data]
ws353 = "{d}/sim.csv"
conll_train = "{d}/train.txt"
conll_test = "{d}/test.txt"
[figures]
rx_samples = 20000
bins = 40
"#,
        d = dir.display()
    );
    std::fs::write(dir.join("config.toml"), &toml).unwrap();
    PipelineConfig::from_toml_str(&toml, &[]).unwrap()
}

/// All files below `root` as `(relative path, bytes)`, sorted.
pub fn snapshot(root: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.push((rel, std::fs::read(&path).unwrap()));
            }
        }
    }
    out.sort();
    out
}
