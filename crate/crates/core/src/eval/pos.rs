//! Window-based POS tagger: the five embeddings around a token feed one
//! sigmoid hidden layer and a softmax over tags.

use std::collections::HashMap;

use ndarray::{s, Array1, Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::Rng;

use super::datasets::TaggedCorpus;
use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::math::sigmoid;
use crate::rng::{rng_from_seed, substream_seed};

/// Words on each side of the center token.
pub const CONTEXT: usize = 2;
const SLOTS: usize = 2 * CONTEXT + 1;

#[derive(Debug, Clone, PartialEq)]
pub struct PosClassifierConfig {
    pub hidden_size: usize,
    pub step_size: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for PosClassifierConfig {
    fn default() -> Self {
        Self {
            hidden_size: 128,
            step_size: 0.1,
            epochs: 5,
            batch_size: 32,
            seed: 0,
        }
    }
}

impl PosClassifierConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hidden_size == 0 || self.epochs == 0 || self.batch_size == 0 {
            return Err(Error::InvalidArgument("hidden_size, epochs and batch_size must be >= 1".into()));
        }
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return Err(Error::InvalidArgument("classifier step_size must be positive".into()));
        }
        Ok(())
    }
}

/// Looks up lowercased tokens in an embedding matrix.
struct FeatureBuilder<'a> {
    emb: &'a EmbeddingMatrix,
    index: HashMap<&'a str, usize>,
}

impl<'a> FeatureBuilder<'a> {
    fn new(emb: &'a EmbeddingMatrix) -> Self {
        Self { emb, index: emb.index() }
    }

    fn fill<S: AsRef<str>>(&self, sentence: &[S], t: usize, out: &mut [f64]) {
        let d = self.emb.dim();
        out.iter_mut().for_each(|v| *v = 0.0);
        for slot in 0..SLOTS {
            let pos = t as isize + slot as isize - CONTEXT as isize;
            if pos < 0 || pos as usize >= sentence.len() {
                continue;
            }
            let word = sentence[pos as usize].as_ref().to_lowercase();
            if let Some(&row) = self.index.get(word.as_str()) {
                for (o, v) in out[slot * d..(slot + 1) * d].iter_mut().zip(self.emb.row(row)) {
                    *o = *v;
                }
            }
        }
    }
}

/// `[w_{t−2}; …; w_{t+2}]`, with zero blocks past the sentence edges and
/// for words without an embedding.
pub fn build_pos_features<S: AsRef<str>>(sentence: &[S], emb: &EmbeddingMatrix, t: usize) -> Result<Array1<f64>> {
    if t >= sentence.len() {
        return Err(Error::InvalidArgument(format!("position {t} outside sentence of {}", sentence.len())));
    }
    let mut out = Array1::zeros(SLOTS * emb.dim());
    FeatureBuilder::new(emb).fill(sentence, t, out.as_slice_mut().expect("contiguous"));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PosClassifier {
    /// Hidden weights, `hidden × 5d`.
    pub a: Array2<f64>,
    pub b: Array1<f64>,
    /// Output weights, `tags × hidden`.
    pub v: Array2<f64>,
    pub c: Array1<f64>,
    pub tags: Vec<String>,
    /// Features are multiplied by this before the hidden layer.
    pub input_scale: f64,
}

/// Parameter gradients, laid out like [`PosClassifier`].
#[derive(Debug, Clone)]
pub struct Gradients {
    pub a: Array2<f64>,
    pub b: Array1<f64>,
    pub v: Array2<f64>,
    pub c: Array1<f64>,
}

fn softmax_rows(mut z: Array2<f64>) -> Array2<f64> {
    for mut row in z.rows_mut() {
        let m = row.fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        row.mapv_inplace(|v| (v - m).exp());
        let s = row.sum();
        row /= s;
    }
    z
}

impl PosClassifier {
    fn hidden(&self, x: ArrayView2<'_, f64>) -> Array2<f64> {
        (x.dot(&self.a.t()) * self.input_scale + &self.b).mapv(sigmoid)
    }

    /// Tag probabilities for raw feature rows.
    pub fn predict_proba(&self, x: ArrayView2<'_, f64>) -> Array2<f64> {
        softmax_rows(self.hidden(x).dot(&self.v.t()) + &self.c)
    }

    pub fn predict(&self, x: ArrayView2<'_, f64>) -> Vec<usize> {
        self.predict_proba(x)
            .rows()
            .into_iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .fold((0, f64::NEG_INFINITY), |best, (k, &p)| if p > best.1 { (k, p) } else { best })
                    .0
            })
            .collect()
    }

    /// Mean cross-entropy of `labels` and its gradient.
    pub fn loss_and_gradients(&self, x: ArrayView2<'_, f64>, labels: &[usize]) -> (f64, Gradients) {
        let m = x.nrows() as f64;
        let h = self.hidden(x);
        let p = softmax_rows(h.dot(&self.v.t()) + &self.c);
        let mut loss = 0.0;
        let mut dz = p;
        for (i, &y) in labels.iter().enumerate() {
            loss -= dz[[i, y]].max(f64::MIN_POSITIVE).ln();
            dz[[i, y]] -= 1.0;
        }
        dz /= m;
        let gv = dz.t().dot(&h);
        let gc = dz.sum_axis(Axis(0));
        let dpre = dz.dot(&self.v) * &h.mapv(|t| t * (1.0 - t));
        let ga = dpre.t().dot(&x) * self.input_scale;
        let gb = dpre.sum_axis(Axis(0));
        (loss / m, Gradients { a: ga, b: gb, v: gv, c: gc })
    }

    fn step(&mut self, g: &Gradients, lr: f64) {
        self.a.scaled_add(-lr, &g.a);
        self.b.scaled_add(-lr, &g.b);
        self.v.scaled_add(-lr, &g.v);
        self.c.scaled_add(-lr, &g.c);
    }
}

/// `1 / RMS` of the embedding entries, so inputs have unit scale whatever
/// the method that produced the vectors.
fn input_scale(emb: &EmbeddingMatrix) -> f64 {
    let d = emb.data();
    let ms = d.iter().map(|v| v * v).sum::<f64>() / d.len().max(1) as f64;
    if ms > 0.0 {
        1.0 / ms.sqrt()
    } else {
        1.0
    }
}

/// Mini-batch gradient descent on cross-entropy. Deterministic for a seed.
pub fn train_pos_classifier(corpus: &TaggedCorpus, emb: &EmbeddingMatrix, cfg: &PosClassifierConfig) -> Result<PosClassifier> {
    cfg.validate()?;
    if corpus.tokens() == 0 {
        return Err(Error::EmptyCorpus("POS training split has no tokens".into()));
    }
    let tags: Vec<String> = corpus.tagset.iter().cloned().collect();
    let tag_id: HashMap<&str, usize> = corpus.tagset.iter().enumerate().map(|(i, t)| (t.as_str(), i)).collect();
    let width = SLOTS * emb.dim();
    let hidden = cfg.hidden_size;
    let mut init = rng_from_seed(substream_seed(cfg.seed, "pos.init"));
    let mut uniform = |rows: usize, cols: usize| {
        let lim = (6.0 / (rows + cols) as f64).sqrt();
        Array2::from_shape_simple_fn((rows, cols), || init.random_range(-lim..lim))
    };
    let mut clf = PosClassifier {
        a: uniform(hidden, width),
        b: Array1::zeros(hidden),
        v: uniform(tags.len(), hidden),
        c: Array1::zeros(tags.len()),
        tags,
        input_scale: input_scale(emb),
    };

    let examples: Vec<(usize, usize)> = corpus
        .sentences
        .iter()
        .enumerate()
        .flat_map(|(s, sent)| (0..sent.len()).map(move |t| (s, t)))
        .collect();
    let labels: Vec<Vec<&str>> = corpus.sentences.iter().map(|s| s.iter().map(|(w, _)| w.as_str()).collect()).collect();
    let builder = FeatureBuilder::new(emb);
    let mut order: Vec<usize> = (0..examples.len()).collect();
    let mut shuffle = rng_from_seed(substream_seed(cfg.seed, "pos.shuffle"));
    let mut x = Array2::zeros((cfg.batch_size, width));
    let mut y = Vec::with_capacity(cfg.batch_size);
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut shuffle);
        for batch in order.chunks(cfg.batch_size) {
            y.clear();
            for (row, &e) in batch.iter().enumerate() {
                let (s, t) = examples[e];
                builder.fill(&labels[s], t, x.row_mut(row).into_slice().expect("contiguous"));
                y.push(tag_id[corpus.sentences[s][t].1.as_str()]);
            }
            let xb = x.slice(s![..batch.len(), ..]);
            let (loss, g) = clf.loss_and_gradients(xb, &y);
            if !loss.is_finite() {
                return Err(Error::Divergence(format!("classifier loss non-finite in epoch {}", epoch + 1)));
            }
            clf.step(&g, cfg.step_size);
        }
    }
    Ok(clf)
}

/// Token-level accuracy; tokens whose tag the classifier never saw count
/// as errors.
pub fn evaluate_pos(clf: &PosClassifier, emb: &EmbeddingMatrix, corpus: &TaggedCorpus) -> Result<f64> {
    let total = corpus.tokens();
    if total == 0 {
        return Err(Error::EmptyCorpus("POS test split has no tokens".into()));
    }
    let width = SLOTS * emb.dim();
    if width != clf.a.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "classifier expects {} features, embeddings give {width}",
            clf.a.ncols()
        )));
    }
    let builder = FeatureBuilder::new(emb);
    let mut correct = 0usize;
    for sent in &corpus.sentences {
        let words: Vec<&str> = sent.iter().map(|(w, _)| w.as_str()).collect();
        let mut x = Array2::zeros((sent.len(), width));
        for t in 0..sent.len() {
            builder.fill(&words, t, x.row_mut(t).into_slice().expect("contiguous"));
        }
        for (pred, (_, tag)) in clf.predict(x.view()).into_iter().zip(sent) {
            if clf.tags[pred] == *tag {
                correct += 1;
            }
        }
    }
    Ok(correct as f64 / total as f64)
}

/// Accuracy on `test` of always predicting the most frequent `train` tag.
pub fn majority_baseline(train: &TaggedCorpus, test: &TaggedCorpus) -> f64 {
    let mut freq: HashMap<&str, usize> = HashMap::new();
    for (_, t) in train.sentences.iter().flatten() {
        *freq.entry(t.as_str()).or_default() += 1;
    }
    let Some(top) = freq.into_iter().max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(a.0))).map(|p| p.0) else {
        return 0.0;
    };
    let hits = test.sentences.iter().flatten().filter(|(_, t)| t == top).count();
    hits as f64 / test.tokens().max(1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn emb() -> EmbeddingMatrix {
        EmbeddingMatrix::new(
            vec!["the".into(), "cat".into(), "sat".into()],
            array![[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]],
        )
        .unwrap()
    }

    #[test]
    fn single_word_sentence_is_padded() {
        let f = build_pos_features(&["Cat"], &emb(), 0).unwrap();
        assert_eq!(f.to_vec(), vec![0.0, 0.0, 0.0, 0.0, 3.0, 4.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(build_pos_features(&["cat"], &emb(), 1).is_err());
    }

    #[test]
    fn interior_position_concatenates() {
        let sent = ["the", "cat", "sat", "the", "cat"];
        let f = build_pos_features(&sent, &emb(), 2).unwrap();
        assert_eq!(f.to_vec(), vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 1.0, 2.0, 3.0, 4.0]);
        let blocks: f64 = sent.iter().map(|w| emb().row(emb().index()[w]).dot(&emb().row(emb().index()[w]))).sum();
        assert!((f.dot(&f).sqrt() - blocks.sqrt()).abs() < 1e-12);
        let oov = build_pos_features(&["the", "dog", "sat"], &emb(), 1).unwrap();
        assert_eq!(oov.slice(s![4..6]).to_vec(), vec![0.0, 0.0]);
    }

    fn toy_classifier() -> PosClassifier {
        let mut rng = rng_from_seed(4);
        let mut r = |n: usize, m: usize| Array2::from_shape_simple_fn((n, m), || rng.random_range(-0.8..0.8));
        PosClassifier {
            a: r(4, 6),
            b: r(1, 4).row(0).to_owned(),
            v: r(3, 4),
            c: r(1, 3).row(0).to_owned(),
            tags: vec!["A".into(), "B".into(), "C".into()],
            input_scale: 0.7,
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let clf = toy_classifier();
        let mut rng = rng_from_seed(8);
        let x = Array2::from_shape_simple_fn((5, 6), || rng.random_range(-1.0..1.0));
        let y = [0, 2, 1, 1, 0];
        let (_, g) = clf.loss_and_gradients(x.view(), &y);
        let h = 1e-5;
        let check = |analytic: f64, perturb: &dyn Fn(&mut PosClassifier, f64)| {
            let mut p = clf.clone();
            perturb(&mut p, h);
            let mut m = clf.clone();
            perturb(&mut m, -h);
            let numeric = (p.loss_and_gradients(x.view(), &y).0 - m.loss_and_gradients(x.view(), &y).0) / (2.0 * h);
            let rel = (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-7);
            assert!(rel < 1e-5, "analytic {analytic} numeric {numeric}");
        };
        for i in 0..4 {
            for j in 0..6 {
                check(g.a[[i, j]], &|c, e| c.a[[i, j]] += e);
            }
            check(g.b[i], &|c, e| c.b[i] += e);
            for k in 0..3 {
                check(g.v[[k, i]], &|c, e| c.v[[k, i]] += e);
            }
        }
        for k in 0..3 {
            check(g.c[k], &|c, e| c.c[k] += e);
        }
    }

    #[test]
    fn probabilities_sum_to_one() {
        let clf = toy_classifier();
        let x = Array2::from_shape_fn((7, 6), |(i, j)| (i * 6 + j) as f64 * 0.3 - 4.0);
        for row in clf.predict_proba(x.view()).rows() {
            assert!((row.sum() - 1.0).abs() < 1e-9);
        }
    }

    /// Each word has its own tag and a one-hot embedding.
    fn separable() -> (TaggedCorpus, EmbeddingMatrix) {
        let words = ["a", "b", "c", "d"];
        let tags = ["W", "X", "Y", "Z"];
        let mut rng = rng_from_seed(2);
        let sentences = (0..60)
            .map(|_| {
                (0..rng.random_range(1..8))
                    .map(|_| {
                        let k = rng.random_range(0..4);
                        (words[k].to_string(), tags[k].to_string())
                    })
                    .collect()
            })
            .collect();
        let emb = EmbeddingMatrix::new(words.iter().map(|w| w.to_string()).collect(), Array2::eye(4)).unwrap();
        (TaggedCorpus::new(sentences).unwrap(), emb)
    }

    #[test]
    fn learns_separable_data_deterministically() {
        let (corpus, emb) = separable();
        let cfg = PosClassifierConfig {
            hidden_size: 16,
            step_size: 0.5,
            epochs: 30,
            batch_size: 8,
            seed: 1,
        };
        let clf = train_pos_classifier(&corpus, &emb, &cfg).unwrap();
        assert_eq!(evaluate_pos(&clf, &emb, &corpus).unwrap(), 1.0);
        assert_eq!(clf, train_pos_classifier(&corpus, &emb, &cfg).unwrap());
        assert!(majority_baseline(&corpus, &corpus) < 0.5);
    }

    #[test]
    fn perfect_predictor_scores_one() {
        let (corpus, emb) = separable();
        // Output weights read the hidden unit that copies the center word.
        let width = SLOTS * 4;
        let mut a = Array2::zeros((4, width));
        for k in 0..4 {
            a[[k, CONTEXT * 4 + k]] = 40.0;
        }
        let clf = PosClassifier {
            a,
            b: Array1::from_elem(4, -20.0),
            v: Array2::eye(4) * 50.0,
            c: Array1::zeros(4),
            tags: vec!["W".into(), "X".into(), "Y".into(), "Z".into()],
            input_scale: 1.0,
        };
        assert_eq!(evaluate_pos(&clf, &emb, &corpus).unwrap(), 1.0);
    }
}
