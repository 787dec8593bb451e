//! Word-similarity and POS-tagging evaluation.

mod datasets;
mod pos;
mod table;

pub use datasets::{
    load_brown, load_conll2000, load_similarity_dataset, parse_brown, parse_conll2000, parse_similarity,
    split_sentences, SimilarityDataset, TaggedCorpus,
};
pub use pos::{
    build_pos_features, evaluate_pos, majority_baseline, train_pos_classifier, PosClassifier, PosClassifierConfig,
    CONTEXT,
};
pub use table::{Metric, Method, ResultsTable};

use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};

/// Ranks starting at 1, ties sharing their average rank.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)
}

/// Spearman rank correlation: Pearson correlation of average ranks.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch(format!("{} vs {} values", xs.len(), ys.len())));
    }
    if xs.len() < 2 {
        return Err(Error::Degenerate("spearman needs at least 2 pairs".into()));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("spearman input contains non-finite values".into()));
    }
    let constant = |v: &[f64]| v.iter().all(|x| *x == v[0]);
    if constant(xs) || constant(ys) {
        return Err(Error::Degenerate("spearman input is constant".into()));
    }
    Ok(pearson(&average_ranks(xs), &average_ranks(ys)))
}

pub fn cosine(a: ndarray::ArrayView1<'_, f64>, b: ndarray::ArrayView1<'_, f64>) -> f64 {
    let den = (a.dot(&a) * b.dot(&b)).sqrt();
    if den > 0.0 {
        a.dot(&b) / den
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilarityScore {
    pub spearman: f64,
    /// Fraction of dataset pairs with both words in the vocabulary.
    pub coverage: f64,
    pub used: usize,
}

/// Spearman correlation between cosine similarities and human scores over
/// the pairs whose words (lowercased) both have embeddings.
pub fn evaluate_similarity(emb: &EmbeddingMatrix, ds: &SimilarityDataset) -> Result<SimilarityScore> {
    let index = emb.index();
    let mut model = Vec::new();
    let mut human = Vec::new();
    for (w1, w2, score) in &ds.pairs {
        if let (Some(&i), Some(&j)) = (index.get(w1.as_str()), index.get(w2.as_str())) {
            model.push(cosine(emb.row(i), emb.row(j)));
            human.push(*score);
        }
    }
    if model.len() < 2 {
        return Err(Error::Degenerate(format!(
            "only {} of {} pairs of {} are in vocabulary",
            model.len(),
            ds.pairs.len(),
            ds.name
        )));
    }
    Ok(SimilarityScore {
        spearman: spearman(&model, &human)?,
        coverage: model.len() as f64 / ds.pairs.len() as f64,
        used: model.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;

    #[test]
    fn spearman_examples() {
        let a = [1.0, 2.0, 3.0, 4.0];
        assert!((spearman(&a, &a).unwrap() - 1.0).abs() < 1e-15);
        assert!((spearman(&a, &[4.0, 3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-15);
        // 1 − 6 Σd² / (n(n² − 1)) with d = (0, 1, 1, 0)
        let want = 1.0 - 6.0 * 2.0 / (4.0 * 15.0);
        assert!((spearman(&a, &[1.0, 3.0, 2.0, 4.0]).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn spearman_errors() {
        assert!(matches!(spearman(&[1.0, 1.0], &[1.0, 2.0]), Err(Error::Degenerate(_))));
        assert!(spearman(&[1.0], &[1.0]).is_err());
        assert!(spearman(&[1.0, 2.0], &[1.0]).is_err());
    }

    #[test]
    fn ties_get_average_ranks() {
        assert_eq!(average_ranks(&[10.0, 20.0, 10.0, 30.0]), vec![1.5, 3.0, 1.5, 4.0]);
    }

    proptest! {
        #[test]
        fn spearman_invariant_under_monotone_maps(
            xs in prop::collection::vec(-100.0f64..100.0, 3..40),
            ys in prop::collection::vec(-100.0f64..100.0, 3..40),
        ) {
            let n = xs.len().min(ys.len());
            let (xs, ys) = (&xs[..n], &ys[..n]);
            prop_assume!(!xs.iter().all(|v| *v == xs[0]) && !ys.iter().all(|v| *v == ys[0]));
            let base = spearman(xs, ys).unwrap();
            let mapped: Vec<f64> = xs.iter().map(|x| (x / 50.0).exp() * 3.0 + 1.0).collect();
            prop_assert!((spearman(&mapped, ys).unwrap() - base).abs() < 1e-12);
            prop_assert!((-1.0..=1.0).contains(&base));
        }

        #[test]
        fn similarity_invariant_under_positive_scaling(scale in 1e-3f64..1e3) {
            let emb = EmbeddingMatrix::new(
                vec!["a".into(), "b".into(), "c".into(), "d".into()],
                array![[1.0, 0.2], [0.9, 0.5], [-0.3, 1.0], [0.1, -1.0]],
            ).unwrap();
            let ds = SimilarityDataset::new("toy", vec![
                ("a".into(), "b".into(), 9.0),
                ("a".into(), "c".into(), 3.0),
                ("b".into(), "d".into(), 1.0),
                ("c".into(), "d".into(), 2.0),
            ]).unwrap();
            let scaled = EmbeddingMatrix::new(emb.labels().to_vec(), emb.data() * scale).unwrap();
            let a = evaluate_similarity(&emb, &ds).unwrap();
            let b = evaluate_similarity(&scaled, &ds).unwrap();
            prop_assert!((a.spearman - b.spearman).abs() < 1e-12);
        }
    }

    #[test]
    fn similarity_ranking_and_coverage() {
        let emb = EmbeddingMatrix::new(
            vec!["x".into(), "y".into(), "z".into()],
            array![[1.0, 0.0], [0.8, 0.6], [0.0, 1.0]],
        )
        .unwrap();
        let ds = SimilarityDataset::new(
            "toy",
            vec![
                ("x".into(), "y".into(), 8.0),
                ("x".into(), "z".into(), 1.0),
                ("y".into(), "z".into(), 6.0),
                ("x".into(), "nope".into(), 5.0),
            ],
        )
        .unwrap();
        let s = evaluate_similarity(&emb, &ds).unwrap();
        assert!((s.spearman - 1.0).abs() < 1e-12);
        assert_eq!(s.used, 3);
        assert!((s.coverage - 0.75).abs() < 1e-15);
        let tiny = SimilarityDataset::new("t", vec![("x".into(), "q".into(), 1.0), ("q".into(), "y".into(), 2.0)]).unwrap();
        assert!(matches!(evaluate_similarity(&emb, &tiny), Err(Error::Degenerate(_))));
    }
}
