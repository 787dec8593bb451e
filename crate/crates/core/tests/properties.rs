mod common;

use ndarray::Array2;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rhgvec::alignment::{align, objective, AlignmentConfig};
use rhgvec::corpus::{count_cooccurrences, Vocabulary};
use rhgvec::hyperbolic::{hyperbolic_distance, sample_radius, DiskConfig, PolarPoint};
use rhgvec::pmi::{pmi_matrix, shift, sigma_spmi};
use rhgvec::spectral::{truncated_svd, SvdOptions};
use rhgvec::EmbeddingMatrix;

fn point() -> impl Strategy<Value = PolarPoint> {
    (0.0f64..15.0, 0.0f64..std::f64::consts::TAU).prop_map(|(r, t)| PolarPoint::new(r, t))
}

fn psd(n: usize, seed: u64) -> Array2<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = Array2::from_shape_fn((n, n), |_| rng.random_range(-1.0..1.0));
    m.dot(&m.t())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distance_is_a_metric(p in point(), q in point(), s in point()) {
        prop_assert_eq!(hyperbolic_distance(p, p), 0.0);
        prop_assert_eq!(hyperbolic_distance(p, q), hyperbolic_distance(q, p));
        let (pq, qs, ps) = (hyperbolic_distance(p, q), hyperbolic_distance(q, s), hyperbolic_distance(p, s));
        prop_assert!(ps <= pq + qs + 1e-9);
    }

    #[test]
    fn radius_sampling_inverts_cdf(u in 0.0f64..1.0, radius in 1.0f64..20.0, alpha in 0.5f64..1.5) {
        let cfg = DiskConfig::new(radius, alpha).unwrap();
        let r = sample_radius(&cfg, u);
        prop_assert!((0.0..=radius).contains(&r));
        prop_assert!((cfg.radial_cdf(r) - u).abs() < 1e-12);
    }

    #[test]
    fn score_transforms_keep_symmetry_support_and_order(
        raw in prop::collection::vec(0usize..8, 30..300),
        window in 1usize..4,
        k in 1.0f64..10.0,
    ) {
        let words: Vec<String> = raw.iter().map(|i| format!("w{i}")).collect();
        let vocab = Vocabulary::build(words.iter().map(String::as_str), 1).unwrap();
        let stream = vocab.encode(words.iter().map(String::as_str));
        let counts = count_cooccurrences(&stream, &vocab, window).unwrap();
        prop_assume!(!counts.is_empty());
        let pmi = pmi_matrix(&counts).unwrap();
        let sig = sigma_spmi(shift(pmi.clone(), k).unwrap()).unwrap();

        let total = counts.total() as f64;
        let rows = counts.row_sums();
        for &(i, j, c) in counts.entries() {
            let p = pmi.get(i, j).unwrap();
            prop_assert_eq!(p, pmi.get(j, i).unwrap());
            prop_assert_eq!(sig.get(i, j).unwrap(), sig.get(j, i).unwrap());
            let naive = (c as f64 * total / (rows[i as usize] as f64 * rows[j as usize] as f64)).ln();
            prop_assert!((p - naive).abs() < 1e-9);
        }
        prop_assert_eq!(pmi.nnz(), counts.nnz());
        prop_assert_eq!(sig.nnz(), counts.nnz());

        let a: Vec<f64> = pmi.values().to_vec();
        let b: Vec<f64> = sig.values().to_vec();
        for x in 0..a.len() {
            for y in 0..a.len() {
                if a[x] < a[y] {
                    prop_assert!(b[x] <= b[y]);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn svd_is_scale_equivariant(seed in 0u64..1000, c in 0.1f64..10.0) {
        let a = psd(15, seed);
        let mut opts = SvdOptions::new(4, 7);
        opts.max_iters = 500;
        let base = truncated_svd(&a, &opts).unwrap();
        let scaled = truncated_svd(&(&a * c), &opts).unwrap();
        for k in 0..4 {
            prop_assert!((scaled.sigma[k] - c * base.sigma[k]).abs() < 1e-8 * c * base.sigma[0]);
            let dot = scaled.u.column(k).dot(&base.u.column(k));
            prop_assert!((dot - 1.0).abs() < 1e-6, "column {} dot {}", k, dot);
        }
    }

    #[test]
    fn reconstruction_error_non_increasing_in_rank(seed in 0u64..1000) {
        let a = psd(12, seed);
        let mut last = f64::INFINITY;
        for d in 1..=12 {
            let mut opts = SvdOptions::new(d, 1);
            opts.max_iters = 500;
            let svd = truncated_svd(&a, &opts).unwrap();
            let approx = svd.u.dot(&Array2::from_diag(&ndarray::Array1::from(svd.eigenvalues.clone()))).dot(&svd.u.t());
            let err = (&a - &approx).iter().map(|v| v * v).sum::<f64>().sqrt();
            prop_assert!(err <= last + 1e-9, "d={} err={} previous={}", d, err, last);
            last = err;
        }
    }

    #[test]
    fn svd_is_deterministic_across_thread_counts(seed in 0u64..1000) {
        let a = psd(40, seed);
        let opts = SvdOptions::new(5, seed);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| truncated_svd(&a, &opts).unwrap());
        let three = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap().install(|| truncated_svd(&a, &opts).unwrap());
        prop_assert_eq!(one, three);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn alignment_outputs_are_consistent(seed in 0u64..1000, n in 20usize..120, d in 2usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let wa = EmbeddingMatrix::with_index_labels(Array2::from_shape_fn((n, d), |_| rng.random_range(-1.0..1.0))).unwrap();
        let wb = EmbeddingMatrix::with_index_labels(Array2::from_shape_fn((n, d), |_| rng.random_range(-1.0..1.0))).unwrap();
        let cfg = AlignmentConfig { batch_size: 16, epochs: 2, seed, ..AlignmentConfig::default() };
        let res = align(&wa, &wb, &cfg).unwrap();

        let mut seen = vec![false; n];
        for &p in &res.perm {
            prop_assert!(!seen[p]);
            seen[p] = true;
        }
        prop_assert!(res.orthogonality_error() < 1e-6);

        // independent recomputation on normalized copies
        let normalize = |m: &Array2<f64>| {
            let centered = m - &m.mean_axis(ndarray::Axis(0)).unwrap();
            let ms = centered.iter().map(|v| v * v).sum::<f64>() / n as f64;
            centered / ms.sqrt()
        };
        let a = normalize(wa.data()).dot(&res.q);
        let b = normalize(wb.data());
        let loss: f64 = (0..n).map(|i| (&a.row(i) - &b.row(res.perm[i])).iter().map(|v| v * v).sum::<f64>()).sum();
        prop_assert!((loss - res.loss).abs() < 1e-9 * loss.max(1.0), "{} vs {}", loss, res.loss);
        prop_assert!((objective(a.view(), b.view(), &res.perm) - res.loss).abs() < 1e-9 * loss.max(1.0));
    }
}
