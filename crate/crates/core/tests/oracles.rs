mod common;

use common::oracle::{brute_force_assignment, dense_connection, jacobi_eigen};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rhgvec::alignment::{assignment_cost, hungarian, solve_assignment, squared_distances};
use rhgvec::hyperbolic::{sample_points, ConnectionOperator, DiskConfig};
use rhgvec::spectral::{embeddings_from_svd, truncated_svd, SvdOptions, SymmetricOperator};

fn random_symmetric(n: usize, seed: u64) -> Array2<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = Array2::from_shape_fn((n, n), |_| rng.random_range(-1.0..1.0));
    (&m + &m.t()) / 2.0
}

#[test]
fn jacobi_oracle_reconstructs() {
    let a = random_symmetric(12, 1);
    let (vals, vecs) = jacobi_eigen(&a);
    let back = vecs.dot(&Array2::from_diag(&ndarray::Array1::from(vals))).dot(&vecs.t());
    assert!((&back - &a).iter().all(|v| v.abs() < 1e-12));
}

#[test]
fn truncated_svd_matches_dense_oracle() {
    for seed in 0..3 {
        let a = random_symmetric(50, seed);
        let (vals, vecs) = jacobi_eigen(&a);
        let mut opts = SvdOptions::new(10, seed);
        opts.max_iters = 500;
        let svd = truncated_svd(&a, &opts).unwrap();
        for k in 0..10 {
            assert!((svd.sigma[k] - vals[k].abs()).abs() < 1e-6, "seed {seed} k {k}: {} vs {}", svd.sigma[k], vals[k]);
            assert!((svd.eigenvalues[k] - vals[k]).abs() < 1e-6);
            let dot: f64 = svd.u.column(k).dot(&vecs.column(k));
            assert!((dot.abs() - 1.0).abs() < 1e-6, "seed {seed} k {k}: |dot| = {}", dot.abs());
        }
        let gram = svd.u.t().dot(&svd.u);
        assert!((&gram - &Array2::<f64>::eye(10)).iter().all(|v| v.abs() < 1e-8));
    }
}

#[test]
fn full_rank_embedding_reproduces_psd_input() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let m = Array2::from_shape_fn((20, 20), |_| rng.random_range(-1.0..1.0));
    let a = m.dot(&m.t());
    let mut opts = SvdOptions::new(20, 0);
    opts.oversample = 0;
    opts.max_iters = 500;
    let w = embeddings_from_svd(&truncated_svd(&a, &opts).unwrap()).unwrap();
    let gram = w.data().dot(&w.data().t());
    let err = (&gram - &a).iter().fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(err < 1e-6, "max error {err}");
}

#[test]
fn exact_assignment_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for m in 1..=8 {
        for _ in 0..20 {
            let cost = Array2::from_shape_fn((m, m), |_| rng.random_range(0.0..10.0));
            let perm = hungarian(cost.view());
            let best = brute_force_assignment(&cost);
            assert!((assignment_cost(cost.view(), &perm) - best).abs() < 1e-12);

            if m < 2 {
                continue;
            }
            let x = Array2::from_shape_fn((m, 3), |_| rng.random_range(-1.0..1.0));
            let y = Array2::from_shape_fn((m, 3), |_| rng.random_range(-1.0..1.0));
            let d = squared_distances(x.view(), y.view());
            let p = solve_assignment(x.view(), y.view(), 0.05).unwrap();
            assert!((assignment_cost(d.view(), &p) - brute_force_assignment(&d)).abs() < 1e-12);
        }
    }
}

#[test]
fn connection_operator_matches_dense_matrix() {
    for (radius, alpha, n) in [(8.0, 0.75, 200), (12.0, 1.0, 150), (5.0, 0.6, 7)] {
        let cfg = DiskConfig::new(radius, alpha).unwrap();
        let points = sample_points(&cfg, n, 5);
        let op = ConnectionOperator::new(&points, radius).unwrap();
        let dense = dense_connection(&points, radius);
        let entry_err = (&op.to_dense() - &dense).iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(entry_err < 1e-10, "entries differ by {entry_err}");

        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        let x = Array2::from_shape_fn((n, 4), |_| rng.random_range(-1.0..1.0));
        let err = (&op.apply_block(&x) - &dense.dot(&x)).iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(err < 1e-10, "matvec differs by {err}");
    }
}
