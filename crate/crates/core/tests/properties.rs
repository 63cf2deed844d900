use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use starcons::linalg::{jacobi_eigen, symmetric_eigen, DenseMatrix};
use starcons::simulate::{iterate, monte_carlo, trial_rng, QuantizerSpec, Scheme};
use starcons::spectral::{eig_symmetric, k_max, slem, stratify, theta_root_kcs, theta_root_symmetric};
use starcons::topology::build;
use starcons::{Topology, WeightAssignment, Weighting};

fn symmetric(n: usize) -> impl Strategy<Value = DenseMatrix> {
    prop::collection::vec(-1.0f64..1.0, n * n)
        .prop_map(move |v| DenseMatrix::from_fn(n, |i, j| v[i.min(j) * n + i.max(j)]))
}

fn any_symmetric() -> impl Strategy<Value = DenseMatrix> {
    (1usize..12).prop_flat_map(symmetric)
}

fn weighting() -> impl Strategy<Value = Weighting> {
    prop::sample::select(Weighting::ALL.to_vec())
}

fn star() -> impl Strategy<Value = Topology> {
    prop_oneof![
        (1usize..7, 1usize..7).prop_map(|(m, n)| Topology::SymmetricStar { m, n }),
        (1usize..6, 2usize..7).prop_map(|(m, n)| Topology::CcsStar { m, n }),
        (1usize..6, 1usize..6, 1usize..5).prop_map(|(m, n, k)| Topology::KcsStar { m, n, k }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spectrum_preserves_trace_and_norm(a in any_symmetric()) {
        let s = eig_symmetric(&a).unwrap();
        let v = s.values();
        prop_assert!(v.windows(2).all(|p| p[0] >= p[1]));
        let scale = 1.0 + a.frobenius_norm();
        prop_assert!((v.iter().sum::<f64>() - a.trace()).abs() <= 1e-10 * scale);
        let sq: f64 = v.iter().map(|x| x * x).sum();
        prop_assert!((sq - a.frobenius_norm().powi(2)).abs() <= 1e-10 * scale * scale);
    }

    #[test]
    fn eigensolvers_agree(a in any_symmetric()) {
        let (mut ql, _) = symmetric_eigen(&a).unwrap();
        let (mut jac, _) = jacobi_eigen(&a, false).unwrap();
        ql.sort_by(f64::total_cmp);
        jac.sort_by(f64::total_cmp);
        for (x, y) in ql.iter().zip(&jac) {
            prop_assert!((x - y).abs() <= 1e-10 * (1.0 + a.frobenius_norm()));
        }
    }

    #[test]
    fn eigenvectors_diagonalize(a in any_symmetric()) {
        let (vals, vecs) = symmetric_eigen(&a).unwrap();
        for (j, &l) in vals.iter().enumerate() {
            let v = vecs.column(j);
            let av = a.mul_vec(&v).unwrap();
            let err = av.iter().zip(&v).map(|(p, q)| (p - l * q).abs()).fold(0.0, f64::max);
            prop_assert!(err <= 1e-9 * (1.0 + a.frobenius_norm()));
        }
    }

    #[test]
    fn weight_matrices_are_symmetric_stochastic(t in star(), w in weighting()) {
        let m = w.matrix(&t).unwrap();
        prop_assert!(m.max_row_sum_deviation() <= 1e-12);
        prop_assert!(m.as_dense().max_asymmetry() == 0.0);
        let s = slem(&m).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&s));
    }

    #[test]
    fn closed_form_never_beaten_by_heuristics(t in star(), w in weighting()) {
        prop_assume!(starcons::weights::optimal_weights(&t).unwrap().optimality_guaranteed);
        let opt = slem(&Weighting::Optimal.matrix(&t).unwrap()).unwrap();
        let other = slem(&w.matrix(&t).unwrap()).unwrap();
        prop_assert!(opt <= other + 1e-9);
    }

    #[test]
    fn single_branch_closed_form_is_beaten(m in 1usize..8) {
        let t = Topology::SymmetricStar { m, n: 1 };
        let cf = slem(&Weighting::Optimal.matrix(&t).unwrap()).unwrap();
        let best = slem(&Weighting::BestConstant.matrix(&t).unwrap()).unwrap();
        prop_assert!(best < cf);
    }

    #[test]
    fn root_matches_eigensolve(m in 1usize..9, n in 1usize..9) {
        let root = theta_root_symmetric(m, n).unwrap().cos();
        let eig = slem(&Weighting::Optimal.matrix(&Topology::SymmetricStar { m, n }).unwrap()).unwrap();
        prop_assert!((root - eig).abs() <= 1e-9);
    }

    #[test]
    fn kcs_root_matches_eigensolve_below_boundary(m in 1usize..7, n in 1usize..7, k in 1usize..6) {
        prop_assume!(k < k_max(m, n).unwrap());
        let root = theta_root_kcs(m, n, k).unwrap().cos();
        let eig = slem(&Weighting::Optimal.matrix(&Topology::KcsStar { m, n, k }).unwrap()).unwrap();
        prop_assert!((root - eig).abs() <= 1e-9);
    }

    #[test]
    fn stratification_is_exact_for_any_weights(m in 1usize..6, n in 1usize..7, ws in prop::collection::vec(-0.5f64..0.8, 6)) {
        let t = Topology::SymmetricStar { m, n };
        let g = build(&t).unwrap();
        let a = WeightAssignment::PerStratum((1..=m).map(|s| (s, ws[s - 1])).collect());
        let b = stratify(&t, &a).unwrap();
        let full = starcons::weights::assemble_matrix(&g, &a).unwrap();
        prop_assert!(b.union_error().unwrap() <= 1e-10);
        let direct = eig_symmetric(full.as_dense()).unwrap();
        prop_assert!(direct.max_abs_diff(&b.union_spectrum().unwrap()) <= 1e-10);
    }

    #[test]
    fn unquantized_iteration_conserves_average(t in star(), w in weighting(), seed in any::<u64>()) {
        let m = w.matrix(&t).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x0 = starcons::simulate::sample_initial(m.order(), &mut rng);
        let avg = x0.iter().sum::<f64>() / x0.len() as f64;
        for x in iterate(&m, &x0, 25).unwrap() {
            let a = x.iter().sum::<f64>() / x.len() as f64;
            prop_assert!((a - avg).abs() <= 1e-12);
        }
    }

    #[test]
    fn quantizer_is_idempotent_and_adjacent(bits in 1u32..12, x in -1.2f64..1.2, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for scheme in [Scheme::Uniform, Scheme::Probabilistic] {
            let q = QuantizerSpec::new(bits, scheme).unwrap();
            let y = q.quantize(x, &mut rng);
            prop_assert!(q.levels().iter().any(|&l| (l - y).abs() <= 1e-12));
            prop_assert!((y - x.clamp(-1.0, 1.0)).abs() <= q.resolution() + 1e-12);
            prop_assert_eq!(q.quantize(y, &mut rng), y);
        }
    }

    #[test]
    fn uniform_rounds_to_nearest(bits in 1u32..12, x in -1.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let q = QuantizerSpec::new(bits, Scheme::Uniform).unwrap();
        let y = q.quantize(x, &mut rng);
        prop_assert!((y - x).abs() <= q.resolution() / 2.0 + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn probabilistic_quantizer_is_unbiased(bits in 2u32..8, x in -0.99f64..0.99, seed in any::<u64>()) {
        let q = QuantizerSpec::new(bits, Scheme::Probabilistic).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let draws = 20_000;
        let mean = (0..draws).map(|_| q.quantize(x, &mut rng)).sum::<f64>() / draws as f64;
        // Each draw is within Δ of x; six standard errors of a Δ/2-bounded deviation.
        prop_assert!((mean - x).abs() <= 6.0 * q.resolution() / 2.0 / (draws as f64).sqrt());
    }

    #[test]
    fn monte_carlo_is_reproducible(seed in any::<u64>(), w in weighting()) {
        let t = Topology::SymmetricStar { m: 2, n: 3 };
        let q = QuantizerSpec::new(5, Scheme::Probabilistic).unwrap();
        let a = monte_carlo(&t, w, &q, 40, seed, 5_000).unwrap();
        let b = monte_carlo(&t, w, &q, 40, seed, 5_000).unwrap();
        prop_assert_eq!(format!("{a:?}"), format!("{b:?}"));
    }

    #[test]
    fn trial_streams_are_distinct(seed in any::<u64>()) {
        use rand::Rng;
        let a: u64 = trial_rng(seed, 0).random();
        let b: u64 = trial_rng(seed, 1).random();
        prop_assert_ne!(a, b);
    }
}
