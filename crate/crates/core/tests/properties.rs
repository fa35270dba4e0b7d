use num_complex::Complex64 as C64;
use proptest::prelude::*;

use symext::convert::{sym_to_bos, tilde_state, verify_extension, Extension};
use symext::extend::{blocks_to_global, gen_random_extendible, global_to_blocks, marginal_from_blocks, Profile};
use symext::io::{state_file, MatrixFile, Metadata};
use symext::linalg::{eigh, eigvalsh, partial_trace, ComplexMatrix};
use symext::schur::build_schur_basis;

/// Cyclic Jacobi on a real symmetric matrix stored row-major.
fn jacobi_eigenvalues(mut a: Vec<f64>, n: usize) -> Vec<f64> {
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i * n + j].powi(2)).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k * n + p], a[k * n + q]);
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p * n + k], a[q * n + k]);
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

fn hermitian(n: usize, values: &[f64]) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(n, n, |i, j| C64::new(values[2 * (i * n + j)], values[2 * (i * n + j) + 1]));
    (&g + &g.adjoint()).scale(0.5)
}

fn arb_hermitian() -> impl Strategy<Value = ComplexMatrix> {
    (1usize..=10).prop_flat_map(|n| prop::collection::vec(-1.0f64..1.0, 2 * n * n).prop_map(move |v| hermitian(n, &v)))
}

fn arb_instance() -> impl Strategy<Value = (usize, usize, u64, Profile)> {
    (1usize..=6, 1usize..=3, any::<u64>(), prop_oneof![Just(Profile::AllDiagrams), Just(Profile::ExcludeBosonic)])
        .prop_filter("exclude-bosonic needs a second diagram", |(k, _, _, p)| *k > 1 || *p == Profile::AllDiagrams)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eigenvalues_agree_with_jacobi_on_real_embedding(m in arb_hermitian()) {
        let n = m.rows();
        let mut real = vec![0.0; 4 * n * n];
        for i in 0..n {
            for j in 0..n {
                let z = m[(i, j)];
                real[i * 2 * n + j] = z.re;
                real[i * 2 * n + j + n] = -z.im;
                real[(i + n) * 2 * n + j] = z.im;
                real[(i + n) * 2 * n + j + n] = z.re;
            }
        }
        let oracle = jacobi_eigenvalues(real, 2 * n);
        let ev = eigvalsh(&m).unwrap();
        for (i, v) in ev.iter().enumerate() {
            prop_assert!((v - oracle[2 * i]).abs() < 1e-10);
            prop_assert!((v - oracle[2 * i + 1]).abs() < 1e-10);
        }
    }

    #[test]
    fn eigendecomposition_reconstructs(m in arb_hermitian()) {
        let e = eigh(&m).unwrap();
        prop_assert!(e.reconstruct_with(|x| x).max_abs_diff(&m) < 1e-12);
    }

    #[test]
    fn block_marginal_equals_full_partial_trace((k, d_a, seed, profile) in arb_instance()) {
        let (rho, bs) = gen_random_extendible(k, d_a, seed, profile).unwrap();
        let global = blocks_to_global(&bs, &build_schur_basis(k).unwrap()).unwrap();
        let brute = partial_trace(global.matrix(), global.layout(), &[0, 1]).unwrap();
        prop_assert!(marginal_from_blocks(&bs).matrix().max_abs_diff(&brute) < 1e-12);
        prop_assert!(rho.matrix().max_abs_diff(&brute) < 1e-12);
    }

    #[test]
    fn twirl_inverts_embedding((k, d_a, seed, profile) in arb_instance()) {
        let (_, bs) = gen_random_extendible(k, d_a, seed, profile).unwrap();
        let basis = build_schur_basis(k).unwrap();
        let back = global_to_blocks(&blocks_to_global(&bs, &basis).unwrap(), &basis).unwrap();
        for (lam, y) in back.blocks() {
            let err = match bs.block(lam) {
                Some(x) => x.max_abs_diff(y),
                None => y.max_abs(),
            };
            prop_assert!(err < 1e-12, "{}", lam);
        }
    }

    #[test]
    fn every_symmetric_extension_converts_to_a_bosonic_one((k, d_a, seed, profile) in arb_instance()) {
        let (rho, bs) = gen_random_extendible(k, d_a, seed, profile).unwrap();
        let sigma = sym_to_bos(&bs).unwrap();
        prop_assert!((sigma.matrix().trace().re - 1.0).abs() < 1e-12);
        let report = verify_extension(Extension::Bosonic(&sigma), &rho, k, 1e-9).unwrap();
        prop_assert!(report.is_bosonic_extension(), "{}", report.to_text());
    }

    #[test]
    fn extendible_states_pass_the_ppt_screen((k, d_a, seed, profile) in arb_instance()) {
        let (rho, _) = gen_random_extendible(k, d_a, seed, profile).unwrap();
        prop_assert!(tilde_state(&rho, k).unwrap().ppt);
    }

    #[test]
    fn file_round_trip_is_bit_exact((k, d_a, seed, profile) in arb_instance(), tag in any::<u64>()) {
        let (rho, _) = gen_random_extendible(k, d_a, seed, profile).unwrap();
        let text = state_file(&rho, Metadata { seed: Some(tag), provenance: None }).to_json();
        let back = MatrixFile::parse(&text).unwrap();
        prop_assert_eq!(&back.matrix, rho.matrix());
        prop_assert_eq!(back.to_json(), text);
    }
}

#[test]
fn jacobi_oracle_matches_closed_form() {
    // [[a, b], [b, c]]
    let (a, b, c) = (2.0, 1.5, -1.0);
    let ev = jacobi_eigenvalues(vec![a, b, b, c], 2);
    let mid = (a + c) / 2.0;
    let r = (((a - c) / 2.0f64).powi(2) + b * b).sqrt();
    assert!((ev[0] - (mid - r)).abs() < 1e-14 && (ev[1] - (mid + r)).abs() < 1e-14);
}
