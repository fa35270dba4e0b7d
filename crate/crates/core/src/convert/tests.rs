use super::*;
use crate::extend::{blocks_to_global, gen_random_extendible, global_to_blocks, Profile};
use crate::fixtures;
use crate::linalg::KetVector;
use crate::schur::{build_schur_basis, list_diagrams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn xi() -> KetVector {
    KetVector::normalized(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)]).unwrap()
}

#[test]
fn singlet_block_converts_to_triplet() {
    let lam = YoungDiagram::new(1, 1).unwrap();
    let x = xi().projector();
    let bs = BlockState::new(2, 2, vec![(lam, x)]).unwrap();
    let sigma = sym_to_bos(&bs).unwrap().embed().unwrap();
    let expect = tensor_product(&xi().projector(), &fixtures::triplet_zero().projector());
    assert!(sigma.matrix().max_abs_diff(&expect) <= 1e-12);
}

#[test]
fn bosonic_input_is_a_fixed_point() {
    for k in 1..=6 {
        let (_, bs) = gen_random_extendible(k, 2, k as u64, Profile::AllDiagrams).unwrap();
        let lam = YoungDiagram::symmetric(k).unwrap();
        let x = bs.block(&lam).unwrap();
        let x = x.scale(1.0 / x.trace().re);
        let only = BlockState::new(k, 2, vec![(lam, x.clone())]).unwrap();
        let sigma = sym_to_bos(&only).unwrap();
        assert!(sigma.matrix().max_abs_diff(&x) <= 1e-12);
        let again = sym_to_bos(&sigma.to_block_state()).unwrap();
        assert!(again.matrix().max_abs_diff(sigma.matrix()) <= 1e-12);
    }
}

#[test]
fn conversion_preserves_trace_and_weighted_blocks_stay_psd() {
    for k in 2..=7 {
        let (_, bs) = gen_random_extendible(k, 3, 50 + k as u64, Profile::AllDiagrams).unwrap();
        let sigma = sym_to_bos(&bs).unwrap();
        assert!((sigma.matrix().trace().re - bs.total_trace()).abs() <= 1e-12);
        for (lam, x) in bs.blocks() {
            let y = weighted_block(3, lam, x).unwrap();
            assert!(min_eigenvalue(&y).unwrap() >= -1e-10, "{lam}");
        }
    }
}

#[test]
fn converted_extension_verifies() {
    for (k, profile) in [(2, Profile::AllDiagrams), (3, Profile::ExcludeBosonic), (5, Profile::AllDiagrams), (9, Profile::ExcludeBosonic)] {
        let (rho, bs) = gen_random_extendible(k, 2, 99, profile).unwrap();
        let sigma = sym_to_bos(&bs).unwrap();
        let report = verify_extension(Extension::Bosonic(&sigma), &rho, k, 1e-8).unwrap();
        assert!(report.is_bosonic_extension(), "k={k}\n{}", report.to_text());
        assert_eq!(report.analytic, k > MAX_K_EMBEDDED_CHECKS);
    }
}

#[test]
fn perturbed_extension_fails_marginal_check() {
    let (rho, bs) = gen_random_extendible(3, 2, 4, Profile::AllDiagrams).unwrap();
    let sigma = sym_to_bos(&bs).unwrap();
    let mut m = sigma.matrix().clone();
    // raising coherence between weights 0 and 1 for A index 0
    m[(0, 1)] += C64::new(1e-3, 0.0);
    m[(1, 0)] += C64::new(1e-3, 0.0);
    let perturbed = BosonicState::with_tolerance(2, 3, m, 1e-2).unwrap();
    let report = verify_extension(Extension::Bosonic(&perturbed), &rho, 3, 1e-8).unwrap();
    assert!(!report.marginals.passed);
    assert!(report.symmetric_support.passed);
}

#[test]
fn fermionic_witness_is_symmetric_but_not_bosonic() {
    let w = fixtures::fermionic_witness(&xi()).unwrap();
    let rho = fixtures::fermionic_marginal(&xi()).unwrap();
    let report = verify_extension(Extension::Full(&w), &rho, 2, 1e-8).unwrap();
    assert!(report.is_symmetric_extension(), "{}", report.to_text());
    assert!(!report.symmetric_support.passed);
    assert!((report.symmetric_support.value - 1.0).abs() < 1e-12);
}

#[test]
fn k3_conversion_lands_on_dicke_span() {
    let basis = build_schur_basis(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let [phi1, phi2] = fixtures::k3_dicke_pair();
    let span = &phi1.projector() + &phi2.projector();
    for _ in 0..5 {
        let g = ComplexMatrix::from_fn(4, 4, |_, _| C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)));
        let rho = fixtures::k3_state(&g.matmul(&g.adjoint())).unwrap();
        let bs = global_to_blocks(&rho, &basis).unwrap();
        assert!(bs.block(&YoungDiagram::symmetric(3).unwrap()).unwrap().max_abs() < 1e-14);
        let sigma = sym_to_bos(&bs).unwrap().embed().unwrap();
        let pi = tensor_product(&ComplexMatrix::identity(2), &span);
        assert!(pi.matmul(sigma.matrix()).matmul(&pi).max_abs_diff(sigma.matrix()) < 1e-12);
        let want = partial_trace(rho.matrix(), rho.layout(), &[0, 1]).unwrap();
        let got = partial_trace(sigma.matrix(), sigma.layout(), &[0, 1]).unwrap();
        assert!(got.max_abs_diff(&want) < 1e-10);
        // the state was already invariant
        assert!(blocks_to_global(&bs, &basis).unwrap().matrix().max_abs_diff(rho.matrix()) < 1e-12);
    }
}

#[test]
fn tilde_examples() {
    let mixed = DensityMatrix::maximally_mixed(SystemLayout::new(vec![2, 2]).unwrap());
    let t = tilde_state(&mixed, 2).unwrap();
    assert!(t.state.matrix().max_abs_diff(mixed.matrix()) < 1e-15);
    assert!(t.ppt);

    let singlet = DensityMatrix::new(fixtures::singlet().projector(), SystemLayout::new(vec![2, 2]).unwrap()).unwrap();
    let t = tilde_state(&singlet, 2).unwrap();
    let expect = &ComplexMatrix::identity(4).scale(0.125) + &fixtures::singlet().projector().scale(0.5);
    assert!(t.state.matrix().max_abs_diff(&expect) < 1e-15);
    assert!(!t.ppt);
    assert!((t.min_pt_eigenvalue + 0.125).abs() < 1e-10);

    // qutrit B uses the d_B² + k normalization
    let q = fixtures::qutrit_marginal(fixtures::qutrit_coefficients()).unwrap();
    let t = tilde_state(&q, 2).unwrap();
    assert!((t.state.matrix().trace().re - 1.0).abs() < 1e-14);
}

#[test]
fn tilde_of_extendible_states_is_ppt() {
    for seed in 0..20 {
        let k = 2 + (seed as usize % 5);
        let (rho, _) = gen_random_extendible(k, 2, seed, Profile::AllDiagrams).unwrap();
        assert!(tilde_state(&rho, k).unwrap().ppt, "seed {seed}");
    }
}

#[test]
fn analytic_and_embedded_marginals_agree() {
    let k = 6;
    let (rho, bs) = gen_random_extendible(k, 2, 12, Profile::AllDiagrams).unwrap();
    let sigma = sym_to_bos(&bs).unwrap();
    let analytic = marginal_from_blocks(&sigma.to_block_state());
    let full = sigma.embed().unwrap();
    let brute = partial_trace(full.matrix(), full.layout(), &[0, 3]).unwrap();
    assert!(analytic.matrix().max_abs_diff(&brute) < 1e-12);
    assert!(analytic.matrix().max_abs_diff(rho.matrix()) < 1e-12);
}

#[test]
fn rejects_mismatched_inputs() {
    let (rho, bs) = gen_random_extendible(3, 2, 1, Profile::AllDiagrams).unwrap();
    let sigma = sym_to_bos(&bs).unwrap();
    assert!(verify_extension(Extension::Bosonic(&sigma), &rho, 4, 1e-8).is_err());
    assert!(BosonicState::from_block_state(&bs).is_err());
    assert!(BosonicState::new(2, 3, ComplexMatrix::identity(8)).is_err());
    assert_eq!(list_diagrams(3).unwrap().len(), 2);
}
