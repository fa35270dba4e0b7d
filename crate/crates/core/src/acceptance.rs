//! The acceptance suite, shared by `symext selftest` and the test target.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::convert::{sym_to_bos, tilde_state, verify_extension, Extension};
use crate::error::{Error, Result};
use crate::extend::{
    blocks_to_global, gen_random_extendible, global_to_blocks, marginal_from_blocks, solve_bosonic_k2_generic,
    solve_symmetric, Certificate, Profile, SolverConfig, Status,
};
use crate::fixtures;
use crate::io::{self, Metadata};
use crate::linalg::{partial_trace, tensor_product, ComplexMatrix, DensityMatrix, KetVector, SystemLayout};
use crate::schur::{
    alpha_coeff, build_schur_basis, hook_dim, jplus_apply, list_diagrams, multiplicity, HalfInt, SchurBasis,
    YoungDiagram,
};

pub const DEFAULT_SEED: u64 = 2024;

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Option<Duration>,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        let limit = self.limit.map(|l| format!(", limit {} s", l.as_secs())).unwrap_or_default();
        format!(
            "criterion {:>2} {}: {} ({:.3} s{limit}) {}",
            self.id,
            self.title,
            if self.passed { "PASS" } else { "FAIL" },
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

pub const CRITERIA: [(u32, &str, Option<u64>); 10] = [
    (1, "dimension bookkeeping", Some(1)),
    (2, "basis validity", Some(30)),
    (3, "coefficient oracles", Some(60)),
    (4, "k=3 golden test", Some(1)),
    (5, "conversion property suite", Some(300)),
    (6, "two-copy qubit regression", Some(1)),
    (7, "solver calibration", Some(120)),
    (8, "qutrit counterexample", Some(30)),
    (9, "tilde-state PPT screen", Some(60)),
    (10, "determinism", None),
];

type Outcome = Result<(bool, String)>;

pub fn run_criterion(id: u32, seed: u64) -> Result<CriterionResult> {
    let &(_, title, limit) = CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .ok_or_else(|| Error::OutOfRange(format!("no acceptance criterion {id}")))?;
    let start = Instant::now();
    let out = match id {
        1 => dimension_bookkeeping(),
        2 => basis_validity(),
        3 => coefficient_oracles(),
        4 => k3_golden(seed),
        5 => conversion_suite(seed),
        6 => two_copy_regression(),
        7 => solver_calibration(seed),
        8 => qutrit_counterexample(seed),
        9 => tilde_screen(seed),
        _ => determinism(seed),
    };
    let elapsed = start.elapsed();
    let limit = limit.map(Duration::from_secs);
    let (mut passed, mut detail) = out.unwrap_or_else(|e| (false, format!("error: {e}")));
    if let Some(l) = limit {
        if elapsed > l {
            passed = false;
            detail.push_str(" [time limit exceeded]");
        }
    }
    Ok(CriterionResult { id, title, passed, detail, elapsed, limit })
}

pub fn run_all(seed: u64) -> Vec<CriterionResult> {
    CRITERIA.iter().map(|c| run_criterion(c.0, seed).expect("known id")).collect()
}

fn gaussian_matrix(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
}

fn random_density(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let g = gaussian_matrix(rng, n);
    let m = g.matmul(&g.adjoint());
    m.scale(1.0 / m.trace().re)
}

fn dimension_bookkeeping() -> Outcome {
    for k in 1..=10 {
        let mut total = 0u128;
        for lam in list_diagrams(k)? {
            let h = hook_dim(&lam);
            if multiplicity(k, &lam)? != h {
                return Ok((false, format!("multiplicity of {lam} differs from hook_dim")));
            }
            total += h * lam.num_weights() as u128;
        }
        if total != 1u128 << k {
            return Ok((false, format!("k={k}: dimensions sum to {total}")));
        }
    }
    Ok((true, "k=1..10 exact".into()))
}

/// Sparse vectors of one sector at one weight: `(support, rows)`.
fn sector_rows<'a>(basis: &'a SchurBasis, lam: &YoungDiagram, omega: HalfInt) -> (&'a [usize], Vec<&'a [f64]>) {
    let sector = basis.sector(lam).expect("diagram of k");
    let wb = sector.weight_block(omega).expect("weight of diagram");
    (basis.support(wb.ones()), (0..sector.multiplicity()).map(|mu| wb.row(mu)).collect())
}

fn swap_bits(idx: usize, k: usize, i: usize) -> usize {
    let (p, q) = (k - 1 - i, k - 2 - i);
    let (bp, bq) = ((idx >> p) & 1, (idx >> q) & 1);
    if bp == bq {
        idx
    } else {
        idx ^ (1 << p) ^ (1 << q)
    }
}

fn basis_validity() -> Outcome {
    let mut worst_gram = 0.0f64;
    let mut worst_perm = 0.0f64;
    let mut worst_jplus = 0.0f64;
    for k in 1..=10 {
        let basis = build_schur_basis(k)?;
        let diagrams = list_diagrams(k)?;
        // Gram per number of ones; different weights have disjoint supports
        for ones in 0..=k {
            let two_w = 2 * ones as i32 - k as i32;
            let omega = HalfInt::from_twice(two_w);
            let mut rows: Vec<&[f64]> = Vec::new();
            for lam in &diagrams {
                if lam.weight_index(omega).is_some() {
                    rows.extend(sector_rows(&basis, lam, omega).1);
                }
            }
            let support_len = basis.support(ones).len();
            if rows.len() != support_len {
                return Ok((false, format!("k={k}: {} vectors for a {support_len}-dim weight space", rows.len())));
            }
            for (i, u) in rows.iter().enumerate() {
                for (j, v) in rows.iter().enumerate() {
                    let dot: f64 = u.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
                    let expect = if i == j { 1.0 } else { 0.0 };
                    worst_gram = worst_gram.max((dot - expect).abs());
                }
            }
        }
        for lam in &diagrams {
            let weights = lam.weights();
            for i in 0..k.saturating_sub(1) {
                let mut reference: Option<Vec<f64>> = None;
                for &omega in &weights {
                    let (support, rows) = sector_rows(&basis, lam, omega);
                    let pos: std::collections::HashMap<usize, usize> =
                        support.iter().enumerate().map(|(n, &g)| (g, n)).collect();
                    let d = rows.len();
                    let mut rep = vec![0.0; d * d];
                    for (m1, r1) in rows.iter().enumerate() {
                        for (m2, r2) in rows.iter().enumerate() {
                            let mut acc = 0.0;
                            for (n, &g) in support.iter().enumerate() {
                                acc += r1[pos[&swap_bits(g, k, i)]] * r2[n];
                            }
                            rep[m1 * d + m2] = acc;
                        }
                    }
                    match &reference {
                        None => reference = Some(rep),
                        Some(r) => {
                            for (a, b) in r.iter().zip(&rep) {
                                worst_perm = worst_perm.max((a - b).abs());
                            }
                        }
                    }
                }
            }
            let top = HalfInt::from_twice(lam.two_j() as i32);
            for mu in 0..hook_dim(lam) as usize {
                let v = basis.vector(lam, mu, top)?;
                let raised = jplus_apply(&v, k)?;
                worst_jplus = worst_jplus.max(raised.norm());
            }
        }
    }
    let passed = worst_gram <= 1e-10 && worst_perm <= 1e-10 && worst_jplus <= 1e-12;
    Ok((passed, format!("gram {worst_gram:.2e}, permutation {worst_perm:.2e}, J+ {worst_jplus:.2e}")))
}

/// `(1/d) Σ_μ |ω_μ><ω'_μ|` as a dense `2^k` matrix.
fn averaged_pair(basis: &SchurBasis, lam: &YoungDiagram, w1: HalfInt, w2: HalfInt) -> ComplexMatrix {
    let n = 1usize << basis.k();
    let (s1, r1) = sector_rows(basis, lam, w1);
    let (s2, r2) = sector_rows(basis, lam, w2);
    let d = r1.len() as f64;
    let mut m = ComplexMatrix::zeros(n, n);
    for (a, b) in r1.iter().zip(&r2) {
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                m[(s1[i], s2[j])] += C64::new(x * y / d, 0.0);
            }
        }
    }
    m
}

fn coefficient_oracles() -> Outcome {
    let mut worst_t = 0.0f64;
    let mut worst_alpha = 0.0f64;
    for k in 1..=8 {
        let basis = build_schur_basis(k)?;
        let layout = SystemLayout::new(vec![2; k])?;
        let kf = k as f64;
        for lam in list_diagrams(k)? {
            let weights = lam.weights();
            for (i, &om) in weights.iter().enumerate() {
                let m = partial_trace(&averaged_pair(&basis, &lam, om, om), &layout, &[0])?;
                let (t0, t1) = (m[(0, 0)].re, m[(1, 1)].re);
                let w = om.as_f64();
                worst_t = worst_t.max((t0 - (kf - 2.0 * w) / (2.0 * kf)).abs());
                worst_t = worst_t.max((t1 - (kf + 2.0 * w) / (2.0 * kf)).abs());
                if t1 > 0.0 && t0 > 0.0 {
                    worst_t = worst_t.max((t0 / t1 - (kf - 2.0 * w) / (kf + 2.0 * w)).abs());
                }
                if let Some(&up) = weights.get(i + 1) {
                    let m = partial_trace(&averaged_pair(&basis, &lam, om, up), &layout, &[0])?;
                    let a = alpha_coeff(&lam, om, up)?;
                    worst_alpha = worst_alpha.max((m[(0, 1)] - C64::new(a, 0.0)).norm());
                    worst_alpha = worst_alpha.max(m[(1, 0)].norm().max(m[(0, 0)].norm()).max(m[(1, 1)].norm()));
                }
            }
        }
    }
    Ok((worst_t <= 1e-10 && worst_alpha <= 1e-10, format!("diagonal {worst_t:.2e}, alpha {worst_alpha:.2e}")))
}

fn k3_golden(seed: u64) -> Outcome {
    let basis = build_schur_basis(3)?;
    let lam = YoungDiagram::new(2, 1)?;
    let proj = |vs: &[KetVector]| vs.iter().fold(ComplexMatrix::zeros(8, 8), |acc, v| &acc + &v.projector());
    let mut span_err = 0.0f64;
    for (pair, twice) in [(fixtures::k3_lower_pair(), -1), (fixtures::k3_upper_pair(), 1)] {
        let omega = HalfInt::from_twice(twice);
        let schur = averaged_pair(&basis, &lam, omega, omega).scale(2.0);
        span_err = span_err.max(proj(&pair).max_abs_diff(&schur));
    }
    let span = proj(&fixtures::k3_dicke_pair());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut support_err = 0.0f64;
    let mut marg_err = 0.0f64;
    for _ in 0..10 {
        let d_a = rng.random_range(1..=3usize);
        let g = gaussian_matrix(&mut rng, 2 * d_a);
        let rho = fixtures::k3_state(&g.matmul(&g.adjoint()))?;
        let sigma = sym_to_bos(&global_to_blocks(&rho, &basis)?)?.embed()?;
        let pi = tensor_product(&ComplexMatrix::identity(d_a), &span);
        support_err = support_err.max(pi.matmul(sigma.matrix()).matmul(&pi).max_abs_diff(sigma.matrix()));
        let want = partial_trace(rho.matrix(), rho.layout(), &[0, 1])?;
        marg_err = marg_err.max(partial_trace(sigma.matrix(), sigma.layout(), &[0, 1])?.max_abs_diff(&want));
    }
    let passed = span_err <= 1e-12 && support_err <= 1e-10 && marg_err <= 1e-10;
    Ok((passed, format!("span {span_err:.2e}, support {support_err:.2e}, marginal {marg_err:.2e}")))
}

fn conversion_suite(seed: u64) -> Outcome {
    let mut failures = 0;
    let mut worst = 0.0f64;
    for i in 0..200u64 {
        let k = 2 + (i % 5) as usize;
        let d_a = 2 + ((i / 5) % 2) as usize;
        let profile = if (i / 10) % 2 == 0 { Profile::AllDiagrams } else { Profile::ExcludeBosonic };
        let (rho, bs) = gen_random_extendible(k, d_a, seed.wrapping_mul(1000).wrapping_add(i), profile)?;
        let sigma = sym_to_bos(&bs)?;
        let r = verify_extension(Extension::Bosonic(&sigma), &rho, k, 1e-8)?;
        worst = worst.max(r.marginals.value).max(r.psd.value).max(r.trace.value).max(r.symmetric_support.value);
        if !r.is_bosonic_extension() {
            failures += 1;
        }
    }
    Ok((failures == 0, format!("200 instances, {failures} failures, worst defect {worst:.2e}")))
}

fn two_copy_regression() -> Outcome {
    let xi = KetVector::normalized(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)])?;
    let witness = fixtures::fermionic_witness(&xi)?;
    let bs = global_to_blocks(&witness, &build_schur_basis(2)?)?;
    let sigma = sym_to_bos(&bs)?.embed()?;
    let expect = tensor_product(&xi.projector(), &fixtures::triplet_zero().projector());
    let err = sigma.matrix().max_abs_diff(&expect);
    Ok((err <= 1e-12, format!("entrywise {err:.2e}")))
}

fn solver_calibration(seed: u64) -> Outcome {
    let cfg = SolverConfig { seed, ..SolverConfig::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut notes = Vec::new();
    let mut passed = true;
    let mut worst_product = 0.0f64;
    for k in 1..=10 {
        let rho = tensor_product(&random_density(&mut rng, 2), &random_density(&mut rng, 2));
        let rho = DensityMatrix::new(rho, SystemLayout::new(vec![2, 2])?)?;
        let r = solve_symmetric(&rho, k, &cfg)?;
        worst_product = worst_product.max(r.residual);
        if r.status != Status::Feasible || r.residual > 1e-8 {
            passed = false;
            notes.push(format!("product k={k} {}", r.status));
        }
    }
    let singlet = DensityMatrix::new(fixtures::singlet().projector(), SystemLayout::new(vec![2, 2])?)?;
    let r = solve_symmetric(&singlet, 2, &cfg)?;
    if r.status != Status::Infeasible || r.gap_estimate < 1e-3 {
        passed = false;
    }
    notes.push(format!("singlet {} gap {:.3e}", r.status, r.gap_estimate));
    let mut worst_planted = 0.0f64;
    for k in 2..=6 {
        for d_a in [2, 3] {
            let (rho, _) = gen_random_extendible(k, d_a, seed + 17 * k as u64 + d_a as u64, Profile::AllDiagrams)?;
            let r = solve_symmetric(&rho, k, &cfg)?;
            match (&r.status, &r.certificate) {
                (Status::Feasible, Some(Certificate::Blocks(bs))) => {
                    worst_planted = worst_planted.max(marginal_from_blocks(bs).matrix().frobenius_diff(rho.matrix()));
                }
                _ => {
                    passed = false;
                    notes.push(format!("planted k={k} d_A={d_a} {}", r.status));
                }
            }
        }
    }
    if worst_planted > 1e-8 {
        passed = false;
    }
    notes.push(format!("product residual {worst_product:.2e}, planted error {worst_planted:.2e}"));
    Ok((passed, notes.join("; ")))
}

fn qutrit_counterexample(seed: u64) -> Outcome {
    let coeffs = fixtures::qutrit_coefficients();
    let rho = fixtures::qutrit_marginal(coeffs)?;
    let cfg = SolverConfig { seed, ..SolverConfig::default() };
    let r = solve_bosonic_k2_generic(&rho, 3, &cfg)?;
    let solver_ok = r.status == Status::Infeasible && r.gap_estimate >= 1e-4;
    let ext = fixtures::qutrit_extension(coeffs)?;
    let v = verify_extension(Extension::Full(&ext), &rho, 2, 1e-8)?;
    let bound = fixtures::peeling_residual_bound(coeffs);
    let passed = solver_ok && v.is_symmetric_extension() && bound < 0.0;
    Ok((
        passed,
        format!(
            "bosonic {} gap {:.3e}; antisymmetric extension checks {}; peeling bound {bound:.4}",
            r.status,
            r.gap_estimate,
            if v.is_symmetric_extension() { "pass" } else { "fail" }
        ),
    ))
}

fn tilde_screen(seed: u64) -> Outcome {
    let mut npt = 0;
    for i in 0..100u64 {
        let k = 2 + (i % 5) as usize;
        let d_a = 2 + ((i / 5) % 2) as usize;
        let (rho, _) = gen_random_extendible(k, d_a, seed.wrapping_mul(7919).wrapping_add(i), Profile::AllDiagrams)?;
        if !tilde_state(&rho, k)?.ppt {
            npt += 1;
        }
    }
    let singlet = DensityMatrix::new(fixtures::singlet().projector(), SystemLayout::new(vec![2, 2])?)?;
    let t = tilde_state(&singlet, 2)?;
    let passed = npt == 0 && !t.ppt && (t.min_pt_eigenvalue + 0.125).abs() <= 1e-10;
    Ok((passed, format!("{npt}/100 planted NPT; singlet min PT eigenvalue {:.12}", t.min_pt_eigenvalue)))
}

/// Runs a fixed pipeline and writes its state files and report into `dir`.
pub fn write_certificates(dir: &Path, seed: u64) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let cfg = SolverConfig { seed, ..SolverConfig::default() };
    let meta = |what: &str| Metadata { seed: Some(seed), provenance: Some(what.to_string()) };
    let mut written = Vec::new();
    let mut report = String::new();

    let (rho, _) = gen_random_extendible(3, 2, seed, Profile::ExcludeBosonic)?;
    let p = dir.join("marginal_k3.state");
    io::save_state(&rho, &p, meta("gen k=3 d_A=2 exclude-bosonic"))?;
    written.push(p);

    let r = solve_symmetric(&rho, 3, &cfg)?;
    report.push_str(&r.to_text(Some("symmetric_k3.state")));
    let Some(Certificate::Blocks(bs)) = &r.certificate else {
        return Err(Error::Numerical(format!("planted instance reported {}", r.status)));
    };
    let global = blocks_to_global(bs, &build_schur_basis(3)?)?;
    let p = dir.join("symmetric_k3.state");
    io::save_state(&global, &p, meta("check-sym k=3"))?;
    written.push(p);

    let sigma = sym_to_bos(bs)?;
    let p = dir.join("bosonic_k3.state");
    io::save_bosonic(&sigma, &p, meta("convert k=3"))?;
    written.push(p);

    let (rho2, _) = gen_random_extendible(2, 3, seed + 1, Profile::AllDiagrams)?;
    let r2 = solve_bosonic_k2_generic(&rho2, 2, &cfg)?;
    report.push_str(&r2.to_text(Some("bosonic2_k2.state")));
    if let Some(Certificate::Global(g)) = &r2.certificate {
        let p = dir.join("bosonic2_k2.state");
        io::save_state(g, &p, meta("check-bos2 d_B=2"))?;
        written.push(p);
    }

    let q = fixtures::qutrit_marginal(fixtures::qutrit_coefficients())?;
    let p = dir.join("qutrit_marginal.state");
    io::save_state(&q, &p, meta("antisymmetric qutrit state (1,2,3)/sqrt(28), B_2 traced out"))?;
    written.push(p);

    let p = dir.join("report.txt");
    std::fs::write(&p, report)?;
    written.push(p);
    Ok(written)
}

fn scratch_dir(tag: &str) -> PathBuf {
    use std::sync::atomic::{AtomicUsize, Ordering};
    static COUNTER: AtomicUsize = AtomicUsize::new(0);
    let n = COUNTER.fetch_add(1, Ordering::Relaxed);
    std::env::temp_dir().join(format!("symext-{tag}-{}-{n}", std::process::id()))
}

fn determinism(seed: u64) -> Outcome {
    let dirs = [scratch_dir("a"), scratch_dir("b")];
    let result = (|| -> Outcome {
        let a = write_certificates(&dirs[0], seed)?;
        let b = write_certificates(&dirs[1], seed)?;
        let mut diffs = Vec::new();
        for (x, y) in a.iter().zip(&b) {
            if std::fs::read(x)? != std::fs::read(y)? {
                diffs.push(x.file_name().unwrap_or_default().to_string_lossy().into_owned());
            }
        }
        let passed = a.len() == b.len() && diffs.is_empty();
        Ok((passed, format!("{} files compared, differing: {diffs:?}", a.len())))
    })();
    for d in &dirs {
        let _ = std::fs::remove_dir_all(d);
    }
    result
}

