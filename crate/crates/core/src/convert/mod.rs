//! Symmetric-to-bosonic conversion, extension verification and the
//! tilde-state screen.

use std::fmt::Write as _;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::extend::{marginal_from_blocks, BlockState};
use crate::limits;
use crate::linalg::{
    min_eigenvalue, partial_trace, partial_transpose, permute_subsystems, tensor_product, ComplexMatrix,
    DensityMatrix, SystemLayout,
};
use crate::schur::{coeff_matrix_p, dicke, hook_dim, HalfInt, YoungDiagram};
use crate::tol;

/// Largest `k` for which verification embeds into the full `2^k` space.
pub const MAX_K_EMBEDDED_CHECKS: usize = 8;

/// A state on `A ⊗ Sym^k(C^2)`, indexed `(a, weight)` with the weight ascending.
#[derive(Clone, Debug)]
pub struct BosonicState {
    d_a: usize,
    k: usize,
    matrix: ComplexMatrix,
}

impl BosonicState {
    pub fn new(d_a: usize, k: usize, matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(d_a, k, matrix, tol::PSD)
    }

    pub fn with_tolerance(d_a: usize, k: usize, matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        limits::check_block(k)?;
        let n = d_a * (k + 1);
        if matrix.rows() != n || matrix.cols() != n {
            return Err(Error::Dimension(format!("bosonic state must be {n}x{n}, got {}x{}", matrix.rows(), matrix.cols())));
        }
        let layout = SystemLayout::new(vec![d_a, k + 1])?;
        let rho = DensityMatrix::with_tolerance(matrix, layout, tol)?;
        Ok(Self { d_a, k, matrix: rho.into_matrix() })
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// The same state as a single `[k,0]` block.
    pub fn to_block_state(&self) -> BlockState {
        let lam = YoungDiagram::symmetric(self.k).expect("k >= 1");
        BlockState::new_unchecked(self.k, self.d_a, vec![(lam, self.matrix.clone())])
    }

    /// Wraps a block state that carries weight only on `[k,0]`.
    pub fn from_block_state(bs: &BlockState) -> Result<Self> {
        if !bs.is_bosonic() {
            return Err(Error::InvalidInput("block state has weight outside the symmetric diagram".into()));
        }
        let lam = YoungDiagram::symmetric(bs.k())?;
        let n = bs.d_a() * (bs.k() + 1);
        let m = bs.block(&lam).cloned().unwrap_or_else(|| ComplexMatrix::zeros(n, n));
        Self::new(bs.d_a(), bs.k(), m)
    }

    /// Full operator on `A ⊗ (C^2)^{⊗k}` through the Dicke vectors.
    pub fn embed(&self) -> Result<DensityMatrix> {
        limits::check_full(self.k)?;
        let k = self.k;
        let nb = 1usize << k;
        let dickes: Vec<Vec<(usize, f64)>> = (0..=k)
            .map(|t| {
                let v = dicke(k, HalfInt::from_twice(2 * t as i32 - k as i32))?;
                Ok(v.as_slice().iter().enumerate().filter(|(_, z)| z.norm() > 0.0).map(|(i, z)| (i, z.re)).collect())
            })
            .collect::<Result<_>>()?;
        let n = self.d_a * nb;
        let mut out = ComplexMatrix::zeros(n, n);
        let w = k + 1;
        for a in 0..self.d_a {
            for s in 0..w {
                for a2 in 0..self.d_a {
                    for t in 0..w {
                        let v = self.matrix[(a * w + s, a2 * w + t)];
                        if v.re == 0.0 && v.im == 0.0 {
                            continue;
                        }
                        for &(i, x) in &dickes[s] {
                            for &(j, y) in &dickes[t] {
                                out[(a * nb + i, a2 * nb + j)] += v * (x * y);
                            }
                        }
                    }
                }
            }
        }
        Ok(DensityMatrix::new_unchecked(out, SystemLayout::extension(self.d_a, 2, k)?))
    }
}

/// Position of a diagram weight among the `k + 1` symmetric weights.
fn symmetric_slot(k: usize, omega: HalfInt) -> usize {
    ((omega.twice() + k as i32) / 2) as usize
}

/// `X_λ ∘ (J_A ⊗ P^λ)` for one block.
pub fn weighted_block(d_a: usize, lam: &YoungDiagram, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let p = coeff_matrix_p(lam)?;
    let nw = lam.num_weights();
    if x.rows() != d_a * nw || x.cols() != d_a * nw {
        return Err(Error::Dimension(format!("block {lam} must be {0}x{0}", d_a * nw)));
    }
    Ok(ComplexMatrix::from_fn(x.rows(), x.cols(), |r, c| x[(r, c)] * p[(r % nw, c % nw)].re))
}

/// Converts a symmetric extension into a bosonic one with the same two-party
/// marginal: `σ = Σ_λ d_λ Embed_λ(X_λ ∘ (J_A ⊗ P^λ))`.
pub fn sym_to_bos(bs: &BlockState) -> Result<BosonicState> {
    let (k, d_a) = (bs.k(), bs.d_a());
    let w = k + 1;
    let mut sigma = ComplexMatrix::zeros(d_a * w, d_a * w);
    for (lam, x) in bs.blocks() {
        let y = weighted_block(d_a, lam, x)?;
        let d = hook_dim(lam) as f64;
        let nw = lam.num_weights();
        let slots: Vec<usize> = lam.weights().into_iter().map(|om| symmetric_slot(k, om)).collect();
        for a in 0..d_a {
            for (s, &ss) in slots.iter().enumerate() {
                for a2 in 0..d_a {
                    for (t, &tt) in slots.iter().enumerate() {
                        sigma[(a * w + ss, a2 * w + tt)] += y[(a * nw + s, a2 * nw + t)] * d;
                    }
                }
            }
        }
    }
    BosonicState::new(d_a, k, sigma)
}

/// An extension to verify: compact bosonic, or explicit on `A ⊗ B^{⊗k}`.
#[derive(Clone, Copy, Debug)]
pub enum Extension<'a> {
    Bosonic(&'a BosonicState),
    Full(&'a DensityMatrix),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub passed: bool,
    /// the measured defect
    pub value: f64,
}

impl Check {
    fn at_most(value: f64, tol: f64) -> Self {
        Self { passed: value <= tol, value }
    }
}

#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub psd: Check,
    pub trace: Check,
    /// worst `(A, B_i)` marginal deviation over `i`
    pub marginals: Check,
    pub permutation: Check,
    /// weight outside `A ⊗ Sym^k`
    pub symmetric_support: Check,
    /// true when marginals were checked through the analytic weight formulas
    pub analytic: bool,
}

impl VerificationReport {
    /// Checks (a) to (d): a valid symmetric extension.
    pub fn is_symmetric_extension(&self) -> bool {
        self.psd.passed && self.trace.passed && self.marginals.passed && self.permutation.passed
    }

    /// All checks, including support on the symmetric subspace.
    pub fn is_bosonic_extension(&self) -> bool {
        self.is_symmetric_extension() && self.symmetric_support.passed
    }

    pub fn to_text(&self) -> String {
        let line = |s: &mut String, name: &str, c: &Check| {
            let _ = writeln!(s, "{name}: {} ({:.3e})", if c.passed { "PASS" } else { "FAIL" }, c.value);
        };
        let mut s = String::new();
        line(&mut s, "psd", &self.psd);
        line(&mut s, "trace", &self.trace);
        line(&mut s, "marginals", &self.marginals);
        line(&mut s, "permutation", &self.permutation);
        line(&mut s, "symmetric_support", &self.symmetric_support);
        let _ = writeln!(s, "marginal_method: {}", if self.analytic { "analytic" } else { "embedded" });
        s
    }
}

/// Sorted tuples of `k` levels out of `d`, one per symmetric basis vector.
fn multisets(k: usize, d: usize) -> Vec<Vec<usize>> {
    fn go(k: usize, d: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..d {
            cur.push(v);
            go(k, d, v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(k, d, 0, &mut Vec::new(), &mut out);
    out
}

/// Normalized symmetric vector for an occupation multiset, as sparse `(index, amp)`.
fn symmetric_vector(levels: &[usize], d: usize) -> Vec<(usize, f64)> {
    let k = levels.len();
    let mut support = Vec::new();
    for idx in 0..d.pow(k as u32) {
        let mut digits = Vec::with_capacity(k);
        let mut r = idx;
        for _ in 0..k {
            digits.push(r % d);
            r /= d;
        }
        digits.sort_unstable();
        if digits == levels {
            support.push(idx);
        }
    }
    let amp = 1.0 / (support.len() as f64).sqrt();
    support.into_iter().map(|i| (i, amp)).collect()
}

/// `tr((1 - 1_A ⊗ Π_sym) σ)` on `A ⊗ (C^d)^{⊗k}`.
fn nonsymmetric_weight(m: &ComplexMatrix, d_a: usize, d_b: usize, k: usize) -> f64 {
    let nb = d_b.pow(k as u32);
    let mut inside = 0.0;
    for levels in multisets(k, d_b) {
        let v = symmetric_vector(&levels, d_b);
        for a in 0..d_a {
            let mut acc = C64::new(0.0, 0.0);
            for &(i, x) in &v {
                for &(j, y) in &v {
                    acc += m[(a * nb + i, a * nb + j)] * (x * y);
                }
            }
            inside += acc.re;
        }
    }
    m.trace().re - inside
}

fn full_checks(sigma: &DensityMatrix, rho_ab: &ComplexMatrix, k: usize, tol: f64, skip_psd: bool) -> Result<[Check; 4]> {
    let layout = sigma.layout();
    let dims = layout.dims();
    let (d_a, d_b) = (dims[0], dims[1]);
    let m = sigma.matrix();
    let psd = if skip_psd { Check::at_most(0.0, tol) } else { Check::at_most((-min_eigenvalue(m)?).max(0.0), tol) };
    let mut marg = 0.0f64;
    for i in 1..=k {
        let r = partial_trace(m, layout, &[0, i])?;
        marg = marg.max(r.max_abs_diff(rho_ab));
    }
    let mut perm = 0.0f64;
    for i in 1..k {
        let mut p: Vec<usize> = (0..=k).collect();
        p.swap(i, i + 1);
        perm = perm.max(permute_subsystems(m, layout, &p)?.max_abs_diff(m));
    }
    let support = nonsymmetric_weight(m, d_a, d_b, k).abs();
    Ok([psd, Check::at_most(marg, tol), Check::at_most(perm, tol), Check::at_most(support, tol)])
}

/// Checks that `sigma` is a `k`-copy extension of `rho_ab`; failures are
/// reported, not raised.
pub fn verify_extension(sigma: Extension<'_>, rho_ab: &DensityMatrix, k: usize, tol: f64) -> Result<VerificationReport> {
    let rd = rho_ab.layout().dims();
    if rd.len() != 2 {
        return Err(Error::Dimension(format!("marginal layout must have two parties, got {rd:?}")));
    }
    let (d_a, d_b) = (rd[0], rd[1]);
    match sigma {
        Extension::Bosonic(b) => {
            if b.d_a() != d_a || d_b != 2 || b.k() != k {
                return Err(Error::Dimension(format!(
                    "bosonic state (d_A={}, k={}) does not match marginal {rd:?} at k = {k}",
                    b.d_a(),
                    b.k()
                )));
            }
            let psd = Check::at_most((-min_eigenvalue(b.matrix())?).max(0.0), tol);
            let trace = Check::at_most((b.matrix().trace().re - 1.0).abs(), tol);
            if k <= MAX_K_EMBEDDED_CHECKS {
                let full = b.embed()?;
                let [_, marginals, permutation, symmetric_support] = full_checks(&full, rho_ab.matrix(), k, tol, true)?;
                Ok(VerificationReport { psd, trace, marginals, permutation, symmetric_support, analytic: false })
            } else {
                // Dicke embeddings are permutation invariant and symmetric by construction
                let m = marginal_from_blocks(&b.to_block_state());
                Ok(VerificationReport {
                    psd,
                    trace,
                    marginals: Check::at_most(m.matrix().max_abs_diff(rho_ab.matrix()), tol),
                    permutation: Check::at_most(0.0, tol),
                    symmetric_support: Check::at_most(0.0, tol),
                    analytic: true,
                })
            }
        }
        Extension::Full(s) => {
            let expect = SystemLayout::extension(d_a, d_b, k)?;
            if s.layout() != &expect {
                return Err(Error::Dimension(format!("extension layout {:?} is not {:?}", s.layout().dims(), expect.dims())));
            }
            let trace = Check::at_most((s.matrix().trace().re - 1.0).abs(), tol);
            let [psd, marginals, permutation, symmetric_support] = full_checks(s, rho_ab.matrix(), k, tol, false)?;
            Ok(VerificationReport { psd, trace, marginals, permutation, symmetric_support, analytic: false })
        }
    }
}

#[derive(Clone, Debug)]
pub struct TildeResult {
    pub state: DensityMatrix,
    /// partial transpose on `B` has no eigenvalue below `-PPT_TOL`
    pub ppt: bool,
    pub min_pt_eigenvalue: f64,
}

pub const PPT_TOL: f64 = 1e-10;

/// `(ρ_A ⊗ I + kρ)/(k+2)` for a qubit `B`, `(d_B ρ_A ⊗ I + kρ)/(d_B² + k)` otherwise,
/// with a PPT screen.
pub fn tilde_state(rho_ab: &DensityMatrix, k: usize) -> Result<TildeResult> {
    let dims = rho_ab.layout().dims();
    if dims.len() != 2 {
        return Err(Error::Dimension(format!("expected a bipartite layout, got {dims:?}")));
    }
    if k == 0 {
        return Err(Error::OutOfRange("k must be at least 1".into()));
    }
    let d_b = dims[1];
    let rho_a = partial_trace(rho_ab.matrix(), rho_ab.layout(), &[0])?;
    let mixed = tensor_product(&rho_a, &ComplexMatrix::identity(d_b));
    let kf = k as f64;
    let m = if d_b == 2 {
        (&mixed + &rho_ab.matrix().scale(kf)).scale(1.0 / (kf + 2.0))
    } else {
        let db = d_b as f64;
        (&mixed.scale(db) + &rho_ab.matrix().scale(kf)).scale(1.0 / (db * db + kf))
    };
    let state = DensityMatrix::new(m, rho_ab.layout().clone())?;
    let pt = partial_transpose(state.matrix(), state.layout(), 1)?;
    let min_pt_eigenvalue = min_eigenvalue(&pt)?;
    Ok(TildeResult { state, ppt: min_pt_eigenvalue >= -PPT_TOL, min_pt_eigenvalue })
}

#[cfg(test)]
mod tests;
