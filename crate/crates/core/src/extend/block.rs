//! Permutation-invariant states in block coordinates.
//!
//! A state on `A ⊗ (C^2)^{⊗k}` that commutes with every permutation of the
//! `B` legs has the form
//!
//! ```text
//! rho = Σ_λ Σ_{a,ω,a',ω'} X_λ[(a,ω),(a',ω')] |a><a'| ⊗ Σ_μ |ω^λ_μ><ω'^λ_μ|
//! ```
//!
//! so it is fully described by one matrix `X_λ` per diagram, indexed with the
//! `A` index major and the weight minor. Its trace is `Σ_λ d_λ tr X_λ`.

use num_complex::Complex64 as C64;

use super::map::MarginalMap;
use crate::error::{Error, Result};
use crate::limits;
use crate::linalg::{min_eigenvalue, ComplexMatrix, DensityMatrix, SystemLayout};
use crate::schur::{hook_dim, list_diagrams, SchurBasis, YoungDiagram};
use crate::tol;

#[derive(Clone, Debug)]
pub struct BlockState {
    k: usize,
    d_a: usize,
    /// present diagrams only, by decreasing `lambda1`
    blocks: Vec<(YoungDiagram, ComplexMatrix)>,
}

impl BlockState {
    /// Validates sizes, Hermiticity, positivity and `Σ d_λ tr X_λ = 1`.
    pub fn new(k: usize, d_a: usize, blocks: Vec<(YoungDiagram, ComplexMatrix)>) -> Result<Self> {
        Self::with_tolerance(k, d_a, blocks, tol::PSD)
    }

    pub fn with_tolerance(
        k: usize,
        d_a: usize,
        mut blocks: Vec<(YoungDiagram, ComplexMatrix)>,
        tol: f64,
    ) -> Result<Self> {
        limits::check_block(k)?;
        if d_a == 0 {
            return Err(Error::InvalidInput("d_A must be positive".into()));
        }
        blocks.sort_by(|a, b| b.0.lambda1().cmp(&a.0.lambda1()));
        for w in blocks.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidInput(format!("diagram {} listed twice", w[0].0)));
            }
        }
        for (lam, x) in &blocks {
            if lam.k() != k {
                return Err(Error::InvalidInput(format!("{lam} is not a diagram of {k} boxes")));
            }
            let n = d_a * lam.num_weights();
            if x.rows() != n || x.cols() != n {
                return Err(Error::Dimension(format!("block {lam} must be {n}x{n}, got {}x{}", x.rows(), x.cols())));
            }
            let defect = x.hermiticity_defect();
            if defect > tol.max(tol::HERMITIAN) {
                return Err(Error::InvalidInput(format!("block {lam} is not Hermitian ({defect:.3e})")));
            }
            let min = min_eigenvalue(x)?;
            if min < -tol {
                return Err(Error::InvalidInput(format!("block {lam} is not PSD (min eigenvalue {min:.3e})")));
            }
        }
        let state = Self { k, d_a, blocks };
        let tr = state.total_trace();
        if (tr - 1.0).abs() > tol.max(tol::TRACE) {
            return Err(Error::InvalidInput(format!("weighted block trace {tr:.12} is not one")));
        }
        Ok(state)
    }

    pub(crate) fn new_unchecked(k: usize, d_a: usize, blocks: Vec<(YoungDiagram, ComplexMatrix)>) -> Self {
        Self { k, d_a, blocks }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn blocks(&self) -> &[(YoungDiagram, ComplexMatrix)] {
        &self.blocks
    }

    pub fn block(&self, lam: &YoungDiagram) -> Option<&ComplexMatrix> {
        self.blocks.iter().find(|(l, _)| l == lam).map(|(_, x)| x)
    }

    /// `Σ_λ d_λ tr X_λ`.
    pub fn total_trace(&self) -> f64 {
        self.blocks.iter().map(|(lam, x)| hook_dim(lam) as f64 * x.trace().re).sum()
    }

    /// True when only the symmetric diagram `[k,0]` carries weight.
    pub fn is_bosonic(&self) -> bool {
        self.blocks.iter().all(|(lam, x)| lam.is_symmetric() || x.max_abs() == 0.0)
    }

    /// Blocks for every diagram of `k`, zero-filled where absent.
    pub(crate) fn dense_blocks(&self) -> Vec<ComplexMatrix> {
        list_diagrams(self.k)
            .expect("k >= 1")
            .iter()
            .map(|lam| {
                self.block(lam).cloned().unwrap_or_else(|| {
                    let n = self.d_a * lam.num_weights();
                    ComplexMatrix::zeros(n, n)
                })
            })
            .collect()
    }
}

/// Two-party marginal `rho_{A B_1}` computed from the per-weight coefficients.
pub fn marginal_from_blocks(bs: &BlockState) -> DensityMatrix {
    let diagrams = list_diagrams(bs.k).expect("k >= 1");
    let map = MarginalMap::qubit(bs.k, bs.d_a, &diagrams).expect("valid diagrams");
    let m = map.apply(&bs.dense_blocks());
    DensityMatrix::new_unchecked(m, SystemLayout::new(vec![bs.d_a, 2]).expect("valid layout"))
}

fn check_basis(k: usize, basis: &SchurBasis) -> Result<()> {
    if basis.k() != k {
        return Err(Error::Dimension(format!("basis is for k = {}, state has k = {k}", basis.k())));
    }
    Ok(())
}

/// `Q[i, i'] = Σ_μ <i|ω_μ><ω'_μ|i'>` on the supports of two weight blocks.
fn weight_pair_overlap(
    sector: &crate::schur::Sector,
    w: usize,
    w2: usize,
) -> (usize, usize, Vec<f64>) {
    let (b1, b2) = (&sector.weight_blocks()[w], &sector.weight_blocks()[w2]);
    let (n1, n2) = (b1.support_len(), b2.support_len());
    let mut q = vec![0.0; n1 * n2];
    for mu in 0..sector.multiplicity() {
        let (r1, r2) = (b1.row(mu), b2.row(mu));
        for (i, &x) in r1.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            for (j, &y) in r2.iter().enumerate() {
                q[i * n2 + j] += x * y;
            }
        }
    }
    (n1, n2, q)
}

/// Assembles the full state on `A ⊗ (C^2)^{⊗k}` from its blocks.
pub fn blocks_to_global(bs: &BlockState, basis: &SchurBasis) -> Result<DensityMatrix> {
    check_basis(bs.k, basis)?;
    let nb = basis.dim();
    let n = bs.d_a * nb;
    let mut rho = ComplexMatrix::zeros(n, n);
    for (lam, x) in &bs.blocks {
        let sector = basis.sector(lam).expect("diagram of k");
        let nw = lam.num_weights();
        for w in 0..nw {
            let sup1 = basis.support(sector.weight_blocks()[w].ones());
            for w2 in 0..nw {
                let sup2 = basis.support(sector.weight_blocks()[w2].ones());
                let (_, n2, q) = weight_pair_overlap(sector, w, w2);
                for a in 0..bs.d_a {
                    for a2 in 0..bs.d_a {
                        let coef = x[(a * nw + w, a2 * nw + w2)];
                        if coef.re == 0.0 && coef.im == 0.0 {
                            continue;
                        }
                        for (i, &gi) in sup1.iter().enumerate() {
                            let row = a * nb + gi;
                            for (j, &gj) in sup2.iter().enumerate() {
                                let qv = q[i * n2 + j];
                                if qv != 0.0 {
                                    rho[(row, a2 * nb + gj)] += coef * qv;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let layout = SystemLayout::extension(bs.d_a, 2, bs.k)?;
    Ok(DensityMatrix::new_unchecked(rho, layout))
}

/// Block coordinates of the permutation-averaged state: cross terms between
/// different diagrams or multiplicity labels are dropped and the diagonal in
/// the multiplicity label is averaged.
pub fn global_to_blocks(rho: &DensityMatrix, basis: &SchurBasis) -> Result<BlockState> {
    let dims = rho.layout().dims();
    let k = basis.k();
    if dims.len() != k + 1 || dims[1..].iter().any(|&d| d != 2) {
        return Err(Error::Dimension(format!("layout {dims:?} is not [d_A, 2 x {k}]")));
    }
    let d_a = dims[0];
    let nb = basis.dim();
    let m = rho.matrix();
    let mut blocks = Vec::new();
    for sector in basis.sectors() {
        let lam = sector.diagram();
        let nw = lam.num_weights();
        let d = sector.multiplicity() as f64;
        let mut x = ComplexMatrix::zeros(d_a * nw, d_a * nw);
        for w in 0..nw {
            let sup1 = basis.support(sector.weight_blocks()[w].ones());
            for w2 in 0..nw {
                let sup2 = basis.support(sector.weight_blocks()[w2].ones());
                let (_, n2, q) = weight_pair_overlap(sector, w, w2);
                for a in 0..d_a {
                    for a2 in 0..d_a {
                        let mut acc = C64::new(0.0, 0.0);
                        for (i, &gi) in sup1.iter().enumerate() {
                            let row = m.row(a * nb + gi);
                            for (j, &gj) in sup2.iter().enumerate() {
                                let qv = q[i * n2 + j];
                                if qv != 0.0 {
                                    acc += row[a2 * nb + gj] * qv;
                                }
                            }
                        }
                        x[(a * nw + w, a2 * nw + w2)] = acc / d;
                    }
                }
            }
        }
        blocks.push((lam, x));
    }
    Ok(BlockState::new_unchecked(k, d_a, blocks))
}
