//! Dense Hermitian linear algebra on tensor-product spaces.
//!
//! Subsystem 0 is the leftmost tensor factor and the most significant digit
//! of the computational-basis index.

mod eigen;
mod matrix;

pub use eigen::{eigh, eigvalsh, HermitianEigen};
pub use matrix::{ComplexMatrix, KetVector};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::tol;

/// Ordered subsystem dimensions, e.g. `[d_A, 2, 2, 2]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SystemLayout {
    dims: Vec<usize>,
}

impl SystemLayout {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidInput(format!("bad layout {dims:?}")));
        }
        Ok(Self { dims })
    }

    /// `[d_a, d_b, d_b, ..., d_b]` with `k` copies of `d_b`.
    pub fn extension(d_a: usize, d_b: usize, k: usize) -> Result<Self> {
        let mut dims = vec![d_a];
        dims.extend(std::iter::repeat(d_b).take(k));
        Self::new(dims)
    }

    #[inline]
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Place value of each subsystem's digit in the flat index.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for s in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[s] = strides[s + 1] * self.dims[s + 1];
        }
        strides
    }

    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for s in (0..self.dims.len()).rev() {
            out[s] = index % self.dims[s];
            index /= self.dims[s];
        }
        out
    }
}

/// Hermitian, PSD, unit-trace matrix with a subsystem layout.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    layout: SystemLayout,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix, layout: SystemLayout) -> Result<Self> {
        Self::with_tolerance(matrix, layout, tol::PSD)
    }

    /// Validates Hermiticity, unit trace and positivity at `tol`.
    pub fn with_tolerance(matrix: ComplexMatrix, layout: SystemLayout, tol: f64) -> Result<Self> {
        check_layout(&matrix, &layout)?;
        let defect = matrix.hermiticity_defect();
        if defect > tol.max(tol::HERMITIAN) {
            return Err(Error::InvalidInput(format!("matrix is not Hermitian (defect {defect:.3e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > tol.max(tol::TRACE) || tr.im.abs() > tol.max(tol::TRACE) {
            return Err(Error::InvalidInput(format!("trace {:.12} is not one", tr.re)));
        }
        let min = min_eigenvalue(&matrix)?;
        if min < -tol {
            return Err(Error::InvalidInput(format!("matrix is not PSD (min eigenvalue {min:.3e})")));
        }
        Ok(Self { matrix, layout })
    }

    pub(crate) fn new_unchecked(matrix: ComplexMatrix, layout: SystemLayout) -> Self {
        debug_assert_eq!(matrix.rows(), layout.total_dim());
        Self { matrix, layout }
    }

    /// `|psi><psi|` for a (not necessarily normalized) vector.
    pub fn pure(psi: &[C64], layout: SystemLayout) -> Result<Self> {
        let ket = KetVector::normalized(psi.to_vec())?;
        Self::new(ket.projector(), layout)
    }

    pub fn maximally_mixed(layout: SystemLayout) -> Self {
        let n = layout.total_dim();
        Self { matrix: ComplexMatrix::identity(n).scale(1.0 / n as f64), layout }
    }

    pub fn product(a: &DensityMatrix, b: &DensityMatrix) -> Self {
        let mut dims = a.layout.dims.clone();
        dims.extend_from_slice(&b.layout.dims);
        Self { matrix: tensor_product(&a.matrix, &b.matrix), layout: SystemLayout { dims } }
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    #[inline]
    pub fn layout(&self) -> &SystemLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Reduced state on the subsystems in `keep`.
    pub fn reduce(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let m = partial_trace(&self.matrix, &self.layout, keep)?;
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        let dims = keep.iter().map(|&s| self.layout.dims[s]).collect();
        Ok(Self { matrix: m, layout: SystemLayout { dims } })
    }
}

fn check_layout(m: &ComplexMatrix, layout: &SystemLayout) -> Result<()> {
    if !m.is_square() || m.rows() != layout.total_dim() {
        return Err(Error::Dimension(format!(
            "{}x{} matrix does not match layout {:?}",
            m.rows(),
            m.cols(),
            layout.dims
        )));
    }
    Ok(())
}

/// Kronecker product `a ⊗ b`.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(a.rows() * br, a.cols() * bc, |r, c| a[(r / br, c / bc)] * b[(r % br, c % bc)])
}

/// Traces out every subsystem not listed in `keep`. Kept subsystems stay in
/// their original relative order.
pub fn partial_trace(m: &ComplexMatrix, layout: &SystemLayout, keep: &[usize]) -> Result<ComplexMatrix> {
    check_layout(m, layout)?;
    let nsys = layout.len();
    let mut kept = vec![false; nsys];
    for &s in keep {
        if s >= nsys {
            return Err(Error::Dimension(format!("subsystem {s} not in layout of {nsys}")));
        }
        if kept[s] {
            return Err(Error::InvalidInput(format!("subsystem {s} listed twice")));
        }
        kept[s] = true;
    }
    let dims = layout.dims();
    let kept_dim: usize = (0..nsys).filter(|&s| kept[s]).map(|s| dims[s]).product();
    let traced_dim = layout.total_dim() / kept_dim;

    // split every flat index into (kept part, traced part)
    let n = layout.total_dim();
    let mut groups: Vec<Vec<(usize, usize)>> = vec![Vec::with_capacity(kept_dim); traced_dim];
    for idx in 0..n {
        let digits = layout.digits(idx);
        let (mut ki, mut ti) = (0, 0);
        for s in 0..nsys {
            if kept[s] {
                ki = ki * dims[s] + digits[s];
            } else {
                ti = ti * dims[s] + digits[s];
            }
        }
        groups[ti].push((ki, idx));
    }

    let mut out = ComplexMatrix::zeros(kept_dim, kept_dim);
    for group in &groups {
        for &(ka, fa) in group {
            let row = m.row(fa);
            for &(kb, fb) in group {
                out[(ka, kb)] += row[fb];
            }
        }
    }
    Ok(out)
}

fn check_permutation(perm: &[usize]) -> Result<()> {
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || seen[p] {
            return Err(Error::InvalidInput(format!("{perm:?} is not a permutation")));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Flat index map of the subsystem permutation: the digit in slot `s` moves
/// to slot `perm[s]`.
pub fn permutation_index_map(layout: &SystemLayout, perm: &[usize]) -> Result<Vec<usize>> {
    if perm.len() != layout.len() {
        return Err(Error::Dimension("permutation length differs from layout".into()));
    }
    check_permutation(perm)?;
    let dims = layout.dims();
    if (0..perm.len()).any(|s| dims[s] != dims[perm[s]]) {
        return Err(Error::InvalidInput("permutation mixes subsystems of different dimension".into()));
    }
    let strides = layout.strides();
    Ok((0..layout.total_dim())
        .map(|idx| {
            let digits = layout.digits(idx);
            digits.iter().enumerate().map(|(s, &d)| d * strides[perm[s]]).sum()
        })
        .collect())
}

/// Permutation operator on `k` subsystems of dimension `local_dim`:
/// `P(π)|i_1..i_k> = |i_{π⁻¹(1)}..i_{π⁻¹(k)}>`, 0-based `perm[s] = π(s)`.
pub fn permutation_operator(k: usize, perm: &[usize], local_dim: usize) -> Result<ComplexMatrix> {
    let layout = SystemLayout::new(vec![local_dim; k])?;
    let map = permutation_index_map(&layout, perm)?;
    let n = layout.total_dim();
    let mut p = ComplexMatrix::zeros(n, n);
    for (col, &row) in map.iter().enumerate() {
        p[(row, col)] = C64::new(1.0, 0.0);
    }
    Ok(p)
}

/// `P m P^†` for the subsystem permutation `perm`, computed by reindexing.
pub fn permute_subsystems(m: &ComplexMatrix, layout: &SystemLayout, perm: &[usize]) -> Result<ComplexMatrix> {
    check_layout(m, layout)?;
    let map = permutation_index_map(layout, perm)?;
    let n = m.rows();
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(map[i], map[j])] = m[(i, j)];
        }
    }
    Ok(out)
}

/// Transposes the indices of subsystem `sys`.
pub fn partial_transpose(m: &ComplexMatrix, layout: &SystemLayout, sys: usize) -> Result<ComplexMatrix> {
    check_layout(m, layout)?;
    if sys >= layout.len() {
        return Err(Error::Dimension(format!("subsystem {sys} not in layout")));
    }
    let stride = layout.strides()[sys];
    let d = layout.dims()[sys];
    let n = m.rows();
    let digit = |i: usize| (i / stride) % d;
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        let (di, dj) = (digit(i), digit(j));
        let i2 = i - di * stride + dj * stride;
        let j2 = j - dj * stride + di * stride;
        m[(i2, j2)]
    }))
}

/// Nearest PSD matrix in Frobenius norm (negative eigenvalues clipped).
pub fn psd_project(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !h.is_square() {
        return Err(Error::Dimension("psd_project needs a square matrix".into()));
    }
    let defect = h.hermiticity_defect();
    if defect > tol::HERMITIAN {
        return Err(Error::InvalidInput(format!("matrix is not Hermitian (defect {defect:.3e})")));
    }
    Ok(psd_clip(h)?.0)
}

/// Clips the spectrum of the Hermitian part of `h` at zero. Also returns the
/// removed negative part `h - P(h)`.
pub(crate) fn psd_clip(h: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let eig = eigh(h)?;
    if eig.values.first().is_none_or(|&v| v >= 0.0) {
        let herm = h.hermitian_part();
        return Ok((herm, ComplexMatrix::zeros(h.rows(), h.cols())));
    }
    let pos = eig.reconstruct_with(|x| x.max(0.0));
    let neg = eig.reconstruct_with(|x| x.min(0.0));
    Ok((pos, neg))
}

/// Smallest eigenvalue of the Hermitian part of `h`.
pub fn min_eigenvalue(h: &ComplexMatrix) -> Result<f64> {
    Ok(eigvalsh(h)?.first().copied().unwrap_or(0.0))
}

pub fn max_eigenvalue(h: &ComplexMatrix) -> Result<f64> {
    Ok(eigvalsh(h)?.last().copied().unwrap_or(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn ket(bits: &[usize], d: usize) -> Vec<C64> {
        let n = d.pow(bits.len() as u32);
        let idx = bits.iter().fold(0, |acc, &b| acc * d + b);
        let mut v = vec![c(0.0); n];
        v[idx] = c(1.0);
        v
    }

    #[test]
    fn identity_tensor_identity() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(tensor_product(&i2, &i2), ComplexMatrix::identity(4));
    }

    #[test]
    fn basis_projector_tensor() {
        let p0 = ComplexMatrix::diag_real(&[1.0, 0.0]);
        let p1 = ComplexMatrix::diag_real(&[0.0, 1.0]);
        assert_eq!(tensor_product(&p0, &p1), ComplexMatrix::diag_real(&[0.0, 1.0, 0.0, 0.0]));
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let s = 0.5f64.sqrt();
        let bell = vec![c(s), c(0.0), c(0.0), c(s)];
        let rho = ComplexMatrix::outer(&bell, &bell);
        let layout = SystemLayout::new(vec![2, 2]).unwrap();
        let red = partial_trace(&rho, &layout, &[0]).unwrap();
        assert!(red.max_abs_diff(&ComplexMatrix::identity(2).scale(0.5)) < 1e-15);
    }

    #[test]
    fn dicke_cross_term_marginal() {
        let s = 0.5f64.sqrt();
        let d0 = vec![c(0.0), c(s), c(s), c(0.0)];
        let top = ket(&[1, 1], 2);
        let m = ComplexMatrix::outer(&d0, &top);
        let layout = SystemLayout::new(vec![2, 2]).unwrap();
        let red = partial_trace(&m, &layout, &[0]).unwrap();
        let mut expect = ComplexMatrix::zeros(2, 2);
        expect[(0, 1)] = c(s);
        assert!(red.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_bad_input() {
        let layout = SystemLayout::new(vec![2, 2]).unwrap();
        assert!(partial_trace(&ComplexMatrix::identity(3), &layout, &[0]).is_err());
        assert!(partial_trace(&ComplexMatrix::identity(4), &layout, &[2]).is_err());
        assert!(partial_trace(&ComplexMatrix::identity(4), &layout, &[0, 0]).is_err());
    }

    #[test]
    fn swap_acts_on_kets() {
        let p = permutation_operator(3, &[1, 0, 2], 2).unwrap();
        let out = p.matvec(&ket(&[0, 1, 1], 2));
        assert_eq!(out, ket(&[1, 0, 1], 2));
    }

    #[test]
    fn cycle_moves_slot_contents() {
        // slot 0 -> 1, 1 -> 2, 2 -> 0
        let p = permutation_operator(3, &[1, 2, 0], 3).unwrap();
        assert_eq!(p.matvec(&ket(&[0, 1, 2], 3)), ket(&[2, 0, 1], 3));
    }

    #[test]
    fn rejects_non_bijection() {
        assert!(permutation_operator(3, &[0, 0, 1], 2).is_err());
        assert!(permutation_operator(2, &[0, 2], 2).is_err());
    }

    #[test]
    fn psd_project_clips() {
        let h = ComplexMatrix::diag_real(&[1.0, -1.0]);
        let p = psd_project(&h).unwrap();
        assert!(p.max_abs_diff(&ComplexMatrix::diag_real(&[1.0, 0.0])) < 1e-15);
    }

    #[test]
    fn psd_project_rejects_non_hermitian() {
        let mut h = ComplexMatrix::identity(2);
        h[(0, 1)] = c(1.0);
        assert!(psd_project(&h).is_err());
    }

    #[test]
    fn min_eigenvalue_examples() {
        assert!((min_eigenvalue(&ComplexMatrix::identity(2)).unwrap() - 1.0).abs() < 1e-15);
        assert!((min_eigenvalue(&ComplexMatrix::diag_real(&[3.0, -2.0])).unwrap() + 2.0).abs() < 1e-15);
    }

    #[test]
    fn density_matrix_validation() {
        let layout = SystemLayout::new(vec![2]).unwrap();
        assert!(DensityMatrix::new(ComplexMatrix::identity(2), layout.clone()).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::diag_real(&[1.5, -0.5]), layout.clone()).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::diag_real(&[0.25, 0.75]), layout.clone()).is_ok());
        assert!(DensityMatrix::new(ComplexMatrix::identity(3).scale(1.0 / 3.0), layout).is_err());
    }

    #[test]
    fn partial_transpose_of_product_is_product_of_transposes() {
        let a = ComplexMatrix::from_fn(2, 2, |i, j| C64::new((i + 2 * j) as f64, i as f64 - j as f64));
        let b = ComplexMatrix::from_fn(3, 3, |i, j| C64::new((i * j) as f64, (i + j) as f64));
        let layout = SystemLayout::new(vec![2, 3]).unwrap();
        let pt = partial_transpose(&tensor_product(&a, &b), &layout, 1).unwrap();
        assert!(pt.max_abs_diff(&tensor_product(&a, &b.transpose())) < 1e-15);
    }
}
