//! Analytic reference states.

use num_complex::Complex64 as C64;

use crate::error::Result;
use crate::linalg::{partial_trace, tensor_product, ComplexMatrix, DensityMatrix, KetVector, SystemLayout};

fn ket3(bits: &[(&str, f64)], d: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); d * d * d];
    for (s, amp) in bits {
        let idx = s.bytes().fold(0, |acc, b| acc * d + (b - b'0') as usize);
        v[idx] += *amp;
    }
    v
}

/// File text of the qutrit counterexample marginal, written by the build script.
pub const QUTRIT_MARGINAL_FILE: &str = include_str!(concat!(env!("OUT_DIR"), "/qutrit_marginal.state"));

/// Coefficients `(1, 2, 3)/√28` of the qutrit counterexample.
pub fn qutrit_coefficients() -> [f64; 3] {
    let n = 28f64.sqrt();
    [1.0 / n, 2.0 / n, 3.0 / n]
}

/// `α(|012>-|021>) + β(|120>-|102>) + γ(|201>-|210>)` on three qutrits,
/// antisymmetric in the last two.
pub fn qutrit_antisymmetric_vector(alpha: C64, beta: C64, gamma: C64) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); 27];
    let mut put = |s: &str, c: C64| {
        let idx = s.bytes().fold(0, |acc, b| acc * 3 + (b - b'0') as usize);
        v[idx] += c;
    };
    put("012", alpha);
    put("021", -alpha);
    put("120", beta);
    put("102", -beta);
    put("201", gamma);
    put("210", -gamma);
    v
}

/// Pure state on `A ⊗ B_1 ⊗ B_2` for real coefficients, normalized.
pub fn qutrit_extension(coeffs: [f64; 3]) -> Result<DensityMatrix> {
    let [a, b, g] = coeffs.map(|x| C64::new(x, 0.0));
    DensityMatrix::pure(&qutrit_antisymmetric_vector(a, b, g), SystemLayout::new(vec![3, 3, 3])?)
}

/// `Tr_{B_2}` of [`qutrit_extension`].
pub fn qutrit_marginal(coeffs: [f64; 3]) -> Result<DensityMatrix> {
    qutrit_extension(coeffs)?.reduce(&[0, 1])
}

/// Upper bound on the summed residual diagonal left after peeling the three
/// off-diagonal pairs with `p q* = αβ*`, `s t* = αγ*`, `u v* = βγ*`:
/// `|α|²+|β|²+|γ|² - 2(|αβ|+|αγ|+|βγ|)`, since `|p|²+|q|² >= 2|pq|`.
pub fn peeling_residual_bound(coeffs: [f64; 3]) -> f64 {
    let [a, b, g] = coeffs.map(f64::abs);
    a * a + b * b + g * g - 2.0 * (a * b + a * g + b * g)
}

/// Spin-1/2 multiplet with two zeros and one one, in the ordering `B_1 B_2 B_3`.
pub fn k3_lower_pair() -> [KetVector; 2] {
    let s6 = 6f64.sqrt();
    let s2 = 2f64.sqrt();
    [
        KetVector::new(ket3(&[("001", 2.0 / s6), ("010", -1.0 / s6), ("100", -1.0 / s6)], 2)),
        KetVector::new(ket3(&[("010", 1.0 / s2), ("100", -1.0 / s2)], 2)),
    ]
}

/// Spin-1/2 multiplet with one zero and two ones.
pub fn k3_upper_pair() -> [KetVector; 2] {
    let s6 = 6f64.sqrt();
    let s2 = 2f64.sqrt();
    [
        KetVector::new(ket3(&[("110", 2.0 / s6), ("101", -1.0 / s6), ("011", -1.0 / s6)], 2)),
        KetVector::new(ket3(&[("101", 1.0 / s2), ("011", -1.0 / s2)], 2)),
    ]
}

/// Weight `∓1/2` Dicke vectors on three qubits.
pub fn k3_dicke_pair() -> [KetVector; 2] {
    let s3 = 3f64.sqrt();
    [
        KetVector::new(ket3(&[("001", 1.0 / s3), ("010", 1.0 / s3), ("100", 1.0 / s3)], 2)),
        KetVector::new(ket3(&[("110", 1.0 / s3), ("101", 1.0 / s3), ("011", 1.0 / s3)], 2)),
    ]
}

/// `ρ̃_A ⊗ Π_lower/2 + ρ̄_A ⊗ Π_upper/2 + (ρ̂_A ⊗ ½Σ_i|lower_i><upper_i| + h.c.)`
/// on `A ⊗ (C^2)^{⊗3}`, from a PSD matrix `m = [[ρ̃, 2ρ̂],[2ρ̂†, ρ̄]]` of size `2 d_A`.
pub fn k3_state(m: &ComplexMatrix) -> Result<DensityMatrix> {
    let d_a = m.rows() / 2;
    let tilde = m.submatrix(0, 0, d_a, d_a);
    let bar = m.submatrix(d_a, d_a, d_a, d_a);
    let hat = m.submatrix(0, d_a, d_a, d_a).scale(0.5);
    let lower = k3_lower_pair();
    let upper = k3_upper_pair();
    let half = |x: &KetVector, y: &KetVector| ComplexMatrix::outer(x.as_slice(), y.as_slice()).scale(0.5);
    let pi_lower = &half(&lower[0], &lower[0]) + &half(&lower[1], &lower[1]);
    let pi_upper = &half(&upper[0], &upper[0]) + &half(&upper[1], &upper[1]);
    let cross = &half(&lower[0], &upper[0]) + &half(&lower[1], &upper[1]);
    let hat_term = tensor_product(&hat, &cross);
    let total = &(&(&tensor_product(&tilde, &pi_lower) + &tensor_product(&bar, &pi_upper)) + &hat_term)
        + &hat_term.adjoint();
    let tr = total.trace().re;
    DensityMatrix::new(total.scale(1.0 / tr), SystemLayout::extension(d_a, 2, 3)?)
}

/// `(|01> - |10>)/√2`.
pub fn singlet() -> KetVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    KetVector::from_real(&[0.0, h, -h, 0.0])
}

/// `(|01> + |10>)/√2`.
pub fn triplet_zero() -> KetVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    KetVector::from_real(&[0.0, h, h, 0.0])
}

/// `|ξ><ξ|_A ⊗ |ψ⁻><ψ⁻|` on `A ⊗ B_1 ⊗ B_2`, an antisymmetric two-copy extension.
pub fn fermionic_witness(xi: &KetVector) -> Result<DensityMatrix> {
    let m = tensor_product(&xi.projector(), &singlet().projector());
    DensityMatrix::new(m, SystemLayout::extension(xi.dim(), 2, 2)?)
}

/// `(A, B_1)` marginal of [`fermionic_witness`].
pub fn fermionic_marginal(xi: &KetVector) -> Result<DensityMatrix> {
    let w = fermionic_witness(xi)?;
    let m = partial_trace(w.matrix(), w.layout(), &[0, 1])?;
    DensityMatrix::new(m, SystemLayout::new(vec![xi.dim(), 2])?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qutrit_state_is_antisymmetric_and_normalized() {
        let ext = qutrit_extension(qutrit_coefficients()).unwrap();
        assert!((ext.matrix().trace().re - 1.0).abs() < 1e-15);
        let swapped = crate::linalg::permute_subsystems(ext.matrix(), ext.layout(), &[0, 2, 1]).unwrap();
        assert!(swapped.max_abs_diff(ext.matrix()) < 1e-15);
        let marg = qutrit_marginal(qutrit_coefficients()).unwrap();
        // diagonal: |α|² on |01>,|02>
        assert!((marg.matrix()[(1, 1)].re - 1.0 / 28.0).abs() < 1e-15);
        // off-diagonal -αβ* on |01><10|
        assert!((marg.matrix()[(1, 3)].re + 2.0 / 28.0).abs() < 1e-15);
    }

    #[test]
    fn shipped_fixture_matches_analytic_marginal() {
        let file = crate::io::MatrixFile::parse(QUTRIT_MARGINAL_FILE).unwrap();
        assert_eq!(file.layout, vec![3, 3]);
        let marg = qutrit_marginal(qutrit_coefficients()).unwrap();
        assert!(file.matrix.max_abs_diff(marg.matrix()) < 1e-16);
    }

    #[test]
    fn peeling_bound_is_negative_for_counterexample() {
        assert!((peeling_residual_bound(qutrit_coefficients()) + 8.0 / 28.0).abs() < 1e-15);
        let e = 1.0 / 3f64.sqrt();
        assert!(peeling_residual_bound([e, e, e]) < 0.0);
    }

    #[test]
    fn k3_vectors_are_orthonormal() {
        let all: Vec<KetVector> =
            k3_lower_pair().into_iter().chain(k3_upper_pair()).chain(k3_dicke_pair()).collect();
        for (i, u) in all.iter().enumerate() {
            for (j, v) in all.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((u.inner(v) - expect).norm() < 1e-15, "{i} {j}");
            }
        }
    }

    #[test]
    fn fermionic_marginal_is_product_with_mixed_b() {
        let xi = KetVector::normalized(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)]).unwrap();
        let m = fermionic_marginal(&xi).unwrap();
        let expect = tensor_product(&xi.projector(), &ComplexMatrix::identity(2).scale(0.5));
        assert!(m.matrix().max_abs_diff(&expect) < 1e-15);
    }
}
