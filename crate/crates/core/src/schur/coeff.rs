//! Per-diagram coefficient tables used to map general symmetric blocks onto
//! the symmetric subspace.
//!
//! For a diagram of spin `j` on `k` qubits, with `J = k/2`:
//!
//! * `alpha(ω, ω+1) = sqrt((j-ω)(j+ω+1)) / k` is the single-qubit marginal
//!   of the normalized raising cross term.
//! * `p(ω, ω+1) = sqrt((j-ω)(j+ω+1) / ((J-ω)(J+ω+1)))` rescales the
//!   symmetric-sector cross term to reproduce that marginal.
//! * `xi` solves `xi_ω xi_{ω+1} = p(ω, ω+1)` with `|xi_ω| <= 1`, and
//!   `P = xi xi^T + diag(1 - xi^2)` is PSD with unit diagonal.

use num_complex::Complex64 as C64;

use super::young::{HalfInt, YoungDiagram};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// Slack allowed on `|xi| <= 1` for rounding.
const XI_SLACK: f64 = 1e-12;

fn ladder(two_j: i32, omega: HalfInt) -> f64 {
    // (j - ω)(j + ω + 1) in half-integer arithmetic
    let a = (two_j - omega.twice()) as f64 / 2.0;
    let b = (two_j + omega.twice() + 2) as f64 / 2.0;
    (a * b).max(0.0)
}

fn check_weight(lam: &YoungDiagram, omega: HalfInt) -> Result<usize> {
    lam.weight_index(omega)
        .ok_or_else(|| Error::OutOfRange(format!("{omega} is not a weight of {lam}")))
}

/// Raising-pair marginal coefficient; zero unless `omega_p = omega + 1`.
pub fn alpha_coeff(lam: &YoungDiagram, omega: HalfInt, omega_p: HalfInt) -> Result<f64> {
    check_weight(lam, omega)?;
    check_weight(lam, omega_p)?;
    if omega_p != omega.succ() {
        return Ok(0.0);
    }
    Ok(ladder(lam.two_j() as i32, omega).sqrt() / lam.k() as f64)
}

/// Ratio `alpha_lam / alpha_[k,0]` for an adjacent pair, given by the lesser weight.
fn adjacent_p(lam: &YoungDiagram, lower: HalfInt) -> f64 {
    let num = ladder(lam.two_j() as i32, lower);
    let den = ladder(lam.k() as i32, lower);
    (num / den).sqrt()
}

/// Full coefficient table of one diagram, weights ascending.
#[derive(Clone, Debug)]
pub struct CoeffTable {
    diagram: YoungDiagram,
    /// `alpha[i] = alpha(ω_i, ω_{i+1})`
    alpha: Vec<f64>,
    /// `p_adjacent[i] = p(ω_i, ω_{i+1})`
    p_adjacent: Vec<f64>,
    xi: Vec<f64>,
}

impl CoeffTable {
    pub fn new(lam: &YoungDiagram) -> Result<Self> {
        let weights = lam.weights();
        let n = weights.len();
        let alpha: Vec<f64> =
            weights.iter().take(n - 1).map(|&w| ladder(lam.two_j() as i32, w).sqrt() / lam.k() as f64).collect();
        let p_adjacent: Vec<f64> = weights.iter().take(n - 1).map(|&w| adjacent_p(lam, w)).collect();
        let xi = solve_xi(&p_adjacent)?;
        Ok(Self { diagram: *lam, alpha, p_adjacent, xi })
    }

    pub fn diagram(&self) -> YoungDiagram {
        self.diagram
    }

    pub fn alpha_raising(&self) -> &[f64] {
        &self.alpha
    }

    pub fn p_adjacent(&self) -> &[f64] {
        &self.p_adjacent
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    /// `P[a][b]`, by weight index.
    pub fn p_entry(&self, a: usize, b: usize) -> f64 {
        if a == b {
            1.0
        } else {
            self.xi[a] * self.xi[b]
        }
    }

    /// `P = xi xi^T + diag(1 - xi^2)` as a complex matrix with real entries.
    pub fn p_matrix(&self) -> ComplexMatrix {
        let n = self.xi.len();
        ComplexMatrix::from_fn(n, n, |a, b| C64::new(self.p_entry(a, b), 0.0))
    }
}

/// Anchors at the adjacent pair of largest `p` and extends outward with
/// `xi_ω xi_{ω+1} = p_ω`.
fn solve_xi(p: &[f64]) -> Result<Vec<f64>> {
    let n = p.len() + 1;
    if n == 1 {
        return Ok(vec![1.0]);
    }
    let (anchor, &pmax) = p
        .iter()
        .enumerate()
        .fold((0, &p[0]), |best, (i, v)| if *v > *best.1 { (i, v) } else { best });
    let mut xi = vec![0.0; n];
    xi[anchor] = pmax.sqrt();
    xi[anchor + 1] = pmax.sqrt();
    for i in (0..anchor).rev() {
        xi[i] = p[i] / xi[i + 1];
    }
    for i in anchor + 1..n - 1 {
        xi[i + 1] = p[i] / xi[i];
    }
    if let Some(bad) = xi.iter().find(|x| !x.is_finite() || x.abs() > 1.0 + XI_SLACK) {
        return Err(Error::Numerical(format!("xi coefficient {bad} exceeds one")));
    }
    Ok(xi)
}

/// Coefficient `p(ω, ω')`: one on the diagonal, the ladder ratio for adjacent
/// weights and `xi_ω xi_ω'` otherwise.
pub fn p_coeff(lam: &YoungDiagram, omega: HalfInt, omega_p: HalfInt) -> Result<f64> {
    let a = check_weight(lam, omega)?;
    let b = check_weight(lam, omega_p)?;
    if a == b {
        return Ok(1.0);
    }
    if a.abs_diff(b) == 1 {
        return Ok(adjacent_p(lam, omega.min(omega_p)));
    }
    Ok(CoeffTable::new(lam)?.p_entry(a, b))
}

/// The PSD coefficient matrix `P` of a diagram.
pub fn coeff_matrix_p(lam: &YoungDiagram) -> Result<ComplexMatrix> {
    Ok(CoeffTable::new(lam)?.p_matrix())
}
