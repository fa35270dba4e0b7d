//! Hermitian eigendecomposition.
//!
//! Householder reduction of a complex Hermitian matrix to a real symmetric
//! tridiagonal matrix, followed by implicit QL iteration. Fully deterministic:
//! no pivoting choices depend on anything other than the input entries.

use num_complex::Complex64 as C64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

const MAX_QL_ITER: usize = 200;

/// Eigenvalues in ascending order with matching eigenvector columns.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// `V diag(f(values)) V^†`.
    pub fn reconstruct_with(&self, mut f: impl FnMut(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let mapped: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        let v = &self.vectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for (l, &lam) in mapped.iter().enumerate() {
            if lam == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = v[(i, l)] * lam;
                if vi.re == 0.0 && vi.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += vi * v[(j, l)].conj();
                }
            }
        }
        out
    }
}

/// Full eigendecomposition of a Hermitian matrix (only the Hermitian part is used).
pub fn eigh(m: &ComplexMatrix) -> Result<HermitianEigen> {
    let n = check_square(m)?;
    if n == 0 {
        return Ok(HermitianEigen { values: vec![], vectors: ComplexMatrix::zeros(0, 0) });
    }
    let mut a = m.hermitian_part().into_vec();
    let (mut d, mut e, q) = tridiagonalize(&mut a, n, true);
    let mut z = identity_real(n);
    tql2(&mut d, &mut e, Some(&mut z), n)?;
    let q = q.expect("requested");
    // vectors = Q Z, with Z real
    let mut vectors = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for l in 0..n {
            let qil = q[i * n + l];
            if qil.re == 0.0 && qil.im == 0.0 {
                continue;
            }
            for c in 0..n {
                vectors[(i, c)] += qil * z[l * n + c];
            }
        }
    }
    Ok(HermitianEigen { values: d, vectors })
}

/// Eigenvalues only, ascending.
pub fn eigvalsh(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let n = check_square(m)?;
    if n == 0 {
        return Ok(vec![]);
    }
    let mut a = m.hermitian_part().into_vec();
    let (mut d, mut e, _) = tridiagonalize(&mut a, n, false);
    tql2(&mut d, &mut e, None, n)?;
    Ok(d)
}

fn check_square(m: &ComplexMatrix) -> Result<usize> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(m.rows())
}

fn identity_real(n: usize) -> Vec<f64> {
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    z
}

/// Reduces `a` (row-major, Hermitian, overwritten) to `Q T Q^†` with `T` real
/// tridiagonal. Returns `(diag, offdiag, Q)`; `offdiag[i] = T[i, i+1]` and the
/// last entry is zero.
fn tridiagonalize(a: &mut [C64], n: usize, want_q: bool) -> (Vec<f64>, Vec<f64>, Option<Vec<C64>>) {
    let zero = C64::new(0.0, 0.0);
    let mut e = vec![0.0; n];
    let mut q = want_q.then(|| {
        let mut q = vec![zero; n * n];
        for i in 0..n {
            q[i * n + i] = C64::new(1.0, 0.0);
        }
        q
    });
    let mut v = vec![zero; n];
    let mut w = vec![zero; n];

    for k in 0..n.saturating_sub(1) {
        let m = n - k - 1;
        let alpha = a[(k + 1) * n + k];
        let xnorm2: f64 = (k + 2..n).map(|i| a[i * n + k].norm_sqr()).sum();
        if xnorm2 == 0.0 && alpha.im == 0.0 {
            e[k] = alpha.re;
            continue;
        }
        let beta = -(alpha.norm_sqr() + xnorm2).sqrt().copysign(alpha.re);
        let tau = (C64::new(beta, 0.0) - alpha) / beta;
        let scale = C64::new(1.0, 0.0) / (alpha - beta);
        v[0] = C64::new(1.0, 0.0);
        for i in 1..m {
            v[i] = a[(k + 1 + i) * n + k] * scale;
        }
        e[k] = beta;

        // w = tau * A22 v
        for i in 0..m {
            let row = &a[(k + 1 + i) * n + k + 1..(k + 1 + i) * n + n];
            let s: C64 = row.iter().zip(&v[..m]).map(|(x, y)| x * y).sum();
            w[i] = tau * s;
        }
        // w -= (|tau|^2 c / 2) v with c = v^† A22 v, via w^† v = conj(tau) c
        let wv: C64 = w[..m].iter().zip(&v[..m]).map(|(x, y)| x.conj() * y).sum();
        let corr = tau * wv * 0.5;
        for i in 0..m {
            w[i] -= corr * v[i];
        }
        // A22 -= w v^† + v w^†
        for i in 0..m {
            let (wi, vi) = (w[i], v[i]);
            let row = &mut a[(k + 1 + i) * n + k + 1..(k + 1 + i) * n + n];
            for (j, x) in row.iter_mut().enumerate() {
                *x -= wi * v[j].conj() + vi * w[j].conj();
            }
        }
        // Q <- Q H, H = I - tau v v^†
        if let Some(q) = q.as_mut() {
            for r in 0..n {
                let row = &mut q[r * n + k + 1..r * n + n];
                let s: C64 = row.iter().zip(&v[..m]).map(|(x, y)| x * y).sum();
                let s = s * tau;
                for (x, y) in row.iter_mut().zip(&v[..m]) {
                    *x -= s * y.conj();
                }
            }
        }
    }
    let d = (0..n).map(|i| a[i * n + i].re).collect();
    if n > 0 {
        e[n - 1] = 0.0;
    }
    (d, e, q)
}

/// Implicit QL on a symmetric tridiagonal matrix; eigenvalues end up sorted
/// ascending in `d`, eigenvectors (if requested) in the columns of `z`.
fn tql2(d: &mut [f64], e: &mut [f64], mut z: Option<&mut Vec<f64>>, n: usize) -> Result<()> {
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_ITER {
                    return Err(Error::Numerical("QL iteration did not converge".into()));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for x in d.iter_mut().take(n).skip(l + 2) {
                    *x -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = z.as_deref_mut() {
                        for k in 0..n {
                            let zk1 = z[k * n + i + 1];
                            let zk = z[k * n + i];
                            z[k * n + i + 1] = s * zk + c * zk1;
                            z[k * n + i] = c * zk - s * zk1;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    // selection sort, ascending
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for (j, &dj) in d.iter().enumerate().skip(i + 1) {
            if dj < p {
                k = j;
                p = dj;
            }
        }
        if k != i {
            d[k] = d[i];
            d[i] = p;
            if let Some(z) = z.as_deref_mut() {
                for r in 0..n {
                    z.swap(r * n + i, r * n + k);
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn diagonal_input() {
        let m = ComplexMatrix::diag_real(&[3.0, -2.0, 0.5]);
        let vals = eigvalsh(&m).unwrap();
        assert_eq!(vals, vec![-2.0, 0.5, 3.0]);
    }

    #[test]
    fn pauli_y_spectrum() {
        let m = ComplexMatrix::from_vec(2, 2, vec![c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]).unwrap();
        let eig = eigh(&m).unwrap();
        assert!((eig.values[0] + 1.0).abs() < 1e-14);
        assert!((eig.values[1] - 1.0).abs() < 1e-14);
        let back = eig.reconstruct_with(|x| x);
        assert!(back.max_abs_diff(&m) < 1e-14);
    }

    #[test]
    fn complex_offdiagonal_last_step() {
        // only the final reflector carries a phase
        let m = ComplexMatrix::from_vec(
            3,
            3,
            vec![c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.), c(2., 0.), c(0.3, 0.4), c(0., 0.), c(0.3, -0.4), c(-1., 0.)],
        )
        .unwrap();
        let eig = eigh(&m).unwrap();
        let back = eig.reconstruct_with(|x| x);
        assert!(back.max_abs_diff(&m) < 1e-13);
        let vtv = eig.vectors.adjoint().matmul(&eig.vectors);
        assert!(vtv.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-13);
    }

    #[test]
    fn empty_and_scalar() {
        assert!(eigvalsh(&ComplexMatrix::zeros(0, 0)).unwrap().is_empty());
        let one = ComplexMatrix::from_real(1, 1, &[4.0]).unwrap();
        assert_eq!(eigh(&one).unwrap().values, vec![4.0]);
    }

    #[test]
    fn rejects_rectangular() {
        assert!(eigvalsh(&ComplexMatrix::zeros(2, 3)).is_err());
    }
}
