//! Linear maps from block coordinates to the two-party marginal.
//!
//! Each block `X_b` has `slots` internal labels and is indexed with the `A`
//! index major. A term `(s, t, T)` contributes
//! `weight · X_b[(a,s),(a',t)] · T[β,β']` to `rho[(a,β),(a',β')]`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::schur::{hook_dim, CoeffTable, YoungDiagram};

#[derive(Clone, Debug)]
pub(crate) struct MapTerm {
    pub s: usize,
    pub t: usize,
    /// real `d_B x d_B`, row-major
    pub op: Vec<f64>,
}

#[derive(Clone, Debug)]
pub(crate) struct MapBlock {
    pub slots: usize,
    pub weight: f64,
    pub terms: Vec<MapTerm>,
}

#[derive(Clone, Debug)]
pub(crate) struct MarginalMap {
    pub d_a: usize,
    pub d_b: usize,
    pub blocks: Vec<MapBlock>,
}

fn qubit_block(lam: &YoungDiagram) -> Result<MapBlock> {
    let k = lam.k() as f64;
    let weights = lam.weights();
    let alpha = CoeffTable::new(lam)?.alpha_raising().to_vec();
    let mut terms = Vec::with_capacity(3 * weights.len());
    for (s, w) in weights.iter().enumerate() {
        let om = w.as_f64();
        let t0 = (k - 2.0 * om) / (2.0 * k);
        let t1 = (k + 2.0 * om) / (2.0 * k);
        terms.push(MapTerm { s, t: s, op: vec![t0, 0.0, 0.0, t1] });
    }
    for (s, &a) in alpha.iter().enumerate() {
        terms.push(MapTerm { s, t: s + 1, op: vec![0.0, a, 0.0, 0.0] });
        terms.push(MapTerm { s: s + 1, t: s, op: vec![0.0, 0.0, a, 0.0] });
    }
    Ok(MapBlock { slots: weights.len(), weight: hook_dim(lam) as f64, terms })
}

/// Unordered pairs `b <= c` labelling the symmetric basis of two `d`-level legs.
pub(crate) fn sym2_pairs(d: usize) -> Vec<(usize, usize)> {
    (0..d).flat_map(|b| (b..d).map(move |c| (b, c))).collect()
}

/// Amplitudes of the normalized symmetric vector for `(b, c)` as `(x, y, amp)`.
pub(crate) fn sym2_components(b: usize, c: usize) -> Vec<(usize, usize, f64)> {
    if b == c {
        vec![(b, b, 1.0)]
    } else {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        vec![(b, c, h), (c, b, h)]
    }
}

impl MarginalMap {
    /// Map for a qubit `B` side over the listed diagrams of `k`.
    pub fn qubit(k: usize, d_a: usize, diagrams: &[YoungDiagram]) -> Result<Self> {
        let blocks = diagrams
            .iter()
            .map(|lam| {
                if lam.k() != k {
                    return Err(Error::InvalidInput(format!("{lam} is not a diagram of {k} boxes")));
                }
                qubit_block(lam)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { d_a, d_b: 2, blocks })
    }

    /// Map for two copies of a `d_b`-level system restricted to `Sym²`.
    pub fn sym2(d_a: usize, d_b: usize) -> Self {
        let pairs = sym2_pairs(d_b);
        let mut terms = Vec::new();
        for (s, &(b1, b2)) in pairs.iter().enumerate() {
            for (t, &(c1, c2)) in pairs.iter().enumerate() {
                let mut op = vec![0.0; d_b * d_b];
                for (x, y, u) in sym2_components(b1, b2) {
                    for (x2, y2, v) in sym2_components(c1, c2) {
                        if y == y2 {
                            op[x * d_b + x2] += u * v;
                        }
                    }
                }
                if op.iter().any(|&v| v != 0.0) {
                    terms.push(MapTerm { s, t, op });
                }
            }
        }
        Self { d_a, d_b, blocks: vec![MapBlock { slots: pairs.len(), weight: 1.0, terms }] }
    }

    pub fn out_dim(&self) -> usize {
        self.d_a * self.d_b
    }

    pub fn block_dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| self.d_a * b.slots).collect()
    }

    pub fn apply(&self, xs: &[ComplexMatrix]) -> ComplexMatrix {
        let (da, db) = (self.d_a, self.d_b);
        let mut out = ComplexMatrix::zeros(da * db, da * db);
        for (blk, x) in self.blocks.iter().zip(xs) {
            let n = blk.slots;
            for term in &blk.terms {
                for a in 0..da {
                    for a2 in 0..da {
                        let v = x[(a * n + term.s, a2 * n + term.t)] * blk.weight;
                        if v.re == 0.0 && v.im == 0.0 {
                            continue;
                        }
                        for b in 0..db {
                            for b2 in 0..db {
                                let o = term.op[b * db + b2];
                                if o != 0.0 {
                                    out[(a * db + b, a2 * db + b2)] += v * o;
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Adjoint with respect to the Frobenius inner products.
    pub fn adjoint(&self, y: &ComplexMatrix) -> Vec<ComplexMatrix> {
        let (da, db) = (self.d_a, self.d_b);
        self.blocks
            .iter()
            .map(|blk| {
                let n = blk.slots;
                let mut x = ComplexMatrix::zeros(da * n, da * n);
                for term in &blk.terms {
                    for a in 0..da {
                        for a2 in 0..da {
                            let mut acc = C64::new(0.0, 0.0);
                            for b in 0..db {
                                for b2 in 0..db {
                                    let o = term.op[b * db + b2];
                                    if o != 0.0 {
                                        acc += y[(a * db + b, a2 * db + b2)] * o;
                                    }
                                }
                            }
                            x[(a * n + term.s, a2 * n + term.t)] += acc * blk.weight;
                        }
                    }
                }
                x
            })
            .collect()
    }

    /// `L L†` as a matrix on the row-major vectorization of the output space.
    pub fn gram(&self) -> ComplexMatrix {
        let m = self.out_dim();
        let nn = m * m;
        let mut g = ComplexMatrix::zeros(nn, nn);
        for col in 0..nn {
            let mut e = ComplexMatrix::zeros(m, m);
            e.as_mut_slice()[col] = C64::new(1.0, 0.0);
            let img = self.apply(&self.adjoint(&e));
            for (row, v) in img.as_slice().iter().enumerate() {
                g[(row, col)] = *v;
            }
        }
        g
    }
}
