//! Coupled-spin basis of `k` qubits.
//!
//! Qubits are coupled one at a time with Clebsch–Gordan coefficients
//! (Condon–Shortley phases). A basis vector is labelled by its diagram, its
//! coupling path (the multiplicity label) and its weight. In this basis every
//! permutation acts block-diagonally in `(diagram, weight)` with the same
//! matrix for every weight of a diagram.

use std::fmt::Write as _;

use num_complex::Complex64 as C64;

use super::young::{list_diagrams, HalfInt, YoungDiagram};
use crate::error::{Error, Result};
use crate::limits;
use crate::linalg::KetVector;

/// Intermediate spins `j_1 = 1/2, j_2, ..., j_k` of a sequential coupling.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CouplingPath(Vec<u32>);

impl CouplingPath {
    /// Builds a path from twice the intermediate spins, checking the
    /// `±1/2` step rule.
    pub fn from_twice(twice: Vec<u32>) -> Result<Self> {
        if twice.first() != Some(&1) {
            return Err(Error::InvalidInput("coupling path must start at spin 1/2".into()));
        }
        if twice.windows(2).any(|w| w[0].abs_diff(w[1]) != 1) {
            return Err(Error::InvalidInput("coupling path steps must be ±1/2".into()));
        }
        Ok(Self(twice))
    }

    pub fn twice_spins(&self) -> &[u32] {
        &self.0
    }

    pub fn spins(&self) -> Vec<HalfInt> {
        self.0.iter().map(|&t| HalfInt::from_twice(t as i32)).collect()
    }

    pub fn final_two_j(&self) -> u32 {
        *self.0.last().expect("non-empty path")
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Basis vectors of one diagram at one weight, restricted to the
/// computational states of that weight.
#[derive(Clone, Debug)]
pub struct WeightBlock {
    omega: HalfInt,
    /// number of ones in the supporting computational states
    ones: usize,
    /// row-major `multiplicity x support_len`
    amplitudes: Vec<f64>,
    support_len: usize,
}

impl WeightBlock {
    pub fn omega(&self) -> HalfInt {
        self.omega
    }

    pub fn ones(&self) -> usize {
        self.ones
    }

    pub fn support_len(&self) -> usize {
        self.support_len
    }

    /// Amplitudes of the vector with multiplicity label `mu` on the support.
    pub fn row(&self, mu: usize) -> &[f64] {
        &self.amplitudes[mu * self.support_len..(mu + 1) * self.support_len]
    }

    pub fn multiplicity(&self) -> usize {
        self.amplitudes.len() / self.support_len.max(1)
    }
}

/// All basis vectors of one diagram.
#[derive(Clone, Debug)]
pub struct Sector {
    diagram: YoungDiagram,
    paths: Vec<CouplingPath>,
    weights: Vec<WeightBlock>,
}

impl Sector {
    pub fn diagram(&self) -> YoungDiagram {
        self.diagram
    }

    pub fn paths(&self) -> &[CouplingPath] {
        &self.paths
    }

    /// Multiplicity `d` (number of coupling paths).
    pub fn multiplicity(&self) -> usize {
        self.paths.len()
    }

    /// Weight blocks, ascending in weight.
    pub fn weight_blocks(&self) -> &[WeightBlock] {
        &self.weights
    }

    pub fn weight_block(&self, omega: HalfInt) -> Option<&WeightBlock> {
        self.diagram.weight_index(omega).map(|i| &self.weights[i])
    }
}

/// Orthonormal coupled basis of `(C^2)^{⊗k}`.
#[derive(Clone, Debug)]
pub struct SchurBasis {
    k: usize,
    sectors: Vec<Sector>,
    /// computational indices by number of ones, ascending
    supports: Vec<Vec<usize>>,
}

fn cg_coeffs(two_j_old: i32, two_j_new: i32, two_m: i32) -> (f64, f64) {
    // (coefficient of |j_old, m - 1/2>|1>, coefficient of |j_old, m + 1/2>|0>)
    let denom = 2.0 * (two_j_old + 1) as f64;
    let plus = ((two_j_old + two_m + 1) as f64 / denom).max(0.0).sqrt();
    let minus = ((two_j_old - two_m + 1) as f64 / denom).max(0.0).sqrt();
    if two_j_new > two_j_old {
        (plus, minus)
    } else {
        (-minus, plus)
    }
}

impl SchurBasis {
    /// Builds the coupled basis for `k` qubits (`1 <= k <=` the full-space cap).
    pub fn build(k: usize) -> Result<Self> {
        limits::check_full(k)?;

        // Level-t vectors: (path, two_m) -> amplitudes on support(t, ones)
        struct Partial {
            path: Vec<u32>,
            // indexed by (two_m + two_j) / 2
            vecs: Vec<Vec<f64>>,
        }

        let mut positions: Vec<u32> = vec![0, 0]; // t = 1: both supports have one element
        let mut level = vec![Partial { path: vec![1], vecs: vec![vec![1.0], vec![1.0]] }];

        for t in 1..k {
            let new_len = 1usize << (t + 1);
            let supports_new = supports_by_ones(t + 1);
            let mut next = Vec::with_capacity(level.len() * 2);
            for part in &level {
                let tj = *part.path.last().unwrap() as i32;
                for tj_new in [tj - 1, tj + 1] {
                    if tj_new < 0 {
                        continue;
                    }
                    let mut vecs = Vec::with_capacity(tj_new as usize + 1);
                    for w in 0..=tj_new {
                        let tm = -tj_new + 2 * w;
                        let ones = ((t as i32 + 1 + tm) / 2) as usize;
                        let (c1, c0) = cg_coeffs(tj, tj_new, tm);
                        let src = |tm_old: i32| -> Option<&Vec<f64>> {
                            (tm_old.abs() <= tj).then(|| &part.vecs[((tm_old + tj) / 2) as usize])
                        };
                        let from1 = src(tm - 1);
                        let from0 = src(tm + 1);
                        let amps = supports_new[ones]
                            .iter()
                            .map(|&idx| {
                                let old = idx >> 1;
                                let pos = positions[old] as usize;
                                if idx & 1 == 1 {
                                    from1.map_or(0.0, |v| c1 * v[pos])
                                } else {
                                    from0.map_or(0.0, |v| c0 * v[pos])
                                }
                            })
                            .collect();
                        vecs.push(amps);
                    }
                    let mut path = part.path.clone();
                    path.push(tj_new as u32);
                    next.push(Partial { path, vecs });
                }
            }
            level = next;
            let mut pos = vec![0u32; new_len];
            for sup in &supports_new {
                for (p, &idx) in sup.iter().enumerate() {
                    pos[idx] = p as u32;
                }
            }
            positions = pos;
        }

        let supports = supports_by_ones(k);
        let mut sectors = Vec::new();
        for diagram in list_diagrams(k)? {
            let tj = diagram.two_j() as u32;
            let mut members: Vec<&Partial> = level.iter().filter(|p| *p.path.last().unwrap() == tj).collect();
            members.sort_by(|a, b| a.path.cmp(&b.path));
            let paths = members.iter().map(|p| CouplingPath(p.path.clone())).collect();
            let weights = diagram
                .weights()
                .into_iter()
                .enumerate()
                .map(|(w, omega)| {
                    let ones = ((k as i32 + omega.twice()) / 2) as usize;
                    let support_len = supports[ones].len();
                    let mut amplitudes = Vec::with_capacity(members.len() * support_len);
                    for m in &members {
                        amplitudes.extend_from_slice(&m.vecs[w]);
                    }
                    WeightBlock { omega, ones, amplitudes, support_len }
                })
                .collect();
            sectors.push(Sector { diagram, paths, weights });
        }
        Ok(Self { k, sectors, supports })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        1 << self.k
    }

    /// Sectors by decreasing `lambda1`.
    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    pub fn sector(&self, diagram: &YoungDiagram) -> Option<&Sector> {
        self.sectors.iter().find(|s| s.diagram == *diagram)
    }

    /// Computational indices with exactly `ones` ones, ascending.
    pub fn support(&self, ones: usize) -> &[usize] {
        &self.supports[ones]
    }

    /// Dense vector `|omega^lambda_mu>`.
    pub fn vector(&self, diagram: &YoungDiagram, mu: usize, omega: HalfInt) -> Result<KetVector> {
        let sector = self
            .sector(diagram)
            .ok_or_else(|| Error::InvalidInput(format!("{diagram} is not a diagram of {} boxes", self.k)))?;
        let block = sector
            .weight_block(omega)
            .ok_or_else(|| Error::OutOfRange(format!("{omega} is not a weight of {diagram}")))?;
        if mu >= sector.multiplicity() {
            return Err(Error::OutOfRange(format!("multiplicity label {mu} out of range")));
        }
        let mut v = vec![C64::new(0.0, 0.0); self.dim()];
        for (&idx, &a) in self.supports[block.ones].iter().zip(block.row(mu)) {
            v[idx] = C64::new(a, 0.0);
        }
        Ok(KetVector::new(v))
    }

    /// Every basis vector as `(diagram, mu, omega, vector)`.
    pub fn iter_vectors(&self) -> impl Iterator<Item = (YoungDiagram, usize, HalfInt, KetVector)> + '_ {
        self.sectors.iter().flat_map(move |s| {
            (0..s.multiplicity()).flat_map(move |mu| {
                s.weights.iter().map(move |wb| {
                    let v = self.vector(&s.diagram, mu, wb.omega).expect("valid labels");
                    (s.diagram, mu, wb.omega, v)
                })
            })
        })
    }

    /// Diagnostic dump: one line per vector,
    /// `l1,l2 | path | omega | amplitudes` with 17 significant digits.
    pub fn export_text(&self) -> String {
        let mut out = String::new();
        for s in &self.sectors {
            for (mu, path) in s.paths.iter().enumerate() {
                let path_str: Vec<String> = path.spins().iter().map(|j| j.to_string()).collect();
                for wb in &s.weights {
                    let v = self.vector(&s.diagram, mu, wb.omega).expect("valid labels");
                    let amps: Vec<String> = v.as_slice().iter().map(|z| format_complex(*z)).collect();
                    let _ = writeln!(
                        out,
                        "{},{} | {} | {} | {}",
                        s.diagram.lambda1(),
                        s.diagram.lambda2(),
                        path_str.join(" "),
                        wb.omega,
                        amps.join(" ")
                    );
                }
            }
        }
        out
    }
}

pub(crate) fn format_complex(z: C64) -> String {
    format!("{:.16e}{:+.16e}i", z.re, z.im)
}

fn supports_by_ones(t: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); t + 1];
    for idx in 0..(1usize << t) {
        out[idx.count_ones() as usize].push(idx);
    }
    out
}

/// Dicke state: uniform superposition of the `k`-qubit computational states
/// with `k/2 + omega` ones.
pub fn dicke(k: usize, omega: HalfInt) -> Result<KetVector> {
    limits::check_full(k)?;
    let t = k as i32 + omega.twice();
    if omega.twice().abs() > k as i32 || t % 2 != 0 {
        return Err(Error::OutOfRange(format!("{omega} is not a weight of {k} qubits")));
    }
    let ones = (t / 2) as u32;
    let entries: Vec<C64> = (0..(1usize << k))
        .map(|i| if i.count_ones() == ones { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
        .collect();
    KetVector::normalized(entries)
}

/// Total raising operator `J_+ = Σ_i J_+^{(i)}`, mapping `|0>` to `|1>` on each qubit.
pub fn jplus_apply(v: &KetVector, k: usize) -> Result<KetVector> {
    if v.dim() != 1 << k {
        return Err(Error::Dimension(format!("vector of length {} is not a {k}-qubit state", v.dim())));
    }
    let src = v.as_slice();
    let mut out = vec![C64::new(0.0, 0.0); src.len()];
    for (idx, &a) in src.iter().enumerate() {
        for q in 0..k {
            let bit = 1 << q;
            if idx & bit == 0 {
                out[idx | bit] += a;
            }
        }
    }
    Ok(KetVector::new(out))
}
