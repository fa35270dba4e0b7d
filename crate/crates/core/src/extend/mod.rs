//! Symmetric and bosonic extensions in block coordinates.

mod block;
pub(crate) mod map;
mod solver;

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub use block::{blocks_to_global, global_to_blocks, marginal_from_blocks, BlockState};
pub use solver::{Certificate, SolverConfig, SolverReport, Status};

use crate::error::{Error, Result};
use crate::limits;
use crate::linalg::{ComplexMatrix, DensityMatrix, SystemLayout};
use crate::schur::{list_diagrams, YoungDiagram};
use map::{sym2_components, sym2_pairs, MarginalMap};

/// Largest `A` dimension accepted by the instance generator.
pub const MAX_GEN_DA: usize = 4;

fn qubit_marginal_dims(rho: &DensityMatrix) -> Result<usize> {
    match rho.layout().dims() {
        [d_a, 2] => Ok(*d_a),
        dims => Err(Error::Dimension(format!("expected a layout [d_A, 2], got {dims:?}"))),
    }
}

fn solve_qubit(rho: &DensityMatrix, k: usize, diagrams: Vec<YoungDiagram>, cfg: &SolverConfig) -> Result<SolverReport> {
    limits::check_block(k)?;
    let d_a = qubit_marginal_dims(rho)?;
    let map = MarginalMap::qubit(k, d_a, &diagrams)?;
    let out = solver::dykstra(&map, rho.matrix(), cfg)?;
    let certificate = match out.blocks {
        Some(blocks) => {
            let present = diagrams.into_iter().zip(blocks).collect();
            Some(Certificate::Blocks(BlockState::with_tolerance(k, d_a, present, 1e-8)?))
        }
        None => None,
    };
    Ok(SolverReport {
        status: out.status,
        residual: out.residual,
        gap_estimate: out.gap,
        iterations: out.iterations,
        certificate,
    })
}

/// Decides `k`-symmetric extendibility of a state on `A ⊗ C^2`.
pub fn solve_symmetric(rho_ab: &DensityMatrix, k: usize, cfg: &SolverConfig) -> Result<SolverReport> {
    limits::check_block(k)?;
    solve_qubit(rho_ab, k, list_diagrams(k)?, cfg)
}

/// Decides `k`-bosonic extendibility of a state on `A ⊗ C^2`.
pub fn solve_bosonic(rho_ab: &DensityMatrix, k: usize, cfg: &SolverConfig) -> Result<SolverReport> {
    limits::check_block(k)?;
    solve_qubit(rho_ab, k, vec![YoungDiagram::symmetric(k)?], cfg)
}

/// Embeds an operator on `A ⊗ Sym²(C^{d_B})` into `A ⊗ C^{d_B} ⊗ C^{d_B}`.
pub(crate) fn sym2_embed(d_a: usize, d_b: usize, x: &ComplexMatrix) -> ComplexMatrix {
    let pairs = sym2_pairs(d_b);
    let np = pairs.len();
    let nb = d_b * d_b;
    let mut out = ComplexMatrix::zeros(d_a * nb, d_a * nb);
    for a in 0..d_a {
        for (s, &(b1, b2)) in pairs.iter().enumerate() {
            for a2 in 0..d_a {
                for (t, &(c1, c2)) in pairs.iter().enumerate() {
                    let v = x[(a * np + s, a2 * np + t)];
                    if v.re == 0.0 && v.im == 0.0 {
                        continue;
                    }
                    for (x1, y1, u) in sym2_components(b1, b2) {
                        for (x2, y2, w) in sym2_components(c1, c2) {
                            out[(a * nb + x1 * d_b + y1, a2 * nb + x2 * d_b + y2)] += v * (u * w);
                        }
                    }
                }
            }
        }
    }
    out
}

/// Decides 2-bosonic extendibility of a state on `A ⊗ C^{d_B}` for any `d_B`.
pub fn solve_bosonic_k2_generic(rho_ab: &DensityMatrix, d_b: usize, cfg: &SolverConfig) -> Result<SolverReport> {
    let d_a = match rho_ab.layout().dims() {
        [d_a, db] if *db == d_b => *d_a,
        dims => return Err(Error::Dimension(format!("expected a layout [d_A, {d_b}], got {dims:?}"))),
    };
    if d_b < 2 {
        return Err(Error::InvalidInput("d_B must be at least 2".into()));
    }
    let map = MarginalMap::sym2(d_a, d_b);
    let out = solver::dykstra(&map, rho_ab.matrix(), cfg)?;
    let certificate = match out.blocks {
        Some(blocks) => {
            let full = sym2_embed(d_a, d_b, &blocks[0]);
            let layout = SystemLayout::extension(d_a, d_b, 2)?;
            Some(Certificate::Global(DensityMatrix::with_tolerance(full, layout, 1e-8)?))
        }
        None => None,
    };
    Ok(SolverReport {
        status: out.status,
        residual: out.residual,
        gap_estimate: out.gap,
        iterations: out.iterations,
        certificate,
    })
}

/// Which diagrams the instance generator populates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Profile {
    AllDiagrams,
    ExcludeBosonic,
}

impl Profile {
    pub fn as_str(&self) -> &'static str {
        match self {
            Profile::AllDiagrams => "all",
            Profile::ExcludeBosonic => "exclude-bosonic",
        }
    }
}

impl std::str::FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Profile::AllDiagrams),
            "exclude-bosonic" => Ok(Profile::ExcludeBosonic),
            _ => Err(Error::InvalidInput(format!("unknown profile '{s}' (expected all or exclude-bosonic)"))),
        }
    }
}

/// Random `k`-extendible marginal with its witness, deterministic per seed.
pub fn gen_random_extendible(k: usize, d_a: usize, seed: u64, profile: Profile) -> Result<(DensityMatrix, BlockState)> {
    limits::check_full(k)?;
    if d_a == 0 || d_a > MAX_GEN_DA {
        return Err(Error::OutOfRange(format!("d_A = {d_a} outside 1..={MAX_GEN_DA}")));
    }
    let diagrams: Vec<YoungDiagram> = list_diagrams(k)?
        .into_iter()
        .filter(|lam| profile == Profile::AllDiagrams || !lam.is_symmetric())
        .collect();
    if diagrams.is_empty() {
        return Err(Error::InvalidInput(format!("profile {} has no diagrams at k = {k}", profile.as_str())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut blocks = Vec::with_capacity(diagrams.len());
    for lam in &diagrams {
        let n = d_a * lam.num_weights();
        let g = ComplexMatrix::from_fn(n, n, |_, _| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            C64::new(re, im)
        });
        blocks.push((*lam, g.matmul(&g.adjoint())));
    }
    let tr = BlockState::new_unchecked(k, d_a, blocks.clone()).total_trace();
    let blocks = blocks.into_iter().map(|(l, x)| (l, x.scale(1.0 / tr))).collect();
    let bs = BlockState::new(k, d_a, blocks)?;
    let rho = marginal_from_blocks(&bs);
    Ok((rho, bs))
}
