//! Feasibility of a marginal constraint over products of PSD cones.
//!
//! Dykstra's alternating projections between the cone `{X_b >= 0}` and the
//! affine set `{L(X) = rho}`. Infeasibility is only reported together with a
//! separating hyperplane whose margin lower-bounds the distance between the
//! two sets.

use std::fmt::Write as _;

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::block::BlockState;
use super::map::MarginalMap;
use crate::error::{Error, Result};
use crate::linalg::{eigh, max_eigenvalue, psd_clip, ComplexMatrix, DensityMatrix};

/// Eigenvalues of `L L†` below this fraction of the largest are treated as zero.
const PINV_CUTOFF: f64 = 1e-12;
/// Tolerance for `rho` lying in the range of the marginal map.
const RANGE_TOL: f64 = 1e-9;
const GAP_CHECK_EVERY: usize = 10;
const STALL_WINDOW: usize = 1000;
const STALL_REL: f64 = 1e-3;
const START_NOISE: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub tol_feasible: f64,
    pub tol_infeasible_gap: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { tol_feasible: 1e-8, tol_infeasible_gap: 1e-6, max_iter: 20000, seed: 0 }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(self.tol_feasible) || !ok(self.tol_infeasible_gap) {
            return Err(Error::InvalidInput("solver tolerances must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidInput("max_iter must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Feasible,
    Infeasible,
    Undecided,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Feasible => "FEASIBLE",
            Status::Infeasible => "INFEASIBLE",
            Status::Undecided => "UNDECIDED",
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug)]
pub enum Certificate {
    /// Permutation-invariant extension in block coordinates.
    Blocks(BlockState),
    /// Explicit extension on `A ⊗ B ⊗ ... ⊗ B`.
    Global(DensityMatrix),
}

#[derive(Clone, Debug)]
pub struct SolverReport {
    pub status: Status,
    /// `||L(X) - rho||_F` of the returned (or last) cone iterate
    pub residual: f64,
    /// certified lower bound on the distance between the two sets; zero if none
    pub gap_estimate: f64,
    pub iterations: usize,
    pub certificate: Option<Certificate>,
}

impl SolverReport {
    /// Structured `key: value` record.
    pub fn to_text(&self, certificate_path: Option<&str>) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "status: {}", self.status);
        let _ = writeln!(s, "residual: {:.6e}", self.residual);
        let _ = writeln!(s, "gap_estimate: {:.6e}", self.gap_estimate);
        let _ = writeln!(s, "iterations: {}", self.iterations);
        let _ = writeln!(s, "certificate: {}", certificate_path.unwrap_or("none"));
        s
    }
}

/// Raw solver outcome on block coordinates.
pub(crate) struct Outcome {
    pub status: Status,
    pub residual: f64,
    pub gap: f64,
    pub iterations: usize,
    /// PSD blocks with unit weighted trace, when feasible
    pub blocks: Option<Vec<ComplexMatrix>>,
}

struct AffineProjector<'a> {
    map: &'a MarginalMap,
    gram_pinv: ComplexMatrix,
    rho: ComplexMatrix,
}

impl<'a> AffineProjector<'a> {
    fn new(map: &'a MarginalMap, rho: &ComplexMatrix) -> Result<Self> {
        let eig = eigh(&map.gram())?;
        let top = eig.values.last().copied().unwrap_or(0.0);
        let cut = PINV_CUTOFF * top.max(f64::MIN_POSITIVE);
        let gram_pinv = eig.reconstruct_with(|v| if v > cut { 1.0 / v } else { 0.0 });
        Ok(Self { map, gram_pinv, rho: rho.clone() })
    }

    /// `(L L†)^+ y`, on the vectorized marginal space.
    fn solve(&self, y: &ComplexMatrix) -> ComplexMatrix {
        let v = self.gram_pinv.matvec(y.as_slice());
        ComplexMatrix::from_vec(y.rows(), y.cols(), v).expect("shape preserved")
    }

    fn residual(&self, xs: &[ComplexMatrix]) -> ComplexMatrix {
        &self.map.apply(xs) - &self.rho
    }

    fn project(&self, xs: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
        let corr = self.map.adjoint(&self.solve(&self.residual(xs)));
        xs.iter().zip(&corr).map(|(x, c)| (x - c).hermitian_part()).collect()
    }

    /// Distance from `rho` to the range of the map.
    fn range_defect(&self) -> f64 {
        let back = self.map.apply(&self.map.adjoint(&self.solve(&self.rho)));
        back.frobenius_diff(&self.rho)
    }

    /// Margin of the hyperplane built from `v`, divided by its normal's norm.
    ///
    /// With `z = (L L†)^+ L v` and `t = max_b λmax(L†z)_b / w_b`, the normal
    /// `Y = L†(z - t I)` is NSD blockwise while `<Y, X> = Re<z, rho> - t` for
    /// every `X` in the affine set.
    fn separation(&self, v: &[ComplexMatrix]) -> Result<f64> {
        let z = self.solve(&self.map.apply(v));
        let vr = self.map.adjoint(&z);
        let mut t = f64::NEG_INFINITY;
        for (blk, x) in self.map.blocks.iter().zip(&vr) {
            t = t.max(max_eigenvalue(x)? / blk.weight);
        }
        let margin = z.real_inner(&self.rho) - t;
        let mut norm2 = 0.0;
        for (blk, x) in self.map.blocks.iter().zip(&vr) {
            let shifted = x - &ComplexMatrix::identity(x.rows()).scale(t * blk.weight);
            norm2 += shifted.frobenius_norm().powi(2);
        }
        let norm = norm2.sqrt();
        if !(margin > 0.0) || norm == 0.0 {
            return Ok(0.0);
        }
        Ok(margin / norm)
    }
}

/// Full-rank start with unit weighted trace plus a small seeded perturbation.
fn initial_point(map: &MarginalMap, seed: u64) -> Vec<ComplexMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dims = map.block_dims();
    let total: f64 = map.blocks.iter().zip(&dims).map(|(b, &n)| b.weight * n as f64).sum();
    map.blocks
        .iter()
        .zip(&dims)
        .map(|(blk, &n)| {
            let g = ComplexMatrix::from_fn(n, n, |_, _| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                C64::new(re, im)
            });
            let noise = g.matmul(&g.adjoint()).scale(START_NOISE / (n * n) as f64);
            &ComplexMatrix::identity(n).scale(blk.weight / total) + &noise.scale(blk.weight / total)
        })
        .collect()
}

/// PSD blocks rescaled to unit weighted trace, if their residual is within `tol`.
fn normalized_candidate(proj: &AffineProjector<'_>, xs: &[ComplexMatrix], tol: f64) -> Option<(Vec<ComplexMatrix>, f64)> {
    let tr = weighted_trace(proj.map, xs);
    if !(tr > 0.0) {
        return None;
    }
    let blocks: Vec<ComplexMatrix> = xs.iter().map(|x| x.scale(1.0 / tr)).collect();
    let r = proj.residual(&blocks).frobenius_norm();
    (r <= tol).then_some((blocks, r))
}

fn weighted_trace(map: &MarginalMap, xs: &[ComplexMatrix]) -> f64 {
    map.blocks.iter().zip(xs).map(|(b, x)| b.weight * x.trace().re).sum()
}

/// Runs in the coordinates `Y_b = w_b X_b` (the sector state with the
/// multiplicity traced out), which are far better conditioned than `X_b`.
pub(crate) fn dykstra(map: &MarginalMap, rho: &ComplexMatrix, cfg: &SolverConfig) -> Result<Outcome> {
    cfg.validate()?;
    let mut scaled = map.clone();
    for b in &mut scaled.blocks {
        b.weight = 1.0;
    }
    let mut out = dykstra_raw(&scaled, rho, cfg)?;
    if let Some(blocks) = out.blocks.as_mut() {
        for ((b, orig), x) in scaled.blocks.iter().zip(&map.blocks).zip(blocks.iter_mut()) {
            *x = x.scale(b.weight / orig.weight);
        }
    }
    Ok(out)
}

fn dykstra_raw(map: &MarginalMap, rho: &ComplexMatrix, cfg: &SolverConfig) -> Result<Outcome> {
    let m = map.out_dim();
    if rho.rows() != m || rho.cols() != m {
        return Err(Error::Dimension(format!("marginal must be {m}x{m}, got {}x{}", rho.rows(), rho.cols())));
    }
    let proj = AffineProjector::new(map, rho)?;
    let defect = proj.range_defect();
    if defect > RANGE_TOL {
        return Ok(Outcome { status: Status::Infeasible, residual: defect, gap: defect, iterations: 0, blocks: None });
    }

    let dims = map.block_dims();
    let mut c = initial_point(map, cfg.seed);
    let mut q: Vec<ComplexMatrix> = dims.iter().map(|&n| ComplexMatrix::zeros(n, n)).collect();
    let mut residual = f64::INFINITY;
    let mut best_gap = 0.0f64;
    let mut last_improve = 0usize;

    for it in 1..=cfg.max_iter {
        let a = proj.project(&c);
        let mut next_c = Vec::with_capacity(a.len());
        let mut next_q = Vec::with_capacity(a.len());
        for (ai, qi) in a.iter().zip(&q) {
            let (pos, neg) = psd_clip(&(ai + qi))?;
            next_c.push(pos);
            next_q.push(neg);
        }
        c = next_c;
        q = next_q;
        residual = proj.residual(&c).frobenius_norm();
        if residual <= cfg.tol_feasible {
            if let Some((blocks, r)) = normalized_candidate(&proj, &c, cfg.tol_feasible) {
                return Ok(Outcome { status: Status::Feasible, residual: r, gap: 0.0, iterations: it, blocks: Some(blocks) });
            }
        }
        if it % GAP_CHECK_EVERY == 0 {
            let mut pos = Vec::with_capacity(a.len());
            let mut v = Vec::with_capacity(a.len());
            for ai in &a {
                let (p, n) = psd_clip(ai)?;
                pos.push(p);
                v.push(n);
            }
            // the clipped affine iterate often lands inside the tolerance first
            if let Some((blocks, r)) = normalized_candidate(&proj, &pos, cfg.tol_feasible) {
                return Ok(Outcome { status: Status::Feasible, residual: r, gap: 0.0, iterations: it, blocks: Some(blocks) });
            }
            let gap = proj.separation(&v)?;
            if gap > best_gap * (1.0 + STALL_REL) {
                last_improve = it;
            }
            best_gap = best_gap.max(gap);
            if best_gap > cfg.tol_infeasible_gap && it - last_improve >= STALL_WINDOW {
                return Ok(Outcome { status: Status::Infeasible, residual, gap: best_gap, iterations: it, blocks: None });
            }
        }
    }
    let status = if best_gap > cfg.tol_infeasible_gap { Status::Infeasible } else { Status::Undecided };
    Ok(Outcome { status, residual, gap: best_gap, iterations: cfg.max_iter, blocks: None })
}
