//! Joint SU(2) × S_k decomposition of `k` qubits.

mod basis;
mod coeff;
mod young;

pub use basis::{dicke, jplus_apply, CouplingPath, SchurBasis, Sector, WeightBlock};
pub use coeff::{alpha_coeff, coeff_matrix_p, p_coeff, CoeffTable};
pub use young::{hook_dim, list_diagrams, multiplicity, HalfInt, YoungDiagram};

/// Builds the coupled basis for `k` qubits.
pub fn build_schur_basis(k: usize) -> crate::Result<SchurBasis> {
    SchurBasis::build(k)
}
