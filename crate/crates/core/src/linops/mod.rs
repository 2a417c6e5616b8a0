//! Linear-algebra kernels: sparse storage, sparse and block factorizations,
//! conjugate gradients, Kronecker solves and symmetric eigenvalue routines.

pub mod blocktri;
pub mod cg;
pub mod eig;
pub mod kron;
pub mod ldl;
pub mod sparse;

pub use blocktri::{BlockTridiagonal, BlockTridiagonalFactor};
pub use cg::{cg_solve, CgOutcome};
pub use eig::{gen_eig_dense, gen_eig_extremal, EigPair, Which};
pub use kron::KronSpdSolver;
pub use ldl::{factor_spd, factor_symmetric_indefinite, Factorization};
pub use sparse::{dot, norm, CsrMatrix, FnOperator, Identity, LinearOperator};
