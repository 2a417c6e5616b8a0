//! Finite-element assembly: 1D matrices, Kronecker operators, loads and traces.

pub mod kron;
pub mod loads;
pub mod matrices1d;
pub mod operators;
pub mod problem;
pub mod quadrature;
pub mod traces;

pub use kron::KroneckerOp;
pub use loads::{assemble_load, initial_load};
pub use matrices1d::{convection_1d, mass_1d, stiffness_1d};
pub use operators::{assemble_aa, assemble_as, assemble_as_pair, assemble_b, assemble_c, assemble_dt, GramOperator};
pub use problem::{default_beta, ForcingDescriptor, InitialDescriptor, ProblemSpec};
pub use traces::{InitialTrace, OutflowPenalty};
