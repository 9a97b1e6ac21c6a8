//! Independent check of the analytic solution: meter states and the master
//! equation in a truncated number basis.

pub mod lindblad;
pub mod oracle;
pub mod reduce;
pub mod vector;

pub use lindblad::{
    integrate, integrate_with, lindblad_rhs, reservoir_squeeze, step_limit, FockBlockState, InitialMeter,
    IntegratorOptions,
};
pub use oracle::{
    oracle_cutoff, run_oracle, OracleReport, OracleSample, MAX_ORACLE_ALPHA0, MAX_TRACE_DISTANCE, ORACLE_LOSS,
};
pub use reduce::{pointer_basis, reduce_to_qubits, reduce_with_tolerance, Reduction, MAX_LEAKAGE};
pub use vector::{
    coherent_state, fock_overlap, squeezed_coherent, squeezed_coherent_with_tolerance, FockVector, MAX_TRUNCATION_LOSS,
};
