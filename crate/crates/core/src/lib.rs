//! Detection of genuine multipartite entanglement (GME) in N-qubit states
//! via a positive but not completely positive qubit map.
//!
//! The building block is the projection map, which zeroes the z Bloch
//! component of a qubit while keeping the transverse components. Lifting it
//! to every bipartition representative of an N-qubit register and adding a
//! constant kappa_N * I * Tr term gives a detector Phi_N whose output is
//! positive semidefinite on every biseparable state; a negative eigenvalue
//! therefore certifies GME.
//!
//! Modules:
//! - [`linalg`]: dense complex matrices, Kronecker products, a Jacobi
//!   Hermitian eigensolver, partial transposition, Pauli expansion.
//! - [`states`]: GHZ / W / Werner / bound-entangled / G_abcd constructors,
//!   a seeded biseparable sampler, density-matrix checks, JSON state files.
//! - [`maps`]: the projection map, its Lindblad form, lifting to qubit
//!   slots, Choi matrices, the analytic minimum output eigenvalue.
//! - [`detector`]: Phi_N construction, verdicts, noise thresholds by
//!   bisection, and the parameter sweeps that generate plot-ready CSV data.
//! - [`witness`]: the tripartite witness Phi_3(GHZ) with its Pauli
//!   decomposition and measurement-setting count.
//! - [`selftest`]: randomized property suites for the CLI.

pub mod detector;
pub mod linalg;
pub mod maps;
pub mod selftest;
pub mod states;
pub mod witness;
