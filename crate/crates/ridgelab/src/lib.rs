//! Randomized row- and column-action solvers for ridge regression.
//!
//! The crate bundles four things that are usually scattered across scripts:
//!
//! * a small dense linear-algebra kernel ([`linalg`]) sized for desk-scale
//!   experiments: row-major matrices, weighted index sampling, a seeded
//!   generator, Cholesky and Jacobi factorizations, and MatrixMarket I/O;
//! * the solver family ([`solvers`]): plain randomized Kaczmarz and
//!   Gauss-Seidel, their ridge variants driven by the regularized normal
//!   equations, the naive variants that iterate on an explicitly formed
//!   normal system, and the augmented-projection solver that interleaves
//!   row and column actions on one symmetric system;
//! * closed-form convergence predictions ([`theory`]): per-step contraction
//!   factors, exact one-step expected errors, and the spectral structure of
//!   the augmented system;
//! * a reproducible experiment pipeline ([`problems`], [`harness`]):
//!   seeded instance generation with a prescribed singular spectrum, and a
//!   grid runner that emits deterministic CSV traces.
//!
//! Every random choice flows from explicit seeds, so any run, from a single
//! solve to the full benchmark grid, can be replayed bit for bit.

pub mod cli;
pub mod harness;
pub mod linalg;
pub mod problems;
pub mod solvers;
pub mod theory;
pub mod verify;

pub use harness::{AlgorithmSpec, ExperimentConfig, MetricSet, TraceRecord};
pub use linalg::{DenseMatrix, DenseVector, SeededRng, WeightedSampler};
pub use problems::ProblemInstance;
pub use solvers::{IzInit, SolverKind, SolverState, StepReport};
pub use theory::{OracleSolutions, RateBound};
