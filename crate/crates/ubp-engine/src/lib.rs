//! Synchronous U-bootstrap dynamics.
//!
//! A site `x` becomes infected at generation `t+1` when it is already infected
//! or when `x + X` is fully infected at generation `t` for some rule `X`.
//! Dense lattices (torus or rectangle) are stepped 64 sites per word.
//! [`sparse_closure`] handles finite seeds on the unbounded lattice.

pub mod dynamics;
pub mod export;
pub mod kernel;
pub mod lattice;
pub mod reference;
pub mod sparse;

pub use dynamics::{percolates, percolates_within, percolation_budget, run_to_fixpoint, tau, FixpointRun};
pub use export::{from_rle_json, to_pbm, to_rle, to_rle_json, RleSnapshot, SnapshotError};
pub use kernel::{step, CompiledFamily, Stepper};
pub use lattice::{Boundary, Lattice, Mode, Word};
pub use reference::{reference_closure, reference_step};
pub use sparse::{sparse_closure, SparseClosure};
