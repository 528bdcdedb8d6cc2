//! Convolution *-algebras of Fell bundles over finite étale groupoids.
//!
//! This crate realizes, at finite scale, the section *-algebra of a
//! (possibly unsaturated) Fell bundle over a finite discrete groupoid:
//! groupoids and their bisection calculus, bundles with explicit
//! multiplication and involution tensors, the convolution algebra with its
//! I-norm, sup-norm and full C*-norm, and representation machinery
//! including pre-representation extension.
//!
//! Start with the runnable programs under `examples/`; each one walks
//! through a single capability. The `fellconv` binary wraps the same
//! functionality behind `check`, `norm`, `example` and `fuzz` subcommands
//! operating on the text bundle format of [`cli`].

pub mod cli;
pub mod convalg;
pub mod fellbundle;
pub mod groupoid;
pub mod matalg;
pub mod reps;
pub mod tol;

pub use groupoid::{Bisection, FiniteGroupoid};
pub use matalg::{ComplexMatrix, MatrixStarAlgebra};
pub use tol::Tolerances;
