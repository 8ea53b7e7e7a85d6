//! Exact construction of a perfect discrete Morse function on the cell
//! complex of a planar polygon space.
//!
//! The pipeline: validate a [`Linkage`], enumerate its [`Complex`] of
//! cyclically ordered admissible partitions, build the pairing
//! [`VectorField`], reverse the selected gradient paths, and compare the
//! surviving critical cells with mod-2 Betti numbers computed both from the
//! cellular chain complex and from counts of short sets.

pub mod complex;
pub mod error;
pub mod export;
pub mod fuzz;
pub mod homology;
pub mod label;
pub mod linkage;
pub mod matching;
pub mod paths;
pub mod reversal;
pub mod verify;

pub use complex::{CellId, Complex, SizeGuard};
pub use error::{Error, Result, Severity};
pub use homology::{BettiVector, BitMatrix};
pub use label::CellLabel;
pub use linkage::{Linkage, Subset};
pub use matching::{CriticalClass, MoveKind, MoveReport, VectorField};
pub use paths::{GradientPath, PathCount, PathDag};
pub use reversal::{Reversal, ReversalPlan, ReversalRule};
pub use verify::{verify, Check, Report, VerifyOptions};
