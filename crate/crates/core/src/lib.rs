//! Cross approximation, maximum-volume submatrices and their error bounds.
//!
//! Cross approximation here means Gaussian elimination with complete
//! pivoting stopped after `m` steps; the pivot rows and columns define a
//! skeleton `A(:,J) A(I,J)⁻¹ A(I,:)` whose error is the Schur complement.

pub mod bounds;
pub mod classify;
pub mod cross;
pub mod error;
pub mod funcross;
pub mod gallery;
pub mod linalg;
pub mod matrix;
pub mod maxvol;
pub mod tightness;
pub mod verify;

pub use bounds::{bound_report, BoundKind, BoundReport};
pub use classify::{classify, MatrixClass};
pub use cross::{cross_approximate, CrossResult, PivotStrategy};
pub use error::{Error, Result};
pub use funcross::{function_cross, Grid, TestFunction};
pub use gallery::{generate, GallerySpec};
pub use matrix::{IndexSet, Matrix};
pub use maxvol::{brute_force_maxvol, VolumeResult};
