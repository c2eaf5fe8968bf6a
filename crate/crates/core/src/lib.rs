//! Exact linear algebra over non-Archimedean local fields and the dimension
//! theory of self-affine sets living in them.
//!
//! The crate is organised bottom-up:
//!
//! - [`field`]: `Q_p` and `F_p((X^-1))` at fixed relative precision, Haar
//!   sampling and digit-cylinder keys.
//! - [`linalg`]: matrices, max-entry operator norm, determinants by max-norm
//!   pivoting, adjugates, isometry tests and minors.
//! - [`svd`]: the isometric decomposition `T = P D Q` and the minor-based
//!   computation of singular value norms.
//! - [`svf`]: the singular value function `phi^s` in log-base-q space.
//! - [`pressure`]: word products, partition sums and a guaranteed bracket for
//!   the affinity dimension `d(T_1, ..., T_M)`.
//! - [`attractor`]: affine iterated function systems, exact ultrametric box
//!   counting, dimension fits and Monte-Carlo potential integrals.
//! - [`cli`]: JSON configuration, command dispatch and reports for the
//!   `nadim` binary.
//!
//! Runnable walkthroughs for each layer live in the crate's `examples/`
//! directory.

pub mod attractor;
pub mod cli;
pub mod error;
pub mod field;
pub mod linalg;
mod parallel;
pub mod pressure;
pub mod svd;
pub mod svf;

pub use attractor::{Aifs, BoxCountTable, BoxOptions};
pub use error::{Error, Result};
pub use field::{FieldElement, FieldKind, FieldSpec, PrefixKey, Valuation};
pub use linalg::Matrix;
pub use pressure::{PressureBracket, PressureOptions, WordSpace};
pub use svd::SingularDecomposition;
pub use svf::PhiValue;
