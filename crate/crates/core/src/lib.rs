//! Pencil-level analysis and solution of linear differential-algebraic equations
//! `d/dt E x(t) = A x(t) + f(t)`.
//!
//! The crate works with the left and right pseudo-resolvents
//! `R_l(λ) = E(A − λE)⁻¹` and `R_r(λ) = (A − λE)⁻¹E` of a regular pencil, the
//! linear relations they generate, and the kernel/range chains of their powers.
//! On top of that sit index estimators, dissipativity certificates, the degenerate
//! semigroup on the dynamic part and a decoupled solver.

// Links the system LAPACK used by the QZ oracle.
extern crate openblas_src;

pub mod chain;
pub mod error;
pub mod growth;
pub mod io;
pub mod models;
pub mod numerics;
pub mod pencil;
pub mod relation;
pub mod semigroup;
pub mod solver;
pub mod staircase;

pub use error::{Error, Result};
pub use numerics::{C64, CMatrix, CVector, Subspace, TolerancePolicy};
pub use pencil::{MatrixPencil, ResolventKind, Side};
