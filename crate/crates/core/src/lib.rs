//! Lyapunov domination for pairs `(A, B)` with `B` in the bicommutant of `A`.
//!
//! `A` is described by Jordan data and an optional change of basis; `B` by
//! Toeplitz coefficients per eigenvalue. Domination of `A` by `B` holds when
//! every Hermitian `H` with `HA + A*H >= 0` also satisfies `HB + B*H >= 0`,
//! which is decided here through the Choi matrix of `L_B L_A^{-1}` and through
//! a small closed-form Hermitian matrix (the Hill-Pick matrix).

pub mod error;
pub mod hill;
pub mod jordan;
pub mod linalg;
pub mod lyapunov;
pub mod maps;

pub use error::{Error, Result};
pub use linalg::{Field, Mat, PsdReport, PsdVerdict, Tolerances, C64};
