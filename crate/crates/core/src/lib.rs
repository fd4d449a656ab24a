//! Separated wave functions of an isospin-triplet Dirac field in SU(2)
//! monopole backgrounds.
//!
//! The crate is organised bottom-up:
//!
//! - [`su2_wigner`]: Wigner d/D functions, their recurrences and the Pauli functions.
//! - [`iso_algebra`]: isotopic generators, Gibbs rotations, Dirac matrices, Kronecker composites.
//! - [`monopole_gauges`]: background profiles, potentials in three isotopic frames, gauge law.
//! - [`angular_separation`]: assembled triplet fields and the angular operators acting on them.
//! - [`discrete_symmetry`]: the reflection operator N̂_A, its sectors, K̂ and the A/B maps.
//! - [`radial_dynamics`]: radial ODE systems, Frobenius starts, integration and mode search.
//! - [`matrix_elements`]: sphere quadrature, parity classification and selection rules.
//!
//! Conventions used throughout:
//!
//! - 12-component layout is `kron(iso, bispinor)`: index `4*s + row`, with
//!   `s = 0, 1, 2` for `T₊₁ (f), T₀ (h), T₋₁ (g)`.
//! - Dirac matrices are in the Weyl basis, `γ⁵ = diag(-1,-1,1,1)`.
//! - Half-integer powers of −1 are the phases `e^{iπx}`.

pub mod angular_separation;
pub mod discrete_symmetry;
pub mod error;
pub mod halfint;
pub mod iso_algebra;
pub mod linalg;
pub mod matrix_elements;
pub mod monopole_gauges;
pub mod ode;
pub mod quadrature;
pub mod radial_dynamics;
pub mod su2_wigner;

pub use error::{Error, Result};
pub use halfint::HalfInt;
pub use num_complex::Complex64 as C64;
