//! Exact dense-matrix realizations of the two-mode generalized oscillator
//! algebra `A_κ(2)`.
//!
//! The algebra interpolates between `su(3)` (κ < 0, finite Fock space of
//! dimension `(k+1)(k+2)/2` with `k = -1/κ`), two commuting Weyl-Heisenberg
//! algebras (κ = 0) and `su(2,1)` (κ > 0). For κ ≥ 0 everything is realized
//! on a finite window `n1 + n2 ≤ σ` and each identity is checked together
//! with the defect the window introduces on its boundary shell.
//!
//! Module map:
//!
//! * [`fock`]: structure functions, ladder operators, Hamiltonian, Lie
//!   generators and the defining-relation checks.
//! * [`phase_ops`]: partitions of the finite Fock space and the unitary phase
//!   operators `E1d`, `E2d`, `E3d`, `Ed`.
//! * [`phase_states`]: phase states, vector phase states, overlaps, time
//!   evolution and the qutrit fixture.
//! * [`truncated`]: the κ ≥ 0 window, truncated ladders `b_i^±`, the
//!   non-unitary shifts `E_i∞` and the `|θ1,θ2,φ)` states.
//! * [`mub`]: quantized phase states, Gauss sums and mutually unbiased bases.
//! * [`report`], [`io`], [`verify`]: verification reports, JSON schemas and
//!   the full verification runner.

pub mod error;
pub mod fock;
pub mod io;
pub mod kappa;
pub mod linalg;
pub mod mub;
pub mod phase_ops;
pub mod phase_states;
pub mod report;
pub mod space;
pub mod truncated;
pub mod verify;

pub use error::{Error, Result};
pub use kappa::{KappaSpec, Regime};
pub use linalg::{LinearOperator, StateVector, C64};
pub use report::{CheckEntry, ResidualSplit, VerificationReport};
pub use space::FockSpace;

/// Default max-abs tolerance for identity checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
