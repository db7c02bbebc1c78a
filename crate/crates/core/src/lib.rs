//! Single-spin detection with Dicke-state probes.
//!
//! The crate is organised bottom-up:
//!
//! * [`dicke`] builds x-basis Dicke states and the readout state on the full
//!   `2^L` computational basis.
//! * [`field`] models the dipolar field of a point target spin and the
//!   cylindrical-shell probe lattices it acts on.
//! * [`evolution`] evaluates the measurement probability exactly under
//!   time-quadratic dephasing, with a fixed-step integrator as a second route.
//! * [`analytic`] holds the large-`L` closed forms (Bessel series, `F(u)`,
//!   sensitivity and detection-time formulas).
//! * [`optimize`] provides the derivative-free minimizers used to recover the
//!   optimal interaction time and probe geometry.
//! * [`spin_star`] simulates the global-control preparation and readout
//!   sequences on the ancilla plus symmetric-ladder basis.
//! * [`verify`] contains brute-force checks of the counting identities and the
//!   NV-NV interaction invariance claims.

pub mod analytic;
pub mod bessel;
pub mod binomial;
pub mod constants;
pub mod dicke;
pub mod error;
pub mod evolution;
pub mod field;
pub mod optimize;
pub mod spin_star;
pub mod verify;

pub use error::{Error, Result, Warning};

pub use num_complex::Complex64 as C64;
