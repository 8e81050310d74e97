//! Exact arithmetic for the special fibers of minimal regular models of the
//! modular curve X₀(p), the explicit height-comparison pipeline bounding the
//! j-height of quadratic points, and a modular-symbols engine computing
//! winding-quotient dimensions.
//!
//! The crate is organized in five modules:
//!
//! - [`fiber`]: the dual graph of the fiber of X₀(p) at a place above p,
//!   its intersection matrix, and exact vertical-divisor solving.
//! - [`heights`]: evaluable bound expressions, the constant ledger, and the
//!   arithmetic-Bézout / Mumford / theta-height chain assembling the final
//!   height bound b(p).
//! - [`modsym`]: Manin symbols for Γ₀(p), Hecke operators, the Atkin-Lehner
//!   involution, and the dimension of the winding quotient J_e.
//! - [`theta`]: small-genus numerical evaluation of the Riemann theta
//!   function and its lattice-invariant analytic norm.
//! - a CLI binary (`arakelov`) exposing every computation with JSON/CSV
//!   output.
//!
//! All number-theoretic computations are exact (arbitrary-precision
//! rationals); floating point appears only in the `theta` module and in
//! report-time conversions, which are always accompanied by exact rational
//! upper bounds.

pub mod fiber;
pub mod heights;
pub mod linalg;
pub mod modsym;
pub mod rat;
pub mod theta;
