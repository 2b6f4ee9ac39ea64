//! Numerical toolkit for the Riemann operator ζ(a) = Σ C_k a^k acting on a
//! truncated Fock space, the Heisenberg-type uncertainty relation it induces
//! between the quadratures X₁(β) = D†(β)(ζ+ζ†)D(β) and X₂ = −i(ζ−ζ†), and the
//! scans over the line Re s = (1+ε)/2 built on that relation.
//!
//! All arithmetic runs on MPFR/MPC floats at a configurable precision.

pub mod error;
pub mod fock;
pub mod precision;
pub mod scan;
pub mod uncertainty;
pub mod zeta;

pub use error::{Error, Result};
pub use precision::PrecisionConfig;
