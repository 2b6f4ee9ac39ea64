//! Truncated Fock space: coherent states, the lowering and displacement
//! operators, polynomials in the lowering operator, and closed forms for
//! their coherent-state expectations.

mod displacement;
mod normal;
mod operator;
mod policy;
mod riemann;
mod state;

pub use displacement::{displacement_expm_oracle, displacement_matrix, trusted_block};
pub use normal::{
    aj_adk_expectation, displaced_cross_element, normal_cross_sum, shifted_variance, unit_phase, zz_dagger_double_sum,
    zz_dagger_expect,
};
pub(crate) use normal::{weighted_norm, weighted_pairing};
pub use operator::{annihilation_matrix, inner, lower, norm_sqr, raise, FockOperator};
pub use policy::{poisson_tail, TruncationPolicy, DEFAULT_DIM, DEFAULT_TAIL_TOL};
pub use riemann::{apply_polynomial, apply_polynomial_adjoint, build_riemann_operator};
pub use state::{coherent_vector, expect, CoherentState};
