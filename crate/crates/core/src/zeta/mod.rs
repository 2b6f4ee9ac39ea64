//! ζ evaluation, Taylor coefficients about s = 0 and critical-line zeros.

mod cache;
mod eval;
mod series;
mod zeros;

pub use cache::{write_atomic, CacheStatus, CoefficientCache, CACHE_FORMAT_VERSION};
pub use eval::{eval_zeta, eval_zeta_with_derivative, zeta_one_plus_eps, MIN_REAL_PART};
pub use series::{default_samples, reconstruction_allowance, taylor_coeffs, Contour, ZetaSeries, DEFAULT_RADIUS};
pub use zeros::{argument_count, find_zero_near, Rectangle, ZeroLocation};
