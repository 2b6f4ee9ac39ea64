use rug::{Complex, Float};
use serde::Serialize;

use super::{f_of_eps, LineEvaluator};
use crate::error::{Error, Result};
use crate::uncertainty::{line_amplitudes, scalar_zeta, EvaluationMode};
use crate::zeta::{zeta_one_plus_eps, ZetaSeries};

/// The pieces of the second-stage right side at one ordinate t′.
#[derive(Clone, Debug, Serialize)]
pub struct SecondStageTerms {
    #[serde(serialize_with = "crate::scan::output::ser_real")]
    pub rhs: Float,
    /// Re[ζ(1+ε) ζ*(s′)]
    #[serde(serialize_with = "crate::scan::output::ser_real")]
    pub cross: Float,
    #[serde(serialize_with = "crate::scan::output::ser_real")]
    pub radicand: Float,
    #[serde(serialize_with = "crate::scan::output::ser_real")]
    pub x: Float,
    #[serde(serialize_with = "crate::scan::output::ser_real")]
    pub f: Float,
}

/// Right side of the inequality obtained by feeding the margin x(t′) back
/// into the uncertainty relation at β = (1+ε)/2 − it′:
///
///   c² + f·|ζ(s′)|² − x − 2c·√(f·⟨s′|ζζ†|s′⟩ − x),   c = Re[ζ(1+ε) ζ*(s′)],
///
/// with s′ = (1+ε)/2 + it′. The caller decides what "0 ≥ rhs" means.
/// `x_value` overrides the margin; by default it is recomputed at t′.
pub fn second_stage_evaluate(
    eps: &Float,
    t_prime: &Float,
    x_value: Option<&Float>,
    series: &ZetaSeries,
    mode: EvaluationMode,
) -> Result<SecondStageTerms> {
    let p = series.prec();
    // ζ(1+ε) must be real and positive on (0, 1]; this is checked on the true ζ
    zeta_one_plus_eps(eps, series.precision())?;
    let f = f_of_eps(eps, series, mode)?;
    let terms = LineEvaluator::new(series, eps).terms(t_prime)?;
    let x = match x_value {
        Some(x) => Float::with_val(p, x),
        None => terms.x(&f),
    };

    let gamma = Complex::with_val(p, (Float::with_val(p, eps + 1u32), 0));
    let (s, _) = line_amplitudes(eps, t_prime, p);
    let z_gamma = scalar_zeta(series, &gamma, mode)?;
    let z_s = scalar_zeta(series, &s, mode)?;
    let cross = Complex::with_val(p, &z_gamma * z_s.clone().conj()).real().clone();

    let radicand = Float::with_val(p, &f * &terms.denominator) - &x;
    if radicand < 0 {
        return Err(Error::Domain(format!(
            "negative radicand {:e} at t' = {}",
            radicand.to_f64(),
            t_prime.to_f64()
        )));
    }
    let mut rhs = Float::with_val(p, cross.square_ref());
    rhs += Float::with_val(p, &f * Float::with_val(p, z_s.norm_ref()));
    rhs -= &x;
    rhs -= Float::with_val(p, &cross * 2u32) * Float::with_val(p, radicand.sqrt_ref());
    if !rhs.is_finite() {
        return Err(Error::Overflow("second-stage right side is not finite".into()));
    }
    Ok(SecondStageTerms {
        rhs,
        cross,
        radicand,
        x,
        f,
    })
}
