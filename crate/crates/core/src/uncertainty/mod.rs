//! The uncertainty relation for X₁(β) = D†(β)(ζ+ζ†)D(β) and X₂ = −i(ζ−ζ†)
//! in a coherent state |α⟩, computed twice: from the closed-form variances
//! and the printed right-hand side, and directly from Fock matrices.

mod campaign;
mod report;

use rug::{Complex, Float};

pub use campaign::{run_campaign, CampaignConfig, CampaignSummary};
pub use report::{Classification, EvaluationMode, UncertaintyReport};

use crate::error::{Error, Result};
use crate::fock::{
    apply_polynomial, apply_polynomial_adjoint, coherent_vector, displacement_matrix, inner, norm_sqr, unit_phase,
    weighted_norm, weighted_pairing, TruncationPolicy,
};
use crate::zeta::{eval_zeta, ZetaSeries};

/// Relative tolerance used when none is given.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Floor for the classification scale.
pub const SCALE_FLOOR: f64 = 1e-30;

/// ζ(z) as the chosen mode reads it.
pub fn scalar_zeta(series: &ZetaSeries, z: &Complex, mode: EvaluationMode) -> Result<Complex> {
    match mode {
        EvaluationMode::Polynomial => Ok(series.eval(z, series.prec())),
        EvaluationMode::Analytic => eval_zeta(z, series.precision()),
    }
}

/// ⟨γ|ζζ†|γ⟩ − |ζ(γ)|² at γ = α+β.
pub fn variance_x1(
    series: &ZetaSeries,
    alpha: &Complex,
    beta: &Complex,
    policy: &TruncationPolicy,
    mode: EvaluationMode,
) -> Result<Float> {
    let gamma = Complex::with_val(series.prec(), alpha + beta);
    variance_at(series, &gamma, policy, mode)
}

/// ⟨α|ζζ†|α⟩ − |ζ(α)|².
pub fn variance_x2(
    series: &ZetaSeries,
    alpha: &Complex,
    policy: &TruncationPolicy,
    mode: EvaluationMode,
) -> Result<Float> {
    variance_at(series, alpha, policy, mode)
}

fn variance_at(series: &ZetaSeries, z: &Complex, policy: &TruncationPolicy, mode: EvaluationMode) -> Result<Float> {
    policy.require(z)?;
    let p = series.prec();
    let shifted = series.taylor_shift(z, p);
    let value = match mode {
        // the m = 0 term is exactly |P(z)|², so drop it instead of subtracting
        EvaluationMode::Polynomial => weighted_norm(&shifted, 1, p),
        EvaluationMode::Analytic => {
            let s = scalar_zeta(series, z, mode)?;
            weighted_norm(&shifted, 0, p) - Float::with_val(p, s.norm_ref())
        }
    };
    finite(value, "variance")
}

fn finite(x: Float, what: &str) -> Result<Float> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Overflow(format!("{what} is not finite")))
    }
}

/// Im(α β̄)
pub fn phase_im(alpha: &Complex, beta: &Complex, prec: u32) -> Float {
    Complex::with_val(prec, alpha * beta.clone().conj()).imag().clone()
}

/// α = (1+ε)/2 + it and β = (1+ε)/2 − it.
pub fn line_amplitudes(eps: &Float, t: &Float, prec: u32) -> (Complex, Complex) {
    let half = Float::with_val(prec, eps + 1u32) / 2u32;
    let alpha = Complex::with_val(prec, (&half, t));
    let beta = Complex::with_val(prec, (&half, -Float::with_val(prec, t)));
    (alpha, beta)
}

/// Re²[ζ(α+β) ζ*(α) − e^{−i Im(α β*)} ⟨α+β|ζ D(β) ζ†|α⟩] with the matrix
/// element taken from Fock matrices.
pub fn rhs_paper(
    series: &ZetaSeries,
    alpha: &Complex,
    beta: &Complex,
    policy: &TruncationPolicy,
    mode: EvaluationMode,
) -> Result<Float> {
    let p = series.prec();
    let gamma = Complex::with_val(p, alpha + beta);
    policy.require(alpha)?;
    policy.require(&gamma)?;
    let wp = guarded_prec(series, policy.dim);
    let v_alpha = coherent_vector(alpha, policy, wp)?.vec;
    let v_gamma = coherent_vector(&gamma, policy, wp)?.vec;
    let d = displacement_matrix(beta, policy.dim, wp)?;
    let right = d.apply(&apply_polynomial_adjoint(series, &v_alpha, wp))?;
    let left = apply_polynomial_adjoint(series, &v_gamma, wp);
    let element = Complex::with_val(p, inner(&left, &right, wp));

    let z_gamma = scalar_zeta(series, &gamma, mode)?;
    let z_alpha = scalar_zeta(series, alpha, mode)?;
    let phase = unit_phase(&Float::with_val(p, -phase_im(alpha, beta, p)), p);
    let inside = Complex::with_val(p, &z_gamma * z_alpha.conj()) - element * phase;
    finite(
        Float::with_val(p, inside.real().square_ref()),
        "printed right-hand side",
    )
}

/// Working precision for matrix routes: a^K multiplies rounding noise in
/// the top components by up to √(N!/(N−K)!) ≤ N^{K/2}.
fn guarded_prec(series: &ZetaSeries, dim: usize) -> u32 {
    let growth = series.order() as f64 / 2.0 * (dim as f64).log2();
    series.prec() + 32 + growth.ceil() as u32
}

/// Variances of X₁, X₂ and ¼|⟨[X₁, X₂]⟩|² from Fock matrices, in the
/// normalized truncated |α⟩.
#[derive(Clone, Debug)]
pub struct DirectQuantities {
    pub var_x1: Float,
    pub var_x2: Float,
    pub rhs: Float,
}

/// X₁|v⟩ = D(β)ᴴ (Z + Zᴴ) D(β)|v⟩ is applied factor by factor; X₂|v⟩ = −i(Z − Zᴴ)|v⟩.
pub fn direct_quantities(
    series: &ZetaSeries,
    alpha: &Complex,
    beta: &Complex,
    policy: &TruncationPolicy,
) -> Result<DirectQuantities> {
    let out = series.prec();
    let p = guarded_prec(series, policy.dim);
    let v = coherent_vector(alpha, policy, p)?.normalized(p);
    let d = displacement_matrix(beta, policy.dim, p)?;

    let dv = d.apply(&v)?;
    let zdv = apply_polynomial(series, &dv, p);
    let zhdv = apply_polynomial_adjoint(series, &dv, p);
    let h: Vec<Complex> = zdv
        .iter()
        .zip(&zhdv)
        .map(|(a, b)| Complex::with_val(p, a + b))
        .collect();
    let x1v = d.apply_adjoint(&h)?;

    let zv = apply_polynomial(series, &v, p);
    let zhv = apply_polynomial_adjoint(series, &v, p);
    let minus_i = Complex::with_val(p, (0, -1));
    let x2v: Vec<Complex> = zv
        .iter()
        .zip(&zhv)
        .map(|(a, b)| Complex::with_val(p, a - b) * &minus_i)
        .collect();

    let var = |xv: &[Complex]| {
        let mean = inner(&v, xv, p);
        norm_sqr(xv, p) - Float::with_val(p, mean.real().square_ref())
    };
    let cross = inner(&x1v, &x2v, p);
    Ok(DirectQuantities {
        var_x1: finite(Float::with_val(out, var(&x1v)), "direct variance of X1")?,
        var_x2: finite(Float::with_val(out, var(&x2v)), "direct variance of X2")?,
        rhs: finite(Float::with_val(out, cross.imag().square_ref()), "direct commutator")?,
    })
}

/// ¼|⟨α|[X₁, X₂]|α⟩|² from Fock matrices.
pub fn rhs_direct(series: &ZetaSeries, alpha: &Complex, beta: &Complex, policy: &TruncationPolicy) -> Result<Float> {
    direct_quantities(series, alpha, beta, policy).map(|q| q.rhs)
}

/// Closed form of the direct right-hand side: Re²[Σ_{m≥1} m! p_m(α+β) conj p_m(α)].
pub fn rhs_closed(series: &ZetaSeries, alpha: &Complex, beta: &Complex) -> Float {
    let p = series.prec();
    let gamma = Complex::with_val(p, alpha + beta);
    let s = weighted_pairing(&series.taylor_shift(&gamma, p), &series.taylor_shift(alpha, p), 1, p);
    Float::with_val(p, s.real().square_ref())
}

/// Every quantity of the check, classified. Numeric failures are reported
/// in the error field rather than returned.
pub fn check_uncertainty(
    series: &ZetaSeries,
    alpha: &Complex,
    beta: &Complex,
    policy: &TruncationPolicy,
    mode: EvaluationMode,
    tol: f64,
) -> UncertaintyReport {
    let p = series.prec();
    let gamma = Complex::with_val(p, alpha + beta);
    let policy = policy.raised_for(&[alpha, &gamma], series.order());
    let zero = Float::new(p);
    let mut report = UncertaintyReport {
        var_x1: zero.clone(),
        var_x2: zero.clone(),
        lhs_product: zero.clone(),
        rhs_paper: zero.clone(),
        rhs_direct: zero.clone(),
        rhs_closed: zero.clone(),
        var_x1_direct: zero.clone(),
        var_x2_direct: zero.clone(),
        slack_direct: zero.clone(),
        slack_paper: zero.clone(),
        scale: Float::with_val(p, SCALE_FLOOR),
        tol,
        classification: Classification::NumericFailure,
        mode,
        alpha: Complex::with_val(p, alpha),
        beta: Complex::with_val(p, beta),
        truncation: policy.dim,
        series_order: series.order(),
        bits: p,
        error: None,
    };
    if let Err(e) = fill(&mut report, series, &policy) {
        report.error = Some(e.to_string());
        report.classification = Classification::NumericFailure;
    }
    report
}

fn fill(r: &mut UncertaintyReport, series: &ZetaSeries, policy: &TruncationPolicy) -> Result<()> {
    let p = series.prec();
    let (alpha, beta, mode) = (r.alpha.clone(), r.beta.clone(), r.mode);
    r.var_x1 = variance_x1(series, &alpha, &beta, policy, mode)?;
    r.var_x2 = variance_x2(series, &alpha, policy, mode)?;
    r.lhs_product = Float::with_val(p, &r.var_x1 * &r.var_x2);
    r.rhs_closed = rhs_closed(series, &alpha, &beta);
    let direct = direct_quantities(series, &alpha, &beta, policy)?;
    r.var_x1_direct = direct.var_x1;
    r.var_x2_direct = direct.var_x2;
    r.rhs_direct = direct.rhs;
    r.rhs_paper = rhs_paper(series, &alpha, &beta, policy, mode)?;
    r.slack_direct = Float::with_val(p, &r.lhs_product - &r.rhs_direct);
    r.slack_paper = Float::with_val(p, &r.lhs_product - &r.rhs_paper);
    r.scale = Float::with_val(p, &r.lhs_product + &r.rhs_direct).max(&Float::with_val(p, SCALE_FLOOR));
    let allowed = Float::with_val(p, &r.scale * r.tol);
    let gap = Float::with_val(p, &r.rhs_paper - &r.rhs_direct).abs();
    r.classification = if r.slack_direct < Float::with_val(p, -&allowed) {
        Classification::InequalityViolationDirect
    } else if gap > allowed {
        Classification::PaperFormMismatch
    } else {
        Classification::Consistent
    };
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::{cplx, PrecisionConfig};

    const P: u32 = 128;

    fn cfg() -> PrecisionConfig {
        PrecisionConfig::with_bits(P).unwrap()
    }

    fn policy() -> TruncationPolicy {
        TruncationPolicy::new(64, 1e-16).unwrap()
    }

    fn series(c: &[(f64, f64)]) -> ZetaSeries {
        ZetaSeries::from_coeffs(c.iter().map(|&(a, b)| cplx(P, a, b)).collect(), cfg()).unwrap()
    }

    fn close(a: &Float, b: f64, tol: f64) -> bool {
        (a.to_f64() - b).abs() <= tol
    }

    #[test]
    fn constant_series_has_no_uncertainty() {
        let s = series(&[(0.8, -0.3)]);
        let r = check_uncertainty(
            &s,
            &cplx(P, 0.3, 0.0),
            &cplx(P, -0.1, 0.0),
            &policy(),
            EvaluationMode::Polynomial,
            DEFAULT_TOL,
        );
        assert_eq!(r.classification, Classification::Consistent);
        assert!(r.var_x1.is_zero() && r.var_x2.is_zero());
        assert!(close(&r.rhs_direct, 0.0, 1e-30));
        assert!(close(&r.rhs_paper, 0.0, 1e-30));
        assert!(close(&r.var_x1_direct, 0.0, 1e-30));
        // with complex amplitudes the printed phase leaves a residue
        let r = check_uncertainty(
            &s,
            &cplx(P, 0.3, 0.2),
            &cplx(P, -0.1, 0.4),
            &policy(),
            EvaluationMode::Polynomial,
            DEFAULT_TOL,
        );
        assert!(close(&r.rhs_direct, 0.0, 1e-30));
        assert!(r.rhs_paper > 1e-4);
    }

    #[test]
    fn constant_series_paper_form_is_an_overlap_phase() {
        // Re²[|c|²(1 − e^{i Im(βᾱ)} e^{−i Im(αβ̄)})] = Re²[|c|²(1 − e^{2i Im(βᾱ)})]
        let s = series(&[(2.0, 0.0)]);
        let alpha = cplx(P, 0.3, 0.2);
        let beta = cplx(P, -0.1, 0.4);
        let got = rhs_paper(&s, &alpha, &beta, &policy(), EvaluationMode::Polynomial).unwrap();
        let phi = phase_im(&beta, &alpha, P).to_f64();
        let want = (4.0 * (1.0 - (2.0 * phi).cos())).powi(2);
        assert!(close(&got, want, 1e-12), "{} vs {want}", got.to_f64());
    }

    #[test]
    fn linear_series_saturates() {
        let s = series(&[(0.0, 0.0), (1.0, 0.0)]);
        let r = check_uncertainty(
            &s,
            &cplx(P, 0.3, 0.0),
            &cplx(P, 0.1, 0.0),
            &policy(),
            EvaluationMode::Polynomial,
            DEFAULT_TOL,
        );
        for v in [
            &r.var_x1,
            &r.var_x2,
            &r.lhs_product,
            &r.rhs_direct,
            &r.rhs_paper,
            &r.rhs_closed,
        ] {
            assert!(close(v, 1.0, 1e-12), "{}", v.to_f64());
        }
        assert_eq!(r.classification, Classification::Consistent);
        // β = 0: Re²[|α|² − (1 + |α|²)] = 1
        let r0 = rhs_paper(
            &s,
            &cplx(P, 0.4, -0.7),
            &cplx(P, 0.0, 0.0),
            &policy(),
            EvaluationMode::Polynomial,
        )
        .unwrap();
        assert!(close(&r0, 1.0, 1e-12));
    }

    #[test]
    fn linear_series_with_complex_amplitudes_exposes_the_phase_sign() {
        let s = series(&[(0.0, 0.0), (1.0, 0.0)]);
        let alpha = cplx(P, 0.3, 0.5);
        let beta = cplx(P, 0.2, -0.4);
        let r = check_uncertainty(&s, &alpha, &beta, &policy(), EvaluationMode::Polynomial, DEFAULT_TOL);
        assert!(close(&r.rhs_direct, 1.0, 1e-12));
        // printed form: Re²[γᾱ − e^{−2iφ}(γᾱ + 1)] with φ = Im(αβ̄), γ = α+β
        let (ar, ai, br, bi) = (0.3f64, 0.5f64, 0.2f64, -0.4f64);
        let (gr, gi) = (ar + br, ai + bi);
        let (pr, pi) = (gr * ar + gi * ai, gi * ar - gr * ai);
        let phi = ai * br - ar * bi;
        let (c, sn) = ((2.0 * phi).cos(), -(2.0 * phi).sin());
        let want = (pr - (c * (pr + 1.0) - sn * pi)).powi(2);
        assert!(close(&r.rhs_paper, want, 1e-12), "{} vs {want}", r.rhs_paper.to_f64());
        assert!(!close(&r.rhs_paper, 1.0, 1e-3));
        assert_eq!(r.classification, Classification::PaperFormMismatch);
    }

    #[test]
    fn closed_forms_match_matrices() {
        let s = series(&[(-0.5, 0.0), (-0.92, 0.0), (-1.0, 0.1), (0.4, -0.3), (-0.2, 0.0)]);
        let alpha = cplx(P, 0.2, 0.1);
        let beta = cplx(P, 0.1, 0.0);
        let r = check_uncertainty(&s, &alpha, &beta, &policy(), EvaluationMode::Polynomial, DEFAULT_TOL);
        let rel = |a: &Float, b: &Float| (a.to_f64() - b.to_f64()).abs() / b.to_f64().abs().max(1e-300);
        assert!(rel(&r.var_x1, &r.var_x1_direct) < 1e-8);
        assert!(rel(&r.var_x2, &r.var_x2_direct) < 1e-8);
        assert!(rel(&r.rhs_closed, &r.rhs_direct) < 1e-8);
        assert!(r.slack_direct >= 0);
    }

    #[test]
    fn phase_identity_on_the_line() {
        let eps = Float::with_val(P, 0.2);
        let t = Float::with_val(P, 17.5);
        let (a, b) = line_amplitudes(&eps, &t, P);
        let want = Float::with_val(P, &eps + 1u32) * &t;
        let got = phase_im(&a, &b, P);
        assert!(Float::with_val(P, &got - &want).abs() < 1e-35);
    }

    #[test]
    fn modes_agree_for_small_amplitudes() {
        let zeta = crate::zeta::taylor_coeffs(40, 0.5, 512, &cfg()).unwrap();
        let a = cplx(P, 0.3, 0.2);
        let b = cplx(P, 0.2, -0.4);
        let pol = policy();
        let vp = variance_x1(&zeta, &a, &b, &pol, EvaluationMode::Polynomial).unwrap();
        let va = variance_x1(&zeta, &a, &b, &pol, EvaluationMode::Analytic).unwrap();
        let g = Complex::with_val(P, &a + &b).abs().real().to_f64();
        // the polynomial and ζ differ by the series tail beyond degree K
        let tail = 2.0 * g.powi(41) / (1.0 - g);
        let bound = 10.0 * cfg().target_abs_err + 4.0 * tail;
        assert!((vp.to_f64() - va.to_f64()).abs() <= bound);
    }

    #[test]
    fn report_round_trips_through_json() {
        let s = series(&[(0.1, 0.2), (-0.7, 0.0), (0.3, 0.3)]);
        let r = check_uncertainty(
            &s,
            &cplx(P, 0.3, 0.1),
            &cplx(P, -0.2, 0.05),
            &policy(),
            EvaluationMode::Polynomial,
            DEFAULT_TOL,
        );
        let text = r.to_json().unwrap();
        assert_eq!(UncertaintyReport::from_json(&text).unwrap(), r);
    }

    #[test]
    fn failures_are_annotated() {
        let s = series(&[(0.1, 0.0), (1.0, 0.0)]);
        let r = check_uncertainty(
            &s,
            &cplx(P, -1.5, 0.0),
            &cplx(P, 0.0, 0.0),
            &policy(),
            EvaluationMode::Analytic,
            DEFAULT_TOL,
        );
        assert_eq!(r.classification, Classification::NumericFailure);
        assert!(r.error.is_some());
    }
}
