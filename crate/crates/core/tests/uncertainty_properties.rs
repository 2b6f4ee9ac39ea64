use proptest::prelude::*;
use riemann_core::fock::TruncationPolicy;
use riemann_core::precision::cplx;
use riemann_core::uncertainty::{
    check_uncertainty, direct_quantities, line_amplitudes, phase_im, variance_x1, variance_x2, Classification,
    EvaluationMode, UncertaintyReport,
};
use riemann_core::zeta::ZetaSeries;
use riemann_core::PrecisionConfig;
use rug::{Complex, Float};

const P: u32 = 128;

fn series_from(coeffs: &[(f64, f64)]) -> ZetaSeries {
    ZetaSeries::from_coeffs(
        coeffs.iter().map(|&(re, im)| cplx(P, re, im)).collect(),
        PrecisionConfig::with_bits(P).unwrap(),
    )
    .unwrap()
}

fn amplitude() -> impl Strategy<Value = (f64, f64)> {
    (0.0f64..1.0, 0.0f64..std::f64::consts::TAU).prop_map(|(r, th)| (r * th.cos(), r * th.sin()))
}

fn rel(a: &Float, b: &Float) -> f64 {
    let d = Float::with_val(P, a - b).abs().to_f64();
    d / b.to_f64().abs().max(1e-30)
}

#[test]
fn linear_series_saturates() {
    let s = ZetaSeries::linear(PrecisionConfig::with_bits(P).unwrap());
    let policy = TruncationPolicy::new(64, 1e-16).unwrap();
    let r = check_uncertainty(
        &s,
        &cplx(P, 0.3, 0.0),
        &cplx(P, 0.1, 0.0),
        &policy,
        EvaluationMode::Polynomial,
        1e-9,
    );
    for v in [&r.lhs_product, &r.rhs_direct, &r.rhs_paper] {
        assert!((v.to_f64() - 1.0).abs() < 1e-12);
    }
    assert_eq!(r.classification, Classification::Consistent);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn direct_relation_never_fails(
        coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..7),
        (ar, ai) in amplitude(),
        (br, bi) in amplitude(),
    ) {
        let s = series_from(&coeffs);
        let policy = TruncationPolicy::new(64, 1e-16).unwrap();
        let r = check_uncertainty(&s, &cplx(P, ar, ai), &cplx(P, br, bi), &policy, EvaluationMode::Polynomial, 1e-9);
        prop_assert!(r.error.is_none(), "{:?}", r.error);
        let floor = Float::with_val(P, &r.scale * -1e-9);
        prop_assert!(r.slack_direct >= floor);
        prop_assert_ne!(r.classification, Classification::InequalityViolationDirect);
    }

    #[test]
    fn closed_variances_match_matrices(
        coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..7),
        (ar, ai) in amplitude(),
        (br, bi) in amplitude(),
    ) {
        let s = series_from(&coeffs);
        let alpha = cplx(P, ar, ai);
        let beta = cplx(P, br, bi);
        let policy = TruncationPolicy::new(64, 1e-16).unwrap();
        let q = direct_quantities(&s, &alpha, &beta, &policy).unwrap();
        let v1 = variance_x1(&s, &alpha, &beta, &policy, EvaluationMode::Polynomial).unwrap();
        let v2 = variance_x2(&s, &alpha, &policy, EvaluationMode::Polynomial).unwrap();
        prop_assert!(rel(&q.var_x1, &v1) < 1e-8, "{} vs {}", q.var_x1.to_f64(), v1.to_f64());
        prop_assert!(rel(&q.var_x2, &v2) < 1e-8, "{} vs {}", q.var_x2.to_f64(), v2.to_f64());
    }

    #[test]
    fn line_phase_is_linear_in_t(eps in 0.0f64..1.0, t in -50.0f64..50.0) {
        let (alpha, beta) = line_amplitudes(&Float::with_val(P, eps), &Float::with_val(P, t), P);
        let want = Float::with_val(P, Float::with_val(P, eps) + 1u32) * Float::with_val(P, t);
        let got = phase_im(&alpha, &beta, P);
        prop_assert!(Float::with_val(P, &got - &want).abs().to_f64() <= 1e-30 * want.to_f64().abs().max(1.0));
    }

    #[test]
    fn report_json_round_trips(
        coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..4),
        (ar, ai) in amplitude(),
    ) {
        let s = series_from(&coeffs);
        let policy = TruncationPolicy::new(48, 1e-16).unwrap();
        let r = check_uncertainty(&s, &cplx(P, ar, ai), &Complex::with_val(P, (0.2, -0.1)), &policy, EvaluationMode::Polynomial, 1e-9);
        let back = UncertaintyReport::from_json(&r.to_json().unwrap()).unwrap();
        prop_assert_eq!(back, r);
    }
}
