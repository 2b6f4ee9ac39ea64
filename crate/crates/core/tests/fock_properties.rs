use proptest::prelude::*;
use riemann_core::fock::{
    annihilation_matrix, build_riemann_operator, coherent_vector, displacement_matrix, expect, inner, zz_dagger_expect,
    FockOperator, TruncationPolicy,
};
use riemann_core::precision::cplx;
use riemann_core::zeta::ZetaSeries;
use riemann_core::PrecisionConfig;
use rug::{Complex, Float};

const P: u32 = 128;

fn close(a: &Complex, b: &Complex, tol: f64) -> bool {
    Complex::with_val(P, a - b).abs().real().to_f64() <= tol
}

fn series_from(coeffs: &[(f64, f64)]) -> ZetaSeries {
    ZetaSeries::from_coeffs(
        coeffs.iter().map(|&(re, im)| cplx(P, re, im)).collect(),
        PrecisionConfig::with_bits(P).unwrap(),
    )
    .unwrap()
}

fn amplitude() -> impl Strategy<Value = (f64, f64)> {
    (0.0f64..1.5, 0.0f64..std::f64::consts::TAU).prop_map(|(r, th)| (r * th.cos(), r * th.sin()))
}

#[test]
fn commutator_is_identity_off_the_corner() {
    let n = 24;
    let a = annihilation_matrix(n, P).unwrap();
    let ad = a.adjoint();
    let comm = a.matmul(&ad).unwrap().sub(&ad.matmul(&a).unwrap()).unwrap();
    let id = FockOperator::identity(n, P);
    // √n·√n is exact only to rounding
    assert!(comm.max_abs_diff_block(&id, n - 1).unwrap() < 1e-30);
    assert!((comm.get(n - 1, n - 1).real().to_f64() + (n - 1) as f64).abs() < 1e-30);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn coherent_state_is_lowering_eigenvector((re, im) in amplitude()) {
        let alpha = cplx(P, re, im);
        let policy = TruncationPolicy::new(64, 1e-16).unwrap();
        let state = coherent_vector(&alpha, &policy, P).unwrap();
        let a = annihilation_matrix(64, P).unwrap();
        let mean = expect(&a, &state).unwrap();
        prop_assert!(close(&mean, &alpha, 1e-12));
    }

    #[test]
    fn displacement_composes_with_phase((ar, ai) in amplitude(), (br, bi) in amplitude()) {
        let alpha = cplx(P, ar, ai);
        let beta = cplx(P, br, bi);
        let policy = TruncationPolicy::new(72, 1e-16).unwrap();
        let d = displacement_matrix(&alpha, 72, P).unwrap();
        let moved = d.apply(&coherent_vector(&beta, &policy, P).unwrap().vec).unwrap();
        let target = coherent_vector(&Complex::with_val(P, &alpha + &beta), &policy, P).unwrap().vec;
        // ⟨α+β|D(α)|β⟩ = e^{i Im(α β̄)}
        let overlap = inner(&target, &moved, P);
        let phase = Complex::with_val(P, &alpha * beta.clone().conj()).imag().to_f64();
        prop_assert!(close(&overlap, &cplx(P, phase.cos(), phase.sin()), 1e-10));
    }

    #[test]
    fn normal_ordered_closed_form_matches_matrices(
        coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..6),
        (re, im) in amplitude(),
    ) {
        let series = series_from(&coeffs);
        let alpha = cplx(P, re, im);
        let policy = TruncationPolicy::new(64, 1e-16).unwrap();
        let z = build_riemann_operator(&series, &policy, P).unwrap();
        let zz = z.matmul(&z.adjoint()).unwrap();
        let state = coherent_vector(&alpha, &policy, P).unwrap();
        let matrix = expect(&zz, &state).unwrap();
        let closed = zz_dagger_expect(&series, &alpha, P);
        let scale = closed.to_f64().abs().max(1.0);
        prop_assert!(Float::with_val(P, matrix.real() - &closed).abs().to_f64() < 1e-10 * scale);
        prop_assert!(matrix.imag().to_f64().abs() < 1e-10 * scale);
    }
}
