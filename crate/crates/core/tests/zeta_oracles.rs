use proptest::prelude::*;
use riemann_core::precision::cplx;
use riemann_core::zeta::{argument_count, eval_zeta, find_zero_near, taylor_coeffs, Rectangle};
use riemann_core::PrecisionConfig;
use rug::{Complex, Float};

const P: u32 = 128;

fn cfg() -> PrecisionConfig {
    PrecisionConfig::with_bits(P).unwrap()
}

fn dist(a: &Complex, b: &Complex) -> f64 {
    Complex::with_val(P, a - b).abs().real().to_f64()
}

/// Σ_{n<N} n^−s plus the Euler–Maclaurin tail through the s(s+1)(s+2) term.
fn dirichlet_oracle(s: &Complex) -> Complex {
    let n_terms = 400u32;
    let mut acc = Complex::new(P);
    for n in 1..n_terms {
        let ln = Float::with_val(P, n).ln();
        acc += Complex::with_val(P, s * -ln).exp();
    }
    let n = Float::with_val(P, n_terms);
    let ln = Float::with_val(P, n.ln_ref());
    let n_ms = Complex::with_val(P, s * Float::with_val(P, -&ln)).exp();
    let s1 = Complex::with_val(P, s - 1u32);
    // N^{1−s}/(s−1) + N^{−s}/2 + s N^{−s−1}/12 − s(s+1)(s+2) N^{−s−3}/720
    acc += Complex::with_val(P, &n_ms * &n) / &s1;
    acc += Complex::with_val(P, &n_ms / 2u32);
    acc += Complex::with_val(P, s * &n_ms) / Float::with_val(P, &n * 12u32);
    let s2 = Complex::with_val(P, s + 1u32) * Complex::with_val(P, s + 2u32) * s;
    let n3 = Float::with_val(P, n.clone().square()) * &n * 720u32;
    acc -= s2 * &n_ms / n3;
    acc
}

#[test]
fn even_values_match_bernoulli_closed_forms() {
    let pi = Float::with_val(P, rug::float::Constant::Pi);
    let pi2 = Float::with_val(P, pi.square_ref());
    let z2 = eval_zeta(&cplx(P, 2.0, 0.0), &cfg()).unwrap();
    assert!(dist(&z2, &Complex::with_val(P, Float::with_val(P, &pi2 / 6u32))) < 1e-30);
    let z4 = eval_zeta(&cplx(P, 4.0, 0.0), &cfg()).unwrap();
    let pi4 = Float::with_val(P, pi2.square_ref()) / 90u32;
    assert!(dist(&z4, &Complex::with_val(P, pi4)) < 1e-30);
}

#[test]
fn value_at_zero_and_negative_half() {
    let z0 = eval_zeta(&cplx(P, 0.0, 0.0), &cfg()).unwrap();
    assert!(dist(&z0, &cplx(P, -0.5, 0.0)) < 1e-30);
    // ζ(−1/2) = −ζ(3/2)/(4π)
    let z32 = eval_zeta(&cplx(P, 1.5, 0.0), &cfg()).unwrap();
    let pi = Float::with_val(P, rug::float::Constant::Pi);
    let want = Complex::with_val(P, -z32 / Float::with_val(P, pi * 4u32));
    let zm = eval_zeta(&cplx(P, -0.5, 0.0), &cfg()).unwrap();
    assert!(dist(&zm, &want) < 1e-25, "{}", dist(&zm, &want));
}

#[test]
fn first_zero_is_simple_and_located() {
    let z = find_zero_near(14.0, &cfg()).unwrap();
    let known = Float::with_val(P, Float::parse("14.134725141734693790457251983562470270784").unwrap());
    assert!(Float::with_val(P, &z.t - &known).abs().to_f64() < 1e-20);
    assert_eq!(argument_count(&Rectangle::strip(13.5, 14.5)).unwrap(), 1);
    assert_eq!(argument_count(&Rectangle::strip(10.0, 13.5)).unwrap(), 0);
}

#[test]
fn low_order_coefficients() {
    let c = PrecisionConfig::with_bits(256).unwrap();
    let s = taylor_coeffs(40, 0.5, 512, &c).unwrap();
    assert!(dist(&s.coeffs()[0], &cplx(P, -0.5, 0.0)) < 1e-40);
    // C_1 = ζ'(0) = −½ ln 2π
    let tau = Float::with_val(256, rug::float::Constant::Pi) * 2u32;
    let want = Float::with_val(256, tau.ln_ref()) / -2i32;
    assert!(Float::with_val(256, s.coeffs()[1].real() - want).abs().to_f64() < 1e-40);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn conjugate_symmetry(sigma in 0.05f64..3.0, t in -40.0f64..40.0) {
        prop_assume!((sigma - 1.0).abs() > 1e-3 || t.abs() > 1e-3);
        let s = cplx(P, sigma, t);
        let z = eval_zeta(&s, &cfg()).unwrap();
        let zc = eval_zeta(&Complex::with_val(P, s.conj_ref()), &cfg()).unwrap();
        prop_assert!(dist(&Complex::with_val(P, z.conj_ref()), &zc) < 1e-25);
    }

    #[test]
    fn matches_dirichlet_series(sigma in 1.5f64..4.0, t in -20.0f64..20.0) {
        let s = cplx(P, sigma, t);
        let z = eval_zeta(&s, &cfg()).unwrap();
        let oracle = dirichlet_oracle(&s);
        prop_assert!(dist(&z, &oracle) < 1e-15, "{}", dist(&z, &oracle));
    }

    #[test]
    fn series_reconstructs_inside_disk(r in 0.0f64..0.3, theta in 0.0f64..std::f64::consts::TAU) {
        let c = PrecisionConfig::with_bits(256).unwrap();
        let series = taylor_coeffs(40, 0.5, 512, &c).unwrap();
        let s = cplx(256, r * theta.cos(), r * theta.sin());
        let exact = eval_zeta(&s, &c).unwrap();
        let approx = series.eval(&s, 256);
        // truncation error ~ |s|^41 with |C_k| → 1
        let d = Complex::with_val(256, &exact - &approx).abs().real().to_f64();
        prop_assert!(d < 1e-10 + 4.0 * r.powi(41), "{d}");
    }
}
