//! Closed forms for coherent-state expectations of products of ζ(a) and
//! ζ(a)†, with no Fock truncation.
//!
//! With ζ(a+γ) = Σ_m p_m(γ) a^m (the Taylor shift of the polynomial about γ)
//! and D†(γ) a D(γ) = a + γ, every such expectation reduces to vacuum
//! expectations ⟨0|a^m a†^n|0⟩ = m! δ_mn.

use rug::{Complex, Float};

use crate::zeta::ZetaSeries;

/// ⟨α| a^j a†^k |α⟩ = Σ_m m! C(j,m) C(k,m) ᾱ^{k−m} α^{j−m}.
pub fn aj_adk_expectation(alpha: &Complex, j: usize, k: usize, prec: u32) -> Complex {
    let conj = Complex::with_val(prec, alpha.clone().conj());
    let mut acc = Complex::new(prec);
    let mut fact = Float::with_val(prec, 1);
    for m in 0..=j.min(k) {
        if m > 0 {
            fact *= m as u32;
        }
        let coeff = Float::with_val(prec, &fact * binomial(j, m, prec)) * binomial(k, m, prec);
        let mut term = ipow(&conj, k - m, prec);
        term *= ipow(alpha, j - m, prec);
        term *= &coeff;
        acc += term;
    }
    acc
}

fn ipow(z: &Complex, n: usize, prec: u32) -> Complex {
    let mut out = Complex::with_val(prec, 1);
    for _ in 0..n {
        out *= z;
    }
    out
}

fn binomial(n: usize, k: usize, prec: u32) -> Float {
    let mut b = Float::with_val(prec, 1);
    for i in 0..k {
        b *= (n - i) as u32;
        b /= (i + 1) as u32;
    }
    b
}

/// Σ_m m! p_m(left) conj(p_m(right)) = ⟨0| ζ(a+left) ζ(a+right)† |0⟩.
pub fn normal_cross_sum(series: &ZetaSeries, left: &Complex, right: &Complex, prec: u32) -> Complex {
    let pl = series.taylor_shift(left, prec);
    let pr = series.taylor_shift(right, prec);
    weighted_pairing(&pl, &pr, 0, prec)
}

pub(crate) fn weighted_pairing(pl: &[Complex], pr: &[Complex], from: usize, prec: u32) -> Complex {
    let mut acc = Complex::new(prec);
    let mut fact = Float::with_val(prec, 1);
    for (m, (a, b)) in pl.iter().zip(pr).enumerate() {
        if m > 0 {
            fact *= m as u32;
        }
        if m < from {
            continue;
        }
        let t = Complex::with_val(prec, a * b.clone().conj()) * &fact;
        acc += t;
    }
    acc
}

pub(crate) fn weighted_norm(p: &[Complex], from: usize, prec: u32) -> Float {
    let mut acc = Float::new(prec);
    let mut fact = Float::with_val(prec, 1);
    for (m, c) in p.iter().enumerate() {
        if m > 0 {
            fact *= m as u32;
        }
        if m >= from {
            acc += Float::with_val(prec, c.norm_ref()) * &fact;
        }
    }
    acc
}

/// ⟨α|ζζ†|α⟩ = Σ_m m! |p_m(α)|².
pub fn zz_dagger_expect(series: &ZetaSeries, alpha: &Complex, prec: u32) -> Float {
    weighted_norm(&series.taylor_shift(alpha, prec), 0, prec)
}

/// ⟨α|ζζ†|α⟩ − |P(α)|² = Σ_{m≥1} m! |p_m(α)|², the variance of ζ + ζ†.
pub fn shifted_variance(series: &ZetaSeries, alpha: &Complex, prec: u32) -> Float {
    weighted_norm(&series.taylor_shift(alpha, prec), 1, prec)
}

/// Σ_{j,k} C_j C̄_k ⟨α|a^j a†^k|α⟩, the unreduced double sum.
pub fn zz_dagger_double_sum(series: &ZetaSeries, alpha: &Complex, prec: u32) -> Complex {
    let c = series.coeffs();
    let mut acc = Complex::new(prec);
    for (j, cj) in c.iter().enumerate() {
        for (k, ck) in c.iter().enumerate() {
            let w = Complex::with_val(prec, cj * ck.clone().conj());
            acc += w * aj_adk_expectation(alpha, j, k, prec);
        }
    }
    acc
}

/// ⟨α+β| ζ D(β) ζ† |α⟩ = e^{i Im(β ᾱ)} Σ_m m! p_m(α+β) conj(p_m(α)).
pub fn displaced_cross_element(series: &ZetaSeries, alpha: &Complex, beta: &Complex, prec: u32) -> Complex {
    let gamma = Complex::with_val(prec, alpha + beta);
    let sum = normal_cross_sum(series, &gamma, alpha, prec);
    let phase = Complex::with_val(prec, beta * alpha.clone().conj()).imag().clone();
    sum * unit_phase(&phase, prec)
}

/// e^{iφ}
pub fn unit_phase(phi: &Float, prec: u32) -> Complex {
    let (s, c) = Float::with_val(prec, phi).sin_cos(Float::new(prec));
    Complex::with_val(prec, (c, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::{cplx, PrecisionConfig};

    const P: u32 = 128;

    fn series(c: &[(f64, f64)]) -> ZetaSeries {
        ZetaSeries::from_coeffs(
            c.iter().map(|&(re, im)| cplx(P, re, im)).collect(),
            PrecisionConfig::with_bits(P).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn trivial_normal_orderings() {
        let a = cplx(P, 0.5, 0.1);
        assert_eq!(aj_adk_expectation(&a, 0, 0, P).real().to_f64(), 1.0);
        let e = aj_adk_expectation(&a, 1, 1, P);
        assert!((e.real().to_f64() - 1.26).abs() < 1e-15);
        assert!(e.imag().to_f64().abs() < 1e-30);
        let vac = cplx(P, 0.0, 0.0);
        assert_eq!(aj_adk_expectation(&vac, 2, 2, P).real().to_f64(), 2.0);
        assert_eq!(aj_adk_expectation(&vac, 2, 1, P).real().to_f64(), 0.0);
    }

    #[test]
    fn constant_and_linear_series() {
        let a = cplx(P, 0.3, -0.7);
        let c = series(&[(1.5, -0.5)]);
        assert!((zz_dagger_expect(&c, &a, P).to_f64() - 2.5).abs() < 1e-30);
        assert!(shifted_variance(&c, &a, P).is_zero());
        let lin = series(&[(0.0, 0.0), (1.0, 0.0)]);
        assert!((zz_dagger_expect(&lin, &a, P).to_f64() - 1.58).abs() < 1e-15);
        assert!((shifted_variance(&lin, &a, P).to_f64() - 1.0).abs() < 1e-30);
    }

    #[test]
    fn reduced_form_matches_double_sum() {
        let s = series(&[(0.2, 0.1), (-1.0, 0.3), (0.5, -0.2), (0.1, 0.0), (-0.3, 0.4)]);
        for a in [cplx(P, 0.4, 0.0), cplx(P, -0.3, 0.9), cplx(P, 1.7, -2.2)] {
            let reduced = zz_dagger_expect(&s, &a, P);
            let full = zz_dagger_double_sum(&s, &a, P);
            let scale = reduced.to_f64().abs().max(1.0);
            assert!((full.real().to_f64() - reduced.to_f64()).abs() < 1e-25 * scale);
            assert!(full.imag().to_f64().abs() < 1e-25 * scale);
            // bounded below by |P(α)|²
            let p = s.eval(&a, P);
            assert!(reduced >= Float::with_val(P, p.norm_ref()));
        }
    }

    #[test]
    fn cross_element_of_constant_is_overlap_phase() {
        let c = series(&[(2.0, 0.0)]);
        let alpha = cplx(P, 0.3, 0.2);
        let beta = cplx(P, -0.1, 0.4);
        let m = displaced_cross_element(&c, &alpha, &beta, P);
        let phi = Complex::with_val(P, &beta * alpha.clone().conj()).imag().to_f64();
        assert!((m.real().to_f64() - 4.0 * phi.cos()).abs() < 1e-15);
        assert!((m.imag().to_f64() - 4.0 * phi.sin()).abs() < 1e-15);
    }
}
