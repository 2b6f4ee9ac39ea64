use rug::Complex;

use super::operator::{lower, raise, FockOperator};
use super::policy::TruncationPolicy;
use crate::error::{Error, Result};
use crate::zeta::ZetaSeries;

/// Z = Σ_k C_k A^k on the N-truncation, by Horner's rule Z ← A·Z + C_k I.
pub fn build_riemann_operator(series: &ZetaSeries, policy: &TruncationPolicy, prec: u32) -> Result<FockOperator> {
    let n = policy.dim;
    if n < 2 {
        return Err(Error::InvalidInput(format!("truncation needs N >= 2, got {n}")));
    }
    let coeffs = series.coeffs();
    let label = format!("zeta(a)[K={},N={n}]", series.order());
    let mut z = FockOperator::identity(n, prec).scale(&coeffs[series.order()]);
    for c in coeffs.iter().rev().skip(1) {
        // A·Z: row i becomes √(i+1)·row(i+1), the last row vanishes
        let shifted = FockOperator::from_fn(n, prec, "", |i, j| {
            if i + 1 < n {
                let s = rug::Float::with_val(prec, i + 1).sqrt();
                Complex::with_val(prec, z.get(i + 1, j) * &s)
            } else {
                Complex::new(prec)
            }
        });
        z = shifted;
        for i in 0..n {
            let d = Complex::with_val(prec, z.get(i, i) + c);
            z.set(i, i, d);
        }
    }
    for row in 0..n {
        for col in 0..n {
            if !z.get(row, col).real().is_finite() || !z.get(row, col).imag().is_finite() {
                return Err(Error::Overflow(format!("non-finite entry in {label}")));
            }
        }
    }
    z.label = label;
    Ok(z)
}

/// Z·v without forming Z.
pub fn apply_polynomial(series: &ZetaSeries, v: &[Complex], prec: u32) -> Vec<Complex> {
    horner(series, v, prec, false)
}

/// Zᴴ·v = Σ_k C̄_k (A†)^k v without forming Z.
pub fn apply_polynomial_adjoint(series: &ZetaSeries, v: &[Complex], prec: u32) -> Vec<Complex> {
    horner(series, v, prec, true)
}

fn horner(series: &ZetaSeries, v: &[Complex], prec: u32, adjoint: bool) -> Vec<Complex> {
    let coeff = |c: &Complex| {
        if adjoint {
            Complex::with_val(prec, c.clone().conj())
        } else {
            Complex::with_val(prec, c)
        }
    };
    let mut coeffs = series.coeffs().iter().rev();
    let top = coeff(coeffs.next().expect("nonempty series"));
    let mut acc: Vec<Complex> = v.iter().map(|x| Complex::with_val(prec, x * &top)).collect();
    for c in coeffs {
        let c = coeff(c);
        acc = if adjoint { raise(&acc, prec) } else { lower(&acc, prec) };
        for (a, x) in acc.iter_mut().zip(v) {
            *a += Complex::with_val(prec, x * &c);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::normal::zz_dagger_expect;
    use crate::fock::operator::{inner, norm_sqr};
    use crate::fock::state::{coherent_vector, expect};
    use crate::precision::{cplx, PrecisionConfig};

    const P: u32 = 128;

    fn cfg() -> PrecisionConfig {
        PrecisionConfig::with_bits(P).unwrap()
    }

    fn sample_series() -> ZetaSeries {
        let c = [
            (-0.5, 0.0),
            (-0.918938533204672, 0.0),
            (-1.003, 0.0),
            (-0.998, 0.0),
            (-1.0002, 0.0),
            (-0.9999, 0.0),
        ];
        ZetaSeries::from_coeffs(c.iter().map(|&(a, b)| cplx(P, a, b)).collect(), cfg()).unwrap()
    }

    #[test]
    fn constant_series_is_scaled_identity() {
        let c = cplx(P, 0.7, -0.1);
        let z = build_riemann_operator(
            &ZetaSeries::constant(c.clone(), cfg()),
            &TruncationPolicy::new(8, 1e-16).unwrap(),
            P,
        )
        .unwrap();
        let want = FockOperator::identity(8, P).scale(&c);
        assert_eq!(z.max_abs_diff(&want).unwrap(), 0.0);
    }

    #[test]
    fn expectation_is_polynomial_value() {
        let s = sample_series();
        let policy = TruncationPolicy::new(64, 1e-16).unwrap();
        let alpha = cplx(P, 0.4, 0.0);
        let z = build_riemann_operator(&s, &policy, P).unwrap();
        let state = coherent_vector(&alpha, &policy, P).unwrap();
        let e = expect(&z, &state).unwrap();
        let p = s.eval(&alpha, P);
        assert!(Complex::with_val(P, &e - &p).abs().real().to_f64() < 1e-9);
    }

    #[test]
    fn zz_dagger_matrix_matches_closed_form() {
        let s = sample_series();
        let policy = TruncationPolicy::new(64, 1e-16).unwrap();
        let alpha = cplx(P, 0.25, -0.3);
        let z = build_riemann_operator(&s, &policy, P).unwrap();
        let state = coherent_vector(&alpha, &policy, P).unwrap();
        let w = z.apply_adjoint(&state.vec).unwrap();
        let matrix = norm_sqr(&w, P).to_f64();
        let closed = zz_dagger_expect(&s, &alpha, P).to_f64();
        assert!((matrix - closed).abs() / closed < 1e-8);
    }

    #[test]
    fn vector_horner_matches_matrix() {
        let s = sample_series();
        let policy = TruncationPolicy::new(24, 1e-16).unwrap();
        let z = build_riemann_operator(&s, &policy, P).unwrap();
        let v: Vec<Complex> = (0..24)
            .map(|i| cplx(P, 1.0 / (1.0 + i as f64), 0.1 * i as f64))
            .collect();
        let a = z.apply(&v).unwrap();
        let b = apply_polynomial(&s, &v, P);
        let ah = z.apply_adjoint(&v).unwrap();
        let bh = apply_polynomial_adjoint(&s, &v, P);
        for i in 0..24 {
            assert!(Complex::with_val(P, &a[i] - &b[i]).abs().real().to_f64() < 1e-30);
            assert!(Complex::with_val(P, &ah[i] - &bh[i]).abs().real().to_f64() < 1e-30);
        }
    }

    #[test]
    fn eigen_relation_for_small_amplitude() {
        let s = sample_series();
        let policy = TruncationPolicy::new(64, 1e-16).unwrap();
        let alpha = cplx(P, 0.5, 0.6);
        let state = coherent_vector(&alpha, &policy, P).unwrap();
        let zv = apply_polynomial(&s, &state.vec, P);
        let p = s.eval(&alpha, P);
        let resid: Vec<Complex> = zv
            .iter()
            .zip(&state.vec)
            .map(|(a, v)| Complex::with_val(P, a - Complex::with_val(P, v * &p)))
            .collect();
        assert!(norm_sqr(&resid, P).to_f64().sqrt() < 1e-12);
        let overlap = inner(&state.vec, &zv, P);
        assert!(Complex::with_val(P, &overlap - &p).abs().real().to_f64() < 1e-12);
    }
}
