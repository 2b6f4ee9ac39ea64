use rug::{Complex, Float};

use super::operator::{inner, norm_sqr, FockOperator};
use super::policy::TruncationPolicy;
use crate::error::{Error, Result};

/// Truncated coherent state: vec[n] = e^{−|α|²/2} αⁿ/√(n!).
#[derive(Clone, Debug)]
pub struct CoherentState {
    pub alpha: Complex,
    pub vec: Vec<Complex>,
}

impl CoherentState {
    pub fn dim(&self) -> usize {
        self.vec.len()
    }

    pub fn norm_sqr(&self, prec: u32) -> Float {
        norm_sqr(&self.vec, prec)
    }

    /// Copy rescaled to unit norm.
    pub fn normalized(&self, prec: u32) -> Vec<Complex> {
        let norm = self.norm_sqr(prec).sqrt();
        self.vec.iter().map(|c| Complex::with_val(prec, c / &norm)).collect()
    }
}

pub fn coherent_vector(alpha: &Complex, policy: &TruncationPolicy, prec: u32) -> Result<CoherentState> {
    policy.require(alpha)?;
    let n = policy.dim;
    let half_norm = Float::with_val(prec, alpha.norm_ref()) / 2u32;
    let mut c = Complex::with_val(prec, (Float::with_val(prec, -half_norm).exp(), 0));
    let mut vec = Vec::with_capacity(n);
    vec.push(c.clone());
    for k in 1..n {
        c *= alpha;
        c /= Float::with_val(prec, k).sqrt();
        vec.push(c.clone());
    }
    let state = CoherentState {
        alpha: Complex::with_val(prec, alpha),
        vec,
    };
    let norm = state.norm_sqr(prec).to_f64();
    // rounding may push the norm a few ulps above 1
    let slack = 2f64.powi(-(prec.min(1000) as i32) + 8);
    if !(norm >= 1.0 - policy.tail_tol && norm <= 1.0 + slack) {
        return Err(Error::Truncation(format!(
            "coherent vector norm {norm} outside [1 - tail_tol, 1]"
        )));
    }
    Ok(state)
}

/// vᴴ M v
pub fn expect(op: &FockOperator, state: &CoherentState) -> Result<Complex> {
    let mv = op.apply(&state.vec)?;
    Ok(inner(&state.vec, &mv, op.prec()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::operator::annihilation_matrix;
    use crate::precision::cplx;

    const P: u32 = 128;

    fn policy() -> TruncationPolicy {
        TruncationPolicy::new(64, 1e-16).unwrap()
    }

    #[test]
    fn vacuum() {
        let s = coherent_vector(&cplx(P, 0.0, 0.0), &policy(), P).unwrap();
        assert_eq!(s.vec[0].real().to_f64(), 1.0);
        assert!(s.vec[1..].iter().all(|c| c.is_zero()));
    }

    #[test]
    fn norm_within_tail() {
        let s = coherent_vector(&cplx(P, 0.8, 0.3), &policy(), P).unwrap();
        assert!((s.norm_sqr(P).to_f64() - 1.0).abs() <= 1e-16);
    }

    #[test]
    fn lowering_expectation_is_alpha() {
        let alpha = cplx(P, 0.8, 0.3);
        let s = coherent_vector(&alpha, &policy(), P).unwrap();
        let a = annihilation_matrix(64, P).unwrap();
        let e = expect(&a, &s).unwrap();
        let d = Complex::with_val(P, &e - &alpha).abs().real().to_f64();
        assert!(d < 1e-10);
        let n_op = a.adjoint().matmul(&a).unwrap();
        let n = expect(&n_op, &s).unwrap();
        assert!((n.real().to_f64() - 0.73).abs() < 1e-10);
        let id = expect(&FockOperator::identity(64, P), &s).unwrap();
        assert!((id.real().to_f64() - 1.0).abs() < 1e-16);
    }

    #[test]
    fn eigenvector_of_lowering_up_to_tail() {
        let alpha = cplx(P, -0.6, 0.5);
        let s = coherent_vector(&alpha, &policy(), P).unwrap();
        let a = annihilation_matrix(64, P).unwrap();
        let av = a.apply(&s.vec).unwrap();
        for (x, v) in av.iter().zip(&s.vec).take(60) {
            let d = Complex::with_val(P, x - Complex::with_val(P, v * &alpha))
                .abs()
                .real()
                .to_f64();
            assert!(d < 1e-30);
        }
    }

    #[test]
    fn rejects_inadmissible_amplitude() {
        assert!(matches!(
            coherent_vector(&cplx(P, 6.0, 0.0), &policy(), P),
            Err(Error::Truncation(_))
        ));
    }
}
