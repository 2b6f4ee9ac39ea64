//! ζ(s) through the alternating Dirichlet eta series,
//! ζ(s) = η(s) / (1 − 2^{1−s}), with Chebyshev-weighted acceleration of the
//! alternating sum.
//!
//! The weighted partial sum converges geometrically at rate (3+√8)^{-n} for
//! every s with Re s > −1 (for Re s < 1/2 the rate picks up a polynomial
//! factor in n), so the same routine covers the critical strip and the small
//! circle around s = 0 used for Taylor coefficient extraction.

use rug::float::Constant;
use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::precision::PrecisionConfig;

/// ln(3 + √8), the per-term convergence rate of the weighted sum.
const LN_RATE: f64 = 1.762_747_174_039_086;

/// Lowest real part accepted by the evaluator.
pub const MIN_REAL_PART: f64 = -1.0;

pub fn eval_zeta(s: &Complex, cfg: &PrecisionConfig) -> Result<Complex> {
    evaluate(s, cfg, false).map(|(z, _)| z)
}

/// ζ(s) together with ζ'(s), both from the same accelerated sum.
pub fn eval_zeta_with_derivative(s: &Complex, cfg: &PrecisionConfig) -> Result<(Complex, Complex)> {
    evaluate(s, cfg, true).map(|(z, dz)| (z, dz.expect("derivative requested")))
}

/// ζ(1+ε) on 0 < ε ≤ 1, checked to be real and strictly positive.
pub fn zeta_one_plus_eps(eps: &Float, cfg: &PrecisionConfig) -> Result<Float> {
    if !(*eps > 0 && *eps <= 1) {
        return Err(Error::InvalidInput(format!(
            "eps must lie in (0, 1], got {}",
            eps.to_f64()
        )));
    }
    let s = Complex::with_val(cfg.bits, (Float::with_val(cfg.bits, eps + 1u32), 0));
    let z = eval_zeta(&s, cfg)?;
    let target = cfg.target();
    if Float::with_val(cfg.bits, z.imag().abs_ref()) > target {
        return Err(Error::ClaimViolation(format!(
            "zeta(1+eps) has imaginary part {} above tolerance",
            z.imag().to_f64()
        )));
    }
    if *z.real() <= 0 {
        return Err(Error::ClaimViolation(format!(
            "zeta(1+eps) = {} is not positive",
            z.real().to_f64()
        )));
    }
    Ok(z.real().clone())
}

fn evaluate(s: &Complex, cfg: &PrecisionConfig, derivative: bool) -> Result<(Complex, Option<Complex>)> {
    if !s.real().is_finite() || !s.imag().is_finite() {
        return Err(Error::InvalidInput("s must be finite".into()));
    }
    let sigma = s.real().to_f64();
    let t = s.imag().to_f64().abs();
    if sigma <= MIN_REAL_PART {
        return Err(Error::Domain(format!(
            "eta evaluation needs Re s > {MIN_REAL_PART}, got {sigma}"
        )));
    }
    if *s.real() == 1 && s.imag().is_zero() {
        return Err(Error::Pole);
    }

    let probe_bits = cfg.bits + 64;
    let den_probe = eta_denominator(s, probe_bits);
    let den_abs = Float::with_val(probe_bits, den_probe.abs_ref());
    if den_abs.is_zero() {
        return Err(Error::Domain("1 - 2^(1-s) vanishes to working precision".into()));
    }
    let den_log2 = Float::with_val(64, den_abs.log2_ref()).to_f64();
    let den_bits = (-den_log2).max(0.0).ceil() as u32;

    let tol_ln = cfg.target_abs_err.ln() + den_log2 * std::f64::consts::LN_2 - 4f64.ln();
    let growth = (3.0 * (1.0 + 2.0 * t)).ln() + std::f64::consts::PI * t / 2.0;
    let poly = 2.0 * (0.5 - sigma).max(0.0) + if derivative { 1.0 } else { 0.0 };
    let mut n = 8usize;
    while growth + poly * ((n + 1) as f64).ln() - n as f64 * LN_RATE > tol_ln {
        n += 1;
        if n > cfg.max_terms {
            return Err(Error::Convergence(format!(
                "eta series needs more than {} terms at s = {sigma}+{t}i",
                cfg.max_terms
            )));
        }
    }

    loop {
        let check = n + n / 4 + 4;
        if check > cfg.max_terms {
            return Err(Error::Convergence(format!(
                "eta series did not settle within {} terms",
                cfg.max_terms
            )));
        }
        let log_n = ((check + 1) as f64).log2();
        let wp = cfg.bits
            + 32
            + den_bits
            + log_n.ceil() as u32
            + ((-sigma).max(0.0) * log_n).ceil() as u32
            + if derivative { 8 } else { 0 };
        let terms = DirichletTerms::new(s, check, wp, derivative);
        let coarse = terms.weighted_sum(n);
        let fine = terms.weighted_sum(check);
        let den = eta_denominator(s, wp);
        let mut gap = Float::with_val(wp, Complex::with_val(wp, &coarse - &fine).abs_ref());
        gap /= Float::with_val(wp, den.abs_ref());
        if gap.to_f64() <= cfg.target_abs_err / 2.0 {
            let zeta = Complex::with_val(wp, &fine / &den);
            let dzeta = derivative.then(|| {
                let eta_prime = terms.weighted_log_sum(check);
                // d/ds (1 - 2^{1-s}) = 2^{1-s} ln 2 = (1 - den) ln 2
                let ln2 = Float::with_val(wp, Constant::Log2);
                let dden = Complex::with_val(wp, 1 - &den) * &ln2;
                let num = eta_prime - Complex::with_val(wp, &zeta * &dden);
                Complex::with_val(cfg.bits, num / &den)
            });
            return Ok((Complex::with_val(cfg.bits, zeta), dzeta));
        }
        n *= 2;
    }
}

fn eta_denominator(s: &Complex, prec: u32) -> Complex {
    let ln2 = Float::with_val(prec, Constant::Log2);
    let exponent = Complex::with_val(prec, 1 - s) * &ln2;
    Complex::with_val(prec, 1 - exponent.exp())
}

/// (k+1)^{-s} (and optionally ln(k+1)) for k < len, built multiplicatively
/// from prime powers.
struct DirichletTerms {
    prec: u32,
    powers: Vec<Complex>,
    logs: Option<Vec<Float>>,
}

impl DirichletTerms {
    fn new(s: &Complex, len: usize, prec: u32, with_logs: bool) -> Self {
        let top = len + 1;
        let mut smallest = vec![0usize; top + 1];
        for p in 2..=top {
            if smallest[p] == 0 {
                let mut q = p;
                while q <= top {
                    if smallest[q] == 0 {
                        smallest[q] = p;
                    }
                    q += p;
                }
            }
        }
        let neg_s = Complex::with_val(prec, -s);
        let mut powers: Vec<Complex> = Vec::with_capacity(top + 1);
        let mut logs: Vec<Float> = Vec::with_capacity(top + 1);
        powers.push(Complex::new(prec));
        powers.push(Complex::with_val(prec, 1));
        logs.push(Float::new(prec));
        logs.push(Float::new(prec));
        for (m, &p) in smallest.iter().enumerate().take(top + 1).skip(2) {
            if p == m {
                let ln_p = Float::with_val(prec, m).ln();
                powers.push(Complex::with_val(prec, &neg_s * &ln_p).exp());
                logs.push(ln_p);
            } else {
                let q = m / p;
                powers.push(Complex::with_val(prec, &powers[p] * &powers[q]));
                logs.push(Float::with_val(prec, &logs[p] + &logs[q]));
            }
        }
        Self {
            prec,
            powers,
            logs: with_logs.then_some(logs),
        }
    }

    fn weighted_sum(&self, n: usize) -> Complex {
        let weights = chebyshev_weights(n, self.prec);
        let mut acc = Complex::new(self.prec);
        for (k, w) in weights.iter().enumerate() {
            let term = Complex::with_val(self.prec, &self.powers[k + 1] * w);
            if k % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    /// −Σ (−1)^k w_k ln(k+1) (k+1)^{−s}, the derivative of the weighted sum.
    fn weighted_log_sum(&self, n: usize) -> Complex {
        let logs = self.logs.as_ref().expect("logs were requested");
        let weights = chebyshev_weights(n, self.prec);
        let mut acc = Complex::new(self.prec);
        for (k, w) in weights.iter().enumerate() {
            let scale = Float::with_val(self.prec, w * &logs[k + 1]);
            let term = Complex::with_val(self.prec, &self.powers[k + 1] * &scale);
            if k % 2 == 0 {
                acc -= term;
            } else {
                acc += term;
            }
        }
        acc
    }
}

/// w_k = 1 − d_k/d_n, k < n, with d_k = n Σ_{i≤k} (n+i−1)! 4^i / ((n−i)! (2i)!).
fn chebyshev_weights(n: usize, prec: u32) -> Vec<Float> {
    let mut partial = Vec::with_capacity(n + 1);
    let mut term = Float::with_val(prec, 1);
    let mut d = Float::with_val(prec, 1);
    partial.push(d.clone());
    for i in 0..n {
        let num = 4 * ((n + i) as u64) * ((n - i) as u64);
        let den = ((2 * i + 1) as u64) * ((2 * i + 2) as u64);
        term *= num;
        term /= den;
        d += &term;
        partial.push(d.clone());
    }
    let total = partial[n].clone();
    partial
        .into_iter()
        .take(n)
        .map(|dk| Float::with_val(prec, 1) - dk / &total)
        .collect()
}
