//! Power series of ζ about s = 0, ζ(s) = Σ C_k s^k, and polynomial helpers
//! for its degree-K truncation P_K.

use rug::float::Constant;
use rug::{Assign, Complex, Float};
use sha2::{Digest, Sha256};

use super::eval::eval_zeta;
use crate::error::{Error, Result};
use crate::precision::{format_real, PrecisionConfig};

/// Where the coefficients came from.
#[derive(Clone, Debug, PartialEq)]
pub struct Contour {
    pub radius: f64,
    pub samples: usize,
}

/// Coefficients C_0..C_K of a polynomial in the annihilation operator.
///
/// Extracted ζ series carry their contour metadata; hand-built series
/// (constants, the linear series, random campaign series) do not.
#[derive(Clone, Debug)]
pub struct ZetaSeries {
    coeffs: Vec<Complex>,
    contour: Option<Contour>,
    precision: PrecisionConfig,
}

impl ZetaSeries {
    pub fn from_coeffs(coeffs: Vec<Complex>, precision: PrecisionConfig) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("a series needs at least C_0".into()));
        }
        let coeffs = coeffs
            .into_iter()
            .map(|c| Complex::with_val(precision.bits, c))
            .collect();
        Ok(Self {
            coeffs,
            contour: None,
            precision,
        })
    }

    pub(crate) fn with_contour(coeffs: Vec<Complex>, contour: Contour, precision: PrecisionConfig) -> Self {
        Self {
            coeffs,
            contour: Some(contour),
            precision,
        }
    }

    /// The constant operator c·I.
    pub fn constant(c: Complex, precision: PrecisionConfig) -> Self {
        Self::from_coeffs(vec![c], precision).expect("one coefficient")
    }

    /// ζ → a, the quadrature case.
    pub fn linear(precision: PrecisionConfig) -> Self {
        let p = precision.bits;
        Self::from_coeffs(vec![Complex::new(p), Complex::with_val(p, 1)], precision).expect("two coefficients")
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn contour(&self) -> Option<&Contour> {
        self.contour.as_ref()
    }

    pub fn precision(&self) -> &PrecisionConfig {
        &self.precision
    }

    pub fn prec(&self) -> u32 {
        self.precision.bits
    }

    /// The same coefficients cut down to degree `order`.
    pub fn truncated(&self, order: usize) -> Self {
        let mut out = self.clone();
        out.coeffs.truncate(order + 1);
        out
    }

    /// P_K(s) by Horner's rule.
    pub fn eval(&self, s: &Complex, prec: u32) -> Complex {
        let mut acc = Complex::new(prec);
        for c in self.coeffs.iter().rev() {
            acc *= s;
            acc += c;
        }
        acc
    }

    /// Taylor coefficients of P_K about `a`: p_m = P_K^{(m)}(a)/m!, m = 0..=K.
    pub fn taylor_shift(&self, a: &Complex, prec: u32) -> Vec<Complex> {
        let mut c: Vec<Complex> = self.coeffs.iter().map(|x| Complex::with_val(prec, x)).collect();
        let k = c.len() - 1;
        let mut scratch = Complex::new(prec);
        for i in 0..k {
            for j in (i..k).rev() {
                scratch.assign(a * &c[j + 1]);
                c[j] += &scratch;
            }
        }
        c
    }

    /// SHA-256 over the key and every coefficient in exact decimal form.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!("order={};bits={};", self.order(), self.prec()));
        if let Some(c) = &self.contour {
            h.update(format!("radius={};samples={};", c.radius, c.samples));
        }
        for c in &self.coeffs {
            h.update(format_real(c.real()));
            h.update(",");
            h.update(format_real(c.imag()));
            h.update(";");
        }
        hex_digest(h)
    }
}

pub(crate) fn hex_digest(h: Sha256) -> String {
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Default sample count for a series of order K: max(512, 8(K+1)).
pub fn default_samples(order: usize) -> usize {
    512.max(8 * (order + 1))
}

pub const DEFAULT_RADIUS: f64 = 0.5;

/// C_k ≈ (1/M) Σ_j ζ(r e^{iθ_j}) (r e^{iθ_j})^{-k}, θ_j = 2πj/M.
///
/// ζ(s̄) = conj ζ(s) halves the evaluations. The result is checked by
/// reconstructing ζ at points inside the contour; the allowance there is
/// 10·target plus the series tail beyond degree K.
pub fn taylor_coeffs(order: usize, radius: f64, samples: usize, cfg: &PrecisionConfig) -> Result<ZetaSeries> {
    if !(radius > 0.0 && radius < 1.0) {
        return Err(Error::InvalidInput(format!(
            "contour radius must lie in (0, 1), got {radius}"
        )));
    }
    if samples < 4 * (order + 1) {
        return Err(Error::InvalidInput(format!(
            "need at least 4(K+1) = {} samples, got {samples}",
            4 * (order + 1)
        )));
    }
    let prec = cfg.bits;
    let wp = prec + 32;
    let two_pi = Float::with_val(wp, Constant::Pi) * 2u32;
    let roots: Vec<Complex> = (0..samples)
        .map(|j| {
            let theta = Float::with_val(wp, &two_pi * j as u32) / samples as u32;
            let (sin, cos) = theta.sin_cos(Float::new(wp));
            Complex::with_val(wp, (cos, sin))
        })
        .collect();
    let r = Float::with_val(wp, radius);

    let mut values: Vec<Complex> = vec![Complex::new(wp); samples];
    for j in 0..=samples / 2 {
        let s = Complex::with_val(wp, &roots[j] * &r);
        let z = Complex::with_val(wp, eval_zeta(&Complex::with_val(prec, &s), cfg)?);
        if j != 0 && j != samples - j {
            values[samples - j] = z.clone().conj();
        }
        values[j] = z;
    }

    let mut coeffs = Vec::with_capacity(order + 1);
    let mut r_pow = Float::with_val(wp, 1);
    for k in 0..=order {
        let mut acc = Complex::new(wp);
        for (j, v) in values.iter().enumerate() {
            // e^{-ikθ_j} = conj(ω^{jk mod M})
            let root = roots[(j * k) % samples].clone().conj();
            acc += v * &root;
        }
        acc /= samples as u32;
        acc /= &r_pow;
        coeffs.push(Complex::with_val(prec, acc));
        r_pow *= &r;
    }

    let target = cfg.target_abs_err;
    for (k, c) in coeffs.iter().enumerate() {
        let allowed = 10.0 * target * radius.powi(-(k as i32));
        if c.imag().to_f64().abs() > allowed.max(target) {
            return Err(Error::Convergence(format!(
                "C_{k} has imaginary part {:e} above tolerance",
                c.imag().to_f64()
            )));
        }
    }

    let series = ZetaSeries::with_contour(coeffs, Contour { radius, samples }, cfg.clone());
    reconstruction_check(&series, cfg)?;
    Ok(series)
}

/// Allowed |P_K(s) − ζ(s)| at |s| = rho: 10·target + 2 rho^{K+1}/(1 − rho).
pub fn reconstruction_allowance(order: usize, rho: f64, target: f64) -> f64 {
    10.0 * target + 2.0 * rho.powi(order as i32 + 1) / (1.0 - rho)
}

fn reconstruction_check(series: &ZetaSeries, cfg: &PrecisionConfig) -> Result<()> {
    let radius = series.contour().map(|c| c.radius).unwrap_or(DEFAULT_RADIUS);
    let rho = 0.8 * radius;
    let probes = [(0.0, 0.0), (rho, 0.0), (-rho, 0.0), (0.0, rho), (rho * 0.5, -rho * 0.8)];
    for (re, im) in probes {
        let s = Complex::with_val(cfg.bits, (re, im));
        let exact = eval_zeta(&s, cfg)?;
        let approx = series.eval(&s, cfg.bits);
        let diff = Complex::with_val(cfg.bits, &approx - &exact).abs().real().to_f64();
        let modulus = (re * re + im * im).sqrt();
        let allowed = reconstruction_allowance(series.order(), modulus, cfg.target_abs_err);
        if diff > allowed {
            return Err(Error::Convergence(format!(
                "series reconstruction off by {diff:e} at s = {re}+{im}i (allowed {allowed:e})"
            )));
        }
    }
    Ok(())
}
