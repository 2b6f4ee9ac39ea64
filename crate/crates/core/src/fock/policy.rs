use rug::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fock-space cutoff N together with the Poisson tail every coherent
/// amplitude must respect at that cutoff.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    pub dim: usize,
    pub tail_tol: f64,
}

pub const DEFAULT_DIM: usize = 128;
pub const DEFAULT_TAIL_TOL: f64 = 1e-16;

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            dim: DEFAULT_DIM,
            tail_tol: DEFAULT_TAIL_TOL,
        }
    }
}

impl TruncationPolicy {
    pub fn new(dim: usize, tail_tol: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidInput(format!("truncation needs N >= 2, got {dim}")));
        }
        if !(tail_tol > 0.0 && tail_tol < 1.0) {
            return Err(Error::InvalidInput(format!(
                "tail_tol must lie in (0, 1), got {tail_tol}"
            )));
        }
        Ok(Self { dim, tail_tol })
    }

    pub fn admits(&self, alpha: &Complex) -> bool {
        poisson_tail(norm_sqr(alpha), self.dim) <= self.tail_tol
    }

    pub fn require(&self, alpha: &Complex) -> Result<()> {
        if self.admits(alpha) {
            Ok(())
        } else {
            Err(Error::Truncation(format!(
                "N = {} leaves a Poisson tail {:e} > {:e} for |alpha|^2 = {}",
                self.dim,
                poisson_tail(norm_sqr(alpha), self.dim),
                self.tail_tol,
                norm_sqr(alpha)
            )))
        }
    }

    /// Policy with N raised so that every amplitude is admitted and a
    /// polynomial of the given degree in a, a† applied to any of those
    /// states stays accurate on the truncation.
    ///
    /// Two rules, the larger wins: N ≥ ⌈|α|² + 10|α| + 30⌉ + 2·degree, and
    /// the coherent amplitude at N times the growth √(N!/(N−K)!) that a^K
    /// applies to the top components stays below tail_tol.
    pub fn raised_for(&self, amplitudes: &[&Complex], degree: usize) -> Self {
        let mut dim = self.dim;
        for a in amplitudes {
            let r2 = norm_sqr(a);
            let need = (r2 + 10.0 * r2.sqrt() + 30.0).ceil() as usize + 2 * degree;
            dim = dim.max(need);
        }
        let mut out = Self { dim, ..*self };
        while amplitudes
            .iter()
            .any(|a| !out.admits(a) || amplified_tail(norm_sqr(a), out.dim, degree) > out.tail_tol.ln())
        {
            out.dim += 8;
        }
        out
    }
}

/// ln of |⟨N|α⟩| · √(N!/(N−K)!), the size of the truncation edge after K lowerings.
fn amplified_tail(x: f64, n: usize, degree: usize) -> f64 {
    if x == 0.0 {
        return f64::NEG_INFINITY;
    }
    let log_fact: f64 = (2..=n).map(|k| (k as f64).ln()).sum();
    let amplitude = 0.5 * (-x + n as f64 * x.ln() - log_fact);
    let growth: f64 = 0.5
        * ((n.saturating_sub(degree) + 1)..=n)
            .map(|k| (k as f64).ln())
            .sum::<f64>();
    amplitude + growth
}

fn norm_sqr(z: &Complex) -> f64 {
    let (re, im) = (z.real().to_f64(), z.imag().to_f64());
    re * re + im * im
}

/// Σ_{n ≥ N} e^{-x} x^n / n!, summed in log space.
pub fn poisson_tail(x: f64, n: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    if x == 0.0 {
        return 0.0;
    }
    let log_fact: f64 = (2..=n).map(|k| (k as f64).ln()).sum();
    let mut log_term = -x + n as f64 * x.ln() - log_fact;
    let mut total = 0.0;
    let mut k = n;
    loop {
        let term = log_term.exp();
        total += term;
        k += 1;
        log_term += x.ln() - (k as f64).ln();
        // terms decrease once k > x; stop when the remainder is negligible
        if k as f64 > x && (term < total * 1e-18 || term == 0.0) {
            break;
        }
        if k > n + 100_000 {
            break;
        }
    }
    total.min(1.0)
}
