use rayon::prelude::*;
use rug::{Complex, Float};

use super::operator::{annihilation_matrix, FockOperator};
use crate::error::{Error, Result};

/// ⟨m|D(β)|n⟩ from the associated-Laguerre closed form.
///
/// For k = m − n ≥ 0 the scaled values
///   r_n = √(n!/(n+k)!) |β|^k e^{−|β|²/2} L_n^{(k)}(|β|²)
/// satisfy a three-term recurrence in n that never leaves [−1, 1]; the entry
/// is e^{ik·arg β} r_n below the diagonal and (−e^{−i·arg β})^k r_n above it.
pub fn displacement_matrix(beta: &Complex, dim: usize, prec: u32) -> Result<FockOperator> {
    if dim < 2 {
        return Err(Error::InvalidInput(format!(
            "displacement matrix needs N >= 2, got {dim}"
        )));
    }
    let label = format!("D(beta)[N={dim}]");
    if beta.is_zero() {
        let mut id = FockOperator::identity(dim, prec);
        id.label = label;
        return Ok(id);
    }
    let x = Float::with_val(prec, beta.norm_ref());
    let xf = x.to_f64();
    // cancellation in the recurrence grows roughly like e^{x/2}
    let wp = prec + 64 + (xf * std::f64::consts::LOG2_E / 2.0).ceil() as u32;
    let x = Float::with_val(wp, beta.norm_ref());
    let modulus = Float::with_val(wp, x.sqrt_ref());
    let phase = Complex::with_val(wp, beta / &modulus);
    let neg_conj = Complex::with_val(wp, -phase.clone().conj());

    let bands: Vec<Result<Vec<Float>>> = (0..dim)
        .into_par_iter()
        .map(|k| laguerre_band(k, dim - k, &x, &modulus, wp))
        .collect();

    let mut out = FockOperator::zeros(dim, prec, label);
    let mut lower = Complex::with_val(wp, 1);
    let mut upper = Complex::with_val(wp, 1);
    for (k, band) in bands.into_iter().enumerate() {
        let band = band?;
        for (n, r) in band.iter().enumerate() {
            out.set(n + k, n, Complex::with_val(prec, &lower * r));
            if k > 0 {
                out.set(n, n + k, Complex::with_val(prec, &upper * r));
            }
        }
        lower *= &phase;
        upper *= &neg_conj;
    }
    Ok(out)
}

/// r_0..r_{len−1} for offset k.
fn laguerre_band(k: usize, len: usize, x: &Float, modulus: &Float, wp: u32) -> Result<Vec<Float>> {
    let mut out = Vec::with_capacity(len);
    // r_0 = |β|^k e^{−x/2} / √(k!)
    let log_r0 = Float::with_val(wp, modulus.ln_ref()) * k as u32
        - Float::with_val(wp, x / 2u32)
        - Float::with_val(wp, Float::with_val(wp, k + 1).ln_gamma()) / 2u32;
    let r0 = log_r0.exp();
    out.push(r0.clone());
    if len == 1 {
        return Ok(out);
    }
    let kf = k as u32;
    let mut r1 = Float::with_val(wp, kf + 1) - x;
    r1 *= &r0;
    r1 /= Float::with_val(wp, kf + 1).sqrt();
    out.push(r1);
    for n in 1..len - 1 {
        let n32 = n as u64;
        let k64 = k as u64;
        let c1 = Float::with_val(wp, 2 * n32 + 1 + k64) - x;
        let s1 = Float::with_val(wp, Float::with_val(wp, n32 + 1) / (n32 + k64 + 1)).sqrt();
        let s2 = Float::with_val(
            wp,
            Float::with_val(wp, n32 * (n32 + 1)) / Float::with_val(wp, (n32 + k64) * (n32 + k64 + 1)),
        )
        .sqrt();
        let mut next = Float::with_val(wp, &c1 * &s1) * &out[n];
        next -= Float::with_val(wp, &s2 * (n32 + k64)) * &out[n - 1];
        next /= n32 + 1;
        if next.clone().abs() > 1.0 + 1e-6 {
            return Err(Error::Overflow(format!(
                "displacement recurrence lost precision at n = {}, k = {k}",
                n + 1
            )));
        }
        out.push(next);
    }
    Ok(out)
}

/// exp(βA† − β̄A) on the truncation by scaling and squaring a Taylor series.
///
/// The exponential of the truncated generator only agrees with the true
/// displacement away from the bottom-right corner.
pub fn displacement_expm_oracle(beta: &Complex, dim: usize, prec: u32) -> Result<FockOperator> {
    let wp = prec + 32;
    let a = annihilation_matrix(dim, wp)?;
    let ad = a.adjoint();
    let gen = ad
        .scale(&Complex::with_val(wp, beta))
        .sub(&a.scale(&Complex::with_val(wp, beta.clone().conj())))?;
    let bound = 2.0 * Complex::with_val(64, beta.abs_ref()).real().to_f64() * (dim as f64).sqrt();
    let squarings = if bound > 0.5 {
        (bound / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = gen.scale(&Complex::with_val(
        wp,
        (Float::with_val(wp, Float::i_exp(1, -(squarings as i32))), 0),
    ));

    let mut sum = FockOperator::identity(dim, wp);
    let mut term = FockOperator::identity(dim, wp);
    let eps = 2f64.powi(-(wp as i32));
    let mut converged = false;
    for j in 1..=4 * wp as usize {
        term = term
            .matmul(&scaled)?
            .scale(&Complex::with_val(wp, (Float::with_val(wp, j).recip(), 0)));
        sum = sum.add(&term)?;
        if max_abs(&term) < eps {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Convergence("matrix exponential series did not converge".into()));
    }
    for _ in 0..squarings {
        sum = sum.matmul(&sum)?;
    }
    Ok(FockOperator::from_fn(
        dim,
        prec,
        format!("expm(D(beta))[N={dim}]"),
        |i, j| sum.get(i, j).clone(),
    ))
}

fn max_abs(m: &FockOperator) -> f64 {
    let n = m.dim();
    let mut worst = 0f64;
    for i in 0..n {
        for c in m.row(i) {
            worst = worst.max(Complex::with_val(64, c.abs_ref()).real().to_f64());
        }
    }
    worst
}

/// Number of leading columns of a truncated unitary whose captured norm is
/// within `deficit` of 1. Off-diagonal entries of DᴴD − I on that block are
/// bounded by the same deficit, so it is the region where the truncation
/// can be trusted.
pub fn trusted_block(d: &FockOperator, deficit: f64) -> usize {
    let n = d.dim();
    let prec = d.prec();
    for j in 0..n {
        let mut col = Float::new(prec);
        for i in 0..n {
            col += Float::with_val(prec, d.get(i, j).norm_ref());
        }
        if (1.0 - col.to_f64()).abs() > deficit {
            return j;
        }
    }
    n
}
