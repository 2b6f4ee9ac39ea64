//! Critical-line zeros: argument-principle counting on a rectangle and
//! complex Newton refinement seeded by minima of |ζ(1/2+it)|.

use rug::{Complex, Float};
use serde::Serialize;

use super::eval::{eval_zeta, eval_zeta_with_derivative};
use crate::error::{Error, Result};
use crate::precision::PrecisionConfig;

#[derive(Clone, Debug)]
pub struct ZeroLocation {
    pub t: Float,
    /// |ζ(1/2 + it)| at the reported ordinate.
    pub residual: Float,
    pub bracket: (Float, Float),
    /// Zeros counted in the search window.
    pub window_count: i64,
}

/// Axis-aligned rectangle in the s-plane, traversed counterclockwise.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Rectangle {
    pub re_lo: f64,
    pub re_hi: f64,
    pub im_lo: f64,
    pub im_hi: f64,
}

impl Rectangle {
    /// The strip 0 ≤ Re s ≤ 1 between two ordinates.
    pub fn strip(im_lo: f64, im_hi: f64) -> Self {
        Self {
            re_lo: 0.0,
            re_hi: 1.0,
            im_lo,
            im_hi,
        }
    }
}

/// Evaluation settings for the winding count; only the phase matters there.
fn counting_cfg() -> PrecisionConfig {
    PrecisionConfig::new(64, 1e-12, 4096).expect("valid")
}

const MAX_TURN: f64 = 0.5;
const MAX_DEPTH: u32 = 40;

/// Number of zeros minus poles of ζ inside `rect`, from the total change of
/// arg ζ along the boundary.
pub fn argument_count(rect: &Rectangle) -> Result<i64> {
    if !(rect.re_lo < rect.re_hi && rect.im_lo < rect.im_hi) {
        return Err(Error::InvalidInput("degenerate rectangle".into()));
    }
    let cfg = counting_cfg();
    let corners = [
        (rect.re_lo, rect.im_lo),
        (rect.re_hi, rect.im_lo),
        (rect.re_hi, rect.im_hi),
        (rect.re_lo, rect.im_hi),
    ];
    let mut total = 0.0;
    for e in 0..4 {
        let a = corners[e];
        let b = corners[(e + 1) % 4];
        let len = ((b.0 - a.0).powi(2) + (b.1 - a.1).powi(2)).sqrt();
        let pieces = (len / 0.05).ceil().max(1.0) as usize;
        let point = |u: f64| (a.0 + (b.0 - a.0) * u, a.1 + (b.1 - a.1) * u);
        let mut prev_u = 0.0;
        let mut prev = zeta_at(point(0.0), &cfg)?;
        for i in 1..=pieces {
            let u = i as f64 / pieces as f64;
            let next = zeta_at(point(u), &cfg)?;
            total += turn(&point, prev_u, u, &prev, &next, &cfg, 0)?;
            prev = next;
            prev_u = u;
        }
    }
    let winding = total / std::f64::consts::TAU;
    let count = winding.round();
    if (winding - count).abs() > 0.1 {
        return Err(Error::Convergence(format!(
            "argument change {winding} turns is not close to an integer"
        )));
    }
    Ok(count as i64)
}

fn zeta_at((re, im): (f64, f64), cfg: &PrecisionConfig) -> Result<Complex> {
    eval_zeta(&Complex::with_val(cfg.bits, (re, im)), cfg)
}

fn turn(
    point: &dyn Fn(f64) -> (f64, f64),
    u0: f64,
    u1: f64,
    z0: &Complex,
    z1: &Complex,
    cfg: &PrecisionConfig,
    depth: u32,
) -> Result<f64> {
    let ratio = Complex::with_val(cfg.bits, z1 / z0);
    let (im, re) = (ratio.imag().to_f64(), ratio.real().to_f64());
    let delta = im.atan2(re);
    if delta.abs() <= MAX_TURN {
        return Ok(delta);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::Convergence("boundary passes through a zero".into()));
    }
    let um = 0.5 * (u0 + u1);
    let zm = zeta_at(point(um), cfg)?;
    Ok(turn(point, u0, um, z0, &zm, cfg, depth + 1)? + turn(point, um, u1, &zm, z1, cfg, depth + 1)?)
}

/// Critical-line zero nearest `t0` within [t0 − 1, t0 + 1].
///
/// The window's lower edge is kept above Im s = 0.5 so the pole at s = 1
/// never sits on the contour.
pub fn find_zero_near(t0: f64, cfg: &PrecisionConfig) -> Result<ZeroLocation> {
    if !(t0 > 0.0 && t0.is_finite()) {
        return Err(Error::InvalidInput(format!("t0 must be positive, got {t0}")));
    }
    let lo = (t0 - 1.0).max(0.5);
    let hi = t0 + 1.0;
    let count = argument_count(&Rectangle::strip(lo, hi))?;
    if count <= 0 {
        return Err(Error::NoZero { lo, hi });
    }

    let mut step = 0.02;
    for _ in 0..4 {
        let zeros = zeros_on_grid(lo, hi, step, cfg)?;
        if zeros.len() as i64 >= count {
            let best = zeros
                .into_iter()
                .min_by(|a, b| {
                    let da = (a.to_f64() - t0).abs();
                    let db = (b.to_f64() - t0).abs();
                    da.total_cmp(&db)
                })
                .expect("nonempty");
            let half = Complex::with_val(cfg.bits, (0.5, &best));
            let residual = Float::with_val(cfg.bits, eval_zeta(&half, cfg)?.abs().real());
            if residual.to_f64() > cfg.target_abs_err {
                return Err(Error::Convergence(format!(
                    "zero residual {:e} above target",
                    residual.to_f64()
                )));
            }
            let cell = ((best.to_f64() - lo) / step).floor();
            let b_lo = Float::with_val(cfg.bits, lo + cell * step);
            let b_hi = Float::with_val(cfg.bits, lo + (cell + 1.0) * step);
            return Ok(ZeroLocation {
                t: best,
                residual,
                bracket: (b_lo, b_hi),
                window_count: count,
            });
        }
        step /= 4.0;
    }
    Err(Error::Convergence(format!(
        "argument count {count} but fewer zeros located in [{lo}, {hi}]"
    )))
}

fn zeros_on_grid(lo: f64, hi: f64, step: f64, cfg: &PrecisionConfig) -> Result<Vec<Float>> {
    let coarse = counting_cfg();
    let n = ((hi - lo) / step).round() as usize;
    let ts: Vec<f64> = (0..=n).map(|i| lo + i as f64 * step).collect();
    let mags = ts
        .iter()
        .map(|&t| zeta_at((0.5, t), &coarse).map(|z| z.abs().real().to_f64()))
        .collect::<Result<Vec<_>>>()?;
    let mut found: Vec<Float> = Vec::new();
    for i in 0..=n {
        let left = if i == 0 { f64::INFINITY } else { mags[i - 1] };
        let right = if i == n { f64::INFINITY } else { mags[i + 1] };
        if mags[i] <= left && mags[i] <= right {
            if let Some(t) = newton(ts[i], cfg)? {
                if t.to_f64() >= lo && t.to_f64() <= hi && !found.iter().any(|f| (f.to_f64() - t.to_f64()).abs() < 1e-8)
                {
                    found.push(t);
                }
            }
        }
    }
    Ok(found)
}

/// Complex Newton from 1/2 + i·seed; returns the ordinate of the limit.
fn newton(seed: f64, cfg: &PrecisionConfig) -> Result<Option<Float>> {
    let wp = cfg.bits;
    let mut s = Complex::with_val(wp, (0.5, seed));
    let tol = Float::with_val(wp, Float::i_exp(1, -(wp as i32 - 16)));
    for _ in 0..80 {
        let (z, dz) = eval_zeta_with_derivative(&s, cfg)?;
        if dz.is_zero() {
            return Ok(None);
        }
        let delta = Complex::with_val(wp, &z / &dz);
        s -= &delta;
        if (s.real().to_f64() - 0.5).abs() > 0.4 {
            return Ok(None);
        }
        let size = Float::with_val(wp, delta.abs_ref());
        if size
            <= Float::with_val(
                wp,
                &tol * Float::with_val(wp, s.imag().abs_ref()).max(&Float::with_val(wp, 1)),
            )
        {
            let off = Float::with_val(wp, s.real() - 0.5f64);
            if off.clone().abs().to_f64() > 1e-10 {
                return Err(Error::OffCriticalLine {
                    re: crate::precision::format_real(s.real()),
                });
            }
            return Ok(Some(s.imag().clone()));
        }
    }
    Ok(None)
}
