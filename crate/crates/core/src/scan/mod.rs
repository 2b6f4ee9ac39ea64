//! Scans along the line Re s = (1+ε)/2: the ε-only left side f(ε), the
//! ratio g(t; ε), the margin x(t) = f·⟨ζζ†⟩ − Re²[…], crossings of g with f,
//! the second-stage evaluator and the search for negative Re ζ.
//!
//! All scan quantities use the closed forms, i.e. the untruncated Fock
//! space; an optional truncation only adds a matrix cross-check of f.

mod output;
mod second_stage;
mod witness;

use rayon::prelude::*;
use rug::{Complex, Float};
use serde::Serialize;
use std::cmp::Ordering;

pub use output::{crossing_report_json, scan_csv, CrossingReport, KStudyEntry, CSV_DIGITS};
pub use second_stage::{second_stage_evaluate, SecondStageTerms};
pub use witness::{witness_search, WitnessReport};

use crate::error::{Error, Result};
use crate::fock::{weighted_norm, weighted_pairing, TruncationPolicy};
use crate::precision::PrecisionConfig;
use crate::uncertainty::{direct_quantities, line_amplitudes, EvaluationMode};
use crate::zeta::{eval_zeta, zeta_one_plus_eps, ZetaSeries};

/// ⟨ζζ†⟩ below this counts as degenerate.
pub const DENOMINATOR_FLOOR: f64 = 1e-300;

#[derive(Clone, Debug)]
pub struct ScanConfig {
    pub eps: Float,
    pub t_min: Float,
    pub t_max: Float,
    pub step: Float,
    pub mode: EvaluationMode,
    /// Fock dimension for the matrix cross-check of f; None skips it.
    pub truncation: Option<usize>,
    pub refine_tol: f64,
    /// Every k_stride-th grid point enters the K-convergence study.
    pub k_stride: usize,
}

impl ScanConfig {
    pub fn new(eps: Float, t_min: Float, t_max: Float, step: Float) -> Result<Self> {
        let cfg = Self {
            eps,
            t_min,
            t_max,
            step,
            mode: EvaluationMode::Polynomial,
            truncation: None,
            refine_tol: 1e-6,
            k_stride: 10,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.eps.cmp0() != Some(Ordering::Greater) {
            return Err(Error::InvalidInput("eps must be positive".into()));
        }
        if self.t_min > self.t_max {
            return Err(Error::InvalidInput("t_min must not exceed t_max".into()));
        }
        if self.step.cmp0() != Some(Ordering::Greater) {
            return Err(Error::InvalidInput("step must be positive".into()));
        }
        if self.refine_tol.is_nan() || self.refine_tol <= 0.0 || self.k_stride == 0 {
            return Err(Error::InvalidInput("refine_tol and k_stride must be positive".into()));
        }
        Ok(())
    }

    /// ⌊(t_max − t_min)/step⌋ + 1 points; a relative slack of 1e−9 absorbs
    /// decimal steps that are not binary-exact.
    pub fn grid_len(&self) -> usize {
        let span = Float::with_val(64, &self.t_max - &self.t_min) / &self.step;
        (span.to_f64() * (1.0 + 1e-12) + 1e-9).floor() as usize + 1
    }

    pub fn grid_point(&self, i: usize, prec: u32) -> Float {
        Float::with_val(prec, &self.t_min + Float::with_val(prec, &self.step * i as u64))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanPoint {
    pub t: Float,
    pub g: Float,
    pub x: Float,
    /// Re ζ((1+ε)/2 + it), always from the true ζ.
    pub re_zeta: Float,
    pub satisfied: bool,
    pub error: Option<String>,
}

/// f(ε) = ⟨1+ε|ζζ†|1+ε⟩ − |ζ(1+ε)|².
pub fn f_of_eps(eps: &Float, series: &ZetaSeries, mode: EvaluationMode) -> Result<Float> {
    if eps.cmp0() != Some(Ordering::Greater) {
        return Err(Error::InvalidInput("eps must be positive".into()));
    }
    let p = series.prec();
    let gamma = Complex::with_val(p, (Float::with_val(p, eps + 1u32), 0));
    let shifted = series.taylor_shift(&gamma, p);
    match mode {
        EvaluationMode::Polynomial => Ok(weighted_norm(&shifted, 1, p)),
        EvaluationMode::Analytic => {
            let z = zeta_one_plus_eps(eps, series.precision())?;
            Ok(weighted_norm(&shifted, 0, p) - Float::with_val(p, z.square_ref()))
        }
    }
}

/// Matrix-route f: the direct variance of X₂ at |1+ε⟩ on an N-truncation.
pub fn f_matrix_check(eps: &Float, series: &ZetaSeries, dim: usize) -> Result<Float> {
    let p = series.prec();
    let gamma = Complex::with_val(p, (Float::with_val(p, eps + 1u32), 0));
    let policy = TruncationPolicy::new(dim, 1e-16)?;
    policy.require(&gamma)?;
    direct_quantities(series, &gamma, &Complex::new(p), &policy).map(|q| q.var_x2)
}

/// Pieces of g at one ordinate.
#[derive(Clone, Debug)]
pub struct GTerms {
    pub numerator: Float,
    pub denominator: Float,
}

impl GTerms {
    pub fn g(&self) -> Float {
        Float::with_val(self.numerator.prec(), &self.numerator / &self.denominator)
    }

    /// x = f·⟨ζζ†⟩ − Re²[…]
    pub fn x(&self, f: &Float) -> Float {
        Float::with_val(self.numerator.prec(), f * &self.denominator) - &self.numerator
    }
}

/// Shared per-scan state: the Taylor shift about 1+ε is the same for every t.
pub struct LineEvaluator<'a> {
    series: &'a ZetaSeries,
    eps: Float,
    shift_at_gamma: Vec<Complex>,
}

impl<'a> LineEvaluator<'a> {
    pub fn new(series: &'a ZetaSeries, eps: &Float) -> Self {
        let p = series.prec();
        let gamma = Complex::with_val(p, (Float::with_val(p, eps + 1u32), 0));
        Self {
            series,
            eps: Float::with_val(p, eps),
            shift_at_gamma: series.taylor_shift(&gamma, p),
        }
    }

    /// numerator = Re²[e^{−2i(1+ε)t} Σ_m m! p_m(1+ε) conj p_m(α_t)], the
    /// printed Re²[e^{−i(1+ε)t}⟨1+ε|ζDζ†|α_t⟩] after the displacement
    /// identity; denominator = ⟨α_t|ζζ†|α_t⟩.
    pub fn terms(&self, t: &Float) -> Result<GTerms> {
        let p = self.series.prec();
        let (alpha, _) = line_amplitudes(&self.eps, t, p);
        let shift_alpha = self.series.taylor_shift(&alpha, p);
        let s = weighted_pairing(&self.shift_at_gamma, &shift_alpha, 0, p);
        let angle = Float::with_val(p, &self.eps + 1u32) * t * -2i32;
        let rotated = s * crate::fock::unit_phase(&angle, p);
        let numerator = Float::with_val(p, rotated.real().square_ref());
        let denominator = weighted_norm(&shift_alpha, 0, p);
        if !denominator.is_finite() || !numerator.is_finite() {
            return Err(Error::Overflow(format!("g overflowed at t = {}", t.to_f64())));
        }
        if denominator < DENOMINATOR_FLOOR {
            return Err(Error::Degenerate(format!(
                "<zeta zeta^dagger> = {:e} at t = {}",
                denominator.to_f64(),
                t.to_f64()
            )));
        }
        Ok(GTerms { numerator, denominator })
    }
}

/// One scan point: g, x against the given f, and Re ζ on the line.
pub fn g_of_t(t: &Float, eps: &Float, f: &Float, series: &ZetaSeries) -> Result<ScanPoint> {
    point(&LineEvaluator::new(series, eps), t, f)
}

fn point(line: &LineEvaluator, t: &Float, f: &Float) -> Result<ScanPoint> {
    let terms = line.terms(t)?;
    let x = terms.x(f);
    let re_zeta = re_zeta_on_line(&line.eps, t, line.series.precision())?;
    Ok(ScanPoint {
        t: t.clone(),
        g: terms.g(),
        satisfied: x >= 0,
        x,
        re_zeta,
        error: None,
    })
}

/// Re ζ((1+ε)/2 + it)
pub fn re_zeta_on_line(eps: &Float, t: &Float, cfg: &PrecisionConfig) -> Result<Float> {
    let p = cfg.bits;
    let (s, _) = line_amplitudes(eps, t, p);
    Ok(eval_zeta(&s, cfg)?.real().clone())
}

fn failed_point(t: Float, e: &Error) -> ScanPoint {
    let nan = Float::with_val(t.prec(), rug::float::Special::Nan);
    ScanPoint {
        t,
        g: nan.clone(),
        x: nan.clone(),
        re_zeta: nan,
        satisfied: false,
        error: Some(e.to_string()),
    }
}

/// Grid evaluation, crossing refinement and violation intervals.
///
/// `k_series` holds the extra orders for the convergence study; each is
/// evaluated on every k_stride-th grid point.
pub fn run_scan(
    cfg: &ScanConfig,
    series: &ZetaSeries,
    k_series: &[ZetaSeries],
) -> Result<(Vec<ScanPoint>, CrossingReport)> {
    cfg.validate()?;
    let p = series.prec();
    let f = f_of_eps(&cfg.eps, series, cfg.mode)?;
    let f_matrix = match cfg.truncation {
        Some(dim) => Some(f_matrix_check(&cfg.eps, series, dim)?),
        None => None,
    };
    let line = LineEvaluator::new(series, &cfg.eps);
    let n = cfg.grid_len();
    let points: Vec<ScanPoint> = (0..n)
        .into_par_iter()
        .map(|i| {
            let t = cfg.grid_point(i, p);
            point(&line, &t, &f).unwrap_or_else(|e| failed_point(t, &e))
        })
        .collect();

    let mut crossings = Vec::new();
    for w in points.windows(2) {
        if w[0].error.is_some() || w[1].error.is_some() || w[0].satisfied == w[1].satisfied {
            continue;
        }
        crossings.push(refine_crossing(
            &line,
            &f,
            &w[0].t,
            &w[1].t,
            w[0].satisfied,
            cfg.refine_tol,
        )?);
    }

    let mut intervals = Vec::new();
    let mut open: Option<Float> = None;
    let mut next_crossing = crossings.iter();
    for (i, pt) in points.iter().enumerate() {
        if pt.error.is_some() {
            continue;
        }
        if i > 0 && points[i - 1].error.is_none() && points[i - 1].satisfied != pt.satisfied {
            let c = next_crossing.next().expect("one crossing per sign change").clone();
            if pt.satisfied {
                intervals.push((open.take().expect("interval was open"), c));
            } else {
                open = Some(c);
            }
        } else if !pt.satisfied && open.is_none() {
            open = Some(pt.t.clone());
        }
    }
    if let Some(start) = open {
        let last = points
            .iter()
            .rev()
            .find(|pt| pt.error.is_none())
            .expect("a valid point");
        intervals.push((start, last.t.clone()));
    }

    let witnesses = points
        .iter()
        .filter(|pt| pt.error.is_none() && pt.re_zeta <= 0)
        .map(|pt| pt.t.clone())
        .collect();

    let k_study = k_convergence(cfg, series, k_series)?;
    let errors = points
        .iter()
        .filter_map(|pt| pt.error.as_ref().map(|e| (pt.t.clone(), e.clone())))
        .collect();

    let report = CrossingReport {
        eps: cfg.eps.clone(),
        f,
        f_matrix,
        mode: cfg.mode,
        series_order: series.order(),
        bits: p,
        grid_len: n,
        crossings,
        violation_intervals: intervals,
        witnesses,
        k_study,
        errors,
    };
    Ok((points, report))
}

/// Bisection on the sign of x(t) until the bracket is below `tol`.
fn refine_crossing(
    line: &LineEvaluator,
    f: &Float,
    lo: &Float,
    hi: &Float,
    lo_satisfied: bool,
    tol: f64,
) -> Result<Float> {
    let p = lo.prec();
    let mut lo = lo.clone();
    let mut hi = hi.clone();
    while Float::with_val(p, &hi - &lo).to_f64() > tol {
        let mid = Float::with_val(p, &lo + &hi) / 2u32;
        let satisfied = line.terms(&mid)?.x(f) >= 0;
        if satisfied == lo_satisfied {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Float::with_val(p, &lo + &hi) / 2u32)
}

fn k_convergence(cfg: &ScanConfig, series: &ZetaSeries, k_series: &[ZetaSeries]) -> Result<Vec<KStudyEntry>> {
    if k_series.is_empty() {
        return Ok(Vec::new());
    }
    let p = series.prec();
    let n = cfg.grid_len();
    let idx: Vec<usize> = (0..n).step_by(cfg.k_stride).collect();
    let mut out = Vec::with_capacity(k_series.len());
    for s in k_series {
        let f = f_of_eps(&cfg.eps, s, cfg.mode)?;
        let line = LineEvaluator::new(s, &cfg.eps);
        let g: Vec<Option<Float>> = idx
            .par_iter()
            .map(|&i| line.terms(&cfg.grid_point(i, p)).ok().map(|t| t.g()))
            .collect();
        out.push(KStudyEntry {
            order: s.order(),
            f,
            t: idx.iter().map(|&i| cfg.grid_point(i, p)).collect(),
            g,
        });
    }
    Ok(out)
}

/// max_t |g_b − g_a| / max(|g_b|, floor) between two study entries.
pub fn relative_drift(a: &KStudyEntry, b: &KStudyEntry) -> Option<f64> {
    let mut worst: Option<f64> = None;
    for (x, y) in a.g.iter().zip(&b.g) {
        if let (Some(x), Some(y)) = (x, y) {
            let d = Float::with_val(64, x - y).abs().to_f64();
            let scale = y.to_f64().abs().max(DENOMINATOR_FLOOR);
            worst = Some(worst.unwrap_or(0.0).max(d / scale));
        }
    }
    worst
}

/// Step ratio used by the smoothness check: max |g_{i+1} − g_i| on a grid.
pub fn max_jump(values: &[Float]) -> f64 {
    values
        .windows(2)
        .map(|w| Float::with_val(64, &w[1] - &w[0]).abs().to_f64())
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanSummary {
    pub grid_len: usize,
    pub crossings: usize,
    pub violation_intervals: usize,
    pub witnesses: usize,
}
