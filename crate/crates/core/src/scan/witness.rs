use rayon::prelude::*;
use rug::Float;
use serde::Serialize;
use std::cmp::Ordering;

use super::output::{ser_pairs, ser_real, ser_reals};
use super::re_zeta_on_line;
use crate::error::{Error, Result};
use crate::precision::{format_real_digits, PrecisionConfig};

/// Bisection width for the edges of a negative run.
pub const EDGE_TOL: f64 = 1e-6;

/// Grid ordinates with Re ζ((1+ε)/2 + it) ≤ 0, confirmed at doubled
/// precision, and the refined subintervals on which that sign holds.
#[derive(Clone, Debug, Serialize)]
pub struct WitnessReport {
    #[serde(serialize_with = "ser_real")]
    pub eps: Float,
    #[serde(serialize_with = "ser_reals")]
    pub witnesses: Vec<Float>,
    #[serde(serialize_with = "ser_pairs")]
    pub intervals: Vec<(Float, Float)>,
    /// Flagged at working precision but not at doubled precision.
    #[serde(serialize_with = "ser_reals")]
    pub unconfirmed: Vec<Float>,
    /// Ordinates where ζ could not be evaluated.
    #[serde(serialize_with = "ser_reals")]
    pub skipped: Vec<Float>,
    #[serde(serialize_with = "ser_real")]
    pub min_re_zeta: Float,
    #[serde(serialize_with = "ser_real")]
    pub min_at: Float,
    pub grid_len: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hint: Option<String>,
}

pub fn witness_search(
    eps: &Float,
    t_min: &Float,
    t_max: &Float,
    step: &Float,
    cfg: &PrecisionConfig,
) -> Result<WitnessReport> {
    if eps.cmp0() != Some(Ordering::Greater) {
        return Err(Error::InvalidInput("eps must be positive".into()));
    }
    if t_min > t_max || step.cmp0() != Some(Ordering::Greater) {
        return Err(Error::InvalidInput("need t_min <= t_max and step > 0".into()));
    }
    let p = cfg.bits;
    let span = Float::with_val(64, t_max - t_min) / step;
    let n = (span.to_f64() * (1.0 + 1e-12) + 1e-9).floor() as usize + 1;
    let ts: Vec<Float> = (0..n)
        .map(|i| Float::with_val(p, t_min + Float::with_val(p, step * i as u64)))
        .collect();
    // points where ζ cannot be evaluated (the pole at s = 1) are skipped
    let values: Vec<Option<Float>> = ts.par_iter().map(|t| re_zeta_on_line(eps, t, cfg).ok()).collect();
    let skipped: Vec<Float> = (0..n).filter(|&i| values[i].is_none()).map(|i| ts[i].clone()).collect();

    let mut min_i = 0;
    let mut min_v = Float::with_val(p, rug::float::Special::Infinity);
    for (i, v) in values.iter().enumerate() {
        if let Some(v) = v {
            if *v < min_v {
                min_i = i;
                min_v = v.clone();
            }
        }
    }

    let flagged: Vec<usize> = (0..n)
        .filter(|&i| values[i].as_ref().is_some_and(|v| *v <= 0))
        .collect();
    let doubled = cfg.doubled();
    let confirmed: Vec<bool> = flagged
        .par_iter()
        .map(|&i| re_zeta_on_line(eps, &ts[i], &doubled).is_ok_and(|v| v <= 0))
        .collect();

    let mut witnesses = Vec::new();
    let mut unconfirmed = Vec::new();
    for (&i, &ok) in flagged.iter().zip(&confirmed) {
        if ok {
            witnesses.push(ts[i].clone());
        } else {
            unconfirmed.push(ts[i].clone());
        }
    }

    let mut intervals = Vec::new();
    let mut k = 0;
    while k < flagged.len() {
        let first = flagged[k];
        let mut last = first;
        while k + 1 < flagged.len() && flagged[k + 1] == last + 1 {
            k += 1;
            last = flagged[k];
        }
        k += 1;
        let lo = if first == 0 || values[first - 1].is_none() {
            ts[first].clone()
        } else {
            sign_edge(eps, &ts[first - 1], &ts[first], cfg)?
        };
        let hi = if last + 1 == n || values[last + 1].is_none() {
            ts[last].clone()
        } else {
            sign_edge(eps, &ts[last], &ts[last + 1], cfg)?
        };
        intervals.push((lo, hi));
    }

    let hint = witnesses.is_empty().then(|| {
        format!(
            "no t with Re zeta <= 0 on [{}, {}] along Re s = {}; smallest Re zeta is {} at t = {}; extend the range",
            format_real_digits(t_min, 12),
            format_real_digits(t_max, 12),
            format_real_digits(&Float::with_val(p, Float::with_val(p, eps + 1u32) / 2u32), 12),
            format_real_digits(&min_v, 6),
            format_real_digits(&ts[min_i], 12),
        )
    });

    Ok(WitnessReport {
        eps: Float::with_val(p, eps),
        witnesses,
        intervals,
        unconfirmed,
        skipped,
        min_re_zeta: min_v,
        min_at: ts[min_i].clone(),
        grid_len: n,
        hint,
    })
}

/// Bisects a sign change of Re ζ on the line between `a` and `b`.
fn sign_edge(eps: &Float, a: &Float, b: &Float, cfg: &PrecisionConfig) -> Result<Float> {
    let p = cfg.bits;
    let a_neg = re_zeta_on_line(eps, a, cfg)? <= 0;
    let (mut lo, mut hi) = (a.clone(), b.clone());
    while Float::with_val(p, &hi - &lo).to_f64() > EDGE_TOL {
        let mid = Float::with_val(p, &lo + &hi) / 2u32;
        if (re_zeta_on_line(eps, &mid, cfg)? <= 0) == a_neg {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Float::with_val(p, &lo + &hi) / 2u32)
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 96;

    fn fl(v: f64) -> Float {
        Float::with_val(P, v)
    }

    #[test]
    fn single_point_range() {
        let cfg = PrecisionConfig::with_bits(P).unwrap();
        let r = witness_search(&fl(0.2), &fl(12.0), &fl(12.0), &fl(0.01), &cfg).unwrap();
        assert_eq!(r.grid_len, 1);
        assert_eq!(r.min_at, 12.0);
    }

    #[test]
    fn critical_line_has_negative_real_parts() {
        // ε = 0 is the critical line; Re ζ(1/2 + it) is negative just past t ≈ 14
        let cfg = PrecisionConfig::with_bits(P).unwrap();
        let eps = Float::with_val(P, Float::i_exp(1, -60));
        let r = witness_search(&eps, &fl(13.0), &fl(16.0), &fl(0.05), &cfg).unwrap();
        assert!(!r.witnesses.is_empty());
        assert!(r.hint.is_none());
        for (lo, hi) in &r.intervals {
            assert!(lo <= hi);
            let mid = Float::with_val(P, lo + hi) / 2u32;
            assert!(re_zeta_on_line(&eps, &mid, &cfg).unwrap() <= 0);
        }
    }

    #[test]
    fn empty_result_carries_a_hint() {
        let cfg = PrecisionConfig::with_bits(P).unwrap();
        let r = witness_search(&fl(1.0), &fl(0.0), &fl(5.0), &fl(0.1), &cfg).unwrap();
        assert!(r.witnesses.is_empty());
        assert!(r.hint.as_deref().unwrap().contains("extend"));
        // t = 0 on Re s = 1 is the pole
        assert_eq!(r.skipped, vec![fl(0.0)]);
    }
}
