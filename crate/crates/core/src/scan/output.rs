use std::fmt::Write as _;

use rug::Float;
use serde::{Serialize, Serializer};

use super::{relative_drift, ScanPoint};
use crate::error::Result;
use crate::precision::{format_real, format_real_digits};
use crate::uncertainty::EvaluationMode;

/// Significant digits in CSV cells.
pub const CSV_DIGITS: usize = 20;

pub(crate) fn ser_real<S: Serializer>(x: &Float, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_real(x))
}

pub(crate) fn ser_reals<S: Serializer>(xs: &[Float], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(format_real))
}

pub(crate) fn ser_pairs<S: Serializer>(xs: &[(Float, Float)], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|(a, b)| [format_real(a), format_real(b)]))
}

fn ser_opt_reals<S: Serializer>(xs: &[Option<Float>], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|x| x.as_ref().map(format_real)))
}

fn ser_opt_real<S: Serializer>(x: &Option<Float>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(x) => s.serialize_some(&format_real(x)),
        None => s.serialize_none(),
    }
}

fn ser_errors<S: Serializer>(xs: &[(Float, String)], s: S) -> std::result::Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Entry<'a> {
        t: String,
        error: &'a str,
    }
    s.collect_seq(xs.iter().map(|(t, e)| Entry {
        t: format_real(t),
        error: e,
    }))
}

/// g sampled on a sub-grid for one series order.
#[derive(Clone, Debug, Serialize)]
pub struct KStudyEntry {
    pub order: usize,
    #[serde(serialize_with = "ser_real")]
    pub f: Float,
    #[serde(serialize_with = "ser_reals")]
    pub t: Vec<Float>,
    /// None where the point failed.
    #[serde(serialize_with = "ser_opt_reals")]
    pub g: Vec<Option<Float>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossingReport {
    #[serde(serialize_with = "ser_real")]
    pub eps: Float,
    #[serde(serialize_with = "ser_real")]
    pub f: Float,
    /// f from an N-truncated matrix route, when requested.
    #[serde(serialize_with = "ser_opt_real", skip_serializing_if = "Option::is_none")]
    pub f_matrix: Option<Float>,
    pub mode: EvaluationMode,
    pub series_order: usize,
    pub bits: u32,
    pub grid_len: usize,
    #[serde(serialize_with = "ser_reals")]
    pub crossings: Vec<Float>,
    #[serde(serialize_with = "ser_pairs")]
    pub violation_intervals: Vec<(Float, Float)>,
    #[serde(serialize_with = "ser_reals")]
    pub witnesses: Vec<Float>,
    pub k_study: Vec<KStudyEntry>,
    #[serde(serialize_with = "ser_errors")]
    pub errors: Vec<(Float, String)>,
}

impl CrossingReport {
    /// Largest relative change of g between the lowest and highest order
    /// in the study.
    pub fn k_drift(&self) -> Option<(usize, usize, f64)> {
        let first = self.k_study.iter().min_by_key(|e| e.order)?;
        let last = self.k_study.iter().max_by_key(|e| e.order)?;
        if first.order == last.order {
            return None;
        }
        relative_drift(first, last).map(|d| (first.order, last.order, d))
    }
}

/// The report as pretty JSON, with the caller's config echo and optional
/// witness block merged in.
pub fn crossing_report_json(
    report: &CrossingReport,
    config_echo: serde_json::Value,
    witness: Option<&super::WitnessReport>,
) -> Result<String> {
    let mut v = serde_json::to_value(report)?;
    let obj = v.as_object_mut().expect("report serializes to an object");
    obj.insert("config_echo".into(), config_echo);
    if let Some((from, to, drift)) = report.k_drift() {
        obj.insert(
            "k_drift".into(),
            serde_json::json!({ "from_order": from, "to_order": to, "max_relative_drift": drift }),
        );
    }
    if let Some(w) = witness {
        obj.insert("witness_search".into(), serde_json::to_value(w)?);
    }
    let mut text = serde_json::to_string_pretty(&v)?;
    text.push('\n');
    Ok(text)
}

/// `t,g,x,re_zeta,satisfied`, plus a trailing `f` column when given.
pub fn scan_csv(points: &[ScanPoint], f_line: Option<&Float>) -> String {
    let mut out = String::with_capacity(points.len() * 96);
    out.push_str("t,g,x,re_zeta,satisfied");
    if f_line.is_some() {
        out.push_str(",f");
    }
    out.push('\n');
    let f_text = f_line.map(|f| format_real_digits(f, CSV_DIGITS));
    for pt in points {
        let _ = write!(
            out,
            "{},{},{},{},{}",
            format_real_digits(&pt.t, 17),
            format_real_digits(&pt.g, CSV_DIGITS),
            format_real_digits(&pt.x, CSV_DIGITS),
            format_real_digits(&pt.re_zeta, CSV_DIGITS),
            pt.satisfied
        );
        if let Some(f) = &f_text {
            out.push(',');
            out.push_str(f);
        }
        out.push('\n');
    }
    out
}
