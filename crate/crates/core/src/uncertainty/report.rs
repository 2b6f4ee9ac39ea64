use std::fmt;
use std::str::FromStr;

use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::precision::{format_complex, format_real, parse_complex, parse_real};

/// How the scalar ζ(·) values in the closed forms are obtained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvaluationMode {
    /// The degree-K polynomial P_K(·) everywhere.
    #[default]
    Polynomial,
    /// ζ(·) itself for the scalars; operators stay K-truncated.
    Analytic,
}

impl fmt::Display for EvaluationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EvaluationMode::Polynomial => "polynomial",
            EvaluationMode::Analytic => "analytic",
        })
    }
}

impl FromStr for EvaluationMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "polynomial" => Ok(Self::Polynomial),
            "analytic" => Ok(Self::Analytic),
            other => Err(Error::InvalidInput(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Consistent,
    PaperFormMismatch,
    InequalityViolationDirect,
    /// A quantity could not be computed; see the error field.
    NumericFailure,
}

/// Both sides of the uncertainty relation for X₁(β), X₂ in |α⟩.
#[derive(Clone, Debug, PartialEq)]
pub struct UncertaintyReport {
    pub var_x1: Float,
    pub var_x2: Float,
    pub lhs_product: Float,
    pub rhs_paper: Float,
    pub rhs_direct: Float,
    /// Re²[Σ_{m≥1} m! p_m(α+β) conj p_m(α)], the commutator term in closed form.
    pub rhs_closed: Float,
    pub var_x1_direct: Float,
    pub var_x2_direct: Float,
    pub slack_direct: Float,
    pub slack_paper: Float,
    pub scale: Float,
    pub tol: f64,
    pub classification: Classification,
    pub mode: EvaluationMode,
    pub alpha: Complex,
    pub beta: Complex,
    pub truncation: usize,
    pub series_order: usize,
    pub bits: u32,
    pub error: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Record {
    var_x1: String,
    var_x2: String,
    lhs_product: String,
    rhs_paper: String,
    rhs_direct: String,
    rhs_closed: String,
    var_x1_direct: String,
    var_x2_direct: String,
    slack_direct: String,
    slack_paper: String,
    scale: String,
    tol: f64,
    classification: Classification,
    mode: EvaluationMode,
    alpha: String,
    beta: String,
    truncation: usize,
    series_order: usize,
    bits: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

impl UncertaintyReport {
    pub fn to_json(&self) -> Result<String> {
        let r = Record {
            var_x1: format_real(&self.var_x1),
            var_x2: format_real(&self.var_x2),
            lhs_product: format_real(&self.lhs_product),
            rhs_paper: format_real(&self.rhs_paper),
            rhs_direct: format_real(&self.rhs_direct),
            rhs_closed: format_real(&self.rhs_closed),
            var_x1_direct: format_real(&self.var_x1_direct),
            var_x2_direct: format_real(&self.var_x2_direct),
            slack_direct: format_real(&self.slack_direct),
            slack_paper: format_real(&self.slack_paper),
            scale: format_real(&self.scale),
            tol: self.tol,
            classification: self.classification,
            mode: self.mode,
            alpha: format_complex(&self.alpha),
            beta: format_complex(&self.beta),
            truncation: self.truncation,
            series_order: self.series_order,
            bits: self.bits,
            error: self.error.clone(),
        };
        Ok(serde_json::to_string_pretty(&r)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: Record = serde_json::from_str(text)?;
        let b = r.bits;
        let f = |s: &str| parse_real(s, b);
        Ok(Self {
            var_x1: f(&r.var_x1)?,
            var_x2: f(&r.var_x2)?,
            lhs_product: f(&r.lhs_product)?,
            rhs_paper: f(&r.rhs_paper)?,
            rhs_direct: f(&r.rhs_direct)?,
            rhs_closed: f(&r.rhs_closed)?,
            var_x1_direct: f(&r.var_x1_direct)?,
            var_x2_direct: f(&r.var_x2_direct)?,
            slack_direct: f(&r.slack_direct)?,
            slack_paper: f(&r.slack_paper)?,
            scale: f(&r.scale)?,
            tol: r.tol,
            classification: r.classification,
            mode: r.mode,
            alpha: parse_complex(&r.alpha, b)?,
            beta: parse_complex(&r.beta, b)?,
            truncation: r.truncation,
            series_order: r.series_order,
            bits: b,
            error: r.error,
        })
    }
}
