use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::Complex;
use serde::Serialize;

use super::{check_uncertainty, Classification, EvaluationMode, UncertaintyReport};
use crate::error::Result;
use crate::fock::TruncationPolicy;
use crate::precision::PrecisionConfig;
use crate::zeta::ZetaSeries;

/// Random coefficient lists and amplitudes for the matrix-form Heisenberg check.
#[derive(Clone, Debug, Serialize)]
pub struct CampaignConfig {
    pub trials: usize,
    pub seed: u64,
    pub max_order: usize,
    pub max_amplitude: f64,
    pub dim: usize,
    pub bits: u32,
    pub tol: f64,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            trials: 200,
            seed: 2024,
            max_order: 6,
            max_amplitude: 1.0,
            dim: 64,
            bits: 128,
            tol: 1e-9,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CampaignSummary {
    pub trials: usize,
    pub violations: usize,
    pub mismatches: usize,
    pub failures: usize,
    /// min over trials of slack_direct / scale
    pub worst_relative_slack: f64,
    #[serde(skip)]
    pub reports: Vec<UncertaintyReport>,
}

struct Trial {
    coeffs: Vec<(f64, f64)>,
    alpha: (f64, f64),
    beta: (f64, f64),
}

fn in_disk(rng: &mut ChaCha8Rng, radius: f64) -> (f64, f64) {
    let r = radius * rng.gen::<f64>().sqrt();
    let theta = rng.gen::<f64>() * std::f64::consts::TAU;
    (r * theta.cos(), r * theta.sin())
}

pub fn run_campaign(cfg: &CampaignConfig) -> Result<CampaignSummary> {
    let precision = PrecisionConfig::with_bits(cfg.bits)?;
    let policy = TruncationPolicy::new(cfg.dim, 1e-16)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let trials: Vec<Trial> = (0..cfg.trials)
        .map(|_| {
            let order = rng.gen_range(0..=cfg.max_order);
            let coeffs = (0..=order)
                .map(|_| (rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
                .collect();
            let alpha = in_disk(&mut rng, cfg.max_amplitude);
            let beta = in_disk(&mut rng, cfg.max_amplitude);
            Trial { coeffs, alpha, beta }
        })
        .collect();

    let p = cfg.bits;
    let reports: Vec<UncertaintyReport> = trials
        .par_iter()
        .map(|t| -> Result<UncertaintyReport> {
            let series = ZetaSeries::from_coeffs(
                t.coeffs.iter().map(|&c| Complex::with_val(p, c)).collect(),
                precision.clone(),
            )?;
            let alpha = Complex::with_val(p, t.alpha);
            let beta = Complex::with_val(p, t.beta);
            Ok(check_uncertainty(
                &series,
                &alpha,
                &beta,
                &policy,
                EvaluationMode::Polynomial,
                cfg.tol,
            ))
        })
        .collect::<Result<_>>()?;

    let count = |c: Classification| reports.iter().filter(|r| r.classification == c).count();
    let worst = reports
        .iter()
        .filter(|r| r.error.is_none())
        .map(|r| (r.slack_direct.clone() / &r.scale).to_f64())
        .fold(f64::INFINITY, f64::min);
    Ok(CampaignSummary {
        trials: cfg.trials,
        violations: count(Classification::InequalityViolationDirect),
        mismatches: count(Classification::PaperFormMismatch),
        failures: count(Classification::NumericFailure),
        worst_relative_slack: worst,
        reports,
    })
}
