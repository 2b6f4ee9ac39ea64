use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, ValueEnum};
use riemann_core::fock::TruncationPolicy;
use riemann_core::precision::{
    format_real, format_real_digits, parse_complex, parse_real, EVALUATION_BITS, EXTRACTION_BITS,
};
use riemann_core::scan::{crossing_report_json, run_scan, scan_csv, witness_search, ScanConfig};
use riemann_core::uncertainty::{
    check_uncertainty, line_amplitudes, run_campaign, CampaignConfig, Classification, EvaluationMode,
};
use riemann_core::zeta::{
    argument_count, default_samples, eval_zeta, eval_zeta_with_derivative, find_zero_near, write_atomic, CacheStatus,
    CoefficientCache, Rectangle, ZetaSeries, DEFAULT_RADIUS,
};
use riemann_core::{Error, PrecisionConfig, Result};
use rug::Complex;
use serde::{Deserialize, Serialize};

use crate::manifest::RunManifest;
use crate::{exit, Cli, Command, GlobalArgs};

pub const PREC_ENV: &str = "RIEMANN_PREC_BITS";

// stdout may be a closed pipe (`| head`); losing output there is not an error
macro_rules! outln {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout().lock(), $($arg)*);
    }};
}

macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = write!(std::io::stdout().lock(), $($arg)*);
    }};
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ZetaArgs {
    /// Point of evaluation, `a`, `bi`, `a+bi` or `a-bi`.
    #[arg(long, allow_hyphen_values = true)]
    pub s: String,
    /// Also print ζ'(s).
    #[arg(long)]
    pub derivative: bool,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct CoeffsArgs {
    #[arg(long, default_value_t = 60)]
    pub order: usize,
    /// Contour radius about s = 0; must lie in (0, 1).
    #[arg(long, default_value_t = DEFAULT_RADIUS)]
    pub radius: f64,
    /// Contour samples (default max(512, 8(K+1))).
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKind {
    /// Taylor coefficients of ζ about 0, truncated at --order.
    Zeta,
    /// ζ = a
    Linear,
    /// ζ = c·1, with c from --constant
    Constant,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeArg {
    Polynomial,
    Analytic,
}

impl From<ModeArg> for EvaluationMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Polynomial => EvaluationMode::Polynomial,
            ModeArg::Analytic => EvaluationMode::Analytic,
        }
    }
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct SeriesArgs {
    #[arg(long, value_enum, default_value_t = SeriesKind::Zeta)]
    pub series: SeriesKind,
    #[arg(long, default_value_t = 60)]
    pub order: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub constant: Option<String>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub series: SeriesArgs,
    #[arg(long, allow_hyphen_values = true, requires = "beta", conflicts_with_all = ["eps", "t"])]
    pub alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true, requires = "alpha")]
    pub beta: Option<String>,
    /// Line parameterization: α = (1+ε)/2 + it, β = (1+ε)/2 − it.
    #[arg(long, allow_hyphen_values = true, requires = "t")]
    pub eps: Option<String>,
    #[arg(long, allow_hyphen_values = true, requires = "eps")]
    pub t: Option<String>,
    #[arg(long, value_enum, default_value_t = ModeArg::Polynomial)]
    pub mode: ModeArg,
    /// Starting Fock dimension; raised automatically for large amplitudes.
    #[arg(long, default_value_t = 128)]
    pub dim: usize,
    #[arg(long, default_value_t = 1e-16)]
    pub tail_tol: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct CampaignArgs {
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
    #[arg(long, default_value_t = 6)]
    pub max_order: usize,
    #[arg(long, default_value_t = 1.0)]
    pub max_amplitude: f64,
    #[arg(long, default_value_t = 64)]
    pub dim: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ScanArgs {
    #[arg(long, default_value = "0.2", allow_hyphen_values = true)]
    pub eps: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub t_min: String,
    #[arg(long, default_value = "30", allow_hyphen_values = true)]
    pub t_max: String,
    #[arg(long, default_value = "0.01")]
    pub step: String,
    #[arg(long, default_value_t = 60)]
    pub order: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Polynomial)]
    pub mode: ModeArg,
    /// Fock dimension for a matrix cross-check of f.
    #[arg(long)]
    pub truncation: Option<usize>,
    /// Emit the K-convergence study.
    #[arg(long)]
    pub k_study: bool,
    #[arg(long, value_delimiter = ',', default_value = "40,60,80")]
    pub k_orders: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    pub k_stride: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub refine_tol: f64,
    /// Skip the negative-Re ζ witness search.
    #[arg(long)]
    pub no_witness: bool,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ZeroFindArgs {
    #[arg(long, default_value_t = 14.0)]
    pub t0: f64,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    /// Write the replayed outputs here instead of the recorded directory.
    #[arg(long)]
    pub into: Option<PathBuf>,
}

/// What a command hands back for the manifest.
struct Outcome {
    code: u8,
    precision: PrecisionConfig,
    fingerprint: Option<String>,
    outputs: Vec<String>,
}

fn precision(global: &GlobalArgs, default_bits: u32) -> Result<PrecisionConfig> {
    let bits = match global.prec {
        Some(b) => b,
        None => match std::env::var(PREC_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("{PREC_ENV}={v:?} is not a bit count")))?,
            Err(_) => default_bits,
        },
    };
    if bits < riemann_core::precision::MIN_BITS {
        return Err(Error::InvalidInput(format!(
            "precision {bits} bits is below the minimum of {}",
            riemann_core::precision::MIN_BITS
        )));
    }
    PrecisionConfig::with_bits(bits)
}

/// Decimal digits covered by the error target 2^−(bits−32).
fn shown_digits(cfg: &PrecisionConfig) -> usize {
    (((cfg.bits.saturating_sub(32)) as f64 * std::f64::consts::LOG10_2).floor() as usize).max(6)
}

/// Imaginary parts below `floor` are treated as rounding noise and dropped.
fn show_complex_above(z: &Complex, digits: usize, floor: f64) -> String {
    if z.imag().clone().abs() < floor {
        return format_real_digits(z.real(), digits);
    }
    show_complex(z, digits)
}

fn show_complex(z: &Complex, digits: usize) -> String {
    let re = format_real_digits(z.real(), digits);
    if z.imag().is_zero() {
        return re;
    }
    let im = format_real_digits(z.imag(), digits);
    if im.starts_with('-') {
        format!("{re}{im}i")
    } else {
        format!("{re}+{im}i")
    }
}

fn cache(global: &GlobalArgs) -> CoefficientCache {
    CoefficientCache::new(global.cache_dir.clone().unwrap_or_else(|| global.out_dir.join("cache")))
}

fn load_zeta_series(
    global: &GlobalArgs,
    order: usize,
    cfg: &PrecisionConfig,
) -> Result<(ZetaSeries, CacheStatus, PathBuf)> {
    cache(global).load_or_compute(order, DEFAULT_RADIUS, default_samples(order), cfg)
}

fn build_series(global: &GlobalArgs, args: &SeriesArgs, cfg: &PrecisionConfig) -> Result<ZetaSeries> {
    match args.series {
        SeriesKind::Zeta => load_zeta_series(global, args.order, cfg).map(|(s, _, _)| s),
        SeriesKind::Linear => Ok(ZetaSeries::linear(cfg.clone())),
        SeriesKind::Constant => {
            let text = args
                .constant
                .as_deref()
                .ok_or_else(|| Error::InvalidInput("--series constant needs --constant".into()))?;
            Ok(ZetaSeries::constant(parse_complex(text, cfg.bits)?, cfg.clone()))
        }
    }
}

fn write_output(out_dir: &Path, name: &str, body: &str, outputs: &mut Vec<String>) -> Result<()> {
    write_atomic(&out_dir.join(name), body.as_bytes())?;
    outputs.push(name.to_string());
    Ok(())
}

pub fn dispatch(cli: &Cli, argv: &[String]) -> Result<u8> {
    let start = Instant::now();
    let g = &cli.global;
    let outcome = match &cli.command {
        Command::Zeta(a) => zeta(g, a)?,
        Command::Coeffs(a) => coeffs(g, a)?,
        Command::Verify(a) => verify(g, a)?,
        Command::Campaign(a) => campaign(g, a)?,
        Command::Scan(a) => scan(g, a, "scan", false)?,
        Command::Fig1(a) => scan(g, a, "fig1", true)?,
        Command::ZeroFind(a) => zero_find(g, a)?,
        Command::Replay(a) => return replay(a),
    };
    let manifest = RunManifest {
        command: cli.command.name().to_string(),
        argv: argv.to_vec(),
        config_echo: serde_json::json!({ "global": g, "command": &cli.command }),
        precision: outcome.precision,
        series_fingerprint: outcome.fingerprint,
        wall_time_ms: start.elapsed().as_millis() as u64,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        outputs: outcome.outputs,
    };
    manifest.write(&g.out_dir)?;
    Ok(outcome.code)
}

fn zeta(g: &GlobalArgs, a: &ZetaArgs) -> Result<Outcome> {
    let cfg = precision(g, EVALUATION_BITS)?;
    let s = parse_complex(&a.s, cfg.bits)?;
    let digits = shown_digits(&cfg);
    if a.derivative {
        let (z, dz) = eval_zeta_with_derivative(&s, &cfg)?;
        outln!("{}", show_complex(&z, digits));
        outln!("{}", show_complex(&dz, digits));
    } else {
        outln!("{}", show_complex(&eval_zeta(&s, &cfg)?, digits));
    }
    Ok(Outcome {
        code: exit::OK,
        precision: cfg,
        fingerprint: None,
        outputs: Vec::new(),
    })
}

fn coeffs(g: &GlobalArgs, a: &CoeffsArgs) -> Result<Outcome> {
    if !(a.radius > 0.0 && a.radius < 1.0) {
        return Err(Error::InvalidInput(format!(
            "radius must lie in (0, 1), got {}",
            a.radius
        )));
    }
    let cfg = precision(g, EXTRACTION_BITS)?;
    let samples = a.samples.unwrap_or_else(|| default_samples(a.order));
    let (series, status, path) = cache(g).load_or_compute(a.order, a.radius, samples, &cfg)?;
    let checksum = CoefficientCache::file_checksum(&path)?;
    outln!(
        "cache {} {}",
        match status {
            CacheStatus::Hit => "hit",
            CacheStatus::Miss => "miss",
        },
        path.display()
    );
    outln!("checksum {checksum}");
    let digits = shown_digits(&cfg);
    for (k, c) in series.coeffs().iter().enumerate() {
        outln!("{k} {}", show_complex_above(c, digits, cfg.target_abs_err));
    }
    Ok(Outcome {
        code: exit::OK,
        precision: cfg,
        fingerprint: Some(series.fingerprint()),
        outputs: Vec::new(),
    })
}

fn verify(g: &GlobalArgs, a: &VerifyArgs) -> Result<Outcome> {
    let cfg = precision(g, EXTRACTION_BITS)?;
    let p = cfg.bits;
    let (alpha, beta) = match (&a.alpha, &a.beta, &a.eps, &a.t) {
        (Some(al), Some(be), None, None) => (parse_complex(al, p)?, parse_complex(be, p)?),
        (None, None, Some(eps), Some(t)) => line_amplitudes(&parse_real(eps, p)?, &parse_real(t, p)?, p),
        _ => {
            return Err(Error::InvalidInput(
                "give either --alpha and --beta or --eps and --t".into(),
            ))
        }
    };
    let series = build_series(g, &a.series, &cfg)?;
    let policy = TruncationPolicy::new(a.dim, a.tail_tol)?;
    let report = check_uncertainty(&series, &alpha, &beta, &policy, a.mode.into(), a.tol);
    let mut body = report.to_json()?;
    body.push('\n');
    out!("{body}");
    let mut outputs = Vec::new();
    write_output(&g.out_dir, "verify.json", &body, &mut outputs)?;
    if let Some(e) = &report.error {
        eprintln!("error: {e}");
    }
    let code = match report.classification {
        Classification::Consistent => exit::OK,
        Classification::InequalityViolationDirect => exit::VIOLATION,
        Classification::PaperFormMismatch => exit::MISMATCH,
        Classification::NumericFailure => {
            if report.error.as_deref().is_some_and(|e| e.starts_with("invalid input")) {
                exit::USAGE
            } else {
                exit::NUMERIC
            }
        }
    };
    Ok(Outcome {
        code,
        precision: cfg,
        fingerprint: Some(series.fingerprint()),
        outputs,
    })
}

fn campaign(g: &GlobalArgs, a: &CampaignArgs) -> Result<Outcome> {
    let cfg = precision(g, EVALUATION_BITS)?;
    let cc = CampaignConfig {
        trials: a.trials,
        seed: a.seed,
        max_order: a.max_order,
        max_amplitude: a.max_amplitude,
        dim: a.dim,
        bits: cfg.bits,
        tol: a.tol,
    };
    let summary = run_campaign(&cc)?;
    let mut body = serde_json::to_string_pretty(&serde_json::json!({ "config": cc, "summary": summary }))?;
    body.push('\n');
    out!("{body}");
    let mut outputs = Vec::new();
    write_output(&g.out_dir, "campaign.json", &body, &mut outputs)?;
    let code = if summary.violations > 0 {
        exit::VIOLATION
    } else if summary.failures > 0 {
        exit::NUMERIC
    } else {
        exit::OK
    };
    Ok(Outcome {
        code,
        precision: cfg,
        fingerprint: None,
        outputs,
    })
}

fn scan(g: &GlobalArgs, a: &ScanArgs, name: &str, with_f: bool) -> Result<Outcome> {
    let cfg = precision(g, EXTRACTION_BITS)?;
    let p = cfg.bits;
    let mut sc = ScanConfig::new(
        parse_real(&a.eps, p)?,
        parse_real(&a.t_min, p)?,
        parse_real(&a.t_max, p)?,
        parse_real(&a.step, p)?,
    )?;
    sc.mode = a.mode.into();
    sc.truncation = a.truncation;
    sc.refine_tol = a.refine_tol;
    sc.k_stride = a.k_stride;
    sc.validate()?;

    let (series, _, _) = load_zeta_series(g, a.order, &cfg)?;
    let mut k_series = Vec::new();
    if a.k_study {
        let mut orders = a.k_orders.clone();
        orders.sort_unstable();
        orders.dedup();
        for k in orders {
            if k == a.order {
                k_series.push(series.clone());
            } else {
                k_series.push(load_zeta_series(g, k, &cfg)?.0);
            }
        }
    }

    let (points, report) = run_scan(&sc, &series, &k_series)?;
    let witness = if a.no_witness {
        None
    } else {
        Some(witness_search(&sc.eps, &sc.t_min, &sc.t_max, &sc.step, &cfg)?)
    };

    // no output paths or thread counts here: the report must not depend on them
    let echo = serde_json::json!({
        "command": name,
        "args": a,
        "bits": p,
        "series_fingerprint": series.fingerprint(),
    });
    let mut outputs = Vec::new();
    let csv = scan_csv(&points, with_f.then_some(&report.f));
    write_output(&g.out_dir, &format!("{name}.csv"), &csv, &mut outputs)?;
    let json = crossing_report_json(&report, echo, witness.as_ref())?;
    write_output(&g.out_dir, &format!("{name}.json"), &json, &mut outputs)?;

    outln!("f = {}", format_real_digits(&report.f, 20));
    outln!("grid points: {}", report.grid_len);
    outln!("crossings: {}", report.crossings.len());
    outln!("violation intervals: {}", report.violation_intervals.len());
    outln!("grid points with Re zeta <= 0: {}", report.witnesses.len());
    if !report.errors.is_empty() {
        outln!("failed points: {}", report.errors.len());
    }
    if let Some((from, to, drift)) = report.k_drift() {
        outln!("K drift {from} -> {to}: {drift:e}");
    }
    if let Some(w) = &witness {
        outln!("confirmed witnesses: {}", w.witnesses.len());
        if let Some(h) = &w.hint {
            outln!("hint: {h}");
        }
    }
    outln!("wrote {}", g.out_dir.join(format!("{name}.csv")).display());
    Ok(Outcome {
        code: exit::OK,
        precision: cfg,
        fingerprint: Some(series.fingerprint()),
        outputs,
    })
}

fn zero_find(g: &GlobalArgs, a: &ZeroFindArgs) -> Result<Outcome> {
    let cfg = precision(g, EVALUATION_BITS)?;
    let z = find_zero_near(a.t0, &cfg)?;
    let (lo, hi) = (z.bracket.0.to_f64() - 0.01, z.bracket.1.to_f64() + 0.01);
    let count = argument_count(&Rectangle::strip(lo, hi))?;
    let body = serde_json::to_string_pretty(&serde_json::json!({
        "t": format_real(&z.t),
        "residual": format_real(&z.residual),
        "bracket": [format_real(&z.bracket.0), format_real(&z.bracket.1)],
        "window_count": z.window_count,
        "bracket_count": count,
    }))? + "\n";
    outln!("t = {}", format_real_digits(&z.t, shown_digits(&cfg)));
    outln!("|zeta| = {:e}", z.residual.to_f64());
    outln!("zeros in [{lo:.4}, {hi:.4}]: {count}");
    let mut outputs = Vec::new();
    write_output(&g.out_dir, "zero-find.json", &body, &mut outputs)?;
    Ok(Outcome {
        code: exit::OK,
        precision: cfg,
        fingerprint: None,
        outputs,
    })
}

fn replay(a: &ReplayArgs) -> Result<u8> {
    let m = RunManifest::read(&a.manifest)?;
    if m.command == "replay" || m.argv.is_empty() {
        return Err(Error::InvalidInput(
            "manifest does not record a replayable command".into(),
        ));
    }
    let mut argv: Vec<OsString> = Vec::with_capacity(m.argv.len() + 2);
    let mut skip = false;
    for (i, arg) in m.argv.iter().enumerate() {
        if skip {
            skip = false;
            continue;
        }
        if a.into.is_some() && i > 0 {
            if arg == "--out-dir" {
                skip = true;
                continue;
            }
            if arg.starts_with("--out-dir=") {
                continue;
            }
        }
        argv.push(arg.into());
    }
    if let Some(dir) = &a.into {
        argv.push("--out-dir".into());
        argv.push(dir.into());
    }
    Ok(crate::run(argv))
}
