//! On-disk cache of extracted coefficient lists, keyed by (K, r, M, bits).
//!
//! Files are written to a temporary sibling and renamed into place so that
//! concurrent writers never leave a torn file behind.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rug::Complex;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::series::{hex_digest, taylor_coeffs, Contour, ZetaSeries};
use crate::error::{Error, Result};
use crate::precision::{format_real, parse_real, PrecisionConfig};

pub const CACHE_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheStatus {
    Hit,
    Miss,
}

#[derive(Debug, Serialize, Deserialize)]
struct CacheFile {
    version: u32,
    order: usize,
    radius: String,
    samples: usize,
    bits: u32,
    target_abs_err: f64,
    coeffs: Vec<[String; 2]>,
    checksum: String,
}

impl CacheFile {
    fn compute_checksum(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!(
            "v{};K={};r={};M={};bits={};",
            self.version, self.order, self.radius, self.samples, self.bits
        ));
        for [re, im] in &self.coeffs {
            h.update(re);
            h.update(",");
            h.update(im);
            h.update(";");
        }
        hex_digest(h)
    }
}

#[derive(Clone, Debug)]
pub struct CoefficientCache {
    dir: PathBuf,
}

impl CoefficientCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, order: usize, radius: f64, samples: usize, bits: u32) -> PathBuf {
        self.dir.join(format!(
            "zeta-coeffs-v{CACHE_FORMAT_VERSION}-K{order}-r{radius}-M{samples}-b{bits}.json"
        ))
    }

    /// Loads the series if a valid file exists, otherwise extracts and stores it.
    pub fn load_or_compute(
        &self,
        order: usize,
        radius: f64,
        samples: usize,
        cfg: &PrecisionConfig,
    ) -> Result<(ZetaSeries, CacheStatus, PathBuf)> {
        let path = self.path_for(order, radius, samples, cfg.bits);
        if let Ok(series) = self.load(&path, order, radius, samples, cfg) {
            return Ok((series, CacheStatus::Hit, path));
        }
        let series = taylor_coeffs(order, radius, samples, cfg)?;
        self.store(&path, &series)?;
        Ok((series, CacheStatus::Miss, path))
    }

    pub fn load(
        &self,
        path: &Path,
        order: usize,
        radius: f64,
        samples: usize,
        cfg: &PrecisionConfig,
    ) -> Result<ZetaSeries> {
        let text = fs::read_to_string(path)?;
        let file: CacheFile = serde_json::from_str(&text)?;
        if file.version != CACHE_FORMAT_VERSION
            || file.order != order
            || file.radius != radius.to_string()
            || file.samples != samples
            || file.bits != cfg.bits
            || file.coeffs.len() != order + 1
        {
            return Err(Error::Cache(format!(
                "{} does not match the requested key",
                path.display()
            )));
        }
        if file.checksum != file.compute_checksum() {
            return Err(Error::Cache(format!("{} failed its checksum", path.display())));
        }
        let coeffs = file
            .coeffs
            .iter()
            .map(|[re, im]| {
                Ok(Complex::with_val(
                    cfg.bits,
                    (parse_real(re, cfg.bits)?, parse_real(im, cfg.bits)?),
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ZetaSeries::with_contour(
            coeffs,
            Contour { radius, samples },
            cfg.clone(),
        ))
    }

    pub fn store(&self, path: &Path, series: &ZetaSeries) -> Result<()> {
        let contour = series
            .contour()
            .ok_or_else(|| Error::Cache("only extracted series are cached".into()))?;
        let mut file = CacheFile {
            version: CACHE_FORMAT_VERSION,
            order: series.order(),
            radius: contour.radius.to_string(),
            samples: contour.samples,
            bits: series.prec(),
            target_abs_err: series.precision().target_abs_err,
            coeffs: series
                .coeffs()
                .iter()
                .map(|c| [format_real(c.real()), format_real(c.imag())])
                .collect(),
            checksum: String::new(),
        };
        file.checksum = file.compute_checksum();
        let mut body = serde_json::to_string_pretty(&file)?;
        body.push('\n');
        write_atomic(path, body.as_bytes())
    }

    /// Checksum recorded in an existing cache file.
    pub fn file_checksum(path: &Path) -> Result<String> {
        let file: CacheFile = serde_json::from_str(&fs::read_to_string(path)?)?;
        Ok(file.checksum)
    }
}

/// Write-then-rename within the destination directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}
