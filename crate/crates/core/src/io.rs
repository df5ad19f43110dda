//! File formats: binary sinograms, 16-bit PGM images, metrics and
//! condition-number reports.
//!
//! Sinogram layout:
//!
//! ```text
//! OPEDSG1\n
//! N=<n> Nd=<n_d> r=<r> parity=<angle set> noise_sigma=<f64> seed=<u64|none>\n
//! <(views - r) * Nd little-endian f64, view-major>
//! ```

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::phantom::{AngleSet, Phantom, Sinogram, SinogramGeometry};
use crate::spectral::SpectralReport;
use crate::transform::ReconImage;
use crate::{Error, Result};

pub const SINOGRAM_MAGIC: &str = "OPEDSG1";

pub fn sinogram_bytes(s: &Sinogram) -> Vec<u8> {
    let g = s.geometry();
    let seed = s
        .seed()
        .map_or_else(|| "none".to_string(), |v| v.to_string());
    let header = format!(
        "{SINOGRAM_MAGIC}\nN={} Nd={} r={} parity={} noise_sigma={} seed={seed}\n",
        g.n(),
        g.n_d(),
        g.r(),
        g.angles(),
        s.noise_sigma(),
    );
    let mut out = Vec::with_capacity(header.len() + 8 * s.values().len());
    out.extend_from_slice(header.as_bytes());
    for v in s.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn write_sinogram(s: &Sinogram, mut w: impl Write) -> Result<()> {
    w.write_all(&sinogram_bytes(s))?;
    Ok(())
}

pub fn read_sinogram(mut r: impl Read) -> Result<Sinogram> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    parse_sinogram(&bytes)
}

fn split_line(bytes: &[u8]) -> Result<(&str, &[u8])> {
    let end = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::Format("unterminated header line".into()))?;
    let line = std::str::from_utf8(&bytes[..end])
        .map_err(|_| Error::Format("header is not UTF-8".into()))?;
    Ok((line, &bytes[end + 1..]))
}

pub fn parse_sinogram(bytes: &[u8]) -> Result<Sinogram> {
    let (magic, rest) = split_line(bytes)?;
    if magic != SINOGRAM_MAGIC {
        return Err(Error::Format(format!(
            "bad magic `{magic}`, expected `{SINOGRAM_MAGIC}`"
        )));
    }
    let (header, payload) = split_line(rest)?;

    let mut fields = header.split(' ');
    let mut field = |key: &str| -> Result<&str> {
        let token = fields
            .next()
            .ok_or_else(|| Error::Format(format!("header is missing `{key}`")))?;
        token
            .strip_prefix(key)
            .and_then(|t| t.strip_prefix('='))
            .ok_or_else(|| Error::Format(format!("expected `{key}=...`, found `{token}`")))
    };
    let int = |text: &str, key: &str| {
        text.parse::<usize>()
            .map_err(|e| Error::Format(format!("{key}: {e}")))
    };
    let n = int(field("N")?, "N")?;
    let n_d = int(field("Nd")?, "Nd")?;
    let r = int(field("r")?, "r")?;
    let angles: AngleSet = field("parity")?.parse()?;
    let sigma = field("noise_sigma")?
        .parse::<f64>()
        .map_err(|e| Error::Format(format!("noise_sigma: {e}")))?;
    let seed = match field("seed")? {
        "none" => None,
        text => Some(
            text.parse::<u64>()
                .map_err(|e| Error::Format(format!("seed: {e}")))?,
        ),
    };
    if fields.next().is_some() {
        return Err(Error::Format("unexpected trailing header fields".into()));
    }

    let geometry = SinogramGeometry::new(n, n_d, r, angles)?;
    let expected = (geometry.views() - r) * n_d * 8;
    if payload.len() < expected {
        return Err(Error::Truncated {
            expected,
            actual: payload.len(),
        });
    }
    if payload.len() > expected {
        return Err(Error::Format(format!(
            "payload has {} bytes, expected {expected}",
            payload.len()
        )));
    }
    let values: Vec<f64> = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    Sinogram::from_parts(geometry, values, sigma, seed)
}

/// Binary 16-bit PGM. Values map linearly from `[lo, hi]` onto `0..=65535`
/// and are clamped; masked-out pixels get 0.
pub fn write_image(img: &ReconImage, lo: f64, hi: f64) -> Result<Vec<u8>> {
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(Error::InvalidWindow { lo, hi });
    }
    let m = img.size();
    let header = format!("P5\n{m} {m}\n65535\n");
    let mut out = Vec::with_capacity(header.len() + 2 * m * m);
    out.extend_from_slice(header.as_bytes());
    let span = hi - lo;
    for (&v, &inside) in img.values().iter().zip(img.mask()) {
        let sample = if inside && !v.is_nan() {
            ((v - lo) / span * 65535.0).round().clamp(0.0, 65535.0) as u16
        } else {
            0
        };
        out.extend_from_slice(&sample.to_be_bytes());
    }
    Ok(out)
}

/// Errors over the pixels inside the unit disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    pub rmse_inside_disk: f64,
    pub rel_l2_inside_disk: f64,
    pub max_abs_inside_disk: f64,
}

/// The phantom's density at every masked pixel centre.
pub fn reference_image(phantom: &impl Phantom, size: usize) -> ReconImage {
    ReconImage::from_fn(size, |x, y| phantom.density(x, y))
}

pub fn compute_metrics(img: &ReconImage, reference: &ReconImage) -> Result<Metrics> {
    if img.size() != reference.size() {
        return Err(Error::DimensionMismatch {
            expected: reference.size(),
            actual: img.size(),
        });
    }
    let (mut err2, mut ref2, mut max_abs, mut count) = (0.0, 0.0, 0.0f64, 0usize);
    for ((&v, &want), &inside) in img
        .values()
        .iter()
        .zip(reference.values())
        .zip(reference.mask())
    {
        if !inside {
            continue;
        }
        let d = v - want;
        err2 += d * d;
        ref2 += want * want;
        max_abs = max_abs.max(d.abs());
        count += 1;
    }
    let rel_l2_inside_disk = if err2 == 0.0 {
        0.0
    } else {
        (err2 / ref2).sqrt()
    };
    Ok(Metrics {
        rmse_inside_disk: if count == 0 {
            0.0
        } else {
            (err2 / count as f64).sqrt()
        },
        rel_l2_inside_disk,
        max_abs_inside_disk: max_abs,
    })
}

pub fn metrics_json(m: &Metrics) -> String {
    serde_json::to_string_pretty(m).expect("metrics serialize") + "\n"
}

/// Per-frequency CSV over one or more reports: `tau,beta,k,mu_min,mu_max,cond`.
pub fn report_csv(reports: &[SpectralReport]) -> String {
    let mut out = String::from("tau,beta,k,mu_min,mu_max,cond\n");
    for report in reports {
        for c in &report.per_k {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                report.tau, report.beta, c.k, c.mu_min, c.mu_max, c.cond
            ));
        }
    }
    out
}

pub fn reports_json(reports: &[SpectralReport]) -> String {
    serde_json::to_string_pretty(reports).expect("reports serialize") + "\n"
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidArgument(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(
        ".{}.tmp-{}",
        name.to_string_lossy(),
        std::process::id()
    ));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}
