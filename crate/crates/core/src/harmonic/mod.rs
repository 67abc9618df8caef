//! Fourier layer: van Hove boxes, Fourier–Bohr coefficients, exact transforms of
//! symbolic combs, Eberlein autocorrelation and diffraction.

pub mod autocorrelation;
pub mod diffraction;
pub mod exact;
pub mod fourier_bohr;

use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::RegionBox;
use crate::measure::io::fmt_f64;
use crate::measure::patch::lex_cmp;

pub use autocorrelation::eberlein_autocorrelation;
pub use diffraction::{diffraction_exact, diffraction_numeric, diffraction_side_by_side, DiffractionRow};
pub use exact::{dual_projection_candidates, exact_ft, exact_spectrum};
pub use fourier_bohr::{fb_coefficient, fb_spectrum};

/// Centered boxes `A_n = [-n s, n s]^d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VanHoveSpec {
    pub dim: usize,
    pub scale: f64,
}

impl VanHoveSpec {
    pub fn new(dim: usize, scale: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::Domain(format!("van Hove scale must be positive, got {scale}")));
        }
        Ok(VanHoveSpec { dim, scale })
    }

    pub fn half_width(&self, n: usize) -> f64 {
        n as f64 * self.scale
    }

    pub fn box_at(&self, n: usize) -> RegionBox {
        let r = self.half_width(n);
        RegionBox { lo: vec![-r; self.dim], hi: vec![r; self.dim], finite: Default::default() }
    }

    pub fn volume(&self, n: usize) -> f64 {
        (2.0 * self.half_width(n)).powi(self.dim as i32)
    }

    /// `vol(∂^K A_n)` for `K = [-r, r]^d`: `(2(ns + r))^d - (2(ns - r))^d`.
    pub fn boundary_volume(&self, n: usize, r: f64) -> Result<f64> {
        let h = self.half_width(n);
        if r >= h {
            return Err(Error::Domain(format!("K radius {r} is not smaller than the box half-width {h}")));
        }
        if r < 0.0 {
            return Err(Error::Domain(format!("K radius {r} is negative")));
        }
        let d = self.dim as i32;
        Ok((2.0 * (h + r)).powi(d) - (2.0 * (h - r)).powi(d))
    }

    pub fn boundary_ratio(&self, n: usize, r: f64) -> Result<f64> {
        Ok(self.boundary_volume(n, r)? / self.volume(n))
    }

    pub(crate) fn check_covered(&self, region: &RegionBox, n: usize) -> Result<RegionBox> {
        if region.dim() != self.dim {
            return Err(Error::Shape(format!(
                "van Hove boxes of dimension {} for a patch of dimension {}",
                self.dim,
                region.dim()
            )));
        }
        let a = self.box_at(n);
        if !region.contains_box(&a, crate::measure::patch::REGION_TOL) {
            return Err(Error::Coverage(format!(
                "averaging box A_{n} = [-{h}, {h}]^{d} is not covered by the patch region {:?}..{:?}",
                region.lo,
                region.hi,
                h = self.half_width(n),
                d = self.dim
            )));
        }
        Ok(a)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumEntry {
    pub freq: Vec<f64>,
    pub coeff: Complex64,
}

/// Frequencies with coefficients, sorted by modulus (descending, ties by frequency).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FourierBohrSpectrum {
    pub entries: Vec<SpectrumEntry>,
    /// `"numeric"`, `"exact"`, or a diffraction variant.
    pub source: String,
    pub vh_n: Option<usize>,
    pub vh_scale: Option<f64>,
    pub threshold: f64,
}

impl FourierBohrSpectrum {
    pub fn new(mut entries: Vec<SpectrumEntry>, source: &str, vh: Option<(&VanHoveSpec, usize)>, threshold: f64) -> Self {
        sort_entries(&mut entries);
        FourierBohrSpectrum {
            entries,
            source: source.to_string(),
            vh_n: vh.map(|v| v.1),
            vh_scale: vh.map(|v| v.0.scale),
            threshold,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Coefficient at the entry closest to `freq` within `tol` (sup norm).
    pub fn lookup(&self, freq: &[f64], tol: f64) -> Option<Complex64> {
        self.entries
            .iter()
            .filter(|e| e.freq.iter().zip(freq).all(|(a, b)| (a - b).abs() <= tol))
            .min_by(|a, b| dist(&a.freq, freq).total_cmp(&dist(&b.freq, freq)))
            .map(|e| e.coeff)
    }

    pub fn write_csv<W: Write>(&self, meta: &[String], mut out: W) -> Result<()> {
        for m in meta {
            writeln!(out, "# {m}")?;
        }
        writeln!(out, "# source: {}", self.source)?;
        if let Some(n) = self.vh_n {
            writeln!(out, "# vh_n: {n}")?;
        }
        if let Some(s) = self.vh_scale {
            writeln!(out, "# vh_scale: {}", fmt_f64(s))?;
        }
        writeln!(out, "# threshold: {}", fmt_f64(self.threshold))?;
        let d = self.entries.first().map(|e| e.freq.len()).unwrap_or(0);
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = (1..=d).map(|i| format!("re_freq_{i}")).collect();
        header.extend(["abs_coeff", "re_coeff", "im_coeff"].map(String::from));
        w.write_record(&header)?;
        for e in &self.entries {
            let mut row: Vec<String> = e.freq.iter().map(|v| fmt_f64(*v)).collect();
            row.push(fmt_f64(e.coeff.norm()));
            row.push(fmt_f64(e.coeff.re));
            row.push(fmt_f64(e.coeff.im));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub(crate) fn sort_entries(entries: &mut [SpectrumEntry]) {
    entries.sort_by(|a, b| b.coeff.norm().total_cmp(&a.coeff.norm()).then_with(|| lex_cmp(&a.freq, &b.freq)));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_volumes() {
        let v1 = VanHoveSpec::new(1, 1.0).unwrap();
        assert_eq!(v1.boundary_volume(10, 1.0).unwrap(), 4.0);
        let v2 = VanHoveSpec::new(2, 1.0).unwrap();
        assert_eq!(v2.boundary_volume(10, 1.0).unwrap(), 160.0);
        let a = v1.boundary_ratio(10, 1.0).unwrap();
        let b = v1.boundary_ratio(20, 1.0).unwrap();
        assert!((a / b - 2.0).abs() < 1e-12);
        assert!(v1.boundary_volume(1, 1.0).is_err());
    }

    #[test]
    fn nested_boxes() {
        let v = VanHoveSpec::new(2, 0.5).unwrap();
        for n in 1..10 {
            let a = v.box_at(n);
            let b = v.box_at(n + 1);
            assert!(b.lo.iter().zip(&a.lo).all(|(x, y)| x < y));
            assert!(b.hi.iter().zip(&a.hi).all(|(x, y)| x > y));
        }
    }
}
