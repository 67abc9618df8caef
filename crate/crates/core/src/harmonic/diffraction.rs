use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;
use crate::group::{Character, RegionBox};
use crate::measure::{PointMeasurePatch, SymbolicComb};

use super::exact::exact_spectrum;
use super::fourier_bohr::fb_spectrum;
use super::{FourierBohrSpectrum, SpectrumEntry, VanHoveSpec};

/// Intensities `|c_χ|²` of a numeric spectrum.
pub fn diffraction_numeric(spectrum: &FourierBohrSpectrum) -> FourierBohrSpectrum {
    let entries = spectrum
        .entries
        .iter()
        .map(|e| SpectrumEntry { freq: e.freq.clone(), coeff: Complex64::new(e.coeff.norm_sqr(), 0.0) })
        .collect();
    FourierBohrSpectrum {
        entries,
        source: "diffraction_numeric".into(),
        vh_n: spectrum.vh_n,
        vh_scale: spectrum.vh_scale,
        threshold: spectrum.threshold * spectrum.threshold,
    }
}

/// Exact diffraction intensities `|μ̂({χ})|²` in `window` above `intensity_threshold`;
/// for a model comb these are `dens(L)² |ȟ(χ⋆)|²`.
pub fn diffraction_exact(comb: &SymbolicComb, window: &RegionBox, intensity_threshold: f64) -> Result<FourierBohrSpectrum> {
    let s = exact_spectrum(comb, window, intensity_threshold.sqrt())?;
    let entries = s
        .entries
        .iter()
        .map(|e| SpectrumEntry { freq: e.freq.clone(), coeff: Complex64::new(e.coeff.norm_sqr(), 0.0) })
        .collect();
    Ok(FourierBohrSpectrum::new(entries, "diffraction_exact", None, intensity_threshold))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiffractionRow {
    pub freq: Vec<f64>,
    pub intensity_exact: f64,
    pub intensity_numeric: f64,
    pub abs_diff: f64,
}

/// Exact and numeric intensities at every exact peak in `window` whose intensity
/// exceeds `intensity_threshold / 4`; rows where either side exceeds the threshold are
/// returned, sorted by exact intensity (descending).
pub fn diffraction_side_by_side(
    comb: &SymbolicComb,
    patch: &PointMeasurePatch,
    vh: &VanHoveSpec,
    n: usize,
    window: &RegionBox,
    intensity_threshold: f64,
) -> Result<Vec<DiffractionRow>> {
    let exact = diffraction_exact(comb, window, intensity_threshold / 4.0)?;
    let cands: Vec<Character> = exact.entries.iter().map(|e| Character::real(e.freq.clone())).collect();
    let numeric = diffraction_numeric(&fb_spectrum(patch, &cands, vh, n, 0.0)?);
    let mut rows: Vec<DiffractionRow> = exact
        .entries
        .iter()
        .map(|e| {
            let num = numeric.lookup(&e.freq, 1e-12).map(|c| c.re).unwrap_or(0.0);
            DiffractionRow {
                freq: e.freq.clone(),
                intensity_exact: e.coeff.re,
                intensity_numeric: num,
                abs_diff: (e.coeff.re - num).abs(),
            }
        })
        .filter(|r| r.intensity_exact > intensity_threshold || r.intensity_numeric > intensity_threshold)
        .collect();
    rows.sort_by(|a, b| {
        b.intensity_exact
            .total_cmp(&a.intensity_exact)
            .then_with(|| crate::measure::patch::lex_cmp(&a.freq, &b.freq))
    });
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::EuclideanLattice;

    #[test]
    fn integer_comb_intensities() {
        let comb = SymbolicComb::lattice(EuclideanLattice::scaled_integer(1, 1.0).unwrap(), Complex64::new(1.0, 0.0));
        let d = diffraction_exact(&comb, &RegionBox::new(vec![-3.0], vec![3.0]).unwrap(), 0.5).unwrap();
        assert_eq!(d.len(), 7);
        assert!(d.entries.iter().all(|e| e.coeff == Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn numeric_intensities_are_nonnegative_reals() {
        let s = FourierBohrSpectrum::new(
            vec![SpectrumEntry { freq: vec![0.1], coeff: Complex64::new(-0.3, 0.4) }],
            "numeric",
            None,
            0.0,
        );
        let d = diffraction_numeric(&s);
        assert!((d.entries[0].coeff.re - 0.25).abs() < 1e-15);
        assert!(d.entries[0].coeff.re >= 0.0 && d.entries[0].coeff.im == 0.0);
    }
}
