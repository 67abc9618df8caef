use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::{dot_turns, unit_phase, Character};
use crate::measure::comb::FREQ_TOL;
use crate::measure::patch::{lex_cmp, REGION_TOL};
use crate::measure::PointMeasurePatch;

use super::{FourierBohrSpectrum, SpectrumEntry, VanHoveSpec};

/// Index range of the (lexicographically sorted) patch points whose first coordinate
/// lies in `[lo, hi]`.
pub(crate) fn first_axis_range(patch: &PointMeasurePatch, lo: f64, hi: f64) -> std::ops::Range<usize> {
    let pts = patch.points();
    let a = pts.partition_point(|p| p.position[0] < lo - REGION_TOL);
    let b = pts.partition_point(|p| p.position[0] <= hi + REGION_TOL);
    a..b.max(a)
}

/// `c_χ = (1 / vol A_n) Σ_{x ∈ supp ∩ A_n} a(x) conj(χ(x))`.
pub fn fb_coefficient(patch: &PointMeasurePatch, chi: &Character, vh: &VanHoveSpec, n: usize) -> Result<Complex64> {
    let a = vh.check_covered(patch.region(), n)?;
    check_character(patch, chi)?;
    Ok(coefficient_in(patch, &chi.freq, &a, vh.volume(n)))
}

fn check_character(patch: &PointMeasurePatch, chi: &Character) -> Result<()> {
    if chi.freq.len() != patch.dim() || !chi.finite.is_empty() {
        return Err(Error::Shape(format!(
            "character with {} real and {} finite components for a patch on R^{}",
            chi.freq.len(),
            chi.finite.len(),
            patch.dim()
        )));
    }
    Ok(())
}

pub(crate) fn coefficient_in(patch: &PointMeasurePatch, k: &[f64], a: &crate::group::RegionBox, volume: f64) -> Complex64 {
    if patch.dim() == 0 {
        return patch.points().iter().map(|p| p.weight).sum::<Complex64>() / volume;
    }
    let range = first_axis_range(patch, a.lo[0], a.hi[0]);
    let mut acc = Complex64::new(0.0, 0.0);
    for p in &patch.points()[range] {
        if a.contains(&p.position, REGION_TOL) {
            acc += p.weight * unit_phase(-dot_turns(k, &p.position));
        }
    }
    acc / volume
}

/// Coefficients at every candidate (duplicates within the frequency tolerance
/// removed); entries with `|c| > threshold` are kept.
pub fn fb_spectrum(
    patch: &PointMeasurePatch,
    candidates: &[Character],
    vh: &VanHoveSpec,
    n: usize,
    threshold: f64,
) -> Result<FourierBohrSpectrum> {
    let a = vh.check_covered(patch.region(), n)?;
    for c in candidates {
        check_character(patch, c)?;
    }
    let freqs = dedup_freqs(candidates.iter().map(|c| c.freq.clone()).collect());
    let vol = vh.volume(n);
    let coeffs: Vec<Complex64> = freqs.par_iter().map(|k| coefficient_in(patch, k, &a, vol)).collect();
    let entries = freqs
        .into_iter()
        .zip(coeffs)
        .filter(|(_, c)| c.norm() > threshold)
        .map(|(freq, coeff)| SpectrumEntry { freq, coeff })
        .collect();
    Ok(FourierBohrSpectrum::new(entries, "numeric", Some((vh, n)), threshold))
}

pub(crate) fn dedup_freqs(mut freqs: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    freqs.sort_by(|a, b| lex_cmp(a, b));
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(freqs.len());
    for f in freqs {
        // near-equal frequencies are adjacent along the first axis only in 1D; scan back
        // over the run with a close first coordinate
        let dup = out
            .iter()
            .rev()
            .take_while(|g| (g[0] - f[0]).abs() <= FREQ_TOL)
            .any(|g| g.iter().zip(&f).all(|(a, b)| (a - b).abs() <= FREQ_TOL));
        if !dup {
            out.push(f);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::RegionBox;
    use crate::lattice::EuclideanLattice;
    use crate::measure::SymbolicComb;

    fn z_patch(r: f64) -> PointMeasurePatch {
        SymbolicComb::lattice(EuclideanLattice::scaled_integer(1, 1.0).unwrap(), Complex64::new(1.0, 0.0))
            .materialize(&RegionBox::centered(1, r).unwrap())
            .unwrap()
    }

    #[test]
    fn integer_comb_coefficients() {
        let p = z_patch(100.0);
        let vh = VanHoveSpec::new(1, 1.0).unwrap();
        let c0 = fb_coefficient(&p, &Character::real(vec![0.0]), &vh, 100).unwrap();
        assert!((c0 - Complex64::new(1.005, 0.0)).norm() < 1e-12);
        let c1 = fb_coefficient(&p, &Character::real(vec![1.0]), &vh, 100).unwrap();
        assert!((c1 - Complex64::new(1.005, 0.0)).norm() < 1e-12);
        let ch = fb_coefficient(&p, &Character::real(vec![0.5]), &vh, 100).unwrap();
        assert!((ch - Complex64::new(0.005, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn coverage_is_enforced() {
        let p = z_patch(50.0);
        let vh = VanHoveSpec::new(1, 1.0).unwrap();
        assert!(matches!(
            fb_coefficient(&p, &Character::real(vec![0.0]), &vh, 100),
            Err(Error::Coverage(_))
        ));
    }

    #[test]
    fn spectrum_threshold() {
        let p = z_patch(100.0);
        let vh = VanHoveSpec::new(1, 1.0).unwrap();
        let cands: Vec<Character> = [0.0, 0.25, 0.5, 1.0].iter().map(|k| Character::real(vec![*k])).collect();
        let s = fb_spectrum(&p, &cands, &vh, 100, 0.1).unwrap();
        let mut fs: Vec<f64> = s.entries.iter().map(|e| e.freq[0]).collect();
        fs.sort_by(f64::total_cmp);
        assert_eq!(fs, vec![0.0, 1.0]);
        let empty = PointMeasurePatch::empty(RegionBox::centered(1, 100.0).unwrap()).unwrap();
        assert!(fb_spectrum(&empty, &cands, &vh, 100, 0.1).unwrap().is_empty());
    }
}
