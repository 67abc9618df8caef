use crate::cps::CutProjectScheme;
use crate::error::Result;
use crate::group::{Character, RegionBox};
use crate::measure::SymbolicComb;

use super::{FourierBohrSpectrum, SpectrumEntry};

/// The Fourier transform of a symbolic comb, as a comb on the dual group.
///
/// * `a δ_Γ ↦ a dens(Γ) δ_{Γ⁰}`;
/// * crystallographic combs map to crystallographic combs on `Γ⁰` with translates `χ_j`
///   and `Q_j(y) = dens(Γ) Σ_i c_ij e^{-2πi (y - χ_j)·τ_i}`;
/// * model combs map to model combs on the dual scheme with weight `ȟ`, scaled by
///   `dens(L)`.
pub fn exact_ft(comb: &SymbolicComb) -> Result<SymbolicComb> {
    comb.fourier_transform()
}

/// Atoms of `μ̂` in `window` with `|μ̂({χ})| > threshold`.
pub fn exact_spectrum(comb: &SymbolicComb, window: &RegionBox, threshold: f64) -> Result<FourierBohrSpectrum> {
    let ft = exact_ft(comb)?;
    let atoms = ft.atoms(window, threshold)?;
    let entries = atoms
        .points()
        .iter()
        .map(|p| SpectrumEntry { freq: p.position.clone(), coeff: p.weight })
        .collect();
    Ok(FourierBohrSpectrum::new(entries, "exact", None, threshold))
}

/// Physical parts of the dual-scheme lattice points in `window` whose star has sup norm
/// at most `star_radius` (all of them for finite internal groups).
pub fn dual_projection_candidates(cps: &CutProjectScheme, window: &RegionBox, star_radius: f64) -> Result<Vec<Character>> {
    let dual = cps.dual()?;
    let internal = if dual.internal().is_euclidean() && dual.internal().euclidean_dim > 0 {
        Some(RegionBox::centered(dual.internal().euclidean_dim, star_radius)?)
    } else {
        None
    };
    Ok(dual.points(window, internal.as_ref())?.into_iter().map(|p| Character::real(p.physical)).collect())
}
