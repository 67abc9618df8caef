use num_complex::Complex64;
use serde::Serialize;

use crate::cps::weight::ZERO_WEIGHT;
use crate::cps::{CutProjectScheme, LatticeData, SupportExtent, WeightFunction};
use crate::error::{Error, Result};
use crate::group::{dot_turns, unit_phase, RegionBox};
use crate::lattice::EuclideanLattice;

use super::patch::{lex_cmp, Embedding, PointMeasurePatch};

/// Frequencies closer than this are merged.
pub const FREQ_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrigTerm {
    pub freq: Vec<f64>,
    pub coeff: Complex64,
}

/// `P(x) = Σ_j c_j e^{2πi χ_j·x}`.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct TrigPoly {
    pub terms: Vec<TrigTerm>,
}

impl TrigPoly {
    pub fn new(terms: Vec<(Vec<f64>, Complex64)>) -> Self {
        TrigPoly { terms: terms.into_iter().map(|(freq, coeff)| TrigTerm { freq, coeff }).collect() }
    }

    pub fn constant(d: usize, c: Complex64) -> Self {
        Self::new(vec![(vec![0.0; d], c)])
    }

    pub fn evaluate(&self, x: &[f64]) -> Complex64 {
        self.terms.iter().map(|t| t.coeff * unit_phase(dot_turns(&t.freq, x))).sum()
    }

    /// Coefficient sum `Σ |c_j|`, a bound for `sup |P|`.
    pub fn l1(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.norm()).sum()
    }

    /// Rewrites the polynomial for use on the coset `Γ + shift` only: each frequency is
    /// reduced into the fundamental cell of `dual = Γ⁰`, the coefficient picks up the
    /// constant phase this costs on the coset, and equal frequencies are merged.
    pub fn canonical_on_coset(&self, dual: &EuclideanLattice, shift: &[f64]) -> TrigPoly {
        let mut terms: Vec<TrigTerm> = self
            .terms
            .iter()
            .map(|t| {
                let (res, _) = dual.reduce_mod(&t.freq);
                let jump: Vec<f64> = t.freq.iter().zip(&res).map(|(a, b)| a - b).collect();
                TrigTerm { freq: res, coeff: t.coeff * unit_phase(dot_turns(&jump, shift)) }
            })
            .collect();
        merge_terms(&mut terms);
        TrigPoly { terms }
    }

    /// `x ↦ P(x - t)`.
    pub fn shifted(&self, t: &[f64]) -> TrigPoly {
        TrigPoly {
            terms: self
                .terms
                .iter()
                .map(|s| TrigTerm { freq: s.freq.clone(), coeff: s.coeff * unit_phase(-dot_turns(&s.freq, t)) })
                .collect(),
        }
    }
}

fn merge_terms(terms: &mut Vec<TrigTerm>) {
    terms.sort_by(|a, b| lex_cmp(&a.freq, &b.freq));
    let mut out: Vec<TrigTerm> = Vec::with_capacity(terms.len());
    for t in terms.drain(..) {
        if let Some(j) = out
            .iter()
            .position(|s| s.freq.iter().zip(&t.freq).all(|(a, b)| (a - b).abs() <= FREQ_TOL))
        {
            out[j].coeff += t.coeff;
        } else {
            out.push(t);
        }
    }
    out.retain(|t| t.coeff.norm() > ZERO_WEIGHT);
    *terms = out;
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coset {
    pub translate: Vec<f64>,
    pub poly: TrigPoly,
}

/// `Σ_i Σ_{x ∈ Γ + τ_i} P_i(x) δ_x` with translates distinct modulo `Γ` and every
/// polynomial in canonical form for its coset.
#[derive(Debug, Clone, PartialEq)]
pub struct CrystComb {
    lattice: EuclideanLattice,
    cosets: Vec<Coset>,
}

impl CrystComb {
    pub fn new(lattice: EuclideanLattice, cosets: Vec<Coset>) -> Result<Self> {
        let d = lattice.dim();
        let dual = lattice.dual();
        let mut merged: Vec<Coset> = Vec::new();
        for c in cosets {
            if c.translate.len() != d || c.poly.terms.iter().any(|t| t.freq.len() != d) {
                return Err(Error::Shape(format!("coset data does not match the lattice dimension {d}")));
            }
            let (res, _) = lattice.reduce_mod(&c.translate);
            let res = snap_residue(&lattice, res);
            match merged
                .iter_mut()
                .find(|m| lattice.distance_to_lattice(&sub(&m.translate, &res)) <= FREQ_TOL)
            {
                Some(m) => m.poly.terms.extend(c.poly.terms),
                None => merged.push(Coset { translate: res, poly: c.poly }),
            }
        }
        for m in &mut merged {
            m.poly = m.poly.canonical_on_coset(&dual, &m.translate);
        }
        merged.sort_by(|a, b| lex_cmp(&a.translate, &b.translate));
        Ok(CrystComb { lattice, cosets: merged })
    }

    pub fn lattice(&self) -> &EuclideanLattice {
        &self.lattice
    }

    pub fn cosets(&self) -> &[Coset] {
        &self.cosets
    }

    /// Point mass at `x`.
    pub fn mass_at(&self, x: &[f64]) -> Complex64 {
        self.cosets
            .iter()
            .filter(|c| self.lattice.distance_to_lattice(&sub(x, &c.translate)) <= 1e-7)
            .map(|c| c.poly.evaluate(x))
            .sum()
    }
}

/// Residues within the tolerance of the far side of the cell are moved to the near side.
fn snap_residue(lattice: &EuclideanLattice, res: Vec<f64>) -> Vec<f64> {
    let f = lattice.fractional(&res);
    if f.iter().any(|v| (1.0 - v).abs() <= FREQ_TOL) {
        let c: Vec<i64> = f.iter().map(|v| if (1.0 - v).abs() <= FREQ_TOL { 1 } else { 0 }).collect();
        sub(&res, &lattice.position(&c))
    } else {
        res
    }
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `amplitude · Σ_{x ∈ L} h(x⋆) e^{2πi m·x} δ_{x+t}` with `t = offset`, `m = modulation`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelComb {
    pub cps: CutProjectScheme,
    pub weight: WeightFunction,
    pub amplitude: Complex64,
    pub offset: Vec<f64>,
    pub modulation: Vec<f64>,
}

impl ModelComb {
    pub fn new(cps: CutProjectScheme, weight: WeightFunction) -> Result<Self> {
        weight.check_against(cps.internal())?;
        let d = cps.physical_dim();
        Ok(ModelComb { cps, weight, amplitude: Complex64::new(1.0, 0.0), offset: vec![0.0; d], modulation: vec![0.0; d] })
    }

    /// Weight of the lattice point with coordinates `coords`, located at `x + offset`.
    pub fn weight_of(&self, coords: &[i64]) -> Complex64 {
        let x = self.cps.physical_position(coords);
        self.amplitude * self.weight.evaluate(&self.cps.star(coords)) * unit_phase(dot_turns(&self.modulation, &x))
    }

    /// `h ∗ h̃` on the internal group, when it has a closed form.
    pub fn autocorrelation_weight(&self) -> Result<WeightFunction> {
        autocorrelation_of(&self.weight)
    }

    /// Point mass of `γ = μ ⊛ μ̃` at the lattice difference with coordinates `coords`:
    /// `dens(L) |amplitude|² e^{2πi m·z} (h ∗ h̃)(z⋆)`.
    pub fn autocorrelation_at(&self, coords: &[i64]) -> Result<Complex64> {
        let g = self.autocorrelation_weight()?;
        let z = self.cps.physical_position(coords);
        Ok(self.amplitude.norm_sqr()
            * self.cps.dens()
            * g.evaluate(&self.cps.star(coords))
            * unit_phase(dot_turns(&self.modulation, &z)))
    }
}

fn autocorrelation_of(h: &WeightFunction) -> Result<WeightFunction> {
    use crate::cps::Window;
    match h {
        WeightFunction::Indicator { window: Window::Interval { lo, hi } } => WeightFunction::tent(*lo, *hi),
        WeightFunction::Indicator { window: Window::Subset { orders, members } } => {
            let n = orders.iter().product::<u64>() as usize;
            let mut values = vec![Complex64::new(0.0, 0.0); n];
            for m in members {
                values[crate::cps::weight::table_index(orders, m)] = Complex64::new(1.0, 0.0);
            }
            autocorrelation_of(&WeightFunction::table(
                orders.clone(),
                crate::group::FiniteHaar::Normalized,
                values,
            )?)
        }
        WeightFunction::FiniteTable { orders, haar, values } => {
            let mass = match haar {
                crate::group::FiniteHaar::Normalized => 1.0 / values.len() as f64,
                crate::group::FiniteHaar::Counting => 1.0,
            };
            let out = (0..values.len())
                .map(|u| {
                    let uu = crate::cps::weight::table_element(orders, u);
                    (0..values.len())
                        .map(|v| {
                            let vv = crate::cps::weight::table_element(orders, v);
                            let w: Vec<u64> = vv.iter().zip(&uu).zip(orders).map(|((a, b), q)| (a + q - b) % q).collect();
                            values[v] * values[crate::cps::weight::table_index(orders, &w)].conj()
                        })
                        .sum::<Complex64>()
                        * mass
                })
                .collect();
            WeightFunction::table(orders.clone(), *haar, out)
        }
        _ => Err(Error::UnsupportedTransform(
            "closed-form autocorrelation weights exist for interval windows and finite tables only".into(),
        )),
    }
}

/// Exact pure point measures on `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub enum SymbolicComb {
    /// `amplitude · δ_Γ`.
    Lattice { lattice: EuclideanLattice, amplitude: Complex64 },
    Cryst(CrystComb),
    Model(ModelComb),
}

impl SymbolicComb {
    pub fn lattice(lattice: EuclideanLattice, amplitude: Complex64) -> Self {
        SymbolicComb::Lattice { lattice, amplitude }
    }

    pub fn cryst(lattice: EuclideanLattice, cosets: Vec<Coset>) -> Result<Self> {
        Ok(SymbolicComb::Cryst(CrystComb::new(lattice, cosets)?))
    }

    pub fn model(cps: CutProjectScheme, weight: WeightFunction) -> Result<Self> {
        Ok(SymbolicComb::Model(ModelComb::new(cps, weight)?))
    }

    pub fn dim(&self) -> usize {
        match self {
            SymbolicComb::Lattice { lattice, .. } => lattice.dim(),
            SymbolicComb::Cryst(c) => c.lattice.dim(),
            SymbolicComb::Model(m) => m.cps.physical_dim(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SymbolicComb::Lattice { .. } => "lattice",
            SymbolicComb::Cryst(_) => "cryst",
            SymbolicComb::Model(_) => "model",
        }
    }

    /// The comb restricted to `region`. Model combs whose weight has unbounded support
    /// need [`SymbolicComb::materialize_truncated`].
    pub fn materialize(&self, region: &RegionBox) -> Result<PointMeasurePatch> {
        self.materialize_inner(region, None)
    }

    /// As [`SymbolicComb::materialize`], keeping only model-comb points whose star has
    /// sup norm at most `internal_radius` when the weight has unbounded support.
    pub fn materialize_truncated(&self, region: &RegionBox, internal_radius: f64) -> Result<PointMeasurePatch> {
        self.materialize_inner(region, Some(internal_radius))
    }

    fn materialize_inner(&self, region: &RegionBox, internal_radius: Option<f64>) -> Result<PointMeasurePatch> {
        region.validate()?;
        if region.dim() != self.dim() {
            return Err(Error::Shape(format!("region of dimension {} for a comb on R^{}", region.dim(), self.dim())));
        }
        match self {
            SymbolicComb::Lattice { lattice, amplitude } => {
                let pts = lattice.points_in_box(region)?;
                PointMeasurePatch::with_coords(
                    region.clone(),
                    Embedding { map: lattice.basis().clone(), origin: vec![0.0; lattice.dim()] },
                    pts.into_iter().map(|p| (p.coords, *amplitude)).collect(),
                )
            }
            SymbolicComb::Cryst(c) => {
                let mut pts = Vec::new();
                for coset in &c.cosets {
                    let shifted = region.translated(&coset.translate.iter().map(|v| -v).collect::<Vec<_>>());
                    for p in c.lattice.points_in_box(&shifted)? {
                        let x: Vec<f64> = p.position.iter().zip(&coset.translate).map(|(a, b)| a + b).collect();
                        let w = coset.poly.evaluate(&x);
                        pts.push((x, w));
                    }
                }
                PointMeasurePatch::new(region.clone(), pts)
            }
            SymbolicComb::Model(m) => {
                let neg: Vec<f64> = m.offset.iter().map(|v| -v).collect();
                let base_region = region.translated(&neg);
                let internal_box = match m.weight.support_extent() {
                    SupportExtent::Finite => None,
                    SupportExtent::Bounded(b) => Some(b),
                    SupportExtent::Unbounded => {
                        let r = internal_radius.ok_or_else(|| {
                            Error::Domain("weight has unbounded support; an internal cutoff radius is required".into())
                        })?;
                        Some(RegionBox::centered(m.cps.internal().euclidean_dim, r)?)
                    }
                };
                let internal_box = match (internal_box, internal_radius) {
                    (Some(b), Some(r)) => {
                        let c = RegionBox::centered(b.dim(), r)?;
                        Some(b.intersect(&c).unwrap_or(c))
                    }
                    (b, _) => b,
                };
                let pts = m.cps.points(&base_region, internal_box.as_ref())?;
                let mut weighted = Vec::with_capacity(pts.len());
                for p in pts {
                    let h = m.weight.evaluate(&p.star);
                    if h.norm() <= ZERO_WEIGHT {
                        continue;
                    }
                    let w = m.amplitude * h * unit_phase(dot_turns(&m.modulation, &p.physical));
                    weighted.push((p.coords, w));
                }
                let map = m.cps.physical_map();
                PointMeasurePatch::with_coords(region.clone(), Embedding { map, origin: m.offset.clone() }, weighted)
                    .map_err(|e| match e {
                        Error::Domain(msg) => Error::Domain(format!("{msg} (rounding at the region edge)")),
                        other => other,
                    })
            }
        }
    }

    /// `T_t μ`.
    pub fn translate(&self, t: &[f64]) -> Result<SymbolicComb> {
        if t.len() != self.dim() {
            return Err(Error::Shape("translation does not match the comb dimension".into()));
        }
        match self {
            SymbolicComb::Lattice { lattice, amplitude } => SymbolicComb::cryst(
                lattice.clone(),
                vec![Coset { translate: t.to_vec(), poly: TrigPoly::constant(lattice.dim(), *amplitude) }],
            ),
            SymbolicComb::Cryst(c) => SymbolicComb::cryst(
                c.lattice.clone(),
                c.cosets
                    .iter()
                    .map(|k| Coset {
                        translate: k.translate.iter().zip(t).map(|(a, b)| a + b).collect(),
                        poly: k.poly.shifted(t),
                    })
                    .collect(),
            ),
            SymbolicComb::Model(m) => {
                let mut m = m.clone();
                m.offset = m.offset.iter().zip(t).map(|(a, b)| a + b).collect();
                Ok(SymbolicComb::Model(m))
            }
        }
    }

    /// `μ̃`.
    pub fn reflect_conjugate(&self) -> Result<SymbolicComb> {
        match self {
            SymbolicComb::Lattice { lattice, amplitude } => {
                Ok(SymbolicComb::Lattice { lattice: lattice.clone(), amplitude: amplitude.conj() })
            }
            SymbolicComb::Cryst(c) => SymbolicComb::cryst(
                c.lattice.clone(),
                c.cosets
                    .iter()
                    .map(|k| Coset {
                        translate: k.translate.iter().map(|v| -v).collect(),
                        poly: TrigPoly {
                            terms: k
                                .poly
                                .terms
                                .iter()
                                .map(|t| TrigTerm { freq: t.freq.clone(), coeff: t.coeff.conj() })
                                .collect(),
                        },
                    })
                    .collect(),
            ),
            SymbolicComb::Model(m) => Ok(SymbolicComb::Model(ModelComb {
                cps: m.cps.clone(),
                weight: m.weight.reflect_conjugate(),
                amplitude: m.amplitude.conj(),
                offset: m.offset.iter().map(|v| -v).collect(),
                modulation: m.modulation.clone(),
            })),
        }
    }

    /// The Fourier transform `μ̂`, a comb on the dual group.
    pub fn fourier_transform(&self) -> Result<SymbolicComb> {
        match self {
            SymbolicComb::Lattice { lattice, amplitude } => Ok(SymbolicComb::Lattice {
                lattice: lattice.dual(),
                amplitude: amplitude * lattice.density(),
            }),
            SymbolicComb::Cryst(c) => {
                let dens = c.lattice.density();
                // group the coefficients c_ij by frequency χ_j
                let mut freqs: Vec<Vec<f64>> = Vec::new();
                for coset in &c.cosets {
                    for t in &coset.poly.terms {
                        if !freqs.iter().any(|f| f.iter().zip(&t.freq).all(|(a, b)| (a - b).abs() <= FREQ_TOL)) {
                            freqs.push(t.freq.clone());
                        }
                    }
                }
                let cosets = freqs
                    .into_iter()
                    .map(|chi| {
                        let mut terms = Vec::new();
                        for coset in &c.cosets {
                            for t in &coset.poly.terms {
                                if t.freq.iter().zip(&chi).all(|(a, b)| (a - b).abs() <= FREQ_TOL) {
                                    let freq: Vec<f64> = coset.translate.iter().map(|v| -v).collect();
                                    let coeff = t.coeff * dens * unit_phase(dot_turns(&chi, &coset.translate));
                                    terms.push(TrigTerm { freq, coeff });
                                }
                            }
                        }
                        Coset { translate: chi, poly: TrigPoly { terms } }
                    })
                    .collect();
                SymbolicComb::cryst(c.lattice.dual(), cosets)
            }
            SymbolicComb::Model(m) => {
                let dual = m.cps.dual()?;
                let weight = m.weight.transform()?;
                let amplitude = m.amplitude * m.cps.dens() * unit_phase(-dot_turns(&m.modulation, &m.offset));
                Ok(SymbolicComb::Model(ModelComb {
                    cps: dual,
                    weight,
                    amplitude,
                    offset: m.modulation.clone(),
                    modulation: m.offset.iter().map(|v| -v).collect(),
                }))
            }
        }
    }

    /// Largest sup-norm radius of stars that can carry a weight above `delta` in
    /// modulus, for model combs; `None` for other combs.
    pub fn internal_cutoff(&self, delta: f64) -> Option<f64> {
        match self {
            SymbolicComb::Model(m) => {
                let a = m.amplitude.norm().max(1e-300);
                m.weight.tail_radius(delta / a)
            }
            _ => None,
        }
    }

    /// Atoms of the comb in `region` with modulus above `threshold`.
    pub fn atoms(&self, region: &RegionBox, threshold: f64) -> Result<PointMeasurePatch> {
        let patch = match self.internal_cutoff(threshold) {
            Some(r) if matches!(self, SymbolicComb::Model(m) if m.weight.support_extent() == SupportExtent::Unbounded) => {
                self.materialize_truncated(region, r)?
            }
            _ => self.materialize(region)?,
        };
        Ok(patch.pruned(threshold))
    }

    /// Internal coordinates of a point of a model comb with integer coordinates `coords`.
    pub fn star_of(&self, coords: &[i64]) -> Option<crate::group::GroupElement> {
        match self {
            SymbolicComb::Model(m) => Some(m.cps.star(coords)),
            _ => None,
        }
    }

    /// `true` when the model comb lives on a scheme with a Euclidean internal space.
    pub fn has_euclidean_internal(&self) -> bool {
        matches!(self, SymbolicComb::Model(m) if matches!(m.cps.data(), LatticeData::Euclidean(_)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cps::{golden_ratio, Window};

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    fn z() -> EuclideanLattice {
        EuclideanLattice::scaled_integer(1, 1.0).unwrap()
    }

    #[test]
    fn lattice_comb_materializes() {
        let p = SymbolicComb::lattice(z(), one()).materialize(&RegionBox::centered(1, 2.0).unwrap()).unwrap();
        let xs: Vec<f64> = p.points().iter().map(|q| q.position[0]).collect();
        assert_eq!(xs, vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
        assert!(p.points().iter().all(|q| q.weight == one()));
    }

    #[test]
    fn modulated_comb_materializes() {
        let comb = SymbolicComb::cryst(
            z(),
            vec![Coset { translate: vec![0.0], poly: TrigPoly::new(vec![(vec![0.25], one())]) }],
        )
        .unwrap();
        let p = comb.materialize(&RegionBox::new(vec![0.0], vec![3.0]).unwrap()).unwrap();
        let w: Vec<Complex64> = p.points().iter().map(|q| q.weight).collect();
        let expect = [one(), Complex64::new(0.0, 1.0), -one(), Complex64::new(0.0, -1.0)];
        for (a, b) in w.iter().zip(expect) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn model_comb_matches_projection() {
        let phi = golden_ratio();
        let f = CutProjectScheme::fibonacci();
        let w = Window::interval(-1.0, phi - 1.0).unwrap();
        let region = RegionBox::new(vec![0.0], vec![30.0]).unwrap();
        let a = SymbolicComb::model(f.clone(), WeightFunction::indicator(w.clone()))
            .unwrap()
            .materialize(&region)
            .unwrap();
        let b = f.project_points(&w, &region).unwrap();
        assert_eq!(a, b);
        assert!(a.points().iter().all(|q| q.weight == one()));
    }

    #[test]
    fn canonical_translates_and_period() {
        let comb = SymbolicComb::cryst(z(), vec![Coset { translate: vec![0.0], poly: TrigPoly::constant(1, one()) }]).unwrap();
        let moved = comb.translate(&[1.0]).unwrap();
        assert_eq!(moved, comb);
        let lat = SymbolicComb::lattice(z(), one()).translate(&[3.0]).unwrap();
        assert_eq!(lat, comb);
    }

    #[test]
    fn translate_commutes_with_materialize() {
        let comb = SymbolicComb::cryst(
            z(),
            vec![
                Coset { translate: vec![0.1], poly: TrigPoly::new(vec![(vec![0.25], one()), (vec![0.0], 2.0 * one())]) },
                Coset { translate: vec![0.6], poly: TrigPoly::new(vec![(vec![0.5], Complex64::new(0.0, 1.0))]) },
            ],
        )
        .unwrap();
        let t = [0.37];
        let region = RegionBox::new(vec![-5.0], vec![5.0]).unwrap();
        let a = comb.translate(&t).unwrap().materialize(&region).unwrap();
        let b = comb.materialize(&region.translated(&[-0.37])).unwrap().translate(&t);
        assert_eq!(a.len(), b.len());
        for (p, q) in a.points().iter().zip(b.points()) {
            assert!((p.position[0] - q.position[0]).abs() < 1e-10);
            assert!((p.weight - q.weight).norm() < 1e-10);
        }
    }

    #[test]
    fn reflect_conjugate_matches_patch_operation() {
        let comb = SymbolicComb::cryst(
            z(),
            vec![Coset { translate: vec![0.3], poly: TrigPoly::new(vec![(vec![0.2], Complex64::new(1.0, 2.0))]) }],
        )
        .unwrap();
        let region = RegionBox::centered(1, 6.0).unwrap();
        let a = comb.reflect_conjugate().unwrap().materialize(&region).unwrap();
        let b = comb.materialize(&region).unwrap().reflect_conjugate();
        assert_eq!(a.len(), b.len());
        for (p, q) in a.points().iter().zip(b.points()) {
            assert!((p.position[0] - q.position[0]).abs() < 1e-10);
            assert!((p.weight - q.weight).norm() < 1e-10);
        }
    }

    #[test]
    fn lattice_transform_is_psf() {
        let t = SymbolicComb::lattice(EuclideanLattice::scaled_integer(1, 2.0).unwrap(), one()).fourier_transform().unwrap();
        match t {
            SymbolicComb::Lattice { lattice, amplitude } => {
                assert!((lattice.basis()[(0, 0)] - 0.5).abs() < 1e-15);
                assert!((amplitude.re - 0.5).abs() < 1e-15);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn modulation_shifts_spectrum() {
        let comb = SymbolicComb::cryst(
            z(),
            vec![Coset { translate: vec![0.0], poly: TrigPoly::new(vec![(vec![0.25], one())]) }],
        )
        .unwrap();
        let SymbolicComb::Cryst(t) = comb.fourier_transform().unwrap() else { panic!() };
        assert_eq!(t.cosets().len(), 1);
        assert!((t.cosets()[0].translate[0] - 0.25).abs() < 1e-15);
        assert!((t.mass_at(&[1.25]) - one()).norm() < 1e-12);
        assert!(t.mass_at(&[0.5]).norm() < 1e-12);
    }

    #[test]
    fn autocorrelation_weight_of_interval_is_tent() {
        let phi = golden_ratio();
        let m = ModelComb::new(
            CutProjectScheme::fibonacci(),
            WeightFunction::indicator(Window::interval(-1.0, phi - 1.0).unwrap()),
        )
        .unwrap();
        let g = m.autocorrelation_at(&[0, 0]).unwrap();
        assert!((g.re - phi / 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn finite_autocorrelation_table() {
        let m = ModelComb::new(
            CutProjectScheme::finite(
                EuclideanLattice::scaled_integer(1, 1.0).unwrap(),
                crate::group::GroupDescriptor::finite(vec![2]).unwrap(),
                vec![vec![1]],
            )
            .unwrap(),
            WeightFunction::indicator(Window::subset(vec![2], vec![vec![0]]).unwrap()),
        )
        .unwrap();
        // 2Z: γ = (1/2) δ_{2Z}
        assert!((m.autocorrelation_at(&[0]).unwrap().re - 0.5).abs() < 1e-15);
        assert!(m.autocorrelation_at(&[1]).unwrap().norm() < 1e-15);
        assert!((m.autocorrelation_at(&[2]).unwrap().re - 0.5).abs() < 1e-15);
    }
}
