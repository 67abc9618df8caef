//! Cut-and-project schemes `(G, H, L)` with `G = R^d` and `H` either `R^n` or a finite
//! abelian group.

pub mod weight;
pub mod window;

use std::collections::HashSet;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{GroupDescriptor, GroupElement, RegionBox};
use crate::lattice::{integer_echelon, EuclideanLattice};
use crate::measure::{PointMeasurePatch, SymbolicComb};

pub use weight::{SupportExtent, WeightFunction};
pub use window::Window;

/// How the lattice `L ⊂ G × H` is given.
#[derive(Debug, Clone, PartialEq)]
pub enum LatticeData {
    /// A full-rank lattice in `R^{d+n}`; the first `d` coordinates are physical.
    Euclidean(EuclideanLattice),
    /// `L = {(x, φ(x)) : x ∈ Γ₀}` with `φ` fixed by the images of the basis vectors of `Γ₀`.
    Finite { base: EuclideanLattice, images: Vec<Vec<u64>> },
}

/// Properties the scheme is assumed to have but which are only checked at a finite scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchemeAssumptions {
    /// Radius (sup norm, in `G × H`) of the box in which injectivity of `π_G` was checked.
    pub injectivity_check_radius: f64,
    /// Largest gap between sorted stars in the unit internal box (internal `R^1`), or the
    /// fraction of empty cells in a coarse grid (internal `R^n`). Heuristic only.
    pub denseness_probe: Option<f64>,
    /// `true` when denseness of `π_H(L)` was verified exactly (finite internal groups).
    pub denseness_exact: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CutProjectScheme {
    physical: GroupDescriptor,
    internal: GroupDescriptor,
    data: LatticeData,
    dens: f64,
    assumptions: SchemeAssumptions,
}

/// One point of `L` together with its projections.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemePoint {
    pub coords: Vec<i64>,
    pub physical: Vec<f64>,
    pub star: GroupElement,
}

/// Default radius of the injectivity check box.
pub const INJECTIVITY_CHECK_RADIUS: f64 = 20.0;

impl CutProjectScheme {
    /// Scheme with `G = R^d`, `H = R^n`, and `lattice` of dimension `d + n`.
    pub fn euclidean(physical_dim: usize, lattice: EuclideanLattice) -> Result<Self> {
        Self::euclidean_checked(physical_dim, lattice, INJECTIVITY_CHECK_RADIUS)
    }

    pub fn euclidean_checked(physical_dim: usize, lattice: EuclideanLattice, check_radius: f64) -> Result<Self> {
        let total = lattice.dim();
        if physical_dim == 0 || physical_dim >= total {
            return Err(Error::Construction(format!(
                "physical dimension {physical_dim} must lie strictly between 0 and the lattice dimension {total}"
            )));
        }
        let n = total - physical_dim;
        let region = RegionBox::centered(total, check_radius)?;
        let mut offender = None;
        lattice.for_each_in_box(&region, |c, p| {
            if offender.is_none()
                && c.iter().any(|&v| v != 0)
                && p[..physical_dim].iter().all(|v| v.abs() < 1e-9)
            {
                offender = Some(c.to_vec());
            }
        });
        if let Some(c) = offender {
            return Err(Error::Construction(format!(
                "projection to the physical space is not injective: lattice point {c:?} projects to 0"
            )));
        }
        let dens = lattice.density();
        let mut cps = CutProjectScheme {
            physical: GroupDescriptor::euclidean(physical_dim),
            internal: GroupDescriptor::euclidean(n),
            data: LatticeData::Euclidean(lattice),
            dens,
            assumptions: SchemeAssumptions {
                injectivity_check_radius: check_radius,
                denseness_probe: None,
                denseness_exact: false,
            },
        };
        cps.assumptions.denseness_probe = Some(cps.denseness_probe(check_radius));
        Ok(cps)
    }

    /// Scheme with `G = R^d` and finite `H = internal`; `images[i]` is the star of the
    /// i-th basis vector of `base`.
    pub fn finite(base: EuclideanLattice, internal: GroupDescriptor, images: Vec<Vec<u64>>) -> Result<Self> {
        if !internal.is_finite() {
            return Err(Error::Construction(format!("internal group {internal} is not finite")));
        }
        if images.len() != base.dim() {
            return Err(Error::Construction(format!(
                "{} star images given for a base lattice of rank {}",
                images.len(),
                base.dim()
            )));
        }
        for a in &images {
            internal.check(&GroupElement { real: vec![], finite: a.clone() }).map_err(|e| {
                Error::Construction(format!("star image {a:?} is not an element of {internal}: {e}"))
            })?;
        }
        if !generates(&internal.cyclic_orders, &images)? {
            return Err(Error::Construction(format!(
                "star images {images:?} do not generate {internal}, so π_H(L) is not dense"
            )));
        }
        let dens = base.density() / internal.finite_mass();
        Ok(CutProjectScheme {
            physical: GroupDescriptor::euclidean(base.dim()),
            internal,
            data: LatticeData::Finite { base, images },
            dens,
            assumptions: SchemeAssumptions {
                injectivity_check_radius: f64::INFINITY,
                denseness_probe: None,
                denseness_exact: true,
            },
        })
    }

    /// The Fibonacci scheme: `L` spanned by `(1, 1)` and `(φ, 1 - φ)`.
    pub fn fibonacci() -> Self {
        let phi = golden_ratio();
        let lattice = EuclideanLattice::from_rows(&[vec![1.0, phi], vec![1.0, 1.0 - phi]])
            .expect("golden lattice is regular");
        Self::euclidean(1, lattice).expect("golden lattice projects injectively")
    }

    pub fn physical(&self) -> &GroupDescriptor {
        &self.physical
    }

    pub fn internal(&self) -> &GroupDescriptor {
        &self.internal
    }

    pub fn data(&self) -> &LatticeData {
        &self.data
    }

    pub fn assumptions(&self) -> &SchemeAssumptions {
        &self.assumptions
    }

    pub fn physical_dim(&self) -> usize {
        self.physical.euclidean_dim
    }

    pub fn rank(&self) -> usize {
        match &self.data {
            LatticeData::Euclidean(l) => l.dim(),
            LatticeData::Finite { base, .. } => base.dim(),
        }
    }

    /// Density of `L`, with Haar measure on `G × H`.
    pub fn dens(&self) -> f64 {
        self.dens
    }

    /// `x⋆` for the lattice point with the given integer coordinates.
    pub fn star(&self, coords: &[i64]) -> GroupElement {
        match &self.data {
            LatticeData::Euclidean(l) => {
                let d = self.physical_dim();
                let b = l.basis();
                let real = (d..l.dim())
                    .map(|i| (0..l.dim()).map(|j| b[(i, j)] * coords[j] as f64).sum())
                    .collect();
                GroupElement::real(real)
            }
            LatticeData::Finite { images, .. } => {
                let orders = &self.internal.cyclic_orders;
                let finite = orders
                    .iter()
                    .enumerate()
                    .map(|(k, &q)| {
                        let s: i128 = coords
                            .iter()
                            .zip(images)
                            .map(|(&c, a)| c as i128 * a[k] as i128)
                            .sum();
                        s.rem_euclid(q as i128) as u64
                    })
                    .collect();
                GroupElement { real: Vec::new(), finite }
            }
        }
    }

    /// `π_G` of the lattice point with the given integer coordinates.
    pub fn physical_position(&self, coords: &[i64]) -> Vec<f64> {
        match &self.data {
            LatticeData::Euclidean(l) => {
                let d = self.physical_dim();
                let b = l.basis();
                (0..d)
                    .map(|i| (0..l.dim()).map(|j| b[(i, j)] * coords[j] as f64).sum())
                    .collect()
            }
            LatticeData::Finite { base, .. } => base.position(coords),
        }
    }

    /// Matrix sending integer coordinates to physical positions (`d × rank`).
    pub fn physical_map(&self) -> DMatrix<f64> {
        match &self.data {
            LatticeData::Euclidean(l) => l.basis().rows(0, self.physical_dim()).into_owned(),
            LatticeData::Finite { base, .. } => base.basis().clone(),
        }
    }

    /// Every lattice point whose physical part lies in `region` and, for Euclidean
    /// internal spaces, whose star lies in `internal_box`.
    pub fn points(&self, region: &RegionBox, internal_box: Option<&RegionBox>) -> Result<Vec<SchemePoint>> {
        region.validate()?;
        if region.dim() != self.physical_dim() {
            return Err(Error::Shape(format!(
                "region of dimension {} for physical space R^{}",
                region.dim(),
                self.physical_dim()
            )));
        }
        let mut out = Vec::new();
        match &self.data {
            LatticeData::Euclidean(l) => {
                let ib = internal_box.ok_or_else(|| {
                    Error::Domain("an internal bounding box is required for Euclidean internal spaces".into())
                })?;
                ib.validate()?;
                let full = RegionBox {
                    lo: region.lo.iter().chain(&ib.lo).copied().collect(),
                    hi: region.hi.iter().chain(&ib.hi).copied().collect(),
                    finite: Default::default(),
                };
                let d = self.physical_dim();
                l.for_each_in_box(&full, |c, p| {
                    out.push(SchemePoint {
                        coords: c.to_vec(),
                        physical: p[..d].to_vec(),
                        star: GroupElement::real(p[d..].to_vec()),
                    })
                });
            }
            LatticeData::Finite { base, .. } => {
                base.for_each_in_box(region, |c, p| {
                    out.push(SchemePoint {
                        coords: c.to_vec(),
                        physical: p.to_vec(),
                        star: self.star(c),
                    })
                });
            }
        }
        Ok(out)
    }

    /// The cut-and-project set `⋏(W) ∩ region` with unit weights.
    pub fn project_points(&self, window: &Window, region: &RegionBox) -> Result<PointMeasurePatch> {
        window.check_against(&self.internal)?;
        SymbolicComb::model(self.clone(), WeightFunction::indicator(window.clone()))?.materialize(region)
    }

    /// `dens(L) · θ_H(W)`.
    pub fn model_set_density(&self, window: &Window) -> Result<f64> {
        window.check_against(&self.internal)?;
        Ok(self.dens * window.measure(&self.internal))
    }

    /// `card(⋏(W) ∩ region) / vol(region)`.
    pub fn density_estimate(&self, window: &Window, region: &RegionBox) -> Result<f64> {
        let patch = self.project_points(window, region)?;
        Ok(patch.len() as f64 / region.volume())
    }

    /// The dual scheme `(Ĝ, Ĥ, L⁰)` with `(k, l) ∈ L⁰` iff `k·x + ⟨l, x⋆⟩ ∈ Z` on `L`.
    pub fn dual(&self) -> Result<CutProjectScheme> {
        match &self.data {
            LatticeData::Euclidean(l) => {
                let mut dual = Self::euclidean_checked(
                    self.physical_dim(),
                    l.dual(),
                    self.assumptions.injectivity_check_radius,
                )?;
                dual.dens = 1.0 / self.dens;
                Ok(dual)
            }
            LatticeData::Finite { base, images } => self.dual_finite(base, images),
        }
    }

    fn dual_finite(&self, base: &EuclideanLattice, images: &[Vec<u64>]) -> Result<CutProjectScheme> {
        let d = base.dim();
        let orders = self.internal.cyclic_orders.clone();
        let modulus = orders.iter().fold(1u64, |acc, &q| lcm(acc, q)) as i64;
        let dual_base = base.dual();
        // Generators of the physical projection of L⁰, in dual-basis coordinates scaled
        // by `modulus`: the dual basis itself (star 0) and, for each cyclic factor j,
        // -Σ_i (a_ij / q_j) v_i⁰ (star e_j).
        let mut gens: Vec<(Vec<i64>, Vec<i64>)> = (0..d)
            .map(|i| {
                let mut v = vec![0i64; d];
                v[i] = modulus;
                (v, vec![0i64; orders.len()])
            })
            .collect();
        for (j, &q) in orders.iter().enumerate() {
            let v = (0..d).map(|i| -(images[i][j] as i64) * (modulus / q as i64)).collect();
            let mut tag = vec![0i64; orders.len()];
            tag[j] = 1;
            gens.push((v, tag));
        }
        let (rows, zero_tags) = integer_echelon(gens, &orders);
        if rows.len() != d {
            return Err(Error::Construction("dual physical lattice is degenerate".into()));
        }
        if zero_tags.iter().any(|t| t.iter().any(|&v| v != 0)) {
            return Err(Error::Construction(
                "star images are inconsistent: the dual star map is not well defined".into(),
            ));
        }
        let columns: Vec<Vec<f64>> = rows
            .iter()
            .map(|(v, _)| {
                let frac: Vec<f64> = v.iter().map(|&x| x as f64 / modulus as f64).collect();
                (0..d)
                    .map(|r| (0..d).map(|c| dual_base.basis()[(r, c)] * frac[c]).sum())
                    .collect()
            })
            .collect();
        let new_base = EuclideanLattice::from_columns(&columns)?;
        let new_images: Vec<Vec<u64>> = rows.iter().map(|(_, t)| t.iter().map(|&v| v as u64).collect()).collect();
        let internal = self.internal.dual();

        // annihilator identity on generators
        for (k_idx, col) in columns.iter().enumerate() {
            for (i, a) in images.iter().enumerate() {
                let v = base.generator(i);
                let mut turns: f64 = col.iter().zip(&v).map(|(x, y)| x * y).sum();
                for (j, &q) in orders.iter().enumerate() {
                    turns += (new_images[k_idx][j] * a[j]) as f64 / q as f64;
                }
                if (turns - turns.round()).abs() > 1e-10 {
                    return Err(Error::Construction(format!(
                        "dual generator {k_idx} does not annihilate base generator {i} (phase {turns})"
                    )));
                }
            }
        }
        let mut dual = Self::finite(new_base, internal, new_images)?;
        dual.dens = 1.0 / self.dens;
        Ok(dual)
    }

    fn denseness_probe(&self, radius: f64) -> f64 {
        let n = self.internal.euclidean_dim;
        let ib = RegionBox::centered(n, 1.0).expect("unit box");
        let region = RegionBox::centered(self.physical_dim(), radius).expect("probe box");
        let Ok(pts) = self.points(&region, Some(&ib)) else {
            return 1.0;
        };
        if n == 1 {
            let mut stars: Vec<f64> = pts.iter().map(|p| p.star.real[0]).collect();
            stars.push(-1.0);
            stars.push(1.0);
            stars.sort_by(f64::total_cmp);
            stars.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
        } else {
            let cells = 8usize;
            let mut hit = HashSet::new();
            for p in &pts {
                let key: Vec<usize> = p
                    .star
                    .real
                    .iter()
                    .map(|v| (((v + 1.0) / 2.0 * cells as f64) as usize).min(cells - 1))
                    .collect();
                hit.insert(key);
            }
            1.0 - hit.len() as f64 / (cells.pow(n as u32)) as f64
        }
    }
}

pub fn golden_ratio() -> f64 {
    (1.0 + 5f64.sqrt()) / 2.0
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Whether `gens` generate `∏ Z_{q_i}`, by closure.
fn generates(orders: &[u64], gens: &[Vec<u64>]) -> Result<bool> {
    let order: u64 = orders.iter().product();
    if order > 1 << 22 {
        return Err(Error::Construction(format!("finite internal group of order {order} is too large")));
    }
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let zero = vec![0u64; orders.len()];
    let mut stack = vec![zero.clone()];
    seen.insert(zero);
    while let Some(x) = stack.pop() {
        for g in gens {
            let y: Vec<u64> = x.iter().zip(g).zip(orders).map(|((a, b), q)| (a + b) % q).collect();
            if seen.insert(y.clone()) {
                stack.push(y);
            }
        }
    }
    Ok(seen.len() as u64 == order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteSubset;

    fn z_mod2() -> CutProjectScheme {
        CutProjectScheme::finite(
            EuclideanLattice::scaled_integer(1, 1.0).unwrap(),
            GroupDescriptor::finite(vec![2]).unwrap(),
            vec![vec![1]],
        )
        .unwrap()
    }

    #[test]
    fn fibonacci_stars() {
        let f = CutProjectScheme::fibonacci();
        assert!((f.star(&[1, 0]).real[0] - 1.0).abs() < 1e-15);
        assert!((f.star(&[0, 1]).real[0] + 0.618_034).abs() < 1e-6);
    }

    #[test]
    fn finite_star_reduces() {
        assert_eq!(z_mod2().star(&[3]).finite, vec![1]);
    }

    #[test]
    fn non_surjective_star_rejected() {
        let err = CutProjectScheme::finite(
            EuclideanLattice::scaled_integer(1, 1.0).unwrap(),
            GroupDescriptor::finite(vec![4]).unwrap(),
            vec![vec![2]],
        );
        assert!(matches!(err, Err(Error::Construction(_))));
    }

    #[test]
    fn rational_lattice_not_injective() {
        let l = EuclideanLattice::scaled_integer(2, 1.0).unwrap();
        assert!(CutProjectScheme::euclidean(1, l).is_err());
    }

    #[test]
    fn kernel_of_mod_two_map() {
        let w = Window::subset(vec![2], vec![vec![0]]).unwrap();
        let p = z_mod2().project_points(&w, &RegionBox::new(vec![0.0], vec![10.0]).unwrap()).unwrap();
        let xs: Vec<f64> = p.points().iter().map(|q| q.position[0]).collect();
        assert_eq!(xs, vec![0.0, 2.0, 4.0, 6.0, 8.0, 10.0]);
    }

    #[test]
    fn fibonacci_gaps_and_ratio() {
        let f = CutProjectScheme::fibonacci();
        let phi = golden_ratio();
        let w = Window::interval(-1.0, phi - 1.0).unwrap();
        let p = f.project_points(&w, &RegionBox::new(vec![0.0], vec![1e4]).unwrap()).unwrap();
        let xs: Vec<f64> = p.points().iter().map(|q| q.position[0]).collect();
        let (mut short, mut long) = (0usize, 0usize);
        for g in xs.windows(2).map(|w| w[1] - w[0]) {
            if (g - 1.0).abs() < 1e-9 {
                short += 1;
            } else if (g - phi).abs() < 1e-9 {
                long += 1;
            } else {
                panic!("unexpected gap {g}");
            }
        }
        let ratio = long as f64 / short as f64;
        assert!((ratio / phi - 1.0).abs() < 0.02, "{ratio}");
    }

    #[test]
    fn full_window_gives_projected_lattice() {
        let f = CutProjectScheme::fibonacci();
        let region = RegionBox::new(vec![0.0], vec![10.0]).unwrap();
        // π_G(L) is dense, so "all of L" means all points whose star lies in a wide window
        let w = Window::interval(-40.0, 40.0).unwrap();
        let p = f.project_points(&w, &region).unwrap();
        let mut brute = Vec::new();
        for m in -60i64..=60 {
            for n in -60i64..=60 {
                let x = f.physical_position(&[m, n])[0];
                let s = f.star(&[m, n]).real[0];
                if (-1e-9..=10.0 + 1e-9).contains(&x) && (-40.0..40.0).contains(&s) {
                    brute.push(x);
                }
            }
        }
        brute.sort_by(f64::total_cmp);
        let xs: Vec<f64> = p.points().iter().map(|q| q.position[0]).collect();
        assert_eq!(xs.len(), brute.len());
        for (a, b) in xs.iter().zip(&brute) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn densities() {
        let phi = golden_ratio();
        let f = CutProjectScheme::fibonacci();
        let w = Window::interval(-1.0, phi - 1.0).unwrap();
        let exact = f.model_set_density(&w).unwrap();
        assert!((exact - 0.723_606_8).abs() < 1e-7);
        let est = f.density_estimate(&w, &RegionBox::new(vec![0.0], vec![1e4]).unwrap()).unwrap();
        assert!((est - exact).abs() < 1e-3);

        let half = z_mod2().model_set_density(&Window::subset(vec![2], vec![vec![0]]).unwrap()).unwrap();
        assert_eq!(half, 0.5);

        let trivial = CutProjectScheme::finite(
            EuclideanLattice::scaled_integer(1, 1.0).unwrap(),
            GroupDescriptor::finite(vec![]).unwrap(),
            vec![vec![]],
        )
        .unwrap();
        let whole = Window::subset(vec![], vec![vec![]]).unwrap();
        assert_eq!(trivial.model_set_density(&whole).unwrap(), 1.0);
    }

    #[test]
    fn dual_of_trivial_scheme_is_itself() {
        let trivial = CutProjectScheme::finite(
            EuclideanLattice::scaled_integer(1, 1.0).unwrap(),
            GroupDescriptor::finite(vec![]).unwrap(),
            vec![vec![]],
        )
        .unwrap();
        let d = trivial.dual().unwrap();
        match d.data() {
            LatticeData::Finite { base, .. } => assert!((base.basis()[(0, 0)].abs() - 1.0).abs() < 1e-15),
            _ => panic!(),
        }
        assert!((d.dens() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dual_of_mod_two_scheme() {
        let d = z_mod2().dual().unwrap();
        assert_eq!(d.internal().finite_haar, crate::group::FiniteHaar::Counting);
        let pts = d.points(&RegionBox::new(vec![-1.0], vec![1.0]).unwrap(), None).unwrap();
        let mut got: Vec<(f64, u64)> = pts.iter().map(|p| (p.physical[0], p.star.finite[0])).collect();
        got.sort_by(|a, b| a.0.total_cmp(&b.0));
        // solve k·1 + b/2 ∈ Z: b = 0 ⇒ k ∈ Z, b = 1 ⇒ k ∈ Z + 1/2
        let expect = [(-1.0, 0), (-0.5, 1), (0.0, 0), (0.5, 1), (1.0, 0)];
        assert_eq!(got.len(), expect.len());
        for ((x, b), (ex, eb)) in got.iter().zip(expect) {
            assert!((x - ex).abs() < 1e-12 && *b == eb, "{got:?}");
        }
        assert!((d.dens() * z_mod2().dens() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fibonacci_dual_annihilates() {
        let f = CutProjectScheme::fibonacci();
        let d = f.dual().unwrap();
        let (LatticeData::Euclidean(a), LatticeData::Euclidean(b)) = (f.data(), d.data()) else { panic!() };
        let prod = b.basis().transpose() * a.basis();
        for v in prod.iter() {
            assert!((v - v.round()).abs() < 1e-10);
        }
        let dd = d.dual().unwrap();
        let LatticeData::Euclidean(c) = dd.data() else { panic!() };
        for (x, y) in c.basis().iter().zip(a.basis().iter()) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn assumptions_recorded() {
        let f = CutProjectScheme::fibonacci();
        let a = f.assumptions();
        assert_eq!(a.injectivity_check_radius, INJECTIVITY_CHECK_RADIUS);
        assert!(a.denseness_probe.unwrap() < 0.2);
        assert!(!a.denseness_exact);
        assert!(z_mod2().assumptions().denseness_exact);
    }

    #[test]
    fn two_factor_dual_is_consistent() {
        let cps = CutProjectScheme::finite(
            EuclideanLattice::scaled_integer(2, 1.0).unwrap(),
            GroupDescriptor::finite(vec![2, 4]).unwrap(),
            vec![vec![1, 0], vec![0, 1]],
        )
        .unwrap();
        let d = cps.dual().unwrap();
        let dd = d.dual().unwrap();
        let region = RegionBox::centered(2, 3.0).unwrap();
        let a = cps.points(&region, None).unwrap();
        let b = dd.points(&region, None).unwrap();
        assert_eq!(a.len(), b.len());
        let mut sa: Vec<(i64, i64, Vec<u64>)> = a
            .iter()
            .map(|p| ((p.physical[0] * 1e6).round() as i64, (p.physical[1] * 1e6).round() as i64, p.star.finite.clone()))
            .collect();
        let mut sb: Vec<(i64, i64, Vec<u64>)> = b
            .iter()
            .map(|p| ((p.physical[0] * 1e6).round() as i64, (p.physical[1] * 1e6).round() as i64, p.star.finite.clone()))
            .collect();
        sa.sort();
        sb.sort();
        assert_eq!(sa, sb);
        let _ = FiniteSubset::All;
    }
}
