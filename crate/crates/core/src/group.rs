//! The concrete abelian groups used throughout the crate: `R^d × Z_{q_1} × … × Z_{q_m}`.
//!
//! Haar measure is Lebesgue measure on the Euclidean factor. On the finite factor it is
//! either normalised (total mass one) or counting measure; the two conventions are dual
//! to each other, so [`GroupDescriptor::dual`] swaps them and the inversion formula keeps
//! its plain form on both sides.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Haar normalisation of the finite factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FiniteHaar {
    /// Total mass one (counting measure divided by the group order).
    Normalized,
    /// Counting measure.
    Counting,
}

impl FiniteHaar {
    pub fn dual(self) -> Self {
        match self {
            FiniteHaar::Normalized => FiniteHaar::Counting,
            FiniteHaar::Counting => FiniteHaar::Normalized,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupDescriptor {
    pub euclidean_dim: usize,
    pub cyclic_orders: Vec<u64>,
    pub finite_haar: FiniteHaar,
}

impl GroupDescriptor {
    pub fn new(euclidean_dim: usize, cyclic_orders: Vec<u64>) -> Result<Self> {
        if let Some(q) = cyclic_orders.iter().find(|&&q| q < 2) {
            return Err(Error::Construction(format!("cyclic order {q} must be at least 2")));
        }
        Ok(GroupDescriptor {
            euclidean_dim,
            cyclic_orders,
            finite_haar: FiniteHaar::Normalized,
        })
    }

    /// `R^d`.
    pub fn euclidean(d: usize) -> Self {
        GroupDescriptor {
            euclidean_dim: d,
            cyclic_orders: Vec::new(),
            finite_haar: FiniteHaar::Normalized,
        }
    }

    pub fn finite(orders: Vec<u64>) -> Result<Self> {
        Self::new(0, orders)
    }

    pub fn with_haar(mut self, haar: FiniteHaar) -> Self {
        self.finite_haar = haar;
        self
    }

    pub fn is_trivial(&self) -> bool {
        self.euclidean_dim == 0 && self.cyclic_orders.is_empty()
    }

    pub fn is_euclidean(&self) -> bool {
        self.cyclic_orders.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.euclidean_dim == 0
    }

    pub fn finite_order(&self) -> u64 {
        self.cyclic_orders.iter().product()
    }

    /// Total Haar mass of the finite factor.
    pub fn finite_mass(&self) -> f64 {
        match self.finite_haar {
            FiniteHaar::Normalized => 1.0,
            FiniteHaar::Counting => self.finite_order() as f64,
        }
    }

    /// Haar mass of a single point of the finite factor.
    pub fn point_mass(&self) -> f64 {
        self.finite_mass() / self.finite_order() as f64
    }

    /// Pontryagin dual. The shape is self-dual; the finite Haar convention flips.
    pub fn dual(&self) -> GroupDescriptor {
        GroupDescriptor {
            euclidean_dim: self.euclidean_dim,
            cyclic_orders: self.cyclic_orders.clone(),
            finite_haar: self.finite_haar.dual(),
        }
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            real: vec![0.0; self.euclidean_dim],
            finite: vec![0; self.cyclic_orders.len()],
        }
    }

    pub fn check(&self, x: &GroupElement) -> Result<()> {
        if x.real.len() != self.euclidean_dim || x.finite.len() != self.cyclic_orders.len() {
            return Err(Error::Shape(format!(
                "element has shape ({}, {}) but group is R^{} x {} cyclic factors",
                x.real.len(),
                x.finite.len(),
                self.euclidean_dim,
                self.cyclic_orders.len()
            )));
        }
        if let Some((t, q)) = x.finite.iter().zip(&self.cyclic_orders).find(|(t, q)| t >= q) {
            return Err(Error::Shape(format!("residue {t} not reduced modulo {q}")));
        }
        Ok(())
    }

    /// Builds an element, reducing residues.
    pub fn element(&self, real: Vec<f64>, finite: Vec<i64>) -> Result<GroupElement> {
        if finite.len() != self.cyclic_orders.len() || real.len() != self.euclidean_dim {
            return Err(Error::Shape("element does not match group".into()));
        }
        let finite = finite
            .iter()
            .zip(&self.cyclic_orders)
            .map(|(&t, &q)| t.rem_euclid(q as i64) as u64)
            .collect();
        Ok(GroupElement { real, finite })
    }

    pub fn add(&self, x: &GroupElement, y: &GroupElement) -> GroupElement {
        GroupElement {
            real: x.real.iter().zip(&y.real).map(|(a, b)| a + b).collect(),
            finite: x
                .finite
                .iter()
                .zip(&y.finite)
                .zip(&self.cyclic_orders)
                .map(|((a, b), q)| (a + b) % q)
                .collect(),
        }
    }

    pub fn neg(&self, x: &GroupElement) -> GroupElement {
        GroupElement {
            real: x.real.iter().map(|a| -a).collect(),
            finite: x
                .finite
                .iter()
                .zip(&self.cyclic_orders)
                .map(|(a, q)| (q - a) % q)
                .collect(),
        }
    }

    /// `χ(x) = exp(2πi (k·x + Σ b_i t_i / q_i))`, with `self` the group `x` lives in.
    pub fn pair(&self, chi: &Character, x: &GroupElement) -> Result<Complex64> {
        self.check(x)?;
        if chi.freq.len() != self.euclidean_dim || chi.finite.len() != self.cyclic_orders.len() {
            return Err(Error::Shape("character does not belong to the dual group".into()));
        }
        Ok(unit_phase(self.pairing_turns(chi, x)))
    }

    /// The pairing phase in turns, reduced to `[0, 1)`.
    pub fn pairing_turns(&self, chi: &Character, x: &GroupElement) -> f64 {
        let real = dot_turns(&chi.freq, &x.real);
        let finite: f64 = chi
            .finite
            .iter()
            .zip(&x.finite)
            .zip(&self.cyclic_orders)
            .map(|((&b, &t), &q)| ((b as u128 * t as u128) % q as u128) as f64 / q as f64)
            .sum();
        reduce_turns(real + finite)
    }
}

impl std::fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        if self.euclidean_dim > 0 {
            parts.push(format!("R^{}", self.euclidean_dim));
        }
        parts.extend(self.cyclic_orders.iter().map(|q| format!("Z_{q}")));
        if parts.is_empty() {
            write!(f, "{{0}}")
        } else {
            write!(f, "{}", parts.join(" x "))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GroupElement {
    pub real: Vec<f64>,
    pub finite: Vec<u64>,
}

impl GroupElement {
    pub fn real(real: Vec<f64>) -> Self {
        GroupElement { real, finite: Vec::new() }
    }
}

/// A character of `R^d × ∏ Z_q`, written additively: frequency `k ∈ R^d` and residues `b_i`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Character {
    pub freq: Vec<f64>,
    pub finite: Vec<u64>,
}

impl Character {
    pub fn real(freq: Vec<f64>) -> Self {
        Character { freq, finite: Vec::new() }
    }

    /// Characters and elements have the same shape; this reinterprets one as the other.
    pub fn as_element(&self) -> GroupElement {
        GroupElement {
            real: self.freq.clone(),
            finite: self.finite.clone(),
        }
    }

    pub fn from_element(x: &GroupElement) -> Self {
        Character {
            freq: x.real.clone(),
            finite: x.finite.clone(),
        }
    }
}

/// Which part of the finite factor a region covers.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub enum FiniteSubset {
    #[default]
    All,
    Elements(Vec<Vec<u64>>),
}

/// Axis-aligned closed box in the Euclidean factor times a subset of the finite factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    #[serde(default)]
    pub finite: FiniteSubset,
}

impl RegionBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        let b = RegionBox { lo, hi, finite: FiniteSubset::All };
        b.validate()?;
        Ok(b)
    }

    /// `[-r, r]^d`.
    pub fn centered(d: usize, r: f64) -> Result<Self> {
        Self::new(vec![-r; d], vec![r; d])
    }

    pub fn validate(&self) -> Result<()> {
        if self.lo.len() != self.hi.len() {
            return Err(Error::Shape("box corners differ in dimension".into()));
        }
        for (i, (a, b)) in self.lo.iter().zip(&self.hi).enumerate() {
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::Domain(format!("box is unbounded along axis {i}")));
            }
            if b < a {
                return Err(Error::Domain(format!("box has negative side along axis {i}: [{a}, {b}]")));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn side(&self, i: usize) -> f64 {
        self.hi[i] - self.lo[i]
    }

    pub fn min_side(&self) -> f64 {
        (0..self.dim()).map(|i| self.side(i)).fold(f64::INFINITY, f64::min)
    }

    /// Lebesgue volume of the real part.
    pub fn volume(&self) -> f64 {
        (0..self.dim()).map(|i| self.side(i)).product()
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (a, b))| *v >= a - tol && *v <= b + tol)
    }

    pub fn contains_box(&self, other: &RegionBox, tol: f64) -> bool {
        other
            .lo
            .iter()
            .zip(&other.hi)
            .zip(self.lo.iter().zip(&self.hi))
            .all(|((oa, ob), (a, b))| *oa >= a - tol && *ob <= b + tol)
    }

    pub fn translated(&self, t: &[f64]) -> RegionBox {
        RegionBox {
            lo: self.lo.iter().zip(t).map(|(a, s)| a + s).collect(),
            hi: self.hi.iter().zip(t).map(|(a, s)| a + s).collect(),
            finite: self.finite.clone(),
        }
    }

    pub fn reflected(&self) -> RegionBox {
        RegionBox {
            lo: self.hi.iter().map(|v| -v).collect(),
            hi: self.lo.iter().map(|v| -v).collect(),
            finite: self.finite.clone(),
        }
    }

    /// Shrinks every side by `margin` on both ends; `None` if nothing is left.
    pub fn shrunk(&self, margin: f64) -> Option<RegionBox> {
        let lo: Vec<f64> = self.lo.iter().map(|a| a + margin).collect();
        let hi: Vec<f64> = self.hi.iter().map(|b| b - margin).collect();
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return None;
        }
        Some(RegionBox { lo, hi, finite: self.finite.clone() })
    }

    pub fn intersect(&self, other: &RegionBox) -> Option<RegionBox> {
        let lo: Vec<f64> = self.lo.iter().zip(&other.lo).map(|(a, b)| a.max(*b)).collect();
        let hi: Vec<f64> = self.hi.iter().zip(&other.hi).map(|(a, b)| a.min(*b)).collect();
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return None;
        }
        Some(RegionBox { lo, hi, finite: self.finite.clone() })
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(a, b)| 0.5 * (a + b)).collect()
    }

    /// Largest half-width over all axes, measured from the origin.
    pub fn radius(&self) -> f64 {
        self.lo
            .iter()
            .chain(&self.hi)
            .map(|v| v.abs())
            .fold(0.0, f64::max)
    }
}

/// Haar volume of `real box × finite subset`.
pub fn haar_volume(g: &GroupDescriptor, region: &RegionBox) -> Result<f64> {
    region.validate()?;
    if region.dim() != g.euclidean_dim {
        return Err(Error::Shape(format!(
            "box of dimension {} in a group with Euclidean dimension {}",
            region.dim(),
            g.euclidean_dim
        )));
    }
    let finite = match &region.finite {
        FiniteSubset::All => g.finite_mass(),
        FiniteSubset::Elements(elems) => {
            let mut seen: Vec<&Vec<u64>> = Vec::with_capacity(elems.len());
            for e in elems {
                if e.len() != g.cyclic_orders.len() || e.iter().zip(&g.cyclic_orders).any(|(t, q)| t >= q) {
                    return Err(Error::Shape(format!("{e:?} is not an element of the finite factor")));
                }
                if !seen.contains(&e) {
                    seen.push(e);
                }
            }
            seen.len() as f64 * g.point_mass()
        }
    };
    Ok(region.volume() * finite)
}

/// Reduces a phase in turns to `[0, 1)`.
#[inline]
pub fn reduce_turns(t: f64) -> f64 {
    let r = t - t.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// `exp(2πi t)` computed from the reduced argument.
#[inline]
pub fn unit_phase(turns: f64) -> Complex64 {
    let r = reduce_turns(turns);
    let (s, c) = (std::f64::consts::TAU * r).sin_cos();
    Complex64::new(c, s)
}

/// `k·x` reduced modulo one.
#[inline]
pub fn dot_turns(k: &[f64], x: &[f64]) -> f64 {
    reduce_turns(k.iter().zip(x).map(|(a, b)| a * b).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn dual_shapes() {
        let r1 = GroupDescriptor::euclidean(1);
        assert_eq!(r1.dual().euclidean_dim, 1);
        let z2 = GroupDescriptor::finite(vec![2]).unwrap();
        assert_eq!(z2.dual().cyclic_orders, vec![2]);
        assert_eq!(z2.dual().finite_haar, FiniteHaar::Counting);
        let mixed = GroupDescriptor::new(2, vec![3]).unwrap();
        let d = mixed.dual();
        assert_eq!((d.euclidean_dim, d.cyclic_orders.clone()), (2, vec![3]));
        assert_eq!(d.dual(), mixed);
    }

    #[test]
    fn pairing_examples() {
        let r1 = GroupDescriptor::euclidean(1);
        let v = r1.pair(&Character::real(vec![0.5]), &GroupElement::real(vec![2.0])).unwrap();
        assert!(close(v, Complex64::new(1.0, 0.0), 1e-12));
        let v = r1.pair(&Character::real(vec![0.25]), &GroupElement::real(vec![1.0])).unwrap();
        assert!(close(v, Complex64::new(0.0, 1.0), 1e-12));

        let z2 = GroupDescriptor::finite(vec![2]).unwrap();
        let chi = Character { freq: vec![], finite: vec![1] };
        let x = GroupElement { real: vec![], finite: vec![1] };
        assert!(close(z2.pair(&chi, &x).unwrap(), Complex64::new(-1.0, 0.0), 1e-12));
    }

    #[test]
    fn pairing_shape_error() {
        let r2 = GroupDescriptor::euclidean(2);
        let err = r2.pair(&Character::real(vec![1.0]), &GroupElement::real(vec![1.0, 2.0]));
        assert!(matches!(err, Err(Error::Shape(_))));
    }

    #[test]
    fn pairing_unit_modulus_on_large_arguments() {
        let g = GroupDescriptor::new(1, vec![7]).unwrap();
        let chi = Character { freq: vec![0.618034], finite: vec![3] };
        let x = GroupElement { real: vec![123456.789], finite: vec![5] };
        assert!((g.pair(&chi, &x).unwrap().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn haar_volume_examples() {
        let r1 = GroupDescriptor::euclidean(1);
        assert_eq!(haar_volume(&r1, &RegionBox::centered(1, 7.0).unwrap()).unwrap(), 14.0);

        let z4 = GroupDescriptor::finite(vec![4]).unwrap();
        let pt = RegionBox {
            lo: vec![],
            hi: vec![],
            finite: FiniteSubset::Elements(vec![vec![0]]),
        };
        assert_eq!(haar_volume(&z4, &pt).unwrap(), 0.25);

        let r2 = GroupDescriptor::euclidean(2);
        let b = RegionBox::new(vec![0.0, 0.0], vec![1.0, 2.0]).unwrap();
        assert_eq!(haar_volume(&r2, &b).unwrap(), 2.0);
    }

    #[test]
    fn haar_volume_rejects_negative_side() {
        let r1 = GroupDescriptor::euclidean(1);
        let b = RegionBox { lo: vec![1.0], hi: vec![0.0], finite: FiniteSubset::All };
        assert!(matches!(haar_volume(&r1, &b), Err(Error::Domain(_))));
    }

    #[test]
    fn counting_haar_on_dual() {
        let z4 = GroupDescriptor::finite(vec![4]).unwrap().dual();
        let pt = RegionBox {
            lo: vec![],
            hi: vec![],
            finite: FiniteSubset::Elements(vec![vec![1], vec![3]]),
        };
        assert_eq!(haar_volume(&z4, &pt).unwrap(), 2.0);
    }
}
