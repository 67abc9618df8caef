//! Weight functions on the internal group and their closed-form transforms.
//!
//! The transform convention is `ȟ(y) = ∫ e^{2πi y·u} h(u) du` with the Haar measure of
//! the internal group (normalised or counting on finite groups).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{unit_phase, FiniteHaar, GroupDescriptor, GroupElement, RegionBox};

use super::window::Window;

/// Values below this modulus count as zero when deciding whether a point carries mass.
pub const ZERO_WEIGHT: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightFunction {
    Indicator { window: Window },
    /// `1_[lo,hi) ⋆ 1̃_[lo,hi)`, i.e. `max(0, (hi - lo) - |y|)`.
    Tent { lo: f64, hi: f64 },
    /// One value per group element, residues in row-major order (last factor fastest).
    FiniteTable {
        orders: Vec<u64>,
        haar: FiniteHaar,
        values: Vec<Complex64>,
    },
    Combination { terms: Vec<(Complex64, WeightFunction)> },
    /// The transform `ȟ` of the inner function, evaluated in closed form.
    Transform { inner: Box<WeightFunction> },
    /// `y ↦ h(±y)`, optionally conjugated.
    Mapped {
        inner: Box<WeightFunction>,
        reflect: bool,
        conjugate: bool,
    },
}

/// Extent of `{y : h(y) ≠ 0}`.
#[derive(Debug, Clone, PartialEq)]
pub enum SupportExtent {
    /// Finite internal group; every element is a candidate.
    Finite,
    Bounded(RegionBox),
    Unbounded,
}

impl WeightFunction {
    pub fn indicator(window: Window) -> Self {
        WeightFunction::Indicator { window }
    }

    pub fn tent(lo: f64, hi: f64) -> Result<Self> {
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Construction(format!("tent needs a bounded interval, got [{lo}, {hi})")));
        }
        Ok(WeightFunction::Tent { lo, hi })
    }

    pub fn table(orders: Vec<u64>, haar: FiniteHaar, values: Vec<Complex64>) -> Result<Self> {
        let n: u64 = orders.iter().product();
        if values.len() as u64 != n {
            return Err(Error::Shape(format!("table has {} values for a group of order {n}", values.len())));
        }
        Ok(WeightFunction::FiniteTable { orders, haar, values })
    }

    /// `y ↦ conj(h(-y))`.
    pub fn reflect_conjugate(&self) -> Self {
        match self {
            WeightFunction::Mapped { inner, reflect, conjugate } => WeightFunction::Mapped {
                inner: inner.clone(),
                reflect: !reflect,
                conjugate: !conjugate,
            },
            other => WeightFunction::Mapped {
                inner: Box::new(other.clone()),
                reflect: true,
                conjugate: true,
            },
        }
    }

    pub fn evaluate(&self, y: &GroupElement) -> Complex64 {
        match self {
            WeightFunction::Indicator { window } => {
                if window.contains(y) {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            WeightFunction::Tent { lo, hi } => Complex64::new((hi - lo - y.real[0].abs()).max(0.0), 0.0),
            WeightFunction::FiniteTable { orders, values, .. } => values[table_index(orders, &y.finite)],
            WeightFunction::Combination { terms } => terms.iter().map(|(c, h)| c * h.evaluate(y)).sum(),
            WeightFunction::Transform { inner } => inner.transform_at(y),
            WeightFunction::Mapped { inner, reflect, conjugate } => {
                let v = if *reflect {
                    inner.evaluate(&negate(y, inner.finite_orders()))
                } else {
                    inner.evaluate(y)
                };
                if *conjugate {
                    v.conj()
                } else {
                    v
                }
            }
        }
    }

    /// `ȟ(y)` evaluated directly.
    pub fn transform_at(&self, y: &GroupElement) -> Complex64 {
        match self {
            WeightFunction::Indicator { window } => match window {
                Window::Interval { lo, hi } => interval_transform(*lo, *hi, y.real[0]),
                Window::Boxes { boxes } => boxes
                    .iter()
                    .map(|b| {
                        (0..b.dim())
                            .map(|i| interval_transform(b.lo[i], b.hi[i], y.real[i]))
                            .product::<Complex64>()
                    })
                    .sum(),
                Window::Subset { orders, members } => {
                    let mass = 1.0 / orders.iter().product::<u64>() as f64;
                    members.iter().map(|t| unit_phase(finite_turns(orders, &y.finite, t))).sum::<Complex64>() * mass
                }
            },
            WeightFunction::Tent { lo, hi } => {
                let v = interval_transform(*lo, *hi, y.real[0]).norm_sqr();
                Complex64::new(v, 0.0)
            }
            WeightFunction::FiniteTable { orders, haar, values } => {
                let order = values.len() as f64;
                let mass = match haar {
                    FiniteHaar::Normalized => 1.0 / order,
                    FiniteHaar::Counting => 1.0,
                };
                let mut acc = Complex64::new(0.0, 0.0);
                for (idx, v) in values.iter().enumerate() {
                    let t = table_element(orders, idx);
                    acc += v * unit_phase(finite_turns(orders, &y.finite, &t));
                }
                acc * mass
            }
            WeightFunction::Combination { terms } => terms.iter().map(|(c, h)| c * h.transform_at(y)).sum(),
            WeightFunction::Transform { .. } => Complex64::new(f64::NAN, f64::NAN),
            WeightFunction::Mapped { .. } => match self.transform() {
                Ok(t) => t.evaluate(y),
                Err(_) => Complex64::new(f64::NAN, f64::NAN),
            },
        }
    }

    /// The closed-form transform `ȟ` as a weight function on the dual internal group.
    pub fn transform(&self) -> Result<WeightFunction> {
        match self {
            WeightFunction::Indicator { window: Window::Subset { orders, .. } } => {
                let n = orders.iter().product::<u64>() as usize;
                let values = (0..n).map(|i| self.transform_at(&finite_element(orders, i))).collect();
                Ok(WeightFunction::FiniteTable {
                    orders: orders.clone(),
                    haar: FiniteHaar::Counting,
                    values,
                })
            }
            WeightFunction::Indicator { .. } | WeightFunction::Tent { .. } => Ok(WeightFunction::Transform {
                inner: Box::new(self.clone()),
            }),
            WeightFunction::FiniteTable { orders, haar, values } => {
                let values = (0..values.len())
                    .map(|i| self.transform_at(&finite_element(orders, i)))
                    .collect();
                Ok(WeightFunction::FiniteTable {
                    orders: orders.clone(),
                    haar: haar.dual(),
                    values,
                })
            }
            WeightFunction::Combination { terms } => Ok(WeightFunction::Combination {
                terms: terms
                    .iter()
                    .map(|(c, h)| Ok((*c, h.transform()?)))
                    .collect::<Result<Vec<_>>>()?,
            }),
            WeightFunction::Transform { .. } => Err(Error::UnsupportedTransform(
                "the transform of a transformed weight has no closed form here".into(),
            )),
            // reflection: ȟ(-ξ); conjugation: conj(ȟ(-ξ)); both: conj(ȟ(ξ))
            WeightFunction::Mapped { inner, reflect, conjugate } => Ok(WeightFunction::Mapped {
                inner: Box::new(inner.transform()?),
                reflect: reflect ^ conjugate,
                conjugate: *conjugate,
            }),
        }
    }

    pub fn support_extent(&self) -> SupportExtent {
        match self {
            WeightFunction::Indicator { window } => match window.bounding_box() {
                Some(b) => SupportExtent::Bounded(b),
                None => SupportExtent::Finite,
            },
            WeightFunction::Tent { lo, hi } => {
                let w = hi - lo;
                SupportExtent::Bounded(RegionBox { lo: vec![-w], hi: vec![w], finite: Default::default() })
            }
            WeightFunction::FiniteTable { .. } => SupportExtent::Finite,
            WeightFunction::Combination { terms } => {
                let mut acc: Option<RegionBox> = None;
                for (_, h) in terms {
                    match h.support_extent() {
                        SupportExtent::Finite => return SupportExtent::Finite,
                        SupportExtent::Unbounded => return SupportExtent::Unbounded,
                        SupportExtent::Bounded(b) => {
                            acc = Some(match acc {
                                None => b,
                                Some(a) => RegionBox {
                                    lo: a.lo.iter().zip(&b.lo).map(|(x, y)| x.min(*y)).collect(),
                                    hi: a.hi.iter().zip(&b.hi).map(|(x, y)| x.max(*y)).collect(),
                                    finite: Default::default(),
                                },
                            })
                        }
                    }
                }
                acc.map(SupportExtent::Bounded).unwrap_or(SupportExtent::Unbounded)
            }
            WeightFunction::Transform { inner } => match inner.support_extent() {
                SupportExtent::Finite => SupportExtent::Finite,
                _ => SupportExtent::Unbounded,
            },
            WeightFunction::Mapped { inner, reflect, .. } => match inner.support_extent() {
                SupportExtent::Bounded(b) if *reflect => SupportExtent::Bounded(b.reflected()),
                other => other,
            },
        }
    }

    /// Sup-norm radius beyond which `|ȟ| ≤ delta` is guaranteed; `Some(0)` on finite
    /// groups, `None` when no bound is available.
    pub fn transform_tail_radius(&self, delta: f64) -> Option<f64> {
        match self {
            WeightFunction::Indicator { window } => match window {
                Window::Interval { .. } => Some(1.0 / (PI * delta)),
                Window::Boxes { boxes } => {
                    let p: f64 = boxes
                        .iter()
                        .map(|b| {
                            let sides: Vec<f64> = (0..b.dim()).map(|i| b.side(i)).collect();
                            let total: f64 = sides.iter().product();
                            sides.iter().map(|s| total / s).fold(0.0, f64::max)
                        })
                        .sum();
                    Some(p / (PI * delta))
                }
                Window::Subset { .. } => Some(0.0),
            },
            WeightFunction::Tent { .. } => Some(1.0 / (PI * delta.sqrt())),
            WeightFunction::FiniteTable { .. } => Some(0.0),
            WeightFunction::Combination { terms } => {
                let total: f64 = terms.iter().map(|(c, _)| c.norm()).sum();
                if total == 0.0 {
                    return Some(0.0);
                }
                terms
                    .iter()
                    .map(|(_, h)| h.transform_tail_radius(delta / total))
                    .try_fold(0.0f64, |m, r| r.map(|r| m.max(r)))
            }
            WeightFunction::Transform { .. } => None,
            WeightFunction::Mapped { inner, .. } => inner.transform_tail_radius(delta),
        }
    }

    /// Sup-norm radius beyond which `|h| ≤ delta`; used to truncate weights with
    /// unbounded support.
    pub fn tail_radius(&self, delta: f64) -> Option<f64> {
        match self.support_extent() {
            SupportExtent::Finite => Some(0.0),
            SupportExtent::Bounded(b) => Some(b.radius()),
            SupportExtent::Unbounded => match self {
                WeightFunction::Transform { inner } => inner.transform_tail_radius(delta),
                WeightFunction::Mapped { inner, .. } => inner.tail_radius(delta),
                WeightFunction::Combination { terms } => {
                    let total: f64 = terms.iter().map(|(c, _)| c.norm()).sum::<f64>().max(1e-300);
                    terms
                        .iter()
                        .map(|(_, h)| h.tail_radius(delta / total))
                        .try_fold(0.0f64, |m, r| r.map(|r| m.max(r)))
                }
                _ => None,
            },
        }
    }

    fn finite_orders(&self) -> &[u64] {
        match self {
            WeightFunction::FiniteTable { orders, .. } => orders,
            WeightFunction::Indicator { window: Window::Subset { orders, .. } } => orders,
            WeightFunction::Combination { terms } => terms.first().map(|(_, h)| h.finite_orders()).unwrap_or(&[]),
            WeightFunction::Transform { inner } | WeightFunction::Mapped { inner, .. } => inner.finite_orders(),
            _ => &[],
        }
    }

    /// Checks that the weight lives on `internal`.
    pub fn check_against(&self, internal: &GroupDescriptor) -> Result<()> {
        match self {
            WeightFunction::Indicator { window } => window.check_against(internal),
            WeightFunction::Tent { .. } => {
                if internal.is_euclidean() && internal.euclidean_dim == 1 {
                    Ok(())
                } else {
                    Err(Error::Shape(format!("tent weights need internal R^1, got {internal}")))
                }
            }
            WeightFunction::FiniteTable { orders, haar, .. } => {
                if internal.is_finite() && *orders == internal.cyclic_orders && *haar == internal.finite_haar {
                    Ok(())
                } else {
                    Err(Error::Shape(format!("table weight does not live in {internal}")))
                }
            }
            WeightFunction::Combination { terms } => terms.iter().try_for_each(|(_, h)| h.check_against(internal)),
            WeightFunction::Transform { inner } => inner.check_against(&internal.dual()),
            WeightFunction::Mapped { inner, .. } => inner.check_against(internal),
        }
    }
}

/// `∫_[a,b) e^{2πi y u} du = e^{πi y (a+b)} sin(π y (b-a)) / (π y)`.
pub fn interval_transform(a: f64, b: f64, y: f64) -> Complex64 {
    let w = b - a;
    let x = PI * y * w;
    let sinc = if x.abs() < 1e-8 { w * (1.0 - x * x / 6.0) } else { (PI * y * w).sin() / (PI * y) };
    unit_phase(0.5 * y * (a + b)) * sinc
}

fn finite_turns(orders: &[u64], b: &[u64], t: &[u64]) -> f64 {
    orders
        .iter()
        .zip(b.iter().zip(t))
        .map(|(&q, (&bi, &ti))| ((bi as u128 * ti as u128) % q as u128) as f64 / q as f64)
        .sum()
}

fn negate(y: &GroupElement, orders: &[u64]) -> GroupElement {
    GroupElement {
        real: y.real.iter().map(|v| -v).collect(),
        finite: y.finite.iter().zip(orders).map(|(t, q)| (q - t) % q).collect(),
    }
}

pub(crate) fn table_index(orders: &[u64], t: &[u64]) -> usize {
    let mut idx = 0usize;
    for (q, ti) in orders.iter().zip(t) {
        idx = idx * (*q as usize) + *ti as usize;
    }
    idx
}

pub(crate) fn table_element(orders: &[u64], mut idx: usize) -> Vec<u64> {
    let mut t = vec![0u64; orders.len()];
    for (slot, q) in t.iter_mut().zip(orders).rev() {
        *slot = (idx % *q as usize) as u64;
        idx /= *q as usize;
    }
    t
}

pub(crate) fn finite_element(orders: &[u64], idx: usize) -> GroupElement {
    GroupElement { real: Vec::new(), finite: table_element(orders, idx) }
}
