use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GroupDescriptor, GroupElement, RegionBox};

/// Tolerance used to snap internal coordinates onto window edges.
pub const EDGE_TOL: f64 = 1e-9;

/// A window in the internal group.
///
/// Euclidean windows are half-open: `[lo, hi)` along every axis. A star within
/// [`EDGE_TOL`] of a lower edge counts as inside, one within it of an upper edge as
/// outside, so stars that land on an edge up to rounding are classified the same way
/// on every run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Window {
    Interval { lo: f64, hi: f64 },
    /// Finite union of pairwise disjoint boxes in `R^n`.
    Boxes { boxes: Vec<RegionBox> },
    /// Subset of a finite group, listed by residues.
    Subset { orders: Vec<u64>, members: Vec<Vec<u64>> },
}

impl Window {
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        let w = Window::Interval { lo, hi };
        w.validate()?;
        Ok(w)
    }

    pub fn boxes(boxes: Vec<RegionBox>) -> Result<Self> {
        let w = Window::Boxes { boxes };
        w.validate()?;
        Ok(w)
    }

    pub fn subset(orders: Vec<u64>, members: Vec<Vec<u64>>) -> Result<Self> {
        let mut members = members;
        members.sort();
        members.dedup();
        let w = Window::Subset { orders, members };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Window::Interval { lo, hi } => {
                if !lo.is_finite() || !hi.is_finite() {
                    return Err(Error::Domain("window interval must be bounded".into()));
                }
                if hi <= lo {
                    return Err(Error::Construction(format!("empty window interval [{lo}, {hi})")));
                }
            }
            Window::Boxes { boxes } => {
                if boxes.is_empty() {
                    return Err(Error::Construction("window needs at least one box".into()));
                }
                let n = boxes[0].dim();
                for b in boxes {
                    b.validate()?;
                    if b.dim() != n {
                        return Err(Error::Shape("window boxes differ in dimension".into()));
                    }
                    if b.volume() <= 0.0 {
                        return Err(Error::Construction("window box has zero volume".into()));
                    }
                }
                for (i, a) in boxes.iter().enumerate() {
                    for b in &boxes[i + 1..] {
                        if let Some(c) = a.intersect(b) {
                            if c.volume() > 0.0 {
                                return Err(Error::Construction("window boxes overlap".into()));
                            }
                        }
                    }
                }
            }
            Window::Subset { orders, members } => {
                if members.is_empty() {
                    return Err(Error::Construction("window subset is empty".into()));
                }
                for m in members {
                    if m.len() != orders.len() || m.iter().zip(orders).any(|(t, q)| t >= q) {
                        return Err(Error::Shape(format!("{m:?} is not an element of the internal group")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Dimension of the Euclidean internal space this window lives in (0 for subsets).
    pub fn euclidean_dim(&self) -> usize {
        match self {
            Window::Interval { .. } => 1,
            Window::Boxes { boxes } => boxes[0].dim(),
            Window::Subset { .. } => 0,
        }
    }

    pub fn contains(&self, y: &GroupElement) -> bool {
        match self {
            Window::Interval { lo, hi } => half_open(y.real[0], *lo, *hi),
            Window::Boxes { boxes } => boxes.iter().any(|b| {
                y.real
                    .iter()
                    .zip(b.lo.iter().zip(&b.hi))
                    .all(|(v, (l, h))| half_open(*v, *l, *h))
            }),
            Window::Subset { members, .. } => members.contains(&y.finite),
        }
    }

    /// Haar measure of the window in `internal`.
    pub fn measure(&self, internal: &GroupDescriptor) -> f64 {
        match self {
            Window::Interval { lo, hi } => hi - lo,
            Window::Boxes { boxes } => boxes.iter().map(RegionBox::volume).sum(),
            Window::Subset { members, .. } => members.len() as f64 * internal.point_mass(),
        }
    }

    pub fn bounding_box(&self) -> Option<RegionBox> {
        match self {
            Window::Interval { lo, hi } => Some(RegionBox::new(vec![*lo], vec![*hi]).ok()?),
            Window::Boxes { boxes } => {
                let n = boxes[0].dim();
                let lo = (0..n).map(|i| boxes.iter().map(|b| b.lo[i]).fold(f64::INFINITY, f64::min)).collect();
                let hi = (0..n).map(|i| boxes.iter().map(|b| b.hi[i]).fold(f64::NEG_INFINITY, f64::max)).collect();
                Some(RegionBox { lo, hi, finite: Default::default() })
            }
            Window::Subset { .. } => None,
        }
    }

    /// Checks that the window fits the internal group of a scheme.
    pub fn check_against(&self, internal: &GroupDescriptor) -> Result<()> {
        match self {
            Window::Subset { orders, .. } => {
                if !internal.is_finite() || *orders != internal.cyclic_orders {
                    return Err(Error::Shape(format!("subset window does not live in {internal}")));
                }
            }
            _ => {
                if !internal.is_euclidean() || internal.euclidean_dim != self.euclidean_dim() {
                    return Err(Error::Shape(format!(
                        "window of dimension {} does not live in {internal}",
                        self.euclidean_dim()
                    )));
                }
            }
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn half_open(v: f64, lo: f64, hi: f64) -> bool {
    v >= lo - EDGE_TOL && v < hi - EDGE_TOL
}
