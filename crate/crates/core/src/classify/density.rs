use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::RegionBox;
use crate::harmonic::VanHoveSpec;
use crate::measure::patch::{lex_cmp, GridIndex, REGION_TOL};
use crate::measure::PointMeasurePatch;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityEntry {
    pub n: usize,
    /// `card(Λ ∩ A_n) / vol(A_n)`.
    pub udens: f64,
    /// `max_x card(Λ ∩ (x + A_n)) / vol(A_n)` over the swept translates.
    pub uudens: f64,
    pub stride: f64,
    pub translates_checked: usize,
    /// Translate attaining `uudens`.
    pub argmax: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityProfile {
    pub entries: Vec<DensityEntry>,
    /// `"increasing"`, `"decreasing"`, `"constant"` or `"mixed"` for the `uudens` sequence.
    pub uudens_trend: String,
}

/// Counts points of a sorted list inside a closed box.
fn count_in(sorted: &[Vec<f64>], b: &RegionBox) -> usize {
    let lo = sorted.partition_point(|p| p[0] < b.lo[0] - REGION_TOL);
    let hi = sorted.partition_point(|p| p[0] <= b.hi[0] + REGION_TOL);
    sorted[lo..hi.max(lo)].iter().filter(|p| b.contains(p, REGION_TOL)).count()
}

fn sorted_positions(patch: &PointMeasurePatch) -> Vec<Vec<f64>> {
    patch.points().iter().map(|p| p.position.clone()).collect()
}

/// Upper density estimates along the van Hove indices in `n_list`. The sup over
/// translates runs over a grid of stride `min side(A_n) / 8` with `x + A_n` inside the
/// patch region; `x = 0` is always included.
pub fn density_profile(patch: &PointMeasurePatch, vh: &VanHoveSpec, n_list: &[usize]) -> Result<DensityProfile> {
    let pts = sorted_positions(patch);
    let d = patch.dim();
    let mut entries = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let a = vh.check_covered(patch.region(), n)?;
        let vol = vh.volume(n);
        let stride = a.min_side() / 8.0;
        let base = count_in(&pts, &a);
        let mut best = (base, vec![0.0; d]);
        let mut checked = 1usize;
        let ranges: Vec<(f64, usize)> = (0..d)
            .map(|i| {
                let first = patch.region().lo[i] - a.lo[i];
                let last = patch.region().hi[i] - a.hi[i];
                (first, ((last - first) / stride + 1e-9).floor().max(0.0) as usize)
            })
            .collect();
        let mut idx = vec![0usize; d];
        'sweep: loop {
            let x: Vec<f64> = (0..d).map(|i| ranges[i].0 + idx[i] as f64 * stride).collect();
            let c = count_in(&pts, &a.translated(&x));
            checked += 1;
            if c > best.0 {
                best = (c, x);
            }
            let mut axis = 0;
            loop {
                if axis == d {
                    break 'sweep;
                }
                idx[axis] += 1;
                if idx[axis] <= ranges[axis].1 {
                    break;
                }
                idx[axis] = 0;
                axis += 1;
            }
        }
        entries.push(DensityEntry {
            n,
            udens: base as f64 / vol,
            uudens: best.0 as f64 / vol,
            stride,
            translates_checked: checked,
            argmax: best.1,
        });
    }
    let u: Vec<f64> = entries.iter().map(|e| e.uudens).collect();
    let trend = if u.windows(2).all(|w| (w[1] - w[0]).abs() <= 1e-12 * w[0].abs().max(1.0)) {
        "constant"
    } else if u.windows(2).all(|w| w[1] >= w[0]) {
        "increasing"
    } else if u.windows(2).all(|w| w[1] <= w[0]) {
        "decreasing"
    } else {
        "mixed"
    };
    Ok(DensityProfile { entries, uudens_trend: trend.into() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowCounts {
    /// Smallest Euclidean distance between two distinct points (`inf` for fewer than two).
    pub min_separation: f64,
    pub closest_pair: Option<(Vec<f64>, Vec<f64>)>,
    pub max_count: usize,
    /// Lower corner of a translate of `K` attaining `max_count`.
    pub window_origin: Vec<f64>,
    /// Stride of the sliding grid, or `None` when the count is exact (windows anchored
    /// at point coordinates).
    pub stride: Option<f64>,
}

/// Minimal gap (sorted sweep along the first axis) and the maximal number of points in
/// a translate of the closed box `K`. With `stride = None` the maximum is exact: some
/// optimal translate has every lower face touching a point, so only those are tried.
pub fn separation_and_window_counts(points: &[Vec<f64>], k: &RegionBox, stride: Option<f64>) -> Result<WindowCounts> {
    k.validate()?;
    if points.is_empty() {
        return Err(Error::Domain("separation needs at least one point".into()));
    }
    let d = k.dim();
    if points.iter().any(|p| p.len() != d) {
        return Err(Error::Shape("points and K differ in dimension".into()));
    }
    let mut pts: Vec<Vec<f64>> = points.to_vec();
    pts.sort_by(|a, b| lex_cmp(a, b));
    let (min_separation, closest_pair) = min_gap(&pts);
    let widths: Vec<f64> = (0..d).map(|i| k.side(i)).collect();
    let (max_count, lower) = match stride {
        None => {
            let refs: Vec<&[f64]> = pts.iter().map(|p| p.as_slice()).collect();
            anchored_max(&refs, &widths, 0)
        }
        Some(s) => {
            if !(s > 0.0) {
                return Err(Error::Domain(format!("stride must be positive, got {s}")));
            }
            strided_max(&pts, k, s)
        }
    };
    let window_origin = lower.iter().zip(&k.lo).map(|(l, a)| l - a).collect();
    Ok(WindowCounts { min_separation, closest_pair, max_count, window_origin, stride })
}

pub(crate) fn min_gap(sorted: &[Vec<f64>]) -> (f64, Option<(Vec<f64>, Vec<f64>)>) {
    let mut best = f64::INFINITY;
    let mut pair = None;
    for i in 0..sorted.len() {
        for j in i + 1..sorted.len() {
            if sorted[j][0] - sorted[i][0] >= best {
                break;
            }
            let dist = sorted[i].iter().zip(&sorted[j]).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            if dist < best {
                best = dist;
                pair = Some((sorted[i].clone(), sorted[j].clone()));
            }
        }
    }
    (best, pair)
}

/// Returns the count and the lower corner of the best window.
fn anchored_max(pts: &[&[f64]], widths: &[f64], axis: usize) -> (usize, Vec<f64>) {
    let d = widths.len();
    let mut vals: Vec<(f64, usize)> = pts.iter().enumerate().map(|(i, p)| (p[axis], i)).collect();
    vals.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = (0usize, Vec::new());
    let mut end = 0usize;
    for start in 0..vals.len() {
        if start > 0 && vals[start].0 == vals[start - 1].0 {
            continue;
        }
        let lo = vals[start].0;
        let hi = lo + widths[axis];
        end = end.max(start);
        while end < vals.len() && vals[end].0 <= hi + REGION_TOL {
            end += 1;
        }
        if end - start <= best.0 {
            continue;
        }
        if axis + 1 == d {
            best = (end - start, vec![lo]);
        } else {
            let sub: Vec<&[f64]> = vals[start..end].iter().map(|&(_, i)| pts[i]).collect();
            let (c, mut corner) = anchored_max(&sub, widths, axis + 1);
            if c > best.0 {
                corner.insert(0, lo);
                best = (c, corner);
            }
        }
    }
    if best.1.is_empty() {
        best.1 = vec![pts.first().map(|p| p[axis]).unwrap_or(0.0); d - axis];
    }
    best
}

fn strided_max(sorted: &[Vec<f64>], k: &RegionBox, stride: f64) -> (usize, Vec<f64>) {
    let d = k.dim();
    let lo: Vec<f64> = (0..d).map(|i| sorted.iter().map(|p| p[i]).fold(f64::INFINITY, f64::min) - k.side(i)).collect();
    let hi: Vec<f64> = (0..d).map(|i| sorted.iter().map(|p| p[i]).fold(f64::NEG_INFINITY, f64::max)).collect();
    let steps: Vec<usize> = (0..d).map(|i| ((hi[i] - lo[i]) / stride).ceil() as usize).collect();
    let mut best = (0usize, lo.clone());
    let mut idx = vec![0usize; d];
    loop {
        let corner: Vec<f64> = (0..d).map(|i| lo[i] + idx[i] as f64 * stride).collect();
        let b = RegionBox {
            lo: corner.clone(),
            hi: corner.iter().enumerate().map(|(i, c)| c + k.side(i)).collect(),
            finite: Default::default(),
        };
        let c = count_in(sorted, &b);
        if c > best.0 {
            best = (c, corner);
        }
        let mut axis = 0;
        loop {
            if axis == d {
                return best;
            }
            idx[axis] += 1;
            if idx[axis] <= steps[axis] {
                break;
            }
            idx[axis] = 0;
            axis += 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeyerReport {
    pub radius: f64,
    /// `|(Λ - Λ) ∩ [-R, R]^d|`.
    pub difference_count: usize,
    pub min_separation: f64,
    pub closest_pair: Option<(Vec<f64>, Vec<f64>)>,
    pub tolerance: f64,
    /// `min_separation > tolerance`; a statement about radius `R` only.
    pub consistent: bool,
}

pub const DEFAULT_MEYER_TOL: f64 = 1e-3;

/// Uniform discreteness of `D_R = (Λ - Λ) ∩ [-R, R]^d` at this scale.
pub fn flc_meyer_check(patch: &PointMeasurePatch, radius: f64, tol: f64) -> Result<MeyerReport> {
    let half = (0..patch.dim()).map(|i| patch.region().side(i) / 2.0).fold(f64::INFINITY, f64::min);
    if half + REGION_TOL < 2.0 * radius {
        return Err(Error::Coverage(format!(
            "patch half-width {half} is smaller than twice the difference radius {radius}"
        )));
    }
    let diffs = difference_set(patch, &RegionBox::centered(patch.dim(), radius)?);
    let (min_separation, closest_pair) = min_gap(&diffs);
    Ok(MeyerReport {
        radius,
        difference_count: diffs.len(),
        min_separation,
        closest_pair,
        tolerance: tol,
        consistent: min_separation > tol,
    })
}

/// `(Λ - Λ) ∩ b`, duplicates merged, sorted lexicographically.
pub(crate) fn difference_set(patch: &PointMeasurePatch, b: &RegionBox) -> Vec<Vec<f64>> {
    let pts = patch.points();
    let mut out: Vec<Vec<f64>> = Vec::new();
    let mut index = GridIndex::new(patch.dim());
    for x in pts {
        let lo = pts.partition_point(|p| p.position[0] < x.position[0] - b.hi[0] - REGION_TOL);
        let hi = pts.partition_point(|p| p.position[0] <= x.position[0] - b.lo[0] + REGION_TOL);
        for y in &pts[lo..hi.max(lo)] {
            let z: Vec<f64> = x.position.iter().zip(&y.position).map(|(a, c)| a - c).collect();
            if !b.contains(&z, REGION_TOL) {
                continue;
            }
            if index.find(&z, |i| &out[i]).is_none() {
                index.insert(&z, out.len());
                out.push(z);
            }
        }
    }
    out.sort_by(|a, b| lex_cmp(a, b));
    out
}
