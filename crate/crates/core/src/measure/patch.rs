use std::cmp::Ordering;
use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::RegionBox;

/// Two points closer than this (sup norm) are the same point.
pub const COINCIDENCE_TOL: f64 = 1e-9;

/// Membership tolerance for regions and averaging boxes.
pub const REGION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct PatchPoint {
    pub position: Vec<f64>,
    pub weight: Complex64,
    /// Integer coordinates under the patch embedding, when there is one.
    pub coords: Option<Vec<i64>>,
}

/// `position = origin + map · coords` for every point of a patch that carries coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub map: DMatrix<f64>,
    pub origin: Vec<f64>,
}

impl Embedding {
    pub fn position(&self, coords: &[i64]) -> Vec<f64> {
        (0..self.map.nrows())
            .map(|i| {
                self.origin[i] + (0..self.map.ncols()).map(|j| self.map[(i, j)] * coords[j] as f64).sum::<f64>()
            })
            .collect()
    }

    /// Displacement `map · coords`, without the origin.
    pub fn displacement(&self, coords: &[i64]) -> Vec<f64> {
        (0..self.map.nrows())
            .map(|i| (0..self.map.ncols()).map(|j| self.map[(i, j)] * coords[j] as f64).sum())
            .collect()
    }
}

/// A finite weighted point set, equal to the underlying measure restricted to `region`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointMeasurePatch {
    points: Vec<PatchPoint>,
    region: RegionBox,
    embedding: Option<Embedding>,
}

pub(crate) fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

impl PointMeasurePatch {
    pub fn empty(region: RegionBox) -> Result<Self> {
        region.validate()?;
        Ok(PointMeasurePatch { points: Vec::new(), region, embedding: None })
    }

    /// Patch from explicit positions; coincident points are merged by adding weights.
    pub fn new(region: RegionBox, points: Vec<(Vec<f64>, Complex64)>) -> Result<Self> {
        region.validate()?;
        let d = region.dim();
        let mut out: Vec<PatchPoint> = Vec::with_capacity(points.len());
        let mut index = GridIndex::new(d);
        for (x, w) in points {
            check_point(&region, &x, w)?;
            match index.find(&x, |i| &out[i].position) {
                Some(i) => out[i].weight += w,
                None => {
                    index.insert(&x, out.len());
                    out.push(PatchPoint { position: x, weight: w, coords: None });
                }
            }
        }
        out.sort_by(|a, b| lex_cmp(&a.position, &b.position));
        Ok(PointMeasurePatch { points: out, region, embedding: None })
    }

    /// Patch whose points are given by integer coordinates under `embedding`; points
    /// with equal coordinates are merged.
    pub fn with_coords(region: RegionBox, embedding: Embedding, points: Vec<(Vec<i64>, Complex64)>) -> Result<Self> {
        region.validate()?;
        if embedding.map.nrows() != region.dim() || embedding.origin.len() != region.dim() {
            return Err(Error::Shape("embedding does not match the region dimension".into()));
        }
        let mut slot: HashMap<Vec<i64>, usize> = HashMap::with_capacity(points.len());
        let mut out: Vec<PatchPoint> = Vec::with_capacity(points.len());
        for (c, w) in points {
            if c.len() != embedding.map.ncols() {
                return Err(Error::Shape(format!("coordinates {c:?} do not match the embedding rank")));
            }
            if let Some(&i) = slot.get(&c) {
                out[i].weight += w;
                continue;
            }
            let x = embedding.position(&c);
            check_point(&region, &x, w)?;
            slot.insert(c.clone(), out.len());
            out.push(PatchPoint { position: x, weight: w, coords: Some(c) });
        }
        out.sort_by(|a, b| lex_cmp(&a.position, &b.position));
        Ok(PointMeasurePatch { points: out, region, embedding: Some(embedding) })
    }

    pub fn points(&self) -> &[PatchPoint] {
        &self.points
    }

    pub fn region(&self) -> &RegionBox {
        &self.region
    }

    pub fn embedding(&self) -> Option<&Embedding> {
        self.embedding.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.region.dim()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn positions(&self) -> Vec<Vec<f64>> {
        self.points.iter().map(|p| p.position.clone()).collect()
    }

    /// `T_t μ`: every point and the region move by `t`.
    pub fn translate(&self, t: &[f64]) -> PointMeasurePatch {
        let mut points: Vec<PatchPoint> = self
            .points
            .iter()
            .map(|p| PatchPoint {
                position: p.position.iter().zip(t).map(|(a, b)| a + b).collect(),
                weight: p.weight,
                coords: p.coords.clone(),
            })
            .collect();
        points.sort_by(|a, b| lex_cmp(&a.position, &b.position));
        PointMeasurePatch {
            points,
            region: self.region.translated(t),
            embedding: self.embedding.as_ref().map(|e| Embedding {
                map: e.map.clone(),
                origin: e.origin.iter().zip(t).map(|(a, b)| a + b).collect(),
            }),
        }
    }

    /// `μ̃`: `x ↦ -x`, weights conjugated.
    pub fn reflect_conjugate(&self) -> PointMeasurePatch {
        let mut points: Vec<PatchPoint> = self
            .points
            .iter()
            .map(|p| PatchPoint {
                position: p.position.iter().map(|v| -v).collect(),
                weight: p.weight.conj(),
                coords: p.coords.as_ref().map(|c| c.iter().map(|v| -v).collect()),
            })
            .collect();
        points.sort_by(|a, b| lex_cmp(&a.position, &b.position));
        PointMeasurePatch {
            points,
            region: self.region.reflected(),
            embedding: self.embedding.as_ref().map(|e| Embedding {
                map: e.map.clone(),
                origin: e.origin.iter().map(|v| -v).collect(),
            }),
        }
    }

    /// Restriction to a sub-box of the region.
    pub fn restrict(&self, region: &RegionBox) -> Result<PointMeasurePatch> {
        region.validate()?;
        if !self.region.contains_box(region, REGION_TOL) {
            return Err(Error::Coverage(format!(
                "restriction box {:?}..{:?} is not inside the patch region {:?}..{:?}",
                region.lo, region.hi, self.region.lo, self.region.hi
            )));
        }
        Ok(PointMeasurePatch {
            points: self.points.iter().filter(|p| region.contains(&p.position, REGION_TOL)).cloned().collect(),
            region: region.clone(),
            embedding: self.embedding.clone(),
        })
    }

    /// Drops points with `|weight| ≤ threshold`.
    pub fn pruned(&self, threshold: f64) -> PointMeasurePatch {
        PointMeasurePatch {
            points: self.points.iter().filter(|p| p.weight.norm() > threshold).cloned().collect(),
            region: self.region.clone(),
            embedding: self.embedding.clone(),
        }
    }

    /// `sup_x |μ|({x})`.
    pub fn norm_sup(&self) -> f64 {
        self.points.iter().map(|p| p.weight.norm()).fold(0.0, f64::max)
    }

    /// Lower bound for `‖μ‖_K = sup_x |μ|(x + K)` from translates `x` on a grid of
    /// stride `min side(K) / 4` with `x + K` inside the region; the last admissible
    /// translate along each axis is always tried.
    pub fn norm_k(&self, k: &RegionBox) -> Result<NormEstimate> {
        k.validate()?;
        if k.dim() != self.dim() {
            return Err(Error::Shape("K and the patch differ in dimension".into()));
        }
        let d = self.dim();
        let stride = if k.min_side() > 0.0 { k.min_side() / 4.0 } else { self.region.min_side().max(1.0) / 64.0 };
        let mut ranges = Vec::with_capacity(d);
        for i in 0..d {
            let first = self.region.lo[i] - k.lo[i];
            let last = self.region.hi[i] - k.hi[i];
            if last < first - REGION_TOL {
                return Err(Error::Domain(format!("K does not fit into the patch region along axis {i}")));
            }
            let steps = ((last - first) / stride + 1e-9).floor().max(0.0) as usize;
            let extra = last - (first + steps as f64 * stride) > REGION_TOL;
            ranges.push((first, steps + extra as usize, last.max(first)));
        }
        let sorted_first: Vec<(f64, f64)> = self.points.iter().map(|p| (p.position[0], p.weight.norm())).collect();
        let mut best = NormEstimate { value: 0.0, stride, origin: ranges.iter().map(|r| r.0).collect() };
        let mut idx = vec![0usize; d];
        loop {
            let x: Vec<f64> = (0..d).map(|i| (ranges[i].0 + idx[i] as f64 * stride).min(ranges[i].2)).collect();
            let b = k.translated(&x);
            let lo = sorted_first.partition_point(|(v, _)| *v < b.lo[0] - REGION_TOL);
            let hi = sorted_first.partition_point(|(v, _)| *v <= b.hi[0] + REGION_TOL);
            let mass: f64 = self.points[lo..hi]
                .iter()
                .filter(|p| b.contains(&p.position, REGION_TOL))
                .map(|p| p.weight.norm())
                .sum();
            if mass > best.value {
                best.value = mass;
                best.origin = x;
            }
            let mut axis = 0;
            loop {
                if axis == d {
                    return Ok(best);
                }
                idx[axis] += 1;
                if idx[axis] <= ranges[axis].1 {
                    break;
                }
                idx[axis] = 0;
                axis += 1;
            }
        }
    }

    /// Lookup structure for exact point matching.
    pub fn index(&self) -> PatchIndex<'_> {
        PatchIndex::new(self)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub stride: f64,
    /// Translate attaining the value.
    pub origin: Vec<f64>,
}

fn check_point(region: &RegionBox, x: &[f64], w: Complex64) -> Result<()> {
    if x.len() != region.dim() {
        return Err(Error::Shape(format!("point {x:?} does not match the region dimension {}", region.dim())));
    }
    if !region.contains(x, REGION_TOL) {
        return Err(Error::Domain(format!("point {x:?} lies outside the patch region")));
    }
    if !w.re.is_finite() || !w.im.is_finite() {
        return Err(Error::Domain(format!("weight at {x:?} is not finite")));
    }
    Ok(())
}

/// Hash grid over positions; lookups accept points within [`COINCIDENCE_TOL`].
pub(crate) struct GridIndex {
    cell: f64,
    dim: usize,
    map: HashMap<Vec<i64>, Vec<usize>>,
}

impl GridIndex {
    pub(crate) fn new(dim: usize) -> Self {
        GridIndex { cell: 1e-6, dim, map: HashMap::new() }
    }

    fn key(&self, x: &[f64]) -> Vec<i64> {
        x.iter().map(|v| (v / self.cell).floor() as i64).collect()
    }

    pub(crate) fn insert(&mut self, x: &[f64], i: usize) {
        let k = self.key(x);
        self.map.entry(k).or_default().push(i);
    }

    pub(crate) fn find<'a, F: Fn(usize) -> &'a Vec<f64>>(&self, x: &[f64], position: F) -> Option<usize> {
        let base = self.key(x);
        let mut offset = vec![-1i64; self.dim];
        loop {
            let k: Vec<i64> = base.iter().zip(&offset).map(|(a, b)| a + b).collect();
            if let Some(list) = self.map.get(&k) {
                for &i in list {
                    let p = position(i);
                    if p.iter().zip(x).all(|(a, b)| (a - b).abs() <= COINCIDENCE_TOL) {
                        return Some(i);
                    }
                }
            }
            let mut axis = 0;
            loop {
                if axis == self.dim {
                    return None;
                }
                offset[axis] += 1;
                if offset[axis] <= 1 {
                    break;
                }
                offset[axis] = -1;
                axis += 1;
            }
        }
    }
}

/// Exact point lookup: by integer coordinates when the patch has an embedding, by
/// position otherwise.
pub struct PatchIndex<'a> {
    patch: &'a PointMeasurePatch,
    coords: Option<HashMap<&'a [i64], usize>>,
    grid: GridIndex,
}

impl<'a> PatchIndex<'a> {
    fn new(patch: &'a PointMeasurePatch) -> Self {
        let all_coords = patch.embedding.is_some() && patch.points.iter().all(|p| p.coords.is_some());
        let coords = all_coords.then(|| {
            patch
                .points
                .iter()
                .enumerate()
                .map(|(i, p)| (p.coords.as_deref().unwrap_or(&[]), i))
                .collect()
        });
        let mut grid = GridIndex::new(patch.dim());
        for (i, p) in patch.points.iter().enumerate() {
            grid.insert(&p.position, i);
        }
        PatchIndex { patch, coords, grid }
    }

    pub fn has_coords(&self) -> bool {
        self.coords.is_some()
    }

    pub fn by_coords(&self, c: &[i64]) -> Option<usize> {
        self.coords.as_ref().and_then(|m| m.get(c).copied())
    }

    pub fn by_position(&self, x: &[f64]) -> Option<usize> {
        self.grid.find(x, |i| &self.patch.points[i].position)
    }

    pub fn weight_at(&self, x: &[f64]) -> Complex64 {
        self.by_position(x).map(|i| self.patch.points[i].weight).unwrap_or_default()
    }
}
