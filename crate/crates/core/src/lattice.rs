//! Full-rank lattices in `R^D`.
//!
//! Points are always carried together with their integer coordinates in the basis;
//! positions are derived from the coordinates and never the other way round.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::RegionBox;

/// Default absolute tolerance for lattice membership tests.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct EuclideanLattice {
    basis: DMatrix<f64>,
    inverse: DMatrix<f64>,
    det_abs: f64,
    tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticePoint {
    pub coords: Vec<i64>,
    pub position: Vec<f64>,
}

impl EuclideanLattice {
    /// Builds a lattice from a square matrix whose columns are the generators.
    pub fn new(basis: DMatrix<f64>) -> Result<Self> {
        let dim = basis.nrows();
        if dim == 0 || basis.ncols() != dim {
            return Err(Error::Construction(format!(
                "lattice basis must be a non-empty square matrix, got {}x{}",
                basis.nrows(),
                basis.ncols()
            )));
        }
        if basis.iter().any(|v| !v.is_finite()) {
            return Err(Error::Construction("lattice basis has non-finite entries".into()));
        }
        let scale = basis.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        let det = basis.determinant();
        if det.abs() <= 1e-12 * scale.powi(dim as i32) {
            return Err(Error::Construction(format!("lattice basis is singular (det = {det:e})")));
        }
        let inverse = basis
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Construction("lattice basis is not invertible".into()))?;
        Ok(EuclideanLattice {
            basis,
            inverse,
            det_abs: det.abs(),
            tol: MEMBERSHIP_TOL,
        })
    }

    /// Builds a lattice from generator vectors (each entry of `columns` is one generator).
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let d = columns.len();
        if columns.iter().any(|c| c.len() != d) {
            return Err(Error::Construction("generators must all have length equal to their count".into()));
        }
        Self::new(DMatrix::from_fn(d, d, |i, j| columns[j][i]))
    }

    /// Builds a lattice from a row-major matrix (`rows[i][j]` = i-th coordinate of generator j).
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::Construction("lattice basis must be square".into()));
        }
        Self::new(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
    }

    /// `s·Z^d`.
    pub fn scaled_integer(d: usize, s: f64) -> Result<Self> {
        Self::new(DMatrix::from_diagonal_element(d, d, s))
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.inverse
    }

    pub fn det_abs(&self) -> f64 {
        self.det_abs
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim()).map(|i| self.basis.row(i).iter().copied().collect()).collect()
    }

    pub fn generator(&self, j: usize) -> Vec<f64> {
        self.basis.column(j).iter().copied().collect()
    }

    /// Points per unit volume.
    pub fn density(&self) -> f64 {
        1.0 / self.det_abs
    }

    /// The annihilator `{k : k·x ∈ Z for all x in the lattice}`, basis `B^{-T}`.
    pub fn dual(&self) -> EuclideanLattice {
        let basis = self.inverse.transpose();
        EuclideanLattice {
            inverse: self.basis.transpose(),
            det_abs: 1.0 / self.det_abs,
            basis,
            tol: self.tol,
        }
    }

    pub fn position(&self, coords: &[i64]) -> Vec<f64> {
        let d = self.dim();
        (0..d)
            .map(|i| (0..d).map(|j| self.basis[(i, j)] * coords[j] as f64).sum())
            .collect()
    }

    /// Real coordinates `B^{-1} x`.
    pub fn fractional(&self, x: &[f64]) -> Vec<f64> {
        let v = &self.inverse * DVector::from_column_slice(x);
        v.iter().copied().collect()
    }

    /// Half-width of the bounding box of the fundamental parallelepiped in sup norm.
    pub fn cell_extent(&self) -> f64 {
        (0..self.dim())
            .map(|i| self.basis.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `x = B·coords + residue` with `residue ∈ B·[0,1)^D`. Coordinates within the
    /// membership tolerance of an integer snap to it, so lattice points reduce to zero.
    pub fn reduce_mod(&self, x: &[f64]) -> (Vec<f64>, Vec<i64>) {
        let frac = self.fractional(x);
        let coords: Vec<i64> = frac
            .iter()
            .map(|&f| {
                let r = f.round();
                if (f - r).abs() <= self.tol {
                    r as i64
                } else {
                    f.floor() as i64
                }
            })
            .collect();
        let base = self.position(&coords);
        let residue = x.iter().zip(&base).map(|(a, b)| a - b).collect();
        (residue, coords)
    }

    /// Euclidean distance from `x` to the nearest lattice point among the corners of the
    /// cell containing `x`.
    pub fn distance_to_lattice(&self, x: &[f64]) -> f64 {
        let d = self.dim();
        let base: Vec<i64> = self.fractional(x).iter().map(|f| f.floor() as i64).collect();
        let mut best = f64::INFINITY;
        for mask in 0..(1u32 << d) {
            let c: Vec<i64> = (0..d).map(|i| base[i] + ((mask >> i) & 1) as i64).collect();
            let p = self.position(&c);
            let dist = x.iter().zip(&p).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            best = best.min(dist);
        }
        best
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.distance_to_lattice(x) <= self.tol
    }

    /// All lattice points in the closed box, each exactly once, in lexicographic
    /// order of their integer coordinates.
    pub fn points_in_box(&self, region: &RegionBox) -> Result<Vec<LatticePoint>> {
        region.validate()?;
        if region.dim() != self.dim() {
            return Err(Error::Shape(format!(
                "box of dimension {} for a lattice of dimension {}",
                region.dim(),
                self.dim()
            )));
        }
        let mut out = Vec::new();
        self.for_each_in_box(region, |coords, pos| {
            out.push(LatticePoint {
                coords: coords.to_vec(),
                position: pos.to_vec(),
            })
        });
        Ok(out)
    }

    /// Visits every lattice point in the (already validated) box.
    ///
    /// Coordinates are enumerated level by level; at each level the admissible integer
    /// range is cut down by the box constraints together with the extreme contributions
    /// the remaining coordinates can still make. On the last level the range is exact.
    pub(crate) fn for_each_in_box<F: FnMut(&[i64], &[f64])>(&self, region: &RegionBox, mut visit: F) {
        let d = self.dim();
        let tol = self.tol;
        // Integer bounding box of the preimage.
        let mut cmin = vec![f64::INFINITY; d];
        let mut cmax = vec![f64::NEG_INFINITY; d];
        for mask in 0..(1u64 << d) {
            let corner: Vec<f64> = (0..d)
                .map(|i| if (mask >> i) & 1 == 1 { region.hi[i] + tol } else { region.lo[i] - tol })
                .collect();
            let f = self.fractional(&corner);
            for j in 0..d {
                cmin[j] = cmin[j].min(f[j]);
                cmax[j] = cmax[j].max(f[j]);
            }
        }
        let lo_c: Vec<i64> = cmin.iter().map(|v| (v - 1e-9).floor() as i64).collect();
        let hi_c: Vec<i64> = cmax.iter().map(|v| (v + 1e-9).ceil() as i64).collect();

        // rest_min[k][r], rest_max[k][r]: extreme values of Σ_{j≥k} B_rj c_j over the bounding box.
        let mut rest_min = vec![vec![0.0; d]; d + 1];
        let mut rest_max = vec![vec![0.0; d]; d + 1];
        for k in (0..d).rev() {
            for r in 0..d {
                let a = self.basis[(r, k)] * lo_c[k] as f64;
                let b = self.basis[(r, k)] * hi_c[k] as f64;
                rest_min[k][r] = rest_min[k + 1][r] + a.min(b);
                rest_max[k][r] = rest_max[k + 1][r] + a.max(b);
            }
        }

        let mut coords = vec![0i64; d];
        let mut partial = vec![vec![0.0; d]; d + 1];
        self.enumerate_level(0, region, &lo_c, &hi_c, &rest_min, &rest_max, &mut coords, &mut partial, &mut visit);
    }

    #[allow(clippy::too_many_arguments)]
    fn enumerate_level<F: FnMut(&[i64], &[f64])>(
        &self,
        k: usize,
        region: &RegionBox,
        lo_c: &[i64],
        hi_c: &[i64],
        rest_min: &[Vec<f64>],
        rest_max: &[Vec<f64>],
        coords: &mut [i64],
        partial: &mut [Vec<f64>],
        visit: &mut F,
    ) {
        let d = self.dim();
        let tol = self.tol;
        let mut lo = lo_c[k] as f64;
        let mut hi = hi_c[k] as f64;
        for r in 0..d {
            let b = self.basis[(r, k)];
            let s = partial[k][r];
            let upper = region.hi[r] + tol - s - rest_min[k + 1][r];
            let lower = region.lo[r] - tol - s - rest_max[k + 1][r];
            if b.abs() < 1e-300 {
                if lower > 1e-12 * (1.0 + s.abs()) || upper < -1e-12 * (1.0 + s.abs()) {
                    return;
                }
                continue;
            }
            let (a1, a2) = (lower / b, upper / b);
            let (l, h) = if b > 0.0 { (a1, a2) } else { (a2, a1) };
            lo = lo.max(l);
            hi = hi.min(h);
        }
        if lo > hi + 1e-9 {
            return;
        }
        let start = (lo - 1e-9).ceil() as i64;
        let end = (hi + 1e-9).floor() as i64;
        for c in start.max(lo_c[k])..=end.min(hi_c[k]) {
            coords[k] = c;
            let (head, tail) = partial.split_at_mut(k + 1);
            for r in 0..d {
                tail[0][r] = head[k][r] + self.basis[(r, k)] * c as f64;
            }
            if k + 1 == d {
                let pos = &partial[d];
                if region.contains(pos, tol) {
                    visit(coords, pos);
                }
            } else {
                self.enumerate_level(k + 1, region, lo_c, hi_c, rest_min, rest_max, coords, partial, visit);
            }
        }
    }
}

/// Row-echelon basis of the integer lattice spanned by `rows`, with a tag carried
/// through every row operation (tags are reduced modulo `orders`).
///
/// Returns the non-zero echelon rows with their tags, plus the tags of rows that
/// reduced to zero.
pub(crate) fn integer_echelon(
    mut rows: Vec<(Vec<i64>, Vec<i64>)>,
    orders: &[u64],
) -> (Vec<(Vec<i64>, Vec<i64>)>, Vec<Vec<i64>>) {
    let ncols = rows.first().map(|r| r.0.len()).unwrap_or(0);
    let reduce = |tag: &mut Vec<i64>| {
        for (t, q) in tag.iter_mut().zip(orders) {
            *t = t.rem_euclid(*q as i64);
        }
    };
    let mut pivot_row = 0;
    for col in 0..ncols {
        loop {
            // smallest non-zero |entry| in this column among the unfixed rows
            let pick = (pivot_row..rows.len())
                .filter(|&r| rows[r].0[col] != 0)
                .min_by_key(|&r| rows[r].0[col].abs());
            let Some(p) = pick else { break };
            rows.swap(pivot_row, p);
            let (pv, ptag) = rows[pivot_row].clone();
            let mut done = true;
            for r in (pivot_row + 1)..rows.len() {
                let v = rows[r].0[col];
                if v == 0 {
                    continue;
                }
                let m = v.div_euclid(pv[col]);
                for (x, y) in rows[r].0.iter_mut().zip(&pv) {
                    *x -= m * y;
                }
                for (x, y) in rows[r].1.iter_mut().zip(&ptag) {
                    *x -= m * y;
                }
                reduce(&mut rows[r].1);
                if rows[r].0[col] != 0 {
                    done = false;
                }
            }
            if done {
                pivot_row += 1;
                break;
            }
        }
    }
    let zero_tags = rows[pivot_row..].iter().map(|r| r.1.clone()).collect();
    rows.truncate(pivot_row);
    for r in rows.iter_mut() {
        reduce(&mut r.1);
    }
    (rows, zero_tags)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phi() -> f64 {
        (1.0 + 5f64.sqrt()) / 2.0
    }

    fn golden() -> EuclideanLattice {
        let p = phi();
        EuclideanLattice::from_rows(&[vec![1.0, p], vec![1.0, 1.0 - p]]).unwrap()
    }

    #[test]
    fn dual_of_integers_and_scaled() {
        let z = EuclideanLattice::scaled_integer(1, 1.0).unwrap();
        assert!((z.dual().basis()[(0, 0)] - 1.0).abs() < 1e-15);
        let two = EuclideanLattice::scaled_integer(1, 2.0).unwrap();
        assert!((two.dual().basis()[(0, 0)] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn golden_dual_is_annihilator() {
        let l = golden();
        let d = l.dual();
        let prod = d.basis().transpose() * l.basis();
        for v in prod.iter() {
            assert!((v - v.round()).abs() < 1e-10, "{prod}");
        }
    }

    #[test]
    fn golden_density_by_counting() {
        let l = golden();
        assert!((l.density() - 1.0 / 5f64.sqrt()).abs() < 1e-12);
        let n = 50.0;
        let pts = l.points_in_box(&RegionBox::centered(2, n).unwrap()).unwrap();
        let est = pts.len() as f64 / (2.0 * n).powi(2);
        assert!((est - 0.447_213_6).abs() < 0.01, "{est}");
    }

    #[test]
    fn points_in_box_examples() {
        let z = EuclideanLattice::scaled_integer(1, 1.0).unwrap();
        let pts = z.points_in_box(&RegionBox::new(vec![-2.5], vec![2.5]).unwrap()).unwrap();
        let xs: Vec<i64> = pts.iter().map(|p| p.coords[0]).collect();
        assert_eq!(xs, vec![-2, -1, 0, 1, 2]);

        let two = EuclideanLattice::scaled_integer(1, 2.0).unwrap();
        let pts = two.points_in_box(&RegionBox::new(vec![0.0], vec![5.0]).unwrap()).unwrap();
        let xs: Vec<f64> = pts.iter().map(|p| p.position[0]).collect();
        assert_eq!(xs, vec![0.0, 2.0, 4.0]);
    }

    #[test]
    fn golden_box_matches_brute_force() {
        let l = golden();
        let region = RegionBox::centered(2, 3.0).unwrap();
        let pts = l.points_in_box(&region).unwrap();
        let mut brute = Vec::new();
        for m in -10..=10 {
            for n in -10..=10 {
                let p = l.position(&[m, n]);
                if region.contains(&p, 1e-9) {
                    brute.push(vec![m, n]);
                }
            }
        }
        let got: Vec<Vec<i64>> = pts.into_iter().map(|p| p.coords).collect();
        assert_eq!(got, brute);
    }

    #[test]
    fn unbounded_box_rejected() {
        let z = EuclideanLattice::scaled_integer(1, 1.0).unwrap();
        let b = RegionBox { lo: vec![0.0], hi: vec![f64::INFINITY], finite: Default::default() };
        assert!(matches!(z.points_in_box(&b), Err(Error::Domain(_))));
    }

    #[test]
    fn reduce_mod_examples() {
        let z = EuclideanLattice::scaled_integer(1, 1.0).unwrap();
        let (r, c) = z.reduce_mod(&[3.7]);
        assert!((r[0] - 0.7).abs() < 1e-12 && c == vec![3]);

        let two = EuclideanLattice::scaled_integer(1, 2.0).unwrap();
        let (r, c) = two.reduce_mod(&[-0.5]);
        assert!((r[0] - 1.5).abs() < 1e-12 && c == vec![-1]);

        let z2 = EuclideanLattice::scaled_integer(2, 1.0).unwrap();
        let (r, c) = z2.reduce_mod(&[2.25, -1.75]);
        assert!((r[0] - 0.25).abs() < 1e-12 && (r[1] - 0.25).abs() < 1e-12);
        assert_eq!(c, vec![2, -2]);
    }

    #[test]
    fn density_duality_and_double_dual() {
        let l = golden();
        assert!((l.density() * l.dual().density() - 1.0).abs() < 1e-10);
        let back = l.dual().dual();
        for (a, b) in back.basis().iter().zip(l.basis().iter()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn counting_error_halves() {
        let l = golden();
        let errs: Vec<f64> = [20.0, 40.0, 80.0]
            .iter()
            .map(|&n| {
                let c = l.points_in_box(&RegionBox::centered(2, n).unwrap()).unwrap().len();
                (c as f64 / (2.0 * n).powi(2) - l.density()).abs()
            })
            .collect();
        // error ≤ C/n with C fixed by the n = 20 value
        let c = errs[0] * 20.0;
        assert!(errs[1] <= c / 40.0 * 1.5 && errs[2] <= c / 80.0 * 1.5, "{errs:?}");
    }

    #[test]
    fn echelon_tracks_tags() {
        // generators 2 (tag 0) and -1 (tag 1 mod 2): lattice Z, generator tag 1.
        let (rows, zeros) = integer_echelon(vec![(vec![2], vec![0]), (vec![-1], vec![1])], &[2]);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].0[0].abs(), 1);
        assert_eq!(rows[0].1, vec![1]);
        assert!(zeros.iter().all(|t| t == &vec![0]));
    }
}
