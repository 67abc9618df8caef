use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::RegionBox;
use crate::measure::patch::{GridIndex, REGION_TOL};
use crate::measure::{Embedding, PointMeasurePatch};

use super::VanHoveSpec;

/// `γ_n({z}) = (1 / vol A_n) Σ_{x, x - z ∈ supp ∩ A_n} a(x) conj(a(x - z))` for every
/// difference `z` with sup norm at most `radius`.
///
/// Pairs are matched by integer coordinates when the patch carries them. Only one of
/// `z`, `-z` is summed; the other is its conjugate, so the result is Hermitian exactly.
pub fn eberlein_autocorrelation(
    patch: &PointMeasurePatch,
    vh: &VanHoveSpec,
    n: usize,
    radius: f64,
) -> Result<PointMeasurePatch> {
    let a = vh.check_covered(patch.region(), n)?;
    let half = (0..patch.dim()).map(|i| patch.region().side(i) / 2.0).fold(f64::INFINITY, f64::min);
    if !(radius >= 0.0) || radius > half + REGION_TOL {
        return Err(Error::Domain(format!("autocorrelation radius {radius} exceeds the region half-width {half}")));
    }
    let out_region = RegionBox::centered(patch.dim(), radius)?;
    let vol = vh.volume(n);
    let inside: Vec<&crate::measure::PatchPoint> =
        patch.points().iter().filter(|p| a.contains(&p.position, REGION_TOL)).collect();
    let use_coords = patch.embedding().is_some() && inside.iter().all(|p| p.coords.is_some());

    // accumulators in first-seen order
    let mut sums: Vec<(Vec<f64>, Option<Vec<i64>>, Complex64)> = Vec::new();
    let mut by_coords: HashMap<Vec<i64>, usize> = HashMap::new();
    let mut by_position = GridIndex::new(patch.dim());

    let zero_mass: f64 = inside.iter().map(|p| p.weight.norm_sqr()).sum();
    for (i, x) in inside.iter().enumerate() {
        let lo = x.position[0] - radius;
        let start = inside[..i].partition_point(|p| p.position[0] < lo - REGION_TOL);
        for y in &inside[start..i] {
            let z: Vec<f64> = x.position.iter().zip(&y.position).map(|(u, v)| u - v).collect();
            if z.iter().any(|v| v.abs() > radius + REGION_TOL) {
                continue;
            }
            // x sorts after y, so z is lexicographically positive (or zero up to rounding)
            let w = x.weight * y.weight.conj();
            if use_coords {
                let c: Vec<i64> = x.coords.as_ref().unwrap().iter().zip(y.coords.as_ref().unwrap()).map(|(u, v)| u - v).collect();
                match by_coords.get(&c) {
                    Some(&k) => sums[k].2 += w,
                    None => {
                        by_coords.insert(c.clone(), sums.len());
                        sums.push((z, Some(c), w));
                    }
                }
            } else {
                match by_position.find(&z, |k| &sums[k].0) {
                    Some(k) => sums[k].2 += w,
                    None => {
                        by_position.insert(&z, sums.len());
                        sums.push((z, None, w));
                    }
                }
            }
        }
    }

    if use_coords {
        let e = patch.embedding().unwrap();
        let rank = e.map.ncols();
        let mut pts: Vec<(Vec<i64>, Complex64)> = Vec::with_capacity(2 * sums.len() + 1);
        pts.push((vec![0; rank], Complex64::new(zero_mass / vol, 0.0)));
        for (_, c, s) in sums {
            let c = c.unwrap();
            if c.iter().all(|v| *v == 0) {
                continue;
            }
            let g = s / vol;
            pts.push((c.iter().map(|v| -v).collect(), g.conj()));
            pts.push((c, g));
        }
        let embedding = Embedding { map: e.map.clone(), origin: vec![0.0; patch.dim()] };
        // differences are exact lattice vectors; positions are recomputed from coordinates
        let pts = pts
            .into_iter()
            .filter(|(c, _)| out_region.contains(&embedding.displacement(c), REGION_TOL))
            .collect();
        PointMeasurePatch::with_coords(out_region, embedding, pts)
    } else {
        let mut pts: Vec<(Vec<f64>, Complex64)> = Vec::with_capacity(2 * sums.len() + 1);
        pts.push((vec![0.0; patch.dim()], Complex64::new(zero_mass / vol, 0.0)));
        for (z, _, s) in sums {
            if z.iter().all(|v| v.abs() <= crate::measure::patch::COINCIDENCE_TOL) {
                continue;
            }
            let g = s / vol;
            pts.push((z.iter().map(|v| -v).collect(), g.conj()));
            pts.push((z, g));
        }
        PointMeasurePatch::new(out_region, pts)
    }
}
