use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::RegionBox;
use crate::measure::patch::{lex_cmp, GridIndex, PatchIndex, REGION_TOL};
use crate::measure::PointMeasurePatch;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KreinWitness {
    pub x: Vec<f64>,
    pub t: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KreinReport {
    pub passed: bool,
    pub reason: String,
    pub a0: Option<Complex64>,
    /// `max |a(x)| - a(0)`.
    pub bound_excess: f64,
    /// Smallest `rhs - lhs` of the Krein inequality over the checked pairs.
    pub worst_margin: f64,
    pub witness: Option<KreinWitness>,
    pub pairs_checked: usize,
}

/// Necessary conditions for positive definiteness of a patch of weights: `a(0)` real
/// and positive, `|a(x)| ≤ a(0)`, and Krein's inequality
/// `|a(x + t) - a(x)|² ≤ 2 a(0) (a(0) - Re a(t))` for `t ∈ S`, `x ∈ S ∪ (S - t)` with
/// `x + t` inside the patch region. Every comparison allows an absolute slack `tol`.
pub fn krein_check(patch: &PointMeasurePatch, tol: f64) -> Result<KreinReport> {
    let d = patch.dim();
    let idx = patch.index();
    let zero = vec![0.0; d];
    let fail = |reason: String, a0: Option<Complex64>| KreinReport {
        passed: false,
        reason,
        a0,
        bound_excess: f64::NAN,
        worst_margin: f64::NAN,
        witness: None,
        pairs_checked: 0,
    };
    let Some(i0) = idx.by_position(&zero) else {
        return Ok(fail("the patch has no mass at the origin".into(), None));
    };
    let a0c = patch.points()[i0].weight;
    if a0c.im.abs() > tol || a0c.re <= 0.0 {
        return Ok(fail(format!("a(0) = {a0c} is not a positive real"), Some(a0c)));
    }
    let a0 = a0c.re;

    let mut report = KreinReport {
        passed: true,
        reason: "all checks passed".into(),
        a0: Some(a0c),
        bound_excess: f64::NEG_INFINITY,
        worst_margin: f64::INFINITY,
        witness: None,
        pairs_checked: 0,
    };
    for p in patch.points() {
        let excess = p.weight.norm() - a0;
        if excess > report.bound_excess {
            report.bound_excess = excess;
            if excess > tol && report.passed {
                report.passed = false;
                report.reason = format!("|a(x)| exceeds a(0) at x = {:?}", p.position);
                report.witness = Some(KreinWitness { x: p.position.clone(), t: zero.clone(), lhs: p.weight.norm(), rhs: a0 });
            }
        }
    }

    let region = patch.region();
    for t in patch.points() {
        let rhs = 2.0 * a0 * (a0 - t.weight.re);
        let mut xs: Vec<Vec<f64>> = Vec::new();
        for s in patch.points() {
            xs.push(s.position.clone());
            let shifted: Vec<f64> = s.position.iter().zip(&t.position).map(|(a, b)| a - b).collect();
            if idx.by_position(&shifted).is_none() {
                xs.push(shifted);
            }
        }
        for x in xs {
            let xt: Vec<f64> = x.iter().zip(&t.position).map(|(a, b)| a + b).collect();
            if !region.contains(&x, REGION_TOL) || !region.contains(&xt, REGION_TOL) {
                continue;
            }
            let lhs = (idx.weight_at(&xt) - idx.weight_at(&x)).norm_sqr();
            let margin = rhs - lhs;
            report.pairs_checked += 1;
            if margin < report.worst_margin {
                report.worst_margin = margin;
                if margin < -tol {
                    report.passed = false;
                    report.reason = "Krein inequality fails".into();
                    report.witness = Some(KreinWitness { x, t: t.position.clone(), lhs, rhs });
                }
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlmostPeriods {
    pub eps: f64,
    /// Accepted `t`, sorted lexicographically, with `sup |a(x) - a(x - t)|` over the
    /// overlap of the region with its translate.
    pub periods: Vec<(Vec<f64>, f64)>,
    pub candidates_checked: usize,
    /// Largest gap between consecutive accepted periods (one-dimensional patches).
    pub max_gap: Option<f64>,
}

/// ε-almost periods among the differences `S - S` in `search_box`. Each search vector
/// must satisfy `|t_i| ≤ side_i / 2`, so the overlap `region ∩ (region + t)` keeps at
/// least half of the region along every axis.
pub fn eps_almost_periods(patch: &PointMeasurePatch, eps: f64, search_box: &RegionBox) -> Result<AlmostPeriods> {
    search_box.validate()?;
    let d = patch.dim();
    if search_box.dim() != d {
        return Err(Error::Shape("search box and patch differ in dimension".into()));
    }
    let region = patch.region();
    for i in 0..d {
        let reach = search_box.lo[i].abs().max(search_box.hi[i].abs());
        if reach > region.side(i) / 2.0 + REGION_TOL {
            return Err(Error::Coverage(format!(
                "search box reaches {reach} along axis {i}, more than half the region side {}",
                region.side(i)
            )));
        }
    }
    let candidates = super::density::difference_set(patch, search_box);
    let idx = patch.index();
    let mut periods = Vec::new();
    for t in &candidates {
        let sup = translation_gap(patch, &idx, t);
        if sup < eps {
            periods.push((t.clone(), sup));
        }
    }
    periods.sort_by(|a, b| lex_cmp(&a.0, &b.0));
    let max_gap = (d == 1 && periods.len() >= 2)
        .then(|| periods.windows(2).map(|w| w[1].0[0] - w[0].0[0]).fold(0.0, f64::max));
    Ok(AlmostPeriods { eps, periods, candidates_checked: candidates.len(), max_gap })
}

/// `sup_{x ∈ O_t} |a(x) - a(x - t)|` with `O_t = region ∩ (region + t)`.
fn translation_gap(patch: &PointMeasurePatch, idx: &PatchIndex<'_>, t: &[f64]) -> f64 {
    let region = patch.region();
    let Some(overlap) = region.intersect(&region.translated(t)) else { return 0.0 };
    let mut sup = 0.0f64;
    let mut seen = GridIndex::new(patch.dim());
    let mut store: Vec<Vec<f64>> = Vec::new();
    for p in patch.points() {
        if overlap.contains(&p.position, REGION_TOL) {
            let back: Vec<f64> = p.position.iter().zip(t).map(|(a, b)| a - b).collect();
            sup = sup.max((p.weight - idx.weight_at(&back)).norm());
            seen.insert(&p.position, store.len());
            store.push(p.position.clone());
        }
    }
    for p in patch.points() {
        let fwd: Vec<f64> = p.position.iter().zip(t).map(|(a, b)| a + b).collect();
        if overlap.contains(&fwd, REGION_TOL) && seen.find(&fwd, |i| &store[i]).is_none() {
            sup = sup.max(p.weight.norm());
        }
    }
    sup
}

#[cfg(test)]
mod tests {
    use super::*;

    fn patch(region: f64, pts: &[(f64, f64)]) -> PointMeasurePatch {
        PointMeasurePatch::new(
            RegionBox::centered(1, region).unwrap(),
            pts.iter().map(|(x, w)| (vec![*x], Complex64::new(*w, 0.0))).collect(),
        )
        .unwrap()
    }

    #[test]
    fn integer_autocorrelation_is_positive_definite() {
        let pts: Vec<(f64, f64)> = (-10..=10).map(|m| (m as f64, 1.0)).collect();
        let r = krein_check(&patch(10.0, &pts), 1e-9).unwrap();
        assert!(r.passed, "{}", r.reason);
        assert!(r.worst_margin.abs() < 1e-12);
    }

    #[test]
    fn bound_violation_is_witnessed() {
        let r = krein_check(&patch(5.0, &[(-1.0, 1.5), (0.0, 1.0), (1.0, 1.5)]), 1e-9).unwrap();
        assert!(!r.passed);
        let w = r.witness.unwrap();
        assert_eq!(w.x.len(), 1);
        assert!((w.x[0].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn missing_or_negative_origin() {
        assert!(!krein_check(&patch(5.0, &[(1.0, 1.0)]), 1e-9).unwrap().passed);
        assert!(!krein_check(&patch(5.0, &[(0.0, -1.0)]), 1e-9).unwrap().passed);
    }

    #[test]
    fn integer_periods() {
        let pts: Vec<(f64, f64)> = (-50..=50).map(|m| (m as f64, 1.0)).collect();
        let p = patch(50.0, &pts);
        let r = eps_almost_periods(&p, 1e-6, &RegionBox::new(vec![0.0], vec![20.0]).unwrap()).unwrap();
        let ts: Vec<f64> = r.periods.iter().map(|(t, _)| t[0]).collect();
        assert_eq!(ts, (0..=20).map(|m| m as f64).collect::<Vec<_>>());
        assert_eq!(r.max_gap, Some(1.0));
        assert!(matches!(
            eps_almost_periods(&p, 1e-6, &RegionBox::new(vec![0.0], vec![60.0]).unwrap()),
            Err(Error::Coverage(_))
        ));
    }

    #[test]
    fn shifted_mass_breaks_a_period() {
        let mut pts: Vec<(f64, f64)> = (-20..=20).map(|m| (m as f64, 1.0)).collect();
        pts[25].1 = 3.0;
        let r = eps_almost_periods(&patch(20.0, &pts), 0.5, &RegionBox::new(vec![0.0], vec![3.0]).unwrap()).unwrap();
        assert_eq!(r.periods.len(), 1);
    }
}
