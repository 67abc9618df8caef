mod common;

use aperiodic::classify::{
    density_profile, detect_structure_1d, dichotomy_report, fit_trig_polys, krein_check, separation_and_window_counts,
    verify_structure, FitOptions,
};
use aperiodic::cps::{CutProjectScheme, LatticeData, Window};
use aperiodic::group::{haar_volume, Character, GroupDescriptor, RegionBox};
use aperiodic::harmonic::{diffraction_numeric, eberlein_autocorrelation, fb_coefficient, fb_spectrum, VanHoveSpec};
use aperiodic::lattice::EuclideanLattice;
use aperiodic::measure::{PointMeasurePatch, SymbolicComb};
use common::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, failure_persistence: None, ..ProptestConfig::default() }
}

/// 2×2 rows with `|det|` in `[lo, hi]`.
fn lattice_2d(lo: f64, hi: f64) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (-1.5f64..1.5, -1.5f64..1.5, -1.5f64..1.5, -1.5f64..1.5)
        .prop_map(|(a, b, c, d)| vec![vec![a, b], vec![c, d]])
        .prop_filter("determinant out of range", move |m| {
            let det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).abs();
            det >= lo && det <= hi
        })
}

fn patch_1d(region: f64) -> impl Strategy<Value = PointMeasurePatch> {
    prop::collection::vec((-region..region, -2.0f64..2.0, -2.0f64..2.0), 1..40).prop_map(move |pts| {
        PointMeasurePatch::new(
            RegionBox::centered(1, region).unwrap(),
            pts.into_iter().map(|(x, re, im)| (vec![x], Complex64::new(re, im))).collect(),
        )
        .unwrap()
    })
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol
}

proptest! {
    #![proptest_config(cfg(64))]

    #[test]
    fn pairing_is_a_homomorphism(
        k in prop::array::uniform2(-5.0f64..5.0), b in 0u64..3,
        x in prop::array::uniform2(-50.0f64..50.0), s in 0i64..3,
        y in prop::array::uniform2(-50.0f64..50.0), t in 0i64..3,
    ) {
        let g = GroupDescriptor::new(2, vec![3]).unwrap();
        let chi = Character { freq: k.to_vec(), finite: vec![b] };
        let xe = g.element(x.to_vec(), vec![s]).unwrap();
        let ye = g.element(y.to_vec(), vec![t]).unwrap();
        let lhs = g.pair(&chi, &g.add(&xe, &ye)).unwrap();
        let rhs = g.pair(&chi, &xe).unwrap() * g.pair(&chi, &ye).unwrap();
        prop_assert!(close(lhs, rhs, 1e-10));
        prop_assert!(close(g.pair(&chi, &g.neg(&xe)).unwrap(), g.pair(&chi, &xe).unwrap().conj(), 1e-10));
        prop_assert!((lhs.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn haar_volume_is_additive(lo in -5.0f64..0.0, cut in 0.0f64..1.0, len in 0.1f64..5.0, h in 0.1f64..3.0) {
        let g = GroupDescriptor::new(2, vec![2, 3]).unwrap();
        let mid = lo + cut * len;
        let whole = RegionBox::new(vec![lo, 0.0], vec![lo + len, h]).unwrap();
        let left = RegionBox::new(vec![lo, 0.0], vec![mid, h]).unwrap();
        let right = RegionBox::new(vec![mid, 0.0], vec![lo + len, h]).unwrap();
        let sum = haar_volume(&g, &left).unwrap() + haar_volume(&g, &right).unwrap();
        prop_assert!((haar_volume(&g, &whole).unwrap() - sum).abs() < 1e-12);
    }

    #[test]
    fn dual_lattice_identities(rows in lattice_2d(0.2, 5.0)) {
        let l = EuclideanLattice::from_rows(&rows).unwrap();
        let dual = l.dual();
        prop_assert!((l.density() * dual.density() - 1.0).abs() < 1e-10);
        let back = dual.dual();
        for i in 0..2 {
            for j in 0..2 {
                prop_assert!((back.basis()[(i, j)] - l.basis()[(i, j)]).abs() < 1e-10);
            }
        }
        let pts = l.points_in_box(&RegionBox::centered(2, 4.0).unwrap()).unwrap();
        let dpts = dual.points_in_box(&RegionBox::centered(2, 4.0).unwrap()).unwrap();
        for p in pts.iter().take(20) {
            for q in dpts.iter().take(20) {
                let t: f64 = p.position.iter().zip(&q.position).map(|(a, b)| a * b).sum();
                prop_assert!((t - t.round()).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn reflect_conjugate_is_an_involution(patch in patch_1d(20.0)) {
        let twice = patch.reflect_conjugate().reflect_conjugate();
        prop_assert_eq!(twice.len(), patch.len());
        for (a, b) in patch.points().iter().zip(twice.points()) {
            prop_assert!((a.position[0] - b.position[0]).abs() < 1e-12);
            prop_assert!(close(a.weight, b.weight, 1e-15));
        }
    }

    #[test]
    fn norm_k_is_monotone(patch in patch_1d(20.0), side in 0.5f64..8.0, start in 0.0f64..1.0, frac in 0.05f64..0.75) {
        let outer = RegionBox::new(vec![0.0], vec![side]).unwrap();
        let a = start * (1.0 - frac) * side;
        let inner = RegionBox::new(vec![a], vec![a + frac * side]).unwrap();
        let small = patch.norm_k(&inner).unwrap().value;
        let large = patch.norm_k(&outer).unwrap().value;
        prop_assert!(small <= large + 1e-12, "{} > {}", small, large);
    }

    #[test]
    fn window_counts_bound_upper_density(patch in patch_1d(30.0)) {
        let k = RegionBox::new(vec![0.0], vec![1.0]).unwrap();
        let wc = separation_and_window_counts(&patch.positions(), &k, None).unwrap();
        let vh = VanHoveSpec::new(1, 1.0).unwrap();
        let prof = density_profile(&patch, &vh, &[5, 10, 30]).unwrap();
        for e in &prof.entries {
            prop_assert!(0.0 <= e.udens && e.udens <= e.uudens + 1e-12);
            prop_assert!(e.uudens <= wc.max_count as f64 / k.volume() + 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(cfg(24))]

    #[test]
    fn translate_commutes_with_materialize(seed in any::<u64>(), t in prop::array::uniform2(-3.0f64..3.0)) {
        for s in synthetic_crysts(seed, 2) {
            let tv = &t[..s.dim];
            let region = RegionBox::centered(s.dim, 12.0).unwrap();
            let lhs = s.comb.translate(tv).unwrap().materialize(&region).unwrap();
            let rhs = s.comb.materialize(&region.translated(&tv.iter().map(|v| -v).collect::<Vec<_>>())).unwrap().translate(tv);
            prop_assert_eq!(lhs.len(), rhs.len());
            let idx = rhs.index();
            for p in lhs.points() {
                let j = idx.by_position(&p.position);
                prop_assert!(j.is_some());
                prop_assert!(close(p.weight, rhs.points()[j.unwrap()].weight, 1e-10));
            }
        }
    }

    #[test]
    fn cryst_sup_norm_is_bounded_by_coefficients(seed in any::<u64>()) {
        for s in synthetic_crysts(seed, 2) {
            let patch = s.comb.materialize(&RegionBox::centered(s.dim, 10.0).unwrap()).unwrap();
            let bound = s.polys.iter().map(|p| p.iter().map(|(_, c)| c.norm()).sum::<f64>()).fold(0.0, f64::max);
            prop_assert!(patch.norm_sup() <= bound + 1e-12);
        }
    }

    #[test]
    fn autocorrelation_is_hermitian_and_positive(seed in any::<u64>()) {
        let s = &synthetic_crysts(seed, 2)[0];
        let vh = VanHoveSpec::new(1, 1.0).unwrap();
        let patch = s.comb.materialize(&RegionBox::centered(1, 160.0).unwrap()).unwrap();
        let g = eberlein_autocorrelation(&patch, &vh, 150, 2.0).unwrap();
        let idx = g.index();
        for p in g.points() {
            let j = idx.by_position(&[-p.position[0]]).unwrap();
            prop_assert_eq!(g.points()[j].weight, p.weight.conj());
        }
        let k = krein_check(&g, 10.0 * vh.boundary_ratio(150, 2.0).unwrap()).unwrap();
        prop_assert!(k.passed, "{}", k.reason);
    }

    #[test]
    fn numeric_intensities_are_real_and_nonnegative(patch in patch_1d(15.0), ks in prop::collection::vec(-3.0f64..3.0, 1..10)) {
        let vh = VanHoveSpec::new(1, 1.0).unwrap();
        let cands: Vec<Character> = ks.into_iter().map(|k| Character::real(vec![k])).collect();
        let d = diffraction_numeric(&fb_spectrum(&patch, &cands, &vh, 15, 0.0).unwrap());
        for e in &d.entries {
            prop_assert!(e.coeff.im == 0.0 && e.coeff.re >= 0.0);
        }
    }

    #[test]
    fn detected_structure_verifies(seed in any::<u64>()) {
        let s = &synthetic_crysts(seed, 2)[0];
        let patch = s.comb.materialize(&RegionBox::centered(1, 50.0).unwrap()).unwrap();
        let xs: Vec<f64> = patch.points().iter().map(|p| p.position[0]).collect();
        let det = detect_structure_1d(&xs, 1e-9, 20).unwrap();
        prop_assert!(det.found, "{}", det.reason);
        let best = det.best.unwrap();
        let v = verify_structure(&patch, &best.lattice().unwrap(), &best.translates, 1e-9).unwrap();
        prop_assert!(v.passed && v.max_residual <= 1e-9);
    }

    #[test]
    fn fitted_comb_rematerializes_the_patch(seed in any::<u64>()) {
        for s in synthetic_crysts(seed, 2) {
            let region = RegionBox::centered(s.dim, if s.dim == 1 { 100.0 } else { 20.0 }).unwrap();
            let patch = s.comb.materialize(&region).unwrap();
            let fit = fit_trig_polys(&patch, &s.lattice(), &s.translates, &FitOptions::default()).unwrap();
            let again = SymbolicComb::Cryst(fit.comb().unwrap()).materialize(&region).unwrap();
            prop_assert_eq!(again.len(), patch.len());
            let idx = again.index();
            for p in patch.points() {
                prop_assert!(close(idx.weight_at(&p.position), p.weight, 1e-9));
            }
        }
    }

    #[test]
    fn lattices_are_never_dense_type(scale in 0.5f64..2.0) {
        let comb = lattice_comb(&[vec![scale]]);
        let patch = comb.materialize(&RegionBox::centered(1, 200.0).unwrap()).unwrap();
        let vh = VanHoveSpec::new(1, 1.0).unwrap();
        let w = RegionBox::new(vec![0.0], vec![3.0]).unwrap();
        let r = dichotomy_report(&patch, &vh, 200, &w, &[0.3, 0.1, 0.03, 0.01], &[]).unwrap();
        prop_assert_ne!(r.classification.as_str(), "dense-type");
    }

    #[test]
    fn window_split_is_a_disjoint_union(a in -1.0f64..-0.2, cut in 0.1f64..0.9, len in 0.5f64..1.5) {
        let cps = CutProjectScheme::fibonacci();
        let b = a + cut * len;
        let c = a + len;
        let region = RegionBox::centered(1, 100.0).unwrap();
        let whole = cps.project_points(&Window::interval(a, c).unwrap(), &region).unwrap();
        let left = cps.project_points(&Window::interval(a, b).unwrap(), &region).unwrap();
        let right = cps.project_points(&Window::interval(b, c).unwrap(), &region).unwrap();
        prop_assert_eq!(whole.len(), left.len() + right.len());
        let li = left.index();
        for p in right.points() {
            prop_assert!(li.by_position(&p.position).is_none());
        }
    }
}

proptest! {
    #![proptest_config(cfg(8))]

    #[test]
    fn double_dual_scheme(rows in lattice_2d(0.5, 3.0)) {
        let Ok(cps) = CutProjectScheme::euclidean(1, EuclideanLattice::from_rows(&rows).unwrap()) else {
            return Ok(());
        };
        let back = cps.dual().unwrap().dual().unwrap();
        let (LatticeData::Euclidean(a), LatticeData::Euclidean(b)) = (cps.data(), back.data()) else {
            return Err(TestCaseError::fail("scheme lost its Euclidean lattice"));
        };
        for i in 0..2 {
            for j in 0..2 {
                prop_assert!((a.basis()[(i, j)] - b.basis()[(i, j)]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn poisson_summation_on_random_lattices(scale in 0.5f64..4.0, rows in lattice_2d(0.5, 4.0)) {
        for l in [EuclideanLattice::from_rows(&[vec![scale]]).unwrap(), EuclideanLattice::from_rows(&rows).unwrap()] {
            let d = l.dim();
            let patch = SymbolicComb::lattice(l.clone(), Complex64::new(1.0, 0.0))
                .materialize(&RegionBox::centered(d, if d == 1 { 400.0 } else { 120.0 }).unwrap())
                .unwrap();
            let vh = VanHoveSpec::new(d, 1.0).unwrap();
            let (n1, n2) = if d == 1 { (200, 400) } else { (60, 120) };
            let dual = l.dual();
            let tol = 2.0 * vh.boundary_ratio(n1, l.cell_extent()).unwrap();
            let half: Vec<f64> = (0..d).map(|i| (0..d).map(|j| 0.5 * dual.basis()[(i, j)]).sum()).collect();
            for coords in [[0i64, 0], [1, 0], [0, 1], [-1, 1], [2, -1]] {
                let k = dual.position(&coords[..d]);
                let c = fb_coefficient(&patch, &Character::real(k.clone()), &vh, n1).unwrap();
                prop_assert!((c - l.density()).norm() <= tol, "k = {:?}: {} vs {}", k, c, l.density());
                let off: Vec<f64> = k.iter().zip(&half).map(|(a, b)| a + b).collect();
                let chi = Character::real(off.clone());
                let a = fb_coefficient(&patch, &chi, &vh, n1).unwrap().norm();
                let b = fb_coefficient(&patch, &chi, &vh, n2).unwrap().norm();
                prop_assert!(a <= tol, "off-dual {:?}: {}", off, a);
                prop_assert!(b <= 0.5 * a + 1e-12 || b <= tol / 4.0, "off-dual {:?}: {} then {}", off, a, b);
            }
        }
    }
}
