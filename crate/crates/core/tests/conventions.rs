//! Sign and normalisation conventions, fixed against the Fourier–Bohr average.

use aperiodic::cps::{golden_ratio, CutProjectScheme, WeightFunction, Window};
use aperiodic::group::{Character, RegionBox};
use aperiodic::harmonic::{exact_ft, exact_spectrum, fb_coefficient, VanHoveSpec};
use aperiodic::lattice::EuclideanLattice;
use aperiodic::measure::{Coset, SymbolicComb, TrigPoly};
use num_complex::Complex64;

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

#[test]
fn sign_lock_even_integers() {
    let comb = SymbolicComb::lattice(EuclideanLattice::scaled_integer(1, 2.0).unwrap(), one());
    let ft = exact_ft(&comb).unwrap();
    let SymbolicComb::Lattice { lattice, amplitude } = &ft else { panic!("PSF keeps lattice combs") };
    assert!((lattice.basis()[(0, 0)] - 0.5).abs() < 1e-15);
    assert!((amplitude - Complex64::new(0.5, 0.0)).norm() < 1e-15);

    let patch = comb.materialize(&RegionBox::centered(1, 200.0).unwrap()).unwrap();
    let vh = VanHoveSpec::new(1, 1.0).unwrap();
    for k in [0.0, 0.5, 1.0] {
        let c = fb_coefficient(&patch, &Character::real(vec![k]), &vh, 200).unwrap();
        assert!((c - amplitude).norm() < 5e-3, "k = {k}: {c}");
    }
    let off = fb_coefficient(&patch, &Character::real(vec![0.25]), &vh, 200).unwrap();
    assert!(off.norm() < 5e-3);
}

#[test]
fn sign_lock_translated_modulated_comb() {
    // one coset, non-symmetric translate and a complex modulation: every phase in the
    // crystallographic transform is visible
    let comb = SymbolicComb::cryst(
        EuclideanLattice::scaled_integer(1, 1.0).unwrap(),
        vec![
            Coset { translate: vec![0.3], poly: TrigPoly::new(vec![(vec![0.125], Complex64::new(1.0, 0.5))]) },
            Coset { translate: vec![0.55], poly: TrigPoly::new(vec![(vec![0.0], Complex64::new(0.0, -0.7))]) },
        ],
    )
    .unwrap();
    let patch = comb.materialize(&RegionBox::centered(1, 400.0).unwrap()).unwrap();
    let vh = VanHoveSpec::new(1, 1.0).unwrap();
    let s = exact_spectrum(&comb, &RegionBox::new(vec![-2.0], vec![2.0]).unwrap(), 1e-9).unwrap();
    assert_eq!(s.len(), 9);
    for e in &s.entries {
        let c = fb_coefficient(&patch, &Character::real(e.freq.clone()), &vh, 400).unwrap();
        assert!((c - e.coeff).norm() < 5e-3, "{:?}: numeric {c}, exact {}", e.freq, e.coeff);
    }
}

#[test]
fn sign_lock_fibonacci_model_comb() {
    let phi = golden_ratio();
    let comb = SymbolicComb::model(
        CutProjectScheme::fibonacci(),
        WeightFunction::indicator(Window::interval(-1.0, phi - 1.0).unwrap()),
    )
    .unwrap()
    .translate(&[0.37])
    .unwrap();
    let patch = comb.materialize(&RegionBox::centered(1, 2000.0).unwrap()).unwrap();
    let vh = VanHoveSpec::new(1, 1.0).unwrap();
    let s = exact_spectrum(&comb, &RegionBox::new(vec![-2.0], vec![2.0]).unwrap(), 0.05).unwrap();
    assert!(s.len() >= 6);
    for e in &s.entries {
        let c = fb_coefficient(&patch, &Character::real(e.freq.clone()), &vh, 2000).unwrap();
        assert!((c - e.coeff).norm() < 5e-3, "{:?}: numeric {c}, exact {}", e.freq, e.coeff);
    }
}
