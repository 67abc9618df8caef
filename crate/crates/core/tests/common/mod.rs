#![allow(dead_code)]

use std::f64::consts::PI;

use aperiodic::cps::{golden_ratio, CutProjectScheme, WeightFunction, Window};
use aperiodic::lattice::EuclideanLattice;
use aperiodic::measure::{Coset, SymbolicComb, TrigPoly};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SYNTHETIC_SEED: u64 = 0x5eed_c0b5;

pub fn fibonacci_window() -> Window {
    Window::interval(-1.0, golden_ratio() - 1.0).unwrap()
}

pub fn fibonacci_comb() -> SymbolicComb {
    SymbolicComb::model(CutProjectScheme::fibonacci(), WeightFunction::indicator(fibonacci_window())).unwrap()
}

pub fn lattice_comb(rows: &[Vec<f64>]) -> SymbolicComb {
    SymbolicComb::lattice(EuclideanLattice::from_rows(rows).unwrap(), Complex64::new(1.0, 0.0))
}

/// The three test lattices: Z, 2Z and a sheared copy of Z².
pub fn test_lattices() -> Vec<(&'static str, EuclideanLattice)> {
    vec![
        ("Z", EuclideanLattice::from_rows(&[vec![1.0]]).unwrap()),
        ("2Z", EuclideanLattice::from_rows(&[vec![2.0]]).unwrap()),
        ("sheared Z^2", EuclideanLattice::from_rows(&[vec![1.0, 0.3], vec![0.0, 1.0]]).unwrap()),
    ]
}

/// `{n + k/n : 1 ≤ n ≤ 100, 0 ≤ k < n}`, all inside `[1, 100]` (points at `n = 100`
/// stop below 101).
pub fn staircase_points(last: usize) -> Vec<f64> {
    let mut out = Vec::new();
    for n in 1..=last {
        for k in 0..n {
            let x = n as f64 + k as f64 / n as f64;
            if x <= last as f64 {
                out.push(x);
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct Synthetic {
    pub dim: usize,
    pub translates: Vec<Vec<f64>>,
    /// Per translate: frequencies (multiples of 1/8 in `[0, 1)^d`) and coefficients.
    pub polys: Vec<Vec<(Vec<f64>, Complex64)>>,
    pub comb: SymbolicComb,
}

impl Synthetic {
    pub fn lattice(&self) -> EuclideanLattice {
        EuclideanLattice::scaled_integer(self.dim, 1.0).unwrap()
    }
}

/// `count` random crystallographic combs over `Z` (first half) and `Z²` (second half):
/// at most 3 translates drawn in `(0.05, 0.95)^d` and pairwise at least `0.05` apart,
/// at most 4 frequencies on the grid `(1/8) Z^d` per coset, coefficient moduli in
/// `[0.5, 2]` with uniform phases.
pub fn synthetic_crysts(seed: u64, count: usize) -> Vec<Synthetic> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let dim = if i < count / 2 { 1 } else { 2 };
            let n_tr = rng.gen_range(1..=3);
            let mut translates: Vec<Vec<f64>> = Vec::new();
            while translates.len() < n_tr {
                let t: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.05..0.95)).collect();
                let far = translates
                    .iter()
                    .all(|s| s.iter().zip(&t).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) >= 0.05);
                if far {
                    translates.push(t);
                }
            }
            let polys: Vec<Vec<(Vec<f64>, Complex64)>> = translates
                .iter()
                .map(|_| {
                    let n_f = rng.gen_range(1..=4);
                    let mut freqs: Vec<Vec<f64>> = Vec::new();
                    while freqs.len() < n_f {
                        let f: Vec<f64> = (0..dim).map(|_| rng.gen_range(0..8) as f64 / 8.0).collect();
                        if !freqs.contains(&f) {
                            freqs.push(f);
                        }
                    }
                    freqs
                        .into_iter()
                        .map(|f| {
                            let r = rng.gen_range(0.5..=2.0);
                            let theta = rng.gen_range(0.0..2.0 * PI);
                            (f, Complex64::from_polar(r, theta))
                        })
                        .collect()
                })
                .collect();
            let cosets = translates
                .iter()
                .zip(&polys)
                .map(|(t, p)| Coset { translate: t.clone(), poly: TrigPoly::new(p.clone()) })
                .collect();
            let comb = SymbolicComb::cryst(EuclideanLattice::scaled_integer(dim, 1.0).unwrap(), cosets).unwrap();
            Synthetic { dim, translates, polys, comb }
        })
        .collect()
}
