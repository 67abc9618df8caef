use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{dot_turns, unit_phase};
use crate::lattice::EuclideanLattice;
use crate::measure::{Coset, CrystComb, PointMeasurePatch, TrigPoly};

pub const DEFAULT_STRUCTURE_TOL: f64 = 1e-9;
pub const DEFAULT_TRANSLATE_CAP: usize = 64;
const GCD_ITERATIONS: usize = 64;
const MAX_GCD_QUOTIENT: f64 = 1e6;
const MAX_PERIOD_CANDIDATES: usize = 4096;

/// A crystallographic description `supp ⊆ Γ + F` of a patch, with optional polynomial
/// weights per coset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureFit {
    /// Rows are the generators of `Γ`.
    pub lattice_rows: Vec<Vec<f64>>,
    pub translates: Vec<Vec<f64>>,
    /// Largest distance of a support point from `Γ + F`.
    pub max_residual: f64,
    pub trig_polys: Option<Vec<TrigPoly>>,
    /// `sup |P_i(x) - a(x)|` over the coset points of the patch.
    pub fit_residual: Option<f64>,
    /// More frequencies exceeded the threshold than the cap allowed on some coset.
    pub overfit: bool,
}

impl StructureFit {
    pub fn lattice(&self) -> Result<EuclideanLattice> {
        EuclideanLattice::from_rows(&self.lattice_rows)
    }

    /// The fitted comb; needs `trig_polys`.
    pub fn comb(&self) -> Result<CrystComb> {
        let polys = self
            .trig_polys
            .as_ref()
            .ok_or_else(|| Error::Domain("structure has no fitted polynomials".into()))?;
        let cosets = self
            .translates
            .iter()
            .zip(polys)
            .map(|(t, p)| Coset { translate: t.clone(), poly: p.clone() })
            .collect();
        CrystComb::new(self.lattice()?, cosets)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureDetection {
    pub found: bool,
    pub reason: String,
    /// The accepted structure, or the best attempt when nothing was accepted.
    pub best: Option<StructureFit>,
}

/// Approximate gcd of positive reals by the Euclidean algorithm; `None` after the
/// iteration cap or when the result is below `max(values) / 10^6`.
pub fn approximate_gcd(values: &[f64], tol: f64) -> Option<f64> {
    let mut g: Option<f64> = None;
    let top = values.iter().copied().fold(0.0, f64::max);
    for &v in values.iter().filter(|v| **v > tol) {
        g = Some(match g {
            None => v,
            Some(g) => pair_gcd(g, v, tol)?,
        });
    }
    g.filter(|g| *g * MAX_GCD_QUOTIENT >= top)
}

fn pair_gcd(a: f64, b: f64, tol: f64) -> Option<f64> {
    let (mut a, mut b) = if a >= b { (a, b) } else { (b, a) };
    for _ in 0..GCD_ITERATIONS {
        if b <= tol {
            return if a > tol { Some(a) } else { None };
        }
        let mut r = a % b;
        if b - r <= tol {
            r = 0.0;
        }
        a = b;
        b = r;
    }
    None
}

/// `x + g ∈ Λ` (within `tol`) for every `x ∈ Λ` with `x + g ≤ max Λ`.
fn is_period(sorted: &[f64], g: f64, tol: f64) -> bool {
    let top = *sorted.last().unwrap();
    sorted.iter().take_while(|x| **x + g <= top + tol).all(|x| {
        let y = x + g;
        let i = sorted.partition_point(|v| *v < y - tol);
        i < sorted.len() && (sorted[i] - y).abs() <= tol
    })
}

/// Residues of the points mod `g`, clustered with wrap-around; returns cluster
/// representatives (smallest member) and the largest circular spread.
fn residue_classes(sorted: &[f64], g: f64, tol: f64) -> (Vec<f64>, f64) {
    let lattice = EuclideanLattice::scaled_integer(1, g).unwrap().with_tolerance(tol);
    let mut res: Vec<f64> = sorted.iter().map(|x| lattice.reduce_mod(&[*x]).0[0]).collect();
    res.sort_by(f64::total_cmp);
    let mut clusters: Vec<Vec<f64>> = Vec::new();
    for r in res {
        match clusters.last_mut() {
            Some(c) if r - *c.last().unwrap() <= tol => c.push(r),
            _ => clusters.push(vec![r]),
        }
    }
    if clusters.len() > 1 {
        let first = clusters[0][0];
        let last = *clusters.last().unwrap().last().unwrap();
        if first + g - last <= tol {
            let tail = clusters.pop().unwrap();
            clusters[0].splice(0..0, tail.into_iter().map(|v| v - g));
        }
    }
    let reps: Vec<f64> = clusters.iter().map(|c| c[0]).collect();
    let spread = clusters.iter().map(|c| c.last().unwrap() - c[0]).fold(0.0, f64::max);
    (reps, spread)
}

/// Searches a one-dimensional support for `Λ ⊆ gZ + F` with minimal period `g` and
/// `|F| ≤ cap`. Periods are tried among multiples of the approximate gcd of the gaps
/// and, failing that, among the offsets `x_j - x_0`; a period must be at most half the
/// extent of the patch.
pub fn detect_structure_1d(points: &[f64], tol: f64, cap: usize) -> Result<StructureDetection> {
    let mut xs: Vec<f64> = points.to_vec();
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| (*a - *b).abs() <= tol);
    if xs.len() < 3 {
        return Err(Error::Domain(format!("structure detection needs at least 3 points, got {}", xs.len())));
    }
    let extent = xs[xs.len() - 1] - xs[0];
    let gaps: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    let g0 = approximate_gcd(&gaps, tol);

    let mut candidates: Vec<f64> = Vec::new();
    if let Some(g0) = g0 {
        let m_max = ((extent / 2.0) / g0 + 1e-9).floor() as usize;
        candidates.extend((1..=m_max.min(MAX_PERIOD_CANDIDATES)).map(|m| m as f64 * g0));
    }
    candidates.extend(xs.iter().skip(1).take(cap + 1).map(|x| x - xs[0]).filter(|g| *g <= extent / 2.0 + tol));
    candidates.sort_by(f64::total_cmp);
    candidates.dedup_by(|a, b| (*a - *b).abs() <= tol);

    let Some(g) = candidates.iter().copied().find(|g| is_period(&xs, *g, tol)) else {
        let reason = match g0 {
            Some(g0) => format!("no period up to half the extent; gap gcd {g0}"),
            None => "gaps are incommensurate and no offset is a period".to_string(),
        };
        return Ok(StructureDetection { found: false, reason, best: None });
    };
    let (reps, spread) = residue_classes(&xs, g, tol);
    let fit = StructureFit {
        lattice_rows: vec![vec![g]],
        translates: reps.iter().map(|r| vec![*r]).collect(),
        max_residual: spread,
        trig_polys: None,
        fit_residual: None,
        overfit: false,
    };
    if reps.len() > cap {
        return Ok(StructureDetection {
            found: false,
            reason: format!("period {g} needs {} translates, above the cap {cap}", reps.len()),
            best: Some(fit),
        });
    }
    Ok(StructureDetection { found: true, reason: format!("period {g} with {} translates", reps.len()), best: Some(fit) })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verification {
    pub max_residual: f64,
    pub passed: bool,
    /// Support point furthest from `Γ + F`.
    pub worst_point: Option<Vec<f64>>,
}

/// `max_{x ∈ supp} min_i dist(x - τ_i, Γ)`.
pub fn verify_structure(patch: &PointMeasurePatch, lattice: &EuclideanLattice, translates: &[Vec<f64>], tol: f64) -> Result<Verification> {
    if translates.is_empty() {
        return Err(Error::Domain("no translates to verify against".into()));
    }
    if lattice.dim() != patch.dim() || translates.iter().any(|t| t.len() != patch.dim()) {
        return Err(Error::Shape("structure and patch differ in dimension".into()));
    }
    let mut worst = (0.0, None);
    for p in patch.points() {
        let r = translates
            .iter()
            .map(|t| lattice.distance_to_lattice(&sub(&p.position, t)))
            .fold(f64::INFINITY, f64::min);
        if r > worst.0 {
            worst = (r, Some(p.position.clone()));
        }
    }
    Ok(Verification { max_residual: worst.0, passed: worst.0 <= tol, worst_point: worst.1 })
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitOptions {
    /// DFT bins below `amplitude_threshold · max |A|` are dropped.
    pub amplitude_threshold: f64,
    pub frequency_cap: usize,
    pub tol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { amplitude_threshold: 1e-8, frequency_cap: 16, tol: DEFAULT_STRUCTURE_TOL }
    }
}

const MIN_BLOCK_POINTS: usize = 8;
const MAX_BLOCK_POINTS: usize = 4096;

/// Fits a trigonometric polynomial to the weights on each coset `Γ + τ_i`: a DFT over a
/// power-of-two block of coset points gives the frequencies in `Γ⁰`, and a least-squares
/// solve over all coset points in the patch refines the coefficients.
pub fn fit_trig_polys(
    patch: &PointMeasurePatch,
    lattice: &EuclideanLattice,
    translates: &[Vec<f64>],
    opts: &FitOptions,
) -> Result<StructureFit> {
    let verification = verify_structure(patch, lattice, translates, opts.tol)?;
    let d = lattice.dim();
    let residues: Vec<Vec<f64>> = translates.iter().map(|t| lattice.reduce_mod(t).0).collect();
    let mut coset_points: Vec<HashMap<Vec<i64>, Complex64>> = vec![HashMap::new(); residues.len()];
    for p in patch.points() {
        for (i, t) in residues.iter().enumerate() {
            let y = sub(&p.position, t);
            let c: Vec<i64> = lattice.fractional(&y).iter().map(|f| f.round() as i64).collect();
            let q = lattice.position(&c);
            if y.iter().zip(&q).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt() <= opts.tol.max(1e-7) {
                coset_points[i].insert(c, p.weight);
                break;
            }
        }
    }

    let mut polys = Vec::with_capacity(residues.len());
    let mut fit_residual = 0.0f64;
    let mut overfit = false;
    for (i, t) in residues.iter().enumerate() {
        let expected = lattice.points_in_box(&patch.region().translated(&t.iter().map(|v| -v).collect::<Vec<_>>()))?;
        let pts = &coset_points[i];
        if expected.iter().any(|q| !pts.contains_key(&q.coords)) {
            return Err(Error::Coverage(format!("coset {i} is not fully present in the patch region")));
        }
        let (corner, side) = find_block(&expected, lattice, patch, t)
            .ok_or_else(|| Error::Coverage(format!("coset {i} has no block of {MIN_BLOCK_POINTS} lattice points inside the region")))?;
        let values = block_values(pts, &corner, side, d);
        let spectrum = dft(&values, side, d);
        let peak = spectrum.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut bins: Vec<(usize, f64)> = spectrum
            .iter()
            .enumerate()
            .map(|(k, c)| (k, c.norm()))
            .filter(|(_, a)| peak > 0.0 && *a > opts.amplitude_threshold * peak)
            .collect();
        bins.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        if bins.len() > opts.frequency_cap {
            overfit = true;
            bins.truncate(opts.frequency_cap);
        }
        let x0: Vec<f64> = lattice.position(&corner).iter().zip(t).map(|(a, b)| a + b).collect();
        let freqs: Vec<Vec<f64>> = bins
            .iter()
            .map(|(k, _)| {
                let f: Vec<f64> = unflatten(*k, side, d).iter().map(|v| *v as f64 / side as f64).collect();
                dual_position(lattice, &f)
            })
            .collect();
        let initial: Vec<Complex64> =
            bins.iter().zip(&freqs).map(|((k, _), chi)| spectrum[*k] * unit_phase(-dot_turns(chi, &x0))).collect();

        let samples: Vec<(Vec<f64>, Complex64)> = {
            let mut v: Vec<(Vec<i64>, Complex64)> = pts.iter().map(|(c, w)| (c.clone(), *w)).collect();
            v.sort_by(|a, b| a.0.cmp(&b.0));
            v.into_iter()
                .map(|(c, w)| (lattice.position(&c).iter().zip(t).map(|(a, b)| a + b).collect(), w))
                .collect()
        };
        let coeffs = least_squares(&freqs, &samples).unwrap_or(initial);
        let poly = TrigPoly::new(freqs.into_iter().zip(coeffs).collect());
        for (x, w) in &samples {
            fit_residual = fit_residual.max((poly.evaluate(x) - w).norm());
        }
        polys.push(poly);
    }
    Ok(StructureFit {
        lattice_rows: lattice.rows(),
        translates: residues,
        max_residual: verification.max_residual,
        trig_polys: Some(polys),
        fit_residual: Some(fit_residual),
        overfit,
    })
}

fn dual_position(lattice: &EuclideanLattice, frac: &[f64]) -> Vec<f64> {
    // Γ⁰ = B^{-T} Z^d
    let inv = lattice.inverse();
    let d = frac.len();
    (0..d).map(|r| (0..d).map(|c| inv[(c, r)] * frac[c]).sum()).collect()
}

fn find_block(
    expected: &[crate::lattice::LatticePoint],
    lattice: &EuclideanLattice,
    patch: &PointMeasurePatch,
    t: &[f64],
) -> Option<(Vec<i64>, usize)> {
    let d = lattice.dim();
    let present: std::collections::HashSet<&Vec<i64>> = expected.iter().map(|q| &q.coords).collect();
    let centre: Vec<i64> = lattice
        .fractional(&sub(&patch.region().center(), t))
        .iter()
        .map(|f| f.round() as i64)
        .collect();
    let min_corner: Vec<i64> = (0..d).map(|i| expected.iter().map(|q| q.coords[i]).min().unwrap_or(0)).collect();
    let mut side = 1usize;
    while side.pow(d as u32) * 2usize.pow(d as u32) <= MAX_BLOCK_POINTS {
        side *= 2;
    }
    while side.pow(d as u32) >= MIN_BLOCK_POINTS {
        let half = (side / 2) as i64;
        for corner in [centre.iter().map(|c| c - half).collect::<Vec<_>>(), min_corner.clone()] {
            let ok = (0..side.pow(d as u32)).all(|k| {
                let m: Vec<i64> = unflatten(k, side, d).iter().zip(&corner).map(|(a, b)| *a as i64 + b).collect();
                present.contains(&m)
            });
            if ok {
                return Some((corner, side));
            }
        }
        side /= 2;
    }
    None
}

fn unflatten(mut k: usize, side: usize, d: usize) -> Vec<usize> {
    let mut out = vec![0; d];
    for v in out.iter_mut().rev() {
        *v = k % side;
        k /= side;
    }
    out
}

fn block_values(pts: &HashMap<Vec<i64>, Complex64>, corner: &[i64], side: usize, d: usize) -> Vec<Complex64> {
    (0..side.pow(d as u32))
        .map(|k| {
            let m: Vec<i64> = unflatten(k, side, d).iter().zip(corner).map(|(a, b)| *a as i64 + b).collect();
            pts[&m]
        })
        .collect()
}

/// `A(f) = side^{-d} Σ_m a(m) e^{-2πi f·m / side}`, separable along each axis.
fn dft(values: &[Complex64], side: usize, d: usize) -> Vec<Complex64> {
    let twiddle: Vec<Complex64> = (0..side).map(|j| unit_phase(-(j as f64) / side as f64)).collect();
    let mut data = values.to_vec();
    let mut stride = 1usize;
    for _ in 0..d {
        let mut next = vec![Complex64::new(0.0, 0.0); data.len()];
        for base in 0..data.len() {
            if !(base / stride).is_multiple_of(side) {
                continue;
            }
            for f in 0..side {
                let mut acc = Complex64::new(0.0, 0.0);
                for m in 0..side {
                    acc += data[base + m * stride] * twiddle[(f * m) % side];
                }
                next[base + f * stride] = acc / side as f64;
            }
        }
        data = next;
        stride *= side;
    }
    data
}

fn least_squares(freqs: &[Vec<f64>], samples: &[(Vec<f64>, Complex64)]) -> Option<Vec<Complex64>> {
    let m = freqs.len();
    if m == 0 {
        return Some(Vec::new());
    }
    let mut gram = DMatrix::<Complex64>::zeros(m, m);
    let mut rhs = DMatrix::<Complex64>::zeros(m, 1);
    for (x, a) in samples {
        let e: Vec<Complex64> = freqs.iter().map(|f| unit_phase(dot_turns(f, x))).collect();
        for j in 0..m {
            for k in 0..m {
                gram[(j, k)] += e[j].conj() * e[k];
            }
            rhs[(j, 0)] += e[j].conj() * a;
        }
    }
    let sol = gram.lu().solve(&rhs)?;
    let out: Vec<Complex64> = sol.iter().copied().collect();
    out.iter().all(|c| c.re.is_finite() && c.im.is_finite()).then_some(out)
}
