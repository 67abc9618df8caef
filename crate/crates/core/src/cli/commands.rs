use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value as Json};

use crate::classify::{self, classify_patch, dichotomy::dichotomy_report_with, ClassifyOptions, FitOptions};
use crate::error::{Error, Result};
use crate::group::{Character, RegionBox};
use crate::harmonic::{
    diffraction_numeric, diffraction_side_by_side, dual_projection_candidates, eberlein_autocorrelation, exact_ft, exact_spectrum,
    fb_coefficient, fb_spectrum, FourierBohrSpectrum, VanHoveSpec,
};
use crate::lattice::EuclideanLattice;
use crate::measure::io::{fmt_f64, write_patch_csv, write_patch_csv_with};
use crate::measure::{PointMeasurePatch, SymbolicComb};

use super::config::{Candidates, SceneConfig, Source};

/// A finished artifact: file suffix and contents.
pub struct Artifact {
    pub suffix: String,
    pub bytes: Vec<u8>,
}

/// Outcome of a command: artifacts plus whether the run met its own success criterion.
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    pub ok: bool,
    pub message: Option<String>,
}

impl Outcome {
    fn ok(artifacts: Vec<Artifact>) -> Self {
        Outcome { artifacts, ok: true, message: None }
    }
}

pub struct Ctx<'a> {
    pub cfg: &'a SceneConfig,
    pub command: &'a str,
}

impl Ctx<'_> {
    fn vh(&self) -> Result<VanHoveSpec> {
        VanHoveSpec::new(self.cfg.dim(), self.cfg.run.vh_scale)
    }

    fn meta_lines(&self) -> Vec<String> {
        let r = &self.cfg.run;
        vec![
            format!("generator: aperiodic {}", env!("CARGO_PKG_VERSION")),
            format!("command: {}", self.command),
            format!("config_sha256: {}", self.cfg.sha256),
            format!("vh_scale: {}", fmt_f64(r.vh_scale)),
            format!("vh_n: {}", r.vh_n),
        ]
    }

    fn meta_json(&self) -> Json {
        json!({
            "generator": format!("aperiodic {}", env!("CARGO_PKG_VERSION")),
            "command": self.command,
            "config_sha256": self.cfg.sha256,
            "vh_scale": self.cfg.run.vh_scale,
            "vh_n": self.cfg.run.vh_n,
        })
    }

    fn json<T: Serialize>(&self, suffix: &str, result: &T) -> Result<Artifact> {
        let doc = json!({ "meta": self.meta_json(), "result": result });
        let mut bytes = serde_json::to_vec_pretty(&doc).map_err(|e| Error::Io(e.to_string()))?;
        bytes.push(b'\n');
        Ok(Artifact { suffix: suffix.into(), bytes })
    }

    fn comb(&self) -> Option<&SymbolicComb> {
        match &self.cfg.source {
            Source::Comb { comb, .. } => Some(comb),
            Source::Points(_) => None,
        }
    }

    fn patch(&self) -> Result<PointMeasurePatch> {
        let region = &self.cfg.run.region;
        match &self.cfg.source {
            Source::Comb { comb, .. } => comb.materialize(region),
            Source::Points(pts) => PointMeasurePatch::new(
                region.clone(),
                pts.iter()
                    .filter(|p| region.contains(p, crate::measure::patch::REGION_TOL))
                    .map(|p| (p.clone(), Complex64::new(1.0, 0.0)))
                    .collect(),
            ),
        }
    }

    /// Dual projections for model combs, exact support points otherwise.
    fn structural(&self, window: &RegionBox, floor: f64) -> Result<Vec<Character>> {
        match self.comb() {
            Some(SymbolicComb::Model(m)) => dual_projection_candidates(&m.cps, window, self.cfg.run.star_radius),
            Some(c) => Ok(exact_spectrum(c, window, floor)?.entries.into_iter().map(|e| Character::real(e.freq)).collect()),
            None => Ok(Vec::new()),
        }
    }

    fn candidates(&self) -> Result<Vec<Character>> {
        let w = &self.cfg.run.frequency_window;
        match &self.cfg.run.candidates {
            Candidates::Explicit(v) => Ok(v.iter().map(|f| Character::real(f.clone())).collect()),
            Candidates::Grid(step) => Ok(grid(w, *step)?.into_iter().map(Character::real).collect()),
            Candidates::Structural => {
                if self.comb().is_none() {
                    return Err(Error::Domain("a [points] scene needs `candidates = \"grid\"` or an explicit list".into()));
                }
                self.structural(w, 1e-12)
            }
        }
    }
}

fn grid(w: &RegionBox, step: f64) -> Result<Vec<Vec<f64>>> {
    let counts: Vec<usize> = (0..w.dim()).map(|i| (w.side(i) / step + 1e-9).floor() as usize + 1).collect();
    let total: usize = counts.iter().product();
    if total > 2_000_000 {
        return Err(Error::Domain(format!("frequency grid would have {total} points")));
    }
    let mut out = Vec::with_capacity(total);
    let mut idx = vec![0usize; w.dim()];
    for _ in 0..total {
        out.push(idx.iter().enumerate().map(|(i, k)| w.lo[i] + *k as f64 * step).collect());
        for (i, k) in idx.iter_mut().enumerate() {
            *k += 1;
            if *k < counts[i] {
                break;
            }
            *k = 0;
        }
    }
    Ok(out)
}

fn csv_spectrum(ctx: &Ctx<'_>, s: &FourierBohrSpectrum, suffix: &str) -> Result<Artifact> {
    let meta: Vec<String> = ctx.meta_lines().into_iter().filter(|m| !m.starts_with("vh_")).collect();
    let mut bytes = Vec::new();
    s.write_csv(&meta, &mut bytes)?;
    Ok(Artifact { suffix: suffix.into(), bytes })
}

pub fn points(ctx: &Ctx<'_>) -> Result<Outcome> {
    let patch = ctx.patch()?;
    let mut bytes = Vec::new();
    write_patch_csv(&patch, &ctx.meta_lines(), &mut bytes)?;
    Ok(Outcome::ok(vec![Artifact { suffix: "points.csv".into(), bytes }]))
}

pub fn density(ctx: &Ctx<'_>) -> Result<Outcome> {
    let patch = ctx.patch()?;
    let vh = ctx.vh()?;
    let profile = classify::density_profile(&patch, &vh, &ctx.cfg.run.n_list)?;
    let (model, estimate) = match &ctx.cfg.source {
        Source::Comb { comb: SymbolicComb::Model(m), window: Some(w) } => {
            (Some(m.cps.model_set_density(w)?), Some(m.cps.density_estimate(w, &ctx.cfg.run.region)?))
        }
        _ => (None, None),
    };
    let support = patch.points().iter().filter(|p| p.weight.norm() > crate::cps::weight::ZERO_WEIGHT).count();
    let result = json!({
        "profile": profile,
        "model_set_density": model,
        "density_estimate": estimate,
        "points": patch.len(),
        "support_points": support,
        "region": ctx.cfg.run.region,
    });
    Ok(Outcome::ok(vec![ctx.json("density.json", &result)?]))
}

pub fn fb(ctx: &Ctx<'_>) -> Result<Outcome> {
    let patch = ctx.patch()?;
    let cands = ctx.candidates()?;
    let s = fb_spectrum(&patch, &cands, &ctx.vh()?, ctx.cfg.run.vh_n, ctx.cfg.run.coefficient_threshold)?;
    Ok(Outcome::ok(vec![csv_spectrum(ctx, &s, "fb.csv")?]))
}

pub fn describe(comb: &SymbolicComb) -> Json {
    match comb {
        SymbolicComb::Lattice { lattice, amplitude } => json!({
            "kind": "lattice",
            "basis_rows": lattice.rows(),
            "density": lattice.density(),
            "amplitude": [amplitude.re, amplitude.im],
        }),
        SymbolicComb::Cryst(c) => json!({
            "kind": "cryst",
            "basis_rows": c.lattice().rows(),
            "density": c.lattice().density(),
            "cosets": c.cosets().iter().map(|k| json!({
                "translate": k.translate,
                "terms": k.poly.terms.iter().map(|t| json!({"freq": t.freq, "re": t.coeff.re, "im": t.coeff.im})).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        }),
        SymbolicComb::Model(m) => json!({
            "kind": "model",
            "physical_dim": m.cps.physical_dim(),
            "internal": m.cps.internal().to_string(),
            "rank": m.cps.rank(),
            "dens": m.cps.dens(),
            "weight": m.weight,
            "amplitude": [m.amplitude.re, m.amplitude.im],
            "offset": m.offset,
            "modulation": m.modulation,
        }),
    }
}

pub fn exact(ctx: &Ctx<'_>) -> Result<Outcome> {
    let comb = ctx.comb().ok_or_else(|| Error::UnsupportedTransform("exact transforms need a [cps] or [comb] scene".into()))?;
    let ft = exact_ft(comb)?;
    let spectrum = exact_spectrum(comb, &ctx.cfg.run.frequency_window, ctx.cfg.run.coefficient_threshold.max(1e-12))?;
    let result = json!({
        "input": describe(comb),
        "transform": describe(&ft),
        "window": ctx.cfg.run.frequency_window,
        "atoms": spectrum.len(),
    });
    Ok(Outcome::ok(vec![ctx.json("exact_ft.json", &result)?, csv_spectrum(ctx, &spectrum, "exact_ft.csv")?]))
}

pub fn autocorr(ctx: &Ctx<'_>) -> Result<Outcome> {
    let patch = ctx.patch()?;
    let g = eberlein_autocorrelation(&patch, &ctx.vh()?, ctx.cfg.run.vh_n, ctx.cfg.run.autocorr_radius)?;
    let mut bytes = Vec::new();
    match ctx.comb() {
        Some(SymbolicComb::Model(m)) if m.autocorrelation_weight().is_ok() => {
            let exact: Vec<Complex64> = g
                .points()
                .iter()
                .map(|p| m.autocorrelation_at(p.coords.as_ref().expect("model patches carry coordinates")))
                .collect::<Result<_>>()?;
            write_patch_csv_with(
                &g,
                &ctx.meta_lines(),
                &["re_exact", "im_exact", "abs_diff"],
                |i| {
                    let e = exact[i];
                    vec![fmt_f64(e.re), fmt_f64(e.im), fmt_f64((g.points()[i].weight - e).norm())]
                },
                &mut bytes,
            )?;
        }
        _ => write_patch_csv(&g, &ctx.meta_lines(), &mut bytes)?,
    }
    Ok(Outcome::ok(vec![Artifact { suffix: "autocorr.csv".into(), bytes }]))
}

pub fn diffract(ctx: &Ctx<'_>) -> Result<Outcome> {
    let patch = ctx.patch()?;
    let vh = ctx.vh()?;
    let run = &ctx.cfg.run;
    let mut out = String::new();
    for m in ctx.meta_lines() {
        out.push_str(&format!("# {m}\n"));
    }
    out.push_str(&format!("# intensity_threshold: {}\n", fmt_f64(run.intensity_threshold)));
    let mut ok = true;
    let mut message = None;
    let d = ctx.cfg.dim();
    let freq_header: Vec<String> = (1..=d).map(|i| format!("re_freq_{i}")).collect();
    match ctx.comb() {
        Some(comb) => {
            let rows = diffraction_side_by_side(comb, &patch, &vh, run.vh_n, &run.frequency_window, run.intensity_threshold)?;
            let worst = rows.iter().map(|r| r.abs_diff).fold(0.0, f64::max);
            out.push_str(&format!("# max_abs_diff: {}\n", fmt_f64(worst)));
            out.push_str(&format!("{},intensity_exact,intensity_numeric,abs_diff\n", freq_header.join(",")));
            for r in &rows {
                let f: Vec<String> = r.freq.iter().map(|x| fmt_f64(*x)).collect();
                out.push_str(&format!("{},{},{},{}\n", f.join(","), fmt_f64(r.intensity_exact), fmt_f64(r.intensity_numeric), fmt_f64(r.abs_diff)));
            }
            if worst >= run.tol {
                ok = false;
                message = Some(format!("max |exact - numeric| = {worst} is not below the tolerance {}", run.tol));
            }
        }
        None => {
            let s = diffraction_numeric(&fb_spectrum(&patch, &ctx.candidates()?, &vh, run.vh_n, run.intensity_threshold.sqrt())?);
            out.push_str(&format!("{},intensity_numeric\n", freq_header.join(",")));
            for e in &s.entries {
                let f: Vec<String> = e.freq.iter().map(|x| fmt_f64(*x)).collect();
                out.push_str(&format!("{},{}\n", f.join(","), fmt_f64(e.coeff.re)));
            }
        }
    }
    Ok(Outcome { artifacts: vec![Artifact { suffix: "diffract.csv".into(), bytes: out.into_bytes() }], ok, message })
}

pub fn classify(ctx: &Ctx<'_>) -> Result<Outcome> {
    let patch = ctx.patch()?;
    let run = &ctx.cfg.run;
    let opts = ClassifyOptions {
        vh: ctx.vh()?,
        n_list: run.n_list.clone(),
        k_box: run.k_box.clone(),
        meyer_radius: run.meyer_radius,
        meyer_tol: run.meyer_tol,
        structure_tol: run.structure_tol,
        translate_cap: run.translate_cap,
        dichotomy: Some((run.frequency_window.clone(), run.thresholds.clone())),
        structural: ctx.structural(&run.frequency_window, *run.thresholds.iter().min_by(|a, b| a.total_cmp(b)).unwrap() / 4.0)?,
        fit: FitOptions { tol: run.structure_tol, ..FitOptions::default() },
    };
    let report = classify_patch(&patch, &opts)?;
    let found = report.structure.as_ref().is_some_and(|s| s.found);
    let (ok, message) = if run.require_structure && !found {
        (false, Some("no lattice-plus-translates structure found, but the scene requires one".to_string()))
    } else {
        (true, None)
    };
    Ok(Outcome { artifacts: vec![ctx.json("classify.json", &report)?], ok, message })
}

pub fn dichotomy(ctx: &Ctx<'_>) -> Result<Outcome> {
    let patch = ctx.patch()?;
    let run = &ctx.cfg.run;
    let eps_min = run.thresholds.iter().copied().fold(f64::INFINITY, f64::min);
    let structural = ctx.structural(&run.frequency_window, eps_min / 4.0)?;
    let report = dichotomy_report_with(&patch, &ctx.vh()?, run.vh_n, &run.frequency_window, &run.thresholds, &structural, run.scan)?;
    Ok(Outcome::ok(vec![ctx.json("dichotomy.json", &report)?]))
}

#[derive(Debug, Clone, Serialize)]
struct PsfRow {
    freq: Vec<f64>,
    on_dual: bool,
    exact_re: f64,
    exact_im: f64,
    numeric_re: f64,
    numeric_im: f64,
    error: f64,
}

/// Five dual-lattice frequencies closest to the origin, and the same shifted by half a
/// dual cell, where the transform vanishes.
pub fn psf_frequencies(lattice: &EuclideanLattice) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let dual = lattice.dual();
    let d = dual.dim();
    let r = 2.5 * dual.cell_extent();
    let mut pts: Vec<Vec<f64>> = dual.points_in_box(&RegionBox::centered(d, r)?)?.into_iter().map(|p| p.position).collect();
    pts.sort_by(|a, b| {
        let na: f64 = a.iter().map(|x| x * x).sum();
        let nb: f64 = b.iter().map(|x| x * x).sum();
        na.total_cmp(&nb).then_with(|| crate::measure::patch::lex_cmp(a, b))
    });
    pts.truncate(5);
    let half: Vec<f64> = {
        let h = vec![0.5; d];
        let b = dual.basis();
        (0..d).map(|i| (0..d).map(|j| b[(i, j)] * h[j]).sum()).collect()
    };
    let off = pts.iter().map(|p| p.iter().zip(&half).map(|(a, b)| a + b).collect()).collect();
    Ok((pts, off))
}

pub fn psf_check(ctx: &Ctx<'_>) -> Result<Outcome> {
    let Some(SymbolicComb::Lattice { lattice, amplitude }) = ctx.comb() else {
        return Err(Error::UnsupportedTransform("psf-check needs a [comb] scene of kind \"lattice\"".into()));
    };
    let patch = ctx.patch()?;
    let vh = ctx.vh()?;
    let n = ctx.cfg.run.vh_n;
    let (on, off) = psf_frequencies(lattice)?;
    let expected = amplitude * lattice.density();
    let mut rows = Vec::new();
    for (freqs, on_dual) in [(on, true), (off, false)] {
        for f in freqs {
            let c = fb_coefficient(&patch, &Character::real(f.clone()), &vh, n)?;
            let e = if on_dual { expected } else { Complex64::new(0.0, 0.0) };
            rows.push(PsfRow { freq: f, on_dual, exact_re: e.re, exact_im: e.im, numeric_re: c.re, numeric_im: c.im, error: (c - e).norm() });
        }
    }
    let worst = rows.iter().map(|r| r.error).fold(0.0, f64::max);
    let pass = worst < ctx.cfg.run.tol;
    let result = json!({
        "density": lattice.density(),
        "amplitude": [amplitude.re, amplitude.im],
        "vh_n": n,
        "tolerance": ctx.cfg.run.tol,
        "max_error": worst,
        "pass": pass,
        "rows": rows,
    });
    let message = (!pass).then(|| format!("max error {worst} is not below the tolerance {}", ctx.cfg.run.tol));
    Ok(Outcome { artifacts: vec![ctx.json("psf_check.json", &result)?], ok: pass, message })
}
