use serde::Serialize;

use crate::error::Result;
use crate::group::{Character, RegionBox};
use crate::harmonic::VanHoveSpec;
use crate::measure::patch::REGION_TOL;
use crate::measure::PointMeasurePatch;

use super::density::{density_profile, flc_meyer_check, separation_and_window_counts, DensityEntry, MeyerReport};
use super::dichotomy::{dichotomy_report, DichotomyReport};
use super::structure::{detect_structure_1d, fit_trig_polys, FitOptions, StructureDetection};

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyOptions {
    pub vh: VanHoveSpec,
    /// Van Hove indices for the density profile, increasing; the last one is reported.
    pub n_list: Vec<usize>,
    /// The box `K` for the window counts.
    pub k_box: RegionBox,
    pub meyer_radius: Option<f64>,
    pub meyer_tol: f64,
    pub structure_tol: f64,
    pub translate_cap: usize,
    /// Frequency window and thresholds for the dichotomy.
    pub dichotomy: Option<(RegionBox, Vec<f64>)>,
    pub structural: Vec<Character>,
    pub fit: FitOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub min_separation: f64,
    pub max_count: usize,
    pub window: RegionBox,
    pub udens: f64,
    pub uudens: f64,
    pub density_profile: Vec<DensityEntry>,
    /// Largest window count inside each `A_n` of the profile.
    pub window_counts_by_n: Vec<(usize, usize)>,
    /// Window counts at least doubled (and exceed 2) across the profile.
    pub wud_growth_flag: bool,
    pub flc_radius_checked: Option<f64>,
    pub meyer_consistent: Option<bool>,
    pub meyer: Option<MeyerReport>,
    pub structure: Option<StructureDetection>,
    pub dichotomy: Option<DichotomyReport>,
    pub witnesses: Vec<String>,
    pub notes: Vec<String>,
}

pub fn classify_patch(patch: &PointMeasurePatch, opts: &ClassifyOptions) -> Result<ClassificationReport> {
    let mut notes = Vec::new();
    let mut witnesses = Vec::new();
    let positions = patch.positions();
    let counts = separation_and_window_counts(&positions, &opts.k_box, None)?;
    if let Some((a, b)) = &counts.closest_pair {
        witnesses.push(format!("closest pair {a:?} and {b:?} at distance {}", counts.min_separation));
    }
    witnesses.push(format!("{} points in K translated by {:?}", counts.max_count, counts.window_origin));

    let profile = density_profile(patch, &opts.vh, &opts.n_list)?;
    let last = profile.entries.last();
    let window_counts_by_n: Vec<(usize, usize)> = opts
        .n_list
        .iter()
        .map(|&n| {
            let a = opts.vh.box_at(n);
            let inner: Vec<Vec<f64>> = positions.iter().filter(|p| a.contains(p, REGION_TOL)).cloned().collect();
            let c = if inner.is_empty() { 0 } else { separation_and_window_counts(&inner, &opts.k_box, None).map(|w| w.max_count).unwrap_or(0) };
            (n, c)
        })
        .collect();
    let wud_growth_flag = match (window_counts_by_n.first(), window_counts_by_n.last()) {
        (Some(f), Some(l)) => l.1 > 2 && l.1 >= 2 * f.1,
        _ => false,
    };
    if wud_growth_flag {
        notes.push("window counts grow with the region: weak uniform discreteness is doubtful".into());
    }

    let meyer = match opts.meyer_radius {
        Some(r) => {
            let m = flc_meyer_check(patch, r, opts.meyer_tol)?;
            if let Some((a, b)) = &m.closest_pair {
                witnesses.push(format!("closest differences {a:?} and {b:?} within radius {r}"));
            }
            Some(m)
        }
        None => None,
    };

    let structure = if patch.dim() == 1 && positions.len() >= 3 {
        let xs: Vec<f64> = positions.iter().map(|p| p[0]).collect();
        let mut det = detect_structure_1d(&xs, opts.structure_tol, opts.translate_cap)?;
        if det.found {
            let best = det.best.clone().expect("accepted structures carry a fit");
            match fit_trig_polys(patch, &best.lattice()?, &best.translates, &opts.fit) {
                Ok(fit) => det.best = Some(fit),
                Err(e) => notes.push(format!("trigonometric fit skipped: {e}")),
            }
        }
        Some(det)
    } else {
        notes.push("structure detection runs in dimension 1 with at least 3 points".into());
        None
    };

    let dichotomy = match &opts.dichotomy {
        Some((w, thr)) => {
            let n = *opts.n_list.last().unwrap_or(&1);
            Some(dichotomy_report(patch, &opts.vh, n, w, thr, &opts.structural)?)
        }
        None => None,
    };

    Ok(ClassificationReport {
        min_separation: counts.min_separation,
        max_count: counts.max_count,
        window: opts.k_box.clone(),
        udens: last.map(|e| e.udens).unwrap_or(0.0),
        uudens: last.map(|e| e.uudens).unwrap_or(0.0),
        density_profile: profile.entries,
        window_counts_by_n,
        wud_growth_flag,
        flc_radius_checked: meyer.as_ref().map(|m| m.radius),
        meyer_consistent: meyer.as_ref().map(|m| m.consistent),
        meyer,
        structure,
        dichotomy,
        witnesses,
        notes,
    })
}
