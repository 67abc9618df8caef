//! Numerical diagnostics for point sets and weighted patches: densities, uniform
//! discreteness, lattice structure, positive definiteness and the peak-count
//! dichotomy.

pub mod density;
pub mod dichotomy;
pub mod positivity;
pub mod report;
pub mod structure;

pub use density::{
    density_profile, flc_meyer_check, separation_and_window_counts, DensityEntry, DensityProfile, MeyerReport, WindowCounts,
    DEFAULT_MEYER_TOL,
};
pub use dichotomy::{classify_counts, dichotomy_report, dichotomy_report_with, DichotomyReport, Peak};
pub use positivity::{eps_almost_periods, krein_check, AlmostPeriods, KreinReport, KreinWitness};
pub use report::{classify_patch, ClassificationReport, ClassifyOptions};
pub use structure::{
    approximate_gcd, detect_structure_1d, fit_trig_polys, verify_structure, FitOptions, StructureDetection, StructureFit,
    Verification, DEFAULT_STRUCTURE_TOL, DEFAULT_TRANSLATE_CAP,
};
