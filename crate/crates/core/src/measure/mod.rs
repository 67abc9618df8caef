//! Pure point measures: exact symbolic combs and finite patches, with
//! [`SymbolicComb::materialize`] as the only bridge between the two.

pub mod comb;
pub mod io;
pub mod patch;

pub use comb::{Coset, CrystComb, ModelComb, SymbolicComb, TrigPoly, TrigTerm};
pub use patch::{Embedding, NormEstimate, PatchIndex, PatchPoint, PointMeasurePatch};
