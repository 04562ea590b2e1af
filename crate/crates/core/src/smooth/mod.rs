//! Charts, jets, smooth maps and their differentials.

mod chart;
pub mod jet;
pub mod linalg;
mod map;

pub use chart::{Chart, PointVec};
pub use jet::{Jet, MAX_DEPTH};
pub use linalg::Mat;
pub use map::SmoothMap;

use crate::error::Result;

pub fn apply(f: &SmoothMap, p: &[f64]) -> Result<Vec<f64>> {
    f.apply(p)
}

pub fn pushforward(f: &SmoothMap, pv: &PointVec) -> Result<PointVec> {
    f.pushforward(pv)
}

pub fn jacobian(f: &SmoothMap, p: &[f64]) -> Result<Mat<f64>> {
    f.jacobian(p)
}
