//! Risk-optimal velocity planning for merging into a priority road at a
//! T-intersection, intelligent-driver-model baselines, and a microscopic
//! merge-in simulator with sweep and evaluation tooling.

pub mod acceptance;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod idm;
pub mod profiles;
pub mod risk;
pub mod ropt;
pub mod scenario;
pub mod sim;

pub use error::{Error, Result};
