//! Design-space search for single-stage planetary gearboxes packaged with an
//! outer-rotor motor, either inside the stator (ISSPG) or stacked below the
//! motor (ESSPG).

pub mod config;
pub mod efficiency;
pub mod error;
pub mod geometry;
pub mod mass;
pub mod report;
pub mod search;
pub mod sheet;
pub mod strength;

pub use error::{ModelError, ModelResult};
