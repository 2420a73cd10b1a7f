//! Face-width sizing from the Lewis bending equation with a velocity factor.
//!
//! The stage is sized at the sun-planet mesh: the sun torque is split equally
//! across the planets and the weaker external gear sets the form factor. All
//! gears in the stage share the resulting face width.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, ModelResult};
use crate::geometry::GearboxDesign;

/// Lewis form factor fits in circular-pitch form, `y = a - b / N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LewisFormula {
    /// 20 degree full-depth involute.
    #[default]
    FullDepth20,
    /// 14.5 degree full-depth involute.
    FullDepth14_5,
    /// 20 degree stub teeth.
    Stub20,
}

impl LewisFormula {
    pub fn form_factor(self, teeth: u32) -> f64 {
        let n = f64::from(teeth);
        match self {
            LewisFormula::FullDepth20 => 0.154 - 0.912 / n,
            LewisFormula::FullDepth14_5 => 0.124 - 0.684 / n,
            LewisFormula::Stub20 => 0.175 - 0.841 / n,
        }
    }
}

/// Barth-type velocity factor fits; `v` is pitch-line speed in m/s.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VelocityFactor {
    /// Ordinary cut teeth, 3 / (3 + v).
    #[default]
    Barth,
    /// Carefully cut teeth, 6 / (6 + v).
    CarefullyCut,
    /// Precision hobbed or shaped teeth, 5.6 / (5.6 + sqrt v).
    Precision,
}

impl VelocityFactor {
    pub fn evaluate(self, v_m_s: f64) -> f64 {
        match self {
            VelocityFactor::Barth => 3.0 / (3.0 + v_m_s),
            VelocityFactor::CarefullyCut => 6.0 / (6.0 + v_m_s),
            VelocityFactor::Precision => 5.6 / (5.6 + v_m_s.sqrt()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StrengthParams {
    /// Allowable bending stress in MPa.
    pub allowable_stress_mpa: f64,
    pub safety_factor: f64,
    pub lewis: LewisFormula,
    pub velocity: VelocityFactor,
    /// Floor applied to the computed face width, in mm.
    pub min_face_width_mm: f64,
}

impl Default for StrengthParams {
    fn default() -> Self {
        Self {
            allowable_stress_mpa: 138.0,
            safety_factor: 2.0,
            lewis: LewisFormula::FullDepth20,
            velocity: VelocityFactor::Barth,
            min_face_width_mm: 3.0,
        }
    }
}

impl StrengthParams {
    pub fn validate(&self) -> Result<(), (&'static str, String)> {
        if !(self.allowable_stress_mpa > 0.0) {
            return Err(("allowable_stress_mpa", "must be positive".into()));
        }
        if !(self.safety_factor >= 1.0) {
            return Err(("safety_factor", format!("must be at least 1, got {}", self.safety_factor)));
        }
        if !(self.min_face_width_mm > 0.0) {
            return Err(("min_face_width_mm", "must be positive".into()));
        }
        Ok(())
    }
}

/// Torque and speed applied at the sun.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadCase {
    pub sun_torque_nm: f64,
    pub sun_speed_rad_s: f64,
}

impl LoadCase {
    pub fn validate(&self) -> Result<(), (&'static str, String)> {
        if !(self.sun_torque_nm >= 0.0 && self.sun_torque_nm.is_finite()) {
            return Err(("sun_torque_nm", "must be non-negative".into()));
        }
        if !(self.sun_speed_rad_s >= 0.0 && self.sun_speed_rad_s.is_finite()) {
            return Err(("sun_speed_rad_s", "must be non-negative".into()));
        }
        Ok(())
    }
}

fn sun_pitch_radius_m(d: &GearboxDesign) -> f64 {
    d.module_mm * f64::from(d.sun_teeth) / 2.0 * 1e-3
}

/// Tangential tooth load per planet, in N.
pub fn tangential_force(load: &LoadCase, d: &GearboxDesign) -> f64 {
    load.sun_torque_nm / (f64::from(d.planets) * sun_pitch_radius_m(d))
}

pub fn lewis_form_factor(teeth: u32, formula: LewisFormula) -> f64 {
    formula.form_factor(teeth)
}

/// Sun pitch-line speed in m/s.
pub fn pitch_line_velocity(load: &LoadCase, d: &GearboxDesign) -> f64 {
    load.sun_speed_rad_s * sun_pitch_radius_m(d)
}

pub fn velocity_factor(load: &LoadCase, d: &GearboxDesign, formula: VelocityFactor) -> f64 {
    formula.evaluate(pitch_line_velocity(load, d))
}

/// Required face width in mm, `FOS F_t / (sigma y K_v P)`, floored at the
/// configured minimum.
pub fn face_width(load: &LoadCase, d: &GearboxDesign, sp: &StrengthParams) -> ModelResult<f64> {
    let y = lewis_form_factor(d.sun_teeth.min(d.planet_teeth), sp.lewis);
    let kv = velocity_factor(load, d, sp.velocity);
    let sigma = sp.allowable_stress_mpa;
    for (name, v) in [("allowable_stress_mpa", sigma), ("lewis_form_factor", y), ("velocity_factor", kv)] {
        if !(v > 0.0) {
            return Err(ModelError::InvalidParameter { name, reason: format!("must be positive, got {v}") });
        }
    }
    // N, N/mm^2 and mm give the width directly in mm
    let circular_pitch_mm = PI * d.module_mm;
    let b = sp.safety_factor * tangential_force(load, d) / (sigma * y * kv * circular_pitch_mm);
    Ok(b.max(sp.min_face_width_mm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Architecture;

    fn design(ns: u32, np: u32, m: f64, planets: u32) -> GearboxDesign {
        GearboxDesign::new(Architecture::Esspg, ns, np, ns + 2 * np, m, planets).unwrap()
    }

    #[test]
    fn tangential_force_values() {
        let d = design(20, 40, 1.0, 3);
        assert_eq!(tangential_force(&LoadCase { sun_torque_nm: 0.0, sun_speed_rad_s: 0.0 }, &d), 0.0);
        let load = LoadCase { sun_torque_nm: 6.0, sun_speed_rad_s: 0.0 };
        assert!((tangential_force(&load, &d) - 200.0).abs() < 1e-9);
        let d6 = design(20, 40, 1.0, 6);
        assert!((tangential_force(&load, &d6) - 100.0).abs() < 1e-9);
    }

    #[test]
    fn form_factor_values() {
        let f = LewisFormula::FullDepth20;
        assert!((lewis_form_factor(20, f) - 0.1084).abs() < 1e-12);
        assert!((lewis_form_factor(100, f) - 0.14488).abs() < 1e-12);
        let mut prev = 0.0;
        for n in 20..500 {
            let y = lewis_form_factor(n, f);
            assert!(y > prev && y < 0.154);
            prev = y;
        }
    }

    #[test]
    fn velocity_factor_values() {
        let d = design(20, 40, 1.0, 3);
        let still = LoadCase { sun_torque_nm: 1.0, sun_speed_rad_s: 0.0 };
        assert_eq!(velocity_factor(&still, &d, VelocityFactor::Barth), 1.0);
        // r = 10 mm, so 300 rad/s gives 3 m/s
        let fast = LoadCase { sun_torque_nm: 1.0, sun_speed_rad_s: 300.0 };
        assert!((velocity_factor(&fast, &d, VelocityFactor::Barth) - 0.5).abs() < 1e-12);
        let mut prev = 1.0 + 1e-9;
        for w in 0..50 {
            let kv = velocity_factor(&LoadCase { sun_torque_nm: 1.0, sun_speed_rad_s: f64::from(w) * 20.0 }, &d, VelocityFactor::Barth);
            assert!(kv < prev);
            prev = kv;
        }
    }

    #[test]
    fn face_width_reference_case() {
        // F_t = 200 N, y = 0.1084, K_v = 0.8, m = 1 mm, FOS = 2, sigma = 138 MPa
        // r_sun = 10 mm; K_v = 0.8 needs v = 0.75 m/s, i.e. 75 rad/s
        let d = design(20, 40, 1.0, 3);
        let load = LoadCase { sun_torque_nm: 6.0, sun_speed_rad_s: 75.0 };
        let sp = StrengthParams::default();
        let b = face_width(&load, &d, &sp).unwrap();
        assert!((b - 10.639268349).abs() < 1e-8, "b = {b}");
        let doubled = face_width(&load, &d, &StrengthParams { safety_factor: 4.0, ..sp }).unwrap();
        assert!((doubled - 2.0 * b).abs() < 1e-9);
    }

    #[test]
    fn zero_load_hits_floor() {
        let d = design(20, 40, 1.0, 3);
        let sp = StrengthParams::default();
        let b = face_width(&LoadCase { sun_torque_nm: 0.0, sun_speed_rad_s: 100.0 }, &d, &sp).unwrap();
        assert_eq!(b, sp.min_face_width_mm);
    }

    #[test]
    fn rejects_non_positive_stress() {
        let d = design(20, 40, 1.0, 3);
        let sp = StrengthParams { allowable_stress_mpa: 0.0, ..Default::default() };
        assert!(face_width(&LoadCase { sun_torque_nm: 1.0, sun_speed_rad_s: 0.0 }, &d, &sp).is_err());
    }

    #[test]
    fn monotone_in_torque_stress_and_module() {
        let sp = StrengthParams { min_face_width_mm: 1e-6, ..Default::default() };
        let d = design(24, 48, 0.8, 3);
        let load = |t: f64| LoadCase { sun_torque_nm: t, sun_speed_rad_s: 250.0 };
        assert!(face_width(&load(6.0), &d, &sp).unwrap() > face_width(&load(5.0), &d, &sp).unwrap());
        let weaker = StrengthParams { allowable_stress_mpa: 100.0, ..sp };
        assert!(face_width(&load(5.0), &d, &weaker).unwrap() > face_width(&load(5.0), &d, &sp).unwrap());
        let coarse = design(24, 48, 1.0, 3);
        assert!(face_width(&load(5.0), &coarse, &sp).unwrap() < face_width(&load(5.0), &d, &sp).unwrap());
    }
}
