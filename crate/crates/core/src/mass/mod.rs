//! Parametric actuator mass model.
//!
//! Gears are steel cylinders at pitch diameter, the ring is a steel annulus
//! from its tip circle out to a radial rim, carriers are aluminium disks with
//! steel planet pins, and the casing is an aluminium tube at the motor's outer
//! diameter closed by a base plate. Bearings come from the fitted catalog
//! model. Every derived dimension lives in [`ActuatorLayout`] so the dimension
//! sheet and the mass total are computed from the same numbers.

pub mod bearing;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub use bearing::{BearingModel, BearingRow, BearingSelection, PowerLaw, TableError};

use crate::error::{ModelError, ModelResult};
use crate::geometry::{base_diameter, pitch_diameter, root_diameter, tip_diameter, Architecture, GearRole, GearboxDesign, MotorSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MaterialSpec {
    /// Gear and pin material, kg/m^3.
    pub steel_density: f64,
    /// Carrier, casing and base plate material, kg/m^3.
    pub aluminum_density: f64,
}

impl Default for MaterialSpec {
    fn default() -> Self {
        Self { steel_density: 7850.0, aluminum_density: 2700.0 }
    }
}

impl MaterialSpec {
    pub fn validate(&self) -> Result<(), (&'static str, String)> {
        if !(self.steel_density > 0.0) {
            return Err(("steel_density", "must be positive".into()));
        }
        if !(self.aluminum_density > 0.0) {
            return Err(("aluminum_density", "must be positive".into()));
        }
        Ok(())
    }
}

/// One axial band of the casing wall.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WallZone {
    /// Share of the casing length covered by this band.
    pub length_fraction: f64,
    pub thickness_mm: f64,
}

/// Dimensions the mass model needs that the decision vector does not fix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LayoutParams {
    /// Ring rim outside the pitch circle, in modules.
    pub ring_radial_thickness_modules: f64,
    pub carrier_thickness_mm: f64,
    /// Carrier material outside the planet pin holes.
    pub carrier_rim_mm: f64,
    /// Radial gap between the sun tip circle and the carrier bore.
    pub carrier_clearance_mm: f64,
    /// Pin length beyond the face width.
    pub pin_engagement_mm: f64,
    /// Gear material between the planet root circle and its bearing.
    pub planet_rim_mm: f64,
    pub planet_bearings_per_planet: u32,
    /// Axial gap on each side of the gear stack.
    pub axial_clearance_mm: f64,
    pub base_plate_thickness_mm: f64,
    pub casing_wall: Vec<WallZone>,
    /// Subtract gear bores from gear mass. Off by default: the material left
    /// at the bores stands in for the fasteners the model omits.
    pub subtract_bores: bool,
    /// Sun bore, used only when `subtract_bores` is set.
    pub sun_bore_mm: f64,
}

impl Default for LayoutParams {
    fn default() -> Self {
        Self {
            ring_radial_thickness_modules: 2.5,
            carrier_thickness_mm: 5.0,
            carrier_rim_mm: 3.0,
            carrier_clearance_mm: 1.0,
            pin_engagement_mm: 4.0,
            planet_rim_mm: 1.0,
            planet_bearings_per_planet: 1,
            axial_clearance_mm: 1.0,
            base_plate_thickness_mm: 3.0,
            casing_wall: vec![WallZone { length_fraction: 1.0, thickness_mm: 3.0 }],
            subtract_bores: false,
            sun_bore_mm: 8.0,
        }
    }
}

impl LayoutParams {
    pub fn validate(&self) -> Result<(), (&'static str, String)> {
        let non_negative = [
            ("ring_radial_thickness_modules", self.ring_radial_thickness_modules),
            ("carrier_thickness_mm", self.carrier_thickness_mm),
            ("carrier_rim_mm", self.carrier_rim_mm),
            ("carrier_clearance_mm", self.carrier_clearance_mm),
            ("pin_engagement_mm", self.pin_engagement_mm),
            ("planet_rim_mm", self.planet_rim_mm),
            ("axial_clearance_mm", self.axial_clearance_mm),
            ("base_plate_thickness_mm", self.base_plate_thickness_mm),
            ("sun_bore_mm", self.sun_bore_mm),
        ];
        for (name, v) in non_negative {
            if !(v >= 0.0 && v.is_finite()) {
                return Err((name, format!("must be non-negative, got {v}")));
            }
        }
        if !(self.ring_radial_thickness_modules > 0.0) {
            return Err(("ring_radial_thickness_modules", "must be positive".into()));
        }
        if self.casing_wall.is_empty() {
            return Err(("casing_wall", "at least one wall zone is required".into()));
        }
        if self.casing_wall.iter().any(|z| !(z.length_fraction > 0.0) || !(z.thickness_mm >= 0.0)) {
            return Err(("casing_wall", "zones need a positive length fraction and non-negative thickness".into()));
        }
        let total: f64 = self.casing_wall.iter().map(|z| z.length_fraction).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(("casing_wall", format!("length fractions must sum to 1, got {total}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GearDims {
    pub teeth: u32,
    pub pitch_diameter_mm: f64,
    pub tip_diameter_mm: f64,
    pub base_diameter_mm: f64,
    pub root_diameter_mm: f64,
}

impl GearDims {
    fn new(teeth: u32, module_mm: f64, role: GearRole, alpha: f64) -> ModelResult<Self> {
        Ok(Self {
            teeth,
            pitch_diameter_mm: pitch_diameter(teeth, module_mm),
            tip_diameter_mm: tip_diameter(teeth, module_mm, role)?,
            base_diameter_mm: base_diameter(teeth, module_mm, alpha),
            root_diameter_mm: root_diameter(teeth, module_mm, role),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CasingZoneDims {
    pub length_mm: f64,
    pub wall_mm: f64,
}

/// Every dependent dimension of an actuator built around one design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActuatorLayout {
    pub face_width_mm: f64,
    pub sun: GearDims,
    pub planet: GearDims,
    pub ring: GearDims,
    pub ring_outer_diameter_mm: f64,
    pub ring_radial_thickness_mm: f64,
    pub pin_circle_diameter_mm: f64,
    pub pin_angles_deg: Vec<f64>,
    pub pin_diameter_mm: f64,
    pub pin_length_mm: f64,
    pub carrier_outer_diameter_mm: f64,
    pub carrier_inner_diameter_mm: f64,
    pub carrier_thickness_mm: f64,
    pub planet_bearing: BearingSelection,
    pub planet_bearing_count: u32,
    /// Carries the output carrier in the casing; bore equals the carrier OD.
    pub output_bearing: BearingSelection,
    /// Supports the secondary carrier; bore equals the carrier bore.
    pub support_bearing: BearingSelection,
    /// Axial length of gears plus both carrier plates and clearances.
    pub stack_height_mm: f64,
    pub casing_outer_diameter_mm: f64,
    pub casing_length_mm: f64,
    pub casing_zones: Vec<CasingZoneDims>,
    pub base_plate_diameter_mm: f64,
    pub base_plate_thickness_mm: f64,
}

impl ActuatorLayout {
    pub fn new(
        d: &GearboxDesign,
        motor: &MotorSpec,
        face_width_mm: f64,
        pressure_angle: f64,
        lp: &LayoutParams,
        bearings: &BearingModel,
    ) -> ModelResult<Self> {
        let m = d.module_mm;
        let sun = GearDims::new(d.sun_teeth, m, GearRole::Sun, pressure_angle)?;
        let planet = GearDims::new(d.planet_teeth, m, GearRole::Planet, pressure_angle)?;
        let ring = GearDims::new(d.ring_teeth, m, GearRole::Ring, pressure_angle)?;
        let ring_radial_thickness_mm = lp.ring_radial_thickness_modules * m;

        let planet_bearing = bearings.largest_within_od(planet.root_diameter_mm - 2.0 * lp.planet_rim_mm)?;
        let pin_diameter_mm = planet_bearing.bore_mm;
        let pin_circle_diameter_mm = d.pin_circle_diameter();
        let carrier_outer_diameter_mm = pin_circle_diameter_mm + pin_diameter_mm + 2.0 * lp.carrier_rim_mm;
        let carrier_inner_diameter_mm = sun.tip_diameter_mm + 2.0 * lp.carrier_clearance_mm;
        if carrier_inner_diameter_mm + 2.0 * lp.carrier_rim_mm > pin_circle_diameter_mm - pin_diameter_mm {
            return Err(ModelError::GeometryInfeasible(format!(
                "carrier bore {carrier_inner_diameter_mm:.2} mm leaves no web around {pin_diameter_mm:.2} mm pins"
            )));
        }
        let output_bearing = bearings.select(carrier_outer_diameter_mm)?;
        let support_bearing = bearings.select(carrier_inner_diameter_mm)?;

        let stack_height_mm = face_width_mm + 2.0 * lp.carrier_thickness_mm + 2.0 * lp.axial_clearance_mm;
        let casing_length_mm = match d.arch {
            Architecture::Esspg => motor.height_mm + stack_height_mm,
            // the stage sits inside the stator; the casing only grows if the stack is taller than the motor
            Architecture::Isspg => motor.height_mm.max(stack_height_mm),
        };
        let casing_zones = lp
            .casing_wall
            .iter()
            .map(|z| CasingZoneDims { length_mm: z.length_fraction * casing_length_mm, wall_mm: z.thickness_mm })
            .collect();

        Ok(Self {
            face_width_mm,
            sun,
            planet,
            ring,
            ring_outer_diameter_mm: ring.pitch_diameter_mm + 2.0 * ring_radial_thickness_mm,
            ring_radial_thickness_mm,
            pin_circle_diameter_mm,
            pin_angles_deg: (0..d.planets).map(|i| 360.0 * f64::from(i) / f64::from(d.planets)).collect(),
            pin_diameter_mm,
            pin_length_mm: face_width_mm + lp.pin_engagement_mm,
            carrier_outer_diameter_mm,
            carrier_inner_diameter_mm,
            carrier_thickness_mm: lp.carrier_thickness_mm,
            planet_bearing,
            planet_bearing_count: d.planets * lp.planet_bearings_per_planet,
            output_bearing,
            support_bearing,
            stack_height_mm,
            casing_outer_diameter_mm: motor.outer_diameter_mm,
            casing_length_mm,
            casing_zones,
            base_plate_diameter_mm: motor.outer_diameter_mm,
            base_plate_thickness_mm: lp.base_plate_thickness_mm,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MassBreakdown {
    pub sun: f64,
    pub planets_total: f64,
    pub ring: f64,
    /// Output carrier plate plus planet pins.
    pub carrier: f64,
    pub secondary_carrier: f64,
    pub bearings_total: f64,
    pub casing: f64,
    pub base_plate: f64,
    pub motor: f64,
    pub total: f64,
}

impl MassBreakdown {
    pub fn component_sum(&self) -> f64 {
        self.sun
            + self.planets_total
            + self.ring
            + self.carrier
            + self.secondary_carrier
            + self.bearings_total
            + self.casing
            + self.base_plate
            + self.motor
    }
}

const MM3_TO_M3: f64 = 1e-9;

fn annulus_volume_mm3(outer_mm: f64, inner_mm: f64, height_mm: f64) -> f64 {
    PI / 4.0 * (outer_mm * outer_mm - inner_mm * inner_mm) * height_mm
}

/// Steel cylinder at pitch diameter with a central bore.
pub fn spur_gear_mass(teeth: u32, module_mm: f64, face_width_mm: f64, bore_mm: f64, mat: &MaterialSpec) -> ModelResult<f64> {
    let dp = pitch_diameter(teeth, module_mm);
    if bore_mm >= dp {
        return Err(ModelError::GeometryInfeasible(format!("bore {bore_mm} mm not inside pitch circle {dp} mm")));
    }
    Ok(mat.steel_density * annulus_volume_mm3(dp, bore_mm, face_width_mm) * MM3_TO_M3)
}

/// Steel annulus from the ring tip circle out to pitch diameter plus twice the rim.
pub fn ring_gear_mass(
    ring_teeth: u32,
    module_mm: f64,
    face_width_mm: f64,
    radial_thickness_mm: f64,
    mat: &MaterialSpec,
) -> ModelResult<f64> {
    let inner = tip_diameter(ring_teeth, module_mm, GearRole::Ring)?;
    let outer = pitch_diameter(ring_teeth, module_mm) + 2.0 * radial_thickness_mm;
    Ok(mat.steel_density * annulus_volume_mm3(outer, inner, face_width_mm) * MM3_TO_M3)
}

pub fn bearing_mass(bore_mm: f64, model: &BearingModel) -> ModelResult<f64> {
    model.bearing_mass(bore_mm)
}

/// `(carrier, secondary_carrier)` masses: two perforated aluminium disks, the
/// output one also carrying the steel planet pins.
pub fn carrier_mass(d: &GearboxDesign, layout: &ActuatorLayout, mat: &MaterialSpec) -> (f64, f64) {
    let n = f64::from(d.planets);
    let t = layout.carrier_thickness_mm;
    let disk = annulus_volume_mm3(layout.carrier_outer_diameter_mm, layout.carrier_inner_diameter_mm, t);
    let holes = n * annulus_volume_mm3(layout.pin_diameter_mm, 0.0, t);
    let plate = mat.aluminum_density * (disk - holes) * MM3_TO_M3;
    let pins = n * mat.steel_density * annulus_volume_mm3(layout.pin_diameter_mm, 0.0, layout.pin_length_mm) * MM3_TO_M3;
    (plate + pins, plate)
}

/// `(casing, base_plate)` masses.
pub fn casing_mass(layout: &ActuatorLayout, mat: &MaterialSpec) -> (f64, f64) {
    let od = layout.casing_outer_diameter_mm;
    let tube: f64 = layout.casing_zones.iter().map(|z| annulus_volume_mm3(od, (od - 2.0 * z.wall_mm).max(0.0), z.length_mm)).sum();
    let plate = annulus_volume_mm3(layout.base_plate_diameter_mm, 0.0, layout.base_plate_thickness_mm);
    (mat.aluminum_density * tube * MM3_TO_M3, mat.aluminum_density * plate * MM3_TO_M3)
}

/// Mass of every component around a laid-out design.
pub fn actuator_mass(
    d: &GearboxDesign,
    motor: &MotorSpec,
    layout: &ActuatorLayout,
    lp: &LayoutParams,
    mat: &MaterialSpec,
) -> ModelResult<MassBreakdown> {
    let m = d.module_mm;
    let b = layout.face_width_mm;
    let (sun_bore, planet_bore) = if lp.subtract_bores { (lp.sun_bore_mm, layout.planet_bearing.od_mm) } else { (0.0, 0.0) };
    let sun = spur_gear_mass(d.sun_teeth, m, b, sun_bore, mat)?;
    let planets_total = f64::from(d.planets) * spur_gear_mass(d.planet_teeth, m, b, planet_bore, mat)?;
    let ring = ring_gear_mass(d.ring_teeth, m, b, layout.ring_radial_thickness_mm, mat)?;
    let (carrier, secondary_carrier) = carrier_mass(d, layout, mat);
    let bearings_total = f64::from(layout.planet_bearing_count) * layout.planet_bearing.mass_kg
        + layout.output_bearing.mass_kg
        + layout.support_bearing.mass_kg;
    let (casing, base_plate) = casing_mass(layout, mat);
    let mut out = MassBreakdown {
        sun,
        planets_total,
        ring,
        carrier,
        secondary_carrier,
        bearings_total,
        casing,
        base_plate,
        motor: motor.mass_kg,
        total: 0.0,
    };
    out.total = out.component_sum();
    Ok(out)
}
