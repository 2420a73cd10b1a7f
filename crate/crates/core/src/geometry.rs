//! Decision vector, involute gear diameters and the feasibility constraints of a
//! single-stage planetary stage (fixed ring, sun input, carrier output).
//!
//! All lengths are millimeters. Every function here is pure.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, ModelResult};

/// Slack used when comparing computed lengths against bounds, in mm.
///
/// Module values like 0.7 are not exactly representable, so `m * N` can land a
/// few ulps above a bound it meets in exact arithmetic.
pub const LENGTH_TOL_MM: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Architecture {
    /// Gearbox nested inside the stator of an outrunner motor.
    Isspg,
    /// Gearbox mounted outside the motor body.
    Esspg,
}

impl Architecture {
    pub const ALL: [Architecture; 2] = [Architecture::Isspg, Architecture::Esspg];

    pub fn key(self) -> &'static str {
        match self {
            Architecture::Isspg => "isspg",
            Architecture::Esspg => "esspg",
        }
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Architecture::Isspg => f.write_str("ISSPG"),
            Architecture::Esspg => f.write_str("ESSPG"),
        }
    }
}

impl std::str::FromStr for Architecture {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "isspg" | "internal" => Ok(Architecture::Isspg),
            "esspg" | "external" => Ok(Architecture::Esspg),
            other => Err(format!("unknown architecture `{other}` (expected isspg or esspg)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GearRole {
    Sun,
    Planet,
    Ring,
}

impl GearRole {
    /// +1 for external teeth, -1 for the internal ring.
    pub fn sign(self) -> f64 {
        match self {
            GearRole::Sun | GearRole::Planet => 1.0,
            GearRole::Ring => -1.0,
        }
    }
}

/// One point of the design space: tooth counts, module and planet count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GearboxDesign {
    pub arch: Architecture,
    pub sun_teeth: u32,
    pub planet_teeth: u32,
    pub ring_teeth: u32,
    /// Gear module in mm.
    pub module_mm: f64,
    pub planets: u32,
}

impl GearboxDesign {
    pub fn new(arch: Architecture, sun_teeth: u32, planet_teeth: u32, ring_teeth: u32, module_mm: f64, planets: u32) -> ModelResult<Self> {
        if sun_teeth == 0 || planet_teeth == 0 || ring_teeth == 0 {
            return Err(ModelError::InvalidParameter { name: "teeth", reason: "tooth counts must be at least 1".into() });
        }
        if planets == 0 {
            return Err(ModelError::InvalidParameter { name: "planets", reason: "at least one planet is required".into() });
        }
        if !(module_mm.is_finite() && module_mm > 0.0) {
            return Err(ModelError::InvalidParameter { name: "module_mm", reason: format!("module must be positive, got {module_mm}") });
        }
        Ok(Self { arch, sun_teeth, planet_teeth, ring_teeth, module_mm, planets })
    }

    /// Same gear train, other architecture tag.
    pub fn with_arch(self, arch: Architecture) -> Self {
        Self { arch, ..self }
    }

    pub fn teeth(&self, role: GearRole) -> u32 {
        match role {
            GearRole::Sun => self.sun_teeth,
            GearRole::Planet => self.planet_teeth,
            GearRole::Ring => self.ring_teeth,
        }
    }

    /// Reduction ratio R = (N_s + N_r) / N_s, quoted as "R:1".
    pub fn reduction_ratio(&self) -> f64 {
        reduction_ratio(self.sun_teeth, self.ring_teeth)
    }

    /// Carrier-to-sun speed ratio G = N_s / (N_s + N_r) = 1 / R.
    pub fn speed_ratio(&self) -> f64 {
        f64::from(self.sun_teeth) / f64::from(self.sun_teeth + self.ring_teeth)
    }

    /// Diameter of the circle through the planet centres, m (N_s + N_p).
    pub fn pin_circle_diameter(&self) -> f64 {
        self.module_mm * f64::from(self.sun_teeth + self.planet_teeth)
    }

    /// Deterministic order on the decision vector: (m, n_p, N_s, N_p, N_r, arch).
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        self.module_mm
            .total_cmp(&other.module_mm)
            .then(self.planets.cmp(&other.planets))
            .then(self.sun_teeth.cmp(&other.sun_teeth))
            .then(self.planet_teeth.cmp(&other.planet_teeth))
            .then(self.ring_teeth.cmp(&other.ring_teeth))
            .then(self.arch.cmp(&other.arch))
    }
}

impl fmt::Display for GearboxDesign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} Ns={} Np={} Nr={} m={} np={}",
            self.arch, self.sun_teeth, self.planet_teeth, self.ring_teeth, self.module_mm, self.planets
        )
    }
}

/// Bounds and clearances of the design space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConstraintParams {
    pub module_min_mm: f64,
    pub module_max_mm: f64,
    /// Discrete module values searched, ascending.
    pub module_set_mm: Vec<f64>,
    /// Minimum sun and planet tooth count (undercut limit).
    pub teeth_min: u32,
    pub planets_min: u32,
    pub planets_max: u32,
    /// Minimum tip-to-tip gap between neighbouring planets.
    pub planet_clearance_mm: f64,
    /// Diametral clearance between the ring and the motor envelope.
    pub ring_clearance_mm: f64,
}

impl Default for ConstraintParams {
    fn default() -> Self {
        Self {
            module_min_mm: 0.5,
            module_max_mm: 1.2,
            module_set_mm: vec![0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2],
            teeth_min: 20,
            planets_min: 2,
            planets_max: 7,
            planet_clearance_mm: 5.0,
            ring_clearance_mm: 10.0,
        }
    }
}

impl ConstraintParams {
    pub fn validate(&self) -> Result<(), (&'static str, String)> {
        if !(self.module_min_mm > 0.0 && self.module_min_mm <= self.module_max_mm) {
            return Err(("module_min_mm", format!("need 0 < module_min ({}) <= module_max ({})", self.module_min_mm, self.module_max_mm)));
        }
        if self.module_set_mm.is_empty() {
            return Err(("module_set_mm", "module set is empty".into()));
        }
        for &m in &self.module_set_mm {
            if !(m >= self.module_min_mm - LENGTH_TOL_MM && m <= self.module_max_mm + LENGTH_TOL_MM) {
                return Err(("module_set_mm", format!("module {m} mm outside [{}, {}] mm", self.module_min_mm, self.module_max_mm)));
            }
        }
        if self.module_set_mm.windows(2).any(|w| w[0] >= w[1]) {
            return Err(("module_set_mm", "module set must be strictly ascending".into()));
        }
        if self.teeth_min == 0 {
            return Err(("teeth_min", "must be at least 1".into()));
        }
        if !(self.planets_min >= 1 && self.planets_min <= self.planets_max) {
            return Err(("planets_min", format!("need 1 <= planets_min ({}) <= planets_max ({})", self.planets_min, self.planets_max)));
        }
        if !(self.planet_clearance_mm > 0.0) {
            return Err(("planet_clearance_mm", "must be positive".into()));
        }
        if !(self.ring_clearance_mm >= 0.0) {
            return Err(("ring_clearance_mm", "must be non-negative".into()));
        }
        Ok(())
    }
}

/// Motor envelope and limits, as read from a datasheet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MotorSpec {
    pub name: String,
    pub outer_diameter_mm: f64,
    pub stator_inner_diameter_mm: f64,
    pub height_mm: f64,
    pub mass_kg: f64,
    pub max_torque_nm: f64,
    pub max_speed_rad_s: f64,
}

impl MotorSpec {
    pub fn validate(&self) -> Result<(), (&'static str, String)> {
        let positive = [
            ("outer_diameter_mm", self.outer_diameter_mm),
            ("stator_inner_diameter_mm", self.stator_inner_diameter_mm),
            ("height_mm", self.height_mm),
            ("mass_kg", self.mass_kg),
            ("max_torque_nm", self.max_torque_nm),
            ("max_speed_rad_s", self.max_speed_rad_s),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err((name, format!("must be positive, got {v}")));
            }
        }
        if self.stator_inner_diameter_mm >= self.outer_diameter_mm {
            return Err((
                "stator_inner_diameter_mm",
                format!(
                    "stator inner diameter {} mm must be below outer diameter {} mm",
                    self.stator_inner_diameter_mm, self.outer_diameter_mm
                ),
            ));
        }
        Ok(())
    }
}

/// Named feasibility constraints, used to explain rejections.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Constraint {
    /// N_r = N_s + 2 N_p.
    Geometric,
    /// (N_s + N_r) divisible by n_p.
    Meshing,
    /// Neighbouring planets keep the minimum clearance.
    Interference,
    ModuleBounds,
    /// Sun and planet at or above the undercut limit.
    MinTeeth,
    /// m N_r within the architecture's envelope.
    RingDiameter,
    PlanetCount,
}

impl Constraint {
    pub fn describe(self) -> &'static str {
        match self {
            Constraint::Geometric => "ring teeth must equal sun + 2 x planet teeth",
            Constraint::Meshing => "sun + ring teeth must be divisible by the planet count",
            Constraint::Interference => "adjacent planets overlap or violate the clearance",
            Constraint::ModuleBounds => "module outside the allowed range",
            Constraint::MinTeeth => "sun or planet below the minimum tooth count",
            Constraint::RingDiameter => "ring pitch diameter exceeds the gearbox envelope",
            Constraint::PlanetCount => "planet count outside the allowed range",
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Constraint::Geometric => "geometric",
            Constraint::Meshing => "meshing",
            Constraint::Interference => "interference",
            Constraint::ModuleBounds => "module-bounds",
            Constraint::MinTeeth => "min-teeth",
            Constraint::RingDiameter => "ring-diameter",
            Constraint::PlanetCount => "planet-count",
        };
        f.write_str(s)
    }
}

pub fn pitch_diameter(teeth: u32, module_mm: f64) -> f64 {
    module_mm * f64::from(teeth)
}

pub fn base_diameter(teeth: u32, module_mm: f64, pressure_angle: f64) -> f64 {
    pitch_diameter(teeth, module_mm) * pressure_angle.cos()
}

/// Tip (addendum) circle for zero profile shift: m N + 2m outside, m N - 2m for the ring.
pub fn tip_diameter(teeth: u32, module_mm: f64, role: GearRole) -> ModelResult<f64> {
    let d = pitch_diameter(teeth, module_mm) + role.sign() * 2.0 * module_mm;
    if d <= 0.0 {
        return Err(ModelError::GeometryInfeasible(format!("{role:?} with {teeth} teeth at m={module_mm} has non-positive tip diameter")));
    }
    Ok(d)
}

/// Root circle with the standard 1.25 m dedendum.
pub fn root_diameter(teeth: u32, module_mm: f64, role: GearRole) -> f64 {
    pitch_diameter(teeth, module_mm) - role.sign() * 2.5 * module_mm
}

pub fn reduction_ratio(sun_teeth: u32, ring_teeth: u32) -> f64 {
    f64::from(sun_teeth + ring_teeth) / f64::from(sun_teeth)
}

pub fn check_geometric(d: &GearboxDesign) -> bool {
    d.ring_teeth == d.sun_teeth + 2 * d.planet_teeth
}

pub fn check_meshing(d: &GearboxDesign) -> bool {
    (d.sun_teeth + d.ring_teeth) % d.planets == 0
}

/// Left-hand side of the planet clearance inequality:
/// 2m (N_s + N_p) sin(pi / n_p) - 2m N_p.
pub fn planet_gap_mm(d: &GearboxDesign) -> f64 {
    let m = d.module_mm;
    2.0 * m * f64::from(d.sun_teeth + d.planet_teeth) * (PI / f64::from(d.planets)).sin() - 2.0 * m * f64::from(d.planet_teeth)
}

pub fn check_interference(d: &GearboxDesign, p: &ConstraintParams) -> bool {
    planet_gap_mm(d) >= p.planet_clearance_mm - LENGTH_TOL_MM
}

/// Largest admissible ring pitch diameter: motor OD (external) or stator ID
/// (internal) less the ring clearance.
pub fn max_gearbox_diameter(motor: &MotorSpec, arch: Architecture, p: &ConstraintParams) -> ModelResult<f64> {
    let envelope = match arch {
        Architecture::Esspg => motor.outer_diameter_mm,
        Architecture::Isspg => motor.stator_inner_diameter_mm,
    };
    let d = envelope - p.ring_clearance_mm;
    if d <= 0.0 {
        return Err(ModelError::GeometryInfeasible(format!(
            "{} envelope {envelope} mm leaves no room after {} mm ring clearance",
            arch, p.ring_clearance_mm
        )));
    }
    Ok(d)
}

/// Every bound-type constraint the design violates, in declaration order.
pub fn bound_violations(d: &GearboxDesign, max_diameter_mm: f64, p: &ConstraintParams) -> Vec<Constraint> {
    let mut out = Vec::new();
    let m = d.module_mm;
    if m < p.module_min_mm - LENGTH_TOL_MM || m > p.module_max_mm + LENGTH_TOL_MM {
        out.push(Constraint::ModuleBounds);
    }
    if d.sun_teeth < p.teeth_min || d.planet_teeth < p.teeth_min {
        out.push(Constraint::MinTeeth);
    }
    if pitch_diameter(d.ring_teeth, m) > max_diameter_mm + LENGTH_TOL_MM {
        out.push(Constraint::RingDiameter);
    }
    if d.planets < p.planets_min || d.planets > p.planets_max {
        out.push(Constraint::PlanetCount);
    }
    out
}

pub fn check_bounds(d: &GearboxDesign, motor: &MotorSpec, p: &ConstraintParams) -> bool {
    match max_gearbox_diameter(motor, d.arch, p) {
        Ok(dmax) => bound_violations(d, dmax, p).is_empty(),
        Err(_) => false,
    }
}

/// All violated constraints against a precomputed envelope diameter.
pub fn violations(d: &GearboxDesign, max_diameter_mm: f64, p: &ConstraintParams) -> Vec<Constraint> {
    let mut out = Vec::new();
    if !check_geometric(d) {
        out.push(Constraint::Geometric);
    }
    if !check_meshing(d) {
        out.push(Constraint::Meshing);
    }
    if !check_interference(d, p) {
        out.push(Constraint::Interference);
    }
    out.extend(bound_violations(d, max_diameter_mm, p));
    out
}

pub fn is_feasible(d: &GearboxDesign, motor: &MotorSpec, p: &ConstraintParams) -> bool {
    match max_gearbox_diameter(motor, d.arch, p) {
        Ok(dmax) => violations(d, dmax, p).is_empty(),
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ALPHA: f64 = 20.0 * PI / 180.0;

    fn design(ns: u32, np: u32, nr: u32, m: f64, planets: u32) -> GearboxDesign {
        GearboxDesign::new(Architecture::Esspg, ns, np, nr, m, planets).unwrap()
    }

    fn motor(od: f64, id: f64) -> MotorSpec {
        MotorSpec {
            name: "test".into(),
            outer_diameter_mm: od,
            stator_inner_diameter_mm: id,
            height_mm: 40.0,
            mass_kg: 0.5,
            max_torque_nm: 5.0,
            max_speed_rad_s: 200.0,
        }
    }

    #[test]
    fn diameters() {
        assert_eq!(pitch_diameter(20, 1.0), 20.0);
        assert_eq!(pitch_diameter(100, 0.5), 50.0);
        assert!((pitch_diameter(62, 1.2) - 74.4).abs() < 1e-12);

        assert!((base_diameter(20, 1.0, ALPHA) - 18.793852).abs() < 1e-6);
        assert_eq!(base_diameter(20, 1.0, 0.0), 20.0);
        assert!((base_diameter(100, 0.5, ALPHA) - 46.984631).abs() < 1e-6);

        assert_eq!(tip_diameter(20, 1.0, GearRole::Sun).unwrap(), 22.0);
        assert_eq!(tip_diameter(100, 1.0, GearRole::Ring).unwrap(), 98.0);
        assert_eq!(tip_diameter(40, 0.5, GearRole::Planet).unwrap(), 21.0);
        assert!(matches!(tip_diameter(2, 1.0, GearRole::Ring), Err(ModelError::GeometryInfeasible(_))));
    }

    #[test]
    fn ratios() {
        let d = design(20, 40, 100, 1.0, 3);
        assert_eq!(d.reduction_ratio(), 6.0);
        assert!((d.speed_ratio() - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(reduction_ratio(20, 20), 2.0);
        assert!((reduction_ratio(25, 155) - 7.2).abs() < 1e-12);
    }

    #[test]
    fn geometric_and_meshing() {
        assert!(check_geometric(&design(20, 40, 100, 1.0, 3)));
        assert!(!check_geometric(&design(20, 40, 99, 1.0, 3)));
        assert!(check_geometric(&design(25, 65, 155, 1.0, 3)));

        assert!(check_meshing(&design(20, 40, 100, 1.0, 4)));
        assert!(!check_meshing(&design(20, 40, 100, 1.0, 7)));
        assert!(check_meshing(&design(25, 65, 155, 1.0, 3)));
    }

    #[test]
    fn interference() {
        let p = ConstraintParams::default();
        let d3 = design(20, 40, 100, 1.0, 3);
        assert!((planet_gap_mm(&d3) - 23.923048).abs() < 1e-6);
        assert!(check_interference(&d3, &p));
        let d6 = design(20, 40, 100, 1.0, 6);
        assert!((planet_gap_mm(&d6) + 20.0).abs() < 1e-9);
        assert!(!check_interference(&d6, &p));
        // two planets: gap reduces to 2 m N_s
        assert!((planet_gap_mm(&design(20, 40, 100, 0.5, 2)) - 20.0).abs() < 1e-9);
        // six planets: gap is m (N_s - N_p), exactly 5 mm here despite sin(pi/6) rounding low
        assert!(check_interference(&design(30, 20, 70, 0.5, 6), &p));
        assert!(!check_interference(&design(29, 20, 69, 0.5, 6), &p));
    }

    #[test]
    fn envelope() {
        let p = ConstraintParams::default();
        assert_eq!(max_gearbox_diameter(&motor(110.0, 70.0), Architecture::Esspg, &p).unwrap(), 100.0);
        assert_eq!(max_gearbox_diameter(&motor(110.0, 70.0), Architecture::Isspg, &p).unwrap(), 60.0);
        assert_eq!(max_gearbox_diameter(&motor(20.0, 15.0), Architecture::Isspg, &p).unwrap(), 5.0);
        assert!(max_gearbox_diameter(&motor(20.0, 8.0), Architecture::Isspg, &p).is_err());
    }

    #[test]
    fn bounds() {
        let p = ConstraintParams::default();
        // stator ID 70 gives a 60 mm envelope for the internal layout
        let mot = motor(110.0, 70.0);
        let ok = GearboxDesign::new(Architecture::Isspg, 20, 40, 100, 0.5, 4).unwrap();
        assert!(check_bounds(&ok, &mot, &p));
        let big_module = GearboxDesign { module_mm: 1.3, ..ok }.with_arch(Architecture::Esspg);
        assert!(!check_bounds(&big_module, &mot, &p));
        let undercut = GearboxDesign { sun_teeth: 19, ring_teeth: 99, ..ok };
        assert!(!check_bounds(&undercut, &mot, &p));
        assert_eq!(bound_violations(&undercut, 60.0, &p), vec![Constraint::MinTeeth]);
        let too_many = GearboxDesign { planets: 8, ..ok };
        assert_eq!(bound_violations(&too_many, 60.0, &p), vec![Constraint::PlanetCount]);
    }

    #[test]
    fn design_rejects_degenerate_values() {
        assert!(GearboxDesign::new(Architecture::Isspg, 0, 40, 100, 1.0, 3).is_err());
        assert!(GearboxDesign::new(Architecture::Isspg, 20, 40, 100, 0.0, 3).is_err());
        assert!(GearboxDesign::new(Architecture::Isspg, 20, 40, 100, 1.0, 0).is_err());
    }

    #[test]
    fn motor_validation_names_field() {
        let err = motor(60.0, 70.0).validate().unwrap_err();
        assert_eq!(err.0, "stator_inner_diameter_mm");
    }

    #[test]
    fn module_set_validation() {
        let p = ConstraintParams { module_set_mm: vec![0.5, 1.3], ..Default::default() };
        assert_eq!(p.validate().unwrap_err().0, "module_set_mm");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn pitch_circles_close_when_geometric(ns in 1u32..200, np in 1u32..200, m in 0.1f64..3.0) {
                let d = design(ns, np, ns + 2 * np, m, 3);
                prop_assert!(check_geometric(&d));
                let lhs = pitch_diameter(d.ring_teeth, m);
                let rhs = pitch_diameter(ns, m) + 2.0 * pitch_diameter(np, m);
                prop_assert!((lhs - rhs).abs() <= 1e-9 * lhs);
                let r = d.reduction_ratio();
                prop_assert!(r > 1.0);
                prop_assert!((r - (1.0 + f64::from(d.ring_teeth) / f64::from(ns))).abs() < 1e-12);
            }

            #[test]
            fn gap_non_increasing_in_planet_count(ns in 20u32..150, np in 20u32..150, m in 0.5f64..1.2, k in 2u32..12) {
                let a = design(ns, np, ns + 2 * np, m, k);
                let b = design(ns, np, ns + 2 * np, m, k + 1);
                prop_assert!(planet_gap_mm(&b) <= planet_gap_mm(&a) + 1e-12);
            }

            #[test]
            fn circle_ordering(n in 20u32..400, m in 0.3f64..3.0) {
                for role in [GearRole::Sun, GearRole::Planet] {
                    let db = base_diameter(n, m, ALPHA);
                    let dp = pitch_diameter(n, m);
                    let da = tip_diameter(n, m, role).unwrap();
                    prop_assert!(db < dp && dp < da);
                }
                // an internal gear keeps its base circle inside the tip circle
                // only from 34 teeth at 20 degrees
                let nr = n.max(34);
                let db = base_diameter(nr, m, ALPHA);
                let dp = pitch_diameter(nr, m);
                let da = tip_diameter(nr, m, GearRole::Ring).unwrap();
                prop_assert!(db < da && da < dp);
            }
        }
    }
}
