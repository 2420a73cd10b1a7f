//! Dimension sheet: every derived dimension of one evaluated actuator, for
//! handing a design to CAD or a designer. Lengths in mm, masses in kg.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::efficiency::EfficiencyBreakdown;
use crate::error::ModelError;
use crate::geometry::GearboxDesign;
use crate::mass::{ActuatorLayout, MassBreakdown};
use crate::search::{DesignEvaluation, Problem};

#[derive(Debug, Error)]
pub enum SheetError {
    #[error("design {design} is infeasible: {reason}")]
    Infeasible { design: GearboxDesign, reason: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PinPosition {
    pub angle_deg: f64,
    pub x_mm: f64,
    pub y_mm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionSheet {
    pub design: GearboxDesign,
    pub reduction_ratio: f64,
    pub friction_coefficient: f64,
    pub layout: ActuatorLayout,
    pub pin_positions: Vec<PinPosition>,
    pub mass_kg: MassBreakdown,
    pub efficiency: EfficiencyBreakdown,
    pub cost: f64,
}

impl DimensionSheet {
    /// Builds the sheet for a feasible evaluation. The layout is recomputed
    /// from the design and the face width, so nothing outside the evaluation
    /// and the problem feeds the sheet.
    pub fn from_evaluation(ev: &DesignEvaluation, pb: &Problem) -> Result<Self, SheetError> {
        let refuse = |reason: String| SheetError::Infeasible { design: ev.design, reason };
        if !ev.feasible {
            let reasons: Vec<&str> = ev.failures.iter().map(|f| f.code.as_str()).collect();
            return Err(refuse(reasons.join(", ")));
        }
        let (Some(b), Some(mass), Some(eff), Some(cost)) = (ev.face_width_mm, ev.mass, ev.efficiency, ev.cost) else {
            return Err(refuse("evaluation is incomplete".into()));
        };
        let layout = ActuatorLayout::new(&ev.design, &pb.motor, b, pb.efficiency.pressure_angle, &pb.layout, &pb.bearings)?;
        let r = layout.pin_circle_diameter_mm / 2.0;
        let pin_positions = layout
            .pin_angles_deg
            .iter()
            .map(|&a| PinPosition { angle_deg: a, x_mm: r * a.to_radians().cos(), y_mm: r * a.to_radians().sin() })
            .collect();
        Ok(Self {
            design: ev.design,
            reduction_ratio: ev.reduction_ratio,
            friction_coefficient: pb.efficiency.friction,
            layout,
            pin_positions,
            mass_kg: mass,
            efficiency: eff,
            cost,
        })
    }
}
