//! Brute-force search over the discrete design space.
//!
//! Every feasible design vector of an architecture is enumerated, evaluated
//! (face width, layout, mass, efficiency, cost) and the minimum-cost design is
//! kept per reduction-ratio bin. Evaluation is a pure map, and the argmin uses
//! a total order, so the result does not depend on how rayon schedules work.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::efficiency::{planetary_efficiency, EfficiencyBreakdown, EfficiencyParams};
use crate::error::ModelResult;
use crate::geometry::{
    max_gearbox_diameter, violations, Architecture, Constraint, ConstraintParams, GearboxDesign, MotorSpec, LENGTH_TOL_MM,
};
use crate::mass::{actuator_mass, ActuatorLayout, BearingModel, LayoutParams, MassBreakdown, MaterialSpec};
use crate::strength::{face_width, LoadCase, StrengthParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CostWeights {
    /// Weight on actuator mass (per kg).
    pub mass_weight: f64,
    /// Weight on stage efficiency.
    pub efficiency_weight: f64,
}

impl Default for CostWeights {
    fn default() -> Self {
        Self { mass_weight: 1.0, efficiency_weight: 2.0 }
    }
}

impl CostWeights {
    pub fn cost(&self, mass_kg: f64, efficiency: f64) -> f64 {
        self.mass_weight * mass_kg - self.efficiency_weight * efficiency
    }

    pub fn validate(&self) -> Result<(), (&'static str, String)> {
        if !(self.mass_weight >= 0.0) {
            return Err(("mass_weight", "must be non-negative".into()));
        }
        if !(self.efficiency_weight >= 0.0) {
            return Err(("efficiency_weight", "must be non-negative".into()));
        }
        Ok(())
    }
}

/// Half-open reduction-ratio interval `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioBin {
    pub lo: f64,
    pub hi: f64,
}

impl RatioBin {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    /// Unit-width bins covering `[start, end)`.
    pub fn unit_bins(start: u32, end: u32) -> Vec<Self> {
        (start..end).map(|lo| Self::new(f64::from(lo), f64::from(lo + 1))).collect()
    }

    pub fn contains(&self, d: &GearboxDesign) -> bool {
        // compare N_s + N_r against lo N_s and hi N_s so integer bounds stay exact
        let num = f64::from(d.sun_teeth + d.ring_teeth);
        let ns = f64::from(d.sun_teeth);
        num >= self.lo * ns && num < self.hi * ns
    }

    pub fn label(&self) -> String {
        format!("[{}, {})", self.lo, self.hi)
    }
}

pub fn validate_bins(bins: &[RatioBin]) -> Result<(), String> {
    if bins.is_empty() {
        return Err("at least one bin is required".into());
    }
    for b in bins {
        if !(b.lo.is_finite() && b.hi.is_finite() && b.lo >= 1.0 && b.lo < b.hi) {
            return Err(format!("bin {} must satisfy 1 <= lo < hi", b.label()));
        }
    }
    if bins.windows(2).any(|w| w[1].lo < w[0].hi) {
        return Err("bins must be ascending and non-overlapping".into());
    }
    Ok(())
}

/// Everything needed to evaluate a design apart from the design itself.
#[derive(Debug, Clone)]
pub struct Problem {
    pub motor: MotorSpec,
    pub load: LoadCase,
    pub constraints: ConstraintParams,
    pub efficiency: EfficiencyParams,
    pub strength: StrengthParams,
    pub materials: MaterialSpec,
    pub layout: LayoutParams,
    pub cost: CostWeights,
    pub bearings: BearingModel,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureReason {
    /// Constraint name or model failure tag.
    pub code: String,
    pub detail: String,
}

impl FailureReason {
    fn constraint(c: Constraint) -> Self {
        Self { code: c.to_string(), detail: c.describe().to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignEvaluation {
    pub design: GearboxDesign,
    pub feasible: bool,
    pub failures: Vec<FailureReason>,
    pub reduction_ratio: f64,
    pub efficiency: Option<EfficiencyBreakdown>,
    pub face_width_mm: Option<f64>,
    pub mass: Option<MassBreakdown>,
    pub cost: Option<f64>,
}

impl DesignEvaluation {
    pub fn total_mass(&self) -> Option<f64> {
        self.mass.map(|m| m.total)
    }

    pub fn eta(&self) -> Option<f64> {
        self.efficiency.map(|e| e.eta_overall)
    }
}

/// Ranking order among feasible evaluations: cost, then lower mass, then
/// higher efficiency, then the decision vector.
pub fn rank_cmp(a: &DesignEvaluation, b: &DesignEvaluation) -> Ordering {
    let key = |e: &DesignEvaluation| {
        (e.cost.unwrap_or(f64::INFINITY), e.total_mass().unwrap_or(f64::INFINITY), e.eta().unwrap_or(f64::NEG_INFINITY))
    };
    let (ca, ma, ea) = key(a);
    let (cb, mb, eb) = key(b);
    ca.total_cmp(&cb).then(ma.total_cmp(&mb)).then(eb.total_cmp(&ea)).then_with(|| a.design.lex_cmp(&b.design))
}

/// All feasible designs of one architecture in `(m, n_p, N_s, N_p)` order.
/// The ring is fixed by `N_r = N_s + 2 N_p`; sun and planet upper bounds follow
/// from the envelope, so subtrees whose smallest ring already overflows are
/// never visited.
pub fn enumerate_feasible(motor: &MotorSpec, arch: Architecture, p: &ConstraintParams) -> Vec<GearboxDesign> {
    let Ok(dmax) = max_gearbox_diameter(motor, arch, p) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for &m in &p.module_set_mm {
        let nr_max = ((dmax + LENGTH_TOL_MM) / m).floor() as u32;
        for planets in p.planets_min..=p.planets_max {
            let mut ns = p.teeth_min;
            while ns + 2 * p.teeth_min <= nr_max {
                let mut np = p.teeth_min;
                while ns + 2 * np <= nr_max {
                    let d = GearboxDesign { arch, sun_teeth: ns, planet_teeth: np, ring_teeth: ns + 2 * np, module_mm: m, planets };
                    if violations(&d, dmax, p).is_empty() {
                        out.push(d);
                    }
                    np += 1;
                }
                ns += 1;
            }
        }
    }
    out
}

fn evaluate_model(d: &GearboxDesign, pb: &Problem) -> ModelResult<(f64, MassBreakdown, EfficiencyBreakdown)> {
    let b = face_width(&pb.load, d, &pb.strength)?;
    let layout = ActuatorLayout::new(d, &pb.motor, b, pb.efficiency.pressure_angle, &pb.layout, &pb.bearings)?;
    let mass = actuator_mass(d, &pb.motor, &layout, &pb.layout, &pb.materials)?;
    let eff = planetary_efficiency(d, &pb.efficiency)?;
    Ok((b, mass, eff))
}

/// Strength, then layout and mass, then efficiency, then cost. Constraint
/// violations and model errors come back as an infeasible evaluation.
pub fn evaluate(d: &GearboxDesign, pb: &Problem) -> DesignEvaluation {
    let mut ev = DesignEvaluation {
        design: *d,
        feasible: false,
        failures: Vec::new(),
        reduction_ratio: d.reduction_ratio(),
        efficiency: None,
        face_width_mm: None,
        mass: None,
        cost: None,
    };
    match max_gearbox_diameter(&pb.motor, d.arch, &pb.constraints) {
        Ok(dmax) => ev.failures.extend(violations(d, dmax, &pb.constraints).into_iter().map(FailureReason::constraint)),
        Err(e) => ev.failures.push(FailureReason { code: Constraint::RingDiameter.to_string(), detail: e.to_string() }),
    }
    if !ev.failures.is_empty() {
        return ev;
    }
    match evaluate_model(d, pb) {
        Ok((b, mass, eff)) => {
            ev.feasible = true;
            ev.face_width_mm = Some(b);
            ev.cost = Some(pb.cost.cost(mass.total, eff.eta_overall));
            ev.mass = Some(mass);
            ev.efficiency = Some(eff);
        }
        Err(e) => ev.failures.push(FailureReason { code: e.tag().to_string(), detail: e.to_string() }),
    }
    ev
}

/// Why a bin produced no design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockingReason {
    /// The constraint or model failure that rejected the most candidates.
    pub dominant: String,
    pub detail: String,
    /// Rejection counts over the diagnostic grid, by constraint or failure code.
    pub counts: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinResult {
    pub bin: RatioBin,
    pub arch: Architecture,
    pub best: Option<DesignEvaluation>,
    /// Geometrically feasible designs whose ratio falls in the bin.
    pub candidates_examined: usize,
    /// Of those, designs the models could evaluate.
    pub feasible_count: usize,
    pub blocking: Option<BlockingReason>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchSweep {
    pub arch: Architecture,
    pub max_gearbox_diameter_mm: Option<f64>,
    pub enumerated: usize,
    pub bins: Vec<BinResult>,
}

/// Tallies which constraint rejects the designs of an empty bin, over a grid
/// that ignores the envelope when choosing tooth counts: every module and
/// planet count, `N_s` from the minimum up to what the envelope would allow at
/// the smallest module, and every `N_p` putting the ratio inside the bin.
fn diagnose_empty_bin(pb: &Problem, arch: Architecture, bin: &RatioBin) -> BlockingReason {
    let p = &pb.constraints;
    let mut counts: BTreeMap<Constraint, usize> = BTreeMap::new();
    let dmax = max_gearbox_diameter(&pb.motor, arch, p).unwrap_or(0.0);
    let m_min = p.module_set_mm.first().copied().unwrap_or(p.module_min_mm);
    let ns_cap = ((dmax / m_min).floor() as u32).max(p.teeth_min);
    for &m in &p.module_set_mm {
        for planets in p.planets_min..=p.planets_max {
            for ns in p.teeth_min..=ns_cap {
                // R = 2 + 2 N_p / N_s
                let lo = ((bin.lo - 2.0) * f64::from(ns) / 2.0).ceil().max(1.0) as u32;
                let mut np = lo;
                loop {
                    let d = GearboxDesign { arch, sun_teeth: ns, planet_teeth: np, ring_teeth: ns + 2 * np, module_mm: m, planets };
                    if !bin.contains(&d) {
                        if d.reduction_ratio() >= bin.hi {
                            break;
                        }
                        np += 1;
                        continue;
                    }
                    for c in violations(&d, dmax, p) {
                        *counts.entry(c).or_default() += 1;
                    }
                    np += 1;
                }
            }
        }
    }
    // max count wins; ties go to the constraint declared first
    let dominant = counts
        .iter()
        .fold(None::<(Constraint, usize)>, |acc, (&c, &n)| match acc {
            Some((_, best)) if best >= n => acc,
            _ => Some((c, n)),
        })
        .map(|(c, _)| c)
        .unwrap_or(Constraint::RingDiameter);
    BlockingReason {
        dominant: dominant.to_string(),
        detail: dominant.describe().to_string(),
        counts: counts.into_iter().map(|(c, n)| (c.to_string(), n)).collect(),
    }
}

fn model_failure_reason(evals: &[&DesignEvaluation]) -> BlockingReason {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut details: BTreeMap<String, String> = BTreeMap::new();
    for ev in evals {
        for f in &ev.failures {
            *counts.entry(f.code.clone()).or_default() += 1;
            details.entry(f.code.clone()).or_insert_with(|| f.detail.clone());
        }
    }
    let dominant = counts
        .iter()
        .fold(None::<(&String, usize)>, |acc, (c, &n)| match acc {
            Some((_, best)) if best >= n => acc,
            _ => Some((c, n)),
        })
        .map(|(c, _)| c.clone())
        .unwrap_or_default();
    BlockingReason { detail: details.get(&dominant).cloned().unwrap_or_default(), dominant, counts }
}

/// Evaluates every enumerated design whose ratio lands in some bin.
pub fn evaluate_in_bins(pb: &Problem, arch: Architecture, bins: &[RatioBin]) -> Vec<DesignEvaluation> {
    let designs: Vec<GearboxDesign> =
        enumerate_feasible(&pb.motor, arch, &pb.constraints).into_iter().filter(|d| bins.iter().any(|b| b.contains(d))).collect();
    designs.par_iter().map(|d| evaluate(d, pb)).collect()
}

/// Per-bin optimum for one architecture from a set of evaluations.
pub fn select_bins(pb: &Problem, arch: Architecture, bins: &[RatioBin], evals: &[DesignEvaluation]) -> Vec<BinResult> {
    bins.iter()
        .map(|bin| {
            let in_bin: Vec<&DesignEvaluation> = evals.iter().filter(|e| e.design.arch == arch && bin.contains(&e.design)).collect();
            let best = in_bin.par_iter().filter(|e| e.feasible).copied().min_by(|a, b| rank_cmp(a, b)).cloned();
            let feasible_count = in_bin.iter().filter(|e| e.feasible).count();
            let blocking = match (&best, in_bin.is_empty()) {
                (Some(_), _) => None,
                (None, true) => Some(diagnose_empty_bin(pb, arch, bin)),
                (None, false) => Some(model_failure_reason(&in_bin)),
            };
            BinResult { bin: *bin, arch, best, candidates_examined: in_bin.len(), feasible_count, blocking }
        })
        .collect()
}

pub fn optimize_arch(pb: &Problem, arch: Architecture, bins: &[RatioBin]) -> (ArchSweep, Vec<DesignEvaluation>) {
    let evals = evaluate_in_bins(pb, arch, bins);
    let sweep = ArchSweep {
        arch,
        max_gearbox_diameter_mm: max_gearbox_diameter(&pb.motor, arch, &pb.constraints).ok(),
        enumerated: evals.len(),
        bins: select_bins(pb, arch, bins, &evals),
    };
    (sweep, evals)
}

/// Per-bin optima for each requested architecture.
pub fn optimize_bins(pb: &Problem, archs: &[Architecture], bins: &[RatioBin]) -> Vec<ArchSweep> {
    archs.iter().map(|&a| optimize_arch(pb, a, bins).0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WinnerSummary {
    pub design: GearboxDesign,
    pub reduction_ratio: f64,
    pub mass_kg: f64,
    pub efficiency: f64,
    pub cost: f64,
}

impl WinnerSummary {
    fn from_eval(ev: &DesignEvaluation) -> Option<Self> {
        Some(Self {
            design: ev.design,
            reduction_ratio: ev.reduction_ratio,
            mass_kg: ev.total_mass()?,
            efficiency: ev.eta()?,
            cost: ev.cost?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub bin: RatioBin,
    pub isspg: Option<WinnerSummary>,
    pub esspg: Option<WinnerSummary>,
    pub winner: Option<Architecture>,
    /// Loser mass minus winner mass.
    pub mass_margin_kg: Option<f64>,
    /// Winner efficiency minus loser efficiency.
    pub efficiency_margin: Option<f64>,
    pub cost_margin: Option<f64>,
}

fn summary_cmp(a: &WinnerSummary, b: &WinnerSummary) -> Ordering {
    a.cost
        .total_cmp(&b.cost)
        .then(a.mass_kg.total_cmp(&b.mass_kg))
        .then(b.efficiency.total_cmp(&a.efficiency))
        .then(a.design.arch.cmp(&b.design.arch))
}

/// Per-bin winner between the two architectures. Bins are matched by bounds.
pub fn compare_architectures(sweeps: &[ArchSweep]) -> Vec<ComparisonRow> {
    let find = |arch: Architecture| sweeps.iter().find(|s| s.arch == arch);
    let mut bins: Vec<RatioBin> = Vec::new();
    for s in sweeps {
        for b in &s.bins {
            if !bins.contains(&b.bin) {
                bins.push(b.bin);
            }
        }
    }
    bins.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let best_in = |arch: Architecture, bin: &RatioBin| {
        find(arch).and_then(|s| s.bins.iter().find(|b| b.bin == *bin)).and_then(|b| b.best.as_ref()).and_then(WinnerSummary::from_eval)
    };
    bins.iter()
        .map(|bin| {
            let isspg = best_in(Architecture::Isspg, bin);
            let esspg = best_in(Architecture::Esspg, bin);
            let (winner, mass_margin_kg, efficiency_margin, cost_margin) = match (&isspg, &esspg) {
                (Some(i), Some(e)) => {
                    let (w, l) = if summary_cmp(i, e) != Ordering::Greater { (i, e) } else { (e, i) };
                    (Some(w.design.arch), Some(l.mass_kg - w.mass_kg), Some(w.efficiency - l.efficiency), Some(l.cost - w.cost))
                }
                (Some(i), None) => (Some(i.design.arch), None, None, None),
                (None, Some(e)) => (Some(e.design.arch), None, None, None),
                (None, None) => (None, None, None, None),
            };
            ComparisonRow { bin: *bin, isspg, esspg, winner, mass_margin_kg, efficiency_margin, cost_margin }
        })
        .collect()
}
