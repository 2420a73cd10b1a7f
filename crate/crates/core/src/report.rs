//! Sweep orchestration and report files.
//!
//! All files are written by one thread after the search finishes. Nothing
//! time- or host-dependent goes into them, so identical configs give
//! byte-identical output.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{ConfigError, ReferencePoint, RunConfig};
use crate::geometry::Architecture;
use crate::mass::PowerLaw;
use crate::search::{compare_architectures, optimize_arch, rank_cmp, ArchSweep, ComparisonRow, DesignEvaluation, Problem, WinnerSummary};
use crate::sheet::{DimensionSheet, SheetError};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Sheet(#[from] SheetError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BearingFitSummary {
    pub bore_min_mm: f64,
    pub bore_max_mm: f64,
    pub rows: usize,
    pub mass: PowerLaw,
    pub outer_diameter: PowerLaw,
    pub width: PowerLaw,
}

/// Model result next to a published mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceCheck {
    pub reference: ReferencePoint,
    /// Best design with exactly the reference ratio.
    pub at_ratio: Option<WinnerSummary>,
    /// Model minus reference, kg.
    pub delta_kg: Option<f64>,
    pub delta_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub generator: String,
    pub config: RunConfig,
    pub bearing_fit: BearingFitSummary,
    pub sweeps: Vec<ArchSweep>,
    pub comparison: Vec<ComparisonRow>,
    pub references: Vec<ReferenceCheck>,
    pub designs_evaluated: usize,
    /// Smallest mesh parameter `e1^2 + e2^2 - e1 - e2 + 1` over all evaluated meshes.
    pub min_eps_parameter: Option<f64>,
}

pub struct SweepOutput {
    pub report: SweepReport,
    pub evaluations: Vec<DesignEvaluation>,
    pub problem: Problem,
}

/// Best feasible evaluation at exactly `ratio`.
pub fn best_at_ratio(evals: &[DesignEvaluation], arch: Architecture, ratio: f64) -> Option<&DesignEvaluation> {
    evals.iter().filter(|e| e.feasible && e.design.arch == arch && (e.reduction_ratio - ratio).abs() < 1e-9).min_by(|a, b| rank_cmp(a, b))
}

fn summarize(ev: &DesignEvaluation) -> Option<WinnerSummary> {
    Some(WinnerSummary {
        design: ev.design,
        reduction_ratio: ev.reduction_ratio,
        mass_kg: ev.total_mass()?,
        efficiency: ev.eta()?,
        cost: ev.cost?,
    })
}

/// Runs the search for the given architectures (the config's when `None`).
pub fn run_sweep(cfg: &RunConfig, archs: Option<&[Architecture]>) -> Result<SweepOutput, ReportError> {
    let problem = cfg.problem()?;
    let archs = archs.map(<[Architecture]>::to_vec).unwrap_or_else(|| cfg.architectures());
    let bins = cfg.bins();
    let mut sweeps = Vec::new();
    let mut evaluations = Vec::new();
    for arch in archs {
        log::info!("sweeping {arch}");
        let (sweep, evals) = optimize_arch(&problem, arch, &bins);
        log::info!("{arch}: {} designs evaluated", evals.len());
        sweeps.push(sweep);
        evaluations.extend(evals);
    }

    let references = cfg
        .reference
        .iter()
        .map(|r| {
            let at_ratio = best_at_ratio(&evaluations, r.architecture, r.ratio).and_then(summarize);
            let delta_kg = at_ratio.map(|s| s.mass_kg - r.mass_kg);
            ReferenceCheck { reference: r.clone(), at_ratio, delta_kg, delta_fraction: delta_kg.map(|d| d / r.mass_kg) }
        })
        .collect();

    let min_eps_parameter = evaluations.iter().filter_map(|e| e.efficiency).flat_map(|b| [b.eps_a, b.eps_b]).min_by(f64::total_cmp);

    let (lo, hi) = problem.bearings.bore_range();
    let bearing_fit = BearingFitSummary {
        bore_min_mm: lo,
        bore_max_mm: hi,
        rows: problem.bearings.table.len(),
        mass: problem.bearings.mass_fit,
        outer_diameter: problem.bearings.od_fit,
        width: problem.bearings.width_fit,
    };

    let report = SweepReport {
        generator: format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION")),
        config: cfg.clone(),
        bearing_fit,
        comparison: compare_architectures(&sweeps),
        sweeps,
        references,
        designs_evaluated: evaluations.len(),
        min_eps_parameter,
    };
    Ok(SweepOutput { report, evaluations, problem })
}

fn fmt_opt(v: Option<f64>, prec: usize) -> String {
    v.map(|x| format!("{x:.prec$}")).unwrap_or_default()
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), ReportError> {
    fs::write(path, bytes).map_err(|source| ReportError::Io { path: path.to_path_buf(), source })
}

fn results_csv(sweep: &ArchSweep) -> Result<Vec<u8>, ReportError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "bin_lo",
        "bin_hi",
        "status",
        "sun_teeth",
        "planet_teeth",
        "ring_teeth",
        "module_mm",
        "planets",
        "ratio",
        "face_width_mm",
        "mass_kg",
        "efficiency",
        "cost",
        "candidates",
        "feasible",
        "blocking",
    ])?;
    for b in &sweep.bins {
        let mut row = vec![b.bin.lo.to_string(), b.bin.hi.to_string()];
        match &b.best {
            Some(e) => {
                let d = e.design;
                row.extend([
                    "ok".to_string(),
                    d.sun_teeth.to_string(),
                    d.planet_teeth.to_string(),
                    d.ring_teeth.to_string(),
                    d.module_mm.to_string(),
                    d.planets.to_string(),
                    format!("{:.4}", e.reduction_ratio),
                    fmt_opt(e.face_width_mm, 3),
                    fmt_opt(e.total_mass(), 4),
                    fmt_opt(e.eta(), 6),
                    fmt_opt(e.cost, 6),
                ]);
            }
            None => {
                row.push("empty".into());
                row.extend(std::iter::repeat_n(String::new(), 10));
            }
        }
        row.push(b.candidates_examined.to_string());
        row.push(b.feasible_count.to_string());
        row.push(b.blocking.as_ref().map(|r| r.dominant.clone()).unwrap_or_default());
        w.write_record(&row)?;
    }
    Ok(w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?)
}

fn candidates_csv(evals: &[DesignEvaluation]) -> Result<Vec<u8>, ReportError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "architecture",
        "sun_teeth",
        "planet_teeth",
        "ring_teeth",
        "module_mm",
        "planets",
        "ratio",
        "feasible",
        "face_width_mm",
        "mass_kg",
        "efficiency",
        "cost",
        "failures",
    ])?;
    for e in evals {
        let d = e.design;
        let failures: Vec<&str> = e.failures.iter().map(|f| f.code.as_str()).collect();
        w.write_record([
            d.arch.key().to_string(),
            d.sun_teeth.to_string(),
            d.planet_teeth.to_string(),
            d.ring_teeth.to_string(),
            d.module_mm.to_string(),
            d.planets.to_string(),
            format!("{:.6}", e.reduction_ratio),
            e.feasible.to_string(),
            fmt_opt(e.face_width_mm, 4),
            fmt_opt(e.total_mass(), 6),
            fmt_opt(e.eta(), 8),
            fmt_opt(e.cost, 8),
            failures.join(";"),
        ])?;
    }
    Ok(w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?)
}

fn design_cell(s: &Option<WinnerSummary>) -> [String; 3] {
    match s {
        Some(s) => {
            let d = s.design;
            [
                format!(
                    "{:.3}:1 ({}/{}/{}, m={}, {} planets)",
                    s.reduction_ratio, d.sun_teeth, d.planet_teeth, d.ring_teeth, d.module_mm, d.planets
                ),
                format!("{:.3}", s.mass_kg),
                format!("{:.4}", s.efficiency),
            ]
        }
        None => ["none".into(), String::new(), String::new()],
    }
}

/// Human-readable comparison of the two architectures.
pub fn comparison_markdown(report: &SweepReport) -> String {
    let cfg = &report.config;
    let mut md = String::new();
    let _ = writeln!(md, "# Gearbox comparison: {}\n", cfg.motor.name);
    let _ = writeln!(
        md,
        "Friction coefficient {}, cost = {} * mass - {} * efficiency. Gear teeth listed as sun/planet/ring.\n",
        cfg.efficiency.friction_coefficient, cfg.cost.mass_weight, cfg.cost.efficiency_weight
    );
    let _ = writeln!(md, "| Ratio bin | ISSPG best | ISSPG mass (kg) | ISSPG eff. | ESSPG best | ESSPG mass (kg) | ESSPG eff. | Winner | Mass margin (kg) | Eff. margin |");
    let _ = writeln!(md, "|---|---|---|---|---|---|---|---|---|---|");
    for row in &report.comparison {
        let [i0, i1, i2] = design_cell(&row.isspg);
        let [e0, e1, e2] = design_cell(&row.esspg);
        let winner = row.winner.map(|a| a.to_string()).unwrap_or_else(|| "none".into());
        let _ = writeln!(
            md,
            "| {} | {i0} | {i1} | {i2} | {e0} | {e1} | {e2} | {winner} | {} | {} |",
            row.bin.label(),
            fmt_opt(row.mass_margin_kg, 3),
            fmt_opt(row.efficiency_margin, 4)
        );
    }

    let empty: Vec<String> = report
        .sweeps
        .iter()
        .flat_map(|s| s.bins.iter())
        .filter_map(|b| b.blocking.as_ref().map(|r| format!("- {} {}: {} ({})", b.arch, b.bin.label(), r.dominant, r.detail)))
        .collect();
    if !empty.is_empty() {
        let _ = writeln!(md, "\n## Empty bins\n");
        for line in empty {
            let _ = writeln!(md, "{line}");
        }
    }

    if !report.references.is_empty() {
        let _ = writeln!(md, "\n## Reference masses\n");
        let _ = writeln!(md, "| Reference | Architecture | Ratio | Reference mass (kg) | Model mass (kg) | Delta (kg) | Delta (%) |");
        let _ = writeln!(md, "|---|---|---|---|---|---|---|");
        for r in &report.references {
            let p = &r.reference;
            let _ = writeln!(
                md,
                "| {} | {} | {} | {:.3} | {} | {} | {} |",
                p.label.as_deref().unwrap_or(""),
                p.architecture,
                p.ratio,
                p.mass_kg,
                fmt_opt(r.at_ratio.map(|s| s.mass_kg), 3),
                fmt_opt(r.delta_kg, 3),
                fmt_opt(r.delta_fraction.map(|f| 100.0 * f), 1)
            );
        }
    }

    if !cfg.defaults_applied.is_empty() {
        let _ = writeln!(md, "\n## Defaults applied\n");
        let _ = writeln!(md, "{}", cfg.defaults_applied.join(", "));
    }
    md
}

/// Writes the sweep document, per-architecture tables, the comparison,
/// dimension sheets for every bin winner and, optionally, the candidate log.
/// Returns the written paths.
pub fn write_outputs(out: &SweepOutput, dir: &Path, log_candidates: bool) -> Result<Vec<PathBuf>, ReportError> {
    let mkdir = |p: &Path| fs::create_dir_all(p).map_err(|source| ReportError::Io { path: p.to_path_buf(), source });
    let sheets_dir = dir.join("sheets");
    mkdir(dir)?;
    mkdir(&sheets_dir)?;
    let mut written = Vec::new();
    let mut emit = |path: PathBuf, bytes: Vec<u8>| -> Result<(), ReportError> {
        write_file(&path, &bytes)?;
        written.push(path);
        Ok(())
    };

    let mut json = serde_json::to_vec_pretty(&out.report)?;
    json.push(b'\n');
    emit(dir.join("sweep.json"), json)?;
    for sweep in &out.report.sweeps {
        emit(dir.join(format!("results_{}.csv", sweep.arch.key())), results_csv(sweep)?)?;
        for b in &sweep.bins {
            if let Some(best) = &b.best {
                let sheet = DimensionSheet::from_evaluation(best, &out.problem)?;
                let mut bytes = serde_json::to_vec_pretty(&sheet)?;
                bytes.push(b'\n');
                emit(sheets_dir.join(format!("{}_{}-{}.json", sweep.arch.key(), b.bin.lo, b.bin.hi)), bytes)?;
            }
        }
    }
    emit(dir.join("comparison.md"), comparison_markdown(&out.report).into_bytes())?;
    if log_candidates {
        emit(dir.join("candidates.csv"), candidates_csv(&out.evaluations)?)?;
    }
    Ok(written)
}
