//! Continuous bearing model fitted to a catalog table.
//!
//! Mass, outer diameter and width are each fitted as `c * bore^k` by least
//! squares in log-log space. The fitted curves are continuous and monotone,
//! so actuator mass does not jump when a bore crosses a catalog size.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{ModelError, ModelResult};

/// The catalog shipped with the crate: miniature and thin-section deep groove
/// ball bearings (68x / 618xx), bores 3 to 100 mm.
pub const EMBEDDED_TABLE: &str = include_str!("../../data/bearings_618.csv");

#[derive(Debug, Error)]
pub enum TableError {
    #[error("bearing table: {0}")]
    Csv(#[from] csv::Error),
    #[error("bearing table: {0}")]
    Io(#[from] std::io::Error),
    #[error("bearing table row {row}: {reason}")]
    Row { row: usize, reason: String },
    #[error("bearing table needs at least 2 rows, got {0}")]
    TooShort(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BearingRow {
    pub bore_mm: f64,
    pub od_mm: f64,
    pub width_mm: f64,
    pub mass_kg: f64,
}

/// `value = coefficient * bore_mm ^ exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLaw {
    pub coefficient: f64,
    pub exponent: f64,
    /// Coefficient of determination in log-log space (the space of the fit).
    pub r2_log: f64,
    /// Coefficient of determination of the back-transformed curve.
    pub r2_linear: f64,
}

impl PowerLaw {
    pub fn eval(&self, bore_mm: f64) -> f64 {
        self.coefficient * bore_mm.powf(self.exponent)
    }

    pub fn invert(&self, value: f64) -> f64 {
        (value / self.coefficient).powf(1.0 / self.exponent)
    }

    fn fit(xs: &[f64], ys: &[f64]) -> Self {
        let n = xs.len() as f64;
        let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
        let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
        let mx = lx.iter().sum::<f64>() / n;
        let my = ly.iter().sum::<f64>() / n;
        let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
        let exponent = sxy / sxx;
        let intercept = my - exponent * mx;
        let coefficient = intercept.exp();

        let r2 = |obs: &[f64], pred: &[f64]| {
            let mean = obs.iter().sum::<f64>() / obs.len() as f64;
            let ss_res: f64 = obs.iter().zip(pred).map(|(o, p)| (o - p).powi(2)).sum();
            let ss_tot: f64 = obs.iter().map(|o| (o - mean).powi(2)).sum();
            1.0 - ss_res / ss_tot
        };
        let pred_log: Vec<f64> = lx.iter().map(|x| intercept + exponent * x).collect();
        let pred_lin: Vec<f64> = xs.iter().map(|x| coefficient * x.powf(exponent)).collect();
        Self { coefficient, exponent, r2_log: r2(&ly, &pred_log), r2_linear: r2(ys, &pred_lin) }
    }
}

/// A bearing as evaluated on the fitted curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BearingSelection {
    pub bore_mm: f64,
    pub od_mm: f64,
    pub width_mm: f64,
    pub mass_kg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BearingModel {
    pub table: Vec<BearingRow>,
    pub mass_fit: PowerLaw,
    pub od_fit: PowerLaw,
    pub width_fit: PowerLaw,
}

impl BearingModel {
    pub fn embedded() -> Self {
        Self::from_csv_str(EMBEDDED_TABLE).expect("embedded bearing table is valid")
    }

    pub fn from_path(path: &Path) -> Result<Self, TableError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_csv_str(&text)
    }

    pub fn from_csv_str(text: &str) -> Result<Self, TableError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let mut rows = Vec::new();
        for rec in rdr.deserialize() {
            rows.push(rec?);
        }
        Self::from_rows(rows)
    }

    pub fn from_rows(table: Vec<BearingRow>) -> Result<Self, TableError> {
        if table.len() < 2 {
            return Err(TableError::TooShort(table.len()));
        }
        for (i, r) in table.iter().enumerate() {
            let row = i + 1;
            if !(r.bore_mm > 0.0 && r.od_mm > r.bore_mm && r.width_mm > 0.0 && r.mass_kg > 0.0) {
                return Err(TableError::Row { row, reason: "need bore > 0, od > bore, width > 0, mass > 0".into() });
            }
            if i > 0 && r.bore_mm <= table[i - 1].bore_mm {
                return Err(TableError::Row { row, reason: "bores must be strictly increasing".into() });
            }
        }
        let bores: Vec<f64> = table.iter().map(|r| r.bore_mm).collect();
        let col = |f: fn(&BearingRow) -> f64| table.iter().map(f).collect::<Vec<_>>();
        let mass_fit = PowerLaw::fit(&bores, &col(|r| r.mass_kg));
        let od_fit = PowerLaw::fit(&bores, &col(|r| r.od_mm));
        let width_fit = PowerLaw::fit(&bores, &col(|r| r.width_mm));
        for (name, fit) in [("mass", &mass_fit), ("outer diameter", &od_fit)] {
            if !(fit.exponent > 0.0) {
                return Err(TableError::Row { row: 0, reason: format!("fitted {name} does not increase with bore") });
            }
        }
        Ok(Self { table, mass_fit, od_fit, width_fit })
    }

    pub fn bore_range(&self) -> (f64, f64) {
        (self.table[0].bore_mm, self.table[self.table.len() - 1].bore_mm)
    }

    fn check_range(&self, bore_mm: f64) -> ModelResult<()> {
        let (lo, hi) = self.bore_range();
        if bore_mm < lo || bore_mm > hi || !bore_mm.is_finite() {
            return Err(ModelError::BearingRange { bore_mm, min_mm: lo, max_mm: hi });
        }
        Ok(())
    }

    pub fn bearing_mass(&self, bore_mm: f64) -> ModelResult<f64> {
        self.select(bore_mm).map(|b| b.mass_kg)
    }

    /// Fitted mass, OD and width at the given bore.
    pub fn select(&self, bore_mm: f64) -> ModelResult<BearingSelection> {
        self.check_range(bore_mm)?;
        Ok(BearingSelection {
            bore_mm,
            od_mm: self.od_fit.eval(bore_mm),
            width_mm: self.width_fit.eval(bore_mm),
            mass_kg: self.mass_fit.eval(bore_mm),
        })
    }

    /// Largest bearing whose fitted OD does not exceed `od_max_mm`, capped at
    /// the table's largest bore.
    pub fn largest_within_od(&self, od_max_mm: f64) -> ModelResult<BearingSelection> {
        let (lo, hi) = self.bore_range();
        let bore = self.od_fit.invert(od_max_mm.max(0.0));
        if bore < lo {
            return Err(ModelError::BearingRange { bore_mm: bore, min_mm: lo, max_mm: hi });
        }
        self.select(bore.min(hi))
    }

    /// Relative residual `(fit - table) / table` of the mass fit at each row.
    pub fn mass_residuals(&self) -> Vec<f64> {
        self.table.iter().map(|r| self.mass_fit.eval(r.bore_mm) / r.mass_kg - 1.0).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_table_fits() {
        let m = BearingModel::embedded();
        assert_eq!(m.bore_range(), (3.0, 100.0));
        assert!(m.mass_fit.r2_log >= 0.95, "{:?}", m.mass_fit);
        assert!(m.od_fit.r2_log >= 0.95);
        assert!(m.mass_fit.exponent > 0.0);
    }

    #[test]
    fn fit_recovers_exact_power_law() {
        let rows: Vec<BearingRow> = (1..10)
            .map(|i| {
                let b = 5.0 * f64::from(i);
                BearingRow { bore_mm: b, od_mm: 1.5 * b.powf(0.9) + b, width_mm: 0.5 * b.powf(0.4), mass_kg: 2e-4 * b.powf(1.7) }
            })
            .collect();
        let m = BearingModel::from_rows(rows).unwrap();
        assert!((m.mass_fit.exponent - 1.7).abs() < 1e-10);
        assert!((m.mass_fit.coefficient - 2e-4).abs() < 1e-14);
        assert!((m.mass_fit.r2_linear - 1.0).abs() < 1e-12);
        assert!(m.mass_residuals().iter().all(|r| r.abs() < 1e-10));
    }

    #[test]
    fn out_of_range_is_an_error() {
        let m = BearingModel::embedded();
        assert!(matches!(m.select(2.0), Err(ModelError::BearingRange { .. })));
        assert!(matches!(m.select(120.0), Err(ModelError::BearingRange { .. })));
        assert!(m.select(3.0).is_ok() && m.select(100.0).is_ok());
    }

    #[test]
    fn monotone_over_range() {
        let m = BearingModel::embedded();
        let mut prev = 0.0;
        for i in 0..=970 {
            let bore = 3.0 + f64::from(i) * 0.1;
            let mass = m.bearing_mass(bore).unwrap();
            assert!(mass >= prev);
            prev = mass;
        }
    }

    #[test]
    fn od_inversion() {
        let m = BearingModel::embedded();
        let sel = m.largest_within_od(30.0).unwrap();
        assert!((sel.od_mm - 30.0).abs() < 1e-9);
        assert!(m.largest_within_od(5.0).is_err());
        assert_eq!(m.largest_within_od(1e4).unwrap().bore_mm, 100.0);
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(matches!(BearingModel::from_csv_str("bore_mm,od_mm,width_mm,mass_kg\n10,19,5,0.005\n"), Err(TableError::TooShort(1))));
        let unsorted = "bore_mm,od_mm,width_mm,mass_kg\n10,19,5,0.005\n8,16,5,0.004\n";
        assert!(matches!(BearingModel::from_csv_str(unsorted), Err(TableError::Row { row: 2, .. })));
        assert!(BearingModel::from_csv_str("bore,od\n1,2\n3,4\n").is_err());
    }
}
