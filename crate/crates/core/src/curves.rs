//! Curve emitters: attainability against approval share, and per-candidate
//! AU scores against β. Both write `beta,candidate,value` CSV.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::write_atomic;
use crate::election::Scenario;
use crate::error::Result;
use crate::fitting::BETA_GRID;
use crate::heuristics::{arctan_attainability, au_scores, ModelParams};

pub const CURVE_HEADER: [&str; 3] = ["beta", "candidate", "value"];

/// β values of the attainability curve family.
pub const ATTAINABILITY_BETAS: [f64; 6] = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0];
/// Total approvals and candidate count of the attainability curves.
pub const ATTAINABILITY_TOTAL: u32 = 20;
pub const ATTAINABILITY_M: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub beta: f64,
    pub candidate: String,
    pub value: f64,
}

pub fn attainability_label(s: u32) -> String {
    format!("s={s}/r={ATTAINABILITY_TOTAL}")
}

/// Single-winner attainability of a candidate holding `s` of 20 approvals
/// among 5 candidates, for each β in [`ATTAINABILITY_BETAS`] and s = 0..=20.
pub fn attainability_curves() -> Vec<CurvePoint> {
    let mut out = Vec::new();
    for beta in ATTAINABILITY_BETAS {
        for s in 0..=ATTAINABILITY_TOTAL {
            out.push(CurvePoint {
                beta,
                candidate: attainability_label(s),
                value: arctan_attainability(s, ATTAINABILITY_TOTAL, ATTAINABILITY_M, 1, beta),
            });
        }
    }
    out
}

/// Per-candidate AU scores at α = 1 for every integer β on the fitting grid.
pub fn au_score_curves(scenario: &Scenario) -> Result<Vec<CurvePoint>> {
    let mut out = Vec::new();
    for beta in BETA_GRID {
        let params = ModelParams::au(1.0, f64::from(beta));
        for (c, value) in au_scores(scenario, &params)?.into_iter().enumerate() {
            out.push(CurvePoint {
                beta: f64::from(beta),
                candidate: scenario.candidates.label(c).to_string(),
                value,
            });
        }
    }
    Ok(out)
}

pub fn write_curve_csv<W: Write>(writer: W, points: &[CurvePoint]) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    wtr.write_record(CURVE_HEADER)?;
    for p in points {
        wtr.serialize(p)?;
    }
    wtr.flush().map_err(|e| crate::error::Error::io("<csv>", e))?;
    Ok(())
}

pub fn curve_csv(points: &[CurvePoint]) -> String {
    let mut buf = Vec::new();
    write_curve_csv(&mut buf, points).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is UTF-8")
}

pub fn read_curve_csv(text: &str) -> Result<Vec<CurvePoint>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    Ok(rdr.deserialize().collect::<std::result::Result<_, _>>()?)
}

pub fn save_curve(path: impl AsRef<Path>, points: &[CurvePoint]) -> Result<()> {
    write_atomic(path, curve_csv(points).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn attainability_family_shape() {
        let pts = attainability_curves();
        assert_eq!(pts.len(), 6 * 21);
        let at = |beta: f64, s: u32| {
            pts.iter()
                .find(|p| p.beta == beta && p.candidate == attainability_label(s))
                .unwrap()
                .value
        };
        assert!((at(8.0, 4) - 0.5).abs() < 1e-15);
        assert!(at(32.0, 20) > at(1.0, 20));
        assert!(at(32.0, 0) < at(1.0, 0));
    }

    #[test]
    fn csv_round_trips() {
        let pts = attainability_curves();
        let text = curve_csv(&pts);
        assert!(text.starts_with("beta,candidate,value\n"));
        assert_eq!(read_curve_csv(&text).unwrap(), pts);
    }
}
