//! Regenerated reference tables: the AU prediction map for Scenario A and the
//! optimal-ballot grid for both built-in scenarios.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::election::{optimal_ballot, Ballot, Scenario};
use crate::error::Result;
use crate::fitting::{ALPHA_GRID, BETA_GRID};
use crate::heuristics::{au_ballot, complete_ballot, take_x_best, ModelParams};
use crate::par;

/// A maximal run of consecutive β values sharing one predicted ballot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BallotRun {
    pub alpha: f64,
    pub ballot: String,
    pub first_beta: u32,
    pub last_beta: u32,
}

impl BallotRun {
    pub fn range(&self) -> String {
        if self.first_beta == self.last_beta {
            format!("[{}]", self.first_beta)
        } else {
            format!("[{}..{}]", self.first_beta, self.last_beta)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AuPredictionMap {
    pub scenario_id: String,
    pub epsilon: f64,
    pub alphas: Vec<f64>,
    /// `ballots[a][b]` is the prediction at `alphas[a]`, β = b + 1.
    pub ballots: Vec<Vec<String>>,
}

impl AuPredictionMap {
    pub fn ballot_at(&self, alpha: f64, beta: u32) -> Option<&str> {
        let a = self.alphas.iter().position(|&x| x == alpha)?;
        self.ballots[a].get(beta.checked_sub(1)? as usize).map(String::as_str)
    }

    /// Runs in increasing β for one α.
    pub fn runs(&self, alpha: f64) -> Vec<BallotRun> {
        let Some(a) = self.alphas.iter().position(|&x| x == alpha) else {
            return Vec::new();
        };
        let mut runs: Vec<BallotRun> = Vec::new();
        for (i, ballot) in self.ballots[a].iter().enumerate() {
            let beta = i as u32 + 1;
            match runs.last_mut() {
                Some(r) if &r.ballot == ballot => r.last_beta = beta,
                _ => runs.push(BallotRun {
                    alpha,
                    ballot: ballot.clone(),
                    first_beta: beta,
                    last_beta: beta,
                }),
            }
        }
        runs
    }

    pub fn all_runs(&self) -> Vec<BallotRun> {
        self.alphas.iter().flat_map(|&a| self.runs(a)).collect()
    }

    /// One row per distinct ballot (first-appearance order), one column per α
    /// holding the β ranges that predict it.
    pub fn to_text(&self) -> String {
        let runs = self.all_runs();
        let mut rows: Vec<&str> = Vec::new();
        for r in &runs {
            if !rows.contains(&r.ballot.as_str()) {
                rows.push(&r.ballot);
            }
        }
        let cell = |ballot: &str, alpha: f64| {
            runs.iter()
                .filter(|r| r.ballot == ballot && r.alpha == alpha)
                .map(BallotRun::range)
                .collect::<Vec<_>>()
                .join(", ")
        };
        let label = |b: &str| if b.is_empty() { "(empty)".to_string() } else { b.replace('|', ",") };
        let w0 = rows.iter().map(|b| label(b).len()).max().unwrap_or(0).max(6);
        let w = 10;
        let mut out = format!(
            "AU predictions, Scenario {} (epsilon = {:e})\n",
            self.scenario_id, self.epsilon
        );
        let _ = write!(out, "{:w0$}", "Ballot");
        for a in &self.alphas {
            let _ = write!(out, "  {:>w$}", format!("alpha={a}"));
        }
        out.push('\n');
        for b in rows {
            let _ = write!(out, "{:w0$}", label(b));
            for &a in &self.alphas {
                let _ = write!(out, "  {:>w$}", cell(b, a));
            }
            out.push('\n');
        }
        out
    }
}

/// AU ballot for every α ∈ {0, 1, 2} and integer β ∈ 1..=32 at the
/// scenario's own condition.
pub fn au_prediction_map(scenario: &Scenario, epsilon: f64) -> Result<AuPredictionMap> {
    let grid: Vec<(usize, u32)> = (0..ALPHA_GRID.len())
        .flat_map(|a| BETA_GRID.map(move |b| (a, b)))
        .collect();
    let ballots = par::map(&grid, |&(a, b)| {
        let params = ModelParams::au(ALPHA_GRID[a], f64::from(b)).with_epsilon(epsilon);
        au_ballot(scenario, &params).map(|ballot| scenario.candidates.format_ballot(ballot))
    });
    let mut rows = vec![Vec::new(); ALPHA_GRID.len()];
    for (&(a, _), ballot) in grid.iter().zip(ballots) {
        rows[a].push(ballot?);
    }
    Ok(AuPredictionMap {
        scenario_id: scenario.id.clone(),
        epsilon,
        alphas: ALPHA_GRID.to_vec(),
        ballots: rows,
    })
}

/// Missing-ballot counts of the optimal-ballot grid.
pub const OPTIMAL_MISSING: [u32; 3] = [0, 1, 3];
pub const OPTIMAL_WINNERS: [usize; 3] = [1, 2, 3];
/// Largest gap between an oracle value and its reference counted as a match.
pub const VALUE_TOLERANCE: f64 = 0.005;

/// Published two-decimal maximum expected utilities, indexed
/// `[missing row][k - 1]` with rows n̂ = 0, 1, 3.
pub fn reference_value(scenario_id: &str, missing: u32, winners: usize) -> Option<f64> {
    const A: [[f64; 3]; 3] = [[0.12, 0.22, 0.31], [0.11, 0.21, 0.30], [0.11, 0.20, 0.29]];
    const B: [[f64; 3]; 3] = [[0.13, 0.26, 0.36], [0.12, 0.22, 0.31], [0.11, 0.21, 0.29]];
    let table = match scenario_id {
        "A" => &A,
        "B" => &B,
        _ => return None,
    };
    let row = OPTIMAL_MISSING.iter().position(|&n| n == missing)?;
    table[row].get(winners.checked_sub(1)?).copied()
}

/// Round half away from zero to two decimals.
pub fn round2(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OptimalCell {
    pub scenario_id: String,
    pub winners: usize,
    pub missing: u32,
    pub ballot: String,
    pub value: f64,
    /// "Take X" or "Complete" when a sincere heuristic produces the ballot.
    pub heuristic: Option<String>,
    pub reference: Option<f64>,
    pub divergent: bool,
}

impl OptimalCell {
    pub fn summary(&self) -> String {
        let h = self.heuristic.as_deref().unwrap_or("other");
        let mut s = format!("{h}, {:.2}", round2(self.value));
        if self.divergent {
            if let Some(r) = self.reference {
                let _ = write!(s, " [!= {r:.2}]");
            }
        }
        s
    }
}

/// Names the sincere heuristic reproducing `ballot`, preferring Take X.
pub fn heuristic_label(scenario: &Scenario, ballot: Ballot) -> Option<String> {
    (1..=scenario.m())
        .find(|&x| take_x_best(scenario, x).is_ok_and(|b| b == ballot))
        .map(|x| format!("Take {x}"))
        .or_else(|| (complete_ballot(scenario) == ballot).then(|| "Complete".to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalTable {
    pub cells: Vec<OptimalCell>,
}

impl OptimalTable {
    pub fn cell(&self, scenario_id: &str, winners: usize, missing: u32) -> Option<&OptimalCell> {
        self.cells
            .iter()
            .find(|c| c.scenario_id == scenario_id && c.winners == winners && c.missing == missing)
    }

    pub fn divergent(&self) -> impl Iterator<Item = &OptimalCell> {
        self.cells.iter().filter(|c| c.divergent)
    }

    pub fn to_text(&self) -> String {
        let mut ids: Vec<&str> = Vec::new();
        for c in &self.cells {
            if !ids.contains(&c.scenario_id.as_str()) {
                ids.push(&c.scenario_id);
            }
        }
        let w = 26;
        let mut out = String::from("Maximum expected utility (optimal ballot)\n");
        for id in ids {
            let _ = write!(out, "\nScenario {id}\n{:8}", "");
            for k in OPTIMAL_WINNERS {
                let _ = write!(out, "  {:w$}", format!("k={k}"));
            }
            out.push('\n');
            for n in OPTIMAL_MISSING {
                let _ = write!(out, "{:8}", format!("n={n}"));
                for k in OPTIMAL_WINNERS {
                    let text = self.cell(id, k, n).map(OptimalCell::summary).unwrap_or_default();
                    let _ = write!(out, "  {text:w$}");
                }
                out.push('\n');
            }
            for n in OPTIMAL_MISSING {
                for k in OPTIMAL_WINNERS {
                    if let Some(c) = self.cell(id, k, n) {
                        let _ = writeln!(out, "  k={k} n={n}: {} = {:.5}", c.ballot.replace('|', ","), c.value);
                    }
                }
            }
        }
        let flagged = self.divergent().count();
        if flagged > 0 {
            let _ = writeln!(
                out,
                "\n{flagged} cell(s) differ from the reference values by more than {VALUE_TOLERANCE}; marked [!= ref]"
            );
        }
        out
    }
}

/// Optimal ballot and expected utility for each scenario under every
/// k ∈ {1, 2, 3} and n̂ ∈ {0, 1, 3}.
pub fn optimal_table(scenarios: &[Scenario]) -> Result<OptimalTable> {
    let mut conditions = Vec::new();
    for s in scenarios {
        for n in OPTIMAL_MISSING {
            for k in OPTIMAL_WINNERS {
                conditions.push(s.with_condition(k, n)?);
            }
        }
    }
    let cells = par::map(&conditions, |s| {
        let (ballot, value) = optimal_ballot(s);
        let reference = reference_value(&s.id, s.tally.missing_ballots, s.winners);
        OptimalCell {
            scenario_id: s.id.clone(),
            winners: s.winners,
            missing: s.tally.missing_ballots,
            ballot: s.candidates.format_ballot(ballot),
            value,
            heuristic: heuristic_label(s, ballot),
            reference,
            divergent: reference.is_some_and(|r| (value - r).abs() > VALUE_TOLERANCE + 1e-12),
        }
    });
    Ok(OptimalTable { cells })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_is_half_away_from_zero() {
        assert_eq!(round2(0.125), 0.13);
        assert_eq!(round2(0.35), 0.35);
        assert_eq!(round2(0.11806), 0.12);
    }

    #[test]
    fn reference_lookup() {
        assert_eq!(reference_value("B", 0, 3), Some(0.36));
        assert_eq!(reference_value("A", 3, 1), Some(0.11));
        assert_eq!(reference_value("A", 2, 1), None);
        assert_eq!(reference_value("C", 0, 1), None);
    }

    #[test]
    fn runs_merge_consecutive_betas() {
        let map = AuPredictionMap {
            scenario_id: "t".into(),
            epsilon: 1e-6,
            alphas: vec![1.0],
            ballots: vec![vec!["A".into(), "A".into(), "B".into()]],
        };
        let runs = map.runs(1.0);
        assert_eq!(runs.len(), 2);
        assert_eq!(runs[0].range(), "[1..2]");
        assert_eq!(runs[1].range(), "[3]");
        assert_eq!(map.ballot_at(1.0, 3), Some("B"));
        assert_eq!(map.ballot_at(1.0, 0), None);
    }
}
