//! Voter models: Complete, Take-X-Best, Attainability-Utility (AU) and
//! Attainability-Utility with Threshold (AUT).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::election::{argmax, Ballot, Scenario, Tally};
use crate::election::{approx_eq, check_k};
use crate::error::{Error, Result};

pub const DEFAULT_EPSILON: f64 = 1e-6;

/// How the per-candidate AU score measures a candidate's attainability.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CandidateAttainability {
    /// Attainability of the singleton outcome `{c}`: `A(c) · Π_{j≠c} (1 − A(j))`.
    /// Restricted to singleton ballots this is exactly the AU ballot score.
    #[default]
    Singleton,
    /// The candidate's own attainability `A(c)`.
    Marginal,
}

/// Parameters of the AU and AUT models.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Utility weight in `[0, 2]`; attainability gets `2 − alpha`.
    pub alpha: f64,
    /// Steepness of the attainability curve.
    pub beta: f64,
    /// AUT approval threshold.
    pub tau: f64,
    pub epsilon: f64,
    #[serde(default)]
    pub candidate_attainability: CandidateAttainability,
}

impl ModelParams {
    pub fn au(alpha: f64, beta: f64) -> Self {
        ModelParams {
            alpha,
            beta,
            tau: 0.0,
            epsilon: DEFAULT_EPSILON,
            candidate_attainability: CandidateAttainability::default(),
        }
    }

    pub fn aut(beta: f64, tau: f64) -> Self {
        ModelParams {
            tau,
            ..ModelParams::au(1.0, beta)
        }
    }

    #[must_use]
    pub fn with_epsilon(self, epsilon: f64) -> Self {
        ModelParams { epsilon, ..self }
    }

    #[must_use]
    pub fn with_candidate_attainability(self, mode: CandidateAttainability) -> Self {
        ModelParams {
            candidate_attainability: mode,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=2.0).contains(&self.alpha) {
            return Err(Error::param("alpha", format!("{} not in [0, 2]", self.alpha)));
        }
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(Error::param("beta", format!("{} must be > 0", self.beta)));
        }
        if !(self.tau.is_finite() && self.tau >= 0.0) {
            return Err(Error::param("tau", format!("{} must be >= 0", self.tau)));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::param("epsilon", format!("{} must be > 0", self.epsilon)));
        }
        Ok(())
    }
}

/// `T = {r, r+1, …, r + n̂·m}`: every total approval count the election can
/// end with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ApprovalCountSet {
    lowest: u32,
    highest: u32,
}

impl ApprovalCountSet {
    pub fn new(total_approvals: u32, missing_ballots: u32, m: usize) -> Self {
        ApprovalCountSet {
            lowest: total_approvals,
            highest: total_approvals + missing_ballots * m as u32,
        }
    }

    pub fn of(tally: &Tally) -> Self {
        Self::new(tally.total_approvals(), tally.missing_ballots, tally.counts.len())
    }

    pub fn lowest(&self) -> u32 {
        self.lowest
    }

    pub fn len(&self) -> usize {
        (self.highest - self.lowest + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> {
        self.lowest..=self.highest
    }
}

/// `(1/π)·atan(β·(s/t − 1/(m·k))) + 1/2`.
pub fn arctan_attainability(count: u32, total: u32, m: usize, k: usize, beta: f64) -> f64 {
    let share = f64::from(count) / f64::from(total);
    (beta * (share - 1.0 / (m * k) as f64)).atan() / PI + 0.5
}

/// Single-winner attainability of `candidate` against the current total `r`.
pub fn attainability_single(tally: &Tally, candidate: usize, beta: f64) -> Result<f64> {
    let total = tally.total_approvals();
    if total == 0 {
        return Err(Error::UndefinedDenominator);
    }
    Ok(arctan_attainability(
        tally.counts[candidate],
        total,
        tally.counts.len(),
        1,
        beta,
    ))
}

/// Multi-winner attainability: the single-winner curve with `1/m` replaced by
/// `1/(m·k)`, averaged over every achievable total approval count.
pub fn attainability_multi(tally: &Tally, candidate: usize, k: usize, beta: f64) -> Result<f64> {
    let m = tally.counts.len();
    check_k(k, m)?;
    let totals = ApprovalCountSet::of(tally);
    if totals.lowest() == 0 {
        return Err(Error::UndefinedDenominator);
    }
    let s = tally.counts[candidate];
    let sum: f64 = totals
        .iter()
        .map(|t| arctan_attainability(s, t, m, k, beta))
        .sum();
    Ok(sum / totals.len() as f64)
}

/// `attainability_multi` for every candidate.
pub fn attainabilities(tally: &Tally, k: usize, beta: f64) -> Result<Vec<f64>> {
    (0..tally.counts.len())
        .map(|c| attainability_multi(tally, c, k, beta))
        .collect()
}

fn outcome_attainability(attain: &[f64], ballot: Ballot) -> f64 {
    attain
        .iter()
        .enumerate()
        .map(|(i, a)| if ballot.contains(i) { *a } else { 1.0 - a })
        .product()
}

/// Attainability of exactly the set `ballot` winning:
/// `Π_{c∈b} A(c) · Π_{c∉b} (1 − A(c))`.
pub fn set_attainability(ballot: Ballot, tally: &Tally, k: usize, beta: f64) -> Result<f64> {
    let attain = attainabilities(tally, k, beta)?;
    Ok(outcome_attainability(&attain, ballot))
}

fn au_value(epsilon: f64, utility: f64, attainability: f64, alpha: f64) -> f64 {
    (epsilon + utility).powf(alpha) * attainability.powf(2.0 - alpha)
}

/// AU score of every ballot, indexed by mask.
pub fn au_ballot_scores(scenario: &Scenario, params: &ModelParams) -> Result<Vec<f64>> {
    params.validate()?;
    let attain = attainabilities(&scenario.tally, scenario.winners, params.beta)?;
    Ok(Ballot::all(scenario.m())
        .map(|b| {
            au_value(
                params.epsilon,
                scenario.utilities.of(b),
                outcome_attainability(&attain, b),
                params.alpha,
            )
        })
        .collect())
}

/// The AU ballot: argmax over all subsets of `(ε + u(b))^α · A(b)^(2−α)`.
pub fn au_ballot(scenario: &Scenario, params: &ModelParams) -> Result<Ballot> {
    let scores = au_ballot_scores(scenario, params)?;
    let (ballot, _) = argmax(
        scores
            .into_iter()
            .enumerate()
            .map(|(mask, v)| (Ballot::from_mask(mask as u32), v)),
    )
    .expect("2^m >= 2 ballots");
    Ok(ballot)
}

/// Per-candidate AU scores `(ε + u(c))^α · A_c^(2−α)`, where `A_c` follows
/// `params.candidate_attainability`.
pub fn au_scores(scenario: &Scenario, params: &ModelParams) -> Result<Vec<f64>> {
    params.validate()?;
    let attain = attainabilities(&scenario.tally, scenario.winners, params.beta)?;
    Ok((0..scenario.m())
        .map(|c| {
            let a = match params.candidate_attainability {
                CandidateAttainability::Singleton => {
                    outcome_attainability(&attain, Ballot::from_indices([c]))
                }
                CandidateAttainability::Marginal => attain[c],
            };
            au_value(params.epsilon, scenario.utilities.get(c), a, params.alpha)
        })
        .collect())
}

pub fn au_score(scenario: &Scenario, candidate: usize, params: &ModelParams) -> Result<f64> {
    if candidate >= scenario.m() {
        return Err(Error::Input(format!("candidate index {candidate} out of range")));
    }
    Ok(au_scores(scenario, params)?[candidate])
}

/// The AUT ballot: every candidate whose AU score reaches `tau` (inclusive).
pub fn aut_ballot(scenario: &Scenario, params: &ModelParams) -> Result<Ballot> {
    Ok(threshold(&au_scores(scenario, params)?, params.tau))
}

pub(crate) fn threshold(scores: &[f64], tau: f64) -> Ballot {
    Ballot::from_indices((0..scores.len()).filter(|&c| scores[c] >= tau))
}

/// Approve every candidate with positive utility.
pub fn complete_ballot(scenario: &Scenario) -> Ballot {
    Ballot::from_indices((0..scenario.m()).filter(|&c| scenario.utilities.get(c) > 0.0))
}

/// Approve the `x` highest-utility candidates. Utilities tied across the cut
/// make the ballot ambiguous and are rejected.
pub fn take_x_best(scenario: &Scenario, x: usize) -> Result<Ballot> {
    let m = scenario.m();
    if x == 0 || x > m {
        return Err(Error::param("x", format!("x={x} with m={m}; need 1 <= x <= m")));
    }
    let u = scenario.utilities.values();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| u[b].total_cmp(&u[a]).then(a.cmp(&b)));
    if x < m && approx_eq(u[order[x - 1]], u[order[x]]) {
        return Err(Error::TiedUtilities {
            x,
            a: scenario.candidates.label(order[x - 1]).to_string(),
            b: scenario.candidates.label(order[x]).to_string(),
        });
    }
    Ok(Ballot::from_indices(order[..x].iter().copied()))
}
