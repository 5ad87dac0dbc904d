//! Grid-search fitting and leave-one-out evaluation of voter models against
//! observed ballots.
//!
//! Each voter answers six conditions per winner count (two scenarios × three
//! missing-ballot levels). Fitted models are trained on five of them and
//! scored on the sixth by exact ballot match; deterministic models need no
//! training. Grid maximizers are resolved by grid order, so fits never depend
//! on the order of the input records.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::election::{optimal_ballot, Ballot, Scenario};
use crate::error::{Error, Result};
use crate::heuristics::{
    au_ballot, au_scores, complete_ballot, take_x_best, threshold, ModelParams,
};
use crate::par;
use crate::report::{AccuracyReport, ReportCell, ReportRow};

/// Built-in and user scenarios keyed by scenario id.
pub type Scenarios = BTreeMap<String, Scenario>;

/// Number of τ steps in the AUT grid: τ ∈ {0, 0.0005, …, 0.1}.
pub const TAU_STEPS: u32 = 200;
pub const TAU_STEP: f64 = 0.0005;
pub const BETA_GRID: std::ops::RangeInclusive<u32> = 1..=32;
pub const ALPHA_GRID: [f64; 3] = [0.0, 1.0, 2.0];

/// The five models compared, in report row order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Optimal,
    Au,
    Complete,
    TakeKBest,
    Aut,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::Optimal,
        ModelKind::Au,
        ModelKind::Complete,
        ModelKind::TakeKBest,
        ModelKind::Aut,
    ];

    pub fn display_name(self) -> &'static str {
        match self {
            ModelKind::Optimal => "Optimal",
            ModelKind::Au => "AU",
            ModelKind::Complete => "Complete",
            ModelKind::TakeKBest => "Take k best",
            ModelKind::Aut => "AUT",
        }
    }

    pub fn is_fitted(self) -> bool {
        matches!(self, ModelKind::Au | ModelKind::Aut)
    }

    /// Parameter grid in tie-break order; `[None]` for deterministic models.
    pub fn grid(self) -> Vec<Option<ModelParams>> {
        match self {
            ModelKind::Au => au_grid().into_iter().map(Some).collect(),
            ModelKind::Aut => aut_grid().into_iter().map(Some).collect(),
            _ => vec![None],
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Optimal => "optimal",
            ModelKind::Au => "au",
            ModelKind::Complete => "complete",
            ModelKind::TakeKBest => "take-k-best",
            ModelKind::Aut => "aut",
        })
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "optimal" | "opt" => Ok(ModelKind::Optimal),
            "au" => Ok(ModelKind::Au),
            "complete" => Ok(ModelKind::Complete),
            "take-k-best" | "takek" | "take-k" => Ok(ModelKind::TakeKBest),
            "aut" => Ok(ModelKind::Aut),
            other => Err(Error::Input(format!("unknown model `{other}`"))),
        }
    }
}

/// α ∈ {0,1,2} × β ∈ {1..32}, α-major.
pub fn au_grid() -> Vec<ModelParams> {
    ALPHA_GRID
        .iter()
        .flat_map(|&a| BETA_GRID.map(move |b| ModelParams::au(a, f64::from(b))))
        .collect()
}

/// α = 1, β ∈ {1..32} × τ ∈ {0, 0.0005, …, 0.1}, β-major.
pub fn aut_grid() -> Vec<ModelParams> {
    BETA_GRID
        .flat_map(|b| (0..=TAU_STEPS).map(move |i| ModelParams::aut(f64::from(b), tau_at(i))))
        .collect()
}

/// `i`-th τ grid value, computed as a quotient so that e.g. 0.007 is exact
/// to the nearest double.
pub fn tau_at(i: u32) -> f64 {
    f64::from(i) / 2000.0
}

/// Prediction of `kind` for one scenario. `params` is required for AU/AUT.
pub fn predict(kind: ModelKind, scenario: &Scenario, params: Option<&ModelParams>) -> Result<Ballot> {
    let need = || Error::Input(format!("model {kind} requires parameters"));
    match kind {
        ModelKind::Optimal => Ok(optimal_ballot(scenario).0),
        ModelKind::Complete => Ok(complete_ballot(scenario)),
        ModelKind::TakeKBest => take_x_best(scenario, scenario.winners),
        ModelKind::Au => au_ballot(scenario, params.ok_or_else(need)?),
        ModelKind::Aut => {
            let p = params.ok_or_else(need)?;
            crate::heuristics::aut_ballot(scenario, p)
        }
    }
}

/// Predictions over a whole grid. AUT shares one score vector per (α, β).
pub fn predict_grid(
    kind: ModelKind,
    scenario: &Scenario,
    grid: &[Option<ModelParams>],
) -> Result<Vec<Ballot>> {
    if kind != ModelKind::Aut {
        return grid.iter().map(|p| predict(kind, scenario, p.as_ref())).collect();
    }
    let mut scores: Option<((u64, u64), Vec<f64>)> = None;
    grid.iter()
        .map(|p| {
            let p = p.as_ref().ok_or_else(|| Error::Input("AUT grid needs parameters".into()))?;
            let key = (p.alpha.to_bits(), p.beta.to_bits());
            if scores.as_ref().map(|(k, _)| *k) != Some(key) {
                scores = Some((key, au_scores(scenario, p)?));
            }
            Ok(threshold(&scores.as_ref().expect("just set").1, p.tau))
        })
        .collect()
}

/// One (scenario, k, n̂) presentation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Condition {
    pub scenario_id: String,
    pub winners: u32,
    pub missing: u32,
}

impl Condition {
    pub fn new(scenario_id: impl Into<String>, winners: u32, missing: u32) -> Self {
        Condition {
            scenario_id: scenario_id.into(),
            winners,
            missing,
        }
    }

    pub fn resolve(&self, scenarios: &Scenarios) -> Result<Scenario> {
        let base = scenarios
            .get(&self.scenario_id)
            .ok_or_else(|| Error::Input(format!("unknown scenario `{}`", self.scenario_id)))?;
        base.with_condition(self.winners as usize, self.missing)
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, k={}, n̂={})", self.scenario_id, self.winners, self.missing)
    }
}

/// One observed ballot from one voter in one condition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ResponseRecord {
    pub voter_id: String,
    pub scenario_id: String,
    pub winners: u32,
    pub missing: u32,
    pub ballot: BTreeSet<String>,
    pub timestamp: String,
}

impl ResponseRecord {
    pub fn condition(&self) -> Condition {
        Condition::new(self.scenario_id.clone(), self.winners, self.missing)
    }

    pub fn resolve_ballot(&self, scenarios: &Scenarios) -> Result<Ballot> {
        let s = scenarios
            .get(&self.scenario_id)
            .ok_or_else(|| Error::Input(format!("unknown scenario `{}`", self.scenario_id)))?;
        s.candidates.ballot(&self.ballot)
    }
}

/// Which conditions make up a complete (voter, k) block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StudyDesign {
    pub scenario_ids: Vec<String>,
    pub missing: Vec<u32>,
    pub winners: Vec<u32>,
}

impl Default for StudyDesign {
    fn default() -> Self {
        StudyDesign {
            scenario_ids: vec!["A".into(), "B".into()],
            missing: vec![0, 1, 3],
            winners: vec![1, 2, 3],
        }
    }
}

impl StudyDesign {
    /// Conditions of one block at winner count `k`: n̂ ascending, then
    /// scenarios in listed order.
    pub fn block(&self, k: u32) -> Vec<Condition> {
        self.missing
            .iter()
            .flat_map(|&n| {
                self.scenario_ids
                    .iter()
                    .map(move |s| Condition::new(s.clone(), k, n))
            })
            .collect()
    }

    pub fn all_conditions(&self) -> Vec<Condition> {
        self.winners.iter().flat_map(|&k| self.block(k)).collect()
    }
}

/// Outcome of a grid fit on a set of records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFit {
    pub params: Option<ModelParams>,
    pub hits: usize,
    pub total: usize,
}

/// Held-out result for one split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SplitOutcome {
    pub held_out: Condition,
    pub params: Option<ModelParams>,
    pub predicted: Vec<String>,
    pub observed: Vec<String>,
    pub hit: bool,
    pub jaccard: f64,
}

/// Leave-one-out result for one (voter, k) block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FitResult {
    pub voter_id: String,
    pub winners: u32,
    pub model: ModelKind,
    /// Fit on all of the block's records (absent for deterministic models).
    pub params: Option<ModelParams>,
    pub splits: Vec<SplitOutcome>,
    pub per_split_hits: Vec<u8>,
    pub accuracy: f64,
    /// Mean Jaccard similarity of held-out predictions (supplementary).
    pub jaccard: f64,
}

/// Predictions of one model for every grid point, per condition.
struct PredictionTable {
    grid: Vec<Option<ModelParams>>,
    by_condition: HashMap<Condition, Vec<Ballot>>,
}

impl PredictionTable {
    fn build(kind: ModelKind, conditions: &BTreeSet<Condition>, scenarios: &Scenarios) -> Result<Self> {
        let grid = kind.grid();
        let conditions: Vec<&Condition> = conditions.iter().collect();
        let rows = par::map(&conditions, |c| {
            let s = c.resolve(scenarios)?;
            predict_grid(kind, &s, &grid)
        });
        let mut by_condition = HashMap::with_capacity(conditions.len());
        for (c, row) in conditions.into_iter().zip(rows) {
            by_condition.insert(c.clone(), row?);
        }
        Ok(PredictionTable { grid, by_condition })
    }

    fn row(&self, condition: &Condition) -> &[Ballot] {
        &self.by_condition[condition]
    }
}

struct Observation {
    condition: Condition,
    ballot: Ballot,
    labels: Vec<String>,
}

fn observe(records: &[&ResponseRecord], scenarios: &Scenarios) -> Result<Vec<Observation>> {
    records
        .iter()
        .map(|r| {
            let ballot = r.resolve_ballot(scenarios)?;
            Ok(Observation {
                condition: r.condition(),
                ballot,
                labels: r.ballot.iter().cloned().collect(),
            })
        })
        .collect()
}

/// First grid index with the most hits over `included` observations.
fn best_index(table: &PredictionTable, obs: &[Observation], included: &[bool]) -> (usize, usize) {
    let mut hits = vec![0usize; table.grid.len()];
    for (o, _) in obs.iter().zip(included).filter(|(_, inc)| **inc) {
        for (h, b) in hits.iter_mut().zip(table.row(&o.condition)) {
            if *b == o.ballot {
                *h += 1;
            }
        }
    }
    let mut best = 0;
    for (g, &h) in hits.iter().enumerate() {
        if h > hits[best] {
            best = g;
        }
    }
    (best, hits[best])
}

fn conditions_of<'a, I: IntoIterator<Item = &'a ResponseRecord>>(records: I) -> BTreeSet<Condition> {
    records.into_iter().map(ResponseRecord::condition).collect()
}

/// Grid-search fit of `kind` maximizing exact-match hits on `records`.
pub fn fit_model(kind: ModelKind, records: &[ResponseRecord], scenarios: &Scenarios) -> Result<GridFit> {
    if records.is_empty() {
        return Err(Error::Input("cannot fit on an empty record list".into()));
    }
    let table = PredictionTable::build(kind, &conditions_of(records), scenarios)?;
    let refs: Vec<&ResponseRecord> = records.iter().collect();
    let obs = observe(&refs, scenarios)?;
    let (g, hits) = best_index(&table, &obs, &vec![true; obs.len()]);
    Ok(GridFit {
        params: table.grid[g],
        hits,
        total: obs.len(),
    })
}

/// Fits α ∈ {0,1,2}, β ∈ {1..32}; ties go to smaller α, then smaller β.
pub fn fit_au(records: &[ResponseRecord], scenarios: &Scenarios) -> Result<ModelParams> {
    Ok(fit_model(ModelKind::Au, records, scenarios)?
        .params
        .expect("AU grid points carry parameters"))
}

/// Fits β ∈ {1..32}, τ ∈ {0..0.1 step 0.0005} with α = 1; ties go to smaller
/// β, then smaller τ.
pub fn fit_aut(records: &[ResponseRecord], scenarios: &Scenarios) -> Result<ModelParams> {
    Ok(fit_model(ModelKind::Aut, records, scenarios)?
        .params
        .expect("AUT grid points carry parameters"))
}

/// One (voter, k) block of records.
type Block<'r> = ((String, u32), Vec<&'r ResponseRecord>);

/// Leave-one-out evaluation with a configurable study design.
#[derive(Debug, Clone)]
pub struct Evaluator<'a> {
    scenarios: &'a Scenarios,
    design: StudyDesign,
}

impl<'a> Evaluator<'a> {
    pub fn new(scenarios: &'a Scenarios) -> Self {
        Evaluator {
            scenarios,
            design: StudyDesign::default(),
        }
    }

    #[must_use]
    pub fn with_design(mut self, design: StudyDesign) -> Self {
        self.design = design;
        self
    }

    pub fn design(&self) -> &StudyDesign {
        &self.design
    }

    /// Groups records into complete (voter, k) blocks ordered by design.
    fn blocks<'r>(&self, records: &'r [ResponseRecord]) -> Result<Vec<Block<'r>>> {
        let mut grouped: BTreeMap<(String, u32), Vec<&ResponseRecord>> = BTreeMap::new();
        for r in records {
            grouped
                .entry((r.voter_id.clone(), r.winners))
                .or_default()
                .push(r);
        }
        grouped
            .into_iter()
            .map(|((voter, k), recs)| {
                let expected = self.design.block(k);
                let mut ordered = Vec::with_capacity(expected.len());
                for c in &expected {
                    let matching: Vec<&&ResponseRecord> =
                        recs.iter().filter(|r| r.condition() == *c).collect();
                    match matching.len() {
                        1 => ordered.push(*matching[0]),
                        0 => {
                            return Err(Error::Input(format!(
                                "voter `{voter}` k={k}: missing condition (scenario {}, n̂={})",
                                c.scenario_id, c.missing
                            )))
                        }
                        _ => {
                            return Err(Error::Input(format!(
                                "voter `{voter}` k={k}: duplicate condition (scenario {}, n̂={})",
                                c.scenario_id, c.missing
                            )))
                        }
                    }
                }
                if let Some(extra) = recs.iter().find(|r| !expected.contains(&r.condition())) {
                    return Err(Error::Input(format!(
                        "voter `{voter}` k={k}: unexpected condition (scenario {}, n̂={})",
                        extra.scenario_id, extra.missing
                    )));
                }
                Ok(((voter, k), ordered))
            })
            .collect()
    }

    /// Leave-one-out accuracy of `kind` for every (voter, k) block.
    pub fn loo(&self, kind: ModelKind, records: &[ResponseRecord]) -> Result<Vec<FitResult>> {
        let blocks = self.blocks(records)?;
        let table = PredictionTable::build(kind, &conditions_of(records), self.scenarios)?;
        par::map(&blocks, |((voter, k), recs)| {
            self.loo_block(kind, &table, voter, *k, recs)
        })
        .into_iter()
        .collect()
    }

    fn loo_block(
        &self,
        kind: ModelKind,
        table: &PredictionTable,
        voter: &str,
        k: u32,
        recs: &[&ResponseRecord],
    ) -> Result<FitResult> {
        let obs = observe(recs, self.scenarios)?;
        let n = obs.len();
        let (full, _) = best_index(table, &obs, &vec![true; n]);
        let mut splits = Vec::with_capacity(n);
        for held in 0..n {
            let included: Vec<bool> = (0..n).map(|i| i != held).collect();
            let (g, _) = best_index(table, &obs, &included);
            let o = &obs[held];
            let predicted = table.row(&o.condition)[g];
            let scenario = &self.scenarios[&o.condition.scenario_id];
            splits.push(SplitOutcome {
                held_out: o.condition.clone(),
                params: table.grid[g],
                predicted: scenario
                    .candidates
                    .ballot_labels(predicted)
                    .into_iter()
                    .map(String::from)
                    .collect(),
                observed: o.labels.clone(),
                hit: predicted == o.ballot,
                jaccard: predicted.jaccard(o.ballot),
            });
        }
        let per_split_hits: Vec<u8> = splits.iter().map(|s| u8::from(s.hit)).collect();
        let accuracy = per_split_hits.iter().map(|&h| f64::from(h)).sum::<f64>() / n as f64;
        let jaccard = splits.iter().map(|s| s.jaccard).sum::<f64>() / n as f64;
        Ok(FitResult {
            voter_id: voter.to_string(),
            winners: k,
            model: kind,
            params: table.grid[full],
            splits,
            per_split_hits,
            accuracy,
            jaccard,
        })
    }

    /// Per-model, per-k mean and standard deviation of voter LOO accuracy.
    pub fn evaluate_cohort(&self, records: &[ResponseRecord]) -> Result<AccuracyReport> {
        let mut rows = Vec::with_capacity(ModelKind::ALL.len());
        for kind in ModelKind::ALL {
            let results = self.loo(kind, records)?;
            let cells = self
                .design
                .winners
                .iter()
                .map(|&k| {
                    let accs: Vec<f64> = results
                        .iter()
                        .filter(|r| r.winners == k)
                        .map(|r| r.accuracy)
                        .collect();
                    let jac: Vec<f64> = results
                        .iter()
                        .filter(|r| r.winners == k)
                        .map(|r| r.jaccard)
                        .collect();
                    let (mean, sd) = mean_sd(&accs);
                    ReportCell {
                        winners: k,
                        voters: accs.len(),
                        mean,
                        sd,
                        jaccard_mean: mean_sd(&jac).0,
                    }
                })
                .collect();
            rows.push(ReportRow { model: kind, cells });
        }
        Ok(AccuracyReport {
            winners: self.design.winners.clone(),
            rows,
        })
    }
}

/// Mean and population standard deviation; `None` for an empty sample.
pub(crate) fn mean_sd(xs: &[f64]) -> (Option<f64>, Option<f64>) {
    if xs.is_empty() {
        return (None, None);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (Some(mean), Some(var.sqrt()))
}

pub fn loo_evaluate(kind: ModelKind, records: &[ResponseRecord], scenarios: &Scenarios) -> Result<Vec<FitResult>> {
    Evaluator::new(scenarios).loo(kind, records)
}

pub fn evaluate_cohort(records: &[ResponseRecord], scenarios: &Scenarios) -> Result<AccuracyReport> {
    Evaluator::new(scenarios).evaluate_cohort(records)
}
