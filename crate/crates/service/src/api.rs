//! Routes and handlers.

use std::collections::BTreeMap;
use std::sync::Arc;

use avlab_core::data::{responses_to_csv, ScenarioFile};
use avlab_core::election::{optimal_ballot, Scenario};
use avlab_core::fitting::Condition;
use avlab_core::heuristics::{
    au_ballot, au_scores, aut_ballot, complete_ballot, take_x_best, ModelParams,
};
use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};

use crate::error::ServiceError;
use crate::session::{Event, OutcomeRecord, Session, Submission};
use crate::AppState;

type ApiResult<T> = Result<T, ServiceError>;

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/health", get(|| async { "ok" }))
        .route("/scenarios", get(list_scenarios))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}/ballots", post(submit_ballot))
        .route("/sessions/{id}/results", get(results))
        .route("/export", get(export))
        .route("/predict", get(predict))
        .with_state(state)
}

fn now() -> String {
    chrono::Utc::now().format("%Y-%m-%dT%H:%M:%S%.3fZ").to_string()
}

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> ApiResult<T> {
    payload
        .map(|Json(v)| v)
        .map_err(|e| ServiceError::BadRequest(e.body_text()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CandidateView {
    pub label: String,
    pub utility: f64,
    /// Utility converted with the configured payout multiplier.
    pub payout: f64,
    pub count: u32,
}

/// What a participant sees for one condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScenarioView {
    pub position: usize,
    pub scenario_id: String,
    pub k: u32,
    pub missing: u32,
    pub known_ballots: u32,
    pub candidates: Vec<CandidateView>,
}

fn view(state: &AppState, position: usize, condition: &Condition) -> ApiResult<ScenarioView> {
    let s = condition.resolve(&state.scenarios)?;
    Ok(ScenarioView {
        position,
        scenario_id: condition.scenario_id.clone(),
        k: condition.winners,
        missing: condition.missing,
        known_ballots: s.tally.known_ballots,
        candidates: (0..s.m())
            .map(|c| CandidateView {
                label: s.candidates.label(c).to_string(),
                utility: s.utilities.get(c),
                payout: s.utilities.get(c) * state.config.payout_multiplier,
                count: s.tally.counts[c],
            })
            .collect(),
    })
}

async fn list_scenarios(State(state): State<Arc<AppState>>) -> Json<Vec<ScenarioFile>> {
    Json(state.scenarios.values().map(ScenarioFile::from_scenario).collect())
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CreateSession {
    pub participant_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionCreated {
    pub session_id: String,
    pub assigned_k: u32,
    pub queue_length: usize,
    pub first_scenario: ScenarioView,
}

async fn create_session(
    State(state): State<Arc<AppState>>,
    payload: Result<Json<CreateSession>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<SessionCreated>)> {
    let req = body(payload)?;
    let participant = req.participant_id.trim();
    if participant.is_empty() {
        return Err(ServiceError::BadRequest("participantId must not be empty".into()));
    }
    let session = state.create_session(participant, now()).await?;
    let first = view(&state, 0, &session.queue[0])?;
    Ok((
        StatusCode::CREATED,
        Json(SessionCreated {
            session_id: session.session_id,
            assigned_k: session.assigned_k,
            queue_length: session.queue.len(),
            first_scenario: first,
        }),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BallotResult {
    #[serde(flatten)]
    pub outcome: OutcomeRecord,
    pub next_scenario: Option<ScenarioView>,
}

async fn submit_ballot(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    payload: Result<Json<Submission>, JsonRejection>,
) -> ApiResult<Json<BallotResult>> {
    let handle = state.session(&id).await?;
    let submission = body(payload)?;
    let mut session = handle.lock().await;
    let event = session.submit(&submission, &state.scenarios, &state.config, now())?;
    state.commit(&mut session, &event)?;
    let Event::Ballot { outcome, .. } = event else {
        unreachable!("submit yields ballot events")
    };
    let next_scenario = match session.head() {
        Some(c) => Some(view(&state, session.position(), c)?),
        None => None,
    };
    Ok(Json(BallotResult {
        outcome,
        next_scenario,
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionSummary {
    pub session_id: String,
    pub participant_id: String,
    pub assigned_k: u32,
    pub position: usize,
    pub queue: Vec<Condition>,
    pub complete: bool,
    pub next_scenario: Option<ScenarioView>,
    pub outcomes: Vec<OutcomeRecord>,
    pub accumulated_payoff: f64,
    pub base_payout: f64,
    pub total_payout: f64,
}

fn summary(state: &AppState, s: &Session) -> ApiResult<SessionSummary> {
    Ok(SessionSummary {
        session_id: s.session_id.clone(),
        participant_id: s.participant_id.clone(),
        assigned_k: s.assigned_k,
        position: s.position(),
        queue: s.queue.clone(),
        complete: s.is_complete(),
        next_scenario: s.head().map(|c| view(state, s.position(), c)).transpose()?,
        outcomes: s.outcomes.clone(),
        accumulated_payoff: s.accumulated_payoff,
        base_payout: state.config.base_payout,
        total_payout: state.config.base_payout + s.accumulated_payoff,
    })
}

async fn results(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<SessionSummary>> {
    let handle = state.session(&id).await?;
    let session = handle.lock().await;
    Ok(Json(summary(&state, &session)?))
}

#[derive(Debug, Deserialize)]
pub struct ExportQuery {
    pub format: Option<String>,
}

async fn export(State(state): State<Arc<AppState>>, Query(q): Query<ExportQuery>) -> ApiResult<Response> {
    match q.format.as_deref().unwrap_or("csv") {
        "csv" => {}
        other => return Err(ServiceError::BadRequest(format!("unsupported export format `{other}`"))),
    }
    let records: Vec<_> = state
        .snapshot()
        .await
        .into_iter()
        .flat_map(|s| s.responses)
        .collect();
    Ok(([(header::CONTENT_TYPE, "text/csv; charset=utf-8")], responses_to_csv(&records)).into_response())
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PredictQuery {
    pub scenario_id: String,
    pub k: Option<u32>,
    pub missing: Option<u32>,
    pub model: String,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub tau: Option<f64>,
    pub x: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Prediction {
    pub scenario_id: String,
    pub k: u32,
    pub missing: u32,
    pub model: String,
    pub ballot: Vec<String>,
    pub encoded: String,
    pub params: Option<ModelParams>,
    /// Expected utility of the optimal ballot.
    pub value: Option<f64>,
    /// Per-candidate AU scores for the AU-family models.
    pub scores: Option<BTreeMap<String, f64>>,
    /// Predictions are for analysis and are not shown to participants.
    pub analysis_only: bool,
}

fn need(v: Option<f64>, name: &str) -> ApiResult<f64> {
    v.ok_or_else(|| ServiceError::BadRequest(format!("missing parameter `{name}`")))
}

async fn predict(State(state): State<Arc<AppState>>, Query(q): Query<PredictQuery>) -> ApiResult<Json<Prediction>> {
    let base = state
        .scenarios
        .get(&q.scenario_id)
        .ok_or_else(|| ServiceError::NotFound(format!("unknown scenario `{}`", q.scenario_id)))?;
    let k = q.k.unwrap_or(base.winners as u32);
    let missing = q.missing.unwrap_or(base.tally.missing_ballots);
    let s: Scenario = base.with_condition(k as usize, missing)?;
    let scores_of = |p: &ModelParams| -> ApiResult<BTreeMap<String, f64>> {
        Ok(s.candidates.labels().iter().cloned().zip(au_scores(&s, p)?).collect())
    };
    let (ballot, params, value, scores) = match q.model.as_str() {
        "optimal" => {
            let (b, v) = optimal_ballot(&s);
            (b, None, Some(v), None)
        }
        "complete" => (complete_ballot(&s), None, None, None),
        "takex" | "take-k-best" => (take_x_best(&s, q.x.unwrap_or(k as usize))?, None, None, None),
        "au" => {
            let p = ModelParams::au(need(q.alpha, "alpha")?, need(q.beta, "beta")?);
            p.validate()?;
            (au_ballot(&s, &p)?, Some(p), None, Some(scores_of(&p)?))
        }
        "aut" => {
            let p = ModelParams::aut(need(q.beta, "beta")?, need(q.tau, "tau")?);
            p.validate()?;
            (aut_ballot(&s, &p)?, Some(p), None, Some(scores_of(&p)?))
        }
        other => {
            return Err(ServiceError::BadRequest(format!(
                "unknown model `{other}`; expected one of optimal, complete, takex, au, aut"
            )))
        }
    };
    let labels: Vec<String> = s.candidates.ballot_labels(ballot).into_iter().map(String::from).collect();
    Ok(Json(Prediction {
        scenario_id: q.scenario_id,
        k,
        missing,
        model: q.model,
        encoded: labels.join("|"),
        ballot: labels,
        params,
        value,
        scores,
        analysis_only: true,
    }))
}
