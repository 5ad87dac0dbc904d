//! Session state as a fold over its event log.

use std::collections::BTreeMap;

use avlab_core::election::{run_election_with, Ballot, MissingBallotModel, Scenario};
use avlab_core::fitting::{Condition, Scenarios, StudyDesign};
use avlab_core::ResponseRecord;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::ServiceConfig;
use crate::error::ServiceError;

/// Winner counts a participant may be assigned after the single-winner block.
pub const MULTI_WINNER_OPTIONS: [u32; 2] = [2, 3];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OutcomeRecord {
    pub position: usize,
    pub scenario_id: String,
    pub winners: u32,
    pub missing: u32,
    pub approved: Vec<String>,
    /// The sampled ballots of the missing voters.
    pub missing_ballots: Vec<Vec<String>>,
    pub final_counts: BTreeMap<String, u32>,
    pub elected: Vec<String>,
    /// Σ utility over the elected candidates.
    pub payoff_delta: f64,
    /// `payoff_delta` × multiplier, clipped so the total stays within the cap.
    pub credited: f64,
    pub accumulated_payoff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "camelCase")]
pub enum Event {
    #[serde(rename_all = "camelCase")]
    Created {
        index: u64,
        session_id: String,
        participant_id: String,
        assigned_k: u32,
        seed: u64,
        queue: Vec<Condition>,
        created_at: String,
    },
    #[serde(rename_all = "camelCase")]
    Ballot {
        record: ResponseRecord,
        outcome: OutcomeRecord,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Session {
    pub index: u64,
    pub session_id: String,
    pub participant_id: String,
    pub assigned_k: u32,
    pub seed: u64,
    pub queue: Vec<Condition>,
    pub responses: Vec<ResponseRecord>,
    pub outcomes: Vec<OutcomeRecord>,
    pub accumulated_payoff: f64,
    pub created_at: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Submission {
    pub scenario_id: String,
    pub k: u32,
    pub missing: u32,
    pub approved: Vec<String>,
}

/// Creation event for the `index`-th session of a service seeded with
/// `service_seed`. Id, k assignment, session seed and queue order depend
/// only on these two numbers.
pub fn creation_event(
    service_seed: u64,
    index: u64,
    participant_id: &str,
    shuffle: bool,
    created_at: String,
) -> Event {
    let mut rng = ChaCha8Rng::seed_from_u64(service_seed);
    rng.set_stream(index);
    let token: u64 = rng.random();
    let assigned_k = MULTI_WINNER_OPTIONS[rng.random_range(0..MULTI_WINNER_OPTIONS.len())];
    let seed: u64 = rng.random();
    let design = StudyDesign::default();
    let mut queue = Vec::new();
    for k in [1, assigned_k] {
        let mut block = design.block(k);
        if shuffle {
            block.shuffle(&mut rng);
        }
        queue.extend(block);
    }
    Event::Created {
        index,
        session_id: format!("{index:06}-{token:016x}"),
        participant_id: participant_id.to_string(),
        assigned_k,
        seed,
        queue,
        created_at,
    }
}

/// Result of one realized election.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolution {
    pub missing_ballots: Vec<Ballot>,
    pub final_counts: Vec<u32>,
    pub elected: Ballot,
}

/// Samples the missing ballots and runs the election with a PRNG derived
/// from the session seed and the queue position.
pub fn resolve(scenario: &Scenario, approved: Ballot, session_seed: u64, position: usize) -> Resolution {
    let mut rng = ChaCha8Rng::seed_from_u64(session_seed);
    rng.set_stream(position as u64);
    let m = scenario.m();
    let mut counts = scenario.tally.counts.clone();
    for c in approved.iter() {
        counts[c] += 1;
    }
    let missing_ballots: Vec<Ballot> = (0..scenario.tally.missing_ballots)
        .map(|_| MissingBallotModel::AllSubsets.sample(m, &mut rng))
        .collect();
    for b in &missing_ballots {
        for c in b.iter() {
            counts[c] += 1;
        }
    }
    let elected = run_election_with(&counts, scenario.winners, &mut rng)
        .expect("scenario conditions have a valid k");
    Resolution {
        missing_ballots,
        final_counts: counts,
        elected,
    }
}

impl Session {
    pub fn from_created(event: &Event) -> Option<Session> {
        match event {
            Event::Created {
                index,
                session_id,
                participant_id,
                assigned_k,
                seed,
                queue,
                created_at,
            } => Some(Session {
                index: *index,
                session_id: session_id.clone(),
                participant_id: participant_id.clone(),
                assigned_k: *assigned_k,
                seed: *seed,
                queue: queue.clone(),
                responses: Vec::new(),
                outcomes: Vec::new(),
                accumulated_payoff: 0.0,
                created_at: created_at.clone(),
            }),
            Event::Ballot { .. } => None,
        }
    }

    /// Rebuilds a session from its full log.
    pub fn replay<'a, I: IntoIterator<Item = &'a Event>>(events: I) -> Result<Session, String> {
        let mut events = events.into_iter();
        let first = events.next().ok_or("empty event log")?;
        let mut session = Session::from_created(first).ok_or("log does not start with a creation event")?;
        for e in events {
            session.apply(e)?;
        }
        Ok(session)
    }

    pub fn apply(&mut self, event: &Event) -> Result<(), String> {
        match event {
            Event::Created { .. } => Err("duplicate creation event".into()),
            Event::Ballot { record, outcome } => {
                if outcome.position != self.responses.len() {
                    return Err(format!(
                        "ballot for position {} but {} recorded",
                        outcome.position,
                        self.responses.len()
                    ));
                }
                self.accumulated_payoff = outcome.accumulated_payoff;
                self.responses.push(record.clone());
                self.outcomes.push(outcome.clone());
                Ok(())
            }
        }
    }

    pub fn position(&self) -> usize {
        self.responses.len()
    }

    pub fn head(&self) -> Option<&Condition> {
        self.queue.get(self.position())
    }

    pub fn is_complete(&self) -> bool {
        self.position() >= self.queue.len()
    }

    /// Validates a submission against the queue head and resolves it. The
    /// returned event has not been applied.
    pub fn submit(
        &self,
        submission: &Submission,
        scenarios: &Scenarios,
        config: &ServiceConfig,
        timestamp: String,
    ) -> Result<Event, ServiceError> {
        let head = self.head().ok_or_else(|| {
            ServiceError::Conflict(format!("session `{}` has no conditions left", self.session_id))
        })?;
        let asked = Condition::new(submission.scenario_id.clone(), submission.k, submission.missing);
        if &asked != head {
            return Err(ServiceError::Conflict(format!(
                "condition {asked} is not the current one; expected {head}"
            )));
        }
        let scenario = head.resolve(scenarios)?;
        let approved = scenario
            .candidates
            .ballot(submission.approved.iter().map(String::as_str))
            .map_err(|e| ServiceError::BadRequest(e.to_string()))?;
        let position = self.position();
        let res = resolve(&scenario, approved, self.seed, position);
        let labels = |b: Ballot| -> Vec<String> {
            scenario.candidates.ballot_labels(b).into_iter().map(String::from).collect()
        };
        let payoff_delta = scenario.utilities.of(res.elected);
        let room = (config.payoff_cap - self.accumulated_payoff).max(0.0);
        let credited = (payoff_delta * config.payout_multiplier).min(room);
        let outcome = OutcomeRecord {
            position,
            scenario_id: head.scenario_id.clone(),
            winners: head.winners,
            missing: head.missing,
            approved: labels(approved),
            missing_ballots: res.missing_ballots.iter().map(|&b| labels(b)).collect(),
            final_counts: scenario
                .candidates
                .labels()
                .iter()
                .cloned()
                .zip(res.final_counts.iter().copied())
                .collect(),
            elected: labels(res.elected),
            payoff_delta,
            credited,
            accumulated_payoff: self.accumulated_payoff + credited,
        };
        let record = ResponseRecord {
            voter_id: self.session_id.clone(),
            scenario_id: head.scenario_id.clone(),
            winners: head.winners,
            missing: head.missing,
            ballot: labels(approved).into_iter().collect(),
            timestamp,
        };
        Ok(Event::Ballot { record, outcome })
    }
}
