//! File formats: scenario JSON, response CSV, accuracy reports, and the two
//! built-in scenarios.
//!
//! All writes go through a temporary file in the destination directory that
//! is renamed into place, so readers never observe a partial file.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::election::{CandidateSet, Scenario, Tally, UtilityProfile};
use crate::error::{Error, Result};
use crate::fitting::{ResponseRecord, Scenarios};
use crate::report::AccuracyReport;

pub const SCENARIO_A_JSON: &str = include_str!("../fixtures/scenario_a.json");
pub const SCENARIO_B_JSON: &str = include_str!("../fixtures/scenario_b.json");

/// Header of the response CSV.
pub const RESPONSE_HEADER: [&str; 6] = ["voter_id", "scenario_id", "winners", "missing", "ballot", "timestamp"];

/// On-disk scenario layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ScenarioFile {
    pub id: String,
    pub candidates: Vec<String>,
    pub utilities: BTreeMap<String, f64>,
    pub counts: BTreeMap<String, u32>,
    pub known_ballots: u32,
    pub missing_ballots: u32,
    pub winners: usize,
}

impl ScenarioFile {
    pub fn into_scenario(self) -> Result<Scenario> {
        let candidates = CandidateSet::new(self.candidates)?;
        if let Some(extra) = self.utilities.keys().find(|k| candidates.index_of(k).is_none()) {
            return Err(Error::Validation(format!("utility given for unknown candidate `{extra}`")));
        }
        let utilities = candidates
            .labels()
            .iter()
            .map(|l| {
                self.utilities
                    .get(l)
                    .copied()
                    .ok_or_else(|| Error::Validation(format!("no utility for candidate `{l}`")))
            })
            .collect::<Result<Vec<f64>>>()?;
        let utilities = UtilityProfile::new(utilities)?;
        let counts = candidates.counts_from_map(&self.counts).map_err(|e| match e {
            Error::Input(msg) => Error::Validation(msg),
            Error::UnknownCandidate(c) => {
                Error::Validation(format!("count given for unknown candidate `{c}`"))
            }
            other => other,
        })?;
        let tally = Tally::new(counts, self.known_ballots, self.missing_ballots)?;
        let m = candidates.len() as u64;
        if u64::from(tally.total_approvals()) > u64::from(self.known_ballots) * m {
            return Err(Error::Validation(format!(
                "total approvals {} exceed knownBallots × m",
                tally.total_approvals()
            )));
        }
        Scenario::new(self.id, candidates, utilities, tally, self.winners)
    }

    pub fn from_scenario(s: &Scenario) -> Self {
        let labels = s.candidates.labels();
        ScenarioFile {
            id: s.id.clone(),
            candidates: labels.to_vec(),
            utilities: labels.iter().cloned().zip(s.utilities.values().iter().copied()).collect(),
            counts: labels.iter().cloned().zip(s.tally.counts.iter().copied()).collect(),
            known_ballots: s.tally.known_ballots,
            missing_ballots: s.tally.missing_ballots,
            winners: s.winners,
        }
    }
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

pub fn parse_scenario(json: &str) -> Result<Scenario> {
    let file: ScenarioFile = serde_json::from_str(json).map_err(json_error)?;
    file.into_scenario()
}

pub fn scenario_to_json(s: &Scenario) -> String {
    serde_json::to_string_pretty(&ScenarioFile::from_scenario(s)).expect("scenario serializes")
        + "\n"
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_scenario(&text)
}

pub fn save_scenario(path: impl AsRef<Path>, s: &Scenario) -> Result<()> {
    write_atomic(path, scenario_to_json(s).as_bytes())
}

/// Scenario A: the strict leader D is worthless to the voter.
pub fn scenario_a() -> Scenario {
    parse_scenario(SCENARIO_A_JSON).expect("built-in scenario A is valid")
}

/// Scenario B: the voter's favourite D trails the leader C by one approval.
pub fn scenario_b() -> Scenario {
    parse_scenario(SCENARIO_B_JSON).expect("built-in scenario B is valid")
}

pub fn builtin_scenarios() -> Scenarios {
    [scenario_a(), scenario_b()]
        .into_iter()
        .map(|s| (s.id.clone(), s))
        .collect()
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    voter_id: String,
    scenario_id: String,
    winners: u32,
    missing: u32,
    ballot: String,
    timestamp: String,
}

/// Reads and validates a response CSV against `scenarios`.
pub fn read_responses<R: Read>(reader: R, scenarios: &Scenarios) -> Result<Vec<ResponseRecord>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.iter().ne(RESPONSE_HEADER.iter().copied()) {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: format!(
                "expected header `{}`, found `{}`",
                RESPONSE_HEADER.join(","),
                header.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    let mut records = Vec::new();
    for (i, row) in rdr.deserialize::<CsvRow>().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| Error::Parse {
            line,
            column: 1,
            message: e.to_string(),
        })?;
        let at_row = |msg: String| Error::Validation(format!("row {line}: {msg}"));
        let scenario = scenarios
            .get(&row.scenario_id)
            .ok_or_else(|| at_row(format!("unknown scenario `{}`", row.scenario_id)))?;
        if row.winners == 0 || row.winners as usize > scenario.m() {
            return Err(at_row(format!("k out of range: {}", row.winners)));
        }
        let ballot = scenario
            .candidates
            .parse_ballot(&row.ballot)
            .map_err(|e| at_row(e.to_string()))?;
        records.push(ResponseRecord {
            voter_id: row.voter_id,
            scenario_id: row.scenario_id,
            winners: row.winners,
            missing: row.missing,
            ballot: scenario
                .candidates
                .ballot_labels(ballot)
                .into_iter()
                .map(String::from)
                .collect(),
            timestamp: row.timestamp,
        });
    }
    check_unique(&records)?;
    Ok(records)
}

fn check_unique(records: &[ResponseRecord]) -> Result<()> {
    let mut seen: HashMap<(&str, &str, u32, u32), usize> = HashMap::new();
    for r in records {
        *seen
            .entry((&r.voter_id, &r.scenario_id, r.winners, r.missing))
            .or_default() += 1;
    }
    let dups: BTreeSet<String> = seen
        .into_iter()
        .filter(|(_, n)| *n > 1)
        .map(|((v, s, k, n), c)| format!("({v}, {s}, k={k}, n̂={n}) ×{c}"))
        .collect();
    if dups.is_empty() {
        Ok(())
    } else {
        Err(Error::Validation(format!(
            "duplicate response keys: {}",
            dups.into_iter().collect::<Vec<_>>().join("; ")
        )))
    }
}

pub fn write_responses<W: Write>(writer: W, records: &[ResponseRecord]) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    wtr.write_record(RESPONSE_HEADER)?;
    for r in records {
        wtr.serialize(CsvRow {
            voter_id: r.voter_id.clone(),
            scenario_id: r.scenario_id.clone(),
            winners: r.winners,
            missing: r.missing,
            ballot: r.ballot.iter().cloned().collect::<Vec<_>>().join("|"),
            timestamp: r.timestamp.clone(),
        })?;
    }
    wtr.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn responses_to_csv(records: &[ResponseRecord]) -> String {
    let mut buf = Vec::new();
    write_responses(&mut buf, records).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is UTF-8")
}

pub fn load_responses(path: impl AsRef<Path>, scenarios: &Scenarios) -> Result<Vec<ResponseRecord>> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_responses(file, scenarios)
}

pub fn save_responses(path: impl AsRef<Path>, records: &[ResponseRecord]) -> Result<()> {
    write_atomic(path, responses_to_csv(records).as_bytes())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Text,
}

impl ReportFormat {
    /// `.json` selects JSON; anything else gets the text table.
    pub fn for_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => ReportFormat::Json,
            _ => ReportFormat::Text,
        }
    }
}

pub fn render_report(report: &AccuracyReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            serde_json::to_string_pretty(report).expect("report serializes") + "\n"
        }
        ReportFormat::Text => report.to_text(),
    }
}

pub fn write_report(report: &AccuracyReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    write_atomic(path, render_report(report, ReportFormat::for_path(path)).as_bytes())
}

pub fn read_report(path: impl AsRef<Path>) -> Result<AccuracyReport> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(json_error)
}

/// Writes via a sibling temporary file and an atomic rename.
pub fn write_atomic(path: impl AsRef<Path>, bytes: &[u8]) -> Result<()> {
    let path = path.as_ref();
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}
