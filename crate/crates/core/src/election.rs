//! Exact approval-election mechanics.
//!
//! Winners are the `k` candidates with the most approvals; ties at the cutoff
//! are broken uniformly at random. Missing ballots are modelled as independent
//! uniform draws from the approval subsets, and winner probabilities are
//! computed exactly by collapsing every completion of the profile onto its
//! resulting score vector.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;

/// Upper bound on `m`; ballots are bitmasks and several operations enumerate
/// all `2^m` subsets.
pub const MAX_CANDIDATES: usize = 20;

/// Relative tolerance used when comparing utilities, expected utilities and
/// AU scores for equality.
pub const UTILITY_TOLERANCE: f64 = 1e-12;

pub(crate) fn approx_eq(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= UTILITY_TOLERANCE * a.abs().max(b.abs())
}

/// Ordered, duplicate-free candidate labels. Labels are kept in lexicographic
/// order, and that order is the deterministic tie-break order everywhere.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct CandidateSet {
    labels: Vec<String>,
}

impl CandidateSet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::Validation("candidate list is empty".into()));
        }
        if labels.len() > MAX_CANDIDATES {
            return Err(Error::param(
                "m",
                format!("{} candidates, at most {MAX_CANDIDATES} supported", labels.len()),
            ));
        }
        if let Some(bad) = labels.iter().find(|l| l.is_empty() || l.contains('|')) {
            return Err(Error::Validation(format!(
                "candidate label {bad:?} must be non-empty and must not contain '|'"
            )));
        }
        labels.sort();
        if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Validation(format!("duplicate candidate `{}`", w[0])));
        }
        Ok(CandidateSet { labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.binary_search_by(|l| l.as_str().cmp(label)).ok()
    }

    pub fn ballot<I, S>(&self, labels: I) -> Result<Ballot>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut ballot = Ballot::EMPTY;
        for label in labels {
            let label = label.as_ref();
            let i = self
                .index_of(label)
                .ok_or_else(|| Error::UnknownCandidate(label.to_string()))?;
            if ballot.contains(i) {
                return Err(Error::Input(format!("candidate `{label}` listed twice")));
            }
            ballot = ballot.with(i);
        }
        Ok(ballot)
    }

    /// Parses the `|`-joined wire encoding; the empty string is the empty ballot.
    pub fn parse_ballot(&self, encoded: &str) -> Result<Ballot> {
        if encoded.is_empty() {
            return Ok(Ballot::EMPTY);
        }
        self.ballot(encoded.split('|').map(str::trim))
    }

    pub fn format_ballot(&self, ballot: Ballot) -> String {
        self.ballot_labels(ballot).join("|")
    }

    pub fn ballot_labels(&self, ballot: Ballot) -> Vec<&str> {
        ballot.iter().map(|i| self.label(i)).collect()
    }

    /// Orders a label→count map by candidate index, requiring every candidate.
    pub fn counts_from_map(&self, counts: &BTreeMap<String, u32>) -> Result<Vec<u32>> {
        if let Some(extra) = counts.keys().find(|k| self.index_of(k).is_none()) {
            return Err(Error::UnknownCandidate(extra.clone()));
        }
        self.labels
            .iter()
            .map(|l| {
                counts
                    .get(l)
                    .copied()
                    .ok_or_else(|| Error::Input(format!("no count for candidate `{l}`")))
            })
            .collect()
    }
}

impl TryFrom<Vec<String>> for CandidateSet {
    type Error = Error;

    fn try_from(labels: Vec<String>) -> Result<Self> {
        CandidateSet::new(labels)
    }
}

impl From<CandidateSet> for Vec<String> {
    fn from(set: CandidateSet) -> Self {
        set.labels
    }
}

/// A subset of candidates, stored as a bitmask over candidate indices.
///
/// `Ord` is the canonical tie-break order: fewer approvals first, then the
/// lexicographically smaller list of candidate indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Ballot(u32);

impl Ballot {
    pub const EMPTY: Ballot = Ballot(0);

    pub fn from_mask(mask: u32) -> Self {
        Ballot(mask)
    }

    pub fn full(m: usize) -> Self {
        Ballot(((1u64 << m) - 1) as u32)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        indices.into_iter().fold(Ballot::EMPTY, Ballot::with)
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn contains(self, index: usize) -> bool {
        self.0 & (1 << index) != 0
    }

    #[must_use]
    pub fn with(self, index: usize) -> Self {
        Ballot(self.0 | (1 << index))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: Ballot) -> bool {
        self.0 & !other.0 == 0
    }

    #[must_use]
    pub fn complement(self, m: usize) -> Self {
        Ballot(!self.0 & Ballot::full(m).0)
    }

    /// Candidate indices in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i)
            }
        })
    }

    /// Every subset of `m` candidates, in mask order.
    pub fn all(m: usize) -> impl Iterator<Item = Ballot> {
        (0..(1u64 << m)).map(|mask| Ballot(mask as u32))
    }

    /// Jaccard similarity; two empty ballots are identical (1.0).
    pub fn jaccard(self, other: Ballot) -> f64 {
        let union = (self.0 | other.0).count_ones();
        if union == 0 {
            1.0
        } else {
            f64::from((self.0 & other.0).count_ones()) / f64::from(union)
        }
    }
}

impl Ord for Ballot {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.iter().cmp(other.iter()))
    }
}

impl PartialOrd for Ballot {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Ballot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Per-candidate utilities, indexed like the scenario's [`CandidateSet`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UtilityProfile(Vec<f64>);

impl UtilityProfile {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::Validation(format!(
                "utility {v} is negative or not finite"
            )));
        }
        Ok(UtilityProfile(values))
    }

    pub fn get(&self, index: usize) -> f64 {
        self.0[index]
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// `u(b)`: sum of utilities over the ballot, in candidate order.
    pub fn of(&self, ballot: Ballot) -> f64 {
        ballot.iter().map(|i| self.0[i]).sum()
    }
}

/// Current approval counts plus the number of known and missing ballots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub counts: Vec<u32>,
    pub known_ballots: u32,
    pub missing_ballots: u32,
}

impl Tally {
    pub fn new(counts: Vec<u32>, known_ballots: u32, missing_ballots: u32) -> Result<Self> {
        if let Some(c) = counts.iter().find(|c| **c > known_ballots) {
            return Err(Error::Validation(format!(
                "count {c} exceeds knownBallots {known_ballots}"
            )));
        }
        Ok(Tally {
            counts,
            known_ballots,
            missing_ballots,
        })
    }

    /// `r`: total approvals over all known ballots.
    pub fn total_approvals(&self) -> u32 {
        self.counts.iter().sum()
    }
}

/// One decision problem: who is running, what each candidate is worth to the
/// voter, the current tally, and how many winners are elected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub id: String,
    pub candidates: CandidateSet,
    pub utilities: UtilityProfile,
    pub tally: Tally,
    pub winners: usize,
}

impl Scenario {
    pub fn new(
        id: impl Into<String>,
        candidates: CandidateSet,
        utilities: UtilityProfile,
        tally: Tally,
        winners: usize,
    ) -> Result<Self> {
        let m = candidates.len();
        if utilities.values().len() != m {
            return Err(Error::Validation(format!(
                "{} utilities for {m} candidates",
                utilities.values().len()
            )));
        }
        if tally.counts.len() != m {
            return Err(Error::Validation(format!(
                "{} counts for {m} candidates",
                tally.counts.len()
            )));
        }
        check_k(winners, m)?;
        Ok(Scenario {
            id: id.into(),
            candidates,
            utilities,
            tally,
            winners,
        })
    }

    pub fn m(&self) -> usize {
        self.candidates.len()
    }

    /// The same scenario under a different (k, n̂) condition.
    pub fn with_condition(&self, winners: usize, missing_ballots: u32) -> Result<Self> {
        check_k(winners, self.m())?;
        let mut s = self.clone();
        s.winners = winners;
        s.tally.missing_ballots = missing_ballots;
        Ok(s)
    }

    pub fn check_ballot(&self, ballot: Ballot) -> Result<()> {
        if ballot.is_subset(Ballot::full(self.m())) {
            Ok(())
        } else {
            Err(Error::Input(format!(
                "ballot {ballot} names candidates outside 0..{}",
                self.m()
            )))
        }
    }
}

pub(crate) fn check_k(k: usize, m: usize) -> Result<()> {
    if k == 0 || k > m {
        Err(Error::param("k", format!("k={k} with m={m}; need 1 <= k <= m")))
    } else {
        Ok(())
    }
}

/// Exact probability that each candidate is elected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WinnerDistribution {
    probs: Vec<f64>,
}

impl WinnerDistribution {
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, index: usize) -> f64 {
        self.probs[index]
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn expected_utility(&self, utilities: &UtilityProfile) -> f64 {
        self.probs
            .iter()
            .zip(utilities.values())
            .map(|(p, u)| p * u)
            .sum()
    }
}

/// Winner probabilities for a fixed tally under uniform random tie-breaking.
///
/// Candidates strictly above the k-th highest score win with certainty;
/// candidates tied at that score share the remaining seats evenly.
pub fn winner_probabilities(counts: &[u32], k: usize) -> Result<WinnerDistribution> {
    check_k(k, counts.len())?;
    let (cutoff, above, tied) = cutoff(counts, k);
    let share = (k - above) as f64 / tied as f64;
    let probs = counts
        .iter()
        .map(|&c| match c.cmp(&cutoff) {
            Ordering::Greater => 1.0,
            Ordering::Equal => share,
            Ordering::Less => 0.0,
        })
        .collect();
    Ok(WinnerDistribution { probs })
}

/// Returns (k-th highest score, #strictly above it, #equal to it).
fn cutoff(counts: &[u32], k: usize) -> (u32, usize, usize) {
    let mut sorted = counts.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let cut = sorted[k - 1];
    let above = counts.iter().filter(|&&c| c > cut).count();
    let tied = counts.iter().filter(|&&c| c == cut).count();
    (cut, above, tied)
}

/// Which approval subsets a missing ballot may take, each equally likely.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MissingBallotModel {
    /// All `2^m` subsets, abstention included.
    #[default]
    AllSubsets,
    /// The `2^m - 1` non-empty subsets.
    NonEmptySubsets,
}

impl MissingBallotModel {
    fn first_mask(self) -> u32 {
        match self {
            MissingBallotModel::AllSubsets => 0,
            MissingBallotModel::NonEmptySubsets => 1,
        }
    }

    pub fn sample<R: Rng + ?Sized>(self, m: usize, rng: &mut R) -> Ballot {
        Ballot::from_mask(rng.random_range(self.first_mask()..(1u32 << m)))
    }
}

/// Distribution of the approval increments contributed by `n̂` missing
/// ballots, keyed by increment vector. The `(2^m)^n̂` completions collapse to
/// at most `(n̂+1)^m` distinct score profiles.
#[derive(Debug, Clone)]
pub struct CompletionDistribution {
    entries: Vec<(Vec<u32>, f64)>,
}

impl CompletionDistribution {
    pub fn new(m: usize, missing: u32, model: MissingBallotModel) -> Self {
        let first = model.first_mask();
        let subsets: Vec<Ballot> = (first..(1u32 << m)).map(Ballot::from_mask).collect();
        let per_ballot = 1.0 / subsets.len() as f64;

        let mut current: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        current.insert(vec![0; m], 1.0);
        for _ in 0..missing {
            let mut next: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
            for (inc, p) in &current {
                for b in &subsets {
                    let mut v = inc.clone();
                    for i in b.iter() {
                        v[i] += 1;
                    }
                    *next.entry(v).or_insert(0.0) += p * per_ballot;
                }
            }
            current = next;
        }
        CompletionDistribution {
            entries: current.into_iter().collect(),
        }
    }

    pub fn entries(&self) -> &[(Vec<u32>, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Expected-utility evaluation for one scenario, reusing the completion
/// distribution across ballots.
#[derive(Debug, Clone)]
pub struct ExpectedUtility<'a> {
    scenario: &'a Scenario,
    completions: CompletionDistribution,
}

impl<'a> ExpectedUtility<'a> {
    pub fn new(scenario: &'a Scenario) -> Self {
        Self::with_model(scenario, MissingBallotModel::default())
    }

    pub fn with_model(scenario: &'a Scenario, model: MissingBallotModel) -> Self {
        let completions =
            CompletionDistribution::new(scenario.m(), scenario.tally.missing_ballots, model);
        ExpectedUtility {
            scenario,
            completions,
        }
    }

    /// Marginal election probability of each candidate once `ballot` is cast.
    pub fn election_probabilities(&self, ballot: Ballot) -> Result<WinnerDistribution> {
        let s = self.scenario;
        s.check_ballot(ballot)?;
        let m = s.m();
        let mut base = s.tally.counts.clone();
        for i in ballot.iter() {
            base[i] += 1;
        }
        let mut probs = vec![0.0; m];
        let mut counts = vec![0u32; m];
        for (inc, p) in self.completions.entries() {
            for i in 0..m {
                counts[i] = base[i] + inc[i];
            }
            let (cut, above, tied) = cutoff(&counts, s.winners);
            let share = (s.winners - above) as f64 / tied as f64;
            for i in 0..m {
                if counts[i] > cut {
                    probs[i] += p;
                } else if counts[i] == cut {
                    probs[i] += p * share;
                }
            }
        }
        Ok(WinnerDistribution { probs })
    }

    pub fn value(&self, ballot: Ballot) -> Result<f64> {
        Ok(self
            .election_probabilities(ballot)?
            .expected_utility(&self.scenario.utilities))
    }

    /// Expected utility of every ballot, indexed by mask.
    pub fn all_values(&self) -> Vec<f64> {
        let m = self.scenario.m();
        par::map_range(1usize << m, |mask| {
            self.value(Ballot::from_mask(mask as u32))
                .expect("mask is within the candidate set")
        })
    }

    /// The expected-utility maximizing ballot; ties go to the smaller ballot,
    /// then to the lexicographically first one.
    pub fn optimum(&self) -> (Ballot, f64) {
        let values = self.all_values();
        argmax(
            values
                .into_iter()
                .enumerate()
                .map(|(mask, v)| (Ballot::from_mask(mask as u32), v)),
        )
        .expect("at least the empty ballot exists")
    }
}

/// Exact expected utility of casting `ballot`: sum over all candidates of
/// P(elected) × u, with missing ballots uniform over all approval subsets.
pub fn expected_utility(scenario: &Scenario, ballot: Ballot) -> Result<f64> {
    ExpectedUtility::new(scenario).value(ballot)
}

pub fn optimal_ballot(scenario: &Scenario) -> (Ballot, f64) {
    ExpectedUtility::new(scenario).optimum()
}

/// Deterministic argmax with [`UTILITY_TOLERANCE`] ties resolved by `Ballot`'s
/// order.
pub(crate) fn argmax<I>(candidates: I) -> Option<(Ballot, f64)>
where
    I: IntoIterator<Item = (Ballot, f64)>,
{
    let mut best: Option<(Ballot, f64)> = None;
    for (b, v) in candidates {
        best = match best {
            None => Some((b, v)),
            Some((bb, bv)) => {
                if approx_eq(v, bv) {
                    if b < bb {
                        Some((b, v))
                    } else {
                        Some((bb, bv))
                    }
                } else if v > bv {
                    Some((b, v))
                } else {
                    Some((bb, bv))
                }
            }
        };
    }
    best
}

/// Runs one concrete election. Candidates above the cutoff always win; seats
/// left over are filled uniformly at random from the tied candidates using a
/// PRNG seeded with `seed`.
pub fn run_election(counts: &[u32], k: usize, seed: u64) -> Result<Ballot> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    run_election_with(counts, k, &mut rng)
}

pub fn run_election_with<R: Rng + ?Sized>(counts: &[u32], k: usize, rng: &mut R) -> Result<Ballot> {
    check_k(k, counts.len())?;
    let (cut, above, _) = cutoff(counts, k);
    let mut winners = Ballot::from_indices((0..counts.len()).filter(|&i| counts[i] > cut));
    let tied: Vec<usize> = (0..counts.len()).filter(|&i| counts[i] == cut).collect();
    for j in index::sample(rng, tied.len(), k - above).iter() {
        winners = winners.with(tied[j]);
    }
    Ok(winners)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set() -> CandidateSet {
        CandidateSet::new(["A", "B", "C", "D", "E"]).unwrap()
    }

    #[test]
    fn candidate_set_sorts_and_rejects_duplicates() {
        let s = CandidateSet::new(["E", "A", "C"]).unwrap();
        assert_eq!(s.labels(), ["A", "C", "E"]);
        assert!(CandidateSet::new(["A", "A"]).is_err());
        assert!(CandidateSet::new(Vec::<String>::new()).is_err());
        assert!(CandidateSet::new(["A|B"]).is_err());
    }

    #[test]
    fn ballot_parsing_is_order_insensitive() {
        let s = set();
        let b = s.parse_ballot("E|B").unwrap();
        assert_eq!(b, s.ballot(["B", "E"]).unwrap());
        assert_eq!(s.format_ballot(b), "B|E");
        assert_eq!(s.parse_ballot("").unwrap(), Ballot::EMPTY);
        assert!(matches!(
            s.parse_ballot("Z"),
            Err(Error::UnknownCandidate(ref z)) if z == "Z"
        ));
        assert!(s.parse_ballot("A|A").is_err());
    }

    #[test]
    fn ballot_order_is_cardinality_then_lexicographic() {
        let s = set();
        let ab = s.ballot(["A", "B"]).unwrap();
        let ac = s.ballot(["A", "C"]).unwrap();
        let bc = s.ballot(["B", "C"]).unwrap();
        let ad = s.ballot(["A", "D"]).unwrap();
        let e = s.ballot(["E"]).unwrap();
        assert!(e < ab);
        assert!(ab < ac);
        assert!(ad < bc);
        assert!(Ballot::EMPTY < e);
    }

    #[test]
    fn two_way_tie_for_single_seat() {
        let d = winner_probabilities(&[3, 3, 3, 4, 4], 1).unwrap();
        assert_eq!(d.probs(), &[0.0, 0.0, 0.0, 0.5, 0.5]);
    }

    #[test]
    fn full_symmetry() {
        let d = winner_probabilities(&[4; 5], 3).unwrap();
        for p in d.probs() {
            assert!((p - 0.6).abs() < 1e-15);
        }
    }

    #[test]
    fn three_way_tie_for_two_seats() {
        let d = winner_probabilities(&[3, 4, 3, 4, 4], 2).unwrap();
        let two_thirds = 2.0 / 3.0;
        for (i, expect) in [0.0, two_thirds, 0.0, two_thirds, two_thirds].iter().enumerate() {
            assert!((d.prob(i) - expect).abs() < 1e-15, "candidate {i}");
        }
    }

    #[test]
    fn k_out_of_range() {
        assert!(matches!(
            winner_probabilities(&[1, 2], 0),
            Err(Error::Parameter { name: "k", .. })
        ));
        assert!(winner_probabilities(&[1, 2], 3).is_err());
        assert!(run_election(&[1, 2], 3, 0).is_err());
    }

    #[test]
    fn counts_from_map_requires_every_candidate() {
        let s = set();
        let mut map: BTreeMap<String, u32> =
            ["A", "B", "C", "D"].iter().map(|l| (l.to_string(), 1)).collect();
        assert!(matches!(s.counts_from_map(&map), Err(Error::Input(_))));
        map.insert("E".into(), 2);
        assert_eq!(s.counts_from_map(&map).unwrap(), vec![1, 1, 1, 1, 2]);
        map.insert("Z".into(), 2);
        assert!(matches!(s.counts_from_map(&map), Err(Error::UnknownCandidate(_))));
    }

    #[test]
    fn strict_leader_and_exact_leaders() {
        for seed in 0..50 {
            let w = run_election(&[5, 1, 1, 1, 1], 1, seed).unwrap();
            assert_eq!(w, Ballot::from_indices([0]));
            let w = run_election(&[4, 4, 3, 3, 3], 2, seed).unwrap();
            assert_eq!(w, Ballot::from_indices([0, 1]));
        }
    }

    #[test]
    fn run_election_is_seed_deterministic() {
        let counts = [4, 4, 4, 3, 3];
        for seed in 0..20 {
            let a = run_election(&counts, 2, seed).unwrap();
            assert_eq!(a, run_election(&counts, 2, seed).unwrap());
            assert_eq!(a.len(), 2);
            assert!(a.is_subset(Ballot::from_indices([0, 1, 2])));
        }
    }

    #[test]
    fn completion_distribution_sums_to_one() {
        for model in [MissingBallotModel::AllSubsets, MissingBallotModel::NonEmptySubsets] {
            for missing in 0..=3 {
                let d = CompletionDistribution::new(5, missing, model);
                let total: f64 = d.entries().iter().map(|(_, p)| p).sum();
                assert!((total - 1.0).abs() < 1e-12);
            }
        }
        // Independent Binomial(n̂, 1/2) per candidate → (n̂+1)^m profiles.
        assert_eq!(CompletionDistribution::new(5, 3, MissingBallotModel::AllSubsets).len(), 1024);
    }

    #[test]
    fn jaccard() {
        let a = Ballot::from_indices([0, 1]);
        let b = Ballot::from_indices([1, 2]);
        assert!((a.jaccard(b) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(Ballot::EMPTY.jaccard(Ballot::EMPTY), 1.0);
    }
}
