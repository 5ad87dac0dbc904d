mod common;

use avlab_core::data::{parse_scenario, read_responses, responses_to_csv, scenario_a, scenario_to_json};
use avlab_core::election::{
    run_election, winner_probabilities, Ballot, CandidateSet, ExpectedUtility, Scenario, Tally,
    UtilityProfile,
};
use avlab_core::fitting::Scenarios;
use avlab_core::heuristics::{
    arctan_attainability, attainability_multi, attainability_single, au_ballot, au_scores,
    aut_ballot, complete_ballot, take_x_best, ModelParams, DEFAULT_EPSILON,
};
use avlab_core::report::{AccuracyReport, ReportCell, ReportRow};
use avlab_core::{ModelKind, ResponseRecord};
use proptest::prelude::*;

fn counts_and_k() -> impl Strategy<Value = (Vec<u32>, usize)> {
    prop::collection::vec(0u32..8, 1..9).prop_flat_map(|c| {
        let m = c.len();
        (Just(c), 1..=m)
    })
}

/// Random scenario with distinct utilities and at least one approval.
fn scenario() -> impl Strategy<Value = Scenario> {
    (2usize..=6)
        .prop_flat_map(|m| {
            (
                prop::collection::vec(0u32..6, m),
                Just((0..m as u32).collect::<Vec<u32>>()).prop_shuffle(),
                1..=m,
                0u32..=2,
                any::<bool>(),
            )
        })
        .prop_filter("needs an approval", |(c, ..)| c.iter().sum::<u32>() > 0)
        .prop_map(|(counts, ranks, k, missing, zero_low)| {
            let m = counts.len();
            let labels: Vec<String> = (0..m).map(|i| format!("c{i}")).collect();
            let utilities: Vec<f64> = ranks
                .iter()
                .map(|&r| if zero_low && r == 0 { 0.0 } else { f64::from(r + 1) / 20.0 })
                .collect();
            Scenario::new(
                "rand",
                CandidateSet::new(labels).unwrap(),
                UtilityProfile::new(utilities).unwrap(),
                Tally::new(counts, 6, missing).unwrap(),
                k,
            )
            .unwrap()
        })
}

proptest! {
    #[test]
    fn winner_probabilities_sum_to_k((counts, k) in counts_and_k()) {
        let p = winner_probabilities(&counts, k).unwrap();
        prop_assert!((p.total() - k as f64).abs() < 1e-9);
        prop_assert!(p.probs().iter().all(|x| (0.0..=1.0).contains(x)));
    }

    #[test]
    fn tied_candidates_share_equally((counts, k) in counts_and_k()) {
        let p = winner_probabilities(&counts, k).unwrap();
        for i in 0..counts.len() {
            for j in 0..counts.len() {
                if counts[i] == counts[j] {
                    prop_assert_eq!(p.prob(i), p.prob(j));
                }
                if counts[i] > counts[j] {
                    prop_assert!(p.prob(i) >= p.prob(j));
                }
            }
        }
    }

    #[test]
    fn winner_probabilities_follow_permutations((counts, k) in counts_and_k(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut perm: Vec<usize> = (0..counts.len()).collect();
        perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let permuted: Vec<u32> = perm.iter().map(|&i| counts[i]).collect();
        let p = winner_probabilities(&counts, k).unwrap();
        let q = winner_probabilities(&permuted, k).unwrap();
        for (j, &i) in perm.iter().enumerate() {
            prop_assert_eq!(q.prob(j), p.prob(i));
        }
    }

    #[test]
    fn winner_probabilities_match_naive((counts, k) in counts_and_k()) {
        let p = winner_probabilities(&counts, k).unwrap();
        let want = common::naive_winner_probs(&counts, k);
        for (a, b) in p.probs().iter().zip(&want) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn realized_elections_are_valid((counts, k) in counts_and_k(), seed in any::<u64>()) {
        let w = run_election(&counts, k, seed).unwrap();
        prop_assert_eq!(w.len(), k);
        let p = winner_probabilities(&counts, k).unwrap();
        for i in 0..counts.len() {
            if p.prob(i) == 1.0 { prop_assert!(w.contains(i)); }
            if p.prob(i) == 0.0 { prop_assert!(!w.contains(i)); }
        }
        prop_assert_eq!(w, run_election(&counts, k, seed).unwrap());
    }

    #[test]
    fn attainability_is_bounded_and_increasing(
        s in 0u32..30, extra in 1u32..30, m in 2usize..8, k in 1usize..4, beta in 0.1f64..64.0,
    ) {
        let t = s + extra;
        let a = arctan_attainability(s, t, m, k, beta);
        let b = arctan_attainability(s + 1, t, m, k, beta);
        prop_assert!(a > 0.0 && a < 1.0);
        prop_assert!(b > a);
    }

    #[test]
    fn multi_attainability_is_bounded_and_increasing(s in scenario(), beta in 0.1f64..64.0) {
        for c in 0..s.m() {
            let a = attainability_multi(&s.tally, c, s.winners, beta).unwrap();
            prop_assert!(a > 0.0 && a < 1.0);
            // Move one approval to c from another candidate, keeping r fixed.
            if let Some(donor) = (0..s.m()).find(|&j| j != c && s.tally.counts[j] > 0) {
                let mut more = s.tally.clone();
                more.counts[c] += 1;
                more.counts[donor] -= 1;
                more.known_ballots += 1;
                prop_assert!(attainability_multi(&more, c, s.winners, beta).unwrap() > a);
            }
        }
    }

    #[test]
    fn multi_attainability_reduces_to_single(s in scenario(), beta in 0.1f64..64.0) {
        let mut t = s.tally.clone();
        t.missing_ballots = 0;
        for c in 0..s.m() {
            let single = attainability_single(&t, c, beta).unwrap();
            let multi = attainability_multi(&t, c, 1, beta).unwrap();
            prop_assert!((single - multi).abs() <= f64::EPSILON);
        }
    }

    #[test]
    fn au_ballot_matches_power_set_oracle(s in scenario(), alpha in 0usize..3, beta in 1u32..=32) {
        let alpha = alpha as f64;
        let beta = f64::from(beta);
        let got = au_ballot(&s, &ModelParams::au(alpha, beta)).unwrap();
        let want = common::naive_au(
            &s.tally.counts, s.utilities.values(), s.tally.missing_ballots, s.winners, alpha, beta, DEFAULT_EPSILON,
        );
        prop_assert_eq!(got.mask(), want);
    }

    #[test]
    fn aut_is_antitone_in_tau(s in scenario(), beta in 1u32..=32, t1 in 0.0f64..0.1, t2 in 0.0f64..0.1) {
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let beta = f64::from(beta);
        let big = aut_ballot(&s, &ModelParams::aut(beta, lo)).unwrap();
        let small = aut_ballot(&s, &ModelParams::aut(beta, hi)).unwrap();
        prop_assert!(small.is_subset(big));
    }

    #[test]
    fn aut_depends_only_on_score_order(s in scenario(), beta in 1u32..=32, tau in 0.0f64..0.05) {
        let p = ModelParams::aut(f64::from(beta), tau);
        let scores = au_scores(&s, &p).unwrap();
        let f = |x: f64| x.sqrt() * 3.0 + x.ln_1p();
        let transformed = Ballot::from_indices((0..s.m()).filter(|&c| f(scores[c]) >= f(tau)));
        prop_assert_eq!(aut_ballot(&s, &p).unwrap(), transformed);
        prop_assert_eq!(aut_ballot(&s, &ModelParams::aut(f64::from(beta), 0.0)).unwrap(), Ballot::full(s.m()));
    }

    #[test]
    fn take_x_best_is_nested_and_sincere(s in scenario()) {
        let u = s.utilities.values();
        let mut prev = Ballot::EMPTY;
        for x in 1..=s.m() {
            let b = take_x_best(&s, x).unwrap();
            prop_assert_eq!(b.len(), x);
            prop_assert!(prev.is_subset(b) && prev != b);
            for c in b.iter() {
                for d in 0..s.m() {
                    if u[d] > u[c] { prop_assert!(b.contains(d)); }
                }
            }
            prev = b;
        }
    }

    #[test]
    fn complete_is_take_all_positive(s in scenario()) {
        let positive = s.utilities.values().iter().filter(|&&u| u > 0.0).count();
        let c = complete_ballot(&s);
        prop_assert_eq!(c.len(), positive);
        if positive > 0 {
            prop_assert_eq!(c, take_x_best(&s, positive).unwrap());
        }
    }

    #[test]
    fn optimal_ballot_dominates_every_ballot(s in scenario()) {
        let eu = ExpectedUtility::new(&s);
        let (best, value) = eu.optimum();
        for b in Ballot::all(s.m()) {
            let v = eu.value(b).unwrap();
            prop_assert!(v <= value * (1.0 + 1e-12) + 1e-15);
        }
        prop_assert!((eu.value(best).unwrap() - value).abs() < 1e-15);
    }

    #[test]
    fn scenario_json_round_trips(s in scenario()) {
        let back = parse_scenario(&scenario_to_json(&s)).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn response_csv_round_trips(masks in prop::collection::vec((0u32..32, 1u32..=3, 0u32..4, "[a-z0-9_-]{1,8}"), 0..40)) {
        let mut seen = std::collections::BTreeSet::new();
        let a = scenario_a();
        let records: Vec<ResponseRecord> = masks
            .into_iter()
            .filter(|(_, k, n, v)| seen.insert((v.clone(), *k, *n)))
            .map(|(mask, k, n, v)| ResponseRecord {
                voter_id: v,
                scenario_id: "A".into(),
                winners: k,
                missing: n,
                ballot: a.candidates.ballot_labels(Ballot::from_mask(mask)).into_iter().map(String::from).collect(),
                timestamp: "2021-01-01T00:00:00Z".into(),
            })
            .collect();
        let scenarios: Scenarios = [("A".to_string(), a)].into_iter().collect();
        let back = read_responses(responses_to_csv(&records).as_bytes(), &scenarios).unwrap();
        prop_assert_eq!(back, records);
    }

    #[test]
    fn report_json_round_trips(values in prop::collection::vec(prop::option::of(0.0f64..=1.0), 15)) {
        let report = AccuracyReport {
            winners: vec![1, 2, 3],
            rows: ModelKind::ALL.iter().enumerate().map(|(i, &model)| ReportRow {
                model,
                cells: (0..3).map(|k| ReportCell {
                    winners: k + 1,
                    voters: 7,
                    mean: values[i * 3 + k as usize],
                    sd: values[i * 3 + k as usize].map(|v| v / 3.0),
                    jaccard_mean: values[i * 3 + k as usize].map(|v| 1.0 - v),
                }).collect(),
            }).collect(),
        };
        let json = serde_json::to_string(&report).unwrap();
        prop_assert_eq!(serde_json::from_str::<AccuracyReport>(&json).unwrap(), report);
    }
}

/// Realized winner frequencies over 10^4 seeds stay within three standard
/// errors of the exact probabilities.
#[test]
fn realized_frequencies_match_winner_probabilities() {
    for (counts, k) in [
        (vec![3, 3, 3, 4, 4], 1),
        (vec![3, 3, 3, 4, 3], 2),
        (vec![5, 2, 2, 2, 1], 3),
        (vec![1, 1, 1, 1, 1], 2),
    ] {
        let p = winner_probabilities(&counts, k).unwrap();
        let n = 10_000;
        let mut hits = vec![0u32; counts.len()];
        for seed in 0..n {
            for c in run_election(&counts, k, seed).unwrap().iter() {
                hits[c] += 1;
            }
        }
        for (i, &h) in hits.iter().enumerate() {
            let q = p.prob(i);
            let se = (q * (1.0 - q) / n as f64).sqrt();
            let f = f64::from(h) / n as f64;
            assert!((f - q).abs() <= 3.0 * se + 1e-12, "{counts:?} k={k} cand {i}: {f} vs {q}");
        }
    }
}
