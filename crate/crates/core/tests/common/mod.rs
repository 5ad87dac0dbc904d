//! Independent reference implementations used as test oracles. They share no
//! code with the library and favour obviousness over speed.

#![allow(dead_code)]

use std::f64::consts::PI;

/// All k-subsets of 0..m as sorted index vectors.
pub fn k_subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            go(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, m, k, &mut Vec::new(), &mut out);
    out
}

/// Winner probabilities: the winning set is drawn uniformly from the
/// size-k sets of maximum total approval.
pub fn naive_winner_probs(counts: &[u32], k: usize) -> Vec<f64> {
    let sets = k_subsets(counts.len(), k);
    let total = |s: &Vec<usize>| s.iter().map(|&i| u64::from(counts[i])).sum::<u64>();
    let best = sets.iter().map(total).max().unwrap();
    let winners: Vec<&Vec<usize>> = sets.iter().filter(|s| total(s) == best).collect();
    let mut p = vec![0.0; counts.len()];
    for s in &winners {
        for &i in s.iter() {
            p[i] += 1.0 / winners.len() as f64;
        }
    }
    p
}

/// Expected utility of adding `ballot` (bitmask) by walking every sequence of
/// `missing` ballots drawn from all 2^m subsets.
pub fn naive_expected_utility(counts: &[u32], utilities: &[f64], k: usize, missing: u32, ballot: u32) -> f64 {
    let m = counts.len();
    let subsets = 1u64 << m;
    let sequences = subsets.pow(missing);
    let mut total = 0.0;
    for seq in 0..sequences {
        let mut c: Vec<u32> = counts.to_vec();
        for i in 0..m {
            if ballot >> i & 1 == 1 {
                c[i] += 1;
            }
        }
        let mut rest = seq;
        for _ in 0..missing {
            let b = rest % subsets;
            rest /= subsets;
            for i in 0..m {
                if b >> i & 1 == 1 {
                    c[i] += 1;
                }
            }
        }
        let p = naive_winner_probs(&c, k);
        total += p.iter().zip(utilities).map(|(p, u)| p * u).sum::<f64>();
    }
    total / sequences as f64
}

/// Ballot order used for ties: fewer candidates first, then the
/// lexicographically smaller sorted index list.
pub fn ballot_key(mask: u32, m: usize) -> (usize, Vec<usize>) {
    let idx: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
    (idx.len(), idx)
}

/// First maximum under a relative tolerance, ties resolved by `ballot_key`.
pub fn naive_argmax(values: &[f64], m: usize) -> (u32, f64) {
    let best = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-12 * best.abs();
    let mut winners: Vec<u32> = (0..values.len() as u32)
        .filter(|&b| best - values[b as usize] <= tol)
        .collect();
    winners.sort_by_key(|&b| ballot_key(b, m));
    (winners[0], values[winners[0] as usize])
}

pub fn naive_optimal(counts: &[u32], utilities: &[f64], k: usize, missing: u32) -> (u32, f64) {
    let m = counts.len();
    let values: Vec<f64> = (0..1u32 << m)
        .map(|b| naive_expected_utility(counts, utilities, k, missing, b))
        .collect();
    naive_argmax(&values, m)
}

/// Attainability averaged over totals r..=r+missing·m with the 1/(m·k) share.
pub fn naive_attainability(counts: &[u32], missing: u32, k: usize, beta: f64) -> Vec<f64> {
    let m = counts.len();
    let r: u32 = counts.iter().sum();
    let totals: Vec<u32> = (r..=r + missing * m as u32).collect();
    counts
        .iter()
        .map(|&s| {
            totals
                .iter()
                .map(|&t| {
                    let x = f64::from(s) / f64::from(t) - 1.0 / (m * k) as f64;
                    (beta * x).atan() / PI + 0.5
                })
                .sum::<f64>()
                / totals.len() as f64
        })
        .collect()
}

pub fn naive_set_attainability(attain: &[f64], mask: u32) -> f64 {
    let mut p = 1.0;
    for (i, a) in attain.iter().enumerate() {
        p *= if mask >> i & 1 == 1 { *a } else { 1.0 - a };
    }
    p
}

/// Power-set AU argmax.
pub fn naive_au(counts: &[u32], utilities: &[f64], missing: u32, k: usize, alpha: f64, beta: f64, eps: f64) -> u32 {
    let m = counts.len();
    let attain = naive_attainability(counts, missing, k, beta);
    let values: Vec<f64> = (0..1u32 << m)
        .map(|b| {
            let u: f64 = (0..m).filter(|i| b >> i & 1 == 1).map(|i| utilities[i]).sum();
            (eps + u).powf(alpha) * naive_set_attainability(&attain, b).powf(2.0 - alpha)
        })
        .collect();
    naive_argmax(&values, m).0
}

/// Per-candidate AU score using the attainability of the singleton outcome.
pub fn naive_au_scores(counts: &[u32], utilities: &[f64], missing: u32, k: usize, alpha: f64, beta: f64, eps: f64) -> Vec<f64> {
    let attain = naive_attainability(counts, missing, k, beta);
    (0..counts.len())
        .map(|c| {
            let a = naive_set_attainability(&attain, 1 << c);
            (eps + utilities[c]).powf(alpha) * a.powf(2.0 - alpha)
        })
        .collect()
}

pub fn mask_of(labels: &[&str], all: &[&str]) -> u32 {
    labels
        .iter()
        .map(|l| 1u32 << all.iter().position(|a| a == l).unwrap())
        .sum()
}

pub const LABELS: [&str; 5] = ["A", "B", "C", "D", "E"];
pub const A_UTILITIES: [f64; 5] = [0.05, 0.10, 0.01, 0.0, 0.25];
pub const A_COUNTS: [u32; 5] = [3, 3, 3, 4, 3];
pub const B_UTILITIES: [f64; 5] = [0.05, 0.10, 0.01, 0.25, 0.0];
pub const B_COUNTS: [u32; 5] = [3, 3, 4, 3, 3];
