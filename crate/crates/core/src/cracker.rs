//! The adversary: enumerate completions of the revealed prefix of `p`, test
//! each against the published semiprime by exact division, and recover the
//! winner once the remaining space fits a candidate budget.
//!
//! Enumeration is ascending and prunes the final digit to {1, 3, 7, 9}. The
//! uniqueness guard at setup (leading digits of `p` and `q` differ) makes
//! the matching divisor unique as soon as one digit is revealed, so the
//! result does not depend on how the range is partitioned across workers.

use crate::numtheory::{code_digits, Code, PRIME_LAST_DIGITS};
use crate::protocol::{Bulletin, ProtocolConfig};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;
use std::sync::atomic::{AtomicU64, Ordering};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CrackError {
    /// Factoring the bare semiprime is out of scope by design; at least one
    /// digit must be revealed before an attempt.
    #[error("no digits revealed yet; refusing to factor the bare semiprime")]
    NoDigitsRevealed,
}

/// Division tests permitted per attempt. Must be at least 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CrackBudget {
    pub max_candidates: u64,
}

impl CrackBudget {
    pub fn new(max_candidates: u64) -> Self {
        assert!(max_candidates >= 1);
        CrackBudget { max_candidates }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "camelCase", rename_all_fields = "camelCase", tag = "outcome")]
pub enum CrackResult {
    /// The unique divisor matching the revealed prefix. `tests_used` is its
    /// 1-based position in the ascending enumeration, which is also the
    /// number of divisions a sequential scan performs.
    Found {
        #[serde(with = "crate::serde_util::dec_string")]
        p: BigUint,
        w: Code,
        tests_used: u64,
    },
    /// The remaining space exceeds the budget; `required` is its size.
    BudgetExceeded {
        #[serde(with = "crate::serde_util::dec_string")]
        required: BigUint,
    },
    /// No completion divides `n`: the bulletin is corrupt.
    NotFound,
}

fn pow10(k: u32) -> BigUint {
    BigUint::from(10u32).pow(k)
}

/// Number of completions the cracker will test with `revealed_count` of
/// `digits` digits public: 4 * 10^(k-1) for k >= 1 unrevealed digits (final
/// digit pruned to {1,3,7,9}), 1 for k = 0.
pub fn candidate_space(digits: u32, revealed_count: u32) -> BigUint {
    assert!(revealed_count <= digits);
    let k = digits - revealed_count;
    if k == 0 {
        BigUint::one()
    } else {
        BigUint::from(4u32) * pow10(k - 1)
    }
}

/// The unpruned count 10^k, for reading the search space without the
/// last-digit rule.
pub fn candidate_space_unpruned(digits: u32, revealed_count: u32) -> BigUint {
    assert!(revealed_count <= digits);
    pow10(digits - revealed_count)
}

/// Candidate with 1-based ascending index `i` (0-based internally):
/// `base + (i/4)*10 + {1,3,7,9}[i%4]`.
fn candidate_at(base: &BigUint, index: u64) -> BigUint {
    base + BigUint::from((index / 4) * 10 + PRIME_LAST_DIGITS[(index % 4) as usize] as u64)
}

fn scan_range(n: &BigUint, base: &BigUint, range: std::ops::Range<u64>) -> Option<u64> {
    for i in range {
        if (n % candidate_at(base, i)).is_zero() {
            return Some(i);
        }
    }
    None
}

/// Parallel scan returning the smallest matching index, identical to the
/// sequential result for any chunking or scheduling.
fn scan_parallel(n: &BigUint, base: &BigUint, total: u64) -> Option<u64> {
    const CHUNK: u64 = 1 << 14;
    let best = AtomicU64::new(u64::MAX);
    let chunks: Vec<u64> = (0..total).step_by(CHUNK as usize).collect();
    chunks.into_par_iter().for_each(|start| {
        if start >= best.load(Ordering::Relaxed) {
            return;
        }
        let end = (start + CHUNK).min(total);
        if let Some(i) = scan_range(n, base, start..end) {
            best.fetch_min(i, Ordering::Relaxed);
        }
    });
    match best.load(Ordering::Relaxed) {
        u64::MAX => None,
        i => Some(i),
    }
}

const PARALLEL_THRESHOLD: u64 = 1 << 16;

/// Try to recover `p` (and with it the winner) from the bulletin.
///
/// Enumerates completions of the revealed prefix in ascending order and
/// returns the first exact divisor of `n`, provided the space fits the
/// budget. On an honest bulletin the hit is the committed prime.
pub fn crack(bulletin: &Bulletin, budget: &CrackBudget) -> Result<CrackResult, CrackError> {
    debug_assert!(budget.max_candidates >= 1);
    if bulletin.day == 0 {
        return Err(CrackError::NoDigitsRevealed);
    }
    let digits = bulletin.config.digits;
    let space = candidate_space(digits, bulletin.day);
    if space > BigUint::from(budget.max_candidates) {
        return Ok(CrackResult::BudgetExceeded { required: space });
    }
    let n = &bulletin.n;
    let prefix = BigUint::from_radix_be(&bulletin.revealed, 10).expect("log digits are < 10");
    let k = digits - bulletin.day;
    if k == 0 {
        return Ok(if (n % &prefix).is_zero() {
            CrackResult::Found { w: code_digits(&prefix), p: prefix, tests_used: 1 }
        } else {
            CrackResult::NotFound
        });
    }
    // space <= budget <= u64::MAX implies k <= 19, so indices fit u64
    let base = prefix * pow10(k);
    let total = 4 * 10u64.pow(k - 1);
    let hit = if total <= PARALLEL_THRESHOLD {
        scan_range(n, &base, 0..total)
    } else {
        scan_parallel(n, &base, total)
    };
    Ok(match hit {
        Some(i) => {
            let p = candidate_at(&base, i);
            CrackResult::Found { w: code_digits(&p), p, tests_used: i + 1 }
        }
        None => CrackResult::NotFound,
    })
}

/// Smallest day on which the remaining space fits the budget; equals the
/// final day when only a full reveal does.
pub fn first_crackable_day(config: &ProtocolConfig, budget: &CrackBudget) -> u32 {
    let max = BigUint::from(budget.max_candidates);
    (1..=config.days)
        .find(|&d| candidate_space(config.digits, d) <= max)
        .unwrap_or(config.days)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::default_labels;

    /// Bulletin as published mid-reveal, built by hand so the tests control
    /// every digit. `digits` may be spec-invalid small for worked examples.
    fn handmade_bulletin(digits: u32, p: u64, q: u64, revealed: &str) -> Bulletin {
        let config = ProtocolConfig {
            num_codes: 1000,
            digits,
            days: digits,
            payout: 1_000_000_000,
            code_labels: default_labels(1000),
        };
        Bulletin {
            config,
            n: BigUint::from(p) * BigUint::from(q),
            revealed: revealed.bytes().map(|b| b - b'0').collect(),
            day: revealed.len() as u32,
        }
    }

    #[test]
    fn space_examples() {
        assert_eq!(candidate_space(300, 296), BigUint::from(4000u32));
        assert_eq!(candidate_space(300, 300), BigUint::one());
        assert_eq!(candidate_space(24, 18), BigUint::from(400_000u32));
        assert_eq!(candidate_space_unpruned(300, 296), BigUint::from(10_000u32));
    }

    #[test]
    fn space_matches_exhaustive_enumeration() {
        // count the completions the cracker would test, by brute force
        for (digits, revealed) in [(6u32, 3u32), (6, 5), (7, 4)] {
            let k = digits - revealed;
            let count = (0..10u64.pow(k))
                .filter(|t| PRIME_LAST_DIGITS.contains(&((t % 10) as u8)))
                .count();
            assert_eq!(candidate_space(digits, revealed), BigUint::from(count));
        }
    }

    #[test]
    fn space_is_monotone_in_reveals() {
        for digits in [5u32, 24, 300] {
            let mut prev = candidate_space(digits, 0);
            for r in 1..=digits {
                let cur = candidate_space(digits, r);
                assert!(cur <= prev);
                prev = cur;
            }
        }
    }

    #[test]
    fn worked_example_9973() {
        let bulletin = handmade_bulletin(4, 9973, 1013, "99");
        // oracle: enumerate all 40 completions of "99??" and record where
        // the divisor sits
        let n = BigUint::from(10_102_649u64);
        assert_eq!(bulletin.n, n);
        let mut hits = Vec::new();
        let mut index = 0u64;
        for t in 0..100u64 {
            if !PRIME_LAST_DIGITS.contains(&((t % 10) as u8)) {
                continue;
            }
            index += 1;
            let cand = 9900 + t;
            if 10_102_649 % cand == 0 {
                hits.push((index, cand));
            }
        }
        assert_eq!(hits, vec![(30, 9973)]);

        let result = crack(&bulletin, &CrackBudget::new(10_000)).unwrap();
        match result {
            CrackResult::Found { p, w, tests_used } => {
                assert_eq!(p, BigUint::from(9973u32));
                assert_eq!(w.value(), 997);
                assert_eq!(tests_used, 30);
                assert!(tests_used <= 40);
            }
            other => panic!("expected Found, got {other:?}"),
        }
    }

    #[test]
    fn budget_too_small_reports_required_space() {
        let bulletin = handmade_bulletin(4, 9973, 1013, "99");
        let result = crack(&bulletin, &CrackBudget::new(10)).unwrap();
        assert_eq!(
            result,
            CrackResult::BudgetExceeded { required: BigUint::from(40u32) }
        );
    }

    #[test]
    fn full_reveal_is_a_single_test() {
        let bulletin = handmade_bulletin(4, 9973, 1013, "9973");
        let result = crack(&bulletin, &CrackBudget::new(1)).unwrap();
        assert_eq!(
            result,
            CrackResult::Found { p: BigUint::from(9973u32), w: Code::new(997).unwrap(), tests_used: 1 }
        );
    }

    #[test]
    fn zero_reveals_refused() {
        let bulletin = handmade_bulletin(4, 9973, 1013, "");
        assert_eq!(
            crack(&bulletin, &CrackBudget::new(u64::MAX)),
            Err(CrackError::NoDigitsRevealed)
        );
    }

    #[test]
    fn corrupt_bulletin_yields_not_found() {
        let mut bulletin = handmade_bulletin(4, 9973, 1013, "99");
        bulletin.n += 1u32; // no longer p * q
        let result = crack(&bulletin, &CrackBudget::new(10_000)).unwrap();
        assert_eq!(result, CrackResult::NotFound);
    }

    #[test]
    fn first_crackable_day_examples() {
        let paper = ProtocolConfig::paper();
        let desk = ProtocolConfig::desk();
        // 4*10^4 = 40000 <= 10^5 first holds with 5 digits unrevealed
        assert_eq!(first_crackable_day(&paper, &CrackBudget::new(100_000)), 295);
        assert_eq!(first_crackable_day(&desk, &CrackBudget::new(1_000_000)), 18);
        assert_eq!(first_crackable_day(&desk, &CrackBudget::new(1)), desk.digits);
        assert_eq!(first_crackable_day(&paper, &CrackBudget::new(1)), paper.digits);
    }

    #[test]
    fn first_crackable_day_matches_direct_scan() {
        let desk = ProtocolConfig::desk();
        for budget in [1u64, 10, 1_000, 10_000, 1_000_000, u64::MAX] {
            let b = CrackBudget::new(budget);
            let scan = (1..=desk.days)
                .find(|&d| candidate_space(desk.digits, d) <= BigUint::from(budget))
                .unwrap();
            assert_eq!(first_crackable_day(&desk, &b), scan);
        }
    }

    #[test]
    fn bigger_budget_never_cracks_later() {
        let desk = ProtocolConfig::desk();
        let mut prev = first_crackable_day(&desk, &CrackBudget::new(1));
        for exp in 1..=18 {
            let day = first_crackable_day(&desk, &CrackBudget::new(10u64.pow(exp)));
            assert!(day <= prev);
            prev = day;
        }
    }

    fn next_prime_u64(from: u64) -> u64 {
        fn oracle(n: u64) -> bool {
            if n < 2 {
                return false;
            }
            let mut d = 2u64;
            while d * d <= n {
                if n % d == 0 {
                    return false;
                }
                d += 1;
            }
            true
        }
        (from..).find(|&n| oracle(n)).unwrap()
    }

    #[test]
    fn parallel_scan_matches_sequential() {
        // force the parallel path: 12-digit primes, 6 digits revealed,
        // 400k candidates
        let p = next_prime_u64(922_337_100_000);
        let q = next_prime_u64(100_000_000_001); // leading 1, below p's 9
        let prefix_str = &p.to_string()[..6];
        let bulletin = handmade_bulletin(12, p, q, prefix_str);
        assert!(4 * 10u64.pow(5) > PARALLEL_THRESHOLD);
        let prefix = BigUint::from_radix_be(&bulletin.revealed, 10).unwrap();
        let base = prefix * pow10(6);
        let seq = scan_range(&bulletin.n, &base, 0..400_000);
        let par = scan_parallel(&bulletin.n, &base, 400_000);
        assert_eq!(seq, par);
        assert!(seq.is_some());
        let via_crack = crack(&bulletin, &CrackBudget::new(1_000_000)).unwrap();
        match via_crack {
            CrackResult::Found { p: found, tests_used, .. } => {
                assert_eq!(found, BigUint::from(p));
                assert_eq!(tests_used, seq.unwrap() + 1);
            }
            other => panic!("expected Found, got {other:?}"),
        }
    }
}
