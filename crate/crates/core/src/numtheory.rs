//! Arbitrary-precision number-theoretic primitives: primality testing,
//! random and constrained prime generation, winner-code extraction, and
//! semiprime composition.
//!
//! All generation is rejection sampling from a caller-supplied random
//! stream, so every operation here is a pure function of its inputs and the
//! seed. Primality is Miller-Rabin with witness bases derived
//! deterministically from the number under test, plus exact trial division
//! below 10^6.

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::OnceLock;
use thiserror::Error;

/// Default Miller-Rabin round count; false-positive odds at most 4^-40.
pub const DEFAULT_MR_ROUNDS: u32 = 40;

/// Primality-tested candidates allowed per generation call before giving up.
/// Expected candidate counts are in the hundreds even at 300 digits, so
/// hitting this cap signals a broken random stream, not bad luck.
pub const DEFAULT_ATTEMPT_CAP: u64 = 100_000;

/// Below this bound `is_prime` is exact trial division, no Miller-Rabin.
const TRIAL_DIVISION_BOUND: u64 = 1_000_000;

/// Every prime above 5 ends in one of these digits.
pub(crate) const PRIME_LAST_DIGITS: [u8; 4] = [1, 3, 7, 9];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumTheoryError {
    /// The value has fewer than four trailing digits, so no code is embedded.
    #[error("value {value} is too small to carry a code (need >= 10000)")]
    InputTooSmall { value: BigUint },
    /// The attempt cap tripped mid-generation.
    #[error("no prime found after {attempts} candidates; the random stream looks broken")]
    ExhaustedAttempts { attempts: u64 },
}

/// Winner code: an integer in `[0, 999]`, embeddable in the three
/// constrained trailing digits of a prime.
#[derive(Debug, Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Code(u16);

impl Code {
    pub const MAX: u16 = 999;

    pub fn new(value: u16) -> Option<Code> {
        (value <= Self::MAX).then_some(Code(value))
    }

    pub fn value(self) -> u16 {
        self.0
    }

    /// Decimal digits (hundreds, tens, units).
    pub(crate) fn digits(self) -> [u8; 3] {
        [(self.0 / 100) as u8, (self.0 / 10 % 10) as u8, (self.0 % 10) as u8]
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Number of decimal digits (1 for zero).
pub fn digit_count(n: &BigUint) -> u32 {
    if n.is_zero() {
        1
    } else {
        n.to_str_radix(10).len() as u32
    }
}

/// Most significant decimal digit.
pub fn leading_digit(n: &BigUint) -> u8 {
    let s = n.to_str_radix(10);
    s.as_bytes()[0] - b'0'
}

/// Probabilistic primality test, deterministic as a function of `(n, rounds)`.
///
/// Exact trial division below 10^6; above that, small-prime filtering
/// followed by `rounds` Miller-Rabin witnesses (base 2 first, the rest drawn
/// from a stream seeded by `n` itself). False positives are bounded by
/// 4^-rounds.
pub fn is_prime(n: &BigUint, rounds: u32) -> bool {
    assert!(rounds >= 1, "rounds must be >= 1");
    if let Some(small) = n.to_u64() {
        if small < TRIAL_DIVISION_BOUND {
            return is_prime_u64(small);
        }
    }
    if n.is_even() {
        return false;
    }
    for &p in small_primes() {
        if (n % p).is_zero() {
            return false; // n > 10^6 > p, so divisibility means composite
        }
    }
    miller_rabin(n, rounds)
}

/// Exact trial division for `n < 2^64`.
fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = 7u64;
    // 6k +/- 1 wheel
    while d.saturating_mul(d) <= n {
        if n % (d - 2) == 0 || n % d == 0 {
            return false;
        }
        d += 6;
    }
    // d-2 may still be a divisor when d*d just overshot
    n % (d - 2) != 0 || n == d - 2
}

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| (2..1000).filter(|&n| is_prime_u64(n)).collect())
}

/// Witness bases must not depend on any external RNG state or the test
/// stops being a pure function; fold the whole magnitude into the seed.
fn witness_rng(n: &BigUint) -> ChaCha20Rng {
    let mut seed = [0u8; 32];
    for (i, b) in n.to_bytes_le().iter().enumerate() {
        seed[i % 32] ^= b;
    }
    ChaCha20Rng::from_seed(seed)
}

/// Miller-Rabin for odd `n` with no factor below 1000.
fn miller_rabin(n: &BigUint, rounds: u32) -> bool {
    let one = BigUint::one();
    let two = BigUint::from(2u32);
    let n_m1 = n - &one;
    let s = n_m1.trailing_zeros().expect("n is odd, so n-1 has a zero bit");
    let d = &n_m1 >> s;
    let high = n - &two; // gen_biguint_range excludes the upper bound
    let mut rng = witness_rng(n);
    for round in 0..rounds {
        let base = if round == 0 {
            two.clone()
        } else {
            rng.gen_biguint_range(&two, &high)
        };
        let mut x = base.modpow(&d, n);
        if x.is_one() || x == n_m1 {
            continue;
        }
        let mut composite = true;
        for _ in 1..s {
            x = &x * &x % n;
            if x == n_m1 {
                composite = false;
                break;
            }
            if x.is_one() {
                return false; // nontrivial square root of 1
            }
        }
        if composite {
            return false;
        }
    }
    true
}

/// The winner code carried by `p`: `floor((p mod 10000) / 10)`, i.e. the
/// first three of its last four digits.
pub fn extract_code(p: &BigUint) -> Result<Code, NumTheoryError> {
    if *p < BigUint::from(10_000u32) {
        return Err(NumTheoryError::InputTooSmall { value: p.clone() });
    }
    Ok(code_digits(p))
}

/// The raw extraction formula without the four-trailing-digit gate. The
/// result is always <= 999, so it fits [`Code`] by construction.
pub(crate) fn code_digits(p: &BigUint) -> Code {
    let last4 = (p % 10_000u32).to_u16().expect("mod 10000 fits u16");
    Code(last4 / 10)
}

/// Exact product `p * q`.
pub fn compose(p: &BigUint, q: &BigUint) -> BigUint {
    debug_assert!(*p >= BigUint::from(2u32) && *q >= BigUint::from(2u32));
    p * q
}

/// Random prime with exactly `digits` decimal digits, drawn by rejection
/// sampling from `rng`. Deterministic given the seed behind `rng`.
pub fn gen_prime<R: Rng + ?Sized>(digits: u32, rng: &mut R) -> Result<BigUint, NumTheoryError> {
    assert!(digits >= 2, "need at least 2 digits");
    gen_prime_filtered(digits, rng, |_| true)
}

/// Like [`gen_prime`] but candidates failing `accept` are redrawn before any
/// primality work. `accept` must pass a fixed fraction of candidates or the
/// draw guard trips.
pub(crate) fn gen_prime_filtered<R, F>(
    digits: u32,
    rng: &mut R,
    accept: F,
) -> Result<BigUint, NumTheoryError>
where
    R: Rng + ?Sized,
    F: Fn(&BigUint) -> bool,
{
    let mut buf = vec![0u8; digits as usize];
    let mut tested = 0u64;
    let mut drawn = 0u64;
    while tested < DEFAULT_ATTEMPT_CAP && drawn < DEFAULT_ATTEMPT_CAP.saturating_mul(64) {
        drawn += 1;
        let last = buf.len() - 1;
        buf[0] = rng.gen_range(1..=9);
        for d in buf[1..last].iter_mut() {
            *d = rng.gen_range(0..=9);
        }
        buf[last] = PRIME_LAST_DIGITS[rng.gen_range(0..4)];
        let candidate = BigUint::from_radix_be(&buf, 10).expect("digits are < 10");
        if !accept(&candidate) {
            continue;
        }
        tested += 1;
        if is_prime(&candidate, DEFAULT_MR_ROUNDS) {
            return Ok(candidate);
        }
    }
    Err(NumTheoryError::ExhaustedAttempts { attempts: tested })
}

/// Random prime with exactly `digits` digits whose extracted code equals
/// `w`: the 4th-, 3rd- and 2nd-from-last digits are fixed to `w`'s decimal
/// digits and the final digit cycles through {1, 3, 7, 9} per random prefix.
pub fn gen_constrained_prime<R: Rng + ?Sized>(
    digits: u32,
    w: Code,
    rng: &mut R,
) -> Result<BigUint, NumTheoryError> {
    assert!(digits >= 5, "need at least 5 digits to constrain the last four");
    let mut buf = vec![0u8; digits as usize];
    let [h, t, u] = w.digits();
    let tail = buf.len() - 4;
    let mut tested = 0u64;
    while tested < DEFAULT_ATTEMPT_CAP {
        buf[0] = rng.gen_range(1..=9);
        for d in buf[1..tail].iter_mut() {
            *d = rng.gen_range(0..=9);
        }
        buf[tail] = h;
        buf[tail + 1] = t;
        buf[tail + 2] = u;
        for last in PRIME_LAST_DIGITS {
            buf[tail + 3] = last;
            tested += 1;
            let candidate = BigUint::from_radix_be(&buf, 10).expect("digits are < 10");
            if is_prime(&candidate, DEFAULT_MR_ROUNDS) {
                return Ok(candidate);
            }
        }
    }
    Err(NumTheoryError::ExhaustedAttempts { attempts: tested })
}
