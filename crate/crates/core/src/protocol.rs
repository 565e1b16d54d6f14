//! The commitment lifecycle: setup produces the confidential triple and the
//! public bulletin, a single-writer state machine reveals one digit of `p`
//! per trading day (most significant first), and a terminal verifier checks
//! the completed reveal against the published semiprime.
//!
//! Bulletin and secret files are JSON: big integers as decimal strings, the
//! reveal log as a string of digit characters. The bulletin file is
//! world-readable; the secret file is written owner-only.

use crate::numtheory::{
    self, compose, digit_count, extract_code, gen_constrained_prime, is_prime, leading_digit,
    Code, NumTheoryError, DEFAULT_MR_ROUNDS,
};
use num_bigint::BigUint;
use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::Write;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("all digits already revealed")]
    ProtocolComplete,
    #[error("reveal incomplete: {revealed} of {required} digits")]
    IncompleteReveal { revealed: u32, required: u32 },
    #[error(transparent)]
    NumTheory(#[from] NumTheoryError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed file: {0}")]
    Json(#[from] serde_json::Error),
}

/// Public protocol parameters, fixed at setup and carried in the bulletin.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProtocolConfig {
    pub num_codes: u32,
    pub digits: u32,
    pub days: u32,
    /// Payout in whole dollars.
    pub payout: u64,
    pub code_labels: Vec<String>,
}

impl ProtocolConfig {
    pub fn new(
        num_codes: u32,
        digits: u32,
        days: u32,
        payout: u64,
        code_labels: Vec<String>,
    ) -> Result<Self, ProtocolError> {
        let cfg = ProtocolConfig { num_codes, digits, days, payout, code_labels };
        cfg.validate()?;
        Ok(cfg)
    }

    /// The paper-scale preset: 1000 codes, 300-digit primes, 300 trading
    /// days, $1B payout.
    pub fn paper() -> Self {
        ProtocolConfig {
            num_codes: 1000,
            digits: 300,
            days: 300,
            payout: 1_000_000_000,
            code_labels: default_labels(1000),
        }
    }

    /// Desk-scale preset: 100 codes, 24 digits, 24 days, same payout.
    pub fn desk() -> Self {
        ProtocolConfig {
            num_codes: 100,
            digits: 24,
            days: 24,
            payout: 1_000_000_000,
            code_labels: default_labels(100),
        }
    }

    pub fn validate(&self) -> Result<(), ProtocolError> {
        if self.digits < 5 {
            return Err(ProtocolError::InvalidConfig(format!(
                "digits must be >= 5, got {}",
                self.digits
            )));
        }
        if self.days != self.digits {
            return Err(ProtocolError::InvalidConfig(format!(
                "days ({}) must equal digits ({}): one digit per trading day",
                self.days, self.digits
            )));
        }
        if self.num_codes == 0 || self.num_codes > 1000 {
            return Err(ProtocolError::InvalidConfig(format!(
                "numCodes must be in [1, 1000] to fit three constrained digits, got {}",
                self.num_codes
            )));
        }
        if self.payout == 0 {
            return Err(ProtocolError::InvalidConfig("payout must be positive".into()));
        }
        if self.code_labels.len() != self.num_codes as usize {
            return Err(ProtocolError::InvalidConfig(format!(
                "{} code labels for {} codes",
                self.code_labels.len(),
                self.num_codes
            )));
        }
        Ok(())
    }
}

/// Synthetic micro-cap tickers MC000, MC001, ...
pub fn default_labels(num_codes: u32) -> Vec<String> {
    (0..num_codes).map(|i| format!("MC{i:03}")).collect()
}

/// The confidential triple held by the secure computer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Secret {
    pub w: Code,
    #[serde(with = "crate::serde_util::dec_string")]
    pub p: BigUint,
    #[serde(with = "crate::serde_util::dec_string")]
    pub q: BigUint,
}

/// The public record: config, published semiprime, and the ordered reveal
/// log (most significant digit of `p` first).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bulletin {
    pub config: ProtocolConfig,
    #[serde(with = "crate::serde_util::dec_string")]
    pub n: BigUint,
    #[serde(with = "crate::serde_util::digit_string")]
    pub revealed: Vec<u8>,
    pub day: u32,
}

/// Outcome of terminal verification: one flag per check, the winner code
/// and payout only on a clean pass.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VerificationReport {
    /// (a) the revealed number is prime
    pub prime_check: bool,
    /// (b) it divides the published semiprime exactly
    pub divides_check: bool,
    /// (c) the cofactor is prime, has the configured digit count, and is smaller
    pub cofactor_check: bool,
    /// (d) the embedded code exists and addresses a configured stock
    pub winner_check: bool,
    pub winner: Option<Code>,
    pub payout: Option<u64>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.prime_check && self.divides_check && self.cofactor_check && self.winner_check
    }
}

/// Draw the winner, generate both primes, and publish their product.
///
/// `p` carries the winner code in its trailing digits and is redrawn until
/// its leading digit is at least 2: `q` must be numerically smaller with the
/// same digit count and a *different* leading digit, and no such `q` exists
/// under a leading 1. `q` is then sampled from candidates whose leading
/// digit is strictly below `p`'s.
pub fn setup<R: Rng + ?Sized>(
    config: &ProtocolConfig,
    rng: &mut R,
) -> Result<(Secret, Bulletin), ProtocolError> {
    config.validate()?;
    let w = Code::new(rng.gen_range(0..config.num_codes) as u16)
        .expect("numCodes <= 1000 keeps codes in range");
    let p = loop {
        let candidate = gen_constrained_prime(config.digits, w, rng)?;
        if leading_digit(&candidate) >= 2 {
            break candidate;
        }
    };
    let p_lead = leading_digit(&p);
    let q = numtheory::gen_prime_filtered(config.digits, rng, |c| leading_digit(c) < p_lead)?;
    debug_assert!(q < p);
    let n = compose(&p, &q);
    let bulletin = Bulletin { config: config.clone(), n, revealed: Vec::new(), day: 0 };
    Ok((Secret { w, p, q }, bulletin))
}

impl Bulletin {
    /// Append the next digit of `p` to the public log. Returns the digit.
    pub fn reveal_next(&mut self, secret: &Secret) -> Result<u8, ProtocolError> {
        if self.day >= self.config.days {
            return Err(ProtocolError::ProtocolComplete);
        }
        let digits = secret.p.to_radix_be(10);
        let d = digits[self.day as usize];
        self.revealed.push(d);
        self.day += 1;
        Ok(d)
    }

    pub fn is_complete(&self) -> bool {
        self.day >= self.config.days
    }

    pub fn days_remaining(&self) -> u32 {
        self.config.days - self.day
    }

    /// Check the completed reveal against the published semiprime and
    /// report per-check outcomes. Failing checks produce a failing report,
    /// never an error; only an early call errors.
    pub fn verify(&self) -> Result<VerificationReport, ProtocolError> {
        if self.day < self.config.days {
            return Err(ProtocolError::IncompleteReveal {
                revealed: self.day,
                required: self.config.days,
            });
        }
        let p = BigUint::from_radix_be(&self.revealed, 10).expect("log digits are < 10");
        let prime_check = !p.is_zero() && is_prime(&p, DEFAULT_MR_ROUNDS);
        let divides_check = !p.is_zero() && (&self.n % &p).is_zero();
        let cofactor_check = divides_check && {
            let cofactor = &self.n / &p;
            cofactor < p
                && digit_count(&cofactor) == self.config.digits
                && is_prime(&cofactor, DEFAULT_MR_ROUNDS)
        };
        let winner = extract_code(&p)
            .ok()
            .filter(|w| (w.value() as u32) < self.config.num_codes);
        let winner_check = winner.is_some();
        let passed = prime_check && divides_check && cofactor_check && winner_check;
        Ok(VerificationReport {
            prime_check,
            divides_check,
            cofactor_check,
            winner_check,
            winner,
            payout: passed.then_some(self.config.payout),
        })
    }

    /// Atomic write (temp file + rename), world-readable.
    pub fn save(&self, path: &Path) -> Result<(), ProtocolError> {
        write_atomic(path, &serde_json::to_vec_pretty(self)?, 0o644)
    }

    pub fn load(path: &Path) -> Result<Self, ProtocolError> {
        Ok(serde_json::from_slice(&fs::read(path)?)?)
    }
}

impl Secret {
    /// Atomic write (temp file + rename), owner-only permissions.
    pub fn save(&self, path: &Path) -> Result<(), ProtocolError> {
        write_atomic(path, &serde_json::to_vec_pretty(self)?, 0o600)
    }

    pub fn load(path: &Path) -> Result<Self, ProtocolError> {
        Ok(serde_json::from_slice(&fs::read(path)?)?)
    }
}

fn write_atomic(path: &Path, bytes: &[u8], mode: u32) -> Result<(), ProtocolError> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.write_all(b"\n")?;
    tmp.flush()?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file().set_permissions(fs::Permissions::from_mode(mode))?;
    }
    #[cfg(not(unix))]
    let _ = mode;
    tmp.persist(path).map_err(|e| ProtocolError::Io(e.error))?;
    Ok(())
}
