//! Shared fixtures for the benchmarks: seeded protocol runs frozen at a
//! chosen reveal depth.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use slowreveal_core::protocol::default_labels;
use slowreveal_core::{setup, Bulletin, ProtocolConfig, Secret};

/// A seeded run revealed down to `unrevealed` remaining digits.
pub fn bulletin_with_unrevealed(digits: u32, unrevealed: u32, seed: u64) -> (Secret, Bulletin) {
    assert!(unrevealed <= digits);
    let num_codes = 100;
    let config = ProtocolConfig::new(num_codes, digits, digits, 1_000_000_000, default_labels(num_codes))
        .expect("valid bench config");
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let (secret, mut bulletin) = setup(&config, &mut rng).expect("bench setup");
    for _ in 0..digits - unrevealed {
        bulletin.reveal_next(&secret).expect("within the schedule");
    }
    (secret, bulletin)
}
