//! Gradual-reveal semiprime commitment.
//!
//! A confidential winner code is embedded in the trailing digits of a large
//! prime `p`, the product `n = p * q` is published, and one decimal digit of
//! `p` is disclosed per trading day, most significant first. Anyone can
//! recover the winner early by completing the revealed prefix and testing
//! candidates against `n` by exact division, but only once the remaining
//! search space fits their compute budget.
//!
//! The crate is organized around that lifecycle:
//!
//! - [`numtheory`]: primality testing, random and constrained prime
//!   generation, code extraction, semiprime composition.
//! - [`protocol`]: setup, the daily reveal state machine, terminal
//!   verification, and the bulletin/secret file formats.
//! - [`cracker`]: prefix-completion search against the published semiprime
//!   under an explicit candidate budget.
//! - [`market`]: day-by-day posterior/price simulation measuring on which
//!   day prices can first reflect the committed winner.

pub mod cracker;
pub mod market;
pub mod numtheory;
pub mod protocol;

mod serde_util;

pub use cracker::{candidate_space, candidate_space_unpruned, crack, first_crackable_day};
pub use cracker::{CrackBudget, CrackError, CrackResult};
pub use market::{posterior_from_reveal, run_simulation, write_summary_csv, write_timeline_csv};
pub use market::{AgentProfile, MarketError, MarketState, Simulation, SimulationReport};
pub use numtheory::{compose, extract_code, gen_constrained_prime, gen_prime, is_prime};
pub use numtheory::{Code, NumTheoryError};
pub use protocol::{setup, Bulletin, ProtocolConfig, ProtocolError, Secret, VerificationReport};
