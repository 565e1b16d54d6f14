//! Day-by-day simulation of how prices for the coded stocks move as digits
//! are revealed: a posterior over the winner code driven by the plain-text
//! reveal of the code digits on the last days and by crack success under
//! each agent's nightly compute budget.
//!
//! Pricing is risk-neutral expected value: `price_i = base_cap_i +
//! posterior_i * payout`. Once any agent cracks, the posterior collapses to
//! a point mass for the whole market from that day's close onward.

use crate::cracker::{crack, CrackBudget, CrackError, CrackResult};
use crate::numtheory::Code;
use crate::protocol::{setup, Bulletin, ProtocolConfig, ProtocolError, Secret, VerificationReport};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use std::io;
use thiserror::Error;

/// A code's posterior must clear this before the day counts as the jump
/// day; slightly below 1.0 to tolerate floating-point posterior arithmetic.
pub const JUMP_THRESHOLD: f64 = 0.99;

#[derive(Debug, Error)]
pub enum MarketError {
    #[error("need {expected} base caps, got {got}")]
    BaseCapCount { expected: usize, got: usize },
    #[error("base cap for code {0} must be positive")]
    BaseCapZero(usize),
    #[error("duplicate agent name {0:?}")]
    DuplicateAgent(String),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Crack(#[from] CrackError),
    #[error("completed run failed verification: {0:?}")]
    VerificationFailed(VerificationReport),
}

/// A market participant characterized only by nightly compute: how many
/// division tests it can run after the close.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentProfile {
    pub name: String,
    pub budget: CrackBudget,
}

/// Closing state of one simulated trading day.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketState {
    pub day: u32,
    /// Posterior probability per code; sums to 1.
    pub posterior: Vec<f64>,
    /// Dollar prices per code: base cap plus posterior-weighted payout.
    pub prices: Vec<f64>,
    /// First agent ever to crack, once any has.
    pub cracked_by: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SimulationReport {
    pub per_day: Vec<MarketState>,
    /// First day the true winner's posterior exceeds [`JUMP_THRESHOLD`].
    pub jump_day: u32,
    /// First success day per agent, in configured agent order.
    pub crack_day_per_agent: Vec<(String, Option<u32>)>,
    pub winner: Code,
    pub verification: VerificationReport,
}

/// Posterior over codes from the reveal log alone. With `k` digits still
/// unrevealed: uniform for k >= 4, hundreds-digit match for k = 3, hundreds
/// and tens for k = 2, a point mass for k <= 1 (the code is then fully
/// determined; the final digit of `p` never constrains it).
pub fn posterior_from_reveal(config: &ProtocolConfig, revealed: &[u8]) -> Vec<f64> {
    let nc = config.num_codes as usize;
    let digits = config.digits as usize;
    assert!(revealed.len() <= digits);
    let k = digits - revealed.len();
    let uniform = vec![1.0 / nc as f64; nc];
    if k >= 4 {
        return uniform;
    }
    let hundreds = revealed[digits - 4];
    if k <= 1 {
        let tens = revealed[digits - 3];
        let units = revealed[digits - 2];
        let w = hundreds as usize * 100 + tens as usize * 10 + units as usize;
        if w >= nc {
            return uniform; // unreachable for honest logs
        }
        let mut posterior = vec![0.0; nc];
        posterior[w] = 1.0;
        return posterior;
    }
    let matches = |c: usize| -> bool {
        c / 100 == hundreds as usize && (k == 3 || c / 10 % 10 == revealed[digits - 3] as usize)
    };
    let count = (0..nc).filter(|&c| matches(c)).count();
    if count == 0 {
        return uniform; // unreachable for honest logs
    }
    (0..nc)
        .map(|c| if matches(c) { 1.0 / count as f64 } else { 0.0 })
        .collect()
}

fn point_mass(num_codes: usize, w: Code) -> Vec<f64> {
    let mut posterior = vec![0.0; num_codes];
    posterior[w.value() as usize] = 1.0;
    posterior
}

/// One full protocol run with nightly crack attempts by each agent.
///
/// The day loop is sequential; within a day the agents' attempts are
/// independent and merged with any-success semantics (ties resolved to the
/// earliest agent in configured order, which only affects the label).
pub struct Simulation {
    config: ProtocolConfig,
    secret: Secret,
    bulletin: Bulletin,
    agents: Vec<AgentProfile>,
    base_caps: Vec<u64>,
    agent_crack_day: Vec<Option<u32>>,
    cracked: Option<(usize, Code)>,
    states: Vec<MarketState>,
}

impl Simulation {
    pub fn new(
        config: &ProtocolConfig,
        agents: &[AgentProfile],
        base_caps: &[u64],
        seed: u64,
    ) -> Result<Self, MarketError> {
        if base_caps.len() != config.num_codes as usize {
            return Err(MarketError::BaseCapCount {
                expected: config.num_codes as usize,
                got: base_caps.len(),
            });
        }
        if let Some(i) = base_caps.iter().position(|&c| c == 0) {
            return Err(MarketError::BaseCapZero(i));
        }
        for (i, a) in agents.iter().enumerate() {
            if agents[..i].iter().any(|b| b.name == a.name) {
                return Err(MarketError::DuplicateAgent(a.name.clone()));
            }
        }
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let (secret, bulletin) = setup(config, &mut rng)?;
        Ok(Simulation {
            config: config.clone(),
            secret,
            bulletin,
            agents: agents.to_vec(),
            base_caps: base_caps.to_vec(),
            agent_crack_day: vec![None; agents.len()],
            cracked: None,
            states: Vec::new(),
        })
    }

    pub fn bulletin(&self) -> &Bulletin {
        &self.bulletin
    }

    /// Advance one trading day: reveal the next digit after the close, let
    /// every not-yet-successful agent spend its nightly budget, and reprice.
    /// A crack tonight lands in tonight's closing state.
    pub fn step_day(&mut self) -> Result<&MarketState, MarketError> {
        self.bulletin.reveal_next(&self.secret)?;
        let day = self.bulletin.day;
        for (i, agent) in self.agents.iter().enumerate() {
            if self.agent_crack_day[i].is_some() {
                continue;
            }
            if let CrackResult::Found { w, .. } = crack(&self.bulletin, &agent.budget)? {
                self.agent_crack_day[i] = Some(day);
                if self.cracked.is_none() {
                    self.cracked = Some((i, w));
                }
            }
        }
        let posterior = match self.cracked {
            Some((_, w)) => point_mass(self.config.num_codes as usize, w),
            None => posterior_from_reveal(&self.config, &self.bulletin.revealed),
        };
        let prices = self
            .base_caps
            .iter()
            .zip(&posterior)
            .map(|(&base, &p)| base as f64 + p * self.config.payout as f64)
            .collect();
        self.states.push(MarketState {
            day,
            posterior,
            prices,
            cracked_by: self.cracked.map(|(i, _)| self.agents[i].name.clone()),
        });
        Ok(self.states.last().expect("just pushed"))
    }

    /// Verify the completed reveal and assemble the report.
    pub fn finish(self) -> Result<SimulationReport, MarketError> {
        let verification = self.bulletin.verify()?;
        if !verification.passed() {
            return Err(MarketError::VerificationFailed(verification));
        }
        let w = self.secret.w.value() as usize;
        let jump_day = self
            .states
            .iter()
            .find(|s| s.posterior[w] > JUMP_THRESHOLD)
            .map(|s| s.day)
            .expect("full reveal pins the winner");
        let crack_day_per_agent = self
            .agents
            .iter()
            .zip(&self.agent_crack_day)
            .map(|(a, d)| (a.name.clone(), *d))
            .collect();
        Ok(SimulationReport {
            per_day: self.states,
            jump_day,
            crack_day_per_agent,
            winner: self.secret.w,
            verification,
        })
    }
}

/// Set up, run every day, verify, and report. Deterministic given the seed.
pub fn run_simulation(
    config: &ProtocolConfig,
    agents: &[AgentProfile],
    base_caps: &[u64],
    seed: u64,
) -> Result<SimulationReport, MarketError> {
    let mut sim = Simulation::new(config, agents, base_caps, seed)?;
    for _ in 0..config.days {
        sim.step_day()?;
    }
    sim.finish()
}

/// One row per (day, code): day, code, posterior, price.
pub fn write_timeline_csv<W: io::Write>(report: &SimulationReport, writer: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["day", "code", "posterior", "price"])?;
    for state in &report.per_day {
        for (code, (posterior, price)) in state.posterior.iter().zip(&state.prices).enumerate() {
            w.write_record(&[
                state.day.to_string(),
                code.to_string(),
                posterior.to_string(),
                price.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Jump day plus one crack-day row per agent ("never" if it never cracked).
pub fn write_summary_csv<W: io::Write>(report: &SimulationReport, writer: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["key", "value"])?;
    w.write_record(["jump_day", &report.jump_day.to_string()])?;
    for (name, day) in &report.crack_day_per_agent {
        let value = day.map_or_else(|| "never".to_string(), |d| d.to_string());
        w.write_record([format!("crack_day:{name}"), value])?;
    }
    w.flush()?;
    Ok(())
}
