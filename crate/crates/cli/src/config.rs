//! Run configuration: the JSON file schema plus the two built-in presets.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use slowreveal_core::protocol::default_labels;
use slowreveal_core::{AgentProfile, CrackBudget, ProtocolConfig};
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AgentSpec {
    pub name: String,
    pub max_candidates: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunConfigFile {
    pub num_codes: u32,
    pub digits: u32,
    pub days: u32,
    /// Payout in whole dollars.
    pub payout: u64,
    /// Starting market cap applied uniformly to every code, in whole dollars.
    pub base_cap_default: u64,
    pub agents: Vec<AgentSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl RunConfigFile {
    /// Built-in configurations: `paper` is the full-scale protocol, `desk`
    /// a small one whose crack window sits comfortably inside a test run.
    pub fn preset(name: &str) -> Result<Self> {
        let (num_codes, digits) = match name {
            "paper" => (1000, 300),
            "desk" => (100, 24),
            other => bail!("unknown preset {other:?}; available: paper, desk"),
        };
        Ok(RunConfigFile {
            num_codes,
            digits,
            days: digits,
            payout: 1_000_000_000,
            base_cap_default: 40_000_000,
            agents: vec![
                AgentSpec { name: "budget-1e3".into(), max_candidates: 1_000 },
                AgentSpec { name: "budget-1e6".into(), max_candidates: 1_000_000 },
            ],
            seed: None,
            output_dir: None,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        let cfg: RunConfigFile = serde_json::from_slice(&bytes)
            .with_context(|| format!("parsing {}", path.display()))?;
        cfg.to_protocol_config()
            .with_context(|| format!("validating {}", path.display()))?;
        Ok(cfg)
    }

    /// Protocol parameters with generated code labels; enforces the
    /// protocol invariants (days == digits, digits >= 5, ...).
    pub fn to_protocol_config(&self) -> Result<ProtocolConfig> {
        if self.base_cap_default == 0 {
            bail!("baseCapDefault must be positive");
        }
        for a in &self.agents {
            if a.max_candidates == 0 {
                bail!("agent {:?} must have maxCandidates >= 1", a.name);
            }
        }
        Ok(ProtocolConfig::new(
            self.num_codes,
            self.digits,
            self.days,
            self.payout,
            default_labels(self.num_codes),
        )?)
    }

    pub fn agent_profiles(&self) -> Vec<AgentProfile> {
        self.agents
            .iter()
            .map(|a| AgentProfile {
                name: a.name.clone(),
                budget: CrackBudget::new(a.max_candidates),
            })
            .collect()
    }

    pub fn base_caps(&self) -> Vec<u64> {
        vec![self.base_cap_default; self.num_codes as usize]
    }
}
