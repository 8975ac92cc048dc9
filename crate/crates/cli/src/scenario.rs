//! Scenario files: one self-describing TOML document per system, SI units
//! only (watts, hertz, seconds; no unit prefixes).
//!
//! ```toml
//! [channel]
//! bandwidth_hz = 2.0e5
//! noise_density_w_per_hz = 3.0e-7
//!
//! [[users]]
//! arrival_rate = 800.0     # packets/s (packet length 1 bit)
//! delay_bound_s = 8.0e-6
//! power_w = 0.020
//! ```

use std::path::Path;

use anyhow::Context;
use serde::{Deserialize, Serialize};

use macfeas_core::capacity::ChannelConfig;
use macfeas_core::queueing::UserDemand;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub channel: ChannelSection,
    #[serde(default)]
    pub users: Vec<UserSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    pub bandwidth_hz: f64,
    pub noise_density_w_per_hz: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserSection {
    /// Poisson packet arrival rate, packets/s (numerically bits/s since
    /// packets are one bit long).
    pub arrival_rate: f64,
    /// Mean sojourn-time bound, seconds.
    pub delay_bound_s: f64,
    /// Transmit power, watts.
    pub power_w: f64,
}

impl ScenarioFile {
    /// Parses and validates a scenario. TOML syntax errors carry
    /// line/column diagnostics; semantic errors name the field and user.
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read scenario file {}", path.display()))?;
        let scenario: ScenarioFile = toml::from_str(&text)
            .with_context(|| format!("cannot parse scenario file {}", path.display()))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.users.is_empty() {
            anyhow::bail!("scenario has no [[users]] entries");
        }
        self.channel_config().context("invalid channel")?;
        for (index, _) in self.users.iter().enumerate() {
            self.demand(index)
                .with_context(|| format!("invalid users[{index}]"))?;
        }
        Ok(())
    }

    pub fn user_count(&self) -> usize {
        self.users.len()
    }

    pub fn channel_config(&self) -> anyhow::Result<ChannelConfig> {
        Ok(ChannelConfig::new(
            self.channel.bandwidth_hz,
            self.channel.noise_density_w_per_hz,
            self.users.iter().map(|u| u.power_w).collect(),
        )?)
    }

    fn demand(&self, index: usize) -> anyhow::Result<UserDemand> {
        let user = &self.users[index];
        Ok(UserDemand::new(user.arrival_rate, user.delay_bound_s)?)
    }

    pub fn demands(&self) -> anyhow::Result<Vec<UserDemand>> {
        (0..self.users.len()).map(|i| self.demand(i)).collect()
    }

    pub fn sum_power(&self) -> f64 {
        self.users.iter().map(|u| u.power_w).sum()
    }
}
