//! `macfeas allocate`: minimum sum power and explicit reallocations, with
//! a feasibility verification stamp on the result.

use std::time::Instant;

use serde::Serialize;

use macfeas_core::power::{
    allocate_fixed_sum, allocate_optimal, min_sum_power, verify_power_feasibility,
};
use macfeas_core::queueing::required_rate_vector;

use crate::report::{Meta, VerdictSection};
use crate::scenario::ScenarioFile;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AllocateMode {
    /// Minimum-sum-power allocation.
    Optimal,
    /// Redistribute the scenario's current sum power.
    KeepSum,
}

impl AllocateMode {
    fn name(self) -> &'static str {
        match self {
            AllocateMode::Optimal => "optimal",
            AllocateMode::KeepSum => "keep-sum",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AllocationSection {
    pub powers_w: Vec<f64>,
    pub sum_w: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AllocateReport {
    pub command: &'static str,
    pub scenario: ScenarioFile,
    pub mode: &'static str,
    pub required_rates_bps: Vec<f64>,
    /// Minimum feasible sum power for these rates, W.
    pub threshold_w: f64,
    /// Sum of the scenario's current powers, W.
    pub current_sum_w: f64,
    /// Absent exactly when keep-sum was requested below the threshold.
    pub allocation: Option<AllocationSection>,
    /// How far the current sum falls short of the threshold, when it does.
    pub deficit_w: Option<f64>,
    /// Verification stamp from re-checking the produced allocation.
    pub verification: Option<VerdictSection>,
    pub meta: Meta,
}

pub fn run_allocate(scenario: &ScenarioFile, mode: AllocateMode) -> anyhow::Result<AllocateReport> {
    let bandwidth = scenario.channel.bandwidth_hz;
    let noise_density = scenario.channel.noise_density_w_per_hz;
    let demands = scenario.demands()?;
    let rates = required_rate_vector(&demands)?;
    let current_sum = scenario.sum_power();

    let started = Instant::now();
    let threshold = min_sum_power(&rates, bandwidth, noise_density)?;

    let allocation = match mode {
        AllocateMode::Optimal => Some(allocate_optimal(&rates, bandwidth, noise_density)?),
        AllocateMode::KeepSum if current_sum >= threshold => Some(allocate_fixed_sum(
            &rates,
            bandwidth,
            noise_density,
            current_sum,
        )?),
        AllocateMode::KeepSum => None,
    };

    let verification = match &allocation {
        Some(alloc) => {
            let verdict =
                verify_power_feasibility(&alloc.powers, &rates, bandwidth, noise_density)?;
            Some(VerdictSection::new(&verdict, 1e-9 * bandwidth))
        }
        None => None,
    };
    let meta = Meta::from_elapsed(started.elapsed());

    Ok(AllocateReport {
        command: "allocate",
        scenario: scenario.clone(),
        mode: mode.name(),
        required_rates_bps: rates.as_slice().to_vec(),
        threshold_w: threshold,
        current_sum_w: current_sum,
        allocation: allocation.map(|alloc| AllocationSection {
            sum_w: alloc.sum_power,
            powers_w: alloc.powers,
        }),
        deficit_w: (current_sum < threshold).then_some(threshold - current_sum),
        verification,
        meta,
    })
}

impl AllocateReport {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "allocate ({}): {} users, threshold = {} W, current sum = {} W\n",
            self.mode,
            self.scenario.user_count(),
            self.threshold_w,
            self.current_sum_w,
        ));
        match (&self.allocation, self.deficit_w) {
            (Some(alloc), _) => {
                for (i, p) in alloc.powers_w.iter().enumerate() {
                    out.push_str(&format!("  user {}: P = {} W\n", i + 1, p));
                }
                out.push_str(&format!("allocated sum: {} W\n", alloc.sum_w));
                if let Some(v) = &self.verification {
                    out.push_str(&format!(
                        "verification: {} (min gap = {} bit/s, method = {})\n",
                        if v.feasible { "FEASIBLE" } else { "INFEASIBLE" },
                        v.min_gap_bps,
                        v.method,
                    ));
                }
            }
            (None, Some(deficit)) => {
                out.push_str(&format!(
                    "below threshold: current sum {} W cannot meet the demands under any split; \
                     deficit = {} W\n",
                    self.current_sum_w, deficit,
                ));
            }
            (None, None) => unreachable!("allocation absent only on deficit"),
        }
        out.push_str(&format!("wall time: {:.3} ms\n", self.meta.wall_time_ms));
        out
    }

    pub fn exit_code(&self) -> u8 {
        if self.allocation.is_some() {
            crate::exit_code::SUCCESS
        } else {
            crate::exit_code::INFEASIBLE
        }
    }
}
