//! `macfeas check`: required rates from the delay bounds, then membership
//! of the rate vector in the capacity region.

use std::time::Instant;

use serde::Serialize;

use macfeas_core::capacity::{
    self, ChannelConfig, FeasibilityVerdict, RateVector, DEFAULT_SUBSET_CAP,
};
use macfeas_core::queueing::required_rate_vector;

use crate::report::{Meta, VerdictSection};
use crate::scenario::ScenarioFile;

/// Membership method requested on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodChoice {
    /// Equal-power shortcut when powers are equal, exhaustive scan up to
    /// the subset cap, submodular minimization beyond it.
    Auto,
    Brute,
    EqualPower,
    Sfm,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub command: &'static str,
    pub scenario: ScenarioFile,
    pub required_rates_bps: Vec<f64>,
    pub verdict: VerdictSection,
    /// Distinct gap-function evaluations performed by the chosen method.
    pub oracle_calls: u64,
    pub meta: Meta,
}

pub fn run_check(scenario: &ScenarioFile, method: MethodChoice) -> anyhow::Result<CheckReport> {
    let cfg = scenario.channel_config()?;
    let demands = scenario.demands()?;
    let rates = required_rate_vector(&demands)?;

    let started = Instant::now();
    let (verdict, oracle_calls) = dispatch(&cfg, &rates, method)?;
    let meta = Meta::from_elapsed(started.elapsed());

    Ok(CheckReport {
        command: "check",
        scenario: scenario.clone(),
        required_rates_bps: rates.as_slice().to_vec(),
        verdict: VerdictSection::new(&verdict, cfg.feasibility_tolerance()),
        oracle_calls,
        meta,
    })
}

fn dispatch(
    cfg: &ChannelConfig,
    rates: &RateVector,
    method: MethodChoice,
) -> anyhow::Result<(FeasibilityVerdict, u64)> {
    let n = cfg.user_count();
    let subset_count = if n < 64 { (1u64 << n) - 1 } else { u64::MAX };
    Ok(match method {
        MethodChoice::Brute => (
            capacity::check_feasibility_bruteforce(cfg, rates)?,
            subset_count,
        ),
        MethodChoice::EqualPower => (
            capacity::check_feasibility_equal_power(cfg, rates)?,
            n as u64,
        ),
        MethodChoice::Sfm => {
            let (verdict, cert) = capacity::check_feasibility_sfm_certified(cfg, rates)?;
            (verdict, cert.oracle_calls)
        }
        MethodChoice::Auto => {
            if cfg.has_equal_powers() {
                (
                    capacity::check_feasibility_equal_power(cfg, rates)?,
                    n as u64,
                )
            } else if n <= DEFAULT_SUBSET_CAP {
                (
                    capacity::check_feasibility_bruteforce(cfg, rates)?,
                    subset_count,
                )
            } else {
                let (verdict, cert) = capacity::check_feasibility_sfm_certified(cfg, rates)?;
                (verdict, cert.oracle_calls)
            }
        }
    })
}

impl CheckReport {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let v = &self.verdict;
        out.push_str(&format!(
            "check: {} users, W = {} Hz, N0 = {} W/Hz, method = {}\n",
            self.scenario.user_count(),
            self.scenario.channel.bandwidth_hz,
            self.scenario.channel.noise_density_w_per_hz,
            v.method,
        ));
        for (i, (user, rate)) in self
            .scenario
            .users
            .iter()
            .zip(&self.required_rates_bps)
            .enumerate()
        {
            out.push_str(&format!(
                "  user {}: lambda = {} pkt/s, tau = {} s, P = {} W, required rate = {} bit/s\n",
                i + 1,
                user.arrival_rate,
                user.delay_bound_s,
                user.power_w,
                rate,
            ));
        }
        out.push_str(&format!(
            "verdict: {} (min gap = {} bit/s, tolerance = {} bit/s)\n",
            if v.feasible { "FEASIBLE" } else { "INFEASIBLE" },
            v.min_gap_bps,
            v.tolerance_bps,
        ));
        if !v.feasible {
            let users: Vec<String> = v.witness_users.iter().map(|u| u.to_string()).collect();
            out.push_str(&format!(
                "violating subset: {{{}}} (rate demand exceeds its capacity bound)\n",
                users.join(",")
            ));
        }
        out.push_str(&format!(
            "oracle calls: {}, wall time: {:.3} ms\n",
            self.oracle_calls, self.meta.wall_time_ms
        ));
        out
    }

    pub fn exit_code(&self) -> u8 {
        if self.verdict.feasible {
            crate::exit_code::SUCCESS
        } else {
            crate::exit_code::INFEASIBLE
        }
    }
}
