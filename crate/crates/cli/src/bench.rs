//! `macfeas bench`: traversal search against submodular minimization on
//! seeded boundary-straddling instances.
//!
//! Instances use log-uniform powers in [1e-3, 1] W and a rate vector that
//! is a corner point of the capacity region scaled by 0.95 (feasible by
//! construction) or 1.05 (the full-set inequality fails), alternating by
//! trial. Demands are recovered from the rates through the sojourn-time
//! formula so every instance is a complete scenario.
//!
//! Only the membership step is timed. The traversal arm is the
//! single-threaded enumeration of all 2^N - 1 inequalities (the baseline
//! whose cost doubles per user) and is skipped above the subset cap; the
//! SFM arm minimizes the gap oracle to epsilon = 1e-6 W. Oracle-call
//! counts are deterministic for a fixed seed; wall times are medians over
//! trials of per-repetition averages.

use std::hint::black_box;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use macfeas_core::capacity::{
    capacity_of_subset, min_gap_exhaustive, ChannelConfig, GapOracle, SubsetMask,
    DEFAULT_SUBSET_CAP,
};
use macfeas_core::queueing::{required_rate_vector, sojourn_time, ServiceSpec, UserDemand};
use macfeas_core::sfm::{self, SfmOptions};

use crate::report::Meta;

#[derive(Debug, Clone)]
pub struct BenchParams {
    pub n_values: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub user_count: usize,
    pub trials: usize,
    /// Median per-run time of the exhaustive traversal, nanoseconds.
    /// Absent above the subset cap.
    pub traversal_median_ns: Option<u64>,
    /// Subsets enumerated per traversal run (2^N - 1).
    pub traversal_subsets: Option<u64>,
    /// Median per-run time of SFM membership, nanoseconds.
    pub sfm_median_ns: u64,
    /// Median distinct oracle evaluations per SFM run (deterministic for
    /// a fixed seed).
    pub sfm_oracle_calls: u64,
    /// Trials whose rate vector was inside the region.
    pub feasible_trials: usize,
    /// Both arms agreed on every verdict (always true unless the
    /// traversal arm was skipped).
    pub verdicts_agree: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub command: &'static str,
    pub n_values: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub rows: Vec<BenchRow>,
    pub meta: Meta,
}

/// One generated instance plus its construction-side feasibility.
pub struct BenchInstance {
    pub cfg: ChannelConfig,
    pub demands: Vec<UserDemand>,
    pub feasible_by_construction: bool,
}

/// Deterministic per-(seed, n, trial) instance.
pub fn bench_instance(n: usize, trial: usize, seed: u64) -> BenchInstance {
    let mix = seed
        .wrapping_mul(0x9E3779B97F4A7C15)
        .wrapping_add((n as u64) << 24)
        .wrapping_add(trial as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(mix);

    let powers: Vec<f64> = (0..n)
        .map(|_| rng.random_range(1e-3f64.ln()..1.0f64.ln()).exp())
        .collect();
    let cfg = ChannelConfig::new(2e5, 3e-7, powers).unwrap();

    // A corner point of the region (successive-decoding vertex for a
    // random order), scaled off the boundary.
    let feasible = trial.is_multiple_of(2);
    let scale = if feasible { 0.95 } else { 1.05 };
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut rates = vec![0.0; n];
    let mut prefix = SubsetMask::EMPTY;
    let mut previous = 0.0;
    for &user in &order {
        prefix = prefix.with(user);
        let value = capacity_of_subset(&cfg, prefix);
        rates[user] = (value - previous) * scale;
        previous = value;
    }

    // Back out demands whose required rate reproduces each rate exactly:
    // pick a utilization, then read the sojourn time off the queue.
    let demands = rates
        .iter()
        .map(|&rate| {
            let utilization = rng.random_range(0.35..0.85);
            let arrival = rate * utilization;
            let spec = ServiceSpec::new(rate, 0.0).unwrap();
            let delay = sojourn_time(&spec, arrival).unwrap();
            UserDemand::new(arrival, delay).unwrap()
        })
        .collect();

    BenchInstance {
        cfg,
        demands,
        feasible_by_construction: feasible,
    }
}

fn traversal_repetitions(n: usize) -> u32 {
    if n >= 18 {
        1
    } else {
        (1u32 << (18 - n)).min(2048)
    }
}

fn sfm_repetitions(n: usize) -> u32 {
    (48 / n.max(1)).max(1) as u32
}

fn median_u64(values: &mut [u64]) -> u64 {
    values.sort_unstable();
    values[(values.len() - 1) / 2]
}

pub fn run_bench(params: &BenchParams) -> anyhow::Result<BenchReport> {
    if params.n_values.is_empty() || params.n_values.len() > 16 {
        anyhow::bail!("--n takes between 1 and 16 user counts");
    }
    if params.n_values.iter().any(|&n| !(1..=32).contains(&n)) {
        anyhow::bail!("user counts must lie in 1..=32 (resource budget)");
    }
    if params.trials < 1 || params.trials > 64 {
        anyhow::bail!("--trials must lie in 1..=64 (resource budget)");
    }

    let started = Instant::now();
    let mut rows = Vec::with_capacity(params.n_values.len());
    for &n in &params.n_values {
        rows.push(bench_one_n(n, params)?);
    }
    Ok(BenchReport {
        command: "bench",
        n_values: params.n_values.clone(),
        trials: params.trials,
        seed: params.seed,
        rows,
        meta: Meta::from_elapsed(started.elapsed()),
    })
}

fn bench_one_n(n: usize, params: &BenchParams) -> anyhow::Result<BenchRow> {
    let run_traversal = n <= DEFAULT_SUBSET_CAP;
    let mut traversal_ns: Vec<u64> = Vec::new();
    let mut sfm_ns: Vec<u64> = Vec::new();
    let mut sfm_calls: Vec<u64> = Vec::new();
    let mut feasible_trials = 0usize;
    let mut verdicts_agree = true;

    for trial in 0..params.trials {
        let instance = bench_instance(n, trial, params.seed);
        let rates = required_rate_vector(&instance.demands)?;
        let cfg = &instance.cfg;
        let tol = cfg.feasibility_tolerance();

        let opts = SfmOptions {
            epsilon: 1e-6 * cfg.bandwidth,
            ..SfmOptions::default()
        };
        let oracle = GapOracle::new(cfg, &rates)?;

        // Untimed reference run: verdicts, counts, construction check.
        let cert = sfm::minimize(&oracle, &opts)?;
        let sfm_feasible = cert.min_value >= -tol;
        if sfm_feasible {
            feasible_trials += 1;
        }
        if sfm_feasible != instance.feasible_by_construction {
            anyhow::bail!(
                "instance construction broke: n={n} trial={trial} expected feasible={}",
                instance.feasible_by_construction
            );
        }
        sfm_calls.push(cert.oracle_calls);

        if run_traversal {
            let reps = traversal_repetitions(n);
            let t = Instant::now();
            let mut scan = (0.0, SubsetMask::EMPTY);
            for _ in 0..reps {
                scan = min_gap_exhaustive(black_box(cfg), black_box(&rates))?;
            }
            traversal_ns.push(t.elapsed().as_nanos() as u64 / reps as u64);
            let traversal_feasible = scan.0.min(0.0) >= -tol;
            verdicts_agree &= traversal_feasible == sfm_feasible;
        }

        let reps = sfm_repetitions(n);
        let t = Instant::now();
        for _ in 0..reps {
            let fresh = GapOracle::new(cfg, &rates)?;
            black_box(sfm::minimize(black_box(&fresh), &opts)?);
        }
        sfm_ns.push(t.elapsed().as_nanos() as u64 / reps as u64);
    }

    Ok(BenchRow {
        user_count: n,
        trials: params.trials,
        traversal_median_ns: run_traversal.then(|| median_u64(&mut traversal_ns)),
        traversal_subsets: run_traversal.then(|| (1u64 << n) - 1),
        sfm_median_ns: median_u64(&mut sfm_ns),
        sfm_oracle_calls: median_u64(&mut sfm_calls),
        feasible_trials,
        verdicts_agree,
    })
}

impl BenchReport {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "bench: trials = {}, seed = {} (times are medians of per-run averages)\n",
            self.trials, self.seed
        ));
        out.push_str(&format!(
            "{:>5} {:>16} {:>14} {:>14} {:>12} {:>9}\n",
            "N", "traversal", "subsets", "sfm", "sfm calls", "feasible"
        ));
        for row in &self.rows {
            let traversal = match row.traversal_median_ns {
                Some(ns) => format_ns(ns),
                None => "(skipped)".to_string(),
            };
            let subsets = match row.traversal_subsets {
                Some(c) => c.to_string(),
                None => "-".to_string(),
            };
            out.push_str(&format!(
                "{:>5} {:>16} {:>14} {:>14} {:>12} {:>6}/{:<2}\n",
                row.user_count,
                traversal,
                subsets,
                format_ns(row.sfm_median_ns),
                row.sfm_oracle_calls,
                row.feasible_trials,
                row.trials,
            ));
        }
        if self.rows.iter().any(|r| !r.verdicts_agree) {
            out.push_str("WARNING: traversal and sfm disagreed on some verdicts\n");
        }
        out.push_str(&format!("wall time: {:.3} ms\n", self.meta.wall_time_ms));
        out
    }
}

fn format_ns(ns: u64) -> String {
    if ns >= 10_000_000 {
        format!("{:.1} ms", ns as f64 / 1e6)
    } else if ns >= 10_000 {
        format!("{:.1} us", ns as f64 / 1e3)
    } else {
        format!("{ns} ns")
    }
}
