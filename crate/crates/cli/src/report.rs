//! Report documents: one struct per command, serialized as JSON for
//! machines and rendered as text for humans from the same values.
//!
//! Everything outside the `meta` section is a pure function of the inputs
//! and flags, so repeated runs produce byte-identical JSON up to `meta`
//! (benchmark wall times live in the payload and vary; their oracle-call
//! counts do not).

use macfeas_core::capacity::{FeasibilityVerdict, SubsetMask};
use serde::Serialize;

/// Non-deterministic run metadata, kept in its own section so consumers
/// can strip it when comparing reports.
#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub wall_time_ms: f64,
}

impl Meta {
    pub fn from_elapsed(elapsed: std::time::Duration) -> Self {
        Meta {
            wall_time_ms: elapsed.as_secs_f64() * 1e3,
        }
    }
}

/// A feasibility verdict flattened for serialization, with one-based user
/// numbers in the witness.
#[derive(Debug, Clone, Serialize)]
pub struct VerdictSection {
    pub feasible: bool,
    pub min_gap_bps: f64,
    pub witness_users: Vec<usize>,
    pub tolerance_bps: f64,
    pub method: String,
}

impl VerdictSection {
    pub fn new(verdict: &FeasibilityVerdict, tolerance_bps: f64) -> Self {
        VerdictSection {
            feasible: verdict.feasible,
            min_gap_bps: verdict.min_gap,
            witness_users: one_based(verdict.witness),
            tolerance_bps,
            method: verdict.method.to_string(),
        }
    }
}

pub fn one_based(mask: SubsetMask) -> Vec<usize> {
    mask.members().map(|i| i + 1).collect()
}

pub fn format_users(mask: SubsetMask) -> String {
    mask.to_string()
}

/// Renders a report either as pretty JSON or as its text form.
pub fn emit<T: Serialize>(report: &T, text: String, json: bool) -> anyhow::Result<()> {
    if json {
        println!("{}", serde_json::to_string_pretty(report)?);
    } else {
        print!("{text}");
    }
    Ok(())
}
