//! Delay-feasibility analysis for Gaussian multiple-access systems.
//!
//! Given per-user Poisson arrival rates and mean sojourn-time bounds, this
//! crate answers three questions:
//!
//! 1. What service rate does each user need? ([`queueing`] converts a delay
//!    bound into the minimum M/D/1 service rate.)
//! 2. Can the channel deliver those rates with the current transmit powers?
//!    ([`capacity`] tests membership of the rate vector in the polymatroid
//!    capacity region, either exhaustively, via the equal-power shortcut, or
//!    through combinatorial submodular function minimization in [`sfm`].)
//! 3. If not, how should power be reallocated? ([`power`] computes the
//!    minimum feasible sum power and explicit allocations.)
//!
//! All quantities are SI: rates in bits/s, times in seconds, powers in
//! watts, bandwidth in Hz, noise density in W/Hz. Packet length is
//! normalized to one bit, so packet arrival rates are numerically bits/s.
//!
//! With the default `parallel` feature the exhaustive membership scan
//! fans out over subset ranges with rayon; results are identical to the
//! sequential fallback (`--no-default-features`).

pub mod capacity;
pub mod power;
pub mod queueing;
pub mod sfm;

mod error;

pub use error::{Error, Result};
