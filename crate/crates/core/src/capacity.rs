//! Gaussian multiple-access capacity region as a polymatroid.
//!
//! For transmit powers `P_i`, one-sided noise density `N0`, and bandwidth
//! `W`, the region is the set of rate vectors `R` with
//!
//! ```text
//! sum_{i in S} R_i <= g(S) = W log2(1 + sum_{i in S} P_i / (N0 W))
//! ```
//!
//! for every subset `S` of users. `g` is normalized, nondecreasing, and
//! submodular, and the gap `f(S) = g(S) - R(S)` inherits submodularity, so
//! membership of `R` is equivalent to `min_S f(S) >= 0`.
//!
//! Three membership tests are provided: an exhaustive scan of all
//! `2^N - 1` nonempty subsets (parallelized over mask ranges with rayon
//! when the `parallel` feature is on), the equal-power shortcut that checks
//! only `N` sorted prefix inequalities, and submodular function
//! minimization via [`crate::sfm`] for user counts where exhaustion is
//! out of reach.

use std::fmt;
use std::ops::{BitAnd, BitOr};

use crate::error::{ensure_nonnegative, ensure_positive};
use crate::sfm::{self, SfmOptions, SubmodularFn};
use crate::{Error, Result};

/// Largest user count accepted by the exhaustive membership scan unless a
/// caller raises the cap explicitly.
pub const DEFAULT_SUBSET_CAP: usize = 25;

/// Powers are treated as equal when their spread is within this relative
/// tolerance of the largest.
pub const EQUAL_POWER_REL_TOLERANCE: f64 = 1e-12;

/// Subset count at and above which the exhaustive scan fans out to rayon.
#[cfg(feature = "parallel")]
const PARALLEL_SUBSET_THRESHOLD: u64 = 1 << 16;

#[cfg(feature = "parallel")]
const PARALLEL_CHUNK: u64 = 1 << 13;

const LN_2: f64 = std::f64::consts::LN_2;

/// A subset of users `{0, ..., N-1}` encoded as a bitmask (bit `i` = user `i`).
///
/// Displays with one-based user numbers, matching report output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SubsetMask(u64);

impl SubsetMask {
    pub const EMPTY: SubsetMask = SubsetMask(0);

    /// The full set `{0, ..., n-1}`. Supports `n <= 63`.
    pub fn full(n: usize) -> SubsetMask {
        assert!(n < 64, "subset masks support at most 63 users");
        SubsetMask((1u64 << n) - 1)
    }

    pub fn from_bits(bits: u64) -> SubsetMask {
        SubsetMask(bits)
    }

    pub fn singleton(member: usize) -> SubsetMask {
        assert!(member < 64);
        SubsetMask(1u64 << member)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, member: usize) -> bool {
        member < 64 && self.0 >> member & 1 == 1
    }

    pub fn with(self, member: usize) -> SubsetMask {
        assert!(member < 64);
        SubsetMask(self.0 | 1u64 << member)
    }

    pub fn without(self, member: usize) -> SubsetMask {
        assert!(member < 64);
        SubsetMask(self.0 & !(1u64 << member))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset_of(self, other: SubsetMask) -> bool {
        self.0 & !other.0 == 0
    }

    /// Members in increasing order.
    pub fn members(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let member = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(member)
            }
        })
    }
}

impl BitOr for SubsetMask {
    type Output = SubsetMask;
    fn bitor(self, rhs: SubsetMask) -> SubsetMask {
        SubsetMask(self.0 | rhs.0)
    }
}

impl BitAnd for SubsetMask {
    type Output = SubsetMask;
    fn bitand(self, rhs: SubsetMask) -> SubsetMask {
        SubsetMask(self.0 & rhs.0)
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, member) in self.members().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", member + 1)?;
        }
        write!(f, "}}")
    }
}

/// Channel parameters of the multiple-access system.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelConfig {
    /// Bandwidth, Hz.
    pub bandwidth: f64,
    /// One-sided noise spectral density, W/Hz; noise power over the band
    /// is `noise_density * bandwidth`.
    pub noise_density: f64,
    /// Per-user transmit powers, W.
    pub powers: Vec<f64>,
}

impl ChannelConfig {
    pub fn new(bandwidth: f64, noise_density: f64, powers: Vec<f64>) -> Result<Self> {
        let cfg = ChannelConfig {
            bandwidth,
            noise_density,
            powers,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive(self.bandwidth, "bandwidth")?;
        ensure_positive(self.noise_density, "noise density")?;
        if self.powers.is_empty() {
            return Err(Error::Domain("power list is empty".to_string()));
        }
        for (index, &p) in self.powers.iter().enumerate() {
            ensure_nonnegative(p, "transmit power").map_err(|e| e.for_user(index))?;
        }
        Ok(())
    }

    pub fn user_count(&self) -> usize {
        self.powers.len()
    }

    /// Noise power over the band, `N0 W`, in watts.
    pub fn noise_power(&self) -> f64 {
        self.noise_density * self.bandwidth
    }

    /// Slack applied when classifying gaps as feasible, in bits/s. Boundary
    /// points (for example the minimum-sum-power allocation, which puts the
    /// rate vector on a face of the region) must classify as feasible
    /// despite rounding.
    pub fn feasibility_tolerance(&self) -> f64 {
        1e-9 * self.bandwidth
    }

    /// True when all powers agree within [`EQUAL_POWER_REL_TOLERANCE`].
    pub fn has_equal_powers(&self) -> bool {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for &p in &self.powers {
            min = min.min(p);
            max = max.max(p);
        }
        max <= 0.0 || (max - min) <= EQUAL_POWER_REL_TOLERANCE * max
    }
}

/// Per-user service rates, bits/s.
#[derive(Debug, Clone, PartialEq)]
pub struct RateVector {
    rates: Vec<f64>,
}

impl RateVector {
    pub fn new(rates: Vec<f64>) -> Result<Self> {
        if rates.is_empty() {
            return Err(Error::Domain("rate vector is empty".to_string()));
        }
        for (index, &r) in rates.iter().enumerate() {
            ensure_nonnegative(r, "rate").map_err(|e| e.for_user(index))?;
        }
        Ok(RateVector { rates })
    }

    pub fn zero(n: usize) -> Self {
        RateVector {
            rates: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.rates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rates.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.rates
    }

    pub fn sum(&self) -> f64 {
        self.rates.iter().sum()
    }

    /// `R(S)`, the sum of rates over a subset.
    pub fn subset_sum(&self, s: SubsetMask) -> f64 {
        s.members().map(|i| self.rates[i]).sum()
    }
}

/// How a [`FeasibilityVerdict`] was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MembershipMethod {
    BruteForce,
    EqualPower,
    Sfm,
}

impl fmt::Display for MembershipMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            MembershipMethod::BruteForce => "brute-force",
            MembershipMethod::EqualPower => "equal-power",
            MembershipMethod::Sfm => "sfm",
        };
        f.write_str(name)
    }
}

/// Outcome of a capacity-region membership test.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityVerdict {
    /// True when `min_gap >= -tolerance`.
    pub feasible: bool,
    /// `min_S f(S)` over all subsets including the empty set, bits/s.
    /// For the SFM method this is the certified minimum (to the solver's
    /// epsilon); for the others it is exact up to rounding.
    pub min_gap: f64,
    /// A subset achieving `min_gap`; the violating subset when infeasible,
    /// the empty set when no subset gap is negative.
    pub witness: SubsetMask,
    pub method: MembershipMethod,
}

/// `g(S) = W log2(1 + P(S) / (N0 W))` in bits/s. `g(empty) = 0`.
pub fn capacity_of_subset(cfg: &ChannelConfig, s: SubsetMask) -> f64 {
    assert!(
        s.is_subset_of(SubsetMask::full(cfg.user_count())),
        "subset {s} is not within the {}-user ground set",
        cfg.user_count()
    );
    let power: f64 = s.members().map(|i| cfg.powers[i]).sum();
    sum_capacity(cfg.bandwidth, cfg.noise_power(), power)
}

/// `g` for a raw power sum; `ln_1p` keeps precision at small SNR.
fn sum_capacity(bandwidth: f64, noise_power: f64, power_sum: f64) -> f64 {
    bandwidth * (power_sum / noise_power).ln_1p() / LN_2
}

/// The gap function `f(S) = g(S) - R(S)` in bits/s. `f(empty) = 0`, and
/// `f` is submodular because `g` is and `R(S)` is modular.
pub fn gap(cfg: &ChannelConfig, rates: &RateVector, s: SubsetMask) -> Result<f64> {
    check_dims(cfg, rates)?;
    Ok(capacity_of_subset(cfg, s) - rates.subset_sum(s))
}

fn check_dims(cfg: &ChannelConfig, rates: &RateVector) -> Result<()> {
    if cfg.user_count() != rates.len() {
        return Err(Error::DimensionMismatch {
            left: cfg.user_count(),
            right: rates.len(),
        });
    }
    Ok(())
}

/// Scans masks `[lo, hi)` and returns the smallest gap with the smallest
/// achieving mask. Enumeration is by increasing mask value.
fn scan_range(cfg: &ChannelConfig, rates: &RateVector, lo: u64, hi: u64) -> (f64, u64) {
    let noise = cfg.noise_power();
    let bandwidth = cfg.bandwidth;
    let mut best_gap = f64::INFINITY;
    let mut best_mask = 0u64;
    for mask in lo..hi {
        let mut power = 0.0;
        let mut rate = 0.0;
        let mut bits = mask;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            power += cfg.powers[i];
            rate += rates.as_slice()[i];
            bits &= bits - 1;
        }
        let gap = sum_capacity(bandwidth, noise, power) - rate;
        if gap < best_gap {
            best_gap = gap;
            best_mask = mask;
        }
    }
    (best_gap, best_mask)
}

fn merge_scans(a: (f64, u64), b: (f64, u64)) -> (f64, u64) {
    if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

/// Exact `min_S f(S)` over all nonempty subsets, single-threaded.
///
/// This is the traversal search baseline: cost grows as `2^N`. Ties are
/// broken by the smallest mask value.
pub fn min_gap_exhaustive(cfg: &ChannelConfig, rates: &RateVector) -> Result<(f64, SubsetMask)> {
    check_dims(cfg, rates)?;
    let n = cfg.user_count();
    if n >= 64 {
        return Err(Error::SubsetCapExceeded {
            user_count: n,
            cap: 63,
        });
    }
    let total = 1u64 << n;
    let (gap, mask) = scan_range(cfg, rates, 1, total);
    Ok((gap, SubsetMask::from_bits(mask)))
}

/// Exact `min_S f(S)` over all nonempty subsets, parallelized over mask
/// ranges. The result, including tie-breaking, is identical to
/// [`min_gap_exhaustive`] regardless of how rayon partitions the range.
#[cfg(feature = "parallel")]
pub fn min_gap_exhaustive_parallel(
    cfg: &ChannelConfig,
    rates: &RateVector,
) -> Result<(f64, SubsetMask)> {
    use rayon::prelude::*;

    check_dims(cfg, rates)?;
    let n = cfg.user_count();
    if n >= 64 {
        return Err(Error::SubsetCapExceeded {
            user_count: n,
            cap: 63,
        });
    }
    let total = 1u64 << n;
    let chunks = (total - 1).div_ceil(PARALLEL_CHUNK);
    let (gap, mask) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = 1 + c * PARALLEL_CHUNK;
            let hi = (lo + PARALLEL_CHUNK).min(total);
            scan_range(cfg, rates, lo, hi)
        })
        .reduce(|| (f64::INFINITY, 0u64), merge_scans);
    Ok((gap, SubsetMask::from_bits(mask)))
}

fn verdict_from_min(
    min_gap: f64,
    witness: SubsetMask,
    tol: f64,
    method: MembershipMethod,
) -> FeasibilityVerdict {
    // f(empty) = 0 always participates: when no nonempty subset goes
    // negative the minimum over all subsets is 0 at the empty set, which
    // also wins the smallest-mask tie-break.
    let (min_gap, witness) = if min_gap < 0.0 {
        (min_gap, witness)
    } else {
        (0.0, SubsetMask::EMPTY)
    };
    FeasibilityVerdict {
        feasible: min_gap >= -tol,
        min_gap,
        witness,
        method,
    }
}

/// Membership by exhaustive enumeration of all `2^N - 1` subset
/// inequalities, with the default user-count cap.
pub fn check_feasibility_bruteforce(
    cfg: &ChannelConfig,
    rates: &RateVector,
) -> Result<FeasibilityVerdict> {
    check_feasibility_bruteforce_capped(cfg, rates, DEFAULT_SUBSET_CAP)
}

/// [`check_feasibility_bruteforce`] with an explicit user-count cap.
pub fn check_feasibility_bruteforce_capped(
    cfg: &ChannelConfig,
    rates: &RateVector,
    cap: usize,
) -> Result<FeasibilityVerdict> {
    check_dims(cfg, rates)?;
    let n = cfg.user_count();
    if n > cap.min(63) {
        return Err(Error::SubsetCapExceeded {
            user_count: n,
            cap: cap.min(63),
        });
    }
    let (min_gap, witness) = scan_dispatch(cfg, rates)?;
    Ok(verdict_from_min(
        min_gap,
        witness,
        cfg.feasibility_tolerance(),
        MembershipMethod::BruteForce,
    ))
}

#[cfg(feature = "parallel")]
fn scan_dispatch(cfg: &ChannelConfig, rates: &RateVector) -> Result<(f64, SubsetMask)> {
    if (1u64 << cfg.user_count()) >= PARALLEL_SUBSET_THRESHOLD {
        min_gap_exhaustive_parallel(cfg, rates)
    } else {
        min_gap_exhaustive(cfg, rates)
    }
}

#[cfg(not(feature = "parallel"))]
fn scan_dispatch(cfg: &ChannelConfig, rates: &RateVector) -> Result<(f64, SubsetMask)> {
    min_gap_exhaustive(cfg, rates)
}

/// Membership for equal transmit powers: only the `N` inequalities over
/// sorted-rate prefixes need checking, and their smallest slack equals the
/// exact `min_S f(S)`.
pub fn check_feasibility_equal_power(
    cfg: &ChannelConfig,
    rates: &RateVector,
) -> Result<FeasibilityVerdict> {
    check_dims(cfg, rates)?;
    if !cfg.has_equal_powers() {
        return Err(Error::UnequalPowers {
            tolerance: EQUAL_POWER_REL_TOLERANCE,
        });
    }
    let n = cfg.user_count();
    let power = cfg.powers[0];
    let noise = cfg.noise_power();

    // Descending rates, index ascending on ties, so the witness is
    // deterministic.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        rates.as_slice()[b]
            .partial_cmp(&rates.as_slice()[a])
            .unwrap()
            .then(a.cmp(&b))
    });

    let mut prefix_rate = 0.0;
    let mut prefix_mask = SubsetMask::EMPTY;
    let mut min_gap = f64::INFINITY;
    let mut witness = SubsetMask::EMPTY;
    for (k, &user) in order.iter().enumerate() {
        prefix_rate += rates.as_slice()[user];
        prefix_mask = prefix_mask.with(user);
        let bound = sum_capacity(cfg.bandwidth, noise, (k + 1) as f64 * power);
        let gap = bound - prefix_rate;
        if gap < min_gap {
            min_gap = gap;
            witness = prefix_mask;
        }
    }
    Ok(verdict_from_min(
        min_gap,
        witness,
        cfg.feasibility_tolerance(),
        MembershipMethod::EqualPower,
    ))
}

/// The gap function `f(S) = g(S) - R(S)` packaged as a submodular oracle
/// for [`crate::sfm::minimize`].
#[derive(Debug, Clone)]
pub struct GapOracle<'a> {
    cfg: &'a ChannelConfig,
    rates: &'a RateVector,
}

impl<'a> GapOracle<'a> {
    pub fn new(cfg: &'a ChannelConfig, rates: &'a RateVector) -> Result<Self> {
        check_dims(cfg, rates)?;
        cfg.validate()?;
        Ok(GapOracle { cfg, rates })
    }
}

impl SubmodularFn for GapOracle<'_> {
    fn ground_size(&self) -> usize {
        self.cfg.user_count()
    }

    fn eval(&self, s: SubsetMask) -> f64 {
        let mut power = 0.0;
        let mut rate = 0.0;
        for i in s.members() {
            power += self.cfg.powers[i];
            rate += self.rates.as_slice()[i];
        }
        sum_capacity(self.cfg.bandwidth, self.cfg.noise_power(), power) - rate
    }
}

/// Membership by submodular function minimization of the gap oracle.
///
/// Scales to user counts where exhaustion is hopeless. The solver runs
/// with `epsilon = 1e-6 * W` and stops early once the sign of the minimum
/// is decided at the feasibility tolerance, so `min_gap` is the best gap
/// value observed (within epsilon of the true minimum when no early exit
/// fires).
pub fn check_feasibility_sfm(
    cfg: &ChannelConfig,
    rates: &RateVector,
) -> Result<FeasibilityVerdict> {
    check_feasibility_sfm_certified(cfg, rates).map(|(verdict, _)| verdict)
}

/// [`check_feasibility_sfm`] returning the solver certificate as well
/// (dual bound, oracle-call count, phase statistics).
pub fn check_feasibility_sfm_certified(
    cfg: &ChannelConfig,
    rates: &RateVector,
) -> Result<(FeasibilityVerdict, sfm::SfmCertificate)> {
    let oracle = GapOracle::new(cfg, rates)?;
    let tol = cfg.feasibility_tolerance();
    let opts = SfmOptions {
        epsilon: 1e-6 * cfg.bandwidth,
        decision_threshold: Some(tol),
        ..SfmOptions::default()
    };
    let cert = sfm::minimize(&oracle, &opts)?;
    let verdict = verdict_from_min(
        cert.min_value,
        cert.minimizing_set,
        tol,
        MembershipMethod::Sfm,
    );
    Ok((verdict, cert))
}

/// Membership with automatic method selection: the equal-power shortcut
/// when powers are equal, exhaustive enumeration up to the default cap,
/// and submodular minimization beyond it.
pub fn check_feasibility(cfg: &ChannelConfig, rates: &RateVector) -> Result<FeasibilityVerdict> {
    check_dims(cfg, rates)?;
    cfg.validate()?;
    if cfg.has_equal_powers() {
        check_feasibility_equal_power(cfg, rates)
    } else if cfg.user_count() <= DEFAULT_SUBSET_CAP {
        check_feasibility_bruteforce(cfg, rates)
    } else {
        check_feasibility_sfm(cfg, rates)
    }
}
