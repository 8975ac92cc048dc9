use crate::capacity::SubsetMask;

/// Errors shared by all modules of this crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An input violates a domain constraint (non-positive rate, negative
    /// power, non-finite value, ...).
    #[error("invalid input: {0}")]
    Domain(String),

    /// The M/G/1 queue has no finite sojourn time because the arrival rate
    /// reaches or exceeds the service rate.
    #[error("unstable queue: arrival rate {arrival_rate} >= service rate {service_rate}")]
    UnstableQueue {
        arrival_rate: f64,
        service_rate: f64,
    },

    /// A per-user error with the offending user's zero-based index attached.
    #[error("user {index}: {source}")]
    User {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    /// Two containers that must describe the same users have different lengths.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// The exhaustive 2^N - 1 scan was requested for more users than the cap allows.
    #[error("{user_count} users exceed the exhaustive-check cap of {cap}")]
    SubsetCapExceeded { user_count: usize, cap: usize },

    /// The equal-power shortcut was requested but the powers differ.
    #[error("transmit powers are not equal within relative {tolerance:e}")]
    UnequalPowers { tolerance: f64 },

    /// A fixed-sum reallocation was requested below the Lemma-3 minimum;
    /// no split of this sum power can make the rates feasible.
    #[error("sum power {sum_power} W is below the feasibility threshold {threshold} W")]
    BelowThreshold { sum_power: f64, threshold: f64 },

    /// The set-function oracle does not satisfy f(empty) = 0.
    #[error("oracle is not normalized: f(empty set) = {value}")]
    NotNormalized { value: f64 },

    /// A submodularity spot-check failed: f(S) + f(T) < f(S u T) + f(S n T).
    #[error("submodularity violated on S={s}, T={t} by {violation:e}")]
    NotSubmodular {
        s: SubsetMask,
        t: SubsetMask,
        violation: f64,
    },

    /// `u` does not immediately succeed `v` in the linear ordering.
    #[error("element {u} does not immediately succeed {v} in the ordering")]
    NotAdjacent { u: usize, v: usize },

    /// A convex combination of extreme bases fails its own invariants.
    #[error("inconsistent convex combination: {0}")]
    InconsistentCombination(String),

    /// The minimizer exceeded its defensive step budget, which indicates a
    /// non-submodular oracle or a pathological epsilon.
    #[error("step budget of {budget} exceeded after {phases} scaling phases")]
    StepBudgetExceeded { budget: u64, phases: u32 },
}

impl Error {
    /// Wraps an error with the index of the user it concerns.
    pub fn for_user(self, index: usize) -> Error {
        Error::User {
            index,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_positive(value: f64, what: &str) -> Result<()> {
    if !value.is_finite() || value <= 0.0 {
        return Err(Error::Domain(format!(
            "{what} must be positive, got {value}"
        )));
    }
    Ok(())
}

pub(crate) fn ensure_nonnegative(value: f64, what: &str) -> Result<()> {
    if !value.is_finite() || value < 0.0 {
        return Err(Error::Domain(format!(
            "{what} must be nonnegative, got {value}"
        )));
    }
    Ok(())
}
