//! Minimum sum power and explicit power allocations.
//!
//! Viewed from the power side, a rate vector `R` is supportable exactly
//! when `P(S) >= (2^(R(S)/W) - 1) N0 W` for every subset `S`. Summing over
//! the full set gives the hard floor
//!
//! ```text
//! sum P_i >= (2^(sum R_i / W) - 1) N0 W
//! ```
//!
//! and that floor is achievable: splitting any sum power at or above it in
//! proportion to `2^(R_j/W) - 1` satisfies every subset inequality. So the
//! threshold is both necessary and sufficient, and the proportional split
//! at the threshold itself is the minimum-sum-power allocation, which puts
//! the rate vector on a face of the resulting capacity region.

use crate::capacity::{self, ChannelConfig, FeasibilityVerdict, RateVector};
use crate::error::ensure_positive;
use crate::{Error, Result};

/// Which rule produced an [`AllocationResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AllocationMode {
    /// Proportional split of the Lemma-3 minimum sum power.
    OptimalMinSum,
    /// Proportional split of a caller-supplied sum power.
    FixedSum,
}

/// A power allocation together with the threshold it was checked against.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationResult {
    /// Per-user transmit powers, W.
    pub powers: Vec<f64>,
    /// Total allocated power, W. Equals `threshold` in optimal mode.
    pub sum_power: f64,
    pub mode: AllocationMode,
    /// Minimum feasible sum power for the rate vector, W.
    pub threshold: f64,
}

fn validate_channel(bandwidth: f64, noise_density: f64) -> Result<()> {
    ensure_positive(bandwidth, "bandwidth")?;
    ensure_positive(noise_density, "noise density")?;
    Ok(())
}

/// The minimum sum power able to support `rates`:
/// `(2^(sum R_i / W) - 1) N0 W`.
pub fn min_sum_power(rates: &RateVector, bandwidth: f64, noise_density: f64) -> Result<f64> {
    validate_channel(bandwidth, noise_density)?;
    Ok(((rates.sum() / bandwidth).exp2() - 1.0) * noise_density * bandwidth)
}

/// Per-user weights `2^(R_j/W) - 1`; zero-rate users weigh zero and so
/// receive zero power from either allocation rule.
fn rate_weights(rates: &RateVector, bandwidth: f64) -> Result<(Vec<f64>, f64)> {
    let weights: Vec<f64> = rates
        .as_slice()
        .iter()
        .map(|r| (r / bandwidth).exp2() - 1.0)
        .collect();
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::Domain(
            "all rates are zero; no power split is defined".to_string(),
        ));
    }
    Ok((weights, total))
}

fn proportional_split(weights: &[f64], total_weight: f64, sum_power: f64) -> Vec<f64> {
    weights
        .iter()
        .map(|w| w / total_weight * sum_power)
        .collect()
}

/// The minimum-sum-power allocation:
/// `P_j = (2^(R_j/W) - 1) (2^(sum R_i / W) - 1) N0 W / sum_i (2^(R_i/W) - 1)`.
///
/// Its total equals [`min_sum_power`] identically, and every subset power
/// inequality holds, with equality on the full set.
pub fn allocate_optimal(
    rates: &RateVector,
    bandwidth: f64,
    noise_density: f64,
) -> Result<AllocationResult> {
    let threshold = min_sum_power(rates, bandwidth, noise_density)?;
    let (weights, total_weight) = rate_weights(rates, bandwidth)?;
    Ok(AllocationResult {
        powers: proportional_split(&weights, total_weight, threshold),
        sum_power: threshold,
        mode: AllocationMode::OptimalMinSum,
        threshold,
    })
}

/// Redistributes a fixed sum power proportionally to `2^(R_j/W) - 1`.
///
/// Feasible for every `sum_power` at or above the threshold; below it the
/// call fails with the threshold attached, since no split of that sum can
/// support the rates.
pub fn allocate_fixed_sum(
    rates: &RateVector,
    bandwidth: f64,
    noise_density: f64,
    sum_power: f64,
) -> Result<AllocationResult> {
    let threshold = min_sum_power(rates, bandwidth, noise_density)?;
    if !sum_power.is_finite() || sum_power < threshold {
        return Err(Error::BelowThreshold {
            sum_power,
            threshold,
        });
    }
    let (weights, total_weight) = rate_weights(rates, bandwidth)?;
    Ok(AllocationResult {
        powers: proportional_split(&weights, total_weight, sum_power),
        sum_power,
        mode: AllocationMode::FixedSum,
        threshold,
    })
}

/// Tests whether given powers support the rates, by capacity-region
/// membership of the rates under the implied channel. Equivalent to
/// checking `P(S) >= (2^(R(S)/W) - 1) N0 W` for every `S`.
pub fn verify_power_feasibility(
    powers: &[f64],
    rates: &RateVector,
    bandwidth: f64,
    noise_density: f64,
) -> Result<FeasibilityVerdict> {
    if powers.len() != rates.len() {
        return Err(Error::DimensionMismatch {
            left: powers.len(),
            right: rates.len(),
        });
    }
    let cfg = ChannelConfig::new(bandwidth, noise_density, powers.to_vec())?;
    capacity::check_feasibility(&cfg, rates)
}

#[cfg(test)]
mod tests {
    use super::*;

    const W: f64 = 2e5;
    const N0: f64 = 3e-7;

    fn assert_rel(actual: f64, expected: f64, rel: f64) {
        let err = (actual - expected).abs() / expected.abs().max(f64::MIN_POSITIVE);
        assert!(
            err <= rel,
            "expected {expected}, got {actual} (relative error {err:e} > {rel:e})"
        );
    }

    fn two_user_rates() -> RateVector {
        RateVector::new(vec![125401.27998689307, 50301.79993520467]).unwrap()
    }

    fn three_user_rates() -> RateVector {
        RateVector::new(vec![
            43942.89226042013,
            33768.896695650066,
            146465.5632739253,
        ])
        .unwrap()
    }

    #[test]
    fn min_sum_power_matches_two_user_example() {
        let p = min_sum_power(&two_user_rates(), W, N0).unwrap();
        assert_rel(p, 0.0503, 5e-3);
        assert_rel(p, 0.05030894660622762, 1e-12);
    }

    #[test]
    fn min_sum_power_trivial_cases() {
        assert_eq!(min_sum_power(&RateVector::zero(3), W, N0).unwrap(), 0.0);
        let single = RateVector::new(vec![1e5]).unwrap();
        let p = min_sum_power(&single, W, N0).unwrap();
        assert_rel(p, (1e5 / W).exp2() * N0 * W - N0 * W, 1e-12);
        assert_rel(p, 0.024852813742385706, 1e-12);
    }

    #[test]
    fn optimal_allocation_matches_two_user_example() {
        let alloc = allocate_optimal(&two_user_rates(), W, N0).unwrap();
        assert_rel(alloc.powers[0], 0.0372, 5e-3);
        assert_rel(alloc.powers[1], 0.0131, 5e-3);
        assert_eq!(alloc.mode, AllocationMode::OptimalMinSum);
        assert_eq!(alloc.sum_power, alloc.threshold);
        let total: f64 = alloc.powers.iter().sum();
        assert_rel(total, alloc.threshold, 1e-12);
    }

    #[test]
    fn optimal_allocation_matches_three_user_example() {
        let alloc = allocate_optimal(&three_user_rates(), W, N0).unwrap();
        let expected = [0.0122, 0.0092, 0.0491];
        for (got, want) in alloc.powers.iter().zip(expected) {
            assert_rel(*got, want, 5e-3);
        }
    }

    #[test]
    fn equal_rates_get_equal_powers() {
        let rates = RateVector::new(vec![4e4, 4e4]).unwrap();
        let alloc = allocate_optimal(&rates, W, N0).unwrap();
        assert_eq!(alloc.powers[0], alloc.powers[1]);
    }

    #[test]
    fn all_zero_rates_cannot_be_split() {
        assert!(matches!(
            allocate_optimal(&RateVector::zero(2), W, N0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn fixed_sum_matches_two_user_example() {
        let alloc = allocate_fixed_sum(&two_user_rates(), W, N0, 0.06).unwrap();
        assert_rel(alloc.powers[0], 0.0444, 5e-3);
        assert_rel(alloc.powers[1], 0.0156, 5e-3);
        assert_rel(alloc.sum_power, 0.06, 1e-12);
        assert_eq!(alloc.mode, AllocationMode::FixedSum);
    }

    #[test]
    fn fixed_sum_matches_three_user_example() {
        let alloc = allocate_fixed_sum(&three_user_rates(), W, N0, 1.0559).unwrap();
        let expected = [0.1828, 0.1380, 0.7351];
        for (got, want) in alloc.powers.iter().zip(expected) {
            assert_rel(*got, want, 5e-3);
        }
    }

    #[test]
    fn fixed_sum_below_threshold_is_rejected_with_the_threshold() {
        let rates = two_user_rates();
        let threshold = min_sum_power(&rates, W, N0).unwrap();
        match allocate_fixed_sum(&rates, W, N0, 0.04) {
            Err(Error::BelowThreshold {
                sum_power,
                threshold: reported,
            }) => {
                assert_eq!(sum_power, 0.04);
                assert_eq!(reported, threshold);
            }
            other => panic!("expected below-threshold error, got {other:?}"),
        }
    }

    #[test]
    fn fixed_sum_at_threshold_equals_optimal() {
        let rates = three_user_rates();
        let optimal = allocate_optimal(&rates, W, N0).unwrap();
        let fixed = allocate_fixed_sum(&rates, W, N0, optimal.threshold).unwrap();
        for (a, b) in optimal.powers.iter().zip(&fixed.powers) {
            assert_rel(*a, *b, 1e-12);
        }
    }

    #[test]
    fn verification_flags_the_original_two_user_powers() {
        let verdict = verify_power_feasibility(&[0.020, 0.040], &two_user_rates(), W, N0).unwrap();
        assert!(!verdict.feasible);
    }

    #[test]
    fn verification_accepts_the_optimal_allocation_on_the_boundary() {
        let alloc = allocate_optimal(&two_user_rates(), W, N0).unwrap();
        let verdict = verify_power_feasibility(&alloc.powers, &two_user_rates(), W, N0).unwrap();
        assert!(verdict.feasible);
        assert!(verdict.min_gap.abs() <= 1e-9 * W);
    }

    #[test]
    fn verification_trivial_and_error_paths() {
        let zero_rates = RateVector::zero(2);
        let verdict = verify_power_feasibility(&[0.0, 0.0], &zero_rates, W, N0).unwrap();
        assert!(verdict.feasible);
        assert!(matches!(
            verify_power_feasibility(&[0.1], &zero_rates, W, N0),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
