//! M/G/1 sojourn-time analysis and required-rate sizing.
//!
//! The mean sojourn time of an M/G/1 queue with Poisson arrival rate
//! `lambda`, mean service rate `R`, and service-time coefficient of
//! variation `c_b` is
//!
//! ```text
//! tau = 1/R + (lambda/R^2) (1 + c_b^2) / (2 (1 - lambda/R))
//! ```
//!
//! Inverting for `R` at a target sojourn time gives
//!
//! ```text
//! R = ((lambda tau + 1) + sqrt(lambda^2 tau^2 + 2 lambda tau c_b^2 + 1)) / (2 tau)
//! ```
//!
//! which is strictly increasing in `c_b`, so the deterministic-service
//! (M/D/1, `c_b = 0`) rate is the smallest service rate meeting the bound.
//! [`required_rate`] is that minimum; it always exceeds `lambda`, so
//! stability never needs a separate check.
//!
//! Packet length is normalized to one bit: arrival rates are packets/s and
//! numerically bits/s, service rates are bits/s.

use crate::capacity::RateVector;
use crate::error::{ensure_nonnegative, ensure_positive};
use crate::{Error, Result};

/// One user's Poisson arrival rate and mean sojourn-time bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserDemand {
    /// Poisson packet arrival rate, packets/s (numerically bits/s).
    pub arrival_rate: f64,
    /// Required mean sojourn time, seconds.
    pub delay_bound: f64,
}

impl UserDemand {
    pub fn new(arrival_rate: f64, delay_bound: f64) -> Result<Self> {
        let demand = UserDemand {
            arrival_rate,
            delay_bound,
        };
        demand.validate()?;
        Ok(demand)
    }

    /// Both fields must be positive and finite. A zero arrival rate is
    /// rejected rather than treated as a limit.
    pub fn validate(&self) -> Result<()> {
        ensure_positive(self.arrival_rate, "arrival rate")?;
        ensure_positive(self.delay_bound, "delay bound")?;
        Ok(())
    }
}

/// A service process: mean rate plus coefficient of variation of the
/// service time (`c_b = 0` is deterministic service, i.e. M/D/1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServiceSpec {
    /// Mean service rate, bits/s.
    pub mean_rate: f64,
    /// Coefficient of variation of the service time, dimensionless.
    pub cv_service_time: f64,
}

impl ServiceSpec {
    pub fn new(mean_rate: f64, cv_service_time: f64) -> Result<Self> {
        let spec = ServiceSpec {
            mean_rate,
            cv_service_time,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive(self.mean_rate, "mean service rate")?;
        ensure_nonnegative(
            self.cv_service_time,
            "service-time coefficient of variation",
        )?;
        Ok(())
    }
}

/// Mean sojourn time of an M/G/1 queue (Pollaczek-Khinchine plus Little's
/// law), in seconds.
///
/// Requires `arrival_rate < spec.mean_rate`; at or above that the queue is
/// unstable and the sojourn time diverges.
pub fn sojourn_time(spec: &ServiceSpec, arrival_rate: f64) -> Result<f64> {
    spec.validate()?;
    ensure_positive(arrival_rate, "arrival rate")?;
    if arrival_rate >= spec.mean_rate {
        return Err(Error::UnstableQueue {
            arrival_rate,
            service_rate: spec.mean_rate,
        });
    }
    let rate = spec.mean_rate;
    let cv2 = spec.cv_service_time * spec.cv_service_time;
    let utilization = arrival_rate / rate;
    Ok(1.0 / rate + (arrival_rate / (rate * rate)) * (1.0 + cv2) / (2.0 * (1.0 - utilization)))
}

/// Mean service rate (bits/s) at which an M/G/1 queue with the given
/// service-time coefficient of variation meets the demand's sojourn bound
/// exactly.
pub fn required_rate_general(demand: &UserDemand, cv_service_time: f64) -> Result<f64> {
    demand.validate()?;
    ensure_nonnegative(cv_service_time, "service-time coefficient of variation")?;
    let lt = demand.arrival_rate * demand.delay_bound;
    let cv2 = cv_service_time * cv_service_time;
    let discriminant = lt * lt + 2.0 * lt * cv2 + 1.0;
    Ok(((lt + 1.0) + discriminant.sqrt()) / (2.0 * demand.delay_bound))
}

/// Minimum mean service rate (bits/s) meeting the demand's sojourn bound:
/// the M/D/1 rate, i.e. [`required_rate_general`] at `c_b = 0`.
///
/// The result always exceeds `demand.arrival_rate`, so the queue it
/// implies is automatically stable.
pub fn required_rate(demand: &UserDemand) -> Result<f64> {
    required_rate_general(demand, 0.0)
}

/// Element-wise [`required_rate`] over a list of demands, order-preserving.
pub fn required_rate_vector(demands: &[UserDemand]) -> Result<RateVector> {
    if demands.is_empty() {
        return Err(Error::Domain("demand list is empty".to_string()));
    }
    let rates = demands
        .iter()
        .enumerate()
        .map(|(index, demand)| required_rate(demand).map_err(|e| e.for_user(index)))
        .collect::<Result<Vec<f64>>>()?;
    RateVector::new(rates)
}
