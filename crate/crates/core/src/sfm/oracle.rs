//! Set-function oracle abstraction and the memoizing wrapper used by the
//! minimizer.

use std::cell::RefCell;
use std::collections::HashMap;

use crate::capacity::SubsetMask;

/// A real-valued set function on the ground set `{0, ..., ground_size-1}`.
///
/// The minimizer requires `eval(empty) = 0` (normalization) and
/// submodularity: `f(S) + f(T) >= f(S u T) + f(S n T)` for all `S`, `T`.
/// Submodularity is assumed, not enforced; enable
/// [`SfmOptions::check_oracle`](crate::sfm::SfmOptions) for randomized
/// spot checks.
pub trait SubmodularFn {
    fn ground_size(&self) -> usize;
    fn eval(&self, s: SubsetMask) -> f64;
}

impl<F: SubmodularFn + ?Sized> SubmodularFn for &F {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn eval(&self, s: SubsetMask) -> f64 {
        (**self).eval(s)
    }
}

/// Entries kept in the memo table before insertion stops. Lookups of
/// uncached sets still work, they just re-evaluate.
const DEFAULT_CACHE_CAP: usize = 1 << 20;

/// Memoizing wrapper around a [`SubmodularFn`].
///
/// The scaling framework re-queries prefix sets heavily, so values are
/// cached by bitmask. The wrapper also tracks the smallest value seen and
/// the set achieving it, which is how the minimizer collects candidate
/// minimizers, plus the largest magnitude seen (the scale `M`).
///
/// Interior mutability keeps this usable through `&self`; it is
/// single-thread only, matching the solver's concurrency contract.
pub struct CachedOracle<'f, F: ?Sized> {
    inner: &'f F,
    cache_cap: usize,
    state: RefCell<CacheState>,
}

struct CacheState {
    cache: HashMap<u64, f64>,
    distinct: u64,
    queries: u64,
    best_value: f64,
    best_set: SubsetMask,
    max_abs: f64,
}

impl<'f, F: SubmodularFn + ?Sized> CachedOracle<'f, F> {
    pub fn new(inner: &'f F) -> Self {
        Self::with_cache_cap(inner, DEFAULT_CACHE_CAP)
    }

    pub fn with_cache_cap(inner: &'f F, cache_cap: usize) -> Self {
        CachedOracle {
            inner,
            cache_cap,
            state: RefCell::new(CacheState {
                cache: HashMap::new(),
                distinct: 0,
                queries: 0,
                best_value: f64::INFINITY,
                best_set: SubsetMask::EMPTY,
                max_abs: 0.0,
            }),
        }
    }

    /// Distinct sets evaluated on the wrapped function (cache misses).
    pub fn distinct_evals(&self) -> u64 {
        self.state.borrow().distinct
    }

    /// Total queries including cache hits.
    pub fn total_queries(&self) -> u64 {
        self.state.borrow().queries
    }

    /// Smallest value observed so far and the first set that achieved it.
    pub fn best_observed(&self) -> (f64, SubsetMask) {
        let state = self.state.borrow();
        (state.best_value, state.best_set)
    }

    /// Largest `|f(S)|` observed so far.
    pub fn max_abs_value(&self) -> f64 {
        self.state.borrow().max_abs
    }
}

impl<F: SubmodularFn + ?Sized> SubmodularFn for CachedOracle<'_, F> {
    fn ground_size(&self) -> usize {
        self.inner.ground_size()
    }

    fn eval(&self, s: SubsetMask) -> f64 {
        {
            let mut state = self.state.borrow_mut();
            state.queries += 1;
            if let Some(&value) = state.cache.get(&s.bits()) {
                return value;
            }
        }
        let value = self.inner.eval(s);
        let mut state = self.state.borrow_mut();
        state.distinct += 1;
        if value < state.best_value {
            state.best_value = value;
            state.best_set = s;
        }
        state.max_abs = state.max_abs.max(value.abs());
        if state.cache.len() < self.cache_cap {
            state.cache.insert(s.bits(), value);
        }
        value
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Cardinality(usize);

    impl SubmodularFn for Cardinality {
        fn ground_size(&self) -> usize {
            self.0
        }
        fn eval(&self, s: SubsetMask) -> f64 {
            s.len() as f64 - 2.0
        }
    }

    #[test]
    fn caches_and_counts_distinct_evaluations() {
        let f = Cardinality(4);
        let oracle = CachedOracle::new(&f);
        let a = SubsetMask::from_bits(0b0011);
        assert_eq!(oracle.eval(a), 0.0);
        assert_eq!(oracle.eval(a), 0.0);
        assert_eq!(oracle.eval(SubsetMask::EMPTY), -2.0);
        assert_eq!(oracle.distinct_evals(), 2);
        assert_eq!(oracle.total_queries(), 3);
    }

    #[test]
    fn tracks_first_best_and_scale() {
        let f = Cardinality(4);
        let oracle = CachedOracle::new(&f);
        oracle.eval(SubsetMask::from_bits(0b1111));
        oracle.eval(SubsetMask::EMPTY);
        oracle.eval(SubsetMask::from_bits(0b1));
        let (value, set) = oracle.best_observed();
        assert_eq!(value, -2.0);
        assert_eq!(set, SubsetMask::EMPTY);
        assert_eq!(oracle.max_abs_value(), 2.0);
    }

    #[test]
    fn cache_cap_disables_insertion_not_evaluation() {
        let f = Cardinality(4);
        let oracle = CachedOracle::with_cache_cap(&f, 1);
        oracle.eval(SubsetMask::from_bits(0b1));
        oracle.eval(SubsetMask::from_bits(0b10));
        oracle.eval(SubsetMask::from_bits(0b10));
        // Second distinct set no longer fits the cache, so the repeat
        // evaluates again.
        assert_eq!(oracle.distinct_evals(), 3);
    }
}
