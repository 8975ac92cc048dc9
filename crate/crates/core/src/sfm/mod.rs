//! Combinatorial polynomial-time submodular function minimization.
//!
//! Finds `min_S f(S)` for a normalized submodular oracle by the
//! delta-scaling framework: maintain a point `x` of the base polyhedron
//! `B(f)` as a convex combination of extreme bases, plus a delta-feasible
//! flow `phi` on the complete digraph over the ground set, and drive
//! `z = x + d(phi)` toward nonnegativity. Each scaling phase moves flow
//! from the deficit vertices `C = {z <= -delta}` to the surplus vertices
//! `D = {z >= +delta}` along zero-flow arcs, using Double-Exchange steps
//! to open arcs when no augmenting path exists, then halves `delta`.
//! By the duality
//!
//! ```text
//! max { x^-(E) : x in B(f) } = min { f(S) : S subseteq E }
//! ```
//!
//! `x^-(E)` is a certified lower bound on the minimum at every step, and
//! when `delta` falls below `epsilon / N^2` the candidate sets harvested
//! along the way bracket the minimum to within `epsilon`. Total work is
//! bounded by `O(N^5 log(M / epsilon))` oracle steps, where `M` is the
//! largest function magnitude.
//!
//! The function values here are reals, not integers, so the classical
//! `delta >= 1/N^2` stopping rule is replaced by the configurable
//! `epsilon`; see [`SfmOptions`]. Callers that only need the sign of the
//! minimum (capacity-region membership) can set a decision threshold to
//! stop as soon as the sign is certified either way.

mod base;
mod flow;
mod oracle;

pub use base::{exchange_capacity, extreme_base, reduce, ExtremeBase, LinearOrdering};
pub use flow::FlowState;
pub use oracle::{CachedOracle, SubmodularFn};

use crate::capacity::SubsetMask;
use crate::{Error, Result};

/// Tuning knobs for [`minimize`].
#[derive(Debug, Clone)]
pub struct SfmOptions {
    /// Absolute accuracy of the reported minimum, in the oracle's units.
    /// The scaling loop stops once `delta < epsilon / N^2`.
    pub epsilon: f64,
    /// When set, stop early once the minimum is certified `> -t` (the dual
    /// bound rises above `-t`) or `< -t` (a set with a smaller value was
    /// observed). `min_value` remains an upper bound on the true minimum
    /// but may be looser than `epsilon` when this fires.
    pub decision_threshold: Option<f64>,
    /// Spot-check normalization and submodularity on pseudo-random subset
    /// pairs before solving. Inflates the reported oracle-call count.
    pub check_oracle: bool,
    /// Hard cap on Double-Exchange plus augmentation steps. `None` derives
    /// a defensive bound from `N^5 log2(delta_init / delta_min)`.
    pub step_budget: Option<u64>,
}

impl Default for SfmOptions {
    fn default() -> Self {
        SfmOptions {
            epsilon: 1e-9,
            decision_threshold: None,
            check_oracle: false,
            step_budget: None,
        }
    }
}

/// Result of a minimization: the minimum, a set achieving it, and the dual
/// certificate.
#[derive(Debug, Clone)]
pub struct SfmCertificate {
    /// Smallest `f(S)` observed; within `epsilon` of the true minimum on
    /// a full run.
    pub min_value: f64,
    /// The first set observed to achieve `min_value`.
    pub minimizing_set: SubsetMask,
    /// The final base-polyhedron point `x` (so `x(E) = f(E)`).
    pub base: Vec<f64>,
    /// Convex-combination decomposition of `base` into extreme bases with
    /// their orderings; coefficients sum to 1.
    pub combination: Vec<ExtremeBase>,
    /// `x^-(E)`, a certified lower bound on `min_S f(S)`.
    pub dual_bound: f64,
    /// Distinct sets evaluated on the oracle.
    pub oracle_calls: u64,
    pub phases: u32,
    pub exchanges: u64,
    pub augmentations: u64,
}

/// Read-only snapshot of solver state handed to [`SfmObserver`] callbacks.
pub struct SfmView<'a> {
    pub x: &'a [f64],
    pub flow: &'a FlowState,
    pub combination: &'a [ExtremeBase],
}

impl SfmView<'_> {
    /// `z(v) = x(v) + d(phi)(v)`.
    pub fn z(&self, v: usize) -> f64 {
        self.x[v] + self.flow.boundary(v)
    }

    pub fn z_vector(&self) -> Vec<f64> {
        (0..self.x.len()).map(|v| self.z(v)).collect()
    }
}

/// Instrumentation hooks; every callback observes the state after the
/// named event. The default implementations do nothing.
pub trait SfmObserver {
    fn on_phase_start(&mut self, _view: &SfmView<'_>) {}
    /// After a Double-Exchange. `alpha` is the applied step and `split`
    /// whether a new index was created; `z` is unchanged by this event.
    fn on_exchange(&mut self, _view: &SfmView<'_>, _alpha: f64, _split: bool) {}
    fn on_augment(&mut self, _view: &SfmView<'_>) {}
    fn on_reduce(&mut self, _view: &SfmView<'_>) {}
}

/// Observer that ignores every event.
pub struct NoopObserver;

impl SfmObserver for NoopObserver {}

/// Minimizes a normalized submodular function. See the module docs.
pub fn minimize<F: SubmodularFn + ?Sized>(f: &F, opts: &SfmOptions) -> Result<SfmCertificate> {
    minimize_observed(f, opts, &mut NoopObserver)
}

/// [`minimize`] with instrumentation callbacks.
pub fn minimize_observed<F, O>(f: &F, opts: &SfmOptions, observer: &mut O) -> Result<SfmCertificate>
where
    F: SubmodularFn + ?Sized,
    O: SfmObserver,
{
    let n = f.ground_size();
    if n == 0 || n >= 64 {
        return Err(Error::Domain(format!(
            "ground set size {n} is outside the supported range 1..=63"
        )));
    }
    if opts.epsilon.is_nan() || opts.epsilon <= 0.0 {
        return Err(Error::Domain(format!(
            "epsilon must be positive, got {}",
            opts.epsilon
        )));
    }

    let oracle = CachedOracle::new(f);
    let f_empty = oracle.eval(SubsetMask::EMPTY);
    if f_empty.abs() > 1e-9 {
        return Err(Error::NotNormalized { value: f_empty });
    }
    if opts.check_oracle {
        spot_check_submodularity(&oracle, n)?;
    }
    // Known from the start; also seeds the candidate tracker with E.
    oracle.eval(SubsetMask::full(n));

    let initial = extreme_base(&oracle, LinearOrdering::identity(n));
    let x = initial.vector.clone();
    let (x_neg, x_pos) = split_sums(&x);
    let delta_init = (-x_neg).min(x_pos) / (n * n) as f64;
    let delta_min = opts.epsilon / (n * n) as f64;

    let budget = opts.step_budget.unwrap_or_else(|| {
        let phase_bound = (delta_init / delta_min).max(1.0).log2().ceil() as u64 + 2;
        16u64
            .saturating_mul((n as u64).pow(5))
            .saturating_mul(phase_bound)
            + 4096
    });

    let mut solver = Solver {
        oracle: &oracle,
        observer,
        n,
        x,
        combination: vec![initial],
        flow: FlowState::new(n, delta_init),
        decision_threshold: opts.decision_threshold,
        splits_since_reduce: false,
        steps: 0,
        budget,
        phases: 0,
        exchanges: 0,
        augmentations: 0,
    };

    while solver.flow.delta() >= delta_min {
        if solver.decision_reached() {
            break;
        }
        solver.phases += 1;
        solver.observer.on_phase_start(&SfmView {
            x: &solver.x,
            flow: &solver.flow,
            combination: &solver.combination,
        });
        solver.run_phase()?;
        solver.harvest_candidates();
        if solver.decision_reached() {
            break;
        }
        solver.flow.halve();
    }

    let (min_value, minimizing_set) = oracle.best_observed();
    let dual_bound = split_sums(&solver.x).0;
    Ok(SfmCertificate {
        min_value,
        minimizing_set,
        base: solver.x,
        combination: solver.combination,
        dual_bound,
        oracle_calls: oracle.distinct_evals(),
        phases: solver.phases,
        exchanges: solver.exchanges,
        augmentations: solver.augmentations,
    })
}

/// `(x^-(E), x^+(E))`.
fn split_sums(x: &[f64]) -> (f64, f64) {
    let mut neg = 0.0;
    let mut pos = 0.0;
    for &value in x {
        if value < 0.0 {
            neg += value;
        } else {
            pos += value;
        }
    }
    (neg, pos)
}

struct Solver<'a, F: ?Sized, O> {
    oracle: &'a CachedOracle<'a, F>,
    observer: &'a mut O,
    n: usize,
    x: Vec<f64>,
    combination: Vec<ExtremeBase>,
    flow: FlowState,
    decision_threshold: Option<f64>,
    splits_since_reduce: bool,
    steps: u64,
    budget: u64,
    phases: u32,
    exchanges: u64,
    augmentations: u64,
}

impl<F: SubmodularFn + ?Sized, O: SfmObserver> Solver<'_, F, O> {
    fn z(&self, v: usize) -> f64 {
        self.x[v] + self.flow.boundary(v)
    }

    fn compute_cd(&self) -> (SubsetMask, SubsetMask) {
        let delta = self.flow.delta();
        let mut c = SubsetMask::EMPTY;
        let mut d = SubsetMask::EMPTY;
        for v in 0..self.n {
            let z = self.z(v);
            if z <= -delta {
                c = c.with(v);
            } else if z >= delta {
                d = d.with(v);
            }
        }
        (c, d)
    }

    /// One delta-scaling phase: augment from C to D whenever a zero-arc
    /// path exists, opening arcs with Double-Exchange otherwise, until
    /// neither is possible.
    fn run_phase(&mut self) -> Result<()> {
        loop {
            let (c, d) = self.compute_cd();
            if c.is_empty() {
                // B would be empty: no active triple and no path.
                return Ok(());
            }
            let mut b = self.flow.reachable_from(c);
            while (b & d).is_empty() {
                let Some((i, u, v)) = self.find_active_triple(b) else {
                    break;
                };
                self.double_exchange(i, u, v, &mut b)?;
            }
            if (b & d).is_empty() {
                // No augmenting path and no active triple: the phase ends.
                self.apply_reduce()?;
                return Ok(());
            }
            let path = self
                .flow
                .shortest_zero_path(c, d)
                .expect("B intersects D, so a zero-arc path exists");
            self.charge_step()?;
            self.flow.augment(&path);
            self.augmentations += 1;
            self.observer.on_augment(&SfmView {
                x: &self.x,
                flow: &self.flow,
                combination: &self.combination,
            });
            self.apply_reduce()?;
        }
    }

    /// First active triple `(i, u, v)`: scan bases in combination order,
    /// positions left to right; active means `u` immediately succeeds `v`
    /// with `u` reachable and `v` not.
    fn find_active_triple(&self, b: SubsetMask) -> Option<(usize, usize, usize)> {
        for (i, eb) in self.combination.iter().enumerate() {
            let seq = eb.ordering.as_slice();
            for p in 1..seq.len() {
                let (v, u) = (seq[p - 1], seq[p]);
                if b.contains(u) && !b.contains(v) {
                    return Some((i, u, v));
                }
            }
        }
        None
    }

    /// Double-Exchange on an active triple: transfer up to
    /// `min(phi(u, v), lambda_i c~)` of mass from `v` to `u` in `x`,
    /// remove the same amount of flow from the arc, and move base `i`
    /// toward the swapped ordering, splitting it when the arc empties
    /// first. `z = x + d(phi)` is unchanged.
    fn double_exchange(&mut self, i: usize, u: usize, v: usize, b: &mut SubsetMask) -> Result<()> {
        self.charge_step()?;
        let cap = exchange_capacity(self.oracle, &self.combination[i], u, v)?.max(0.0);
        let lambda = self.combination[i].coefficient;
        let phi_uv = self.flow.get(u, v);
        let alpha = (lambda * cap).min(phi_uv);

        self.x[u] += alpha;
        self.x[v] -= alpha;
        if phi_uv <= lambda * cap {
            self.flow.zero_arc(u, v);
        } else {
            self.flow.subtract(u, v, alpha);
        }

        let split = alpha < lambda * cap;
        if split {
            // The arc emptied first: keep a copy of the old base with the
            // leftover weight, and move only alpha / cap of it.
            let kept = alpha / cap;
            let mut leftover = self.combination[i].clone();
            leftover.coefficient = lambda - kept;
            self.combination[i].coefficient = kept;
            self.combination.push(leftover);
            self.splits_since_reduce = true;
        }
        self.combination[i].apply_exchange(u, v, cap);
        self.exchanges += 1;

        if self.flow.get(u, v) == 0.0 {
            *b = *b | self.flow.reachable_from(SubsetMask::singleton(v));
        }
        self.observer.on_exchange(
            &SfmView {
                x: &self.x,
                flow: &self.flow,
                combination: &self.combination,
            },
            alpha,
            split,
        );
        Ok(())
    }

    /// Runs Reduce when splits may have grown the combination since the
    /// last pass; otherwise the bases are already affinely independent and
    /// the pass would verify that at full cost for nothing.
    fn apply_reduce(&mut self) -> Result<()> {
        if !self.splits_since_reduce && self.combination.len() <= self.n + 1 {
            return Ok(());
        }
        reduce(&mut self.combination)?;
        self.splits_since_reduce = false;
        self.observer.on_reduce(&SfmView {
            x: &self.x,
            flow: &self.flow,
            combination: &self.combination,
        });
        Ok(())
    }

    fn charge_step(&mut self) -> Result<()> {
        self.steps += 1;
        if self.steps > self.budget {
            return Err(Error::StepBudgetExceeded {
                budget: self.budget,
                phases: self.phases,
            });
        }
        Ok(())
    }

    /// Evaluates the candidate minimizers implied by the current state so
    /// the oracle's best-observed tracker sees them: the reachable set B,
    /// the negative support of x, and the negative support of z.
    fn harvest_candidates(&self) {
        let (c, _) = self.compute_cd();
        let b = self.flow.reachable_from(c);
        self.oracle.eval(b);
        let mut neg_x = SubsetMask::EMPTY;
        let mut neg_z = SubsetMask::EMPTY;
        for v in 0..self.n {
            if self.x[v] < 0.0 {
                neg_x = neg_x.with(v);
            }
            if self.z(v) < 0.0 {
                neg_z = neg_z.with(v);
            }
        }
        self.oracle.eval(neg_x);
        self.oracle.eval(neg_z);
    }

    /// With a decision threshold `t`: the minimum is certified `> -t` once
    /// the dual bound exceeds `-t`, and `< -t` once any observed set goes
    /// below `-t`.
    fn decision_reached(&self) -> bool {
        let Some(t) = self.decision_threshold else {
            return false;
        };
        let (x_neg, _) = split_sums(&self.x);
        if x_neg > -t {
            return true;
        }
        let (best, _) = self.oracle.best_observed();
        best < -t
    }
}

/// Pseudo-random pairwise submodularity check (deterministic LCG).
fn spot_check_submodularity<F: SubmodularFn + ?Sized>(
    oracle: &CachedOracle<'_, F>,
    n: usize,
) -> Result<()> {
    let full_bits = (1u64 << n) - 1;
    let mut state = 0x9E3779B97F4A7C15u64 ^ n as u64;
    let mut next = move || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        state
    };
    let pairs = (8 * n * n).clamp(16, 512);
    for _ in 0..pairs {
        let s = SubsetMask::from_bits(next() & full_bits);
        let t = SubsetMask::from_bits(next() & full_bits);
        let f_s = oracle.eval(s);
        let f_t = oracle.eval(t);
        let f_union = oracle.eval(s | t);
        let f_inter = oracle.eval(s & t);
        let scale = f_s
            .abs()
            .max(f_t.abs())
            .max(f_union.abs())
            .max(f_inter.abs());
        let violation = f_union + f_inter - f_s - f_t;
        if violation > 1e-9 * scale.max(1.0) {
            return Err(Error::NotSubmodular { s, t, violation });
        }
    }
    Ok(())
}
