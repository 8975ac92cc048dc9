//! The delta-feasible flow on the complete directed graph over the ground
//! set, its boundary, and reachability/augmentation over zero-flow arcs.

use crate::capacity::SubsetMask;

/// Flow values `phi(u, v) in [0, delta]` on every ordered pair of distinct
/// vertices, together with the scaling parameter `delta`.
///
/// The boundary `d phi(u) = sum_v phi(u, v) - sum_v phi(v, u)` is
/// maintained incrementally. The zero-flow subgraph (arcs with
/// `phi(u, v) = 0`) drives reachability; mutations that should zero an arc
/// write an exact `0.0` so arc membership never depends on rounding.
#[derive(Debug, Clone)]
pub struct FlowState {
    n: usize,
    delta: f64,
    phi: Vec<f64>,
    boundary: Vec<f64>,
}

impl FlowState {
    pub(crate) fn new(n: usize, delta: f64) -> Self {
        FlowState {
            n,
            delta,
            phi: vec![0.0; n * n],
            boundary: vec![0.0; n],
        }
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.phi[u * self.n + v]
    }

    /// Net flow emanating from `u`.
    pub fn boundary(&self, u: usize) -> f64 {
        self.boundary[u]
    }

    fn set(&mut self, u: usize, v: usize, value: f64) {
        let old = self.phi[u * self.n + v];
        self.phi[u * self.n + v] = value;
        self.boundary[u] += value - old;
        self.boundary[v] -= value - old;
    }

    /// `phi(u, v) -= amount`, leaving the arc positive.
    pub(crate) fn subtract(&mut self, u: usize, v: usize, amount: f64) {
        let old = self.get(u, v);
        self.set(u, v, old - amount);
    }

    /// Zeroes the arc exactly (used when a Double-Exchange saturates it).
    pub(crate) fn zero_arc(&mut self, u: usize, v: usize) {
        self.set(u, v, 0.0);
    }

    /// Halves both the flow and the scaling parameter; delta-feasibility
    /// is preserved and zero arcs stay zero.
    pub(crate) fn halve(&mut self) {
        self.delta *= 0.5;
        for value in &mut self.phi {
            *value *= 0.5;
        }
        for value in &mut self.boundary {
            *value *= 0.5;
        }
    }

    /// Vertices reachable from `sources` along zero-flow arcs (including
    /// the sources). Deterministic: seeds and neighbors scan ascending.
    pub(crate) fn reachable_from(&self, sources: SubsetMask) -> SubsetMask {
        let mut visited = sources;
        let mut queue: Vec<usize> = sources.members().collect();
        while let Some(u) = queue.pop() {
            for v in 0..self.n {
                if v != u && !visited.contains(v) && self.get(u, v) == 0.0 {
                    visited = visited.with(v);
                    queue.push(v);
                }
            }
        }
        visited
    }

    /// Shortest path from `sources` to `targets` along zero-flow arcs:
    /// breadth-first, seeded and scanned in ascending vertex order.
    pub(crate) fn shortest_zero_path(
        &self,
        sources: SubsetMask,
        targets: SubsetMask,
    ) -> Option<Vec<usize>> {
        let mut parent = vec![usize::MAX; self.n];
        let mut visited = sources;
        let mut queue: std::collections::VecDeque<usize> = sources.members().collect();
        while let Some(u) = queue.pop_front() {
            if targets.contains(u) {
                let mut path = vec![u];
                let mut cursor = u;
                while parent[cursor] != usize::MAX {
                    cursor = parent[cursor];
                    path.push(cursor);
                }
                path.reverse();
                return Some(path);
            }
            for (v, slot) in parent.iter_mut().enumerate() {
                if v != u && !visited.contains(v) && self.get(u, v) == 0.0 {
                    visited = visited.with(v);
                    *slot = u;
                    queue.push_back(v);
                }
            }
        }
        None
    }

    /// Pushes `delta` along a zero-arc path: for each arc `(u, v)` set
    /// `phi(u, v) := delta - phi(v, u)` and `phi(v, u) := 0`. The boundary
    /// rises by `delta` at the path start and falls by `delta` at the end.
    pub(crate) fn augment(&mut self, path: &[usize]) {
        for pair in path.windows(2) {
            let (u, v) = (pair[0], pair[1]);
            let reverse = self.get(v, u);
            self.set(u, v, self.delta - reverse);
            self.set(v, u, 0.0);
        }
    }
}
