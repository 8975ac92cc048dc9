//! Linear orderings, extreme bases of the base polyhedron, exchange
//! capacities, and Caratheodory pruning of convex combinations.

use crate::capacity::SubsetMask;
use crate::sfm::oracle::SubmodularFn;
use crate::{Error, Result};

/// Relative pivot tolerance for the affine-dependence elimination.
const PIVOT_REL_TOLERANCE: f64 = 1e-12;

/// A permutation `(v_1, ..., v_N)` of the ground set. `prefix_mask(i)` is
/// the set `L(v_i) = {v_1, ..., v_i}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearOrdering {
    seq: Vec<usize>,
}

impl LinearOrdering {
    /// Natural index order `(0, 1, ..., n-1)`.
    pub fn identity(n: usize) -> Self {
        LinearOrdering {
            seq: (0..n).collect(),
        }
    }

    pub fn new(seq: Vec<usize>) -> Result<Self> {
        let n = seq.len();
        let mut seen = vec![false; n];
        for &element in &seq {
            if element >= n || seen[element] {
                return Err(Error::Domain(format!(
                    "sequence is not a permutation of 0..{n}"
                )));
            }
            seen[element] = true;
        }
        Ok(LinearOrdering { seq })
    }

    pub fn len(&self) -> usize {
        self.seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.seq
    }

    pub fn position(&self, element: usize) -> Option<usize> {
        self.seq.iter().position(|&e| e == element)
    }

    /// Mask of the first `count` elements.
    pub fn prefix_mask(&self, count: usize) -> SubsetMask {
        self.seq[..count]
            .iter()
            .fold(SubsetMask::EMPTY, |m, &e| m.with(e))
    }

    fn swap_positions(&mut self, a: usize, b: usize) {
        self.seq.swap(a, b);
    }
}

/// An extreme point of the base polyhedron `B(f)` together with the
/// ordering that generates it and its coefficient in the solver's convex
/// combination.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremeBase {
    /// `y(v) = f(L(v)) - f(L(v) \ {v})`.
    pub vector: Vec<f64>,
    pub ordering: LinearOrdering,
    /// Convex-combination weight, in `[0, 1]`.
    pub coefficient: f64,
}

impl ExtremeBase {
    /// Moves to the base of the ordering with `u` and `v` interchanged:
    /// `y += cap (chi_u - chi_v)`, where `cap` is the exchange capacity.
    pub(crate) fn apply_exchange(&mut self, u: usize, v: usize, cap: f64) {
        self.vector[u] += cap;
        self.vector[v] -= cap;
        let pos_v = self.ordering.position(v).expect("v in ordering");
        self.ordering.swap_positions(pos_v, pos_v + 1);
    }
}

/// The extreme base generated by a linear ordering: marginal gains of `f`
/// along the ordering's prefixes. Uses `N` oracle evaluations beyond
/// `f(empty)`, and satisfies `y(E) = f(E)` by telescoping.
pub fn extreme_base<F: SubmodularFn + ?Sized>(f: &F, ordering: LinearOrdering) -> ExtremeBase {
    let n = ordering.len();
    let mut vector = vec![0.0; n];
    let mut previous = f.eval(SubsetMask::EMPTY);
    let mut prefix = SubsetMask::EMPTY;
    for &element in ordering.as_slice() {
        prefix = prefix.with(element);
        let value = f.eval(prefix);
        vector[element] = value - previous;
        previous = value;
    }
    ExtremeBase {
        vector,
        ordering,
        coefficient: 1.0,
    }
}

/// Exchange capacity `c~(y, u, v) = f(L(u) \ {v}) - f(L(u)) + y(v)` for
/// `u` immediately succeeding `v` in the base's ordering. Submodularity
/// makes this nonnegative, and `y + c~ (chi_u - chi_v)` is the extreme
/// base of the ordering with `u` and `v` interchanged.
pub fn exchange_capacity<F: SubmodularFn + ?Sized>(
    f: &F,
    base: &ExtremeBase,
    u: usize,
    v: usize,
) -> Result<f64> {
    let pos_v = base
        .ordering
        .position(v)
        .ok_or(Error::NotAdjacent { u, v })?;
    if pos_v + 1 >= base.ordering.len() || base.ordering.as_slice()[pos_v + 1] != u {
        return Err(Error::NotAdjacent { u, v });
    }
    let prefix_u = base.ordering.prefix_mask(pos_v + 2);
    let swapped = prefix_u.without(v);
    Ok(f.eval(swapped) - f.eval(prefix_u) + base.vector[v])
}

/// Caratheodory pruning: removes affinely dependent bases from a convex
/// combination while preserving the combined point `x = sum lambda_i y_i`
/// and `sum lambda_i = 1`. The survivors are affinely independent, so at
/// most `N + 1` remain.
pub fn reduce(combination: &mut Vec<ExtremeBase>) -> Result<()> {
    validate_combination(combination)?;
    loop {
        if combination.len() <= 1 {
            return Ok(());
        }
        let Some(mu) = affine_dependence(combination) else {
            return Ok(());
        };
        // theta = min{lambda_j / mu_j : mu_j > 0}; since sum mu = 0 and
        // mu != 0 there is a positive entry.
        let mu_scale = mu.iter().fold(0.0f64, |m, &t| m.max(t.abs()));
        let mut theta = f64::INFINITY;
        let mut leaving = usize::MAX;
        for (j, &mu_j) in mu.iter().enumerate() {
            if mu_j > PIVOT_REL_TOLERANCE * mu_scale {
                let ratio = combination[j].coefficient / mu_j;
                if ratio < theta {
                    theta = ratio;
                    leaving = j;
                }
            }
        }
        if leaving == usize::MAX {
            return Err(Error::InconsistentCombination(
                "dependence vector has no positive entry".to_string(),
            ));
        }
        for (j, &mu_j) in mu.iter().enumerate() {
            combination[j].coefficient = (combination[j].coefficient - theta * mu_j).max(0.0);
        }
        combination[leaving].coefficient = 0.0;
        combination.retain(|eb| eb.coefficient > 0.0);
        if combination.is_empty() {
            return Err(Error::InconsistentCombination(
                "pruning removed every base".to_string(),
            ));
        }
        // Renormalization hygiene: the updates preserve the unit sum only
        // to rounding, and drift compounds over thousands of pruning
        // rounds on long runs.
        let total: f64 = combination.iter().map(|eb| eb.coefficient).sum();
        if (total - 1.0).abs() > 1e-12 {
            for eb in combination.iter_mut() {
                eb.coefficient /= total;
            }
        }
    }
}

fn validate_combination(combination: &[ExtremeBase]) -> Result<()> {
    if combination.is_empty() {
        return Err(Error::InconsistentCombination(
            "combination is empty".to_string(),
        ));
    }
    let n = combination[0].vector.len();
    let mut total = 0.0;
    for eb in combination {
        if eb.vector.len() != n || eb.ordering.len() != n {
            return Err(Error::InconsistentCombination(
                "bases have mismatched dimensions".to_string(),
            ));
        }
        if eb.coefficient.is_nan() || eb.coefficient < 0.0 {
            return Err(Error::InconsistentCombination(format!(
                "negative coefficient {}",
                eb.coefficient
            )));
        }
        total += eb.coefficient;
    }
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::InconsistentCombination(format!(
            "coefficients sum to {total}, not 1"
        )));
    }
    Ok(())
}

/// Finds `mu != 0` with `sum mu_j y_j = 0` and `sum mu_j = 0`, or `None`
/// when the bases are affinely independent. Column elimination with
/// partial pivoting on the vectors augmented with an all-ones row; the
/// first column that yields no pivot is expressed through the earlier
/// pivot columns. Rows are scaled to unit norm first (the vector rows
/// carry the oracle's units while the ones row is order one, and row
/// scaling leaves the null space untouched).
fn affine_dependence(combination: &[ExtremeBase]) -> Option<Vec<f64>> {
    let m = combination.len();
    let n = combination[0].vector.len();
    let rows = n + 1;

    let mut a = vec![0.0f64; rows * m];
    for (c, eb) in combination.iter().enumerate() {
        for r in 0..n {
            a[r * m + c] = eb.vector[r];
        }
        a[n * m + c] = 1.0;
    }
    for r in 0..rows {
        let row = &mut a[r * m..(r + 1) * m];
        let norm = row.iter().fold(0.0f64, |mx, v| mx.max(v.abs()));
        if norm > 0.0 {
            for value in row {
                *value /= norm;
            }
        }
    }
    let tol = PIVOT_REL_TOLERANCE;

    // Every earlier column produced a pivot on its own row (or the scan
    // returned), so column `col` pivots on row `col` and the dependent
    // column's representation over pivots 0..col reads straight off.
    for col in 0..m {
        let mut best_row = col;
        let mut best_abs = 0.0;
        for r in col..rows {
            let abs = a[r * m + col].abs();
            if abs > best_abs {
                best_abs = abs;
                best_row = r;
            }
        }
        if best_abs <= tol || col >= rows {
            let mut mu = vec![0.0f64; m];
            mu[col] = 1.0;
            for i in 0..col {
                mu[i] = -a[i * m + col];
            }
            if mu.iter().fold(0.0f64, |mx, &t| mx.max(t)) <= 0.0 {
                for t in &mut mu {
                    *t = -*t;
                }
            }
            if dependence_residual_ok(combination, &mu) {
                return Some(mu);
            }
            return None;
        }
        if best_row != col {
            for c in 0..m {
                a.swap(col * m + c, best_row * m + c);
            }
        }
        // Normalize the pivot row and clear the column everywhere else so
        // representation coefficients can be read off directly.
        let pivot = a[col * m + col];
        for c in col..m {
            a[col * m + c] /= pivot;
        }
        for r in 0..rows {
            if r != col && a[r * m + col] != 0.0 {
                let factor = a[r * m + col];
                for c in col..m {
                    a[r * m + c] -= factor * a[col * m + c];
                }
            }
        }
    }
    None
}

/// Rejects dependence vectors an ill-conditioned elimination got wrong;
/// pruning with a bad `mu` would silently move `x`.
fn dependence_residual_ok(combination: &[ExtremeBase], mu: &[f64]) -> bool {
    let n = combination[0].vector.len();
    let mu_norm = mu.iter().fold(0.0f64, |mx, &t| mx.max(t.abs()));
    let value_scale = combination
        .iter()
        .flat_map(|eb| eb.vector.iter())
        .fold(1.0f64, |mx, v| mx.max(v.abs()));
    let weight_sum: f64 = mu.iter().sum();
    if weight_sum.abs() > 1e-8 * mu_norm {
        return false;
    }
    for r in 0..n {
        let residual: f64 = combination
            .iter()
            .zip(mu)
            .map(|(eb, &mu_j)| mu_j * eb.vector[r])
            .sum();
        if residual.abs() > 1e-8 * mu_norm * value_scale {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Modular(Vec<f64>);

    impl SubmodularFn for Modular {
        fn ground_size(&self) -> usize {
            self.0.len()
        }
        fn eval(&self, s: SubsetMask) -> f64 {
            s.members().map(|i| self.0[i]).sum()
        }
    }

    struct SqrtCardinality(usize);

    impl SubmodularFn for SqrtCardinality {
        fn ground_size(&self) -> usize {
            self.0
        }
        fn eval(&self, s: SubsetMask) -> f64 {
            (s.len() as f64).sqrt()
        }
    }

    fn combination_point(combination: &[ExtremeBase]) -> Vec<f64> {
        let n = combination[0].vector.len();
        let mut x = vec![0.0; n];
        for eb in combination {
            for (xi, yi) in x.iter_mut().zip(&eb.vector) {
                *xi += eb.coefficient * yi;
            }
        }
        x
    }

    #[test]
    fn ordering_is_validated() {
        assert!(LinearOrdering::new(vec![2, 0, 1]).is_ok());
        assert!(LinearOrdering::new(vec![0, 0, 1]).is_err());
        assert!(LinearOrdering::new(vec![0, 3, 1]).is_err());
        assert_eq!(LinearOrdering::identity(3).as_slice(), &[0, 1, 2]);
    }

    #[test]
    fn modular_function_has_a_single_base() {
        let f = Modular(vec![1.0, 1.0, 1.0, 1.0]);
        for seq in [vec![0, 1, 2, 3], vec![3, 1, 0, 2]] {
            let eb = extreme_base(&f, LinearOrdering::new(seq).unwrap());
            assert_eq!(eb.vector, vec![1.0; 4]);
        }
    }

    #[test]
    fn extreme_base_total_equals_full_value() {
        let f = SqrtCardinality(5);
        let eb = extreme_base(&f, LinearOrdering::new(vec![4, 2, 0, 3, 1]).unwrap());
        let total: f64 = eb.vector.iter().sum();
        assert!((total - f.eval(SubsetMask::full(5))).abs() < 1e-12);
    }

    #[test]
    fn exchange_capacity_is_zero_for_modular_functions() {
        let f = Modular(vec![2.0, -1.0, 0.5]);
        let eb = extreme_base(&f, LinearOrdering::identity(3));
        for (v, u) in [(0, 1), (1, 2)] {
            assert_eq!(exchange_capacity(&f, &eb, u, v).unwrap(), 0.0);
        }
    }

    #[test]
    fn exchange_reaches_the_swapped_ordering_base() {
        let f = SqrtCardinality(4);
        let mut eb = extreme_base(&f, LinearOrdering::new(vec![0, 1, 2, 3]).unwrap());
        // Swap the adjacent pair (v=1, u=2).
        let cap = exchange_capacity(&f, &eb, 2, 1).unwrap();
        assert!(cap >= 0.0);
        eb.apply_exchange(2, 1, cap);
        let direct = extreme_base(&f, LinearOrdering::new(vec![0, 2, 1, 3]).unwrap());
        assert_eq!(eb.ordering, direct.ordering);
        for (a, b) in eb.vector.iter().zip(&direct.vector) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn strictly_submodular_function_has_a_positive_capacity() {
        let f = SqrtCardinality(4);
        let eb = extreme_base(&f, LinearOrdering::identity(4));
        let caps: Vec<f64> = (1..4)
            .map(|p| {
                let (v, u) = (eb.ordering.as_slice()[p - 1], eb.ordering.as_slice()[p]);
                exchange_capacity(&f, &eb, u, v).unwrap()
            })
            .collect();
        assert!(caps.iter().any(|&c| c > 0.0), "capacities: {caps:?}");
    }

    #[test]
    fn exchange_capacity_rejects_non_adjacent_pairs() {
        let f = SqrtCardinality(4);
        let eb = extreme_base(&f, LinearOrdering::identity(4));
        assert!(matches!(
            exchange_capacity(&f, &eb, 3, 0),
            Err(Error::NotAdjacent { u: 3, v: 0 })
        ));
        // Wrong direction: u must succeed v.
        assert!(matches!(
            exchange_capacity(&f, &eb, 0, 1),
            Err(Error::NotAdjacent { .. })
        ));
    }

    #[test]
    fn reduce_keeps_single_base() {
        let f = SqrtCardinality(3);
        let mut combo = vec![extreme_base(&f, LinearOrdering::identity(3))];
        reduce(&mut combo).unwrap();
        assert_eq!(combo.len(), 1);
        assert_eq!(combo[0].coefficient, 1.0);
    }

    #[test]
    fn reduce_merges_identical_bases() {
        let f = SqrtCardinality(3);
        let mut a = extreme_base(&f, LinearOrdering::identity(3));
        let mut b = a.clone();
        a.coefficient = 0.3;
        b.coefficient = 0.7;
        let mut combo = vec![a, b];
        reduce(&mut combo).unwrap();
        assert_eq!(combo.len(), 1);
        assert!((combo[0].coefficient - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reduce_prunes_to_affine_independence() {
        // 11 bases of a 6-element ground set must shrink to at most 7
        // while preserving the combined point.
        let f = SqrtCardinality(6);
        let orderings = [
            vec![0, 1, 2, 3, 4, 5],
            vec![5, 4, 3, 2, 1, 0],
            vec![1, 0, 3, 2, 5, 4],
            vec![2, 3, 0, 1, 4, 5],
            vec![4, 5, 0, 1, 2, 3],
            vec![3, 1, 4, 0, 5, 2],
            vec![0, 2, 4, 1, 3, 5],
            vec![5, 3, 1, 4, 2, 0],
            vec![1, 2, 3, 4, 5, 0],
            vec![2, 0, 1, 5, 4, 3],
            vec![4, 0, 5, 1, 3, 2],
        ];
        let mut combo: Vec<ExtremeBase> = orderings
            .iter()
            .map(|seq| extreme_base(&f, LinearOrdering::new(seq.clone()).unwrap()))
            .collect();
        let weight = 1.0 / combo.len() as f64;
        for eb in &mut combo {
            eb.coefficient = weight;
        }
        let before = combination_point(&combo);
        reduce(&mut combo).unwrap();
        assert!(combo.len() <= 7, "kept {} bases", combo.len());
        let after = combination_point(&combo);
        let total: f64 = combo.iter().map(|eb| eb.coefficient).sum();
        assert!((total - 1.0).abs() < 1e-10);
        for (b, a) in before.iter().zip(&after) {
            assert!((b - a).abs() < 1e-10, "point moved: {b} vs {a}");
        }
    }

    #[test]
    fn reduce_rejects_inconsistent_input() {
        let f = SqrtCardinality(3);
        let mut eb = extreme_base(&f, LinearOrdering::identity(3));
        eb.coefficient = 0.4;
        let mut combo = vec![eb];
        assert!(matches!(
            reduce(&mut combo),
            Err(Error::InconsistentCombination(_))
        ));
        let mut empty: Vec<ExtremeBase> = Vec::new();
        assert!(reduce(&mut empty).is_err());
    }
}
