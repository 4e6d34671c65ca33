//! Weighted set systems and the covering instances built on top of them.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index of a set in a [`SetSystem`].
pub type SetId = usize;
/// Index of a universe element.
pub type ElementId = usize;

/// Absolute tolerance used for every cost and coverage comparison.
pub const TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SetSysError {
    #[error("set {set} contains element {element} outside a universe of size {n}")]
    ElementOutOfRange { set: SetId, element: ElementId, n: usize },
    #[error("{sets} sets but {weights} weights")]
    WeightCountMismatch { sets: usize, weights: usize },
    #[error("set {set} has invalid weight {weight}")]
    BadWeight { set: SetId, weight: f64 },
}

/// A universe `0..n_elements` together with a weighted collection of subsets.
///
/// Sets are kept strictly sorted and duplicate free, and the element index
/// (which sets contain a given element) is always the exact transpose of the
/// set lists.
#[derive(Debug, Clone, PartialEq)]
pub struct SetSystem {
    n_elements: usize,
    sets: Vec<Vec<ElementId>>,
    weights: Vec<f64>,
    element_index: Vec<Vec<SetId>>,
}

impl SetSystem {
    /// Builds a system, sorting and deduplicating every set.
    pub fn new(n_elements: usize, sets: Vec<Vec<ElementId>>, weights: Vec<f64>) -> Result<Self, SetSysError> {
        if sets.len() != weights.len() {
            return Err(SetSysError::WeightCountMismatch {
                sets: sets.len(),
                weights: weights.len(),
            });
        }
        for (set, &weight) in weights.iter().enumerate() {
            if !weight.is_finite() || weight < 0.0 {
                return Err(SetSysError::BadWeight { set, weight });
            }
        }
        let mut normalized = Vec::with_capacity(sets.len());
        for (id, mut s) in sets.into_iter().enumerate() {
            s.sort_unstable();
            s.dedup();
            if let Some(&e) = s.last() {
                if e >= n_elements {
                    return Err(SetSysError::ElementOutOfRange {
                        set: id,
                        element: e,
                        n: n_elements,
                    });
                }
            }
            normalized.push(s);
        }
        Ok(Self::from_parts(n_elements, normalized, weights))
    }

    /// Unit weights on every set.
    pub fn unweighted(n_elements: usize, sets: Vec<Vec<ElementId>>) -> Result<Self, SetSysError> {
        let weights = vec![1.0; sets.len()];
        Self::new(n_elements, sets, weights)
    }

    fn from_parts(n_elements: usize, sets: Vec<Vec<ElementId>>, weights: Vec<f64>) -> Self {
        let mut element_index = vec![Vec::new(); n_elements];
        for (i, s) in sets.iter().enumerate() {
            for &e in s {
                element_index[e].push(i);
            }
        }
        Self {
            n_elements,
            sets,
            weights,
            element_index,
        }
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    pub fn n_sets(&self) -> usize {
        self.sets.len()
    }

    pub fn set(&self, id: SetId) -> &[ElementId] {
        &self.sets[id]
    }

    pub fn sets(&self) -> &[Vec<ElementId>] {
        &self.sets
    }

    pub fn weight(&self, id: SetId) -> f64 {
        self.weights[id]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Sets containing `element`, in increasing id order.
    pub fn containing(&self, element: ElementId) -> &[SetId] {
        &self.element_index[element]
    }

    /// Frequency of an element: the number of sets containing it.
    pub fn frequency(&self, element: ElementId) -> usize {
        self.element_index[element].len()
    }

    pub fn max_frequency(&self) -> usize {
        self.element_index.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn max_set_size(&self) -> usize {
        self.sets.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Total weight of a collection of sets.
    pub fn cost(&self, chosen: &[SetId]) -> f64 {
        chosen.iter().map(|&i| self.weights[i]).fold(0.0, |a, b| a + b)
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().fold(0.0, |a, b| a + b)
    }

    /// Membership mask of the union of the chosen sets.
    pub fn covered_mask(&self, chosen: &[SetId]) -> Vec<bool> {
        let mut mask = vec![false; self.n_elements];
        for &i in chosen {
            for &e in &self.sets[i] {
                mask[e] = true;
            }
        }
        mask
    }

    /// Number of elements in the union of the chosen sets.
    pub fn coverage(&self, chosen: &[SetId]) -> usize {
        self.covered_mask(chosen).into_iter().filter(|&b| b).count()
    }

    /// Elements contained in at least one set.
    pub fn coverable(&self) -> Vec<ElementId> {
        (0..self.n_elements)
            .filter(|&e| !self.element_index[e].is_empty())
            .collect()
    }

    /// Intersects every set with `keep_elements`. Set ids are unchanged, so
    /// the returned map is the identity on `0..n_sets`.
    pub fn restrict(&self, keep_elements: &[ElementId]) -> (SetSystem, IdMap) {
        let mut keep = vec![false; self.n_elements];
        for &e in keep_elements {
            if e < self.n_elements {
                keep[e] = true;
            }
        }
        let sets = self
            .sets
            .iter()
            .map(|s| s.iter().copied().filter(|&e| keep[e]).collect())
            .collect();
        (
            Self::from_parts(self.n_elements, sets, self.weights.clone()),
            IdMap::identity(self.n_sets()),
        )
    }

    /// Keeps only the listed sets (in the given order). The returned map
    /// translates new set ids back to ids in `self`.
    pub fn select_sets(&self, keep_sets: &[SetId]) -> (SetSystem, IdMap) {
        let sets = keep_sets.iter().map(|&i| self.sets[i].clone()).collect();
        let weights = keep_sets.iter().map(|&i| self.weights[i]).collect();
        (
            Self::from_parts(self.n_elements, sets, weights),
            IdMap {
                to_original: keep_sets.to_vec(),
            },
        )
    }

    /// Same sets and weights with relabeled elements and sets.
    /// `element_perm[e]` is the new id of element `e`, `set_perm[i]` the new
    /// id of set `i`.
    pub fn relabel(&self, element_perm: &[ElementId], set_perm: &[SetId]) -> SetSystem {
        let mut sets = vec![Vec::new(); self.n_sets()];
        let mut weights = vec![0.0; self.n_sets()];
        for (i, s) in self.sets.iter().enumerate() {
            let mut mapped: Vec<_> = s.iter().map(|&e| element_perm[e]).collect();
            mapped.sort_unstable();
            sets[set_perm[i]] = mapped;
            weights[set_perm[i]] = self.weights[i];
        }
        Self::from_parts(self.n_elements, sets, weights)
    }
}

/// Translation table from set ids of a derived system to the original ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdMap {
    to_original: Vec<SetId>,
}

impl IdMap {
    pub fn identity(n: usize) -> Self {
        Self {
            to_original: (0..n).collect(),
        }
    }

    pub fn original(&self, local: SetId) -> SetId {
        self.to_original[local]
    }

    /// Maps a list of local ids back, returned sorted.
    pub fn to_original(&self, local: &[SetId]) -> Vec<SetId> {
        let mut out: Vec<_> = local.iter().map(|&i| self.to_original[i]).collect();
        out.sort_unstable();
        out
    }

    pub fn len(&self) -> usize {
        self.to_original.len()
    }

    pub fn is_empty(&self) -> bool {
        self.to_original.is_empty()
    }
}

/// Partial Set Cover: cover at least `k` elements at minimum weight.
#[derive(Debug, Clone, PartialEq)]
pub struct PscInstance {
    pub system: SetSystem,
    pub k: usize,
}

impl PscInstance {
    pub fn new(system: SetSystem, k: usize) -> Self {
        Self { system, k }
    }

    /// Full set cover of the universe.
    pub fn set_cover(system: SetSystem) -> Self {
        let k = system.n_elements();
        Self { system, k }
    }

    pub fn is_set_cover(&self) -> bool {
        self.k == self.system.n_elements()
    }
}

/// One covering row `sum_j A[k][j] z_j >= b_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverRow {
    pub coeffs: BTreeMap<ElementId, f64>,
    pub demand: f64,
}

impl CoverRow {
    pub fn new(coeffs: impl IntoIterator<Item = (ElementId, f64)>, demand: f64) -> Self {
        Self {
            coeffs: coeffs.into_iter().collect(),
            demand,
        }
    }

    /// Row with unit coefficient on each listed element.
    pub fn unit(elements: impl IntoIterator<Item = ElementId>, demand: f64) -> Self {
        Self::new(elements.into_iter().map(|e| (e, 1.0)), demand)
    }

    pub fn dense(&self, n_elements: usize) -> Vec<f64> {
        let mut out = vec![0.0; n_elements];
        for (&e, &a) in &self.coeffs {
            if e < n_elements {
                out[e] = a;
            }
        }
        out
    }

    pub fn coefficient(&self, e: ElementId) -> f64 {
        self.coeffs.get(&e).copied().unwrap_or(0.0)
    }
}

/// Covering Coverage Functions: a set system plus rows `A z >= b` with
/// coefficients in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CcfInstance {
    pub system: SetSystem,
    pub rows: Vec<CoverRow>,
}

impl CcfInstance {
    pub fn new(system: SetSystem, rows: Vec<CoverRow>) -> Self {
        Self { system, rows }
    }

    /// Single unit-coefficient row over the whole universe with demand `k`.
    pub fn from_psc(psc: &PscInstance) -> Self {
        let row = CoverRow::unit(0..psc.system.n_elements(), psc.k as f64);
        Self::new(psc.system.clone(), vec![row])
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    /// Value of row `k`'s weighted coverage function on a collection of sets.
    pub fn row_value(&self, k: usize, chosen: &[SetId]) -> f64 {
        let mask = self.system.covered_mask(chosen);
        self.row_value_mask(k, &mask)
    }

    pub fn row_value_mask(&self, k: usize, covered: &[bool]) -> f64 {
        self.rows[k]
            .coeffs
            .iter()
            .filter(|(&e, _)| e < covered.len() && covered[e])
            .map(|(_, &a)| a)
            .fold(0.0, |a, b| a + b)
    }

    /// Per-row coverage achieved by `chosen`.
    pub fn coverage_report(&self, chosen: &[SetId]) -> Vec<f64> {
        let mask = self.system.covered_mask(chosen);
        (0..self.n_rows()).map(|k| self.row_value_mask(k, &mask)).collect()
    }

    pub fn is_feasible(&self, chosen: &[SetId]) -> bool {
        self.coverage_report(chosen)
            .iter()
            .zip(&self.rows)
            .all(|(&v, row)| v >= row.demand - TOL)
    }

    /// Rows a set influences: rows with a positive coefficient on some
    /// element of the set.
    pub fn influenced_rows(&self, set: SetId) -> Vec<usize> {
        let s = self.system.set(set);
        (0..self.n_rows())
            .filter(|&k| s.iter().any(|&e| self.rows[k].coefficient(e) > 0.0))
            .collect()
    }

    /// Sets influencing row `k`.
    pub fn influencing_sets(&self, k: usize) -> Vec<SetId> {
        (0..self.system.n_sets())
            .filter(|&i| self.system.set(i).iter().any(|&e| self.rows[k].coefficient(e) > 0.0))
            .collect()
    }

    /// Sparsity `r`: the largest number of rows any single set influences.
    pub fn sparsity(&self) -> usize {
        (0..self.system.n_sets())
            .map(|i| self.influenced_rows(i).len())
            .max()
            .unwrap_or(0)
    }
}

/// Free-function form of [`CcfInstance::sparsity`].
pub fn sparsity(instance: &CcfInstance) -> usize {
    instance.sparsity()
}

/// Phase name to cost, ordered by name.
pub type Trace = BTreeMap<String, f64>;

/// Output of every solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub chosen: Vec<SetId>,
    pub cost: f64,
    pub coverage: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Trace::is_empty")]
    pub trace: Trace,
}

impl Solution {
    /// Sorts and deduplicates `chosen` and fills in its cost. Coverage is
    /// left empty for the caller.
    pub fn from_sets(system: &SetSystem, mut chosen: Vec<SetId>) -> Self {
        chosen.sort_unstable();
        chosen.dedup();
        let cost = system.cost(&chosen);
        Self {
            chosen,
            cost,
            coverage: Vec::new(),
            seed: None,
            trace: Trace::new(),
        }
    }

    pub fn for_psc(instance: &PscInstance, chosen: Vec<SetId>) -> Self {
        let mut s = Self::from_sets(&instance.system, chosen);
        s.coverage = vec![instance.system.coverage(&s.chosen) as f64];
        s
    }

    pub fn for_ccf(instance: &CcfInstance, chosen: Vec<SetId>) -> Self {
        let mut s = Self::from_sets(&instance.system, chosen);
        s.coverage = instance.coverage_report(&s.chosen);
        s
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ValidationError {
    ElementOutOfRange { set: SetId, element: ElementId },
    UnsortedSet { set: SetId },
    NegativeWeight { set: SetId, weight: f64 },
    DemandOutOfRange { k: usize, n: usize },
    CoefficientOutOfRange { row: usize, element: ElementId, value: f64 },
    NegativeDemand { row: usize, demand: f64 },
    UnreachableDemand { row: usize, demand: f64, reachable: f64 },
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ElementOutOfRange { set, element } => {
                write!(f, "set {set}: element {element} out of range")
            }
            Self::UnsortedSet { set } => write!(f, "set {set}: not strictly sorted"),
            Self::NegativeWeight { set, weight } => {
                write!(f, "set {set}: negative weight {weight}")
            }
            Self::DemandOutOfRange { k, n } => {
                write!(f, "demand k = {k} exceeds universe size {n}")
            }
            Self::CoefficientOutOfRange { row, element, value } => {
                write!(f, "row {row}: coefficient out of range ({value} on element {element})")
            }
            Self::NegativeDemand { row, demand } => {
                write!(f, "row {row}: negative demand {demand}")
            }
            Self::UnreachableDemand { row, demand, reachable } => write!(
                f,
                "row {row}: unreachable demand {demand} (at most {reachable} coverable)"
            ),
        }
    }
}

impl ValidationError {
    /// Whether the error means the instance is well formed but infeasible.
    pub fn is_infeasibility(&self) -> bool {
        matches!(self, Self::UnreachableDemand { .. })
    }
}

fn validate_system(system: &SetSystem, errors: &mut Vec<ValidationError>) {
    for (i, s) in system.sets.iter().enumerate() {
        if s.windows(2).any(|w| w[0] >= w[1]) {
            errors.push(ValidationError::UnsortedSet { set: i });
        }
        if let Some(&e) = s.iter().find(|&&e| e >= system.n_elements) {
            errors.push(ValidationError::ElementOutOfRange { set: i, element: e });
        }
    }
    for (i, &w) in system.weights.iter().enumerate() {
        if w.is_nan() || w < 0.0 {
            errors.push(ValidationError::NegativeWeight { set: i, weight: w });
        }
    }
}

/// Instances that can be checked by [`validate`].
pub trait Validate {
    fn validation_errors(&self) -> Vec<ValidationError>;
}

impl Validate for SetSystem {
    fn validation_errors(&self) -> Vec<ValidationError> {
        let mut errors = Vec::new();
        validate_system(self, &mut errors);
        errors
    }
}

impl Validate for PscInstance {
    fn validation_errors(&self) -> Vec<ValidationError> {
        let mut errors = Vec::new();
        validate_system(&self.system, &mut errors);
        let n = self.system.n_elements();
        if self.k > n {
            errors.push(ValidationError::DemandOutOfRange { k: self.k, n });
        } else {
            let reachable = self.system.coverable().len();
            if self.k > reachable {
                errors.push(ValidationError::UnreachableDemand {
                    row: 0,
                    demand: self.k as f64,
                    reachable: reachable as f64,
                });
            }
        }
        errors
    }
}

impl Validate for CcfInstance {
    fn validation_errors(&self) -> Vec<ValidationError> {
        let mut errors = Vec::new();
        validate_system(&self.system, &mut errors);
        let all: Vec<SetId> = (0..self.system.n_sets()).collect();
        let full = self.system.covered_mask(&all);
        for (k, row) in self.rows.iter().enumerate() {
            let mut bad = false;
            for (&e, &a) in &row.coeffs {
                if e >= self.system.n_elements() || !(0.0..=1.0).contains(&a) {
                    errors.push(ValidationError::CoefficientOutOfRange {
                        row: k,
                        element: e,
                        value: a,
                    });
                    bad = true;
                }
            }
            if !row.demand.is_finite() || row.demand < 0.0 {
                errors.push(ValidationError::NegativeDemand {
                    row: k,
                    demand: row.demand,
                });
                continue;
            }
            if bad {
                continue;
            }
            let reachable = self.row_value_mask(k, &full);
            if row.demand > reachable + TOL {
                errors.push(ValidationError::UnreachableDemand {
                    row: k,
                    demand: row.demand,
                    reachable,
                });
            }
        }
        errors
    }
}

/// Checks every structural invariant plus reachability of the demands.
pub fn validate<T: Validate + ?Sized>(instance: &T) -> Result<(), Vec<ValidationError>> {
    let errors = instance.validation_errors();
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(n: usize, sets: Vec<Vec<usize>>) -> SetSystem {
        SetSystem::unweighted(n, sets).unwrap()
    }

    #[test]
    fn restrict_intersects_sets() {
        let s = sys(3, vec![vec![0, 1], vec![1, 2]]);
        let (r, map) = s.restrict(&[1, 2]);
        assert_eq!(r.sets(), &[vec![1], vec![1, 2]]);
        assert_eq!(map.original(1), 1);
        assert_eq!(r.weights(), s.weights());
    }

    #[test]
    fn restrict_to_full_universe_is_identity() {
        let s = sys(3, vec![vec![0, 1], vec![1, 2]]);
        let (r, _) = s.restrict(&[0, 1, 2]);
        assert_eq!(r, s);
    }

    #[test]
    fn restrict_to_nothing_keeps_empty_sets() {
        let s = sys(2, vec![vec![0], vec![1]]);
        let (r, map) = s.restrict(&[]);
        assert_eq!(r.sets(), &[Vec::<usize>::new(), Vec::new()]);
        assert_eq!(map.len(), 2);
    }

    #[test]
    fn select_sets_maps_ids_back() {
        let s = SetSystem::new(3, vec![vec![0], vec![1], vec![2]], vec![1.0, 2.0, 3.0]).unwrap();
        let (sub, map) = s.select_sets(&[2, 0]);
        assert_eq!(sub.set(0), &[2]);
        assert_eq!(sub.weight(0), 3.0);
        assert_eq!(map.to_original(&[0, 1]), vec![0, 2]);
    }

    #[test]
    fn constructor_normalizes_and_rejects() {
        let s = SetSystem::unweighted(4, vec![vec![3, 1, 1, 0]]).unwrap();
        assert_eq!(s.set(0), &[0, 1, 3]);
        assert!(matches!(
            SetSystem::unweighted(2, vec![vec![2]]),
            Err(SetSysError::ElementOutOfRange { .. })
        ));
        assert!(matches!(
            SetSystem::new(2, vec![vec![0]], vec![-1.0]),
            Err(SetSysError::BadWeight { .. })
        ));
    }

    #[test]
    fn sparsity_examples() {
        let one_row = CcfInstance::new(sys(2, vec![vec![0], vec![1]]), vec![CoverRow::unit([0, 1], 1.0)]);
        assert_eq!(one_row.sparsity(), 1);

        let disjoint = CcfInstance::new(
            sys(2, vec![vec![0], vec![1]]),
            vec![CoverRow::unit([0], 1.0), CoverRow::unit([1], 1.0)],
        );
        assert_eq!(disjoint.sparsity(), 1);

        let shared = CcfInstance::new(
            sys(2, vec![vec![0, 1]]),
            vec![CoverRow::unit([0], 1.0), CoverRow::unit([1], 1.0)],
        );
        // hand enumeration: set 0 touches element 0 (row 0) and 1 (row 1)
        assert_eq!(shared.influenced_rows(0), vec![0, 1]);
        assert_eq!(shared.sparsity(), 2);
    }

    #[test]
    fn validate_reports_unreachable_psc_demand() {
        let inst = PscInstance::new(sys(4, vec![vec![0, 1]]), 3);
        let errs = validate(&inst).unwrap_err();
        assert!(errs.iter().any(ValidationError::is_infeasibility));
        assert!(errs[0].to_string().contains("unreachable demand"));
    }

    #[test]
    fn validate_reports_bad_coefficient() {
        let inst = CcfInstance::new(sys(2, vec![vec![0, 1]]), vec![CoverRow::new([(0, 1.5)], 1.0)]);
        let errs = validate(&inst).unwrap_err();
        assert!(errs[0].to_string().contains("coefficient out of range"));
    }

    #[test]
    fn validate_accepts_well_formed() {
        let s = sys(3, vec![vec![0, 1], vec![2]]);
        assert!(validate(&PscInstance::new(s.clone(), 3)).is_ok());
        let ccf = CcfInstance::new(s, vec![CoverRow::new([(0, 0.5), (2, 1.0)], 1.5)]);
        assert!(validate(&ccf).is_ok());
    }

    #[test]
    fn solution_cost_is_recomputable() {
        let s = SetSystem::new(3, vec![vec![0], vec![1, 2]], vec![2.5, 1.0]).unwrap();
        let inst = PscInstance::new(s, 3);
        let sol = Solution::for_psc(&inst, vec![1, 0, 1]);
        assert_eq!(sol.chosen, vec![0, 1]);
        assert!((sol.cost - 3.5).abs() < TOL);
        assert_eq!(sol.coverage, vec![3.0]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_system() -> impl Strategy<Value = SetSystem> {
            (1usize..10).prop_flat_map(|n| {
                prop::collection::vec(prop::collection::vec(0..n, 0..n), 1..7)
                    .prop_map(move |sets| SetSystem::unweighted(n, sets).unwrap())
            })
        }

        proptest! {
            #[test]
            fn element_index_is_transpose(s in arb_system()) {
                for i in 0..s.n_sets() {
                    for &e in s.set(i) {
                        prop_assert!(s.containing(e).contains(&i));
                    }
                }
                for e in 0..s.n_elements() {
                    for &i in s.containing(e) {
                        prop_assert!(s.set(i).binary_search(&e).is_ok());
                    }
                }
            }

            #[test]
            fn restrict_is_idempotent(s in arb_system(), keep in prop::collection::vec(0usize..10, 0..6)) {
                let (once, _) = s.restrict(&keep);
                let (twice, _) = once.restrict(&keep);
                prop_assert_eq!(once, twice);
            }
        }
    }
}
