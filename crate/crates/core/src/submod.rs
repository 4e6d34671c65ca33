//! Monotone submodular set functions over a ground set `0..n` and their
//! continuous extensions.
//!
//! Two extensions are provided:
//! * the multilinear extension `F(x) = E[f(R)]`, `R` drawn from the product
//!   distribution with marginals `x`, either estimated by sampling or summed
//!   exactly over all subsets for small ground sets;
//! * the closed-form coverage extension
//!   `f~(x) = sum_e a_e * min{1, sum_{i covers e} x_i}` for weighted coverage
//!   functions, which sandwiches `F` within a factor `1 - 1/e`.

use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex};

use lru::LruCache;
use rand::Rng as _;
use thiserror::Error;

use crate::rng;
use crate::setsys::{CoverRow, SetId, SetSystem};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SubmodError {
    #[error("ground set of size {size} is too large for exact enumeration (limit {limit})")]
    GroundTooLarge { size: usize, limit: usize },
    #[error("normalizing demand must be positive, got {0}")]
    BadDemand(f64),
}

/// Largest ground set [`multilinear_exact`] will enumerate.
pub const EXACT_LIMIT: usize = 20;

/// A monotone submodular set function with `value(∅) = 0`.
pub trait SubmodOracle {
    fn ground_size(&self) -> usize;

    /// Value on a collection of ground elements. Duplicates are ignored.
    fn value(&self, set: &[SetId]) -> f64;

    /// Upper bound on `max_i value({i})`.
    fn lipschitz(&self) -> f64 {
        (0..self.ground_size()).map(|i| self.value(&[i])).fold(0.0, f64::max)
    }

    /// Explicit weighted-coverage representation, when the function has one.
    fn coverage_form(&self) -> Option<CoverageFn> {
        None
    }
}

impl<T: SubmodOracle + ?Sized> SubmodOracle for &T {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn value(&self, set: &[SetId]) -> f64 {
        (**self).value(set)
    }
    fn lipschitz(&self) -> f64 {
        (**self).lipschitz()
    }
    fn coverage_form(&self) -> Option<CoverageFn> {
        (**self).coverage_form()
    }
}

impl<T: SubmodOracle + ?Sized> SubmodOracle for Box<T> {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn value(&self, set: &[SetId]) -> f64 {
        (**self).value(set)
    }
    fn lipschitz(&self) -> f64 {
        (**self).lipschitz()
    }
    fn coverage_form(&self) -> Option<CoverageFn> {
        (**self).coverage_form()
    }
}

impl<T: SubmodOracle + ?Sized> SubmodOracle for Arc<T> {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn value(&self, set: &[SetId]) -> f64 {
        (**self).value(set)
    }
    fn lipschitz(&self) -> f64 {
        (**self).lipschitz()
    }
    fn coverage_form(&self) -> Option<CoverageFn> {
        (**self).coverage_form()
    }
}

/// Shared, thread-safe oracle handle.
pub type DynOracle = Arc<dyn SubmodOracle + Send + Sync>;

/// `value(X + i) - value(X)`; zero when `i` is already in `X`.
pub fn marginal<O: SubmodOracle + ?Sized>(oracle: &O, set: &[SetId], i: SetId) -> f64 {
    if set.contains(&i) {
        return 0.0;
    }
    let mut with = set.to_vec();
    with.push(i);
    oracle.value(&with) - oracle.value(set)
}

/// Weighted coverage function: ground element `i` covers the atoms in
/// `covers[i]`, atom `a` carries weight `atom_weights[a]`, and the value of a
/// collection is the total weight of covered atoms, optionally truncated.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageFn {
    covers: Vec<Vec<usize>>,
    atom_weights: Vec<f64>,
    cap: Option<f64>,
}

/// Row coverage `f_k(X) = sum_{e in union} A[k][e]` is a [`CoverageFn`] with
/// the row's coefficients as atom weights.
pub type WeightedCoverageFn = CoverageFn;

impl CoverageFn {
    pub fn new(mut covers: Vec<Vec<usize>>, atom_weights: Vec<f64>, cap: Option<f64>) -> Self {
        for c in &mut covers {
            c.sort_unstable();
            c.dedup();
        }
        Self {
            covers,
            atom_weights,
            cap,
        }
    }

    /// `|union of S_i|` over a set system.
    pub fn plain(system: &SetSystem) -> Self {
        Self::new(system.sets().to_vec(), vec![1.0; system.n_elements()], None)
    }

    /// `min{k, |union of S_i|}`.
    pub fn truncated(system: &SetSystem, cap: f64) -> Self {
        let mut f = Self::plain(system);
        f.cap = Some(cap);
        f
    }

    /// Coverage of one CCF row. Atoms with zero coefficient are dropped.
    pub fn weighted(system: &SetSystem, row: &CoverRow) -> Self {
        let dense = row.dense(system.n_elements());
        Self::weighted_dense(system, &dense)
    }

    pub fn weighted_dense(system: &SetSystem, coeffs: &[f64]) -> Self {
        let mut atom_of = vec![usize::MAX; system.n_elements()];
        let mut atom_weights = Vec::new();
        for (e, &a) in coeffs.iter().enumerate() {
            if a > 0.0 {
                atom_of[e] = atom_weights.len();
                atom_weights.push(a);
            }
        }
        let covers = system
            .sets()
            .iter()
            .map(|s| {
                s.iter()
                    .filter(|&&e| atom_of[e] != usize::MAX)
                    .map(|&e| atom_of[e])
                    .collect()
            })
            .collect();
        Self::new(covers, atom_weights, None)
    }

    pub fn covers(&self) -> &[Vec<usize>] {
        &self.covers
    }

    pub fn atom_weights(&self) -> &[f64] {
        &self.atom_weights
    }

    pub fn cap(&self) -> Option<f64> {
        self.cap
    }

    pub fn n_atoms(&self) -> usize {
        self.atom_weights.len()
    }

    /// Divides every atom weight (and the cap) by `scale`, then caps at `cap`.
    pub fn scaled(&self, scale: f64, cap: Option<f64>) -> Self {
        let inner_cap = self.cap.map(|c| c / scale);
        let cap = match (inner_cap, cap) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        Self::new(
            self.covers.clone(),
            self.atom_weights.iter().map(|w| w / scale).collect(),
            cap,
        )
    }

    fn clip(&self, v: f64) -> f64 {
        match self.cap {
            Some(c) => v.min(c),
            None => v,
        }
    }

    /// Value given an atom membership mask.
    pub fn value_of_mask(&self, covered: &[bool]) -> f64 {
        let v = covered
            .iter()
            .zip(&self.atom_weights)
            .filter(|(&c, _)| c)
            .map(|(_, &w)| w)
            .fold(0.0, |a, b| a + b);
        self.clip(v)
    }

    pub fn covered_atoms(&self, set: &[SetId]) -> Vec<bool> {
        let mut covered = vec![false; self.n_atoms()];
        for &i in set {
            for &a in &self.covers[i] {
                covered[a] = true;
            }
        }
        covered
    }

    /// Closed-form coverage extension `sum_a w_a min{1, sum_{i covers a} x_i}`,
    /// truncated at the cap.
    pub fn tilde(&self, x: &[f64]) -> f64 {
        let mut load = vec![0.0; self.n_atoms()];
        for (i, atoms) in self.covers.iter().enumerate() {
            for &a in atoms {
                load[a] += x[i];
            }
        }
        let v = load
            .iter()
            .zip(&self.atom_weights)
            .map(|(&l, &w)| w * f64::min(1.0, l))
            .fold(0.0, |a, b| a + b);
        self.clip(v)
    }
}

impl SubmodOracle for CoverageFn {
    fn ground_size(&self) -> usize {
        self.covers.len()
    }

    fn value(&self, set: &[SetId]) -> f64 {
        self.value_of_mask(&self.covered_atoms(set))
    }

    fn lipschitz(&self) -> f64 {
        self.covers
            .iter()
            .map(|atoms| self.clip(atoms.iter().map(|&a| self.atom_weights[a]).fold(0.0, |a, b| a + b)))
            .fold(0.0, f64::max)
    }

    fn coverage_form(&self) -> Option<CoverageFn> {
        Some(self.clone())
    }
}

/// Additive function `sum_{i in X} v_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModularFn {
    values: Vec<f64>,
}

impl ModularFn {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }
}

impl SubmodOracle for ModularFn {
    fn ground_size(&self) -> usize {
        self.values.len()
    }

    fn value(&self, set: &[SetId]) -> f64 {
        let mut seen = vec![false; self.values.len()];
        set.iter()
            .filter(|&&i| !std::mem::replace(&mut seen[i], true))
            .map(|&i| self.values[i])
            .fold(0.0, |a, b| a + b)
    }

    fn coverage_form(&self) -> Option<CoverageFn> {
        let covers = (0..self.values.len()).map(|i| vec![i]).collect();
        Some(CoverageFn::new(covers, self.values.clone(), None))
    }
}

/// A point in the plane.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Line `a x + b y + c = 0`; a point is on the positive side when the
/// expression is positive.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Line {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Line {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    pub fn eval(&self, p: Point) -> f64 {
        self.a * p.x + self.b * p.y + self.c
    }

    pub fn positive(&self, p: Point) -> bool {
        self.eval(p) > 0.0
    }
}

/// Number of point pairs of one point set separated by at least one chosen
/// line. Ground element `i` is candidate line `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairCutFn {
    n_points: usize,
    // sides[line][point]
    sides: Vec<Vec<bool>>,
}

impl PairCutFn {
    pub fn new(points: &[Point], lines: &[Line]) -> Self {
        let sides = lines
            .iter()
            .map(|l| points.iter().map(|&p| l.positive(p)).collect())
            .collect();
        Self {
            n_points: points.len(),
            sides,
        }
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn total_pairs(&self) -> usize {
        self.n_points * self.n_points.saturating_sub(1) / 2
    }

    fn pair_index(&self) -> Vec<(usize, usize)> {
        let n = self.n_points;
        (0..n).flat_map(|p| ((p + 1)..n).map(move |q| (p, q))).collect()
    }
}

impl SubmodOracle for PairCutFn {
    fn ground_size(&self) -> usize {
        self.sides.len()
    }

    fn value(&self, set: &[SetId]) -> f64 {
        let n = self.n_points;
        let mut cut = 0usize;
        for p in 0..n {
            for q in (p + 1)..n {
                if set.iter().any(|&l| self.sides[l][p] != self.sides[l][q]) {
                    cut += 1;
                }
            }
        }
        cut as f64
    }

    fn coverage_form(&self) -> Option<CoverageFn> {
        let pairs = self.pair_index();
        let covers = self
            .sides
            .iter()
            .map(|side| {
                pairs
                    .iter()
                    .enumerate()
                    .filter(|(_, &(p, q))| side[p] != side[q])
                    .map(|(a, _)| a)
                    .collect()
            })
            .collect();
        Some(CoverageFn::new(covers, vec![1.0; pairs.len()], None))
    }
}

/// `min{1, inner(X) / demand}`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedFn<O> {
    inner: O,
    demand: f64,
}

impl<O: SubmodOracle> NormalizedFn<O> {
    pub fn new(inner: O, demand: f64) -> Result<Self, SubmodError> {
        if !demand.is_finite() || demand <= 0.0 {
            return Err(SubmodError::BadDemand(demand));
        }
        Ok(Self { inner, demand })
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }

    pub fn demand(&self) -> f64 {
        self.demand
    }
}

impl<O: SubmodOracle> SubmodOracle for NormalizedFn<O> {
    fn ground_size(&self) -> usize {
        self.inner.ground_size()
    }

    fn value(&self, set: &[SetId]) -> f64 {
        f64::min(1.0, self.inner.value(set) / self.demand)
    }

    fn lipschitz(&self) -> f64 {
        f64::min(1.0, self.inner.lipschitz() / self.demand)
    }

    fn coverage_form(&self) -> Option<CoverageFn> {
        self.inner.coverage_form().map(|f| f.scaled(self.demand, Some(1.0)))
    }
}

/// `factor * inner(X)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledFn<O> {
    inner: O,
    factor: f64,
}

impl<O: SubmodOracle> ScaledFn<O> {
    pub fn new(inner: O, factor: f64) -> Self {
        Self { inner, factor }
    }

    /// Rescales so that `max_i f({i}) = 1`.
    pub fn one_lipschitz(inner: O) -> Self {
        let l = inner.lipschitz();
        let factor = if l > 0.0 { 1.0 / l } else { 1.0 };
        Self { inner, factor }
    }

    pub fn factor(&self) -> f64 {
        self.factor
    }
}

impl<O: SubmodOracle> SubmodOracle for ScaledFn<O> {
    fn ground_size(&self) -> usize {
        self.inner.ground_size()
    }

    fn value(&self, set: &[SetId]) -> f64 {
        self.factor * self.inner.value(set)
    }

    fn lipschitz(&self) -> f64 {
        self.factor * self.inner.lipschitz()
    }

    fn coverage_form(&self) -> Option<CoverageFn> {
        self.inner.coverage_form().map(|f| f.scaled(1.0 / self.factor, None))
    }
}

/// Memoizes `value` keyed by the sorted, deduplicated argument in a bounded
/// LRU cache. The cache sits behind a mutex so the wrapper stays `Sync`.
pub struct Memoized<O> {
    inner: O,
    cache: Mutex<LruCache<Vec<SetId>, f64>>,
}

impl<O: SubmodOracle> Memoized<O> {
    pub fn new(inner: O, capacity: usize) -> Self {
        let cap = NonZeroUsize::new(capacity.max(1)).expect("positive capacity");
        Self {
            inner,
            cache: Mutex::new(LruCache::new(cap)),
        }
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }
}

impl<O: SubmodOracle> SubmodOracle for Memoized<O> {
    fn ground_size(&self) -> usize {
        self.inner.ground_size()
    }

    fn value(&self, set: &[SetId]) -> f64 {
        let mut key = set.to_vec();
        key.sort_unstable();
        key.dedup();
        if let Some(&v) = self.cache.lock().expect("memo cache poisoned").get(&key) {
            return v;
        }
        let v = self.inner.value(&key);
        self.cache.lock().expect("memo cache poisoned").put(key, v);
        v
    }

    fn lipschitz(&self) -> f64 {
        self.inner.lipschitz()
    }

    fn coverage_form(&self) -> Option<CoverageFn> {
        self.inner.coverage_form()
    }
}

/// Sample count `ceil(8 ln(2/delta) / eps^2)` for an additive `eps`
/// estimate of a `[0,1]`-valued mean with failure probability `delta`.
pub fn default_samples(eps: f64, delta: f64) -> usize {
    (8.0 * (2.0 / delta).ln() / (eps * eps)).ceil() as usize
}

/// Draws `R` from the product distribution with marginals `x`.
pub fn sample_set(x: &[f64], rng: &mut rng::Rng) -> Vec<SetId> {
    x.iter()
        .enumerate()
        .filter(|(_, &p)| rng.random::<f64>() < p)
        .map(|(i, _)| i)
        .collect()
}

/// Mean and standard error of `f(R)` over `samples` independent draws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

pub fn multilinear_sample<O: SubmodOracle + ?Sized>(oracle: &O, x: &[f64], samples: usize, seed: u64) -> Estimate {
    let samples = samples.max(1);
    let mut rng = rng::from_seed(seed);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..samples {
        let v = oracle.value(&sample_set(x, &mut rng));
        sum += v;
        sum_sq += v * v;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = if samples > 1 {
        ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Estimate {
        mean,
        std_error: (var / n).sqrt(),
        samples,
    }
}

/// Monte-Carlo estimate of the multilinear extension at `x`.
pub fn multilinear_estimate<O: SubmodOracle + ?Sized>(oracle: &O, x: &[f64], samples: usize, seed: u64) -> f64 {
    multilinear_sample(oracle, x, samples, seed).mean
}

/// Exact multilinear extension by summing over all `2^n` subsets.
pub fn multilinear_exact<O: SubmodOracle + ?Sized>(oracle: &O, x: &[f64]) -> Result<f64, SubmodError> {
    let n = oracle.ground_size();
    if n > EXACT_LIMIT {
        return Err(SubmodError::GroundTooLarge {
            size: n,
            limit: EXACT_LIMIT,
        });
    }
    let mut total = 0.0;
    let mut members = Vec::with_capacity(n);
    for mask in 0u32..(1u32 << n) {
        let mut p = 1.0;
        members.clear();
        for (i, &xi) in x.iter().enumerate().take(n) {
            if mask >> i & 1 == 1 {
                p *= xi;
                members.push(i);
            } else {
                p *= 1.0 - xi;
            }
        }
        if p != 0.0 {
            total += p * oracle.value(&members);
        }
    }
    Ok(total)
}

/// Coverage extension of any oracle with a weighted-coverage form.
pub fn tilde_eval<O: SubmodOracle + ?Sized>(oracle: &O, x: &[f64]) -> Option<f64> {
    oracle.coverage_form().map(|f| f.tilde(x))
}
