//! Bicriteria algorithm for multiple submodular covering constraints.
//!
//! Every constraint is a normalized monotone submodular `f_j` with demand 1.
//! A fractional point `x` is found first (an exact LP over the coverage
//! extension, or continuous greedy on the multilinear extension). Then `l`
//! independent product-distribution samples are unioned and any constraint
//! still below `1 - 1/e - 2 eps` is repaired with [`greedy_fix_constraint`].
//!
//! [`point_split_build`] turns the planar point-splitting problem into such an
//! instance, one pair-cut constraint per point set.

use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::greedy::{greedy_fix_constraint, GreedyError};
use crate::lp::{solve_lp, Direction, LinearProgram, LpError, LpStatus, Sense};
use crate::psc::one_minus_inv_e;
use crate::rng;
use crate::setsys::{SetId, Solution, TOL};
use crate::submod::{
    default_samples, multilinear_estimate, sample_set, DynOracle, Line, NormalizedFn, PairCutFn, Point, SubmodError,
    SubmodOracle,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MulticoverError {
    #[error("constraint {constraint} has ground size {ground}, expected {expected}")]
    GroundMismatch {
        constraint: usize,
        ground: usize,
        expected: usize,
    },
    #[error("weight of element {0} is negative or not finite")]
    BadWeight(usize),
    #[error("epsilon = {0} must lie in (0, 1)")]
    BadEpsilon(f64),
    #[error("unreachable demand: constraint {constraint} reaches only {value} on the whole ground set")]
    Unreachable { constraint: usize, value: f64 },
    #[error("constraint {0} has no weighted-coverage form; use the continuous_greedy backend")]
    NeedsCoverageForm(usize),
    #[error("infeasible: no fractional solution within budget {0}")]
    Infeasible(f64),
    #[error("points {a:?} and {b:?} coincide")]
    DuplicatePoint { a: (usize, usize), b: (usize, usize) },
    #[error("points {0:?} are collinear")]
    Collinear([(usize, usize); 3]),
    #[error("point {point} lies on line {line}")]
    PointOnLine { line: usize, point: usize },
    #[error("split fraction beta = {0} must lie in (0, 1]")]
    BadBeta(f64),
    #[error(transparent)]
    Submod(#[from] SubmodError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Greedy(#[from] GreedyError),
}

pub type Constraint = NormalizedFn<DynOracle>;

/// `min w(S)` subject to `f_j(S) >= 1` for every normalized constraint.
#[derive(Clone)]
pub struct MultiSubmodInstance {
    weights: Vec<f64>,
    constraints: Vec<Constraint>,
    sparsity: usize,
}

impl std::fmt::Debug for MultiSubmodInstance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MultiSubmodInstance")
            .field("ground_size", &self.ground_size())
            .field("constraints", &self.constraints.len())
            .field("sparsity", &self.sparsity)
            .finish()
    }
}

impl MultiSubmodInstance {
    pub fn new(weights: Vec<f64>, constraints: Vec<Constraint>) -> Result<Self, MulticoverError> {
        let m = weights.len();
        if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(MulticoverError::BadWeight(i));
        }
        for (j, c) in constraints.iter().enumerate() {
            if c.ground_size() != m {
                return Err(MulticoverError::GroundMismatch {
                    constraint: j,
                    ground: c.ground_size(),
                    expected: m,
                });
            }
        }
        let sparsity = (0..m)
            .map(|i| constraints.iter().filter(|c| c.value(&[i]) > 0.0).count())
            .max()
            .unwrap_or(0);
        Ok(Self {
            weights,
            constraints,
            sparsity,
        })
    }

    /// Normalizes each `(oracle, demand)` pair.
    pub fn from_demands(weights: Vec<f64>, constraints: Vec<(DynOracle, f64)>) -> Result<Self, MulticoverError> {
        let normalized = constraints
            .into_iter()
            .map(|(o, d)| NormalizedFn::new(o, d))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(weights, normalized)
    }

    pub fn ground_size(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn n_constraints(&self) -> usize {
        self.constraints.len()
    }

    /// Largest number of constraints any single element is active in.
    pub fn sparsity(&self) -> usize {
        self.sparsity
    }

    pub fn cost(&self, set: &[SetId]) -> f64 {
        set.iter().map(|&i| self.weights[i]).fold(0.0, |a, b| a + b)
    }

    pub fn values(&self, set: &[SetId]) -> Vec<f64> {
        self.constraints.iter().map(|c| c.value(set)).collect()
    }

    pub fn is_feasible(&self, set: &[SetId]) -> bool {
        self.values(set).iter().all(|&v| v >= 1.0 - TOL)
    }

    /// Errors when some constraint cannot reach 1 even on the full ground set.
    pub fn check_reachable(&self) -> Result<(), MulticoverError> {
        let all: Vec<SetId> = (0..self.ground_size()).collect();
        for (j, c) in self.constraints.iter().enumerate() {
            let value = c.value(&all);
            if value < 1.0 - TOL {
                return Err(MulticoverError::Unreachable { constraint: j, value });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Lp,
    ContinuousGreedy,
}

impl std::str::FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lp" => Ok(Self::Lp),
            "continuous_greedy" | "cg" => Ok(Self::ContinuousGreedy),
            other => Err(format!("unknown backend {other:?} (expected lp or continuous_greedy)")),
        }
    }
}

/// Which extension the certified values refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extension {
    /// Coverage extension `f~`; the multilinear value is at least `(1 - 1/e)` times it.
    Coverage,
    /// Lower confidence bound on the multilinear extension `F`.
    Multilinear,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FractionalSolution {
    pub x: Vec<f64>,
    pub certified: Vec<f64>,
    pub extension: Extension,
    /// Budget the solution was computed under; `w . x <= budget`.
    pub budget: f64,
}

impl FractionalSolution {
    pub fn cost(&self, weights: &[f64]) -> f64 {
        weights.iter().zip(&self.x).map(|(w, x)| w * x).fold(0.0, |a, b| a + b)
    }

    /// Guaranteed lower bound on `F_j(x)`.
    pub fn multilinear_lower_bounds(&self) -> Vec<f64> {
        match self.extension {
            Extension::Coverage => self.certified.iter().map(|v| one_minus_inv_e() * v).collect(),
            Extension::Multilinear => self.certified.clone(),
        }
    }
}

fn check_epsilon(epsilon: f64) -> Result<(), MulticoverError> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(MulticoverError::BadEpsilon(epsilon))
    }
}

pub fn solve_fractional(
    instance: &MultiSubmodInstance,
    epsilon: f64,
    backend: Backend,
    seed: u64,
) -> Result<FractionalSolution, MulticoverError> {
    check_epsilon(epsilon)?;
    instance.check_reachable()?;
    match backend {
        Backend::Lp => solve_lp_backend(instance),
        Backend::ContinuousGreedy => solve_continuous_greedy(instance, epsilon, seed, &CgOptions::default()),
    }
}

/// `min w . x` subject to `f~_j(x) >= 1`, with one variable per coverage atom.
pub fn solve_lp_backend(instance: &MultiSubmodInstance) -> Result<FractionalSolution, MulticoverError> {
    let m = instance.ground_size();
    let forms = instance
        .constraints
        .iter()
        .enumerate()
        .map(|(j, c)| c.coverage_form().ok_or(MulticoverError::NeedsCoverageForm(j)))
        .collect::<Result<Vec<_>, _>>()?;

    let mut lp = LinearProgram::new(Direction::Minimize);
    for i in 0..m {
        let v = lp.add_var(format!("x{i}"), 0.0, f64::INFINITY);
        lp.set_objective_coeff(v, instance.weights[i]);
    }
    for (j, form) in forms.iter().enumerate() {
        let mut coverers: Vec<Vec<usize>> = vec![Vec::new(); form.n_atoms()];
        for (i, atoms) in form.covers().iter().enumerate() {
            for &a in atoms {
                coverers[a].push(i);
            }
        }
        let mut demand_terms = Vec::new();
        for (a, who) in coverers.iter().enumerate() {
            let weight = form.atom_weights()[a];
            if who.is_empty() || weight <= 0.0 {
                continue;
            }
            let z = lp.add_var(format!("z{j}_{a}"), 0.0, 1.0);
            let mut link = vec![(z, 1.0)];
            link.extend(who.iter().map(|&i| (i, -1.0)));
            lp.add_constraint(format!("link{j}_{a}"), link, Sense::Le, 0.0);
            demand_terms.push((z, weight));
        }
        lp.add_constraint(format!("demand{j}"), demand_terms, Sense::Ge, 1.0);
    }
    let sol = solve_lp(&lp)?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return Err(MulticoverError::Infeasible(instance.cost(&(0..m).collect::<Vec<_>>()))),
        _ => return Err(LpError::Unbounded.into()),
    }
    let x: Vec<f64> = sol.values[..m].iter().map(|v| v.clamp(0.0, 1.0)).collect();
    let certified = forms.iter().map(|f| f.tilde(&x)).collect();
    let budget = instance
        .weights
        .iter()
        .zip(&x)
        .map(|(w, v)| w * v)
        .fold(0.0, |a, b| a + b);
    Ok(FractionalSolution {
        x,
        certified,
        extension: Extension::Coverage,
        budget,
    })
}

/// Sampling parameters for the continuous-greedy backend.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgOptions {
    /// Samples per step for the marginal estimates.
    pub step_samples: usize,
    /// Failure probability budget for the final certification.
    pub delta: f64,
}

impl Default for CgOptions {
    fn default() -> Self {
        Self {
            step_samples: 400,
            delta: 0.01,
        }
    }
}

struct CgRun {
    x: Vec<f64>,
    lower: Vec<f64>,
}

/// Continuous greedy at a fixed budget; `lower` are lower confidence bounds
/// on `F_j(x)` at additive error `eps / 2`.
fn continuous_greedy_at(
    instance: &MultiSubmodInstance,
    budget: f64,
    epsilon: f64,
    seed: u64,
    options: &CgOptions,
) -> Result<CgRun, MulticoverError> {
    let m = instance.ground_size();
    let h = instance.n_constraints();
    let steps = (1.0 / epsilon).ceil() as usize;
    let dt = 1.0 / steps as f64;
    let mut x = vec![0.0; m];
    let mut rng = rng::stream(seed, 0);

    for _ in 0..steps {
        let mut marg = vec![vec![0.0; m]; h];
        let mut current = vec![0.0; h];
        let mut with = Vec::with_capacity(m + 1);
        for _ in 0..options.step_samples {
            let r = sample_set(&x, &mut rng);
            let mut in_r = vec![false; m];
            for &i in &r {
                in_r[i] = true;
            }
            for (j, c) in instance.constraints.iter().enumerate() {
                let base = c.value(&r);
                current[j] += base;
                for i in (0..m).filter(|&i| !in_r[i]) {
                    with.clear();
                    with.extend_from_slice(&r);
                    with.push(i);
                    marg[j][i] += c.value(&with) - base;
                }
            }
        }
        let n = options.step_samples as f64;

        let mut lp = LinearProgram::new(Direction::Maximize);
        for i in 0..m {
            lp.add_var(format!("v{i}"), 0.0, 1.0);
        }
        let t = lp.add_var("t", 0.0, 1.0);
        lp.set_objective_coeff(t, 1.0);
        lp.add_constraint(
            "budget",
            instance.weights.iter().copied().enumerate().collect(),
            Sense::Le,
            budget,
        );
        for j in 0..h {
            let residual = (1.0 - current[j] / n).max(0.0);
            if residual <= TOL {
                continue;
            }
            let mut terms: Vec<(usize, f64)> = (0..m)
                .filter(|&i| marg[j][i] > 0.0)
                .map(|i| (i, marg[j][i] / n))
                .collect();
            terms.push((t, -residual));
            lp.add_constraint(format!("gain{j}"), terms, Sense::Ge, 0.0);
        }
        let dir = solve_lp(&lp)?.optimal()?;
        for (xi, d) in x.iter_mut().zip(&dir.values) {
            *xi = (*xi + dt * d.clamp(0.0, 1.0)).min(1.0);
        }
    }

    let samples = default_samples(epsilon / 2.0, options.delta / h.max(1) as f64);
    let lower = instance
        .constraints
        .iter()
        .enumerate()
        .map(|(j, c)| multilinear_estimate(c, &x, samples, rng::derive(seed, 1 + j as u64)) - epsilon / 2.0)
        .collect();
    Ok(CgRun { x, lower })
}

/// Binary search over the budget for the smallest one at which continuous
/// greedy certifies `F_j(x) >= 1 - 1/e - eps` for every constraint.
pub fn solve_continuous_greedy(
    instance: &MultiSubmodInstance,
    epsilon: f64,
    seed: u64,
    options: &CgOptions,
) -> Result<FractionalSolution, MulticoverError> {
    check_epsilon(epsilon)?;
    let target = one_minus_inv_e() - epsilon;
    let total: f64 = instance.weights.iter().sum();
    let ok = |run: &CgRun| run.lower.iter().all(|&v| v >= target - TOL);

    let mut probe = 0u64;
    let mut attempt = |b: f64| {
        probe += 1;
        continuous_greedy_at(instance, b, epsilon, rng::derive(seed, probe), options)
    };

    let top = attempt(total)?;
    if !ok(&top) {
        return Err(MulticoverError::Infeasible(total));
    }
    let (mut lo, mut hi) = (0.0, total);
    let mut best = top;
    // relative precision eps/4 is finer than the absolute eps * w(N)
    while hi - lo > (0.25 * epsilon * hi).max(1e-9 * total) {
        let mid = 0.5 * (lo + hi);
        let run = attempt(mid)?;
        if ok(&run) {
            hi = mid;
            best = run;
        } else {
            lo = mid;
        }
    }
    Ok(FractionalSolution {
        x: best.x,
        certified: best.lower,
        extension: Extension::Multilinear,
        budget: hi,
    })
}

/// `max(1, ceil(ln r / eps))`.
pub fn rounding_rounds(sparsity: usize, epsilon: f64) -> usize {
    let r = sparsity.max(1) as f64;
    ((r.ln() / epsilon).ceil() as usize).max(1)
}

/// Unions `l` product-distribution samples of `x`, then repairs every
/// constraint below `1 - 1/e - 2 eps`.
pub fn round_and_alter(
    instance: &MultiSubmodInstance,
    x: &[f64],
    epsilon: f64,
    seed: u64,
) -> Result<Solution, MulticoverError> {
    check_epsilon(epsilon)?;
    let m = instance.ground_size();
    let rounds = rounding_rounds(instance.sparsity, epsilon);
    let target = one_minus_inv_e() - 2.0 * epsilon;
    let clamped: Vec<f64> = x.iter().map(|v| v.clamp(0.0, 1.0)).collect();

    let mut in_s = vec![false; m];
    for k in 0..rounds {
        let mut rng = rng::stream(seed, k as u64);
        for i in sample_set(&clamped, &mut rng) {
            in_s[i] = true;
        }
    }
    let sampled: Vec<SetId> = (0..m).filter(|&i| in_s[i]).collect();
    let sample_cost = instance.cost(&sampled);

    let mut chosen = in_s.clone();
    let mut fixed = 0usize;
    for c in &instance.constraints {
        if c.value(&sampled) < target {
            fixed += 1;
            for i in greedy_fix_constraint(c, 1.0, &instance.weights)? {
                chosen[i] = true;
            }
        }
    }
    let chosen: Vec<SetId> = (0..m).filter(|&i| chosen[i]).collect();
    let coverage = instance.values(&chosen);
    for (j, &v) in coverage.iter().enumerate() {
        assert!(v >= target - TOL, "constraint {j} at {v} after alteration");
    }
    let cost = instance.cost(&chosen);
    let mut sol = Solution {
        chosen,
        cost,
        coverage,
        seed: Some(seed),
        trace: Default::default(),
    };
    sol.trace.insert("rounds".into(), rounds as f64);
    sol.trace.insert("sample_cost".into(), sample_cost);
    sol.trace.insert("fix_cost".into(), cost - sample_cost);
    sol.trace.insert("fixed_constraints".into(), fixed as f64);
    Ok(sol)
}

/// Fractional solve followed by rounding, both driven by `seed`.
pub fn solve_multi(
    instance: &MultiSubmodInstance,
    epsilon: f64,
    backend: Backend,
    seed: u64,
) -> Result<(FractionalSolution, Solution), MulticoverError> {
    let frac = solve_fractional(instance, epsilon, backend, rng::derive(seed, 0))?;
    let mut sol = round_and_alter(instance, &frac.x, epsilon, rng::derive(seed, 1))?;
    sol.seed = Some(seed);
    sol.trace
        .insert("fractional_cost".into(), frac.cost(instance.weights()));
    Ok((frac, sol))
}

/// Point-splitting instance: candidate lines are the ground set.
#[derive(Debug, Clone)]
pub struct PointSplit {
    pub instance: MultiSubmodInstance,
    pub lines: Vec<Line>,
    pub point_sets: Vec<Vec<Point>>,
    /// Index of the point set behind each constraint (sets of fewer than two
    /// points have zero demand and no constraint).
    pub constraint_sets: Vec<usize>,
    pub beta: f64,
}

fn scale_of(points: &[Point]) -> f64 {
    points.iter().map(|p| p.x.abs().max(p.y.abs())).fold(1.0, f64::max)
}

/// Rejects coincident points and collinear triples in the union of the sets.
pub fn check_general_position(point_sets: &[Vec<Point>]) -> Result<(), MulticoverError> {
    let labeled: Vec<((usize, usize), Point)> = point_sets
        .iter()
        .enumerate()
        .flat_map(|(s, ps)| ps.iter().enumerate().map(move |(i, &p)| ((s, i), p)))
        .collect();
    let all: Vec<Point> = labeled.iter().map(|&(_, p)| p).collect();
    let tol = 1e-7 * scale_of(&all);
    let n = labeled.len();
    for a in 0..n {
        for b in (a + 1)..n {
            let (pa, pb) = (labeled[a].1, labeled[b].1);
            let len = (pb.x - pa.x).hypot(pb.y - pa.y);
            if len <= tol {
                return Err(MulticoverError::DuplicatePoint {
                    a: labeled[a].0,
                    b: labeled[b].0,
                });
            }
            for c in (b + 1)..n {
                let pc = labeled[c].1;
                let cross = (pb.x - pa.x) * (pc.y - pa.y) - (pb.y - pa.y) * (pc.x - pa.x);
                let (lac, lbc) = ((pc.x - pa.x).hypot(pc.y - pa.y), (pc.x - pb.x).hypot(pc.y - pb.y));
                // smallest distance of one of the three points to the line through the other two
                let height = cross.abs() / len.max(lac).max(lbc);
                if height <= tol {
                    return Err(MulticoverError::Collinear([labeled[a].0, labeled[b].0, labeled[c].0]));
                }
            }
        }
    }
    Ok(())
}

fn line_through(p: Point, q: Point) -> Line {
    let (a, b) = (q.y - p.y, p.x - q.x);
    let norm = a.hypot(b);
    let (a, b) = (a / norm, b / norm);
    Line::new(a, b, -(a * p.x + b * p.y))
}

/// Lines through every pair of points of the union, perturbed by a tiny
/// offset four ways so the pair lands on each combination of sides. Lines
/// inducing the same split of the points (up to swapping sides) are kept once,
/// and lines with every point on one side are dropped.
pub fn candidate_lines(points: &[Point]) -> Vec<Line> {
    let n = points.len();
    let delta = 1e-9 * scale_of(points);
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for p in 0..n {
        for q in (p + 1)..n {
            let base = line_through(points[p], points[q]);
            let normal = Point::new(base.a, base.b);
            for (sp, sq) in [(1.0, 1.0), (-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0)] {
                let pp = Point::new(points[p].x + sp * delta * normal.x, points[p].y + sp * delta * normal.y);
                let qq = Point::new(points[q].x + sq * delta * normal.x, points[q].y + sq * delta * normal.y);
                let mut line = line_through(pp, qq);
                if line.a * base.a + line.b * base.b < 0.0 {
                    line = Line::new(-line.a, -line.b, -line.c);
                }
                let evals: Vec<f64> = points.iter().map(|&pt| line.eval(pt)).collect();
                if evals.iter().any(|v| v.abs() <= ON_LINE_TOL) {
                    continue;
                }
                // every other point keeps its side relative to the unperturbed line
                let stable = (0..n)
                    .filter(|&k| k != p && k != q)
                    .all(|k| (evals[k] > 0.0) == (base.eval(points[k]) > 0.0));
                if !stable {
                    continue;
                }
                let flip = evals[0] > 0.0;
                let pattern: Vec<bool> = evals.iter().map(|&v| (v > 0.0) != flip).collect();
                if pattern.iter().all(|&s| !s) {
                    continue;
                }
                if seen.insert(pattern) {
                    out.push(line);
                }
            }
        }
    }
    out
}

/// Builds the cover instance asking each `P_i` to have at least
/// `beta k_i (k_i - 1) / 2` of its pairs separated (a quarter of them with the
/// default `beta = 1/2`).
pub fn point_split_build(point_sets: &[Vec<Point>], beta: f64) -> Result<PointSplit, MulticoverError> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(MulticoverError::BadBeta(beta));
    }
    check_general_position(point_sets)?;
    let all: Vec<Point> = point_sets.iter().flatten().copied().collect();
    let lines = candidate_lines(&all);
    let mut constraints: Vec<(DynOracle, f64)> = Vec::new();
    let mut constraint_sets = Vec::new();
    for (s, ps) in point_sets.iter().enumerate() {
        let k = ps.len() as f64;
        let demand = beta * k * (k - 1.0) / 2.0;
        if demand <= TOL {
            continue;
        }
        constraints.push((Arc::new(PairCutFn::new(ps, &lines)), demand));
        constraint_sets.push(s);
    }
    let instance = MultiSubmodInstance::from_demands(vec![1.0; lines.len()], constraints)?;
    Ok(PointSplit {
        instance,
        lines,
        point_sets: point_sets.to_vec(),
        constraint_sets,
        beta,
    })
}

/// Points closer than this to a line count as lying on it.
pub const ON_LINE_TOL: f64 = 1e-11;

/// Points grouped by their side vector with respect to a set of lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cells {
    /// `labels[p][l]`: point `p` is on the positive side of line `l`.
    pub labels: Vec<Vec<bool>>,
    /// Cell index of each point, numbered by first appearance.
    pub cell_of: Vec<usize>,
    pub n_cells: usize,
}

impl Cells {
    pub fn members(&self, cell: usize) -> Vec<usize> {
        (0..self.cell_of.len()).filter(|&p| self.cell_of[p] == cell).collect()
    }
}

pub fn arrangement_cells(lines: &[Line], points: &[Point]) -> Result<Cells, MulticoverError> {
    let mut labels = Vec::with_capacity(points.len());
    for (p, &pt) in points.iter().enumerate() {
        let mut label = Vec::with_capacity(lines.len());
        for (l, line) in lines.iter().enumerate() {
            let v = line.eval(pt);
            if v.abs() <= ON_LINE_TOL {
                return Err(MulticoverError::PointOnLine { line: l, point: p });
            }
            label.push(v > 0.0);
        }
        labels.push(label);
    }
    let mut ids: std::collections::HashMap<&Vec<bool>, usize> = std::collections::HashMap::new();
    let mut cell_of = Vec::with_capacity(points.len());
    for label in &labels {
        let next = ids.len();
        cell_of.push(*ids.entry(label).or_insert(next));
    }
    let n_cells = ids.len();
    Ok(Cells {
        labels,
        cell_of,
        n_cells,
    })
}

impl PointSplit {
    pub fn chosen_lines(&self, chosen: &[SetId]) -> Vec<Line> {
        chosen.iter().map(|&i| self.lines[i]).collect()
    }

    /// Largest number of points of each set sharing one cell of the
    /// arrangement of the chosen lines.
    pub fn max_cell_loads(&self, chosen: &[SetId]) -> Result<Vec<usize>, MulticoverError> {
        let lines = self.chosen_lines(chosen);
        let all: Vec<Point> = self.point_sets.iter().flatten().copied().collect();
        let cells = arrangement_cells(&lines, &all)?;
        let mut loads = Vec::with_capacity(self.point_sets.len());
        let mut offset = 0;
        for ps in &self.point_sets {
            let mut count = vec![0usize; cells.n_cells];
            for p in offset..offset + ps.len() {
                count[cells.cell_of[p]] += 1;
            }
            loads.push(count.into_iter().max().unwrap_or(0));
            offset += ps.len();
        }
        Ok(loads)
    }
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

fn clip_to_box(line: &Line, (x0, y0, x1, y1): (f64, f64, f64, f64)) -> Option<(Point, Point)> {
    let mut hits = Vec::new();
    if line.b.abs() > TOL {
        for x in [x0, x1] {
            let y = -(line.a * x + line.c) / line.b;
            if y >= y0 - TOL && y <= y1 + TOL {
                hits.push(Point::new(x, y));
            }
        }
    }
    if line.a.abs() > TOL {
        for y in [y0, y1] {
            let x = -(line.b * y + line.c) / line.a;
            if x >= x0 - TOL && x <= x1 + TOL {
                hits.push(Point::new(x, y));
            }
        }
    }
    let first = *hits.first()?;
    let far = hits.iter().copied().max_by(|p, q| {
        let dp = (p.x - first.x).hypot(p.y - first.y);
        let dq = (q.x - first.x).hypot(q.y - first.y);
        dp.total_cmp(&dq)
    })?;
    Some((first, far))
}

/// SVG drawing of the point sets (one color each) and the given lines.
pub fn render_svg(point_sets: &[Vec<Point>], lines: &[Line]) -> String {
    let all: Vec<Point> = point_sets.iter().flatten().copied().collect();
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in &all {
        x0 = x0.min(p.x);
        y0 = y0.min(p.y);
        x1 = x1.max(p.x);
        y1 = y1.max(p.y);
    }
    if all.is_empty() {
        (x0, y0, x1, y1) = (0.0, 0.0, 1.0, 1.0);
    }
    let pad = 0.1 * (x1 - x0).max(y1 - y0).max(1e-6);
    let bbox = (x0 - pad, y0 - pad, x1 + pad, y1 + pad);
    let (w, h) = (bbox.2 - bbox.0, bbox.3 - bbox.1);
    let size = 600.0;
    let s = size / w.max(h);
    let tx = |p: Point| ((p.x - bbox.0) * s, (bbox.3 - p.y) * s);

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0}\" height=\"{:.0}\">",
        w * s,
        h * s
    );
    let _ = writeln!(out, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    for line in lines {
        if let Some((p, q)) = clip_to_box(line, bbox) {
            let ((ax, ay), (bx, by)) = (tx(p), tx(q));
            let _ = writeln!(
                out,
                "<line x1=\"{ax:.2}\" y1=\"{ay:.2}\" x2=\"{bx:.2}\" y2=\"{by:.2}\" stroke=\"#444\" stroke-width=\"1\"/>"
            );
        }
    }
    for (k, ps) in point_sets.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        for &p in ps {
            let (cx, cy) = tx(p);
            let _ = writeln!(out, "<circle cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"4\" fill=\"{color}\"/>");
        }
    }
    out.push_str("</svg>\n");
    out
}
