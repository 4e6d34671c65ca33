//! Covering Coverage Functions: KC-strengthened LP, threshold rounding and
//! per-row repair.
//!
//! Pipeline for a fractional `(x, z)`:
//!
//! 1. `Y1`: a set-cover subroutine covers the elements with `z_j >= tau`,
//!    fed `x'_i = min{1, x_i / tau}`.
//! 2. `Y2 = {i : x_i >= tau}`.
//! 3. `Y3`: `l` independent rounds, each taking `i` outside `Y1 + Y2` with
//!    probability `min{1, x_i / tau}`.
//! 4. Every row still short of its demand is fixed by
//!    [`modified_greedy_ccf_fix`].
//!
//! The LP is tightened by knapsack-cover cuts for the realized base
//! `D = Y1 + Y2` until it is KC-feasible for that base. If the round limit is
//! hit first, greedy on `sum_k min{b_k, f_k(X)}` is used instead.

use std::sync::Arc;

use thiserror::Error;

use crate::greedy::{aggregate_cover_greedy, modified_greedy_ccf_fix, GreedyError};
use crate::lp::{build_sc_lp, cutting_plane_solve, solve_lp, CutStatus, LpError, LpSolution};
use crate::psc::{one_minus_inv_e, BetaOracle, GreedyCover};
use crate::rng;
use crate::setsys::{validate, CcfInstance, ElementId, SetId, Solution, ValidationError, TOL};
use crate::submod::sample_set;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CcfError {
    #[error("invalid instance: {0:?}")]
    Invalid(Vec<ValidationError>),
    #[error("threshold tau = {0} must lie in (0, (1 - 1/e)/2)")]
    BadTau(f64),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Greedy(#[from] GreedyError),
}

/// Threshold `(1 - 1/e) / 4`.
pub fn default_tau() -> f64 {
    one_minus_inv_e() / 4.0
}

/// `ceil(1 + ln r / ln(1 / 0.78))`.
pub fn default_rounds(sparsity: usize) -> usize {
    let r = sparsity.max(1) as f64;
    (1.0 + r.ln() / (1.0f64 / 0.78).ln()).ceil() as usize
}

#[derive(Clone)]
pub struct CcfConfig {
    pub tau: f64,
    /// Sampling rounds; `None` picks [`default_rounds`] of the instance sparsity.
    pub rounds: Option<usize>,
    pub beta_oracle: Arc<dyn BetaOracle>,
    pub seed: u64,
    pub max_cut_rounds: usize,
}

impl std::fmt::Debug for CcfConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CcfConfig")
            .field("tau", &self.tau)
            .field("rounds", &self.rounds)
            .field("beta_oracle", &self.beta_oracle.name())
            .field("seed", &self.seed)
            .field("max_cut_rounds", &self.max_cut_rounds)
            .finish()
    }
}

impl Default for CcfConfig {
    fn default() -> Self {
        Self {
            tau: default_tau(),
            rounds: None,
            beta_oracle: Arc::new(GreedyCover),
            seed: 0,
            max_cut_rounds: 50,
        }
    }
}

impl CcfConfig {
    pub fn check(&self) -> Result<(), CcfError> {
        if self.tau > 0.0 && self.tau < one_minus_inv_e() / 2.0 {
            Ok(())
        } else {
            Err(CcfError::BadTau(self.tau))
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Elements with a positive coefficient in some row and `z_j >= tau`.
pub fn heavy_elements(instance: &CcfInstance, z: &[f64], tau: f64) -> Vec<ElementId> {
    let n = instance.system.n_elements();
    let mut relevant = vec![false; n];
    for row in &instance.rows {
        for (&e, &a) in &row.coeffs {
            if a > 0.0 {
                relevant[e] = true;
            }
        }
    }
    (0..n).filter(|&e| relevant[e] && z[e] >= tau - TOL).collect()
}

/// The deterministic part of the rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseCollection {
    pub heavy: Vec<ElementId>,
    pub y1: Vec<SetId>,
    pub y2: Vec<SetId>,
}

impl BaseCollection {
    /// `Y1 + Y2`, sorted.
    pub fn union(&self) -> Vec<SetId> {
        let mut d: Vec<SetId> = self.y1.iter().chain(&self.y2).copied().collect();
        d.sort_unstable();
        d.dedup();
        d
    }
}

pub fn base_collection(
    instance: &CcfInstance,
    lp: &LpSolution,
    tau: f64,
    oracle: &dyn BetaOracle,
) -> Result<BaseCollection, GreedyError> {
    let m = instance.system.n_sets();
    let x = &lp.values[..m];
    let z = &lp.values[m..];
    let heavy = heavy_elements(instance, z, tau);
    let x_scaled: Vec<f64> = x.iter().map(|&v| (v / tau).min(1.0)).collect();
    let y1 = if heavy.is_empty() {
        Vec::new()
    } else {
        let mut y1 = oracle.cover(&instance.system, &heavy, &x_scaled)?;
        y1.sort_unstable();
        y1
    };
    let y2 = (0..m).filter(|&i| x[i] >= tau - TOL).collect();
    Ok(BaseCollection { heavy, y1, y2 })
}

/// `min{1, x_i / tau}` outside the base, 0 inside.
pub fn sampling_probabilities(x: &[f64], base: &[SetId], tau: f64) -> Vec<f64> {
    let mut p: Vec<f64> = x.iter().map(|&v| (v / tau).clamp(0.0, 1.0)).collect();
    for &i in base {
        p[i] = 0.0;
    }
    p
}

/// Checks on one row relative to the base `D = Y1 + Y2`.
#[derive(Debug, Clone, PartialEq)]
pub struct RowAudit {
    pub row: usize,
    /// `b_k - f_k(D)`.
    pub residual: f64,
    /// `sum x'_i` over sets outside `D` whose marginal alone meets the residual.
    pub heavy_mass: f64,
    /// Cost of fixing the row starting from `D`.
    pub fix_cost: f64,
    /// `(1 + e) sum_{i in I_k} w_i x'_i`, `I_k` the sets outside `D` influencing the row.
    pub fix_bound: f64,
}

impl RowAudit {
    pub fn within_bound(&self) -> bool {
        self.fix_cost <= self.fix_bound + TOL
    }
}

pub fn audit_rows(instance: &CcfInstance, x: &[f64], base: &[SetId], tau: f64) -> Result<Vec<RowAudit>, GreedyError> {
    let system = &instance.system;
    let x_scaled: Vec<f64> = x.iter().map(|&v| (v / tau).min(1.0)).collect();
    let mut out = Vec::new();
    for k in 0..instance.n_rows() {
        let fix = modified_greedy_ccf_fix(instance, k, base)?;
        if fix.residual <= TOL {
            continue;
        }
        let heavy_mass = fix.heavy_sets.iter().map(|&i| x_scaled[i]).sum();
        let influencing: f64 = fix
            .heavy_sets
            .iter()
            .chain(&fix.light_sets)
            .map(|&i| system.weight(i) * x_scaled[i])
            .sum();
        out.push(RowAudit {
            row: k,
            residual: fix.residual,
            heavy_mass,
            fix_cost: system.cost(&fix.chosen),
            fix_bound: (1.0 + std::f64::consts::E) * influencing,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CcfReport {
    pub solution: Solution,
    pub status: CutStatus,
    pub cut_rounds: usize,
    pub lp_objective: f64,
    pub x: Vec<f64>,
    pub base: BaseCollection,
    pub y3: Vec<SetId>,
    /// `(row, sets added)` for each row repaired, in order.
    pub fixes: Vec<(usize, Vec<SetId>)>,
    pub audits: Vec<RowAudit>,
    /// `w(Y1)` over the set-cover relaxation optimum on the heavy elements.
    pub beta_effective: f64,
    pub rounds: usize,
}

fn fallback_report(
    instance: &CcfInstance,
    config: &CcfConfig,
    cut_rounds: usize,
    lp_objective: f64,
) -> Result<CcfReport, CcfError> {
    let chosen = aggregate_cover_greedy(instance)?;
    let mut solution = Solution::for_ccf(instance, chosen).with_seed(config.seed);
    solution.trace.insert("fallback".into(), 1.0);
    solution.trace.insert("lp".into(), lp_objective);
    Ok(CcfReport {
        solution,
        status: CutStatus::Fallback,
        cut_rounds,
        lp_objective,
        x: Vec::new(),
        base: BaseCollection {
            heavy: Vec::new(),
            y1: Vec::new(),
            y2: Vec::new(),
        },
        y3: Vec::new(),
        fixes: Vec::new(),
        audits: Vec::new(),
        beta_effective: 1.0,
        rounds: 0,
    })
}

pub fn solve_ccf_detailed(instance: &CcfInstance, config: &CcfConfig) -> Result<CcfReport, CcfError> {
    validate(instance).map_err(CcfError::Invalid)?;
    config.check()?;
    let system = &instance.system;
    let m = system.n_sets();
    let tau = config.tau;
    let oracle = config.beta_oracle.as_ref();

    let mut oracle_error = None;
    let cp = cutting_plane_solve(
        instance,
        |sol| match base_collection(instance, sol, tau, oracle) {
            Ok(b) => b.union(),
            Err(e) => {
                oracle_error.get_or_insert(e);
                Vec::new()
            }
        },
        config.max_cut_rounds,
    )?;
    if let Some(e) = oracle_error {
        return Err(e.into());
    }
    if cp.status == CutStatus::Fallback {
        return fallback_report(instance, config, cp.rounds, cp.solution.objective);
    }

    let x: Vec<f64> = cp.solution.values[..m].iter().map(|v| v.clamp(0.0, 1.0)).collect();
    let base = base_collection(instance, &cp.solution, tau, oracle)?;
    let d = base.union();

    let beta_effective = if base.heavy.is_empty() {
        1.0
    } else {
        let sc = solve_lp(&build_sc_lp(system, &base.heavy))?.optimal()?;
        let y1_cost = system.cost(&base.y1);
        if sc.objective > TOL {
            (y1_cost / sc.objective).max(1.0)
        } else {
            1.0
        }
    };

    let rounds = config.rounds.unwrap_or_else(|| default_rounds(instance.sparsity()));
    let probs = sampling_probabilities(&x, &d, tau);
    let mut in_sol = vec![false; m];
    for &i in &d {
        in_sol[i] = true;
    }
    let mut y3 = Vec::new();
    for t in 0..rounds {
        let mut rng = rng::stream(config.seed, t as u64);
        for i in sample_set(&probs, &mut rng) {
            if !in_sol[i] {
                in_sol[i] = true;
                y3.push(i);
            }
        }
    }
    y3.sort_unstable();

    let mut fixes = Vec::new();
    for k in 0..instance.n_rows() {
        let current: Vec<SetId> = (0..m).filter(|&i| in_sol[i]).collect();
        if instance.row_value(k, &current) >= instance.rows[k].demand - TOL {
            continue;
        }
        let fix = modified_greedy_ccf_fix(instance, k, &current)?;
        for &i in &fix.chosen {
            in_sol[i] = true;
        }
        fixes.push((k, fix.chosen));
    }
    let chosen: Vec<SetId> = (0..m).filter(|&i| in_sol[i]).collect();
    assert!(instance.is_feasible(&chosen), "CCF output misses a row after fixing");

    let audits = audit_rows(instance, &x, &d, tau)?;
    let mut solution = Solution::for_ccf(instance, chosen).with_seed(config.seed);
    let fix_cost: f64 = fixes.iter().map(|(_, f)| system.cost(f)).fold(0.0, |a, b| a + b);
    solution.trace.insert("lp".into(), cp.solution.objective);
    solution.trace.insert("y1".into(), system.cost(&base.y1));
    solution.trace.insert("y2".into(), system.cost(&base.y2));
    solution.trace.insert("y3".into(), system.cost(&y3));
    solution.trace.insert("fix".into(), fix_cost);
    solution.trace.insert("cut_rounds".into(), cp.rounds as f64);
    solution.trace.insert("beta_effective".into(), beta_effective);

    Ok(CcfReport {
        solution,
        status: cp.status,
        cut_rounds: cp.rounds,
        lp_objective: cp.solution.objective,
        x,
        base,
        y3,
        fixes,
        audits,
        beta_effective,
        rounds,
    })
}

pub fn solve_ccf(instance: &CcfInstance, config: &CcfConfig) -> Result<Solution, CcfError> {
    solve_ccf_detailed(instance, config).map(|r| r.solution)
}

/// Fraction of `trials` single sampling rounds on top of `base` after which
/// row `row` meets its demand.
pub fn per_row_success_probability(
    instance: &CcfInstance,
    row: usize,
    x: &[f64],
    base: &[SetId],
    tau: f64,
    trials: usize,
    seed: u64,
) -> f64 {
    let system = &instance.system;
    let demand = instance.rows[row].demand;
    if instance.row_value(row, base) >= demand - TOL {
        return 1.0;
    }
    let probs = sampling_probabilities(x, base, tau);
    let base_mask = system.covered_mask(base);
    let mut rng = rng::from_seed(seed);
    let mut hits = 0usize;
    for _ in 0..trials {
        let mut covered = base_mask.clone();
        for i in sample_set(&probs, &mut rng) {
            for &e in system.set(i) {
                covered[e] = true;
            }
        }
        if instance.row_value_mask(row, &covered) >= demand - TOL {
            hits += 1;
        }
    }
    hits as f64 / trials.max(1) as f64
}
