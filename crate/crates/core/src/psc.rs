//! Partial Set Cover by LP threshold splitting.
//!
//! For every guess of the heaviest set in an optimum (plus a branch with no
//! guess): drop the guessed set's elements and every heavier set, solve the
//! PSC relaxation on what remains, cover the elements with `z*_j >= tau`
//! through a set-cover subroutine fed the scaled solution
//! `x'_i = min{1, x*_i / tau}`, then let bang-per-buck greedy cover the rest
//! of the demand from the shallow elements. The cheapest branch wins.
//!
//! With `tau = 1 - 1/e` the result costs at most `e/(e-1) (beta + 1) OPT`,
//! where `beta` is the subroutine's ratio against the set-cover relaxation.

use std::sync::Arc;

use thiserror::Error;

use crate::greedy::{budgeted_greedy, greedy_set_cover, GreedyError};
use crate::lp::{build_psc_lp, build_sc_lp, solve_lp, LpError};
use crate::setsys::{validate, ElementId, PscInstance, SetId, SetSystem, Solution, ValidationError, TOL};

/// `1 - 1/e`.
pub fn one_minus_inv_e() -> f64 {
    1.0 - (-1.0f64).exp()
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PscError {
    #[error("invalid instance: {0:?}")]
    Invalid(Vec<ValidationError>),
    #[error("threshold tau = {0} must lie in (0, 1 - 1/e]")]
    BadTau(f64),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Greedy(#[from] GreedyError),
    #[error("no guess branch produced a feasible solution")]
    NoBranch,
}

/// A set-cover subroutine for the highly covered elements.
pub trait BetaOracle: Send + Sync {
    fn name(&self) -> &'static str;

    /// Covers every element of `targets`. `x_scaled` is a fractional set
    /// cover of the targets.
    fn cover(&self, system: &SetSystem, targets: &[ElementId], x_scaled: &[f64]) -> Result<Vec<SetId>, GreedyError>;
}

/// Bang-per-buck greedy; ignores the fractional solution.
#[derive(Debug, Clone, Copy, Default)]
pub struct GreedyCover;

impl BetaOracle for GreedyCover {
    fn name(&self) -> &'static str {
        "greedy"
    }

    fn cover(&self, system: &SetSystem, targets: &[ElementId], _: &[f64]) -> Result<Vec<SetId>, GreedyError> {
        greedy_set_cover(system, targets).map(|s| s.chosen)
    }
}

/// Picks every set with `x'_i >= 1/f`, `f` the largest frequency among the
/// targets.
#[derive(Debug, Clone, Copy, Default)]
pub struct FrequencyRounding;

impl BetaOracle for FrequencyRounding {
    fn name(&self) -> &'static str {
        "frequency"
    }

    fn cover(&self, system: &SetSystem, targets: &[ElementId], x_scaled: &[f64]) -> Result<Vec<SetId>, GreedyError> {
        if let Some(&e) = targets.iter().find(|&&e| system.frequency(e) == 0) {
            return Err(GreedyError::Uncoverable(e));
        }
        let f = targets.iter().map(|&e| system.frequency(e)).max().unwrap_or(0);
        if f == 0 {
            return Ok(Vec::new());
        }
        let threshold = 1.0 / f as f64 - TOL;
        let mut chosen: Vec<SetId> = (0..system.n_sets()).filter(|&i| x_scaled[i] >= threshold).collect();
        let covered = system.covered_mask(&chosen);
        let missing: Vec<ElementId> = targets.iter().copied().filter(|&e| !covered[e]).collect();
        if !missing.is_empty() {
            // only reachable through rounding noise in x_scaled
            chosen.extend(greedy_set_cover(system, &missing)?.chosen);
            chosen.sort_unstable();
            chosen.dedup();
        }
        Ok(chosen)
    }
}

pub fn beta_oracle_by_name(name: &str) -> Option<Arc<dyn BetaOracle>> {
    match name {
        "greedy" => Some(Arc::new(GreedyCover)),
        "frequency" => Some(Arc::new(FrequencyRounding)),
        _ => None,
    }
}

#[derive(Clone)]
pub struct PscConfig {
    pub tau: f64,
    pub beta_oracle: Arc<dyn BetaOracle>,
}

impl std::fmt::Debug for PscConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PscConfig")
            .field("tau", &self.tau)
            .field("beta_oracle", &self.beta_oracle.name())
            .finish()
    }
}

impl Default for PscConfig {
    fn default() -> Self {
        Self {
            tau: one_minus_inv_e(),
            beta_oracle: Arc::new(GreedyCover),
        }
    }
}

impl PscConfig {
    pub fn new(tau: f64, beta_oracle: Arc<dyn BetaOracle>) -> Result<Self, PscError> {
        if !(tau > 0.0 && tau <= one_minus_inv_e() + TOL) {
            return Err(PscError::BadTau(tau));
        }
        Ok(Self { tau, beta_oracle })
    }
}

/// Partition of elements by LP coverage: `(z >= tau, z < tau)`.
pub fn split_heavy_shallow(z: &[f64], tau: f64) -> (Vec<ElementId>, Vec<ElementId>) {
    (0..z.len()).partition(|&j| z[j] >= tau - TOL)
}

/// One guess branch, with everything needed to check the per-phase bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct PscBranch {
    pub guess: Option<SetId>,
    pub chosen: Vec<SetId>,
    pub cost: f64,
    pub guess_cost: f64,
    pub heavy_cost: f64,
    pub shallow_cost: f64,
    /// `sum_i w_i x*_i` of the residual relaxation.
    pub lp_value: f64,
    /// Heavy-cover cost over the set-cover relaxation optimum on the heavy
    /// elements (1 when there is nothing to cover).
    pub beta_effective: f64,
    /// Largest weight among the residual sets.
    pub max_residual_weight: f64,
    pub heavy: Vec<ElementId>,
    pub shallow_demand: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PscReport {
    pub solution: Solution,
    pub branches: Vec<PscBranch>,
    pub best: usize,
}

impl PscReport {
    /// Largest measured subroutine ratio over all branches.
    pub fn beta_effective(&self) -> f64 {
        self.branches.iter().map(|b| b.beta_effective).fold(1.0, f64::max)
    }

    pub fn best_branch(&self) -> Option<&PscBranch> {
        self.branches.get(self.best)
    }
}

fn run_branch(instance: &PscInstance, guess: Option<SetId>, config: &PscConfig) -> Result<Option<PscBranch>, PscError> {
    let system = &instance.system;
    let (guess_elems, keep_sets, guess_cost): (Vec<ElementId>, Vec<SetId>, f64) = match guess {
        Some(g) => (
            system.set(g).to_vec(),
            (0..system.n_sets())
                .filter(|&i| i != g && system.weight(i) <= system.weight(g))
                .collect(),
            system.weight(g),
        ),
        None => (Vec::new(), (0..system.n_sets()).collect(), 0.0),
    };
    let k_residual = instance.k.saturating_sub(guess_elems.len());
    let mut branch = PscBranch {
        guess,
        chosen: guess.into_iter().collect(),
        cost: guess_cost,
        guess_cost,
        heavy_cost: 0.0,
        shallow_cost: 0.0,
        lp_value: 0.0,
        beta_effective: 1.0,
        max_residual_weight: 0.0,
        heavy: Vec::new(),
        shallow_demand: 0,
    };
    if k_residual == 0 {
        return Ok(Some(branch));
    }

    let (selected, map) = system.select_sets(&keep_sets);
    let mut in_guess = vec![false; system.n_elements()];
    for &e in &guess_elems {
        in_guess[e] = true;
    }
    let keep_elems: Vec<ElementId> = (0..system.n_elements()).filter(|&e| !in_guess[e]).collect();
    let (residual, _) = selected.restrict(&keep_elems);
    if residual.coverable().len() < k_residual {
        return Ok(None);
    }
    branch.max_residual_weight = residual.weights().iter().copied().fold(0.0, f64::max);

    let m = residual.n_sets();
    let lp_sol = solve_lp(&build_psc_lp(&PscInstance::new(residual.clone(), k_residual)))?;
    if !lp_sol.is_optimal() {
        return Ok(None);
    }
    let x = &lp_sol.values[..m];
    let z = &lp_sol.values[m..];
    branch.lp_value = lp_sol.objective;

    let (heavy, _) = split_heavy_shallow(z, config.tau);
    let x_scaled: Vec<f64> = x.iter().map(|&v| (v / config.tau).min(1.0)).collect();
    let heavy_sets = if heavy.is_empty() {
        Vec::new()
    } else {
        config.beta_oracle.cover(&residual, &heavy, &x_scaled)?
    };
    branch.heavy_cost = residual.cost(&heavy_sets);
    if !heavy.is_empty() {
        let sc = solve_lp(&build_sc_lp(&residual, &heavy))?.optimal()?;
        branch.beta_effective = if sc.objective > TOL {
            (branch.heavy_cost / sc.objective).max(1.0)
        } else {
            1.0
        };
    }
    branch.heavy = heavy;

    let covered = residual.covered_mask(&heavy_sets);
    let already = covered.iter().filter(|&&c| c).count();
    let mut chosen_local = heavy_sets;
    if already < k_residual {
        let need = k_residual - already;
        branch.shallow_demand = need;
        let targets: Vec<ElementId> = (0..residual.n_elements()).filter(|&e| !covered[e]).collect();
        let trace = budgeted_greedy(&residual, &targets, f64::INFINITY, Some(need));
        if trace.covered < need {
            return Ok(None);
        }
        branch.shallow_cost = trace.cost;
        chosen_local.extend(trace.picked);
    }
    branch.chosen.extend(map.to_original(&chosen_local));
    branch.chosen.sort_unstable();
    branch.chosen.dedup();
    branch.cost = system.cost(&branch.chosen);
    Ok(Some(branch))
}

/// Runs every guess branch and returns the cheapest together with the
/// per-branch records.
pub fn solve_psc_detailed(instance: &PscInstance, config: &PscConfig) -> Result<PscReport, PscError> {
    validate(instance).map_err(PscError::Invalid)?;
    if instance.k == 0 {
        let solution = Solution::for_psc(instance, Vec::new());
        return Ok(PscReport {
            solution,
            branches: Vec::new(),
            best: 0,
        });
    }
    let mut branches = Vec::new();
    let guesses = std::iter::once(None).chain((0..instance.system.n_sets()).map(Some));
    for guess in guesses {
        if let Some(b) = run_branch(instance, guess, config)? {
            branches.push(b);
        }
    }
    let best = branches
        .iter()
        .enumerate()
        .fold(None::<usize>, |acc, (i, b)| match acc {
            Some(j) if branches[j].cost <= b.cost + TOL => Some(j),
            _ => Some(i),
        })
        .ok_or(PscError::NoBranch)?;
    let b = &branches[best];
    let mut solution = Solution::for_psc(instance, b.chosen.clone());
    assert!(
        solution.coverage[0] + TOL >= instance.k as f64,
        "PSC output covers {} < k = {}",
        solution.coverage[0],
        instance.k
    );
    solution.trace.insert("guess".into(), b.guess_cost);
    solution.trace.insert("heavy".into(), b.heavy_cost);
    solution.trace.insert("shallow".into(), b.shallow_cost);
    solution.trace.insert("lp".into(), b.lp_value);
    let report = PscReport {
        solution,
        branches,
        best,
    };
    let beta = report.beta_effective();
    let mut report = report;
    report.solution.trace.insert("beta_effective".into(), beta);
    Ok(report)
}

pub fn solve_psc(instance: &PscInstance, config: &PscConfig) -> Result<Solution, PscError> {
    solve_psc_detailed(instance, config).map(|r| r.solution)
}

/// `e/(e-1) (beta + 1)`.
pub fn psc_ratio_bound(beta: f64) -> f64 {
    (beta + 1.0) / one_minus_inv_e()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(n: usize, sets: Vec<Vec<usize>>, w: Vec<f64>, k: usize) -> PscInstance {
        PscInstance::new(SetSystem::new(n, sets, w).unwrap(), k)
    }

    #[test]
    fn zero_demand_is_free() {
        let i = inst(3, vec![vec![0, 1, 2]], vec![1.0], 0);
        let sol = solve_psc(&i, &PscConfig::default()).unwrap();
        assert!(sol.chosen.is_empty());
        assert_eq!(sol.cost, 0.0);
    }

    #[test]
    fn single_full_set() {
        let i = inst(3, vec![vec![0, 1, 2]], vec![4.0], 3);
        let sol = solve_psc(&i, &PscConfig::default()).unwrap();
        assert_eq!(sol.chosen, vec![0]);
    }

    #[test]
    fn picks_cheap_partial_cover() {
        let i = inst(
            6,
            vec![vec![0, 1, 2], vec![3, 4, 5], vec![0, 1, 2, 3, 4, 5]],
            vec![1.0, 5.0, 10.0],
            3,
        );
        let sol = solve_psc(&i, &PscConfig::default()).unwrap();
        assert_eq!(sol.chosen, vec![0]);
    }

    #[test]
    fn rejects_bad_tau_and_invalid_instance() {
        assert!(PscConfig::new(0.9, Arc::new(GreedyCover)).is_err());
        assert!(PscConfig::new(0.5, Arc::new(FrequencyRounding)).is_ok());
        let bad = inst(3, vec![vec![0]], vec![1.0], 2);
        assert!(matches!(
            solve_psc(&bad, &PscConfig::default()),
            Err(PscError::Invalid(_))
        ));
    }

    #[test]
    fn split_examples() {
        let tau = one_minus_inv_e();
        let (h, l) = split_heavy_shallow(&[1.0, 1.0], tau);
        assert_eq!((h.len(), l.len()), (2, 0));
        let (h, l) = split_heavy_shallow(&[0.1, 0.5], tau);
        assert_eq!((h.len(), l.len()), (0, 2));
        let z = [0.7, 0.2, 0.632, 0.64, 0.0];
        let (h, l) = split_heavy_shallow(&z, tau);
        assert_eq!(h, vec![0, 3]);
        assert_eq!(l, vec![1, 2, 4]);
    }

    #[test]
    fn frequency_rounding_covers_targets() {
        let s = SetSystem::unweighted(3, vec![vec![0, 1], vec![1, 2], vec![2]]).unwrap();
        let chosen = FrequencyRounding.cover(&s, &[0, 1, 2], &[1.0, 0.0, 0.5]).unwrap();
        assert_eq!(chosen, vec![0, 2]);
    }

    #[test]
    fn frequency_oracle_solves_psc() {
        let i = inst(
            5,
            vec![vec![0, 1], vec![1, 2], vec![3, 4], vec![0, 4]],
            vec![1.0, 2.0, 1.5, 1.0],
            4,
        );
        let cfg = PscConfig::new(one_minus_inv_e(), Arc::new(FrequencyRounding)).unwrap();
        let sol = solve_psc(&i, &cfg).unwrap();
        assert!(sol.coverage[0] >= 4.0);
    }
}
