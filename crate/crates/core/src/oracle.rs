//! Exact solvers by branch and bound, for certifying approximation ratios on
//! small instances.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::multicover::MultiSubmodInstance;
use crate::setsys::{CcfInstance, PscInstance, SetId, Solution, TOL};
use crate::submod::SubmodOracle;

/// Largest ground set the exact solvers accept.
pub const BRUTE_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{size} candidates exceed the exact-solver limit of {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("instance has no feasible solution")]
    Infeasible,
}

fn check_size(size: usize) -> Result<(), OracleError> {
    if size > BRUTE_LIMIT {
        Err(OracleError::TooLarge {
            size,
            limit: BRUTE_LIMIT,
        })
    } else {
        Ok(())
    }
}

/// Cheapest subcollection accepted by a monotone `feasible`. Candidates are
/// branched on in order of increasing weight; a node is cut when its cost
/// cannot improve on the incumbent or when taking everything left still
/// fails.
pub fn branch_and_bound<F>(weights: &[f64], feasible: F) -> Option<(f64, Vec<SetId>)>
where
    F: Fn(&[SetId]) -> bool,
{
    let mut order: Vec<SetId> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| weights[a].total_cmp(&weights[b]));
    let mut best: Option<(f64, Vec<SetId>)> = None;
    let mut current = Vec::new();
    search(weights, &order, 0, &mut current, 0.0, &feasible, &mut best);
    best.map(|(c, mut s)| {
        s.sort_unstable();
        (c, s)
    })
}

fn search<F>(
    weights: &[f64],
    order: &[SetId],
    pos: usize,
    current: &mut Vec<SetId>,
    cost: f64,
    feasible: &F,
    best: &mut Option<(f64, Vec<SetId>)>,
) where
    F: Fn(&[SetId]) -> bool,
{
    if best.as_ref().is_some_and(|(b, _)| cost >= *b - TOL) {
        return;
    }
    if feasible(current) {
        *best = Some((cost, current.clone()));
        return;
    }
    if pos == order.len() {
        return;
    }
    let len = current.len();
    current.extend_from_slice(&order[pos..]);
    let reachable = feasible(current);
    current.truncate(len);
    if !reachable {
        return;
    }
    current.push(order[pos]);
    search(
        weights,
        order,
        pos + 1,
        current,
        cost + weights[order[pos]],
        feasible,
        best,
    );
    current.pop();
    search(weights, order, pos + 1, current, cost, feasible, best);
}

pub fn brute_psc(instance: &PscInstance) -> Result<Solution, OracleError> {
    let system = &instance.system;
    check_size(system.n_sets())?;
    let k = instance.k;
    let (_, chosen) = branch_and_bound(system.weights(), |s| system.coverage(s) >= k).ok_or(OracleError::Infeasible)?;
    Ok(Solution::for_psc(instance, chosen))
}

pub fn brute_ccf(instance: &CcfInstance) -> Result<Solution, OracleError> {
    let system = &instance.system;
    check_size(system.n_sets())?;
    let (_, chosen) = branch_and_bound(system.weights(), |s| instance.is_feasible(s)).ok_or(OracleError::Infeasible)?;
    Ok(Solution::for_ccf(instance, chosen))
}

/// Exact optimum of a multi-constraint instance together with the optimum
/// of each constraint on its own.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiOpt {
    pub solution: Solution,
    pub opt_per_constraint: Vec<f64>,
}

impl MultiOpt {
    pub fn opt(&self) -> f64 {
        self.solution.cost
    }
}

pub fn brute_multi(instance: &MultiSubmodInstance) -> Result<MultiOpt, OracleError> {
    let m = instance.ground_size();
    check_size(m)?;
    let weights = instance.weights();
    let (cost, chosen) = branch_and_bound(weights, |s| instance.is_feasible(s)).ok_or(OracleError::Infeasible)?;
    let opt_per_constraint = instance
        .constraints()
        .iter()
        .map(|c| {
            branch_and_bound(weights, |s| c.value(s) >= 1.0 - TOL)
                .map(|(v, _)| v)
                .ok_or(OracleError::Infeasible)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let sum: f64 = opt_per_constraint.iter().sum();
    let r = instance.sparsity() as f64;
    assert!(
        sum <= r * cost + TOL,
        "sum of single-constraint optima {sum} exceeds r * OPT = {}",
        r * cost
    );
    let solution = Solution {
        coverage: instance.values(&chosen),
        chosen,
        cost,
        seed: None,
        trace: Default::default(),
    };
    Ok(MultiOpt {
        solution,
        opt_per_constraint,
    })
}

/// One algorithm run measured against the exact optimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub instance: String,
    pub algorithm: String,
    pub cost: f64,
    pub opt: f64,
    pub ratio: f64,
    pub bound: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl RatioReport {
    pub fn new(
        instance: impl Into<String>,
        algorithm: impl Into<String>,
        cost: f64,
        opt: f64,
        bound: f64,
        seed: Option<u64>,
    ) -> Self {
        let ratio = if opt > TOL {
            cost / opt
        } else if cost <= TOL {
            1.0
        } else {
            f64::INFINITY
        };
        Self {
            instance: instance.into(),
            algorithm: algorithm.into(),
            cost,
            opt,
            ratio,
            bound,
            pass: ratio <= bound + TOL,
            seed,
        }
    }

    /// The report as one line of JSON (no trailing newline).
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}
