//! Bang-per-buck greedy algorithms.
//!
//! All variants pick the candidate with the largest marginal gain per unit
//! weight, break ties toward the lowest id, and give zero-weight candidates
//! with positive gain infinite priority.

use thiserror::Error;

use crate::setsys::{CcfInstance, ElementId, SetId, SetSystem, Solution, TOL};
use crate::submod::SubmodOracle;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GreedyError {
    #[error("element {0} is not contained in any set")]
    Uncoverable(ElementId),
    #[error("demand {demand} is unreachable (at most {reachable})")]
    Unreachable { demand: f64, reachable: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    DemandMet,
    BudgetCrossed,
    Exhausted,
}

/// Record of a greedy run.
#[derive(Debug, Clone, PartialEq)]
pub struct GreedyTrace {
    pub picked: Vec<SetId>,
    pub gains: Vec<f64>,
    pub ratios: Vec<f64>,
    pub stop: StopReason,
    pub covered: usize,
    pub cost: f64,
}

pub(crate) fn ratio(gain: f64, weight: f64) -> f64 {
    if weight <= 0.0 {
        if gain > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    } else {
        gain / weight
    }
}

fn better(candidate: f64, best: f64) -> bool {
    if candidate == f64::INFINITY {
        return best != f64::INFINITY;
    }
    candidate > best + 1e-12 * best.abs().max(1.0)
}

/// Index with the best gain/weight among `candidates` with gain above `TOL`.
fn pick_best(
    candidates: impl Iterator<Item = SetId>,
    gain: impl Fn(SetId) -> f64,
    weights: &[f64],
) -> Option<(SetId, f64, f64)> {
    let mut best: Option<(SetId, f64, f64)> = None;
    for i in candidates {
        let g = gain(i);
        if g <= TOL {
            continue;
        }
        let r = ratio(g, weights[i]);
        match best {
            Some((_, _, br)) if !better(r, br) => {}
            _ => best = Some((i, g, r)),
        }
    }
    best
}

/// Greedy set cover of `targets`.
pub fn greedy_set_cover(system: &SetSystem, targets: &[ElementId]) -> Result<Solution, GreedyError> {
    if let Some(&e) = targets.iter().find(|&&e| system.frequency(e) == 0) {
        return Err(GreedyError::Uncoverable(e));
    }
    let trace = budgeted_greedy(system, targets, f64::INFINITY, Some(count_distinct(system, targets)));
    let mut sol = Solution::from_sets(system, trace.picked);
    sol.coverage = vec![trace.covered as f64];
    Ok(sol)
}

fn count_distinct(system: &SetSystem, targets: &[ElementId]) -> usize {
    let mut seen = vec![false; system.n_elements()];
    targets
        .iter()
        .filter(|&&e| !std::mem::replace(&mut seen[e], true))
        .count()
}

/// Bang-per-buck greedy on the elements in `targets`. Stops when
/// `stop_at` targets are covered, right after the cumulative weight first
/// reaches `budget`, or when no set adds a new target.
pub fn budgeted_greedy(system: &SetSystem, targets: &[ElementId], budget: f64, stop_at: Option<usize>) -> GreedyTrace {
    let mut uncovered = vec![false; system.n_elements()];
    for &e in targets {
        uncovered[e] = true;
    }
    let mut used = vec![false; system.n_sets()];
    let mut trace = GreedyTrace {
        picked: Vec::new(),
        gains: Vec::new(),
        ratios: Vec::new(),
        stop: StopReason::Exhausted,
        covered: 0,
        cost: 0.0,
    };
    loop {
        if stop_at.is_some_and(|k| trace.covered >= k) {
            trace.stop = StopReason::DemandMet;
            return trace;
        }
        let gain = |i: SetId| system.set(i).iter().filter(|&&e| uncovered[e]).count() as f64;
        let Some((i, g, r)) = pick_best((0..system.n_sets()).filter(|&i| !used[i]), gain, system.weights()) else {
            trace.stop = StopReason::Exhausted;
            return trace;
        };
        used[i] = true;
        for &e in system.set(i) {
            uncovered[e] = false;
        }
        trace.picked.push(i);
        trace.gains.push(g);
        trace.ratios.push(r);
        trace.covered += g as usize;
        trace.cost += system.weight(i);
        if trace.cost >= budget - TOL {
            trace.stop = if stop_at.is_some_and(|k| trace.covered >= k) {
                StopReason::DemandMet
            } else {
                StopReason::BudgetCrossed
            };
            return trace;
        }
    }
}

/// Greedy for `max f(S) s.t. w(S) <= B`, run until the chosen weight first
/// meets or exceeds `budget` (or nothing adds value). Only elements with
/// `allowed[i]` are considered when a mask is given.
pub fn submod_knapsack_greedy_among<O: SubmodOracle + ?Sized>(
    oracle: &O,
    weights: &[f64],
    budget: f64,
    allowed: Option<&[bool]>,
) -> Vec<SetId> {
    let n = oracle.ground_size();
    let mut chosen: Vec<SetId> = Vec::new();
    let mut in_set = vec![false; n];
    let mut cost = 0.0;
    let mut current = oracle.value(&chosen);
    while cost < budget - TOL {
        let mut probe = chosen.clone();
        probe.push(0);
        let last = probe.len() - 1;
        let gain = |i: SetId| {
            let mut p = probe.clone();
            p[last] = i;
            oracle.value(&p) - current
        };
        let candidates = (0..n).filter(|&i| !in_set[i] && allowed.is_none_or(|a| a[i]));
        let Some((i, g, _)) = pick_best(candidates, gain, weights) else {
            break;
        };
        in_set[i] = true;
        chosen.push(i);
        cost += weights[i];
        current += g;
    }
    chosen.sort_unstable();
    chosen
}

/// Greedy for `max f(S) s.t. w(S) <= budget` over the whole ground set.
pub fn submod_knapsack_greedy<O: SubmodOracle + ?Sized>(oracle: &O, weights: &[f64], budget: f64) -> Vec<SetId> {
    submod_knapsack_greedy_among(oracle, weights, budget, None)
}

/// Largest allowed-element count for which every subset sum is a candidate
/// budget; above it only prefix sums of the sorted weights are tried.
pub const SUBSET_SUM_LIMIT: usize = 12;

fn candidate_budgets(weights: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0];
    if weights.len() <= SUBSET_SUM_LIMIT {
        for &w in weights {
            let extended: Vec<f64> = out.iter().map(|s| s + w).collect();
            out.extend(extended);
        }
    } else {
        let mut sorted = weights.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mut acc = 0.0;
        for w in sorted {
            acc += w;
            out.push(acc);
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() <= TOL);
    out
}

/// Finds `T` with `f(T) >= (1 - 1/e) * demand`, aiming for weight at most
/// twice the cheapest set reaching `demand`.
///
/// For each guess of the heaviest element of an optimum, greedy runs on the
/// elements no heavier than the guess; the smallest candidate budget at which
/// it reaches the target is found by binary search (the greedy order does
/// not depend on the budget, so success is monotone in it). The cheapest
/// result over all guesses is returned.
pub fn greedy_fix_constraint<O: SubmodOracle + ?Sized>(
    oracle: &O,
    demand: f64,
    weights: &[f64],
) -> Result<Vec<SetId>, GreedyError> {
    if demand <= TOL {
        return Ok(Vec::new());
    }
    let n = oracle.ground_size();
    let target = (1.0 - (-1.0f64).exp()) * demand;
    let all: Vec<SetId> = (0..n).collect();
    let full = oracle.value(&all);
    if full < target - TOL {
        return Err(GreedyError::Unreachable {
            demand: target,
            reachable: full,
        });
    }

    let mut guesses: Vec<f64> = weights.to_vec();
    guesses.sort_by(f64::total_cmp);
    guesses.dedup();

    let mut best: Option<(f64, Vec<SetId>)> = None;
    for &cap in &guesses {
        let allowed: Vec<bool> = weights.iter().map(|&w| w <= cap).collect();
        let members: Vec<SetId> = (0..n).filter(|&i| allowed[i]).collect();
        if oracle.value(&members) < target - TOL {
            continue;
        }
        let member_weights: Vec<f64> = members.iter().map(|&i| weights[i]).collect();
        let budgets = candidate_budgets(&member_weights);
        let run = |b: f64| submod_knapsack_greedy_among(oracle, weights, b, Some(&allowed));
        let reaches = |t: &[SetId]| oracle.value(t) >= target - TOL;

        // budgets.last() is the total allowed weight, which always succeeds
        let (mut lo, mut hi) = (0usize, budgets.len() - 1);
        let mut found = run(budgets[hi]);
        while lo < hi {
            let mid = (lo + hi) / 2;
            let t = run(budgets[mid]);
            if reaches(&t) {
                hi = mid;
                found = t;
            } else {
                lo = mid + 1;
            }
        }
        if !reaches(&found) {
            found = run(budgets[hi]);
        }
        let cost: f64 = found.iter().map(|&i| weights[i]).fold(0.0, |a, b| a + b);
        if best.as_ref().is_none_or(|(c, _)| cost < c - TOL) {
            best = Some((cost, found));
        }
    }
    best.map(|(_, t)| t).ok_or(GreedyError::Unreachable {
        demand: target,
        reachable: full,
    })
}

/// Result of fixing one CCF row.
#[derive(Debug, Clone, PartialEq)]
pub struct RowFix {
    pub chosen: Vec<SetId>,
    pub residual: f64,
    /// Cheapest set that alone meets the residual, if any.
    pub heavy: Option<SetId>,
    /// Sets whose marginal alone meets the residual.
    pub heavy_sets: Vec<SetId>,
    /// Influencing sets that do not.
    pub light_sets: Vec<SetId>,
    pub used_heavy: bool,
}

/// Fixes row `row` on top of `base`: the cheaper of the cheapest single set
/// meeting the residual demand and a greedy cover of the residual using only
/// sets that cannot meet it alone.
pub fn modified_greedy_ccf_fix(instance: &CcfInstance, row: usize, base: &[SetId]) -> Result<RowFix, GreedyError> {
    let system = &instance.system;
    let coeffs = instance.rows[row].dense(system.n_elements());
    let mut covered = system.covered_mask(base);
    let residual = instance.rows[row].demand - instance.row_value_mask(row, &covered);
    let mut fix = RowFix {
        chosen: Vec::new(),
        residual,
        heavy: None,
        heavy_sets: Vec::new(),
        light_sets: Vec::new(),
        used_heavy: false,
    };
    if residual <= TOL {
        return Ok(fix);
    }
    let mut in_base = vec![false; system.n_sets()];
    for &i in base {
        in_base[i] = true;
    }
    let gain_with = |covered: &[bool], i: SetId| -> f64 {
        system.set(i).iter().filter(|&&e| !covered[e]).map(|&e| coeffs[e]).sum()
    };
    for i in (0..system.n_sets()).filter(|&i| !in_base[i]) {
        let g = gain_with(&covered, i);
        if g <= 0.0 {
            continue;
        }
        if g >= residual - TOL {
            fix.heavy_sets.push(i);
        } else {
            fix.light_sets.push(i);
        }
    }
    fix.heavy = fix
        .heavy_sets
        .iter()
        .copied()
        .reduce(|a, b| if system.weight(b) < system.weight(a) { b } else { a });

    // greedy over the light sets
    let mut light_pick = Vec::new();
    let mut gained = 0.0;
    let mut used = vec![false; system.n_sets()];
    while gained < residual - TOL {
        let pick = pick_best(
            fix.light_sets.iter().copied().filter(|&i| !used[i]),
            |i| gain_with(&covered, i),
            system.weights(),
        );
        let Some((i, g, _)) = pick else { break };
        used[i] = true;
        light_pick.push(i);
        gained += g;
        for &e in system.set(i) {
            covered[e] = true;
        }
    }
    let light = (gained >= residual - TOL).then_some(light_pick);

    match (fix.heavy, light) {
        (Some(h), Some(l)) => {
            if system.weight(h) <= system.cost(&l) + TOL {
                fix.chosen = vec![h];
                fix.used_heavy = true;
            } else {
                fix.chosen = l;
            }
        }
        (Some(h), None) => {
            fix.chosen = vec![h];
            fix.used_heavy = true;
        }
        (None, Some(l)) => fix.chosen = l,
        (None, None) => {
            return Err(GreedyError::Unreachable {
                demand: residual,
                reachable: gained,
            })
        }
    }
    fix.chosen.sort_unstable();
    Ok(fix)
}

/// Greedy on `g(X) = sum_k min{b_k, f_k(X)}` until every row is met.
pub fn aggregate_cover_greedy(instance: &CcfInstance) -> Result<Vec<SetId>, GreedyError> {
    let system = &instance.system;
    let dense: Vec<Vec<f64>> = instance.rows.iter().map(|r| r.dense(system.n_elements())).collect();
    let mut covered = vec![false; system.n_elements()];
    let mut achieved = vec![0.0; instance.n_rows()];
    let mut chosen = Vec::new();
    let mut used = vec![false; system.n_sets()];
    let unmet = |achieved: &[f64]| instance.rows.iter().zip(achieved).any(|(r, &a)| a < r.demand - TOL);
    while unmet(&achieved) {
        let gain = |i: SetId| -> f64 {
            instance
                .rows
                .iter()
                .enumerate()
                .map(|(k, r)| {
                    let add: f64 = system
                        .set(i)
                        .iter()
                        .filter(|&&e| !covered[e])
                        .map(|&e| dense[k][e])
                        .sum();
                    (achieved[k] + add).min(r.demand) - achieved[k].min(r.demand)
                })
                .sum()
        };
        let Some((i, _, _)) = pick_best((0..system.n_sets()).filter(|&i| !used[i]), gain, system.weights()) else {
            let reachable = achieved.iter().sum();
            return Err(GreedyError::Unreachable {
                demand: instance.rows.iter().map(|r| r.demand).sum(),
                reachable,
            });
        };
        used[i] = true;
        chosen.push(i);
        for &e in system.set(i) {
            if !covered[e] {
                covered[e] = true;
                for k in 0..instance.n_rows() {
                    achieved[k] += dense[k][e];
                }
            }
        }
    }
    chosen.sort_unstable();
    Ok(chosen)
}
