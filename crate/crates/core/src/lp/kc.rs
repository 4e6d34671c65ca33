//! Knapsack-cover inequalities for CCF rows and the round-and-separate loop.
//!
//! For a base collection `D` and a row `k` with residual demand
//! `b_k - f_k(D) > 0`, every integral solution satisfies
//!
//! ```text
//! sum_{i not in D} min{ f_k(D + i) - f_k(D), b_k - f_k(D) } x_i >= b_k - f_k(D)
//! ```
//!
//! The full family is exponential, so cuts are only generated for the base
//! collections the rounding actually produces.

use super::{build_ccf_lp, solve_lp, LinearProgram, LpError, LpSolution, Sense, FEAS_TOL};
use crate::setsys::{CcfInstance, SetId, TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct KcCut {
    pub row: usize,
    pub base: Vec<SetId>,
    /// `(set, coefficient)` for every set outside the base with a positive
    /// coefficient.
    pub coeffs: Vec<(SetId, f64)>,
    pub rhs: f64,
}

impl KcCut {
    pub fn lhs(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(i, a)| a * x[i]).sum()
    }

    pub fn violation(&self, x: &[f64]) -> f64 {
        self.rhs - self.lhs(x)
    }

    /// Whether an integral selection satisfies the cut.
    pub fn satisfied_by(&self, chosen: &[SetId]) -> bool {
        let lhs: f64 = self
            .coeffs
            .iter()
            .filter(|(i, _)| chosen.contains(i))
            .map(|&(_, a)| a)
            .sum();
        lhs >= self.rhs - TOL
    }
}

/// All KC inequalities for base `D`, one per row with positive residual.
pub fn kc_cuts(instance: &CcfInstance, base: &[SetId]) -> Vec<KcCut> {
    let system = &instance.system;
    let m = system.n_sets();
    let mut in_base = vec![false; m];
    for &i in base {
        in_base[i] = true;
    }
    let mut base_sorted = base.to_vec();
    base_sorted.sort_unstable();
    base_sorted.dedup();
    let covered = system.covered_mask(&base_sorted);

    let mut cuts = Vec::new();
    for (k, row) in instance.rows.iter().enumerate() {
        let f_base = instance.row_value_mask(k, &covered);
        let rhs = row.demand - f_base;
        if rhs <= TOL {
            continue;
        }
        let coeffs = (0..m)
            .filter(|&i| !in_base[i])
            .filter_map(|i| {
                let gain: f64 = system
                    .set(i)
                    .iter()
                    .filter(|&&e| !covered[e])
                    .map(|&e| row.coefficient(e))
                    .sum();
                let a = gain.min(rhs);
                (a > 0.0).then_some((i, a))
            })
            .collect();
        cuts.push(KcCut {
            row: k,
            base: base_sorted.clone(),
            coeffs,
            rhs,
        });
    }
    cuts
}

/// KC inequalities for base `D` that `x` violates by more than the
/// feasibility tolerance.
pub fn kc_separate(instance: &CcfInstance, base: &[SetId], x: &[f64]) -> Vec<KcCut> {
    kc_cuts(instance, base)
        .into_iter()
        .filter(|c| c.violation(x) > FEAS_TOL)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutStatus {
    /// The final LP solution satisfies every KC inequality for the final base.
    Converged,
    /// Round limit hit with cuts still violated.
    Fallback,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CuttingPlaneResult {
    pub status: CutStatus,
    pub solution: LpSolution,
    pub base: Vec<SetId>,
    pub rounds: usize,
    pub cuts: Vec<KcCut>,
    /// LP objective after each solve; non-decreasing.
    pub objective_history: Vec<f64>,
    pub lp: LinearProgram,
}

fn add_cut(lp: &mut LinearProgram, cut: &KcCut, index: usize) {
    lp.add_constraint(
        format!("kc{index}_row{}", cut.row),
        cut.coeffs.clone(),
        Sense::Ge,
        cut.rhs,
    );
}

/// Solves the natural CCF relaxation, then alternates between computing the
/// base `D = make_base(x)` and adding the KC inequalities for `D` that `x`
/// violates, until none are violated or `max_rounds` LP solves are spent.
pub fn cutting_plane_solve<F>(
    instance: &CcfInstance,
    mut make_base: F,
    max_rounds: usize,
) -> Result<CuttingPlaneResult, LpError>
where
    F: FnMut(&LpSolution) -> Vec<SetId>,
{
    let mut lp = build_ccf_lp(instance);
    let mut cuts: Vec<KcCut> = Vec::new();
    let mut history = Vec::new();
    let max_rounds = max_rounds.max(1);
    let mut rounds = 0;
    loop {
        let solution = solve_lp(&lp)?.optimal()?;
        rounds += 1;
        history.push(solution.objective);
        let base = make_base(&solution);
        let x = &solution.values[..instance.system.n_sets()];
        let violated = kc_separate(instance, &base, x);
        if violated.is_empty() || rounds >= max_rounds {
            let status = if violated.is_empty() {
                CutStatus::Converged
            } else {
                CutStatus::Fallback
            };
            return Ok(CuttingPlaneResult {
                status,
                solution,
                base,
                rounds,
                cuts,
                objective_history: history,
                lp,
            });
        }
        for cut in violated {
            add_cut(&mut lp, &cut, cuts.len());
            cuts.push(cut);
        }
    }
}
