//! Linear programs: a small model, a simplex solver, the covering
//! relaxations used by the solvers, and knapsack-cover separation.
//!
//! Every covering builder lays variables out the same way: `x_i` for set
//! `i` at index `i`, followed by one `z` variable per element (or per target
//! element, for the targeted builders) starting at index `n_sets`.

mod format;
mod kc;
mod simplex;

pub use format::write_lp_format;
pub use kc::{cutting_plane_solve, kc_cuts, kc_separate, CutStatus, CuttingPlaneResult, KcCut};

use thiserror::Error;

use crate::setsys::{CcfInstance, ElementId, PscInstance, SetSystem};

/// Feasibility tolerance for constraint checks on solver output.
pub const FEAS_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Ge,
    Le,
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Constraint {
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(j, a)| a * values[j]).fold(0.0, |a, b| a + b)
    }

    pub fn violation(&self, values: &[f64]) -> f64 {
        let lhs = self.activity(values);
        match self.sense {
            Sense::Ge => (self.rhs - lhs).max(0.0),
            Sense::Le => (lhs - self.rhs).max(0.0),
            Sense::Eq => (lhs - self.rhs).abs(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("constraint {constraint} references undeclared variable {var}")]
    UnknownVariable { constraint: usize, var: usize },
    #[error("variable {0} has an empty or NaN bound range")]
    BadBounds(usize),
    #[error("simplex exceeded {0} pivots")]
    IterationLimit(usize),
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub vars: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    pub objective: Vec<(usize, f64)>,
    pub direction: Direction,
}

impl LinearProgram {
    pub fn new(direction: Direction) -> Self {
        Self {
            vars: Vec::new(),
            constraints: Vec::new(),
            objective: Vec::new(),
            direction,
        }
    }

    pub fn add_var(&mut self, name: impl Into<String>, lower: f64, upper: f64) -> usize {
        self.vars.push(Variable {
            name: name.into(),
            lower,
            upper,
        });
        self.vars.len() - 1
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: Vec<(usize, f64)>,
        sense: Sense,
        rhs: f64,
    ) -> usize {
        self.constraints.push(Constraint {
            name: name.into(),
            terms,
            sense,
            rhs,
        });
        self.constraints.len() - 1
    }

    pub fn set_objective_coeff(&mut self, var: usize, coeff: f64) {
        match self.objective.iter_mut().find(|(j, _)| *j == var) {
            Some(t) => t.1 = coeff,
            None => self.objective.push((var, coeff)),
        }
    }

    pub fn n_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective
            .iter()
            .map(|&(j, c)| c * values[j])
            .fold(0.0, |a, b| a + b)
    }

    /// Largest violation over constraints and bounds.
    pub fn max_violation(&self, values: &[f64]) -> f64 {
        let rows = self.constraints.iter().map(|c| c.violation(values)).fold(0.0, f64::max);
        self.vars
            .iter()
            .zip(values)
            .map(|(v, &x)| (v.lower - x).max(x - v.upper).max(0.0))
            .fold(rows, f64::max)
    }

    fn check(&self) -> Result<(), LpError> {
        for (j, v) in self.vars.iter().enumerate() {
            if v.lower.is_nan() || v.upper.is_nan() || v.lower > v.upper {
                return Err(LpError::BadBounds(j));
            }
        }
        let n = self.vars.len();
        for (i, c) in self.constraints.iter().enumerate() {
            if let Some(&(var, _)) = c.terms.iter().find(|(j, _)| *j >= n) {
                return Err(LpError::UnknownVariable { constraint: i, var });
            }
        }
        if let Some(&(var, _)) = self.objective.iter().find(|(j, _)| *j >= n) {
            return Err(LpError::UnknownVariable {
                constraint: usize::MAX,
                var,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub values: Vec<f64>,
    pub objective: f64,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    /// Turns non-optimal statuses into errors.
    pub fn optimal(self) -> Result<Self, LpError> {
        match self.status {
            LpStatus::Optimal => Ok(self),
            LpStatus::Infeasible => Err(LpError::Infeasible),
            LpStatus::Unbounded => Err(LpError::Unbounded),
        }
    }
}

/// Solves an LP with the dense two-phase simplex (Bland's rule).
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    simplex::solve(lp)
}

fn add_set_vars(lp: &mut LinearProgram, system: &SetSystem, upper: f64, in_objective: bool) {
    for i in 0..system.n_sets() {
        let v = lp.add_var(format!("x{i}"), 0.0, upper);
        if in_objective {
            lp.set_objective_coeff(v, system.weight(i));
        }
    }
}

/// `sum_{i: e in S_i} x_i - z_e >= 0` for each listed element, with `z_e`
/// at `first_z + position`.
fn add_cover_rows(lp: &mut LinearProgram, system: &SetSystem, elements: &[ElementId], first_z: usize) {
    for (p, &e) in elements.iter().enumerate() {
        let mut terms: Vec<(usize, f64)> = system.containing(e).iter().map(|&i| (i, 1.0)).collect();
        terms.push((first_z + p, -1.0));
        lp.add_constraint(format!("cover{e}"), terms, Sense::Ge, 0.0);
    }
}

/// Set cover relaxation restricted to `targets`:
/// `min w.x` s.t. every target is fractionally covered, `x >= 0`.
pub fn build_sc_lp(system: &SetSystem, targets: &[ElementId]) -> LinearProgram {
    let mut lp = LinearProgram::new(Direction::Minimize);
    add_set_vars(&mut lp, system, f64::INFINITY, true);
    for &e in targets {
        let terms = system.containing(e).iter().map(|&i| (i, 1.0)).collect();
        lp.add_constraint(format!("cover{e}"), terms, Sense::Ge, 1.0);
    }
    lp
}

/// Partial set cover relaxation: `x >= 0` unbounded above, `z in [0,1]`,
/// `sum z >= k`.
pub fn build_psc_lp(instance: &PscInstance) -> LinearProgram {
    let system = &instance.system;
    let m = system.n_sets();
    let mut lp = LinearProgram::new(Direction::Minimize);
    add_set_vars(&mut lp, system, f64::INFINITY, true);
    let elements: Vec<ElementId> = (0..system.n_elements()).collect();
    for e in &elements {
        lp.add_var(format!("z{e}"), 0.0, 1.0);
    }
    add_cover_rows(&mut lp, system, &elements, m);
    let terms = (0..elements.len()).map(|p| (m + p, 1.0)).collect();
    lp.add_constraint("demand", terms, Sense::Ge, instance.k as f64);
    lp
}

/// Maximum coverage relaxation with at most `k` sets.
pub fn build_mc_lp(system: &SetSystem, k: f64) -> LinearProgram {
    let m = system.n_sets();
    let mut lp = LinearProgram::new(Direction::Maximize);
    add_set_vars(&mut lp, system, f64::INFINITY, false);
    let elements: Vec<ElementId> = (0..system.n_elements()).collect();
    for &e in &elements {
        let z = lp.add_var(format!("z{e}"), 0.0, 1.0);
        lp.set_objective_coeff(z, 1.0);
    }
    add_cover_rows(&mut lp, system, &elements, m);
    lp.add_constraint("cardinality", (0..m).map(|i| (i, 1.0)).collect(), Sense::Le, k);
    lp
}

/// Maximum budgeted coverage relaxation over `targets` with budget `budget`.
/// `z` variables exist only for the targets, in the given order.
pub fn build_mbc_lp(system: &SetSystem, targets: &[ElementId], budget: f64) -> LinearProgram {
    let m = system.n_sets();
    let mut lp = LinearProgram::new(Direction::Maximize);
    add_set_vars(&mut lp, system, f64::INFINITY, false);
    for &e in targets {
        let z = lp.add_var(format!("z{e}"), 0.0, 1.0);
        lp.set_objective_coeff(z, 1.0);
    }
    add_cover_rows(&mut lp, system, targets, m);
    let terms = (0..m).map(|i| (i, system.weight(i))).collect();
    lp.add_constraint("budget", terms, Sense::Le, budget);
    lp
}

/// Natural CCF relaxation: `x, z in [0,1]`, cover rows, `A z >= b`.
pub fn build_ccf_lp(instance: &CcfInstance) -> LinearProgram {
    let system = &instance.system;
    let m = system.n_sets();
    let mut lp = LinearProgram::new(Direction::Minimize);
    add_set_vars(&mut lp, system, 1.0, true);
    let elements: Vec<ElementId> = (0..system.n_elements()).collect();
    for e in &elements {
        lp.add_var(format!("z{e}"), 0.0, 1.0);
    }
    add_cover_rows(&mut lp, system, &elements, m);
    for (k, row) in instance.rows.iter().enumerate() {
        let terms = row
            .coeffs
            .iter()
            .filter(|(_, &a)| a != 0.0)
            .map(|(&e, &a)| (m + e, a))
            .collect();
        lp.add_constraint(format!("row{k}"), terms, Sense::Ge, row.demand);
    }
    lp
}
