//! Dense two-phase tableau simplex with Bland's rule.

use super::{Direction, LinearProgram, LpError, LpSolution, LpStatus, Sense};

const PIVOT_TOL: f64 = 1e-9;
const OPT_TOL: f64 = 1e-9;
const PHASE_ONE_TOL: f64 = 1e-7;
const MAX_PIVOTS: usize = 200_000;

/// How an original variable is expressed in non-negative tableau columns.
#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// `x = lower + y`
    Shift { col: usize, lower: f64 },
    /// `x = upper - y`
    Mirror { col: usize, upper: f64 },
    /// `x = y+ - y-`
    Split { pos: usize, neg: usize },
}

struct Row {
    terms: Vec<(usize, f64)>,
    sense: Sense,
    rhs: f64,
}

struct Tableau {
    a: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    obj: Vec<f64>,
    obj_rhs: f64,
    basis: Vec<usize>,
    allowed: Vec<bool>,
    pivots: usize,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn n_cols(&self) -> usize {
        self.obj.len()
    }

    /// Loads reduced costs for `cost` against the current basis.
    fn set_cost(&mut self, cost: &[f64]) {
        self.obj = cost.to_vec();
        self.obj_rhs = 0.0;
        for r in 0..self.a.len() {
            let cb = cost[self.basis[r]];
            if cb != 0.0 {
                for (o, &v) in self.obj.iter_mut().zip(&self.a[r]) {
                    *o -= cb * v;
                }
                self.obj_rhs -= cb * self.rhs[r];
            }
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.a[r][c];
        for v in self.a[r].iter_mut() {
            *v /= p;
        }
        self.rhs[r] /= p;
        self.a[r][c] = 1.0;
        let pivot_row = self.a[r].clone();
        let pivot_rhs = self.rhs[r];
        for i in 0..self.a.len() {
            if i == r {
                continue;
            }
            let f = self.a[i][c];
            if f != 0.0 {
                for (v, &pv) in self.a[i].iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                self.a[i][c] = 0.0;
                self.rhs[i] -= f * pivot_rhs;
                if self.rhs[i].abs() < 1e-13 {
                    self.rhs[i] = 0.0;
                }
            }
        }
        let f = self.obj[c];
        if f != 0.0 {
            for (v, &pv) in self.obj.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            self.obj[c] = 0.0;
            self.obj_rhs -= f * pivot_rhs;
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    fn run(&mut self) -> Result<Outcome, LpError> {
        loop {
            if self.pivots > MAX_PIVOTS {
                return Err(LpError::IterationLimit(MAX_PIVOTS));
            }
            // Bland: lowest-index improving column
            let entering = (0..self.n_cols()).find(|&j| self.allowed[j] && self.obj[j] < -OPT_TOL);
            let Some(c) = entering else {
                return Ok(Outcome::Optimal);
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.a.len() {
                let v = self.a[r][c];
                if v > PIVOT_TOL {
                    let ratio = self.rhs[r] / v;
                    leave = match leave {
                        None => Some((r, ratio)),
                        Some((lr, lratio)) => {
                            let tie = (ratio - lratio).abs() <= 1e-12 * (1.0 + lratio.abs());
                            if (!tie && ratio < lratio) || (tie && self.basis[r] < self.basis[lr]) {
                                Some((r, ratio))
                            } else {
                                Some((lr, lratio))
                            }
                        }
                    };
                }
            }
            match leave {
                None => return Ok(Outcome::Unbounded),
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }
}

pub(super) fn solve(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    lp.check()?;

    let mut maps = Vec::with_capacity(lp.vars.len());
    let mut n_struct = 0usize;
    let mut rows: Vec<Row> = Vec::new();
    for v in &lp.vars {
        let map = if v.lower.is_finite() {
            let col = n_struct;
            n_struct += 1;
            if v.upper.is_finite() {
                rows.push(Row {
                    terms: vec![(col, 1.0)],
                    sense: Sense::Le,
                    rhs: v.upper - v.lower,
                });
            }
            VarMap::Shift { col, lower: v.lower }
        } else if v.upper.is_finite() {
            let col = n_struct;
            n_struct += 1;
            VarMap::Mirror { col, upper: v.upper }
        } else {
            let pos = n_struct;
            n_struct += 2;
            VarMap::Split { pos, neg: pos + 1 }
        };
        maps.push(map);
    }

    let substitute = |terms: &[(usize, f64)]| -> (Vec<(usize, f64)>, f64) {
        let mut out = Vec::with_capacity(terms.len());
        let mut shift = 0.0;
        for &(j, a) in terms {
            match maps[j] {
                VarMap::Shift { col, lower } => {
                    out.push((col, a));
                    shift += a * lower;
                }
                VarMap::Mirror { col, upper } => {
                    out.push((col, -a));
                    shift += a * upper;
                }
                VarMap::Split { pos, neg } => {
                    out.push((pos, a));
                    out.push((neg, -a));
                }
            }
        }
        (out, shift)
    };

    for c in &lp.constraints {
        let (terms, shift) = substitute(&c.terms);
        rows.push(Row {
            terms,
            sense: c.sense,
            rhs: c.rhs - shift,
        });
    }

    // minimize internally
    let sign = match lp.direction {
        Direction::Minimize => 1.0,
        Direction::Maximize => -1.0,
    };
    let (obj_terms, _) = substitute(&lp.objective);

    // normalize rhs >= 0
    for row in rows.iter_mut() {
        if row.rhs < 0.0 {
            row.rhs = -row.rhs;
            for t in row.terms.iter_mut() {
                t.1 = -t.1;
            }
            row.sense = match row.sense {
                Sense::Le => Sense::Ge,
                Sense::Ge => Sense::Le,
                Sense::Eq => Sense::Eq,
            };
        }
    }

    let n_slack = rows.iter().filter(|r| r.sense != Sense::Eq).count();
    let n_art = rows.iter().filter(|r| r.sense != Sense::Le).count();
    let n_cols = n_struct + n_slack + n_art;
    let m = rows.len();

    let mut a = vec![vec![0.0; n_cols]; m];
    let mut rhs = vec![0.0; m];
    let mut basis = vec![0; m];
    let mut slack = n_struct;
    let mut art = n_struct + n_slack;
    for (r, row) in rows.iter().enumerate() {
        for &(j, v) in &row.terms {
            a[r][j] += v;
        }
        rhs[r] = row.rhs;
        match row.sense {
            Sense::Le => {
                a[r][slack] = 1.0;
                basis[r] = slack;
                slack += 1;
            }
            Sense::Ge => {
                a[r][slack] = -1.0;
                slack += 1;
                a[r][art] = 1.0;
                basis[r] = art;
                art += 1;
            }
            Sense::Eq => {
                a[r][art] = 1.0;
                basis[r] = art;
                art += 1;
            }
        }
    }

    let mut t = Tableau {
        a,
        rhs,
        obj: vec![0.0; n_cols],
        obj_rhs: 0.0,
        basis,
        allowed: vec![true; n_cols],
        pivots: 0,
    };
    let art_start = n_struct + n_slack;

    if n_art > 0 {
        let mut cost = vec![0.0; n_cols];
        for c in cost.iter_mut().skip(art_start) {
            *c = 1.0;
        }
        t.set_cost(&cost);
        t.run()?;
        let infeasibility = -t.obj_rhs;
        if infeasibility > PHASE_ONE_TOL {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                values: Vec::new(),
                objective: f64::NAN,
            });
        }
        // drive remaining artificials out of the basis
        let mut r = 0;
        while r < t.a.len() {
            if t.basis[r] >= art_start {
                let col = (0..art_start).find(|&j| t.a[r][j].abs() > PIVOT_TOL);
                match col {
                    Some(c) => {
                        t.pivot(r, c);
                        r += 1;
                    }
                    None => {
                        // redundant row
                        t.a.remove(r);
                        t.rhs.remove(r);
                        t.basis.remove(r);
                    }
                }
            } else {
                r += 1;
            }
        }
        for j in art_start..n_cols {
            t.allowed[j] = false;
        }
    }

    let mut cost = vec![0.0; n_cols];
    for &(j, c) in &obj_terms {
        cost[j] += sign * c;
    }
    t.set_cost(&cost);
    if let Outcome::Unbounded = t.run()? {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            values: Vec::new(),
            objective: sign * f64::NEG_INFINITY,
        });
    }

    let mut y = vec![0.0; n_cols];
    for (r, &b) in t.basis.iter().enumerate() {
        y[b] = t.rhs[r].max(0.0);
    }
    let values: Vec<f64> = maps
        .iter()
        .map(|m| match *m {
            VarMap::Shift { col, lower } => lower + y[col],
            VarMap::Mirror { col, upper } => upper - y[col],
            VarMap::Split { pos, neg } => y[pos] - y[neg],
        })
        .collect();
    let objective = lp.objective.iter().map(|&(j, c)| c * values[j]).fold(0.0, |a, b| a + b);
    Ok(LpSolution {
        status: LpStatus::Optimal,
        values,
        objective,
    })
}
