//! Text dump in the CPLEX LP interchange format, readable by most external
//! solvers (glpsol, HiGHS, CBC, SCIP).
//!
//! Grammar of the emitted subset, one item per line:
//!
//! ```text
//! file       := header "Minimize" | "Maximize"
//!               " obj:" expr
//!               "Subject To" { " " name ":" expr op number }
//!               "Bounds" { bound }
//!               "End"
//! expr       := term { (" + " | " - ") term }   (a lone "0 x0" when empty)
//! term       := number " " name
//! op         := ">=" | "<=" | "="
//! bound      := " " number " <= " name " <= " number
//!             | " " name " >= " number
//!             | " " name " <= " number
//!             | " " name " free"
//! ```
//!
//! Header lines start with `\`. Numbers use Rust's shortest round-trip
//! decimal form, so the dump reproduces every coefficient exactly.

use std::fmt::Write as _;

use super::{Direction, LinearProgram, Sense};

fn write_expr(out: &mut String, lp: &LinearProgram, terms: &[(usize, f64)]) {
    if terms.is_empty() {
        let name = lp.vars.first().map(|v| v.name.as_str()).unwrap_or("x0");
        let _ = write!(out, " 0 {name}");
        return;
    }
    for (p, &(j, a)) in terms.iter().enumerate() {
        let name = &lp.vars[j].name;
        if p == 0 {
            let _ = write!(out, " {a} {name}");
        } else if a < 0.0 {
            let _ = write!(out, " - {} {name}", -a);
        } else {
            let _ = write!(out, " + {a} {name}");
        }
    }
}

/// Serializes `lp` in CPLEX LP format.
pub fn write_lp_format(lp: &LinearProgram) -> String {
    let mut out = String::new();
    out.push_str("\\ subcover LP dump\n");
    out.push_str(match lp.direction {
        Direction::Minimize => "Minimize\n",
        Direction::Maximize => "Maximize\n",
    });
    out.push_str(" obj:");
    write_expr(&mut out, lp, &lp.objective);
    out.push_str("\nSubject To\n");
    for (i, c) in lp.constraints.iter().enumerate() {
        let name = if c.name.is_empty() {
            format!("c{i}")
        } else {
            c.name.clone()
        };
        let _ = write!(out, " {name}:");
        write_expr(&mut out, lp, &c.terms);
        let op = match c.sense {
            Sense::Ge => ">=",
            Sense::Le => "<=",
            Sense::Eq => "=",
        };
        let _ = writeln!(out, " {op} {}", c.rhs);
    }
    out.push_str("Bounds\n");
    for v in &lp.vars {
        let (lo, hi) = (v.lower.is_finite(), v.upper.is_finite());
        let _ = match (lo, hi) {
            (true, true) => writeln!(out, " {} <= {} <= {}", v.lower, v.name, v.upper),
            (true, false) => writeln!(out, " {} >= {}", v.name, v.lower),
            (false, true) => writeln!(out, " -inf <= {} <= {}", v.name, v.upper),
            (false, false) => writeln!(out, " {} free", v.name),
        };
    }
    out.push_str("End\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dumps_small_program() {
        let mut lp = LinearProgram::new(Direction::Minimize);
        let x = lp.add_var("x0", 0.0, 1.0);
        let y = lp.add_var("x1", 0.0, f64::INFINITY);
        lp.set_objective_coeff(x, 2.0);
        lp.set_objective_coeff(y, 0.5);
        lp.add_constraint("cover0", vec![(x, 1.0), (y, -1.0)], Sense::Ge, 0.25);
        let text = write_lp_format(&lp);
        assert_eq!(
            text,
            "\\ subcover LP dump\nMinimize\n obj: 2 x0 + 0.5 x1\nSubject To\n cover0: 1 x0 - 1 x1 >= 0.25\nBounds\n 0 <= x0 <= 1\n x1 >= 0\nEnd\n"
        );
    }
}
