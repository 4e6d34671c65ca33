use std::sync::Arc;

use rand::Rng as _;
use subcover::multicover::{
    arrangement_cells, check_general_position, point_split_build, round_and_alter, rounding_rounds,
    solve_continuous_greedy, solve_fractional, solve_lp_backend, solve_multi, Backend, CgOptions, MultiSubmodInstance,
    MulticoverError,
};
use subcover::oracle::brute_multi;
use subcover::psc::one_minus_inv_e;
use subcover::rng;
use subcover::submod::{sample_set, CoverageFn, DynOracle, Line, ModularFn, Point, SubmodOracle};
use subcover::{SetId, TOL};

const EPS: f64 = 0.1;

fn random_instance(seed: u64, m: usize, h: usize) -> MultiSubmodInstance {
    let mut r = rng::from_seed(seed);
    let weights: Vec<f64> = (0..m).map(|_| r.random_range(1..=10) as f64).collect();
    let constraints: Vec<(DynOracle, f64)> = (0..h)
        .map(|j| {
            let atoms = 6;
            let mut covers: Vec<Vec<usize>> = (0..m)
                .map(|_| {
                    if r.random::<f64>() < 0.5 {
                        (0..atoms).filter(|_| r.random::<f64>() < 0.4).collect()
                    } else {
                        Vec::new()
                    }
                })
                .collect();
            covers[j % m] = (0..atoms).collect();
            let f = CoverageFn::new(covers, vec![1.0; atoms], None);
            let demand = r.random_range(2.0..=5.0);
            (Arc::new(f) as DynOracle, demand)
        })
        .collect();
    MultiSubmodInstance::from_demands(weights, constraints).unwrap()
}

#[test]
fn single_sufficient_element_gives_indicator() {
    let f = CoverageFn::new(vec![vec![0, 1], vec![0]], vec![1.0, 1.0], None);
    let inst = MultiSubmodInstance::from_demands(vec![3.0, 1.0], vec![(Arc::new(f), 2.0)]).unwrap();
    let frac = solve_lp_backend(&inst).unwrap();
    assert!((frac.x[0] - 1.0).abs() < 1e-7 && frac.x[1].abs() < 1e-7);
    assert!((frac.budget - 3.0).abs() < 1e-7);
}

#[test]
fn lp_backend_meets_every_demand_in_the_coverage_extension() {
    for seed in 0..30 {
        let inst = random_instance(seed, 8, 3);
        let frac = solve_fractional(&inst, EPS, Backend::Lp, seed).unwrap();
        assert!(frac.certified.iter().all(|&v| v >= 1.0 - 1e-7), "seed {seed}");
        assert!(frac.cost(inst.weights()) <= frac.budget + 1e-7);
        for (j, c) in inst.constraints().iter().enumerate() {
            let tilde = c.coverage_form().unwrap().tilde(&frac.x);
            assert!(tilde >= 1.0 - 1e-7, "seed {seed} constraint {j}");
        }
    }
}

#[test]
fn continuous_greedy_budget_close_to_lp() {
    for seed in 0..5 {
        let inst = random_instance(50 + seed, 8, 2);
        let lp = solve_lp_backend(&inst).unwrap();
        let cg = solve_continuous_greedy(&inst, EPS, seed, &CgOptions::default()).unwrap();
        assert!(
            cg.budget <= (1.0 + EPS) * lp.budget + 1e-7,
            "seed {seed}: cg {} lp {}",
            cg.budget,
            lp.budget
        );
        assert!(cg.certified.iter().all(|&v| v >= one_minus_inv_e() - EPS - 1e-9));
    }
}

#[test]
fn integral_feasible_x_needs_no_fixing() {
    let inst = random_instance(7, 8, 3);
    let all: Vec<SetId> = (0..8).collect();
    let x = vec![1.0; 8];
    let sol = round_and_alter(&inst, &x, EPS, 1).unwrap();
    assert_eq!(sol.chosen, all);
    assert_eq!(sol.trace["fixed_constraints"], 0.0);
}

#[test]
fn rounds_follow_sparsity() {
    assert_eq!(rounding_rounds(1, EPS), 1);
    assert_eq!(rounding_rounds(3, EPS), 11);
    assert_eq!(rounding_rounds(3, 0.5), 3);
}

#[test]
fn outputs_are_bicriteria_feasible_and_cheap() {
    let target = one_minus_inv_e() - 2.0 * EPS;
    for seed in 0..10 {
        let inst = random_instance(200 + seed, 8, 3);
        let opt = brute_multi(&inst).unwrap();
        let r = inst.sparsity().max(1) as f64;
        let mut total = 0.0;
        for t in 0..200 {
            let (_, sol) = solve_multi(&inst, EPS, Backend::Lp, rng::derive(seed, t)).unwrap();
            assert!(inst.values(&sol.chosen).iter().all(|&v| v >= target - TOL));
            total += sol.cost;
        }
        let mean = total / 200.0;
        assert!(mean <= 4.0 * (r.ln() / EPS + 2.0) * opt.opt() + TOL, "seed {seed}");
    }
}

#[test]
fn per_round_failure_rate() {
    let target = one_minus_inv_e() - 2.0 * EPS;
    for seed in 0..4 {
        let inst = random_instance(300 + seed, 8, 3);
        let frac = solve_lp_backend(&inst).unwrap();
        assert!(frac
            .multilinear_lower_bounds()
            .iter()
            .all(|&v| v >= one_minus_inv_e() - EPS));
        let mut failures = vec![0usize; inst.n_constraints()];
        let mut r = rng::from_seed(seed);
        for _ in 0..10_000 {
            let s = sample_set(&frac.x, &mut r);
            for (j, v) in inst.values(&s).into_iter().enumerate() {
                if v < target {
                    failures[j] += 1;
                }
            }
        }
        for f in failures {
            assert!(f as f64 / 1e4 <= 1.0 - EPS + 0.05, "seed {seed}: {f}");
        }
    }
}

#[test]
fn sampled_cost_matches_rounding_expectation() {
    let inst = random_instance(400, 9, 3);
    let frac = solve_lp_backend(&inst).unwrap();
    let rounds = rounding_rounds(inst.sparsity(), EPS) as i32;
    let w = inst.weights();
    let exact: f64 = w
        .iter()
        .zip(&frac.x)
        .map(|(w, x)| w * (1.0 - (1.0 - x.clamp(0.0, 1.0)).powi(rounds)))
        .sum();
    let upper = rounds as f64 * frac.cost(w);
    let costs: Vec<f64> = (0..200)
        .map(|t| round_and_alter(&inst, &frac.x, EPS, t).unwrap().trace["sample_cost"])
        .collect();
    let n = costs.len() as f64;
    let mean = costs.iter().sum::<f64>() / n;
    let sd = (costs.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let se = sd / n.sqrt();
    assert!(
        (mean - exact).abs() <= 3.0 * se + 1e-9,
        "mean {mean} exact {exact} se {se}"
    );
    assert!(mean <= upper + 3.0 * se);
}

#[test]
fn sum_of_single_optima_is_bounded() {
    for seed in 0..15 {
        let inst = random_instance(500 + seed, 9, 3);
        let opt = brute_multi(&inst).unwrap();
        let sum: f64 = opt.opt_per_constraint.iter().sum();
        assert!(sum <= inst.sparsity() as f64 * opt.opt() + TOL);
    }
}

#[test]
fn disjoint_active_sets_give_equality() {
    let a = ModularFn::new(vec![1.0, 1.0, 0.0, 0.0]);
    let b = ModularFn::new(vec![0.0, 0.0, 1.0, 1.0]);
    let inst = MultiSubmodInstance::from_demands(
        vec![1.0, 2.0, 3.0, 1.0],
        vec![(Arc::new(a) as DynOracle, 1.0), (Arc::new(b) as DynOracle, 1.0)],
    )
    .unwrap();
    let opt = brute_multi(&inst).unwrap();
    assert_eq!(inst.sparsity(), 1);
    let sum: f64 = opt.opt_per_constraint.iter().sum();
    assert!((sum - opt.opt()).abs() < TOL);
}

/// `sqrt(sum of values)`: submodular without a coverage form.
struct SqrtModular(Vec<f64>);

impl SubmodOracle for SqrtModular {
    fn ground_size(&self) -> usize {
        self.0.len()
    }

    fn value(&self, set: &[SetId]) -> f64 {
        let mut seen = vec![false; self.0.len()];
        set.iter()
            .filter(|&&i| !std::mem::replace(&mut seen[i], true))
            .map(|&i| self.0[i])
            .sum::<f64>()
            .sqrt()
    }
}

#[test]
fn continuous_greedy_handles_non_coverage_oracles() {
    let f = SqrtModular(vec![0.25, 0.25, 1.0]);
    let inst = MultiSubmodInstance::from_demands(vec![1.0, 1.0, 5.0], vec![(Arc::new(f) as DynOracle, 1.0)]).unwrap();
    assert!(matches!(
        solve_fractional(&inst, EPS, Backend::Lp, 0),
        Err(MulticoverError::NeedsCoverageForm(_))
    ));
    let (_, sol) = solve_multi(&inst, EPS, Backend::ContinuousGreedy, 0).unwrap();
    assert!(inst.values(&sol.chosen)[0] >= one_minus_inv_e() - 2.0 * EPS);
}

fn p(x: f64, y: f64) -> Point {
    Point::new(x, y)
}

#[test]
fn point_split_small_cases() {
    let split = point_split_build(&[vec![p(0.0, 0.0), p(1.0, 0.3)]], 0.5).unwrap();
    let (_, sol) = solve_multi(&split.instance, EPS, Backend::Lp, 0).unwrap();
    assert_eq!(sol.chosen.len(), 1);
    assert_eq!(split.max_cell_loads(&sol.chosen).unwrap(), vec![1]);

    let singles = vec![vec![p(0.0, 0.0)], vec![p(1.0, 2.0)], vec![p(3.0, 1.0)]];
    let split = point_split_build(&singles, 0.5).unwrap();
    assert_eq!(split.instance.n_constraints(), 0);
    let (_, sol) = solve_multi(&split.instance, EPS, Backend::Lp, 0).unwrap();
    assert!(sol.chosen.is_empty());
}

#[test]
fn collinear_points_are_rejected() {
    let sets = vec![vec![p(0.0, 0.0), p(1.0, 1.0)], vec![p(2.0, 2.0), p(0.0, 3.0)]];
    assert!(matches!(
        check_general_position(&sets),
        Err(MulticoverError::Collinear(_))
    ));
    assert!(point_split_build(&sets, 0.5).is_err());
}

#[test]
fn arrangement_trivial_cases() {
    let pts = vec![p(0.0, 0.0), p(1.0, 2.0), p(-1.0, 0.5)];
    assert_eq!(arrangement_cells(&[], &pts).unwrap().n_cells, 1);
    let one = arrangement_cells(&[Line::new(1.0, 0.0, -0.5)], &pts).unwrap();
    assert!(one.n_cells <= 2);
    assert!(arrangement_cells(&[Line::new(1.0, 0.0, 0.0)], &pts).is_err());
}

#[test]
fn arrangement_matches_pairwise_separation() {
    for seed in 0..20 {
        let mut r = rng::from_seed(seed);
        let lines: Vec<Line> = (0..5)
            .map(|_| {
                Line::new(
                    r.random_range(-1.0..1.0),
                    r.random_range(-1.0..1.0),
                    r.random_range(-2.0..2.0),
                )
            })
            .collect();
        let pts: Vec<Point> = (0..10)
            .map(|_| p(r.random_range(-3.0..3.0), r.random_range(-3.0..3.0)))
            .collect();
        let cells = arrangement_cells(&lines, &pts).unwrap();
        for a in 0..pts.len() {
            for b in 0..pts.len() {
                let separated = lines.iter().any(|l| (l.eval(pts[a]) > 0.0) != (l.eval(pts[b]) > 0.0));
                assert_eq!(separated, cells.cell_of[a] != cells.cell_of[b]);
            }
        }
    }
}

#[test]
fn point_split_leaves_small_cells() {
    let sets = vec![
        vec![
            p(0.2, 0.3),
            p(2.1, 1.7),
            p(4.3, 0.9),
            p(1.3, 3.8),
            p(3.4, 4.1),
            p(5.1, 2.6),
        ],
        vec![
            p(6.3, 0.5),
            p(7.8, 2.2),
            p(9.1, 0.8),
            p(6.9, 4.3),
            p(8.7, 3.7),
            p(10.2, 2.9),
        ],
        vec![
            p(0.9, 6.2),
            p(2.8, 7.9),
            p(4.6, 6.4),
            p(3.3, 9.5),
            p(5.9, 8.6),
            p(1.6, 9.1),
        ],
    ];
    let split = point_split_build(&sets, 0.5).unwrap();
    let bound = 1.0 - (one_minus_inv_e() - EPS) / 2.0;
    for seed in 0..3 {
        let (_, sol) = solve_multi(&split.instance, EPS, Backend::Lp, seed).unwrap();
        for (load, ps) in split.max_cell_loads(&sol.chosen).unwrap().into_iter().zip(&sets) {
            assert!(load as f64 <= bound * ps.len() as f64);
        }
    }
}
