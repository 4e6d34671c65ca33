//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the summary is always printed. Exits
//! non-zero when any criterion fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use rand::Rng as _;
use subcover::ccf::{base_collection, per_row_success_probability, solve_ccf_detailed, CcfConfig};
use subcover::gen::{self, GenParams, WeightRegime};
use subcover::greedy::{budgeted_greedy, StopReason};
use subcover::io::InstanceFile;
use subcover::lp::{build_mbc_lp, cutting_plane_solve, kc_separate, solve_lp, CutStatus};
use subcover::multicover::{point_split_build, solve_multi, Backend, MultiSubmodInstance};
use subcover::oracle::{brute_ccf, brute_multi, brute_psc};
use subcover::psc::{one_minus_inv_e, psc_ratio_bound, solve_psc_detailed, GreedyCover, PscConfig};
use subcover::rng;
use subcover::submod::{
    multilinear_exact, sample_set, tilde_eval, CoverageFn, DynOracle, NormalizedFn, Point, ScaledFn, SubmodOracle,
};
use subcover::{CcfInstance, CoverRow, PscInstance, SetId, SetSystem, TOL};

const EPS: f64 = 0.1;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

fn regime(i: usize) -> WeightRegime {
    WeightRegime::ALL[i % WeightRegime::ALL.len()]
}

fn psc_instance(i: usize) -> PscInstance {
    let mut r = rng::stream(1, i as u64);
    let params = GenParams {
        n: r.random_range(6..=14),
        m: r.random_range(3..=8),
        p: r.random_range(0.15..0.45),
        f: 2,
        demand_fraction: r.random_range(0.3..=1.0),
        weights: regime(i),
        ..GenParams::default()
    };
    let seed = rng::derive(1, i as u64);
    if i.is_multiple_of(2) {
        gen::random_uniform(&params, seed)
    } else {
        gen::frequency_bounded(&params, seed)
    }
}

fn criterion_psc() -> Outcome {
    let start = Instant::now();
    let config = PscConfig::default();
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    for i in 0..300 {
        let inst = psc_instance(i);
        let rep = solve_psc_detailed(&inst, &config).expect("psc solves");
        let opt = brute_psc(&inst).expect("brute force").cost;
        let bound = psc_ratio_bound(rep.beta_effective());
        let covered = inst.system.coverage(&rep.solution.chosen);
        if covered < inst.k || rep.solution.cost > bound * opt + TOL {
            violations += 1;
        }
        if opt > TOL {
            worst = worst.max(rep.solution.cost / opt);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome::new(
        violations == 0 && secs < 120.0,
        format!("300 instances, {violations} violations, max ratio {worst:.3}, {secs:.1}s"),
    )
}

fn criterion_greedy() -> Outcome {
    let mut coverage_violations = 0;
    let mut cost_violations = 0;
    let mut crossings = 0;
    for i in 0..100 {
        let mut r = rng::stream(2, i as u64);
        let params = GenParams {
            n: r.random_range(8..=16),
            m: r.random_range(4..=10),
            p: r.random_range(0.15..0.45),
            weights: regime(i),
            ..GenParams::default()
        };
        let system = gen::random_uniform(&params, rng::derive(2, i as u64)).system;
        let targets: Vec<usize> = (0..system.n_elements()).collect();
        let budget = r.random_range(0.1..0.7) * system.total_weight();
        let z = solve_lp(&build_mbc_lp(&system, &targets, budget))
            .and_then(|s| s.optimal())
            .expect("mbc lp solves")
            .objective;
        let need = (one_minus_inv_e() * z - 1e-7).ceil().max(0.0) as usize;

        let trace = budgeted_greedy(&system, &targets, budget, None);
        if trace.stop == StopReason::BudgetCrossed {
            crossings += 1;
            if trace.covered < need {
                coverage_violations += 1;
            }
        }

        if z > TOL {
            let largest = system.max_set_size() as f64;
            let c = largest / z;
            let run = budgeted_greedy(&system, &targets, f64::INFINITY, Some(need));
            if run.covered >= need && run.cost > (1.0 + std::f64::consts::E * c) * budget + TOL {
                cost_violations += 1;
            }
        }
    }
    Outcome::new(
        coverage_violations == 0 && cost_violations == 0,
        format!(
            "100 instances ({crossings} budget crossings), coverage violations {coverage_violations}, \
             cost violations {cost_violations}"
        ),
    )
}

fn random_coverage(r: &mut rng::Rng, n: usize, atoms: usize, density: f64) -> CoverageFn {
    let covers = (0..n)
        .map(|_| (0..atoms).filter(|_| r.random::<f64>() < density).collect())
        .collect();
    let weights = (0..atoms).map(|_| r.random_range(0.5..3.0)).collect();
    CoverageFn::new(covers, weights, None)
}

fn criterion_sandwich() -> Outcome {
    let mut violations = 0;
    let mut checks = 0;
    for i in 0..50 {
        let mut r = rng::stream(3, i as u64);
        let n = r.random_range(2..=10);
        let atoms = r.random_range(3..=12);
        let f = random_coverage(&mut r, n, atoms, 0.35);
        for _ in 0..20 {
            let x: Vec<f64> = (0..n).map(|_| r.random::<f64>()).collect();
            let tilde = tilde_eval(&f, &x).expect("coverage form");
            let exact = multilinear_exact(&f, &x).expect("small ground set");
            checks += 1;
            if one_minus_inv_e() * tilde > exact + 1e-9 || exact > tilde + 1e-9 {
                violations += 1;
            }
        }
    }
    Outcome::new(violations == 0, format!("{checks} points, {violations} violations"))
}

fn criterion_concentration() -> Outcome {
    const TRIALS: usize = 100_000;
    let deltas = [0.2, 0.5];
    let mut violations = 0;
    let mut worst_margin = f64::INFINITY;
    let mut smallest_bound = f64::INFINITY;
    for i in 0..10 {
        let mut r = rng::stream(4, i as u64);
        let n = 16;
        let atoms = 120;
        let covers = (0..n)
            .map(|_| (0..4).map(|_| r.random_range(0..atoms)).collect())
            .collect();
        let cover = CoverageFn::new(covers, vec![1.0; atoms], None);
        let all: Vec<SetId> = (0..n).collect();
        let total = cover.value(&all);
        let demand = total * r.random_range(0.8..=1.0);
        let f = ScaledFn::one_lipschitz(NormalizedFn::new(cover, demand).expect("positive demand"));
        let x: Vec<f64> = (0..n).map(|_| r.random_range(0.2..0.9)).collect();
        let big_f = multilinear_exact(&f, &x).expect("small ground set");
        let mut low = [0usize; 2];
        let mut sampler = rng::stream(40, i as u64);
        for _ in 0..TRIALS {
            let v = f.value(&sample_set(&x, &mut sampler));
            for (d, count) in deltas.iter().zip(low.iter_mut()) {
                if v <= (1.0 - d) * big_f {
                    *count += 1;
                }
            }
        }
        for (d, count) in deltas.iter().zip(low) {
            let freq = count as f64 / TRIALS as f64;
            let bound = 2.0 * (-d * d * big_f / 2.0).exp();
            worst_margin = worst_margin.min(bound - freq);
            smallest_bound = smallest_bound.min(bound);
            if freq > bound {
                violations += 1;
            }
        }
    }
    Outcome::new(
        violations == 0,
        format!(
            "10 oracles x 2 deltas, {violations} violations, min slack {worst_margin:.3}, smallest bound {smallest_bound:.3}"
        ),
    )
}

fn random_multi(i: usize) -> MultiSubmodInstance {
    let mut r = rng::stream(5, i as u64);
    let m = r.random_range(5..=10);
    let h = r.random_range(2..=4);
    let active_p = r.random_range(0.3..0.7);
    let weights: Vec<f64> = (0..m).map(|_| r.random_range(1..=10) as f64).collect();
    let mut constraints: Vec<(DynOracle, f64)> = Vec::new();
    for _ in 0..h {
        let atoms = r.random_range(4..=9);
        let mut covers: Vec<Vec<usize>> = (0..m)
            .map(|_| {
                if r.random::<f64>() < active_p {
                    (0..atoms).filter(|_| r.random::<f64>() < 0.4).collect()
                } else {
                    Vec::new()
                }
            })
            .collect();
        if covers.iter().all(|c| c.is_empty()) {
            let i = r.random_range(0..m);
            covers[i] = (0..atoms).collect();
        }
        let atom_weights = (0..atoms).map(|_| r.random_range(1..=3) as f64).collect();
        let f = CoverageFn::new(covers, atom_weights, None);
        let all: Vec<SetId> = (0..m).collect();
        let reach = f.value(&all);
        let demand = reach * r.random_range(0.4..=0.9);
        constraints.push((Arc::new(f), demand));
    }
    MultiSubmodInstance::from_demands(weights, constraints).expect("valid multi instance")
}

fn criterion_bicriteria() -> Outcome {
    let target = one_minus_inv_e() - 2.0 * EPS;
    let mut infeasible = 0;
    let mut ratio_violations = 0;
    let mut sum_violations = 0;
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let inst = random_multi(i);
        let opt = brute_multi(&inst).expect("brute force");
        let r = inst.sparsity().max(1) as f64;
        let sum: f64 = opt.opt_per_constraint.iter().sum();
        if sum > r * opt.opt() + TOL {
            sum_violations += 1;
        }
        let mut total = 0.0;
        for s in 0..20 {
            let (_, sol) = solve_multi(&inst, EPS, Backend::Lp, rng::derive(i as u64, s)).expect("multi solves");
            if inst.values(&sol.chosen).iter().any(|&v| v < target - TOL) {
                infeasible += 1;
            }
            total += sol.cost;
        }
        let mean = total / 20.0;
        let bound = 4.0 * (r.ln() / EPS + 2.0);
        if opt.opt() > TOL {
            worst = worst.max(mean / opt.opt() / bound);
            if mean > bound * opt.opt() + TOL {
                ratio_violations += 1;
            }
        }
    }
    Outcome::new(
        infeasible == 0 && ratio_violations == 0 && sum_violations == 0,
        format!(
            "2000 runs, {infeasible} infeasible, {ratio_violations} ratio violations \
             (max mean/bound {worst:.3}), {sum_violations} sum-of-optima violations"
        ),
    )
}

fn ccf_instance(family: usize, i: usize) -> CcfInstance {
    let mut r = rng::stream(6 + family as u64, i as u64);
    let rows = r.random_range(2..=4);
    let params = GenParams {
        n: r.random_range(8..=12),
        m: r.random_range(5..=10),
        p: r.random_range(0.3..0.6),
        rows,
        sparsity: r.random_range(1..=rows),
        demand_fraction: r.random_range(0.4..=0.9),
        weights: regime(i),
        ..GenParams::default()
    };
    let seed = rng::derive(6 + family as u64, i as u64);
    match family {
        0 => gen::sparse_ccf(&params, seed),
        1 => gen::partition(&params, seed),
        _ => gen::cip(&params, seed),
    }
}

/// One-row instance over disjoint sets with the smallest uniform `x` that
/// satisfies every KC inequality for the empty base. All `x_i` and `z_j`
/// stay below `tau`, so the rounding base is empty.
fn kc_tight_row(i: usize, tau: f64) -> (CcfInstance, Vec<f64>) {
    let mut r = rng::stream(60, i as u64);
    let m = r.random_range(24..=40);
    let mut sets = Vec::with_capacity(m);
    let mut n = 0;
    for _ in 0..m {
        let size = r.random_range(1..=3);
        sets.push((n..n + size).collect::<Vec<_>>());
        n += size;
    }
    let weights = (0..m).map(|_| r.random_range(1..=10) as f64).collect();
    let system = SetSystem::new(n, sets, weights).expect("disjoint blocks");
    let coeffs: Vec<(usize, f64)> = (0..n).map(|e| (e, r.random_range(1..=4) as f64 / 4.0)).collect();
    let total: f64 = coeffs.iter().map(|(_, a)| a).sum();
    let demand = ((4.0 * r.random_range(0.04..0.12) * total).floor() / 4.0).max(0.25);
    let inst = CcfInstance::new(system, vec![CoverRow::new(coeffs, demand)]);
    let mass: f64 = (0..m).map(|s| inst.row_value(0, &[s]).min(demand)).sum();
    let t = demand / mass;
    assert!(t < tau, "row too small for a light solution");
    let x = vec![t; m];
    assert!(kc_separate(&inst, &[], &x).is_empty());
    (inst, x)
}

const CCF_FAMILIES: [&str; 3] = ["sparse-ccf", "partition", "cip"];

fn criterion_ccf() -> Outcome {
    const SEEDS: u64 = 200;
    const MC_TRIALS: usize = 10_000;
    let mut infeasible = 0;
    let mut constants = [0.0f64; 3];
    let mut min_success = 1.0f64;
    let mut rows_checked = 0;
    for (family, constant) in constants.iter_mut().enumerate() {
        for i in 0..10 {
            let inst = ccf_instance(family, i);
            let opt = brute_ccf(&inst).expect("brute force").cost;
            let r = inst.sparsity().max(1) as f64;
            let mut total = 0.0;
            let mut beta = 0.0;
            let mut first = None;
            for s in 0..SEEDS {
                let cfg = CcfConfig::default().with_seed(rng::derive(family as u64 * 100 + i as u64, s));
                let rep = solve_ccf_detailed(&inst, &cfg).expect("ccf solves");
                if !inst.is_feasible(&rep.solution.chosen) {
                    infeasible += 1;
                }
                total += rep.solution.cost;
                beta += rep.beta_effective;
                first.get_or_insert(rep);
            }
            let mean = total / SEEDS as f64;
            let beta = beta / SEEDS as f64;
            if opt > TOL {
                *constant = constant.max(mean / ((beta + r.ln()) * opt));
            }
            let rep = first.expect("at least one run");
            if rep.status == CutStatus::Converged {
                let base = rep.base.union();
                for k in 0..inst.n_rows() {
                    if inst.row_value(k, &base) >= inst.rows[k].demand - TOL {
                        continue;
                    }
                    let p = per_row_success_probability(
                        &inst,
                        k,
                        &rep.x,
                        &base,
                        CcfConfig::default().tau,
                        MC_TRIALS,
                        rng::derive(99, (family * 100 + i * 10 + k) as u64),
                    );
                    rows_checked += 1;
                    min_success = min_success.min(p);
                }
            }
        }
    }
    let tau = CcfConfig::default().tau;
    for i in 0..20 {
        let (inst, x) = kc_tight_row(i, tau);
        let p = per_row_success_probability(&inst, 0, &x, &[], tau, MC_TRIALS, rng::derive(98, i as u64));
        rows_checked += 1;
        min_success = min_success.min(p);
    }
    let worst_c = constants.iter().copied().fold(0.0, f64::max);
    let per_family: Vec<String> = CCF_FAMILIES
        .iter()
        .zip(constants)
        .map(|(name, c)| format!("{name} C={c:.3}"))
        .collect();
    Outcome::new(
        infeasible == 0 && worst_c <= 10.0 && min_success >= 0.17,
        format!(
            "6000 runs, {infeasible} infeasible, {}; min one-round success {min_success:.3} over {rows_checked} rows",
            per_family.join(", ")
        ),
    )
}

fn feasible_subsets(inst: &CcfInstance) -> Vec<Vec<SetId>> {
    let m = inst.system.n_sets();
    (0u32..1 << m)
        .map(|mask| (0..m).filter(|&i| mask >> i & 1 == 1).collect::<Vec<_>>())
        .filter(|s| inst.is_feasible(s))
        .collect()
}

fn criterion_kc() -> Outcome {
    let tau = CcfConfig::default().tau;
    let mut invalid_cuts = 0;
    let mut total_cuts = 0;
    let mut above_opt = 0;
    for i in 0..30 {
        let inst = ccf_instance(i % 3, 100 + i);
        let m = inst.system.n_sets();
        let feasible = feasible_subsets(&inst);
        let opt = brute_ccf(&inst).expect("brute force").cost;
        let mut r = rng::stream(7, i as u64);
        let random_base: Vec<SetId> = (0..m).filter(|_| r.random::<f64>() < 0.3).collect();
        let runs = [
            cutting_plane_solve(
                &inst,
                |sol| {
                    base_collection(&inst, sol, tau, &GreedyCover)
                        .map(|b| b.union())
                        .unwrap_or_default()
                },
                50,
            ),
            cutting_plane_solve(&inst, |_| Vec::new(), 50),
            cutting_plane_solve(&inst, |_| random_base.clone(), 50),
        ];
        for res in runs {
            let res = res.expect("cutting plane solves");
            for cut in &res.cuts {
                total_cuts += 1;
                if feasible.iter().any(|s| !cut.satisfied_by(s)) {
                    invalid_cuts += 1;
                }
            }
            if res.objective_history.iter().any(|&v| v > opt + 1e-7) {
                above_opt += 1;
            }
        }
    }
    Outcome::new(
        invalid_cuts == 0 && above_opt == 0 && total_cuts > 0,
        format!(
            "30 instances x 3 base rules, {total_cuts} cuts, {invalid_cuts} invalid, {above_opt} LP values above OPT"
        ),
    )
}

fn pts(coords: &[(f64, f64)]) -> Vec<Point> {
    coords.iter().map(|&(x, y)| Point::new(x, y)).collect()
}

fn point_instances() -> Vec<Vec<Vec<Point>>> {
    vec![
        vec![pts(&[
            (0.0, 0.0),
            (3.1, 0.4),
            (1.2, 2.7),
            (4.3, 3.1),
            (2.2, 5.3),
            (5.6, 1.9),
            (0.7, 4.4),
            (6.1, 5.2),
        ])],
        vec![
            pts(&[(0.0, 0.1), (1.1, 3.2), (2.3, 0.7), (3.6, 2.9), (4.9, 0.3), (5.2, 3.8)]),
            pts(&[(0.4, 5.1), (1.7, 6.9), (2.9, 5.6), (4.2, 7.3), (5.7, 6.2), (6.6, 4.7)]),
        ],
        vec![
            pts(&[(0.2, 0.3), (2.1, 1.7), (4.3, 0.9), (1.3, 3.8), (3.4, 4.1), (5.1, 2.6)]),
            pts(&[(6.3, 0.5), (7.8, 2.2), (9.1, 0.8), (6.9, 4.3), (8.7, 3.7), (10.2, 2.9)]),
            pts(&[(0.9, 6.2), (2.8, 7.9), (4.6, 6.4), (3.3, 9.5), (5.9, 8.6), (1.6, 9.1)]),
        ],
        vec![
            pts(&[
                (0.0, 0.0),
                (1.0, 3.0),
                (2.0, 1.3),
                (3.0, 4.1),
                (4.0, 0.6),
                (5.0, 3.5),
                (6.0, 1.9),
            ]),
            pts(&[(0.5, 6.2), (2.5, 5.4), (4.5, 6.8), (6.5, 5.1)]),
            pts(&[(1.7, 8.3), (3.9, 9.6), (5.8, 8.1)]),
        ],
        vec![
            pts(&[
                (1.0, 0.1),
                (0.72, 0.69),
                (0.05, 1.02),
                (-0.68, 0.74),
                (-0.98, 0.13),
                (-0.73, -0.66),
                (-0.03, -0.97),
                (0.69, -0.71),
            ]),
            pts(&[
                (2.6, 0.2),
                (2.1, 1.6),
                (0.4, 2.4),
                (-1.9, 1.8),
                (-2.5, -0.3),
                (-1.4, -2.2),
                (0.6, -2.55),
                (2.2, -1.45),
            ]),
        ],
    ]
}

fn criterion_points() -> Outcome {
    let gamma = one_minus_inv_e() - EPS;
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    for (idx, sets) in point_instances().iter().enumerate() {
        let split = point_split_build(sets, 0.5).expect("general position");
        for s in 0..5 {
            let (_, sol) = solve_multi(&split.instance, EPS, Backend::Lp, rng::derive(8, (idx * 10 + s) as u64))
                .expect("points solve");
            let loads = split.max_cell_loads(&sol.chosen).expect("no point on a chosen line");
            for (load, ps) in loads.iter().zip(sets) {
                let k = ps.len() as f64;
                if k < 2.0 {
                    continue;
                }
                worst = worst.max(*load as f64 / k);
                if *load as f64 > (1.0 - gamma / 2.0) * k + TOL {
                    violations += 1;
                }
            }
        }
    }
    Outcome::new(
        violations == 0,
        format!(
            "5 instances x 5 seeds, {violations} violations, max load fraction {worst:.3} (bound {:.3})",
            1.0 - gamma / 2.0
        ),
    )
}

fn scratch_dir() -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    std::fs::create_dir_all(&dir).expect("temp dir");
    dir
}

fn run_cli(args: &[&str]) -> (bool, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_subcover"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.status.success(), out.stdout)
}

fn criterion_determinism() -> Outcome {
    let dir = scratch_dir();
    let write = |name: &str, file: &InstanceFile| {
        let path = dir.join(name);
        std::fs::write(&path, file.to_json()).expect("write instance");
        path.to_string_lossy().into_owned()
    };
    let psc = write("psc.json", &InstanceFile::from_psc(&psc_instance(7)));
    let ccf_inst = ccf_instance(0, 3);
    let ccf = write("ccf.json", &InstanceFile::from_ccf(&ccf_inst));
    let multi = write("multi.json", &InstanceFile::multi_from_ccf(&ccf_inst));
    let points = write(
        "points.json",
        &InstanceFile::from_point_sets(&point_instances()[2], 0.5),
    );
    let svg = dir.join("points.svg").to_string_lossy().into_owned();

    let runs: Vec<(&str, Vec<&str>)> = vec![
        ("psc", vec!["solve", "psc", &psc, "--seed", "11"]),
        (
            "psc-frequency",
            vec!["solve", "psc", &psc, "--beta-oracle", "frequency"],
        ),
        ("ccf", vec!["solve", "ccf", &ccf, "--seed", "11"]),
        ("multi-lp", vec!["solve", "multi", &multi, "--seed", "11"]),
        (
            "multi-cg",
            vec![
                "solve",
                "multi",
                &multi,
                "--backend",
                "continuous_greedy",
                "--seed",
                "11",
            ],
        ),
        ("points", vec!["solve", "multi", &points, "--seed", "11", "--svg", &svg]),
        (
            "gen",
            vec![
                "gen",
                "random-uniform",
                "--n",
                "12",
                "--m",
                "8",
                "--p",
                "0.3",
                "--seed",
                "7",
            ],
        ),
    ];
    let mut differing = Vec::new();
    for (name, args) in &runs {
        let (ok_a, a) = run_cli(args);
        let (ok_b, b) = run_cli(args);
        if !ok_a || !ok_b || a != b || a.is_empty() {
            differing.push(*name);
        }
    }
    Outcome::new(
        differing.is_empty(),
        if differing.is_empty() {
            format!("{} commands byte-identical across two invocations", runs.len())
        } else {
            format!("differing or failing: {}", differing.join(", "))
        },
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 psc ratio", criterion_psc),
        ("2 greedy vs lp", criterion_greedy),
        ("3 extension sandwich", criterion_sandwich),
        ("4 concentration", criterion_concentration),
        ("5 bicriteria multicover", criterion_bicriteria),
        ("6 ccf feasibility and cost", criterion_ccf),
        ("7 kc validity", criterion_kc),
        ("8 point splitting", criterion_points),
        ("9 determinism", criterion_determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let out = run();
        let verdict = if out.pass { "PASS" } else { "FAIL" };
        println!(
            "{verdict} criterion {name}: {} [{:.1}s]",
            out.detail,
            start.elapsed().as_secs_f64()
        );
        if !out.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
