//! Oracle-backed benchmark over a suite of instances.
//!
//! Suite file: `{"instances": [{"name": "...", "instance": {...}}, ..]}` with
//! instance documents as in [`crate::io`]. Each instance runs `trials` times
//! with derived seeds and is compared with its exact optimum. Bounds:
//!
//! - psc: `e/(e-1) (beta + 1)` with the measured `beta`;
//! - ccf: `10 (beta + ln r)`;
//! - multi and points: `4 (ln r / eps + 2)` on cost (coverage is bicriteria).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::ccf::{solve_ccf_detailed, CcfConfig};
use crate::io::InstanceFile;
use crate::multicover::{solve_multi, Backend, MultiSubmodInstance};
use crate::oracle::{brute_ccf, brute_multi, brute_psc, RatioReport};
use crate::psc::{psc_ratio_bound, solve_psc_detailed, PscConfig};
use crate::rng;

/// Constant in the CCF bound.
pub const CCF_CONSTANT: f64 = 10.0;
/// Constant in the multi-constraint cost bound.
pub const MULTI_CONSTANT: f64 = 4.0;
/// Accuracy used for multi and points instances.
pub const BENCH_EPSILON: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteEntry {
    pub name: String,
    pub instance: InstanceFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Suite {
    pub instances: Vec<SuiteEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub algorithm: String,
    pub runs: usize,
    pub mean_ratio: f64,
    pub max_ratio: f64,
    pub failures: usize,
    pub errors: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BenchRecord {
    Report(RatioReport),
    Error {
        instance: String,
        algorithm: String,
        message: String,
    },
    Summary(BenchSummary),
}

impl BenchRecord {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }
}

fn run_multi(name: &str, algorithm: &str, inst: &MultiSubmodInstance, seed: u64) -> Result<RatioReport, String> {
    let (_, sol) = solve_multi(inst, BENCH_EPSILON, Backend::Lp, seed).map_err(|e| e.to_string())?;
    let opt = brute_multi(inst).map_err(|e| e.to_string())?;
    let r = inst.sparsity().max(1) as f64;
    let bound = MULTI_CONSTANT * (r.ln() / BENCH_EPSILON + 2.0);
    Ok(RatioReport::new(
        name,
        algorithm,
        sol.cost,
        opt.opt(),
        bound,
        Some(seed),
    ))
}

fn run_one(entry: &SuiteEntry, seed: u64) -> Result<RatioReport, String> {
    let name = entry.name.as_str();
    let err = |e: &dyn std::fmt::Display| e.to_string();
    match &entry.instance {
        InstanceFile::Psc(_) => {
            let inst = entry.instance.to_psc().map_err(|e| err(&e))?;
            let rep = solve_psc_detailed(&inst, &PscConfig::default()).map_err(|e| err(&e))?;
            let opt = brute_psc(&inst).map_err(|e| err(&e))?;
            let bound = psc_ratio_bound(rep.beta_effective());
            Ok(RatioReport::new(
                name,
                "psc",
                rep.solution.cost,
                opt.cost,
                bound,
                Some(seed),
            ))
        }
        InstanceFile::Ccf(_) => {
            let inst = entry.instance.to_ccf().map_err(|e| err(&e))?;
            let cfg = CcfConfig::default().with_seed(seed);
            let rep = solve_ccf_detailed(&inst, &cfg).map_err(|e| err(&e))?;
            let opt = brute_ccf(&inst).map_err(|e| err(&e))?;
            let r = inst.sparsity().max(1) as f64;
            let bound = CCF_CONSTANT * (rep.beta_effective + r.ln());
            Ok(RatioReport::new(
                name,
                "ccf",
                rep.solution.cost,
                opt.cost,
                bound,
                Some(seed),
            ))
        }
        InstanceFile::Multi(_) => {
            let inst = entry.instance.to_multi().map_err(|e| err(&e))?;
            run_multi(name, "multi", &inst, seed)
        }
        InstanceFile::Points(_) => {
            let split = entry.instance.to_point_split().map_err(|e| err(&e))?;
            run_multi(name, "points", &split.instance, seed)
        }
    }
}

/// Runs every instance `trials` times, in suite order, then appends one
/// summary per algorithm (sorted by name).
pub fn bench(suite: &Suite, trials: usize, seed: u64) -> Vec<BenchRecord> {
    let mut records = Vec::new();
    let mut stats: BTreeMap<String, BenchSummary> = BTreeMap::new();
    for (idx, entry) in suite.instances.iter().enumerate() {
        let algorithm = entry.instance.kind().to_string();
        let summary = stats.entry(algorithm.clone()).or_insert_with(|| BenchSummary {
            algorithm: algorithm.clone(),
            runs: 0,
            mean_ratio: 0.0,
            max_ratio: 0.0,
            failures: 0,
            errors: 0,
        });
        for t in 0..trials {
            let run_seed = rng::derive(seed, (idx * trials + t) as u64);
            match run_one(entry, run_seed) {
                Ok(rep) => {
                    summary.runs += 1;
                    summary.mean_ratio += rep.ratio;
                    summary.max_ratio = summary.max_ratio.max(rep.ratio);
                    if !rep.pass {
                        summary.failures += 1;
                    }
                    records.push(BenchRecord::Report(rep));
                }
                Err(message) => {
                    summary.errors += 1;
                    records.push(BenchRecord::Error {
                        instance: entry.name.clone(),
                        algorithm: algorithm.clone(),
                        message,
                    });
                }
            }
        }
    }
    for (_, mut s) in stats {
        if s.runs > 0 {
            s.mean_ratio /= s.runs as f64;
        }
        records.push(BenchRecord::Summary(s));
    }
    records
}
