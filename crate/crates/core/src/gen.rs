//! Seeded random instance families.

use rand::seq::SliceRandom;
use rand::Rng as _;
use thiserror::Error;

use crate::io::InstanceFile;
use crate::rng::{self, Rng};
use crate::setsys::{CcfInstance, CoverRow, PscInstance, SetSystem};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("bad parameter {name}: {message}")]
    BadParam { name: &'static str, message: String },
    #[error("unknown family {0:?} (expected random-uniform, frequency-bounded, partition, cip or sparse-ccf)")]
    UnknownFamily(String),
    #[error("unknown weight regime {0:?} (expected unit, uniform or skewed)")]
    UnknownWeights(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// PSC; each element joins each set with probability `p`.
    RandomUniform,
    /// PSC; each element joins exactly `f` distinct random sets.
    FrequencyBounded,
    /// Partition cover: elements split into `rows` groups, one unit row per
    /// group. One group gives a PSC instance.
    Partition,
    /// Covering integer program: every set is a singleton.
    Cip,
    /// CCF where every set touches elements of at most `sparsity` rows.
    SparseCcf,
}

impl std::str::FromStr for Family {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "random-uniform" => Family::RandomUniform,
            "frequency-bounded" => Family::FrequencyBounded,
            "partition" => Family::Partition,
            "cip" => Family::Cip,
            "sparse-ccf" => Family::SparseCcf,
            other => return Err(GenError::UnknownFamily(other.to_string())),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightRegime {
    Unit,
    /// Integers in `1..=10`.
    Uniform,
    /// Powers of two from 1 to 64.
    Skewed,
}

impl std::str::FromStr for WeightRegime {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "unit" => WeightRegime::Unit,
            "uniform" => WeightRegime::Uniform,
            "skewed" => WeightRegime::Skewed,
            other => return Err(GenError::UnknownWeights(other.to_string())),
        })
    }
}

impl WeightRegime {
    pub const ALL: [WeightRegime; 3] = [WeightRegime::Unit, WeightRegime::Uniform, WeightRegime::Skewed];

    fn draw(self, rng: &mut Rng, m: usize) -> Vec<f64> {
        (0..m)
            .map(|_| match self {
                WeightRegime::Unit => 1.0,
                WeightRegime::Uniform => rng.random_range(1..=10) as f64,
                WeightRegime::Skewed => (1u32 << rng.random_range(0..=6)) as f64,
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenParams {
    /// Universe size (ignored by `cip`, which uses `m`).
    pub n: usize,
    /// Number of sets.
    pub m: usize,
    /// Membership or nonzero-coefficient probability.
    pub p: f64,
    /// Frequency for `frequency-bounded`.
    pub f: usize,
    /// Row count for `partition`, `cip` and `sparse-ccf`.
    pub rows: usize,
    /// Rows a set may touch in `sparse-ccf`.
    pub sparsity: usize,
    /// Demand as a fraction of what all sets together reach.
    pub demand_fraction: f64,
    pub weights: WeightRegime,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            n: 12,
            m: 8,
            p: 0.3,
            f: 2,
            rows: 2,
            sparsity: 1,
            demand_fraction: 0.6,
            weights: WeightRegime::Uniform,
        }
    }
}

fn bad(name: &'static str, message: impl Into<String>) -> GenError {
    GenError::BadParam {
        name,
        message: message.into(),
    }
}

impl GenParams {
    pub fn check(&self, family: Family) -> Result<(), GenError> {
        if self.m == 0 {
            return Err(bad("m", "need at least one set"));
        }
        if family != Family::Cip && self.n == 0 {
            return Err(bad("n", "need at least one element"));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(bad("p", format!("{} is not a probability", self.p)));
        }
        if !(0.0..=1.0).contains(&self.demand_fraction) {
            return Err(bad(
                "demand_fraction",
                format!("{} is not in [0, 1]", self.demand_fraction),
            ));
        }
        match family {
            Family::FrequencyBounded if self.f == 0 || self.f > self.m => {
                Err(bad("f", format!("{} must lie in 1..={}", self.f, self.m)))
            }
            Family::Partition | Family::SparseCcf if self.rows == 0 || self.rows > self.n => {
                Err(bad("rows", format!("{} must lie in 1..={}", self.rows, self.n)))
            }
            Family::Cip if self.rows == 0 => Err(bad("rows", "need at least one row")),
            Family::SparseCcf if self.sparsity == 0 || self.sparsity > self.rows => Err(bad(
                "sparsity",
                format!("{} must lie in 1..={}", self.sparsity, self.rows),
            )),
            _ => Ok(()),
        }
    }
}

fn demand_of(reachable: usize, fraction: f64) -> usize {
    ((fraction * reachable as f64).ceil() as usize).min(reachable)
}

pub fn random_uniform(params: &GenParams, seed: u64) -> PscInstance {
    let mut rng = rng::from_seed(seed);
    let sets: Vec<Vec<usize>> = (0..params.m)
        .map(|_| (0..params.n).filter(|_| rng.random::<f64>() < params.p).collect())
        .collect();
    let weights = params.weights.draw(&mut rng, params.m);
    let system = SetSystem::new(params.n, sets, weights).expect("generated system is valid");
    let k = demand_of(system.coverable().len(), params.demand_fraction);
    PscInstance::new(system, k)
}

pub fn frequency_bounded(params: &GenParams, seed: u64) -> PscInstance {
    let mut rng = rng::from_seed(seed);
    let mut sets = vec![Vec::new(); params.m];
    let mut ids: Vec<usize> = (0..params.m).collect();
    for e in 0..params.n {
        ids.shuffle(&mut rng);
        for &i in &ids[..params.f] {
            sets[i].push(e);
        }
    }
    let weights = params.weights.draw(&mut rng, params.m);
    let system = SetSystem::new(params.n, sets, weights).expect("generated system is valid");
    let k = demand_of(system.coverable().len(), params.demand_fraction);
    PscInstance::new(system, k)
}

fn groups(rng: &mut Rng, n: usize, rows: usize) -> Vec<usize> {
    let mut group: Vec<usize> = (0..n).map(|e| e % rows).collect();
    group.shuffle(rng);
    group
}

pub fn partition(params: &GenParams, seed: u64) -> CcfInstance {
    let base = random_uniform(params, seed);
    let mut rng = rng::stream(seed, 1);
    let group = groups(&mut rng, params.n, params.rows);
    let all: Vec<usize> = (0..base.system.n_sets()).collect();
    let covered = base.system.covered_mask(&all);
    let rows = (0..params.rows)
        .map(|g| {
            let members: Vec<usize> = (0..params.n).filter(|&e| group[e] == g).collect();
            let reach = members.iter().filter(|&&e| covered[e]).count();
            CoverRow::unit(members, demand_of(reach, params.demand_fraction) as f64)
        })
        .collect();
    CcfInstance::new(base.system, rows)
}

/// Coefficient in `{0.25, 0.5, 0.75, 1}`.
fn quarter(rng: &mut Rng) -> f64 {
    rng.random_range(1..=4) as f64 / 4.0
}

fn ccf_rows(rng: &mut Rng, system: &SetSystem, support: &[Vec<usize>], fraction: f64) -> Vec<CoverRow> {
    let all: Vec<usize> = (0..system.n_sets()).collect();
    let covered = system.covered_mask(&all);
    support
        .iter()
        .map(|elems| {
            let coeffs: Vec<(usize, f64)> = elems.iter().map(|&e| (e, quarter(rng))).collect();
            let reach: f64 = coeffs.iter().filter(|(e, _)| covered[*e]).map(|(_, a)| a).sum();
            // quarter-grid demand keeps brute-force comparisons exact
            let demand = (4.0 * fraction * reach).floor() / 4.0;
            CoverRow::new(coeffs, demand)
        })
        .collect()
}

pub fn cip(params: &GenParams, seed: u64) -> CcfInstance {
    let mut rng = rng::from_seed(seed);
    let m = params.m;
    let sets = (0..m).map(|i| vec![i]).collect();
    let weights = params.weights.draw(&mut rng, m);
    let system = SetSystem::new(m, sets, weights).expect("generated system is valid");
    let support: Vec<Vec<usize>> = (0..params.rows)
        .map(|_| (0..m).filter(|_| rng.random::<f64>() < params.p.max(0.05)).collect())
        .collect();
    let rows = ccf_rows(&mut rng, &system, &support, params.demand_fraction);
    CcfInstance::new(system, rows)
}

pub fn sparse_ccf(params: &GenParams, seed: u64) -> CcfInstance {
    let mut rng = rng::from_seed(seed);
    let group = groups(&mut rng, params.n, params.rows);
    let mut row_ids: Vec<usize> = (0..params.rows).collect();
    let sets: Vec<Vec<usize>> = (0..params.m)
        .map(|_| {
            row_ids.shuffle(&mut rng);
            let touched = &row_ids[..rng.random_range(1..=params.sparsity)];
            (0..params.n)
                .filter(|&e| touched.contains(&group[e]) && rng.random::<f64>() < params.p)
                .collect()
        })
        .collect();
    let weights = params.weights.draw(&mut rng, params.m);
    let system = SetSystem::new(params.n, sets, weights).expect("generated system is valid");
    let support: Vec<Vec<usize>> = (0..params.rows)
        .map(|g| (0..params.n).filter(|&e| group[e] == g).collect())
        .collect();
    let rows = ccf_rows(&mut rng, &system, &support, params.demand_fraction);
    CcfInstance::new(system, rows)
}

pub fn generate(family: Family, params: &GenParams, seed: u64) -> Result<InstanceFile, GenError> {
    params.check(family)?;
    Ok(match family {
        Family::RandomUniform => InstanceFile::from_psc(&random_uniform(params, seed)),
        Family::FrequencyBounded => InstanceFile::from_psc(&frequency_bounded(params, seed)),
        Family::Partition => {
            let inst = partition(params, seed);
            if params.rows == 1 {
                let k = inst.rows[0].demand as usize;
                InstanceFile::from_psc(&PscInstance::new(inst.system, k))
            } else {
                InstanceFile::from_ccf(&inst)
            }
        }
        Family::Cip => InstanceFile::from_ccf(&cip(params, seed)),
        Family::SparseCcf => InstanceFile::from_ccf(&sparse_ccf(params, seed)),
    })
}
