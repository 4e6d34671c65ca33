//! JSON instance files.
//!
//! One document per instance, tagged by `type`:
//!
//! ```text
//! {"type": "psc",    "universe": n, "sets": [[e, ..], ..], "weights": [w, ..], "k": k}
//! {"type": "ccf",    "universe": n, "sets": .., "weights": .., "rows": [{"coeffs": {"e": a, ..}, "demand": b}, ..]}
//! {"type": "multi",  "weights": [w, ..], "constraints": [{"covers": [[atom, ..] per element], "atom_weights": [..], "demand": d}, ..]}
//! {"type": "points", "beta": 0.5, "sets": [{"label": "A", "points": [[x, y], ..]}, ..]}
//! ```
//!
//! `weights` may be omitted for unit weights. Floats are written in shortest
//! round-trip form, so parse then serialize is lossless.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::multicover::{point_split_build, MultiSubmodInstance, MulticoverError, PointSplit};
use crate::setsys::{validate, CcfInstance, CoverRow, PscInstance, SetSysError, SetSystem, ValidationError};
use crate::submod::{CoverageFn, DynOracle, Point};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid set system: {0}")]
    SetSystem(#[from] SetSysError),
    #[error("invalid instance: {}", join(.0))]
    Invalid(Vec<ValidationError>),
    #[error("expected a {expected} instance, found {found}")]
    WrongType {
        expected: &'static str,
        found: &'static str,
    },
    #[error("constraint {constraint}: {message}")]
    Constraint { constraint: usize, message: String },
    #[error(transparent)]
    Multicover(#[from] MulticoverError),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

fn join(errors: &[ValidationError]) -> String {
    errors.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; ")
}

impl IoError {
    /// Whether the instance is well formed but has no feasible solution.
    pub fn is_infeasibility(&self) -> bool {
        match self {
            IoError::Invalid(errors) => !errors.is_empty() && errors.iter().all(|e| e.is_infeasibility()),
            IoError::Multicover(MulticoverError::Unreachable { .. }) => true,
            _ => false,
        }
    }
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        IoError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PscFile {
    pub universe: usize,
    pub sets: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcfFile {
    pub universe: usize,
    pub sets: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    pub rows: Vec<CoverRow>,
}

/// A weighted coverage constraint: ground element `i` covers atoms
/// `covers[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageConstraint {
    pub covers: Vec<Vec<usize>>,
    pub atom_weights: Vec<f64>,
    pub demand: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiFile {
    pub weights: Vec<f64>,
    pub constraints: Vec<CoverageConstraint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledPoints {
    pub label: String,
    pub points: Vec<[f64; 2]>,
}

fn default_beta() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointsFile {
    #[serde(default = "default_beta")]
    pub beta: f64,
    pub sets: Vec<LabeledPoints>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum InstanceFile {
    Psc(PscFile),
    Ccf(CcfFile),
    Multi(MultiFile),
    Points(PointsFile),
}

// Dispatch by hand: serde's buffered tagged-enum path cannot read the
// integer keys of `coeffs` back from JSON strings.
impl<'de> Deserialize<'de> for InstanceFile {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let mut value = serde_json::Value::deserialize(deserializer)?;
        let kind = value
            .as_object_mut()
            .ok_or_else(|| D::Error::custom("instance must be a JSON object"))?
            .remove("type")
            .ok_or_else(|| D::Error::missing_field("type"))?;
        match kind.as_str() {
            Some("psc") => serde_json::from_value(value)
                .map(InstanceFile::Psc)
                .map_err(D::Error::custom),
            Some("ccf") => serde_json::from_value(value)
                .map(InstanceFile::Ccf)
                .map_err(D::Error::custom),
            Some("multi") => serde_json::from_value(value)
                .map(InstanceFile::Multi)
                .map_err(D::Error::custom),
            Some("points") => serde_json::from_value(value)
                .map(InstanceFile::Points)
                .map_err(D::Error::custom),
            Some(other) => Err(D::Error::custom(format!(
                "unknown instance type {other:?}, expected psc, ccf, multi or points"
            ))),
            None => Err(D::Error::custom("field `type` must be a string")),
        }
    }
}

fn system_of(universe: usize, sets: &[Vec<usize>], weights: &Option<Vec<f64>>) -> Result<SetSystem, IoError> {
    let weights = weights.clone().unwrap_or_else(|| vec![1.0; sets.len()]);
    Ok(SetSystem::new(universe, sets.to_vec(), weights)?)
}

fn weights_of(system: &SetSystem) -> Option<Vec<f64>> {
    let w = system.weights();
    (!w.iter().all(|&x| x == 1.0)).then(|| w.to_vec())
}

impl InstanceFile {
    pub fn kind(&self) -> &'static str {
        match self {
            InstanceFile::Psc(_) => "psc",
            InstanceFile::Ccf(_) => "ccf",
            InstanceFile::Multi(_) => "multi",
            InstanceFile::Points(_) => "points",
        }
    }

    pub fn parse(text: &str) -> Result<Self, IoError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: &std::path::Path) -> Result<Self, IoError> {
        let text = std::fs::read_to_string(path).map_err(|source| IoError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    pub fn from_psc(instance: &PscInstance) -> Self {
        let s = &instance.system;
        InstanceFile::Psc(PscFile {
            universe: s.n_elements(),
            sets: s.sets().to_vec(),
            weights: weights_of(s),
            k: instance.k,
        })
    }

    pub fn from_ccf(instance: &CcfInstance) -> Self {
        let s = &instance.system;
        InstanceFile::Ccf(CcfFile {
            universe: s.n_elements(),
            sets: s.sets().to_vec(),
            weights: weights_of(s),
            rows: instance.rows.clone(),
        })
    }

    /// The multi-constraint form of a CCF instance: one weighted coverage
    /// constraint per row.
    pub fn multi_from_ccf(instance: &CcfInstance) -> Self {
        let s = &instance.system;
        let constraints = instance
            .rows
            .iter()
            .filter(|r| r.demand > 0.0)
            .map(|r| {
                let f = CoverageFn::weighted(s, r);
                CoverageConstraint {
                    covers: f.covers().to_vec(),
                    atom_weights: f.atom_weights().to_vec(),
                    demand: r.demand,
                }
            })
            .collect();
        InstanceFile::Multi(MultiFile {
            weights: s.weights().to_vec(),
            constraints,
        })
    }

    pub fn from_point_sets(point_sets: &[Vec<Point>], beta: f64) -> Self {
        InstanceFile::Points(PointsFile {
            beta,
            sets: point_sets
                .iter()
                .enumerate()
                .map(|(i, ps)| LabeledPoints {
                    label: format!("P{i}"),
                    points: ps.iter().map(|p| [p.x, p.y]).collect(),
                })
                .collect(),
        })
    }

    /// Builds and validates a PSC instance.
    pub fn to_psc(&self) -> Result<PscInstance, IoError> {
        let inst = match self {
            InstanceFile::Psc(f) => PscInstance::new(system_of(f.universe, &f.sets, &f.weights)?, f.k),
            other => {
                return Err(IoError::WrongType {
                    expected: "psc",
                    found: other.kind(),
                })
            }
        };
        validate(&inst).map_err(IoError::Invalid)?;
        Ok(inst)
    }

    /// Builds and validates a CCF instance; PSC files become one unit row.
    pub fn to_ccf(&self) -> Result<CcfInstance, IoError> {
        let inst = match self {
            InstanceFile::Ccf(f) => CcfInstance::new(system_of(f.universe, &f.sets, &f.weights)?, f.rows.clone()),
            InstanceFile::Psc(f) => {
                CcfInstance::from_psc(&PscInstance::new(system_of(f.universe, &f.sets, &f.weights)?, f.k))
            }
            other => {
                return Err(IoError::WrongType {
                    expected: "ccf",
                    found: other.kind(),
                })
            }
        };
        validate(&inst).map_err(IoError::Invalid)?;
        Ok(inst)
    }

    /// Builds a multi-constraint instance from a `multi` file, or from a PSC
    /// or CCF file through its coverage rows.
    pub fn to_multi(&self) -> Result<MultiSubmodInstance, IoError> {
        match self {
            InstanceFile::Multi(f) => multi_instance(f),
            InstanceFile::Psc(_) | InstanceFile::Ccf(_) => match InstanceFile::multi_from_ccf(&self.to_ccf()?) {
                InstanceFile::Multi(f) => multi_instance(&f),
                _ => unreachable!(),
            },
            other => Err(IoError::WrongType {
                expected: "multi",
                found: other.kind(),
            }),
        }
    }

    pub fn point_sets(&self) -> Result<(Vec<Vec<Point>>, f64), IoError> {
        match self {
            InstanceFile::Points(f) => Ok((
                f.sets
                    .iter()
                    .map(|s| s.points.iter().map(|&[x, y]| Point::new(x, y)).collect())
                    .collect(),
                f.beta,
            )),
            other => Err(IoError::WrongType {
                expected: "points",
                found: other.kind(),
            }),
        }
    }

    pub fn to_point_split(&self) -> Result<PointSplit, IoError> {
        let (sets, beta) = self.point_sets()?;
        Ok(point_split_build(&sets, beta)?)
    }
}

fn multi_instance(f: &MultiFile) -> Result<MultiSubmodInstance, IoError> {
    let m = f.weights.len();
    let mut constraints: Vec<(DynOracle, f64)> = Vec::new();
    for (j, c) in f.constraints.iter().enumerate() {
        let bad = |message: String| IoError::Constraint { constraint: j, message };
        if c.covers.len() != m {
            return Err(bad(format!(
                "covers has {} entries for {m} ground elements",
                c.covers.len()
            )));
        }
        let atoms = c.atom_weights.len();
        if let Some(a) = c.covers.iter().flatten().find(|&&a| a >= atoms) {
            return Err(bad(format!("atom {a} out of range (only {atoms} atom weights)")));
        }
        if let Some(w) = c.atom_weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(bad(format!("atom weight {w} is negative or not finite")));
        }
        if !(c.demand > 0.0 && c.demand.is_finite()) {
            return Err(bad(format!("demand {} must be positive", c.demand)));
        }
        let mut covers = c.covers.clone();
        for list in &mut covers {
            list.sort_unstable();
            list.dedup();
        }
        constraints.push((
            Arc::new(CoverageFn::new(covers, c.atom_weights.clone(), None)),
            c.demand,
        ));
    }
    let inst = MultiSubmodInstance::from_demands(f.weights.clone(), constraints)?;
    inst.check_reachable()?;
    Ok(inst)
}
