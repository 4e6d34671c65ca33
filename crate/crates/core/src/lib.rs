//! Approximation algorithms for Partial Set Cover, multi-constraint
//! submodular cover and Covering Coverage Functions, with brute-force
//! oracles that certify their guarantees on small instances.

pub mod bench;
pub mod ccf;
pub mod gen;
pub mod greedy;
pub mod io;
pub mod lp;
pub mod multicover;
pub mod oracle;
pub mod psc;
pub mod rng;
pub mod setsys;
pub mod submod;

pub use setsys::{
    validate, CcfInstance, CoverRow, ElementId, PscInstance, SetId, SetSystem, Solution, ValidationError, TOL,
};
