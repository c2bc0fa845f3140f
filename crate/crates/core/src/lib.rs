//! Factorizations `G = AB` of groups: filtrations with alternating-side
//! transversals, greedy partial-factorization growth, and brute-force oracles.
//!
//! Groups, elements and base families live in [`group`], [`element`],
//! [`subgroup`] and [`topology`]. Constructions are in [`filtration`] and
//! [`greedy`]; every verdict comes from [`verify`].

pub mod chains;
pub mod element;
pub mod error;
pub mod filtration;
pub mod greedy;
pub mod group;
pub mod subgroup;
pub mod topology;
pub mod verify;

pub use element::{BitSet, Element};
pub use error::{Error, Result};
pub use filtration::{
    build_dense_filtration, decompose, extract_factors, recompose, select_transversals, subgroup_transversal_factorize,
    validate_filtration, DenseOptions, FactorPair, Filtration, LevelIndex, NormalForm, Scope, TransversalSystem,
};
pub use greedy::{run_comment4, run_comment6, GreedyRun, PartialFactorization, Search};
pub use group::{Group, Order};
pub use subgroup::{Side, Subgroup};
pub use topology::{BaseFamily, BaseSet};
pub use verify::{Verdict, VerificationReport};
