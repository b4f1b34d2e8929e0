//! Coherent sublinear expectations on finite sample spaces, with exact
//! rational arithmetic throughout.
//!
//! A worst-case expectation over a family of probability measures that need
//! not share null sets is analysed quasi-surely: statements hold off the
//! polar sets every member ignores. This crate builds the machinery that
//! makes such analysis constructive on a finite space:
//!
//! - [`space`]: sigma-algebras as partitions, per-measure and universal
//!   completions, polar sets.
//! - [`measure`]: exact measures and families, Radon-Nikodym derivatives,
//!   measure pasting and the pasting closure ([`measure::stabilize`]).
//! - [`hahn`]: dominating partitions — disjointly supported measures
//!   generating the same polar sets — and minimal measurable supports.
//! - [`expectation`]: the sublinear expectation, quasi-sure essential
//!   suprema, aggregation, conditional expectations and their worst-case
//!   envelope, dominance and consistency checks.
//! - [`filtration`]: conditional chains over discrete filtrations,
//!   recursivity, martingale classification, uniform integrability.
//!
//! Everything is deterministic: values are exact rationals, families and
//! partitions are kept in canonical order, and parallel execution (the
//! default `parallel` feature) never changes a result.

pub mod error;
pub mod expectation;
pub mod filtration;
pub mod hahn;
pub mod measure;
pub mod par;
pub mod rational;
pub mod space;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use expectation::{
    aggregate, check_axioms, check_conditional_axioms, check_consistency, check_dominance,
    classical_esssup, cond_exp_qs, cond_sublinear, qs_esssup, sublinear_expectation,
    ConditionalResult, SublinearExpectation,
};
pub use filtration::{
    check_recursivity, classify_martingale, conditional_chain, lpb_membership,
    uniform_integrability_profile, AdaptedProcess, Filtration, MartingaleClass,
};
pub use hahn::{
    build_dominating_partition, check_countable_cover, minimal_support, verify_hahn,
    DominatingPartition,
};
pub use measure::{
    paste, radon_nikodym, stabilize, ExtendedValue, Measure, MeasureFamily, RandomVariable,
    StabilizeOutcome,
};
pub use rational::Rational;
pub use space::{EventSet, SampleSpace, SigmaAlgebra};
