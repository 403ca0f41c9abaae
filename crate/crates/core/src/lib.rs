//! Random assignment of indivisible objects when every agent receives
//! several of them.
//!
//! The crate computes the uniform, serial-dictator, random-priority and
//! eating (one-at-a-time and multi-unit) rules over exact rationals, and
//! decides efficiency, envy-freeness, equivariance and manipulability of
//! their outcomes with checkable certificates.

pub mod efficiency;
pub mod error;
pub mod fairness;
pub mod guards;
pub mod model;
pub mod order;
pub mod ratlp;
pub mod rational;
pub mod rules;
pub mod strategy;

pub use error::{Error, Result};
pub use guards::Guards;
pub use model::{
    validate_assignment, DiscreteAssignment, Instance, Permutation, PreferenceProfile, RandomAssignment, Relabel,
    Validity, Violation,
};
pub use order::{dl_compare, sd_compare, DlVerdict, SdVerdict};
pub use rational::{rat, Rational};
pub use rules::{AssignmentRule, Rule};
