//! Pure equilibria for the Bakers and Millers Game with restricted baker
//! locations.
//!
//! Bakers pick a location from their own permissible set, millers pick any
//! location. A baker earns the ratio of millers to bakers at her location and
//! a miller earns the inverse ratio. This crate computes a pure Nash
//! equilibrium in polynomial time (greedy baker concentration, best-response
//! miller insertion, then a Rosenthal-potential maximization solved as an
//! integral min-cost flow), and ships an exhaustive oracle plus instance
//! generators used to check the welfare bounds on small instances.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod dynamics;
mod error;
pub mod flow;
pub mod model;
pub mod oracle;
pub mod rational;
pub mod reductions;
pub mod solver;

pub use error::{Error, Result};
pub use model::{Agent, Deviation, Instance, Occupancy, StrategyProfile};
pub use rational::Rational;
