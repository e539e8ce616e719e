//! Popular matchings for one-sided preferences with ties.
//!
//! Agents rank posts in tiers; a matching is *popular* when no other
//! matching wins a head-to-head vote among the agents. The crate computes a
//! popular matching, the switching graph that links all popular matchings,
//! the set of popular pairs, optimal single-agent cheating strategies, and
//! whether truthful reporting is an equilibrium. [`oracle`] holds the
//! exhaustive reference implementations used to check all of it.

pub mod analysis;
pub mod engine;
pub mod error;
pub mod fixtures;
pub mod gen;
pub mod manipulation;
pub mod model;
pub mod oracle;
pub mod switching;

pub use error::{Error, Result};
