//! Shock structure of the unforced Burgers equation in the vanishing-viscosity
//! limit, computed through the global-minimum representation of the limit
//! solution.
//!
//! The limit solution is `phi(x,t) = min_a W(a,x,t)` with
//! `W(a,x,t) = phi0(a) + |a-x|^2 / (2t)`. Points where the minimum is attained
//! more than once, or degenerately, form the instant shock. This crate
//!
//! * evaluates initial conditions as truncated Taylor jets ([`field`]),
//! * assembles the action and its finite-viscosity reference ([`action`]),
//! * finds and classifies tied global minima ([`minima`]),
//! * decides singularity vs. perestroika at a space-time point and computes
//!   extended names and signatures ([`determinator`]),
//! * encodes the normal-form catalog and derives the allowed perestroika map
//!   from the contractibility restriction ([`catalog`]),
//! * extracts instant shocks and localizes perestroika events in time
//!   ([`tracker`]).

pub mod action;
pub mod catalog;
pub mod config;
pub mod determinator;
pub mod error;
pub mod field;
pub mod geometry;
pub mod minima;
pub mod polyroots;
pub mod tracker;

pub use error::ShockError;
pub use field::{FieldExpr, Jet};
pub use minima::{MinimaCollection, MinimumRecord, SearchConfig};
