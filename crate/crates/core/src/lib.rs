//! Exact combinatorial dynamics of continuous interval self-maps.
//!
//! The crate works with *orbit patterns* (cyclic permutations describing the
//! spatial order of a periodic orbit), their piecewise-linear model maps over
//! arbitrary-precision rationals, and the forcing relations between orbit
//! types. Everything is decided exactly: there is no floating point anywhere
//! in the engine, so strict inequalities never flip under rounding.
//!
//! Main entry points:
//!
//! * [`patterns`] — cyclic permutations, mirror symmetry, enumeration, and
//!   template classification (monotone, Štefan, two-parameter types).
//! * [`plmap`] — exact piecewise-linear self-maps: evaluation, iteration,
//!   fixed sets, preimages, and the periodic-orbit solver.
//! * [`markov`] — covering graphs on basic intervals and loop analysis.
//! * [`properties`] — decision procedures for the property families `P(n)`,
//!   `L^k(n)`, `S^k(q)`, `L^k(m,n)` and their infinite variants.
//! * [`witness`] — executable proof constructions producing exact traces.
//! * [`verify`] — the Sharkovskii comparator, the implication-arrow table,
//!   and the exhaustive corpus verifier.

pub mod config;
pub mod error;
pub mod interval;
pub mod markov;
pub mod patterns;
pub mod plmap;
pub mod properties;
pub mod rational;
pub mod verify;
pub mod witness;

pub use config::{CheckConfig, EngineConfig};
pub use error::{Error, Result};
pub use patterns::{classify, enumerate, from_orbit, Pattern, TypeTag};
pub use plmap::{connect_the_dots, FixedSet, OrbitFamily, PLMap, PeriodicItem};
pub use rational::{parse_rat, rat, Rat};
pub use witness::FiniteOrbit;
