//! Online machine covering with bounded migration.
//!
//! Jobs arrive one at a time and must be scheduled on identical machines so
//! that the *minimum* machine load stays close to the offline optimum, while
//! every arrival is allowed to move (migrate) only a bounded volume of
//! previously placed jobs. Everything is computed in exact rational
//! arithmetic; there are no floating point numbers anywhere in the crate.
//!
//! Module map:
//!
//! * [`rational`] - exact arithmetic helpers on top of `BigRational`
//!   (canonical `"num/den"` strings, powers of two, binary logarithms).
//! * [`job`] / [`schedule`] - domain types: jobs with cached rounded sizes,
//!   instances, schedules with incremental loads, sorted load profiles.
//! * [`rounding`] - the geometric-arithmetic size rounding, upper-bound
//!   estimate, rounding context (size ladder, grid, job classes) and the
//!   configuration census used for the state-space counting arguments.
//! * [`lpt`] - longest-processing-time list scheduling plus the certifier
//!   that recognizes *every* schedule an LPT run could have produced.
//! * [`jump`] - jump/swap local optimality certifiers, the `push` insertion
//!   primitive and the online jump-optimal algorithm.
//! * [`online_lpt`] - the phased online LPT algorithm with bounded migration
//!   and its per-arrival phase trace.
//! * [`migration`] - migration ledgers shared by all online algorithms.
//! * [`oracle`] - exact ground truth at desk scale: optimal covering by
//!   branch and bound (plus an independent dynamic program), the frozen
//!   "no migration" adversary bound, and the stream driver.
//! * [`generators`] - deterministic instance families: adversarial lower
//!   bound constructions and seeded random streams.
//! * [`io`] - JSONL streams, session snapshots and report serialization.

pub mod error;
pub mod generators;
pub mod io;
pub mod job;
pub mod jump;
pub mod lpt;
pub mod migration;
pub mod online_lpt;
pub mod oracle;
pub mod rational;
pub mod rounding;
pub mod schedule;

pub use error::{Error, Result};
pub use job::{Instance, Job, JobId};
pub use rational::Rational;
pub use schedule::{LoadProfile, Schedule};
