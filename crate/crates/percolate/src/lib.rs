//! Spread of a component through a random graph, simulated without ever
//! materializing an edge, together with the ball-and-urn process that has the
//! same law, the deterministic and diffusion limits of that process, and a
//! validation harness that checks the simulators against the limits.
//!
//! Layout:
//!
//! * [`kernel`] — seedable, bit-stable randomness: counter-based streams,
//!   binomial and gaussian draws, Brownian paths on a variance clock.
//! * [`graph`] — the label-propagation process on a random graph, driven by
//!   one binomial draw per step.
//! * [`urn`] — the two-urn contraction with the same increments, plus its
//!   scaled and martingale views.
//! * [`limits`] — exponential decay profile, variance profiles, hitting law
//!   of the spread's end, and the critical-rate threshold solver.
//! * [`validation`] — ensembles, goodness-of-fit machinery, an exact
//!   enumeration oracle for tiny graphs, and cross-checks between all of the
//!   above.

pub mod error;
pub mod graph;
pub mod kernel;
pub mod limits;
pub mod urn;
pub mod validation;

pub use error::{Error, Result};
