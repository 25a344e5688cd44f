//! Closed-loop simulation of a content recommender and an opinionated
//! user population.
//!
//! A fixed catalogue of content stances spans the opinion spectrum
//! `[-1, 1]`. At every timestep each user receives one recommendation,
//! watches it for a stance-dependent fraction, likes/dislikes/ignores it,
//! and shifts opinion towards what they consumed. The recommender scores
//! content per user from past likes and watch behaviour, blended with a
//! population-wide virality signal over a sliding window, and samples the
//! next recommendation through a softmax. Everything is deterministic
//! given a seed: each user owns an independent counter-based RNG stream,
//! so results do not depend on scheduling or worker count.
//!
//! The crate also ships the Monte Carlo sweep harness used for the
//! replication campaigns (`sweep` module) and CSV/manifest emission for
//! analysis pipelines (`artifacts` module).

pub mod artifacts;
pub mod engine;
pub mod metrics;
pub mod model;
pub mod population;
pub mod recommender;
pub mod rng;
pub mod sweep;

pub use engine::{run, RunResult, Simulation, SimulationConfig, TraceOptions};
pub use metrics::{AggregateStat, MetricSet};
pub use model::{ContentCatalog, EngagementDecision, ModelError, UserState};
pub use population::InitialDistribution;
pub use recommender::{InteractionLedger, RecommenderParams, ViralityWindow};
pub use sweep::{run_sweep, run_sweep_with_progress, ResultsTable, SweepSpec};
