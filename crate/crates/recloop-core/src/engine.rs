//! One full simulation: recommend, watch, engage, update opinions, commit
//! the timestep's likes, repeat.
//!
//! Causality rule: everything a recommendation for step `t` depends on
//! (ledger rows, virality window) was produced strictly before `t`. Likes
//! staged during a step become visible only after the step's window
//! commit, so there is no within-step feedback.
//!
//! Per-user work inside a step runs on the current rayon pool. Each user
//! owns an independent RNG stream and outcomes are committed in user
//! order, so results are bit-identical for any worker count.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::{self, MetricSet};
use crate::model::{
    engagement_payoffs, engagement_probabilities, sample_engagement, softmax_into, update_opinion,
    watch_rate, ContentCatalog, EngagementDecision, UserState,
};
use crate::population::{InitialDistribution, PopulationError};
use crate::recommender::{
    payoff_p, recommendation_probabilities, record_interaction, sample_recommendation, value_a,
    value_b, values_c, InteractionLedger, LikeStaging, ViralityWindow,
};
use crate::rng;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("need at least 2 users, got {0}")]
    TooFewUsers(usize),
    #[error("need at least 1 timestep, got {0}")]
    NoSteps(usize),
    #[error("need at least 2 content stances, got {0}")]
    TooFewContents(usize),
    #[error("content count {0} exceeds the supported maximum of 65535")]
    TooManyContents(usize),
    #[error("delta must lie in [1, steps]; got delta {delta} with {steps} steps")]
    WindowOutOfRange { delta: usize, steps: usize },
    #[error("omega must lie in [0, 1], got {0}")]
    OmegaOutOfRange(f64),
    #[error("lambda must lie in [0, 1], got {0}")]
    LambdaOutOfRange(f64),
    #[error("beta must be finite and >= 0, got {0}")]
    BadBeta(f64),
    #[error("alpha must be finite and >= 0, got {0}")]
    BadAlpha(f64),
    #[error("gamma must be strictly positive, got {0}")]
    BadGamma(f64),
    #[error("mu must be strictly positive, got {0}")]
    BadMu(f64),
    #[error("initial opinion distribution invalid: {0}")]
    Population(#[from] PopulationError),
}

/// Which per-step data to keep beyond the aggregate accumulators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TraceOptions {
    /// Record the recommended content index for every (step, user); costs
    /// `users * steps` u16 entries, so it is off by default.
    pub recommendations: bool,
    /// Snapshot the opinion vector entering every N-th step (step 0
    /// included). Initial and final opinions are always kept.
    pub opinion_snapshots_every: Option<usize>,
}

/// Full description of one simulation.
///
/// Scalar parameters apply homogeneously to every user. Defaults follow
/// the reference setup: 500 users, 1000 steps, rationality 9,
/// susceptibility 0.9, watch-rate and watch-value steepness 5, softmax
/// sharpness 7, equal content/virality weighting over a 5-step window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationConfig {
    /// Population size `n`.
    pub users: usize,
    /// Timestep count `tau`.
    pub steps: usize,
    /// Number of content stances spanning [-1, 1].
    pub k: usize,
    /// Softmax sharpness of the recommender.
    pub alpha: f64,
    /// Weight of virality-based filtering, in [0, 1].
    pub omega: f64,
    /// Virality window length in timesteps.
    pub delta: usize,
    /// User decision rationality.
    pub beta: f64,
    /// Susceptibility to consumed content, in [0, 1].
    pub lambda: f64,
    /// Watch-rate sigmoid steepness.
    pub gamma: f64,
    /// Watch-value tanh steepness.
    pub mu: f64,
    /// Initial opinion distribution.
    pub initial_opinions: InitialDistribution,
    /// Master seed; fixes every draw of the run.
    pub seed: u64,
    pub trace: TraceOptions,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            users: 500,
            steps: 1000,
            k: 21,
            alpha: 7.0,
            omega: 0.5,
            delta: 5,
            beta: 9.0,
            lambda: 0.9,
            gamma: 5.0,
            mu: 5.0,
            initial_opinions: InitialDistribution::Ndic,
            seed: 0,
            trace: TraceOptions::default(),
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.users < 2 {
            return Err(ConfigError::TooFewUsers(self.users));
        }
        if self.steps == 0 {
            return Err(ConfigError::NoSteps(self.steps));
        }
        if self.k < 2 {
            return Err(ConfigError::TooFewContents(self.k));
        }
        if self.k > usize::from(u16::MAX) {
            return Err(ConfigError::TooManyContents(self.k));
        }
        if self.delta == 0 || self.delta > self.steps {
            return Err(ConfigError::WindowOutOfRange {
                delta: self.delta,
                steps: self.steps,
            });
        }
        if !(0.0..=1.0).contains(&self.omega) {
            return Err(ConfigError::OmegaOutOfRange(self.omega));
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(ConfigError::LambdaOutOfRange(self.lambda));
        }
        if !self.beta.is_finite() || self.beta < 0.0 {
            return Err(ConfigError::BadBeta(self.beta));
        }
        if !self.alpha.is_finite() || self.alpha < 0.0 {
            return Err(ConfigError::BadAlpha(self.alpha));
        }
        if !self.gamma.is_finite() || self.gamma <= 0.0 {
            return Err(ConfigError::BadGamma(self.gamma));
        }
        if !self.mu.is_finite() || self.mu <= 0.0 {
            return Err(ConfigError::BadMu(self.mu));
        }
        self.initial_opinions.validate()?;
        Ok(())
    }
}

/// Everything a finished run reports.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub initial_opinions: Vec<f64>,
    pub final_opinions: Vec<f64>,
    /// Total likes per content over the whole run.
    pub cumulative_likes: Vec<u64>,
    /// Population-wide likes per timestep.
    pub likes_per_step: Vec<u64>,
    pub total_likes: u64,
    pub total_dislikes: u64,
    pub total_neutrals: u64,
    /// Sum of every watch rate over the run.
    pub watch_sum: f64,
    pub metrics: MetricSet,
    pub dispersion_initial: f64,
    pub radicalisation_initial: f64,
    /// Recommended content per (step, user), laid out step-major, when
    /// tracing is enabled.
    pub recommendation_trace: Option<Vec<u16>>,
    /// (step, opinions entering that step) at the configured cadence.
    pub opinion_snapshots: Vec<(usize, Vec<f64>)>,
}

struct StepOutcome {
    content: u16,
    watch: f64,
    decision: EngagementDecision,
}

/// In-flight simulation state; step it manually or drive it to the end.
pub struct Simulation {
    config: SimulationConfig,
    catalog: ContentCatalog,
    users: Vec<UserState>,
    streams: Vec<ChaCha8Rng>,
    ledger: InteractionLedger,
    window: ViralityWindow,
    staging: LikeStaging,
    /// Cached `(1 - omega) * (A + B) / 2` per (user, content), refreshed
    /// for the single cell a recorded interaction touches. Stored as
    /// `payoff_p(A, B, 0, omega)` so `cache + omega * C` reproduces
    /// `payoff_p(A, B, C, omega)` bit for bit (the replay oracle in the
    /// tests holds the engine to that).
    content_scores: Vec<f64>,
    step_index: usize,
    initial_opinions: Vec<f64>,
    cumulative_likes: Vec<u64>,
    likes_per_step: Vec<u64>,
    total_likes: u64,
    total_dislikes: u64,
    total_neutrals: u64,
    watch_sum: f64,
    recommendation_trace: Option<Vec<u16>>,
    opinion_snapshots: Vec<(usize, Vec<f64>)>,
}

impl Simulation {
    pub fn new(config: SimulationConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        let catalog = ContentCatalog::new(config.k).expect("k validated to be >= 2");
        let mut init_rng = rng::init_stream(config.seed);
        let initial_opinions = config
            .initial_opinions
            .sample(config.users, &mut init_rng)?;
        let users: Vec<UserState> = initial_opinions
            .iter()
            .map(|&x0| UserState::new(x0, config.lambda, config.beta))
            .collect();
        let streams: Vec<ChaCha8Rng> = (0..config.users)
            .map(|i| rng::user_stream(config.seed, i))
            .collect();
        let ledger = InteractionLedger::new(config.users, config.k);
        let window =
            ViralityWindow::new(config.k, config.delta).expect("delta validated to be >= 1");
        let staging = LikeStaging::new(config.k);
        let content_scores: Vec<f64> = (0..config.users)
            .flat_map(|i| (0..config.k).map(move |j| (i, j)))
            .map(|(i, j)| {
                payoff_p(
                    value_a(&ledger, i, j),
                    value_b(&ledger, i, j, config.mu),
                    0.0,
                    config.omega,
                )
            })
            .collect();
        let recommendation_trace = config
            .trace
            .recommendations
            .then(|| Vec::with_capacity(config.users * config.steps));
        Ok(Self {
            catalog,
            users,
            streams,
            ledger,
            window,
            staging,
            content_scores,
            step_index: 0,
            cumulative_likes: vec![0; config.k],
            likes_per_step: Vec::with_capacity(config.steps),
            total_likes: 0,
            total_dislikes: 0,
            total_neutrals: 0,
            watch_sum: 0.0,
            recommendation_trace,
            opinion_snapshots: Vec::new(),
            initial_opinions,
            config,
        })
    }

    pub fn config(&self) -> &SimulationConfig {
        &self.config
    }

    /// Index of the next step to execute.
    pub fn step_index(&self) -> usize {
        self.step_index
    }

    pub fn is_complete(&self) -> bool {
        self.step_index >= self.config.steps
    }

    pub fn ledger(&self) -> &InteractionLedger {
        &self.ledger
    }

    pub fn window(&self) -> &ViralityWindow {
        &self.window
    }

    pub fn opinions(&self) -> Vec<f64> {
        self.users.iter().map(|u| u.opinion).collect()
    }

    /// The recommendation distribution `user` faces at the current step,
    /// assembled from ledger and window state of completed steps only.
    pub fn recommendation_probabilities_for(&self, user: usize) -> Vec<f64> {
        let c_values = values_c(&self.window);
        let payoffs = self.user_payoffs(user, &c_values);
        recommendation_probabilities(&payoffs, self.config.alpha)
    }

    fn user_payoffs(&self, user: usize, c_values: &[f64]) -> Vec<f64> {
        (0..self.config.k)
            .map(|j| {
                payoff_p(
                    value_a(&self.ledger, user, j),
                    value_b(&self.ledger, user, j, self.config.mu),
                    c_values[j],
                    self.config.omega,
                )
            })
            .collect()
    }

    /// Execute one timestep for the whole population.
    pub fn step(&mut self) {
        assert!(!self.is_complete(), "simulation already ran all steps");
        let t = self.step_index;

        if let Some(every) = self.config.trace.opinion_snapshots_every {
            if every > 0 && t.is_multiple_of(every) {
                self.opinion_snapshots.push((t, self.opinions()));
            }
        }

        let c_values = values_c(&self.window);
        let users = &mut self.users;
        let streams = &mut self.streams;
        let content_scores = &self.content_scores;
        let catalog = &self.catalog;
        let cfg = &self.config;
        let k = cfg.k;

        let outcomes: Vec<StepOutcome> = users
            .par_iter_mut()
            .zip(streams.par_iter_mut())
            .enumerate()
            .with_min_len(64)
            .map_init(
                || (Vec::with_capacity(k), Vec::with_capacity(k)),
                |(payoffs, probs), (i, (user, stream))| {
                    let row = &content_scores[i * k..(i + 1) * k];
                    payoffs.clear();
                    payoffs.extend(
                        row.iter()
                            .zip(&c_values)
                            .map(|(score, c)| score + cfg.omega * c),
                    );
                    softmax_into(payoffs, cfg.alpha, probs);
                    let content = sample_recommendation(probs, stream);
                    let stance = catalog.stance(content);
                    // Watch rate and the engagement decision both read the
                    // pre-update opinion; the opinion moves afterwards.
                    let watch = watch_rate(user.opinion, stance, cfg.gamma);
                    debug_assert!(watch > 0.0 && watch < 1.0);
                    let engagement = engagement_probabilities(
                        engagement_payoffs(user.opinion, stance),
                        cfg.beta,
                    );
                    let decision = sample_engagement(engagement, stream);
                    update_opinion(user, stance, watch);
                    StepOutcome {
                        content: content as u16,
                        watch,
                        decision,
                    }
                },
            )
            .collect();

        let mut step_likes = 0u64;
        for (i, outcome) in outcomes.iter().enumerate() {
            let content = usize::from(outcome.content);
            record_interaction(
                &mut self.ledger,
                &mut self.staging,
                i,
                content,
                outcome.watch,
                outcome.decision,
                t,
            )
            .expect("engine records each user exactly once per step");
            self.content_scores[i * self.config.k + content] = payoff_p(
                value_a(&self.ledger, i, content),
                value_b(&self.ledger, i, content, self.config.mu),
                0.0,
                self.config.omega,
            );
            self.watch_sum += outcome.watch;
            match outcome.decision {
                EngagementDecision::Like => {
                    self.total_likes += 1;
                    self.cumulative_likes[content] += 1;
                    step_likes += 1;
                }
                EngagementDecision::Dislike => self.total_dislikes += 1,
                EngagementDecision::Neutral => self.total_neutrals += 1,
            }
            if let Some(trace) = &mut self.recommendation_trace {
                trace.push(outcome.content);
            }
        }
        self.likes_per_step.push(step_likes);
        self.staging.commit_to(&mut self.window);
        self.step_index += 1;
    }

    /// Drive the simulation to the final step.
    pub fn run_to_end(&mut self) {
        while !self.is_complete() {
            self.step();
        }
    }

    /// Finalise into a result; metrics are computed over the steps run so
    /// far (the full configured horizon after `run_to_end`).
    pub fn into_result(self) -> RunResult {
        let elapsed = self.step_index.max(1);
        let final_opinions = self.opinions();
        let (dominance, viral_index) =
            metrics::dominance(&self.cumulative_likes, self.catalog.stances());
        let metric_set = MetricSet {
            likes_pct: metrics::likes_pct(self.total_likes, self.config.users, elapsed),
            watch_rate_pct: metrics::watch_rate_pct(self.watch_sum, self.config.users, elapsed),
            dispersion: metrics::dispersion(&final_opinions),
            radicalisation: metrics::radicalisation(&final_opinions),
            dominance,
            viral_stance: self.catalog.stance(viral_index),
        };
        RunResult {
            dispersion_initial: metrics::dispersion(&self.initial_opinions),
            radicalisation_initial: metrics::radicalisation(&self.initial_opinions),
            initial_opinions: self.initial_opinions,
            final_opinions,
            cumulative_likes: self.cumulative_likes,
            likes_per_step: self.likes_per_step,
            total_likes: self.total_likes,
            total_dislikes: self.total_dislikes,
            total_neutrals: self.total_neutrals,
            watch_sum: self.watch_sum,
            metrics: metric_set,
            recommendation_trace: self.recommendation_trace,
            opinion_snapshots: self.opinion_snapshots,
        }
    }
}

/// Run a configuration start to finish.
pub fn run(config: SimulationConfig) -> Result<RunResult, ConfigError> {
    let mut sim = Simulation::new(config)?;
    sim.run_to_end();
    Ok(sim.into_result())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recommender::{
        record_interaction as shadow_record, InteractionLedger as ShadowLedger,
        LikeStaging as ShadowStaging, ViralityWindow as ShadowWindow,
    };

    fn small_config() -> SimulationConfig {
        SimulationConfig {
            users: 12,
            steps: 60,
            k: 4,
            delta: 3,
            seed: 1234,
            ..SimulationConfig::default()
        }
    }

    #[test]
    fn zero_susceptibility_freezes_opinions() {
        let config = SimulationConfig {
            users: 40,
            steps: 50,
            k: 5,
            lambda: 0.0,
            seed: 9,
            delta: 5,
            ..SimulationConfig::default()
        };
        let result = run(config).unwrap();
        assert_eq!(result.initial_opinions, result.final_opinions);
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let mut config = small_config();
        config.trace.recommendations = true;
        config.trace.opinion_snapshots_every = Some(20);
        let a = run(config.clone()).unwrap();
        let b = run(config).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn different_seeds_differ() {
        let a = run(small_config()).unwrap();
        let b = run(SimulationConfig {
            seed: 4321,
            ..small_config()
        })
        .unwrap();
        assert_ne!(a.final_opinions, b.final_opinions);
    }

    #[test]
    fn engagement_counts_and_ledger_conserve_recommendations() {
        let mut config = small_config();
        config.trace.recommendations = true;
        let total = (config.users * config.steps) as u64;
        let result = run(config.clone()).unwrap();
        assert_eq!(
            result.total_likes + result.total_dislikes + result.total_neutrals,
            total
        );
        assert_eq!(
            result.total_likes,
            result.cumulative_likes.iter().sum::<u64>()
        );
        assert_eq!(
            result.total_likes,
            result.likes_per_step.iter().sum::<u64>()
        );
        assert_eq!(result.likes_per_step.len(), config.steps);
        let trace = result.recommendation_trace.as_ref().unwrap();
        assert_eq!(trace.len(), config.users * config.steps);
        assert!(trace.iter().all(|&c| usize::from(c) < config.k));
        assert!(result
            .final_opinions
            .iter()
            .all(|x| (-1.0..=1.0).contains(x)));
        assert!(result.watch_sum > 0.0 && result.watch_sum < total as f64);

        let mut sim = Simulation::new(config.clone()).unwrap();
        sim.run_to_end();
        let recs: u64 = (0..config.users)
            .flat_map(|i| (0..config.k).map(move |j| (i, j)))
            .map(|(i, j)| u64::from(sim.ledger().rec_count(i, j)))
            .sum();
        assert_eq!(recs, total);
    }

    #[test]
    fn first_step_recommendations_are_uniform() {
        // With an empty ledger and window, every content has the same
        // payoff, so the very first draw must be uniform over k.
        let config = SimulationConfig {
            users: 100_000,
            steps: 1,
            k: 5,
            delta: 1,
            seed: 77,
            trace: TraceOptions {
                recommendations: true,
                opinion_snapshots_every: None,
            },
            ..SimulationConfig::default()
        };
        let result = run(config.clone()).unwrap();
        let trace = result.recommendation_trace.unwrap();
        let mut counts = vec![0u64; config.k];
        for c in trace {
            counts[usize::from(c)] += 1;
        }
        let expected = config.users as f64 / config.k as f64;
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        // 1% critical value for 4 degrees of freedom.
        assert!(
            chi2 < 13.276704135987622,
            "chi2 = {chi2}, counts {counts:?}"
        );
    }

    #[test]
    fn window_tracks_completed_steps_only() {
        let mut sim = Simulation::new(small_config()).unwrap();
        let delta = sim.config().delta;
        assert_eq!(sim.window().occupied(), 0);
        for t in 0..20 {
            let before = sim.window().grand_total();
            let probs = sim.recommendation_probabilities_for(3);
            // Querying the distribution must not advance or mutate state.
            assert_eq!(sim.window().grand_total(), before);
            assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            sim.step();
            assert_eq!(sim.window().occupied(), (t + 1).min(delta));
            let (totals, grand) = sim.window().recompute_totals();
            assert_eq!(grand, sim.window().grand_total());
            for (j, total) in totals.iter().enumerate() {
                assert_eq!(*total, sim.window().total(j));
            }
        }
    }

    #[test]
    fn replay_from_completed_steps_reproduces_distributions() {
        // Independent replay oracle: rebuild ledger and window from the
        // observable event stream and recompute each step's distributions
        // through the public scoring functions. Any within-step leakage
        // into the engine's window or ledger would break the match.
        let config = small_config();
        let mut sim = Simulation::new(config.clone()).unwrap();
        let mut shadow_ledger = ShadowLedger::new(config.users, config.k);
        let mut shadow_staging = ShadowStaging::new(config.k);
        let mut shadow_window = ShadowWindow::new(config.k, config.delta).unwrap();
        let catalog = ContentCatalog::new(config.k).unwrap();

        for t in 0..config.steps {
            for user in 0..config.users {
                let engine_probs = sim.recommendation_probabilities_for(user);
                let payoffs: Vec<f64> = (0..config.k)
                    .map(|j| {
                        payoff_p(
                            value_a(&shadow_ledger, user, j),
                            value_b(&shadow_ledger, user, j, config.mu),
                            crate::recommender::value_c(&shadow_window, j),
                            config.omega,
                        )
                    })
                    .collect();
                let replay_probs = recommendation_probabilities(&payoffs, config.alpha);
                assert_eq!(engine_probs, replay_probs, "step {t} user {user}");
            }

            let likes_before: Vec<Vec<u32>> = (0..config.users)
                .map(|i| {
                    (0..config.k)
                        .map(|j| sim.ledger().like_count(i, j))
                        .collect()
                })
                .collect();
            let recs_before: Vec<Vec<u32>> = (0..config.users)
                .map(|i| {
                    (0..config.k)
                        .map(|j| sim.ledger().rec_count(i, j))
                        .collect()
                })
                .collect();
            let opinions_entering = sim.opinions();

            sim.step();

            // Infer each user's (content, watch, liked) event from ledger
            // deltas and the opinions entering the step, then feed the
            // shadow state.
            for user in 0..config.users {
                let content = (0..config.k)
                    .find(|&j| sim.ledger().rec_count(user, j) > recs_before[user][j])
                    .expect("exactly one recommendation per user per step");
                let watch = watch_rate(
                    opinions_entering[user],
                    catalog.stance(content),
                    config.gamma,
                );
                let liked = sim.ledger().like_count(user, content) > likes_before[user][content];
                let decision = if liked {
                    EngagementDecision::Like
                } else {
                    EngagementDecision::Neutral
                };
                shadow_record(
                    &mut shadow_ledger,
                    &mut shadow_staging,
                    user,
                    content,
                    watch,
                    decision,
                    t,
                )
                .unwrap();
            }
            shadow_staging.commit_to(&mut shadow_window);
        }
    }

    #[test]
    fn snapshot_cadence_includes_step_zero() {
        let config = SimulationConfig {
            users: 8,
            steps: 30,
            k: 3,
            delta: 2,
            seed: 3,
            trace: TraceOptions {
                recommendations: false,
                opinion_snapshots_every: Some(10),
            },
            ..SimulationConfig::default()
        };
        let result = run(config.clone()).unwrap();
        let steps: Vec<usize> = result.opinion_snapshots.iter().map(|(t, _)| *t).collect();
        assert_eq!(steps, vec![0, 10, 20]);
        assert!(result
            .opinion_snapshots
            .iter()
            .all(|(_, xs)| xs.len() == config.users));
        assert_eq!(result.opinion_snapshots[0].1, result.initial_opinions);
    }

    #[test]
    fn users_can_like_the_same_content_repeatedly() {
        let config = SimulationConfig {
            users: 10,
            steps: 50,
            k: 2,
            delta: 5,
            seed: 5,
            ..SimulationConfig::default()
        };
        let mut sim = Simulation::new(config.clone()).unwrap();
        sim.run_to_end();
        let repeat_likes = (0..config.users)
            .flat_map(|i| (0..config.k).map(move |j| (i, j)))
            .any(|(i, j)| sim.ledger().like_count(i, j) > 1);
        assert!(repeat_likes);
    }

    #[test]
    fn config_validation_covers_every_bound() {
        let ok = SimulationConfig::default();
        assert!(ok.validate().is_ok());
        let cases = [
            (
                SimulationConfig {
                    users: 1,
                    ..ok.clone()
                },
                ConfigError::TooFewUsers(1),
            ),
            (
                SimulationConfig {
                    steps: 0,
                    ..ok.clone()
                },
                ConfigError::NoSteps(0),
            ),
            (
                SimulationConfig { k: 1, ..ok.clone() },
                ConfigError::TooFewContents(1),
            ),
            (
                SimulationConfig {
                    delta: 0,
                    ..ok.clone()
                },
                ConfigError::WindowOutOfRange {
                    delta: 0,
                    steps: 1000,
                },
            ),
            (
                SimulationConfig {
                    delta: 1001,
                    ..ok.clone()
                },
                ConfigError::WindowOutOfRange {
                    delta: 1001,
                    steps: 1000,
                },
            ),
            (
                SimulationConfig {
                    omega: -0.1,
                    ..ok.clone()
                },
                ConfigError::OmegaOutOfRange(-0.1),
            ),
            (
                SimulationConfig {
                    lambda: 1.5,
                    ..ok.clone()
                },
                ConfigError::LambdaOutOfRange(1.5),
            ),
            (
                SimulationConfig {
                    beta: -1.0,
                    ..ok.clone()
                },
                ConfigError::BadBeta(-1.0),
            ),
            (
                SimulationConfig {
                    alpha: f64::NAN,
                    ..ok.clone()
                },
                ConfigError::BadAlpha(f64::NAN),
            ),
            (
                SimulationConfig {
                    gamma: 0.0,
                    ..ok.clone()
                },
                ConfigError::BadGamma(0.0),
            ),
            (
                SimulationConfig {
                    mu: -2.0,
                    ..ok.clone()
                },
                ConfigError::BadMu(-2.0),
            ),
        ];
        for (config, expected) in cases {
            let err = config.validate().unwrap_err();
            // NaN payloads never compare equal; match on the message shape.
            assert_eq!(format!("{err:?}"), format!("{expected:?}"));
        }
    }

    #[test]
    fn config_json_rejects_unknown_keys() {
        let good = r#"{"users": 10, "steps": 5, "k": 3, "seed": 1}"#;
        let parsed: SimulationConfig = serde_json::from_str(good).unwrap();
        assert_eq!(parsed.users, 10);
        assert_eq!(parsed.alpha, 7.0);

        let bad = r#"{"users": 10, "step_count": 5}"#;
        assert!(serde_json::from_str::<SimulationConfig>(bad).is_err());
    }
}
