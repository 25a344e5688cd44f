//! User-side primitives: content stances, engagement payoffs and choice,
//! watch rate, and the opinion update.
//!
//! All angles are radians and every map here is bounded, so the dynamics
//! cannot overflow. Functions are pure given an explicit RNG; callers may
//! run them concurrently as long as each worker owns its RNG stream.

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("need at least 2 content stances, got {0}")]
    TooFewContents(usize),
    #[error("content index {index} out of range for {count} stances")]
    StanceIndexOutOfRange { index: usize, count: usize },
    #[error("{name} must be strictly positive, got {value}")]
    NonPositiveParam { name: &'static str, value: f64 },
}

/// Stance of content `j` on the opinion spectrum, for a catalogue of
/// `k` stances equally spaced over `[-1, 1]` (0-based `j`).
pub fn content_stance(j: usize, k: usize) -> Result<f64, ModelError> {
    if k < 2 {
        return Err(ModelError::TooFewContents(k));
    }
    if j >= k {
        return Err(ModelError::StanceIndexOutOfRange { index: j, count: k });
    }
    Ok(2.0 * j as f64 / (k - 1) as f64 - 1.0)
}

/// The fixed stances available to the recommender.
///
/// Stances are strictly increasing from -1 to +1; for odd `k` the middle
/// stance is exactly 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ContentCatalog {
    stances: Vec<f64>,
}

impl ContentCatalog {
    pub fn new(k: usize) -> Result<Self, ModelError> {
        let stances = (0..k)
            .map(|j| content_stance(j, k))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { stances })
    }

    pub fn len(&self) -> usize {
        self.stances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stances.is_empty()
    }

    pub fn stance(&self, j: usize) -> f64 {
        self.stances[j]
    }

    pub fn stances(&self) -> &[f64] {
        &self.stances
    }
}

/// A user's engagement with one recommended item: like, dislike, or no
/// engagement at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngagementDecision {
    Like,
    Dislike,
    Neutral,
}

impl EngagementDecision {
    /// Signed encoding: like = +1, dislike = -1, neutral = 0.
    pub fn value(self) -> i8 {
        match self {
            EngagementDecision::Like => 1,
            EngagementDecision::Dislike => -1,
            EngagementDecision::Neutral => 0,
        }
    }
}

/// Global tuning constants for the user-side maps: `gamma` steepens the
/// watch-rate sigmoid, `mu` steepens the watch-value tanh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub gamma: f64,
    pub mu: f64,
}

impl ModelParams {
    pub fn new(gamma: f64, mu: f64) -> Result<Self, ModelError> {
        if gamma.is_nan() || gamma <= 0.0 {
            return Err(ModelError::NonPositiveParam {
                name: "gamma",
                value: gamma,
            });
        }
        if mu.is_nan() || mu <= 0.0 {
            return Err(ModelError::NonPositiveParam {
                name: "mu",
                value: mu,
            });
        }
        Ok(Self { gamma, mu })
    }
}

/// One user: a persistent prejudice (`initial_opinion`), the evolving
/// `opinion`, susceptibility to consumed content, and decision rationality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserState {
    pub initial_opinion: f64,
    pub opinion: f64,
    pub susceptibility: f64,
    pub rationality: f64,
}

impl UserState {
    pub fn new(initial_opinion: f64, susceptibility: f64, rationality: f64) -> Self {
        Self {
            initial_opinion,
            opinion: initial_opinion,
            susceptibility,
            rationality,
        }
    }
}

/// Payoffs a user gets from liking, disliking, or ignoring content, as a
/// function of the opinion-stance gap `xbar = opinion - stance`.
///
/// Each payoff lies in `[0, 1]` for `xbar` in `[-2, 2]`, and the like and
/// dislike payoffs are exact complements.
pub fn engagement_payoffs(opinion: f64, stance: f64) -> (f64, f64, f64) {
    let xbar = opinion - stance;
    let like = 0.5 * (1.5 * xbar).cos() + 0.5;
    let dislike = -0.5 * (1.5 * xbar).cos() + 0.5;
    let neutral = 0.5 * (3.0 * xbar - std::f64::consts::PI).cos() + 0.5;
    (like, dislike, neutral)
}

/// Log-linear choice over the three engagement payoffs with rationality
/// `beta`; `beta = 0` is uniform, large `beta` is near-deterministic.
///
/// Returns `(p_like, p_dislike, p_neutral)` summing to 1. Allocation-free
/// three-way softmax, operation-for-operation the same as [`softmax`].
pub fn engagement_probabilities(payoffs: (f64, f64, f64), beta: f64) -> (f64, f64, f64) {
    let max = payoffs.0.max(payoffs.1).max(payoffs.2);
    let e0 = (beta * (payoffs.0 - max)).exp();
    let e1 = (beta * (payoffs.1 - max)).exp();
    let e2 = (beta * (payoffs.2 - max)).exp();
    let sum = e0 + e1 + e2;
    (e0 / sum, e1 / sum, e2 / sum)
}

/// Draw one engagement decision from `(p_like, p_dislike, p_neutral)`.
pub fn sample_engagement<R: Rng + ?Sized>(
    probabilities: (f64, f64, f64),
    rng: &mut R,
) -> EngagementDecision {
    let idx = sample_index(
        &[probabilities.0, probabilities.1, probabilities.2],
        rng.random::<f64>(),
    );
    match idx {
        0 => EngagementDecision::Like,
        1 => EngagementDecision::Dislike,
        _ => EngagementDecision::Neutral,
    }
}

/// Fraction of the item the user consumes: a sigmoid in the alignment
/// `v = opinion * stance`, strictly increasing in `v`, always in `(0, 1)`.
pub fn watch_rate(opinion: f64, stance: f64, gamma: f64) -> f64 {
    let v = opinion * stance;
    1.0 / (1.0 + (-gamma * v).exp())
}

/// Friedkin-Johnsen step: the new opinion is a convex combination of the
/// consumed stance (weight `w`), the current opinion, and the user's
/// initial opinion (weight `1 - susceptibility`).
///
/// Only the current opinion changes; the initial opinion is permanent.
pub fn update_opinion(user: &mut UserState, stance: f64, w: f64) -> f64 {
    let lambda = user.susceptibility;
    let blended = w * stance + (1.0 - w) * user.opinion;
    let next = lambda * blended + (1.0 - lambda) * user.initial_opinion;
    // Convex combination of points in [-1, 1]; the clamp only absorbs
    // final-ulp rounding.
    user.opinion = next.clamp(-1.0, 1.0);
    user.opinion
}

/// Softmax with sharpness `scale` (>= 0), stabilised by subtracting the
/// max score before exponentiation. Invariant under adding a constant to
/// all scores; `scale = 0` gives the uniform distribution.
pub fn softmax(scores: &[f64], scale: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(scores.len());
    softmax_into(scores, scale, &mut out);
    out
}

/// [`softmax`] writing into a reusable buffer, for hot loops.
pub fn softmax_into(scores: &[f64], scale: f64, out: &mut Vec<f64>) {
    debug_assert!(!scores.is_empty());
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    out.clear();
    out.extend(scores.iter().map(|s| (scale * (s - max)).exp()));
    let sum: f64 = out.iter().sum();
    for p in out.iter_mut() {
        *p /= sum;
    }
}

/// Inverse-CDF categorical draw: `u` is a uniform variate in `[0, 1)`.
///
/// Deterministic given `u`; rounding shortfall in the probability sum
/// falls through to the last index.
pub fn sample_index(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}
