//! Recommender state and scoring: per-user engagement ledgers, the
//! population-wide virality window, payoff fusion, and the softmax
//! recommendation distribution.
//!
//! Scoring combines two user-specific signals (like ratio `A`, watch-value
//! `B`) with one shared signal (`C`, the share of window likes). Dislikes
//! are invisible to the recommender: only likes and watch time feed back.

use rand::Rng;
use std::collections::VecDeque;
use thiserror::Error;

use crate::model::{sample_index, softmax, EngagementDecision};

#[derive(Debug, Error, PartialEq)]
pub enum RecommenderError {
    #[error("omega must lie in [0, 1], got {0}")]
    OmegaOutOfRange(f64),
    #[error("virality window length must be >= 1")]
    ZeroWindow,
    #[error("user {user} already recorded for step {step}")]
    DoubleRecord { user: usize, step: usize },
    #[error("user {user} is at step {expected}, cannot record step {got}")]
    StepOutOfOrder {
        user: usize,
        expected: usize,
        got: usize,
    },
}

/// Softmax sharpness `alpha`, virality weight `omega`, window length `delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecommenderParams {
    pub alpha: f64,
    pub omega: f64,
    pub delta: usize,
}

impl RecommenderParams {
    pub fn new(alpha: f64, omega: f64, delta: usize) -> Result<Self, RecommenderError> {
        if !(0.0..=1.0).contains(&omega) {
            return Err(RecommenderError::OmegaOutOfRange(omega));
        }
        if delta == 0 {
            return Err(RecommenderError::ZeroWindow);
        }
        Ok(Self {
            alpha,
            omega,
            delta,
        })
    }
}

/// Dense per-(user, content) engagement bookkeeping: how often each item
/// was recommended, how often it was liked, and the summed watch rates.
///
/// Rows are independent: the engine may read distinct rows from parallel
/// workers, with writes funnelled through [`record_interaction`] in user
/// order.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionLedger {
    users: usize,
    contents: usize,
    rec_count: Vec<u32>,
    like_count: Vec<u32>,
    watch_sum: Vec<f64>,
    steps_recorded: Vec<usize>,
}

impl InteractionLedger {
    pub fn new(users: usize, contents: usize) -> Self {
        Self {
            users,
            contents,
            rec_count: vec![0; users * contents],
            like_count: vec![0; users * contents],
            watch_sum: vec![0.0; users * contents],
            steps_recorded: vec![0; users],
        }
    }

    #[inline]
    fn idx(&self, user: usize, content: usize) -> usize {
        debug_assert!(user < self.users && content < self.contents);
        user * self.contents + content
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn contents(&self) -> usize {
        self.contents
    }

    pub fn rec_count(&self, user: usize, content: usize) -> u32 {
        self.rec_count[self.idx(user, content)]
    }

    pub fn like_count(&self, user: usize, content: usize) -> u32 {
        self.like_count[self.idx(user, content)]
    }

    pub fn watch_sum(&self, user: usize, content: usize) -> f64 {
        self.watch_sum[self.idx(user, content)]
    }

    /// Number of timesteps already recorded for `user`.
    pub fn steps_recorded(&self, user: usize) -> usize {
        self.steps_recorded[user]
    }
}

/// Like ratio for (user, content): likes over recommendations, and 0 for
/// content never recommended to that user.
pub fn value_a(ledger: &InteractionLedger, user: usize, content: usize) -> f64 {
    let recs = ledger.rec_count(user, content);
    if recs == 0 {
        0.0
    } else {
        f64::from(ledger.like_count(user, content)) / f64::from(recs)
    }
}

/// The watch-value map itself: a tanh of the mean watch rate centred on
/// the 25% consumption threshold. Small but strictly positive at mean
/// watch 0, approaching 1 under heavy consumption.
pub fn watch_value(mean_watch: f64, mu: f64) -> f64 {
    0.5 * (mu * (mean_watch - 0.25)).tanh() + 0.5
}

/// Watch-value for (user, content); content never recommended to the user
/// counts as mean watch 0.
pub fn value_b(ledger: &InteractionLedger, user: usize, content: usize, mu: f64) -> f64 {
    let recs = ledger.rec_count(user, content);
    let mean_watch = if recs == 0 {
        0.0
    } else {
        ledger.watch_sum(user, content) / f64::from(recs)
    };
    watch_value(mean_watch, mu)
}

/// Per-timestep like counts over the last `delta` completed timesteps,
/// with running totals kept in lockstep with the ring buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct ViralityWindow {
    capacity: usize,
    buffer: VecDeque<Vec<u64>>,
    totals: Vec<u64>,
    grand_total: u64,
}

impl ViralityWindow {
    pub fn new(contents: usize, delta: usize) -> Result<Self, RecommenderError> {
        if delta == 0 {
            return Err(RecommenderError::ZeroWindow);
        }
        Ok(Self {
            capacity: delta,
            buffer: VecDeque::with_capacity(delta + 1),
            totals: vec![0; contents],
            grand_total: 0,
        })
    }

    pub fn contents(&self) -> usize {
        self.totals.len()
    }

    /// Completed timesteps currently buffered: `min(t, delta)`.
    pub fn occupied(&self) -> usize {
        self.buffer.len()
    }

    /// Push the like vector of a completed timestep, evicting the oldest
    /// one once more than `delta` are held.
    pub fn commit(&mut self, likes: Vec<u64>) {
        assert_eq!(likes.len(), self.totals.len());
        for (total, l) in self.totals.iter_mut().zip(&likes) {
            *total += l;
            self.grand_total += l;
        }
        self.buffer.push_back(likes);
        if self.buffer.len() > self.capacity {
            let evicted = self.buffer.pop_front().expect("non-empty buffer");
            for (total, l) in self.totals.iter_mut().zip(&evicted) {
                *total -= l;
                self.grand_total -= l;
            }
        }
    }

    pub fn total(&self, content: usize) -> u64 {
        self.totals[content]
    }

    pub fn grand_total(&self) -> u64 {
        self.grand_total
    }

    /// Brute-force re-sum of the buffered vectors, for consistency checks.
    pub fn recompute_totals(&self) -> (Vec<u64>, u64) {
        let mut totals = vec![0u64; self.totals.len()];
        for step in &self.buffer {
            for (t, l) in totals.iter_mut().zip(step) {
                *t += l;
            }
        }
        let grand = totals.iter().sum();
        (totals, grand)
    }
}

/// Window like share of `content`; identically 0 when the window holds no
/// likes at all (softmax shift invariance makes that equivalent to a
/// uniform 1/k).
pub fn value_c(window: &ViralityWindow, content: usize) -> f64 {
    if window.grand_total == 0 {
        0.0
    } else {
        window.totals[content] as f64 / window.grand_total as f64
    }
}

/// All window like shares at once.
pub fn values_c(window: &ViralityWindow) -> Vec<f64> {
    (0..window.contents()).map(|j| value_c(window, j)).collect()
}

/// Fused recommendation payoff: content-based `(A + B) / 2` weighted by
/// `1 - omega`, plus the virality share `C` weighted by `omega`.
pub fn payoff_p(a: f64, b: f64, c: f64, omega: f64) -> f64 {
    (1.0 - omega) * (a + b) / 2.0 + omega * c
}

/// Softmax over the fused payoffs with sharpness `alpha`.
pub fn recommendation_probabilities(payoffs: &[f64], alpha: f64) -> Vec<f64> {
    softmax(payoffs, alpha)
}

/// Categorical draw of a content index from a recommendation distribution.
pub fn sample_recommendation<R: Rng + ?Sized>(probabilities: &[f64], rng: &mut R) -> usize {
    sample_index(probabilities, rng.random::<f64>())
}

/// Like counts accumulated during the timestep currently in flight; they
/// become visible to the recommender only once committed to the window.
#[derive(Debug, Clone, PartialEq)]
pub struct LikeStaging {
    likes: Vec<u64>,
}

impl LikeStaging {
    pub fn new(contents: usize) -> Self {
        Self {
            likes: vec![0; contents],
        }
    }

    pub fn likes(&self) -> &[u64] {
        &self.likes
    }

    /// Drain the staged vector into the window and reset for the next step.
    pub fn commit_to(&mut self, window: &mut ViralityWindow) {
        let likes = std::mem::replace(&mut self.likes, vec![0; window.contents()]);
        window.commit(likes);
    }
}

/// Record one user-step outcome: always counts the recommendation and the
/// watch rate; counts a like (ledger + staging) only for a LIKE decision.
/// Dislikes and neutrals are indistinguishable to the recommender.
///
/// Rejects recording the same (user, step) twice and out-of-order steps.
pub fn record_interaction(
    ledger: &mut InteractionLedger,
    staging: &mut LikeStaging,
    user: usize,
    content: usize,
    watch: f64,
    decision: EngagementDecision,
    step: usize,
) -> Result<(), RecommenderError> {
    let expected = ledger.steps_recorded[user];
    if step < expected {
        return Err(RecommenderError::DoubleRecord { user, step });
    }
    if step > expected {
        return Err(RecommenderError::StepOutOfOrder {
            user,
            expected,
            got: step,
        });
    }
    let idx = ledger.idx(user, content);
    ledger.rec_count[idx] += 1;
    ledger.watch_sum[idx] += watch;
    if decision == EngagementDecision::Like {
        ledger.like_count[idx] += 1;
        staging.likes[content] += 1;
    }
    ledger.steps_recorded[user] += 1;
    Ok(())
}
