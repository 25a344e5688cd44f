//! Initial opinion sampling.
//!
//! Opinions are drawn on [0, 1] from a beta family and mapped affinely to
//! [-1, 1]. Two canonical populations are built in: NDIC, a neutral
//! bell-shaped Beta(3, 3), and BDIC, an already-polarised equal-weight
//! mixture of Beta(2, 5) and its mirror Beta(5, 2). Arbitrary beta shapes
//! and mixtures can be configured for recalibration.

use rand::Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

use crate::model::sample_index;

#[derive(Debug, Error, PartialEq)]
pub enum PopulationError {
    #[error("population needs at least 2 users, got {0}")]
    TooFewUsers(usize),
    #[error("beta shape parameters must be strictly positive, got ({alpha}, {beta})")]
    BadBetaShape { alpha: f64, beta: f64 },
    #[error("mixture needs at least one component")]
    EmptyMixture,
    #[error("mixture weights must be positive and sum to 1, got total {0}")]
    BadMixtureWeights(f64),
}

/// One weighted beta component of a mixture, on the unit interval before
/// the map to [-1, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BetaComponent {
    pub weight: f64,
    pub alpha: f64,
    pub beta: f64,
}

/// Initial opinion distribution specification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialDistribution {
    /// Neutral population: Beta(3, 3) mapped to [-1, 1] (mean 0, std 1/sqrt(7)).
    Ndic,
    /// Polarised population: 0.5 Beta(2, 5) + 0.5 Beta(5, 2), mapped (mean 0, std ~0.535).
    Bdic,
    /// A single configurable beta shape.
    Beta { alpha: f64, beta: f64 },
    /// A configurable beta mixture.
    BetaMixture { components: Vec<BetaComponent> },
}

impl InitialDistribution {
    fn components(&self) -> Vec<BetaComponent> {
        match self {
            InitialDistribution::Ndic => vec![BetaComponent {
                weight: 1.0,
                alpha: 3.0,
                beta: 3.0,
            }],
            InitialDistribution::Bdic => vec![
                BetaComponent {
                    weight: 0.5,
                    alpha: 2.0,
                    beta: 5.0,
                },
                BetaComponent {
                    weight: 0.5,
                    alpha: 5.0,
                    beta: 2.0,
                },
            ],
            InitialDistribution::Beta { alpha, beta } => vec![BetaComponent {
                weight: 1.0,
                alpha: *alpha,
                beta: *beta,
            }],
            InitialDistribution::BetaMixture { components } => components.clone(),
        }
    }

    pub fn validate(&self) -> Result<(), PopulationError> {
        let components = self.components();
        if components.is_empty() {
            return Err(PopulationError::EmptyMixture);
        }
        let mut total = 0.0;
        for c in &components {
            if c.alpha.is_nan() || c.alpha <= 0.0 || c.beta.is_nan() || c.beta <= 0.0 {
                return Err(PopulationError::BadBetaShape {
                    alpha: c.alpha,
                    beta: c.beta,
                });
            }
            if c.weight.is_nan() || c.weight <= 0.0 {
                return Err(PopulationError::BadMixtureWeights(c.weight));
            }
            total += c.weight;
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(PopulationError::BadMixtureWeights(total));
        }
        Ok(())
    }

    /// Draw `n` initial opinions in [-1, 1].
    pub fn sample<R: Rng + ?Sized>(
        &self,
        n: usize,
        rng: &mut R,
    ) -> Result<Vec<f64>, PopulationError> {
        if n < 2 {
            return Err(PopulationError::TooFewUsers(n));
        }
        self.validate()?;
        let components = self.components();
        let betas: Vec<Beta<f64>> = components
            .iter()
            .map(|c| {
                Beta::new(c.alpha, c.beta).map_err(|_| PopulationError::BadBetaShape {
                    alpha: c.alpha,
                    beta: c.beta,
                })
            })
            .collect::<Result<_, _>>()?;
        let weights: Vec<f64> = components.iter().map(|c| c.weight).collect();
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let which = if betas.len() == 1 {
                0
            } else {
                sample_index(&weights, rng.random::<f64>())
            };
            let unit: f64 = betas[which].sample(rng);
            out.push((2.0 * unit - 1.0).clamp(-1.0, 1.0));
        }
        Ok(out)
    }

    /// Analytic (mean, std) of the mapped distribution, for validating
    /// sampled populations against their target summary.
    pub fn expected_summary(&self) -> (f64, f64) {
        let components = self.components();
        let mut mean = 0.0;
        let mut second_moment = 0.0;
        for c in &components {
            let m = c.alpha / (c.alpha + c.beta);
            let v = c.alpha * c.beta / ((c.alpha + c.beta).powi(2) * (c.alpha + c.beta + 1.0));
            let mapped_mean = 2.0 * m - 1.0;
            let mapped_var = 4.0 * v;
            mean += c.weight * mapped_mean;
            second_moment += c.weight * (mapped_var + mapped_mean * mapped_mean);
        }
        (mean, (second_moment - mean * mean).sqrt())
    }

    /// Canonical short name, used in result tables and run identifiers;
    /// free of commas and path separators so it can sit in CSV cells and
    /// file names unquoted.
    pub fn label(&self) -> String {
        match self {
            InitialDistribution::Ndic => "NDIC".to_string(),
            InitialDistribution::Bdic => "BDIC".to_string(),
            InitialDistribution::Beta { alpha, beta } => format!("beta_a{alpha}_b{beta}"),
            InitialDistribution::BetaMixture { components } => {
                let parts: Vec<String> = components
                    .iter()
                    .map(|c| format!("w{}a{}b{}", c.weight, c.alpha, c.beta))
                    .collect();
                format!("mix_{}", parts.join("_"))
            }
        }
    }
}

impl fmt::Display for InitialDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// Draw `n` opinions from the neutral population.
pub fn sample_ndic<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Vec<f64>, PopulationError> {
    InitialDistribution::Ndic.sample(n, rng)
}

/// Draw `n` opinions from the bimodal population.
pub fn sample_bdic<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Vec<f64>, PopulationError> {
    InitialDistribution::Bdic.sample(n, rng)
}
