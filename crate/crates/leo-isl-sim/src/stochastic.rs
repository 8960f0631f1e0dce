//! Random processes of the constellation model: Poisson packet arrivals per
//! satellite and the two-state Markov (Gilbert-Elliott) feeder-link channel,
//! with their stationary and stability characterizations.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    /// alpha = beta = 0 has no unique stationary distribution.
    #[error("degenerate channel chain: alpha and beta are both zero")]
    DegenerateChain,
    #[error("parameter `{name}` out of range: {value}")]
    OutOfRange { name: &'static str, value: f64 },
}

/// Poisson arrival process, `lambda` packets per slot per satellite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonArrivalParams {
    pub lambda: f64,
}

impl PoissonArrivalParams {
    pub fn new(lambda: f64) -> Result<Self, ModelError> {
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(ModelError::OutOfRange {
                name: "lambda",
                value: lambda,
            });
        }
        Ok(Self { lambda })
    }
}

/// Gilbert-Elliott feeder-link channel.
///
/// `alpha` is the bad-to-good transition probability, `beta` the good-to-bad
/// one, and `c` the service rate (packets per slot) in the good state. The bad
/// state serves nothing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GilbertElliottParams {
    pub alpha: f64,
    pub beta: f64,
    pub c: u32,
}

impl GilbertElliottParams {
    pub fn new(alpha: f64, beta: f64, c: u32) -> Result<Self, ModelError> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(ModelError::OutOfRange {
                name: "alpha",
                value: alpha,
            });
        }
        if !(0.0..=1.0).contains(&beta) {
            return Err(ModelError::OutOfRange {
                name: "beta",
                value: beta,
            });
        }
        if c < 1 {
            return Err(ModelError::OutOfRange {
                name: "c",
                value: c as f64,
            });
        }
        Ok(Self { alpha, beta, c })
    }

    /// p00 = 1 - alpha, the probability of staying bad.
    pub fn alpha_bar(&self) -> f64 {
        1.0 - self.alpha
    }

    /// p11 = 1 - beta, the probability of staying good.
    pub fn beta_bar(&self) -> f64 {
        1.0 - self.beta
    }
}

/// Feeder-link state for one slot. Bad serves 0 packets, Good serves `c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelState {
    Bad,
    Good,
}

impl ChannelState {
    pub fn rate(&self, ch: &GilbertElliottParams) -> u32 {
        match self {
            ChannelState::Bad => 0,
            ChannelState::Good => ch.c,
        }
    }
}

/// Stationary distribution (pi_bad, pi_good) = (beta, alpha) / (alpha + beta).
pub fn stationary_distribution(ch: &GilbertElliottParams) -> Result<(f64, f64), ModelError> {
    let denom = ch.alpha + ch.beta;
    if denom <= 0.0 {
        return Err(ModelError::DegenerateChain);
    }
    Ok((ch.beta / denom, ch.alpha / denom))
}

/// Advance the channel chain one slot.
pub fn step_channel<R: Rng + ?Sized>(
    state: ChannelState,
    ch: &GilbertElliottParams,
    rng: &mut R,
) -> ChannelState {
    let u: f64 = rng.random();
    match state {
        ChannelState::Bad => {
            if u < ch.alpha {
                ChannelState::Good
            } else {
                ChannelState::Bad
            }
        }
        ChannelState::Good => {
            if u < ch.beta {
                ChannelState::Bad
            } else {
                ChannelState::Good
            }
        }
    }
}

/// Draw an initial state from the stationary distribution.
pub fn sample_stationary_state<R: Rng + ?Sized>(
    ch: &GilbertElliottParams,
    rng: &mut R,
) -> Result<ChannelState, ModelError> {
    let (pi0, _) = stationary_distribution(ch)?;
    Ok(if rng.random::<f64>() < pi0 {
        ChannelState::Bad
    } else {
        ChannelState::Good
    })
}

/// Reusable Poisson sampler; avoids rebuilding the distribution per slot.
#[derive(Debug, Clone)]
pub struct ArrivalSampler {
    dist: Option<Poisson<f64>>,
}

impl ArrivalSampler {
    pub fn new(arr: &PoissonArrivalParams) -> Self {
        let dist = if arr.lambda > 0.0 {
            Some(Poisson::new(arr.lambda).expect("lambda validated positive and finite"))
        } else {
            None
        };
        Self { dist }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match &self.dist {
            Some(d) => d.sample(rng) as u64,
            None => 0,
        }
    }
}

/// One Poisson draw of the per-slot arrival count.
pub fn sample_arrivals<R: Rng + ?Sized>(arr: &PoissonArrivalParams, rng: &mut R) -> u64 {
    ArrivalSampler::new(arr).sample(rng)
}

/// Mean service minus mean arrivals, `c * pi_good - lambda`.
///
/// Positive iff the queue is stable.
pub fn stability_margin(arr: &PoissonArrivalParams, ch: &GilbertElliottParams) -> f64 {
    let denom = ch.alpha + ch.beta;
    if denom <= 0.0 {
        // No stationary service rate exists; starting Bad the server never
        // turns on, so report the worst case.
        return -arr.lambda;
    }
    ch.c as f64 * ch.alpha / denom - arr.lambda
}
