//! Buffer-management policies, centered on the closed-form min-max packet
//! reallocation over inter-satellite links (MQLA-ISL) and its integerization.

use crate::stochastic::{ChannelState, GilbertElliottParams, PoissonArrivalParams};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AllocationError {
    #[error("fractional targets sum to {sum}, expected {expected}")]
    SumMismatch { sum: f64, expected: u64 },
}

/// The three buffer regimes under comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolicyKind {
    /// Independent per-satellite buffers, no reallocation.
    NoIsl,
    /// Ideal pooled buffer; tracks the aggregate queue only.
    VirtualQueue,
    /// Per-slot min-max reallocation over ISLs.
    MqlaIsl,
}

/// Which branch of the closed-form minimizer applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseTag {
    /// Previously-bad satellites emptied; good ones share everything.
    I,
    /// Previously-good satellites emptied; bad ones share everything.
    II,
    /// Interior solution equalizing the two groups' expected loads.
    III,
}

/// Output of one reallocation round.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationDecision {
    /// Optimal fractional target per satellite.
    pub fractional: Vec<f64>,
    /// Largest-remainder rounding of `fractional`, summing exactly to Q.
    pub integer: Vec<u64>,
    pub case_tag: CaseTag,
    /// delta = c * (beta_bar - alpha), the expected-service gap between a
    /// previously-good and a previously-bad satellite.
    pub delta: f64,
    /// Number of satellites whose previous-slot state was Good.
    pub z_count: usize,
}

/// Expected buffer load after the next service slot, conditioned on the
/// previous slot's channel state: q + lambda - c*alpha when Bad, and
/// q + lambda - c*beta_bar when Good.
pub fn expected_next_load(
    q: f64,
    prev_state: ChannelState,
    arr: &PoissonArrivalParams,
    ch: &GilbertElliottParams,
) -> f64 {
    let service = match prev_state {
        ChannelState::Bad => ch.c as f64 * ch.alpha,
        ChannelState::Good => ch.c as f64 * ch.beta_bar(),
    };
    q + arr.lambda - service
}

/// Closed-form minimizer of the maximum conditional expected load, subject to
/// the targets summing to `total` with all entries nonnegative.
///
/// All satellites sharing a previous state receive the same target. With
/// delta = c*(beta_bar - alpha) and Z previously-good satellites:
/// delta > Q/Z empties the bad group (Case I), delta < -Q/(L-Z) empties the
/// good group (Case II), and otherwise the interior solution splits
/// Q -+ group-size * delta evenly (Case III). Z = 0 and Z = L make the
/// corresponding bound infinite, so only Case III (or the opposite extreme)
/// can apply.
pub fn mqla_allocate(
    total: u64,
    prev_states: &[ChannelState],
    ch: &GilbertElliottParams,
) -> AllocationDecision {
    let l = prev_states.len();
    assert!(l >= 1, "need at least one satellite");
    let z = prev_states
        .iter()
        .filter(|s| **s == ChannelState::Good)
        .count();
    let delta = ch.c as f64 * (ch.beta_bar() - ch.alpha);
    let q = total as f64;

    let (x, y, case_tag) = if total == 0 {
        (0.0, 0.0, CaseTag::III)
    } else if z > 0 && delta > q / z as f64 {
        (0.0, q / z as f64, CaseTag::I)
    } else if z < l && delta < -q / (l - z) as f64 {
        (q / (l - z) as f64, 0.0, CaseTag::II)
    } else {
        (
            (q - z as f64 * delta) / l as f64,
            (q + (l - z) as f64 * delta) / l as f64,
            CaseTag::III,
        )
    };

    let fractional: Vec<f64> = prev_states
        .iter()
        .map(|s| match s {
            ChannelState::Bad => x,
            ChannelState::Good => y,
        })
        .collect();
    let integer =
        integerize(&fractional, total).expect("closed-form targets sum to Q by construction");

    AllocationDecision {
        fractional,
        integer,
        case_tag,
        delta,
        z_count: z,
    }
}

/// Largest-remainder rounding: floor every entry, then hand the remaining
/// units one each to the largest fractional remainders, ties broken by lower
/// index. The output sums exactly to `total`.
pub fn integerize(fractional: &[f64], total: u64) -> Result<Vec<u64>, AllocationError> {
    let sum: f64 = fractional.iter().sum();
    if (sum - total as f64).abs() > 1e-6 * (total as f64).max(1.0) {
        return Err(AllocationError::SumMismatch {
            sum,
            expected: total,
        });
    }
    let mut out: Vec<u64> = Vec::with_capacity(fractional.len());
    let mut remainders: Vec<(usize, f64)> = Vec::with_capacity(fractional.len());
    let mut assigned = 0u64;
    for (i, &f) in fractional.iter().enumerate() {
        debug_assert!(f >= -1e-9);
        let fl = f.max(0.0).floor();
        out.push(fl as u64);
        assigned += fl as u64;
        remainders.push((i, f - fl));
    }
    let mut leftover = total.saturating_sub(assigned);
    // Descending remainder, ascending index on ties.
    remainders.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    for (i, _) in remainders {
        if leftover == 0 {
            break;
        }
        out[i] += 1;
        leftover -= 1;
    }
    debug_assert_eq!(out.iter().sum::<u64>(), total);
    Ok(out)
}

/// The objective minimized by the allocator: the maximum conditional expected
/// load over satellites.
pub fn max_expected_load(
    targets: &[f64],
    prev_states: &[ChannelState],
    arr: &PoissonArrivalParams,
    ch: &GilbertElliottParams,
) -> f64 {
    targets
        .iter()
        .zip(prev_states)
        .map(|(&q, &s)| expected_next_load(q, s, arr, ch))
        .fold(f64::NEG_INFINITY, f64::max)
}
