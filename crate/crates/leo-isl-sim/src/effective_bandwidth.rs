//! Effective-bandwidth layer: log moment generating functions of the arrival
//! and service processes, the QoS-exponent root equation, virtual-queue
//! exponent scaling, and the exponential overflow bound with its buffer-sizing
//! inverse.

use crate::stochastic::{stability_margin, GilbertElliottParams, PoissonArrivalParams};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SolveError {
    /// Mean arrivals meet or exceed mean service; no positive exponent exists.
    #[error("unstable parameters: stability margin = {margin}")]
    Unstable { margin: f64 },
    #[error("no sign change found while expanding the bracket up to theta = {theta_max}")]
    NoBracket { theta_max: f64 },
}

/// Solved QoS exponent together with solver diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QosSolution {
    pub theta_star: f64,
    /// Root-equation value at `theta_star`.
    pub residual: f64,
    pub iterations: u32,
}

/// LMGF of the Poisson arrival process: lambda * (e^theta - 1).
pub fn lmgf_arrival(arr: &PoissonArrivalParams, theta: f64) -> f64 {
    arr.lambda * theta.exp_m1()
}

/// LMGF of the two-state Markov service process: the log spectral radius of
/// the tilted transition matrix [[a_bar, alpha e^{c theta}], [beta, b_bar e^{c theta}]].
///
/// For c*theta > 0 the factor e^{c theta} is pulled out before exponentiation,
/// so the value stays finite for |c*theta| well past 700.
pub fn lmgf_departure(ch: &GilbertElliottParams, theta: f64) -> f64 {
    let ab = ch.alpha_bar();
    let bb = ch.beta_bar();
    let ct = ch.c as f64 * theta;
    // Discriminant rewritten as (a_bar - b_bar e)^2 + 4 alpha beta e, which is
    // nonnegative by construction.
    if ct <= 0.0 {
        let e = ct.exp();
        let tr = ab + bb * e;
        let disc = (ab - bb * e).powi(2) + 4.0 * ch.alpha * ch.beta * e;
        ((tr + disc.sqrt()) / 2.0).ln()
    } else {
        let em = (-ct).exp();
        let tr = ab * em + bb;
        let disc = (ab * em - bb).powi(2) + 4.0 * ch.alpha * ch.beta * em;
        ct + ((tr + disc.sqrt()) / 2.0).ln()
    }
}

/// Value of the root equation Lambda_A(theta) + Lambda_D(-theta).
pub fn qos_root_fn(arr: &PoissonArrivalParams, ch: &GilbertElliottParams, theta: f64) -> f64 {
    lmgf_arrival(arr, theta) + lmgf_departure(ch, -theta)
}

const THETA_MAX: f64 = 1e3;
const THETA_LO: f64 = 1e-8;

/// Solve Lambda_A(theta) + Lambda_D(-theta) = 0 for the unique theta > 0.
///
/// theta = 0 is always a trivial root; under stability the function dips
/// negative for small positive theta and grows without bound, so the bracket
/// is expanded geometrically until the sign flips and then bisected.
pub fn solve_qos_exponent(
    arr: &PoissonArrivalParams,
    ch: &GilbertElliottParams,
    tol: f64,
) -> Result<QosSolution, SolveError> {
    let margin = stability_margin(arr, ch);
    if margin <= 0.0 {
        return Err(SolveError::Unstable { margin });
    }
    let f = |t: f64| qos_root_fn(arr, ch, t);

    let mut lo = THETA_LO;
    let mut hi = tol.max(2.0 * THETA_LO);
    let mut iterations = 0u32;
    while f(hi) <= 0.0 {
        lo = hi;
        hi *= 2.0;
        iterations += 1;
        if hi > THETA_MAX {
            return Err(SolveError::NoBracket {
                theta_max: THETA_MAX,
            });
        }
    }
    // Bisect to floating-point resolution; the residual then sits well below
    // any practical tolerance.
    while hi - lo > 1e-15 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    let theta_star = 0.5 * (lo + hi);
    Ok(QosSolution {
        theta_star,
        residual: f(theta_star),
        iterations,
    })
}

/// Lemma-1 scaling: the virtual queue over L pooled satellites has exponent
/// L * theta_star.
pub fn virtual_queue_exponent(theta_star: f64, l: u32) -> f64 {
    debug_assert!(theta_star > 0.0 && l >= 1);
    l as f64 * theta_star
}

/// Chernoff-style tail bound Pr(q > tau) <= e^{-theta tau}.
pub fn overflow_bound(theta: f64, tau: f64) -> f64 {
    debug_assert!(theta > 0.0 && tau >= 0.0);
    (-theta * tau).exp()
}

/// Smallest buffer size whose bound meets `target_prob`:
/// ceil(-ln(target) / theta).
pub fn required_buffer(theta: f64, target_prob: f64) -> u64 {
    debug_assert!(theta > 0.0 && target_prob > 0.0 && target_prob < 1.0);
    let q = (-target_prob.ln() / theta).ceil();
    (q.max(1.0)) as u64
}
