//! Independent ground truth: exact stationary analysis of one satellite's
//! queue on a truncated state space, and a brute-force minimizer for the
//! reallocation problem. Used to validate the simulator and the closed-form
//! allocator; never on the runtime path.

use crate::allocation::max_expected_load;
use crate::stochastic::{
    stability_margin, ChannelState, GilbertElliottParams, PoissonArrivalParams,
};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("unstable parameters: stability margin = {margin}")]
    Unstable { margin: f64 },
    #[error("power iteration did not converge within {max_iters} iterations")]
    NoConvergence { max_iters: u32 },
}

/// Truncation and convergence controls for the exact chain.
#[derive(Debug, Clone, Copy)]
pub struct TruncatedChainSpec {
    /// Queue lengths 0..=q_cap are represented; excess mass is clamped here.
    pub q_cap: u32,
    /// Arrival counts 0..=a_max, with the Poisson tail lumped at a_max.
    pub a_max: u32,
    /// Successive-iterate max-norm threshold for the fixed point.
    pub tol: f64,
}

impl TruncatedChainSpec {
    /// Default truncation for a given arrival rate: tail mass beyond
    /// lambda + 12*sqrt(lambda) + 20 is below 1e-12 for lambda <= 100.
    pub fn for_params(lambda: f64, q_cap: u32) -> Self {
        Self {
            q_cap,
            a_max: (lambda + 12.0 * lambda.sqrt() + 20.0).ceil() as u32,
            tol: 1e-13,
        }
    }
}

/// Stationary law of the joint (queue length, channel state) chain.
#[derive(Debug, Clone)]
pub struct StationaryDist {
    /// probs[q * 2 + s], s = 0 for Bad, 1 for Good.
    pub probs: Vec<f64>,
    pub q_cap: u32,
    /// Mass sitting at the truncation boundary q = q_cap.
    pub boundary_mass: f64,
    /// Set when boundary mass >= 1e-9, meaning q_cap was too small.
    pub truncation_warning: bool,
    pub iterations: u32,
}

impl StationaryDist {
    /// Marginal Pr(q = k).
    pub fn queue_marginal(&self, k: u32) -> f64 {
        self.probs[k as usize * 2] + self.probs[k as usize * 2 + 1]
    }
}

fn truncated_poisson_pmf(lambda: f64, a_max: u32) -> Vec<f64> {
    let mut pmf = vec![0.0; a_max as usize + 1];
    if lambda == 0.0 {
        pmf[0] = 1.0;
        return pmf;
    }
    let mut term = (-lambda).exp();
    let mut cum = 0.0;
    for (n, slot) in pmf.iter_mut().enumerate() {
        if n > 0 {
            term *= lambda / n as f64;
        }
        *slot = term;
        cum += term;
    }
    // Lump the tail at a_max.
    pmf[a_max as usize] += (1.0 - cum).max(0.0);
    pmf
}

/// One full-slot transition: arrivals, service at the current rate, clamps at
/// 0 and q_cap, then the channel step. `src` and `dst` are prob vectors.
fn apply_slot(
    src: &[f64],
    dst: &mut [f64],
    pmf: &[f64],
    ch: &GilbertElliottParams,
    q_cap: u32,
) {
    dst.iter_mut().for_each(|x| *x = 0.0);
    let trans = [
        [ch.alpha_bar(), ch.alpha], // from Bad
        [ch.beta, ch.beta_bar()],   // from Good
    ];
    for q in 0..=q_cap as usize {
        for s in 0..2usize {
            let p = src[q * 2 + s];
            if p == 0.0 {
                continue;
            }
            let d = if s == 1 { ch.c as i64 } else { 0 };
            for (a, &w) in pmf.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                let q_next = (q as i64 + a as i64 - d).clamp(0, q_cap as i64) as usize;
                let mass = p * w;
                dst[q_next * 2] += mass * trans[s][0];
                dst[q_next * 2 + 1] += mass * trans[s][1];
            }
        }
    }
}

const MAX_POWER_ITERS: u32 = 2_000_000;

/// Stationary distribution without the stability pre-check; unstable inputs
/// simply pile mass at the truncation boundary and trip the warning.
pub fn stationary_unchecked(
    arr: &PoissonArrivalParams,
    ch: &GilbertElliottParams,
    spec: &TruncatedChainSpec,
) -> Result<StationaryDist, OracleError> {
    let n = (spec.q_cap as usize + 1) * 2;
    let pmf = truncated_poisson_pmf(arr.lambda, spec.a_max);
    // Start from (q = 0, channel stationary) when defined, uniform otherwise.
    let mut cur = vec![0.0; n];
    match crate::stochastic::stationary_distribution(ch) {
        Ok((pi0, pi1)) => {
            cur[0] = pi0;
            cur[1] = pi1;
        }
        Err(_) => {
            cur[0] = 0.5;
            cur[1] = 0.5;
        }
    }
    let mut next = vec![0.0; n];
    let mut iterations = 0;
    loop {
        apply_slot(&cur, &mut next, &pmf, ch, spec.q_cap);
        iterations += 1;
        let diff = cur
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        std::mem::swap(&mut cur, &mut next);
        if diff <= spec.tol {
            break;
        }
        if iterations >= MAX_POWER_ITERS {
            return Err(OracleError::NoConvergence {
                max_iters: MAX_POWER_ITERS,
            });
        }
    }
    // Renormalize residual drift from the truncation lumping.
    let total: f64 = cur.iter().sum();
    cur.iter_mut().for_each(|x| *x /= total);
    let boundary_mass = cur[n - 2] + cur[n - 1];
    Ok(StationaryDist {
        probs: cur,
        q_cap: spec.q_cap,
        boundary_mass,
        truncation_warning: boundary_mass >= 1e-9,
        iterations,
    })
}

/// Exact stationary law of the single-satellite queue jointly with its
/// channel. Errors on unstable parameters.
pub fn single_leo_stationary(
    arr: &PoissonArrivalParams,
    ch: &GilbertElliottParams,
    spec: &TruncatedChainSpec,
) -> Result<StationaryDist, OracleError> {
    let margin = stability_margin(arr, ch);
    if margin <= 0.0 {
        return Err(OracleError::Unstable { margin });
    }
    stationary_unchecked(arr, ch, spec)
}

/// Exact Pr(q > tau) under a stationary law.
pub fn oracle_overflow(dist: &StationaryDist, tau: u32) -> f64 {
    if tau >= dist.q_cap {
        return 0.0;
    }
    ((tau + 1)..=dist.q_cap)
        .map(|q| dist.queue_marginal(q))
        .sum()
}

/// Exhaustive minimizer of the max conditional expected load over the
/// feasible allocations, scanning the two-value line x*(L-Z) + y*Z = Q at
/// resolution `grid_step`. Returns the best targets and their objective.
pub fn brute_force_allocation(
    total: u64,
    prev_states: &[ChannelState],
    arr: &PoissonArrivalParams,
    ch: &GilbertElliottParams,
    grid_step: f64,
) -> (Vec<f64>, f64) {
    let l = prev_states.len();
    assert!(l >= 1 && grid_step > 0.0);
    let z = prev_states
        .iter()
        .filter(|s| **s == ChannelState::Good)
        .count();
    let q = total as f64;

    let expand = |x: f64, y: f64| -> Vec<f64> {
        prev_states
            .iter()
            .map(|s| match s {
                ChannelState::Bad => x,
                ChannelState::Good => y,
            })
            .collect()
    };

    // Degenerate groups leave a single feasible point.
    if z == 0 || z == l {
        let share = q / l as f64;
        let targets = expand(share, share);
        let obj = max_expected_load(&targets, prev_states, arr, ch);
        return (targets, obj);
    }

    let x_hi = q / (l - z) as f64;
    let steps = (x_hi / grid_step).ceil() as u64;
    let mut best_obj = f64::INFINITY;
    let mut best = (0.0, 0.0);
    for i in 0..=steps {
        let x = (i as f64 * grid_step).min(x_hi);
        let y = (q - x * (l - z) as f64) / z as f64;
        if y < 0.0 {
            continue;
        }
        let targets = expand(x, y);
        let obj = max_expected_load(&targets, prev_states, arr, ch);
        if obj < best_obj {
            best_obj = obj;
            best = (x, y);
        }
    }
    (expand(best.0, best.1), best_obj)
}

/// Analytic case conditions of the closed-form allocator, evaluated
/// independently of its implementation.
#[derive(Debug, Clone, Copy)]
pub struct CaseCheck {
    delta: f64,
    q: f64,
    z: usize,
    l: usize,
}

impl CaseCheck {
    pub fn new(total: u64, prev_states: &[ChannelState], ch: &GilbertElliottParams) -> Self {
        Self {
            delta: ch.c as f64 * (ch.beta_bar() - ch.alpha),
            q: total as f64,
            z: prev_states
                .iter()
                .filter(|s| **s == ChannelState::Good)
                .count(),
            l: prev_states.len(),
        }
    }

    /// True when `tag` is the branch the case conditions select.
    pub fn matches(&self, tag: crate::allocation::CaseTag) -> bool {
        use crate::allocation::CaseTag;
        if self.q == 0.0 {
            return tag == CaseTag::III;
        }
        let case_one = self.z > 0 && self.delta > self.q / self.z as f64;
        let case_two = self.z < self.l && self.delta < -self.q / (self.l - self.z) as f64;
        match tag {
            CaseTag::I => case_one,
            CaseTag::II => case_two,
            CaseTag::III => !case_one && !case_two,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocation::{mqla_allocate, max_expected_load};
    use crate::rng::stream_rng;
    use crate::stochastic::stationary_distribution;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use ChannelState::{Bad, Good};

    fn arr(lambda: f64) -> PoissonArrivalParams {
        PoissonArrivalParams::new(lambda).unwrap()
    }

    fn ge(alpha: f64, beta: f64, c: u32) -> GilbertElliottParams {
        GilbertElliottParams::new(alpha, beta, c).unwrap()
    }

    #[test]
    fn empty_system_all_mass_at_zero() {
        let a = arr(0.0);
        let ch = ge(0.7, 0.3, 16);
        let spec = TruncatedChainSpec::for_params(0.0, 50);
        let dist = single_leo_stationary(&a, &ch, &spec).unwrap();
        let (pi0, pi1) = stationary_distribution(&ch).unwrap();
        assert_abs_diff_eq!(dist.probs[0], pi0, epsilon = 1e-10);
        assert_abs_diff_eq!(dist.probs[1], pi1, epsilon = 1e-10);
        assert_abs_diff_eq!(dist.queue_marginal(0), 1.0, epsilon = 1e-10);
        assert!(!dist.truncation_warning);
    }

    #[test]
    fn unstable_params_error() {
        let err = single_leo_stationary(
            &arr(10.0),
            &ge(0.7, 0.3, 14),
            &TruncatedChainSpec::for_params(10.0, 100),
        )
        .unwrap_err();
        assert!(matches!(err, OracleError::Unstable { .. }));
    }

    #[test]
    fn never_good_server_drifts_to_cap_with_warning() {
        // alpha = 0: the server never leaves Bad, the queue drifts to q_cap
        // and the truncation warning fires.
        let a = arr(2.0);
        let ch = ge(0.0, 0.3, 16);
        let spec = TruncatedChainSpec {
            q_cap: 60,
            a_max: 40,
            tol: 1e-12,
        };
        let dist = stationary_unchecked(&a, &ch, &spec).unwrap();
        assert!(dist.truncation_warning);
        assert!(dist.boundary_mass > 0.9, "mass = {}", dist.boundary_mass);
    }

    #[test]
    fn stationary_vector_is_fixed_point() {
        let a = arr(10.0);
        let ch = ge(0.7, 0.3, 16);
        let spec = TruncatedChainSpec::for_params(10.0, 400);
        let dist = single_leo_stationary(&a, &ch, &spec).unwrap();
        let pmf = truncated_poisson_pmf(a.lambda, spec.a_max);
        let mut next = vec![0.0; dist.probs.len()];
        apply_slot(&dist.probs, &mut next, &pmf, &ch, spec.q_cap);
        let diff = dist
            .probs
            .iter()
            .zip(&next)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0f64, f64::max);
        assert!(diff <= 10.0 * spec.tol, "diff = {diff}");
        let total: f64 = dist.probs.iter().sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn overflow_monotone_and_support_bound() {
        let a = arr(10.0);
        let ch = ge(0.7, 0.3, 16);
        let spec = TruncatedChainSpec::for_params(10.0, 400);
        let dist = single_leo_stationary(&a, &ch, &spec).unwrap();
        let mut prev = 1.0;
        for tau in 0..=400 {
            let p = oracle_overflow(&dist, tau);
            assert!(p <= prev + 1e-15);
            prev = p;
        }
        assert_eq!(oracle_overflow(&dist, 400), 0.0);
        assert_eq!(oracle_overflow(&dist, 500), 0.0);
        assert_abs_diff_eq!(
            oracle_overflow(&dist, 0),
            1.0 - dist.queue_marginal(0),
            epsilon = 1e-12
        );
    }

    #[test]
    fn exact_tail_slope_matches_qos_exponent() {
        let a = arr(10.0);
        let ch = ge(0.7, 0.3, 16);
        let spec = TruncatedChainSpec::for_params(10.0, 600);
        let dist = single_leo_stationary(&a, &ch, &spec).unwrap();
        // Least-squares slope of ln Pr(q > tau) on tau in [50, 300].
        let pts: Vec<(f64, f64)> = (50..=300)
            .step_by(10)
            .map(|t| (t as f64, oracle_overflow(&dist, t).ln()))
            .collect();
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        let theta = crate::effective_bandwidth::solve_qos_exponent(&a, &ch, 1e-10)
            .unwrap()
            .theta_star;
        assert!(
            (slope + theta).abs() / theta < 0.05,
            "slope = {slope}, -theta* = {}",
            -theta
        );
    }

    #[test]
    fn brute_force_matches_closed_form_cases() {
        let a = arr(10.0);
        // Symmetric delta = 0: objective equals equal split.
        let ch0 = ge(0.7, 0.3, 16);
        let states = [Good, Good, Bad, Bad];
        let (_, obj) = brute_force_allocation(20, &states, &a, &ch0, 0.01);
        let eq = max_expected_load(&[5.0; 4], &states, &a, &ch0);
        assert!((obj - eq).abs() <= 0.02);

        // Case I instance.
        let ch1 = ge(0.1, 0.1, 16);
        let (targets, obj) = brute_force_allocation(20, &states, &a, &ch1, 0.01);
        assert_abs_diff_eq!(targets[0], 10.0, epsilon = 0.011);
        assert_abs_diff_eq!(targets[2], 0.0, epsilon = 0.011);
        let d = mqla_allocate(20, &states, &ch1);
        let closed = max_expected_load(&d.fractional, &states, &a, &ch1);
        assert!((obj - closed).abs() <= 0.02);

        // Case III instance.
        let ch3 = ge(0.6, 0.5, 16);
        let (targets, _) = brute_force_allocation(20, &[Bad, Bad, Good, Good], &a, &ch3, 0.01);
        assert_abs_diff_eq!(targets[0], 5.8, epsilon = 0.011);
        assert_abs_diff_eq!(targets[2], 4.2, epsilon = 0.011);
    }

    #[test]
    fn brute_force_beats_random_feasible_points() {
        let mut rng = stream_rng(77, &[1]);
        for _ in 0..30 {
            let l = rng.random_range(2..=5usize);
            let total = rng.random_range(0..=40u64);
            let states: Vec<ChannelState> = (0..l)
                .map(|_| if rng.random::<bool>() { Good } else { Bad })
                .collect();
            let a = arr(rng.random_range(0.0..20.0));
            let ch = ge(rng.random(), rng.random(), rng.random_range(1..=24));
            let (_, best) = brute_force_allocation(total, &states, &a, &ch, 0.01);
            for _ in 0..100 {
                // Random feasible point via normalized exponentials.
                let raw: Vec<f64> = (0..l).map(|_| -rng.random::<f64>().ln()).collect();
                let s: f64 = raw.iter().sum();
                let feas: Vec<f64> = raw.iter().map(|r| r / s * total as f64).collect();
                let obj = max_expected_load(&feas, &states, &a, &ch);
                assert!(best <= obj + 0.02, "best = {best}, random = {obj}");
            }
        }
    }

    #[test]
    fn full_simplex_scan_confirms_two_value_reduction() {
        // L = 3, one satellite per-coordinate scan, compared against the
        // two-value line scan. Confirms the optimum uses only two values.
        let a = arr(10.0);
        let ch = ge(0.3, 0.2, 8);
        let states = [Good, Bad, Good];
        let total = 12u64;
        let step = 0.05;
        let n = (total as f64 / step) as u64;
        let mut best = f64::INFINITY;
        for i in 0..=n {
            let q0 = i as f64 * step;
            for j in 0..=(n - i) {
                let q1 = j as f64 * step;
                let q2 = total as f64 - q0 - q1;
                if q2 < 0.0 {
                    continue;
                }
                let obj = max_expected_load(&[q0, q1, q2], &states, &a, &ch);
                if obj < best {
                    best = obj;
                }
            }
        }
        let (_, line_best) = brute_force_allocation(total, &states, &a, &ch, step);
        assert!((best - line_best).abs() <= 2.0 * step, "{best} vs {line_best}");
    }
}
