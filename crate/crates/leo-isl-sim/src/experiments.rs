//! Experiment front end: the four sweep families, the analytical summary, and
//! the self-validation run, all emitting deterministic CSV.

use crate::allocation::{mqla_allocate, max_expected_load, PolicyKind};
use crate::effective_bandwidth::{
    overflow_bound, required_buffer, solve_qos_exponent, virtual_queue_exponent,
};
use crate::oracle::{brute_force_allocation, oracle_overflow, single_leo_stationary, CaseCheck};
use crate::rng::{derive_seed, stream_rng};
use crate::simulator::{
    estimate_overflow, merge_stats, run_simulation, ConstellationConfig, MeasureEpoch,
    OverflowStats,
};
use crate::stochastic::{
    stability_margin, ChannelState, GilbertElliottParams, PoissonArrivalParams,
};
use rand::Rng;
use rayon::prelude::*;
use std::fmt::Write as _;
use std::io::Write;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("key `{key}` out of range: {msg}")]
    Range { key: String, msg: String },
    #[error("simulation failed: {0}")]
    Sim(#[from] crate::simulator::SimError),
    #[error("analysis failed: {0}")]
    Solve(#[from] crate::effective_bandwidth::SolveError),
    #[error("oracle failed: {0}")]
    Oracle(#[from] crate::oracle::OracleError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    SweepTau,
    SweepC,
    SweepL,
    SweepAlpha,
    SweepBeta,
    Analyze,
    Validate,
}

/// One experiment: a base configuration plus the values swept over it.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub base: ConstellationConfig,
    /// Swept values; `default_sweep` supplies the standard grid when empty.
    pub sweep: Vec<f64>,
    pub replications: u32,
    pub policies: Vec<PolicyKind>,
}

/// Outcome summary; `failures > 0` only for Validate.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExperimentReport {
    pub rows: usize,
    pub failures: usize,
    pub unstable_points: usize,
}

/// Reference parameter set used throughout the experiments.
pub fn default_config() -> ConstellationConfig {
    ConstellationConfig {
        l: 10,
        arr: PoissonArrivalParams::new(10.0).unwrap(),
        ch: GilbertElliottParams::new(0.7, 0.3, 16).unwrap(),
        policy: PolicyKind::NoIsl,
        slots: 200_000,
        warmup_slots: 10_000,
        seed: 1,
        thresholds: (10..=60).step_by(5).collect(),
        q_max: None,
        measure_epoch: MeasureEpoch::PostReallocation,
    }
}

/// Standard grid for each sweep family.
pub fn default_sweep(kind: ExperimentKind) -> Vec<f64> {
    match kind {
        ExperimentKind::SweepTau => (10..=60).step_by(5).map(|t| t as f64).collect(),
        ExperimentKind::SweepC => (14..=22).map(|c| c as f64).collect(),
        ExperimentKind::SweepL => (2..=20).map(|l| l as f64).collect(),
        ExperimentKind::SweepAlpha => (3..=9).map(|a| a as f64 / 10.0).collect(),
        ExperimentKind::SweepBeta => (1..=7).map(|b| b as f64 / 10.0).collect(),
        ExperimentKind::Analyze | ExperimentKind::Validate => Vec::new(),
    }
}

pub fn policy_name(p: PolicyKind) -> &'static str {
    match p {
        PolicyKind::NoIsl => "no-isl",
        PolicyKind::VirtualQueue => "virtual",
        PolicyKind::MqlaIsl => "mqla",
    }
}

fn parse_policy(s: &str) -> Option<PolicyKind> {
    match s {
        "no-isl" => Some(PolicyKind::NoIsl),
        "virtual" => Some(PolicyKind::VirtualQueue),
        "mqla" => Some(PolicyKind::MqlaIsl),
        _ => None,
    }
}

/// Parse the key=value config format. Unknown keys and out-of-range values
/// are errors; omitted keys take the reference defaults.
pub fn parse_config(text: &str) -> Result<ConstellationConfig, ExperimentError> {
    let mut cfg = default_config();
    let mut alpha = cfg.ch.alpha;
    let mut beta = cfg.ch.beta;
    let mut c = cfg.ch.c;
    let mut lambda = cfg.arr.lambda;

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ExperimentError::Parse {
            line: lineno,
            msg: format!("expected key=value, got `{line}`"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        let bad = |msg: &str| ExperimentError::Parse {
            line: lineno,
            msg: format!("key `{key}`: {msg}"),
        };
        match key {
            "alpha" => alpha = value.parse().map_err(|_| bad("not a number"))?,
            "beta" => beta = value.parse().map_err(|_| bad("not a number"))?,
            "lambda" => lambda = value.parse().map_err(|_| bad("not a number"))?,
            "c" => c = value.parse().map_err(|_| bad("not an integer"))?,
            "L" => cfg.l = value.parse().map_err(|_| bad("not an integer"))?,
            "slots" => cfg.slots = value.parse().map_err(|_| bad("not an integer"))?,
            "warmup" => cfg.warmup_slots = value.parse().map_err(|_| bad("not an integer"))?,
            "seed" => cfg.seed = value.parse().map_err(|_| bad("not an integer"))?,
            "qmax" => cfg.q_max = Some(value.parse().map_err(|_| bad("not an integer"))?),
            "tau" => {
                let parsed: Result<Vec<u32>, _> =
                    value.split(',').map(|v| v.trim().parse()).collect();
                cfg.thresholds = parsed.map_err(|_| bad("not a comma-separated integer list"))?;
            }
            "policy" => {
                cfg.policy = parse_policy(value)
                    .ok_or_else(|| bad("expected no-isl, virtual, or mqla"))?;
            }
            "measure" => {
                cfg.measure_epoch = match value {
                    "post" => MeasureEpoch::PostReallocation,
                    "pre" => MeasureEpoch::PreReallocation,
                    _ => return Err(bad("expected post or pre")),
                };
            }
            _ => {
                return Err(ExperimentError::Parse {
                    line: lineno,
                    msg: format!("unknown key `{key}`"),
                });
            }
        }
    }

    cfg.ch = GilbertElliottParams::new(alpha, beta, c).map_err(|e| ExperimentError::Range {
        key: match e {
            crate::stochastic::ModelError::OutOfRange { name, .. } => name.to_string(),
            _ => "alpha/beta".to_string(),
        },
        msg: e.to_string(),
    })?;
    cfg.arr = PoissonArrivalParams::new(lambda).map_err(|e| ExperimentError::Range {
        key: "lambda".to_string(),
        msg: e.to_string(),
    })?;
    if cfg.l < 1 {
        return Err(ExperimentError::Range {
            key: "L".to_string(),
            msg: "must be >= 1".to_string(),
        });
    }
    if cfg.thresholds.is_empty() || !cfg.thresholds.windows(2).all(|w| w[0] < w[1]) {
        return Err(ExperimentError::Range {
            key: "tau".to_string(),
            msg: "must be non-empty and strictly increasing".to_string(),
        });
    }
    if cfg.warmup_slots >= cfg.slots {
        return Err(ExperimentError::Range {
            key: "warmup".to_string(),
            msg: "must be less than slots".to_string(),
        });
    }
    Ok(cfg)
}

/// Canonical key=value rendering; `parse_config` round-trips it.
pub fn serialize_config(cfg: &ConstellationConfig) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "alpha={}", cfg.ch.alpha);
    let _ = writeln!(s, "beta={}", cfg.ch.beta);
    let _ = writeln!(s, "lambda={}", cfg.arr.lambda);
    let _ = writeln!(s, "c={}", cfg.ch.c);
    let _ = writeln!(s, "L={}", cfg.l);
    let _ = writeln!(s, "slots={}", cfg.slots);
    let _ = writeln!(s, "warmup={}", cfg.warmup_slots);
    let _ = writeln!(s, "seed={}", cfg.seed);
    let taus: Vec<String> = cfg.thresholds.iter().map(|t| t.to_string()).collect();
    let _ = writeln!(s, "tau={}", taus.join(","));
    if let Some(q) = cfg.q_max {
        let _ = writeln!(s, "qmax={q}");
    }
    let _ = writeln!(s, "policy={}", policy_name(cfg.policy));
    let _ = writeln!(
        s,
        "measure={}",
        match cfg.measure_epoch {
            MeasureEpoch::PostReallocation => "post",
            MeasureEpoch::PreReallocation => "pre",
        }
    );
    s
}

/// Run `replications` independent copies of `cfg` and pool their counters.
/// Replication seeds derive from (master seed, sweep index, replication), so
/// adding replications never perturbs earlier ones.
pub fn run_replicated(
    cfg: &ConstellationConfig,
    sweep_index: u64,
    replications: u32,
) -> Result<OverflowStats, ExperimentError> {
    let master = cfg.seed;
    let stats: Result<Vec<OverflowStats>, _> = (0..replications as u64)
        .into_par_iter()
        .map(|r| {
            let mut rep_cfg = cfg.clone();
            rep_cfg.seed = derive_seed(master, &[sweep_index, r]);
            run_simulation(&rep_cfg)
        })
        .collect();
    let stats = stats?;
    let mut merged = OverflowStats::empty(cfg.thresholds.clone(), None);
    // Seed the merge with matching per-satellite shape from the first result.
    if let Some(first) = stats.first() {
        merged.per_satellite_exceed = first
            .per_satellite_exceed
            .as_ref()
            .map(|ps| vec![vec![0; cfg.thresholds.len()]; ps.len()]);
    }
    for s in &stats {
        merged = merge_stats(&merged, s)?;
    }
    Ok(merged)
}

fn apply_sweep_value(
    cfg: &mut ConstellationConfig,
    kind: ExperimentKind,
    value: f64,
) -> Result<(), ExperimentError> {
    let int = |key: &str| -> Result<u32, ExperimentError> {
        if value.fract() != 0.0 || value < 1.0 {
            Err(ExperimentError::Range {
                key: key.to_string(),
                msg: format!("sweep value {value} is not a positive integer"),
            })
        } else {
            Ok(value as u32)
        }
    };
    match kind {
        ExperimentKind::SweepC => {
            cfg.ch = GilbertElliottParams::new(cfg.ch.alpha, cfg.ch.beta, int("c")?)
                .expect("alpha/beta unchanged");
        }
        ExperimentKind::SweepL => cfg.l = int("L")?,
        ExperimentKind::SweepAlpha => {
            cfg.ch = GilbertElliottParams::new(value, cfg.ch.beta, cfg.ch.c).map_err(|e| {
                ExperimentError::Range {
                    key: "alpha".to_string(),
                    msg: e.to_string(),
                }
            })?;
        }
        ExperimentKind::SweepBeta => {
            cfg.ch = GilbertElliottParams::new(cfg.ch.alpha, value, cfg.ch.c).map_err(|e| {
                ExperimentError::Range {
                    key: "beta".to_string(),
                    msg: e.to_string(),
                }
            })?;
        }
        ExperimentKind::SweepTau | ExperimentKind::Analyze | ExperimentKind::Validate => {}
    }
    Ok(())
}

fn sweep_var_name(kind: ExperimentKind) -> &'static str {
    match kind {
        ExperimentKind::SweepTau => "tau",
        ExperimentKind::SweepC => "c",
        ExperimentKind::SweepL => "L",
        ExperimentKind::SweepAlpha => "alpha",
        ExperimentKind::SweepBeta => "beta",
        ExperimentKind::Analyze | ExperimentKind::Validate => "",
    }
}

/// Execute the experiment, streaming CSV to `out`.
pub fn run_experiment(
    spec: &ExperimentSpec,
    out: &mut dyn Write,
) -> Result<ExperimentReport, ExperimentError> {
    match spec.kind {
        ExperimentKind::Analyze => run_analyze(spec, out),
        ExperimentKind::Validate => run_validate(spec, out),
        _ => run_sweep(spec, out),
    }
}

fn run_sweep(
    spec: &ExperimentSpec,
    out: &mut dyn Write,
) -> Result<ExperimentReport, ExperimentError> {
    let sweep = if spec.sweep.is_empty() {
        default_sweep(spec.kind)
    } else {
        spec.sweep.clone()
    };
    let var = sweep_var_name(spec.kind);
    let mut report = ExperimentReport::default();
    writeln!(out, "sweep_var,value,policy,tau,p_hat,ci,samples")?;

    for (k, &value) in sweep.iter().enumerate() {
        let mut cfg = spec.base.clone();
        apply_sweep_value(&mut cfg, spec.kind, value)?;
        if spec.kind == ExperimentKind::SweepTau {
            // The sweep values are the thresholds themselves; one run per
            // policy tracks them all.
            cfg.thresholds = sweep.iter().map(|&t| t as u32).collect();
        }
        let unstable = stability_margin(&cfg.arr, &cfg.ch) <= 0.0;
        if unstable {
            report.unstable_points += 1;
        }
        for &policy in &spec.policies {
            let mut cfg = cfg.clone();
            cfg.policy = policy;
            if unstable {
                // Saturated queue: the overflow probability is 1. samples=0
                // flags the row as analytic rather than simulated.
                for &tau in &cfg.thresholds {
                    if spec.kind == ExperimentKind::SweepTau && tau as f64 != value {
                        continue;
                    }
                    writeln!(out, "{var},{value},{},{tau},1,0,0", policy_name(policy))?;
                    report.rows += 1;
                }
                continue;
            }
            let stats = run_replicated(&cfg, k as u64, spec.replications)?;
            for &tau in &cfg.thresholds {
                if spec.kind == ExperimentKind::SweepTau && tau as f64 != value {
                    continue;
                }
                let (p_hat, ci) = estimate_overflow(&stats, tau)?;
                writeln!(
                    out,
                    "{var},{value},{},{tau},{p_hat},{ci},{}",
                    policy_name(policy),
                    stats.samples
                )?;
                report.rows += 1;
            }
        }
    }
    Ok(report)
}

fn run_analyze(
    spec: &ExperimentSpec,
    out: &mut dyn Write,
) -> Result<ExperimentReport, ExperimentError> {
    let cfg = &spec.base;
    let sol = solve_qos_exponent(&cfg.arr, &cfg.ch, 1e-10)?;
    let theta = sol.theta_star;
    let theta_v = virtual_queue_exponent(theta, cfg.l);
    let mut report = ExperimentReport::default();
    writeln!(out, "metric,tau,value")?;
    writeln!(out, "theta_star,,{theta}")?;
    writeln!(out, "virtual_theta_star,,{theta_v}")?;
    writeln!(out, "required_buffer_1e-4,,{}", required_buffer(theta, 1e-4))?;
    report.rows += 3;
    for &tau in &cfg.thresholds {
        writeln!(out, "bound_no_isl,{tau},{}", overflow_bound(theta, tau as f64))?;
        writeln!(
            out,
            "bound_virtual,{tau},{}",
            overflow_bound(theta_v, tau as f64)
        )?;
        report.rows += 2;
    }
    Ok(report)
}

fn run_validate(
    spec: &ExperimentSpec,
    out: &mut dyn Write,
) -> Result<ExperimentReport, ExperimentError> {
    let mut report = ExperimentReport::default();
    writeln!(out, "check,detail,expected,actual,pass")?;

    // Closed-form allocator vs brute-force minimizer on random instances.
    let arr = &spec.base.arr;
    let mut rng = stream_rng(spec.base.seed, &[0xA110C]);
    let grid_step = 0.01;
    let instances = 200;
    let mut max_gap = 0.0f64;
    let mut tags_ok = true;
    for _ in 0..instances {
        let l = rng.random_range(1..=6usize);
        let total = rng.random_range(0..=40u64);
        let states: Vec<ChannelState> = (0..l)
            .map(|_| {
                if rng.random::<bool>() {
                    ChannelState::Good
                } else {
                    ChannelState::Bad
                }
            })
            .collect();
        let ch = GilbertElliottParams::new(rng.random(), rng.random(), rng.random_range(1..=24))
            .unwrap();
        let decision = mqla_allocate(total, &states, &ch);
        let closed = max_expected_load(&decision.fractional, &states, arr, &ch);
        let (_, brute) = brute_force_allocation(total, &states, arr, &ch, grid_step);
        let z = decision.z_count;
        let slack = grid_step * (1.0 + (l - z) as f64 / z.max(1) as f64);
        max_gap = max_gap.max((closed - brute).abs() - slack);
        if !CaseCheck::new(total, &states, &ch).matches(decision.case_tag) {
            tags_ok = false;
        }
    }
    let alloc_pass = max_gap <= 1e-6;
    writeln!(
        out,
        "allocator_vs_brute_force,instances={instances},gap<=1e-6+grid,{},{}",
        max_gap.max(0.0),
        alloc_pass
    )?;
    writeln!(out, "allocator_case_tags,instances={instances},match,{tags_ok},{tags_ok}")?;
    report.rows += 2;
    if !alloc_pass || !tags_ok {
        report.failures += 1;
    }

    // Single-satellite simulation vs the exact stationary law.
    let mut cfg = spec.base.clone();
    cfg.l = 1;
    cfg.policy = PolicyKind::NoIsl;
    cfg.slots = cfg.slots.max(5_000_000);
    cfg.warmup_slots = cfg.warmup_slots.min(cfg.slots / 10);
    let reps = spec.replications.max(8);
    let theta = solve_qos_exponent(&cfg.arr, &cfg.ch, 1e-10)?.theta_star;
    let q_cap = ((23.0 / theta).ceil() as u32).clamp(200, 5000);
    let dist = single_leo_stationary(
        &cfg.arr,
        &cfg.ch,
        &crate::oracle::TruncatedChainSpec::for_params(cfg.arr.lambda, q_cap),
    )?;
    let stats = run_replicated(&cfg, 0xFACE, reps)?;
    for &tau in &cfg.thresholds {
        let exact = oracle_overflow(&dist, tau);
        if exact < 1e-3 {
            continue;
        }
        let (p_hat, _) = estimate_overflow(&stats, tau)?;
        let rel = (p_hat - exact).abs() / exact;
        let pass = rel <= 0.05;
        writeln!(out, "sim_vs_oracle,tau={tau},{exact},{p_hat},{pass}")?;
        report.rows += 1;
        if !pass {
            report.failures += 1;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_config_gives_reference_defaults() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg, default_config());
    }

    #[test]
    fn parse_errors_carry_line_and_key() {
        let err = parse_config("alpha=0.5\nnonsense\n").unwrap_err();
        match err {
            ExperimentError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected: {other}"),
        }
        let err = parse_config("alpha=1.5").unwrap_err();
        match err {
            ExperimentError::Range { key, .. } => assert_eq!(key, "alpha"),
            other => panic!("unexpected: {other}"),
        }
        let err = parse_config("flux=3").unwrap_err();
        assert!(err.to_string().contains("unknown key `flux`"));
    }

    #[test]
    fn comments_and_overrides_parse() {
        let cfg = parse_config(
            "# experiment\nalpha = 0.6\nbeta=0.2 # trailing comment\ntau=5,10,20\nqmax=30\npolicy=mqla\nmeasure=pre\n",
        )
        .unwrap();
        assert_eq!(cfg.ch.alpha, 0.6);
        assert_eq!(cfg.ch.beta, 0.2);
        assert_eq!(cfg.thresholds, vec![5, 10, 20]);
        assert_eq!(cfg.q_max, Some(30));
        assert_eq!(cfg.policy, PolicyKind::MqlaIsl);
        assert_eq!(cfg.measure_epoch, MeasureEpoch::PreReallocation);
    }

    proptest! {
        #[test]
        fn config_round_trip(
            alpha in 0.0f64..=1.0,
            beta in 0.0f64..=1.0,
            lambda in 0.0f64..50.0,
            c in 1u32..64,
            l in 1u32..32,
            seed in proptest::num::u64::ANY,
            qmax in proptest::option::of(1u32..200),
            n_tau in 1usize..8,
            policy_sel in 0u8..3,
        ) {
            let thresholds: Vec<u32> = (0..n_tau as u32).map(|i| 3 + 7 * i).collect();
            let cfg = ConstellationConfig {
                l,
                arr: PoissonArrivalParams::new(lambda).unwrap(),
                ch: GilbertElliottParams::new(alpha, beta, c).unwrap(),
                policy: [PolicyKind::NoIsl, PolicyKind::VirtualQueue, PolicyKind::MqlaIsl]
                    [policy_sel as usize],
                slots: 1000,
                warmup_slots: 100,
                seed,
                thresholds,
                q_max: qmax,
                measure_epoch: MeasureEpoch::PostReallocation,
            };
            let text = serialize_config(&cfg);
            let parsed = parse_config(&text).unwrap();
            prop_assert_eq!(parsed, cfg);
        }
    }

    #[test]
    fn sweep_csv_is_deterministic_and_well_formed() {
        let mut base = default_config();
        base.slots = 5_000;
        base.warmup_slots = 500;
        base.l = 3;
        base.thresholds = vec![5, 15];
        let spec = ExperimentSpec {
            kind: ExperimentKind::SweepC,
            base,
            sweep: vec![14.0, 16.0],
            replications: 2,
            policies: vec![
                PolicyKind::NoIsl,
                PolicyKind::VirtualQueue,
                PolicyKind::MqlaIsl,
            ],
        };
        let mut a = Vec::new();
        let ra = run_experiment(&spec, &mut a).unwrap();
        let mut b = Vec::new();
        run_experiment(&spec, &mut b).unwrap();
        assert_eq!(a, b);
        assert_eq!(ra.unstable_points, 1); // c = 14

        let text = String::from_utf8(a).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "sweep_var,value,policy,tau,p_hat,ci,samples"
        );
        let mut rows = 0;
        for line in lines {
            let f: Vec<&str> = line.split(',').collect();
            assert_eq!(f.len(), 7, "row: {line}");
            let p: f64 = f[4].parse().unwrap();
            let ci: f64 = f[5].parse().unwrap();
            let samples: u64 = f[6].parse().unwrap();
            assert!((0.0..=1.0).contains(&p));
            assert!(ci >= 0.0);
            if f[1] == "14" {
                assert_eq!(p, 1.0);
                assert_eq!(samples, 0);
            } else {
                let l: u64 = if f[2] == "no-isl" || f[2] == "virtual" || f[2] == "mqla" {
                    3
                } else {
                    panic!("bad policy {}", f[2])
                };
                assert_eq!(samples, 2 * (5_000 - 500) * l);
            }
            rows += 1;
        }
        assert_eq!(rows, ra.rows);
    }

    #[test]
    fn sweep_tau_emits_one_row_per_policy_per_tau() {
        let mut base = default_config();
        base.slots = 3_000;
        base.warmup_slots = 300;
        base.l = 2;
        let spec = ExperimentSpec {
            kind: ExperimentKind::SweepTau,
            base,
            sweep: vec![10.0, 20.0, 30.0],
            replications: 1,
            policies: vec![PolicyKind::NoIsl, PolicyKind::MqlaIsl],
        };
        let mut buf = Vec::new();
        let report = run_experiment(&spec, &mut buf).unwrap();
        assert_eq!(report.rows, 6);
        let text = String::from_utf8(buf).unwrap();
        for line in text.lines().skip(1) {
            let f: Vec<&str> = line.split(',').collect();
            assert_eq!(f[0], "tau");
            assert_eq!(f[1], f[3]); // swept value is the threshold
        }
    }

    #[test]
    fn analyze_emits_anchors() {
        let mut base = default_config();
        base.thresholds = vec![40];
        let spec = ExperimentSpec {
            kind: ExperimentKind::Analyze,
            base,
            sweep: vec![],
            replications: 1,
            policies: vec![],
        };
        let mut buf = Vec::new();
        run_experiment(&spec, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let theta: f64 = text
            .lines()
            .find(|l| l.starts_with("theta_star,"))
            .unwrap()
            .rsplit(',')
            .next()
            .unwrap()
            .parse()
            .unwrap();
        assert!((theta - 0.0356).abs() < 1e-3);
        assert!(text.contains("required_buffer_1e-4,,259"));
    }
}
