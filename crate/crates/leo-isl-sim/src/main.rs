//! Command-line front end: parameter sweeps, analytical summaries, and
//! self-validation, all emitting CSV.

use clap::{Parser, Subcommand, ValueEnum};
use leo_isl_sim::allocation::PolicyKind;
use leo_isl_sim::experiments::{
    parse_config, run_experiment, ExperimentKind, ExperimentSpec,
};
use leo_isl_sim::simulator::MeasureEpoch;
use leo_isl_sim::stochastic::{GilbertElliottParams, PoissonArrivalParams};
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PolicyArg {
    #[value(name = "no-isl")]
    NoIsl,
    Virtual,
    Mqla,
    All,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MeasureArg {
    Post,
    Pre,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    /// Unbounded queues; p_hat is the threshold-exceedance probability.
    Exceed,
    /// Queues clamp at qmax; dropped packets are counted.
    Drop,
}

#[derive(Debug, Parser)]
#[command(
    name = "leo-isl-sim",
    about = "Buffer-overflow simulation and effective-bandwidth analysis for LEO constellations with inter-satellite links"
)]
struct Cli {
    /// Config file (key=value lines, # comments); flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Bad-to-good transition probability of the feeder channel.
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Good-to-bad transition probability of the feeder channel.
    #[arg(long, global = true)]
    beta: Option<f64>,
    /// Mean Poisson arrivals per slot per satellite.
    #[arg(long, global = true)]
    lambda: Option<f64>,
    /// Packets served per slot in the good channel state.
    #[arg(long, global = true)]
    c: Option<u32>,
    /// Number of satellites in the orbit.
    #[arg(long = "L", global = true)]
    l: Option<u32>,
    /// Buffer capacity (only enforced with --mode drop).
    #[arg(long, global = true)]
    qmax: Option<u32>,
    /// Overflow thresholds, comma-separated and increasing.
    #[arg(long, global = true, value_delimiter = ',')]
    tau: Option<Vec<u32>>,
    #[arg(long, global = true)]
    slots: Option<u64>,
    #[arg(long, global = true)]
    warmup: Option<u64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    replications: Option<u32>,
    #[arg(long, global = true, value_enum)]
    policy: Option<PolicyArg>,
    /// Sample buffers before or after the MQLA reallocation step.
    #[arg(long, global = true, value_enum)]
    measure: Option<MeasureArg>,
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,
    /// Output CSV path; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override the default sweep grid, comma-separated.
    #[arg(long, global = true, value_delimiter = ',')]
    values: Option<Vec<f64>>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Overflow probability versus threshold tau.
    SweepTau,
    /// Overflow probability versus feeder-link rate c.
    SweepC,
    /// Overflow probability versus constellation size L.
    #[command(name = "sweep-L")]
    SweepL,
    /// Overflow probability versus bad-to-good probability alpha.
    SweepAlpha,
    /// Overflow probability versus good-to-bad probability beta.
    SweepBeta,
    /// QoS exponents, tail bounds, and required buffer sizes.
    Analyze,
    /// Simulator-vs-oracle and allocator-vs-brute-force checks.
    Validate,
}

fn build_spec(cli: &Cli) -> Result<ExperimentSpec, String> {
    let text = match &cli.config {
        Some(path) => fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?,
        None => String::new(),
    };
    let mut cfg = parse_config(&text).map_err(|e| e.to_string())?;

    let alpha = cli.alpha.unwrap_or(cfg.ch.alpha);
    let beta = cli.beta.unwrap_or(cfg.ch.beta);
    let c = cli.c.unwrap_or(cfg.ch.c);
    cfg.ch = GilbertElliottParams::new(alpha, beta, c).map_err(|e| e.to_string())?;
    if let Some(lambda) = cli.lambda {
        cfg.arr = PoissonArrivalParams::new(lambda).map_err(|e| e.to_string())?;
    }
    if let Some(l) = cli.l {
        cfg.l = l;
    }
    if let Some(slots) = cli.slots {
        cfg.slots = slots;
    }
    if let Some(warmup) = cli.warmup {
        cfg.warmup_slots = warmup;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(tau) = &cli.tau {
        cfg.thresholds = tau.clone();
    }
    if let Some(q) = cli.qmax {
        cfg.q_max = Some(q);
    }
    cfg.q_max = match cli.mode.unwrap_or(ModeArg::Exceed) {
        ModeArg::Exceed => None,
        ModeArg::Drop => Some(
            cfg.q_max
                .ok_or("--mode drop requires --qmax (or qmax in the config file)")?,
        ),
    };
    if let Some(m) = cli.measure {
        cfg.measure_epoch = match m {
            MeasureArg::Post => MeasureEpoch::PostReallocation,
            MeasureArg::Pre => MeasureEpoch::PreReallocation,
        };
    }

    let policies = match cli.policy.unwrap_or(PolicyArg::All) {
        PolicyArg::NoIsl => vec![PolicyKind::NoIsl],
        PolicyArg::Virtual => vec![PolicyKind::VirtualQueue],
        PolicyArg::Mqla => vec![PolicyKind::MqlaIsl],
        PolicyArg::All => vec![
            PolicyKind::NoIsl,
            PolicyKind::VirtualQueue,
            PolicyKind::MqlaIsl,
        ],
    };

    let kind = match cli.command {
        Command::SweepTau => ExperimentKind::SweepTau,
        Command::SweepC => ExperimentKind::SweepC,
        Command::SweepL => ExperimentKind::SweepL,
        Command::SweepAlpha => ExperimentKind::SweepAlpha,
        Command::SweepBeta => ExperimentKind::SweepBeta,
        Command::Analyze => ExperimentKind::Analyze,
        Command::Validate => ExperimentKind::Validate,
    };

    Ok(ExperimentSpec {
        kind,
        base: cfg,
        sweep: cli.values.clone().unwrap_or_default(),
        replications: cli.replications.unwrap_or(4).max(1),
        policies,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let spec = match build_spec(&cli) {
        Ok(spec) => spec,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };

    let result = match &cli.out {
        Some(path) => {
            let file = match fs::File::create(path) {
                Ok(f) => f,
                Err(e) => {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            };
            let mut w = io::BufWriter::new(file);
            run_experiment(&spec, &mut w).and_then(|r| {
                w.flush()?;
                Ok(r)
            })
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            run_experiment(&spec, &mut w)
        }
    };

    match result {
        Ok(report) => {
            if report.unstable_points > 0 {
                eprintln!(
                    "note: {} sweep point(s) violate the stability condition; \
                     their rows carry p_hat=1 with samples=0",
                    report.unstable_points
                );
            }
            if report.failures > 0 {
                eprintln!("validate: {} comparison(s) failed", report.failures);
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
