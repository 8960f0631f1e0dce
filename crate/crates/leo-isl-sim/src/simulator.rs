//! Slotted-time Monte Carlo of the L-satellite system under one of the three
//! buffer policies, producing mergeable overflow statistics.

use crate::allocation::{mqla_allocate, PolicyKind};
use crate::rng::{purpose, stream_rng};
use crate::stochastic::{
    sample_stationary_state, step_channel, ArrivalSampler, ChannelState, GilbertElliottParams,
    PoissonArrivalParams,
};
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("config: {0}")]
    Config(String),
    #[error("threshold {tau} is not tracked")]
    UntrackedThreshold { tau: u32 },
    #[error("cannot merge stats with different threshold lists")]
    ThresholdMismatch,
}

/// When overflow is sampled relative to the MQLA reallocation step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureEpoch {
    /// After packets have been moved (the paper's q_l(t)); the default.
    PostReallocation,
    /// Before the ISL transfer, while buffers still hold s_l(t+1).
    PreReallocation,
}

/// Full description of one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstellationConfig {
    /// Satellites in the orbit.
    pub l: u32,
    pub arr: PoissonArrivalParams,
    pub ch: GilbertElliottParams,
    pub policy: PolicyKind,
    pub slots: u64,
    pub warmup_slots: u64,
    pub seed: u64,
    /// Overflow thresholds to track, sorted ascending.
    pub thresholds: Vec<u32>,
    /// Drop-on-full capacity; `None` leaves queues unbounded (exceedance mode).
    pub q_max: Option<u32>,
    pub measure_epoch: MeasureEpoch,
}

impl ConstellationConfig {
    fn validate(&self) -> Result<(), SimError> {
        if self.l < 1 {
            return Err(SimError::Config("L must be >= 1".into()));
        }
        if self.slots == 0 {
            return Err(SimError::Config("slots must be >= 1".into()));
        }
        if self.warmup_slots >= self.slots {
            return Err(SimError::Config("warmup_slots must be < slots".into()));
        }
        if self.thresholds.is_empty() {
            return Err(SimError::Config("thresholds must be non-empty".into()));
        }
        if !self.thresholds.windows(2).all(|w| w[0] < w[1]) {
            return Err(SimError::Config(
                "thresholds must be strictly increasing".into(),
            ));
        }
        if self.ch.alpha + self.ch.beta <= 0.0 {
            return Err(SimError::Config(
                "channel chain is degenerate (alpha = beta = 0)".into(),
            ));
        }
        Ok(())
    }
}

/// Per-satellite buffer occupancies and channel states for one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct QueueStateVector {
    pub q: Vec<u64>,
    pub channel: Vec<ChannelState>,
}

/// Exceedance counters, mergeable across replications.
#[derive(Debug, Clone, PartialEq)]
pub struct OverflowStats {
    pub thresholds: Vec<u32>,
    /// Slot-satellite measurement count.
    pub samples: u64,
    /// exceed[i] counts measurements with q > thresholds[i].
    pub exceed: Vec<u64>,
    pub dropped_packets: u64,
    /// Arrivals counted over the measured (post-warmup) span.
    pub arrived_packets: u64,
    pub max_queue_seen: u64,
    /// Per-satellite exceedance counters; absent for the virtual queue.
    pub per_satellite_exceed: Option<Vec<Vec<u64>>>,
}

impl OverflowStats {
    pub fn empty(thresholds: Vec<u32>, per_satellite: Option<usize>) -> Self {
        let t = thresholds.len();
        Self {
            exceed: vec![0; t],
            samples: 0,
            dropped_packets: 0,
            arrived_packets: 0,
            max_queue_seen: 0,
            per_satellite_exceed: per_satellite.map(|l| vec![vec![0; t]; l]),
            thresholds,
        }
    }
}

/// p_hat and its 95% normal-approximation half-width for one threshold.
///
/// Slot samples are correlated, so the interval is approximate. With zero
/// exceedances the rule-of-three upper hint 3/samples is reported instead.
pub fn estimate_overflow(stats: &OverflowStats, tau: u32) -> Result<(f64, f64), SimError> {
    let idx = stats
        .thresholds
        .iter()
        .position(|&t| t == tau)
        .ok_or(SimError::UntrackedThreshold { tau })?;
    if stats.samples == 0 {
        return Err(SimError::Config("no samples recorded".into()));
    }
    let n = stats.samples as f64;
    let p_hat = stats.exceed[idx] as f64 / n;
    let ci = if stats.exceed[idx] == 0 {
        3.0 / n
    } else {
        1.96 * (p_hat * (1.0 - p_hat) / n).sqrt()
    };
    Ok((p_hat, ci))
}

/// Counter-wise sum of two replications' statistics.
pub fn merge_stats(a: &OverflowStats, b: &OverflowStats) -> Result<OverflowStats, SimError> {
    if a.thresholds != b.thresholds {
        return Err(SimError::ThresholdMismatch);
    }
    let per_satellite_exceed = match (&a.per_satellite_exceed, &b.per_satellite_exceed) {
        (Some(x), Some(y)) if x.len() == y.len() => Some(
            x.iter()
                .zip(y)
                .map(|(r, s)| r.iter().zip(s).map(|(u, v)| u + v).collect())
                .collect(),
        ),
        _ => None,
    };
    Ok(OverflowStats {
        thresholds: a.thresholds.clone(),
        samples: a.samples + b.samples,
        exceed: a.exceed.iter().zip(&b.exceed).map(|(x, y)| x + y).collect(),
        dropped_packets: a.dropped_packets + b.dropped_packets,
        arrived_packets: a.arrived_packets + b.arrived_packets,
        max_queue_seen: a.max_queue_seen.max(b.max_queue_seen),
        per_satellite_exceed,
    })
}

/// One in-progress replication. `run_simulation` drives it slot by slot;
/// tests also step it manually to observe trajectories.
pub struct Simulation {
    cfg: ConstellationConfig,
    state: QueueStateVector,
    /// Aggregate queue for the virtual-queue policy.
    vq: u64,
    /// Channel states of the previous slot (slot -1 = initial states).
    prev_states: Vec<ChannelState>,
    sampler: ArrivalSampler,
    arrival_rngs: Vec<ChaCha12Rng>,
    channel_rngs: Vec<ChaCha12Rng>,
    /// hist[k] counts measurements whose value exceeds exactly the first k
    /// thresholds; suffix sums yield the exceed counters.
    hist: Vec<u64>,
    per_sat_hist: Option<Vec<Vec<u64>>>,
    samples: u64,
    dropped: u64,
    arrived: u64,
    max_seen: u64,
}

impl Simulation {
    pub fn new(cfg: &ConstellationConfig) -> Result<Self, SimError> {
        cfg.validate()?;
        let l = cfg.l as usize;
        let mut channel = Vec::with_capacity(l);
        for sat in 0..l as u64 {
            let mut init_rng = stream_rng(cfg.seed, &[sat, purpose::INIT]);
            let s = sample_stationary_state(&cfg.ch, &mut init_rng)
                .map_err(|e| SimError::Config(e.to_string()))?;
            channel.push(s);
        }
        let arrival_rngs = (0..l as u64)
            .map(|sat| stream_rng(cfg.seed, &[sat, purpose::ARRIVALS]))
            .collect();
        let channel_rngs = (0..l as u64)
            .map(|sat| stream_rng(cfg.seed, &[sat, purpose::CHANNEL]))
            .collect();
        let per_sat_hist = match cfg.policy {
            PolicyKind::VirtualQueue => None,
            _ => Some(vec![vec![0; cfg.thresholds.len() + 1]; l]),
        };
        Ok(Self {
            state: QueueStateVector {
                q: vec![0; l],
                channel: channel.clone(),
            },
            vq: 0,
            prev_states: channel,
            sampler: ArrivalSampler::new(&cfg.arr),
            arrival_rngs,
            channel_rngs,
            hist: vec![0; cfg.thresholds.len() + 1],
            per_sat_hist,
            samples: 0,
            dropped: 0,
            arrived: 0,
            max_seen: 0,
            cfg: cfg.clone(),
        })
    }

    /// Total packets currently buffered (aggregate for the virtual queue).
    pub fn total_queue(&self) -> u64 {
        match self.cfg.policy {
            PolicyKind::VirtualQueue => self.vq,
            _ => self.state.q.iter().sum(),
        }
    }

    pub fn state(&self) -> &QueueStateVector {
        &self.state
    }

    fn record_per_satellite(&mut self) {
        let thresholds = &self.cfg.thresholds;
        for (sat, &q) in self.state.q.iter().enumerate() {
            let k = thresholds.partition_point(|&t| (t as u64) < q);
            self.hist[k] += 1;
            if let Some(ps) = &mut self.per_sat_hist {
                ps[sat][k] += 1;
            }
            self.max_seen = self.max_seen.max(q);
        }
        self.samples += self.cfg.l as u64;
    }

    fn record_virtual(&mut self) {
        let qbar = self.vq as f64 / self.cfg.l as f64;
        let k = self.cfg.thresholds.partition_point(|&t| (t as f64) < qbar);
        // One sample per satellite per slot so counts are policy-comparable.
        self.hist[k] += self.cfg.l as u64;
        self.samples += self.cfg.l as u64;
        self.max_seen = self.max_seen.max(qbar.ceil() as u64);
    }

    /// Execute one slot: (MQLA) reallocate, measure if `record`, evolve
    /// queues, then step every channel chain.
    pub fn step(&mut self, record: bool) {
        let is_mqla = self.cfg.policy == PolicyKind::MqlaIsl;
        if is_mqla {
            if record && self.cfg.measure_epoch == MeasureEpoch::PreReallocation {
                self.record_per_satellite();
            }
            let total: u64 = self.state.q.iter().sum();
            let decision = mqla_allocate(total, &self.prev_states, &self.cfg.ch);
            self.state.q = decision.integer;
            if record && self.cfg.measure_epoch == MeasureEpoch::PostReallocation {
                self.record_per_satellite();
            }
        } else if record {
            match self.cfg.policy {
                PolicyKind::NoIsl => self.record_per_satellite(),
                PolicyKind::VirtualQueue => self.record_virtual(),
                PolicyKind::MqlaIsl => unreachable!(),
            }
        }

        // Evolve: arrivals, service at the current channel rate, clamps.
        match self.cfg.policy {
            PolicyKind::VirtualQueue => {
                let mut sum_a = 0u64;
                let mut sum_d = 0u64;
                for sat in 0..self.cfg.l as usize {
                    sum_a += self.sampler.sample(&mut self.arrival_rngs[sat]);
                    sum_d += self.state.channel[sat].rate(&self.cfg.ch) as u64;
                }
                if record {
                    self.arrived += sum_a;
                }
                let next = (self.vq as i64 + sum_a as i64 - sum_d as i64).max(0) as u64;
                self.vq = match self.cfg.q_max {
                    Some(cap) => {
                        let pooled_cap = cap as u64 * self.cfg.l as u64;
                        if next > pooled_cap {
                            if record {
                                self.dropped += next - pooled_cap;
                            }
                            pooled_cap
                        } else {
                            next
                        }
                    }
                    None => next,
                };
            }
            _ => {
                for sat in 0..self.cfg.l as usize {
                    let a = self.sampler.sample(&mut self.arrival_rngs[sat]);
                    if record {
                        self.arrived += a;
                    }
                    let d = self.state.channel[sat].rate(&self.cfg.ch) as u64;
                    let mut next =
                        (self.state.q[sat] as i64 + a as i64 - d as i64).max(0) as u64;
                    if let Some(cap) = self.cfg.q_max {
                        if next > cap as u64 {
                            if record {
                                self.dropped += next - cap as u64;
                            }
                            next = cap as u64;
                        }
                    }
                    self.state.q[sat] = next;
                }
            }
        }

        self.prev_states.copy_from_slice(&self.state.channel);
        for sat in 0..self.cfg.l as usize {
            self.state.channel[sat] = step_channel(
                self.state.channel[sat],
                &self.cfg.ch,
                &mut self.channel_rngs[sat],
            );
        }
    }

    pub fn into_stats(self) -> OverflowStats {
        let t = self.cfg.thresholds.len();
        // exceed[i] = measurements whose partition index exceeds i.
        let suffix = |h: &[u64]| -> Vec<u64> {
            (0..t)
                .map(|i| h[i + 1..].iter().sum::<u64>())
                .collect()
        };
        OverflowStats {
            exceed: suffix(&self.hist),
            per_satellite_exceed: self.per_sat_hist.as_ref().map(|ps| {
                ps.iter().map(|h| suffix(h)).collect()
            }),
            thresholds: self.cfg.thresholds,
            samples: self.samples,
            dropped_packets: self.dropped,
            arrived_packets: self.arrived,
            max_queue_seen: self.max_seen,
        }
    }
}

/// Run one replication to completion.
pub fn run_simulation(cfg: &ConstellationConfig) -> Result<OverflowStats, SimError> {
    let mut sim = Simulation::new(cfg)?;
    for t in 0..cfg.slots {
        sim.step(t >= cfg.warmup_slots);
    }
    Ok(sim.into_stats())
}
