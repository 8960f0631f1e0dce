//! Buffer-overflow analysis for LEO store-and-forward satellite constellations.
//!
//! Models each satellite as a slotted queue fed by Poisson arrivals and
//! drained through a two-state Markov (Gilbert-Elliott) feeder link, and
//! compares three buffer regimes: isolated buffers, an idealized pooled
//! virtual queue, and per-slot min-max packet reallocation over
//! inter-satellite links (MQLA-ISL). The analytical layer computes QoS
//! exponents from effective-bandwidth theory; the oracle layer provides exact
//! stationary laws and brute-force minimizers to validate both the simulator
//! and the closed-form allocator.

pub mod allocation;
pub mod effective_bandwidth;
pub mod experiments;
pub mod oracle;
pub mod rng;
pub mod simulator;
pub mod stochastic;

pub use allocation::{AllocationDecision, CaseTag, PolicyKind};
pub use effective_bandwidth::QosSolution;
pub use simulator::{ConstellationConfig, MeasureEpoch, OverflowStats, QueueStateVector};
pub use stochastic::{ChannelState, GilbertElliottParams, PoissonArrivalParams};
