//! Secure two-hop relaying with cooperative jamming.
//!
//! A source reaches its destination through one of `n` relays while `m`
//! passive eavesdroppers listen. Relays that are not forwarding transmit noise
//! when their channel toward the current receiver is weak, which degrades the
//! eavesdroppers without drowning the legitimate link.
//!
//! The crate provides the Rayleigh-fading channel model ([`channel`]), the
//! two relay-selection protocols ([`protocol`]), closed-form tolerance bounds
//! ([`bounds`]), a deterministic parallel Monte Carlo engine ([`montecarlo`])
//! and the command-line harness ([`harness`]).

pub mod bounds;
pub mod channel;
pub mod error;
pub mod harness;
pub mod montecarlo;
pub mod protocol;
pub mod rng;
pub mod stats;

pub use bounds::{BoundInputs, BoundReport, Infeasibility, TauRange, Tolerance};
pub use channel::{ChannelRealization, Node, NoiseMode, ScenarioConfig, Sinr};
pub use error::{Error, Result};
pub use montecarlo::{
    estimate_outage, estimate_outage_with, load_balance, merge_estimates, tolerance_search,
    LoadBalanceStats, OutageEstimate, SamplingMode, SimOptions,
};
pub use protocol::{OutageFlags, ProtocolChoice, ProtocolKind, TauPolicy, TransmissionRecord};
