//! Rayleigh-fading channel model and SINR evaluation.
//!
//! All links have equal path loss, so a power gain `|h|^2` is an Exp(1) draw.
//! Links between legitimate nodes (source, relays, destination) are
//! reciprocal: one draw serves both directions, which is what lets a relay use
//! a pilot from the receiver to decide whether it jams toward it. Links toward
//! eavesdroppers are directional and only exist from transmitting nodes.

use std::cmp::Ordering;
use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Whether SINR denominators carry the receiver noise term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseMode {
    /// `N0/2` is added to the interference.
    #[default]
    Exact,
    /// Noise is dropped; only jammer interference limits the SINR.
    InterferenceLimited,
}

impl fmt::Display for NoiseMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NoiseMode::Exact => "exact",
            NoiseMode::InterferenceLimited => "interference-limited",
        })
    }
}

/// Scenario parameters shared by every operation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    /// Candidate relays.
    pub n: usize,
    /// Eavesdroppers.
    pub m: usize,
    /// Decoding threshold of legitimate receivers.
    pub gamma_r: f64,
    /// Intercept threshold of eavesdroppers.
    pub gamma_e: f64,
    /// Transmit power of every node.
    pub es: f64,
    pub n0: f64,
    pub noise_mode: NoiseMode,
    /// Slots per channel epoch.
    pub coherence_len: usize,
    /// Secrecy outage budget.
    pub eps_s: f64,
    /// Transmission outage budget.
    pub eps_t: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            n: 10,
            m: 1,
            gamma_r: 1.0,
            gamma_e: 1.0,
            es: 1.0,
            n0: 1.0,
            noise_mode: NoiseMode::Exact,
            coherence_len: 1,
            eps_s: 0.1,
            eps_t: 0.1,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::config("n must be at least 1"));
        }
        if !(self.gamma_r > 0.0 && self.gamma_r.is_finite()) {
            return Err(Error::config("gamma_r must be finite and > 0"));
        }
        if !(self.gamma_e > 0.0 && self.gamma_e.is_finite()) {
            return Err(Error::config("gamma_e must be finite and > 0"));
        }
        if !(self.es > 0.0 && self.es.is_finite()) {
            return Err(Error::config("es must be finite and > 0"));
        }
        if !(self.n0 >= 0.0 && self.n0.is_finite()) {
            return Err(Error::config("n0 must be finite and >= 0"));
        }
        if self.coherence_len < 1 {
            return Err(Error::config("coherence_len must be at least 1"));
        }
        for (name, eps) in [("eps_s", self.eps_s), ("eps_t", self.eps_t)] {
            if !(0.0..=1.0).contains(&eps) {
                return Err(Error::config(format!("{name} must lie in [0, 1]")));
            }
        }
        Ok(())
    }

    /// Noise contribution to an SINR denominator.
    pub fn noise_term(&self) -> f64 {
        match self.noise_mode {
            NoiseMode::Exact => self.n0 / 2.0,
            NoiseMode::InterferenceLimited => 0.0,
        }
    }
}

/// A node in the two-hop network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Node {
    Source,
    Relay(usize),
    Destination,
    Eavesdropper(usize),
}

/// Received SINR.
///
/// `Unbounded` arises when the denominator is zero: no jammers and no noise.
/// It exceeds every finite threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sinr {
    Finite(f64),
    Unbounded,
}

impl Sinr {
    pub fn value(self) -> f64 {
        match self {
            Sinr::Finite(v) => v,
            Sinr::Unbounded => f64::INFINITY,
        }
    }

    pub fn is_unbounded(self) -> bool {
        matches!(self, Sinr::Unbounded)
    }

    /// Strictly above `threshold`: the legitimate decoding rule.
    pub fn exceeds(self, threshold: f64) -> bool {
        match self {
            Sinr::Finite(v) => v > threshold,
            Sinr::Unbounded => true,
        }
    }

    /// At or above `threshold`: the eavesdropper intercept rule.
    pub fn reaches(self, threshold: f64) -> bool {
        match self {
            Sinr::Finite(v) => v >= threshold,
            Sinr::Unbounded => true,
        }
    }
}

impl PartialOrd for Sinr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.value().partial_cmp(&other.value())
    }
}

/// One Exp(1) power-gain draw.
pub fn sample_gain<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    Exp1.sample(rng)
}

/// `Es * signal / (Es * sum(jammers) + noise)`.
pub fn sinr<I>(signal_gain: f64, jammer_gains: I, config: &ScenarioConfig) -> Sinr
where
    I: IntoIterator<Item = f64>,
{
    let interference: f64 = jammer_gains.into_iter().sum();
    let denominator = config.es * interference + config.noise_term();
    if denominator > 0.0 {
        Sinr::Finite(config.es * signal_gain / denominator)
    } else {
        Sinr::Unbounded
    }
}

/// Power gains of every link used by the protocols, for one coherence block.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    n: usize,
    m: usize,
    source_relay: Vec<f64>,
    /// Packed strict upper triangle, row-major over `j < k`.
    relay_relay: Vec<f64>,
    relay_dest: Vec<f64>,
    source_dest: f64,
    source_eve: Vec<f64>,
    /// Eavesdropper-major: `relay_eve[i * n + j]` is `R_j -> E_i`.
    relay_eve: Vec<f64>,
}

impl ChannelRealization {
    /// Realization with every gain set to `gain`; intended for hand-built cases.
    pub fn uniform(n: usize, m: usize, gain: f64) -> Self {
        assert!(n >= 1, "at least one relay is required");
        assert!(gain.is_finite() && gain >= 0.0);
        ChannelRealization {
            n,
            m,
            source_relay: vec![gain; n],
            relay_relay: vec![gain; n * (n - 1) / 2],
            relay_dest: vec![gain; n],
            source_dest: gain,
            source_eve: vec![gain; m],
            relay_eve: vec![gain; n * m],
        }
    }

    /// Draw a fresh realization for `config`.
    ///
    /// Eavesdropper gains are drawn last and one eavesdropper at a time, so a
    /// stream yields the same first `m` eavesdroppers whatever the total count.
    pub fn sample<R: Rng + ?Sized>(config: &ScenarioConfig, rng: &mut R) -> Self {
        let (n, m) = (config.n, config.m);
        assert!(n >= 1, "at least one relay is required");
        let mut draw =
            |count: usize| -> Vec<f64> { (0..count).map(|_| sample_gain(rng)).collect() };
        let source_relay = draw(n);
        let relay_relay = draw(n * (n - 1) / 2);
        let relay_dest = draw(n);
        let source_dest = draw(1)[0];
        let mut source_eve = Vec::with_capacity(m);
        let mut relay_eve = Vec::with_capacity(n * m);
        for _ in 0..m {
            source_eve.push(sample_gain(rng));
            relay_eve.extend((0..n).map(|_| sample_gain(rng)));
        }
        ChannelRealization {
            n,
            m,
            source_relay,
            relay_relay,
            relay_dest,
            source_dest,
            source_eve,
            relay_eve,
        }
    }

    pub fn relays(&self) -> usize {
        self.n
    }

    pub fn eavesdroppers(&self) -> usize {
        self.m
    }

    fn pair_slot(&self, j: usize, k: usize) -> usize {
        let (a, b) = if j < k { (j, k) } else { (k, j) };
        a * self.n - a * (a + 1) / 2 + (b - a - 1)
    }

    pub fn source_relay(&self, j: usize) -> f64 {
        self.source_relay[j]
    }

    pub fn relay_dest(&self, j: usize) -> f64 {
        self.relay_dest[j]
    }

    /// Gain between two distinct relays.
    pub fn relay_relay(&self, j: usize, k: usize) -> f64 {
        assert_ne!(j, k, "no self link");
        self.relay_relay[self.pair_slot(j, k)]
    }

    pub fn source_eve(&self, i: usize) -> f64 {
        self.source_eve[i]
    }

    pub fn relay_eve(&self, j: usize, i: usize) -> f64 {
        self.relay_eve[i * self.n + j]
    }

    pub fn source_dest(&self) -> f64 {
        self.source_dest
    }

    fn locate(&self, from: Node, to: Node) -> Option<Loc> {
        use Node::*;
        let (n, m) = (self.n, self.m);
        match (from, to) {
            (Source, Relay(j)) | (Relay(j), Source) if j < n => Some(Loc::SourceRelay(j)),
            (Relay(j), Destination) | (Destination, Relay(j)) if j < n => Some(Loc::RelayDest(j)),
            (Relay(j), Relay(k)) if j < n && k < n && j != k => {
                Some(Loc::RelayRelay(self.pair_slot(j, k)))
            }
            (Source, Destination) | (Destination, Source) => Some(Loc::SourceDest),
            (Source, Eavesdropper(i)) if i < m => Some(Loc::SourceEve(i)),
            (Relay(j), Eavesdropper(i)) if j < n && i < m => Some(Loc::RelayEve(i * n + j)),
            _ => None,
        }
    }

    /// Gain of the link `from -> to`, if the model defines one.
    pub fn gain(&self, from: Node, to: Node) -> Option<f64> {
        self.locate(from, to).map(|loc| match loc {
            Loc::SourceRelay(j) => self.source_relay[j],
            Loc::RelayDest(j) => self.relay_dest[j],
            Loc::RelayRelay(s) => self.relay_relay[s],
            Loc::SourceDest => self.source_dest,
            Loc::SourceEve(i) => self.source_eve[i],
            Loc::RelayEve(s) => self.relay_eve[s],
        })
    }

    /// Overwrite one gain. Reciprocal links are updated in both directions.
    pub fn set_gain(&mut self, from: Node, to: Node, gain: f64) -> Result<()> {
        if !(gain.is_finite() && gain >= 0.0) {
            return Err(Error::config(format!(
                "gain {gain} is not a finite non-negative value"
            )));
        }
        let loc = self.locate(from, to).ok_or_else(|| {
            Error::config(format!("no link {from:?} -> {to:?} in this realization"))
        })?;
        let slot = match loc {
            Loc::SourceRelay(j) => &mut self.source_relay[j],
            Loc::RelayDest(j) => &mut self.relay_dest[j],
            Loc::RelayRelay(s) => &mut self.relay_relay[s],
            Loc::SourceDest => &mut self.source_dest,
            Loc::SourceEve(i) => &mut self.source_eve[i],
            Loc::RelayEve(s) => &mut self.relay_eve[s],
        };
        *slot = gain;
        Ok(())
    }

    /// Every distinct stored link, one entry per draw.
    pub fn links(&self) -> Vec<(Node, Node, f64)> {
        use Node::*;
        let n = self.n;
        let mut out = Vec::new();
        for j in 0..n {
            out.push((Source, Relay(j), self.source_relay[j]));
        }
        for j in 0..n {
            for k in j + 1..n {
                out.push((Relay(j), Relay(k), self.relay_relay(j, k)));
            }
        }
        for j in 0..n {
            out.push((Relay(j), Destination, self.relay_dest[j]));
        }
        out.push((Source, Destination, self.source_dest));
        for i in 0..self.m {
            out.push((Source, Eavesdropper(i), self.source_eve[i]));
            for j in 0..n {
                out.push((Relay(j), Eavesdropper(i), self.relay_eve(j, i)));
            }
        }
        out
    }
}

enum Loc {
    SourceRelay(usize),
    RelayDest(usize),
    RelayRelay(usize),
    SourceDest,
    SourceEve(usize),
    RelayEve(usize),
}
