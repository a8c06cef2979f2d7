//! Replicated simulation of the two-hop protocols.
//!
//! Trial `i` draws its channel from `substream(seed, Channel, i)` and its
//! protocol decisions from `substream(seed, Selection, i)`, so any partition
//! of the trial indices across workers merges to the same integer counts.
//! All estimators are built from those counts.

use std::collections::BTreeMap;
use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{ChannelRealization, ScenarioConfig};
use crate::error::{Error, Result};
use crate::protocol::{
    classify_outage, run_legs, select_relay_optimal, select_relay_random, ProtocolChoice,
    ProtocolKind, ResolvedProtocol,
};
use crate::rng::{substream, Purpose};
use crate::stats::{chi_square_uniform, entropy, jain_index, CountMoments, Proportion};

pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 0x5eed_2011;

/// How the two hops of a trial see the channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingMode {
    /// Both hops use one realization, as the protocol runs in practice.
    #[default]
    Shared,
    /// Hop 2 gets its own independent realization.
    IndependentLegs,
}

/// Raw event counts; every estimate is derived from these.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct OutageCounts {
    pub trials: u64,
    pub t_hop1: u64,
    pub t_hop2: u64,
    pub t_e2e: u64,
    pub t_both: u64,
    pub s_hop1: u64,
    pub s_hop2: u64,
    pub s_e2e: u64,
    pub s_both: u64,
    /// Eavesdropper-trials observed (`trials * m`).
    pub eve_observations: u64,
    pub eve_intercepts_hop1: u64,
    pub eve_intercepts_hop2: u64,
    pub jammers_hop1: CountMoments,
    pub jammers_hop2: CountMoments,
}

impl OutageCounts {
    fn merge(&mut self, o: &OutageCounts) {
        self.trials += o.trials;
        self.t_hop1 += o.t_hop1;
        self.t_hop2 += o.t_hop2;
        self.t_e2e += o.t_e2e;
        self.t_both += o.t_both;
        self.s_hop1 += o.s_hop1;
        self.s_hop2 += o.s_hop2;
        self.s_e2e += o.s_e2e;
        self.s_both += o.s_both;
        self.eve_observations += o.eve_observations;
        self.eve_intercepts_hop1 += o.eve_intercepts_hop1;
        self.eve_intercepts_hop2 += o.eve_intercepts_hop2;
        self.jammers_hop1.merge(&o.jammers_hop1);
        self.jammers_hop2.merge(&o.jammers_hop2);
    }
}

/// Counts from a set of trial indices of one `(config, protocol, seed)` run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutageEstimate {
    pub config: ScenarioConfig,
    pub protocol: ProtocolChoice,
    pub tau: f64,
    pub sampling: SamplingMode,
    pub seed: u64,
    /// Half-open trial-index ranges covered, sorted and coalesced.
    pub ranges: Vec<(u64, u64)>,
    pub counts: OutageCounts,
}

impl OutageEstimate {
    pub fn trials(&self) -> u64 {
        self.counts.trials
    }

    pub fn p_t_hop1(&self) -> Proportion {
        Proportion::wilson(self.counts.t_hop1, self.counts.trials)
    }

    pub fn p_t_hop2(&self) -> Proportion {
        Proportion::wilson(self.counts.t_hop2, self.counts.trials)
    }

    pub fn p_t_e2e(&self) -> Proportion {
        Proportion::wilson(self.counts.t_e2e, self.counts.trials)
    }

    pub fn p_s_hop1(&self) -> Proportion {
        Proportion::wilson(self.counts.s_hop1, self.counts.trials)
    }

    pub fn p_s_hop2(&self) -> Proportion {
        Proportion::wilson(self.counts.s_hop2, self.counts.trials)
    }

    pub fn p_s_e2e(&self) -> Proportion {
        Proportion::wilson(self.counts.s_e2e, self.counts.trials)
    }

    /// Per-eavesdropper hop-1 intercept frequency, pooled over eavesdroppers.
    pub fn p_eve_single_hop1(&self) -> Proportion {
        Proportion::wilson(
            self.counts.eve_intercepts_hop1,
            self.counts.eve_observations,
        )
    }

    pub fn p_eve_single_hop2(&self) -> Proportion {
        Proportion::wilson(
            self.counts.eve_intercepts_hop2,
            self.counts.eve_observations,
        )
    }

    pub fn summary(&self) -> OutageSummary {
        let c = &self.counts;
        OutageSummary {
            trials: c.trials,
            seed: self.seed,
            tau: self.tau,
            sampling: self.sampling,
            p_t_hop1: self.p_t_hop1(),
            p_t_hop2: self.p_t_hop2(),
            p_t_e2e: self.p_t_e2e(),
            p_s_hop1: self.p_s_hop1(),
            p_s_hop2: self.p_s_hop2(),
            p_s_e2e: self.p_s_e2e(),
            p_eve_single_hop1: self.p_eve_single_hop1(),
            p_eve_single_hop2: self.p_eve_single_hop2(),
            mean_jammers_hop1: c.jammers_hop1.mean(),
            se_jammers_hop1: c.jammers_hop1.std_error(),
            mean_jammers_hop2: c.jammers_hop2.mean(),
            se_jammers_hop2: c.jammers_hop2.std_error(),
            t_hop_correlation: phi(c.trials, c.t_hop1, c.t_hop2, c.t_both),
            s_hop_correlation: phi(c.trials, c.s_hop1, c.s_hop2, c.s_both),
        }
    }
}

/// Phi coefficient of two binary events; `None` if either is degenerate.
fn phi(n: u64, a: u64, b: u64, both: u64) -> Option<f64> {
    let (n, a, b, both) = (n as f64, a as f64, b as f64, both as f64);
    let denom = (a * (n - a) * b * (n - b)).sqrt();
    (denom > 0.0).then(|| (n * both - a * b) / denom)
}

/// Serializable view of an estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutageSummary {
    pub trials: u64,
    pub seed: u64,
    pub tau: f64,
    pub sampling: SamplingMode,
    pub p_t_hop1: Proportion,
    pub p_t_hop2: Proportion,
    pub p_t_e2e: Proportion,
    pub p_s_hop1: Proportion,
    pub p_s_hop2: Proportion,
    pub p_s_e2e: Proportion,
    pub p_eve_single_hop1: Proportion,
    pub p_eve_single_hop2: Proportion,
    pub mean_jammers_hop1: f64,
    pub se_jammers_hop1: f64,
    pub mean_jammers_hop2: f64,
    pub se_jammers_hop2: f64,
    /// Correlation between the hops' outage events; the combining rule
    /// assumes zero.
    pub t_hop_correlation: Option<f64>,
    pub s_hop_correlation: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimOptions {
    pub sampling: SamplingMode,
    /// Number of trial-index chunks run in parallel. Results do not depend on it.
    pub workers: usize,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            sampling: SamplingMode::Shared,
            workers: rayon::current_num_threads(),
        }
    }
}

/// Run the trials in `range` only.
pub fn estimate_range(
    config: &ScenarioConfig,
    protocol: &ProtocolChoice,
    sampling: SamplingMode,
    seed: u64,
    range: Range<u64>,
) -> Result<OutageEstimate> {
    config.validate()?;
    let resolved = protocol.resolve(config)?;
    let counts = count_range(config, &resolved, sampling, seed, range.clone());
    Ok(OutageEstimate {
        config: config.clone(),
        protocol: *protocol,
        tau: resolved.tau,
        sampling,
        seed,
        ranges: if range.is_empty() {
            vec![]
        } else {
            vec![(range.start, range.end)]
        },
        counts,
    })
}

fn count_range(
    config: &ScenarioConfig,
    protocol: &ResolvedProtocol,
    sampling: SamplingMode,
    seed: u64,
    range: Range<u64>,
) -> OutageCounts {
    let mut c = OutageCounts::default();
    for trial in range {
        let hop1 =
            ChannelRealization::sample(config, &mut substream(seed, Purpose::Channel, trial));
        let mut select = substream(seed, Purpose::Selection, trial);
        let record = match sampling {
            SamplingMode::Shared => run_legs(&hop1, &hop1, protocol, config, &mut select),
            SamplingMode::IndependentLegs => {
                let hop2 = ChannelRealization::sample(
                    config,
                    &mut substream(seed, Purpose::ChannelHop2, trial),
                );
                run_legs(&hop1, &hop2, protocol, config, &mut select)
            }
        };
        let f = classify_outage(&record, config);
        c.trials += 1;
        c.t_hop1 += f.t_out_hop1 as u64;
        c.t_hop2 += f.t_out_hop2 as u64;
        c.t_e2e += f.t_out_e2e as u64;
        c.t_both += (f.t_out_hop1 && f.t_out_hop2) as u64;
        c.s_hop1 += f.s_out_hop1 as u64;
        c.s_hop2 += f.s_out_hop2 as u64;
        c.s_e2e += f.s_out_e2e as u64;
        c.s_both += (f.s_out_hop1 && f.s_out_hop2) as u64;
        c.eve_observations += config.m as u64;
        c.eve_intercepts_hop1 += record
            .sinr_eves_hop1
            .iter()
            .filter(|s| s.reaches(config.gamma_e))
            .count() as u64;
        c.eve_intercepts_hop2 += record
            .sinr_eves_hop2
            .iter()
            .filter(|s| s.reaches(config.gamma_e))
            .count() as u64;
        c.jammers_hop1.push(record.jammers_hop1.len() as u64);
        c.jammers_hop2.push(record.jammers_hop2.len() as u64);
    }
    c
}

/// Split `0..trials` into `workers` contiguous chunks.
pub fn partition(trials: u64, workers: usize) -> Vec<Range<u64>> {
    let workers = workers.max(1) as u64;
    let base = trials / workers;
    let extra = trials % workers;
    let mut start = 0;
    (0..workers)
        .map(|w| {
            let len = base + u64::from(w < extra);
            let r = start..start + len;
            start += len;
            r
        })
        .filter(|r| !r.is_empty())
        .collect()
}

pub fn estimate_outage_with(
    config: &ScenarioConfig,
    protocol: &ProtocolChoice,
    trials: u64,
    seed: u64,
    options: SimOptions,
) -> Result<OutageEstimate> {
    if trials < 1 {
        return Err(Error::config("trials must be at least 1"));
    }
    // resolve before spawning so infeasibility surfaces once, before any trial
    config.validate()?;
    protocol.resolve(config)?;
    let parts = partition(trials, options.workers)
        .into_par_iter()
        .map(|r| estimate_range(config, protocol, options.sampling, seed, r))
        .collect::<Result<Vec<_>>>()?;
    merge_estimates(parts)
}

/// Shared-realization estimate over `0..trials`.
pub fn estimate_outage(
    config: &ScenarioConfig,
    protocol: &ProtocolChoice,
    trials: u64,
    seed: u64,
) -> Result<OutageEstimate> {
    estimate_outage_with(config, protocol, trials, seed, SimOptions::default())
}

/// Pool estimates computed on disjoint trial ranges of one run.
pub fn merge_estimates(parts: Vec<OutageEstimate>) -> Result<OutageEstimate> {
    let mut iter = parts.into_iter();
    let mut merged = iter
        .next()
        .ok_or_else(|| Error::Merge("nothing to merge".into()))?;
    for part in iter {
        if part.config != merged.config
            || part.protocol != merged.protocol
            || part.sampling != merged.sampling
            || part.seed != merged.seed
            || part.tau.to_bits() != merged.tau.to_bits()
        {
            return Err(Error::Merge("parts come from different runs".into()));
        }
        merged.counts.merge(&part.counts);
        merged.ranges.extend(part.ranges);
    }
    merged.ranges.sort_unstable();
    let mut coalesced: Vec<(u64, u64)> = Vec::with_capacity(merged.ranges.len());
    for (lo, hi) in merged.ranges.drain(..) {
        match coalesced.last_mut() {
            Some(last) if lo < last.1 => {
                return Err(Error::Merge(format!("trial ranges overlap at index {lo}")));
            }
            Some(last) if lo == last.1 => last.1 = hi,
            _ => coalesced.push((lo, hi)),
        }
    }
    merged.ranges = coalesced;
    Ok(merged)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToleranceProbe {
    pub m: usize,
    /// `None` when the tau policy is infeasible at this `m`.
    pub p_s_e2e: Option<Proportion>,
    pub passes: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToleranceResult {
    /// Largest tolerated eavesdropper count, 0 if even one is too many.
    pub m_max: usize,
    pub none_tolerated: bool,
    pub eps_s: f64,
    pub m_cap: usize,
    pub probes: Vec<ToleranceProbe>,
}

/// Largest `m <= m_cap` whose secrecy outage upper confidence limit stays
/// within `eps_s`, by doubling then bisection.
///
/// Every probe reuses `seed`. Eavesdropper gains are drawn after the
/// legitimate links, so adding eavesdroppers never changes the existing ones
/// and the secrecy outage indicator is monotone in `m` trial by trial.
pub fn tolerance_search(
    config: &ScenarioConfig,
    protocol: &ProtocolChoice,
    eps_s: f64,
    trials: u64,
    m_cap: usize,
    seed: u64,
    options: SimOptions,
) -> Result<ToleranceResult> {
    if m_cap < 1 {
        return Err(Error::config("m_cap must be at least 1"));
    }
    if !(0.0..=1.0).contains(&eps_s) {
        return Err(Error::config("eps_s must lie in [0, 1]"));
    }
    let mut probes: BTreeMap<usize, ToleranceProbe> = BTreeMap::new();
    let mut check = |m: usize| -> Result<bool> {
        if let Some(p) = probes.get(&m) {
            return Ok(p.passes);
        }
        let cfg = ScenarioConfig {
            m,
            ..config.clone()
        };
        let probe = match estimate_outage_with(&cfg, protocol, trials, seed, options) {
            Ok(est) => {
                let p = est.p_s_e2e();
                ToleranceProbe {
                    m,
                    p_s_e2e: Some(p),
                    passes: p.ci_hi <= eps_s,
                }
            }
            Err(Error::Infeasible(_)) => ToleranceProbe {
                m,
                p_s_e2e: None,
                passes: false,
            },
            Err(e) => return Err(e),
        };
        let passes = probe.passes;
        probes.insert(m, probe);
        Ok(passes)
    };

    let m_max = if !check(1)? {
        0
    } else {
        let mut good = 1;
        let mut bad = None;
        let mut m = 2;
        while m <= m_cap {
            if check(m)? {
                good = m;
                m *= 2;
            } else {
                bad = Some(m);
                break;
            }
        }
        if bad.is_none() && good < m_cap {
            if check(m_cap)? {
                good = m_cap;
            } else {
                bad = Some(m_cap);
            }
        }
        if let Some(mut bad) = bad {
            while bad - good > 1 {
                let mid = good + (bad - good) / 2;
                if check(mid)? {
                    good = mid;
                } else {
                    bad = mid;
                }
            }
        }
        good
    };

    Ok(ToleranceResult {
        m_max,
        none_tolerated: m_max == 0,
        eps_s,
        m_cap,
        probes: probes.into_values().collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadBalanceStats {
    pub selection_counts: Vec<u64>,
    pub jain_index: f64,
    /// Nats.
    pub entropy: f64,
    pub chi_square: f64,
    pub chi_square_p: f64,
    pub slots: u64,
    pub epochs: u64,
    pub coherence_len: usize,
}

/// Relay selected in each slot. The channel is redrawn every
/// `coherence_len` slots; the relay is reselected every slot.
pub fn selection_trace(
    config: &ScenarioConfig,
    kind: ProtocolKind,
    slots: u64,
    seed: u64,
) -> Result<Vec<usize>> {
    config.validate()?;
    if slots < 1 {
        return Err(Error::config("slots must be at least 1"));
    }
    let len = config.coherence_len as u64;
    let epochs = slots.div_ceil(len);
    // only the selection-relevant links matter here
    let cfg = ScenarioConfig {
        m: 0,
        ..config.clone()
    };
    let per_epoch: Vec<Vec<usize>> = (0..epochs)
        .into_par_iter()
        .map(|e| {
            let first = e * len;
            let last = (first + len).min(slots);
            match kind {
                ProtocolKind::OptimalMaxmin => {
                    let real =
                        ChannelRealization::sample(&cfg, &mut substream(seed, Purpose::Channel, e));
                    vec![select_relay_optimal(&real); (last - first) as usize]
                }
                ProtocolKind::RandomUniform => (first..last)
                    .map(|s| {
                        select_relay_random(cfg.n, &mut substream(seed, Purpose::Selection, s))
                    })
                    .collect(),
            }
        })
        .collect();
    Ok(per_epoch.concat())
}

pub fn load_balance(
    config: &ScenarioConfig,
    protocol: &ProtocolChoice,
    slots: u64,
    seed: u64,
) -> Result<LoadBalanceStats> {
    let trace = selection_trace(config, protocol.kind, slots, seed)?;
    let mut counts = vec![0u64; config.n];
    for &j in &trace {
        counts[j] += 1;
    }
    let (chi_square, chi_square_p) = chi_square_uniform(&counts);
    Ok(LoadBalanceStats {
        jain_index: jain_index(&counts),
        entropy: entropy(&counts),
        chi_square,
        chi_square_p,
        selection_counts: counts,
        slots,
        epochs: slots.div_ceil(config.coherence_len as u64),
        coherence_len: config.coherence_len,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::NoiseMode;
    use crate::protocol::TauPolicy;

    fn il(n: usize, m: usize) -> ScenarioConfig {
        ScenarioConfig {
            n,
            m,
            noise_mode: NoiseMode::InterferenceLimited,
            ..Default::default()
        }
    }

    #[test]
    fn partition_covers_everything() {
        let parts = partition(10, 4);
        assert_eq!(parts, vec![0..3, 3..6, 6..8, 8..10]);
        assert_eq!(partition(2, 5), vec![0..1, 1..2]);
    }

    #[test]
    fn no_eavesdroppers_no_secrecy_outage() {
        let cfg = ScenarioConfig {
            n: 6,
            m: 0,
            ..Default::default()
        };
        let choice = ProtocolChoice::manual(ProtocolKind::RandomUniform, 0.5);
        let est = estimate_outage(&cfg, &choice, 2_000, 1).unwrap();
        assert_eq!(est.counts.s_e2e, 0);
        assert_eq!(est.p_s_e2e().estimate, 0.0);
    }

    #[test]
    fn tiny_gamma_r_never_fails_in_exact_mode() {
        let cfg = ScenarioConfig {
            n: 6,
            m: 1,
            gamma_r: 1e-300,
            ..Default::default()
        };
        for kind in [ProtocolKind::OptimalMaxmin, ProtocolKind::RandomUniform] {
            let est = estimate_outage(&cfg, &ProtocolChoice::manual(kind, 0.5), 5_000, 2).unwrap();
            assert_eq!(est.counts.t_e2e, 0);
        }
    }

    #[test]
    fn e2e_counts_follow_or_rule() {
        let cfg = il(7, 2);
        let est = estimate_outage(
            &cfg,
            &ProtocolChoice::manual(ProtocolKind::RandomUniform, 0.4),
            5_000,
            3,
        )
        .unwrap();
        let c = est.counts;
        assert_eq!(c.t_e2e, c.t_hop1 + c.t_hop2 - c.t_both);
        assert_eq!(c.s_e2e, c.s_hop1 + c.s_hop2 - c.s_both);
    }

    #[test]
    fn worker_count_does_not_matter() {
        let cfg = il(9, 2);
        let choice = ProtocolChoice::manual(ProtocolKind::OptimalMaxmin, 0.3);
        let one = estimate_outage_with(
            &cfg,
            &choice,
            3_001,
            5,
            SimOptions {
                workers: 1,
                ..Default::default()
            },
        )
        .unwrap();
        let seven = estimate_outage_with(
            &cfg,
            &choice,
            3_001,
            5,
            SimOptions {
                workers: 7,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(one, seven);
    }

    #[test]
    fn merge_identity_and_commutativity() {
        let cfg = il(5, 1);
        let choice = ProtocolChoice::manual(ProtocolKind::RandomUniform, 0.2);
        let run = |r| estimate_range(&cfg, &choice, SamplingMode::Shared, 9, r).unwrap();
        let a = run(0..400);
        let b = run(400..1000);
        assert_eq!(merge_estimates(vec![a.clone()]).unwrap(), a);
        assert_eq!(
            merge_estimates(vec![a.clone(), b.clone()]).unwrap(),
            merge_estimates(vec![b.clone(), a.clone()]).unwrap()
        );
        assert_eq!(merge_estimates(vec![a.clone(), b]).unwrap(), run(0..1000));
        assert!(matches!(
            merge_estimates(vec![a.clone(), a.clone()]),
            Err(Error::Merge(_))
        ));
        let other = estimate_range(&cfg, &choice, SamplingMode::Shared, 10, 400..500).unwrap();
        assert!(matches!(
            merge_estimates(vec![a, other]),
            Err(Error::Merge(_))
        ));
    }

    #[test]
    fn infeasible_policy_reported_up_front() {
        let cfg = ScenarioConfig {
            n: 2,
            m: 10,
            ..Default::default()
        };
        let choice = ProtocolChoice::new(ProtocolKind::RandomUniform, TauPolicy::Theorem2Min);
        assert!(matches!(
            estimate_outage(&cfg, &choice, 10, 0),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn tolerance_search_edges() {
        let cfg = il(5, 1);
        let opts = SimOptions::default();
        // no jamming: every eavesdropper intercepts
        let none = ProtocolChoice::manual(ProtocolKind::RandomUniform, 0.0);
        let r = tolerance_search(&cfg, &none, 0.1, 500, 8, 1, opts).unwrap();
        assert_eq!(r.m_max, 0);
        assert!(r.none_tolerated);
        let r = tolerance_search(&cfg, &none, 1.0, 500, 13, 1, opts).unwrap();
        assert_eq!(r.m_max, 13);
    }

    #[test]
    fn tolerance_search_matches_linear_scan() {
        let cfg = il(15, 1);
        let choice = ProtocolChoice::manual(ProtocolKind::RandomUniform, 0.8);
        let opts = SimOptions::default();
        let (eps, trials, cap) = (0.2, 2_000, 40);
        let r = tolerance_search(&cfg, &choice, eps, trials, cap, 4, opts).unwrap();
        let scan = (1..=cap)
            .take_while(|&m| {
                let c = ScenarioConfig { m, ..cfg.clone() };
                estimate_outage(&c, &choice, trials, 4)
                    .unwrap()
                    .p_s_e2e()
                    .ci_hi
                    <= eps
            })
            .last()
            .unwrap_or(0);
        assert_eq!(r.m_max, scan);
        assert!(r.m_max > 0 && r.m_max < cap, "{r:?}");
    }

    #[test]
    fn optimal_selection_constant_within_epoch() {
        let cfg = ScenarioConfig {
            n: 6,
            coherence_len: 10,
            ..Default::default()
        };
        let trace = selection_trace(&cfg, ProtocolKind::OptimalMaxmin, 95, 3).unwrap();
        assert_eq!(trace.len(), 95);
        for epoch in trace.chunks(10) {
            assert!(epoch.iter().all(|&j| j == epoch[0]));
        }
    }

    #[test]
    fn load_balance_counts_sum_to_slots() {
        let cfg = ScenarioConfig {
            n: 4,
            coherence_len: 3,
            ..Default::default()
        };
        let lb = load_balance(
            &cfg,
            &ProtocolChoice::manual(ProtocolKind::RandomUniform, 0.1),
            1000,
            8,
        )
        .unwrap();
        assert_eq!(lb.selection_counts.iter().sum::<u64>(), 1000);
        assert_eq!(lb.epochs, 334);
        let s: f64 = lb.selection_counts.iter().map(|&c| c as f64).sum();
        let s2: f64 = lb.selection_counts.iter().map(|&c| (c * c) as f64).sum();
        assert!((lb.jain_index - s * s / (4.0 * s2)).abs() < 1e-15);
    }
}
