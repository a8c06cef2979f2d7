//! Closed-form eavesdropper-tolerance bounds and their intermediate terms.
//!
//! All logarithms are natural. Bounds that exceed one are returned as is and
//! flagged rather than clamped, so sweeps show where an expression stops
//! carrying information.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::protocol::tau_protocol1;

/// Per-hop outage allowance `1 - sqrt(1 - eps)` under the `2p - p^2` combining rule.
pub fn per_leg_budget(eps: f64) -> f64 {
    1.0 - (1.0 - eps).sqrt()
}

/// End-to-end outage of two independent legs.
pub fn combine_legs(p1: f64, p2: f64) -> f64 {
    1.0 - (1.0 - p1) * (1.0 - p2)
}

/// Mean jammer count `(n - 1)(1 - e^{-tau})`.
pub fn expected_jammers(n: usize, tau: f64) -> f64 {
    (n as f64 - 1.0) * -(-tau).exp_m1()
}

/// Hop transmission outage bound `1 - exp(-gamma_r (n-1)(1-e^{-tau}) tau)`.
pub fn reliability_leg_bound(n: usize, gamma_r: f64, tau: f64) -> f64 {
    -(-gamma_r * expected_jammers(n, tau) * tau).exp_m1()
}

/// Hop secrecy outage bound `m (1/(1+gamma_e))^{(n-1)(1-e^{-tau})}`.
///
/// Can exceed one; see [`is_vacuous`].
pub fn secrecy_leg_bound(n: usize, m: usize, gamma_e: f64, tau: f64) -> f64 {
    m as f64 * (-expected_jammers(n, tau) * gamma_e.ln_1p()).exp()
}

pub fn is_vacuous(bound: f64) -> bool {
    bound > 1.0
}

/// Exact single-eavesdropper intercept probability with interference-limited
/// SINR: `E[(1/(1+gamma_e))^K]` for `K ~ Binomial(n-1, 1-e^{-tau})`.
///
/// This is the binomial generating function evaluated in closed form. It is
/// an oracle for simulation, not one of the published bounds.
pub fn eve_intercept_exact(n: usize, gamma_e: f64, tau: f64) -> f64 {
    let stay_silent = (-tau).exp();
    let jam = -(-tau).exp_m1();
    (stay_silent + jam / (1.0 + gamma_e)).powf(n as f64 - 1.0)
}

/// A real-valued tolerance and the largest integer `m` satisfying it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub bound: f64,
    pub floor: u64,
}

impl Tolerance {
    fn from_bound(bound: f64) -> Self {
        let floor = if bound.is_nan() || bound <= 0.0 {
            0
        } else if bound >= u64::MAX as f64 {
            u64::MAX
        } else {
            bound.floor() as u64
        };
        Tolerance { bound, floor }
    }
}

/// Tolerable eavesdroppers under optimal max-min relaying:
/// `(1 - sqrt(1-eps_s)) (1+gamma_e)^{sqrt(n ln n / (32 gamma_r))}`.
pub fn theorem1_m_max(n: usize, gamma_r: f64, gamma_e: f64, eps_s: f64) -> Tolerance {
    let nf = n as f64;
    let exponent = (nf * nf.ln() / (32.0 * gamma_r)).sqrt();
    Tolerance::from_bound(per_leg_budget(eps_s) * (exponent * gamma_e.ln_1p()).exp())
}

/// Tolerable eavesdroppers under random relaying:
/// `(1 - sqrt(1-eps_s)) (1+gamma_e)^{sqrt(-(n-1) ln(1-eps_t) / (2 gamma_r))}`.
pub fn theorem3_m_max(n: usize, gamma_r: f64, gamma_e: f64, eps_s: f64, eps_t: f64) -> Tolerance {
    let exponent = (-(n as f64 - 1.0) * (-eps_t).ln_1p() / (2.0 * gamma_r)).sqrt();
    Tolerance::from_bound(per_leg_budget(eps_s) * (exponent * gamma_e.ln_1p()).exp())
}

/// Argument of the outer logarithm in the lower `tau` limit:
/// `1 + ln(budget / m) / ((n-1) ln(1+gamma_e))`.
pub fn theorem2_bracket(n: usize, m: f64, gamma_e: f64, eps_s: f64) -> f64 {
    let ratio = per_leg_budget(eps_s) / m;
    1.0 + ratio.ln() / ((n as f64 - 1.0) * gamma_e.ln_1p())
}

/// Smallest `tau` meeting the secrecy budget, `None` when no `tau` can.
///
/// `m` is real so the boundary case `m = budget` can be evaluated. With
/// `m <= budget` even a silent network meets the budget and the limit is 0.
pub fn theorem2_tau_min(n: usize, m: f64, gamma_e: f64, eps_s: f64) -> Option<f64> {
    if m <= per_leg_budget(eps_s) {
        return Some(0.0);
    }
    if n < 2 {
        return None;
    }
    let bracket = theorem2_bracket(n, m, gamma_e, eps_s);
    (bracket > 0.0).then(|| -bracket.ln())
}

/// Largest `tau` meeting the reliability budget, `sqrt(-ln(1-eps_t) / (2 gamma_r (n-1)))`.
pub fn theorem2_tau_max(n: usize, gamma_r: f64, eps_t: f64) -> f64 {
    (-(-eps_t).ln_1p() / (2.0 * gamma_r * (n as f64 - 1.0))).sqrt()
}

/// Why no jamming threshold satisfies both budgets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Infeasibility {
    /// A single relay leaves nobody to jam.
    NoJammers,
    /// Even all relays jamming cannot suppress `m` eavesdroppers.
    Unsuppressible { bracket: f64 },
    /// The secrecy limit lies above the reliability limit.
    EmptyInterval { tau_min: f64, tau_max: f64 },
}

impl fmt::Display for Infeasibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Infeasibility::NoJammers => write!(f, "n < 2 leaves no relay to jam"),
            Infeasibility::Unsuppressible { bracket } => {
                write!(f, "secrecy limit undefined: log argument {bracket} <= 0")
            }
            Infeasibility::EmptyInterval { tau_min, tau_max } => {
                write!(f, "tau_min {tau_min} exceeds tau_max {tau_max}")
            }
        }
    }
}

/// Feasible `tau` interval for random relaying.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauRange {
    pub tau_min: Option<f64>,
    pub tau_max: Option<f64>,
    pub infeasible: Option<Infeasibility>,
}

impl TauRange {
    pub fn is_feasible(&self) -> bool {
        self.infeasible.is_none()
    }

    pub fn interval(&self) -> Result<(f64, f64), Infeasibility> {
        match (self.infeasible, self.tau_min, self.tau_max) {
            (None, Some(lo), Some(hi)) => Ok((lo, hi)),
            (Some(why), _, _) => Err(why),
            _ => unreachable!("feasible range always carries both limits"),
        }
    }
}

pub fn theorem2_tau_range(
    n: usize,
    m: usize,
    gamma_r: f64,
    gamma_e: f64,
    eps_s: f64,
    eps_t: f64,
) -> TauRange {
    if n < 2 {
        return TauRange {
            tau_min: None,
            tau_max: None,
            infeasible: Some(Infeasibility::NoJammers),
        };
    }
    let tau_max = theorem2_tau_max(n, gamma_r, eps_t);
    match theorem2_tau_min(n, m as f64, gamma_e, eps_s) {
        None => TauRange {
            tau_min: None,
            tau_max: Some(tau_max),
            infeasible: Some(Infeasibility::Unsuppressible {
                bracket: theorem2_bracket(n, m as f64, gamma_e, eps_s),
            }),
        },
        Some(tau_min) if tau_min > tau_max => TauRange {
            tau_min: Some(tau_min),
            tau_max: Some(tau_max),
            infeasible: Some(Infeasibility::EmptyInterval { tau_min, tau_max }),
        },
        Some(tau_min) => TauRange {
            tau_min: Some(tau_min),
            tau_max: Some(tau_max),
            infeasible: None,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub n: usize,
    pub m: usize,
    pub gamma_r: f64,
    pub gamma_e: f64,
    pub eps_s: f64,
    pub eps_t: f64,
}

/// Every closed-form quantity for one parameter set.
///
/// The per-hop intermediate terms are evaluated at `tau_eval`: the upper end
/// of the feasible interval when defined, otherwise the max-min relaying
/// formula.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub inputs: BoundInputs,
    pub m_max_theorem1: Tolerance,
    pub m_max_theorem3: Tolerance,
    pub tau_interval: TauRange,
    pub tau_protocol1: f64,
    pub per_leg_budget_t: f64,
    pub per_leg_budget_s: f64,
    pub tau_eval: f64,
    pub expected_jammers: f64,
    pub reliability_leg_bound: f64,
    pub secrecy_leg_bound: f64,
    pub secrecy_leg_bound_vacuous: bool,
    /// Exact binomial value, reported next to the bound it is compared with.
    pub oracle_eve_intercept_exact: f64,
}

impl BoundReport {
    pub fn compute(inputs: BoundInputs) -> Self {
        let BoundInputs {
            n,
            m,
            gamma_r,
            gamma_e,
            eps_s,
            eps_t,
        } = inputs;
        let tau_interval = theorem2_tau_range(n, m, gamma_r, gamma_e, eps_s, eps_t);
        let tau_p1 = tau_protocol1(n, gamma_r);
        let tau_eval = tau_interval
            .tau_max
            .filter(|t| t.is_finite())
            .unwrap_or(tau_p1);
        let secrecy = secrecy_leg_bound(n, m, gamma_e, tau_eval);
        BoundReport {
            inputs,
            m_max_theorem1: theorem1_m_max(n, gamma_r, gamma_e, eps_s),
            m_max_theorem3: theorem3_m_max(n, gamma_r, gamma_e, eps_s, eps_t),
            tau_interval,
            tau_protocol1: tau_p1,
            per_leg_budget_t: per_leg_budget(eps_t),
            per_leg_budget_s: per_leg_budget(eps_s),
            tau_eval,
            expected_jammers: expected_jammers(n, tau_eval),
            reliability_leg_bound: reliability_leg_bound(n, gamma_r, tau_eval),
            secrecy_leg_bound: secrecy,
            secrecy_leg_bound_vacuous: is_vacuous(secrecy),
            oracle_eve_intercept_exact: eve_intercept_exact(n, gamma_e, tau_eval),
        }
    }
}
