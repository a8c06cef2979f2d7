//! Self-check suite run by the `validate` subcommand.
//!
//! Each check compares a simulated quantity with an exact or closed-form
//! reference at a tolerance stated alongside the result.

use serde::{Deserialize, Serialize};

use crate::bounds::{combine_legs, eve_intercept_exact, expected_jammers};
use crate::channel::{sample_gain, NoiseMode, ScenarioConfig};
use crate::error::Result;
use crate::montecarlo::{estimate_outage_with, SamplingMode, SimOptions};
use crate::protocol::{ProtocolChoice, ProtocolKind};
use crate::rng::{substream, Purpose};
use crate::stats::Z95;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidateOptions {
    pub quick: bool,
    pub seed: u64,
    pub workers: usize,
    /// Evaluate the intercept oracle at this threshold instead of the one
    /// simulated. Only useful to prove that the suite can fail.
    pub inject_gamma_e: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub reference: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: impl Into<String>, observed: f64, reference: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            observed,
            reference,
            tolerance,
            passed: (observed - reference).abs() <= tolerance,
        }
    }

    fn at_least(name: impl Into<String>, observed: f64, reference: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            observed,
            reference,
            tolerance,
            passed: observed >= reference - tolerance,
        }
    }

    /// One-sided: `observed <= reference + tolerance`.
    fn at_most(name: impl Into<String>, observed: f64, reference: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            observed,
            reference,
            tolerance,
            passed: observed <= reference + tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub quick: bool,
    pub seed: u64,
    pub trials: u64,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn il_config(n: usize, m: usize, gamma_e: f64) -> ScenarioConfig {
    ScenarioConfig {
        n,
        m,
        gamma_e,
        noise_mode: NoiseMode::InterferenceLimited,
        ..Default::default()
    }
}

pub fn run_validation(opts: &ValidateOptions) -> Result<ValidationReport> {
    let trials: u64 = if opts.quick { 10_000 } else { 100_000 };
    let mgf_samples: u64 = if opts.quick { 100_000 } else { 1_000_000 };
    let sim = |sampling| SimOptions {
        sampling,
        workers: opts.workers,
    };
    let random = |tau| ProtocolChoice::manual(ProtocolKind::RandomUniform, tau);
    let mut checks = Vec::new();

    // E[exp(-g X)] = 1/(1+g) for X ~ Exp(1)
    for (k, g) in [0.5, 1.0, 2.0].into_iter().enumerate() {
        let mut rng = substream(opts.seed, Purpose::Auxiliary, k as u64);
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for _ in 0..mgf_samples {
            let v = (-g * sample_gain(&mut rng)).exp();
            sum += v;
            sum_sq += v * v;
        }
        let n = mgf_samples as f64;
        let mean = sum / n;
        let se = ((sum_sq / n - mean * mean) * n / (n - 1.0) / n).sqrt();
        checks.push(Check::new(
            format!("mgf_identity gamma={g}"),
            mean,
            1.0 / (1.0 + g),
            3.0 * se,
        ));
    }

    // |R1| ~ Binomial(n-1, 1-e^-tau)
    for (n, tau) in [(11usize, 0.1), (101, 0.05)] {
        let est = estimate_outage_with(
            &il_config(n, 0, 1.0),
            &random(tau),
            trials,
            opts.seed,
            sim(SamplingMode::Shared),
        )?;
        let j = est.counts.jammers_hop1;
        checks.push(Check::new(
            format!("jammer_count n={n} tau={tau}"),
            j.mean(),
            expected_jammers(n, tau),
            3.0 * j.std_error(),
        ));
    }

    // single-eavesdropper intercept against the binomial closed form
    let gamma_e = 1.0;
    let oracle_gamma_e = opts.inject_gamma_e.unwrap_or(gamma_e);
    for tau in [0.1, 1.0] {
        let est = estimate_outage_with(
            &il_config(11, 1, gamma_e),
            &random(tau),
            trials,
            opts.seed,
            sim(SamplingMode::Shared),
        )?;
        let p = est.p_eve_single_hop1();
        let exact = eve_intercept_exact(11, oracle_gamma_e, tau);
        let half = if exact < p.estimate {
            p.estimate - p.ci_lo
        } else {
            p.ci_hi - p.estimate
        };
        checks.push(Check::new(
            format!("eve_intercept_exact n=11 tau={tau}"),
            p.estimate,
            exact,
            half,
        ));
    }

    // union bound over eavesdroppers
    for m in [1usize, 2, 5] {
        let est = estimate_outage_with(
            &il_config(11, m, gamma_e),
            &random(1.0),
            trials,
            opts.seed,
            sim(SamplingMode::Shared),
        )?;
        let s = est.p_s_hop1();
        let single = est.p_eve_single_hop1();
        let slack = 3.0 * (s.std_error().powi(2) + (m as f64 * single.std_error()).powi(2)).sqrt();
        checks.push(Check::at_most(
            format!("union_bound m={m}"),
            s.estimate,
            m as f64 * single.estimate,
            slack,
        ));
    }

    // leg combining with independently drawn hops
    let cfg = ScenarioConfig {
        eps_s: 0.3,
        eps_t: 0.3,
        ..il_config(21, 2, gamma_e)
    };
    let est = estimate_outage_with(
        &cfg,
        &random(0.3),
        trials,
        opts.seed,
        sim(SamplingMode::IndependentLegs),
    )?;
    for (label, h1, h2, e2e) in [
        (
            "transmission",
            est.p_t_hop1(),
            est.p_t_hop2(),
            est.p_t_e2e(),
        ),
        ("secrecy", est.p_s_hop1(), est.p_s_hop2(), est.p_s_e2e()),
    ] {
        let combined = combine_legs(h1.estimate, h2.estimate);
        let se_combined = (((1.0 - h2.estimate) * h1.std_error()).powi(2)
            + ((1.0 - h1.estimate) * h2.std_error()).powi(2))
        .sqrt();
        let tol = Z95 * (e2e.std_error().powi(2) + se_combined.powi(2)).sqrt();
        checks.push(Check::new(
            format!("leg_combining {label}"),
            e2e.estimate,
            combined,
            tol,
        ));
    }

    // Jensen: exact intercept is never below the expectation-substituted form
    let mut worst_ratio = f64::INFINITY;
    for n in [2usize, 5, 11, 51, 201] {
        for gamma_e in [0.1, 0.5, 1.0, 3.0, 10.0] {
            for tau in [0.01, 0.1, 0.5, 1.0, 3.0] {
                let substituted = (-expected_jammers(n, tau) * f64::ln_1p(gamma_e)).exp();
                worst_ratio = worst_ratio.min(eve_intercept_exact(n, gamma_e, tau) / substituted);
            }
        }
    }
    checks.push(Check::at_least(
        "jensen_ratio (min exact/substituted)",
        worst_ratio,
        1.0,
        0.0,
    ));

    Ok(ValidationReport {
        quick: opts.quick,
        seed: opts.seed,
        trials,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_passes_and_is_deterministic() {
        let opts = ValidateOptions {
            quick: true,
            seed: 1,
            workers: 2,
            inject_gamma_e: None,
        };
        let a = run_validation(&opts).unwrap();
        assert!(
            a.passed(),
            "{:#?}",
            a.checks.iter().filter(|c| !c.passed).collect::<Vec<_>>()
        );
        let b = run_validation(&ValidateOptions { workers: 1, ..opts }).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn injected_error_fails() {
        let opts = ValidateOptions {
            quick: true,
            seed: 1,
            workers: 1,
            inject_gamma_e: Some(2.0),
        };
        assert!(!run_validation(&opts).unwrap().passed());
    }
}
