//! Parameter sweeps producing one result row per swept value.

use std::fmt;
use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use clap::ValueEnum;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{BoundInputs, BoundReport};
use crate::channel::ScenarioConfig;
use crate::error::{Error, Result};
use crate::montecarlo::{
    estimate_outage_with, load_balance, OutageEstimate, SamplingMode, SimOptions,
};
use crate::protocol::{ProtocolChoice, TauPolicy};
use crate::stats::Proportion;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweptParameter {
    N,
    M,
    GammaR,
    GammaE,
    EpsS,
    EpsT,
    Tau,
}

impl fmt::Display for SweptParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweptParameter::N => "n",
            SweptParameter::M => "m",
            SweptParameter::GammaR => "gamma_r",
            SweptParameter::GammaE => "gamma_e",
            SweptParameter::EpsS => "eps_s",
            SweptParameter::EpsT => "eps_t",
            SweptParameter::Tau => "tau",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outputs {
    Bounds,
    Simulation,
    #[default]
    Both,
}

impl Outputs {
    fn bounds(self) -> bool {
        matches!(self, Outputs::Bounds | Outputs::Both)
    }

    fn simulation(self) -> bool {
        matches!(self, Outputs::Simulation | Outputs::Both)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub parameter: SweptParameter,
    pub values: Vec<f64>,
    pub base: ScenarioConfig,
    pub protocol: ProtocolChoice,
    pub trials: u64,
    pub seed: u64,
    pub sampling: SamplingMode,
    pub outputs: Outputs,
    /// Slots for load-balance columns; `None` leaves them empty.
    pub slots: Option<u64>,
}

/// `from, from + step, ...` up to and including `to` (within rounding).
pub fn grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step.is_finite()) || !from.is_finite() || !to.is_finite() || to < from {
        return Err(Error::config("grid needs finite from <= to and step > 0"));
    }
    let count = ((to - from) / step + 1e-9).floor() as usize + 1;
    // trim float noise so 0.1 steps print as typed
    Ok((0..count)
        .map(|k| ((from + k as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

fn as_count(value: f64, what: &str) -> Result<usize> {
    if value >= 0.0 && value.fract() == 0.0 && value < u32::MAX as f64 {
        Ok(value as usize)
    } else {
        Err(Error::config(format!(
            "{what} must be a non-negative integer, got {value}"
        )))
    }
}

impl SweepSpec {
    /// Scenario and protocol for one swept value.
    pub fn point(&self, value: f64) -> Result<(ScenarioConfig, ProtocolChoice)> {
        let mut cfg = self.base.clone();
        let mut protocol = self.protocol;
        match self.parameter {
            SweptParameter::N => cfg.n = as_count(value, "n")?,
            SweptParameter::M => cfg.m = as_count(value, "m")?,
            SweptParameter::GammaR => cfg.gamma_r = value,
            SweptParameter::GammaE => cfg.gamma_e = value,
            SweptParameter::EpsS => cfg.eps_s = value,
            SweptParameter::EpsT => cfg.eps_t = value,
            SweptParameter::Tau => protocol.tau_policy = TauPolicy::Manual(value),
        }
        cfg.validate()?;
        protocol.validate()?;
        Ok((cfg, protocol))
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::config("sweep needs at least one value"));
        }
        if self.trials < 1 {
            return Err(Error::config("trials must be at least 1"));
        }
        for &v in &self.values {
            self.point(v)?;
        }
        Ok(())
    }
}

/// One CSV line. Column order is fixed by field order; absent sections are
/// empty cells.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ResultRow {
    pub swept_value: Option<f64>,
    pub m_max_t1: Option<f64>,
    pub m_max_t3: Option<f64>,
    pub tau_min: Option<f64>,
    pub tau_max: Option<f64>,
    pub feasible: Option<bool>,
    pub tau: Option<f64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub p_t_hop1: Option<f64>,
    pub p_t_hop1_ci_lo: Option<f64>,
    pub p_t_hop1_ci_hi: Option<f64>,
    pub p_t_hop2: Option<f64>,
    pub p_t_hop2_ci_lo: Option<f64>,
    pub p_t_hop2_ci_hi: Option<f64>,
    pub p_t_e2e: Option<f64>,
    pub p_t_e2e_ci_lo: Option<f64>,
    pub p_t_e2e_ci_hi: Option<f64>,
    pub p_s_hop1: Option<f64>,
    pub p_s_hop1_ci_lo: Option<f64>,
    pub p_s_hop1_ci_hi: Option<f64>,
    pub p_s_hop2: Option<f64>,
    pub p_s_hop2_ci_lo: Option<f64>,
    pub p_s_hop2_ci_hi: Option<f64>,
    pub p_s_e2e: Option<f64>,
    pub p_s_e2e_ci_lo: Option<f64>,
    pub p_s_e2e_ci_hi: Option<f64>,
    pub p_eve_single_hop1: Option<f64>,
    pub p_eve_single_hop1_ci_lo: Option<f64>,
    pub p_eve_single_hop1_ci_hi: Option<f64>,
    pub jain_index: Option<f64>,
    pub status: String,
}

pub const CSV_HEADER: &str =
    "swept_value,m_max_t1,m_max_t3,tau_min,tau_max,feasible,tau,trials,seed,\
p_t_hop1,p_t_hop1_ci_lo,p_t_hop1_ci_hi,p_t_hop2,p_t_hop2_ci_lo,p_t_hop2_ci_hi,\
p_t_e2e,p_t_e2e_ci_lo,p_t_e2e_ci_hi,p_s_hop1,p_s_hop1_ci_lo,p_s_hop1_ci_hi,\
p_s_hop2,p_s_hop2_ci_lo,p_s_hop2_ci_hi,p_s_e2e,p_s_e2e_ci_lo,p_s_e2e_ci_hi,\
p_eve_single_hop1,p_eve_single_hop1_ci_lo,p_eve_single_hop1_ci_hi,jain_index,status";

fn split(p: Proportion) -> (Option<f64>, Option<f64>, Option<f64>) {
    (Some(p.estimate), Some(p.ci_lo), Some(p.ci_hi))
}

impl ResultRow {
    pub fn set_bounds(&mut self, report: &BoundReport) {
        self.m_max_t1 = Some(report.m_max_theorem1.bound);
        self.m_max_t3 = Some(report.m_max_theorem3.bound);
        self.tau_min = report.tau_interval.tau_min;
        self.tau_max = report.tau_interval.tau_max;
        self.feasible = Some(report.tau_interval.is_feasible());
    }

    pub fn set_simulation(&mut self, est: &OutageEstimate) {
        self.tau = Some(est.tau);
        self.trials = Some(est.trials());
        self.seed = Some(est.seed);
        (self.p_t_hop1, self.p_t_hop1_ci_lo, self.p_t_hop1_ci_hi) = split(est.p_t_hop1());
        (self.p_t_hop2, self.p_t_hop2_ci_lo, self.p_t_hop2_ci_hi) = split(est.p_t_hop2());
        (self.p_t_e2e, self.p_t_e2e_ci_lo, self.p_t_e2e_ci_hi) = split(est.p_t_e2e());
        (self.p_s_hop1, self.p_s_hop1_ci_lo, self.p_s_hop1_ci_hi) = split(est.p_s_hop1());
        (self.p_s_hop2, self.p_s_hop2_ci_lo, self.p_s_hop2_ci_hi) = split(est.p_s_hop2());
        (self.p_s_e2e, self.p_s_e2e_ci_lo, self.p_s_e2e_ci_hi) = split(est.p_s_e2e());
        (
            self.p_eve_single_hop1,
            self.p_eve_single_hop1_ci_lo,
            self.p_eve_single_hop1_ci_hi,
        ) = split(est.p_eve_single_hop1());
    }
}

pub fn bound_inputs(cfg: &ScenarioConfig) -> BoundInputs {
    BoundInputs {
        n: cfg.n,
        m: cfg.m,
        gamma_r: cfg.gamma_r,
        gamma_e: cfg.gamma_e,
        eps_s: cfg.eps_s,
        eps_t: cfg.eps_t,
    }
}

fn run_row(spec: &SweepSpec, value: f64, workers: usize) -> Result<ResultRow> {
    let (cfg, protocol) = spec.point(value)?;
    let mut row = ResultRow {
        swept_value: Some(value),
        status: "ok".into(),
        ..Default::default()
    };
    if spec.outputs.bounds() {
        row.set_bounds(&BoundReport::compute(bound_inputs(&cfg)));
    }
    if spec.outputs.simulation() {
        let options = SimOptions {
            sampling: spec.sampling,
            workers,
        };
        match estimate_outage_with(&cfg, &protocol, spec.trials, spec.seed, options) {
            Ok(est) => row.set_simulation(&est),
            Err(Error::Infeasible(why)) => {
                row.status = format!("infeasible: {why}");
                return Ok(row);
            }
            Err(e) => return Err(e),
        }
    }
    if let Some(slots) = spec.slots {
        row.jain_index = Some(load_balance(&cfg, &protocol, slots, spec.seed)?.jain_index);
    }
    Ok(row)
}

/// Rows in swept-value order. `parallel_rows` evaluates rows concurrently
/// without changing the output.
pub fn run_sweep(spec: &SweepSpec, workers: usize, parallel_rows: bool) -> Result<Vec<ResultRow>> {
    spec.validate()?;
    if parallel_rows {
        spec.values
            .par_iter()
            .map(|&v| run_row(spec, v, workers))
            .collect()
    } else {
        spec.values
            .iter()
            .map(|&v| run_row(spec, v, workers))
            .collect()
    }
}

/// Render rows with the fixed header.
pub fn to_csv(rows: &[ResultRow], header: bool) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(header)
        .from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    if rows.is_empty() && header {
        return Ok(format!("{CSV_HEADER}\n"));
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Append rows to `path`, writing the header only for a new or empty file.
/// An existing file must carry the same header.
pub fn append_csv(path: &Path, rows: &[ResultRow]) -> Result<()> {
    let existing_header = match std::fs::File::open(path) {
        Ok(f) => BufReader::new(f).lines().next().transpose()?,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => None,
        Err(e) => return Err(e.into()),
    };
    let write_header = match existing_header.as_deref() {
        None | Some("") => true,
        Some(h) if h == CSV_HEADER => false,
        Some(_) => {
            return Err(Error::config(format!(
                "{} has a different CSV header; refusing to append",
                path.display()
            )))
        }
    };
    let text = to_csv(rows, write_header)?;
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    f.write_all(text.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::NoiseMode;
    use crate::protocol::ProtocolKind;

    fn spec(parameter: SweptParameter, values: Vec<f64>) -> SweepSpec {
        SweepSpec {
            parameter,
            values,
            base: ScenarioConfig {
                n: 21,
                m: 1,
                noise_mode: NoiseMode::InterferenceLimited,
                eps_s: 0.3,
                eps_t: 0.3,
                ..Default::default()
            },
            protocol: ProtocolChoice::new(ProtocolKind::RandomUniform, TauPolicy::Theorem2Max),
            trials: 2_000,
            seed: 5,
            sampling: SamplingMode::Shared,
            outputs: Outputs::Both,
            slots: None,
        }
    }

    #[test]
    fn header_matches_row_fields() {
        let text = to_csv(&[ResultRow::default()], true).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
    }

    #[test]
    fn grid_includes_endpoint() {
        assert_eq!(grid(0.1, 1.0, 0.1).unwrap().len(), 10);
        assert_eq!(grid(1.0, 1.0, 0.5).unwrap(), vec![1.0]);
        assert!(grid(1.0, 0.0, 0.5).is_err());
    }

    #[test]
    fn tau_sweep_trends() {
        let s = spec(SweptParameter::Tau, grid(0.05, 1.0, 0.19).unwrap());
        let rows = run_sweep(&s, 2, false).unwrap();
        for w in rows.windows(2) {
            assert!(w[0].p_t_hop1.unwrap() <= w[1].p_t_hop1.unwrap());
            assert!(w[0].p_s_hop1.unwrap() >= w[1].p_s_hop1.unwrap());
            assert!(w[0].p_s_e2e.unwrap() >= w[1].p_s_e2e.unwrap());
        }
    }

    #[test]
    fn infeasible_rows_do_not_abort() {
        let mut s = spec(SweptParameter::M, vec![0.0, 50.0, 5000.0]);
        s.protocol.tau_policy = TauPolicy::Theorem2Min;
        let rows = run_sweep(&s, 1, false).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].status, "ok");
        assert!(
            rows[2].status.starts_with("infeasible"),
            "{}",
            rows[2].status
        );
        assert_eq!(rows[2].feasible, Some(false));
        assert!(rows[2].p_s_e2e.is_none());
    }

    #[test]
    fn non_integer_count_rejected() {
        assert!(spec(SweptParameter::N, vec![2.5]).validate().is_err());
        assert!(spec(SweptParameter::EpsS, vec![1.5]).validate().is_err());
        assert!(spec(SweptParameter::Tau, vec![]).validate().is_err());
    }

    #[test]
    fn parallel_rows_same_output() {
        let mut s = spec(SweptParameter::GammaE, vec![0.5, 1.0, 2.0]);
        s.slots = Some(500);
        let a = to_csv(&run_sweep(&s, 1, false).unwrap(), true).unwrap();
        let b = to_csv(&run_sweep(&s, 3, true).unwrap(), true).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn append_is_schema_checked() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rows.csv");
        let row = ResultRow {
            swept_value: Some(1.0),
            status: "ok".into(),
            ..Default::default()
        };
        append_csv(&path, std::slice::from_ref(&row)).unwrap();
        append_csv(&path, &[row]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert_eq!(text.lines().filter(|l| *l == CSV_HEADER).count(), 1);

        let other = dir.path().join("other.csv");
        std::fs::write(&other, "a,b\n1,2\n").unwrap();
        assert!(append_csv(&other, &[ResultRow::default()]).is_err());
    }
}
