use serde::{Deserialize, Serialize};

use super::mc::{mc_integral, McRequest, ProposalConfig};
use super::quadrature::{quadrature_beta1, quadrature_gamma, QuadratureConfig};
use super::VerifyError;
use crate::gammafn::{log_beta_p, log_mvgamma};
use crate::reduction::Family;

/// Quadrature passes when `|exp(oracle − closed) − 1|` is at most this.
pub const QUAD_REL_TOL: f64 = 1e-4;
/// Monte Carlo passes when the discrepancy is within this many standard errors.
pub const MC_SIGMAS: f64 = 4.0;

const DEFAULT_N: usize = 1_000_000;
const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Oracle {
    Quadrature,
    Mc,
}

impl std::str::FromStr for Oracle {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "quadrature" => Ok(Oracle::Quadrature),
            "mc" => Ok(Oracle::Mc),
            other => Err(format!("unknown oracle '{other}' (expected quadrature|mc)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSpec {
    pub family: Family,
    pub p: usize,
    pub alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    pub oracle: Oracle,
    /// Monte Carlo sample size; defaults to 10⁶.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub checks: Vec<CheckSpec>,
    pub proposal: ProposalConfig,
    pub quadrature: QuadratureConfig,
    pub threads: Option<usize>,
}

impl SuiteConfig {
    pub fn from_json(text: &str) -> Result<Self, VerifyError> {
        serde_json::from_str(text).map_err(|e| VerifyError::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub family: Family,
    pub p: usize,
    pub alpha: f64,
    pub beta: Option<f64>,
    pub oracle: Oracle,
    /// log of the closed form.
    pub closed_form_log: Option<f64>,
    /// log of the oracle's estimate.
    pub oracle_log: Option<f64>,
    pub rel_error: Option<f64>,
    pub std_error: Option<f64>,
    pub discrepancy_sigma: Option<f64>,
    pub n_samples: Option<usize>,
    pub seed: Option<u64>,
    pub pass: bool,
    pub error: Option<String>,
}

fn closed_form_log(spec: &CheckSpec) -> Result<f64, VerifyError> {
    let case = spec.family.case();
    if spec.family.has_beta() {
        let beta = spec.beta.ok_or_else(|| VerifyError::Config(format!("{} needs beta", spec.family)))?;
        Ok(log_beta_p(spec.p, spec.alpha, beta, case)?)
    } else {
        Ok(log_mvgamma(spec.p, spec.alpha, case)?)
    }
}

/// Runs one check; failures of any kind are recorded in the report.
pub fn run_check(spec: &CheckSpec, config: &SuiteConfig) -> VerifyReport {
    let mut report = VerifyReport {
        family: spec.family,
        p: spec.p,
        alpha: spec.alpha,
        beta: spec.beta,
        oracle: spec.oracle,
        closed_form_log: None,
        oracle_log: None,
        rel_error: None,
        std_error: None,
        discrepancy_sigma: None,
        n_samples: None,
        seed: None,
        pass: false,
        error: None,
    };
    if let Err(e) = fill(&mut report, spec, config) {
        report.error = Some(e.to_string());
        report.pass = false;
    }
    report
}

fn fill(report: &mut VerifyReport, spec: &CheckSpec, config: &SuiteConfig) -> Result<(), VerifyError> {
    let closed = closed_form_log(spec)?;
    report.closed_form_log = Some(closed);
    let case = spec.family.case();
    match spec.oracle {
        Oracle::Quadrature => {
            let q = match spec.family {
                Family::GammaReal | Family::GammaComplex => quadrature_gamma(spec.p, spec.alpha, case, &config.quadrature)?,
                Family::Beta1Real | Family::Beta1Complex => {
                    let beta = spec.beta.expect("checked by closed_form_log");
                    quadrature_beta1(spec.p, spec.alpha, beta, case, &config.quadrature)?
                }
                Family::Beta2Real => return Err(VerifyError::UnsupportedFamily(spec.family.to_string())),
            };
            let rel = ((q.value - closed).exp() - 1.0).abs();
            report.oracle_log = Some(q.value);
            report.rel_error = Some(rel);
            report.pass = rel <= QUAD_REL_TOL;
        }
        Oracle::Mc => {
            let req = McRequest {
                family: spec.family,
                p: spec.p,
                alpha: spec.alpha,
                beta: spec.beta,
                n: spec.n.unwrap_or(DEFAULT_N),
                seed: spec.seed.unwrap_or(DEFAULT_SEED),
            };
            let e = mc_integral(&req, &config.proposal, config.threads)?;
            let sigma = (e.value - closed) / e.std_error;
            report.oracle_log = Some(e.value);
            report.std_error = Some(e.std_error);
            report.discrepancy_sigma = Some(sigma);
            report.n_samples = Some(e.n_samples);
            report.seed = Some(e.seed);
            report.pass = sigma.abs() <= MC_SIGMAS;
        }
    }
    Ok(())
}

pub fn run_suite(config: &SuiteConfig) -> Vec<VerifyReport> {
    config.checks.iter().map(|c| run_check(c, config)).collect()
}

/// A small suite touching every oracle and family the oracles support.
pub fn default_config() -> SuiteConfig {
    let quad = |family, p, alpha, beta| CheckSpec { family, p, alpha, beta, oracle: Oracle::Quadrature, n: None, seed: None };
    let mc = |family, p, alpha, beta| CheckSpec { family, p, alpha, beta, oracle: Oracle::Mc, n: None, seed: None };
    SuiteConfig {
        checks: vec![
            quad(Family::GammaReal, 1, 2.0, None),
            quad(Family::GammaReal, 2, 1.5, None),
            quad(Family::GammaReal, 2, 3.25, None),
            quad(Family::Beta1Real, 1, 2.0, Some(3.0)),
            quad(Family::Beta1Real, 2, 2.0, Some(2.0)),
            quad(Family::Beta1Real, 2, 2.5, Some(3.5)),
            mc(Family::GammaReal, 3, 3.0, None),
            mc(Family::GammaComplex, 2, 3.0, None),
            mc(Family::Beta1Real, 3, 3.0, Some(3.0)),
        ],
        ..SuiteConfig::default()
    }
}
