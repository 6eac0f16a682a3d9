//! Verification harness: corpora, inequality checks and their reports.
//!
//! Each suite returns a list of [`CheckReport`]s in a fixed order. Exact
//! checks use the tolerances under `[exact]` in `thresholds.toml`; calibrated
//! checks compare against the constants under `[calibrated]`.

pub mod corpus;
pub mod embeddings;
pub mod hardy;
pub mod karamata;
pub mod le3;
pub mod mink;
pub mod report;
pub mod theorems;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::GrandParams;

pub use report::{CheckReport, ReportBuilder};

/// Contents of the shipped `thresholds.toml`.
pub const DEFAULT_THRESHOLDS: &str = include_str!("../../thresholds.toml");

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExactTolerances {
    pub karamata: f64,
    pub mink: f64,
    pub le3: f64,
    pub chain: f64,
    pub parseval: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Calibrated {
    /// Harness-wide factor on `6·D(θ̄)` in the coefficient bound.
    pub c0: f64,
    pub hardy: f64,
    pub hardy_alpha_spread: f64,
    pub te3_growth_spread: f64,
    pub interp_slack: f64,
    pub te4: f64,
    pub thm5: f64,
    pub thm5_dyadic: f64,
    /// Two-sided constant of the log-weight equivalence.
    pub l1: f64,
    /// Two-sided constant between the discrete and continuous grand norms.
    pub p6: f64,
    pub p2: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    pub exact: ExactTolerances,
    pub calibrated: Calibrated,
}

impl Thresholds {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }
}

impl Default for Thresholds {
    fn default() -> Self {
        Self::from_toml_str(DEFAULT_THRESHOLDS).expect("shipped thresholds.toml parses")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    /// ε grid depth for grand norms.
    pub eps_j: u32,
    /// Dyadic t-grid depth for interpolation norms.
    pub interp_j: u32,
    pub thresholds: Thresholds,
}

impl VerifyConfig {
    pub fn new(seed: u64) -> Self {
        Self { seed, eps_j: GrandParams::DEFAULT_EPS_J, interp_j: 10, thresholds: Thresholds::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Karamata,
    Mink,
    Hardy,
    Le3,
    Te3,
    Te4,
    Thm5,
    Embeddings,
    All,
}

impl Suite {
    /// The individual suites in the order `all` runs them.
    pub const EACH: [Suite; 8] =
        [Suite::Karamata, Suite::Mink, Suite::Hardy, Suite::Le3, Suite::Te3, Suite::Te4, Suite::Thm5, Suite::Embeddings];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Karamata => "karamata",
            Suite::Mink => "mink",
            Suite::Hardy => "hardy",
            Suite::Le3 => "le3",
            Suite::Te3 => "te3",
            Suite::Te4 => "te4",
            Suite::Thm5 => "thm5",
            Suite::Embeddings => "embeddings",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .iter()
            .chain(&[Suite::All])
            .copied()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown suite {s:?}")))
    }
}

/// Runs one suite (or all of them) and returns its reports in a fixed order.
pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<Vec<CheckReport>> {
    let th = &cfg.thresholds;
    match suite {
        Suite::Karamata => karamata::suite(cfg.seed, th.exact.karamata),
        Suite::Mink => mink::suite(cfg.seed, th.exact.mink),
        Suite::Hardy => Ok(hardy::suite(th.calibrated.hardy, th.calibrated.hardy_alpha_spread)),
        Suite::Le3 => le3::suite(cfg.seed, th.exact.le3, th.exact.parseval),
        Suite::Te3 => theorems::te3_suite(cfg),
        Suite::Te4 => theorems::te4_suite(cfg),
        Suite::Thm5 => theorems::thm5_suite(cfg),
        Suite::Embeddings => embeddings::suite(cfg),
        Suite::All => {
            let mut out = Vec::new();
            for s in Suite::EACH {
                out.extend(run_suite(s, cfg)?);
            }
            Ok(out)
        }
    }
}
