//! Scalar norms of step functions and coefficient sequences.

mod grand;
mod logweight;
mod lorentz;
mod p6;
mod sequence;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use grand::{grand_lorentz_norm, grand_lorentz_norm_with, grand_lorentz_sweep};
pub use logweight::{log_power_sup_on_cell, logweight_sup_norm};
pub use lorentz::{lorentz_norm, lorentz_norm_shifted, mixed_lebesgue_norm, LorentzKernel};
pub use p6::{discrete_grand_norm_p6, P6Config};
pub use sequence::{dyadic_block_norm, dyadic_lq, grand_seq_norm, BlockSums};
pub(crate) use sequence::grand_seq_norm_blocks;

/// `(p̄, q̄)`, each component in `(0, ∞]` with `f64::INFINITY` for ∞.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exponents {
    pub p: [f64; 2],
    pub q: [f64; 2],
}

impl Exponents {
    pub fn new(p: [f64; 2], q: [f64; 2]) -> Result<Self> {
        for (name, v) in [("p1", p[0]), ("p2", p[1]), ("q1", q[0]), ("q2", q[1])] {
            if !(v > 0.0) {
                return Err(Error::Parameter(format!("{name} = {v} must lie in (0, ∞]")));
            }
        }
        Ok(Self { p, q })
    }

    /// `1/pᵢ`, zero for `pᵢ = ∞`.
    pub fn inv_p(&self) -> [f64; 2] {
        [1.0 / self.p[0], 1.0 / self.p[1]]
    }

    /// Conjugate exponents `p′ᵢ`, defined for `pᵢ ≥ 1`.
    pub fn conjugate_p(&self) -> Result<[f64; 2]> {
        let conj = |p: f64| {
            if p < 1.0 {
                Err(Error::Parameter(format!("conjugate of p = {p} < 1 is undefined")))
            } else if p == 1.0 {
                Ok(f64::INFINITY)
            } else {
                Ok(p / (p - 1.0))
            }
        };
        Ok([conj(self.p[0])?, conj(self.p[1])?])
    }
}

/// Whether a reported value is exact or a one-sided approximation of the
/// quantity it stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ApproxDirection {
    Under,
    Over,
    Exact,
}

/// Sign of the ε shift in the discrete sequence norm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeqSign {
    Plus,
    Minus,
}

/// `θ̄` plus the ε search grid `δᵢ·2^{-j}`, `j = 0..=eps_j`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrandParams {
    pub theta: [f64; 2],
    pub eps_j: u32,
    pub delta: [f64; 2],
}

impl GrandParams {
    pub const DEFAULT_EPS_J: u32 = 24;

    pub fn new(theta: [f64; 2]) -> Self {
        Self { theta, eps_j: Self::DEFAULT_EPS_J, delta: [1.0, 1.0] }
    }

    pub fn with_eps_j(mut self, eps_j: u32) -> Self {
        self.eps_j = eps_j;
        self
    }

    pub fn with_delta(mut self, delta: [f64; 2]) -> Self {
        self.delta = delta;
        self
    }

    /// `true` for the sup form (`θ̄ ≥ 0`), `false` for the inf form (`θ̄ < 0`).
    pub fn is_sup_form(&self) -> Result<bool> {
        let [a, b] = self.theta;
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::Parameter(format!("θ = {:?} must be finite", self.theta)));
        }
        if !(self.delta[0] > 0.0 && self.delta[1] > 0.0 && self.delta[0] <= 1.0 && self.delta[1] <= 1.0) {
            return Err(Error::Parameter(format!("δ = {:?} must lie in (0, 1]²", self.delta)));
        }
        match (a >= 0.0, b >= 0.0) {
            (true, true) => Ok(true),
            (false, false) => Ok(false),
            _ => Err(Error::Parameter(format!("mixed-sign θ = {:?} is not defined", self.theta))),
        }
    }
}

/// Result of a grand-norm search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrandValue {
    pub value: f64,
    pub direction: ApproxDirection,
    pub argmax_eps: [f64; 2],
}

/// `(Σ ... )^{1/q}` accumulation helper shared by the norm kernels.
#[inline]
pub(crate) fn root(sum: f64, q: f64) -> f64 {
    if sum.is_infinite() {
        f64::INFINITY
    } else if q == 1.0 {
        sum
    } else if q == 2.0 {
        sum.sqrt()
    } else {
        sum.powf(1.0 / q)
    }
}

#[inline]
pub(crate) fn pow(x: f64, q: f64) -> f64 {
    if q == 1.0 {
        x
    } else if q == 2.0 {
        x * x
    } else {
        x.powf(q)
    }
}
