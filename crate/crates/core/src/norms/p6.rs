use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rearrange::iterated_rearrange_2d;
use crate::stepfun::DyadicStep2D;

use super::{pow, root, Exponents};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct P6Config {
    /// Largest `kᵢ` scanned.
    pub k_max: u32,
}

impl Default for P6Config {
    fn default() -> Self {
        Self { k_max: 1 << 12 }
    }
}

/// `Σ_{m ≤ 0} (2^{m c} v(m))^τ` along one axis, or the sup for `τ = ∞`.
///
/// `explicit[r-1]` is the sample at `m = −r` for `r = 1..=n`; every `m < −n`
/// samples the first cell, whose value is `tail`. `m = 0` samples `t = 1`,
/// where the zero extension vanishes.
fn axis_sum(explicit: &[f64], tail: f64, c: f64, tau: f64) -> f64 {
    let n = explicit.len() as f64;
    if tau.is_infinite() {
        let head = explicit
            .iter()
            .enumerate()
            .map(|(r, &v)| if v == 0.0 { 0.0 } else { (-((r + 1) as f64) * c).exp2() * v })
            .fold(0.0, f64::max);
        let t = if tail == 0.0 { 0.0 } else { (-(n + 1.0) * c).exp2() * tail };
        return head.max(t);
    }
    let head: f64 = explicit
        .iter()
        .enumerate()
        .map(|(r, &v)| if v == 0.0 { 0.0 } else { pow((-((r + 1) as f64) * c).exp2() * v, tau) })
        .sum();
    let t = if tail == 0.0 {
        0.0
    } else {
        let ratio = -(-c * tau * std::f64::consts::LN_2).exp_m1();
        pow(tail, tau) * (-(n + 1.0) * c * tau).exp2() / ratio
    };
    head + t
}

/// Samples of `F = f^{*₁,*₂}` at `(2^{m₁}, 2^{m₂})`, grouped by axis position.
struct Samples {
    /// `rows[i]` holds the x₁ samples of the x₂ position `i`, where positions
    /// `0..n₂` are `m₂ = −1..=−n₂` and position `n₂` is the tail row.
    /// Within a row, entries `0..n₁` are `m₁ = −1..=−n₁` and entry `n₁` is the tail.
    rows: Vec<Vec<f64>>,
}

impl Samples {
    fn new(f: &DyadicStep2D) -> Self {
        let r = iterated_rearrange_2d(f);
        let [n1, n2] = f.levels();
        // m = −k for k = 1..=n samples cell 2^{n−k}; the tail samples cell 0.
        let pos = |n: u32| -> Vec<usize> { (1..=n).map(|k| 1usize << (n - k)).chain(std::iter::once(0)).collect() };
        let (p1, p2) = (pos(n1), pos(n2));
        let rows = p2.iter().map(|&j2| p1.iter().map(|&j1| r.get(j1, j2)).collect()).collect();
        Self { rows }
    }

    fn inner(&self, c1: f64, tau1: f64) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| {
                let (tail, head) = row.split_last().expect("tail sample");
                let s = axis_sum(head, *tail, c1, tau1);
                if tau1.is_infinite() { s } else { root(s, tau1) }
            })
            .collect()
    }

    fn outer(inner: &[f64], c2: f64, tau2: f64) -> f64 {
        let (tail, head) = inner.split_last().expect("tail sample");
        let s = axis_sum(head, *tail, c2, tau2);
        if tau2.is_infinite() { s } else { root(s, tau2) }
    }
}

/// Discrete characterization of the grand norm:
/// `sup_{k₁,k₂ ≥ 2} k₁^{-θ₁} k₂^{-θ₂} (Σ_{m₂≤0}(Σ_{m₁≤0}(2^{m₁(1/p₁+1/k₁) + m₂(1/p₂+1/k₂)} F(2^{m₁},2^{m₂}))^{τ₁})^{τ₂/τ₁})^{1/τ₂}`.
///
/// The inner sum runs over `m₁` with `τ₁`, matching the nesting of the
/// Lorentz norm. The double sum only grows as `k → ∞`, which bounds every
/// remaining term and lets the scan stop early.
pub fn discrete_grand_norm_p6(f: &DyadicStep2D, e: &Exponents, theta: [f64; 2], cfg: &P6Config) -> Result<f64> {
    if !(theta[0] > 0.0 && theta[1] > 0.0) {
        return Err(Error::Parameter(format!("P6 form needs θ > 0, got {theta:?}")));
    }
    if !(e.p[0].is_finite() && e.p[1].is_finite()) {
        return Err(Error::Parameter("P6 form needs finite p".into()));
    }
    if cfg.k_max < 2 {
        return Err(Error::Parameter("k_max must be at least 2".into()));
    }
    let inv_p = e.inv_p();
    let tau = e.q;
    let samples = Samples::new(f);
    let limit_inner = samples.inner(inv_p[0], tau[0]);
    let limit = Samples::outer(&limit_inner, inv_p[1], tau[1]);

    let mut best = 0.0f64;
    for k1 in 2..=cfg.k_max {
        let w1 = (k1 as f64).powf(-theta[0]);
        if w1 * 2f64.powf(-theta[1]) * limit <= best {
            break;
        }
        let inner = samples.inner(inv_p[0] + 1.0 / k1 as f64, tau[0]);
        let row_limit = Samples::outer(&inner, inv_p[1], tau[1]);
        for k2 in 2..=cfg.k_max {
            let w = w1 * (k2 as f64).powf(-theta[1]);
            if w * row_limit <= best {
                break;
            }
            let v = w * Samples::outer(&inner, inv_p[1] + 1.0 / k2 as f64, tau[1]);
            best = best.max(v);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    const INF: f64 = f64::INFINITY;

    #[test]
    fn zero_is_zero() {
        let z = DyadicStep2D::zeros([3, 3]).unwrap();
        let e = Exponents::new([2.0, 2.0], [1.0, 1.0]).unwrap();
        assert_eq!(discrete_grand_norm_p6(&z, &e, [1.0, 1.0], &P6Config::default()).unwrap(), 0.0);
    }

    #[test]
    fn constant_one_sup_form_closed_form() {
        // Level (0,0): only tail terms, Σ_{m≤−1} 2^{m c} = 1/(2^c − 1) per axis (τ = 1).
        let one = DyadicStep2D::constant([0, 0], 1.0).unwrap();
        let e = Exponents::new([2.0, 2.0], [1.0, 1.0]).unwrap();
        let cfg = P6Config { k_max: 64 };
        let v = discrete_grand_norm_p6(&one, &e, [1.0, 1.0], &cfg).unwrap();
        let axis = |k: f64| (1.0 / k) / ((0.5 + 1.0 / k).exp2() - 1.0);
        let expect = (2..=64).map(|k| axis(k as f64)).fold(0.0, f64::max).powi(2);
        assert!((v - expect).abs() < 1e-12, "{v} vs {expect}");
    }

    #[test]
    fn sup_q_samples_right_endpoints() {
        // Level (1,0) grid [2, 1]: m₁ = −1 hits cell 1 (value 1), m₁ ≤ −2 hits cell 0.
        let f = DyadicStep2D::from_rows(vec![vec![2.0, 1.0]]).unwrap();
        let e = Exponents::new([1.0, 1.0], [INF, INF]).unwrap();
        let cfg = P6Config { k_max: 2 };
        let v = discrete_grand_norm_p6(&f, &e, [1.0, 1.0], &cfg).unwrap();
        let c = 1.5;
        let axis1 = ((-c as f64).exp2() * 1.0).max((-2.0 * c as f64).exp2() * 2.0);
        let axis2 = (-c as f64).exp2();
        assert!((v - 0.25 * axis1 * axis2).abs() < 1e-15);
    }
}
