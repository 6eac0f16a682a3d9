use crate::error::{Error, Result};
use crate::rearrange::iterated_rearrange_2d;
use crate::stepfun::{mul_zero_inf, DyadicStep2D};

/// `sup t^a |ln t|^g` over `t ∈ (lo, hi) ∩ (0, 1)`, for `a > 0`.
///
/// With `u = −ln t` the log of the weight is `−a u + g ln u`: monotone for
/// `g ≤ 0`, and maximal at `u = g/a` for `g > 0`.
pub fn log_power_sup_on_cell(a: f64, g: f64, lo: f64, hi: f64) -> f64 {
    let hi = hi.min(1.0);
    let u_lo = -hi.ln();
    let u_hi = if lo <= 0.0 { f64::INFINITY } else { -lo.ln() };
    let phi = |u: f64| (-a * u).exp() * u.powf(g);
    if g < 0.0 {
        if u_lo == 0.0 {
            f64::INFINITY
        } else {
            phi(u_lo)
        }
    } else if g == 0.0 {
        hi.powf(a)
    } else {
        phi((g / a).clamp(u_lo, u_hi))
    }
}

/// `sup_{0<t<1} t₁^{1/p₁} t₂^{1/p₂} |ln t₁|^{-θ₁} |ln t₂|^{-θ₂} f^{*₁,*₂}(t₁,t₂)`.
///
/// The weight is increasing in each `tᵢ`, so the value is `+∞` whenever the
/// rearrangement is nonzero on a cell touching `tᵢ = 1`.
pub fn logweight_sup_norm(f: &DyadicStep2D, p: [f64; 2], theta: [f64; 2]) -> Result<f64> {
    if !(p.iter().all(|&v| v > 0.0 && v.is_finite()) && theta.iter().all(|&v| v > 0.0 && v.is_finite())) {
        return Err(Error::Parameter(format!("log-weight norm needs finite p > 0 and θ > 0, got p = {p:?}, θ = {theta:?}")));
    }
    let r = iterated_rearrange_2d(f);
    let weights = |n: usize, a: f64, g: f64| -> Vec<f64> {
        let h = 1.0 / n as f64;
        (0..n).map(|j| log_power_sup_on_cell(a, g, j as f64 * h, (j + 1) as f64 * h)).collect()
    };
    let w1 = weights(r.width(), 1.0 / p[0], -theta[0]);
    let w2 = weights(r.height(), 1.0 / p[1], -theta[1]);
    let mut best = 0.0f64;
    for (j2, row) in r.rows().enumerate() {
        for (j1, &v) in row.iter().enumerate() {
            best = best.max(mul_zero_inf(v, w1[j1] * w2[j2]));
        }
    }
    Ok(best)
}
