use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::stepfun::DyadicStep2D;

use super::{ApproxDirection, Exponents, GrandParams, GrandValue, LorentzKernel};

/// `cap·2^{-j}` for `j = 0..=eps_j`.
fn eps_grid(cap: f64, eps_j: u32) -> Vec<f64> {
    (0..=eps_j).map(|j| cap * 0.5f64.powi(j as i32)).collect()
}

fn eps_weight(eps: f64, theta: f64) -> f64 {
    if theta == 0.0 {
        1.0
    } else {
        eps.powf(theta)
    }
}

/// Grand Lorentz norm of `f` on the ε grid described by `g`.
///
/// The sup form samples a subset of `(0, δ]²` and therefore under-reports; the
/// inf form over-reports. `θ̄ = (0,0)` is the plain Lorentz norm and is exact.
pub fn grand_lorentz_norm(f: &DyadicStep2D, e: &Exponents, g: &GrandParams) -> Result<GrandValue> {
    grand_lorentz_norm_with(&LorentzKernel::new(f, e.q), e, g)
}

/// Same as [`grand_lorentz_norm`] with a prebuilt kernel for `e.q`.
pub fn grand_lorentz_norm_with(kernel: &LorentzKernel, e: &Exponents, g: &GrandParams) -> Result<GrandValue> {
    Ok(grand_lorentz_sweep(kernel, e, &[g.theta], g.eps_j, g.delta)?[0])
}

/// Grand norms for several `θ̄` of the same sign, sharing one table of
/// shifted Lorentz norms over the ε grid. Each entry equals
/// [`grand_lorentz_norm_with`] at that `θ̄`.
pub fn grand_lorentz_sweep(
    kernel: &LorentzKernel,
    e: &Exponents,
    thetas: &[[f64; 2]],
    eps_j: u32,
    delta: [f64; 2],
) -> Result<Vec<GrandValue>> {
    if kernel.q() != e.q {
        return Err(Error::Parameter(format!("kernel built for q = {:?}, asked for {:?}", kernel.q(), e.q)));
    }
    let forms = thetas
        .iter()
        .map(|&theta| GrandParams { theta, eps_j, delta }.is_sup_form())
        .collect::<Result<Vec<bool>>>()?;
    let Some(&sup_form) = forms.first() else {
        return Ok(Vec::new());
    };
    if forms.iter().any(|&f| f != sup_form) {
        return Err(Error::Parameter("one sweep cannot mix sup-form and inf-form θ".into()));
    }
    let inv_p = e.inv_p();
    let cap = if sup_form {
        delta
    } else {
        if inv_p.contains(&0.0) {
            return Err(Error::Parameter("the inf form requires finite p".into()));
        }
        [delta[0].min(inv_p[0]), delta[1].min(inv_p[1])]
    };
    let sign = if sup_form { 1.0 } else { -1.0 };
    // Table axes: the geometric grid, then ε = 0 when some θᵢ = 0 needs it
    // (in the sup form the ε-free limit is the supremum there).
    let axis = |i: usize| -> Vec<f64> {
        let mut v = eps_grid(cap[i], eps_j);
        if sup_form && thetas.iter().any(|t| t[i] == 0.0) {
            v.push(0.0);
        }
        v
    };
    let (eps1, eps2) = (axis(0), axis(1));
    let table: Vec<Vec<f64>> = eps1
        .par_iter()
        .map(|&e1| {
            let rho = kernel.row_values(inv_p[0] + sign * e1);
            eps2.iter().map(|&e2| kernel.outer(&rho, inv_p[1] + sign * e2)).collect()
        })
        .collect();
    let grid_len = eps_j as usize + 1;

    Ok(thetas
        .iter()
        .map(|&theta| {
            let idx = |i: usize, len: usize| -> Vec<usize> {
                if sup_form && theta[i] == 0.0 {
                    vec![len - 1]
                } else {
                    (0..grid_len).collect()
                }
            };
            let mut best: Option<(f64, [f64; 2])> = None;
            for i1 in idx(0, eps1.len()) {
                let w1 = eps_weight(eps1[i1], theta[0]);
                for i2 in idx(1, eps2.len()) {
                    let n = table[i1][i2];
                    let v = if n == 0.0 { 0.0 } else { w1 * eps_weight(eps2[i2], theta[1]) * n };
                    let better = match best {
                        None => true,
                        Some((b, _)) => if sup_form { v > b } else { v < b },
                    };
                    if better {
                        best = Some((v, [eps1[i1], eps2[i2]]));
                    }
                }
            }
            let (value, argmax_eps) = best.expect("nonempty ε grid");
            let direction = if theta == [0.0, 0.0] {
                ApproxDirection::Exact
            } else if sup_form {
                ApproxDirection::Under
            } else {
                ApproxDirection::Over
            };
            GrandValue { value, direction, argmax_eps }
        })
        .collect())
}
