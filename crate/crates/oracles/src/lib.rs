//! Slow reference computations for cross-checking `lorentz-forge`.
//!
//! Nothing here depends on the main crate. Grids are plain row lists,
//! `rows[j₂][j₁]` (rows are x₂-slices), and double sequences are
//! `seq[m₁][m₂]`. Rearrangements invert the distribution function by a scan
//! over candidate levels instead of sorting, norms are evaluated by
//! subdividing `(0,1]` uniformly and sampling the rearrangement pointwise, and
//! sequence norms are summed term by term.

use std::f64::consts::PI;

/// An oracle value with how it was obtained.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    pub value: f64,
    pub method: &'static str,
    /// Number of subdivisions (or summed terms) per axis.
    pub resolution: usize,
    /// Estimated absolute error bound.
    pub error_bound: f64,
}

/// `μ{x : |g(x)| > σ}` for equal-measure cells.
pub fn distribution(values: &[f64], sigma: f64) -> f64 {
    values.iter().filter(|v| v.abs() > sigma).count() as f64 / values.len() as f64
}

/// `g*(t) = inf{σ ≥ 0 : μ{|g| > σ} ≤ t}`.
///
/// The distribution function only jumps at data values, so the infimum is
/// attained at one of them or at `0`.
pub fn rearranged_at(values: &[f64], t: f64) -> f64 {
    let mut best = f64::INFINITY;
    for sigma in values.iter().map(|v| v.abs()).chain([0.0]) {
        if sigma < best && distribution(values, sigma) <= t {
            best = sigma;
        }
    }
    best
}

/// Cell values of the decreasing rearrangement, sampled at the left end of each cell.
pub fn sigma_scan_1d(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    (0..n).map(|k| rearranged_at(values, k as f64 / n as f64)).collect()
}

fn columns(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let w = rows.first().map_or(0, Vec::len);
    (0..w).map(|j| rows.iter().map(|r| r[j]).collect()).collect()
}

/// `f^{*₁,*₂}`: each x₂-slice rearranged in x₁, then each x₁-column in x₂.
pub fn oracle_rearrange(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let first: Vec<Vec<f64>> = rows.iter().map(|r| sigma_scan_1d(r)).collect();
    let cols: Vec<Vec<f64>> = columns(&first).iter().map(|c| sigma_scan_1d(c)).collect();
    columns(&cols)
}

/// `a^{*₂,*₁}` of `seq[m₁][m₂]`: along m₂ first, then along m₁.
pub fn oracle_rearrange_seq(seq: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let first: Vec<Vec<f64>> = seq.iter().map(|r| sigma_scan_1d(r)).collect();
    let cols: Vec<Vec<f64>> = columns(&first).iter().map(|c| sigma_scan_1d(c)).collect();
    columns(&cols)
}

/// `a^{*₁,*₂}` of `seq[m₁][m₂]`: along m₁ first, then along m₂.
pub fn oracle_rearrange_seq_fun(seq: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let cols: Vec<Vec<f64>> = columns(seq).iter().map(|c| sigma_scan_1d(c)).collect();
    columns(&cols).iter().map(|r| sigma_scan_1d(r)).collect()
}

/// `(∫(∫|f|^{p₁}dx₁)^{p₂/p₁}dx₂)^{1/p₂}` summed cell by cell.
pub fn oracle_mixed_norm(rows: &[Vec<f64>], p: [f64; 2]) -> f64 {
    let inner: Vec<f64> = rows
        .iter()
        .map(|r| {
            if p[0].is_infinite() {
                r.iter().fold(0.0f64, |m, v| m.max(v.abs()))
            } else {
                (r.iter().map(|v| v.abs().powf(p[0])).sum::<f64>() / r.len() as f64).powf(1.0 / p[0])
            }
        })
        .collect();
    if p[1].is_infinite() {
        inner.iter().fold(0.0f64, |m, v| m.max(*v))
    } else {
        (inner.iter().map(|v| v.powf(p[1])).sum::<f64>() / inner.len() as f64).powf(1.0 / p[1])
    }
}

/// `∫_a^b t^{c−1} dt`, `c ≥ 0`.
fn weight_moment(c: f64, a: f64, b: f64) -> f64 {
    if c == 0.0 {
        if a == 0.0 {
            f64::INFINITY
        } else {
            (b / a).ln()
        }
    } else {
        (b.powf(c) - a.powf(c)) / c
    }
}

/// `(∫₀¹ (t^{1/p} φ(t))^q dt/t)^{1/q}` for `φ` constant on each of the
/// `values.len()` uniform subintervals (sup over the subintervals for `q = ∞`).
fn weighted_lq(values: &[f64], inv_p: f64, q: f64) -> f64 {
    let n = values.len();
    let h = 1.0 / n as f64;
    if q.is_infinite() {
        return values
            .iter()
            .enumerate()
            .map(|(i, &v)| if v == 0.0 { 0.0 } else { ((i + 1) as f64 * h).powf(inv_p) * v })
            .fold(0.0, f64::max);
    }
    let mut s = 0.0;
    for (i, &v) in values.iter().enumerate() {
        if v != 0.0 {
            s += v.powf(q) * weight_moment(q * inv_p, i as f64 * h, (i + 1) as f64 * h);
        }
    }
    s.powf(1.0 / q)
}

fn sample_grid(rows: &[Vec<f64>], refinement: u32) -> Vec<Vec<f64>> {
    let h = rows.len();
    let w = rows.first().map_or(0, Vec::len);
    let n = 1usize << refinement;
    (0..n)
        .map(|i2| {
            let x2 = (i2 as f64 + 0.5) / n as f64;
            let r = &rows[((x2 * h as f64) as usize).min(h - 1)];
            (0..n).map(|i1| r[(((i1 as f64 + 0.5) / n as f64 * w as f64) as usize).min(w - 1)]).collect()
        })
        .collect()
}

/// The anisotropic Lorentz norm by midpoint sampling.
///
/// `(0,1]` is cut into `2^refinement` subintervals per axis, the iterated
/// rearrangement is evaluated at each midpoint by distribution-function
/// inversion, and the power weights are integrated exactly over each
/// subinterval. Resampling a grid does not change its distribution function,
/// so the inversions run on the coarse rows. For step functions with
/// `refinement ≥` the grid level every sample is exact and the error is
/// rounding only.
pub fn oracle_lorentz_norm(rows: &[Vec<f64>], p: [f64; 2], q: [f64; 2], refinement: u32) -> OracleResult {
    let n = 1usize << refinement;
    let mid = |i: usize| (i as f64 + 0.5) / n as f64;
    // f^{*₁}(t₁, ·) on the coarse x₂ cells, for every t₁ midpoint
    let star1: Vec<Vec<f64>> = (0..n).map(|i1| rows.iter().map(|r| rearranged_at(r, mid(i1))).collect()).collect();
    // inner integral over t₁ for every t₂ midpoint
    let inner: Vec<f64> = (0..n)
        .map(|i2| {
            let slice: Vec<f64> = star1.iter().map(|col| rearranged_at(col, mid(i2))).collect();
            weighted_lq(&slice, 1.0 / p[0], q[0])
        })
        .collect();
    let value = if inner.iter().any(|v| v.is_infinite()) { f64::INFINITY } else { weighted_lq(&inner, 1.0 / p[1], q[1]) };
    OracleResult { value, method: "midpoint sampling, exact weight moments", resolution: n, error_bound: 1e-9 * value.max(1.0) }
}

/// Sup form of the grand norm over `εᵢ = 2^{−j}`, `j ≤ eps_j`, using the
/// quadrature Lorentz norm; `θᵢ = 0` pins `εᵢ = 0`.
pub fn oracle_grand_lorentz_norm(
    rows: &[Vec<f64>],
    p: [f64; 2],
    q: [f64; 2],
    theta: [f64; 2],
    eps_j: u32,
    refinement: u32,
) -> OracleResult {
    let grid = |th: f64| -> Vec<f64> {
        if th == 0.0 {
            vec![0.0]
        } else {
            (0..=eps_j).map(|j| 0.5f64.powi(j as i32)).collect()
        }
    };
    let mut best = 0.0f64;
    for e1 in grid(theta[0]) {
        for e2 in grid(theta[1]) {
            let pe = [1.0 / (1.0 / p[0] + e1), 1.0 / (1.0 / p[1] + e2)];
            let w = e1.powf(theta[0]) * e2.powf(theta[1]);
            let v = oracle_lorentz_norm(rows, pe, q, refinement).value;
            if v > 0.0 {
                best = best.max(w * v);
            }
        }
    }
    OracleResult { value: best, method: "ε grid over quadrature norms", resolution: 1 << refinement, error_bound: 1e-9 * best.max(1.0) }
}

/// `Σ_{m₁≤n₁} Σ_{m₂≤n₂} (a*_{m₁m₂})²` with `a*` given.
pub fn oracle_block_sum(rearranged: &[Vec<f64>], n1: usize, n2: usize) -> f64 {
    rearranged.iter().take(n1).flat_map(|r| r.iter().take(n2)).map(|v| v * v).sum()
}

/// Discrete grand norm of a sequence by direct summation.
///
/// `B(k₁,k₂) = [2^{−k₁−k₂} Σ_{m₁≤2^{k₁}, m₂≤2^{k₂}} (a^{*₂,*₁})²]^{1/2}`,
/// weighted by `2^{k₁(1/p₁+sε₁) + k₂(1/p₂+sε₂)}` with `s = ±1`, summed over
/// `k < kmax` in each index.
#[allow(clippy::too_many_arguments)]
pub fn oracle_grand_seq_norm(
    seq: &[Vec<f64>],
    p: [f64; 2],
    q: [f64; 2],
    theta: [f64; 2],
    eps_j: u32,
    sign: f64,
    kmax: usize,
) -> OracleResult {
    let r = oracle_rearrange_seq(seq);
    let block = |k1: usize, k2: usize| -> f64 {
        let n1 = 1usize.checked_shl(k1 as u32).unwrap_or(usize::MAX);
        let n2 = 1usize.checked_shl(k2 as u32).unwrap_or(usize::MAX);
        (oracle_block_sum(&r, n1, n2) * 0.5f64.powi((k1 + k2) as i32)).sqrt()
    };
    let b: Vec<Vec<f64>> = (0..kmax).map(|k2| (0..kmax).map(|k1| block(k1, k2)).collect()).collect();
    let lq = |terms: &mut dyn Iterator<Item = f64>, q: f64| -> f64 {
        if q.is_infinite() {
            terms.fold(0.0, f64::max)
        } else {
            terms.map(|t| t.powf(q)).sum::<f64>().powf(1.0 / q)
        }
    };
    let grid = |th: f64| -> Vec<f64> {
        if th == 0.0 {
            vec![0.0]
        } else {
            (0..=eps_j).map(|j| 0.5f64.powi(j as i32)).collect()
        }
    };
    let mut best = 0.0f64;
    for e1 in grid(theta[0]) {
        for e2 in grid(theta[1]) {
            let s = [1.0 / p[0] + sign * e1, 1.0 / p[1] + sign * e2];
            let inner: Vec<f64> = (0..kmax)
                .map(|k2| {
                    lq(&mut (0..kmax).map(|k1| 2f64.powf(k1 as f64 * s[0] + k2 as f64 * s[1]) * b[k2][k1]), q[0])
                })
                .collect();
            let v = lq(&mut inner.into_iter(), q[1]);
            let w = e1.powf(theta[0]) * e2.powf(theta[1]);
            if v > 0.0 {
                best = best.max(w * v);
            }
        }
    }
    OracleResult { value: best, method: "direct truncated double sum", resolution: kmax, error_bound: f64::NAN }
}

/// Paley-ordered Walsh function from Rademacher factors:
/// `w_n(x) = Π_k r_k(x)^{n_k}` with `r_k(x) = sign sin(2^{k+1}πx)`.
pub fn walsh_paley(n: usize, x: f64) -> f64 {
    let mut v = 1.0;
    let mut k = 0;
    let mut m = n;
    while m > 0 {
        if m & 1 == 1 {
            let s = (2f64.powi(k + 1) * PI * x).sin();
            v *= if s >= 0.0 { 1.0 } else { -1.0 };
        }
        m >>= 1;
        k += 1;
    }
    v
}

/// `∫∫ f(x₁,x₂) w_{k₁}(x₁) w_{k₂}(x₂)` by the midpoint rule at the cell
/// centers of a `2^refinement` subdivision (exact once it resolves every
/// Walsh cell). `signed` rows carry signs.
pub fn oracle_walsh_coeff(signed: &[Vec<f64>], k1: usize, k2: usize, refinement: u32) -> f64 {
    let fine = sample_grid(signed, refinement);
    let n = fine.len();
    let mut s = 0.0;
    for (i2, r) in fine.iter().enumerate() {
        let w2 = walsh_paley(k2, (i2 as f64 + 0.5) / n as f64);
        for (i1, v) in r.iter().enumerate() {
            s += v * walsh_paley(k1, (i1 as f64 + 0.5) / n as f64) * w2;
        }
    }
    s / (n * n) as f64
}

/// Frequency of trigonometric index `n` in the order 0, 1, −1, 2, −2, …
pub fn trig_freq(n: usize) -> f64 {
    let h = n.div_ceil(2) as f64;
    if n % 2 == 1 {
        h
    } else {
        -h
    }
}

/// `∫∫ f e^{−2πi(ν₁x₁+ν₂x₂)}` as `(re, im)` by the composite midpoint rule
/// with `2^refinement` points per axis. The error is `O(ν² 4^{−refinement})`.
pub fn oracle_trig_coeff(signed: &[Vec<f64>], k1: usize, k2: usize, refinement: u32) -> (f64, f64) {
    let fine = sample_grid(signed, refinement);
    let n = fine.len();
    let (nu1, nu2) = (trig_freq(k1), trig_freq(k2));
    let (mut re, mut im) = (0.0, 0.0);
    for (i2, r) in fine.iter().enumerate() {
        let x2 = (i2 as f64 + 0.5) / n as f64;
        for (i1, v) in r.iter().enumerate() {
            let x1 = (i1 as f64 + 0.5) / n as f64;
            let ph = -2.0 * PI * (nu1 * x1 + nu2 * x2);
            re += v * ph.cos();
            im += v * ph.sin();
        }
    }
    let m = (n * n) as f64;
    (re / m, im / m)
}
