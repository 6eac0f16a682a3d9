//! Upper bound `K̂` for the anisotropic K-functional of the pair
//! `(L_{(1,1)}, L_{(2,2)})` and the interpolation norm built from it.
//!
//! `K̂(t₁,t₂)` is the cost of one explicit decomposition
//! `f = f₀₀ + f₁₀ + f₀₁ + f₁₁`: in every x₂-slice the largest `w₁ = t₁²`
//! measure of `|f|` goes to the "0" side in x₁, then in x₂ the `w₂ = t₂²`
//! measure of slices with the largest slice norms goes to the "0" side. Each
//! term below is the exact norm of the corresponding piece.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::beta;
use crate::norms::{pow, root};
use crate::rearrange::rearrange_x1;
use crate::stepfun::DyadicStep2D;

/// Norms of the four decomposition pieces at one `(t₁,t₂)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KTerms {
    pub t: [f64; 2],
    /// `‖f₀₀‖_{L(1,1)}`
    pub t00: f64,
    /// `‖f₁₀‖_{L(2,1)}`
    pub t10: f64,
    /// `‖f₀₁‖_{L(1,2)}`
    pub t01: f64,
    /// `‖f₁₁‖_{L(2,2)}`
    pub t11: f64,
}

impl KTerms {
    pub fn k_hat(&self) -> f64 {
        let [t1, t2] = self.t;
        self.t00 + t1 * self.t10 + t2 * self.t01 + t1 * t2 * self.t11
    }
}

/// `∫₀^{min(w,1)}` of a nonincreasing step function with cell width `h`.
fn head_integral(sorted: &[f64], h: f64, w: f64) -> f64 {
    let w = w.min(1.0);
    let full = ((w / h).floor() as usize).min(sorted.len());
    let mut s: f64 = sorted[..full].iter().sum::<f64>() * h;
    if full < sorted.len() {
        s += sorted[full] * (w - full as f64 * h);
    }
    s
}

/// `∫_{min(w,1)}^1` of a step function with cell width `h`.
fn tail_integral(sorted: &[f64], h: f64, w: f64) -> f64 {
    let total: f64 = sorted.iter().sum::<f64>() * h;
    (total - head_integral(sorted, h, w)).max(0.0)
}

fn sort_desc(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_unstable_by(|a, b| b.total_cmp(a));
    v
}

/// Row-wise prefix data of `f^{*₁}` for repeated `K̂` evaluations.
#[derive(Clone, Debug)]
pub struct KDecomposer {
    width: usize,
    h1: f64,
    h2: f64,
    /// `f^{*₁}` rows.
    rows: Vec<Vec<f64>>,
    /// Prefix sums of each row and of its squares, length `width + 1`.
    prefix: Vec<Vec<f64>>,
    prefix_sq: Vec<Vec<f64>>,
}

impl KDecomposer {
    pub fn new(f: &DyadicStep2D) -> Self {
        let g = rearrange_x1(f);
        let width = g.width();
        let rows: Vec<Vec<f64>> = g.rows().map(<[f64]>::to_vec).collect();
        let scan = |row: &Vec<f64>, sq: bool| {
            let mut acc = 0.0;
            std::iter::once(0.0)
                .chain(row.iter().map(|&v| {
                    acc += if sq { v * v } else { v };
                    acc
                }))
                .collect::<Vec<f64>>()
        };
        let prefix = rows.iter().map(|r| scan(r, false)).collect();
        let prefix_sq = rows.iter().map(|r| scan(r, true)).collect();
        Self { width, h1: 1.0 / width as f64, h2: 1.0 / g.height() as f64, rows, prefix, prefix_sq }
    }

    /// `(∫₀^{w} G_j, ∫_{w}^1 G_j²)` for row `j`.
    fn row_split(&self, j: usize, w1: f64) -> (f64, f64) {
        let w = w1.min(1.0);
        let full = ((w / self.h1).floor() as usize).min(self.width);
        let frac = w - full as f64 * self.h1;
        let row = &self.rows[j];
        let extra = if full < self.width { row[full] } else { 0.0 };
        let head = self.prefix[j][full] * self.h1 + extra * frac;
        let head_sq = self.prefix_sq[j][full] * self.h1 + extra * extra * frac;
        let total_sq = self.prefix_sq[j][self.width] * self.h1;
        (head, (total_sq - head_sq).max(0.0))
    }

    pub fn terms(&self, t1: f64, t2: f64) -> KTerms {
        let (w1, w2) = (t1 * t1, t2 * t2);
        let (p, q): (Vec<f64>, Vec<f64>) = (0..self.rows.len()).map(|j| self.row_split(j, w1)).unzip();
        let p = sort_desc(p);
        let q = sort_desc(q);
        let sqrt_q: Vec<f64> = q.iter().map(|v| v.sqrt()).collect();
        let p_sq: Vec<f64> = p.iter().map(|v| v * v).collect();
        let h2 = self.h2;
        KTerms {
            t: [t1, t2],
            t00: head_integral(&p, h2, w2),
            t01: tail_integral(&p_sq, h2, w2).sqrt(),
            t10: head_integral(&sqrt_q, h2, w2),
            t11: tail_integral(&q, h2, w2).sqrt(),
        }
    }
}

/// The four decomposition norms of `f` at `(t₁,t₂)`.
pub fn k_upper(f: &DyadicStep2D, t1: f64, t2: f64) -> Result<KTerms> {
    if !(t1 > 0.0 && t2 > 0.0) {
        return Err(Error::Domain(format!("K-functional needs t > 0, got ({t1}, {t2})")));
    }
    Ok(KDecomposer::new(f).terms(t1, t2))
}

/// `K̂(2^{k₁}, 2^{k₂})` for `kᵢ ∈ [−J, J]`, indexed `[k₂ + J][k₁ + J]`.
#[derive(Clone, Debug)]
pub struct KGrid {
    j: i32,
    values: Vec<Vec<f64>>,
}

impl KGrid {
    pub fn new(f: &DyadicStep2D, j: u32) -> Result<Self> {
        if j < 4 {
            return Err(Error::Parameter(format!("t-grid needs J ≥ 4, got {j}")));
        }
        let d = KDecomposer::new(f);
        let j = j as i32;
        let values = (-j..=j)
            .map(|k2| (-j..=j).map(|k1| d.terms((k1 as f64).exp2(), (k2 as f64).exp2()).k_hat()).collect())
            .collect();
        Ok(Self { j, values })
    }

    pub fn j(&self) -> u32 {
        self.j as u32
    }

    pub fn value(&self, k1: i32, k2: i32) -> f64 {
        self.values[(k2 + self.j) as usize][(k1 + self.j) as usize]
    }
}

/// `ln 2 · Σ_{k∈ℤ} (2^{-kθ} v_k)^q` (or the sup for `q = ∞`) for a sequence
/// known on `[−J, J]`. Beyond `J` the sequence is constant (`K̂` no longer
/// depends on `t` once `t ≥ 1`); below `−J` it is extended linearly in `t`.
fn axis_lq(v: &[f64], theta: f64, q: f64, j: i32) -> f64 {
    let weighted = |i: usize| {
        let k = i as i32 - j;
        (-(k as f64) * theta).exp2() * v[i]
    };
    if q.is_infinite() {
        return (0..v.len()).map(weighted).fold(0.0, f64::max);
    }
    let ln2 = std::f64::consts::LN_2;
    let mut s: f64 = (0..v.len()).map(|i| pow(weighted(i), q)).sum();
    let hi = pow(weighted(v.len() - 1), q);
    let lo = pow(weighted(0), q);
    // high tail ratio 2^{-θq}, low tail ratio 2^{-(1-θ)q}
    let geo = |r: f64| -> f64 {
        let x = -(r * ln2).exp_m1();
        (-r).exp2() / x
    };
    if hi > 0.0 {
        s += hi * geo(theta * q);
    }
    if lo > 0.0 {
        s += lo * geo((1.0 - theta) * q);
    }
    root(s * ln2, q)
}

/// Dyadic discretization of
/// `(∫₀^∞(∫₀^∞(t₁^{-θ₁} t₂^{-θ₂} K̂(t₁,t₂))^{q₁} dt₁/t₁)^{q₂/q₁} dt₂/t₂)^{1/q₂}`
/// with nodes `tᵢ = 2^{kᵢ}` and closed-form tails.
pub fn interp_norm_from_grid(grid: &KGrid, theta: [f64; 2], q: [f64; 2]) -> Result<f64> {
    if !(theta.iter().all(|&t| t > 0.0 && t < 1.0)) {
        return Err(Error::Parameter(format!("θ = {theta:?} must lie in (0,1)²")));
    }
    if !(q[0] > 0.0 && q[1] > 0.0) {
        return Err(Error::Parameter(format!("q = {q:?} must lie in (0, ∞]²")));
    }
    let rows: Vec<f64> = grid.values.iter().map(|row| axis_lq(row, theta[0], q[0], grid.j)).collect();
    Ok(axis_lq(&rows, theta[1], q[1], grid.j))
}

pub fn interp_norm(f: &DyadicStep2D, theta: [f64; 2], q: [f64; 2], j: u32) -> Result<f64> {
    interp_norm_from_grid(&KGrid::new(f, j)?, theta, q)
}

/// `max{1/(θ₁θ₂), 1/((1−θ₁)^{β₁}θ₂), 1/((1−θ₂)^{β₂}θ₁), 1/((1−θ₁)^{β₁}(1−θ₂)^{β₂})}`.
pub fn constant_d(theta: [f64; 2], q: [f64; 2]) -> Result<f64> {
    if !(theta.iter().all(|&t| t > 0.0 && t < 1.0)) {
        return Err(Error::Parameter(format!("θ = {theta:?} must lie in (0,1)²")));
    }
    let b = beta(q);
    let [t1, t2] = theta;
    let c1 = (1.0 - t1).powf(b[0]);
    let c2 = (1.0 - t2).powf(b[1]);
    Ok([1.0 / (t1 * t2), 1.0 / (c1 * t2), 1.0 / (c2 * t1), 1.0 / (c1 * c2)].into_iter().fold(0.0, f64::max))
}

/// `θ̄` with the matching Lorentz exponent `1/pᵢ = 1 − θᵢ/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaPoint {
    pub theta: [f64; 2],
    pub p: [f64; 2],
}

impl ThetaPoint {
    pub fn from_theta(theta: [f64; 2]) -> Result<Self> {
        if !(theta.iter().all(|&t| t > 0.0 && t < 1.0)) {
            return Err(Error::Parameter(format!("θ = {theta:?} must lie in (0,1)²")));
        }
        Ok(Self { theta, p: [1.0 / (1.0 - theta[0] / 2.0), 1.0 / (1.0 - theta[1] / 2.0)] })
    }

    pub fn beta(&self, q: [f64; 2]) -> [f64; 2] {
        beta(q)
    }
}

/// `θᵢ = 2(1 − 1/pᵢ)` for `pᵢ ∈ (1, 2)`.
pub fn theta_from_p(p: [f64; 2]) -> Result<ThetaPoint> {
    if !(p.iter().all(|&v| v > 1.0 && v < 2.0)) {
        return Err(Error::Parameter(format!("p = {p:?} must lie in (1,2)²")));
    }
    Ok(ThetaPoint { theta: [2.0 * (1.0 - 1.0 / p[0]), 2.0 * (1.0 - 1.0 / p[1])], p })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> DyadicStep2D {
        DyadicStep2D::constant([3, 3], 1.0).unwrap()
    }

    #[test]
    fn constant_one_at_t_one() {
        let k = k_upper(&one(), 1.0, 1.0).unwrap();
        assert_eq!((k.t00, k.t10, k.t01, k.t11), (1.0, 0.0, 0.0, 0.0));
        assert_eq!(k.k_hat(), 1.0);
    }

    #[test]
    fn constant_one_at_half() {
        let k = k_upper(&one(), 0.5, 0.5).unwrap();
        // P ≡ 1/4, Q ≡ 3/4 on every slice
        assert!((k.t00 - 1.0 / 16.0).abs() < 1e-15);
        assert!((k.t10 - 0.75f64.sqrt() / 4.0).abs() < 1e-15);
        assert!((k.t01 - 0.25 * 0.75f64.sqrt()).abs() < 1e-15);
        assert!((k.t11 - 0.75).abs() < 1e-15);
    }

    #[test]
    fn constant_one_factorizes() {
        let d = KDecomposer::new(&one());
        let g = |x: f64| if x >= 1.0 { 1.0 } else { x * x + x * (1.0 - x * x).sqrt() };
        for &(t1, t2) in &[(0.3, 0.7), (0.9, 0.2), (0.5, 3.0), (2.0, 0.125)] {
            let v = d.terms(t1, t2).k_hat();
            assert!((v - g(t1) * g(t2)).abs() < 1e-14, "({t1},{t2}): {v}");
        }
    }

    #[test]
    fn zero_function() {
        let z = DyadicStep2D::zeros([2, 2]).unwrap();
        assert_eq!(k_upper(&z, 0.7, 0.3).unwrap().k_hat(), 0.0);
        assert_eq!(interp_norm(&z, [0.5, 0.5], [2.0, 2.0], 6).unwrap(), 0.0);
    }

    #[test]
    fn constant_beyond_one() {
        let f = DyadicStep2D::from_rows(vec![vec![1.0, 4.0], vec![3.0, 2.0]]).unwrap();
        let d = KDecomposer::new(&f);
        let base = d.terms(1.0, 1.0).k_hat();
        for t in [1.5, 4.0, 1e3] {
            assert_eq!(d.terms(t, 1.0).k_hat(), base);
            assert_eq!(d.terms(1.0, t).k_hat(), base);
            assert_eq!(d.terms(t, 2.0 * t).k_hat(), base);
        }
    }

    #[test]
    fn d_examples() {
        assert!((constant_d([0.5, 0.5], [2.0, 2.0]).unwrap() - 4.0).abs() < 1e-12);
        let a = constant_d([0.3, 0.8], [4.0, 1.0]).unwrap();
        let b = constant_d([0.8, 0.3], [1.0, 4.0]).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert!(constant_d([0.999, 0.999], [2.0, 2.0]).unwrap() > 900.0);
        assert!(constant_d([1.0, 0.5], [2.0, 2.0]).is_err());
    }

    #[test]
    fn theta_p_relation() {
        let tp = theta_from_p([4.0 / 3.0, 4.0 / 3.0]).unwrap();
        assert!((tp.theta[0] - 0.5).abs() < 1e-15 && (tp.theta[1] - 0.5).abs() < 1e-15);
        assert!(theta_from_p([1.0 + 1e-9, 1.5]).unwrap().theta[0] < 1e-8);
        assert!(theta_from_p([2.0 - 1e-9, 1.5]).unwrap().theta[0] > 1.0 - 1e-8);
        assert!(theta_from_p([2.0, 1.5]).is_err());
        let back = ThetaPoint::from_theta([0.5, 0.2]).unwrap();
        assert!((back.p[0] - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn interp_norm_is_homogeneous() {
        let f = DyadicStep2D::from_rows(vec![vec![1.0, 4.0], vec![3.0, 2.0]]).unwrap();
        let a = interp_norm(&f, [0.4, 0.7], [2.0, f64::INFINITY], 8).unwrap();
        let b = interp_norm(&f.scaled(3.0).unwrap(), [0.4, 0.7], [2.0, f64::INFINITY], 8).unwrap();
        assert!((b - 3.0 * a).abs() < 1e-12 * b);
    }
}
