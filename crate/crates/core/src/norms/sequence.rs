use crate::error::{Error, Result};
use crate::rearrange::{iterated_rearrange_seq_order, RearrangeOrder, Sequence2D};

use super::{pow, root, ApproxDirection, Exponents, GrandParams, GrandValue, SeqSign};

/// Prefix sums of squared rearranged entries.
///
/// `prefix(n₁, n₂) = Σ_{m₁ ≤ n₁} Σ_{m₂ ≤ n₂} (a*_{m₁m₂})²` with 1-based
/// bounds clamped to the (power-of-two padded) dimensions.
#[derive(Clone, Debug)]
pub struct BlockSums {
    dims: [usize; 2],
    log_dims: [u32; 2],
    prefix: Vec<f64>,
}

impl BlockSums {
    pub fn new(a: &Sequence2D, order: RearrangeOrder) -> Self {
        let padded = a.padded_pow2();
        let r = iterated_rearrange_seq_order(&padded, order);
        let [d1, d2] = r.dims();
        let mut prefix = vec![0.0; d1 * d2];
        for i in 0..d1 {
            let mut row_acc = 0.0;
            for j in 0..d2 {
                let v = r.get(i, j);
                row_acc += v * v;
                let above = if i > 0 { prefix[(i - 1) * d2 + j] } else { 0.0 };
                prefix[i * d2 + j] = above + row_acc;
            }
        }
        Self { dims: [d1, d2], log_dims: [d1.trailing_zeros(), d2.trailing_zeros()], prefix }
    }

    pub fn dims(&self) -> [usize; 2] {
        self.dims
    }

    /// `[log₂ D₁, log₂ D₂]` of the padded dimensions.
    pub fn log_dims(&self) -> [u32; 2] {
        self.log_dims
    }

    pub fn prefix(&self, n1: usize, n2: usize) -> f64 {
        if n1 == 0 || n2 == 0 {
            return 0.0;
        }
        let i = n1.min(self.dims[0]) - 1;
        let j = n2.min(self.dims[1]) - 1;
        self.prefix[i * self.dims[1] + j]
    }

    /// `S(k₁,k₂)`: the top `2^{k₁} × 2^{k₂}` block.
    pub fn dyadic(&self, k1: u32, k2: u32) -> f64 {
        let n1 = 1usize << k1.min(self.log_dims[0]);
        let n2 = 1usize << k2.min(self.log_dims[1]);
        self.prefix(n1, n2)
    }

    pub fn total(&self) -> f64 {
        self.prefix.last().copied().unwrap_or(0.0)
    }
}

/// `(Σ_{k≥0} (2^{k u} c_{min(k,K)})^q)^{1/q}` for `c = [c₀, …, c_K]`, with the
/// constant tail summed as a geometric series.
pub fn dyadic_lq(c: &[f64], u: f64, q: f64) -> f64 {
    let kmax = c.len() - 1;
    let last = c[kmax];
    let weight = |k: usize| (k as f64 * u).exp2();
    if q.is_infinite() {
        if last > 0.0 && u > 0.0 {
            return f64::INFINITY;
        }
        return c.iter().enumerate().map(|(k, &v)| if v == 0.0 { 0.0 } else { weight(k) * v }).fold(0.0, f64::max);
    }
    let mut total: f64 = c[..kmax]
        .iter()
        .enumerate()
        .map(|(k, &v)| if v == 0.0 { 0.0 } else { pow(weight(k) * v, q) })
        .sum();
    if last > 0.0 {
        if u >= 0.0 {
            return f64::INFINITY;
        }
        // Σ_{k ≥ K} 2^{k u q} = 2^{K u q} / (1 − 2^{u q})
        let ratio = -(u * q * std::f64::consts::LN_2).exp_m1();
        total += pow(weight(kmax) * last, q) / ratio;
    }
    root(total, q)
}

/// `(Σ_{k₂}(Σ_{k₁}(2^{k₁s₁ + k₂s₂}[2^{-k₁-k₂} S(k₁,k₂)]^{1/2})^{q₁})^{q₂/q₁})^{1/q₂}`
/// summed over all `k ≥ 0`.
pub fn dyadic_block_norm(bs: &BlockSums, s: [f64; 2], q: [f64; 2]) -> f64 {
    let [k1max, k2max] = bs.log_dims();
    let u = [s[0] - 0.5, s[1] - 0.5];
    let rows: Vec<f64> = (0..=k2max)
        .map(|k2| {
            let c: Vec<f64> = (0..=k1max).map(|k1| bs.dyadic(k1, k2).sqrt()).collect();
            dyadic_lq(&c, u[0], q[0])
        })
        .collect();
    if rows.iter().any(|r| r.is_infinite()) {
        return f64::INFINITY;
    }
    dyadic_lq(&rows, u[1], q[1])
}

/// Discrete grand norm of a coefficient sequence (sup form only).
///
/// `Plus` shifts the weight exponents to `1/p + ε`, `Minus` to `1/p − ε`.
/// Components with `θᵢ = 0` use `εᵢ = 0`.
pub fn grand_seq_norm(a: &Sequence2D, e: &Exponents, g: &GrandParams, sign: SeqSign) -> Result<GrandValue> {
    grand_seq_norm_blocks(&BlockSums::new(a, RearrangeOrder::Seq), e, g, sign)
}

pub(crate) fn grand_seq_norm_blocks(bs: &BlockSums, e: &Exponents, g: &GrandParams, sign: SeqSign) -> Result<GrandValue> {
    if !g.is_sup_form()? {
        return Err(Error::Parameter(format!("sequence norm needs θ ≥ 0, got {:?}", g.theta)));
    }
    let inv_p = e.inv_p();
    let sgn = match sign {
        SeqSign::Plus => 1.0,
        SeqSign::Minus => -1.0,
    };
    let grid = |i: usize| -> Vec<f64> {
        if g.theta[i] == 0.0 {
            vec![0.0]
        } else {
            (0..=g.eps_j).map(|j| g.delta[i] * 0.5f64.powi(j as i32)).collect()
        }
    };
    let (g1, g2) = (grid(0), grid(1));
    let mut best = (f64::NEG_INFINITY, [0.0, 0.0]);
    for &e1 in &g1 {
        for &e2 in &g2 {
            let n = dyadic_block_norm(bs, [inv_p[0] + sgn * e1, inv_p[1] + sgn * e2], e.q);
            let w = if g.theta[0] == 0.0 { 1.0 } else { e1.powf(g.theta[0]) }
                * if g.theta[1] == 0.0 { 1.0 } else { e2.powf(g.theta[1]) };
            let v = if n == 0.0 { 0.0 } else { w * n };
            if v > best.0 {
                best = (v, [e1, e2]);
            }
        }
    }
    let direction = if g.theta == [0.0, 0.0] { ApproxDirection::Exact } else { ApproxDirection::Under };
    Ok(GrandValue { value: best.0, direction, argmax_eps: best.1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    const INF: f64 = f64::INFINITY;

    fn single(dims: [usize; 2], at: (usize, usize), c: f64) -> Sequence2D {
        let mut e = vec![0.0; dims[0] * dims[1]];
        e[at.0 * dims[1] + at.1] = c;
        Sequence2D::new(dims, e).unwrap()
    }

    #[test]
    fn prefix_sums() {
        let a = Sequence2D::from_rows(vec![vec![1.0, 4.0], vec![3.0, 2.0]]).unwrap();
        let bs = BlockSums::new(&a, RearrangeOrder::Seq);
        // a^{*₂,*₁} = [[4,2],[3,1]]
        assert_eq!(bs.prefix(1, 1), 16.0);
        assert_eq!(bs.prefix(1, 2), 20.0);
        assert_eq!(bs.prefix(2, 1), 25.0);
        assert_eq!(bs.total(), 30.0);
        assert_eq!(bs.dyadic(5, 0), 25.0);
    }

    #[test]
    fn dyadic_lq_geometric_tail() {
        // c ≡ 1, u = −1, q = 1: Σ 2^{-k} = 2
        assert!((dyadic_lq(&[1.0, 1.0, 1.0], -1.0, 1.0) - 2.0).abs() < 1e-15);
        assert!((dyadic_lq(&[1.0], -1.0, 2.0) - (4.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(dyadic_lq(&[1.0, 0.5], 0.0, INF), 1.0);
        assert!(dyadic_lq(&[1.0, 0.5], 0.0, 2.0).is_infinite());
        assert_eq!(dyadic_lq(&[1.0, 0.0], 3.0, 2.0), 1.0);
    }

    #[test]
    fn single_entry_minus_sign() {
        let a = single([4, 4], (2, 3), 1.0);
        let e = Exponents::new([2.0, 2.0], [INF, INF]).unwrap();
        let v = grand_seq_norm(&a, &e, &GrandParams::new([1.0, 1.0]), SeqSign::Minus).unwrap();
        assert!((v.value - 1.0).abs() < 1e-15);
        assert_eq!(v.argmax_eps, [1.0, 1.0]);
    }

    #[test]
    fn plus_sign_diverges_for_nonzero() {
        let a = single([2, 2], (0, 0), 1.0);
        let e = Exponents::new([2.0, 2.0], [INF, INF]).unwrap();
        let v = grand_seq_norm(&a, &e, &GrandParams::new([1.0, 1.0]), SeqSign::Plus).unwrap();
        assert!(v.value.is_infinite());
        let z = Sequence2D::zeros([2, 2]);
        let v = grand_seq_norm(&z, &e, &GrandParams::new([1.0, 1.0]), SeqSign::Plus).unwrap();
        assert_eq!(v.value, 0.0);
    }

    #[test]
    fn negative_theta_rejected() {
        let a = single([2, 2], (0, 0), 1.0);
        let e = Exponents::new([2.0, 2.0], [1.0, 1.0]).unwrap();
        assert!(grand_seq_norm(&a, &e, &GrandParams::new([-1.0, -1.0]), SeqSign::Minus).is_err());
    }

    #[test]
    fn single_entry_finite_q_closed_form() {
        // Minus sign, p̄ = 2̄, q̄ = (1,1), single unit entry: Σ_k 2^{-ε·k} per axis.
        let a = single([1, 1], (0, 0), 1.0);
        let e = Exponents::new([2.0, 2.0], [1.0, 1.0]).unwrap();
        let g = GrandParams::new([1.0, 1.0]).with_eps_j(6);
        let v = grand_seq_norm(&a, &e, &g, SeqSign::Minus).unwrap();
        // ε / (1 − 2^{-ε}) increases on (0,1], so the sup sits at ε = 1 with value 2 per axis.
        assert!((v.value - 4.0).abs() < 1e-12, "{}", v.value);
        assert_eq!(v.argmax_eps, [1.0, 1.0]);
    }
}
