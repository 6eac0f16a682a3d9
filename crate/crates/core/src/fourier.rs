//! Fourier coefficients of step functions in bounded orthonormal tensor
//! systems (trigonometric and Paley-ordered Walsh), plus the block statistics
//! of their rearranged magnitudes.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::{dyadic_block_norm, BlockSums, Exponents, GrandParams, GrandValue, SeqSign};
use crate::rearrange::{RearrangeOrder, Sequence2D};
use crate::stepfun::DyadicStep2D;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    Trig,
    Walsh,
}

impl SystemKind {
    pub fn name(self) -> &'static str {
        match self {
            SystemKind::Trig => "trig",
            SystemKind::Walsh => "walsh",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrthonormalSystem {
    pub kind: SystemKind,
    /// Uniform bound `‖φₙ‖_∞ ≤ M`.
    pub bound: f64,
}

impl OrthonormalSystem {
    pub const TRIG: Self = Self { kind: SystemKind::Trig, bound: 1.0 };
    pub const WALSH: Self = Self { kind: SystemKind::Walsh, bound: 1.0 };

    pub fn of(kind: SystemKind) -> Self {
        match kind {
            SystemKind::Trig => Self::TRIG,
            SystemKind::Walsh => Self::WALSH,
        }
    }

    /// Default truncation for a grid at `level`: the full Walsh span, or
    /// `2^{level+2}` trigonometric frequencies.
    pub fn default_truncation(&self, level: u32) -> usize {
        match self.kind {
            SystemKind::Walsh => 1 << level,
            SystemKind::Trig => 1 << (level + 2),
        }
    }
}

/// Frequency of the `n`-th trigonometric function in the order 0, 1, −1, 2, −2, …
pub fn trig_frequency(n: usize) -> i64 {
    if n == 0 {
        0
    } else if n % 2 == 1 {
        ((n + 1) / 2) as i64
    } else {
        -((n / 2) as i64)
    }
}

fn bit_reverse(j: usize, bits: u32) -> usize {
    if bits == 0 {
        0
    } else {
        j.reverse_bits() >> (usize::BITS - bits)
    }
}

/// Cell values (±1) of the Paley-ordered Walsh function `w_n` at `level`.
pub fn walsh_values(n: usize, level: u32) -> Result<Vec<f64>> {
    let cells = 1usize << level;
    if n >= cells {
        return Err(Error::WalshResolution { requested: n + 1, available: cells });
    }
    Ok((0..cells)
        .map(|j| if (n & bit_reverse(j, level)).count_ones() % 2 == 0 { 1.0 } else { -1.0 })
        .collect())
}

/// `w_n(x)` for `x ∈ [0,1)`.
pub fn walsh_eval(n: usize, x: f64) -> f64 {
    let mut sign = 1.0;
    let mut frac = x;
    let mut m = n;
    while m > 0 {
        frac *= 2.0;
        let bit = frac >= 1.0;
        if bit {
            frac -= 1.0;
        }
        if m & 1 == 1 && bit {
            sign = -sign;
        }
        m >>= 1;
    }
    sign
}

/// In-place fast Walsh–Hadamard transform (natural order, unnormalized).
fn fwht(v: &mut [f64]) {
    let n = v.len();
    let mut h = 1;
    while h < n {
        for block in v.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

/// Paley-ordered Walsh coefficients `∫₀¹ g w_n` of a step function given by
/// its `2^level` cell values.
fn walsh_1d(values: &[f64], level: u32) -> Vec<f64> {
    let n = values.len();
    let mut v: Vec<f64> = (0..n).map(|j| values[bit_reverse(j, level)]).collect();
    fwht(&mut v);
    let h = 1.0 / n as f64;
    v.iter_mut().for_each(|x| *x *= h);
    v
}

/// `∫_cell e^{−2πiνx} dx` for every cell of the level, as a `K × 2^level` matrix.
fn trig_cell_integrals(k: usize, level: u32) -> Vec<Complex64> {
    let cells = 1usize << level;
    let h = 1.0 / cells as f64;
    let period = 2 * cells as i64;
    let mut out = Vec::with_capacity(k * cells);
    for n in 0..k {
        let nu = trig_frequency(n);
        if nu == 0 {
            out.extend(std::iter::repeat(Complex64::new(h, 0.0)).take(cells));
            continue;
        }
        // h · sinc(νh) · e^{−2πiν(j+½)h}; the phase ν(2j+1)/(2·2^level) is reduced exactly.
        let x = PI * nu as f64 * h;
        let amp = h * x.sin() / x;
        for j in 0..cells {
            let num = (nu * (2 * j as i64 + 1)).rem_euclid(period);
            let phase = -2.0 * PI * num as f64 / period as f64;
            out.push(Complex64::from_polar(amp, phase));
        }
    }
    out
}

/// Truncated coefficient matrix `a_{k₁k₂}`, rows indexed by `k₁`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffMatrix {
    pub systems: [OrthonormalSystem; 2],
    pub k: [usize; 2],
    pub entries: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct CoeffDump {
    system: [SystemKind; 2],
    #[serde(rename = "K")]
    k: [usize; 2],
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl CoeffMatrix {
    pub fn get(&self, k1: usize, k2: usize) -> Complex64 {
        self.entries[k1 * self.k[1] + k2]
    }

    pub fn magnitudes(&self) -> Sequence2D {
        Sequence2D::new(self.k, self.entries.iter().map(|c| c.norm()).collect()).expect("finite magnitudes")
    }

    pub fn sum_sq(&self) -> f64 {
        self.entries.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn block_sums(&self, order: RearrangeOrder) -> BlockSums {
        BlockSums::new(&self.magnitudes(), order)
    }

    pub fn to_dump_json(&self) -> Result<String> {
        let rows = |f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
            self.entries.chunks(self.k[1].max(1)).map(|r| r.iter().map(f).collect()).collect()
        };
        let dump = CoeffDump {
            system: [self.systems[0].kind, self.systems[1].kind],
            k: self.k,
            re: rows(|c| c.re),
            im: rows(|c| c.im),
        };
        Ok(serde_json::to_string(&dump)?)
    }

    pub fn from_dump_json(s: &str) -> Result<Self> {
        let d: CoeffDump = serde_json::from_str(s)?;
        if d.re.len() != d.k[0] || d.im.len() != d.k[0] {
            return Err(Error::InvalidGrid(format!("coefficient dump needs {} rows", d.k[0])));
        }
        let mut entries = Vec::with_capacity(d.k[0] * d.k[1]);
        for (r, i) in d.re.iter().zip(&d.im) {
            if r.len() != d.k[1] || i.len() != d.k[1] {
                return Err(Error::InvalidGrid(format!("coefficient dump rows need {} entries", d.k[1])));
            }
            entries.extend(r.iter().zip(i).map(|(&re, &im)| Complex64::new(re, im)));
        }
        Ok(Self { systems: [OrthonormalSystem::of(d.system[0]), OrthonormalSystem::of(d.system[1])], k: d.k, entries })
    }
}

/// Coefficients of `f` against `sys₁ ⊗ sys₂`, truncated to `K₁ × K₂`.
pub fn coeffs_2d(f: &DyadicStep2D, sys: [OrthonormalSystem; 2], k: [usize; 2]) -> Result<CoeffMatrix> {
    coeffs_2d_signed(f.levels(), f.values(), sys, k)
}

/// As [`coeffs_2d`] for real cell values of either sign (same layout as
/// [`DyadicStep2D`]).
pub fn coeffs_2d_signed(
    levels: [u32; 2],
    values: &[f64],
    sys: [OrthonormalSystem; 2],
    k: [usize; 2],
) -> Result<CoeffMatrix> {
    let width = 1usize << levels[0];
    let height = 1usize << levels[1];
    if values.len() != width * height || values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidGrid(format!("need {} finite values for levels {levels:?}", width * height)));
    }
    for axis in 0..2 {
        let cells = 1usize << levels[axis];
        if sys[axis].kind == SystemKind::Walsh && k[axis] > cells {
            return Err(Error::WalshResolution { requested: k[axis], available: cells });
        }
    }

    // Transform along x₁ for every x₂-slice: t[j₂][k₁].
    let t: Vec<Vec<Complex64>> = match sys[0].kind {
        SystemKind::Walsh => values
            .par_chunks(width)
            .map(|row| walsh_1d(row, levels[0])[..k[0]].iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect(),
        SystemKind::Trig => {
            let e1 = trig_cell_integrals(k[0], levels[0]);
            values
                .par_chunks(width)
                .map(|row| {
                    (0..k[0])
                        .map(|n| e1[n * width..(n + 1) * width].iter().zip(row).map(|(e, &v)| e * v).sum())
                        .collect()
                })
                .collect()
        }
    };

    // Transform along x₂ for every k₁.
    let entries_by_k1: Vec<Vec<Complex64>> = match sys[1].kind {
        SystemKind::Walsh => (0..k[0])
            .into_par_iter()
            .map(|k1| {
                let re: Vec<f64> = t.iter().map(|r| r[k1].re).collect();
                let im: Vec<f64> = t.iter().map(|r| r[k1].im).collect();
                let (wr, wi) = (walsh_1d(&re, levels[1]), walsh_1d(&im, levels[1]));
                (0..k[1]).map(|n| Complex64::new(wr[n], wi[n])).collect()
            })
            .collect(),
        SystemKind::Trig => {
            let e2 = trig_cell_integrals(k[1], levels[1]);
            (0..k[0])
                .into_par_iter()
                .map(|k1| {
                    (0..k[1])
                        .map(|n| e2[n * height..(n + 1) * height].iter().zip(&t).map(|(e, r)| e * r[k1]).sum())
                        .collect()
                })
                .collect()
        }
    };

    Ok(CoeffMatrix { systems: sys, k, entries: entries_by_k1.into_iter().flatten().collect() })
}

/// `(Σ_{k₂≤N₂} Σ_{k₁≤N₁} (a*_{k₁k₂})²)^{1/2}` in the given rearrangement order.
pub fn block_l2(a: &CoeffMatrix, n: [usize; 2], order: RearrangeOrder) -> f64 {
    a.block_sums(order).prefix(n[0], n[1]).sqrt()
}

fn require_q_at_least_two(q: [f64; 2]) -> Result<()> {
    if q[0] >= 2.0 && q[1] >= 2.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("log-weighted block bounds need q ≥ 2, got {q:?}")))
    }
}

/// `sup_{k₁,k₂} (ln k̄₁)^{1/q₁−1/2} (ln k̄₂)^{1/q₂−1/2} (Σ_{m≤k}(a^{*₂,*₁})²)^{1/2}`,
/// `k̄ = max(k, 2)`, over `1 ≤ kᵢ ≤` the padded truncation.
pub fn bochkarev_lhs(bs: &BlockSums, q: [f64; 2]) -> Result<f64> {
    require_q_at_least_two(q)?;
    let [d1, d2] = bs.dims();
    let w = |k: usize, q: f64| (k.max(2) as f64).ln().powf(1.0 / q - 0.5);
    let w2: Vec<f64> = (1..=d2).map(|k| w(k, q[1])).collect();
    let mut best = 0.0f64;
    for k1 in 1..=d1 {
        let w1 = w(k1, q[0]);
        for (k2, &wk2) in (1..=d2).zip(&w2) {
            best = best.max(w1 * wk2 * bs.prefix(k1, k2).sqrt());
        }
    }
    Ok(best)
}

/// `sup_{n₁,n₂ ≥ 1} n₂^{1/q₂−1/2} n₁^{1/q₁−1/2} S(n₁,n₂)^{1/2}` with `S` the
/// top `2^{n₁} × 2^{n₂}` block sum.
pub fn dyadic_bochkarev_lhs(bs: &BlockSums, q: [f64; 2]) -> Result<f64> {
    require_q_at_least_two(q)?;
    let [l1, l2] = bs.log_dims();
    let mut best = 0.0f64;
    for n1 in 1..=l1.max(1) {
        for n2 in 1..=l2.max(1) {
            let w = (n1 as f64).powf(1.0 / q[0] - 0.5) * (n2 as f64).powf(1.0 / q[1] - 0.5);
            best = best.max(w * bs.dyadic(n1, n2).sqrt());
        }
    }
    Ok(best)
}

/// Left side of the Hardy–Littlewood-type coefficient bound at `θ̄`:
/// weights `2^{k/p′}` with `1/p′ᵢ = θᵢ/2`.
pub fn te3_lhs(bs: &BlockSums, theta: [f64; 2], q: [f64; 2]) -> f64 {
    dyadic_block_norm(bs, [theta[0] / 2.0, theta[1] / 2.0], q)
}

/// `βᵢ = max(1/2, 1/qᵢ)`.
pub fn beta(q: [f64; 2]) -> [f64; 2] {
    [(1.0 / q[0]).max(0.5), (1.0 / q[1]).max(0.5)]
}

/// Grand sequence norm of the coefficients at `λ̄ = θ̄ + β̄`, `p̄ = 2̄`, minus sign.
pub fn te4_lhs(bs: &BlockSums, q: [f64; 2], g: &GrandParams) -> Result<GrandValue> {
    let b = beta(q);
    let lambda = GrandParams { theta: [g.theta[0] + b[0], g.theta[1] + b[1]], ..*g };
    let e = Exponents::new([2.0, 2.0], q)?;
    crate::norms::grand_seq_norm_blocks(bs, &e, &lambda, SeqSign::Minus)
}
