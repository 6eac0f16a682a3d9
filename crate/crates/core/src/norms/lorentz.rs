use crate::rearrange::iterated_rearrange_2d;
use crate::stepfun::{cell_power_weights, mul_zero_inf, sup_power_on_cell, DyadicStep2D};

use super::{pow, root, Exponents};

/// Evaluates
/// `(∫(∫(t₁^{s₁} t₂^{s₂} F)^{q₁} dt₁/t₁)^{q₂/q₁} dt₂/t₂)^{1/q₂}` for the
/// rearranged `F = f^{*₁,*₂}` at arbitrary weight exponents `s̄`.
///
/// Because `F` is constant on cells, the inner integral factors as
/// `t₂^{s₂} ρ(t₂)` with `ρ` constant on each x₂-cell, so both levels reduce
/// to sums of cell power weights.
#[derive(Clone, Debug)]
pub struct LorentzKernel {
    levels: [u32; 2],
    width: usize,
    q: [f64; 2],
    /// `F` (when `q₁ = ∞`) or `F^{q₁}` per cell, row-major.
    cells: Vec<f64>,
    /// Number of leading nonzero cells in each row.
    row_support: Vec<usize>,
}

impl LorentzKernel {
    pub fn new(f: &DyadicStep2D, q: [f64; 2]) -> Self {
        Self::from_rearranged(&iterated_rearrange_2d(f), q)
    }

    /// Builds the kernel from an already rearranged grid.
    pub fn from_rearranged(rearranged: &DyadicStep2D, q: [f64; 2]) -> Self {
        let width = rearranged.width();
        let cells = if q[0].is_infinite() {
            rearranged.values().to_vec()
        } else {
            rearranged.values().iter().map(|&v| pow(v, q[0])).collect()
        };
        let row_support = rearranged
            .rows()
            .map(|row| row.iter().take_while(|&&v| v > 0.0).count())
            .collect();
        Self { levels: rearranged.levels(), width, q, cells, row_support }
    }

    pub fn q(&self) -> [f64; 2] {
        self.q
    }

    /// Per-row inner values `ρ_{j₂}` (without the `t₂^{s₂}` factor).
    pub fn row_values(&self, s1: f64) -> Vec<f64> {
        let n1 = self.width;
        let h1 = 1.0 / n1 as f64;
        let q1 = self.q[0];
        let weights = if q1.is_infinite() {
            (0..n1).map(|j| sup_power_on_cell(s1, j as f64 * h1, (j + 1) as f64 * h1)).collect::<Vec<_>>()
        } else {
            cell_power_weights(self.levels[0], s1 * q1)
        };
        self.cells
            .chunks_exact(n1)
            .zip(&self.row_support)
            .map(|(row, &support)| {
                let row = &row[..support];
                if q1.is_infinite() {
                    row.iter().zip(&weights).map(|(&v, &w)| mul_zero_inf(v, w)).fold(0.0, f64::max)
                } else {
                    root(row.iter().zip(&weights).map(|(&v, &w)| mul_zero_inf(v, w)).sum(), q1)
                }
            })
            .collect()
    }

    pub fn eval(&self, s: [f64; 2]) -> f64 {
        self.outer(&self.row_values(s[0]), s[1])
    }

    /// Outer integral over t₂ of precomputed row values.
    pub fn outer(&self, rho: &[f64], s2: f64) -> f64 {
        let q2 = self.q[1];
        let n2 = rho.len();
        let h2 = 1.0 / n2 as f64;
        if q2.is_infinite() {
            rho.iter()
                .enumerate()
                .take_while(|(_, &r)| r > 0.0)
                .map(|(j, &r)| mul_zero_inf(r, sup_power_on_cell(s2, j as f64 * h2, (j + 1) as f64 * h2)))
                .fold(0.0, f64::max)
        } else {
            let weights = cell_power_weights(self.levels[1], s2 * q2);
            let total: f64 = rho
                .iter()
                .zip(&weights)
                .take_while(|(&r, _)| r > 0.0)
                .map(|(&r, &w)| mul_zero_inf(pow(r, q2), w))
                .sum();
            root(total, q2)
        }
    }
}

/// Anisotropic Lorentz norm `‖f‖_{L_{p̄,q̄}}`; divergent values are `+∞`.
pub fn lorentz_norm(f: &DyadicStep2D, e: &Exponents) -> f64 {
    LorentzKernel::new(f, e.q).eval(e.inv_p())
}

/// The Lorentz functional with weight exponents `s̄` in place of `1/p̄`.
pub fn lorentz_norm_shifted(f: &DyadicStep2D, q: [f64; 2], s: [f64; 2]) -> f64 {
    LorentzKernel::new(f, q).eval(s)
}

/// Mixed-norm Lebesgue norm, inner in x₁ and outer in x₂.
pub fn mixed_lebesgue_norm(f: &DyadicStep2D, p: [f64; 2]) -> f64 {
    let h1 = 1.0 / f.width() as f64;
    let h2 = 1.0 / f.height() as f64;
    let rows: Vec<f64> = f
        .rows()
        .map(|row| {
            if p[0].is_infinite() {
                row.iter().copied().fold(0.0, f64::max)
            } else {
                root(row.iter().map(|&v| pow(v, p[0])).sum::<f64>() * h1, p[0])
            }
        })
        .collect();
    if p[1].is_infinite() {
        rows.into_iter().fold(0.0, f64::max)
    } else {
        root(rows.iter().map(|&r| pow(r, p[1])).sum::<f64>() * h2, p[1])
    }
}
