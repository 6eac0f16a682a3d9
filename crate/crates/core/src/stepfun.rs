//! Dyadic piecewise-constant functions on `[0,1)` and `[0,1)²`.
//!
//! A 2D grid at levels `(n₁, n₂)` stores `2^{n₂}` rows (x₂-slices), each holding
//! `2^{n₁}` cells along x₁. Arguments at or beyond 1 evaluate to zero, which is
//! the zero extension used by every tail integral in this crate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_values(values: &[f64]) -> Result<()> {
    if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::InvalidGrid(format!(
            "value {v} at flat index {i} is not a finite nonnegative number"
        )));
    }
    Ok(())
}

/// `∫_a^b t^{c-1} dt` for `0 ≤ a < b`.
///
/// Equals `(b^c − a^c)/c` for `c ≠ 0` and `ln(b/a)` for `c = 0`; when `c ≤ 0`
/// the integral diverges at `a = 0`.
pub fn power_weight_integral(c: f64, a: f64, b: f64) -> Result<f64> {
    if !(a >= 0.0 && a < b && c.is_finite()) {
        return Err(Error::Domain(format!("power weight on ({a}, {b}] with exponent {c}")));
    }
    if a == 0.0 {
        if c <= 0.0 {
            return Err(Error::Divergent(format!("∫₀^{b} t^({c}-1) dt")));
        }
        return Ok(b.powf(c) / c);
    }
    let log_ratio = (b / a).ln();
    if c == 0.0 {
        return Ok(log_ratio);
    }
    // a^c (e^{c ln(b/a)} − 1)/c stays accurate when c is tiny.
    Ok(a.powf(c) * (c * log_ratio).exp_m1() / c)
}

/// Per-cell values of `∫_cell t^{c-1} dt` on the uniform dyadic partition of
/// `(0,1]` at `level`. The first cell is `+∞` when `c ≤ 0`.
pub(crate) fn cell_power_weights(level: u32, c: f64) -> Vec<f64> {
    let n = 1usize << level;
    let h = 1.0 / n as f64;
    (0..n)
        .map(|j| {
            let a = j as f64 * h;
            let b = (j + 1) as f64 * h;
            power_weight_integral(c, a, b).unwrap_or(f64::INFINITY)
        })
        .collect()
}

/// `sup_{t ∈ (a,b)} t^s` for a cell `(a,b) ⊂ (0,1]`.
pub(crate) fn sup_power_on_cell(s: f64, a: f64, b: f64) -> f64 {
    if s > 0.0 {
        b.powf(s)
    } else if s == 0.0 {
        1.0
    } else if a == 0.0 {
        f64::INFINITY
    } else {
        a.powf(s)
    }
}

/// `value · weight` with the measure-theoretic convention `0 · ∞ = 0`.
#[inline]
pub(crate) fn mul_zero_inf(value: f64, weight: f64) -> f64 {
    if value == 0.0 {
        0.0
    } else {
        value * weight
    }
}

/// Step function on `[0,1)` with `2^level` equal cells.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DyadicStep1D {
    level: u32,
    values: Vec<f64>,
}

impl DyadicStep1D {
    pub fn new(level: u32, values: Vec<f64>) -> Result<Self> {
        if level > 30 || values.len() != 1usize << level {
            return Err(Error::InvalidGrid(format!(
                "level {level} requires {} values, got {}",
                1u64 << level.min(63),
                values.len()
            )));
        }
        check_values(&values)?;
        Ok(Self { level, values })
    }

    /// Builds a step function from any power-of-two number of cell values.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if !values.len().is_power_of_two() {
            return Err(Error::InvalidGrid(format!("{} cells is not a power of two", values.len())));
        }
        let level = values.len().trailing_zeros();
        Self::new(level, values)
    }

    pub fn constant(level: u32, c: f64) -> Result<Self> {
        Self::new(level, vec![c; 1usize << level])
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn cell_width(&self) -> f64 {
        1.0 / self.values.len() as f64
    }

    pub fn evaluate(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("evaluation point {t} must be positive")));
        }
        if t >= 1.0 {
            return Ok(0.0);
        }
        let j = (t * self.values.len() as f64) as usize;
        Ok(self.values[j.min(self.values.len() - 1)])
    }
}

/// Exact `∫_a^b t^{c-1} g(t) dt` for a dyadic step function `g`.
pub fn weighted_integral_1d(g: &DyadicStep1D, c: f64, a: f64, b: f64) -> Result<f64> {
    if !(0.0 <= a && a < b && b <= 1.0) {
        return Err(Error::Domain(format!("interval ({a}, {b}] is not inside (0, 1]")));
    }
    if c <= 0.0 && a == 0.0 {
        return Err(Error::Divergent(format!("weight t^({c}-1) is not integrable at 0")));
    }
    let h = g.cell_width();
    let first = (a / h).floor() as usize;
    let mut total = 0.0;
    for (j, &v) in g.values.iter().enumerate().skip(first) {
        let lo = (j as f64 * h).max(a);
        let hi = ((j + 1) as f64 * h).min(b);
        if lo >= hi {
            if lo >= b {
                break;
            }
            continue;
        }
        if v != 0.0 {
            total += v * power_weight_integral(c, lo, hi)?;
        }
    }
    Ok(total)
}

/// Step function on `[0,1)²`, constant on dyadic rectangles.
///
/// Storage is row-major with rows indexed by the x₂ cell and columns by the x₁
/// cell, so `values[j₂ · 2^{n₁} + j₁]` covers
/// `[j₁ 2^{-n₁}, (j₁+1) 2^{-n₁}) × [j₂ 2^{-n₂}, (j₂+1) 2^{-n₂})`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridFile", into = "GridFile")]
pub struct DyadicStep2D {
    levels: [u32; 2],
    values: Vec<f64>,
}

/// On-disk form: `{"levels":[n1,n2],"values":[[...],...]}`, outer index x₂.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridFile {
    pub levels: [u32; 2],
    pub values: Vec<Vec<f64>>,
}

impl TryFrom<GridFile> for DyadicStep2D {
    type Error = Error;

    fn try_from(file: GridFile) -> Result<Self> {
        let width = 1usize << file.levels[0].min(30);
        let height = 1usize << file.levels[1].min(30);
        if file.values.len() != height || file.values.iter().any(|row| row.len() != width) {
            return Err(Error::InvalidGrid(format!(
                "levels {:?} require {height} rows of {width} values",
                file.levels
            )));
        }
        Self::new(file.levels, file.values.into_iter().flatten().collect())
    }
}

impl From<DyadicStep2D> for GridFile {
    fn from(f: DyadicStep2D) -> Self {
        let values = f.rows().map(<[f64]>::to_vec).collect();
        GridFile { levels: f.levels, values }
    }
}

impl DyadicStep2D {
    pub fn new(levels: [u32; 2], values: Vec<f64>) -> Result<Self> {
        if levels[0] > 15 || levels[1] > 15 {
            return Err(Error::InvalidGrid(format!("levels {levels:?} exceed the supported maximum 15")));
        }
        let expected = (1usize << levels[0]) * (1usize << levels[1]);
        if values.len() != expected {
            return Err(Error::InvalidGrid(format!(
                "levels {levels:?} require {expected} values, got {}",
                values.len()
            )));
        }
        check_values(&values)?;
        Ok(Self { levels, values })
    }

    /// Builds a grid from rows (outer index x₂), inferring the levels.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let height = rows.len();
        let width = rows.first().map_or(0, Vec::len);
        if !height.is_power_of_two() || !width.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("{height}×{width} is not a dyadic grid")));
        }
        let levels = [width.trailing_zeros(), height.trailing_zeros()];
        Self::try_from(GridFile { levels, values: rows })
    }

    pub fn constant(levels: [u32; 2], c: f64) -> Result<Self> {
        let n = (1usize << levels[0]) * (1usize << levels[1]);
        Self::new(levels, vec![c; n])
    }

    pub fn zeros(levels: [u32; 2]) -> Result<Self> {
        Self::constant(levels, 0.0)
    }

    /// `g(x₁) h(x₂)`.
    pub fn tensor(g: &DyadicStep1D, h: &DyadicStep1D) -> Self {
        let values = h.values().iter().flat_map(|&hv| g.values().iter().map(move |&gv| gv * hv)).collect();
        Self { levels: [g.level(), h.level()], values }
    }

    pub fn levels(&self) -> [u32; 2] {
        self.levels
    }

    /// Number of cells along x₁.
    pub fn width(&self) -> usize {
        1 << self.levels[0]
    }

    /// Number of cells along x₂.
    pub fn height(&self) -> usize {
        1 << self.levels[1]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, j1: usize, j2: usize) -> f64 {
        self.values[j2 * self.width() + j1]
    }

    /// The x₂-slice `j2` as a slice of x₁-cells.
    pub fn row(&self, j2: usize) -> &[f64] {
        let w = self.width();
        &self.values[j2 * w..(j2 + 1) * w]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.width())
    }

    pub fn cell_measure(&self) -> f64 {
        1.0 / self.values.len() as f64
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        Self::new(self.levels, self.values.iter().map(|v| v * lambda).collect())
    }

    /// `g(x₁, x₂) = f(x₂, x₁)`.
    pub fn transposed(&self) -> Self {
        let (w, h) = (self.width(), self.height());
        let values = (0..w).flat_map(|j1| (0..h).map(move |j2| self.values[j2 * w + j1])).collect();
        Self { levels: [self.levels[1], self.levels[0]], values }
    }

    pub fn evaluate(&self, t1: f64, t2: f64) -> Result<f64> {
        if !(t1 > 0.0 && t2 > 0.0) {
            return Err(Error::Domain(format!("evaluation point ({t1}, {t2}) must be positive")));
        }
        if t1 >= 1.0 || t2 >= 1.0 {
            return Ok(0.0);
        }
        let j1 = ((t1 * self.width() as f64) as usize).min(self.width() - 1);
        let j2 = ((t2 * self.height() as f64) as usize).min(self.height() - 1);
        Ok(self.get(j1, j2))
    }

    /// Value-preserving subdivision to finer levels.
    pub fn refine(&self, new_levels: [u32; 2]) -> Result<Self> {
        if new_levels[0] < self.levels[0] || new_levels[1] < self.levels[1] {
            return Err(Error::Coarsening { from: self.levels, to: new_levels });
        }
        if new_levels[0] > 15 || new_levels[1] > 15 {
            return Err(Error::InvalidGrid(format!("levels {new_levels:?} exceed the supported maximum 15")));
        }
        let s1 = new_levels[0] - self.levels[0];
        let s2 = new_levels[1] - self.levels[1];
        let w = 1usize << new_levels[0];
        let h = 1usize << new_levels[1];
        let mut values = Vec::with_capacity(w * h);
        for j2 in 0..h {
            let src = self.row(j2 >> s2);
            values.extend((0..w).map(|j1| src[j1 >> s1]));
        }
        Ok(Self { levels: new_levels, values })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}
