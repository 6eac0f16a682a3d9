//! Nonincreasing rearrangements of step functions and double sequences.
//!
//! For functions the x₁ pass comes first (`f^{*₁,*₂}`); for coefficient
//! sequences the default is the m₂ pass first (`a^{*₂,*₁}`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stepfun::{DyadicStep1D, DyadicStep2D};

fn sort_desc(v: &mut [f64]) {
    v.sort_unstable_by(|a, b| b.total_cmp(a));
}

/// Sorts each column of a row-major `height × width` matrix in place.
fn sort_columns(values: &mut [f64], width: usize, height: usize) {
    let mut col = vec![0.0; height];
    for j in 0..width {
        for (i, c) in col.iter_mut().enumerate() {
            *c = values[i * width + j];
        }
        sort_desc(&mut col);
        for (i, &c) in col.iter().enumerate() {
            values[i * width + j] = c;
        }
    }
}

pub fn rearrange_1d(g: &DyadicStep1D) -> DyadicStep1D {
    let mut values = g.values().to_vec();
    sort_desc(&mut values);
    DyadicStep1D::new(g.level(), values).expect("permutation of a valid grid")
}

/// `f^{*₁}`: every x₂-slice sorted nonincreasing along x₁.
pub fn rearrange_x1(f: &DyadicStep2D) -> DyadicStep2D {
    let mut values = f.values().to_vec();
    for row in values.chunks_exact_mut(f.width()) {
        sort_desc(row);
    }
    DyadicStep2D::new(f.levels(), values).expect("permutation of a valid grid")
}

/// `f^{*₁,*₂}`.
pub fn iterated_rearrange_2d(f: &DyadicStep2D) -> DyadicStep2D {
    let g = rearrange_x1(f);
    let mut values = g.values().to_vec();
    sort_columns(&mut values, f.width(), f.height());
    DyadicStep2D::new(f.levels(), values).expect("permutation of a valid grid")
}

/// `μ{|g| > σ}`.
pub fn distribution_function(g: &DyadicStep1D, sigma: f64) -> f64 {
    g.values().iter().filter(|&&v| v > sigma).count() as f64 * g.cell_width()
}

/// Which index is rearranged first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RearrangeOrder {
    /// `a^{*₂,*₁}`: along m₂ first, then along m₁.
    Seq,
    /// `a^{*₁,*₂}`: along m₁ first, then along m₂.
    Fun,
}

/// Finite double sequence of magnitudes, row-major with rows indexed by m₁.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sequence2D {
    dims: [usize; 2],
    entries: Vec<f64>,
}

impl Sequence2D {
    pub fn new(dims: [usize; 2], entries: Vec<f64>) -> Result<Self> {
        if entries.len() != dims[0] * dims[1] {
            return Err(Error::InvalidGrid(format!(
                "dims {dims:?} require {} entries, got {}",
                dims[0] * dims[1],
                entries.len()
            )));
        }
        if let Some(v) = entries.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidGrid(format!("entry {v} is not a finite nonnegative number")));
        }
        Ok(Self { dims, entries })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let k1 = rows.len();
        let k2 = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != k2) {
            return Err(Error::InvalidGrid("ragged sequence rows".into()));
        }
        Self::new([k1, k2], rows.into_iter().flatten().collect())
    }

    pub fn zeros(dims: [usize; 2]) -> Self {
        Self { dims, entries: vec![0.0; dims[0] * dims[1]] }
    }

    pub fn dims(&self) -> [usize; 2] {
        self.dims
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Zero-based access: `get(0, 0)` is `a_{1,1}`.
    pub fn get(&self, i1: usize, i2: usize) -> f64 {
        self.entries[i1 * self.dims[1] + i2]
    }

    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        Self::new(self.dims, self.entries.iter().map(|v| v * lambda).collect())
    }

    /// Zero-pads both dimensions up to the next power of two.
    pub fn padded_pow2(&self) -> Self {
        let d1 = self.dims[0].max(1).next_power_of_two();
        let d2 = self.dims[1].max(1).next_power_of_two();
        if [d1, d2] == self.dims {
            return self.clone();
        }
        let mut entries = vec![0.0; d1 * d2];
        for i in 0..self.dims[0] {
            entries[i * d2..i * d2 + self.dims[1]]
                .copy_from_slice(&self.entries[i * self.dims[1]..(i + 1) * self.dims[1]]);
        }
        Self { dims: [d1, d2], entries }
    }
}

/// `a^{*₂,*₁}`.
pub fn iterated_rearrange_seq(a: &Sequence2D) -> Sequence2D {
    iterated_rearrange_seq_order(a, RearrangeOrder::Seq)
}

pub fn iterated_rearrange_seq_order(a: &Sequence2D, order: RearrangeOrder) -> Sequence2D {
    let [k1, k2] = a.dims;
    let mut entries = a.entries.clone();
    if k1 == 0 || k2 == 0 {
        return a.clone();
    }
    match order {
        RearrangeOrder::Seq => {
            for row in entries.chunks_exact_mut(k2) {
                sort_desc(row);
            }
            sort_columns(&mut entries, k2, k1);
        }
        RearrangeOrder::Fun => {
            sort_columns(&mut entries, k2, k1);
            for row in entries.chunks_exact_mut(k2) {
                sort_desc(row);
            }
        }
    }
    Sequence2D { dims: a.dims, entries }
}
