//! Power sums of majorized nonincreasing sequences.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

use super::report::{fmt_num, CheckReport, ReportBuilder};

/// A nonincreasing pair with `Σ_{i<k} f ≥ Σ_{i<k} g` for every `k` and equal
/// totals. Entries are values on equal-length cells.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MajorizationPair {
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

impl MajorizationPair {
    /// Validates the hypothesis up to a relative `tol` on the prefix sums.
    pub fn new(f: Vec<f64>, g: Vec<f64>, tol: f64) -> Result<Self> {
        let bad = |msg: String| Err(Error::Majorization(msg));
        if f.len() != g.len() {
            return bad(format!("lengths {} and {} differ", f.len(), g.len()));
        }
        for (name, v) in [("f", &f), ("g", &g)] {
            if v.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                return bad(format!("{name} has a negative or non-finite entry"));
            }
            if v.windows(2).any(|w| w[1] > w[0]) {
                return bad(format!("{name} is not nonincreasing"));
            }
        }
        let total: f64 = f.iter().sum();
        let slack = tol * total.max(f64::MIN_POSITIVE);
        let (mut sf, mut sg) = (0.0, 0.0);
        for (i, (a, b)) in f.iter().zip(&g).enumerate() {
            sf += a;
            sg += b;
            if sg > sf + slack {
                return bad(format!("prefix {} of g exceeds that of f: {sg} > {sf}", i + 1));
            }
        }
        if (sf - sg).abs() > slack {
            return bad(format!("totals differ: {sf} vs {sg}"));
        }
        Ok(Self { f, g })
    }
}

/// `(Σ fᵢ^p, Σ gᵢ^p)`.
pub fn power_sums(pair: &MajorizationPair, p: f64) -> (f64, f64) {
    let s = |v: &[f64]| v.iter().map(|x| x.powf(p)).sum::<f64>();
    (s(&pair.f), s(&pair.g))
}

/// Replaces `v[i..j]` by its mean. Keeps `v` nonincreasing and lowers prefix sums.
fn flatten(v: &mut [f64], i: usize, j: usize) {
    let mean = v[i..j].iter().sum::<f64>() / (j - i) as f64;
    // clamp to the block range so rounding cannot break monotonicity
    let mean = mean.clamp(v[j - 1], v[i]);
    v[i..j].fill(mean);
}

/// `count` pairs: `f` random nonincreasing, `g` obtained from `f` by a few
/// mean-preserving flattenings of contiguous blocks.
pub fn generate_pairs(count: usize, seed: u64) -> Result<Vec<MajorizationPair>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6b61_7261);
    (0..count)
        .map(|_| {
            let n = rng.random_range(2..=64);
            let mut f: Vec<f64> = (0..n)
                .map(|_| if rng.random_bool(0.2) { 0.0 } else { -(1.0 - rng.random::<f64>()).ln() })
                .collect();
            f.sort_by(|a, b| b.total_cmp(a));
            let mut g = f.clone();
            for _ in 0..rng.random_range(0..=4) {
                let i = rng.random_range(0..n - 1);
                let j = rng.random_range(i + 2..=n);
                flatten(&mut g, i, j);
            }
            MajorizationPair::new(f, g, 1e-12)
        })
        .collect()
}

pub fn pairs_hash(pairs: &[MajorizationPair]) -> String {
    let mut h = Sha256::new();
    for p in pairs {
        h.update((p.f.len() as u64).to_le_bytes());
        for v in p.f.iter().chain(&p.g) {
            h.update(v.to_bits().to_le_bytes());
        }
    }
    hex::encode(h.finalize())
}

/// `Σg^p ≤ Σf^p` for `p ≥ 1` and `Σf^p ≤ Σg^p` for `p ≤ 1`; at `p = 1` both.
pub fn check_karamata(pairs: &[MajorizationPair], p: f64, tol: f64) -> Vec<CheckReport> {
    let hash = pairs_hash(pairs);
    let sums: Vec<(f64, f64)> = pairs.iter().map(|pr| power_sums(pr, p)).collect();
    let mut out = Vec::new();
    let branches: &[(&str, bool)] = match p {
        p if p > 1.0 => &[("a", true)],
        p if p < 1.0 => &[("b", false)],
        _ => &[("a", true), ("b", false)],
    };
    for &(branch, f_dominates) in branches {
        let mut b = ReportBuilder::new("karamata", hash.clone(), 1.0, tol)
            .relative()
            .param("p", fmt_num(p))
            .param("branch", branch);
        for (i, &(sf, sg)) in sums.iter().enumerate() {
            let (lhs, rhs) = if f_dominates { (sg, sf) } else { (sf, sg) };
            b.case(format!("pair-{i}"), lhs, rhs);
        }
        out.push(b.finish(|i| serde_json::to_value(&pairs[i]).ok()));
    }
    out
}

/// 500 pairs, `p ∈ {1/2, 1, 2, 3}`.
pub fn suite(seed: u64, tol: f64) -> Result<Vec<CheckReport>> {
    let pairs = generate_pairs(500, seed)?;
    Ok([0.5, 1.0, 2.0, 3.0].iter().flat_map(|&p| check_karamata(&pairs, p, tol)).collect())
}
