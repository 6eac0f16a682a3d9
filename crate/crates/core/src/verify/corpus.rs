//! Deterministic test-function families.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fourier::walsh_values;
use crate::rearrange::iterated_rearrange_2d;
use crate::stepfun::{DyadicStep1D, DyadicStep2D};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorpusKind {
    RandomStep,
    Tensor,
    PowerLog,
    Lacunary,
    Indicator,
}

impl CorpusKind {
    pub fn name(self) -> &'static str {
        match self {
            CorpusKind::RandomStep => "random_step",
            CorpusKind::Tensor => "tensor",
            CorpusKind::PowerLog => "power_log",
            CorpusKind::Lacunary => "lacunary",
            CorpusKind::Indicator => "indicator",
        }
    }

    fn salt(self) -> u64 {
        match self {
            CorpusKind::RandomStep => 0x5eed_0001,
            CorpusKind::Tensor => 0x5eed_0002,
            CorpusKind::PowerLog => 0x5eed_0003,
            CorpusKind::Lacunary => 0x5eed_0004,
            CorpusKind::Indicator => 0x5eed_0005,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub kind: CorpusKind,
    pub levels: [u32; 2],
    pub count: usize,
    pub seed: u64,
    /// Power exponent `r` of the `power_log` profile `t^{-1/r}|ln(t/e)|^{-s}`;
    /// drawn from `[1, 4]` per function when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    /// Log exponent `s` of the `power_log` profile; drawn from `[-1, 1]` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    /// Only cells in the lower-left `2^{-1}` corner may be nonzero.
    #[serde(default)]
    pub quarter_support: bool,
}

impl CorpusSpec {
    pub fn new(kind: CorpusKind, levels: [u32; 2], count: usize, seed: u64) -> Self {
        Self { kind, levels, count, seed, r: None, s: None, quarter_support: false }
    }

    pub fn with_power_log(mut self, r: f64, s: f64) -> Self {
        self.r = Some(r);
        self.s = Some(s);
        self
    }

    pub fn with_quarter_support(mut self) -> Self {
        self.quarter_support = true;
        self
    }
}

/// One corpus member. `signed` holds the real cell values before taking
/// magnitudes, for families whose coefficients depend on the sign pattern.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub id: String,
    pub f: DyadicStep2D,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signed: Option<Vec<f64>>,
}

impl TestFunction {
    /// Cell values used for Fourier coefficients.
    pub fn coefficient_values(&self) -> &[f64] {
        self.signed.as_deref().unwrap_or_else(|| self.f.values())
    }
}

fn exp_sample(rng: &mut ChaCha8Rng) -> f64 {
    -(1.0 - rng.random::<f64>()).ln()
}

fn random_values(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    // density and tail weight vary per function
    let keep = rng.random_range(0.15..=1.0);
    let heavy = rng.random_bool(0.3);
    (0..n)
        .map(|_| {
            if !rng.random_bool(keep) {
                return 0.0;
            }
            let v = exp_sample(rng);
            if heavy {
                v * v
            } else {
                v
            }
        })
        .collect()
}

fn power_log_profile(level: u32, r: f64, s: f64) -> Result<Vec<f64>> {
    let n = 1usize << level;
    let v: Vec<f64> = (0..n)
        .map(|j| {
            let t = (j as f64 + 0.5) / n as f64;
            t.powf(-1.0 / r) * (1.0 - t.ln()).powf(-s)
        })
        .collect();
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Corpus(format!("power_log profile with r = {r}, s = {s} is not finite")));
    }
    Ok(v)
}

fn restrict_to_quarter(levels: [u32; 2], values: &mut [f64]) {
    let w = 1usize << levels[0];
    let (hw, hh) = ((w / 2).max(1), ((1usize << levels[1]) / 2).max(1));
    for (i, v) in values.iter_mut().enumerate() {
        if i % w >= hw || i / w >= hh {
            *v = 0.0;
        }
    }
}

fn member(spec: &CorpusSpec, rng: &mut ChaCha8Rng) -> Result<(DyadicStep2D, Option<Vec<f64>>)> {
    let [n1, n2] = spec.levels;
    let (w, h) = (1usize << n1, 1usize << n2);
    match spec.kind {
        CorpusKind::RandomStep => {
            let mut v = random_values(rng, w * h);
            if spec.quarter_support {
                restrict_to_quarter(spec.levels, &mut v);
            }
            Ok((DyadicStep2D::new(spec.levels, v)?, None))
        }
        CorpusKind::Tensor => {
            let g = DyadicStep1D::new(n1, random_values(rng, w))?;
            let hh = DyadicStep1D::new(n2, random_values(rng, h))?;
            let mut f = DyadicStep2D::tensor(&g, &hh);
            if spec.quarter_support {
                let mut v = f.values().to_vec();
                restrict_to_quarter(spec.levels, &mut v);
                f = DyadicStep2D::new(spec.levels, v)?;
            }
            Ok((f, None))
        }
        CorpusKind::PowerLog => {
            let r = spec.r.unwrap_or_else(|| rng.random_range(1.0..=4.0));
            let s = spec.s.unwrap_or_else(|| rng.random_range(-1.0..=1.0));
            let g = DyadicStep1D::new(n1, power_log_profile(n1, r, s)?)?;
            let hh = DyadicStep1D::new(n2, power_log_profile(n2, r, s)?)?;
            Ok((iterated_rearrange_2d(&DyadicStep2D::tensor(&g, &hh)), None))
        }
        CorpusKind::Lacunary => {
            // Σ_j c_j w_{2^j}(x₁) w_{2^j}(x₂) over 2^j below both resolutions
            let terms = n1.min(n2);
            if terms == 0 {
                return Err(Error::Corpus("lacunary functions need levels ≥ 1".into()));
            }
            let mut signed = vec![0.0; w * h];
            for j in 0..terms {
                let c = if rng.random_bool(0.5) { 1.0 } else { -1.0 } * rng.random_range(0.5..=1.5);
                let a = walsh_values(1 << j, n1)?;
                let b = walsh_values(1 << j, n2)?;
                for (j2, &bv) in b.iter().enumerate() {
                    for (j1, &av) in a.iter().enumerate() {
                        signed[j2 * w + j1] += c * av * bv;
                    }
                }
            }
            let f = DyadicStep2D::new(spec.levels, signed.iter().map(|v| v.abs()).collect())?;
            Ok((f, Some(signed)))
        }
        CorpusKind::Indicator => {
            // dyadic box of random size and position
            let k1 = rng.random_range(0..=n1);
            let k2 = rng.random_range(0..=n2);
            let (bw, bh) = (w >> k1, h >> k2);
            let x0 = rng.random_range(0..=(w - bw)) / bw * bw;
            let y0 = rng.random_range(0..=(h - bh)) / bh * bh;
            let mut v = vec![0.0; w * h];
            for j2 in y0..y0 + bh {
                for j1 in x0..x0 + bw {
                    v[j2 * w + j1] = 1.0;
                }
            }
            if spec.quarter_support {
                restrict_to_quarter(spec.levels, &mut v);
            }
            Ok((DyadicStep2D::new(spec.levels, v)?, None))
        }
    }
}

/// Generates the corpus described by `spec`. Identical specs give identical corpora.
pub fn generate(spec: &CorpusSpec) -> Result<Vec<TestFunction>> {
    if spec.levels[0] > 12 || spec.levels[1] > 12 {
        return Err(Error::Corpus(format!("levels {:?} exceed the corpus maximum 12", spec.levels)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ spec.kind.salt());
    (0..spec.count)
        .map(|i| {
            let (f, signed) = member(spec, &mut rng)?;
            Ok(TestFunction { id: format!("{}-{}x{}-s{}-{i}", spec.kind.name(), spec.levels[0], spec.levels[1], spec.seed), f, signed })
        })
        .collect()
}

/// Largest grid serialized in full as a report witness.
pub const WITNESS_MAX_CELLS: usize = 4096;

/// Report witness: the full member for small grids, otherwise its id, which
/// together with the corpus spec regenerates it.
pub fn witness(t: &TestFunction) -> serde_json::Value {
    if t.f.values().len() <= WITNESS_MAX_CELLS {
        serde_json::to_value(t).unwrap_or(serde_json::Value::Null)
    } else {
        serde_json::json!({ "id": t.id, "levels": t.f.levels(), "max_value": t.f.max_value() })
    }
}

/// Indicator of the whole square at `levels`.
pub fn unit_indicator(levels: [u32; 2]) -> Result<TestFunction> {
    Ok(TestFunction { id: format!("one-{}x{}", levels[0], levels[1]), f: DyadicStep2D::constant(levels, 1.0)?, signed: None })
}

/// SHA-256 over the bit patterns of every member, in order.
pub fn corpus_hash(corpus: &[TestFunction]) -> String {
    let mut h = Sha256::new();
    for t in corpus {
        h.update(t.id.as_bytes());
        for l in t.f.levels() {
            h.update(l.to_le_bytes());
        }
        for v in t.coefficient_values() {
            h.update(v.to_bits().to_le_bytes());
        }
    }
    hex::encode(h.finalize())
}
