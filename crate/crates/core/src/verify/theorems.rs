//! Coefficient bounds in Lorentz and grand Lorentz norms, and the
//! interpolation-norm chain.

use rayon::prelude::*;

use crate::error::Result;
use crate::fourier::{beta, bochkarev_lhs, dyadic_bochkarev_lhs, te3_lhs, te4_lhs, SystemKind};
use crate::interpolation::{constant_d, interp_norm_from_grid, KGrid, ThetaPoint};
use crate::norms::{grand_lorentz_sweep, lorentz_norm, BlockSums, Exponents, GrandParams, LorentzKernel};
use crate::rearrange::RearrangeOrder;

use super::corpus::{corpus_hash, generate, witness, CorpusKind, CorpusSpec, TestFunction};
use super::le3::corpus_coeffs;
use super::report::{fmt_num, fmt_pair, CheckReport, ReportBuilder};
use super::VerifyConfig;

const INF: f64 = f64::INFINITY;

/// `θ̄ ∈ {0.2, 0.5, 0.8}²`.
pub fn te3_thetas() -> Vec<[f64; 2]> {
    grid(&[0.2, 0.5, 0.8])
}

/// `q̄ ∈ {(1,1), (2,2), (4,4), (∞,∞)}`.
pub fn te3_qs() -> Vec<[f64; 2]> {
    vec![[1.0, 1.0], [2.0, 2.0], [4.0, 4.0], [INF, INF]]
}

/// `θ̄ ∈ {0, 0.25, 0.5, 1}²`, including the plain Lorentz case `θ̄ = 0`.
pub fn te4_thetas() -> Vec<[f64; 2]> {
    grid(&[0.0, 0.25, 0.5, 1.0])
}

/// `q̄ ∈ {(2,2), (4,4), (∞,∞), (2,∞)}`.
pub fn thm5_qs() -> Vec<[f64; 2]> {
    vec![[2.0, 2.0], [4.0, 4.0], [INF, INF], [2.0, INF]]
}

fn grid(v: &[f64]) -> Vec<[f64; 2]> {
    v.iter().flat_map(|&a| v.iter().map(move |&b| [a, b])).collect()
}

/// 20 random, 10 tensor, 10 power-log and 10 indicator functions at level (5,5).
pub fn te_corpus(seed: u64) -> Result<Vec<TestFunction>> {
    let mut c = Vec::new();
    for (kind, count) in
        [(CorpusKind::RandomStep, 20), (CorpusKind::Tensor, 10), (CorpusKind::PowerLog, 10), (CorpusKind::Indicator, 10)]
    {
        c.extend(generate(&CorpusSpec::new(kind, [5, 5], count, seed))?);
    }
    Ok(c)
}

/// 20 lacunary Walsh sums `Σ_{j≤8} c_j w_{2^j} ⊗ w_{2^j}` at level (9,9).
pub fn lacunary_corpus(seed: u64) -> Result<Vec<TestFunction>> {
    generate(&CorpusSpec::new(CorpusKind::Lacunary, [9, 9], 20, seed))
}

fn block_sums(corpus: &[TestFunction], kind: SystemKind) -> Result<Vec<BlockSums>> {
    corpus.par_iter().map(|t| Ok(corpus_coeffs(t, kind)?.block_sums(RearrangeOrder::Seq))).collect()
}

fn truncation_tag(b: &mut ReportBuilder, kind: SystemKind) {
    if kind == SystemKind::Trig {
        b.approximation("lhs:under(truncation)", true);
    }
}

/// `te3_lhs(a, θ̄, q̄) ≤ c₀ · 6·D(θ̄) · ‖f‖_{L_{p̄,q̄}}` with `1/pᵢ = 1 − θᵢ/2`.
/// Cases carry `rhs = 6·D·‖f‖`, so the threshold is `c₀`.
pub fn check_te3(
    corpus: &[TestFunction],
    blocks: &[BlockSums],
    kind: SystemKind,
    theta: [f64; 2],
    q: [f64; 2],
    c0: f64,
) -> Result<CheckReport> {
    let tp = ThetaPoint::from_theta(theta)?;
    let d = constant_d(theta, q)?;
    let e = Exponents::new(tp.p, q)?;
    let mut b = ReportBuilder::new("te3", corpus_hash(corpus), c0, 0.0)
        .param("system", kind.name())
        .param("theta", fmt_pair(theta))
        .param("q", fmt_pair(q))
        .param("D", fmt_num(d));
    truncation_tag(&mut b, kind);
    let sides: Vec<(f64, f64)> =
        corpus.par_iter().zip(blocks).map(|(t, bs)| (te3_lhs(bs, theta, q), 6.0 * d * lorentz_norm(&t.f, &e))).collect();
    for (t, (l, r)) in corpus.iter().zip(sides) {
        b.case(t.id.clone(), l, r);
    }
    Ok(b.finish(|i| Some(witness(&corpus[i]))))
}

/// Spread of `maxRatio` (equivalently of `maxRatio/D`) across a sweep.
pub fn check_growth(reports: &[CheckReport], kind: SystemKind, spread: f64) -> CheckReport {
    let hash = reports.first().map(|r| r.corpus_hash.clone()).unwrap_or_default();
    let finite: Vec<&CheckReport> = reports.iter().filter(|r| r.max_ratio > 0.0 && r.max_ratio.is_finite()).collect();
    let min = finite.iter().map(|r| r.max_ratio).fold(INF, f64::min);
    let mut b = ReportBuilder::new("te3_growth", hash, spread, 0.0).param("system", kind.name());
    b.note("ratio = maxRatio at the point / smallest maxRatio in the sweep; maxRatio already divides by D");
    for r in reports {
        let case = r.param_string();
        if finite.iter().any(|f| std::ptr::eq(*f, r)) {
            b.case(case, r.max_ratio, min);
        } else {
            b.skip(case, "maxRatio is zero or infinite");
        }
    }
    b.finish(|_| None)
}

/// `interp_norm(f) ≤ slack · 6·D(θ̄) · ‖f‖_{L_{p̄,q̄}}` on the dyadic t-grid.
pub fn check_interp(
    corpus: &[TestFunction],
    grids: &[KGrid],
    theta: [f64; 2],
    q: [f64; 2],
    slack: f64,
) -> Result<CheckReport> {
    let tp = ThetaPoint::from_theta(theta)?;
    let d = constant_d(theta, q)?;
    let e = Exponents::new(tp.p, q)?;
    let j = grids.first().map_or(0, |g| g.j());
    let mut b = ReportBuilder::new("interp", corpus_hash(corpus), slack, 0.0)
        .param("theta", fmt_pair(theta))
        .param("q", fmt_pair(q))
        .param("J", j.to_string())
        .param("D", fmt_num(d));
    b.approximation("lhs:upper(K-decomposition)", false);
    b.approximation("lhs:discretized(t-grid)", true);
    let sides: Vec<(f64, f64)> = corpus
        .par_iter()
        .zip(grids)
        .map(|(t, g)| Ok((interp_norm_from_grid(g, theta, q)?, 6.0 * d * lorentz_norm(&t.f, &e))))
        .collect::<Result<_>>()?;
    for (t, (l, r)) in corpus.iter().zip(sides) {
        b.case(t.id.clone(), l, r);
    }
    Ok(b.finish(|i| Some(witness(&corpus[i]))))
}

/// Coefficient bound and growth reports for both systems, then the
/// interpolation chain, over the `θ̄ × q̄` sweep.
pub fn te3_suite(cfg: &VerifyConfig) -> Result<Vec<CheckReport>> {
    let cal = &cfg.thresholds.calibrated;
    let corpus = te_corpus(cfg.seed)?;
    let mut out = Vec::new();
    for kind in [SystemKind::Walsh, SystemKind::Trig] {
        let blocks = block_sums(&corpus, kind)?;
        let mut reps = Vec::new();
        for q in te3_qs() {
            for theta in te3_thetas() {
                reps.push(check_te3(&corpus, &blocks, kind, theta, q, cal.c0)?);
            }
        }
        let growth = check_growth(&reps, kind, cal.te3_growth_spread);
        // the same spread within each q̄, reported only
        let per_q: Vec<CheckReport> = reps
            .chunks(te3_thetas().len())
            .zip(te3_qs())
            .map(|(chunk, q)| {
                let mut r = check_growth(chunk, kind, cal.te3_growth_spread);
                r.check_id = "te3_growth_fixed_q".into();
                r.param_point.insert("q".into(), fmt_pair(q));
                r.gated = false;
                r
            })
            .collect();
        out.extend(reps);
        out.push(growth);
        out.extend(per_q);
    }
    let grids: Vec<KGrid> = corpus.par_iter().map(|t| KGrid::new(&t.f, cfg.interp_j)).collect::<Result<_>>()?;
    for q in te3_qs() {
        for theta in te3_thetas() {
            out.push(check_interp(&corpus, &grids, theta, q, cal.interp_slack)?);
        }
    }
    Ok(out)
}

/// Grand-norm coefficient bound `te4_lhs ≤ C·‖f‖_{G^θ̄L_{2̄,q̄}}` for every
/// `θ̄` in `thetas` at one `q̄`; one report per `θ̄`.
pub fn check_te4(
    corpus: &[TestFunction],
    blocks: &[BlockSums],
    kind: SystemKind,
    thetas: &[[f64; 2]],
    q: [f64; 2],
    eps_j: u32,
    c_pass: f64,
) -> Result<Vec<CheckReport>> {
    let e = Exponents::new([2.0, 2.0], q)?;
    let delta = [1.0, 1.0];
    let rows: Vec<Vec<(f64, f64)>> = corpus
        .par_iter()
        .zip(blocks)
        .map(|(t, bs)| {
            let rhs = grand_lorentz_sweep(&LorentzKernel::new(&t.f, q), &e, thetas, eps_j, delta)?;
            thetas
                .iter()
                .zip(rhs)
                .map(|(&theta, r)| Ok((te4_lhs(bs, q, &GrandParams { theta, eps_j, delta })?.value, r.value)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let hash = corpus_hash(corpus);
    let lambda_of = |theta: [f64; 2]| {
        let b = beta(q);
        [theta[0] + b[0], theta[1] + b[1]]
    };
    Ok(thetas
        .iter()
        .enumerate()
        .map(|(k, &theta)| {
            let mut b = ReportBuilder::new("te4", hash.clone(), c_pass, 0.0)
                .param("system", kind.name())
                .param("theta", fmt_pair(theta))
                .param("q", fmt_pair(q))
                .param("lambda", fmt_pair(lambda_of(theta)))
                .param("eps_J", eps_j.to_string());
            b.approximation("lhs:under(eps-grid)", true);
            if theta != [0.0, 0.0] {
                b.approximation("rhs:under(eps-grid)", false);
            } else {
                b.note("θ̄ = 0: right side is the Lorentz norm");
            }
            truncation_tag(&mut b, kind);
            b.note("sequence norm with exponents 1/2 − ε");
            for (t, row) in corpus.iter().zip(&rows) {
                b.case(t.id.clone(), row[k].0, row[k].1);
            }
            b.finish(|i| Some(witness(&corpus[i])))
        })
        .collect())
}

fn te4_and_thm5_corpora(seed: u64) -> Result<[(Vec<TestFunction>, Vec<SystemKind>); 2]> {
    Ok([
        (te_corpus(seed)?, vec![SystemKind::Walsh, SystemKind::Trig]),
        (lacunary_corpus(seed)?, vec![SystemKind::Walsh]),
    ])
}

/// [`check_te4`] over the Te3 corpus (both systems) and the lacunary corpus
/// (Walsh), `q̄` from the Te3 sweep and `θ̄ ∈ {0, 0.25, 0.5, 1}²`.
pub fn te4_suite(cfg: &VerifyConfig) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for (corpus, kinds) in te4_and_thm5_corpora(cfg.seed)? {
        for kind in kinds {
            let blocks = block_sums(&corpus, kind)?;
            for q in te3_qs() {
                out.extend(check_te4(&corpus, &blocks, kind, &te4_thetas(), q, cfg.eps_j, cfg.thresholds.calibrated.te4)?);
            }
        }
    }
    Ok(out)
}

/// Log-weighted supremum of block sums (`thm5`) and its dyadic form
/// (`thm5_dyadic`) against `‖f‖_{L_{2̄,q̄}}`.
pub fn check_thm5(
    corpus: &[TestFunction],
    blocks: &[BlockSums],
    kind: SystemKind,
    q: [f64; 2],
    c_pass: f64,
    c_dyadic: f64,
) -> Result<[CheckReport; 2]> {
    let e = Exponents::new([2.0, 2.0], q)?;
    let sides: Vec<(f64, f64, f64)> = corpus
        .par_iter()
        .zip(blocks)
        .map(|(t, bs)| Ok((bochkarev_lhs(bs, q)?, dyadic_bochkarev_lhs(bs, q)?, lorentz_norm(&t.f, &e))))
        .collect::<Result<_>>()?;
    let hash = corpus_hash(corpus);
    let mut full = ReportBuilder::new("thm5", hash.clone(), c_pass, 0.0).param("system", kind.name()).param("q", fmt_pair(q));
    let mut dyadic =
        ReportBuilder::new("thm5_dyadic", hash, c_dyadic, 0.0).param("system", kind.name()).param("q", fmt_pair(q));
    for b in [&mut full, &mut dyadic] {
        truncation_tag(b, kind);
        b.note("right side uses the same q̄ as the weights");
    }
    for (t, (l, ld, r)) in corpus.iter().zip(sides) {
        full.case(t.id.clone(), l, r);
        dyadic.case(t.id.clone(), ld, r);
    }
    Ok([full.finish(|i| Some(witness(&corpus[i]))), dyadic.finish(|i| Some(witness(&corpus[i])))])
}

pub fn thm5_suite(cfg: &VerifyConfig) -> Result<Vec<CheckReport>> {
    let cal = &cfg.thresholds.calibrated;
    let mut out = Vec::new();
    for (corpus, kinds) in te4_and_thm5_corpora(cfg.seed)? {
        for kind in kinds {
            let blocks = block_sums(&corpus, kind)?;
            for q in thm5_qs() {
                out.extend(check_thm5(&corpus, &blocks, kind, q, cal.thm5, cal.thm5_dyadic)?);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::walsh_values;
    use crate::stepfun::DyadicStep2D;

    fn walsh_mode(n1: usize, n2: usize, level: u32) -> TestFunction {
        let a = walsh_values(n1, level).unwrap();
        let b = walsh_values(n2, level).unwrap();
        let signed: Vec<f64> = b.iter().flat_map(|&y| a.iter().map(move |&x| x * y)).collect();
        let f = DyadicStep2D::new([level, level], signed.iter().map(|v| v.abs()).collect()).unwrap();
        TestFunction { id: "mode".into(), f, signed: Some(signed) }
    }

    #[test]
    fn zero_function_passes_everything() {
        let z = vec![TestFunction { id: "zero".into(), f: DyadicStep2D::zeros([3, 3]).unwrap(), signed: None }];
        let bs = block_sums(&z, SystemKind::Walsh).unwrap();
        let r = check_te3(&z, &bs, SystemKind::Walsh, [0.5, 0.5], [2.0, 2.0], 4.0).unwrap();
        assert!(r.pass && r.max_ratio == 0.0);
        for r in check_te4(&z, &bs, SystemKind::Walsh, &[[0.0, 0.0], [1.0, 1.0]], [INF, INF], 8, 1.0).unwrap() {
            assert!(r.pass && r.max_ratio == 0.0);
        }
        for r in check_thm5(&z, &bs, SystemKind::Walsh, [2.0, 2.0], 1.0, 1.0).unwrap() {
            assert!(r.pass);
        }
    }

    #[test]
    fn single_mode_te3_is_a_geometric_series() {
        // one coefficient of size 1: S(k) = 1 for all k, so with u = θ/2 − 1/2
        // and q = 1 the left side is Π 1/(1 − 2^{uᵢ}), the right side 6·D·‖f‖
        let t = vec![walsh_mode(3, 2, 3)];
        let bs = block_sums(&t, SystemKind::Walsh).unwrap();
        let theta = [0.5, 0.5];
        let r = check_te3(&t, &bs, SystemKind::Walsh, theta, [1.0, 1.0], 4.0).unwrap();
        let g = 1.0 / (1.0 - (-0.25f64).exp2());
        assert!((r.cases[0].lhs - g * g).abs() < 1e-12, "{}", r.cases[0].lhs);
        let p = ThetaPoint::from_theta(theta).unwrap().p;
        let rhs = 6.0 * constant_d(theta, [1.0, 1.0]).unwrap() * lorentz_norm(&t[0].f, &Exponents::new(p, [1.0, 1.0]).unwrap());
        assert_eq!(r.cases[0].rhs, rhs);
    }

    #[test]
    fn single_mode_thm5() {
        // |f| ≡ 1 and a single unit coefficient: sup over k of the log weight is at k̄ = 2
        let t = vec![walsh_mode(1, 1, 2)];
        let bs = block_sums(&t, SystemKind::Walsh).unwrap();
        let [full, _] = check_thm5(&t, &bs, SystemKind::Walsh, [INF, INF], 10.0, 10.0).unwrap();
        assert!((full.cases[0].lhs - 1.0 / 2f64.ln()).abs() < 1e-12);
        assert!((full.cases[0].rhs - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sweeps_have_expected_shape() {
        assert_eq!(te3_thetas().len(), 9);
        assert_eq!(te4_thetas().len(), 16);
        assert!(te4_thetas().contains(&[0.0, 0.0]));
    }
}
