//! Grand Lorentz norms against the plain Lorentz norm and each other.

use rayon::prelude::*;

use crate::error::Result;
use crate::norms::{
    discrete_grand_norm_p6, grand_lorentz_norm, grand_lorentz_sweep, logweight_sup_norm, lorentz_norm, Exponents,
    GrandParams, GrandValue, LorentzKernel, P6Config,
};

use super::corpus::{corpus_hash, generate, witness, CorpusKind, CorpusSpec, TestFunction};
use super::report::{fmt_pair, CheckReport, ReportBuilder};
use super::VerifyConfig;

const INF: f64 = f64::INFINITY;

/// `θ̄ ∈ {0.25, 0.5, 1}²`.
pub fn chain_thetas() -> Vec<[f64; 2]> {
    let v = [0.25, 0.5, 1.0];
    v.iter().flat_map(|&a| v.iter().map(move |&b| [a, b])).collect()
}

/// Exponent bundles for the chain checks.
pub fn chain_exponents() -> Vec<Exponents> {
    [([2.0, 2.0], [1.0, 1.0]), ([2.0, 2.0], [INF, INF]), ([4.0 / 3.0, 4.0], [2.0, 1.0])]
        .into_iter()
        .map(|(p, q)| Exponents::new(p, q).expect("valid exponents"))
        .collect()
}

/// 60 random, 20 tensor and 20 power-log functions at level (4,4).
pub fn chain_corpus(seed: u64) -> Result<Vec<TestFunction>> {
    let mut c = generate(&CorpusSpec::new(CorpusKind::RandomStep, [4, 4], 60, seed))?;
    c.extend(generate(&CorpusSpec::new(CorpusKind::Tensor, [4, 4], 20, seed))?);
    c.extend(generate(&CorpusSpec::new(CorpusKind::PowerLog, [4, 4], 20, seed))?);
    Ok(c)
}

/// Every norm the chain checks need for one function and exponent bundle.
struct ChainValues {
    lorentz: f64,
    /// Sup form at `(0,0)` followed by `thetas`.
    plus: Vec<GrandValue>,
    /// Inf form at `−thetas`.
    minus: Vec<GrandValue>,
}

fn chain_values(f: &TestFunction, e: &Exponents, thetas: &[[f64; 2]], eps_j: u32) -> Result<ChainValues> {
    let kernel = LorentzKernel::new(&f.f, e.q);
    let mut plus_thetas = vec![[0.0, 0.0]];
    plus_thetas.extend_from_slice(thetas);
    let neg: Vec<[f64; 2]> = thetas.iter().map(|t| [-t[0], -t[1]]).collect();
    Ok(ChainValues {
        lorentz: kernel.eval(e.inv_p()),
        plus: grand_lorentz_sweep(&kernel, e, &plus_thetas, eps_j, [1.0, 1.0])?,
        minus: grand_lorentz_sweep(&kernel, e, &neg, eps_j, [1.0, 1.0])?,
    })
}

fn exp_params(b: ReportBuilder, e: &Exponents) -> ReportBuilder {
    b.param("p", fmt_pair(e.p)).param("q", fmt_pair(e.q))
}

/// `G^{+θ̄} ≤ L ≤ G^{−θ̄}` per `θ̄`, P.1 over ordered pairs `θ̄ ≤ s̄`, and the
/// `θ̄ = 0` collapse, all with constant 1.
pub fn check_chain(corpus: &[TestFunction], e: &Exponents, thetas: &[[f64; 2]], eps_j: u32, tol: f64) -> Result<Vec<CheckReport>> {
    let hash = corpus_hash(corpus);
    let vals: Vec<ChainValues> = corpus.par_iter().map(|t| chain_values(t, e, thetas, eps_j)).collect::<Result<_>>()?;
    let wit = |i: usize| Some(witness(&corpus[i]));
    let mut out = Vec::new();
    for (k, &theta) in thetas.iter().enumerate() {
        let mut upper = exp_params(ReportBuilder::new("chain_upper", hash.clone(), 1.0, tol).relative(), e)
            .param("theta", fmt_pair(theta));
        upper.approximation("lhs:under(eps-grid)", true);
        let mut lower = exp_params(ReportBuilder::new("chain_lower", hash.clone(), 1.0, tol).relative(), e)
            .param("theta", fmt_pair(theta));
        lower.approximation("rhs:over(eps-grid)", true);
        for (t, v) in corpus.iter().zip(&vals) {
            upper.case(t.id.clone(), v.plus[k + 1].value, v.lorentz);
            lower.case(t.id.clone(), v.lorentz, v.minus[k].value);
        }
        out.push(upper.finish(wit));
        out.push(lower.finish(wit));
    }

    let mut p1 = exp_params(ReportBuilder::new("p1_monotone", hash.clone(), 1.0, tol).relative(), e);
    p1.note("both sides use the same ε grid");
    p1.approximation("both:under(eps-grid)", true);
    let mut owners = Vec::new();
    for (a, &ta) in thetas.iter().enumerate() {
        for (b, &tb) in thetas.iter().enumerate() {
            if a == b || !(ta[0] <= tb[0] && ta[1] <= tb[1]) {
                continue;
            }
            for (i, (t, v)) in corpus.iter().zip(&vals).enumerate() {
                p1.case(format!("{}@{}<={}", t.id, fmt_pair(ta), fmt_pair(tb)), v.plus[b + 1].value, v.plus[a + 1].value);
                owners.push(i);
            }
        }
    }
    out.push(p1.finish(|i| Some(witness(&corpus[owners[i]]))));

    let mut collapse = exp_params(ReportBuilder::new("theta_zero_collapse", hash, 0.0, 0.0), e);
    collapse.note("lhs = |G^0 − L|; any nonzero difference fails");
    for (t, v) in corpus.iter().zip(&vals) {
        collapse.case(t.id.clone(), (v.plus[0].value - v.lorentz).abs(), 0.0);
    }
    out.push(collapse.finish(wit));
    Ok(out)
}

/// Two reports `a ≤ C·b` and `b ≤ C·a` for the pairs `(a, b)`.
fn two_sided(
    id: &str,
    corpus: &[TestFunction],
    pairs: &[(f64, f64)],
    c: f64,
    params: &[(&str, String)],
    notes: &[&str],
) -> [CheckReport; 2] {
    let hash = corpus_hash(corpus);
    let mk = |dir: &str| {
        let mut b = ReportBuilder::new(id, hash.clone(), c, 0.0).param("direction", dir);
        for (k, v) in params {
            b = b.param(k, v.clone());
        }
        for n in notes {
            b.note(*n);
        }
        b
    };
    let (mut up, mut down) = (mk("upper"), mk("lower"));
    for (t, &(a, b)) in corpus.iter().zip(pairs) {
        up.case(t.id.clone(), a, b);
        down.case(t.id.clone(), b, a);
    }
    [up.finish(|i| Some(witness(&corpus[i]))), down.finish(|i| Some(witness(&corpus[i])))]
}

/// `‖f‖_{G^θ̄L_{p̄,∞̄}}` against the log-weighted supremum, on functions vanishing
/// outside `[0, 1/2)²`.
pub fn check_l1(corpus: &[TestFunction], p: [f64; 2], theta: [f64; 2], eps_j: u32, c: f64) -> Result<[CheckReport; 2]> {
    let e = Exponents::new(p, [INF, INF])?;
    let g = GrandParams::new(theta).with_eps_j(eps_j);
    let pairs: Vec<(f64, f64)> = corpus
        .par_iter()
        .map(|t| Ok((grand_lorentz_norm(&t.f, &e, &g)?.value, logweight_sup_norm(&t.f, p, theta)?)))
        .collect::<Result<_>>()?;
    let mut reps = two_sided(
        "l1_equivalence",
        corpus,
        &pairs,
        c,
        &[("p", fmt_pair(p)), ("theta", fmt_pair(theta))],
        &["upper: grand ≤ C·logweight; lower: logweight ≤ C·grand"],
    );
    reps[0].approximations.push("lhs:under(eps-grid)".into());
    reps[0].adverse_approximation = true;
    reps[1].approximations.push("rhs:under(eps-grid)".into());
    Ok(reps)
}

/// Discrete dyadic characterization against the grand norm.
pub fn check_p6(corpus: &[TestFunction], e: &Exponents, theta: [f64; 2], eps_j: u32, c: f64) -> Result<[CheckReport; 2]> {
    let g = GrandParams::new(theta).with_eps_j(eps_j);
    let cfg = P6Config::default();
    let pairs: Vec<(f64, f64)> = corpus
        .par_iter()
        .map(|t| Ok((discrete_grand_norm_p6(&t.f, e, theta, &cfg)?, grand_lorentz_norm(&t.f, e, &g)?.value)))
        .collect::<Result<_>>()?;
    Ok(two_sided(
        "p6_equivalence",
        corpus,
        &pairs,
        c,
        &[("p", fmt_pair(e.p)), ("q", fmt_pair(e.q)), ("theta", fmt_pair(theta)), ("k_max", cfg.k_max.to_string())],
        &["upper: discrete ≤ C·grand; lower: grand ≤ C·discrete"],
    ))
}

/// `‖f‖_{L_{p̄,r̄}} ≤ C‖f‖_{L_{p̄,q̄}}` for `q̄ < r̄`.
pub fn check_p2(corpus: &[TestFunction], p: [f64; 2], q: [f64; 2], r: [f64; 2], c: f64) -> Result<CheckReport> {
    let (eq, er) = (Exponents::new(p, q)?, Exponents::new(p, r)?);
    let mut b = ReportBuilder::new("p2_q_monotone", corpus_hash(corpus), c, 0.0)
        .param("p", fmt_pair(p))
        .param("q", fmt_pair(q))
        .param("r", fmt_pair(r));
    for t in corpus {
        b.case(t.id.clone(), lorentz_norm(&t.f, &er), lorentz_norm(&t.f, &eq));
    }
    Ok(b.finish(|i| Some(witness(&corpus[i]))))
}

pub fn suite(cfg: &VerifyConfig) -> Result<Vec<CheckReport>> {
    let th = &cfg.thresholds;
    let corpus = chain_corpus(cfg.seed)?;
    let thetas = chain_thetas();
    let mut out = Vec::new();
    for e in chain_exponents() {
        out.extend(check_chain(&corpus, &e, &thetas, cfg.eps_j, th.exact.chain)?);
    }

    let quarter = generate(&CorpusSpec::new(CorpusKind::RandomStep, [4, 4], 50, cfg.seed).with_quarter_support())?;
    for theta in [[0.5, 0.5], [1.0, 1.0], [0.5, 1.0]] {
        out.extend(check_l1(&quarter, [2.0, 2.0], theta, cfg.eps_j, th.calibrated.l1)?);
    }

    let small = &corpus[..50];
    let e22 = Exponents::new([2.0, 2.0], [2.0, 2.0])?;
    for theta in [[0.5, 0.5], [1.0, 1.0]] {
        out.extend(check_p6(small, &e22, theta, cfg.eps_j, th.calibrated.p6)?);
    }

    for (q, r) in [([1.0, 1.0], [2.0, 2.0]), ([1.0, 1.0], [INF, INF]), ([2.0, 2.0], [INF, INF])] {
        out.push(check_p2(&corpus, [2.0, 2.0], q, r, th.calibrated.p2)?);
    }
    Ok(out)
}
