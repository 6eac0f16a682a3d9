//! Block sums of rearranged coefficients against mixed norms, plus the
//! Parseval/Bessel identities they rest on.

use rayon::prelude::*;

use crate::error::Result;
use crate::fourier::{coeffs_2d_signed, CoeffMatrix, OrthonormalSystem, SystemKind};
use crate::norms::{mixed_lebesgue_norm, BlockSums};
use crate::rearrange::RearrangeOrder;

use super::corpus::{corpus_hash, generate, witness, CorpusKind, CorpusSpec, TestFunction};
use super::report::{CheckReport, ReportBuilder};

/// Coefficients of a corpus member at the system's default truncation.
pub fn corpus_coeffs(t: &TestFunction, kind: SystemKind) -> Result<CoeffMatrix> {
    let sys = OrthonormalSystem::of(kind);
    let [n1, n2] = t.f.levels();
    let k = [sys.default_truncation(n1), sys.default_truncation(n2)];
    coeffs_2d_signed(t.f.levels(), t.coefficient_values(), [sys, sys], k)
}

/// The four right-hand sides at block size `N̄` for `M₁ = M₂ = m̄`.
pub fn le3_rhs(mixed: &[f64; 4], n: [usize; 2], m: [f64; 2]) -> [f64; 4] {
    let [m21, m12, m11, m22] = *mixed;
    let (s1, s2) = ((n[0] as f64).sqrt(), (n[1] as f64).sqrt());
    [m[1] * s2 * m21, m[0] * s1 * m12, m[0] * m[1] * s1 * s2 * m11, m22]
}

/// `‖f‖` in `L_{(2,1)}, L_{(1,2)}, L_{(1,1)}, L_{(2,2)}`.
pub fn le3_mixed_norms(t: &TestFunction) -> [f64; 4] {
    [[2.0, 1.0], [1.0, 2.0], [1.0, 1.0], [2.0, 2.0]].map(|p| mixed_lebesgue_norm(&t.f, p))
}

fn order_name(o: RearrangeOrder) -> &'static str {
    match o {
        RearrangeOrder::Seq => "seq",
        RearrangeOrder::Fun => "fun",
    }
}

/// One report per (order, N̄, display). The sequence order is gated; the
/// function order is reported only.
pub fn check_le3(corpus: &[TestFunction], kind: SystemKind, ns: &[[usize; 2]], tol: f64) -> Result<Vec<CheckReport>> {
    let hash = corpus_hash(corpus);
    let m = [OrthonormalSystem::of(kind).bound; 2];
    let per_fn: Vec<(BlockSums, BlockSums, [f64; 4])> = corpus
        .par_iter()
        .map(|t| {
            let a = corpus_coeffs(t, kind)?;
            Ok((a.block_sums(RearrangeOrder::Seq), a.block_sums(RearrangeOrder::Fun), le3_mixed_norms(t)))
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for order in [RearrangeOrder::Seq, RearrangeOrder::Fun] {
        for &n in ns {
            for display in 0..4 {
                let mut b = ReportBuilder::new("le3", hash.clone(), 1.0, tol)
                    .param("system", kind.name())
                    .param("order", order_name(order))
                    .param("N", format!("({},{})", n[0], n[1]))
                    .param("display", (display + 1).to_string());
                if order == RearrangeOrder::Fun {
                    b = b.ungated();
                }
                if kind == SystemKind::Trig {
                    b.approximation("lhs:under(truncation)", true);
                }
                for (t, (seq, fun, mixed)) in corpus.iter().zip(&per_fn) {
                    let bs = if order == RearrangeOrder::Seq { seq } else { fun };
                    b.case(t.id.clone(), bs.prefix(n[0], n[1]).sqrt(), le3_rhs(mixed, n, m)[display]);
                }
                out.push(b.finish(|i| Some(witness(&corpus[i]))));
            }
        }
    }
    Ok(out)
}

/// `|Σ|a|² − ‖f‖²_{L(2,2)}|` for Walsh coefficients at full resolution.
pub fn check_parseval(corpus: &[TestFunction], tol: f64) -> Result<CheckReport> {
    let resid: Vec<f64> = corpus
        .par_iter()
        .map(|t| {
            let a = corpus_coeffs(t, SystemKind::Walsh)?;
            let norm = mixed_lebesgue_norm(&t.f, [2.0, 2.0]);
            Ok((a.sum_sq() - norm * norm).abs())
        })
        .collect::<Result<_>>()?;
    let mut b = ReportBuilder::new("parseval", corpus_hash(corpus), 1.0, tol).param("system", "walsh");
    b.note("lhs is the absolute residual; ratio = residual / tolerance");
    for (t, r) in corpus.iter().zip(resid) {
        b.case(t.id.clone(), r, 0.0);
    }
    Ok(b.finish(|i| Some(witness(&corpus[i]))))
}

/// Trigonometric partial sums over square truncations `K = 8, 16, …`:
/// bounded by `‖f‖²_{L(2,2)}` and nondecreasing in `K`.
pub fn check_bessel(corpus: &[TestFunction], tol: f64) -> Result<Vec<CheckReport>> {
    let rows: Vec<(Vec<(usize, f64)>, f64)> = corpus
        .par_iter()
        .map(|t| {
            let a = corpus_coeffs(t, SystemKind::Trig)?;
            let kmax = a.k[0].min(a.k[1]);
            let mut partial = Vec::new();
            let mut k = 8.min(kmax);
            loop {
                let s: f64 = (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).map(|(i, j)| a.get(i, j).norm_sqr()).sum();
                partial.push((k, s));
                if k == kmax {
                    break;
                }
                k = (2 * k).min(kmax);
            }
            let norm = mixed_lebesgue_norm(&t.f, [2.0, 2.0]);
            Ok((partial, norm * norm))
        })
        .collect::<Result<_>>()?;
    let hash = corpus_hash(corpus);
    let mut bound = ReportBuilder::new("bessel", hash.clone(), 1.0, tol).param("system", "trig");
    let mut mono = ReportBuilder::new("bessel_monotone", hash, 1.0, 0.0).param("system", "trig");
    let mut owners = (Vec::new(), Vec::new());
    for (i, (t, (partial, norm2))) in corpus.iter().zip(&rows).enumerate() {
        for (j, &(k, s)) in partial.iter().enumerate() {
            bound.case(format!("{}@K={k}", t.id), s, *norm2);
            owners.0.push(i);
            if j > 0 {
                mono.case(format!("{}@K={k}", t.id), partial[j - 1].1, s);
                owners.1.push(i);
            }
        }
    }
    Ok(vec![
        bound.finish(|i| Some(witness(&corpus[owners.0[i]]))),
        mono.finish(|i| Some(witness(&corpus[owners.1[i]]))),
    ])
}

/// The block-sum corpus: 60 random, 20 tensor and 20 indicator functions at level (5,5).
pub fn le3_corpus(seed: u64) -> Result<Vec<TestFunction>> {
    let mut c = generate(&CorpusSpec::new(CorpusKind::RandomStep, [5, 5], 60, seed))?;
    c.extend(generate(&CorpusSpec::new(CorpusKind::Tensor, [5, 5], 20, seed))?);
    c.extend(generate(&CorpusSpec::new(CorpusKind::Indicator, [5, 5], 20, seed))?);
    Ok(c)
}

/// Block inequalities for both systems at `N̄ ∈ {2, 8, 32}²`, Parseval and
/// Bessel on 100 random level-(6,6) functions.
pub fn suite(seed: u64, le3_tol: f64, parseval_tol: f64) -> Result<Vec<CheckReport>> {
    let corpus = le3_corpus(seed)?;
    let sizes = [2usize, 8, 32];
    let ns: Vec<[usize; 2]> = sizes.iter().flat_map(|&a| sizes.iter().map(move |&b| [a, b])).collect();
    let mut out = Vec::new();
    for kind in [SystemKind::Walsh, SystemKind::Trig] {
        let mut reps = check_le3(&corpus, kind, &ns, le3_tol)?;
        for r in &mut reps {
            r.notes.push("the hypothesis 1 < q₁, q₂ < 2 is not used".into());
        }
        out.extend(reps);
    }
    let fine = generate(&CorpusSpec::new(CorpusKind::RandomStep, [6, 6], 100, seed))?;
    out.push(check_parseval(&fine, parseval_tol)?);
    out.extend(check_bessel(&fine, parseval_tol)?);
    Ok(out)
}
