//! Mixed norms before and after rearranging in the first variable.
//!
//! Both displays take the inner integral in x₂, so they are evaluated as
//! [`mixed_lebesgue_norm`] of the transposed grids.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::norms::mixed_lebesgue_norm;
use crate::rearrange::rearrange_x1;
use crate::stepfun::DyadicStep2D;

use super::corpus::{corpus_hash, generate, witness, CorpusKind, CorpusSpec, TestFunction};
use super::report::{fmt_num, CheckReport, ReportBuilder};

/// `(a)`: `‖f^{*₁}‖ ≤ ‖f‖` with inner `L^q` in x₂, outer `L^p` in x₁.
/// `(b)`: `‖f‖ ≤ ‖f^{*₁}‖` with inner `L^p`, outer `L^q`.
/// Returns `[(lhs_a, rhs_a), (lhs_b, rhs_b)]`.
pub fn mink_sides(f: &DyadicStep2D, p: f64, q: f64) -> [(f64, f64); 2] {
    let ft = f.transposed();
    let rt = rearrange_x1(f).transposed();
    [
        (mixed_lebesgue_norm(&rt, [q, p]), mixed_lebesgue_norm(&ft, [q, p])),
        (mixed_lebesgue_norm(&ft, [p, q]), mixed_lebesgue_norm(&rt, [p, q])),
    ]
}

pub fn check_mink(corpus: &[TestFunction], p: f64, q: f64, tol: f64) -> Result<Vec<CheckReport>> {
    if !(p > 0.0 && p <= q) {
        return Err(Error::Parameter(format!("need 0 < p ≤ q, got p = {p}, q = {q}")));
    }
    let hash = corpus_hash(corpus);
    let sides: Vec<_> = corpus.par_iter().map(|t| mink_sides(&t.f, p, q)).collect();
    Ok(["a", "b"]
        .iter()
        .enumerate()
        .map(|(part, name)| {
            let mut b = ReportBuilder::new("mink", hash.clone(), 1.0, tol)
                .param("p", fmt_num(p))
                .param("q", fmt_num(q))
                .param("part", *name);
            for (t, s) in corpus.iter().zip(&sides) {
                b.case(t.id.clone(), s[part].0, s[part].1);
            }
            b.finish(|i| Some(witness(&corpus[i])))
        })
        .collect())
}

/// 100 random level-(5,5) grids, `(p, q) ∈ {(1,2), (1,∞), (2,4)}`.
pub fn suite(seed: u64, tol: f64) -> Result<Vec<CheckReport>> {
    let corpus = generate(&CorpusSpec::new(CorpusKind::RandomStep, [5, 5], 100, seed))?;
    let mut out = Vec::new();
    for (p, q) in [(1.0, 2.0), (1.0, f64::INFINITY), (2.0, 4.0)] {
        out.extend(check_mink(&corpus, p, q, tol)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stepfun::DyadicStep1D;

    #[test]
    fn tensor_and_equal_exponents_are_equalities() {
        let g = DyadicStep1D::new(2, vec![1.0, 3.0, 0.0, 2.0]).unwrap();
        let h = DyadicStep1D::new(1, vec![0.5, 4.0]).unwrap();
        let f = DyadicStep2D::tensor(&g, &h);
        for [a, b] in [mink_sides(&f, 1.0, 2.0), mink_sides(&f, 2.0, f64::INFINITY)] {
            assert!((a.0 - a.1).abs() < 1e-12 && (b.0 - b.1).abs() < 1e-12);
        }
        let f = DyadicStep2D::from_rows(vec![vec![1.0, 4.0], vec![3.0, 2.0]]).unwrap();
        for (l, r) in mink_sides(&f, 2.0, 2.0) {
            assert!((l - r).abs() < 1e-12);
        }
    }

    #[test]
    fn strict_example() {
        // columns (x₁ fixed) of f: [1,3] and [4,2]; after *₁: [4,3] and [1,2]
        let f = DyadicStep2D::from_rows(vec![vec![1.0, 4.0], vec![3.0, 2.0]]).unwrap();
        let [(la, ra), (lb, rb)] = mink_sides(&f, 1.0, f64::INFINITY);
        assert_eq!((la, ra), (3.0, 3.5));
        assert_eq!((lb, rb), (3.0, 3.5));
    }

    #[test]
    fn rejects_p_above_q() {
        assert!(check_mink(&[], 2.0, 1.0, 0.0).is_err());
    }
}
