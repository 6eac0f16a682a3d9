//! The main implementation against the brute-force reference crate.

use lorentz_forge::fourier::{coeffs_2d_signed, OrthonormalSystem};
use lorentz_forge::norms::{grand_lorentz_norm, grand_seq_norm, lorentz_norm, mixed_lebesgue_norm, BlockSums};
use lorentz_forge::rearrange::{
    distribution_function, iterated_rearrange_2d, iterated_rearrange_seq_order, rearrange_1d,
};
use lorentz_forge::verify::corpus::{generate, CorpusKind, CorpusSpec, TestFunction};
use lorentz_forge::{DyadicStep1D, DyadicStep2D, Exponents, GrandParams, RearrangeOrder, SeqSign, Sequence2D, SystemKind};
use lorentz_oracles as oracle;

const INF: f64 = f64::INFINITY;

fn rows(f: &DyadicStep2D) -> Vec<Vec<f64>> {
    f.rows().map(<[f64]>::to_vec).collect()
}

fn seq_rows(a: &Sequence2D) -> Vec<Vec<f64>> {
    let [k1, k2] = a.dims();
    (0..k1).map(|i| (0..k2).map(|j| a.get(i, j)).collect()).collect()
}

fn random(levels: [u32; 2], count: usize, seed: u64) -> Vec<TestFunction> {
    generate(&CorpusSpec::new(CorpusKind::RandomStep, levels, count, seed)).unwrap()
}

/// Every `n×n` matrix over {0,1,2}.
fn all_small(n: usize) -> impl Iterator<Item = Vec<f64>> {
    (0..3usize.pow((n * n) as u32)).map(move |mut code| {
        (0..n * n)
            .map(|_| {
                let d = code % 3;
                code /= 3;
                d as f64
            })
            .collect()
    })
}

#[test]
fn rearrangement_exhaustive_2x2() {
    for v in all_small(2) {
        let f = DyadicStep2D::new([1, 1], v).unwrap();
        assert_eq!(rows(&iterated_rearrange_2d(&f)), oracle::oracle_rearrange(&rows(&f)));
    }
}

#[test]
fn rearrangement_exhaustive_3x3() {
    // 3×3 grids are not dyadic; zero-padding to 4×4 leaves the rearranged
    // values in the top-left 3×3 block and zeros elsewhere
    for v in all_small(3) {
        let m: Vec<Vec<f64>> = v.chunks(3).map(<[f64]>::to_vec).collect();
        let mut padded = vec![0.0; 16];
        for (j2, r) in m.iter().enumerate() {
            padded[j2 * 4..j2 * 4 + 3].copy_from_slice(r);
        }
        let f = DyadicStep2D::new([2, 2], padded).unwrap();
        let got = rows(&iterated_rearrange_2d(&f));
        let want = oracle::oracle_rearrange(&m);
        for j2 in 0..4 {
            for j1 in 0..4 {
                let w = if j1 < 3 && j2 < 3 { want[j2][j1] } else { 0.0 };
                assert_eq!(got[j2][j1], w, "{m:?}");
            }
        }
        // the same two passes on an unpadded 3×3 double sequence
        let seq = Sequence2D::from_rows(m.clone()).unwrap();
        assert_eq!(seq_rows(&iterated_rearrange_seq_order(&seq, RearrangeOrder::Seq)), oracle::oracle_rearrange_seq(&m));
        assert_eq!(
            seq_rows(&iterated_rearrange_seq_order(&seq, RearrangeOrder::Fun)),
            oracle::oracle_rearrange_seq_fun(&m)
        );
    }
}

#[test]
fn rearrangement_random_grids() {
    for t in random([5, 5], 200, 3) {
        assert_eq!(rows(&iterated_rearrange_2d(&t.f)), oracle::oracle_rearrange(&rows(&t.f)), "{}", t.id);
    }
}

#[test]
fn equimeasurability() {
    for t in random([6, 0], 20, 5) {
        let g = DyadicStep1D::new(6, t.f.values().to_vec()).unwrap();
        let r = rearrange_1d(&g);
        assert_eq!(r.values(), oracle::sigma_scan_1d(g.values()).as_slice());
        let max = g.values().iter().fold(0.0f64, |m, v| m.max(*v));
        for i in 0..100 {
            let sigma = max * i as f64 / 99.0;
            let d = distribution_function(&g, sigma);
            assert_eq!(d, distribution_function(&r, sigma));
            assert_eq!(d, oracle::distribution(g.values(), sigma));
        }
    }
}

#[test]
fn lorentz_norm_closed_forms() {
    let one = DyadicStep2D::constant([0, 0], 1.0).unwrap();
    let e = Exponents::new([2.0, 2.0], [1.0, 1.0]).unwrap();
    assert!((lorentz_norm(&one, &e) - 4.0).abs() < 1e-12);
    let o = oracle::oracle_lorentz_norm(&rows(&one), [2.0, 2.0], [1.0, 1.0], 4);
    assert!((o.value - 4.0).abs() < 1e-6);
    // indicator of [0,1/2)×[0,1) at p̄ = q̄ = (1,1) is its L¹ norm
    let ind = DyadicStep2D::from_rows(vec![vec![1.0, 0.0]]).unwrap();
    let e11 = Exponents::new([1.0, 1.0], [1.0, 1.0]).unwrap();
    assert!((lorentz_norm(&ind, &e11) - 0.5).abs() < 1e-12);
    assert!((oracle::oracle_lorentz_norm(&rows(&ind), [1.0, 1.0], [1.0, 1.0], 5).value - 0.5).abs() < 1e-12);
}

#[test]
fn lorentz_norm_against_quadrature() {
    let cases = [([2.0, 2.0], [1.0, 1.0]), ([4.0 / 3.0, 2.0], [2.0, INF]), ([3.0, 1.5], [INF, 4.0]), ([1.0, 1.0], [1.0, 1.0])];
    for (i, t) in random([4, 4], 50, 11).into_iter().enumerate() {
        let (p, q) = cases[i % cases.len()];
        let main = lorentz_norm(&t.f, &Exponents::new(p, q).unwrap());
        let o = oracle::oracle_lorentz_norm(&rows(&t.f), p, q, 8);
        assert!((main - o.value).abs() <= 1e-6 * o.value.max(1.0), "{} p={p:?} q={q:?}: {main} vs {}", t.id, o.value);
    }
}

#[test]
fn mixed_norm_against_direct_sum() {
    for t in random([3, 4], 30, 2) {
        for p in [[1.0, 1.0], [2.0, 1.0], [1.0, 2.0], [3.0, INF], [INF, 0.5]] {
            let a = mixed_lebesgue_norm(&t.f, p);
            let b = oracle::oracle_mixed_norm(&rows(&t.f), p);
            assert!((a - b).abs() <= 1e-12 * b.max(1.0), "{p:?}: {a} vs {b}");
        }
    }
}

#[test]
fn grand_norm_against_quadrature() {
    for t in random([3, 3], 12, 4) {
        for theta in [[0.5, 0.5], [1.0, 0.25], [0.0, 1.0]] {
            let (p, q) = ([2.0, 4.0 / 3.0], [2.0, INF]);
            let g = GrandParams::new(theta).with_eps_j(6);
            let main = grand_lorentz_norm(&t.f, &Exponents::new(p, q).unwrap(), &g).unwrap().value;
            let o = oracle::oracle_grand_lorentz_norm(&rows(&t.f), p, q, theta, 6, 5).value;
            assert!((main - o).abs() <= 1e-9 * o.max(1.0), "{theta:?}: {main} vs {o}");
        }
    }
}

#[test]
fn block_sums_and_sequence_norm_against_direct_sums() {
    for t in random([4, 3], 10, 8) {
        let a = Sequence2D::new([16, 8], t.f.transposed().values().to_vec()).unwrap();
        let m = seq_rows(&a);
        let r = oracle::oracle_rearrange_seq(&m);
        let bs = BlockSums::new(&a, RearrangeOrder::Seq);
        for (n1, n2) in [(1, 1), (3, 5), (16, 8), (7, 2)] {
            assert!((bs.prefix(n1, n2) - oracle::oracle_block_sum(&r, n1, n2)).abs() < 1e-12);
        }
        for q in [[INF, INF], [2.0, 2.0], [1.0, INF]] {
            let theta = [1.0, 0.5];
            let e = Exponents::new([2.0, 2.0], q).unwrap();
            let main = grand_seq_norm(&a, &e, &GrandParams::new(theta).with_eps_j(3), SeqSign::Minus).unwrap().value;
            let o = oracle::oracle_grand_seq_norm(&m, [2.0, 2.0], q, theta, 3, -1.0, 420).value;
            assert!((main - o).abs() <= 1e-9 * o, "{q:?}: {main} vs {o}");
        }
    }
}

#[test]
fn walsh_coefficients_against_rademacher_products() {
    let fns = generate(&CorpusSpec::new(CorpusKind::Lacunary, [3, 3], 3, 1)).unwrap();
    for t in random([3, 2], 5, 6).into_iter().chain(fns) {
        let vals = t.coefficient_values().to_vec();
        let [n1, n2] = t.f.levels();
        let w = 1usize << n1;
        let signed: Vec<Vec<f64>> = vals.chunks(w).map(<[f64]>::to_vec).collect();
        let sys = OrthonormalSystem::of(SystemKind::Walsh);
        let k = [1usize << n1, 1usize << n2];
        let c = coeffs_2d_signed([n1, n2], &vals, [sys, sys], k).unwrap();
        for k1 in 0..k[0] {
            for k2 in 0..k[1] {
                let o = oracle::oracle_walsh_coeff(&signed, k1, k2, n1.max(n2) + 1);
                assert!((c.get(k1, k2).re - o).abs() < 1e-12 && c.get(k1, k2).im == 0.0);
            }
        }
    }
}

#[test]
fn trig_coefficients_against_midpoint_rule() {
    for t in random([2, 3], 4, 9) {
        let vals = t.f.values().to_vec();
        let signed: Vec<Vec<f64>> = vals.chunks(4).map(<[f64]>::to_vec).collect();
        let sys = OrthonormalSystem::of(SystemKind::Trig);
        let c = coeffs_2d_signed([2, 3], &vals, [sys, sys], [6, 6]).unwrap();
        for k1 in 0..6 {
            for k2 in 0..6 {
                let (re, im) = oracle::oracle_trig_coeff(&signed, k1, k2, 10);
                let z = c.get(k1, k2);
                assert!((z.re - re).abs() < 1e-5 && (z.im - im).abs() < 1e-5, "({k1},{k2}): {z} vs {re}+{im}i");
            }
        }
    }
}
