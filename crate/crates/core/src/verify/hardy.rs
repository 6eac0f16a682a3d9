//! Weighted Hardy inequalities for nonincreasing profiles on `(0, 1]`.
//!
//! Profiles are piecewise power functions `c·s^{-γ}`, so the right-hand sides
//! and the head integrals near `0` are closed-form. Interior pieces of the
//! left-hand sides are integrated with tanh-sinh quadrature in `ln t`.

use serde::Serialize;

use super::report::{fmt_num, CheckReport, ReportBuilder};

/// `f*(s) = c·s^{-γ}` on `(lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub c: f64,
    pub gamma: f64,
}

/// Nonincreasing profile on `(0, 1]`, zero beyond `1`. Pieces are ordered by
/// `t` and tile `(0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Profile {
    pub name: String,
    pub pieces: Vec<Piece>,
}

impl Profile {
    pub fn indicator() -> Self {
        Self { name: "indicator".into(), pieces: vec![Piece { lo: 0.0, hi: 1.0, c: 1.0, gamma: 0.0 }] }
    }

    /// `t^{-1/(2r)}`; the indicator for `r = ∞`.
    pub fn power(r: f64) -> Self {
        Self { name: "power".into(), pieces: vec![Piece { lo: 0.0, hi: 1.0, c: 1.0, gamma: 0.5 / r }] }
    }

    /// `t^{-1/4}` sampled at the right end of each `(2^{-j-1}, 2^{-j}]`,
    /// `j < 12`, and constant on `(0, 2^{-12}]`.
    pub fn sampled_step() -> Self {
        let depth = 12;
        let mut pieces = vec![Piece { lo: 0.0, hi: (-(depth as f64)).exp2(), c: (depth as f64 / 4.0).exp2(), gamma: 0.0 }];
        for j in (0..depth).rev() {
            let hi = (-(j as f64)).exp2();
            pieces.push(Piece { lo: hi / 2.0, hi, c: (j as f64 / 4.0).exp2(), gamma: 0.0 });
        }
        Self { name: "sampled_step".into(), pieces }
    }

    pub fn zero() -> Self {
        Self { name: "zero".into(), pieces: vec![Piece { lo: 0.0, hi: 1.0, c: 0.0, gamma: 0.0 }] }
    }

    fn piece_at(&self, t: f64) -> Option<&Piece> {
        self.pieces.iter().find(|p| t > p.lo && t <= p.hi)
    }

    pub fn value(&self, t: f64) -> f64 {
        self.piece_at(t).map_or(0.0, |p| p.c * t.powf(-p.gamma))
    }

    /// `∫_a^b f*^r` over `(a, b] ⊆` one piece, `r` finite.
    fn piece_integral(p: &Piece, r: f64, a: f64, b: f64) -> f64 {
        if p.c == 0.0 || b <= a {
            return 0.0;
        }
        let kappa = 1.0 - r * p.gamma;
        p.c.powf(r) * (b.powf(kappa) - a.powf(kappa)) / kappa
    }

    /// `(∫₀^t f*^r)^{1/r}`, or `ess sup_{(0,t)} f*` for `r = ∞`.
    pub fn head_mean(&self, t: f64, r: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if r.is_infinite() {
            let p = self.pieces[0];
            return if p.c == 0.0 { 0.0 } else if p.gamma > 0.0 { f64::INFINITY } else { p.c };
        }
        let t = t.min(1.0);
        let s: f64 = self.pieces.iter().filter(|p| p.lo < t).map(|p| Self::piece_integral(p, r, p.lo, p.hi.min(t))).sum();
        s.powf(1.0 / r)
    }

    /// `(∫_t^∞ f*^r)^{1/r}`, or `ess sup_{(t,∞)} f*` for `r = ∞`.
    pub fn tail_mean(&self, t: f64, r: f64) -> f64 {
        if t >= 1.0 {
            return 0.0;
        }
        if r.is_infinite() {
            return self.pieces.iter().find(|p| t >= p.lo && t < p.hi).map_or(0.0, |p| p.c * t.powf(-p.gamma));
        }
        let s: f64 = self.pieces.iter().filter(|p| p.hi > t).map(|p| Self::piece_integral(p, r, p.lo.max(t), p.hi)).sum();
        s.powf(1.0 / r)
    }
}

/// `∫_lo^hi (c t^e)^q dt/t`, or the sup of `c t^e` for `q = ∞`.
fn power_norm(c: f64, e: f64, lo: f64, hi: f64, q: f64) -> f64 {
    if c == 0.0 {
        return 0.0;
    }
    if q.is_infinite() {
        return c * if e < 0.0 { lo.powf(e) } else { hi.powf(e) };
    }
    let eq = e * q;
    let v = if eq == 0.0 {
        (hi / lo).ln()
    } else if lo == 0.0 {
        if eq < 0.0 {
            f64::INFINITY
        } else {
            hi.powf(eq) / eq
        }
    } else {
        (hi.powf(eq) - lo.powf(eq)) / eq
    };
    c.powf(q) * v
}

/// `∫ φ(t)^q dt/t` over `[lo, hi]`, `lo > 0`, or `sup φ` for `q = ∞`.
fn numeric_norm(phi: &dyn Fn(f64) -> f64, lo: f64, hi: f64, q: f64) -> f64 {
    let (a, b) = (lo.ln(), hi.ln());
    if q.is_infinite() {
        // dense scan in ln t with golden-section refinement around the best node
        let n = 512;
        let h = (b - a) / n as f64;
        let (mut best_i, mut best) = (0, f64::NEG_INFINITY);
        for i in 0..=n {
            let v = phi((a + i as f64 * h).exp());
            if v > best {
                best = v;
                best_i = i;
            }
        }
        let (mut x0, mut x1) = (a + (best_i.max(1) - 1) as f64 * h, a + (best_i + 1).min(n) as f64 * h);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..80 {
            let m1 = x1 - g * (x1 - x0);
            let m2 = x0 + g * (x1 - x0);
            if phi(m1.exp()) < phi(m2.exp()) {
                x0 = m1;
            } else {
                x1 = m2;
            }
        }
        return best.max(phi((0.5 * (x0 + x1)).exp()));
    }
    let panels = ((b - a) / 2.0).ceil().max(1.0) as usize;
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let (u0, u1) = (a + k as f64 * h, a + (k + 1) as f64 * h);
            let f = |u: f64| phi(u.exp()).powf(q);
            let scale = f(0.5 * (u0 + u1)).abs() * h + f64::MIN_POSITIVE;
            quadrature::integrate(f, u0, u1, 1e-14 * scale).integral
        })
        .sum()
}

fn combine(parts: &[f64], q: f64) -> f64 {
    if q.is_infinite() {
        parts.iter().copied().fold(0.0, f64::max)
    } else {
        parts.iter().sum::<f64>().powf(1.0 / q)
    }
}

/// Which of the two Hardy displays.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Display {
    /// `t^{-α}(∫₀^t f*^r)^{1/r}` against `t^{1/r-α} f*`.
    Head,
    /// `t^{α}(∫_t^∞ f*^r)^{1/r}` against `t^{α+1/r} f*`.
    Tail,
}

impl Display {
    pub fn name(self) -> &'static str {
        match self {
            Display::Head => "head",
            Display::Tail => "tail",
        }
    }
}

/// Both sides of one Hardy display without the `C α^{-β}` factor.
pub fn hardy_sides(f: &Profile, display: Display, alpha: f64, q: f64, r: f64) -> (f64, f64) {
    let inv_r = if r.is_infinite() { 0.0 } else { 1.0 / r };
    match display {
        Display::Head => {
            let rhs: Vec<f64> = f.pieces.iter().map(|p| power_norm(p.c, inv_r - alpha - p.gamma, p.lo, p.hi, q)).collect();
            let p0 = f.pieces[0];
            let mut lhs = Vec::with_capacity(f.pieces.len() + 1);
            // head mean on the first piece is c κ^{-1/r} t^{κ/r}
            lhs.push(if r.is_infinite() {
                power_norm(f.head_mean(p0.hi, r), -alpha, 0.0, p0.hi, q)
            } else {
                let kappa = 1.0 - r * p0.gamma;
                power_norm(p0.c * kappa.powf(-inv_r), kappa * inv_r - alpha, 0.0, p0.hi, q)
            });
            for p in &f.pieces[1..] {
                lhs.push(numeric_norm(&|t: f64| t.powf(-alpha) * f.head_mean(t, r), p.lo, p.hi, q));
            }
            // constant head mean beyond t = 1
            lhs.push(if q.is_infinite() { f.head_mean(1.0, r) } else { f.head_mean(1.0, r).powf(q) / (alpha * q) });
            (combine(&lhs, q), combine(&rhs, q))
        }
        Display::Tail => {
            let rhs: Vec<f64> = f.pieces.iter().map(|p| power_norm(p.c, alpha + inv_r - p.gamma, p.lo, p.hi, q)).collect();
            let phi = |t: f64| t.powf(alpha) * f.tail_mean(t, r);
            let p0 = f.pieces[0];
            let mut lhs = Vec::with_capacity(f.pieces.len() + 1);
            if r.is_infinite() && p0.gamma == 0.0 {
                lhs.push(power_norm(p0.c, alpha, 0.0, p0.hi, q));
            } else {
                // below the cut the tail mean is within a relative 2^{-30} of its value at 0
                let cut = p0.hi * (-60f64).exp2();
                let t0 = f.tail_mean(0.0, r);
                lhs.push(if q.is_infinite() { 0.0 } else { t0.powf(q) * cut.powf(alpha * q) / (alpha * q) });
                lhs.push(numeric_norm(&phi, cut, p0.hi, q));
            }
            for p in &f.pieces[1..] {
                lhs.push(numeric_norm(&phi, p.lo, p.hi, q));
            }
            (combine(&lhs, q), combine(&rhs, q))
        }
    }
}

/// `β = max(1/q, 1/r)`.
pub fn hardy_beta(q: f64, r: f64) -> f64 {
    let inv = |x: f64| if x.is_infinite() { 0.0 } else { 1.0 / x };
    inv(q).max(inv(r))
}

pub fn default_alpha_grid() -> Vec<f64> {
    (1..=10).map(|k| (-(k as f64)).exp2()).collect()
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Thresholds for [`check_hardy`].
#[derive(Clone, Copy, Debug)]
pub struct HardyThresholds {
    pub constant: f64,
    pub alpha_spread: f64,
}

/// Bound, α-uniformity and α-adapted reports for one `(q, r)` and display.
pub fn check_hardy(q: f64, r: f64, display: Display, alphas: &[f64], th: HardyThresholds) -> Vec<CheckReport> {
    let profiles = [Profile::indicator(), Profile::power(r), Profile::sampled_step()];
    let beta = hardy_beta(q, r);
    let inv_q = if q.is_infinite() { 0.0 } else { 1.0 / q };
    let tag = |b: ReportBuilder| b.param("q", fmt_num(q)).param("r", fmt_num(r)).param("display", display.name());

    let mut bound = tag(ReportBuilder::new("hardy", "profiles-v1", th.constant, 0.0)).param("beta", fmt_num(beta));
    let mut uniform = tag(ReportBuilder::new("hardy_alpha_uniformity", "profiles-v1", th.alpha_spread, 0.0));
    let mut adapted =
        tag(ReportBuilder::new("hardy_alpha_adapted", "profiles-v1", th.alpha_spread, 0.0)).param("exponent", fmt_num(inv_q)).ungated();
    adapted.note("max/median over α of LHS·α^{1/q}/RHS; diagnostic only");

    let mut witnesses = Vec::new();
    for prof in &profiles {
        let mut ratios = Vec::new();
        let mut adapted_ratios = Vec::new();
        for &alpha in alphas {
            let case = format!("{}@alpha={}", prof.name, fmt_num(alpha));
            let (lhs, rhs) = hardy_sides(prof, display, alpha, q, r);
            if rhs.is_infinite() {
                bound.skip(case, "divergent right-hand side");
                continue;
            }
            let scaled = lhs * alpha.powf(beta);
            bound.case(case, scaled, rhs);
            witnesses.push(serde_json::json!({ "profile": prof, "alpha": alpha }));
            if rhs > 0.0 {
                ratios.push(scaled / rhs);
                adapted_ratios.push(lhs * alpha.powf(inv_q) / rhs);
            }
        }
        for (builder, mut rs) in [(&mut uniform, ratios), (&mut adapted, adapted_ratios)] {
            if rs.len() < 2 {
                builder.skip(prof.name.clone(), "fewer than two finite α points");
                continue;
            }
            let max = rs.iter().copied().fold(0.0, f64::max);
            let med = median(&mut rs);
            builder.case(prof.name.clone(), max, med);
        }
    }
    vec![
        bound.finish(|i| witnesses.get(i).cloned()),
        uniform.finish(|i| serde_json::to_value(&profiles[i]).ok()),
        adapted.finish(|i| serde_json::to_value(&profiles[i]).ok()),
    ]
}

/// Both displays over `q, r ∈ {1, 2, ∞}` and the default α grid.
pub fn suite(constant: f64, alpha_spread: f64) -> Vec<CheckReport> {
    let th = HardyThresholds { constant, alpha_spread };
    let alphas = default_alpha_grid();
    let exps = [1.0, 2.0, f64::INFINITY];
    let mut out = Vec::new();
    for display in [Display::Head, Display::Tail] {
        for &q in &exps {
            for &r in &exps {
                out.extend(check_hardy(q, r, display, &alphas, th));
            }
        }
    }
    out
}
