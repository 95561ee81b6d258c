//! The Seiberg-Witten curve `y² = 4x²(x+u) + 4mΛ³x + Λ⁶`, its Weierstrass
//! invariants, the σ-function as a series, and the identities tying the
//! curve to the blow-up ratio and to the `a = m` degeneration.

use crate::blowup::blowup_ratio;
use crate::error::{CoreError, Result};
use crate::exactalg::{int_unit, lambda_unit, GradedSeries, MultiPoly, RationalFn, Ring, Scalar, Var, LU};
use crate::nekrasov::GaugeParams;
use crate::prepotential::{expansion, lambda_pow, u_series, CurveSeed, IdentityCheck, LSeries};

fn sc(n: i64, d: i64) -> Scalar {
    Scalar::from_frac(n, d)
}

/// `g₂`, `g₃` and `Δ` of the curve, over any coefficient ring.
#[derive(Clone, Debug)]
pub struct WeierstrassData<C: Ring> {
    pub g2: C,
    pub g3: C,
    pub delta: C,
}

/// Polynomial inputs `(u, m, Λ³)` of the invariants; `Λ³` is passed as a
/// single quantity since only its powers occur.
fn invariants<C: Ring>(u: &C, m: &C, l3: &C) -> WeierstrassData<C> {
    let u2 = u.rmul(u);
    let ml3 = m.rmul(l3);
    let l6 = l3.rmul(l3);
    let g2 = u2.rscale(&sc(4, 3)).rsub(&ml3.rscale(&sc(4, 1)));
    let g3 = u2.rmul(u).rscale(&sc(-8, 27)).radd(&u.rmul(&ml3).rscale(&sc(4, 3))).rsub(&l6);
    let delta = g2.rmul(&g2).rmul(&g2).rsub(&g3.rmul(&g3).rscale(&sc(27, 1)));
    WeierstrassData { g2, g3, delta }
}

/// The closed-form discriminant `−Λ⁶(16u³ − 16u²m² − 72umΛ³ + 64m³Λ³ + 27Λ⁶)`.
pub fn discriminant_closed_form<C: Ring>(u: &C, m: &C, l3: &C) -> C {
    let u2 = u.rmul(u);
    let m2 = m.rmul(m);
    let l6 = l3.rmul(l3);
    let inner = u2
        .rmul(u)
        .rscale(&sc(16, 1))
        .rsub(&u2.rmul(&m2).rscale(&sc(16, 1)))
        .rsub(&u.rmul(m).rmul(l3).rscale(&sc(72, 1)))
        .radd(&m2.rmul(m).rmul(l3).rscale(&sc(64, 1)))
        .radd(&l6.rscale(&sc(27, 1)));
    l6.rmul(&inner).rneg()
}

/// Invariants with `u`, `m`, `Λ` as polynomial indeterminates.
pub fn curve_data_symbolic() -> WeierstrassData<MultiPoly> {
    let l3 = MultiPoly::var(Var::Lam).pow(3);
    invariants(&MultiPoly::var(Var::U), &MultiPoly::var(Var::M), &l3)
}

/// Invariants as Λ-series, for `u` given as a Λ-series and `m` a
/// coefficient.
pub fn curve_data(u: &LSeries, m: &RationalFn) -> WeierstrassData<LSeries> {
    let mm = GradedSeries::constant("L", lambda_unit(), m.clone(), None);
    invariants(u, &mm, &lambda_pow(3))
}

/// Check that `4(x + u/3)³ − g₂(x + u/3) − g₃` is the curve's cubic.
pub fn shifted_form_matches_curve() -> bool {
    let w = curve_data_symbolic();
    let (x, u, m, l) = (MultiPoly::var(Var::X), MultiPoly::var(Var::U), MultiPoly::var(Var::M), MultiPoly::var(Var::Lam));
    let xs = x.add(&u.scale(&sc(1, 3)));
    let weier = xs.pow(3).scale(&sc(4, 1)).sub(&w.g2.mul(&xs)).sub(&w.g3);
    let curve = x.pow(2).mul(&x.add(&u)).scale(&sc(4, 1)).add(&m.mul(&l.pow(3)).mul(&x).scale(&sc(4, 1))).add(&l.pow(6));
    weier == curve
}

/// Laurent coefficients `c_k` (`k ≥ 2`) of `℘(t) = t^{−2} + Σ c_k t^{2k−2}`
/// from `c₂ = g₂/20`, `c₃ = g₃/28` and
/// `c_k = 3/((2k+1)(k−3))·Σ_{j=2}^{k−2} c_j c_{k−j}`.
pub fn wp_coefficients<C: Ring>(g2: &C, g3: &C, kmax: usize) -> Vec<C> {
    let mut c: Vec<C> = vec![C::zero(), C::zero()];
    if kmax >= 2 {
        c.push(g2.rscale(&sc(1, 20)));
    }
    if kmax >= 3 {
        c.push(g3.rscale(&sc(1, 28)));
    }
    for k in 4..=kmax {
        let mut acc = C::zero();
        for j in 2..=k - 2 {
            acc = acc.radd(&c[j].rmul(&c[k - j]));
        }
        c.push(acc.rscale(&sc(3, ((2 * k + 1) * (k - 3)) as i64)));
    }
    c
}

/// `σ(t)` through `t^{t_order}` from `(log σ)'' = −℘`, normalized so that
/// `σ = t + O(t⁵)`.
pub fn sigma_expansion<C: Ring>(g2: &C, g3: &C, t_order: usize) -> Result<GradedSeries<C>> {
    let prec = t_order as i64 + 1;
    let c = wp_coefficients(g2, g3, t_order / 2 + 1);
    // log(σ/t) = −Σ c_k t^{2k}/(2k(2k−1))
    let mut log = GradedSeries::new("t", int_unit(), Some(prec));
    for (k, ck) in c.iter().enumerate().skip(2) {
        let e = 2 * k as i64;
        if e < prec {
            log.add_term(e, ck.rscale(&sc(-1, e * (e - 1))));
        }
    }
    Ok(log.exp()?.shift(1).with_prec(Some(prec)))
}

/// Result of comparing the twisted blow-up ratio with `−Λe^{ut²/6}σ(t)`.
#[derive(Clone, Debug)]
pub struct SigmaReport {
    pub t_order: usize,
    pub lambda_order: i64,
    /// `(t-exponent, Λ-exponent in Λ units)` of the first mismatch.
    pub first_mismatch: Option<(i64, i64)>,
    /// Number of `(t^j, Λ^e)` coefficients compared.
    pub compared: usize,
}

impl SigmaReport {
    pub fn holds(&self) -> bool {
        self.first_mismatch.is_none()
    }
}

/// `−Λ·e^{ut²/6}·σ(t)` with `g₂`, `g₃` from [`curve_data`].
pub fn sigma_side(u: &LSeries, t_order: usize) -> Result<GradedSeries<LSeries>> {
    let w = curve_data(u, &RationalFn::var(Var::M));
    let sigma = sigma_expansion(&w.g2, &w.g3, t_order)?;
    let prec = t_order as i64 + 1;
    let arg = GradedSeries::monomial("t", int_unit(), 2, u.scale(&sc(1, 6)), Some(prec));
    let lam = lambda_pow(1).scale(&sc(-1, 1));
    Ok(arg.exp()?.mul(&sigma).map_coeffs(|c| c.mul(&lam)).with_prec(Some(prec)))
}

/// The twisted ratio, as a t-series of Λ-series, against the σ side.
pub fn verify_blowup_sigma(t_order: usize, lambda_order: i64) -> Result<SigmaReport> {
    let gauge = GaugeParams::new(1)?;
    let ratio = blowup_ratio(1, t_order, lambda_order)?;
    let max_n = (lambda_order / gauge.gamma() + 1) as usize;
    let u = u_series(&expansion(gauge, max_n, 0)?, gauge);
    let sigma = sigma_side(&u, t_order)?;
    let bound = LU * lambda_order;
    let mut compared = 0;
    for j in 0..=t_order as i64 {
        let lhs = ratio.coeff(j)?;
        let rhs = sigma.coeff(j)?;
        let lp = lhs.prec().unwrap_or(i64::MAX).min(rhs.prec().unwrap_or(i64::MAX));
        if lp <= bound {
            return Err(CoreError::Precision(format!("t^{} known only below Λ-unit {}", j, lp)));
        }
        for e in lhs.terms().keys().chain(rhs.terms().keys()).filter(|e| **e <= bound) {
            if lhs.coeff_or_zero(*e) != rhs.coeff_or_zero(*e) {
                return Ok(SigmaReport { t_order, lambda_order, first_mismatch: Some((j, *e)), compared });
            }
            compared += 1;
        }
    }
    Ok(SigmaReport { t_order, lambda_order, first_mismatch: None, compared })
}

fn truncate_lambda(s: &LSeries, lambda_order: i64) -> LSeries {
    s.clone().with_prec(Some(LU * lambda_order + 1))
}

/// A blow-up ratio as returned by [`blowup_ratio`].
pub type RatioSeries = GradedSeries<LSeries>;

/// The odd t-coefficients of the twisted ratio through `t⁷` (and at most
/// `t^t_order`) against their closed forms in `u`, `m` and `Λ`, compared
/// through `Λ^lambda_order`.
pub fn coefficient_checks(ratio: &RatioSeries, u: &LSeries, lambda_order: i64) -> Result<Vec<IdentityCheck>> {
    let u = truncate_lambda(u, lambda_order);
    let ml3 = lambda_pow(3).mul_coeff(&RationalFn::var(Var::M));
    let u2 = u.mul(&u);
    let closed = [
        (1, "t^1: -L", lambda_pow(0), 1),
        (3, "t^3: -L u/3!", u.clone(), 6),
        (5, "t^5: -L (u^2 + 2 m L^3)/5!", u2.add(&ml3.scale(&sc(2, 1))), 120),
        (7, "t^7: -L (u^3 + 6 u m L^3 + 6 L^6)/7!", u2.mul(&u).add(&u.mul(&ml3).scale(&sc(6, 1))).add(&lambda_pow(6).scale(&sc(6, 1))), 5040),
    ];
    let t_prec = ratio.prec().unwrap_or(i64::MAX);
    let mut out = Vec::new();
    for (j, name, body, fact) in closed.into_iter().filter(|c| c.0 < t_prec) {
        let rhs = truncate_lambda(&body.mul(&lambda_pow(1)).scale(&sc(-1, fact)), lambda_order);
        let lhs = truncate_lambda(&ratio.coeff(j)?, lambda_order);
        out.push(IdentityCheck::compare(name, &lhs, &rhs));
    }
    Ok(out)
}

/// [`coefficient_checks`] on a freshly computed ratio through `t⁷`.
pub fn verify_blowup_coefficients(lambda_order: i64) -> Result<Vec<IdentityCheck>> {
    let gauge = GaugeParams::new(1)?;
    let ratio = blowup_ratio(1, 7, lambda_order)?;
    let max_n = (lambda_order / gauge.gamma() + 1) as usize;
    let u = u_series(&expansion(gauge, max_n, 0)?, gauge);
    coefficient_checks(&ratio, &u, lambda_order)
}

/// For `c₁ = 0` the ratio is `1 + O(t³)`; for `c₁ = C` it is `O(t)`. Every
/// coefficient of `ratio` must be known through `Λ^lambda_order`.
pub fn vanishing_checks(k: u8, ratio: &RatioSeries, lambda_order: i64) -> Result<Vec<IdentityCheck>> {
    let t_prec = ratio.prec().unwrap_or(i64::MAX);
    for (j, c) in ratio.terms() {
        if c.prec().is_some_and(|p| p <= LU * lambda_order) {
            return Err(CoreError::Precision(format!("t^{} known only below Λ-unit {}", j, c.prec().unwrap())));
        }
    }
    let zero = GradedSeries::new("L", lambda_unit(), Some(LU * lambda_order + 1));
    let one = truncate_lambda(&lambda_pow(0), lambda_order);
    let cut = |j: i64| -> Result<LSeries> { Ok(truncate_lambda(&ratio.coeff(j)?, lambda_order)) };
    let mut out = Vec::new();
    if k == 0 {
        out.push(IdentityCheck::compare("c1 = 0: t^0 coefficient is 1", &cut(0)?, &one));
        for (j, name) in [(1, "c1 = 0: t^1 coefficient vanishes"), (2, "c1 = 0: t^2 coefficient vanishes")] {
            if j < t_prec {
                out.push(IdentityCheck::compare(name, &cut(j)?, &zero));
            }
        }
    } else {
        out.push(IdentityCheck::compare("c1 = C: t^0 coefficient vanishes", &cut(0)?, &zero));
    }
    Ok(out)
}

/// [`vanishing_checks`] for both values of `c₁` through `t^t_order`.
pub fn verify_vanishing(t_order: usize, lambda_order: i64) -> Result<Vec<IdentityCheck>> {
    let mut out = vanishing_checks(0, &blowup_ratio(0, t_order, lambda_order)?, lambda_order)?;
    out.extend(vanishing_checks(1, &blowup_ratio(1, t_order, lambda_order)?, lambda_order)?);
    Ok(out)
}

/// The curve identities at `a = m`: the two cubic relations between `u`
/// and `P = (π/ω)²`, their solved form in terms of the contact term, and
/// the vanishing of the discriminant.
pub fn verify_am_curve_identities(max_n: usize) -> Result<Vec<IdentityCheck>> {
    let gauge = GaugeParams::new(1)?;
    let e = expansion(gauge, max_n, 0)?;
    let seed = CurveSeed::new(&e, gauge).specialize_am()?;
    let a = RationalFn::var(Var::A);
    let u = &seed.u;
    let p = seed.pi_over_omega.mul(&seed.pi_over_omega);
    let up = u.add(&p);
    let mut out = vec![
        IdentityCheck::compare("(u+P)^2 (u-2P) = 27/4 L^6", &up.mul(&up).mul(&u.sub(&p.scale(&sc(2, 1)))), &lambda_pow(6).scale(&sc(27, 4))),
        IdentityCheck::compare("(u+P)(u-P) = 3a L^3", &up.mul(&u.sub(&p)), &lambda_pow(3).mul_coeff(&a.scale(&sc(3, 1)))),
    ];
    // With Λ⁴ ↦ aΛ³ and φ² = T/Λ²: u/Λ² = (3φ² + φ⁻²)/2, (π/ω)²/Λ² = (3φ² − φ⁻²)/2.
    let t = &seed.t;
    let a_l3_over_t = t.inv()?.shift(LU * 3).mul_coeff(&a);
    out.push(IdentityCheck::compare("u = (3T + a L^3/T)/2", u, &t.scale(&sc(3, 1)).add(&a_l3_over_t).scale(&sc(1, 2))));
    out.push(IdentityCheck::compare("P = (3T - a L^3/T)/2", &p, &t.scale(&sc(3, 1)).sub(&a_l3_over_t).scale(&sc(1, 2))));
    let w = curve_data(u, &a);
    let zero = GradedSeries::new("L", lambda_unit(), w.delta.prec());
    out.push(IdentityCheck::compare("discriminant vanishes at a = m", &w.delta, &zero));
    Ok(out)
}
