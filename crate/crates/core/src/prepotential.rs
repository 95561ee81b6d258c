//! Expansion of `ε₁ε₂ log Z^inst` into `F₀ + (ε₁+ε₂)H + ε₁ε₂A + (ε₁²+ε₂²)B/3`,
//! the function `u`, derivatives of the prepotential and the `a = m`
//! specialization together with the closed forms that hold there.

use crate::error::{CoreError, Result};
use crate::exactalg::{laurent, lambda_unit, GradedSeries, MultiPoly, RationalFn, Scalar, Var, LU};
use crate::nekrasov::{log_safe_schedule, log_zinst_eps, zinst_eps, FixedPointParams, GaugeParams, LamSeries};
use rayon::prelude::*;

/// A Λ-series (unit 1/12) with coefficients rational in `(a, m)`.
pub type LSeries = GradedSeries<RationalFn>;

/// Directions `(w₁, w₂)` of the lines `ε_i = w_i ε` used by the fast path.
pub const SLICE_LINE: (i64, i64) = (1, -1);
pub const SKEW_LINE: (i64, i64) = (1, -2);
/// A line off both the slice and the skew line, used only to check the
/// reconstruction. No tangent weight degenerates on it below instanton
/// number 5.
pub const CHECK_LINE: (i64, i64) = (2, 7);

fn lam(power: i64) -> i64 {
    LU * power
}

/// `Λ^power` as an exact series.
pub fn lambda_pow(power: i64) -> LSeries {
    GradedSeries::monomial("L", lambda_unit(), lam(power), RationalFn::one(), None)
}

fn cst(c: RationalFn) -> LSeries {
    GradedSeries::constant("L", lambda_unit(), c, None)
}

fn var(v: Var) -> RationalFn {
    RationalFn::var(v)
}

fn int(n: i64) -> RationalFn {
    RationalFn::int(n)
}

/// The four leading coefficients of `ε₁ε₂ log Z^inst`.
#[derive(Clone, Debug)]
pub struct EpsilonExpansion {
    pub f0: LSeries,
    pub h: LSeries,
    pub a: LSeries,
    pub b: LSeries,
    /// Instanton number through which every component is exact.
    pub max_n: usize,
}

impl EpsilonExpansion {
    /// Assemble the components from the `ε⁰, ε¹, ε²` coefficients of
    /// `ε₁ε₂ log Z` on the slice `(1,−1)` and the skew line `(1,−2)`.
    ///
    /// On `(1,−1)`: `ε² ↦ −A + 2B/3`. On `(1,−2)`: `ε ↦ −H`, `ε² ↦ −2A + 5B/3`.
    fn from_lines(slice: &[LSeries; 3], skew: &[LSeries; 3], max_n: usize) -> Result<Self> {
        if let Some(e) = slice[0].first_difference(&skew[0]) {
            return Err(CoreError::Convention(format!("ε⁰ parts of the two lines differ at Λ-unit {}", e)));
        }
        if let Some(e) = slice[1].val() {
            return Err(CoreError::Convention(format!("linear ε-term on the slice ε₂ = −ε₁ at Λ-unit {}", e)));
        }
        let third = Scalar::from_frac(1, 3);
        let b = skew[2].sub(&slice[2].scale(&Scalar::from_int(2))).scale(&Scalar::from_int(3));
        let a = b.scale(&Scalar::from_frac(2, 1)).scale(&third).sub(&slice[2]);
        Ok(EpsilonExpansion { f0: slice[0].clone(), h: skew[1].neg(), a, b, max_n })
    }

    /// The predicted `ε⁰, ε¹, ε²` coefficients of `ε₁ε₂ log Z` on the line
    /// `(w₁, w₂)`.
    pub fn predict(&self, w: (i64, i64)) -> [LSeries; 3] {
        let (w1, w2) = w;
        let e2 = self.a.scale(&Scalar::from_int(w1 * w2)).add(&self.b.scale(&Scalar::from_frac(w1 * w1 + w2 * w2, 3)));
        [self.f0.clone(), self.h.scale(&Scalar::from_int(w1 + w2)), e2]
    }

    /// Compare the prediction with the coefficients actually found on a
    /// line; the first mismatch is reported.
    pub fn check_line(&self, w: (i64, i64), found: &[LSeries; 3]) -> Result<()> {
        for (j, (p, f)) in self.predict(w).iter().zip(found).enumerate() {
            if let Some(e) = p.first_difference(f) {
                return Err(CoreError::identity(
                    "reconstruction",
                    format!("line {:?}, ε^{} coefficient differs at Λ^{}", w, j, Rational(e)),
                ));
            }
        }
        Ok(())
    }
}

struct Rational(i64);

impl std::fmt::Display for Rational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let r = num_rational::Rational64::new(self.0, LU);
        write!(f, "{}", r)
    }
}

/// `ε⁰, ε¹, ε²` coefficients of `ε₁ε₂ log Z^inst` on a line, from the
/// ε-series of `log Z^inst`.
pub fn line_coefficients(gauge: GaugeParams, w: (i64, i64), max_n: usize) -> Result<[LSeries; 3]> {
    let fp = FixedPointParams::slice(gauge, int(w.0), int(w.1));
    let log = log_zinst_eps(&fp, max_n, 1)?;
    let scale = Scalar::from_int(w.0 * w.1);
    let prec = log.prec();
    let mut out: [LSeries; 3] = std::array::from_fn(|_| GradedSeries::new("L", lambda_unit(), prec));
    for (e, c) in log.terms() {
        if let Some(v) = c.val() {
            if v < -2 {
                return Err(CoreError::Convention(format!("ε₁ε₂ log Z has a pole at Λ-unit {}", e)));
            }
        }
        for (j, slot) in out.iter_mut().enumerate() {
            slot.add_term(*e, c.coeff(j as i64 - 2)?.scale(&scale));
        }
    }
    Ok(out)
}

/// Fast path: compute the expansion from two ε-lines through instanton
/// number `max_n` and check the reconstruction on a third line through
/// `check_n`.
pub fn expansion(gauge: GaugeParams, max_n: usize, check_n: usize) -> Result<EpsilonExpansion> {
    let lines: Vec<[LSeries; 3]> = [SLICE_LINE, SKEW_LINE].par_iter().map(|w| line_coefficients(gauge, *w, max_n)).collect::<Result<_>>()?;
    let e = EpsilonExpansion::from_lines(&lines[0], &lines[1], max_n)?;
    if check_n > 0 {
        let found = line_coefficients(gauge, CHECK_LINE, check_n.min(max_n))?;
        e.check_line(CHECK_LINE, &found)?;
    }
    Ok(e)
}

/// Expand a partition function given with exact coefficients rational in
/// `(ε₁, ε₂, a, m)`. The constant term must be 1.
pub fn expand_log(z: &LamSeries<RationalFn>, max_n: usize) -> Result<EpsilonExpansion> {
    if z.coeff_or_zero(0) != RationalFn::one() {
        return Err(CoreError::Algebra("partition function must start with 1".into()));
    }
    let log = z.log()?;
    let e12 = var(Var::E1).mul(&var(Var::E2));
    let on_line = |w: (i64, i64)| -> Result<[LSeries; 3]> {
        let eps = var(Var::Eps);
        let mut out: [LSeries; 3] = std::array::from_fn(|_| GradedSeries::new("L", lambda_unit(), log.prec()));
        for (e, c) in log.terms() {
            let f = c.mul(&e12).subst_rational(Var::E1, &eps.scale(&Scalar::from_int(w.0)))?.subst_rational(Var::E2, &eps.scale(&Scalar::from_int(w.1)))?;
            let s = laurent(&f, Var::Eps, 3)?;
            if let Some(v) = s.val() {
                if v < 0 {
                    return Err(CoreError::Convention(format!("ε₁ε₂ log Z has an ε-pole at Λ-unit {}", e)));
                }
            }
            for (j, slot) in out.iter_mut().enumerate() {
                slot.add_term(*e, s.coeff(j as i64)?);
            }
        }
        Ok(out)
    };
    let slice = on_line(SLICE_LINE)?;
    let skew = on_line(SKEW_LINE)?;
    let e = EpsilonExpansion::from_lines(&slice, &skew, max_n)?;
    e.check_line(CHECK_LINE, &on_line(CHECK_LINE)?)?;
    Ok(e)
}

/// Variables a prepotential coefficient can be differentiated by.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DVar {
    A,
    M,
    LogLambda,
}

/// Exact formal derivative of a Λ-series.
pub fn deriv(s: &LSeries, v: DVar) -> LSeries {
    match v {
        DVar::A => s.map_coeffs(|c| c.deriv(Var::A)),
        DVar::M => s.map_coeffs(|c| c.deriv(Var::M)),
        DVar::LogLambda => s.log_deriv(),
    }
}

/// Iterated derivative, applied left to right.
pub fn derivs(s: &LSeries, vs: &[DVar]) -> LSeries {
    vs.iter().fold(s.clone(), |acc, v| deriv(&acc, *v))
}

/// `u = a² − (1/γ)·∂F₀^inst/∂logΛ`.
pub fn u_series(e: &EpsilonExpansion, gauge: GaugeParams) -> LSeries {
    let a2 = var(Var::A).mul(&var(Var::A));
    deriv(&e.f0, DVar::LogLambda).scale(&Scalar::from_frac(-1, gauge.gamma())).add(&cst(a2))
}

/// `u` as the `ε → 0` limit of the normalized `ch₂` insertion
/// `Σ Λ^{γn}Z_n·(a² − nε₁ε₂) / Z^inst` on the slice.
pub fn u_from_insertion(gauge: GaugeParams, max_n: usize) -> Result<LSeries> {
    let fp = FixedPointParams::slice(gauge, int(SLICE_LINE.0), int(SLICE_LINE.1));
    let sched = log_safe_schedule(max_n, 1);
    let z = zinst_eps(&fp, max_n, &sched, 0)?;
    let zw = zinst_eps(&fp, max_n, &sched, 1)?;
    let ratio = zw.div(&z)?;
    ratio.try_map_coeffs(|e, c| {
        if let Some(v) = c.val() {
            if v < 0 {
                return Err(CoreError::Convention(format!("ch₂ insertion ratio has an ε-pole at Λ-unit {}", e)));
            }
        }
        c.coeff(0)
    })
}

/// Substitute `m := a` in every coefficient.
pub fn specialize_am(s: &LSeries) -> Result<LSeries> {
    let a = MultiPoly::var(Var::A);
    s.try_map_coeffs(|e, c| {
        c.subst(Var::M, &a).map_err(|err| CoreError::Algebra(format!("specializing m = a at Λ-unit {}: {}", e, err)))
    })
}

/// `u` with its first derivatives, and the derived `π/ω` and contact term
/// `T = (u − (∂u/∂a)²/4)/3`, all at generic `(a, m)`.
#[derive(Clone, Debug)]
pub struct CurveSeed {
    pub u: LSeries,
    pub du_da: LSeries,
    pub du_dm: LSeries,
    /// `π/ω = (√−1/2)·∂u/∂a`, the branch with perturbative part `√−1·a`.
    pub pi_over_omega: LSeries,
    pub t: LSeries,
}

impl CurveSeed {
    pub fn new(e: &EpsilonExpansion, gauge: GaugeParams) -> Self {
        let u = u_series(e, gauge);
        let du_da = deriv(&u, DVar::A);
        let du_dm = deriv(&u, DVar::M);
        let pi_over_omega = du_da.scale(&(&Scalar::i() * &Scalar::from_frac(1, 2)));
        let t = u.sub(&du_da.mul(&du_da).scale(&Scalar::from_frac(1, 4))).scale(&Scalar::from_frac(1, 3));
        CurveSeed { u, du_da, du_dm, pi_over_omega, t }
    }

    pub fn specialize_am(&self) -> Result<Self> {
        Ok(CurveSeed {
            u: specialize_am(&self.u)?,
            du_da: specialize_am(&self.du_da)?,
            du_dm: specialize_am(&self.du_dm)?,
            pi_over_omega: specialize_am(&self.pi_over_omega)?,
            t: specialize_am(&self.t)?,
        })
    }
}

/// `exp(−∂²F₀^inst/∂a²)` at `m = a` via the vanishing of `q`: with
/// `q² = ((m+a)(m−a)/Λ²)(2a/Λ)^{−8}·exp(−∂²F₀^inst/∂a²)` one has
/// `q_inst²|_{m=a} = −Λ·∂_a(q²)|_{m=a}·(2a/Λ)⁷`.
pub fn qinst_squared_am(e: &EpsilonExpansion) -> Result<LSeries> {
    let qi2 = derivs(&e.f0, &[DVar::A, DVar::A]).neg().exp()?;
    let (a, m) = (var(Var::A), var(Var::M));
    let two_a = a.scale(&Scalar::from_int(2));
    let pert = m.add(&a).mul(&m.sub(&a)).mul(&two_a.pow(-8)?);
    // Λ^{−2}·Λ^{8} = Λ^6
    let q2 = qi2.mul_coeff(&pert).shift(lam(6));
    let dq2 = specialize_am(&deriv(&q2, DVar::A))?;
    if specialize_am(&q2)?.val().is_some() {
        return Err(CoreError::Convention("q² does not vanish at m = a".into()));
    }
    // −Λ·(2a/Λ)⁷ = −(2a)⁷Λ^{−6}
    Ok(dq2.mul_coeff(&two_a.pow(7)?.neg()).shift(-lam(6)))
}

/// Outcome of one exact series identity.
#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub name: &'static str,
    /// Λ-exponent (in Λ units) below which both sides were compared.
    pub compared_below: Option<i64>,
    /// First Λ-exponent (in Λ units) where the sides differ.
    pub first_difference: Option<i64>,
}

impl IdentityCheck {
    pub fn compare(name: &'static str, lhs: &LSeries, rhs: &LSeries) -> Self {
        let below = match (lhs.prec(), rhs.prec()) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        };
        IdentityCheck { name, compared_below: below, first_difference: lhs.first_difference(rhs) }
    }

    pub fn holds(&self) -> bool {
        self.first_difference.is_none()
    }

    /// Highest whole power of Λ covered by the comparison.
    pub fn lambda_order(&self) -> Option<i64> {
        self.compared_below.map(|p| (p - 1).div_euclid(LU))
    }
}

/// The closed forms of the prepotential derivatives at `a = m`, each
/// compared as an exact Λ-series.
pub fn am_identities(e: &EpsilonExpansion, gauge: GaugeParams) -> Result<Vec<IdentityCheck>> {
    use DVar::{LogLambda as L, A, M};
    let seed = CurveSeed::new(e, gauge).specialize_am()?;
    let am = |vs: &[DVar]| specialize_am(&derivs(&e.f0, vs));
    let f_aa = am(&[A, A])?;
    let f_am = am(&[A, M])?;
    let f_mm = am(&[M, M])?;
    let f_ll = am(&[L, L])?;
    let f_al = am(&[A, L])?;
    let f_ml = am(&[M, L])?;
    let a = var(Var::A);
    let i = RationalFn::from_scalar(Scalar::i());
    let two_a = a.scale(&Scalar::from_int(2));

    let t = &seed.t;
    let t_inv = t.inv()?;
    let l3_over_t = t_inv.shift(lam(3));
    // 2π/ω = √−1·∂u/∂a and 2π√−1/ω = −∂u/∂a
    let two_pi_om = seed.du_da.mul_coeff(&i);
    let two_pi_i_om = seed.du_da.neg();
    let p = seed.pi_over_omega.mul(&seed.pi_over_omega);
    let u = &seed.u;
    let half = Scalar::from_frac(1, 2);
    // π√−1/ω + Λ³/(2T) = (2π√−1/ω + Λ³T^{−1})/2
    let combo = two_pi_i_om.add(&l3_over_t);
    let combo_half = combo.scale(&half);

    let mut out = Vec::new();
    let up = u.add(&p);
    out.push(IdentityCheck::compare(
        "cubic relation (u+P)^2 (u-2P) = 27/4 L^6",
        &up.mul(&up).mul(&u.sub(&p.scale(&Scalar::from_int(2)))),
        &lambda_pow(6).scale(&Scalar::from_frac(27, 4)),
    ));
    out.push(IdentityCheck::compare("quadratic relation (u+P)(u-P) = 3a L^3", &up.mul(&u.sub(&p)), &lambda_pow(3).mul_coeff(&a.scale(&Scalar::from_int(3)))));
    let t_lead = t.clone().with_prec(Some(lam(6)));
    out.push(IdentityCheck::compare("contact term T = L^3/(2a) + O(L^6)", &t_lead, &lambda_pow(3).mul_coeff(&two_a.inv()?)));
    out.push(IdentityCheck::compare("d2F0/dlogL^2 = -9T", &f_ll, &t.scale(&Scalar::from_int(-9))));
    out.push(IdentityCheck::compare("du/da + du/dm = L^3/T", &seed.du_da.add(&seed.du_dm), &l3_over_t));
    let xi2 = f_mm.add(&f_am.scale(&Scalar::from_int(2))).add(&f_aa).scale(&Scalar::from_frac(-1, 4)).exp()?;
    out.push(IdentityCheck::compare("exp[-(F_mm+2F_am+F_aa)/4] = (2a/L^3) T", &xi2, &t.mul_coeff(&two_a).shift(-lam(3))));
    let lhs12 = f_am.add(&f_aa).scale(&-half.clone()).exp()?;
    // (1/4)(2a/Λ)³ = 2a³Λ^{−3}
    let rhs12 = t_inv.mul(&combo).mul(&combo).mul_coeff(&a.pow(3)?.scale(&Scalar::from_int(2))).shift(-lam(3));
    out.push(IdentityCheck::compare("exp[-(F_am+F_aa)/2] closed form", &lhs12, &rhs12));
    let lhs13 = f_mm.add(&f_am).scale(&-half.clone()).exp()?;
    let rhs13 = t.pow(3)?.mul(&combo.pow(-2)?).mul_coeff(&a.inv()?.scale(&Scalar::from_int(2))).shift(-lam(3));
    out.push(IdentityCheck::compare("exp[-(F_mm+F_am)/2] closed form", &lhs13, &rhs13));
    let lhs_q = f_aa.neg().exp()?;
    // Λ√−1(2π/ω)^{−5}(2a/Λ)⁷T²
    let rhs_q = two_pi_om.pow(-5)?.mul(&t.mul(t)).mul_coeff(&i.mul(&two_a.pow(7)?)).shift(lam(1 - 7));
    out.push(IdentityCheck::compare("exp(-F_aa) = L i (2pi/om)^-5 (2a/L)^7 T^2", &lhs_q, &rhs_q));
    out.push(IdentityCheck::compare("qinst via derivative of q^2", &qinst_squared_am(e)?, &rhs_q));
    let lhs_am = f_am.neg().exp()?;
    // (1/(√−1Λ))T^{−4}(2a/Λ)^{−1}(2π/ω)⁵(π√−1/ω + Λ³/2T)⁴
    let rhs_am = t_inv.pow(4)?.mul(&two_pi_om.pow(5)?).mul(&combo_half.pow(4)?).mul_coeff(&i.inv()?.mul(&two_a.inv()?));
    out.push(IdentityCheck::compare("exp(-F_am) closed form", &lhs_am, &rhs_am));
    let lhs_mm = f_mm.neg().exp()?;
    // (√−1/Λ⁷)T¹⁰(2a/Λ)^{−1}(2π/ω)^{−5}(π√−1/ω + Λ³/2T)^{−8}
    let rhs_mm = t.pow(10)?.mul(&two_pi_om.pow(-5)?).mul(&combo_half.pow(-8)?).mul_coeff(&i.mul(&two_a.inv()?)).shift(lam(-7 + 1));
    out.push(IdentityCheck::compare("exp(-F_mm) closed form", &lhs_mm, &rhs_mm));
    out.push(IdentityCheck::compare(
        "F_aL + F_mL = 6a - 3L^3/T",
        &f_al.add(&f_ml),
        &cst(a.scale(&Scalar::from_int(6))).sub(&l3_over_t.scale(&Scalar::from_int(3))),
    ));
    out.push(IdentityCheck::compare("F_mL = -3(L^3/T + 2pi i/om)", &f_ml, &l3_over_t.add(&two_pi_i_om).scale(&Scalar::from_int(-3))));
    let exp_a = specialize_am(&e.a)?.exp()?;
    let ain = seed.du_da.mul_coeff(&two_a.inv()?).sqrt(&RationalFn::one())?;
    out.push(IdentityCheck::compare("exp A = (u_a/2a)^(1/2)", &exp_a, &ain));
    let exp_8b = specialize_am(&e.b)?.scale(&Scalar::from_int(8)).exp()?;
    // √−1Λ^{−11}(2π/ω)⁷(2a/Λ)^{−5}T²
    let rhs_b = two_pi_om.pow(7)?.mul(&t.mul(t)).mul_coeff(&i.mul(&two_a.pow(-5)?)).shift(lam(-11 + 5));
    out.push(IdentityCheck::compare("exp 8B = i L^-11 (2pi/om)^7 (2a/L)^-5 T^2", &exp_8b, &rhs_b));
    Ok(out)
}
