//! Equivariant localization on `P²` of the instanton partition function
//! with flux-shifted Coulomb and mass parameters, compared with its closed
//! form in terms of derivatives of the prepotential.
//!
//! The torus acts on `P²` through the line `(ε₁, ε₂) = (w₁, w₂)ε` of a
//! two-torus, with fixed points of tangent weights `(ε₁, ε₂)`,
//! `(−ε₁, ε₂−ε₁)` and `(−ε₂, ε₁−ε₂)`. The hyperplane class restricts to
//! `h = (0, ε₁, ε₂)` (up to a global character) and the point class to
//! the product of tangent weights at one chosen fixed point. With
//! `ξ₂ − ξ₁ = eH` and `ξ − K = fH`, the fixed point `p` contributes
//! `log Z^inst(ε₁(p), ε₂(p); a = s + e h_p/2, m = s + f h_p/2)` with
//! `Λ³ ↦ Λ⁴ s⁻¹ exp(z h_p + x q_p)`. The ε⁰ part of the sum equals
//!
//! ```text
//! F_L x/3 + F_aa e²/8 + F_am ef/4 + F_mm f²/8 + F_aL ez/6 + F_mL fz/6
//!   + F_LL z²/18 + 3A + B
//! ```
//!
//! at `a = m = s`, `Λ³ ↦ Λ⁴/s`, where `F = F₀^inst`, `L = log Λ`, and the
//! poles in ε cancel. Both sides are compared as series in `Λ⁴`.

use crate::error::{CoreError, Result};
use crate::exactalg::{int_unit, GradedSeries, MultiPoly, RationalFn, Scalar, Var, LU};
use crate::nekrasov::{log_zinst_eps, EpsLin, EpsSeries, FixedPointParams, GaugeParams};
use crate::prepotential::{deriv, derivs, expansion, DVar, EpsilonExpansion, LSeries};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BridgeParams {
    /// Direction of the one-parameter subtorus.
    pub line: (i64, i64),
    /// `ξ₂ − ξ₁ = eH`.
    pub e: i64,
    /// `ξ − K = fH`.
    pub f: i64,
    /// Highest power of `Λ⁴` compared.
    pub max_n: usize,
    /// Global character added to the lift of `H`, in units of ε.
    pub lift_shift: i64,
    /// Fixed point carrying the lift of the point class.
    pub point_at: usize,
}

impl BridgeParams {
    /// `e` and `f` from the degrees of `ξ` and `ξ₁` (multiples of `H`).
    pub fn from_degrees(xi: i64, xi1: i64, max_n: usize) -> Self {
        BridgeParams { line: (2, 5), e: xi - 2 * xi1, f: xi + 3, max_n, lift_shift: 0, point_at: 0 }
    }
}

/// Tangent weights (in units of ε) and the lift of `H` at one fixed point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FixedPoint {
    pub w: (i64, i64),
    pub h: i64,
    /// Lift of the point class divided by `ε²`.
    pub q: i64,
}

pub fn fixed_points(p: &BridgeParams) -> Result<[FixedPoint; 3]> {
    let (a, b) = p.line;
    if a == 0 || b == 0 || a == b {
        return Err(CoreError::Input(format!("the line {:?} has a vanishing tangent weight on P²", p.line)));
    }
    if p.point_at > 2 {
        return Err(CoreError::Input(format!("P² has three fixed points, got index {}", p.point_at)));
    }
    let ws = [(a, b), (-a, b - a), (-b, a - b)];
    let hs = [0, a, b];
    Ok(std::array::from_fn(|i| FixedPoint {
        w: ws[i],
        h: hs[i] + p.lift_shift,
        q: if i == p.point_at { ws[i].0 * ws[i].1 } else { 0 },
    }))
}

/// `Σ_p h_p^k / (w_p w'_p)` for `k = 0, 1, 2` and `Σ q_p/(w_p w'_p)`:
/// the integrals of `1, H, H²` and of the point class.
pub fn localization_moments(pts: &[FixedPoint; 3]) -> [Scalar; 4] {
    let mut out: [Scalar; 4] = std::array::from_fn(|_| Scalar::zero());
    for p in pts {
        let inv = Scalar::from_frac(1, p.w.0 * p.w.1);
        for (k, slot) in out.iter_mut().take(3).enumerate() {
            *slot = &*slot + &(&inv * &Scalar::from_int(p.h.pow(k as u32)));
        }
        out[3] = &out[3] + &(&inv * &Scalar::from_int(p.q));
    }
    out
}

fn rf(v: Var) -> RationalFn {
    RationalFn::var(v)
}

fn s_pow(n: i64) -> Result<RationalFn> {
    rf(Var::S).pow(n)
}

/// `exp(n(z h ε + x q ε²))` through `ε²`.
fn flux_factor(n: i64, pt: &FixedPoint) -> EpsSeries {
    let a = rf(Var::Z).scale(&Scalar::from_int(n * pt.h));
    let b = rf(Var::X).scale(&Scalar::from_int(n * pt.q));
    let two = a.mul(&a).scale(&Scalar::from_frac(1, 2)).add(&b);
    GradedSeries::from_terms(Var::Eps.name(), int_unit(), [(0, RationalFn::one()), (1, a), (2, two)], Some(3))
}

/// The localization sum, as the `Λ⁴ⁿ` coefficients `n = 1..=max_n`, each an
/// ε-series through `ε⁰`.
pub fn localization_side(p: &BridgeParams) -> Result<Vec<EpsSeries>> {
    let gauge = GaugeParams::new(1)?;
    let pts = fixed_points(p)?;
    let per_point: Vec<Vec<EpsSeries>> = pts
        .par_iter()
        .map(|pt| {
            let half = Scalar::from_frac(1, 2);
            let fp = FixedPointParams {
                e1: EpsLin::new(RationalFn::zero(), RationalFn::int(pt.w.0)),
                e2: EpsLin::new(RationalFn::zero(), RationalFn::int(pt.w.1)),
                a: EpsLin::new(rf(Var::S), RationalFn::int(p.e * pt.h).scale(&half)),
                m: EpsLin::new(rf(Var::S), RationalFn::int(p.f * pt.h).scale(&half)),
                gauge,
            };
            let l = log_zinst_eps(&fp, p.max_n, 1)?;
            (1..=p.max_n as i64)
                .map(|n| {
                    let ln = l.coeff(3 * LU * n)?;
                    let sn = s_pow(-n)?;
                    Ok(ln.mul(&flux_factor(n, pt)).map_coeffs(|c| c.mul(&sn)))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut out = per_point[0].clone();
    for other in &per_point[1..] {
        for (acc, x) in out.iter_mut().zip(other) {
            *acc = acc.add(x);
        }
    }
    Ok(out)
}

/// The closed form, as the `Λ⁴ⁿ` coefficients `n = 1..=max_n`.
pub fn closed_form_side(e: &EpsilonExpansion, p: &BridgeParams) -> Result<Vec<RationalFn>> {
    use DVar::{LogLambda as L, A, M};
    let f = &e.f0;
    let q = |n: i64, d: i64| Scalar::from_frac(n, d);
    let (ee, ff) = (p.e, p.f);
    let x = rf(Var::X);
    let z = rf(Var::Z);
    let terms: [(LSeries, RationalFn); 7] = [
        (deriv(f, L), x.scale(&q(1, 3))),
        (derivs(f, &[A, A]), RationalFn::int(ee * ee).scale(&q(1, 8))),
        (derivs(f, &[A, M]), RationalFn::int(ee * ff).scale(&q(1, 4))),
        (derivs(f, &[M, M]), RationalFn::int(ff * ff).scale(&q(1, 8))),
        (derivs(f, &[A, L]), z.scale(&q(ee, 6))),
        (derivs(f, &[M, L]), z.scale(&q(ff, 6))),
        (derivs(f, &[L, L]), z.mul(&z).scale(&q(1, 18))),
    ];
    let mut total = e.a.scale(&Scalar::from_int(3)).add(&e.b);
    for (s, c) in &terms {
        total = total.add(&s.map_coeffs(|k| k.mul(c)));
    }
    let s = MultiPoly::var(Var::S);
    (1..=p.max_n as i64)
        .map(|n| {
            let c = total.coeff(3 * LU * n)?;
            Ok(c.subst(Var::A, &s)?.subst(Var::M, &s)?.mul(&s_pow(-n)?))
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct BridgeOrder {
    /// Power of `Λ⁴`.
    pub n: usize,
    /// The `ε⁻²` and `ε⁻¹` parts of the localization sum vanish.
    pub poles_cancel: bool,
    pub matches: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BridgeReport {
    pub params: BridgeParams,
    pub fixed_points: Vec<FixedPoint>,
    pub orders: Vec<BridgeOrder>,
}

impl BridgeReport {
    pub fn holds(&self) -> bool {
        self.orders.iter().all(|o| o.poles_cancel && o.matches)
    }
}

pub fn verify_bridge(p: &BridgeParams) -> Result<BridgeReport> {
    let gauge = GaugeParams::new(1)?;
    let e = expansion(gauge, p.max_n, 0)?;
    verify_bridge_with(&e, p)
}

/// As [`verify_bridge`], reusing a precomputed expansion (through at least
/// `p.max_n` instantons).
pub fn verify_bridge_with(e: &EpsilonExpansion, p: &BridgeParams) -> Result<BridgeReport> {
    if e.max_n < p.max_n {
        return Err(CoreError::Precision(format!("expansion through {} instantons, {} needed", e.max_n, p.max_n)));
    }
    let lhs = localization_side(p)?;
    let rhs = closed_form_side(e, p)?;
    let mut orders = Vec::new();
    for (i, (l, r)) in lhs.iter().zip(&rhs).enumerate() {
        if l.prec().is_none_or(|pr| pr < 1) {
            return Err(CoreError::Precision(format!("ε⁰ part of the Λ^{} term is not known", 4 * (i + 1))));
        }
        let poles_cancel = l.coeff_or_zero(-2).is_zero() && l.coeff_or_zero(-1).is_zero() && l.val().is_none_or(|v| v >= -2);
        let matches = l.coeff_or_zero(0).sub(r).is_zero();
        orders.push(BridgeOrder { n: i + 1, poles_cancel, matches });
    }
    Ok(BridgeReport { params: p.clone(), fixed_points: fixed_points(p)?.to_vec(), orders })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn localization_integrals_of_p2() {
        for line in [(2, 5), (1, 3), (-3, 7)] {
            for shift in [0, 1, -4] {
                for point_at in 0..3 {
                    let p = BridgeParams { line, e: 1, f: 2, max_n: 1, lift_shift: shift, point_at };
                    let m = localization_moments(&fixed_points(&p).unwrap());
                    let want = [0, 0, 1, 1].map(Scalar::from_int);
                    assert_eq!(m, want, "{:?}", p);
                }
            }
        }
    }

    #[test]
    fn degenerate_lines_are_rejected() {
        let mut p = BridgeParams::from_degrees(1, 0, 1);
        p.line = (3, 3);
        assert!(fixed_points(&p).is_err());
    }

    #[test]
    fn bridge_holds_at_first_order() {
        let p = BridgeParams::from_degrees(1, 1, 1);
        let r = verify_bridge(&p).unwrap();
        assert!(r.holds(), "{:?}", r);
    }

    #[test]
    fn bridge_is_lift_independent() {
        let gauge = GaugeParams::new(1).unwrap();
        let e = expansion(gauge, 1, 0).unwrap();
        for (shift, point_at) in [(1, 0), (-2, 1), (3, 2)] {
            let p = BridgeParams { line: (2, 5), e: -1, f: 4, max_n: 1, lift_shift: shift, point_at };
            assert!(verify_bridge_with(&e, &p).unwrap().holds(), "{:?}", p);
        }
    }

    #[test]
    fn wrong_coefficient_is_detected() {
        // Dropping the B-term breaks the match, so the comparison has teeth.
        let gauge = GaugeParams::new(1).unwrap();
        let mut e = expansion(gauge, 1, 0).unwrap();
        let p = BridgeParams::from_degrees(2, 0, 1);
        e.b = e.b.scale(&Scalar::zero());
        assert!(!verify_bridge_with(&e, &p).unwrap().holds());
    }
}
