//! Instanton part of the Nekrasov partition function for U(2) with zero or
//! one fundamental hypermultiplet.
//!
//! Every fixed-point contribution is a ratio of products of linear forms in
//! (ε₁, ε₂, a, m). The parameters are carried as [`EpsLin`] values `c₀ + c₁ε`
//! so the same fixed-point code serves two purposes: exact rational
//! functions (all `c₁ = 0`) and Laurent expansions in ε along a line
//! `ε_i = e_i ε` of the (ε₁, ε₂)-plane, possibly with ε-dependent shifts of
//! `a` and `m` as needed by the blow-up formula.

use crate::exactalg::{int_unit, lambda_unit, GradedSeries, MultiPoly, RationalFn, Ring, Scalar, Var, LU};
use crate::error::{CoreError, Result};
use crate::partitions::{arm_leg, enumerate_pairs, YoungPair};
use rayon::prelude::*;

pub type EpsSeries = GradedSeries<RationalFn>;
pub type LamSeries<C> = GradedSeries<C>;

/// Sign conventions of the fixed-point formula. Kept in one place so that a
/// global flip, if ever needed, touches nothing else.
///
/// With the values below, the box in row `i`, column `j` of `Y_α`
/// contributes the matter weight `a_α + m − (j−1)ε₁ − (i−1)ε₂ − (ε₁+ε₂)/2`.
/// These are the choices for which the untwisted blow-up ratio is
/// `1 + O(t³)` at finite ε and the twisted one starts `−Λt`.
pub mod conventions {
    /// Sign with which the mass enters the matter weight.
    pub const MASS_SIGN: i64 = 1;
    /// Sign of the ε-part `(i'−1)ε₁ + (j'−1)ε₂ + (ε₁+ε₂)/2` of a matter weight,
    /// where `(i', j')` is the box after the optional transpose below.
    pub const MATTER_EPS_SIGN: i64 = -1;
    /// Pair the column index with ε₁ in matter weights (the direction in
    /// which arms are measured in the tangent weights).
    pub const MATTER_TRANSPOSED: bool = true;
}

/// Gauge data: rank 2, `N_f ∈ {0, 1}`, Coulomb vector `(−a, a)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GaugeParams {
    pub nf: u8,
}

impl GaugeParams {
    pub fn new(nf: u8) -> Result<Self> {
        if nf > 1 {
            return Err(CoreError::Input(format!("N_f = {} not supported", nf)));
        }
        Ok(GaugeParams { nf })
    }

    /// γ = 2r − N_f.
    pub fn gamma(&self) -> i64 {
        4 - self.nf as i64
    }
}

/// A linear quantity `c0 + c1·ε`.
#[derive(Clone, Debug)]
pub struct EpsLin {
    pub c0: RationalFn,
    pub c1: RationalFn,
}

impl EpsLin {
    pub fn exact(c0: RationalFn) -> Self {
        EpsLin { c0, c1: RationalFn::zero() }
    }

    pub fn new(c0: RationalFn, c1: RationalFn) -> Self {
        EpsLin { c0, c1 }
    }

    pub fn zero() -> Self {
        Self::exact(RationalFn::zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        EpsLin { c0: self.c0.add(&o.c0), c1: self.c1.add(&o.c1) }
    }

    pub fn scale(&self, k: &Scalar) -> Self {
        EpsLin { c0: self.c0.scale(k), c1: self.c1.scale(k) }
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.scale(&Scalar::from_int(k))
    }

    pub fn as_series(&self, prec: i64) -> EpsSeries {
        GradedSeries::from_terms(Var::Eps.name(), int_unit(), [(0, self.c0.clone()), (1, self.c1.clone())], Some(prec))
    }
}

/// Parameter point at which fixed-point contributions are evaluated.
#[derive(Clone, Debug)]
pub struct FixedPointParams {
    pub e1: EpsLin,
    pub e2: EpsLin,
    /// `a = a₂`; the first Coulomb parameter is `−a`.
    pub a: EpsLin,
    pub m: EpsLin,
    pub gauge: GaugeParams,
}

impl FixedPointParams {
    /// Fully symbolic parameters (ε₁, ε₂, a, m) = (e1, e2, a, m).
    pub fn symbolic(gauge: GaugeParams) -> Self {
        FixedPointParams {
            e1: EpsLin::exact(RationalFn::var(Var::E1)),
            e2: EpsLin::exact(RationalFn::var(Var::E2)),
            a: EpsLin::exact(RationalFn::var(Var::A)),
            m: EpsLin::exact(RationalFn::var(Var::M)),
            gauge,
        }
    }

    /// The line `ε_i = w_i·ε` with symbolic `a`, `m`; `w_i` may be numbers or
    /// symbols.
    pub fn slice(gauge: GaugeParams, w1: RationalFn, w2: RationalFn) -> Self {
        FixedPointParams {
            e1: EpsLin::new(RationalFn::zero(), w1),
            e2: EpsLin::new(RationalFn::zero(), w2),
            a: EpsLin::exact(RationalFn::var(Var::A)),
            m: EpsLin::exact(RationalFn::var(Var::M)),
            gauge,
        }
    }

    fn coulomb(&self, alpha: usize) -> EpsLin {
        if alpha == 0 {
            self.a.scale_int(-1)
        } else {
            self.a.clone()
        }
    }
}

/// Linear factors of the tangent-space Euler class at a fixed point.
pub fn tangent_factors(p: &YoungPair, fp: &FixedPointParams) -> Vec<EpsLin> {
    let mut out = Vec::with_capacity(4 * p.size());
    for alpha in 0..2 {
        for beta in 0..2 {
            let ya = p.get(alpha);
            let yb = p.get(beta);
            let base = fp.coulomb(beta).add(&fp.coulomb(alpha).scale_int(-1));
            for s in ya.boxes() {
                let (arm, _) = arm_leg(ya, ya, s).unwrap();
                let leg_b = yb.col_len(s.1) as i64 - s.0 as i64;
                out.push(base.add(&fp.e2.scale_int(-leg_b)).add(&fp.e1.scale_int(arm + 1)));
            }
            for t in yb.boxes() {
                let (arm, _) = arm_leg(yb, yb, t).unwrap();
                let leg_a = ya.col_len(t.1) as i64 - t.0 as i64;
                out.push(base.add(&fp.e2.scale_int(leg_a + 1)).add(&fp.e1.scale_int(-arm)));
            }
        }
    }
    out
}

/// Linear factors of the matter Euler class (empty for `N_f = 0`).
pub fn matter_factors(p: &YoungPair, fp: &FixedPointParams) -> Vec<EpsLin> {
    if fp.gauge.nf == 0 {
        return Vec::new();
    }
    let half = Scalar::from_frac(1, 2);
    let shift = fp.e1.add(&fp.e2).scale(&half);
    let m = fp.m.scale_int(conventions::MASS_SIGN);
    let sign = conventions::MATTER_EPS_SIGN;
    let mut out = Vec::with_capacity(p.size());
    for alpha in 0..2 {
        for (i, j) in p.get(alpha).boxes() {
            let (i, j) = if conventions::MATTER_TRANSPOSED { (j, i) } else { (i, j) };
            let eps_part = fp.e1.scale_int(i as i64 - 1).add(&fp.e2.scale_int(j as i64 - 1)).add(&shift);
            out.push(fp.coulomb(alpha).add(&m).add(&eps_part.scale_int(sign)));
        }
    }
    out
}

/// Euler class of the tangent space as an exact rational function.
pub fn tangent_euler(p: &YoungPair, fp: &FixedPointParams) -> RationalFn {
    tangent_factors(p, fp).iter().fold(RationalFn::one(), |acc, f| acc.mul(&f.c0))
}

/// Euler class of the matter bundle as an exact polynomial.
pub fn matter_euler(p: &YoungPair, fp: &FixedPointParams) -> MultiPoly {
    let r = matter_factors(p, fp).iter().fold(RationalFn::one(), |acc, f| acc.mul(&f.c0));
    r.as_poly().cloned().unwrap_or_else(|| r.numer().clone())
}

/// Exact contribution `matter/tangent` of one fixed point.
pub fn fixed_point_term(p: &YoungPair, fp: &FixedPointParams) -> Result<RationalFn> {
    let mut r = RationalFn::one();
    for f in matter_factors(p, fp) {
        r = r.mul(&f.c0);
    }
    for f in tangent_factors(p, fp) {
        if f.c0.is_zero() {
            return Err(CoreError::Algebra(format!("tangent weight vanishes at {:?}", p)));
        }
        r = r.div(&f.c0)?;
    }
    Ok(r)
}

/// Exact `Z_n`, the coefficient of `Λ^{γn}`.
pub fn zinst_coefficient(n: usize, fp: &FixedPointParams) -> Result<RationalFn> {
    let terms: Vec<RationalFn> = enumerate_pairs(n).par_iter().map(|p| fixed_point_term(p, fp)).collect::<Result<_>>()?;
    Ok(terms.iter().fold(RationalFn::zero(), |acc, t| acc.add(t)))
}

/// The instanton partition function as a Λ-series with exact coefficients,
/// truncated at `Λ^{γ(maxN+1)}`.
pub fn zinst(fp: &FixedPointParams, max_n: usize) -> Result<LamSeries<RationalFn>> {
    zinst_ch2_insertion(fp, 0, max_n)
}

/// Same sum with each fixed point weighted by `(a² − nε₁ε₂)^power`.
pub fn zinst_ch2_insertion(fp: &FixedPointParams, power: u32, max_n: usize) -> Result<LamSeries<RationalFn>> {
    let g = fp.gauge.gamma();
    let mut s = GradedSeries::new("L", lambda_unit(), Some(LU * g * (max_n as i64 + 1)));
    for n in 0..=max_n {
        let pairs = enumerate_pairs(n);
        let w = fp.a.c0.mul(&fp.a.c0).sub(&fp.e1.c0.mul(&fp.e2.c0).scale(&Scalar::from_int(n as i64))).pow(power as i64)?;
        let terms: Vec<RationalFn> = pairs.par_iter().map(|p| fixed_point_term(p, fp)).collect::<Result<_>>()?;
        let zn = terms.iter().fold(RationalFn::zero(), |acc, t| acc.add(t)).mul(&w);
        s.add_term(LU * g * n as i64, zn);
    }
    Ok(s)
}

/// Laurent expansion in ε of one fixed-point term, known below `ε^prec`.
pub fn fixed_point_series(p: &YoungPair, fp: &FixedPointParams, prec: i64) -> Result<EpsSeries> {
    let tangent = tangent_factors(p, fp);
    let zeros = tangent.iter().filter(|f| f.c0.is_zero()).count() as i64;
    let rel = prec + zeros;
    let mut s = GradedSeries::constant(Var::Eps.name(), int_unit(), RationalFn::one(), Some(rel.max(0)));
    if rel <= 0 {
        return Ok(GradedSeries::new(Var::Eps.name(), int_unit(), Some(prec)));
    }
    let mut pure = RationalFn::one();
    for f in &tangent {
        if f.c0.is_zero() {
            if f.c1.is_zero() {
                return Err(CoreError::Algebra(format!("tangent weight vanishes identically at {:?}", p)));
            }
            pure = pure.div(&f.c1)?;
        } else {
            // 1/(c0 + c1 ε) = (1/c0) Σ (−c1/c0)^k ε^k
            let inv0 = f.c0.inv()?;
            let ratio = f.c1.mul(&inv0).neg();
            let mut terms = Vec::with_capacity(rel as usize);
            let mut cur = inv0;
            for k in 0..rel {
                terms.push((k, cur.clone()));
                if ratio.is_zero() {
                    break;
                }
                cur = cur.mul(&ratio);
            }
            s = s.mul(&GradedSeries::from_terms(Var::Eps.name(), int_unit(), terms, Some(rel)));
        }
    }
    for f in matter_factors(p, fp) {
        s = s.mul(&f.as_series(rel));
    }
    Ok(s.mul_coeff(&pure).shift(-zeros))
}

/// Coefficient `Z_n` as a Laurent series in ε, known below `ε^prec`.
pub fn zinst_coefficient_series(n: usize, fp: &FixedPointParams, prec: i64, weight_power: u32) -> Result<EpsSeries> {
    let pairs = enumerate_pairs(n);
    let parts: Vec<EpsSeries> = pairs
        .par_iter()
        .map(|p| {
            let mut t = fixed_point_series(p, fp, prec)?;
            if weight_power > 0 {
                // (a² − n ε₁ε₂)^power as an exact ε-polynomial
                let a = fp.a.as_series(prec + 10);
                let e12 = fp.e1.as_series(prec + 10).mul(&fp.e2.as_series(prec + 10));
                let w = a.mul(&a).sub(&e12.scale(&Scalar::from_int(n as i64)));
                for _ in 0..weight_power {
                    t = t.mul(&w);
                }
            }
            Ok(t.with_prec(Some(prec)))
        })
        .collect::<Result<_>>()?;
    let mut acc = GradedSeries::new(Var::Eps.name(), int_unit(), Some(prec));
    for t in parts {
        acc = acc.add(&t);
    }
    Ok(acc)
}

/// `Z^inst` as a Λ-series of ε-Laurent series. The coefficient of `Λ^{γn}`
/// is known below `ε^{eps_prec(n)}`.
pub fn zinst_eps(fp: &FixedPointParams, max_n: usize, eps_prec: impl Fn(usize) -> i64, weight_power: u32) -> Result<LamSeries<EpsSeries>> {
    let g = fp.gauge.gamma();
    let mut s = GradedSeries::new("L", lambda_unit(), Some(LU * g * (max_n as i64 + 1)));
    for n in 0..=max_n {
        let zn = zinst_coefficient_series(n, fp, eps_prec(n), weight_power)?;
        s.add_term(LU * g * n as i64, zn);
    }
    Ok(s)
}

/// Precision schedule so that `log Z` (whose coefficients have poles of
/// order at most two) is correct below `ε^target` through instanton number
/// `max_n`: `Z_n` has a pole of order `2n` and must be known below
/// `ε^{target + 2(max_n − n)}`.
pub fn log_safe_schedule(max_n: usize, target: i64) -> impl Fn(usize) -> i64 {
    move |n| target + 2 * (max_n as i64 - n as i64)
}

/// `log Z^inst` on an ε-line, asserting that its coefficients have poles of
/// order at most two in ε.
pub fn log_zinst_eps(fp: &FixedPointParams, max_n: usize, target: i64) -> Result<LamSeries<EpsSeries>> {
    let z = zinst_eps(fp, max_n, log_safe_schedule(max_n, target), 0)?;
    let l = log_of_eps_series(&z)?;
    for (e, c) in l.terms() {
        if let Some(v) = c.val() {
            if v < -2 {
                return Err(CoreError::Convention(format!("log Z has an ε-pole of order {} at Λ-exponent {}", -v, e)));
            }
        }
    }
    Ok(l)
}

/// Logarithm of a Λ-series with ε-series coefficients and constant term 1.
pub fn log_of_eps_series(z: &LamSeries<EpsSeries>) -> Result<LamSeries<EpsSeries>> {
    // Give the generic constant the ε metadata of the other coefficients.
    let c0 = z.coeff_or_zero(0);
    if !c0.is_one() {
        return Err(CoreError::Algebra("Z^inst must start with 1".into()));
    }
    z.log()
}

/// Replace `ε` in every coefficient by an explicit value (helper for
/// cross-checks against exact rational functions).
pub fn eps_series_at(s: &EpsSeries, eps: &Scalar) -> Result<RationalFn> {
    let mut acc = RationalFn::zero();
    for (e, c) in s.terms() {
        acc = acc.add(&c.scale(&eps.pow(*e).ok_or_else(|| CoreError::Algebra("ε = 0".into()))?));
    }
    Ok(acc)
}

/// Result of comparing `Z^inst` with its image under a substitution.
#[derive(Clone, Debug)]
pub struct SymmetryCheck {
    pub name: &'static str,
    /// Λ-exponent (in Λ units) below which coefficients were compared.
    pub compared_below: Option<i64>,
    pub first_difference: Option<i64>,
}

impl SymmetryCheck {
    pub fn holds(&self) -> bool {
        self.first_difference.is_none()
    }
}

/// Invariance of an exact `Z^inst` under `ε₁ ↔ ε₂` and under `a ↦ −a`.
pub fn symmetry_checks(z: &LamSeries<RationalFn>) -> Result<Vec<SymmetryCheck>> {
    let p = MultiPoly::var;
    let cases: [(&'static str, Vec<(Var, MultiPoly)>); 2] = [
        ("epsilon exchange e1 <-> e2", vec![(Var::E1, p(Var::E2)), (Var::E2, p(Var::E1))]),
        ("reflection a -> -a", vec![(Var::A, p(Var::A).neg())]),
    ];
    let mut out = Vec::new();
    for (name, subs) in cases {
        let image = z.try_map_coeffs(|_, c| c.subst_many(&subs))?;
        out.push(SymmetryCheck { name, compared_below: z.prec(), first_difference: z.first_difference(&image) });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::YoungDiagram;

    fn gp() -> GaugeParams {
        GaugeParams::new(1).unwrap()
    }

    fn v(x: Var) -> RationalFn {
        RationalFn::var(x)
    }

    fn one_box_first() -> YoungPair {
        YoungPair(YoungDiagram::new(vec![1]).unwrap(), YoungDiagram::empty())
    }

    #[test]
    fn symmetries_through_three_instantons() {
        let z = zinst(&FixedPointParams::symbolic(gp()), 3).unwrap();
        for c in symmetry_checks(&z).unwrap() {
            assert!(c.holds(), "{:?}", c);
            assert!(c.compared_below.unwrap() > 9 * LU);
        }
    }

    #[test]
    fn asymmetric_series_is_caught() {
        // e1/e2 and a + m are each moved by exactly one of the substitutions.
        let mut z = GradedSeries::new("L", lambda_unit(), Some(LU * 4));
        z.add_term(LU * 3, v(Var::E1).div(&v(Var::E2)).unwrap().add(&v(Var::A).mul(&v(Var::M))));
        let checks = symmetry_checks(&z).unwrap();
        assert!(checks.iter().all(|c| c.first_difference == Some(LU * 3)), "{:?}", checks);
    }

    #[test]
    fn empty_pair_is_trivial() {
        let fp = FixedPointParams::symbolic(gp());
        let p = YoungPair(YoungDiagram::empty(), YoungDiagram::empty());
        assert_eq!(tangent_euler(&p, &fp), RationalFn::one());
        assert_eq!(matter_euler(&p, &fp), MultiPoly::one());
        let fp0 = FixedPointParams::symbolic(GaugeParams::new(0).unwrap());
        assert_eq!(matter_euler(&one_box_first(), &fp0), MultiPoly::one());
    }

    #[test]
    fn single_box_by_hand() {
        // ([1], ∅) with a⃗ = (−a, a): α=β=1 gives ε₁·ε₂; (α,β) = (1,2)
        // gives 2a + ε₁ (from Y₁) ... hand-expanded below.
        let fp = FixedPointParams::symbolic(gp());
        let (a, e1, e2, m) = (v(Var::A), v(Var::E1), v(Var::E2), v(Var::M));
        let two_a = a.scale(&Scalar::from_int(2));
        // (1,1): box in Y1: a−a − 0·e2 + 1·e1 = e1; box in Y1 as t: (0+1)e2 − 0 = e2
        // (1,2): base a_2 − a_1 = 2a; box s in Y1 with leg_{Y2}(s) = 0 − 1 = −1: 2a + e2 + e1
        // (2,1): base −2a; box t in Y1 with leg_{Y2}(t) = −1: −2a + 0·e2 − 0 = −2a
        let expect = e1.mul(&e2).mul(&two_a.add(&e1).add(&e2)).mul(&two_a.neg());
        assert_eq!(tangent_euler(&one_box_first(), &fp), expect);
        let half = Scalar::from_frac(1, 2);
        let mexp = a.neg().add(&m).sub(&e1.add(&e2).scale(&half));
        assert_eq!(RationalFn::from_poly(matter_euler(&one_box_first(), &fp)), mexp);
    }

    #[test]
    fn one_instanton_two_term_sum() {
        let fp = FixedPointParams::symbolic(gp());
        let z1 = zinst_coefficient(1, &fp).unwrap();
        let (a, e1, e2, m) = (v(Var::A), v(Var::E1), v(Var::E2), v(Var::M));
        let two_a = a.scale(&Scalar::from_int(2));
        let s = e1.add(&e2);
        let half = Scalar::from_frac(1, 2);
        let t1 = a.neg().add(&m).sub(&s.scale(&half)).div(&e1.mul(&e2).mul(&two_a.add(&s)).mul(&two_a.neg())).unwrap();
        let t2 = a.add(&m).sub(&s.scale(&half)).div(&e1.mul(&e2).mul(&two_a.neg().add(&s)).mul(&two_a)).unwrap();
        assert_eq!(z1, t1.add(&t2));
    }

    #[test]
    fn pure_gauge_one_instanton_on_antidiagonal() {
        // N_f = 0 on the line ε₂ = −ε₁, compared with a hand evaluation
        let g0 = GaugeParams::new(0).unwrap();
        let z1 = zinst_coefficient(1, &FixedPointParams::symbolic(g0)).unwrap();
        let on_slice = z1.subst(Var::E2, &MultiPoly::var(Var::E1).neg()).unwrap();
        // by hand: each of the two terms is 1/((−ε₁²)(−4a²)), so Z₁ = 1/(2a²ε₁²)
        let (a, e1) = (v(Var::A), v(Var::E1));
        let expect = RationalFn::one().div(&a.mul(&a).mul(&e1).mul(&e1).scale(&Scalar::from_int(2))).unwrap();
        assert_eq!(on_slice, expect);
    }

    #[test]
    fn series_matches_exact_on_a_line() {
        let fp = FixedPointParams::slice(gp(), RationalFn::int(1), RationalFn::int(-2));
        let s = zinst_coefficient_series(2, &fp, 3, 0).unwrap();
        assert_eq!(s.val(), Some(-4));
        // compare with the exact function at ε = 1/7 truncated: use the exact
        // rational function on the same line and its own expansion
        let exact = zinst_coefficient(2, &FixedPointParams::symbolic(gp())).unwrap();
        let eps = RationalFn::var(Var::Eps);
        let on_line = exact
            .subst_rational(Var::E1, &eps)
            .unwrap()
            .subst_rational(Var::E2, &eps.scale(&Scalar::from_int(-2)))
            .unwrap();
        let expanded = crate::exactalg::laurent(&on_line, Var::Eps, 3).unwrap();
        assert!(expanded.eq_within(&s));
    }
}
