//! Rational functions with a factored denominator.
//!
//! The denominator is kept as a list of monic factors with multiplicities.
//! Monomial content is always split into single-variable factors, so powers
//! of `a` or `v` cancel cheaply; other common factors are removed by trial
//! division in [`RationalFn::reduce`]. Addition works over the factor-wise
//! least common multiple, which keeps sums of fixed-point contributions from
//! blowing up.

use super::poly::{MultiPoly, Var, ALL_VARS, ONE_MONO};
use super::scalar::Scalar;
use crate::error::{CoreError, Result};
use std::fmt;

#[derive(Clone)]
pub struct RationalFn {
    num: MultiPoly,
    den: Vec<(MultiPoly, u32)>,
}

fn find(den: &[(MultiPoly, u32)], f: &MultiPoly) -> Option<usize> {
    den.iter().position(|(g, _)| g == f)
}

/// Factor a nonzero polynomial into `(constant, [(monic factor, mult)])`,
/// splitting off monomial content variable by variable.
fn split_factor(p: &MultiPoly) -> (Scalar, Vec<(MultiPoly, u32)>) {
    let content = p.monomial_content();
    let mut factors = Vec::new();
    for v in ALL_VARS {
        let k = content[v.idx()];
        if k > 0 {
            factors.push((MultiPoly::var(v), k as u32));
        }
    }
    let rest = p.div_mono(&content);
    if rest.is_constant() {
        return (rest.constant_term(), factors);
    }
    let (lc, monic) = rest.make_monic();
    factors.push((monic, 1));
    (lc, factors)
}

impl RationalFn {
    pub fn zero() -> Self {
        RationalFn { num: MultiPoly::zero(), den: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_poly(MultiPoly::one())
    }

    pub fn from_poly(p: MultiPoly) -> Self {
        RationalFn { num: p, den: Vec::new() }
    }

    pub fn from_scalar(c: Scalar) -> Self {
        Self::from_poly(MultiPoly::constant(c))
    }

    pub fn int(n: i64) -> Self {
        Self::from_scalar(Scalar::from_int(n))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Self::from_scalar(Scalar::from_frac(n, d))
    }

    pub fn var(v: Var) -> Self {
        Self::from_poly(MultiPoly::var(v))
    }

    /// `num / den`; fails when `den` is the zero polynomial.
    pub fn new(num: MultiPoly, den: &MultiPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(CoreError::Algebra("zero denominator".into()));
        }
        let (c, factors) = split_factor(den);
        let mut r = RationalFn { num: num.scale(&c.inv().unwrap()), den: Vec::new() };
        for (f, k) in factors {
            r.push_factor(f, k);
        }
        r.cancel_monomials();
        Ok(r)
    }

    fn push_factor(&mut self, f: MultiPoly, k: u32) {
        match find(&self.den, &f) {
            Some(i) => self.den[i].1 += k,
            None => self.den.push((f, k)),
        }
    }

    pub fn numer(&self) -> &MultiPoly {
        &self.num
    }

    pub fn denom_factors(&self) -> &[(MultiPoly, u32)] {
        &self.den
    }

    pub fn denom_poly(&self) -> MultiPoly {
        let mut d = MultiPoly::one();
        for (f, k) in &self.den {
            d = d.mul(&f.pow(*k));
        }
        d
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    /// The polynomial value if the denominator is trivial.
    pub fn as_poly(&self) -> Option<&MultiPoly> {
        if self.den.is_empty() {
            Some(&self.num)
        } else {
            None
        }
    }

    /// The scalar value if this is a constant.
    pub fn as_scalar(&self) -> Option<Scalar> {
        if self.den.is_empty() && self.num.is_constant() {
            Some(self.num.constant_term())
        } else {
            None
        }
    }

    pub fn involves(&self, v: Var) -> bool {
        self.num.involves(v) || self.den.iter().any(|(f, _)| f.involves(v))
    }

    fn cancel_monomials(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        let content = self.num.monomial_content();
        if content == ONE_MONO {
            return;
        }
        let mut strip = ONE_MONO;
        for (f, k) in self.den.iter_mut() {
            if f.len() == 1 {
                let (m, _) = &f.terms()[0];
                if let Some(vi) = (0..m.len()).find(|&i| m[i] == 1) {
                    let d = (*k).min(content[vi] as u32);
                    if d > 0 {
                        strip[vi] += d as u16;
                        *k -= d;
                    }
                }
            }
        }
        if strip != ONE_MONO {
            self.num = self.num.div_mono(&strip);
            self.den.retain(|(_, k)| *k > 0);
        }
    }

    /// Remove every denominator factor that divides the numerator.
    pub fn reduce(&self) -> Self {
        let mut r = self.clone();
        if r.num.is_zero() {
            r.den.clear();
            return r;
        }
        for i in 0..r.den.len() {
            while r.den[i].1 > 0 {
                match r.num.div_exact(&r.den[i].0) {
                    Some(q) => {
                        r.num = q;
                        r.den[i].1 -= 1;
                    }
                    None => break,
                }
            }
        }
        r.den.retain(|(_, k)| *k > 0);
        r
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let mut den = self.den.clone();
        for (f, k) in &other.den {
            match find(&den, f) {
                Some(i) => den[i].1 = den[i].1.max(*k),
                None => den.push((f.clone(), *k)),
            }
        }
        let lift = |r: &RationalFn| {
            let mut n = r.num.clone();
            for (f, k) in &den {
                let have = find(&r.den, f).map(|i| r.den[i].1).unwrap_or(0);
                if *k > have {
                    n = n.mul(&f.pow(k - have));
                }
            }
            n
        };
        let num = lift(self).add(&lift(other));
        let mut r = RationalFn { num, den };
        r.cancel_monomials();
        r
    }

    pub fn neg(&self) -> Self {
        RationalFn { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut r = RationalFn { num: self.num.mul(&other.num), den: self.den.clone() };
        for (f, k) in &other.den {
            r.push_factor(f.clone(), *k);
        }
        r.cancel_monomials();
        r
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RationalFn { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn mul_poly(&self, p: &MultiPoly) -> Self {
        let mut r = RationalFn { num: self.num.mul(p), den: self.den.clone() };
        r.cancel_monomials();
        r
    }

    pub fn inv(&self) -> Result<Self> {
        if self.num.is_zero() {
            return Err(CoreError::Algebra("inverse of zero rational function".into()));
        }
        let (c, factors) = split_factor(&self.num);
        let mut num = MultiPoly::constant(c.inv().unwrap());
        for (f, k) in &self.den {
            num = num.mul(&f.pow(*k));
        }
        let mut r = RationalFn { num, den: Vec::new() };
        for (f, k) in factors {
            r.push_factor(f, k);
        }
        r.cancel_monomials();
        Ok(r)
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, k: i64) -> Result<Self> {
        if k < 0 {
            return self.inv()?.pow(-k);
        }
        let mut r = RationalFn { num: self.num.pow(k as u32), den: self.den.clone() };
        for f in r.den.iter_mut() {
            f.1 *= k as u32;
        }
        if k == 0 {
            r.den.clear();
        }
        Ok(r)
    }

    /// Formal partial derivative by the quotient rule.
    pub fn deriv(&self, v: Var) -> Self {
        let dn = self.num.deriv(v);
        let involved: Vec<usize> = (0..self.den.len()).filter(|&i| self.den[i].0.involves(v)).collect();
        if involved.is_empty() {
            return RationalFn { num: dn, den: self.den.clone() };
        }
        let mut prod_all = MultiPoly::one();
        for &i in &involved {
            prod_all = prod_all.mul(&self.den[i].0);
        }
        let mut num = dn.mul(&prod_all);
        for &i in &involved {
            let (f, k) = &self.den[i];
            let mut term = self.num.mul(&f.deriv(v)).scale(&Scalar::from_int(*k as i64));
            for &j in &involved {
                if j != i {
                    term = term.mul(&self.den[j].0);
                }
            }
            num = num.sub(&term);
        }
        let mut den = self.den.clone();
        for &i in &involved {
            den[i].1 += 1;
        }
        let mut r = RationalFn { num, den };
        r.cancel_monomials();
        r
    }

    fn rebuild(num: MultiPoly, old: &[(MultiPoly, u32)], f_map: impl Fn(&MultiPoly) -> MultiPoly) -> Result<Self> {
        let mut r = RationalFn { num, den: Vec::new() };
        let mut scale = Scalar::one();
        for (f, k) in old {
            let g = f_map(f);
            if g.is_zero() {
                return Err(CoreError::Algebra(format!("denominator factor {} vanishes under substitution", f)));
            }
            let (c, parts) = split_factor(&g);
            scale = &scale * &c.pow(*k as i64).unwrap();
            for (h, kk) in parts {
                r.push_factor(h, kk * k);
            }
        }
        r.num = r.num.scale(&scale.inv().unwrap());
        r.cancel_monomials();
        Ok(r)
    }

    /// Substitute `v := p` (a polynomial). Errors if a denominator factor
    /// becomes identically zero.
    pub fn subst(&self, v: Var, p: &MultiPoly) -> Result<Self> {
        if !self.involves(v) {
            return Ok(self.clone());
        }
        Self::rebuild(self.num.subst(v, p), &self.den, |f| f.subst(v, p))
    }

    pub fn subst_many(&self, subs: &[(Var, MultiPoly)]) -> Result<Self> {
        if !subs.iter().any(|(v, _)| self.involves(*v)) {
            return Ok(self.clone());
        }
        Self::rebuild(self.num.subst_many(subs), &self.den, |f| f.subst_many(subs))
    }

    /// Substitute `v := q` where `q` is itself a rational function.
    pub fn subst_rational(&self, v: Var, q: &RationalFn) -> Result<Self> {
        if !self.involves(v) {
            return Ok(self.clone());
        }
        if let Some(p) = q.as_poly() {
            return self.subst(v, p);
        }
        let eval = |p: &MultiPoly| -> Result<RationalFn> {
            let mut acc = RationalFn::zero();
            let mut qpow = RationalFn::one();
            let groups = p.coeffs_in(v);
            let mut k_cur = 0u16;
            for (k, c) in groups {
                while k_cur < k {
                    qpow = qpow.mul(q);
                    k_cur += 1;
                }
                acc = acc.add(&qpow.mul_poly(&c));
            }
            Ok(acc)
        };
        let mut r = eval(&self.num)?;
        for (f, k) in &self.den {
            let g = eval(f)?;
            if g.is_zero() {
                return Err(CoreError::Algebra(format!("denominator factor {} vanishes under substitution", f)));
            }
            r = r.div(&g.pow(*k as i64)?)?;
        }
        Ok(r)
    }

    /// Evaluate to a scalar when every occurring variable is assigned.
    pub fn eval(&self, vals: &[(Var, Scalar)]) -> Result<Scalar> {
        let n = self.num.eval(vals).ok_or_else(|| CoreError::Algebra("unassigned variable".into()))?;
        let mut d = Scalar::one();
        for (f, k) in &self.den {
            let fv = f.eval(vals).ok_or_else(|| CoreError::Algebra("unassigned variable".into()))?;
            if fv.is_zero() {
                return Err(CoreError::Algebra("pole at evaluation point".into()));
            }
            d = &d * &fv.pow(*k as i64).unwrap();
        }
        Ok(&n * &d.inv().unwrap())
    }

    /// Apply a coefficient map to the numerator terms (denominator untouched).
    pub fn map_numer<F: Fn(&MultiPoly) -> MultiPoly>(&self, f: F) -> Self {
        let mut r = RationalFn { num: f(&self.num), den: self.den.clone() };
        r.cancel_monomials();
        r
    }

    /// Serialize as `{num, den}` polynomial strings.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "num": self.num.to_string(), "den": self.denom_poly().to_string() })
    }
}

impl PartialEq for RationalFn {
    fn eq(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            write!(f, "{}", self.num)
        } else {
            let dens: Vec<String> = self
                .den
                .iter()
                .map(|(g, k)| if *k == 1 { format!("({})", g) } else { format!("({})^{}", g, k) })
                .collect();
            write!(f, "({})/({})", self.num, dens.join("*"))
        }
    }
}

impl fmt::Debug for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(x: Var) -> RationalFn {
        RationalFn::var(x)
    }

    fn arb_lin() -> impl Strategy<Value = MultiPoly> {
        (-3i64..4, -3i64..4, -3i64..4).prop_filter("nonzero", |(a, b, _)| *a != 0 || *b != 0).prop_map(|(a, b, c)| {
            MultiPoly::var(Var::A)
                .scale(&Scalar::from_int(a))
                .add(&MultiPoly::var(Var::E1).scale(&Scalar::from_int(b)))
                .add(&MultiPoly::int(c))
        })
    }

    #[test]
    fn monomial_factors_cancel() {
        let r = RationalFn::new(MultiPoly::var(Var::A).pow(3), &MultiPoly::var(Var::A).pow(2)).unwrap();
        assert!(r.is_polynomial());
        assert_eq!(r, v(Var::A));
    }

    #[test]
    fn reduce_removes_common_linear_factor() {
        let a = MultiPoly::var(Var::A);
        let m = MultiPoly::var(Var::M);
        let r = RationalFn::new(a.mul(&a).sub(&m.mul(&m)), &a.sub(&m)).unwrap().reduce();
        assert!(r.is_polynomial());
        assert_eq!(r.numer(), &a.add(&m));
    }

    #[test]
    fn quotient_rule() {
        // d/da (1/(a+1)) = −1/(a+1)²
        let f = RationalFn::one().div(&v(Var::A).add(&RationalFn::int(1))).unwrap();
        let df = f.deriv(Var::A);
        let expect = RationalFn::int(-1).div(&v(Var::A).add(&RationalFn::int(1)).pow(2).unwrap()).unwrap();
        assert_eq!(df, expect);
    }

    #[test]
    fn substitution_onto_pole_is_error() {
        let f = RationalFn::one().div(&v(Var::A).sub(&v(Var::M))).unwrap();
        assert!(f.subst(Var::M, &MultiPoly::var(Var::A)).is_err());
    }

    proptest! {
        #[test]
        fn field_axioms(p in arb_lin(), q in arb_lin(), r in arb_lin()) {
            let x = RationalFn::one().div(&RationalFn::from_poly(p.clone())).unwrap();
            let y = RationalFn::from_poly(q.clone()).div(&RationalFn::from_poly(r.clone())).unwrap();
            let z = RationalFn::from_poly(p.mul(&q));
            prop_assert_eq!(x.add(&y).mul(&z), x.mul(&z).add(&y.mul(&z)));
            prop_assert_eq!(y.mul(&y.inv().unwrap()), RationalFn::one());
            prop_assert_eq!(x.add(&y).sub(&y), x.clone());
        }
    }
}
