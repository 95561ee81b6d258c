//! Truncated Laurent series in one grading variable.
//!
//! Exponents are stored as integers counted in a fixed positive `unit`
//! (Λ-series use 1/12). The precision is an exclusive bound on stored
//! exponents; `None` means the series is exact (a finite sum). Every
//! operation propagates precision pessimistically, so a result never claims
//! coefficients its inputs could not determine.

use super::poly::{MultiPoly, Var};
use super::ratfn::RationalFn;
use super::scalar::Scalar;
use crate::error::{CoreError, Result};
use num_rational::Rational64;
use std::collections::BTreeMap;
use std::fmt;

/// Minimal commutative-ring interface shared by series coefficients.
pub trait Ring: Clone + Send + Sync + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn radd(&self, o: &Self) -> Self;
    fn rsub(&self, o: &Self) -> Self;
    fn rneg(&self) -> Self;
    fn rmul(&self, o: &Self) -> Self;
    fn rscale(&self, c: &Scalar) -> Self;
    fn try_inv(&self) -> Option<Self>;
    /// `exp` of a ring element, when it makes sense in the ring.
    fn try_exp(&self) -> Option<Self> {
        if self.is_zero() {
            Some(Self::one())
        } else {
            None
        }
    }
    fn is_one(&self) -> bool {
        self.rsub(&Self::one()).is_zero()
    }
    fn ring_eq(&self, o: &Self) -> bool {
        self.rsub(o).is_zero()
    }
}

impl Ring for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn one() -> Self {
        Scalar::one()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn radd(&self, o: &Self) -> Self {
        self + o
    }
    fn rsub(&self, o: &Self) -> Self {
        self - o
    }
    fn rneg(&self) -> Self {
        -self
    }
    fn rmul(&self, o: &Self) -> Self {
        self * o
    }
    fn rscale(&self, c: &Scalar) -> Self {
        self * c
    }
    fn try_inv(&self) -> Option<Self> {
        self.inv()
    }
}

impl Ring for RationalFn {
    fn zero() -> Self {
        RationalFn::zero()
    }
    fn one() -> Self {
        RationalFn::one()
    }
    fn is_zero(&self) -> bool {
        RationalFn::is_zero(self)
    }
    fn radd(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn rsub(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn rneg(&self) -> Self {
        self.neg()
    }
    fn rmul(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn rscale(&self, c: &Scalar) -> Self {
        self.scale(c)
    }
    fn try_inv(&self) -> Option<Self> {
        self.inv().ok()
    }
}

impl Ring for MultiPoly {
    fn zero() -> Self {
        MultiPoly::zero()
    }
    fn one() -> Self {
        MultiPoly::one()
    }
    fn is_zero(&self) -> bool {
        MultiPoly::is_zero(self)
    }
    fn radd(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn rsub(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn rneg(&self) -> Self {
        self.neg()
    }
    fn rmul(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn rscale(&self, c: &Scalar) -> Self {
        self.scale(c)
    }
    fn try_inv(&self) -> Option<Self> {
        if self.is_constant() {
            self.constant_term().inv().map(MultiPoly::constant)
        } else {
            None
        }
    }
}

/// Variable name used by `zero()`/`one()` placeholders that adopt the
/// metadata of whatever they are combined with.
pub const GENERIC: &str = "";

#[derive(Clone)]
pub struct GradedSeries<C: Ring> {
    pub var: &'static str,
    pub unit: Rational64,
    terms: BTreeMap<i64, C>,
    prec: Option<i64>,
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    }
}

impl<C: Ring> GradedSeries<C> {
    pub fn new(var: &'static str, unit: Rational64, prec: Option<i64>) -> Self {
        GradedSeries { var, unit, terms: BTreeMap::new(), prec }
    }

    pub fn from_terms(var: &'static str, unit: Rational64, terms: impl IntoIterator<Item = (i64, C)>, prec: Option<i64>) -> Self {
        let mut s = Self::new(var, unit, prec);
        for (e, c) in terms {
            s.add_term(e, c);
        }
        s
    }

    pub fn constant(var: &'static str, unit: Rational64, c: C, prec: Option<i64>) -> Self {
        Self::from_terms(var, unit, [(0, c)], prec)
    }

    /// `c · X^e` with the given metadata.
    pub fn monomial(var: &'static str, unit: Rational64, e: i64, c: C, prec: Option<i64>) -> Self {
        Self::from_terms(var, unit, [(e, c)], prec)
    }

    pub fn prec(&self) -> Option<i64> {
        self.prec
    }

    pub fn terms(&self) -> &BTreeMap<i64, C> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<i64, C> {
        self.terms
    }

    /// Add `c·X^e` in place (ignored beyond precision).
    pub fn add_term(&mut self, e: i64, c: C) {
        if c.is_zero() {
            return;
        }
        if let Some(p) = self.prec {
            if e >= p {
                return;
            }
        }
        let entry = self.terms.remove(&e);
        let v = match entry {
            Some(old) => old.radd(&c),
            None => c,
        };
        if !v.is_zero() {
            self.terms.insert(e, v);
        }
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn val(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    fn val_or_prec(&self) -> Option<i64> {
        self.val().or(self.prec)
    }

    /// Coefficient at exponent `e`; errors if `e` is beyond the precision.
    pub fn coeff(&self, e: i64) -> Result<C> {
        if let Some(p) = self.prec {
            if e >= p {
                return Err(CoreError::Precision(format!("coefficient {} requested from series known below {}", e, p)));
            }
        }
        Ok(self.terms.get(&e).cloned().unwrap_or_else(C::zero))
    }

    /// Coefficient at exponent `e`, zero if absent (no precision check).
    pub fn coeff_or_zero(&self, e: i64) -> C {
        self.terms.get(&e).cloned().unwrap_or_else(C::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|c| c.is_zero())
    }

    pub fn with_prec(mut self, p: Option<i64>) -> Self {
        let p = min_opt(self.prec, p);
        self.prec = p;
        if let Some(p) = p {
            self.terms.retain(|e, _| *e < p);
        }
        self
    }

    fn meta_from(&self, other: &Self) -> (&'static str, Rational64) {
        if self.var == GENERIC {
            (other.var, other.unit)
        } else if other.var == GENERIC {
            (self.var, self.unit)
        } else {
            assert!(
                self.var == other.var && self.unit == other.unit,
                "graded series mismatch: {}({}) vs {}({})",
                self.var,
                self.unit,
                other.var,
                other.unit
            );
            (self.var, self.unit)
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let (var, unit) = self.meta_from(other);
        let mut out = Self::new(var, unit, min_opt(self.prec, other.prec));
        for (e, c) in self.terms.iter().chain(other.terms.iter()) {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        GradedSeries { var: self.var, unit: self.unit, terms: self.terms.iter().map(|(e, c)| (*e, c.rneg())).collect(), prec: self.prec }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (var, unit) = self.meta_from(other);
        let prec = match (self.prec, other.prec) {
            (None, None) => None,
            (Some(pa), None) => other.val_or_prec().map(|vb| pa + vb).or(Some(pa)),
            (None, Some(pb)) => self.val_or_prec().map(|va| pb + va).or(Some(pb)),
            (Some(pa), Some(pb)) => {
                let va = self.val_or_prec().unwrap();
                let vb = other.val_or_prec().unwrap();
                Some((va + pb).min(vb + pa))
            }
        };
        let mut acc: BTreeMap<i64, C> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea + eb;
                if let Some(p) = prec {
                    if e >= p {
                        continue;
                    }
                }
                let t = ca.rmul(cb);
                match acc.get_mut(&e) {
                    Some(x) => *x = x.radd(&t),
                    None => {
                        acc.insert(e, t);
                    }
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        GradedSeries { var, unit, terms: acc, prec }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let mut out = Self::new(self.var, self.unit, self.prec);
        for (e, x) in &self.terms {
            out.add_term(*e, x.rscale(c));
        }
        out
    }

    pub fn mul_coeff(&self, c: &C) -> Self {
        let mut out = Self::new(self.var, self.unit, self.prec);
        for (e, x) in &self.terms {
            out.add_term(*e, x.rmul(c));
        }
        out
    }

    /// Multiply by `X^k` (k in units).
    pub fn shift(&self, k: i64) -> Self {
        GradedSeries {
            var: self.var,
            unit: self.unit,
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
            prec: self.prec.map(|p| p + k),
        }
    }

    pub fn map_coeffs<D: Ring, F: Fn(&C) -> D>(&self, f: F) -> GradedSeries<D> {
        let mut out = GradedSeries::<D>::new(self.var, self.unit, self.prec);
        for (e, c) in &self.terms {
            out.add_term(*e, f(c));
        }
        out
    }

    pub fn try_map_coeffs<D: Ring, F: Fn(i64, &C) -> Result<D>>(&self, f: F) -> Result<GradedSeries<D>> {
        let mut out = GradedSeries::<D>::new(self.var, self.unit, self.prec);
        for (e, c) in &self.terms {
            out.add_term(*e, f(*e, c)?);
        }
        Ok(out)
    }

    fn need_prec(&self, what: &str) -> Result<i64> {
        self.prec.ok_or_else(|| CoreError::Precision(format!("{} of an exact series needs an explicit truncation", what)))
    }

    /// Multiplicative inverse; the leading coefficient must be invertible.
    pub fn inv(&self) -> Result<Self> {
        let v = self.val().ok_or_else(|| CoreError::Algebra("inverse of zero series".into()))?;
        let p = self.need_prec("inverse")?;
        let c = self.terms[&v].try_inv().ok_or_else(|| CoreError::Algebra("leading coefficient not invertible".into()))?;
        let rel = p - v;
        let mut b: Vec<C> = Vec::with_capacity(rel.max(0) as usize);
        let shifted: Vec<(i64, &C)> = self.terms.iter().map(|(e, x)| (e - v, x)).filter(|(k, _)| *k > 0).collect();
        for n in 0..rel {
            if n == 0 {
                b.push(c.clone());
                continue;
            }
            let mut acc = C::zero();
            for (k, a) in &shifted {
                if *k > n {
                    break;
                }
                let bb = &b[(n - k) as usize];
                if !bb.is_zero() {
                    acc = acc.radd(&a.rmul(bb));
                }
            }
            b.push(acc.rmul(&c).rneg());
        }
        let terms = b.into_iter().enumerate().map(|(n, x)| (n as i64 - v, x));
        Ok(Self::from_terms(self.var, self.unit, terms, Some(rel - v)))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        if other.prec.is_none() && other.terms.len() == 1 {
            // exact monomial: divide termwise without losing precision
            let (e, c) = other.terms.iter().next().unwrap();
            let ci = c.try_inv().ok_or_else(|| CoreError::Algebra("non-invertible monomial divisor".into()))?;
            let (var, unit) = self.meta_from(other);
            let mut s = self.mul_coeff(&ci).shift(-e);
            s.var = var;
            s.unit = unit;
            return Ok(s);
        }
        let mut o = other.clone();
        if o.prec.is_none() {
            // an exact divisor: give it the precision the quotient can use
            let need = self.prec.unwrap_or(0) + 2 * o.val().unwrap_or(0) - self.val().unwrap_or(0) + 1;
            o.prec = Some(need.max(o.val().unwrap_or(0) + 1));
        }
        Ok(self.mul(&o.inv()?))
    }

    /// `exp` of a series with no negative exponents; the constant term must
    /// admit `exp` in the coefficient ring.
    pub fn exp(&self) -> Result<Self> {
        if let Some(v) = self.val() {
            if v < 0 {
                return Err(CoreError::Algebra("exp of a series with negative exponents".into()));
            }
        }
        let p = self.need_prec("exp")?;
        let c0 = self.coeff_or_zero(0);
        let ec0 = c0.try_exp().ok_or_else(|| CoreError::Algebra("exp of non-nilpotent constant term".into()))?;
        let g: Vec<(i64, C)> = self.terms.iter().filter(|(e, _)| **e > 0).map(|(e, c)| (*e, c.clone())).collect();
        let mut ev: Vec<C> = Vec::with_capacity(p.max(1) as usize);
        ev.push(C::one());
        for n in 1..p.max(1) {
            let mut acc = C::zero();
            for (k, gk) in &g {
                if *k > n {
                    break;
                }
                let prev = &ev[(n - k) as usize];
                if !prev.is_zero() {
                    acc = acc.radd(&gk.rmul(prev).rscale(&Scalar::from_int(*k)));
                }
            }
            ev.push(acc.rscale(&Scalar::from_frac(1, n)));
        }
        let terms = ev.into_iter().enumerate().map(|(n, x)| (n as i64, x.rmul(&ec0)));
        Ok(Self::from_terms(self.var, self.unit, terms, Some(p)))
    }

    /// `log` of a series whose constant term is 1 and that has no negative
    /// exponents.
    pub fn log(&self) -> Result<Self> {
        if let Some(v) = self.val() {
            if v < 0 {
                return Err(CoreError::Algebra("log of a series with negative exponents".into()));
            }
        }
        if !self.coeff_or_zero(0).is_one() {
            return Err(CoreError::Algebra("log requires constant term 1".into()));
        }
        let p = self.need_prec("log")?;
        let f: Vec<(i64, C)> = self.terms.iter().filter(|(e, _)| **e > 0).map(|(e, c)| (*e, c.clone())).collect();
        let mut l: Vec<C> = vec![C::zero(); p.max(1) as usize];
        for n in 1..p {
            // n·L_n = n·f_n − Σ_{k<n} k·L_k·f_{n−k}
            let mut acc = self.coeff_or_zero(n).rscale(&Scalar::from_int(n));
            for (j, fj) in &f {
                if *j >= n {
                    break;
                }
                let k = n - j;
                let lk = &l[k as usize];
                if !lk.is_zero() {
                    acc = acc.rsub(&lk.rmul(fj).rscale(&Scalar::from_int(k)));
                }
            }
            l[n as usize] = acc.rscale(&Scalar::from_frac(1, n));
        }
        let terms = l.into_iter().enumerate().map(|(n, x)| (n as i64, x));
        Ok(Self::from_terms(self.var, self.unit, terms, Some(p)))
    }

    /// Square root with the branch fixed by `root`, which must square to the
    /// leading coefficient. The valuation must be even.
    pub fn sqrt(&self, root: &C) -> Result<Self> {
        let v = self.val().ok_or_else(|| CoreError::Algebra("sqrt of zero series".into()))?;
        if v % 2 != 0 {
            return Err(CoreError::Algebra("sqrt of a series with odd valuation".into()));
        }
        let p = self.need_prec("sqrt")?;
        let lead = &self.terms[&v];
        if !root.rmul(root).ring_eq(lead) {
            return Err(CoreError::Algebra("root hint does not square to the leading coefficient".into()));
        }
        let inv2r = root.rscale(&Scalar::from_int(2)).try_inv().ok_or_else(|| CoreError::Algebra("root not invertible".into()))?;
        let rel = p - v;
        let mut r: Vec<C> = Vec::with_capacity(rel.max(0) as usize);
        for n in 0..rel {
            if n == 0 {
                r.push(root.clone());
                continue;
            }
            let mut acc = self.coeff_or_zero(v + n);
            for k in 1..n {
                let (a, b) = (&r[k as usize], &r[(n - k) as usize]);
                if !a.is_zero() && !b.is_zero() {
                    acc = acc.rsub(&a.rmul(b));
                }
            }
            r.push(acc.rmul(&inv2r));
        }
        let half = v / 2;
        let terms = r.into_iter().enumerate().map(|(n, x)| (n as i64 + half, x));
        Ok(Self::from_terms(self.var, self.unit, terms, Some(rel + half)))
    }

    pub fn pow(&self, k: i64) -> Result<Self> {
        if k < 0 {
            return self.inv()?.pow(-k);
        }
        let mut result = Self::constant(self.var, self.unit, C::one(), None);
        for _ in 0..k {
            result = result.mul(self);
        }
        Ok(result)
    }

    /// `X·d/dX` (logarithmic derivative operator); the `X^e` coefficient is
    /// multiplied by the real exponent `e·unit`.
    pub fn log_deriv(&self) -> Self {
        let mut out = Self::new(self.var, self.unit, self.prec);
        for (e, c) in &self.terms {
            let r = self.unit * Rational64::from_integer(*e);
            out.add_term(*e, c.rscale(&Scalar::from_frac(*r.numer(), *r.denom())));
        }
        out
    }

    /// `d/dX`; requires unit 1.
    pub fn deriv(&self) -> Self {
        assert_eq!(self.unit, Rational64::from_integer(1), "deriv needs unit exponent steps");
        self.log_deriv().shift(-1)
    }

    /// Coefficient of `X^{-1}`; errors if the truncation does not reach it.
    pub fn residue(&self) -> Result<C> {
        let e = Rational64::from_integer(-1) / self.unit;
        if !e.is_integer() {
            return Err(CoreError::Algebra("unit does not divide −1".into()));
        }
        self.coeff(e.to_integer())
    }

    /// Exact equality on the common precision range.
    pub fn eq_within(&self, other: &Self) -> bool {
        self.first_difference(other).is_none()
    }

    /// First exponent (below the common precision) where the two series
    /// differ.
    pub fn first_difference(&self, other: &Self) -> Option<i64> {
        let p = min_opt(self.prec, other.prec);
        let keys: std::collections::BTreeSet<i64> = self.terms.keys().chain(other.terms.keys()).copied().collect();
        for e in keys {
            if let Some(p) = p {
                if e >= p {
                    break;
                }
            }
            if !self.coeff_or_zero(e).ring_eq(&other.coeff_or_zero(e)) {
                return Some(e);
            }
        }
        None
    }

    /// Real exponent `e·unit` rendered as a string.
    pub fn exponent_str(&self, e: i64) -> String {
        let r = self.unit * Rational64::from_integer(e);
        if r.is_integer() {
            r.to_integer().to_string()
        } else {
            format!("{}/{}", r.numer(), r.denom())
        }
    }
}

impl GradedSeries<RationalFn> {
    /// JSON array of `{exponent, coefficient: {num, den}}` entries.
    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(e, c)| serde_json::json!({ "exponent": self.exponent_str(*e), "coefficient": c.to_json() }))
            .collect();
        serde_json::json!({
            "var": self.var,
            "precision": self.prec.map(|p| self.exponent_str(p)),
            "terms": entries,
        })
    }
}

impl<C: Ring> fmt::Debug for GradedSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "[{:?}]*{}^{}", c, self.var, self.exponent_str(*e))?;
        }
        if first {
            write!(f, "0")?;
        }
        if let Some(p) = self.prec {
            write!(f, " + O({}^{})", self.var, self.exponent_str(p))?;
        }
        Ok(())
    }
}

impl<C: Ring> Ring for GradedSeries<C> {
    fn zero() -> Self {
        GradedSeries::new(GENERIC, Rational64::from_integer(1), None)
    }
    fn one() -> Self {
        GradedSeries::constant(GENERIC, Rational64::from_integer(1), C::one(), None)
    }
    fn is_zero(&self) -> bool {
        GradedSeries::is_zero(self)
    }
    fn radd(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn rsub(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn rneg(&self) -> Self {
        self.neg()
    }
    fn rmul(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn rscale(&self, c: &Scalar) -> Self {
        self.scale(c)
    }
    fn try_inv(&self) -> Option<Self> {
        if self.prec.is_none() && self.terms.len() == 1 {
            let (e, c) = self.terms.iter().next().unwrap();
            return Some(GradedSeries::monomial(self.var, self.unit, -e, c.try_inv()?, None));
        }
        self.inv().ok()
    }
    fn try_exp(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(Self::one());
        }
        self.exp().ok()
    }
}

/// Laurent expansion of a rational function in `var` around `var = 0`,
/// keeping exponents below `prec` (exclusive).
pub fn laurent(f: &RationalFn, var: Var, prec: i64) -> Result<GradedSeries<RationalFn>> {
    let name = var.name();
    let one = Rational64::from_integer(1);
    let mut shift: i64 = 0;
    let mut others: Vec<(&MultiPoly, u32)> = Vec::new();
    for (g, k) in f.denom_factors() {
        if *g == MultiPoly::var(var) {
            shift -= *k as i64;
        } else if g.involves(var) {
            others.push((g, *k));
        }
    }
    // factors not involving `var` stay as coefficient denominators
    let mut coeff_den = RationalFn::one();
    for (g, k) in f.denom_factors() {
        if !g.involves(var) {
            coeff_den = coeff_den.mul(&RationalFn::from_poly(g.pow(*k)).inv()?);
        }
    }
    let rel = prec - shift;
    if rel <= 0 {
        return Ok(GradedSeries::new(name, one, Some(prec)));
    }
    let poly_series = |p: &MultiPoly| -> GradedSeries<RationalFn> {
        let terms = p.coeffs_in(var).into_iter().map(|(k, c)| (k as i64, RationalFn::from_poly(c)));
        GradedSeries::from_terms(name, one, terms, Some(rel))
    };
    let mut s = poly_series(f.numer()).mul_coeff(&coeff_den);
    for (g, k) in others {
        let gs = poly_series(g);
        if gs.val() != Some(0) {
            return Err(CoreError::Algebra(format!("factor {} vanishes at {} = 0 but is not {}", g, name, name)));
        }
        let gi = gs.inv()?;
        for _ in 0..k {
            s = s.mul(&gi);
        }
    }
    Ok(s.shift(shift).with_prec(Some(prec)))
}
