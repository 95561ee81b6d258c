//! Rational functions of `v = φ⁴` whose poles lie in `{0, 1, 1/3, ∞}`.
//!
//! An element is `N(v) / ((1−v)^a (1−3v)^b)` with `N` a Laurent polynomial.
//! No other denominator can be represented, so a pole elsewhere is a type
//! error rather than something to check for. Values are kept reduced: `N`
//! is not divisible by `(1−v)` when `a > 0`, nor by `(1−3v)` when `b > 0`.

use crate::error::{CoreError, Result};
use crate::exactalg::Scalar;
use serde::Serialize;
use std::collections::BTreeMap;

/// The four points where the rational forms may have poles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Pole {
    Zero,
    One,
    Third,
    Infinity,
}

impl Pole {
    pub const ALL: [Pole; 4] = [Pole::Zero, Pole::One, Pole::Third, Pole::Infinity];

    pub fn name(self) -> &'static str {
        match self {
            Pole::Zero => "0",
            Pole::One => "1",
            Pole::Third => "1/3",
            Pole::Infinity => "inf",
        }
    }

    pub fn parse(s: &str) -> Option<Pole> {
        Pole::ALL.into_iter().find(|p| p.name() == s)
    }
}

#[derive(Clone, PartialEq, Eq, Default)]
pub struct VRat {
    num: BTreeMap<i64, Scalar>,
    a: u32,
    b: u32,
}

fn sc(n: i64) -> Scalar {
    Scalar::from_int(n)
}

fn add_into(map: &mut BTreeMap<i64, Scalar>, e: i64, c: Scalar) {
    if c.is_zero() {
        return;
    }
    let slot = map.entry(e).or_insert_with(Scalar::zero);
    *slot = &*slot + &c;
    if slot.is_zero() {
        map.remove(&e);
    }
}

fn poly_mul(p: &BTreeMap<i64, Scalar>, q: &BTreeMap<i64, Scalar>) -> BTreeMap<i64, Scalar> {
    let mut out = BTreeMap::new();
    for (i, x) in p {
        for (j, y) in q {
            add_into(&mut out, i + j, x * y);
        }
    }
    out
}

/// `1 − k·v`.
fn linear(k: i64) -> BTreeMap<i64, Scalar> {
    BTreeMap::from([(0, sc(1)), (1, sc(-k))])
}

fn poly_pow(p: &BTreeMap<i64, Scalar>, n: u32) -> BTreeMap<i64, Scalar> {
    let mut out = BTreeMap::from([(0, sc(1))]);
    for _ in 0..n {
        out = poly_mul(&out, p);
    }
    out
}

/// Exact division of a Laurent polynomial by `1 − k·v`, if it divides.
fn div_linear(p: &BTreeMap<i64, Scalar>, k: i64) -> Option<BTreeMap<i64, Scalar>> {
    let (lo, hi) = match (p.keys().next(), p.keys().next_back()) {
        (Some(l), Some(h)) => (*l, *h),
        _ => return Some(BTreeMap::new()),
    };
    // n_i = q_i − k q_{i−1}  ⇒  q_i = n_i + k q_{i−1}
    let kk = sc(k);
    let mut q = BTreeMap::new();
    let mut prev = Scalar::zero();
    for i in lo..hi {
        let n_i = p.get(&i).cloned().unwrap_or_else(Scalar::zero);
        let q_i = &n_i + &(&kk * &prev);
        if !q_i.is_zero() {
            q.insert(i, q_i.clone());
        }
        prev = q_i;
    }
    // the top coefficient must close the recursion: n_hi = −k q_{hi−1}
    let top = p.get(&hi).cloned().unwrap_or_else(Scalar::zero);
    if (&top + &(&kk * &prev)).is_zero() {
        Some(q)
    } else {
        None
    }
}

/// Truncated power series in a local parameter `h`, `n` coefficients.
type Local = Vec<Scalar>;

fn local_mul(p: &Local, q: &Local, n: usize) -> Local {
    let mut out = vec![Scalar::zero(); n];
    for (i, x) in p.iter().enumerate().take(n) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in q.iter().enumerate().take(n - i) {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    out
}

/// `(c + d·h)^k` for `c ≠ 0` and any integer `k`, through `h^{n−1}`.
fn binomial_local(c: &Scalar, d: &Scalar, k: i64, n: usize) -> Local {
    let ck = c.pow(k).expect("nonzero base");
    let ratio = d * &c.inv().expect("nonzero base");
    let mut out = Vec::with_capacity(n);
    let mut coeff = ck;
    for j in 0..n as i64 {
        out.push(coeff.clone());
        // binom(k, j+1)/binom(k, j) = (k − j)/(j + 1)
        coeff = &(&coeff * &ratio) * &Scalar::from_frac(k - j, j + 1);
    }
    out
}

impl VRat {
    pub fn zero() -> Self {
        VRat::default()
    }

    pub fn one() -> Self {
        Self::monomial(Scalar::one(), 0)
    }

    /// `c·v^e`.
    pub fn monomial(c: Scalar, e: i64) -> Self {
        let mut num = BTreeMap::new();
        add_into(&mut num, e, c);
        VRat { num, a: 0, b: 0 }
    }

    pub fn constant(c: Scalar) -> Self {
        Self::monomial(c, 0)
    }

    /// `N(v) / ((1−v)^a (1−3v)^b)`, reduced.
    pub fn new(num: BTreeMap<i64, Scalar>, a: u32, b: u32) -> Self {
        let mut num = num;
        num.retain(|_, c| !c.is_zero());
        VRat { num, a, b }.reduced()
    }

    /// `(1 − v)^k` for any integer `k`.
    pub fn one_minus_v_pow(k: i64) -> Self {
        if k >= 0 {
            VRat { num: poly_pow(&linear(1), k as u32), a: 0, b: 0 }
        } else {
            VRat { num: BTreeMap::from([(0, sc(1))]), a: (-k) as u32, b: 0 }
        }
    }

    /// `(1 − 3v)^k` for any integer `k`.
    pub fn one_minus_3v_pow(k: i64) -> Self {
        if k >= 0 {
            VRat { num: poly_pow(&linear(3), k as u32), a: 0, b: 0 }
        } else {
            VRat { num: BTreeMap::from([(0, sc(1))]), a: 0, b: (-k) as u32 }
        }
    }

    pub fn numerator(&self) -> &BTreeMap<i64, Scalar> {
        &self.num
    }

    /// Pole orders at `v = 1` and `v = 1/3`.
    pub fn denominator_powers(&self) -> (u32, u32) {
        (self.a, self.b)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    fn reduced(mut self) -> Self {
        if self.num.is_empty() {
            self.a = 0;
            self.b = 0;
            return self;
        }
        while self.a > 0 {
            match div_linear(&self.num, 1) {
                Some(q) => {
                    self.num = q;
                    self.a -= 1;
                }
                None => break,
            }
        }
        while self.b > 0 {
            match div_linear(&self.num, 3) {
                Some(q) => {
                    self.num = q;
                    self.b -= 1;
                }
                None => break,
            }
        }
        self
    }

    fn lifted_num(&self, a: u32, b: u32) -> BTreeMap<i64, Scalar> {
        let up = poly_mul(&poly_pow(&linear(1), a - self.a), &poly_pow(&linear(3), b - self.b));
        poly_mul(&self.num, &up)
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let (a, b) = (self.a.max(o.a), self.b.max(o.b));
        let mut num = self.lifted_num(a, b);
        for (e, c) in o.lifted_num(a, b) {
            add_into(&mut num, e, c);
        }
        VRat { num, a, b }.reduced()
    }

    pub fn neg(&self) -> Self {
        self.scale(&sc(-1))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return VRat::zero();
        }
        VRat { num: poly_mul(&self.num, &o.num), a: self.a + o.a, b: self.b + o.b }.reduced()
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return VRat::zero();
        }
        VRat { num: self.num.iter().map(|(e, x)| (*e, x * c)).collect(), a: self.a, b: self.b }
    }

    /// Multiply by `v^k`.
    pub fn shift(&self, k: i64) -> Self {
        VRat { num: self.num.iter().map(|(e, x)| (e + k, x.clone())).collect(), a: self.a, b: self.b }
    }

    /// Value at a point where the function is regular.
    pub fn eval(&self, v: &Scalar) -> Result<Scalar> {
        let mut n = Scalar::zero();
        for (e, c) in &self.num {
            let p = v.pow(*e).ok_or_else(|| CoreError::Algebra("evaluating a negative power of v at v = 0".into()))?;
            n = &n + &(c * &p);
        }
        let one = Scalar::one();
        let d1 = (&one - v).pow(self.a as i64);
        let d3 = (&one - &(&sc(3) * v)).pow(self.b as i64);
        let d = &d1.unwrap() * &d3.unwrap();
        let inv = d.inv().ok_or_else(|| CoreError::Algebra("evaluating at a pole".into()))?;
        Ok(&n * &inv)
    }

    /// Whether the function has no pole at the given point.
    pub fn regular_at(&self, at: Pole) -> bool {
        match at {
            Pole::Zero => self.num.keys().next().is_none_or(|e| *e >= 0),
            Pole::One => self.a == 0,
            Pole::Third => self.b == 0,
            Pole::Infinity => self.order_at_infinity().is_none_or(|o| o >= 0),
        }
    }

    /// Order of vanishing at `v = ∞` (negative for a pole); `None` for 0.
    pub fn order_at_infinity(&self) -> Option<i64> {
        self.num.keys().next_back().map(|top| (self.a + self.b) as i64 - top)
    }

    /// Residue of the 1-form `R(v)·dv/v` at the given point.
    ///
    /// Since `dφ/φ = dv/(4v)` and `v = φ⁴` has degree 4, this is also the sum
    /// of the residues of `R(φ⁴)·dφ/φ` over the four (or, at `0` and `∞`,
    /// the single) preimages in the φ-line.
    pub fn residue(&self, at: Pole) -> Scalar {
        if self.is_zero() {
            return Scalar::zero();
        }
        let (a, b) = (self.a as i64, self.b as i64);
        match at {
            Pole::Zero => {
                let lo = *self.num.keys().next().unwrap();
                if lo > 0 {
                    return Scalar::zero();
                }
                let n = (1 - lo) as usize;
                let s = local_mul(&binomial_local(&sc(1), &sc(-1), -a, n), &binomial_local(&sc(1), &sc(-3), -b, n), n);
                let mut r = Scalar::zero();
                for (e, c) in self.num.range(..=0) {
                    r = &r + &(c * &s[(-e) as usize]);
                }
                r
            }
            Pole::One => {
                if a == 0 {
                    return Scalar::zero();
                }
                // v = 1 + h: R/v = (−1)^a h^{−a} N(1+h) (−2 − 3h)^{−b} (1+h)^{−1}
                let n = a as usize;
                let reg = self.regular_local(&sc(1), n, &binomial_local(&sc(-2), &sc(-3), -b, n));
                let s = if a % 2 == 0 { sc(1) } else { sc(-1) };
                &s * &reg[n - 1]
            }
            Pole::Third => {
                if b == 0 {
                    return Scalar::zero();
                }
                // v = 1/3 + h: R/v = (−3)^{−b} h^{−b} N(1/3+h) (2/3 − h)^{−a} (1/3+h)^{−1}
                let n = b as usize;
                let third = Scalar::from_frac(1, 3);
                let reg = self.regular_local(&third, n, &binomial_local(&Scalar::from_frac(2, 3), &sc(-1), -a, n));
                &sc(-3).pow(-b).unwrap() * &reg[n - 1]
            }
            Pole::Infinity => {
                // v = 1/w, dv/v = −dw/w:
                // Res = −[w⁰] Σ n_i w^{a+b−i} (w−1)^{−a} (w−3)^{−b}
                let top = *self.num.keys().next_back().unwrap();
                let need = top - a - b;
                if need < 0 {
                    return Scalar::zero();
                }
                let n = (need + 1) as usize;
                let g = local_mul(&binomial_local(&sc(-1), &sc(1), -a, n), &binomial_local(&sc(-3), &sc(1), -b, n), n);
                let mut r = Scalar::zero();
                for (e, c) in &self.num {
                    let j = e - a - b;
                    if j >= 0 {
                        r = &r + &(c * &g[j as usize]);
                    }
                }
                -r
            }
        }
    }

    /// `N(c+h)·other·(c+h)^{−1}` through `h^{n−1}`.
    fn regular_local(&self, c: &Scalar, n: usize, other: &Local) -> Local {
        let mut num = vec![Scalar::zero(); n];
        for (e, x) in &self.num {
            let t = binomial_local(c, &sc(1), *e, n);
            for (k, y) in t.iter().enumerate() {
                num[k] = &num[k] + &(x * y);
            }
        }
        let inv_v = binomial_local(c, &sc(1), -1, n);
        local_mul(&local_mul(&num, other, n), &inv_v, n)
    }

    pub fn to_string_v(&self) -> String {
        let mut s = String::new();
        if self.num.is_empty() {
            return "0".into();
        }
        let mut first = true;
        for (e, c) in &self.num {
            if !first {
                s.push_str(" + ");
            }
            first = false;
            match e {
                0 => s.push_str(&format!("({})", c)),
                _ => s.push_str(&format!("({})*v^{}", c, e)),
            }
        }
        if self.a > 0 || self.b > 0 {
            s = format!("[{}] / ((1-v)^{} (1-3v)^{})", s, self.a, self.b);
        }
        s
    }
}

impl std::fmt::Debug for VRat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.to_string_v())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::residue::{residue_at, Point};
    use crate::exactalg::{MultiPoly, RationalFn, Var};
    use proptest::prelude::*;

    fn to_ratfn(r: &VRat) -> RationalFn {
        let lo = r.num.keys().next().copied().unwrap_or(0).min(0);
        let mut num = MultiPoly::zero();
        for (e, c) in &r.num {
            num = num.add(&MultiPoly::monomial(c.clone(), &[(Var::V, (e - lo) as u16)]));
        }
        let v = MultiPoly::var(Var::V);
        let one = MultiPoly::one();
        let den = one
            .sub(&v)
            .pow(r.a)
            .mul(&one.sub(&v.scale(&sc(3))).pow(r.b))
            .mul(&v.pow((-lo) as u32));
        RationalFn::new(num, &den).unwrap()
    }

    fn point(p: Pole) -> Point {
        match p {
            Pole::Zero => Point::Finite(sc(0)),
            Pole::One => Point::Finite(sc(1)),
            Pole::Third => Point::Finite(Scalar::from_frac(1, 3)),
            Pole::Infinity => Point::Infinity,
        }
    }

    fn arb_vrat() -> impl Strategy<Value = VRat> {
        (prop::collection::vec(-4i64..5, 1..6), -3i64..2, 0u32..4, 0u32..4)
            .prop_map(|(cs, lo, a, b)| VRat::new(cs.iter().enumerate().map(|(i, c)| (lo + i as i64, sc(*c))).collect(), a, b))
    }

    #[test]
    fn reduction_cancels_factors() {
        let r = VRat::one_minus_v_pow(2).mul(&VRat::one_minus_v_pow(-3)).mul(&VRat::one_minus_3v_pow(-1));
        assert_eq!(r.denominator_powers(), (1, 1));
        assert_eq!(r.numerator().len(), 1);
        assert!(VRat::one_minus_3v_pow(3).mul(&VRat::one_minus_3v_pow(-3)) == VRat::one());
    }

    #[test]
    fn simple_residues() {
        // dv/v at 0 and ∞
        let one = VRat::one();
        assert_eq!(one.residue(Pole::Zero), sc(1));
        assert_eq!(one.residue(Pole::Infinity), sc(-1));
        // v/(1−v) · dv/v = dv/(1−v): residue −1 at 1
        let r = VRat::one_minus_v_pow(-1).shift(1);
        assert_eq!(r.residue(Pole::One), sc(-1));
        // v/(1−3v) · dv/v: residue −1/3 at 1/3
        let r = VRat::one_minus_3v_pow(-1).shift(1);
        assert_eq!(r.residue(Pole::Third), Scalar::from_frac(-1, 3));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn residues_agree_with_generic_engine(r in arb_vrat()) {
            let f = to_ratfn(&r).div(&RationalFn::var(Var::V)).unwrap();
            for p in Pole::ALL {
                let generic = residue_at(&f, Var::V, Var::W, &point(p)).unwrap();
                prop_assert!(generic.sub(&RationalFn::from_scalar(r.residue(p))).is_zero(), "pole {:?}", p);
            }
        }

        #[test]
        fn residue_theorem(r in arb_vrat()) {
            let total = Pole::ALL.iter().fold(Scalar::zero(), |acc, p| &acc + &r.residue(*p));
            prop_assert!(total.is_zero());
        }

        #[test]
        fn field_operations(r in arb_vrat(), s in arb_vrat()) {
            prop_assert_eq!(r.add(&s).sub(&s), r.clone());
            let v = Scalar::from_frac(2, 7);
            let lhs = r.mul(&s).eval(&v).unwrap();
            prop_assert_eq!(lhs, &r.eval(&v).unwrap() * &s.eval(&v).unwrap());
        }
    }
}
