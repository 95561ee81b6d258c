//! Exact scalars in the field Q(i, √2).
//!
//! An element is `r0 + r1·i + r2·√2 + r3·i√2` with rational coordinates.
//! Almost every scalar that shows up in practice is rational, so the three
//! irrational coordinates live behind an optional box and the rational path
//! stays allocation-light.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    re: BigRational,
    ext: Option<Box<[BigRational; 3]>>,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { re: BigRational::zero(), ext: None }
    }

    pub fn one() -> Self {
        Scalar { re: BigRational::one(), ext: None }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar { re: BigRational::from_integer(BigInt::from(n)), ext: None }
    }

    pub fn from_frac(n: i64, d: i64) -> Self {
        Scalar { re: rat(n, d), ext: None }
    }

    pub fn from_rational(r: BigRational) -> Self {
        Scalar { re: r, ext: None }
    }

    /// Build from the four coordinates `(1, i, √2, i√2)`.
    pub fn from_parts(parts: [BigRational; 4]) -> Self {
        let [r0, r1, r2, r3] = parts;
        Scalar { re: r0, ext: Some(Box::new([r1, r2, r3])) }.normalized()
    }

    pub fn i() -> Self {
        Self::from_parts([BigRational::zero(), BigRational::one(), BigRational::zero(), BigRational::zero()])
    }

    pub fn sqrt2() -> Self {
        Self::from_parts([BigRational::zero(), BigRational::zero(), BigRational::one(), BigRational::zero()])
    }

    /// `i^k` for any integer `k`.
    pub fn i_pow(k: i64) -> Self {
        match k.rem_euclid(4) {
            0 => Self::one(),
            1 => Self::i(),
            2 => Self::from_int(-1),
            _ => -Self::i(),
        }
    }

    fn normalized(mut self) -> Self {
        if let Some(e) = &self.ext {
            if e.iter().all(|c| c.is_zero()) {
                self.ext = None;
            }
        }
        self
    }

    pub fn parts(&self) -> [BigRational; 4] {
        match &self.ext {
            None => [self.re.clone(), BigRational::zero(), BigRational::zero(), BigRational::zero()],
            Some(e) => [self.re.clone(), e[0].clone(), e[1].clone(), e[2].clone()],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.ext.is_none() && self.re.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.ext.is_none() && self.re.is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.ext.is_none()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.ext.is_none() {
            Some(&self.re)
        } else {
            None
        }
    }

    /// Complex conjugation `i ↦ −i` (fixes √2).
    pub fn conj_i(&self) -> Self {
        let [r0, r1, r2, r3] = self.parts();
        Self::from_parts([r0, -r1, r2, -r3])
    }

    /// Galois conjugation `√2 ↦ −√2` (fixes i).
    pub fn conj_sqrt2(&self) -> Self {
        let [r0, r1, r2, r3] = self.parts();
        Self::from_parts([r0, r1, -r2, -r3])
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if let Some(r) = self.as_rational() {
            return Some(Scalar::from_rational(r.recip()));
        }
        // x = A + B√2 with A, B in Q(i); x⁻¹ = (A − B√2)/(A² − 2B²).
        let conj = self.conj_sqrt2();
        let n = self * &conj; // lies in Q(i)
        let [n0, n1, _, _] = n.parts();
        let norm = &n0 * &n0 + &n1 * &n1;
        let n_inv = Scalar::from_parts([&n0 / &norm, -(&n1 / &norm), BigRational::zero(), BigRational::zero()]);
        Some(&conj * &n_inv)
    }

    pub fn pow(&self, k: i64) -> Option<Self> {
        if k < 0 {
            return self.inv().map(|x| x.pow(-k).unwrap());
        }
        let mut result = Scalar::one();
        let mut base = self.clone();
        let mut e = k as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        Some(result)
    }

    /// `√2^k` for any integer `k`.
    pub fn sqrt2_pow(k: i64) -> Self {
        let half = k.div_euclid(2);
        let two = if half >= 0 {
            Scalar::from_rational(BigRational::from_integer(BigInt::from(2).pow(half as u32)))
        } else {
            Scalar::from_rational(rat(1, 1) / BigRational::from_integer(BigInt::from(2).pow((-half) as u32)))
        };
        if k.rem_euclid(2) == 1 {
            &two * &Scalar::sqrt2()
        } else {
            two
        }
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        match (&self.ext, &rhs.ext) {
            (None, None) => Scalar { re: &self.re + &rhs.re, ext: None },
            _ => {
                let a = self.parts();
                let b = rhs.parts();
                Scalar::from_parts([&a[0] + &b[0], &a[1] + &b[1], &a[2] + &b[2], &a[3] + &b[3]])
            }
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        match (&self.ext, &rhs.ext) {
            (None, None) => Scalar { re: &self.re - &rhs.re, ext: None },
            _ => {
                let a = self.parts();
                let b = rhs.parts();
                Scalar::from_parts([&a[0] - &b[0], &a[1] - &b[1], &a[2] - &b[2], &a[3] - &b[3]])
            }
        }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        match (&self.ext, &rhs.ext) {
            (None, None) => Scalar { re: &self.re * &rhs.re, ext: None },
            (None, Some(e)) => Scalar {
                re: &self.re * &rhs.re,
                ext: Some(Box::new([&self.re * &e[0], &self.re * &e[1], &self.re * &e[2]])),
            }
            .normalized(),
            (Some(e), None) => Scalar {
                re: &self.re * &rhs.re,
                ext: Some(Box::new([&rhs.re * &e[0], &rhs.re * &e[1], &rhs.re * &e[2]])),
            }
            .normalized(),
            _ => {
                let [a0, a1, a2, a3] = self.parts();
                let [b0, b1, b2, b3] = rhs.parts();
                let two = rat(2, 1);
                let c0 = &a0 * &b0 - &a1 * &b1 + &two * (&a2 * &b2 - &a3 * &b3);
                let c1 = &a0 * &b1 + &a1 * &b0 + &two * (&a2 * &b3 + &a3 * &b2);
                let c2 = &a0 * &b2 + &a2 * &b0 - &a1 * &b3 - &a3 * &b1;
                let c3 = &a0 * &b3 + &a3 * &b0 + &a1 * &b2 + &a2 * &b1;
                Scalar::from_parts([c0, c1, c2, c3])
            }
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self.ext {
            None => Scalar { re: -self.re, ext: None },
            Some(e) => {
                let [a, b, c] = *e;
                Scalar { re: -self.re, ext: Some(Box::new([-a, -b, -c])) }
            }
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -(self.clone())
    }
}

fn fmt_rat(r: &BigRational) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Scalar {
    /// Canonical form `p/q [+ p/q i] [+ p/q r2] [+ p/q i r2]`; the rational
    /// part is always printed, other parts only when nonzero.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.parts();
        let mut out = fmt_rat(&p[0]);
        for (c, name) in p[1..].iter().zip(["i", "r2", "i r2"]) {
            if c.is_zero() {
                continue;
            }
            if c.is_negative() {
                out.push_str(&format!(" - {} {}", fmt_rat(&-c.clone()), name));
            } else {
                out.push_str(&format!(" + {} {}", fmt_rat(c), name));
            }
        }
        write!(f, "{}", out)
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_scalar() -> impl Strategy<Value = Scalar> {
        prop::array::uniform4((-20i64..20, 1i64..6)).prop_map(|c| {
            Scalar::from_parts([rat(c[0].0, c[0].1), rat(c[1].0, c[1].1), rat(c[2].0, c[2].1), rat(c[3].0, c[3].1)])
        })
    }

    #[test]
    fn units_square_correctly() {
        assert_eq!(&Scalar::i() * &Scalar::i(), Scalar::from_int(-1));
        assert_eq!(&Scalar::sqrt2() * &Scalar::sqrt2(), Scalar::from_int(2));
        let isq = &Scalar::i() * &Scalar::sqrt2();
        assert_eq!(&isq * &isq, Scalar::from_int(-2));
    }

    #[test]
    fn sqrt2_powers() {
        assert_eq!(Scalar::sqrt2_pow(3), &Scalar::from_int(2) * &Scalar::sqrt2());
        assert_eq!(&Scalar::sqrt2_pow(-3) * &Scalar::sqrt2_pow(3), Scalar::one());
        assert_eq!(Scalar::i_pow(-1), -Scalar::i());
    }

    #[test]
    fn display_format() {
        let x = Scalar::from_parts([rat(1, 2), rat(-3, 1), BigRational::zero(), rat(2, 5)]);
        assert_eq!(x.to_string(), "1/2 - 3 i + 2/5 i r2");
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_scalar(), b in arb_scalar(), c in arb_scalar()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a + &b) - &b, a.clone());
        }

        #[test]
        fn inverse_is_exact(a in arb_scalar()) {
            prop_assume!(!a.is_zero());
            prop_assert_eq!(&a * &a.inv().unwrap(), Scalar::one());
        }
    }
}
