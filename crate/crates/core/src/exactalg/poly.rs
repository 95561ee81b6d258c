//! Sparse multivariate polynomials over [`Scalar`].
//!
//! The set of indeterminates is fixed at compile time by [`Var`]; a monomial
//! is an exponent vector indexed by the variable's position. Terms are kept
//! sorted in ascending lexicographic order with the variable order of `Var`,
//! so the leading term is the last one and equality is structural.

use super::scalar::Scalar;
use std::collections::HashMap;
use std::fmt;

/// Indeterminates known to the engine, in monomial-order priority.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    A,
    M,
    E1,
    E2,
    Eps,
    S,
    T,
    X,
    Z,
    Lam,
    Al2,
    V,
    W,
    U,
    Tc,
    G2,
    G3,
    Y0,
    Y1,
    Y2,
    Y3,
    Y4,
}

pub const NV: usize = 22;

pub const ALL_VARS: [Var; NV] = [
    Var::A,
    Var::M,
    Var::E1,
    Var::E2,
    Var::Eps,
    Var::S,
    Var::T,
    Var::X,
    Var::Z,
    Var::Lam,
    Var::Al2,
    Var::V,
    Var::W,
    Var::U,
    Var::Tc,
    Var::G2,
    Var::G3,
    Var::Y0,
    Var::Y1,
    Var::Y2,
    Var::Y3,
    Var::Y4,
];

impl Var {
    pub fn idx(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::A => "a",
            Var::M => "m",
            Var::E1 => "e1",
            Var::E2 => "e2",
            Var::Eps => "eps",
            Var::S => "s",
            Var::T => "t",
            Var::X => "x",
            Var::Z => "z",
            Var::Lam => "L",
            Var::Al2 => "al2",
            Var::V => "v",
            Var::W => "w",
            Var::U => "u",
            Var::Tc => "T",
            Var::G2 => "g2",
            Var::G3 => "g3",
            Var::Y0 => "y0",
            Var::Y1 => "y1",
            Var::Y2 => "y2",
            Var::Y3 => "y3",
            Var::Y4 => "y4",
        }
    }

    /// The α-pairing indeterminate `y_k = (e_k, α)` for basis vector `k`.
    pub fn y(k: usize) -> Var {
        [Var::Y0, Var::Y1, Var::Y2, Var::Y3, Var::Y4][k]
    }
}

pub type Mono = [u16; NV];

pub const ONE_MONO: Mono = [0; NV];

fn mono_mul(a: &Mono, b: &Mono) -> Mono {
    let mut r = *a;
    for i in 0..NV {
        r[i] += b[i];
    }
    r
}

fn mono_divides(d: &Mono, n: &Mono) -> bool {
    (0..NV).all(|i| d[i] <= n[i])
}

fn mono_div(n: &Mono, d: &Mono) -> Mono {
    let mut r = *n;
    for i in 0..NV {
        r[i] -= d[i];
    }
    r
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MultiPoly {
    terms: Vec<(Mono, Scalar)>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            MultiPoly { terms: vec![(ONE_MONO, c)] }
        }
    }

    pub fn int(n: i64) -> Self {
        Self::constant(Scalar::from_int(n))
    }

    pub fn var(v: Var) -> Self {
        Self::monomial(Scalar::one(), &[(v, 1)])
    }

    pub fn monomial(c: Scalar, powers: &[(Var, u16)]) -> Self {
        let mut m = ONE_MONO;
        for &(v, e) in powers {
            m[v.idx()] += e;
        }
        if c.is_zero() {
            Self::zero()
        } else {
            MultiPoly { terms: vec![(m, c)] }
        }
    }

    /// Build from unsorted terms, merging duplicates and dropping zeros.
    pub fn from_terms(terms: Vec<(Mono, Scalar)>) -> Self {
        let mut map: HashMap<Mono, Scalar> = HashMap::with_capacity(terms.len());
        for (m, c) in terms {
            match map.get_mut(&m) {
                Some(acc) => *acc = &*acc + &c,
                None => {
                    map.insert(m, c);
                }
            }
        }
        let mut v: Vec<(Mono, Scalar)> = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        v.sort_by_key(|a| a.0);
        MultiPoly { terms: v }
    }

    pub fn terms(&self) -> &[(Mono, Scalar)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0 == ONE_MONO)
    }

    /// The constant term (coefficient of the empty monomial).
    pub fn constant_term(&self) -> Scalar {
        match self.terms.first() {
            Some((m, c)) if *m == ONE_MONO => c.clone(),
            _ => Scalar::zero(),
        }
    }

    pub fn leading(&self) -> Option<&(Mono, Scalar)> {
        self.terms.last()
    }

    pub fn degree_in(&self, v: Var) -> u16 {
        self.terms.iter().map(|(m, _)| m[v.idx()]).max().unwrap_or(0)
    }

    pub fn min_degree_in(&self, v: Var) -> u16 {
        self.terms.iter().map(|(m, _)| m[v.idx()]).min().unwrap_or(0)
    }

    pub fn involves(&self, v: Var) -> bool {
        self.terms.iter().any(|(m, _)| m[v.idx()] > 0)
    }

    /// Variables that occur with positive exponent somewhere.
    pub fn variables(&self) -> Vec<Var> {
        ALL_VARS.iter().copied().filter(|v| self.involves(*v)).collect()
    }

    /// Monomial gcd of all terms (componentwise minimum exponent).
    pub fn monomial_content(&self) -> Mono {
        let mut g = match self.terms.first() {
            Some((m, _)) => *m,
            None => return ONE_MONO,
        };
        for (m, _) in &self.terms[1..] {
            for i in 0..NV {
                g[i] = g[i].min(m[i]);
            }
        }
        g
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        MultiPoly { terms: self.terms.iter().map(|(m, x)| (*m, x * c)).collect() }
    }

    pub fn mul_mono(&self, mono: &Mono) -> Self {
        MultiPoly { terms: self.terms.iter().map(|(m, c)| (mono_mul(m, mono), c.clone())).collect() }
    }

    /// Divide every monomial by `mono`; caller guarantees divisibility.
    pub fn div_mono(&self, mono: &Mono) -> Self {
        MultiPoly { terms: self.terms.iter().map(|(m, c)| (mono_div(m, mono), c.clone())).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = &a[i].1 + &b[j].1;
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        MultiPoly { terms: out }
    }

    pub fn neg(&self) -> Self {
        MultiPoly { terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if self.is_constant() {
            return other.scale(&self.terms[0].1);
        }
        if other.is_constant() {
            return self.scale(&other.terms[0].1);
        }
        let mut map: HashMap<Mono, Scalar> = HashMap::with_capacity(self.len() * other.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = mono_mul(ma, mb);
                let c = ca * cb;
                match map.get_mut(&m) {
                    Some(acc) => *acc = &*acc + &c,
                    None => {
                        map.insert(m, c);
                    }
                }
            }
        }
        let mut v: Vec<(Mono, Scalar)> = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        v.sort_by_key(|a| a.0);
        MultiPoly { terms: v }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn deriv(&self, v: Var) -> Self {
        let i = v.idx();
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m[i] > 0)
            .map(|(m, c)| {
                let mut m2 = *m;
                m2[i] -= 1;
                (m2, c * &Scalar::from_int(m[i] as i64))
            })
            .collect();
        MultiPoly::from_terms(terms)
    }

    /// Split by powers of `v`: returns `(k, coefficient)` pairs, ascending.
    pub fn coeffs_in(&self, v: Var) -> Vec<(u16, MultiPoly)> {
        let i = v.idx();
        let mut groups: std::collections::BTreeMap<u16, Vec<(Mono, Scalar)>> = Default::default();
        for (m, c) in &self.terms {
            let mut m2 = *m;
            let k = m2[i];
            m2[i] = 0;
            groups.entry(k).or_default().push((m2, c.clone()));
        }
        groups.into_iter().map(|(k, t)| (k, MultiPoly::from_terms(t))).collect()
    }

    pub fn coeff_of_power(&self, v: Var, k: u16) -> MultiPoly {
        let i = v.idx();
        MultiPoly::from_terms(
            self.terms
                .iter()
                .filter(|(m, _)| m[i] == k)
                .map(|(m, c)| {
                    let mut m2 = *m;
                    m2[i] = 0;
                    (m2, c.clone())
                })
                .collect(),
        )
    }

    /// Substitute `v := p`.
    pub fn subst(&self, v: Var, p: &MultiPoly) -> Self {
        if !self.involves(v) {
            return self.clone();
        }
        let groups = self.coeffs_in(v);
        let max = groups.last().map(|g| g.0).unwrap_or(0);
        let mut powers = vec![MultiPoly::one()];
        for _ in 0..max {
            let next = powers.last().unwrap().mul(p);
            powers.push(next);
        }
        let mut acc = MultiPoly::zero();
        for (k, c) in groups {
            acc = acc.add(&c.mul(&powers[k as usize]));
        }
        acc
    }

    /// Substitute several variables at once (simultaneously).
    pub fn subst_many(&self, subs: &[(Var, MultiPoly)]) -> Self {
        let mut acc = MultiPoly::zero();
        let mut cache: HashMap<(usize, u16), MultiPoly> = HashMap::new();
        for (m, c) in &self.terms {
            let mut mono = *m;
            let mut factor = MultiPoly::constant(c.clone());
            for (si, (v, p)) in subs.iter().enumerate() {
                let k = mono[v.idx()];
                if k == 0 {
                    continue;
                }
                mono[v.idx()] = 0;
                let pk = cache.entry((si, k)).or_insert_with(|| p.pow(k as u32)).clone();
                factor = factor.mul(&pk);
            }
            acc = acc.add(&factor.mul_mono(&mono));
        }
        acc
    }

    /// Map each term's coefficient by a function of its monomial.
    pub fn map_terms<F: Fn(&Mono, &Scalar) -> Scalar>(&self, f: F) -> Self {
        MultiPoly::from_terms(self.terms.iter().map(|(m, c)| (*m, f(m, c))).collect())
    }

    /// Keep only terms satisfying the predicate.
    pub fn filter_terms<F: Fn(&Mono) -> bool>(&self, f: F) -> Self {
        MultiPoly { terms: self.terms.iter().filter(|(m, _)| f(m)).cloned().collect() }
    }

    /// Exact division. Returns `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &MultiPoly) -> Option<MultiPoly> {
        if d.is_zero() {
            return None;
        }
        if d.is_constant() {
            return Some(self.scale(&d.terms[0].1.inv()?));
        }
        let (dm, dc) = d.leading().unwrap().clone();
        let dc_inv = dc.inv()?;
        let mut rem = self.clone();
        let mut quot: Vec<(Mono, Scalar)> = Vec::new();
        while let Some((rm, rc)) = rem.leading().cloned() {
            if !mono_divides(&dm, &rm) {
                return None;
            }
            let qm = mono_div(&rm, &dm);
            let qc = &rc * &dc_inv;
            rem = rem.sub(&d.mul_mono(&qm).scale(&qc));
            quot.push((qm, qc));
        }
        Some(MultiPoly::from_terms(quot))
    }

    /// Evaluate completely at scalar values for every variable that occurs.
    pub fn eval(&self, vals: &[(Var, Scalar)]) -> Option<Scalar> {
        let mut acc = Scalar::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for i in 0..NV {
                if m[i] == 0 {
                    continue;
                }
                let val = vals.iter().find(|(v, _)| v.idx() == i)?;
                t = &t * &val.1.pow(m[i] as i64).unwrap();
            }
            acc = &acc + &t;
        }
        Some(acc)
    }

    /// Truncate by a weighted degree: drop terms with Σ w_i·e_i > max.
    pub fn truncate_weighted(&self, weights: &[(Var, u16)], max: u32) -> Self {
        self.filter_terms(|m| weights.iter().map(|(v, w)| *w as u32 * m[v.idx()] as u32).sum::<u32>() <= max)
    }

    /// Normalize so that the leading coefficient is 1; returns `(lc, monic)`.
    pub fn make_monic(&self) -> (Scalar, MultiPoly) {
        let lc = self.leading().map(|t| t.1.clone()).unwrap_or_else(Scalar::one);
        let inv = lc.inv().expect("nonzero leading coefficient");
        (lc, self.scale(&inv))
    }
}

impl MultiPoly {
    /// JSON array of `{monomial, coefficient}` entries in term order.
    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(m, c)| serde_json::json!({ "monomial": mono_to_string(m), "coefficient": c.to_string() }))
            .collect();
        serde_json::Value::Array(entries)
    }
}

pub fn mono_to_string(m: &Mono) -> String {
    let mut parts = Vec::new();
    for v in ALL_VARS {
        let e = m[v.idx()];
        if e == 1 {
            parts.push(v.name().to_string());
        } else if e > 1 {
            parts.push(format!("{}^{}", v.name(), e));
        }
    }
    parts.join("*")
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let ms = mono_to_string(m);
            if ms.is_empty() {
                write!(f, "({})", c)?;
            } else if c.is_one() {
                write!(f, "{}", ms)?;
            } else {
                write!(f, "({})*{}", c, ms)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(v: Var) -> MultiPoly {
        MultiPoly::var(v)
    }

    fn arb_poly() -> impl Strategy<Value = MultiPoly> {
        prop::collection::vec((0u16..3, 0u16..3, 0u16..2, -5i64..6), 0..6).prop_map(|ts| {
            MultiPoly::from_terms(
                ts.into_iter()
                    .map(|(i, j, k, c)| {
                        let mut m = ONE_MONO;
                        m[Var::A.idx()] = i;
                        m[Var::M.idx()] = j;
                        m[Var::Eps.idx()] = k;
                        (m, Scalar::from_int(c))
                    })
                    .collect(),
            )
        })
    }

    #[test]
    fn difference_of_squares_divides() {
        let a = p(Var::A);
        let m = p(Var::M);
        let lhs = a.mul(&a).sub(&m.mul(&m));
        let q = lhs.div_exact(&a.sub(&m)).unwrap();
        assert_eq!(q, a.add(&m));
        assert!(lhs.div_exact(&a.add(&MultiPoly::int(1))).is_none());
    }

    #[test]
    fn substitution_matches_expansion() {
        let a = p(Var::A);
        let f = a.pow(3);
        let g = f.subst(Var::A, &p(Var::M).add(&MultiPoly::int(1)));
        let m = p(Var::M);
        let expect = m.pow(3).add(&m.pow(2).scale(&Scalar::from_int(3))).add(&m.scale(&Scalar::from_int(3))).add(&MultiPoly::one());
        assert_eq!(g, expect);
    }

    proptest! {
        #[test]
        fn ring_axioms(x in arb_poly(), y in arb_poly(), z in arb_poly()) {
            prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
            prop_assert_eq!(x.mul(&y.add(&z)), x.mul(&y).add(&x.mul(&z)));
            prop_assert_eq!(x.add(&y).sub(&y), x.clone());
        }

        #[test]
        fn product_division_roundtrip(x in arb_poly(), y in arb_poly()) {
            prop_assume!(!y.is_zero());
            prop_assert_eq!(x.mul(&y).div_exact(&y), Some(x));
        }

        #[test]
        fn leibniz_rule(x in arb_poly(), y in arb_poly()) {
            let lhs = x.mul(&y).deriv(Var::A);
            let rhs = x.deriv(Var::A).mul(&y).add(&x.mul(&y.deriv(Var::A)));
            prop_assert_eq!(lhs, rhs);
        }
    }
}
