//! Correlation functions on the blow-up of C² at the origin, expressed as a
//! lattice sum of products of two partition functions on the charts of the
//! blow-up.
//!
//! Each lattice term carries a perturbative difference factor. It is derived
//! here with exponential-symbol algebra. The perturbative exponent of a
//! partition function is the image of an exponential sum over
//! `(1−e^{−eτ})(1−e^{−fτ})` under the linear map sending `τ^{n−2}e^{yτ}` to
//! `γ₀^{(n)}(y)`. The chart symbols minus the base symbol reduce to a
//! finite sum `Σ c_j e^{y_jτ}`, whose image is `−Σ c_j log(y_j/Λ)`. The
//! rescaling `Λ → Λe^{c}` adds `c` times the `τ⁰` coefficient of the symbol,
//! because `∂γ₀^{(n)}/∂log Λ` is `x²/2`, `x`, `1`, `0, …` for `n = 0, 1, 2, …`.
//!
//! The computation runs along a line `ε_i = w_i ε` (the slice `ε₂ = −ε₁` by
//! default). Logarithms are combined before the `ε → 0` limit, which is
//! legitimate because every chart combination is regular at `ε = 0`; that
//! regularity is asserted, never assumed.

use crate::error::{CoreError, Result};
use crate::exactalg::{int_unit, lambda_unit, GradedSeries, RationalFn, Ring, Scalar, Var, LU};
use crate::nekrasov::{log_zinst_eps, EpsLin, EpsSeries, FixedPointParams, GaugeParams, LamSeries};
use num_rational::Rational64;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use std::collections::BTreeMap;

/// A t-series with ε-series coefficients.
pub type TSeries = GradedSeries<EpsSeries>;

fn q(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

fn scalar_of(r: Rational64) -> Scalar {
    Scalar::from_frac(*r.numer(), *r.denom())
}

/// A linear form `c_a·a + c_m·m + c₁·ε₁ + c₂·ε₂` with rational coefficients.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct LinForm(pub [Rational64; 4]);

impl LinForm {
    pub fn zero() -> Self {
        LinForm([Rational64::zero(); 4])
    }

    fn unit(i: usize) -> Self {
        let mut c = [Rational64::zero(); 4];
        c[i] = Rational64::from_integer(1);
        LinForm(c)
    }

    pub fn a() -> Self {
        Self::unit(0)
    }
    pub fn m() -> Self {
        Self::unit(1)
    }
    pub fn e1() -> Self {
        Self::unit(2)
    }
    pub fn e2() -> Self {
        Self::unit(3)
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut c = self.0;
        for i in 0..4 {
            c[i] += o.0[i];
        }
        LinForm(c)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(q(-1, 1)))
    }

    pub fn scale(&self, k: Rational64) -> Self {
        LinForm(self.0.map(|x| x * k))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| x.is_zero())
    }

    /// `Some(q)` when `self = q·w`.
    pub fn multiple_of(&self, w: &LinForm) -> Option<Rational64> {
        let i = w.0.iter().position(|x| !x.is_zero())?;
        let r = self.0[i] / w.0[i];
        if (0..4).all(|j| self.0[j] == r * w.0[j]) {
            Some(r)
        } else {
            None
        }
    }

    /// Positive when the first nonzero coefficient in the order
    /// (ε₁, ε₂, a, m) is positive.
    fn is_canonical(&self) -> bool {
        for i in [2, 3, 0, 1] {
            if !self.0[i].is_zero() {
                return self.0[i].is_positive();
            }
        }
        false
    }

    /// The part not involving ε₁, ε₂.
    pub fn constant_part(&self) -> Self {
        LinForm([self.0[0], self.0[1], Rational64::zero(), Rational64::zero()])
    }

    /// As a symbolic rational function in `a, m, e1, e2`.
    pub fn to_ratfn(&self) -> RationalFn {
        let vars = [Var::A, Var::M, Var::E1, Var::E2];
        let mut r = RationalFn::zero();
        for (c, v) in self.0.iter().zip(vars) {
            if !c.is_zero() {
                r = r.add(&RationalFn::var(v).scale(&scalar_of(*c)));
            }
        }
        r
    }

    /// On the line `ε_i = w_i ε`: `c₀ + c₁ε` with `c₀` in `(a, m)`.
    pub fn on_line(&self, line: &Line) -> EpsLin {
        let c0 = self.constant_part().to_ratfn();
        let c1 = line.w1.scale(&scalar_of(self.0[2])).add(&line.w2.scale(&scalar_of(self.0[3])));
        EpsLin::new(c0, c1)
    }
}

/// A finite sum `Σ c_j e^{y_j τ}`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExpSum {
    terms: BTreeMap<LinForm, Rational64>,
}

impl ExpSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (LinForm, Rational64)>) -> Self {
        let mut s = Self::new();
        for (y, c) in terms {
            s.add_term(y, c);
        }
        s
    }

    pub fn add_term(&mut self, y: LinForm, c: Rational64) {
        let v = self.terms.remove(&y).unwrap_or_else(Rational64::zero) + c;
        if !v.is_zero() {
            self.terms.insert(y, v);
        }
    }

    pub fn terms(&self) -> &BTreeMap<LinForm, Rational64> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut s = self.clone();
        for (y, c) in &o.terms {
            s.add_term(*y, *c);
        }
        s
    }

    pub fn scale(&self, k: Rational64) -> Self {
        Self::from_terms(self.terms.iter().map(|(y, c)| (*y, *c * k)))
    }

    /// Multiply by `e^{sτ}`.
    pub fn shift(&self, s: &LinForm) -> Self {
        Self::from_terms(self.terms.iter().map(|(y, c)| (y.add(s), *c)))
    }

    /// Multiply by `1 − e^{−wτ}`.
    pub fn mul_one_minus(&self, w: &LinForm) -> Self {
        self.add(&self.shift(&w.scale(q(-1, 1))).scale(q(-1, 1)))
    }

    /// Exact division by `1 − e^{−wτ}`. Exponents are grouped into cosets
    /// modulo `ℤw`; along a coset the quotient coefficients are tail sums,
    /// and the quotient is finite exactly when each coset sums to zero.
    pub fn div_one_minus(&self, w: &LinForm) -> Result<Self> {
        if w.is_zero() {
            return Err(CoreError::Algebra("division by 1 − e^0".into()));
        }
        let mut left: Vec<(LinForm, Rational64)> = self.terms.iter().map(|(y, c)| (*y, *c)).collect();
        let mut out = Self::new();
        while let Some((base, _)) = left.first().copied() {
            let mut coset: BTreeMap<i64, Rational64> = BTreeMap::new();
            let mut rest = Vec::new();
            for (y, c) in left {
                match y.sub(&base).multiple_of(w).or_else(|| if y == base { Some(Rational64::zero()) } else { None }) {
                    Some(r) if r.is_integer() => {
                        *coset.entry(r.to_integer()).or_insert_with(Rational64::zero) += c;
                    }
                    _ => rest.push((y, c)),
                }
            }
            left = rest;
            let total: Rational64 = coset.values().copied().sum();
            if !total.is_zero() {
                return Err(CoreError::Convention(format!(
                    "exponential sum is not divisible by 1 − e^(−wτ), w = {:?}: coset of {:?} sums to {}",
                    w, base, total
                )));
            }
            let (lo, hi) = (*coset.keys().next().unwrap(), *coset.keys().last().unwrap());
            let mut tail = Rational64::zero();
            for k in (lo..=hi).rev() {
                tail += coset.get(&k).copied().unwrap_or_else(Rational64::zero);
                out.add_term(base.add(&w.scale(Rational64::from_integer(k))), tail);
            }
        }
        Ok(out)
    }

    /// `Σ c_j`, the power of Λ produced by the sum.
    pub fn total(&self) -> Rational64 {
        self.terms.values().copied().sum()
    }

    /// Symbolic Laurent expansion in τ below `τ^prec`.
    pub fn tau_series(&self, prec: i64) -> GradedSeries<RationalFn> {
        let mut s = GradedSeries::new(TAU, int_unit(), Some(prec));
        for (y, c) in &self.terms {
            s = s.add(&exp_series(&y.to_ratfn(), prec).scale(&scalar_of(*c)));
        }
        s
    }
}

const TAU: &str = "tau";

fn exp_series(y: &RationalFn, prec: i64) -> GradedSeries<RationalFn> {
    let mut s = GradedSeries::new(TAU, int_unit(), Some(prec));
    let mut cur = RationalFn::one();
    for k in 0..prec.max(0) {
        s.add_term(k, cur.clone());
        cur = cur.mul(y).scale(&Scalar::from_frac(1, k + 1));
    }
    s
}

/// Coefficients `b_n` of `u/(1 − e^{−u}) = Σ b_n u^n` for `n < count`.
pub fn todd_one(count: i64) -> Result<Vec<Scalar>> {
    // (1 − e^{−u})/u = Σ (−1)^n u^n/(n+1)!
    let mut s = GradedSeries::<Scalar>::new("u", int_unit(), Some(count));
    let mut fact = Scalar::one();
    for n in 0..count {
        fact = &fact * &Scalar::from_int(n + 1);
        let sign = if n % 2 == 0 { 1 } else { -1 };
        s.add_term(n, &Scalar::from_int(sign) * &fact.inv().unwrap());
    }
    let inv = s.inv()?;
    Ok((0..count).map(|n| inv.coeff_or_zero(n)).collect())
}

/// Laurent expansion `Σ_n c_n τ^{n−2}` of `1/((1−e^{−eτ})(1−e^{−fτ}))`,
/// kept below `τ^prec`.
pub fn todd_series(e: &RationalFn, f: &RationalFn, prec: i64) -> Result<GradedSeries<RationalFn>> {
    let count = (prec + 2).max(1);
    let b = todd_one(count)?;
    let one_var = |x: &RationalFn| {
        let mut s = GradedSeries::new(TAU, int_unit(), Some(count));
        let mut xp = RationalFn::one();
        for (n, bn) in b.iter().enumerate() {
            s.add_term(n as i64, xp.scale(bn));
            xp = xp.mul(x);
        }
        s
    };
    let pref = e.mul(f).inv()?;
    Ok(one_var(e).mul(&one_var(f)).mul_coeff(&pref).shift(-2))
}

/// One term `coef·e^{yτ}/((1−e^{−eτ})(1−e^{−fτ}))` of a perturbative symbol.
#[derive(Clone, Debug, PartialEq)]
pub struct PertTerm {
    pub coef: Rational64,
    pub y: LinForm,
    pub den: [LinForm; 2],
}

/// Formal sum of [`PertTerm`]s. The perturbative exponent of a partition
/// function is the image of its symbol under `τ^{n−2}e^{yτ} ↦ γ₀^{(n)}(y)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PertSymbol {
    pub terms: Vec<PertTerm>,
}

/// Arguments of one partition function in the lattice sum: weights `(e, f)`,
/// Coulomb parameter `a`, mass `m`, and the linear form `ℓ` such that the
/// instanton variable is `Λe^{tℓ/γ}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartArgs {
    pub e: LinForm,
    pub f: LinForm,
    pub a: LinForm,
    pub m: LinForm,
    pub lambda_shift: LinForm,
}

impl ChartArgs {
    pub fn base() -> Self {
        ChartArgs { e: LinForm::e1(), f: LinForm::e2(), a: LinForm::a(), m: LinForm::m(), lambda_shift: LinForm::zero() }
    }

    pub fn fixed_point_params(&self, line: &Line, gauge: GaugeParams) -> FixedPointParams {
        FixedPointParams { e1: self.e.on_line(line), e2: self.f.on_line(line), a: self.a.on_line(line), m: self.m.on_line(line), gauge }
    }
}

/// The two chart arguments for lattice coordinate `n` (Coulomb parameter
/// shifted by `nε_i`) and first Chern class `kC`. The mass is shifted by
/// `(k/2 − 1/2)ε_i`.
pub fn blowup_charts(n: Rational64, k: u8) -> [ChartArgs; 2] {
    let mu = q(k as i64, 2) - q(1, 2);
    let (e1, e2) = (LinForm::e1(), LinForm::e2());
    let chart = |e: LinForm, f: LinForm, s: LinForm| ChartArgs {
        e,
        f,
        a: LinForm::a().add(&s.scale(n)),
        m: LinForm::m().add(&s.scale(mu)),
        lambda_shift: s,
    };
    [chart(e1, e2.sub(&e1), e1), chart(e1.sub(&e2), e2, e2)]
}

/// Lattice coordinates `n` with `n ≡ k/2 mod ℤ`.
pub fn lattice_coset(k: u8) -> Rational64 {
    q(k as i64 % 2, 2)
}

impl PertSymbol {
    /// Symbol of `−Σ_roots γ(⟨a,α⟩) + Σ δ(a_α + m)` for U(2) with Coulomb
    /// vector `(−a, a)`.
    pub fn for_chart(c: &ChartArgs, gauge: GaugeParams) -> Self {
        let mut terms = Vec::new();
        let den = [c.e, c.f];
        let two_a = c.a.scale(q(2, 1));
        terms.push(PertTerm { coef: q(-1, 1), y: two_a, den });
        terms.push(PertTerm { coef: q(-1, 1), y: two_a.scale(q(-1, 1)), den });
        if gauge.nf == 1 {
            let mass = c.m.scale(q(crate::nekrasov::conventions::MASS_SIGN, 1));
            let shift = mass.sub(&c.e.add(&c.f).scale(q(1, 2)));
            terms.push(PertTerm { coef: q(1, 1), y: c.a.scale(q(-1, 1)).add(&shift), den });
            terms.push(PertTerm { coef: q(1, 1), y: c.a.add(&shift), den });
        }
        PertSymbol { terms }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(o.terms.iter().cloned());
        PertSymbol { terms }
    }

    pub fn neg(&self) -> Self {
        PertSymbol { terms: self.terms.iter().map(|t| PertTerm { coef: -t.coef, ..t.clone() }).collect() }
    }

    /// Reduce to a finite exponential sum. Fails when the symbol has
    /// genuine poles in τ or log-producing parts.
    pub fn reduce(&self) -> Result<ExpSum> {
        // 1/(1 − e^{−wτ}) = −e^{−w'τ}/(1 − e^{−w'τ}) with w' = −w
        let mut canon: Vec<(Rational64, LinForm, Vec<LinForm>)> = Vec::new();
        for t in &self.terms {
            let (mut c, mut y) = (t.coef, t.y);
            let mut den = Vec::new();
            for w in t.den {
                if w.is_zero() {
                    return Err(CoreError::Algebra("zero weight in perturbative symbol".into()));
                }
                if w.is_canonical() {
                    den.push(w);
                } else {
                    c = -c;
                    y = y.add(&w);
                    den.push(w.scale(q(-1, 1)));
                }
            }
            canon.push((c, y, den));
        }
        // least common multiple of the denominators, with multiplicities
        let mut lcm: Vec<(LinForm, usize)> = Vec::new();
        for (_, _, den) in &canon {
            let mut counts: Vec<(LinForm, usize)> = Vec::new();
            for w in den {
                match counts.iter_mut().find(|(x, _)| x == w) {
                    Some(e) => e.1 += 1,
                    None => counts.push((*w, 1)),
                }
            }
            for (w, k) in counts {
                match lcm.iter_mut().find(|(x, _)| *x == w) {
                    Some(e) => e.1 = e.1.max(k),
                    None => lcm.push((w, k)),
                }
            }
        }
        let mut total = ExpSum::new();
        for (c, y, den) in &canon {
            let mut num = ExpSum::from_terms([(*y, *c)]);
            for (w, k) in &lcm {
                let have = den.iter().filter(|x| *x == w).count();
                for _ in have..*k {
                    num = num.mul_one_minus(w);
                }
            }
            total = total.add(&num);
        }
        for (w, k) in &lcm {
            for _ in 0..*k {
                total = total.div_one_minus(w)?;
            }
        }
        Ok(total)
    }

    /// Symbolic Laurent expansion in τ below `τ^prec`.
    pub fn tau_series(&self, prec: i64) -> Result<GradedSeries<RationalFn>> {
        let mut s = GradedSeries::new(TAU, int_unit(), Some(prec));
        for t in &self.terms {
            let todd = todd_series(&t.den[0].to_ratfn(), &t.den[1].to_ratfn(), prec)?;
            let term = todd.mul(&exp_series(&t.y.to_ratfn(), prec + 2)).scale(&scalar_of(t.coef));
            s = s.add(&term);
        }
        Ok(s)
    }

    /// The `τ⁰` coefficient on a line, as an ε-series below `ε^prec`. This
    /// is `∂/∂log Λ` of the perturbative exponent.
    pub fn tau0_on_line(&self, line: &Line, prec: i64) -> Result<EpsSeries> {
        let mut acc = GradedSeries::new(Var::Eps.name(), int_unit(), Some(prec));
        for t in &self.terms {
            // c_n(e,f) is homogeneous of degree n − 2, so on the line it is
            // c_n(w_e, w_f)·ε^{n−2}
            let we = t.den[0].on_line(line);
            let wf = t.den[1].on_line(line);
            if !we.c0.is_zero() || !wf.c0.is_zero() {
                return Err(CoreError::Algebra("chart weights must be proportional to ε".into()));
            }
            let c = todd_series(&we.c1, &wf.c1, 1)?;
            let y = t.y.on_line(line).as_series(prec + 2);
            let y2 = y.mul(&y).scale(&Scalar::from_frac(1, 2));
            let part = y2
                .mul_coeff(&c.coeff(-2)?)
                .shift(-2)
                .add(&y.mul_coeff(&c.coeff(-1)?).shift(-1))
                .add(&GradedSeries::constant(Var::Eps.name(), int_unit(), c.coeff(0)?, None));
            acc = acc.add(&part.scale(&scalar_of(t.coef)));
        }
        Ok(acc)
    }
}

/// The combined symbol `S(chart₁) + S(chart₂) − S(base)` for lattice
/// coordinate `n`.
pub fn pert_difference_symbol(n: Rational64, k: u8, gauge: GaugeParams) -> PertSymbol {
    let [c1, c2] = blowup_charts(n, k);
    PertSymbol::for_chart(&c1, gauge).add(&PertSymbol::for_chart(&c2, gauge)).add(&PertSymbol::for_chart(&ChartArgs::base(), gauge).neg())
}

/// A line `ε_i = w_i ε` in the (ε₁, ε₂)-plane.
#[derive(Clone, Debug)]
pub struct Line {
    pub w1: RationalFn,
    pub w2: RationalFn,
}

impl Line {
    /// The slice `ε₂ = −ε₁`.
    pub fn slice() -> Self {
        Line { w1: RationalFn::int(1), w2: RationalFn::int(-1) }
    }

    /// The generic line `ε_i = e_i ε` with symbolic direction `(e1, e2)`.
    pub fn symbolic() -> Self {
        Line { w1: RationalFn::var(Var::E1), w2: RationalFn::var(Var::E2) }
    }
}

/// Perturbative difference factor of one lattice term: the factor is
/// `Λ^{lambda_power}·series`.
#[derive(Clone, Debug)]
pub struct PertFactor {
    pub n: Rational64,
    pub exps: ExpSum,
    pub lambda_power: Rational64,
    /// t-series with ε-series coefficients (ε below `ε^{eps_order+1}`).
    pub series: TSeries,
}

/// Sign of the mass term `(r/2 − k)·Σm` in the t-linear prefactor.
///
/// Taken as `−1`: the `ε → 0` limit of the ratio has t-linear part
/// `−(t/γ)(k/r − 1/2)(∂²F₀/∂logΛ∂m − r·m)`, and at `Λ⁰` (where
/// `∂²F₀/∂logΛ∂m = 2m`) that only vanishes when the prefactor carries
/// `(k − r/2)·Σm`. With `+1` the `c₁ = 0` ratio picks up `exp(2mt/3)`.
pub const PREFACTOR_MASS_SIGN: i64 = -1;

fn t_prefactor(k: u8, gauge: GaugeParams, line: &Line, eps_prec: i64) -> EpsSeries {
    // (1/γ)[((r/12)(2r+N_f−2) + (N_f/2)(k²/r))(ε₁+ε₂) ± (r/2 − k)·N_f·m]
    let nf = gauge.nf as i64;
    let g = gauge.gamma();
    let k = k as i64;
    let c_eps = q(2 * (2 + nf), 12) + q(nf * k * k, 4);
    let c_m = q(PREFACTOR_MASS_SIGN * nf * (2 - 2 * k), 2);
    let lin = EpsLin::new(RationalFn::var(Var::M).scale(&scalar_of(c_m)), line.w1.add(&line.w2).scale(&scalar_of(c_eps)));
    lin.as_series(eps_prec).scale(&Scalar::from_frac(1, g))
}

/// `exp` of the t-dependent perturbative terms and the global prefactor,
/// times `Π y_j^{−c_j}`.
pub fn pert_difference_factor(n: Rational64, k: u8, gauge: GaugeParams, line: &Line, t_order: usize, eps_order: i64) -> Result<PertFactor> {
    let eps_prec = eps_order + 1;
    let t_prec = t_order as i64 + 1;
    let exps = pert_difference_symbol(n, k, gauge).reduce()?;
    let mut ymono = GradedSeries::constant(Var::Eps.name(), int_unit(), RationalFn::one(), Some(eps_prec));
    for (y, c) in exps.terms() {
        if !c.is_integer() {
            return Err(CoreError::Convention(format!("non-integral multiplicity {} in the reduced symbol", c)));
        }
        let lin = y.on_line(line);
        if lin.c0.is_zero() {
            return Err(CoreError::Convention(format!("exponent {:?} vanishes at ε = 0", y)));
        }
        ymono = ymono.mul(&lin.as_series(eps_prec).pow(-c.to_integer())?);
    }
    // log-level t¹ coefficient: Σ_charts (ℓ/γ)·[τ⁰]S_chart + prefactor
    let g = gauge.gamma();
    let mut lin_t = t_prefactor(k, gauge, line, eps_prec + 2);
    for c in blowup_charts(n, k) {
        let l = c.lambda_shift.on_line(line);
        let tau0 = PertSymbol::for_chart(&c, gauge).tau0_on_line(line, eps_prec + 2)?;
        let part = tau0.mul(&l.as_series(eps_prec + 3)).scale(&Scalar::from_frac(1, g));
        lin_t = lin_t.add(&part);
    }
    let lin_t = regular_part(&lin_t, eps_prec, "perturbative t-term")?;
    let log = GradedSeries::monomial("t", int_unit(), 1, lin_t, Some(t_prec));
    let series = log.exp()?.mul_coeff(&ymono);
    Ok(PertFactor { n, lambda_power: exps.total(), exps, series })
}

/// Assert that an ε-series has no negative powers and cut it at `ε^prec`.
fn regular_part(s: &EpsSeries, prec: i64, what: &str) -> Result<EpsSeries> {
    if let Some(v) = s.val() {
        if v < 0 {
            return Err(CoreError::Convention(format!("{} has an ε-pole of order {}", what, -v)));
        }
    }
    Ok(s.clone().with_prec(Some(prec)))
}

/// Parameters of a blow-up ratio computation.
#[derive(Clone, Debug)]
pub struct BlowupConfig {
    /// First Chern class `kC`, `k ∈ {0, 1}`.
    pub k: u8,
    pub t_order: usize,
    /// Highest power of Λ kept (inclusive).
    pub lambda_order: i64,
    /// Highest power of ε kept; 0 gives the ε → 0 limit.
    pub eps_order: i64,
    pub line: Line,
    pub gauge: GaugeParams,
}

impl BlowupConfig {
    pub fn slice_limit(k: u8, t_order: usize, lambda_order: i64) -> Self {
        BlowupConfig { k, t_order, lambda_order, eps_order: 0, line: Line::slice(), gauge: GaugeParams { nf: 1 } }
    }
}

/// How the lattice sum was truncated.
#[derive(Clone, Debug)]
pub struct LatticeAudit {
    /// Coefficients `(α, β, γ₀)` of the Λ-valuation `αn² + βn + γ₀` of the
    /// term with coordinate `n`, fitted and then verified on every point used.
    pub valuation_quadratic: [Rational64; 3],
    pub points: Vec<(Rational64, Rational64)>,
    /// First excluded point on each side with its Λ-valuation.
    pub excluded: Vec<(Rational64, Rational64)>,
}

/// Result of [`blowup_ratio_eps`]: Λ-series over t-series over ε-series.
#[derive(Clone, Debug)]
pub struct BlowupRatio {
    pub config: BlowupConfig,
    pub series: GradedSeries<TSeries>,
    pub audit: LatticeAudit,
}

fn solve3(pts: &[(Rational64, Rational64); 3]) -> [Rational64; 3] {
    let [(x0, y0), (x1, y1), (x2, y2)] = *pts;
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let alpha = (d12 - d01) / (x2 - x0);
    let beta = d01 - alpha * (x0 + x1);
    let gamma = y0 - alpha * x0 * x0 - beta * x0;
    [alpha, beta, gamma]
}

/// Lattice points whose term can reach `Λ^{lambda_order}`.
pub fn lattice_points(k: u8, gauge: GaugeParams, lambda_order: i64) -> Result<LatticeAudit> {
    let off = lattice_coset(k);
    let val = |n: Rational64| -> Result<Rational64> { Ok(pert_difference_symbol(n, k, gauge).reduce()?.total()) };
    let sample = [off - 1, off, off + 1];
    let pts = [(sample[0], val(sample[0])?), (sample[1], val(sample[1])?), (sample[2], val(sample[2])?)];
    let quad = solve3(&pts);
    if !quad[0].is_positive() {
        return Err(CoreError::Convention(format!("lattice valuation is not convex: {:?}", quad)));
    }
    let eval = |n: Rational64| quad[0] * n * n + quad[1] * n + quad[2];
    let bound = Rational64::from_integer(lambda_order);
    let mut points = Vec::new();
    let mut excluded = Vec::new();
    // walk outward from the lattice point nearest the vertex
    let vertex = -quad[1] / (quad[0] * 2);
    let start = (vertex - off).round() + off;
    for dir in [1i64, -1] {
        let mut n = if dir == 1 { start } else { start - 1 };
        loop {
            let v = val(n)?;
            if v != eval(n) {
                return Err(CoreError::Convention(format!("Λ-valuation at n = {} is {}, not quadratic", n, v)));
            }
            if v > bound {
                excluded.push((n, v));
                break;
            }
            points.push((n, v));
            n += dir;
        }
    }
    points.sort();
    Ok(LatticeAudit { valuation_quadratic: quad, points, excluded })
}

fn log_chart(args: &ChartArgs, line: &Line, gauge: GaugeParams, max_n: usize, eps_prec: i64) -> Result<LamSeries<EpsSeries>> {
    log_zinst_eps(&args.fixed_point_params(line, gauge), max_n, eps_prec)
}

/// The blow-up ratio `Ẑ_{c₁=kC}/Z` on a line in the ε-plane, as a Λ-series
/// over t-series over ε-series.
pub fn blowup_ratio_eps(cfg: &BlowupConfig) -> Result<BlowupRatio> {
    if cfg.k > 1 {
        return Err(CoreError::Input(format!("c₁ = {}C is not normalized (k must be 0 or 1)", cfg.k)));
    }
    let g = cfg.gauge.gamma();
    let eps_prec = cfg.eps_order + 1;
    let t_prec = cfg.t_order as i64 + 1;
    let lam_prec = LU * cfg.lambda_order + 1;
    let audit = lattice_points(cfg.k, cfg.gauge, cfg.lambda_order)?;

    let max_inst = |shift_units: i64| -> Option<usize> {
        let room = lam_prec - shift_units;
        if room <= 0 {
            None
        } else {
            Some(((room - 1) / (LU * g)) as usize)
        }
    };
    let units = |v: Rational64| -> Result<i64> {
        let u = v * Rational64::from_integer(LU);
        if !u.is_integer() {
            return Err(CoreError::Convention(format!("Λ-power {} is not a multiple of the Λ unit", v)));
        }
        Ok(u.to_integer())
    };
    let mut base_n = 0usize;
    for (_, v) in &audit.points {
        if let Some(m) = max_inst(units(*v)?) {
            base_n = base_n.max(m);
        }
    }
    let base = log_chart(&ChartArgs::base(), &cfg.line, cfg.gauge, base_n, eps_prec)?;

    let terms: Vec<GradedSeries<TSeries>> = audit
        .points
        .par_iter()
        .map(|(n, v)| -> Result<GradedSeries<TSeries>> {
            let shift = units(*v)?;
            let max_n = max_inst(shift).expect("lattice point within bound");
            let pf = pert_difference_factor(*n, cfg.k, cfg.gauge, &cfg.line, cfg.t_order, cfg.eps_order)?;
            let charts = blowup_charts(*n, cfg.k);
            let logs = [
                log_chart(&charts[0], &cfg.line, cfg.gauge, max_n, eps_prec)?,
                log_chart(&charts[1], &cfg.line, cfg.gauge, max_n, eps_prec)?,
            ];
            let inner_prec = lam_prec - shift;
            let mut log = GradedSeries::new("L", lambda_unit(), Some(inner_prec));
            for big_n in 1..=max_n {
                let e = LU * g * big_n as i64;
                let mut ts = TSeries::new("t", int_unit(), Some(t_prec));
                for (chart, l) in charts.iter().zip(&logs) {
                    // Λ^{γN} → Λ^{γN} e^{N t ℓ}
                    let ell = chart.lambda_shift.on_line(&cfg.line);
                    let ln = l.coeff(e)?;
                    let nn = Scalar::from_int(big_n as i64);
                    let mut fac = RationalFn::one();
                    for j in 0..t_prec.min(eps_prec + 3) {
                        ts.add_term(j, ln.shift(j).mul_coeff(&fac));
                        fac = fac.mul(&ell.c1).scale(&nn).scale(&Scalar::from_frac(1, j + 1));
                    }
                }
                ts.add_term(0, base.coeff(e)?.neg());
                let ts = ts.try_map_coeffs(|j, c| regular_part(c, eps_prec, &format!("log-ratio at Λ^{}·t^{}", g * big_n as i64, j)))?;
                log.add_term(e, ts);
            }
            let z = log.exp()?;
            let pseries = GradedSeries::constant("L", lambda_unit(), pf.series, None);
            Ok(z.mul(&pseries).shift(shift))
        })
        .collect::<Result<_>>()?;
    let mut total = GradedSeries::new("L", lambda_unit(), Some(lam_prec));
    for t in terms {
        total = total.add(&t);
    }
    Ok(BlowupRatio { config: cfg.clone(), series: total, audit })
}

/// Reorder a Λ-series of t-series into a t-series of Λ-series.
pub fn transpose<C: Ring>(s: &GradedSeries<GradedSeries<C>>, inner_var: &'static str, inner_unit: Rational64) -> GradedSeries<GradedSeries<C>> {
    let mut inner_prec: Option<i64> = None;
    for c in s.terms().values() {
        if let Some(p) = c.prec() {
            inner_prec = Some(inner_prec.map_or(p, |x: i64| x.min(p)));
        }
    }
    let mut out: BTreeMap<i64, GradedSeries<C>> = BTreeMap::new();
    for (e, c) in s.terms() {
        for (j, x) in c.terms() {
            out.entry(*j).or_insert_with(|| GradedSeries::new(s.var, s.unit, s.prec())).add_term(*e, x.clone());
        }
    }
    GradedSeries::from_terms(inner_var, inner_unit, out, inner_prec)
}

/// The `ε⁰` coefficient of an ε-series, asserting regularity.
pub fn eps_constant(s: &EpsSeries) -> Result<RationalFn> {
    if let Some(v) = s.val() {
        if v < 0 {
            return Err(CoreError::Convention(format!("residual ε-pole of order {}", -v)));
        }
    }
    s.coeff(0)
}

impl BlowupRatio {
    /// t-series over Λ-series over ε-series.
    pub fn by_t(&self) -> GradedSeries<GradedSeries<EpsSeries>> {
        transpose(&self.series, "t", int_unit())
    }

    /// The ε → 0 limit as a t-series over Λ-series with coefficients in
    /// `(a, m)`.
    pub fn limit(&self) -> Result<GradedSeries<GradedSeries<RationalFn>>> {
        self.by_t().try_map_coeffs(|_, lam| lam.try_map_coeffs(|_, c| eps_constant(c)))
    }
}

/// The blow-up ratio on the slice `ε₂ = −ε₁` in the limit `ε → 0`, as a
/// t-series with Λ-series coefficients.
pub fn blowup_ratio(k: u8, t_order: usize, lambda_order: i64) -> Result<GradedSeries<GradedSeries<RationalFn>>> {
    blowup_ratio_eps(&BlowupConfig::slice_limit(k, t_order, lambda_order))?.limit()
}

/// Substitute `ε₂ = −ε₁` and evaluate at `ε₁ = 0`.
pub fn epsilon_limit(f: &RationalFn) -> Result<RationalFn> {
    let eps = RationalFn::var(Var::Eps);
    let on = f.subst_rational(Var::E1, &eps)?.subst_rational(Var::E2, &eps.neg())?;
    let s = crate::exactalg::laurent(&on, Var::Eps, 1)?;
    eps_constant(&s)
}

/// [`epsilon_limit`] applied to every coefficient of a series.
pub fn epsilon_limit_series(s: &GradedSeries<RationalFn>) -> Result<GradedSeries<RationalFn>> {
    s.try_map_coeffs(|_, c| epsilon_limit(c))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gp() -> GaugeParams {
        GaugeParams { nf: 1 }
    }

    #[test]
    fn todd_generating_identity_through_t10() {
        // (1 − e^{−ε₁t})(1 − e^{−ε₂t})·Σ c_n t^{n−2} = 1 + O(t^{11})
        let (e1, e2) = (RationalFn::var(Var::E1), RationalFn::var(Var::E2));
        let todd = todd_series(&e1, &e2, 11).unwrap();
        let one_minus = |w: &RationalFn| exp_series(&w.neg(), 13).neg().add(&GradedSeries::constant(TAU, int_unit(), RationalFn::one(), None));
        let prod = one_minus(&e1).mul(&one_minus(&e2)).mul(&todd);
        let one = GradedSeries::constant(TAU, int_unit(), RationalFn::one(), Some(11));
        assert!(prod.with_prec(Some(11)).eq_within(&one));
        // c_2 = (ε₁² + ε₂² + 3ε₁ε₂)/12ε₁ε₂
        let c2 = e1.mul(&e1).add(&e2.mul(&e2)).add(&e1.mul(&e2).scale(&Scalar::from_int(3))).div(&e1.mul(&e2).scale(&Scalar::from_int(12))).unwrap();
        assert_eq!(todd.coeff(0).unwrap(), c2);
    }

    #[test]
    fn zero_vector_gives_one() {
        let pf = pert_difference_factor(q(0, 1), 0, gp(), &Line::slice(), 0, 0).unwrap();
        assert!(pf.exps.is_zero());
        assert_eq!(pf.lambda_power, q(0, 1));
        let c = eps_constant(&pf.series.coeff(0).unwrap()).unwrap();
        assert_eq!(c, RationalFn::one());
    }

    #[test]
    fn division_roundtrip() {
        let w = LinForm::e1().sub(&LinForm::e2());
        let s = ExpSum::from_terms([(LinForm::a(), q(2, 1)), (LinForm::m().add(&LinForm::e2()), q(-3, 1))]);
        assert_eq!(s.mul_one_minus(&w).div_one_minus(&w).unwrap(), s);
        assert!(s.div_one_minus(&w).is_err());
    }

    /// The reduced symbol and the unreduced symbol have the same Laurent
    /// expansion in τ; the expansion is computed term by term from the Todd
    /// series, independently of the coset division.
    fn check_reduction_by_series(n: Rational64, k: u8) -> ExpSum {
        let sym = pert_difference_symbol(n, k, gp());
        let red = sym.reduce().unwrap();
        let lhs = sym.tau_series(5).unwrap();
        let rhs = red.tau_series(5);
        assert!(lhs.eq_within(&rhs), "n = {}, k = {}", n, k);
        red
    }

    #[test]
    fn reduction_agrees_with_tau_expansion() {
        for (n, k) in [(q(1, 1), 0), (q(-1, 1), 0), (q(2, 1), 0), (q(1, 2), 1), (q(-3, 2), 1)] {
            check_reduction_by_series(n, k);
        }
    }

    #[test]
    fn unit_lattice_vector_by_telescoping() {
        // n = 1, k = 0. With x = e^{−ε₁τ/2}, y = e^{−ε₂τ/2} the three
        // denominators combine in closed form:
        //   e^{2aτ} part:   x⁻⁴/((1−x²)(1−y²/x²)) + y⁻⁴/(..) − 1/(..) = −x⁻²y⁻²
        //   e^{−2aτ} part:  x⁴/(..) + y⁴/(..) − 1/(..) = −(1 + x² + y²)
        //   e^{(a+m)τ}:     cancels identically
        //   e^{(−a+m)τ}:    x⁵y/(..) + xy⁵/(..) − xy/(..) = −xy
        let red = check_reduction_by_series(q(1, 1), 0);
        let (a, m, e1, e2) = (LinForm::a(), LinForm::m(), LinForm::e1(), LinForm::e2());
        let two_a = a.scale(q(2, 1));
        let minus_two_a = two_a.scale(q(-1, 1));
        let half_sum = e1.add(&e2).scale(q(1, 2));
        let expect = ExpSum::from_terms([
            (two_a.add(&e1).add(&e2), q(1, 1)),
            (minus_two_a, q(1, 1)),
            (minus_two_a.sub(&e1), q(1, 1)),
            (minus_two_a.sub(&e2), q(1, 1)),
            (m.sub(&a).sub(&half_sum), q(-1, 1)),
        ]);
        assert_eq!(red, expect, "got {:?}", red);
        assert_eq!(red.total(), q(3, 1));
    }

    #[test]
    fn lattice_valuation_is_three_n_squared() {
        for k in [0u8, 1] {
            let audit = lattice_points(k, gp(), 7).unwrap();
            assert_eq!(audit.valuation_quadratic, [q(3, 1), q(0, 1), q(k as i64, 4)]);
            let ns: Vec<_> = audit.points.iter().map(|p| p.0).collect();
            if k == 0 {
                assert_eq!(ns, vec![q(-1, 1), q(0, 1), q(1, 1)]);
            } else {
                assert_eq!(ns, vec![q(-3, 2), q(-1, 2), q(1, 2), q(3, 2)]);
            }
            assert!(audit.excluded.iter().all(|(_, v)| *v > q(7, 1)));
        }
    }

    fn finite_eps(k: u8, t_order: usize, lambda_order: i64) -> GradedSeries<GradedSeries<EpsSeries>> {
        let cfg = BlowupConfig {
            k,
            t_order,
            lambda_order,
            eps_order: 2,
            // charts see (2, 3) and (−3, 5): no tangent weight degenerates at these sizes
            line: Line { w1: RationalFn::int(2), w2: RationalFn::int(5) },
            gauge: gp(),
        };
        blowup_ratio_eps(&cfg).unwrap().by_t()
    }

    #[test]
    fn untwisted_ratio_vanishes_at_finite_eps() {
        let r = finite_eps(0, 3, 6);
        let t0 = r.coeff(0).unwrap();
        assert_eq!(t0.coeff(0).unwrap().coeff(0).unwrap(), RationalFn::one());
        for (e, c) in t0.terms() {
            let expect_one = *e == 0;
            for (j, x) in c.terms() {
                assert!(x.is_zero() || (expect_one && *j == 0), "t⁰ Λ-unit {} ε^{}: {:?}", e, j, x);
            }
        }
        for j in 1..=2 {
            assert!(r.coeff(j).unwrap().terms().values().all(|c| c.is_zero()), "t^{} survives", j);
        }
    }

    #[test]
    fn twisted_ratio_has_no_constant_term_at_finite_eps() {
        let r = finite_eps(1, 2, 4);
        assert!(r.coeff(0).unwrap().terms().values().all(|c| c.is_zero()));
        assert!(!r.coeff(1).unwrap().is_zero());
    }

    #[test]
    fn leading_twisted_coefficient_is_minus_lambda() {
        let r = blowup_ratio(1, 1, 4).unwrap();
        let t1 = r.coeff(1).unwrap();
        let one = LU;
        assert_eq!(t1.coeff(one).unwrap(), RationalFn::int(-1));
        assert!(t1.coeff(4 * one).unwrap().is_zero());
    }

    #[test]
    fn epsilon_limit_examples() {
        let c = RationalFn::var(Var::A);
        assert_eq!(epsilon_limit(&c).unwrap(), c);
        let e12 = RationalFn::var(Var::E1).mul(&RationalFn::var(Var::E2));
        assert_eq!(epsilon_limit(&e12.div(&e12).unwrap()).unwrap(), RationalFn::one());
        assert!(epsilon_limit(&RationalFn::var(Var::E1).inv().unwrap()).is_err());
    }
}
