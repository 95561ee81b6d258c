//! The uniformizing coordinate `φ` at `a = m` as a series in `ρ = Λ/a`.
//!
//! Under `Λ ↦ Λ^{4/3} a^{−1/3}` a Λ-series term `Λ^{3n} c_n a^{2−3n}` of a
//! mass-dimension-2 quantity becomes `a² ρ^{4n}`; dividing by `Λ²` leaves
//! `c_n ρ^{4n−2}`. Applied to the contact term this gives `φ²`.

use crate::error::{CoreError, Result};
use crate::exactalg::{int_unit, GradedSeries, RationalFn, Scalar, Var, LU};
use crate::nekrasov::GaugeParams;
use crate::prepotential::{expansion, CurveSeed, LSeries};
use serde::Serialize;

pub type RhoSeries = GradedSeries<Scalar>;

#[derive(Clone, Debug, Serialize)]
pub struct PhiCheck {
    pub name: &'static str,
    /// ρ-exponent below which both sides were compared.
    pub compared_below: Option<i64>,
    pub first_difference: Option<i64>,
}

impl PhiCheck {
    fn compare(name: &'static str, lhs: &RhoSeries, rhs: &RhoSeries) -> Self {
        let below = match (lhs.prec(), rhs.prec()) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        };
        PhiCheck { name, compared_below: below, first_difference: lhs.first_difference(rhs) }
    }

    pub fn holds(&self) -> bool {
        self.first_difference.is_none()
    }
}

#[derive(Clone, Debug)]
pub struct PhiSeries {
    /// `φ` with leading term `ρ/√2`.
    pub phi: RhoSeries,
    pub phi_sq: RhoSeries,
    /// `u/Λ²` and `(π/ω)²/Λ²` in the same variable.
    pub u: RhoSeries,
    pub p: RhoSeries,
}

fn rho_const(c: Scalar) -> RhoSeries {
    GradedSeries::constant("rho", int_unit(), c, None)
}

/// Rewrite a Λ-series of mass dimension 2 at `a = m` as a series in `ρ`.
pub fn to_rho(s: &LSeries) -> Result<RhoSeries> {
    let a = RationalFn::var(Var::A);
    let mut terms = Vec::new();
    for (e, c) in s.terms() {
        if e.rem_euclid(3 * LU) != 0 {
            return Err(CoreError::Algebra(format!("Λ-exponent {}/{} is not a multiple of 3", e, LU)));
        }
        let n = e / (3 * LU);
        let lead = c.eval(&[(Var::A, Scalar::one())])?;
        let expected = a.pow(2 - 3 * n)?.scale(&lead);
        if !c.sub(&expected).is_zero() {
            return Err(CoreError::Algebra(format!("coefficient of Λ^{} is not homogeneous of degree {} in a", 3 * n, 2 - 3 * n)));
        }
        terms.push((4 * n - 2, lead));
    }
    let prec = s.prec().map(|p| 4 * (p + 3 * LU - 1).div_euclid(3 * LU) - 2);
    Ok(GradedSeries::from_terms("rho", int_unit(), terms, prec))
}

/// `φ(ρ)` through instanton number `max_n`, together with `u` and `P`.
pub fn phi_of_a(max_n: usize) -> Result<PhiSeries> {
    let gauge = GaugeParams::new(1)?;
    let e = expansion(gauge, max_n, 0)?;
    let seed = CurveSeed::new(&e, gauge).specialize_am()?;
    let phi_sq = to_rho(&seed.t)?;
    let root = Scalar::sqrt2().inv().expect("√2 is invertible");
    let phi = phi_sq.sqrt(&root)?;
    let u = to_rho(&seed.u)?;
    let p = to_rho(&seed.pi_over_omega.mul(&seed.pi_over_omega))?;
    Ok(PhiSeries { phi, phi_sq, u, p })
}

impl PhiSeries {
    /// The relations satisfied by `φ`, each compared as ρ-series.
    pub fn checks(&self) -> Result<Vec<PhiCheck>> {
        let sc = |n: i64, d: i64| Scalar::from_frac(n, d);
        let rho = GradedSeries::monomial("rho", int_unit(), 1, Scalar::one(), None);
        let phi2 = &self.phi_sq;
        let phi4 = phi2.mul(phi2);
        let one = rho_const(Scalar::one());
        let mut out = Vec::new();

        let lead = GradedSeries::monomial("rho", int_unit(), 1, Scalar::sqrt2().inv().unwrap(), Some(2));
        out.push(PhiCheck::compare("phi = rho/sqrt2 + O(rho^2)", &self.phi.clone().with_prec(Some(2)), &lead));

        out.push(PhiCheck::compare("phi*phi = T/L^2", &self.phi.mul(&self.phi), phi2));

        let lhs = rho.mul(&rho).scale(&sc(1, 4));
        let rhs = phi2.mul(&one.sub(&phi4)).scale(&sc(1, 2));
        out.push(PhiCheck::compare("rho^2/4 = phi^2 (1 - phi^4)/2", &lhs, &rhs));

        let dlog = self.phi.log_deriv().div(&self.phi)?;
        let lhs = dlog.mul(&one.sub(&phi4.scale(&sc(3, 1))));
        out.push(PhiCheck::compare("(rho/phi) dphi/drho (1 - 3 phi^4) = 1 - phi^4", &lhs, &one.sub(&phi4)));

        let inv = phi2.inv()?;
        let u = phi2.scale(&sc(3, 1)).add(&inv).scale(&sc(1, 2));
        out.push(PhiCheck::compare("u/L^2 = (3 phi^2 + phi^-2)/2", &self.u, &u));
        let p = phi2.scale(&sc(3, 1)).sub(&inv).scale(&sc(1, 2));
        out.push(PhiCheck::compare("P/L^2 = (3 phi^2 - phi^-2)/2", &self.p, &p));
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relations_hold_through_three_instantons() {
        let s = phi_of_a(3).unwrap();
        for c in s.checks().unwrap() {
            assert!(c.holds(), "{:?}", c);
            assert!(c.compared_below.unwrap() >= 2, "{:?}", c);
        }
        // ρ²/4 is compared through ρ⁸ or beyond
        let c = &s.checks().unwrap()[2];
        assert!(c.compared_below.unwrap() > 8, "{:?}", c);
    }

    #[test]
    fn phi_squared_leading_terms() {
        // Independent expansion: ρ²/4 = φ²(1−φ⁴)/2 solved by iteration,
        // φ² = ρ²/2 + ρ⁶/8 + 3ρ¹⁰/32 + ...
        let s = phi_of_a(3).unwrap();
        let q = |n: i64, d: i64| Scalar::from_frac(n, d);
        assert_eq!(s.phi_sq.coeff(2).unwrap(), q(1, 2));
        assert_eq!(s.phi_sq.coeff(6).unwrap(), q(1, 8));
        assert_eq!(s.phi_sq.coeff(10).unwrap(), q(3, 32));
    }
}
