//! Residues of rational functions of one distinguished variable.

use super::poly::{MultiPoly, Var};
use super::ratfn::RationalFn;
use super::scalar::Scalar;
use super::series::laurent;
use crate::error::Result;

/// A point of the projective line in the distinguished variable.
#[derive(Clone, Debug, PartialEq)]
pub enum Point {
    Finite(Scalar),
    Infinity,
}

/// Residue of `f(v) dv` at a point, computed from the Laurent expansion in
/// the local parameter `w` (`v = c + w`, or `v = 1/w` at infinity).
pub fn residue_at(f: &RationalFn, v: Var, w: Var, at: &Point) -> Result<RationalFn> {
    match at {
        Point::Finite(c) => {
            let shifted = f.subst(v, &MultiPoly::var(w).add(&MultiPoly::constant(c.clone())))?;
            laurent(&shifted, w, 0)?.residue()
        }
        Point::Infinity => {
            let winv = RationalFn::one().div(&RationalFn::var(w))?;
            let g = f.subst_rational(v, &winv)?;
            let h = g.div(&RationalFn::var(w).pow(2)?)?;
            Ok(laurent(&h, w, 0)?.residue()?.neg())
        }
    }
}

/// Residues at every listed finite point and at infinity (last entry).
pub fn rational_residues(f: &RationalFn, v: Var, w: Var, points: &[Scalar]) -> Result<Vec<(Point, RationalFn)>> {
    let mut out = Vec::new();
    for c in points {
        let p = Point::Finite(c.clone());
        let r = residue_at(f, v, w, &p)?;
        out.push((p, r));
    }
    let r = residue_at(f, v, w, &Point::Infinity)?;
    out.push((Point::Infinity, r));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v() -> RationalFn {
        RationalFn::var(Var::V)
    }

    #[test]
    fn one_over_v() {
        let f = RationalFn::one().div(&v()).unwrap();
        let r = rational_residues(&f, Var::V, Var::W, &[Scalar::zero()]).unwrap();
        assert_eq!(r[0].1, RationalFn::one());
        assert_eq!(r[1].1, RationalFn::int(-1));
    }

    #[test]
    fn two_simple_poles() {
        let f = RationalFn::one().div(&v().mul(&v().sub(&RationalFn::int(1)))).unwrap();
        let r = rational_residues(&f, Var::V, Var::W, &[Scalar::zero(), Scalar::one()]).unwrap();
        assert_eq!(r[0].1, RationalFn::int(-1));
        assert_eq!(r[1].1, RationalFn::int(1));
        assert!(r[2].1.is_zero());
    }

    #[test]
    fn polynomial_has_no_residues() {
        let f = v().pow(3).unwrap().add(&RationalFn::var(Var::X));
        let r = rational_residues(&f, Var::V, Var::W, &[Scalar::zero(), Scalar::one()]).unwrap();
        assert!(r.iter().all(|(_, x)| x.is_zero()));
    }
}
