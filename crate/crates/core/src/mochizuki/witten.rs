//! From residues to Donaldson series, and the simple-type conditions on the
//! Seiberg-Witten data that make the residue at `v = 1/3` vanish.

use super::differential::{total_form, RationalForm};
use super::surface::{sign, SurfaceData, XiData};
use super::vrat::Pole;
use crate::error::{CoreError, Result};
use crate::exactalg::{MultiPoly, Scalar, Var};
use serde::Serialize;

/// `(α²)` has weight 2 and each `y_k = (e_k, α)` weight 1.
fn alpha_weights(surf: &SurfaceData) -> Vec<(Var, u16)> {
    let mut w = vec![(Var::Al2, 2)];
    w.extend((0..surf.alpha_basis.len()).map(|k| (surf.alpha_var(k), 1)));
    w
}

fn exp_truncated(arg: &MultiPoly, weights: &[(Var, u16)], degree: u32) -> MultiPoly {
    let mut out = MultiPoly::one();
    let mut term = MultiPoly::one();
    for k in 1..=degree as i64 {
        term = term.mul(arg).truncate_weighted(weights, degree).scale(&Scalar::from_frac(1, k));
        if term.is_zero() {
            break;
        }
        out = out.add(&term);
    }
    out
}

/// `(c, α)` as a linear form in the `y_k`.
fn pairing(surf: &SurfaceData, coords: &[i64]) -> MultiPoly {
    coords
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0)
        .fold(MultiPoly::zero(), |acc, (k, c)| acc.add(&MultiPoly::var(surf.alpha_var(k)).scale(&Scalar::from_int(*c))))
}

fn pow2(n: i64) -> Scalar {
    Scalar::sqrt2_pow(2 * n)
}

/// `2^{K²−χ+2} (−1)^χ e^{(α²)/2} Σ_c SW(c) (−1)^{(ξ,ξ+c)/2} e^{(c,α)}`
/// through α-weight `degree`.
pub fn witten_series(surf: &SurfaceData, xi: &XiData, degree: u32) -> MultiPoly {
    let w = alpha_weights(surf);
    let mut sum = MultiPoly::zero();
    for (i, c) in surf.classes.iter().enumerate() {
        if c.sw == 0 {
            continue;
        }
        let s = c.sw * sign((xi.sq + xi.class_dot[i]) / 2);
        sum = sum.add(&exp_truncated(&pairing(surf, &c.alpha), &w, degree).scale(&Scalar::from_int(s)));
    }
    let gauss = exp_truncated(&MultiPoly::var(Var::Al2).scale(&Scalar::from_frac(1, 2)), &w, degree);
    let pre = &pow2(surf.k_sq - surf.chi_h + 2) * &Scalar::from_int(sign(surf.chi_h));
    gauss.mul(&sum).truncate_weighted(&w, degree).scale(&pre)
}

#[derive(Clone, Debug)]
pub struct ResidueOneReport {
    /// `Res_{v=1}` of the total form, a polynomial in `x, z, (α²), y_k`.
    pub residue: MultiPoly,
    /// `2·(−1)^{(ξ,ξ+K)/2}·[R + ½∂_x R]_{x=0, z=1}` through α-weight
    /// `degree − 2`.
    pub series: MultiPoly,
    /// `witten_series` through the same weight.
    pub witten: MultiPoly,
    /// α-weight through which `series` is exact.
    pub alpha_degree: u32,
}

impl ResidueOneReport {
    /// The residue at 1 reproduces the Witten form with the opposite sign.
    /// Since the residues at `1/3` and `∞` vanish, the Donaldson series
    /// (the residue at 0) is `−series`, which is the Witten form itself.
    pub fn matches_witten_with_opposite_sign(&self) -> bool {
        self.series.add(&self.witten).is_zero()
    }
}

/// Assemble the Donaldson series from the residue at `v = 1` of the total
/// form computed through `(x, z)`-weight `degree`.
pub fn donaldson_from_residue1(surf: &SurfaceData, xi: &XiData, degree: u32) -> Result<ResidueOneReport> {
    if degree < 2 {
        return Err(CoreError::Input("the (x, z)-degree must be at least 2".into()));
    }
    let t = total_form(surf, xi, degree)?;
    let r1 = t.residue(Pole::One);
    assemble_residue_one(surf, xi, &r1, degree)
}

pub fn assemble_residue_one(surf: &SurfaceData, xi: &XiData, r1: &MultiPoly, degree: u32) -> Result<ResidueOneReport> {
    if r1.involves(Var::W) {
        return Err(CoreError::identity("residue at 1 is free of (xi-K, alpha)", "a W-term survives"));
    }
    let xz = [(Var::X, 2), (Var::Z, 1)];
    // simple type in the point class: (∂_x² − 4) R = 0 below weight degree − 3
    if degree >= 4 {
        let km = r1.deriv(Var::X).deriv(Var::X).sub(&r1.scale(&Scalar::from_int(4))).truncate_weighted(&xz, degree - 4);
        if !km.is_zero() {
            return Err(CoreError::identity("(d/dx)^2 R1 = 4 R1", format!("{} terms survive", km.len())));
        }
    }
    let r0 = r1.coeff_of_power(Var::X, 0);
    let r1x = r1.coeff_of_power(Var::X, 1);
    let d = r0.add(&r1x.scale(&Scalar::from_frac(1, 2))).subst(Var::Z, &MultiPoly::one());
    let alpha_degree = degree - 2;
    let w = alpha_weights(surf);
    let pre = Scalar::from_int(2 * surf.orientation_sign(xi));
    let series = d.truncate_weighted(&w, alpha_degree).scale(&pre);
    let witten = witten_series(surf, xi, alpha_degree);
    Ok(ResidueOneReport { residue: r1.clone(), series, witten, alpha_degree })
}

/// `𝒮𝒲(α) = Σ_c (−1)^{(K,K+c)/2} SW(c) e^{(c,α)}` through weight `degree`.
pub fn sw_series(surf: &SurfaceData, degree: u32) -> MultiPoly {
    let w = alpha_weights(surf);
    let mut out = MultiPoly::zero();
    for c in &surf.classes {
        let s = sign((surf.k_sq + c.k_dot) / 2) * c.sw;
        if s != 0 {
            out = out.add(&exp_truncated(&pairing(surf, &c.alpha), &w, degree).scale(&Scalar::from_int(s)));
        }
    }
    out
}

fn weighted_degree(m: &crate::exactalg::poly::Mono, weights: &[(Var, u16)]) -> u32 {
    weights.iter().map(|(v, w)| m[v.idx()] as u32 * *w as u32).sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct ScstReport {
    pub chi_h: i64,
    pub k_sq: i64,
    /// Highest moment order tested: `χ − K² − 4` (negative when vacuous).
    pub max_moment: i64,
    /// Orders `n` with `Σ (−1)^{(K,K+c)/2} SW(c) (c,α)^n ≠ 0`.
    pub nonzero_moments: Vec<i64>,
    /// Lowest weight of a nonzero term of `𝒮𝒲`, `None` if zero through
    /// `searched_through`.
    pub order: Option<u32>,
    pub searched_through: u32,
    /// `𝒮𝒲(−α) = (−1)^{χ−K²} 𝒮𝒲(α)` through `searched_through`.
    pub parity_holds: bool,
    /// `K² ≥ χ − 3`: nothing to test.
    pub vacuous: bool,
}

impl ScstReport {
    /// Superconformal simple type: all tested moments vanish.
    pub fn holds(&self) -> bool {
        self.nonzero_moments.is_empty()
    }

    /// The moment condition is the statement `ord 𝒮𝒲 ≥ χ − K² − 3`.
    pub fn order_consistent(&self) -> bool {
        let bound = self.chi_h - self.k_sq - 3;
        match self.order {
            Some(o) => (o as i64 >= bound) == self.holds(),
            None => self.holds(),
        }
    }
}

pub fn scst_check(surf: &SurfaceData, degree: u32) -> ScstReport {
    let max_moment = surf.chi_h - surf.k_sq - 4;
    let mut nonzero_moments = Vec::new();
    for n in 0..=max_moment {
        let mut m = MultiPoly::zero();
        for c in &surf.classes {
            let s = sign((surf.k_sq + c.k_dot) / 2) * c.sw;
            if s != 0 {
                m = m.add(&pairing(surf, &c.alpha).pow(n as u32).scale(&Scalar::from_int(s)));
            }
        }
        if !m.is_zero() {
            nonzero_moments.push(n);
        }
    }
    let searched_through = degree.max((surf.chi_h - surf.k_sq).max(0) as u32);
    let w = alpha_weights(surf);
    let sw = sw_series(surf, searched_through);
    let order = sw.terms().iter().map(|(m, _)| weighted_degree(m, &w)).min();
    let parity = (surf.chi_h - surf.k_sq).rem_euclid(2) as u32;
    let parity_holds = sw.terms().iter().all(|(m, _)| weighted_degree(m, &w) % 2 == parity);
    ScstReport {
        chi_h: surf.chi_h,
        k_sq: surf.k_sq,
        max_moment,
        nonzero_moments,
        order,
        searched_through,
        parity_holds,
        vacuous: surf.k_sq >= surf.chi_h - 3,
    }
}

/// Check `𝒮𝒲_X̂ = −2 𝒮𝒲_X sinh(y_C)` for a blow-up `X̂` whose α-basis is
/// that of `X` followed by the exceptional class, `y_C` being its pairing
/// indeterminate.
pub fn blowup_sw_relation(x: &SurfaceData, xhat: &SurfaceData, degree: u32) -> Result<bool> {
    let r = x.alpha_basis.len();
    if xhat.alpha_basis.len() != r + 1 || xhat.alpha_basis[..r] != x.alpha_basis[..] {
        return Err(CoreError::Input(format!(
            "the α-basis of {} must be that of {} followed by the exceptional class",
            xhat.name, x.name
        )));
    }
    let w = alpha_weights(xhat);
    let yc = MultiPoly::var(xhat.alpha_var(r));
    let sinh = exp_truncated(&yc, &w, degree).sub(&exp_truncated(&yc.neg(), &w, degree)).scale(&Scalar::from_frac(1, 2));
    let rhs = sw_series(x, degree).mul(&sinh).truncate_weighted(&w, degree).scale(&Scalar::from_int(-2));
    Ok(sw_series(xhat, degree) == rhs)
}

#[derive(Clone, Debug)]
pub struct RegularityReport {
    pub residue: MultiPoly,
    /// Number of monomials whose coefficient has a pole at `v = 1/3`.
    pub singular_terms: usize,
}

impl RegularityReport {
    pub fn regular(&self) -> bool {
        self.singular_terms == 0 && self.residue.is_zero()
    }
}

pub fn regularity_of(form: &RationalForm) -> RegularityReport {
    RegularityReport { residue: form.residue(Pole::Third), singular_terms: form.singular_at(Pole::Third).len() }
}

/// Regularity of the total form at `v = 1/3`.
pub fn scst_regularity(surf: &SurfaceData, xi: &XiData, degree: u32) -> Result<RegularityReport> {
    Ok(regularity_of(&total_form(surf, xi, degree)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mochizuki::surface::{BasicClass, XiData};

    fn xi0(n: usize) -> XiData {
        XiData { label: "0".into(), sq: 0, k_dot: 0, class_dot: vec![0; n] }
    }

    fn elliptic(d: i64) -> SurfaceData {
        let classes = (0..=d)
            .map(|p| BasicClass {
                label: format!("{}f", 2 * p - d),
                sw: sign(p) * binom(d, p),
                alpha: vec![2 * p - d],
                k_dot: 0,
                sq: 0,
            })
            .collect::<Vec<_>>();
        let n = classes.len();
        SurfaceData { schema: 1, name: format!("E({})", d + 2), chi_h: d + 2, k_sq: 0, alpha_basis: vec!["f".into()], classes, xi: vec![xi0(n)], blowup_of: None }
    }

    fn binom(n: i64, k: i64) -> i64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    /// Taylor coefficients of `sinh^d(y)` through `y^deg`, computed from
    /// `sinh^d = 2^{−d} Σ_p (−1)^{d−p} binom(d,p) e^{(2p−d)y}`.
    fn sinh_pow_oracle(d: i64, deg: u32) -> Vec<Scalar> {
        let mut out = Vec::new();
        for n in 0..=deg as i64 {
            let mut acc = Scalar::zero();
            for p in 0..=d {
                let e = Scalar::from_int(2 * p - d).pow(n).unwrap();
                acc = &acc + &(&e * &Scalar::from_int(sign(d - p) * binom(d, p)));
            }
            let fact: i64 = (1..=n).product();
            out.push(&acc * &Scalar::from_frac(1, fact * (1i64 << d)));
        }
        out
    }

    #[test]
    fn witten_series_elliptic_is_gaussian_times_sinh_power() {
        for d in [2, 3, 4] {
            let e = elliptic(d);
            e.validate().unwrap();
            let deg = 8;
            let got = witten_series(&e, &e.xi[0], deg);
            let sinh = sinh_pow_oracle(d, deg);
            let mut want = MultiPoly::zero();
            for (n, c) in sinh.iter().enumerate() {
                for j in 0..=(deg as usize - n) / 2 {
                    let coeff = &(c.clone()) * &Scalar::from_frac(1, (1i64 << j) * (1..=j as i64).product::<i64>());
                    want = want.add(&MultiPoly::monomial(coeff, &[(Var::Y0, n as u16), (Var::Al2, j as u16)]));
                }
            }
            assert_eq!(got, want, "d = {}", d);
        }
    }

    #[test]
    fn residue_one_reproduces_witten_for_elliptic() {
        let e = elliptic(2);
        let r = donaldson_from_residue1(&e, &e.xi[0], 8).unwrap();
        assert!(r.matches_witten_with_opposite_sign());
        assert!(!r.witten.is_zero());
    }

    #[test]
    fn scst_moments() {
        // E(3), E(4): K² = 0 < χ − 3, moments up to χ − 4 vanish
        for d in [2, 3, 4] {
            let e = elliptic(d);
            let r = scst_check(&e, 6);
            assert!(r.holds() && r.parity_holds && r.order_consistent(), "{:?}", r);
            assert_eq!(r.order, Some(d as u32));
        }
        // SW supported on ±3f with χ = 5: the first moment is −6y
        let mut a = elliptic(3);
        a.classes = vec![
            BasicClass { label: "3f".into(), sw: -1, alpha: vec![3], k_dot: 0, sq: 0 },
            BasicClass { label: "-3f".into(), sw: 1, alpha: vec![-3], k_dot: 0, sq: 0 },
        ];
        a.xi = vec![xi0(2)];
        a.validate().unwrap();
        let r = scst_check(&a, 6);
        assert!(!r.holds());
        assert_eq!(r.nonzero_moments, vec![1]);
        assert!(r.order_consistent());
    }

    #[test]
    fn regularity_at_one_third() {
        let e = elliptic(3);
        assert!(scst_regularity(&e, &e.xi[0], 8).unwrap().regular());
        let mut a = e.clone();
        a.classes = vec![
            BasicClass { label: "3f".into(), sw: -1, alpha: vec![3], k_dot: 0, sq: 0 },
            BasicClass { label: "-3f".into(), sw: 1, alpha: vec![-3], k_dot: 0, sq: 0 },
        ];
        a.xi = vec![xi0(2)];
        let r = scst_regularity(&a, &a.xi[0], 8).unwrap();
        assert!(!r.residue.is_zero());
    }
}
