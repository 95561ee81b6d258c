//! The ten acceptance criteria, each evaluated exactly and reported on one
//! line. Run with `--nocapture` to see the lines.

use instanton_core::exactalg::{MultiPoly, Scalar, Var, LU};
use instanton_core::mochizuki::differential::class_differential;
use instanton_core::mochizuki::phi::phi_of_a;
use instanton_core::mochizuki::residue_report;
use instanton_core::mochizuki::surface::{sign, SurfaceData};
use instanton_core::mochizuki::witten::{blowup_sw_relation, donaldson_from_residue1, scst_check, scst_regularity, witten_series};
use instanton_core::nekrasov::{symmetry_checks, zinst, FixedPointParams, GaugeParams};
use instanton_core::prepotential::{am_identities, expansion, IdentityCheck};
use instanton_core::swcurve::{verify_am_curve_identities, verify_blowup_coefficients, verify_blowup_sigma, verify_vanishing};
use instanton_core::toricbridge::{verify_bridge_with, BridgeParams};
use num_rational::Rational64;
use std::path::Path;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn surface(name: &str) -> Result<SurfaceData, String> {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/surfaces").join(format!("{}.json", name));
    SurfaceData::load(&p).map_err(err)
}

const SCST: [&str; 6] = ["k3", "quintic", "elliptic_e4", "elliptic_e5", "elliptic_e6", "elliptic_e4_blowup"];
const ALL: [&str; 7] = ["k3", "quintic", "elliptic_e4", "elliptic_e5", "elliptic_e6", "elliptic_e4_blowup", "artificial_non_scst"];

fn identities_hold(checks: &[IdentityCheck], through: Option<i64>) -> Result<(), String> {
    for c in checks {
        ensure!(c.holds(), "{} differs at Λ-unit {:?}", c.name, c.first_difference);
        if let Some(n) = through {
            ensure!(c.lambda_order().is_some_and(|k| k >= n), "{} compared only through Λ^{:?}", c.name, c.lambda_order());
        }
    }
    Ok(())
}

fn c1_blowup_coefficients() -> Outcome {
    let checks = verify_blowup_coefficients(9).map_err(err)?;
    ensure!(checks.len() == 4, "expected t, t^3, t^5, t^7, got {} checks", checks.len());
    identities_hold(&checks, Some(9))?;
    Ok("t, t^3, t^5, t^7 through L^9".into())
}

fn c2_vanishing() -> Outcome {
    let checks = verify_vanishing(8, 9).map_err(err)?;
    identities_hold(&checks, Some(9))?;
    Ok(format!("{} coefficient checks, ratios through t^8 and L^9", checks.len()))
}

fn c3_h_and_symmetries() -> Outcome {
    let gauge = GaugeParams::new(1).map_err(err)?;
    let e = expansion(gauge, 3, 2).map_err(err)?;
    ensure!(e.h.terms().is_empty(), "H^inst has terms at {:?}", e.h.terms().keys().collect::<Vec<_>>());
    ensure!(e.h.prec().is_none_or(|p| p > 9 * LU), "H known only below Λ-unit {:?}", e.h.prec());
    let z = zinst(&FixedPointParams::symbolic(gauge), 3).map_err(err)?;
    for c in symmetry_checks(&z).map_err(err)? {
        ensure!(c.holds(), "{} fails at Λ-unit {:?}", c.name, c.first_difference);
        ensure!(c.compared_below.is_some_and(|p| p > 9 * LU), "{} compared only below {:?}", c.name, c.compared_below);
    }
    Ok("H = 0 through L^9; e1<->e2 and a->-a through n = 3".into())
}

fn c4_sigma() -> Outcome {
    let r = verify_blowup_sigma(9, 9).map_err(err)?;
    ensure!(r.holds(), "first mismatch (t^j, Λ-unit) = {:?}", r.first_mismatch);
    ensure!(r.compared > 0, "nothing compared");
    Ok(format!("{} coefficients through t^9 and L^9", r.compared))
}

fn c5_am_suite() -> Outcome {
    let gauge = GaugeParams::new(1).map_err(err)?;
    let e = expansion(gauge, 4, 0).map_err(err)?;
    let am = am_identities(&e, gauge).map_err(err)?;
    identities_hold(&am, None)?;
    let curve = verify_am_curve_identities(4).map_err(err)?;
    identities_hold(&curve, None)?;
    let phi = phi_of_a(4).map_err(err)?.checks().map_err(err)?;
    for c in &phi {
        ensure!(c.holds(), "{} differs at ρ^{:?}", c.name, c.first_difference);
    }
    // every identity beyond the leading-term one reaches past the first instanton
    for c in am.iter().chain(&curve) {
        if !c.name.starts_with("contact term") {
            ensure!(c.lambda_order().is_some_and(|k| k >= 6), "{} only through Λ^{:?}", c.name, c.lambda_order());
        }
    }
    Ok(format!("{} identities from instanton number 4", am.len() + curve.len() + phi.len()))
}

/// Criterion 6, inspected directly on the projected forms rather than
/// through the rationalization error path.
fn c6_parity_rationality() -> Outcome {
    let degree = 8;
    let mut forms = 0;
    for name in ["k3", "quintic", "elliptic_e4", "elliptic_e5", "elliptic_e6"] {
        let s = surface(name)?;
        for xi in &s.xi {
            let p = s.dim_mod4(xi);
            for i in 0..s.classes.len() {
                let c = s.view(xi, i);
                let plus = class_differential(&s, xi, &c, degree).map_err(err)?.parity_project(p);
                let minus = class_differential(&s, xi, &c.negated(), degree).map_err(err)?.parity_project(p);
                let sum = plus.add(&minus.scale(&Scalar::from_int(sign(s.chi_h)))).map_err(err)?;
                ensure!(!sum.terms.is_empty(), "{} ξ={} class {}: symmetrized form vanishes identically", name, xi.label, i);
                for (m, e) in &sum.terms {
                    let weight = 2 * m[Var::X.idx()] as i64 + m[Var::Z.idx()] as i64;
                    let exp = sum.phi_exp - weight;
                    ensure!(exp.rem_euclid(4) == 0, "{} ξ={} class {}: φ-exponent {}", name, xi.label, i, exp);
                    for j in 1..4 {
                        ensure!(e.0[j].is_zero(), "{} ξ={} class {}: root component {} survives", name, xi.label, i, j);
                    }
                }
                forms += 1;
            }
        }
    }
    Ok(format!("{} symmetrized forms at (x,z)-degree {}", forms, degree))
}

fn c7_residue_theorem() -> Outcome {
    let mut n = 0;
    for name in ALL {
        let s = surface(name)?;
        for xi in &s.xi {
            let r = residue_report(&s, xi, 8).map_err(err)?;
            ensure!(r.residue_theorem_holds(), "{} ξ={}: failing classes {:?}", name, xi.label, r.residue_theorem_failures);
            n += r.monomials;
        }
    }
    Ok(format!("{} monomials over all shipped data", n))
}

/// `pre · e^{(α²)/2} · Σ_k c_k e^{k·y₀}` through α-weight `degree`, built
/// coefficient by coefficient: `(α²)^j y₀^n` gets `pre · 2^{−j}/j! · Σ_k c_k k^n/n!`.
fn closed_form(pre: Rational64, exps: &[(Rational64, i64)], degree: u32) -> MultiPoly {
    let fact = |n: u32| (1..=n as i64).product::<i64>();
    let mut out = MultiPoly::zero();
    for j in 0..=degree / 2 {
        for n in 0..=degree - 2 * j {
            let inner: Rational64 = exps.iter().map(|(c, k)| c * Rational64::from(k.pow(n))).sum();
            let c = pre * inner / Rational64::from(fact(n) * fact(j) * (1i64 << j));
            if c != Rational64::from(0) {
                let mono = MultiPoly::var(Var::Al2).pow(j).mul(&MultiPoly::var(Var::Y0).pow(n));
                out = out.add(&mono.scale(&Scalar::from_frac(*c.numer(), *c.denom())));
            }
        }
    }
    out
}

fn binom(n: i64, k: i64) -> i64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn c8_witten() -> Outcome {
    let q = |n: i64, d: i64| Rational64::new(n, d);
    let degree = 8;
    let alpha = degree - 2;
    // known Donaldson series: (surface, ξ label, closed form)
    let mut cases = vec![
        ("k3", "0", closed_form(q(1, 1), &[(q(1, 1), 0)], alpha)),
        ("k3", "e", closed_form(q(-1, 1), &[(q(1, 1), 0)], alpha)),
        ("quintic", "0", closed_form(q(8, 1), &[(q(1, 2), 1), (q(-1, 2), -1)], alpha)),
        ("quintic", "K", closed_form(q(-8, 1), &[(q(1, 2), 1), (q(1, 2), -1)], alpha)),
    ];
    for (name, d) in [("elliptic_e4", 2), ("elliptic_e5", 3), ("elliptic_e6", 4)] {
        // sinh^d y = 2^{−d} Σ_p (−1)^{d−p} C(d,p) e^{(2p−d)y}
        let exps: Vec<_> = (0..=d).map(|p| (q(sign(d - p) * binom(d, p), 1 << d), 2 * p - d)).collect();
        cases.push((name, "0", closed_form(q(1, 1), &exps, alpha)));
    }
    for (name, label, known) in &cases {
        let s = surface(name)?;
        let xi = s.xi_by_label(label).map_err(err)?;
        let r = donaldson_from_residue1(&s, xi, degree).map_err(err)?;
        ensure!(r.alpha_degree == alpha, "α-degree {}", r.alpha_degree);
        ensure!(r.matches_witten_with_opposite_sign(), "{} ξ={}: residue at 1 does not reproduce the Witten form", name, label);
        ensure!(&r.witten == known, "{} ξ={}: Witten form {} differs from the known series {}", name, label, r.witten, known);
        ensure!(&r.series.neg() == known, "{} ξ={}: Donaldson series from the residue differs from the known series", name, label);
    }
    // every ξ of every SCST surface, and the point-class equation on the v = 1 part
    let xz = [(Var::X, 2), (Var::Z, 1)];
    let mut n = 0;
    for name in SCST {
        let s = surface(name)?;
        for xi in &s.xi {
            let r = donaldson_from_residue1(&s, xi, degree).map_err(err)?;
            ensure!(r.matches_witten_with_opposite_sign(), "{} ξ={}: mismatch", name, xi.label);
            ensure!(r.witten == witten_series(&s, xi, alpha), "{} ξ={}: inconsistent Witten form", name, xi.label);
            let km = r.residue.deriv(Var::X).deriv(Var::X).sub(&r.residue.scale(&Scalar::from_int(4)));
            ensure!(km.truncate_weighted(&xz, degree - 4).is_zero(), "{} ξ={}: (d/dx)^2 - 4 does not annihilate the v = 1 part", name, xi.label);
            n += 1;
        }
    }
    Ok(format!("{} explicit series, {} (surface, ξ) pairs through α-degree {}", cases.len(), n, alpha))
}

fn c9_scst() -> Outcome {
    for (name, d) in [("elliptic_e4", 2), ("elliptic_e5", 3), ("elliptic_e6", 4)] {
        let r = scst_check(&surface(name)?, 8);
        ensure!(r.holds() && r.parity_holds, "{}: {:?}", name, r);
        ensure!(r.order == Some(d), "{}: vanishing order {:?}, expected {}", name, r.order, d);
    }
    ensure!(
        blowup_sw_relation(&surface("elliptic_e4")?, &surface("elliptic_e4_blowup")?, 8).map_err(err)?,
        "SW series of the blow-up is not -2 sinh(y_C) times that of E(4)"
    );
    let mut positive = 0;
    for name in ALL {
        let s = surface(name)?;
        let scst = name != "artificial_non_scst";
        for xi in &s.xi {
            let reg = scst_regularity(&s, xi, 8).map_err(err)?;
            if scst {
                ensure!(reg.residue.is_zero(), "{} ξ={}: residue at 1/3 is {}", name, xi.label, reg.residue);
            } else {
                ensure!(!reg.residue.is_zero(), "{} ξ={}: counterexample has zero residue at 1/3", name, xi.label);
            }
            let rep = residue_report(&s, xi, 8).map_err(err)?;
            ensure!(rep.infinity_holds(), "{} ξ={}: residue at infinity survives for χ(y) > 0", name, xi.label);
            positive += rep.infinity.iter().filter(|c| c.four_chi_y > 0).count();
        }
    }
    ensure!(positive > 0, "no monomial with χ(y) > 0 was tested");
    ensure!(!scst_check(&surface("artificial_non_scst")?, 8).holds(), "counterexample passes the moment test");
    Ok(format!("orders 2, 3, 4; blow-up relation; {} monomials with χ(y) > 0", positive))
}

fn c10_toric_bridge() -> Outcome {
    let gauge = GaugeParams::new(1).map_err(err)?;
    let max_n = 1;
    let e = expansion(gauge, max_n, 0).map_err(err)?;
    let mut cases: Vec<BridgeParams> = [(1, 0), (1, 1), (2, 0), (0, 0)].iter().map(|(a, b)| BridgeParams::from_degrees(*a, *b, max_n)).collect();
    for (shift, point_at) in [(1, 0), (-2, 1), (3, 2), (1, 1)] {
        cases.push(BridgeParams { lift_shift: shift, point_at, ..BridgeParams::from_degrees(1, 0, max_n) });
    }
    for p in &cases {
        let r = verify_bridge_with(&e, p).map_err(err)?;
        ensure!(r.orders.len() == max_n, "{:?}: {} orders", p, r.orders.len());
        ensure!(r.holds(), "{:?}: {:?}", p, r.orders);
    }
    Ok(format!("{} (degree, lift) choices through L^4", cases.len()))
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("blow-up coefficients", c1_blowup_coefficients),
        ("vanishing of the blow-up ratios", c2_vanishing),
        ("H = 0 and symmetries of Z", c3_h_and_symmetries),
        ("sigma identity", c4_sigma),
        ("a = m identity suite", c5_am_suite),
        ("parity and rationality", c6_parity_rationality),
        ("residue theorem", c7_residue_theorem),
        ("Witten reproduction", c8_witten),
        ("superconformal simple type", c9_scst),
        ("toric bridge", c10_toric_bridge),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {:>2} PASS  {}: {}", i + 1, name, detail),
            Err(why) => {
                println!("criterion {:>2} FAIL  {}: {}", i + 1, name, why);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failing criteria: {:?}", failed);
}
