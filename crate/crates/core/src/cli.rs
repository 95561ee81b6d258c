//! Batch front end shared by the `instanton` binary and the integration
//! tests: each command runs a computation, collects every identity it
//! checked, and renders a deterministic JSON report.

use crate::blowup::blowup_ratio;
use crate::error::{CoreError, Result};
use crate::exactalg::{GradedSeries, RationalFn, LU};
use crate::mochizuki::surface::SurfaceData;
use crate::mochizuki::witten::{blowup_sw_relation, donaldson_from_residue1, scst_check, scst_regularity};
use crate::mochizuki::residue_report;
use crate::mochizuki::phi::phi_of_a;
use crate::nekrasov::{symmetry_checks, zinst, FixedPointParams, GaugeParams};
use crate::prepotential::{am_identities, expansion, u_series, CurveSeed, IdentityCheck, LSeries};
use crate::swcurve::{coefficient_checks, vanishing_checks, verify_am_curve_identities, verify_blowup_sigma, RatioSeries};
use crate::toricbridge::{verify_bridge_with, BridgeParams};
use serde::Serialize;
use serde_json::{json, Value};
use std::path::PathBuf;

pub const SCHEMA: u32 = 1;

/// Upper bounds on the order parameters; beyond them the fixed-point sums
/// leave desk scale.
pub const MAX_LAMBDA_ORDER: i64 = 15;
pub const MAX_T_ORDER: usize = 13;
pub const MAX_XZ_DEGREE: u32 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    ExpandZ,
    Prepotential,
    BlowupRatio { c1: u8 },
    SwIdentities,
    MochizukiResidues,
    Witten,
    Scst,
    ToricBridge,
    VerifyAll,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::ExpandZ => "expand-z",
            Command::Prepotential => "prepotential",
            Command::BlowupRatio { .. } => "blowup-ratio",
            Command::SwIdentities => "sw-identities",
            Command::MochizukiResidues => "mochizuki-residues",
            Command::Witten => "witten",
            Command::Scst => "scst",
            Command::ToricBridge => "toric-bridge",
            Command::VerifyAll => "verify-all",
        }
    }

    fn default_lambda_order(&self) -> i64 {
        match self {
            Command::ExpandZ | Command::Prepotential => 12,
            Command::ToricBridge => 8,
            _ => 9,
        }
    }
}

/// Parameters of one run. Unset orders fall back to per-command defaults.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub lambda_order: Option<i64>,
    pub t_order: Option<usize>,
    pub xz_degree: Option<u32>,
    /// Surface data files; empty means the shipped examples.
    pub surfaces: Vec<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig { command, lambda_order: None, t_order: None, xz_degree: None, surfaces: Vec::new() }
    }

    fn lambda_order(&self) -> Result<i64> {
        let l = self.lambda_order.unwrap_or_else(|| self.command.default_lambda_order());
        // the bridge works in whole powers of Λ⁴
        let (min, max) = if self.command == Command::ToricBridge { (4, 16) } else { (1, MAX_LAMBDA_ORDER) };
        if l < min || l > max {
            return Err(CoreError::Input(format!("--lambda-order must lie in {}..={}, got {}", min, max, l)));
        }
        Ok(l)
    }

    fn t_order(&self, default: usize) -> Result<usize> {
        let t = self.t_order.unwrap_or(default);
        if t == 0 || t > MAX_T_ORDER {
            return Err(CoreError::Input(format!("--t-order must lie in 1..={}, got {}", MAX_T_ORDER, t)));
        }
        Ok(t)
    }

    fn xz_degree(&self) -> Result<u32> {
        let d = self.xz_degree.unwrap_or(8);
        if !(2..=MAX_XZ_DEGREE).contains(&d) {
            return Err(CoreError::Input(format!("--xz-degree must lie in 2..={}, got {}", MAX_XZ_DEGREE, d)));
        }
        Ok(d)
    }

    fn load_surfaces(&self) -> Result<Vec<SurfaceData>> {
        if self.surfaces.is_empty() {
            return shipped_surfaces();
        }
        self.surfaces.iter().map(|p| SurfaceData::load(p)).collect()
    }
}

/// One verified identity in a report.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub holds: bool,
    /// How far the comparison reached, e.g. `"L^9"`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub compared_through: Option<String>,
    /// First coefficient where the two sides differ, or the error that
    /// stopped the check.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

impl Check {
    pub fn boolean(name: impl Into<String>, holds: bool, failure: impl FnOnce() -> String) -> Self {
        Check { name: name.into(), holds, compared_through: None, first_failure: if holds { None } else { Some(failure()) } }
    }

    fn through(mut self, s: impl Into<String>) -> Self {
        self.compared_through = Some(s.into());
        self
    }

    /// A check that could not run because the computation reported an
    /// identity or consistency failure.
    fn failed(name: impl Into<String>, e: &CoreError) -> Self {
        Check { name: name.into(), holds: false, compared_through: None, first_failure: Some(e.to_string()) }
    }

    fn from_identity(prefix: &str, c: &IdentityCheck) -> Self {
        Check {
            name: format!("{}{}", prefix, c.name),
            holds: c.holds(),
            compared_through: c.lambda_order().map(|n| format!("L^{}", n)),
            first_failure: c.first_difference.map(|e| format!("L^{}", lambda_exponent(e))),
        }
    }
}

fn lambda_exponent(units: i64) -> String {
    let r = num_rational::Ratio::new(units, LU);
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// A finished run.
#[derive(Clone, Debug)]
pub struct Report {
    pub command: &'static str,
    pub parameters: Value,
    pub checks: Vec<Check>,
    pub results: Value,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": SCHEMA,
            "command": self.command,
            "parameters": self.parameters,
            "passed": self.passed(),
            "checks": self.checks,
            "results": self.results,
        })
    }

    /// Canonical text: sorted object keys, two-space indentation.
    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("reports serialize");
        s.push('\n');
        s
    }
}

macro_rules! shipped {
    ($($file:literal),*) => {
        [$(($file, include_str!(concat!("../../../data/surfaces/", $file)))),*]
    };
}

/// Surfaces of superconformal simple type shipped with the crate.
const SHIPPED: [(&str, &str); 6] =
    shipped!("k3.json", "quintic.json", "elliptic_e4.json", "elliptic_e5.json", "elliptic_e6.json", "elliptic_e4_blowup.json");

/// Data violating the simple-type condition, used to show the checks can fail.
const COUNTEREXAMPLE: (&str, &str) = ("artificial_non_scst.json", include_str!("../../../data/surfaces/artificial_non_scst.json"));

pub fn shipped_surfaces() -> Result<Vec<SurfaceData>> {
    SHIPPED.iter().map(|(_, s)| SurfaceData::from_json_str(s)).collect()
}

pub fn counterexample_surface() -> Result<SurfaceData> {
    SurfaceData::from_json_str(COUNTEREXAMPLE.1)
}

fn lseries_json(s: &LSeries) -> Value {
    s.to_json()
}

fn ratio_json(r: &RatioSeries) -> Value {
    let terms: Vec<Value> =
        r.terms().iter().map(|(j, c)| json!({ "exponent": r.exponent_str(*j), "coefficient": lseries_json(c) })).collect();
    json!({ "var": "t", "precision": r.prec().map(|p| r.exponent_str(p)), "terms": terms })
}

fn gauge() -> GaugeParams {
    GaugeParams { nf: 1 }
}

/// Instanton number needed to know a Λ-series through `Λ^lambda_order`.
fn instantons_for(lambda_order: i64) -> usize {
    (lambda_order / gauge().gamma()) as usize
}

fn expand_z(cfg: &RunConfig) -> Result<Report> {
    let l = cfg.lambda_order()?;
    let n = instantons_for(l);
    let z: GradedSeries<RationalFn> = zinst(&FixedPointParams::symbolic(gauge()), n)?;
    let checks = symmetry_checks(&z)?
        .iter()
        .map(|c| Check {
            name: c.name.to_string(),
            holds: c.holds(),
            compared_through: c.compared_below.map(|p| format!("L^{}", (p - 1).div_euclid(LU))),
            first_failure: c.first_difference.map(|e| format!("L^{}", lambda_exponent(e))),
        })
        .collect();
    Ok(Report {
        command: cfg.command.name(),
        parameters: json!({ "lambda_order": l, "instanton_number": n }),
        checks,
        results: json!({ "zinst": z.to_json() }),
    })
}

fn prepotential(cfg: &RunConfig) -> Result<Report> {
    let l = cfg.lambda_order()?;
    let n = instantons_for(l);
    let e = expansion(gauge(), n, n.min(2))?;
    let seed = CurveSeed::new(&e, gauge());
    let h_zero = e.h.terms().is_empty();
    let mut checks = vec![Check::boolean("H^inst vanishes", h_zero, || {
        format!("L^{}", lambda_exponent(*e.h.terms().keys().next().expect("nonzero")))
    })
    .through(format!("L^{}", e.h.prec().map_or(l, |p| (p - 1).div_euclid(LU))))];
    checks.extend(am_identities(&e, gauge())?.iter().map(|c| Check::from_identity("a = m: ", c)));
    Ok(Report {
        command: cfg.command.name(),
        parameters: json!({ "lambda_order": l, "instanton_number": n }),
        checks,
        results: json!({
            "F0": lseries_json(&e.f0),
            "H": lseries_json(&e.h),
            "A": lseries_json(&e.a),
            "B": lseries_json(&e.b),
            "u": lseries_json(&seed.u),
            "T": lseries_json(&seed.t),
            "pi_over_omega": lseries_json(&seed.pi_over_omega),
        }),
    })
}

fn blowup(cfg: &RunConfig, c1: u8) -> Result<Report> {
    if c1 > 1 {
        return Err(CoreError::Input(format!("--c1 must be 0 or 1, got {}", c1)));
    }
    let l = cfg.lambda_order()?;
    let t = cfg.t_order(8)?;
    let ratio = blowup_ratio(c1, t, l)?;
    let mut checks: Vec<Check> = vanishing_checks(c1, &ratio, l)?.iter().map(|c| Check::from_identity("", c)).collect();
    if c1 == 1 {
        let u = u_series(&expansion(gauge(), instantons_for(l) + 1, 0)?, gauge());
        checks.extend(coefficient_checks(&ratio, &u, l)?.iter().map(|c| Check::from_identity("", c)));
    }
    Ok(Report {
        command: cfg.command.name(),
        parameters: json!({ "c1": c1, "lambda_order": l, "t_order": t }),
        checks,
        results: json!({ "ratio": ratio_json(&ratio) }),
    })
}

fn sw_identities(cfg: &RunConfig) -> Result<Report> {
    let l = cfg.lambda_order()?;
    let t = cfg.t_order(9)?;
    let n = instantons_for(l).max(1);
    let sigma = verify_blowup_sigma(t, l)?;
    let mut checks = vec![Check {
        name: "blow-up ratio = -L exp(u t^2/6) sigma(t)".into(),
        holds: sigma.holds(),
        compared_through: Some(format!("t^{}, L^{}", t, l)),
        first_failure: sigma.first_mismatch.map(|(j, e)| format!("t^{} L^{}", j, lambda_exponent(e))),
    }];
    checks.extend(verify_am_curve_identities(n)?.iter().map(|c| Check::from_identity("curve at a = m: ", c)));
    for c in phi_of_a(n)?.checks()? {
        checks.push(Check {
            name: format!("uniformizer: {}", c.name),
            holds: c.holds(),
            compared_through: c.compared_below.map(|p| format!("rho^{}", p - 1)),
            first_failure: c.first_difference.map(|e| format!("rho^{}", e)),
        });
    }
    Ok(Report {
        command: cfg.command.name(),
        parameters: json!({ "lambda_order": l, "t_order": t, "instanton_number": n }),
        checks,
        results: json!({ "sigma_coefficients_compared": sigma.compared }),
    })
}

/// Identity-type failures become failing checks; anything else aborts.
fn soft<T>(name: &str, r: Result<T>, checks: &mut Vec<Check>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(e @ (CoreError::Identity { .. } | CoreError::Convention(_) | CoreError::Algebra(_))) => {
            checks.push(Check::failed(name, &e));
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

fn residues(cfg: &RunConfig, surfaces: &[SurfaceData]) -> Result<Report> {
    let d = cfg.xz_degree()?;
    let mut checks = Vec::new();
    let mut out = Vec::new();
    for s in surfaces {
        for xi in &s.xi {
            let tag = format!("{} xi={}", s.name, xi.label);
            let Some(r) = soft(&format!("{}: symmetrized form is rational in v", tag), residue_report(s, xi, d), &mut checks)? else {
                continue;
            };
            checks.push(Check::boolean(format!("{}: symmetrized form is rational in v", tag), true, String::new));
            checks.push(
                Check::boolean(format!("{}: four residues sum to zero", tag), r.residue_theorem_holds(), || {
                    format!("classes {}", r.residue_theorem_failures.join(", "))
                })
                .through(format!("(x,z)-degree {}", d)),
            );
            checks.push(Check::boolean(format!("{}: residue at infinity vanishes where chi(y) > 0", tag), r.infinity_holds(), || {
                let bad = r.infinity.iter().find(|c| !c.holds()).expect("a failing monomial");
                format!("x^{} z^{}", bad.x_deg, bad.z_deg)
            }));
            out.push(r.to_json());
        }
    }
    Ok(Report { command: "mochizuki-residues", parameters: json!({ "xz_degree": d }), checks, results: json!({ "reports": out }) })
}

fn witten(cfg: &RunConfig, surfaces: &[SurfaceData]) -> Result<Report> {
    let d = cfg.xz_degree()?;
    let mut checks = Vec::new();
    let mut out = Vec::new();
    for s in surfaces {
        for xi in &s.xi {
            let tag = format!("{} xi={}", s.name, xi.label);
            let name = format!("{}: residue at v = 1 reproduces the Witten form up to sign", tag);
            let Some(r) = soft(&name, donaldson_from_residue1(s, xi, d), &mut checks)? else {
                continue;
            };
            let holds = r.matches_witten_with_opposite_sign();
            checks.push(
                Check::boolean(name, holds, || format!("difference {}", r.series.add(&r.witten)))
                    .through(format!("alpha-degree {}", r.alpha_degree)),
            );
            out.push(json!({
                "surface": s.name,
                "xi": xi.label,
                "alpha_degree": r.alpha_degree,
                "from_residue_at_1": r.series.to_string(),
                "witten": r.witten.to_string(),
                "residue_at_1": r.residue.to_json(),
            }));
        }
    }
    Ok(Report { command: "witten", parameters: json!({ "xz_degree": d }), checks, results: json!({ "reports": out }) })
}

fn scst(cfg: &RunConfig, surfaces: &[SurfaceData]) -> Result<Report> {
    let d = cfg.xz_degree()?;
    let mut checks = Vec::new();
    let mut out = Vec::new();
    for s in surfaces {
        let r = scst_check(s, d);
        checks.push(Check::boolean(format!("{}: SW moments below chi - K^2 - 3 vanish", s.name), r.holds(), || {
            format!("moments {:?}", r.nonzero_moments)
        }));
        checks.push(Check::boolean(format!("{}: SW series has parity chi - K^2", s.name), r.parity_holds, String::new));
        checks.push(Check::boolean(format!("{}: vanishing order agrees with the moment test", s.name), r.order_consistent(), || {
            format!("order {:?}", r.order)
        }));
        let mut regular = Vec::new();
        for xi in &s.xi {
            let name = format!("{} xi={}: residue at v = 1/3 vanishes", s.name, xi.label);
            let Some(reg) = soft(&name, scst_regularity(s, xi, d), &mut checks)? else {
                continue;
            };
            checks.push(Check::boolean(name, reg.regular(), || format!("{} singular monomials", reg.singular_terms)));
            regular.push(json!({ "xi": xi.label, "residue_at_third": reg.residue.to_json(), "singular_monomials": reg.singular_terms }));
        }
        if let Some(base) = &s.blowup_of {
            let name = format!("{}: SW series is -2 sinh(y_C) times that of {}", s.name, base);
            match surfaces.iter().find(|x| &x.name == base) {
                Some(x) => {
                    if let Some(ok) = soft(&name, blowup_sw_relation(x, s, d), &mut checks)? {
                        checks.push(Check::boolean(name, ok, String::new).through(format!("alpha-degree {}", d)));
                    }
                }
                None => return Err(CoreError::Input(format!("{} is a blow-up of {}, which was not loaded", s.name, base))),
            }
        }
        let mut j = serde_json::to_value(&r).expect("report serializes");
        j["surface"] = json!(s.name);
        j["regularity"] = json!(regular);
        out.push(j);
    }
    Ok(Report { command: "scst", parameters: json!({ "xz_degree": d }), checks, results: json!({ "reports": out }) })
}

/// The degree pairs `(ξ, ξ₁)` and lifts at which the bridge is run.
pub fn bridge_cases(max_n: usize) -> Vec<BridgeParams> {
    let mut out = Vec::new();
    for (xi, xi1) in [(1, 0), (1, 1), (2, 0)] {
        out.push(BridgeParams::from_degrees(xi, xi1, max_n));
    }
    for (shift, point_at) in [(1, 0), (-2, 1), (3, 2)] {
        out.push(BridgeParams { lift_shift: shift, point_at, ..BridgeParams::from_degrees(1, 0, max_n) });
    }
    out
}

fn toric(cfg: &RunConfig) -> Result<Report> {
    let l = cfg.lambda_order()?;
    let n = (l / 4) as usize;
    let e = expansion(gauge(), n, 0)?;
    let mut checks = Vec::new();
    let mut out = Vec::new();
    for p in bridge_cases(n) {
        let r = verify_bridge_with(&e, &p)?;
        let tag = format!("e={} f={} shift={} point={}", p.e, p.f, p.lift_shift, p.point_at);
        for o in &r.orders {
            checks.push(Check::boolean(format!("{}: L^{} poles cancel", tag, 4 * o.n), o.poles_cancel, String::new));
            checks.push(Check::boolean(format!("{}: L^{} matches the closed form", tag, 4 * o.n), o.matches, String::new));
        }
        out.push(serde_json::to_value(&r).expect("report serializes"));
    }
    Ok(Report {
        command: "toric-bridge",
        parameters: json!({ "lambda_order": l, "max_power_of_L4": n }),
        checks,
        results: json!({ "reports": out }),
    })
}

fn verify_all(cfg: &RunConfig) -> Result<Report> {
    let surfaces = cfg.load_surfaces()?;
    let sub = |c: Command| RunConfig { command: c, ..cfg.clone() };
    let mut parts = vec![
        expand_z(&sub(Command::ExpandZ))?,
        prepotential(&sub(Command::Prepotential))?,
        blowup(&sub(Command::BlowupRatio { c1: 0 }), 0)?,
        blowup(&sub(Command::BlowupRatio { c1: 1 }), 1)?,
        sw_identities(&sub(Command::SwIdentities))?,
        residues(&sub(Command::MochizukiResidues), &surfaces)?,
        witten(&sub(Command::Witten), &surfaces)?,
        scst(&sub(Command::Scst), &surfaces)?,
        toric(&sub(Command::ToricBridge))?,
    ];
    // The counterexample must be rejected by the simple-type tests.
    let bad = counterexample_surface()?;
    let probe = scst(&sub(Command::Scst), std::slice::from_ref(&bad))?;
    let detected = !probe.passed();
    parts.push(Report {
        command: "scst-counterexample",
        parameters: json!({}),
        checks: vec![Check::boolean(format!("{}: simple-type failure is detected", bad.name), detected, String::new)],
        results: probe.to_json(),
    });
    let mut checks = Vec::new();
    let mut results = serde_json::Map::new();
    for p in parts {
        checks.extend(p.checks.iter().map(|c| Check { name: format!("{}: {}", p.command, c.name), ..c.clone() }));
        results.insert(p.command.to_string(), json!({ "parameters": p.parameters, "passed": p.passed(), "results": p.results }));
    }
    Ok(Report { command: "verify-all", parameters: json!({}), checks, results: Value::Object(results) })
}

/// Run one command. `Err` carries invalid input or a computation that
/// could not be carried out; identity failures are reported as checks.
pub fn run(cfg: &RunConfig) -> Result<Report> {
    match cfg.command {
        Command::ExpandZ => expand_z(cfg),
        Command::Prepotential => prepotential(cfg),
        Command::BlowupRatio { c1 } => blowup(cfg, c1),
        Command::SwIdentities => sw_identities(cfg),
        Command::MochizukiResidues => residues(cfg, &cfg.load_surfaces()?),
        Command::Witten => witten(cfg, &cfg.load_surfaces()?),
        Command::Scst => scst(cfg, &cfg.load_surfaces()?),
        Command::ToricBridge => toric(cfg),
        Command::VerifyAll => verify_all(cfg),
    }
}

/// Process exit status for the outcome of [`run`].
pub fn exit_code(r: &Result<Report>) -> i32 {
    match r {
        Ok(rep) if rep.passed() => 0,
        Ok(_) => 1,
        Err(CoreError::Input(_)) => 2,
        Err(_) => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_data_parses() {
        assert_eq!(shipped_surfaces().unwrap().len(), SHIPPED.len());
        counterexample_surface().unwrap();
    }

    #[test]
    fn order_bounds_are_input_errors() {
        let mut c = RunConfig::new(Command::ExpandZ);
        c.lambda_order = Some(0);
        assert_eq!(exit_code(&run(&c)), 2);
        let mut c = RunConfig::new(Command::Witten);
        c.xz_degree = Some(1);
        assert_eq!(exit_code(&run(&c)), 2);
        let mut c = RunConfig::new(Command::BlowupRatio { c1: 2 });
        c.lambda_order = Some(3);
        assert_eq!(exit_code(&run(&c)), 2);
    }

    #[test]
    fn twisted_ratio_report_starts_with_minus_lambda() {
        let mut c = RunConfig::new(Command::BlowupRatio { c1: 1 });
        c.lambda_order = Some(4);
        c.t_order = Some(3);
        let r = run(&c).unwrap();
        assert!(r.passed(), "{:?}", r.checks);
        let j = r.to_json();
        let terms = j["results"]["ratio"]["terms"].as_array().unwrap();
        let t1 = terms.iter().find(|t| t["exponent"] == "1").expect("a t^1 entry");
        let lam = t1["coefficient"]["terms"].as_array().unwrap();
        assert_eq!(lam.len(), 1, "t^1 is a single power of L through L^4");
        assert_eq!(lam[0]["exponent"], "1");
        assert_eq!(lam[0]["coefficient"], json!({ "num": "(-1)", "den": "(1)" }));
    }

    #[test]
    fn counterexample_fails_scst() {
        let mut c = RunConfig::new(Command::Scst);
        c.xz_degree = Some(6);
        let r = scst(&c, &[counterexample_surface().unwrap()]).unwrap();
        assert!(!r.passed());
        assert_eq!(exit_code(&Ok(r)), 1);
    }

    #[test]
    fn lambda_exponents_are_reduced() {
        assert_eq!(lambda_exponent(3 * LU), "3");
        assert_eq!(lambda_exponent(LU / 3), "1/3");
    }
}
