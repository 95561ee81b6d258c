//! Residue calculus turning instanton-counting data into Donaldson
//! invariants of surfaces with `p_g > 0`.
//!
//! A [`surface::SurfaceData`] supplies the integers; [`differential`] builds
//! the 1-form of each Seiberg-Witten class and reduces it to a rational form
//! in `v = φ⁴` ([`vrat`]); [`witten`] reads off the Donaldson series and
//! the simple-type conditions. [`phi`] relates `φ` to the Coulomb parameter.

pub mod differential;
pub mod phi;
pub mod surface;
pub mod vrat;
pub mod witten;

use crate::error::Result;
use crate::exactalg::MultiPoly;
use differential::{infinity_checks, symmetrized, total_form, InfinityCheck};
use serde_json::json;
use surface::{SurfaceData, XiData};
use vrat::Pole;

/// Residues of the total form at the four poles, with the checks that
/// apply to each.
#[derive(Clone, Debug)]
pub struct ResidueReport {
    pub surface: String,
    pub xi: String,
    pub degree: u32,
    pub dim_mod4: i64,
    /// Number of classes whose symmetrized form was rational in `v`.
    pub rational_classes: usize,
    pub residues: Vec<(Pole, MultiPoly)>,
    /// Classes (by label) whose four residues fail to sum to zero, and
    /// `"total"` for the total form.
    pub residue_theorem_failures: Vec<String>,
    pub infinity: Vec<InfinityCheck>,
    pub monomials: usize,
}

impl ResidueReport {
    pub fn residue(&self, at: Pole) -> &MultiPoly {
        &self.residues.iter().find(|(p, _)| *p == at).expect("all four poles are present").1
    }

    pub fn residue_theorem_holds(&self) -> bool {
        self.residue_theorem_failures.is_empty()
    }

    pub fn infinity_holds(&self) -> bool {
        self.infinity.iter().all(InfinityCheck::holds)
    }

    pub fn holds(&self) -> bool {
        self.residue_theorem_holds() && self.infinity_holds()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let residues: serde_json::Map<String, serde_json::Value> =
            self.residues.iter().map(|(p, r)| (p.name().to_string(), r.to_json())).collect();
        let inf: Vec<serde_json::Value> = self
            .infinity
            .iter()
            .filter(|c| c.four_chi_y > 0)
            .map(|c| {
                json!({
                    "x_degree": c.x_deg,
                    "z_degree": c.z_deg,
                    "four_chi_y": c.four_chi_y,
                    "order_at_infinity": c.order,
                    "residue": c.residue.to_string(),
                    "holds": c.holds(),
                })
            })
            .collect();
        json!({
            "surface": self.surface,
            "xi": self.xi,
            "xz_degree": self.degree,
            "dim_mod4": self.dim_mod4,
            "rational_classes": self.rational_classes,
            "monomials": self.monomials,
            "residues": residues,
            "residue_theorem": { "holds": self.residue_theorem_holds(), "failures": self.residue_theorem_failures },
            "infinity_positive_chi": { "holds": self.infinity_holds(), "monomials": inf },
        })
    }
}

fn four_sum_vanishes(f: &differential::RationalForm) -> bool {
    Pole::ALL.iter().fold(MultiPoly::zero(), |acc, p| acc.add(&f.residue(*p))).is_zero()
}

pub fn residue_report(surf: &SurfaceData, xi: &XiData, degree: u32) -> Result<ResidueReport> {
    let mut failures = Vec::new();
    let mut rational_classes = 0;
    for (i, c) in surf.classes.iter().enumerate() {
        let s = symmetrized(surf, xi, i, degree)?;
        rational_classes += 1;
        if !four_sum_vanishes(&s) {
            failures.push(c.label.clone());
        }
    }
    let t = total_form(surf, xi, degree)?;
    if !four_sum_vanishes(&t) {
        failures.push("total".into());
    }
    Ok(ResidueReport {
        surface: surf.name.clone(),
        xi: xi.label.clone(),
        degree,
        dim_mod4: surf.dim_mod4(xi),
        rational_classes,
        residues: Pole::ALL.iter().map(|p| (*p, t.residue(*p))).collect(),
        residue_theorem_failures: failures,
        infinity: infinity_checks(surf, xi, &t),
        monomials: t.terms.len(),
    })
}
