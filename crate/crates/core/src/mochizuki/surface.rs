//! Intersection data of a surface, as consumed by the residue calculus.
//!
//! Only integers enter: `χ_h`, `(K²)`, and for each Seiberg-Witten class
//! `c` its value `SW(c)`, `(K, c)`, `(c²)` and the coordinates of `(c, α)`
//! in a basis of α-pairing indeterminates. Each choice of `ξ` carries
//! `(ξ²)`, `(ξ, K)` and `(ξ, c)` for every listed class. Everything else the
//! differential needs (such as `((ξ−K)²)`, `(ξ−K, c)` and the parities
//! entering sign factors) is derived from these.

use crate::error::{CoreError, Result};
use crate::exactalg::poly::Var;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// At most this many α-pairing indeterminates (`y0..y4`).
pub const MAX_ALPHA_BASIS: usize = 5;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct BasicClass {
    pub label: String,
    pub sw: i64,
    /// Coordinates of `(c, α)` in the α-basis.
    pub alpha: Vec<i64>,
    /// `(K, c)`.
    pub k_dot: i64,
    /// `(c²)`; must equal `(K²)` (SW-simple type).
    pub sq: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct XiData {
    pub label: String,
    /// `(ξ²)`.
    pub sq: i64,
    /// `(ξ, K)`.
    pub k_dot: i64,
    /// `(ξ, c)` for every class, in the order of `classes`.
    pub class_dot: Vec<i64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SurfaceData {
    #[serde(default = "schema_one")]
    pub schema: u32,
    pub name: String,
    pub chi_h: i64,
    pub k_sq: i64,
    #[serde(default)]
    pub alpha_basis: Vec<String>,
    pub classes: Vec<BasicClass>,
    #[serde(default)]
    pub xi: Vec<XiData>,
    /// Name of the surface this one is the one-point blow-up of; its
    /// α-basis must then be that surface's basis followed by the
    /// exceptional class.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blowup_of: Option<String>,
}

fn schema_one() -> u32 {
    1
}

/// One Seiberg-Witten class seen from a fixed `ξ`: everything the
/// differential of that class needs.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassView {
    pub sw: i64,
    pub alpha: Vec<i64>,
    pub k_dot: i64,
    pub xi_dot: i64,
}

impl ClassView {
    /// The conjugate class `−c`. Its SW value is not needed here.
    pub fn negated(&self) -> Self {
        ClassView {
            sw: self.sw,
            alpha: self.alpha.iter().map(|x| -x).collect(),
            k_dot: -self.k_dot,
            xi_dot: -self.xi_dot,
        }
    }
}

fn input(msg: String) -> CoreError {
    CoreError::Input(msg)
}

fn even(n: i64) -> bool {
    n.rem_euclid(2) == 0
}

/// `(−1)^n`.
pub fn sign(n: i64) -> i64 {
    if even(n) {
        1
    } else {
        -1
    }
}

impl SurfaceData {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let surf: SurfaceData = serde_json::from_str(s).map_err(|e| input(format!("surface JSON: {}", e)))?;
        surf.validate()?;
        Ok(surf)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| input(format!("reading {}: {}", path.display(), e)))?;
        Self::from_json_str(&text).map_err(|e| match e {
            CoreError::Input(m) => input(format!("{}: {}", path.display(), m)),
            other => other,
        })
    }

    /// Check every structural constraint. Violations are input errors.
    pub fn validate(&self) -> Result<()> {
        let r = self.alpha_basis.len();
        if self.schema != 1 {
            return Err(input(format!("unsupported schema {}", self.schema)));
        }
        if r > MAX_ALPHA_BASIS {
            return Err(input(format!("at most {} α-basis symbols are supported, got {}", MAX_ALPHA_BASIS, r)));
        }
        if self.chi_h < 1 {
            return Err(input(format!("χ_h must be positive, got {}", self.chi_h)));
        }
        for c in &self.classes {
            if c.alpha.len() != r {
                return Err(input(format!("class {}: {} α-coordinates for a basis of size {}", c.label, c.alpha.len(), r)));
            }
            if c.sq != self.k_sq {
                return Err(input(format!("class {}: (c²) = {} but (K²) = {}; basic classes of a simple-type surface satisfy c² = K²", c.label, c.sq, self.k_sq)));
            }
            if !even(self.k_sq + c.k_dot) {
                return Err(input(format!("class {}: (K, K + c) = {} is odd, so c is not a characteristic lift", c.label, self.k_sq + c.k_dot)));
            }
        }
        for (i, c) in self.classes.iter().enumerate() {
            if c.sw == 0 {
                continue;
            }
            let j = self.conjugate_index(i).ok_or_else(|| input(format!("class {}: the conjugate class −c is missing", c.label)))?;
            let expected = sign(self.chi_h) * c.sw;
            if self.classes[j].sw != expected {
                return Err(input(format!(
                    "class {}: SW(−c) = {} but (−1)^χ_h SW(c) = {}",
                    c.label, self.classes[j].sw, expected
                )));
            }
        }
        for xi in &self.xi {
            if xi.class_dot.len() != self.classes.len() {
                return Err(input(format!("ξ = {}: {} class pairings for {} classes", xi.label, xi.class_dot.len(), self.classes.len())));
            }
            if !even(xi.sq - xi.k_dot) {
                return Err(input(format!("ξ = {}: (ξ²) − (ξ, K) = {} is odd, contradicting Wu's formula", xi.label, xi.sq - xi.k_dot)));
            }
            for (i, c) in self.classes.iter().enumerate() {
                // (ξ − K, c − K) must be even since c ≡ K mod 2.
                let p = xi.class_dot[i] - xi.k_dot - c.k_dot + self.k_sq;
                if !even(p) {
                    return Err(input(format!("ξ = {}, class {}: (ξ − K, c − K) = {} is odd", xi.label, c.label, p)));
                }
                if let Some(j) = self.conjugate_index(i) {
                    if xi.class_dot[j] != -xi.class_dot[i] {
                        return Err(input(format!("ξ = {}: pairings with {} and its conjugate are not opposite", xi.label, c.label)));
                    }
                }
            }
        }
        Ok(())
    }

    /// Index of the class `−c`, matched on α-coordinates and `(K, c)`.
    pub fn conjugate_index(&self, i: usize) -> Option<usize> {
        let c = &self.classes[i];
        self.classes
            .iter()
            .position(|d| d.k_dot == -c.k_dot && d.alpha.iter().zip(&c.alpha).all(|(x, y)| *x == -*y))
    }

    pub fn xi_by_label(&self, label: &str) -> Result<&XiData> {
        self.xi
            .iter()
            .find(|x| x.label == label)
            .ok_or_else(|| input(format!("surface {} has no ξ labelled {:?}", self.name, label)))
    }

    pub fn view(&self, xi: &XiData, i: usize) -> ClassView {
        let c = &self.classes[i];
        ClassView { sw: c.sw, alpha: c.alpha.clone(), k_dot: c.k_dot, xi_dot: xi.class_dot[i] }
    }

    /// `((ξ − K)²)`.
    pub fn xi_minus_k_sq(&self, xi: &XiData) -> i64 {
        xi.sq - 2 * xi.k_dot + self.k_sq
    }

    /// `(ξ − K, c)`.
    pub fn xi_minus_k_dot(&self, c: &ClassView) -> i64 {
        c.xi_dot - c.k_dot
    }

    /// `dim M_H(y) mod 4 = −(ξ²) − 3χ_h mod 4`.
    pub fn dim_mod4(&self, xi: &XiData) -> i64 {
        (-xi.sq - 3 * self.chi_h).rem_euclid(4)
    }

    /// `4χ(y) = ((ξ−K)²) − (K²) − dim + 5χ_h` for a given dimension.
    pub fn four_chi_y(&self, xi: &XiData, dim: i64) -> i64 {
        self.xi_minus_k_sq(xi) - self.k_sq - dim + 5 * self.chi_h
    }

    /// The sign `(−1)^{(ξ, ξ+K)/2}` relating the complex and the usual
    /// orientation.
    pub fn orientation_sign(&self, xi: &XiData) -> i64 {
        sign((xi.sq + xi.k_dot) / 2)
    }

    /// `(−1)^{(K, K+c)/2}`.
    pub fn class_sign(&self, c: &ClassView) -> i64 {
        sign((self.k_sq + c.k_dot) / 2)
    }

    /// The α-pairing indeterminate of basis vector `k`.
    pub fn alpha_var(&self, k: usize) -> Var {
        Var::y(k)
    }
}
