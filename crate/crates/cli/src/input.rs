//! JSON input files.
//!
//! A transform file either asks for the generic transform or lists
//! polynomial fields, each as a map from `"i,j"` to the rational
//! coefficient of `x^i y^j`; omitted fields take their identity value:
//!
//! ```json
//! { "fields": { "fV": { "0,0": "1", "0,1": "1" } } }
//! ```
//!
//! A function file gives bump functions for one-variable components
//! (`g_1_00`, `g_m1_11`, ...) or for the eight `(u, w)` slots (`phi00`, ...,
//! `A00`).

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;
use z22_core::expr::Rat;
use z22_core::numeric::{Bump2, BumpFunction};
use z22_core::transform::CoordinateChange;
use z22_core::{Error, Expr, Result};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformFile {
    #[serde(default)]
    pub generic: bool,
    #[serde(default)]
    pub fields: BTreeMap<String, BTreeMap<String, String>>,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpSpec {
    pub center: f64,
    pub radius: f64,
    #[serde(default = "one")]
    pub amp: f64,
    #[serde(default)]
    pub tilt: f64,
}

fn one() -> f64 {
    1.0
}

impl BumpSpec {
    pub fn bump(&self) -> Result<BumpFunction> {
        if !(self.radius > 0.0) {
            return Err(Error::Invalid(format!("bump radius {} must be positive", self.radius)));
        }
        Ok(BumpFunction {
            center: self.center,
            radius: self.radius,
            amp: self.amp,
            tilt: self.tilt,
        })
    }
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bump2Spec {
    pub u: BumpSpec,
    pub w: BumpSpec,
}

impl Bump2Spec {
    pub fn bump(&self) -> Result<Bump2> {
        Ok(Bump2 { u: self.u.bump()?, w: self.w.bump()? })
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionFile {
    #[serde(default)]
    pub components: BTreeMap<String, BumpSpec>,
    #[serde(default)]
    pub slots: BTreeMap<String, Bump2Spec>,
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

fn parse_poly(terms: &BTreeMap<String, String>) -> Result<Expr> {
    let mut out = Expr::zero();
    for (key, coeff) in terms {
        let bad = || Error::Invalid(format!("bad monomial key `{key}`, expected \"i,j\""));
        let (i, j) = key.split_once(',').ok_or_else(bad)?;
        let i: i32 = i.trim().parse().map_err(|_| bad())?;
        let j: i32 = j.trim().parse().map_err(|_| bad())?;
        if i < 0 || j < 0 {
            return Err(bad());
        }
        let c = Rat::from_str(coeff.trim()).map_err(|_| Error::Invalid(format!("bad coefficient `{coeff}`")))?;
        out = &out + &(&Expr::constant(c) * &(&Expr::x().pow(i)? * &Expr::y().pow(j)?));
    }
    Ok(out)
}

impl TransformFile {
    pub fn parse_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Invalid(e.to_string()))
    }

    pub fn to_transform(&self) -> Result<CoordinateChange> {
        if self.generic {
            if !self.fields.is_empty() {
                return Err(Error::Invalid("`generic` and `fields` are exclusive".into()));
            }
            return Ok(CoordinateChange::generic());
        }
        let mut fields = CoordinateChange::identity().fields().map(Expr::clone);
        for (name, terms) in &self.fields {
            let i = CoordinateChange::NAMES
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| Error::Invalid(format!("unknown transform field `{name}`")))?;
            fields[i] = parse_poly(terms)?;
        }
        Ok(CoordinateChange::from_fields(fields))
    }
}
