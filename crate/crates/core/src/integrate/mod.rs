//! The three candidate integrals and their behaviour under coordinate
//! changes.
//!
//! All three start from the Berezinian section `Γ · F∘T` written in the old
//! coordinates. Its `ξη` sector is a function `T(x, z)`; definitions 1 and 2
//! read a single z-power of it, definition 3 reads the `zξη` slot as a
//! function of `(x, y)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::berezinian::ber_closed;
use crate::error::{Error, Result};
use crate::expr::{Atom, Expr};
use crate::graded::Degree;
use crate::superfn::{component_degree, SuperFunction, Window};
use crate::transform::CoordinateChange;

mod def3;
mod suite;

pub use def3::{decompose_total_derivative, integrate_def3, Def3Options, Def3Result, Def3Variant};
pub use suite::{invariance_suite, SuiteConfig, SuiteReport, TrialReport};

/// Name of the component atom of `z^k ξ^a η^b`, e.g. `g_2_00`, `g_m1_11`.
pub fn component_name(k: i64, a: u8, b: u8) -> String {
    if k < 0 {
        format!("g_m{}_{a}{b}", -k)
    } else {
        format!("g_{k}_{a}{b}")
    }
}

/// Inverse of [`component_name`].
pub fn parse_component_name(s: &str) -> Option<(i64, u8, u8)> {
    let rest = s.strip_prefix("g_")?;
    let (k, ab) = rest.split_once('_')?;
    let k = match k.strip_prefix('m') {
        Some(n) => -n.parse::<i64>().ok()?,
        None => k.parse().ok()?,
    };
    let ab = ab.as_bytes();
    if ab.len() != 2 || !ab.iter().all(|c| *c == b'0' || *c == b'1') {
        return None;
    }
    Some((k, ab[0] - b'0', ab[1] - b'0'))
}

/// `Σ g_{kab}(x) z^k ξ^a η^b` over `k ∈ [lo, hi]` with one fresh atom per
/// component, skipping the components in `zeroed`.
pub fn generic_function(lo: i64, hi: i64, zeroed: &BTreeSet<(i64, u8, u8)>) -> SuperFunction {
    let mut comps = BTreeMap::new();
    for k in lo..=hi {
        for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            if !zeroed.contains(&(k, a, b)) {
                comps.insert((k, a, b), Expr::func1(&component_name(k, a, b)));
            }
        }
    }
    SuperFunction::from_components(&comps, Window::new(-lo.min(0), hi))
        .expect("components inside their own window")
        .with_declared_degree(Degree::EVEN)
}

/// `Γ(T) · F∘T`: the section in the old coordinates.
pub fn old_section(f: &SuperFunction, t: &CoordinateChange) -> Result<SuperFunction> {
    let gamma = ber_closed(t)?.to_superfunction();
    Ok(gamma.mul(&t.pullback(f)?))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObstructionTerm {
    pub k: i64,
    pub alpha: u8,
    pub beta: u8,
    /// Order of the derivative of the component that appears.
    pub derivative_order: u32,
    pub multiplier: Expr,
}

impl ObstructionTerm {
    pub fn component(&self) -> String {
        component_name(self.k, self.alpha, self.beta)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegralResult {
    /// Multiplier times the component whose integral is being defined.
    pub canonical_term: Expr,
    pub canonical_multiplier: Expr,
    pub obstructions: Vec<ObstructionTerm>,
    /// Full integrand in `x`: canonical plus obstructions.
    pub integrand: Expr,
    pub numeric_value: Option<f64>,
    pub degree_warning: Option<String>,
}

impl IntegralResult {
    fn zero() -> Self {
        IntegralResult {
            canonical_term: Expr::zero(),
            canonical_multiplier: Expr::zero(),
            obstructions: Vec::new(),
            integrand: Expr::zero(),
            numeric_value: Some(0.0),
            degree_warning: None,
        }
    }

    pub fn is_well_defined(&self) -> bool {
        self.obstructions.iter().all(|o| o.multiplier.is_zero())
    }

    pub fn obstruction_keys(&self) -> BTreeSet<(i64, u8, u8)> {
        self.obstructions.iter().map(|o| (o.k, o.alpha, o.beta)).collect()
    }

    /// Sum of the obstruction multipliers for one component and derivative
    /// order.
    pub fn multiplier(&self, k: i64, a: u8, b: u8, order: u32) -> Expr {
        self.obstructions
            .iter()
            .filter(|o| (o.k, o.alpha, o.beta, o.derivative_order) == (k, a, b, order))
            .fold(Expr::zero(), |acc, o| &acc + &o.multiplier)
    }
}

impl fmt::Display for IntegralResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "canonical: {}", self.canonical_term)?;
        for o in &self.obstructions {
            let primes = "'".repeat(o.derivative_order as usize);
            writeln!(f, "obstruction {}{}: {}", o.component(), primes, o.multiplier)?;
        }
        if let Some(w) = &self.degree_warning {
            writeln!(f, "warning: {w}")?;
        }
        Ok(())
    }
}

fn is_component(a: &Atom) -> bool {
    parse_component_name(a.name()).is_some()
}

/// Splits a `z`-coefficient of the section into the canonical term for
/// `g_{k11}` with multiplier `canonical` and obstructions.
fn classify(coeff: &Expr, k: i64, canonical: Expr) -> Result<IntegralResult> {
    let parts = coeff
        .split_linear(&is_component)
        .ok_or_else(|| Error::Invalid("integrand is not linear in the components".into()))?;
    let mut out = IntegralResult {
        canonical_term: Expr::zero(),
        canonical_multiplier: canonical.clone(),
        obstructions: Vec::new(),
        integrand: coeff.clone(),
        numeric_value: None,
        degree_warning: None,
    };
    for (atom, mult) in parts {
        if mult.is_zero() {
            continue;
        }
        let Some(atom) = atom else {
            return Err(Error::Invalid(format!("component-free term {mult}")));
        };
        let (kk, a, b) = parse_component_name(atom.name()).expect("keyed on components");
        let order = atom.derivative_order();
        let mut mult = mult;
        if (kk, a, b, order) == (k, 1, 1, 0) {
            out.canonical_term = &canonical * &Expr::atom(atom.clone());
            mult = &mult - &canonical;
            if mult.is_zero() {
                continue;
            }
        }
        out.obstructions.push(ObstructionTerm {
            k: kk,
            alpha: a,
            beta: b,
            derivative_order: order,
            multiplier: mult,
        });
    }
    Ok(out)
}

fn degree_warning(k: i64) -> Option<String> {
    let d = component_degree(Degree::EVEN, k, 1, 1);
    (d != Degree::EVEN).then(|| {
        format!(
            "integrand {} has degree ({},{}) but the integral has degree (0,0)",
            component_name(k, 1, 1),
            d.a1,
            d.a2
        )
    })
}

/// Coefficient of `z^k ξη` in the old-coordinate section; a function of `x`.
fn section_coefficient(f: &SuperFunction, t: &CoordinateChange, k: i64) -> Result<Expr> {
    old_section(f, t)?.coefficient(k, 1, 1)
}

/// `∫ g_{ℓ11}(u) du` computed in the old coordinates.
pub fn integrate_def1(f: &SuperFunction, t: &CoordinateChange, ell: u32) -> Result<IntegralResult> {
    let ell = ell as i64;
    if f.window.laurent_depth > 0 && f.window != Window::EXACT {
        return Err(Error::Invalid("definition 1 needs a Taylor function".into()));
    }
    if f.window.trunc < ell + 1 {
        return Err(Error::TruncationTooShallow {
            have: f.window.trunc,
            need: ell + 1,
        });
    }
    let coeff = section_coefficient(f, t, ell)?;
    let canonical = (&t.jb() * &t.f_v.pow(ell as i32)?).at_y0()?;
    let mut r = classify(&coeff, ell, canonical)?;
    r.degree_warning = degree_warning(ell);
    Ok(r)
}

/// `∫ g_{−ℓ11}(u) du` for a Laurent function of depth `M`.
pub fn integrate_def2(f: &SuperFunction, t: &CoordinateChange, ell: u32) -> Result<IntegralResult> {
    let ell = ell as i64;
    let m = f.window.laurent_depth;
    if ell > m {
        return Ok(IntegralResult::zero());
    }
    if t.f_v.at_y0()?.is_zero() {
        return Err(Error::PoleAtOrigin);
    }
    if f.window.trunc < 2 - ell {
        return Err(Error::TruncationTooShallow {
            have: f.window.trunc,
            need: 2 - ell,
        });
    }
    let coeff = section_coefficient(f, t, -ell)?;
    let canonical = (&t.jb() * &t.f_v.pow(-ell as i32)?).at_y0()?;
    let mut r = classify(&coeff, -ell, canonical)?;
    r.degree_warning = degree_warning(-ell);
    Ok(r)
}

/// Components that must vanish for definition 1 at level `ℓ`, read off the
/// obstructions for a generic function and a generic transform.
pub fn constraints_def1(ell: u32) -> Result<BTreeSet<(i64, u8, u8)>> {
    let f = generic_function(0, ell as i64 + 2, &BTreeSet::new());
    let r = integrate_def1(&f, &CoordinateChange::generic(), ell)?;
    Ok(r.obstruction_keys())
}
