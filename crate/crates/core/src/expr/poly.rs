//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Indeterminates are the base variables `x`, `y` and function atoms. Atoms
//! with distinct derivative indices or arguments are independent
//! indeterminates.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::Expr;

pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// A function atom `name^{(derivs)}(args…)`.
///
/// Two-variable coefficient functions such as `fU(x, y)` are atoms whose
/// arguments are the base variables; composites such as `g(fU(x, y))` are
/// atoms whose argument is another expression. Differentiation always goes
/// through the chain rule on the arguments.
#[derive(Clone)]
pub struct Atom(Arc<AtomData>);

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct AtomData {
    pub name: String,
    pub derivs: Vec<u32>,
    pub args: Vec<Expr>,
}

impl Atom {
    pub fn new(name: impl Into<String>, derivs: Vec<u32>, args: Vec<Expr>) -> Self {
        assert_eq!(derivs.len(), args.len(), "one derivative slot per argument");
        Atom(Arc::new(AtomData {
            name: name.into(),
            derivs,
            args,
        }))
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn derivs(&self) -> &[u32] {
        &self.0.derivs
    }

    pub fn args(&self) -> &[Expr] {
        &self.0.args
    }

    pub fn derivative_order(&self) -> u32 {
        self.0.derivs.iter().sum()
    }

    /// Same function and arguments, derivative index in slot `i` bumped.
    pub fn bumped(&self, i: usize) -> Atom {
        let mut derivs = self.0.derivs.clone();
        derivs[i] += 1;
        Atom(Arc::new(AtomData {
            name: self.0.name.clone(),
            derivs,
            args: self.0.args.clone(),
        }))
    }

    pub fn with_args(&self, args: Vec<Expr>) -> Atom {
        Atom::new(self.0.name.clone(), self.0.derivs.clone(), args)
    }
}

impl PartialEq for Atom {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}
impl Eq for Atom {}

impl PartialOrd for Atom {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Atom {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            Ordering::Equal
        } else {
            self.0.cmp(&other.0)
        }
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = &self.0.derivs;
        let args = &self.0.args;
        write!(f, "{}", self.0.name)?;
        match args.len() {
            2 => {
                if d[0] + d[1] > 0 {
                    write!(f, "_{}{}", "x".repeat(d[0] as usize), "y".repeat(d[1] as usize))?;
                }
            }
            1 => match d[0] {
                0 => {}
                n @ 1..=3 => write!(f, "{}", "'".repeat(n as usize))?,
                n => write!(f, "^({n})")?,
            },
            _ => {
                if d.iter().any(|&k| k > 0) {
                    write!(f, "^{d:?}")?;
                }
            }
        }
        let default_args = match args.len() {
            2 => args[0] == Expr::x() && args[1] == Expr::y(),
            1 => args[0] == Expr::x(),
            _ => args.is_empty(),
        };
        if !default_args {
            let rendered: Vec<String> = args.iter().map(|a| a.to_string()).collect();
            write!(f, "({})", rendered.join(","))?;
        }
        Ok(())
    }
}

/// An indeterminate. The derived order puts `x` first, then `y`, then atoms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Var {
    X,
    Y,
    Atom(Atom),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X => write!(f, "x"),
            Var::Y => write!(f, "y"),
            Var::Atom(a) => write!(f, "{a}"),
        }
    }
}

/// A power product, sorted by variable, no zero exponents.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Mono(pub Vec<(Var, u32)>);

impl Mono {
    pub fn one() -> Self {
        Mono(Vec::new())
    }

    pub fn var(v: Var, e: u32) -> Self {
        if e == 0 {
            Mono::one()
        } else {
            Mono(vec![(v, e)])
        }
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, v: &Var) -> u32 {
        self.0
            .iter()
            .find(|(w, _)| w == v)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0.clone(), a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Mono(out)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Mono) -> Option<Mono> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for (v, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 == *v {
                let f = other.0[j].1;
                if f > *e {
                    return None;
                }
                if e - f > 0 {
                    out.push((v.clone(), e - f));
                }
                j += 1;
            } else if j < other.0.len() && other.0[j].0 < *v {
                return None;
            } else {
                out.push((v.clone(), *e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Mono(out))
    }

    /// Componentwise minimum of exponents.
    pub fn gcd(&self, other: &Mono) -> Mono {
        let mut out = Vec::new();
        let mut j = 0;
        for (v, e) in &self.0 {
            while j < other.0.len() && other.0[j].0 < *v {
                j += 1;
            }
            if j < other.0.len() && other.0[j].0 == *v {
                out.push((v.clone(), (*e).min(other.0[j].1)));
            }
        }
        Mono(out)
    }
}

/// Lexicographic order with `x > y > atoms` (atoms by their own order).
impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (&self.0, &other.0);
        for (p, q) in a.iter().zip(b.iter()) {
            match p.0.cmp(&q.0) {
                // `self` has positive exponent in a higher-priority variable.
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
                Ordering::Equal => match p.1.cmp(&q.1) {
                    Ordering::Equal => {}
                    o => return o,
                },
            }
        }
        a.len().cmp(&b.len())
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(v, e)| if *e == 1 { v.to_string() } else { format!("{v}^{e}") })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Poly {
    pub terms: BTreeMap<Mono, Rat>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Rat) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(Mono::one(), c);
        }
        p
    }

    pub fn one() -> Self {
        Poly::constant(Rat::one())
    }

    pub fn var(v: Var) -> Self {
        Poly::monomial(Mono::var(v, 1), Rat::one())
    }

    pub fn monomial(m: Mono, c: Rat) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant value if the polynomial has no indeterminates.
    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => self.terms.get(&Mono::one()).cloned(),
            _ => None,
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn leading(&self) -> Option<(&Mono, &Rat)> {
        self.terms.last_key_value()
    }

    fn add_term(&mut self, m: Mono, c: Rat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn scale(&self, k: &Rat) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn mul_mono(&self, m: &Mono, k: &Rat) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(n, c)| (n.mul(m), c * k)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let (small, big) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = Poly::zero();
        for (m, c) in &small.terms {
            for (n, d) in &big.terms {
                out.add_term(m.mul(n), c * d);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::one();
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Exact quotient, or `None` when `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        let (lm, lc) = divisor.leading()?;
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if divisor.len() == 1 {
            let mut q = Poly::zero();
            for (m, c) in &self.terms {
                q.terms.insert(m.div(lm)?, c / lc);
            }
            return Some(q);
        }
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((rm, rc)) = rem.leading() {
            let qm = rm.div(lm)?;
            let qc = rc / lc;
            rem = rem.sub(&divisor.mul_mono(&qm, &qc));
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    pub fn variables(&self) -> Vec<Var> {
        let mut vs: Vec<Var> = self
            .terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(v, _)| v.clone()))
            .collect();
        vs.sort();
        vs.dedup();
        vs
    }

    /// Formal partial derivative with respect to the indeterminate `v`.
    pub fn partial(&self, v: &Var) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if e == 0 {
                continue;
            }
            let rest: Vec<(Var, u32)> = m
                .0
                .iter()
                .filter_map(|(w, f)| {
                    if w == v {
                        (f > &1).then(|| (w.clone(), f - 1))
                    } else {
                        Some((w.clone(), *f))
                    }
                })
                .collect();
            out.add_term(Mono(rest), c * rat(e as i64));
        }
        out
    }

    /// Splits off the monomial content and rational content:
    /// `self = content · mono · primitive`, with `primitive` having coprime
    /// integer coefficients and a positive leading coefficient.
    pub fn factor_content(&self) -> (Rat, Mono, Poly) {
        if self.is_zero() {
            return (Rat::zero(), Mono::one(), Poly::zero());
        }
        let mut keys = self.terms.keys();
        let mut mono = keys.next().unwrap().clone();
        for m in keys {
            if mono.is_one() {
                break;
            }
            mono = mono.gcd(m);
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut content = BigRational::new(num_gcd, den_lcm);
        if self.leading().unwrap().1.is_negative() {
            content = -content;
        }
        let prim = Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.div(&mono).unwrap(), c / &content))
                .collect(),
        };
        (content, mono, prim)
    }
}

fn fmt_rat(c: &Rat) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            if m.is_one() {
                write!(f, "{}", fmt_rat(&a))?;
            } else if a.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", fmt_rat(&a))?;
            }
        }
        Ok(())
    }
}
