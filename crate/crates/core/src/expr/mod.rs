//! Symbolic scalar expressions in the even base variables `x`, `y`.
//!
//! An [`Expr`] is a fraction `num / Π pᵢ^{eᵢ}` whose numerator is a
//! polynomial over `x`, `y` and function atoms, and whose denominator is a
//! list of primitive polynomial factors. Constants live in the numerator.
//! Arithmetic cancels denominator factors that divide the numerator exactly,
//! so `normalize` is the identity on values built through the public API.

mod eval;
mod poly;
mod series;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub use eval::{BindingEnv, Compiled, NumericFn};
pub(crate) use eval::ipow;
pub use poly::{rat, rat_frac, Atom, Mono, Poly, Rat, Var};
pub use series::YSeries;

/// Base variable to differentiate by.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Base {
    X,
    Y,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Expr {
    num: Poly,
    den: Vec<(Poly, u32)>,
}

impl Expr {
    pub fn zero() -> Self {
        Expr::default()
    }

    pub fn one() -> Self {
        Expr::constant(Rat::one())
    }

    pub fn int(n: i64) -> Self {
        Expr::constant(rat(n))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Expr::constant(rat_frac(n, d))
    }

    pub fn constant(c: Rat) -> Self {
        Expr {
            num: Poly::constant(c),
            den: Vec::new(),
        }
    }

    pub fn x() -> Self {
        Expr::var(Var::X)
    }

    pub fn y() -> Self {
        Expr::var(Var::Y)
    }

    pub fn var(v: Var) -> Self {
        Expr::from_poly(Poly::var(v))
    }

    pub fn atom(a: Atom) -> Self {
        Expr::var(Var::Atom(a))
    }

    /// A two-variable function atom `name(x, y)`.
    pub fn func2(name: &str) -> Self {
        Expr::atom(Atom::new(name, vec![0, 0], vec![Expr::x(), Expr::y()]))
    }

    /// A one-variable function atom `name(x)`.
    pub fn func1(name: &str) -> Self {
        Expr::atom(Atom::new(name, vec![0], vec![Expr::x()]))
    }

    /// `name(args…)` with no derivatives.
    pub fn apply(name: &str, args: Vec<Expr>) -> Self {
        let d = vec![0; args.len()];
        Expr::atom(Atom::new(name, d, args))
    }

    pub fn from_poly(p: Poly) -> Self {
        Expr {
            num: p,
            den: Vec::new(),
        }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator_factors(&self) -> &[(Poly, u32)] {
        &self.den
    }

    pub fn denominator(&self) -> Poly {
        self.den
            .iter()
            .fold(Poly::one(), |acc, (p, e)| acc.mul(&p.pow(*e)))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    pub fn as_constant(&self) -> Option<Rat> {
        if self.den.is_empty() {
            self.num.as_constant()
        } else {
            None
        }
    }

    /// Builds `num / Π factors^e` with fresh cancellation.
    fn assemble(num: Poly, factors: BTreeMap<Poly, u32>) -> Expr {
        let mut e = Expr {
            num,
            den: factors.into_iter().filter(|(_, k)| *k > 0).collect(),
        };
        e.cancel();
        e
    }

    fn cancel(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        for (p, e) in self.den.iter_mut() {
            while *e > 0 {
                match self.num.div_exact(p) {
                    Some(q) => {
                        self.num = q;
                        *e -= 1;
                    }
                    None => break,
                }
            }
        }
        self.den.retain(|(_, e)| *e > 0);
    }

    /// Splits a polynomial destined for the denominator into its constant,
    /// single-variable and primitive parts.
    fn denominator_parts(p: &Poly) -> Result<(Rat, BTreeMap<Poly, u32>)> {
        if p.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let (c, mono, prim) = p.factor_content();
        let mut factors = BTreeMap::new();
        for (v, e) in mono.0 {
            *factors.entry(Poly::var(v)).or_insert(0) += e;
        }
        if !prim.is_one() {
            *factors.entry(prim).or_insert(0) += 1;
        }
        Ok((c, factors))
    }

    fn den_map(&self) -> BTreeMap<Poly, u32> {
        self.den.iter().cloned().collect()
    }

    pub fn recip(&self) -> Result<Expr> {
        let (c, mut factors) = Expr::denominator_parts(&self.num)?;
        let mut num = Poly::constant(Rat::one() / c);
        // Old denominator factors move up unless they match a new one.
        for (p, e) in &self.den {
            let mut e = *e;
            if let Some(k) = factors.get_mut(p) {
                let m = (*k).min(e);
                *k -= m;
                e -= m;
            }
            num = num.mul(&p.pow(e));
        }
        Ok(Expr::assemble(num, factors))
    }

    pub fn div(&self, other: &Expr) -> Result<Expr> {
        Ok(self * &other.recip()?)
    }

    pub fn pow(&self, e: i32) -> Result<Expr> {
        if e < 0 {
            return self.recip()?.pow(-e);
        }
        let mut out = Expr::one();
        for _ in 0..e {
            out = &out * self;
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rat) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    /// Re-runs factor splitting and cancellation from scratch.
    pub fn normalize(&self) -> Result<Expr> {
        let num = Expr::from_poly(self.num.clone());
        let den = Expr::from_poly(self.denominator());
        num.div(&den)
    }

    pub fn equal(&self, other: &Expr) -> bool {
        (self - other).is_zero()
    }

    /// Formal partial derivative; atoms differentiate through the chain rule.
    pub fn diff(&self, b: Base) -> Expr {
        let mut cache = BTreeMap::new();
        self.diff_cached(b, &mut cache)
    }

    fn diff_cached(&self, b: Base, cache: &mut BTreeMap<Var, Expr>) -> Expr {
        let dnum = poly_diff(&self.num, b, cache);
        if self.den.is_empty() {
            return dnum;
        }
        // d(N/Πp^e) = (N' Πp − N Σ e p' Π_{j≠i} p_j) / Π p^{e+1}
        let mut out = Expr {
            num: Poly::zero(),
            den: Vec::new(),
        };
        out = &out + &(&dnum * &Expr::inv_factors(&self.den));
        for (i, (p, e)) in self.den.iter().enumerate() {
            let dp = poly_diff(p, b, cache);
            if dp.is_zero() {
                continue;
            }
            let mut den = self.den.clone();
            den[i].1 += 1;
            let term = &(&Expr::from_poly(self.num.scale(&rat(-(*e as i64)))) * &dp)
                * &Expr::inv_factors(&den);
            out = &out + &term;
        }
        out
    }

    fn inv_factors(den: &[(Poly, u32)]) -> Expr {
        Expr::assemble(Poly::one(), den.iter().cloned().collect())
    }

    /// Replaces every indeterminate through `f` (memoized per variable).
    pub fn map_vars(&self, f: &mut dyn FnMut(&Var) -> Result<Expr>) -> Result<Expr> {
        let mut cache: BTreeMap<Var, Expr> = BTreeMap::new();
        let num = eval_poly(&self.num, f, &mut cache)?;
        let mut den = Expr::one();
        for (p, e) in &self.den {
            let pe = eval_poly(p, f, &mut cache)?;
            den = &den * &pe.pow(*e as i32)?;
        }
        num.div(&den)
    }

    /// Substitutes `x → sx`, `y → sy`, recursing into atom arguments.
    pub fn subst(&self, sx: &Expr, sy: &Expr) -> Result<Expr> {
        self.map_vars(&mut |v| match v {
            Var::X => Ok(sx.clone()),
            Var::Y => Ok(sy.clone()),
            Var::Atom(a) => {
                let args = a
                    .args()
                    .iter()
                    .map(|e| e.subst(sx, sy))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Expr::atom(a.with_args(args)))
            }
        })
    }

    /// Evaluation at `y = 0` (atoms become `f(x, 0)` and so on).
    pub fn at_y0(&self) -> Result<Expr> {
        self.subst(&Expr::x(), &Expr::zero())
            .map_err(|e| match e {
                Error::ZeroDenominator => Error::PoleAtOrigin,
                other => other,
            })
    }

    pub fn variables(&self) -> Vec<Var> {
        let mut vs = self.num.variables();
        for (p, _) in &self.den {
            vs.extend(p.variables());
        }
        vs.sort();
        vs.dedup();
        vs
    }

    /// All atoms, including those nested inside atom arguments.
    pub fn atoms_deep(&self) -> Vec<Atom> {
        let mut out = Vec::new();
        for v in self.variables() {
            if let Var::Atom(a) = v {
                for arg in a.args() {
                    out.extend(arg.atoms_deep());
                }
                out.push(a);
            }
        }
        out.sort();
        out.dedup();
        out
    }

    pub fn depends_on_y(&self) -> bool {
        self.variables().iter().any(|v| match v {
            Var::Y => true,
            Var::X => false,
            Var::Atom(a) => a.args().iter().any(|e| e.depends_on_y()),
        })
    }

    /// Groups the numerator by the atoms selected by `key`, assuming the
    /// expression is linear in them. Terms free of selected atoms go under
    /// `None`. Returns `None` if some term is not linear in the selection.
    pub fn split_linear(&self, key: &dyn Fn(&Atom) -> bool) -> Option<BTreeMap<Option<Atom>, Expr>> {
        let mut groups: BTreeMap<Option<Atom>, Poly> = BTreeMap::new();
        for (m, c) in &self.num.terms {
            let mut hit: Option<Atom> = None;
            let mut rest = Vec::new();
            for (v, e) in &m.0 {
                match v {
                    Var::Atom(a) if key(a) => {
                        if *e != 1 || hit.is_some() {
                            return None;
                        }
                        hit = Some(a.clone());
                    }
                    _ => rest.push((v.clone(), *e)),
                }
            }
            let g = groups.entry(hit).or_default();
            *g = g.add(&Poly::monomial(Mono(rest), c.clone()));
        }
        Some(
            groups
                .into_iter()
                .map(|(k, p)| {
                    let mut e = Expr {
                        num: p,
                        den: self.den.clone(),
                    };
                    e.cancel();
                    (k, e)
                })
                .collect(),
        )
    }
}

fn var_diff(v: &Var, b: Base, cache: &mut BTreeMap<Var, Expr>) -> Expr {
    match (v, b) {
        (Var::X, Base::X) | (Var::Y, Base::Y) => Expr::one(),
        (Var::X, _) | (Var::Y, _) => Expr::zero(),
        (Var::Atom(a), _) => {
            if let Some(d) = cache.get(v) {
                return d.clone();
            }
            let mut out = Expr::zero();
            for (i, arg) in a.args().iter().enumerate() {
                let da = arg.diff_cached(b, cache);
                if !da.is_zero() {
                    out = &out + &(&Expr::atom(a.bumped(i)) * &da);
                }
            }
            cache.insert(v.clone(), out.clone());
            out
        }
    }
}

fn poly_diff(p: &Poly, b: Base, cache: &mut BTreeMap<Var, Expr>) -> Expr {
    let mut polys = Poly::zero();
    let mut out = Expr::zero();
    for v in p.variables() {
        let dv = var_diff(&v, b, cache);
        if dv.is_zero() {
            continue;
        }
        let dp = p.partial(&v);
        if dv.is_polynomial() {
            polys = polys.add(&dp.mul(&dv.num));
        } else {
            out = &out + &(&Expr::from_poly(dp) * &dv);
        }
    }
    &out + &Expr::from_poly(polys)
}

fn eval_poly(
    p: &Poly,
    f: &mut dyn FnMut(&Var) -> Result<Expr>,
    cache: &mut BTreeMap<Var, Expr>,
) -> Result<Expr> {
    let mut total = Expr::zero();
    let mut poly_part = Poly::zero();
    for (m, c) in &p.terms {
        let mut term = Expr::constant(c.clone());
        for (v, e) in &m.0 {
            if !cache.contains_key(v) {
                let val = f(v)?;
                cache.insert(v.clone(), val);
            }
            let val = &cache[v];
            term = &term * &val.pow(*e as i32)?;
        }
        if term.is_polynomial() {
            poly_part = poly_part.add(&term.num);
        } else {
            total = &total + &term;
        }
    }
    Ok(&total + &Expr::from_poly(poly_part))
}

fn add_exprs(a: &Expr, b: &Expr) -> Expr {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    if a.den == b.den {
        let mut e = Expr {
            num: a.num.add(&b.num),
            den: a.den.clone(),
        };
        e.cancel();
        return e;
    }
    let da = a.den_map();
    let db = b.den_map();
    let mut lcm = da.clone();
    for (p, e) in &db {
        let k = lcm.entry(p.clone()).or_insert(0);
        *k = (*k).max(*e);
    }
    let lift = |num: &Poly, own: &BTreeMap<Poly, u32>| {
        let mut n = num.clone();
        for (p, e) in &lcm {
            let have = own.get(p).copied().unwrap_or(0);
            if *e > have {
                n = n.mul(&p.pow(e - have));
            }
        }
        n
    };
    let num = lift(&a.num, &da).add(&lift(&b.num, &db));
    Expr::assemble(num, lcm)
}

fn mul_exprs(a: &Expr, b: &Expr) -> Expr {
    if a.is_zero() || b.is_zero() {
        return Expr::zero();
    }
    if a.den.is_empty() && b.den.is_empty() {
        return Expr::from_poly(a.num.mul(&b.num));
    }
    let mut den = a.den_map();
    for (p, e) in &b.den {
        *den.entry(p.clone()).or_insert(0) += e;
    }
    Expr::assemble(a.num.mul(&b.num), den)
}

impl Add for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        add_exprs(self, rhs)
    }
}

impl Sub for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        add_exprs(self, &-rhs)
    }
}

impl Mul for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        mul_exprs(self, rhs)
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        add_exprs(&self, &rhs)
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        &self - &rhs
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        mul_exprs(&self, &rhs)
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |p: &Poly| {
            if p.len() > 1 {
                format!("({p})")
            } else {
                p.to_string()
            }
        };
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        let den: Vec<String> = self
            .den
            .iter()
            .map(|(p, e)| {
                if *e == 1 {
                    wrap(p)
                } else {
                    format!("{}^{e}", wrap(p))
                }
            })
            .collect();
        write!(f, "{}/({})", wrap(&self.num), den.join("*"))
    }
}

#[cfg(test)]
mod tests;
