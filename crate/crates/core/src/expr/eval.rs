//! Binding atoms to concrete functions and evaluating expressions in `f64`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::ToPrimitive;

use super::{Expr, Poly, Var};
use crate::error::{Error, Result};

/// A concrete function of `args.len()` reals, evaluated with the given
/// partial-derivative multi-index.
pub type NumericFn = Arc<dyn Fn(&[f64], &[u32]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct BindingEnv {
    fns: BTreeMap<String, NumericFn>,
    /// Denominators with smaller magnitude raise `DivisionNearZero`.
    pub eps: f64,
}

impl Default for BindingEnv {
    fn default() -> Self {
        BindingEnv {
            fns: BTreeMap::new(),
            eps: 1e-12,
        }
    }
}

impl fmt::Debug for BindingEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BindingEnv")
            .field("names", &self.fns.keys().collect::<Vec<_>>())
            .field("eps", &self.eps)
            .finish()
    }
}

impl BindingEnv {
    pub fn new() -> Self {
        BindingEnv::default()
    }

    pub fn bind(&mut self, name: impl Into<String>, f: NumericFn) -> &mut Self {
        self.fns.insert(name.into(), f);
        self
    }

    pub fn with(mut self, name: impl Into<String>, f: NumericFn) -> Self {
        self.bind(name, f);
        self
    }

    pub fn get(&self, name: &str) -> Option<&NumericFn> {
        self.fns.get(name)
    }

    pub fn extend(&mut self, other: &BindingEnv) {
        for (k, v) in &other.fns {
            self.fns.insert(k.clone(), v.clone());
        }
    }

    pub fn compile(&self, e: &Expr) -> Result<Compiled> {
        let mut c = Compiled {
            slots: Vec::new(),
            index: BTreeMap::new(),
            root: CExpr::default(),
            eps: self.eps,
        };
        c.root = c.compile_expr(e, self)?;
        Ok(c)
    }

    /// One-shot evaluation at `(x, y)`.
    pub fn eval(&self, e: &Expr, x: f64, y: f64) -> Result<f64> {
        self.compile(e)?.eval(x, y)
    }
}

type CPoly = Vec<(f64, Vec<(usize, u32)>)>;

#[derive(Clone, Default)]
struct CExpr {
    num: CPoly,
    den: Vec<(CPoly, u32)>,
}

enum Slot {
    X,
    Y,
    Atom {
        f: NumericFn,
        derivs: Vec<u32>,
        args: Vec<CExpr>,
    },
}

/// An expression lowered to `f64` with every atom resolved.
pub struct Compiled {
    slots: Vec<Slot>,
    index: BTreeMap<Var, usize>,
    root: CExpr,
    eps: f64,
}

/// `v^e` by multiplication for the small exponents that dominate.
pub(crate) fn ipow(v: f64, e: u32) -> f64 {
    match e {
        0 => 1.0,
        1 => v,
        2 => v * v,
        3 => v * v * v,
        _ => v.powi(e as i32),
    }
}

fn eval_cpoly(p: &CPoly, vals: &[f64]) -> f64 {
    p.iter()
        .map(|(c, m)| m.iter().fold(*c, |acc, (i, e)| acc * ipow(vals[*i], *e)))
        .sum()
}

impl Compiled {
    fn compile_poly(&mut self, p: &Poly, env: &BindingEnv) -> Result<CPoly> {
        let mut out = Vec::with_capacity(p.len());
        for (m, c) in &p.terms {
            let mut vs = Vec::with_capacity(m.0.len());
            for (v, e) in &m.0 {
                vs.push((self.slot(v, env)?, *e));
            }
            out.push((c.to_f64().unwrap_or(f64::NAN), vs));
        }
        Ok(out)
    }

    fn compile_expr(&mut self, e: &Expr, env: &BindingEnv) -> Result<CExpr> {
        let num = self.compile_poly(e.numerator(), env)?;
        let mut den = Vec::new();
        for (p, k) in e.denominator_factors() {
            den.push((self.compile_poly(p, env)?, *k));
        }
        Ok(CExpr { num, den })
    }

    fn slot(&mut self, v: &Var, env: &BindingEnv) -> Result<usize> {
        if let Some(i) = self.index.get(v) {
            return Ok(*i);
        }
        let s = match v {
            Var::X => Slot::X,
            Var::Y => Slot::Y,
            Var::Atom(a) => {
                let f = env
                    .get(a.name())
                    .ok_or_else(|| Error::UnboundAtom(a.name().to_string()))?
                    .clone();
                let args = a
                    .args()
                    .iter()
                    .map(|arg| self.compile_expr(arg, env))
                    .collect::<Result<Vec<_>>>()?;
                Slot::Atom {
                    f,
                    derivs: a.derivs().to_vec(),
                    args,
                }
            }
        };
        self.slots.push(s);
        let i = self.slots.len() - 1;
        self.index.insert(v.clone(), i);
        Ok(i)
    }

    fn eval_cexpr(&self, e: &CExpr, vals: &[f64]) -> Result<f64> {
        let n = eval_cpoly(&e.num, vals);
        if e.den.is_empty() {
            return Ok(n);
        }
        let d: f64 = e
            .den
            .iter()
            .map(|(p, k)| eval_cpoly(p, vals).powi(*k as i32))
            .product();
        if d.abs() < self.eps {
            return Err(Error::DivisionNearZero {
                value: d,
                eps: self.eps,
            });
        }
        Ok(n / d)
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        let mut vals = Vec::with_capacity(self.slots.len());
        let mut argv = Vec::with_capacity(2);
        for s in &self.slots {
            let v = match s {
                Slot::X => x,
                Slot::Y => y,
                Slot::Atom { f, derivs, args } => {
                    argv.clear();
                    for a in args {
                        argv.push(self.eval_cexpr(a, &vals)?);
                    }
                    f(&argv, derivs)
                }
            };
            vals.push(v);
        }
        self.eval_cexpr(&self.root, &vals)
    }
}
