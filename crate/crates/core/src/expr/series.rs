//! Taylor/Laurent expansion in `y` around `y = 0`.

use std::collections::BTreeMap;

use num_traits::One;

use super::{rat, Base, Expr, Poly, Rat, Var};
use crate::error::{Error, Result};

/// Coefficients of `y^{min_pow}, y^{min_pow+1}, …` up to a requested order.
#[derive(Clone, Debug, PartialEq)]
pub struct YSeries {
    pub min_pow: i64,
    pub coeffs: Vec<Expr>,
}

impl YSeries {
    pub fn max_pow(&self) -> i64 {
        self.min_pow + self.coeffs.len() as i64 - 1
    }

    /// Coefficient of `y^j`; zero below `min_pow`.
    pub fn coeff(&self, j: i64) -> Expr {
        if j < self.min_pow || j > self.max_pow() {
            return Expr::zero();
        }
        self.coeffs[(j - self.min_pow) as usize].clone()
    }

    /// Reassembles `Σ c_j y^j`.
    pub fn to_expr(&self) -> Result<Expr> {
        let mut out = Expr::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            let j = self.min_pow + i as i64;
            out = &out + &(c * &Expr::y().pow(j as i32)?);
        }
        Ok(out)
    }
}

type Trunc = Vec<Expr>;

fn trunc_mul(a: &Trunc, b: &Trunc, n: usize) -> Trunc {
    let mut out = vec![Expr::zero(); n + 1];
    for (i, ai) in a.iter().enumerate().take(n + 1) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(n + 1 - i) {
            if bj.is_zero() {
                continue;
            }
            out[i + j] = &out[i + j] + &(ai * bj);
        }
    }
    out
}

fn trunc_inv(a: &Trunc, n: usize) -> Result<Trunc> {
    let a0 = a.first().cloned().unwrap_or_default();
    if a0.is_zero() {
        return Err(Error::PoleAtOrigin);
    }
    let inv0 = a0.recip()?;
    let mut out: Trunc = vec![inv0.clone()];
    for k in 1..=n {
        let mut s = Expr::zero();
        for j in 1..=k.min(a.len() - 1) {
            s = &s + &(&a[j] * &out[k - j]);
        }
        out.push(-&(&s * &inv0));
    }
    Ok(out)
}

fn trunc_pow(a: &Trunc, e: u32, n: usize) -> Trunc {
    let mut out = vec![Expr::one()];
    for _ in 0..e {
        out = trunc_mul(&out, a, n);
    }
    out
}

struct Expander {
    order: usize,
    vars: BTreeMap<Var, Trunc>,
}

impl Expander {
    fn var_series(&mut self, v: &Var) -> Result<Trunc> {
        if let Some(s) = self.vars.get(v) {
            return Ok(s.clone());
        }
        let s = match v {
            Var::X => vec![Expr::x()],
            Var::Y => vec![Expr::zero(), Expr::one()],
            Var::Atom(a) => {
                let mut e = Expr::atom(a.clone());
                let mut fact = Rat::one();
                let mut out = Vec::with_capacity(self.order + 1);
                for j in 0..=self.order {
                    if j > 0 {
                        fact *= rat(j as i64);
                        e = e.diff(Base::Y);
                    }
                    out.push(e.at_y0()?.scale(&(Rat::one() / &fact)));
                    if !e.depends_on_y() {
                        // Higher y-derivatives vanish.
                        break;
                    }
                }
                out
            }
        };
        self.vars.insert(v.clone(), s.clone());
        Ok(s)
    }

    fn poly_series(&mut self, p: &Poly) -> Result<Trunc> {
        let n = self.order;
        let mut out = vec![Expr::zero(); n + 1];
        let mut powers: BTreeMap<(Var, u32), Trunc> = BTreeMap::new();
        for (m, c) in &p.terms {
            let mut term: Trunc = vec![Expr::constant(c.clone())];
            for (v, e) in &m.0 {
                let key = (v.clone(), *e);
                let pw = match powers.get(&key) {
                    Some(s) => s.clone(),
                    None => {
                        let base = self.var_series(v)?;
                        let s = trunc_pow(&base, *e, n);
                        powers.insert(key, s.clone());
                        s
                    }
                };
                term = trunc_mul(&term, &pw, n);
            }
            for (i, t) in term.into_iter().enumerate() {
                out[i] = &out[i] + &t;
            }
        }
        Ok(out)
    }
}

impl Expr {
    /// Laurent expansion in `y` up to and including `y^order`.
    ///
    /// A pole is allowed only through explicit `y` factors of the
    /// denominator; any other denominator factor vanishing at `y = 0` is a
    /// [`Error::PoleAtOrigin`].
    pub fn laurent_y(&self, order: i64) -> Result<YSeries> {
        let yfac = Poly::var(Var::Y);
        let shift = self
            .den
            .iter()
            .find(|(p, _)| *p == yfac)
            .map(|(_, e)| *e as i64)
            .unwrap_or(0);
        let min_pow = -shift;
        if order < min_pow {
            return Ok(YSeries {
                min_pow,
                coeffs: Vec::new(),
            });
        }
        let n = (order + shift) as usize;
        let mut ex = Expander {
            order: n,
            vars: BTreeMap::new(),
        };
        let mut acc = ex.poly_series(&self.num)?;
        for (p, e) in &self.den {
            if *p == yfac {
                continue;
            }
            let s = ex.poly_series(p)?;
            let inv = trunc_inv(&s, n)?;
            acc = trunc_mul(&acc, &trunc_pow(&inv, *e, n), n);
        }
        acc.resize(n + 1, Expr::zero());
        Ok(YSeries {
            min_pow,
            coeffs: acc,
        })
    }

    /// Taylor coefficients in `y` up to `order`; poles are an error.
    pub fn series_y(&self, order: u32) -> Result<YSeries> {
        let s = self.laurent_y(order as i64)?;
        if s.min_pow < 0 && s.coeffs.iter().take((-s.min_pow) as usize).any(|c| !c.is_zero()) {
            return Err(Error::PoleAtOrigin);
        }
        let skip = (-s.min_pow).max(0) as usize;
        Ok(YSeries {
            min_pow: 0,
            coeffs: s.coeffs.into_iter().skip(skip).collect(),
        })
    }

    /// Coefficient of `y^j` in the Laurent expansion.
    pub fn y_coeff(&self, j: i64) -> Result<Expr> {
        Ok(self.laurent_y(j)?.coeff(j))
    }
}
