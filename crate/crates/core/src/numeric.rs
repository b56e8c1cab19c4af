//! Concrete functions, quadrature and random sampling for numeric checks.

use std::num::NonZeroUsize;
use std::sync::Arc;

use gauss_quad::legendre::GaussLegendre;
use num_traits::ToPrimitive;
use rand::Rng;

use crate::error::{Error, Result};
use crate::expr::ipow;
use crate::expr::{BindingEnv, Expr, NumericFn, Var};
use crate::transform::CoordinateChange;

/// Truncated Taylor series in `h` about a point.
type Jet = Vec<f64>;

fn jet_mul(a: &Jet, b: &Jet) -> Jet {
    let n = a.len();
    (0..n).map(|k| (0..=k).map(|j| a[j] * b[k - j]).sum()).collect()
}

fn jet_recip(a: &Jet) -> Jet {
    let n = a.len();
    let mut out = vec![0.0; n];
    out[0] = 1.0 / a[0];
    for k in 1..n {
        let s: f64 = (1..=k).map(|j| a[j] * out[k - j]).sum();
        out[k] = -s * out[0];
    }
    out
}

fn jet_exp(a: &Jet) -> Jet {
    let n = a.len();
    let mut out = vec![0.0; n];
    out[0] = a[0].exp();
    for k in 1..n {
        let s: f64 = (1..=k).map(|j| j as f64 * a[j] * out[k - j]).sum();
        out[k] = s / k as f64;
    }
    out
}

/// `amp · (1 + tilt·s) · exp(−1/(1 − s²))` with `s = (t − center)/radius`,
/// zero for `|s| ≥ 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BumpFunction {
    pub center: f64,
    pub radius: f64,
    pub amp: f64,
    pub tilt: f64,
}

impl BumpFunction {
    pub fn new(center: f64, radius: f64, amp: f64) -> Self {
        BumpFunction {
            center,
            radius,
            amp,
            tilt: 0.0,
        }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - self.radius, self.center + self.radius)
    }

    /// `n`-th derivative at `t`.
    pub fn deriv(&self, t: f64, n: u32) -> f64 {
        let s0 = (t - self.center) / self.radius;
        if s0.abs() >= 1.0 {
            return 0.0;
        }
        // Orders 0 and 1 dominate the integrands; skip the jet arithmetic.
        let q = 1.0 - s0 * s0;
        let e = (-1.0 / q).exp();
        match n {
            0 => return self.amp * (1.0 + self.tilt * s0) * e,
            1 => {
                let de = -2.0 * s0 / (q * q) * e;
                return self.amp / self.radius * (self.tilt * e + (1.0 + self.tilt * s0) * de);
            }
            _ => {}
        }
        let n = n as usize;
        let mut s = vec![0.0; n + 1];
        s[0] = s0;
        if n >= 1 {
            s[1] = 1.0 / self.radius;
        }
        let mut q = jet_mul(&s, &s);
        for c in q.iter_mut() {
            *c = -*c;
        }
        q[0] += 1.0;
        let mut e = jet_recip(&q);
        for c in e.iter_mut() {
            *c = -*c;
        }
        let e = jet_exp(&e);
        let mut lin = s.iter().map(|c| self.tilt * c).collect::<Vec<_>>();
        lin[0] += 1.0;
        let v = jet_mul(&lin, &e);
        let fact: f64 = (1..=n).map(|k| k as f64).product();
        self.amp * fact * v[n]
    }

    pub fn value(&self, t: f64) -> f64 {
        self.deriv(t, 0)
    }

    pub fn to_fn(self) -> NumericFn {
        Arc::new(move |args: &[f64], d: &[u32]| self.deriv(args[0], d[0]))
    }

    /// A random bump supported inside `[lo, hi]`.
    pub fn sample<R: Rng>(rng: &mut R, lo: f64, hi: f64, amp: (f64, f64)) -> Self {
        let width = hi - lo;
        let radius = rng.gen_range(0.25..0.5) * width;
        let center = rng.gen_range(lo + radius..=hi - radius);
        BumpFunction {
            center,
            radius,
            amp: rng.gen_range(amp.0..amp.1),
            tilt: rng.gen_range(-0.5..0.5),
        }
    }
}

/// Product `b_u(u) · b_w(w)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bump2 {
    pub u: BumpFunction,
    pub w: BumpFunction,
}

impl Bump2 {
    pub fn eval(&self, u: f64, w: f64, du: u32, dw: u32) -> f64 {
        let a = self.u.deriv(u, du);
        if a == 0.0 {
            return 0.0;
        }
        a * self.w.deriv(w, dw)
    }

    pub fn support(&self) -> [f64; 4] {
        let (a, b) = self.u.support();
        let (c, d) = self.w.support();
        [a, b, c, d]
    }

    pub fn to_fn(self) -> NumericFn {
        Arc::new(move |args: &[f64], d: &[u32]| self.eval(args[0], args[1], d[0], d[1]))
    }

    pub fn sample<R: Rng>(rng: &mut R, support: [f64; 4], amp: (f64, f64)) -> Self {
        let [a, b, c, d] = support;
        let u = BumpFunction::sample(rng, a, b, amp);
        let mut w = BumpFunction::sample(rng, c, d, amp);
        w.amp = 1.0;
        Bump2 { u, w }
    }
}

/// Gauss–Legendre rule on `[a, b]` split into `panels` equal pieces.
#[derive(Clone, Debug)]
pub struct Quadrature {
    rule: Vec<(f64, f64)>,
    pub panels: usize,
}

impl Quadrature {
    pub fn new(order: usize, panels: usize) -> Self {
        let n = NonZeroUsize::new(order.max(1)).unwrap();
        Quadrature {
            rule: GaussLegendre::new(n).as_node_weight_pairs().to_vec(),
            panels: panels.max(1),
        }
    }

    /// Nodes and weights on `[a, b]`.
    pub fn nodes(&self, a: f64, b: f64) -> Vec<(f64, f64)> {
        let h = (b - a) / self.panels as f64;
        let mut out = Vec::with_capacity(self.rule.len() * self.panels);
        for p in 0..self.panels {
            let lo = a + h * p as f64;
            for (x, w) in &self.rule {
                out.push((lo + 0.5 * h * (x + 1.0), 0.5 * h * w));
            }
        }
        out
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> Result<f64>) -> Result<f64> {
        let mut s = 0.0;
        for (x, w) in self.nodes(a, b) {
            let v = f(x)?;
            if !v.is_finite() {
                return Err(Error::NonFiniteValue(x, 0.0));
            }
            s += w * v;
        }
        Ok(s)
    }

    /// Tensor-product rule over `[x0, x1] × [y0, y1]`.
    pub fn integrate2(&self, dom: [f64; 4], mut f: impl FnMut(f64, f64) -> Result<f64>) -> Result<f64> {
        let xs = self.nodes(dom[0], dom[1]);
        let ys = self.nodes(dom[2], dom[3]);
        let mut s = 0.0;
        for (x, wx) in &xs {
            let mut row = 0.0;
            for (y, wy) in &ys {
                let v = f(*x, *y)?;
                if !v.is_finite() {
                    return Err(Error::NonFiniteValue(*x, *y));
                }
                row += wy * v;
            }
            s += wx * row;
        }
        Ok(s)
    }
}

/// `∫∫ f` over a rectangle with `order` nodes per axis and per panel.
pub fn quad2d(f: impl FnMut(f64, f64) -> Result<f64>, dom: [f64; 4], order: usize, panels: usize) -> Result<f64> {
    Quadrature::new(order, panels).integrate2(dom, f)
}

/// A polynomial in `x, y` with its partial derivatives, as a bindable
/// function.
pub fn poly_fn(e: &Expr) -> Result<NumericFn> {
    if !e.is_polynomial() {
        return Err(Error::Invalid(format!("{e} is not a polynomial")));
    }
    let mut terms = Vec::new();
    for (m, c) in &e.numerator().terms {
        for (v, _) in &m.0 {
            if matches!(v, Var::Atom(_)) {
                return Err(Error::Invalid(format!("{e} contains function atoms")));
            }
        }
        let c = c.to_f64().unwrap_or(f64::NAN);
        terms.push((c, m.exponent(&Var::X), m.exponent(&Var::Y)));
    }
    // Derivative tables up to the degree in each variable; anything beyond
    // vanishes.
    let di = terms.iter().map(|t| t.1).max().unwrap_or(0);
    let dj = terms.iter().map(|t| t.2).max().unwrap_or(0);
    let falling = |n: u32, k: u32| ((n - k + 1)..=n).map(|q| q as f64).product::<f64>();
    let mut table = vec![Vec::new(); ((di + 1) * (dj + 1)) as usize];
    for dx in 0..=di {
        for dy in 0..=dj {
            table[(dx * (dj + 1) + dy) as usize] = terms
                .iter()
                .filter(|&&(_, i, j)| i >= dx && j >= dy)
                .map(|&(c, i, j)| (c * falling(i, dx) * falling(j, dy), i - dx, j - dy))
                .collect::<Vec<_>>();
        }
    }
    Ok(Arc::new(move |args: &[f64], d: &[u32]| {
        let (x, y) = (args[0], args.get(1).copied().unwrap_or(0.0));
        let (dx, dy) = (d[0], d.get(1).copied().unwrap_or(0));
        if dx > di || dy > dj {
            return 0.0;
        }
        table[(dx * (dj + 1) + dy) as usize]
            .iter()
            .map(|&(c, i, j)| c * ipow(x, i) * ipow(y, j))
            .sum()
    }))
}

/// Binds the atoms of [`CoordinateChange::generic`] to the fields of a
/// polynomial transform.
pub fn transform_env(t: &CoordinateChange) -> Result<BindingEnv> {
    let mut env = BindingEnv::new();
    for (name, e) in CoordinateChange::NAMES.iter().zip(t.fields()) {
        env.bind(*name, poly_fn(e)?);
    }
    Ok(env)
}

/// Parameters for near-identity transforms
/// `fU = x + εp, fV = 1 + εq, fζ = fθ = 1 + εr, g = εs`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransformSampling {
    /// `ε = eps_num / eps_den`.
    pub eps_num: i64,
    pub eps_den: i64,
    /// `(x, y)` box on which validity is certified.
    pub valid_box: [f64; 4],
    pub max_attempts: usize,
}

impl Default for TransformSampling {
    fn default() -> Self {
        TransformSampling {
            eps_num: 3,
            eps_den: 20,
            valid_box: [-3.0, 3.0, 0.0, 4.0],
            max_attempts: 64,
        }
    }
}

impl TransformSampling {
    pub fn eps(&self) -> f64 {
        self.eps_num as f64 / self.eps_den as f64
    }
}

/// `ε Σ c_ij (x/3)^i (y/4)^j` over `i + j ≤ 2` with `Σ|c_ij| ≤ 1`, exact.
fn small_poly<R: Rng>(rng: &mut R, s: &TransformSampling) -> Expr {
    let mut raw = Vec::new();
    for i in 0..=2i32 {
        for j in 0..=(2 - i) {
            raw.push((i, j, rng.gen_range(-10i64..=10)));
        }
    }
    let total: i64 = raw.iter().map(|r| r.2.abs()).sum::<i64>().max(1);
    let xs = Expr::frac(1, 3) * Expr::x();
    let ys = Expr::frac(1, 4) * Expr::y();
    let mut out = Expr::zero();
    for (i, j, n) in raw {
        if n == 0 {
            continue;
        }
        let c = Expr::frac(n * s.eps_num, total * s.eps_den);
        out = &out + &(&c * &(&xs.pow(i).unwrap() * &ys.pow(j).unwrap()));
    }
    out
}

/// Draws a near-identity polynomial transform, resampling until it is
/// valid on the configured box.
pub fn sample_transform<R: Rng>(rng: &mut R, s: &TransformSampling) -> Result<CoordinateChange> {
    for _ in 0..s.max_attempts {
        let r = small_poly(rng, s);
        let t = CoordinateChange::from_fields([
            &Expr::x() + &small_poly(rng, s),
            small_poly(rng, s),
            &Expr::one() + &small_poly(rng, s),
            small_poly(rng, s),
            &Expr::one() + &r,
            small_poly(rng, s),
            &Expr::one() + &r,
            small_poly(rng, s),
        ]);
        let env = transform_env(&t)?;
        if t.validate(&env, s.valid_box, 1e-3)?.valid {
            return Ok(t);
        }
    }
    Err(Error::ResampleExhausted(s.max_attempts))
}
