//! General coordinate changes of the minimal superspace
//!
//! ```text
//! u = fU + gU zξη      v = fV z + gV ξη
//! ζ = fζ ξ + gζ zη     θ = fθ η + gθ zξ
//! ```
//!
//! with the eight functions depending on `(x, y)`, `y = z²`.

use crate::error::{Error, Result};
use crate::expr::{Base, BindingEnv, Expr};
use crate::superfn::{Coord, SuperFunction, Window};
use crate::graded::Monomial;

#[derive(Clone, Debug, PartialEq)]
pub struct CoordinateChange {
    pub f_u: Expr,
    pub g_u: Expr,
    pub f_v: Expr,
    pub g_v: Expr,
    pub f_zeta: Expr,
    pub g_zeta: Expr,
    pub f_theta: Expr,
    pub g_theta: Expr,
}

impl CoordinateChange {
    /// Atom names used by [`CoordinateChange::generic`], in field order.
    pub const NAMES: [&'static str; 8] =
        ["fU", "gU", "fV", "gV", "fZeta", "gZeta", "fTheta", "gTheta"];

    pub fn from_fields(f: [Expr; 8]) -> Self {
        let [f_u, g_u, f_v, g_v, f_zeta, g_zeta, f_theta, g_theta] = f;
        CoordinateChange {
            f_u,
            g_u,
            f_v,
            g_v,
            f_zeta,
            g_zeta,
            f_theta,
            g_theta,
        }
    }

    pub fn fields(&self) -> [&Expr; 8] {
        [
            &self.f_u,
            &self.g_u,
            &self.f_v,
            &self.g_v,
            &self.f_zeta,
            &self.g_zeta,
            &self.f_theta,
            &self.g_theta,
        ]
    }

    pub fn identity() -> Self {
        CoordinateChange::from_fields([
            Expr::x(),
            Expr::zero(),
            Expr::one(),
            Expr::zero(),
            Expr::one(),
            Expr::zero(),
            Expr::one(),
            Expr::zero(),
        ])
    }

    /// Every field an independent two-variable atom.
    pub fn generic() -> Self {
        CoordinateChange::from_fields(Self::NAMES.map(Expr::func2))
    }

    /// `u = x`, `v = (1 + y) z + ξη`, `ζ = ξ`, `θ = η`.
    pub fn shifted_cube() -> Self {
        let mut t = CoordinateChange::identity();
        t.f_v = &Expr::one() + &Expr::y();
        t.g_v = Expr::one();
        t
    }

    /// `J^B = fU_x fV + 2y (fU_x fV_y − fU_y fV_x)`.
    pub fn jb(&self) -> Expr {
        let (ux, uy) = (self.f_u.diff(Base::X), self.f_u.diff(Base::Y));
        let (vx, vy) = (self.f_v.diff(Base::X), self.f_v.diff(Base::Y));
        let cross = &(&ux * &vy) - &(&uy * &vx);
        &(&ux * &self.f_v) + &(&(&Expr::int(2) * &Expr::y()) * &cross)
    }

    /// `det D = fζ fθ − y gζ gθ`.
    pub fn det_d(&self) -> Expr {
        &(&self.f_zeta * &self.f_theta) - &(&(&Expr::y() * &self.g_zeta) * &self.g_theta)
    }

    /// The new coordinates `u, v, ζ, θ` as functions of the old ones.
    pub fn coordinates(&self) -> [SuperFunction; 4] {
        let term = |c: &Expr, k, a, b| SuperFunction::term(c.clone(), Monomial::new(k, a, b)).unwrap();
        [
            term(&self.f_u, 0, 0, 0).add(&term(&self.g_u, 1, 1, 1)),
            term(&self.f_v, 1, 0, 0).add(&term(&self.g_v, 0, 1, 1)),
            term(&self.f_zeta, 0, 1, 0).add(&term(&self.g_zeta, 1, 0, 1)),
            term(&self.f_theta, 0, 0, 1).add(&term(&self.g_theta, 1, 1, 0)),
        ]
    }

    /// Reads a transform back from its four coordinate functions.
    pub fn from_coordinates(c: &[SuperFunction; 4]) -> Result<Self> {
        let names = ["u", "v", "zeta", "theta"];
        let allowed: [[(u8, u8, u8); 2]; 4] = [
            [(0, 0, 0), (1, 1, 1)],
            [(1, 0, 0), (0, 1, 1)],
            [(0, 1, 0), (1, 0, 1)],
            [(0, 0, 1), (1, 1, 0)],
        ];
        let mut out = Vec::with_capacity(8);
        for (i, f) in c.iter().enumerate() {
            for (m, coef) in f.slots() {
                let key = (m.z_power as u8, m.xi, m.eta);
                if !coef.is_zero() && !allowed[i].contains(&key) {
                    return Err(Error::NotInCanonicalForm(format!(
                        "{} has a {} term",
                        names[i], m
                    )));
                }
            }
            for (p, a, b) in allowed[i] {
                out.push(f.slot(p, a, b).clone());
            }
        }
        Ok(CoordinateChange::from_fields(out.try_into().unwrap()))
    }

    pub fn jacobian(&self) -> GradedJacobian {
        let cols = self.coordinates();
        let rows = [Coord::X, Coord::Z, Coord::Xi, Coord::Eta];
        GradedJacobian {
            entries: rows.map(|r| std::array::from_fn(|j| cols[j].deriv(r))),
        }
    }

    /// Expresses `F(u, v, ζ, θ)` in the old coordinates.
    ///
    /// The slot coefficients of `F` are functions of `(u, w)`, `w = v²`.
    /// Since `u − fU` and `w − y fV²` are multiples of `zξη`, the Taylor
    /// expansion stops after the linear term.
    pub fn pullback(&self, f: &SuperFunction) -> Result<SuperFunction> {
        let [_, v, zeta, theta] = self.coordinates();
        let w0 = &Expr::y() * &(&self.f_v * &self.f_v);
        let du = &self.g_u;
        let dw = &(&Expr::int(2) * &self.f_v) * &self.g_v;
        let top = |c: Expr| SuperFunction::term(c, Monomial::new(1, 1, 1));
        let mut out = SuperFunction::zero(Window::EXACT);
        for (m, c) in f.slots() {
            if c.is_zero() {
                continue;
            }
            let c0 = c.subst(&self.f_u, &w0)?;
            let cx = c.diff(Base::X).subst(&self.f_u, &w0)?;
            let cy = c.diff(Base::Y).subst(&self.f_u, &w0)?;
            let shift = &(&cx * du) + &(&cy * &dw);
            let mut g = SuperFunction::scalar(c0).add(&top(shift)?);
            if m.z_power == 1 {
                g = g.mul(&v);
            }
            if m.xi == 1 {
                g = g.mul(&zeta);
            }
            if m.eta == 1 {
                g = g.mul(&theta);
            }
            out = out.add(&g);
        }
        let w = f.window;
        let out = if w == Window::EXACT {
            out.with_window(w)
        } else {
            // Components beyond the window feed old orders from one below.
            out.with_window(Window::new(w.laurent_depth + 1, w.trunc - 1))
        };
        Ok(out)
    }

    /// The transform `self` followed by `next`.
    pub fn compose(&self, next: &CoordinateChange) -> Result<CoordinateChange> {
        let c = next.coordinates();
        let pulled = [
            self.pullback(&c[0])?,
            self.pullback(&c[1])?,
            self.pullback(&c[2])?,
            self.pullback(&c[3])?,
        ];
        CoordinateChange::from_coordinates(&pulled)
    }

    /// Grid minima of `|J^B|`, `|det D|` and `|fV(x, 0)|` over
    /// `[x0, x1] × [y0, y1]`.
    pub fn validate(&self, env: &BindingEnv, domain: [f64; 4], eps: f64) -> Result<ValidityReport> {
        let jb = env.compile(&self.jb())?;
        let dd = env.compile(&self.det_d())?;
        let fv = env.compile(&self.f_v)?;
        let n = 33;
        let [x0, x1, y0, y1] = domain;
        let mut r = ValidityReport {
            min_jb: f64::INFINITY,
            min_det_d: f64::INFINITY,
            min_fv0: f64::INFINITY,
            valid: false,
        };
        // A sign change on the grid means a zero in between.
        let (mut sj, mut sd, mut sv) = (0.0f64, 0.0f64, 0.0f64);
        let track = |min: &mut f64, first: &mut f64, v: f64| {
            if *first == 0.0 {
                *first = v.signum();
            }
            *min = if v.signum() != *first { 0.0 } else { min.min(v.abs()) };
        };
        for i in 0..n {
            let x = x0 + (x1 - x0) * i as f64 / (n - 1) as f64;
            track(&mut r.min_fv0, &mut sv, fv.eval(x, 0.0)?);
            for j in 0..n {
                let y = y0 + (y1 - y0) * j as f64 / (n - 1) as f64;
                track(&mut r.min_jb, &mut sj, jb.eval(x, y)?);
                track(&mut r.min_det_d, &mut sd, dd.eval(x, y)?);
            }
        }
        r.valid = r.min_jb >= eps && r.min_det_d >= eps && r.min_fv0 >= eps;
        Ok(r)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidityReport {
    pub min_jb: f64,
    pub min_det_d: f64,
    pub min_fv0: f64,
    pub valid: bool,
}

/// `entries[i][j] = ∂_{X_i}` of new coordinate `j`, rows `(x, z, ξ, η)`,
/// columns `(u, v, ζ, θ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedJacobian {
    pub entries: [[SuperFunction; 4]; 4],
}

impl GradedJacobian {
    fn block(&self, r: usize, c: usize) -> [[SuperFunction; 2]; 2] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.entries[r + i][c + j].clone()))
    }

    pub fn a(&self) -> [[SuperFunction; 2]; 2] {
        self.block(0, 0)
    }

    pub fn b(&self) -> [[SuperFunction; 2]; 2] {
        self.block(0, 2)
    }

    pub fn c(&self) -> [[SuperFunction; 2]; 2] {
        self.block(2, 0)
    }

    pub fn d(&self) -> [[SuperFunction; 2]; 2] {
        self.block(2, 2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn monomial_fn(c: Expr, k: i64, a: u8, b: u8) -> SuperFunction {
        SuperFunction::term(c, Monomial::new(k, a, b)).unwrap()
    }

    /// A generic function with components `g_k_ab(x)` for `k ≤ trunc`.
    fn generic_function(trunc: i64) -> SuperFunction {
        let mut comps = BTreeMap::new();
        for k in 0..=trunc {
            for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                comps.insert((k, a, b), Expr::func1(&format!("g_{k}_{a}{b}")));
            }
        }
        SuperFunction::from_components(&comps, Window::taylor(trunc)).unwrap()
    }

    #[test]
    fn identity_jacobian() {
        let j = CoordinateChange::identity().jacobian();
        for (i, row) in j.entries.iter().enumerate() {
            for (k, e) in row.iter().enumerate() {
                let want = if i == k { SuperFunction::one() } else { SuperFunction::zero(Window::EXACT) };
                assert!(e.equal(&want), "({i},{k}) = {e}");
            }
        }
    }

    #[test]
    fn shifted_cube_dz_v() {
        let j = CoordinateChange::shifted_cube().jacobian();
        let dzv = &j.entries[1][1];
        assert!(dzv.slot(0, 0, 0).equal(&(&Expr::one() + &(&Expr::int(3) * &Expr::y()))));
        let jg = CoordinateChange::generic().jacobian();
        assert!(jg.entries[2][2].slot(0, 0, 0).equal(&Expr::func2("fZeta")));
    }

    #[test]
    fn bosonic_block_determinant_is_jb() {
        let t = CoordinateChange::generic();
        let a = t.jacobian().a();
        let body = |f: &SuperFunction| f.body();
        let det = body(&a[0][0]).mul(&body(&a[1][1])).sub(&body(&a[0][1]).mul(&body(&a[1][0])));
        assert!(det.equal(&SuperFunction::scalar(t.jb())));
    }

    #[test]
    fn pullback_of_zeta_theta() {
        let t = CoordinateChange::generic();
        let zt = monomial_fn(Expr::one(), 0, 1, 1);
        let p = t.pullback(&zt).unwrap();
        assert!(p.equal(&monomial_fn(t.det_d(), 0, 1, 1)));
    }

    #[test]
    fn pullback_examples() {
        let f = generic_function(4);
        let p = CoordinateChange::identity().pullback(&f).unwrap();
        assert!(p.equal(&f));
        let mut t = CoordinateChange::identity();
        t.f_v = &Expr::one() + &Expr::y();
        let v2 = monomial_fn(Expr::one(), 2, 0, 0);
        let p = t.pullback(&v2).unwrap();
        let want = monomial_fn(&(&Expr::one() + &Expr::y()) * &(&Expr::one() + &Expr::y()), 2, 0, 0);
        assert!(p.equal(&want));
    }

    #[test]
    fn pullback_of_scalar_function_is_taylor() {
        // g(u) = g(fU) + g'(fU) gU zξη
        let t = CoordinateChange::generic();
        let g = SuperFunction::scalar(Expr::func1("g"));
        let p = t.pullback(&g).unwrap();
        let gf = Expr::apply("g", vec![Expr::func2("fU")]);
        assert!(p.slot(0, 0, 0).equal(&gf));
        let want = &gf.diff(Base::X).div(&Expr::func2("fU").diff(Base::X)).unwrap() * &Expr::func2("gU");
        assert!(p.slot(1, 1, 1).equal(&want));
    }

    #[test]
    fn pullback_of_v_powers() {
        // v^k = (fV z)^k + k (fV z)^{k−1} gV ξη
        let t = CoordinateChange::generic();
        let (fv, gv) = (Expr::func2("fV"), Expr::func2("gV"));
        for k in -3..5i64 {
            let p = t.pullback(&monomial_fn(Expr::one(), k, 0, 0)).unwrap();
            let lead = monomial_fn(fv.pow(k as i32).unwrap(), k, 0, 0);
            let corr = monomial_fn(&Expr::int(k) * &(&fv.pow(k as i32 - 1).unwrap() * &gv), k - 1, 1, 1);
            assert!(p.equal(&lead.add(&corr)), "k = {k}");
        }
    }

    #[test]
    fn pullback_is_ring_homomorphism() {
        let t = CoordinateChange::generic();
        let f = generic_function(2);
        let g = SuperFunction::scalar(Expr::func1("h"))
            .add(&monomial_fn(Expr::func1("k"), 1, 1, 0))
            .add(&monomial_fn(Expr::func1("m"), 3, 0, 1));
        let lhs = t.pullback(&f.mul(&g)).unwrap();
        let rhs = t.pullback(&f).unwrap().mul(&t.pullback(&g).unwrap());
        assert!(lhs.equal(&rhs));
    }

    fn poly_transform(seed: i64) -> CoordinateChange {
        // Small polynomial transforms with exact rational coefficients.
        let x = Expr::x();
        let y = Expr::y();
        let c = |n: i64| Expr::frac(n, 7);
        let s = seed;
        CoordinateChange::from_fields([
            &x + &(&c(s % 3) * &(&x * &y)),
            &c(1 + s % 2) * &x,
            &Expr::one() + &(&c(s % 4) * &y),
            &c(2) * &(&x + &y),
            &Expr::one() + &(&c(1) * &x),
            &c(s % 5) * &y,
            &Expr::one() - &(&c(s % 2) * &y),
            &c(3) * &x,
        ])
    }

    #[test]
    fn compose_examples() {
        let t = poly_transform(4);
        assert_eq!(t.compose(&CoordinateChange::identity()).unwrap(), t);
        assert_eq!(CoordinateChange::identity().compose(&t).unwrap(), t);
        let mut a = CoordinateChange::identity();
        a.f_v = Expr::int(2);
        let mut b = CoordinateChange::identity();
        b.f_v = Expr::int(5);
        assert!(a.compose(&b).unwrap().f_v.equal(&Expr::int(10)));
    }

    #[test]
    fn compose_stays_in_family_and_associates_with_pullback() {
        let f = generic_function(2);
        for s in 0..20 {
            let t1 = poly_transform(s);
            let t2 = poly_transform(s * 7 + 3);
            let c = t1.compose(&t2).unwrap();
            if s < 4 {
                let lhs = c.pullback(&f).unwrap();
                let rhs = t1.pullback(&t2.pullback(&f).unwrap()).unwrap();
                assert!(lhs.equal(&rhs), "seed {s}");
            }
        }
    }

    #[test]
    fn validate_examples() {
        let env = BindingEnv::new();
        let r = CoordinateChange::identity().validate(&env, [-1.0, 1.0, 0.0, 1.0], 1e-6).unwrap();
        assert_eq!((r.min_jb, r.min_det_d, r.min_fv0, r.valid), (1.0, 1.0, 1.0, true));
        let r = CoordinateChange::shifted_cube().validate(&env, [-1.0, 1.0, 0.0, 1.0], 1e-6).unwrap();
        assert_eq!((r.min_jb, r.min_det_d), (1.0, 1.0));
        let mut t = CoordinateChange::identity();
        t.f_v = &Expr::y() - &Expr::frac(1, 2);
        let r = t.validate(&env, [-1.0, 1.0, 0.0, 1.0], 1e-6).unwrap();
        assert!(!r.valid);
    }
}
