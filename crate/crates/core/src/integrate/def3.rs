//! Integration with the emergent coordinate `w = v²`.

use crate::error::{Error, Result};
use crate::expr::{BindingEnv, Compiled, Expr};
use crate::numeric::Quadrature;
use crate::superfn::SuperFunction;
use crate::transform::CoordinateChange;

use super::old_section;

/// Which slots enter the integrand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Def3Variant {
    /// `½ ∫ A00 du dw`.
    #[default]
    Standard,
    /// `½ ∫ (A00 + A11) du dw`.
    KeepA11,
    /// `½ ∫ (A00 + A11 w^{-1/2}) du dw`, the `v^{-1}`-weighted form.
    KeepA11Weighted,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Def3Options {
    pub order: usize,
    pub panels: usize,
    pub variant: Def3Variant,
    /// Relative size above which a component counts as present on the
    /// boundary.
    pub support_tol: f64,
    /// Old-coordinate box; estimated from the transform when absent.
    pub old_domain: Option<[f64; 4]>,
}

impl Default for Def3Options {
    fn default() -> Self {
        Def3Options {
            order: 64,
            panels: 4,
            variant: Def3Variant::Standard,
            support_tol: 1e-12,
            old_domain: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Def3Result {
    pub value: f64,
    /// The part of `value` coming from `A11`; zero for the standard variant.
    pub a11_part: f64,
    /// Box the quadrature ran over.
    pub domain: [f64; 4],
}

/// The integrand as a function of the first two variables of `f`'s slots:
/// `½(A00 + c·A11·y^{-1/2}·…)`.
struct Integrand {
    a00: Compiled,
    a11: Option<Compiled>,
    weighted: bool,
}

impl Integrand {
    fn new(f: &SuperFunction, env: &BindingEnv, variant: Def3Variant) -> Result<Self> {
        let a11 = match variant {
            Def3Variant::Standard => None,
            _ => Some(env.compile(f.slot(0, 1, 1))?),
        };
        Ok(Integrand {
            a00: env.compile(f.slot(1, 1, 1))?,
            a11,
            weighted: variant == Def3Variant::KeepA11Weighted,
        })
    }

    /// The `A00` and `A11` halves of the integrand.
    fn parts(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        let a00 = self.a00.eval(x, y)?;
        let a11 = match &self.a11 {
            Some(c) => {
                let a = c.eval(x, y)?;
                if self.weighted {
                    a / y.sqrt()
                } else {
                    a
                }
            }
            None => 0.0,
        };
        Ok((0.5 * a00, 0.5 * a11))
    }

    fn eval(&self, x: f64, y: f64) -> Result<f64> {
        let (a, b) = self.parts(x, y)?;
        Ok(a + b)
    }

    /// Both halves over the nonzero part of `dom`, in one pass.
    fn integrate(&self, quad: &Quadrature, dom: [f64; 4]) -> Result<(f64, f64)> {
        let dom = nonzero_box(self, dom)?;
        let ys = quad.nodes(dom[2], dom[3]);
        let mut s = (0.0, 0.0);
        for (x, wx) in quad.nodes(dom[0], dom[1]) {
            let mut row = (0.0, 0.0);
            for &(y, wy) in &ys {
                let (a, b) = self.parts(x, y)?;
                if !(a + b).is_finite() {
                    return Err(Error::NonFiniteValue(x, y));
                }
                row.0 += wy * a;
                row.1 += wy * b;
            }
            s.0 += wx * row.0;
            s.1 += wx * row.1;
        }
        Ok(s)
    }
}

fn check_support(f: &SuperFunction, env: &BindingEnv, dom: [f64; 4], tol: f64) -> Result<()> {
    let n = 48;
    let [x0, x1, y0, y1] = dom;
    let at = |i: usize, a: f64, b: f64| a + (b - a) * i as f64 / n as f64;
    for (m, c) in f.slots() {
        if c.is_zero() {
            continue;
        }
        let cc = env.compile(c)?;
        let mut inner: f64 = 0.0;
        for i in 0..=n {
            for j in 0..=n {
                inner = inner.max(cc.eval(at(i, x0, x1), at(j, y0, y1))?.abs());
            }
        }
        let mut edge: f64 = 0.0;
        for i in 0..=n {
            for (x, y) in [
                (at(i, x0, x1), y0),
                (at(i, x0, x1), y1),
                (x0, at(i, y0, y1)),
                (x1, at(i, y0, y1)),
            ] {
                edge = edge.max(cc.eval(x, y)?.abs());
            }
        }
        let scale = inner.max(f64::MIN_POSITIVE);
        if edge > tol * scale && edge > 0.0 {
            return Err(Error::SupportViolation {
                slot: m.to_string(),
                relative: edge / scale,
            });
        }
    }
    Ok(())
}

/// Bounding box of the nonzero samples on a coarse grid, widened by one
/// cell. Compactly supported integrands are then smooth on the box.
fn nonzero_box(ig: &Integrand, dom: [f64; 4]) -> Result<[f64; 4]> {
    let n: usize = 48;
    let [x0, x1, y0, y1] = dom;
    let hx = (x1 - x0) / n as f64;
    let hy = (y1 - y0) / n as f64;
    let (mut i0, mut i1, mut j0, mut j1) = (n, 0, n, 0);
    for i in 0..=n {
        for j in 0..=n {
            // Skip the w = 0 edge, where the weighted variant is singular.
            let y = if j == 0 { y0 + 1e-3 * hy } else { y0 + hy * j as f64 };
            if ig.eval(x0 + hx * i as f64, y)? != 0.0 {
                (i0, i1, j0, j1) = (i0.min(i), i1.max(i), j0.min(j), j1.max(j));
            }
        }
    }
    if i0 > i1 {
        return Ok(dom);
    }
    Ok([
        x0 + hx * i0.saturating_sub(1) as f64,
        x0 + hx * (i1 + 1).min(n) as f64,
        y0 + hy * j0.saturating_sub(1) as f64,
        y0 + hy * (j1 + 1).min(n) as f64,
    ])
}

/// Bounding box of the points whose image `(fU, y fV²)` lies in `dom`.
fn preimage_box(t: &CoordinateChange, env: &BindingEnv, dom: [f64; 4]) -> Result<[f64; 4]> {
    let fu = env.compile(&t.f_u)?;
    let fv = env.compile(&t.f_v)?;
    let [x0, x1, y0, y1] = dom;
    let (wx, wy) = (x1 - x0, y1.max(1e-3));
    let search = [x0 - wx, x1 + wx, 0.0, y1 + 3.0 * wy];
    let n = 240;
    let hx = (search[1] - search[0]) / n as f64;
    let hy = (search[3] - search[2]) / n as f64;
    let mut bb = [f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY];
    for i in 0..=n {
        let x = search[0] + hx * i as f64;
        for j in 0..=n {
            let y = search[2] + hy * j as f64;
            let u = fu.eval(x, y)?;
            let v = fv.eval(x, y)?;
            let w = y * v * v;
            if u >= x0 && u <= x1 && w >= y0 && w <= y1 {
                bb[0] = bb[0].min(x);
                bb[1] = bb[1].max(x);
                bb[2] = bb[2].min(y);
                bb[3] = bb[3].max(y);
            }
        }
    }
    if !bb[0].is_finite() {
        return Err(Error::Invalid("transform maps no point into the domain".into()));
    }
    Ok([
        (bb[0] - 2.0 * hx).max(search[0]),
        (bb[1] + 2.0 * hx).min(search[1]),
        (bb[2] - 2.0 * hy).max(0.0),
        (bb[3] + 2.0 * hy).min(search[3]),
    ])
}

/// `½ ∫_D A00(u, w) du dw`, either directly or, given `t`, from the
/// old-coordinate section `Γ · F∘T` over the preimage of `D`.
pub fn integrate_def3(
    f: &SuperFunction,
    t: Option<&CoordinateChange>,
    env: &BindingEnv,
    domain: [f64; 4],
    opts: &Def3Options,
) -> Result<Def3Result> {
    if domain[2] < 0.0 {
        return Err(Error::Invalid("the emergent coordinate w ranges over w ≥ 0".into()));
    }
    f.to_xy_form()?;
    check_support(f, env, domain, opts.support_tol)?;
    match t {
        None => {
            let quad = Quadrature::new(opts.order, opts.panels);
            let (a00, a11) = Integrand::new(f, env, opts.variant)?.integrate(&quad, domain)?;
            Ok(Def3Result { value: a00 + a11, a11_part: a11, domain })
        }
        Some(t) => integrate_section(&old_section(f, t)?, t, env, domain, opts),
    }
}

/// The old-coordinate side for a section `Γ · F∘T` computed beforehand.
pub(crate) fn integrate_section(
    s: &SuperFunction,
    t: &CoordinateChange,
    env: &BindingEnv,
    domain: [f64; 4],
    opts: &Def3Options,
) -> Result<Def3Result> {
    let quad = Quadrature::new(opts.order, opts.panels);
    let ig = Integrand::new(s, env, opts.variant)?;
    let dom = match opts.old_domain {
        Some(d) => d,
        None => preimage_box(t, env, domain)?,
    };
    let (a00, a11) = ig.integrate(&quad, dom)?;
    Ok(Def3Result { value: a00 + a11, a11_part: a11, domain: dom })
}

/// Currents `(jx, jy)` with `A00_old − J^B fV A00∘T = ∂_x jx + ∂_y jy`,
/// together with that difference.
pub fn decompose_total_derivative(t: &CoordinateChange, f: &SuperFunction) -> Result<(Expr, Expr, Expr)> {
    let y = Expr::y();
    let two = Expr::int(2);
    let w0 = &y * &(&t.f_v * &t.f_v);
    let compose = |e: &Expr| e.subst(&t.f_u, &w0);
    let phi = compose(f.slot(0, 0, 0))?.div(&t.det_d())?;
    let jx = &(&(&(&t.f_v + &(&(&two * &y) * &t.f_v.diff(crate::Base::Y))) * &t.g_u)
        - &(&(&two * &t.f_u.diff(crate::Base::Y)) * &t.g_v))
        * &phi;
    let jy = &(&two
        * &(&(&t.f_u.diff(crate::Base::X) * &t.g_v) - &(&(&y * &t.f_v.diff(crate::Base::X)) * &t.g_u)))
        * &phi;
    let s = old_section(f, t)?;
    let canonical = &(&t.jb() * &t.f_v) * &compose(f.slot(1, 1, 1))?;
    let obstruction = s.slot(1, 1, 1) - &canonical;
    let div = &jx.diff(crate::Base::X) + &jy.diff(crate::Base::Y);
    if !obstruction.equal(&div) {
        return Err(Error::DecompositionMismatch);
    }
    Ok((jx, jy, obstruction))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{transform_env, Bump2, BumpFunction, sample_transform, TransformSampling};
    use crate::superfn::EightComponentForm;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bump_env(seed: u64, support: [f64; 4]) -> (BindingEnv, Vec<Bump2>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut env = BindingEnv::new();
        let mut bumps = Vec::new();
        for name in EightComponentForm::NAMES {
            let b = Bump2::sample(&mut rng, support, (0.5, 1.5));
            env.bind(name, b.to_fn());
            bumps.push(b);
        }
        (env, bumps)
    }

    const SUPPORT: [f64; 4] = [-1.5, 1.5, 0.1, 1.9];
    const DOMAIN: [f64; 4] = [-2.0, 2.0, 0.0, 2.0];

    #[test]
    fn divergence_identity_generic() {
        let f = EightComponentForm::generic().to_superfunction();
        let (jx, jy, _) = decompose_total_derivative(&CoordinateChange::generic(), &f).unwrap();
        assert!(!jx.is_zero() && !jy.is_zero());
        let (jx, jy, ob) = decompose_total_derivative(&CoordinateChange::identity(), &f).unwrap();
        assert!(jx.is_zero() && jy.is_zero() && ob.is_zero());
    }

    #[test]
    fn no_transform_reads_top_slot() {
        let (env, bumps) = bump_env(1, SUPPORT);
        let f = EightComponentForm::generic().to_superfunction();
        let r = integrate_def3(&f, None, &env, DOMAIN, &Def3Options::default()).unwrap();
        let b = bumps[7];
        let q = Quadrature::new(64, 4);
        let (u0, u1) = b.u.support();
        let (w0, w1) = b.w.support();
        let iu = q.integrate(u0, u1, |u| Ok(b.u.value(u))).unwrap();
        let iw = q.integrate(w0, w1, |w| Ok(b.w.value(w))).unwrap();
        assert!((r.value - 0.5 * iu * iw).abs() < 1e-9 * r.value.abs());
    }

    #[test]
    fn support_violation() {
        let mut env = BindingEnv::new();
        let f = EightComponentForm::generic().to_superfunction();
        for name in EightComponentForm::NAMES {
            env.bind(name, Bump2 { u: BumpFunction::new(0.0, 1.0, 1.0), w: BumpFunction::new(1.0, 0.5, 1.0) }.to_fn());
        }
        let r = integrate_def3(&f, None, &env, [-0.5, 0.5, 0.0, 2.0], &Def3Options::default());
        assert!(matches!(r, Err(Error::SupportViolation { .. })));
        let r = integrate_def3(&f, None, &env, [-1.0, 1.0, -1.0, 2.0], &Def3Options::default());
        assert!(matches!(r, Err(Error::Invalid(_))));
    }

    #[test]
    fn invariant_under_sampled_transforms() {
        let f = EightComponentForm::generic().to_superfunction();
        let tg = CoordinateChange::generic();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for s in 0..3 {
            let t = sample_transform(&mut rng, &TransformSampling::default()).unwrap();
            let (mut env, _) = bump_env(100 + s, SUPPORT);
            env.extend(&transform_env(&t).unwrap());
            let opts = Def3Options::default();
            let new = integrate_def3(&f, None, &env, DOMAIN, &opts).unwrap();
            let old = integrate_def3(&f, Some(&tg), &env, DOMAIN, &opts).unwrap();
            let rel = (new.value - old.value).abs() / new.value.abs();
            assert!(rel < 1e-6, "trial {s}: {} vs {} ({rel:e})", new.value, old.value);
        }
    }
}
