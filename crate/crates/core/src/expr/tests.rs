use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;

fn f2(name: &str) -> Expr {
    Expr::func2(name)
}

fn det_d() -> Expr {
    &(&f2("fZeta") * &f2("fTheta")) - &(&(&Expr::y() * &f2("gZeta")) * &f2("gTheta"))
}

/// Binds `name` to a random smooth function `a + b sin(c x + d y) + e x y`
/// with analytic derivatives of every order.
fn random_smooth(rng: &mut ChaCha8Rng) -> NumericFn {
    let (a, b, c, d, e): (f64, f64, f64, f64, f64) = (
        rng.gen_range(1.0..2.0),
        rng.gen_range(-0.5..0.5),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-0.3..0.3),
    );
    Arc::new(move |args: &[f64], dv: &[u32]| {
        let (x, y) = (args[0], args.get(1).copied().unwrap_or(0.0));
        let (dx, dy) = (dv[0], dv.get(1).copied().unwrap_or(0));
        let n = dx + dy;
        let phase = c * x + d * y + n as f64 * std::f64::consts::FRAC_PI_2;
        let mut v = b * c.powi(dx as i32) * d.powi(dy as i32) * phase.sin();
        v += match (dx, dy) {
            (0, 0) => a + e * x * y,
            (1, 0) => e * y,
            (0, 1) => e * x,
            (1, 1) => e,
            _ => 0.0,
        };
        v
    })
}

fn random_env(seed: u64, names: &[&str]) -> BindingEnv {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut env = BindingEnv::new();
    for n in names {
        env.bind(*n, random_smooth(&mut rng));
    }
    env
}

const NAMES: [&str; 8] = ["fU", "gU", "fV", "gV", "fZeta", "gZeta", "fTheta", "gTheta"];

#[test]
fn atom_diff_bumps_index() {
    let d = f2("fV").diff(Base::Y);
    assert_eq!(d.to_string(), "fV_y");
    assert!(d.equal(&Expr::atom(Atom::new("fV", vec![0, 1], vec![Expr::x(), Expr::y()]))));
}

#[test]
fn composed_atom_chain_rule() {
    let g = Expr::apply("g_0_00", vec![f2("fU")]);
    let d = g.diff(Base::X);
    let expected = &Expr::atom(Atom::new("g_0_00", vec![1], vec![f2("fU")])) * &f2("fU").diff(Base::X);
    assert!(d.equal(&expected));
    assert_eq!(d.to_string(), "fU_x*g_0_00'(fU)");
}

#[test]
fn quotient_rule_matches_finite_differences() {
    let inv = det_d().recip().unwrap();
    let d = inv.diff(Base::X);
    let dd = det_d();
    let closed = -&(&dd.diff(Base::X) * &dd.pow(-2).unwrap());
    assert!(d.equal(&closed));
    for seed in 0..5 {
        let env = random_env(seed, &NAMES);
        let c = env.compile(&inv).unwrap();
        let cd = env.compile(&d).unwrap();
        let (x, y, h) = (0.3, 0.7, 1e-5);
        let fd = (c.eval(x + h, y).unwrap() - c.eval(x - h, y).unwrap()) / (2.0 * h);
        let an = cd.eval(x, y).unwrap();
        assert!((fd - an).abs() <= 1e-6 * an.abs().max(1.0), "{fd} vs {an}");
    }
}

#[test]
fn normalize_examples() {
    let a = f2("a");
    let b = f2("b");
    let e = &(&f2("fU").diff(Base::X) * &f2("fV")) - &(&f2("fV") * &f2("fU").diff(Base::X));
    assert!(e.is_zero());
    let s = &a + &b;
    let e = &(&(&(&s * &s) - &(&a * &a)) - &(&(&Expr::int(2) * &a) * &b)) - &(&b * &b);
    assert!(e.is_zero());
    assert!(Expr::zero().recip().is_err());
}

#[test]
fn jb_two_ways() {
    let fu = f2("fU");
    let fv = f2("fV");
    let y = Expr::y();
    let z_sq = y.clone();
    // Block determinant with ∂_z u = 2 z fU_y, ∂_z v = fV + 2 y fV_y, ∂_x v = z fV_x.
    let a11 = fu.diff(Base::X);
    let a22 = &fv + &(&(&Expr::int(2) * &y) * &fv.diff(Base::Y));
    let off = &(&(&Expr::int(2) * &fu.diff(Base::Y)) * &fv.diff(Base::X)) * &z_sq;
    let block = &(&a11 * &a22) - &off;
    let written = &(&fu.diff(Base::X) * &fv)
        + &(&(&Expr::int(2) * &y)
            * &(&(&fu.diff(Base::X) * &fv.diff(Base::Y)) - &(&fu.diff(Base::Y) * &fv.diff(Base::X))));
    assert!(block.equal(&written));
    assert_eq!(block.normalize().unwrap(), block);
}

#[test]
fn series_examples() {
    let e = Expr::one().div(&(&Expr::one() + &Expr::y())).unwrap();
    let s = e.series_y(2).unwrap();
    // Geometric series oracle.
    for (j, c) in s.coeffs.iter().enumerate() {
        assert!(c.equal(&Expr::int(if j % 2 == 0 { 1 } else { -1 })));
    }
    let s = f2("fU").series_y(1).unwrap();
    assert_eq!(s.coeffs[0].to_string(), "fU(x,0)");
    assert_eq!(s.coeffs[1].to_string(), "fU_y(x,0)");
    let e = (&Expr::one() + &(&Expr::int(3) * &Expr::y()))
        .div(&(&Expr::one() + &Expr::y()))
        .unwrap();
    assert!(e.series_y(0).unwrap().coeffs[0].equal(&Expr::one()));
}

#[test]
fn series_errors_and_laurent() {
    let e = Expr::one().div(&Expr::y()).unwrap();
    assert_eq!(e.series_y(2), Err(Error::PoleAtOrigin));
    let s = e.laurent_y(1).unwrap();
    assert_eq!(s.min_pow, -1);
    assert!(s.coeff(-1).equal(&Expr::one()));
    assert!(s.coeff(0).is_zero());
    let e = Expr::one().div(&(&Expr::y() * &f2("fV"))).unwrap();
    let s = e.laurent_y(0).unwrap();
    assert!(s.coeff(-1).equal(&Expr::apply("fV", vec![Expr::x(), Expr::zero()]).recip().unwrap()));
}

#[test]
fn series_truncation_matches_evaluation() {
    let e = (&f2("fV") * &f2("fU")).div(&det_d()).unwrap();
    let env = random_env(11, &NAMES);
    let n = 3;
    let s = e.series_y(n).unwrap();
    let ce = env.compile(&e).unwrap();
    let cs: Vec<_> = s.coeffs.iter().map(|c| env.compile(c).unwrap()).collect();
    let x = 0.4;
    let mut ratios = Vec::new();
    for y in [0.02f64, 0.01, 0.005] {
        let approx: f64 = cs
            .iter()
            .enumerate()
            .map(|(j, c)| c.eval(x, 0.0).unwrap() * y.powi(j as i32))
            .sum();
        let err = (ce.eval(x, y).unwrap() - approx).abs();
        ratios.push(err / y.powi(n as i32 + 1));
    }
    // Remainder scales like y^{n+1}.
    for r in &ratios {
        assert!(*r < 10.0 * ratios[0].max(1e-6), "{ratios:?}");
    }
}

#[test]
fn bind_and_eval_examples() {
    let env = BindingEnv::new();
    assert_eq!(env.eval(&(&Expr::x() * &Expr::y()), 2.0, 3.0).unwrap(), 6.0);
    // J^B with fU = x, fV = 1 + y at (0, 1).
    let fu = Expr::x();
    let fv = &Expr::one() + &Expr::y();
    let y = Expr::y();
    let jb = &(&fu.diff(Base::X) * &fv)
        + &(&(&Expr::int(2) * &y)
            * &(&(&fu.diff(Base::X) * &fv.diff(Base::Y)) - &(&fu.diff(Base::Y) * &fv.diff(Base::X))));
    assert_eq!(env.eval(&jb, 0.0, 1.0).unwrap(), 4.0);
    assert!(matches!(env.eval(&f2("q"), 0.0, 0.0), Err(Error::UnboundAtom(_))));
    let near = Expr::one().div(&(&Expr::x() - &Expr::frac(1, 2))).unwrap();
    assert!(matches!(env.eval(&near, 0.5, 0.0), Err(Error::DivisionNearZero { .. })));
}

mod props {
    use super::*;
    use proptest::prelude::*;

    /// Random expression trees over x, y and two atoms.
    fn tree() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (-3i64..4).prop_map(Expr::int),
            Just(Expr::x()),
            Just(Expr::y()),
            Just(f2("fU")),
            Just(f2("fV")),
        ];
        leaf.prop_recursive(3, 12, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| &a + &b),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| &a * &b),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| &a - &b),
                inner.clone().prop_map(|a| {
                    let d = &(&a * &a) + &Expr::int(2);
                    Expr::one().div(&d).unwrap()
                }),
            ]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn mixed_partials_commute(e in tree()) {
            let a = e.diff(Base::X).diff(Base::Y);
            let b = e.diff(Base::Y).diff(Base::X);
            prop_assert!(a.equal(&b));
        }

        #[test]
        fn normalize_is_idempotent_and_value_preserving(e in tree(), seed in 0u64..1000) {
            let n = e.normalize().unwrap();
            prop_assert!(n.equal(&e));
            prop_assert_eq!(n.normalize().unwrap(), n.clone());
            let env = random_env(seed, &["fU", "fV"]);
            let (x, y) = (0.37, 0.61);
            let a = env.eval(&e, x, y).unwrap();
            let b = env.eval(&n, x, y).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }

        #[test]
        fn diff_matches_central_differences(e in tree(), seed in 0u64..1000) {
            let env = random_env(seed, &["fU", "fV"]);
            let c = env.compile(&e).unwrap();
            let cd = env.compile(&e.diff(Base::X)).unwrap();
            let (x, y, h) = (0.21, 0.43, 1e-5);
            let fd = (c.eval(x + h, y).unwrap() - c.eval(x - h, y).unwrap()) / (2.0 * h);
            let an = cd.eval(x, y).unwrap();
            prop_assert!((fd - an).abs() <= 1e-6 * an.abs().max(1.0), "{} vs {}", fd, an);
        }
    }
}
