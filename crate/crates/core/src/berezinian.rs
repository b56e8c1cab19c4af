//! Berezinians of coordinate changes: block formula and closed form.

use crate::error::{Error, Result};
use crate::expr::{Base, Expr};
use crate::graded::Monomial;
use crate::superfn::{SuperFunction, Window};
use crate::transform::{CoordinateChange, GradedJacobian};

/// `Γ = body + soul · zξη`.
#[derive(Clone, Debug, PartialEq)]
pub struct Berezinian {
    pub body: Expr,
    pub soul: Expr,
}

impl Berezinian {
    pub fn to_superfunction(&self) -> SuperFunction {
        let mut f = SuperFunction::scalar(self.body.clone());
        f.set_slot(1, 1, 1, self.soul.clone());
        f.with_window(Window::EXACT)
    }

    pub fn from_superfunction(f: &SuperFunction) -> Result<Self> {
        for (m, c) in f.slots() {
            let allowed = m == Monomial::ONE || m == Monomial::new(1, 1, 1);
            if !allowed && !c.is_zero() {
                return Err(Error::Invalid(format!("Berezinian has a {m} term")));
            }
        }
        Ok(Berezinian {
            body: f.slot(0, 0, 0).clone(),
            soul: f.slot(1, 1, 1).clone(),
        })
    }

    pub fn equal(&self, o: &Berezinian) -> bool {
        self.body.equal(&o.body) && self.soul.equal(&o.soul)
    }
}

type Block = [[SuperFunction; 2]; 2];

fn block_mul(a: &Block, b: &Block) -> Block {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][0].mul(&b[0][j]).add(&a[i][1].mul(&b[1][j]))))
}

/// Determinant of a block whose entries mutually commute.
fn det2(m: &Block) -> SuperFunction {
    m[0][0].mul(&m[1][1]).sub(&m[0][1].mul(&m[1][0]))
}

/// `Γ(J) = det(A − B D⁻¹ C) / det D`.
pub fn ber_direct(j: &GradedJacobian) -> Result<Berezinian> {
    let (a, b, c, d) = (j.a(), j.b(), j.c(), j.d());
    // Entries of D have degree (0,0) or (1,1) and commute.
    let det_d = det2(&d);
    let inv_det = det_d.inverse().map_err(|e| match e {
        Error::ZeroDenominator => Error::SingularD,
        e => e,
    })?;
    let d_inv: Block = [
        [d[1][1].mul(&inv_det), d[0][1].neg().mul(&inv_det)],
        [d[1][0].neg().mul(&inv_det), d[0][0].mul(&inv_det)],
    ];
    let bdc = block_mul(&block_mul(&b, &d_inv), &c);
    let schur: Block = std::array::from_fn(|i| std::array::from_fn(|k| a[i][k].sub(&bdc[i][k])));
    Berezinian::from_superfunction(&det2(&schur).mul(&inv_det))
}

/// `Γ = J^B / det D + G zξη` with
/// `G = ∂_x[((fV + 2y fV_y) gU − 2 fU_y gV)/det D] + ∂_y[2(fU_x gV − y fV_x gU)/det D]`.
pub fn ber_closed(t: &CoordinateChange) -> Result<Berezinian> {
    let det_d = t.det_d();
    let inv = det_d.recip().map_err(|_| Error::SingularD)?;
    let y = Expr::y();
    let two = Expr::int(2);
    let jx = &(&(&(&t.f_v + &(&(&two * &y) * &t.f_v.diff(Base::Y))) * &t.g_u)
        - &(&(&two * &t.f_u.diff(Base::Y)) * &t.g_v))
        * &inv;
    let jy = &(&two
        * &(&(&t.f_u.diff(Base::X) * &t.g_v) - &(&(&y * &t.f_v.diff(Base::X)) * &t.g_u)))
        * &inv;
    Ok(Berezinian {
        body: &t.jb() * &inv,
        soul: &jx.diff(Base::X) + &jy.diff(Base::Y),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly_transform(s: i64) -> CoordinateChange {
        let x = Expr::x();
        let y = Expr::y();
        let c = |n: i64| Expr::frac(n, 5);
        let p = |a: i64, b: i64, d: i64| &(&c(a) * &x) + &(&(&c(b) * &y) + &(&c(d) * &(&(&x * &y) * &y)));
        CoordinateChange::from_fields([
            &x + &p(s % 3, 1, s % 2),
            p(1, s % 4, 1),
            &Expr::one() + &p(s % 2, 2, s % 3),
            p(2, 1, s % 5),
            &Expr::one() + &p(1, s % 3, 0),
            p(s % 2, 1, 1),
            &Expr::one() + &p(0, s % 2, 1),
            p(1, 2, s % 3),
        ])
    }

    #[test]
    fn identity_and_shifted_cube() {
        let id = Berezinian {
            body: Expr::one(),
            soul: Expr::zero(),
        };
        let t = CoordinateChange::identity();
        assert!(ber_direct(&t.jacobian()).unwrap().equal(&id));
        assert!(ber_closed(&t).unwrap().equal(&id));
        let t = CoordinateChange::shifted_cube();
        let want = Berezinian {
            body: &Expr::one() + &(&Expr::int(3) * &Expr::y()),
            soul: Expr::zero(),
        };
        assert!(ber_direct(&t.jacobian()).unwrap().equal(&want));
        assert!(ber_closed(&t).unwrap().equal(&want));
    }

    #[test]
    fn block_formula_matches_closed_form_generic() {
        let t = CoordinateChange::generic();
        let d = ber_direct(&t.jacobian()).unwrap();
        let c = ber_closed(&t).unwrap();
        assert!(d.body.equal(&c.body));
        assert!(d.soul.equal(&c.soul), "direct soul {}\nclosed soul {}", d.soul, c.soul);
    }

    #[test]
    fn block_formula_matches_closed_form_polynomial() {
        for s in 0..12 {
            let t = poly_transform(s);
            assert!(ber_direct(&t.jacobian()).unwrap().equal(&ber_closed(&t).unwrap()), "seed {s}");
        }
    }

    #[test]
    fn berezinian_is_multiplicative() {
        // Exact normal forms of composites grow quickly; keep the
        // transforms low-degree here.
        let low = |s: i64| {
            let t = poly_transform(s);
            let cut = |e: &Expr| -> Expr {
                let s = e.series_y(1).unwrap();
                &s.coeffs[0] + &(&s.coeffs[1] * &Expr::y())
            };
            CoordinateChange::from_fields(t.fields().map(cut))
        };
        for s in 0..3 {
            let t1 = low(s);
            let t2 = low(2 * s + 5);
            let g12 = ber_closed(&t1.compose(&t2).unwrap()).unwrap().to_superfunction();
            let g2 = t1.pullback(&ber_closed(&t2).unwrap().to_superfunction()).unwrap();
            let g1 = ber_closed(&t1).unwrap().to_superfunction();
            assert!(g12.equal(&g2.mul(&g1)), "seed {s}");
        }
    }

    #[test]
    fn singular_d() {
        let mut t = CoordinateChange::identity();
        t.f_zeta = Expr::zero();
        assert_eq!(ber_direct(&t.jacobian()), Err(Error::SingularD));
        assert_eq!(ber_closed(&t), Err(Error::SingularD));
    }
}
