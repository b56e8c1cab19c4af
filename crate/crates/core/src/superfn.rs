//! Functions on the minimal superspace.
//!
//! A [`SuperFunction`] is stored in resummed form: since `y = z²` has degree
//! (0,0) and commutes with everything, every series
//! `Σ g_{kαβ}(x) z^k ξ^α η^β` regroups into eight slots
//! `c_{pαβ}(x, y) z^p ξ^α η^β` with `p ∈ {0, 1}`. Products and derivatives are
//! exact in this form; component functions are recovered by expanding a slot
//! in `y`. Negative powers of `z` become negative powers of `y`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::expr::{Base, Expr};
use crate::graded::{monomial_mul, Degree, Monomial, Product};

/// Trusted range `[-laurent_depth, trunc]` of z-powers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub laurent_depth: i64,
    pub trunc: i64,
}

impl Window {
    /// Marker for values that are exact at every order (transform data,
    /// Berezinians).
    pub const EXACT: Window = Window {
        laurent_depth: 1 << 40,
        trunc: 1 << 40,
    };

    pub fn new(laurent_depth: i64, trunc: i64) -> Self {
        Window {
            laurent_depth,
            trunc,
        }
    }

    pub fn taylor(trunc: i64) -> Self {
        Window::new(0, trunc)
    }

    pub fn contains(&self, k: i64) -> bool {
        -self.laurent_depth <= k && k <= self.trunc
    }

    fn sum(self, o: Window) -> Window {
        if self == Window::EXACT {
            return o;
        }
        if o == Window::EXACT {
            return self;
        }
        Window::new(self.laurent_depth.max(o.laurent_depth), self.trunc.min(o.trunc))
    }

    /// Exact values are neutral; they carry no truncation.
    fn product(self, o: Window) -> Window {
        if self == Window::EXACT {
            return o;
        }
        if o == Window::EXACT {
            return self;
        }
        let cap = |v: i64| v.min(Window::EXACT.trunc);
        Window::new(
            cap(self.laurent_depth + o.laurent_depth),
            cap((self.trunc - o.laurent_depth).min(o.trunc - self.laurent_depth)),
        )
    }
}

impl Default for Window {
    fn default() -> Self {
        Window::taylor(8)
    }
}

/// Slot index of `z^p ξ^α η^β`.
fn slot_index(p: u8, a: u8, b: u8) -> usize {
    (p as usize) * 4 + (a as usize) * 2 + b as usize
}

fn slot_monomial(i: usize) -> Monomial {
    Monomial::new((i / 4) as i64, ((i / 2) % 2) as u8, (i % 2) as u8)
}

/// Coordinate to differentiate by.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coord {
    X,
    Z,
    Xi,
    Eta,
}

impl Coord {
    pub fn degree(self) -> Degree {
        match self {
            Coord::X => Degree::EVEN,
            Coord::Z => Degree::Z,
            Coord::Xi => Degree::XI,
            Coord::Eta => Degree::ETA,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuperFunction {
    slots: [Expr; 8],
    pub window: Window,
    /// Degree the component functions are declared to make the whole
    /// function have; metadata only.
    pub declared_degree: Option<Degree>,
}

impl SuperFunction {
    pub fn zero(window: Window) -> Self {
        SuperFunction {
            slots: Default::default(),
            window,
            declared_degree: None,
        }
    }

    pub fn scalar(c: Expr) -> Self {
        let mut f = SuperFunction::zero(Window::EXACT);
        f.slots[0] = c;
        f
    }

    pub fn one() -> Self {
        SuperFunction::scalar(Expr::one())
    }

    /// `c · z^k ξ^α η^β` for any integer `k`.
    pub fn term(c: Expr, m: Monomial) -> Result<Self> {
        let mut f = SuperFunction::zero(Window::EXACT);
        f.add_term(c, m)?;
        Ok(f)
    }

    pub fn z() -> Self {
        SuperFunction::term(Expr::one(), Monomial::z(1)).unwrap()
    }

    pub fn xi() -> Self {
        SuperFunction::term(Expr::one(), Monomial::new(0, 1, 0)).unwrap()
    }

    pub fn eta() -> Self {
        SuperFunction::term(Expr::one(), Monomial::new(0, 0, 1)).unwrap()
    }

    fn add_term(&mut self, c: Expr, m: Monomial) -> Result<()> {
        let p = m.z_power.rem_euclid(2);
        let r = m.z_power.div_euclid(2);
        let c = &c * &Expr::y().pow(r as i32)?;
        let i = slot_index(p as u8, m.xi, m.eta);
        self.slots[i] = &self.slots[i] + &c;
        Ok(())
    }

    /// Builds `Σ g_{kαβ} z^k ξ^α η^β` from component functions.
    pub fn from_components(
        components: &BTreeMap<(i64, u8, u8), Expr>,
        window: Window,
    ) -> Result<Self> {
        let mut f = SuperFunction::zero(window);
        for (&(k, a, b), g) in components {
            if !window.contains(k) {
                return Err(Error::OutOfWindow {
                    k,
                    lo: -window.laurent_depth,
                    hi: window.trunc,
                });
            }
            f.add_term(g.clone(), Monomial::new(k, a, b))?;
        }
        Ok(f)
    }

    pub fn with_window(mut self, window: Window) -> Self {
        self.window = window;
        self
    }

    pub fn with_declared_degree(mut self, d: Degree) -> Self {
        self.declared_degree = Some(d);
        self
    }

    /// Resummed coefficient of `z^p ξ^α η^β`, `p ∈ {0,1}`, as a function of
    /// `(x, y)`.
    pub fn slot(&self, p: u8, a: u8, b: u8) -> &Expr {
        &self.slots[slot_index(p, a, b)]
    }

    pub fn set_slot(&mut self, p: u8, a: u8, b: u8, c: Expr) {
        self.slots[slot_index(p, a, b)] = c;
    }

    pub fn slots(&self) -> impl Iterator<Item = (Monomial, &Expr)> {
        self.slots.iter().enumerate().map(|(i, c)| (slot_monomial(i), c))
    }

    pub fn is_zero(&self) -> bool {
        self.slots.iter().all(|c| c.is_zero())
    }

    /// Component function `g_{kαβ}`: the coefficient of `z^k ξ^α η^β`.
    pub fn coefficient(&self, k: i64, a: u8, b: u8) -> Result<Expr> {
        if !self.window.contains(k) {
            return Err(Error::OutOfWindow {
                k,
                lo: -self.window.laurent_depth,
                hi: self.window.trunc,
            });
        }
        let p = k.rem_euclid(2) as u8;
        self.slot(p, a, b).y_coeff(k.div_euclid(2))
    }

    /// The degree shared by all nonzero terms, if any.
    pub fn homogeneous_degree(&self) -> Option<Degree> {
        let mut d = None;
        for (m, c) in self.slots() {
            if c.is_zero() {
                continue;
            }
            match d {
                None => d = Some(m.degree()),
                Some(e) if e != m.degree() => return None,
                _ => {}
            }
        }
        Some(d.unwrap_or(Degree::EVEN))
    }

    pub fn scale(&self, c: &Expr) -> Self {
        SuperFunction {
            slots: std::array::from_fn(|i| &self.slots[i] * c),
            window: self.window,
            declared_degree: self.declared_degree,
        }
    }

    pub fn add(&self, o: &SuperFunction) -> Self {
        SuperFunction {
            slots: std::array::from_fn(|i| &self.slots[i] + &o.slots[i]),
            window: self.window.sum(o.window),
            declared_degree: None,
        }
    }

    pub fn sub(&self, o: &SuperFunction) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        SuperFunction {
            slots: std::array::from_fn(|i| -&self.slots[i]),
            window: self.window,
            declared_degree: self.declared_degree,
        }
    }

    /// Graded product; `z·z` folds into `y`.
    pub fn mul(&self, o: &SuperFunction) -> Self {
        let mut out = SuperFunction::zero(self.window.product(o.window));
        for (i, a) in self.slots.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.slots.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                if let Product::Signed(s, m) = monomial_mul(slot_monomial(i), slot_monomial(j)) {
                    let mut c = a * b;
                    if s < 0 {
                        c = -c;
                    }
                    if m.z_power == 2 {
                        c = &c * &Expr::y();
                    }
                    let k = slot_index((m.z_power % 2) as u8, m.xi, m.eta);
                    out.slots[k] = &out.slots[k] + &c;
                }
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = SuperFunction::one();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// The ξ,η-free part `c₀ + c₁ z`.
    pub fn body(&self) -> Self {
        let mut b = SuperFunction::zero(self.window);
        b.slots[0] = self.slots[0].clone();
        b.slots[4] = self.slots[4].clone();
        b
    }

    /// Multiplicative inverse. The body `c₀ + c₁ z` inverts as
    /// `(c₀ − c₁ z)/(c₀² − y c₁²)`; the nilpotent rest by a terminating
    /// geometric series.
    pub fn inverse(&self) -> Result<Self> {
        let (c0, c1) = (&self.slots[0], &self.slots[4]);
        let norm = &(c0 * c0) - &(&Expr::y() * &(c1 * c1));
        let inv_norm = norm.recip()?;
        let mut binv = SuperFunction::zero(Window::EXACT);
        binv.slots[0] = c0 * &inv_norm;
        binv.slots[4] = -&(c1 * &inv_norm);
        let nil = self.sub(&self.body());
        let step = binv.mul(&nil).neg();
        let mut sum = SuperFunction::one();
        let mut pw = SuperFunction::one();
        for _ in 0..2 {
            pw = pw.mul(&step);
            if pw.is_zero() {
                break;
            }
            sum = sum.add(&pw);
        }
        Ok(sum.mul(&binv).with_window(self.window))
    }

    /// Left graded derivation `∂_c`.
    pub fn deriv(&self, c: Coord) -> Self {
        let mut out = SuperFunction::zero(self.window);
        if c == Coord::Z {
            out.window = Window::new(
                (self.window.laurent_depth + 1).min(Window::EXACT.laurent_depth),
                self.window.trunc - 1,
            );
        }
        for (i, coef) in self.slots.iter().enumerate() {
            if coef.is_zero() {
                continue;
            }
            let m = slot_monomial(i);
            let (p, a, b) = (m.z_power as u8, m.xi, m.eta);
            let odd_z = if p == 1 { -1 } else { 1 };
            match c {
                Coord::X => {
                    out.slots[i] = &out.slots[i] + &coef.diff(Base::X);
                }
                Coord::Z => {
                    // ∂_z [c(x, z²) z^p] = 2 c_y z^{p+1} + p c z^{p-1}
                    let cy2 = &Expr::int(2) * &coef.diff(Base::Y);
                    if p == 0 {
                        let k = slot_index(1, a, b);
                        out.slots[k] = &out.slots[k] + &cy2;
                    } else {
                        let k = slot_index(0, a, b);
                        out.slots[k] = &out.slots[k] + &(coef + &(&cy2 * &Expr::y()));
                    }
                }
                Coord::Xi => {
                    if a == 1 {
                        let k = slot_index(p, 0, b);
                        let t = if odd_z < 0 { -coef } else { coef.clone() };
                        out.slots[k] = &out.slots[k] + &t;
                    }
                }
                Coord::Eta => {
                    // Crossing ξ costs nothing: (1,0)·(0,1) = 0.
                    if b == 1 {
                        let k = slot_index(p, a, 0);
                        let t = if odd_z < 0 { -coef } else { coef.clone() };
                        out.slots[k] = &out.slots[k] + &t;
                    }
                }
            }
        }
        out
    }

    /// Slot-wise symbolic equality.
    pub fn equal(&self, o: &SuperFunction) -> bool {
        self.slots.iter().zip(o.slots.iter()).all(|(a, b)| a.equal(b))
    }

    pub fn to_xy_form(&self) -> Result<EightComponentForm> {
        if self.window.laurent_depth > 0 && self.window != Window::EXACT {
            return Err(Error::LaurentNotSupported(self.window.laurent_depth));
        }
        let s = |p, a, b| self.slot(p, a, b).clone();
        Ok(EightComponentForm {
            phi00: s(0, 0, 0),
            phi11_t: s(1, 0, 0),
            psi01: s(0, 1, 0),
            psi10_t: s(1, 1, 0),
            psi10: s(0, 0, 1),
            psi01_t: s(1, 0, 1),
            a11: s(0, 1, 1),
            a00: s(1, 1, 1),
        })
    }
}

/// Degree carried by the component `g_{kαβ}` of a function of declared
/// degree `total`.
pub fn component_degree(total: Degree, k: i64, a: u8, b: u8) -> Degree {
    total + Monomial::new(k, a, b).degree()
}

impl fmt::Display for SuperFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .slots()
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| {
                if m == Monomial::ONE {
                    format!("({c})")
                } else {
                    format!("({c})*{m}")
                }
            })
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// The eight functions of `(u, w)`, `w = v²`, in
/// `F = φ00 + φ̃11 v + (ψ01 + ψ̃10 v) ζ + (ψ10 + ψ̃01 v) θ + (A11 + A00 v) ζθ`.
/// Expressions use `x` for `u` and `y` for `w`.
#[derive(Clone, Debug, PartialEq)]
pub struct EightComponentForm {
    pub phi00: Expr,
    pub phi11_t: Expr,
    pub psi01: Expr,
    pub psi10_t: Expr,
    pub psi10: Expr,
    pub psi01_t: Expr,
    pub a11: Expr,
    pub a00: Expr,
}

impl EightComponentForm {
    pub const NAMES: [&'static str; 8] =
        ["phi00", "phit11", "psi01", "psit10", "psi10", "psit01", "A11", "A00"];

    /// Slot monomials in the order of [`Self::NAMES`].
    pub const MONOMIALS: [(u8, u8, u8); 8] = [
        (0, 0, 0),
        (1, 0, 0),
        (0, 1, 0),
        (1, 1, 0),
        (0, 0, 1),
        (1, 0, 1),
        (0, 1, 1),
        (1, 1, 1),
    ];

    pub fn entries(&self) -> [&Expr; 8] {
        [
            &self.phi00,
            &self.phi11_t,
            &self.psi01,
            &self.psi10_t,
            &self.psi10,
            &self.psi01_t,
            &self.a11,
            &self.a00,
        ]
    }

    pub fn from_entries(e: [Expr; 8]) -> Self {
        let [phi00, phi11_t, psi01, psi10_t, psi10, psi01_t, a11, a00] = e;
        EightComponentForm {
            phi00,
            phi11_t,
            psi01,
            psi10_t,
            psi10,
            psi01_t,
            a11,
            a00,
        }
    }

    /// One independent two-variable atom per slot.
    pub fn generic() -> Self {
        EightComponentForm::from_entries(Self::NAMES.map(Expr::func2))
    }

    pub fn to_superfunction(&self) -> SuperFunction {
        let mut f = SuperFunction::zero(Window::EXACT);
        for (c, (p, a, b)) in self.entries().into_iter().zip(Self::MONOMIALS) {
            f.set_slot(p, a, b, c.clone());
        }
        f
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::sign;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn g(name: &str) -> Expr {
        Expr::func1(name)
    }

    /// Random homogeneous function of a random degree with small polynomial
    /// coefficients in x and y.
    fn random_homogeneous(rng: &mut ChaCha8Rng) -> (Degree, SuperFunction) {
        let d = Degree::ALL[rng.gen_range(0..4)];
        let mut f = SuperFunction::zero(Window::EXACT);
        for (m, _) in SuperFunction::zero(Window::EXACT).slots() {
            if m.degree() != d {
                continue;
            }
            let mut c = Expr::zero();
            for (i, j) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                let k: i64 = rng.gen_range(-3..4);
                c = &c + &(&(&Expr::int(k) * &Expr::x().pow(i).unwrap()) * &Expr::y().pow(j).unwrap());
            }
            f.set_slot(m.z_power as u8, m.xi, m.eta, c);
        }
        (d, f)
    }

    #[test]
    fn xi_eta_commute() {
        let a = SuperFunction::xi().mul(&SuperFunction::eta());
        let b = SuperFunction::eta().mul(&SuperFunction::xi());
        assert!(a.equal(&b));
        assert!(a.slot(0, 1, 1).equal(&Expr::one()));
    }

    #[test]
    fn nilpotent_square() {
        let t = SuperFunction::term(Expr::one(), Monomial::new(1, 1, 1)).unwrap();
        assert!(t.mul(&t).is_zero());
    }

    #[test]
    fn square_of_v() {
        let fv = Expr::func2("fV");
        let gv = Expr::func2("gV");
        let v = SuperFunction::z()
            .scale(&fv)
            .add(&SuperFunction::xi().mul(&SuperFunction::eta()).scale(&gv));
        let w = v.mul(&v);
        assert!(w.slot(0, 0, 0).equal(&(&Expr::y() * &(&fv * &fv))));
        assert!(w.slot(1, 1, 1).equal(&(&Expr::int(2) * &(&fv * &gv))));
        assert!(w.sub(&w.body()).sub(&w.body()).add(&w.body()).slots().filter(|(_, c)| !c.is_zero()).count() == 1);
    }

    #[test]
    fn derivative_examples() {
        let t = SuperFunction::term(g("q"), Monomial::new(3, 1, 1)).unwrap();
        let dd = t.deriv(Coord::Eta).deriv(Coord::Xi);
        assert!(dd.equal(&SuperFunction::term(g("q"), Monomial::z(3)).unwrap()));
        let z2 = SuperFunction::term(Expr::one(), Monomial::z(2)).unwrap();
        assert!(z2.deriv(Coord::Z).equal(&SuperFunction::z().scale(&Expr::int(2))));
        let zm = SuperFunction::term(Expr::one(), Monomial::z(-1)).unwrap();
        let expect = SuperFunction::term(Expr::int(-1), Monomial::z(-2)).unwrap();
        assert!(zm.deriv(Coord::Z).equal(&expect));
    }

    #[test]
    fn fermionic_integral_picks_top_component() {
        // ∂_ξ ∂_η (g z^k ξη) = g z^k
        for k in -2..5 {
            let t = SuperFunction::term(g("q"), Monomial::new(k, 1, 1)).unwrap();
            let r = t.deriv(Coord::Eta).deriv(Coord::Xi);
            assert!(r.equal(&SuperFunction::term(g("q"), Monomial::z(k)).unwrap()), "k = {k}");
        }
    }

    #[test]
    fn coefficient_reads_components() {
        let t = SuperFunction::term(Expr::one(), Monomial::new(1, 1, 1)).unwrap();
        assert!(t.coefficient(1, 1, 1).unwrap().equal(&Expr::one()));
        let mut comps = BTreeMap::new();
        for k in -3..4 {
            comps.insert((k, 0, 0), g(&format!("c{k}")));
        }
        let f = SuperFunction::from_components(&comps, Window::new(3, 3)).unwrap();
        for k in -3..4 {
            assert!(f.coefficient(k, 0, 0).unwrap().equal(&g(&format!("c{k}"))));
        }
        assert!(matches!(f.coefficient(4, 0, 0), Err(Error::OutOfWindow { .. })));
    }

    #[test]
    fn coefficient_of_product_matches_signed_convolution() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let mut ca = BTreeMap::new();
            let mut cb = BTreeMap::new();
            for k in 0..3 {
                for a in 0..2 {
                    for b in 0..2 {
                        ca.insert((k, a, b), Expr::int(rng.gen_range(-3..4)));
                        cb.insert((k, a, b), Expr::int(rng.gen_range(-3..4)));
                    }
                }
            }
            let fa = SuperFunction::from_components(&ca, Window::taylor(2)).unwrap();
            let fb = SuperFunction::from_components(&cb, Window::taylor(2)).unwrap();
            let prod = fa.mul(&fb);
            assert_eq!(prod.window, Window::taylor(2));
            for k in 0..=2 {
                for a in 0..2 {
                    for b in 0..2 {
                        let mut want = Expr::zero();
                        for ((k1, a1, b1), c1) in &ca {
                            for ((k2, a2, b2), c2) in &cb {
                                if let Product::Signed(s, m) =
                                    monomial_mul(Monomial::new(*k1, *a1, *b1), Monomial::new(*k2, *a2, *b2))
                                {
                                    if m == Monomial::new(k, a, b) {
                                        want = &want + &(&Expr::int(s as i64) * &(c1 * c2));
                                    }
                                }
                            }
                        }
                        assert!(prod.coefficient(k, a, b).unwrap().equal(&want));
                    }
                }
            }
        }
    }

    #[test]
    fn graded_ring_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let (da, a) = random_homogeneous(&mut rng);
            let (db, b) = random_homogeneous(&mut rng);
            let (_, c) = random_homogeneous(&mut rng);
            let ab = a.mul(&b);
            let ba = b.mul(&a).scale(&Expr::int(sign(da, db) as i64));
            assert!(ab.equal(&ba));
            assert!(ab.mul(&c).equal(&a.mul(&b.mul(&c))));
            for coord in [Coord::X, Coord::Z, Coord::Xi, Coord::Eta] {
                let lhs = ab.deriv(coord);
                let rhs = a
                    .deriv(coord)
                    .mul(&b)
                    .add(&a.mul(&b.deriv(coord)).scale(&Expr::int(sign(coord.degree(), da) as i64)));
                assert!(lhs.equal(&rhs), "Leibniz for {coord:?}");
            }
            // ⟦∂_a, ∂_b⟧ = 0 for every pair.
            let all = [Coord::X, Coord::Z, Coord::Xi, Coord::Eta];
            for c1 in all {
                for c2 in all {
                    let s = sign(c1.degree(), c2.degree()) as i64;
                    let l = a.deriv(c2).deriv(c1);
                    let r = a.deriv(c1).deriv(c2).scale(&Expr::int(s));
                    assert!(l.equal(&r), "{c1:?} {c2:?}");
                }
            }
        }
    }

    #[test]
    fn bracket_with_coordinates_is_delta() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let coords = [
            (Coord::Z, SuperFunction::z()),
            (Coord::Xi, SuperFunction::xi()),
            (Coord::Eta, SuperFunction::eta()),
        ];
        for _ in 0..50 {
            let (_, f) = random_homogeneous(&mut rng);
            for (i, (dc, _)) in coords.iter().enumerate() {
                for (j, (_, gen)) in coords.iter().enumerate() {
                    // ⟦∂_a, X_b⟧ F = ∂_a(X_b F) − (−1)^{a·b} X_b ∂_a F
                    let s = sign(dc.degree(), coords[j].0.degree()) as i64;
                    let br = gen
                        .mul(&f)
                        .deriv(*dc)
                        .sub(&gen.mul(&f.deriv(*dc)).scale(&Expr::int(s)));
                    let want = if i == j { f.clone() } else { SuperFunction::zero(Window::EXACT) };
                    assert!(br.equal(&want));
                }
            }
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let (_, mut f) = random_homogeneous(&mut rng);
            f = f.add(&SuperFunction::scalar(&Expr::int(2) + &Expr::x()));
            f = f.add(&SuperFunction::term(Expr::int(rng.gen_range(-3..4)), Monomial::new(0, 1, 0)).unwrap());
            f = f.add(&SuperFunction::term(Expr::int(rng.gen_range(-3..4)), Monomial::new(1, 0, 1)).unwrap());
            let inv = f.inverse().unwrap();
            assert!(f.mul(&inv).equal(&SuperFunction::one()));
            assert!(inv.mul(&f).equal(&SuperFunction::one()));
        }
    }

    #[test]
    fn xy_form_slots() {
        let t = SuperFunction::term(g("q"), Monomial::new(1, 1, 1)).unwrap();
        assert!(t.to_xy_form().unwrap().a00.equal(&g("q")));
        let t = SuperFunction::term(g("q"), Monomial::new(0, 1, 1)).unwrap();
        assert!(t.to_xy_form().unwrap().a11.equal(&g("q")));
        let mut comps = BTreeMap::new();
        for k in 0..4 {
            comps.insert((k, 0, 0), g(&format!("g{k}")));
        }
        let f = SuperFunction::from_components(&comps, Window::taylor(3)).unwrap();
        let form = f.to_xy_form().unwrap();
        // Even/odd split: w stands in for z².
        assert!(form.phi00.equal(&(&g("g0") + &(&g("g2") * &Expr::y()))));
        assert!(form.phi11_t.equal(&(&g("g1") + &(&g("g3") * &Expr::y()))));
        assert!(form.to_superfunction().equal(&f));
        let l = f.with_window(Window::new(1, 3));
        assert!(matches!(l.to_xy_form(), Err(Error::LaurentNotSupported(1))));
    }

    #[test]
    fn declared_degree_metadata() {
        assert_eq!(component_degree(Degree::EVEN, 1, 1, 1), Degree::EVEN);
        for k in 0..6 {
            for a in 0..2u8 {
                for b in 0..2u8 {
                    let d = component_degree(Degree::EVEN, k, a, b);
                    assert_eq!(d, Degree::new((k as u8 + b) & 1, (k as u8 + a) & 1));
                }
            }
        }
    }
}
