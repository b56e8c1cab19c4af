//! Z₂×Z₂ degrees, the commutation sign rule and signed monomials in the
//! generators `z`, `ξ`, `η`.
//!
//! Monomials are kept in the canonical order `z^k ξ^α η^β`; every sign in the
//! crate is measured relative to that order.

use std::fmt;
use std::ops::Add;

/// An element of Z₂×Z₂.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Degree {
    pub a1: u8,
    pub a2: u8,
}

impl Degree {
    pub const EVEN: Degree = Degree { a1: 0, a2: 0 };
    /// Degree of `ξ` and `∂_ξ`.
    pub const XI: Degree = Degree { a1: 0, a2: 1 };
    /// Degree of `η` and `∂_η`.
    pub const ETA: Degree = Degree { a1: 1, a2: 0 };
    /// Degree of the exotic coordinate `z` and of `∂_z`.
    pub const Z: Degree = Degree { a1: 1, a2: 1 };

    pub const ALL: [Degree; 4] = [Degree::EVEN, Degree::XI, Degree::ETA, Degree::Z];

    pub fn new(a1: u8, a2: u8) -> Self {
        Degree {
            a1: a1 & 1,
            a2: a2 & 1,
        }
    }

    /// Inner product mod 2.
    pub fn dot(self, other: Degree) -> u8 {
        (self.a1 * other.a1 + self.a2 * other.a2) & 1
    }

    /// `k` copies of `self`, with `k` allowed to be negative.
    pub fn times(self, k: i64) -> Degree {
        if k.rem_euclid(2) == 0 {
            Degree::EVEN
        } else {
            self
        }
    }
}

impl Add for Degree {
    type Output = Degree;
    fn add(self, rhs: Degree) -> Degree {
        Degree::new(self.a1 ^ rhs.a1, self.a2 ^ rhs.a2)
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a1, self.a2)
    }
}

/// `(-1)^{a·b}`: the sign picked up when swapping homogeneous elements of
/// degrees `a` and `b`.
pub fn sign(a: Degree, b: Degree) -> i32 {
    if a.dot(b) == 0 {
        1
    } else {
        -1
    }
}

/// The basis element `z^k ξ^α η^β`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub z_power: i64,
    pub xi: u8,
    pub eta: u8,
}

impl Monomial {
    pub const ONE: Monomial = Monomial {
        z_power: 0,
        xi: 0,
        eta: 0,
    };

    pub fn new(z_power: i64, xi: u8, eta: u8) -> Self {
        assert!(xi <= 1 && eta <= 1, "ξ and η are nilpotent");
        Monomial { z_power, xi, eta }
    }

    pub fn z(k: i64) -> Self {
        Monomial::new(k, 0, 0)
    }

    pub fn degree(&self) -> Degree {
        Degree::Z.times(self.z_power) + Degree::XI.times(self.xi as i64) + Degree::ETA.times(self.eta as i64)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.z_power {
            0 => {}
            1 => parts.push("z".to_string()),
            k => parts.push(format!("z^{k}")),
        }
        if self.xi == 1 {
            parts.push("ξ".into());
        }
        if self.eta == 1 {
            parts.push("η".into());
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(""))
        }
    }
}

/// Result of multiplying two canonical monomials.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Product {
    Zero,
    Signed(i32, Monomial),
}

/// Multiplies `m1·m2` and reorders into canonical form.
///
/// Only `z^b` of the right factor has to travel left past `ξ^α η^β` of the
/// left factor; `ξ` and `η` commute with each other.
pub fn monomial_mul(m1: Monomial, m2: Monomial) -> Product {
    if m1.xi + m2.xi > 1 || m1.eta + m2.eta > 1 {
        return Product::Zero;
    }
    let crossings = m2.z_power.rem_euclid(2) * (m1.xi + m1.eta) as i64;
    let sign = if crossings % 2 == 0 { 1 } else { -1 };
    Product::Signed(
        sign,
        Monomial {
            z_power: m1.z_power + m2.z_power,
            xi: m1.xi + m2.xi,
            eta: m1.eta + m2.eta,
        },
    )
}
