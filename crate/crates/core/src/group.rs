//! The abelian groups difference schemes live in.
//!
//! For a prime power s the group is the additive group of GF(s), which on
//! element indices is digit-wise addition mod p. Otherwise it is ℤ_s.
//! For a prime s both readings agree.

use crate::field::prime_power;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group {
    Cyclic(u32),
    Elementary { p: u32, k: u32 },
}

impl Group {
    /// The group a scheme with `s` symbols uses by default.
    pub fn for_order(s: u32) -> Group {
        match prime_power(s as u64) {
            Some((p, k)) if k > 1 => Group::Elementary { p, k },
            _ => Group::Cyclic(s),
        }
    }

    pub fn order(&self) -> u32 {
        match *self {
            Group::Cyclic(s) => s,
            Group::Elementary { p, k } => p.pow(k),
        }
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        match *self {
            Group::Cyclic(s) => (a + b) % s,
            Group::Elementary { p: 2, .. } => a ^ b,
            Group::Elementary { p, k } => {
                let (mut a, mut b, mut out, mut place) = (a, b, 0, 1);
                for _ in 0..k {
                    out += (a % p + b % p) % p * place;
                    a /= p;
                    b /= p;
                    place *= p;
                }
                out
            }
        }
    }

    pub fn neg(&self, a: u32) -> u32 {
        match *self {
            Group::Cyclic(s) => (s - a % s) % s,
            Group::Elementary { p: 2, .. } => a,
            Group::Elementary { p, k } => {
                let (mut a, mut out, mut place) = (a, 0, 1);
                for _ in 0..k {
                    out += (p - a % p) % p * place;
                    a /= p;
                    place *= p;
                }
                out
            }
        }
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }
}
