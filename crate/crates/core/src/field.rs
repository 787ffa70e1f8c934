//! Galois fields GF(p^k) on dense element indices, and prime-power factoring.
//!
//! An element is the integer whose base-p digits are its polynomial
//! coefficients, lowest degree first. So in GF(4) the element `x` is 2
//! and `x + 1` is 3.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

const MAX_ORDER: u32 = 1 << 16;

/// Returns `(p, k)` with `q = p^k`, or `None` when `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = smallest_prime_factor(q);
    let mut rest = q;
    let mut k = 0;
    while rest % p == 0 {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p as u32, k))
}

pub fn is_prime_power(q: u64) -> bool {
    prime_power(q).is_some()
}

fn smallest_prime_factor(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return d;
        }
        d += 2;
    }
    n
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimePower {
    pub prime: u32,
    pub exponent: u32,
    pub value: u32,
}

/// Coprime prime-power decomposition of `s`, factors sorted by prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimePowerFactorization {
    pub s: u32,
    pub factors: Vec<PrimePower>,
}

impl PrimePowerFactorization {
    pub fn values(&self) -> Vec<u32> {
        self.factors.iter().map(|f| f.value).collect()
    }
}

pub fn factorize_prime_powers(s: u32) -> PrimePowerFactorization {
    let mut factors = Vec::new();
    let mut rest = s as u64;
    while rest > 1 {
        let p = smallest_prime_factor(rest);
        let mut value = 1u64;
        let mut exponent = 0;
        while rest % p == 0 {
            rest /= p;
            value *= p;
            exponent += 1;
        }
        factors.push(PrimePower { prime: p as u32, exponent, value: value as u32 });
    }
    PrimePowerFactorization { s, factors }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Neg,
    Inv,
}

/// GF(q) with log/exp tables built from the smallest irreducible polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Field {
    p: u32,
    k: u32,
    q: u32,
    poly: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl Field {
    pub fn new(q: u32) -> Result<Field> {
        let (p, k) = prime_power(q as u64).ok_or(Error::NotPrimePower(q as u64))?;
        if q > MAX_ORDER {
            return Err(Error::BadParameter(alloc::format!("field order {q} above 2^16")));
        }
        let poly = if k == 1 { vec![0, 1] } else { smallest_irreducible(p, k) };
        let mut f = Field { p, k, q, poly, exp: Vec::new(), log: Vec::new() };
        f.build_tables();
        Ok(f)
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    /// Monic reduction polynomial, coefficients lowest degree first.
    pub fn modulus(&self) -> &[u32] {
        &self.poly
    }

    fn digits(&self, mut a: u32) -> Vec<u32> {
        let mut d = Vec::with_capacity(self.k as usize);
        for _ in 0..self.k {
            d.push(a % self.p);
            a /= self.p;
        }
        d
    }

    fn undigits(&self, d: &[u32]) -> u32 {
        d.iter().rev().fold(0, |acc, &x| acc * self.p + x)
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        if self.k == 1 {
            return (a + b) % self.p;
        }
        let (mut a, mut b) = (a, b);
        let (mut out, mut place) = (0, 1);
        for _ in 0..self.k {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn neg(&self, a: u32) -> u32 {
        if self.p == 2 {
            return a;
        }
        let (mut a, mut out, mut place) = (a, 0, 1);
        for _ in 0..self.k {
            out += ((self.p - a % self.p) % self.p) * place;
            a /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let e = (self.log[a as usize] + self.log[b as usize]) % (self.q - 1);
        self.exp[e as usize]
    }

    pub fn inv(&self, a: u32) -> Result<u32> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        let e = (self.q - 1 - self.log[a as usize]) % (self.q - 1);
        Ok(self.exp[e as usize])
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let l = (self.log[a as usize] as u64 * (e % (self.q as u64 - 1))) % (self.q as u64 - 1);
        self.exp[l as usize]
    }

    /// One entry point for all five operations; unary ones read `b`.
    pub fn op(&self, which: FieldOp, a: u32, b: u32) -> Result<u32> {
        Ok(match which {
            FieldOp::Add => self.add(a, b),
            FieldOp::Sub => self.sub(a, b),
            FieldOp::Mul => self.mul(a, b),
            FieldOp::Neg => self.neg(b),
            FieldOp::Inv => self.inv(b)?,
        })
    }

    pub fn is_square(&self, a: u32) -> bool {
        a == 0 || self.p == 2 || self.log[a as usize] % 2 == 0
    }

    /// Multiplication by polynomial arithmetic, used to build the tables
    /// and as an oracle for them.
    pub fn mul_slow(&self, a: u32, b: u32) -> u32 {
        let (p, k) = (self.p, self.k as usize);
        let (da, db) = (self.digits(a), self.digits(b));
        let mut prod = vec![0u32; 2 * k];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        for deg in (k..2 * k).rev() {
            let c = prod[deg];
            if c != 0 {
                for (i, &m) in self.poly.iter().enumerate() {
                    let idx = deg - k + i;
                    prod[idx] = (prod[idx] + p * p - c * m % p) % p;
                }
            }
        }
        self.undigits(&prod[..k])
    }

    fn build_tables(&mut self) {
        let q = self.q;
        let n = (q - 1) as usize;
        for g in 1..q {
            let mut exp = Vec::with_capacity(n);
            let mut x = 1;
            let mut ok = true;
            for i in 0..n {
                if i > 0 && x == 1 {
                    ok = false;
                    break;
                }
                exp.push(x);
                x = self.mul_slow(x, g);
            }
            if ok && x == 1 {
                let mut log = vec![0u32; q as usize];
                for (i, &e) in exp.iter().enumerate() {
                    log[e as usize] = i as u32;
                }
                self.exp = exp;
                self.log = log;
                return;
            }
        }
        unreachable!("every finite field has a primitive element");
    }
}

/// Horner evaluation; coefficients lowest degree first.
pub fn poly_eval(f: &Field, coeffs: &[u32], point: u32) -> u32 {
    coeffs.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, point), c))
}

fn smallest_irreducible(p: u32, k: u32) -> Vec<u32> {
    // Candidates in order of their element index: the coefficient vector
    // read low-degree-first as base-p digits. This picks x^3 + x + 1 for
    // GF(8) rather than x^3 + x^2 + 1.
    let total = (p as u64).pow(k);
    for idx in 0..total {
        let mut tail = vec![0u32; k as usize];
        let mut x = idx;
        for c in tail.iter_mut() {
            *c = (x % p as u64) as u32;
            x /= p as u64;
        }
        tail.push(1);
        if is_irreducible(&tail, p) {
            return tail;
        }
    }
    unreachable!("irreducible polynomials exist in every degree");
}

/// Trial division by every monic polynomial of degree 1..=k/2.
fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let k = poly.len() - 1;
    for deg in 1..=k / 2 {
        let count = (p as u64).pow(deg as u32);
        for idx in 0..count {
            let mut f = vec![0u32; deg + 1];
            let mut x = idx;
            for c in f.iter_mut().take(deg) {
                *c = (x % p as u64) as u32;
                x /= p as u64;
            }
            f[deg] = 1;
            if poly_rem_is_zero(poly, &f, p) {
                return false;
            }
        }
    }
    true
}

fn poly_rem_is_zero(num: &[u32], den: &[u32], p: u32) -> bool {
    let mut r: Vec<u32> = num.to_vec();
    let dd = den.len() - 1;
    while r.len() > dd {
        let c = *r.last().unwrap();
        if c != 0 {
            let shift = r.len() - 1 - dd;
            for (i, &m) in den.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p * p - c * m % p) % p;
            }
        }
        r.pop();
    }
    r.iter().all(|&x| x == 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn axioms(q: u32) {
        let f = Field::new(q).unwrap();
        for a in 0..q {
            assert_eq!(f.add(a, 0), a);
            assert_eq!(f.mul(a, 1), a);
            assert_eq!(f.add(a, f.neg(a)), 0);
            if a != 0 {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
            for b in 0..q {
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                assert_eq!(f.mul(a, b), f.mul_slow(a, b), "q={q} a={a} b={b}");
                for c in 0..q {
                    assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                    assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                }
            }
        }
    }

    #[test]
    fn field_axioms_exhaustive() {
        for q in [2, 3, 4, 5, 7, 8, 9, 16, 25, 27] {
            axioms(q);
        }
    }

    #[test]
    fn moduli() {
        assert_eq!(Field::new(4).unwrap().modulus(), &[1, 1, 1]);
        assert_eq!(Field::new(8).unwrap().modulus(), &[1, 1, 0, 1]);
        assert_eq!(Field::new(9).unwrap().modulus(), &[1, 0, 1]);
        assert_eq!(Field::new(16).unwrap().modulus(), &[1, 1, 0, 0, 1]);
        assert_eq!(Field::new(25).unwrap().modulus(), &[2, 0, 1]);
        assert_eq!(Field::new(27).unwrap().modulus(), &[1, 2, 0, 1]);
    }

    #[test]
    fn examples() {
        let f5 = Field::new(5).unwrap();
        assert_eq!(f5.mul(3, 4), 2);
        let f4 = Field::new(4).unwrap();
        assert_eq!(f4.mul(2, 2), 3);
        assert_eq!(Field::new(6), Err(Error::NotPrimePower(6)));
        assert_eq!(Field::new(1), Err(Error::NotPrimePower(1)));
        assert_eq!(Field::new(2).unwrap().add(1, 1), 0);
        assert_eq!(Field::new(3).unwrap().mul(2, 2), 1);
        assert_eq!(Field::new(8).unwrap().mul(2, 4), 3);
        assert_eq!(f5.inv(0), Err(Error::DivisionByZero));
        assert_eq!(f5.op(FieldOp::Inv, 0, 2), Ok(3));
    }

    #[test]
    fn horner() {
        assert_eq!(poly_eval(&Field::new(3).unwrap(), &[1, 2], 2), 2);
        assert_eq!(poly_eval(&Field::new(2).unwrap(), &[1, 1, 1], 1), 1);
        let f4 = Field::new(4).unwrap();
        assert_eq!(poly_eval(&f4, &[0, 0, 1], 2), f4.mul(2, 2));
        assert_eq!(poly_eval(&f4, &[0, 0, 1], 2), 3);
    }

    #[test]
    fn deterministic() {
        for q in [16, 27, 49, 64] {
            assert_eq!(Field::new(q).unwrap(), Field::new(q).unwrap());
        }
    }

    #[test]
    fn factorization() {
        assert_eq!(factorize_prime_powers(56).values(), [8, 7]);
        assert_eq!(factorize_prime_powers(12).values(), [4, 3]);
        assert_eq!(factorize_prime_powers(7).values(), [7]);
        for s in 2..=10000u32 {
            let f = factorize_prime_powers(s);
            assert_eq!(f.values().iter().product::<u32>(), s);
            for w in f.factors.windows(2) {
                assert!(w[0].prime < w[1].prime);
            }
            for pp in &f.factors {
                assert_eq!(prime_power(pp.value as u64), Some((pp.prime, pp.exponent)));
            }
        }
    }
}
