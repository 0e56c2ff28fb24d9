//! Arithmetic in GF(q²) with the involution τ(x) = x^q.
//!
//! Elements are stored as discrete logarithms over a fixed primitive
//! element: rep 0 is zero and rep k > 0 is α^(k−1). The modulus is the
//! smallest monic irreducible polynomial of degree 2e over GF(p), where
//! q = p^e, ordered by its base-p code, and α is the element with the
//! smallest code that generates the multiplicative group. Element codes
//! are therefore identical on every platform.

use crate::error::{Error, Result};

/// A field element as a log-table code. Only meaningful with the table that made it.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FieldElem(pub u8);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

#[derive(Clone, Debug)]
pub struct FieldTable {
    q: u32,
    p: u32,
    /// q² = p^degree.
    order: usize,
    degree: u32,
    /// Low-to-high coefficients of the monic modulus, leading 1 omitted.
    modulus: Vec<u32>,
    /// exp[i] = polynomial code of α^i, for 0 ≤ i < order − 1.
    exp: Vec<u16>,
    /// log[code] = i with α^i = code; unused at code 0.
    log: Vec<u16>,
    add: Vec<u8>,
    neg: Vec<u8>,
}

/// Returns `(p, e)` with `q = p^e`, if `q` is a prime power.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut r = q;
    let mut e = 0;
    while r % p == 0 {
        r /= p;
        e += 1;
    }
    (r == 1).then_some((p, e))
}

/// The prime powers accepted by [`FieldTable::new`].
pub const SUPPORTED_Q: [u32; 10] = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16];

fn poly_mulmod(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let d = modulus.len();
    let mut prod = vec![0u32; 2 * d];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    // x^d = −Σ modulus[i] x^i
    for top in (d..2 * d).rev() {
        let c = prod[top];
        if c == 0 {
            continue;
        }
        prod[top] = 0;
        for (i, &m) in modulus.iter().enumerate() {
            let idx = top - d + i;
            prod[idx] = (prod[idx] + (p - c) * m) % p;
        }
    }
    prod.truncate(d);
    prod
}

fn digits(code: usize, p: u32, len: usize) -> Vec<u32> {
    let mut c = code as u32;
    (0..len)
        .map(|_| {
            let r = c % p;
            c /= p;
            r
        })
        .collect()
}

fn undigits(v: &[u32], p: u32) -> usize {
    v.iter().rev().fold(0usize, |acc, &x| acc * p as usize + x as usize)
}

/// Irreducibility by trial division: no monic factor of degree ≤ d/2.
fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let d = modulus.len();
    let mut f = modulus.to_vec();
    f.push(1);
    for fd in 1..=d / 2 {
        let count = (p as usize).pow(fd as u32);
        for code in 0..count {
            let mut g = digits(code, p, fd);
            g.push(1);
            if poly_rem(&f, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn poly_rem(f: &[u32], g: &[u32], p: u32) -> Vec<u32> {
    // g monic
    let mut r = f.to_vec();
    let dg = g.len() - 1;
    while r.len() > dg {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dg;
        if lead != 0 {
            for (i, &c) in g.iter().enumerate() {
                r[shift + i] = (r[shift + i] + (p - lead) * c) % p;
            }
        }
        r.pop();
    }
    r
}

impl FieldTable {
    pub fn new(q: u32) -> Result<FieldTable> {
        let (p, e) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
        if q > 16 {
            return Err(Error::UnsupportedSize(q));
        }
        let degree = 2 * e;
        let d = degree as usize;
        let order = (q * q) as usize;

        let modulus = (0..order)
            .map(|code| digits(code, p, d))
            .find(|m| m[0] != 0 && is_irreducible(m, p))
            .expect("an irreducible polynomial of every degree exists");

        let mut exp = vec![0u16; order - 1];
        let mut log = vec![0u16; order];
        let one = digits(1, p, d);
        let mut found = false;
        // code 1 is the identity, never a generator since order > 2
        for g in 2..order {
            let gv = digits(g, p, d);
            let mut cur = one.clone();
            let mut ok = true;
            for (i, slot) in exp.iter_mut().enumerate() {
                let c = undigits(&cur, p);
                if i > 0 && c == 1 {
                    ok = false;
                    break;
                }
                *slot = c as u16;
                cur = poly_mulmod(&cur, &gv, &modulus, p);
            }
            if ok {
                found = true;
                break;
            }
        }
        assert!(found, "primitive element must exist");
        for (i, &c) in exp.iter().enumerate() {
            log[c as usize] = i as u16;
        }

        let to_rep = |code: usize| -> u8 {
            if code == 0 {
                0
            } else {
                (log[code] + 1) as u8
            }
        };
        let to_code = |rep: usize| -> usize {
            if rep == 0 {
                0
            } else {
                exp[rep - 1] as usize
            }
        };
        let mut add = vec![0u8; order * order];
        let mut neg = vec![0u8; order];
        for a in 0..order {
            let da = digits(to_code(a), p, d);
            let na: Vec<u32> = da.iter().map(|&x| (p - x) % p).collect();
            neg[a] = to_rep(undigits(&na, p));
            for b in 0..order {
                let db = digits(to_code(b), p, d);
                let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a * order + b] = to_rep(undigits(&s, p));
            }
        }

        Ok(FieldTable {
            q,
            p,
            order,
            degree,
            modulus,
            exp,
            log,
            add,
            neg,
        })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    /// q².
    pub fn order(&self) -> usize {
        self.order
    }

    /// Degree of GF(q²) over its prime field.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Low-to-high coefficients of the monic modulus, without the leading 1.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// All elements in rep order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.order).map(|r| FieldElem(r as u8))
    }

    /// α^k for the primitive element α.
    pub fn primitive_power(&self, k: u64) -> FieldElem {
        FieldElem((k % (self.order as u64 - 1)) as u8 + 1)
    }

    /// Base-p coefficient code of the polynomial representing `x`.
    pub fn code(&self, x: FieldElem) -> usize {
        if x.is_zero() {
            0
        } else {
            self.exp[x.0 as usize - 1] as usize
        }
    }

    pub fn from_code(&self, code: usize) -> FieldElem {
        assert!(code < self.order);
        if code == 0 {
            FieldElem::ZERO
        } else {
            FieldElem(self.log[code] as u8 + 1)
        }
    }

    /// The image of the integer `k` in the prime field.
    pub fn from_int(&self, k: i64) -> FieldElem {
        self.from_code(k.rem_euclid(self.p as i64) as usize)
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        FieldElem(self.add[a.0 as usize * self.order + b.0 as usize])
    }

    #[inline]
    pub fn neg(&self, a: FieldElem) -> FieldElem {
        FieldElem(self.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if a.is_zero() || b.is_zero() {
            return FieldElem::ZERO;
        }
        let m = self.order - 1;
        let s = (a.0 as usize - 1) + (b.0 as usize - 1);
        FieldElem((s % m) as u8 + 1)
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let m = self.order - 1;
        Ok(FieldElem(((m - (a.0 as usize - 1)) % m) as u8 + 1))
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElem, k: u64) -> FieldElem {
        if k == 0 {
            return FieldElem::ONE;
        }
        if a.is_zero() {
            return FieldElem::ZERO;
        }
        let m = (self.order - 1) as u64;
        FieldElem((((a.0 as u64 - 1) * (k % m)) % m) as u8 + 1)
    }

    /// τ(x) = x^q.
    #[inline]
    pub fn frobenius(&self, a: FieldElem) -> FieldElem {
        if a.is_zero() {
            return a;
        }
        let m = self.order - 1;
        FieldElem((((a.0 as usize - 1) * self.q as usize) % m) as u8 + 1)
    }

    /// x·τ(x), an element of the fixed field.
    pub fn norm(&self, a: FieldElem) -> FieldElem {
        self.mul(a, self.frobenius(a))
    }

    /// x + τ(x), an element of the fixed field.
    pub fn trace(&self, a: FieldElem) -> FieldElem {
        self.add(a, self.frobenius(a))
    }

    pub fn is_fixed(&self, a: FieldElem) -> bool {
        self.frobenius(a) == a
    }

    /// The copy of GF(q) fixed by τ, in rep order.
    pub fn fixed_field(&self) -> Vec<FieldElem> {
        self.elements().filter(|&x| self.is_fixed(x)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(16), Some((2, 4)));
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
        assert_eq!(FieldTable::new(6).unwrap_err(), Error::NotPrimePower(6));
        assert_eq!(FieldTable::new(17).unwrap_err(), Error::UnsupportedSize(17));
    }

    #[test]
    fn gf4_cube_roots() {
        let f = FieldTable::new(2).unwrap();
        assert_eq!(f.order(), 4);
        for x in f.elements().skip(1) {
            assert_eq!(f.pow(x, 3), FieldElem::ONE);
        }
    }

    #[test]
    fn axioms_exhaustive_small() {
        for q in [2, 3, 4, 5] {
            let f = FieldTable::new(q).unwrap();
            let els: Vec<_> = f.elements().collect();
            for &a in &els {
                assert_eq!(f.add(a, FieldElem::ZERO), a);
                assert_eq!(f.mul(a, FieldElem::ONE), a);
                assert_eq!(f.add(a, f.neg(a)), FieldElem::ZERO);
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElem::ONE);
                }
                for &b in &els {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for &c in &els {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn frobenius_is_involutive_automorphism() {
        for q in SUPPORTED_Q {
            let f = FieldTable::new(q).unwrap();
            let mut nontrivial = false;
            for a in f.elements() {
                assert_eq!(f.frobenius(f.frobenius(a)), a);
                // x^q computed by repeated multiplication
                let mut xq = FieldElem::ONE;
                for _ in 0..q {
                    xq = f.mul(xq, a);
                }
                assert_eq!(f.frobenius(a), xq);
                nontrivial |= f.frobenius(a) != a;
                for b in f.elements().step_by(3) {
                    assert_eq!(f.frobenius(f.add(a, b)), f.add(f.frobenius(a), f.frobenius(b)));
                }
            }
            assert!(nontrivial);
            assert_eq!(f.fixed_field().len(), q as usize);
        }
    }

    #[test]
    fn norm_fibres_and_minus_one() {
        for q in SUPPORTED_Q {
            let f = FieldTable::new(q).unwrap();
            let fixed = f.fixed_field();
            for &c in &fixed {
                let fibre = f.elements().filter(|&x| f.norm(x) == c).count();
                assert_eq!(fibre, if c.is_zero() { 1 } else { q as usize + 1 });
                assert!(f.is_fixed(f.add(c, c)));
                for &d in &fixed {
                    assert!(f.is_fixed(f.mul(c, d)));
                }
            }
            let minus_one = f.neg(FieldElem::ONE);
            assert!(f.elements().any(|z| f.norm(z) == minus_one));
            assert_eq!(f.norm(FieldElem::ZERO), FieldElem::ZERO);
            assert_eq!(f.norm(FieldElem::ONE), FieldElem::ONE);
        }
    }

    #[test]
    fn codes_round_trip() {
        let f = FieldTable::new(9).unwrap();
        for x in f.elements() {
            assert_eq!(f.from_code(f.code(x)), x);
        }
        assert_eq!(f.from_int(3), FieldElem::ZERO);
        assert_eq!(f.from_int(-1), f.neg(FieldElem::ONE));
    }
}
