//! Table-driven arithmetic in GF(q) for prime powers `q <= 256`.
//!
//! Elements are integers in `[0, q)`: the base-p digits of an element are the
//! coefficients of its polynomial representative modulo a fixed monic
//! irreducible polynomial of degree m, found by brute force.

use crate::error::{Error, Result};

pub type Symbol = u32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaloisField {
    q: usize,
    p: usize,
    m: usize,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

/// Returns `(p, m)` with `q = p^m`, or `None` when q is not a prime power.
pub fn prime_power(q: usize) -> Option<(usize, usize)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let (mut rest, mut m) = (q, 0);
    while rest % p == 0 {
        rest /= p;
        m += 1;
    }
    (rest == 1).then_some((p, m))
}

fn digits(mut x: usize, p: usize, m: usize) -> Vec<usize> {
    (0..m)
        .map(|_| {
            let d = x % p;
            x /= p;
            d
        })
        .collect()
}

fn undigits(ds: &[usize], p: usize) -> usize {
    ds.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Remainder of `a` modulo the monic polynomial `modulus` (coefficients low to high).
fn poly_rem(mut a: Vec<usize>, modulus: &[usize], p: usize) -> Vec<usize> {
    let deg = modulus.len() - 1;
    while a.len() > deg {
        let lead = a.pop().unwrap();
        if lead != 0 {
            let shift = a.len() - deg;
            for (i, &c) in modulus[..deg].iter().enumerate() {
                a[shift + i] = (a[shift + i] + p - (lead * c) % p) % p;
            }
        }
    }
    a.resize(deg, 0);
    a
}

fn has_divisor(poly: &[usize], p: usize) -> bool {
    let deg = poly.len() - 1;
    for d in 1..=deg / 2 {
        // all monic polynomials of degree d
        for low in 0..p.pow(d as u32) {
            let mut div = digits(low, p, d);
            div.push(1);
            if poly_rem(poly.to_vec(), &div, p).iter().all(|&c| c == 0) {
                return true;
            }
        }
    }
    false
}

fn find_irreducible(p: usize, m: usize) -> Vec<usize> {
    for low in 0..p.pow(m as u32) {
        let mut poly = digits(low, p, m);
        poly.push(1);
        if poly[0] != 0 && !has_divisor(&poly, p) {
            return poly;
        }
    }
    unreachable!("an irreducible polynomial of every degree exists over a prime field")
}

impl GaloisField {
    pub fn new(q: usize) -> Result<Self> {
        let (p, m) = prime_power(q).ok_or_else(|| Error::param(format!("{q} is not a prime power")))?;
        if q > 256 {
            return Err(Error::param(format!("field size {q} exceeds 256")));
        }
        let modulus = if m == 1 { vec![0, 1] } else { find_irreducible(p, m) };
        let mut add = vec![0u8; q * q];
        let mut mul = vec![0u8; q * q];
        for a in 0..q {
            let da = digits(a, p, m);
            for b in 0..q {
                let db = digits(b, p, m);
                let sum: Vec<usize> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a * q + b] = undigits(&sum, p) as u8;
                let mut prod = vec![0usize; 2 * m - 1];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                let r = if m == 1 { vec![prod[0] % p] } else { poly_rem(prod, &modulus, p) };
                mul[a * q + b] = undigits(&r, p) as u8;
            }
        }
        let neg = (0..q).map(|a| (0..q).find(|&b| add[a * q + b] == 0).unwrap() as u8).collect();
        let inv =
            (0..q).map(|a| if a == 0 { 0 } else { (1..q).find(|&b| mul[a * q + b] == 1).unwrap() as u8 }).collect();
        Ok(GaloisField { q, p, m, add, mul, neg, inv })
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn characteristic(&self) -> usize {
        self.p
    }

    pub fn extension_degree(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn add(&self, a: Symbol, b: Symbol) -> Symbol {
        self.add[a as usize * self.q + b as usize] as Symbol
    }

    #[inline]
    pub fn sub(&self, a: Symbol, b: Symbol) -> Symbol {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Symbol, b: Symbol) -> Symbol {
        self.mul[a as usize * self.q + b as usize] as Symbol
    }

    #[inline]
    pub fn neg(&self, a: Symbol) -> Symbol {
        self.neg[a as usize] as Symbol
    }

    /// Multiplicative inverse; `a` must be nonzero.
    #[inline]
    pub fn inv(&self, a: Symbol) -> Symbol {
        debug_assert!(a != 0, "zero has no inverse");
        self.inv[a as usize] as Symbol
    }

    pub fn contains(&self, a: Symbol) -> bool {
        (a as usize) < self.q
    }
}
