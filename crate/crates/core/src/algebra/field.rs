use std::fmt;

use crate::error::{Error, Result};

/// Largest supported modulus.
pub const MAX_MODULUS: u32 = 1 << 16;

const SMALL_TABLE_LIMIT: u32 = 256;

/// The prime field F_p.
///
/// Elements are plain `u32` values in `[0, p)`; the field object carries the
/// modulus and performs every operation. It is `Copy`, so values such as
/// [`Poly`](super::Poly) simply embed the field they live in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self> {
        if !(2..=MAX_MODULUS).contains(&p) || !is_prime(p) {
            return Err(Error::InvalidModulus(p as u64));
        }
        Ok(PrimeField { p })
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn reduce(&self, x: u64) -> u32 {
        (x % self.p as u64) as u32
    }

    /// Maps a signed integer to its residue class.
    pub fn from_i64(&self, x: i64) -> u32 {
        x.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(&self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1 % self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: u32) -> Option<u32> {
        if a.is_multiple_of(self.p) {
            None
        } else {
            Some(self.pow(a, (self.p - 2) as u64))
        }
    }

    /// `dst[i] -= c * src[i]` over the common length.
    pub fn sub_scaled(&self, dst: &mut [u32], c: u32, src: &[u32]) {
        let p = self.p;
        if c == 0 {
            return;
        }
        if p <= SMALL_TABLE_LIMIT {
            // negated multiples of c, so the inner loop is a table lookup and
            // one conditional subtraction
            let mut table = [0u32; SMALL_TABLE_LIMIT as usize];
            for (b, t) in table.iter_mut().enumerate().take(p as usize) {
                *t = self.neg(self.mul(c, b as u32));
            }
            for (d, &s) in dst.iter_mut().zip(src) {
                let v = *d + table[s as usize];
                *d = if v >= p { v - p } else { v };
            }
        } else {
            let neg = (p - c) as u64;
            for (d, &s) in dst.iter_mut().zip(src) {
                *d = ((*d as u64 + neg * s as u64) % p as u64) as u32;
            }
        }
    }

    /// Little-endian base-p digits of `n`, padded or truncated to `len`.
    pub fn digits(&self, mut n: u128, len: usize) -> Vec<u32> {
        let p = self.p as u128;
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            out.push((n % p) as u32);
            n /= p;
        }
        out
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.p)
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composites_and_out_of_range() {
        assert!(PrimeField::new(4).is_err());
        assert!(PrimeField::new(1).is_err());
        assert!(PrimeField::new(0).is_err());
        assert!(PrimeField::new(65537).is_err());
        assert!(PrimeField::new(2).is_ok());
        assert!(PrimeField::new(65521).is_ok());
    }

    #[test]
    fn inverses_mod_small_primes() {
        for p in [2u32, 3, 5, 7, 65521] {
            let f = PrimeField::new(p).unwrap();
            assert_eq!(f.inv(0), None);
            for a in 1..p.min(200) {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
        }
    }

    #[test]
    fn sub_scaled_matches_scalar_ops() {
        for p in [2u32, 3, 251, 257, 65521] {
            let f = PrimeField::new(p).unwrap();
            let src: Vec<u32> = (0..50).map(|i| (i * 7919) % p).collect();
            let dst0: Vec<u32> = (0..50).map(|i| (i * 104729 + 3) % p).collect();
            for c in [0, 1, p - 1, p / 2] {
                let mut dst = dst0.clone();
                f.sub_scaled(&mut dst, c, &src);
                for i in 0..50 {
                    assert_eq!(dst[i], f.sub(dst0[i], f.mul(c, src[i])));
                }
            }
        }
    }

    #[test]
    fn digits_are_little_endian() {
        let f = PrimeField::new(3).unwrap();
        assert_eq!(f.digits(5, 3), vec![2, 1, 0]);
        assert_eq!(f.from_i64(-1), 2);
    }
}
