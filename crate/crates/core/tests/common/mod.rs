#![allow(dead_code)]

use rand::Rng;
use vdck_core::algebra::{Poly, PrimeField};
use vdck_core::laurent::LaurentSeries;

pub fn field(p: u32) -> PrimeField {
    PrimeField::new(p).unwrap()
}

/// Monic denominator of degree `1..=max_deg` and a numerator of lower degree.
pub fn random_fraction<R: Rng>(rng: &mut R, f: PrimeField, max_deg: usize) -> (Poly, Poly) {
    let dq = rng.gen_range(1..=max_deg);
    let mut q: Vec<u32> = (0..dq).map(|_| rng.gen_range(0..f.p())).collect();
    q.push(1);
    let num = loop {
        let c: Vec<u32> = (0..dq).map(|_| rng.gen_range(0..f.p())).collect();
        let poly = Poly::new(f, c);
        if !poly.is_zero() {
            break poly;
        }
    };
    (num, Poly::new(f, q))
}

pub fn random_rational<R: Rng>(
    rng: &mut R,
    f: PrimeField,
    max_deg: usize,
    horizon: i64,
) -> (Poly, Poly, LaurentSeries) {
    let (num, den) = random_fraction(rng, f, max_deg);
    let theta = LaurentSeries::from_rational(&num, &den, horizon).unwrap();
    (num, den, theta)
}

/// Series with independent uniform coefficients `a_1..a_K`, `a_1 != 0`.
pub fn random_series<R: Rng>(rng: &mut R, f: PrimeField, horizon: usize) -> LaurentSeries {
    let mut c: Vec<u32> = (0..horizon).map(|_| rng.gen_range(0..f.p())).collect();
    c[0] = rng.gen_range(1..f.p());
    LaurentSeries::from_coeffs(f, 1, c)
}

/// Every polynomial of degree below `d`, by base-`p` code.
pub fn polys_below(f: PrimeField, d: usize) -> impl Iterator<Item = Poly> {
    let total = (f.p() as u128).pow(d as u32);
    (0..total).map(move |code| Poly::new(f, f.digits(code, d)))
}
