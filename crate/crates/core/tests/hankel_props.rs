mod common;

use std::collections::BTreeSet;

use common::{field, random_rational, random_series};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vdck_core::algebra::Poly;
use vdck_core::hankel::{brute_inf, deficiency_scan, hankel_submatrix, regular_sizes, Exponent};
use vdck_core::laurent::{continued_fraction, convergents, LaurentSeries};

#[test]
fn regular_sizes_are_convergent_degrees() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..50 {
        let f = field([2u32, 3, 5][rng.gen_range(0..3)]);
        let (_, _, theta) = random_rational(&mut rng, f, 20, 64);
        let cf = continued_fraction(&theta, usize::MAX).unwrap();
        let degrees: BTreeSet<usize> = convergents(&cf)
            .iter()
            .map(|c| c.d)
            .filter(|&d| d <= 20)
            .collect();
        assert_eq!(regular_sizes(&theta, 20).unwrap(), degrees, "{theta:?}");
    }
}

#[test]
fn unit_quotient_series_is_regular_everywhere() {
    // all partial quotients X: denominators are the Fibonacci-like Q_h of
    // degree h, so every leading block is regular
    let f = field(3);
    let x = Poly::x(f);
    let (mut p0, mut q0) = (Poly::zero(f), Poly::one(f));
    let (mut p1, mut q1) = (Poly::one(f), x.clone());
    for _ in 1..16 {
        let p2 = &(&x * &p1) + &p0;
        let q2 = &(&x * &q1) + &q0;
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    let theta = LaurentSeries::from_rational(&p1, &q1, 64).unwrap();
    let sizes = regular_sizes(&theta, 12).unwrap();
    assert_eq!(sizes, (1..=12).collect());
}

#[test]
fn hankel_examples() {
    let f = field(3);
    let m = hankel_submatrix(&LaurentSeries::from_coeffs(f, 2, vec![1, 0, 0]), 2, 2).unwrap();
    assert_eq!((m.row(0), m.row(1)), (&[0, 1][..], &[1, 0][..]));
    let z = hankel_submatrix(&LaurentSeries::zero(f, 8), 3, 3).unwrap();
    assert_eq!(z.rank(), 0);
    assert!(hankel_submatrix(&LaurentSeries::zero(f, 4), 3, 3).is_err());
}

/// `-max deg A_h^{(r)}` over shifts and quotients reachable with
/// `deg Q = d_{h-1} <= deg_q_max`; `None` when a needed quotient is not
/// certified.
fn predicted_exponent(theta: &LaurentSeries, r_max: usize, deg_q_max: usize) -> Option<i64> {
    let mut worst = 0usize;
    for r in 0..=r_max {
        let cf = continued_fraction(&theta.shift(r).frac(), usize::MAX).ok()?;
        let mut prev = 0;
        let mut covered = false;
        for (h, q) in cf.quotients.iter().enumerate() {
            if prev > deg_q_max {
                covered = true;
                break;
            }
            worst = worst.max(q.degree);
            prev = cf.degrees[h];
        }
        if !covered && prev <= deg_q_max {
            return None;
        }
    }
    Some(-(worst as i64))
}

#[test]
fn brute_force_infimum_matches_quotient_degrees() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut compared = 0;
    for _ in 0..30 {
        let p = [2u32, 3][rng.gen_range(0..2)];
        let theta = random_series(&mut rng, field(p), 96);
        let (r_max, dq) = (6, if p == 2 { 8 } else { 5 });
        let Some(expected) = predicted_exponent(&theta, r_max, dq) else {
            continue;
        };
        let found = brute_inf(&theta, r_max, dq).unwrap();
        assert_eq!(found.exponent, Exponent::Finite(expected));
        let report = deficiency_scan(&theta, r_max, usize::MAX).unwrap();
        assert!(found.exponent >= Exponent::Finite(-(report.d_hat as i64) - 1));
        compared += 1;
    }
    assert!(compared >= 25);
}

#[test]
fn enlarging_the_search_never_raises_the_minimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..10 {
        let theta = random_series(&mut rng, field(3), 64);
        let mut last = None;
        for (r, d) in [(0, 0), (2, 1), (2, 3), (5, 3), (8, 5)] {
            let e = brute_inf(&theta, r, d).unwrap().exponent;
            if let Some(prev) = last {
                assert!(e <= prev);
            }
            last = Some(e);
        }
    }
}

#[test]
fn rational_series_collapse_in_scans() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..10 {
        let (_, _, theta) = random_rational(&mut rng, field(5), 6, 200);
        let report = deficiency_scan(&theta, 20, usize::MAX).unwrap();
        assert!(report.collapse.is_some());
        assert_eq!(
            brute_inf(&theta, 2, 6).unwrap().exponent,
            Exponent::NegInfinity
        );
    }
}
