mod common;

use common::{field, polys_below, random_rational};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vdck_core::algebra::{Degree, Poly};
use vdck_core::laurent::{
    continued_fraction, convergents, paperfolding, paperfolding_theta, LaurentSeries,
};

const K: i64 = 64;

fn frac_degree(theta: &LaurentSeries, k: &Poly) -> Degree {
    theta.mul_poly_shift(k, 0).unwrap().frac().degree()
}

#[test]
fn convergents_are_best_approximations() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut checked = 0;
    for _ in 0..100 {
        let p = [2u32, 3, 5][rng.gen_range(0..3)];
        let f = field(p);
        let (_, _, theta) = random_rational(&mut rng, f, 12, K);
        let cf = continued_fraction(&theta, usize::MAX).unwrap();
        let convs = convergents(&cf);
        for h in 0..convs.len().saturating_sub(1) {
            let (dh, dnext) = (convs[h].d, convs[h + 1].d);
            let bound = Degree::Finite(-(dnext as i64));
            assert_eq!(frac_degree(&theta, &convs[h].q), bound);
            // every k with d_h <= deg k < d_{h+1}
            let exhaustive = (p as u64).pow(dnext as u32) <= 30_000;
            let ks: Vec<Poly> = if exhaustive {
                polys_below(f, dnext)
                    .filter(|k| k.deg().is_some_and(|d| d >= dh))
                    .collect()
            } else {
                (0..300)
                    .map(|_| {
                        let d = rng.gen_range(dh.max(1)..dnext);
                        let mut c: Vec<u32> = (0..d).map(|_| rng.gen_range(0..p)).collect();
                        c.push(rng.gen_range(1..p));
                        Poly::new(f, c)
                    })
                    .collect()
            };
            for k in &ks {
                assert!(
                    frac_degree(&theta, k) >= bound,
                    "k = {k}, theta = {theta:?}"
                );
            }
            checked += ks.len();
        }
    }
    assert!(checked > 1000);
}

#[test]
fn approximation_identity_holds() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let f = field([2u32, 3, 5][rng.gen_range(0..3)]);
        let (_, _, theta) = random_rational(&mut rng, f, 12, K);
        let cf = continued_fraction(&theta, usize::MAX).unwrap();
        let convs = convergents(&cf);
        for h in 0..convs.len().saturating_sub(1) {
            let approx = LaurentSeries::from_rational(&convs[h].p, &convs[h].q, K).unwrap();
            let diff = theta.sub(&approx);
            let expected = -((convs[h].d + convs[h + 1].d) as i64);
            assert_eq!(diff.degree(), Degree::Finite(expected));
        }
    }
}

#[test]
fn rational_expansion_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let f = field([2u32, 3, 5, 7][rng.gen_range(0..4)]);
        let (num, den, theta) = random_rational(&mut rng, f, 12, K);
        let cf = continued_fraction(&theta, usize::MAX).unwrap();
        let tail = cf
            .next_degree_at_least()
            .expect("expansion stops on precision");
        assert!(2 * tail > K as usize, "a rational must look rational");
        let last = convergents(&cf).pop().unwrap();
        let g = num.gcd(&den);
        let (q_red, _) = den.divmod(&g).unwrap();
        let (p_red, _) = num.divmod(&g).unwrap();
        let c = last.q.leading();
        let inv = f.inv(c).unwrap();
        assert_eq!(last.q.scale(inv), q_red);
        assert_eq!(last.p.scale(inv), p_red);
    }
}

#[test]
fn spec_examples() {
    let f3 = field(3);
    let geo =
        LaurentSeries::from_rational(&Poly::one(f3), &Poly::from_signed(f3, &[-1, 1]), 10).unwrap();
    let cf = continued_fraction(&geo, 10).unwrap();
    assert!(cf.a0.is_zero());
    assert_eq!(cf.quotients.len(), 1);
    assert_eq!(cf.quotients[0].poly, Poly::from_signed(f3, &[2, 1]));
    assert!(cf.quotients[0].exact);

    let f2 = field(2);
    let theta = LaurentSeries::from_coeffs(f2, -1, vec![1, 1, 1]);
    let cf = continued_fraction(&theta, 10).unwrap();
    assert_eq!(cf.a0, Poly::new(f2, vec![1, 1]));
    assert_eq!(cf.quotients[0].poly, Poly::x(f2));

    let pf = paperfolding_theta(64);
    let cf = continued_fraction(&pf, usize::MAX).unwrap();
    assert!(cf.max_degree().unwrap() <= 4);
    let convs = convergents(&cf);
    for h in 1..5 {
        assert_eq!(convs[h].d - convs[h - 1].d, cf.quotients[h].degree);
    }
}

#[test]
fn paperfolding_is_self_similar() {
    let f: Vec<u32> = (1..=8).map(paperfolding).collect();
    assert_eq!(f, vec![0, 0, 1, 0, 0, 1, 1, 0]);
    assert_eq!(paperfolding(12), 1);
    assert_eq!(paperfolding(20), 0);
    for n in 1..=10_000u64 {
        assert_eq!(paperfolding(2 * n), paperfolding(n));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn text_format_round_trips(p in prop::sample::select(vec![2u32, 3, 5, 7]), start in -3i64..5,
                               coeffs in prop::collection::vec(0u32..7, 1..40)) {
        let f = field(p);
        let theta = LaurentSeries::from_coeffs(f, start, coeffs);
        let back = LaurentSeries::parse(&theta.to_text()).unwrap();
        prop_assert_eq!(back, theta);
    }

    #[test]
    fn degrees_are_strictly_increasing(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = field([2u32, 3, 5][rng.gen_range(0..3)]);
        let theta = common::random_series(&mut rng, f, 80);
        let cf = continued_fraction(&theta, usize::MAX).unwrap();
        prop_assert!(cf.degrees.windows(2).all(|w| w[0] < w[1]));
        for (h, q) in cf.quotients.iter().enumerate() {
            prop_assert!(q.degree >= 1);
            let prev = if h == 0 { 0 } else { cf.degrees[h - 1] };
            prop_assert!(prev + cf.degrees[h] <= 80);
        }
    }
}
