use convex_shape::linalg::{add, dot, scale};
use convex_shape::sample::{gaussian_vector, random_max_affine, simplex_weights, unit_vector};
use convex_shape::MaxAffine;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn instance(seed: u64, n: usize, m: usize) -> (MaxAffine, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = random_max_affine(&mut rng, n, m);
    (f, rng)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn recession_inequality(seed in any::<u64>(), n in 1usize..6, m in 1usize..9) {
        let (f, mut rng) = instance(seed, n, m);
        let g = f.recession();
        let x = scale(&gaussian_vector(&mut rng, n), 5.0);
        let u = scale(&gaussian_vector(&mut rng, n), 5.0);
        let lhs = f.eval(&add(&x, &u)).unwrap();
        prop_assert!(lhs <= f.eval(&x).unwrap() + g.eval(&u).unwrap() + 1e-9);
    }

    #[test]
    fn recession_is_sublinear(seed in any::<u64>(), n in 1usize..6, m in 1usize..9, t in 0.0..100.0f64) {
        let (f, mut rng) = instance(seed, n, m);
        let g = f.recession();
        let u = gaussian_vector(&mut rng, n);
        let w = gaussian_vector(&mut rng, n);
        let guw = g.eval(&add(&u, &w)).unwrap();
        prop_assert!(guw <= g.eval(&u).unwrap() + g.eval(&w).unwrap() + 1e-9);
        let gu = g.eval(&u).unwrap();
        prop_assert!((g.eval(&scale(&u, t)).unwrap() - t * gu).abs() <= 1e-12 * (1.0 + t * gu.abs()));
    }

    #[test]
    fn difference_quotient_is_monotone(seed in any::<u64>(), n in 1usize..6, m in 1usize..9) {
        let (f, mut rng) = instance(seed, n, m);
        let x0 = gaussian_vector(&mut rng, n);
        let u = unit_vector(&mut rng, n);
        let f0 = f.eval(&x0).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for k in 0..=20 {
            let t = f64::powi(2.0, k);
            let q = (f.eval(&add(&x0, &scale(&u, t))).unwrap() - f0) / t;
            prop_assert!(q >= prev - 1e-10);
            prev = q;
        }
        // At t = 1e6 the quotient sits below f_∞(u) by at most the gap
        // f(x0) - l_i(x0) of a piece i attaining f_∞(u), divided by t.
        let t = 1e6;
        let q = (f.eval(&add(&x0, &scale(&u, t))).unwrap() - f0) / t;
        let exact = f.recession().eval(&u).unwrap();
        let gap = f
            .slopes()
            .iter()
            .zip(f.offsets())
            .filter(|(a, _)| dot(a, &u) >= exact - 1e-12)
            .map(|(a, b)| f0 - dot(a, &x0) - b)
            .fold(f64::INFINITY, f64::min);
        prop_assert!(q <= exact + 1e-9);
        prop_assert!(exact - q <= gap / t + 1e-9);
    }

    #[test]
    fn conjugate_domain_is_slope_hull(seed in any::<u64>(), n in 1usize..5, m in 1usize..8) {
        let (f, mut rng) = instance(seed, n, m);
        // Inside: a convex combination of the slopes.
        let w = simplex_weights(&mut rng, m);
        let mut inside = vec![0.0; n];
        for (a, l) in f.slopes().iter().zip(&w) {
            inside = add(&inside, &scale(a, *l));
        }
        prop_assert!(f.conjugate_value(&inside).unwrap().is_finite());
        // Outside: push past the supporting hyperplane in direction d.
        let d = unit_vector(&mut rng, n);
        let top = f
            .slopes()
            .iter()
            .max_by(|a, b| dot(a, &d).total_cmp(&dot(b, &d)))
            .unwrap();
        let outside = add(top, &scale(&d, 1e-3));
        prop_assert_eq!(f.conjugate_value(&outside).unwrap(), f64::INFINITY);
    }

    #[test]
    fn fenchel_young_and_equality(seed in any::<u64>(), n in 1usize..5, m in 1usize..8) {
        let (f, mut rng) = instance(seed, n, m);
        let x = scale(&gaussian_vector(&mut rng, n), 3.0);
        let fx = f.eval(&x).unwrap();
        for y in f.subdifferential(&x).unwrap().points() {
            let gap = fx + f.conjugate_value(y).unwrap() - dot(&x, y);
            prop_assert!(gap.abs() < 1e-8 * (1.0 + fx.abs()), "gap {gap}");
        }
        let w = simplex_weights(&mut rng, m);
        let mut y = vec![0.0; n];
        for (a, l) in f.slopes().iter().zip(&w) {
            y = add(&y, &scale(a, *l));
        }
        let fy = f.conjugate_value(&y).unwrap();
        for _ in 0..10 {
            let z = scale(&gaussian_vector(&mut rng, n), 4.0);
            prop_assert!(f.eval(&z).unwrap() + fy >= dot(&z, &y) - 1e-9);
        }
    }

    #[test]
    fn pieces_can_be_reordered(seed in any::<u64>(), n in 1usize..5, m in 1usize..8) {
        let (f, mut rng) = instance(seed, n, m);
        let order: Vec<usize> = (0..m).rev().collect();
        let g = f.permuted(&order).unwrap();
        let x = gaussian_vector(&mut rng, n);
        prop_assert_eq!(f.eval(&x).unwrap(), g.eval(&x).unwrap());
    }
}
