use convex_shape::infconv::{phi_c, project_onto, support_function};
use convex_shape::linalg::{add, distance, dot, scale, sub};
use convex_shape::sample::{gaussian_vector, random_polytope, simplex_weights};
use convex_shape::VPolytope;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn polytope(rng: &mut ChaCha8Rng) -> VPolytope {
    let n = rng.random_range(1..4);
    let m = rng.random_range(1..7);
    random_polytope(rng, n, m, -2.0, 2.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn projection_satisfies_variational_inequality(seed in any::<u64>(), spread in 0.1..100.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = polytope(&mut rng);
        let x = scale(&gaussian_vector(&mut rng, c.dim()), spread);
        let r = project_onto(&c, &x).unwrap();
        prop_assert!((r.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(r.weights.iter().all(|w| *w >= 0.0));
        let mut combo = vec![0.0; c.dim()];
        for (p, w) in c.points().iter().zip(&r.weights) {
            combo = add(&combo, &scale(p, *w));
        }
        prop_assert!(distance(&combo, &r.nearest) < 1e-8);
        let w = sub(&x, &r.nearest);
        for p in c.points() {
            prop_assert!(dot(&w, &sub(p, &r.nearest)) <= 1e-7 * (1.0 + spread));
        }
        // No sampled point of C is closer.
        for _ in 0..50 {
            let l = simplex_weights(&mut rng, c.len());
            let mut y = vec![0.0; c.dim()];
            for (p, li) in c.points().iter().zip(&l) {
                y = add(&y, &scale(p, *li));
            }
            prop_assert!(r.distance <= distance(&x, &y) + 1e-9);
        }
    }

    #[test]
    fn phi_is_dominated_by_half_square(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = polytope(&mut rng);
        let x = scale(&gaussian_vector(&mut rng, c.dim()), 5.0);
        prop_assert!(phi_c(&c, &x).unwrap() <= 0.5 * dot(&x, &x) + 1e-9);
        prop_assert!(phi_c(&c, &x).unwrap() <= support_function(&c, &x).unwrap() + 1e-9);
    }
}

#[test]
fn phi_is_midpoint_convex() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let c = polytope(&mut rng);
        let a = scale(&gaussian_vector(&mut rng, c.dim()), 4.0);
        let b = scale(&gaussian_vector(&mut rng, c.dim()), 4.0);
        let mid = scale(&add(&a, &b), 0.5);
        let v = phi_c(&c, &mid).unwrap() - 0.5 * (phi_c(&c, &a).unwrap() + phi_c(&c, &b).unwrap());
        worst = worst.max(v);
    }
    assert!(worst < 1e-8, "worst midpoint violation {worst}");
}

/// `sup_x <x, y> - φ_C(x)` over a grid: about `½‖y‖²` for `y ∈ C`, growing
/// with the grid radius for `y ∉ C`.
#[test]
fn conjugate_is_finite_exactly_on_c() {
    let grid_sup = |c: &VPolytope, y: &[f64], radius: f64| -> f64 {
        let steps = 200;
        let mut best = f64::NEG_INFINITY;
        let n = c.dim();
        let axis: Vec<f64> = (0..=steps)
            .map(|k| -radius + 2.0 * radius * k as f64 / steps as f64)
            .collect();
        let points: Vec<Vec<f64>> = if n == 1 {
            axis.iter().map(|a| vec![*a]).collect()
        } else {
            axis.iter().flat_map(|a| axis.iter().map(move |b| vec![*a, *b])).collect()
        };
        for x in points {
            best = best.max(dot(&x, y) - phi_c(c, &x).unwrap());
        }
        best
    };

    let interval = VPolytope::new(vec![vec![-1.0], vec![2.0]]).unwrap();
    for y in [-0.5, 0.0, 1.5] {
        let v = grid_sup(&interval, &[y], 10.0);
        assert!((v - 0.5 * y * y).abs() < 1e-3, "y = {y}: {v}");
    }
    let small = grid_sup(&interval, &[3.0], 10.0);
    let large = grid_sup(&interval, &[3.0], 40.0);
    assert!(large > small + 5.0);

    let triangle = VPolytope::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
    let inside = [0.25, 0.25];
    let v = grid_sup(&triangle, &inside, 4.0);
    assert!((v - 0.5 * dot(&inside, &inside)).abs() < 1e-2, "{v}");
    let outside = [1.0, 1.0];
    assert!(grid_sup(&triangle, &outside, 16.0) > grid_sup(&triangle, &outside, 4.0) + 1.0);
}
