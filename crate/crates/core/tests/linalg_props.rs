use convex_shape::linalg::{complement, dot, norm, orthonormalize, project, Subspace};
use proptest::prelude::*;

fn vector(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0..10.0f64, n)
}

/// A random subspace of `R^n` and a point, from up to `n` spanning vectors.
fn subspace_and_point() -> impl Strategy<Value = (Subspace, Vec<f64>)> {
    (1usize..7).prop_flat_map(|n| {
        (prop::collection::vec(vector(n), 0..=n), vector(n))
            .prop_map(move |(gens, x)| (orthonormalize(&gens, n).unwrap(), x))
    })
}

proptest! {
    #[test]
    fn basis_is_orthonormal((s, _x) in subspace_and_point()) {
        for (i, a) in s.basis().iter().enumerate() {
            for (j, b) in s.basis().iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((dot(a, b) - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn projection_is_idempotent((s, x) in subspace_and_point()) {
        let p = project(&s, &x).unwrap();
        let pp = project(&s, &p).unwrap();
        for (a, b) in p.iter().zip(&pp) {
            prop_assert!((a - b).abs() < 1e-10 * (1.0 + norm(&x)));
        }
    }

    #[test]
    fn pythagoras((s, x) in subspace_and_point()) {
        let c = complement(&s);
        prop_assert_eq!(s.dim() + c.dim(), s.ambient_dim());
        let p = norm(&project(&s, &x).unwrap());
        let q = norm(&project(&c, &x).unwrap());
        let xx = dot(&x, &x);
        prop_assert!((xx - p * p - q * q).abs() < 1e-9 * (1.0 + xx));
    }

    #[test]
    fn double_complement((s, _x) in subspace_and_point()) {
        let cc = complement(&complement(&s));
        prop_assert!(cc.same_span(&s, 1e-9));
    }

    #[test]
    fn span_contains_generators(n in 1usize..6, k in 0usize..6, seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let gens: Vec<Vec<f64>> = (0..k)
            .map(|_| (0..n).map(|_| rng.random_range(-5.0..5.0)).collect())
            .collect();
        let s = orthonormalize(&gens, n).unwrap();
        prop_assert!(s.dim() <= k.min(n));
        for g in &gens {
            prop_assert!(s.contains(g, 1e-9 * (1.0 + norm(g))).unwrap());
        }
    }
}
