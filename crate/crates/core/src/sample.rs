//! Random vectors and instances. All sampling goes through a caller-supplied
//! generator so results are reproducible from a seed.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{norm, scale};
use crate::maxaffine::MaxAffine;
use crate::polytope::VPolytope;

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Uniform on the unit sphere of `R^n` (`n >= 1`).
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    assert!(n > 0, "unit vectors need n >= 1");
    loop {
        let g = gaussian_vector(rng, n);
        let r = norm(&g);
        if r > 1e-6 {
            return scale(&g, 1.0 / r);
        }
    }
}

pub fn uniform_vector<R: Rng + ?Sized>(rng: &mut R, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

/// Uniform point of the open unit simplex with `m` weights.
pub fn simplex_weights<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..m)
        .map(|_| -(1.0 - rng.random::<f64>()).ln())
        .collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

/// Max-affine model with `m` pieces, slopes uniform in `[-2, 2]^n` and
/// offsets uniform in `[-3, 3]`.
pub fn random_max_affine<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize) -> MaxAffine {
    let slopes = (0..m).map(|_| uniform_vector(rng, n, -2.0, 2.0)).collect();
    let offsets = uniform_vector(rng, m, -3.0, 3.0);
    MaxAffine::with_dim(n, slopes, offsets).expect("m >= 1")
}

/// Max-affine model whose slopes all lie in the span of `k` random
/// directions shifted by a common vector `shift`, so its lineality space
/// has dimension at least `n - k`.
pub fn random_flat_max_affine<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    m: usize,
    k: usize,
    shift: &[f64],
) -> MaxAffine {
    let dirs: Vec<Vec<f64>> = (0..k).map(|_| gaussian_vector(rng, n)).collect();
    let slopes = (0..m)
        .map(|_| {
            let mut a = shift.to_vec();
            for d in &dirs {
                let c: f64 = rng.random_range(-1.5..1.5);
                for (ai, di) in a.iter_mut().zip(d) {
                    *ai += c * di;
                }
            }
            a
        })
        .collect();
    let offsets = uniform_vector(rng, m, -3.0, 3.0);
    MaxAffine::with_dim(n, slopes, offsets).expect("m >= 1")
}

pub fn random_polytope<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    m: usize,
    lo: f64,
    hi: f64,
) -> VPolytope {
    VPolytope::new((0..m).map(|_| uniform_vector(rng, n, lo, hi)).collect()).expect("m >= 1")
}
