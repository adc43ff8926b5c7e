//! Simplex results checked against exhaustive basis enumeration.

use convex_shape::lp::{solve, LinearProgram, LpOutcome};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Best objective over all basic feasible solutions of
/// `max c·x, Ax = b, x >= 0`, by trying every column subset of size `rows`.
/// Returns `None` when no basic solution is feasible.
fn brute_force(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Option<f64> {
    let (m, n) = (a.len(), c.len());
    let mut best: Option<f64> = None;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != m {
            continue;
        }
        let cols: Vec<usize> = (0..n).filter(|j| mask & (1 << j) != 0).collect();
        let Some(xb) = solve_square(a, &cols, b) else { continue };
        if xb.iter().any(|v| *v < -1e-9) {
            continue;
        }
        let val: f64 = cols.iter().zip(&xb).map(|(j, v)| c[*j] * v).sum();
        best = Some(best.map_or(val, |b: f64| b.max(val)));
    }
    best
}

fn solve_square(a: &[Vec<f64>], cols: &[usize], b: &[f64]) -> Option<Vec<f64>> {
    let m = a.len();
    let mut t: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let mut r: Vec<f64> = cols.iter().map(|j| a[i][*j]).collect();
            r.push(b[i]);
            r
        })
        .collect();
    for col in 0..m {
        let piv = (col..m).max_by(|&i, &j| t[i][col].abs().total_cmp(&t[j][col].abs()))?;
        if t[piv][col].abs() < 1e-9 {
            return None;
        }
        t.swap(col, piv);
        for r in 0..m {
            if r != col {
                let f = t[r][col] / t[col][col];
                for k in col..=m {
                    t[r][k] -= f * t[col][k];
                }
            }
        }
    }
    Some((0..m).map(|i| t[i][m] / t[i][i]).collect())
}

/// Random program with a known feasible point and a bounded objective
/// (the last row caps the sum of the variables).
fn random_program(rng: &mut ChaCha8Rng, m: usize, n: usize) -> (Vec<f64>, Vec<Vec<f64>>, Vec<f64>, Vec<f64>) {
    let x0: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..2.0)).collect();
    let mut a: Vec<Vec<f64>> = (0..m - 1)
        .map(|_| (0..n).map(|_| rng.random_range(-3.0..3.0)).collect())
        .collect();
    let mut capacity = vec![1.0; n];
    capacity.push(1.0);
    for row in a.iter_mut() {
        row.push(0.0);
    }
    a.push(capacity);
    let mut x0 = x0;
    x0.push(1.0); // slack of the capacity row
    let b: Vec<f64> = a.iter().map(|r| r.iter().zip(&x0).map(|(p, q)| p * q).sum()).collect();
    let mut c: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
    c.push(0.0);
    (c, a, b, x0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn optimum_matches_vertex_enumeration(seed in any::<u64>(), m in 2usize..4, n in 2usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (c, a, b, x0) = random_program(&mut rng, m, n);
        let prog = LinearProgram::nonnegative(c.clone(), a.clone(), b.clone()).unwrap();
        let LpOutcome::Optimal { value, point } = solve(&prog).unwrap() else {
            return Err(TestCaseError::fail("feasible bounded program not solved"));
        };
        prop_assert!(prog.max_violation(&point) < 1e-8);
        // Weak duality spot check with the known feasible point.
        let feasible: f64 = c.iter().zip(&x0).map(|(p, q)| p * q).sum();
        prop_assert!(feasible <= value + 1e-8);
        let best = brute_force(&c, &a, &b).expect("a feasible program has a vertex");
        prop_assert!((best - value).abs() < 1e-7 * (1.0 + best.abs()), "{best} vs {value}");
    }

    #[test]
    fn row_order_does_not_matter(seed in any::<u64>(), m in 2usize..5, n in 2usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (c, a, b, _) = random_program(&mut rng, m, n);
        let p1 = LinearProgram::nonnegative(c.clone(), a.clone(), b.clone()).unwrap();
        let mut order: Vec<usize> = (0..a.len()).collect();
        order.reverse();
        order.rotate_left(seed as usize % a.len());
        let a2: Vec<Vec<f64>> = order.iter().map(|&i| a[i].clone()).collect();
        let b2: Vec<f64> = order.iter().map(|&i| b[i]).collect();
        let p2 = LinearProgram::nonnegative(c, a2, b2).unwrap();
        let v1 = solve(&p1).unwrap().value().unwrap();
        let v2 = solve(&p2).unwrap().value().unwrap();
        prop_assert!((v1 - v2).abs() < 1e-8 * (1.0 + v1.abs()));
    }

    #[test]
    fn infeasible_when_rhs_out_of_reach(seed in any::<u64>(), n in 1usize..6) {
        // Σ x = -1 with x >= 0 has no solution, whatever else is asked.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let extra: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let prog = LinearProgram::nonnegative(vec![1.0; n], vec![vec![1.0; n], extra], vec![-1.0, 0.3]).unwrap();
        prop_assert_eq!(solve(&prog).unwrap(), LpOutcome::Infeasible);
    }
}
