use linresp::fd::richardson_first;
use linresp::fixed_point::{
    continuity_scan, implicit_derivative, neumann_sum, solve_fixed_point, solve_resolvent,
    spectral_norm_estimate, sup_norm, ClosureMap, ParametrizedMap, SolveOptions,
};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

const DIM: usize = 6;

fn scaled_matrix(entries: Vec<f64>, rows: usize, cols: usize, norm: f64) -> DMatrix<f64> {
    let m = DMatrix::from_vec(rows, cols, entries);
    let s = m.norm();
    if s == 0.0 {
        m
    } else {
        m * (norm / s)
    }
}

/// `F(u, φ) = Aφ + 0.1 sin φ + B u`, a contraction for `‖A‖ ≤ 0.5`.
fn nonlinear_map(a: DMatrix<f64>, b: DMatrix<f64>) -> ClosureMap {
    let (a1, b1) = (a.clone(), b.clone());
    let a2 = a.clone();
    ClosureMap::new(DIM, 2, move |u, phi| {
        let p = DVector::from_column_slice(phi);
        let u = DVector::from_column_slice(u);
        let out = &a1 * &p + p.map(|v| 0.1 * v.sin()) + &b1 * u;
        Ok(out.as_slice().to_vec())
    })
    .with_p(move |_, _| b.clone())
    .with_q(move |_, phi| {
        let mut q = a2.clone();
        for (i, v) in phi.iter().enumerate() {
            q[(i, i)] += 0.1 * v.cos();
        }
        q
    })
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, rows * cols)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn solver_is_idempotent(a in matrix(DIM, DIM), b in matrix(DIM, 2), u in prop::array::uniform2(-1.0..1.0f64)) {
        let map = nonlinear_map(scaled_matrix(a, DIM, DIM, 0.5), scaled_matrix(b, DIM, 2, 1.0));
        let first = solve_fixed_point(&map, &u, &[0.0; DIM], 1e-14, 10_000).unwrap();
        let again = solve_fixed_point(&map, &u, &first.phi_star, 1e-14, 10_000).unwrap();
        prop_assert!(again.iterations <= 1);
        for (x, y) in first.phi_star.iter().zip(&again.phi_star) {
            prop_assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn implicit_derivative_matches_fd(a in matrix(DIM, DIM), b in matrix(DIM, 2), u in prop::array::uniform2(-1.0..1.0f64), h in prop::array::uniform2(-1.0..1.0f64)) {
        let map = nonlinear_map(scaled_matrix(a, DIM, DIM, 0.5), scaled_matrix(b, DIM, 2, 1.0));
        let phi0 = solve_fixed_point(&map, &u, &[0.0; DIM], 1e-15, 10_000).unwrap().phi_star;
        let z = implicit_derivative(&map.p_operator(&u, &phi0).unwrap(), &map.q_operator(&u, &phi0).unwrap(), &h).unwrap();
        let solve_at = |s: f64| {
            let us: Vec<f64> = u.iter().zip(&h).map(|(a, b)| a + s * b).collect();
            Ok(solve_fixed_point(&map, &us, &phi0, 1e-15, 10_000)?.phi_star)
        };
        for step in [1e-3, 1e-4] {
            let fd = richardson_first(solve_at, step).unwrap();
            let diff: Vec<f64> = z.iter().zip(&fd).map(|(a, b)| a - b).collect();
            prop_assert!(sup_norm(&diff) <= 1e-6, "step {step}: {}", sup_norm(&diff));
        }
    }

    #[test]
    fn neumann_agrees_with_direct_solve(q in matrix(DIM, DIM), b in prop::collection::vec(-1.0..1.0f64, DIM), scale in 0.05..0.85f64) {
        let q = scaled_matrix(q, DIM, DIM, scale);
        prop_assert!(spectral_norm_estimate(&q) < 0.9);
        let direct = solve_resolvent(&q, &b).unwrap();
        let bv = DVector::from_column_slice(&b);
        let series = neumann_sum(&q, &bv, 200);
        let z = DVector::from_column_slice(&direct.z);
        prop_assert!((&series - &z).norm() <= 1e-8 * z.norm().max(1e-300));
    }

    #[test]
    fn continuity_scan_vanishes_at_zero_step(a in matrix(DIM, DIM), b in matrix(DIM, 2)) {
        let map = nonlinear_map(scaled_matrix(a, DIM, DIM, 0.5), scaled_matrix(b, DIM, 2, 1.0));
        let rows = continuity_scan(&map, &[0.3, -0.2], &[0.0; DIM], &[vec![1.0, 0.0], vec![0.5, 0.5]], &[0.0], &sup_norm, SolveOptions::default()).unwrap();
        prop_assert!(rows.iter().all(|r| r.distance == 0.0));
    }
}
