use nalgebra::{DVector, Vector2};
use phiface::discretization::{adjoint_residual, build_grid, skew_residual, SbpOperator, StateVector};
use phiface::model::{CoefficientProfile, DomainSpec, MaterialPair};
use phiface::ports::{boundary_ports, constraint_projector, BoundarySpec, ProjectionNorm};
use phiface::stability::{norm_ratio, omega_bound};
use proptest::prelude::*;

fn unit() -> impl Strategy<Value = f64> {
    -1.0..1.0f64
}

fn poly(c: Vec<f64>) -> CoefficientProfile<f64> {
    CoefficientProfile::polynomial(-1.0, 1.0, c).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sbp_identity_any_size(n in 4usize..=64, h in 0.01..1.0f64) {
        prop_assert!(SbpOperator::new(n, h).identity_residual() < 1e-12);
    }

    #[test]
    fn adjoint_and_skew_vanish(n in 6usize..=64, l in -0.1..0.1f64, seed in proptest::collection::vec(unit(), 4 * 129)) {
        let dom = DomainSpec::new(-1.0, 1.0, 0.0).unwrap();
        let grid = build_grid(&dom, l, n, n).unwrap();
        let tr = grid.traces();
        let nn = grid.n_nodes();
        let mut x = seed[..nn].to_vec();
        x[tr.l_plus] = x[tr.l_minus];
        let y = seed[nn..2 * nn].to_vec();
        prop_assert!(adjoint_residual(&grid, &x, &y, 0.0).unwrap().abs() < 1e-12);

        let mut u = seed[..2 * nn].to_vec();
        let mut v = seed[2 * nn..4 * nn].to_vec();
        u[2 * tr.l_plus + 1] = u[2 * tr.l_minus + 1];
        v[2 * tr.l_plus + 1] = v[2 * tr.l_minus + 1];
        let u = StateVector::from_vector(DVector::from_vec(u));
        let v = StateVector::from_vector(DVector::from_vec(v));
        prop_assert!(skew_residual(&grid, &u, &v, 0.0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn adjoint_rejects_broken_trace(n in 6usize..=32, jump in 0.1..1.0f64) {
        let dom = DomainSpec::new(-1.0, 1.0, 0.0).unwrap();
        let grid = build_grid(&dom, 0.0, n, n).unwrap();
        let tr = grid.traces();
        let mut x = vec![0.0; grid.n_nodes()];
        x[tr.l_plus] = jump;
        let y = vec![1.0; grid.n_nodes()];
        prop_assert!(adjoint_residual(&grid, &x, &y, 1e-9).is_err());
    }

    #[test]
    fn boundary_power_is_sign_indefinite_form(a1 in unit(), a2 in unit(), b1 in unit(), b2 in unit()) {
        // ⟨e∂, f∂⟩ = −[u₁u₂]ₐᵇ
        let (f, e) = boundary_ports(Vector2::new(a1, a2), Vector2::new(b1, b2));
        let direct = a1 * a2 - b1 * b2;
        prop_assert!((e.dot(&f) - direct).abs() < 1e-14);
    }

    #[test]
    fn projector_is_idempotent_and_lands_in_domain(n in 6usize..=24, l in -0.1..0.1f64, s in proptest::collection::vec(unit(), 100)) {
        let dom = DomainSpec::new(-1.0, 1.0, 0.0).unwrap();
        let grid = build_grid(&dom, l, n, n).unwrap();
        let mat = MaterialPair::diagonal(poly(vec![1.0, 0.2]), poly(vec![2.0]), poly(vec![1.0, 0.3]), poly(vec![2.0, 0.2])).unwrap();
        for bc in [BoundarySpec::conservative(), BoundarySpec::dissipative()] {
            for norm in [ProjectionNorm::Energy, ProjectionNorm::Reference] {
                let p = constraint_projector(&grid, &mat, &bc, norm).unwrap();
                let x = DVector::from_fn(grid.dim(), |i, _| s[i % s.len()]);
                let y = DVector::from_fn(grid.dim(), |i, _| s[(i + 7) % s.len()]);
                let px = p.apply(&x);
                prop_assert!((p.apply(&px) - &px).amax() < 1e-11);
                prop_assert!(p.residual(&px).amax() < 1e-11);
                // self-adjoint in its own inner product
                let w = p.mass();
                prop_assert!((w.bilinear(&px, &y) - w.bilinear(&x, &p.apply(&y))).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn norm_ratio_respects_coercivity(l in -0.8..0.8f64, s in proptest::collection::vec(unit(), 130)) {
        let dom = DomainSpec::new(-1.0, 1.0, 0.0).unwrap();
        let grid = phiface::discretization::build_grid_balanced(&dom, l, 64).unwrap();
        let mat = MaterialPair::constant(-1.0, 1.0, [1.0, 3.0], [2.0, 1.5]).unwrap();
        let x = DVector::from_fn(grid.dim(), |i, _| s[i % s.len()]);
        prop_assume!(x.amax() > 1e-3);
        let r = norm_ratio(&grid, &mat, &x);
        let (m, big_m) = (mat.m(), mat.big_m());
        prop_assert!(r >= m / big_m - 1e-12 && r <= big_m / m + 1e-12);
    }

    #[test]
    fn equal_materials_certify_zero(c0 in 1.0..3.0f64, c1 in -0.5..0.5f64, d0 in 1.0..3.0f64) {
        let q11 = poly(vec![c0, c1]);
        let q22 = poly(vec![d0]);
        let mat = MaterialPair::diagonal(q11.clone(), q22.clone(), q11, q22).unwrap();
        prop_assert_eq!(omega_bound(&mat, 256).unwrap().omega, 0.0);
    }

    #[test]
    fn scaled_ratio_materials_certify(rho1 in -0.5..0.5f64) {
        // Q⁺ = (1 + ρ₁ z) Q⁻ satisfies the ratio assumption; ω ≥ 0 is finite
        let mat = MaterialPair::diagonal(poly(vec![1.0]), poly(vec![2.0]), poly(vec![1.0, rho1]), poly(vec![2.0, 2.0 * rho1])).unwrap();
        let w = omega_bound(&mat, 256).unwrap().omega;
        prop_assert!(w.is_finite() && w >= 0.0);
    }
}
