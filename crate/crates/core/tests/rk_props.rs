mod common;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vedil::linearise::unitary_equivalence_views;
use vedil::sample::{self, ValueKind};
use vedil::{InvariantLinearisation, RkSpace};

const TOL: f64 = 1e-9;

fn kinds(i: usize) -> ValueKind {
    [ValueKind::Scalar, ValueKind::MatrixJ, ValueKind::Module][i % 3]
}

fn rand_vec(rng: &mut ChaCha8Rng, d: usize) -> DVector<nalgebra::Complex<f64>> {
    DVector::from_fn(d, |_, _| common::c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
}

#[test]
fn reproducing_identity_on_generators_and_random_members() {
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    for i in 0..30 {
        let inst = sample::random_instance::<f64, _>(&mut rng, kinds(i)).unwrap();
        let rk = RkSpace::from_kernel(&inst.kernel, TOL).unwrap();
        assert!(rk.is_minimal());
        assert!(rk.rk3_residual() <= 1e-10, "instance {i}: {:e}", rk.rk3_residual());
        let d = inst.kernel.h().dim();
        for _ in 0..100 {
            let f = rand_vec(&mut rng, rk.dim());
            let x = rng.random_range(0..inst.kernel.n_points());
            let h = rand_vec(&mut rng, d);
            assert!(rk.rk3_residual_for(&f, x, &h).unwrap() <= 1e-10);
        }
    }
}

#[test]
fn kernel_sections_are_members() {
    let mut rng = ChaCha8Rng::seed_from_u64(62);
    for i in 0..30 {
        let inst = sample::random_instance::<f64, _>(&mut rng, kinds(i)).unwrap();
        let rk = RkSpace::from_kernel(&inst.kernel, TOL).unwrap();
        let k = &inst.kernel;
        // The member with coordinates kx(x) h evaluates to y -> k(y, x) h.
        for x in 0..k.n_points() {
            let h = rand_vec(&mut rng, k.h().dim());
            let f = rk.kx(x) * &h;
            for y in 0..k.n_points() {
                let e = rk.evaluate(&f, y).unwrap() - k.matrix(y, x) * &h;
                assert!(e.norm() <= 1e-9 * k.scale().max(1.0) * h.norm());
            }
        }
        assert!(rk.kx_fit_residual() <= 1e-9);
    }
}

#[test]
fn minimal_realisation_is_determined_by_the_kernel() {
    let mut rng = ChaCha8Rng::seed_from_u64(63);
    for i in 0..30 {
        let inst = sample::random_instance::<f64, _>(&mut rng, kinds(i)).unwrap();
        let a = RkSpace::from_kernel(&inst.kernel, TOL).unwrap();
        let l = InvariantLinearisation::construct(&inst.kernel, &inst.action, TOL).unwrap();
        let b = RkSpace::from_linearisation(&l).unwrap();
        assert_eq!(a.dim(), b.dim());
        let w = unitary_equivalence_views(&a.view(), &b.view(), TOL).unwrap();
        assert!(w.pass, "instance {i}: {:e}", w.max_residual());
    }
}

#[test]
fn evaluations_are_adjointable_and_rebuild_the_kernel() {
    let mut rng = ChaCha8Rng::seed_from_u64(64);
    for i in 0..30 {
        let inst = sample::random_instance::<f64, _>(&mut rng, kinds(i)).unwrap();
        let rk = RkSpace::from_kernel(&inst.kernel, TOL).unwrap();
        for x in 0..inst.kernel.n_points() {
            let adj = rk.evaluation_adjoint(x, TOL).unwrap();
            // E_x* = k_x.
            let e = adj.adjoint_matrix() - rk.kx(x);
            assert!(e.norm() <= 1e-9 * inst.kernel.scale().max(1.0));
        }
        assert!(rk.rebuilt_kernel_residual() <= 1e-9);
        let back = rk.to_linearisation(Some(&inst.action), TOL).unwrap();
        assert!(back.report().pass && back.report().minimal);
    }
}

#[test]
fn non_minimal_linearisations_are_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(65);
    let inst = sample::random_instance::<f64, _>(&mut rng, ValueKind::Scalar).unwrap();
    let l = InvariantLinearisation::construct(&inst.kernel, &inst.action, TOL).unwrap();
    let r = l.dim_k();
    let mut g = common::M::zeros(r + 1, r + 1);
    g.view_mut((0, 0), (r, r)).copy_from(l.k_space().gram());
    g[(r, r)] = common::c(1.0, 0.0);
    let big = std::sync::Arc::new(vedil::VeSpace::new(vedil::Descriptor::Scalar, g, TOL).unwrap());
    let grow = |m: &common::M, cols: usize, unit: bool| {
        let mut out = common::M::zeros(r + 1, cols);
        out.view_mut((0, 0), (r, m.ncols())).copy_from(m);
        if unit {
            out[(r, r)] = common::c(1.0, 0.0);
        }
        out
    };
    let v = l.v_all().iter().map(|o| grow(o.matrix(), o.matrix().ncols(), false)).collect();
    let pi = l.pi_all().iter().map(|o| grow(o.matrix(), r + 1, true)).collect();
    let padded = InvariantLinearisation::from_parts(&inst.kernel, &inst.action, big, v, pi, TOL).unwrap();
    assert!(!padded.report().minimal);
    assert!(RkSpace::from_linearisation(&padded).is_err());
}
