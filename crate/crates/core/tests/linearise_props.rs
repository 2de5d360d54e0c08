mod common;

use std::sync::Arc;

use common::{c, M};
use nalgebra::DVector;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vedil::linalg::{self, kron_id};
use vedil::linearise::{pushforward, unitary_equivalence, verify_parts};
use vedil::sample::{self, ValueKind};
use vedil::star_semigroup::check_invariance;
use vedil::{FinSuppFunction, InvariantLinearisation, VeSpace};

const TOL: f64 = 1e-9;

fn kinds(i: usize) -> ValueKind {
    [ValueKind::Scalar, ValueKind::MatrixJ, ValueKind::Module][i % 3]
}

/// Rank of `[x, x] = 0` detection on generator coefficients, computed from
/// the eigenvalues of `A^H A` for the strictness matrix `A`.
fn strict_rank(gram: &M, m: usize) -> usize {
    let a = linalg::strictness_matrix(gram, m);
    let ata = a.adjoint() * &a;
    let (vals, _) = linalg::eigh(&ata);
    let top = vals.iter().cloned().fold(0.0, f64::max);
    vals.iter().filter(|&&v| v > 1e-16 * top * 1e4).count()
}

fn random_support(rng: &mut ChaCha8Rng, n: usize, d: usize) -> FinSuppFunction<f64> {
    let mut g = FinSuppFunction::new();
    for x in 0..n {
        if rng.random_bool(0.5) {
            g.insert(x, DVector::from_fn(d, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)));
        }
    }
    g
}

/// `sum_x V(x) g(x)` in `K`.
fn realise(l: &InvariantLinearisation<f64>, g: &FinSuppFunction<f64>) -> DVector<nalgebra::Complex<f64>> {
    let mut out = DVector::zeros(l.dim_k());
    for (x, v) in g.iter() {
        out += l.v(x).matrix() * v;
    }
    out
}

#[test]
fn dimension_equals_strict_rank_of_generator_gram() {
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    for i in 0..100 {
        let inst = sample::random_instance::<f64, _>(&mut rng, kinds(i)).unwrap();
        let l = InvariantLinearisation::construct(&inst.kernel, &inst.action, TOL).unwrap();
        let m = inst.kernel.h().zsize();
        assert_eq!(l.dim_k(), strict_rank(l.big_gram(), m), "instance {i}");
        assert!(l.report().minimal);
    }
}

#[test]
fn recovered_kernels_are_positive_and_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(52);
    for i in 0..60 {
        let inst = sample::random_instance::<f64, _>(&mut rng, kinds(i)).unwrap();
        let l = InvariantLinearisation::construct(&inst.kernel, &inst.action, TOL).unwrap();
        let k = l.recovered_kernel().unwrap();
        assert!(k.positive_semidefinite(TOL).pass);
        assert!(check_invariance(&k, &inst.action, TOL).unwrap().pass);
        for x in 0..k.n_points() {
            for y in 0..k.n_points() {
                let e = (k.matrix(x, y) - inst.kernel.matrix(x, y)).norm();
                assert!(e <= 1e-9 * inst.kernel.scale().max(1.0));
            }
        }
    }
}

#[test]
fn reconstruction_is_idempotent_up_to_unitaries() {
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    for i in 0..60 {
        let inst = sample::random_instance::<f64, _>(&mut rng, kinds(i)).unwrap();
        let l = InvariantLinearisation::construct(&inst.kernel, &inst.action, TOL).unwrap();
        let again = InvariantLinearisation::construct(&l.recovered_kernel().unwrap(), &inst.action, TOL).unwrap();
        assert_eq!(l.dim_k(), again.dim_k());
        let w = unitary_equivalence(&l, &again, TOL).unwrap();
        assert!(w.pass, "instance {i}: {:e}", w.max_residual());
    }
}

#[test]
fn pushforward_agrees_with_generator_relabelling() {
    let mut rng = ChaCha8Rng::seed_from_u64(54);
    for i in 0..60 {
        let inst = sample::random_instance::<f64, _>(&mut rng, kinds(i)).unwrap();
        let l = InvariantLinearisation::construct(&inst.kernel, &inst.action, TOL).unwrap();
        let (n, d) = (inst.kernel.n_points(), inst.kernel.h().dim());
        for xi in 0..inst.action.semigroup().len() {
            let g = random_support(&mut rng, n, d);
            let moved = l.pi(xi).matrix() * realise(&l, &g);
            let pushed = realise(&l, &pushforward(&inst.action, xi, &g));
            assert!((moved - pushed).norm() <= 1e-9 * (1.0 + realise(&l, &g).norm()));
        }
    }
}

#[test]
fn non_minimal_parts_verify_but_are_flagged() {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let inst = sample::random_instance::<f64, _>(&mut rng, ValueKind::Scalar).unwrap();
    let l = InvariantLinearisation::construct(&inst.kernel, &inst.action, TOL).unwrap();
    let r = l.dim_k();
    // Pad K with one orthogonal direction that nothing reaches.
    let mut g = M::zeros(r + 1, r + 1);
    g.view_mut((0, 0), (r, r)).copy_from(l.k_space().gram());
    g[(r, r)] = c(1.0, 0.0);
    let big = Arc::new(VeSpace::new(l.k_space().z().clone(), g, TOL).unwrap());
    let pad = |m: &M, cols: usize| {
        let mut out = M::zeros(r + 1, cols);
        out.view_mut((0, 0), (r, m.ncols())).copy_from(m);
        out
    };
    let v: Vec<M> = l.v_all().iter().map(|o| pad(o.matrix(), o.matrix().ncols())).collect();
    let pi: Vec<M> = l
        .pi_all()
        .iter()
        .map(|o| {
            let mut p = pad(o.matrix(), r + 1);
            p[(r, r)] = c(1.0, 0.0);
            p
        })
        .collect();
    let rep = verify_parts(&inst.kernel, &inst.action, &big, &v, &pi, TOL).unwrap();
    assert!(!rep.minimal);
    assert_eq!(rep.span_rank, r);
}

#[test]
fn tampered_representations_fail_verification() {
    let mut rng = ChaCha8Rng::seed_from_u64(56);
    for i in 0..30 {
        let inst = sample::group_instance::<f64, _>(&mut rng, kinds(i)).unwrap();
        let l = InvariantLinearisation::construct(&inst.kernel, &inst.action, TOL).unwrap();
        if l.dim_k() == 0 {
            continue;
        }
        let xi = rng.random_range(0..inst.action.semigroup().len());
        let mut bad = l.pi(xi).matrix().clone();
        bad[(0, 0)] += c(1e-3, 0.0);
        let t = l.with_pi_matrix(xi, bad, TOL).unwrap();
        assert!(!t.report().pass, "instance {i}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn linearisation_axioms_hold(seed in any::<u64>(), kind in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = sample::random_instance::<f64, _>(&mut rng, kinds(kind)).unwrap();
        let l = InvariantLinearisation::construct(&inst.kernel, &inst.action, TOL).unwrap();
        let (k, a) = (&inst.kernel, &inst.action);
        let m = k.h().zsize();
        let kscale = k.scale().max(1.0);
        // k(x, y) = V(x)* V(y), on the level of gramians.
        for x in 0..k.n_points() {
            for y in 0..k.n_points() {
                let lhs = kron_id(l.v(x).matrix(), m).adjoint() * l.k_space().gram() * kron_id(l.v(y).matrix(), m);
                let rhs = k.h().gram() * kron_id(k.matrix(x, y), m);
                prop_assert!((lhs - rhs).norm() <= 1e-9 * kscale * k.h().gram().norm().max(1.0));
            }
        }
        let sg = a.semigroup();
        let pmax = l.pi_all().iter().map(|p| p.matrix().norm()).fold(1.0, f64::max);
        for al in 0..sg.len() {
            // Multiplicative and star preserving.
            for be in 0..sg.len() {
                let e = l.pi(al).matrix() * l.pi(be).matrix() - l.pi(sg.mul(al, be)).matrix();
                prop_assert!(e.norm() <= 1e-9 * pmax * pmax);
            }
            let e = l.pi(al).adjoint_matrix() - l.pi(sg.star(al)).matrix();
            prop_assert!(e.norm() <= 1e-9 * pmax);
            // V(xi . x) = pi(xi) V(x).
            for x in 0..k.n_points() {
                let e = l.v(a.act(al, x)).matrix() - l.pi(al).matrix() * l.v(x).matrix();
                prop_assert!(e.norm() <= 1e-9 * pmax * kscale.sqrt().max(1.0));
            }
        }
    }
}

#[test]
fn single_precision_pipeline() {
    let mut rng = ChaCha8Rng::seed_from_u64(57);
    for i in 0..20 {
        let inst = sample::random_instance::<f32, _>(&mut rng, kinds(i)).unwrap();
        let l = InvariantLinearisation::construct(&inst.kernel, &inst.action, 1e-3_f32).unwrap();
        assert!(l.report().max_residual() <= 1e-3, "instance {i}");
    }
}
