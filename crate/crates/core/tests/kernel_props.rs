mod common;

use common::{c, M};
use nalgebra::DVector;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vedil::linalg::{self, kron_id};
use vedil::sample::{self, random_cmat, random_gram_kernel, ValueKind};
use vedil::{FinSuppFunction, OperatorKernel};

const TOL: f64 = 1e-9;

fn kinds(i: usize) -> ValueKind {
    [ValueKind::Scalar, ValueKind::MatrixJ, ValueKind::Module][i % 3]
}

fn negated(k: &OperatorKernel<f64>) -> OperatorKernel<f64> {
    OperatorKernel::from_fn(k.points().to_vec(), k.h().clone(), TOL, |x, y| -k.matrix(x, y))
        .unwrap()
}

/// Smallest eigenvalue of the flattened matrix over a list of points that
/// may repeat; the oracle for n-positivity with repetitions.
fn repeated_min_eig(k: &OperatorKernel<f64>, pts: &[usize]) -> f64 {
    let (d, m) = (k.h().dim(), k.h().zsize());
    let n = pts.len();
    let mut big = M::zeros(n * d, n * d);
    for (a, &x) in pts.iter().enumerate() {
        for (b, &y) in pts.iter().enumerate() {
            big.view_mut((a * d, b * d), (d, d)).copy_from(k.matrix(x, y));
        }
    }
    let g = k.h().gram();
    let mut gn = M::zeros(n * d * m, n * d * m);
    for a in 0..n {
        gn.view_mut((a * d * m, a * d * m), (d * m, d * m)).copy_from(g);
    }
    let form = gn * kron_id(&big, m);
    linalg::eigh(&((&form + form.adjoint()) * c(0.5, 0.0))).0[0] / form.norm().max(1.0)
}

#[test]
fn gram_form_kernels_are_positive_and_two_positive() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for i in 0..200 {
        let inst = sample::random_instance::<f64, _>(&mut rng, kinds(i)).unwrap();
        let k = &inst.kernel;
        assert!(k.positive_semidefinite(TOL).pass, "instance {i}");
        assert!(k.n_positive(1, TOL).pass);
        // Diagonal blocks are positive operators.
        for x in 0..k.n_points() {
            let form = kron_id(k.matrix(x, x), k.h().zsize()).adjoint() * k.h().gram();
            assert!(linalg::psd_test(&form, TOL).pass);
        }
        let r = k.two_positive_consequences(TOL).unwrap();
        assert!(r.pass && r.hermitian_residual <= TOL, "instance {i}: {r:?}");
    }
}

#[test]
fn perturbed_kernels_fail() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for i in 0..50 {
        let inst = sample::random_instance::<f64, _>(&mut rng, kinds(i)).unwrap();
        let bad = inst.corrupted(1e-3).unwrap();
        let t = bad.positive_semidefinite(TOL);
        assert!(!t.pass, "perturbation {i} accepted");
        assert!(!t.witness.is_empty());
    }
}

#[test]
fn repetitions_reduce_to_the_full_test() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for i in 0..60 {
        let inst = sample::random_instance::<f64, _>(&mut rng, kinds(i)).unwrap();
        let k = if i % 2 == 0 { inst.kernel } else { inst.corrupted(1e-2).unwrap() };
        let full = k.positive_semidefinite(TOL).pass;
        for _ in 0..10 {
            let len = rng.random_range(1..=2 * k.n_points());
            let pts: Vec<usize> = (0..len).map(|_| rng.random_range(0..k.n_points())).collect();
            let ok = repeated_min_eig(&k, &pts) >= -TOL;
            // Compressions of a positive matrix stay positive.
            if full {
                assert!(ok, "repeated selection {pts:?} negative for a PSD kernel");
            }
        }
        // The full selection decides.
        let all: Vec<usize> = (0..k.n_points()).collect();
        assert_eq!(full, repeated_min_eig(&k, &all) >= -TOL, "instance {i}");
    }
}

#[test]
fn psd_cone_of_kernels_is_strict() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    for i in 0..100 {
        let n = rng.random_range(1..=4);
        let d = rng.random_range(1..=3);
        let scale = [1.0, 1e-6, 1e-13, 0.0][i % 4];
        let blocks: Vec<M> =
            (0..n * n).map(|_| random_cmat::<f64, _>(&mut rng, d, d) * c(scale, 0.0)).collect();
        let k = OperatorKernel::from_fn(
            (0..n).map(|p| format!("p{p}")).collect(),
            std::sync::Arc::new(vedil::VeSpace::hilbert(d)),
            TOL,
            |x, y| blocks[x * n + y].clone(),
        )
        .unwrap();
        if k.positive_semidefinite(TOL).pass && negated(&k).positive_semidefinite(TOL).pass {
            let worst = (0..n)
                .flat_map(|x| (0..n).map(move |y| (x, y)))
                .map(|(x, y)| k.matrix(x, y).norm())
                .fold(0.0, f64::max);
            assert!(worst <= 1e-8, "both signs accepted with |k| = {worst:e}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn n_positivity_is_monotone(seed in any::<u64>(), corrupt in any::<bool>(), kind in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = sample::random_instance::<f64, _>(&mut rng, kinds(kind)).unwrap();
        let k = if corrupt { inst.corrupted(1e-3).unwrap() } else { inst.kernel };
        let nx = k.n_points();
        let passes: Vec<bool> = (1..=nx + 1).map(|n| k.n_positive(n, TOL).pass).collect();
        for w in passes.windows(2) {
            prop_assert!(!w[1] || w[0]);
        }
        prop_assert_eq!(passes[nx - 1], k.positive_semidefinite(TOL).pass);
        prop_assert_eq!(passes[nx], passes[nx - 1]);
    }

    #[test]
    fn pairing_k_is_pairing_f0_after_convolution(seed in any::<u64>(), kind in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = sample::random_instance::<f64, _>(&mut rng, kinds(kind)).unwrap();
        let k = &inst.kernel;
        let d = k.h().dim();
        let mut g = FinSuppFunction::new();
        let mut h = FinSuppFunction::new();
        for x in 0..k.n_points() {
            if rng.random_bool(0.6) {
                g.insert(x, DVector::from_fn(d, |_, _| c(rng.random::<f64>() - 0.5, rng.random())));
            }
            if rng.random_bool(0.6) {
                h.insert(x, DVector::from_fn(d, |_, _| c(rng.random(), rng.random::<f64>() - 0.5)));
            }
        }
        let lhs = k.pairing_k(&g, &h).unwrap();
        let rhs = k.pairing_f0(&k.convolution(&g).unwrap(), &h).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().norm() <= 1e-10 * (1.0 + lhs.norm()));
        // A positive kernel gives a positive pairing.
        prop_assert!(k.pairing_k(&g, &g).unwrap().in_cone(1e-9));
    }

    #[test]
    fn scalar_gram_kernels_satisfy_schwarz(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = random_gram_kernel::<f64, _>(&mut rng, 4, 2, 0.3).unwrap();
        let r = k.two_positive_consequences(TOL).unwrap();
        prop_assert!(r.schwarz_asserted && r.pass);
        prop_assert!(r.schwarz_margin <= TOL);
        prop_assert!(r.zero_row_residual <= TOL);
    }
}
