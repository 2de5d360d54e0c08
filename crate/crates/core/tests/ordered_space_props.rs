mod common;

use common::{c, M};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vedil::ordered_space::schur_counterexample;
use vedil::sample::random_cmat;
use vedil::{linalg, Descriptor, ZElement};

fn descriptors() -> Vec<Descriptor> {
    vec![
        Descriptor::Scalar,
        Descriptor::matrix_alg(2),
        Descriptor::matrix_alg(3),
        Descriptor::product(vec![Descriptor::Scalar, Descriptor::matrix_alg(2)]),
        Descriptor::kernel_space(3),
    ]
}

/// A random cone element: PSD on every leaf, with a random rank.
fn cone_element(rng: &mut ChaCha8Rng, desc: &Descriptor) -> ZElement<f64> {
    let n = desc.size();
    let rank = rng.random_range(0..=n);
    let b = random_cmat::<f64, _>(rng, rank, n);
    ZElement::from_masked(desc.clone(), &(b.adjoint() * b))
}

fn arbitrary_element(rng: &mut ChaCha8Rng, desc: &Descriptor) -> ZElement<f64> {
    let n = desc.size();
    ZElement::from_masked(desc.clone(), &random_cmat::<f64, _>(rng, n, n))
}

#[test]
fn strictness_on_random_elements() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..1000 {
        let desc = &descriptors()[i % 5];
        // Half are cone elements, half arbitrary or tiny.
        let z = match i % 4 {
            0 => cone_element(&mut rng, desc),
            1 => arbitrary_element(&mut rng, desc),
            2 => arbitrary_element(&mut rng, desc).scale_real(1e-13),
            _ => ZElement::zero(desc.clone()),
        };
        let neg = z.scale_real(-1.0);
        if z.in_cone(1e-10) && neg.in_cone(1e-10) {
            assert!(z.norm() <= 1e-8, "{desc:?}: |z| = {}", z.norm());
        }
    }
}

#[test]
fn involution_is_conjugate_linear_and_involutive() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for desc in descriptors() {
        for _ in 0..50 {
            let x = arbitrary_element(&mut rng, &desc);
            let y = arbitrary_element(&mut rng, &desc);
            let (s, t) = (c(rng.random(), rng.random()), c(rng.random(), -rng.random::<f64>()));
            let lhs = x.scale(s).add(&y.scale(t)).unwrap().involute();
            let rhs = x.involute().scale(s.conj()).add(&y.involute().scale(t.conj())).unwrap();
            assert!(lhs.sub(&rhs).unwrap().norm() < 1e-12);
            assert!(x.involute().involute().sub(&x).unwrap().norm() < 1e-15);
        }
    }
}

#[test]
fn kernels_pair_their_arguments_under_the_involution() {
    let k = ZElement::<f64>::new(
        Descriptor::kernel_space(2),
        M::from_row_slice(2, 2, &[c(1., 0.), c(2., 1.), c(3., 0.), c(4., 0.)]),
    )
    .unwrap();
    let s = k.involute();
    assert_eq!(s.value()[(0, 1)], c(3., 0.));
    assert_eq!(s.value()[(1, 0)], c(2., -1.));
}

#[test]
fn schur_products_of_psd_kernels_are_psd() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let desc = Descriptor::kernel_space(4);
    for _ in 0..200 {
        let a = cone_element(&mut rng, &desc);
        let b = cone_element(&mut rng, &desc);
        assert!(a.schur_product(&b).unwrap().in_cone(1e-9));
    }
}

#[test]
fn stored_counterexample_is_not_positive() {
    let k = schur_counterexample::<f64>();
    let kk = k.involute().schur_product(&k).unwrap();
    assert!(!kk.in_cone(1e-9));
    // Independent oracle: the smallest eigenvalue of the Hermitian part.
    let v = kk.value();
    let h = (v + v.adjoint()) * c(0.5, 0.0);
    assert!(linalg::eigh(&h).0[0] < -1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn cone_closed_under_nonnegative_combinations(
        seed in any::<u64>(),
        which in 0usize..5,
        s in 0.0f64..10.0,
        t in 0.0f64..10.0,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let desc = &descriptors()[which];
        let a = cone_element(&mut rng, desc);
        let b = cone_element(&mut rng, desc);
        prop_assert!(a.in_cone(1e-9) && b.in_cone(1e-9));
        prop_assert!(a.scale_real(s).add(&b.scale_real(t)).unwrap().in_cone(1e-9));
    }

    #[test]
    fn cone_elements_are_selfadjoint(seed in any::<u64>(), which in 0usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let desc = &descriptors()[which];
        let z = cone_element(&mut rng, desc);
        let z2 = arbitrary_element(&mut rng, desc);
        for w in [z, z2] {
            if w.in_cone(1e-9) {
                prop_assert!(w.sub(&w.involute()).unwrap().norm() <= 1e-9 * w.norm().max(1e-300));
            }
        }
    }

    #[test]
    fn order_is_cone_difference(seed in any::<u64>(), which in 0usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let desc = &descriptors()[which];
        let a = arbitrary_element(&mut rng, desc);
        let p = cone_element(&mut rng, desc);
        let b = a.add(&p).unwrap();
        prop_assert!(a.leq(&b, 1e-9).unwrap());
    }
}
