//! Seeded random instances for property tests and benchmarks.
//!
//! Value spaces are twisted copies `C^a ⊗ E` of a small base space `E` with
//! Gram `A ⊗ G_E` (`A` positive definite). Operators `C ⊗ I` are then
//! adjointable for every `C`, and a kernel `k(x, y) = A^{-1} kappa(x, y) ⊗ I`
//! has positivity matrix `kappa ⊗ G_E`. So positivity and invariance of `k`
//! reduce to those of the scalar block kernel `kappa`, which is generated
//! in Gram form from a representation.

use std::sync::Arc;

use rand::Rng;

use crate::dilations::{FinStarAlgebra, LinearMap};
use crate::kernels::OperatorKernel;
use crate::linalg::{self, c, cr, zeros};
use crate::ordered_space::Descriptor;
use crate::star_semigroup::{SemigroupAction, StarSemigroup};
use crate::ve_space::{RightAction, VeSpace};
use crate::{CMat, Real, Result};

/// Acceptance tolerance for sampled data: `1e-9` in double precision and
/// a matching multiple of machine epsilon otherwise.
fn sample_tol<T: Real>() -> T {
    let e = T::default_epsilon() * crate::lit(1e7);
    if e > crate::lit(1e-9) { e } else { crate::lit(1e-9) }
}

/// Base space `E` of the twisted value space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueKind {
    /// `E = C`, scalar gramian.
    Scalar,
    /// `E = C` with `[1, 1] = J`, `J` a random positive definite `2 x 2`.
    MatrixJ,
    /// `E = 1 x 2` row matrices over `MatrixAlg(2)`, `[a, b] = a* b`.
    Module,
}

pub fn random_cmat<T: Real, R: Rng>(rng: &mut R, r: usize, cols: usize) -> CMat<T> {
    CMat::from_fn(r, cols, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

/// `B^H B + 0.5 I`.
pub fn random_pd<T: Real, R: Rng>(rng: &mut R, n: usize) -> CMat<T> {
    let b = random_cmat::<T, R>(rng, n, n);
    b.adjoint() * &b + linalg::identity::<T>(n) * c::<T>(0.5, 0.0)
}

pub fn random_unitary<T: Real, R: Rng>(rng: &mut R, n: usize) -> CMat<T> {
    random_cmat::<T, R>(rng, n, n).qr().q()
}

/// `C^a ⊗ E` with Gram `A ⊗ G_E`.
#[derive(Debug, Clone)]
pub struct ValueSpace<T: Real> {
    pub kind: ValueKind,
    pub space: Arc<VeSpace<T>>,
    /// The positive definite twist `A`.
    pub a: CMat<T>,
    a_inv: CMat<T>,
    /// Dimension of `E`.
    pub t: usize,
}

impl<T: Real> ValueSpace<T> {
    pub fn new<R: Rng>(rng: &mut R, kind: ValueKind, a_dim: usize) -> Self {
        let a = random_pd::<T, R>(rng, a_dim);
        let (base, t) = match kind {
            ValueKind::Scalar => (VeSpace::hilbert(1), 1),
            ValueKind::MatrixJ => {
                let j = random_pd::<T, R>(rng, 2);
                (
                    VeSpace::from_gram_unchecked(Descriptor::matrix_alg(2), j)
                        .expect("2x2 gram over MatrixAlg(2)"),
                    1,
                )
            }
            ValueKind::Module => (VeSpace::matrix_module(1, 2), 2),
        };
        let gram = a.kronecker(base.gram());
        let mut space = VeSpace::from_gram_unchecked(base.z().clone(), gram).expect("twisted gram");
        if let Some(act) = base.module() {
            let units = act
                .units
                .iter()
                .map(|u| linalg::id_kron(a_dim, u))
                .collect();
            space = space
                .with_module_unchecked(RightAction { m: act.m, units })
                .expect("twisted module");
        }
        let a_inv = a.clone().try_inverse().expect("positive definite twist");
        Self {
            kind,
            space: Arc::new(space),
            a,
            a_inv,
            t,
        }
    }

    pub fn a_dim(&self) -> usize {
        self.a.nrows()
    }

    /// `A^{-1} kappa ⊗ I_t`: the operator whose positivity matrix block is
    /// `kappa ⊗ G_E`.
    pub fn lift(&self, kappa: &CMat<T>) -> CMat<T> {
        (&self.a_inv * kappa).kronecker(&linalg::identity::<T>(self.t))
    }
}

/// A positive semidefinite invariant kernel with the data it came from.
#[derive(Debug, Clone)]
pub struct Instance<T: Real> {
    pub kernel: OperatorKernel<T>,
    pub action: SemigroupAction,
    pub value_space: ValueSpace<T>,
    /// Scalar block kernel, `n a x n a`.
    pub kappa: CMat<T>,
    /// Representation and `W_0` when `kappa(x, y) = W_0* rho(x)* rho(y) W_0`
    /// on `X = Gamma`.
    pub rep: Option<(Vec<CMat<T>>, CMat<T>)>,
}

fn kernel_from_kappa<T: Real>(
    vs: &ValueSpace<T>,
    points: Vec<String>,
    kappa: &CMat<T>,
) -> Result<OperatorKernel<T>> {
    let a = vs.a_dim();
    OperatorKernel::from_fn(points, vs.space.clone(), sample_tol::<T>(), |x, y| {
        vs.lift(&kappa.view((x * a, y * a), (a, a)).into_owned())
    })
}

/// Pushes the smallest eigenvalue of `kappa` to `-delta`.
pub fn corrupt_kappa<T: Real>(kappa: &CMat<T>, delta: T) -> CMat<T> {
    let (vals, vecs) = linalg::eigh(kappa);
    let v = vecs.column(0).into_owned();
    kappa - (&v * v.adjoint()) * cr(vals[0] + delta)
}

impl<T: Real> Instance<T> {
    /// Same points and value space with a non-positive `kappa`.
    pub fn corrupted(&self, delta: T) -> Result<OperatorKernel<T>> {
        kernel_from_kappa(
            &self.value_space,
            self.kernel.points().to_vec(),
            &corrupt_kappa(&self.kappa, delta),
        )
    }

    /// The instance with points listed as `new[i] = old[perm[i]]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<(OperatorKernel<T>, SemigroupAction)> {
        Ok((self.kernel.permute_points(perm)?, self.action.permute_points(perm)?))
    }
}

fn regular_rep<T: Real>(g: &StarSemigroup) -> Vec<CMat<T>> {
    let n = g.len();
    (0..n)
        .map(|a| {
            let mut p = zeros::<T>(n, n);
            for b in 0..n {
                p[(g.mul(a, b), b)] = cr(T::one());
            }
            p
        })
        .collect()
}

fn conjugate<T: Real>(u: &CMat<T>, mats: Vec<CMat<T>>) -> Vec<CMat<T>> {
    mats.into_iter().map(|m| u * m * u.adjoint()).collect()
}

/// Diagonal projection onto coordinates `lo..hi` of `C^n`, conjugated by `u`.
fn projection<T: Real>(u: &CMat<T>, n: usize, lo: usize, hi: usize) -> CMat<T> {
    let mut p = zeros::<T>(n, n);
    for i in lo..hi {
        p[(i, i)] = cr(T::one());
    }
    u * p * u.adjoint()
}

/// A *-representation of one of the built-in finite *-semigroups.
fn random_rep<T: Real, R: Rng>(rng: &mut R, g: &StarSemigroup, kind: SemigroupKind) -> Vec<CMat<T>> {
    match kind {
        SemigroupKind::Group => {
            let u = random_unitary::<T, R>(rng, g.len());
            conjugate(&u, regular_rep(g))
        }
        SemigroupKind::Chain => {
            // p_i -> projection onto the first (dim - cut_i) coordinates with
            // cuts increasing in i, so p_i p_j = p_max(i,j).
            let n = g.len() + 1;
            let u = random_unitary::<T, R>(rng, n);
            let mut cut = 0;
            (0..g.len())
                .map(|i| {
                    if i > 0 {
                        cut = (cut + rng.random_range(0..=1)).min(n);
                    }
                    projection(&u, n, 0, n - cut)
                })
                .collect()
        }
        SemigroupKind::Projections => {
            let n = rng.random_range(2..=4);
            let u = random_unitary::<T, R>(rng, n);
            let split = rng.random_range(1..n);
            let end = rng.random_range(split..=n);
            let p = projection(&u, n, 0, split);
            let q = projection(&u, n, split, end);
            vec![linalg::identity(n), zeros(n, n), p.clone(), q.clone(), p + q]
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SemigroupKind {
    Group,
    Chain,
    Projections,
}

fn random_semigroup<R: Rng>(rng: &mut R) -> (StarSemigroup, SemigroupKind) {
    match rng.random_range(0..6) {
        0 => (StarSemigroup::cyclic(rng.random_range(2..=6)), SemigroupKind::Group),
        1 => (StarSemigroup::klein4(), SemigroupKind::Group),
        2 => (StarSemigroup::symmetric3(), SemigroupKind::Group),
        3 => (StarSemigroup::semilattice_chain(rng.random_range(2..=4)), SemigroupKind::Chain),
        4 => (StarSemigroup::orthogonal_projections(), SemigroupKind::Projections),
        _ => (StarSemigroup::cyclic(2), SemigroupKind::Group),
    }
}

fn random_a_dim<R: Rng>(rng: &mut R, kind: ValueKind) -> usize {
    match kind {
        ValueKind::Module => 1,
        _ => rng.random_range(1..=3),
    }
}

/// `X = Gamma` under left multiplication, `kappa(x, y) = W_0* rho(x* y) W_0`.
pub fn semigroup_instance<T: Real, R: Rng>(rng: &mut R, kind: ValueKind) -> Result<Instance<T>> {
    let a = random_a_dim(rng, kind);
    let (g, sk) = random_semigroup(rng);
    semigroup_instance_for(rng, kind, a, g, sk)
}

fn semigroup_instance_for<T: Real, R: Rng>(
    rng: &mut R,
    kind: ValueKind,
    a: usize,
    g: StarSemigroup,
    sk: SemigroupKind,
) -> Result<Instance<T>> {
    let vs = ValueSpace::<T>::new(rng, kind, a);
    let rho = random_rep::<T, R>(rng, &g, sk);
    let c_dim = rho[0].nrows();
    let w0 = random_cmat::<T, R>(rng, c_dim, a);
    let n = g.len();
    let mut kappa = zeros::<T>(n * a, n * a);
    for x in 0..n {
        for y in 0..n {
            let blk = w0.adjoint() * rho[x].adjoint() * &rho[y] * &w0;
            kappa.view_mut((x * a, y * a), (a, a)).copy_from(&blk);
        }
    }
    kappa = linalg::hermitian_part(&kappa);
    let g = Arc::new(g);
    let kernel = kernel_from_kappa(&vs, g.elements().to_vec(), &kappa)?;
    Ok(Instance {
        kernel,
        action: SemigroupAction::left_multiplication(g),
        value_space: vs,
        kappa,
        rep: Some((rho, w0)),
    })
}

/// A group acting on a union of regular orbits and fixed points (or `S_3`
/// on three letters), with `kappa` the group average of a random Gram
/// kernel.
pub fn group_instance<T: Real, R: Rng>(rng: &mut R, kind: ValueKind) -> Result<Instance<T>> {
    let a = random_a_dim(rng, kind);
    group_instance_sized(rng, kind, a)
}

fn group_instance_sized<T: Real, R: Rng>(rng: &mut R, kind: ValueKind, a: usize) -> Result<Instance<T>> {
    let (g, act) = random_group_action(rng);
    let g = Arc::new(g);
    let n = act[0].len();
    let vs = ValueSpace::<T>::new(rng, kind, a);
    let c_dim = rng.random_range(1..=n * a);
    let cs: Vec<CMat<T>> = (0..n).map(|_| random_cmat::<T, R>(rng, c_dim, a)).collect();
    let mut kappa = zeros::<T>(n * a, n * a);
    for row in &act {
        for x in 0..n {
            for y in 0..n {
                let blk = cs[row[x]].adjoint() * &cs[row[y]];
                let mut v = kappa.view_mut((x * a, y * a), (a, a));
                v += blk;
            }
        }
    }
    kappa = linalg::hermitian_part(&(kappa * c::<T>(1.0 / act.len() as f64, 0.0)));
    let points = (0..n).map(|i| format!("p{i}")).collect();
    let kernel = kernel_from_kappa(&vs, points, &kappa)?;
    Ok(Instance {
        kernel,
        action: SemigroupAction::new(g, n, act)?,
        value_space: vs,
        kappa,
        rep: None,
    })
}

fn random_group_action<R: Rng>(rng: &mut R) -> (StarSemigroup, Vec<Vec<usize>>) {
    let choice = rng.random_range(0..4);
    if choice == 3 {
        // S_3 on {0, 1, 2} plus fixed points.
        let g = StarSemigroup::symmetric3();
        let fixed = rng.random_range(0..=3);
        let act = g
            .elements()
            .iter()
            .map(|name| {
                let digits: Vec<usize> = name[1..]
                    .chars()
                    .map(|ch| ch.to_digit(10).expect("permutation digit") as usize)
                    .collect();
                digits.into_iter().chain(3..3 + fixed).collect()
            })
            .collect();
        return (g, act);
    }
    let g = match choice {
        0 => StarSemigroup::cyclic(rng.random_range(1..=3)),
        1 => StarSemigroup::cyclic(2),
        _ => StarSemigroup::klein4(),
    };
    let k = g.len();
    let copies = rng.random_range(1..=(6 / k).max(1));
    let fixed = rng.random_range(0..=(6 - copies * k));
    let n = copies * k + fixed;
    let act = (0..k)
        .map(|a| {
            (0..n)
                .map(|x| {
                    if x < copies * k {
                        (x / k) * k + g.mul(a, x % k)
                    } else {
                        x
                    }
                })
                .collect()
        })
        .collect();
    (g, act)
}

/// Either family, chosen at random.
pub fn random_instance<T: Real, R: Rng>(rng: &mut R, kind: ValueKind) -> Result<Instance<T>> {
    if rng.random_bool(0.5) {
        group_instance(rng, kind)
    } else {
        semigroup_instance(rng, kind)
    }
}

/// Either family with the twist dimension fixed, so `dim H = a_dim * t`.
pub fn random_instance_sized<T: Real, R: Rng>(
    rng: &mut R,
    kind: ValueKind,
    a_dim: usize,
) -> Result<Instance<T>> {
    if rng.random_bool(0.5) {
        group_instance_sized(rng, kind, a_dim)
    } else {
        let (g, sk) = random_semigroup(rng);
        semigroup_instance_for(rng, kind, a_dim, g, sk)
    }
}

/// Instance on `{e, 0, p, q, r}` with `rho(p) + rho(q) = rho(r)`; returns
/// the indices `(p, q, r)`.
pub fn additivity_instance<T: Real, R: Rng>(
    rng: &mut R,
    kind: ValueKind,
) -> Result<(Instance<T>, usize, usize, usize)> {
    let g = StarSemigroup::orthogonal_projections();
    let a = random_a_dim(rng, kind);
    let inst = semigroup_instance_for(rng, kind, a, g, SemigroupKind::Projections)?;
    Ok((inst, 2, 3, 4))
}

/// Scalar Gram kernel `C_x* C_y` on `n` points of `C^d`; each `C_x` is zero
/// with probability `zero_prob`.
pub fn random_gram_kernel<T: Real, R: Rng>(
    rng: &mut R,
    n: usize,
    d: usize,
    zero_prob: f64,
) -> Result<OperatorKernel<T>> {
    let c_dim = rng.random_range(1..=n * d);
    let scale = rng.random_range(0.1..3.0);
    let cs: Vec<CMat<T>> = (0..n)
        .map(|_| {
            if rng.random_bool(zero_prob) {
                zeros(c_dim, d)
            } else {
                random_cmat::<T, R>(rng, c_dim, d) * c::<T>(scale, 0.0)
            }
        })
        .collect();
    let h = Arc::new(VeSpace::hilbert(d));
    let points = (0..n).map(|i| format!("p{i}")).collect();
    OperatorKernel::from_fn(points, h, sample_tol::<T>(), |x, y| cs[x].adjoint() * &cs[y])
}

/// `r` random `m x m` Kraus operators.
pub fn random_kraus<T: Real, R: Rng>(rng: &mut R, m: usize, r: usize) -> Vec<CMat<T>> {
    (0..r).map(|_| random_cmat::<T, R>(rng, m, m)).collect()
}

/// `phi(a) = sum_r K_r* a K_r` on `M_m` into operators on `C^m`.
pub fn kraus_map<T: Real>(kraus: &[CMat<T>]) -> Result<LinearMap<T>> {
    let m = kraus[0].nrows();
    let alg = Arc::new(FinStarAlgebra::matrix_algebra(m));
    let h = Arc::new(VeSpace::hilbert(m));
    let vals = (0..m * m)
        .map(|b| {
            let e = alg.matrix_of(&alg.basis_vec(b)).expect("matrix model");
            kraus
                .iter()
                .fold(zeros::<T>(m, m), |acc, k| acc + k.adjoint() * &e * k)
        })
        .collect();
    LinearMap::new(alg, h, vals, sample_tol::<T>())
}

/// A group from the built-in list, for callers that need one directly.
pub fn random_group<R: Rng>(rng: &mut R) -> StarSemigroup {
    match rng.random_range(0..3) {
        0 => StarSemigroup::cyclic(rng.random_range(2..=5)),
        1 => StarSemigroup::klein4(),
        _ => StarSemigroup::symmetric3(),
    }
}
