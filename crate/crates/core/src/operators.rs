//! Adjointable operators between VE-spaces.
//!
//! An operator `T: E -> F` is a `dim F x dim E` coefficient matrix. It is
//! adjointable when some `S: F -> E` satisfies `[T e, f]_F = [e, S f]_E`,
//! which in flattened form reads `(T ⊗ I)^H G_F = G_E (S ⊗ I)`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{self, c, cr, kron_id, zeros};
use crate::ve_space::VeSpace;
use crate::{lit, null_threshold, CMat, CVec, Error, Real, Result, C};

#[derive(Debug, Clone)]
pub struct AdjointableOp<T: Real> {
    domain: Arc<VeSpace<T>>,
    codomain: Arc<VeSpace<T>>,
    matrix: CMat<T>,
    adjoint: CMat<T>,
}

fn same_space<T: Real>(a: &Arc<VeSpace<T>>, b: &Arc<VeSpace<T>>) -> bool {
    Arc::ptr_eq(a, b) || a.as_ref() == b.as_ref()
}

/// Solves `G_dom (S ⊗ I) = R` for `S` column by column through the
/// strictness matrix of `G_dom`. Returns `(S, residual)`.
fn solve_gram_system<T: Real>(dom: &VeSpace<T>, rhs: &CMat<T>) -> Result<(CMat<T>, T)> {
    let m = dom.zsize();
    let d = dom.dim();
    let cols = rhs.ncols() / m.max(1);
    if d == 0 {
        return Ok((zeros(0, cols), T::zero()));
    }
    let a = linalg::strictness_matrix(dom.gram(), m);
    if linalg::rank(&a, null_threshold::<T>()) < d {
        return Err(Error::DegenerateGram);
    }
    let mut stacked = zeros::<T>(d * m * m, cols);
    for b in 0..cols {
        let blk = rhs.columns(b * m, m).into_owned();
        stacked.set_column(b, &linalg::vec_of(&blk));
    }
    let s = linalg::pinv(&a, null_threshold::<T>()) * &stacked;
    let residual = (&a * &s - &stacked).norm();
    Ok((s, residual))
}

impl<T: Real> AdjointableOp<T> {
    /// Finds the adjoint of `matrix: dom -> cod`, failing with
    /// `NotAdjointable` when no operator satisfies the adjoint identity to
    /// `tol * |T| * |G_cod|`.
    pub fn solve(
        matrix: CMat<T>,
        dom: Arc<VeSpace<T>>,
        cod: Arc<VeSpace<T>>,
        tol: T,
    ) -> Result<Self> {
        let (op, residual) = Self::solve_with_residual(matrix, dom, cod)?;
        if residual > tol && residual > T::zero() {
            return Err(Error::NotAdjointable {
                residual: crate::to_f64(residual),
            });
        }
        Ok(op)
    }

    /// Least-squares adjoint together with the residual of the adjoint
    /// identity relative to `|T| |G_cod|`. Fails only on shape errors or a
    /// degenerate domain gramian.
    pub fn solve_with_residual(
        matrix: CMat<T>,
        dom: Arc<VeSpace<T>>,
        cod: Arc<VeSpace<T>>,
    ) -> Result<(Self, T)> {
        if matrix.shape() != (cod.dim(), dom.dim()) {
            return Err(Error::ShapeMismatch(format!(
                "operator {:?} between spaces of dimension {} -> {}",
                matrix.shape(),
                dom.dim(),
                cod.dim()
            )));
        }
        if dom.z() != cod.z() {
            return Err(Error::DescriptorMismatch(format!(
                "{:?} vs {:?}",
                dom.z(),
                cod.z()
            )));
        }
        let m = dom.zsize();
        let rhs = kron_id(&matrix, m).adjoint() * cod.gram();
        let (adjoint, residual) = solve_gram_system(&dom, &rhs)?;
        let scale = (matrix.norm().max(T::one()) * cod.gram().norm()).max(crate::tiny::<T>());
        Ok((
            Self {
                domain: dom,
                codomain: cod,
                matrix,
                adjoint,
            },
            residual / scale,
        ))
    }

    /// Trusts the caller's adjoint. Use [`Self::adjoint_residual`] to check.
    pub fn from_parts(
        matrix: CMat<T>,
        adjoint: CMat<T>,
        dom: Arc<VeSpace<T>>,
        cod: Arc<VeSpace<T>>,
    ) -> Result<Self> {
        if matrix.shape() != (cod.dim(), dom.dim()) || adjoint.shape() != (dom.dim(), cod.dim()) {
            return Err(Error::ShapeMismatch("operator/adjoint shapes".into()));
        }
        Ok(Self {
            domain: dom,
            codomain: cod,
            matrix,
            adjoint,
        })
    }

    pub fn identity(space: Arc<VeSpace<T>>) -> Self {
        let d = space.dim();
        Self {
            domain: space.clone(),
            codomain: space,
            matrix: linalg::identity(d),
            adjoint: linalg::identity(d),
        }
    }

    pub fn zero(dom: Arc<VeSpace<T>>, cod: Arc<VeSpace<T>>) -> Self {
        Self {
            matrix: zeros(cod.dim(), dom.dim()),
            adjoint: zeros(dom.dim(), cod.dim()),
            domain: dom,
            codomain: cod,
        }
    }

    pub fn domain(&self) -> &Arc<VeSpace<T>> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<VeSpace<T>> {
        &self.codomain
    }

    pub fn matrix(&self) -> &CMat<T> {
        &self.matrix
    }

    pub fn adjoint_matrix(&self) -> &CMat<T> {
        &self.adjoint
    }

    pub fn adjoint(&self) -> Self {
        Self {
            domain: self.codomain.clone(),
            codomain: self.domain.clone(),
            matrix: self.adjoint.clone(),
            adjoint: self.matrix.clone(),
        }
    }

    pub fn apply(&self, x: &CVec<T>) -> Result<CVec<T>> {
        if x.len() != self.domain.dim() {
            return Err(Error::SpaceMismatch(format!(
                "vector of length {} for an operator on dimension {}",
                x.len(),
                self.domain.dim()
            )));
        }
        Ok(&self.matrix * x)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if !same_space(&other.codomain, &self.domain) {
            return Err(Error::SpaceMismatch("composition of incompatible operators".into()));
        }
        Ok(Self {
            domain: other.domain.clone(),
            codomain: self.codomain.clone(),
            matrix: &self.matrix * &other.matrix,
            adjoint: &other.adjoint * &self.adjoint,
        })
    }

    fn check_parallel(&self, other: &Self) -> Result<()> {
        if !same_space(&self.domain, &other.domain) || !same_space(&self.codomain, &other.codomain)
        {
            return Err(Error::SpaceMismatch("operators act between different spaces".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_parallel(other)?;
        Ok(Self {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            matrix: &self.matrix + &other.matrix,
            adjoint: &self.adjoint + &other.adjoint,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_parallel(other)?;
        Ok(Self {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            matrix: &self.matrix - &other.matrix,
            adjoint: &self.adjoint - &other.adjoint,
        })
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            matrix: &self.matrix * s,
            adjoint: &self.adjoint * s.conj(),
        }
    }

    /// `|(T ⊗ I)^H G_cod - G_dom (S ⊗ I)|` for the stored adjoint `S`.
    pub fn adjoint_residual(&self) -> T {
        let m = self.domain.zsize();
        let lhs = kron_id(&self.matrix, m).adjoint() * self.codomain.gram();
        let rhs = self.domain.gram() * kron_id(&self.adjoint, m);
        (lhs - rhs).norm()
    }

    pub fn is_endomorphism(&self) -> bool {
        same_space(&self.domain, &self.codomain)
    }

    pub fn selfadjoint_residual(&self) -> T {
        (&self.matrix - &self.adjoint).norm()
    }

    /// Residual of `T(e a) = T(e) a` over the matrix units, for operators
    /// between VE-modules.
    pub fn module_map_residual(&self) -> Result<T> {
        let (Some(da), Some(ca)) = (self.domain.module(), self.codomain.module()) else {
            return Err(Error::NotAModule);
        };
        if da.m != ca.m {
            return Err(Error::DescriptorMismatch("modules over different algebras".into()));
        }
        Ok(linalg::max_of(
            da.units
                .iter()
                .zip(&ca.units)
                .map(|(rd, rc)| (&self.matrix * rd - rc * &self.matrix).norm()),
        ))
    }
}

/// Which test produced a positivity verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormMode {
    Flattened,
    ElementarySampled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PositivityVerdict<T> {
    /// `[A e, e] >= 0` certified.
    Positive { mode: NormMode },
    /// A direction with `[A e, e]` outside the cone exists (or, for scalar
    /// `Z`, the flattened test failed, which is exact there).
    NotPositive { min_eigenvalue: T },
    /// Flattened test failed but sampling found no violation.
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositivityReport<T> {
    pub verdict: PositivityVerdict<T>,
    /// `|A - A*|`; positive operators are selfadjoint.
    pub selfadjoint_residual: T,
}

impl<T> PositivityReport<T> {
    pub fn is_positive(&self) -> bool {
        matches!(self.verdict, PositivityVerdict::Positive { .. })
    }
}

/// Number of random elementary directions used by sampled checks.
pub const ELEMENTARY_SAMPLES: usize = 256;

fn random_vector<T: Real>(rng: &mut ChaCha8Rng, d: usize) -> CVec<T> {
    CVec::from_fn(d, |_, _| {
        c(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0)
    })
}

/// Positivity `[A e, e] >= 0` of an endomorphism.
pub fn is_positive<T: Real>(a: &AdjointableOp<T>, tol: T, seed: u64) -> Result<PositivityReport<T>> {
    if !a.is_endomorphism() {
        return Err(Error::SpaceMismatch("positivity needs an endomorphism".into()));
    }
    let e = a.domain();
    let m = e.zsize();
    let selfadjoint_residual = a.selfadjoint_residual();
    let form = kron_id(a.matrix(), m).adjoint() * e.gram();
    let flat = linalg::psd_test(&form, tol);
    if flat.pass {
        return Ok(PositivityReport {
            verdict: PositivityVerdict::Positive {
                mode: NormMode::Flattened,
            },
            selfadjoint_residual,
        });
    }
    if m == 1 {
        return Ok(PositivityReport {
            verdict: PositivityVerdict::NotPositive {
                min_eigenvalue: flat.min_eigenvalue,
            },
            selfadjoint_residual,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..ELEMENTARY_SAMPLES {
        let x = random_vector::<T>(&mut rng, e.dim());
        let z = e.gramian(&(a.matrix() * &x), &x)?;
        if !z.in_cone(tol) {
            return Ok(PositivityReport {
                verdict: PositivityVerdict::NotPositive {
                    min_eigenvalue: linalg::min_eigenvalue(z.value()),
                },
                selfadjoint_residual,
            });
        }
    }
    Ok(PositivityReport {
        verdict: PositivityVerdict::Undetermined,
        selfadjoint_residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormBound {
    /// Equals the Loynes norm (scalar `Z`).
    Exact,
    /// Upper bound for the Loynes norm (flattened test over matrix `Z`).
    UpperBound,
    /// Lower estimate from sampled directions.
    LowerEstimate,
}

/// Smallest `mu` with `[A h, A h] <= mu [h, h]` for the tested `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpNormCertificate<T> {
    pub mu: T,
    pub mode: NormMode,
    pub bound: NormBound,
}

impl<T: Real> OpNormCertificate<T> {
    pub fn norm(&self) -> T {
        self.mu.sqrt()
    }
}

/// Largest generalised eigenvalue of the pencil `(b, g)` with `g` PSD.
/// `None` when `b` does not vanish on the null space of `g`.
fn pencil_max<T: Real>(b: &CMat<T>, g: &CMat<T>) -> Option<T> {
    let (u, lam) = linalg::positive_eigenspace(g, null_threshold::<T>());
    let n = g.nrows();
    let scale = b.norm().max(g.norm());
    if u.ncols() < n {
        let proj = linalg::identity::<T>(n) - &u * u.adjoint();
        if (b * &proj).norm() > lit::<T>(1e-9) * scale.max(T::one()) {
            return None;
        }
    }
    if u.ncols() == 0 {
        return Some(T::zero());
    }
    let inv_sqrt = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
        lam.len(),
        lam.iter().map(|&l| cr(T::one() / l.sqrt())),
    ));
    let w = &u * inv_sqrt;
    Some(linalg::max_eigenvalue(&(w.adjoint() * b * &w)).max(T::zero()))
}

/// Loynes norm certificate of `A: E -> F`.
pub fn loynes_norm<T: Real>(a: &AdjointableOp<T>) -> Result<OpNormCertificate<T>> {
    let e = a.domain();
    let f = a.codomain();
    let m = e.zsize();
    if e.dim() == 0 {
        return Ok(OpNormCertificate {
            mu: T::zero(),
            mode: NormMode::Flattened,
            bound: NormBound::Exact,
        });
    }
    if linalg::rank(&linalg::strictness_matrix(e.gram(), m), null_threshold::<T>()) < e.dim() {
        return Err(Error::DegenerateGram);
    }
    let ak = kron_id(a.matrix(), m);
    let b = ak.adjoint() * f.gram() * &ak;
    if let Some(mu) = pencil_max(&b, e.gram()) {
        return Ok(OpNormCertificate {
            mu,
            mode: NormMode::Flattened,
            bound: if m == 1 {
                NormBound::Exact
            } else {
                NormBound::UpperBound
            },
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut mu = T::zero();
    for _ in 0..ELEMENTARY_SAMPLES {
        let h = random_vector::<T>(&mut rng, e.dim());
        let hh = e.gramian(&h, &h)?;
        let ahah = f.gramian(&(a.matrix() * &h), &(a.matrix() * &h))?;
        match pencil_max(ahah.value(), hh.value()) {
            Some(v) => mu = mu.max(v),
            None => {
                mu = T::max_value().unwrap_or(mu);
                break;
            }
        }
    }
    Ok(OpNormCertificate {
        mu,
        mode: NormMode::ElementarySampled,
        bound: NormBound::LowerEstimate,
    })
}

/// Sandwich constants of a selfadjoint operator on a scalar-valued space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfadjointBounds<T> {
    /// Largest `m` with `m[h, h] <= [A h, h]`.
    pub lower: T,
    /// Smallest `M` with `[A h, h] <= M[h, h]`.
    pub upper: T,
    /// `max(|m|, |M|)`.
    pub norm: T,
    /// `sqrt(mu)` from [`loynes_norm`].
    pub loynes_norm: T,
    /// Smallest eigenvalue of `|A| G ∓ (A^H G)`, relative to `|G|`;
    /// nonnegative when the two-sided bound holds.
    pub sandwich_margin: T,
    pub pass: bool,
}

pub fn selfadjoint_bounds_check<T: Real>(
    a: &AdjointableOp<T>,
    tol: T,
) -> Result<SelfadjointBounds<T>> {
    if !a.is_endomorphism() {
        return Err(Error::SpaceMismatch("selfadjoint bounds need an endomorphism".into()));
    }
    let e = a.domain();
    if e.zsize() != 1 {
        return Err(Error::DescriptorMismatch(
            "exact norm bounds are computed for scalar-valued gramians".into(),
        ));
    }
    let sres = a.selfadjoint_residual();
    if sres > tol * a.matrix().norm().max(T::one()) {
        return Err(Error::NotSelfadjoint {
            residual: crate::to_f64(sres),
        });
    }
    let g = e.gram();
    let form = linalg::hermitian_part(&(a.matrix().adjoint() * g));
    if e.dim() == 0 {
        return Ok(SelfadjointBounds {
            lower: T::zero(),
            upper: T::zero(),
            norm: T::zero(),
            loynes_norm: T::zero(),
            sandwich_margin: T::zero(),
            pass: true,
        });
    }
    let (u, lam) = linalg::positive_eigenspace(g, null_threshold::<T>());
    let inv_sqrt = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
        lam.len(),
        lam.iter().map(|&l| cr(T::one() / l.sqrt())),
    ));
    let w = &u * inv_sqrt;
    let (vals, _) = linalg::eigh(&(w.adjoint() * &form * &w));
    let lower = vals[0];
    let upper = vals[vals.len() - 1];
    let norm = lower.abs().max(upper.abs());
    let loynes = loynes_norm(a)?.norm();
    let gn = cr(norm);
    let m1 = linalg::min_eigenvalue(&(g * gn - &form));
    let m2 = linalg::min_eigenvalue(&(g * gn + &form));
    let margin = m1.min(m2) / g.norm().max(crate::tiny::<T>());
    let scale = norm.max(T::one());
    let pass = margin >= -tol && (norm - loynes).abs() <= lit::<T>(1e3) * tol * scale;
    Ok(SelfadjointBounds {
        lower,
        upper,
        norm,
        loynes_norm: loynes,
        sandwich_margin: margin,
        pass,
    })
}

/// Block operator `[A_ij]` on `E^N` from an `N x N` array of operators on
/// `E`.
pub fn amplify<T: Real>(ops: &[Vec<AdjointableOp<T>>]) -> Result<AdjointableOp<T>> {
    let n = ops.len();
    if n == 0 || ops.iter().any(|row| row.len() != n) {
        return Err(Error::ShapeMismatch("amplify needs a square array".into()));
    }
    let e = ops[0][0].domain().clone();
    for op in ops.iter().flatten() {
        if !same_space(op.domain(), &e) || !same_space(op.codomain(), &e) {
            return Err(Error::ShapeMismatch("all entries must act on the same space".into()));
        }
    }
    let d = e.dim();
    let copies: Vec<VeSpace<T>> = (0..n).map(|_| e.as_ref().clone()).collect();
    let en = Arc::new(VeSpace::direct_sum(&copies)?);
    let mut matrix = zeros::<T>(n * d, n * d);
    let mut adjoint = zeros::<T>(n * d, n * d);
    for i in 0..n {
        for j in 0..n {
            matrix
                .view_mut((i * d, j * d), (d, d))
                .copy_from(ops[i][j].matrix());
            adjoint
                .view_mut((i * d, j * d), (d, d))
                .copy_from(ops[j][i].adjoint_matrix());
        }
    }
    Ok(AdjointableOp {
        domain: en.clone(),
        codomain: en,
        matrix,
        adjoint,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordered_space::Descriptor;

    fn m2(a: [f64; 4]) -> CMat<f64> {
        CMat::from_row_slice(2, 2, &a.map(|x| c(x, 0.)))
    }

    #[test]
    fn hilbert_adjoint_is_conjugate_transpose() {
        let e = Arc::new(VeSpace::<f64>::hilbert(2));
        let t = CMat::from_row_slice(2, 2, &[c(1., 2.), c(0., 1.), c(3., 0.), c(-1., -1.)]);
        let op = AdjointableOp::solve(t.clone(), e.clone(), e, 1e-9).unwrap();
        assert!((op.adjoint_matrix() - t.adjoint()).norm() < 1e-12);
    }

    #[test]
    fn identity_is_self_adjoint() {
        let e = Arc::new(VeSpace::<f64>::matrix_module(1, 2));
        let op = AdjointableOp::solve(linalg::identity(2), e.clone(), e, 1e-9).unwrap();
        assert!((op.adjoint_matrix() - linalg::identity::<f64>(2)).norm() < 1e-12);
    }

    #[test]
    fn weighted_adjoint_matches_hand_solution() {
        // G = diag(1, 2), T = [[0, 1], [0, 0]]: G S = T^H G gives S = [[0, 0], [1/2, 0]].
        let e = Arc::new(VeSpace::new(Descriptor::Scalar, m2([1., 0., 0., 2.]), 1e-9).unwrap());
        let op = AdjointableOp::solve(m2([0., 1., 0., 0.]), e.clone(), e, 1e-9).unwrap();
        assert!((op.adjoint_matrix() - m2([0., 0., 0.5, 0.])).norm() < 1e-12);
    }

    #[test]
    fn non_adjointable_operator_is_rejected() {
        // Over M_2 with the 1x2 row module, left scalar multiples are the
        // only adjointable maps; a coordinate swap is not one of them.
        let e = Arc::new(VeSpace::<f64>::matrix_module(1, 2));
        let swap = m2([0., 1., 1., 0.]);
        assert!(matches!(
            AdjointableOp::solve(swap, e.clone(), e, 1e-9),
            Err(Error::NotAdjointable { .. })
        ));
    }

    #[test]
    fn positivity_examples() {
        let e = Arc::new(VeSpace::<f64>::hilbert(3));
        let id = AdjointableOp::identity(e.clone());
        assert!(is_positive(&id, 1e-9, 0).unwrap().is_positive());
        let neg = id.scale(c(-1., 0.));
        assert!(!is_positive(&neg, 1e-9, 0).unwrap().is_positive());
        let t = CMat::from_row_slice(3, 3, &[c(1., 1.), c(0., 2.), c(1., 0.), c(0., 0.), c(2., -1.), c(1., 1.), c(3., 0.), c(0., 0.), c(0., 1.)]);
        let t = AdjointableOp::solve(t, e.clone(), e, 1e-9).unwrap();
        let tt = t.adjoint().compose(&t).unwrap();
        let r = is_positive(&tt, 1e-9, 0).unwrap();
        assert!(r.is_positive());
        assert!(r.selfadjoint_residual < 1e-12);
    }

    #[test]
    fn norm_examples() {
        let e = Arc::new(VeSpace::<f64>::hilbert(2));
        let id = AdjointableOp::identity(e.clone());
        assert!((loynes_norm(&id).unwrap().mu - 1.0).abs() < 1e-12);
        let two = id.scale(c(2., 0.));
        assert!((loynes_norm(&two).unwrap().mu - 4.0).abs() < 1e-12);
    }

    #[test]
    fn selfadjoint_bounds_of_diagonal() {
        let e = Arc::new(VeSpace::<f64>::hilbert(2));
        let a = AdjointableOp::solve(m2([-1., 0., 0., 3.]), e.clone(), e.clone(), 1e-9).unwrap();
        let b = selfadjoint_bounds_check(&a, 1e-9).unwrap();
        assert!((b.lower + 1.0).abs() < 1e-12);
        assert!((b.upper - 3.0).abs() < 1e-12);
        assert!((b.norm - 3.0).abs() < 1e-12);
        assert!(b.pass);
        let z = AdjointableOp::zero(e.clone(), e.clone());
        let b = selfadjoint_bounds_check(&z, 1e-9).unwrap();
        assert_eq!((b.lower, b.upper, b.norm), (0.0, 0.0, 0.0));
        let nsa = AdjointableOp::solve(m2([0., 1., 0., 0.]), e.clone(), e, 1e-9).unwrap();
        assert!(matches!(
            selfadjoint_bounds_check(&nsa, 1e-9),
            Err(Error::NotSelfadjoint { .. })
        ));
    }

    #[test]
    fn amplify_nilpotent_block() {
        let e = Arc::new(VeSpace::<f64>::hilbert(2));
        let i = AdjointableOp::identity(e.clone());
        let z = AdjointableOp::zero(e.clone(), e.clone());
        let a = amplify(&[vec![z.clone(), i.clone()], vec![z.clone(), z.clone()]]).unwrap();
        let mut expected = zeros::<f64>(4, 4);
        expected.view_mut((2, 0), (2, 2)).copy_from(&linalg::identity(2));
        assert_eq!(a.adjoint_matrix(), &expected);
        assert!(a.adjoint_residual() < 1e-14);
        let one = amplify(&[vec![i.clone()]]).unwrap();
        assert_eq!(one.matrix(), i.matrix());
    }
}
