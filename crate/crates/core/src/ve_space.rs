//! Finite-dimensional VE-spaces.
//!
//! A space of dimension `d` over `Z` (of matrix size `M`) is a coordinate
//! space `C^d` together with its Gram matrix `G_ij = [e_i, e_j]`, stored
//! flattened as a `(d*M) x (d*M)` complex matrix. For coefficient vectors
//! `x, y` the gramian is `[x, y] = (x ⊗ I_M)^H G (y ⊗ I_M)`, conjugate
//! linear in `x` and linear in `y`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{self, c, cr, kron_id, zeros};
use crate::ordered_space::{Descriptor, ZElement};
use crate::{lit, null_threshold, CMat, CVec, Error, Real, Result};

/// How positivity of a matrix-valued gramian is certified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CheckMode {
    /// The flattened `(d*M) x (d*M)` matrix is PSD. Sufficient, one
    /// eigendecomposition.
    #[default]
    Flattened,
    /// `[x, x]` is in the cone for the basis vectors and `samples` random
    /// coefficient vectors. Necessary-condition sampling only.
    Elementary { samples: usize, seed: u64 },
}

/// Right action of `MatrixAlg(m)` on the coordinates of a VE-module:
/// `units[s*m + t]` is the `d x d` matrix of `x ↦ x · E_st`.
#[derive(Debug, Clone, PartialEq)]
pub struct RightAction<T: Real> {
    pub m: usize,
    pub units: Vec<CMat<T>>,
}

impl<T: Real> RightAction<T> {
    /// Matrix of `x ↦ x · a`.
    pub fn matrix_of(&self, a: &CMat<T>) -> CMat<T> {
        let d = self.units.first().map(|u| u.nrows()).unwrap_or(0);
        let mut out = zeros::<T>(d, d);
        for s in 0..self.m {
            for t in 0..self.m {
                out += &self.units[s * self.m + t] * a[(s, t)];
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.units.first().map(|u| u.nrows()).unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VeSpace<T: Real> {
    z: Descriptor,
    dim: usize,
    gram: CMat<T>,
    module: Option<RightAction<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxiomCheck<T> {
    pub pass: bool,
    pub residual: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport<T: Real> {
    pub mode: CheckMode,
    /// `G_ij* = G_ji`.
    pub hermitian: AxiomCheck<T>,
    /// `[x, x] >= 0`. Residual is the most negative eigenvalue found,
    /// relative to the Gram norm (0 when none).
    pub positivity: AxiomCheck<T>,
    /// `[x, x] = 0` only for `x = 0`. Residual is the smallest singular
    /// value of the strictness matrix relative to the largest.
    pub strictness: AxiomCheck<T>,
    pub strictness_witness: Option<CVec<T>>,
    /// `[e, f a] = [e, f] a` on basis vectors and matrix units.
    pub module: Option<AxiomCheck<T>>,
}

impl<T: Real> AxiomReport<T> {
    pub fn all_pass(&self) -> bool {
        self.hermitian.pass
            && self.positivity.pass
            && self.strictness.pass
            && self.module.is_none_or(|m| m.pass)
    }
}

impl<T: Real> VeSpace<T> {
    /// Validated constructor: the Gram matrix must be Hermitian, positive
    /// (flattened test) and strict.
    pub fn new(z: Descriptor, gram: CMat<T>, tol: T) -> Result<Self> {
        let space = Self::from_gram_unchecked(z, gram)?;
        let report = space.check_axioms(tol, CheckMode::Flattened);
        if !report.hermitian.pass {
            return Err(Error::NotHermitian {
                residual: crate::to_f64(report.hermitian.residual),
            });
        }
        if !report.positivity.pass {
            return Err(Error::NotPsd {
                min_eigenvalue: -crate::to_f64(report.positivity.residual),
                witness: vec![],
            });
        }
        if !report.strictness.pass {
            return Err(Error::DegenerateGram);
        }
        Ok(space)
    }

    /// Shape checks only. Quotient-aware code uses this for Gram matrices
    /// that are known to be strict by construction.
    pub fn from_gram_unchecked(z: Descriptor, gram: CMat<T>) -> Result<Self> {
        z.validate()?;
        let m = z.size();
        let (r, cols) = gram.shape();
        if r != cols || r % m != 0 {
            return Err(Error::ShapeMismatch(format!(
                "gram of shape {r}x{cols} is not a multiple of Z size {m}"
            )));
        }
        let dim = r / m;
        if !z.is_dense() {
            for i in 0..dim {
                for j in 0..dim {
                    let b = linalg::block(&gram, i, j, m);
                    if (&b - z.mask(&b)).norm() > T::zero() {
                        return Err(Error::DescriptorMismatch(format!(
                            "gram block ({i},{j}) has entries outside the factor blocks"
                        )));
                    }
                }
            }
        }
        Ok(Self {
            z,
            dim,
            gram,
            module: None,
        })
    }

    /// `C^d` with the standard inner product.
    pub fn hilbert(d: usize) -> Self {
        Self {
            z: Descriptor::Scalar,
            dim: d,
            gram: linalg::identity(d),
            module: None,
        }
    }

    /// The `0`-dimensional space over `z`.
    pub fn zero_space(z: Descriptor) -> Self {
        Self {
            z,
            dim: 0,
            gram: zeros(0, 0),
            module: None,
        }
    }

    /// `q x m` complex matrices with `[a, b] = a* b` in `MatrixAlg(m)`, as a
    /// right module over `MatrixAlg(m)`. Coordinates: entry `(r, s)` has
    /// index `r*m + s`.
    pub fn matrix_module(q: usize, m: usize) -> Self {
        let d = q * m;
        let mut gram = zeros::<T>(d * m, d * m);
        for r in 0..q {
            for s in 0..m {
                for t in 0..m {
                    // [E_rs, E_rt] = E_st
                    let i = r * m + s;
                    let j = r * m + t;
                    gram[(i * m + s, j * m + t)] = cr(T::one());
                }
            }
        }
        let mut units = Vec::with_capacity(m * m);
        for u in 0..m {
            for v in 0..m {
                // (x E_uv)_{r v} = x_{r u}
                let mut a = zeros::<T>(d, d);
                for r in 0..q {
                    a[(r * m + v, r * m + u)] = cr(T::one());
                }
                units.push(a);
            }
        }
        Self {
            z: Descriptor::matrix_alg(m),
            dim: d,
            gram,
            module: Some(RightAction { m, units }),
        }
    }

    /// Attaches a right `MatrixAlg(m)` action; checks shapes and the module
    /// gramian identity.
    pub fn with_module(self, action: RightAction<T>, tol: T) -> Result<Self> {
        let out = self.with_module_unchecked(action)?;
        let res = out.module_residual()?;
        if res > tol * out.gram.norm().max(T::one()) {
            return Err(Error::ModuleViolation {
                what: "[e, f a] = [e, f] a".into(),
                residual: crate::to_f64(res),
            });
        }
        Ok(out)
    }

    /// Shape checks only; see [`Self::module_residual`].
    pub fn with_module_unchecked(mut self, action: RightAction<T>) -> Result<Self> {
        if self.z != Descriptor::matrix_alg(action.m) {
            return Err(Error::DescriptorMismatch(format!(
                "module over MatrixAlg({}) needs Z = MatrixAlg({})",
                action.m, action.m
            )));
        }
        if action.units.len() != action.m * action.m
            || action.units.iter().any(|u| u.shape() != (self.dim, self.dim))
        {
            return Err(Error::ShapeMismatch("module action matrices".into()));
        }
        self.module = Some(action);
        Ok(self)
    }

    pub fn z(&self) -> &Descriptor {
        &self.z
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Side length `M` of `Z` elements.
    pub fn zsize(&self) -> usize {
        self.z.size()
    }

    pub fn gram(&self) -> &CMat<T> {
        &self.gram
    }

    pub fn module(&self) -> Option<&RightAction<T>> {
        self.module.as_ref()
    }

    pub fn gram_block(&self, i: usize, j: usize) -> ZElement<T> {
        ZElement::from_masked(self.z.clone(), &linalg::block(&self.gram, i, j, self.zsize()))
    }

    fn check_len(&self, x: &CVec<T>) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::SpaceMismatch(format!(
                "vector of length {} in a space of dimension {}",
                x.len(),
                self.dim
            )));
        }
        Ok(())
    }

    /// `[x, y]` for coefficient vectors.
    pub fn gramian(&self, x: &CVec<T>, y: &CVec<T>) -> Result<ZElement<T>> {
        self.check_len(x)?;
        self.check_len(y)?;
        let m = self.zsize();
        let xm = kron_id(&CMat::from_column_slice(self.dim, 1, x.as_slice()), m);
        let ym = kron_id(&CMat::from_column_slice(self.dim, 1, y.as_slice()), m);
        Ok(ZElement::from_masked(
            self.z.clone(),
            &(xm.adjoint() * &self.gram * ym),
        ))
    }

    /// Gramian of the columns of two coefficient matrices, flattened:
    /// block `(a, b)` is `[X e_a, Y e_b]`.
    pub fn gram_of(&self, x: &CMat<T>, y: &CMat<T>) -> CMat<T> {
        let m = self.zsize();
        kron_id(x, m).adjoint() * &self.gram * kron_id(y, m)
    }

    pub fn check_axioms(&self, tol: T, mode: CheckMode) -> AxiomReport<T> {
        let scale = self.gram.norm();
        let herm = linalg::hermitian_residual(&self.gram);
        let hermitian = AxiomCheck {
            pass: herm <= tol * scale,
            residual: herm,
        };

        let positivity = match mode {
            CheckMode::Flattened => {
                let t = linalg::psd_test(&self.gram, tol);
                let rel = if scale > T::zero() {
                    (-t.min_eigenvalue / scale).max(T::zero())
                } else {
                    T::zero()
                };
                AxiomCheck {
                    pass: t.pass,
                    residual: rel,
                }
            }
            CheckMode::Elementary { samples, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut worst = T::zero();
                let mut ok = true;
                let mut probe = |x: CVec<T>| {
                    let z = self.gramian(&x, &x).expect("length matches");
                    if !z.in_cone(tol) {
                        ok = false;
                    }
                    let ev = linalg::min_eigenvalue(z.value());
                    let rel = if scale > T::zero() { -ev / scale } else { T::zero() };
                    if rel > worst {
                        worst = rel;
                    }
                };
                for i in 0..self.dim {
                    let mut e = CVec::<T>::zeros(self.dim);
                    e[i] = cr(T::one());
                    probe(e);
                }
                for _ in 0..samples {
                    let x = CVec::<T>::from_fn(self.dim, |_, _| {
                        c(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0)
                    });
                    probe(x);
                }
                AxiomCheck {
                    pass: ok,
                    residual: worst,
                }
            }
        };

        let (strictness, strictness_witness) = self.strictness(tol);
        let module = self.module.as_ref().map(|_| {
            let r = self.module_residual().unwrap_or(T::max_value().unwrap_or(T::one()));
            AxiomCheck {
                pass: r <= tol * scale.max(T::one()),
                residual: r,
            }
        });
        AxiomReport {
            mode,
            hermitian,
            positivity,
            strictness,
            strictness_witness,
            module,
        }
    }

    /// A nonzero `x` with `x ⊗ C^M` inside the null space of the flattened
    /// Gram matrix violates strictness.
    fn strictness(&self, tol: T) -> (AxiomCheck<T>, Option<CVec<T>>) {
        if self.dim == 0 {
            return (
                AxiomCheck {
                    pass: true,
                    residual: T::one(),
                },
                None,
            );
        }
        let a = linalg::strictness_matrix(&self.gram, self.zsize());
        let svd = linalg::full_svd(&a);
        let smax = svd.singular_values[0];
        let smin = *svd.singular_values.last().expect("dim > 0");
        let rel = if smax > T::zero() { smin / smax } else { T::zero() };
        let threshold = tol.max(null_threshold::<T>());
        if rel <= threshold {
            let w = svd.v.column(self.dim - 1).into_owned();
            (
                AxiomCheck {
                    pass: false,
                    residual: rel,
                },
                Some(w),
            )
        } else {
            (
                AxiomCheck {
                    pass: true,
                    residual: rel,
                },
                None,
            )
        }
    }

    /// `|4[x, y] - sum_k i^k [i^k x + y, i^k x + y]|`.
    ///
    /// With the gramian linear in its second argument this is the
    /// polarisation identity that recovers `[x, y]` from the quadratic map.
    pub fn polarisation_residual(&self, x: &CVec<T>, y: &CVec<T>) -> Result<T> {
        let lhs = self.gramian(x, y)?.scale_real(lit(4.0));
        let mut rhs = ZElement::zero(self.z.clone());
        let mut ik = cr(T::one());
        let i = c::<T>(0.0, 1.0);
        for _ in 0..4 {
            let v = x * ik + y;
            rhs = rhs.add(&self.gramian(&v, &v)?.scale(ik))?;
            ik *= i;
        }
        Ok(lhs.sub(&rhs)?.norm())
    }

    /// Same identity for an arbitrary Hermitian flattened pairing (not
    /// necessarily positive).
    pub fn polarisation_residual_for_pairing(
        pairing: &CMat<T>,
        m: usize,
        x: &CVec<T>,
        y: &CVec<T>,
    ) -> T {
        let d = x.len();
        let form = |u: &CVec<T>, v: &CVec<T>| {
            let um = kron_id(&CMat::from_column_slice(d, 1, u.as_slice()), m);
            let vm = kron_id(&CMat::from_column_slice(d, 1, v.as_slice()), m);
            um.adjoint() * pairing * vm
        };
        let lhs = form(x, y) * cr(lit::<T>(4.0));
        let mut rhs = zeros::<T>(m, m);
        let mut ik = cr(T::one());
        for _ in 0..4 {
            let v = x * ik + y;
            rhs += form(&v, &v) * ik;
            ik *= c::<T>(0.0, 1.0);
        }
        (lhs - rhs).norm()
    }

    /// Orthogonal direct sum `E_1 ⊕ ... ⊕ E_k`.
    pub fn direct_sum(spaces: &[VeSpace<T>]) -> Result<Self> {
        let Some(first) = spaces.first() else {
            return Err(Error::ShapeMismatch("direct sum of no spaces".into()));
        };
        if let Some(s) = spaces.iter().find(|s| s.z != first.z) {
            return Err(Error::DescriptorMismatch(format!(
                "{:?} vs {:?}",
                first.z, s.z
            )));
        }
        let grams: Vec<CMat<T>> = spaces.iter().map(|s| s.gram.clone()).collect();
        let dim = spaces.iter().map(|s| s.dim).sum();
        let module = if spaces.iter().all(|s| s.module.is_some()) {
            let m = first.module.as_ref().expect("checked").m;
            if spaces.iter().all(|s| s.module.as_ref().is_some_and(|a| a.m == m)) {
                let units = (0..m * m)
                    .map(|u| {
                        let parts: Vec<CMat<T>> = spaces
                            .iter()
                            .map(|s| s.module.as_ref().expect("checked").units[u].clone())
                            .collect();
                        linalg::block_diag(&parts)
                    })
                    .collect();
                Some(RightAction { m, units })
            } else {
                None
            }
        } else {
            None
        };
        Ok(Self {
            z: first.z.clone(),
            dim,
            gram: linalg::block_diag(&grams),
            module,
        })
    }

    /// `C^n ⊗ E` with the standard inner product on `C^n`.
    pub fn tensor_with_ip_space(n: usize, e: &VeSpace<T>) -> Self {
        Self::tensor_with_inner_product(&linalg::identity(n), e)
    }

    /// `C^n ⊗ E` where `C^n` carries the inner product `<h, l> = h^H P l`.
    /// Basis `e_i ⊗ h_a` has index `i*n + a`, so that
    /// `[h ⊗ e, l ⊗ f] = <h, l> [e, f]`.
    pub fn tensor_with_inner_product(p: &CMat<T>, e: &VeSpace<T>) -> Self {
        let n = p.nrows();
        let m = e.zsize();
        let dim = n * e.dim;
        let mut gram = zeros::<T>(dim * m, dim * m);
        for i in 0..e.dim {
            for j in 0..e.dim {
                let g = linalg::block(&e.gram, i, j, m);
                for a in 0..n {
                    for b in 0..n {
                        let blk = &g * p[(a, b)];
                        linalg::set_block(&mut gram, i * n + a, j * n + b, &blk);
                    }
                }
            }
        }
        let module = e.module.as_ref().map(|act| RightAction {
            m: act.m,
            units: act
                .units
                .iter()
                .map(|u| u.kronecker(&linalg::identity::<T>(n)))
                .collect(),
        });
        Self {
            z: e.z.clone(),
            dim,
            gram,
            module,
        }
    }

    /// `x · a` for a VE-module over `MatrixAlg(m)`.
    pub fn module_action(&self, x: &CVec<T>, a: &ZElement<T>) -> Result<CVec<T>> {
        let act = self.module.as_ref().ok_or(Error::NotAModule)?;
        self.check_len(x)?;
        if a.descriptor() != &Descriptor::matrix_alg(act.m) {
            return Err(Error::DescriptorMismatch(format!(
                "module over MatrixAlg({}) acted on by {:?}",
                act.m,
                a.descriptor()
            )));
        }
        Ok(act.matrix_of(a.value()) * x)
    }

    /// `max_a |G (R(a) ⊗ I) - G (I ⊗ a)|` over matrix units `a`, i.e. the
    /// residual of `[e, f a] = [e, f] a` on all basis pairs.
    pub fn module_residual(&self) -> Result<T> {
        let act = self.module.as_ref().ok_or(Error::NotAModule)?;
        let m = act.m;
        let mut worst = T::zero();
        for s in 0..m {
            for t in 0..m {
                let mut a = zeros::<T>(m, m);
                a[(s, t)] = cr(T::one());
                let lhs = &self.gram * kron_id(&act.units[s * m + t], m);
                let rhs = &self.gram * linalg::id_kron(self.dim, &a);
                let r = (lhs - rhs).norm();
                if r > worst {
                    worst = r;
                }
            }
        }
        Ok(worst)
    }

    /// A copy of this space with its coordinates changed by the invertible
    /// matrix `s` (new basis vectors are the columns of `s`).
    pub fn rebased(&self, s: &CMat<T>) -> Self {
        let m = self.zsize();
        let sk = kron_id(s, m);
        let gram = sk.adjoint() * &self.gram * &sk;
        let sinv = s.clone().try_inverse().unwrap_or_else(|| linalg::pinv(s, lit(1e-14)));
        let module = self.module.as_ref().map(|act| RightAction {
            m: act.m,
            units: act.units.iter().map(|u| &sinv * u * s).collect(),
        });
        Self {
            z: self.z.clone(),
            dim: s.ncols(),
            gram,
            module,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn vec2(a: (f64, f64), b: (f64, f64)) -> CVec<f64> {
        CVec::from_vec(vec![c(a.0, a.1), c(b.0, b.1)])
    }

    #[test]
    fn hilbert_basis_gramian() {
        let e = VeSpace::<f64>::hilbert(3);
        let mut e1 = CVec::zeros(3);
        e1[0] = c(1., 0.);
        assert_eq!(e.gramian(&e1, &e1).unwrap().value()[(0, 0)], c(1., 0.));
        assert!(matches!(
            e.gramian(&e1, &CVec::zeros(2)),
            Err(Error::SpaceMismatch(_))
        ));
    }

    #[test]
    fn identity_gram_passes_axioms() {
        let e = VeSpace::<f64>::hilbert(4);
        assert!(e.check_axioms(1e-9, CheckMode::Flattened).all_pass());
    }

    #[test]
    fn non_hermitian_gram_fails() {
        let g = CMat::from_row_slice(2, 2, &[c(1., 0.), c(0.5, 0.), c(0.2, 0.), c(1., 0.)]);
        let e = VeSpace::<f64>::from_gram_unchecked(Descriptor::Scalar, g).unwrap();
        let r = e.check_axioms(1e-9, CheckMode::Flattened);
        assert!(!r.hermitian.pass);
    }

    #[test]
    fn rank_deficient_gram_fails_strictness_with_witness() {
        let g = CMat::from_row_slice(2, 2, &[c(1., 0.), c(1., 0.), c(1., 0.), c(1., 0.)]);
        let e = VeSpace::<f64>::from_gram_unchecked(Descriptor::Scalar, g.clone()).unwrap();
        let r = e.check_axioms(1e-9, CheckMode::Flattened);
        assert!(r.hermitian.pass && r.positivity.pass);
        assert!(!r.strictness.pass);
        let w = r.strictness_witness.unwrap();
        // proportional to (1, -1)
        assert!((w[0] + w[1]).norm() < 1e-12);
        assert!(w[0].norm() > 0.5);
        assert!(matches!(
            VeSpace::new(Descriptor::Scalar, g, 1e-9),
            Err(Error::DegenerateGram)
        ));
    }

    #[test]
    fn polarisation_trivial_cases() {
        let e = VeSpace::<f64>::hilbert(2);
        let x = vec2((1., 2.), (0., -1.));
        assert!(e.polarisation_residual(&x, &x).unwrap() < 1e-12);
        let a = vec2((1., 0.), (0., 0.));
        let b = vec2((0., 0.), (3., 1.));
        assert!(e.gramian(&a, &b).unwrap().norm() < 1e-15);
        assert!(e.polarisation_residual(&a, &b).unwrap() < 1e-12);
    }

    #[test]
    fn direct_sum_examples() {
        let one = VeSpace::<f64>::hilbert(1);
        let s = VeSpace::direct_sum(&[one.clone(), one.clone()]).unwrap();
        assert_eq!(s.gram(), &linalg::identity::<f64>(2));
        let e = VeSpace::<f64>::matrix_module(1, 2);
        let z = VeSpace::zero_space(e.z().clone());
        let s = VeSpace::direct_sum(&[e.clone(), z]).unwrap();
        assert_eq!(s.gram(), e.gram());
        assert!(matches!(
            VeSpace::direct_sum(&[one, e]),
            Err(Error::DescriptorMismatch(_))
        ));
    }

    #[test]
    fn tensor_with_one_dimensional_space_is_a_copy() {
        let e = VeSpace::<f64>::matrix_module(1, 2);
        let t = VeSpace::tensor_with_ip_space(1, &e);
        assert_eq!(t.gram(), e.gram());
    }

    #[test]
    fn matrix_module_reproduces_adjoint_product() {
        let h = VeSpace::<f64>::matrix_module(2, 2);
        assert!(h.check_axioms(1e-9, CheckMode::Flattened).all_pass());
        // a = [[1, i], [2, 0]], b = [[0, 1], [1, -1]]
        let a = CMat::from_row_slice(2, 2, &[c(1., 0.), c(0., 1.), c(2., 0.), c(0., 0.)]);
        let b = CMat::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(-1., 0.)]);
        let coords = |m: &CMat<f64>| CVec::from_iterator(4, (0..2).flat_map(|r| (0..2).map(move |s| (r, s))).map(|(r, s)| m[(r, s)]));
        let g = h.gramian(&coords(&a), &coords(&b)).unwrap();
        assert!((g.value() - a.adjoint() * &b).norm() < 1e-14);
    }

    #[test]
    fn module_action_examples() {
        let h = VeSpace::<f64>::matrix_module(2, 2);
        let x = CVec::from_vec(vec![c(1., 0.), c(2., 1.), c(0., -1.), c(3., 0.)]);
        let id = ZElement::unit(Descriptor::matrix_alg(2));
        assert_eq!(h.module_action(&x, &id).unwrap(), x);
        let zero = ZElement::zero(Descriptor::matrix_alg(2));
        assert_eq!(h.module_action(&x, &zero).unwrap(), CVec::zeros(4));
        let plain = VeSpace::<f64>::hilbert(2);
        assert!(matches!(
            plain.module_action(&CVec::zeros(2), &id),
            Err(Error::NotAModule)
        ));
        assert!(h.module_residual().unwrap() < 1e-14);
    }

    #[test]
    fn elementary_mode_agrees_on_module_space() {
        let h = VeSpace::<f64>::matrix_module(1, 2);
        let r = h.check_axioms(1e-9, CheckMode::Elementary { samples: 64, seed: 7 });
        assert!(r.all_pass());
    }
}
