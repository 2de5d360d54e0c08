use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::kernels::{OperatorKernel, PositivityTest};
use crate::linalg::{self, c, cr, kron_id, zeros};
use crate::linearise::{Quotient, RealisationView};
use crate::operators::{amplify, AdjointableOp};
use crate::ordered_space::Descriptor;
use crate::ve_space::VeSpace;
use crate::{lit, null_threshold, to_f64, CMat, CVec, Error, Real, Result, C};

/// A finite-dimensional *-algebra in a fixed basis `e_0, .., e_{p-1}`.
///
/// `mult[a*p + b]` holds the coordinates of `e_a e_b`; column `a` of `star`
/// holds those of `e_a*`, extended conjugate-linearly.
#[derive(Debug, Clone, PartialEq)]
pub struct FinStarAlgebra<T: Real> {
    names: Vec<String>,
    mult: Vec<CVec<T>>,
    star: CMat<T>,
    unit: Option<CVec<T>>,
    /// For matrix algebras: side length and the matrix unit `(row, col)`
    /// of each basis element.
    matrix_units: Option<(usize, Vec<(usize, usize)>)>,
}

impl<T: Real> FinStarAlgebra<T> {
    pub fn new(
        names: Vec<String>,
        mult: Vec<CVec<T>>,
        star: CMat<T>,
        unit: Option<CVec<T>>,
    ) -> Result<Self> {
        let p = names.len();
        if p == 0 {
            return Err(Error::ShapeMismatch("algebra of dimension 0".into()));
        }
        if mult.len() != p * p || mult.iter().any(|v| v.len() != p) {
            return Err(Error::ShapeMismatch("structure constants are not p x p x p".into()));
        }
        if star.shape() != (p, p) {
            return Err(Error::ShapeMismatch("star matrix is not p x p".into()));
        }
        if unit.as_ref().is_some_and(|u| u.len() != p) {
            return Err(Error::ShapeMismatch("unit coordinates".into()));
        }
        Ok(Self {
            names,
            mult,
            star,
            unit,
            matrix_units: None,
        })
    }

    /// `M_m(C)` with basis `E_ij` at index `i*m + j`.
    pub fn matrix_algebra(m: usize) -> Self {
        let p = m * m;
        let mut mult = vec![CVec::zeros(p); p * p];
        let mut star = zeros::<T>(p, p);
        let mut unit = CVec::zeros(p);
        for i in 0..m {
            unit[i * m + i] = cr(T::one());
            for j in 0..m {
                star[(j * m + i, i * m + j)] = cr(T::one());
                for l in 0..m {
                    // E_ij E_jl = E_il
                    mult[(i * m + j) * p + (j * m + l)][i * m + l] = cr(T::one());
                }
            }
        }
        let names = (0..p).map(|a| format!("E{}_{}", a / m, a % m)).collect();
        let units = (0..p).map(|a| (a / m, a % m)).collect();
        Self {
            names,
            mult,
            star,
            unit: Some(unit),
            matrix_units: Some((m, units)),
        }
    }

    /// `C` as a one-dimensional algebra.
    pub fn complex_numbers() -> Self {
        Self::matrix_algebra(1)
    }

    /// `M_n(A)` with basis `E_ij ⊗ e_a` at index `(i*n + j)*p + a`.
    pub fn matrices_over(&self, n: usize) -> Self {
        let p = self.dim();
        let q = n * n * p;
        let idx = |i: usize, j: usize, a: usize| (i * n + j) * p + a;
        let mut mult = vec![CVec::zeros(q); q * q];
        let mut star = zeros::<T>(q, q);
        for i in 0..n {
            for j in 0..n {
                for a in 0..p {
                    for k in 0..p {
                        star[(idx(j, i, k), idx(i, j, a))] = self.star[(k, a)];
                    }
                    for l in 0..n {
                        for b in 0..p {
                            let prod = &self.mult[a * p + b];
                            let out = &mut mult[idx(i, j, a) * q + idx(j, l, b)];
                            for k in 0..p {
                                out[idx(i, l, k)] = prod[k];
                            }
                        }
                    }
                }
            }
        }
        let unit = self.unit.as_ref().map(|u| {
            let mut v = CVec::zeros(q);
            for i in 0..n {
                for a in 0..p {
                    v[idx(i, i, a)] = u[a];
                }
            }
            v
        });
        let names = (0..q)
            .map(|b| {
                let (ij, a) = (b / p, b % p);
                format!("m{}_{}:{}", ij / n, ij % n, self.names[a])
            })
            .collect();
        let matrix_units = self.matrix_units.as_ref().map(|(s, units)| {
            let all = (0..q)
                .map(|b| {
                    let (ij, a) = (b / p, b % p);
                    let (r, c) = units[a];
                    ((ij / n) * s + r, (ij % n) * s + c)
                })
                .collect();
            (n * s, all)
        });
        Self {
            names,
            mult,
            star,
            unit,
            matrix_units,
        }
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn unit(&self) -> Option<&CVec<T>> {
        self.unit.as_ref()
    }

    pub fn star_matrix(&self) -> &CMat<T> {
        &self.star
    }

    /// Coordinates of `e_a e_b`.
    pub fn structure(&self, a: usize, b: usize) -> &CVec<T> {
        &self.mult[a * self.dim() + b]
    }

    pub fn matrix_size(&self) -> Option<usize> {
        self.matrix_units.as_ref().map(|(s, _)| *s)
    }

    pub fn basis_vec(&self, a: usize) -> CVec<T> {
        let mut v = CVec::zeros(self.dim());
        v[a] = cr(T::one());
        v
    }

    /// Matrix of `y -> x y` on coordinates.
    pub fn left_mult(&self, x: &CVec<T>) -> CMat<T> {
        let p = self.dim();
        let mut l = zeros::<T>(p, p);
        for a in 0..p {
            if x[a] == C::new(T::zero(), T::zero()) {
                continue;
            }
            for b in 0..p {
                let col = self.structure(a, b) * x[a];
                let mut target = l.column_mut(b);
                target += &col;
            }
        }
        l
    }

    pub fn mul(&self, x: &CVec<T>, y: &CVec<T>) -> CVec<T> {
        self.left_mult(x) * y
    }

    pub fn star_of(&self, x: &CVec<T>) -> CVec<T> {
        &self.star * x.map(|z| z.conj())
    }

    /// Coordinates of a matrix in a matrix algebra.
    pub fn coords_of_matrix(&self, a: &CMat<T>) -> Result<CVec<T>> {
        let (s, units) = self
            .matrix_units
            .as_ref()
            .ok_or_else(|| Error::Schema("algebra has no matrix model".into()))?;
        if a.shape() != (*s, *s) {
            return Err(Error::ShapeMismatch(format!("expected a {s}x{s} matrix")));
        }
        Ok(CVec::from_iterator(units.len(), units.iter().map(|&(r, c)| a[(r, c)])))
    }

    pub fn matrix_of(&self, x: &CVec<T>) -> Result<CMat<T>> {
        let (s, units) = self
            .matrix_units
            .as_ref()
            .ok_or_else(|| Error::Schema("algebra has no matrix model".into()))?;
        let mut m = zeros::<T>(*s, *s);
        for (b, &(r, c)) in units.iter().enumerate() {
            m[(r, c)] += x[b];
        }
        Ok(m)
    }

    /// Associativity, involution and unit laws on basis elements, up to
    /// `tol` relative to the largest structure constant.
    pub fn validate(&self, tol: T) -> Result<()> {
        let p = self.dim();
        let scale = linalg::max_of(self.mult.iter().map(|v| v.norm())).max(T::one());
        let bad = |r: T| r > tol * scale * scale;
        let ls: Vec<CMat<T>> = (0..p).map(|a| self.left_mult(&self.basis_vec(a))).collect();
        for a in 0..p {
            for b in 0..p {
                let ab = self.structure(a, b);
                for cc in 0..p {
                    let lhs = self.mul(ab, &self.basis_vec(cc));
                    let rhs = &ls[a] * self.structure(b, cc);
                    let r = (lhs - rhs).norm();
                    if bad(r) {
                        return Err(Error::NonAssociative(format!(
                            "(e{a} e{b}) e{cc} != e{a} (e{b} e{cc}), residual {:.3e}",
                            to_f64(r)
                        )));
                    }
                }
                let lhs = self.star_of(ab);
                let rhs = self.mul(&self.star_of(&self.basis_vec(b)), &self.star_of(&self.basis_vec(a)));
                let r = (lhs - rhs).norm();
                if bad(r) {
                    return Err(Error::NonAssociative(format!(
                        "(e{a} e{b})* != e{b}* e{a}*, residual {:.3e}",
                        to_f64(r)
                    )));
                }
            }
            let e = self.basis_vec(a);
            let r = (self.star_of(&self.star_of(&e)) - &e).norm();
            if bad(r) {
                return Err(Error::NonAssociative(format!("e{a}** != e{a}")));
            }
        }
        if let Some(u) = &self.unit {
            for a in 0..p {
                let e = self.basis_vec(a);
                let r = (self.mul(u, &e) - &e).norm() + (self.mul(&e, u) - &e).norm();
                if bad(r) {
                    return Err(Error::NonAssociative(format!("unit law fails at e{a}")));
                }
            }
            if bad((self.star_of(u) - u).norm()) {
                return Err(Error::NonAssociative("unit is not selfadjoint".into()));
            }
        }
        Ok(())
    }
}

/// A linear map `phi: A -> L*(H)` given on the basis.
#[derive(Debug, Clone)]
pub struct LinearMap<T: Real> {
    algebra: Arc<FinStarAlgebra<T>>,
    h: Arc<VeSpace<T>>,
    values: Vec<AdjointableOp<T>>,
}

/// Result of testing `phi_n` on rank-one projections.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplificationTest<T: Real> {
    pub pass: bool,
    /// Smallest eigenvalue of `G phi_n(P)` over the tested `P`, relative to
    /// its norm.
    pub min_eigenvalue: T,
    /// Input attaining `min_eigenvalue`.
    pub witness: CMat<T>,
}

impl<T: Real> LinearMap<T> {
    pub fn new(
        algebra: Arc<FinStarAlgebra<T>>,
        h: Arc<VeSpace<T>>,
        values: Vec<CMat<T>>,
        tol: T,
    ) -> Result<Self> {
        if values.len() != algebra.dim() {
            return Err(Error::ShapeMismatch("one value per basis element".into()));
        }
        let values = values
            .into_iter()
            .map(|m| AdjointableOp::solve(m, h.clone(), h.clone(), tol))
            .collect::<Result<_>>()?;
        Ok(Self { algebra, h, values })
    }

    pub fn algebra(&self) -> &Arc<FinStarAlgebra<T>> {
        &self.algebra
    }

    pub fn h(&self) -> &Arc<VeSpace<T>> {
        &self.h
    }

    pub fn value(&self, a: usize) -> &AdjointableOp<T> {
        &self.values[a]
    }

    pub fn op_of(&self, x: &CVec<T>) -> Result<AdjointableOp<T>> {
        let mut acc = AdjointableOp::zero(self.h.clone(), self.h.clone());
        for (a, v) in self.values.iter().enumerate() {
            if x[a] != C::new(T::zero(), T::zero()) {
                acc = acc.add(&v.scale(x[a]))?;
            }
        }
        Ok(acc)
    }

    pub fn apply(&self, x: &CVec<T>) -> CMat<T> {
        let d = self.h.dim();
        self.values
            .iter()
            .enumerate()
            .fold(zeros::<T>(d, d), |acc, (a, v)| acc + v.matrix() * x[a])
    }

    pub fn apply_matrix(&self, a: &CMat<T>) -> Result<CMat<T>> {
        Ok(self.apply(&self.algebra.coords_of_matrix(a)?))
    }

    /// `k(a, b) = phi(e_a* e_b)` on the basis.
    pub fn kernel(&self) -> Result<OperatorKernel<T>> {
        let alg = &self.algebra;
        let p = alg.dim();
        let blocks = (0..p * p)
            .map(|i| {
                let x = alg.mul(&alg.star_of(&alg.basis_vec(i / p)), &alg.basis_vec(i % p));
                self.op_of(&x)
            })
            .collect::<Result<Vec<_>>>()?;
        OperatorKernel::from_ops(alg.names().to_vec(), self.h.clone(), blocks)
    }

    /// `sum_ij [phi(a_i* a_j) h_j, h_i] >= 0` for all finite families; by
    /// sesquilinearity this is the flattened test on the basis kernel.
    pub fn is_psd(&self, tol: T) -> Result<PositivityTest<T>> {
        Ok(self.kernel()?.positive_semidefinite(tol))
    }

    /// `sum_b E_{r_b c_b} ⊗ phi(e_b)` for matrix algebras.
    pub fn choi_matrix(&self) -> Result<CMat<T>> {
        let (s, units) = self
            .algebra
            .matrix_units
            .as_ref()
            .ok_or_else(|| Error::Schema("algebra has no matrix model".into()))?;
        let d = self.h.dim();
        let mut out = zeros::<T>(s * d, s * d);
        for (b, &(r, c)) in units.iter().enumerate() {
            let mut blk = out.view_mut((r * d, c * d), (d, d));
            blk += self.values[b].matrix();
        }
        Ok(out)
    }

    /// Complete positivity of a map on a matrix algebra into a scalar-valued
    /// space: `(I ⊗ G_H)` times the Choi matrix is positive semidefinite.
    pub fn is_completely_positive(&self, tol: T) -> Result<bool> {
        if self.h.z() != &Descriptor::Scalar {
            return Err(Error::DescriptorMismatch("complete positivity needs scalar Z".into()));
        }
        let s = self.algebra.matrix_size().unwrap_or(0);
        let g = linalg::id_kron(s, self.h.gram());
        Ok(linalg::psd_test(&(g * self.choi_matrix()?), tol).pass)
    }

    pub fn stinespring_dilate(&self, tol: T) -> Result<AlgebraDilation<T>> {
        self.algebra.validate(lit(1e-9))?;
        let k = self.kernel()?;
        let psd = k.positive_semidefinite(tol);
        if !psd.pass {
            return Err(Error::NotPsd {
                min_eigenvalue: to_f64(psd.min_eigenvalue),
                witness: psd.witness,
            });
        }
        let d = self.h.dim();
        let p = self.algebra.dim();
        let q = Quotient::new(self.h.z().clone(), &k.generator_gram())?;
        let cm = q.coords();
        let id = linalg::identity::<T>(d);
        let v_mats: Vec<CMat<T>> = (0..p).map(|a| cm.columns(a * d, d).into_owned()).collect();
        let pi_mats = (0..p)
            .map(|a| {
                let l = self.algebra.left_mult(&self.algebra.basis_vec(a));
                q.descend(&l.kronecker(&id))
            })
            .collect::<Result<Vec<_>>>()?;
        let w_mat = self.algebra.unit().map(|u| {
            let col = CMat::from_column_slice(p, 1, u.as_slice());
            cm * col.kronecker(&id)
        });
        let k_space = q.space().clone();
        let report = verify_algebra_parts(self, &k_space, &v_mats, &pi_mats, w_mat.as_ref(), tol)?;
        if !report.pass {
            return Err(Error::VerificationFailed(format!(
                "algebra dilation residual {:.3e} (minimal: {})",
                to_f64(report.max_residual()),
                report.minimal
            )));
        }
        let solve = |m: CMat<T>, dom: &Arc<VeSpace<T>>, cod: &Arc<VeSpace<T>>| {
            AdjointableOp::solve_with_residual(m, dom.clone(), cod.clone()).map(|r| r.0)
        };
        let v = v_mats
            .into_iter()
            .map(|m| solve(m, &self.h, &k_space))
            .collect::<Result<_>>()?;
        let pi = pi_mats
            .into_iter()
            .map(|m| solve(m, &k_space, &k_space))
            .collect::<Result<_>>()?;
        let w = w_mat.map(|m| solve(m, &self.h, &k_space)).transpose()?;
        Ok(AlgebraDilation {
            map: self.clone(),
            quotient: q,
            k_space,
            v,
            pi,
            w,
            report,
        })
    }
}

/// `phi_n([a_ij]) = [phi(a_ij)]` on `M_n(A)`, valued in operators on `H^n`.
pub fn amplification<T: Real>(phi: &LinearMap<T>, n: usize) -> Result<LinearMap<T>> {
    if n == 0 {
        return Err(Error::ShapeMismatch("amplification order 0".into()));
    }
    let alg = Arc::new(phi.algebra.matrices_over(n));
    let p = phi.algebra.dim();
    let zero = AdjointableOp::zero(phi.h.clone(), phi.h.clone());
    let mut hn: Option<Arc<VeSpace<T>>> = None;
    let mut values = Vec::with_capacity(alg.dim());
    for b in 0..alg.dim() {
        let (ij, a) = (b / p, b % p);
        let (i, j) = (ij / n, ij % n);
        let ops: Vec<Vec<AdjointableOp<T>>> = (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| {
                        if (r, c) == (i, j) {
                            phi.values[a].clone()
                        } else {
                            zero.clone()
                        }
                    })
                    .collect()
            })
            .collect();
        let big = amplify(&ops)?;
        let space = hn.get_or_insert_with(|| big.domain().clone()).clone();
        values.push(AdjointableOp::from_parts(
            big.matrix().clone(),
            big.adjoint_matrix().clone(),
            space.clone(),
            space,
        )?);
    }
    let h = hn.expect("at least one basis element");
    Ok(LinearMap {
        algebra: alg,
        h,
        values,
    })
}

impl<T: Real> LinearMap<T> {
    /// Positivity of `phi_n` on the maximally entangled projection and on
    /// `samples` random rank-one projections of `M_n(M_s)`. A failure is a
    /// certificate that `phi` is not completely positive.
    pub fn amplification_test(&self, n: usize, samples: usize, seed: u64, tol: T) -> Result<AmplificationTest<T>> {
        let s = self
            .algebra
            .matrix_size()
            .ok_or_else(|| Error::Schema("algebra has no matrix model".into()))?;
        if self.h.z() != &Descriptor::Scalar {
            return Err(Error::DescriptorMismatch("amplification test needs scalar Z".into()));
        }
        let phin = amplification(self, n)?;
        let big = n * s;
        let mut inputs = Vec::with_capacity(samples + 1);
        let mut v = CVec::<T>::zeros(big);
        for i in 0..n.min(s) {
            v[i * s + i] = cr(T::one());
        }
        inputs.push(v);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            inputs.push(CVec::from_fn(big, |_, _| {
                c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            }));
        }
        let g = phin.h.gram().clone();
        let mut worst = AmplificationTest {
            pass: true,
            min_eigenvalue: T::max_value().unwrap_or(T::one()),
            witness: zeros(big, big),
        };
        for v in inputs {
            let nv = v.norm();
            if nv == T::zero() {
                continue;
            }
            let u = &v / cr(nv);
            let proj = &u * u.adjoint();
            let out = &g * phin.apply_matrix(&proj)?;
            let t = linalg::psd_test(&out, tol);
            if t.min_eigenvalue < worst.min_eigenvalue {
                worst.min_eigenvalue = t.min_eigenvalue;
                worst.witness = proj;
            }
            worst.pass &= t.pass;
        }
        Ok(worst)
    }
}

/// Residuals of an algebra dilation `(K; pi; V; W)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraDilationReport<T> {
    pub dim_k: usize,
    /// `[V(a) h, V(b) g]_K` against `[h, phi(a* b) g]_H`.
    pub factorization: T,
    /// `max_a |phi(e_a) - W* pi(e_a) W|`; present with a unit.
    pub dilation: Option<T>,
    pub multiplicativity: T,
    pub star: T,
    /// `pi(e_a) V(b) = V(e_a e_b)`.
    pub intertwining: T,
    pub unital: Option<T>,
    pub adjoint: T,
    pub span_rank: usize,
    pub minimal: bool,
    pub pass: bool,
}

impl<T: Real> AlgebraDilationReport<T> {
    pub fn residuals(&self) -> Vec<(&'static str, T)> {
        let mut v = vec![
            ("factorization", self.factorization),
            ("multiplicativity", self.multiplicativity),
            ("star", self.star),
            ("intertwining", self.intertwining),
            ("adjoint", self.adjoint),
        ];
        if let Some(d) = self.dilation {
            v.push(("dilation", d));
        }
        if let Some(u) = self.unital {
            v.push(("unital", u));
        }
        v
    }

    pub fn max_residual(&self) -> T {
        linalg::max_of(self.residuals().into_iter().map(|(_, r)| r))
    }
}

/// Recomputes the algebra dilation identities from raw matrices.
pub fn verify_algebra_parts<T: Real>(
    map: &LinearMap<T>,
    k_space: &Arc<VeSpace<T>>,
    v_mats: &[CMat<T>],
    pi_mats: &[CMat<T>],
    w: Option<&CMat<T>>,
    tol: T,
) -> Result<AlgebraDilationReport<T>> {
    let alg = &map.algebra;
    let h = &map.h;
    let p = alg.dim();
    let d = h.dim();
    let m = h.zsize();
    let r = k_space.dim();
    if v_mats.len() != p || pi_mats.len() != p {
        return Err(Error::ShapeMismatch("one V and one pi per basis element".into()));
    }
    let one = T::one();
    let mut adjoint = T::zero();
    let mut pi_adj = Vec::with_capacity(p);
    for pm in pi_mats {
        let (op, res) = AdjointableOp::solve_with_residual(pm.clone(), k_space.clone(), k_space.clone())?;
        adjoint = adjoint.max(res);
        pi_adj.push(op.adjoint_matrix().clone());
    }
    for vm in v_mats {
        let (_, res) = AdjointableOp::solve_with_residual(vm.clone(), h.clone(), k_space.clone())?;
        adjoint = adjoint.max(res);
    }
    let phiscale = linalg::max_of(map.values.iter().map(|v| v.matrix().norm())).max(one);
    let pmax = linalg::max_of(pi_mats.iter().map(|p| p.norm())).max(one);
    let vmax = linalg::max_of(v_mats.iter().map(|p| p.norm())).max(one);
    let combo = |mats: &[CMat<T>], x: &CVec<T>, rows: usize, cols: usize| {
        mats.iter()
            .enumerate()
            .fold(zeros::<T>(rows, cols), |acc, (k, mk)| acc + mk * x[k])
    };

    let gscale = (h.gram().norm() * phiscale).max(one);
    let mut factorization = T::zero();
    for a in 0..p {
        let va = kron_id(&v_mats[a], m);
        let astar = alg.star_of(&alg.basis_vec(a));
        for b in 0..p {
            let lhs = va.adjoint() * k_space.gram() * kron_id(&v_mats[b], m);
            let phi = map.apply(&alg.mul(&astar, &alg.basis_vec(b)));
            let rhs = h.gram() * kron_id(&phi, m);
            factorization = factorization.max((lhs - rhs).norm() / gscale);
        }
    }

    let mut multiplicativity = T::zero();
    let mut intertwining = T::zero();
    let mut star = T::zero();
    for a in 0..p {
        for b in 0..p {
            let ab = alg.structure(a, b);
            let e = &pi_mats[a] * &pi_mats[b] - combo(pi_mats, ab, r, r);
            multiplicativity = multiplicativity.max(e.norm() / (pmax * pmax));
            let e = &pi_mats[a] * &v_mats[b] - combo(v_mats, ab, r, d);
            intertwining = intertwining.max(e.norm() / (pmax * vmax));
        }
        let astar = alg.star_of(&alg.basis_vec(a));
        let e = &pi_adj[a] - combo(pi_mats, &astar, r, r);
        star = star.max(e.norm() / pmax);
    }

    let (dilation, unital) = match (w, alg.unit()) {
        (Some(w), Some(u)) => {
            let (wop, res) = AdjointableOp::solve_with_residual(w.clone(), h.clone(), k_space.clone())?;
            adjoint = adjoint.max(res);
            let dil = linalg::max_of((0..p).map(|a| {
                let e = wop.adjoint_matrix() * &pi_mats[a] * w - map.values[a].matrix();
                e.norm() / phiscale
            }));
            let un = (combo(pi_mats, u, r, r) - linalg::identity::<T>(r)).norm() / pmax;
            (Some(dil), Some(un))
        }
        _ => (None, None),
    };

    let mut all = zeros::<T>(r, p * d);
    for (a, vm) in v_mats.iter().enumerate() {
        all.view_mut((0, a * d), (r, d)).copy_from(vm);
    }
    let span_rank = linalg::rank(&all, null_threshold::<T>());
    let minimal = span_rank == r;
    let mut report = AlgebraDilationReport {
        dim_k: r,
        factorization,
        dilation,
        multiplicativity,
        star,
        intertwining,
        unital,
        adjoint,
        span_rank,
        minimal,
        pass: false,
    };
    report.pass = minimal && report.max_residual() <= tol;
    Ok(report)
}

/// `(K; pi; V; W)` for a positive semidefinite linear map on a finite
/// *-algebra. `V(a) = pi(e_a) W` when a unit exists.
#[derive(Debug, Clone)]
pub struct AlgebraDilation<T: Real> {
    map: LinearMap<T>,
    quotient: Quotient<T>,
    k_space: Arc<VeSpace<T>>,
    v: Vec<AdjointableOp<T>>,
    pi: Vec<AdjointableOp<T>>,
    w: Option<AdjointableOp<T>>,
    report: AlgebraDilationReport<T>,
}

impl<T: Real> AlgebraDilation<T> {
    pub fn map(&self) -> &LinearMap<T> {
        &self.map
    }

    pub fn quotient(&self) -> &Quotient<T> {
        &self.quotient
    }

    pub fn k_space(&self) -> &Arc<VeSpace<T>> {
        &self.k_space
    }

    pub fn dim_k(&self) -> usize {
        self.k_space.dim()
    }

    pub fn v(&self, a: usize) -> &AdjointableOp<T> {
        &self.v[a]
    }

    pub fn v_all(&self) -> &[AdjointableOp<T>] {
        &self.v
    }

    pub fn pi(&self, a: usize) -> &AdjointableOp<T> {
        &self.pi[a]
    }

    pub fn pi_all(&self) -> &[AdjointableOp<T>] {
        &self.pi
    }

    /// `pi(x)` for an algebra element in coordinates.
    pub fn pi_of(&self, x: &CVec<T>) -> CMat<T> {
        let r = self.dim_k();
        self.pi
            .iter()
            .enumerate()
            .fold(zeros::<T>(r, r), |acc, (a, op)| acc + op.matrix() * x[a])
    }

    pub fn w(&self) -> Option<&AdjointableOp<T>> {
        self.w.as_ref()
    }

    pub fn report(&self) -> &AlgebraDilationReport<T> {
        &self.report
    }

    /// Module structure on `K` induced from a VE-module `H`; `W` is checked
    /// together with the `V(a)`.
    pub fn module_certificate(&self, tol: T) -> Result<crate::dilations::ModuleCertificate<T>> {
        let mut v: Vec<&AdjointableOp<T>> = self.v.iter().collect();
        v.extend(self.w.iter());
        let pi: Vec<&AdjointableOp<T>> = self.pi.iter().collect();
        crate::dilations::certify_module(&self.quotient, self.map.algebra.dim(), &self.map.h, &v, &pi, tol)
    }

    /// Points and elements are the basis names; `V(a)` and `pi(e_a)`.
    pub fn view(&self) -> RealisationView<T> {
        let names = self.map.algebra.names().to_vec();
        RealisationView {
            points: names.clone(),
            elements: names,
            h: self.map.h.clone(),
            space: self.k_space.clone(),
            v: self.v.iter().map(|o| o.matrix().clone()).collect(),
            pi: self.pi.iter().map(|o| o.matrix().clone()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_algebras_validate() {
        for m in 1..4 {
            assert!(FinStarAlgebra::<f64>::matrix_algebra(m).validate(1e-12).is_ok());
        }
        let a = FinStarAlgebra::<f64>::matrix_algebra(2).matrices_over(2);
        assert!(a.validate(1e-12).is_ok());
        assert_eq!(a.matrix_size(), Some(4));
    }

    #[test]
    fn amplified_matrix_units_multiply_like_big_matrices() {
        let a = FinStarAlgebra::<f64>::matrix_algebra(2).matrices_over(2);
        for x in 0..a.dim() {
            for y in 0..a.dim() {
                let lhs = a.matrix_of(a.structure(x, y)).unwrap();
                let rhs = a.matrix_of(&a.basis_vec(x)).unwrap() * a.matrix_of(&a.basis_vec(y)).unwrap();
                assert!((lhs - rhs).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn broken_structure_is_rejected() {
        let mut a = FinStarAlgebra::<f64>::matrix_algebra(2);
        a.mult[1][0] = c(1.0, 0.0);
        assert!(matches!(a.validate(1e-12), Err(Error::NonAssociative(_))));
    }

    #[test]
    fn identity_map_dilation_is_two_dimensional() {
        let alg = Arc::new(FinStarAlgebra::<f64>::matrix_algebra(2));
        let h = Arc::new(VeSpace::hilbert(2));
        let vals = (0..4).map(|b| alg.matrix_of(&alg.basis_vec(b)).unwrap()).collect();
        let phi = LinearMap::new(alg, h, vals, 1e-9).unwrap();
        let d = phi.stinespring_dilate(1e-9).unwrap();
        assert_eq!(d.dim_k(), 2);
        assert!(d.report().dilation.unwrap() < 1e-10);
    }

    #[test]
    fn trace_map_dilation_is_eight_dimensional() {
        let alg = Arc::new(FinStarAlgebra::<f64>::matrix_algebra(2));
        let h = Arc::new(VeSpace::hilbert(2));
        let vals = (0..4)
            .map(|b| {
                let tr = alg.matrix_of(&alg.basis_vec(b)).unwrap().trace();
                linalg::identity::<f64>(2) * tr
            })
            .collect();
        let phi = LinearMap::new(alg, h, vals, 1e-9).unwrap();
        assert!(phi.is_psd(1e-9).unwrap().pass);
        let d = phi.stinespring_dilate(1e-9).unwrap();
        assert_eq!(d.dim_k(), 8);
    }

    #[test]
    fn zero_map_has_zero_dilation() {
        let alg = Arc::new(FinStarAlgebra::<f64>::matrix_algebra(2));
        let h = Arc::new(VeSpace::hilbert(2));
        let phi = LinearMap::new(alg, h, vec![zeros(2, 2); 4], 1e-9).unwrap();
        assert_eq!(phi.stinespring_dilate(1e-9).unwrap().dim_k(), 0);
    }

    #[test]
    fn transpose_fails_at_second_amplification() {
        let alg = Arc::new(FinStarAlgebra::<f64>::matrix_algebra(2));
        let h = Arc::new(VeSpace::hilbert(2));
        let vals = (0..4)
            .map(|b| alg.matrix_of(&alg.basis_vec(b)).unwrap().transpose())
            .collect();
        let phi = LinearMap::new(alg, h, vals, 1e-9).unwrap();
        assert!(phi.amplification_test(1, 50, 7, 1e-9).unwrap().pass);
        let t = phi.amplification_test(2, 0, 7, 1e-9).unwrap();
        assert!(!t.pass);
        assert!(!phi.is_completely_positive(1e-9).unwrap());
        // eigenvalue -1/2 of swap/2, relative to |swap/2| = 1
        assert!((t.min_eigenvalue + 0.5).abs() < 1e-12);
    }

    #[test]
    fn first_amplification_is_the_map() {
        let alg = Arc::new(FinStarAlgebra::<f64>::matrix_algebra(2));
        let h = Arc::new(VeSpace::hilbert(1));
        let vals = (0..4).map(|b| CMat::from_element(1, 1, c(b as f64, 0.))).collect();
        let phi = LinearMap::new(alg, h, vals, 1e-9).unwrap();
        let p1 = amplification(&phi, 1).unwrap();
        for b in 0..4 {
            assert_eq!(p1.value(b).matrix(), phi.value(b).matrix());
        }
    }
}
