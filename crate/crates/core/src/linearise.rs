//! Minimal invariant linearisations `(K; pi; V)` of positive semidefinite
//! invariant kernels.
//!
//! `K` is the span of the generators `u_{x,i} = k_x e_i`, whose gramian is
//! the kernel's generator Gram matrix. That matrix is usually singular, so
//! `K` is realised as the quotient by its null vectors: a [`Quotient`] keeps
//! a basis `B` of a complement of the null space and coordinates `C` with
//! `C B = I` and `C N = 0` on null vectors `N`. Then
//!
//! * `V(x) = C E_x`, where `E_x` places `h` at generator slot `x`;
//! * `pi(xi) = C P_xi B`, where `P_xi` relabels `u_{x,i} -> u_{xi.x,i}`.
//!
//! Relabelling only descends to the quotient if null vectors stay null;
//! this is checked rather than assumed.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::kernels::{FinSuppFunction, OperatorKernel};
use crate::linalg::{self, kron_id, zeros};
use crate::operators::AdjointableOp;
use crate::ordered_space::Descriptor;
use crate::star_semigroup::{check_invariance, SemigroupAction, StarSemigroup};
use crate::ve_space::VeSpace;
use crate::{lit, null_threshold, to_f64, CMat, Error, Real, Result};

/// Relative size of `A P N` (strictness matrix, relabelling, null basis)
/// above which a map is said not to preserve null directions.
const NULL_PRESERVATION: f64 = 1e-5;

/// Strict quotient of a space of generators with a (possibly degenerate)
/// flattened Gram matrix.
#[derive(Debug, Clone)]
pub struct Quotient<T: Real> {
    n_gen: usize,
    strictness: CMat<T>,
    basis: CMat<T>,
    coords: CMat<T>,
    null: CMat<T>,
    space: Arc<VeSpace<T>>,
}

impl<T: Real> Quotient<T> {
    /// Splits off the null space of `gram` (an `N M x N M` flattened Gram
    /// matrix over `z`) with the relative threshold `NULL_THRESHOLD` and
    /// whitens the complement against the trace form `tr [x, y]`.
    pub fn new(z: Descriptor, gram: &CMat<T>) -> Result<Self> {
        let m = z.size();
        if gram.nrows() != gram.ncols() || gram.nrows() % m != 0 {
            return Err(Error::ShapeMismatch("generator gram is not N*M square".into()));
        }
        let n_gen = gram.nrows() / m;
        let strictness = linalg::strictness_matrix(gram, m);
        let (range, null) = linalg::range_null_split(&strictness, null_threshold::<T>());
        let r = range.ncols();

        // Null vectors must pair to zero with every generator.
        if null.ncols() > 0 {
            let leak = (&strictness * &null).norm();
            let scale = strictness.norm().max(crate::tiny::<T>());
            if leak > lit::<T>(NULL_PRESERVATION) * scale {
                return Err(Error::DegenerateQuotientFailure {
                    residual: to_f64(leak / scale),
                });
            }
        }

        let mut trace = zeros::<T>(n_gen, n_gen);
        for i in 0..n_gen {
            for j in 0..n_gen {
                let mut s = crate::C::new(T::zero(), T::zero());
                for t in 0..m {
                    s += gram[(i * m + t, j * m + t)];
                }
                trace[(i, j)] = s;
            }
        }
        let reduced = linalg::hermitian_part(&(range.adjoint() * &trace * &range));
        let (vals, vecs) = linalg::eigh(&reduced);
        let mut basis = zeros::<T>(n_gen, r);
        let mut coords = zeros::<T>(r, n_gen);
        for k in 0..r {
            let lam = vals[k].max(crate::tiny::<T>());
            let col = &range * vecs.column(k);
            basis.set_column(k, &(&col * crate::C::new(T::one() / lam.sqrt(), T::zero())));
            coords.set_row(k, &(col.adjoint() * crate::C::new(lam.sqrt(), T::zero())));
        }
        let bk = kron_id(&basis, m);
        let fk = linalg::hermitian_part(&(bk.adjoint() * gram * &bk));
        let space = Arc::new(VeSpace::from_gram_unchecked(z, fk)?);
        Ok(Self {
            n_gen,
            strictness,
            basis,
            coords,
            null,
            space,
        })
    }

    pub fn n_generators(&self) -> usize {
        self.n_gen
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// `N x r`: generator coefficients of the quotient basis vectors.
    pub fn basis(&self) -> &CMat<T> {
        &self.basis
    }

    /// `r x N`: quotient coordinates of each generator.
    pub fn coords(&self) -> &CMat<T> {
        &self.coords
    }

    pub fn null_basis(&self) -> &CMat<T> {
        &self.null
    }

    pub fn space(&self) -> &Arc<VeSpace<T>> {
        &self.space
    }

    /// Matrix of the map induced on the quotient by `op` (an `N x N` map of
    /// generator coefficients), after checking that it preserves null
    /// directions.
    pub fn descend(&self, op: &CMat<T>) -> Result<CMat<T>> {
        if op.shape() != (self.n_gen, self.n_gen) {
            return Err(Error::ShapeMismatch("generator map shape".into()));
        }
        if self.null.ncols() > 0 {
            let leak = (&self.strictness * op * &self.null).norm();
            let scale = (self.strictness.norm() * op.norm().max(T::one())).max(crate::tiny::<T>());
            if leak > lit::<T>(NULL_PRESERVATION) * scale {
                return Err(Error::DegenerateQuotientFailure {
                    residual: to_f64(leak / scale),
                });
            }
        }
        Ok(&self.coords * op * &self.basis)
    }
}

/// `N x N` generator relabelling `u_{x,i} -> u_{xi.x,i}` for `d`-dimensional
/// values.
pub fn relabel_matrix<T: Real>(action: &SemigroupAction, xi: usize, d: usize) -> CMat<T> {
    let n = action.n_points();
    let mut p = zeros::<T>(n * d, n * d);
    for x in 0..n {
        let y = action.act(xi, x);
        for i in 0..d {
            p[(y * d + i, x * d + i)] = crate::C::new(T::one(), T::zero());
        }
    }
    p
}

/// `g^xi(y) = sum over x with xi.x = y of g(x)`, the function whose
/// convolution is the relabelled generator combination.
pub fn pushforward<T: Real>(
    action: &SemigroupAction,
    xi: usize,
    g: &FinSuppFunction<T>,
) -> FinSuppFunction<T> {
    let mut out: BTreeMap<usize, crate::CVec<T>> = BTreeMap::new();
    for (x, v) in g.iter() {
        let y = action.act(xi, x);
        out.entry(y)
            .and_modify(|w| *w += v)
            .or_insert_with(|| v.clone());
    }
    let mut f = FinSuppFunction::new();
    for (y, v) in out {
        f.insert(y, v);
    }
    f
}

/// Residuals of the linearisation axioms, each relative to a natural scale
/// floored at one.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearisationReport<T> {
    pub dim_k: usize,
    /// `[V(x) h, V(y) g]_K` against `[h, k(x, y) g]_H`, on the Gram level.
    pub factorization: T,
    /// `V(x)* V(y)` against `k(x, y)` with independently solved adjoints.
    pub evaluation: T,
    pub multiplicativity: T,
    pub star: T,
    pub intertwining: T,
    /// Worst adjoint-identity residual of the `V(x)` and `pi(xi)`.
    pub adjoint: T,
    /// `|pi(unit) - I|` when the unit acts trivially on the points.
    pub unital: Option<T>,
    /// Rank of `[V(x_0) .. V(x_{n-1})]`.
    pub span_rank: usize,
    pub minimal: bool,
    pub pass: bool,
}

impl<T: Real> LinearisationReport<T> {
    /// Named residuals, for certificates.
    pub fn residuals(&self) -> Vec<(&'static str, T)> {
        let mut v = vec![
            ("factorization", self.factorization),
            ("evaluation", self.evaluation),
            ("multiplicativity", self.multiplicativity),
            ("star", self.star),
            ("intertwining", self.intertwining),
            ("adjoint", self.adjoint),
        ];
        if let Some(u) = self.unital {
            v.push(("unital", u));
        }
        v
    }

    pub fn max_residual(&self) -> T {
        linalg::max_of(self.residuals().into_iter().map(|(_, r)| r))
    }
}

/// `(K; pi; V)` together with the data it was built from.
#[derive(Debug, Clone)]
pub struct InvariantLinearisation<T: Real> {
    kernel: OperatorKernel<T>,
    action: SemigroupAction,
    big_gram: CMat<T>,
    quotient: Option<Quotient<T>>,
    k_space: Arc<VeSpace<T>>,
    v: Vec<AdjointableOp<T>>,
    pi: Vec<AdjointableOp<T>>,
    report: LinearisationReport<T>,
}

impl<T: Real> InvariantLinearisation<T> {
    /// Builds the minimal linearisation. Fails with `NotPsd` or
    /// `NotInvariant` when the kernel does not qualify, and with
    /// `VerificationFailed` if the result does not verify to `tol`.
    pub fn construct(k: &OperatorKernel<T>, a: &SemigroupAction, tol: T) -> Result<Self> {
        check_inputs(k, a)?;
        let psd = k.positive_semidefinite(tol);
        if !psd.pass {
            return Err(Error::NotPsd {
                min_eigenvalue: to_f64(psd.min_eigenvalue),
                witness: psd.witness,
            });
        }
        let inv = check_invariance(k, a, tol)?;
        if !inv.pass {
            let (xi, x, y) = inv.witness.unwrap_or_default();
            return Err(Error::NotInvariant {
                xi,
                x,
                y,
                residual: to_f64(inv.residual),
            });
        }

        let d = k.h().dim();
        let big_gram = k.generator_gram();
        let quotient = Quotient::new(k.h().z().clone(), &big_gram)?;
        let k_space = quotient.space().clone();
        let c = quotient.coords();

        let v_mats: Vec<CMat<T>> = (0..k.n_points())
            .map(|x| c.columns(x * d, d).into_owned())
            .collect();
        let pi_mats = (0..a.semigroup().len())
            .map(|xi| quotient.descend(&relabel_matrix(a, xi, d)))
            .collect::<Result<Vec<_>>>()?;

        let out = Self::assemble(
            k.clone(),
            a.clone(),
            big_gram,
            Some(quotient),
            k_space,
            v_mats,
            pi_mats,
            tol,
        )?;
        if !out.report.pass {
            let worst = out
                .report
                .residuals()
                .into_iter()
                .fold(("none", T::zero()), |a, b| if b.1 > a.1 { b } else { a });
            return Err(Error::VerificationFailed(format!(
                "constructed linearisation: {} residual {:.3e} (minimal: {})",
                worst.0,
                to_f64(worst.1),
                out.report.minimal
            )));
        }
        Ok(out)
    }

    /// Wraps externally produced `(K; pi; V)` data and verifies it.
    pub fn from_parts(
        k: &OperatorKernel<T>,
        a: &SemigroupAction,
        k_space: Arc<VeSpace<T>>,
        v_mats: Vec<CMat<T>>,
        pi_mats: Vec<CMat<T>>,
        tol: T,
    ) -> Result<Self> {
        check_inputs(k, a)?;
        let big_gram = k.generator_gram();
        Self::assemble(k.clone(), a.clone(), big_gram, None, k_space, v_mats, pi_mats, tol)
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        kernel: OperatorKernel<T>,
        action: SemigroupAction,
        big_gram: CMat<T>,
        quotient: Option<Quotient<T>>,
        k_space: Arc<VeSpace<T>>,
        v_mats: Vec<CMat<T>>,
        pi_mats: Vec<CMat<T>>,
        tol: T,
    ) -> Result<Self> {
        let h = kernel.h().clone();
        let v = v_mats
            .into_iter()
            .map(|m| AdjointableOp::solve_with_residual(m, h.clone(), k_space.clone()).map(|p| p.0))
            .collect::<Result<Vec<_>>>()?;
        let pi = pi_mats
            .into_iter()
            .map(|m| {
                AdjointableOp::solve_with_residual(m, k_space.clone(), k_space.clone()).map(|p| p.0)
            })
            .collect::<Result<Vec<_>>>()?;
        let vm: Vec<CMat<T>> = v.iter().map(|o| o.matrix().clone()).collect();
        let pm: Vec<CMat<T>> = pi.iter().map(|o| o.matrix().clone()).collect();
        let report = verify_parts(&kernel, &action, &k_space, &vm, &pm, tol)?;
        Ok(Self {
            kernel,
            action,
            big_gram,
            quotient,
            k_space,
            v,
            pi,
            report,
        })
    }

    pub fn kernel(&self) -> &OperatorKernel<T> {
        &self.kernel
    }

    pub fn action(&self) -> &SemigroupAction {
        &self.action
    }

    /// Flattened gramian of the generators `k_x e_i`, index `x*d + i`.
    pub fn big_gram(&self) -> &CMat<T> {
        &self.big_gram
    }

    /// Present when built by [`Self::construct`].
    pub fn quotient(&self) -> Option<&Quotient<T>> {
        self.quotient.as_ref()
    }

    /// Generator labels `(x, i)` in column order of [`Self::big_gram`].
    pub fn generators(&self) -> Vec<(usize, usize)> {
        let d = self.kernel.h().dim();
        (0..self.kernel.n_points())
            .flat_map(|x| (0..d).map(move |i| (x, i)))
            .collect()
    }

    pub fn k_space(&self) -> &Arc<VeSpace<T>> {
        &self.k_space
    }

    pub fn dim_k(&self) -> usize {
        self.k_space.dim()
    }

    pub fn v(&self, x: usize) -> &AdjointableOp<T> {
        &self.v[x]
    }

    pub fn v_all(&self) -> &[AdjointableOp<T>] {
        &self.v
    }

    pub fn pi(&self, xi: usize) -> &AdjointableOp<T> {
        &self.pi[xi]
    }

    pub fn pi_all(&self) -> &[AdjointableOp<T>] {
        &self.pi
    }

    pub fn report(&self) -> &LinearisationReport<T> {
        &self.report
    }

    /// Re-runs [`verify_parts`] on the stored matrices.
    pub fn verify(&self, tol: T) -> Result<LinearisationReport<T>> {
        let vm: Vec<CMat<T>> = self.v.iter().map(|o| o.matrix().clone()).collect();
        let pm: Vec<CMat<T>> = self.pi.iter().map(|o| o.matrix().clone()).collect();
        verify_parts(&self.kernel, &self.action, &self.k_space, &vm, &pm, tol)
    }

    /// Same linearisation with `pi(xi)` replaced; for fault injection.
    pub fn with_pi_matrix(&self, xi: usize, m: CMat<T>, tol: T) -> Result<Self> {
        let vm: Vec<CMat<T>> = self.v.iter().map(|o| o.matrix().clone()).collect();
        let mut pm: Vec<CMat<T>> = self.pi.iter().map(|o| o.matrix().clone()).collect();
        pm[xi] = m;
        Self::assemble(
            self.kernel.clone(),
            self.action.clone(),
            self.big_gram.clone(),
            self.quotient.clone(),
            self.k_space.clone(),
            vm,
            pm,
            tol,
        )
    }

    /// `V(x)* V(y)` as a kernel on the same points.
    pub fn recovered_kernel(&self) -> Result<OperatorKernel<T>> {
        let n = self.kernel.n_points();
        let h = self.kernel.h().clone();
        let blocks = (0..n * n)
            .map(|i| self.v[i / n].adjoint().compose(&self.v[i % n]))
            .collect::<Result<Vec<_>>>()?;
        OperatorKernel::from_ops(self.kernel.points().to_vec(), h, blocks)
    }

    pub fn view(&self) -> RealisationView<T> {
        RealisationView {
            points: self.kernel.points().to_vec(),
            elements: self.action.semigroup().elements().to_vec(),
            h: self.kernel.h().clone(),
            space: self.k_space.clone(),
            v: self.v.iter().map(|o| o.matrix().clone()).collect(),
            pi: self.pi.iter().map(|o| o.matrix().clone()).collect(),
        }
    }
}

fn check_inputs<T: Real>(k: &OperatorKernel<T>, a: &SemigroupAction) -> Result<()> {
    if k.n_points() != a.n_points() {
        return Err(Error::SpaceMismatch(format!(
            "kernel on {} points, action on {}",
            k.n_points(),
            a.n_points()
        )));
    }
    let sr = a.semigroup().validate();
    if !sr.pass() {
        return Err(Error::InvalidSemigroup(format!("{:?}", sr.violations[0])));
    }
    let ar = a.validate();
    if !ar.pass() {
        return Err(Error::InvalidSemigroup(format!("{:?}", ar.violations[0])));
    }
    Ok(())
}

/// Recomputes every linearisation axiom from raw matrices, solving for all
/// adjoints afresh.
pub fn verify_parts<T: Real>(
    k: &OperatorKernel<T>,
    a: &SemigroupAction,
    k_space: &Arc<VeSpace<T>>,
    v_mats: &[CMat<T>],
    pi_mats: &[CMat<T>],
    tol: T,
) -> Result<LinearisationReport<T>> {
    let n = k.n_points();
    let sg = a.semigroup();
    let h = k.h();
    let d = h.dim();
    let m = h.zsize();
    let r = k_space.dim();
    if v_mats.len() != n || pi_mats.len() != sg.len() {
        return Err(Error::ShapeMismatch("one V per point and one pi per element".into()));
    }
    if k_space.z() != h.z() {
        return Err(Error::DescriptorMismatch("K and H over different Z".into()));
    }
    let mut adjoint = T::zero();
    let mut v_ops = Vec::with_capacity(n);
    for vm in v_mats {
        let (op, res) = AdjointableOp::solve_with_residual(vm.clone(), h.clone(), k_space.clone())?;
        adjoint = adjoint.max(res);
        v_ops.push(op);
    }
    let mut pi_ops = Vec::with_capacity(sg.len());
    for pm in pi_mats {
        let (op, res) =
            AdjointableOp::solve_with_residual(pm.clone(), k_space.clone(), k_space.clone())?;
        adjoint = adjoint.max(res);
        pi_ops.push(op);
    }

    let one = T::one();
    let kscale = k.scale().max(one);
    let gscale = (h.gram().norm() * k.scale()).max(one);
    let vmax = linalg::max_of(v_mats.iter().map(|v| v.norm())).max(one);
    let pmax = linalg::max_of(pi_mats.iter().map(|p| p.norm())).max(one);

    let mut factorization = T::zero();
    let mut evaluation = T::zero();
    for x in 0..n {
        let vx = kron_id(&v_mats[x], m);
        for y in 0..n {
            let vy = kron_id(&v_mats[y], m);
            let lhs = vx.adjoint() * k_space.gram() * &vy;
            let rhs = h.gram() * kron_id(k.matrix(x, y), m);
            factorization = factorization.max((lhs - rhs).norm() / gscale);
            let e = v_ops[x].adjoint_matrix() * &v_mats[y] - k.matrix(x, y);
            evaluation = evaluation.max(e.norm() / kscale);
        }
    }

    let mut multiplicativity = T::zero();
    let mut star = T::zero();
    for al in 0..sg.len() {
        for be in 0..sg.len() {
            let e = &pi_mats[sg.mul(al, be)] - &pi_mats[al] * &pi_mats[be];
            multiplicativity = multiplicativity.max(e.norm() / (pmax * pmax));
        }
        let e = pi_ops[al].adjoint_matrix() - &pi_mats[sg.star(al)];
        star = star.max(e.norm() / pmax);
    }

    let mut intertwining = T::zero();
    for xi in 0..sg.len() {
        for x in 0..n {
            let e = &v_mats[a.act(xi, x)] - &pi_mats[xi] * &v_mats[x];
            intertwining = intertwining.max(e.norm() / (pmax * vmax));
        }
    }

    let unital = match (sg.unit(), a.validate().unital) {
        (Some(e), true) => Some((&pi_mats[e] - linalg::identity::<T>(r)).norm() / pmax),
        _ => None,
    };

    let mut all = zeros::<T>(r, n * d);
    for (x, vm) in v_mats.iter().enumerate() {
        all.view_mut((0, x * d), (r, d)).copy_from(vm);
    }
    let span_rank = linalg::rank(&all, null_threshold::<T>());
    let minimal = span_rank == r;

    let report = LinearisationReport {
        dim_k: r,
        factorization,
        evaluation,
        multiplicativity,
        star,
        intertwining,
        adjoint,
        unital,
        span_rank,
        minimal,
        pass: false,
    };
    let pass = minimal && report.max_residual() <= tol;
    Ok(LinearisationReport { pass, ..report })
}

/// The data of a realisation needed to compare it with another one: point
/// and element names, `V(x)` and `pi(xi)` matrices, and the space `K`.
#[derive(Debug, Clone)]
pub struct RealisationView<T: Real> {
    pub points: Vec<String>,
    pub elements: Vec<String>,
    pub h: Arc<VeSpace<T>>,
    pub space: Arc<VeSpace<T>>,
    pub v: Vec<CMat<T>>,
    pub pi: Vec<CMat<T>>,
}

/// `U: K_1 -> K_2` with `U V_1(x) = V_2(x)` and its verification residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryWitness<T: Real> {
    pub u: CMat<T>,
    /// Largest mismatch of the generator gramians `[V(x) h, V(y) g]`.
    pub gram_residual: T,
    /// `|(U ⊗ I)^H G_2 (U ⊗ I) - G_1|`.
    pub isometry: T,
    pub rank: usize,
    pub surjective: bool,
    pub v_intertwining: T,
    /// `|U pi_1(xi) - pi_2(xi) U|`; absent when either side has no `pi`.
    pub pi_intertwining: Option<T>,
    pub pass: bool,
}

impl<T: Real> UnitaryWitness<T> {
    pub fn max_residual(&self) -> T {
        self.gram_residual
            .max(self.isometry)
            .max(self.v_intertwining)
            .max(self.pi_intertwining.unwrap_or(T::zero()))
    }
}

/// Unitary equivalence of two minimal realisations of the same kernel.
/// Points (and semigroup elements) are matched by name.
pub fn unitary_equivalence_views<T: Real>(
    a: &RealisationView<T>,
    b: &RealisationView<T>,
    tol: T,
) -> Result<UnitaryWitness<T>> {
    if a.space.z() != b.space.z() || a.h.dim() != b.h.dim() {
        return Err(Error::SpaceMismatch("realisations over different data".into()));
    }
    if a.points.len() != b.points.len() {
        return Err(Error::Inequivalent {
            residual: f64::INFINITY,
        });
    }
    let pmap = a
        .points
        .iter()
        .map(|p| {
            b.points
                .iter()
                .position(|q| q == p)
                .ok_or_else(|| Error::UnknownPoint(p.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    let m = a.space.zsize();
    let d = a.h.dim();
    let n = a.points.len();
    let (ra, rb) = (a.space.dim(), b.space.dim());
    let one = T::one();

    let gram_of = |s: &RealisationView<T>, x: usize, y: usize| {
        kron_id(&s.v[x], m).adjoint() * s.space.gram() * kron_id(&s.v[y], m)
    };
    let mut gram_residual = T::zero();
    let mut gscale = T::zero();
    for x in 0..n {
        for y in 0..n {
            let ga = gram_of(a, x, y);
            let gb = gram_of(b, pmap[x], pmap[y]);
            gscale = gscale.max(ga.norm());
            gram_residual = gram_residual.max((ga - gb).norm());
        }
    }
    gram_residual /= gscale.max(one);
    if gram_residual > tol {
        return Err(Error::Inequivalent {
            residual: to_f64(gram_residual),
        });
    }

    let mut va = zeros::<T>(ra, n * d);
    let mut vb = zeros::<T>(rb, n * d);
    for x in 0..n {
        va.view_mut((0, x * d), (ra, d)).copy_from(&a.v[x]);
        vb.view_mut((0, x * d), (rb, d)).copy_from(&b.v[pmap[x]]);
    }
    let u = &vb * linalg::pinv(&va, null_threshold::<T>());
    let uk = kron_id(&u, m);
    let isometry =
        (uk.adjoint() * b.space.gram() * &uk - a.space.gram()).norm() / a.space.gram().norm().max(one);
    let rank = linalg::rank(&u, null_threshold::<T>());
    let surjective = ra == rb && rank == rb;
    let vmax = linalg::max_of(a.v.iter().chain(&b.v).map(|v| v.norm())).max(one);
    let v_intertwining = linalg::max_of(
        (0..n).map(|x| (&u * &a.v[x] - &b.v[pmap[x]]).norm() / vmax),
    );

    let pi_intertwining = if a.pi.is_empty() || b.pi.is_empty() {
        None
    } else {
        let umax = u.norm().max(one);
        let pmax = linalg::max_of(a.pi.iter().chain(&b.pi).map(|p| p.norm())).max(one);
        let mut worst = T::zero();
        for (i, name) in a.elements.iter().enumerate() {
            let j = b
                .elements
                .iter()
                .position(|q| q == name)
                .ok_or_else(|| Error::Reference(format!("element {name:?} missing")))?;
            let e = &u * &a.pi[i] - &b.pi[j] * &u;
            worst = worst.max(e.norm() / (umax * pmax));
        }
        Some(worst)
    };

    let mut w = UnitaryWitness {
        u,
        gram_residual,
        isometry,
        rank,
        surjective,
        v_intertwining,
        pi_intertwining,
        pass: false,
    };
    w.pass = surjective && w.max_residual() <= tol;
    Ok(w)
}

pub fn unitary_equivalence<T: Real>(
    l1: &InvariantLinearisation<T>,
    l2: &InvariantLinearisation<T>,
    tol: T,
) -> Result<UnitaryWitness<T>> {
    unitary_equivalence_views(&l1.view(), &l2.view(), tol)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdditivityReport<T> {
    pub hypothesis_residual: T,
    /// `|pi(alpha) + pi(beta) - pi(gamma)|` relative to `max(1, max |pi|)`.
    pub residual: T,
    pub pass: bool,
}

/// If `k(y, alpha.x) + k(y, beta.x) = k(y, gamma.x)` for all `x, y`, then
/// `pi(alpha) + pi(beta) = pi(gamma)` on the minimal `K`.
pub fn additivity_check<T: Real>(
    l: &InvariantLinearisation<T>,
    alpha: usize,
    beta: usize,
    gamma: usize,
    tol: T,
) -> Result<AdditivityReport<T>> {
    let k = l.kernel();
    let a = l.action();
    let n = k.n_points();
    let scale = k.scale().max(T::one());
    let mut worst = (T::zero(), 0, 0);
    for x in 0..n {
        for y in 0..n {
            let e = k.matrix(y, a.act(alpha, x)) + k.matrix(y, a.act(beta, x))
                - k.matrix(y, a.act(gamma, x));
            let r = e.norm() / scale;
            if r > worst.0 {
                worst = (r, x, y);
            }
        }
    }
    if worst.0 > tol {
        return Err(Error::HypothesisFails {
            x: worst.1,
            y: worst.2,
            residual: to_f64(worst.0),
        });
    }
    let p = |i: usize| l.pi(i).matrix();
    let pmax = linalg::max_of(l.pi_all().iter().map(|o| o.matrix().norm())).max(T::one());
    let residual = (p(alpha) + p(beta) - p(gamma)).norm() / pmax;
    Ok(AdditivityReport {
        hypothesis_residual: worst.0,
        residual,
        pass: residual <= tol,
    })
}

/// The one-element monoid acting trivially on `n` points.
pub fn trivial_action(n: usize) -> SemigroupAction {
    SemigroupAction::trivial(Arc::new(StarSemigroup::cyclic(1)), n)
}
