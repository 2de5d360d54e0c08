//! Reproducing-kernel realisation of a positive semidefinite kernel.
//!
//! Members are `H`-valued functions on the points, stored as coordinates in
//! a basis whose function tables are kept explicitly (`members`, one column
//! per basis function, rows `x*d + i`). Evaluation at `x` is a row slice of
//! that table, and `k_x h` is located in the basis by fitting its table.

use std::sync::Arc;

use crate::kernels::OperatorKernel;
use crate::linalg::{self, kron_id, zeros};
use crate::linearise::{trivial_action, InvariantLinearisation, Quotient, RealisationView};
use crate::operators::AdjointableOp;
use crate::star_semigroup::SemigroupAction;
use crate::ve_space::VeSpace;
use crate::{null_threshold, CMat, CVec, Error, Real, Result};

#[derive(Debug, Clone)]
pub struct RkSpace<T: Real> {
    kernel: OperatorKernel<T>,
    space: Arc<VeSpace<T>>,
    members: CMat<T>,
    eval: Vec<AdjointableOp<T>>,
    eval_residual: T,
    k_cols: Vec<CMat<T>>,
    minimal: bool,
}

/// Table of all `k_x e_i`: block `(y, x)` is `k(y, x)`.
fn kernel_table<T: Real>(k: &OperatorKernel<T>) -> CMat<T> {
    let n = k.n_points();
    let d = k.h().dim();
    let mut t = zeros::<T>(n * d, n * d);
    for y in 0..n {
        for x in 0..n {
            t.view_mut((y * d, x * d), (d, d)).copy_from(k.matrix(y, x));
        }
    }
    t
}

impl<T: Real> RkSpace<T> {
    /// The minimal space spanned by the `k_x h`.
    pub fn from_kernel(k: &OperatorKernel<T>, tol: T) -> Result<Self> {
        let psd = k.positive_semidefinite(tol);
        if !psd.pass {
            return Err(Error::NotPsd {
                min_eigenvalue: crate::to_f64(psd.min_eigenvalue),
                witness: psd.witness,
            });
        }
        let q = Quotient::new(k.h().z().clone(), &k.generator_gram())?;
        let members = kernel_table(k) * q.basis();
        Self::assemble(k.clone(), q.space().clone(), members)
    }

    /// Functions `x -> V(x)* f` for `f` in `K`.
    pub fn from_linearisation(l: &InvariantLinearisation<T>) -> Result<Self> {
        if !l.report().minimal {
            return Err(Error::NotMinimal(format!(
                "span rank {} < dim K {}",
                l.report().span_rank,
                l.dim_k()
            )));
        }
        let k = l.kernel();
        let d = k.h().dim();
        let r = l.dim_k();
        let mut members = zeros::<T>(k.n_points() * d, r);
        for x in 0..k.n_points() {
            members
                .view_mut((x * d, 0), (d, r))
                .copy_from(l.v(x).adjoint_matrix());
        }
        Self::assemble(k.clone(), l.k_space().clone(), members)
    }

    /// Reassembles a realisation from recorded member tables and the Gram
    /// of their span, without re-deriving either from the kernel.
    pub fn from_parts(k: &OperatorKernel<T>, space: Arc<VeSpace<T>>, members: CMat<T>) -> Result<Self> {
        let d = k.h().dim();
        if members.nrows() != k.n_points() * d || members.ncols() != space.dim() {
            return Err(Error::ShapeMismatch("member table".into()));
        }
        if space.z() != k.h().z() {
            return Err(Error::DescriptorMismatch("member space".into()));
        }
        Self::assemble(k.clone(), space, members)
    }

    fn assemble(kernel: OperatorKernel<T>, space: Arc<VeSpace<T>>, members: CMat<T>) -> Result<Self> {
        let n = kernel.n_points();
        let d = kernel.h().dim();
        let r = space.dim();
        let mut eval = Vec::with_capacity(n);
        let mut eval_residual = T::zero();
        for x in 0..n {
            let ex = members.rows(x * d, d).into_owned();
            let (op, res) = AdjointableOp::solve_with_residual(ex, space.clone(), kernel.h().clone())?;
            eval_residual = eval_residual.max(res);
            eval.push(op);
        }
        let fit = linalg::pinv(&members, null_threshold::<T>());
        let table = kernel_table(&kernel);
        let k_cols: Vec<CMat<T>> = (0..n)
            .map(|x| &fit * table.columns(x * d, d))
            .collect();
        let mut span = zeros::<T>(r, n * d);
        for (x, kc) in k_cols.iter().enumerate() {
            span.view_mut((0, x * d), (r, d)).copy_from(kc);
        }
        let minimal = linalg::rank(&members, null_threshold::<T>()) == r
            && linalg::rank(&span, null_threshold::<T>()) == r;
        Ok(Self {
            kernel,
            space,
            members,
            eval,
            eval_residual,
            k_cols,
            minimal,
        })
    }

    pub fn kernel(&self) -> &OperatorKernel<T> {
        &self.kernel
    }

    pub fn space(&self) -> &Arc<VeSpace<T>> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Function tables of the basis members, `n d x r`.
    pub fn members_basis(&self) -> &CMat<T> {
        &self.members
    }

    pub fn is_minimal(&self) -> bool {
        self.minimal
    }

    /// `E_x: R -> H`.
    pub fn evaluation_op(&self, x: usize) -> &AdjointableOp<T> {
        &self.eval[x]
    }

    /// Coordinates of `k_x h` as a matrix in `h`.
    pub fn kx(&self, x: usize) -> &CMat<T> {
        &self.k_cols[x]
    }

    pub fn evaluate(&self, f: &CVec<T>, x: usize) -> Result<CVec<T>> {
        if x >= self.kernel.n_points() {
            return Err(Error::UnknownPoint(format!("#{x}")));
        }
        if f.len() != self.dim() {
            return Err(Error::SpaceMismatch("member coordinates".into()));
        }
        Ok(self.eval[x].matrix() * f)
    }

    pub fn evaluate_at(&self, f: &CVec<T>, point: &str) -> Result<CVec<T>> {
        self.evaluate(f, self.kernel.point_index(point)?)
    }

    /// Returns `E_x` with its adjoint, failing if the adjoint identity or
    /// `E_x* = k_x` does not hold to `tol`.
    pub fn evaluation_adjoint(&self, x: usize, tol: T) -> Result<AdjointableOp<T>> {
        if x >= self.kernel.n_points() {
            return Err(Error::UnknownPoint(format!("#{x}")));
        }
        let res = self.evaluation_adjoint_residual();
        if self.eval_residual > tol || res > tol {
            return Err(Error::NotAdjointable {
                residual: crate::to_f64(self.eval_residual.max(res)),
            });
        }
        Ok(self.eval[x].clone())
    }

    /// Residual of the least-squares adjoints of the evaluations.
    pub fn evaluation_solve_residual(&self) -> T {
        self.eval_residual
    }

    /// `max_x |E_x* - k_x|` in member coordinates, relative to
    /// `max(1, max |k_x|)`.
    pub fn evaluation_adjoint_residual(&self) -> T {
        let scale = linalg::max_of(self.k_cols.iter().map(|k| k.norm())).max(T::one());
        linalg::max_of(
            self.eval
                .iter()
                .zip(&self.k_cols)
                .map(|(e, k)| (e.adjoint_matrix() - k).norm() / scale),
        )
    }

    /// `max_x |members k_x - k(., x)|`: each `k_x h` is a member with the
    /// stated coordinates. Relative to `max(1, scale)`.
    pub fn kx_fit_residual(&self) -> T {
        let table = kernel_table(&self.kernel);
        let d = self.kernel.h().dim();
        let scale = self.kernel.scale().max(T::one());
        linalg::max_of(
            self.k_cols
                .iter()
                .enumerate()
                .map(|(x, kc)| (&self.members * kc - table.columns(x * d, d)).norm() / scale),
        )
    }

    /// `[f(x), h]_H = [f, k_x h]_R` for all members `f` and all `h`, as the
    /// flattened identity `(E_x ⊗ I)^H G_H = G_R (k_x ⊗ I)`.
    pub fn rk3_residual(&self) -> T {
        let m = self.space.zsize();
        let g = self.kernel.h().gram();
        linalg::max_of(self.eval.iter().zip(&self.k_cols).map(|(e, k)| {
            let lhs = kron_id(e.matrix(), m).adjoint() * g;
            let rhs = self.space.gram() * kron_id(k, m);
            let scale = (e.matrix().norm() * g.norm()).max(T::one());
            (lhs - rhs).norm() / scale
        }))
    }

    /// The same identity for one member `f` and one `h`.
    pub fn rk3_residual_for(&self, f: &CVec<T>, x: usize, h: &CVec<T>) -> Result<T> {
        let lhs = self.kernel.h().gramian(&self.evaluate(f, x)?, h)?;
        let rhs = self.space.gramian(f, &(&self.k_cols[x] * h))?;
        let scale = (f.norm() * h.norm()).max(T::one());
        Ok(lhs.sub(&rhs)?.norm() / scale)
    }

    /// `k(y, x) = E_y E_x*`.
    pub fn rebuild_kernel(&self, tol: T) -> Result<OperatorKernel<T>> {
        OperatorKernel::from_fn(
            self.kernel.points().to_vec(),
            self.kernel.h().clone(),
            tol,
            |y, x| self.eval[y].matrix() * self.eval[x].adjoint_matrix(),
        )
    }

    /// `max |E_y E_x* - k(y, x)|` relative to `max(1, scale)`.
    pub fn rebuilt_kernel_residual(&self) -> T {
        let n = self.kernel.n_points();
        let scale = self.kernel.scale().max(T::one());
        let mut worst = T::zero();
        for y in 0..n {
            for x in 0..n {
                let e = self.eval[y].matrix() * self.eval[x].adjoint_matrix() - self.kernel.matrix(y, x);
                worst = worst.max(e.norm() / scale);
            }
        }
        worst
    }

    /// `K = R`, `V(x) h = k_x h`, and for an action `pi(xi) k_x h =
    /// k_{xi.x} h`. Without an action the one-element monoid is used.
    pub fn to_linearisation(
        &self,
        action: Option<&SemigroupAction>,
        tol: T,
    ) -> Result<InvariantLinearisation<T>> {
        if !self.minimal {
            return Err(Error::NotMinimal("members are not spanned by the k_x h".into()));
        }
        let n = self.kernel.n_points();
        let d = self.kernel.h().dim();
        let r = self.dim();
        let owned;
        let a = match action {
            Some(a) => a,
            None => {
                owned = trivial_action(n);
                &owned
            }
        };
        let mut span = zeros::<T>(r, n * d);
        for (x, kc) in self.k_cols.iter().enumerate() {
            span.view_mut((0, x * d), (r, d)).copy_from(kc);
        }
        let inv = linalg::pinv(&span, null_threshold::<T>());
        let pi = (0..a.semigroup().len())
            .map(|xi| {
                let mut moved = zeros::<T>(r, n * d);
                for x in 0..n {
                    moved
                        .view_mut((0, x * d), (r, d))
                        .copy_from(&self.k_cols[a.act(xi, x)]);
                }
                moved * &inv
            })
            .collect();
        InvariantLinearisation::from_parts(
            &self.kernel,
            a,
            self.space.clone(),
            self.k_cols.clone(),
            pi,
            tol,
        )
    }

    /// View with `V(x) = k_x` and no representation.
    pub fn view(&self) -> RealisationView<T> {
        RealisationView {
            points: self.kernel.points().to_vec(),
            elements: vec![],
            h: self.kernel.h().clone(),
            space: self.space.clone(),
            v: self.k_cols.clone(),
            pi: vec![],
        }
    }
}
