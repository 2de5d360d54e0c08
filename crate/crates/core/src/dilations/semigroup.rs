use std::sync::Arc;

use crate::kernels::{OperatorKernel, PositivityTest};
use crate::linalg;
use crate::linearise::InvariantLinearisation;
use crate::operators::AdjointableOp;
use crate::star_semigroup::{SemigroupAction, StarSemigroup};
use crate::ve_space::VeSpace;
use crate::{to_f64, CMat, Error, Real, Result};

/// `phi: Gamma -> L*(H)` on a finite *-semigroup.
#[derive(Debug, Clone)]
pub struct PsdSemigroupMap<T: Real> {
    semigroup: Arc<StarSemigroup>,
    h: Arc<VeSpace<T>>,
    phi: Vec<AdjointableOp<T>>,
}

/// Output of [`PsdSemigroupMap::sznagy_dilate`]. `w`, `dilation_residual`
/// and `unital_residual` are present only for semigroups with a unit.
#[derive(Debug, Clone)]
pub struct SzNagyDilation<T: Real> {
    pub linearisation: InvariantLinearisation<T>,
    pub w: Option<AdjointableOp<T>>,
    /// `max |phi(a) - W* pi(a) W|`, relative to `max(1, max |phi|)`.
    pub dilation_residual: Option<T>,
    pub unital_residual: Option<T>,
    pub pass: bool,
}

impl<T: Real> PsdSemigroupMap<T> {
    pub fn new(
        semigroup: Arc<StarSemigroup>,
        h: Arc<VeSpace<T>>,
        values: Vec<CMat<T>>,
        tol: T,
    ) -> Result<Self> {
        if values.len() != semigroup.len() {
            return Err(Error::ShapeMismatch("one value per semigroup element".into()));
        }
        let phi = values
            .into_iter()
            .map(|m| AdjointableOp::solve(m, h.clone(), h.clone(), tol))
            .collect::<Result<_>>()?;
        Ok(Self { semigroup, h, phi })
    }

    pub fn semigroup(&self) -> &Arc<StarSemigroup> {
        &self.semigroup
    }

    pub fn h(&self) -> &Arc<VeSpace<T>> {
        &self.h
    }

    pub fn value(&self, a: usize) -> &AdjointableOp<T> {
        &self.phi[a]
    }

    /// `k(a, b) = phi(a* b)` on the semigroup itself.
    pub fn kernel(&self) -> Result<OperatorKernel<T>> {
        let sg = &self.semigroup;
        let n = sg.len();
        let blocks = (0..n * n)
            .map(|i| self.phi[sg.mul(sg.star(i / n), i % n)].clone())
            .collect();
        OperatorKernel::from_ops(sg.elements().to_vec(), self.h.clone(), blocks)
    }

    pub fn action(&self) -> SemigroupAction {
        SemigroupAction::left_multiplication(self.semigroup.clone())
    }

    pub fn check_psd(&self, tol: T) -> Result<PositivityTest<T>> {
        Ok(self.kernel()?.positive_semidefinite(tol))
    }

    pub fn sznagy_dilate(&self, tol: T) -> Result<SzNagyDilation<T>> {
        let sv = self.semigroup.validate();
        if !sv.pass() {
            return Err(Error::InvalidSemigroup(format!("{:?}", sv.violations[0])));
        }
        let k = self.kernel()?;
        let psd = k.positive_semidefinite(tol);
        if !psd.pass {
            return Err(Error::NotPsd {
                min_eigenvalue: to_f64(psd.min_eigenvalue),
                witness: psd.witness,
            });
        }
        let l = InvariantLinearisation::construct(&k, &self.action(), tol)?;
        let Some(e) = self.semigroup.unit() else {
            let pass = l.report().pass;
            return Ok(SzNagyDilation {
                linearisation: l,
                w: None,
                dilation_residual: None,
                unital_residual: None,
                pass,
            });
        };
        let w = l.v(e).clone();
        let scale = linalg::max_of(self.phi.iter().map(|p| p.matrix().norm())).max(T::one());
        let dilation = linalg::max_of((0..self.semigroup.len()).map(|a| {
            let wpw = w.adjoint_matrix() * l.pi(a).matrix() * w.matrix();
            (wpw - self.phi[a].matrix()).norm() / scale
        }));
        let unital = (l.pi(e).matrix() - linalg::identity::<T>(l.dim_k())).norm();
        let pass = l.report().pass && dilation <= tol && unital <= tol;
        Ok(SzNagyDilation {
            linearisation: l,
            w: Some(w),
            dilation_residual: Some(dilation),
            unital_residual: Some(unital),
            pass,
        })
    }

    /// Same map with the semigroup elements listed as `new[i] = old[perm[i]]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        let semigroup = Arc::new(self.semigroup.relabel(perm)?);
        let phi = perm.iter().map(|&p| self.phi[p].clone()).collect();
        Ok(Self {
            semigroup,
            h: self.h.clone(),
            phi,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::linearise::unitary_equivalence;

    fn z2(cv: f64) -> PsdSemigroupMap<f64> {
        let g = Arc::new(StarSemigroup::cyclic(2));
        let h = Arc::new(VeSpace::hilbert(1));
        let vals = vec![CMat::from_element(1, 1, c(1., 0.)), CMat::from_element(1, 1, c(cv, 0.))];
        PsdSemigroupMap::new(g, h, vals, 1e-9).unwrap()
    }

    #[test]
    fn z2_family() {
        for cv in [-1.0, -0.5, 0.0, 0.5, 1.0] {
            let d = z2(cv).sznagy_dilate(1e-9).unwrap();
            assert!(d.pass);
            let l = &d.linearisation;
            assert_eq!(l.dim_k(), if cv.abs() < 1.0 { 2 } else { 1 });
            let w = d.w.as_ref().unwrap();
            let v = w.adjoint_matrix() * l.pi(1).matrix() * w.matrix();
            assert!((v[(0, 0)] - c(cv, 0.)).norm() < 1e-10);
        }
    }

    #[test]
    fn z2_outside_the_disc_is_refused() {
        assert!(matches!(z2(2.0).sznagy_dilate(1e-9), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn constant_identity_map_on_a_semilattice() {
        let s = Arc::new(StarSemigroup::semilattice_chain(3));
        let h = Arc::new(VeSpace::<f64>::hilbert(2));
        let vals = vec![linalg::identity(2); 3];
        let d = PsdSemigroupMap::new(s, h, vals, 1e-9)
            .unwrap()
            .sznagy_dilate(1e-9)
            .unwrap();
        assert!(d.pass);
        assert_eq!(d.linearisation.dim_k(), 2);
        let w = d.w.unwrap();
        assert!((w.adjoint_matrix() * w.matrix() - linalg::identity::<f64>(2)).norm() < 1e-12);
    }

    #[test]
    fn relabelled_semigroup_gives_equivalent_dilation() {
        let m = z2(0.25);
        let a = m.sznagy_dilate(1e-9).unwrap();
        let b = m.relabel(&[1, 0]).unwrap().sznagy_dilate(1e-9).unwrap();
        let w = unitary_equivalence(&a.linearisation, &b.linearisation, 1e-9).unwrap();
        assert!(w.pass);
    }
}
