use std::sync::Arc;

use crate::kernels::OperatorKernel;
use crate::linalg::{self, id_kron};
use crate::linearise::{InvariantLinearisation, Quotient};
use crate::operators::AdjointableOp;
use crate::star_semigroup::SemigroupAction;
use crate::ve_space::{RightAction, VeSpace};
use crate::{to_f64, Error, Real, Result};

/// The module structure induced on a quotient of `H^n` and the residuals
/// showing the dilation maps respect it.
#[derive(Debug, Clone)]
pub struct ModuleCertificate<T: Real> {
    /// `K` with the induced right action attached.
    pub space: Arc<VeSpace<T>>,
    /// `[e, f a] = [e, f] a` on `K`, relative to `max(1, |G_K|)`.
    pub gmp_residual: T,
    /// Module-map residual of the maps `H -> K`.
    pub v_residual: T,
    /// Module-map residual of the maps `K -> K`.
    pub pi_residual: T,
    pub pass: bool,
}

/// Induces `(sum_x k_x h_x) a = sum_x k_x (h_x a)` on the quotient and
/// measures how far `v` (maps `H -> K`) and `pi` (maps `K -> K`) are from
/// module maps.
pub fn certify_module<T: Real>(
    q: &Quotient<T>,
    blocks: usize,
    h: &Arc<VeSpace<T>>,
    v: &[&AdjointableOp<T>],
    pi: &[&AdjointableOp<T>],
    tol: T,
) -> Result<ModuleCertificate<T>> {
    let act = h.module().ok_or(Error::NotAModule)?;
    let units = act
        .units
        .iter()
        .map(|u| {
            q.descend(&id_kron(blocks, u)).map_err(|e| match e {
                Error::DegenerateQuotientFailure { residual } => Error::ModuleViolation {
                    what: "K is not closed under the right action".into(),
                    residual,
                },
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let space = Arc::new(
        q.space()
            .as_ref()
            .clone()
            .with_module_unchecked(RightAction { m: act.m, units })?,
    );
    let one = T::one();
    let gmp_residual = space.module_residual()? / space.gram().norm().max(one);
    let rebuild = |op: &AdjointableOp<T>, dom: &Arc<VeSpace<T>>| {
        AdjointableOp::from_parts(
            op.matrix().clone(),
            op.adjoint_matrix().clone(),
            dom.clone(),
            space.clone(),
        )
    };
    let mut v_residual = T::zero();
    for op in v {
        let r = rebuild(op, h)?.module_map_residual()?;
        v_residual = v_residual.max(r / op.matrix().norm().max(one));
    }
    let mut pi_residual = T::zero();
    for op in pi {
        let r = rebuild(op, &space)?.module_map_residual()?;
        pi_residual = pi_residual.max(r / op.matrix().norm().max(one));
    }
    let pass = gmp_residual <= tol && v_residual <= tol && pi_residual <= tol;
    Ok(ModuleCertificate {
        space,
        gmp_residual,
        v_residual,
        pi_residual,
        pass,
    })
}

/// Linearisation over a VE-module together with its module certificate.
#[derive(Debug, Clone)]
pub struct ModuleDilation<T: Real> {
    pub linearisation: InvariantLinearisation<T>,
    pub certificate: ModuleCertificate<T>,
}

/// Builds the minimal invariant linearisation of a kernel on a VE-module
/// `H` and certifies that `K` inherits the module structure with `V(x)`,
/// `pi(xi)` module maps. Fails with `ModuleViolation` if not.
pub fn module_dilate<T: Real>(
    k: &OperatorKernel<T>,
    a: &SemigroupAction,
    tol: T,
) -> Result<ModuleDilation<T>> {
    if k.h().module().is_none() {
        return Err(Error::NotAModule);
    }
    let l = InvariantLinearisation::construct(k, a, tol)?;
    let q = l.quotient().expect("constructed linearisations keep their quotient");
    let v: Vec<&AdjointableOp<T>> = l.v_all().iter().collect();
    let pi: Vec<&AdjointableOp<T>> = l.pi_all().iter().collect();
    let cert = certify_module(q, k.n_points(), k.h(), &v, &pi, tol)?;
    if !cert.pass {
        let worst = linalg::max_of([cert.gmp_residual, cert.v_residual, cert.pi_residual]);
        return Err(Error::ModuleViolation {
            what: "module identities on K".into(),
            residual: to_f64(worst),
        });
    }
    Ok(ModuleDilation {
        linearisation: l,
        certificate: cert,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linearise::trivial_action;

    #[test]
    fn identity_kernel_on_matrix_module() {
        let h = Arc::new(VeSpace::<f64>::matrix_module(2, 2));
        let k = OperatorKernel::identity(vec!["a".into(), "b".into()], h).unwrap();
        let d = module_dilate(&k, &trivial_action(2), 1e-9).unwrap();
        assert!(d.certificate.gmp_residual <= 1e-10);
        assert!(d.certificate.v_residual <= 1e-10);
        assert!(d.certificate.pi_residual <= 1e-10);
        assert_eq!(d.linearisation.dim_k(), 8);
    }

    #[test]
    fn zero_kernel_is_certified() {
        let h = Arc::new(VeSpace::<f64>::matrix_module(2, 2));
        let k = OperatorKernel::zero(vec!["a".into()], h).unwrap();
        let d = module_dilate(&k, &trivial_action(1), 1e-9).unwrap();
        assert_eq!(d.linearisation.dim_k(), 0);
        assert!(d.certificate.pass);
    }

    #[test]
    fn plain_space_is_not_a_module() {
        let h = Arc::new(VeSpace::<f64>::hilbert(2));
        let k = OperatorKernel::identity(vec!["a".into()], h).unwrap();
        assert!(matches!(
            module_dilate(&k, &trivial_action(1), 1e-9),
            Err(Error::NotAModule)
        ));
    }
}
