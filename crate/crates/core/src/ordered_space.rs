//! Concrete ordered *-spaces used as gramian values.
//!
//! Every element is stored as one square complex matrix of size
//! [`Descriptor::size`]: a scalar is `1 x 1`, `MatrixAlg(m)` and
//! `ScalarKernelSpace(n)` are full matrices, and a finite product is the
//! block-diagonal matrix of its factors. With this layout the involution is
//! the conjugate transpose for every kind, and the cone is "each diagonal
//! block is positive".

use serde::{Deserialize, Serialize};

use crate::linalg::{self, cr, zeros};
use crate::{CMat, Error, Real, Result, C};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Descriptor {
    Scalar,
    MatrixAlg { m: usize },
    Product { factors: Vec<Descriptor> },
    ScalarKernelSpace { n: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeafKind {
    Scalar,
    Matrix,
    Kernel,
}

/// A diagonal block of the matrix layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Leaf {
    pub offset: usize,
    pub size: usize,
    pub kind: LeafKind,
}

impl Descriptor {
    pub fn matrix_alg(m: usize) -> Self {
        Descriptor::MatrixAlg { m }
    }

    pub fn product(factors: Vec<Descriptor>) -> Self {
        Descriptor::Product { factors }
    }

    pub fn kernel_space(n: usize) -> Self {
        Descriptor::ScalarKernelSpace { n }
    }

    /// Side length of the matrix layout.
    pub fn size(&self) -> usize {
        match self {
            Descriptor::Scalar => 1,
            Descriptor::MatrixAlg { m } => *m,
            Descriptor::ScalarKernelSpace { n } => *n,
            Descriptor::Product { factors } => factors.iter().map(Descriptor::size).sum(),
        }
    }

    pub fn leaves(&self) -> Vec<Leaf> {
        let mut out = Vec::new();
        self.collect_leaves(0, &mut out);
        out
    }

    fn collect_leaves(&self, offset: usize, out: &mut Vec<Leaf>) -> usize {
        match self {
            Descriptor::Scalar => {
                out.push(Leaf {
                    offset,
                    size: 1,
                    kind: LeafKind::Scalar,
                });
                offset + 1
            }
            Descriptor::MatrixAlg { m } => {
                out.push(Leaf {
                    offset,
                    size: *m,
                    kind: LeafKind::Matrix,
                });
                offset + m
            }
            Descriptor::ScalarKernelSpace { n } => {
                out.push(Leaf {
                    offset,
                    size: *n,
                    kind: LeafKind::Kernel,
                });
                offset + n
            }
            Descriptor::Product { factors } => factors
                .iter()
                .fold(offset, |o, f| f.collect_leaves(o, out)),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Descriptor::Scalar => Ok(()),
            Descriptor::MatrixAlg { m } if *m == 0 => {
                Err(Error::DescriptorMismatch("MatrixAlg needs m >= 1".into()))
            }
            Descriptor::ScalarKernelSpace { n } if *n == 0 => Err(Error::DescriptorMismatch(
                "ScalarKernelSpace needs n >= 1".into(),
            )),
            Descriptor::Product { factors } => {
                if factors.is_empty() {
                    return Err(Error::DescriptorMismatch("empty product".into()));
                }
                factors.iter().try_for_each(Descriptor::validate)
            }
            _ => Ok(()),
        }
    }

    /// True when the matrix layout has no forced zeros (not a product of
    /// two or more factors).
    pub fn is_dense(&self) -> bool {
        self.leaves().len() == 1
    }

    /// Zeroes the entries outside the diagonal blocks.
    pub fn mask<T: Real>(&self, a: &CMat<T>) -> CMat<T> {
        if self.is_dense() {
            return a.clone();
        }
        let mut out = zeros::<T>(a.nrows(), a.ncols());
        for leaf in self.leaves() {
            out.view_mut((leaf.offset, leaf.offset), (leaf.size, leaf.size))
                .copy_from(&a.view((leaf.offset, leaf.offset), (leaf.size, leaf.size)));
        }
        out
    }
}

/// An element of a concrete ordered *-space.
#[derive(Debug, Clone, PartialEq)]
pub struct ZElement<T: Real> {
    desc: Descriptor,
    value: CMat<T>,
}

impl<T: Real> ZElement<T> {
    pub fn new(desc: Descriptor, value: CMat<T>) -> Result<Self> {
        let m = desc.size();
        if value.shape() != (m, m) {
            return Err(Error::DescriptorMismatch(format!(
                "expected {m}x{m} payload, got {:?}",
                value.shape()
            )));
        }
        if !desc.is_dense() {
            let off = (&value - desc.mask(&value)).norm();
            if off > T::zero() {
                return Err(Error::DescriptorMismatch(
                    "product element has entries outside its factor blocks".into(),
                ));
            }
        }
        Ok(Self { desc, value })
    }

    /// Builds an element without checking the product block structure; the
    /// off-block part is discarded.
    pub fn from_masked(desc: Descriptor, value: &CMat<T>) -> Self {
        let value = desc.mask(value);
        Self { desc, value }
    }

    pub fn scalar(z: C<T>) -> Self {
        Self {
            desc: Descriptor::Scalar,
            value: CMat::from_element(1, 1, z),
        }
    }

    pub fn zero(desc: Descriptor) -> Self {
        let m = desc.size();
        Self {
            desc,
            value: zeros(m, m),
        }
    }

    pub fn unit(desc: Descriptor) -> Self {
        let m = desc.size();
        Self {
            desc,
            value: linalg::identity(m),
        }
    }

    /// Elementwise product of a list of factor elements.
    pub fn product(parts: Vec<ZElement<T>>) -> Self {
        let desc = Descriptor::product(parts.iter().map(|p| p.desc.clone()).collect());
        let blocks: Vec<CMat<T>> = parts.into_iter().map(|p| p.value).collect();
        Self {
            desc,
            value: linalg::block_diag(&blocks),
        }
    }

    pub fn descriptor(&self) -> &Descriptor {
        &self.desc
    }

    pub fn value(&self) -> &CMat<T> {
        &self.value
    }

    pub fn into_value(self) -> CMat<T> {
        self.value
    }

    pub fn norm(&self) -> T {
        self.value.norm()
    }

    /// `z*`. For kernels this is `k*(x, y) = conj(k(y, x))`, which in the
    /// matrix layout is again the conjugate transpose.
    pub fn involute(&self) -> Self {
        Self {
            desc: self.desc.clone(),
            value: self.value.adjoint(),
        }
    }

    pub fn is_selfadjoint(&self, tol: T) -> bool {
        linalg::hermitian_residual(&self.value) <= tol * self.value.norm()
    }

    /// Cone membership up to `tol`.
    ///
    /// Scalars: real part `>= -tol` and `|imag| <= tol`. Matrix and kernel
    /// blocks: Hermitian to `tol * |block|` and smallest eigenvalue
    /// `>= -tol * |block|`.
    pub fn in_cone(&self, tol: T) -> bool {
        self.desc.leaves().iter().all(|leaf| {
            let b = self
                .value
                .view((leaf.offset, leaf.offset), (leaf.size, leaf.size))
                .into_owned();
            match leaf.kind {
                LeafKind::Scalar => {
                    let z = b[(0, 0)];
                    z.re >= -tol && z.im.abs() <= tol
                }
                LeafKind::Matrix | LeafKind::Kernel => linalg::psd_test(&b, tol).pass,
            }
        })
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.desc != other.desc {
            return Err(Error::DescriptorMismatch(format!(
                "{:?} vs {:?}",
                self.desc, other.desc
            )));
        }
        Ok(())
    }

    /// `self <= other`, i.e. `other - self` lies in the cone.
    pub fn leq(&self, other: &Self, tol: T) -> Result<bool> {
        self.same_shape(other)?;
        Ok(other.sub(self)?.in_cone(tol))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(Self {
            desc: self.desc.clone(),
            value: &self.value + &other.value,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(Self {
            desc: self.desc.clone(),
            value: &self.value - &other.value,
        })
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self {
            desc: self.desc.clone(),
            value: &self.value * s,
        }
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.scale(cr(s))
    }

    /// Schur (entrywise) product of two scalar kernels.
    pub fn schur_product(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        if !matches!(self.desc, Descriptor::ScalarKernelSpace { .. }) {
            return Err(Error::DescriptorMismatch(
                "Schur product is defined on ScalarKernelSpace only".into(),
            ));
        }
        Ok(Self {
            desc: self.desc.clone(),
            value: self.value.component_mul(&other.value),
        })
    }

    /// Algebra product: matrix product for scalars, matrix algebras and
    /// their products; Schur product for kernels.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        match self.desc {
            Descriptor::ScalarKernelSpace { .. } => self.schur_product(other),
            _ => Ok(Self {
                desc: self.desc.clone(),
                value: &self.value * &other.value,
            }),
        }
    }
}

/// A 2-point scalar kernel `k` for which `k* k` (involution composed with
/// the Schur product) is not positive semidefinite, although the Schur
/// product of two positive kernels always is.
pub fn schur_counterexample<T: Real>() -> ZElement<T> {
    let v = CMat::from_row_slice(
        2,
        2,
        &[linalg::c(1., 0.), linalg::c(2., 0.), linalg::c(3., 0.), linalg::c(1., 0.)],
    );
    ZElement {
        desc: Descriptor::kernel_space(2),
        value: v,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn mat(m: usize, entries: &[(f64, f64)]) -> CMat<f64> {
        CMat::from_row_slice(m, m, &entries.iter().map(|&(r, i)| c(r, i)).collect::<Vec<_>>())
    }

    #[test]
    fn scalar_involution_conjugates() {
        let z = ZElement::scalar(c::<f64>(2., 3.));
        assert_eq!(z.involute().value()[(0, 0)], c(2., -3.));
        assert_eq!(z.involute().involute(), z);
    }

    #[test]
    fn matrix_involution_is_conjugate_transpose() {
        let z = ZElement::new(
            Descriptor::matrix_alg(2),
            mat(2, &[(0., 0.), (1., 0.), (0., 0.), (0., 0.)]),
        )
        .unwrap();
        assert_eq!(
            z.involute().value(),
            &mat(2, &[(0., 0.), (0., 0.), (1., 0.), (0., 0.)])
        );
    }

    #[test]
    fn product_involution_is_componentwise() {
        let a = ZElement::scalar(c::<f64>(1., 1.));
        let b = ZElement::new(
            Descriptor::matrix_alg(2),
            mat(2, &[(0., 0.), (1., 2.), (0., 0.), (0., 0.)]),
        )
        .unwrap();
        let p = ZElement::product(vec![a.clone(), b.clone()]);
        let q = ZElement::product(vec![a.involute(), b.involute()]);
        assert_eq!(p.involute(), q);
    }

    #[test]
    fn cone_examples() {
        let i2 = ZElement::<f64>::unit(Descriptor::matrix_alg(2));
        assert!(i2.in_cone(1e-9));
        let bad = ZElement::new(
            Descriptor::matrix_alg(2),
            mat(2, &[(1., 0.), (2., 0.), (2., 0.), (1., 0.)]),
        )
        .unwrap();
        assert!(!bad.in_cone(1e-9));
        assert!(!ZElement::scalar(c::<f64>(-1., 0.)).in_cone(1e-9));
        assert!(!ZElement::scalar(c::<f64>(1., 0.5)).in_cone(1e-9));
    }

    #[test]
    fn order_examples() {
        let one = ZElement::scalar(c::<f64>(1., 0.));
        let two = ZElement::scalar(c::<f64>(2., 0.));
        assert!(one.leq(&two, 1e-9).unwrap());
        let d = Descriptor::matrix_alg(2);
        let zero = ZElement::<f64>::zero(d.clone());
        let id = ZElement::<f64>::unit(d.clone());
        assert!(zero.leq(&id, 1e-9).unwrap());
        let e11 = ZElement::new(d, mat(2, &[(1., 0.), (0., 0.), (0., 0.), (0., 0.)])).unwrap();
        assert!(!id.leq(&e11, 1e-9).unwrap());
        assert!(matches!(one.leq(&id, 1e-9), Err(Error::DescriptorMismatch(_))));
    }

    #[test]
    fn product_rejects_off_block_entries() {
        let d = Descriptor::product(vec![Descriptor::Scalar, Descriptor::Scalar]);
        let v = mat(2, &[(1., 0.), (1., 0.), (0., 0.), (1., 0.)]);
        assert!(ZElement::new(d, v).is_err());
    }

    #[test]
    fn product_cone_needs_every_factor() {
        let p = ZElement::product(vec![
            ZElement::scalar(c::<f64>(1., 0.)),
            ZElement::new(
                Descriptor::matrix_alg(2),
                mat(2, &[(1., 0.), (0., 0.), (0., 0.), (-1., 0.)]),
            )
            .unwrap(),
        ]);
        assert!(!p.in_cone(1e-9));
    }

    #[test]
    fn schur_units() {
        let d = Descriptor::kernel_space(3);
        let ones = ZElement::<f64>::new(d.clone(), CMat::from_element(3, 3, c(1., 0.))).unwrap();
        let k = ZElement::new(
            d.clone(),
            mat(
                3,
                &[
                    (2., 0.),
                    (1., 1.),
                    (0., 0.),
                    (1., -1.),
                    (2., 0.),
                    (0.5, 0.),
                    (0., 0.),
                    (0.5, 0.),
                    (1., 0.),
                ],
            ),
        )
        .unwrap();
        assert_eq!(ones.schur_product(&k).unwrap(), k);
        let id = ZElement::<f64>::unit(d);
        assert_eq!(id.schur_product(&id).unwrap(), id);
        let m = ZElement::<f64>::unit(Descriptor::matrix_alg(3));
        assert!(m.schur_product(&m).is_err());
    }

    #[test]
    fn pinned_counterexample_is_not_positive() {
        // k* k = [[1, 6], [6, 1]] with eigenvalues 7 and -5.
        let k = schur_counterexample::<f64>();
        let kk = k.involute().schur_product(&k).unwrap();
        assert_eq!(kk.value(), &mat(2, &[(1., 0.), (6., 0.), (6., 0.), (1., 0.)]));
        assert!(!kk.in_cone(1e-9));
    }
}
