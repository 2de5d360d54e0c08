//! Dense complex linear algebra shared by every module.
//!
//! Flattened layout: a `Z`-valued matrix `[G_ij]` over a `Z` of size `M` is
//! stored as a `(d*M) x (d*M)` complex matrix whose `(i, j)` block of size
//! `M x M` is `G_ij`.

use nalgebra::linalg::SymmetricEigen;
use nalgebra::{Complex, DMatrix, DVector};

use crate::{lit, CMat, CVec, Real, C};

#[inline]
pub fn c<T: Real>(re: f64, im: f64) -> C<T> {
    Complex::new(lit(re), lit(im))
}

#[inline]
pub fn cr<T: Real>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}

pub fn identity<T: Real>(n: usize) -> CMat<T> {
    DMatrix::identity(n, n)
}

pub fn zeros<T: Real>(r: usize, c: usize) -> CMat<T> {
    DMatrix::zeros(r, c)
}

/// `a ⊗ I_m`.
pub fn kron_id<T: Real>(a: &CMat<T>, m: usize) -> CMat<T> {
    if m == 1 {
        return a.clone();
    }
    a.kronecker(&identity::<T>(m))
}

/// `I_n ⊗ a`.
pub fn id_kron<T: Real>(n: usize, a: &CMat<T>) -> CMat<T> {
    identity::<T>(n).kronecker(a)
}

pub fn fro<T: Real>(a: &CMat<T>) -> T {
    a.norm()
}

pub fn hermitian_part<T: Real>(a: &CMat<T>) -> CMat<T> {
    (a + a.adjoint()) * cr(lit::<T>(0.5))
}

pub fn hermitian_residual<T: Real>(a: &CMat<T>) -> T {
    (a - a.adjoint()).norm()
}

/// Eigenvalues (ascending) and eigenvectors of the Hermitian part of `a`.
pub fn eigh<T: Real>(a: &CMat<T>) -> (DVector<T>, CMat<T>) {
    let n = a.nrows();
    if n == 0 {
        return (DVector::zeros(0), zeros(0, 0));
    }
    let eig = SymmetricEigen::new(hermitian_part(a));
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .partial_cmp(&eig.eigenvalues[j])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let vals = DVector::from_iterator(n, idx.iter().map(|&i| eig.eigenvalues[i]));
    let mut vecs = zeros::<T>(n, n);
    for (k, &i) in idx.iter().enumerate() {
        vecs.set_column(k, &eig.eigenvectors.column(i));
    }
    (vals, vecs)
}

pub fn min_eigenvalue<T: Real>(a: &CMat<T>) -> T {
    if a.nrows() == 0 {
        return T::zero();
    }
    eigh(a).0[0]
}

pub fn max_eigenvalue<T: Real>(a: &CMat<T>) -> T {
    let n = a.nrows();
    if n == 0 {
        return T::zero();
    }
    eigh(a).0[n - 1]
}

/// Outcome of a relative-tolerance PSD test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdTest<T> {
    pub pass: bool,
    pub min_eigenvalue: T,
    pub hermitian_residual: T,
    pub scale: T,
}

/// PSD up to `tol` relative to the Frobenius norm: Hermitian to `tol*|a|`
/// and smallest eigenvalue at least `-tol*|a|`.
pub fn psd_test<T: Real>(a: &CMat<T>, tol: T) -> PsdTest<T> {
    let scale = a.norm();
    let herm = hermitian_residual(a);
    let min_eigenvalue = min_eigenvalue(a);
    let pass = herm <= tol * scale && min_eigenvalue >= -tol * scale;
    PsdTest {
        pass,
        min_eigenvalue,
        hermitian_residual: herm,
        scale,
    }
}

/// Full singular value decomposition: `a = u diag(s) v^H` with `u` and `v`
/// square and `s` descending, padded with zeros to `cols` entries.
/// Computed in double precision with faer; nalgebra's complex SVD loses
/// accuracy on some well-conditioned inputs.
pub struct FullSvd<T: Real> {
    pub singular_values: Vec<T>,
    pub u: CMat<T>,
    /// Columns are right singular vectors, ordered like `singular_values`.
    pub v: CMat<T>,
}

pub fn full_svd<T: Real>(a: &CMat<T>) -> FullSvd<T> {
    let (r, cols) = a.shape();
    if r == 0 || cols == 0 {
        return FullSvd {
            singular_values: vec![T::zero(); cols],
            u: identity(r),
            v: identity(cols),
        };
    }
    let fa = faer::Mat::<faer::c64>::from_fn(r, cols, |i, j| {
        let z = a[(i, j)];
        faer::c64::new(crate::to_f64(z.re), crate::to_f64(z.im))
    });
    let back = |z: faer::c64| Complex::new(lit::<T>(z.re), lit::<T>(z.im));
    let svd = fa.svd().expect("SVD converges on finite input");
    let (fu, fs, fv) = (svd.U(), svd.S().column_vector(), svd.V());
    let mut s: Vec<T> = (0..r.min(cols)).map(|k| lit(fs[k].re)).collect();
    s.resize(cols, T::zero());
    FullSvd {
        singular_values: s,
        u: DMatrix::from_fn(r, r, |i, j| back(fu[(i, j)])),
        v: DMatrix::from_fn(cols, cols, |i, j| back(fv[(i, j)])),
    }
}

/// Splits the column space of `a` into (range of `a^H`, null space of `a`)
/// using a relative singular-value threshold. Returns orthonormal bases.
pub fn range_null_split<T: Real>(a: &CMat<T>, rtol: T) -> (CMat<T>, CMat<T>) {
    let cols = a.ncols();
    let svd = full_svd(a);
    let smax = svd.singular_values.first().copied().unwrap_or(T::zero());
    let rank = svd
        .singular_values
        .iter()
        .take_while(|&&s| smax > T::zero() && s > rtol * smax)
        .count();
    let range = svd.v.columns(0, rank).into_owned();
    let null = svd.v.columns(rank, cols - rank).into_owned();
    (range, null)
}

pub fn rank<T: Real>(a: &CMat<T>, rtol: T) -> usize {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0;
    }
    let svd = full_svd(a);
    let smax = svd.singular_values.first().copied().unwrap_or(T::zero());
    svd.singular_values
        .iter()
        .filter(|&&s| smax > T::zero() && s > rtol * smax)
        .count()
}

/// Moore-Penrose pseudo-inverse with a relative singular-value cutoff.
pub fn pinv<T: Real>(a: &CMat<T>, rtol: T) -> CMat<T> {
    let (r, cols) = a.shape();
    let svd = full_svd(a);
    let smax = svd.singular_values.first().copied().unwrap_or(T::zero());
    let mut out = zeros::<T>(cols, r);
    for (k, &s) in svd.singular_values.iter().take(r.min(cols)).enumerate() {
        if smax > T::zero() && s > rtol * smax {
            out += svd.v.column(k) * (svd.u.column(k).adjoint() * cr(T::one() / s));
        }
    }
    out
}

/// Column-stacked vectorisation.
pub fn vec_of<T: Real>(a: &CMat<T>) -> CVec<T> {
    DVector::from_column_slice(a.as_slice())
}

/// Strictness matrix of a flattened gramian: column `c` is the
/// vectorisation of the `c`-th block column `F[:, c*M..(c+1)*M]`. A
/// coefficient vector `x` has `[x, x] = 0` exactly when `A x = 0`.
pub fn strictness_matrix<T: Real>(flat: &CMat<T>, m: usize) -> CMat<T> {
    let n = flat.nrows();
    let d = if m == 0 { 0 } else { n / m };
    let mut a = zeros::<T>(n * m, d);
    for col in 0..d {
        let block = flat.columns(col * m, m).into_owned();
        a.set_column(col, &vec_of(&block));
    }
    a
}

/// Rows `r*m..(r+1)*m`, columns `c*m..(c+1)*m`.
pub fn block<T: Real>(a: &CMat<T>, r: usize, c: usize, m: usize) -> CMat<T> {
    a.view((r * m, c * m), (m, m)).into_owned()
}

pub fn set_block<T: Real>(a: &mut CMat<T>, r: usize, c: usize, b: &CMat<T>) {
    let (br, bc) = b.shape();
    a.view_mut((r * br, c * bc), (br, bc)).copy_from(b);
}

/// Block-diagonal matrix from square or rectangular pieces.
pub fn block_diag<T: Real>(parts: &[CMat<T>]) -> CMat<T> {
    let rows: usize = parts.iter().map(|p| p.nrows()).sum();
    let cols: usize = parts.iter().map(|p| p.ncols()).sum();
    let mut out = zeros::<T>(rows, cols);
    let (mut r, mut c) = (0, 0);
    for p in parts {
        out.view_mut((r, c), p.shape()).copy_from(p);
        r += p.nrows();
        c += p.ncols();
    }
    out
}

/// Eigenpairs of the Hermitian part of `a` whose eigenvalue exceeds
/// `rtol * lambda_max`, as `(U, lambda)`.
pub fn positive_eigenspace<T: Real>(a: &CMat<T>, rtol: T) -> (CMat<T>, Vec<T>) {
    let (vals, vecs) = eigh(a);
    let n = vals.len();
    let lmax = if n == 0 { T::zero() } else { vals[n - 1] };
    let keep: Vec<usize> = (0..n)
        .filter(|&i| lmax > T::zero() && vals[i] > rtol * lmax)
        .collect();
    let mut u = zeros::<T>(a.nrows(), keep.len());
    let mut lam = Vec::with_capacity(keep.len());
    for (k, &i) in keep.iter().enumerate() {
        u.set_column(k, &vecs.column(i));
        lam.push(vals[i]);
    }
    (u, lam)
}

pub fn max_of<T: Real>(it: impl IntoIterator<Item = T>) -> T {
    it.into_iter()
        .fold(T::zero(), |m, x| if x > m { x } else { m })
}
