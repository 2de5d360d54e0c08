//! Operator-valued kernels on a finite set.
//!
//! A kernel on `X = {x_0, .., x_{n-1}}` with values in `L*(H)` is stored as
//! `n x n` adjointable blocks. Two flattened matrices drive everything:
//!
//! * the positivity matrix, block `(a, b) = (k(x_b, x_a) ⊗ I)^H G_H`, whose
//!   quadratic form on `h = (h_0, .., h_{n-1})` is
//!   `sum_ij [k(x_i, x_j) h_j, h_i]`;
//! * the generator Gram matrix, block `(a, b) = G_H (k(x_a, x_b) ⊗ I)`, the
//!   gramian `[k_{x_a} e_i, k_{x_b} e_j]` of the functions `k_x h`.
//!
//! For Hermitian kernels the two coincide.
//!
//! n-positivity only needs subsets of `X` without repetition: a selection
//! with repeated points is `S ⊗ I` applied to the matrix over its distinct
//! points, and compressions of PSD matrices are PSD. Subsets of size `n`
//! contain every smaller subset, so one size suffices, and for `n >= |X|`
//! the single full test decides.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::linalg::{self, kron_id, zeros};
use crate::operators::{loynes_norm, AdjointableOp};
use crate::ordered_space::ZElement;
use crate::ve_space::VeSpace;
use crate::{CMat, CVec, Error, Real, Result};

#[derive(Debug, Clone)]
pub struct OperatorKernel<T: Real> {
    points: Vec<String>,
    h: Arc<VeSpace<T>>,
    blocks: Vec<AdjointableOp<T>>,
}

/// A function `X -> H` with explicit (finite) support.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FinSuppFunction<T: Real> {
    values: BTreeMap<usize, CVec<T>>,
}

impl<T: Real> FinSuppFunction<T> {
    pub fn new() -> Self {
        Self {
            values: BTreeMap::new(),
        }
    }

    pub fn delta(point: usize, value: CVec<T>) -> Self {
        let mut f = Self::new();
        f.insert(point, value);
        f
    }

    pub fn insert(&mut self, point: usize, value: CVec<T>) {
        self.values.insert(point, value);
    }

    pub fn get(&self, point: usize) -> Option<&CVec<T>> {
        self.values.get(&point)
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.values.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &CVec<T>)> {
        self.values.iter().map(|(&k, v)| (k, v))
    }

    /// Stacked values over all `n` points (zero off the support).
    pub fn stacked(&self, n: usize, d: usize) -> CVec<T> {
        let mut out = CVec::zeros(n * d);
        for (&x, v) in &self.values {
            out.rows_mut(x * d, d).copy_from(v);
        }
        out
    }
}

/// Result of an n-positivity test.
#[derive(Debug, Clone, PartialEq)]
pub struct PositivityTest<T> {
    pub pass: bool,
    /// Smallest eigenvalue over the tested compressions, relative to the
    /// norm of the full positivity matrix.
    pub min_eigenvalue: T,
    /// Points of the worst compression.
    pub witness: Vec<usize>,
}

/// Consequences of 2-positivity.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPositiveReport<T> {
    /// `max |k(x, y) - k(y, x)*|`, relative to `max(1, scale)`.
    pub hermitian_residual: T,
    /// Points with a vanishing diagonal block.
    pub zero_diagonal: Vec<usize>,
    /// `max |k(x, y)|` over rows with `k(x, x) = 0`, relative to
    /// `max(1, scale)`.
    pub zero_row_residual: T,
    /// `max |k(x, y)|^2 - |k(x, x)| |k(y, y)|` with Loynes norms.
    pub schwarz_margin: T,
    /// Whether the Schwarz bound is asserted (scalar-valued gramians, where
    /// the computed norms are exact) or only reported.
    pub schwarz_asserted: bool,
    pub pass: bool,
}

impl<T: Real> OperatorKernel<T> {
    /// Blocks in row-major order: `matrices[a*n + b] = k(x_a, x_b)`.
    pub fn new(
        points: Vec<String>,
        h: Arc<VeSpace<T>>,
        matrices: Vec<CMat<T>>,
        tol: T,
    ) -> Result<Self> {
        let n = points.len();
        if matrices.len() != n * n {
            return Err(Error::ShapeMismatch(format!(
                "{} blocks for {} points",
                matrices.len(),
                n
            )));
        }
        check_unique(&points)?;
        let blocks = matrices
            .into_iter()
            .map(|m| AdjointableOp::solve(m, h.clone(), h.clone(), tol))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { points, h, blocks })
    }

    pub fn from_fn(
        points: Vec<String>,
        h: Arc<VeSpace<T>>,
        tol: T,
        f: impl Fn(usize, usize) -> CMat<T>,
    ) -> Result<Self> {
        let n = points.len();
        let mats = (0..n * n).map(|i| f(i / n, i % n)).collect();
        Self::new(points, h, mats, tol)
    }

    pub fn from_ops(points: Vec<String>, h: Arc<VeSpace<T>>, blocks: Vec<AdjointableOp<T>>) -> Result<Self> {
        let n = points.len();
        if blocks.len() != n * n {
            return Err(Error::ShapeMismatch("block count".into()));
        }
        check_unique(&points)?;
        for b in &blocks {
            if b.domain().as_ref() != h.as_ref() || b.codomain().as_ref() != h.as_ref() {
                return Err(Error::SpaceMismatch("kernel block acts on another space".into()));
            }
        }
        Ok(Self { points, h, blocks })
    }

    /// `k(x, y) = delta_xy I`.
    pub fn identity(points: Vec<String>, h: Arc<VeSpace<T>>) -> Result<Self> {
        let n = points.len();
        let blocks = (0..n * n)
            .map(|i| {
                if i / n == i % n {
                    AdjointableOp::identity(h.clone())
                } else {
                    AdjointableOp::zero(h.clone(), h.clone())
                }
            })
            .collect();
        Self::from_ops(points, h, blocks)
    }

    pub fn zero(points: Vec<String>, h: Arc<VeSpace<T>>) -> Result<Self> {
        let n = points.len();
        let blocks = (0..n * n)
            .map(|_| AdjointableOp::zero(h.clone(), h.clone()))
            .collect();
        Self::from_ops(points, h, blocks)
    }

    pub fn n_points(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn point_index(&self, name: &str) -> Result<usize> {
        self.points
            .iter()
            .position(|p| p == name)
            .ok_or_else(|| Error::UnknownPoint(name.to_string()))
    }

    pub fn h(&self) -> &Arc<VeSpace<T>> {
        &self.h
    }

    pub fn block(&self, x: usize, y: usize) -> &AdjointableOp<T> {
        &self.blocks[x * self.n_points() + y]
    }

    pub fn matrix(&self, x: usize, y: usize) -> &CMat<T> {
        self.block(x, y).matrix()
    }

    /// Largest block norm.
    pub fn scale(&self) -> T {
        linalg::max_of(self.blocks.iter().map(|b| b.matrix().norm()))
    }

    /// `k*(x, y) = k(y, x)*`.
    pub fn adjoint_kernel(&self) -> Self {
        let n = self.n_points();
        let blocks = (0..n * n)
            .map(|i| self.block(i % n, i / n).adjoint())
            .collect();
        Self {
            points: self.points.clone(),
            h: self.h.clone(),
            blocks,
        }
    }

    /// Kernel on the reordered point list `new[i] = old[perm[i]]`.
    pub fn permute_points(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n_points();
        check_perm(perm, n)?;
        let points = perm.iter().map(|&p| self.points[p].clone()).collect();
        let blocks = (0..n * n)
            .map(|i| self.block(perm[i / n], perm[i % n]).clone())
            .collect();
        Ok(Self {
            points,
            h: self.h.clone(),
            blocks,
        })
    }

    /// Kernel restricted to a subset of points, in the given order.
    pub fn restrict(&self, subset: &[usize]) -> Self {
        let points = subset.iter().map(|&p| self.points[p].clone()).collect();
        let blocks = subset
            .iter()
            .flat_map(|&a| subset.iter().map(move |&b| (a, b)))
            .map(|(a, b)| self.block(a, b).clone())
            .collect();
        Self {
            points,
            h: self.h.clone(),
            blocks,
        }
    }

    /// Positivity matrix restricted to the listed points.
    pub fn positivity_matrix_on(&self, pts: &[usize]) -> CMat<T> {
        let d = self.h.dim();
        let m = self.h.zsize();
        let s = d * m;
        let mut out = zeros::<T>(pts.len() * s, pts.len() * s);
        for (a, &pa) in pts.iter().enumerate() {
            for (b, &pb) in pts.iter().enumerate() {
                let blk = kron_id(self.matrix(pb, pa), m).adjoint() * self.h.gram();
                out.view_mut((a * s, b * s), (s, s)).copy_from(&blk);
            }
        }
        out
    }

    pub fn positivity_matrix(&self) -> CMat<T> {
        let all: Vec<usize> = (0..self.n_points()).collect();
        self.positivity_matrix_on(&all)
    }

    /// Flattened Gram matrix of the generators `k_x e_i`, index `x*d + i`.
    pub fn generator_gram(&self) -> CMat<T> {
        let n = self.n_points();
        let d = self.h.dim();
        let m = self.h.zsize();
        let s = d * m;
        let mut out = zeros::<T>(n * s, n * s);
        for a in 0..n {
            for b in 0..n {
                let blk = self.h.gram() * kron_id(self.matrix(a, b), m);
                out.view_mut((a * s, b * s), (s, s)).copy_from(&blk);
            }
        }
        out
    }

    /// n-positivity through the flattened test on every `min(n, |X|)`-point
    /// compression.
    pub fn n_positive(&self, n: usize, tol: T) -> PositivityTest<T> {
        let nx = self.n_points();
        if nx == 0 || self.h.dim() == 0 {
            return PositivityTest {
                pass: true,
                min_eigenvalue: T::zero(),
                witness: vec![],
            };
        }
        let full = self.positivity_matrix();
        let scale = full.norm();
        let size = n.clamp(1, nx);
        let mut best = PositivityTest {
            pass: true,
            min_eigenvalue: T::max_value().unwrap_or(T::one()),
            witness: vec![],
        };
        for subset in combinations(nx, size) {
            let sub = self.positivity_matrix_on(&subset);
            let herm = linalg::hermitian_residual(&sub);
            let ev = linalg::min_eigenvalue(&sub);
            let rel = if scale > T::zero() { ev / scale } else { T::zero() };
            let ok = herm <= tol * scale && ev >= -tol * scale;
            if rel < best.min_eigenvalue || (!ok && best.pass) {
                best.min_eigenvalue = rel;
                best.witness = subset.clone();
            }
            if !ok {
                best.pass = false;
            }
        }
        best
    }

    pub fn positive_semidefinite(&self, tol: T) -> PositivityTest<T> {
        self.n_positive(self.n_points().max(1), tol)
    }

    /// Hermitian symmetry, vanishing rows at zero diagonal entries, and the
    /// Schwarz-type bound, for a 2-positive kernel.
    pub fn two_positive_consequences(&self, tol: T) -> Result<TwoPositiveReport<T>> {
        let t = self.n_positive(2, tol);
        if !t.pass {
            return Err(Error::NotTwoPositive {
                min_eigenvalue: crate::to_f64(t.min_eigenvalue),
            });
        }
        let n = self.n_points();
        let scale = self.scale().max(T::one());
        let mut herm = T::zero();
        for x in 0..n {
            for y in 0..n {
                let r = (self.matrix(x, y) - self.block(y, x).adjoint_matrix()).norm();
                herm = herm.max(r / scale);
            }
        }
        let zero_diagonal: Vec<usize> = (0..n)
            .filter(|&x| self.matrix(x, x).norm() <= tol * scale)
            .collect();
        let zero_row_residual = linalg::max_of(
            zero_diagonal
                .iter()
                .flat_map(|&x| (0..n).map(move |y| (x, y)))
                .map(|(x, y)| self.matrix(x, y).norm() / scale),
        );
        let schwarz_asserted = self.h.zsize() == 1;
        let norms: Vec<T> = self
            .blocks
            .iter()
            .map(|b| loynes_norm(b).map(|c| c.norm()))
            .collect::<Result<_>>()?;
        let mut schwarz = -T::max_value().unwrap_or(T::one());
        for x in 0..n {
            for y in 0..n {
                let v = norms[x * n + y] * norms[x * n + y] - norms[x * n + x] * norms[y * n + y];
                schwarz = schwarz.max(v);
            }
        }
        if n == 0 {
            schwarz = T::zero();
        }
        let pass = herm <= tol
            && zero_row_residual <= crate::lit::<T>(10.0) * tol
            && (!schwarz_asserted || schwarz <= tol * scale * scale);
        Ok(TwoPositiveReport {
            hermitian_residual: herm,
            zero_diagonal,
            zero_row_residual,
            schwarz_margin: schwarz,
            schwarz_asserted,
            pass,
        })
    }

    fn check_function(&self, g: &FinSuppFunction<T>) -> Result<()> {
        for (x, v) in g.iter() {
            if x >= self.n_points() {
                return Err(Error::UnknownPoint(format!("#{x}")));
            }
            if v.len() != self.h.dim() {
                return Err(Error::SpaceMismatch(format!(
                    "function value of length {} in a space of dimension {}",
                    v.len(),
                    self.h.dim()
                )));
            }
        }
        Ok(())
    }

    /// `(K g)(y) = sum_x k(y, x) g(x)` for every `y`.
    pub fn convolution(&self, g: &FinSuppFunction<T>) -> Result<Vec<CVec<T>>> {
        self.check_function(g)?;
        let n = self.n_points();
        Ok((0..n)
            .map(|y| {
                g.iter()
                    .fold(CVec::zeros(self.h.dim()), |acc, (x, v)| acc + self.matrix(y, x) * v)
            })
            .collect())
    }

    /// `sum_y [g(y), h(y)]_H` for an arbitrary `g: X -> H` and finitely
    /// supported `h`.
    pub fn pairing_f0(&self, g: &[CVec<T>], h: &FinSuppFunction<T>) -> Result<ZElement<T>> {
        self.check_function(h)?;
        let mut acc = ZElement::zero(self.h.z().clone());
        for (y, hv) in h.iter() {
            let gv = g
                .get(y)
                .ok_or_else(|| Error::UnknownPoint(format!("#{y}")))?;
            acc = acc.add(&self.h.gramian(gv, hv)?)?;
        }
        Ok(acc)
    }

    /// `[g, h]_k = sum_{x, y} [k(y, x) g(x), h(y)]_H`.
    pub fn pairing_k(&self, g: &FinSuppFunction<T>, h: &FinSuppFunction<T>) -> Result<ZElement<T>> {
        self.check_function(g)?;
        self.check_function(h)?;
        let mut acc = ZElement::zero(self.h.z().clone());
        for (x, gv) in g.iter() {
            for (y, hv) in h.iter() {
                acc = acc.add(&self.h.gramian(&(self.matrix(y, x) * gv), hv)?)?;
            }
        }
        Ok(acc)
    }
}

fn check_unique(points: &[String]) -> Result<()> {
    let mut seen = std::collections::BTreeSet::new();
    for p in points {
        if !seen.insert(p) {
            return Err(Error::Schema(format!("duplicate point name {p:?}")));
        }
    }
    Ok(())
}

pub(crate) fn check_perm(perm: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(Error::ShapeMismatch("permutation length".into()));
    }
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::ShapeMismatch("not a permutation".into()));
        }
        seen[p] = true;
    }
    Ok(())
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}
