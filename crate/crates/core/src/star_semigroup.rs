//! Finite *-semigroups given by tables, their actions on finite sets, and
//! invariance of kernels under an action.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::kernels::{check_perm, OperatorKernel};
use crate::{Error, Real, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarSemigroup {
    elements: Vec<String>,
    mul: Vec<Vec<usize>>,
    star: Vec<usize>,
    unit: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SemigroupViolation {
    /// `(ab)c != a(bc)`
    Associativity(usize, usize, usize),
    /// `(ab)* != b* a*`
    StarAntiMultiplicative(usize, usize),
    /// `(a*)* != a`
    StarInvolutive(usize),
    /// `e a != a` or `a e != a`
    Unit(usize),
    /// `e* != e`
    UnitNotSelfadjoint,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ActionViolation {
    /// `a.(b.x) != (ab).x`
    Composition { a: usize, b: usize, x: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TableReport<V> {
    pub violations: Vec<V>,
}

impl<V> TableReport<V> {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Report of [`SemigroupAction::validate`]; `unital` is set when the unit
/// acts trivially.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionReport {
    pub violations: Vec<ActionViolation>,
    pub unital: bool,
}

impl ActionReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

impl StarSemigroup {
    /// Checks table shapes and index ranges only; see [`Self::validate`]
    /// for the algebraic axioms.
    pub fn new(
        elements: Vec<String>,
        mul: Vec<Vec<usize>>,
        star: Vec<usize>,
        unit: Option<usize>,
    ) -> Result<Self> {
        let n = elements.len();
        if n == 0 {
            return Err(Error::InvalidSemigroup("empty semigroup".into()));
        }
        if mul.len() != n || mul.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidSemigroup("multiplication table is not n x n".into()));
        }
        if star.len() != n {
            return Err(Error::InvalidSemigroup("star table length".into()));
        }
        if mul.iter().flatten().chain(&star).chain(unit.iter()).any(|&i| i >= n) {
            return Err(Error::InvalidSemigroup("table index out of range".into()));
        }
        Ok(Self {
            elements,
            mul,
            star,
            unit,
        })
    }

    /// `Z_n` with `g* = g^{-1}`; element `k` is `g^k`, unit `0`.
    pub fn cyclic(n: usize) -> Self {
        let elements = (0..n).map(|k| format!("g{k}")).collect();
        let mul = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        let star = (0..n).map(|a| (n - a) % n).collect();
        Self::new(elements, mul, star, Some(0)).expect("valid cyclic group")
    }

    /// The symmetric group on three letters, `g* = g^{-1}`.
    pub fn symmetric3() -> Self {
        let perms: Vec<[usize; 3]> = vec![
            [0, 1, 2],
            [1, 0, 2],
            [0, 2, 1],
            [2, 1, 0],
            [1, 2, 0],
            [2, 0, 1],
        ];
        let idx = |p: [usize; 3]| perms.iter().position(|q| *q == p).expect("closed");
        let compose = |a: [usize; 3], b: [usize; 3]| [a[b[0]], a[b[1]], a[b[2]]];
        let mul = perms
            .iter()
            .map(|&a| perms.iter().map(|&b| idx(compose(a, b))).collect())
            .collect();
        let star = perms
            .iter()
            .map(|&a| {
                let mut inv = [0; 3];
                for (i, &ai) in a.iter().enumerate() {
                    inv[ai] = i;
                }
                idx(inv)
            })
            .collect();
        let elements = perms
            .iter()
            .map(|p| format!("s{}{}{}", p[0], p[1], p[2]))
            .collect();
        Self::new(elements, mul, star, Some(0)).expect("valid S3")
    }

    /// `Z_2 x Z_2`.
    pub fn klein4() -> Self {
        let elements = ["e", "a", "b", "ab"].map(String::from).to_vec();
        let mul = (0..4).map(|x: usize| (0..4).map(|y: usize| x ^ y).collect()).collect();
        Self::new(elements, mul, vec![0, 1, 2, 3], Some(0)).expect("valid Klein group")
    }

    /// Chain `{0, .., k-1}` under `max` with trivial star; unit `0`.
    pub fn semilattice_chain(k: usize) -> Self {
        let elements = (0..k).map(|i| format!("p{i}")).collect();
        let mul = (0..k).map(|a| (0..k).map(|b| a.max(b)).collect()).collect();
        Self::new(elements, mul, (0..k).collect(), Some(0)).expect("valid chain")
    }

    /// `{e, 0, p, q, r}`: unit, zero, and three commuting projections with
    /// `pq = 0` and `pr = p`, `qr = q`; a *-representation sending
    /// `p, q` to orthogonal projections `P, Q` and `r` to `P + Q` exists.
    pub fn orthogonal_projections() -> Self {
        let elements = ["e", "0", "p", "q", "r"].map(String::from).to_vec();
        // indices: e=0, zero=1, p=2, q=3, r=4
        let prod = |a: usize, b: usize| -> usize {
            match (a, b) {
                (0, x) | (x, 0) => x,
                (1, _) | (_, 1) => 1,
                (x, y) if x == y => x,
                (2, 3) | (3, 2) => 1,
                (2, 4) | (4, 2) => 2,
                (3, 4) | (4, 3) => 3,
                _ => unreachable!(),
            }
        };
        let mul = (0..5).map(|a| (0..5).map(|b| prod(a, b)).collect()).collect();
        Self::new(elements, mul, (0..5).collect(), Some(0)).expect("valid projection semigroup")
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn index(&self, name: &str) -> Result<usize> {
        self.elements
            .iter()
            .position(|e| e == name)
            .ok_or_else(|| Error::InvalidSemigroup(format!("unknown element {name:?}")))
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a][b]
    }

    pub fn star(&self, a: usize) -> usize {
        self.star[a]
    }

    pub fn unit(&self) -> Option<usize> {
        self.unit
    }

    pub fn mul_table(&self) -> &[Vec<usize>] {
        &self.mul
    }

    pub fn star_table(&self) -> &[usize] {
        &self.star
    }

    pub fn validate(&self) -> TableReport<SemigroupViolation> {
        let n = self.len();
        let mut violations = Vec::new();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                        violations.push(SemigroupViolation::Associativity(a, b, c));
                    }
                }
                if self.star(self.mul(a, b)) != self.mul(self.star(b), self.star(a)) {
                    violations.push(SemigroupViolation::StarAntiMultiplicative(a, b));
                }
            }
            if self.star(self.star(a)) != a {
                violations.push(SemigroupViolation::StarInvolutive(a));
            }
        }
        if let Some(e) = self.unit {
            for a in 0..n {
                if self.mul(e, a) != a || self.mul(a, e) != a {
                    violations.push(SemigroupViolation::Unit(a));
                }
            }
            if self.star(e) != e {
                violations.push(SemigroupViolation::UnitNotSelfadjoint);
            }
        }
        TableReport { violations }
    }

    /// Same semigroup with elements listed in the order `new[i] = old[perm[i]]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        let n = self.len();
        check_perm(perm, n)?;
        let mut inv = vec![0; n];
        for (i, &p) in perm.iter().enumerate() {
            inv[p] = i;
        }
        let elements = perm.iter().map(|&p| self.elements[p].clone()).collect();
        let mul = (0..n)
            .map(|a| (0..n).map(|b| inv[self.mul(perm[a], perm[b])]).collect())
            .collect();
        let star = (0..n).map(|a| inv[self.star(perm[a])]).collect();
        let unit = self.unit.map(|e| inv[e]);
        Self::new(elements, mul, star, unit)
    }
}

/// `act[xi][x] = xi . x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemigroupAction {
    semigroup: Arc<StarSemigroup>,
    n_points: usize,
    act: Vec<Vec<usize>>,
}

impl SemigroupAction {
    pub fn new(semigroup: Arc<StarSemigroup>, n_points: usize, act: Vec<Vec<usize>>) -> Result<Self> {
        if act.len() != semigroup.len() || act.iter().any(|r| r.len() != n_points) {
            return Err(Error::InvalidSemigroup("action table is not |G| x |X|".into()));
        }
        if act.iter().flatten().any(|&x| x >= n_points) {
            return Err(Error::InvalidSemigroup("action index out of range".into()));
        }
        Ok(Self {
            semigroup,
            n_points,
            act,
        })
    }

    /// `xi . x = x`.
    pub fn trivial(semigroup: Arc<StarSemigroup>, n_points: usize) -> Self {
        let act = (0..semigroup.len()).map(|_| (0..n_points).collect()).collect();
        Self {
            semigroup,
            n_points,
            act,
        }
    }

    /// The semigroup acting on itself by left multiplication.
    pub fn left_multiplication(semigroup: Arc<StarSemigroup>) -> Self {
        let n = semigroup.len();
        let act = (0..n)
            .map(|a| (0..n).map(|b| semigroup.mul(a, b)).collect())
            .collect();
        Self {
            semigroup,
            n_points: n,
            act,
        }
    }

    pub fn semigroup(&self) -> &Arc<StarSemigroup> {
        &self.semigroup
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn act(&self, xi: usize, x: usize) -> usize {
        self.act[xi][x]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.act
    }

    pub fn validate(&self) -> ActionReport {
        let sg = &self.semigroup;
        let mut violations = Vec::new();
        for a in 0..sg.len() {
            for b in 0..sg.len() {
                for x in 0..self.n_points {
                    if self.act(a, self.act(b, x)) != self.act(sg.mul(a, b), x) {
                        violations.push(ActionViolation::Composition { a, b, x });
                    }
                }
            }
        }
        let unital = sg
            .unit()
            .is_some_and(|e| (0..self.n_points).all(|x| self.act(e, x) == x));
        ActionReport { violations, unital }
    }

    /// Action on the reordered points `new[i] = old[perm[i]]`.
    pub fn permute_points(&self, perm: &[usize]) -> Result<Self> {
        check_perm(perm, self.n_points)?;
        let mut inv = vec![0; self.n_points];
        for (i, &p) in perm.iter().enumerate() {
            inv[p] = i;
        }
        let act = self
            .act
            .iter()
            .map(|row| perm.iter().map(|&p| inv[row[p]]).collect())
            .collect();
        Self::new(self.semigroup.clone(), self.n_points, act)
    }
}

/// Outcome of [`check_invariance`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvarianceReport<T> {
    pub pass: bool,
    /// `max |k(y, xi.x) - k(xi*.y, x)|`, relative to `max(1, scale)`.
    pub residual: T,
    /// `(xi, x, y)` attaining the residual.
    pub witness: Option<(usize, usize, usize)>,
}

/// `k(y, xi.x) = k(xi*.y, x)` for all `xi, x, y`.
pub fn check_invariance<T: Real>(
    k: &OperatorKernel<T>,
    a: &SemigroupAction,
    tol: T,
) -> Result<InvarianceReport<T>> {
    if k.n_points() != a.n_points() {
        return Err(Error::SpaceMismatch(format!(
            "kernel on {} points, action on {}",
            k.n_points(),
            a.n_points()
        )));
    }
    let sg = a.semigroup();
    let scale = k.scale().max(T::one());
    let mut worst = T::zero();
    let mut witness = None;
    for xi in 0..sg.len() {
        let xs = sg.star(xi);
        for x in 0..k.n_points() {
            for y in 0..k.n_points() {
                let r = (k.matrix(y, a.act(xi, x)) - k.matrix(a.act(xs, y), x)).norm() / scale;
                if r > worst {
                    worst = r;
                    witness = Some((xi, x, y));
                }
            }
        }
    }
    Ok(InvarianceReport {
        pass: worst <= tol,
        residual: worst,
        witness,
    })
}
