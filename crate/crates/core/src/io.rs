//! Problem files, certificates, and the `check`, `dilate`, `rk` and
//! `verify` commands.
//!
//! One UTF-8 JSON document holds one problem. Complex numbers are `[re, im]`
//! pairs, matrices are row-major nested arrays, and every map is keyed by
//! name so that output is byte-stable. The schema is described in
//! `docs/schema.md`. Only `f64` is used here.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::dilations::{verify_algebra_parts, FinStarAlgebra, LinearMap, PsdSemigroupMap};
use crate::kernels::OperatorKernel;
use crate::linalg::{self, c, zeros};
use crate::linearise::{trivial_action, verify_parts, InvariantLinearisation};
use crate::operators::AdjointableOp;
use crate::ordered_space::Descriptor;
use crate::repkernel::RkSpace;
use crate::star_semigroup::{check_invariance, SemigroupAction, StarSemigroup};
use crate::ve_space::{CheckMode, RightAction, VeSpace};
use crate::{CMat, CVec, Error, Result, DEFAULT_TOL, NULL_THRESHOLD};

pub const SCHEMA_VERSION: u32 = 1;
pub const CERTIFICATE_FORMAT: &str = "vedil-certificate/1";
pub const TOOL_VERSION: &str = concat!("vedil ", env!("CARGO_PKG_VERSION"));

/// Exit status for a passing command.
pub const EXIT_PASS: i32 = 0;
/// Exit status when a check or verification fails.
pub const EXIT_FAIL: i32 = 1;
/// Exit status for unreadable or inconsistent input.
pub const EXIT_INPUT: i32 = 2;

/// Samples used by randomized checks.
const SAMPLES: usize = 64;

pub type Pair = [f64; 2];
pub type MatJson = Vec<Vec<Pair>>;

/// A gramian entry: a bare complex number for `Scalar`, else a matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ZJson {
    Complex(Pair),
    Matrix(MatJson),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceSpec {
    /// `C^dim` with the standard inner product.
    Hilbert { dim: usize },
    /// `q x m` matrices over `MatrixAlg(m)`, `[a, b] = a* b`.
    MatrixModule { q: usize, m: usize },
    /// `gram[i][j] = [e_i, e_j]`; `module[s*m + t]` is the matrix of
    /// right multiplication by `E_st`.
    Gram {
        gram: Vec<Vec<ZJson>>,
        #[serde(default)]
        module: Option<Vec<MatJson>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    pub points: Vec<String>,
    /// `blocks[x][y] = k(x, y)`.
    pub blocks: Vec<Vec<MatJson>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SemigroupSpec {
    Cyclic { n: usize },
    Symmetric3,
    Klein4,
    SemilatticeChain { k: usize },
    OrthogonalProjections,
    Table {
        elements: Vec<String>,
        /// `mul[a][b]` names the product `ab`.
        mul: Vec<Vec<String>>,
        star: Vec<String>,
        #[serde(default)]
        unit: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionSpec {
    Trivial,
    LeftMultiplication,
    /// `table[xi][x] = xi . x`.
    Table(BTreeMap<String, BTreeMap<String, String>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgebraSpec {
    MatrixAlgebra { m: usize },
    ComplexNumbers,
    Table {
        names: Vec<String>,
        /// `mult[a][b]` holds the coordinates of `e_a e_b`.
        mult: Vec<Vec<Vec<Pair>>>,
        /// `star[a]` holds the coordinates of `e_a*`.
        star: Vec<Vec<Pair>>,
        #[serde(default)]
        unit: Option<Vec<Pair>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValuesSpec {
    pub values: BTreeMap<String, MatJson>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    #[serde(default)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Problem {
    pub version: u32,
    #[serde(default)]
    pub z: Option<Descriptor>,
    #[serde(default)]
    pub space: Option<SpaceSpec>,
    #[serde(default)]
    pub kernel: Option<KernelSpec>,
    #[serde(default)]
    pub semigroup: Option<SemigroupSpec>,
    #[serde(default)]
    pub action: Option<ActionSpec>,
    /// `phi` on the semigroup, keyed by element.
    #[serde(default)]
    pub semigroup_map: Option<ValuesSpec>,
    #[serde(default)]
    pub algebra: Option<AlgebraSpec>,
    /// `phi` on the algebra basis, keyed by basis name.
    #[serde(default)]
    pub map: Option<ValuesSpec>,
    #[serde(default)]
    pub tolerance: Option<ToleranceSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Flattened,
    Elementary,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Flattened => "flattened",
            Mode::Elementary => "elementary",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "flattened" => Ok(Mode::Flattened),
            "elementary" => Ok(Mode::Elementary),
            other => Err(Error::Schema(format!("unknown mode {other:?}"))),
        }
    }
}

/// Command-line settings. `tol` overrides the problem's tolerance.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub tol: Option<f64>,
    pub seed: u64,
    pub mode: Mode,
}

/// A problem with every cross-reference resolved. Matrices are shape
/// checked; nothing mathematical has been tested yet.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub z: Descriptor,
    pub tol: f64,
    pub h: Option<Arc<VeSpace<f64>>>,
    pub kernel: Option<(Vec<String>, Vec<CMat<f64>>)>,
    pub semigroup: Option<Arc<StarSemigroup>>,
    pub action: Option<SemigroupAction>,
    /// In element order.
    pub semigroup_map: Option<Vec<CMat<f64>>>,
    pub algebra: Option<Arc<FinStarAlgebra<f64>>>,
    /// In basis order.
    pub map: Option<Vec<CMat<f64>>>,
}

pub fn digest(problem: &[u8], tol: f64, seed: u64, mode: Mode) -> String {
    let mut h = Sha256::new();
    h.update(problem);
    h.update(format!("\ntol={tol:e};seed={seed};mode={}", mode.as_str()).as_bytes());
    hex::encode(h.finalize())
}

pub fn mat_to_json(m: &CMat<f64>) -> MatJson {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

/// Parses a matrix of the given shape. A matrix with no rows has no way to
/// state its column count, so the expected one is used.
pub fn mat_from_json(m: &MatJson, rows: usize, cols: usize, what: &str) -> Result<CMat<f64>> {
    if m.len() != rows || m.iter().any(|r| r.len() != cols) {
        let got_cols = m.first().map(|r| r.len()).unwrap_or(0);
        return Err(Error::Schema(format!(
            "{what}: expected {rows} x {cols}, got {} x {got_cols}",
            m.len()
        )));
    }
    Ok(CMat::from_fn(rows, cols, |i, j| c(m[i][j][0], m[i][j][1])))
}

fn vec_from_json(v: &[Pair], len: usize, what: &str) -> Result<CVec<f64>> {
    if v.len() != len {
        return Err(Error::Schema(format!("{what}: expected length {len}, got {}", v.len())));
    }
    Ok(CVec::from_fn(len, |i, _| c(v[i][0], v[i][1])))
}

fn schema<E: std::fmt::Display>(e: E) -> Error {
    Error::Schema(e.to_string())
}

pub fn parse_problem(bytes: &[u8]) -> Result<Problem> {
    let p: Problem = serde_json::from_slice(bytes).map_err(schema)?;
    if p.version != SCHEMA_VERSION {
        return Err(Error::Schema(format!(
            "unsupported version {}, expected {SCHEMA_VERSION}",
            p.version
        )));
    }
    Ok(p)
}

fn index_of(names: &[String], name: &str, what: &str) -> Result<usize> {
    names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| Error::Reference(format!("unknown {what} {name:?}")))
}

fn load_space(z: &Descriptor, spec: &SpaceSpec) -> Result<VeSpace<f64>> {
    match spec {
        SpaceSpec::Hilbert { dim } => {
            if z != &Descriptor::Scalar {
                return Err(Error::Schema("hilbert space needs z = Scalar".into()));
            }
            Ok(VeSpace::hilbert(*dim))
        }
        SpaceSpec::MatrixModule { q, m } => {
            if z != &Descriptor::matrix_alg(*m) {
                return Err(Error::Schema(format!("matrix_module needs z = MatrixAlg {{ m: {m} }}")));
            }
            Ok(VeSpace::matrix_module(*q, *m))
        }
        SpaceSpec::Gram { gram, module } => {
            let d = gram.len();
            let ms = z.size();
            let mut f = zeros::<f64>(d * ms, d * ms);
            for (i, row) in gram.iter().enumerate() {
                if row.len() != d {
                    return Err(Error::Schema("gram is not square".into()));
                }
                for (j, e) in row.iter().enumerate() {
                    let blk = match e {
                        ZJson::Complex(p) if ms == 1 => CMat::from_element(1, 1, c(p[0], p[1])),
                        ZJson::Complex(_) => {
                            return Err(Error::Schema(format!("gram[{i}][{j}]: expected a {ms} x {ms} matrix")))
                        }
                        ZJson::Matrix(m) => mat_from_json(m, ms, ms, &format!("gram[{i}][{j}]"))?,
                    };
                    f.view_mut((i * ms, j * ms), (ms, ms)).copy_from(&blk);
                }
            }
            let space = VeSpace::from_gram_unchecked(z.clone(), f)?;
            match module {
                None => Ok(space),
                Some(units) => {
                    let m = (units.len() as f64).sqrt().round() as usize;
                    if m * m != units.len() || z != &Descriptor::matrix_alg(m) {
                        return Err(Error::Schema(
                            "module needs m*m unit matrices over z = MatrixAlg(m)".into(),
                        ));
                    }
                    let units = units
                        .iter()
                        .enumerate()
                        .map(|(u, mj)| mat_from_json(mj, d, d, &format!("module[{u}]")))
                        .collect::<Result<_>>()?;
                    space.with_module_unchecked(RightAction { m, units })
                }
            }
        }
    }
}

fn load_semigroup(spec: &SemigroupSpec) -> Result<StarSemigroup> {
    Ok(match spec {
        SemigroupSpec::Cyclic { n } if *n > 0 => StarSemigroup::cyclic(*n),
        SemigroupSpec::Cyclic { .. } => return Err(Error::Schema("cyclic group of order 0".into())),
        SemigroupSpec::Symmetric3 => StarSemigroup::symmetric3(),
        SemigroupSpec::Klein4 => StarSemigroup::klein4(),
        SemigroupSpec::SemilatticeChain { k } if *k > 0 => StarSemigroup::semilattice_chain(*k),
        SemigroupSpec::SemilatticeChain { .. } => return Err(Error::Schema("empty chain".into())),
        SemigroupSpec::OrthogonalProjections => StarSemigroup::orthogonal_projections(),
        SemigroupSpec::Table {
            elements,
            mul,
            star,
            unit,
        } => {
            let idx = |n: &String| index_of(elements, n, "semigroup element");
            let mul = mul
                .iter()
                .map(|row| row.iter().map(idx).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            let star = star.iter().map(idx).collect::<Result<Vec<_>>>()?;
            let unit = unit.as_ref().map(idx).transpose()?;
            StarSemigroup::new(elements.clone(), mul, star, unit).map_err(schema)?
        }
    })
}

fn load_action(spec: &ActionSpec, g: &Arc<StarSemigroup>, points: &[String]) -> Result<SemigroupAction> {
    match spec {
        ActionSpec::Trivial => Ok(SemigroupAction::trivial(g.clone(), points.len())),
        ActionSpec::LeftMultiplication => {
            if points != g.elements() {
                return Err(Error::Reference(
                    "left_multiplication needs the points to be the semigroup elements in order".into(),
                ));
            }
            Ok(SemigroupAction::left_multiplication(g.clone()))
        }
        ActionSpec::Table(t) => {
            for name in t.keys() {
                index_of(g.elements(), name, "semigroup element")?;
            }
            let mut act = Vec::with_capacity(g.len());
            for xi in g.elements() {
                let row = t
                    .get(xi)
                    .ok_or_else(|| Error::Reference(format!("action table lacks element {xi:?}")))?;
                for name in row.keys() {
                    index_of(points, name, "point")?;
                }
                let mut r = Vec::with_capacity(points.len());
                for x in points {
                    let y = row
                        .get(x)
                        .ok_or_else(|| Error::Reference(format!("action of {xi:?} lacks point {x:?}")))?;
                    r.push(index_of(points, y, "point")?);
                }
                act.push(r);
            }
            SemigroupAction::new(g.clone(), points.len(), act).map_err(schema)
        }
    }
}

fn load_algebra(spec: &AlgebraSpec) -> Result<FinStarAlgebra<f64>> {
    match spec {
        AlgebraSpec::MatrixAlgebra { m } if *m > 0 => Ok(FinStarAlgebra::matrix_algebra(*m)),
        AlgebraSpec::MatrixAlgebra { .. } => Err(Error::Schema("matrix algebra of size 0".into())),
        AlgebraSpec::ComplexNumbers => Ok(FinStarAlgebra::complex_numbers()),
        AlgebraSpec::Table {
            names,
            mult,
            star,
            unit,
        } => {
            let p = names.len();
            if mult.len() != p || mult.iter().any(|r| r.len() != p) || star.len() != p {
                return Err(Error::Schema("algebra tables must be indexed by the basis".into()));
            }
            let mult = mult
                .iter()
                .flatten()
                .map(|v| vec_from_json(v, p, "structure constants"))
                .collect::<Result<Vec<_>>>()?;
            let mut sm = zeros::<f64>(p, p);
            for (a, v) in star.iter().enumerate() {
                sm.set_column(a, &vec_from_json(v, p, "star")?);
            }
            let unit = unit.as_ref().map(|u| vec_from_json(u, p, "unit")).transpose()?;
            FinStarAlgebra::new(names.clone(), mult, sm, unit).map_err(schema)
        }
    }
}

fn load_values(spec: &ValuesSpec, names: &[String], d: usize, what: &str) -> Result<Vec<CMat<f64>>> {
    for k in spec.values.keys() {
        index_of(names, k, what)?;
    }
    names
        .iter()
        .map(|n| {
            let m = spec
                .values
                .get(n)
                .ok_or_else(|| Error::Reference(format!("no value for {what} {n:?}")))?;
            mat_from_json(m, d, d, &format!("value of {n:?}"))
        })
        .collect()
}

/// Resolves every section. All failures here are input errors.
pub fn load(p: &Problem, opts: &RunOptions) -> Result<Loaded> {
    let z = match (&p.z, &p.space) {
        (Some(z), _) => z.clone(),
        (None, Some(SpaceSpec::MatrixModule { m, .. })) => Descriptor::matrix_alg(*m),
        (None, _) => Descriptor::Scalar,
    };
    z.validate().map_err(schema)?;
    let tol = opts
        .tol
        .or(p.tolerance.as_ref().and_then(|t| t.tol))
        .unwrap_or(DEFAULT_TOL);
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::Schema(format!("tolerance must be positive, got {tol}")));
    }
    let h = p.space.as_ref().map(|s| load_space(&z, s)).transpose()?.map(Arc::new);
    let need_h = || {
        h.clone()
            .ok_or_else(|| Error::Reference("section needs a space".into()))
    };
    let kernel = match &p.kernel {
        None => None,
        Some(ks) => {
            let hh = need_h()?;
            let n = ks.points.len();
            let d = hh.dim();
            if ks.blocks.len() != n || ks.blocks.iter().any(|r| r.len() != n) {
                return Err(Error::Schema(format!("kernel blocks must be {n} x {n}")));
            }
            let mats = ks
                .blocks
                .iter()
                .enumerate()
                .flat_map(|(x, row)| {
                    row.iter()
                        .enumerate()
                        .map(move |(y, m)| mat_from_json(m, d, d, &format!("kernel[{x}][{y}]")))
                })
                .collect::<Result<Vec<_>>>()?;
            Some((ks.points.clone(), mats))
        }
    };
    let semigroup = p.semigroup.as_ref().map(load_semigroup).transpose()?.map(Arc::new);
    let action = match (&kernel, &semigroup, &p.action) {
        (Some((pts, _)), Some(g), Some(a)) => Some(load_action(a, g, pts)?),
        (Some(_), Some(_), None) => {
            return Err(Error::Schema("a kernel with a semigroup needs an action section".into()))
        }
        (Some((pts, _)), None, None) => Some(trivial_action(pts.len())),
        (_, None, Some(_)) => return Err(Error::Reference("action without a semigroup".into())),
        (None, _, _) => None,
    };
    let semigroup_map = match &p.semigroup_map {
        None => None,
        Some(vs) => {
            let g = semigroup
                .as_ref()
                .ok_or_else(|| Error::Reference("semigroup_map without a semigroup".into()))?;
            Some(load_values(vs, g.elements(), need_h()?.dim(), "semigroup element")?)
        }
    };
    let algebra = p.algebra.as_ref().map(load_algebra).transpose()?.map(Arc::new);
    let map = match &p.map {
        None => None,
        Some(vs) => {
            let alg = algebra
                .as_ref()
                .ok_or_else(|| Error::Reference("map without an algebra".into()))?;
            Some(load_values(vs, alg.names(), need_h()?.dim(), "basis element")?)
        }
    };
    Ok(Loaded {
        z,
        tol,
        h,
        kernel,
        semigroup,
        action,
        semigroup_map,
        algebra,
        map,
    })
}

impl Loaded {
    fn h(&self) -> Result<&Arc<VeSpace<f64>>> {
        self.h.as_ref().ok_or_else(|| Error::Reference("no space section".into()))
    }

    pub fn kernel(&self) -> Option<Result<OperatorKernel<f64>>> {
        let (pts, mats) = self.kernel.as_ref()?;
        Some(self.h().and_then(|h| OperatorKernel::new(pts.clone(), h.clone(), mats.clone(), self.tol)))
    }

    pub fn semigroup_map(&self) -> Option<Result<PsdSemigroupMap<f64>>> {
        let vals = self.semigroup_map.as_ref()?;
        let g = self.semigroup.clone()?;
        Some(self.h().and_then(|h| PsdSemigroupMap::new(g, h.clone(), vals.clone(), self.tol)))
    }

    pub fn linear_map(&self) -> Option<Result<LinearMap<f64>>> {
        let vals = self.map.as_ref()?;
        let alg = self.algebra.clone()?;
        Some(self.h().and_then(|h| LinearMap::new(alg, h.clone(), vals.clone(), self.tol)))
    }

    /// What `dilate` builds for this problem.
    pub fn construction(&self) -> Result<Construction> {
        if self.map.is_some() {
            Ok(Construction::Stinespring)
        } else if self.semigroup_map.is_some() {
            Ok(Construction::SzNagy)
        } else if self.kernel.is_some() {
            if self.h()?.module().is_some() {
                Ok(Construction::Module)
            } else {
                Ok(Construction::Linearise)
            }
        } else {
            Err(Error::Schema("nothing to dilate: need kernel, semigroup_map or map".into()))
        }
    }

    /// The kernel used by `rk`: the explicit one, else the one induced by
    /// a map.
    fn rk_kernel(&self) -> Result<OperatorKernel<f64>> {
        if let Some(k) = self.kernel() {
            return k;
        }
        if let Some(m) = self.semigroup_map() {
            return m?.kernel();
        }
        if let Some(m) = self.linear_map() {
            return m?.kernel();
        }
        Err(Error::Schema("rk needs a kernel, semigroup_map or map".into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    Linearise,
    Module,
    SzNagy,
    Stinespring,
    Rk,
}

/// One line of a `check` report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub pass: bool,
    /// Informational checks do not affect the overall verdict.
    pub required: bool,
    #[serde(flatten)]
    pub detail: BTreeMap<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub command: String,
    pub pass: bool,
    pub tol: f64,
    pub checks: BTreeMap<String, CheckEntry>,
}

impl CheckReport {
    pub fn first_failure(&self) -> Option<(&String, &CheckEntry)> {
        self.checks.iter().find(|(_, e)| e.required && !e.pass)
    }
}

fn entry(pass: bool, detail: Value) -> CheckEntry {
    let detail = match detail {
        Value::Object(m) => m.into_iter().collect(),
        Value::Null => BTreeMap::new(),
        other => BTreeMap::from([("detail".to_string(), other)]),
    };
    CheckEntry {
        pass,
        required: true,
        detail,
    }
}

fn error_entry(e: &Error) -> CheckEntry {
    entry(false, json!({ "error": e.to_string() }))
}

fn names_of(names: &[String], idx: &[usize]) -> Vec<String> {
    idx.iter().map(|&i| names[i].clone()).collect()
}

/// Runs every validation the problem admits.
pub fn cmd_check(l: &Loaded, opts: &RunOptions) -> CheckReport {
    let tol = l.tol;
    let mut checks = BTreeMap::new();
    checks.insert("ordered_space".to_string(), match l.z.validate() {
        Ok(()) => entry(true, json!({ "size": l.z.size() })),
        Err(e) => error_entry(&e),
    });
    if let Some(h) = &l.h {
        let mode = match opts.mode {
            Mode::Flattened => CheckMode::Flattened,
            Mode::Elementary => CheckMode::Elementary {
                samples: SAMPLES,
                seed: opts.seed,
            },
        };
        let r = h.check_axioms(tol, mode);
        let mut d = json!({
            "mode": opts.mode.as_str(),
            "hermitian_residual": r.hermitian.residual,
            "positivity_residual": r.positivity.residual,
            "strictness_residual": r.strictness.residual,
        });
        if let Some(m) = &r.module {
            d["module_residual"] = json!(m.residual);
        }
        checks.insert("ve_axioms".into(), entry(r.all_pass(), d));
    }
    if let Some(g) = &l.semigroup {
        let r = g.validate();
        let v: Vec<String> = r.violations.iter().take(8).map(|v| format!("{v:?}")).collect();
        checks.insert("semigroup".into(), entry(r.pass(), json!({ "violations": v })));
    }
    if let Some(a) = &l.action {
        let r = a.validate();
        let v: Vec<String> = r.violations.iter().take(8).map(|v| format!("{v:?}")).collect();
        checks.insert(
            "action".into(),
            entry(r.pass(), json!({ "violations": v, "unital": r.unital })),
        );
    }
    if let Some(k) = l.kernel() {
        check_kernel(&mut checks, "kernel", k, l.action.as_ref(), tol);
    }
    if let Some(m) = l.semigroup_map() {
        let k = m.and_then(|m| m.kernel());
        let a = l.semigroup.clone().map(SemigroupAction::left_multiplication);
        check_kernel(&mut checks, "semigroup_map", k, a.as_ref(), tol);
    }
    if let Some(alg) = &l.algebra {
        checks.insert("algebra".into(), match alg.validate(1e-9) {
            Ok(()) => entry(true, json!({ "dim": alg.dim() })),
            Err(e) => error_entry(&e),
        });
    }
    if let Some(m) = l.linear_map() {
        match m {
            Err(e) => {
                checks.insert("map_adjointable".into(), error_entry(&e));
            }
            Ok(m) => {
                checks.insert("map_adjointable".into(), entry(true, Value::Null));
                match m.is_psd(tol) {
                    Ok(t) => checks.insert(
                        "map_psd".into(),
                        entry(
                            t.pass,
                            json!({
                                "min_eigenvalue": t.min_eigenvalue,
                                "witness": names_of(m.algebra().names(), &t.witness),
                            }),
                        ),
                    ),
                    Err(e) => checks.insert("map_psd".into(), error_entry(&e)),
                };
                if m.algebra().matrix_size().is_some() && m.h().z() == &Descriptor::Scalar {
                    let cp = m.is_completely_positive(tol).unwrap_or(false);
                    let amp = m.amplification_test(2, SAMPLES, opts.seed, tol);
                    let mut e = match amp {
                        Ok(a) => entry(
                            cp && a.pass,
                            json!({ "choi_psd": cp, "amplification_2_min_eigenvalue": a.min_eigenvalue }),
                        ),
                        Err(err) => error_entry(&err),
                    };
                    e.required = false;
                    checks.insert("map_completely_positive".into(), e);
                }
            }
        }
    }
    let pass = checks.values().all(|e| !e.required || e.pass);
    CheckReport {
        command: "check".into(),
        pass,
        tol,
        checks,
    }
}

fn check_kernel(
    checks: &mut BTreeMap<String, CheckEntry>,
    prefix: &str,
    k: Result<OperatorKernel<f64>>,
    action: Option<&SemigroupAction>,
    tol: f64,
) {
    let k = match k {
        Ok(k) => k,
        Err(e) => {
            checks.insert(format!("{prefix}_adjointable"), error_entry(&e));
            return;
        }
    };
    checks.insert(format!("{prefix}_adjointable"), entry(true, Value::Null));
    let t = k.n_positive(k.n_points(), tol);
    checks.insert(
        format!("{prefix}_psd"),
        entry(
            t.pass,
            json!({
                "min_eigenvalue": t.min_eigenvalue,
                "witness": names_of(k.points(), &t.witness),
            }),
        ),
    );
    if let Some(a) = action {
        if a.validate().pass() {
            let r = check_invariance(&k, a, tol);
            checks.insert(format!("{prefix}_invariance"), match r {
                Ok(r) => {
                    let w = r.witness.map(|(xi, x, y)| {
                        json!({
                            "xi": a.semigroup().elements()[xi],
                            "x": k.points()[x],
                            "y": k.points()[y],
                        })
                    });
                    entry(r.pass, json!({ "residual": r.residual, "witness": w }))
                }
                Err(e) => error_entry(&e),
            });
        }
    }
}

/// Matrices produced by a construction.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    pub dim_k: usize,
    /// Flattened Gram of `K`, `dim_k * M` square.
    pub k_gram: MatJson,
    /// Right action on `K` for module constructions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_module: Option<Vec<MatJson>>,
    /// `V(x)`, keyed by point or basis name.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub v: BTreeMap<String, MatJson>,
    /// `pi(xi)`, keyed by element or basis name.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub pi: BTreeMap<String, MatJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<MatJson>,
    /// Function tables of the member basis, rows `x * d + i`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub members: Option<MatJson>,
    /// Evaluation operators `E_x`, keyed by point.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub evaluation: BTreeMap<String, MatJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub format: String,
    pub tool_version: String,
    pub command: String,
    pub construction: Construction,
    pub input_digest: String,
    pub tol: f64,
    pub seed: u64,
    pub mode: String,
    pub outputs: Outputs,
    pub residuals: BTreeMap<String, f64>,
    pub verdicts: BTreeMap<String, bool>,
    pub pass: bool,
    /// Seconds since the Unix epoch; the only field that varies between
    /// identical runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

fn named(names: &[String], mats: impl IntoIterator<Item = CMat<f64>>) -> BTreeMap<String, MatJson> {
    names.iter().cloned().zip(mats.into_iter().map(|m| mat_to_json(&m))).collect()
}

fn lookup(
    map: &BTreeMap<String, MatJson>,
    names: &[String],
    rows: usize,
    cols: usize,
    what: &str,
) -> Result<Vec<CMat<f64>>> {
    if map.len() != names.len() {
        return Err(Error::Schema(format!("{what}: expected {} entries", names.len())));
    }
    names
        .iter()
        .map(|n| {
            let m = map
                .get(n)
                .ok_or_else(|| Error::Reference(format!("{what} has no entry {n:?}")))?;
            mat_from_json(m, rows, cols, &format!("{what}[{n:?}]"))
        })
        .collect()
}

fn k_space_of(l: &Loaded, o: &Outputs) -> Result<Arc<VeSpace<f64>>> {
    let ms = l.z.size();
    let g = mat_from_json(&o.k_gram, o.dim_k * ms, o.dim_k * ms, "k_gram")?;
    let mut space = VeSpace::from_gram_unchecked(l.z.clone(), g)?;
    if let Some(units) = &o.k_module {
        let m = l.h()?.module().ok_or(Error::NotAModule)?.m;
        if units.len() != m * m {
            return Err(Error::Schema("k_module: wrong number of units".into()));
        }
        let units = units
            .iter()
            .map(|u| mat_from_json(u, o.dim_k, o.dim_k, "k_module"))
            .collect::<Result<_>>()?;
        space = space.with_module_unchecked(RightAction { m, units })?;
    }
    Ok(Arc::new(space))
}

type Findings = (BTreeMap<String, f64>, BTreeMap<String, bool>);

fn module_residual(op: &CMat<f64>, dom: &RightAction<f64>, cod: &RightAction<f64>) -> f64 {
    let r = linalg::max_of(
        dom.units
            .iter()
            .zip(&cod.units)
            .map(|(rd, rc)| (op * rd - rc * op).norm()),
    );
    r / op.norm().max(1.0)
}

/// Recomputes every residual of a construction from its recorded outputs.
/// Used both right after construction and by `verify`, so the two agree.
fn evaluate(l: &Loaded, construction: Construction, o: &Outputs, tol: f64) -> Result<Findings> {
    let mut res = BTreeMap::new();
    let mut ver = BTreeMap::new();
    let k_space = k_space_of(l, o)?;
    let r = o.dim_k;
    match construction {
        Construction::Linearise | Construction::Module | Construction::SzNagy => {
            let (k, a) = match construction {
                Construction::SzNagy => {
                    let m = l.semigroup_map().ok_or_else(|| Error::Schema("no semigroup_map".into()))??;
                    (m.kernel()?, m.action())
                }
                _ => (
                    l.kernel().ok_or_else(|| Error::Schema("no kernel".into()))??,
                    l.action.clone().ok_or_else(|| Error::Schema("no action".into()))?,
                ),
            };
            let d = k.h().dim();
            let v = lookup(&o.v, k.points(), r, d, "v")?;
            let pi = lookup(&o.pi, a.semigroup().elements(), r, r, "pi")?;
            let rep = verify_parts(&k, &a, &k_space, &v, &pi, tol)?;
            for (name, val) in rep.residuals() {
                res.insert(name.to_string(), val);
            }
            ver.insert("minimal".into(), rep.minimal);
            if construction == Construction::Module {
                let hm = k.h().module().ok_or(Error::NotAModule)?;
                let km = k_space.module().ok_or_else(|| Error::Schema("k_module missing".into()))?;
                res.insert(
                    "module_gmp".into(),
                    k_space.module_residual()? / k_space.gram().norm().max(1.0),
                );
                res.insert(
                    "module_map_v".into(),
                    linalg::max_of(v.iter().map(|m| module_residual(m, hm, km))),
                );
                res.insert(
                    "module_map_pi".into(),
                    linalg::max_of(pi.iter().map(|m| module_residual(m, km, km))),
                );
            }
            if construction == Construction::SzNagy {
                let g = a.semigroup();
                if let Some(e) = g.unit() {
                    let m = l.semigroup_map().expect("checked above")?;
                    let w = AdjointableOp::solve(v[e].clone(), k.h().clone(), k_space.clone(), tol)?;
                    let scale = linalg::max_of((0..g.len()).map(|x| m.value(x).matrix().norm())).max(1.0);
                    let dil = linalg::max_of((0..g.len()).map(|x| {
                        (w.adjoint_matrix() * &pi[x] * w.matrix() - m.value(x).matrix()).norm() / scale
                    }));
                    res.insert("dilation".into(), dil);
                }
            }
        }
        Construction::Stinespring => {
            let m = l.linear_map().ok_or_else(|| Error::Schema("no map".into()))??;
            let d = m.h().dim();
            let names = m.algebra().names().to_vec();
            let v = lookup(&o.v, &names, r, d, "v")?;
            let pi = lookup(&o.pi, &names, r, r, "pi")?;
            let w = o.w.as_ref().map(|w| mat_from_json(w, r, d, "w")).transpose()?;
            let rep = verify_algebra_parts(&m, &k_space, &v, &pi, w.as_ref(), tol)?;
            for (name, val) in rep.residuals() {
                res.insert(name.to_string(), val);
            }
            ver.insert("minimal".into(), rep.minimal);
            if let (Some(s), true) = (m.algebra().matrix_size(), m.h().z() == &Descriptor::Scalar) {
                // A minimal dilation of a CP map on M_s has dim K = s * Choi rank.
                let choi_rank = linalg::rank(&m.choi_matrix()?, NULL_THRESHOLD);
                ver.insert("dim_k_matches_choi_rank".into(), r == s * choi_rank);
            }
        }
        Construction::Rk => {
            let k = l.rk_kernel()?;
            let d = k.h().dim();
            let n = k.n_points();
            let members = o
                .members
                .as_ref()
                .ok_or_else(|| Error::Schema("rk certificate without members".into()))?;
            let members = mat_from_json(members, n * d, r, "members")?;
            let evals = lookup(&o.evaluation, k.points(), d, r, "evaluation")?;
            let rk = RkSpace::from_parts(&k, k_space, members)?;
            let table = linalg::max_of(
                evals
                    .iter()
                    .enumerate()
                    .map(|(x, e)| (e - rk.evaluation_op(x).matrix()).norm()),
            );
            res.insert("evaluation_table".into(), table);
            res.insert("rk3".into(), rk.rk3_residual());
            res.insert("evaluation_adjoint".into(), rk.evaluation_adjoint_residual());
            res.insert("evaluation_solve".into(), rk.evaluation_solve_residual());
            res.insert("rebuilt_kernel".into(), rk.rebuilt_kernel_residual());
            res.insert("kx_fit".into(), rk.kx_fit_residual());
            ver.insert("minimal".into(), rk.is_minimal());
        }
    }
    Ok((res, ver))
}

fn outputs_of_linearisation(l: &InvariantLinearisation<f64>) -> Outputs {
    let view = l.view();
    Outputs {
        dim_k: l.dim_k(),
        k_gram: mat_to_json(l.k_space().gram()),
        v: named(&view.points, view.v),
        pi: named(&view.elements, view.pi),
        ..Outputs::default()
    }
}

fn fail_check(rep: &CheckReport) -> Error {
    match rep.first_failure() {
        Some((name, e)) => Error::VerificationFailed(format!(
            "check {name} failed: {}",
            serde_json::to_string(&e.detail).unwrap_or_default()
        )),
        None => Error::VerificationFailed("check failed".into()),
    }
}

fn finish(
    bytes: &[u8],
    l: &Loaded,
    opts: &RunOptions,
    command: &str,
    construction: Construction,
    outputs: Outputs,
) -> Result<Certificate> {
    // Round-trip so that the recorded residuals are those of the recorded
    // numbers.
    let outputs: Outputs =
        serde_json::from_value(serde_json::to_value(&outputs).map_err(schema)?).map_err(schema)?;
    let (residuals, verdicts) = evaluate(l, construction, &outputs, l.tol)?;
    let pass = residuals.values().all(|&r| r <= l.tol) && verdicts.values().all(|&v| v);
    Ok(Certificate {
        format: CERTIFICATE_FORMAT.into(),
        tool_version: TOOL_VERSION.into(),
        command: command.into(),
        construction,
        input_digest: digest(bytes, l.tol, opts.seed, opts.mode),
        tol: l.tol,
        seed: opts.seed,
        mode: opts.mode.as_str().into(),
        outputs,
        residuals,
        verdicts,
        pass,
        timestamp: None,
    })
}

/// Checks, constructs the dilation the problem asks for, and verifies it.
pub fn cmd_dilate(bytes: &[u8], opts: &RunOptions) -> Result<Certificate> {
    let l = load(&parse_problem(bytes)?, opts)?;
    let construction = l.construction()?;
    let rep = cmd_check(&l, opts);
    if !rep.pass {
        return Err(fail_check(&rep));
    }
    let tol = l.tol;
    let outputs = match construction {
        Construction::Linearise => {
            let k = l.kernel().expect("construction needs a kernel")?;
            let a = l.action.as_ref().expect("kernel problems carry an action");
            outputs_of_linearisation(&InvariantLinearisation::construct(&k, a, tol)?)
        }
        Construction::Module => {
            let k = l.kernel().expect("construction needs a kernel")?;
            let a = l.action.as_ref().expect("kernel problems carry an action");
            let md = crate::dilations::module_dilate(&k, a, tol)?;
            let mut o = outputs_of_linearisation(&md.linearisation);
            let units = &md.certificate.space.module().expect("certified module").units;
            o.k_module = Some(units.iter().map(mat_to_json).collect());
            o
        }
        Construction::SzNagy => {
            let m = l.semigroup_map().expect("construction needs a map")?;
            let d = m.sznagy_dilate(tol)?;
            let mut o = outputs_of_linearisation(&d.linearisation);
            o.w = d.w.as_ref().map(|w| mat_to_json(w.matrix()));
            o
        }
        Construction::Stinespring => {
            let m = l.linear_map().expect("construction needs a map")?;
            let d = m.stinespring_dilate(tol)?;
            let view = d.view();
            Outputs {
                dim_k: d.dim_k(),
                k_gram: mat_to_json(d.k_space().gram()),
                v: named(&view.points, view.v),
                pi: named(&view.elements, view.pi),
                w: d.w().map(|w| mat_to_json(w.matrix())),
                ..Outputs::default()
            }
        }
        Construction::Rk => unreachable!("rk is its own command"),
    };
    finish(bytes, &l, opts, "dilate", construction, outputs)
}

/// Emits the reproducing-kernel realisation of the problem's kernel.
pub fn cmd_rk(bytes: &[u8], opts: &RunOptions) -> Result<Certificate> {
    let l = load(&parse_problem(bytes)?, opts)?;
    let rep = cmd_check(&l, opts);
    if !rep.pass {
        return Err(fail_check(&rep));
    }
    let k = l.rk_kernel()?;
    let rk = RkSpace::from_kernel(&k, l.tol)?;
    let d = k.h().dim();
    let outputs = Outputs {
        dim_k: rk.dim(),
        k_gram: mat_to_json(rk.space().gram()),
        members: Some(mat_to_json(rk.members_basis())),
        evaluation: named(
            k.points(),
            (0..k.n_points()).map(|x| rk.members_basis().rows(x * d, d).into_owned()),
        ),
        ..Outputs::default()
    };
    finish(bytes, &l, opts, "rk", Construction::Rk, outputs)
}

/// Per-residual comparison made by `verify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualCheck {
    pub recorded: Option<f64>,
    pub recomputed: f64,
    pub within_tol: bool,
    /// Recomputed value is within ten times the recorded one.
    pub reproduced: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub command: String,
    pub pass: bool,
    pub input_digest: String,
    pub residuals: BTreeMap<String, ResidualCheck>,
    pub verdicts: BTreeMap<String, bool>,
}

/// Absolute slack for reproducing residuals that were recorded as zero.
const REPRODUCE_FLOOR: f64 = 1e-14;

/// Re-verifies a certificate against its problem without constructing.
pub fn cmd_verify(bytes: &[u8], cert: &Certificate) -> Result<VerifyReport> {
    if cert.format != CERTIFICATE_FORMAT {
        return Err(Error::Schema(format!("unknown certificate format {:?}", cert.format)));
    }
    let mode = Mode::parse(&cert.mode)?;
    let computed = digest(bytes, cert.tol, cert.seed, mode);
    if computed != cert.input_digest {
        return Err(Error::DigestMismatch {
            recorded: cert.input_digest.clone(),
            computed,
        });
    }
    let opts = RunOptions {
        tol: Some(cert.tol),
        seed: cert.seed,
        mode,
    };
    let l = load(&parse_problem(bytes)?, &opts)?;
    let (res, verdicts) = evaluate(&l, cert.construction, &cert.outputs, cert.tol)?;
    let mut residuals = BTreeMap::new();
    for (name, &recomputed) in &res {
        let recorded = cert.residuals.get(name).copied();
        let reproduced = recorded.is_some_and(|r| recomputed <= (10.0 * r).max(REPRODUCE_FLOOR));
        residuals.insert(
            name.clone(),
            ResidualCheck {
                recorded,
                recomputed,
                within_tol: recomputed <= cert.tol,
                reproduced,
            },
        );
    }
    let same_names = cert.residuals.keys().eq(res.keys()) && cert.verdicts.keys().eq(verdicts.keys());
    let pass = same_names
        && cert.pass
        && residuals.values().all(|r| r.within_tol && r.reproduced)
        && verdicts.values().all(|&v| v);
    Ok(VerifyReport {
        command: "verify".into(),
        pass,
        input_digest: computed,
        residuals,
        verdicts,
    })
}

/// Exit status for an error: input problems are 2, everything else 1.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Schema(_)
        | Error::Reference(_)
        | Error::ShapeMismatch(_)
        | Error::DescriptorMismatch(_)
        | Error::SpaceMismatch(_)
        | Error::UnknownPoint(_) => EXIT_INPUT,
        _ => EXIT_FAIL,
    }
}

/// Machine-readable form of an error, with witnesses where available.
pub fn error_json(e: &Error) -> Value {
    let mut v = json!({ "error": e.to_string(), "exit_code": exit_code(e) });
    match e {
        Error::NotPsd {
            min_eigenvalue,
            witness,
        } => {
            v["min_eigenvalue"] = json!(min_eigenvalue);
            v["witness"] = json!(witness);
        }
        Error::NotInvariant { xi, x, y, residual } => {
            v["witness"] = json!({ "xi": xi, "x": x, "y": y });
            v["residual"] = json!(residual);
        }
        Error::DigestMismatch { recorded, computed } => {
            v["recorded"] = json!(recorded);
            v["computed"] = json!(computed);
        }
        _ => {}
    }
    v
}

/// `key.path: value` lines for `--format text`.
pub fn render_text(v: &Value) -> String {
    fn walk(prefix: &str, v: &Value, out: &mut String) {
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&p, x, out);
                }
            }
            Value::Array(a) if a.iter().any(|x| x.is_object() || x.is_array()) => {
                for (i, x) in a.iter().enumerate() {
                    walk(&format!("{prefix}[{i}]"), x, out);
                }
            }
            other => {
                out.push_str(prefix);
                out.push_str(": ");
                out.push_str(&other.to_string());
                out.push('\n');
            }
        }
    }
    let mut out = String::new();
    walk("", v, &mut out);
    out
}
