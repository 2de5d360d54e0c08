//! Oracles shared by the integration suites. They deliberately avoid the
//! library's quotient and dilation code.

#![allow(dead_code)]

use std::sync::Arc;

use nalgebra::{Complex, DMatrix};
use vedil::linalg;
use vedil::linearise::RealisationView;
use vedil::{LinearMap, VeSpace};

pub type M = DMatrix<Complex<f64>>;

pub fn c(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

/// `E_ij` in `M_m`.
pub fn unit(m: usize, i: usize, j: usize) -> M {
    let mut e = M::zeros(m, m);
    e[(i, j)] = c(1.0, 0.0);
    e
}

/// Kraus operators read off the Choi matrix `J = sum E_ij ⊗ phi(E_ij)`,
/// so that `phi(a) = sum_r K_r* a K_r`.
pub fn kraus_from_choi(phi: &LinearMap<f64>, m: usize) -> Vec<M> {
    let d = phi.h().dim();
    let mut j = M::zeros(m * d, m * d);
    for i in 0..m {
        for k in 0..m {
            let val = phi.apply_matrix(&unit(m, i, k)).unwrap();
            j.view_mut((i * d, k * d), (d, d)).copy_from(&val);
        }
    }
    let eig = nalgebra::linalg::SymmetricEigen::new(j);
    let top = eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
    let mut out = Vec::new();
    for (r, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam > 1e-10 * top.max(1.0) {
            let u = eig.eigenvectors.column(r) * c(lam.sqrt(), 0.0);
            out.push(M::from_fn(m, d, |i, p| u[i * d + p].conj()));
        }
    }
    out
}

/// Stinespring triple on `C^m ⊗ C^R`: `pi(a) = a ⊗ I_R`,
/// `W h = sum_r K_r h ⊗ e_r`, `V(a) = pi(a) W`. Points and elements are the
/// algebra basis names.
pub fn choi_view(phi: &LinearMap<f64>, m: usize) -> RealisationView<f64> {
    let kraus = kraus_from_choi(phi, m);
    let r = kraus.len();
    let d = phi.h().dim();
    let mut w = M::zeros(m * r, d);
    for (k, kr) in kraus.iter().enumerate() {
        for i in 0..m {
            for p in 0..d {
                w[(i * r + k, p)] = kr[(i, p)];
            }
        }
    }
    let alg = phi.algebra();
    let pis: Vec<M> = (0..alg.dim())
        .map(|a| {
            let e = alg.matrix_of(&alg.basis_vec(a)).unwrap();
            e.kronecker(&linalg::identity::<f64>(r))
        })
        .collect();
    RealisationView {
        points: alg.names().to_vec(),
        elements: alg.names().to_vec(),
        h: phi.h().clone(),
        space: Arc::new(VeSpace::hilbert(m * r)),
        v: pis.iter().map(|p| p * &w).collect(),
        pi: pis,
    }
}

/// The transpose map on `M_2`.
pub fn transpose_map() -> LinearMap<f64> {
    let alg = Arc::new(vedil::FinStarAlgebra::matrix_algebra(2));
    let h = Arc::new(VeSpace::hilbert(2));
    let vals = (0..4).map(|b| unit(2, b % 2, b / 2)).collect();
    LinearMap::new(alg, h, vals, 1e-9).unwrap()
}
