//! Dense complex linear algebra on top of nalgebra's SVD.

use nalgebra::{DMatrix, SVD};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

pub fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    SVD::new(m.clone(), false, false).singular_values.iter().cloned().collect()
}

/// Number of singular values strictly above `rel_tol * sigma_max`.
pub fn numerical_rank(svals: &[f64], rel_tol: f64, scale: f64) -> usize {
    svals.iter().filter(|&&s| s > rel_tol * scale).count()
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Orthonormal basis (as columns) of `{v : |m v| small}`, i.e. the right
/// singular vectors whose singular value is at most `rel_tol * sigma_max`,
/// including the directions beyond `min(rows, cols)`.
pub fn null_space(m: &CMatrix, rel_tol: f64) -> CMatrix {
    let (r, c) = m.shape();
    let padded = if r < c {
        let mut p = CMatrix::zeros(c, c);
        p.view_mut((0, 0), (r, c)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = SVD::new(padded, false, true);
    let v_t = svd.v_t.expect("requested V");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let idx: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= rel_tol * smax || smax == 0.0)
        .map(|(i, _)| i)
        .collect();
    let mut out = CMatrix::zeros(c, idx.len());
    for (k, &i) in idx.iter().enumerate() {
        for j in 0..c {
            out[(j, k)] = v_t[(i, j)].conj();
        }
    }
    out
}

/// Orthonormal basis of the column space (singular values above `rel_tol * sigma_max`).
pub fn column_space(m: &CMatrix, rel_tol: f64) -> CMatrix {
    if m.ncols() == 0 {
        return CMatrix::zeros(m.nrows(), 0);
    }
    let svd = SVD::new(m.clone(), true, false);
    let u = svd.u.expect("requested U");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let idx: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > rel_tol * smax)
        .map(|(i, _)| i)
        .collect();
    CMatrix::from_fn(m.nrows(), idx.len(), |r, k| u[(r, idx[k])])
}

/// Spectral norm of `(I - Q_b Q_b^H) Q_a`: the sine of the largest principal
/// angle between `span(Q_a)` and `span(Q_b)`, for orthonormal inputs.
pub fn subspace_residual(qa: &CMatrix, qb: &CMatrix) -> f64 {
    if qa.ncols() == 0 {
        return 0.0;
    }
    let proj = qa - qb * (qb.adjoint() * qa);
    singular_values(&proj).first().cloned().unwrap_or(0.0)
}

/// Least-squares solution of `a x = b` via the SVD, with the condition number
/// `sigma_max / sigma_min` of `a`.
pub fn least_squares(a: &CMatrix, b: &CMatrix) -> (CMatrix, f64) {
    let svd = SVD::new(a.clone(), true, true);
    let s = &svd.singular_values;
    let smax = s.iter().cloned().fold(0.0, f64::max);
    let smin = s.iter().cloned().fold(f64::INFINITY, f64::min);
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let x = svd
        .solve(b, smax * f64::EPSILON * a.nrows().max(a.ncols()) as f64)
        .expect("U and V were computed");
    (x, cond)
}
