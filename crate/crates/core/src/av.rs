//! Abelian-variety input data: polarization type, period matrix, and the
//! Appell–Humbert pair (H, E) for the lattice `tau Z^g + D Z^g`.
//!
//! The lattice basis is ordered `(tau e_1, ..., tau e_g, d_1 e_1, ..., d_g e_g)`.
//! In that basis the alternating form E is `[[0, D], [-D, 0]]`, and the
//! hermitian form H is reconstructed from E via `H(z, w) = i E(z, w) + E(iz, w)`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_SYMMETRY_TOL: f64 = 1e-12;
/// Below this smallest eigenvalue of `Im tau` theta truncation radii blow up.
pub const NEAR_DEGENERATE_LAMBDA: f64 = 1e-3;
const LATTICE_MEMBERSHIP_TOL: f64 = 1e-12;

/// Elementary divisors `(d_1, ..., d_g)` with `d_i | d_{i+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct PolarizationType {
    d: Vec<u32>,
}

impl PolarizationType {
    pub fn new(d: Vec<u32>) -> Result<Self> {
        if d.is_empty() {
            return Err(Error::InvalidPolarization("g must be at least 1".into()));
        }
        if let Some(pos) = d.iter().position(|&x| x == 0) {
            return Err(Error::InvalidPolarization(format!(
                "d_{} = 0; elementary divisors must be positive",
                pos + 1
            )));
        }
        for (i, w) in d.windows(2).enumerate() {
            if w[1] % w[0] != 0 {
                return Err(Error::InvalidPolarization(format!(
                    "d_{} = {} does not divide d_{} = {}",
                    i + 1,
                    w[0],
                    i + 2,
                    w[1]
                )));
            }
        }
        Ok(Self { d })
    }

    pub fn g(&self) -> usize {
        self.d.len()
    }

    pub fn divisors(&self) -> &[u32] {
        &self.d
    }

    /// Number of odd elementary divisors.
    pub fn s(&self) -> usize {
        self.d.iter().filter(|&&x| x % 2 == 1).count()
    }

    /// `h^0(L) = prod d_i`.
    pub fn h0(&self) -> u128 {
        self.d.iter().map(|&x| x as u128).product()
    }

    /// The type with every odd divisor doubled.
    pub fn evenized(&self) -> Self {
        Self {
            d: self
                .d
                .iter()
                .map(|&x| if x % 2 == 1 { 2 * x } else { x })
                .collect(),
        }
    }

    /// Split into one-dimensional factors `(d_1), ..., (d_g)`.
    pub fn factors(&self) -> Vec<PolarizationType> {
        self.d.iter().map(|&x| Self { d: vec![x] }).collect()
    }
}

impl TryFrom<Vec<u32>> for PolarizationType {
    type Error = Error;
    fn try_from(d: Vec<u32>) -> Result<Self> {
        Self::new(d)
    }
}

impl From<PolarizationType> for Vec<u32> {
    fn from(p: PolarizationType) -> Self {
        p.d
    }
}

impl FromStr for PolarizationType {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let d = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|e| Error::Parse(format!("bad divisor {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(d)
    }
}

impl fmt::Display for PolarizationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.d.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A validated point of the Siegel upper half space.
#[derive(Debug, Clone)]
pub struct PeriodMatrix {
    tau: DMatrix<Complex64>,
    imag: DMatrix<f64>,
    imag_inv: DMatrix<f64>,
    /// Lower Cholesky factor of `Im tau`.
    chol: DMatrix<f64>,
    lambda_min: f64,
}

impl PeriodMatrix {
    /// Validates `tau`; the stored matrix is the symmetrized input.
    pub fn new(tau: DMatrix<Complex64>, symmetry_tol: f64) -> Result<Self> {
        if !(symmetry_tol >= 0.0) {
            return Err(Error::InvalidTolerance(symmetry_tol));
        }
        let g = tau.nrows();
        if g == 0 || tau.ncols() != g {
            return Err(Error::DimensionMismatch(format!(
                "period matrix must be square and nonempty, got {}x{}",
                tau.nrows(),
                tau.ncols()
            )));
        }
        if tau.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Parse("period matrix has non-finite entries".into()));
        }
        let mut worst = (0, 0, 0.0_f64);
        for i in 0..g {
            for j in (i + 1)..g {
                let dev = (tau[(i, j)] - tau[(j, i)]).norm();
                if dev > worst.2 {
                    worst = (i, j, dev);
                }
            }
        }
        if worst.2 > symmetry_tol {
            return Err(Error::NotSymmetric {
                row: worst.0,
                col: worst.1,
                deviation: worst.2,
                tol: symmetry_tol,
            });
        }
        let tau = (&tau + tau.transpose()).map(|c| c * 0.5);
        let imag = tau.map(|c| c.im);
        let lambda_min = SymmetricEigen::new(imag.clone())
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        let chol = match imag.clone().cholesky() {
            Some(c) if lambda_min > 0.0 => c,
            _ => return Err(Error::NotPositive { eigenvalue: lambda_min }),
        };
        let imag_inv = chol.inverse();
        let chol = chol.l();
        if lambda_min < NEAR_DEGENERATE_LAMBDA {
            log::warn!(
                "near-degenerate period matrix: lambda_min(Im tau) = {lambda_min:e} < {NEAR_DEGENERATE_LAMBDA:e}"
            );
        }
        Ok(Self {
            tau,
            imag,
            imag_inv,
            chol,
            lambda_min,
        })
    }

    pub fn from_parts(re: &DMatrix<f64>, im: &DMatrix<f64>, symmetry_tol: f64) -> Result<Self> {
        if re.shape() != im.shape() {
            return Err(Error::DimensionMismatch(
                "real and imaginary parts differ in shape".into(),
            ));
        }
        let tau = DMatrix::from_fn(re.nrows(), re.ncols(), |i, j| {
            Complex64::new(re[(i, j)], im[(i, j)])
        });
        Self::new(tau, symmetry_tol)
    }

    pub fn diagonal(entries: &[Complex64]) -> Result<Self> {
        let g = entries.len();
        let tau = DMatrix::from_fn(g, g, |i, j| {
            if i == j {
                entries[i]
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self::new(tau, DEFAULT_SYMMETRY_TOL)
    }

    /// `i * I_g`.
    pub fn identity_imag(g: usize) -> Self {
        Self::diagonal(&vec![Complex64::new(0.0, 1.0); g]).expect("i*I is a valid period matrix")
    }

    pub fn g(&self) -> usize {
        self.tau.nrows()
    }

    pub fn tau(&self) -> &DMatrix<Complex64> {
        &self.tau
    }

    pub fn imag(&self) -> &DMatrix<f64> {
        &self.imag
    }

    pub fn imag_inv(&self) -> &DMatrix<f64> {
        &self.imag_inv
    }

    pub fn cholesky_lower(&self) -> &DMatrix<f64> {
        &self.chol
    }

    pub fn lambda_min(&self) -> f64 {
        self.lambda_min
    }

    pub fn is_near_degenerate(&self) -> bool {
        self.lambda_min < NEAR_DEGENERATE_LAMBDA
    }

    /// The period matrix `k * tau`.
    pub fn scaled(&self, k: f64) -> Self {
        Self {
            tau: self.tau.map(|c| c * k),
            imag: &self.imag * k,
            imag_inv: &self.imag_inv / k,
            chol: &self.chol * k.sqrt(),
            lambda_min: self.lambda_min * k,
        }
    }

    /// Diagonal entry `tau_ii` as a 1x1 period matrix.
    pub fn diagonal_factor(&self, i: usize) -> Result<Self> {
        Self::diagonal(&[self.tau[(i, i)]])
    }

    pub fn is_diagonal(&self) -> bool {
        let g = self.g();
        (0..g).all(|i| (0..g).all(|j| i == j || self.tau[(i, j)].norm() == 0.0))
    }

    /// FNV-1a hash of the entry bit patterns; stable across runs and platforms.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut feed = |x: u64| {
            for byte in x.to_le_bytes() {
                h ^= byte as u64;
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        };
        feed(self.g() as u64);
        for i in 0..self.g() {
            for j in 0..self.g() {
                feed(self.tau[(i, j)].re.to_bits());
                feed(self.tau[(i, j)].im.to_bits());
            }
        }
        h
    }

    /// The lattice point `tau m + D n`.
    pub fn lattice_point(&self, d: &PolarizationType, m: &[i64], n: &[i64]) -> DVector<Complex64> {
        let g = self.g();
        DVector::from_fn(g, |i, _| {
            let mut acc = Complex64::new(d.divisors()[i] as f64 * n[i] as f64, 0.0);
            for j in 0..g {
                acc += self.tau[(i, j)] * m[j] as f64;
            }
            acc
        })
    }
}

/// Hermitian form H and alternating form E of the polarization.
#[derive(Debug, Clone)]
pub struct SymplecticData {
    /// E on the lattice basis, `[[0, D], [-D, 0]]`.
    pub e_lattice: DMatrix<i64>,
    /// `H(z, w) = z^T H conj(w)`.
    pub h: DMatrix<Complex64>,
    /// E on real coordinates `(Re z, Im z)`.
    e_real: DMatrix<f64>,
    /// Columns are the lattice basis vectors in real coordinates.
    basis_real: DMatrix<f64>,
    basis_real_inv: DMatrix<f64>,
}

fn to_real(z: &DVector<Complex64>) -> DVector<f64> {
    let g = z.len();
    DVector::from_fn(2 * g, |k, _| if k < g { z[k].re } else { z[k - g].im })
}

impl SymplecticData {
    pub fn g(&self) -> usize {
        self.h.nrows()
    }

    /// E extended R-bilinearly to `C^g`.
    pub fn e(&self, z: &DVector<Complex64>, w: &DVector<Complex64>) -> f64 {
        let zr = to_real(z);
        let wr = to_real(w);
        (zr.transpose() * &self.e_real * wr)[(0, 0)]
    }

    pub fn h_form(&self, z: &DVector<Complex64>, w: &DVector<Complex64>) -> Complex64 {
        let g = self.g();
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..g {
            for k in 0..g {
                acc += z[j] * self.h[(j, k)] * w[k].conj();
            }
        }
        acc
    }

    /// `|H(z, w) - i E(z, w) - E(iz, w)|`.
    pub fn reconstruction_residual(&self, z: &DVector<Complex64>, w: &DVector<Complex64>) -> f64 {
        let iz = z.map(|c| c * Complex64::i());
        (self.h_form(z, w) - Complex64::i() * self.e(z, w) - self.e(&iz, w)).norm()
    }

    /// Lattice coordinates of `v`; the first g refer to `tau e_j`, the last g to `d_j e_j`.
    pub fn lattice_coordinates(&self, v: &DVector<Complex64>) -> DVector<f64> {
        &self.basis_real_inv * to_real(v)
    }

    /// Lattice basis vector `k` (0-based, `k < 2g`).
    pub fn basis_vector(&self, k: usize) -> DVector<Complex64> {
        let g = self.g();
        DVector::from_fn(g, |i, _| {
            Complex64::new(self.basis_real[(i, k)], self.basis_real[(i + g, k)])
        })
    }
}

pub fn validate_period_matrix(tau: DMatrix<Complex64>, symmetry_tol: f64) -> Result<PeriodMatrix> {
    PeriodMatrix::new(tau, symmetry_tol)
}

pub fn symplectic_data(pm: &PeriodMatrix, d: &PolarizationType) -> Result<SymplecticData> {
    let g = pm.g();
    if d.g() != g {
        return Err(Error::DimensionMismatch(format!(
            "period matrix has g = {g}, polarization type has g = {}",
            d.g()
        )));
    }
    let tau = pm.tau();
    let basis_real = DMatrix::from_fn(2 * g, 2 * g, |r, k| {
        let (row, part_im) = if r < g { (r, false) } else { (r - g, true) };
        let entry = if k < g {
            tau[(row, k)]
        } else if row == k - g {
            Complex64::new(d.divisors()[row] as f64, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
        if part_im {
            entry.im
        } else {
            entry.re
        }
    });
    let basis_real_inv = basis_real
        .clone()
        .try_inverse()
        .ok_or(Error::NotPositive { eigenvalue: 0.0 })?;
    let e_lattice = DMatrix::from_fn(2 * g, 2 * g, |r, c| {
        if r < g && c == r + g {
            d.divisors()[r] as i64
        } else if r >= g && c + g == r {
            -(d.divisors()[c] as i64)
        } else {
            0
        }
    });
    let e_lat_f = e_lattice.map(|x| x as f64);
    let e_real = basis_real_inv.transpose() * e_lat_f * &basis_real_inv;

    let mut sd = SymplecticData {
        e_lattice,
        h: DMatrix::zeros(g, g),
        e_real,
        basis_real,
        basis_real_inv,
    };
    let unit = |j: usize| {
        DVector::from_fn(g, |i, _| {
            if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    };
    let mut h = DMatrix::zeros(g, g);
    for j in 0..g {
        let ej = unit(j);
        let iej = ej.map(|c| c * Complex64::i());
        for k in 0..g {
            let ek = unit(k);
            h[(j, k)] = Complex64::i() * sd.e(&ej, &ek) + sd.e(&iej, &ek);
        }
    }
    // Hermitian positive definite: the real part of H is the Gram matrix of
    // the Euclidean structure, so check via eigenvalues of the 2g real form.
    let herm_dev = (&h - h.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max);
    let scale = h.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1.0);
    if herm_dev > 1e-9 * scale {
        return Err(Error::NotPositive { eigenvalue: f64::NAN });
    }
    let real_form = DMatrix::from_fn(2 * g, 2 * g, |r, c| {
        // Re H on R^{2g} realized as (x + iy) -> block matrix.
        let (a, b) = (r % g, c % g);
        let hc = h[(a, b)];
        match (r < g, c < g) {
            (true, true) | (false, false) => hc.re,
            (true, false) => hc.im,
            (false, true) => -hc.im,
        }
    });
    let min_eig = SymmetricEigen::new(real_form)
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    if !(min_eig > 0.0) {
        return Err(Error::NotPositive { eigenvalue: min_eig });
    }
    sd.h = h;
    Ok(sd)
}

/// Residual of `pi H(v, lam) = 2 pi i E(v, lam) + F(z + lam) - F(z)` with
/// `F(u) = -pi (i E(v, u) - E(iv, u))`.
pub fn check_cocycle_identity(
    sd: &SymplecticData,
    v: &DVector<Complex64>,
    lam: &DVector<Complex64>,
    z: &DVector<Complex64>,
) -> Result<f64> {
    let g = sd.g();
    if v.len() != g || lam.len() != g || z.len() != g {
        return Err(Error::DimensionMismatch("vectors must have length g".into()));
    }
    let coords = sd.lattice_coordinates(lam);
    for (index, &x) in coords.iter().enumerate() {
        let offset = (x - x.round()).abs();
        if offset > LATTICE_MEMBERSHIP_TOL * x.abs().max(1.0) {
            return Err(Error::LatticeMembership { index, offset });
        }
    }
    let i = Complex64::i();
    let iv = v.map(|c| c * i);
    let f = |u: &DVector<Complex64>| -> Complex64 { -PI * (i * sd.e(v, u) - sd.e(&iv, u)) };
    let zl = z + lam;
    let lhs = PI * sd.h_form(v, lam);
    let rhs = 2.0 * PI * i * sd.e(v, lam) + f(&zl) - f(z);
    Ok((lhs - rhs).norm())
}

/// On-disk period matrix: `{"g": .., "d": [..], "tau_re": [[..]], "tau_im": [[..]]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodMatrixFile {
    pub g: usize,
    pub d: Vec<u32>,
    pub tau_re: Vec<Vec<f64>>,
    pub tau_im: Vec<Vec<f64>>,
}

impl PeriodMatrixFile {
    pub fn from_period_matrix(pm: &PeriodMatrix, d: &PolarizationType) -> Self {
        let g = pm.g();
        let rows = |f: &dyn Fn(Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..g)
                .map(|i| (0..g).map(|j| f(pm.tau()[(i, j)])).collect())
                .collect()
        };
        Self {
            g,
            d: d.divisors().to_vec(),
            tau_re: rows(&|c| c.re),
            tau_im: rows(&|c| c.im),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_text(&self) -> String {
        serde_json::to_string_pretty(self).expect("period matrix file serializes")
    }

    pub fn into_parts(self, symmetry_tol: f64) -> Result<(PeriodMatrix, PolarizationType)> {
        let g = self.g;
        let shape_ok = |m: &Vec<Vec<f64>>| m.len() == g && m.iter().all(|r| r.len() == g);
        if !shape_ok(&self.tau_re) || !shape_ok(&self.tau_im) || self.d.len() != g {
            return Err(Error::DimensionMismatch(format!(
                "period matrix file declares g = {g} but fields disagree"
            )));
        }
        let re = DMatrix::from_fn(g, g, |i, j| self.tau_re[i][j]);
        let im = DMatrix::from_fn(g, g, |i, j| self.tau_im[i][j]);
        let pm = PeriodMatrix::from_parts(&re, &im, symmetry_tol)?;
        Ok((pm, PolarizationType::new(self.d)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn polarization_validation() {
        assert!(PolarizationType::new(vec![]).is_err());
        assert!(PolarizationType::new(vec![0, 2]).is_err());
        assert!(PolarizationType::new(vec![2, 3]).is_err());
        let d: PolarizationType = "1, 2,2".parse().unwrap();
        assert_eq!(d.divisors(), &[1, 2, 2]);
        assert_eq!(d.s(), 1);
        assert_eq!(d.h0(), 4);
        assert_eq!(d.evenized().divisors(), &[2, 2, 2]);
    }

    #[test]
    fn validate_examples() {
        let pm = validate_period_matrix(DMatrix::from_element(1, 1, c(0.0, 1.0)), 1e-12).unwrap();
        assert!((pm.lambda_min() - 1.0).abs() < 1e-14);

        let tau = DMatrix::from_row_slice(2, 2, &[c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 2.0)]);
        let pm = validate_period_matrix(tau, 1e-12).unwrap();
        assert!((pm.lambda_min() - 1.0).abs() < 1e-14);

        let tau = DMatrix::from_row_slice(2, 2, &[c(0.0, 1.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]);
        match validate_period_matrix(tau, 1e-12) {
            Err(Error::NotSymmetric { row: 0, col: 1, .. }) => {}
            other => panic!("expected NotSymmetric, got {other:?}"),
        }
    }

    #[test]
    fn rejects_indefinite_imaginary_part() {
        let tau = DMatrix::from_row_slice(2, 2, &[c(0.0, 1.0), c(0.0, 2.0), c(0.0, 2.0), c(0.0, 1.0)]);
        match validate_period_matrix(tau, 1e-12) {
            Err(Error::NotPositive { eigenvalue }) => assert!((eigenvalue + 1.0).abs() < 1e-12),
            other => panic!("expected NotPositive, got {other:?}"),
        }
        assert!(validate_period_matrix(DMatrix::from_element(1, 1, c(0.3, -1.0)), 1e-12).is_err());
    }

    #[test]
    fn hermitian_form_examples() {
        let one = PeriodMatrix::identity_imag(1);
        for (d, expect) in [(vec![1], 1.0), (vec![2], 1.0)] {
            let sd = symplectic_data(&one, &PolarizationType::new(d).unwrap()).unwrap();
            assert!((sd.h[(0, 0)] - c(expect, 0.0)).norm() < 1e-12, "{:?}", sd.h);
        }
        let two = PeriodMatrix::identity_imag(2);
        let sd = symplectic_data(&two, &PolarizationType::new(vec![1, 1]).unwrap()).unwrap();
        let id = DMatrix::<Complex64>::identity(2, 2);
        assert!((&sd.h - id).iter().all(|x| x.norm() < 1e-12));
    }

    #[test]
    fn imaginary_part_on_lattice_basis_is_standard_form() {
        let tau = DMatrix::from_row_slice(
            2,
            2,
            &[c(0.3, 1.4), c(-0.2, 0.35), c(-0.2, 0.35), c(0.7, 2.1)],
        );
        let pm = PeriodMatrix::new(tau, 1e-12).unwrap();
        let d = PolarizationType::new(vec![1, 2]).unwrap();
        let sd = symplectic_data(&pm, &d).unwrap();
        for j in 0..4 {
            for k in 0..4 {
                let im_h = sd.h_form(&sd.basis_vector(j), &sd.basis_vector(k)).im;
                assert!((im_h - sd.e_lattice[(j, k)] as f64).abs() < 1e-10);
            }
        }
        // H = (Im tau)^{-1} for this lattice model.
        let inv = pm.imag_inv();
        for j in 0..2 {
            for k in 0..2 {
                assert!((sd.h[(j, k)] - c(inv[(j, k)], 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn cocycle_examples() {
        let pm = PeriodMatrix::identity_imag(1);
        let d = PolarizationType::new(vec![1]).unwrap();
        let sd = symplectic_data(&pm, &d).unwrap();
        let v1 = |x: Complex64| DVector::from_element(1, x);
        let zero = v1(c(0.0, 0.0));
        let lam = v1(c(0.0, 1.0));
        let z = v1(c(0.3, 0.7));
        assert_eq!(check_cocycle_identity(&sd, &zero, &lam, &z).unwrap(), 0.0);
        assert!(check_cocycle_identity(&sd, &v1(c(1.0, -2.0)), &zero, &z).unwrap() < 1e-15);
        assert!(check_cocycle_identity(&sd, &v1(c(1.0, 0.0)), &lam, &z).unwrap() < 1e-10);
        match check_cocycle_identity(&sd, &v1(c(1.0, 0.0)), &v1(c(0.5, 0.0)), &z) {
            Err(Error::LatticeMembership { .. }) => {}
            other => panic!("expected LatticeMembership, got {other:?}"),
        }
    }

    #[test]
    fn period_matrix_file_round_trip() {
        let tau = DMatrix::from_row_slice(
            2,
            2,
            &[c(0.1, 1.0 / 3.0 + 1.0), c(0.2, 0.1), c(0.2, 0.1), c(-0.4, 1.7)],
        );
        let pm = PeriodMatrix::new(tau, 1e-12).unwrap();
        let d = PolarizationType::new(vec![1, 2]).unwrap();
        let file = PeriodMatrixFile::from_period_matrix(&pm, &d);
        let back = PeriodMatrixFile::parse(&file.to_text()).unwrap();
        assert_eq!(back, file);
        let (pm2, d2) = back.into_parts(1e-12).unwrap();
        assert_eq!(pm2.fingerprint(), pm.fingerprint());
        assert_eq!(d2, d);
    }
}
