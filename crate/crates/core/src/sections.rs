//! Theta bases of `H^0(A, L)` and `H^0(A, L^2)` on `C^g / (tau Z^g + D Z^g)`.
//!
//! * level L: `x in 2K1` (even `c`) gives `theta[(2D)^{-1} c; 0](z, tau)`;
//! * level L^2: `x in K1` gives `theta[(2D)^{-1} c; 0](2z, 2tau)`.

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::av::{PeriodMatrix, PolarizationType};
use crate::error::{Error, Result};
use crate::group::{GroupElement, ThetaGroup};
use crate::linalg::{numerical_rank, singular_values, CMatrix};
use crate::theta::{theta, Characteristic, ThetaValue};

/// Relative tolerance for numerical independence of a basis.
pub const INDEPENDENCE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Level {
    L,
    L2,
}

impl Level {
    /// Power of the automorphy factor carried by sections of this level.
    pub fn power(self) -> u32 {
        match self {
            Level::L => 1,
            Level::L2 => 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SectionEntry {
    pub index: GroupElement,
    pub characteristic: Characteristic,
    /// Sections are evaluated at `(k z, k tau)`.
    pub arg_scale: u32,
}

#[derive(Debug, Clone)]
pub struct SectionBasis {
    pub level: Level,
    pub d: PolarizationType,
    pub tau: PeriodMatrix,
    /// `tau` scaled by the argument scaling of the entries.
    eval_tau: PeriodMatrix,
    pub entries: Vec<SectionEntry>,
}

fn check_dims(d: &PolarizationType, tau: &PeriodMatrix) -> Result<()> {
    if d.g() != tau.g() {
        return Err(Error::DimensionMismatch(format!(
            "polarization type has g = {}, period matrix has g = {}",
            d.g(),
            tau.g()
        )));
    }
    Ok(())
}

pub fn basis_l(d: &PolarizationType, tau: &PeriodMatrix) -> Result<SectionBasis> {
    check_dims(d, tau)?;
    let group = ThetaGroup::new(d)?;
    let entries = group
        .subgroup_2k1()
        .into_iter()
        .map(|x| SectionEntry {
            characteristic: Characteristic::from_index(&x, d),
            index: x,
            arg_scale: 1,
        })
        .collect();
    Ok(SectionBasis {
        level: Level::L,
        d: d.clone(),
        tau: tau.clone(),
        eval_tau: tau.clone(),
        entries,
    })
}

pub fn basis_l2(d: &PolarizationType, tau: &PeriodMatrix) -> Result<SectionBasis> {
    check_dims(d, tau)?;
    let group = ThetaGroup::new(d)?;
    let entries = group
        .enumerate_k1()
        .into_iter()
        .map(|x| SectionEntry {
            characteristic: Characteristic::from_index(&x, d),
            index: x,
            arg_scale: 2,
        })
        .collect();
    Ok(SectionBasis {
        level: Level::L2,
        d: d.clone(),
        tau: tau.clone(),
        eval_tau: tau.scaled(2.0),
        entries,
    })
}

impl SectionBasis {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn position(&self, index: &GroupElement) -> Option<usize> {
        self.entries.binary_search_by(|e| e.index.cmp(index)).ok()
    }

    pub fn eval_entry(&self, i: usize, z: &[Complex64], eps: f64) -> Result<ThetaValue> {
        let e = &self.entries[i];
        let k = e.arg_scale as f64;
        let zk: Vec<Complex64> = z.iter().map(|c| c * k).collect();
        theta(&e.characteristic, &zk, &self.eval_tau, eps)
    }

    /// All basis sections at `z`, in entry order.
    pub fn eval_all(&self, z: &[Complex64], eps: f64) -> Result<Vec<Complex64>> {
        (0..self.len())
            .map(|i| self.eval_entry(i, z, eps).map(|v| v.value))
            .collect()
    }

    /// `exp(-pi * power * Im z^T (Im tau)^{-1} Im z)`; multiplying a section of
    /// this level by it gives a function bounded on the torus.
    pub fn normalization(&self, z: &[Complex64]) -> f64 {
        normalization(&self.tau, z, self.level.power())
    }
}

pub fn normalization(tau: &PeriodMatrix, z: &[Complex64], power: u32) -> f64 {
    let y = DVector::from_iterator(z.len(), z.iter().map(|c| c.im));
    let q = y.dot(&(tau.imag_inv() * &y));
    (-PI * power as f64 * q).exp()
}

/// A section expressed in a basis.
#[derive(Debug, Clone)]
pub struct SectionVector<'a> {
    pub basis: &'a SectionBasis,
    pub coeffs: Vec<Complex64>,
}

impl<'a> SectionVector<'a> {
    pub fn new(basis: &'a SectionBasis, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != basis.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for a basis of size {}",
                coeffs.len(),
                basis.len()
            )));
        }
        Ok(Self { basis, coeffs })
    }

    pub fn unit(basis: &'a SectionBasis, i: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); basis.len()];
        coeffs[i] = Complex64::new(1.0, 0.0);
        Self { basis, coeffs }
    }
}

/// `sum_i coeffs_i theta_i(z)`; the error bound is `|coeffs|_1 * eps`.
pub fn evaluate(v: &SectionVector<'_>, z: &[Complex64], eps: f64) -> Result<ThetaValue> {
    if z.len() != v.basis.tau.g() {
        return Err(Error::DimensionMismatch(format!(
            "point of length {} for g = {}",
            z.len(),
            v.basis.tau.g()
        )));
    }
    let mut value = Complex64::new(0.0, 0.0);
    let mut bound = 0.0;
    for (i, c) in v.coeffs.iter().enumerate() {
        if c.norm() == 0.0 {
            continue;
        }
        let t = v.basis.eval_entry(i, z, eps)?;
        value += c * t.value;
        bound += c.norm() * t.abs_error_bound;
    }
    Ok(ThetaValue {
        value,
        abs_error_bound: bound,
    })
}

/// Pseudorandom points `z = tau u + D v` with `u, v` uniform in `[0, 1)^g`.
pub fn sample_points(tau: &PeriodMatrix, d: &PolarizationType, n: usize, seed: u64) -> Vec<Vec<Complex64>> {
    let g = tau.g();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let u: Vec<f64> = (0..g).map(|_| rng.gen::<f64>()).collect();
            let v: Vec<f64> = (0..g).map(|_| rng.gen::<f64>()).collect();
            (0..g)
                .map(|i| {
                    let mut z = Complex64::new(d.divisors()[i] as f64 * v[i], 0.0);
                    for j in 0..g {
                        z += tau.tau()[(i, j)] * u[j];
                    }
                    z
                })
                .collect()
        })
        .collect()
}

/// Normalized evaluation matrix: row `s` holds all sections at point `s`,
/// scaled by the level normalization at that point.
pub fn evaluation_matrix(basis: &SectionBasis, points: &[Vec<Complex64>], eps: f64) -> Result<CMatrix> {
    let rows: Vec<Vec<Complex64>> = points
        .par_iter()
        .map(|z| {
            let w = basis.normalization(z);
            basis
                .eval_all(z, eps)
                .map(|vals| vals.into_iter().map(|v| v * w).collect())
        })
        .collect::<Result<_>>()?;
    Ok(CMatrix::from_fn(points.len(), basis.len(), |r, c| rows[r][c]))
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct IndependenceReport {
    pub n_samples: usize,
    pub sigma_max: f64,
    pub sigma_min: f64,
    pub rank: usize,
    pub independent: bool,
}

pub fn linear_independence_check(
    basis: &SectionBasis,
    n_samples: usize,
    seed: u64,
    eps: f64,
) -> Result<IndependenceReport> {
    if n_samples < 2 * basis.len() {
        return Err(Error::Precondition(format!(
            "need at least {} samples, got {n_samples}",
            2 * basis.len()
        )));
    }
    let points = sample_points(&basis.tau, &basis.d, n_samples, seed);
    let m = evaluation_matrix(basis, &points, eps)?;
    let sv = singular_values(&m);
    let sigma_max = sv.first().cloned().unwrap_or(0.0);
    let sigma_min = sv.last().cloned().unwrap_or(0.0);
    let rank = numerical_rank(&sv, INDEPENDENCE_TOL, sigma_max);
    if rank < basis.len() {
        return Err(Error::DegenerateSampling {
            rank,
            expected: basis.len(),
        });
    }
    Ok(IndependenceReport {
        n_samples,
        sigma_max,
        sigma_min,
        rank,
        independent: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theta::quasiperiodicity_factor;
    use num_rational::Rational64;

    fn pt(d: &[u32]) -> PolarizationType {
        PolarizationType::new(d.to_vec()).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn generic_tau2() -> PeriodMatrix {
        PeriodMatrix::new(
            CMatrix::from_row_slice(2, 2, &[c(0.21, 1.3), c(-0.17, 0.28), c(-0.17, 0.28), c(0.4, 1.05)]),
            1e-12,
        )
        .unwrap()
    }

    #[test]
    fn basis_l_examples() {
        let tau = PeriodMatrix::identity_imag(1);
        let b = basis_l(&pt(&[1]), &tau).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b.entries[0].characteristic.a, vec![Rational64::from_integer(0)]);
        let b = basis_l(&pt(&[2]), &tau).unwrap();
        let chars: Vec<_> = b.entries.iter().map(|e| e.characteristic.a[0]).collect();
        assert_eq!(chars, vec![Rational64::from_integer(0), Rational64::new(1, 2)]);
        assert_eq!(basis_l(&pt(&[2, 2]), &PeriodMatrix::identity_imag(2)).unwrap().len(), 4);
    }

    #[test]
    fn basis_l2_examples() {
        let tau = PeriodMatrix::identity_imag(1);
        assert_eq!(basis_l2(&pt(&[1]), &tau).unwrap().len(), 2);
        assert_eq!(basis_l2(&pt(&[2]), &tau).unwrap().len(), 4);
        let b = basis_l2(&pt(&[2, 2]), &PeriodMatrix::identity_imag(2)).unwrap();
        assert_eq!(b.len(), 16);
        let mut chars: Vec<_> = b.entries.iter().map(|e| e.characteristic.clone()).collect();
        chars.sort_by(|x, y| x.a.cmp(&y.a));
        chars.dedup();
        assert_eq!(chars.len(), 16);
    }

    #[test]
    fn evaluate_examples() {
        let tau = generic_tau2();
        let b = basis_l(&pt(&[1, 2]), &tau).unwrap();
        let z = [c(0.3, 0.1), c(-0.2, 0.4)];
        let zero = SectionVector::new(&b, vec![c(0.0, 0.0); 2]).unwrap();
        assert_eq!(evaluate(&zero, &z, 1e-12).unwrap().value, c(0.0, 0.0));
        let unit = SectionVector::unit(&b, 1);
        let direct = theta(&b.entries[1].characteristic, &z, &tau, 1e-12).unwrap();
        assert_eq!(evaluate(&unit, &z, 1e-12).unwrap().value, direct.value);
    }

    #[test]
    fn random_section_transforms_by_common_factor() {
        let tau = generic_tau2();
        let d = pt(&[1, 2]);
        let b = basis_l(&d, &tau).unwrap();
        let v = SectionVector::new(&b, vec![c(0.7, -0.3), c(-1.1, 0.4)]).unwrap();
        let z = [c(0.13, 0.05), c(-0.31, 0.12)];
        let m = [1i64, -1];
        let k = [2i64, 1];
        let lam = tau.lattice_point(&d, &m, &k);
        let shifted: Vec<Complex64> = z.iter().zip(lam.iter()).map(|(a, b)| a + b).collect();
        let factor = quasiperiodicity_factor(&Characteristic::zero(2), &m, &[0, 0], &z, &tau);
        let lhs = evaluate(&v, &shifted, 1e-14).unwrap().value;
        let rhs = factor * evaluate(&v, &z, 1e-14).unwrap().value;
        assert!((lhs - rhs).norm() < 1e-9 * lhs.norm());
    }

    #[test]
    fn sections_have_level_automorphy() {
        let tau = generic_tau2();
        let d = pt(&[2, 2]);
        for basis in [basis_l(&d, &tau).unwrap(), basis_l2(&d, &tau).unwrap()] {
            let power = basis.level.power() as i32;
            let z = [c(0.11, -0.07), c(0.37, 0.19)];
            for (m, k) in [([1i64, 0], [0i64, 0]), ([0, 1], [1, -1]), ([-1, 1], [0, 1])] {
                let lam = tau.lattice_point(&d, &m, &k);
                let zs: Vec<Complex64> = z.iter().zip(lam.iter()).map(|(a, b)| a + b).collect();
                let f = quasiperiodicity_factor(&Characteristic::zero(2), &m, &[0, 0], &z, &tau)
                    .powi(power);
                for i in 0..basis.len() {
                    let lhs = basis.eval_entry(i, &zs, 1e-14).unwrap().value;
                    let rhs = f * basis.eval_entry(i, &z, 1e-14).unwrap().value;
                    assert!((lhs - rhs).norm() < 1e-9 * lhs.norm().max(1e-300), "{i} {m:?} {k:?}");
                }
            }
        }
    }

    #[test]
    fn independence_examples() {
        let tau1 = PeriodMatrix::identity_imag(1);
        let r = linear_independence_check(&basis_l(&pt(&[1]), &tau1).unwrap(), 4, 7, 1e-12).unwrap();
        assert_eq!(r.rank, 1);
        assert!(r.sigma_min > 0.0);
        let r = linear_independence_check(&basis_l(&pt(&[2]), &tau1).unwrap(), 8, 7, 1e-12).unwrap();
        assert_eq!(r.rank, 2);
        let tau2 = PeriodMatrix::identity_imag(2);
        let r = linear_independence_check(&basis_l(&pt(&[2, 2]), &tau2).unwrap(), 16, 7, 1e-12).unwrap();
        assert_eq!(r.rank, 4);
        let r = linear_independence_check(&basis_l2(&pt(&[1, 2]), &generic_tau2()).unwrap(), 40, 3, 1e-12)
            .unwrap();
        assert_eq!(r.rank, 8);
    }

    #[test]
    fn too_few_samples_rejected() {
        let b = basis_l(&pt(&[2]), &PeriodMatrix::identity_imag(1)).unwrap();
        assert!(matches!(linear_independence_check(&b, 3, 0, 1e-12), Err(Error::Precondition(_))));
    }

    #[test]
    fn duplicated_section_is_degenerate() {
        let mut b = basis_l(&pt(&[2]), &PeriodMatrix::identity_imag(1)).unwrap();
        b.entries[1] = b.entries[0].clone();
        assert!(matches!(
            linear_independence_check(&b, 8, 1, 1e-12),
            Err(Error::DegenerateSampling { rank: 1, expected: 2 })
        ));
    }
}
