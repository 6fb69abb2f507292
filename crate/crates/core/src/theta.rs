//! Riemann theta functions with rational characteristics,
//!
//! ```text
//! theta[a; b](z, tau) = sum_{n in Z^g} exp(i pi (n+a)^T tau (n+a) + 2 pi i (n+a)^T (z+b)),
//! ```
//!
//! summed over an ellipsoid whose radius comes from a closed-form Gaussian
//! tail bound, so the truncation error is at most the requested `eps`.
//!
//! Writing `Y = Im tau`, `y = Im z` and `c = Y^{-1} y`, each term has modulus
//! `exp(pi y^T Y^{-1} y) * exp(-pi |n + a + c|_Y^2)`. For `0 < delta < 1` and
//! `lambda = lambda_min(Y)` the tail beyond `|n + a + c|_Y > R` is at most
//!
//! ```text
//! exp(pi y^T Y^{-1} y) * exp(-pi (1 - delta) R^2) * (2 + 1/sqrt(delta lambda))^g
//! ```
//!
//! using `sum_k exp(-alpha (k + s)^2) <= 2 + sqrt(pi / alpha)` per coordinate.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, RwLock};

use nalgebra::DVector;
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::ToPrimitive;

use crate::av::{PeriodMatrix, PolarizationType};
use crate::error::{Error, Result};
use crate::group::GroupElement;

pub const DEFAULT_EPS: f64 = 1e-10;
/// Maximum number of lattice points a single evaluation may visit.
pub const MAX_LATTICE_POINTS: f64 = 1e8;
const MAX_LOG_MAGNITUDE: f64 = 700.0;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Characteristic {
    pub a: Vec<Rational64>,
    pub b: Vec<Rational64>,
}

impl Characteristic {
    pub fn new(a: Vec<Rational64>, b: Vec<Rational64>) -> Self {
        assert_eq!(a.len(), b.len(), "characteristic halves must have equal length");
        Self { a, b }
    }

    pub fn zero(g: usize) -> Self {
        Self::new(vec![Rational64::from_integer(0); g], vec![Rational64::from_integer(0); g])
    }

    /// `[(1/2, ..., 1/2); (1/2, 0, ..., 0)]`, an odd characteristic in every genus.
    pub fn half_odd(g: usize) -> Self {
        let h = Rational64::new(1, 2);
        let mut b = vec![Rational64::from_integer(0); g];
        b[0] = h;
        Self::new(vec![h; g], b)
    }

    /// `[(2D)^{-1} c; 0]`, the characteristic attached to `c in K1`.
    pub fn from_index(x: &GroupElement, d: &PolarizationType) -> Self {
        let a = x
            .coords()
            .iter()
            .zip(d.divisors())
            .map(|(&c, &di)| Rational64::new(c, 2 * di as i64))
            .collect::<Vec<_>>();
        let g = a.len();
        Self::new(a, vec![Rational64::from_integer(0); g])
    }

    pub fn g(&self) -> usize {
        self.a.len()
    }

    pub fn a_f64(&self) -> Vec<f64> {
        self.a.iter().map(|r| r.to_f64().unwrap()).collect()
    }

    pub fn b_f64(&self) -> Vec<f64> {
        self.b.iter().map(|r| r.to_f64().unwrap()).collect()
    }

    /// `4 a^T b` is an even integer.
    pub fn is_even(&self) -> bool {
        let s: Rational64 = self.a.iter().zip(&self.b).map(|(x, y)| x * y * 4).sum();
        s.is_integer() && s.to_integer() % 2 == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaValue {
    pub value: Complex64,
    /// Guaranteed bound on the truncation error.
    pub abs_error_bound: f64,
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidTolerance(eps))
    }
}

/// Smallest radius (over a grid of splitting parameters) whose tail bound,
/// in log form, is at most `log_target`. Returns `(R^2, log tail bound)`.
fn truncation_radius(log_target: f64, g: usize, lambda_min: f64) -> (f64, f64) {
    let mut best = (f64::INFINITY, 0.0);
    for k in 1..20 {
        let delta = k as f64 / 20.0;
        let log_mass = g as f64 * (2.0 + 1.0 / (delta * lambda_min).sqrt()).ln();
        let r2 = ((log_mass - log_target) / (PI * (1.0 - delta))).max(0.0);
        if r2 < best.0 {
            best = (r2, log_mass - PI * (1.0 - delta) * r2);
        }
    }
    best
}

pub fn theta(ch: &Characteristic, z: &[Complex64], tau: &PeriodMatrix, eps: f64) -> Result<ThetaValue> {
    check_eps(eps)?;
    let g = tau.g();
    if ch.g() != g || z.len() != g {
        return Err(Error::DimensionMismatch(format!(
            "theta: g = {g}, characteristic length {}, z length {}",
            ch.g(),
            z.len()
        )));
    }
    let y = DVector::from_iterator(g, z.iter().map(|c| c.im));
    let center = tau.imag_inv() * &y;
    let log_scale = PI * y.dot(&center);
    if log_scale > MAX_LOG_MAGNITUDE {
        return Err(Error::Overflow(log_scale));
    }
    let (r2, log_tail) = truncation_radius(eps.ln() - log_scale, g, tau.lambda_min());
    let radius = r2.sqrt();

    let l = tau.cholesky_lower();
    let estimate: f64 = (0..g).map(|i| 2.0 * radius / l[(i, i)] + 1.0).product();
    if estimate > MAX_LATTICE_POINTS {
        return Err(Error::NearDegenerate(format!(
            "truncation needs about {estimate:.3e} lattice points (lambda_min = {:e})",
            tau.lambda_min()
        )));
    }

    let a = ch.a_f64();
    let b = ch.b_f64();
    // Lattice points n with |n + shift|_Y <= radius, shift = a + Y^{-1} Im z.
    let shift: Vec<f64> = (0..g).map(|i| a[i] + center[i]).collect();
    let zb: Vec<Complex64> = (0..g).map(|i| z[i] + b[i]).collect();
    let t = tau.tau();

    let mut sum = Complex64::new(0.0, 0.0);
    let mut n = vec![0i64; g];
    let mut x = vec![0.0f64; g];
    // Fincke–Pohst enumeration over the upper factor L^T, last coordinate first.
    fn recurse(
        level: usize,
        budget: f64,
        n: &mut Vec<i64>,
        x: &mut Vec<f64>,
        ctx: &Ctx<'_>,
        sum: &mut Complex64,
    ) {
        let g = n.len();
        let mut partial = 0.0;
        for j in (level + 1)..g {
            partial += ctx.l[(j, level)] * (n[j] as f64 + ctx.shift[j]);
        }
        let lii = ctx.l[(level, level)];
        let r = budget.max(0.0).sqrt();
        let lo = ((-r - partial) / lii - ctx.shift[level]).ceil() as i64;
        let hi = ((r - partial) / lii - ctx.shift[level]).floor() as i64;
        for k in lo..=hi {
            let s = lii * (k as f64 + ctx.shift[level]) + partial;
            let rest = budget - s * s;
            if rest < 0.0 {
                continue;
            }
            n[level] = k;
            x[level] = k as f64 + ctx.a[level];
            if level == 0 {
                let mut quad = Complex64::new(0.0, 0.0);
                let mut lin = Complex64::new(0.0, 0.0);
                for i in 0..g {
                    let mut row = Complex64::new(0.0, 0.0);
                    for j in 0..g {
                        row += ctx.tau[(i, j)] * x[j];
                    }
                    quad += row * x[i];
                    lin += ctx.zb[i] * x[i];
                }
                *sum += (Complex64::i() * PI * (quad + 2.0 * lin)).exp();
            } else {
                recurse(level - 1, rest, n, x, ctx, sum);
            }
        }
    }
    struct Ctx<'a> {
        l: &'a nalgebra::DMatrix<f64>,
        tau: &'a nalgebra::DMatrix<Complex64>,
        shift: &'a [f64],
        a: &'a [f64],
        zb: &'a [Complex64],
    }
    let ctx = Ctx {
        l,
        tau: t,
        shift: &shift,
        a: &a,
        zb: &zb,
    };
    recurse(g - 1, r2, &mut n, &mut x, &ctx, &mut sum);

    Ok(ThetaValue {
        value: sum,
        abs_error_bound: (log_scale + log_tail).exp().min(eps),
    })
}

pub fn theta_constant(ch: &Characteristic, tau: &PeriodMatrix, eps: f64) -> Result<ThetaValue> {
    theta(ch, &vec![Complex64::new(0.0, 0.0); tau.g()], tau, eps)
}

/// `exp(-i pi m^T tau m - 2 pi i m^T z + 2 pi i (a^T n - b^T m))`, the factor
/// with `theta[a;b](z + tau m + n) = factor * theta[a;b](z)`.
pub fn quasiperiodicity_factor(
    ch: &Characteristic,
    m: &[i64],
    n: &[i64],
    z: &[Complex64],
    tau: &PeriodMatrix,
) -> Complex64 {
    let g = tau.g();
    let a = ch.a_f64();
    let b = ch.b_f64();
    let t = tau.tau();
    let mut quad = Complex64::new(0.0, 0.0);
    let mut lin = Complex64::new(0.0, 0.0);
    let mut chr = 0.0;
    for i in 0..g {
        for j in 0..g {
            quad += t[(i, j)] * (m[i] * m[j]) as f64;
        }
        lin += z[i] * m[i] as f64;
        chr += a[i] * n[i] as f64 - b[i] * m[i] as f64;
    }
    (Complex64::i() * PI * (-quad - 2.0 * lin + 2.0 * chr)).exp()
}

type CacheKey = (Vec<Rational64>, Vec<Rational64>, u64, u64);

/// Theta constants keyed by characteristic, period-matrix fingerprint and eps.
/// Reads take a shared lock; insertion takes the write lock once per key.
#[derive(Debug, Default, Clone)]
pub struct ThetaConstantCache {
    inner: Arc<RwLock<HashMap<CacheKey, ThetaValue>>>,
}

impl ThetaConstantCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_compute(&self, ch: &Characteristic, tau: &PeriodMatrix, eps: f64) -> Result<ThetaValue> {
        let key = (ch.a.clone(), ch.b.clone(), tau.fingerprint(), eps.to_bits());
        if let Some(v) = self.inner.read().expect("theta cache poisoned").get(&key) {
            return Ok(*v);
        }
        let v = theta_constant(ch, tau, eps)?;
        self.inner
            .write()
            .expect("theta cache poisoned")
            .entry(key)
            .or_insert(v);
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.inner.read().expect("theta cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
