//! Seeded sweeps over period matrices, report persistence and the identity
//! self-check behind `thetamult verify`.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::av::{
    check_cocycle_identity, symplectic_data, PeriodMatrix, PeriodMatrixFile, PolarizationType, DEFAULT_SYMMETRY_TOL,
};
use crate::error::{Error, Result, Verdict};
use crate::linalg::max_abs;
use crate::multmap::{
    block_structure_from, factorization_residual, injectivity_diagnostics, mult_matrix_formula,
    mult_matrix_interpolation, pullback_invariance_check, relative_difference, BLOCK_LEAK_TOL,
};
use crate::theta::{quasiperiodicity_factor, theta, Characteristic, ThetaConstantCache};

pub const SCHEMA_VERSION: u32 = 1;
pub const ORACLE_TOL: f64 = 1e-8;
pub const FACTORIZATION_TOL: f64 = 1e-9;
pub const COCYCLE_TOL: f64 = 1e-10;
pub const QUASIPERIODICITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum TauMode {
    Random,
    File { path: PathBuf },
    DiagonalProduct,
    /// Diagonal product plus an off-diagonal perturbation ramped linearly
    /// from `delta / n` to `delta` over the samples.
    PerturbedProduct { delta: f64 },
}

impl TauMode {
    pub fn name(&self) -> &'static str {
        match self {
            TauMode::Random => "random",
            TauMode::File { .. } => "file",
            TauMode::DiagonalProduct => "diagonal-product",
            TauMode::PerturbedProduct { .. } => "perturbed-product",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub d: PolarizationType,
    pub n_samples: usize,
    pub seed: u64,
    pub eps: f64,
    pub rank_tol: f64,
    pub spread: f64,
    pub tau_mode: TauMode,
}

impl SweepConfig {
    pub fn new(d: PolarizationType, n_samples: usize, seed: u64) -> Self {
        Self {
            d,
            n_samples,
            seed,
            eps: 1e-12,
            rank_tol: crate::multmap::DEFAULT_RANK_TOL,
            spread: 1.0,
            tau_mode: TauMode::Random,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::Precondition("n_samples must be at least 1".into()));
        }
        for t in [self.eps, self.rank_tol] {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::InvalidTolerance(t));
            }
        }
        if !(self.spread >= 0.0 && self.spread.is_finite()) {
            return Err(Error::Precondition(format!("spread must be >= 0, got {}", self.spread)));
        }
        if let TauMode::PerturbedProduct { delta } = self.tau_mode {
            if !(delta >= 0.0 && delta.is_finite()) {
                return Err(Error::Precondition(format!("delta must be >= 0, got {delta}")));
            }
        }
        Ok(())
    }
}

fn random_siegel_from(g: usize, rng: &mut ChaCha8Rng, spread: f64) -> PeriodMatrix {
    let mut unif = || if spread > 0.0 { rng.gen_range(-spread..=spread) } else { 0.0 };
    let mut s = DMatrix::<f64>::zeros(g, g);
    for i in 0..g {
        for j in i..g {
            let v = unif();
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
    let q = DMatrix::<f64>::from_fn(g, g, |_, _| unif());
    let p = q.transpose() * q + DMatrix::<f64>::identity(g, g);
    PeriodMatrix::from_parts(&s, &p, DEFAULT_SYMMETRY_TOL).expect("Q^T Q + I is positive definite")
}

/// `tau = S + iP` with `S` symmetric and `P = Q^T Q + I`, all entries of `S`
/// and `Q` uniform in `[-spread, spread]`.
pub fn random_siegel(g: usize, seed: u64, spread: f64) -> PeriodMatrix {
    random_siegel_from(g, &mut ChaCha8Rng::seed_from_u64(seed), spread)
}

// Each sample draws from its own ChaCha stream, so sample i never depends on
// how many values the other samples consumed or on the order they ran in.
fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn diagonal_product(g: usize, rng: &mut ChaCha8Rng, spread: f64) -> PeriodMatrix {
    let entries: Vec<Complex64> = (0..g)
        .map(|_| random_siegel_from(1, rng, spread).tau()[(0, 0)])
        .collect();
    PeriodMatrix::diagonal(&entries).expect("diagonal entries lie in the upper half plane")
}

/// The period matrix of sample `index`, plus the perturbation size in
/// perturbed-product mode.
pub fn sample_tau(cfg: &SweepConfig, index: usize, file_tau: Option<&PeriodMatrix>) -> Result<(PeriodMatrix, Option<f64>)> {
    let g = cfg.d.g();
    let mut rng = sample_rng(cfg.seed, index);
    match &cfg.tau_mode {
        TauMode::Random => Ok((random_siegel_from(g, &mut rng, cfg.spread), None)),
        TauMode::File { .. } => Ok((
            file_tau
                .cloned()
                .ok_or_else(|| Error::Precondition("file mode needs a loaded period matrix".into()))?,
            None,
        )),
        TauMode::DiagonalProduct => Ok((diagonal_product(g, &mut rng, cfg.spread), None)),
        TauMode::PerturbedProduct { delta } => {
            let base = diagonal_product(g, &mut rng, cfg.spread);
            let step = delta * (index + 1) as f64 / cfg.n_samples as f64;
            let mut tau = base.tau().clone();
            for i in 0..g {
                for j in (i + 1)..g {
                    let v = Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)) * step;
                    tau[(i, j)] += v;
                    tau[(j, i)] += v;
                }
            }
            Ok((PeriodMatrix::new(tau, DEFAULT_SYMMETRY_TOL)?, Some(step)))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleStatus {
    Injective,
    Deficient,
    VerdictMismatch,
    BlockLeak,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub index: usize,
    pub tau_fingerprint: String,
    pub tau_re: Vec<Vec<f64>>,
    pub tau_im: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    pub status: SampleStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block_verdict: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direct_verdict: Option<Verdict>,
    pub block_shapes: Vec<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block_margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direct_margin: Option<f64>,
    /// Off-block leakage relative to the largest transformed entry.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factorization_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub n_samples: usize,
    pub n_injective: usize,
    pub n_deficient: usize,
    pub n_verdict_mismatch: usize,
    pub n_block_leak: usize,
    pub n_error: usize,
    pub fraction_injective: f64,
    pub worst_block_margin: Option<f64>,
    pub worst_direct_margin: Option<f64>,
    pub worst_block_residual: Option<f64>,
    pub worst_factorization_residual: Option<f64>,
    /// Indices of samples that are not injective.
    pub failures: Vec<usize>,
}

fn fold_min(xs: impl Iterator<Item = f64>) -> Option<f64> {
    xs.fold(None, |acc, x| Some(acc.map_or(x, |a: f64| a.min(x))))
}

fn fold_max(xs: impl Iterator<Item = f64>) -> Option<f64> {
    xs.fold(None, |acc, x| Some(acc.map_or(x, |a: f64| a.max(x))))
}

pub fn aggregate(records: &[SampleRecord]) -> Aggregate {
    let count = |s: SampleStatus| records.iter().filter(|r| r.status == s).count();
    let n_injective = count(SampleStatus::Injective);
    Aggregate {
        n_samples: records.len(),
        n_injective,
        n_deficient: count(SampleStatus::Deficient),
        n_verdict_mismatch: count(SampleStatus::VerdictMismatch),
        n_block_leak: count(SampleStatus::BlockLeak),
        n_error: count(SampleStatus::Error),
        fraction_injective: if records.is_empty() {
            0.0
        } else {
            n_injective as f64 / records.len() as f64
        },
        worst_block_margin: fold_min(records.iter().filter_map(|r| r.block_margin)),
        worst_direct_margin: fold_min(records.iter().filter_map(|r| r.direct_margin)),
        worst_block_residual: fold_max(records.iter().filter_map(|r| r.block_residual)),
        worst_factorization_residual: fold_max(records.iter().filter_map(|r| r.factorization_residual)),
        failures: records
            .iter()
            .filter(|r| r.status != SampleStatus::Injective)
            .map(|r| r.index)
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub schema_version: u32,
    pub config: SweepConfig,
    /// Whether every `d_i` lies in `{1, 2}`.
    pub theorem_hypothesis: bool,
    pub aggregate: Aggregate,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub summary: SweepSummary,
    pub records: Vec<SampleRecord>,
    /// Wall-clock milliseconds per sample; kept out of the deterministic files.
    pub timings_ms: Vec<f64>,
}

impl SweepReport {
    pub fn records_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("record serializes"));
            out.push('\n');
        }
        out
    }

    pub fn summary_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.summary).expect("summary serializes");
        s.push('\n');
        s
    }

    /// Writes `records.jsonl`, `summary.json` and `timings.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("records.jsonl"), self.records_jsonl())?;
        fs::write(dir.join("summary.json"), self.summary_json())?;
        fs::write(
            dir.join("timings.json"),
            serde_json::to_string(&self.timings_ms)? + "\n",
        )?;
        Ok(())
    }

    pub fn exit_code(&self) -> i32 {
        let a = &self.summary.aggregate;
        if a.n_verdict_mismatch + a.n_block_leak + a.n_error > 0 {
            3
        } else if a.n_deficient > 0 {
            2
        } else {
            0
        }
    }
}

pub fn load_period_matrix(path: &Path) -> Result<(PeriodMatrix, PolarizationType)> {
    let text = fs::read_to_string(path)?;
    PeriodMatrixFile::parse(&text)?.into_parts(DEFAULT_SYMMETRY_TOL)
}

/// Runs the injectivity analysis for one period matrix.
pub fn analyze_sample(cfg: &SweepConfig, index: usize, tau: &PeriodMatrix, delta: Option<f64>) -> SampleRecord {
    let file = PeriodMatrixFile::from_period_matrix(tau, &cfg.d);
    let mut rec = SampleRecord {
        index,
        tau_fingerprint: format!("{:016x}", tau.fingerprint()),
        tau_re: file.tau_re,
        tau_im: file.tau_im,
        delta,
        status: SampleStatus::Error,
        error: None,
        block_verdict: None,
        direct_verdict: None,
        block_shapes: Vec::new(),
        block_margin: None,
        direct_margin: None,
        block_residual: None,
        factorization_residual: None,
    };
    let cache = ThetaConstantCache::new();
    let (report, m, kappa) = match injectivity_diagnostics(&cfg.d, tau, cfg.eps, cfg.rank_tol, &cache) {
        Ok(x) => x,
        Err(e) => {
            rec.error = Some(e.to_string());
            return rec;
        }
    };
    rec.block_verdict = Some(report.block_verdict);
    rec.direct_verdict = Some(report.direct_verdict);
    rec.block_shapes = report.block_shapes();
    rec.block_margin = Some(report.block_margin);
    rec.direct_margin = Some(report.direct_margin);
    let leak = match block_structure_from(&kappa, &m) {
        Ok(s) => {
            rec.block_residual = Some(if s.scale > 0.0 { s.off_block / s.scale } else { 0.0 });
            false
        }
        Err(Error::BlockLeak { residual, limit }) => {
            rec.block_residual = Some(residual * BLOCK_LEAK_TOL / limit);
            true
        }
        Err(e) => {
            rec.error = Some(e.to_string());
            return rec;
        }
    };
    if tau.is_diagonal() && cfg.tau_mode != TauMode::Random {
        match factorization_residual(&cfg.d, tau, cfg.eps) {
            Ok(r) => rec.factorization_residual = Some(r),
            Err(e) => {
                rec.error = Some(e.to_string());
                return rec;
            }
        }
    }
    rec.status = if !report.agree() {
        SampleStatus::VerdictMismatch
    } else if leak {
        SampleStatus::BlockLeak
    } else if report.block_verdict == Verdict::FullRank {
        SampleStatus::Injective
    } else {
        SampleStatus::Deficient
    };
    rec
}

/// Sweeps `cfg.n_samples` period matrices on a pool of `jobs` threads.
/// Records are ordered by sample index and independent of `jobs`.
pub fn run_sweep(cfg: &SweepConfig, jobs: usize) -> Result<SweepReport> {
    cfg.validate()?;
    let file_tau = match &cfg.tau_mode {
        TauMode::File { path } => {
            let (tau, d) = load_period_matrix(path)?;
            if d != cfg.d {
                return Err(Error::Precondition(format!(
                    "period matrix file declares type {d}, sweep requested {}",
                    cfg.d
                )));
            }
            Some(tau)
        }
        _ => None,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Precondition(e.to_string()))?;
    let results: Vec<(SampleRecord, f64)> = pool.install(|| {
        (0..cfg.n_samples)
            .into_par_iter()
            .map(|i| {
                let start = Instant::now();
                let rec = match sample_tau(cfg, i, file_tau.as_ref()) {
                    Ok((tau, delta)) => analyze_sample(cfg, i, &tau, delta),
                    Err(e) => failed_record(i, delta_of(cfg, i), e),
                };
                log::debug!("sample {i}: {:?}", rec.status);
                (rec, start.elapsed().as_secs_f64() * 1e3)
            })
            .collect()
    });
    let (records, timings_ms): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let theorem_hypothesis = cfg.d.divisors().iter().all(|&d| d <= 2);
    Ok(SweepReport {
        summary: SweepSummary {
            schema_version: SCHEMA_VERSION,
            config: cfg.clone(),
            theorem_hypothesis,
            aggregate: aggregate(&records),
        },
        records,
        timings_ms,
    })
}

fn delta_of(cfg: &SweepConfig, i: usize) -> Option<f64> {
    match cfg.tau_mode {
        TauMode::PerturbedProduct { delta } => Some(delta * (i + 1) as f64 / cfg.n_samples as f64),
        _ => None,
    }
}

fn failed_record(index: usize, delta: Option<f64>, e: Error) -> SampleRecord {
    SampleRecord {
        index,
        tau_fingerprint: String::new(),
        tau_re: Vec::new(),
        tau_im: Vec::new(),
        delta,
        status: SampleStatus::Error,
        error: Some(e.to_string()),
        block_verdict: None,
        direct_verdict: None,
        block_shapes: Vec::new(),
        block_margin: None,
        direct_margin: None,
        block_residual: None,
        factorization_residual: None,
    }
}

/// Sweep restricted to types with every `d_i` in `{1, 2}`.
pub fn run_theorem_suite(cfg: &SweepConfig, jobs: usize) -> Result<SweepReport> {
    if cfg.d.divisors().iter().any(|&d| d > 2) {
        return Err(Error::Precondition(format!("type {} has a divisor above 2", cfg.d)));
    }
    run_sweep(cfg, jobs)
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub seed: u64,
    pub eps: f64,
    /// Restrict fixtures to genus one.
    pub g1_only: bool,
    pub samples_per_fixture: usize,
    /// Perturb one entry of each formula matrix before comparing with the
    /// interpolation oracle; the oracle check must then fail.
    pub sabotage: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            eps: 1e-13,
            g1_only: false,
            samples_per_fixture: 5,
            sabotage: false,
        }
    }
}

fn fixtures(g1_only: bool) -> Vec<PolarizationType> {
    let all: &[&[u32]] = &[&[1], &[2], &[1, 1], &[1, 2], &[2, 2]];
    all.iter()
        .filter(|d| !g1_only || d.len() == 1)
        .map(|d| PolarizationType::new(d.to_vec()).expect("fixture types are valid"))
        .collect()
}

struct Accumulator {
    name: &'static str,
    tolerance: f64,
    worst: f64,
    detail: Option<String>,
}

impl Accumulator {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            tolerance,
            worst: 0.0,
            detail: None,
        }
    }

    fn record(&mut self, r: Result<f64>, label: impl FnOnce() -> String) {
        match r {
            Ok(v) if v.is_finite() => {
                if v > self.worst {
                    self.worst = v;
                    if v > self.tolerance {
                        self.detail = Some(label());
                    }
                }
            }
            Ok(v) => {
                self.worst = f64::INFINITY;
                self.detail = Some(format!("{}: non-finite residual {v}", label()));
            }
            Err(e) => {
                self.worst = f64::INFINITY;
                self.detail = Some(format!("{}: {e}", label()));
            }
        }
    }

    fn finish(self) -> CheckResult {
        CheckResult {
            name: self.name.to_string(),
            passed: self.worst <= self.tolerance,
            residual: self.worst,
            tolerance: self.tolerance,
            detail: self.detail,
        }
    }
}

fn random_vector(g: usize, rng: &mut ChaCha8Rng) -> DVector<Complex64> {
    DVector::from_fn(g, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

/// Relative quasi-periodicity defect of `theta[a; b]` at `z` under
/// `z -> z + tau m + n`.
pub fn quasiperiodicity_residual(
    ch: &Characteristic,
    m: &[i64],
    n: &[i64],
    z: &[Complex64],
    tau: &PeriodMatrix,
    eps: f64,
) -> Result<f64> {
    let g = tau.g();
    let shifted: Vec<Complex64> = (0..g)
        .map(|i| {
            let mut v = z[i] + n[i] as f64;
            for j in 0..g {
                v += tau.tau()[(i, j)] * m[j] as f64;
            }
            v
        })
        .collect();
    let lhs = theta(ch, &shifted, tau, eps)?;
    let base = theta(ch, z, tau, eps)?;
    let factor = quasiperiodicity_factor(ch, m, n, z, tau);
    let rhs = factor * base.value;
    let scale = lhs.value.norm().max(rhs.norm()).max(f64::MIN_POSITIVE);
    Ok((lhs.value - rhs).norm() / scale)
}

/// Runs the cocycle, reconstruction, quasi-periodicity, oracle-equivalence,
/// block-structure and pullback checks on the fixture set.
pub fn verify_identities(cfg: &VerifyConfig) -> VerifyReport {
    let types = fixtures(cfg.g1_only);
    let mut cocycle = Accumulator::new("cocycle", COCYCLE_TOL);
    let mut reconstruction = Accumulator::new("hermitian-reconstruction", COCYCLE_TOL);
    let mut quasi = Accumulator::new("quasi-periodicity", QUASIPERIODICITY_TOL);
    let mut oracle = Accumulator::new("oracle-equivalence", ORACLE_TOL);
    let mut blocks = Accumulator::new("block-structure", BLOCK_LEAK_TOL);
    let mut pullback = Accumulator::new("pullback-invariance", crate::multmap::SPAN_TOL);

    for (fi, d) in types.iter().enumerate() {
        let g = d.g();
        for k in 0..cfg.samples_per_fixture {
            let mut rng = sample_rng(cfg.seed, fi * 1000 + k);
            let tau = random_siegel_from(g, &mut rng, 0.5);
            let label = || format!("type {d}, sample {k}");

            match symplectic_data(&tau, d) {
                Ok(sd) => {
                    let v = random_vector(g, &mut rng);
                    let z = random_vector(g, &mut rng);
                    let m: Vec<i64> = (0..g).map(|_| rng.gen_range(-2..=2)).collect();
                    let n: Vec<i64> = (0..g).map(|_| rng.gen_range(-2..=2)).collect();
                    let lam = tau.lattice_point(d, &m, &n);
                    let scale = sd.h_form(&v, &lam).norm().max(1.0);
                    cocycle.record(check_cocycle_identity(&sd, &v, &lam, &z).map(|r| r / scale), label);
                    let w = random_vector(g, &mut rng);
                    reconstruction.record(Ok(sd.reconstruction_residual(&v, &w)), label);
                }
                Err(e) => cocycle.record(Err(e), label),
            }

            let ch = Characteristic::from_index(
                &crate::group::ThetaGroup::new(d).expect("fixture group").subgroup_2k1()[0],
                d,
            );
            let z: Vec<Complex64> = random_vector(g, &mut rng).iter().cloned().collect();
            let m: Vec<i64> = (0..g).map(|_| rng.gen_range(-1..=1)).collect();
            let n: Vec<i64> = (0..g).map(|_| rng.gen_range(-2..=2)).collect();
            quasi.record(quasiperiodicity_residual(&ch, &m, &n, &z, &tau, cfg.eps), label);

            let pair = mult_matrix_formula(d, &tau, cfg.eps).and_then(|mut f| {
                if cfg.sabotage {
                    let s = max_abs(&f.entries);
                    f.entries[(0, 0)] += Complex64::new(1e-6 * s, 0.0);
                }
                let n_samples = 3 * f.rows.len();
                let i = mult_matrix_interpolation(d, &tau, cfg.eps, n_samples, rng.gen())?;
                relative_difference(&f, &i)
            });
            oracle.record(pair, label);

            blocks.record(
                crate::multmap::block_structure_check(d, &tau, cfg.eps)
                    .map(|s| if s.scale > 0.0 { s.off_block / s.scale } else { 0.0 }),
                label,
            );

            if d.s() > 0 && k < 2 {
                pullback.record(pullback_invariance_check(d, &tau, cfg.eps), label);
            }
        }
    }
    VerifyReport {
        schema_version: SCHEMA_VERSION,
        checks: vec![
            cocycle.finish(),
            reconstruction.finish(),
            quasi.finish(),
            oracle.finish(),
            blocks.finish(),
            pullback.finish(),
        ],
    }
}
