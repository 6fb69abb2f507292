//! The multiplication map `mu: Sym^2 H^0(L) -> H^0(L^2)`.
//!
//! Two independent assemblies of the matrix of `mu` (rows: the `L^2` basis
//! indexed by `K1`; columns: unordered pairs `{x1, x2}` of `2K1`):
//!
//! * [`mult_matrix_formula`] uses the theta-constant product formula
//!   `theta_{x1} theta_{x2} = sum_{z in Z2} kappa(y2 + z) Theta_{y1 + z}` with
//!   `y1 = halve(x1 + x2)`, `y2 = y1 - x2` and `kappa(k) = theta[(2D)^{-1}k; 0](0, 2tau)`;
//! * [`mult_matrix_interpolation`] samples both sides at random points and
//!   solves a least-squares problem.
//!
//! [`character_blocks`] splits `mu` into blocks indexed by `y in U` and
//! characters `rho` of `Z2'`; block `(y, rho)` has rows `t in (y + 2K1)/Z2'`
//! modulo `t ~ -t` and columns `w in W`, with entries
//! `C(t, w, rho) = sum_{z in Z2'} rho(z) kappa(t + w + z)`.
//! A row whose class is fixed by `t -> -t` with `rho(-2t) = -1` carries an
//! antisymmetric tensor and is absent from `Sym^2`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::av::{PeriodMatrix, PolarizationType};
use crate::error::{Error, Result, Verdict};
use crate::group::{Character, GroupElement, ThetaGroup};
use crate::linalg::{
    column_space, czero, least_squares, max_abs, null_space, numerical_rank, singular_values,
    subspace_residual, CMatrix,
};
use crate::sections::{basis_l, basis_l2, evaluation_matrix, normalization, sample_points};
use crate::theta::{Characteristic, ThetaConstantCache};

pub const DEFAULT_RANK_TOL: f64 = 1e-8;
pub const INTERPOLATION_MAX_CONDITION: f64 = 1e8;
pub const INTERPOLATION_MAX_RESIDUAL: f64 = 1e-6;
pub const BLOCK_LEAK_TOL: f64 = 1e-8;
pub const SPAN_TOL: f64 = 1e-8;

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// Level-two theta constants `kappa(k) = theta[(2D)^{-1} k; 0](0, 2 tau)` for all `k in K1`.
#[derive(Debug, Clone)]
pub struct ThetaConstants {
    group: ThetaGroup,
    k1: Vec<GroupElement>,
    values: Vec<Complex64>,
}

impl ThetaConstants {
    pub fn compute(d: &PolarizationType, tau: &PeriodMatrix, eps: f64, cache: &ThetaConstantCache) -> Result<Self> {
        if d.g() != tau.g() {
            return Err(Error::DimensionMismatch(format!(
                "polarization type has g = {}, period matrix has g = {}",
                d.g(),
                tau.g()
            )));
        }
        if tau.is_near_degenerate() {
            return Err(Error::NearDegenerate(format!(
                "lambda_min(Im tau) = {:e}",
                tau.lambda_min()
            )));
        }
        let group = ThetaGroup::new(d)?;
        let k1 = group.enumerate_k1();
        let tau2 = tau.scaled(2.0);
        let values = k1
            .par_iter()
            .map(|k| {
                cache
                    .get_or_compute(&Characteristic::from_index(k, d), &tau2, eps)
                    .map(|v| v.value)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { group, k1, values })
    }

    pub fn group(&self) -> &ThetaGroup {
        &self.group
    }

    pub fn get(&self, k: &GroupElement) -> Complex64 {
        let i = self.k1.binary_search(k).expect("index lies in K1");
        self.values[i]
    }

    /// `C(t, w, rho) = sum_{z in Z2'} rho(z) kappa(t + w + z)`.
    pub fn coefficient(&self, t: &GroupElement, w: &GroupElement, rho: &Character) -> Complex64 {
        let g = &self.group;
        let tw = g.add(t, w);
        g.subgroup_z2prime()
            .iter()
            .map(|z| self.get(&g.add(&tw, z)) * g.character_value(rho, z) as f64)
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Formula,
    Interpolation,
}

/// Matrix of `mu` restricted to `Sym^2`.
#[derive(Debug, Clone)]
pub struct MultMatrix {
    pub d: PolarizationType,
    /// `L^2` basis indices, lexicographic.
    pub rows: Vec<GroupElement>,
    /// Unordered pairs `x1 <= x2` of `2K1`, lexicographic.
    pub cols: Vec<(GroupElement, GroupElement)>,
    pub entries: CMatrix,
    pub provenance: Provenance,
    /// Relative least-squares residual (interpolation only).
    pub residual: Option<f64>,
}

/// Matrix of `mu` on all ordered pairs, and the selection map onto `Sym^2`.
#[derive(Debug, Clone)]
pub struct FullMultMatrix {
    pub rows: Vec<GroupElement>,
    /// Ordered pairs `(x1, x2)`, `x1`-major.
    pub cols: Vec<(GroupElement, GroupElement)>,
    pub entries: CMatrix,
    /// `h^2 x h(h+1)/2` 0/1 matrix picking the column `(x1, x2)`, `x1 <= x2`.
    pub sym2_restriction: CMatrix,
    pub sym2_cols: Vec<(GroupElement, GroupElement)>,
}

impl FullMultMatrix {
    pub fn restrict(&self, d: &PolarizationType) -> MultMatrix {
        MultMatrix {
            d: d.clone(),
            rows: self.rows.clone(),
            cols: self.sym2_cols.clone(),
            entries: &self.entries * &self.sym2_restriction,
            provenance: Provenance::Formula,
            residual: None,
        }
    }
}

fn unordered_pairs(xs: &[GroupElement]) -> Vec<(GroupElement, GroupElement)> {
    let mut out = Vec::with_capacity(xs.len() * (xs.len() + 1) / 2);
    for i in 0..xs.len() {
        for j in i..xs.len() {
            out.push((xs[i].clone(), xs[j].clone()));
        }
    }
    out
}

fn position_map(xs: &[GroupElement]) -> BTreeMap<GroupElement, usize> {
    xs.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect()
}

/// Column of `mu(theta_{x1} (x) theta_{x2})` in the `L^2` basis.
fn formula_column(
    kappa: &ThetaConstants,
    row_pos: &BTreeMap<GroupElement, usize>,
    x1: &GroupElement,
    x2: &GroupElement,
    y1: &GroupElement,
) -> Vec<Complex64> {
    let g = kappa.group();
    let y2 = g.sub(y1, x2);
    let mut col = vec![czero(); row_pos.len()];
    debug_assert_eq!(g.add(y1, &y2), *x1);
    for z in g.subgroup_z2() {
        col[row_pos[&g.add(y1, &z)]] += kappa.get(&g.add(&y2, &z));
    }
    col
}

pub fn full_mult_matrix_formula(
    d: &PolarizationType,
    tau: &PeriodMatrix,
    eps: f64,
    cache: &ThetaConstantCache,
) -> Result<FullMultMatrix> {
    let kappa = ThetaConstants::compute(d, tau, eps, cache)?;
    let g = kappa.group();
    let rows = g.enumerate_k1();
    let row_pos = position_map(&rows);
    let xs = g.subgroup_2k1();
    let h = xs.len();
    let mut cols = Vec::with_capacity(h * h);
    for x1 in &xs {
        for x2 in &xs {
            cols.push((x1.clone(), x2.clone()));
        }
    }
    let columns: Vec<Vec<Complex64>> = cols
        .par_iter()
        .map(|(x1, x2)| {
            let y1 = g.halve(&g.add(x1, x2)).expect("sum of elements of 2K1 is even");
            formula_column(&kappa, &row_pos, x1, x2, &y1)
        })
        .collect();
    let entries = CMatrix::from_fn(rows.len(), cols.len(), |r, c| columns[c][r]);
    let sym2_cols = unordered_pairs(&xs);
    let mut sym2_restriction = CMatrix::zeros(h * h, sym2_cols.len());
    for (k, (a, b)) in sym2_cols.iter().enumerate() {
        let (i, j) = (row_of(&xs, a), row_of(&xs, b));
        sym2_restriction[(i * h + j, k)] = one();
    }
    Ok(FullMultMatrix {
        rows,
        cols,
        entries,
        sym2_restriction,
        sym2_cols,
    })
}

fn row_of(xs: &[GroupElement], x: &GroupElement) -> usize {
    xs.binary_search(x).expect("element present")
}

pub fn mult_matrix_formula(d: &PolarizationType, tau: &PeriodMatrix, eps: f64) -> Result<MultMatrix> {
    mult_matrix_formula_cached(d, tau, eps, &ThetaConstantCache::new())
}

pub fn mult_matrix_formula_cached(
    d: &PolarizationType,
    tau: &PeriodMatrix,
    eps: f64,
    cache: &ThetaConstantCache,
) -> Result<MultMatrix> {
    Ok(full_mult_matrix_formula(d, tau, eps, cache)?.restrict(d))
}

/// Least-squares reconstruction of `mu` from point evaluations.
pub fn mult_matrix_interpolation(
    d: &PolarizationType,
    tau: &PeriodMatrix,
    eps: f64,
    n_samples: usize,
    seed: u64,
) -> Result<MultMatrix> {
    let bl = basis_l(d, tau)?;
    let bl2 = basis_l2(d, tau)?;
    if n_samples < 2 * bl2.len() {
        return Err(Error::Precondition(format!(
            "interpolation needs at least {} samples, got {n_samples}",
            2 * bl2.len()
        )));
    }
    let points = sample_points(tau, d, n_samples, seed);
    let targets = evaluation_matrix(&bl2, &points, eps)?;
    let xs: Vec<GroupElement> = bl.entries.iter().map(|e| e.index.clone()).collect();
    let cols = unordered_pairs(&xs);
    let h = xs.len();
    let products: Vec<Vec<Complex64>> = points
        .par_iter()
        .map(|z| {
            let w = normalization(tau, z, 2);
            bl.eval_all(z, eps).map(|v| {
                let mut row = Vec::with_capacity(h * (h + 1) / 2);
                for i in 0..h {
                    for j in i..h {
                        row.push(v[i] * v[j] * w);
                    }
                }
                row
            })
        })
        .collect::<Result<_>>()?;
    let rhs = CMatrix::from_fn(n_samples, cols.len(), |r, c| products[r][c]);
    let (solution, cond) = least_squares(&targets, &rhs);
    if cond > INTERPOLATION_MAX_CONDITION {
        return Err(Error::IllConditioned(cond));
    }
    let scale = max_abs(&rhs).max(f64::MIN_POSITIVE);
    let residual = max_abs(&(&targets * &solution - &rhs)) / scale;
    if residual > INTERPOLATION_MAX_RESIDUAL {
        return Err(Error::ResidualTooLarge {
            residual,
            limit: INTERPOLATION_MAX_RESIDUAL,
        });
    }
    Ok(MultMatrix {
        d: d.clone(),
        rows: bl2.entries.iter().map(|e| e.index.clone()).collect(),
        cols,
        entries: solution,
        provenance: Provenance::Interpolation,
        residual: Some(residual),
    })
}

/// `max |a - b| / max |a|` over matching entries.
pub fn relative_difference(a: &MultMatrix, b: &MultMatrix) -> Result<f64> {
    if a.rows != b.rows || a.cols != b.cols {
        return Err(Error::DimensionMismatch("matrices index different bases".into()));
    }
    let scale = max_abs(&a.entries).max(max_abs(&b.entries));
    Ok(max_abs(&(&a.entries - &b.entries)) / scale.max(f64::MIN_POSITIVE))
}

/// One `(y, rho)` block of the multiplication map.
#[derive(Debug, Clone, Serialize)]
pub struct BlockReport {
    pub y: GroupElement,
    pub rho: Character,
    /// Representatives `t` of the surviving row classes.
    pub rows: Vec<GroupElement>,
    /// Row classes fixed by `t -> -t` whose symmetrization vanishes.
    pub antisymmetric_rows: Vec<GroupElement>,
    pub cols: Vec<GroupElement>,
    #[serde(skip)]
    pub matrix: CMatrix,
    pub singular_values: Vec<f64>,
    pub rank: usize,
    /// `sigma_r / scale` with `r` the row count; `scale` is the largest
    /// singular value over all blocks.
    pub margin: f64,
    pub verdict: Verdict,
}

impl BlockReport {
    pub fn shape(&self) -> (usize, usize) {
        (self.rows.len(), self.cols.len())
    }
}

/// Row classes of block `(y, rho)`: `(surviving, antisymmetric)`.
fn block_rows(g: &ThetaGroup, y: &GroupElement, rho: &Character) -> (Vec<GroupElement>, Vec<GroupElement>) {
    let mut reps: Vec<GroupElement> = g
        .subgroup_2k1()
        .iter()
        .map(|s| {
            let t = g.z2prime_rep(&g.add(y, s));
            let mt = g.z2prime_rep(&g.neg(&t));
            t.min(mt)
        })
        .collect();
    reps.sort();
    reps.dedup();
    let mut keep = Vec::new();
    let mut drop = Vec::new();
    for t in reps {
        let mt = g.neg(&t);
        if g.z2prime_rep(&mt) == t {
            let z0 = g.sub(&mt, &t);
            if g.character_value(rho, &z0) == -1 {
                drop.push(t);
                continue;
            }
        }
        keep.push(t);
    }
    (keep, drop)
}

pub fn character_blocks(d: &PolarizationType, tau: &PeriodMatrix, eps: f64, rank_tol: f64) -> Result<Vec<BlockReport>> {
    let kappa = ThetaConstants::compute(d, tau, eps, &ThetaConstantCache::new())?;
    character_blocks_from(&kappa, rank_tol)
}

pub fn character_blocks_from(kappa: &ThetaConstants, rank_tol: f64) -> Result<Vec<BlockReport>> {
    if !(rank_tol > 0.0) {
        return Err(Error::InvalidTolerance(rank_tol));
    }
    let g = kappa.group();
    let ws = g.complement_w();
    let mut blocks = Vec::new();
    for y in g.transversal_u() {
        for rho in g.characters_of_z2prime() {
            let (rows, antisymmetric_rows) = block_rows(g, &y, &rho);
            let matrix = CMatrix::from_fn(rows.len(), ws.len(), |r, c| kappa.coefficient(&rows[r], &ws[c], &rho));
            let singular_values = singular_values(&matrix);
            blocks.push(BlockReport {
                y: y.clone(),
                rho,
                rows,
                antisymmetric_rows,
                cols: ws.clone(),
                matrix,
                singular_values,
                rank: 0,
                margin: 0.0,
                verdict: Verdict::Deficient,
            });
        }
    }
    let scale = blocks
        .iter()
        .filter_map(|b| b.singular_values.first().cloned())
        .fold(0.0, f64::max);
    for b in &mut blocks {
        b.rank = numerical_rank(&b.singular_values, rank_tol, scale);
        let need = b.rows.len();
        b.margin = if need == 0 {
            1.0
        } else if need > b.cols.len() || scale == 0.0 {
            0.0
        } else {
            b.singular_values[need - 1] / scale
        };
        b.verdict = if b.rank == need {
            Verdict::FullRank
        } else {
            Verdict::Deficient
        };
    }
    Ok(blocks)
}

/// Source (symmetrized tensors) and target (rho-isotypic combinations) bases
/// adapted to the block decomposition.
#[derive(Debug, Clone)]
pub struct BlockBases {
    /// Columns: `theta_{(y+t, y-t), rho}` in the monomial `Sym^2` basis.
    pub source: CMatrix,
    /// `(y, rho, t)` for each source column.
    pub source_keys: Vec<(GroupElement, Character, GroupElement)>,
    /// Columns: `sum_{z in Z2'} rho(z) Theta_{y + w + z}` in the `L^2` basis.
    pub target: CMatrix,
    /// `(y, rho, w)` for each target column.
    pub target_keys: Vec<(GroupElement, Character, GroupElement)>,
}

pub fn block_bases(group: &ThetaGroup) -> BlockBases {
    let g = group;
    let xs = g.subgroup_2k1();
    let pairs = unordered_pairs(&xs);
    let pair_pos: BTreeMap<(GroupElement, GroupElement), usize> =
        pairs.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    let k1 = g.enumerate_k1();
    let row_pos = position_map(&k1);
    let z2p = g.subgroup_z2prime();
    let ws = g.complement_w();

    let mut source_cols: Vec<Vec<Complex64>> = Vec::new();
    let mut source_keys = Vec::new();
    let mut target_cols: Vec<Vec<Complex64>> = Vec::new();
    let mut target_keys = Vec::new();
    for y in g.transversal_u() {
        for rho in g.characters_of_z2prime() {
            let (rows, _) = block_rows(g, &y, &rho);
            for t in rows {
                let mut col = vec![czero(); pairs.len()];
                for z in &z2p {
                    let a = g.add(&g.add(&y, &t), z);
                    let b = g.add(&g.sub(&y, &t), z);
                    let key = if a <= b { (a, b) } else { (b, a) };
                    col[pair_pos[&key]] += g.character_value(&rho, z) as f64;
                }
                source_cols.push(col);
                source_keys.push((y.clone(), rho.clone(), t));
            }
            for w in &ws {
                let mut col = vec![czero(); k1.len()];
                let yw = g.add(&y, w);
                for z in &z2p {
                    col[row_pos[&g.add(&yw, z)]] += g.character_value(&rho, z) as f64;
                }
                target_cols.push(col);
                target_keys.push((y.clone(), rho.clone(), w.clone()));
            }
        }
    }
    BlockBases {
        source: CMatrix::from_fn(pairs.len(), source_cols.len(), |r, c| source_cols[c][r]),
        source_keys,
        target: CMatrix::from_fn(k1.len(), target_cols.len(), |r, c| target_cols[c][r]),
        target_keys,
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BlockStructure {
    /// Largest entry coupling different `(y, rho)` blocks.
    pub off_block: f64,
    /// Largest deviation of in-block entries from `C(t, w, rho)`.
    pub in_block: f64,
    /// Largest entry of the transformed matrix.
    pub scale: f64,
}

/// Conjugates the formula matrix into the block bases and measures leakage
/// between blocks.
pub fn block_structure_check(d: &PolarizationType, tau: &PeriodMatrix, eps: f64) -> Result<BlockStructure> {
    let cache = ThetaConstantCache::new();
    let kappa = ThetaConstants::compute(d, tau, eps, &cache)?;
    let m = mult_matrix_formula_cached(d, tau, eps, &cache)?;
    block_structure_from(&kappa, &m)
}

pub fn block_structure_from(kappa: &ThetaConstants, m: &MultMatrix) -> Result<BlockStructure> {
    let g = kappa.group();
    let bases = block_bases(g);
    if bases.source.ncols() != bases.source.nrows() || bases.target.ncols() != bases.target.nrows() {
        return Err(Error::Precondition(format!(
            "block bases are not square: source {:?}, target {:?}",
            bases.source.shape(),
            bases.target.shape()
        )));
    }
    let image = &m.entries * &bases.source;
    let transformed = bases
        .target
        .clone()
        .lu()
        .solve(&image)
        .ok_or_else(|| Error::Precondition("target block basis is singular".into()))?;
    let scale = max_abs(&transformed);
    let mut off_block: f64 = 0.0;
    let mut in_block: f64 = 0.0;
    for (c, (ys, rs, t)) in bases.source_keys.iter().enumerate() {
        for (r, (yt, rt, w)) in bases.target_keys.iter().enumerate() {
            let v = transformed[(r, c)];
            if ys == yt && rs == rt {
                in_block = in_block.max((v - kappa.coefficient(t, w, rs)).norm());
            } else {
                off_block = off_block.max(v.norm());
            }
        }
    }
    let limit = BLOCK_LEAK_TOL * scale;
    if off_block > limit {
        return Err(Error::BlockLeak {
            residual: off_block,
            limit,
        });
    }
    Ok(BlockStructure {
        off_block,
        in_block,
        scale,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct InjectivityReport {
    pub d: Vec<u32>,
    pub block_verdict: Verdict,
    pub block_margin: f64,
    pub direct_verdict: Verdict,
    pub direct_margin: f64,
    pub direct_rank: usize,
    pub sym2_dim: usize,
    pub rank_tol: f64,
    pub blocks: Vec<BlockReport>,
}

impl InjectivityReport {
    pub fn agree(&self) -> bool {
        self.block_verdict == self.direct_verdict
    }

    pub fn injective(&self) -> bool {
        self.agree() && self.block_verdict == Verdict::FullRank
    }

    pub fn block_shapes(&self) -> Vec<(usize, usize)> {
        self.blocks.iter().map(|b| b.shape()).collect()
    }
}

/// Both injectivity routes, without treating disagreement as an error.
pub fn injectivity_diagnostics(
    d: &PolarizationType,
    tau: &PeriodMatrix,
    eps: f64,
    rank_tol: f64,
    cache: &ThetaConstantCache,
) -> Result<(InjectivityReport, MultMatrix, ThetaConstants)> {
    if !(rank_tol > 0.0) {
        return Err(Error::InvalidTolerance(rank_tol));
    }
    let kappa = ThetaConstants::compute(d, tau, eps, cache)?;
    let m = mult_matrix_formula_cached(d, tau, eps, cache)?;
    let blocks = character_blocks_from(&kappa, rank_tol)?;
    let sym2_dim = m.cols.len();
    let row_total: usize = blocks.iter().map(|b| b.rows.len()).sum();
    if row_total != sym2_dim {
        return Err(Error::Precondition(format!(
            "block rows {row_total} do not add up to dim Sym^2 = {sym2_dim}"
        )));
    }
    let block_verdict = if blocks.iter().all(|b| b.verdict == Verdict::FullRank) {
        Verdict::FullRank
    } else {
        Verdict::Deficient
    };
    let block_margin = blocks.iter().map(|b| b.margin).fold(1.0, f64::min);
    let sv = singular_values(&m.entries);
    let smax = sv.first().cloned().unwrap_or(0.0);
    let direct_rank = numerical_rank(&sv, rank_tol, smax);
    let direct_verdict = if direct_rank == sym2_dim {
        Verdict::FullRank
    } else {
        Verdict::Deficient
    };
    let direct_margin = if sym2_dim > sv.len() || smax == 0.0 {
        0.0
    } else {
        sv[sym2_dim - 1] / smax
    };
    Ok((
        InjectivityReport {
            d: d.divisors().to_vec(),
            block_verdict,
            block_margin,
            direct_verdict,
            direct_margin,
            direct_rank,
            sym2_dim,
            rank_tol,
            blocks,
        },
        m,
        kappa,
    ))
}

/// Injectivity verdict from the block criterion and from the SVD of the full
/// `Sym^2` matrix; disagreement is reported as [`Error::VerdictMismatch`].
pub fn injectivity_report(d: &PolarizationType, tau: &PeriodMatrix, eps: f64, rank_tol: f64) -> Result<InjectivityReport> {
    let (report, _, _) = injectivity_diagnostics(d, tau, eps, rank_tol, &ThetaConstantCache::new())?;
    if !report.agree() {
        return Err(Error::VerdictMismatch {
            block: report.block_verdict,
            direct: report.direct_verdict,
        });
    }
    Ok(report)
}

/// An element of `Sym^2 H^0(L)` in the monomial basis.
#[derive(Debug, Clone, Serialize)]
pub struct Sym2Vector {
    pub pairs: Vec<(GroupElement, GroupElement)>,
    #[serde(skip)]
    pub coeffs: Vec<Complex64>,
}

/// Orthonormal basis of the numerical kernel: right singular vectors with
/// singular value at most `rank_tol * sigma_max`.
pub fn numerical_kernel(matrix: &CMatrix, rank_tol: f64) -> Result<CMatrix> {
    let ns = null_space(matrix, rank_tol);
    if ns.ncols() == 0 {
        return Err(Error::EmptyKernel);
    }
    Ok(ns)
}

pub fn kernel_basis(d: &PolarizationType, tau: &PeriodMatrix, eps: f64, rank_tol: f64) -> Result<Vec<Sym2Vector>> {
    let m = mult_matrix_formula(d, tau, eps)?;
    let ns = numerical_kernel(&m.entries, rank_tol)?;
    Ok((0..ns.ncols())
        .map(|k| Sym2Vector {
            pairs: m.cols.clone(),
            coeffs: ns.column(k).iter().cloned().collect(),
        })
        .collect())
}

/// Compares the span of the type-`D` basis with the span of the sections of
/// the evenized type `D'` (odd `d_i` doubled) that are invariant under the
/// kernel `D Z^g / D' Z^g` of the isogeny `C^g/(tau Z^g + D' Z^g) -> C^g/(tau Z^g + D Z^g)`.
/// Returns the largest principal-angle sine.
pub fn pullback_invariance_check(d: &PolarizationType, tau: &PeriodMatrix, eps: f64) -> Result<f64> {
    if d.s() == 0 {
        return Err(Error::Precondition(format!("type {d} has no odd divisor")));
    }
    let g = d.g();
    let d_even = d.evenized();
    let small = basis_l(d, tau)?;
    let big = basis_l(&d_even, tau)?;
    let n = 4 * big.len() + 8;
    let points = sample_points(tau, &d_even, n, 0x5eed_0f15_0ce9);
    let f_small = evaluation_matrix(&small, &points, eps)?;
    let f_big = evaluation_matrix(&big, &points, eps)?;

    let generators: Vec<usize> = (0..g).filter(|&i| d.divisors()[i] % 2 == 1).collect();
    let mut invariance = CMatrix::zeros(n * generators.len(), big.len());
    for (k, &i) in generators.iter().enumerate() {
        let shifted: Vec<Vec<Complex64>> = points
            .iter()
            .map(|z| {
                let mut z = z.clone();
                z[i] += d.divisors()[i] as f64;
                z
            })
            .collect();
        // Translation by a real vector leaves the normalization unchanged.
        let f_shift = evaluation_matrix(&big, &shifted, eps)?;
        invariance
            .view_mut((k * n, 0), (n, big.len()))
            .copy_from(&(f_shift - &f_big));
    }
    let invariant = null_space(&invariance, SPAN_TOL);
    let q_small = column_space(&f_small, SPAN_TOL);
    let q_inv = column_space(&(&f_big * &invariant), SPAN_TOL);
    if q_small.ncols() != q_inv.ncols() {
        return Err(Error::SpanMismatch {
            residual: 1.0,
            left: q_small.ncols(),
            right: q_inv.ncols(),
        });
    }
    let residual = subspace_residual(&q_small, &q_inv).max(subspace_residual(&q_inv, &q_small));
    if residual > SPAN_TOL {
        return Err(Error::SpanMismatch {
            residual,
            left: q_small.ncols(),
            right: q_inv.ncols(),
        });
    }
    Ok(residual)
}

/// For diagonal `tau`, the largest relative deviation of `C(t, w, rho)` from
/// the product of the one-dimensional coefficients of each factor.
pub fn factorization_residual(d: &PolarizationType, tau: &PeriodMatrix, eps: f64) -> Result<f64> {
    if !tau.is_diagonal() {
        return Err(Error::Precondition("period matrix is not diagonal".into()));
    }
    let cache = ThetaConstantCache::new();
    let full = ThetaConstants::compute(d, tau, eps, &cache)?;
    let factors: Vec<ThetaConstants> = d
        .factors()
        .iter()
        .enumerate()
        .map(|(i, di)| ThetaConstants::compute(di, &tau.diagonal_factor(i)?, eps, &cache))
        .collect::<Result<_>>()?;
    let g = full.group();
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    let mut values = Vec::new();
    for t in g.enumerate_k1() {
        for w in g.complement_w() {
            for rho in g.characters_of_z2prime() {
                let c = full.coefficient(&t, &w, &rho);
                let mut sign_iter = rho.signs.iter();
                let mut prod = one();
                for (i, f) in factors.iter().enumerate() {
                    let fg = f.group();
                    let rho_i = Character {
                        signs: if d.divisors()[i] % 2 == 0 {
                            vec![*sign_iter.next().unwrap()]
                        } else {
                            vec![]
                        },
                    };
                    prod *= f.coefficient(
                        &fg.element(&[t.coords()[i]]),
                        &fg.element(&[w.coords()[i]]),
                        &rho_i,
                    );
                }
                scale = scale.max(c.norm());
                values.push((c, prod));
            }
        }
    }
    for (c, p) in values {
        worst = worst.max((c - p).norm());
    }
    Ok(worst / scale.max(f64::MIN_POSITIVE))
}

#[derive(Debug, Clone, Serialize)]
pub struct RowLegend {
    pub index: GroupElement,
    /// Characteristic `a = (2D)^{-1} index` of `theta[a; 0](2z, 2tau)`.
    pub characteristic: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ColLegend {
    pub pair: (GroupElement, GroupElement),
    /// Characteristics of `theta[a; 0](z, tau)` for both factors.
    pub characteristics: (Vec<String>, Vec<String>),
}

/// Serializable form of a [`MultMatrix`]: legends plus row-major `(re, im)` entries.
#[derive(Debug, Clone, Serialize)]
pub struct MatrixDump {
    pub d: Vec<u32>,
    pub provenance: Provenance,
    pub shape: (usize, usize),
    pub rows: Vec<RowLegend>,
    pub cols: Vec<ColLegend>,
    pub entries: Vec<Vec<(f64, f64)>>,
}

fn characteristic_strings(x: &GroupElement, d: &PolarizationType) -> Vec<String> {
    Characteristic::from_index(x, d).a.iter().map(|r| r.to_string()).collect()
}

impl MultMatrix {
    pub fn dump(&self) -> MatrixDump {
        MatrixDump {
            d: self.d.divisors().to_vec(),
            provenance: self.provenance,
            shape: self.entries.shape(),
            rows: self
                .rows
                .iter()
                .map(|x| RowLegend {
                    index: x.clone(),
                    characteristic: characteristic_strings(x, &self.d),
                })
                .collect(),
            cols: self
                .cols
                .iter()
                .map(|(a, b)| ColLegend {
                    pair: (a.clone(), b.clone()),
                    characteristics: (characteristic_strings(a, &self.d), characteristic_strings(b, &self.d)),
                })
                .collect(),
            entries: (0..self.entries.nrows())
                .map(|r| {
                    (0..self.entries.ncols())
                        .map(|c| (self.entries[(r, c)].re, self.entries[(r, c)].im))
                        .collect()
                })
                .collect(),
        }
    }
}
