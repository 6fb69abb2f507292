use nalgebra::DVector;
use num_complex::Complex64;
use proptest::prelude::*;

use thetamult::av::{check_cocycle_identity, symplectic_data, PeriodMatrix, PolarizationType};
use thetamult::experiments::{quasiperiodicity_residual, random_siegel};
use thetamult::group::ThetaGroup;
use thetamult::linalg::{max_abs, numerical_rank, singular_values, CMatrix};
use thetamult::multmap::{
    full_mult_matrix_formula, injectivity_report, mult_matrix_formula, DEFAULT_RANK_TOL,
};
use thetamult::theta::{theta, Characteristic, ThetaConstantCache};
use thetamult::Verdict;

fn pt(d: &[u32]) -> PolarizationType {
    PolarizationType::new(d.to_vec()).unwrap()
}

fn types() -> impl Strategy<Value = PolarizationType> {
    prop::sample::select(vec![
        vec![1u32],
        vec![2],
        vec![3],
        vec![1, 1],
        vec![1, 2],
        vec![2, 2],
        vec![1, 3],
        vec![2, 4],
    ])
    .prop_map(|d| PolarizationType::new(d).unwrap())
}

fn cvec(vals: &[(f64, f64)]) -> Vec<Complex64> {
    vals.iter().map(|&(a, b)| Complex64::new(a, b)).collect()
}

fn pairs(g: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), g)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cocycle_and_hermitian_form(
        d in types(),
        seed in any::<u64>(),
        v in pairs(2),
        z in pairs(2),
        w in pairs(2),
        m in prop::collection::vec(-3i64..=3, 2),
        n in prop::collection::vec(-3i64..=3, 2),
    ) {
        let g = d.g();
        let tau = random_siegel(g, seed, 1.0);
        let sd = symplectic_data(&tau, &d).unwrap();
        let v = DVector::from_vec(cvec(&v[..g]));
        let z = DVector::from_vec(cvec(&z[..g]));
        let w = DVector::from_vec(cvec(&w[..g]));
        let lam = tau.lattice_point(&d, &m[..g], &n[..g]);
        let scale = sd.h_form(&v, &lam).norm().max(1.0);
        prop_assert!(check_cocycle_identity(&sd, &v, &lam, &z).unwrap() < 1e-10 * scale);
        prop_assert!(sd.reconstruction_residual(&v, &w) < 1e-12 * (1.0 + v.norm() * w.norm()));
        // E is integral on the lattice.
        let lam2 = tau.lattice_point(&d, &n[..g], &m[..g]);
        let e = sd.e(&lam, &lam2);
        prop_assert!((e - e.round()).abs() < 1e-9 * e.abs().max(1.0));
    }

    #[test]
    fn quasi_periodicity(
        d in types(),
        seed in any::<u64>(),
        z in pairs(2),
        m in prop::collection::vec(-1i64..=1, 2),
        n in prop::collection::vec(-3i64..=3, 2),
        k in 0usize..64,
    ) {
        let g = d.g();
        let tau = random_siegel(g, seed, 1.0);
        let grp = ThetaGroup::new(&d).unwrap();
        let k1 = grp.enumerate_k1();
        let ch = Characteristic::from_index(&k1[k % k1.len()], &d);
        let r = quasiperiodicity_residual(&ch, &m[..g], &n[..g], &cvec(&z[..g]), &tau, 1e-14).unwrap();
        prop_assert!(r < 1e-9, "{r}");
    }

    #[test]
    fn parity(seed in any::<u64>(), z in pairs(2), a in 0i64..4, b in 0i64..4) {
        let tau = random_siegel(2, seed, 1.0);
        let half = |x: i64| num_rational::Rational64::new(x, 2);
        let ch = Characteristic::new(vec![half(a % 2), half(a / 2)], vec![half(b % 2), half(b / 2)]);
        let z = cvec(&z);
        let mz: Vec<Complex64> = z.iter().map(|c| -c).collect();
        let p = theta(&ch, &z, &tau, 1e-14).unwrap().value;
        let q = theta(&ch, &mz, &tau, 1e-14).unwrap().value;
        let sign = if ch.is_even() { 1.0 } else { -1.0 };
        prop_assert!((p - sign * q).norm() < 1e-12 * p.norm().max(1.0));
    }

    #[test]
    fn theta_factorizes_on_diagonal_tau(
        t1 in (-0.5f64..0.5, 0.6f64..2.0),
        t2 in (-0.5f64..0.5, 0.6f64..2.0),
        z in pairs(2),
        a in (0i64..4, 0i64..4),
    ) {
        let t1 = Complex64::new(t1.0, t1.1);
        let t2 = Complex64::new(t2.0, t2.1);
        let tau = PeriodMatrix::diagonal(&[t1, t2]).unwrap();
        let q = |x: i64| num_rational::Rational64::new(x, 4);
        let z = cvec(&z);
        let full = theta(&Characteristic::new(vec![q(a.0), q(a.1)], vec![q(0), q(0)]), &z, &tau, 1e-14).unwrap();
        let f1 = theta(&Characteristic::new(vec![q(a.0)], vec![q(0)]), &z[..1], &PeriodMatrix::diagonal(&[t1]).unwrap(), 1e-14).unwrap();
        let f2 = theta(&Characteristic::new(vec![q(a.1)], vec![q(0)]), &z[1..], &PeriodMatrix::diagonal(&[t2]).unwrap(), 1e-14).unwrap();
        let prod = f1.value * f2.value;
        prop_assert!((full.value - prod).norm() < 1e-12 * prod.norm().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rescaling_preserves_verdict(seed in any::<u64>(), scales in prop::collection::vec((0.1f64..10.0, 0.0f64..6.3), 20)) {
        let d = pt(&[1, 2]);
        let tau = random_siegel(2, seed, 1.0);
        let m = mult_matrix_formula(&d, &tau, 1e-12).unwrap();
        let (r, c) = m.entries.shape();
        let base = singular_values(&m.entries);
        let rank = numerical_rank(&base, DEFAULT_RANK_TOL, base[0]);
        // Rescaling a basis section of L^2 scales a row; rescaling a source
        // monomial scales a column.
        let mut scaled = m.entries.clone();
        for i in 0..r {
            let (s, ph) = scales[i % scales.len()];
            scaled.row_mut(i).scale_mut(s);
            scaled.row_mut(i).iter_mut().for_each(|x| *x *= Complex64::from_polar(1.0, ph));
        }
        for j in 0..c {
            let (s, _) = scales[(j + 7) % scales.len()];
            scaled.column_mut(j).scale_mut(s);
        }
        let sv = singular_values(&scaled);
        prop_assert_eq!(numerical_rank(&sv, DEFAULT_RANK_TOL, sv[0]), rank);
    }

    #[test]
    fn ordered_pair_columns_agree(seed in any::<u64>(), d in prop::sample::select(vec![vec![2u32], vec![1, 2], vec![2, 2], vec![1, 3]])) {
        let d = PolarizationType::new(d).unwrap();
        let tau = random_siegel(d.g(), seed, 1.0);
        let full = full_mult_matrix_formula(&d, &tau, 1e-12, &ThetaConstantCache::new()).unwrap();
        let h = d.h0() as usize;
        for i in 0..h {
            for j in 0..h {
                let diff = full.entries.column(i * h + j) - full.entries.column(j * h + i);
                prop_assert!(diff.iter().all(|x| x.norm() < 1e-14 * max_abs(&full.entries)));
            }
        }
    }
}

#[test]
fn tightening_eps_keeps_confident_verdicts() {
    for (k, d) in [pt(&[2]), pt(&[1, 2]), pt(&[2, 2]), pt(&[1, 1, 2])].iter().enumerate() {
        for s in 0..4u64 {
            let tau = random_siegel(d.g(), 100 * k as u64 + s, 1.0);
            let coarse = injectivity_report(d, &tau, 1e-9, DEFAULT_RANK_TOL).unwrap();
            if coarse.injective() && coarse.block_margin > 10.0 * DEFAULT_RANK_TOL {
                let fine = injectivity_report(d, &tau, 1e-10, DEFAULT_RANK_TOL).unwrap();
                assert!(fine.injective(), "{d} sample {s}");
            }
        }
    }
}

#[test]
fn diagonal_tau_gives_tensor_product_matrix() {
    let t1 = Complex64::new(0.2, 1.1);
    let t2 = Complex64::new(-0.3, 0.9);
    let tau = PeriodMatrix::diagonal(&[t1, t2]).unwrap();
    let d = pt(&[2, 2]);
    let full = full_mult_matrix_formula(&d, &tau, 1e-14, &ThetaConstantCache::new()).unwrap();
    let f1 = full_mult_matrix_formula(&pt(&[2]), &PeriodMatrix::diagonal(&[t1]).unwrap(), 1e-14, &ThetaConstantCache::new()).unwrap();
    let f2 = full_mult_matrix_formula(&pt(&[2]), &PeriodMatrix::diagonal(&[t2]).unwrap(), 1e-14, &ThetaConstantCache::new()).unwrap();
    // Rows of the product are indexed by (r1, r2), columns by ((a1, a2), (b1, b2)).
    let pos = |xs: &[thetamult::group::GroupElement], c: i64| xs.iter().position(|x| x.coords()[0] == c).unwrap();
    let mut worst: f64 = 0.0;
    for (r, row) in full.rows.iter().enumerate() {
        for (c, (a, b)) in full.cols.iter().enumerate() {
            let r1 = pos(&f1.rows, row.coords()[0]);
            let r2 = pos(&f2.rows, row.coords()[1]);
            let c1 = f1.cols.iter().position(|(x, y)| x.coords()[0] == a.coords()[0] && y.coords()[0] == b.coords()[0]).unwrap();
            let c2 = f2.cols.iter().position(|(x, y)| x.coords()[0] == a.coords()[1] && y.coords()[0] == b.coords()[1]).unwrap();
            let want = f1.entries[(r1, c1)] * f2.entries[(r2, c2)];
            worst = worst.max((full.entries[(r, c)] - want).norm());
        }
    }
    assert!(worst < 1e-13, "{worst}");
}

#[test]
fn product_of_elliptic_curves_has_segre_kernel() {
    // On E1 x E2, theta_{(a,b)}(z) = theta_a(z1) theta_b(z2), so
    // theta_00 theta_22 - theta_02 theta_20 vanishes identically.
    let tau = PeriodMatrix::identity_imag(2);
    let d = pt(&[2, 2]);
    let r = injectivity_report(&d, &tau, 1e-13, DEFAULT_RANK_TOL).unwrap();
    assert_eq!(r.block_verdict, Verdict::Deficient);
    assert_eq!(r.direct_verdict, Verdict::Deficient);
    assert_eq!(r.direct_rank, r.sym2_dim - 1);
    let dead: Vec<_> = r.blocks.iter().filter(|b| b.verdict == Verdict::Deficient).collect();
    assert_eq!(dead.len(), 1);
    assert_eq!(dead[0].y.coords(), &[1, 1]);
    assert_eq!(dead[0].rho.signs, vec![-1, -1]);

    let kernel = thetamult::multmap::kernel_basis(&d, &tau, 1e-13, DEFAULT_RANK_TOL).unwrap();
    assert_eq!(kernel.len(), 1);
    let v = &kernel[0];
    let at = |a: [i64; 2], b: [i64; 2]| {
        v.pairs
            .iter()
            .position(|(x, y)| x.coords() == a && y.coords() == b)
            .map(|k| v.coeffs[k])
            .unwrap()
    };
    let p = at([0, 0], [2, 2]);
    let q = at([0, 2], [2, 0]);
    assert!((p + q).norm() < 1e-8 && (p.norm() - 0.5f64.sqrt()).abs() < 1e-8);

    // Generic period matrices of the same type are injective.
    let generic = injectivity_report(&d, &random_siegel(2, 11, 1.0), 1e-13, DEFAULT_RANK_TOL).unwrap();
    assert!(generic.injective());
    let f = thetamult::multmap::factorization_residual(&d, &tau, 1e-13).unwrap();
    assert!(f < 1e-9);
}

#[test]
fn kernel_vectors_are_annihilated() {
    // D = (1, 3) has h = 3, Sym^2 of dimension 6 inside a 24-dimensional
    // target; force a deficiency by truncating rows instead.
    let d = pt(&[1, 3]);
    let tau = random_siegel(2, 5, 1.0);
    let m = mult_matrix_formula(&d, &tau, 1e-12).unwrap();
    let truncated: CMatrix = m.entries.rows(0, 4).into_owned();
    let ns = thetamult::multmap::numerical_kernel(&truncated, DEFAULT_RANK_TOL).unwrap();
    assert!(ns.ncols() >= 2);
    let sv = singular_values(&truncated);
    assert!(max_abs(&(&truncated * &ns)) <= DEFAULT_RANK_TOL * sv[0]);
}
