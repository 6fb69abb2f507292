//! Finite-group bookkeeping for the theta group of `L^2`.
//!
//! `K1 = Z_{2d_1} + ... + Z_{2d_g}` is stored as integer vectors `c` with
//! `0 <= c_i < 2 d_i`; the element corresponds to the characteristic
//! `(2D)^{-1} c`. Inside it live
//!
//! * `2K1`: all coordinates even (the index set of `H^0(L)`),
//! * `Z2`: two-torsion, `c = D eps` with `eps in {0,1}^g`,
//! * `Z2'`: `Z2 ∩ 2K1`, i.e. `eps_i = 0` whenever `d_i` is odd,
//! * `W`: the coordinate complement of `Z2'` in `Z2` (`eps_i = 0` whenever `d_i` is even),
//! * `U`: the transversal of `Z2` with `0 <= c_i < d_i`.
//!
//! Every list is returned in lexicographic order.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::av::PolarizationType;
use crate::error::{Error, Result};

pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000;

/// An element of `K1`, stored by its canonical representative.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct GroupElement(Vec<i64>);

impl GroupElement {
    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn is_even(&self) -> bool {
        self.0.iter().all(|&x| x % 2 == 0)
    }
}

/// A character of `Z2' = (Z/2)^{g-s}`, given by its sign on each generator
/// `d_i e_i` (`d_i` even), in increasing coordinate order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Character {
    pub signs: Vec<i8>,
}

impl Character {
    pub fn is_trivial(&self) -> bool {
        self.signs.iter().all(|&s| s == 1)
    }
}

#[derive(Debug, Clone)]
pub struct ThetaGroup {
    d: PolarizationType,
    cap: u128,
    /// Coordinates whose divisor is even; these generate `Z2'`.
    even_coords: Vec<usize>,
}

impl ThetaGroup {
    pub fn new(d: &PolarizationType) -> Result<Self> {
        Self::with_cap(d, DEFAULT_ENUMERATION_CAP)
    }

    pub fn with_cap(d: &PolarizationType, cap: u128) -> Result<Self> {
        let order = d.divisors().iter().map(|&x| 2 * x as u128).product::<u128>();
        if order > cap {
            return Err(Error::SizeLimit { order, cap });
        }
        let even_coords = d
            .divisors()
            .iter()
            .enumerate()
            .filter(|(_, &x)| x % 2 == 0)
            .map(|(i, _)| i)
            .collect();
        Ok(Self {
            d: d.clone(),
            cap,
            even_coords,
        })
    }

    pub fn polarization(&self) -> &PolarizationType {
        &self.d
    }

    pub fn g(&self) -> usize {
        self.d.g()
    }

    pub fn cap(&self) -> u128 {
        self.cap
    }

    fn modulus(&self, i: usize) -> i64 {
        2 * self.d.divisors()[i] as i64
    }

    /// Reduce an arbitrary integer vector to its canonical representative.
    pub fn element(&self, c: &[i64]) -> GroupElement {
        assert_eq!(c.len(), self.g(), "index vector length must equal g");
        GroupElement(
            c.iter()
                .enumerate()
                .map(|(i, &x)| x.rem_euclid(self.modulus(i)))
                .collect(),
        )
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement(vec![0; self.g()])
    }

    pub fn add(&self, x: &GroupElement, y: &GroupElement) -> GroupElement {
        let v: Vec<i64> = x.0.iter().zip(&y.0).map(|(a, b)| a + b).collect();
        self.element(&v)
    }

    pub fn sub(&self, x: &GroupElement, y: &GroupElement) -> GroupElement {
        let v: Vec<i64> = x.0.iter().zip(&y.0).map(|(a, b)| a - b).collect();
        self.element(&v)
    }

    pub fn neg(&self, x: &GroupElement) -> GroupElement {
        let v: Vec<i64> = x.0.iter().map(|a| -a).collect();
        self.element(&v)
    }

    /// The two-torsion element `D eps`.
    pub fn two_torsion(&self, eps: &[u8]) -> GroupElement {
        let v: Vec<i64> = eps
            .iter()
            .zip(self.d.divisors())
            .map(|(&e, &d)| e as i64 * d as i64)
            .collect();
        self.element(&v)
    }

    fn boxed(&self, bounds: &[i64], step: &[i64]) -> Vec<GroupElement> {
        let g = self.g();
        let total: i64 = bounds.iter().product();
        let mut out = Vec::with_capacity(total as usize);
        let mut idx = vec![0i64; g];
        for _ in 0..total {
            out.push(GroupElement(
                idx.iter().zip(step).map(|(i, s)| i * s).collect(),
            ));
            for k in (0..g).rev() {
                idx[k] += 1;
                if idx[k] < bounds[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
        out
    }

    pub fn enumerate_k1(&self) -> Vec<GroupElement> {
        let bounds: Vec<i64> = (0..self.g()).map(|i| self.modulus(i)).collect();
        self.boxed(&bounds, &vec![1; self.g()])
    }

    pub fn subgroup_2k1(&self) -> Vec<GroupElement> {
        let bounds: Vec<i64> = self.d.divisors().iter().map(|&x| x as i64).collect();
        self.boxed(&bounds, &vec![2; self.g()])
    }

    fn torsion_with(&self, allowed: impl Fn(u32) -> bool) -> Vec<GroupElement> {
        let bounds: Vec<i64> = self
            .d
            .divisors()
            .iter()
            .map(|&x| if allowed(x) { 2 } else { 1 })
            .collect();
        let step: Vec<i64> = self.d.divisors().iter().map(|&x| x as i64).collect();
        self.boxed(&bounds, &step)
    }

    pub fn subgroup_z2(&self) -> Vec<GroupElement> {
        self.torsion_with(|_| true)
    }

    pub fn subgroup_z2prime(&self) -> Vec<GroupElement> {
        self.torsion_with(|x| x % 2 == 0)
    }

    pub fn complement_w(&self) -> Vec<GroupElement> {
        self.torsion_with(|x| x % 2 == 1)
    }

    pub fn transversal_u(&self) -> Vec<GroupElement> {
        let bounds: Vec<i64> = self.d.divisors().iter().map(|&x| x as i64).collect();
        self.boxed(&bounds, &vec![1; self.g()])
    }

    /// Representative of `x + Z2` lying in `U`.
    pub fn transversal_rep(&self, x: &GroupElement) -> GroupElement {
        GroupElement(
            x.0.iter()
                .zip(self.d.divisors())
                .map(|(&c, &d)| c % d as i64)
                .collect(),
        )
    }

    /// Lexicographically smallest element of `x + Z2'`.
    pub fn z2prime_rep(&self, x: &GroupElement) -> GroupElement {
        GroupElement(
            x.0.iter()
                .zip(self.d.divisors())
                .map(|(&c, &d)| if d % 2 == 0 { c % d as i64 } else { c })
                .collect(),
        )
    }

    pub fn characters_of_z2prime(&self) -> Vec<Character> {
        let k = self.even_coords.len();
        (0..(1u32 << k))
            .map(|mask| Character {
                signs: (0..k)
                    .map(|j| if mask >> (k - 1 - j) & 1 == 1 { -1 } else { 1 })
                    .collect(),
            })
            .collect()
    }

    /// `rho(z)` for `z in Z2'`; panics if `z` is outside `Z2'`.
    pub fn character_value(&self, rho: &Character, z: &GroupElement) -> i8 {
        let mut v = 1i8;
        for (i, &c) in z.0.iter().enumerate() {
            let d = self.d.divisors()[i] as i64;
            if c == 0 {
                continue;
            }
            assert!(c == d && d % 2 == 0, "{z:?} is not in Z2'");
            let j = self.even_coords.iter().position(|&e| e == i).unwrap();
            v *= rho.signs[j];
        }
        v
    }

    /// Canonical `u` with `2u = x`; the full preimage is `u + Z2`.
    pub fn halve(&self, x: &GroupElement) -> Result<GroupElement> {
        if !x.is_even() {
            return Err(Error::NotHalvable(x.0.clone()));
        }
        Ok(GroupElement(x.0.iter().map(|c| c / 2).collect()))
    }

    /// Canonical representative of the class of `(x1, x2)` under the diagonal
    /// action of `Z2'`.
    pub fn diagonal_class(&self, x1: &GroupElement, x2: &GroupElement) -> (GroupElement, GroupElement) {
        self.subgroup_z2prime()
            .iter()
            .map(|z| (self.add(x1, z), self.add(x2, z)))
            .min()
            .expect("Z2' contains 0")
    }

    /// The pairing `(y, t) -> (y + t, y - t)` on `y in U`, `t in (y + 2K1)/Z2'`.
    pub fn psi_pairing(&self) -> Result<PsiPairing> {
        let two_k1 = self.subgroup_2k1();
        let z2p_order = self.subgroup_z2prime().len();
        let mut table = Vec::new();
        let mut seen: BTreeMap<(GroupElement, GroupElement), (GroupElement, GroupElement)> = BTreeMap::new();
        for y in self.transversal_u() {
            let mut ts: Vec<GroupElement> = two_k1
                .iter()
                .map(|s| self.z2prime_rep(&self.add(&y, s)))
                .collect();
            ts.sort();
            ts.dedup();
            for t in ts {
                let x1 = self.add(&y, &t);
                let x2 = self.sub(&y, &t);
                debug_assert!(x1.is_even() && x2.is_even());
                let class = self.diagonal_class(&x1, &x2);
                if let Some((py, pt)) = seen.get(&class) {
                    return Err(Error::InjectivityOfPsiFailed {
                        d: self.d.divisors().to_vec(),
                        first: [py.coords(), pt.coords()].concat(),
                        second: [y.coords(), t.coords()].concat(),
                    });
                }
                seen.insert(class.clone(), (y.clone(), t.clone()));
                table.push(PsiEntry {
                    y: y.clone(),
                    t,
                    class,
                });
            }
        }
        let h0 = two_k1.len();
        let codomain_size = h0 * h0 / z2p_order;
        Ok(PsiPairing {
            domain_size: table.len(),
            codomain_size,
            bijective: table.len() == codomain_size,
            table,
        })
    }
}

impl ThetaGroup {
    // Per coordinate: every (y_i, t_i) of the psi domain, with the canonical
    // halves (x1_i / 2, x2_i / 2) of its image class.
    fn psi_coordinate_options(&self, i: usize) -> Vec<(u64, u64)> {
        let d = self.d.divisors()[i] as i64;
        let m = 2 * d;
        let t_bound = if d % 2 == 0 { d } else { m };
        let mut out = Vec::new();
        for y in 0..d {
            let mut t = y % 2;
            while t < t_bound {
                let mut x1 = (y + t).rem_euclid(m);
                let mut x2 = (y - t).rem_euclid(m);
                if d % 2 == 0 && x1 >= d {
                    x1 -= d;
                    x2 = (x2 + d).rem_euclid(m);
                }
                out.push(((x1 / 2) as u64, (x2 / 2) as u64));
                t += 2;
            }
        }
        out
    }

    /// Sizes of the psi domain and codomain, counted coordinate by coordinate
    /// (both sets are products over coordinates).
    pub fn psi_cardinalities(&self) -> (u128, u128) {
        let mut domain = 1u128;
        let mut codomain = 1u128;
        for &d in self.d.divisors() {
            let d = d as i64;
            let t_bound = if d % 2 == 0 { d } else { 2 * d };
            // t ranges over [0, t_bound) with the parity of y.
            domain *= (0..d).map(|y| ((t_bound - y % 2 + 1) / 2) as u128).sum::<u128>();
            // Pairs of even residues mod 2d, canonical under the diagonal shift.
            let classes = (0..2 * d)
                .step_by(2)
                .filter(|&x1| d % 2 == 1 || x1 < d)
                .count() as u128
                * d as u128;
            codomain *= classes;
        }
        (domain, codomain)
    }

    /// Exhaustive injectivity check of psi without materializing the table.
    pub fn psi_check(&self) -> Result<PsiSummary> {
        let g = self.g();
        let opts: Vec<Vec<(u64, u64)>> = (0..g).map(|i| self.psi_coordinate_options(i)).collect();
        let radix: Vec<u64> = self.d.divisors().iter().map(|&d| d as u64).collect();
        let h: u64 = radix.iter().product();
        let mut seen = vec![0u64; ((h * h) as usize).div_ceil(64)];
        let mut idx = vec![0usize; g];
        let mut domain = 0usize;
        loop {
            let (mut k1, mut k2) = (0u64, 0u64);
            for i in 0..g {
                let (a, b) = opts[i][idx[i]];
                k1 = k1 * radix[i] + a;
                k2 = k2 * radix[i] + b;
            }
            let key = (k1 * h + k2) as usize;
            if seen[key / 64] >> (key % 64) & 1 == 1 {
                return Err(Error::InjectivityOfPsiFailed {
                    d: self.d.divisors().to_vec(),
                    first: vec![k1 as i64, k2 as i64],
                    second: idx.iter().map(|&x| x as i64).collect(),
                });
            }
            seen[key / 64] |= 1 << (key % 64);
            domain += 1;
            let mut k = g;
            loop {
                if k == 0 {
                    let codomain = self.psi_cardinalities().1 as usize;
                    return Ok(PsiSummary {
                        domain_size: domain,
                        codomain_size: codomain,
                        bijective: domain == codomain,
                    });
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < opts[k].len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PsiSummary {
    pub domain_size: usize,
    pub codomain_size: usize,
    pub bijective: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PsiEntry {
    pub y: GroupElement,
    pub t: GroupElement,
    /// Canonical representative of `(y + t, y - t)` modulo the diagonal `Z2'`.
    pub class: (GroupElement, GroupElement),
}

#[derive(Debug, Clone, Serialize)]
pub struct PsiPairing {
    pub table: Vec<PsiEntry>,
    pub domain_size: usize,
    pub codomain_size: usize,
    /// Injective by construction of the table; bijective when the counts match.
    pub bijective: bool,
}

/// Structured dump of all subgroups, for `dump-groups`.
#[derive(Debug, Clone, Serialize)]
pub struct GroupDump {
    pub d: Vec<u32>,
    pub k1: Vec<GroupElement>,
    pub two_k1: Vec<GroupElement>,
    pub z2: Vec<GroupElement>,
    pub z2_prime: Vec<GroupElement>,
    pub w: Vec<GroupElement>,
    pub u: Vec<GroupElement>,
    pub characters: Vec<Character>,
    pub psi: PsiPairing,
}

impl ThetaGroup {
    pub fn dump(&self) -> Result<GroupDump> {
        Ok(GroupDump {
            d: self.d.divisors().to_vec(),
            k1: self.enumerate_k1(),
            two_k1: self.subgroup_2k1(),
            z2: self.subgroup_z2(),
            z2_prime: self.subgroup_z2prime(),
            w: self.complement_w(),
            u: self.transversal_u(),
            characters: self.characters_of_z2prime(),
            psi: self.psi_pairing()?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grp(d: &[u32]) -> ThetaGroup {
        ThetaGroup::new(&PolarizationType::new(d.to_vec()).unwrap()).unwrap()
    }

    fn coords(v: &[GroupElement]) -> Vec<Vec<i64>> {
        v.iter().map(|e| e.coords().to_vec()).collect()
    }

    #[test]
    fn k1_examples() {
        assert_eq!(coords(&grp(&[1]).enumerate_k1()), vec![vec![0], vec![1]]);
        assert_eq!(coords(&grp(&[2]).enumerate_k1()), vec![vec![0], vec![1], vec![2], vec![3]]);
        let k = grp(&[1, 2]).enumerate_k1();
        assert_eq!(k.len(), 8);
        assert!(k.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn size_cap() {
        let d = PolarizationType::new(vec![4, 4, 4]).unwrap();
        assert!(matches!(
            ThetaGroup::with_cap(&d, 100),
            Err(Error::SizeLimit { order: 512, cap: 100 })
        ));
    }

    #[test]
    fn subgroup_examples() {
        assert_eq!(coords(&grp(&[2]).subgroup_2k1()), vec![vec![0], vec![2]]);
        assert_eq!(coords(&grp(&[1]).subgroup_2k1()), vec![vec![0]]);
        assert_eq!(
            coords(&grp(&[2, 2]).subgroup_2k1()),
            vec![vec![0, 0], vec![0, 2], vec![2, 0], vec![2, 2]]
        );
        assert_eq!(coords(&grp(&[1]).subgroup_z2()), vec![vec![0], vec![1]]);
        assert_eq!(coords(&grp(&[2]).subgroup_z2()), vec![vec![0], vec![2]]);
        assert_eq!(
            coords(&grp(&[1, 2]).subgroup_z2()),
            vec![vec![0, 0], vec![0, 2], vec![1, 0], vec![1, 2]]
        );
        assert_eq!(coords(&grp(&[2]).subgroup_z2prime()), vec![vec![0], vec![2]]);
        assert_eq!(coords(&grp(&[1]).subgroup_z2prime()), vec![vec![0]]);
        assert_eq!(coords(&grp(&[1, 2]).subgroup_z2prime()), vec![vec![0, 0], vec![0, 2]]);
        assert_eq!(coords(&grp(&[2, 2]).complement_w()), vec![vec![0, 0]]);
        assert_eq!(coords(&grp(&[1, 2]).complement_w()), vec![vec![0, 0], vec![1, 0]]);
        assert_eq!(grp(&[1, 1]).complement_w(), grp(&[1, 1]).subgroup_z2());
        assert_eq!(coords(&grp(&[1]).transversal_u()), vec![vec![0]]);
        assert_eq!(coords(&grp(&[2]).transversal_u()), vec![vec![0], vec![1]]);
        assert_eq!(grp(&[2, 2]).transversal_u().len(), 4);
    }

    #[test]
    fn character_examples() {
        assert_eq!(grp(&[1, 1]).characters_of_z2prime().len(), 1);
        let g = grp(&[2]);
        let chars = g.characters_of_z2prime();
        assert_eq!(chars.len(), 2);
        let z = g.element(&[2]);
        let vals: Vec<i8> = chars.iter().map(|r| g.character_value(r, &z)).collect();
        assert_eq!(vals, vec![1, -1]);
        assert_eq!(grp(&[2, 2]).characters_of_z2prime().len(), 4);
    }

    #[test]
    fn halve_examples() {
        let g = grp(&[2, 2]);
        assert_eq!(g.halve(&g.zero()).unwrap(), g.zero());
        let g = grp(&[2]);
        let u = g.halve(&g.element(&[2])).unwrap();
        assert_eq!(u.coords(), &[1]);
        let mut pre: Vec<_> = g
            .enumerate_k1()
            .into_iter()
            .filter(|x| g.add(x, x) == g.element(&[2]))
            .collect();
        pre.sort();
        assert_eq!(coords(&pre), vec![vec![1], vec![3]]);
        let from_z2: Vec<_> = g.subgroup_z2().iter().map(|z| g.add(&u, z)).collect();
        assert_eq!(coords(&from_z2), vec![vec![1], vec![3]]);
        assert_eq!(g.halve(&g.element(&[1])), Err(Error::NotHalvable(vec![1])));
    }

    #[test]
    fn psi_examples() {
        let p = grp(&[1]).psi_pairing().unwrap();
        assert_eq!((p.domain_size, p.bijective), (1, true));
        let p = grp(&[2]).psi_pairing().unwrap();
        assert_eq!((p.domain_size, p.codomain_size, p.bijective), (2, 2, true));
        let p = grp(&[2, 2]).psi_pairing().unwrap();
        assert_eq!((p.domain_size, p.codomain_size, p.bijective), (4, 4, true));
    }

    #[test]
    fn theta_symmetrization_bookkeeping() {
        // theta_{(x1+z, x2+z), rho} = rho(z) theta_{(x1, x2), rho}: the shifted
        // pair lands in the same diagonal class.
        let g = grp(&[2, 4]);
        let two_k1 = g.subgroup_2k1();
        for x1 in &two_k1 {
            for x2 in &two_k1 {
                let class = g.diagonal_class(x1, x2);
                for z in g.subgroup_z2prime() {
                    assert_eq!(g.diagonal_class(&g.add(x1, &z), &g.add(x2, &z)), class);
                }
            }
        }
    }

    #[test]
    fn fast_psi_check_matches_table() {
        for d in [&[1u32][..], &[2], &[3], &[4], &[1, 2], &[2, 2], &[1, 3], &[2, 4], &[1, 1, 2], &[2, 2, 4]] {
            let g = grp(d);
            let table = g.psi_pairing().unwrap();
            let fast = g.psi_check().unwrap();
            assert_eq!(fast.domain_size, table.domain_size, "{d:?}");
            assert_eq!(fast.codomain_size, table.codomain_size, "{d:?}");
            assert!(fast.bijective);
            let (dom, cod) = g.psi_cardinalities();
            assert_eq!((dom as usize, cod as usize), (table.domain_size, table.codomain_size));
        }
    }
}
