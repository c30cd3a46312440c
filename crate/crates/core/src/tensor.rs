//! Totally symmetric invariant tensors and the ad-invariance check.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::lie::{GenKind, GeneratorId, LieAlgebra};
use crate::scalar::{q, Scalar, Q};
use crate::Error;

/// Totally symmetric multilinear form, stored on sorted generator tuples.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantTensor {
    rank: usize,
    entries: BTreeMap<Vec<GeneratorId>, Q>,
}

impl InvariantTensor {
    pub fn new(rank: usize) -> Self {
        InvariantTensor {
            rank,
            entries: BTreeMap::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Set the value on a slot tuple (any order).
    pub fn insert(&mut self, slots: &[GeneratorId], value: Q) -> Result<(), Error> {
        if slots.len() != self.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                got: slots.len(),
            });
        }
        let mut key = slots.to_vec();
        key.sort();
        if value.is_zero() {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, value);
        }
        Ok(())
    }

    pub fn get(&self, slots: &[GeneratorId]) -> Q {
        let mut key = slots.to_vec();
        key.sort();
        self.entries.get(&key).cloned().unwrap_or_else(Q::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = (&Vec<GeneratorId>, &Q)> {
        self.entries.iter()
    }

    /// Every ordered slot tuple with a nonzero value, resolved against an
    /// algebra's generator indices.
    pub fn ordered_entries(&self, alg: &LieAlgebra) -> Result<Vec<(Vec<usize>, Q)>, Error> {
        let mut out = Vec::new();
        for (key, v) in &self.entries {
            let idx: Vec<usize> = key
                .iter()
                .map(|g| {
                    alg.index_of(g)
                        .ok_or_else(|| Error::InvalidGenerator(format!("{g} not in {}", alg.name())))
                })
                .collect::<Result<_, _>>()?;
            for perm in distinct_permutations(&idx) {
                out.push((perm, v.clone()));
            }
        }
        Ok(out)
    }
}

fn distinct_permutations(items: &[usize]) -> Vec<Vec<usize>> {
    let mut sorted = items.to_vec();
    sorted.sort_unstable();
    let mut out = vec![sorted.clone()];
    // Lexicographic next-permutation enumerates each distinct ordering once.
    while let Some(i) = (0..sorted.len().saturating_sub(1))
        .rev()
        .find(|&i| sorted[i] < sorted[i + 1])
    {
        let j = (i + 1..sorted.len()).rev().find(|&j| sorted[j] > sorted[i]).unwrap();
        sorted.swap(i, j);
        sorted[i + 1..].reverse();
        out.push(sorted.clone());
    }
    out
}

pub(crate) fn permutation_sign(p: &[u8]) -> i64 {
    let mut sign = 1;
    for i in 0..p.len() {
        for j in (i + 1)..p.len() {
            if p[i] > p[j] {
                sign = -sign;
            } else if p[i] == p[j] {
                return 0;
            }
        }
    }
    sign
}

/// Levi-Civita symbol with ε_{01…} = +1.
pub fn epsilon(indices: &[u8]) -> i64 {
    permutation_sign(indices)
}

pub(crate) fn permutations(n: u8) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur: Vec<u8> = (0..n).collect();
    out.push(cur.clone());
    while let Some(i) = (0..cur.len().saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) {
        let j = (i + 1..cur.len()).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
        out.push(cur.clone());
    }
    out
}

/// The rank n+1 Poincaré tensor ⟨J_{a1a2}…J_{a(2n-1)a(2n)} P_{a(2n+1)}⟩ =
/// 2ⁿ/(n+1) ε_{a1…a(2n+1)}; every other component vanishes.
pub fn invariant_tensor(n: usize) -> Result<InvariantTensor, Error> {
    if n == 0 {
        return Err(Error::InvalidN(n));
    }
    let dim = (2 * n + 1) as u8;
    let coeff = Q::new((1i64 << n).into(), ((n + 1) as i64).into());
    let mut t = InvariantTensor::new(n + 1);
    for perm in permutations(dim) {
        if (0..n).any(|k| perm[2 * k] > perm[2 * k + 1]) {
            continue;
        }
        let mut slots: Vec<GeneratorId> = (0..n)
            .map(|k| GeneratorId::j(perm[2 * k], perm[2 * k + 1]).unwrap().0)
            .collect();
        slots.push(GeneratorId::p(perm[2 * n]));
        let v = &coeff * q(epsilon(&perm));
        t.insert(&slots, v)?;
    }
    Ok(t)
}

#[derive(Clone, Debug, Default)]
pub struct InvarianceReport {
    pub tuples_checked: usize,
    /// (adjoint generator, sorted slot tuple, residual)
    pub violations: Vec<(usize, Vec<usize>, Scalar)>,
}

impl InvarianceReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// Lowest power of m² appearing in any residual.
    pub fn lowest_m2_order(&self) -> Option<u16> {
        self.violations
            .iter()
            .flat_map(|(_, _, r)| r.terms().map(|(e, _)| e.m2))
            .min()
    }
}

fn multisets(len: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, len: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..len {
            cur.push(i);
            rec(i, len, k, cur, out);
            cur.pop();
        }
    }
    rec(0, len, k, &mut cur, &mut out);
    out
}

/// Verify Σ_j ⟨T_{i1}…[T_a, T_{ij}]…T_{ir}⟩ = 0 for every adjoint generator
/// T_a and every slot multiset.
pub fn check_invariance(tensor: &InvariantTensor, alg: &LieAlgebra) -> Result<InvarianceReport, Error> {
    if tensor.rank() < 2 {
        return Err(Error::RankMismatch {
            expected: 2,
            got: tensor.rank(),
        });
    }
    let value = |slots: &[usize]| -> Q {
        let g: Vec<GeneratorId> = slots.iter().map(|&i| alg.generator(i).clone()).collect();
        tensor.get(&g)
    };
    let mut report = InvarianceReport::default();
    for tuple in multisets(alg.len(), tensor.rank()) {
        report.tuples_checked += 1;
        for a in 0..alg.len() {
            let mut residual = Scalar::zero();
            for j in 0..tuple.len() {
                for (k, c) in alg.bracket_gens(a, tuple[j]) {
                    let mut slots = tuple.clone();
                    slots[j] = *k;
                    let v = value(&slots);
                    if !v.is_zero() {
                        residual += &c.scale(&v);
                    }
                }
            }
            if !residual.is_zero() {
                report.violations.push((a, tuple.clone(), residual));
            }
        }
    }
    Ok(report)
}

/// Convenience: does the tensor contain any all-Lorentz component?
pub fn has_all_lorentz_component(tensor: &InvariantTensor) -> bool {
    tensor.support().any(|(k, _)| k.iter().all(|g| g.kind == GenKind::J))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{build_ads, build_poincare};
    use crate::scalar::qr;

    #[test]
    fn n1_is_epsilon() {
        let t = invariant_tensor(1).unwrap();
        let j01 = GeneratorId::j(0, 1).unwrap().0;
        let j02 = GeneratorId::j(0, 2).unwrap().0;
        assert_eq!(t.get(&[j01.clone(), GeneratorId::p(2)]), q(1));
        assert_eq!(t.get(&[GeneratorId::p(2), j01.clone()]), q(1));
        assert_eq!(t.get(&[j02, GeneratorId::p(1)]), q(-1));
        assert_eq!(t.get(&[j01, GeneratorId::p(0)]), q(0));
    }

    #[test]
    fn n2_coefficient_is_four_thirds() {
        let t = invariant_tensor(2).unwrap();
        let j01 = GeneratorId::j(0, 1).unwrap().0;
        let j23 = GeneratorId::j(2, 3).unwrap().0;
        assert_eq!(t.get(&[j01.clone(), j23.clone(), GeneratorId::p(4)]), qr(4, 3));
        assert_eq!(t.get(&[j23, GeneratorId::p(4), j01]), qr(4, 3));
        assert!(!has_all_lorentz_component(&t));
    }

    #[test]
    fn distinct_permutation_count() {
        assert_eq!(distinct_permutations(&[1, 2, 3]).len(), 6);
        assert_eq!(distinct_permutations(&[1, 1, 3]).len(), 3);
    }

    #[test]
    fn poincare_invariance() {
        for n in 1..=2 {
            let r = check_invariance(&invariant_tensor(n).unwrap(), &build_poincare(n).unwrap()).unwrap();
            assert!(r.passed(), "n={n}: {:?}", r.violations.first());
        }
    }

    #[test]
    fn ads_invariance_holds_exactly() {
        // The ε tensor with a single P slot is the so(2n,2) Pfaffian invariant
        // restricted to the J/P split, so it is AdS-invariant as well.
        for n in 1..=2 {
            let r = check_invariance(&invariant_tensor(n).unwrap(), &build_ads(n).unwrap()).unwrap();
            assert!(r.passed());
        }
    }

    #[test]
    fn invariance_detects_broken_tensor() {
        let mut t = invariant_tensor(1).unwrap();
        t.insert(&[GeneratorId::p(0), GeneratorId::p(0)], q(1)).unwrap();
        let r = check_invariance(&t, &build_poincare(1).unwrap()).unwrap();
        assert!(!r.passed());
    }
}
