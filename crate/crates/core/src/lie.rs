//! Lie algebra registry: Poincaré and AdS algebras in 2n+1 dimensions, the
//! m → 0 contraction, reductive coset splits and axiom checks.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use smallvec::SmallVec;

use crate::scalar::{Param, Scalar};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GenKind {
    /// Lorentz rotation J_{ab}.
    J,
    /// Translation P_a.
    P,
}

/// A basis generator. J indices are stored with first < second.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GeneratorId {
    pub kind: GenKind,
    pub indices: SmallVec<[u8; 2]>,
}

impl GeneratorId {
    pub fn p(a: u8) -> Self {
        GeneratorId {
            kind: GenKind::P,
            indices: SmallVec::from_slice(&[a]),
        }
    }

    /// J_{ab} in the a < b basis together with the sign relating it to the
    /// requested index order. `None` when a == b.
    pub fn j(a: u8, b: u8) -> Option<(Self, i64)> {
        let (lo, hi, sign) = match a.cmp(&b) {
            std::cmp::Ordering::Less => (a, b, 1),
            std::cmp::Ordering::Greater => (b, a, -1),
            std::cmp::Ordering::Equal => return None,
        };
        Some((
            GeneratorId {
                kind: GenKind::J,
                indices: SmallVec::from_slice(&[lo, hi]),
            },
            sign,
        ))
    }

    pub fn validate(&self, dim: u8) -> Result<(), Error> {
        let ok_arity = match self.kind {
            GenKind::J => self.indices.len() == 2 && self.indices[0] < self.indices[1],
            GenKind::P => self.indices.len() == 1,
        };
        if !ok_arity {
            return Err(Error::InvalidGenerator(self.to_string()));
        }
        if let Some(&bad) = self.indices.iter().find(|&&i| i >= dim) {
            return Err(Error::IndexOutOfRange { index: bad, dim });
        }
        Ok(())
    }
}

impl fmt::Display for GeneratorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx = self.indices.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",");
        match self.kind {
            GenKind::J => write!(f, "J[{idx}]"),
            GenKind::P => write!(f, "P[{idx}]"),
        }
    }
}

/// Sparse linear combination of generators (by index).
pub type GenCombo = Vec<(usize, Scalar)>;

/// One bracket table entry `[X, Y] = Σ c Z`.
pub type BracketEntry = (GeneratorId, GeneratorId, Vec<(GeneratorId, Scalar)>);

#[derive(Clone, Debug)]
pub struct LieAlgebra {
    name: String,
    n: usize,
    generators: Vec<GeneratorId>,
    lookup: HashMap<GeneratorId, usize>,
    structure: BTreeMap<(usize, usize), GenCombo>,
    metric: Vec<i64>,
    deformation: Option<Param>,
}

impl PartialEq for LieAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.generators == other.generators
            && self.structure == other.structure
            && self.metric == other.metric
            && self.deformation == other.deformation
    }
}

fn eta(a: u8, b: u8) -> i64 {
    match (a, b) {
        (0, 0) => -1,
        (x, y) if x == y => 1,
        _ => 0,
    }
}

fn lorentz_generators(dim: u8) -> Vec<GeneratorId> {
    let mut out = Vec::new();
    for a in 0..dim {
        for b in (a + 1)..dim {
            out.push(GeneratorId::j(a, b).unwrap().0);
        }
    }
    for a in 0..dim {
        out.push(GeneratorId::p(a));
    }
    out
}

impl LieAlgebra {
    /// Build an algebra from explicit bracket entries. Each entry `[X, Y] = Z`
    /// also fixes `[Y, X] = -Z`.
    pub fn from_table(
        name: &str,
        n: usize,
        generators: Vec<GeneratorId>,
        brackets: Vec<BracketEntry>,
        deformation: Option<Param>,
    ) -> Result<Self, Error> {
        if n == 0 {
            return Err(Error::InvalidN(n));
        }
        let dim = (2 * n + 1) as u8;
        let mut lookup = HashMap::new();
        for (i, g) in generators.iter().enumerate() {
            g.validate(dim)?;
            if lookup.insert(g.clone(), i).is_some() {
                return Err(Error::InvalidGenerator(format!("duplicate {g}")));
            }
        }
        let mut alg = LieAlgebra {
            name: name.to_string(),
            n,
            generators,
            lookup,
            structure: BTreeMap::new(),
            metric: (0..dim).map(|a| eta(a, a)).collect(),
            deformation,
        };
        for (x, y, rhs) in brackets {
            let i = alg.require(&x)?;
            let j = alg.require(&y)?;
            let mut combo = Vec::new();
            for (g, c) in rhs {
                combo.push((alg.require(&g)?, c));
            }
            alg.set_bracket(i, j, combo);
        }
        Ok(alg)
    }

    fn require(&self, g: &GeneratorId) -> Result<usize, Error> {
        self.index_of(g)
            .ok_or_else(|| Error::InvalidGenerator(format!("{g} not in algebra {}", self.name)))
    }

    fn build(n: usize, deformed: bool) -> Result<Self, Error> {
        if n == 0 {
            return Err(Error::InvalidN(n));
        }
        let dim = (2 * n + 1) as u8;
        let name = if deformed { "ads" } else { "poincare" };
        let generators = lorentz_generators(dim);
        let mut alg = LieAlgebra::from_table(name, n, generators, Vec::new(), deformed.then_some(Param::M2))?;
        let gens = alg.generators.clone();
        for (i, x) in gens.iter().enumerate() {
            for (j, y) in gens.iter().enumerate().skip(i + 1) {
                let combo = alg.defining_bracket(x, y);
                alg.set_bracket(i, j, combo);
            }
        }
        Ok(alg)
    }

    fn j_term(&self, a: u8, b: u8, c: Scalar, out: &mut BTreeMap<usize, Scalar>) {
        if let Some((g, sign)) = GeneratorId::j(a, b) {
            let idx = self.lookup[&g];
            *out.entry(idx).or_default() += &c.scale(&crate::scalar::q(sign));
        }
    }

    fn p_term(&self, a: u8, c: Scalar, out: &mut BTreeMap<usize, Scalar>) {
        let idx = self.lookup[&GeneratorId::p(a)];
        *out.entry(idx).or_default() += &c;
    }

    /// The bracket table: [P_a,P_b] = m² J_ab, [J_ab,P_c] = η_bc P_a - η_ac P_b,
    /// [J_ab,J_cd] = η_bc J_ad - η_ac J_bd - η_bd J_ac + η_ad J_bc.
    ///
    /// The [J,J] sign is the one forced by Jacobi given the [J,P] line.
    fn defining_bracket(&self, x: &GeneratorId, y: &GeneratorId) -> GenCombo {
        let mut out = BTreeMap::new();
        let s = |v: i64| Scalar::int(v);
        match (x.kind, y.kind) {
            (GenKind::P, GenKind::P) => {
                if let Some(p) = self.deformation {
                    self.j_term(x.indices[0], y.indices[0], Scalar::param(p), &mut out);
                }
            }
            (GenKind::J, GenKind::P) => {
                let (a, b, c) = (x.indices[0], x.indices[1], y.indices[0]);
                self.p_term(a, s(eta(b, c)), &mut out);
                self.p_term(b, s(-eta(a, c)), &mut out);
            }
            (GenKind::P, GenKind::J) => {
                let (a, b, c) = (y.indices[0], y.indices[1], x.indices[0]);
                self.p_term(a, s(-eta(b, c)), &mut out);
                self.p_term(b, s(eta(a, c)), &mut out);
            }
            (GenKind::J, GenKind::J) => {
                let (a, b) = (x.indices[0], x.indices[1]);
                let (c, d) = (y.indices[0], y.indices[1]);
                self.j_term(a, d, s(eta(b, c)), &mut out);
                self.j_term(b, d, s(-eta(a, c)), &mut out);
                self.j_term(a, c, s(-eta(b, d)), &mut out);
                self.j_term(b, c, s(eta(a, d)), &mut out);
            }
        }
        out.into_iter().filter(|(_, c)| !c.is_zero()).collect()
    }

    /// Overwrite [T_i, T_j] (and [T_j, T_i] by antisymmetry).
    pub fn set_bracket(&mut self, i: usize, j: usize, combo: GenCombo) {
        let combo: GenCombo = combo.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        let neg: GenCombo = combo.iter().map(|(k, c)| (*k, -c)).collect();
        if combo.is_empty() {
            self.structure.remove(&(i, j));
            self.structure.remove(&(j, i));
        } else {
            self.structure.insert((i, j), combo);
            self.structure.insert((j, i), neg);
        }
    }

    /// Overwrite only [T_i, T_j], leaving [T_j, T_i] untouched. Used to build
    /// deliberately broken tables for negative controls.
    pub fn set_bracket_one_sided(&mut self, i: usize, j: usize, combo: GenCombo) {
        self.structure.insert((i, j), combo);
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of index values, D = 2n + 1.
    pub fn dim(&self) -> u8 {
        (2 * self.n + 1) as u8
    }

    pub fn generators(&self) -> &[GeneratorId] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn deformation(&self) -> Option<Param> {
        self.deformation
    }

    pub fn metric(&self, a: u8, b: u8) -> i64 {
        if a == b {
            self.metric[usize::from(a)]
        } else {
            0
        }
    }

    pub fn index_of(&self, g: &GeneratorId) -> Option<usize> {
        self.lookup.get(g).copied()
    }

    pub fn p_index(&self, a: u8) -> Option<usize> {
        self.index_of(&GeneratorId::p(a))
    }

    /// Index of J_{ab} and the antisymmetry sign for the given order.
    pub fn j_index(&self, a: u8, b: u8) -> Option<(usize, i64)> {
        let (g, sign) = GeneratorId::j(a, b)?;
        Some((self.index_of(&g)?, sign))
    }

    pub fn generator(&self, i: usize) -> &GeneratorId {
        &self.generators[i]
    }

    pub fn bracket_gens(&self, i: usize, j: usize) -> &[(usize, Scalar)] {
        self.structure.get(&(i, j)).map_or(&[], Vec::as_slice)
    }

    /// Bracket of two generator combinations.
    pub fn bracket_combo(&self, x: &[(usize, Scalar)], y: &[(usize, Scalar)]) -> GenCombo {
        let mut out: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (i, ci) in x {
            for (j, cj) in y {
                let cij = ci * cj;
                for (k, f) in self.bracket_gens(*i, *j) {
                    *out.entry(*k).or_default() += &(&cij * f);
                }
            }
        }
        out.into_iter().filter(|(_, c)| !c.is_zero()).collect()
    }

    pub fn is_translation(&self, i: usize) -> bool {
        self.generators[i].kind == GenKind::P
    }

    pub fn is_lorentz(&self, i: usize) -> bool {
        self.generators[i].kind == GenKind::J
    }
}

pub fn build_poincare(n: usize) -> Result<LieAlgebra, Error> {
    LieAlgebra::build(n, false)
}

pub fn build_ads(n: usize) -> Result<LieAlgebra, Error> {
    LieAlgebra::build(n, true)
}

/// İnönü–Wigner contraction m → 0.
pub fn contract(ads: &LieAlgebra) -> Result<LieAlgebra, Error> {
    let p = ads.deformation.ok_or(Error::MissingDeformation)?;
    let mut out = ads.clone();
    out.name = "poincare".to_string();
    out.deformation = None;
    let zero = Scalar::zero();
    out.structure = ads
        .structure
        .iter()
        .filter_map(|(k, combo)| {
            let c: GenCombo = combo
                .iter()
                .map(|(g, s)| (*g, s.subst(p, &zero)))
                .filter(|(_, s)| !s.is_zero())
                .collect();
            (!c.is_empty()).then_some((*k, c))
        })
        .collect();
    Ok(out)
}

#[derive(Clone, Debug, Default)]
pub struct JacobiReport {
    pub triples_checked: usize,
    pub antisymmetry_violations: Vec<(usize, usize)>,
    pub violations: Vec<((usize, usize, usize), GenCombo)>,
}

impl JacobiReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.antisymmetry_violations.is_empty()
    }
}

pub fn check_jacobi(alg: &LieAlgebra) -> JacobiReport {
    let mut report = JacobiReport::default();
    let len = alg.len();
    for i in 0..len {
        for j in i..len {
            let ij = alg.bracket_gens(i, j).to_vec();
            let ji: GenCombo = alg.bracket_gens(j, i).iter().map(|(k, c)| (*k, -c)).collect();
            if ij != ji {
                report.antisymmetry_violations.push((i, j));
            }
        }
    }
    let unit = |i: usize| vec![(i, Scalar::one())];
    for i in 0..len {
        for j in (i + 1)..len {
            for k in (j + 1)..len {
                report.triples_checked += 1;
                let a = alg.bracket_combo(&unit(i), &alg.bracket_combo(&unit(j), &unit(k)));
                let b = alg.bracket_combo(&unit(j), &alg.bracket_combo(&unit(k), &unit(i)));
                let c = alg.bracket_combo(&unit(k), &alg.bracket_combo(&unit(i), &unit(j)));
                let mut sum: BTreeMap<usize, Scalar> = BTreeMap::new();
                for (g, s) in a.iter().chain(&b).chain(&c) {
                    *sum.entry(*g).or_default() += s;
                }
                let residual: GenCombo = sum.into_iter().filter(|(_, s)| !s.is_zero()).collect();
                if !residual.is_empty() {
                    report.violations.push(((i, j, k), residual));
                }
            }
        }
    }
    report
}

/// Reductive split of the generators into a subalgebra and a coset.
#[derive(Clone, Debug, PartialEq)]
pub struct CosetSplit {
    pub subalgebra: Vec<usize>,
    pub coset: Vec<usize>,
}

impl CosetSplit {
    /// Lorentz subalgebra {J} and translations {P}.
    pub fn lorentz(alg: &LieAlgebra) -> Self {
        let (sub, coset): (Vec<usize>, Vec<usize>) = (0..alg.len()).partition(|&i| alg.is_lorentz(i));
        CosetSplit { subalgebra: sub, coset }
    }

    pub fn validate(&self, alg: &LieAlgebra) -> Result<(), Error> {
        let mut seen = vec![false; alg.len()];
        for &i in self.subalgebra.iter().chain(&self.coset) {
            if i >= alg.len() || seen[i] {
                return Err(Error::NotReductive("split is not a partition".into()));
            }
            seen[i] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::NotReductive("split does not cover every generator".into()));
        }
        for &x in &self.subalgebra {
            for &y in &self.coset {
                for (k, _) in alg.bracket_gens(x, y) {
                    if !self.coset.contains(k) {
                        return Err(Error::NotReductive(format!(
                            "[{}, {}] leaves the coset",
                            alg.generator(x),
                            alg.generator(y)
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poincare_n1_shape() {
        let alg = build_poincare(1).unwrap();
        assert_eq!(alg.len(), 6);
        assert_eq!(alg.generators().iter().filter(|g| g.kind == GenKind::J).count(), 3);
        let p0 = alg.p_index(0).unwrap();
        let p1 = alg.p_index(1).unwrap();
        assert!(alg.bracket_gens(p0, p1).is_empty());
    }

    #[test]
    fn j01_p1_gives_p0() {
        let alg = build_poincare(1).unwrap();
        let (j01, _) = alg.j_index(0, 1).unwrap();
        let p1 = alg.p_index(1).unwrap();
        let p0 = alg.p_index(0).unwrap();
        assert_eq!(alg.bracket_gens(j01, p1), &[(p0, Scalar::one())]);
    }

    #[test]
    fn ads_pp_bracket_is_m2_j() {
        let alg = build_ads(1).unwrap();
        let (j01, _) = alg.j_index(0, 1).unwrap();
        let (p0, p1) = (alg.p_index(0).unwrap(), alg.p_index(1).unwrap());
        assert_eq!(alg.bracket_gens(p0, p1), &[(j01, Scalar::param(Param::M2))]);
    }

    #[test]
    fn zero_n_rejected() {
        assert!(matches!(build_poincare(0), Err(Error::InvalidN(0))));
        assert!(matches!(build_ads(0), Err(Error::InvalidN(0))));
    }

    #[test]
    fn jacobi_exhaustive() {
        let r = check_jacobi(&build_poincare(2).unwrap());
        assert_eq!(r.triples_checked, 455);
        assert!(r.passed());
        assert!(check_jacobi(&build_ads(1).unwrap()).passed());
        assert!(check_jacobi(&build_ads(2).unwrap()).passed());
    }

    #[test]
    fn contraction_reproduces_poincare() {
        for n in 1..=2 {
            let c = contract(&build_ads(n).unwrap()).unwrap();
            assert_eq!(c, build_poincare(n).unwrap());
            assert!(check_jacobi(&c).passed());
        }
        let p = build_poincare(1).unwrap();
        assert!(matches!(contract(&p), Err(Error::MissingDeformation)));
    }

    #[test]
    fn corrupted_table_is_caught() {
        let mut alg = build_poincare(1).unwrap();
        let (j01, _) = alg.j_index(0, 1).unwrap();
        let (j12, _) = alg.j_index(1, 2).unwrap();
        let p2 = alg.p_index(2).unwrap();
        alg.set_bracket(j01, j12, vec![(p2, Scalar::one())]);
        assert!(!check_jacobi(&alg).violations.is_empty());

        let mut alg = build_poincare(1).unwrap();
        let p1 = alg.p_index(1).unwrap();
        alg.set_bracket_one_sided(j01, p1, vec![]);
        assert!(!check_jacobi(&alg).antisymmetry_violations.is_empty());
    }

    #[test]
    fn lorentz_split_is_reductive() {
        for alg in [build_poincare(2).unwrap(), build_ads(2).unwrap()] {
            let split = CosetSplit::lorentz(&alg);
            split.validate(&alg).unwrap();
            assert_eq!(split.coset.len(), 5);
        }
    }

    #[test]
    fn generator_validation() {
        assert!(GeneratorId::j(1, 1).is_none());
        let (g, sign) = GeneratorId::j(2, 0).unwrap();
        assert_eq!(sign, -1);
        assert_eq!(g.indices.as_slice(), &[0, 2]);
        assert!(matches!(
            GeneratorId::p(3).validate(3),
            Err(Error::IndexOutOfRange { index: 3, dim: 3 })
        ));
    }
}
