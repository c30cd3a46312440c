//! Lie-algebra-valued differential forms.
//!
//! Components are stored per basis generator. Lorentz-valued forms use the
//! X = ½ X^{ab} J_{ab} convention resolved to the a < b basis, so the stored
//! component of J_{ab} is X^{ab} itself.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::form::{Field, FormExpr};
use crate::lie::LieAlgebra;
use crate::scalar::{q, qr, Param, Scalar, Q};
use crate::tensor::InvariantTensor;
use crate::Error;

#[derive(Clone, Debug)]
pub struct LieForm {
    algebra: Arc<LieAlgebra>,
    degree: u32,
    components: BTreeMap<usize, FormExpr>,
}

impl PartialEq for LieForm {
    fn eq(&self, other: &Self) -> bool {
        same_algebra(&self.algebra, &other.algebra)
            && self.components == other.components
            && (self.degree == other.degree || self.components.is_empty())
    }
}

fn same_algebra(a: &Arc<LieAlgebra>, b: &Arc<LieAlgebra>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl LieForm {
    pub fn zero(algebra: &Arc<LieAlgebra>, degree: u32) -> Self {
        LieForm {
            algebra: Arc::clone(algebra),
            degree,
            components: BTreeMap::new(),
        }
    }

    /// Build from explicit (generator, component) pairs; every component must
    /// be homogeneous of the declared degree.
    pub fn from_components(
        algebra: &Arc<LieAlgebra>,
        degree: u32,
        comps: impl IntoIterator<Item = (usize, FormExpr)>,
    ) -> Result<Self, Error> {
        let mut out = LieForm::zero(algebra, degree);
        for (g, x) in comps {
            if let Some(d) = x.degree() {
                if d != degree {
                    return Err(Error::DegreeMismatch {
                        expected: degree,
                        got: d,
                    });
                }
            } else if !x.is_zero() {
                return Err(Error::DegreeMismatch {
                    expected: degree,
                    got: x.max_degree(),
                });
            }
            out.add_component(g, &x);
        }
        Ok(out)
    }

    fn add_component(&mut self, g: usize, x: &FormExpr) {
        if x.is_zero() {
            return;
        }
        let entry = self.components.entry(g).or_default();
        *entry += x;
        if entry.is_zero() {
            self.components.remove(&g);
        }
    }

    /// Translation-valued form Σ_a v(a) P_a.
    pub fn from_vector(algebra: &Arc<LieAlgebra>, degree: u32, v: impl Fn(u8) -> FormExpr) -> Result<Self, Error> {
        let comps: Vec<(usize, FormExpr)> = (0..algebra.dim())
            .map(|a| (algebra.p_index(a).expect("P generator"), v(a)))
            .collect();
        LieForm::from_components(algebra, degree, comps)
    }

    /// Lorentz-valued form ½ X^{ab} J_{ab}, given X^{ab} for a < b.
    pub fn from_matrix(algebra: &Arc<LieAlgebra>, degree: u32, m: impl Fn(u8, u8) -> FormExpr) -> Result<Self, Error> {
        let mut comps = Vec::new();
        for a in 0..algebra.dim() {
            for b in (a + 1)..algebra.dim() {
                comps.push((algebra.j_index(a, b).expect("J generator").0, m(a, b)));
            }
        }
        LieForm::from_components(algebra, degree, comps)
    }

    /// Spin connection ω = ½ ω^{ab} J_{ab}.
    pub fn spin_connection(algebra: &Arc<LieAlgebra>) -> Self {
        LieForm::from_matrix(algebra, 1, FormExpr::omega).expect("degree 1")
    }

    /// Vielbein e = e^a P_a.
    pub fn vielbein(algebra: &Arc<LieAlgebra>) -> Self {
        LieForm::from_vector(algebra, 1, FormExpr::vielbein).expect("degree 1")
    }

    /// Coset scalar φ = φ^a P_a.
    pub fn coset_scalar(algebra: &Arc<LieAlgebra>) -> Self {
        LieForm::from_vector(algebra, 0, FormExpr::phi).expect("degree 0")
    }

    /// A generic form with an independent user field per generator:
    /// `<prefix>J[a,b]` and `<prefix>P[a]`.
    pub fn generic(algebra: &Arc<LieAlgebra>, prefix: &str, degree: u8) -> Self {
        let fj = Field::user(&format!("{prefix}J"), degree);
        let fp = Field::user(&format!("{prefix}P"), degree);
        let comps = algebra.generators().iter().enumerate().map(|(i, g)| {
            let field = if algebra.is_lorentz(i) { fj.clone() } else { fp.clone() };
            (i, FormExpr::field(field, &g.indices))
        });
        LieForm::from_components(algebra, u32::from(degree), comps).expect("homogeneous")
    }

    pub fn algebra(&self) -> &Arc<LieAlgebra> {
        &self.algebra
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> impl Iterator<Item = (usize, &FormExpr)> {
        self.components.iter().map(|(k, v)| (*k, v))
    }

    pub fn component(&self, g: usize) -> Option<&FormExpr> {
        self.components.get(&g)
    }

    /// X^a of a translation-valued form.
    pub fn p_component(&self, a: u8) -> FormExpr {
        self.algebra
            .p_index(a)
            .and_then(|i| self.components.get(&i).cloned())
            .unwrap_or_default()
    }

    /// X^{ab} of a Lorentz-valued form, any index order.
    pub fn j_component(&self, a: u8, b: u8) -> FormExpr {
        match self.algebra.j_index(a, b) {
            Some((i, sign)) => self.components.get(&i).map(|x| x.scale(&q(sign))).unwrap_or_default(),
            None => FormExpr::zero(),
        }
    }

    /// Restriction to Lorentz (J) generators.
    pub fn lorentz_part(&self) -> LieForm {
        self.filter(|i| self.algebra.is_lorentz(i))
    }

    /// Restriction to translation (P) generators.
    pub fn translation_part(&self) -> LieForm {
        self.filter(|i| self.algebra.is_translation(i))
    }

    fn filter(&self, keep: impl Fn(usize) -> bool) -> LieForm {
        LieForm {
            algebra: Arc::clone(&self.algebra),
            degree: self.degree,
            components: self
                .components
                .iter()
                .filter(|(k, _)| keep(**k))
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
        }
    }

    fn check_algebra(&self, other: &LieForm) -> Result<(), Error> {
        if same_algebra(&self.algebra, &other.algebra) {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch(
                self.algebra.name().to_string(),
                other.algebra.name().to_string(),
            ))
        }
    }

    fn check_degree(&self, other: &LieForm) -> Result<(), Error> {
        if self.degree == other.degree || self.is_zero() || other.is_zero() {
            Ok(())
        } else {
            Err(Error::DegreeMismatch {
                expected: self.degree,
                got: other.degree,
            })
        }
    }

    pub fn try_add(&self, other: &LieForm) -> Result<LieForm, Error> {
        self.check_algebra(other)?;
        self.check_degree(other)?;
        let mut out = self.clone();
        if self.is_zero() {
            out.degree = other.degree;
        }
        for (g, x) in &other.components {
            out.add_component(*g, x);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &LieForm) -> Result<LieForm, Error> {
        self.try_add(&other.neg())
    }

    pub fn neg(&self) -> LieForm {
        self.scale(&-q(1))
    }

    pub fn scale(&self, c: &Q) -> LieForm {
        self.map(|x| x.scale(c))
    }

    pub fn mul_scalar(&self, c: &Scalar) -> LieForm {
        self.map(|x| x.mul_scalar(c))
    }

    /// Apply a degree-preserving map to every component.
    pub fn map(&self, f: impl Fn(&FormExpr) -> FormExpr) -> LieForm {
        let mut out = LieForm::zero(&self.algebra, self.degree);
        for (g, x) in &self.components {
            out.add_component(*g, &f(x));
        }
        out
    }

    pub fn ext_d(&self) -> LieForm {
        let mut out = LieForm::zero(&self.algebra, self.degree + 1);
        for (g, x) in &self.components {
            out.add_component(*g, &x.ext_d());
        }
        out
    }

    /// Component-wise wedge of a scalar-valued form on the left.
    pub fn left_wedge(&self, f: &FormExpr) -> LieForm {
        let deg = f.degree().unwrap_or(0);
        let mut out = LieForm::zero(&self.algebra, self.degree + deg);
        for (g, x) in &self.components {
            out.add_component(*g, &f.wedge(x));
        }
        out
    }

    pub fn eval_param(&self, p: Param, v: &Q) -> LieForm {
        self.map(|x| x.eval_param(p, v))
    }

    pub fn truncate_m2(&self, k: u32) -> LieForm {
        self.map(|x| x.truncate_m2(k))
    }

    /// True when every component lies along the given generators.
    pub fn supported_on(&self, gens: &[usize]) -> bool {
        self.components.keys().all(|g| gens.contains(g))
    }
}

/// Graded bracket [x, y] = Σ x^i ∧ y^j f_{ij}^k T_k.
pub fn bracket(x: &LieForm, y: &LieForm) -> Result<LieForm, Error> {
    x.check_algebra(y)?;
    let alg = &x.algebra;
    let mut acc: BTreeMap<usize, FormExpr> = BTreeMap::new();
    for (i, xi) in &x.components {
        for (j, yj) in &y.components {
            let structure = alg.bracket_gens(*i, *j);
            if structure.is_empty() {
                continue;
            }
            let prod = xi.wedge(yj);
            if prod.is_zero() {
                continue;
            }
            for (k, f) in structure {
                *acc.entry(*k).or_default() += &prod.mul_scalar(f);
            }
        }
    }
    let mut out = LieForm::zero(alg, x.degree + y.degree);
    for (k, v) in acc {
        out.add_component(k, &v);
    }
    Ok(out)
}

/// F = dA + ½[A, A].
pub fn curvature(a: &LieForm) -> Result<LieForm, Error> {
    if a.degree != 1 {
        return Err(Error::DegreeMismatch {
            expected: 1,
            got: a.degree,
        });
    }
    let half_sq = bracket(a, a)?.scale(&qr(1, 2));
    a.ext_d().try_add(&half_sq)
}

/// Dx = dx + [ω, x] for a Lorentz-valued 1-form ω.
pub fn cov_d(x: &LieForm, omega: &LieForm) -> Result<LieForm, Error> {
    if omega.degree != 1 && !omega.is_zero() {
        return Err(Error::DegreeMismatch {
            expected: 1,
            got: omega.degree,
        });
    }
    if !omega.components.keys().all(|&g| omega.algebra.is_lorentz(g)) {
        return Err(Error::Unsupported(
            "covariant derivative needs a Lorentz-valued connection".into(),
        ));
    }
    x.ext_d().try_add(&bracket(omega, x)?)
}

/// Symmetric invariant trace ⟨x_1 … x_r⟩ = Σ x_1^{i1} ∧ … ∧ x_r^{ir} g_{i1…ir}.
pub fn trace(args: &[&LieForm], tensor: &InvariantTensor) -> Result<FormExpr, Error> {
    if args.len() != tensor.rank() {
        return Err(Error::RankMismatch {
            expected: tensor.rank(),
            got: args.len(),
        });
    }
    let Some(first) = args.first() else {
        return Ok(FormExpr::zero());
    };
    for a in &args[1..] {
        first.check_algebra(a)?;
    }
    if args.iter().any(|a| a.is_zero()) {
        return Ok(FormExpr::zero());
    }
    let mut entries = tensor.ordered_entries(&first.algebra)?;
    entries.retain(|(slots, _)| slots.iter().zip(args).all(|(g, a)| a.components.contains_key(g)));
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out = FormExpr::zero();
    trace_walk(args, &entries, 0, &FormExpr::one(), &mut out);
    Ok(out)
}

// Walk the sorted entries as a trie so shared slot prefixes are multiplied once.
fn trace_walk(args: &[&LieForm], entries: &[(Vec<usize>, Q)], depth: usize, prefix: &FormExpr, out: &mut FormExpr) {
    if entries.is_empty() {
        return;
    }
    if depth == args.len() {
        for (_, v) in entries {
            *out += &prefix.scale(v);
        }
        return;
    }
    let mut start = 0;
    while start < entries.len() {
        let g = entries[start].0[depth];
        let end = start + entries[start..].iter().take_while(|e| e.0[depth] == g).count();
        let next = prefix.wedge(&args[depth].components[&g]);
        if !next.is_zero() {
            trace_walk(args, &entries[start..end], depth + 1, &next, out);
        }
        start = end;
    }
}

/// Direction of the adjoint action of the coset element g = e^{φ·P}.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Conjugation {
    /// g⁻¹ x g = e^{-ad φ} x.
    Inverse,
    /// g x g⁻¹ = e^{+ad φ} x.
    Direct,
}

/// Adjoint action of g = e^{φ·P} as an exponential series in ad_φ. The
/// series terminates for Poincaré; for a deformed algebra every term is
/// truncated at order `order` in m².
pub fn dress_adjoint(x: &LieForm, phi: &LieForm, order: u32, dir: Conjugation) -> Result<LieForm, Error> {
    x.check_algebra(phi)?;
    if phi.degree != 0 && !phi.is_zero() {
        return Err(Error::DegreeMismatch {
            expected: 0,
            got: phi.degree,
        });
    }
    let deformed = x.algebra.deformation().is_some();
    let trunc = |f: LieForm| if deformed { f.truncate_m2(order) } else { f };
    let sign = match dir {
        Conjugation::Inverse => -q(1),
        Conjugation::Direct => q(1),
    };
    let mut out = trunc(x.clone());
    let mut term = out.clone();
    let max_terms = 4 * order as usize + 8;
    for k in 1..=max_terms {
        term = trunc(bracket(phi, &term)?.scale(&(&sign / q(k as i64))));
        if term.is_zero() {
            return Ok(out);
        }
        out = out.try_add(&term)?;
    }
    if deformed {
        Ok(out)
    } else {
        Err(Error::Unsupported("adjoint series did not terminate".into()))
    }
}

impl std::fmt::Display for LieForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.components.is_empty() {
            return write!(f, "0");
        }
        for (i, (g, x)) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({x})*{}", self.algebra.generator(*g))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{build_poincare, GeneratorId};
    use crate::tensor::invariant_tensor;

    fn poincare(n: usize) -> Arc<LieAlgebra> {
        Arc::new(build_poincare(n).unwrap())
    }

    fn eta(a: u8) -> Q {
        if a == 0 {
            q(-1)
        } else {
            q(1)
        }
    }

    // ω^a_c ∧ X^{cb} by explicit index sum with η lowering.
    fn omega_mixed(a: u8, c: u8) -> FormExpr {
        FormExpr::omega(a, c).scale(&eta(c))
    }

    #[test]
    fn omega_phi_bracket_is_translation() {
        let alg = poincare(1);
        let w = LieForm::spin_connection(&alg);
        let phi = LieForm::coset_scalar(&alg);
        let br = bracket(&w, &phi).unwrap();
        assert_eq!(br.degree(), 1);
        assert!(br.lorentz_part().is_zero());
        for a in 0..3u8 {
            let expected: FormExpr = (0..3u8).map(|b| omega_mixed(a, b).wedge(&FormExpr::phi(b))).sum();
            assert_eq!(br.p_component(a), expected);
        }
    }

    #[test]
    fn translations_commute() {
        let alg = poincare(1);
        let e = LieForm::vielbein(&alg);
        assert!(bracket(&e, &e).unwrap().is_zero());
    }

    #[test]
    fn lorentz_curvature_matches_matrix_form() {
        for n in 1..=2 {
            let alg = poincare(n);
            let dim = alg.dim();
            let r = curvature(&LieForm::spin_connection(&alg)).unwrap();
            for a in 0..dim {
                for b in (a + 1)..dim {
                    let mut expected = FormExpr::omega(a, b).ext_d();
                    for c in 0..dim {
                        expected += &omega_mixed(a, c).wedge(&FormExpr::omega(c, b));
                    }
                    assert_eq!(r.j_component(a, b), expected, "R^{a}{b}");
                }
            }
        }
    }

    #[test]
    fn poincare_curvature_has_torsion() {
        let alg = poincare(1);
        let w = LieForm::spin_connection(&alg);
        let e = LieForm::vielbein(&alg);
        let f = curvature(&w.try_add(&e).unwrap()).unwrap();
        assert_eq!(f.lorentz_part(), curvature(&w).unwrap());
        for a in 0..3u8 {
            let mut torsion = FormExpr::vielbein(a).ext_d();
            for b in 0..3u8 {
                torsion += &omega_mixed(a, b).wedge(&FormExpr::vielbein(b));
            }
            assert_eq!(f.p_component(a), torsion);
        }
    }

    #[test]
    fn exact_translation_connection_is_flat() {
        let alg = poincare(1);
        let v = LieForm::coset_scalar(&alg).ext_d();
        assert!(curvature(&v).unwrap().is_zero());
    }

    #[test]
    fn covariant_derivative_of_phi() {
        let alg = poincare(1);
        let w = LieForm::spin_connection(&alg);
        let dphi = cov_d(&LieForm::coset_scalar(&alg), &w).unwrap();
        for a in 0..3u8 {
            let mut expected = FormExpr::phi(a).ext_d();
            for b in 0..3u8 {
                expected += &omega_mixed(a, b).wedge(&FormExpr::phi(b));
            }
            assert_eq!(dphi.p_component(a), expected);
        }
    }

    #[test]
    fn bianchi_identity() {
        for n in 1..=2 {
            let alg = poincare(n);
            let w = LieForm::spin_connection(&alg);
            let r = curvature(&w).unwrap();
            assert!(cov_d(&r, &w).unwrap().is_zero());
        }
    }

    #[test]
    fn cov_d_with_vanishing_connection_is_d() {
        let alg = poincare(1);
        let phi = LieForm::coset_scalar(&alg);
        assert_eq!(cov_d(&phi, &LieForm::zero(&alg, 1)).unwrap(), phi.ext_d());
    }

    #[test]
    fn trace_dphi_omega() {
        let alg = poincare(1);
        let t = invariant_tensor(1).unwrap();
        let dphi = LieForm::coset_scalar(&alg).ext_d();
        let w = LieForm::spin_connection(&alg);
        let tr = trace(&[&dphi, &w], &t).unwrap();
        // -½ ε_abc ω^{ab} dφ^c summed over all index values.
        let mut expected = FormExpr::zero();
        for a in 0..3u8 {
            for b in 0..3u8 {
                for c in 0..3u8 {
                    let eps = crate::tensor::epsilon(&[a, b, c]);
                    if eps != 0 {
                        expected += &FormExpr::omega(a, b)
                            .wedge(&FormExpr::phi(c).ext_d())
                            .scale(&qr(-eps, 2));
                    }
                }
            }
        }
        assert_eq!(tr, expected);
    }

    #[test]
    fn trace_of_all_lorentz_vanishes() {
        let alg = poincare(2);
        let t = invariant_tensor(2).unwrap();
        let w = LieForm::spin_connection(&alg);
        let r = curvature(&w).unwrap();
        assert!(trace(&[&w, &r, &r], &t).unwrap().is_zero());
    }

    #[test]
    fn trace_rank_mismatch() {
        let alg = poincare(1);
        let t = invariant_tensor(1).unwrap();
        let w = LieForm::spin_connection(&alg);
        assert!(matches!(
            trace(&[&w], &t),
            Err(Error::RankMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn algebra_mismatch_is_rejected() {
        let a = LieForm::vielbein(&poincare(1));
        let b = LieForm::vielbein(&poincare(2));
        assert!(matches!(bracket(&a, &b), Err(Error::AlgebraMismatch(..))));
    }

    #[test]
    fn dress_adjoint_of_omega_terminates() {
        let alg = poincare(1);
        let w = LieForm::spin_connection(&alg);
        let phi = LieForm::coset_scalar(&alg);
        let dressed = dress_adjoint(&w, &phi, 0, Conjugation::Inverse).unwrap();
        assert_eq!(dressed.lorentz_part(), w);
        for a in 0..3u8 {
            let expected: FormExpr = (0..3u8).map(|b| omega_mixed(a, b).wedge(&FormExpr::phi(b))).sum();
            assert_eq!(dressed.p_component(a), expected);
        }
        let zero_phi = LieForm::zero(&alg, 0);
        assert_eq!(dress_adjoint(&w, &zero_phi, 0, Conjugation::Inverse).unwrap(), w);
    }

    #[test]
    fn from_components_rejects_wrong_degree() {
        let alg = poincare(1);
        let g = alg.index_of(&GeneratorId::p(0)).unwrap();
        assert!(LieForm::from_components(&alg, 1, [(g, FormExpr::phi(0))]).is_err());
    }
}
