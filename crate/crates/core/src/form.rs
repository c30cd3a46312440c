//! Graded-commutative algebra of component differential forms.
//!
//! A [`FormExpr`] is a sparse sum of scalar coefficients times canonically
//! ordered wedge words of [`Atom`]s. Canonical order is the derived `Ord` on
//! atoms: (field class, index tuple, d-flag). Reordering applies the
//! (-1)^{pq} sign and any word with a repeated odd atom is dropped.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use smallvec::SmallVec;

use crate::scalar::{Bound, Param, Scalar, Q};
use crate::Error;

/// Field symbols. Variant order is the canonical class rank.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Field {
    /// Spin connection ω^{ab}, stored with a < b.
    Omega,
    /// Vielbein e^a.
    Vielbein,
    /// Coset scalar φ^a.
    Phi,
    /// User-declared field with a fixed form degree.
    User { name: Arc<str>, degree: u8 },
}

impl Field {
    pub fn user(name: &str, degree: u8) -> Self {
        Field::User {
            name: Arc::from(name),
            degree,
        }
    }

    pub fn base_degree(&self) -> u8 {
        match self {
            Field::Omega | Field::Vielbein => 1,
            Field::Phi => 0,
            Field::User { degree, .. } => *degree,
        }
    }

    /// Surface-syntax name used by the parser and emitters.
    pub fn name(&self) -> &str {
        match self {
            Field::Omega => "w",
            Field::Vielbein => "e",
            Field::Phi => "phi",
            Field::User { name, .. } => name,
        }
    }

    /// Number of indices the field carries (`None` for user fields).
    pub fn arity(&self) -> Option<usize> {
        match self {
            Field::Omega => Some(2),
            Field::Vielbein | Field::Phi => Some(1),
            Field::User { .. } => None,
        }
    }
}

pub type Indices = SmallVec<[u8; 2]>;

/// An atomic form: a field component or its exterior derivative.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub field: Field,
    pub indices: Indices,
    pub d: bool,
}

impl Atom {
    pub fn new(field: Field, indices: &[u8]) -> Self {
        Atom {
            field,
            indices: Indices::from_slice(indices),
            d: false,
        }
    }

    pub fn degree(&self) -> u8 {
        self.field.base_degree() + u8::from(self.d)
    }

    pub fn is_odd(&self) -> bool {
        self.degree() % 2 == 1
    }

    pub fn differentiated(&self) -> Option<Atom> {
        if self.d {
            return None;
        }
        Some(Atom {
            field: self.field.clone(),
            indices: self.indices.clone(),
            d: true,
        })
    }

    /// The undifferentiated atom this one derives from.
    pub fn base(&self) -> Atom {
        Atom {
            field: self.field.clone(),
            indices: self.indices.clone(),
            d: false,
        }
    }
}

/// A canonically ordered wedge word.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(SmallVec<[Atom; 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|a| u32::from(a.degree())).sum()
    }

    /// Sort a raw word into canonical order. Returns `None` when the word
    /// vanishes, otherwise the sign picked up by the reordering.
    pub fn canonicalize(mut atoms: SmallVec<[Atom; 4]>) -> Option<(Monomial, bool)> {
        let mut negative = false;
        // Insertion sort; adjacent swaps of two odd atoms flip the sign.
        for i in 1..atoms.len() {
            let mut j = i;
            while j > 0 && atoms[j - 1] > atoms[j] {
                if atoms[j - 1].is_odd() && atoms[j].is_odd() {
                    negative = !negative;
                }
                atoms.swap(j - 1, j);
                j -= 1;
            }
        }
        if atoms.windows(2).any(|w| w[0] == w[1] && w[0].is_odd()) {
            return None;
        }
        Some((Monomial(atoms), negative))
    }

    pub fn wedge(&self, other: &Monomial) -> Option<(Monomial, bool)> {
        let mut atoms = self.0.clone();
        atoms.extend(other.0.iter().cloned());
        Monomial::canonicalize(atoms)
    }
}

/// Sparse exact linear combination of wedge monomials.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FormExpr {
    terms: BTreeMap<Monomial, Scalar>,
}

impl FormExpr {
    pub fn zero() -> Self {
        FormExpr::default()
    }

    pub fn one() -> Self {
        FormExpr::scalar(Scalar::one())
    }

    pub fn scalar(c: Scalar) -> Self {
        let mut out = FormExpr::zero();
        out.add_term(Monomial::one(), c);
        out
    }

    pub fn atom(a: Atom) -> Self {
        let mut out = FormExpr::zero();
        out.add_term(Monomial(SmallVec::from_elem(a, 1)), Scalar::one());
        out
    }

    pub fn field(field: Field, indices: &[u8]) -> Self {
        FormExpr::atom(Atom::new(field, indices))
    }

    /// Build from a raw (unsorted) word of atoms.
    pub fn word(atoms: &[Atom], c: Scalar) -> Self {
        let mut out = FormExpr::zero();
        if let Some((m, neg)) = Monomial::canonicalize(atoms.iter().cloned().collect()) {
            out.add_term(m, if neg { -c } else { c });
        }
        out
    }

    pub fn omega(a: u8, b: u8) -> Self {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => FormExpr::field(Field::Omega, &[a, b]),
            std::cmp::Ordering::Greater => -&FormExpr::field(Field::Omega, &[b, a]),
            std::cmp::Ordering::Equal => FormExpr::zero(),
        }
    }

    pub fn vielbein(a: u8) -> Self {
        FormExpr::field(Field::Vielbein, &[a])
    }

    pub fn phi(a: u8) -> Self {
        FormExpr::field(Field::Phi, &[a])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Degree if homogeneous; `None` for zero or mixed-degree sums.
    pub fn degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(Monomial::degree);
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.degree().is_some()
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.terms.keys().flat_map(|m| m.atoms().iter())
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return FormExpr::zero();
        }
        FormExpr {
            terms: self.terms.iter().map(|(m, s)| (m.clone(), s.scale(c))).collect(),
        }
    }

    pub fn mul_scalar(&self, c: &Scalar) -> Self {
        let mut out = FormExpr::zero();
        for (m, s) in &self.terms {
            out.add_term(m.clone(), s * c);
        }
        out
    }

    pub fn map_coeffs(&self, f: impl Fn(&Scalar) -> Scalar) -> Self {
        let mut out = FormExpr::zero();
        for (m, s) in &self.terms {
            out.add_term(m.clone(), f(s));
        }
        out
    }

    /// Graded-commutative product.
    pub fn wedge(&self, other: &FormExpr) -> FormExpr {
        let mut out = FormExpr::zero();
        if self.is_zero() || other.is_zero() {
            return out;
        }
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((m, neg)) = ma.wedge(mb) {
                    let c = ca * cb;
                    out.add_term(m, if neg { -c } else { c });
                }
            }
        }
        out
    }

    /// Exterior derivative via the graded Leibniz rule; d-atoms are closed.
    pub fn ext_d(&self) -> FormExpr {
        let mut out = FormExpr::zero();
        for (m, c) in &self.terms {
            let atoms = m.atoms();
            let mut left_degree = 0u32;
            for (i, a) in atoms.iter().enumerate() {
                if let Some(da) = a.differentiated() {
                    let mut word: SmallVec<[Atom; 4]> = atoms.iter().cloned().collect();
                    word[i] = da;
                    if let Some((mm, neg)) = Monomial::canonicalize(word) {
                        let flip = neg ^ (left_degree % 2 == 1);
                        out.add_term(mm, if flip { -c } else { c.clone() });
                    }
                }
                left_degree += u32::from(a.degree());
            }
        }
        out
    }

    pub fn integrate_param(&self, p: Param, lower: &Bound, upper: &Bound) -> Result<FormExpr, Error> {
        if let Bound::Param(b) = lower {
            if *b == p {
                return Err(Error::BadIntegral(format!("lower bound depends on {}", p.name())));
            }
        }
        if let Bound::Param(b) = upper {
            if *b == p {
                return Err(Error::BadIntegral(format!("upper bound depends on {}", p.name())));
            }
        }
        Ok(self.map_coeffs(|c| c.integrate(p, lower, upper)))
    }

    /// ∫₀¹ dp.
    pub fn integrate_unit(&self, p: Param) -> FormExpr {
        self.map_coeffs(|c| c.integrate(p, &Bound::zero(), &Bound::one()))
    }

    pub fn subst_param(&self, p: Param, value: &Scalar) -> FormExpr {
        self.map_coeffs(|c| c.subst(p, value))
    }

    pub fn eval_param(&self, p: Param, value: &Q) -> FormExpr {
        self.subst_param(p, &Scalar::from(value.clone()))
    }

    pub fn derivative(&self, p: Param) -> FormExpr {
        self.map_coeffs(|c| c.derivative(p))
    }

    pub fn truncate_m2(&self, k: u32) -> FormExpr {
        self.map_coeffs(|c| c.truncate_m2(k))
    }

    pub fn depends_on(&self, p: Param) -> bool {
        self.terms.values().any(|c| c.depends_on(p))
    }

    /// Apply `f` to every atom-substitution: each atom is replaced by the
    /// expression `f(atom)` and products are re-expanded.
    pub fn substitute(&self, f: &impl Fn(&Atom) -> FormExpr) -> FormExpr {
        let mut out = FormExpr::zero();
        for (m, c) in &self.terms {
            let mut acc = FormExpr::scalar(c.clone());
            for a in m.atoms() {
                acc = acc.wedge(&f(a));
                if acc.is_zero() {
                    break;
                }
            }
            out += &acc;
        }
        out
    }

    /// If `self == c * other` for a rational `c`, return `c`.
    pub fn ratio_to(&self, other: &FormExpr) -> Option<Q> {
        let (m, c_other) = other.terms.iter().next()?;
        let c_self = self.terms.get(m)?;
        let (a, b) = (c_self.as_const()?, c_other.as_const()?);
        if b.is_zero() {
            return None;
        }
        let r = a / b;
        (self - &other.scale(&r)).is_zero().then_some(r)
    }
}

impl std::ops::AddAssign<&FormExpr> for FormExpr {
    fn add_assign(&mut self, rhs: &FormExpr) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl std::ops::SubAssign<&FormExpr> for FormExpr {
    fn sub_assign(&mut self, rhs: &FormExpr) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c);
        }
    }
}

impl std::ops::Add for &FormExpr {
    type Output = FormExpr;
    fn add(self, rhs: &FormExpr) -> FormExpr {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl std::ops::Sub for &FormExpr {
    type Output = FormExpr;
    fn sub(self, rhs: &FormExpr) -> FormExpr {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl std::ops::Neg for &FormExpr {
    type Output = FormExpr;
    fn neg(self) -> FormExpr {
        self.scale(&-Q::one())
    }
}

impl std::ops::Add for FormExpr {
    type Output = FormExpr;
    fn add(mut self, rhs: FormExpr) -> FormExpr {
        self += &rhs;
        self
    }
}

impl std::ops::Sub for FormExpr {
    type Output = FormExpr;
    fn sub(mut self, rhs: FormExpr) -> FormExpr {
        self -= &rhs;
        self
    }
}

impl std::iter::Sum for FormExpr {
    fn sum<I: Iterator<Item = FormExpr>>(iter: I) -> FormExpr {
        let mut acc = FormExpr::zero();
        for x in iter {
            acc += &x;
        }
        acc
    }
}

pub fn wedge(a: &FormExpr, b: &FormExpr) -> FormExpr {
    a.wedge(b)
}

pub fn ext_d(x: &FormExpr) -> FormExpr {
    x.ext_d()
}

pub fn integrate_param(x: &FormExpr, p: Param, lower: &Bound, upper: &Bound) -> Result<FormExpr, Error> {
    x.integrate_param(p, lower, upper)
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx = self.indices.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",");
        let body = match &self.field {
            Field::User { name, degree } => format!("{name}<{degree}>[{idx}]"),
            other => format!("{}[{idx}]", other.name()),
        };
        if self.d {
            write!(f, "d({body})")
        } else {
            write!(f, "{body}")
        }
    }
}

impl fmt::Display for FormExpr {
    /// Text form in the surface grammar; re-parses to the same expression.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let word = m.atoms().iter().map(|a| a.to_string()).collect::<Vec<_>>().join("^");
            let mut parts = c.terms();
            let (neg, mag) = match (parts.next(), parts.next()) {
                (Some((_, v)), None) if v < &Q::zero() => (true, -c),
                _ => (false, c.clone()),
            };
            if i > 0 {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            } else if neg {
                write!(f, "-")?;
            }
            let single = mag.terms().count() == 1;
            let coeff = if single { mag.to_string() } else { format!("({mag})") };
            if word.is_empty() {
                write!(f, "{coeff}")?;
            } else if mag.as_const().is_some_and(|v| v.is_one()) {
                write!(f, "{word}")?;
            } else {
                write!(f, "{coeff}*{word}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qr};

    fn e(a: u8) -> FormExpr {
        FormExpr::vielbein(a)
    }

    fn dw(a: u8, b: u8) -> FormExpr {
        FormExpr::omega(a, b).ext_d()
    }

    #[test]
    fn odd_square_vanishes() {
        assert!(e(0).wedge(&e(0)).is_zero());
    }

    #[test]
    fn degree_one_swap_flips_sign() {
        assert_eq!(e(0).wedge(&e(1)), -&e(1).wedge(&e(0)));
    }

    #[test]
    fn even_odd_swap_keeps_sign() {
        assert_eq!(dw(0, 1).wedge(&e(2)), e(2).wedge(&dw(0, 1)));
    }

    #[test]
    fn d_of_phi_is_d_atom() {
        let d = FormExpr::phi(0).ext_d();
        let mut a = Atom::new(Field::Phi, &[0]);
        a.d = true;
        assert_eq!(d, FormExpr::atom(a));
    }

    #[test]
    fn leibniz_with_degree_one_sign() {
        let x = FormExpr::omega(0, 1).wedge(&e(2));
        let expected = &dw(0, 1).wedge(&e(2)) - &FormExpr::omega(0, 1).wedge(&e(2).ext_d());
        assert_eq!(x.ext_d(), expected);
    }

    #[test]
    fn omega_antisymmetry_at_construction() {
        assert_eq!(FormExpr::omega(2, 0), -&FormExpr::omega(0, 2));
        assert!(FormExpr::omega(1, 1).is_zero());
    }

    #[test]
    fn repeated_even_atoms_survive() {
        let p = FormExpr::phi(0);
        let sq = p.wedge(&p);
        assert_eq!(sq.len(), 1);
        assert_eq!(sq.degree(), Some(0));
        let dd = dw(0, 1).wedge(&dw(0, 1));
        assert_eq!(dd.degree(), Some(4));
    }

    #[test]
    fn mixed_degree_sum_is_flagged() {
        let x = &e(0) + &FormExpr::phi(1);
        assert!(!x.is_homogeneous());
        assert_eq!(x.degree(), None);
    }

    #[test]
    fn ratio_detection() {
        let x = &e(0).wedge(&e(1)) + &FormExpr::phi(1);
        assert_eq!(x.scale(&qr(-3, 2)).ratio_to(&x), Some(qr(-3, 2)));
        assert_eq!(x.ratio_to(&e(0)), None);
        assert_eq!(x.ratio_to(&x), Some(q(1)));
    }

    #[test]
    fn integrate_rejects_self_bound() {
        let x = FormExpr::scalar(Scalar::param(Param::T));
        assert!(x
            .integrate_param(Param::T, &Bound::zero(), &Bound::Param(Param::T))
            .is_err());
    }
}
