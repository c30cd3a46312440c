//! Scalar tower: exact rationals, polynomials in the homotopy parameters
//! `t`, `s`, and truncated power series in the deformation parameter `m²`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational number.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Formal scalar parameters that may appear in coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Param {
    T,
    S,
    M2,
}

impl Param {
    pub fn name(self) -> &'static str {
        match self {
            Param::T => "t",
            Param::S => "s",
            Param::M2 => "m2",
        }
    }
}

/// Exponent vector over (t, s, m²).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParamExp {
    pub t: u16,
    pub s: u16,
    pub m2: u16,
}

impl ParamExp {
    pub fn get(&self, p: Param) -> u16 {
        match p {
            Param::T => self.t,
            Param::S => self.s,
            Param::M2 => self.m2,
        }
    }

    pub fn with(mut self, p: Param, k: u16) -> Self {
        match p {
            Param::T => self.t = k,
            Param::S => self.s = k,
            Param::M2 => self.m2 = k,
        }
        self
    }

    fn add(self, o: ParamExp) -> ParamExp {
        ParamExp {
            t: self.t + o.t,
            s: self.s + o.s,
            m2: self.m2 + o.m2,
        }
    }

    pub fn is_const(&self) -> bool {
        *self == ParamExp::default()
    }
}

/// Integration bound: a rational constant or another parameter.
#[derive(Clone, Debug, PartialEq)]
pub enum Bound {
    Const(Q),
    Param(Param),
}

impl Bound {
    pub fn zero() -> Self {
        Bound::Const(Q::zero())
    }

    pub fn one() -> Self {
        Bound::Const(Q::one())
    }

    fn as_scalar(&self) -> Scalar {
        match self {
            Bound::Const(c) => Scalar::from(c.clone()),
            Bound::Param(p) => Scalar::param(*p),
        }
    }
}

/// A polynomial in (t, s, m²) with exact rational coefficients.
///
/// When `m2_order` is `Some(k)`, every power of m² above `k` has been
/// dropped and the value is only meaningful through order `m^{2k}`.
#[derive(Clone, Debug, Default)]
pub struct Scalar {
    terms: BTreeMap<ParamExp, Q>,
    m2_order: Option<u32>,
}

// Equality is on the stored polynomial; the truncation tag is bookkeeping.
impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl Eq for Scalar {}

impl std::hash::Hash for Scalar {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.terms.hash(state);
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn one() -> Self {
        Scalar::from(Q::one())
    }

    pub fn int(n: i64) -> Self {
        Scalar::from(q(n))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Scalar::from(qr(n, d))
    }

    pub fn param(p: Param) -> Self {
        Scalar::monomial(ParamExp::default().with(p, 1), Q::one())
    }

    pub fn monomial(exp: ParamExp, c: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Scalar { terms, m2_order: None }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The rational value if the scalar carries no parameter dependence.
    pub fn as_const(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => self
                .terms
                .iter()
                .next()
                .filter(|(e, _)| e.is_const())
                .map(|(_, c)| c.clone()),
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ParamExp, &Q)> {
        self.terms.iter()
    }

    pub fn m2_order(&self) -> Option<u32> {
        self.m2_order
    }

    pub fn depends_on(&self, p: Param) -> bool {
        self.terms.keys().any(|e| e.get(p) > 0)
    }

    pub fn degree_in(&self, p: Param) -> u16 {
        self.terms.keys().map(|e| e.get(p)).max().unwrap_or(0)
    }

    /// Drop powers of m² above `k` and record the truncation order.
    pub fn truncate_m2(&self, k: u32) -> Self {
        let order = Some(self.m2_order.map_or(k, |o| o.min(k)));
        let mut out = Scalar {
            terms: self.terms.clone(),
            m2_order: order,
        };
        out.apply_truncation();
        out
    }

    fn apply_truncation(&mut self) {
        if let Some(k) = self.m2_order {
            self.terms.retain(|e, _| u32::from(e.m2) <= k);
        }
    }

    fn merge_order(a: Option<u32>, b: Option<u32>) -> Option<u32> {
        match (a, b) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, None) => x,
            (None, y) => y,
        }
    }

    fn add_term(&mut self, e: ParamExp, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Scalar {
                terms: BTreeMap::new(),
                m2_order: self.m2_order,
            };
        }
        Scalar {
            terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect(),
            m2_order: self.m2_order,
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Scalar::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Substitute `p := value` everywhere.
    pub fn subst(&self, p: Param, value: &Scalar) -> Self {
        let mut out = Scalar {
            terms: BTreeMap::new(),
            m2_order: self.m2_order,
        };
        let mut powers: Vec<Scalar> = vec![Scalar::one()];
        for (e, c) in &self.terms {
            let k = usize::from(e.get(p));
            while powers.len() <= k {
                let next = powers.last().unwrap() * value;
                powers.push(next);
            }
            let rest = Scalar::monomial(e.with(p, 0), c.clone());
            out += &(&rest * &powers[k]);
        }
        out.m2_order = Scalar::merge_order(out.m2_order, self.m2_order);
        out.apply_truncation();
        out
    }

    pub fn eval_at(&self, p: Param, value: &Q) -> Self {
        self.subst(p, &Scalar::from(value.clone()))
    }

    pub fn derivative(&self, p: Param) -> Self {
        let mut out = Scalar {
            terms: BTreeMap::new(),
            m2_order: self.m2_order,
        };
        for (e, c) in &self.terms {
            let k = e.get(p);
            if k > 0 {
                out.add_term(e.with(p, k - 1), c * q(i64::from(k)));
            }
        }
        out
    }

    /// Exact ∫_{lower}^{upper} dp of the polynomial.
    pub fn integrate(&self, p: Param, lower: &Bound, upper: &Bound) -> Self {
        let mut anti = Scalar {
            terms: BTreeMap::new(),
            m2_order: self.m2_order,
        };
        for (e, c) in &self.terms {
            let k = e.get(p);
            anti.add_term(e.with(p, k + 1), c / q(i64::from(k) + 1));
        }
        &anti.subst(p, &upper.as_scalar()) - &anti.subst(p, &lower.as_scalar())
    }

    /// Evaluate with every parameter bound to a rational value.
    pub fn eval_all(&self, t: &Q, s: &Q, m2: &Q) -> Q {
        let mut acc = Q::zero();
        for (e, c) in &self.terms {
            let mut v = c.clone();
            v *= pow_q(t, e.t);
            v *= pow_q(s, e.s);
            v *= pow_q(m2, e.m2);
            acc += v;
        }
        acc
    }
}

fn pow_q(x: &Q, k: u16) -> Q {
    let mut acc = Q::one();
    for _ in 0..k {
        acc *= x;
    }
    acc
}

impl From<Q> for Scalar {
    fn from(c: Q) -> Self {
        Scalar::monomial(ParamExp::default(), c)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, c.clone());
        }
        self.m2_order = Scalar::merge_order(self.m2_order, rhs.m2_order);
        self.apply_truncation();
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, -c.clone());
        }
        self.m2_order = Scalar::merge_order(self.m2_order, rhs.m2_order);
        self.apply_truncation();
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect(),
            m2_order: self.m2_order,
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        let order = Scalar::merge_order(self.m2_order, rhs.m2_order);
        let mut out = Scalar {
            terms: BTreeMap::new(),
            m2_order: order,
        };
        // Fast path: constant times anything.
        if let (1, Some(c)) = (self.terms.len(), self.as_const()) {
            let mut r = rhs.scale(&c);
            r.m2_order = order;
            r.apply_truncation();
            return r;
        }
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e = ea.add(*eb);
                if order.is_some_and(|k| u32::from(e.m2) > k) {
                    continue;
                }
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

pub(crate) fn fmt_q(c: &Q) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn fmt_monomial(e: &ParamExp) -> Vec<&'static str> {
    let mut v = Vec::new();
    for (p, k) in [(Param::T, e.t), (Param::S, e.s), (Param::M2, e.m2)] {
        for _ in 0..k {
            v.push(p.name());
        }
    }
    v
}

impl fmt::Display for Scalar {
    /// Text form accepted by the expression parser, e.g. `1/2*t - t*t`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let vars = fmt_monomial(e);
            if vars.is_empty() {
                write!(f, "{}", fmt_q(&mag))?;
            } else {
                if !mag.is_one() {
                    write!(f, "{}*", fmt_q(&mag))?;
                }
                write!(f, "{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t() -> Scalar {
        Scalar::param(Param::T)
    }

    #[test]
    fn integrate_t2_one_minus_t_squared() {
        // Antiderivative oracle: t^2 (1-t)^2 = t^2 - 2t^3 + t^4,
        // F(t) = t^3/3 - t^4/2 + t^5/5, F(1) - F(0) = 1/30.
        let one_minus_t = &Scalar::one() - &t();
        let integrand = &t().pow(2) * &one_minus_t.pow(2);
        let v = integrand.integrate(Param::T, &Bound::zero(), &Bound::one());
        assert_eq!(v.as_const(), Some(qr(1, 30)));
    }

    #[test]
    fn beta_integral_wz_coefficient_n1() {
        // (n+1)(-1)^n ∫ t^n (1-t)^n at n = 1.
        let one_minus_t = &Scalar::one() - &t();
        let integrand = (&t() * &one_minus_t).scale(&q(-2));
        let v = integrand.integrate(Param::T, &Bound::zero(), &Bound::one());
        assert_eq!(v.as_const(), Some(qr(-1, 3)));
    }

    #[test]
    fn nested_integral_upper_bound_is_outer_param() {
        let inner = Scalar::one().integrate(Param::S, &Bound::zero(), &Bound::Param(Param::T));
        assert_eq!(inner, t());
        let outer = inner.integrate(Param::T, &Bound::zero(), &Bound::one());
        assert_eq!(outer.as_const(), Some(qr(1, 2)));
    }

    #[test]
    fn truncation_order_of_product_is_min() {
        let m2 = Scalar::param(Param::M2);
        let a = (&Scalar::one() + &m2).truncate_m2(3);
        let b = (&Scalar::one() + &m2).truncate_m2(1);
        let p = &a * &b;
        assert_eq!(p.m2_order(), Some(1));
        assert_eq!(p.degree_in(Param::M2), 1);
        assert_eq!(p, (&Scalar::one() + &m2.scale(&q(2))).truncate_m2(1));
    }

    #[test]
    fn derivative_and_subst() {
        let p = &t().pow(3) + &t().scale(&q(2));
        assert_eq!(p.derivative(Param::T), &t().pow(2).scale(&q(3)) + &Scalar::int(2));
        assert_eq!(p.eval_at(Param::T, &q(2)).as_const(), Some(q(12)));
    }

    #[test]
    fn display_is_parser_friendly() {
        let p = &t().pow(2).scale(&qr(-3, 2)) + &Scalar::ratio(1, 2);
        assert_eq!(p.to_string(), "1/2 - 3/2*t*t");
    }
}
