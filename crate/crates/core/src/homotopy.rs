//! Homotopy families, the derivation l_t acting on trace words, the
//! homotopy operator k₀₁ and the Chern–Simons / transgression builders.
//!
//! Words are kept structural (slots tagged A_t, F_t, ∂_tA_t, …) so the
//! derivation can act before anything is expanded into components.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::coset::{dress, left_maurer_cartan, CosetElement};
use crate::form::FormExpr;
use crate::lieform::{bracket, curvature, trace, LieForm};
use crate::scalar::{q, qr, Bound, Param, Scalar, Q};
use crate::tensor::{invariant_tensor, InvariantTensor};
use crate::Error;

/// Straight-line family A_t = A₀ + t(A₁ − A₀) with its curvature.
#[derive(Clone, Debug)]
pub struct HomotopyFamily {
    a0: LieForm,
    a1: LieForm,
    theta: LieForm,
    a_t: LieForm,
    f_t: LieForm,
    tensor: InvariantTensor,
}

impl HomotopyFamily {
    pub fn new(a1: &LieForm, a0: &LieForm, tensor: &InvariantTensor) -> Result<Self, Error> {
        for a in [a0, a1] {
            if a.degree() != 1 && !a.is_zero() {
                return Err(Error::DegreeMismatch {
                    expected: 1,
                    got: a.degree(),
                });
            }
        }
        let theta = a1.try_sub(a0)?;
        let a_t = a0.try_add(&theta.mul_scalar(&Scalar::param(Param::T)))?;
        let a_t = if a_t.is_zero() {
            LieForm::zero(a0.algebra(), 1)
        } else {
            a_t
        };
        let f_t = curvature(&a_t)?;
        Ok(HomotopyFamily {
            a0: a0.clone(),
            a1: a1.clone(),
            theta,
            a_t,
            f_t,
            tensor: tensor.clone(),
        })
    }

    /// The scaling family A_t = tA.
    pub fn scaling(a: &LieForm, tensor: &InvariantTensor) -> Result<Self, Error> {
        HomotopyFamily::new(a, &LieForm::zero(a.algebra(), 1), tensor)
    }

    /// A t-independent family A_t = A (used to evaluate words at a point).
    pub fn constant(a: &LieForm, tensor: &InvariantTensor) -> Result<Self, Error> {
        HomotopyFamily::new(a, a, tensor)
    }

    pub fn a0(&self) -> &LieForm {
        &self.a0
    }

    pub fn a1(&self) -> &LieForm {
        &self.a1
    }

    pub fn theta(&self) -> &LieForm {
        &self.theta
    }

    pub fn connection(&self) -> &LieForm {
        &self.a_t
    }

    pub fn curvature(&self) -> &LieForm {
        &self.f_t
    }

    pub fn tensor(&self) -> &InvariantTensor {
        &self.tensor
    }

    /// Family members at fixed t.
    pub fn at(&self, t: &Q) -> (LieForm, LieForm) {
        (self.a_t.eval_param(Param::T, t), self.f_t.eval_param(Param::T, t))
    }
}

/// One argument of a trace word.
#[derive(Clone, Debug, PartialEq)]
pub enum Slot {
    /// A_t
    A,
    /// F_t
    F,
    /// ∂_t A_t
    Dot,
    /// d ∂_t A_t
    DDot,
    /// A family-independent Lie-valued form.
    Fixed(LieForm),
    /// Graded bracket of two slots.
    Bracket(Box<Slot>, Box<Slot>),
}

impl Slot {
    pub fn bracket(x: Slot, y: Slot) -> Slot {
        Slot::Bracket(Box::new(x), Box::new(y))
    }

    pub fn degree(&self) -> u32 {
        match self {
            Slot::A | Slot::Dot => 1,
            Slot::F | Slot::DDot => 2,
            Slot::Fixed(x) => x.degree(),
            Slot::Bracket(x, y) => x.degree() + y.degree(),
        }
    }

    // ι: A ↦ 0, F ↦ ∂_tA_t, extended as an odd derivation.
    fn iota(&self) -> Vec<(i64, Slot)> {
        match self {
            Slot::F => vec![(1, Slot::Dot)],
            Slot::A | Slot::Dot | Slot::DDot | Slot::Fixed(_) => Vec::new(),
            Slot::Bracket(x, y) => {
                let mut out: Vec<(i64, Slot)> = x
                    .iota()
                    .into_iter()
                    .map(|(s, x2)| (s, Slot::bracket(x2, (**y).clone())))
                    .collect();
                let sy = sign_of(x.degree());
                out.extend(
                    y.iota()
                        .into_iter()
                        .map(|(s, y2)| (s * sy, Slot::bracket((**x).clone(), y2))),
                );
                out
            }
        }
    }

    // Structural exterior derivative: dA = F − ½[A,A], dF = −[A,F].
    fn d(&self) -> Vec<(Q, Slot)> {
        match self {
            Slot::A => vec![(q(1), Slot::F), (qr(-1, 2), Slot::bracket(Slot::A, Slot::A))],
            Slot::F => vec![(q(-1), Slot::bracket(Slot::A, Slot::F))],
            Slot::Dot => vec![(q(1), Slot::DDot)],
            Slot::DDot => Vec::new(),
            Slot::Fixed(x) => {
                let dx = x.ext_d();
                if dx.is_zero() {
                    Vec::new()
                } else {
                    vec![(q(1), Slot::Fixed(dx))]
                }
            }
            Slot::Bracket(x, y) => {
                let mut out: Vec<(Q, Slot)> = x
                    .d()
                    .into_iter()
                    .map(|(c, x2)| (c, Slot::bracket(x2, (**y).clone())))
                    .collect();
                let sy = q(sign_of(x.degree()));
                out.extend(
                    y.d()
                        .into_iter()
                        .map(|(c, y2)| (c * &sy, Slot::bracket((**x).clone(), y2))),
                );
                out
            }
        }
    }

    fn expand(&self, fam: &HomotopyFamily) -> Result<LieForm, Error> {
        Ok(match self {
            Slot::A => fam.a_t.clone(),
            Slot::F => fam.f_t.clone(),
            Slot::Dot => fam.theta.clone(),
            Slot::DDot => fam.theta.ext_d(),
            Slot::Fixed(x) => x.clone(),
            Slot::Bracket(x, y) => bracket(&x.expand(fam)?, &y.expand(fam)?)?,
        })
    }
}

fn sign_of(degree: u32) -> i64 {
    if degree.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::A => write!(f, "A_t"),
            Slot::F => write!(f, "F_t"),
            Slot::Dot => write!(f, "θ"),
            Slot::DDot => write!(f, "dθ"),
            Slot::Fixed(x) => write!(f, "{{{x}}}"),
            Slot::Bracket(x, y) => write!(f, "[{x}, {y}]"),
        }
    }
}

/// coeff · ⟨slot_1 … slot_r⟩, optionally carrying the dt marker.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceWord {
    pub coeff: Scalar,
    pub slots: Vec<Slot>,
    pub dt: bool,
}

impl TraceWord {
    pub fn new(coeff: Scalar, slots: Vec<Slot>) -> Self {
        TraceWord {
            coeff,
            slots,
            dt: false,
        }
    }

    pub fn degree(&self) -> u32 {
        self.slots.iter().map(Slot::degree).sum()
    }

    /// Expand into components with the family's fields and trace.
    pub fn expand(&self, fam: &HomotopyFamily) -> Result<FormExpr, Error> {
        self.expand_cached(fam, &mut HashMap::new())
    }

    fn expand_cached(&self, fam: &HomotopyFamily, cache: &mut HashMap<String, LieForm>) -> Result<FormExpr, Error> {
        if self.slots.len() != fam.tensor.rank() {
            return Err(Error::RankMismatch {
                expected: fam.tensor.rank(),
                got: self.slots.len(),
            });
        }
        let mut forms = Vec::with_capacity(self.slots.len());
        for s in &self.slots {
            let key = s.to_string();
            if !cache.contains_key(&key) {
                let v = s.expand(fam)?;
                cache.insert(key.clone(), v);
            }
            forms.push(cache[&key].clone());
        }
        let refs: Vec<&LieForm> = forms.iter().collect();
        Ok(trace(&refs, &fam.tensor)?.mul_scalar(&self.coeff))
    }
}

impl fmt::Display for TraceWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.coeff)?;
        if self.dt {
            write!(f, " dt")?;
        }
        write!(f, " <")?;
        for (i, s) in self.slots.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, ">")
    }
}

/// Apply l_t = dt·ι to a sum of words. Words already carrying dt vanish.
pub fn lt_apply(words: &[TraceWord]) -> Vec<TraceWord> {
    let mut out = Vec::new();
    for w in words.iter().filter(|w| !w.dt) {
        let mut left = 0;
        for (i, slot) in w.slots.iter().enumerate() {
            for (s, replaced) in slot.iota() {
                let mut slots = w.slots.clone();
                slots[i] = replaced;
                out.push(TraceWord {
                    coeff: w.coeff.scale(&q(s * sign_of(left))),
                    slots,
                    dt: true,
                });
            }
            left += slot.degree();
        }
    }
    out
}

/// Structural exterior derivative of a sum of words.
pub fn d_words(words: &[TraceWord]) -> Vec<TraceWord> {
    let mut out = Vec::new();
    for w in words {
        let mut left = 0;
        for (i, slot) in w.slots.iter().enumerate() {
            for (c, replaced) in slot.d() {
                let mut slots = w.slots.clone();
                slots[i] = replaced;
                out.push(TraceWord {
                    coeff: w.coeff.scale(&(c * q(sign_of(left)))),
                    slots,
                    dt: w.dt,
                });
            }
            left += slot.degree();
        }
    }
    out
}

/// Expand a word sum; the dt marker is dropped.
pub fn expand(words: &[TraceWord], fam: &HomotopyFamily) -> Result<FormExpr, Error> {
    let mut cache = HashMap::new();
    let mut out = FormExpr::zero();
    for w in simplify(words) {
        out += &w.expand_cached(fam, &mut cache)?;
    }
    Ok(out)
}

/// Sort the slots of every word with the graded symmetry of the trace and
/// merge words that coincide.
pub fn simplify(words: &[TraceWord]) -> Vec<TraceWord> {
    let mut merged: BTreeMap<(bool, Vec<String>), (Scalar, Vec<Slot>)> = BTreeMap::new();
    for w in words {
        let mut keyed: Vec<(String, Slot)> = w.slots.iter().map(|s| (s.to_string(), s.clone())).collect();
        let mut sign = 1;
        for i in 1..keyed.len() {
            let mut j = i;
            while j > 0 && keyed[j - 1].0 > keyed[j].0 {
                if keyed[j - 1].1.degree() % 2 == 1 && keyed[j].1.degree() % 2 == 1 {
                    sign = -sign;
                }
                keyed.swap(j - 1, j);
                j -= 1;
            }
        }
        let key: Vec<String> = keyed.iter().map(|k| k.0.clone()).collect();
        let coeff = w.coeff.scale(&q(sign));
        let entry = merged
            .entry((w.dt, key))
            .or_insert_with(|| (Scalar::zero(), keyed.into_iter().map(|k| k.1).collect()));
        entry.0 += &coeff;
    }
    merged
        .into_iter()
        .filter(|(_, (c, _))| !c.is_zero())
        .map(|((dt, _), (coeff, slots))| TraceWord { coeff, slots, dt })
        .collect()
}

/// ∫₀¹ over the words carrying exactly one dt; the rest integrate to zero.
pub fn integrate_dt(words: &[TraceWord], fam: &HomotopyFamily) -> Result<FormExpr, Error> {
    let marked: Vec<TraceWord> = words.iter().filter(|w| w.dt).cloned().collect();
    expand(&marked, fam)?.integrate_param(Param::T, &Bound::zero(), &Bound::one())
}

/// k₀₁ S = ∫₀¹ l_t S.
pub fn k01(words: &[TraceWord], fam: &HomotopyFamily) -> Result<FormExpr, Error> {
    integrate_dt(&lt_apply(words), fam)
}

fn binomial(n: usize, k: usize) -> Q {
    (0..k).fold(q(1), |acc, i| acc * q((n - i) as i64) / q((i + 1) as i64))
}

/// Coefficients c_k with Q_{2n+1}(A, F) = Σ_k c_k ⟨A F^k (A²)^{n−k}⟩,
/// c_k = (n+1) C(n,k) ∫₀¹ s^k (s² − s)^{n−k} ds.
pub fn cs_coefficients(n: usize) -> Vec<Q> {
    let s = Scalar::param(Param::S);
    let s2 = &(&s * &s) - &s;
    (0..=n)
        .map(|k| {
            let integrand = &s.pow(k as u32) * &s2.pow((n - k) as u32);
            let v = integrand
                .integrate(Param::S, &Bound::zero(), &Bound::one())
                .as_const()
                .expect("constant integral");
            v * q((n + 1) as i64) * binomial(n, k)
        })
        .collect()
}

/// Q_{2n+1}(A_t, F_t) as trace words, with A_t² written as ½[A_t, A_t].
pub fn cs_words(n: usize) -> Vec<TraceWord> {
    cs_coefficients(n)
        .into_iter()
        .enumerate()
        .filter(|(_, c)| *c != q(0))
        .map(|(k, c)| {
            let half = (0..n - k).fold(q(1), |acc, _| acc * qr(1, 2));
            let mut slots = vec![Slot::A];
            slots.extend(std::iter::repeat_n(Slot::F, k));
            slots.extend(std::iter::repeat_with(|| Slot::bracket(Slot::A, Slot::A)).take(n - k));
            TraceWord::new(Scalar::from(c * half), slots)
        })
        .collect()
}

/// ⟨F_t^{n+1}⟩.
pub fn invariant_polynomial_words(n: usize) -> Vec<TraceWord> {
    vec![TraceWord::new(Scalar::one(), vec![Slot::F; n + 1])]
}

fn tensor_for(a: &LieForm, n: usize) -> Result<InvariantTensor, Error> {
    if a.algebra().n() != n {
        return Err(Error::InvalidN(n));
    }
    invariant_tensor(n)
}

/// Chern–Simons form Q_{2n+1}(A, F).
pub fn chern_simons(a: &LieForm, n: usize) -> Result<FormExpr, Error> {
    let t = tensor_for(a, n)?;
    chern_simons_with(a, &t)
}

pub fn chern_simons_with(a: &LieForm, tensor: &InvariantTensor) -> Result<FormExpr, Error> {
    let n = rank_to_n(tensor)?;
    expand(&cs_words(n), &HomotopyFamily::constant(a, tensor)?)
}

fn rank_to_n(tensor: &InvariantTensor) -> Result<usize, Error> {
    match tensor.rank() {
        0 | 1 => Err(Error::RankMismatch {
            expected: 2,
            got: tensor.rank(),
        }),
        r => Ok(r - 1),
    }
}

/// (n+1)∫₀¹dt ⟨θ F_tⁿ⟩ over the straight line from A₀ to A₁.
pub fn transgression(a1: &LieForm, a0: &LieForm, n: usize) -> Result<FormExpr, Error> {
    let t = tensor_for(a1, n)?;
    transgression_with(a1, a0, &t)
}

pub fn transgression_with(a1: &LieForm, a0: &LieForm, tensor: &InvariantTensor) -> Result<FormExpr, Error> {
    let n = rank_to_n(tensor)?;
    let fam = HomotopyFamily::new(a1, a0, tensor)?;
    let mut args = vec![&fam.theta];
    args.extend(std::iter::repeat_n(&fam.f_t, n));
    trace(&args, tensor)?
        .scale(&q((n + 1) as i64))
        .integrate_param(Param::T, &Bound::zero(), &Bound::one())
}

/// B₂ₙ(A₁, A₀) = n(n+1)∫₀¹dt∫₀ᵗds ⟨θ A₀ F_{st}^{n−1}⟩ with
/// A_{st} = tA₀ + sθ and F_{st} its curvature.
pub fn b2n(a1: &LieForm, a0: &LieForm, n: usize) -> Result<FormExpr, Error> {
    let tensor = tensor_for(a1, n)?;
    let theta = a1.try_sub(a0)?;
    let a_st = a0
        .mul_scalar(&Scalar::param(Param::T))
        .try_add(&theta.mul_scalar(&Scalar::param(Param::S)))?;
    let a_st = if a_st.is_zero() {
        LieForm::zero(a0.algebra(), 1)
    } else {
        a_st
    };
    let f_st = curvature(&a_st)?;
    let mut args = vec![&theta, a0];
    args.extend(std::iter::repeat_n(&f_st, n - 1));
    trace(&args, &tensor)?
        .scale(&q((n * (n + 1)) as i64))
        .integrate_param(Param::S, &Bound::zero(), &Bound::Param(Param::T))?
        .integrate_param(Param::T, &Bound::zero(), &Bound::one())
}

/// B₂ₙ as k₀₁ Q_{2n+1}(A_t, F_t) on the straight-line family.
pub fn b2n_homotopy(a1: &LieForm, a0: &LieForm, n: usize) -> Result<FormExpr, Error> {
    let tensor = tensor_for(a1, n)?;
    k01(&cs_words(n), &HomotopyFamily::new(a1, a0, &tensor)?)
}

/// α₂ₙ = k₀₁ Q_{2n+1}(A_t^g, F_t^g) with A_t^g = g⁻¹(tA + 𝒱)g.
pub fn alpha2n(a: &LieForm, z: &CosetElement, n: usize) -> Result<FormExpr, Error> {
    let tensor = tensor_for(a, n)?;
    let start = left_maurer_cartan(z)?;
    let end = dress(a, z)?;
    let start = if start.is_zero() {
        LieForm::zero(a.algebra(), 1)
    } else {
        start
    };
    let out = k01(&cs_words(n), &HomotopyFamily::new(&end, &start, &tensor)?)?;
    Ok(if a.algebra().deformation().is_some() {
        out.truncate_m2(z.order())
    } else {
        out
    })
}

/// (−1)ⁿ n!(n+1)!/(2n+1)!.
pub fn wz_coefficient(n: usize) -> Q {
    let fact = |k: usize| (1..=k as i64).fold(q(1), |acc, i| acc * q(i));
    let sign = if n.is_multiple_of(2) { q(1) } else { q(-1) };
    sign * fact(n) * fact(n + 1) / fact(2 * n + 1)
}

/// (n+1)(−1)ⁿ ∫₀¹ tⁿ(1−t)ⁿ dt by symbolic integration.
pub fn wz_coefficient_beta(n: usize) -> Q {
    let t = Scalar::param(Param::T);
    let one_minus = &Scalar::one() - &t;
    let sign = if n.is_multiple_of(2) { 1 } else { -1 };
    (&t.pow(n as u32) * &one_minus.pow(n as u32))
        .integrate(Param::T, &Bound::zero(), &Bound::one())
        .as_const()
        .expect("constant integral")
        * q(sign * (n as i64 + 1))
}

/// Wess–Zumino term c_n ⟨𝒱^{2n+1}⟩ with 𝒱² = ½[𝒱, 𝒱].
pub fn wz_term(v: &LieForm, n: usize) -> Result<FormExpr, Error> {
    let tensor = tensor_for(v, n)?;
    let sq = bracket(v, v)?.scale(&qr(1, 2));
    let mut args = vec![v];
    args.extend(std::iter::repeat_n(&sq, n));
    Ok(trace(&args, &tensor)?.scale(&wz_coefficient(n)))
}

/// Q_{2n+1}(𝒱, 0) = (n+1)∫₀¹dt ⟨𝒱 F̂_tⁿ⟩ with F̂_t = (t² − t)𝒱².
pub fn wz_term_direct(v: &LieForm, n: usize) -> Result<FormExpr, Error> {
    let tensor = tensor_for(v, n)?;
    let t = Scalar::param(Param::T);
    let f_hat = bracket(v, v)?.scale(&qr(1, 2)).mul_scalar(&(&(&t * &t) - &t));
    let mut args = vec![v];
    args.extend(std::iter::repeat_n(&f_hat, n));
    trace(&args, &tensor)?
        .scale(&q((n + 1) as i64))
        .integrate_param(Param::T, &Bound::zero(), &Bound::one())
}

/// Both sides of S(1) − S(0) = (k₀₁d + dk₀₁)S.
#[derive(Clone, Debug)]
pub struct CartanReport {
    pub lhs: FormExpr,
    pub rhs: FormExpr,
}

impl CartanReport {
    pub fn residual(&self) -> FormExpr {
        &self.lhs - &self.rhs
    }

    pub fn passed(&self) -> bool {
        self.lhs == self.rhs
    }
}

pub fn cartan_check(words: &[TraceWord], fam: &HomotopyFamily) -> Result<CartanReport, Error> {
    let s = expand(words, fam)?;
    let lhs = &s.eval_param(Param::T, &q(1)) - &s.eval_param(Param::T, &q(0));
    let rhs = &k01(&d_words(words), fam)? + &k01(words, fam)?.ext_d();
    Ok(CartanReport { lhs, rhs })
}

/// (l_t d + d l_t) S against dt ∂_t S, both expanded; returns the residual.
pub fn derivation_residual(words: &[TraceWord], fam: &HomotopyFamily) -> Result<FormExpr, Error> {
    let mut lhs_words = lt_apply(&d_words(words));
    lhs_words.extend(d_words(&lt_apply(words)));
    let lhs = expand(&lhs_words, fam)?;
    let rhs = expand(words, fam)?.derivative(Param::T);
    Ok(&lhs - &rhs)
}

/// Pieces of Q(A) = Q(A, Ā) + Q(Ā) + dQ₂ₙ(A, Ā, 0).
#[derive(Clone, Debug)]
pub struct Triangle {
    pub transgression: FormExpr,
    pub chern_simons_bar: FormExpr,
    pub boundary: FormExpr,
    pub chern_simons: FormExpr,
}

impl Triangle {
    pub fn residual(&self) -> FormExpr {
        let mut r = self.chern_simons.clone();
        r -= &self.transgression;
        r -= &self.chern_simons_bar;
        r -= &self.boundary.ext_d();
        r
    }

    pub fn holds(&self) -> bool {
        self.residual().is_zero()
    }
}

pub fn triangle(a: &LieForm, abar: &LieForm, n: usize) -> Result<Triangle, Error> {
    Ok(Triangle {
        transgression: transgression(a, abar, n)?,
        chern_simons_bar: chern_simons(abar, n)?,
        boundary: b2n(a, abar, n)?,
        chern_simons: chern_simons(a, n)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{build_poincare, LieAlgebra};
    use std::sync::Arc;

    fn poincare(n: usize) -> Arc<LieAlgebra> {
        Arc::new(build_poincare(n).unwrap())
    }

    fn e_plus_omega(alg: &Arc<LieAlgebra>) -> LieForm {
        LieForm::spin_connection(alg).try_add(&LieForm::vielbein(alg)).unwrap()
    }

    #[test]
    fn cs_coefficient_values() {
        assert_eq!(cs_coefficients(1), vec![qr(-1, 3), q(1)]);
        // n = 2: 3∫(s²−s)² = 1/10, 6∫s(s²−s) = −1/2, 3∫s² = 1
        assert_eq!(cs_coefficients(2), vec![qr(1, 10), qr(-1, 2), q(1)]);
    }

    #[test]
    fn wz_coefficients_agree() {
        let expected = [qr(-1, 3), qr(1, 10), qr(-1, 35), qr(1, 126)];
        for (i, e) in expected.iter().enumerate() {
            assert_eq!(&wz_coefficient(i + 1), e);
            assert_eq!(&wz_coefficient_beta(i + 1), e);
        }
    }

    #[test]
    fn lt_on_ff_gives_two_theta_f() {
        let alg = poincare(1);
        let tensor = invariant_tensor(1).unwrap();
        let fam = HomotopyFamily::new(
            &LieForm::generic(&alg, "a", 1),
            &LieForm::generic(&alg, "b", 1),
            &tensor,
        )
        .unwrap();
        let got = expand(&lt_apply(&invariant_polynomial_words(1)), &fam).unwrap();
        let want = TraceWord::new(Scalar::int(2), vec![Slot::Dot, Slot::F]);
        assert_eq!(got, want.expand(&fam).unwrap());
    }

    #[test]
    fn lt_left_degree_sign() {
        let words = lt_apply(&[TraceWord::new(Scalar::one(), vec![Slot::A, Slot::F])]);
        assert_eq!(words.len(), 1);
        assert_eq!(words[0].coeff, Scalar::int(-1));
        assert_eq!(words[0].slots, vec![Slot::A, Slot::Dot]);
        assert!(words[0].dt);
        assert!(lt_apply(&[TraceWord::new(Scalar::one(), vec![Slot::A, Slot::A])]).is_empty());
        assert!(lt_apply(&words).is_empty());
    }

    #[test]
    fn cs_n1_poincare() {
        let alg = poincare(1);
        let cs = chern_simons(&e_plus_omega(&alg), 1).unwrap();
        let r = curvature(&LieForm::spin_connection(&alg)).unwrap();
        let mut expected = FormExpr::zero();
        let mut boundary = FormExpr::zero();
        for a in 0..3u8 {
            for b in 0..3u8 {
                for c in 0..3u8 {
                    let eps = crate::tensor::epsilon(&[a, b, c]);
                    if eps == 0 {
                        continue;
                    }
                    expected += &r.j_component(a, b).wedge(&FormExpr::vielbein(c)).scale(&q(eps));
                    boundary += &FormExpr::omega(a, b).wedge(&FormExpr::vielbein(c)).scale(&q(eps));
                }
            }
        }
        expected -= &boundary.ext_d().scale(&qr(1, 2));
        assert_eq!(cs, expected);
    }

    #[test]
    fn cs_of_pure_lorentz_vanishes() {
        let alg = poincare(1);
        assert!(chern_simons(&LieForm::spin_connection(&alg), 1).unwrap().is_zero());
    }

    #[test]
    fn d_cs_is_invariant_polynomial() {
        for n in 1..=2 {
            let alg = poincare(n);
            let a = e_plus_omega(&alg);
            let f = curvature(&a).unwrap();
            let tensor = invariant_tensor(n).unwrap();
            let fs = vec![&f; n + 1];
            assert_eq!(chern_simons(&a, n).unwrap().ext_d(), trace(&fs, &tensor).unwrap());
        }
    }

    #[test]
    fn transgression_edge_cases() {
        let alg = poincare(1);
        let a = e_plus_omega(&alg);
        assert!(transgression(&a, &a, 1).unwrap().is_zero());
        assert_eq!(
            transgression(&a, &LieForm::zero(&alg, 1), 1).unwrap(),
            chern_simons(&a, 1).unwrap()
        );
    }

    #[test]
    fn k01_of_invariant_polynomial_is_transgression() {
        let alg = poincare(1);
        let tensor = invariant_tensor(1).unwrap();
        let a1 = LieForm::generic(&alg, "a", 1);
        let a0 = LieForm::generic(&alg, "b", 1);
        let fam = HomotopyFamily::new(&a1, &a0, &tensor).unwrap();
        assert_eq!(
            k01(&invariant_polynomial_words(1), &fam).unwrap(),
            transgression(&a1, &a0, 1).unwrap()
        );
    }

    #[test]
    fn k01_pure_lorentz_scaling_vanishes() {
        let alg = poincare(1);
        let tensor = invariant_tensor(1).unwrap();
        let fam = HomotopyFamily::scaling(&LieForm::spin_connection(&alg), &tensor).unwrap();
        assert!(k01(&cs_words(1), &fam).unwrap().is_zero());
    }

    #[test]
    fn k01_of_constant_word_without_dt_is_zero() {
        let alg = poincare(1);
        let tensor = invariant_tensor(1).unwrap();
        let fam = HomotopyFamily::scaling(&e_plus_omega(&alg), &tensor).unwrap();
        let w = LieForm::vielbein(&alg);
        let fixed = vec![TraceWord::new(
            Scalar::one(),
            vec![Slot::Fixed(w.clone()), Slot::Fixed(w)],
        )];
        assert!(k01(&fixed, &fam).unwrap().is_zero());
        let mut marked = fixed.clone();
        marked[0].dt = true;
        assert_eq!(integrate_dt(&marked, &fam).unwrap(), expand(&fixed, &fam).unwrap());
    }

    #[test]
    fn cartan_formula_generic_endpoints() {
        let alg = poincare(1);
        let tensor = invariant_tensor(1).unwrap();
        let fam = HomotopyFamily::new(
            &LieForm::generic(&alg, "a", 1),
            &LieForm::generic(&alg, "b", 1),
            &tensor,
        )
        .unwrap();
        for words in [invariant_polynomial_words(1), cs_words(1)] {
            let r = cartan_check(&words, &fam).unwrap();
            assert!(r.passed(), "{}", r.residual());
            assert!(derivation_residual(&words, &fam).unwrap().is_zero());
        }
    }

    #[test]
    fn b2_is_trace_of_endpoints() {
        let alg = poincare(1);
        let tensor = invariant_tensor(1).unwrap();
        let a1 = LieForm::generic(&alg, "a", 1);
        let a0 = LieForm::generic(&alg, "b", 1);
        let expected = trace(&[&a1, &a0], &tensor).unwrap();
        assert_eq!(b2n(&a1, &a0, 1).unwrap(), expected);
        assert_eq!(b2n_homotopy(&a1, &a0, 1).unwrap(), expected);
        assert!(b2n(&a1, &a1, 1).unwrap().is_zero());
    }

    #[test]
    fn triangle_n1() {
        let alg = poincare(1);
        let t = triangle(&e_plus_omega(&alg), &LieForm::spin_connection(&alg), 1).unwrap();
        assert!(t.chern_simons_bar.is_zero());
        assert!(t.holds(), "{}", t.residual());
    }

    #[test]
    fn alpha2_is_minus_trace_v_a() {
        let alg = poincare(1);
        let tensor = invariant_tensor(1).unwrap();
        let z = CosetElement::standard(&alg, 0);
        let a = e_plus_omega(&alg);
        let v = crate::coset::maurer_cartan(&z).unwrap();
        let expected = trace(&[&v, &a], &tensor).unwrap().scale(&q(-1));
        assert_eq!(alpha2n(&a, &z, 1).unwrap(), expected);
        assert!(alpha2n(&LieForm::zero(&alg, 1), &z, 1).unwrap().is_zero());
    }

    #[test]
    fn wz_routes_agree_and_vanish_on_poincare_coset() {
        let alg = poincare(1);
        let v = LieForm::generic(&alg, "v", 1);
        assert_eq!(wz_term(&v, 1).unwrap(), wz_term_direct(&v, 1).unwrap());
        let z = CosetElement::standard(&alg, 0);
        let mc = crate::coset::maurer_cartan(&z).unwrap();
        assert!(wz_term(&mc, 1).unwrap().is_zero());
    }
}
