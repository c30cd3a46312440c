//! Exact numeric oracle: every atomic field gets a random rational first-order
//! jet at the origin of an N-dimensional base, and forms are evaluated in the
//! exterior algebra of T*_0 with 2^N coordinates.
//!
//! Besides evaluating symbolic expressions, the module carries a second,
//! fully numeric pipeline (value, differential) that rebuilds curvatures,
//! traces and t-integrals from the base jets alone.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::form::{Atom, FormExpr};
use crate::lie::LieAlgebra;
use crate::lieform::LieForm;
use crate::scalar::{q, Param, Q};
use crate::tensor::InvariantTensor;
use crate::Error;

/// Element of Λ(R^N) stored sparsely by basis bitmask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExteriorValue {
    dim: usize,
    coords: BTreeMap<u32, Q>,
}

fn merge_sign(a: u32, b: u32) -> bool {
    // Parity of pairs (i in a, j in b) with i > j.
    let mut count = 0;
    let mut bits = b;
    while bits != 0 {
        let j = bits.trailing_zeros();
        count += (a >> (j + 1)).count_ones();
        bits &= bits - 1;
    }
    count % 2 == 1
}

impl ExteriorValue {
    pub fn zero(dim: usize) -> Self {
        ExteriorValue {
            dim,
            coords: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: Q) -> Self {
        let mut out = ExteriorValue::zero(dim);
        out.add_coord(0, c);
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    /// Coefficient of dx^{i1}∧…∧dx^{ik} for the set bits of `mask`, ascending.
    pub fn coordinate(&self, mask: u32) -> Q {
        self.coords.get(&mask).cloned().unwrap_or_else(Q::zero)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = (u32, &Q)> {
        self.coords.iter().map(|(k, v)| (*k, v))
    }

    /// All 2^N coordinates.
    pub fn dense(&self) -> Vec<Q> {
        (0..1u32 << self.dim).map(|m| self.coordinate(m)).collect()
    }

    fn add_coord(&mut self, mask: u32, c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.coords.entry(mask).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.coords.remove(&mask);
        }
    }

    pub fn add(&self, other: &ExteriorValue) -> ExteriorValue {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn add_assign(&mut self, other: &ExteriorValue) {
        for (m, c) in &other.coords {
            self.add_coord(*m, c.clone());
        }
    }

    pub fn sub(&self, other: &ExteriorValue) -> ExteriorValue {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, c: &Q) -> ExteriorValue {
        if c.is_zero() {
            return ExteriorValue::zero(self.dim);
        }
        ExteriorValue {
            dim: self.dim,
            coords: self.coords.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    pub fn wedge(&self, other: &ExteriorValue) -> ExteriorValue {
        let mut out = ExteriorValue::zero(self.dim);
        for (a, x) in &self.coords {
            for (b, y) in &other.coords {
                if a & b != 0 {
                    continue;
                }
                let v = x * y;
                out.add_coord(a | b, if merge_sign(*a, *b) { -v } else { v });
            }
        }
        out
    }
}

impl fmt::Display for ExteriorValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coords.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coords
            .iter()
            .map(|(m, c)| format!("{c}*{}", basis_name(*m)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Human-readable basis element, e.g. "dx0^dx2"; "1" for the empty mask.
pub fn basis_name(mask: u32) -> String {
    if mask == 0 {
        return "1".into();
    }
    (0..32)
        .filter(|i| mask & (1 << i) != 0)
        .map(|i| format!("dx{i}"))
        .collect::<Vec<_>>()
        .join("^")
}

/// First-order jet of a p-form field: per basis p-form, value and gradient.
#[derive(Clone, Debug, PartialEq)]
struct FieldJet {
    value: ExteriorValue,
    differential: ExteriorValue,
}

fn masks_of_size(dim: usize, p: u32) -> Vec<u32> {
    (0..1u32 << dim).filter(|m| m.count_ones() == p).collect()
}

// Stable 64-bit FNV-1a, used to derive per-atom streams from the seed.
fn fnv1a(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn sample(rng: &mut ChaCha8Rng) -> Q {
    let num: i64 = rng.gen_range(-20..=20);
    let den: i64 = rng.gen_range(1..=12);
    Q::new(num.into(), den.into())
}

/// Random exact-rational jets for a fixed set of base atoms.
#[derive(Clone, Debug, PartialEq)]
pub struct JetAssignment {
    dim: usize,
    seed: u64,
    params: [Q; 3],
    jets: BTreeMap<Atom, FieldJet>,
}

impl JetAssignment {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Sampled values of (t, s, m²).
    pub fn params(&self) -> &[Q; 3] {
        &self.params
    }

    pub fn covers(&self, atom: &Atom) -> bool {
        self.jets.contains_key(&atom.base())
    }

    /// Value and differential of an atom's base field at the origin.
    pub fn jet(&self, atom: &Atom) -> Result<(ExteriorValue, ExteriorValue), Error> {
        let j = self
            .jets
            .get(&atom.base())
            .ok_or_else(|| Error::UncoveredAtom(atom.to_string()))?;
        Ok((j.value.clone(), j.differential.clone()))
    }

    pub fn atom_value(&self, atom: &Atom) -> Result<ExteriorValue, Error> {
        let (v, dv) = self.jet(atom)?;
        Ok(if atom.d { dv } else { v })
    }

    fn param(&self, p: Param) -> &Q {
        match p {
            Param::T => &self.params[0],
            Param::S => &self.params[1],
            Param::M2 => &self.params[2],
        }
    }
}

/// Sample jets for `symbols` (d-atoms are reduced to their base field).
pub fn assign_jets(symbols: &[Atom], dim: usize, seed: u64) -> Result<JetAssignment, Error> {
    if dim > 20 {
        return Err(Error::Unsupported(format!("base dimension {dim} is too large")));
    }
    let mut jets = BTreeMap::new();
    for atom in symbols {
        let base = atom.base();
        let p = u32::from(base.degree());
        if p as usize > dim {
            return Err(Error::BaseDimTooSmall { base: dim, degree: p });
        }
        if jets.contains_key(&base) {
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a(&base.to_string()));
        let mut value = ExteriorValue::zero(dim);
        let mut differential = ExteriorValue::zero(dim);
        for mask in masks_of_size(dim, p) {
            value.add_coord(mask, sample(&mut rng));
            for mu in 0..dim {
                let bit = 1u32 << mu;
                let g = sample(&mut rng);
                if mask & bit == 0 {
                    let single = ExteriorValue::constant(dim, g);
                    let mut basis = ExteriorValue::zero(dim);
                    basis.add_coord(bit, Q::one());
                    let mut form = ExteriorValue::zero(dim);
                    form.add_coord(mask, Q::one());
                    differential = differential.add(&basis.wedge(&form).wedge(&single));
                }
            }
        }
        jets.insert(base, FieldJet { value, differential });
    }
    let mut prng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a("<params>"));
    let params = [sample(&mut prng), sample(&mut prng), sample(&mut prng)];
    Ok(JetAssignment {
        dim,
        seed,
        params,
        jets,
    })
}

/// Jets covering every atom appearing in the given expressions.
pub fn assign_for(exprs: &[&FormExpr], dim: usize, seed: u64) -> Result<JetAssignment, Error> {
    let mut atoms: BTreeSet<Atom> = BTreeSet::new();
    for x in exprs {
        atoms.extend(x.atoms().map(Atom::base));
        let deg = x.max_degree();
        if deg as usize > dim {
            return Err(Error::BaseDimTooSmall { base: dim, degree: deg });
        }
    }
    let atoms: Vec<Atom> = atoms.into_iter().collect();
    assign_jets(&atoms, dim, seed)
}

/// Evaluate a symbolic form at the jet point.
pub fn eval(x: &FormExpr, jets: &JetAssignment) -> Result<ExteriorValue, Error> {
    let dim = jets.dim;
    let mut cache: HashMap<&Atom, ExteriorValue> = HashMap::new();
    for a in x.atoms() {
        if !cache.contains_key(a) {
            cache.insert(a, jets.atom_value(a)?);
        }
    }
    // Sorted terms put words that differ only in their last atom next to each
    // other: Σ c_i (P ∧ x_i) = P ∧ Σ c_i x_i. Prefix products are kept on a
    // stack and reused by the next group.
    let mut out = ExteriorValue::zero(dim);
    let mut stack: Vec<(&Atom, ExteriorValue)> = Vec::new();
    let mut group: Option<(&[Atom], ExteriorValue)> = None;
    for (m, c) in x.terms() {
        let coeff = c.eval_all(jets.param(Param::T), jets.param(Param::S), jets.param(Param::M2));
        if coeff.is_zero() {
            continue;
        }
        let atoms = m.atoms();
        let (prefix, last) = match atoms.split_last() {
            Some((last, prefix)) => (prefix, cache[last].scale(&coeff)),
            None => (atoms, ExteriorValue::constant(dim, coeff)),
        };
        match &mut group {
            Some((p, tail)) if *p == prefix && !atoms.is_empty() => tail.add_assign(&last),
            _ => {
                if let Some((p, tail)) = group.take() {
                    flush_group(p, tail, &mut stack, &cache, &mut out);
                }
                group = Some((prefix, last));
            }
        }
    }
    if let Some((p, tail)) = group {
        flush_group(p, tail, &mut stack, &cache, &mut out);
    }
    Ok(out)
}

fn flush_group<'x>(
    prefix: &'x [Atom],
    tail: ExteriorValue,
    stack: &mut Vec<(&'x Atom, ExteriorValue)>,
    cache: &HashMap<&'x Atom, ExteriorValue>,
    out: &mut ExteriorValue,
) {
    let keep = stack.iter().zip(prefix).take_while(|((a, _), b)| *a == *b).count();
    stack.truncate(keep);
    for b in &prefix[keep..] {
        let next = match stack.last() {
            Some((_, v)) => v.wedge(&cache[b]),
            None => cache[b].clone(),
        };
        stack.push((b, next));
    }
    match stack.last() {
        Some((_, p)) => out.add_assign(&p.wedge(&tail)),
        None => out.add_assign(&tail),
    }
}

/// A failing trial: seed, the first differing basis element, and both values.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub seed: u64,
    pub mask: u32,
    pub lhs: Q,
    pub rhs: Q,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "seed {}: coefficient of {} is {} on the left, {} on the right",
            self.seed,
            basis_name(self.mask),
            self.lhs,
            self.rhs
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct IdentityReport {
    pub trials: usize,
    pub dim: usize,
    pub failures: Vec<Witness>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.trials > 0
    }
}

/// Compare two exterior values and return the first differing coordinate.
pub fn first_difference(lhs: &ExteriorValue, rhs: &ExteriorValue, seed: u64) -> Option<Witness> {
    let diff = lhs.sub(rhs);
    let mask = diff.nonzero().next().map(|(m, _)| m);
    mask.map(|mask| Witness {
        seed,
        mask,
        lhs: lhs.coordinate(mask),
        rhs: rhs.coordinate(mask),
    })
}

/// Evaluate lhs and rhs on `trials` seeds starting at `first_seed`.
pub fn check_identity(
    lhs: &FormExpr,
    rhs: &FormExpr,
    trials: usize,
    dim: usize,
    first_seed: u64,
) -> Result<IdentityReport, Error> {
    let mut report = IdentityReport {
        trials,
        dim,
        failures: Vec::new(),
    };
    for k in 0..trials as u64 {
        let seed = first_seed.wrapping_add(k);
        let jets = assign_for(&[lhs, rhs], dim, seed)?;
        let (l, r) = (eval(lhs, &jets)?, eval(rhs, &jets)?);
        if let Some(w) = first_difference(&l, &r, seed) {
            report.failures.push(w);
        }
    }
    Ok(report)
}

/// A homogeneous form at the jet point together with its differential.
#[derive(Clone, Debug, PartialEq)]
pub struct JetForm {
    pub degree: u32,
    pub value: ExteriorValue,
    pub differential: ExteriorValue,
}

impl JetForm {
    pub fn zero(dim: usize, degree: u32) -> Self {
        JetForm {
            degree,
            value: ExteriorValue::zero(dim),
            differential: ExteriorValue::zero(dim),
        }
    }

    pub fn constant(dim: usize, c: Q) -> Self {
        JetForm {
            degree: 0,
            value: ExteriorValue::constant(dim, c),
            differential: ExteriorValue::zero(dim),
        }
    }

    /// Rebuild a symbolic form from atom jets with the product rule only.
    pub fn from_expr(x: &FormExpr, jets: &JetAssignment) -> Result<Self, Error> {
        let dim = jets.dim;
        let mut out = JetForm::zero(dim, x.degree().unwrap_or(0));
        for (m, c) in x.terms() {
            let coeff = c.eval_all(jets.param(Param::T), jets.param(Param::S), jets.param(Param::M2));
            let mut acc = JetForm::constant(dim, coeff);
            for atom in m.atoms() {
                let (v, dv) = jets.jet(atom)?;
                let f = if atom.d {
                    JetForm {
                        degree: u32::from(atom.degree()),
                        value: dv,
                        differential: ExteriorValue::zero(dim),
                    }
                } else {
                    JetForm {
                        degree: u32::from(atom.degree()),
                        value: v,
                        differential: dv,
                    }
                };
                acc = acc.wedge(&f);
            }
            out.add_assign(&acc);
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero() && self.differential.is_zero()
    }

    pub fn add(&self, other: &JetForm) -> JetForm {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn add_assign(&mut self, other: &JetForm) {
        if self.is_zero() {
            self.degree = other.degree;
        }
        self.value.add_assign(&other.value);
        self.differential.add_assign(&other.differential);
    }

    pub fn scale(&self, c: &Q) -> JetForm {
        JetForm {
            degree: self.degree,
            value: self.value.scale(c),
            differential: self.differential.scale(c),
        }
    }

    pub fn wedge(&self, other: &JetForm) -> JetForm {
        let sign = if self.degree.is_multiple_of(2) {
            Q::one()
        } else {
            -Q::one()
        };
        JetForm {
            degree: self.degree + other.degree,
            value: self.value.wedge(&other.value),
            differential: self
                .differential
                .wedge(&other.value)
                .add(&self.value.wedge(&other.differential).scale(&sign)),
        }
    }

    pub fn ext_d(&self) -> JetForm {
        JetForm {
            degree: self.degree + 1,
            value: self.differential.clone(),
            differential: ExteriorValue::zero(self.value.dim()),
        }
    }
}

/// Lie-algebra-valued jet form.
#[derive(Clone, Debug)]
pub struct NumLieForm<'a> {
    pub algebra: &'a LieAlgebra,
    pub degree: u32,
    pub components: BTreeMap<usize, JetForm>,
    m2: Q,
    dim: usize,
}

impl<'a> NumLieForm<'a> {
    pub fn from_lie_form(x: &'a LieForm, jets: &JetAssignment) -> Result<NumLieForm<'a>, Error> {
        let mut components = BTreeMap::new();
        for (g, c) in x.components() {
            components.insert(g, JetForm::from_expr(c, jets)?);
        }
        Ok(NumLieForm {
            algebra: x.algebra(),
            degree: x.degree(),
            components,
            m2: jets.param(Param::M2).clone(),
            dim: jets.dim,
        })
    }

    fn empty(&self, degree: u32) -> NumLieForm<'a> {
        NumLieForm {
            algebra: self.algebra,
            degree,
            components: BTreeMap::new(),
            m2: self.m2.clone(),
            dim: self.dim,
        }
    }

    pub fn component(&self, g: usize) -> JetForm {
        self.components
            .get(&g)
            .cloned()
            .unwrap_or_else(|| JetForm::zero(self.dim, self.degree))
    }

    pub fn add(&self, other: &NumLieForm<'a>) -> NumLieForm<'a> {
        let mut out = self.clone();
        if self.components.is_empty() {
            out.degree = other.degree;
        }
        for (g, x) in &other.components {
            out.accumulate(*g, x);
        }
        out
    }

    fn accumulate(&mut self, g: usize, x: &JetForm) {
        match self.components.get_mut(&g) {
            Some(cur) => cur.add_assign(x),
            None => {
                self.components.insert(g, x.clone());
            }
        }
    }

    pub fn scale(&self, c: &Q) -> NumLieForm<'a> {
        let mut out = self.empty(self.degree);
        for (g, x) in &self.components {
            out.components.insert(*g, x.scale(c));
        }
        out
    }

    pub fn ext_d(&self) -> NumLieForm<'a> {
        let mut out = self.empty(self.degree + 1);
        for (g, x) in &self.components {
            out.components.insert(*g, x.ext_d());
        }
        out
    }

    pub fn bracket(&self, other: &NumLieForm<'a>) -> NumLieForm<'a> {
        let mut out = self.empty(self.degree + other.degree);
        for (i, x) in &self.components {
            for (j, y) in &other.components {
                let structure = self.algebra.bracket_gens(*i, *j);
                if structure.is_empty() {
                    continue;
                }
                let prod = x.wedge(y);
                for (k, f) in structure {
                    let c = f.eval_all(&q(0), &q(0), &self.m2);
                    out.accumulate(*k, &prod.scale(&c));
                }
            }
        }
        out
    }

    pub fn curvature(&self) -> NumLieForm<'a> {
        self.ext_d().add(&self.bracket(self).scale(&Q::new(1.into(), 2.into())))
    }

    pub fn is_zero(&self) -> bool {
        self.components.values().all(JetForm::is_zero)
    }
}

/// Symmetric trace of jet forms.
pub fn num_trace(args: &[&NumLieForm<'_>], tensor: &InvariantTensor) -> Result<JetForm, Error> {
    let first = args.first().ok_or(Error::RankMismatch {
        expected: tensor.rank(),
        got: 0,
    })?;
    if args.len() != tensor.rank() {
        return Err(Error::RankMismatch {
            expected: tensor.rank(),
            got: args.len(),
        });
    }
    let degree = args.iter().map(|a| a.degree).sum();
    let mut out = JetForm::zero(first.dim, degree);
    for (slots, v) in tensor.ordered_entries(first.algebra)? {
        let mut acc = JetForm::constant(first.dim, v);
        let mut present = true;
        for (g, a) in slots.iter().zip(args) {
            match a.components.get(g) {
                Some(x) => acc = acc.wedge(x),
                None => {
                    present = false;
                    break;
                }
            }
        }
        if present {
            out.add_assign(&acc);
        }
    }
    Ok(out)
}

/// Weights w_i with Σ w_i p(i/(k−1)) = ∫₀¹ p for every polynomial of degree < k.
pub fn newton_cotes_weights(k: usize) -> Vec<Q> {
    assert!(k >= 1);
    if k == 1 {
        return vec![Q::one()];
    }
    let nodes: Vec<Q> = (0..k)
        .map(|i| Q::new((i as i64).into(), ((k - 1) as i64).into()))
        .collect();
    // Rows: Σ_i w_i x_i^j = 1/(j+1).
    let mut m: Vec<Vec<Q>> = (0..k)
        .map(|j| {
            let mut row: Vec<Q> = nodes.iter().map(|x| pow(x, j)).collect();
            row.push(Q::new(1.into(), ((j + 1) as i64).into()));
            row
        })
        .collect();
    for col in 0..k {
        let pivot = (col..k)
            .find(|&r| !m[r][col].is_zero())
            .expect("Vandermonde is invertible");
        m.swap(col, pivot);
        let p = m[col][col].clone();
        for x in &mut m[col][col..=k] {
            *x = &*x / &p;
        }
        for r in 0..k {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let pivot_row = m[col].clone();
                for (x, y) in m[r][col..=k].iter_mut().zip(&pivot_row[col..=k]) {
                    *x -= &f * y;
                }
            }
        }
    }
    m.into_iter().map(|row| row[k].clone()).collect()
}

fn pow(x: &Q, k: usize) -> Q {
    (0..k).fold(Q::one(), |acc, _| acc * x)
}

/// ∫₀¹ f(t) dt for f polynomial of degree < nodes, evaluated at equispaced t.
pub fn integrate_t(nodes: usize, f: impl Fn(&Q) -> Result<JetForm, Error>) -> Result<JetForm, Error> {
    let weights = newton_cotes_weights(nodes);
    let mut out: Option<JetForm> = None;
    for (i, w) in weights.iter().enumerate() {
        let t = Q::new((i as i64).into(), ((nodes.max(2) - 1) as i64).into());
        let v = f(&t)?.scale(w);
        out = Some(match out {
            Some(acc) => acc.add(&v),
            None => v,
        });
    }
    Ok(out.expect("at least one node"))
}

/// Numeric transgression (n+1)∫₀¹dt⟨θ F_tⁿ⟩ from endpoint jets.
pub fn num_transgression(a1: &NumLieForm<'_>, a0: &NumLieForm<'_>, tensor: &InvariantTensor) -> Result<JetForm, Error> {
    let n = tensor.rank() - 1;
    let theta = a1.add(&a0.scale(&-Q::one()));
    integrate_t(2 * n + 2, |t| {
        let a_t = a0.add(&theta.scale(t));
        let f_t = a_t.curvature();
        let mut args = vec![&theta];
        args.extend(std::iter::repeat_n(&f_t, n));
        Ok(num_trace(&args, tensor)?.scale(&q((n + 1) as i64)))
    })
}

/// Numeric adjoint action e^{sign·ad φ} x, summed until the terms vanish.
pub fn num_adjoint<'a>(x: &NumLieForm<'a>, phi: &NumLieForm<'a>, sign: i64, max_terms: usize) -> NumLieForm<'a> {
    let mut out = x.clone();
    let mut term = x.clone();
    for k in 1..=max_terms {
        term = phi.bracket(&term).scale(&Q::new(sign.into(), (k as i64).into()));
        if term.is_zero() {
            break;
        }
        out = out.add(&term);
    }
    out
}

/// Numeric A^g = e^{−ad φ}A + Σ_k (−1)^k ad_φ^k dφ/(k+1)!.
pub fn num_dress<'a>(a: &NumLieForm<'a>, phi: &NumLieForm<'a>, max_terms: usize) -> NumLieForm<'a> {
    let conj = num_adjoint(a, phi, -1, max_terms);
    let mut mc = phi.ext_d();
    let mut term = phi.ext_d();
    for k in 1..=max_terms {
        term = phi.bracket(&term).scale(&Q::new((-1).into(), ((k + 1) as i64).into()));
        if term.is_zero() {
            break;
        }
        mc = mc.add(&term);
    }
    conj.add(&mc)
}

/// Numeric ε_{a1…aD} X1^{…}…: each factor is a Lorentz (arity 2) or
/// translation (arity 1) valued jet form.
pub fn num_epsilon(factors: &[(&NumLieForm<'_>, usize)]) -> Result<JetForm, Error> {
    let first = factors
        .first()
        .ok_or_else(|| Error::Unsupported("empty contraction".into()))?
        .0;
    let alg = first.algebra;
    let dim = first.dim;
    let rank: usize = factors.iter().map(|f| f.1).sum();
    if rank != usize::from(alg.dim()) {
        return Err(Error::RankMismatch {
            expected: usize::from(alg.dim()),
            got: rank,
        });
    }
    let degree = factors.iter().map(|f| f.0.degree).sum();
    let mut out = JetForm::zero(dim, degree);
    for perm in crate::tensor::permutations(alg.dim()) {
        let mut acc = JetForm::constant(dim, q(crate::tensor::epsilon(&perm)));
        let mut pos = 0;
        for (f, arity) in factors {
            let comp = if *arity == 2 {
                match alg.j_index(perm[pos], perm[pos + 1]) {
                    Some((g, s)) => f.component(g).scale(&q(s)),
                    None => JetForm::zero(dim, f.degree),
                }
            } else {
                f.component(alg.p_index(perm[pos]).expect("P generator"))
            };
            acc = acc.wedge(&comp);
            pos += arity;
        }
        out.add_assign(&acc);
    }
    Ok(out)
}
