//! ε-contracted products of Lorentz tensors, kept in index notation for
//! LaTeX output and expanded to concrete components on demand.

use std::fmt;
use std::sync::Arc;

use crate::form::FormExpr;
use crate::lie::LieAlgebra;
use crate::lieform::{cov_d, curvature, LieForm};
use crate::scalar::{q, Q};
use crate::tensor::{epsilon, permutations};
use crate::Error;

/// A tensor-valued form built from ω, e and φ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Factor {
    /// R^{ab} = dω^{ab} + ω^a_c ω^{cb}
    Curvature,
    /// ω^{ab}
    Connection,
    /// e^a
    Vielbein,
    /// T^a = De^a
    Torsion,
    /// φ^a
    Scalar,
    /// dφ^a
    ExteriorScalar,
    /// Dφ^a
    CovariantScalar,
}

impl Factor {
    pub fn arity(self) -> usize {
        match self {
            Factor::Curvature | Factor::Connection => 2,
            _ => 1,
        }
    }

    pub fn latex(self) -> &'static str {
        match self {
            Factor::Curvature => "R",
            Factor::Connection => "\\omega",
            Factor::Vielbein => "e",
            Factor::Torsion => "T",
            Factor::Scalar => "\\phi",
            Factor::ExteriorScalar => "d\\phi",
            Factor::CovariantScalar => "D\\phi",
        }
    }
}

/// Component tables for the factors over one algebra.
pub struct FieldTable {
    omega: LieForm,
    curvature: LieForm,
    vielbein: LieForm,
    torsion: LieForm,
    phi: LieForm,
    dphi: LieForm,
}

impl FieldTable {
    pub fn new(alg: &Arc<LieAlgebra>) -> Result<Self, Error> {
        let omega = LieForm::spin_connection(alg);
        let vielbein = LieForm::vielbein(alg);
        let phi = LieForm::coset_scalar(alg);
        Ok(FieldTable {
            curvature: curvature(&omega)?,
            torsion: cov_d(&vielbein, &omega)?,
            dphi: cov_d(&phi, &omega)?,
            omega,
            vielbein,
            phi,
        })
    }

    pub fn component(&self, f: Factor, idx: &[u8]) -> FormExpr {
        match f {
            Factor::Curvature => self.curvature.j_component(idx[0], idx[1]),
            Factor::Connection => self.omega.j_component(idx[0], idx[1]),
            Factor::Vielbein => self.vielbein.p_component(idx[0]),
            Factor::Torsion => self.torsion.p_component(idx[0]),
            Factor::Scalar => self.phi.p_component(idx[0]),
            Factor::ExteriorScalar => self.phi.p_component(idx[0]).ext_d(),
            Factor::CovariantScalar => self.dphi.p_component(idx[0]),
        }
    }
}

/// coeff · ε_{a1…aD} X1^{…} X2^{…} …, indices filled left to right.
#[derive(Clone, Debug, PartialEq)]
pub struct EpsilonTerm {
    pub coeff: Q,
    pub factors: Vec<Factor>,
}

impl EpsilonTerm {
    pub fn new(coeff: Q, factors: Vec<Factor>) -> Self {
        EpsilonTerm { coeff, factors }
    }

    pub fn rank(&self) -> usize {
        self.factors.iter().map(|f| f.arity()).sum()
    }

    /// Expand over every index assignment in dimension dim = rank.
    pub fn expand(&self, alg: &Arc<LieAlgebra>) -> Result<FormExpr, Error> {
        let table = FieldTable::new(alg)?;
        self.expand_with(alg, &table)
    }

    pub fn expand_with(&self, alg: &Arc<LieAlgebra>, table: &FieldTable) -> Result<FormExpr, Error> {
        let dim = usize::from(alg.dim());
        if self.rank() != dim {
            return Err(Error::RankMismatch {
                expected: dim,
                got: self.rank(),
            });
        }
        let mut out = FormExpr::zero();
        for perm in permutations(alg.dim()) {
            let mut acc = FormExpr::one();
            let mut pos = 0;
            for f in &self.factors {
                let k = f.arity();
                acc = acc.wedge(&table.component(*f, &perm[pos..pos + k]));
                pos += k;
                if acc.is_zero() {
                    break;
                }
            }
            if !acc.is_zero() {
                out += &acc.scale(&(&self.coeff * q(epsilon(&perm))));
            }
        }
        Ok(out)
    }

    pub fn latex(&self) -> String {
        let rank = self.rank();
        let names: Vec<String> = if rank <= 4 {
            (0..rank).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
        } else {
            (1..=rank).map(|i| format!("a_{{{i}}}")).collect()
        };
        let mut out = String::new();
        if self.coeff == q(-1) {
            out.push('-');
        } else if self.coeff != q(1) {
            out.push_str(&latex_rational(&self.coeff));
        }
        let joined = if rank <= 4 { names.concat() } else { names.join(" ") };
        out.push_str(&format!("\\epsilon_{{{joined}}}"));
        let mut pos = 0;
        for f in &self.factors {
            let k = f.arity();
            out.push_str(&format!("{}^{{{}}}", f.latex(), names[pos..pos + k].concat()));
            pos += k;
        }
        out
    }
}

pub fn latex_rational(c: &Q) -> String {
    if c.denom() == &num_bigint::BigInt::from(1) {
        c.numer().to_string()
    } else {
        let sign = if c < &q(0) { "-" } else { "" };
        let abs = if c < &q(0) { -c.clone() } else { c.clone() };
        format!("{sign}\\frac{{{}}}{{{}}}", abs.numer(), abs.denom())
    }
}

impl fmt::Display for EpsilonTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.latex())
    }
}

/// ε R…R X with n curvatures followed by a single vector-valued factor.
pub fn curvatures_then(n: usize, last: Factor) -> EpsilonTerm {
    let mut factors = vec![Factor::Curvature; n];
    factors.push(last);
    EpsilonTerm::new(q(1), factors)
}
