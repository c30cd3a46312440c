//! Surface syntax for component forms and algebra definitions.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('^' | '*') unary)*
//! unary   := '-' unary | primary
//! primary := INT ['/' INT] | 't' | 's' | 'm2' | '(' expr ')'
//!          | 'd' '(' expr ')'
//!          | 'tr' '(' expr (',' expr)* ')'
//!          | 'eps' '[' idx (',' idx)* ']'
//!          | ('w' | 'e' | 'phi') '[' idx (',' idx)* ']'
//!          | NAME '<' INT '>' '[' [idx (',' idx)*] ']'
//!          | ('J' | 'P') '[' idx (',' idx)* ']'
//! idx     := INT | NAME
//! ```
//!
//! `*` and `^` are both the wedge product; scalars are 0-forms. Index names
//! are bound by an `eps[...]` factor of the enclosing product and summed over
//! all D = 2n+1 values. `J[..]`/`P[..]` generators may only appear inside
//! `tr(...)`, whose arguments must each be Lie-algebra valued forms of a
//! single degree.

use std::collections::BTreeMap;
use std::sync::Arc;

use gwzw_core::form::{Field, FormExpr};
use gwzw_core::lie::{build_poincare, GenKind, GeneratorId, LieAlgebra};
use gwzw_core::lieform::{trace, LieForm};
use gwzw_core::scalar::{Param, Scalar, Q};
use gwzw_core::tensor::{epsilon, invariant_tensor, InvariantTensor};
use gwzw_core::Error;

/// Largest form degree accepted for user fields.
pub const MAX_USER_DEGREE: u8 = 20;

fn err(pos: usize, msg: impl Into<String>) -> Error {
    Error::Parse { pos, msg: msg.into() }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(String),
    Name(String),
    Sym(char),
    End,
}

fn lex(src: &str, base: usize) -> Result<Vec<(Tok, usize)>, Error> {
    let mut out = Vec::new();
    let mut it = src.char_indices().peekable();
    while let Some(&(i, c)) = it.peek() {
        let pos = base + i;
        if c.is_whitespace() {
            it.next();
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&(_, c)) = it.peek() {
                if !c.is_ascii_digit() {
                    break;
                }
                s.push(c);
                it.next();
            }
            out.push((Tok::Int(s), pos));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&(_, c)) = it.peek() {
                if !(c.is_ascii_alphanumeric() || c == '_') {
                    break;
                }
                s.push(c);
                it.next();
            }
            out.push((Tok::Name(s), pos));
        } else if "+-*^/()[],<>=".contains(c) {
            out.push((Tok::Sym(c), pos));
            it.next();
        } else {
            return Err(err(pos, format!("unexpected character {c:?}")));
        }
    }
    out.push((Tok::End, base + src.len()));
    Ok(out)
}

#[derive(Clone, Debug)]
enum Idx {
    Lit(String),
    Var(String),
}

#[derive(Clone, Debug)]
enum Node {
    Num(Q),
    Param(Param),
    Field {
        field: Field,
        idx: Vec<(Idx, usize)>,
        pos: usize,
    },
    Gen {
        kind: GenKind,
        idx: Vec<(Idx, usize)>,
        pos: usize,
    },
    Eps {
        idx: Vec<(Idx, usize)>,
        pos: usize,
    },
    D(Box<Node>),
    Neg(Box<Node>),
    Sum(Vec<Node>),
    Prod(Vec<Node>, usize),
    Trace(Vec<Node>, usize),
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    depth: usize,
}

const MAX_DEPTH: usize = 256;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, c: char) -> Result<(), Error> {
        match self.bump() {
            (Tok::Sym(s), _) if s == c => Ok(()),
            (t, pos) => Err(err(pos, format!("expected '{c}', found {}", describe(&t)))),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn enter(&mut self) -> Result<(), Error> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(err(self.pos(), "expression nested too deeply"));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Node, Error> {
        self.enter()?;
        let mut terms = vec![self.term()?];
        loop {
            if self.eat('+') {
                terms.push(self.term()?);
            } else if self.eat('-') {
                terms.push(Node::Neg(Box::new(self.term()?)));
            } else {
                break;
            }
        }
        self.depth -= 1;
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Node::Sum(terms)
        })
    }

    fn term(&mut self) -> Result<Node, Error> {
        let pos = self.pos();
        let mut factors = vec![self.unary()?];
        while self.eat('^') || self.eat('*') {
            factors.push(self.unary()?);
        }
        Ok(if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            Node::Prod(factors, pos)
        })
    }

    fn unary(&mut self) -> Result<Node, Error> {
        if self.eat('-') {
            self.enter()?;
            let inner = self.unary()?;
            self.depth -= 1;
            return Ok(Node::Neg(Box::new(inner)));
        }
        self.primary()
    }

    fn indices(&mut self, allow_empty: bool) -> Result<Vec<(Idx, usize)>, Error> {
        self.expect('[')?;
        let mut out = Vec::new();
        if allow_empty && self.eat(']') {
            return Ok(out);
        }
        loop {
            match self.bump() {
                (Tok::Int(s), pos) => out.push((Idx::Lit(s), pos)),
                (Tok::Name(s), pos) => out.push((Idx::Var(s), pos)),
                (t, pos) => return Err(err(pos, format!("expected an index, found {}", describe(&t)))),
            }
            if self.eat(']') {
                return Ok(out);
            }
            self.expect(',')?;
        }
    }

    fn primary(&mut self) -> Result<Node, Error> {
        let (tok, pos) = self.bump();
        match tok {
            Tok::Int(num) => {
                let text = if self.eat('/') {
                    match self.bump() {
                        (Tok::Int(den), dpos) => {
                            if den.bytes().all(|b| b == b'0') {
                                return Err(err(dpos, "zero denominator"));
                            }
                            format!("{num}/{den}")
                        }
                        (t, p) => return Err(err(p, format!("expected a denominator, found {}", describe(&t)))),
                    }
                } else {
                    num
                };
                let v = text.parse::<Q>().map_err(|e| err(pos, e.to_string()))?;
                Ok(Node::Num(v))
            }
            Tok::Sym('(') => {
                let inner = self.expr()?;
                self.expect(')')?;
                Ok(inner)
            }
            Tok::Name(name) => {
                if *self.peek() == Tok::Sym('<') {
                    return self.user_field(name, pos);
                }
                match name.as_str() {
                    "t" => Ok(Node::Param(Param::T)),
                    "s" => Ok(Node::Param(Param::S)),
                    "m2" => Ok(Node::Param(Param::M2)),
                    "d" => {
                        self.expect('(')?;
                        let inner = self.expr()?;
                        self.expect(')')?;
                        Ok(Node::D(Box::new(inner)))
                    }
                    "tr" => {
                        self.expect('(')?;
                        let mut args = vec![self.expr()?];
                        while self.eat(',') {
                            args.push(self.expr()?);
                        }
                        self.expect(')')?;
                        Ok(Node::Trace(args, pos))
                    }
                    "eps" => Ok(Node::Eps {
                        idx: self.indices(false)?,
                        pos,
                    }),
                    "w" | "e" | "phi" => {
                        let field = match name.as_str() {
                            "w" => Field::Omega,
                            "e" => Field::Vielbein,
                            _ => Field::Phi,
                        };
                        Ok(Node::Field {
                            field,
                            idx: self.indices(false)?,
                            pos,
                        })
                    }
                    "J" | "P" => {
                        let kind = if name == "J" { GenKind::J } else { GenKind::P };
                        Ok(Node::Gen {
                            kind,
                            idx: self.indices(false)?,
                            pos,
                        })
                    }
                    _ => Err(err(
                        pos,
                        format!("unknown symbol '{name}' (user fields need a degree, e.g. {name}<1>[0])"),
                    )),
                }
            }
            t => Err(err(pos, format!("unexpected {}", describe(&t)))),
        }
    }

    fn user_field(&mut self, name: String, pos: usize) -> Result<Node, Error> {
        self.expect('<')?;
        let degree = match self.bump() {
            (Tok::Int(s), p) => match s.parse::<u8>() {
                Ok(d) if d <= MAX_USER_DEGREE => d,
                _ => return Err(err(p, format!("form degree must be at most {MAX_USER_DEGREE}"))),
            },
            (t, p) => return Err(err(p, format!("expected a form degree, found {}", describe(&t)))),
        };
        self.expect('>')?;
        Ok(Node::Field {
            field: Field::user(&name, degree),
            idx: self.indices(true)?,
            pos,
        })
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(s) => format!("number {s}"),
        Tok::Name(s) => format!("'{s}'"),
        Tok::Sym(c) => format!("'{c}'"),
        Tok::End => "end of input".into(),
    }
}

/// A form that may carry one generator factor per term: `None` keys are
/// plain forms.
type Lin = BTreeMap<Option<GeneratorId>, FormExpr>;

fn lin_form(x: FormExpr) -> Lin {
    let mut out = Lin::new();
    if !x.is_zero() {
        out.insert(None, x);
    }
    out
}

fn lin_add(a: &mut Lin, b: Lin) {
    for (k, v) in b {
        let e = a.entry(k.clone()).or_insert_with(FormExpr::zero);
        *e += &v;
        if e.is_zero() {
            a.remove(&k);
        }
    }
}

fn lin_map(a: Lin, f: impl Fn(&FormExpr) -> FormExpr) -> Lin {
    a.into_iter()
        .map(|(k, v)| (k, f(&v)))
        .filter(|(_, v)| !v.is_zero())
        .collect()
}

struct Evaluator {
    n: usize,
    dim: u8,
    env: Vec<(String, u8)>,
    algebra: Option<Arc<LieAlgebra>>,
    tensor: Option<InvariantTensor>,
}

impl Evaluator {
    fn new(n: usize) -> Result<Self, Error> {
        if n == 0 || 2 * n + 1 > 32 {
            return Err(Error::InvalidN(n));
        }
        Ok(Evaluator {
            n,
            dim: (2 * n + 1) as u8,
            env: Vec::new(),
            algebra: None,
            tensor: None,
        })
    }

    fn index(&self, (i, pos): &(Idx, usize)) -> Result<u8, Error> {
        match i {
            Idx::Lit(s) => match s.parse::<u64>() {
                Ok(v) if v < u64::from(self.dim) => Ok(v as u8),
                _ => Err(err(
                    *pos,
                    format!("index {s} out of range: n = {} allows 0..{}", self.n, self.dim - 1),
                )),
            },
            Idx::Var(name) => self
                .env
                .iter()
                .rev()
                .find(|(k, _)| k == name)
                .map(|(_, v)| *v)
                .ok_or_else(|| err(*pos, format!("index '{name}' is not bound by an eps factor"))),
        }
    }

    fn indices(&self, idx: &[(Idx, usize)]) -> Result<Vec<u8>, Error> {
        idx.iter().map(|i| self.index(i)).collect()
    }

    fn eval(&mut self, node: &Node) -> Result<Lin, Error> {
        match node {
            Node::Num(v) => Ok(lin_form(FormExpr::scalar(Scalar::from(v.clone())))),
            Node::Param(p) => Ok(lin_form(FormExpr::scalar(Scalar::param(*p)))),
            Node::Field { field, idx, pos } => {
                let values = self.indices(idx)?;
                if let Some(arity) = field.arity() {
                    if values.len() != arity {
                        return Err(err(
                            *pos,
                            format!("{} takes {arity} index(es), got {}", field.name(), values.len()),
                        ));
                    }
                }
                let x = match field {
                    Field::Omega => FormExpr::omega(values[0], values[1]),
                    _ => FormExpr::field(field.clone(), &values),
                };
                Ok(lin_form(x))
            }
            Node::Gen { kind, idx, pos } => {
                let values = self.indices(idx)?;
                let mut out = Lin::new();
                match (kind, values.as_slice()) {
                    (GenKind::J, [a, b]) => {
                        if let Some((g, sign)) = GeneratorId::j(*a, *b) {
                            out.insert(Some(g), FormExpr::scalar(Scalar::int(sign)));
                        }
                    }
                    (GenKind::P, [a]) => {
                        out.insert(Some(GeneratorId::p(*a)), FormExpr::one());
                    }
                    _ => return Err(err(*pos, "J takes two indices and P takes one")),
                }
                Ok(out)
            }
            Node::Eps { idx, pos } => {
                if idx.len() != usize::from(self.dim) {
                    return Err(err(
                        *pos,
                        format!("eps needs {} indices for n = {}, got {}", self.dim, self.n, idx.len()),
                    ));
                }
                let values = self.indices(idx)?;
                Ok(lin_form(FormExpr::scalar(Scalar::int(epsilon(&values)))))
            }
            Node::D(inner) => {
                let x = self.eval(inner)?;
                Ok(lin_map(x, FormExpr::ext_d))
            }
            Node::Neg(inner) => {
                let x = self.eval(inner)?;
                Ok(lin_map(x, |v| -v))
            }
            Node::Sum(terms) => {
                let mut out = Lin::new();
                for t in terms {
                    let x = self.eval(t)?;
                    lin_add(&mut out, x);
                }
                Ok(out)
            }
            Node::Prod(factors, pos) => self.product(factors, *pos),
            Node::Trace(args, pos) => self.trace(args, *pos),
        }
    }

    fn product(&mut self, factors: &[Node], pos: usize) -> Result<Lin, Error> {
        let binders: Vec<&Node> = factors.iter().filter(|f| matches!(f, Node::Eps { .. })).collect();
        let letters: Vec<(String, usize)> = match binders.as_slice() {
            [] => Vec::new(),
            [Node::Eps { idx, .. }] => {
                let mut names: Vec<(String, usize)> = Vec::new();
                for (i, p) in idx {
                    if let Idx::Var(name) = i {
                        if self.env.iter().any(|(k, _)| k == name) {
                            return Err(err(*p, format!("index '{name}' is already bound")));
                        }
                        if !names.iter().any(|(k, _)| k == name) {
                            names.push((name.clone(), *p));
                        }
                    }
                }
                names
            }
            _ => return Err(err(pos, "at most one eps factor per product")),
        };
        let mut out = Lin::new();
        let mut values = Vec::new();
        self.sum_over(factors, &letters, &mut values, &mut out)?;
        Ok(out)
    }

    fn sum_over(
        &mut self,
        factors: &[Node],
        letters: &[(String, usize)],
        values: &mut Vec<u8>,
        out: &mut Lin,
    ) -> Result<(), Error> {
        if values.len() == letters.len() {
            let base = self.env.len();
            for ((name, _), v) in letters.iter().zip(values.iter()) {
                self.env.push((name.clone(), *v));
            }
            let r = self.plain_product(factors);
            self.env.truncate(base);
            lin_add(out, r?);
            return Ok(());
        }
        // Letters inside one eps only contribute when pairwise distinct.
        for v in 0..self.dim {
            if values.contains(&v) {
                continue;
            }
            values.push(v);
            self.sum_over(factors, letters, values, out)?;
            values.pop();
        }
        Ok(())
    }

    fn plain_product(&mut self, factors: &[Node]) -> Result<Lin, Error> {
        let mut acc = lin_form(FormExpr::one());
        for f in factors {
            let x = self.eval(f)?;
            let mut next = Lin::new();
            for (ka, a) in &acc {
                for (kb, b) in &x {
                    let key = match (ka, kb) {
                        (Some(_), Some(_)) => {
                            return Err(err(node_pos(f), "product of two generators"));
                        }
                        (Some(k), None) | (None, Some(k)) => Some(k.clone()),
                        (None, None) => None,
                    };
                    let mut term = Lin::new();
                    let w = a.wedge(b);
                    if !w.is_zero() {
                        term.insert(key, w);
                    }
                    lin_add(&mut next, term);
                }
            }
            acc = next;
            if acc.is_empty() {
                break;
            }
        }
        Ok(acc)
    }

    fn trace(&mut self, args: &[Node], pos: usize) -> Result<Lin, Error> {
        if self.algebra.is_none() {
            self.algebra = Some(Arc::new(build_poincare(self.n)?));
            self.tensor = Some(invariant_tensor(self.n)?);
        }
        let alg = self.algebra.clone().unwrap();
        let mut forms = Vec::new();
        for a in args {
            let x = self.eval(a)?;
            let mut degree = None;
            let mut comps = Vec::new();
            for (k, v) in x {
                let g = k.ok_or_else(|| {
                    err(
                        node_pos(a),
                        "trace arguments must be generator valued, e.g. J[0,1]*w[0,1]",
                    )
                })?;
                let d = v
                    .degree()
                    .ok_or_else(|| err(node_pos(a), "trace argument is not of a single form degree"))?;
                if *degree.get_or_insert(d) != d {
                    return Err(err(node_pos(a), "trace argument is not of a single form degree"));
                }
                let i = alg
                    .index_of(&g)
                    .ok_or_else(|| err(node_pos(a), format!("{g} is not a generator")))?;
                comps.push((i, v));
            }
            forms.push(LieForm::from_components(&alg, degree.unwrap_or(0), comps)?);
        }
        let tensor = self.tensor.as_ref().unwrap();
        if forms.len() != tensor.rank() {
            return Err(err(
                pos,
                format!(
                    "tr takes {} arguments for n = {}, got {}",
                    tensor.rank(),
                    self.n,
                    forms.len()
                ),
            ));
        }
        let refs: Vec<&LieForm> = forms.iter().collect();
        Ok(lin_form(trace(&refs, tensor)?))
    }
}

fn node_pos(n: &Node) -> usize {
    match n {
        Node::Field { pos, .. } | Node::Gen { pos, .. } | Node::Eps { pos, .. } => *pos,
        Node::Prod(_, pos) | Node::Trace(_, pos) => *pos,
        Node::D(inner) | Node::Neg(inner) => node_pos(inner),
        Node::Sum(terms) => terms.first().map_or(0, node_pos),
        Node::Num(_) | Node::Param(_) => 0,
    }
}

fn parse_tree(src: &str, base: usize) -> Result<Node, Error> {
    let mut p = Parser {
        toks: lex(src, base)?,
        at: 0,
        depth: 0,
    };
    let node = p.expr()?;
    match p.peek() {
        Tok::End => Ok(node),
        t => Err(err(p.pos(), format!("unexpected {} after expression", describe(t)))),
    }
}

/// Parse an expression in the algebra with D = 2n+1 index values.
pub fn parse_expr(src: &str, n: usize) -> Result<FormExpr, Error> {
    let node = parse_tree(src, 0)?;
    let mut ev = Evaluator::new(n)?;
    let mut x = ev.eval(&node)?;
    if x.keys().any(Option::is_some) {
        return Err(err(0, "generators J/P may only appear inside tr(...)"));
    }
    Ok(x.remove(&None).unwrap_or_else(FormExpr::zero))
}

fn all_generators(dim: u8) -> Vec<GeneratorId> {
    let mut out = Vec::new();
    for a in 0..dim {
        for b in (a + 1)..dim {
            out.push(GeneratorId::j(a, b).expect("a < b").0);
        }
    }
    out.extend((0..dim).map(GeneratorId::p));
    out
}

fn constant_scalar(x: &FormExpr, pos: usize) -> Result<Scalar, Error> {
    let mut out = Scalar::zero();
    for (m, c) in x.terms() {
        if !m.atoms().is_empty() {
            return Err(err(pos, "bracket coefficients must be scalars"));
        }
        out += c;
    }
    Ok(out)
}

/// Parse an algebra definition: one `[X, Y] = Σ c Z` line per nonzero
/// bracket over the J/P basis, `#` comments and blank lines ignored.
pub fn parse_algebra(src: &str, name: &str, n: usize) -> Result<LieAlgebra, Error> {
    let mut ev = Evaluator::new(n)?;
    let mut brackets = Vec::new();
    let mut deformed = false;
    let mut offset = 0;
    for line in src.split_inclusive('\n') {
        let base = offset;
        offset += line.len();
        let body = line.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        let eq = body.find('=').ok_or_else(|| err(base, "expected '[X, Y] = ...'"))?;
        let (lhs, rhs) = (&body[..eq], &body[eq + 1..]);
        let pair = parse_pair(lhs, base, &mut ev)?;
        let rhs_pos = base + eq + 1;
        let value = ev.eval(&parse_tree(rhs, rhs_pos)?)?;
        let mut combo = Vec::new();
        for (k, v) in value {
            let g = k.ok_or_else(|| err(rhs_pos, "right-hand side must be a combination of generators"))?;
            let c = constant_scalar(&v, rhs_pos)?;
            deformed |= c.depends_on(Param::M2);
            combo.push((g, c));
        }
        brackets.push((pair.0, pair.1, combo));
    }
    LieAlgebra::from_table(name, n, all_generators(ev.dim), brackets, deformed.then_some(Param::M2))
}

fn parse_pair(src: &str, base: usize, ev: &mut Evaluator) -> Result<(GeneratorId, GeneratorId), Error> {
    let mut p = Parser {
        toks: lex(src, base)?,
        at: 0,
        depth: 0,
    };
    p.expect('[')?;
    let x = generator(&mut p, ev)?;
    p.expect(',')?;
    let y = generator(&mut p, ev)?;
    p.expect(']')?;
    match p.peek() {
        Tok::End => Ok((x, y)),
        t => Err(err(p.pos(), format!("unexpected {}", describe(t)))),
    }
}

fn generator(p: &mut Parser, ev: &mut Evaluator) -> Result<GeneratorId, Error> {
    let pos = p.pos();
    let node = p.primary()?;
    if !matches!(node, Node::Gen { .. }) {
        return Err(err(pos, "expected J[a,b] or P[a]"));
    }
    let value = ev.eval(&node)?;
    match value.into_iter().next() {
        Some((Some(g), c)) if c == FormExpr::one() => Ok(g),
        Some(_) => Err(err(pos, "write J with ascending indices in bracket definitions")),
        None => Err(err(pos, "J[a,a] vanishes")),
    }
}
