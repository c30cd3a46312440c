//! Text, LaTeX and JSON renderings of forms and derivation reports.

use serde_json::{json, Map, Value};

use gwzw_core::form::{Atom, Field, FormExpr};
use gwzw_core::gravity::DerivationReport;
use gwzw_core::indexed::latex_rational;
use gwzw_core::scalar::{Param, ParamExp, Scalar, Q};
use gwzw_core::verify::CheckOutcome;
use gwzw_core::Error;

use crate::parse::MAX_USER_DEGREE;

/// Version of the JSON expression and report schema.
pub const SCHEMA_VERSION: u64 = 1;

/// Largest parameter exponent accepted by the JSON decoder.
pub const MAX_EXPONENT: u16 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Latex,
    Json,
}

// ---------------------------------------------------------------- LaTeX

fn latex_indices(idx: &[u8]) -> String {
    let parts: Vec<String> = idx.iter().map(u8::to_string).collect();
    if idx.iter().all(|&i| i < 10) {
        parts.concat()
    } else {
        parts.join(",")
    }
}

fn latex_atom(a: &Atom) -> String {
    let symbol = match &a.field {
        Field::Omega => "\\omega".to_string(),
        Field::Vielbein => "e".to_string(),
        Field::Phi => "\\phi".to_string(),
        Field::User { name, .. } if name.chars().count() == 1 => name.to_string(),
        Field::User { name, .. } => format!("\\mathrm{{{}}}", name.replace('_', "\\_")),
    };
    let body = if a.indices.is_empty() {
        symbol
    } else {
        format!("{symbol}^{{{}}}", latex_indices(&a.indices))
    };
    if a.d {
        format!("d{body}")
    } else {
        body
    }
}

fn latex_params(e: &ParamExp) -> String {
    let mut out = String::new();
    for (p, k) in [(Param::T, e.t), (Param::S, e.s), (Param::M2, e.m2)] {
        let base = match p {
            Param::M2 => "m",
            other => other.name(),
        };
        let power = if p == Param::M2 { 2 * u32::from(k) } else { u32::from(k) };
        match power {
            0 => {}
            1 => out.push_str(base),
            k => out.push_str(&format!("{base}^{{{k}}}")),
        }
    }
    out
}

/// LaTeX for a scalar; multi-term values are wrapped in \left( \right).
pub fn latex_scalar(c: &Scalar) -> String {
    let parts: Vec<(bool, String)> = c
        .terms()
        .map(|(e, v)| {
            let neg = v < &Q::from_integer(0.into());
            let mag = if neg { -v.clone() } else { v.clone() };
            let vars = latex_params(e);
            let text = if vars.is_empty() {
                latex_rational(&mag)
            } else if mag == Q::from_integer(1.into()) {
                vars
            } else {
                format!("{}{vars}", latex_rational(&mag))
            };
            (neg, text)
        })
        .collect();
    join_signed(&parts)
}

fn join_signed(parts: &[(bool, String)]) -> String {
    if parts.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (neg, text)) in parts.iter().enumerate() {
        match (i, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(text);
    }
    out
}

/// Pull the sign out of a single-term coefficient.
fn split_sign(c: &Scalar) -> (bool, Scalar) {
    let mut terms = c.terms();
    match (terms.next(), terms.next()) {
        (Some((_, v)), None) if v < &Q::from_integer(0.into()) => (true, -c),
        _ => (false, c.clone()),
    }
}

/// LaTeX with wedge products written as juxtaposition.
pub fn latex_form(x: &FormExpr) -> String {
    let parts: Vec<(bool, String)> = x
        .terms()
        .map(|(m, c)| {
            let word: Vec<String> = m.atoms().iter().map(latex_atom).collect();
            let word = word.join(" ");
            let (neg, coeff) = split_sign(c);
            let text = if word.is_empty() {
                latex_scalar(&coeff)
            } else if coeff.as_const() == Some(Q::from_integer(1.into())) {
                word
            } else if coeff.terms().count() == 1 {
                format!("{} {word}", latex_scalar(&coeff))
            } else {
                format!("\\left({}\\right) {word}", latex_scalar(&coeff))
            };
            (neg, text)
        })
        .collect();
    join_signed(&parts)
}

// ---------------------------------------------------------------- JSON

fn json_scalar(c: &Scalar) -> Value {
    Value::Array(
        c.terms()
            .map(|(e, v)| {
                let mut m = Map::new();
                m.insert("coeff".into(), Value::String(v.to_string()));
                for (p, k) in [(Param::T, e.t), (Param::S, e.s), (Param::M2, e.m2)] {
                    if k > 0 {
                        m.insert(p.name().into(), json!(k));
                    }
                }
                Value::Object(m)
            })
            .collect(),
    )
}

fn json_atom(a: &Atom) -> Value {
    let base = match &a.field {
        Field::User { name, degree } => json!({
            "op": "field",
            "name": name.as_ref(),
            "degree": degree,
            "args": a.indices.to_vec(),
        }),
        other => json!({ "op": other.name(), "args": a.indices.to_vec() }),
    };
    if a.d {
        json!({ "op": "d", "args": [base] })
    } else {
        base
    }
}

/// Expression tree: a `sum` of `wedge` terms, each with a scalar and atom args.
pub fn expr_tree(x: &FormExpr) -> Value {
    let terms: Vec<Value> = x
        .terms()
        .map(|(m, c)| {
            json!({
                "op": "wedge",
                "scalar": json_scalar(c),
                "args": m.atoms().iter().map(json_atom).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({ "op": "sum", "args": terms })
}

/// Versioned JSON document for one expression.
pub fn emit_json(x: &FormExpr) -> String {
    json!({ "schema": "gwzw.expr", "version": SCHEMA_VERSION, "expr": expr_tree(x) }).to_string()
}

fn jerr(msg: impl Into<String>) -> Error {
    Error::Json(msg.into())
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value, Error> {
    v.get(key).ok_or_else(|| jerr(format!("missing \"{key}\"")))
}

fn op_of(v: &Value) -> Result<&str, Error> {
    field(v, "op")?.as_str().ok_or_else(|| jerr("\"op\" must be a string"))
}

fn args_of(v: &Value) -> Result<&Vec<Value>, Error> {
    field(v, "args")?
        .as_array()
        .ok_or_else(|| jerr("\"args\" must be an array"))
}

fn decode_q(v: &Value) -> Result<Q, Error> {
    let s = v
        .as_str()
        .ok_or_else(|| jerr("coefficients are strings like \"-3/4\""))?;
    let well_formed = {
        let body = s.strip_prefix('-').unwrap_or(s);
        let mut parts = body.splitn(2, '/');
        let num = parts.next().unwrap_or("");
        let den = parts.next();
        let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
        digits(num) && den.is_none_or(|d| digits(d) && !d.bytes().all(|b| b == b'0'))
    };
    if !well_formed {
        return Err(jerr(format!("bad rational {s:?}")));
    }
    s.parse::<Q>().map_err(|e| jerr(format!("bad rational {s:?}: {e}")))
}

fn decode_scalar(v: &Value) -> Result<Scalar, Error> {
    let terms = v.as_array().ok_or_else(|| jerr("\"scalar\" must be an array"))?;
    let mut out = Scalar::zero();
    for t in terms {
        let obj = t.as_object().ok_or_else(|| jerr("scalar terms are objects"))?;
        let mut exp = ParamExp::default();
        for (k, val) in obj {
            let p = match k.as_str() {
                "coeff" => continue,
                "t" => Param::T,
                "s" => Param::S,
                "m2" => Param::M2,
                other => return Err(jerr(format!("unknown scalar key {other:?}"))),
            };
            let e = val
                .as_u64()
                .filter(|e| *e <= u64::from(MAX_EXPONENT))
                .ok_or_else(|| jerr(format!("exponent of {k} must be an integer in 0..={MAX_EXPONENT}")))?;
            exp = exp.with(p, e as u16);
        }
        out += &Scalar::monomial(exp, decode_q(field(t, "coeff")?)?);
    }
    Ok(out)
}

fn decode_indices(v: &Value) -> Result<Vec<u8>, Error> {
    args_of(v)?
        .iter()
        .map(|i| {
            i.as_u64()
                .filter(|i| *i < 32)
                .map(|i| i as u8)
                .ok_or_else(|| jerr("indices are integers in 0..32"))
        })
        .collect()
}

fn valid_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn decode_atom(v: &Value, allow_d: bool) -> Result<FormExpr, Error> {
    let op = op_of(v)?;
    let (field, arity) = match op {
        "d" if allow_d => {
            let args = args_of(v)?;
            if args.len() != 1 {
                return Err(jerr("d takes one argument"));
            }
            return Ok(decode_atom(&args[0], false)?.ext_d());
        }
        "w" => (Field::Omega, Some(2)),
        "e" => (Field::Vielbein, Some(1)),
        "phi" => (Field::Phi, Some(1)),
        "field" => {
            let name = field(v, "name")?
                .as_str()
                .ok_or_else(|| jerr("\"name\" must be a string"))?;
            if !valid_name(name) {
                return Err(jerr(format!("invalid field name {name:?}")));
            }
            let degree = field(v, "degree")?
                .as_u64()
                .filter(|d| *d <= u64::from(MAX_USER_DEGREE))
                .ok_or_else(|| jerr(format!("degree must be in 0..={MAX_USER_DEGREE}")))?;
            (Field::user(name, degree as u8), None)
        }
        other => return Err(jerr(format!("unknown atom op {other:?}"))),
    };
    let idx = decode_indices(v)?;
    if arity.is_some_and(|a| a != idx.len()) {
        return Err(jerr(format!("{op} takes {} indices", arity.unwrap_or(0))));
    }
    Ok(match field {
        Field::Omega => FormExpr::omega(idx[0], idx[1]),
        f => FormExpr::field(f, &idx),
    })
}

/// Decode an expression tree (the value of "expr").
pub fn decode_tree(v: &Value) -> Result<FormExpr, Error> {
    if op_of(v)? != "sum" {
        return Err(jerr("expression root must be a \"sum\""));
    }
    let mut out = FormExpr::zero();
    for t in args_of(v)? {
        if op_of(t)? != "wedge" {
            return Err(jerr("sum arguments must be \"wedge\" terms"));
        }
        let mut acc = FormExpr::scalar(decode_scalar(field(t, "scalar")?)?);
        for a in args_of(t)? {
            acc = acc.wedge(&decode_atom(a, true)?);
        }
        out += &acc;
    }
    Ok(out)
}

/// Decode a versioned expression document.
pub fn decode_json(src: &str) -> Result<FormExpr, Error> {
    let v: Value = serde_json::from_str(src).map_err(|e| jerr(e.to_string()))?;
    match v.get("version").and_then(Value::as_u64) {
        Some(SCHEMA_VERSION) => {}
        Some(other) => return Err(jerr(format!("unsupported schema version {other}"))),
        None => return Err(jerr("missing \"version\"")),
    }
    if v.get("schema").and_then(Value::as_str) != Some("gwzw.expr") {
        return Err(jerr("not a gwzw.expr document"));
    }
    decode_tree(field(&v, "expr")?)
}

// ---------------------------------------------------------------- reports

/// Number of terms up to which text and LaTeX reports show route values.
const SHOW_TERMS: usize = 12;

fn verdict_word(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn show(x: &FormExpr, fmt: Format) -> String {
    match fmt {
        Format::Latex => latex_form(x),
        _ => x.to_string(),
    }
}

/// Render a derivation report.
pub fn emit_report(rep: &DerivationReport, fmt: Format) -> String {
    if fmt == Format::Json {
        return report_json(rep).to_string();
    }
    let comment = if fmt == Format::Latex { "% " } else { "" };
    let mut out = format!("{comment}{} (n = {})\n", rep.target, rep.n);
    for (name, x) in &rep.routes {
        if x.len() <= SHOW_TERMS {
            out.push_str(&format!("{comment}  {name} = {}\n", show(x, fmt)));
        } else {
            out.push_str(&format!("{comment}  {name}: {} terms\n", x.len()));
        }
    }
    for v in &rep.verdicts {
        out.push_str(&format!(
            "{comment}{} {} = {} (residual {} terms)\n",
            verdict_word(v.passed()),
            v.left,
            v.right,
            v.residual.len()
        ));
    }
    if let Some((term, _)) = &rep.boundary {
        out.push_str(&format!("{comment}exact form: d({})\n", term.latex()));
    }
    if let Some(c) = &rep.constant {
        out.push_str(&format!("{comment}constant relative to the action integrand: {c}\n"));
    }
    out.push_str(&format!("{comment}{}\n", verdict_word(rep.passed())));
    out
}

pub fn report_json(rep: &DerivationReport) -> Value {
    json!({
        "schema": "gwzw.report",
        "version": SCHEMA_VERSION,
        "target": rep.target,
        "n": rep.n,
        "passed": rep.passed(),
        "routes": rep.routes.iter().map(|(name, x)| json!({ "name": name, "expr": expr_tree(x) })).collect::<Vec<_>>(),
        "verdicts": rep.verdicts.iter().map(|v| json!({
            "left": v.left,
            "right": v.right,
            "passed": v.passed(),
            "residual": expr_tree(&v.residual),
        })).collect::<Vec<_>>(),
        "boundary": rep.boundary.as_ref().map(|(term, x)| json!({ "latex": term.latex(), "expr": expr_tree(x) })),
        "constant": rep.constant.as_ref().map(|c| c.to_string()),
    })
}

/// Render oracle-suite outcomes.
pub fn emit_outcomes(outcomes: &[CheckOutcome], fmt: Format) -> String {
    let all = outcomes.iter().all(|c| c.passed);
    match fmt {
        Format::Json => json!({
            "schema": "gwzw.verify",
            "version": SCHEMA_VERSION,
            "passed": all,
            "checks": outcomes.iter().map(|c| json!({
                "name": c.name, "n": c.n, "passed": c.passed, "detail": c.detail,
            })).collect::<Vec<_>>(),
        })
        .to_string(),
        _ => {
            let comment = if fmt == Format::Latex { "% " } else { "" };
            let mut out = String::new();
            for c in outcomes {
                out.push_str(&format!(
                    "{comment}{} n={} {}: {}\n",
                    verdict_word(c.passed),
                    c.n,
                    c.name,
                    c.detail
                ));
            }
            out.push_str(&format!("{comment}{}\n", verdict_word(all)));
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_expr;

    #[test]
    fn latex_juxtaposes_wedges() {
        let x = parse_expr("w[0,1]^e[2] - 1/2*m2*t*d(phi[0])", 1).unwrap();
        assert_eq!(latex_form(&x), "\\omega^{01} e^{2} - \\frac{1}{2}tm^{2} d\\phi^{0}");
        assert_eq!(latex_form(&FormExpr::zero()), "0");
        let y = parse_expr("(t + s)*w[0,1]", 1).unwrap();
        assert_eq!(latex_form(&y), "\\left(s + t\\right) \\omega^{01}");
    }

    #[test]
    fn json_round_trip_and_versioning() {
        let x = parse_expr("-3/4*t*t*m2*aJ<1>[0,2]^d(phi[1]) + w[1,2]^e[0] - 5", 1).unwrap();
        let doc = emit_json(&x);
        assert_eq!(decode_json(&doc).unwrap(), x);
        assert!(doc.contains("\"version\":1"));
        let bumped = doc.replace("\"version\":1", "\"version\":2");
        assert!(decode_json(&bumped).is_err());
    }

    #[test]
    fn decoder_rejects_malformed_documents() {
        for doc in [
            "",
            "{}",
            "{\"version\":1,\"schema\":\"gwzw.expr\",\"expr\":{\"op\":\"sum\",\"args\":[{\"op\":\"wedge\",\"scalar\":[{\"coeff\":\"1/0\"}],\"args\":[]}]}}",
            "{\"version\":1,\"schema\":\"gwzw.expr\",\"expr\":{\"op\":\"sum\",\"args\":[{\"op\":\"wedge\",\"scalar\":[{\"coeff\":\"1\"}],\"args\":[{\"op\":\"w\",\"args\":[0]}]}]}}",
            "{\"version\":1,\"schema\":\"gwzw.expr\",\"expr\":{\"op\":\"sum\",\"args\":[{\"op\":\"wedge\",\"scalar\":[{\"coeff\":\"1\"}],\"args\":[{\"op\":\"field\",\"name\":\"a b\",\"degree\":1,\"args\":[]}]}]}}",
            "{\"version\":1,\"schema\":\"gwzw.expr\",\"expr\":{\"op\":\"sum\",\"args\":[{\"op\":\"wedge\",\"scalar\":[{\"coeff\":\"1\",\"t\":99999}],\"args\":[]}]}}",
        ] {
            assert!(decode_json(doc).is_err(), "{doc}");
        }
    }
}
