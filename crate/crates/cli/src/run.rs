//! Command-line surface. Exit codes: 0 when every asserted identity holds,
//! 1 when one fails (the report is still printed), 2 for usage, parse or
//! configuration errors.

use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};

use gwzw_core::coset::{compare_ads_series, dress, CosetElement};
use gwzw_core::form::FormExpr;
use gwzw_core::gravity::{cs_gravity_report, gwzw_reduce, gwzw_reduce_3d, DerivationReport, Route};
use gwzw_core::jet::{assign_for, check_identity, eval};
use gwzw_core::lie::{build_ads, build_poincare, check_jacobi, CosetSplit, LieAlgebra};
use gwzw_core::lieform::{cov_d, LieForm};
use gwzw_core::scalar::Q;
use gwzw_core::verify::{verify_all, VerifyConfig};
use gwzw_core::Error;

use crate::emit::{emit_outcomes, emit_report, latex_form, Format};
use crate::parse::{parse_algebra, parse_expr};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Largest series order accepted for coset dressing.
pub const MAX_ORDER: u32 = 8;

#[derive(Parser, Debug)]
#[command(
    name = "gwzw",
    version,
    about = "Derive and verify gauged WZW / Chern-Simons gravity identities"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = FormatArg::Text, global = true)]
    format: FormatArg,
    /// Overall normalisation k of the action S = k ∫ L, as p or p/q.
    #[arg(long, default_value = "1", global = true)]
    k: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Text,
    Latex,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RouteArg {
    All,
    Direct,
    #[value(alias = "eq44")]
    Decomposition,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a derivation pipeline.
    Derive {
        #[command(subcommand)]
        target: DeriveTarget,
    },
    /// Run the oracle suite.
    Verify {
        #[command(subcommand)]
        scope: VerifyScope,
    },
    /// Evaluate an expression file on random jets; `lhs == rhs` checks an identity.
    Eval {
        #[arg(long)]
        expr: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        base_dim: usize,
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Seeds to try when checking an identity.
        #[arg(long, default_value_t = 5)]
        trials: usize,
    },
}

#[derive(Subcommand, Debug)]
enum DeriveTarget {
    /// Chern–Simons gravity Lagrangian for e + ω.
    Cs {
        #[arg(long)]
        n: usize,
    },
    /// Gauged WZW reduction to the topological boundary action.
    Gwzw {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = RouteArg::All)]
        route: RouteArg,
    },
    /// Nonlinear coset fields V and W from dressing e + ω.
    Coset {
        /// poincare, ads, or a path to an algebra definition file.
        #[arg(long, default_value = "poincare")]
        algebra: String,
        #[arg(long, default_value_t = 4)]
        order: u32,
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
}

#[derive(Subcommand, Debug)]
enum VerifyScope {
    /// Every identity on jets, the numeric routes and the negative control.
    All {
        #[arg(long, value_delimiter = ',', default_values_t = vec![1, 2])]
        n: Vec<usize>,
        /// Jet seeds per symbolic identity.
        #[arg(long, default_value_t = 5)]
        seeds: usize,
        /// Seeds for the purely numeric recomputations.
        #[arg(long, default_value_t = 5)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        first_seed: u64,
        /// Base dimension; 2n + 2 when omitted.
        #[arg(long)]
        base_dim: Option<usize>,
    },
}

/// Validated settings shared by the pipelines.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub format: Format,
    pub k: Q,
}

impl RunConfig {
    fn from_cli(cli: &Cli) -> Result<Self, Error> {
        let k = parse_expr(&cli.k, 1)
            .ok()
            .and_then(|x| x.ratio_to(&FormExpr::one()))
            .ok_or_else(|| Error::Parse {
                pos: 0,
                msg: format!("--k must be a rational number, got {:?}", cli.k),
            })?;
        if k == Q::from_integer(0.into()) {
            return Err(Error::Unsupported("--k must be nonzero".into()));
        }
        let format = match cli.format {
            FormatArg::Text => Format::Text,
            FormatArg::Latex => Format::Latex,
            FormatArg::Json => Format::Json,
        };
        Ok(RunConfig { format, k })
    }
}

struct Outcome {
    text: String,
    passed: bool,
}

/// Run with process-style arguments (the first is the program name).
pub fn run_command<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    let result = RunConfig::from_cli(&cli).and_then(|cfg| dispatch(&cli.command, &cfg));
    match result {
        Ok(o) => {
            let _ = write!(out, "{}", o.text);
            if o.passed {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(Error::IdentityFailed(msg)) => {
            let _ = writeln!(err, "identity failed: {msg}");
            EXIT_FAIL
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cmd: &Command, cfg: &RunConfig) -> Result<Outcome, Error> {
    match cmd {
        Command::Derive { target } => match target {
            DeriveTarget::Cs { n } => Ok(reports(&[cs_gravity_report(*n)?], cfg)),
            DeriveTarget::Gwzw { n, route } => {
                let route = match route {
                    RouteArg::All => Route::All,
                    RouteArg::Direct => Route::Direct,
                    RouteArg::Decomposition => Route::Decomposition,
                };
                let mut reps = Vec::new();
                if *n == 1 {
                    reps.push(gwzw_reduce_3d()?);
                }
                reps.push(gwzw_reduce(*n, route)?);
                Ok(reports(&reps, cfg))
            }
            DeriveTarget::Coset { algebra, order, n } => derive_coset(algebra, *order, *n, cfg),
        },
        Command::Verify {
            scope:
                VerifyScope::All {
                    n,
                    seeds,
                    trials,
                    first_seed,
                    base_dim,
                },
        } => {
            if n.is_empty() || n.iter().any(|&k| k == 0 || k > 2) {
                return Err(Error::Unsupported(format!(
                    "verify all supports n in {{1, 2}}, got {n:?}"
                )));
            }
            if *seeds == 0 || *trials == 0 {
                return Err(Error::Unsupported("--seeds and --trials must be positive".into()));
            }
            let vc = VerifyConfig {
                ns: n.clone(),
                seeds: *seeds,
                trials: *trials,
                first_seed: *first_seed,
                base_dim: *base_dim,
            };
            let outcomes = verify_all(&vc)?;
            Ok(Outcome {
                passed: outcomes.iter().all(|c| c.passed),
                text: emit_outcomes(&outcomes, cfg.format),
            })
        }
        Command::Eval {
            expr,
            seed,
            base_dim,
            n,
            trials,
        } => eval_file(expr, *seed, *base_dim, *n, *trials, cfg),
    }
}

fn reports(reps: &[DerivationReport], cfg: &RunConfig) -> Outcome {
    let passed = reps.iter().all(DerivationReport::passed);
    let text = match cfg.format {
        Format::Json => {
            let docs: Vec<_> = reps.iter().map(crate::emit::report_json).collect();
            let mut v = serde_json::json!({ "reports": docs, "k": cfg.k.to_string() });
            v["passed"] = serde_json::Value::Bool(passed);
            format!("{v}\n")
        }
        fmt => {
            let mut s = String::new();
            for r in reps {
                s.push_str(&emit_report(r, fmt));
                if r.boundary.is_some() && cfg.k != Q::from_integer(1.into()) {
                    let c = if fmt == Format::Latex { "% " } else { "" };
                    s.push_str(&format!("{c}action normalisation k = {}\n", cfg.k));
                }
            }
            s
        }
    };
    Outcome { text, passed }
}

fn load_algebra(source: &str, n: usize) -> Result<Arc<LieAlgebra>, Error> {
    let alg = match source {
        "poincare" => build_poincare(n)?,
        "ads" => build_ads(n)?,
        path => {
            let src = std::fs::read_to_string(path)
                .map_err(|e| Error::Unsupported(format!("cannot read algebra file {path}: {e}")))?;
            let name = std::path::Path::new(path)
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("user");
            let alg = parse_algebra(&src, name, n)?;
            let jacobi = check_jacobi(&alg);
            if !jacobi.passed() {
                return Err(Error::Unsupported(format!(
                    "{path} violates the Jacobi identity on {} triple(s)",
                    jacobi.violations.len() + jacobi.antisymmetry_violations.len()
                )));
            }
            CosetSplit::lorentz(&alg).validate(&alg)?;
            alg
        }
    };
    Ok(Arc::new(alg))
}

/// Components above this many terms are summarised by their size in text
/// and LaTeX output; JSON always carries the full expression.
const SHOW_TERMS: usize = 24;

fn show(x: &FormExpr, fmt: Format) -> String {
    if x.len() > SHOW_TERMS {
        format!("<{} terms>", x.len())
    } else if fmt == Format::Latex {
        latex_form(x)
    } else {
        x.to_string()
    }
}

fn derive_coset(source: &str, order: u32, n: usize, cfg: &RunConfig) -> Result<Outcome, Error> {
    if order > MAX_ORDER {
        return Err(Error::Unsupported(format!("--order at most {MAX_ORDER}")));
    }
    let alg = load_algebra(source, n)?;
    let a = LieForm::spin_connection(&alg).try_add(&LieForm::vielbein(&alg))?;
    let z = CosetElement::standard(&alg, order);
    let az = dress(&a, &z)?;
    let (v, w) = (az.translation_part(), az.lorentz_part());
    let dim = alg.dim();

    let mut checks: Vec<(String, bool)> = Vec::new();
    if alg.deformation().is_none() {
        let omega = LieForm::spin_connection(&alg);
        let expected_v = LieForm::vielbein(&alg).try_add(&cov_d(z.phi(), &omega)?)?;
        checks.push(("V = e + D phi".into(), v == expected_v));
        checks.push(("W = w".into(), w == omega));
    } else if source == "ads" {
        let cmp = compare_ads_series(&alg, order)?;
        let sign = cmp.matching_sign.map_or("none".to_string(), |s| format!("{s:+}"));
        checks.push((
            format!("closed-form series through m^{} (sign {sign})", 2 * order),
            cmp.passed(),
        ));
        checks.push(("last term with d phi".into(), cmp.exterior_matches));
        checks.push(("last term with D phi".into(), cmp.covariant_matches));
    }

    let mut text = String::new();
    let comment = if cfg.format == Format::Latex { "% " } else { "" };
    match cfg.format {
        Format::Json => {
            let comp = |x: FormExpr| crate::emit::expr_tree(&x);
            let vj: Vec<_> = (0..dim)
                .map(|a| serde_json::json!({ "index": [a], "expr": comp(v.p_component(a)) }))
                .collect();
            let mut wj = Vec::new();
            for a in 0..dim {
                for b in (a + 1)..dim {
                    wj.push(serde_json::json!({ "index": [a, b], "expr": comp(w.j_component(a, b)) }));
                }
            }
            let cj: Vec<_> = checks
                .iter()
                .map(|(name, ok)| serde_json::json!({ "name": name, "passed": ok }))
                .collect();
            let doc = serde_json::json!({
                "schema": "gwzw.coset",
                "version": crate::emit::SCHEMA_VERSION,
                "algebra": alg.name(),
                "n": n,
                "order": order,
                "V": vj,
                "W": wj,
                "checks": cj,
            });
            text.push_str(&format!("{doc}\n"));
        }
        fmt => {
            text.push_str(&format!(
                "{comment}coset dressing of e + w over {} (n = {n}, order {order})\n",
                alg.name()
            ));
            for a in 0..dim {
                text.push_str(&format!("{comment}V^{a} = {}\n", show(&v.p_component(a), fmt)));
            }
            for a in 0..dim {
                for b in (a + 1)..dim {
                    text.push_str(&format!("{comment}W^{a}{b} = {}\n", show(&w.j_component(a, b), fmt)));
                }
            }
            for (name, ok) in &checks {
                text.push_str(&format!("{comment}{} {name}\n", if *ok { "PASS" } else { "FAIL" }));
            }
        }
    }
    // For AdS only one of the two last-term variants has to match.
    let passed = if source == "ads" {
        checks.first().is_some_and(|c| c.1)
    } else {
        checks.iter().all(|c| c.1)
    };
    Ok(Outcome { text, passed })
}

fn read_expr(src: &str, n: usize) -> Result<FormExpr, Error> {
    if src.trim_start().starts_with('{') {
        crate::emit::decode_json(src)
    } else {
        parse_expr(src, n)
    }
}

fn eval_file(
    path: &PathBuf,
    seed: u64,
    base_dim: usize,
    n: usize,
    trials: usize,
    cfg: &RunConfig,
) -> Result<Outcome, Error> {
    let src = std::fs::read_to_string(path)
        .map_err(|e| Error::Unsupported(format!("cannot read {}: {e}", path.display())))?;
    if let Some(at) = src.find("==") {
        let lhs = read_expr(&src[..at], n)?;
        let rhs = read_expr(&src[at + 2..], n).map_err(|e| match e {
            Error::Parse { pos, msg } => Error::Parse { pos: pos + at + 2, msg },
            other => other,
        })?;
        let report = check_identity(&lhs, &rhs, trials.max(1), base_dim, seed)?;
        let text = match report.failures.first() {
            None => format!("PASS {} seeds, N = {base_dim}\n", report.trials),
            Some(w) => format!("FAIL {} of {} seeds; {w}\n", report.failures.len(), report.trials),
        };
        return Ok(Outcome {
            passed: report.passed(),
            text,
        });
    }
    let x = read_expr(&src, n)?;
    let jets = assign_for(&[&x], base_dim, seed)?;
    let value = eval(&x, &jets)?;
    let text = match cfg.format {
        Format::Json => {
            let coords: Vec<_> = value
                .nonzero()
                .map(|(m, c)| serde_json::json!({ "basis": gwzw_core::jet::basis_name(m), "value": c.to_string() }))
                .collect();
            format!(
                "{}\n",
                serde_json::json!({ "schema": "gwzw.eval", "version": crate::emit::SCHEMA_VERSION, "seed": seed, "base_dim": base_dim, "value": coords })
            )
        }
        _ => format!("{value}\n"),
    };
    Ok(Outcome { text, passed: true })
}
