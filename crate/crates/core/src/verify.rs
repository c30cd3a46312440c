//! The oracle suite: every symbolic identity re-checked on random jets, plus
//! fully numeric recomputations that never touch the symbolic expansion.

use std::sync::Arc;

use crate::coset::{dress, left_maurer_cartan, maurer_cartan, CosetElement};
use crate::form::FormExpr;
use crate::gravity::{cs_gravity_report, gwzw_reduce, gwzw_reduce_3d, DerivationReport, Route};
use crate::homotopy::{
    cartan_check, chern_simons, cs_words, invariant_polynomial_words, transgression, wz_term, HomotopyFamily,
};
use crate::jet::{
    assign_for, check_identity, eval, first_difference, num_dress, num_epsilon, num_trace, num_transgression,
    IdentityReport, JetForm, NumLieForm,
};
use crate::lie::{build_poincare, LieAlgebra};
use crate::lieform::{curvature, trace, LieForm};
use crate::scalar::q;
use crate::tensor::invariant_tensor;
use crate::Error;

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub ns: Vec<usize>,
    /// Jet seeds per symbolic identity.
    pub seeds: usize,
    /// Seeds for the purely numeric recomputations.
    pub trials: usize,
    pub first_seed: u64,
    /// Base dimension; 2n + 2 when unset.
    pub base_dim: Option<usize>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            ns: vec![1, 2],
            seeds: 5,
            trials: 5,
            first_seed: 1,
            base_dim: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub n: usize,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &str, n: usize, passed: bool, detail: String) -> CheckOutcome {
    CheckOutcome {
        name: name.to_string(),
        n,
        passed,
        detail,
    }
}

fn jet_outcome(name: &str, n: usize, r: &IdentityReport) -> CheckOutcome {
    let detail = match r.failures.first() {
        Some(w) => format!("{} of {} seeds failed; {w}", r.failures.len(), r.trials),
        None => format!("{} seeds, N = {}", r.trials, r.dim),
    };
    outcome(name, n, r.passed(), detail)
}

/// Symbolic equality plus the jet check of the same pair.
fn both(
    name: &str,
    n: usize,
    lhs: &FormExpr,
    rhs: &FormExpr,
    cfg: &VerifyConfig,
    dim: usize,
) -> Result<Vec<CheckOutcome>, Error> {
    let exact = lhs == rhs;
    let r = check_identity(lhs, rhs, cfg.seeds, dim, cfg.first_seed)?;
    Ok(vec![
        outcome(
            name,
            n,
            exact,
            if exact {
                "exact".into()
            } else {
                format!("residual {}", lhs - rhs)
            },
        ),
        jet_outcome(&format!("{name} [jets]"), n, &r),
    ])
}

fn report_on_jets(rep: &DerivationReport, cfg: &VerifyConfig, dim: usize) -> Result<Vec<CheckOutcome>, Error> {
    let mut out = Vec::new();
    for v in &rep.verdicts {
        let find = |k: &str| &rep.routes.iter().find(|(name, _)| name == k).expect("route").1;
        let r = check_identity(find(&v.left), find(&v.right), cfg.seeds, dim, cfg.first_seed)?;
        out.push(outcome(
            &format!("{}: {} = {}", rep.target, v.left, v.right),
            rep.n,
            v.passed(),
            if v.passed() {
                "exact".into()
            } else {
                format!("residual {}", v.residual)
            },
        ));
        out.push(jet_outcome(
            &format!("{}: {} = {} [jets]", rep.target, v.left, v.right),
            rep.n,
            &r,
        ));
    }
    Ok(out)
}

fn e_plus_omega(alg: &Arc<LieAlgebra>) -> Result<LieForm, Error> {
    LieForm::spin_connection(alg).try_add(&LieForm::vielbein(alg))
}

/// Identities of the homotopy calculus at one n, symbolic and on jets.
pub fn homotopy_checks(n: usize, cfg: &VerifyConfig) -> Result<Vec<CheckOutcome>, Error> {
    let dim = cfg.base_dim.unwrap_or(2 * n + 2);
    let alg = Arc::new(build_poincare(n)?);
    let tensor = invariant_tensor(n)?;
    let a1 = LieForm::generic(&alg, "a", 1);
    let a0 = LieForm::generic(&alg, "b", 1);
    let mut out = Vec::new();

    let fam = HomotopyFamily::new(&a1, &a0, &tensor)?;
    let r = cartan_check(&invariant_polynomial_words(n), &fam)?;
    out.extend(both("cartan <F^(n+1)>", n, &r.lhs, &r.rhs, cfg, dim)?);

    let z = CosetElement::standard(&alg, 0);
    let a = e_plus_omega(&alg)?;
    let gauge = HomotopyFamily::new(&dress(&a, &z)?, &left_maurer_cartan(&z)?, &tensor)?;
    let r = cartan_check(&cs_words(n), &gauge)?;
    out.extend(both("cartan gauge-family CS", n, &r.lhs, &r.rhs, cfg, dim)?);

    let f1 = curvature(&a1)?;
    let f0 = curvature(&a0)?;
    let p1 = trace(&vec![&f1; n + 1], &tensor)?;
    let p0 = trace(&vec![&f0; n + 1], &tensor)?;
    let dq = transgression(&a1, &a0, n)?.ext_d();
    out.extend(both("chern-weil", n, &(&p1 - &p0), &dq, cfg, dim)?);

    let cs = chern_simons(&a, n)?;
    let fa = curvature(&a)?;
    out.extend(both(
        "d CS = <F^(n+1)>",
        n,
        &cs.ext_d(),
        &trace(&vec![&fa; n + 1], &tensor)?,
        cfg,
        dim,
    )?);

    let wz = wz_term(&maurer_cartan(&z)?, n)?;
    out.push(outcome("coset WZ term vanishes", n, wz.is_zero(), format!("{wz}")));
    Ok(out)
}

/// Recompute Chern–Weil, the Chern–Simons form and the coset reduction from
/// base jets only, comparing with the symbolic results where relevant.
pub fn numeric_checks(n: usize, cfg: &VerifyConfig) -> Result<Vec<CheckOutcome>, Error> {
    let dim = cfg.base_dim.unwrap_or(2 * n + 2);
    let alg = Arc::new(build_poincare(n)?);
    let tensor = invariant_tensor(n)?;
    let a1 = LieForm::generic(&alg, "a", 1);
    let a0 = LieForm::generic(&alg, "b", 1);
    let a = e_plus_omega(&alg)?;
    let omega = LieForm::spin_connection(&alg);
    let phi = LieForm::coset_scalar(&alg);
    let cs = chern_simons(&a, n)?;

    let mut fails: [Vec<String>; 3] = Default::default();
    for k in 0..cfg.trials as u64 {
        let seed = cfg.first_seed.wrapping_add(1000 + k);
        let probe = a1.try_add(&a0)?;
        let mut atoms: Vec<&FormExpr> = probe.components().map(|(_, x)| x).collect();
        atoms.extend(a.components().map(|(_, x)| x));
        atoms.extend(phi.components().map(|(_, x)| x));
        let jets = assign_for(&atoms, dim, seed)?;

        // Chern–Weil: d of the numeric transgression against the numeric invariant polynomials.
        let n1 = NumLieForm::from_lie_form(&a1, &jets)?;
        let n0 = NumLieForm::from_lie_form(&a0, &jets)?;
        let tq = num_transgression(&n1, &n0, &tensor)?;
        let (c1, c0) = (n1.curvature(), n0.curvature());
        let p1 = num_trace(&vec![&c1; n + 1], &tensor)?;
        let p0 = num_trace(&vec![&c0; n + 1], &tensor)?;
        if let Some(w) = first_difference(&tq.differential, &p1.value.sub(&p0.value), seed) {
            fails[0].push(w.to_string());
        }

        // Chern–Simons: numeric k-operator on the scaling family against the symbolic form.
        let na = NumLieForm::from_lie_form(&a, &jets)?;
        let zero = na.scale(&q(0));
        let qn = num_transgression(&na, &zero, &tensor)?;
        if let Some(w) = first_difference(&qn.value, &eval(&cs, &jets)?, seed) {
            fails[1].push(w.to_string());
        }

        // Coset reduction: numeric transgression(A^Z, A) against ε R…R Dφ.
        let nphi = NumLieForm::from_lie_form(&phi, &jets)?;
        let naz = num_dress(&na, &nphi, 8);
        let lhs: JetForm = num_transgression(&naz, &na, &tensor)?;
        let nomega = NumLieForm::from_lie_form(&omega, &jets)?;
        let r = nomega.curvature();
        let dphi = nphi.ext_d().add(&nomega.bracket(&nphi));
        let mut factors: Vec<(&NumLieForm<'_>, usize)> = vec![(&r, 2); n];
        factors.push((&dphi, 1));
        let rhs = num_epsilon(&factors)?;
        if let Some(w) = first_difference(&lhs.value, &rhs.value, seed) {
            fails[2].push(w.to_string());
        }
    }
    let names = [
        "numeric chern-weil",
        "numeric CS vs symbolic CS",
        "numeric transgression(A^Z, A) = eps R..R Dphi",
    ];
    Ok(names
        .iter()
        .zip(fails)
        .map(|(name, f)| {
            let detail = match f.first() {
                Some(w) => format!("{} of {} trials failed; {w}", f.len(), cfg.trials),
                None => format!("{} trials, N = {dim}", cfg.trials),
            };
            outcome(name, n, f.is_empty(), detail)
        })
        .collect())
}

/// A deliberately corrupted identity must be rejected with a witness.
pub fn negative_control(cfg: &VerifyConfig) -> Result<CheckOutcome, Error> {
    let rep = gwzw_reduce(1, Route::Direct)?;
    let lhs = &rep.routes[0].1;
    let corrupted = lhs.scale(&q(-1));
    let r = check_identity(
        lhs,
        &corrupted,
        cfg.seeds.max(1),
        cfg.base_dim.unwrap_or(4),
        cfg.first_seed,
    )?;
    let detail = match r.failures.first() {
        Some(w) => format!("rejected; witness {w}"),
        None => "corrupted identity was accepted".into(),
    };
    Ok(outcome(
        "negative control (sign-flipped rhs)",
        1,
        !r.passed() && !r.failures.is_empty(),
        detail,
    ))
}

/// Everything, for each requested n.
pub fn verify_all(cfg: &VerifyConfig) -> Result<Vec<CheckOutcome>, Error> {
    let mut out = Vec::new();
    for &n in &cfg.ns {
        let dim = cfg.base_dim.unwrap_or(2 * n + 2);
        if n == 1 {
            out.extend(report_on_jets(&gwzw_reduce_3d()?, cfg, dim)?);
        }
        out.extend(report_on_jets(&gwzw_reduce(n, Route::All)?, cfg, dim)?);
        out.extend(report_on_jets(&cs_gravity_report(n)?, cfg, dim)?);
        out.extend(homotopy_checks(n, cfg)?);
        out.extend(numeric_checks(n, cfg)?);
    }
    out.push(negative_control(cfg)?);
    Ok(out)
}
