//! Derivation pipelines: Chern–Simons gravity, and the reduction of the
//! coset-dressed Poincaré transgression to topological gravity.

use std::sync::Arc;

use crate::coset::{dress, maurer_cartan, CosetElement};
use crate::form::FormExpr;
use crate::homotopy::{alpha2n, b2n, chern_simons, transgression, wz_term};
use crate::indexed::{curvatures_then, EpsilonTerm, Factor, FieldTable};
use crate::lie::{build_poincare, LieAlgebra};
use crate::lieform::{bracket, cov_d, trace, LieForm};
use crate::scalar::{q, qr, Bound, Param, Scalar, Q};
use crate::tensor::invariant_tensor;
use crate::Error;

/// Largest n the pipelines accept by default.
pub const DEFAULT_MAX_N: usize = 2;

/// One pairwise comparison between two computed routes.
#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub left: String,
    pub right: String,
    pub residual: FormExpr,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.residual.is_zero()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DerivationReport {
    pub target: String,
    pub n: usize,
    pub routes: Vec<(String, FormExpr)>,
    pub verdicts: Vec<Verdict>,
    pub steps: usize,
    /// Boundary integrand in index notation and expanded.
    pub boundary: Option<(EpsilonTerm, FormExpr)>,
    /// c with boundary integrand = c · topological action integrand.
    pub constant: Option<Q>,
}

impl DerivationReport {
    fn new(target: &str, n: usize) -> Self {
        DerivationReport {
            target: target.to_string(),
            n,
            routes: Vec::new(),
            verdicts: Vec::new(),
            steps: 0,
            boundary: None,
            constant: None,
        }
    }

    fn route(&mut self, name: &str, x: FormExpr) {
        self.steps += 1;
        self.routes.push((name.to_string(), x));
    }

    fn get(&self, name: &str) -> &FormExpr {
        &self.routes.iter().find(|(k, _)| k == name).expect("route recorded").1
    }

    fn compare(&mut self, left: &str, right: &str) {
        let residual = self.get(left) - self.get(right);
        self.verdicts.push(Verdict {
            left: left.to_string(),
            right: right.to_string(),
            residual,
        });
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(Verdict::passed)
    }

    /// First nonzero residual, or zero.
    pub fn residual(&self) -> FormExpr {
        self.verdicts
            .iter()
            .find(|v| !v.passed())
            .map(|v| v.residual.clone())
            .unwrap_or_default()
    }
}

fn check_n(n: usize, max_n: usize) -> Result<(), Error> {
    if n == 0 {
        Err(Error::InvalidN(n))
    } else if n > max_n {
        Err(Error::UnsupportedN(n))
    } else {
        Ok(())
    }
}

struct Fields {
    alg: Arc<LieAlgebra>,
    omega: LieForm,
    a: LieForm,
    table: FieldTable,
}

impl Fields {
    fn poincare(n: usize) -> Result<Self, Error> {
        let alg = Arc::new(build_poincare(n)?);
        let omega = LieForm::spin_connection(&alg);
        let a = omega.try_add(&LieForm::vielbein(&alg))?;
        let table = FieldTable::new(&alg)?;
        Ok(Fields { alg, omega, a, table })
    }

    fn eps(&self, term: &EpsilonTerm) -> Result<FormExpr, Error> {
        term.expand_with(&self.alg, &self.table)
    }
}

/// −n(n+1)∫₀¹dt tⁿ ⟨R_t^{n−1} ω X⟩ with R_t = dω + tω².
pub fn lorentz_boundary(omega: &LieForm, x: &LieForm, n: usize) -> Result<FormExpr, Error> {
    let tensor = invariant_tensor(n)?;
    let t = Scalar::param(Param::T);
    let r_t = omega
        .ext_d()
        .try_add(&bracket(omega, omega)?.scale(&qr(1, 2)).mul_scalar(&t))?;
    let mut args: Vec<&LieForm> = std::iter::repeat_n(&r_t, n - 1).collect();
    args.push(omega);
    args.push(x);
    trace(&args, &tensor)?
        .mul_scalar(&t.pow(n as u32))
        .scale(&q(-((n * (n + 1)) as i64)))
        .integrate_param(Param::T, &Bound::zero(), &Bound::one())
}

/// Chern–Simons gravity Q_{2n+1}(e + ω) = εR…Re + d(boundary), built from
/// the triangle with Ā = ω and checked against the direct Chern–Simons form.
pub fn cs_gravity_report(n: usize) -> Result<DerivationReport, Error> {
    check_n(n, 3)?;
    let f = Fields::poincare(n)?;
    let mut rep = DerivationReport::new("chern-simons gravity", n);

    let bulk = f.eps(&curvatures_then(n, Factor::Vielbein))?;
    let boundary = lorentz_boundary(&f.omega, &LieForm::vielbein(&f.alg), n)?;
    rep.route("bulk", bulk.clone());
    rep.route("transgression(A, w)", transgression(&f.a, &f.omega, n)?);
    rep.compare("transgression(A, w)", "bulk");
    rep.route("boundary", boundary.clone());
    rep.route("b2n(A, w)", b2n(&f.a, &f.omega, n)?);
    rep.compare("b2n(A, w)", "boundary");
    rep.route("triangle", &bulk + &boundary.ext_d());
    rep.route("chern_simons(A)", chern_simons(&f.a, n)?);
    rep.compare("triangle", "chern_simons(A)");
    rep.route("d chern_simons(A)", rep.get("chern_simons(A)").ext_d());
    rep.route("eps R..R T", f.eps(&curvatures_then(n, Factor::Torsion))?);
    rep.compare("d chern_simons(A)", "eps R..R T");
    Ok(rep)
}

pub fn cs_gravity_lagrangian(n: usize) -> Result<FormExpr, Error> {
    let rep = cs_gravity_report(n)?;
    if !rep.passed() {
        return Err(Error::IdentityFailed(format!(
            "chern-simons gravity routes disagree at n = {n}"
        )));
    }
    Ok(rep.get("triangle").clone())
}

/// ε φ R…R, identifying the gauge curvature of the action with R^{ab}.
pub fn topological_action_term(n: usize) -> EpsilonTerm {
    let mut factors = vec![Factor::Scalar];
    factors.extend(std::iter::repeat_n(Factor::Curvature, n));
    EpsilonTerm::new(q(1), factors)
}

pub fn topological_action_integrand(n: usize) -> Result<FormExpr, Error> {
    check_n(n, usize::MAX)?;
    let alg = Arc::new(build_poincare(n)?);
    topological_action_term(n).expand(&alg)
}

/// The (1+1)-dimensional reduction: direct transgression against the
/// ⟨𝒱³⟩ / exact-term combination and d(ε R φ).
pub fn gwzw_reduce_3d() -> Result<DerivationReport, Error> {
    let f = Fields::poincare(1)?;
    let tensor = invariant_tensor(1)?;
    let z = CosetElement::standard(&f.alg, 0);
    let az = dress(&f.a, &z)?;
    let v = maurer_cartan(&z)?;
    let mut rep = DerivationReport::new("gwzw 3d", 1);

    rep.route("transgression(A^Z, A)", transgression(&az, &f.a, 1)?);
    let wz = wz_term(&v, 1)?;
    rep.route("wz", wz.clone());
    rep.route("zero", FormExpr::zero());
    rep.compare("wz", "zero");
    let va = trace(&[&v, &f.a], &tensor)?;
    let aza = trace(&[&az, &f.a], &tensor)?;
    rep.route("<A^Z A>", aza.clone());
    rep.route(
        "-1/2 eps w Dphi",
        f.eps(&EpsilonTerm::new(
            qr(-1, 2),
            vec![Factor::Connection, Factor::CovariantScalar],
        ))?,
    );
    rep.compare("<A^Z A>", "-1/2 eps w Dphi");
    rep.route("<V A>", va.clone());
    rep.route(
        "-1/2 eps w dphi",
        f.eps(&EpsilonTerm::new(
            qr(-1, 2),
            vec![Factor::Connection, Factor::ExteriorScalar],
        ))?,
    );
    rep.compare("<V A>", "-1/2 eps w dphi");
    rep.route("wz - d<V A + A^Z A>", &wz - &(&va + &aza).ext_d());
    rep.compare("transgression(A^Z, A)", "wz - d<V A + A^Z A>");

    let term = curvatures_then(1, Factor::Scalar);
    let integrand = f.eps(&term)?;
    rep.route("d(eps R phi)", integrand.ext_d());
    rep.compare("transgression(A^Z, A)", "d(eps R phi)");
    finish_boundary(&mut rep, term, integrand, 1)?;
    Ok(rep)
}

fn finish_boundary(rep: &mut DerivationReport, term: EpsilonTerm, integrand: FormExpr, n: usize) -> Result<(), Error> {
    let action = topological_action_integrand(n)?;
    rep.constant = integrand.ratio_to(&action);
    rep.boundary = Some((term, integrand));
    Ok(())
}

/// Which routes of the 2n-dimensional reduction to compute.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    All,
    Direct,
    Decomposition,
}

/// The 2n-dimensional reduction. Routes: (i) transgression(A^Z, A);
/// (ii) dα₂ₙ − dB₂ₙ with dα₂ₙ = Q(A^Z) − Q(A) and the closed-form B₂ₙ;
/// (iii) ε R…R Dφ and d(ε R…R φ).
pub fn gwzw_reduce(n: usize, route: Route) -> Result<DerivationReport, Error> {
    gwzw_reduce_capped(n, route, DEFAULT_MAX_N)
}

pub fn gwzw_reduce_capped(n: usize, route: Route, max_n: usize) -> Result<DerivationReport, Error> {
    check_n(n, max_n)?;
    let f = Fields::poincare(n)?;
    let z = CosetElement::standard(&f.alg, 0);
    let az = dress(&f.a, &z)?;
    let v = maurer_cartan(&z)?;
    let mut rep = DerivationReport::new("gwzw", n);

    let target_term = curvatures_then(n, Factor::CovariantScalar);
    rep.route("eps R..R Dphi", f.eps(&target_term)?);
    let boundary_term = curvatures_then(n, Factor::Scalar);
    let integrand = f.eps(&boundary_term)?;
    rep.route("d(eps R..R phi)", integrand.ext_d());
    rep.compare("d(eps R..R phi)", "eps R..R Dphi");

    if matches!(route, Route::All | Route::Direct) {
        rep.route("transgression(A^Z, A)", transgression(&az, &f.a, n)?);
        rep.compare("transgression(A^Z, A)", "eps R..R Dphi");
    }
    if matches!(route, Route::All | Route::Decomposition) {
        let dphi = cov_d(&z.phi().clone(), &f.omega)?;
        rep.route("wz", wz_term(&v, n)?);
        rep.route("zero", FormExpr::zero());
        rep.compare("wz", "zero");
        let d_alpha = &chern_simons(&az, n)? - &chern_simons(&f.a, n)?;
        rep.route("d alpha", d_alpha.clone());
        let b_closed = lorentz_boundary(&f.omega, &dphi, n)?;
        rep.route("B closed", b_closed.clone());
        rep.route("b2n(A^Z, A)", b2n(&az, &f.a, n)?);
        rep.compare("b2n(A^Z, A)", "B closed");
        if route == Route::All {
            rep.route("d alpha2n(A)", alpha2n(&f.a, &z, n)?.ext_d());
            rep.compare("d alpha2n(A)", "d alpha");
        }
        let combined = &(rep.get("wz") + &d_alpha) - &b_closed.ext_d();
        rep.route("wz + d alpha - d B", combined);
        rep.compare("wz + d alpha - d B", "eps R..R Dphi");
    }
    finish_boundary(&mut rep, boundary_term, integrand, n)?;
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cs_gravity_n1_closed_form() {
        let f = Fields::poincare(1).unwrap();
        let cs = cs_gravity_lagrangian(1).unwrap();
        let bulk = f.eps(&curvatures_then(1, Factor::Vielbein)).unwrap();
        let half = f
            .eps(&EpsilonTerm::new(qr(1, 2), vec![Factor::Connection, Factor::Vielbein]))
            .unwrap();
        assert_eq!(cs, &bulk - &half.ext_d());
    }

    #[test]
    fn gwzw_3d_passes() {
        let rep = gwzw_reduce_3d().unwrap();
        for v in &rep.verdicts {
            assert!(v.passed(), "{} vs {}: {}", v.left, v.right, v.residual);
        }
        assert_eq!(rep.constant, Some(q(1)));
    }

    #[test]
    fn gwzw_n1_all_routes() {
        let rep = gwzw_reduce(1, Route::All).unwrap();
        assert!(rep.passed(), "{}", rep.residual());
    }

    #[test]
    fn n_out_of_range() {
        assert!(matches!(gwzw_reduce(0, Route::All), Err(Error::InvalidN(0))));
        assert!(matches!(gwzw_reduce(3, Route::All), Err(Error::UnsupportedN(3))));
    }

    #[test]
    fn action_integrand_n1() {
        let alg = Arc::new(build_poincare(1).unwrap());
        let got = topological_action_integrand(1).unwrap();
        let want = EpsilonTerm::new(q(1), vec![Factor::Scalar, Factor::Curvature])
            .expand(&alg)
            .unwrap();
        assert_eq!(got, want);
        assert_eq!(topological_action_term(1).latex(), "\\epsilon_{abc}\\phi^{a}R^{bc}");
    }
}
