//! Nonlinear realizations over the Lorentz coset: exponential dressings
//! g = e^{φ·P}, Maurer–Cartan forms and the AdS series in m².

use std::sync::Arc;

use crate::form::FormExpr;
use crate::lie::{CosetSplit, LieAlgebra};
use crate::lieform::{bracket, curvature, dress_adjoint, Conjugation, LieForm};
use crate::scalar::{q, Param, Scalar, Q};
use crate::Error;

/// Default number of m² orders kept for deformed algebras.
pub const DEFAULT_ORDER: u32 = 4;

/// Coset element g = e^{φ·P} with φ a translation-valued 0-form.
#[derive(Clone, Debug, PartialEq)]
pub struct CosetElement {
    phi: LieForm,
    order: u32,
}

impl CosetElement {
    pub fn new(phi: LieForm, order: u32) -> Result<Self, Error> {
        if phi.degree() != 0 && !phi.is_zero() {
            return Err(Error::DegreeMismatch {
                expected: 0,
                got: phi.degree(),
            });
        }
        let split = CosetSplit::lorentz(phi.algebra());
        split.validate(phi.algebra())?;
        if !phi.supported_on(&split.coset) {
            return Err(Error::NotCoset);
        }
        Ok(CosetElement { phi, order })
    }

    /// g = e^{φ^a P_a} with the standard coset fields.
    pub fn standard(algebra: &Arc<LieAlgebra>, order: u32) -> Self {
        CosetElement {
            phi: LieForm::coset_scalar(algebra),
            order,
        }
    }

    pub fn phi(&self) -> &LieForm {
        &self.phi
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn algebra(&self) -> &Arc<LieAlgebra> {
        self.phi.algebra()
    }

    pub fn inverse(&self) -> CosetElement {
        CosetElement {
            phi: self.phi.neg(),
            order: self.order,
        }
    }

    fn deformed(&self) -> bool {
        self.algebra().deformation().is_some()
    }

    fn trunc(&self, x: LieForm) -> LieForm {
        if self.deformed() {
            x.truncate_m2(self.order)
        } else {
            x
        }
    }

    // Σ_k coeff(k) ad_φ^k seed, stopping once a term vanishes.
    fn ad_series(&self, seed: &LieForm, coeff: impl Fn(usize) -> Q) -> Result<LieForm, Error> {
        let mut power = self.trunc(seed.clone());
        let mut out = power.scale(&coeff(0));
        let limit = 4 * self.order as usize + 8;
        for k in 1..=limit {
            power = self.trunc(bracket(&self.phi, &power)?);
            if power.is_zero() {
                return Ok(out);
            }
            out = out.try_add(&power.scale(&coeff(k)))?;
        }
        if self.deformed() {
            Ok(out)
        } else {
            Err(Error::Unsupported("adjoint series did not terminate".into()))
        }
    }
}

fn factorial(k: usize) -> Q {
    (1..=k as i64).fold(q(1), |acc, i| acc * q(i))
}

/// Right Maurer–Cartan form 𝒱 = dg g⁻¹ = Σ_k ad_φ^k dφ / (k+1)!.
pub fn maurer_cartan(z: &CosetElement) -> Result<LieForm, Error> {
    z.ad_series(&z.phi.ext_d(), |k| q(1) / factorial(k + 1))
}

/// Left Maurer–Cartan form g⁻¹dg = Σ_k (−1)^k ad_φ^k dφ / (k+1)!.
pub fn left_maurer_cartan(z: &CosetElement) -> Result<LieForm, Error> {
    z.ad_series(&z.phi.ext_d(), |k| {
        let s = if k % 2 == 0 { q(1) } else { q(-1) };
        s / factorial(k + 1)
    })
}

/// A^g = g⁻¹ A g + g⁻¹ dg.
pub fn dress(a: &LieForm, z: &CosetElement) -> Result<LieForm, Error> {
    if a.degree() != 1 && !a.is_zero() {
        return Err(Error::DegreeMismatch {
            expected: 1,
            got: a.degree(),
        });
    }
    let conj = dress_adjoint(a, &z.phi, z.order, Conjugation::Inverse)?;
    let mc = left_maurer_cartan(z)?;
    let mut out = conj.try_add(&mc)?;
    if out.is_zero() {
        out = LieForm::zero(a.algebra(), 1);
    }
    Ok(out)
}

/// F^g computed as the curvature of A^g, checked against g⁻¹ F g.
pub fn dressed_curvature(a: &LieForm, z: &CosetElement) -> Result<LieForm, Error> {
    let direct = curvature(&dress(a, z)?)?;
    let direct = z.trunc(direct);
    let conj = dress_adjoint(&curvature(a)?, &z.phi, z.order, Conjugation::Inverse)?;
    if direct.try_sub(&conj)?.is_zero() {
        Ok(direct)
    } else {
        Err(Error::IdentityFailed(
            "dressed curvature differs from the adjoint action on F".into(),
        ))
    }
}

/// Taylor series of the hyperbolic functions entering the AdS dressing,
/// each written as Σ_k c_k x^{2k}.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesKind {
    /// cosh x − 1
    CoshMinusOne,
    /// sinh x / x
    SinhOverX,
    /// (cosh x − 1) / x²
    CoshMinusOneOverX2,
    /// (sinh x / x − 1) / x²
    SinhOverXMinusOneOverX2,
}

impl SeriesKind {
    /// Coefficient of x^{2k}.
    pub fn coefficient(self, k: usize) -> Q {
        match self {
            SeriesKind::CoshMinusOne if k == 0 => q(0),
            SeriesKind::CoshMinusOne => q(1) / factorial(2 * k),
            SeriesKind::SinhOverX => q(1) / factorial(2 * k + 1),
            SeriesKind::CoshMinusOneOverX2 => q(1) / factorial(2 * k + 2),
            SeriesKind::SinhOverXMinusOneOverX2 => q(1) / factorial(2 * k + 3),
        }
    }
}

/// Σ_{k ≤ order} c_k (m² φ²)^k as a 0-form, with φ² supplied by the caller.
pub fn series_in_m2(kind: SeriesKind, phi_sq: &FormExpr, order: u32) -> FormExpr {
    let m2 = Scalar::param(Param::M2);
    let mut out = FormExpr::zero();
    let mut power = FormExpr::one();
    for k in 0..=order as usize {
        out += &power.scale(&kind.coefficient(k));
        power = power.wedge(phi_sq).mul_scalar(&m2);
    }
    out.truncate_m2(order)
}

/// Which form of the coset-field derivative appears in the last term of V.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhiDerivative {
    Exterior,
    Covariant,
}

fn eta(a: u8) -> Q {
    if a == 0 {
        q(-1)
    } else {
        q(1)
    }
}

/// Closed-form AdS nonlinear fields (V^a, W^{ab}) for A = e + ω expanded to
/// `order` in m², as an independent reference for `dress`.
pub fn ads_reference(z: &CosetElement, variant: PhiDerivative) -> Result<LieForm, Error> {
    let alg = z.algebra();
    let dim = alg.dim();
    let k = z.order;
    let phi = |a: u8| z.phi.p_component(a);
    let m2 = Scalar::param(Param::M2);
    let omega = LieForm::spin_connection(alg);
    let dphi = crate::lieform::cov_d(&z.phi, &omega)?;

    let phi_sq: FormExpr = (0..dim).map(|a| phi(a).wedge(&phi(a)).scale(&eta(a))).sum();
    let cosh_m1 = series_in_m2(SeriesKind::CoshMinusOne, &phi_sq, k);
    let sinh_x = series_in_m2(SeriesKind::SinhOverX, &phi_sq, k);
    let cosh_x2 = series_in_m2(SeriesKind::CoshMinusOneOverX2, &phi_sq, k).mul_scalar(&m2);
    let sinh_x2 = series_in_m2(SeriesKind::SinhOverXMinusOneOverX2, &phi_sq, k).mul_scalar(&m2);

    let phi_e: FormExpr = (0..dim)
        .map(|b| phi(b).wedge(&FormExpr::vielbein(b)).scale(&eta(b)))
        .sum();
    let phi_dphi: FormExpr = (0..dim)
        .map(|c| {
            let d = match variant {
                PhiDerivative::Exterior => phi(c).ext_d(),
                PhiDerivative::Covariant => dphi.p_component(c),
            };
            phi(c).wedge(&d).scale(&eta(c))
        })
        .sum();

    let v = LieForm::from_vector(alg, 1, |a| {
        let e = FormExpr::vielbein(a);
        let mut x = &e + &cosh_m1.wedge(&e);
        x -= &cosh_x2.wedge(&phi(a)).wedge(&phi_e);
        x += &sinh_x.wedge(&dphi.p_component(a));
        x -= &sinh_x2.wedge(&phi_dphi).wedge(&phi(a));
        x.truncate_m2(k)
    })?;
    let w = LieForm::from_matrix(alg, 1, |a, b| {
        let pe = &phi(a).wedge(&FormExpr::vielbein(b)) - &phi(b).wedge(&FormExpr::vielbein(a));
        let pd = &phi(a).wedge(&dphi.p_component(b)) - &phi(b).wedge(&dphi.p_component(a));
        let mut x = FormExpr::omega(a, b);
        x -= &sinh_x.wedge(&pe).mul_scalar(&m2);
        x -= &cosh_x2.wedge(&pd);
        x.truncate_m2(k)
    })?;
    v.try_add(&w)
}

/// Outcome of comparing the engine's AdS dressing with the closed form.
#[derive(Clone, Debug)]
pub struct AdsComparison {
    pub order: u32,
    /// Exponent sign s in g = e^{s φ·P} under which the engine matches, if any.
    pub matching_sign: Option<i8>,
    pub exterior_matches: bool,
    pub covariant_matches: bool,
    /// Residual against the exterior-derivative variant with the fixed sign.
    pub residual: LieForm,
}

impl AdsComparison {
    pub fn passed(&self) -> bool {
        self.matching_sign.is_some() && (self.exterior_matches || self.covariant_matches)
    }
}

/// Compare dress(e + ω) over AdS with the closed-form series through `order`.
pub fn compare_ads_series(algebra: &Arc<LieAlgebra>, order: u32) -> Result<AdsComparison, Error> {
    if algebra.deformation().is_none() {
        return Err(Error::MissingDeformation);
    }
    let a = LieForm::spin_connection(algebra).try_add(&LieForm::vielbein(algebra))?;
    let z = CosetElement::standard(algebra, order);
    let engine = dress(&a, &z)?;
    let flipped = dress(&a, &z.inverse())?;
    let ext = ads_reference(&z, PhiDerivative::Exterior)?;
    let cov = ads_reference(&z, PhiDerivative::Covariant)?;
    let residual = engine.try_sub(&ext)?;
    let exterior_matches = residual.is_zero();
    let covariant_matches = engine.try_sub(&cov)?.is_zero();
    let matching_sign = if exterior_matches || covariant_matches {
        Some(1)
    } else if flipped.try_sub(&ext)?.is_zero() || flipped.try_sub(&cov)?.is_zero() {
        Some(-1)
    } else {
        None
    };
    Ok(AdsComparison {
        order,
        matching_sign,
        exterior_matches,
        covariant_matches,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{build_ads, build_poincare};
    use crate::lieform::cov_d;
    use crate::tensor::invariant_tensor;

    fn poincare(n: usize) -> Arc<LieAlgebra> {
        Arc::new(build_poincare(n).unwrap())
    }

    fn ads(n: usize) -> Arc<LieAlgebra> {
        Arc::new(build_ads(n).unwrap())
    }

    fn e_plus_omega(alg: &Arc<LieAlgebra>) -> LieForm {
        LieForm::spin_connection(alg).try_add(&LieForm::vielbein(alg)).unwrap()
    }

    #[test]
    fn poincare_nonlinear_fields() {
        for n in 1..=2 {
            let alg = poincare(n);
            let z = CosetElement::standard(&alg, 0);
            let az = dress(&e_plus_omega(&alg), &z).unwrap();
            let w = LieForm::spin_connection(&alg);
            assert_eq!(az.lorentz_part(), w);
            let dphi = cov_d(&z.phi, &w).unwrap();
            let v = LieForm::vielbein(&alg).try_add(&dphi).unwrap();
            assert_eq!(az.translation_part(), v);
        }
    }

    #[test]
    fn poincare_maurer_cartan_is_dphi() {
        let alg = poincare(2);
        let z = CosetElement::standard(&alg, 0);
        assert_eq!(maurer_cartan(&z).unwrap(), z.phi.ext_d());
        assert_eq!(left_maurer_cartan(&z).unwrap(), z.phi.ext_d());
    }

    #[test]
    fn maurer_cartan_of_identity_vanishes() {
        let alg = ads(1);
        let z = CosetElement::new(LieForm::zero(&alg, 0), 3).unwrap();
        assert!(maurer_cartan(&z).unwrap().is_zero());
    }

    #[test]
    fn maurer_cartan_flatness() {
        let alg = ads(1);
        let z = CosetElement::standard(&alg, 3);
        let left = left_maurer_cartan(&z).unwrap();
        assert!(curvature(&left).unwrap().truncate_m2(3).is_zero());
        let right = maurer_cartan(&z).unwrap();
        let half = bracket(&right, &right).unwrap().scale(&crate::scalar::qr(1, 2));
        assert!(right.ext_d().try_sub(&half).unwrap().truncate_m2(3).is_zero());
    }

    #[test]
    fn dress_via_right_form_agrees() {
        let alg = ads(1);
        let z = CosetElement::standard(&alg, 2);
        let a = e_plus_omega(&alg);
        let sum = a.try_add(&maurer_cartan(&z).unwrap()).unwrap();
        let other = dress_adjoint(&sum, &z.phi, 2, Conjugation::Inverse).unwrap();
        assert_eq!(dress(&a, &z).unwrap(), other);
    }

    #[test]
    fn dressing_round_trip() {
        let alg = poincare(2);
        let a = e_plus_omega(&alg);
        let z = CosetElement::standard(&alg, 0);
        let back = dress(&dress(&a, &z).unwrap(), &z.inverse()).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn poincare_dressed_curvature() {
        for n in 1..=2 {
            let alg = poincare(n);
            let z = CosetElement::standard(&alg, 0);
            let a = e_plus_omega(&alg);
            let fz = dressed_curvature(&a, &z).unwrap();
            let f = curvature(&a).unwrap();
            let r = f.lorentz_part();
            assert_eq!(fz.lorentz_part(), r);
            let rphi = bracket(&r, &z.phi).unwrap();
            assert_eq!(fz.translation_part(), f.translation_part().try_add(&rphi).unwrap());
        }
    }

    #[test]
    fn flat_connection_stays_flat() {
        let alg = poincare(1);
        let z = CosetElement::standard(&alg, 0);
        let flat = LieForm::vielbein(&alg).map(|x| x.substitute(&|atom| FormExpr::phi(atom.indices[0]).ext_d()));
        assert!(curvature(&flat).unwrap().is_zero());
        assert!(dressed_curvature(&flat, &z).unwrap().is_zero());
    }

    #[test]
    fn ads_dressed_curvature_through_order() {
        let alg = ads(1);
        let z = CosetElement::standard(&alg, 2);
        assert!(dressed_curvature(&e_plus_omega(&alg), &z).is_ok());
    }

    #[test]
    fn ads_reduces_to_poincare() {
        let a_ads = ads(1);
        let a_p = poincare(1);
        let za = CosetElement::standard(&a_ads, 3);
        let zp = CosetElement::standard(&a_p, 0);
        let da = dress(&e_plus_omega(&a_ads), &za).unwrap().eval_param(Param::M2, &q(0));
        let dp = dress(&e_plus_omega(&a_p), &zp).unwrap();
        let da: Vec<_> = da.components().map(|(i, x)| (i, x.clone())).collect();
        let dp: Vec<_> = dp.components().map(|(i, x)| (i, x.clone())).collect();
        assert_eq!(da, dp);
    }

    #[test]
    fn ads_series_matches_closed_form() {
        let alg = ads(1);
        for order in 1..=2 {
            let cmp = compare_ads_series(&alg, order).unwrap();
            assert_eq!(cmp.matching_sign, Some(1), "order {order}: {}", cmp.residual);
            assert!(cmp.exterior_matches && cmp.covariant_matches);
        }
    }

    #[test]
    fn series_coefficients() {
        use crate::scalar::qr;
        assert_eq!(SeriesKind::CoshMinusOne.coefficient(1), qr(1, 2));
        assert_eq!(SeriesKind::SinhOverX.coefficient(1), qr(1, 6));
        assert_eq!(SeriesKind::CoshMinusOneOverX2.coefficient(0), qr(1, 2));
        assert_eq!(SeriesKind::SinhOverXMinusOneOverX2.coefficient(0), qr(1, 6));
    }

    #[test]
    fn trace_invariant_under_dressing() {
        let alg = poincare(1);
        let t = invariant_tensor(1).unwrap();
        let z = CosetElement::standard(&alg, 0);
        let x = LieForm::generic(&alg, "x", 1);
        let y = LieForm::generic(&alg, "y", 1);
        let before = crate::lieform::trace(&[&x, &y], &t).unwrap();
        let gx = dress_adjoint(&x, &z.phi, 0, Conjugation::Inverse).unwrap();
        let gy = dress_adjoint(&y, &z.phi, 0, Conjugation::Inverse).unwrap();
        assert_eq!(crate::lieform::trace(&[&gx, &gy], &t).unwrap(), before);
    }

    #[test]
    fn lorentz_valued_phi_is_rejected() {
        let alg = poincare(1);
        let bad = LieForm::from_matrix(&alg, 0, |_, _| FormExpr::one()).unwrap();
        assert!(matches!(CosetElement::new(bad, 0), Err(Error::NotCoset)));
    }
}
