use std::sync::Arc;

use gwzw_core::coset::{dress, left_maurer_cartan, CosetElement};
use gwzw_core::homotopy::{cartan_check, cs_words, derivation_residual, invariant_polynomial_words, HomotopyFamily};
use gwzw_core::lie::build_poincare;
use gwzw_core::lieform::LieForm;
use gwzw_core::tensor::invariant_tensor;

#[test]
fn cartan_invariant_polynomial_n2_generic() {
    let alg = Arc::new(build_poincare(2).unwrap());
    let tensor = invariant_tensor(2).unwrap();
    let fam = HomotopyFamily::new(
        &LieForm::generic(&alg, "a", 1),
        &LieForm::generic(&alg, "b", 1),
        &tensor,
    )
    .unwrap();
    let r = cartan_check(&invariant_polynomial_words(2), &fam).unwrap();
    assert!(r.passed());
}

#[test]
fn cartan_gauge_family_cs_n2() {
    let alg = Arc::new(build_poincare(2).unwrap());
    let tensor = invariant_tensor(2).unwrap();
    let z = CosetElement::standard(&alg, 0);
    let a = LieForm::spin_connection(&alg)
        .try_add(&LieForm::vielbein(&alg))
        .unwrap();
    let fam = HomotopyFamily::new(&dress(&a, &z).unwrap(), &left_maurer_cartan(&z).unwrap(), &tensor).unwrap();
    let words = cs_words(2);
    assert!(cartan_check(&words, &fam).unwrap().passed());
    assert!(derivation_residual(&words, &fam).unwrap().is_zero());
}
