use gwzw_core::gravity::{cs_gravity_report, gwzw_reduce, Route};
use gwzw_core::scalar::q;

#[test]
fn cs_gravity_n2_routes_agree() {
    let rep = cs_gravity_report(2).unwrap();
    for v in &rep.verdicts {
        assert!(v.passed(), "{} vs {}: {}", v.left, v.right, v.residual);
    }
}

#[test]
fn gwzw_n2_all_routes_agree() {
    let rep = gwzw_reduce(2, Route::All).unwrap();
    for v in &rep.verdicts {
        assert!(v.passed(), "{} vs {}", v.left, v.right);
    }
    assert_eq!(rep.constant, Some(q(1)));
}
