use gwzw_core::form::{Atom, Field, FormExpr};
use gwzw_core::jet::{assign_for, eval};
use gwzw_core::scalar::{qr, Param, Scalar};
use proptest::prelude::*;

fn atom() -> impl Strategy<Value = Atom> {
    let field = prop_oneof![
        (0u8..3, 1u8..3).prop_map(|(a, k)| (Field::Omega, vec![a, (a + k) % 3])),
        (0u8..3).prop_map(|a| (Field::Vielbein, vec![a])),
        (0u8..3).prop_map(|a| (Field::Phi, vec![a])),
        (0u8..3, 0u8..3).prop_map(|(deg, a)| (Field::user("u", deg), vec![a])),
        Just((Field::user("v", 2), vec![])),
    ];
    (field, any::<bool>()).prop_map(|((f, mut idx), d)| {
        if f == Field::Omega {
            idx.sort_unstable();
        }
        let mut a = Atom::new(f, &idx);
        a.d = d;
        a
    })
}

fn coefficient() -> impl Strategy<Value = Scalar> {
    (-6i64..=6, 1i64..=4, 0u8..3).prop_map(|(n, d, p)| {
        let c = Scalar::from(qr(n, d));
        match p {
            0 => c,
            1 => &c * &Scalar::param(Param::T),
            _ => &c * &Scalar::param(Param::M2),
        }
    })
}

fn word() -> impl Strategy<Value = (Vec<Atom>, Scalar)> {
    (prop::collection::vec(atom(), 0..4), coefficient())
}

fn expr() -> impl Strategy<Value = FormExpr> {
    prop::collection::vec(word(), 0..5)
        .prop_map(|ws| ws.iter().map(|(atoms, c)| FormExpr::word(atoms, c.clone())).sum())
}

fn degree(atoms: &[Atom]) -> u32 {
    atoms.iter().map(|a| u32::from(a.degree())).sum()
}

/// Termwise graded swap: Σ (−1)^{pq} y_j ∧ x_i.
fn graded_swap(x: &FormExpr, y: &FormExpr) -> FormExpr {
    let mut out = FormExpr::zero();
    for (mx, cx) in x.terms() {
        for (my, cy) in y.terms() {
            let sign = if (mx.degree() * my.degree()) % 2 == 1 { -1 } else { 1 };
            let xi = FormExpr::word(mx.atoms(), cx.clone());
            let yj = FormExpr::word(my.atoms(), cy.clone());
            out += &yj.wedge(&xi).scale(&qr(sign, 1));
        }
    }
    out
}

/// Koszul sign of a permutation of graded atoms, counted by inversions.
fn koszul(atoms: &[Atom], perm: &[usize]) -> i64 {
    let mut sign = 1;
    for i in 0..perm.len() {
        for j in (i + 1)..perm.len() {
            if perm[i] > perm[j] && atoms[perm[i]].is_odd() && atoms[perm[j]].is_odd() {
                sign = -sign;
            }
        }
    }
    sign
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn wedge_is_graded_commutative(x in expr(), y in expr()) {
        prop_assert_eq!(x.wedge(&y), graded_swap(&x, &y));
    }

    #[test]
    fn wedge_is_associative(x in expr(), y in expr(), z in expr()) {
        prop_assert_eq!(x.wedge(&y).wedge(&z), x.wedge(&y.wedge(&z)));
    }

    #[test]
    fn d_squares_to_zero(x in expr()) {
        prop_assert!(x.ext_d().ext_d().is_zero());
    }

    #[test]
    fn d_obeys_graded_leibniz((a, ca) in word(), y in expr()) {
        let x = FormExpr::word(&a, ca);
        let sign = if degree(&a) % 2 == 1 { -1 } else { 1 };
        let rhs = &x.ext_d().wedge(&y) + &x.wedge(&y.ext_d()).scale(&qr(sign, 1));
        prop_assert_eq!(x.wedge(&y).ext_d(), rhs);
    }

    #[test]
    fn canonical_form_ignores_input_order((atoms, c) in word(), seed in any::<u64>()) {
        let mut perm: Vec<usize> = (0..atoms.len()).collect();
        let mut s = seed;
        for i in (1..perm.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let shuffled: Vec<Atom> = perm.iter().map(|&i| atoms[i].clone()).collect();
        let lhs = FormExpr::word(&shuffled, c.clone());
        let rhs = FormExpr::word(&atoms, c).scale(&qr(koszul(&atoms, &perm), 1));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn sums_are_order_independent(ws in prop::collection::vec(word(), 0..6)) {
        let forward: FormExpr = ws.iter().map(|(a, c)| FormExpr::word(a, c.clone())).sum();
        let backward: FormExpr = ws.iter().rev().map(|(a, c)| FormExpr::word(a, c.clone())).sum();
        prop_assert_eq!(forward, backward);
    }

    #[test]
    fn text_form_is_stable(x in expr()) {
        prop_assert_eq!(x.to_string(), x.clone().to_string());
        prop_assert_eq!((&x - &x).to_string(), "0");
    }

    #[test]
    fn jet_evaluation_is_a_homomorphism(x in expr(), y in expr(), seed in 0u64..1000) {
        let prod = x.wedge(&y);
        prop_assume!(x.max_degree() + y.max_degree() <= 8);
        let jets = assign_for(&[&x, &y, &prod], 8, seed).unwrap();
        let (ex, ey) = (eval(&x, &jets).unwrap(), eval(&y, &jets).unwrap());
        prop_assert_eq!(eval(&prod, &jets).unwrap(), ex.wedge(&ey));
        prop_assert_eq!(eval(&(&x + &y), &jets).unwrap(), ex.add(&ey));
    }
}
