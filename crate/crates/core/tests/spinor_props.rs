//! Clifford algebra and spin module identities in characteristic 2.

use orbita::field::{Field, FieldSpec};
use orbita::spinor::{
    evaluate, root_element, spin_action, spin_quadratic, torus_element, vector_action, vector_quadratic,
    CliffordElement, Convention, Spinor,
};
use proptest::prelude::*;

fn gf64() -> Field {
    FieldSpec::new(64).unwrap()
}

fn spinor_from(f: &Field, coeffs: &[u32]) -> Spinor {
    let mut x = Spinor::zero(f);
    for (m, &c) in Spinor::basis_masks().zip(coeffs) {
        x = x.add(&Spinor::basis(f, m).unwrap().scale(c));
    }
    x
}

/// A root element s_{i,j}(λ) with i, j chosen orthogonal.
fn root_strategy() -> impl Strategy<Value = (usize, usize, u32)> {
    (1usize..=14, 1usize..=14, 1u32..64).prop_filter("orthogonal pair", |&(i, j, _)| {
        i != j && (i as isize - j as isize).abs() != 7
    })
}

#[test]
fn clifford_relations() {
    let f = gf64();
    let one = CliffordElement::one(&f);
    for i in 1..=7 {
        let ei = CliffordElement::e(&f, i).unwrap();
        let fi = CliffordElement::f(&f, i).unwrap();
        assert!(ei.mul(&ei).is_zero());
        assert!(fi.mul(&fi).is_zero());
        for j in 1..=7 {
            let ej = CliffordElement::e(&f, j).unwrap();
            let fj = CliffordElement::f(&f, j).unwrap();
            let anti = ei.mul(&fj).add(&fj.mul(&ei));
            assert_eq!(anti, if i == j { one.clone() } else { CliffordElement::zero(&f) });
            assert_eq!(ei.mul(&ej).add(&ej.mul(&ei)), CliffordElement::zero(&f));
            assert_eq!(fi.mul(&fj).add(&fj.mul(&fi)), CliffordElement::zero(&f));
        }
    }
}

#[test]
fn torus_elements_are_invertible() {
    let f = gf64();
    for i in 1..=7 {
        for l in 1..64 {
            let s = torus_element(&f, i, l).unwrap();
            let t = torus_element(&f, i, f.inv(l).unwrap()).unwrap();
            assert_eq!(s.mul(&t), CliffordElement::one(&f));
        }
    }
}

#[test]
fn root_elements_need_orthogonal_pairs() {
    let f = gf64();
    assert!(root_element(&f, 2, 9, 1).is_err());
    assert!(root_element(&f, 2, 10, 1).is_ok());
}

#[test]
fn parser_rejects_garbage() {
    let f = gf64();
    for bad in ["", "s7(", "e8", "(1+f1", "f1f2)"] {
        assert!(evaluate(&f, bad, Convention::Standard).is_err(), "{bad}");
    }
}

#[test]
fn spin_quadratic_refuses_odd_characteristic() {
    let f = FieldSpec::new(3).unwrap();
    assert!(spin_quadratic(&Spinor::basis(&f, 0).unwrap()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiplication_is_associative(
        a in proptest::collection::vec((0u8..14, 1u32..64), 1..4),
        b in proptest::collection::vec((0u8..14, 1u32..64), 1..4),
        c in proptest::collection::vec((0u8..14, 1u32..64), 1..4),
    ) {
        let f = gf64();
        let build = |ws: &[(u8, u32)]| ws.iter().fold(CliffordElement::one(&f), |acc, &(g, l)| {
            acc.mul(&CliffordElement::one(&f).add(&CliffordElement::generator(&f, g).scale(l)))
        });
        let (x, y, z) = (build(&a), build(&b), build(&c));
        prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
        prop_assert_eq!(x.mul(&y).reversed(), x.reversed().mul(&y.reversed()));
        prop_assert_eq!(x.reversed().reversed(), x);
    }

    #[test]
    fn action_is_a_homomorphism(
        r1 in root_strategy(),
        r2 in root_strategy(),
        coeffs in proptest::collection::vec(0u32..64, 64),
    ) {
        let f = gf64();
        let s1 = root_element(&f, r1.0, r1.1, r1.2).unwrap();
        let s2 = root_element(&f, r2.0, r2.1, r2.2).unwrap();
        let x = spinor_from(&f, &coeffs);
        for conv in [Convention::Standard, Convention::Reversed] {
            let lhs = spin_action(&s1.mul(&s2), &x, conv).unwrap();
            let rhs = spin_action(&s1, &spin_action(&s2, &x, conv).unwrap(), conv).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn root_elements_preserve_the_vector_form(
        r in root_strategy(),
        v in proptest::collection::vec(0u32..64, 14),
    ) {
        let f = gf64();
        let s = root_element(&f, r.0, r.1, r.2).unwrap();
        let w = vector_action(&s, &v).unwrap();
        prop_assert_eq!(vector_quadratic(&f, &w), vector_quadratic(&f, &v));
    }

    // B6 is the stabilizer of e7 + f7: long roots avoid 7 and 14, short ones pair them
    #[test]
    fn b6_elements_preserve_the_spin_form(
        r in root_strategy(),
        short in any::<bool>(),
        coeffs in proptest::collection::vec(0u32..64, 64),
    ) {
        let f = gf64();
        let (i, j, l) = r;
        prop_assume!(![i, j].iter().any(|&k| k == 7 || k == 14));
        let s = if short {
            root_element(&f, i, 7, l).unwrap().mul(&root_element(&f, i, 14, l).unwrap())
        } else {
            root_element(&f, i, j, l).unwrap()
        };
        let x = spinor_from(&f, &coeffs);
        let y = spin_action(&s, &x, Convention::Standard).unwrap();
        prop_assert_eq!(spin_quadratic(&y).unwrap(), spin_quadratic(&x).unwrap());
    }
}
