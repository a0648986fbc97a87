//! Field arithmetic against schoolbook polynomial arithmetic over GF(p).

use orbita::field::{prime_power, FieldSpec};
use proptest::prelude::*;

const ORDERS: &[u32] = &[2, 3, 4, 5, 7, 8, 9, 16, 25, 27, 32, 49, 64, 81, 121, 125, 128, 243, 256, 343, 625, 729, 1024];

fn digits(mut a: u32, p: u32, k: usize) -> Vec<u32> {
    (0..k)
        .map(|_| {
            let d = a % p;
            a /= p;
            d
        })
        .collect()
}

fn undigits(v: &[u32], p: u32) -> u32 {
    v.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Product of two encoded elements reduced by the monic modulus, all by hand.
fn oracle_mul(p: u32, modulus: &[u32], a: u32, b: u32) -> u32 {
    let k = modulus.len() - 1;
    let (a, b) = (digits(a, p, k), digits(b, p, k));
    let mut prod = vec![0u32; 2 * k];
    for i in 0..k {
        for j in 0..k {
            prod[i + j] = (prod[i + j] + a[i] * b[j]) % p;
        }
    }
    for d in (k..2 * k).rev() {
        let c = prod[d];
        if c == 0 {
            continue;
        }
        for (i, &m) in modulus.iter().enumerate() {
            let idx = d - k + i;
            prod[idx] = (prod[idx] + p * p - c * m % p) % p;
        }
    }
    undigits(&prod[..k], p)
}

fn has_factor(p: u32, modulus: &[u32]) -> bool {
    // a monic polynomial of degree k is reducible iff a monic factor of degree <= k/2 divides it
    let k = modulus.len() - 1;
    for deg in 1..=k / 2 {
        for low in 0..p.pow(deg as u32) {
            let mut d = digits(low, p, deg);
            d.push(1);
            let mut r = modulus.to_vec();
            for top in (deg..=k).rev() {
                let c = r[top];
                if c == 0 {
                    continue;
                }
                for (i, &x) in d.iter().enumerate() {
                    let idx = top - deg + i;
                    r[idx] = (r[idx] + p * p - c * x % p) % p;
                }
            }
            if r.iter().all(|&x| x == 0) {
                return true;
            }
        }
    }
    false
}

#[test]
fn moduli_are_irreducible_and_monic() {
    for &q in ORDERS {
        let f = FieldSpec::new(q).unwrap();
        let m = f.modulus();
        assert_eq!(*m.last().unwrap(), 1);
        assert_eq!(m.len() as u32 - 1, f.k());
        if f.k() > 1 {
            assert!(!has_factor(f.p(), m), "GF({q}) modulus reducible");
        }
    }
}

#[test]
fn multiplication_tables_match_oracle() {
    for &q in ORDERS.iter().filter(|&&q| q <= 256) {
        let f = FieldSpec::new(q).unwrap();
        for a in 0..q {
            for b in 0..q {
                assert_eq!(f.mul(a, b), oracle_mul(f.p(), f.modulus(), a, b), "GF({q}) {a}*{b}");
            }
        }
    }
}

#[test]
fn primitive_element_generates() {
    for &q in ORDERS {
        let f = FieldSpec::new(q).unwrap();
        let g = f.primitive();
        let mut seen = std::collections::HashSet::new();
        let mut x = 1;
        for _ in 0..q - 1 {
            seen.insert(x);
            x = f.mul(x, g);
        }
        assert_eq!(seen.len() as u32, q - 1);
        assert_eq!(x, 1);
    }
}

#[test]
fn non_prime_powers_rejected() {
    for q in [0, 1, 6, 10, 12, 15, 100] {
        assert!(prime_power(q).is_none());
        assert!(FieldSpec::new(q).is_err());
    }
}

#[test]
fn parse_and_format() {
    let f = FieldSpec::new(4).unwrap();
    assert_eq!(f.parse("t+1").unwrap(), 3);
    assert_eq!(f.parse("t").unwrap(), 2);
    let g = FieldSpec::new(64).unwrap();
    for a in 0..64 {
        assert_eq!(g.parse(&g.format(a)).unwrap(), a);
    }
    assert!(f.parse("t^^").is_err());
}

fn field_and_elems() -> impl Strategy<Value = (u32, u32, u32, u32)> {
    proptest::sample::select(ORDERS.to_vec())
        .prop_flat_map(|q| (Just(q), 0..q, 0..q, 0..q))
}

proptest! {
    #[test]
    fn ring_axioms((q, a, b, c) in field_and_elems()) {
        let f = FieldSpec::new(q).unwrap();
        prop_assert_eq!(f.add(a, f.add(b, c)), f.add(f.add(a, b), c));
        prop_assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), 0);
        prop_assert_eq!(f.sub(f.add(a, b), b), a);
    }

    #[test]
    fn inverses_and_frobenius((q, a, b, _c) in field_and_elems()) {
        let f = FieldSpec::new(q).unwrap();
        if a != 0 {
            let i = f.inv(a).unwrap();
            prop_assert_eq!(f.mul(a, i), 1);
            prop_assert_eq!(f.pow(a, (q - 1) as u64), 1);
        } else {
            prop_assert!(f.inv(a).is_none());
        }
        prop_assert_eq!(f.frobenius(f.add(a, b)), f.add(f.frobenius(a), f.frobenius(b)));
        prop_assert_eq!(f.frobenius(f.mul(a, b)), f.mul(f.frobenius(a), f.frobenius(b)));
        if let Some(r) = f.square_root(a) {
            prop_assert_eq!(f.mul(r, r), a);
        }
    }

    #[test]
    fn subfield_embedding_is_a_homomorphism(a in 0u32..4, b in 0u32..4) {
        let small = FieldSpec::new(4).unwrap();
        let big = FieldSpec::new(16).unwrap();
        let e = small.embedding_into(&big).unwrap();
        prop_assert_eq!(e[small.mul(a, b) as usize], big.mul(e[a as usize], e[b as usize]));
        prop_assert_eq!(e[small.add(a, b) as usize], big.add(e[a as usize], e[b as usize]));
    }
}
