//! Orbit partitions against a plain hash-set search over canonical points.

use std::collections::{BTreeSet, HashSet, VecDeque};

use orbita::cases::{build_case, ModuleCase};
use orbita::field::FieldSpec;
use orbita::orbitscan::{orbit_of, orbit_partition, scan_diagonal_cosets, ScanOptions};
use orbita::quadform::increment;
use proptest::prelude::*;

fn normalize(f: &FieldSpec, v: &[u32]) -> Vec<u32> {
    let lead = *v.iter().find(|&&x| x != 0).unwrap();
    let inv = f.inv(lead).unwrap();
    v.iter().map(|&x| f.mul(x, inv)).collect()
}

/// Sorted orbit sizes of the singular points, found one BFS at a time.
fn naive_orbit_sizes(case: &ModuleCase) -> Vec<u64> {
    let f = &case.field;
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    let mut sizes = Vec::new();
    let mut v = vec![0u32; case.dim];
    while increment(&mut v, f.q()) {
        if v.iter().find(|&&x| x != 0) != Some(&1) || seen.contains(&v) {
            continue;
        }
        if case.form.evaluate(&v).unwrap() != 0 {
            continue;
        }
        let mut queue = VecDeque::from([v.clone()]);
        seen.insert(v.clone());
        let mut size = 0;
        while let Some(x) = queue.pop_front() {
            size += 1;
            for g in &case.gens {
                let y = normalize(f, &g.apply(&x));
                if seen.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
        sizes.push(size);
    }
    sizes.sort_unstable();
    sizes
}

fn check(id: &str, q: u32) {
    let case = build_case(id, q, None).unwrap();
    let report = orbit_partition(&case, ScanOptions::default(), Some(1)).unwrap();
    let mut sizes = report.sizes();
    sizes.sort_unstable();
    assert_eq!(sizes, naive_orbit_sizes(&case), "{id} over GF({q})");
}

#[test]
fn sym4_small_fields() {
    for q in [5, 7, 11] {
        check("A1-sym4", q);
    }
}

#[test]
fn adjoint_a2() {
    check("A2-adjoint", 2);
    check("A2-adjoint", 4);
}

#[test]
fn adjoint_b2_q3() {
    check("B2-adjoint", 3);
}

#[test]
fn adjoint_a3_q2() {
    check("A3-adjoint-p2", 2);
}

#[test]
fn lambda2_c3_q2() {
    check("C3-lambda2", 2);
}

#[test]
fn tensor_sp4_sp4_q2() {
    check("Sp4xSp4", 2);
}

#[test]
fn representatives_are_least_points() {
    let case = build_case("A2-adjoint", 4, None).unwrap();
    let report = orbit_partition(&case, ScanOptions::default(), None).unwrap();
    for o in &report.orbits {
        let (size, _) = orbit_of(&case, &o.rep, ScanOptions::default(), None).unwrap();
        assert_eq!(size, o.size);
    }
}

#[test]
fn budget_refusal() {
    let case = build_case("Sp4xSp4", 3, None).unwrap();
    let opts = ScanOptions {
        budget: 1000,
        ..ScanOptions::default()
    };
    assert!(orbit_partition(&case, opts, None).is_err());
}

// singular spectra are the sets {a, b, c} with abc = 1 and a + b + c = 0
fn naive_spectra(q: u32) -> usize {
    let mut seen = BTreeSet::new();
    for b in 1..q {
        for c in 1..q {
            let a = (1..q).find(|a| a * b % q * c % q == 1).unwrap();
            if (a + b + c) % q == 0 {
                let mut t = [a, b, c];
                t.sort_unstable();
                seen.insert(t);
            }
        }
    }
    seen.len()
}

#[test]
fn diagonal_double_cosets_against_triples() {
    for q in [5, 7, 11, 13, 19] {
        assert_eq!(scan_diagonal_cosets(q).unwrap().distinct_spectra, naive_spectra(q), "q={q}");
    }
    assert_eq!(
        [7, 13, 19].map(|q| scan_diagonal_cosets(q).unwrap().distinct_spectra),
        [1, 1, 4]
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn orbit_of_is_invariant_under_generators(
        seed in proptest::collection::vec(0u32..4, 8),
        word in proptest::collection::vec(0usize..8, 1..6),
    ) {
        let case = build_case("A2-adjoint", 4, None).unwrap();
        prop_assume!(seed.iter().any(|&x| x != 0));
        let mut v = seed.clone();
        for &w in &word {
            v = case.gens[w % case.gens.len()].apply(&v);
        }
        let a = orbit_of(&case, &seed, ScanOptions::default(), Some(1)).unwrap();
        let b = orbit_of(&case, &v, ScanOptions::default(), Some(1)).unwrap();
        prop_assert_eq!(a, b);
    }
}
