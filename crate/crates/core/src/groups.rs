//! Generators and orders of the finite classical groups, and the small
//! permutation groups used for twisted classes.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{OrbitaError, Result};
use crate::field::{Field, FieldSpec};
use crate::matrix::Matrix;
use crate::quadform::QuadraticForm;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    SL,
    Sp,
    OmegaPlus,
    PGL2,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::SL => "SL",
            Family::Sp => "Sp",
            Family::OmegaPlus => "Omega+",
            Family::PGL2 => "PGL",
        };
        write!(f, "{s}")
    }
}

#[derive(Clone, Debug)]
pub struct GroupSpec {
    pub family: Family,
    pub n: usize,
    pub field: Field,
    pub generators: Vec<Matrix>,
    pub order: BigUint,
}

impl GroupSpec {
    pub fn q(&self) -> u32 {
        self.field.q()
    }

    pub fn name(&self) -> String {
        format!("{}{}({})", self.family, self.n, self.field.q())
    }
}

/// A GF(p)-basis of GF(q) under addition: 1, t, t^2, ...
pub fn additive_basis(field: &FieldSpec) -> Vec<u32> {
    (0..field.k()).map(|i| field.p().pow(i)).collect()
}

/// Gram matrix of the symplectic form in the ordering e_1..e_m, f_m..f_1:
/// entry (i, n-1-i) is +1 for i < m and -1 otherwise.
pub fn symplectic_gram(field: &Field, n: usize) -> Result<Matrix> {
    if n % 2 == 1 || n == 0 {
        return Err(OrbitaError::Usage(format!("symplectic degree {n} must be even")));
    }
    let mut j = Matrix::zeros(field, n, n);
    for i in 0..n {
        j.set(i, n - 1 - i, if i < n / 2 { 1 } else { field.neg(1) });
    }
    Ok(j)
}

/// The quadratic form x_1 x_{m+1} + ... + x_m x_{2m}.
pub fn hyperbolic_form(field: &Field, n: usize) -> Result<QuadraticForm> {
    if n % 2 == 1 {
        return Err(OrbitaError::Usage(format!("hyperbolic degree {n} must be even")));
    }
    let m = n / 2;
    let mut u = Matrix::zeros(field, n, n);
    for i in 0..m {
        u.set(i, m + i, 1);
    }
    QuadraticForm::from_upper(u)
}

/// Weight of the basis vector at `idx` in the ordering e_1..e_m, f_m..f_1.
fn symplectic_weight(m: usize, idx: usize) -> (usize, i32) {
    if idx < m {
        (idx, 1)
    } else {
        (2 * m - 1 - idx, -1)
    }
}

/// Nilpotent root vectors X of sp_{2m}, each with the weight of its root.
pub fn symplectic_root_vectors(field: &Field, m: usize) -> Result<Vec<(Vec<i32>, Matrix)>> {
    let n = 2 * m;
    let omega = symplectic_gram(field, n)?;
    let omega_inv = omega.scale(field.neg(1));
    let mut out = Vec::new();
    for a in 0..n {
        for b in a..n {
            if b == n - 1 - a && a != b {
                continue;
            }
            let mut s = Matrix::zeros(field, n, n);
            s.set(a, b, 1);
            s.set(b, a, 1);
            let x = omega_inv.mul(&s);
            let (r, c) = (0..n * n)
                .map(|k| (k / n, k % n))
                .find(|&(r, c)| x.get(r, c) != 0)
                .expect("nonzero root vector");
            let mut w = vec![0i32; m];
            let (ir, sr) = symplectic_weight(m, r);
            let (ic, sc) = symplectic_weight(m, c);
            w[ir] += sr;
            w[ic] -= sc;
            out.push((w, x));
        }
    }
    Ok(out)
}

fn unipotent(x: &Matrix, t: u32) -> Matrix {
    Matrix::identity(x.field(), x.rows()).add(&x.scale(t))
}

fn sl_generators(field: &Field, n: usize) -> Vec<Matrix> {
    let mut gens = Vec::new();
    for i in 0..n - 1 {
        for &t in &additive_basis(field) {
            for (r, c) in [(i, i + 1), (i + 1, i)] {
                gens.push(unipotent(&Matrix::unit(field, n, r, c), t));
            }
        }
    }
    gens
}

fn sp_generators(field: &Field, n: usize) -> Result<Vec<Matrix>> {
    let m = n / 2;
    let mut simple: Vec<Vec<i32>> = (0..m - 1)
        .map(|i| {
            let mut w = vec![0; m];
            w[i] = 1;
            w[i + 1] = -1;
            w
        })
        .collect();
    let mut long = vec![0; m];
    long[m - 1] = 2;
    simple.push(long);
    let roots = symplectic_root_vectors(field, m)?;
    let mut gens = Vec::new();
    for alpha in &simple {
        let neg: Vec<i32> = alpha.iter().map(|x| -x).collect();
        for target in [alpha, &neg] {
            let (_, x) = roots
                .iter()
                .find(|(w, _)| w == target)
                .ok_or_else(|| OrbitaError::Consistency("missing simple root vector".into()))?;
            for &t in &additive_basis(field) {
                gens.push(unipotent(x, t));
            }
        }
    }
    Ok(gens)
}

/// Root elements of Omega^+_{2m} for the simple roots and their negatives,
/// on the basis x_1..x_m, x_{m+1}..x_{2m} with Q = sum x_i x_{m+i}.
fn omega_plus_generators(field: &Field, n: usize) -> Vec<Matrix> {
    let m = n / 2;
    let neg1 = field.neg(1);
    let mut xs: Vec<Matrix> = Vec::new();
    let mut root = |entries: [(usize, usize, u32); 2]| {
        let mut x = Matrix::zeros(field, n, n);
        for (r, c, v) in entries {
            x.set(r, c, v);
        }
        xs.push(x);
    };
    for i in 0..m - 1 {
        let j = i + 1;
        root([(i, j, 1), (m + j, m + i, neg1)]);
        root([(j, i, 1), (m + i, m + j, neg1)]);
    }
    let (i, j) = (m - 2, m - 1);
    root([(i, m + j, 1), (j, m + i, neg1)]);
    root([(m + i, j, 1), (m + j, i, neg1)]);
    let mut gens = Vec::new();
    for x in &xs {
        for &t in &additive_basis(field) {
            gens.push(unipotent(x, t));
        }
    }
    gens
}

/// Standard generators of the requested group together with its order.
pub fn classical_generators(family: Family, n: usize, q: u32) -> Result<GroupSpec> {
    let field = FieldSpec::new(q)?;
    let order = group_order(family, n, q)?;
    let generators = match family {
        Family::SL => sl_generators(&field, n),
        Family::Sp => sp_generators(&field, n)?,
        Family::OmegaPlus => {
            if n != 8 || q != 2 {
                return Err(OrbitaError::Refused(format!(
                    "Omega+ is provided for degree 8 over GF(2) only, not degree {n} over GF({q})"
                )));
            }
            omega_plus_generators(&field, n)
        }
        Family::PGL2 => {
            let mut g = sl_generators(&field, 2);
            g.push(Matrix::diagonal(&field, &[field.primitive(), 1]));
            g
        }
    };
    let spec = GroupSpec {
        family,
        n,
        field,
        generators,
        order,
    };
    check_generators(&spec)?;
    Ok(spec)
}

/// Generators are invertible and preserve the family's defining data.
pub fn check_generators(g: &GroupSpec) -> Result<()> {
    let f = &g.field;
    for m in &g.generators {
        let det = m.determinant()?;
        let ok = match g.family {
            Family::SL => det == 1,
            Family::PGL2 => det != 0,
            Family::Sp => {
                let j = symplectic_gram(f, g.n)?;
                m.transpose().mul(&j).mul(m) == j
            }
            Family::OmegaPlus => hyperbolic_form(f, g.n)?.is_invariant_under(m),
        };
        if !ok {
            return Err(OrbitaError::Consistency(format!(
                "generator fails the defining check of {}",
                g.name()
            )));
        }
    }
    Ok(())
}

fn qpow(q: u32, e: u32) -> BigUint {
    BigUint::from(q).pow(e)
}

pub fn group_order(family: Family, n: usize, q: u32) -> Result<BigUint> {
    crate::field::prime_power(q)
        .ok_or_else(|| OrbitaError::Domain(format!("{q} is not a prime power")))?;
    let one = BigUint::one();
    let n32 = n as u32;
    match family {
        Family::SL => {
            if n < 2 {
                return Err(OrbitaError::Refused(format!("SL of degree {n}")));
            }
            let mut o = qpow(q, n32 * (n32 - 1) / 2);
            for i in 2..=n32 {
                o *= qpow(q, i) - &one;
            }
            Ok(o)
        }
        Family::Sp => {
            if n % 2 == 1 || n == 0 {
                return Err(OrbitaError::Refused(format!("Sp of odd degree {n}")));
            }
            let m = n32 / 2;
            let mut o = qpow(q, m * m);
            for i in 1..=m {
                o *= qpow(q, 2 * i) - &one;
            }
            Ok(o)
        }
        Family::OmegaPlus => {
            if n % 2 == 1 || n < 4 {
                return Err(OrbitaError::Refused(format!("Omega+ of degree {n}")));
            }
            let m = n32 / 2;
            let mut o = qpow(q, m * (m - 1)) * (qpow(q, m) - &one);
            for i in 1..m {
                o *= qpow(q, 2 * i) - &one;
            }
            if q % 2 == 1 {
                o /= 2u32;
            }
            Ok(o)
        }
        Family::PGL2 => {
            if n != 2 {
                return Err(OrbitaError::Refused(format!("PGL of degree {n}")));
            }
            Ok(BigUint::from(q) * (qpow(q, 2) - &one))
        }
    }
}

/// Size of the group generated by `gens`, by breadth-first closure.
/// Matrices are compared exactly, so PGL generators count GL elements.
pub fn closure_size(gens: &[Matrix], limit: usize) -> Result<usize> {
    let first = gens
        .first()
        .ok_or_else(|| OrbitaError::Usage("closure of an empty generating set".into()))?;
    let id = Matrix::identity(first.field(), first.rows());
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(id.data().to_vec());
    queue.push_back(id);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = g.mul(&x);
            if seen.insert(y.data().to_vec()) {
                if seen.len() > limit {
                    return Err(OrbitaError::Budget(format!(
                        "closure exceeds {limit} elements"
                    )));
                }
                queue.push_back(y);
            }
        }
    }
    Ok(seen.len())
}

/// A permutation of {0, .., n-1}; composition `(a * b)(i) = a(b(i))`.
pub type Perm = Vec<u8>;

pub fn compose(a: &[u8], b: &[u8]) -> Perm {
    b.iter().map(|&i| a[i as usize]).collect()
}

pub fn invert(a: &[u8]) -> Perm {
    let mut out = vec![0; a.len()];
    for (i, &x) in a.iter().enumerate() {
        out[x as usize] = i as u8;
    }
    out
}

fn is_even(p: &[u8]) -> bool {
    let mut inversions = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    inversions % 2 == 0
}

fn all_perms(n: usize) -> Vec<Perm> {
    fn rec(prefix: &mut Perm, n: usize, out: &mut Vec<Perm>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for x in 0..n as u8 {
            if !prefix.contains(&x) {
                prefix.push(x);
                rec(prefix, n, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), n, &mut out);
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Automorphism {
    Identity,
    /// x -> s x s^-1 for a fixed permutation s, possibly outside the group.
    ConjugationBy(Perm),
}

/// An explicit permutation group with a chosen automorphism.
#[derive(Clone, Debug)]
pub struct SmallGroup {
    pub name: String,
    pub elements: Vec<Perm>,
    /// table[i][j] = index of elements[i] * elements[j]
    pub table: Vec<Vec<usize>>,
    pub sigma: Vec<usize>,
    pub sigma_name: String,
}

impl SmallGroup {
    pub fn alt4() -> Self {
        Self::from_elements("Alt4", all_perms(4).into_iter().filter(|p| is_even(p)).collect())
    }

    pub fn sym4() -> Self {
        Self::from_elements("Sym4", all_perms(4))
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "alt4" => Ok(Self::alt4()),
            "sym4" => Ok(Self::sym4()),
            "trivial" => Ok(Self::from_elements("Trivial", vec![vec![0]])),
            _ => Err(OrbitaError::Usage(format!("unknown small group {name}"))),
        }
    }

    fn from_elements(name: &str, elements: Vec<Perm>) -> Self {
        let index = |p: &Perm| elements.iter().position(|e| e == p).expect("closed under products");
        let table = elements
            .iter()
            .map(|a| elements.iter().map(|b| index(&compose(a, b))).collect())
            .collect();
        let sigma = (0..elements.len()).collect();
        SmallGroup {
            name: name.into(),
            elements,
            table,
            sigma,
            sigma_name: "identity".into(),
        }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn index_of(&self, p: &[u8]) -> Option<usize> {
        self.elements.iter().position(|e| e == p)
    }

    pub fn identity(&self) -> usize {
        let id: Perm = (0..self.elements[0].len() as u8).collect();
        self.index_of(&id).unwrap()
    }

    pub fn inverse(&self, i: usize) -> usize {
        self.index_of(&invert(&self.elements[i])).unwrap()
    }

    /// Install an automorphism; fails unless it is a bijective homomorphism.
    pub fn with_automorphism(mut self, aut: Automorphism) -> Result<Self> {
        let (sigma, name) = match &aut {
            Automorphism::Identity => ((0..self.order()).collect(), "identity".to_string()),
            Automorphism::ConjugationBy(s) => {
                if s.len() != self.elements[0].len() {
                    return Err(OrbitaError::Usage(format!(
                        "{s:?} does not act on the points of {}",
                        self.name
                    )));
                }
                let sinv = invert(s);
                let map: Option<Vec<usize>> = self
                    .elements
                    .iter()
                    .map(|x| self.index_of(&compose(&compose(s, x), &sinv)))
                    .collect();
                let map = map.ok_or_else(|| {
                    OrbitaError::Usage("conjugating element does not normalize the group".into())
                })?;
                (map, format!("conjugation by {s:?}"))
            }
        };
        self.sigma = sigma;
        self.sigma_name = name;
        self.check_automorphism()?;
        Ok(self)
    }

    pub fn check_automorphism(&self) -> Result<()> {
        let n = self.order();
        let mut seen = vec![false; n];
        for &s in &self.sigma {
            if s >= n || std::mem::replace(&mut seen[s], true) {
                return Err(OrbitaError::Usage("sigma is not a bijection".into()));
            }
        }
        for a in 0..n {
            for b in 0..n {
                if self.sigma[self.table[a][b]] != self.table[self.sigma[a]][self.sigma[b]] {
                    return Err(OrbitaError::Usage("sigma is not a homomorphism".into()));
                }
            }
        }
        Ok(())
    }

    /// Ordinary conjugacy classes.
    pub fn conjugacy_class_count(&self) -> usize {
        let n = self.order();
        let mut seen = vec![false; n];
        let mut count = 0;
        for x in 0..n {
            if seen[x] {
                continue;
            }
            count += 1;
            for g in 0..n {
                let y = self.table[self.table[g][x]][self.inverse(g)];
                seen[y] = true;
            }
        }
        count
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders() {
        assert_eq!(group_order(Family::Sp, 6, 2).unwrap(), BigUint::from(1451520u32));
        assert_eq!(group_order(Family::SL, 4, 2).unwrap(), BigUint::from(20160u32));
        assert_eq!(group_order(Family::PGL2, 2, 7).unwrap(), BigUint::from(336u32));
        assert_eq!(group_order(Family::Sp, 4, 2).unwrap(), BigUint::from(720u32));
        assert_eq!(
            group_order(Family::OmegaPlus, 8, 2).unwrap(),
            BigUint::from(174182400u32)
        );
        assert!(group_order(Family::Sp, 5, 2).is_err());
    }

    #[test]
    fn closures_match_orders() {
        for (fam, n, q) in [
            (Family::SL, 2, 5),
            (Family::Sp, 4, 2),
            (Family::SL, 4, 2),
            (Family::SL, 2, 4),
            (Family::Sp, 2, 3),
        ] {
            let g = classical_generators(fam, n, q).unwrap();
            let size = closure_size(&g.generators, 1_000_000).unwrap();
            assert_eq!(BigUint::from(size), g.order, "{}", g.name());
        }
    }

    #[test]
    fn pgl2_closure_counts_gl() {
        let g = classical_generators(Family::PGL2, 2, 5).unwrap();
        // GL2(5) has order 480 = |PGL2(5)| * (q - 1)
        assert_eq!(closure_size(&g.generators, 10_000).unwrap(), 480);
        assert_eq!(g.order, BigUint::from(120u32));
    }

    #[test]
    fn omega_plus_generators_preserve_form() {
        let g = classical_generators(Family::OmegaPlus, 8, 2).unwrap();
        assert_eq!(g.generators.len(), 8);
        assert!(classical_generators(Family::OmegaPlus, 8, 3).is_err());
    }

    #[test]
    fn small_groups() {
        let a = SmallGroup::alt4();
        assert_eq!(a.order(), 12);
        assert_eq!(a.conjugacy_class_count(), 4);
        let s = SmallGroup::sym4();
        assert_eq!(s.order(), 24);
        assert_eq!(s.conjugacy_class_count(), 5);
        let tw = SmallGroup::alt4()
            .with_automorphism(Automorphism::ConjugationBy(vec![1, 0, 2, 3]))
            .unwrap();
        // sigma^2 is the identity map, i.e. inner by the identity of Alt4
        for x in 0..12 {
            assert_eq!(tw.sigma[tw.sigma[x]], x);
        }
        assert!(SmallGroup::alt4()
            .with_automorphism(Automorphism::ConjugationBy(vec![0, 1, 2]))
            .is_err());
    }
}
