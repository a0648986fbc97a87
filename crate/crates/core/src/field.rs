//! Finite fields GF(p^k) with p^k at most 2^16.
//!
//! An element is stored as the integer `c_0 + c_1 p + ... + c_{k-1} p^{k-1}`
//! where `c_0 + c_1 t + ...` is its residue modulo the field's modulus. For
//! p = 2 that is the usual bit-packed polynomial and addition is XOR.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{OrbitaError, Result};

/// Largest supported field order.
pub const MAX_ORDER: u32 = 1 << 16;

/// Immutable description of GF(p^k) together with its arithmetic tables.
pub struct FieldSpec {
    p: u32,
    k: u32,
    q: u32,
    modulus: Vec<u32>,
    primitive: u32,
    // exp is doubled so that exp[log a + log b] never needs a reduction.
    exp: Vec<u32>,
    log: Vec<u32>,
    add_table: Option<Vec<u16>>,
}

/// Shared handle to a field; matrices and forms hold one of these.
pub type Field = Arc<FieldSpec>;

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}) [{}]", self.q, self.modulus_string())
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k && self.modulus == other.modulus
    }
}

impl Eq for FieldSpec {}

/// Factor `q` as `p^k`, or return None when q is not a prime power.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q && q % p != 0 {
        p += 1;
    }
    if q % p != 0 {
        p = q;
    }
    let mut rest = q;
    let mut k = 0;
    while rest % p == 0 {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p, k))
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Dense coefficient arithmetic over GF(p), low degree first. Only used while
// building tables, so clarity wins over speed here.
fn poly_trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    let inv_lead = mod_inv(m[dm], p);
    while r.len() > dm {
        let c = (r[r.len() - 1] * inv_lead) % p;
        let shift = r.len() - 1 - dm;
        for (i, &mi) in m.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - (c * mi) % p) % p;
        }
        poly_trim(&mut r);
    }
    r
}

fn mod_inv(a: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let mut b = a as u64 % p as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

fn digits(mut v: u32, p: u32, k: u32) -> Vec<u32> {
    (0..k)
        .map(|_| {
            let d = v % p;
            v /= p;
            d
        })
        .collect()
}

fn is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = f.len() as u32 - 1;
    for d in 1..=deg / 2 {
        for code in 0..p.pow(d) {
            let mut g = digits(code, p, d);
            g.push(1);
            if poly_rem(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// Least monic irreducible polynomial of degree k over GF(p), ordering the
/// candidates by the integer value of their lower coefficients in base p.
fn least_irreducible(p: u32, k: u32) -> Vec<u32> {
    if k == 1 {
        return vec![0, 1];
    }
    for code in 0..p.pow(k) {
        let mut f = digits(code, p, k);
        f.push(1);
        if f[0] != 0 && is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl FieldSpec {
    /// Build GF(q). Fails for non prime powers and for q above 2^16.
    pub fn new(q: u32) -> Result<Field> {
        if q > MAX_ORDER {
            return Err(OrbitaError::Domain(format!("field order {q} exceeds {MAX_ORDER}")));
        }
        let (p, k) = prime_power(q)
            .ok_or_else(|| OrbitaError::Domain(format!("{q} is not a prime power")))?;
        let modulus = least_irreducible(p, k);
        let slow_mul = |a: u32, b: u32| -> u32 {
            let da = digits(a, p, k);
            let db = digits(b, p, k);
            let mut prod = vec![0u32; 2 * k as usize];
            for (i, &x) in da.iter().enumerate() {
                for (j, &y) in db.iter().enumerate() {
                    prod[i + j] = (prod[i + j] + x * y) % p;
                }
            }
            let r = if k == 1 {
                vec![prod[0]]
            } else {
                poly_rem(&prod, &modulus, p)
            };
            r.iter().rev().fold(0, |acc, &c| acc * p + c)
        };
        let order = q - 1;
        let factors = prime_factors(order);
        let slow_pow = |mut b: u32, mut e: u32| -> u32 {
            let mut r = 1;
            while e > 0 {
                if e & 1 == 1 {
                    r = slow_mul(r, b);
                }
                b = slow_mul(b, b);
                e >>= 1;
            }
            r
        };
        let primitive = (1..q)
            .find(|&g| factors.iter().all(|&r| slow_pow(g, order / r) != 1))
            .expect("multiplicative group is cyclic");
        let mut exp = vec![0u32; 2 * order as usize];
        let mut log = vec![0u32; q as usize];
        let mut x = 1;
        for i in 0..order {
            exp[i as usize] = x;
            exp[(i + order) as usize] = x;
            log[x as usize] = i;
            x = slow_mul(x, primitive);
        }
        let add_table = (p != 2 && k > 1 && q <= 1024).then(|| {
            let mut t = vec![0u16; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    t[(a * q + b) as usize] = digit_add(a, b, p, k) as u16;
                }
            }
            t
        });
        Ok(Arc::new(FieldSpec {
            p,
            k,
            q,
            modulus,
            primitive,
            exp,
            log,
            add_table,
        }))
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Coefficients of the modulus, constant term first, leading 1 last.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// The generator of the multiplicative group used for the log tables.
    pub fn primitive(&self) -> u32 {
        self.primitive
    }

    pub fn modulus_string(&self) -> String {
        if self.k == 1 {
            return format!("GF({})", self.p);
        }
        let mut parts = Vec::new();
        for (i, &c) in self.modulus.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            };
            parts.push(match (c, i) {
                (_, 0) => c.to_string(),
                (1, _) => mono,
                _ => format!("{c}{mono}"),
            });
        }
        parts.join("+")
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            a ^ b
        } else if self.k == 1 {
            let s = a + b;
            if s >= self.p {
                s - self.p
            } else {
                s
            }
        } else if let Some(t) = &self.add_table {
            t[(a * self.q + b) as usize] as u32
        } else {
            digit_add(a, b, self.p, self.k)
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if self.p == 2 {
            a
        } else if self.k == 1 {
            if a == 0 {
                0
            } else {
                self.p - a
            }
        } else {
            let mut out = 0;
            let mut scale = 1;
            let mut v = a;
            for _ in 0..self.k {
                let d = v % self.p;
                v /= self.p;
                out += ((self.p - d) % self.p) * scale;
                scale *= self.p;
            }
            out
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
        }
    }

    #[inline]
    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            None
        } else {
            let l = self.log[a as usize];
            Some(self.exp[((self.q - 1 - l) % (self.q - 1)) as usize])
        }
    }

    pub fn div(&self, a: u32, b: u32) -> Option<u32> {
        self.inv(b).map(|ib| self.mul(a, ib))
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let l = self.log[a as usize] as u64 * (e % (self.q as u64 - 1));
        self.exp[(l % (self.q as u64 - 1)) as usize]
    }

    /// Discrete logarithm to the base `primitive()`.
    pub fn log(&self, a: u32) -> Option<u32> {
        (a != 0).then(|| self.log[a as usize])
    }

    /// `primitive()^e`.
    pub fn exp(&self, e: u64) -> u32 {
        self.exp[(e % (self.q as u64 - 1)) as usize]
    }

    /// Image of an integer under the prime-field embedding.
    pub fn from_int(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }

    /// The element `t`, i.e. the class of x modulo the defining polynomial.
    pub fn generator(&self) -> u32 {
        if self.k == 1 {
            // GF(p) = GF(p)[t]/(t): the class of t is 0, report the primitive root instead.
            self.primitive
        } else {
            self.p
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.q
    }

    pub fn frobenius(&self, a: u32) -> u32 {
        self.pow(a, self.p as u64)
    }

    /// Returns a square root of `x` when one exists in the field.
    ///
    /// For p = 2 the root is `x^(2^(k-1))`; otherwise the least encoding whose
    /// square equals `x`.
    pub fn square_root(&self, x: u32) -> Option<u32> {
        if self.p == 2 {
            return Some(self.pow(x, 1u64 << (self.k - 1)));
        }
        self.elements().find(|&r| self.mul(r, r) == x)
    }

    /// All roots of `a x^2 + b x + c`, sorted by encoding.
    pub fn quadratic_roots(&self, a: u32, b: u32, c: u32) -> Result<Vec<u32>> {
        if a == 0 {
            return Err(OrbitaError::Usage("leading coefficient is zero".into()));
        }
        Ok(self
            .elements()
            .filter(|&x| self.add(self.mul(self.add(self.mul(a, x), b), x), c) == 0)
            .collect())
    }

    /// Coefficients of `a` as a polynomial in t, constant term first.
    pub fn coefficients(&self, a: u32) -> Vec<u32> {
        digits(a, self.p, self.k)
    }

    pub fn from_coefficients(&self, coeffs: &[u32]) -> u32 {
        coeffs
            .iter()
            .take(self.k as usize)
            .rev()
            .fold(0, |acc, &c| acc * self.p + c % self.p)
    }

    /// Human readable form of an element: a residue for prime fields, a
    /// polynomial in `t` otherwise.
    pub fn format(&self, a: u32) -> String {
        if self.k == 1 {
            return a.to_string();
        }
        if a == 0 {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (i, &c) in self.coefficients(a).iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "t".into(),
                _ => format!("t^{i}"),
            };
            parts.push(match (c, i) {
                (_, 0) => c.to_string(),
                (1, _) => mono,
                _ => format!("{c}{mono}"),
            });
        }
        parts.join("+")
    }

    /// Parse an element written as an integer (a residue, reduced into the
    /// prime field) or as a polynomial in `t` such as `t^2+t+1` or `2t+1`.
    pub fn parse(&self, s: &str) -> Result<u32> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(OrbitaError::Parse("empty field element".into()));
        }
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.as_str()),
        };
        let mut total = 0;
        for term in body.split('+') {
            let v = if let Some(pos) = term.find('t') {
                let coef = &term[..pos];
                let c = if coef.is_empty() {
                    1
                } else {
                    coef.parse::<i64>()
                        .map_err(|_| OrbitaError::Parse(format!("bad coefficient in {term}")))?
                };
                let rest = &term[pos + 1..];
                let e = if rest.is_empty() {
                    1
                } else {
                    rest.strip_prefix('^')
                        .and_then(|x| x.parse::<u64>().ok())
                        .ok_or_else(|| OrbitaError::Parse(format!("bad exponent in {term}")))?
                };
                if self.k == 1 {
                    return Err(OrbitaError::Parse(format!(
                        "GF({}) has no element named t",
                        self.q
                    )));
                }
                self.mul(self.from_int(c), self.pow(self.p, e))
            } else {
                let n = term
                    .parse::<i64>()
                    .map_err(|_| OrbitaError::Parse(format!("bad field element {term}")))?;
                self.from_int(n)
            };
            total = self.add(total, v);
        }
        Ok(if neg { self.neg(total) } else { total })
    }

    /// Images of the elements of `self` inside `big`, indexed by encoding.
    /// Requires GF(q) to be a subfield of `big`.
    pub fn embedding_into(&self, big: &FieldSpec) -> Result<Vec<u32>> {
        if big.p != self.p || big.k % self.k != 0 {
            return Err(OrbitaError::Usage(format!(
                "GF({}) is not a subfield of GF({})",
                self.q, big.q
            )));
        }
        // Image of t: the least root of our modulus inside the big field.
        let eval = |x: u32| {
            self.modulus
                .iter()
                .rev()
                .fold(0, |acc, &c| big.add(big.mul(acc, x), c))
        };
        let root = if self.k == 1 {
            0
        } else {
            big.elements()
                .find(|&x| eval(x) == 0)
                .ok_or_else(|| OrbitaError::Consistency("modulus has no root in extension".into()))?
        };
        Ok(self
            .elements()
            .map(|a| {
                self.coefficients(a)
                    .iter()
                    .rev()
                    .fold(0, |acc, &c| big.add(big.mul(acc, root), c))
            })
            .collect())
    }
}

fn digit_add(a: u32, b: u32, p: u32, k: u32) -> u32 {
    let (mut a, mut b) = (a, b);
    let mut out = 0;
    let mut scale = 1;
    for _ in 0..k {
        out += ((a % p + b % p) % p) * scale;
        a /= p;
        b /= p;
        scale *= p;
    }
    out
}

/// An element bundled with its field. Operators panic on mismatched fields;
/// the `try_*` methods report a usage error instead.
#[derive(Clone)]
pub struct FieldElement {
    field: Field,
    value: u32,
}

impl FieldElement {
    pub fn new(field: &Field, value: u32) -> Result<Self> {
        if value >= field.q {
            return Err(OrbitaError::Usage(format!(
                "{value} is not an element encoding of GF({})",
                field.q
            )));
        }
        Ok(FieldElement {
            field: field.clone(),
            value,
        })
    }

    pub fn from_int(field: &Field, n: i64) -> Self {
        FieldElement {
            field: field.clone(),
            value: field.from_int(n),
        }
    }

    pub fn zero(field: &Field) -> Self {
        FieldElement {
            field: field.clone(),
            value: 0,
        }
    }

    pub fn one(field: &Field) -> Self {
        FieldElement {
            field: field.clone(),
            value: 1,
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.field, &other.field) || *self.field == *other.field {
            Ok(())
        } else {
            Err(OrbitaError::Usage(format!(
                "mixed fields GF({}) and GF({})",
                self.field.q, other.field.q
            )))
        }
    }

    fn with(&self, value: u32) -> Self {
        FieldElement {
            field: self.field.clone(),
            value,
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.with(self.field.add(self.value, other.value)))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.with(self.field.sub(self.value, other.value)))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.with(self.field.mul(self.value, other.value)))
    }

    pub fn inv(&self) -> Result<Self> {
        self.field
            .inv(self.value)
            .map(|v| self.with(v))
            .ok_or_else(|| OrbitaError::Domain("inverse of zero".into()))
    }

    pub fn pow(&self, e: u64) -> Self {
        self.with(self.field.pow(self.value, e))
    }

    pub fn square_root(&self) -> Option<Self> {
        self.field.square_root(self.value).map(|v| self.with(v))
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value && *self.field == *other.field
    }
}

impl Eq for FieldElement {}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.field.format(self.value))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.field.format(self.value))
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $try:ident) => {
        impl $tr for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                self.$try(&rhs).expect("operands from different fields")
            }
        }
        impl<'a> $tr<&'a FieldElement> for &'a FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &'a FieldElement) -> FieldElement {
                self.$try(rhs).expect("operands from different fields")
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        let v = self.field.neg(self.value);
        self.with(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_power_detection() {
        assert_eq!(prime_power(2), Some((2, 1)));
        assert_eq!(prime_power(64), Some((2, 6)));
        assert_eq!(prime_power(49), Some((7, 2)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
        assert_eq!(prime_power(65521), Some((65521, 1)));
    }

    #[test]
    fn moduli_are_least() {
        assert_eq!(FieldSpec::new(4).unwrap().modulus(), &[1, 1, 1]);
        assert_eq!(FieldSpec::new(8).unwrap().modulus(), &[1, 1, 0, 1]);
        assert_eq!(FieldSpec::new(16).unwrap().modulus(), &[1, 1, 0, 0, 1]);
        assert_eq!(FieldSpec::new(9).unwrap().modulus(), &[1, 0, 1]);
        assert_eq!(FieldSpec::new(64).unwrap().modulus(), &[1, 1, 0, 0, 0, 0, 1]);
    }

    #[test]
    fn gf4_t_squared() {
        let f = FieldSpec::new(4).unwrap();
        let t = f.generator();
        assert_eq!(f.mul(t, t), f.add(t, 1));
        assert_eq!(f.format(f.mul(t, t)), "t+1");
    }

    #[test]
    fn rejects_bad_orders() {
        assert!(matches!(FieldSpec::new(6), Err(OrbitaError::Domain(_))));
        assert!(matches!(FieldSpec::new(1 << 17), Err(OrbitaError::Domain(_))));
    }

    #[test]
    fn inverse_of_zero_is_domain_error() {
        let f = FieldSpec::new(7).unwrap();
        let z = FieldElement::zero(&f);
        assert!(matches!(z.inv(), Err(OrbitaError::Domain(_))));
        assert_eq!(FieldElement::one(&f).inv().unwrap(), FieldElement::one(&f));
        assert_eq!(FieldElement::from_int(&f, 3).pow(6), FieldElement::one(&f));
    }

    #[test]
    fn mixed_fields_rejected() {
        let a = FieldElement::one(&FieldSpec::new(5).unwrap());
        let b = FieldElement::one(&FieldSpec::new(7).unwrap());
        assert!(matches!(a.try_add(&b), Err(OrbitaError::Usage(_))));
    }

    #[test]
    fn square_roots() {
        let f13 = FieldSpec::new(13).unwrap();
        let r = f13.square_root(f13.from_int(-1)).unwrap();
        assert!(r == 5 || r == 8);
        let f4 = FieldSpec::new(4).unwrap();
        let t = f4.generator();
        assert_eq!(f4.square_root(t), Some(f4.add(t, 1)));
        assert_eq!(f4.square_root(0), Some(0));
        let f7 = FieldSpec::new(7).unwrap();
        assert_eq!(f7.square_root(3), None);
    }

    #[test]
    fn quadratic_roots_examples() {
        let f4 = FieldSpec::new(4).unwrap();
        let t = f4.generator();
        assert_eq!(f4.quadratic_roots(1, 1, 1).unwrap(), vec![t, f4.add(t, 1)]);
        let f2 = FieldSpec::new(2).unwrap();
        assert!(f2.quadratic_roots(1, 1, 1).unwrap().is_empty());
        let f7 = FieldSpec::new(7).unwrap();
        assert_eq!(f7.quadratic_roots(1, 1, 1).unwrap(), vec![2, 4]);
        assert!(f7.quadratic_roots(0, 1, 1).is_err());
    }

    #[test]
    fn parse_and_format_round_trip() {
        for q in [4, 8, 9, 25, 27] {
            let f = FieldSpec::new(q).unwrap();
            for a in f.elements() {
                assert_eq!(f.parse(&f.format(a)).unwrap(), a);
            }
        }
        let f7 = FieldSpec::new(7).unwrap();
        assert_eq!(f7.parse("-1").unwrap(), 6);
        assert!(f7.parse("t").is_err());
    }

    #[test]
    fn embedding_is_a_homomorphism() {
        let small = FieldSpec::new(4).unwrap();
        let big = FieldSpec::new(16).unwrap();
        let emb = small.embedding_into(&big).unwrap();
        for a in small.elements() {
            for b in small.elements() {
                assert_eq!(emb[small.mul(a, b) as usize], big.mul(emb[a as usize], emb[b as usize]));
                assert_eq!(emb[small.add(a, b) as usize], big.add(emb[a as usize], emb[b as usize]));
            }
        }
        assert!(small.embedding_into(&FieldSpec::new(8).unwrap()).is_err());
    }
}
