//! Univariate polynomials over a finite field, low degree first.

use std::fmt;

use crate::field::Field;

#[derive(Clone)]
pub struct Poly {
    field: Field,
    coeffs: Vec<u32>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && *self.field == *other.field
    }
}

impl Eq for Poly {}

impl Poly {
    pub fn new(field: &Field, mut coeffs: Vec<u32>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly {
            field: field.clone(),
            coeffs,
        }
    }

    pub fn zero(field: &Field) -> Self {
        Poly::new(field, vec![])
    }

    pub fn one(field: &Field) -> Self {
        Poly::new(field, vec![1])
    }

    /// x^n.
    pub fn monomial(field: &Field, n: usize) -> Self {
        let mut c = vec![0; n + 1];
        c[n] = 1;
        Poly::new(field, c)
    }

    /// x - r.
    pub fn linear(field: &Field, r: u32) -> Self {
        Poly::new(field, vec![field.neg(r), 1])
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as None.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> u32 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.field.inv(self.leading()).expect("nonzero leading coefficient");
        Poly::new(
            &self.field,
            self.coeffs.iter().map(|&c| self.field.mul(c, inv)).collect(),
        )
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let f = &self.field;
        Poly::new(
            f,
            (0..n)
                .map(|i| {
                    f.add(
                        self.coeffs.get(i).copied().unwrap_or(0),
                        other.coeffs.get(i).copied().unwrap_or(0),
                    )
                })
                .collect(),
        )
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(self.field.neg(1)))
    }

    pub fn scale(&self, c: u32) -> Poly {
        Poly::new(
            &self.field,
            self.coeffs.iter().map(|&a| self.field.mul(a, c)).collect(),
        )
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(&self.field);
        }
        let f = &self.field;
        let mut out = vec![0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Poly::new(f, out)
    }

    /// Quotient and remainder. Panics on division by the zero polynomial.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let f = &self.field;
        let dd = d.degree().expect("division by zero polynomial");
        let inv = f.inv(d.leading()).expect("nonzero leading coefficient");
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Poly::zero(f), self.clone());
        }
        let mut q = vec![0; r.len() - dd];
        for i in (dd..r.len()).rev() {
            let c = f.mul(r[i], inv);
            if c == 0 {
                continue;
            }
            q[i - dd] = c;
            for (j, &dj) in d.coeffs.iter().enumerate() {
                r[i - dd + j] = f.sub(r[i - dd + j], f.mul(c, dj));
            }
        }
        (Poly::new(f, q), Poly::new(f, r))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.div_rem(d).1
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Monic least common multiple.
    pub fn lcm(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(&self.field);
        }
        let g = self.gcd(other);
        self.mul(other).div_rem(&g).0.monic()
    }

    pub fn derivative(&self) -> Poly {
        let f = &self.field;
        Poly::new(
            f,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| f.mul(f.from_int(i as i64), c))
                .collect(),
        )
    }

    pub fn eval(&self, x: u32) -> u32 {
        let f = &self.field;
        self.coeffs.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
    }

    /// Squarefree test over a perfect field. When the derivative vanishes the
    /// polynomial is a p-th power, hence not squarefree unless constant.
    pub fn is_squarefree(&self) -> bool {
        match self.degree() {
            None => false,
            Some(0) => true,
            Some(_) => {
                let d = self.derivative();
                if d.is_zero() {
                    return false;
                }
                self.gcd(&d).degree() == Some(0)
            }
        }
    }

    /// True when the polynomial is `c * x^k`.
    pub fn is_monomial(&self) -> bool {
        !self.is_zero() && self.coeffs[..self.coeffs.len() - 1].iter().all(|&c| c == 0)
    }

    /// For a monic polynomial of the form (x - r)^k, returns r.
    pub fn single_root(&self) -> Option<u32> {
        let k = self.degree()?;
        if k == 0 {
            return None;
        }
        let f = &self.field;
        // The x^(k-1) coefficient is -k r; recover r by brute force to stay
        // safe when k is divisible by p.
        f.elements().find(|&r| {
            let mut g = Poly::one(f);
            for _ in 0..k {
                g = g.mul(&Poly::linear(f, r));
            }
            g == self.monic()
        })
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(out, "0");
        }
        let fs = &self.field;
        let mut parts = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "x".into(),
                _ => format!("x^{i}"),
            };
            let cs = fs.format(c);
            let cs = if cs.contains('+') { format!("({cs})") } else { cs };
            parts.push(match (c, i) {
                (_, 0) => cs,
                (1, _) => mono,
                _ => format!("{cs}*{mono}"),
            });
        }
        write!(out, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;

    #[test]
    fn division_identity() {
        let f = FieldSpec::new(7).unwrap();
        let a = Poly::new(&f, vec![3, 0, 5, 1, 2]);
        let d = Poly::new(&f, vec![1, 2, 1]);
        let (q, r) = a.div_rem(&d);
        assert_eq!(q.mul(&d).add(&r), a);
        assert!(r.degree() < d.degree());
    }

    #[test]
    fn squarefree_in_char_two() {
        let f = FieldSpec::new(2).unwrap();
        // x^2 + 1 = (x + 1)^2 has zero derivative.
        assert!(!Poly::new(&f, vec![1, 0, 1]).is_squarefree());
        assert!(Poly::new(&f, vec![0, 1, 1]).is_squarefree());
        assert!(!Poly::monomial(&f, 2).is_squarefree());
    }

    #[test]
    fn gcd_and_lcm() {
        let f = FieldSpec::new(5).unwrap();
        let a = Poly::linear(&f, 1).mul(&Poly::linear(&f, 2));
        let b = Poly::linear(&f, 2).mul(&Poly::linear(&f, 3));
        assert_eq!(a.gcd(&b), Poly::linear(&f, 2));
        assert_eq!(a.lcm(&b).degree(), Some(3));
    }

    #[test]
    fn single_root_detection() {
        let f = FieldSpec::new(2).unwrap();
        let p = Poly::linear(&f, 1).mul(&Poly::linear(&f, 1));
        assert_eq!(p.single_root(), Some(1));
        assert_eq!(Poly::new(&f, vec![0, 1, 1]).single_root(), None);
    }
}
