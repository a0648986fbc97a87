//! Quadratic forms stored by their upper-triangular coefficient matrix.
//!
//! `Q(v) = sum_{i <= j} U[i][j] v_i v_j`. The polar form has Gram matrix
//! `U + U^T`; in characteristic 2 the form carries strictly more information
//! than its polar form, so U is the primary data.

use num_bigint::BigUint;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{OrbitaError, Result};
use crate::field::{Field, FieldSpec};
use crate::matrix::Matrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticForm {
    upper: Matrix,
}

/// Witt type of a nondegenerate quadric.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuadricType {
    Plus,
    Minus,
    Parabolic,
}

impl QuadricType {
    pub fn as_str(self) -> &'static str {
        match self {
            QuadricType::Plus => "plus",
            QuadricType::Minus => "minus",
            QuadricType::Parabolic => "parabolic",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RadicalReport {
    /// Basis of the kernel of the polar Gram matrix.
    pub basis: Vec<Vec<u32>>,
    pub nondegenerate: bool,
    /// Basis of the singular vectors inside the radical (a subspace, since
    /// Q restricted to the radical is additive).
    pub singular_in_radical: Vec<Vec<u32>>,
}

impl QuadraticForm {
    /// Build from an upper-triangular coefficient matrix.
    pub fn from_upper(upper: Matrix) -> Result<Self> {
        if !upper.is_square() {
            return Err(OrbitaError::Usage("coefficient matrix must be square".into()));
        }
        for i in 0..upper.rows() {
            for j in 0..i {
                if upper.get(i, j) != 0 {
                    return Err(OrbitaError::Usage(
                        "coefficient matrix must be upper triangular".into(),
                    ));
                }
            }
        }
        Ok(QuadraticForm { upper })
    }

    /// Build from any square matrix A, reading Q(v) = v^T A v.
    pub fn from_matrix(a: &Matrix) -> Result<Self> {
        if !a.is_square() {
            return Err(OrbitaError::Usage("coefficient matrix must be square".into()));
        }
        let f = a.field();
        let n = a.rows();
        let mut u = Matrix::zeros(f, n, n);
        for i in 0..n {
            u.set(i, i, a.get(i, i));
            for j in i + 1..n {
                u.set(i, j, f.add(a.get(i, j), a.get(j, i)));
            }
        }
        Ok(QuadraticForm { upper: u })
    }

    pub fn zero(field: &Field, dim: usize) -> Self {
        QuadraticForm {
            upper: Matrix::zeros(field, dim, dim),
        }
    }

    pub fn field(&self) -> &Field {
        self.upper.field()
    }

    pub fn dim(&self) -> usize {
        self.upper.rows()
    }

    pub fn upper(&self) -> &Matrix {
        &self.upper
    }

    fn check_len(&self, v: &[u32]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(OrbitaError::Usage(format!(
                "vector of length {} for a form of dimension {}",
                v.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    pub fn evaluate(&self, v: &[u32]) -> Result<u32> {
        self.check_len(v)?;
        Ok(self.eval_unchecked(v))
    }

    #[inline]
    pub fn eval_unchecked(&self, v: &[u32]) -> u32 {
        let f = self.field();
        let n = self.dim();
        let mut acc = 0;
        for i in 0..n {
            if v[i] == 0 {
                continue;
            }
            let mut row = 0;
            for j in i..n {
                let u = self.upper.get(i, j);
                if u != 0 && v[j] != 0 {
                    row = f.add(row, f.mul(u, v[j]));
                }
            }
            acc = f.add(acc, f.mul(v[i], row));
        }
        acc
    }

    pub fn polar(&self, u: &[u32], v: &[u32]) -> Result<u32> {
        self.check_len(u)?;
        self.check_len(v)?;
        let g = self.polar_gram();
        let f = self.field();
        let gv = g.apply(v);
        Ok(u.iter().zip(&gv).fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b))))
    }

    /// Gram matrix `U + U^T` of the polar form.
    pub fn polar_gram(&self) -> Matrix {
        self.upper.add(&self.upper.transpose())
    }

    pub fn radical(&self) -> RadicalReport {
        let f = self.field();
        let basis = self.polar_gram().kernel();
        let nondegenerate = basis.is_empty();
        let singular_in_radical = if basis.is_empty() {
            vec![]
        } else if f.p() == 2 {
            // Q(sum l_i r_i) = (sum l_i sqrt(Q(r_i)))^2 on the radical.
            let roots: Vec<u32> = basis
                .iter()
                .map(|r| f.square_root(self.eval_unchecked(r)).unwrap())
                .collect();
            let functional = Matrix::from_raw(f, 1, roots.len(), roots).unwrap();
            functional
                .kernel()
                .iter()
                .map(|l| combine(f, &basis, l))
                .collect()
        } else {
            // In odd characteristic Q(r) = B(r,r)/2 = 0 on the radical.
            basis.clone()
        };
        RadicalReport {
            basis,
            nondegenerate,
            singular_in_radical,
        }
    }

    /// `Q(g v)` as a form in v.
    pub fn pullback(&self, g: &Matrix) -> QuadraticForm {
        let a = g.transpose().mul(&self.upper).mul(g);
        QuadraticForm::from_matrix(&a).unwrap()
    }

    pub fn is_invariant_under(&self, g: &Matrix) -> bool {
        self.pullback(g) == *self
    }

    pub fn scale(&self, c: u32) -> QuadraticForm {
        QuadraticForm {
            upper: self.upper.scale(c),
        }
    }

    /// Count projective points with Q = 0 by direct enumeration.
    pub fn count_singular_points(&self, budget: u64) -> Result<u64> {
        let q = self.field().q() as u64;
        let n = self.dim();
        q.checked_pow(n as u32)
            .filter(|&t| t <= budget)
            .ok_or_else(|| {
                OrbitaError::Budget(format!(
                    "{q}^{n} vectors exceed the budget of {budget}; use the packed orbit scanner"
                ))
            })?;
        let mut count = 0;
        let mut v = vec![0u32; n];
        for lead in 0..n {
            v.iter_mut().for_each(|x| *x = 0);
            v[lead] = 1;
            loop {
                if self.eval_unchecked(&v) == 0 {
                    count += 1;
                }
                if !increment(&mut v[lead + 1..], q as u32) {
                    break;
                }
            }
        }
        Ok(count)
    }
}

fn combine(f: &FieldSpec, basis: &[Vec<u32>], coeffs: &[u32]) -> Vec<u32> {
    let n = basis[0].len();
    let mut out = vec![0; n];
    for (b, &c) in basis.iter().zip(coeffs) {
        for (o, &x) in out.iter_mut().zip(b) {
            *o = f.add(*o, f.mul(c, x));
        }
    }
    out
}

/// Odometer increment with the last coordinate fastest; false on wrap-around.
pub fn increment(v: &mut [u32], q: u32) -> bool {
    for x in v.iter_mut().rev() {
        *x += 1;
        if *x < q {
            return true;
        }
        *x = 0;
    }
    false
}

/// Number of singular points of a nondegenerate quadric in PG(dim-1, q).
pub fn theoretical_quadric_count(dim: usize, kind: QuadricType, q: u32) -> Result<BigUint> {
    let qb = BigUint::from(q);
    let one = BigUint::one();
    let pow = |e: usize| qb.pow(e as u32);
    match kind {
        QuadricType::Parabolic => {
            if dim % 2 == 0 {
                return Err(OrbitaError::Usage("parabolic quadrics live in odd dimension".into()));
            }
            let m = dim / 2;
            Ok((pow(2 * m) - &one) / (&qb - &one))
        }
        QuadricType::Plus | QuadricType::Minus => {
            if dim % 2 == 1 || dim == 0 {
                return Err(OrbitaError::Usage(
                    "plus and minus types need a positive even dimension".into(),
                ));
            }
            let m = dim / 2;
            let (a, b) = if kind == QuadricType::Plus {
                (pow(m - 1) + &one, pow(m) - &one)
            } else {
                (pow(m - 1) - &one, pow(m) + &one)
            };
            Ok(a * b / (&qb - &one))
        }
    }
}

/// Infer the quadric type by matching a measured count against the formulas.
pub fn infer_quadric_type(dim: usize, q: u32, count: &BigUint) -> Result<QuadricType> {
    let candidates: &[QuadricType] = if dim % 2 == 1 {
        &[QuadricType::Parabolic]
    } else {
        &[QuadricType::Plus, QuadricType::Minus]
    };
    candidates
        .iter()
        .copied()
        .find(|&t| theoretical_quadric_count(dim, t, q).map(|c| &c == count).unwrap_or(false))
        .ok_or_else(|| {
            OrbitaError::Consistency(format!(
                "{count} singular points match no nondegenerate quadric in dimension {dim} over GF({q})"
            ))
        })
}

fn pair_index(n: usize, a: usize, b: usize) -> usize {
    // position of (a, b), a <= b, in row-major order of the upper triangle
    a * n - a * (a + 1) / 2 + b
}

/// All quadratic forms invariant under the given matrices (acting on column
/// vectors), as a reduced basis. A one-dimensional answer is normalized so its
/// first nonzero coefficient is 1.
pub fn invariant_quadratic_space(field: &Field, dim: usize, gens: &[Matrix]) -> Result<Vec<QuadraticForm>> {
    for g in gens {
        if g.rows() != dim || g.cols() != dim {
            return Err(OrbitaError::Usage("generator of the wrong size".into()));
        }
    }
    let f = field;
    let nunk = dim * (dim + 1) / 2;
    let mut rows: Vec<Vec<u32>> = Vec::new();
    for g in gens {
        // eq[ij][ab] = coefficient of U_ab in the v_i v_j coefficient of Q(g v) - Q(v)
        let mut block = vec![vec![0u32; nunk]; nunk];
        for a in 0..dim {
            for b in a..dim {
                let ab = pair_index(dim, a, b);
                for i in 0..dim {
                    let gai = g.get(a, i);
                    let gbi = g.get(b, i);
                    for j in i..dim {
                        let c = if i == j {
                            f.mul(gai, gbi)
                        } else {
                            f.add(f.mul(gai, g.get(b, j)), f.mul(g.get(a, j), gbi))
                        };
                        if c != 0 {
                            let ij = pair_index(dim, i, j);
                            block[ij][ab] = f.add(block[ij][ab], c);
                        }
                    }
                }
            }
        }
        for (ij, row) in block.iter_mut().enumerate() {
            row[ij] = f.sub(row[ij], 1);
        }
        rows.extend(block);
        // keep the system small by reducing as we go
        let m = Matrix::from_raw(f, rows.len(), nunk, rows.concat())?;
        let (r, piv) = m.rref();
        rows = (0..piv.len()).map(|i| r.row(i).to_vec()).collect();
    }
    let kernel = if rows.is_empty() {
        (0..nunk)
            .map(|i| {
                let mut v = vec![0; nunk];
                v[i] = 1;
                v
            })
            .collect()
    } else {
        Matrix::from_raw(f, rows.len(), nunk, rows.concat())?.kernel()
    };
    if kernel.is_empty() {
        return Ok(vec![]);
    }
    let (basis, piv) = Matrix::from_raw(f, kernel.len(), nunk, kernel.concat())?.rref();
    let mut forms = Vec::new();
    for r in 0..piv.len() {
        let mut u = Matrix::zeros(f, dim, dim);
        for a in 0..dim {
            for b in a..dim {
                u.set(a, b, basis.get(r, pair_index(dim, a, b)));
            }
        }
        forms.push(QuadraticForm { upper: u });
    }
    verify_on_sample(&forms, gens, 64)?;
    Ok(forms)
}

/// Check `Q(g v) = Q(v)` on `samples` seeded random vectors per generator.
pub fn verify_on_sample(forms: &[QuadraticForm], gens: &[Matrix], samples: usize) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for form in forms {
        let q = form.field().q();
        for g in gens {
            for _ in 0..samples {
                let v: Vec<u32> = (0..form.dim()).map(|_| rng.gen_range(0..q)).collect();
                if form.eval_unchecked(&g.apply(&v)) != form.eval_unchecked(&v) {
                    return Err(OrbitaError::Consistency(
                        "solved form fails the invariance check on a sample vector".into(),
                    ));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hyperbolic(f: &Field) -> QuadraticForm {
        QuadraticForm::from_upper(Matrix::from_ints(f, &[vec![0, 1], vec![0, 0]]).unwrap()).unwrap()
    }

    #[test]
    fn hyperbolic_plane() {
        let f = FieldSpec::new(3).unwrap();
        let h = hyperbolic(&f);
        assert_eq!(h.evaluate(&[0, 0]).unwrap(), 0);
        assert!(h.radical().nondegenerate);
        assert_eq!(h.count_singular_points(1 << 20).unwrap(), 2);
        assert!(h.evaluate(&[1]).is_err());
    }

    #[test]
    fn zero_form_radical() {
        let f = FieldSpec::new(2).unwrap();
        let z = QuadraticForm::zero(&f, 2);
        let r = z.radical();
        assert_eq!(r.basis.len(), 2);
        assert_eq!(r.singular_in_radical.len(), 2);
    }

    #[test]
    fn char_two_radical_singular_part() {
        let f = FieldSpec::new(2).unwrap();
        // x0 x1 + x2^2: radical <e2>, Q(e2) = 1, no singular radical vectors
        let mut u = Matrix::zeros(&f, 3, 3);
        u.set(0, 1, 1);
        u.set(2, 2, 1);
        let r = QuadraticForm::from_upper(u).unwrap().radical();
        assert_eq!(r.basis.len(), 1);
        assert!(r.singular_in_radical.is_empty());
    }

    #[test]
    fn quadric_formulas() {
        assert_eq!(
            theoretical_quadric_count(16, QuadricType::Plus, 2).unwrap(),
            BigUint::from(32895u32)
        );
        assert_eq!(
            theoretical_quadric_count(5, QuadricType::Parabolic, 5).unwrap(),
            BigUint::from(156u32)
        );
        assert_eq!(
            theoretical_quadric_count(2, QuadricType::Minus, 7).unwrap(),
            BigUint::from(0u32)
        );
        assert!(theoretical_quadric_count(5, QuadricType::Plus, 2).is_err());
    }

    #[test]
    fn trivial_group_invariants() {
        let f = FieldSpec::new(3).unwrap();
        let forms = invariant_quadratic_space(&f, 3, &[Matrix::identity(&f, 3)]).unwrap();
        assert_eq!(forms.len(), 6);
        let forms = invariant_quadratic_space(&f, 4, &[]).unwrap();
        assert_eq!(forms.len(), 10);
    }

    #[test]
    fn orthogonal_group_of_plane() {
        // diag(t, t^-1) preserves x0 x1 and nothing else up to scalars.
        let f = FieldSpec::new(5).unwrap();
        let g = Matrix::diagonal(&f, &[2, 3]);
        let forms = invariant_quadratic_space(&f, 2, &[g]).unwrap();
        assert_eq!(forms, vec![hyperbolic(&f)]);
    }
}
