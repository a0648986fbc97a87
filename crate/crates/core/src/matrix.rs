//! Dense matrices over a finite field and projective points.

use std::fmt;

use crate::error::{OrbitaError, Result};
use crate::field::{Field, FieldSpec};
use crate::poly::Poly;

#[derive(Clone)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl PartialEq for Matrix {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.data == other.data
            && *self.field == *other.field
    }
}

impl Eq for Matrix {}

/// Solutions of `A X = B`: one particular solution and a basis of the kernel of A.
#[derive(Clone, Debug)]
pub struct LinearSolution {
    pub particular: Matrix,
    pub kernel: Vec<Vec<u32>>,
}

/// Roots of a characteristic polynomial inside an extension field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Spectrum {
    /// Eigenvalues sorted by encoding in the extension field, with multiplicity.
    Split { field_order: u32, values: Vec<u32> },
    NotSplit,
}

impl Matrix {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Self {
        Matrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_raw(field: &Field, rows: usize, cols: usize, data: Vec<u32>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(OrbitaError::Usage(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(&bad) = data.iter().find(|&&x| x >= field.q()) {
            return Err(OrbitaError::Usage(format!("{bad} is not an element of GF({})", field.q())));
        }
        Ok(Matrix {
            field: field.clone(),
            rows,
            cols,
            data,
        })
    }

    /// Build from integer rows, reducing each entry into the prime field.
    pub fn from_ints(field: &Field, rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(OrbitaError::Usage("ragged rows".into()));
        }
        let data = rows.iter().flatten().map(|&x| field.from_int(x)).collect();
        Ok(Matrix {
            field: field.clone(),
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn diagonal(field: &Field, diag: &[u32]) -> Self {
        let n = diag.len();
        let mut m = Matrix::zeros(field, n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = d;
        }
        m
    }

    /// The matrix unit with a single 1 in position (i, j).
    pub fn unit(field: &Field, n: usize, i: usize, j: usize) -> Self {
        let mut m = Matrix::zeros(field, n, n);
        m.data[i * n + j] = 1;
        m
    }

    pub fn column(field: &Field, v: &[u32]) -> Self {
        Matrix {
            field: field.clone(),
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<u32> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    fn check_field(&self, other: &Matrix) -> Result<()> {
        if *self.field != *other.field {
            return Err(OrbitaError::Usage("matrices over different fields".into()));
        }
        Ok(())
    }

    pub fn try_mul(&self, other: &Matrix) -> Result<Matrix> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(OrbitaError::Usage(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d = f.add(*d, f.mul(a, b));
                }
            }
        }
        Ok(out)
    }

    /// Matrix product; panics on shape or field mismatch.
    pub fn mul(&self, other: &Matrix) -> Matrix {
        self.try_mul(other).expect("incompatible matrices")
    }

    pub fn try_add(&self, other: &Matrix) -> Result<Matrix> {
        self.check_field(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(OrbitaError::Usage("shape mismatch in addition".into()));
        }
        let f = &self.field;
        Ok(Matrix {
            field: f.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f.add(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        self.try_add(other).expect("incompatible matrices")
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.add(&other.scale(self.field.neg(1)))
    }

    pub fn scale(&self, c: u32) -> Matrix {
        let f = &self.field;
        Matrix {
            field: f.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| f.mul(a, c)).collect(),
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// `M v` for a column vector v.
    pub fn apply(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        let f = &self.field;
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
            })
            .collect()
    }

    pub fn pow(&self, mut e: u64) -> Matrix {
        let mut base = self.clone();
        let mut acc = Matrix::identity(&self.field, self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn trace(&self) -> u32 {
        (0..self.rows.min(self.cols)).fold(0, |acc, i| self.field.add(acc, self.get(i, i)))
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let f = &self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| m.get(i, c) != 0) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = f.inv(m.get(r, c)).unwrap();
            for j in c..m.cols {
                let v = f.mul(m.get(r, j), inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let factor = m.get(i, c);
                if factor == 0 {
                    continue;
                }
                for j in c..m.cols {
                    let v = f.sub(m.get(i, j), f.mul(factor, m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{x : M x = 0}`.
    pub fn kernel(&self) -> Vec<Vec<u32>> {
        let f = &self.field;
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![0; self.cols];
                v[fc] = 1;
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = f.neg(r.get(row, fc));
                }
                v
            })
            .collect()
    }

    /// Solve `A X = B`. Returns None when the system is inconsistent.
    pub fn solve_linear(&self, b: &Matrix) -> Result<Option<LinearSolution>> {
        self.check_field(b)?;
        if b.rows != self.rows {
            return Err(OrbitaError::Usage(format!(
                "right-hand side has {} rows, expected {}",
                b.rows, self.rows
            )));
        }
        let f = &self.field;
        let n = self.cols;
        let mut aug = Matrix::zeros(f, self.rows, n + b.cols);
        for i in 0..self.rows {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            for j in 0..b.cols {
                aug.set(i, n + j, b.get(i, j));
            }
        }
        let (r, pivots) = aug.rref();
        if pivots.iter().any(|&p| p >= n) {
            return Ok(None);
        }
        let mut particular = Matrix::zeros(f, n, b.cols);
        for (row, &pc) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                particular.set(pc, j, r.get(row, n + j));
            }
        }
        Ok(Some(LinearSolution {
            particular,
            kernel: self.kernel(),
        }))
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let sol = self.solve_linear(&Matrix::identity(&self.field, self.rows)).ok()??;
        sol.kernel.is_empty().then_some(sol.particular)
    }

    pub fn determinant(&self) -> Result<u32> {
        if !self.is_square() {
            return Err(OrbitaError::Usage("determinant of a non-square matrix".into()));
        }
        let f = &self.field;
        let n = self.rows;
        let mut m = self.clone();
        let mut det = 1;
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| m.get(i, c) != 0) else {
                return Ok(0);
            };
            if p != c {
                for j in 0..n {
                    m.data.swap(p * n + j, c * n + j);
                }
                det = f.neg(det);
            }
            let pv = m.get(c, c);
            det = f.mul(det, pv);
            let inv = f.inv(pv).unwrap();
            for i in c + 1..n {
                let factor = f.mul(m.get(i, c), inv);
                if factor == 0 {
                    continue;
                }
                for j in c..n {
                    let v = f.sub(m.get(i, j), f.mul(factor, m.get(c, j)));
                    m.set(i, j, v);
                }
            }
        }
        Ok(det)
    }

    fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(OrbitaError::Usage(format!(
                "{}x{} matrix is not square",
                self.rows, self.cols
            )))
        }
    }

    /// Characteristic polynomial det(xI - M), via reduction to Hessenberg form.
    pub fn characteristic_polynomial(&self) -> Result<Poly> {
        self.require_square()?;
        let f = &self.field;
        let n = self.rows;
        let mut h = self.clone();
        for c in 0..n.saturating_sub(2) {
            let Some(p) = (c + 1..n).find(|&i| h.get(i, c) != 0) else {
                continue;
            };
            if p != c + 1 {
                for j in 0..n {
                    h.data.swap(p * n + j, (c + 1) * n + j);
                }
                for i in 0..n {
                    h.data.swap(i * n + p, i * n + c + 1);
                }
            }
            let inv = f.inv(h.get(c + 1, c)).unwrap();
            for i in c + 2..n {
                let u = f.mul(h.get(i, c), inv);
                if u == 0 {
                    continue;
                }
                // row_i -= u row_{c+1}; then col_{c+1} += u col_i keeps similarity.
                for j in 0..n {
                    let v = f.sub(h.get(i, j), f.mul(u, h.get(c + 1, j)));
                    h.set(i, j, v);
                }
                for r in 0..n {
                    let v = f.add(h.get(r, c + 1), f.mul(u, h.get(r, i)));
                    h.set(r, c + 1, v);
                }
            }
        }
        let mut ps = vec![Poly::one(f)];
        for m in 0..n {
            let mut pm = Poly::new(f, vec![f.neg(h.get(m, m)), 1]).mul(&ps[m]);
            let mut prod = 1;
            for i in (0..m).rev() {
                prod = f.mul(prod, h.get(i + 1, i));
                if prod == 0 {
                    break;
                }
                let coef = f.mul(h.get(i, m), prod);
                pm = pm.sub(&ps[i].scale(coef));
            }
            ps.push(pm);
        }
        Ok(ps.pop().unwrap())
    }

    /// Minimal polynomial by Krylov spinning on each basis vector.
    pub fn minimal_polynomial(&self) -> Result<Poly> {
        self.require_square()?;
        let f = &self.field;
        let n = self.rows;
        let mut acc = Poly::one(f);
        for j in 0..n {
            let mut e = vec![0; n];
            e[j] = 1;
            let local = self.local_minimal_polynomial(&e);
            acc = acc.lcm(&local);
        }
        Ok(acc)
    }

    // Monic polynomial of least degree annihilating v under M.
    fn local_minimal_polynomial(&self, v: &[u32]) -> Poly {
        let f = &self.field;
        let n = self.rows;
        let mut basis: Vec<(usize, Vec<u32>, Vec<u32>)> = Vec::new();
        let mut w = v.to_vec();
        for k in 0..=n {
            let mut red = w.clone();
            let mut comb = vec![0; k + 1];
            comb[k] = 1;
            for (pivot, r, c) in &basis {
                let factor = red[*pivot];
                if factor == 0 {
                    continue;
                }
                for (x, &y) in red.iter_mut().zip(r) {
                    *x = f.sub(*x, f.mul(factor, y));
                }
                for (i, &y) in c.iter().enumerate() {
                    comb[i] = f.sub(comb[i], f.mul(factor, y));
                }
            }
            match red.iter().position(|&x| x != 0) {
                None => return Poly::new(f, comb),
                Some(p) => {
                    let inv = f.inv(red[p]).unwrap();
                    red.iter_mut().for_each(|x| *x = f.mul(*x, inv));
                    comb.iter_mut().for_each(|x| *x = f.mul(*x, inv));
                    basis.push((p, red, comb));
                }
            }
            w = self.apply(&w);
        }
        unreachable!("Krylov sequence must become dependent within n+1 steps")
    }

    pub fn is_nilpotent(&self) -> Result<bool> {
        Ok(self.minimal_polynomial()?.is_monomial())
    }

    pub fn is_semisimple(&self) -> Result<bool> {
        Ok(self.minimal_polynomial()?.is_squarefree())
    }

    /// Eigenvalues with multiplicity inside GF(q^extension_degree).
    pub fn eigenvalue_multiset(&self, extension_degree: u32) -> Result<Spectrum> {
        let cp = self.characteristic_polynomial()?;
        let f = &self.field;
        let big_q = (f.q() as u64)
            .checked_pow(extension_degree)
            .filter(|&x| x <= crate::field::MAX_ORDER as u64)
            .ok_or_else(|| OrbitaError::Domain("extension field too large".into()))?;
        let big = if extension_degree == 1 {
            f.clone()
        } else {
            FieldSpec::new(big_q as u32)?
        };
        let emb = f.embedding_into(&big)?;
        let mut g = Poly::new(&big, cp.coeffs().iter().map(|&c| emb[c as usize]).collect());
        let mut values = Vec::new();
        for r in big.elements() {
            while g.degree().unwrap_or(0) > 0 && g.eval(r) == 0 {
                g = g.div_rem(&Poly::linear(&big, r)).0;
                values.push(r);
            }
        }
        if values.len() == self.rows {
            Ok(Spectrum::Split {
                field_order: big.q(),
                values,
            })
        } else {
            Ok(Spectrum::NotSplit)
        }
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(out, "Matrix {}x{} over GF({})", self.rows, self.cols, self.field.q())?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|&x| self.field.format(x)).collect();
            writeln!(out, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Injective key of a normalized vector.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PointKey {
    /// Coordinates read as a base-q integer, first coordinate most significant.
    Packed(u64),
    /// Two big-endian bytes per coordinate, used when the packed form overflows.
    Bytes(Vec<u8>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectivePoint {
    pub coords: Vec<u32>,
    pub key: PointKey,
}

/// Whether vectors of this shape fit the packed 64-bit key.
pub fn packable(q: u32, dim: usize) -> bool {
    (q as u64).checked_pow(dim as u32).is_some()
}

pub fn point_key(q: u32, coords: &[u32]) -> PointKey {
    if packable(q, coords.len()) {
        PointKey::Packed(coords.iter().fold(0u64, |acc, &c| acc * q as u64 + c as u64))
    } else {
        PointKey::Bytes(coords.iter().flat_map(|&c| (c as u16).to_be_bytes()).collect())
    }
}

/// Scale `v` so its first nonzero coordinate is 1.
pub fn canonical_point(field: &FieldSpec, v: &[u32]) -> Result<ProjectivePoint> {
    let lead = v
        .iter()
        .copied()
        .find(|&x| x != 0)
        .ok_or_else(|| OrbitaError::Usage("the zero vector has no projective point".into()))?;
    let inv = field.inv(lead).unwrap();
    let coords: Vec<u32> = v.iter().map(|&x| field.mul(x, inv)).collect();
    let key = point_key(field.q(), &coords);
    Ok(ProjectivePoint { coords, key })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_identity_and_zero() {
        let f = FieldSpec::new(5).unwrap();
        let b = Matrix::column(&f, &[1, 2, 3]);
        let s = Matrix::identity(&f, 3).solve_linear(&b).unwrap().unwrap();
        assert_eq!(s.particular, b);
        assert!(s.kernel.is_empty());
        let z = Matrix::zeros(&f, 3, 3);
        let s = z.solve_linear(&Matrix::zeros(&f, 3, 1)).unwrap().unwrap();
        assert_eq!(s.kernel.len(), 3);
        assert!(z.solve_linear(&Matrix::zeros(&f, 2, 1)).is_err());
    }

    #[test]
    fn gf2_underdetermined() {
        let f = FieldSpec::new(2).unwrap();
        let a = Matrix::from_ints(&f, &[vec![1, 1], vec![0, 0]]).unwrap();
        let s = a.solve_linear(&Matrix::column(&f, &[1, 0])).unwrap().unwrap();
        let p = s.particular.col(0);
        let k = &s.kernel[0];
        let mut sols = vec![p.clone(), vec![p[0] ^ k[0], p[1] ^ k[1]]];
        sols.sort();
        assert_eq!(sols, vec![vec![0, 1], vec![1, 0]]);
        assert!(a.solve_linear(&Matrix::column(&f, &[0, 1])).unwrap().is_none());
    }

    #[test]
    fn canonical_examples() {
        let f = FieldSpec::new(7).unwrap();
        assert_eq!(canonical_point(&f, &[0, 2, 4]).unwrap().coords, vec![0, 1, 2]);
        assert!(canonical_point(&f, &[0, 0]).is_err());
    }

    #[test]
    fn jordan_block() {
        let f = FieldSpec::new(3).unwrap();
        let j = Matrix::from_ints(&f, &[vec![0, 1], vec![0, 0]]).unwrap();
        assert_eq!(j.minimal_polynomial().unwrap(), Poly::monomial(&f, 2));
        assert!(j.is_nilpotent().unwrap());
        assert!(!j.is_semisimple().unwrap());
        let i = Matrix::identity(&f, 3);
        assert_eq!(i.minimal_polynomial().unwrap(), Poly::linear(&f, 1));
        assert!(i.is_semisimple().unwrap());
    }

    #[test]
    fn gf4_diag_is_semisimple() {
        let f = FieldSpec::new(4).unwrap();
        let a = f.generator();
        let m = Matrix::diagonal(&f, &[0, 1, a, f.add(1, a)]);
        let mp = m.minimal_polynomial().unwrap();
        assert_eq!(mp.degree(), Some(4));
        assert!(m.is_semisimple().unwrap());
    }

    #[test]
    fn charpoly_of_companion() {
        let f = FieldSpec::new(5).unwrap();
        // companion of x^3 + 2x + 3
        let c = Matrix::from_ints(&f, &[vec![0, 0, -3], vec![1, 0, -2], vec![0, 1, 0]]).unwrap();
        assert_eq!(c.characteristic_polynomial().unwrap(), Poly::new(&f, vec![3, 2, 0, 1]));
        assert_eq!(c.minimal_polynomial().unwrap(), Poly::new(&f, vec![3, 2, 0, 1]));
    }

    #[test]
    fn determinant_and_inverse() {
        let f = FieldSpec::new(7).unwrap();
        let m = Matrix::from_ints(&f, &[vec![2, 1], vec![1, 1]]).unwrap();
        assert_eq!(m.determinant().unwrap(), 1);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(&f, 2));
        let s = Matrix::from_ints(&f, &[vec![1, 2], vec![2, 4]]).unwrap();
        assert!(s.inverse().is_none());
    }

    #[test]
    fn identity_spectrum() {
        let f = FieldSpec::new(3).unwrap();
        let s = Matrix::identity(&f, 4).eigenvalue_multiset(1).unwrap();
        assert_eq!(s, Spectrum::Split { field_order: 3, values: vec![1, 1, 1, 1] });
        let rot = Matrix::from_ints(&f, &[vec![0, -1], vec![1, 0]]).unwrap();
        assert_eq!(rot.eigenvalue_multiset(1).unwrap(), Spectrum::NotSplit);
        assert!(matches!(rot.eigenvalue_multiset(2).unwrap(), Spectrum::Split { .. }));
    }
}
