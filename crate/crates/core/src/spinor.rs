//! Clifford algebra of the 14-dimensional hyperbolic space on e1..e7, f1..f7
//! and its 64-dimensional half-spin representation on even monomials f_S.
//!
//! Generators are numbered 0..14: `g < 7` is e_{g+1}, `g >= 7` is f_{g-6}.
//! A monomial is a bitmask over generators, read in increasing bit order.
//! Index notation 1..14 (as in `s_{i,j}`) aliases 8..14 to f1..f7.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{OrbitaError, Result};
use crate::field::{Field, FieldSpec};
use crate::matrix::Matrix;

/// Which generators act by wedge and which by contraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convention {
    /// f_i acts by wedge, e_i by contraction.
    Standard,
    /// The roles of e_i and f_i are exchanged.
    Reversed,
}

fn partner(g: u8) -> u8 {
    if g < 7 {
        g + 7
    } else {
        g - 7
    }
}

/// Generator number for the 1..14 index notation.
pub fn generator_index(i: usize) -> Result<u8> {
    if (1..=14).contains(&i) {
        Ok((i - 1) as u8)
    } else {
        Err(OrbitaError::Usage(format!("generator index {i} outside 1..14")))
    }
}

fn generator_name(g: u8) -> String {
    if g < 7 {
        format!("e{}", g + 1)
    } else {
        format!("f{}", g - 6)
    }
}

/// Normal-ordered terms of `mask * g`, as (negated, mask).
fn mul_monomial_generator(mask: u16, g: u8) -> Vec<(bool, u16)> {
    if mask == 0 {
        return vec![(false, 1 << g)];
    }
    let h = 15 - mask.leading_zeros() as u8;
    if h < g {
        return vec![(false, mask | 1 << g)];
    }
    if h == g {
        return vec![];
    }
    let rest = mask & !(1 << h);
    // h g = -g h, plus 1 when h is the partner of g
    let mut out: Vec<(bool, u16)> = mul_monomial_generator(rest, g)
        .into_iter()
        .map(|(neg, m)| (!neg, m | 1 << h))
        .collect();
    if h == partner(g) {
        out.push((false, rest));
    }
    out
}

#[derive(Clone, PartialEq, Eq)]
pub struct CliffordElement {
    field: Field,
    terms: BTreeMap<u16, u32>,
}

impl CliffordElement {
    pub fn zero(field: &Field) -> Self {
        CliffordElement {
            field: field.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(field: &Field, c: u32) -> Self {
        let mut x = Self::zero(field);
        x.add_term(0, c);
        x
    }

    pub fn one(field: &Field) -> Self {
        Self::scalar(field, 1)
    }

    /// A single generator, 0..14.
    pub fn generator(field: &Field, g: u8) -> Self {
        let mut x = Self::zero(field);
        x.add_term(1 << g, 1);
        x
    }

    /// e_i for i in 1..7.
    pub fn e(field: &Field, i: usize) -> Result<Self> {
        check_small_index(i)?;
        Ok(Self::generator(field, (i - 1) as u8))
    }

    /// f_i for i in 1..7.
    pub fn f(field: &Field, i: usize) -> Result<Self> {
        check_small_index(i)?;
        Ok(Self::generator(field, (i + 6) as u8))
    }

    /// Product of generators in the given order, times c.
    pub fn word(field: &Field, c: u32, gens: &[u8]) -> Self {
        let mut x = Self::scalar(field, c);
        for &g in gens {
            x = x.mul(&Self::generator(field, g));
        }
        x
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn terms(&self) -> impl Iterator<Item = (u16, u32)> + '_ {
        self.terms.iter().map(|(&m, &c)| (m, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, mask: u16, c: u32) {
        if c == 0 {
            return;
        }
        let f = &self.field;
        let e = self.terms.entry(mask).or_insert(0);
        *e = f.add(*e, c);
        if *e == 0 {
            self.terms.remove(&mask);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&m, &c) in &other.terms {
            out.add_term(m, c);
        }
        out
    }

    pub fn scale(&self, c: u32) -> Self {
        let mut out = Self::zero(&self.field);
        for (&m, &x) in &self.terms {
            out.add_term(m, self.field.mul(c, x));
        }
        out
    }

    /// Clifford product.
    pub fn mul(&self, other: &Self) -> Self {
        let f = &self.field;
        let mut out = Self::zero(f);
        for (&m1, &c1) in &self.terms {
            for (&m2, &c2) in &other.terms {
                let mut cur: Vec<(u32, u16)> = vec![(f.mul(c1, c2), m1)];
                for g in (0..14u8).filter(|g| m2 >> g & 1 == 1) {
                    let mut next = Vec::new();
                    for (c, m) in cur {
                        for (neg, m) in mul_monomial_generator(m, g) {
                            next.push((if neg { f.neg(c) } else { c }, m));
                        }
                    }
                    cur = next;
                }
                for (c, m) in cur {
                    out.add_term(m, c);
                }
            }
        }
        out
    }

    /// True when every monomial has even degree.
    pub fn is_even(&self) -> bool {
        self.terms.keys().all(|m| m.count_ones() % 2 == 0)
    }

    /// True when only f-generators occur.
    pub fn is_f_only(&self) -> bool {
        self.terms.keys().all(|m| m & 0x7f == 0)
    }

    /// The same expression with every e_i and f_i exchanged.
    pub fn reversed(&self) -> Self {
        let f = &self.field;
        let mut out = Self::zero(f);
        for (&m, &c) in &self.terms {
            let gens: Vec<u8> = (0..14u8)
                .filter(|g| m >> g & 1 == 1)
                .map(partner)
                .collect();
            out = out.add(&Self::word(f, c, &gens));
        }
        out
    }
}

fn check_small_index(i: usize) -> Result<()> {
    if (1..=7).contains(&i) {
        Ok(())
    } else {
        Err(OrbitaError::Usage(format!("index {i} outside 1..7")))
    }
}

impl fmt::Display for CliffordElement {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(out, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(&m, &c)| {
                let mono: String = (0..14u8)
                    .filter(|g| m >> g & 1 == 1)
                    .map(generator_name)
                    .collect();
                format_term(&self.field, c, &mono)
            })
            .collect();
        write!(out, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for CliffordElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn format_term(field: &FieldSpec, c: u32, mono: &str) -> String {
    let cs = field.format(c);
    let cs = if cs.contains('+') { format!("({cs})") } else { cs };
    match (mono.is_empty(), c) {
        (true, _) => cs,
        (false, 1) => mono.to_string(),
        (false, _) => format!("{cs}*{mono}"),
    }
}

/// s_i(λ) = λ⁻¹ + (λ − λ⁻¹) e_i f_i.
pub fn torus_element(field: &Field, i: usize, lambda: u32) -> Result<CliffordElement> {
    check_small_index(i)?;
    let inv = field
        .inv(lambda)
        .ok_or_else(|| OrbitaError::Usage("torus parameter must be nonzero".into()))?;
    let g = (i - 1) as u8;
    Ok(CliffordElement::scalar(field, inv).add(&CliffordElement::word(
        field,
        field.sub(lambda, inv),
        &[g, g + 7],
    )))
}

/// s_{i,j}(λ) = 1 + λ w_i w_j for indices 1..14 with (w_i, w_j) = 0.
pub fn root_element(field: &Field, i: usize, j: usize, lambda: u32) -> Result<CliffordElement> {
    let (a, b) = (generator_index(i)?, generator_index(j)?);
    if a == partner(b) {
        return Err(OrbitaError::Usage(format!(
            "s_{{{i},{j}}}: the two basis vectors are not orthogonal"
        )));
    }
    Ok(CliffordElement::one(field).add(&CliffordElement::word(field, lambda, &[a, b])))
}

/// exp u = ∏ (1 + a w_i w_j) over the quadratic monomials of u in normal order.
pub fn exp_quadratic(u: &CliffordElement) -> Result<CliffordElement> {
    let f = u.field();
    let mut out = CliffordElement::one(f);
    for (m, c) in u.terms() {
        if m.count_ones() != 2 {
            return Err(OrbitaError::Usage(
                "exp takes a sum of quadratic monomials".into(),
            ));
        }
        let a = m.trailing_zeros() as u8;
        let b = 15 - m.leading_zeros() as u8;
        if a == partner(b) {
            return Err(OrbitaError::Usage(
                "exp: monomial pairs two non-orthogonal vectors".into(),
            ));
        }
        out = out.mul(&CliffordElement::one(f).add(&CliffordElement::word(f, c, &[a, b])));
    }
    Ok(out)
}

/// Element of the half-spin module: coefficients on f_S, S ⊆ {1..7} of even size.
#[derive(Clone, PartialEq, Eq)]
pub struct Spinor {
    field: Field,
    terms: BTreeMap<u8, u32>,
}

impl Spinor {
    pub fn zero(field: &Field) -> Self {
        Spinor {
            field: field.clone(),
            terms: BTreeMap::new(),
        }
    }

    /// Sum of f_S over the given subsets (1-based indices), each with coefficient 1.
    pub fn from_subsets(field: &Field, subsets: &[&[usize]]) -> Result<Self> {
        let mut x = Self::zero(field);
        for s in subsets {
            let mut mask = 0u8;
            for &i in *s {
                check_small_index(i)?;
                mask |= 1 << (i - 1);
            }
            x.add_term(mask, 1);
        }
        x.check_even()?;
        Ok(x)
    }

    pub fn basis(field: &Field, mask: u8) -> Result<Self> {
        let mut x = Self::zero(field);
        x.add_term(mask, 1);
        x.check_even()?;
        Ok(x)
    }

    /// All 64 basis spinors.
    pub fn basis_masks() -> impl Iterator<Item = u8> {
        (0u8..128).filter(|m| m.count_ones() % 2 == 0)
    }

    fn check_even(&self) -> Result<()> {
        if self.terms.keys().all(|m| m.count_ones() % 2 == 0) {
            Ok(())
        } else {
            Err(OrbitaError::Usage("spinors have even degree".into()))
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coefficient(&self, mask: u8) -> u32 {
        self.terms.get(&mask).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u8, u32)> + '_ {
        self.terms.iter().map(|(&m, &c)| (m, c))
    }

    fn add_term(&mut self, mask: u8, c: u32) {
        if c == 0 {
            return;
        }
        let f = &self.field;
        let e = self.terms.entry(mask).or_insert(0);
        *e = f.add(*e, c);
        if *e == 0 {
            self.terms.remove(&mask);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&m, &c) in &other.terms {
            out.add_term(m, c);
        }
        out
    }

    pub fn scale(&self, c: u32) -> Self {
        let mut out = Self::zero(&self.field);
        for (&m, &x) in &self.terms {
            out.add_term(m, self.field.mul(c, x));
        }
        out
    }

    /// The f-only Clifford element with the same coefficients.
    pub fn to_clifford(&self) -> CliffordElement {
        let mut x = CliffordElement::zero(&self.field);
        for (&m, &c) in &self.terms {
            x.add_term((m as u16) << 7, c);
        }
        x
    }

    /// Reads an f-only Clifford element as a spinor.
    pub fn from_clifford(x: &CliffordElement) -> Result<Self> {
        if !x.is_f_only() || !x.is_even() {
            return Err(OrbitaError::Usage(
                "only even polynomials in f1..f7 are spinors".into(),
            ));
        }
        let mut out = Self::zero(x.field());
        for (m, c) in x.terms() {
            out.add_term((m >> 7) as u8, c);
        }
        Ok(out)
    }
}

impl fmt::Display for Spinor {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(out, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(&m, &c)| {
                let mono: String = (0..7).filter(|i| m >> i & 1 == 1).map(|i| format!("f{}", i + 1)).collect();
                format_term(&self.field, c, &mono)
            })
            .collect();
        write!(out, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for Spinor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// One generator on a basis monomial of the exterior algebra over f1..f7.
fn generator_on_monomial(g: u8, s: u8, conv: Convention) -> Option<(bool, u8)> {
    let j = if g < 7 { g } else { g - 7 };
    let contraction = (g < 7) == (conv == Convention::Standard);
    let bit = 1u8 << j;
    let neg = (s & (bit - 1)).count_ones() % 2 == 1;
    match (contraction, s & bit != 0) {
        (true, true) => Some((neg, s & !bit)),
        (false, false) => Some((neg, s | bit)),
        _ => None,
    }
}

/// Clifford element acting on the full exterior algebra; odd elements allowed.
fn act_unchecked(s: &CliffordElement, x: &Spinor, conv: Convention) -> Spinor {
    let f = x.field();
    let mut out = Spinor::zero(f);
    for (m, c) in s.terms() {
        let mut cur: Vec<(u32, u8)> = x.terms().map(|(mm, cc)| (f.mul(c, cc), mm)).collect();
        for g in (0..14u8).rev().filter(|g| m >> g & 1 == 1) {
            cur = cur
                .into_iter()
                .filter_map(|(cc, mm)| {
                    generator_on_monomial(g, mm, conv).map(|(neg, m2)| (if neg { f.neg(cc) } else { cc }, m2))
                })
                .collect();
        }
        for (cc, mm) in cur {
            out.add_term(mm, cc);
        }
    }
    out
}

/// ρ(s)·x for an even Clifford element s.
pub fn spin_action(s: &CliffordElement, x: &Spinor, conv: Convention) -> Result<Spinor> {
    if !s.is_even() {
        return Err(OrbitaError::Usage(
            "the half-spin module is acted on by even elements only".into(),
        ));
    }
    if **s.field() != **x.field() {
        return Err(OrbitaError::Usage("field mismatch".into()));
    }
    Ok(act_unchecked(s, x, conv))
}

/// A single generator (0..14) on a possibly odd element of the exterior algebra.
pub fn generator_action(g: u8, x: &Spinor, conv: Convention) -> Spinor {
    act_unchecked(&CliffordElement::generator(x.field(), g), x, conv)
}

/// Exterior-algebra element with arbitrary parity, for operator identities.
pub fn exterior_basis(field: &Field, mask: u8) -> Spinor {
    let mut x = Spinor::zero(field);
    x.add_term(mask, 1);
    x
}

/// The quadratic form on the half-spin module in characteristic 2: each even
/// S ⊆ {1..6} pairs with its complement, each S ∪ {7} (S odd) with S^c ∪ {7}.
pub fn spin_quadratic(x: &Spinor) -> Result<u32> {
    let f = x.field();
    if f.p() != 2 {
        return Err(OrbitaError::Refused(
            "the spinor quadratic form is defined in characteristic 2 only".into(),
        ));
    }
    let mut total = 0;
    for (m, c) in x.terms() {
        let s = m & 0x3f;
        let partner = (!s & 0x3f) | (m & 0x40);
        // count each unordered pair once
        if m < partner {
            total = f.add(total, f.mul(c, x.coefficient(partner)));
        }
    }
    Ok(total)
}

/// Θ(s)·v = s v s⁻¹ on V₁₄ (coordinates e1..e7, f1..f7), found by solving w s = s v.
pub fn vector_action(s: &CliffordElement, v: &[u32]) -> Result<Vec<u32>> {
    let f = s.field();
    if v.len() != 14 {
        return Err(OrbitaError::Usage("vectors of V14 have 14 coordinates".into()));
    }
    let mut vv = CliffordElement::zero(f);
    for (g, &c) in v.iter().enumerate() {
        vv = vv.add(&CliffordElement::generator(f, g as u8).scale(c));
    }
    let target = s.mul(&vv);
    let cols: Vec<CliffordElement> = (0..14u8)
        .map(|g| CliffordElement::generator(f, g).mul(s))
        .collect();
    let mut monos: Vec<u16> = target.terms().map(|(m, _)| m).collect();
    for c in &cols {
        monos.extend(c.terms().map(|(m, _)| m));
    }
    monos.sort_unstable();
    monos.dedup();
    if monos.is_empty() {
        return Ok(vec![0; 14]);
    }
    let mut a = Matrix::zeros(f, monos.len(), 14);
    let mut b = Matrix::zeros(f, monos.len(), 1);
    for (r, m) in monos.iter().enumerate() {
        for (k, c) in cols.iter().enumerate() {
            a.set(r, k, c.terms.get(m).copied().unwrap_or(0));
        }
        b.set(r, 0, target.terms.get(m).copied().unwrap_or(0));
    }
    let sol = a.solve_linear(&b)?.ok_or_else(|| {
        OrbitaError::Consistency("s v s^-1 is not a vector (s may not be invertible)".into())
    })?;
    if !sol.kernel.is_empty() {
        return Err(OrbitaError::Consistency("Clifford element is not invertible".into()));
    }
    Ok(sol.particular.col(0))
}

/// Q(v) = Σ v_i v_{7+i} on V₁₄.
pub fn vector_quadratic(field: &FieldSpec, v: &[u32]) -> u32 {
    (0..7).fold(0, |acc, i| field.add(acc, field.mul(v[i], v[7 + i])))
}

// ---------------------------------------------------------------------------
// Expression parser for `spinor eval`.

/// Result of evaluating a textual expression.
#[derive(Clone, Debug)]
pub struct Evaluation {
    /// The operator part in normal form (1 when the expression is a spinor).
    pub operator: CliffordElement,
    pub spinor: Spinor,
    /// Present in characteristic 2.
    pub quadratic: Option<u32>,
}

/// Evaluate an expression such as `s7(t) (1+f1f2f3f4f5f6)`.
///
/// A product whose trailing factors are polynomials in f1..f7 is read as an
/// operator applied to the spinor they form; any other expression is applied
/// to the spinor 1.
pub fn evaluate(field: &Field, expr: &str, conv: Convention) -> Result<Evaluation> {
    let mut p = Parser {
        field,
        chars: expr.chars().filter(|c| !c.is_whitespace()).collect(),
        pos: 0,
    };
    let terms = p.sum()?;
    if p.pos != p.chars.len() {
        return Err(OrbitaError::Parse(format!(
            "unexpected '{}' at position {}",
            p.chars[p.pos], p.pos
        )));
    }
    let (operator, spinor_part) = if terms.len() == 1 {
        let factors = &terms[0];
        let split = factors
            .iter()
            .rposition(|x| !x.is_f_only())
            .map_or(0, |i| i + 1);
        let product = |fs: &[CliffordElement]| {
            fs.iter()
                .fold(CliffordElement::one(field), |acc, x| acc.mul(x))
        };
        (product(&factors[..split]), product(&factors[split..]))
    } else {
        let total = terms.iter().fold(CliffordElement::zero(field), |acc, fs| {
            acc.add(&fs.iter().fold(CliffordElement::one(field), |a, x| a.mul(x)))
        });
        if total.is_f_only() {
            (CliffordElement::one(field), total)
        } else {
            (total, CliffordElement::one(field))
        }
    };
    let x = Spinor::from_clifford(&spinor_part)?;
    let spinor = spin_action(&operator, &x, conv)?;
    let quadratic = if field.p() == 2 {
        Some(spin_quadratic(&spinor)?)
    } else {
        None
    };
    Ok(Evaluation {
        operator,
        spinor,
        quadratic,
    })
}

struct Parser<'a> {
    field: &'a Field,
    chars: Vec<char>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(OrbitaError::Parse(format!("expected '{c}' at position {}", self.pos)))
        }
    }

    fn sum(&mut self) -> Result<Vec<Vec<CliffordElement>>> {
        let mut terms = vec![self.product()?];
        while self.peek() == Some('+') {
            self.pos += 1;
            terms.push(self.product()?);
        }
        Ok(terms)
    }

    fn product(&mut self) -> Result<Vec<CliffordElement>> {
        let mut out = Vec::new();
        loop {
            match self.peek() {
                Some('*') if !out.is_empty() => self.pos += 1,
                Some(c) if c == '(' || c.is_ascii_alphanumeric() => {}
                _ => break,
            }
            out.push(self.factor()?);
        }
        if out.is_empty() {
            return Err(OrbitaError::Parse(format!("expected a factor at position {}", self.pos)));
        }
        Ok(out)
    }

    fn number(&mut self) -> Option<usize> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        (self.pos > start).then(|| self.chars[start..self.pos].iter().collect::<String>().parse().ok())?
    }

    /// Text up to the matching close parenthesis.
    fn group_text(&mut self) -> Result<String> {
        self.expect('(')?;
        let start = self.pos;
        let mut depth = 1;
        while let Some(c) = self.peek() {
            match c {
                '(' => depth += 1,
                ')' => {
                    depth -= 1;
                    if depth == 0 {
                        let s: String = self.chars[start..self.pos].iter().collect();
                        self.pos += 1;
                        return Ok(s);
                    }
                }
                _ => {}
            }
            self.pos += 1;
        }
        Err(OrbitaError::Parse("unbalanced parentheses".into()))
    }

    fn factor(&mut self) -> Result<CliffordElement> {
        let f = self.field;
        let c = self.peek().ok_or_else(|| OrbitaError::Parse("unexpected end".into()))?;
        if c == '(' {
            self.pos += 1;
            let terms = self.sum()?;
            self.expect(')')?;
            return Ok(terms.iter().fold(CliffordElement::zero(f), |acc, fs| {
                acc.add(&fs.iter().fold(CliffordElement::one(f), |a, x| a.mul(x)))
            }));
        }
        if c.is_ascii_digit() {
            let n = self.number().unwrap_or(0);
            return Ok(CliffordElement::scalar(f, f.from_int(n as i64)));
        }
        let rest: String = self.chars[self.pos..].iter().collect();
        if rest.starts_with("exp(") {
            self.pos += 3;
            let inner = self.group_text()?;
            let u = evaluate_plain(f, &inner)?;
            return exp_quadratic(&u);
        }
        self.pos += 1;
        match c {
            'e' | 'f' => {
                let i = self
                    .number()
                    .ok_or_else(|| OrbitaError::Parse(format!("{c} needs an index")))?;
                if c == 'e' {
                    CliffordElement::e(f, i)
                } else {
                    CliffordElement::f(f, i)
                }
            }
            't' => {
                let mut e = 1;
                if self.peek() == Some('^') {
                    self.pos += 1;
                    e = self
                        .number()
                        .ok_or_else(|| OrbitaError::Parse("bad exponent".into()))?;
                }
                Ok(CliffordElement::scalar(f, f.parse(&format!("t^{e}"))?))
            }
            's' => {
                if self.peek() == Some('_') {
                    self.pos += 1;
                }
                let braced = self.peek() == Some('{');
                if braced {
                    self.pos += 1;
                }
                let i = self
                    .number()
                    .ok_or_else(|| OrbitaError::Parse("s needs an index".into()))?;
                let j = if self.peek() == Some(',') {
                    self.pos += 1;
                    Some(self.number().ok_or_else(|| OrbitaError::Parse("s needs a second index".into()))?)
                } else {
                    None
                };
                if braced {
                    self.expect('}')?;
                }
                let arg = self.group_text()?;
                let lambda = f.parse(&arg)?;
                match j {
                    Some(j) => root_element(f, i, j, lambda),
                    None => torus_element(f, i, lambda),
                }
            }
            _ => Err(OrbitaError::Parse(format!("unknown symbol '{c}'"))),
        }
    }
}

/// Parse an expression as a plain Clifford element.
pub fn evaluate_plain(field: &Field, expr: &str) -> Result<CliffordElement> {
    let mut p = Parser {
        field,
        chars: expr.chars().filter(|c| !c.is_whitespace()).collect(),
        pos: 0,
    };
    let terms = p.sum()?;
    if p.pos != p.chars.len() {
        return Err(OrbitaError::Parse(format!("trailing input at position {}", p.pos)));
    }
    Ok(terms.iter().fold(CliffordElement::zero(field), |acc, fs| {
        acc.add(&fs.iter().fold(CliffordElement::one(field), |a, x| a.mul(x)))
    }))
}

// ---------------------------------------------------------------------------
// The characteristic-2 verification suite.

/// Outcome of one named check.
#[derive(Clone, Debug, serde::Serialize)]
pub struct SpinorCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl SpinorCheck {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        SpinorCheck {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

fn sp(field: &Field, subsets: &[&[usize]]) -> Spinor {
    Spinor::from_subsets(field, subsets).expect("valid subsets")
}

/// Representatives of the ten half-spin orbit types (types 2..10), f-monomial form.
pub fn orbit_representatives(field: &Field) -> Vec<(u32, Spinor)> {
    vec![
        (2, sp(field, &[&[]])),
        (3, sp(field, &[&[], &[1, 2, 3, 4]])),
        (4, sp(field, &[&[], &[1, 2, 3, 4, 5, 6]])),
        (5, sp(field, &[&[], &[1, 2, 3, 7], &[1, 2, 3, 4, 5, 6]])),
        (6, sp(field, &[&[], &[1, 2, 3, 7], &[4, 5, 6, 7], &[1, 2, 3, 4, 5, 6]])),
        (7, sp(field, &[&[], &[1, 2, 3, 7], &[1, 5, 6, 7], &[1, 2, 3, 4, 5, 6]])),
        (
            8,
            sp(field, &[&[], &[1, 2, 3, 7], &[1, 5, 6, 7], &[2, 4, 6, 7], &[1, 2, 3, 4, 5, 6]]),
        ),
        (9, sp(field, &[&[], &[1, 2, 3, 4], &[3, 4, 5, 6]])),
        (10, sp(field, &[&[], &[1, 2, 3, 4], &[3, 4, 5, 6], &[1, 3, 6, 7]])),
    ]
}

/// Q_X of each representative, by direct evaluation of the pairing.
pub const REPRESENTATIVE_QX: [(u32, u32); 9] =
    [(2, 0), (3, 0), (4, 1), (5, 1), (6, 0), (7, 1), (8, 1), (9, 0), (10, 0)];

fn for_all_nonzero(field: &Field, mut check: impl FnMut(u32) -> Result<bool>) -> Result<Option<u32>> {
    for lambda in 1..field.q() {
        if !check(lambda)? {
            return Ok(Some(lambda));
        }
    }
    Ok(None)
}

fn fixes_for_all(field: &Field, x: &Spinor, conv: Convention, build: &dyn Fn(u32) -> Result<CliffordElement>) -> Result<Option<u32>> {
    for_all_nonzero(field, |l| Ok(spin_action(&build(l)?, x, conv)? == *x))
}

fn outcome(name: &str, failure: Option<u32>, field: &Field, bound: &str) -> SpinorCheck {
    match failure {
        None => SpinorCheck::new(name, true, format!("all λ in GF({})*; {bound}", field.q())),
        Some(l) => SpinorCheck::new(name, false, format!("fails at λ = {}", field.format(l))),
    }
}

/// The torus and Weyl element used to move e7 + f7 to αe4 + α⁻¹f4.
fn equation_five_operator(field: &Field, lambda: u32) -> Result<CliffordElement> {
    let one = |i, j| root_element(field, i, j, 1);
    let n47 = one(4, 14)?.mul(&one(7, 11)?).mul(&one(4, 14)?);
    Ok(torus_element(field, 4, lambda)?
        .reversed()
        .mul(&n47)
        .mul(&one(4, 14)?)
        .mul(&one(7, 11)?))
}

/// Clifford relations, algebra-map spot checks, the five torus equations,
/// quadratic-form values, the vector action of s7 and the fixing checks.
pub fn run_suite() -> Result<Vec<SpinorCheck>> {
    let f64 = FieldSpec::new(64)?;
    let f16 = FieldSpec::new(16)?;
    let mut out = Vec::new();

    // Clifford relations as operators on the whole exterior algebra.
    let mut rel_ok = true;
    for field in [FieldSpec::new(2)?, FieldSpec::new(4)?, FieldSpec::new(3)?] {
        for conv in [Convention::Standard, Convention::Reversed] {
            for m in 0u8..128 {
                let x = exterior_basis(&field, m);
                for i in 0..7u8 {
                    let ef = generator_action(i, &generator_action(i + 7, &x, conv), conv);
                    let fe = generator_action(i + 7, &generator_action(i, &x, conv), conv);
                    rel_ok &= ef.add(&fe) == x;
                    rel_ok &= generator_action(i, &generator_action(i, &x, conv), conv) == Spinor::zero(&field);
                    rel_ok &= generator_action(i + 7, &generator_action(i + 7, &x, conv), conv) == Spinor::zero(&field);
                }
            }
        }
        let e1 = CliffordElement::e(&field, 1)?;
        let f1 = CliffordElement::f(&field, 1)?;
        rel_ok &= e1.mul(&f1).add(&f1.mul(&e1)) == CliffordElement::one(&field);
        rel_ok &= e1.mul(&e1).is_zero();
    }
    out.push(SpinorCheck::new(
        "clifford relations",
        rel_ok,
        "e_i f_i + f_i e_i = 1, e_i^2 = f_i^2 = 0 on all 128 exterior monomials",
    ));

    // Algebra map on a fixed set of even elements.
    let mut map_ok = true;
    for q in [2, 4, 8] {
        let field = FieldSpec::new(q)?;
        let g = field.generator();
        let samples = [
            torus_element(&field, 3, g)?,
            root_element(&field, 2, 10, g)?,
            root_element(&field, 1, 5, 1)?.mul(&root_element(&field, 10, 13, g)?),
            exp_quadratic(&evaluate_plain(&field, "e1e2+f3f4+e5f6")?)?,
            evaluate_plain(&field, "e1f1+f2f3+e4e5e6e7")?,
        ];
        for s in &samples {
            for t in &samples {
                let st = s.mul(t);
                for m in Spinor::basis_masks() {
                    let x = Spinor::basis(&field, m)?;
                    for conv in [Convention::Standard, Convention::Reversed] {
                        map_ok &= spin_action(&st, &x, conv)? == spin_action(s, &spin_action(t, &x, conv)?, conv)?;
                    }
                }
            }
        }
    }
    out.push(SpinorCheck::new(
        "algebra map",
        map_ok,
        "ρ(st) = ρ(s)ρ(t) on all 64 basis spinors over GF(2), GF(4), GF(8)",
    ));

    // Torus equations. The torus acts in the reversed convention.
    let f = &f64;
    let x6 = sp(f, &[&[], &[1, 2, 3, 7], &[4, 5, 6, 7], &[1, 2, 3, 4, 5, 6]]);
    let x4 = sp(f, &[&[], &[1, 2, 3, 4, 5, 6]]);
    let x8 = sp(f, &[&[], &[1, 2, 3, 7], &[1, 5, 6, 7], &[2, 4, 6, 7], &[1, 2, 3, 4, 5, 6]]);
    let x5 = sp(f, &[&[], &[1, 2, 3, 7], &[1, 2, 3, 4, 5, 6]]);
    let x7 = sp(f, &[&[], &[1, 2, 3, 7], &[1, 5, 6, 7], &[1, 2, 3, 4, 5, 6]]);
    let s7 = |l: u32| torus_element(f, 7, l).map(|s| s.reversed());
    let inv = |l: u32| f.inv(l).unwrap();
    let equations: Vec<(&str, &Spinor, Box<dyn Fn(u32) -> Spinor>)> = vec![
        (
            "torus equation (i)",
            &x6,
            Box::new(|l| x4.scale(inv(l)).add(&sp(f, &[&[1, 2, 3, 7], &[4, 5, 6, 7]]).scale(l))),
        ),
        ("torus equation (ii)", &x4, Box::new(|l| x4.scale(inv(l)))),
        (
            "torus equation (iii)",
            &x8,
            Box::new(|l| {
                x4.scale(inv(l))
                    .add(&sp(f, &[&[1, 2, 3, 7], &[1, 5, 6, 7], &[2, 4, 6, 7]]).scale(l))
            }),
        ),
        (
            "torus equation (iv)",
            &x5,
            Box::new(|l| x4.scale(inv(l)).add(&sp(f, &[&[1, 2, 3, 7]]).scale(l))),
        ),
    ];
    for (name, x, rhs) in &equations {
        let fail = for_all_nonzero(f, |l| Ok(spin_action(&s7(l)?, x, Convention::Standard)? == rhs(l)))?;
        out.push(outcome(name, fail, f, "entries have degree at most 2 in λ"));
    }
    let rhs5 = |l: u32| {
        sp(f, &[&[], &[1, 2, 3, 7], &[1, 5, 6, 7], &[1, 2, 3, 5, 6, 7]])
            .scale(inv(l))
            .add(&sp(f, &[&[1, 2, 3, 4, 5, 6]]).scale(l))
    };
    let fail = for_all_nonzero(f, |l| {
        Ok(spin_action(&equation_five_operator(f, l)?, &x7, Convention::Standard)? == rhs5(l))
    })?;
    out.push(outcome("torus equation (v)", fail, f, "entries have degree at most 2 in λ"));

    // Quadratic form values.
    let q4 = spin_quadratic(&x4)?;
    out.push(SpinorCheck::new("Q_X(1+f1f2f3f4f5f6) = 1", q4 == 1, format!("value {}", f.format(q4))));
    let fail = for_all_nonzero(f, |l| {
        let y = spin_action(&s7(l)?, &x6, Convention::Standard)?;
        let expect = f.pow(f.add(inv(l), l), 2);
        Ok(spin_quadratic(&y)? == expect)
    })?;
    out.push(outcome("Q_X of (i) right side = (λ⁻¹+λ)²", fail, f, "degree at most 4 in λ"));
    let reps = orbit_representatives(f);
    let bad: Vec<u32> = reps
        .iter()
        .zip(REPRESENTATIVE_QX)
        .filter(|((_, x), (_, q))| spin_quadratic(x).ok() != Some(*q))
        .map(|((t, _), _)| *t)
        .collect();
    out.push(SpinorCheck::new(
        "representative Q_X values",
        bad.is_empty(),
        if bad.is_empty() {
            "types 2, 3, 6, 9, 10 singular; 4, 5, 7, 8 non-singular".to_string()
        } else {
            format!("mismatch for types {bad:?}")
        },
    ));

    // Vector action of the torus element.
    let mut e7f7 = vec![0; 14];
    e7f7[6] = 1;
    e7f7[13] = 1;
    let literal = for_all_nonzero(f, |l| {
        let w = vector_action(&torus_element(f, 7, l)?, &e7f7)?;
        let mut expect = vec![0; 14];
        expect[6] = l;
        expect[13] = inv(l);
        Ok(w == expect)
    })?;
    out.push(match literal {
        None => SpinorCheck::new("vector action (e7+f7)s7(λ) = λe7+λ⁻¹f7", true, "all λ in GF(64)*"),
        Some(l) => {
            let w = vector_action(&torus_element(f, 7, l)?, &e7f7)?;
            SpinorCheck::new(
                "vector action (e7+f7)s7(λ) = λe7+λ⁻¹f7",
                false,
                format!(
                    "at λ = {} the image is {} + {} (the square of the expected scalars)",
                    f.format(l),
                    format_term(f, w[6], "e7"),
                    format_term(f, w[13], "f7")
                ),
            )
        }
    });
    let squared = for_all_nonzero(f, |alpha| {
        let l = f.square_root(alpha).unwrap();
        let w = vector_action(&torus_element(f, 7, l)?, &e7f7)?;
        let mut expect = vec![0; 14];
        expect[6] = alpha;
        expect[13] = inv(alpha);
        Ok(w == expect && vector_quadratic(f, &w) == vector_quadratic(f, &e7f7))
    })?;
    out.push(outcome(
        "vector action (e7+f7)s7(√α) = αe7+α⁻¹f7",
        squared,
        f,
        "one point per α",
    ));

    // Fixing checks over GF(16).
    let f = &f16;
    let x9 = sp(f, &[&[], &[1, 2, 3, 4], &[3, 4, 5, 6]]);
    let mut singles: Vec<(usize, usize)> = (1..=6).flat_map(|i| [(7, i), (7, 7 + i)]).collect();
    for (a, b) in [
        (1, 10), (1, 11), (1, 5), (1, 6), (2, 10), (2, 11), (2, 5), (2, 6),
        (10, 5), (10, 6), (11, 5), (11, 6),
    ] {
        singles.push((a, b));
    }
    let mut bad = Vec::new();
    for &(a, b) in &singles {
        if fixes_for_all(f, &x9, Convention::Standard, &|l| root_element(f, a, b, l))?.is_some() {
            bad.push(format!("s_{{{a},{b}}}"));
        }
    }
    out.push(SpinorCheck::new(
        "type 9: 24 unipotent generators fix 1+f1f2f3f4+f3f4f5f6",
        bad.is_empty(),
        if bad.is_empty() { "all λ in GF(16)*".to_string() } else { format!("failing: {}", bad.join(", ")) },
    ));
    let pair = |a: usize, b: usize, c: usize, d: usize| {
        move |l: u32| -> Result<CliffordElement> { Ok(root_element(f, a, b, l)?.mul(&root_element(f, c, d, l)?)) }
    };
    let corr34 = fixes_for_all(f, &x9, Convention::Standard, &pair(5, 6, 10, 11))?;
    let corr45 = fixes_for_all(f, &x9, Convention::Standard, &pair(5, 6, 11, 12))?;
    let which = match (corr34.is_none(), corr45.is_none()) {
        (true, true) => "both f3f4 and f4f5 pass",
        (true, false) => "f3f4 passes, f4f5 fails",
        (false, true) => "f4f5 passes, f3f4 fails",
        (false, false) => "neither f3f4 nor f4f5 passes",
    };
    out.push(SpinorCheck::new(
        "type 9: (1+λe5e6)(1+λf?f?) with a corrected second factor",
        corr34.is_none() || corr45.is_none(),
        which,
    ));
    let e12 = fixes_for_all(f, &x9, Convention::Standard, &pair(1, 2, 10, 11))?;
    out.push(outcome("type 9: (1+λe1e2)(1+λf3f4) fixes", e12, f, "degree 2 in λ"));

    let x10 = sp(f, &[&[], &[1, 2, 3, 4], &[3, 4, 5, 6], &[1, 3, 6, 7]]);
    let mut status = Vec::new();
    let mut all_ok = true;
    for (a, b, c, d) in [(2, 10, 4, 13), (6, 8, 3, 12), (5, 7, 11, 13)] {
        let translated = fixes_for_all(f, &x10, Convention::Reversed, &pair(a, b, c, d))?;
        let untranslated = fixes_for_all(f, &x10, Convention::Standard, &pair(a, b, c, d))?;
        all_ok &= translated.is_none();
        status.push(format!(
            "s_{{{a},{b}}}s_{{{c},{d}}}: translated {}, untranslated {}",
            if translated.is_none() { "fixes" } else { "moves" },
            if untranslated.is_none() { "fixes" } else { "moves" },
        ));
    }
    out.push(SpinorCheck::new(
        "type 10: semisimple generators fix 1+f1f2f3f4+f3f4f5f6+f1f3f6f7",
        all_ok,
        status.join("; "),
    ));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defining_relations() {
        let f = FieldSpec::new(5).unwrap();
        for i in 1..=7 {
            let e = CliffordElement::e(&f, i).unwrap();
            let ff = CliffordElement::f(&f, i).unwrap();
            assert_eq!(e.mul(&ff).add(&ff.mul(&e)), CliffordElement::one(&f));
            assert!(e.mul(&e).is_zero());
            assert!(ff.mul(&ff).is_zero());
        }
        let e1 = CliffordElement::e(&f, 1).unwrap();
        let f2 = CliffordElement::f(&f, 2).unwrap();
        assert!(e1.mul(&f2).add(&f2.mul(&e1)).is_zero());
    }

    #[test]
    fn torus_inverse() {
        let f = FieldSpec::new(7).unwrap();
        for l in 1..7 {
            let s = torus_element(&f, 7, l).unwrap();
            let t = torus_element(&f, 7, f.inv(l).unwrap()).unwrap();
            assert_eq!(s.mul(&t), CliffordElement::one(&f));
        }
    }

    #[test]
    fn root_element_inverse_and_orthogonality() {
        let f = FieldSpec::new(5).unwrap();
        let s = root_element(&f, 2, 12, 3).unwrap();
        let t = root_element(&f, 2, 12, f.neg(3)).unwrap();
        assert_eq!(s.mul(&t), CliffordElement::one(&f));
        assert!(root_element(&f, 3, 10, 1).is_err());
        assert_eq!(root_element(&f, 1, 2, 0).unwrap(), CliffordElement::one(&f));
    }

    #[test]
    fn quadratic_examples() {
        let f = FieldSpec::new(2).unwrap();
        assert_eq!(spin_quadratic(&sp(&f, &[&[], &[1, 2, 3, 4, 5, 6]])).unwrap(), 1);
        assert_eq!(spin_quadratic(&sp(&f, &[&[1, 2, 3, 7], &[4, 5, 6, 7]])).unwrap(), 1);
        for m in Spinor::basis_masks() {
            assert_eq!(spin_quadratic(&Spinor::basis(&f, m).unwrap()).unwrap(), 0);
        }
        assert!(spin_quadratic(&Spinor::zero(&FieldSpec::new(3).unwrap())).is_err());
    }

    #[test]
    fn odd_operator_refused() {
        let f = FieldSpec::new(2).unwrap();
        let e1 = CliffordElement::e(&f, 1).unwrap();
        assert!(spin_action(&e1, &sp(&f, &[&[]]), Convention::Standard).is_err());
    }

    #[test]
    fn vector_action_of_root_element() {
        let f = FieldSpec::new(4).unwrap();
        let s = root_element(&f, 1, 2, 3).unwrap();
        // vectors orthogonal to e1 and e2 are fixed
        for g in [0usize, 1, 2, 3, 4, 5, 6, 9, 10, 11, 12, 13] {
            let mut v = vec![0; 14];
            v[g] = 1;
            assert_eq!(vector_action(&s, &v).unwrap(), v);
        }
    }

    #[test]
    fn parser_round_trip() {
        let f = FieldSpec::new(64).unwrap();
        let ev = evaluate(&f, "1+f1f2f3f4f5f6", Convention::Standard).unwrap();
        assert_eq!(ev.quadratic, Some(1));
        assert_eq!(ev.spinor.to_string(), "1 + f1f2f3f4f5f6");
        let ev = evaluate(&f, "s7(t)(1+f1f2f3f4f5f6)", Convention::Reversed).unwrap();
        assert_eq!(ev.spinor, sp(&f, &[&[], &[1, 2, 3, 4, 5, 6]]).scale(f.inv(2).unwrap()));
        let e = evaluate_plain(&f, "exp(e1e2)").unwrap();
        assert_eq!(e, root_element(&f, 1, 2, 1).unwrap());
        assert!(evaluate(&f, "s{4,14}(1) e1", Convention::Standard).is_err());
        assert!(evaluate(&f, "e8", Convention::Standard).is_err());
        assert_eq!(
            evaluate_plain(&f, "s_{4,14}(t^2+1)").unwrap(),
            root_element(&f, 4, 14, f.parse("t^2+1").unwrap()).unwrap()
        );
    }
}

