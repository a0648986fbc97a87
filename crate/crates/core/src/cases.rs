//! The modules studied here, each built as explicit generator matrices on V
//! together with the invariant quadratic form.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use serde::Serialize;

use crate::error::{OrbitaError, Result};
use crate::field::{Field, FieldSpec};
use crate::groups::{classical_generators, symplectic_gram, Family, GroupSpec};
use crate::matrix::Matrix;
use crate::quadform::{invariant_quadratic_space, verify_on_sample, QuadraticForm};

/// Registry entry for `list-cases`.
#[derive(Clone, Debug, Serialize)]
pub struct CaseInfo {
    pub id: &'static str,
    pub group: &'static str,
    pub dim: &'static str,
    pub constraints: &'static str,
}

pub const CASES: &[CaseInfo] = &[
    CaseInfo {
        id: "A1-sym4",
        group: "PGL2(q) on degree-4 binary forms",
        dim: "5",
        constraints: "p >= 5",
    },
    CaseInfo {
        id: "A2-adjoint",
        group: "SL3(q) by conjugation on trace-zero matrices",
        dim: "8",
        constraints: "p != 3",
    },
    CaseInfo {
        id: "B2-adjoint",
        group: "Sp4(q) by conjugation on sp4",
        dim: "10",
        constraints: "p odd",
    },
    CaseInfo {
        id: "A3-adjoint-p2",
        group: "SL4(q) by conjugation on sl4/<I>",
        dim: "14",
        constraints: "p = 2",
    },
    CaseInfo {
        id: "D4-so8-p2",
        group: "Omega8+(2) by conjugation on W/<I>",
        dim: "26",
        constraints: "q = 2",
    },
    CaseInfo {
        id: "C4-lambda2-p2",
        group: "Sp8(q) on ker(contraction)/<omega> in the exterior square",
        dim: "26",
        constraints: "p = 2",
    },
    CaseInfo {
        id: "C3-lambda2",
        group: "Sp6(q) on ker(contraction) in the exterior square",
        dim: "14",
        constraints: "p != 3",
    },
    CaseInfo {
        id: "Sp4xSp4",
        group: "Sp4(q) x Sp4(q) on 4x4 matrices, A -> g A h^T",
        dim: "16",
        constraints: "any q",
    },
    CaseInfo {
        id: "Sp4xSpN",
        group: "Sp4(q) x SpN(q) on 4xN matrices (N even >= 4, default 6)",
        dim: "4N",
        constraints: "any q",
    },
    CaseInfo {
        id: "Sp6xSp6-diag",
        group: "Sp6(q) x Sp6(q) on 6x6 matrices (double-coset setting)",
        dim: "36",
        constraints: "any q; orbit scans exceed every budget",
    },
    CaseInfo {
        id: "B6-spin",
        group: "Spin13(q) on the 64-dimensional spin module (symbolic checks)",
        dim: "64",
        constraints: "p = 2; verify only",
    },
];

/// How per-orbit invariants are read off a point.
#[derive(Clone, Debug)]
pub enum InvariantKind {
    None,
    /// Points are m x n matrices stored row-major; report the rank.
    TensorRank { rows: usize, cols: usize },
    /// Points lift to n x n matrices; report the nilpotent/semisimple class.
    LiftedMatrix { n: usize, quotient_by_scalars: bool },
}

/// A subquotient W/U of an ambient space, with V-basis `kept` and U-basis `dropped`.
#[derive(Clone, Debug)]
pub struct Subquotient {
    field: Field,
    ambient_dim: usize,
    kept: Vec<Vec<u32>>,
    dropped: Vec<Vec<u32>>,
    // columns: dropped then kept
    basis: Matrix,
}

impl Subquotient {
    /// `w_basis` spans W, `u_basis` spans U inside W. The kept vectors are
    /// chosen greedily from `w_basis`.
    pub fn new(field: &Field, ambient_dim: usize, w_basis: &[Vec<u32>], u_basis: &[Vec<u32>]) -> Result<Self> {
        let mut chosen: Vec<Vec<u32>> = u_basis.to_vec();
        let mut kept = Vec::new();
        let rank = |vs: &[Vec<u32>]| -> usize {
            if vs.is_empty() {
                0
            } else {
                Matrix::from_raw(field, vs.len(), ambient_dim, vs.concat()).unwrap().rank()
            }
        };
        if rank(&chosen) != chosen.len() {
            return Err(OrbitaError::Consistency("dependent quotient basis".into()));
        }
        for w in w_basis {
            chosen.push(w.clone());
            if rank(&chosen) == chosen.len() {
                kept.push(w.clone());
            } else {
                chosen.pop();
            }
        }
        let all: Vec<Vec<u32>> = u_basis.iter().chain(kept.iter()).cloned().collect();
        let basis = Matrix::from_raw(field, all.len(), ambient_dim, all.concat())?.transpose();
        Ok(Subquotient {
            field: field.clone(),
            ambient_dim,
            kept,
            dropped: u_basis.to_vec(),
            basis,
        })
    }

    pub fn dim(&self) -> usize {
        self.kept.len()
    }

    /// Coordinates in V of an ambient vector of W; None when x is not in W.
    pub fn coords(&self, x: &[u32]) -> Option<Vec<u32>> {
        let sol = self
            .basis
            .solve_linear(&Matrix::column(&self.field, x))
            .ok()??;
        Some(sol.particular.col(0)[self.dropped.len()..].to_vec())
    }

    /// The ambient representative with zero U-component.
    pub fn lift(&self, c: &[u32]) -> Vec<u32> {
        let f = &self.field;
        let mut out = vec![0; self.ambient_dim];
        for (v, &a) in self.kept.iter().zip(c) {
            if a == 0 {
                continue;
            }
            for (o, &x) in out.iter_mut().zip(v) {
                *o = f.add(*o, f.mul(a, x));
            }
        }
        out
    }

    /// Matrix on V induced by an ambient linear map; fails if W or U is not stable.
    pub fn induced(&self, g: &Matrix) -> Result<Matrix> {
        for u in &self.dropped {
            let c = self.coords(&g.apply(u)).ok_or_else(unstable)?;
            if c.iter().any(|&x| x != 0) {
                return Err(OrbitaError::Consistency(
                    "quotient subspace is not stable under the action".into(),
                ));
            }
        }
        let n = self.dim();
        let mut m = Matrix::zeros(&self.field, n, n);
        for (j, v) in self.kept.iter().enumerate() {
            let c = self.coords(&g.apply(v)).ok_or_else(unstable)?;
            for (i, &x) in c.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        Ok(m)
    }
}

fn unstable() -> OrbitaError {
    OrbitaError::Consistency("subspace is not stable under the action".into())
}

/// A named representative, present when defined over the field.
#[derive(Clone, Debug)]
pub struct NamedPoint {
    pub name: String,
    pub coords: Option<Vec<u32>>,
}

#[derive(Clone, Debug)]
pub struct ModuleCase {
    pub id: String,
    pub field: Field,
    pub dim: usize,
    /// Images of the group generators on V, acting on column vectors.
    pub gens: Vec<Matrix>,
    pub groups: Vec<GroupSpec>,
    /// Order of the acting group (product for tensor cases).
    pub group_order: BigUint,
    /// Elements of the acting group that act as scalars on V.
    pub kernel_order: BigUint,
    pub form: QuadraticForm,
    pub invariants: InvariantKind,
    pub subquotient: Option<Subquotient>,
    pub notes: Vec<String>,
}

impl ModuleCase {
    pub fn q(&self) -> u32 {
        self.field.q()
    }

    /// Order of the group induced on the projective space of V.
    pub fn effective_order(&self) -> BigUint {
        &self.group_order / &self.kernel_order
    }

    /// Ambient matrix representing a point, for the adjoint-type cases.
    pub fn lift_matrix(&self, coords: &[u32]) -> Option<Matrix> {
        let InvariantKind::LiftedMatrix { n, .. } = self.invariants else {
            return None;
        };
        let amb = match &self.subquotient {
            Some(s) => s.lift(coords),
            None => coords.to_vec(),
        };
        Matrix::from_raw(&self.field, n, n, amb).ok()
    }

    /// Coordinates in V of an ambient matrix (for the adjoint-type cases).
    pub fn coords_of_matrix(&self, m: &Matrix) -> Option<Vec<u32>> {
        match &self.subquotient {
            Some(s) => s.coords(m.data()),
            None => Some(m.data().to_vec()),
        }
    }

    /// Exact invariance of the form under every generator.
    pub fn check_form(&self) -> Result<()> {
        for g in &self.gens {
            if g.determinant()? == 0 {
                return Err(OrbitaError::Consistency(format!("{}: singular generator", self.id)));
            }
            if !self.form.is_invariant_under(g) {
                return Err(OrbitaError::Consistency(format!(
                    "{}: form not preserved by a generator",
                    self.id
                )));
            }
        }
        Ok(())
    }

    /// Named representatives for this case.
    pub fn named_points(&self) -> Vec<NamedPoint> {
        let f = &self.field;
        match self.id.as_str() {
            "A1-sym4" => vec![
                NamedPoint { name: "e^4".into(), coords: Some(vec![1, 0, 0, 0, 0]) },
                NamedPoint { name: "e^3 f".into(), coords: Some(vec![0, 1, 0, 0, 0]) },
            ],
            "A3-adjoint-p2" => {
                let roots = f.quadratic_roots(1, 1, 1).unwrap_or_default();
                let coords = roots.first().and_then(|&a| {
                    let d = Matrix::diagonal(f, &[0, 1, a, f.add(1, a)]);
                    self.coords_of_matrix(&d)
                });
                vec![NamedPoint { name: "diag(0,1,a,1+a)".into(), coords }]
            }
            "Sp4xSp4" => {
                let e = |entries: &[(usize, usize, u32)]| {
                    let mut m = vec![0; 16];
                    for &(i, j, v) in entries {
                        m[(i - 1) * 4 + (j - 1)] = v;
                    }
                    m
                };
                let id = e(&[(1, 1, 1), (2, 2, 1), (3, 3, 1), (4, 4, 1)]);
                let common = vec![
                    ("e1(x)e1+f1(x)e2+e2(x)f2", Some(e(&[(1, 1, 1), (4, 2, 1), (2, 3, 1)]))),
                    ("e1(x)e1+e2(x)e2", Some(e(&[(1, 1, 1), (2, 2, 1)]))),
                    ("e1(x)e1+f1(x)e2", Some(e(&[(1, 1, 1), (4, 2, 1)]))),
                    ("e1(x)e1+e2(x)f1", Some(e(&[(1, 1, 1), (2, 4, 1)]))),
                    ("e1(x)e1", Some(e(&[(1, 1, 1)]))),
                ];
                let mut out = Vec::new();
                if f.p() == 2 {
                    out.push(("v_I", Some(id.clone())));
                    let mut vi = id;
                    vi[1] = 1;
                    out.push(("v_I+e1(x)e2", Some(vi)));
                } else {
                    let w = f.square_root(f.neg(1));
                    out.push((
                        "e1(x)e1+e2(x)e2+w f2(x)f2-w f1(x)f1",
                        w.map(|w| e(&[(1, 1, 1), (2, 2, 1), (3, 3, w), (4, 4, f.neg(w))])),
                    ));
                }
                out.extend(common);
                out.into_iter()
                    .map(|(n, c)| NamedPoint { name: n.into(), coords: c })
                    .collect()
            }
            _ => vec![],
        }
    }
}

/// Build a case by identifier. `n_param` is the second degree of `Sp4xSpN`.
pub fn build_case(id: &str, q: u32, n_param: Option<usize>) -> Result<ModuleCase> {
    let field = FieldSpec::new(q)?;
    match id {
        "A1-sym4" => build_sym4(&field),
        "A2-adjoint" => build_adjoint_sl(&field, 3),
        "B2-adjoint" => build_adjoint_b2(&field),
        "A3-adjoint-p2" => build_adjoint_sl(&field, 4),
        "D4-so8-p2" => build_d4(&field),
        "C3-lambda2" => build_lambda2_sp(&field, 3),
        "C4-lambda2-p2" => build_lambda2_sp(&field, 4),
        "Sp4xSp4" => build_tensor_spsp(&field, 4, 4, "Sp4xSp4"),
        "Sp4xSpN" => build_tensor_spsp(&field, 4, n_param.unwrap_or(6), "Sp4xSpN"),
        "Sp6xSp6-diag" => build_tensor_spsp(&field, 6, 6, "Sp6xSp6-diag"),
        "B6-spin" => Err(OrbitaError::Refused(
            "B6-spin has no matrix model; use verify B6-spin or spinor eval".into(),
        )),
        _ => Err(OrbitaError::Usage(format!(
            "unknown case {id}; run list-cases for the available identifiers"
        ))),
    }
}

fn unique_form(id: &str, field: &Field, dim: usize, gens: &[Matrix]) -> Result<QuadraticForm> {
    let mut forms = invariant_quadratic_space(field, dim, gens)?;
    if forms.len() != 1 {
        return Err(OrbitaError::Consistency(format!(
            "{id}: expected a unique invariant form, found a space of dimension {}",
            forms.len()
        )));
    }
    Ok(forms.remove(0))
}

fn finish(mut case: ModuleCase) -> Result<ModuleCase> {
    case.check_form()?;
    verify_on_sample(std::slice::from_ref(&case.form), &case.gens, 10_000 / case.gens.len().max(1))?;
    if !case.form.radical().nondegenerate {
        case.notes.push("polar form is degenerate".into());
    }
    Ok(case)
}

/// Matrix of f(x, y) -> f(a x + c y, b x + d y) on x^{4-i} y^i, scaled by det^{-2}.
fn sym4_image(field: &Field, g: &Matrix) -> Result<Matrix> {
    let f = field;
    let (a, b, c, d) = (g.get(0, 0), g.get(0, 1), g.get(1, 0), g.get(1, 1));
    // image of x is a x + c y, image of y is b x + d y
    let lin = |u: u32, v: u32| vec![u, v];
    let px = lin(a, c);
    let py = lin(b, d);
    let poly_mul = |p: &[u32], q: &[u32]| {
        let mut out = vec![0; p.len() + q.len() - 1];
        for (i, &x) in p.iter().enumerate() {
            for (j, &y) in q.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(x, y));
            }
        }
        out
    };
    let mut m = Matrix::zeros(f, 5, 5);
    for i in 0..5 {
        let mut p = vec![1];
        for _ in 0..4 - i {
            p = poly_mul(&p, &px);
        }
        for _ in 0..i {
            p = poly_mul(&p, &py);
        }
        // p[j] is the coefficient of x^{4-j} y^j
        for (j, &v) in p.iter().enumerate() {
            m.set(j, i, v);
        }
    }
    let det = g.determinant()?;
    let s = f.inv(f.mul(det, det)).ok_or_else(|| OrbitaError::Usage("singular matrix".into()))?;
    Ok(m.scale(s))
}

/// PGL2(q) on binary quartics; requires p >= 5.
pub fn build_sym4(field: &Field) -> Result<ModuleCase> {
    if field.p() < 5 {
        return Err(OrbitaError::Refused(format!(
            "A1-sym4 needs characteristic at least 5, got {}",
            field.p()
        )));
    }
    let pgl = classical_generators(Family::PGL2, 2, field.q())?;
    let gens = pgl
        .generators
        .iter()
        .map(|g| sym4_image(field, g))
        .collect::<Result<Vec<_>>>()?;
    let form = unique_form("A1-sym4", field, 5, &gens)?;
    // Classical invariant of a binary quartic in monomial coordinates:
    // I = 12 a0 a4 - 3 a1 a3 + a2^2.
    let mut u = Matrix::zeros(field, 5, 5);
    u.set(0, 4, field.from_int(12));
    u.set(1, 3, field.from_int(-3));
    u.set(2, 2, 1);
    let expected = QuadraticForm::from_upper(u)?;
    let c = form.upper().get(2, 2);
    if c == 0 || expected.scale(c) != form {
        return Err(OrbitaError::Consistency(
            "solved form on binary quartics differs from the classical invariant".into(),
        ));
    }
    finish(ModuleCase {
        id: "A1-sym4".into(),
        field: field.clone(),
        dim: 5,
        gens,
        group_order: pgl.order.clone(),
        groups: vec![pgl],
        kernel_order: BigUint::one(),
        form: expected,
        invariants: InvariantKind::None,
        subquotient: None,
        notes: vec![],
    })
}

/// Matrix of X -> g X g^{-1} on n x n matrices stored row-major.
pub fn conjugation_action(g: &Matrix) -> Result<Matrix> {
    let n = g.rows();
    let ginv = g
        .inverse()
        .ok_or_else(|| OrbitaError::Usage("conjugation by a singular matrix".into()))?;
    let f = g.field();
    let mut m = Matrix::zeros(f, n * n, n * n);
    for a in 0..n {
        for b in 0..n {
            // g E_ab g^{-1} has entry (r, c) = g[r][a] ginv[b][c]
            let col = a * n + b;
            for r in 0..n {
                let gra = g.get(r, a);
                if gra == 0 {
                    continue;
                }
                for c in 0..n {
                    m.set(r * n + c, col, f.mul(gra, ginv.get(b, c)));
                }
            }
        }
    }
    Ok(m)
}

fn unit_vec(n: usize, entries: &[(usize, usize, u32)], field: &FieldSpec) -> Vec<u32> {
    let mut v = vec![0; n * n];
    for &(i, j, x) in entries {
        v[i * n + j] = field.add(v[i * n + j], x);
    }
    v
}

/// SL_n conjugating trace-zero matrices; for n = 4, p = 2 modulo scalars.
fn build_adjoint_sl(field: &Field, n: usize) -> Result<ModuleCase> {
    let f = field;
    let id = if n == 3 { "A2-adjoint" } else { "A3-adjoint-p2" };
    if n == 3 && f.p() == 3 {
        return Err(OrbitaError::Refused("A2-adjoint excludes characteristic 3".into()));
    }
    if n == 4 && f.p() != 2 {
        return Err(OrbitaError::Refused("A3-adjoint-p2 needs characteristic 2".into()));
    }
    let sl = classical_generators(Family::SL, n, f.q())?;
    let neg1 = f.neg(1);
    let mut w_basis = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                w_basis.push(unit_vec(n, &[(i, j, 1)], f));
            }
        }
    }
    for i in 0..n - 1 {
        if n == 4 {
            // diag(1,1,0,0) and diag(0,1,1,0) complement <I> in char 2
            if i < 2 {
                w_basis.push(unit_vec(n, &[(i, i, 1), (i + 1, i + 1, 1)], f));
            }
        } else {
            w_basis.push(unit_vec(n, &[(i, i, 1), (i + 1, i + 1, neg1)], f));
        }
    }
    let u_basis = if n == 4 {
        vec![unit_vec(n, &[(0, 0, 1), (1, 1, 1), (2, 2, 1), (3, 3, 1)], f)]
    } else {
        vec![]
    };
    let sq = Subquotient::new(f, n * n, &w_basis, &u_basis)?;
    let gens = sl
        .generators
        .iter()
        .map(|g| sq.induced(&conjugation_action(g)?))
        .collect::<Result<Vec<_>>>()?;
    let dim = sq.dim();
    let form = unique_form(id, f, dim, &gens)?;
    let kernel = if n == 3 {
        BigUint::from((f.q() - 1).gcd(&3))
    } else {
        BigUint::one()
    };
    let case = ModuleCase {
        id: id.into(),
        field: f.clone(),
        dim,
        gens,
        group_order: sl.order.clone(),
        groups: vec![sl],
        kernel_order: kernel,
        form,
        invariants: InvariantKind::LiftedMatrix {
            n,
            quotient_by_scalars: n == 4,
        },
        subquotient: Some(sq),
        notes: vec![],
    };
    if n == 4 {
        check_hyperbolic_pairs(&case)?;
    }
    finish(case)
}

/// The classes of e_ij and e_ji form hyperbolic pairs for the sl4/<I> form.
fn check_hyperbolic_pairs(case: &ModuleCase) -> Result<()> {
    let f = &case.field;
    let n = 4;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let a = case.coords_of_matrix(&Matrix::unit(f, n, i, j)).unwrap();
            let b = case.coords_of_matrix(&Matrix::unit(f, n, j, i)).unwrap();
            if case.form.evaluate(&a)? != 0 || case.form.polar(&a, &b)? != 1 {
                return Err(OrbitaError::Consistency(format!(
                    "classes of e_{}{} and e_{}{} are not a hyperbolic pair",
                    i + 1,
                    j + 1,
                    j + 1,
                    i + 1
                )));
            }
        }
    }
    Ok(())
}

/// Sp4(q) conjugating its Lie algebra, for odd q.
fn build_adjoint_b2(field: &Field) -> Result<ModuleCase> {
    let f = field;
    if f.p() == 2 {
        return Err(OrbitaError::Refused("B2-adjoint needs odd characteristic".into()));
    }
    let sp = classical_generators(Family::Sp, 4, f.q())?;
    let omega = symplectic_gram(f, 4)?;
    let omega_inv = omega.inverse().unwrap();
    let mut w_basis = Vec::new();
    for a in 0..4 {
        for b in a..4 {
            let entries: &[(usize, usize, u32)] = if a == b { &[(a, a, 1)] } else { &[(a, b, 1), (b, a, 1)] };
            let s = Matrix::from_raw(f, 4, 4, unit_vec(4, entries, f))?;
            w_basis.push(omega_inv.mul(&s).data().to_vec());
        }
    }
    let sq = Subquotient::new(f, 16, &w_basis, &[])?;
    let gens = sp
        .generators
        .iter()
        .map(|g| sq.induced(&conjugation_action(g)?))
        .collect::<Result<Vec<_>>>()?;
    let form = unique_form("B2-adjoint", f, 10, &gens)?;
    finish(ModuleCase {
        id: "B2-adjoint".into(),
        field: f.clone(),
        dim: 10,
        gens,
        group_order: sp.order.clone(),
        groups: vec![sp],
        kernel_order: BigUint::from(2u32),
        form,
        invariants: InvariantKind::LiftedMatrix {
            n: 4,
            quotient_by_scalars: false,
        },
        subquotient: Some(sq),
        notes: vec![],
    })
}

/// Block matrix [[A, P], [R, A^T]] for the 8 x 8 ambient of the so8 module.
fn so8_vector(f: &FieldSpec, entries: &[(usize, usize, u32)]) -> Vec<u32> {
    unit_vec(8, entries, f)
}

/// The 27-dim subspace W of so8 (trace-zero A block) and its basis.
fn so8_w_basis(f: &FieldSpec) -> Vec<Vec<u32>> {
    let mut w = Vec::new();
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                // A = E_ij, A^T block = E_ji
                w.push(so8_vector(f, &[(i, j, 1), (4 + j, 4 + i, 1)]));
            }
        }
    }
    for i in 0..2 {
        w.push(so8_vector(f, &[(i, i, 1), (i + 1, i + 1, 1), (4 + i, 4 + i, 1), (5 + i, 5 + i, 1)]));
    }
    for i in 0..4 {
        for j in i + 1..4 {
            w.push(so8_vector(f, &[(i, 4 + j, 1), (j, 4 + i, 1)]));
        }
    }
    for i in 0..4 {
        for j in i + 1..4 {
            w.push(so8_vector(f, &[(4 + i, j, 1), (4 + j, i, 1)]));
        }
    }
    w
}

fn build_d4(field: &Field) -> Result<ModuleCase> {
    let f = field;
    if f.q() != 2 {
        return Err(OrbitaError::Refused("D4-so8-p2 is provided over GF(2) only".into()));
    }
    let omega = classical_generators(Family::OmegaPlus, 8, 2)?;
    let mut w_basis = so8_w_basis(f);
    let id8 = so8_vector(f, &(0..8).map(|i| (i, i, 1)).collect::<Vec<_>>());
    // The full W also contains I; check the claimed dimension before quotienting.
    let mut with_id = w_basis.clone();
    with_id.push(id8.clone());
    let w_dim = Matrix::from_raw(f, with_id.len(), 64, with_id.concat())?.rank();
    if w_dim != 27 {
        return Err(OrbitaError::Consistency(format!("so8 subspace W has dimension {w_dim}")));
    }
    w_basis.push(id8.clone());
    let sq = Subquotient::new(f, 64, &w_basis, &[id8])?;
    let gens = omega
        .generators
        .iter()
        .map(|g| sq.induced(&conjugation_action(g)?))
        .collect::<Result<Vec<_>>>()?;
    let form = unique_form("D4-so8-p2", f, 26, &gens)?;
    finish(ModuleCase {
        id: "D4-so8-p2".into(),
        field: f.clone(),
        dim: 26,
        gens,
        group_order: omega.order.clone(),
        groups: vec![omega],
        kernel_order: BigUint::one(),
        form,
        invariants: InvariantKind::LiftedMatrix {
            n: 8,
            quotient_by_scalars: true,
        },
        subquotient: Some(sq),
        notes: vec![],
    })
}

/// Second compound: the action of g on the exterior square, basis x_a ^ x_b (a < b).
pub fn exterior_square(g: &Matrix) -> Matrix {
    let f = g.field();
    let n = g.rows();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let mut m = Matrix::zeros(f, pairs.len(), pairs.len());
    for (col, &(a, b)) in pairs.iter().enumerate() {
        for (row, &(c, d)) in pairs.iter().enumerate() {
            let v = f.sub(f.mul(g.get(c, a), g.get(d, b)), f.mul(g.get(d, a), g.get(c, b)));
            m.set(row, col, v);
        }
    }
    m
}

/// Kernel of the symplectic contraction on the exterior square, modulo omega
/// when omega lies in it, as a subquotient of the exterior square.
pub fn lambda2_subquotient(field: &Field, n: usize) -> Result<Subquotient> {
    let f = field;
    let dim = 2 * n;
    let omega = symplectic_gram(f, dim)?;
    let pairs: Vec<(usize, usize)> = (0..dim).flat_map(|a| (a + 1..dim).map(move |b| (a, b))).collect();
    let contraction: Vec<u32> = pairs.iter().map(|&(a, b)| omega.get(a, b)).collect();
    let w_basis = Matrix::from_raw(f, 1, pairs.len(), contraction.clone())?.kernel();
    let omega_vec: Vec<u32> = pairs
        .iter()
        .map(|&(a, b)| if b == dim - 1 - a { 1 } else { 0 })
        .collect();
    let c_omega = contraction
        .iter()
        .zip(&omega_vec)
        .fold(0, |acc, (&x, &y)| f.add(acc, f.mul(x, y)));
    let u_basis = if c_omega == 0 { vec![omega_vec] } else { vec![] };
    Subquotient::new(f, pairs.len(), &w_basis, &u_basis)
}

/// Sp_{2n} on the reduced exterior square.
pub fn build_lambda2_sp(field: &Field, n: usize) -> Result<ModuleCase> {
    let f = field;
    let id = match n {
        3 if f.p() == 3 => {
            return Err(OrbitaError::Refused("C3-lambda2 excludes characteristic 3".into()))
        }
        3 => "C3-lambda2",
        4 if f.p() != 2 => {
            return Err(OrbitaError::Refused("C4-lambda2-p2 needs characteristic 2".into()))
        }
        4 => "C4-lambda2-p2",
        _ => return Err(OrbitaError::Refused(format!("C{n} lambda2 is not provided"))),
    };
    let sp = classical_generators(Family::Sp, 2 * n, f.q())?;
    lambda2_case(id, f, n, sp.generators.clone(), vec![sp])
}

/// Reduced exterior square for arbitrary generators preserving the symplectic form.
pub fn lambda2_case(id: &str, f: &Field, n: usize, group_gens: Vec<Matrix>, groups: Vec<GroupSpec>) -> Result<ModuleCase> {
    let sq = lambda2_subquotient(f, n)?;
    let gens = group_gens
        .iter()
        .map(|g| sq.induced(&exterior_square(g)))
        .collect::<Result<Vec<_>>>()?;
    let dim = sq.dim();
    let form = unique_form(id, f, dim, &gens)?;
    let group_order = groups.iter().map(|g| g.order.clone()).product::<BigUint>();
    let kernel = if f.p() == 2 { 1u32 } else { 2 };
    finish(ModuleCase {
        id: id.into(),
        field: f.clone(),
        dim,
        gens,
        group_order,
        groups,
        kernel_order: BigUint::from(kernel),
        form,
        invariants: InvariantKind::None,
        subquotient: Some(sq),
        notes: vec![],
    })
}

/// Kronecker product.
pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let f = a.field();
    let (ar, ac, br, bc) = (a.rows(), a.cols(), b.rows(), b.cols());
    let mut m = Matrix::zeros(f, ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let x = a.get(i, j);
            if x == 0 {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    m.set(i * br + k, j * bc + l, f.mul(x, b.get(k, l)));
                }
            }
        }
    }
    m
}

/// The product form on m x n matrices:
/// Q(A) = sum_{i <= m/2} sum_j eps_j a_{i,j} a_{m+1-i, n+1-j}, eps_j = +1 for j <= n/2, else -1.
pub fn tensor_form(field: &Field, m: usize, n: usize) -> Result<QuadraticForm> {
    let f = field;
    let mut a = Matrix::zeros(f, m * n, m * n);
    for i in 0..m / 2 {
        for j in 0..n {
            let eps = if j < n / 2 { 1 } else { f.neg(1) };
            a.set(i * n + j, (m - 1 - i) * n + (n - 1 - j), eps);
        }
    }
    QuadraticForm::from_matrix(&a)
}

fn build_tensor_spsp(field: &Field, m: usize, n: usize, id: &str) -> Result<ModuleCase> {
    let f = field;
    if m % 2 == 1 || n % 2 == 1 || m < 4 || n < 4 {
        return Err(OrbitaError::Refused(format!(
            "{id}: symplectic degrees must be even and at least 4, got {m} and {n}"
        )));
    }
    let g1 = classical_generators(Family::Sp, m, f.q())?;
    let g2 = classical_generators(Family::Sp, n, f.q())?;
    let mut gens: Vec<Matrix> = g1
        .generators
        .iter()
        .map(|g| kron(g, &Matrix::identity(f, n)))
        .collect();
    gens.extend(g2.generators.iter().map(|h| kron(&Matrix::identity(f, m), h)));
    let form = tensor_form(f, m, n)?;
    let mut case = ModuleCase {
        id: id.into(),
        field: f.clone(),
        dim: m * n,
        gens,
        group_order: &g1.order * &g2.order,
        groups: vec![g1, g2],
        kernel_order: BigUint::from(if f.p() == 2 { 1u32 } else { 4 }),
        form,
        invariants: InvariantKind::TensorRank { rows: m, cols: n },
        subquotient: None,
        notes: vec![],
    };
    // The solver is quadratic in dim^2; run it where that is cheap.
    if m * n <= 24 {
        let solved = unique_form(id, f, m * n, &case.gens)?;
        let lead = first_nonzero(&case.form);
        if case.form.scale(f.inv(lead).unwrap()) != solved {
            return Err(OrbitaError::Consistency(format!(
                "{id}: solved form is not a multiple of the product form"
            )));
        }
        case.notes.push("invariant form space is one-dimensional".into());
    }
    finish(case)
}

fn first_nonzero(q: &QuadraticForm) -> u32 {
    let u = q.upper();
    let n = u.rows();
    (0..n)
        .flat_map(|i| (i..n).map(move |j| (i, j)))
        .map(|(i, j)| u.get(i, j))
        .find(|&x| x != 0)
        .unwrap_or(1)
}

/// Omega8+(2) generators rewritten in the symplectic ordering e1..e4, f4..f1.
pub fn d4_inside_sp8() -> Result<Vec<Matrix>> {
    let omega = classical_generators(Family::OmegaPlus, 8, 2)?;
    let f = omega.field.clone();
    // x_i -> position i, x_{4+i} -> position 7-i
    let pos = |k: usize| if k < 4 { k } else { 7 - (k - 4) };
    let mut p = Matrix::zeros(&f, 8, 8);
    for k in 0..8 {
        p.set(pos(k), k, 1);
    }
    let pinv = p.transpose();
    Ok(omega.generators.iter().map(|g| p.mul(g).mul(&pinv)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sym4_over_gf5() {
        let c = build_case("A1-sym4", 5, None).unwrap();
        assert_eq!(c.dim, 5);
        assert_eq!(c.form.count_singular_points(1 << 20).unwrap(), 156);
        assert!(matches!(build_case("A1-sym4", 3, None), Err(OrbitaError::Refused(_))));
    }

    #[test]
    fn adjoint_dims() {
        assert_eq!(build_case("A2-adjoint", 2, None).unwrap().dim, 8);
        assert_eq!(build_case("B2-adjoint", 5, None).unwrap().dim, 10);
        assert!(build_case("A2-adjoint", 3, None).is_err());
        assert!(build_case("B2-adjoint", 4, None).is_err());
    }

    #[test]
    fn a3_gf4_named_point_singular() {
        let c = build_case("A3-adjoint-p2", 4, None).unwrap();
        assert_eq!(c.dim, 14);
        let p = &c.named_points()[0];
        let v = p.coords.as_ref().unwrap();
        assert_eq!(c.form.evaluate(v).unwrap(), 0);
        assert!(c.form.radical().nondegenerate);
    }

    #[test]
    fn lambda2_dims() {
        assert_eq!(build_case("C3-lambda2", 2, None).unwrap().dim, 14);
        assert_eq!(build_case("C3-lambda2", 5, None).unwrap().dim, 14);
        assert_eq!(build_case("C4-lambda2-p2", 2, None).unwrap().dim, 26);
    }

    #[test]
    fn tensor_form_values() {
        let f7 = FieldSpec::new(7).unwrap();
        let q = tensor_form(&f7, 4, 4).unwrap();
        let mut id = vec![0; 16];
        for i in 0..4 {
            id[i * 5] = 1;
        }
        assert_eq!(q.evaluate(&id).unwrap(), 2);
        let mut e11 = vec![0; 16];
        e11[0] = 1;
        assert_eq!(q.evaluate(&e11).unwrap(), 0);
        let q6 = tensor_form(&f7, 6, 6).unwrap();
        let d = [1u32, 2, 3, 4, 5, 6];
        let mut v = vec![0; 36];
        for i in 0..6 {
            v[i * 7] = d[i];
        }
        let expect = (1 * 6 + 2 * 5 + 3 * 4) % 7;
        assert_eq!(q6.evaluate(&v).unwrap(), expect);
    }

    #[test]
    fn sp4_sp4_cases_build() {
        let c = build_case("Sp4xSp4", 2, None).unwrap();
        assert_eq!(c.dim, 16);
        for p in c.named_points() {
            assert_eq!(c.form.evaluate(p.coords.as_ref().unwrap()).unwrap(), 0, "{}", p.name);
        }
        let c7 = build_case("Sp4xSp4", 7, None).unwrap();
        assert_eq!(c7.kernel_order, BigUint::from(4u32));
    }

    #[test]
    fn unknown_case() {
        assert!(matches!(build_case("G2-adjoint", 2, None), Err(OrbitaError::Usage(_))));
    }
}
