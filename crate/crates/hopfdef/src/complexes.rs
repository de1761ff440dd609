//! The six deformation complexes as sparse differential matrices.
//!
//! A cochain of bidegree `(p, q)` (or tridegree `(p, q, r)`) is stored as a
//! map `S -> T` between tensor powers, with coordinates `s * dim T + t`:
//!
//! | kind | source            | target        |
//! |------|-------------------|---------------|
//! | MA   | `H^q (x) A^p`     | `A`           |
//! | MC   | `H^q (x) A`       | `A^p`         |
//! | CA   | `A^p`             | `H^q (x) A`   |
//! | CC   | `A`               | `H^q (x) A^p` |
//! | MB   | `H^r (x) A^p`     | `A^q`         |
//! | CB   | `A^p`             | `H^r (x) A^q` |
//!
//! With these layouts the boundary planes of the tricomplexes use literally
//! the same coordinates as the bicomplexes.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact_linalg::{kernel_basis, ExactScalar, FieldSpec, LinalgError, SparseMatrix};
use crate::hopf_structures::{Kind, StructureError, StructurePackage};
use crate::tensor_calculus::{sp_permutation, sp_sandwich, sp_tensor_all, sp_twist, Tag, TensorBasis, TensorError};

#[derive(Debug, Error)]
pub enum ComplexError {
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, ComplexError>;

/// `(p, q, r)`; bicomplexes use `r = 0`.
pub type Degree = [usize; 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Direction {
    Horizontal,
    Vertical,
    I,
    II,
    III,
}

impl Direction {
    /// Which coordinate of the degree this direction raises.
    pub fn axis(self) -> usize {
        match self {
            Direction::Horizontal | Direction::I => 0,
            Direction::Vertical | Direction::II => 1,
            Direction::III => 2,
        }
    }

    pub fn step(self, d: Degree) -> Degree {
        let mut out = d;
        out[self.axis()] += 1;
        out
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Direction::Horizontal => "d",
            Direction::Vertical => "b",
            Direction::I => "d_I",
            Direction::II => "d_II",
            Direction::III => "d_III",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Corner {
    Zero,
    Der,
    Coder,
    Bider,
    Full,
}

/// How the degree-1 corner enters a total complex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CornerMode {
    /// Der/Coder/Bider.
    Corner,
    /// The whole `Hom(A, A)`.
    Full,
}

fn pow(b: usize, e: usize) -> usize {
    b.pow(e as u32)
}

/// Source and target dimensions of a cochain space.
pub fn space_shape(kind: Kind, h: usize, a: usize, d: Degree) -> (usize, usize) {
    let [p, q, r] = d;
    match kind {
        Kind::MA => (pow(h, q) * pow(a, p), a),
        Kind::MC => (pow(h, q) * a, pow(a, p)),
        Kind::CA => (pow(a, p), pow(h, q) * a),
        Kind::CC => (a, pow(h, q) * pow(a, p)),
        Kind::MB => (pow(h, r) * pow(a, p), pow(a, q)),
        Kind::CB => (pow(a, p), pow(h, r) * pow(a, q)),
    }
}

/// The tensor bases of a cochain space.
pub fn space_bases(kind: Kind, h: usize, a: usize, d: Degree) -> (TensorBasis, TensorBasis) {
    let [p, q, r] = d;
    let hp = |n| TensorBasis::power(Tag::H, h, n);
    let ap = |n| TensorBasis::power(Tag::A, a, n);
    match kind {
        Kind::MA => (hp(q).concat(&ap(p)), ap(1)),
        Kind::MC => (hp(q).concat(&ap(1)), ap(p)),
        Kind::CA => (ap(p), hp(q).concat(&ap(1))),
        Kind::CC => (ap(1), hp(q).concat(&ap(p))),
        Kind::MB => (hp(r).concat(&ap(p)), ap(q)),
        Kind::CB => (ap(p), hp(r).concat(&ap(q))),
    }
}

pub fn is_zero_space(kind: Kind, d: Degree) -> bool {
    d[0] == 0 || (kind.is_tricomplex() && d[1] == 0)
}

pub fn corner_degree(kind: Kind) -> Degree {
    if kind.is_tricomplex() {
        [1, 1, 0]
    } else {
        [1, 0, 0]
    }
}

pub fn corner_flag(kind: Kind) -> Corner {
    match kind {
        Kind::MA | Kind::CA => Corner::Der,
        Kind::MC | Kind::CC => Corner::Coder,
        Kind::MB | Kind::CB => Corner::Bider,
    }
}

/// Total degree of a grid entry: `p + q` for bicomplexes, `p + q + r - 1`
/// for tricomplexes.
pub fn total_degree(kind: Kind, d: Degree) -> usize {
    if kind.is_tricomplex() {
        d[0] + d[1] + d[2] - 1
    } else {
        d[0] + d[1]
    }
}

pub fn directions(kind: Kind) -> &'static [Direction] {
    if kind.is_tricomplex() {
        &[Direction::I, Direction::II, Direction::III]
    } else {
        &[Direction::Horizontal, Direction::Vertical]
    }
}

/// Every nonzero grid degree of total degree at most `max_total`.
pub fn grid(kind: Kind, max_total: usize) -> Vec<Degree> {
    let mut out = Vec::new();
    if kind.is_tricomplex() {
        for p in 1..=max_total {
            for q in 1..=max_total + 1 - p {
                for r in 0..=max_total + 1 - p - q {
                    out.push([p, q, r]);
                }
            }
        }
    } else {
        for p in 1..=max_total {
            for q in 0..=max_total - p {
                out.push([p, q, 0]);
            }
        }
    }
    out
}

/// Largest cochain space a build at `cutoff` would allocate.
pub fn max_space_dim(kind: Kind, h: usize, a: usize, cutoff: usize) -> usize {
    grid(kind, cutoff + 1)
        .into_iter()
        .map(|d| {
            let (s, t) = space_shape(kind, h, a, d);
            s.saturating_mul(t)
        })
        .max()
        .unwrap_or(0)
}

/// The sign in front of a raw differential leaving degree `d`.
pub fn outer_sign(kind: Kind, dir: Direction, d: Degree) -> i8 {
    let odd = |n: usize| if n % 2 == 1 { -1 } else { 1 };
    let [p, q, r] = d;
    let _ = kind;
    match dir {
        Direction::Horizontal => 1,
        Direction::Vertical => odd(p + 1),
        Direction::I => odd(q + 1),
        Direction::II => odd(r + 1),
        Direction::III => odd(p + 1),
    }
}

/// The structure maps of a package as sparse matrices, with the iterated
/// maps the clause formulas need.
#[derive(Debug, Clone)]
pub struct Maps {
    pub field: FieldSpec,
    pub h: usize,
    pub a: usize,
    pub mu_h: SparseMatrix,
    pub delta_h: SparseMatrix,
    pub unit_h: SparseMatrix,
    pub eps_h: SparseMatrix,
    pub mu_a: Option<SparseMatrix>,
    pub unit_a: Option<SparseMatrix>,
    pub delta_a: Option<SparseMatrix>,
    pub eps_a: Option<SparseMatrix>,
    pub lambda: Option<SparseMatrix>,
    pub rho: Option<SparseMatrix>,
}

fn missing(what: &str) -> ComplexError {
    ComplexError::Invalid(format!("the package has no {what}"))
}

impl Maps {
    pub fn from_package(pkg: &StructurePackage) -> Self {
        let sp = |m: &crate::tensor_calculus::LinMap| SparseMatrix::from_dense(m.matrix());
        Maps {
            field: pkg.field(),
            h: pkg.h.dim(),
            a: pkg.a_dim(),
            mu_h: sp(pkg.h.mul()),
            delta_h: sp(pkg.h.comul()),
            unit_h: sp(pkg.h.unit()),
            eps_h: sp(pkg.h.counit()),
            mu_a: pkg.algebra.as_ref().map(|x| sp(x.mul())),
            unit_a: pkg.algebra.as_ref().and_then(|x| x.unit().map(sp)),
            delta_a: pkg.coalgebra.as_ref().map(|x| sp(x.comul())),
            eps_a: pkg.coalgebra.as_ref().and_then(|x| x.counit().map(sp)),
            lambda: pkg.action.as_ref().map(|x| sp(x.map())),
            rho: pkg.coaction.as_ref().map(|x| sp(x.map())),
        }
    }

    pub fn id(&self, n: usize) -> SparseMatrix {
        SparseMatrix::identity(self.field, n)
    }

    pub fn hp(&self, n: usize) -> usize {
        pow(self.h, n)
    }

    pub fn ap(&self, n: usize) -> usize {
        pow(self.a, n)
    }

    pub fn mu(&self) -> Result<&SparseMatrix> {
        self.mu_a.as_ref().ok_or_else(|| missing("multiplication on A"))
    }

    pub fn delta(&self) -> Result<&SparseMatrix> {
        self.delta_a.as_ref().ok_or_else(|| missing("comultiplication on A"))
    }

    pub fn lam(&self) -> Result<&SparseMatrix> {
        self.lambda.as_ref().ok_or_else(|| missing("action"))
    }

    pub fn coact(&self) -> Result<&SparseMatrix> {
        self.rho.as_ref().ok_or_else(|| missing("coaction"))
    }

    pub fn t(&self, maps: &[&SparseMatrix]) -> SparseMatrix {
        sp_tensor_all(self.field, maps)
    }

    fn perm(&self, dims: &[usize], order: &[usize]) -> SparseMatrix {
        sp_permutation(self.field, dims, order)
    }

    /// `x_1..x_q -> sum x_1(1)...x_q(1) (x) x_1(2) (x) ... (x) x_q(2)`.
    pub fn hsplit_left(&self, q: usize) -> SparseMatrix {
        let h = self.h;
        let mut acc = self.unit_h.clone();
        for k in 0..q {
            let hk = self.hp(k);
            let step = self.t(&[&acc, &self.delta_h]);
            let step = mul(&self.perm(&[h, hk, h, h], &[0, 2, 1, 3]), &step);
            acc = mul(&self.t(&[&self.mu_h, &self.id(hk * h)]), &step);
        }
        acc
    }

    /// `x_1..x_q -> sum x_1(1) (x) ... (x) x_q(1) (x) x_1(2)...x_q(2)`.
    pub fn hsplit_right(&self, q: usize) -> SparseMatrix {
        let h = self.h;
        let mut acc = self.unit_h.clone();
        for k in 0..q {
            let hk = self.hp(k);
            let step = self.t(&[&acc, &self.delta_h]);
            let step = mul(&self.perm(&[hk, h, h, h], &[0, 2, 1, 3]), &step);
            acc = mul(&self.t(&[&self.id(hk * h), &self.mu_h]), &step);
        }
        acc
    }

    /// `mu_H^q: H^q -> H`, the unit for `q = 0`.
    pub fn hprod(&self, q: usize) -> SparseMatrix {
        if q == 0 {
            return self.unit_h.clone();
        }
        let mut acc = self.id(self.h);
        for _ in 1..q {
            acc = mul(&self.mu_h, &self.t(&[&acc, &self.id(self.h)]));
        }
        acc
    }

    /// `Delta_H^(q-1): H -> H^q`, the counit for `q = 0`.
    pub fn hcoprod(&self, q: usize) -> SparseMatrix {
        if q == 0 {
            return self.eps_h.clone();
        }
        let mut acc = self.id(self.h);
        for k in 1..q {
            acc = mul(&self.t(&[&self.delta_h, &self.id(self.hp(k - 1))]), &acc);
        }
        acc
    }

    /// `mu_A^p: A^p -> A`; `p = 0` needs a unit.
    pub fn aprod(&self, p: usize) -> Result<SparseMatrix> {
        if p == 0 {
            return self.unit_a.clone().ok_or_else(|| missing("unit on A"));
        }
        let mu = self.mu()?;
        let mut acc = self.id(self.a);
        for _ in 1..p {
            acc = mul(mu, &self.t(&[&acc, &self.id(self.a)]));
        }
        Ok(acc)
    }

    /// `Delta_A^(q-1): A -> A^q`; `q = 0` needs a counit.
    pub fn acoprod(&self, q: usize) -> Result<SparseMatrix> {
        if q == 0 {
            return self.eps_a.clone().ok_or_else(|| missing("counit on A"));
        }
        let delta = self.delta()?;
        let mut acc = self.id(self.a);
        for k in 1..q {
            acc = mul(&self.t(&[delta, &self.id(self.ap(k - 1))]), &acc);
        }
        Ok(acc)
    }

    /// Diagonal action `H (x) A^p -> A^p`,
    /// `x (x) a_1..a_p -> lambda(x_(1))a_1 (x) ... (x) lambda(x_(p))a_p`.
    pub fn diag_action(&self, p: usize) -> Result<SparseMatrix> {
        let lam = self.lam()?;
        let (h, a) = (self.h, self.a);
        let mut acc = self.eps_h.clone();
        for k in 0..p {
            let ak = self.ap(k);
            let split = self.t(&[&self.delta_h, &self.id(ak * a)]);
            let split = mul(&self.perm(&[h, h, ak, a], &[0, 2, 1, 3]), &split);
            acc = mul(&self.t(&[&acc, lam]), &split);
        }
        Ok(acc)
    }

    /// `lambda(x_1...x_q)(a)` as a map `H^q (x) A -> A`.
    pub fn iterated_action(&self, q: usize) -> Result<SparseMatrix> {
        Ok(mul(self.lam()?, &self.t(&[&self.hprod(q), &self.id(self.a)])))
    }

    /// `rho^p: A^p -> H (x) A^p`, the unit of `H` for `p = 0`.
    pub fn rho_pow(&self, p: usize) -> Result<SparseMatrix> {
        let rho = self.coact()?;
        let (h, a) = (self.h, self.a);
        let mut acc = self.unit_h.clone();
        for k in 0..p {
            let ak = self.ap(k);
            let step = self.t(&[&acc, rho]);
            let step = mul(&self.perm(&[h, ak, h, a], &[0, 2, 1, 3]), &step);
            acc = mul(&self.t(&[&self.mu_h, &self.id(ak * a)]), &step);
        }
        Ok(acc)
    }

    /// `Delta_(A^p): A^p -> A^p (x) A^p`.
    pub fn delta_pow(&self, p: usize) -> Result<SparseMatrix> {
        Ok(self.diag_pow(self.delta()?, self.a, p))
    }

    /// `Delta_(H^q): H^q -> H^q (x) H^q`.
    pub fn delta_hpow(&self, q: usize) -> SparseMatrix {
        self.diag_pow(&self.delta_h, self.h, q)
    }

    fn diag_pow(&self, delta: &SparseMatrix, x: usize, n: usize) -> SparseMatrix {
        let mut acc = self.id(1);
        for k in 0..n {
            let xk = pow(x, k);
            let step = self.t(&[&acc, delta]);
            acc = mul(&self.perm(&[xk, xk, x, x], &[0, 2, 1, 3]), &step);
        }
        acc
    }

    /// Componentwise product `X^n (x) X^n -> X^n` for `mu: X (x) X -> X`.
    fn componentwise(&self, mu: &SparseMatrix, x: usize, n: usize) -> SparseMatrix {
        let dims = vec![x; 2 * n];
        let order: Vec<usize> = (0..n).flat_map(|i| [i, n + i]).collect();
        let mus: Vec<&SparseMatrix> = (0..n).map(|_| mu).collect();
        mul(&self.t(&mus), &self.perm(&dims, &order))
    }

    pub fn mu_apow(&self, n: usize) -> Result<SparseMatrix> {
        Ok(self.componentwise(self.mu()?, self.a, n))
    }

    pub fn mu_hpow(&self, n: usize) -> SparseMatrix {
        self.componentwise(&self.mu_h, self.h, n)
    }

    /// `mu^q_(l,A): A (x) A^q -> A^q`, `a (x) y -> a_(1)y_1 (x) ... (x) a_(q)y_q`.
    pub fn mu_l_a(&self, q: usize) -> Result<SparseMatrix> {
        Ok(mul(&self.mu_apow(q)?, &self.t(&[&self.acoprod(q)?, &self.id(self.ap(q))])))
    }

    /// `mu^q_(r,A): A^q (x) A -> A^q`.
    pub fn mu_r_a(&self, q: usize) -> Result<SparseMatrix> {
        Ok(mul(&self.mu_apow(q)?, &self.t(&[&self.id(self.ap(q)), &self.acoprod(q)?])))
    }

    /// `mu^q_(l,H): H (x) H^q -> H^q`; the counit for `q = 0`.
    pub fn mu_l_h(&self, q: usize) -> SparseMatrix {
        mul(&self.mu_hpow(q), &self.t(&[&self.hcoprod(q), &self.id(self.hp(q))]))
    }

    /// `mu^q_(r,H): H^q (x) H -> H^q`.
    pub fn mu_r_h(&self, q: usize) -> SparseMatrix {
        mul(&self.mu_hpow(q), &self.t(&[&self.id(self.hp(q)), &self.hcoprod(q)]))
    }
}

pub(crate) fn mul(a: &SparseMatrix, b: &SparseMatrix) -> SparseMatrix {
    a.mul(b).expect("compatible structure maps")
}

fn sandwich(q: &SparseMatrix, p: &SparseMatrix, s: usize, t: usize, u: usize, v: usize) -> Result<SparseMatrix> {
    Ok(sp_sandwich(q, p, s, t, u, v)?)
}

/// Left action of `H` on `Hom(X, Y)` by post-composition with
/// `L: H (x) Y -> Y`, as a matrix `H (x) M -> M`.
pub fn hom_post(l: &SparseMatrix, h: usize, x: usize, y: usize) -> SparseMatrix {
    let m = x * y;
    let mut columns = vec![Vec::new(); h * m];
    for xh in 0..h {
        for s in 0..x {
            for t in 0..y {
                columns[xh * m + s * y + t] =
                    l.column(xh * y + t).iter().map(|(t2, v)| (s * y + t2, v.clone())).collect();
            }
        }
    }
    SparseMatrix::from_column_entries(l.field(), m, columns)
}

/// Right action of `H` on `Hom(X, Y)` by pre-composition with
/// `R: H (x) X -> X`, as a matrix `M (x) H -> M`.
pub fn hom_pre(r: &SparseMatrix, h: usize, x: usize, y: usize) -> SparseMatrix {
    let m = x * y;
    let mut columns = vec![Vec::new(); m * h];
    for xh in 0..h {
        for s in 0..x {
            for (s2, v) in r.column(xh * x + s) {
                for t in 0..y {
                    columns[(s2 * y + t) * h + xh].push((s * y + t, v.clone()));
                }
            }
        }
    }
    SparseMatrix::from_column_entries(r.field(), m, columns)
}

/// An `X`-bimodule `M`: `left: X (x) M -> M`, `right: M (x) X -> M`.
#[derive(Debug, Clone)]
pub struct BimoduleStructure {
    pub dim: usize,
    pub left: SparseMatrix,
    pub right: SparseMatrix,
}

impl BimoduleStructure {
    /// Associativity of both actions and their commutation, for the algebra
    /// `mu: X (x) X -> X`.
    pub fn verify(&self, mu: &SparseMatrix) -> Vec<(String, bool)> {
        let f = mu.field();
        let (x, m) = (mu.rows(), self.dim);
        let id = |n| SparseMatrix::identity(f, n);
        let l1 = mul(&self.left, &mu.kron(&id(m)).unwrap());
        let l2 = mul(&self.left, &id(x).kron(&self.left).unwrap());
        let r1 = mul(&self.right, &id(m).kron(mu).unwrap());
        let r2 = mul(&self.right, &self.right.kron(&id(x)).unwrap());
        let c1 = mul(&self.left, &id(x).kron(&self.right).unwrap());
        let c2 = mul(&self.right, &self.left.kron(&id(x)).unwrap());
        vec![
            ("left action is associative".into(), l1 == l2),
            ("right action is associative".into(), r1 == r2),
            ("actions commute".into(), c1 == c2),
        ]
    }
}

/// Clauses `delta_h^n[0..=n+1]` of the Hochschild coboundary of the algebra
/// `mu` (on a space of dimension `x`) with coefficients in `m`.
pub fn hochschild_clauses(mu: &SparseMatrix, x: usize, m: &BimoduleStructure, n: usize) -> Result<Vec<SparseMatrix>> {
    let f = mu.field();
    let id = |k| SparseMatrix::identity(f, k);
    let s = pow(x, n);
    let mut out = Vec::with_capacity(n + 2);
    out.push(sandwich(&id(s * x), &m.left, s, m.dim, x, 1)?);
    for i in 1..=n {
        let q = sp_tensor_all(f, &[&id(pow(x, i - 1)), mu, &id(pow(x, n - i))]);
        out.push(sandwich(&q, &id(m.dim), s, m.dim, 1, 1)?);
    }
    out.push(sandwich(&id(s * x), &m.right, s, m.dim, 1, x)?);
    Ok(out)
}

/// Clauses of the coalgebra Hochschild coboundary
/// `delta_c sigma = (Id (x) sigma)psi_l + sum (-1)^i (..Delta..)sigma + (-1)^(n+1)(sigma (x) Id)psi_r`
/// for `sigma: M -> C^n`, `psi_l: M -> C (x) M`, `psi_r: M -> M (x) C`.
pub fn coalgebra_hochschild_clauses(
    delta: &SparseMatrix,
    c: usize,
    psi_l: &SparseMatrix,
    psi_r: &SparseMatrix,
    m: usize,
    n: usize,
) -> Result<Vec<SparseMatrix>> {
    let f = delta.field();
    let id = |k| SparseMatrix::identity(f, k);
    let t = pow(c, n);
    let mut out = Vec::with_capacity(n + 2);
    out.push(sandwich(psi_l, &id(c * t), m, t, c, 1)?);
    for i in 1..=n {
        let p = sp_tensor_all(f, &[&id(pow(c, i - 1)), delta, &id(pow(c, n - i))]);
        out.push(sandwich(&id(m), &p, m, t, 1, 1)?);
    }
    out.push(sandwich(psi_r, &id(c * t), m, t, 1, c)?);
    Ok(out)
}

/// Alternating sum of clauses with the given signs.
pub fn alternating_sum(field: FieldSpec, clauses: &[SparseMatrix], signs: &[i8]) -> SparseMatrix {
    let mut acc = SparseMatrix::zeros(field, clauses[0].rows(), clauses[0].cols());
    for (c, &s) in clauses.iter().zip(signs) {
        acc = acc.add_scaled(c, &field.from_i64(s as i64)).expect("same shape");
    }
    acc
}

fn alternating_signs(n: usize) -> Vec<i8> {
    (0..n).map(|i| if i % 2 == 0 { 1 } else { -1 }).collect()
}

/// `delta_h^n` of an algebra with coefficients in a bimodule.
pub fn hochschild_diff(mu: &SparseMatrix, x: usize, m: &BimoduleStructure, n: usize) -> Result<DifferentialMatrix> {
    let clauses = hochschild_clauses(mu, x, m, n)?;
    Ok(DifferentialMatrix::new(mu.field(), [n, 0, 0], [n + 1, 0, 0], Direction::Horizontal, clauses, 1))
}

/// `delta_c^n`; degree 0 is set to zero, so `n >= 1`.
pub fn hochschild_coalg_diff(
    delta: &SparseMatrix,
    c: usize,
    psi_l: &SparseMatrix,
    psi_r: &SparseMatrix,
    m: usize,
    n: usize,
) -> Result<DifferentialMatrix> {
    if n == 0 {
        return Err(ComplexError::Invalid("coalgebra Hochschild cochains start in degree 1".into()));
    }
    let clauses = coalgebra_hochschild_clauses(delta, c, psi_l, psi_r, m, n)?;
    Ok(DifferentialMatrix::new(delta.field(), [n, 0, 0], [n + 1, 0, 0], Direction::Horizontal, clauses, 1))
}

fn kernel_columns(m: &SparseMatrix) -> SparseMatrix {
    let f = m.field();
    let ker = kernel_basis(&m.to_dense());
    let columns = ker
        .into_iter()
        .map(|v| v.into_iter().enumerate().filter(|(_, x)| !f.is_zero(x)).collect())
        .collect();
    SparseMatrix::from_column_entries(f, m.cols(), columns)
}

fn der_condition(maps: &Maps) -> Result<SparseMatrix> {
    let mu = maps.mu()?;
    let bm = BimoduleStructure { dim: maps.a, left: mu.clone(), right: mu.clone() };
    Ok(hochschild_diff(mu, maps.a, &bm, 1)?.raw)
}

fn coder_condition(maps: &Maps) -> Result<SparseMatrix> {
    let d = maps.delta()?;
    Ok(hochschild_coalg_diff(d, maps.a, d, d, maps.a, 1)?.raw)
}

/// Basis of `Der(A)` as columns in `Hom(A, A)` coordinates.
pub fn der_subspace(maps: &Maps) -> Result<SparseMatrix> {
    Ok(kernel_columns(&der_condition(maps)?))
}

/// Basis of `Coder(A)`.
pub fn coder_subspace(maps: &Maps) -> Result<SparseMatrix> {
    Ok(kernel_columns(&coder_condition(maps)?))
}

/// Basis of `Bider(A) = Der(A) ∩ Coder(A)`.
pub fn bider_subspace(maps: &Maps) -> Result<SparseMatrix> {
    let a = der_condition(maps)?.transpose();
    let b = coder_condition(maps)?.transpose();
    let stacked = a.embed(a.rows(), a.cols() + b.cols(), 0, 0).add(&b.embed(b.rows(), a.cols() + b.cols(), 0, a.cols()))?;
    Ok(kernel_columns(&stacked.transpose()))
}

/// One grid entry.
#[derive(Debug, Clone)]
pub struct HomSpace {
    pub kind: Kind,
    pub degree: Degree,
    pub src: TensorBasis,
    pub dst: TensorBasis,
    pub corner: Corner,
    /// Columns spanning the corner inside the full coordinates.
    pub corner_basis: Option<SparseMatrix>,
}

impl HomSpace {
    /// Dimension of the full Hom space.
    pub fn dim(&self) -> usize {
        if self.corner == Corner::Zero {
            0
        } else {
            self.src.dim() * self.dst.dim()
        }
    }

    pub fn dim_in(&self, mode: CornerMode) -> usize {
        match (&self.corner_basis, mode) {
            (Some(b), CornerMode::Corner) => b.cols(),
            _ => self.dim(),
        }
    }
}

/// One family of differentials between adjacent grid entries. Clauses are
/// kept individually; `raw` is their signed alternating sum and `sign` the
/// outer sign.
#[derive(Debug, Clone)]
pub struct DifferentialMatrix {
    pub src: Degree,
    pub dst: Degree,
    pub direction: Direction,
    pub clauses: Vec<SparseMatrix>,
    pub clause_signs: Vec<i8>,
    pub raw: SparseMatrix,
    pub sign: i8,
}

impl DifferentialMatrix {
    fn new(field: FieldSpec, src: Degree, dst: Degree, direction: Direction, clauses: Vec<SparseMatrix>, sign: i8) -> Self {
        let clause_signs = alternating_signs(clauses.len());
        let raw = alternating_sum(field, &clauses, &clause_signs);
        DifferentialMatrix { src, dst, direction, clauses, clause_signs, raw, sign }
    }

    fn flip_clause(&mut self, k: usize) {
        self.clause_signs[k] = -self.clause_signs[k];
        self.raw = alternating_sum(self.raw.field(), &self.clauses, &self.clause_signs);
    }

    /// The differential with its outer sign applied.
    pub fn signed(&self) -> SparseMatrix {
        if self.sign < 0 {
            self.raw.neg()
        } else {
            self.raw.clone()
        }
    }
}

/// Flips the sign of one clause in the alternating sum; used to check that
/// the verifiers notice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignMutation {
    pub direction: Direction,
    pub degree: Degree,
    pub clause: usize,
}

#[derive(Debug, Clone, Default)]
pub struct BuildOptions {
    pub mutation: Option<SignMutation>,
}

#[derive(Debug, Clone)]
pub struct ComplexAssembly {
    pub kind: Kind,
    pub label: String,
    pub field: FieldSpec,
    pub cutoff: usize,
    /// Subtracted from `p + q + r` to get the total degree.
    pub shift: usize,
    pub directions: Vec<Direction>,
    pub spaces: BTreeMap<Degree, HomSpace>,
    pub diffs: BTreeMap<(Degree, Direction), DifferentialMatrix>,
}

impl ComplexAssembly {
    pub fn total_degree(&self, d: Degree) -> usize {
        d[0] + d[1] + d[2] - self.shift
    }

    pub fn diff(&self, d: Degree, dir: Direction) -> Option<&DifferentialMatrix> {
        self.diffs.get(&(d, dir))
    }

    pub fn space(&self, d: Degree) -> Option<&HomSpace> {
        self.spaces.get(&d)
    }
}

fn corner_basis(kind: Kind, maps: &Maps) -> Result<SparseMatrix> {
    match corner_flag(kind) {
        Corner::Der => der_subspace(maps),
        Corner::Coder => coder_subspace(maps),
        _ => bider_subspace(maps),
    }
}

/// Builds the complex of the package's kind through total degree `cutoff`
/// (grid entries through `cutoff + 1`). The package is not validated here.
pub fn build(pkg: &StructurePackage, cutoff: usize) -> Result<ComplexAssembly> {
    build_with(pkg, cutoff, &BuildOptions::default())
}

/// [`build`] for another view of the package, e.g. MA for an MB package.
pub fn build_view(pkg: &StructurePackage, kind: Kind, cutoff: usize) -> Result<ComplexAssembly> {
    build(&pkg.view(kind)?, cutoff)
}

pub fn build_with(pkg: &StructurePackage, cutoff: usize, opts: &BuildOptions) -> Result<ComplexAssembly> {
    let kind = pkg.kind;
    let maps = Maps::from_package(pkg);
    let (h, a) = (maps.h, maps.a);
    let mut spaces = BTreeMap::new();
    let cdeg = corner_degree(kind);
    let corner = corner_basis(kind, &maps)?;
    for d in grid(kind, cutoff + 1) {
        let (src, dst) = space_bases(kind, h, a, d);
        let is_corner = d == cdeg;
        spaces.insert(
            d,
            HomSpace {
                kind,
                degree: d,
                src,
                dst,
                corner: if is_corner { corner_flag(kind) } else { Corner::Full },
                corner_basis: if is_corner { Some(corner.clone()) } else { None },
            },
        );
    }
    let mut diffs = BTreeMap::new();
    for d in grid(kind, cutoff) {
        for &dir in directions(kind) {
            let clauses = clauses(&maps, kind, dir, d)?;
            let mut dm = DifferentialMatrix::new(maps.field, d, dir.step(d), dir, clauses, outer_sign(kind, dir, d));
            if let Some(m) = opts.mutation {
                if m.direction == dir && m.degree == d && m.clause < dm.clauses.len() {
                    dm.flip_clause(m.clause);
                }
            }
            diffs.insert((d, dir), dm);
        }
    }
    Ok(ComplexAssembly {
        kind,
        label: format!("C_{kind}"),
        field: maps.field,
        cutoff,
        shift: usize::from(kind.is_tricomplex()),
        directions: directions(kind).to_vec(),
        spaces,
        diffs,
    })
}

/// Raw clause matrices of one differential family at one source degree.
pub fn clauses(maps: &Maps, kind: Kind, dir: Direction, d: Degree) -> Result<Vec<SparseMatrix>> {
    use Direction::*;
    match (kind, dir) {
        (Kind::MA, Horizontal) => ma_horizontal(maps, d[0], d[1]),
        (Kind::MA, Vertical) => ma_vertical(maps, d[0], d[1]),
        (Kind::MC, Horizontal) => mc_horizontal(maps, d[0], d[1]),
        (Kind::MC, Vertical) => mc_vertical(maps, d[0], d[1]),
        (Kind::CA, Horizontal) => ca_horizontal(maps, d[0], d[1]),
        (Kind::CA, Vertical) => ca_vertical(maps, d[0], d[1]),
        (Kind::CC, Horizontal) => cc_horizontal(maps, d[0], d[1]),
        (Kind::CC, Vertical) => cc_vertical(maps, d[0], d[1]),
        (Kind::MB, I) => mb_one(maps, d),
        (Kind::MB, II) => mb_two(maps, d),
        (Kind::MB, III) => mb_three(maps, d),
        (Kind::CB, I) => cb_one(maps, d),
        (Kind::CB, II) => cb_two(maps, d),
        (Kind::CB, III) => cb_three(maps, d),
        _ => Err(ComplexError::Invalid(format!("{kind} has no direction {dir}"))),
    }
}

fn ma_horizontal(m: &Maps, p: usize, q: usize) -> Result<Vec<SparseMatrix>> {
    let (h, a) = (m.h, m.a);
    let (hq, ap) = (m.hp(q), m.ap(p));
    let mu = m.mu()?;
    let lam = m.lam()?;
    let s = hq * ap;
    let mut out = Vec::new();
    let q0 = mul(&m.t(&[&m.id(h), &sp_twist(m.field, hq, a), &m.id(ap)]), &m.t(&[&m.hsplit_left(q), &m.id(ap * a)]));
    let p0 = mul(mu, &m.t(&[lam, &m.id(a)]));
    out.push(sandwich(&q0, &p0, s, a, h * a, 1)?);
    for i in 1..=p {
        let qi = m.t(&[&m.id(hq * m.ap(i - 1)), mu, &m.id(m.ap(p - i))]);
        out.push(sandwich(&qi, &m.id(a), s, a, 1, 1)?);
    }
    let ql = mul(&m.t(&[&m.id(hq), &sp_twist(m.field, h, ap), &m.id(a)]), &m.t(&[&m.hsplit_right(q), &m.id(ap * a)]));
    let pl = mul(mu, &m.t(&[&m.id(a), lam]));
    out.push(sandwich(&ql, &pl, s, a, 1, h * a)?);
    Ok(out)
}

fn ma_vertical(m: &Maps, p: usize, q: usize) -> Result<Vec<SparseMatrix>> {
    let ap = m.ap(p);
    let bm = BimoduleStructure {
        dim: ap * m.a,
        left: hom_post(m.lam()?, m.h, ap, m.a),
        right: hom_pre(&m.diag_action(p)?, m.h, ap, m.a),
    };
    hochschild_clauses(&m.mu_h, m.h, &bm, q)
}

fn mc_horizontal(m: &Maps, p: usize, q: usize) -> Result<Vec<SparseMatrix>> {
    let (h, a) = (m.h, m.a);
    let (hq, ap) = (m.hp(q), m.ap(p));
    let delta = m.delta()?;
    let lam = m.lam()?;
    let s = hq * a;
    let mut out = Vec::new();
    let q0 = mul(&m.t(&[&m.id(h), &sp_twist(m.field, hq, a), &m.id(a)]), &m.t(&[&m.hsplit_left(q), delta]));
    out.push(sandwich(&q0, &m.t(&[lam, &m.id(ap)]), s, ap, h * a, 1)?);
    for i in 1..=p {
        let pi = m.t(&[&m.id(m.ap(i - 1)), delta, &m.id(m.ap(p - i))]);
        out.push(sandwich(&m.id(s), &pi, s, ap, 1, 1)?);
    }
    let ql = mul(&m.t(&[&m.id(hq), &sp_twist(m.field, h, a), &m.id(a)]), &m.t(&[&m.hsplit_right(q), delta]));
    out.push(sandwich(&ql, &m.t(&[&m.id(ap), lam]), s, ap, 1, h * a)?);
    Ok(out)
}

fn mc_vertical(m: &Maps, p: usize, q: usize) -> Result<Vec<SparseMatrix>> {
    let ap = m.ap(p);
    let bm = BimoduleStructure {
        dim: m.a * ap,
        left: hom_post(&m.diag_action(p)?, m.h, m.a, ap),
        right: hom_pre(m.lam()?, m.h, m.a, ap),
    };
    hochschild_clauses(&m.mu_h, m.h, &bm, q)
}

/// The `A`-bimodule `H^q (x) A` of the comodule-algebra rows.
fn ca_bimodule(m: &Maps, q: usize) -> Result<BimoduleStructure> {
    let (h, a, hq) = (m.h, m.a, m.hp(q));
    let mu = m.mu()?;
    let rho = m.coact()?;
    let left = mul(
        &m.t(&[&m.mu_l_h(q), mu]),
        &mul(&m.t(&[&m.id(h), &sp_twist(m.field, a, hq), &m.id(a)]), &m.t(&[rho, &m.id(hq * a)])),
    );
    let right = mul(
        &m.t(&[&m.mu_r_h(q), mu]),
        &mul(&m.t(&[&m.id(hq), &sp_twist(m.field, a, h), &m.id(a)]), &m.t(&[&m.id(hq * a), rho])),
    );
    Ok(BimoduleStructure { dim: hq * a, left, right })
}

fn ca_horizontal(m: &Maps, p: usize, q: usize) -> Result<Vec<SparseMatrix>> {
    hochschild_clauses(m.mu()?, m.a, &ca_bimodule(m, q)?, p)
}

fn ca_vertical(m: &Maps, p: usize, q: usize) -> Result<Vec<SparseMatrix>> {
    let (h, a) = (m.h, m.a);
    let (hq, ap) = (m.hp(q), m.ap(p));
    let t = hq * a;
    let mut out = Vec::new();
    out.push(sandwich(&m.id(ap), &m.t(&[&m.id(hq), m.coact()?]), ap, t, 1, 1)?);
    for i in 1..=q {
        let pi = m.t(&[&m.id(m.hp(q - i)), &m.delta_h, &m.id(m.hp(i - 1) * a)]);
        out.push(sandwich(&m.id(ap), &pi, ap, t, 1, 1)?);
    }
    out.push(sandwich(&m.rho_pow(p)?, &m.id(h * t), ap, t, h, 1)?);
    Ok(out)
}

fn cc_horizontal(m: &Maps, p: usize, q: usize) -> Result<Vec<SparseMatrix>> {
    let (h, a) = (m.h, m.a);
    let (hq, ap) = (m.hp(q), m.ap(p));
    let delta = m.delta()?;
    let rho = m.coact()?;
    let t = hq * ap;
    let mut out = Vec::new();
    let q0 = mul(&m.t(&[rho, &m.id(a)]), delta);
    let p0 = mul(&m.t(&[&m.mu_l_h(q), &m.id(a * ap)]), &m.t(&[&m.id(h), &sp_twist(m.field, a, hq), &m.id(ap)]));
    out.push(sandwich(&q0, &p0, a, t, h * a, 1)?);
    for i in 1..=p {
        let pi = m.t(&[&m.id(hq * m.ap(i - 1)), delta, &m.id(m.ap(p - i))]);
        out.push(sandwich(&m.id(a), &pi, a, t, 1, 1)?);
    }
    let ql = mul(&m.t(&[&m.id(a), rho]), delta);
    let pl = mul(&m.t(&[&m.mu_r_h(q), &m.id(ap * a)]), &m.t(&[&m.id(hq), &sp_twist(m.field, ap, h), &m.id(a)]));
    out.push(sandwich(&ql, &pl, a, t, 1, h * a)?);
    Ok(out)
}

fn cc_vertical(m: &Maps, p: usize, q: usize) -> Result<Vec<SparseMatrix>> {
    let (h, a) = (m.h, m.a);
    let (hq, ap) = (m.hp(q), m.ap(p));
    let t = hq * ap;
    let mut out = Vec::new();
    out.push(sandwich(&m.id(a), &m.t(&[&m.id(hq), &m.rho_pow(p)?]), a, t, 1, 1)?);
    for i in 1..=q {
        let pi = m.t(&[&m.id(m.hp(q - i)), &m.delta_h, &m.id(m.hp(i - 1) * ap)]);
        out.push(sandwich(&m.id(a), &pi, a, t, 1, 1)?);
    }
    out.push(sandwich(m.coact()?, &m.id(h * t), a, t, h, 1)?);
    Ok(out)
}

fn mb_one(m: &Maps, d: Degree) -> Result<Vec<SparseMatrix>> {
    let [p, q, r] = d;
    let (h, a) = (m.h, m.a);
    let (hr, ap, aq) = (m.hp(r), m.ap(p), m.ap(q));
    let mu = m.mu()?;
    let lam = m.lam()?;
    let s = hr * ap;
    let mut out = Vec::new();
    let split = m.t(&[&m.hsplit_left(r), &m.id(a), &m.id(ap)]);
    let q0 = mul(&m.t(&[&m.id(h), &sp_twist(m.field, hr, a), &m.id(ap)]), &split);
    let p0 = mul(&m.mu_l_a(q)?, &m.t(&[lam, &m.id(aq)]));
    out.push(sandwich(&q0, &p0, s, aq, h * a, 1)?);
    for i in 1..=p {
        let qi = m.t(&[&m.id(hr), &m.id(m.ap(i - 1)), mu, &m.id(m.ap(p - i))]);
        out.push(sandwich(&qi, &m.id(aq), s, aq, 1, 1)?);
    }
    let split = m.t(&[&m.hsplit_right(r), &m.id(ap), &m.id(a)]);
    let ql = mul(&m.t(&[&m.id(hr), &sp_twist(m.field, h, ap), &m.id(a)]), &split);
    let pl = mul(&m.mu_r_a(q)?, &m.t(&[&m.id(aq), lam]));
    out.push(sandwich(&ql, &pl, s, aq, 1, h * a)?);
    Ok(out)
}

fn mb_two(m: &Maps, d: Degree) -> Result<Vec<SparseMatrix>> {
    let [p, q, r] = d;
    let (h, a) = (m.h, m.a);
    let (hr, ap, aq) = (m.hp(r), m.ap(p), m.ap(q));
    let delta = m.delta()?;
    let lam = m.lam()?;
    let prod = m.aprod(p)?;
    let s = hr * ap;
    let mut out = Vec::new();
    let split = m.t(&[&m.hsplit_left(r), &m.delta_pow(p)?]);
    let q0 = mul(
        &m.t(&[&m.id(h), &prod, &m.id(hr * ap)]),
        &mul(&m.t(&[&m.id(h), &sp_twist(m.field, hr, ap), &m.id(ap)]), &split),
    );
    out.push(sandwich(&q0, &m.t(&[lam, &m.id(aq)]), s, aq, h * a, 1)?);
    for i in 1..=q {
        let pi = m.t(&[&m.id(m.ap(i - 1)), delta, &m.id(m.ap(q - i))]);
        out.push(sandwich(&m.id(s), &pi, s, aq, 1, 1)?);
    }
    let split = m.t(&[&m.hsplit_right(r), &m.delta_pow(p)?]);
    let ql = mul(
        &m.t(&[&m.id(hr * ap * h), &prod]),
        &mul(&m.t(&[&m.id(hr), &sp_twist(m.field, h, ap), &m.id(ap)]), &split),
    );
    out.push(sandwich(&ql, &m.t(&[&m.id(aq), lam]), s, aq, 1, h * a)?);
    Ok(out)
}

fn mb_three(m: &Maps, d: Degree) -> Result<Vec<SparseMatrix>> {
    let [p, q, r] = d;
    let (ap, aq) = (m.ap(p), m.ap(q));
    let bm = BimoduleStructure {
        dim: ap * aq,
        left: hom_post(&m.diag_action(q)?, m.h, ap, aq),
        right: hom_pre(&m.diag_action(p)?, m.h, ap, aq),
    };
    hochschild_clauses(&m.mu_h, m.h, &bm, r)
}

fn cb_one(m: &Maps, d: Degree) -> Result<Vec<SparseMatrix>> {
    let [p, q, r] = d;
    let (h, a) = (m.h, m.a);
    let (hr, aq) = (m.hp(r), m.ap(q));
    let rho = m.coact()?;
    let left = mul(
        &m.t(&[&m.mu_l_h(r), &m.mu_l_a(q)?]),
        &mul(&m.t(&[&m.id(h), &sp_twist(m.field, a, hr), &m.id(aq)]), &m.t(&[rho, &m.id(hr * aq)])),
    );
    let right = mul(
        &m.t(&[&m.mu_r_h(r), &m.mu_r_a(q)?]),
        &mul(&m.t(&[&m.id(hr), &sp_twist(m.field, aq, h), &m.id(a)]), &m.t(&[&m.id(hr * aq), rho])),
    );
    let bm = BimoduleStructure { dim: hr * aq, left, right };
    hochschild_clauses(m.mu()?, a, &bm, p)
}

fn cb_two(m: &Maps, d: Degree) -> Result<Vec<SparseMatrix>> {
    let [p, q, r] = d;
    let h = m.h;
    let (hr, ap, aq) = (m.hp(r), m.ap(p), m.ap(q));
    let delta = m.delta()?;
    let prod = m.aprod(p)?;
    let rp = m.rho_pow(p)?;
    let dp = m.delta_pow(p)?;
    let t = hr * aq;
    let mut out = Vec::new();
    let q0 = mul(&m.t(&[&rp, &m.id(ap)]), &dp);
    let p0 = mul(&m.t(&[&m.mu_l_h(r), &prod, &m.id(aq)]), &m.t(&[&m.id(h), &sp_twist(m.field, ap, hr), &m.id(aq)]));
    out.push(sandwich(&q0, &p0, ap, t, h * ap, 1)?);
    for i in 1..=q {
        let pi = m.t(&[&m.id(hr * m.ap(i - 1)), delta, &m.id(m.ap(q - i))]);
        out.push(sandwich(&m.id(ap), &pi, ap, t, 1, 1)?);
    }
    let ql = mul(&m.t(&[&m.id(ap), &rp]), &dp);
    let pl = mul(&m.t(&[&m.mu_r_h(r), &m.id(aq), &prod]), &m.t(&[&m.id(hr), &sp_twist(m.field, aq, h), &m.id(ap)]));
    out.push(sandwich(&ql, &pl, ap, t, 1, h * ap)?);
    Ok(out)
}

fn cb_three(m: &Maps, d: Degree) -> Result<Vec<SparseMatrix>> {
    let [p, q, r] = d;
    let h = m.h;
    let (hr, ap, aq) = (m.hp(r), m.ap(p), m.ap(q));
    let t = hr * aq;
    let mut out = Vec::new();
    out.push(sandwich(&m.id(ap), &m.t(&[&m.id(hr), &m.rho_pow(q)?]), ap, t, 1, 1)?);
    for i in 1..=r {
        let pi = m.t(&[&m.id(m.hp(r - i)), &m.delta_h, &m.id(m.hp(i - 1) * aq)]);
        out.push(sandwich(&m.id(ap), &pi, ap, t, 1, 1)?);
    }
    out.push(sandwich(&m.rho_pow(p)?, &m.id(h * t), ap, t, h, 1)?);
    Ok(out)
}

/// What an identity check compares.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum CheckKind {
    /// `D[l] . D[k] = D[k] . D[l-1]` within one direction.
    Simplicial { direction: Direction, k: usize, l: usize },
    /// `Y[j] . X[i] = X[i] . Y[j]` on raw clauses.
    Mixed { first: Direction, second: Direction, i: usize, j: usize },
    /// Raw `D . D = 0`.
    Square { direction: Direction },
    /// Signed `X . Y + Y . X = 0`.
    Anticommute { first: Direction, second: Direction },
    /// Total `D^(n+1) . D^n = 0`.
    TotalSquare { mode: CornerMode, n: usize },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub check: CheckKind,
    pub degree: Degree,
    pub passed: bool,
    /// First coordinate column where the two sides differ.
    pub witness: Option<usize>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<IdentityCheck>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&IdentityCheck> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
    }
}

fn compare(check: CheckKind, degree: Degree, lhs: &SparseMatrix, rhs: &SparseMatrix) -> IdentityCheck {
    let witness = lhs.first_differing_column(rhs).expect("same shape");
    IdentityCheck { check, degree, passed: witness.is_none(), witness }
}

/// Clause identities within each direction and clause-wise commutation of
/// raw clauses across directions.
pub fn verify_simplicial_identities(asm: &ComplexAssembly) -> VerificationReport {
    let mut checks = Vec::new();
    for ((d, dir), first) in &asm.diffs {
        if let Some(second) = asm.diff(first.dst, *dir) {
            let n = first.clauses.len();
            for l in 1..=n {
                for k in 0..l {
                    let lhs = mul(&second.clauses[l], &first.clauses[k]);
                    let rhs = mul(&second.clauses[k], &first.clauses[l - 1]);
                    checks.push(compare(Direction::simplicial(*dir, k, l), *d, &lhs, &rhs));
                }
            }
        }
        for &other in &asm.directions {
            if other <= *dir {
                continue;
            }
            let (Some(y_after), Some(y_before)) = (asm.diff(first.dst, other), asm.diff(*d, other)) else {
                continue;
            };
            let Some(x_after) = asm.diff(y_before.dst, *dir) else {
                continue;
            };
            for i in 0..first.clauses.len() {
                for j in 0..y_before.clauses.len() {
                    let lhs = mul(&y_after.clauses[j], &first.clauses[i]);
                    let rhs = mul(&x_after.clauses[i], &y_before.clauses[j]);
                    checks.push(compare(CheckKind::Mixed { first: *dir, second: other, i, j }, *d, &lhs, &rhs));
                }
            }
        }
    }
    VerificationReport { checks }
}

impl Direction {
    fn simplicial(direction: Direction, k: usize, l: usize) -> CheckKind {
        CheckKind::Simplicial { direction, k, l }
    }
}

/// `D . D = 0` per direction, signed anticommutation of every pair of
/// directions, and total `D . D = 0` in both corner modes.
pub fn verify_squares(asm: &ComplexAssembly) -> VerificationReport {
    let mut checks = Vec::new();
    for ((d, dir), first) in &asm.diffs {
        if let Some(second) = asm.diff(first.dst, *dir) {
            let prod = mul(&second.raw, &first.raw);
            let zero = SparseMatrix::zeros(asm.field, prod.rows(), prod.cols());
            checks.push(compare(CheckKind::Square { direction: *dir }, *d, &prod, &zero));
        }
        for &other in &asm.directions {
            if other <= *dir {
                continue;
            }
            let (Some(y_after), Some(y_before)) = (asm.diff(first.dst, other), asm.diff(*d, other)) else {
                continue;
            };
            let Some(x_after) = asm.diff(y_before.dst, *dir) else {
                continue;
            };
            let lhs = mul(&y_after.signed(), &first.signed());
            let rhs = mul(&x_after.signed(), &y_before.signed()).neg();
            checks.push(compare(CheckKind::Anticommute { first: *dir, second: other }, *d, &lhs, &rhs));
        }
    }
    for mode in [CornerMode::Corner, CornerMode::Full] {
        let tot = total_complex(asm, mode);
        for n in 0..tot.diffs.len().saturating_sub(1) {
            let prod = mul(&tot.diffs[n + 1], &tot.diffs[n]);
            let zero = SparseMatrix::zeros(asm.field, prod.rows(), prod.cols());
            checks.push(compare(CheckKind::TotalSquare { mode, n }, [n, 0, 0], &prod, &zero));
        }
    }
    VerificationReport { checks }
}

/// A grid entry placed inside a total space.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Component {
    pub degree: Degree,
    pub offset: usize,
    pub dim: usize,
    pub corner: bool,
}

/// A plain cochain complex `C^0 -> C^1 -> ...`; `diffs[n]: C^n -> C^(n+1)`.
#[derive(Debug, Clone)]
pub struct CochainComplex {
    pub field: FieldSpec,
    pub dims: Vec<usize>,
    pub diffs: Vec<SparseMatrix>,
}

#[derive(Debug, Clone)]
pub struct TotalComplex {
    pub kind: Kind,
    pub mode: CornerMode,
    pub components: Vec<Vec<Component>>,
    pub dims: Vec<usize>,
    pub diffs: Vec<SparseMatrix>,
}

impl TotalComplex {
    pub fn as_cochain_complex(&self, field: FieldSpec) -> CochainComplex {
        CochainComplex { field, dims: self.dims.clone(), diffs: self.diffs.clone() }
    }

    /// The component of `C^n` at a grid degree.
    pub fn component(&self, n: usize, d: Degree) -> Option<&Component> {
        self.components.get(n)?.iter().find(|c| c.degree == d)
    }
}

/// Total complex through degree `cutoff + 1`, with differentials out of
/// degrees `0..=cutoff`.
pub fn total_complex(asm: &ComplexAssembly, mode: CornerMode) -> TotalComplex {
    let top = asm.cutoff + 1;
    let mut components: Vec<Vec<Component>> = vec![Vec::new(); top + 1];
    for (d, sp) in &asm.spaces {
        let n = asm.total_degree(*d);
        if n > top {
            continue;
        }
        let offset = components[n].iter().map(|c| c.dim).sum();
        let corner = sp.corner_basis.is_some() && mode == CornerMode::Corner;
        components[n].push(Component { degree: *d, offset, dim: sp.dim_in(mode), corner });
    }
    let dims: Vec<usize> = components.iter().map(|cs| cs.iter().map(|c| c.dim).sum()).collect();
    let mut diffs = Vec::new();
    for n in 0..top {
        let mut columns: Vec<Vec<(usize, ExactScalar)>> = vec![Vec::new(); dims[n]];
        for c in &components[n] {
            for &dir in &asm.directions {
                let Some(dm) = asm.diff(c.degree, dir) else { continue };
                let Some(target) = components[n + 1].iter().find(|t| t.degree == dm.dst) else { continue };
                let mut block = dm.signed();
                if c.corner {
                    block = mul(&block, asm.spaces[&c.degree].corner_basis.as_ref().expect("corner"));
                }
                for j in 0..block.cols() {
                    columns[c.offset + j].extend(block.column(j).iter().map(|(i, v)| (target.offset + i, v.clone())));
                }
            }
        }
        diffs.push(SparseMatrix::from_column_entries(asm.field, dims[n + 1], columns));
    }
    TotalComplex { kind: asm.kind, mode, components, dims, diffs }
}

/// The line through `fixed` in direction `dir`, indexed by the moving
/// coordinate. Uses full spaces and signed differentials.
pub fn line(asm: &ComplexAssembly, dir: Direction, fixed: Degree) -> CochainComplex {
    let axis = dir.axis();
    let mut dims = Vec::new();
    let mut diffs = Vec::new();
    let mut k = 0;
    loop {
        let mut d = fixed;
        d[axis] = k;
        let in_grid = asm.total_degree_checked(d).is_some_and(|n| n <= asm.cutoff + 1);
        if !in_grid {
            break;
        }
        dims.push(asm.spaces.get(&d).map_or(0, |s| s.dim()));
        k += 1;
    }
    for k in 0..dims.len().saturating_sub(1) {
        let mut d = fixed;
        d[axis] = k;
        let m = match asm.diff(d, dir) {
            Some(dm) => dm.signed(),
            None => SparseMatrix::zeros(asm.field, dims[k + 1], dims[k]),
        };
        diffs.push(m);
    }
    CochainComplex { field: asm.field, dims, diffs }
}

impl ComplexAssembly {
    fn total_degree_checked(&self, d: Degree) -> Option<usize> {
        (d[0] + d[1] + d[2]).checked_sub(self.shift)
    }
}

/// Boundary planes of a tricomplex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Plane {
    /// `p = 1`: the MC (resp. CC) bicomplex, coordinates `(q, r)`.
    P1,
    /// `q = 1`: the MA (resp. CA) bicomplex, coordinates `(p, r)`.
    Q1,
    /// `r = 0`: the Gerstenhaber-Schack bicomplex, coordinates `(p, q)`.
    R0,
}

impl Plane {
    pub fn parse(s: &str) -> Option<Plane> {
        match s.replace(' ', "").as_str() {
            "p=1" | "P1" => Some(Plane::P1),
            "q=1" | "Q1" => Some(Plane::Q1),
            "r=0" | "R0" => Some(Plane::R0),
            _ => None,
        }
    }

    /// The bicomplex kind this plane coincides with, if any.
    pub fn bicomplex_kind(self, kind: Kind) -> Option<Kind> {
        match (self, kind) {
            (Plane::P1, Kind::MB) => Some(Kind::MC),
            (Plane::Q1, Kind::MB) => Some(Kind::MA),
            (Plane::P1, Kind::CB) => Some(Kind::CC),
            (Plane::Q1, Kind::CB) => Some(Kind::CA),
            _ => None,
        }
    }

    fn project(self, d: Degree) -> Option<Degree> {
        match self {
            Plane::P1 => (d[0] == 1).then_some([d[1], d[2], 0]),
            Plane::Q1 => (d[1] == 1).then_some([d[0], d[2], 0]),
            Plane::R0 => (d[2] == 0).then_some([d[0], d[1], 0]),
        }
    }

    fn relabel(self, dir: Direction) -> Option<Direction> {
        use Direction::*;
        match (self, dir) {
            (Plane::P1, II) | (Plane::Q1, I) | (Plane::R0, I) => Some(Horizontal),
            (Plane::P1, III) | (Plane::Q1, III) | (Plane::R0, II) => Some(Vertical),
            _ => None,
        }
    }
}

/// Extracts a boundary plane of a tricomplex as a bicomplex assembly with
/// the tricomplex's signs and clauses kept as they are.
pub fn plane(asm: &ComplexAssembly, which: Plane) -> Result<ComplexAssembly> {
    if !asm.kind.is_tricomplex() {
        return Err(ComplexError::Invalid(format!("{} is not a tricomplex", asm.kind)));
    }
    let mut spaces = BTreeMap::new();
    for (d, sp) in &asm.spaces {
        if let Some(e) = which.project(*d) {
            let mut sp = sp.clone();
            sp.degree = e;
            spaces.insert(e, sp);
        }
    }
    let mut diffs = BTreeMap::new();
    for ((d, dir), dm) in &asm.diffs {
        let (Some(e), Some(nd)) = (which.project(*d), which.relabel(*dir)) else { continue };
        let mut dm = dm.clone();
        dm.src = e;
        dm.dst = nd.step(e);
        dm.direction = nd;
        diffs.insert((e, nd), dm);
    }
    let shift = match which {
        Plane::R0 => 1,
        _ => 0,
    };
    Ok(ComplexAssembly {
        kind: which.bicomplex_kind(asm.kind).unwrap_or(asm.kind),
        label: format!("{} plane {:?}", asm.label, which),
        field: asm.field,
        cutoff: asm.cutoff,
        shift,
        directions: vec![Direction::Horizontal, Direction::Vertical],
        spaces,
        diffs,
    })
}

/// A raw-matrix difference between two assemblies.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Mismatch {
    pub degree: Degree,
    pub direction: Direction,
    pub clause: Option<usize>,
    pub what: String,
}

/// Compares raw clause and differential matrices of two bicomplex-shaped
/// assemblies on the degrees they share.
pub fn compare_raw(a: &ComplexAssembly, b: &ComplexAssembly) -> Vec<Mismatch> {
    let mut out = Vec::new();
    let keys_a: Vec<_> = a.diffs.keys().collect();
    for key in keys_a {
        let (d, dir) = *key;
        let x = &a.diffs[key];
        let Some(y) = b.diffs.get(key) else {
            out.push(Mismatch { degree: d, direction: dir, clause: None, what: "missing in second assembly".into() });
            continue;
        };
        if x.clauses.len() != y.clauses.len() {
            out.push(Mismatch { degree: d, direction: dir, clause: None, what: "clause count".into() });
            continue;
        }
        for (k, (c1, c2)) in x.clauses.iter().zip(&y.clauses).enumerate() {
            if c1 != c2 {
                out.push(Mismatch { degree: d, direction: dir, clause: Some(k), what: "clause matrix".into() });
            }
        }
        if x.raw != y.raw {
            out.push(Mismatch { degree: d, direction: dir, clause: None, what: "differential matrix".into() });
        }
    }
    for key in b.diffs.keys() {
        if !a.diffs.contains_key(key) {
            out.push(Mismatch { degree: key.0, direction: key.1, clause: None, what: "missing in first assembly".into() });
        }
    }
    out
}
