//! Tensor bases, linear maps between them, and the compiler that turns a
//! formula of the shape `phi -> P . (Id_U (x) phi (x) Id_V) . Q` into a
//! matrix acting on cochain coordinates.
//!
//! Basis order is lexicographic with the leftmost factor most significant.
//! A cochain `phi: S -> T` has coordinate `s * dim T + t` for the
//! coefficient of `e_t` in `phi(e_s)`. With this layout currying
//! `Hom(X (x) Y, Z) = Hom(X, Hom(Y, Z))` is the identity on coordinates.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact_linalg::{matmul, ExactMatrix, ExactScalar, FieldSpec, LinalgError, SparseMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TensorError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("index {index} out of range for factor of dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("{0}")]
    MissingStructure(String),
}

pub type Result<T> = std::result::Result<T, TensorError>;

/// Which space a tensor factor belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tag {
    H,
    A,
}

/// Ordered basis of `X_1 (x) ... (x) X_n`; the empty product is the ground
/// field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TensorBasis {
    factors: Vec<(Tag, usize)>,
}

impl TensorBasis {
    pub fn new(factors: Vec<(Tag, usize)>) -> Self {
        TensorBasis { factors }
    }

    pub fn ground() -> Self {
        TensorBasis { factors: Vec::new() }
    }

    pub fn single(tag: Tag, dim: usize) -> Self {
        TensorBasis { factors: vec![(tag, dim)] }
    }

    pub fn power(tag: Tag, dim: usize, n: usize) -> Self {
        TensorBasis { factors: vec![(tag, dim); n] }
    }

    pub fn concat(&self, other: &TensorBasis) -> Self {
        let mut f = self.factors.clone();
        f.extend_from_slice(&other.factors);
        TensorBasis { factors: f }
    }

    pub fn factors(&self) -> &[(Tag, usize)] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(|f| f.1).product()
    }

    pub fn encode(&self, idx: &[usize]) -> Result<usize> {
        if idx.len() != self.factors.len() {
            return Err(TensorError::Shape(format!(
                "{} indices for {} factors",
                idx.len(),
                self.factors.len()
            )));
        }
        let mut flat = 0;
        for (&i, &(_, d)) in idx.iter().zip(&self.factors) {
            if i >= d {
                return Err(TensorError::IndexOutOfRange { index: i, dim: d });
            }
            flat = flat * d + i;
        }
        Ok(flat)
    }

    pub fn decode(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.factors.len()];
        for (k, &(_, d)) in self.factors.iter().enumerate().rev() {
            out[k] = flat % d;
            flat /= d;
        }
        out
    }
}

/// A linear map between tensor bases; column `j` of the matrix is the image
/// of basis vector `j` of the source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinMap {
    src: TensorBasis,
    dst: TensorBasis,
    matrix: ExactMatrix,
}

impl LinMap {
    pub fn new(src: TensorBasis, dst: TensorBasis, matrix: ExactMatrix) -> Result<Self> {
        if matrix.rows() != dst.dim() || matrix.cols() != src.dim() {
            return Err(TensorError::Shape(format!(
                "matrix {}x{} for a map of dimension {} -> {}",
                matrix.rows(),
                matrix.cols(),
                src.dim(),
                dst.dim()
            )));
        }
        Ok(LinMap { src, dst, matrix })
    }

    pub fn identity(field: FieldSpec, basis: TensorBasis) -> Self {
        let n = basis.dim();
        LinMap { src: basis.clone(), dst: basis, matrix: ExactMatrix::identity(field, n) }
    }

    pub fn zero(field: FieldSpec, src: TensorBasis, dst: TensorBasis) -> Self {
        let m = ExactMatrix::zeros(field, dst.dim(), src.dim());
        LinMap { src, dst, matrix: m }
    }

    /// Builds a map from cochain coordinates (`s * dim dst + t`).
    pub fn from_coords(field: FieldSpec, src: TensorBasis, dst: TensorBasis, coords: &[ExactScalar]) -> Result<Self> {
        let (s, t) = (src.dim(), dst.dim());
        if coords.len() != s * t {
            return Err(TensorError::Shape(format!("{} coordinates for a {}x{} map", coords.len(), t, s)));
        }
        let m = ExactMatrix::from_fn(field, t, s, |i, j| coords[j * t + i].clone());
        Ok(LinMap { src, dst, matrix: m })
    }

    pub fn to_coords(&self) -> Vec<ExactScalar> {
        let (s, t) = (self.src.dim(), self.dst.dim());
        let mut out = Vec::with_capacity(s * t);
        for j in 0..s {
            for i in 0..t {
                out.push(self.matrix.get(i, j).clone());
            }
        }
        out
    }

    pub fn field(&self) -> FieldSpec {
        self.matrix.field()
    }

    pub fn src(&self) -> &TensorBasis {
        &self.src
    }

    pub fn dst(&self) -> &TensorBasis {
        &self.dst
    }

    pub fn matrix(&self) -> &ExactMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ExactMatrix {
        self.matrix
    }

    /// Same matrix, relabelled bases of equal dimension.
    pub fn retag(&self, src: TensorBasis, dst: TensorBasis) -> Result<Self> {
        LinMap::new(src, dst, self.matrix.clone())
    }

    /// `self . inner`.
    pub fn compose(&self, inner: &LinMap) -> Result<LinMap> {
        if inner.dst.dim() != self.src.dim() {
            return Err(TensorError::Shape(format!(
                "cannot compose {} -> {} after {} -> {}",
                self.src.dim(),
                self.dst.dim(),
                inner.src.dim(),
                inner.dst.dim()
            )));
        }
        Ok(LinMap { src: inner.src.clone(), dst: self.dst.clone(), matrix: matmul(&self.matrix, &inner.matrix)? })
    }

    pub fn tensor(&self, other: &LinMap) -> Result<LinMap> {
        Ok(LinMap {
            src: self.src.concat(&other.src),
            dst: self.dst.concat(&other.dst),
            matrix: self.matrix.kron(&other.matrix)?,
        })
    }

    pub fn add(&self, other: &LinMap) -> Result<LinMap> {
        Ok(LinMap { src: self.src.clone(), dst: self.dst.clone(), matrix: self.matrix.add(&other.matrix)? })
    }

    pub fn sub(&self, other: &LinMap) -> Result<LinMap> {
        Ok(LinMap { src: self.src.clone(), dst: self.dst.clone(), matrix: self.matrix.sub(&other.matrix)? })
    }

    pub fn scale(&self, c: &ExactScalar) -> LinMap {
        LinMap { src: self.src.clone(), dst: self.dst.clone(), matrix: self.matrix.scale(c) }
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    pub fn apply(&self, v: &[ExactScalar]) -> Result<Vec<ExactScalar>> {
        Ok(self.matrix.mul_vec(v)?)
    }

    /// Image of the basis tensor with the given multi-index.
    pub fn evaluate(&self, inputs: &[usize]) -> Result<Vec<ExactScalar>> {
        let j = self.src.encode(inputs)?;
        Ok(self.matrix.column(j))
    }
}

/// Tensor product of a list of maps; the empty list gives `Id_K`.
pub fn tensor_all(field: FieldSpec, maps: &[&LinMap]) -> Result<LinMap> {
    let mut acc = LinMap::identity(field, TensorBasis::ground());
    for m in maps {
        acc = acc.tensor(m)?;
    }
    Ok(acc)
}

/// Reorders tensor factors: factor `k` of the target is factor `order[k]`
/// of the source.
pub fn permutation(field: FieldSpec, src: &TensorBasis, order: &[usize]) -> Result<LinMap> {
    let n = src.len();
    let mut seen = vec![false; n];
    if order.len() != n || order.iter().any(|&i| i >= n || std::mem::replace(&mut seen[i], true)) {
        return Err(TensorError::Shape("not a permutation of the factors".into()));
    }
    let dst = TensorBasis::new(order.iter().map(|&i| src.factors[i]).collect());
    let dim = src.dim();
    let mut m = ExactMatrix::zeros(field, dim, dim);
    let one = field.one();
    let mut target = vec![0; n];
    for j in 0..dim {
        let idx = src.decode(j);
        for (k, &i) in order.iter().enumerate() {
            target[k] = idx[i];
        }
        m.set(dst.encode(&target)?, j, one.clone());
    }
    Ok(LinMap { src: src.clone(), dst, matrix: m })
}

/// `tau_(X,Y): X (x) Y -> Y (x) X`.
pub fn twist(field: FieldSpec, x: &TensorBasis, y: &TensorBasis) -> Result<LinMap> {
    let src = x.concat(y);
    let order: Vec<usize> = (x.len()..x.len() + y.len()).chain(0..x.len()).collect();
    permutation(field, &src, &order)
}

/// `twist` on plain dimensions, with one factor on each side.
pub fn twist_dims(field: FieldSpec, x_dim: usize, y_dim: usize) -> LinMap {
    twist(field, &TensorBasis::single(Tag::A, x_dim), &TensorBasis::single(Tag::A, y_dim))
        .expect("two-factor twist")
}

/// `Delta^n: C -> C^(n+1)`, left nested: `Delta^n = (Delta (x) Id^(n-1)) . Delta^(n-1)`.
pub fn iterated_comul(delta: &LinMap, n: usize) -> Result<LinMap> {
    let field = delta.field();
    let c = TensorBasis::new(delta.src.factors.clone());
    let mut acc = LinMap::identity(field, c.clone());
    for k in 1..=n {
        let rest = LinMap::identity(field, TensorBasis::new(vec![c.factors[0]; k - 1]));
        acc = delta.tensor(&rest)?.compose(&acc)?;
    }
    Ok(acc)
}

/// Right nested variant `(Id^(n-1) (x) Delta) . Delta^(n-1)`, used to test
/// parenthesization independence.
pub fn iterated_comul_right(delta: &LinMap, n: usize) -> Result<LinMap> {
    let field = delta.field();
    let c = TensorBasis::new(delta.src.factors.clone());
    let mut acc = LinMap::identity(field, c.clone());
    for k in 1..=n {
        let rest = LinMap::identity(field, TensorBasis::new(vec![c.factors[0]; k - 1]));
        acc = rest.tensor(delta)?.compose(&acc)?;
    }
    Ok(acc)
}

/// `mu^n: A^n -> A` with `mu^1 = Id` and `mu^n = mu . (mu^(n-1) (x) Id)`.
/// `n = 0` returns the unit `K -> A` and needs one.
pub fn iterated_mul(mu: &LinMap, n: usize, unit: Option<&LinMap>) -> Result<LinMap> {
    let field = mu.field();
    let a = TensorBasis::new(mu.dst.factors.clone());
    if n == 0 {
        return unit
            .cloned()
            .ok_or_else(|| TensorError::MissingStructure("mu^0 needs a unit".into()));
    }
    let id = LinMap::identity(field, a.clone());
    let mut acc = id.clone();
    for _ in 1..n {
        acc = mu.compose(&acc.tensor(&id)?)?;
    }
    Ok(acc)
}

/// Right nested `mu^n = mu . (Id (x) mu^(n-1))`.
pub fn iterated_mul_right(mu: &LinMap, n: usize) -> Result<LinMap> {
    let field = mu.field();
    let id = LinMap::identity(field, TensorBasis::new(mu.dst.factors.clone()));
    let mut acc = id.clone();
    for _ in 1..n.max(1) {
        acc = mu.compose(&id.tensor(&acc)?)?;
    }
    Ok(acc)
}

/// Sweedler legs of a tensor product of coalgebras: given
/// `Delta_i^(k-1): X_i -> X_i^k`, returns the map
/// `X_1 (x) ... (x) X_n -> (X_1 (x) ... (x) X_n)^k` sending
/// `x_1 (x) ... (x) x_n` to
/// `sum (x_1(1) (x) ... (x) x_n(1)) (x) ... (x) (x_1(k) (x) ... (x) x_n(k))`.
pub fn legs(field: FieldSpec, comuls: &[&LinMap], k: usize) -> Result<LinMap> {
    let n = comuls.len();
    let expanded = tensor_all(field, comuls)?;
    if expanded.dst.len() != n * k {
        return Err(TensorError::Shape("each comultiplication must have k legs".into()));
    }
    // Factor (i, leg) sits at i * k + leg; move it to leg * n + i.
    let order: Vec<usize> = (0..k).flat_map(|leg| (0..n).map(move |i| i * k + leg)).collect();
    permutation(field, &expanded.dst, &order)?.compose(&expanded)
}

/// Identity on coordinates for `Hom(X (x) Y, Z) -> Hom(X, Hom(Y, Z))`, with
/// shape checking. Provided for symmetry with [`uncurry`].
pub fn curry(x: usize, y: usize, z: usize, coords: &[ExactScalar]) -> Result<Vec<ExactScalar>> {
    if coords.len() != x * y * z {
        return Err(TensorError::Shape("curry: coordinate count".into()));
    }
    Ok(coords.to_vec())
}

pub fn uncurry(x: usize, y: usize, z: usize, coords: &[ExactScalar]) -> Result<Vec<ExactScalar>> {
    curry(x, y, z, coords)
}

/// Coordinate permutation `Hom(X, Hom(Y, Z)) -> Hom(Y, Hom(X, Z))`,
/// `(f)(x)(y) -> (g)(y)(x)`. As a matrix on coordinates.
pub fn swap_arguments(field: FieldSpec, x: usize, y: usize, z: usize) -> ExactMatrix {
    let n = x * y * z;
    let mut m = ExactMatrix::zeros(field, n, n);
    let one = field.one();
    for i in 0..x {
        for j in 0..y {
            for k in 0..z {
                m.set((j * x + i) * z + k, (i * y + j) * z + k, one.clone());
            }
        }
    }
    m
}

/// A clause `phi -> P . (Id_U (x) phi (x) Id_V) . Q` for
/// `phi: S -> T`, with `Q: S' -> U (x) S (x) V` and `P: U (x) T (x) V -> T'`.
#[derive(Debug, Clone)]
pub struct Sandwich {
    pub inner: LinMap,
    pub outer: LinMap,
    pub s: usize,
    pub t: usize,
    pub u: usize,
    pub v: usize,
}

impl Sandwich {
    pub fn new(inner: LinMap, outer: LinMap, s: usize, t: usize, u: usize, v: usize) -> Result<Self> {
        if inner.dst.dim() != u * s * v || outer.src.dim() != u * t * v {
            return Err(TensorError::Shape(format!(
                "sandwich: inner lands in dim {} (want {}), outer starts at dim {} (want {})",
                inner.dst.dim(),
                u * s * v,
                outer.src.dim(),
                u * t * v
            )));
        }
        Ok(Sandwich { inner, outer, s, t, u, v })
    }

    pub fn src_dim(&self) -> usize {
        self.inner.src.dim()
    }

    pub fn dst_dim(&self) -> usize {
        self.outer.dst.dim()
    }

    /// Matrix of `phi -> P . (Id (x) phi (x) Id) . Q` on cochain coordinates:
    /// `(S' * T') x (S * T)`.
    pub fn compile(&self) -> ExactMatrix {
        let field = self.inner.field();
        let (s, t, v) = (self.s, self.t, self.v);
        let s2 = self.src_dim();
        let t2 = self.dst_dim();
        let mut out = ExactMatrix::zeros(field, s2 * t2, s * t);
        let qnz = self.inner.matrix.column_nonzeros();
        let pnz = self.outer.matrix.column_nonzeros();
        for (sp, col) in qnz.iter().enumerate() {
            for (r, qv) in col {
                let uu = r / (s * v);
                let ss = (r / v) % s;
                let vv = r % v;
                for tt in 0..t {
                    let pc = (uu * t + tt) * v + vv;
                    for (tp, pv) in &pnz[pc] {
                        out.add_mul_at(sp * t2 + tp, ss * t + tt, qv, pv);
                    }
                }
            }
        }
        out
    }

    /// Direct evaluation on one cochain, by composing maps.
    pub fn apply(&self, phi: &LinMap) -> Result<LinMap> {
        let field = phi.field();
        let mid = LinMap::identity(field, TensorBasis::single(Tag::A, self.u))
            .tensor(phi)?
            .tensor(&LinMap::identity(field, TensorBasis::single(Tag::A, self.v)))?;
        let mid = mid.retag(
            TensorBasis::single(Tag::A, self.u * self.s * self.v),
            TensorBasis::single(Tag::A, self.u * self.t * self.v),
        )?;
        self.outer.compose(&mid)?.compose(&self.inner)
    }
}

/// Matrix of the linear map `psi -> P . (phi (x) psi) . Q` for a fixed
/// `phi: S1 -> T1`, with `psi: S2 -> T2`, `Q: S' -> S1 (x) S2` and
/// `P: T1 (x) T2 -> T'`.
pub fn left_multiplication(outer: &LinMap, inner: &LinMap, phi: &LinMap, s2: usize, t2: usize) -> Result<ExactMatrix> {
    let field = phi.field();
    let p = outer.compose(&phi.tensor(&LinMap::identity(field, TensorBasis::single(Tag::A, t2)))?)?;
    Ok(Sandwich::new(inner.clone(), p, s2, t2, phi.src.dim(), 1)?.compile())
}

/// Matrix of `phi -> P . (phi (x) psi) . Q` for a fixed `psi: S2 -> T2`.
pub fn right_multiplication(outer: &LinMap, inner: &LinMap, psi: &LinMap, s1: usize, t1: usize) -> Result<ExactMatrix> {
    let field = psi.field();
    let p = outer.compose(&LinMap::identity(field, TensorBasis::single(Tag::A, t1)).tensor(psi)?)?;
    Ok(Sandwich::new(inner.clone(), p, s1, t1, 1, psi.src.dim())?.compile())
}

/// Sparse permutation of tensor factors with the given dimensions: factor
/// `k` of the target is factor `order[k]` of the source.
pub fn sp_permutation(field: FieldSpec, dims: &[usize], order: &[usize]) -> SparseMatrix {
    let src = TensorBasis::new(dims.iter().map(|&d| (Tag::A, d)).collect());
    let dst = TensorBasis::new(order.iter().map(|&i| (Tag::A, dims[i])).collect());
    let one = field.one();
    let mut target = vec![0; order.len()];
    let columns = (0..src.dim())
        .map(|j| {
            let idx = src.decode(j);
            for (k, &i) in order.iter().enumerate() {
                target[k] = idx[i];
            }
            vec![(dst.encode(&target).expect("permutation index"), one.clone())]
        })
        .collect();
    SparseMatrix::from_column_entries(field, src.dim(), columns)
}

/// Sparse `tau_(X,Y)` on dimensions.
pub fn sp_twist(field: FieldSpec, x: usize, y: usize) -> SparseMatrix {
    sp_permutation(field, &[x, y], &[1, 0])
}

/// Kronecker product of a list of sparse maps; the empty list gives `Id_K`.
pub fn sp_tensor_all(field: FieldSpec, maps: &[&SparseMatrix]) -> SparseMatrix {
    let mut acc = SparseMatrix::identity(field, 1);
    for m in maps {
        acc = acc.kron(m).expect("same field");
    }
    acc
}

/// Sparse compilation of `phi -> P . (Id_U (x) phi (x) Id_V) . Q` on cochain
/// coordinates, for `phi: S -> T` with `Q: S' -> U (x) S (x) V` and
/// `P: U (x) T (x) V -> T'`.
pub fn sp_sandwich(inner: &SparseMatrix, outer: &SparseMatrix, s: usize, t: usize, u: usize, v: usize) -> Result<SparseMatrix> {
    if inner.rows() != u * s * v || outer.cols() != u * t * v {
        return Err(TensorError::Shape(format!(
            "sandwich: inner lands in dim {} (want {}), outer starts at dim {} (want {})",
            inner.rows(),
            u * s * v,
            outer.cols(),
            u * t * v
        )));
    }
    let field = inner.field();
    let t2 = outer.rows();
    let mut columns: Vec<Vec<(usize, ExactScalar)>> = vec![Vec::new(); s * t];
    for sp in 0..inner.cols() {
        for (r, qv) in inner.column(sp) {
            let uu = r / (s * v);
            let ss = (r / v) % s;
            let vv = r % v;
            for tt in 0..t {
                for (tp, pv) in outer.column((uu * t + tt) * v + vv) {
                    columns[ss * t + tt].push((sp * t2 + tp, field.mul(qv, pv)));
                }
            }
        }
    }
    Ok(SparseMatrix::from_column_entries(field, inner.cols() * t2, columns))
}

/// The `T x S` matrix of a cochain given by coordinates `s * T + t`.
pub fn sp_from_coords(field: FieldSpec, s: usize, t: usize, coords: &[ExactScalar]) -> SparseMatrix {
    let columns = (0..s)
        .map(|j| {
            (0..t)
                .filter(|&i| !field.is_zero(&coords[j * t + i]))
                .map(|i| (i, coords[j * t + i].clone()))
                .collect()
        })
        .collect();
    SparseMatrix::from_column_entries(field, t, columns)
}

/// Inverse of [`sp_from_coords`].
pub fn sp_to_coords(m: &SparseMatrix) -> Vec<ExactScalar> {
    let t = m.rows();
    let mut out = vec![m.field().zero(); m.cols() * t];
    for j in 0..m.cols() {
        for (i, v) in m.column(j) {
            out[j * t + i] = v.clone();
        }
    }
    out
}
