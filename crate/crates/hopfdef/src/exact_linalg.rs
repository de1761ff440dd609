//! Exact scalars and dense matrices over Q or a prime field F_p.
//!
//! Every linear map in the crate is an [`ExactMatrix`] whose columns are the
//! images of source basis vectors. Nothing here ever rounds.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedMul, One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(FieldSpec, FieldSpec),
    #[error("{0} is not a prime below 2^31")]
    BadCharacteristic(u64),
    #[error("cannot parse scalar {0:?}")]
    Parse(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("inner space is not contained in the ambient space")]
    NotContained,
}

pub type Result<T> = std::result::Result<T, LinalgError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldKind {
    Rationals,
    PrimeField,
}

/// The ground field K: Q (characteristic 0) or F_p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    kind: FieldKind,
    characteristic: u64,
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FieldKind::Rationals => write!(f, "Q"),
            FieldKind::PrimeField => write!(f, "F{}", self.characteristic),
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// A field element. Rationals are kept in lowest terms with positive
/// denominator; ones that fit in `i64` use the inline representation so
/// that dense matrices stay small. Residues lie in `[0, p)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExactScalar {
    Small(Ratio<i64>),
    Big(Box<BigRational>),
    Residue(u32),
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactScalar::Small(r) => {
                if *r.denom() == 1 {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            ExactScalar::Big(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            ExactScalar::Residue(v) => write!(f, "{}", v),
        }
    }
}

/// Written as its display string (`"-3/4"`, `"2"`); reading back needs a
/// field, see [`FieldSpec::parse`].
impl Serialize for ExactScalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn q_from_big(r: BigRational) -> ExactScalar {
    match (r.numer().to_i64(), r.denom().to_i64()) {
        (Some(n), Some(d)) => ExactScalar::Small(Ratio::new_raw(n, d)),
        _ => ExactScalar::Big(Box::new(r)),
    }
}

fn q_to_big(a: &ExactScalar) -> BigRational {
    match a {
        ExactScalar::Small(r) => BigRational::new_raw(BigInt::from(*r.numer()), BigInt::from(*r.denom())),
        ExactScalar::Big(r) => (**r).clone(),
        ExactScalar::Residue(_) => panic!("mixed scalar representations"),
    }
}

impl ExactScalar {
    /// The value as a big rational, for rational scalars.
    pub fn to_rational(&self) -> Option<BigRational> {
        match self {
            ExactScalar::Residue(_) => None,
            x => Some(q_to_big(x)),
        }
    }
}

impl FieldSpec {
    pub fn rationals() -> Self {
        FieldSpec { kind: FieldKind::Rationals, characteristic: 0 }
    }

    pub fn prime(p: u64) -> Result<Self> {
        if p >= (1u64 << 31) || !is_prime(p) {
            return Err(LinalgError::BadCharacteristic(p));
        }
        Ok(FieldSpec { kind: FieldKind::PrimeField, characteristic: p })
    }

    /// `0` selects Q, anything else must be a prime.
    pub fn from_characteristic(c: u64) -> Result<Self> {
        if c == 0 {
            Ok(Self::rationals())
        } else {
            Self::prime(c)
        }
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn characteristic(&self) -> u64 {
        self.characteristic
    }

    pub fn is_rational(&self) -> bool {
        self.kind == FieldKind::Rationals
    }

    pub fn zero(&self) -> ExactScalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> ExactScalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> ExactScalar {
        match self.kind {
            FieldKind::Rationals => ExactScalar::Small(Ratio::from_integer(v)),
            FieldKind::PrimeField => {
                let p = self.characteristic as i64;
                ExactScalar::Residue(v.rem_euclid(p) as u32)
            }
        }
    }

    /// Maps a rational number into the field; fails when the denominator
    /// vanishes in F_p.
    pub fn from_rational(&self, r: &BigRational) -> Result<ExactScalar> {
        match self.kind {
            FieldKind::Rationals => Ok(q_from_big(r.clone())),
            FieldKind::PrimeField => {
                let p = BigInt::from(self.characteristic);
                let n = r.numer().mod_floor(&p).to_u64().unwrap_or(0);
                let d = r.denom().mod_floor(&p).to_u64().unwrap_or(0);
                if d == 0 {
                    return Err(LinalgError::DivisionByZero);
                }
                let inv = self.inv_u64(d);
                Ok(ExactScalar::Residue(((n * inv) % self.characteristic) as u32))
            }
        }
    }

    pub fn from_ratio(&self, num: i64, den: i64) -> Result<ExactScalar> {
        if den == 0 {
            return Err(LinalgError::DivisionByZero);
        }
        self.from_rational(&BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Parses `"n"` or `"n/d"` with arbitrary-size integers.
    pub fn parse(&self, s: &str) -> Result<ExactScalar> {
        let t = s.trim();
        let bad = || LinalgError::Parse(s.to_string());
        let r = match t.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                let d: BigInt = d.trim().parse().map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(LinalgError::DivisionByZero);
                }
                BigRational::new(n, d)
            }
            None => BigRational::from_integer(t.parse::<BigInt>().map_err(|_| bad())?),
        };
        self.from_rational(&r)
    }

    fn inv_u64(&self, a: u64) -> u64 {
        // Fermat: a^(p-2) mod p.
        let p = self.characteristic;
        let mut base = a % p;
        let mut e = p - 2;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        acc
    }

    pub fn is_zero(&self, a: &ExactScalar) -> bool {
        match a {
            ExactScalar::Small(r) => *r.numer() == 0,
            ExactScalar::Big(r) => r.is_zero(),
            ExactScalar::Residue(v) => *v == 0,
        }
    }

    pub fn is_one(&self, a: &ExactScalar) -> bool {
        *a == self.one()
    }

    pub fn add(&self, a: &ExactScalar, b: &ExactScalar) -> ExactScalar {
        match (a, b) {
            (ExactScalar::Residue(x), ExactScalar::Residue(y)) => {
                ExactScalar::Residue(((*x as u64 + *y as u64) % self.characteristic) as u32)
            }
            (ExactScalar::Small(x), ExactScalar::Small(y)) => match x.checked_add(y) {
                Some(z) => ExactScalar::Small(z),
                None => q_from_big(q_to_big(a) + q_to_big(b)),
            },
            _ => q_from_big(q_to_big(a) + q_to_big(b)),
        }
    }

    pub fn sub(&self, a: &ExactScalar, b: &ExactScalar) -> ExactScalar {
        self.add(a, &self.neg(b))
    }

    pub fn add_assign(&self, a: &mut ExactScalar, b: &ExactScalar) {
        if self.is_zero(b) {
            return;
        }
        *a = self.add(a, b);
    }

    /// `acc += a * b`.
    pub fn add_mul_assign(&self, acc: &mut ExactScalar, a: &ExactScalar, b: &ExactScalar) {
        if let (ExactScalar::Residue(x), ExactScalar::Residue(y), ExactScalar::Residue(z)) = (&*acc, a, b) {
            let p = self.characteristic;
            *acc = ExactScalar::Residue(((*x as u64 + (*y as u64) * (*z as u64) % p) % p) as u32);
            return;
        }
        if self.is_zero(a) || self.is_zero(b) {
            return;
        }
        let prod = self.mul(a, b);
        *acc = self.add(acc, &prod);
    }

    pub fn mul(&self, a: &ExactScalar, b: &ExactScalar) -> ExactScalar {
        match (a, b) {
            (ExactScalar::Residue(x), ExactScalar::Residue(y)) => {
                ExactScalar::Residue(((*x as u64) * (*y as u64) % self.characteristic) as u32)
            }
            (ExactScalar::Small(x), ExactScalar::Small(y)) => match x.checked_mul(y) {
                Some(z) => ExactScalar::Small(z),
                None => q_from_big(q_to_big(a) * q_to_big(b)),
            },
            _ => q_from_big(q_to_big(a) * q_to_big(b)),
        }
    }

    pub fn neg(&self, a: &ExactScalar) -> ExactScalar {
        match a {
            ExactScalar::Small(x) => match x.numer().checked_neg() {
                Some(n) => ExactScalar::Small(Ratio::new_raw(n, *x.denom())),
                None => q_from_big(-q_to_big(a)),
            },
            ExactScalar::Big(x) => q_from_big(-(**x).clone()),
            ExactScalar::Residue(x) => {
                let p = self.characteristic as u32;
                ExactScalar::Residue(if *x == 0 { 0 } else { p - x })
            }
        }
    }

    pub fn inv(&self, a: &ExactScalar) -> Result<ExactScalar> {
        if self.is_zero(a) {
            return Err(LinalgError::DivisionByZero);
        }
        Ok(match a {
            ExactScalar::Residue(x) => ExactScalar::Residue(self.inv_u64(*x as u64) as u32),
            _ => q_from_big(q_to_big(a).recip()),
        })
    }

    /// `(-1)^k` as a field element.
    pub fn sign(&self, k: usize) -> ExactScalar {
        if k.is_multiple_of(2) {
            self.one()
        } else {
            self.from_i64(-1)
        }
    }

    fn check_scalar(&self, a: &ExactScalar) -> bool {
        match (self.kind, a) {
            (FieldKind::Rationals, ExactScalar::Small(r)) => *r.denom() > 0,
            (FieldKind::Rationals, ExactScalar::Big(_)) => true,
            (FieldKind::PrimeField, ExactScalar::Residue(v)) => (*v as u64) < self.characteristic,
            _ => false,
        }
    }
}

/// Dense row-major matrix. Column `j` is the image of the `j`-th source basis
/// vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<ExactScalar>,
}

impl ExactMatrix {
    pub fn zeros(field: FieldSpec, rows: usize, cols: usize) -> Self {
        ExactMatrix { field, rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = field.one();
        }
        m
    }

    pub fn from_fn(
        field: FieldSpec,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> ExactScalar,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ExactMatrix { field, rows, cols, data }
    }

    pub fn from_i64_rows(field: FieldSpec, rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(LinalgError::DimensionMismatch("ragged rows".into()));
        }
        Ok(Self::from_fn(field, r, c, |i, j| field.from_i64(rows[i][j])))
    }

    /// Builds a matrix from entries; rejects scalars of the wrong field.
    pub fn from_entries(field: FieldSpec, rows: usize, cols: usize, data: Vec<ExactScalar>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{} entries for a {}x{} matrix",
                data.len(),
                rows,
                cols
            )));
        }
        if data.iter().any(|x| !field.check_scalar(x)) {
            return Err(LinalgError::Parse("scalar outside the declared field".into()));
        }
        Ok(ExactMatrix { field, rows, cols, data })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(field: FieldSpec, rows: usize, columns: &[Vec<ExactScalar>]) -> Result<Self> {
        if columns.iter().any(|c| c.len() != rows) {
            return Err(LinalgError::DimensionMismatch("column length".into()));
        }
        Ok(Self::from_fn(field, rows, columns.len(), |i, j| columns[j][i].clone()))
    }

    pub fn column_vector(field: FieldSpec, v: &[ExactScalar]) -> Self {
        Self::from_fn(field, v.len(), 1, |i, _| v[i].clone())
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[ExactScalar] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> &ExactScalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: ExactScalar) {
        self.data[i * self.cols + j] = v;
    }

    /// `self[i][j] += v`.
    pub fn add_at(&mut self, i: usize, j: usize, v: &ExactScalar) {
        let f = self.field;
        f.add_assign(&mut self.data[i * self.cols + j], v);
    }

    /// `self[i][j] += a * b`.
    pub fn add_mul_at(&mut self, i: usize, j: usize, a: &ExactScalar, b: &ExactScalar) {
        let f = self.field;
        f.add_mul_assign(&mut self.data[i * self.cols + j], a, b);
    }

    pub fn row(&self, i: usize) -> &[ExactScalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<ExactScalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<ExactScalar>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| self.field.is_zero(x))
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().filter(|x| !self.field.is_zero(x)).count()
    }

    /// Nonzero entries of each column, as `(row, value)` lists.
    pub fn column_nonzeros(&self) -> Vec<Vec<(usize, ExactScalar)>> {
        let mut out = vec![Vec::new(); self.cols];
        for i in 0..self.rows {
            for (j, v) in self.row(i).iter().enumerate() {
                if !self.field.is_zero(v) {
                    out[j].push((i, v.clone()));
                }
            }
        }
        out
    }

    /// Nonzero entries of each row, as `(column, value)` lists.
    pub fn row_nonzeros(&self) -> Vec<Vec<(usize, ExactScalar)>> {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| !self.field.is_zero(v))
                    .map(|(j, v)| (j, v.clone()))
                    .collect()
            })
            .collect()
    }

    fn same_field(&self, other: &ExactMatrix) -> Result<()> {
        if self.field != other.field {
            return Err(LinalgError::FieldMismatch(self.field, other.field));
        }
        Ok(())
    }

    fn same_shape(&self, other: &ExactMatrix) -> Result<()> {
        self.same_field(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        self.same_shape(other)?;
        let mut out = self.clone();
        out.add_assign(other)?;
        Ok(out)
    }

    pub fn add_assign(&mut self, other: &ExactMatrix) -> Result<()> {
        self.same_shape(other)?;
        let f = self.field;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            f.add_assign(a, b);
        }
        Ok(())
    }

    /// `self += c * other`.
    pub fn add_scaled_assign(&mut self, c: &ExactScalar, other: &ExactMatrix) -> Result<()> {
        self.same_shape(other)?;
        let f = self.field;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            f.add_mul_assign(a, c, b);
        }
        Ok(())
    }

    pub fn sub(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> ExactMatrix {
        let f = self.field;
        ExactMatrix { field: f, rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| f.neg(x)).collect() }
    }

    pub fn scale(&self, c: &ExactScalar) -> ExactMatrix {
        let f = self.field;
        ExactMatrix {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| f.mul(x, c)).collect(),
        }
    }

    pub fn transpose(&self) -> ExactMatrix {
        Self::from_fn(self.field, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Position of the first entry (row-major) where the two matrices differ.
    pub fn first_difference(&self, other: &ExactMatrix) -> Result<Option<(usize, usize)>> {
        self.same_shape(other)?;
        Ok(self.data.iter().zip(&other.data).position(|(a, b)| a != b).map(|k| (k / self.cols, k % self.cols)))
    }

    /// Position of the first column where the two matrices differ, scanning
    /// columns in order; used for lexicographically first witnesses.
    pub fn first_differing_column(&self, other: &ExactMatrix) -> Result<Option<usize>> {
        self.same_shape(other)?;
        Ok((0..self.cols).find(|&j| (0..self.rows).any(|i| self.get(i, j) != other.get(i, j))))
    }

    pub fn hstack(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        self.same_field(other)?;
        if self.rows != other.rows {
            return Err(LinalgError::DimensionMismatch("hstack row counts".into()));
        }
        Ok(Self::from_fn(self.field, self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        }))
    }

    pub fn vstack(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        self.same_field(other)?;
        if self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch("vstack column counts".into()));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(ExactMatrix { field: self.field, rows: self.rows + other.rows, cols: self.cols, data })
    }

    pub fn select_columns(&self, idx: &[usize]) -> ExactMatrix {
        Self::from_fn(self.field, self.rows, idx.len(), |i, j| self.get(i, idx[j]).clone())
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &ExactMatrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.data[(r0 + i) * self.cols + c0 + j] = block.get(i, j).clone();
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> ExactMatrix {
        Self::from_fn(self.field, rows, cols, |i, j| self.get(r0 + i, c0 + j).clone())
    }

    pub fn mul_vec(&self, v: &[ExactScalar]) -> Result<Vec<ExactScalar>> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch("vector length".into()));
        }
        let f = self.field;
        let nz: Vec<usize> = (0..v.len()).filter(|&j| !f.is_zero(&v[j])).collect();
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = f.zero();
                let row = self.row(i);
                for &j in &nz {
                    f.add_mul_assign(&mut acc, &row[j], &v[j]);
                }
                acc
            })
            .collect())
    }

    /// Kronecker product; block `(i, j)` is `self[i][j] * other`.
    pub fn kron(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        self.same_field(other)?;
        let f = self.field;
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        let mut out = Self::zeros(f, r, c);
        let bnz = other.row_nonzeros();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if f.is_zero(a) {
                    continue;
                }
                for (k, row) in bnz.iter().enumerate() {
                    for (l, b) in row {
                        out.data[(i * other.rows + k) * c + j * other.cols + l] = f.mul(a, b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn rank(&self) -> usize {
        rank(self)
    }
}

/// Exact product `a * b`.
pub fn matmul(a: &ExactMatrix, b: &ExactMatrix) -> Result<ExactMatrix> {
    a.same_field(b)?;
    if a.cols != b.rows {
        return Err(LinalgError::DimensionMismatch(format!(
            "cannot multiply {}x{} by {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let f = a.field;
    let mut out = ExactMatrix::zeros(f, a.rows, b.cols);
    let bnz = b.row_nonzeros();
    for i in 0..a.rows {
        let arow = a.row(i);
        let orow = &mut out.data[i * b.cols..(i + 1) * b.cols];
        for (k, x) in arow.iter().enumerate() {
            if f.is_zero(x) {
                continue;
            }
            for (j, y) in &bnz[k] {
                f.add_mul_assign(&mut orow[*j], x, y);
            }
        }
    }
    Ok(out)
}

/// Reduced row echelon form together with pivot columns.
pub struct Rref {
    pub matrix: ExactMatrix,
    pub pivots: Vec<usize>,
}

/// Gauss-Jordan elimination; the pivot in each column is the first nonzero
/// entry at or below the current row, so the result is deterministic.
pub fn rref(m: &ExactMatrix) -> Rref {
    let f = m.field;
    let cols = m.cols;
    let mut rows: Vec<Vec<ExactScalar>> = (0..m.rows).map(|i| m.row(i).to_vec()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !f.is_zero(&rows[i][c])) else {
            continue;
        };
        rows.swap(r, p);
        let inv = f.inv(&rows[r][c]).expect("nonzero pivot");
        if !(f.one() == inv) {
            for x in rows[r][c..].iter_mut() {
                *x = f.mul(x, &inv);
            }
        }
        let pivot_row = rows[r].clone();
        let support: Vec<usize> = (c..cols).filter(|&j| !f.is_zero(&pivot_row[j])).collect();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || f.is_zero(&row[c]) {
                continue;
            }
            let factor = f.neg(&row[c]);
            for &j in &support {
                f.add_mul_assign(&mut row[j], &factor, &pivot_row[j]);
            }
        }
        pivots.push(c);
        r += 1;
    }
    let data = rows.into_iter().flatten().collect();
    Rref { matrix: ExactMatrix { field: f, rows: m.rows, cols, data }, pivots }
}

/// Rank by fraction-free (Bareiss) elimination over Q, plain elimination
/// over F_p.
pub fn rank(m: &ExactMatrix) -> usize {
    if m.rows == 0 || m.cols == 0 {
        return 0;
    }
    match m.field.kind {
        FieldKind::PrimeField => rank_mod_p(m),
        FieldKind::Rationals => rank_bareiss(m),
    }
}

fn rank_mod_p(m: &ExactMatrix) -> usize {
    let p = m.field.characteristic;
    let mut rows: Vec<Vec<u64>> = (0..m.rows)
        .map(|i| {
            m.row(i)
                .iter()
                .map(|x| match x {
                    ExactScalar::Residue(v) => *v as u64,
                    _ => unreachable!(),
                })
                .collect()
        })
        .collect();
    let inv = |a: u64| m.field.inv_u64(a);
    let mut r = 0;
    for c in 0..m.cols {
        if r == rows.len() {
            break;
        }
        let Some(piv) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, piv);
        let pi = inv(rows[r][c]);
        let pivot_row = rows[r].clone();
        for row in rows.iter_mut().skip(r + 1) {
            if row[c] == 0 {
                continue;
            }
            let factor = row[c] * pi % p;
            for j in c..m.cols {
                if pivot_row[j] != 0 {
                    row[j] = (row[j] + p - factor * pivot_row[j] % p) % p;
                }
            }
        }
        r += 1;
    }
    r
}

fn rank_bareiss(m: &ExactMatrix) -> usize {
    // Clear denominators row by row; rank is unchanged.
    let mut rows: Vec<Vec<BigInt>> = (0..m.rows)
        .map(|i| {
            let row: Vec<BigRational> = m.row(i).iter().map(q_to_big).collect();
            let mut l = BigInt::one();
            for q in &row {
                if !q.denom().is_one() {
                    l = l.lcm(q.denom());
                }
            }
            row.into_iter()
                .map(|q| if q.is_zero() { BigInt::zero() } else { q.numer() * (&l / q.denom()) })
                .collect()
        })
        .collect();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..m.cols {
        if r == rows.len() {
            break;
        }
        let Some(piv) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, piv);
        let pivot_row = rows[r].clone();
        let pv = pivot_row[c].clone();
        for row in rows.iter_mut().skip(r + 1) {
            let a = row[c].clone();
            for j in c + 1..m.cols {
                let x = &row[j];
                if a.is_zero() {
                    if !x.is_zero() {
                        row[j] = (x * &pv) / &prev;
                    }
                } else if x.is_zero() && pivot_row[j].is_zero() {
                    continue;
                } else {
                    row[j] = (x * &pv - &a * &pivot_row[j]) / &prev;
                }
            }
            row[c] = BigInt::zero();
        }
        prev = pv;
        r += 1;
    }
    r
}

/// Basis of `{v : m v = 0}` read off the reduced echelon form: one vector per
/// free column, with a 1 in that column.
pub fn kernel_basis(m: &ExactMatrix) -> Vec<Vec<ExactScalar>> {
    let rr = rref(m);
    kernel_from_rref(&rr, m.cols)
}

fn kernel_from_rref(rr: &Rref, cols: usize) -> Vec<Vec<ExactScalar>> {
    let f = rr.matrix.field;
    let mut is_pivot = vec![None; cols];
    for (r, &c) in rr.pivots.iter().enumerate() {
        is_pivot[c] = Some(r);
    }
    let mut out = Vec::new();
    for free in 0..cols {
        if is_pivot[free].is_some() {
            continue;
        }
        let mut v = vec![f.zero(); cols];
        v[free] = f.one();
        for (r, &c) in rr.pivots.iter().enumerate() {
            v[c] = f.neg(rr.matrix.get(r, free));
        }
        out.push(v);
    }
    out
}

/// A basis of the column space: the original columns at pivot positions.
pub fn image_basis(m: &ExactMatrix) -> Vec<Vec<ExactScalar>> {
    rref(m).pivots.iter().map(|&c| m.column(c)).collect()
}

/// Solution set of `m x = b`, or `None` when inconsistent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub particular: Vec<ExactScalar>,
    pub kernel: Vec<Vec<ExactScalar>>,
}

pub fn solve(m: &ExactMatrix, b: &[ExactScalar]) -> Result<Option<Solution>> {
    if b.len() != m.rows {
        return Err(LinalgError::DimensionMismatch(format!(
            "right-hand side of length {} for {} rows",
            b.len(),
            m.rows
        )));
    }
    let f = m.field;
    let aug = m.hstack(&ExactMatrix::column_vector(f, b))?;
    let rr = rref(&aug);
    if rr.pivots.last() == Some(&m.cols) {
        return Ok(None);
    }
    let mut x = vec![f.zero(); m.cols];
    for (r, &c) in rr.pivots.iter().enumerate() {
        x[c] = rr.matrix.get(r, m.cols).clone();
    }
    let kernel = kernel_from_rref(&rr, m.cols);
    Ok(Some(Solution { particular: x, kernel }))
}

/// `rank(ambient) - rank(inner)` after checking that the columns of `inner`
/// lie in the column span of `ambient`.
pub fn quotient_dim(ambient: &ExactMatrix, inner: &ExactMatrix) -> Result<usize> {
    ambient.same_field(inner)?;
    if ambient.rows != inner.rows {
        return Err(LinalgError::DimensionMismatch("ambient and inner live in different spaces".into()));
    }
    let ra = rank(ambient);
    if inner.cols > 0 && rank(&ambient.hstack(inner)?) != ra {
        return Err(LinalgError::NotContained);
    }
    Ok(ra - rank(inner))
}

/// Column-compressed sparse matrix; each column holds `(row, value)` pairs
/// sorted by row, with no stored zeros. Differential and clause matrices are
/// kept in this form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    columns: Vec<Vec<(usize, ExactScalar)>>,
}

impl SparseMatrix {
    pub fn zeros(field: FieldSpec, rows: usize, cols: usize) -> Self {
        SparseMatrix { field, rows, cols, columns: vec![Vec::new(); cols] }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        SparseMatrix { field, rows: n, cols: n, columns: (0..n).map(|i| vec![(i, field.one())]).collect() }
    }

    /// From per-column entry lists in any order; duplicates are summed.
    pub fn from_column_entries(field: FieldSpec, rows: usize, columns: Vec<Vec<(usize, ExactScalar)>>) -> Self {
        let cols = columns.len();
        let columns = columns
            .into_iter()
            .map(|mut c| {
                c.sort_by_key(|e| e.0);
                let mut out: Vec<(usize, ExactScalar)> = Vec::with_capacity(c.len());
                for (i, v) in c {
                    match out.last_mut() {
                        Some((j, w)) if *j == i => field.add_assign(w, &v),
                        _ => out.push((i, v)),
                    }
                }
                out.retain(|(_, v)| !field.is_zero(v));
                out
            })
            .collect();
        SparseMatrix { field, rows, cols, columns }
    }

    pub fn from_dense(m: &ExactMatrix) -> Self {
        SparseMatrix { field: m.field, rows: m.rows, cols: m.cols, columns: m.column_nonzeros() }
    }

    pub fn to_dense(&self) -> ExactMatrix {
        let mut m = ExactMatrix::zeros(self.field, self.rows, self.cols);
        for (j, col) in self.columns.iter().enumerate() {
            for (i, v) in col {
                m.set(*i, j, v.clone());
            }
        }
        m
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn column(&self, j: usize) -> &[(usize, ExactScalar)] {
        &self.columns[j]
    }
    pub fn nnz(&self) -> usize {
        self.columns.iter().map(|c| c.len()).sum()
    }
    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.is_empty())
    }

    pub fn get(&self, i: usize, j: usize) -> ExactScalar {
        match self.columns[j].binary_search_by_key(&i, |e| e.0) {
            Ok(k) => self.columns[j][k].1.clone(),
            Err(_) => self.field.zero(),
        }
    }

    /// Dense copy of column `j`.
    pub fn column_dense(&self, j: usize) -> Vec<ExactScalar> {
        let mut v = vec![self.field.zero(); self.rows];
        for (i, x) in &self.columns[j] {
            v[*i] = x.clone();
        }
        v
    }

    fn check(&self, other: &SparseMatrix) -> Result<()> {
        if self.field != other.field {
            return Err(LinalgError::FieldMismatch(self.field, other.field));
        }
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, other: &SparseMatrix, c: &ExactScalar) -> Result<SparseMatrix> {
        self.check(other)?;
        let f = self.field;
        let columns = self
            .columns
            .iter()
            .zip(&other.columns)
            .map(|(a, b)| {
                let mut out = Vec::with_capacity(a.len() + b.len());
                let (mut i, mut k) = (0, 0);
                while i < a.len() || k < b.len() {
                    if k == b.len() || (i < a.len() && a[i].0 < b[k].0) {
                        out.push(a[i].clone());
                        i += 1;
                    } else if i == a.len() || b[k].0 < a[i].0 {
                        let v = f.mul(c, &b[k].1);
                        if !f.is_zero(&v) {
                            out.push((b[k].0, v));
                        }
                        k += 1;
                    } else {
                        let v = f.add(&a[i].1, &f.mul(c, &b[k].1));
                        if !f.is_zero(&v) {
                            out.push((a[i].0, v));
                        }
                        i += 1;
                        k += 1;
                    }
                }
                out
            })
            .collect();
        Ok(SparseMatrix { field: f, rows: self.rows, cols: self.cols, columns })
    }

    pub fn add(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        self.add_scaled(other, &self.field.one())
    }

    pub fn sub(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        self.add_scaled(other, &self.field.from_i64(-1))
    }

    pub fn scale(&self, c: &ExactScalar) -> SparseMatrix {
        let f = self.field;
        if f.is_zero(c) {
            return SparseMatrix::zeros(f, self.rows, self.cols);
        }
        let columns = self.columns.iter().map(|col| col.iter().map(|(i, v)| (*i, f.mul(c, v))).collect()).collect();
        SparseMatrix { field: f, rows: self.rows, cols: self.cols, columns }
    }

    pub fn neg(&self) -> SparseMatrix {
        self.scale(&self.field.from_i64(-1))
    }

    /// `self * other`.
    pub fn mul(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.field != other.field {
            return Err(LinalgError::FieldMismatch(self.field, other.field));
        }
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = self.field;
        let mut acc: Vec<Option<ExactScalar>> = vec![None; self.rows];
        let mut touched = Vec::new();
        let columns = other
            .columns
            .iter()
            .map(|bcol| {
                for (k, bv) in bcol {
                    for (i, av) in &self.columns[*k] {
                        match &mut acc[*i] {
                            Some(x) => f.add_mul_assign(x, av, bv),
                            slot => {
                                *slot = Some(f.mul(av, bv));
                                touched.push(*i);
                            }
                        }
                    }
                }
                touched.sort_unstable();
                let col: Vec<(usize, ExactScalar)> = touched
                    .drain(..)
                    .filter_map(|i| acc[i].take().filter(|v| !f.is_zero(v)).map(|v| (i, v)))
                    .collect();
                col
            })
            .collect();
        Ok(SparseMatrix { field: f, rows: self.rows, cols: other.cols, columns })
    }

    pub fn mul_vec(&self, v: &[ExactScalar]) -> Result<Vec<ExactScalar>> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch("vector length".into()));
        }
        let f = self.field;
        let mut out = vec![f.zero(); self.rows];
        for (j, x) in v.iter().enumerate() {
            if f.is_zero(x) {
                continue;
            }
            for (i, a) in &self.columns[j] {
                f.add_mul_assign(&mut out[*i], a, x);
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut columns = vec![Vec::new(); self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for (i, v) in col {
                columns[*i].push((j, v.clone()));
            }
        }
        SparseMatrix { field: self.field, rows: self.cols, cols: self.rows, columns }
    }

    /// First column where the two matrices differ.
    pub fn first_differing_column(&self, other: &SparseMatrix) -> Result<Option<usize>> {
        self.check(other)?;
        Ok((0..self.cols).find(|&j| self.columns[j] != other.columns[j]))
    }

    /// Kronecker product, index `(i1 * rows(b) + i2, j1 * cols(b) + j2)`.
    pub fn kron(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.field != other.field {
            return Err(LinalgError::FieldMismatch(self.field, other.field));
        }
        let f = self.field;
        let mut columns = Vec::with_capacity(self.cols * other.cols);
        for a in &self.columns {
            for b in &other.columns {
                let mut col = Vec::with_capacity(a.len() * b.len());
                for (i1, x) in a {
                    for (i2, y) in b {
                        col.push((i1 * other.rows + i2, f.mul(x, y)));
                    }
                }
                columns.push(col);
            }
        }
        Ok(SparseMatrix { field: f, rows: self.rows * other.rows, cols: self.cols * other.cols, columns })
    }

    /// Places `block` with its top-left corner at `(r0, c0)` in a zero
    /// matrix of the given size; used for block assembly.
    pub fn embed(&self, rows: usize, cols: usize, r0: usize, c0: usize) -> SparseMatrix {
        let mut columns = vec![Vec::new(); cols];
        for (j, col) in self.columns.iter().enumerate() {
            columns[c0 + j] = col.iter().map(|(i, v)| (r0 + i, v.clone())).collect();
        }
        SparseMatrix { field: self.field, rows, cols, columns }
    }

    /// Rows `r0..r0+rows`, columns `c0..c0+cols`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> SparseMatrix {
        let columns = (c0..c0 + cols)
            .map(|j| {
                self.columns[j]
                    .iter()
                    .filter(|(i, _)| *i >= r0 && *i < r0 + rows)
                    .map(|(i, v)| (i - r0, v.clone()))
                    .collect()
            })
            .collect();
        SparseMatrix { field: self.field, rows, cols, columns }
    }
}

/// A sparse vector: `(index, value)` pairs sorted by index, no zeros.
pub type SparseVec = Vec<(usize, ExactScalar)>;

/// Incrementally built echelon basis of a span of sparse vectors. Each stored
/// vector has a distinct pivot (its smallest index) normalised to 1, and
/// carries a tag recording it as a combination of the inserted inputs.
#[derive(Debug, Clone)]
pub struct SpanBasis {
    field: FieldSpec,
    tag_dim: usize,
    vecs: Vec<SparseVec>,
    tags: Vec<SparseVec>,
    pivot_of: std::collections::HashMap<usize, usize>,
}

/// Outcome of reducing a vector against a [`SpanBasis`].
#[derive(Debug, Clone)]
pub struct Reduction {
    pub residual: SparseVec,
    /// `v - residual` as a combination of the inserted inputs.
    pub combination: SparseVec,
}

fn sv_axpy(f: FieldSpec, acc: &mut std::collections::BTreeMap<usize, ExactScalar>, c: &ExactScalar, v: &SparseVec) {
    for (i, x) in v {
        let e = acc.entry(*i).or_insert_with(|| f.zero());
        f.add_mul_assign(e, c, x);
        if f.is_zero(e) {
            acc.remove(i);
        }
    }
}

impl SpanBasis {
    /// `tag_dim` is the number of inputs tags refer to.
    pub fn new(field: FieldSpec, tag_dim: usize) -> Self {
        SpanBasis { field, tag_dim, vecs: Vec::new(), tags: Vec::new(), pivot_of: Default::default() }
    }

    pub fn rank(&self) -> usize {
        self.vecs.len()
    }

    pub fn tag_dim(&self) -> usize {
        self.tag_dim
    }

    pub fn vectors(&self) -> &[SparseVec] {
        &self.vecs
    }

    pub fn reduce(&self, v: &SparseVec) -> Reduction {
        let f = self.field;
        let mut work: std::collections::BTreeMap<usize, ExactScalar> = v.iter().cloned().collect();
        let mut comb = std::collections::BTreeMap::new();
        let mut residual = Vec::new();
        let mut cursor = 0usize;
        while let Some((i, x)) = work.range(cursor..).next().map(|(&i, x)| (i, x.clone())) {
            cursor = i + 1;
            if let Some(&k) = self.pivot_of.get(&i) {
                let c = f.neg(&x);
                sv_axpy(f, &mut work, &c, &self.vecs[k]);
                sv_axpy(f, &mut comb, &x, &self.tags[k]);
            } else {
                residual.push((i, x));
            }
        }
        Reduction { residual, combination: comb.into_iter().collect() }
    }

    /// Inserts `v` tagged as input `tag`; returns the residual combination
    /// when `v` already lies in the span (a linear relation among inputs).
    pub fn insert(&mut self, v: &SparseVec, tag: usize) -> Option<SparseVec> {
        self.insert_tagged(v, vec![(tag, self.field.one())])
    }

    /// Like [`SpanBasis::insert`] with an arbitrary tag vector.
    pub fn insert_tagged(&mut self, v: &SparseVec, tag: SparseVec) -> Option<SparseVec> {
        let f = self.field;
        let red = self.reduce(v);
        let mut t: std::collections::BTreeMap<usize, ExactScalar> = tag.into_iter().collect();
        sv_axpy(f, &mut t, &f.neg(&f.one()), &red.combination);
        if red.residual.is_empty() {
            return Some(t.into_iter().collect());
        }
        let inv = f.inv(&red.residual[0].1).expect("nonzero pivot");
        let vec: SparseVec = red.residual.iter().map(|(i, x)| (*i, f.mul(x, &inv))).collect();
        let tag: SparseVec = t.into_iter().map(|(i, x)| (i, f.mul(&x, &inv))).collect();
        self.pivot_of.insert(vec[0].0, self.vecs.len());
        self.vecs.push(vec);
        self.tags.push(tag);
        None
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).residual.is_empty()
    }
}

/// Kernel basis of a sparse matrix; each vector is the relation found when a
/// column turns out dependent on earlier ones, so the result is deterministic.
pub fn sparse_kernel(m: &SparseMatrix) -> Vec<SparseVec> {
    let mut span = SpanBasis::new(m.field, m.cols);
    let mut out = Vec::new();
    for j in 0..m.cols {
        if let Some(rel) = span.insert(&m.columns[j], j) {
            out.push(rel);
        }
    }
    out
}

/// Rank of a sparse matrix.
pub fn sparse_rank(m: &SparseMatrix) -> usize {
    let mut span = SpanBasis::new(m.field, 0);
    for j in 0..m.cols {
        span.insert_tagged(&m.columns[j], Vec::new());
    }
    span.rank()
}

/// Some `x` with `m x = b`, or `None`.
pub fn sparse_solve(m: &SparseMatrix, b: &SparseVec) -> Option<SparseVec> {
    let mut span = SpanBasis::new(m.field, m.cols);
    for j in 0..m.cols {
        span.insert(&m.columns[j], j);
    }
    let red = span.reduce(b);
    red.residual.is_empty().then_some(red.combination)
}

/// Dense coordinates of a sparse vector.
pub fn sv_to_dense(f: FieldSpec, v: &SparseVec, len: usize) -> Vec<ExactScalar> {
    let mut out = vec![f.zero(); len];
    for (i, x) in v {
        out[*i] = x.clone();
    }
    out
}

/// Sparse form of dense coordinates.
pub fn sv_from_dense(f: FieldSpec, v: &[ExactScalar]) -> SparseVec {
    v.iter().enumerate().filter(|(_, x)| !f.is_zero(x)).map(|(i, x)| (i, x.clone())).collect()
}
