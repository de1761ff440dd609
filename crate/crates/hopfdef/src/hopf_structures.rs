//! Structure constants of the ground objects: the bialgebra H, the algebra,
//! coalgebra or bialgebra A, and an action or coaction. Every axiom is a
//! matrix identity, so validation is exact and exhaustive over basis tuples.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact_linalg::{ExactMatrix, FieldSpec};
use crate::tensor_calculus::{self as tc, LinMap, Tag, TensorBasis, TensorError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("unknown catalog entry {0:?}")]
    UnknownCatalogEntry(String),
    #[error("catalog entry {name:?} is not available over {field}: {reason}")]
    FieldUnsupported { name: String, field: FieldSpec, reason: String },
    #[error("package {kind} is missing {what}")]
    Missing { kind: Kind, what: &'static str },
    #[error("package fails validation: {0}")]
    Invalid(String),
}

impl From<crate::exact_linalg::LinalgError> for StructureError {
    fn from(e: crate::exact_linalg::LinalgError) -> Self {
        StructureError::Tensor(e.into())
    }
}

pub type Result<T> = std::result::Result<T, StructureError>;

fn h_basis(n: usize, k: usize) -> TensorBasis {
    TensorBasis::power(Tag::H, n, k)
}

fn a_basis(n: usize, k: usize) -> TensorBasis {
    TensorBasis::power(Tag::A, n, k)
}

/// A finite-dimensional bialgebra, optionally with an antipode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BialgebraData {
    field: FieldSpec,
    dim: usize,
    mul: LinMap,
    comul: LinMap,
    unit: LinMap,
    counit: LinMap,
    antipode: Option<LinMap>,
}

impl BialgebraData {
    pub fn new(
        field: FieldSpec,
        dim: usize,
        mul: ExactMatrix,
        comul: ExactMatrix,
        unit: ExactMatrix,
        counit: ExactMatrix,
        antipode: Option<ExactMatrix>,
    ) -> Result<Self> {
        let mk = |m: ExactMatrix, s, d, what: &str| -> Result<LinMap> {
            LinMap::new(s, d, m).map_err(|e| StructureError::Dimension(format!("{what}: {e}")))
        };
        Ok(BialgebraData {
            field,
            dim,
            mul: mk(mul, h_basis(dim, 2), h_basis(dim, 1), "mu_H")?,
            comul: mk(comul, h_basis(dim, 1), h_basis(dim, 2), "Delta_H")?,
            unit: mk(unit, TensorBasis::ground(), h_basis(dim, 1), "unit of H")?,
            counit: mk(counit, h_basis(dim, 1), TensorBasis::ground(), "counit of H")?,
            antipode: antipode.map(|s| mk(s, h_basis(dim, 1), h_basis(dim, 1), "antipode")).transpose()?,
        })
    }

    /// The one-dimensional bialgebra K.
    pub fn ground(field: FieldSpec) -> Self {
        let one = ExactMatrix::identity(field, 1);
        BialgebraData::new(field, 1, one.clone(), one.clone(), one.clone(), one.clone(), Some(one)).unwrap()
    }

    /// The group Hopf algebra of Z/n, basis `g^0, ..., g^(n-1)`.
    pub fn cyclic_group(field: FieldSpec, n: usize) -> Self {
        let g = group_algebra_parts(field, n);
        let anti = ExactMatrix::from_fn(field, n, n, |r, c| field.from_i64((r == (n - c) % n) as i64));
        BialgebraData::new(field, n, g.mul, g.comul, g.unit, g.counit, Some(anti)).unwrap()
    }

    /// Sweedler's four-dimensional Hopf algebra with basis `1, g, x, gx`:
    /// `g^2 = 1`, `x^2 = 0`, `xg = -gx`, `Delta x = x (x) 1 + g (x) x`.
    pub fn sweedler(field: FieldSpec) -> Self {
        let f = field;
        // g^a x^b has index a + 2b.
        let mul = ExactMatrix::from_fn(f, 4, 16, |r, c| {
            let (i, j) = (c / 4, c % 4);
            let (a, b, cc, d) = (i % 2, i / 2, j % 2, j / 2);
            if b + d > 1 {
                return f.zero();
            }
            let target = (a + cc) % 2 + 2 * (b + d);
            if r != target {
                return f.zero();
            }
            f.from_i64(if b * cc == 1 { -1 } else { 1 })
        });
        let mut comul = ExactMatrix::zeros(f, 16, 4);
        let one = f.one();
        comul.set(0, 0, one.clone()); // 1 -> 1 (x) 1
        comul.set(4 + 1, 1, one.clone()); // g -> g (x) g
        comul.set(2 * 4, 2, one.clone()); // x -> x (x) 1
        comul.set(4 + 2, 2, one.clone()); //    + g (x) x
        comul.set(3 * 4 + 1, 3, one.clone()); // gx -> gx (x) g
        comul.set(3, 3, one.clone()); //     + 1 (x) gx
        let unit = ExactMatrix::from_fn(f, 4, 1, |r, _| f.from_i64((r == 0) as i64));
        let counit = ExactMatrix::from_fn(f, 1, 4, |_, c| f.from_i64((c < 2) as i64));
        let mut anti = ExactMatrix::zeros(f, 4, 4);
        anti.set(0, 0, one.clone());
        anti.set(1, 1, one.clone());
        anti.set(3, 2, f.from_i64(-1)); // S(x) = -gx
        anti.set(2, 3, one); // S(gx) = x
        BialgebraData::new(f, 4, mul, comul, unit, counit, Some(anti)).unwrap()
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn mul(&self) -> &LinMap {
        &self.mul
    }
    pub fn comul(&self) -> &LinMap {
        &self.comul
    }
    pub fn unit(&self) -> &LinMap {
        &self.unit
    }
    pub fn counit(&self) -> &LinMap {
        &self.counit
    }
    pub fn antipode(&self) -> Option<&LinMap> {
        self.antipode.as_ref()
    }

    /// Same constants with `mul` and `comul` replaced; used for mutation
    /// experiments.
    pub fn with_maps(&self, mul: LinMap, comul: LinMap) -> Self {
        BialgebraData { mul, comul, ..self.clone() }
    }

    pub fn as_algebra(&self) -> AlgebraData {
        AlgebraData { field: self.field, dim: self.dim, mul: self.mul.retag(a_basis(self.dim, 2), a_basis(self.dim, 1)).unwrap(), unit: Some(self.unit.retag(TensorBasis::ground(), a_basis(self.dim, 1)).unwrap()) }
    }

    pub fn as_coalgebra(&self) -> CoalgebraData {
        CoalgebraData { field: self.field, dim: self.dim, comul: self.comul.retag(a_basis(self.dim, 1), a_basis(self.dim, 2)).unwrap(), counit: Some(self.counit.retag(a_basis(self.dim, 1), TensorBasis::ground()).unwrap()) }
    }
}

struct GroupParts {
    mul: ExactMatrix,
    comul: ExactMatrix,
    unit: ExactMatrix,
    counit: ExactMatrix,
}

fn group_algebra_parts(f: FieldSpec, n: usize) -> GroupParts {
    GroupParts {
        mul: ExactMatrix::from_fn(f, n, n * n, |r, c| f.from_i64((r == (c / n + c % n) % n) as i64)),
        comul: ExactMatrix::from_fn(f, n * n, n, |r, c| f.from_i64((r == c * n + c) as i64)),
        unit: ExactMatrix::from_fn(f, n, 1, |r, _| f.from_i64((r == 0) as i64)),
        counit: ExactMatrix::from_fn(f, 1, n, |_, _| f.one()),
    }
}

/// An associative algebra A; the unit is optional.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraData {
    field: FieldSpec,
    dim: usize,
    mul: LinMap,
    unit: Option<LinMap>,
}

impl AlgebraData {
    pub fn new(field: FieldSpec, dim: usize, mul: ExactMatrix, unit: Option<ExactMatrix>) -> Result<Self> {
        let mul = LinMap::new(a_basis(dim, 2), a_basis(dim, 1), mul)
            .map_err(|e| StructureError::Dimension(format!("mu_A: {e}")))?;
        let unit = unit
            .map(|u| LinMap::new(TensorBasis::ground(), a_basis(dim, 1), u))
            .transpose()
            .map_err(|e| StructureError::Dimension(format!("unit of A: {e}")))?;
        Ok(AlgebraData { field, dim, mul, unit })
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn mul(&self) -> &LinMap {
        &self.mul
    }
    pub fn unit(&self) -> Option<&LinMap> {
        self.unit.as_ref()
    }
    pub fn with_mul(&self, mul: LinMap) -> Self {
        AlgebraData { mul, ..self.clone() }
    }
}

/// A coassociative coalgebra A; the counit is optional.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoalgebraData {
    field: FieldSpec,
    dim: usize,
    comul: LinMap,
    counit: Option<LinMap>,
}

impl CoalgebraData {
    pub fn new(field: FieldSpec, dim: usize, comul: ExactMatrix, counit: Option<ExactMatrix>) -> Result<Self> {
        let comul = LinMap::new(a_basis(dim, 1), a_basis(dim, 2), comul)
            .map_err(|e| StructureError::Dimension(format!("Delta_A: {e}")))?;
        let counit = counit
            .map(|u| LinMap::new(a_basis(dim, 1), TensorBasis::ground(), u))
            .transpose()
            .map_err(|e| StructureError::Dimension(format!("counit of A: {e}")))?;
        Ok(CoalgebraData { field, dim, comul, counit })
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn comul(&self) -> &LinMap {
        &self.comul
    }
    pub fn counit(&self) -> Option<&LinMap> {
        self.counit.as_ref()
    }
    pub fn with_comul(&self, comul: LinMap) -> Self {
        CoalgebraData { comul, ..self.clone() }
    }
}

/// An algebra and a coalgebra on the same space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BialgebraTargetData {
    pub algebra: AlgebraData,
    pub coalgebra: CoalgebraData,
}

/// `lambda: H (x) A -> A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionData {
    map: LinMap,
}

impl ActionData {
    pub fn new(h_dim: usize, a_dim: usize, m: ExactMatrix) -> Result<Self> {
        let map = LinMap::new(h_basis(h_dim, 1).concat(&a_basis(a_dim, 1)), a_basis(a_dim, 1), m)
            .map_err(|e| StructureError::Dimension(format!("action: {e}")))?;
        Ok(ActionData { map })
    }

    /// `lambda(x)(a) = epsilon(x) a`.
    pub fn counit_action(h: &BialgebraData, a_dim: usize) -> Self {
        let f = h.field();
        let eps = h.counit().retag(h_basis(h.dim(), 1), TensorBasis::ground()).unwrap();
        let m = eps.tensor(&LinMap::identity(f, a_basis(a_dim, 1))).unwrap();
        ActionData { map: m.retag(h_basis(h.dim(), 1).concat(&a_basis(a_dim, 1)), a_basis(a_dim, 1)).unwrap() }
    }

    pub fn map(&self) -> &LinMap {
        &self.map
    }
    pub fn from_map(map: LinMap) -> Self {
        ActionData { map }
    }
}

/// `rho: A -> H (x) A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoactionData {
    map: LinMap,
}

impl CoactionData {
    pub fn new(h_dim: usize, a_dim: usize, m: ExactMatrix) -> Result<Self> {
        let map = LinMap::new(a_basis(a_dim, 1), h_basis(h_dim, 1).concat(&a_basis(a_dim, 1)), m)
            .map_err(|e| StructureError::Dimension(format!("coaction: {e}")))?;
        Ok(CoactionData { map })
    }

    /// `rho(a) = 1_H (x) a`.
    pub fn trivial(h: &BialgebraData, a_dim: usize) -> Self {
        let f = h.field();
        let m = h.unit().tensor(&LinMap::identity(f, a_basis(a_dim, 1))).unwrap();
        CoactionData { map: m.retag(a_basis(a_dim, 1), h_basis(h.dim(), 1).concat(&a_basis(a_dim, 1))).unwrap() }
    }

    pub fn map(&self) -> &LinMap {
        &self.map
    }
    pub fn from_map(map: LinMap) -> Self {
        CoactionData { map }
    }
}

/// The six structures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
pub enum Kind {
    MA,
    MC,
    CA,
    CC,
    MB,
    CB,
}

impl Kind {
    pub const ALL: [Kind; 6] = [Kind::MA, Kind::MC, Kind::CA, Kind::CC, Kind::MB, Kind::CB];

    pub fn uses_action(self) -> bool {
        matches!(self, Kind::MA | Kind::MC | Kind::MB)
    }
    pub fn uses_algebra(self) -> bool {
        matches!(self, Kind::MA | Kind::CA | Kind::MB | Kind::CB)
    }
    pub fn uses_coalgebra(self) -> bool {
        matches!(self, Kind::MC | Kind::CC | Kind::MB | Kind::CB)
    }
    pub fn is_tricomplex(self) -> bool {
        matches!(self, Kind::MB | Kind::CB)
    }

    /// Kinds whose complexes can be built from a package of this kind.
    pub fn views(self) -> &'static [Kind] {
        match self {
            Kind::MB => &[Kind::MB, Kind::MA, Kind::MC],
            Kind::CB => &[Kind::CB, Kind::CA, Kind::CC],
            Kind::MA => &[Kind::MA],
            Kind::MC => &[Kind::MC],
            Kind::CA => &[Kind::CA],
            Kind::CC => &[Kind::CC],
        }
    }

    pub fn parse(s: &str) -> Option<Kind> {
        match s.to_ascii_uppercase().as_str() {
            "MA" => Some(Kind::MA),
            "MC" => Some(Kind::MC),
            "CA" => Some(Kind::CA),
            "CC" => Some(Kind::CC),
            "MB" => Some(Kind::MB),
            "CB" => Some(Kind::CB),
            _ => None,
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Kind::MA => "MA",
            Kind::MC => "MC",
            Kind::CA => "CA",
            Kind::CC => "CC",
            Kind::MB => "MB",
            Kind::CB => "CB",
        };
        f.write_str(s)
    }
}

/// H, A and the (co)action, tagged with the kind of structure they form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructurePackage {
    pub name: String,
    pub kind: Kind,
    pub h: BialgebraData,
    pub algebra: Option<AlgebraData>,
    pub coalgebra: Option<CoalgebraData>,
    pub action: Option<ActionData>,
    pub coaction: Option<CoactionData>,
}

impl StructurePackage {
    pub fn field(&self) -> FieldSpec {
        self.h.field()
    }

    pub fn a_dim(&self) -> usize {
        self.algebra
            .as_ref()
            .map(|a| a.dim())
            .or_else(|| self.coalgebra.as_ref().map(|c| c.dim()))
            .unwrap_or(0)
    }

    pub fn algebra(&self) -> Result<&AlgebraData> {
        self.algebra.as_ref().ok_or(StructureError::Missing { kind: self.kind, what: "an algebra structure on A" })
    }
    pub fn coalgebra(&self) -> Result<&CoalgebraData> {
        self.coalgebra.as_ref().ok_or(StructureError::Missing { kind: self.kind, what: "a coalgebra structure on A" })
    }
    pub fn action(&self) -> Result<&ActionData> {
        self.action.as_ref().ok_or(StructureError::Missing { kind: self.kind, what: "an action" })
    }
    pub fn coaction(&self) -> Result<&CoactionData> {
        self.coaction.as_ref().ok_or(StructureError::Missing { kind: self.kind, what: "a coaction" })
    }

    /// The same data regarded as a structure of another kind, e.g. a
    /// module-bialgebra as a module-algebra.
    pub fn view(&self, kind: Kind) -> Result<StructurePackage> {
        if !self.kind.views().contains(&kind) {
            return Err(StructureError::Invalid(format!("a {} package cannot be read as {}", self.kind, kind)));
        }
        let mut p = self.clone();
        p.kind = kind;
        if !kind.uses_algebra() {
            p.algebra = None;
        }
        if !kind.uses_coalgebra() {
            p.coalgebra = None;
        }
        Ok(p)
    }

    /// Runs the validator of the package's kind.
    pub fn validate(&self) -> Result<ValidationReport> {
        match self.kind {
            Kind::MA => validate_module_algebra(&self.h, self.algebra()?, self.action()?),
            Kind::MC => validate_module_coalgebra(&self.h, self.coalgebra()?, self.action()?),
            Kind::CA => validate_comodule_algebra(&self.h, self.algebra()?, self.coaction()?),
            Kind::CC => validate_comodule_coalgebra(&self.h, self.coalgebra()?, self.coaction()?),
            Kind::MB => validate_module_bialgebra(
                &self.h,
                &BialgebraTargetData { algebra: self.algebra()?.clone(), coalgebra: self.coalgebra()?.clone() },
                self.action()?,
            ),
            Kind::CB => validate_comodule_bialgebra(
                &self.h,
                &BialgebraTargetData { algebra: self.algebra()?.clone(), coalgebra: self.coalgebra()?.clone() },
                self.coaction()?,
            ),
        }
    }
}

/// First basis input at which an identity fails, with both sides there.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub input: Vec<usize>,
    pub lhs: Vec<String>,
    pub rhs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomCheck {
    pub axiom: String,
    pub passed: bool,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<AxiomCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&AxiomCheck> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn get(&self, axiom: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.axiom == axiom)
    }

    fn extend(&mut self, other: ValidationReport) {
        self.checks.extend(other.checks);
    }

    fn check(&mut self, axiom: &str, lhs: &LinMap, rhs: &LinMap) -> Result<()> {
        self.checks.push(compare(axiom, lhs, rhs)?);
        Ok(())
    }
}

/// Compares two maps with the same source; the witness is the first source
/// basis tuple (lexicographic) where they differ.
pub fn compare(axiom: &str, lhs: &LinMap, rhs: &LinMap) -> Result<AxiomCheck> {
    if lhs.src().dim() != rhs.src().dim() || lhs.dst().dim() != rhs.dst().dim() {
        return Err(StructureError::Dimension(format!("sides of {axiom} have different shapes")));
    }
    let col = lhs.matrix().first_differing_column(rhs.matrix())?;
    let witness = col.map(|j| Witness {
        input: lhs.src().decode(j),
        lhs: lhs.matrix().column(j).iter().map(|x| x.to_string()).collect(),
        rhs: rhs.matrix().column(j).iter().map(|x| x.to_string()).collect(),
    });
    Ok(AxiomCheck { axiom: axiom.to_string(), passed: witness.is_none(), witness })
}

fn id(f: FieldSpec, n: usize) -> LinMap {
    LinMap::identity(f, TensorBasis::single(Tag::A, n))
}

/// `Id_L (x) tau_(X,Y) (x) Id_R`.
fn middle_twist(f: FieldSpec, l: usize, x: usize, y: usize, r: usize) -> LinMap {
    id(f, l).tensor(&tc::twist_dims(f, x, y)).unwrap().tensor(&id(f, r)).unwrap()
}

fn flat(m: &LinMap) -> LinMap {
    let (s, d) = (m.src().dim(), m.dst().dim());
    m.retag(TensorBasis::single(Tag::A, s), TensorBasis::single(Tag::A, d)).unwrap()
}

fn flat_keep_src(m: &LinMap) -> LinMap {
    m.retag(m.src().clone(), TensorBasis::single(Tag::A, m.dst().dim())).unwrap()
}

/// Checks a bialgebra: (co)associativity, (co)unit laws, compatibility and,
/// when present, the antipode.
pub fn validate_bialgebra(h: &BialgebraData) -> Result<ValidationReport> {
    let f = h.field();
    let n = h.dim();
    let mu = flat(h.mul());
    let de = flat(h.comul());
    let eta = flat(h.unit());
    let eps = flat(h.counit());
    let i = id(f, n);
    let k = id(f, 1);
    let mut r = ValidationReport::default();
    let src3 = h_basis(n, 3);
    let on = |m: LinMap, src: &TensorBasis| m.retag(src.clone(), TensorBasis::single(Tag::A, m.dst().dim())).unwrap();
    r.check(
        "associativity",
        &on(mu.compose(&mu.tensor(&i)?)?, &src3),
        &on(mu.compose(&i.tensor(&mu)?)?, &src3),
    )?;
    r.check("left unit", &on(mu.compose(&eta.tensor(&i)?)?, &h_basis(n, 1)), &on(i.clone(), &h_basis(n, 1)))?;
    r.check("right unit", &on(mu.compose(&i.tensor(&eta)?)?, &h_basis(n, 1)), &on(i.clone(), &h_basis(n, 1)))?;
    r.check(
        "coassociativity",
        &on(de.tensor(&i)?.compose(&de)?, &h_basis(n, 1)),
        &on(i.tensor(&de)?.compose(&de)?, &h_basis(n, 1)),
    )?;
    r.check("left counit", &on(eps.tensor(&i)?.compose(&de)?, &h_basis(n, 1)), &on(i.clone(), &h_basis(n, 1)))?;
    r.check("right counit", &on(i.tensor(&eps)?.compose(&de)?, &h_basis(n, 1)), &on(i.clone(), &h_basis(n, 1)))?;
    let mu2 = mu.tensor(&mu)?.compose(&middle_twist(f, n, n, n, n))?;
    r.check(
        "comultiplication is multiplicative",
        &on(de.compose(&mu)?, &h_basis(n, 2)),
        &on(mu2.compose(&de.tensor(&de)?)?, &h_basis(n, 2)),
    )?;
    r.check(
        "comultiplication preserves unit",
        &on(de.compose(&eta)?, &TensorBasis::ground()),
        &on(eta.tensor(&eta)?, &TensorBasis::ground()),
    )?;
    r.check(
        "counit is multiplicative",
        &on(eps.compose(&mu)?, &h_basis(n, 2)),
        &on(eps.tensor(&eps)?, &h_basis(n, 2)),
    )?;
    r.check("counit preserves unit", &on(eps.compose(&eta)?, &TensorBasis::ground()), &on(k, &TensorBasis::ground()))?;
    if let Some(s) = h.antipode() {
        let s = flat(s);
        let ee = eta.compose(&eps)?;
        r.check(
            "left antipode",
            &on(mu.compose(&s.tensor(&i)?)?.compose(&de)?, &h_basis(n, 1)),
            &on(ee.clone(), &h_basis(n, 1)),
        )?;
        r.check(
            "right antipode",
            &on(mu.compose(&i.tensor(&s)?)?.compose(&de)?, &h_basis(n, 1)),
            &on(ee, &h_basis(n, 1)),
        )?;
    }
    Ok(r)
}

pub fn validate_algebra(a: &AlgebraData) -> Result<ValidationReport> {
    let f = a.field();
    let n = a.dim();
    let mu = flat(a.mul());
    let i = id(f, n);
    let mut r = ValidationReport::default();
    let src3 = a_basis(n, 3);
    r.check(
        "A associativity",
        &mu.compose(&mu.tensor(&i)?)?.retag(src3.clone(), a_basis(n, 1))?,
        &mu.compose(&i.tensor(&mu)?)?.retag(src3, a_basis(n, 1))?,
    )?;
    if let Some(u) = a.unit() {
        let u = flat(u);
        r.check("A left unit", &flat_keep_src(&mu.compose(&u.tensor(&i)?)?), &flat_keep_src(&i))?;
        r.check("A right unit", &flat_keep_src(&mu.compose(&i.tensor(&u)?)?), &flat_keep_src(&i))?;
    }
    Ok(r)
}

pub fn validate_coalgebra(c: &CoalgebraData) -> Result<ValidationReport> {
    let f = c.field();
    let n = c.dim();
    let de = flat(c.comul());
    let i = id(f, n);
    let mut r = ValidationReport::default();
    r.check(
        "A coassociativity",
        &de.tensor(&i)?.compose(&de)?.retag(a_basis(n, 1), a_basis(n, 3))?,
        &i.tensor(&de)?.compose(&de)?.retag(a_basis(n, 1), a_basis(n, 3))?,
    )?;
    if let Some(e) = c.counit() {
        let e = flat(e);
        r.check("A left counit", &flat_keep_src(&e.tensor(&i)?.compose(&de)?), &flat_keep_src(&i))?;
        r.check("A right counit", &flat_keep_src(&i.tensor(&e)?.compose(&de)?), &flat_keep_src(&i))?;
    }
    Ok(r)
}

fn validate_target_bialgebra(b: &BialgebraTargetData) -> Result<ValidationReport> {
    let a = &b.algebra;
    let c = &b.coalgebra;
    if a.dim() != c.dim() || a.field() != c.field() {
        return Err(StructureError::Dimension("algebra and coalgebra on different spaces".into()));
    }
    let f = a.field();
    let n = a.dim();
    let mu = flat(a.mul());
    let de = flat(c.comul());
    let mut r = validate_algebra(a)?;
    r.extend(validate_coalgebra(c)?);
    let mu2 = mu.tensor(&mu)?.compose(&middle_twist(f, n, n, n, n))?;
    r.check(
        "A comultiplication is multiplicative",
        &de.compose(&mu)?.retag(a_basis(n, 2), a_basis(n, 2))?,
        &mu2.compose(&de.tensor(&de)?)?.retag(a_basis(n, 2), a_basis(n, 2))?,
    )?;
    if let (Some(u), Some(e)) = (a.unit(), c.counit()) {
        let (u, e) = (flat(u), flat(e));
        r.check("A comultiplication preserves unit", &flat_keep_src(&de.compose(&u)?), &flat_keep_src(&u.tensor(&u)?))?;
        r.check(
            "A counit is multiplicative",
            &e.compose(&mu)?.retag(a_basis(n, 2), TensorBasis::ground())?,
            &e.tensor(&e)?.retag(a_basis(n, 2), TensorBasis::ground())?,
        )?;
        r.check("A counit preserves unit", &flat_keep_src(&e.compose(&u)?), &flat_keep_src(&id(f, 1)))?;
    }
    Ok(r)
}

fn check_dims(h: &BialgebraData, a_dim: usize, m: &LinMap, action: bool) -> Result<()> {
    let (s, d) = if action { (h.dim() * a_dim, a_dim) } else { (a_dim, h.dim() * a_dim) };
    if m.src().dim() != s || m.dst().dim() != d || m.field() != h.field() {
        return Err(StructureError::Dimension(format!(
            "{} has shape {} -> {}, expected {} -> {}",
            if action { "action" } else { "coaction" },
            m.src().dim(),
            m.dst().dim(),
            s,
            d
        )));
    }
    Ok(())
}

/// The module axioms `lambda(xy) = lambda(x) lambda(y)` and `lambda(1) = Id`.
pub fn validate_action(h: &BialgebraData, a_dim: usize, act: &ActionData) -> Result<ValidationReport> {
    check_dims(h, a_dim, act.map(), true)?;
    let f = h.field();
    let (nh, na) = (h.dim(), a_dim);
    let lam = flat(act.map());
    let ih = id(f, nh);
    let ia = id(f, na);
    let mut r = ValidationReport::default();
    let src = h_basis(nh, 2).concat(&a_basis(na, 1));
    r.check(
        "action is multiplicative",
        &lam.compose(&flat(h.mul()).tensor(&ia)?)?.retag(src.clone(), a_basis(na, 1))?,
        &lam.compose(&ih.tensor(&lam)?)?.retag(src, a_basis(na, 1))?,
    )?;
    r.check(
        "action is unital",
        &flat_keep_src(&lam.compose(&flat(h.unit()).tensor(&ia)?)?),
        &flat_keep_src(&ia),
    )?;
    Ok(r)
}

/// The comodule axioms: coassociativity and counitality of `rho`.
pub fn validate_coaction(h: &BialgebraData, a_dim: usize, co: &CoactionData) -> Result<ValidationReport> {
    check_dims(h, a_dim, co.map(), false)?;
    let f = h.field();
    let (nh, na) = (h.dim(), a_dim);
    let rho = flat(co.map());
    let ih = id(f, nh);
    let ia = id(f, na);
    let mut r = ValidationReport::default();
    let dst = h_basis(nh, 2).concat(&a_basis(na, 1));
    r.check(
        "coaction is coassociative",
        &ih.tensor(&rho)?.compose(&rho)?.retag(a_basis(na, 1), dst.clone())?,
        &flat(h.comul()).tensor(&ia)?.compose(&rho)?.retag(a_basis(na, 1), dst)?,
    )?;
    r.check(
        "coaction is counital",
        &flat_keep_src(&flat(h.counit()).tensor(&ia)?.compose(&rho)?),
        &flat_keep_src(&ia),
    )?;
    Ok(r)
}

/// `rho^n: A^n -> H (x) A^n`, the diagonal coaction on a tensor power.
pub fn rho_power(h: &BialgebraData, a_dim: usize, rho: &LinMap, n: usize) -> Result<LinMap> {
    let f = h.field();
    let nh = h.dim();
    let rho = flat(rho);
    let mut maps = Vec::new();
    for _ in 0..n {
        maps.push(rho.clone());
    }
    let refs: Vec<&LinMap> = maps.iter().collect();
    let all = tc::tensor_all(f, &refs)?;
    // (H (x) A)^n -> H^n (x) A^n
    let src = TensorBasis::new((0..n).flat_map(|_| [(Tag::H, nh), (Tag::A, a_dim)]).collect());
    let all = all.retag(a_basis(a_dim, n), src.clone())?;
    let order: Vec<usize> = (0..n).map(|i| 2 * i).chain((0..n).map(|i| 2 * i + 1)).collect();
    let shuffle = tc::permutation(f, &src, &order)?;
    let mu_n = if n == 0 {
        flat(h.unit())
    } else {
        flat(&tc::iterated_mul(&flat(h.mul()), n, None)?)
    };
    let mu_n = mu_n.tensor(&LinMap::identity(f, TensorBasis::single(Tag::A, a_dim.pow(n as u32))))?;
    let out = mu_n.compose(&flat(&shuffle.compose(&all)?))?;
    Ok(out.retag(a_basis(a_dim, n), TensorBasis::single(Tag::H, nh).concat(&a_basis(a_dim, n)))?)
}

pub fn validate_module_algebra(h: &BialgebraData, a: &AlgebraData, act: &ActionData) -> Result<ValidationReport> {
    let f = h.field();
    let (nh, na) = (h.dim(), a.dim());
    let mut r = validate_bialgebra(h)?;
    r.extend(validate_algebra(a)?);
    r.extend(validate_action(h, na, act)?);
    let lam = flat(act.map());
    let mu = flat(a.mul());
    let ia = id(f, na);
    // lambda(x)(ab) = sum lambda(x_(1))(a) lambda(x_(2))(b)
    let spread = flat(h.comul()).tensor(&ia)?.tensor(&ia)?;
    let rhs = mu.compose(&lam.tensor(&lam)?)?.compose(&middle_twist(f, nh, nh, na, na).compose(&flat(&spread))?)?;
    let lhs = lam.compose(&id(f, nh).tensor(&mu)?)?;
    let src = TensorBasis::single(Tag::H, nh).concat(&a_basis(na, 2));
    r.check(
        "action respects multiplication",
        &lhs.retag(src.clone(), a_basis(na, 1))?,
        &rhs.retag(src, a_basis(na, 1))?,
    )?;
    if let Some(u) = a.unit() {
        let u = flat(u);
        let lhs = lam.compose(&id(f, nh).tensor(&u)?)?;
        let rhs = u.compose(&flat(h.counit()))?;
        r.check("action fixes the unit", &flat_keep_src(&lhs), &flat_keep_src(&rhs))?;
    }
    Ok(r)
}

pub fn validate_module_coalgebra(h: &BialgebraData, c: &CoalgebraData, act: &ActionData) -> Result<ValidationReport> {
    let f = h.field();
    let (nh, na) = (h.dim(), c.dim());
    let mut r = validate_bialgebra(h)?;
    r.extend(validate_coalgebra(c)?);
    r.extend(validate_action(h, na, act)?);
    let lam = flat(act.map());
    let de = flat(c.comul());
    let lhs = de.compose(&lam)?;
    let rhs = lam.tensor(&lam)?.compose(&middle_twist(f, nh, nh, na, na))?.compose(&flat(h.comul()).tensor(&de)?)?;
    let src = TensorBasis::single(Tag::H, nh).concat(&a_basis(na, 1));
    r.check(
        "comultiplication is H-linear",
        &lhs.retag(src.clone(), a_basis(na, 2))?,
        &rhs.retag(src.clone(), a_basis(na, 2))?,
    )?;
    if let Some(e) = c.counit() {
        let e = flat(e);
        let lhs = e.compose(&lam)?;
        let rhs = flat(h.counit()).tensor(&e)?;
        r.check(
            "counit is H-linear",
            &lhs.retag(src.clone(), TensorBasis::ground())?,
            &rhs.retag(src, TensorBasis::ground())?,
        )?;
    }
    Ok(r)
}

pub fn validate_comodule_algebra(h: &BialgebraData, a: &AlgebraData, co: &CoactionData) -> Result<ValidationReport> {
    let f = h.field();
    let (nh, na) = (h.dim(), a.dim());
    let mut r = validate_bialgebra(h)?;
    r.extend(validate_algebra(a)?);
    r.extend(validate_coaction(h, na, co)?);
    let rho = flat(co.map());
    let mu = flat(a.mul());
    let lhs = rho.compose(&mu)?;
    let rhs = flat(h.mul()).tensor(&mu)?.compose(&middle_twist(f, nh, na, nh, na))?.compose(&rho.tensor(&rho)?)?;
    let dst = TensorBasis::single(Tag::H, nh).concat(&a_basis(na, 1));
    r.check(
        "multiplication is H-colinear",
        &lhs.retag(a_basis(na, 2), dst.clone())?,
        &rhs.retag(a_basis(na, 2), dst.clone())?,
    )?;
    if let Some(u) = a.unit() {
        let u = flat(u);
        r.check(
            "coaction fixes the unit",
            &rho.compose(&u)?.retag(TensorBasis::ground(), dst.clone())?,
            &flat(h.unit()).tensor(&u)?.retag(TensorBasis::ground(), dst)?,
        )?;
    }
    Ok(r)
}

pub fn validate_comodule_coalgebra(h: &BialgebraData, c: &CoalgebraData, co: &CoactionData) -> Result<ValidationReport> {
    let f = h.field();
    let (nh, na) = (h.dim(), c.dim());
    let mut r = validate_bialgebra(h)?;
    r.extend(validate_coalgebra(c)?);
    r.extend(validate_coaction(h, na, co)?);
    let rho = flat(co.map());
    let de = flat(c.comul());
    let lhs = id(f, nh).tensor(&de)?.compose(&rho)?;
    let rhs = flat(h.mul())
        .tensor(&id(f, na * na))?
        .compose(&middle_twist(f, nh, na, nh, na))?
        .compose(&rho.tensor(&rho)?)?
        .compose(&de)?;
    let dst = TensorBasis::single(Tag::H, nh).concat(&a_basis(na, 2));
    r.check(
        "comultiplication is H-colinear",
        &lhs.retag(a_basis(na, 1), dst.clone())?,
        &rhs.retag(a_basis(na, 1), dst)?,
    )?;
    if let Some(e) = c.counit() {
        let e = flat(e);
        let lhs = id(f, nh).tensor(&e)?.compose(&rho)?;
        let rhs = flat(h.unit()).compose(&e)?;
        let dst = TensorBasis::single(Tag::H, nh);
        r.check(
            "counit is H-colinear",
            &lhs.retag(a_basis(na, 1), dst.clone())?,
            &rhs.retag(a_basis(na, 1), dst)?,
        )?;
    }
    Ok(r)
}

fn dedup(mut r: ValidationReport) -> ValidationReport {
    let mut seen = std::collections::HashSet::new();
    r.checks.retain(|c| seen.insert(c.axiom.clone()));
    r
}

pub fn validate_module_bialgebra(h: &BialgebraData, b: &BialgebraTargetData, act: &ActionData) -> Result<ValidationReport> {
    let mut r = validate_target_bialgebra(b)?;
    r.extend(validate_module_algebra(h, &b.algebra, act)?);
    r.extend(validate_module_coalgebra(h, &b.coalgebra, act)?);
    Ok(dedup(r))
}

pub fn validate_comodule_bialgebra(h: &BialgebraData, b: &BialgebraTargetData, co: &CoactionData) -> Result<ValidationReport> {
    let mut r = validate_target_bialgebra(b)?;
    r.extend(validate_comodule_algebra(h, &b.algebra, co)?);
    r.extend(validate_comodule_coalgebra(h, &b.coalgebra, co)?);
    Ok(dedup(r))
}

/// Names accepted by [`example_catalog`].
pub const CATALOG: [&str; 10] = [
    "trivial-action",
    "dual-number-algebra",
    "sign-action-null-algebra",
    "group-flip-Z2",
    "counit-action-sweedler",
    "flip-coalgebra-Z2",
    "regular-coaction-Z2",
    "graded-dual-numbers",
    "adjoint-coaction-Z2",
    "trivial-coaction-sweedler",
];

fn group_algebra_target(f: FieldSpec, n: usize) -> (AlgebraData, CoalgebraData) {
    let h = BialgebraData::cyclic_group(f, n);
    (h.as_algebra(), h.as_coalgebra())
}

/// Dual numbers `K[x]/(x^2)` with basis `1, x`.
fn dual_numbers(f: FieldSpec) -> AlgebraData {
    let mul = ExactMatrix::from_fn(f, 2, 4, |r, c| {
        let (i, j) = (c / 2, c % 2);
        f.from_i64((i + j < 2 && r == i + j) as i64)
    });
    let unit = ExactMatrix::from_fn(f, 2, 1, |r, _| f.from_i64((r == 0) as i64));
    AlgebraData::new(f, 2, mul, Some(unit)).unwrap()
}

/// A validated package from the built-in catalog.
pub fn example_catalog(name: &str, field: FieldSpec) -> Result<StructurePackage> {
    let f = field;
    let pkg = match name {
        "trivial-action" => {
            let h = BialgebraData::ground(f);
            let a = AlgebraData::new(f, 1, ExactMatrix::identity(f, 1), Some(ExactMatrix::identity(f, 1)))?;
            let act = ActionData::counit_action(&h, 1);
            package(name, Kind::MA, h, Some(a), None, Some(act), None)
        }
        "dual-number-algebra" => {
            let h = BialgebraData::ground(f);
            let act = ActionData::counit_action(&h, 2);
            package(name, Kind::MA, h, Some(dual_numbers(f)), None, Some(act), None)
        }
        "sign-action-null-algebra" => {
            if f.characteristic() == 2 {
                return Err(StructureError::FieldUnsupported {
                    name: name.into(),
                    field: f,
                    reason: "the sign character is trivial in characteristic 2".into(),
                });
            }
            let h = BialgebraData::cyclic_group(f, 2);
            let a = AlgebraData::new(f, 1, ExactMatrix::zeros(f, 1, 1), None)?;
            let act = ActionData::new(2, 1, ExactMatrix::from_fn(f, 1, 2, |_, c| f.from_i64(if c == 0 { 1 } else { -1 })))?;
            package(name, Kind::MA, h, Some(a), None, Some(act), None)
        }
        "group-flip-Z2" => {
            // Z/2 acting on Z/3 by inversion, extended linearly.
            let h = BialgebraData::cyclic_group(f, 2);
            let (a, c) = group_algebra_target(f, 3);
            let act = ActionData::new(
                2,
                3,
                ExactMatrix::from_fn(f, 3, 6, |r, col| {
                    let (x, k) = (col / 3, col % 3);
                    let img = if x == 0 { k } else { (3 - k) % 3 };
                    f.from_i64((r == img) as i64)
                }),
            )?;
            package(name, Kind::MB, h, Some(a), Some(c), Some(act), None)
        }
        "counit-action-sweedler" => {
            let h = BialgebraData::sweedler(f);
            let (a, c) = group_algebra_target(f, 2);
            let act = ActionData::counit_action(&h, 2);
            package(name, Kind::MB, h, Some(a), Some(c), Some(act), None)
        }
        "flip-coalgebra-Z2" => {
            let h = BialgebraData::cyclic_group(f, 2);
            let (_, c) = group_algebra_target(f, 2);
            let act = ActionData::new(
                2,
                2,
                ExactMatrix::from_fn(f, 2, 4, |r, col| {
                    let (x, k) = (col / 2, col % 2);
                    f.from_i64((r == k ^ x) as i64)
                }),
            )?;
            package(name, Kind::MC, h, None, Some(c), Some(act), None)
        }
        "regular-coaction-Z2" => {
            let h = BialgebraData::cyclic_group(f, 2);
            let (a, _) = group_algebra_target(f, 2);
            let co = CoactionData::new(2, 2, h.comul().matrix().clone())?;
            package(name, Kind::CA, h, Some(a), None, None, Some(co))
        }
        "graded-dual-numbers" => {
            // Delta x = x (x) 1 + 1 (x) x, rho(x) = g (x) x.
            let h = BialgebraData::cyclic_group(f, 2);
            let mut comul = ExactMatrix::zeros(f, 4, 2);
            comul.set(0, 0, f.one());
            comul.set(2, 1, f.one());
            comul.set(1, 1, f.one());
            let counit = ExactMatrix::from_fn(f, 1, 2, |_, c| f.from_i64((c == 0) as i64));
            let c = CoalgebraData::new(f, 2, comul, Some(counit))?;
            let mut rho = ExactMatrix::zeros(f, 4, 2);
            rho.set(0, 0, f.one());
            rho.set(2 + 1, 1, f.one());
            let co = CoactionData::new(2, 2, rho)?;
            package(name, Kind::CC, h, None, Some(c), None, Some(co))
        }
        "adjoint-coaction-Z2" => {
            let h = BialgebraData::cyclic_group(f, 2);
            let (a, c) = group_algebra_target(f, 2);
            let co = CoactionData::from_map(adjoint_coaction(&h)?);
            package(name, Kind::CB, h, Some(a), Some(c), None, Some(co))
        }
        "trivial-coaction-sweedler" => {
            let h = BialgebraData::sweedler(f);
            let (a, c) = group_algebra_target(f, 2);
            let co = CoactionData::trivial(&h, 2);
            package(name, Kind::CB, h, Some(a), Some(c), None, Some(co))
        }
        _ => return Err(StructureError::UnknownCatalogEntry(name.to_string())),
    };
    let report = pkg.validate()?;
    if !report.passed() {
        return Err(StructureError::Invalid(format!("catalog entry {name} failed {:?}", report.failures())));
    }
    Ok(pkg)
}

fn package(
    name: &str,
    kind: Kind,
    h: BialgebraData,
    algebra: Option<AlgebraData>,
    coalgebra: Option<CoalgebraData>,
    action: Option<ActionData>,
    coaction: Option<CoactionData>,
) -> StructurePackage {
    StructurePackage { name: name.to_string(), kind, h, algebra, coalgebra, action, coaction }
}

/// `rho(x) = sum x_(1) S(x_(3)) (x) x_(2)` on a Hopf algebra H, coacting on
/// itself.
pub fn adjoint_coaction(h: &BialgebraData) -> Result<LinMap> {
    let f = h.field();
    let n = h.dim();
    let s = h
        .antipode()
        .ok_or(StructureError::Invalid("the adjoint coaction needs an antipode".into()))?;
    let d2 = tc::iterated_comul(&flat(h.comul()), 2)?;
    let d2 = d2.retag(TensorBasis::single(Tag::A, n), h_basis(n, 3))?;
    // x1 (x) x2 (x) x3 -> x1 (x) x3 (x) x2 -> x1 S(x3) (x) x2
    let perm = tc::permutation(f, &h_basis(n, 3), &[0, 2, 1])?;
    let sx = id(f, n).tensor(&flat(s))?.tensor(&id(f, n))?;
    let m = flat(h.mul()).tensor(&id(f, n))?;
    let out = m.compose(&sx)?.compose(&flat(&perm.compose(&d2)?))?;
    Ok(out.retag(a_basis(n, 1), TensorBasis::single(Tag::H, n).concat(&a_basis(n, 1)))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldSpec {
        FieldSpec::rationals()
    }

    #[test]
    fn group_bialgebra_passes() {
        assert!(validate_bialgebra(&BialgebraData::cyclic_group(q(), 2)).unwrap().passed());
    }

    #[test]
    fn sweedler_passes_with_antipode() {
        let h = BialgebraData::sweedler(q());
        let r = validate_bialgebra(&h).unwrap();
        assert!(r.passed(), "{:?}", r.failures());
        assert!(r.get("left antipode").is_some());
    }

    #[test]
    fn sweedler_table_by_hand() {
        // x g = -g x, (g x) g = -g (g x) ... spot checks of the table.
        let h = BialgebraData::sweedler(q());
        let f = q();
        let prod = |i: usize, j: usize| h.mul().evaluate(&[i, j]).unwrap();
        assert_eq!(prod(2, 1), vec![f.zero(), f.zero(), f.zero(), f.from_i64(-1)]);
        assert_eq!(prod(1, 2), vec![f.zero(), f.zero(), f.zero(), f.one()]);
        assert_eq!(prod(1, 1), vec![f.one(), f.zero(), f.zero(), f.zero()]);
        assert!(prod(2, 2).iter().all(|x| f.is_zero(x)));
        assert_eq!(prod(3, 3), vec![f.zero(); 4]);
    }

    #[test]
    fn corrupted_counit_law_has_witness_g() {
        let f = q();
        let h = BialgebraData::cyclic_group(f, 2);
        let mut d = h.comul().matrix().clone();
        // Delta g = g (x) 1 instead of g (x) g.
        d.set(3, 1, f.zero());
        d.set(2, 1, f.one());
        let bad = h.with_maps(h.mul().clone(), LinMap::new(h.comul().src().clone(), h.comul().dst().clone(), d).unwrap());
        let r = validate_bialgebra(&bad).unwrap();
        assert!(r.get("coassociativity").unwrap().passed);
        let fail = r.get("left counit").unwrap();
        assert!(!fail.passed);
        assert_eq!(fail.witness.as_ref().unwrap().input, vec![1]);
    }

    #[test]
    fn counit_action_is_module_algebra() {
        let h = BialgebraData::sweedler(q());
        let a = dual_numbers(q());
        assert!(validate_module_algebra(&h, &a, &ActionData::counit_action(&h, 2)).unwrap().passed());
    }

    #[test]
    fn broken_multiplicativity_witness() {
        let f = q();
        let h = BialgebraData::cyclic_group(f, 2);
        let (a, _) = group_algebra_target(f, 2);
        // lambda(g) = 2 Id: lambda(g) lambda(g) = 4 Id but lambda(g^2) = Id.
        let act = ActionData::new(
            2,
            2,
            ExactMatrix::from_fn(f, 2, 4, |r, c| f.from_i64(if r == c % 2 { if c / 2 == 1 { 2 } else { 1 } } else { 0 })),
        )
        .unwrap();
        let r = validate_module_algebra(&h, &a, &act).unwrap();
        let fail = r.get("action is multiplicative").unwrap();
        assert!(!fail.passed);
        assert_eq!(&fail.witness.as_ref().unwrap().input[..2], &[1, 1]);
    }

    #[test]
    fn flip_on_group_coalgebra() {
        let p = example_catalog("flip-coalgebra-Z2", q()).unwrap();
        assert!(p.validate().unwrap().passed());
        let mut c = p.coalgebra.clone().unwrap();
        let mut d = c.comul().matrix().clone();
        d.set(3, 1, FieldSpec::rationals().from_i64(2));
        c = c.with_comul(LinMap::new(c.comul().src().clone(), c.comul().dst().clone(), d).unwrap());
        let r = validate_module_coalgebra(&p.h, &c, p.action.as_ref().unwrap()).unwrap();
        assert!(!r.passed());
    }

    #[test]
    fn coaction_examples() {
        let f = q();
        let h = BialgebraData::cyclic_group(f, 2);
        let (a, c) = group_algebra_target(f, 2);
        assert!(validate_comodule_algebra(&h, &a, &CoactionData::trivial(&h, 2)).unwrap().passed());
        let reg = CoactionData::new(2, 2, h.comul().matrix().clone()).unwrap();
        assert!(validate_comodule_algebra(&h, &a, &reg).unwrap().passed());
        let adj = CoactionData::from_map(adjoint_coaction(&h).unwrap());
        assert!(validate_comodule_algebra(&h, &a, &adj).unwrap().passed());
        assert!(validate_comodule_coalgebra(&h, &c, &adj).unwrap().passed());
        // Drop the g-term of rho(g) = 1 (x) g.
        let mut m = adj.map().matrix().clone();
        m.set(1, 1, f.zero());
        let bad = CoactionData::new(2, 2, m).unwrap();
        assert!(!validate_comodule_coalgebra(&h, &c, &bad).unwrap().passed());
    }

    #[test]
    fn adjoint_coaction_on_group_is_trivial() {
        let f = FieldSpec::prime(3).unwrap();
        let p = example_catalog("adjoint-coaction-Z2", f).unwrap();
        let triv = CoactionData::trivial(&p.h, 2);
        assert_eq!(p.coaction.unwrap().map().matrix(), triv.map().matrix());
    }

    #[test]
    fn whole_catalog_validates() {
        for field in [q(), FieldSpec::prime(5).unwrap()] {
            for name in CATALOG {
                let p = example_catalog(name, field).unwrap();
                assert!(p.validate().unwrap().passed(), "{name}");
                for &k in p.kind.views() {
                    assert!(p.view(k).unwrap().validate().unwrap().passed(), "{name} as {k}");
                }
            }
        }
        assert!(example_catalog("sign-action-null-algebra", FieldSpec::prime(2).unwrap()).is_err());
        assert!(matches!(example_catalog("nope", q()), Err(StructureError::UnknownCatalogEntry(_))));
    }

    #[test]
    fn rho_power_two_regular() {
        let f = q();
        let h = BialgebraData::cyclic_group(f, 2);
        let rho = h.comul().clone();
        let r2 = rho_power(&h, 2, &rho, 2).unwrap();
        // g (x) g -> g g (x) g (x) g = 1 (x) g (x) g
        let img = r2.evaluate(&[1, 1]).unwrap();
        assert_eq!(img[3], f.one());
        assert_eq!(img.iter().filter(|x| !f.is_zero(x)).count(), 1);
    }
}
