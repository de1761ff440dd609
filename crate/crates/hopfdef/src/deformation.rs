//! Formal deformations: truncated series, order-n residuals, extension with
//! obstruction classes, gauge transport and the rigidity probe.
//!
//! A series `Theta = theta_0 + theta_1 t + ...` stores each coefficient as
//! a tuple of maps (`lambda`/`rho`, `pi`, `Delta` depending on the kind).
//! The defining equations are evaluated by truncated power-series
//! arithmetic. A fixed sign per equation and per component relates them to
//! the total differential; every context checks this blockwise.

use std::cell::OnceCell;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cohomology_cup::{cohomology, CohomologyResult, CupError};
use crate::complexes::{
    build_view, corner_degree, mul, total_complex, ComplexAssembly, ComplexError, CornerMode, Degree, Maps,
    TotalComplex,
};
use crate::exact_linalg::{sv_from_dense, sv_to_dense, ExactScalar, FieldSpec, LinalgError, SparseMatrix, SparseVec, SpanBasis};
use crate::hopf_structures::{Kind, StructureError, StructurePackage};
use crate::tensor_calculus::{sp_from_coords, sp_permutation, sp_to_coords};

#[derive(Debug, Error)]
pub enum DeformationError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Cup(#[from] CupError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("order {order} exceeds the truncation {max}")]
    OrderBeyondTruncation { order: usize, max: usize },
    #[error("the residuals at order {0} do not vanish")]
    NotValidBelow(usize),
    #[error("expected {expected} coordinates, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("the {family} equation is not matched by the total differential on {part}")]
    Orientation { family: Family, part: Part },
    #[error("order-1 residuals and the total differential disagree")]
    Disagreement,
    #[error("the order-{0} residual is not a total 3-cocycle")]
    ResidualNotCocycle(usize),
    #[error("the cochain is not a total 2-cocycle")]
    NotCocycle,
    #[error("gauge term 0 is not the identity")]
    NotIdentity,
    #[error("the leading gauge term (order {0}) is not in the degree-1 corner")]
    LeadingNotInCorner(usize),
    #[error("the order-1 gauge change is not a fixed multiple of the degree-1 differential")]
    GaugeSign,
    #[error("gauge transport broke the equations at order {0}")]
    GaugeBrokeValidity(usize),
}

pub type Result<T> = std::result::Result<T, DeformationError>;

/// A component of a deformation coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Part {
    /// `lambda_n: H (x) A -> A`
    Lambda,
    /// `rho_n: A -> H (x) A`
    Rho,
    /// `pi_n: A (x) A -> A`
    Pi,
    /// `Delta_n: A -> A (x) A`
    Delta,
}

impl fmt::Display for Part {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Part::Lambda => "lambda",
            Part::Rho => "rho",
            Part::Pi => "pi",
            Part::Delta => "Delta",
        })
    }
}

/// A defining equation of a deformation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    /// `Lambda(xy) = Lambda(x) Lambda(y)`
    ActionMultiplicative,
    /// `Lambda(x) Pi = Pi (Lambda(x_1) (x) Lambda(x_2))`
    ModuleAlgebra,
    Associativity,
    /// `D Lambda(x) = (Lambda(x_1) (x) Lambda(x_2)) D`
    ModuleCoalgebra,
    Coassociativity,
    /// `(Id (x) R) R = (Delta_H (x) Id) R`
    CoactionCoassociative,
    /// `R Pi = (mu_H (x) Pi)(Id (x) tau (x) Id)(R (x) R)`
    ComoduleAlgebra,
    /// `(Id (x) D) R = (mu_H (x) Id)(Id (x) tau (x) Id)(R (x) R) D`
    ComoduleCoalgebra,
    /// `D Pi = (Pi (x) Pi)(Id (x) tau (x) Id)(D (x) D)`
    Compatibility,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::ActionMultiplicative => "action-multiplicative",
            Family::ModuleAlgebra => "module-algebra",
            Family::Associativity => "associativity",
            Family::ModuleCoalgebra => "module-coalgebra",
            Family::Coassociativity => "coassociativity",
            Family::CoactionCoassociative => "coaction-coassociative",
            Family::ComoduleAlgebra => "comodule-algebra",
            Family::ComoduleCoalgebra => "comodule-coalgebra",
            Family::Compatibility => "bialgebra-compatibility",
        })
    }
}

/// Components of `theta_n` with their grid degrees.
pub fn parts(kind: Kind) -> Vec<(Part, Degree)> {
    match kind {
        Kind::MA => vec![(Part::Lambda, [1, 1, 0]), (Part::Pi, [2, 0, 0])],
        Kind::MC => vec![(Part::Lambda, [1, 1, 0]), (Part::Delta, [2, 0, 0])],
        Kind::CA => vec![(Part::Rho, [1, 1, 0]), (Part::Pi, [2, 0, 0])],
        Kind::CC => vec![(Part::Rho, [1, 1, 0]), (Part::Delta, [2, 0, 0])],
        Kind::MB => vec![(Part::Lambda, [1, 1, 1]), (Part::Pi, [2, 1, 0]), (Part::Delta, [1, 2, 0])],
        Kind::CB => vec![(Part::Rho, [1, 1, 1]), (Part::Pi, [2, 1, 0]), (Part::Delta, [1, 2, 0])],
    }
}

/// Defining equations with the grid degree of their residuals.
pub fn families(kind: Kind) -> Vec<(Family, Degree)> {
    use Family::*;
    match kind {
        Kind::MA => vec![(ActionMultiplicative, [1, 2, 0]), (ModuleAlgebra, [2, 1, 0]), (Associativity, [3, 0, 0])],
        Kind::MC => vec![(ActionMultiplicative, [1, 2, 0]), (ModuleCoalgebra, [2, 1, 0]), (Coassociativity, [3, 0, 0])],
        Kind::CA => vec![(CoactionCoassociative, [1, 2, 0]), (ComoduleAlgebra, [2, 1, 0]), (Associativity, [3, 0, 0])],
        Kind::CC => {
            vec![(CoactionCoassociative, [1, 2, 0]), (ComoduleCoalgebra, [2, 1, 0]), (Coassociativity, [3, 0, 0])]
        }
        Kind::MB => vec![
            (ActionMultiplicative, [1, 1, 2]),
            (ModuleAlgebra, [2, 1, 1]),
            (ModuleCoalgebra, [1, 2, 1]),
            (Associativity, [3, 1, 0]),
            (Coassociativity, [1, 3, 0]),
            (Compatibility, [2, 2, 0]),
        ],
        Kind::CB => vec![
            (CoactionCoassociative, [1, 1, 2]),
            (ComoduleAlgebra, [2, 1, 1]),
            (ComoduleCoalgebra, [1, 2, 1]),
            (Associativity, [3, 1, 0]),
            (Coassociativity, [1, 3, 0]),
            (Compatibility, [2, 2, 0]),
        ],
    }
}

/// Signs `(components, equations)` per kind, in the order of [`parts`] and
/// [`families`]. With them the linear part of every equation at order `n`
/// is the total differential of `theta_n`; a context checks this blockwise.
pub fn sign_conventions(kind: Kind) -> (Vec<i8>, Vec<i8>) {
    match kind {
        Kind::MA => (vec![1, 1], vec![-1, -1, -1]),
        Kind::MC => (vec![1, -1], vec![-1, -1, 1]),
        Kind::CA => (vec![1, 1], vec![1, -1, -1]),
        Kind::CC => (vec![1, -1], vec![1, -1, 1]),
        Kind::MB => (vec![1, 1, 1], vec![-1, -1, -1, -1, 1, 1]),
        Kind::CB => (vec![1, 1, 1], vec![1, -1, -1, -1, 1, 1]),
    }
}

/// A component of `theta_n` placed in total degree 2. Cochain coordinates
/// are `sign` times the map's coordinates.
#[derive(Debug, Clone, Serialize)]
pub struct PartSlot {
    pub part: Part,
    pub degree: Degree,
    pub offset: usize,
    pub src: usize,
    pub dst: usize,
    pub sign: i8,
}

/// A residual family placed in total degree 3. The residual cochain is
/// `sign * (LHS - RHS)`.
#[derive(Debug, Clone, Serialize)]
pub struct FamilySlot {
    pub family: Family,
    pub degree: Degree,
    pub offset: usize,
    pub dim: usize,
    pub sign: i8,
}

type Ser = Vec<SparseMatrix>;

/// Everything the deformation operations share for one package and kind:
/// the complex through total degree 4 and the sign conventions.
#[derive(Debug)]
pub struct DeformationContext {
    pub kind: Kind,
    pub field: FieldSpec,
    pub maps: Maps,
    pub asm: ComplexAssembly,
    /// Total complex with the corner at degree 1.
    pub total: TotalComplex,
    /// `d^1` on all of `End(A)`.
    pub d1_full: SparseMatrix,
    /// Columns spanning the corner inside `End(A)`.
    pub corner_basis: SparseMatrix,
    pub parts: Vec<PartSlot>,
    pub families: Vec<FamilySlot>,
    h2: OnceCell<CohomologyResult>,
    h3: OnceCell<CohomologyResult>,
    d2_span: OnceCell<SpanBasis>,
    d1_span: OnceCell<SpanBasis>,
    corner_span: OnceCell<SpanBasis>,
}

fn is_zero_vec(f: FieldSpec, v: &[ExactScalar]) -> bool {
    v.iter().all(|x| f.is_zero(x))
}

fn sign_scalar(f: FieldSpec, s: i8) -> ExactScalar {
    f.from_i64(s as i64)
}

impl DeformationContext {
    /// Builds the complex of `kind` for `pkg` through total degree 4 and
    /// fixes the signs of every equation and component.
    pub fn new(pkg: &StructurePackage, kind: Kind) -> Result<Self> {
        let asm = build_view(pkg, kind, 3)?;
        let view = pkg.view(kind)?;
        let maps = Maps::from_package(&view);
        let field = maps.field;
        let total = total_complex(&asm, CornerMode::Corner);
        let full = total_complex(&asm, CornerMode::Full);
        let d1_full = full.diffs[1].clone();
        let a = maps.a;
        let corner_basis = asm.spaces[&corner_degree(kind)]
            .corner_basis
            .clone()
            .unwrap_or_else(|| SparseMatrix::identity(field, a * a));
        let (h, a) = (maps.h, maps.a);
        let (psigns, fsigns) = sign_conventions(kind);
        let parts = parts(kind)
            .into_iter()
            .zip(psigns)
            .map(|((part, degree), sign)| {
                let (src, dst) = part_shape(part, h, a);
                let offset = total.component(2, degree).map(|c| c.offset).expect("degree-2 component");
                PartSlot { part, degree, offset, src, dst, sign }
            })
            .collect();
        let families = families(kind)
            .into_iter()
            .zip(fsigns)
            .map(|((family, degree), sign)| {
                let c = total.component(3, degree).expect("degree-3 component");
                FamilySlot { family, degree, offset: c.offset, dim: c.dim, sign }
            })
            .collect();
        let ctx = DeformationContext {
            kind,
            field,
            maps,
            asm,
            total,
            d1_full,
            corner_basis,
            parts,
            families,
            h2: OnceCell::new(),
            h3: OnceCell::new(),
            d2_span: OnceCell::new(),
            d1_span: OnceCell::new(),
            corner_span: OnceCell::new(),
        };
        ctx.check_orientation()?;
        ctx.check_gauge()?;
        Ok(ctx)
    }

    fn structure_map(&self, part: Part) -> Result<SparseMatrix> {
        let m = &self.maps;
        Ok(match part {
            Part::Lambda => m.lam()?.clone(),
            Part::Rho => m.coact()?.clone(),
            Part::Pi => m.mu()?.clone(),
            Part::Delta => m.delta()?.clone(),
        })
    }

    /// `theta_0`.
    pub fn structure_maps(&self) -> Result<Vec<SparseMatrix>> {
        self.parts.iter().map(|s| self.structure_map(s.part)).collect()
    }

    fn zero_maps(&self) -> Vec<SparseMatrix> {
        self.parts.iter().map(|s| SparseMatrix::zeros(self.field, s.dst, s.src)).collect()
    }

    pub fn dim2(&self) -> usize {
        self.total.dims[2]
    }

    pub fn dim3(&self) -> usize {
        self.total.dims[3]
    }

    /// Dimension of the degree-1 corner.
    pub fn dim1(&self) -> usize {
        self.total.dims[1]
    }

    /// Total degree-2 coordinates of a coefficient tuple.
    pub fn theta_vector(&self, maps: &[SparseMatrix]) -> Vec<ExactScalar> {
        let f = self.field;
        let mut out = vec![f.zero(); self.dim2()];
        for (slot, m) in self.parts.iter().zip(maps) {
            let s = sign_scalar(f, slot.sign);
            for (i, x) in sp_to_coords(m).into_iter().enumerate() {
                out[slot.offset + i] = f.mul(&s, &x);
            }
        }
        out
    }

    /// Inverse of [`Self::theta_vector`].
    pub fn theta_maps(&self, v: &[ExactScalar]) -> Result<Vec<SparseMatrix>> {
        if v.len() != self.dim2() {
            return Err(DeformationError::Shape { expected: self.dim2(), got: v.len() });
        }
        let f = self.field;
        Ok(self
            .parts
            .iter()
            .map(|slot| {
                let s = sign_scalar(f, slot.sign);
                let coords: Vec<ExactScalar> =
                    v[slot.offset..slot.offset + slot.src * slot.dst].iter().map(|x| f.mul(&s, x)).collect();
                sp_from_coords(f, slot.src, slot.dst, &coords)
            })
            .collect())
    }

    fn part_series(&self, terms: &[Vec<SparseMatrix>], part: Part, n: usize) -> Ser {
        let i = self.parts.iter().position(|s| s.part == part).expect("part of this kind");
        (0..=n).map(|k| terms[k][i].clone()).collect()
    }

    /// `LHS - RHS` of one equation as a series through order `n`.
    fn family_series(&self, family: Family, terms: &[Vec<SparseMatrix>], n: usize) -> Ser {
        let m = &self.maps;
        let f = self.field;
        let (h, a) = (m.h, m.a);
        let c = |x: &SparseMatrix| konst(x, n);
        let ia = SparseMatrix::identity(f, a);
        let ih = SparseMatrix::identity(f, h);
        let get = |p| self.part_series(terms, p, n);
        match family {
            Family::ActionMultiplicative => {
                let l = get(Part::Lambda);
                let lhs = smul(&l, &c(&m.mu_h.kron(&ia).expect("field")));
                let rhs = smul(&l, &skron(&c(&ih), &l));
                ssub(&lhs, &rhs)
            }
            Family::ModuleAlgebra => {
                let (l, p) = (get(Part::Lambda), get(Part::Pi));
                let lhs = smul(&l, &skron(&c(&ih), &p));
                let shuffle = mul(&sp_permutation(f, &[h, h, a, a], &[0, 2, 1, 3]), &m.t(&[&m.delta_h, &ia, &ia]));
                let rhs = smul(&smul(&p, &skron(&l, &l)), &c(&shuffle));
                ssub(&lhs, &rhs)
            }
            Family::Associativity => {
                let p = get(Part::Pi);
                let lhs = smul(&p, &skron(&p, &c(&ia)));
                let rhs = smul(&p, &skron(&c(&ia), &p));
                ssub(&lhs, &rhs)
            }
            Family::ModuleCoalgebra => {
                let (l, d) = (get(Part::Lambda), get(Part::Delta));
                let lhs = smul(&d, &l);
                let perm = sp_permutation(f, &[h, h, a, a], &[0, 2, 1, 3]);
                let rhs = smul(&smul(&skron(&l, &l), &c(&perm)), &skron(&c(&m.delta_h), &d));
                ssub(&lhs, &rhs)
            }
            Family::Coassociativity => {
                let d = get(Part::Delta);
                let lhs = smul(&skron(&d, &c(&ia)), &d);
                let rhs = smul(&skron(&c(&ia), &d), &d);
                ssub(&lhs, &rhs)
            }
            Family::CoactionCoassociative => {
                let r = get(Part::Rho);
                let lhs = smul(&skron(&c(&ih), &r), &r);
                let rhs = smul(&c(&m.delta_h.kron(&ia).expect("field")), &r);
                ssub(&lhs, &rhs)
            }
            Family::ComoduleAlgebra => {
                let (r, p) = (get(Part::Rho), get(Part::Pi));
                let lhs = smul(&r, &p);
                let perm = sp_permutation(f, &[h, a, h, a], &[0, 2, 1, 3]);
                let rhs = smul(&smul(&skron(&c(&m.mu_h), &p), &c(&perm)), &skron(&r, &r));
                ssub(&lhs, &rhs)
            }
            Family::ComoduleCoalgebra => {
                let (r, d) = (get(Part::Rho), get(Part::Delta));
                let lhs = smul(&skron(&c(&ih), &d), &r);
                let collect = mul(&m.t(&[&m.mu_h, &ia, &ia]), &sp_permutation(f, &[h, a, h, a], &[0, 2, 1, 3]));
                let rhs = smul(&smul(&c(&collect), &skron(&r, &r)), &d);
                ssub(&lhs, &rhs)
            }
            Family::Compatibility => {
                let (p, d) = (get(Part::Pi), get(Part::Delta));
                let lhs = smul(&d, &p);
                let perm = sp_permutation(f, &[a, a, a, a], &[0, 2, 1, 3]);
                let rhs = smul(&smul(&skron(&p, &p), &c(&perm)), &skron(&d, &d));
                ssub(&lhs, &rhs)
            }
        }
    }

    /// Order-`n` coefficient of `LHS - RHS` per family, unsigned.
    fn raw_residuals(&self, terms: &[Vec<SparseMatrix>], n: usize) -> Vec<SparseMatrix> {
        self.families.iter().map(|fs| self.family_series(fs.family, terms, n).swap_remove(n)).collect()
    }

    fn residual_total(&self, raw: &[SparseMatrix]) -> Vec<ExactScalar> {
        let f = self.field;
        let mut out = vec![f.zero(); self.dim3()];
        for (slot, m) in self.families.iter().zip(raw) {
            let s = sign_scalar(f, slot.sign);
            for (i, x) in sp_to_coords(m).into_iter().enumerate() {
                out[slot.offset + i] = f.mul(&s, &x);
            }
        }
        out
    }

    /// Checks on every (equation, component) block that the linear part of
    /// the equation, times the two signs, is the total differential.
    fn check_orientation(&self) -> Result<()> {
        let f = self.field;
        let theta0 = self.structure_maps()?;
        let d2 = &self.total.diffs[2];
        for (pi, slot) in self.parts.iter().enumerate() {
            let dim = slot.src * slot.dst;
            let mut cols: Vec<Vec<SparseVec>> = vec![Vec::new(); self.families.len()];
            for j in 0..dim {
                let mut e = vec![f.zero(); dim];
                e[j] = f.one();
                let mut theta1 = self.zero_maps();
                theta1[pi] = sp_from_coords(f, slot.src, slot.dst, &e);
                let raw = self.raw_residuals(&[theta0.clone(), theta1], 1);
                for (fi, m) in raw.iter().enumerate() {
                    cols[fi].push(sv_from_dense(f, &sp_to_coords(m)));
                }
            }
            for (fi, fs) in self.families.iter().enumerate() {
                let lin = SparseMatrix::from_column_entries(f, fs.dim, std::mem::take(&mut cols[fi]));
                let block = d2.block(fs.offset, slot.offset, fs.dim, dim);
                let s = sign_scalar(f, fs.sign * slot.sign);
                if !lin.scale(&s).sub(&block)?.is_zero() {
                    return Err(DeformationError::Orientation { family: fs.family, part: slot.part });
                }
            }
        }
        Ok(())
    }

    /// Checks `theta_bar_1 - theta_1 = d^1 phi_1` for `Phi = Id + phi_1 t`
    /// on every basis element of `End(A)`.
    fn check_gauge(&self) -> Result<()> {
        let f = self.field;
        let a = self.maps.a;
        let trivial = DeformationSeries::trivial(self, 1)?;
        for j in 0..a * a {
            let mut e = vec![f.zero(); a * a];
            e[j] = f.one();
            let gauge = FormalAutomorphism { terms: vec![SparseMatrix::identity(f, a), sp_from_coords(f, a, a, &e)] };
            let moved = apply_gauge_unchecked(self, &trivial, &gauge);
            if self.theta_vector(&moved.terms[1]) != self.d1_full.column_dense(j) {
                return Err(DeformationError::GaugeSign);
            }
        }
        Ok(())
    }

    /// `H^2` of the total complex with the corner.
    pub fn h2(&self) -> Result<&CohomologyResult> {
        if self.h2.get().is_none() {
            let _ = self.h2.set(cohomology(&self.total.as_cochain_complex(self.field), 2)?);
        }
        Ok(self.h2.get().expect("set"))
    }

    /// `H^3` of the total complex.
    pub fn h3(&self) -> Result<&CohomologyResult> {
        if self.h3.get().is_none() {
            let _ = self.h3.set(cohomology(&self.total.as_cochain_complex(self.field), 3)?);
        }
        Ok(self.h3.get().expect("set"))
    }

    fn column_span(m: &SparseMatrix) -> SpanBasis {
        let mut span = SpanBasis::new(m.field(), m.cols());
        for j in 0..m.cols() {
            span.insert(&m.column(j).to_vec(), j);
        }
        span
    }

    /// Solves `d^2 x = b`.
    fn solve_d2(&self, b: &SparseVec) -> Option<SparseVec> {
        let span = self.d2_span.get_or_init(|| Self::column_span(&self.total.diffs[2]));
        let red = span.reduce(b);
        red.residual.is_empty().then_some(red.combination)
    }

    /// Solves `d^1 c = b` with `c` in corner coordinates.
    fn solve_d1(&self, b: &SparseVec) -> Option<SparseVec> {
        let span = self.d1_span.get_or_init(|| Self::column_span(&self.total.diffs[1]));
        let red = span.reduce(b);
        red.residual.is_empty().then_some(red.combination)
    }

    /// Whether an `End(A)` element lies in the corner.
    pub fn in_corner(&self, phi: &SparseMatrix) -> bool {
        let span = self.corner_span.get_or_init(|| Self::column_span(&self.corner_basis));
        span.contains(&sv_from_dense(self.field, &sp_to_coords(phi)))
    }

    /// The total differential of a degree-2 cochain.
    pub fn d2(&self, theta: &[ExactScalar]) -> Result<Vec<ExactScalar>> {
        if theta.len() != self.dim2() {
            return Err(DeformationError::Shape { expected: self.dim2(), got: theta.len() });
        }
        Ok(self.total.diffs[2].mul_vec(theta)?)
    }

    /// The total differential of a degree-3 cochain.
    pub fn d3(&self, c: &[ExactScalar]) -> Result<Vec<ExactScalar>> {
        if c.len() != self.dim3() {
            return Err(DeformationError::Shape { expected: self.dim3(), got: c.len() });
        }
        Ok(self.total.diffs[3].mul_vec(c)?)
    }

    /// `d^1` of an `End(A)` element, as a degree-2 cochain.
    pub fn d1_of(&self, phi: &SparseMatrix) -> Vec<ExactScalar> {
        self.d1_full.mul_vec(&sp_to_coords(phi)).expect("shape")
    }

    /// The `End(A)` element with corner coordinates `c`.
    pub fn corner_element(&self, c: &[ExactScalar]) -> SparseMatrix {
        let a = self.maps.a;
        let v = self.corner_basis.mul_vec(c).expect("shape");
        sp_from_coords(self.field, a, a, &v)
    }
}

fn part_shape(part: Part, h: usize, a: usize) -> (usize, usize) {
    match part {
        Part::Lambda => (h * a, a),
        Part::Rho => (a, h * a),
        Part::Pi => (a * a, a),
        Part::Delta => (a, a * a),
    }
}

fn konst(m: &SparseMatrix, n: usize) -> Ser {
    let mut out = vec![m.clone()];
    out.extend((0..n).map(|_| SparseMatrix::zeros(m.field(), m.rows(), m.cols())));
    out
}

fn smul(a: &Ser, b: &Ser) -> Ser {
    let n = a.len().min(b.len());
    (0..n)
        .map(|k| {
            let mut acc = SparseMatrix::zeros(a[0].field(), a[0].rows(), b[0].cols());
            for i in 0..=k {
                if a[i].is_zero() || b[k - i].is_zero() {
                    continue;
                }
                acc = acc.add(&mul(&a[i], &b[k - i])).expect("shape");
            }
            acc
        })
        .collect()
}

fn skron(a: &Ser, b: &Ser) -> Ser {
    let n = a.len().min(b.len());
    (0..n)
        .map(|k| {
            let mut acc = SparseMatrix::zeros(a[0].field(), a[0].rows() * b[0].rows(), a[0].cols() * b[0].cols());
            for i in 0..=k {
                if a[i].is_zero() || b[k - i].is_zero() {
                    continue;
                }
                acc = acc.add(&a[i].kron(&b[k - i]).expect("field")).expect("shape");
            }
            acc
        })
        .collect()
}

fn ssub(a: &Ser, b: &Ser) -> Ser {
    a.iter().zip(b).map(|(x, y)| x.sub(y).expect("shape")).collect()
}

/// A truncated deformation `theta_0 + theta_1 t + ... + theta_N t^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeformationSeries {
    pub kind: Kind,
    /// `terms[k]` holds the components of `theta_k` in the context's part order.
    pub terms: Vec<Vec<SparseMatrix>>,
}

impl DeformationSeries {
    /// The trivial deformation `theta_k = 0` for `k >= 1`.
    pub fn trivial(ctx: &DeformationContext, order: usize) -> Result<Self> {
        let mut terms = vec![ctx.structure_maps()?];
        terms.extend((0..order).map(|_| ctx.zero_maps()));
        Ok(DeformationSeries { kind: ctx.kind, terms })
    }

    /// `theta_0 + theta_1 t` from degree-2 coordinates.
    pub fn from_infinitesimal(ctx: &DeformationContext, theta1: &[ExactScalar]) -> Result<Self> {
        let mut s = Self::trivial(ctx, 0)?;
        s.terms.push(ctx.theta_maps(theta1)?);
        Ok(s)
    }

    pub fn order(&self) -> usize {
        self.terms.len() - 1
    }

    /// Coordinates of `theta_k`.
    pub fn coefficient(&self, ctx: &DeformationContext, k: usize) -> Vec<ExactScalar> {
        ctx.theta_vector(&self.terms[k])
    }
}

/// One residual family at one order.
#[derive(Debug, Clone, Serialize)]
pub struct Residual {
    pub family: Family,
    pub degree: Degree,
    pub cochain: Vec<ExactScalar>,
    pub vanishes: bool,
}

/// Order-`n` residuals of every defining equation.
pub fn residuals(ctx: &DeformationContext, series: &DeformationSeries, n: usize) -> Result<Vec<Residual>> {
    if n > series.order() {
        return Err(DeformationError::OrderBeyondTruncation { order: n, max: series.order() });
    }
    let f = ctx.field;
    let raw = ctx.raw_residuals(&series.terms, n);
    Ok(ctx
        .families
        .iter()
        .zip(raw)
        .map(|(slot, m)| {
            let s = sign_scalar(f, slot.sign);
            let cochain: Vec<ExactScalar> = sp_to_coords(&m).iter().map(|x| f.mul(&s, x)).collect();
            let vanishes = is_zero_vec(f, &cochain);
            Residual { family: slot.family, degree: slot.degree, cochain, vanishes }
        })
        .collect())
}

/// The order-`n` residual as one total degree-3 cochain.
pub fn residual_vector(ctx: &DeformationContext, series: &DeformationSeries, n: usize) -> Result<Vec<ExactScalar>> {
    if n > series.order() {
        return Err(DeformationError::OrderBeyondTruncation { order: n, max: series.order() });
    }
    Ok(ctx.residual_total(&ctx.raw_residuals(&series.terms, n)))
}

/// Whether the residuals vanish at orders `1..=n`.
pub fn valid_through(ctx: &DeformationContext, series: &DeformationSeries, n: usize) -> Result<bool> {
    for k in 1..=n {
        if !is_zero_vec(ctx.field, &residual_vector(ctx, series, k)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Serialize)]
pub struct InfinitesimalCheck {
    pub is_cocycle: bool,
    /// First nonzero coordinate of `d^2 theta_1`.
    pub witness: Option<usize>,
    pub residuals_vanish: bool,
}

/// Tests `d^2 theta_1 = 0` and, separately, the order-1 equations of
/// `theta_0 + theta_1 t`; the two answers must agree.
pub fn check_infinitesimal(ctx: &DeformationContext, theta1: &[ExactScalar]) -> Result<InfinitesimalCheck> {
    let f = ctx.field;
    let d = ctx.d2(theta1)?;
    let witness = d.iter().position(|x| !f.is_zero(x));
    let series = DeformationSeries::from_infinitesimal(ctx, theta1)?;
    let residuals_vanish = is_zero_vec(f, &residual_vector(ctx, &series, 1)?);
    if residuals_vanish != witness.is_none() {
        return Err(DeformationError::Disagreement);
    }
    Ok(InfinitesimalCheck { is_cocycle: witness.is_none(), witness, residuals_vanish })
}

#[derive(Debug, Clone, Serialize)]
pub struct ObstructionReport {
    pub order: usize,
    /// Order-`n` constant residual, a total degree-3 cochain.
    pub residual: Vec<ExactScalar>,
    pub residual_is_cocycle: bool,
    pub solvable: bool,
    /// Coordinates of `theta_n` when solvable.
    pub solution: Option<Vec<ExactScalar>>,
    /// Class of the residual in `H^3` when not solvable.
    pub class: Option<Vec<ExactScalar>>,
}

/// Solves `d^2 theta_n = -residual`. When there is no solution the class of
/// the residual in `H^3` is reported.
pub fn solve_obstruction(ctx: &DeformationContext, order: usize, residual: &[ExactScalar]) -> Result<ObstructionReport> {
    let f = ctx.field;
    let residual_is_cocycle = is_zero_vec(f, &ctx.d3(residual)?);
    let rhs: Vec<ExactScalar> = residual.iter().map(|x| f.neg(x)).collect();
    let sol = if is_zero_vec(f, &rhs) { Some(Vec::new()) } else { ctx.solve_d2(&sv_from_dense(f, &rhs)) };
    let (solvable, solution, class) = match sol {
        Some(x) => (true, Some(sv_to_dense(f, &x, ctx.dim2())), None),
        None => {
            let class =
                if residual_is_cocycle { ctx.h3()?.class_of(&sv_from_dense(f, residual)) } else { None };
            (false, None, class)
        }
    };
    Ok(ObstructionReport { order, residual: residual.to_vec(), residual_is_cocycle, solvable, solution, class })
}

/// Extends a series valid through its order `n - 1` by one order. On
/// success `theta_n` is appended; otherwise the series is left unchanged.
pub fn extend_order(ctx: &DeformationContext, series: &mut DeformationSeries) -> Result<ObstructionReport> {
    let n = series.order() + 1;
    if !valid_through(ctx, series, n - 1)? {
        return Err(DeformationError::NotValidBelow(n - 1));
    }
    series.terms.push(ctx.zero_maps());
    let residual = residual_vector(ctx, series, n)?;
    let report = solve_obstruction(ctx, n, &residual)?;
    if !report.residual_is_cocycle {
        series.terms.pop();
        return Err(DeformationError::ResidualNotCocycle(n));
    }
    match &report.solution {
        Some(x) => {
            series.terms[n] = ctx.theta_maps(x)?;
            if !is_zero_vec(ctx.field, &residual_vector(ctx, series, n)?) {
                return Err(DeformationError::Disagreement);
            }
        }
        None => {
            series.terms.pop();
        }
    }
    Ok(report)
}

/// A truncated formal automorphism `Phi = Id + phi_1 t + ... + phi_N t^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct FormalAutomorphism {
    pub terms: Vec<SparseMatrix>,
}

impl FormalAutomorphism {
    pub fn identity(ctx: &DeformationContext, order: usize) -> Self {
        let a = ctx.maps.a;
        let f = ctx.field;
        let mut terms = vec![SparseMatrix::identity(f, a)];
        terms.extend((0..order).map(|_| SparseMatrix::zeros(f, a, a)));
        FormalAutomorphism { terms }
    }

    /// Checks `phi_0 = Id` and that the first nonzero `phi_n` lies in the
    /// corner (derivations, coderivations or biderivations).
    pub fn new(ctx: &DeformationContext, terms: Vec<SparseMatrix>) -> Result<Self> {
        let a = ctx.maps.a;
        if terms.is_empty() || !terms[0].sub(&SparseMatrix::identity(ctx.field, a))?.is_zero() {
            return Err(DeformationError::NotIdentity);
        }
        let phi = FormalAutomorphism { terms };
        if let Some(k) = phi.leading() {
            if !ctx.in_corner(&phi.terms[k]) {
                return Err(DeformationError::LeadingNotInCorner(k));
            }
        }
        Ok(phi)
    }

    pub fn order(&self) -> usize {
        self.terms.len() - 1
    }

    /// Index of the first nonzero `phi_n`, `n >= 1`.
    pub fn leading(&self) -> Option<usize> {
        (1..self.terms.len()).find(|&k| !self.terms[k].is_zero())
    }

    /// `Phi^-1` through order `n`: `psi_0 = Id`,
    /// `psi_n = -sum_(k=1..n) phi_k psi_(n-k)`.
    pub fn inverse(&self, n: usize) -> Vec<SparseMatrix> {
        let f = self.terms[0].field();
        let a = self.terms[0].rows();
        let mut psi = vec![SparseMatrix::identity(f, a)];
        for m in 1..=n {
            let mut acc = SparseMatrix::zeros(f, a, a);
            for k in 1..=m.min(self.order()) {
                if self.terms[k].is_zero() {
                    continue;
                }
                acc = acc.sub(&mul(&self.terms[k], &psi[m - k])).expect("shape");
            }
            psi.push(acc);
        }
        psi
    }

    /// The truncated composite `self o other`. Applying `self` and then
    /// `other` equals applying `self.compose(other)`.
    pub fn compose(&self, other: &FormalAutomorphism) -> FormalAutomorphism {
        let n = self.order().min(other.order());
        FormalAutomorphism { terms: smul(&self.terms[..=n].to_vec(), &other.terms[..=n].to_vec()) }
    }
}

fn apply_gauge_unchecked(ctx: &DeformationContext, series: &DeformationSeries, phi: &FormalAutomorphism) -> DeformationSeries {
    let n = series.order();
    let f = ctx.field;
    let h = ctx.maps.h;
    let fwd: Ser = phi.terms[..=n].to_vec();
    let inv = phi.inverse(n);
    let ih = konst(&SparseMatrix::identity(f, h), n);
    let conj: Vec<Ser> = ctx
        .parts
        .iter()
        .enumerate()
        .map(|(i, slot)| {
            let s: Ser = (0..=n).map(|k| series.terms[k][i].clone()).collect();
            match slot.part {
                Part::Lambda => smul(&smul(&inv, &s), &skron(&ih, &fwd)),
                Part::Pi => smul(&smul(&inv, &s), &skron(&fwd, &fwd)),
                Part::Delta => smul(&smul(&skron(&inv, &inv), &s), &fwd),
                Part::Rho => smul(&smul(&skron(&ih, &inv), &s), &fwd),
            }
        })
        .collect();
    let terms = (0..=n).map(|k| conj.iter().map(|s| s[k].clone()).collect()).collect();
    DeformationSeries { kind: series.kind, terms }
}

/// Conjugates a series by a formal automorphism:
/// `Lambda -> Phi^-1 Lambda (Id (x) Phi)`, `Pi -> Phi^-1 Pi Phi^(x)2`,
/// `D -> (Phi^-1)^(x)2 D Phi`, `R -> (Id (x) Phi^-1) R Phi`.
/// Validity through the series order is preserved, and checked.
pub fn apply_gauge(
    ctx: &DeformationContext,
    series: &DeformationSeries,
    phi: &FormalAutomorphism,
) -> Result<DeformationSeries> {
    let n = series.order();
    if phi.order() < n {
        return Err(DeformationError::OrderBeyondTruncation { order: n, max: phi.order() });
    }
    let out = apply_gauge_unchecked(ctx, series, phi);
    for k in 1..=n {
        if !is_zero_vec(ctx.field, &residual_vector(ctx, series, k)?) {
            break;
        }
        if !is_zero_vec(ctx.field, &residual_vector(ctx, &out, k)?) {
            return Err(DeformationError::GaugeBrokeValidity(k));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct Equivalence {
    pub equivalent_at_order_1: bool,
    /// `phi_1` in `End(A)` coordinates, inside the corner.
    pub witness: Option<Vec<ExactScalar>>,
    /// Class of `theta_1' - theta_1` in `H^2` when not equivalent.
    pub class: Option<Vec<ExactScalar>>,
}

/// Whether two infinitesimals differ by `d^1 phi_1` with `phi_1` in the
/// corner. A witness turns `theta_1` into `theta_1'` under `Id + phi_1 t`.
pub fn equivalence_class_order1(
    ctx: &DeformationContext,
    theta1: &[ExactScalar],
    theta1_other: &[ExactScalar],
) -> Result<Equivalence> {
    let f = ctx.field;
    for t in [theta1, theta1_other] {
        if !is_zero_vec(f, &ctx.d2(t)?) {
            return Err(DeformationError::NotCocycle);
        }
    }
    let diff: Vec<ExactScalar> = theta1_other.iter().zip(theta1).map(|(x, y)| f.sub(x, y)).collect();
    if is_zero_vec(f, &diff) {
        let a = ctx.maps.a;
        return Ok(Equivalence { equivalent_at_order_1: true, witness: Some(vec![f.zero(); a * a]), class: None });
    }
    match ctx.solve_d1(&sv_from_dense(f, &diff)) {
        Some(c) => {
            let phi = ctx.corner_element(&sv_to_dense(f, &c, ctx.dim1()));
            Ok(Equivalence { equivalent_at_order_1: true, witness: Some(sp_to_coords(&phi)), class: None })
        }
        None => {
            let class = ctx.h2()?.class_of(&sv_from_dense(f, &diff));
            Ok(Equivalence { equivalent_at_order_1: false, witness: None, class })
        }
    }
}

/// A gauge killing `theta_1, ..., theta_N` one order at a time, or `None`
/// when some `theta_k` is not a corner coboundary.
pub fn trivializing_gauge(ctx: &DeformationContext, series: &DeformationSeries) -> Result<Option<FormalAutomorphism>> {
    let f = ctx.field;
    let n = series.order();
    let mut current = series.clone();
    let mut total = FormalAutomorphism::identity(ctx, n);
    for k in 1..=n {
        let theta = current.coefficient(ctx, k);
        if is_zero_vec(f, &theta) {
            continue;
        }
        let rhs: Vec<ExactScalar> = theta.iter().map(|x| f.neg(x)).collect();
        let Some(c) = ctx.solve_d1(&sv_from_dense(f, &rhs)) else { return Ok(None) };
        let mut step = FormalAutomorphism::identity(ctx, n);
        step.terms[k] = ctx.corner_element(&sv_to_dense(f, &c, ctx.dim1()));
        current = apply_gauge(ctx, &current, &step)?;
        total = total.compose(&step);
    }
    let total = FormalAutomorphism::new(ctx, total.terms)?;
    let check = apply_gauge(ctx, series, &total)?;
    let trivial = (1..=n).all(|k| check.terms[k].iter().all(|m| m.is_zero()));
    Ok(trivial.then_some(total))
}

#[derive(Debug, Clone, Serialize)]
pub struct RigiditySample {
    pub infinitesimal: Vec<ExactScalar>,
    /// Highest order reached by extension.
    pub extended_to: usize,
    /// Order whose obstruction could not be solved.
    pub obstructed_at: Option<usize>,
    /// Number of orders whose residual was checked to be a 3-cocycle.
    pub residuals_checked: usize,
    pub trivialized: Option<bool>,
    /// `phi_1..phi_N` of the trivializing gauge, `End(A)` coordinates.
    pub gauge: Option<Vec<Vec<ExactScalar>>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RigidityReport {
    pub h2_dim: usize,
    pub max_order: usize,
    pub seed: u64,
    pub samples: Vec<RigiditySample>,
    /// A non-coboundary infinitesimal when `H^2 != 0`.
    pub exhibited: Option<Vec<ExactScalar>>,
    /// `H^2 = 0` and every sample was trivialized.
    pub rigid: bool,
}

/// Extends `theta_1` order by order up to `max_order`.
pub fn extend_to(
    ctx: &DeformationContext,
    theta1: &[ExactScalar],
    max_order: usize,
) -> Result<(DeformationSeries, Vec<ObstructionReport>)> {
    let mut series = DeformationSeries::from_infinitesimal(ctx, theta1)?;
    let mut trace = Vec::new();
    while series.order() < max_order {
        let report = extend_order(ctx, &mut series)?;
        let solvable = report.solvable;
        trace.push(report);
        if !solvable {
            break;
        }
    }
    Ok((series, trace))
}

/// Samples cocycle infinitesimals (zero, a full cocycle basis, and
/// `trials` seeded combinations), extends each through `max_order`, and when
/// `H^2 = 0` trivializes each by an explicit gauge.
pub fn rigidity_probe(ctx: &DeformationContext, max_order: usize, trials: usize, seed: u64) -> Result<RigidityReport> {
    let f = ctx.field;
    let h2 = ctx.h2()?;
    let dim2 = ctx.dim2();
    let basis: Vec<Vec<ExactScalar>> = h2.cocycles.iter().map(|z| sv_to_dense(f, z, dim2)).collect();
    let mut samples_in = vec![vec![f.zero(); dim2]];
    samples_in.extend(basis.iter().cloned());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if !basis.is_empty() {
        for _ in 0..trials {
            let mut v = vec![f.zero(); dim2];
            for z in &basis {
                let c = f.from_i64(rng.gen_range(-3..=3));
                for (x, y) in v.iter_mut().zip(z) {
                    f.add_mul_assign(x, &c, y);
                }
            }
            samples_in.push(v);
        }
    }
    let mut samples = Vec::new();
    for theta in samples_in {
        let (series, trace) = extend_to(ctx, &theta, max_order)?;
        let obstructed_at = trace.iter().find(|r| !r.solvable).map(|r| r.order);
        let (trivialized, gauge) = if h2.dim == 0 && obstructed_at.is_none() {
            match trivializing_gauge(ctx, &series)? {
                Some(phi) => (Some(true), Some(phi.terms[1..].iter().map(sp_to_coords).collect())),
                None => (Some(false), None),
            }
        } else {
            (None, None)
        };
        samples.push(RigiditySample {
            infinitesimal: theta,
            extended_to: series.order(),
            obstructed_at,
            residuals_checked: trace.len(),
            trivialized,
            gauge,
        });
    }
    let exhibited = h2.representatives.first().map(|z| sv_to_dense(f, z, dim2));
    let rigid = h2.dim == 0 && samples.iter().all(|s| s.trivialized == Some(true));
    Ok(RigidityReport { h2_dim: h2.dim, max_order, seed, samples, exhibited, rigid })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopf_structures::{example_catalog, CATALOG};

    fn q() -> FieldSpec {
        FieldSpec::rationals()
    }

    fn ctx_for(name: &str, kind: Option<Kind>) -> DeformationContext {
        let pkg = example_catalog(name, q()).unwrap();
        let kind = kind.unwrap_or(pkg.kind);
        DeformationContext::new(&pkg, kind).unwrap()
    }

    #[test]
    fn orientation_found_on_every_catalog_kind() {
        for name in CATALOG {
            let pkg = example_catalog(name, q()).unwrap();
            for &kind in pkg.kind.views() {
                let ctx = DeformationContext::new(&pkg, kind).unwrap_or_else(|e| panic!("{name} {kind}: {e}"));
                assert_eq!(ctx.families.len(), if kind.is_tricomplex() { 6 } else { 3 });
            }
        }
    }

    #[test]
    fn trivial_series_has_no_residuals() {
        let ctx = ctx_for("group-flip-Z2", None);
        let s = DeformationSeries::trivial(&ctx, 3).unwrap();
        for n in 0..=3 {
            assert!(residuals(&ctx, &s, n).unwrap().iter().all(|r| r.vanishes));
        }
        assert!(residuals(&ctx, &s, 4).is_err());
    }

    #[test]
    fn dual_numbers_extend_with_zero_corrections() {
        let ctx = ctx_for("dual-number-algebra", None);
        let f = q();
        // pi_1(x, x) = 1 with basis (1, x): source index x(x)x = 3, target 1 = 0
        let mut pi1 = SparseMatrix::zeros(f, 2, 4);
        pi1 = pi1
            .add(&SparseMatrix::from_column_entries(f, 2, vec![vec![], vec![], vec![], vec![(0, f.one())]]))
            .unwrap();
        let mut maps = ctx.zero_maps();
        maps[1] = pi1;
        let theta = ctx.theta_vector(&maps);
        assert!(check_infinitesimal(&ctx, &theta).unwrap().is_cocycle);
        let (series, trace) = extend_to(&ctx, &theta, 4).unwrap();
        assert_eq!(series.order(), 4);
        assert!(trace.iter().all(|r| r.solvable && r.residual_is_cocycle));
        for k in 2..=4 {
            assert!(series.terms[k].iter().all(|m| m.is_zero()));
        }
        assert!(!ctx.h2().unwrap().is_coboundary(&sv_from_dense(f, &theta)));
    }

    #[test]
    fn gauge_of_trivial_is_coboundary() {
        let ctx = ctx_for("dual-number-algebra", None);
        let f = q();
        let a = ctx.maps.a;
        let phi1 = ctx.corner_element(&vec![f.one(); ctx.dim1()]);
        let mut terms = FormalAutomorphism::identity(&ctx, 2).terms;
        terms[1] = phi1.clone();
        terms[2] = sp_from_coords(f, a, a, &(0..a * a).map(|i| f.from_i64(i as i64 % 3 - 1)).collect::<Vec<_>>());
        let phi = FormalAutomorphism::new(&ctx, terms).unwrap();
        let triv = DeformationSeries::trivial(&ctx, 2).unwrap();
        let moved = apply_gauge(&ctx, &triv, &phi).unwrap();
        let expect = ctx.d1_of(&phi1);
        assert_eq!(moved.coefficient(&ctx, 1), expect);
        let eq = equivalence_class_order1(&ctx, &vec![f.zero(); ctx.dim2()], &expect).unwrap();
        assert!(eq.equivalent_at_order_1);
    }

    #[test]
    fn inverse_and_identity_gauge() {
        let ctx = ctx_for("dual-number-algebra", None);
        let f = q();
        let mut terms = FormalAutomorphism::identity(&ctx, 3).terms;
        terms[1] = ctx.corner_element(&[f.one()]);
        let phi = FormalAutomorphism::new(&ctx, terms).unwrap();
        let inv = FormalAutomorphism { terms: phi.inverse(3) };
        let prod = phi.compose(&inv);
        assert_eq!(prod, FormalAutomorphism::identity(&ctx, 3));
        let s = DeformationSeries::trivial(&ctx, 3).unwrap();
        assert_eq!(apply_gauge(&ctx, &s, &FormalAutomorphism::identity(&ctx, 3)).unwrap(), s);
    }

    #[test]
    fn non_derivation_leading_term_rejected() {
        let ctx = ctx_for("dual-number-algebra", None);
        let mut terms = FormalAutomorphism::identity(&ctx, 1).terms;
        terms[1] = SparseMatrix::identity(q(), 2);
        assert!(matches!(FormalAutomorphism::new(&ctx, terms), Err(DeformationError::LeadingNotInCorner(1))));
    }

    #[test]
    fn sign_action_null_algebra_is_rigid() {
        let ctx = ctx_for("sign-action-null-algebra", None);
        let report = rigidity_probe(&ctx, 4, 5, 7).unwrap();
        assert_eq!(report.h2_dim, 0);
        assert!(report.rigid);
    }
}
