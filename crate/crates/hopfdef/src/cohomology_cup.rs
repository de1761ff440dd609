//! Cohomology with chosen representatives, the cup products on rows and
//! lines, the isomorphism `zeta` with Hochschild cochains, and exact
//! verifiers for the Leibniz rule and associativity.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complexes::{
    hochschild_diff, mul, BimoduleStructure, CochainComplex, ComplexAssembly, ComplexError, Degree, Direction,
    Maps,
};
use crate::exact_linalg::{sv_to_dense, ExactScalar, FieldSpec, SparseMatrix, SparseVec, SpanBasis};
use crate::hopf_structures::{Kind, StructurePackage};
use crate::tensor_calculus::{sp_permutation, sp_sandwich, sp_twist};

#[derive(Debug, Error)]
pub enum CupError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("degree {n} is beyond the built range (differentials exist through degree {max})")]
    DegreeBeyondCutoff { n: usize, max: isize },
    #[error("{kind} has no product in direction {direction} at {fixed:?}")]
    NoProduct { kind: Kind, direction: Direction, fixed: Degree },
    #[error("degree {0} is not on this line")]
    OffLine(usize),
    #[error("the product on the coefficients fails: {0}")]
    ThreeConditions(String),
}

pub type Result<T> = std::result::Result<T, CupError>;

/// `H^n` of a cochain complex, with deterministic representatives.
#[derive(Debug, Clone)]
pub struct CohomologyResult {
    pub degree: usize,
    pub dim: usize,
    pub space_dim: usize,
    pub cocycles: Vec<SparseVec>,
    pub coboundaries: Vec<SparseVec>,
    /// Cocycles completing a coboundary basis to a cocycle basis, picked in
    /// order from `cocycles`.
    pub representatives: Vec<SparseVec>,
    classifier: SpanBasis,
    boundary_span: SpanBasis,
    field: FieldSpec,
}

impl CohomologyResult {
    pub fn field(&self) -> FieldSpec {
        self.field
    }

    /// Coordinates of the class of `v` on the representatives, or `None`
    /// when `v` is not a cocycle.
    pub fn class_of(&self, v: &SparseVec) -> Option<Vec<ExactScalar>> {
        let red = self.classifier.reduce(v);
        red.residual.is_empty().then(|| sv_to_dense(self.field, &red.combination, self.dim))
    }

    pub fn is_coboundary(&self, v: &SparseVec) -> bool {
        self.boundary_span.contains(v)
    }
}

fn columns(m: &SparseMatrix) -> Vec<SparseVec> {
    (0..m.cols()).map(|j| m.column(j).to_vec()).collect()
}

/// Cohomology at degree `n`; needs the differentials out of `n - 1` and `n`.
pub fn cohomology(cx: &CochainComplex, n: usize) -> Result<CohomologyResult> {
    if n >= cx.diffs.len() {
        return Err(CupError::DegreeBeyondCutoff { n, max: cx.diffs.len() as isize - 1 });
    }
    let f = cx.field;
    let dn = &cx.diffs[n];
    let mut span = SpanBasis::new(f, dn.cols());
    let mut cocycles = Vec::new();
    for (j, col) in columns(dn).iter().enumerate() {
        if let Some(rel) = span.insert(col, j) {
            cocycles.push(rel);
        }
    }
    let mut boundary_span = SpanBasis::new(f, 0);
    if n > 0 {
        for col in columns(&cx.diffs[n - 1]) {
            boundary_span.insert_tagged(&col, Vec::new());
        }
    }
    let coboundaries = boundary_span.vectors().to_vec();
    let mut classifier = SpanBasis::new(f, 0);
    for b in &coboundaries {
        classifier.insert_tagged(b, Vec::new());
    }
    let mut representatives = Vec::new();
    for z in &cocycles {
        let k = representatives.len();
        if classifier.insert_tagged(z, vec![(k, f.one())]).is_none() {
            representatives.push(z.clone());
        }
    }
    Ok(CohomologyResult {
        degree: n,
        dim: representatives.len(),
        space_dim: cx.dims[n],
        cocycles,
        coboundaries,
        representatives,
        classifier,
        boundary_span,
        field: f,
    })
}

/// `phi (x) psi -> P (phi (x) psi) Q`, or `phi (x) psi -> phi (Id_u (x) K psi)`.
#[derive(Debug, Clone)]
pub enum CupShape {
    Sandwich { inner: SparseMatrix, outer: SparseMatrix },
    Compose { prefix: usize, link: SparseMatrix },
}

/// The product `Hom(S1, T1) x Hom(S2, T2) -> Hom(S, T)` at one pair of degrees.
#[derive(Debug, Clone)]
pub struct CupFactor {
    pub shape: CupShape,
    pub s1: usize,
    pub t1: usize,
    pub s2: usize,
    pub t2: usize,
    pub s: usize,
    pub t: usize,
    /// Extra scalar on every product; only changed by mutation tests.
    pub scale: ExactScalar,
}

impl CupFactor {
    pub fn left_dim(&self) -> usize {
        self.s1 * self.t1
    }

    pub fn right_dim(&self) -> usize {
        self.s2 * self.t2
    }

    pub fn out_dim(&self) -> usize {
        self.s * self.t
    }

    /// `psi -> phi ∪ psi` as a matrix.
    pub fn left_mul(&self, phi: &SparseVec) -> SparseMatrix {
        let f = self.scale_field();
        let phi_m = vec_to_map(f, phi, self.s1, self.t1);
        let m = match &self.shape {
            CupShape::Sandwich { inner, outer } => {
                let outer = mul(outer, &phi_m.kron(&SparseMatrix::identity(f, self.t2)).expect("kron"));
                sp_sandwich(inner, &outer, self.s2, self.t2, self.s1, 1).expect("cup shape")
            }
            CupShape::Compose { prefix, link } => {
                let outer = mul(&phi_m, &SparseMatrix::identity(f, *prefix).kron(link).expect("kron"));
                let inner = SparseMatrix::identity(f, prefix * self.s2);
                sp_sandwich(&inner, &outer, self.s2, self.t2, *prefix, 1).expect("cup shape")
            }
        };
        if f.is_one(&self.scale) {
            m
        } else {
            m.scale(&self.scale)
        }
    }

    pub fn product(&self, phi: &SparseVec, psi: &SparseVec) -> SparseVec {
        let f = self.scale_field();
        let out = self.left_mul(phi).mul_vec(&sv_to_dense(f, psi, self.right_dim())).expect("shape");
        crate::exact_linalg::sv_from_dense(f, &out)
    }

    /// The whole bilinear map as a matrix on `phi (x) psi` coordinates
    /// (`i * right_dim + j`).
    pub fn matrix(&self) -> SparseMatrix {
        let f = self.scale_field();
        let mut cols = Vec::with_capacity(self.left_dim() * self.right_dim());
        for i in 0..self.left_dim() {
            let l = self.left_mul(&vec![(i, f.one())]);
            for j in 0..l.cols() {
                cols.push(l.column(j).to_vec());
            }
        }
        SparseMatrix::from_column_entries(f, self.out_dim(), cols)
    }

    fn scale_field(&self) -> FieldSpec {
        match &self.shape {
            CupShape::Sandwich { inner, .. } => inner.field(),
            CupShape::Compose { link, .. } => link.field(),
        }
    }
}

/// Cochain coordinates `s * t_dim + t` as a matrix `S -> T`.
pub fn vec_to_map(f: FieldSpec, v: &SparseVec, s: usize, t: usize) -> SparseMatrix {
    let mut cols = vec![Vec::new(); s];
    for (i, x) in v {
        cols[i / t].push((i % t, x.clone()));
    }
    SparseMatrix::from_column_entries(f, t, cols)
}

/// The product on one line of a bicomplex or tricomplex.
#[derive(Debug, Clone)]
pub struct CupStructure {
    pub kind: Kind,
    pub direction: Direction,
    /// The line's fixed coordinates; the moving one is ignored.
    pub fixed: Degree,
    maps: Maps,
    /// Multiplies `phi ∪ psi` by `(-1)^deg psi`; a deliberately wrong product
    /// for mutation tests.
    pub sign_twist: bool,
    /// Order of the two `H` blocks in the comodule-bialgebra `d_III` product.
    pub h_block_order: HBlockOrder,
}

/// Placement of the `H^r1` and `H^r2` blocks of `phi ∪ psi` on the
/// `d_III` line of the comodule-bialgebra tricomplex.
///
/// `d_III[0]` appends its new `H` factor on the right of the block and
/// `d_III[r+1]` prepends on the left, so the Leibniz rule needs `psi`'s
/// block first. The displayed formula puts `phi`'s block first; that
/// version is kept to show the failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HBlockOrder {
    SecondFirst,
    FirstFirst,
}

impl CupStructure {
    pub fn new(pkg: &StructurePackage, direction: Direction, fixed: Degree) -> Result<Self> {
        let kind = pkg.kind;
        use Direction::*;
        let ok = match (kind, direction) {
            (Kind::MA | Kind::MC | Kind::CA | Kind::CC, Horizontal) => true,
            (Kind::MA, Vertical) => fixed[0] == 1,
            (Kind::MB | Kind::CB, I | II | III) => true,
            _ => false,
        };
        if !ok {
            return Err(CupError::NoProduct { kind, direction, fixed });
        }
        Ok(CupStructure {
            kind,
            direction,
            fixed,
            maps: Maps::from_package(pkg),
            sign_twist: false,
            h_block_order: HBlockOrder::SecondFirst,
        })
    }

    pub fn maps(&self) -> &Maps {
        &self.maps
    }

    /// Grid degree at position `k` of the line.
    pub fn degree_at(&self, k: usize) -> Degree {
        let mut d = self.fixed;
        d[self.direction.axis()] = k;
        d
    }

    /// Smallest position carrying a nonzero space.
    pub fn min_degree(&self) -> usize {
        match self.direction {
            Direction::Horizontal | Direction::I | Direction::II => 1,
            Direction::Vertical | Direction::III => 0,
        }
    }

    pub fn factor(&self, r: usize, s: usize) -> Result<CupFactor> {
        let lo = self.min_degree();
        for k in [r, s] {
            if k < lo {
                return Err(CupError::OffLine(k));
            }
        }
        let m = &self.maps;
        let f = m.field;
        let a = m.a;
        let tw = |x, y| sp_twist(f, x, y);
        let [fp, fq, fr] = self.fixed;
        use Direction::*;
        let (shape, s1, t1, s2, t2, s_, t_) = match (self.kind, self.direction) {
            (Kind::MA, Horizontal) => {
                let hq = m.hp(fq);
                let inner = mul(
                    &m.t(&[&m.id(hq), &tw(hq, m.ap(r)), &m.id(m.ap(s))]),
                    &m.t(&[&m.delta_hpow(fq), &m.id(m.ap(r + s))]),
                );
                let shape = CupShape::Sandwich { inner, outer: m.mu()?.clone() };
                (shape, hq * m.ap(r), a, hq * m.ap(s), a, hq * m.ap(r + s), a)
            }
            (Kind::MA, Vertical) => {
                let shape = CupShape::Compose { prefix: m.hp(r), link: m.id(a) };
                (shape, m.hp(r) * a, a, m.hp(s) * a, a, m.hp(r + s) * a, a)
            }
            (Kind::MC, Horizontal) => {
                let hq = m.hp(fq);
                let inner = mul(&m.t(&[&m.id(hq), &tw(hq, a), &m.id(a)]), &m.t(&[&m.delta_hpow(fq), m.delta()?]));
                let shape = CupShape::Sandwich { inner, outer: m.id(m.ap(r + s)) };
                (shape, hq * a, m.ap(r), hq * a, m.ap(s), hq * a, m.ap(r + s))
            }
            (Kind::CA, Horizontal) => {
                let hq = m.hp(fq);
                let outer = mul(&m.t(&[&m.mu_hpow(fq), m.mu()?]), &m.t(&[&m.id(hq), &tw(a, hq), &m.id(a)]));
                let shape = CupShape::Sandwich { inner: m.id(m.ap(r + s)), outer };
                (shape, m.ap(r), hq * a, m.ap(s), hq * a, m.ap(r + s), hq * a)
            }
            (Kind::CC, Horizontal) => {
                let hq = m.hp(fq);
                let outer = mul(
                    &m.t(&[&m.mu_hpow(fq), &m.id(m.ap(r + s))]),
                    &m.t(&[&m.id(hq), &tw(m.ap(r), hq), &m.id(m.ap(s))]),
                );
                let shape = CupShape::Sandwich { inner: m.delta()?.clone(), outer };
                (shape, a, hq * m.ap(r), a, hq * m.ap(s), a, hq * m.ap(r + s))
            }
            (Kind::MB, I) => {
                let hr = m.hp(fr);
                let inner = mul(
                    &m.t(&[&m.id(hr), &tw(hr, m.ap(r)), &m.id(m.ap(s))]),
                    &m.t(&[&m.delta_hpow(fr), &m.id(m.ap(r + s))]),
                );
                let shape = CupShape::Sandwich { inner, outer: m.mu_apow(fq)? };
                (shape, hr * m.ap(r), m.ap(fq), hr * m.ap(s), m.ap(fq), hr * m.ap(r + s), m.ap(fq))
            }
            (Kind::MB, II) => {
                let (hr, ap) = (m.hp(fr), m.ap(fp));
                let inner = mul(
                    &m.t(&[&m.id(hr), &tw(hr, ap), &m.id(ap)]),
                    &m.t(&[&m.delta_hpow(fr), &m.delta_pow(fp)?]),
                );
                let shape = CupShape::Sandwich { inner, outer: m.id(m.ap(r + s)) };
                (shape, hr * ap, m.ap(r), hr * ap, m.ap(s), hr * ap, m.ap(r + s))
            }
            (Kind::MB, III) => {
                let ap = m.ap(fp);
                let link = mul(&m.acoprod(fp)?, &m.aprod(fq)?);
                let shape = CupShape::Compose { prefix: m.hp(r), link };
                (shape, m.hp(r) * ap, m.ap(fq), m.hp(s) * ap, m.ap(fq), m.hp(r + s) * ap, m.ap(fq))
            }
            (Kind::CB, I) => {
                let (hr, aq) = (m.hp(fr), m.ap(fq));
                let outer = mul(&m.t(&[&m.mu_hpow(fr), &m.mu_apow(fq)?]), &m.t(&[&m.id(hr), &tw(aq, hr), &m.id(aq)]));
                let shape = CupShape::Sandwich { inner: m.id(m.ap(r + s)), outer };
                (shape, m.ap(r), hr * aq, m.ap(s), hr * aq, m.ap(r + s), hr * aq)
            }
            (Kind::CB, II) => {
                let (hr, ap) = (m.hp(fr), m.ap(fp));
                let outer = mul(
                    &m.t(&[&m.mu_hpow(fr), &m.id(m.ap(r + s))]),
                    &m.t(&[&m.id(hr), &tw(m.ap(r), hr), &m.id(m.ap(s))]),
                );
                let shape = CupShape::Sandwich { inner: m.delta_pow(fp)?, outer };
                (shape, ap, hr * m.ap(r), ap, hr * m.ap(s), ap, hr * m.ap(r + s))
            }
            (Kind::CB, III) => {
                let (ap, aq) = (m.ap(fp), m.ap(fq));
                let order = match self.h_block_order {
                    HBlockOrder::SecondFirst => [2, 0, 1, 3],
                    HBlockOrder::FirstFirst => [0, 2, 1, 3],
                };
                let perm = sp_permutation(f, &[m.hp(r), aq, m.hp(s), aq], &order);
                let outer = mul(&m.t(&[&m.id(m.hp(r + s)), &m.mu_apow(fq)?]), &perm);
                let shape = CupShape::Sandwich { inner: m.delta_pow(fp)?, outer };
                (shape, ap, m.hp(r) * aq, ap, m.hp(s) * aq, ap, m.hp(r + s) * aq)
            }
            _ => return Err(CupError::NoProduct { kind: self.kind, direction: self.direction, fixed: self.fixed }),
        };
        let scale = if self.sign_twist { f.sign(s) } else { f.one() };
        Ok(CupFactor { shape, s1, t1, s2, t2, s: s_, t: t_, scale })
    }

    pub fn cup(&self, r: usize, phi: &SparseVec, s: usize, psi: &SparseVec) -> Result<SparseVec> {
        Ok(self.factor(r, s)?.product(phi, psi))
    }
}

/// `Hoch^*(X, M)` for an algebra `X`, an `X`-bimodule `M` and an associative
/// product on `M`, with the three compatibility conditions checked.
#[derive(Debug, Clone)]
pub struct HochschildDga {
    pub mu: SparseMatrix,
    pub x_dim: usize,
    pub bimodule: BimoduleStructure,
    pub m_mul: SparseMatrix,
}

impl HochschildDga {
    pub fn new(mu: SparseMatrix, bimodule: BimoduleStructure, m_mul: SparseMatrix) -> Result<Self> {
        let x_dim = mu.rows();
        let dga = HochschildDga { mu, x_dim, bimodule, m_mul };
        if let Some((name, _)) = dga.conditions().into_iter().find(|(_, ok)| !ok) {
            return Err(CupError::ThreeConditions(name));
        }
        Ok(dga)
    }

    /// Bimodule axioms, associativity of the product on `M`, and
    /// `a(mn) = (am)n`, `(ma)n = m(an)`, `(mn)a = m(na)`.
    pub fn conditions(&self) -> Vec<(String, bool)> {
        let f = self.mu.field();
        let (x, m) = (self.x_dim, self.bimodule.dim);
        let id = |n| SparseMatrix::identity(f, n);
        let k = |a: &SparseMatrix, b: &SparseMatrix| a.kron(b).expect("kron");
        let (l, r, p) = (&self.bimodule.left, &self.bimodule.right, &self.m_mul);
        let mut out = self.bimodule.verify(&self.mu);
        out.push(("product on M is associative".into(), mul(p, &k(p, &id(m))) == mul(p, &k(&id(m), p))));
        out.push(("a(mn) = (am)n".into(), mul(l, &k(&id(x), p)) == mul(p, &k(l, &id(m)))));
        out.push(("(ma)n = m(an)".into(), mul(p, &k(r, &id(m))) == mul(p, &k(&id(m), l))));
        out.push(("(mn)a = m(na)".into(), mul(r, &k(p, &id(x))) == mul(p, &k(&id(m), r))));
        out
    }

    pub fn diff(&self, n: usize) -> Result<SparseMatrix> {
        Ok(hochschild_diff(&self.mu, self.x_dim, &self.bimodule, n)?.raw)
    }

    /// `(phi ∪ psi)(a_1..a_(r+s)) = phi(a_1..a_r) . psi(a_(r+1)..a_(r+s))`.
    pub fn cup_factor(&self, r: usize, s: usize) -> CupFactor {
        let f = self.mu.field();
        let x = self.x_dim;
        let m = self.bimodule.dim;
        let shape = CupShape::Sandwich { inner: SparseMatrix::identity(f, x.pow((r + s) as u32)), outer: self.m_mul.clone() };
        CupFactor {
            shape,
            s1: x.pow(r as u32),
            t1: m,
            s2: x.pow(s as u32),
            t2: m,
            s: x.pow((r + s) as u32),
            t: m,
            scale: f.one(),
        }
    }
}

/// `Hom(H^q, A)` as an `A`-bimodule and algebra, with legs of `x_1..x_q`
/// split by the comultiplication of `H`.
pub fn hom_hq_a_dga(maps: &Maps, q: usize) -> Result<HochschildDga> {
    let f = maps.field;
    let (a, hq) = (maps.a, maps.hp(q));
    let m_dim = hq * a;
    let mu = maps.mu()?.clone();
    let split = maps.delta_hpow(q);
    let act = maps.iterated_action(q)?;
    let mut left_cols = Vec::with_capacity(a * m_dim);
    let mut right_blocks = Vec::with_capacity(a);
    for i in 0..a {
        let e_i = SparseMatrix::from_column_entries(f, a, vec![vec![(i, f.one())]]);
        let g = mul(&act, &maps.t(&[&maps.id(hq), &e_i]));
        let lm = sp_sandwich(&split, &mul(&mu, &maps.t(&[&g, &maps.id(a)])), hq, a, hq, 1).map_err(ComplexError::from)?;
        left_cols.extend(columns(&lm));
        let rm = sp_sandwich(&split, &mul(&mu, &maps.t(&[&maps.id(a), &g])), hq, a, 1, hq).map_err(ComplexError::from)?;
        right_blocks.push(rm);
    }
    let left = SparseMatrix::from_column_entries(f, m_dim, left_cols);
    let mut right_cols = vec![Vec::new(); m_dim * a];
    for (i, rm) in right_blocks.iter().enumerate() {
        for c in 0..m_dim {
            right_cols[c * a + i] = rm.column(c).to_vec();
        }
    }
    let right = SparseMatrix::from_column_entries(f, m_dim, right_cols);
    let mut prod_cols = vec![Vec::new(); m_dim * m_dim];
    for y in 0..hq {
        for (k, c) in split.column(y) {
            let (x1, x2) = (k / hq, k % hq);
            for t1 in 0..a {
                for t2 in 0..a {
                    let col = (x1 * a + t1) * m_dim + x2 * a + t2;
                    for (t3, v) in mu.column(t1 * a + t2) {
                        prod_cols[col].push((y * a + t3, f.mul(c, v)));
                    }
                }
            }
        }
    }
    let m_mul = SparseMatrix::from_column_entries(f, m_dim, prod_cols);
    HochschildDga::new(mu, BimoduleStructure { dim: m_dim, left, right }, m_mul)
}

/// Coordinate change from `C_MA^(p,q)` (`phi(x (x) a)`) to
/// `Hoch^p(A, Hom(H^q, A))` (`phi(a)(x)`); a permutation matrix whose
/// transpose is `zeta`.
pub fn zeta_matrix(f: FieldSpec, h: usize, a: usize, p: usize, q: usize) -> SparseMatrix {
    let (hq, ap) = (h.pow(q as u32), a.pow(p as u32));
    let n = hq * ap * a;
    let mut cols = vec![Vec::new(); n];
    for x in 0..hq {
        for s in 0..ap {
            for t in 0..a {
                cols[(x * ap + s) * a + t].push(((s * hq + x) * a + t, f.one()));
            }
        }
    }
    SparseMatrix::from_column_entries(f, n, cols)
}

/// Which law a check concerns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Law {
    Leibniz,
    Associativity,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LawCheck {
    pub law: Law,
    pub degrees: Vec<usize>,
    pub passed: bool,
    /// First basis cochain (index in the first factor) where it fails.
    pub witness: Option<usize>,
    /// Set when a Leibniz failure disappears after reversing the sign of
    /// the `phi ∪ d psi` term.
    pub sign_term_reversed: bool,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct LawReport {
    pub checks: Vec<LawCheck>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&LawCheck> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

fn line_raw(cup: &CupStructure, asm: &ComplexAssembly, k: usize) -> Option<SparseMatrix> {
    asm.diff(cup.degree_at(k), cup.direction).map(|d| d.raw.clone())
}

fn line_dim(cup: &CupStructure, asm: &ComplexAssembly, k: usize) -> Option<usize> {
    asm.space(cup.degree_at(k)).map(|s| s.dim())
}

/// `d(phi ∪ psi) = d phi ∪ psi + (-1)^r phi ∪ d psi` for every basis `phi`
/// of degree `r` and all `psi`, and `(phi ∪ psi) ∪ chi = phi ∪ (psi ∪ chi)`
/// for basis `phi`, `psi`, over all degrees with `r + s (+ t) <= max_degree`
/// that the assembly covers. Raw differentials of the line are used; the
/// line's outer sign is constant along it.
pub fn verify_leibniz(cup: &CupStructure, asm: &ComplexAssembly, max_degree: usize) -> Result<LawReport> {
    let f = asm.field;
    let lo = cup.min_degree();
    let mut checks = Vec::new();
    for r in lo..=max_degree {
        for s in lo..=max_degree.saturating_sub(r) {
            let (Some(dr), Some(ds), Some(drs)) = (line_raw(cup, asm, r), line_raw(cup, asm, s), line_raw(cup, asm, r + s))
            else {
                continue;
            };
            let fac = cup.factor(r, s)?;
            let fac_dr = cup.factor(r + 1, s)?;
            let fac_ds = cup.factor(r, s + 1)?;
            let mut witness = None;
            let mut reversed_ok = true;
            for i in 0..fac.left_dim() {
                let e = vec![(i, f.one())];
                let lphi = fac.left_mul(&e);
                let lhs = mul(&drs, &lphi);
                let dphi = dr.column(i).to_vec();
                let first = fac_dr.left_mul(&dphi);
                let second = mul(&fac_ds.left_mul(&e), &ds).scale(&f.sign(r));
                let rhs = first.add(&second).expect("shape");
                if lhs != rhs {
                    witness.get_or_insert(i);
                    let alt = first.sub(&second).expect("shape");
                    reversed_ok &= lhs == alt;
                }
            }
            checks.push(LawCheck {
                law: Law::Leibniz,
                degrees: vec![r, s],
                passed: witness.is_none(),
                witness,
                sign_term_reversed: witness.is_some() && reversed_ok,
            });
        }
    }
    for r in lo..=max_degree {
        for s in lo..=max_degree.saturating_sub(r) {
            for t in lo..=max_degree.saturating_sub(r + s) {
                if [r, s, t, r + s, s + t, r + s + t].iter().any(|&k| line_dim(cup, asm, k).is_none()) {
                    continue;
                }
                let rs = cup.factor(r, s)?;
                let rs_t = cup.factor(r + s, t)?;
                let r_st = cup.factor(r, s + t)?;
                let st = cup.factor(s, t)?;
                let mut witness = None;
                'outer: for i in 0..rs.left_dim() {
                    let e = vec![(i, f.one())];
                    let l_phi = r_st.left_mul(&e);
                    for j in 0..rs.right_dim() {
                        let prod = rs.product(&e, &vec![(j, f.one())]);
                        let lhs = rs_t.left_mul(&prod);
                        let rhs = mul(&l_phi, &st.left_mul(&vec![(j, f.one())]));
                        if lhs != rhs {
                            witness = Some(i);
                            break 'outer;
                        }
                    }
                }
                checks.push(LawCheck {
                    law: Law::Associativity,
                    degrees: vec![r, s, t],
                    passed: witness.is_none(),
                    witness,
                    sign_term_reversed: false,
                });
            }
        }
    }
    Ok(LawReport { checks })
}

/// One structure constant of a cohomology ring: the class of
/// `rep_r[i] ∪ rep_s[j]` in degree `r + s`.
#[derive(Debug, Clone, Serialize)]
pub struct ProductEntry {
    pub r: usize,
    pub s: usize,
    pub i: usize,
    pub j: usize,
    pub class: Vec<ExactScalar>,
}

#[derive(Debug, Clone)]
pub struct CohomologyAlgebra {
    pub groups: Vec<CohomologyResult>,
    pub table: Vec<ProductEntry>,
    /// Products of cocycles were cocycles.
    pub cocycle_closure: bool,
    /// Products of a cocycle with a coboundary were coboundaries.
    pub coboundary_absorption: bool,
}

impl CohomologyAlgebra {
    pub fn dims(&self) -> Vec<usize> {
        self.groups.iter().map(|g| g.dim).collect()
    }
}

/// Multiplication table of `H^*` of a line on the chosen representatives,
/// through degree `max_degree`. `line` is the line's cochain complex indexed
/// by the moving coordinate.
pub fn cohomology_algebra(cup: &CupStructure, line: &CochainComplex, max_degree: usize) -> Result<CohomologyAlgebra> {
    let top = max_degree.min(line.diffs.len().saturating_sub(1));
    let groups = (0..=top).map(|n| cohomology(line, n)).collect::<Result<Vec<_>>>()?;
    let lo = cup.min_degree().max(1);
    let mut table = Vec::new();
    let mut closure = true;
    let mut absorption = true;
    for r in lo..=top {
        for s in lo..=top.saturating_sub(r) {
            let fac = cup.factor(r, s)?;
            let target = &groups[r + s];
            for (i, x) in groups[r].representatives.iter().enumerate() {
                for (j, y) in groups[s].representatives.iter().enumerate() {
                    let prod = fac.product(x, y);
                    match target.class_of(&prod) {
                        Some(class) => table.push(ProductEntry { r, s, i, j, class }),
                        None => closure = false,
                    }
                }
                for b in &groups[s].coboundaries {
                    absorption &= target.is_coboundary(&fac.product(x, b));
                }
            }
            for b in &groups[r].coboundaries {
                for y in &groups[s].representatives {
                    absorption &= target.is_coboundary(&fac.product(b, y));
                }
            }
        }
    }
    Ok(CohomologyAlgebra { groups, table, cocycle_closure: closure, coboundary_absorption: absorption })
}
