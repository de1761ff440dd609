//! Reference evaluators shared by the integration tests. They work on basis
//! tuples with plain `BigRational` arithmetic and never touch the library's
//! matrix compiler, so agreement with it is a real cross-check.

#![allow(dead_code, clippy::needless_range_loop)]

use hopfdef::exact_linalg::{ExactMatrix, ExactScalar, FieldSpec, SparseMatrix};
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Q = BigRational;
/// Dense row-major matrix.
pub type Mat = Vec<Vec<Q>>;

pub fn q() -> FieldSpec {
    FieldSpec::rationals()
}

pub fn f5() -> FieldSpec {
    FieldSpec::prime(5).unwrap()
}

pub fn qi(v: i64) -> Q {
    Q::from_integer(v.into())
}

pub fn rat(x: &ExactScalar) -> Q {
    x.to_rational().expect("rational scalar")
}

pub fn dense(m: &ExactMatrix) -> Mat {
    (0..m.rows()).map(|i| m.row(i).iter().map(rat).collect()).collect()
}

pub fn dense_sparse(m: &SparseMatrix) -> Mat {
    dense(&m.to_dense())
}

pub fn zeros(rows: usize, cols: usize) -> Mat {
    vec![vec![Q::zero(); cols]; rows]
}

/// Rank by plain Gaussian elimination.
pub fn rank(m: &Mat) -> usize {
    let mut m = m.clone();
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = Q::one() / m[r][c].clone();
        for j in c..cols {
            m[r][j] = &m[r][j] * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let k = m[i][c].clone();
                for j in c..cols {
                    let t = &k * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// Digits of `flat` in base `d`, most significant first.
pub fn digits(mut flat: usize, d: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for k in (0..n).rev() {
        out[k] = flat % d;
        flat /= d;
    }
    out
}

pub fn flat(idx: &[usize], d: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * d + i)
}

/// Structure constants of an algebra and, optionally, a coalgebra on the
/// same basis.
#[derive(Clone)]
pub struct Consts {
    pub dim: usize,
    /// `mu[i][j]` lists `(k, c)` with `e_i e_j = sum c e_k`.
    pub mu: Vec<Vec<Vec<(usize, Q)>>>,
    /// `delta[i]` lists `((j, k), c)` with `Delta e_i = sum c e_j (x) e_k`.
    pub delta: Vec<Vec<((usize, usize), Q)>>,
}

impl Consts {
    pub fn new(mu: Option<&ExactMatrix>, delta: Option<&ExactMatrix>, dim: usize) -> Self {
        let mut m = vec![vec![Vec::new(); dim]; dim];
        if let Some(mu) = mu {
            for i in 0..dim {
                for j in 0..dim {
                    for k in 0..dim {
                        let c = rat(mu.get(k, i * dim + j));
                        if !c.is_zero() {
                            m[i][j].push((k, c));
                        }
                    }
                }
            }
        }
        let mut d = vec![Vec::new(); dim];
        if let Some(delta) = delta {
            for i in 0..dim {
                for j in 0..dim {
                    for k in 0..dim {
                        let c = rat(delta.get(j * dim + k, i));
                        if !c.is_zero() {
                            d[i].push(((j, k), c));
                        }
                    }
                }
            }
        }
        Consts { dim, mu: m, delta: d }
    }
}

/// A tensor of fixed length as a sparse sum of basis tuples.
pub type Tensor = Vec<(Vec<usize>, Q)>;

fn push(t: &mut Tensor, idx: Vec<usize>, c: Q) {
    if c.is_zero() {
        return;
    }
    if let Some(e) = t.iter_mut().find(|(i, _)| *i == idx) {
        e.1 += c;
    } else {
        t.push((idx, c));
    }
}

fn clean(t: Tensor) -> Tensor {
    t.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

/// `a_1 a_2 ... a_n` for `n >= 1`, multiplied left to right.
pub fn product(k: &Consts, xs: &[usize]) -> Vec<(usize, Q)> {
    let mut acc: Vec<(usize, Q)> = vec![(xs[0], Q::one())];
    for &x in &xs[1..] {
        let mut next: Vec<(usize, Q)> = Vec::new();
        for (y, c) in &acc {
            for (z, d) in &k.mu[*y][x] {
                match next.iter_mut().find(|(w, _)| w == z) {
                    Some(e) => e.1 += c * d,
                    None => next.push((*z, c * d)),
                }
            }
        }
        acc = next.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    }
    acc
}

/// `a_(1) (x) ... (x) a_(n)`, splitting the last leg each time.
pub fn coproduct(k: &Consts, a: usize, n: usize) -> Tensor {
    let mut acc: Tensor = vec![(vec![a], Q::one())];
    for _ in 1..n {
        let mut next = Tensor::new();
        for (idx, c) in &acc {
            let last = *idx.last().unwrap();
            for ((x, y), d) in &k.delta[last] {
                let mut i = idx[..idx.len() - 1].to_vec();
                i.push(*x);
                i.push(*y);
                push(&mut next, i, c * d);
            }
        }
        acc = clean(next);
    }
    acc
}

/// `a . (y_1 (x) ... (x) y_q) = a_(1)y_1 (x) ... (x) a_(q)y_q`.
fn act_left(k: &Consts, a: usize, y: &[usize]) -> Tensor {
    let mut out = Tensor::new();
    for (legs, c) in coproduct(k, a, y.len()) {
        let mut partial: Tensor = vec![(Vec::new(), c)];
        for (l, &yy) in legs.iter().zip(y) {
            let mut next = Tensor::new();
            for (idx, c) in &partial {
                for (z, d) in product(k, &[*l, yy]) {
                    let mut i = idx.clone();
                    i.push(z);
                    push(&mut next, i, c * &d);
                }
            }
            partial = next;
        }
        for (i, c) in partial {
            push(&mut out, i, c);
        }
    }
    clean(out)
}

fn act_right(k: &Consts, y: &[usize], a: usize) -> Tensor {
    let mut out = Tensor::new();
    for (legs, c) in coproduct(k, a, y.len()) {
        let mut partial: Tensor = vec![(Vec::new(), c)];
        for (l, &yy) in legs.iter().zip(y) {
            let mut next = Tensor::new();
            for (idx, c) in &partial {
                for (z, d) in product(k, &[yy, *l]) {
                    let mut i = idx.clone();
                    i.push(z);
                    push(&mut next, i, c * &d);
                }
            }
            partial = next;
        }
        for (i, c) in partial {
            push(&mut out, i, c);
        }
    }
    clean(out)
}

/// A basis cochain `A^p -> A^q`: sends the tuple `src` to the tuple `dst`.
#[derive(Clone, Copy)]
struct Basis {
    src: usize,
    dst: usize,
}

fn eval(b: Basis, x: &[usize], a: usize, q: usize) -> Option<Vec<usize>> {
    (flat(x, a) == b.src).then(|| digits(b.dst, a, q))
}

/// Gerstenhaber-Schack Hochschild coboundary `Hom(A^p, A^q) -> Hom(A^(p+1), A^q)`,
/// `A^q` an `A`-bimodule through the diagonal.
pub fn gs_hochschild(k: &Consts, p: usize, q: usize) -> Mat {
    let a = k.dim;
    let (ap, aq, ap1) = (a.pow(p as u32), a.pow(q as u32), a.pow(p as u32 + 1));
    let mut m = zeros(ap1 * aq, ap * aq);
    for col in 0..ap * aq {
        let b = Basis { src: col / aq, dst: col % aq };
        for s in 0..ap1 {
            let x = digits(s, a, p + 1);
            let mut out = Tensor::new();
            if let Some(y) = eval(b, &x[1..], a, q) {
                for (i, c) in act_left(k, x[0], &y) {
                    push(&mut out, i, c);
                }
            }
            for i in 1..=p {
                for (z, c) in product(k, &[x[i - 1], x[i]]) {
                    let mut merged = x[..i - 1].to_vec();
                    merged.push(z);
                    merged.extend_from_slice(&x[i + 1..]);
                    if let Some(y) = eval(b, &merged, a, q) {
                        push(&mut out, y, sgn(i) * c);
                    }
                }
            }
            if let Some(y) = eval(b, &x[..p], a, q) {
                for (i, c) in act_right(k, &y, x[p]) {
                    push(&mut out, i, sgn(p + 1) * c);
                }
            }
            for (y, c) in out {
                m[s * aq + flat(&y, a)][col] += c;
            }
        }
    }
    m
}

/// Gerstenhaber-Schack Cartier coboundary `Hom(A^p, A^q) -> Hom(A^p, A^(q+1))`,
/// `A^p` an `A`-bicomodule through the diagonal.
pub fn gs_cartier(k: &Consts, p: usize, q: usize) -> Mat {
    let a = k.dim;
    let (ap, aq, aq1) = (a.pow(p as u32), a.pow(q as u32), a.pow(q as u32 + 1));
    let mut m = zeros(ap * aq1, ap * aq);
    for col in 0..ap * aq {
        let b = Basis { src: col / aq, dst: col % aq };
        for s in 0..ap {
            let x = digits(s, a, p);
            let mut out = Tensor::new();
            // x_(1) (x) x_(2) for the diagonal coproduct of A^p.
            let splits = diag_split(k, &x);
            for (l, r, c) in &splits {
                if let Some(y) = eval(b, r, a, q) {
                    for (z, d) in product(k, l) {
                        let mut i = vec![z];
                        i.extend(&y);
                        push(&mut out, i, c * d);
                    }
                }
            }
            if let Some(y) = eval(b, &x, a, q) {
                for i in 1..=q {
                    for ((u, v), c) in &k.delta[y[i - 1]] {
                        let mut idx = y[..i - 1].to_vec();
                        idx.push(*u);
                        idx.push(*v);
                        idx.extend_from_slice(&y[i..]);
                        push(&mut out, idx, sgn(i) * c);
                    }
                }
            }
            for (l, r, c) in &splits {
                if let Some(y) = eval(b, l, a, q) {
                    for (z, d) in product(k, r) {
                        let mut i = y.clone();
                        i.push(z);
                        push(&mut out, i, sgn(q + 1) * c * d);
                    }
                }
            }
            for (y, c) in clean(out) {
                m[s * aq1 + flat(&y, a)][col] += c;
            }
        }
    }
    m
}

fn diag_split(k: &Consts, x: &[usize]) -> Vec<(Vec<usize>, Vec<usize>, Q)> {
    let mut acc: Vec<(Vec<usize>, Vec<usize>, Q)> = vec![(Vec::new(), Vec::new(), Q::one())];
    for &xi in x {
        let mut next = Vec::new();
        for (l, r, c) in &acc {
            for ((u, v), d) in &k.delta[xi] {
                let mut l2 = l.clone();
                l2.push(*u);
                let mut r2 = r.clone();
                r2.push(*v);
                next.push((l2, r2, c * d));
            }
        }
        acc = next;
    }
    acc
}

fn sgn(i: usize) -> Q {
    if i.is_multiple_of(2) {
        Q::one()
    } else {
        -Q::one()
    }
}

/// Plain Hochschild coboundary `Hom(A^n, A) -> Hom(A^(n+1), A)`, including `n = 0`.
pub fn hochschild(k: &Consts, n: usize) -> Mat {
    let a = k.dim;
    let (an, an1) = (a.pow(n as u32), a.pow(n as u32 + 1));
    let mut m = zeros(an1 * a, an * a);
    for col in 0..an * a {
        let (src, dst) = (col / a, col % a);
        for s in 0..an1 {
            let x = digits(s, a, n + 1);
            let mut out: Vec<(usize, Q)> = Vec::new();
            let mut add = |t: usize, c: Q| match out.iter_mut().find(|(u, _)| *u == t) {
                Some(e) => e.1 += c,
                None => out.push((t, c)),
            };
            if flat(&x[1..], a) == src {
                for (z, c) in product(k, &[x[0], dst]) {
                    add(z, c);
                }
            }
            for i in 1..=n {
                for (z, c) in product(k, &[x[i - 1], x[i]]) {
                    let mut merged = x[..i - 1].to_vec();
                    merged.push(z);
                    merged.extend_from_slice(&x[i + 1..]);
                    if flat(&merged, a) == src {
                        add(dst, sgn(i) * c);
                    }
                }
            }
            if flat(&x[..n], a) == src {
                for (z, c) in product(k, &[dst, x[n]]) {
                    add(z, sgn(n + 1) * c);
                }
            }
            for (t, c) in out {
                m[s * a + t][col] += c;
            }
        }
    }
    m
}

/// `dim HH^n(A, A)` for `n <= top`, from the full complex starting at `Hom(K, A)`.
pub fn hochschild_dims(k: &Consts, top: usize) -> Vec<usize> {
    let a = k.dim;
    let ranks: Vec<usize> = (0..=top).map(|n| rank(&hochschild(k, n))).collect();
    (0..=top)
        .map(|n| {
            let dim = a.pow(n as u32) * a;
            dim - ranks[n] - if n == 0 { 0 } else { ranks[n - 1] }
        })
        .collect()
}

/// `(phi ∪ psi)(a_1..a_(r+s)) = phi(a_1..a_r) psi(a_(r+1)..a_(r+s))` on basis
/// cochains, as coordinates of the product.
pub fn hochschild_cup(k: &Consts, r: usize, i: usize, s: usize, j: usize) -> Vec<Q> {
    let a = k.dim;
    let (ar, as_) = (a.pow(r as u32), a.pow(s as u32));
    let (src1, dst1) = (i / a, i % a);
    let (src2, dst2) = (j / a, j % a);
    let mut out = vec![Q::zero(); ar * as_ * a];
    for (z, c) in product(k, &[dst1, dst2]) {
        out[(src1 * as_ + src2) * a + z] += c;
    }
    out
}

pub fn is_zero_mat(m: &Mat) -> bool {
    m.iter().all(|r| r.iter().all(|x| x.is_zero()))
}

pub fn neg(m: &Mat) -> Mat {
    m.iter().map(|r| r.iter().map(|x| -x).collect()).collect()
}
