mod common;

use hopfdef::deformation::{apply_gauge, check_infinitesimal, extend_to, DeformationContext, FormalAutomorphism};
use hopfdef::exact_linalg::{
    image_basis, kernel_basis, matmul, rank, solve, sv_to_dense, ExactMatrix, ExactScalar, FieldSpec, SparseMatrix,
};
use hopfdef::hopf_structures::{example_catalog, Kind};
use hopfdef::tensor_calculus::{sp_permutation, Tag, TensorBasis};
use proptest::prelude::*;

fn field(p: u64) -> FieldSpec {
    FieldSpec::from_characteristic(p).unwrap()
}

fn mat(f: FieldSpec, rows: usize, cols: usize, data: &[i64]) -> ExactMatrix {
    ExactMatrix::from_fn(f, rows, cols, |i, j| f.from_i64(data[i * cols + j]))
}

/// A small matrix with entries in -3..=3, biased towards zeros so that
/// rank-deficient cases are common.
fn small_matrix() -> impl Strategy<Value = (usize, usize, Vec<i64>)> {
    (0usize..6, 0usize..6).prop_flat_map(|(r, c)| {
        let entry = prop_oneof![3 => Just(0i64), 2 => -3i64..=3];
        (Just(r), Just(c), proptest::collection::vec(entry, r * c))
    })
}

fn both_fields() -> impl Strategy<Value = u64> {
    prop_oneof![Just(0u64), Just(7u64)]
}

fn is_zero(f: FieldSpec, v: &[ExactScalar]) -> bool {
    v.iter().all(|x| f.is_zero(x))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn rank_nullity((r, c, data) in small_matrix(), p in both_fields()) {
        let f = field(p);
        let m = mat(f, r, c, &data);
        let ker = kernel_basis(&m);
        prop_assert_eq!(rank(&m) + ker.len(), c);
        for v in &ker {
            prop_assert!(is_zero(f, &m.mul_vec(v).unwrap()));
        }
        prop_assert_eq!(image_basis(&m).len(), rank(&m));
        prop_assert_eq!(rank(&m.transpose()), rank(&m));
    }

    #[test]
    fn rank_agrees_with_reference_elimination((r, c, data) in small_matrix()) {
        let m = mat(FieldSpec::rationals(), r, c, &data);
        prop_assert_eq!(rank(&m), common::rank(&common::dense(&m)));
    }

    #[test]
    fn solve_recovers_consistent_systems((r, c, data) in small_matrix(), x in proptest::collection::vec(-3i64..=3, 6), p in both_fields()) {
        let f = field(p);
        let m = mat(f, r, c, &data);
        let x: Vec<ExactScalar> = x[..c].iter().map(|&v| f.from_i64(v)).collect();
        let b = m.mul_vec(&x).unwrap();
        let sol = solve(&m, &b).unwrap().expect("consistent system");
        prop_assert_eq!(m.mul_vec(&sol.particular).unwrap(), b);
    }

    #[test]
    fn sparse_product_matches_dense(
        (r, k, a) in small_matrix(),
        c in 0usize..6,
        b in proptest::collection::vec(-3i64..=3, 36),
        p in both_fields(),
    ) {
        let f = field(p);
        let ma = mat(f, r, k, &a);
        let mb = mat(f, k, c, &b[..k * c]);
        let sparse = SparseMatrix::from_dense(&ma).mul(&SparseMatrix::from_dense(&mb)).unwrap();
        prop_assert_eq!(sparse.to_dense(), matmul(&ma, &mb).unwrap());
    }

    #[test]
    fn kron_is_associative_and_multiplicative(
        dims in proptest::collection::vec(1usize..3, 6),
        data in proptest::collection::vec(-2i64..=2, 6 * 9),
        p in both_fields(),
    ) {
        let f = field(p);
        // A: d0 x d1, B: d2 x d3, C: d1 x d4, D: d3 x d5
        let (d0, d1, d2, d3, d4, d5) = (dims[0], dims[1], dims[2], dims[3], dims[4], dims[5]);
        let a = mat(f, d0, d1, &data[0..]);
        let b = mat(f, d2, d3, &data[9..]);
        let c = mat(f, d1, d4, &data[18..]);
        let d = mat(f, d3, d5, &data[27..]);
        let left = a.kron(&b).unwrap().kron(&c).unwrap();
        let right = a.kron(&b.kron(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        let ab_cd = matmul(&a.kron(&b).unwrap(), &c.kron(&d).unwrap()).unwrap();
        let ac_bd = matmul(&a, &c).unwrap().kron(&matmul(&b, &d).unwrap()).unwrap();
        prop_assert_eq!(ab_cd, ac_bd);
        let sparse = SparseMatrix::from_dense(&a).kron(&SparseMatrix::from_dense(&b)).unwrap();
        prop_assert_eq!(sparse.to_dense(), a.kron(&b).unwrap());
    }

    #[test]
    fn tensor_index_round_trip(dims in proptest::collection::vec(1usize..4, 0..4), seed in any::<u64>()) {
        let basis = TensorBasis::new(dims.iter().map(|&d| (Tag::A, d)).collect());
        let flat = (seed as usize) % basis.dim();
        let idx = basis.decode(flat);
        prop_assert_eq!(basis.encode(&idx).unwrap(), flat);
        // most significant factor first
        if let (Some(&first), Some(&d0)) = (idx.first(), dims.first()) {
            prop_assert_eq!(first, flat / (basis.dim() / d0));
        }
    }

    #[test]
    fn permutations_are_orthogonal(dims in proptest::collection::vec(1usize..4, 1..4), shuffle in any::<u64>()) {
        let f = FieldSpec::rationals();
        let mut order: Vec<usize> = (0..dims.len()).collect();
        let mut s = shuffle;
        for i in (1..order.len()).rev() {
            order.swap(i, (s % (i as u64 + 1)) as usize);
            s /= i as u64 + 1;
        }
        let p = sp_permutation(f, &dims, &order);
        let n: usize = dims.iter().product();
        prop_assert!(p.transpose().mul(&p).unwrap().sub(&SparseMatrix::identity(f, n)).unwrap().is_zero());
    }
}

fn dual_numbers() -> DeformationContext {
    let pkg = example_catalog("dual-number-algebra", FieldSpec::rationals()).unwrap();
    DeformationContext::new(&pkg, Kind::MA).unwrap()
}

fn corner(ctx: &DeformationContext, c: &[i64]) -> SparseMatrix {
    let f = ctx.field;
    let mut v: Vec<ExactScalar> = c.iter().take(ctx.dim1()).map(|&x| f.from_i64(x)).collect();
    v.resize(ctx.dim1(), f.zero());
    ctx.corner_element(&v)
}

fn combination(ctx: &DeformationContext, coeffs: &[i64]) -> Vec<ExactScalar> {
    let f = ctx.field;
    let mut v = vec![f.zero(); ctx.dim2()];
    for (z, &c) in ctx.h2().unwrap().cocycles.iter().zip(coeffs) {
        let z = sv_to_dense(f, z, ctx.dim2());
        for (acc, x) in v.iter_mut().zip(&z) {
            f.add_mul_assign(acc, &f.from_i64(c), x);
        }
    }
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cocycles_plus_coboundaries_are_infinitesimals(
        coeffs in proptest::collection::vec(-3i64..=3, 4),
        e in proptest::collection::vec(-2i64..=2, 4),
    ) {
        let ctx = dual_numbers();
        let f = ctx.field;
        let mut theta = combination(&ctx, &coeffs);
        // d^1 of an arbitrary endomorphism, not only a corner element
        let m = SparseMatrix::from_dense(&mat(f, 2, 2, &e));
        for (t, x) in theta.iter_mut().zip(ctx.d1_of(&m)) {
            f.add_assign(t, &x);
        }
        let check = check_infinitesimal(&ctx, &theta).unwrap();
        prop_assert!(check.is_cocycle);
    }

    #[test]
    fn gauge_then_inverse_is_identity(
        coeffs in proptest::collection::vec(-2i64..=2, 4),
        c in proptest::collection::vec(-2i64..=2, 4),
        e in proptest::collection::vec(-2i64..=2, 4),
    ) {
        let ctx = dual_numbers();
        let f = ctx.field;
        let theta = combination(&ctx, &coeffs);
        let (series, _) = extend_to(&ctx, &theta, 2).unwrap();
        prop_assume!(series.order() == 2);
        let phi1 = corner(&ctx, &c);
        let phi2 = if phi1.is_zero() { corner(&ctx, &e) } else { SparseMatrix::from_dense(&mat(f, 2, 2, &e)) };
        let phi = FormalAutomorphism::new(&ctx, vec![SparseMatrix::identity(f, 2), phi1, phi2]).unwrap();
        let inv = FormalAutomorphism { terms: phi.inverse(2) };
        let id = phi.compose(&inv);
        prop_assert_eq!(&id.terms, &FormalAutomorphism::identity(&ctx, 2).terms);

        let there = apply_gauge(&ctx, &series, &phi).unwrap();
        let back = apply_gauge(&ctx, &there, &inv).unwrap();
        for k in 0..=2 {
            prop_assert_eq!(back.coefficient(&ctx, k), series.coefficient(&ctx, k));
        }
    }
}
