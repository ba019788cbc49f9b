//! Randomized invariants over the exact linear algebra and the
//! representation machinery.

use proptest::prelude::*;

use comvar::algebra::{build_algebra, Arrow, DimVec, Quiver, Relation};
use comvar::rep::{
    compose, decompose, direct_sum, hom_basis, is_iso, kernel_rep, minimal_presentation, proj_sum,
    random_rep, validate_rep, GradedMap,
};
use comvar::{Algebra, Field, Mat, Rng, Scalar};

fn small_field() -> impl Strategy<Value = Field> {
    prop_oneof![
        Just(Field::prime(2).unwrap()),
        Just(Field::prime(3).unwrap()),
        Just(Field::prime(5).unwrap()),
        Just(Field::Rationals),
    ]
}

fn matrix(field: Field, rows: usize, cols: usize) -> impl Strategy<Value = Mat> {
    proptest::collection::vec(-4i64..5, rows * cols)
        .prop_map(move |entries| Mat::from_i64(field, rows, cols, &entries))
}

fn any_matrix() -> impl Strategy<Value = Mat> {
    (small_field(), 0usize..5, 0usize..5).prop_flat_map(|(f, r, c)| matrix(f, r, c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_equals_rank_of_transpose(m in any_matrix()) {
        prop_assert_eq!(m.rank(), m.transpose().rank());
    }

    #[test]
    fn kernel_is_killed_and_has_the_right_rank(m in any_matrix()) {
        let k = m.kernel_basis();
        prop_assert!(m.mul(&k).is_zero());
        prop_assert_eq!(k.cols(), m.cols() - m.rank());
        prop_assert_eq!(k.rank(), k.cols());
    }

    #[test]
    fn left_inverse_works_whenever_full_column_rank(m in any_matrix()) {
        if m.rank() == m.cols() {
            let l = m.left_inverse().unwrap();
            prop_assert_eq!(l.mul(&m), Mat::identity(m.field, m.cols()));
        } else {
            prop_assert!(m.left_inverse().is_err());
        }
    }

    #[test]
    fn rref_is_idempotent(m in any_matrix()) {
        let r1 = m.rref().reduced;
        let r2 = r1.rref().reduced;
        prop_assert_eq!(r1, r2);
    }
}

fn a3_bound(field: Field) -> Algebra {
    let quiver = Quiver {
        vertices: 3,
        arrows: vec![
            Arrow {
                name: "a".into(),
                source: 0,
                target: 1,
            },
            Arrow {
                name: "b".into(),
                source: 1,
                target: 2,
            },
        ],
    };
    let relations = vec![Relation {
        terms: vec![(field.one(), vec![0, 1])],
    }];
    build_algebra(quiver, relations, field, 8).unwrap()
}

fn small_dims() -> impl Strategy<Value = DimVec> {
    proptest::collection::vec(0i64..3, 3).prop_map(DimVec)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // Hom(P^d, M) solved by the intertwiner system has the Yoneda size
    // sum_a d_a * dim M_a.
    #[test]
    fn hom_from_projectives_is_yoneda_sized(
        d in small_dims(),
        h in small_dims(),
        seed in 0u64..1000,
    ) {
        let alg = a3_bound(Field::prime(5).unwrap());
        let mut rng = Rng::new(seed);
        let m = random_rep(&alg, &h, &mut rng, 4096).unwrap();
        let p = proj_sum(&alg, &d);
        let expected: i64 = (0..3).map(|a| d.get(a) * m.dims.get(a)).sum();
        prop_assert_eq!(hom_basis(&alg, &p.total, &m).len() as i64, expected);
    }

    // module maps satisfy rank-nullity vertexwise
    #[test]
    fn kernel_plus_rank_is_the_source(
        d in small_dims(),
        h in small_dims(),
        seed in 0u64..1000,
    ) {
        let alg = a3_bound(Field::prime(3).unwrap());
        let mut rng = Rng::new(seed);
        let v = random_rep(&alg, &d, &mut rng, 4096).unwrap();
        let w = random_rep(&alg, &h, &mut rng, 4096).unwrap();
        for f in hom_basis(&alg, &v, &w) {
            let (k, _) = kernel_rep(&alg, &f, &v, &w);
            prop_assert_eq!(k.dims.add(&f.rank_vec()), v.dims.clone());
        }
    }

    // decompose returns summands that assemble back to the input
    #[test]
    fn decomposition_sums_back(h in small_dims(), seed in 0u64..1000) {
        let alg = a3_bound(Field::prime(5).unwrap());
        let mut rng = Rng::new(seed);
        let m = random_rep(&alg, &h, &mut rng, 4096).unwrap();
        let parts = decompose(&alg, &m, &mut rng, 48).unwrap();
        for s in &parts {
            // proj . incl = identity on each summand
            let round = compose(&s.proj, &s.incl);
            prop_assert_eq!(&round, &GradedMap::identity(alg.field, &s.rep.dims));
            validate_rep(&alg, &s.rep).unwrap();
        }
        let reps: Vec<_> = parts.iter().map(|s| s.rep.clone()).collect();
        let (sum, _) = direct_sum(&alg, &reps);
        prop_assert!(is_iso(&alg, &sum, &m, &mut rng, 48).unwrap());
    }

    // minimal presentations are exact: the cover is onto, the syzygy lands
    // exactly on its kernel
    #[test]
    fn minimal_presentation_is_exact(h in small_dims(), seed in 0u64..1000) {
        let alg = a3_bound(Field::prime(5).unwrap());
        let mut rng = Rng::new(seed);
        let m = random_rep(&alg, &h, &mut rng, 4096).unwrap();
        let pres = minimal_presentation(&alg, &m);
        // onto
        prop_assert_eq!(pres.cover.rank_vec(), m.dims.clone());
        // composite vanishes and ranks account for the kernel
        let composite = compose(&pres.cover, &pres.syzygy);
        prop_assert!(composite.is_zero());
        let (ker, _) = kernel_rep(&alg, &pres.cover, &pres.cover_sum.total, &m);
        prop_assert_eq!(pres.syzygy.rank_vec(), ker.dims);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    // scalars: field axioms that the elimination code leans on
    #[test]
    fn field_inverse_cancels(x in -20i64..20, f in small_field()) {
        let s = f.from_i64(x);
        if let Some(inv) = f.inv(&s) {
            prop_assert!(f.mul(&s, &inv).is_one());
        } else {
            prop_assert!(s.is_zero());
        }
    }

    #[test]
    fn scalar_display_roundtrips(num in -30i64..30, den in 1i64..12) {
        let f = Field::Rationals;
        let s = f.parse(&format!("{num}/{den}")).unwrap();
        let back = f.parse(&s.to_string()).unwrap();
        prop_assert_eq!(s, back);
    }
}

#[test]
fn scalar_is_one_matches_field_one() {
    for f in [Field::prime(7).unwrap(), Field::Rationals] {
        assert!(f.one().is_one());
        assert!(!f.zero().is_one());
        let _ = Scalar::Fp(1);
    }
}
