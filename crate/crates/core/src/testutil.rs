//! Shared test algebras.

use crate::algebra::{build_algebra, Algebra, Arrow, Quiver, Relation};
use crate::field::Field;

/// `1 -> 2`, no relations.
pub(crate) fn a2(field: Field) -> Algebra {
    let quiver = Quiver {
        vertices: 2,
        arrows: vec![Arrow {
            name: "a".into(),
            source: 0,
            target: 1,
        }],
    };
    build_algebra(quiver, vec![], field, 8).unwrap()
}

/// `1 -> 2 -> 3` with the length-two path zero.
pub(crate) fn a3_bound(field: Field) -> Algebra {
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

/// `1 -> 2 -> 3`, hereditary.
pub(crate) fn a3_free(field: Field) -> Algebra {
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
    build_algebra(quiver, vec![], field, 8).unwrap()
}

/// Commutative square: `1 -> 2 -> 4`, `1 -> 3 -> 4`, with the two
/// length-two paths identified.
pub(crate) fn square(field: Field) -> Algebra {
    let quiver = Quiver {
        vertices: 4,
        arrows: vec![
            Arrow {
                name: "a".into(),
                source: 0,
                target: 1,
            },
            Arrow {
                name: "b".into(),
                source: 0,
                target: 2,
            },
            Arrow {
                name: "c".into(),
                source: 1,
                target: 3,
            },
            Arrow {
                name: "e".into(),
                source: 2,
                target: 3,
            },
        ],
    };
    let relations = vec![Relation {
        terms: vec![(field.one(), vec![0, 2]), (field.from_i64(-1), vec![1, 3])],
    }];
    build_algebra(quiver, relations, field, 8).unwrap()
}
