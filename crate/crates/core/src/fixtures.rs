//! Small models used by tests, the CLI self-check and the acceptance suite.

use crate::polyhedra::{Fan, PolyComplex, StarCenter};
use crate::qlinalg::{ratq, rvec};

/// Fan of the projective line.
pub fn p1_fan() -> Fan {
    Fan::from_max_cones(1, &[vec![rvec(&[1])], vec![rvec(&[-1])]]).expect("fan of P1")
}

/// Fan of the projective plane.
pub fn p2_fan() -> Fan {
    Fan::from_max_cones(
        2,
        &[
            vec![rvec(&[1, 0]), rvec(&[0, 1])],
            vec![rvec(&[0, 1]), rvec(&[-1, -1])],
            vec![rvec(&[-1, -1]), rvec(&[1, 0])],
        ],
    )
    .expect("fan of P2")
}

/// Canonical model of the projective line.
pub fn f1() -> PolyComplex {
    PolyComplex::canonical(&p1_fan()).expect("F1")
}

/// Vertices {0, 1} on the line.
pub fn f2() -> PolyComplex {
    PolyComplex::from_cells(
        1,
        &[
            (vec![rvec(&[0])], vec![rvec(&[-1])]),
            (vec![rvec(&[0]), rvec(&[1])], vec![]),
            (vec![rvec(&[1])], vec![rvec(&[1])]),
        ],
    )
    .expect("F2")
}

/// Vertices {-1, 0, 1} on the line.
pub fn f5() -> PolyComplex {
    PolyComplex::from_cells(
        1,
        &[
            (vec![rvec(&[-1])], vec![rvec(&[-1])]),
            (vec![rvec(&[-1]), rvec(&[0])], vec![]),
            (vec![rvec(&[0]), rvec(&[1])], vec![]),
            (vec![rvec(&[1])], vec![rvec(&[1])]),
        ],
    )
    .expect("F5")
}

/// Canonical model of the projective plane.
pub fn f3() -> PolyComplex {
    PolyComplex::canonical(&p2_fan()).expect("F3")
}

/// Canonical model of the projective plane subdivided at the point (1,1).
pub fn f3_subdivided() -> PolyComplex {
    f3().star_subdivision(&StarCenter::Point(rvec(&[1, 1]))).expect("F3 subdivided")
}

/// Vertices {0, 1/2, 1}: the middle vertex has multiplicity 2.
pub fn half() -> PolyComplex {
    let h = vec![ratq(1, 2)];
    PolyComplex::from_cells(
        1,
        &[
            (vec![rvec(&[0])], vec![rvec(&[-1])]),
            (vec![rvec(&[0]), h.clone()], vec![]),
            (vec![h, rvec(&[1])], vec![]),
            (vec![rvec(&[1])], vec![rvec(&[1])]),
        ],
    )
    .expect("half-integral model")
}
