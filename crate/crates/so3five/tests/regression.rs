//! Regression values and round trips across module boundaries.

use num_traits::{One, Zero};

use so3five::catalog::{entries, torsion_free_model, Params};
use so3five::connection::analyze;
use so3five::io::{model_from_json, model_to_json};
use so3five::linalg::Matrix;
use so3five::report::{classify, GeometryReport};
use so3five::scalar::{Field, QSqrt3, DEFAULT_TOL};
use so3five::spin::spinor_obstruction;

type Q = QSqrt3;

#[test]
fn einstein_constant_of_the_torsion_free_family() {
    // Frozen value: Ric^LC = 6·r115·g, so tr Ric^LC = 30·r115.
    for (n, d) in [(1, 1), (-1, 1), (3, 2), (-2, 7), (0, 1)] {
        let r = Q::from_ratio(n, d);
        let g = analyze(&torsion_free_model(r.clone()), 0.0).unwrap();
        let expected = Matrix::identity(5).scale(&(r.clone() * Q::from_int(6)));
        assert_eq!(g.ricci.ric_lc, expected, "r115 = {}", r);
        assert_eq!(g.ricci.ric_lc.trace(), r * Q::from_int(30));
    }
}

#[test]
fn catalog_models_round_trip_through_json() {
    for e in entries() {
        let m = e.build(&Params::new(), DEFAULT_TOL).unwrap();
        let back = model_from_json(&model_to_json(&m)).unwrap();
        assert_eq!(back, m, "{}", e.name);
        let a = classify(&m, DEFAULT_TOL, None).unwrap();
        let b = classify(&back, DEFAULT_TOL, None).unwrap();
        assert_eq!(a, b, "{}", e.name);
    }
}

#[test]
fn every_catalog_report_is_internally_consistent() {
    for e in entries() {
        let m = e.build(&Params::new(), DEFAULT_TOL).unwrap();
        let r = GeometryReport::new(&m, DEFAULT_TOL).unwrap();
        assert!(r.consistent(), "{}", e.name);
        assert!(r.exact, "{} defaults are exact", e.name);
        let v = serde_json::to_value(&r).unwrap();
        for key in ["nearly_integrable", "torsion", "curvature", "bianchi", "ricci", "weyl", "cartan", "spinor"] {
            assert!(v.get(key).is_some(), "{} lacks {}", e.name, key);
        }
        assert_eq!(v["ricci"]["relation"]["tol"], serde_json::json!(DEFAULT_TOL));
    }
}

#[test]
fn flat_curvature_admits_all_spinors() {
    let zero: [Matrix<Q>; 3] = std::array::from_fn(|_| Matrix::zeros(5, 5));
    let s = spinor_obstruction(&zero, 0.0).unwrap();
    assert!(s.flat);
    assert_eq!(s.solution_dim, 4);
    assert!(s.det.iter().all(|d| *d == 0.0));
}

#[test]
fn torsion_free_curvature_blocks_every_spinor() {
    let g = analyze(&torsion_free_model(Q::one()), 0.0).unwrap();
    let s = spinor_obstruction(&g.curvature.normalized(), 0.0).unwrap();
    assert!(!s.flat);
    assert_eq!(s.solution_dim, 0);
    assert!(s.det_formula_residual.is_zero());
}
