//! Property tests of the algebraic layers: field laws, exterior algebra,
//! fiber calculus, Υ, the two-tensor decomposition and torsion types.

use num_complex::Complex;
use num_traits::{One, Zero};
use proptest::prelude::*;

use so3five::catalog::{six_dim_case1, six_dim_case2, six_dim_case3, tor27_model, Angle};
use so3five::connection::analyze;
use so3five::exterior::Form;
use so3five::linalg::Matrix;
use so3five::repr::{decompose_t2, torsion_type, TorsionClass};
use so3five::scalar::{parse_scalar, Field, QSqrt3, Scalar};
use so3five::twistor::FiberFunction;
use so3five::upsilon::{char_poly, sigma_embed, sigma_inverse, standard_upsilon};
use so3five::ExactModel;

type Q = QSqrt3;
type F = FiberFunction<Q>;

fn q() -> impl Strategy<Value = Q> {
    (-12i64..12, 1i64..7, -12i64..12, 1i64..7).prop_map(|(an, ad, bn, bd)| Q::from_parts(an, ad, bn, bd))
}

fn rational() -> impl Strategy<Value = Q> {
    (-12i64..12, 1i64..7).prop_map(|(n, d)| Q::from_ratio(n, d))
}

fn nonzero_rational() -> impl Strategy<Value = Q> {
    rational().prop_filter("nonzero", |x| !x.is_zero())
}

/// A form of the given degree on `ℝ⁵` with a random coefficient on every
/// basis monomial.
fn form(deg: usize) -> impl Strategy<Value = Form<Q>> {
    let masks: Vec<u32> = (0u32..32).filter(|m| m.count_ones() as usize == deg).collect();
    prop::collection::vec(q(), masks.len()).prop_map(move |cs| {
        masks.iter().zip(cs).fold(Form::zero(5, deg), |acc, (m, c)| {
            let idx: Vec<usize> = (0..5).filter(|i| m & (1 << i) != 0).collect();
            acc + Form::monomial(5, &idx, c)
        })
    })
}

fn any_form() -> impl Strategy<Value = Form<Q>> {
    (0usize..=5).prop_flat_map(form)
}

fn complex_q() -> impl Strategy<Value = Complex<Q>> {
    (rational(), rational()).prop_map(|(re, im)| Complex::new(re, im))
}

/// `P(z, z̄)/(1+zz̄)^k` with a numerator of bidegree at most (2, 2).
fn fiber_function() -> impl Strategy<Value = F> {
    (prop::collection::vec(((0u32..3, 0u32..3), complex_q()), 0..4), 0u32..3)
        .prop_map(|(terms, k)| F::new(terms, k))
}

fn sample_point() -> impl Strategy<Value = Complex<f64>> {
    (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(x, y)| Complex::new(x, y))
}

fn vol() -> Form<Q> {
    Form::monomial(5, &[0, 1, 2, 3, 4], Q::one())
}

fn tor27() -> ExactModel {
    tor27_model(Q::one(), &Angle::zero(), 0.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_laws(a in q(), b in q(), c in q()) {
        prop_assert_eq!(a.clone() + b.clone(), b.clone() + a.clone());
        prop_assert_eq!((a.clone() * b.clone()) * c.clone(), a.clone() * (b.clone() * c.clone()));
        prop_assert_eq!(a.clone() * (b.clone() + c.clone()), a.clone() * b.clone() + a.clone() * c.clone());
        prop_assert_eq!((a.clone() * b.clone()).conjugate(), a.conjugate() * b.conjugate());
        if !a.is_zero() {
            prop_assert_eq!(a.clone() * (Q::one() / a.clone()), Q::one());
        }
    }

    #[test]
    fn scalar_text_round_trips(a in q()) {
        prop_assert_eq!(parse_scalar(&a.to_string()).unwrap(), Scalar::Exact(a));
    }

    #[test]
    fn wedge_is_graded_commutative(a in any_form(), b in any_form()) {
        let sign = if a.degree() * b.degree() % 2 == 0 { Q::one() } else { -Q::one() };
        prop_assert_eq!(a.wedge(&b), b.wedge(&a).scale(&sign));
    }

    #[test]
    fn wedge_is_associative(a in form(1), b in form(2), c in form(1)) {
        prop_assert_eq!(a.wedge(&b).wedge(&c), a.wedge(&b.wedge(&c)));
    }

    #[test]
    fn hodge_star_is_an_isometric_involution(
        (a, b) in (0usize..=5).prop_flat_map(|d| (form(d), form(d)))
    ) {
        prop_assert_eq!(a.hodge_star().unwrap().hodge_star().unwrap(), a.clone());
        prop_assert_eq!(a.wedge(&b.hodge_star().unwrap()), vol().scale(&a.inner(&b)));
        prop_assert_eq!(a.inner(&b), b.inner(&a));
    }

    #[test]
    fn exterior_derivative_squares_to_zero(a in form(1), b in form(2)) {
        let m = tor27();
        prop_assert!(m.ext_d(&m.ext_d(&a)).is_zero());
        prop_assert!(m.ext_d(&m.ext_d(&b)).is_zero());
    }

    #[test]
    fn exterior_derivative_obeys_leibniz(a in form(1), b in form(2)) {
        let m = tor27();
        let lhs = m.ext_d(&a.wedge(&b));
        let rhs = m.ext_d(&a).wedge(&b) - a.wedge(&m.ext_d(&b));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn fiber_functions_form_a_ring(f in fiber_function(), g in fiber_function(), h in fiber_function()) {
        prop_assert_eq!(f.clone() * g.clone(), g.clone() * f.clone());
        prop_assert_eq!(f.clone() * (g.clone() + h.clone()), f.clone() * g.clone() + f.clone() * h.clone());
        prop_assert_eq!(f.clone() - f.clone(), F::zero());
        prop_assert_eq!(f.conj().conj(), f.clone());
    }

    #[test]
    fn fiber_derivatives_obey_the_product_rule(f in fiber_function(), g in fiber_function()) {
        let fg = f.clone() * g.clone();
        prop_assert_eq!(fg.d_z(), f.d_z() * g.clone() + f.clone() * g.d_z());
        prop_assert_eq!(fg.d_zbar(), f.d_zbar() * g.clone() + f.clone() * g.d_zbar());
        prop_assert_eq!(f.d_zbar(), f.conj().d_z().conj());
        prop_assert_eq!(f.d_z().d_zbar(), f.d_zbar().d_z());
    }

    #[test]
    fn fiber_evaluation_is_a_homomorphism(f in fiber_function(), g in fiber_function(), z in sample_point()) {
        let scale = 1.0 + f.max_coeff() * g.max_coeff();
        let sum = (f.clone() + g.clone()).eval(z) - (f.eval(z) + g.eval(z));
        let prod = (f.clone() * g.clone()).eval(z) - f.eval(z) * g.eval(z);
        prop_assert!(sum.norm() <= 1e-9 * scale);
        prop_assert!(prod.norm() <= 1e-9 * scale);
    }

    #[test]
    fn fiber_derivative_matches_difference_quotient(f in fiber_function(), z in sample_point()) {
        // ∂_z = ½(∂_x − i∂_y), checked by central differences.
        let h = 1e-5;
        let dx = (f.eval(z + h) - f.eval(z - h)) / (2.0 * h);
        let dy = (f.eval(z + Complex::new(0.0, h)) - f.eval(z - Complex::new(0.0, h))) / (2.0 * h);
        let fd = (dx - Complex::new(0.0, 1.0) * dy) * 0.5;
        let exact = f.d_z().eval(z);
        prop_assert!((fd - exact).norm() <= 1e-5 * (1.0 + exact.norm() + f.max_coeff()));
    }

    #[test]
    fn sigma_embedding_round_trips(a in prop::collection::vec(q(), 5)) {
        let m = sigma_embed(&a);
        prop_assert!(m.is_symmetric());
        prop_assert!(m.trace().is_zero());
        prop_assert_eq!(sigma_inverse(&m).to_vec(), a);
    }

    #[test]
    fn characteristic_polynomial_and_cubic(a in prop::collection::vec(rational(), 5), lambda in rational()) {
        let m = sigma_embed(&a);
        let c = char_poly(&a);
        let shifted = m.sub(&Matrix::identity(3).scale(&lambda)).unwrap().det().unwrap();
        let poly = c.iter().rev().fold(Q::zero(), |acc, x| acc * lambda.clone() + x.clone());
        prop_assert_eq!(shifted, poly);
        prop_assert!(c[2].is_zero());
        // The cubic form of Υ is a fixed multiple of det σ(A).
        let u = standard_upsilon::<Q>();
        let unit = [Q::one(), Q::zero(), Q::zero(), Q::zero(), Q::zero()];
        let det_unit = sigma_embed(&unit).det().unwrap();
        prop_assume!(!det_unit.is_zero());
        let ratio = u.cubic(&unit) / det_unit;
        prop_assert_eq!(u.cubic(&a), ratio * m.det().unwrap());
    }

    #[test]
    fn two_tensor_parts_sum_to_the_tensor(w in prop::collection::vec(rational(), 25)) {
        let m = Matrix::from_fn(5, 5, |i, j| w[5 * i + j].clone());
        let d = decompose_t2(&m);
        prop_assert_eq!(d.sum(), m);
        prop_assert!(d.c1.sub(&d.c1.transpose()).unwrap().is_zero());
        prop_assert!(d.c3.add(&d.c3.transpose()).unwrap().is_zero());
        prop_assert!(d.c7.add(&d.c7.transpose()).unwrap().is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn case2_pure_type_lines(t in nonzero_rational()) {
        let l3 = six_dim_case2(t.clone(), t.clone() * Q::from_int(2));
        let l7 = six_dim_case2(-(t.clone() * Q::from_int(2)), t.clone());
        for (m, class) in [(l3, TorsionClass::PureL3), (l7, TorsionClass::PureL7)] {
            let g = analyze(&m, 0.0).unwrap();
            let base = g.characteristic.torsion.restrict(so3five::exterior::BASE_MASK);
            prop_assert_eq!(torsion_type(&base, 0.0).unwrap().class, class);
        }
    }

    #[test]
    fn six_dimensional_models_satisfy_the_identities(
        a in nonzero_rational(),
        t1 in nonzero_rational(),
        t2 in nonzero_rational(),
    ) {
        let mut models = vec![six_dim_case1(a), six_dim_case2(t1.clone(), t2.clone())];
        if let Ok(m) = six_dim_case3(t1, t2, 0.0) {
            models.push(m);
        }
        for m in models {
            let g = analyze(&m, 0.0).unwrap();
            prop_assert!(g.bianchi.holds, "{}", m.name());
            prop_assert!(g.ricci.relation_holds, "{}", m.name());
            prop_assert!(g.ricci.codifferential_equivalence(), "{}", m.name());
            prop_assert_eq!(g.characteristic.matches_declared, Some(true), "{}", m.name());
        }
    }
}
