//! Exact arithmetic over Q and number fields.

use std::sync::Arc;

use modfol_core::algebra::{
    factor_poly, nf_is_totally_real, nf_solve, rat, ratio, NFElement, NumberField, QMatrix,
    QPolynomial, Rational,
};
use proptest::prelude::*;

fn small_rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=4).prop_map(|(n, d)| ratio(n, d))
}

fn square_matrix(max: usize) -> impl Strategy<Value = QMatrix> {
    (1..=max).prop_flat_map(|n| {
        prop::collection::vec(prop::collection::vec(small_rational(), n), n)
            .prop_map(|rows| QMatrix::from_rows(rows).unwrap())
    })
}

fn fields() -> Vec<Arc<NumberField>> {
    [
        vec![-2, 0, 1],
        vec![-1, -1, 1],
        vec![-2, 0, 0, 1],
        vec![1, -3, 0, 1],
        vec![-5, 0, 1],
    ]
    .iter()
    .map(|c| NumberField::new(QPolynomial::from_i64(c)).unwrap())
    .collect()
}

fn element(k: Arc<NumberField>) -> impl Strategy<Value = NFElement> {
    prop::collection::vec(small_rational(), k.degree())
        .prop_map(move |c| NFElement::new(&k, c).unwrap())
}

fn field_and_elements(n: usize) -> impl Strategy<Value = (Arc<NumberField>, Vec<NFElement>)> {
    prop::sample::select(fields())
        .prop_flat_map(move |k| (Just(k.clone()), prop::collection::vec(element(k), n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn cayley_hamilton(m in square_matrix(6)) {
        let chi = m.charpoly().unwrap();
        prop_assert!(m.eval_poly(&chi).unwrap().is_zero());
    }

    #[test]
    fn field_is_a_commutative_ring((_, xs) in field_and_elements(3)) {
        let (a, b, c) = (&xs[0], &xs[1], &xs[2]);
        prop_assert_eq!(&(a * b) * c, a * &(b * c));
        prop_assert_eq!(a * b, b * a);
        prop_assert_eq!(a * &(b + c), &(a * b) + &(a * c));
        prop_assert_eq!(&(a + b) - b, a.clone());
        if !a.is_zero() {
            prop_assert!((a * &a.inverse().unwrap()).is_one());
        }
    }

    #[test]
    fn solve_recovers_solution((k, xs) in field_and_elements(12)) {
        let a: Vec<Vec<NFElement>> = vec![xs[0..3].to_vec(), xs[3..6].to_vec(), xs[6..9].to_vec()];
        let x = xs[9..12].to_vec();
        let b: Vec<NFElement> = a
            .iter()
            .map(|row| row.iter().zip(&x).fold(NFElement::zero(&k), |acc, (r, v)| &acc + &(r * v)))
            .collect();
        match nf_solve(&a, &b) {
            Ok(y) => prop_assert_eq!(y, x),
            Err(_) => prop_assert!(modfol_core::algebra::numfield::nf_determinant(&a, &k).is_zero()),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn factors_recombine(coeffs in prop::collection::vec(-6i64..=6, 1..=9)) {
        let p = QPolynomial::from_i64(&coeffs);
        prop_assume!(!p.is_zero());
        let factors = factor_poly(&p).unwrap();
        let product = factors.iter().fold(QPolynomial::constant(p.leading()), |acc, (f, e)| &acc * &f.pow(*e));
        prop_assert_eq!(product, p);
        for (f, _) in &factors {
            prop_assert!(f.is_monic());
        }
    }
}

#[test]
fn totally_real_fields() {
    let cubic = NumberField::new(QPolynomial::from_i64(&[1, -3, 0, 1])).unwrap();
    assert!(nf_is_totally_real(&cubic));
    let pure_cubic = NumberField::new(QPolynomial::from_i64(&[-2, 0, 0, 1])).unwrap();
    assert!(!nf_is_totally_real(&pure_cubic));
    assert_eq!(rat(3) * ratio(1, 3), rat(1));
}
