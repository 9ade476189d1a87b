#![allow(dead_code)]

use okamoto::field::{qc, qr};
use okamoto::parabolic::{ExponentData, Speciality};
use okamoto::{Complex64 as C, QC};
use proptest::prelude::*;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn std_poles() -> [C; 4] {
    [c(0., 0.), c(1., 0.), c(2., 0.), c(3., 0.)]
}

/// Generic with margin: every 2λ_i and every signed sum stays 0.02 away from Z.
pub fn well_generic(l: &[f64; 4]) -> bool {
    let far = |x: f64| (x - x.round()).abs() > 0.02;
    if !l.iter().all(|x| far(2.0 * x)) {
        return false;
    }
    let lm = [-l[0], -l[1], -l[2], 1.0 - l[3]];
    (0..16).all(|mask: u32| far((0..4).map(|i| if mask >> i & 1 == 1 { l[i] } else { lm[i] }).sum()))
}

pub fn exp_f64(l: [f64; 4]) -> ExponentData<C> {
    let e = ExponentData::new(std_poles(), l.map(|x| c(x, 0.))).unwrap();
    assert_eq!(e.is_special(), Speciality::Generic);
    e
}

pub fn exp_q(num: [i64; 4], den: i64) -> ExponentData<QC> {
    ExponentData::new([qr(0, 1), qr(1, 1), qr(2, 1), qr(3, 1)], num.map(|n| qr(n, den))).unwrap()
}

pub fn generic_lambda() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(-0.45f64..0.45).prop_filter("well generic", well_generic)
}

/// Rational generic exponents `n/97`.
pub fn generic_lambda_q() -> impl Strategy<Value = [i64; 4]> {
    prop::array::uniform4(-40i64..40).prop_filter("well generic", |n| well_generic(&n.map(|k| k as f64 / 97.0)))
}

/// Chart points away from the four vertical fibres.
pub fn chart_point() -> impl Strategy<Value = (C, C)> {
    ((-1.0f64..4.0, 0.2f64..1.5), (-2.0f64..2.0, -2.0f64..2.0)).prop_map(|((a, b), (x, y))| (c(a, b), c(x, y)))
}

pub fn chart_point_q() -> impl Strategy<Value = (QC, QC)> {
    ((-20i64..80, 1i64..30), (-40i64..40, -40i64..40))
        .prop_map(|((a, b), (x, y))| (qc((a, 20), (b, 20)), qc((x, 20), (y, 20))))
}
