mod support;

use std::f64::consts::PI;

use calderon::special_fn::{bessel_j0, bessel_j1, bessel_y0, bessel_y1, hankel1_0, hankel1_1};
use num_complex::Complex64 as Complex;
use proptest::prelude::*;
use support::bessel_oracle::{bessel_all, rel_err};

fn log_points(count: usize, lo: f64, hi: f64) -> impl Iterator<Item = f64> {
    (0..count).map(move |i| lo * (hi / lo).powf(i as f64 / (count - 1) as f64))
}

#[test]
fn matches_oracle_on_a_log_sweep() {
    let mut worst = 0.0f64;
    for x in log_points(400, 1e-4, 200.0) {
        let r = bessel_all(x);
        let errs = [
            rel_err(bessel_j0(x), r.j0),
            rel_err(bessel_j1(x), r.j1),
            rel_err(bessel_y0(x).unwrap(), r.y0),
            rel_err(bessel_y1(x).unwrap(), r.y1),
        ];
        for e in errs {
            worst = worst.max(e);
        }
    }
    assert!(worst <= 1e-10, "{worst:e}");
}

#[test]
fn hankel_parts_match_oracle() {
    for x in [1e-3, 0.37, 2.0, 7.99, 8.01, 25.0, 150.0] {
        let r = bessel_all(x);
        let h0 = hankel1_0(x).unwrap();
        let h1 = hankel1_1(x).unwrap();
        assert!(rel_err(h0.re, r.j0) <= 1e-10 && rel_err(h0.im, r.y0) <= 1e-10, "{x}");
        assert!(rel_err(h1.re, r.j1) <= 1e-10 && rel_err(h1.im, r.y1) <= 1e-10, "{x}");
    }
}

#[test]
fn regime_switches_are_continuous() {
    // scan finely across the whole range; a discontinuous branch switch would
    // show as a jump much larger than the local slope allows
    let mut prev = None;
    for x in log_points(20_000, 1e-3, 60.0) {
        let v = [bessel_j0(x), bessel_j1(x), bessel_y0(x).unwrap(), bessel_y1(x).unwrap()];
        if let Some((px, pv)) = prev {
            let dx: f64 = x - px;
            for (a, b) in v.iter().zip::<[f64; 4]>(pv) {
                // |f'| <= 1 + 2/(pi x^2) covers J0, J1, Y0, Y1 away from 0
                let bound = dx * (1.5 + 2.0 / (PI * px * px)) + 1e-12;
                assert!((a - b).abs() <= bound, "jump at {x}");
            }
        }
        prev = Some((x, v));
    }
}

#[test]
fn small_argument_logarithm() {
    // Y0(x) = (2/pi)(ln(x/2) + gamma) + O(x^2 ln x)
    let x: f64 = 1e-6;
    let gamma = 0.577_215_664_901_532_9;
    let approx = 2.0 / PI * ((x / 2.0).ln() + gamma);
    assert!((bessel_y0(x).unwrap() - approx).abs() < 1e-10);
    // Y1(x) ~ -2/(pi x)
    assert!(rel_err(bessel_y1(x).unwrap(), -2.0 / (PI * x)) < 1e-10);
}

#[test]
fn nonpositive_arguments_are_rejected() {
    for x in [0.0, -1.0, f64::NAN] {
        assert!(bessel_y0(x).is_err());
        assert!(bessel_y1(x).is_err());
        assert!(hankel1_0(x).is_err());
        assert!(hankel1_1(x).is_err());
    }
}

proptest! {
    #[test]
    fn wronskian(x in 1e-4f64..200.0) {
        let w = bessel_j1(x) * bessel_y0(x).unwrap() - bessel_j0(x) * bessel_y1(x).unwrap();
        let expected = 2.0 / (PI * x);
        prop_assert!(((w - expected) / expected).abs() <= 1e-9);
    }

    #[test]
    fn parity(x in 0.0f64..200.0) {
        prop_assert_eq!(bessel_j0(-x), bessel_j0(x));
        prop_assert_eq!(bessel_j1(-x), -bessel_j1(x));
    }

    #[test]
    fn three_term_recurrence(x in 0.5f64..150.0) {
        // J2 from the recurrence must agree whether built from J or from H
        let j2 = 2.0 / x * bessel_j1(x) - bessel_j0(x);
        let h2 = Complex::new(2.0 / x, 0.0) * hankel1_1(x).unwrap() - hankel1_0(x).unwrap();
        prop_assert!((h2.re - j2).abs() <= 1e-12 * (1.0 + 2.0 / x));
    }

    #[test]
    fn modulus_is_monotone_decreasing(x in 0.01f64..150.0) {
        // |H0(x)|^2 decreases in x (Nicholson)
        let a = hankel1_0(x).unwrap().norm_sqr();
        let b = hankel1_0(x * 1.01).unwrap().norm_sqr();
        prop_assert!(b < a);
    }
}
