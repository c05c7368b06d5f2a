#![allow(clippy::excessive_precision)]

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use nanowire::analysis::{
    erfc, p_error, p_error_bit0, p_error_bit1, p_error_scaled, skew_delta, skew_variance, stability, stability_surface,
    std_deviation, StabilityParams,
};
use proptest::prelude::*;

/// Reference erfc computed independently of the library: Maclaurin series of
/// erf near the origin, Lentz continued fraction in the tails.
fn erfc_oracle(z: f64) -> f64 {
    if z.abs() <= 2.0 {
        1.0 - erf_series(z)
    } else if z > 0.0 {
        erfc_cf(z)
    } else {
        2.0 - erfc_cf(-z)
    }
}

fn erf_series(z: f64) -> f64 {
    let z2 = z * z;
    let mut term = z;
    let mut sum = z;
    let mut n = 0.0;
    loop {
        n += 1.0;
        term *= -z2 / n;
        let add = term / (2.0 * n + 1.0);
        sum += add;
        if add.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    sum * 2.0 / PI.sqrt()
}

// erfc(z) = exp(-z^2)/sqrt(pi) * 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...))))
fn erfc_cf(z: f64) -> f64 {
    let tiny = 1e-300;
    let mut f = z;
    let mut c = z;
    let mut d = 0.0;
    for n in 1..20_000 {
        let a = n as f64 / 2.0;
        d = z + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = z + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-17 {
            break;
        }
    }
    (-z * z).exp() / PI.sqrt() / f
}

// 25-digit values, computed offline with arbitrary-precision arithmetic.
const FROZEN: &[(f64, f64)] = &[
    (0.0, 1.0),
    (0.1, 0.8875370839817151077967249),
    (0.5, 0.4795001221869534623172533),
    (0.84375, 0.2327743387676583665410218),
    (1.0, 0.1572992070502851306587794),
    (1.25, 0.07709987174354176986347652),
    (1.5, 0.03389485352468927293302374),
    (2.0, 0.004677734981047265837930744),
    (2.5, 0.0004069520174449589395642157),
    (3.0, 0.00002209049699858544137277613),
    (4.0, 1.541725790028001885215967e-8),
    (5.0, 1.537459794428034850188343e-12),
    (6.0, 2.151973671249891311659335e-17),
    (8.0, 1.122429717298292707996789e-29),
    (10.0, 2.088487583762544757000786e-45),
    (15.0, 7.212994172451206666565067e-100),
    (20.0, 5.395865611607900928934999e-176),
    (26.0, 5.663192408856142846475728e-296),
    (-0.5, 1.520499877813046537682747),
    (-1.0, 1.842700792949714869341221),
    (-3.0, 1.999977909503001414558627),
    (SQRT_2, 0.04550026389635841440056527),
];

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

#[test]
fn oracle_agrees_with_frozen_values() {
    for &(z, want) in FROZEN {
        assert!(rel(erfc_oracle(z), want) < 1e-12, "oracle erfc({z})");
    }
}

#[test]
fn erfc_matches_frozen_values() {
    for &(z, want) in FROZEN {
        let got = erfc(z);
        assert!(rel(got, want) <= 1e-12, "erfc({z}) = {got:e}, want {want:e}");
    }
    assert_eq!(erfc(0.0), 1.0);
}

#[test]
fn erfc_matches_oracle_on_dense_grid() {
    for k in -6000..=6000 {
        let z = k as f64 * 1e-3;
        let (got, want) = (erfc(z), erfc_oracle(z));
        assert!(rel(got, want) <= 1e-12, "z = {z}: {got:e} vs {want:e}");
    }
    for k in 0..=2000 {
        let z = 6.0 + k as f64 * 0.01;
        assert!((erfc(z) - erfc_oracle(z)).abs() <= 1e-15, "z = {z}");
        assert!((erfc(-z) - erfc_oracle(-z)).abs() <= 1e-15, "z = -{z}");
    }
}

#[test]
fn erfc_reflection_on_grid() {
    for k in -600..=600 {
        let z = k as f64 * 0.01;
        assert!((erfc(-z) - (2.0 - erfc(z))).abs() <= 1e-14, "z = {z}");
    }
}

#[test]
fn bit_densities_anchor_values() {
    assert!((p_error(0.0, 0.0) - 0.3989422804014327).abs() <= 1e-12);
    assert_eq!(p_error_bit0(0.0), 0.3989422804014327);
    assert!((p_error_bit0(1.0) - 0.24197072451914337).abs() <= 1e-16);
    for a in [-4.0, -1.0, -0.25, 0.0] {
        assert!((p_error_bit1(a, a) - 0.3989422804014327).abs() <= 1e-16);
    }
    let want = 0.002456603224369506467923593;
    assert!(rel(p_error_bit1(1.0, -1.0), want) <= 1e-13);
    let composed = (-2.0f64).exp() / (2.0 * PI).sqrt() * erfc_oracle(SQRT_2);
    assert!(rel(p_error_bit1(1.0, -1.0), composed) <= 1e-13);
}

#[test]
fn p_error_term_by_term() {
    let (x, a) = (2.0f64, -0.5f64);
    let norm = 1.0 / (2.0 * PI).sqrt();
    let bit0 = norm * (-x * x / 2.0).exp();
    let u = x - a;
    let bit1 = norm * (-u * u / 2.0).exp() * erfc_oracle(u / SQRT_2);
    let want = 0.5 * bit0 + 0.5 * bit1;
    assert!(rel(p_error(x, a), want) <= 1e-13);
}

#[test]
fn skew_anchors() {
    assert_eq!(skew_delta(0.0), 0.0);
    assert!((skew_delta(-1.0) + FRAC_1_SQRT_2).abs() <= 3e-16);
    assert_eq!(skew_variance(0.0), 1.0);
    assert!((skew_variance(-1.0) - (1.0 - 1.0 / PI)).abs() <= 1e-14);
    assert!((skew_variance(-1e6) - (1.0 - 2.0 / PI)).abs() <= 1e-6);
}

#[test]
fn stability_anchors() {
    assert_eq!(stability(&StabilityParams::new(1.0, 2.0, 20.0, 10.0)).unwrap(), 4.0);
    assert_eq!(stability(&StabilityParams::new(1.0, 1.0, 1.0, 1.0)).unwrap(), 1.0);
    assert_eq!(
        std_deviation(&StabilityParams::new(1.0, 2.0, 20.0, 10.0), 2.0).unwrap(),
        0.5
    );
    assert!(stability(&StabilityParams::new(1.0, 0.0, 1.0, 1.0)).is_err());
    assert!(std_deviation(&StabilityParams::new(1.0, 1.0, 1.0, -1.0), 1.0).is_err());
}

#[test]
fn surface_monotone_on_ten_cube() {
    let grid: Vec<f64> = (1..=10).map(f64::from).collect();
    let s = stability_surface(&grid, &grid, &grid, 1.0).unwrap();
    for i in 0..10 {
        for j in 0..10 {
            for l in 0..10 {
                if i + 1 < 10 {
                    assert!(s[i + 1][j][l] > s[i][j][l]);
                }
                if j + 1 < 10 {
                    assert!(s[i][j + 1][l] > s[i][j][l]);
                }
                if l + 1 < 10 {
                    assert!(s[i][j][l + 1] < s[i][j][l]);
                }
            }
        }
    }
}

#[test]
fn scaled_peak_decreases_with_sd() {
    let xs: Vec<f64> = (-20_000..=20_000).map(|k| k as f64 * 1e-3).collect();
    for a in [0.0, -0.5, -1.0, -3.0] {
        let mut last = f64::INFINITY;
        for s in 1..=40 {
            let sd = 0.25 * s as f64;
            let peak = xs
                .iter()
                .map(|&x| p_error_scaled(x, a, sd).unwrap())
                .fold(0.0, f64::max);
            assert!(peak < last, "A = {a}, sd = {sd}");
            last = peak;
        }
    }
    assert_eq!(p_error_scaled(0.0, 0.0, 2.0).unwrap(), p_error(0.0, 0.0) / 2.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn p_error_is_the_prior_mixture(x in -50.0f64..50.0, a in -50.0f64..0.0) {
        let want = 0.5 * (p_error_bit0(x) + p_error_bit1(x, a));
        prop_assert!((p_error(x, a) - want).abs() <= 1e-15);
    }
}

proptest! {
    #[test]
    fn bit1_without_skew(x in -40.0f64..40.0) {
        prop_assert!((p_error_bit1(x, 0.0) - p_error_bit0(x) * erfc(x * FRAC_1_SQRT_2)).abs() <= 1e-15);
    }

    #[test]
    fn densities_non_negative(x in -1e3f64..1e3, a in -1e3f64..1e3, sd in 1e-3f64..1e3) {
        prop_assert!(p_error_bit0(x) >= 0.0);
        prop_assert!(p_error_bit1(x, a) >= 0.0);
        prop_assert!(p_error(x, a) >= 0.0);
        prop_assert!(p_error_scaled(x, a, sd).unwrap() >= 0.0);
    }

    #[test]
    fn skew_delta_bounded(a in proptest::num::f64::NORMAL | proptest::num::f64::ZERO) {
        prop_assert!(skew_delta(a).abs() <= 1.0);
    }

    #[test]
    fn skew_variance_range(a in -1e6f64..1e6) {
        let v = skew_variance(a);
        prop_assert!(v > 1.0 - 2.0 / PI && v <= 1.0);
        prop_assert_eq!(v == 1.0, a == 0.0);
    }

    #[test]
    fn unit_sd_is_literal(x in -10.0f64..10.0, a in -10.0f64..0.0) {
        prop_assert_eq!(p_error_scaled(x, a, 1.0).unwrap(), p_error(x, a));
    }

    #[test]
    fn stability_times_sd(k in 1e-3f64..1e3, kp in 1e-3f64..1e3, e in 1e-3f64..1e3, m in 1e-3f64..1e3, l in 1e-3f64..1e3) {
        let p = StabilityParams::new(k, e, m, l);
        let product = stability(&p).unwrap() * std_deviation(&p, kp).unwrap();
        prop_assert!(rel(product, k * kp) <= 4.0 * f64::EPSILON);
    }

    #[test]
    fn doubling_length_halves_stability(k in 1e-3f64..1e3, e in 1e-3f64..1e3, m in 1e-3f64..1e3, l in 1e-3f64..1e3) {
        let s1 = stability(&StabilityParams::new(k, e, m, l)).unwrap();
        let s2 = stability(&StabilityParams::new(k, e, m, 2.0 * l)).unwrap();
        prop_assert_eq!(s2, s1 / 2.0);
    }
}
