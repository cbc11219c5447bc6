//! Fresnel integrals and the unnormalized sinc.
//!
//! `C(x) = ∫₀ˣ cos(π t²/2) dt` and `S(x) = ∫₀ˣ sin(π t²/2) dt`. Both are
//! evaluated from a power series for `|x| <= 1.6` and from the continued
//! fraction of the complementary error function beyond that, which keeps the
//! absolute error near machine precision over the whole real line.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

const SERIES_LIMIT: f64 = 1.6;
const MAX_ITER: usize = 500;
const TINY: f64 = 1.0e-300;

/// Both Fresnel integrals at once, `(C(x), S(x))`.
pub fn fresnel_cs(x: f64) -> (f64, f64) {
    let ax = x.abs();
    let (c, s) = if ax <= SERIES_LIMIT {
        series(ax)
    } else {
        continued_fraction(ax)
    };
    if x < 0.0 {
        (-c, -s)
    } else {
        (c, s)
    }
}

pub fn fresnel_c(x: f64) -> f64 {
    fresnel_cs(x).0
}

pub fn fresnel_s(x: f64) -> f64 {
    fresnel_cs(x).1
}

/// `C(x)² + S(x)²`, the squared modulus of the Cornu spiral point.
pub fn fresnel_modulus_sq(x: f64) -> f64 {
    let (c, s) = fresnel_cs(x);
    c * c + s * s
}

// term_k = x (π x²/2)^k / k!; even k feed C, odd k feed S, signs alternate in pairs.
fn series(x: f64) -> (f64, f64) {
    if x == 0.0 {
        return (0.0, 0.0);
    }
    let q = FRAC_PI_2 * x * x;
    let mut term = x;
    let mut c = x;
    let mut s = 0.0;
    for k in 1..MAX_ITER {
        term *= q / k as f64;
        let contrib = term / (2 * k + 1) as f64;
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            c += sign * contrib;
        } else {
            s += sign * contrib;
        }
        if contrib < f64::EPSILON * 1e-2 * c.abs().max(s.abs()) {
            break;
        }
    }
    (c, s)
}

// Modified Lentz evaluation of the erfc continued fraction along the Fresnel ray.
fn continued_fraction(x: f64) -> (f64, f64) {
    let pix2 = PI * x * x;
    let one = Complex64::new(1.0, 0.0);
    let mut b = Complex64::new(1.0, -pix2);
    let mut c = Complex64::new(1.0 / TINY, 0.0);
    let mut d = one / b;
    let mut h = d;
    let mut n = -1.0_f64;
    for _ in 0..MAX_ITER {
        n += 2.0;
        let a = -n * (n + 1.0);
        b += Complex64::new(4.0, 0.0);
        d = one / (d * a + b);
        c = b + c.inv() * a;
        let del = c * d;
        h *= del;
        if (del.re - 1.0).abs() + del.im.abs() < f64::EPSILON {
            break;
        }
    }
    h *= Complex64::new(x, -x);
    let (sin, cos) = (0.5 * pix2).sin_cos();
    let cs = Complex64::new(0.5, 0.5) * (one - Complex64::new(cos, sin) * h);
    (cs.re, cs.im)
}

/// Unnormalized sinc, `sin(x)/x` with `sinc(0) = 1`.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// Argument `x ∈ (0, π)` where `sinc²(x) = 1/2`, found by bisection (≈ 1.39156).
pub fn sinc2_half_power_argument() -> f64 {
    static ARG: OnceLock<f64> = OnceLock::new();
    *ARG.get_or_init(|| {
        let (mut lo, mut hi) = (0.5_f64, 2.5_f64);
        while hi - lo > 1e-15 {
            let mid = 0.5 * (lo + hi);
            if sinc(mid).powi(2) > 0.5 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_and_limits() {
        assert_eq!(fresnel_cs(0.0), (0.0, 0.0));
        assert!((fresnel_s(50.0) - 0.5).abs() < 1e-2);
        assert!((fresnel_c(50.0) - 0.5).abs() < 1e-2);
        assert!((fresnel_c(1e4) - 0.5).abs() < 1e-4);
    }

    #[test]
    fn odd_symmetry_at_point_seven() {
        assert_eq!(fresnel_c(-0.7), -fresnel_c(0.7));
        assert_eq!(fresnel_s(-0.7), -fresnel_s(0.7));
    }

    #[test]
    fn branches_agree_at_switch_point() {
        let (c1, s1) = series(SERIES_LIMIT);
        let (c2, s2) = continued_fraction(SERIES_LIMIT);
        assert!((c1 - c2).abs() < 1e-13, "{c1} vs {c2}");
        assert!((s1 - s2).abs() < 1e-13, "{s1} vs {s2}");
    }

    #[test]
    fn bounded_by_cornu_maximum() {
        for i in 0..4000 {
            let x = i as f64 * 0.025;
            let (c, s) = fresnel_cs(x);
            assert!(c.abs() <= 0.78 && s.abs() <= 0.72, "x = {x}");
        }
    }

    #[test]
    fn sinc_values() {
        assert_eq!(sinc(0.0), 1.0);
        assert!(sinc(PI).abs() < 1e-12);
        assert_eq!(sinc(-2.3), sinc(2.3));
        let x = sinc2_half_power_argument();
        assert!((x - 1.39156).abs() < 1e-5);
        assert!((sinc(x).powi(2) - 0.5).abs() < 1e-12);
    }
}
