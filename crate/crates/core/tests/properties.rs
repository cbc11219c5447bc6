use nearfield_bd::beam_depth::{bd_rect, finite_bd_limit_rect, numeric_bd, solve_a3db, NumericBeamDepth, A3DB_TOL};
use nearfield_bd::fresnel::{fresnel_c, fresnel_cs, fresnel_s};
use nearfield_bd::gain::{analytic_gain_rect, defocus_parameter, log_grid, GainProfile};
use nearfield_bd::geometry::{RectArray, Sizing};
use nearfield_bd::multiplexing::{plan_focal_points, sinrs_from_effective, CMatrix};
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::{FRAC_PI_2, PI};

const LAMBDA: f64 = 0.1;

// Composite Simpson rule on [0, x] for the Fresnel kernels.
fn simpson_fresnel(x: f64) -> (f64, f64) {
    let n = 40_000;
    let h = x / n as f64;
    let (mut c, mut s) = (0.0, 0.0);
    for i in 0..=n {
        let t = i as f64 * h;
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let arg = PI * t * t / 2.0;
        c += w * arg.cos();
        s += w * arg.sin();
    }
    (c * h / 3.0, s * h / 3.0)
}

fn sizing_strategy() -> impl Strategy<Value = Sizing> {
    prop_oneof![
        (0.05..2.0f64).prop_map(|d| Sizing::FixedElementDiagonal(d * LAMBDA)),
        (1.0..500.0f64).prop_map(|a| Sizing::FixedApertureArea(a * LAMBDA * LAMBDA)),
        (1.0..50.0f64).prop_map(|l| Sizing::FixedApertureLength(l * LAMBDA)),
    ]
}

fn array_strategy() -> impl Strategy<Value = RectArray> {
    (4usize..120, -2.0..2.0f64, sizing_strategy())
        .prop_map(|(n, log_eta, sizing)| RectArray::new(n, 10f64.powf(log_eta), sizing, LAMBDA).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn fresnel_is_odd(x in -50.0..50.0f64) {
        let (c, s) = fresnel_cs(x);
        let (cn, sn) = fresnel_cs(-x);
        prop_assert_eq!(c, -cn);
        prop_assert_eq!(s, -sn);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn fresnel_matches_simpson(x in -6.0..6.0f64) {
        let (c, s) = simpson_fresnel(x);
        prop_assert!((fresnel_c(x) - c).abs() < 1e-9, "C({x}) = {} vs {c}", fresnel_c(x));
        prop_assert!((fresnel_s(x) - s).abs() < 1e-9, "S({x}) = {} vs {s}", fresnel_s(x));
    }

    #[test]
    fn fresnel_derivative(x in -8.0..8.0f64) {
        let h = 1e-5;
        let dc = (fresnel_c(x + h) - fresnel_c(x - h)) / (2.0 * h);
        let ds = (fresnel_s(x + h) - fresnel_s(x - h)) / (2.0 * h);
        let arg = PI * x * x / 2.0;
        prop_assert!((dc - arg.cos()).abs() < 1e-6);
        prop_assert!((ds - arg.sin()).abs() < 1e-6);
    }

    #[test]
    fn a3db_scaled_by_one_plus_eta2_is_symmetric(log_eta in -2.0..2.0f64) {
        let eta = 10f64.powf(log_eta);
        let k = solve_a3db(eta, A3DB_TOL).unwrap() * (1.0 + eta * eta);
        let k_inv = solve_a3db(1.0 / eta, A3DB_TOL).unwrap() * (1.0 + 1.0 / (eta * eta));
        prop_assert!((k / k_inv - 1.0).abs() < 1e-8);
    }

    #[test]
    fn half_power_is_hit(log_eta in -2.0..2.0f64) {
        let eta = 10f64.powf(log_eta);
        let a = solve_a3db(eta, A3DB_TOL).unwrap();
        prop_assert!((analytic_gain_rect(eta, a) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn finite_limit_symmetric_under_fixed_area(log_eta in -1.0..1.0f64, area in 10.0..1000.0f64, n in 10usize..200) {
        let eta = 10f64.powf(log_eta);
        let sizing = Sizing::FixedApertureArea(area * LAMBDA * LAMBDA);
        let a = RectArray::new(n, eta, sizing, LAMBDA).unwrap();
        let b = RectArray::new(n, 1.0 / eta, sizing, LAMBDA).unwrap();
        let (la, lb) = (finite_bd_limit_rect(&a).unwrap(), finite_bd_limit_rect(&b).unwrap());
        prop_assert!((la / lb - 1.0).abs() < 1e-8);
    }

    #[test]
    fn sizing_round_trip(n in 1usize..300, log_eta in -2.0..2.0f64, v in 0.01..100.0f64) {
        let eta = 10f64.powf(log_eta);
        let a = RectArray::new(n, eta, Sizing::FixedApertureArea(v), LAMBDA).unwrap();
        prop_assert!((a.aperture_area() / v - 1.0).abs() < 1e-12);
        let l = RectArray::new(n, eta, Sizing::FixedApertureLength(v), LAMBDA).unwrap();
        prop_assert!((l.aperture_length() / v - 1.0).abs() < 1e-12);
        let d = RectArray::new(n, eta, Sizing::FixedElementDiagonal(v), LAMBDA).unwrap();
        prop_assert!((d.elem_w().hypot(d.elem_h()) / v - 1.0).abs() < 1e-12);
        prop_assert!((d.elem_w() / d.elem_h() / eta - 1.0).abs() < 1e-12);
    }

    #[test]
    fn projection_composes(arr in array_strategy(), phi in -1.5..1.5f64) {
        let once = arr.project(phi).unwrap();
        let twice = arr.project(0.0).unwrap().project(phi).unwrap();
        prop_assert!((once.elem_w() - twice.elem_w()).abs() <= 1e-15 * once.elem_w());
        prop_assert_eq!(once.elem_h(), twice.elem_h());
        prop_assert_eq!(once.n_per_side(), twice.n_per_side());
        prop_assert_eq!(once.wavelength(), twice.wavelength());
        prop_assert!((once.elem_w() - arr.elem_w() * phi.cos()).abs() <= 1e-15 * arr.elem_w());
    }

    #[test]
    fn projection_at_right_angle_is_rejected(arr in array_strategy()) {
        prop_assert!(arr.project(FRAC_PI_2).is_err());
    }

    #[test]
    fn plan_intervals_are_disjoint(
        arr in array_strategy(),
        near_frac in 0.01..0.5f64,
        far_frac in 0.5..1.0f64,
        k in 1usize..40,
    ) {
        let limit = finite_bd_limit_rect(&arr).unwrap();
        let plan = plan_focal_points(&arr, near_frac * limit, far_frac * limit, k).unwrap();
        prop_assert!(plan.len() <= k);
        let mut iv = plan.intervals.clone();
        iv.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in iv.windows(2) {
            prop_assert!(w[0].1 <= w[1].0 * (1.0 + 1e-12));
        }
        for (f, (lo, hi)) in plan.focal_points.iter().zip(&plan.intervals) {
            prop_assert!(lo <= f && f <= hi);
            prop_assert!(*hi <= far_frac * limit * (1.0 + 1e-12));
        }
    }

    #[test]
    fn profile_peaks_at_focus(arr in array_strategy(), frac in 0.05..0.9f64) {
        let focus = frac * finite_bd_limit_rect(&arr).unwrap();
        let mut zs = log_grid(0.1 * focus, 10.0 * focus, 101).unwrap();
        zs[50] = focus;
        let p = GainProfile::sweep(focus, &zs, |z| Ok(analytic_gain_rect(arr.eta(), defocus_parameter(&arr, z, focus)))).unwrap();
        prop_assert_eq!(p.peak(), (focus, 1.0));
    }

    #[test]
    fn sinr_depends_on_effective_power_only(
        re in proptest::collection::vec(-2.0..2.0f64, 9),
        im in proptest::collection::vec(-2.0..2.0f64, 9),
        p in proptest::collection::vec(0.0..100.0f64, 3),
        c in 0.1..10.0f64,
    ) {
        let m = CMatrix::from_fn(3, 3, |i, j| Complex64::new(re[3 * i + j], im[3 * i + j]));
        let base = sinrs_from_effective(&m, &p).unwrap();
        let scaled_p: Vec<f64> = p.iter().map(|x| x / (c * c)).collect();
        let scaled = sinrs_from_effective(&(m.clone() * Complex64::new(c, 0.0)), &scaled_p).unwrap();
        for u in 0..3 {
            let signal = p[u] * m[(u, u)].norm_sqr();
            let interference: f64 = (0..3).filter(|&j| j != u).map(|j| p[j] * m[(u, j)].norm_sqr()).sum();
            prop_assert!((base[u] - signal / (interference + 1.0)).abs() <= 1e-12 * base[u].max(1.0));
            prop_assert!((base[u] - scaled[u]).abs() <= 1e-9 * base[u].max(1.0));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn closed_form_bd_matches_numeric(arr in array_strategy(), frac in 0.0..1.0f64) {
        let limit = finite_bd_limit_rect(&arr).unwrap();
        let lo = arr.uniform_amplitude_distance().min(0.5 * limit);
        let focus = lo + frac * (0.8 * limit - lo);
        let gain = |z: f64| Ok(analytic_gain_rect(arr.eta(), defocus_parameter(&arr, z, focus)));
        let zs = log_grid(0.2 * focus, 12.0 * focus, 600).unwrap();
        let profile = GainProfile::sweep(focus, &zs, gain).unwrap();
        let numeric = numeric_bd(&profile, Some(&gain), Some(limit)).unwrap();
        let closed = bd_rect(&arr, focus).unwrap();
        match numeric {
            NumericBeamDepth::Interval { z_lo, z_hi } => {
                prop_assert!(((z_hi - z_lo) / closed.depth - 1.0).abs() < 0.01, "{} vs {}", z_hi - z_lo, closed.depth);
            }
            other => prop_assert!(false, "{other:?}"),
        }
    }
}
