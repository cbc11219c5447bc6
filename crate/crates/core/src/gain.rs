//! Normalized array gains: exact aperture integrals and the closed forms for
//! rectangular (broadside and steered) and circular apertures.
//!
//! The exact gain integrates the incident field, weighted by the matched
//! filter, coherently over the whole aperture:
//! `G = |∫ E·w|² / (A ∫ |E|²)`. It equals one for a plane wave and a
//! co-phased filter.

use crate::error::{positive, Error, Result};
use crate::field::{exact_field_relative, FocalPoint, QuadratureSpec};
use crate::fresnel::{fresnel_cs, sinc};
use crate::geometry::{CircArray, RectArray, TxGeometry};
use crate::quadrature::{composite, disk, GaussLegendre};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::Write;

/// `|1/z − 1/F|`, zero when the transmitter sits at the focus.
pub fn inverse_effective_distance(z: f64, focus: f64) -> f64 {
    let inv_f = if focus.is_finite() { 1.0 / focus } else { 0.0 };
    (1.0 / z - inv_f).abs()
}

/// `F z / |F − z|`, infinite at perfect focus.
pub fn effective_distance(z: f64, focus: f64) -> f64 {
    let inv = inverse_effective_distance(z, focus);
    if inv == 0.0 {
        f64::INFINITY
    } else {
        1.0 / inv
    }
}

/// Defocus parameter `a = d_FA / (4 z_eff (1 + η²))` of a rectangular array.
pub fn defocus_parameter(arr: &RectArray, z: f64, focus: f64) -> f64 {
    let eta = arr.eta();
    arr.array_fraunhofer_distance() * inverse_effective_distance(z, focus) / (4.0 * (1.0 + eta * eta))
}

// (C²(x) + S²(x)) / x², tending to 1 at the origin.
fn cornu_ratio(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        return 1.0;
    }
    let (c, s) = fresnel_cs(x);
    (c * c + s * s) / (x * x)
}

/// Closed-form broadside gain of a rectangular array with width-to-height
/// ratio `eta` at defocus `a`.
pub fn analytic_gain_rect(eta: f64, a: f64) -> f64 {
    if a <= 0.0 {
        return 1.0;
    }
    let r = a.sqrt();
    cornu_ratio(eta * r) * cornu_ratio(r)
}

/// Closed-form gain for a steered transmitter received with a broadside
/// focus. `p` carries the defocus, `q` and `q_tilde` the horizontal and
/// vertical offsets of the transmitter.
pub fn analytic_gain_nonbroadside(eta: f64, p: f64, q: f64, q_tilde: f64) -> f64 {
    if p <= 0.0 {
        return if q == 0.0 && q_tilde == 0.0 { 1.0 } else { 0.0 };
    }
    let pair = |centre: f64, shift: f64| {
        let (c1, s1) = fresnel_cs(centre + shift);
        let (c2, s2) = fresnel_cs(centre - shift);
        (c1 + c2).powi(2) + (s1 + s2).powi(2)
    };
    let norm = 1.0 / (4.0 * eta * p * p);
    norm * norm * pair(p, q_tilde) * pair(eta * p, q)
}

/// Parameters `(p, q, q̃)` of [`analytic_gain_nonbroadside`] for `tx` and a
/// broadside focus at `focus`. `p = 0` signals perfect range focus, where
/// `q` and `q̃` are infinite.
pub fn nonbroadside_parameters(arr: &RectArray, tx: &TxGeometry, focus: f64) -> (f64, f64, f64) {
    let eta = arr.eta();
    let inv = inverse_effective_distance(tx.dist(), focus);
    let (ux, uy) = tx.direction();
    if inv == 0.0 {
        return (0.0, f64::INFINITY * ux.signum(), f64::INFINITY * uy.signum());
    }
    let p = 0.5 * (arr.array_fraunhofer_distance() * inv / (1.0 + eta * eta)).sqrt();
    let scale = (2.0 / (arr.wavelength() * inv)).sqrt();
    (p, ux * scale, uy * scale)
}

/// Closed-form gain for a transmitter in any direction with the array
/// focused broadside at range `focus`, including the perfect-focus limit.
pub fn analytic_gain_steered_tx(arr: &RectArray, tx: &TxGeometry, focus: f64) -> f64 {
    let (p, q, qt) = nonbroadside_parameters(arr, tx, focus);
    if p < 1e-6 {
        let (ux, uy) = tx.direction();
        let k_half = PI / arr.wavelength();
        let fx = sinc(k_half * arr.aperture_width() * ux);
        let fy = sinc(k_half * arr.aperture_height() * uy);
        return (fx * fy).powi(2);
    }
    analytic_gain_nonbroadside(arr.eta(), p, q, qt)
}

/// Circular-aperture sinc index `l = R² / (2 λ z_eff)`.
pub fn circ_parameter(circ: &CircArray, z: f64, focus: f64) -> f64 {
    circ.radius().powi(2) * inverse_effective_distance(z, focus) / (2.0 * circ.wavelength())
}

/// Closed-form circular gain `sinc²(π l)`.
pub fn analytic_gain_circ(l: f64) -> f64 {
    sinc(PI * l).powi(2)
}

pub fn to_db(gain: f64) -> f64 {
    10.0 * gain.log10()
}

// Coherent aperture sum over a tensor grid, rows in parallel.
fn tensor_gain(
    xs: &[(f64, f64)],
    ys: &[(f64, f64)],
    tx: &TxGeometry,
    focus: &FocalPoint,
    wavelength: f64,
    area: f64,
) -> f64 {
    let (xt, yt, z) = tx.position();
    let d = tx.dist();
    let k = 2.0 * PI / wavelength;
    let rows: Vec<(Complex64, f64)> = xs
        .par_iter()
        .map(|&(x, wx)| {
            let mut num = Complex64::new(0.0, 0.0);
            let mut den = 0.0;
            for &(y, wy) in ys {
                let (amp, ph) = exact_field_relative(xt, yt, z, d, k, x, y);
                let w = wx * wy;
                let (s, c) = (ph + focus.phase(wavelength, x, y)).sin_cos();
                num += Complex64::new(c, s) * (w * amp);
                den += w * amp * amp;
            }
            (num, den)
        })
        .collect();
    let (num, den) = rows
        .iter()
        .fold((Complex64::new(0.0, 0.0), 0.0), |(n, d), &(a, b)| (n + a, d + b));
    num.norm_sqr() / (area * den)
}

fn axis_nodes(centers: impl Iterator<Item = f64>, pitch: f64, rule: &GaussLegendre, panels: usize) -> Vec<(f64, f64)> {
    centers
        .flat_map(|c| composite(rule, c - pitch / 2.0, c + pitch / 2.0, panels))
        .collect()
}

fn check_radiative(dist: f64, minimum: f64) -> Result<()> {
    if dist < minimum {
        return Err(Error::ReactiveNearField { distance: dist, minimum });
    }
    Ok(())
}

/// Exact normalized gain of `arr` for `tx`, with the filter focused on `focus`.
pub fn exact_array_gain(
    arr: &RectArray,
    tx: &TxGeometry,
    focus: &FocalPoint,
    quad: &QuadratureSpec,
) -> Result<f64> {
    check_radiative(tx.dist(), arr.reactive_limit())?;
    let gain = quad.converge(
        |rule, panels| {
            let xs = axis_nodes(arr.axis_centers(arr.elem_w()), arr.elem_w(), rule, panels);
            let ys = axis_nodes(arr.axis_centers(arr.elem_h()), arr.elem_h(), rule, panels);
            let g = tensor_gain(&xs, &ys, tx, focus, arr.wavelength(), arr.aperture_area());
            if g.is_finite() {
                Ok(g)
            } else {
                Err(Error::NonFinite("exact array gain"))
            }
        },
        |a, b| (a - b).abs(),
    )?;
    Ok(gain)
}

/// Gain of the projected broadside array: the width shrinks by `cos φ` and
/// the transmitter moves onto the broadside axis at the same range.
pub fn projected_gain_approx(
    arr: &RectArray,
    tx: &TxGeometry,
    focus: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let projected = arr.project(tx.azimuth())?;
    exact_array_gain(
        &projected,
        &TxGeometry::broadside(tx.dist())?,
        &FocalPoint::broadside(focus)?,
        quad,
    )
}

/// Polar quadrature settings for the circular aperture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DiskQuadrature {
    pub radial_order: usize,
    pub radial_panels: usize,
    pub angular: usize,
}

impl Default for DiskQuadrature {
    fn default() -> Self {
        Self {
            radial_order: 16,
            radial_panels: 6,
            angular: 64,
        }
    }
}

/// Exact gain of the continuous circular aperture for a broadside
/// transmitter at `z`, by polar quadrature over the disk.
pub fn exact_circ_gain(circ: &CircArray, z: f64, focus: &FocalPoint, quad: &DiskQuadrature) -> Result<f64> {
    check_radiative(z, circ.reactive_limit())?;
    if quad.radial_order < 2 || quad.radial_panels < 1 || quad.angular < 4 {
        return Err(Error::invalid("disk quadrature", "needs radial_order >= 2, radial_panels >= 1, angular >= 4"));
    }
    let rule = GaussLegendre::new(quad.radial_order)?;
    let points = disk(circ.radius(), &rule, quad.radial_panels, quad.angular);
    let k = 2.0 * PI / circ.wavelength();
    let lambda = circ.wavelength();
    let parts: Vec<(Complex64, f64)> = points
        .par_chunks(quad.angular)
        .map(|ring| {
            let mut num = Complex64::new(0.0, 0.0);
            let mut den = 0.0;
            for &(x, y, w) in ring {
                let (amp, ph) = exact_field_relative(0.0, 0.0, z, z, k, x, y);
                let (s, c) = (ph + focus.phase(lambda, x, y)).sin_cos();
                num += Complex64::new(c, s) * (w * amp);
                den += w * amp * amp;
            }
            (num, den)
        })
        .collect();
    let (num, den) = parts
        .iter()
        .fold((Complex64::new(0.0, 0.0), 0.0), |(n, d), &(a, b)| (n + a, d + b));
    let g = num.norm_sqr() / (circ.area() * den);
    if g.is_finite() {
        Ok(g)
    } else {
        Err(Error::NonFinite("exact circular gain"))
    }
}

/// Gain sampled along a distance sweep for one focus setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainProfile {
    focus: f64,
    samples: Vec<(f64, f64)>,
}

pub const GAIN_TOLERANCE: f64 = 1e-6;

impl GainProfile {
    pub fn new(focus: f64, samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::invalid("profile", "no samples"));
        }
        for w in samples.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::invalid("profile", "distances must be strictly increasing"));
            }
        }
        for &(d, g) in &samples {
            if !d.is_finite() || d <= 0.0 {
                return Err(Error::invalid("profile", format!("distance {d} must be finite and > 0")));
            }
            if !(0.0..=1.0 + GAIN_TOLERANCE).contains(&g) {
                return Err(Error::invalid("profile", format!("gain {g} outside [0, 1]")));
            }
        }
        Ok(Self { focus, samples })
    }

    /// Evaluates `gain` on every distance in parallel. Failures are collected
    /// with their sweep index.
    pub fn sweep<F>(focus: f64, distances: &[f64], gain: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64> + Sync,
    {
        let values = sweep_values(distances, |_, &d| gain(d))?;
        Self::new(focus, distances.iter().copied().zip(values).collect())
    }

    pub fn focus(&self) -> f64 {
        self.focus
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    /// Sample with the largest gain; ties resolve to the first.
    pub fn peak(&self) -> (f64, f64) {
        self.samples
            .iter()
            .copied()
            .fold((f64::NAN, f64::NEG_INFINITY), |best, s| if s.1 > best.1 { s } else { best })
    }

    /// Writes `distance_over_dF,gain` rows with distances divided by `unit`.
    pub fn write_csv<W: Write>(&self, out: W, unit: f64) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["distance_over_dF", "gain"])?;
        for &(d, g) in &self.samples {
            w.write_record([fmt(d / unit), fmt(g)])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub(crate) fn fmt(v: f64) -> String {
    if v.is_infinite() {
        String::from(if v > 0.0 { "inf" } else { "-inf" })
    } else {
        format!("{v:.10e}")
    }
}

/// Runs `f` over `items` in parallel, keeping order and collecting every
/// failure with its index.
pub fn sweep_values<T, R, F>(items: &[T], f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(usize, &T) -> Result<R> + Sync,
{
    let results: Vec<Result<R>> = items.par_iter().enumerate().map(|(i, t)| f(i, t)).collect();
    let mut ok = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(v) => ok.push(v),
            Err(e) => failures.push((i, e)),
        }
    }
    if failures.is_empty() {
        Ok(ok)
    } else {
        Err(Error::Sweep { failures })
    }
}

/// `n` points spaced geometrically over `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    let lo = positive("grid start", lo)?;
    let hi = positive("grid end", hi)?;
    if n == 0 || hi < lo {
        return Err(Error::invalid("grid", "needs n >= 1 and end >= start"));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let step = (hi / lo).ln() / (n - 1) as f64;
    Ok((0..n)
        .map(|i| if i == n - 1 { hi } else { lo * (step * i as f64).exp() })
        .collect())
}

/// `n` points spaced evenly over `[lo, hi]`.
pub fn lin_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n == 0 || !lo.is_finite() || !hi.is_finite() || hi < lo {
        return Err(Error::invalid("grid", "needs n >= 1 and finite end >= start"));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let h = (hi - lo) / (n - 1) as f64;
    Ok((0..n).map(|i| if i == n - 1 { hi } else { lo + h * i as f64 }).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{wavelength_from_carrier, Sizing};

    fn preset(eta: f64) -> RectArray {
        let l = wavelength_from_carrier(3e9).unwrap();
        RectArray::new(100, eta, Sizing::FixedElementDiagonal(l / 4.0), l).unwrap()
    }

    #[test]
    fn rect_closed_form_limits() {
        assert_eq!(analytic_gain_rect(2.0, 0.0), 1.0);
        assert!((analytic_gain_rect(1.0, 1e-6) - 1.0).abs() < 1e-10);
        let a = 0.05;
        let eta: f64 = 1.7;
        let small = (1.0 - PI * PI * eta.powi(4) * a * a / 45.0) * (1.0 - PI * PI * a * a / 45.0);
        assert!((analytic_gain_rect(eta, a) - small).abs() < 1e-5);
    }

    #[test]
    fn nonbroadside_reduces_to_broadside() {
        for (eta, p) in [(1.0, 0.8), (0.3, 1.5), (4.0, 0.2)] {
            let a = analytic_gain_nonbroadside(eta, p, 0.0, 0.0);
            let b = analytic_gain_rect(eta, p * p);
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn steered_limit_is_continuous() {
        let arr = preset(1.0);
        let tx = TxGeometry::new(20.0, 0.004, 0.0).unwrap();
        let at_focus = analytic_gain_steered_tx(&arr, &tx, 20.0);
        let near = analytic_gain_steered_tx(&arr, &tx, 20.0 * (1.0 + 1e-7));
        assert!((at_focus - near).abs() < 1e-6, "{at_focus} {near}");
    }

    #[test]
    fn circular_closed_form() {
        assert_eq!(analytic_gain_circ(0.0), 1.0);
        for k in 1..5 {
            assert!(analytic_gain_circ(k as f64) < 1e-30);
        }
    }

    #[test]
    fn single_element_gain_is_antenna_gain() {
        let l = 0.1;
        let arr = RectArray::from_element_sides(1, 0.3, 0.2, l).unwrap();
        let tx = TxGeometry::new(2.0, 0.2, 0.1).unwrap();
        let focus = FocalPoint::far_field();
        let g = exact_array_gain(&arr, &tx, &focus, &QuadratureSpec::default()).unwrap();
        let rule = GaussLegendre::new(40).unwrap();
        let (mut num, mut den) = (Complex64::new(0.0, 0.0), 0.0);
        for (x, wx) in rule.mapped(-0.15, 0.15) {
            for (y, wy) in rule.mapped(-0.1, 0.1) {
                let e = crate::field::exact_field(&tx, l, x, y).unwrap();
                num += e * wx * wy;
                den += e.norm_sqr() * wx * wy;
            }
        }
        let want = num.norm_sqr() / (0.06 * den);
        assert!((g - want).abs() < 1e-10);
    }

    #[test]
    fn perfect_focus_near_unity() {
        let arr = preset(1.0);
        let d_b = arr.uniform_amplitude_distance();
        let tx = TxGeometry::broadside(d_b).unwrap();
        let g = exact_array_gain(&arr, &tx, &FocalPoint::broadside(d_b).unwrap(), &QuadratureSpec::fixed(4)).unwrap();
        assert!(g >= 0.99 && g <= 1.0 + 1e-6, "{g}");
        let far = exact_array_gain(&arr, &tx, &FocalPoint::far_field(), &QuadratureSpec::fixed(4)).unwrap();
        assert!(far < 0.5 * g, "{far}");
    }

    #[test]
    fn rejects_reactive_region() {
        let arr = preset(1.0);
        let tx = TxGeometry::broadside(arr.aperture_length()).unwrap();
        let r = exact_array_gain(&arr, &tx, &FocalPoint::far_field(), &QuadratureSpec::fixed(2));
        assert!(matches!(r, Err(Error::ReactiveNearField { .. })));
    }

    #[test]
    fn projection_exact_at_broadside() {
        let arr = preset(1.0);
        let d = 600.0 * arr.fraunhofer_distance();
        let f = 400.0 * arr.fraunhofer_distance();
        let tx = TxGeometry::broadside(d).unwrap();
        let q = QuadratureSpec::fixed(2);
        let a = projected_gain_approx(&arr, &tx, f, &q).unwrap();
        let b = exact_array_gain(&arr, &tx, &FocalPoint::broadside(f).unwrap(), &q).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn profile_validation_and_csv() {
        assert!(GainProfile::new(1.0, vec![]).is_err());
        assert!(GainProfile::new(1.0, vec![(2.0, 0.5), (1.0, 0.5)]).is_err());
        assert!(GainProfile::new(1.0, vec![(1.0, 1.1)]).is_err());
        let p = GainProfile::new(1.0, vec![(1.0, 0.5), (2.0, 1.0)]).unwrap();
        assert_eq!(p.peak(), (2.0, 1.0));
        let mut buf = Vec::new();
        p.write_csv(&mut buf, 0.5).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("distance_over_dF,gain\n2.0000000000e0,5.0000000000e-1\n"));
    }

    #[test]
    fn sweep_reports_indices() {
        let r = GainProfile::sweep(1.0, &[1.0, 2.0, 3.0], |d| {
            if d == 2.0 { Err(Error::NonFinite("test")) } else { Ok(0.5) }
        });
        match r {
            Err(Error::Sweep { failures }) => assert_eq!(failures[0].0, 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn grids() {
        let g = log_grid(1.0, 100.0, 3).unwrap();
        assert!((g[1] - 10.0).abs() < 1e-12 && g[2] == 100.0);
        assert_eq!(lin_grid(0.0, 1.0, 3).unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(log_grid(1.0, 2.0, 0).is_err());
    }
}
