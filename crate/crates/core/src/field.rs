//! Incident fields on the aperture plane, matched-filter phases, element
//! channel responses and distance approximations.
//!
//! The exact field of an isotropic, y-polarized transmitter at
//! `(x_t, y_t, z)` observed at `(x, y, 0)` is
//!
//! ```text
//! E(x, y) = sqrt(z((x - x_t)^2 + z^2)) / (sqrt(4π) r^(5/4)) · exp(-j 2π/λ sqrt(r))
//! ```
//!
//! where `r` is the *squared* distance. The source amplitude is fixed to one.

use crate::error::{positive, Error, Result};
use crate::geometry::{RectArray, TxGeometry};
use crate::quadrature::GaussLegendre;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

fn inv_sqrt_4pi() -> f64 {
    1.0 / (4.0 * PI).sqrt()
}

fn wavenumber(wavelength: f64) -> f64 {
    2.0 * PI / wavelength
}

/// Exact field of `tx` at aperture point `(x, y)`.
pub fn exact_field(tx: &TxGeometry, wavelength: f64, x: f64, y: f64) -> Result<Complex64> {
    let (xt, yt, z) = tx.position();
    let r = (x - xt).powi(2) + (y - yt).powi(2) + z * z;
    if r == 0.0 {
        return Err(Error::Singularity { x, y });
    }
    let amp = (z * ((x - xt).powi(2) + z * z)).sqrt() / r.powf(1.25) * inv_sqrt_4pi();
    Ok(Complex64::from_polar(amp, -wavenumber(wavelength) * r.sqrt()))
}

/// Exact field with the common phase `-2π d/λ` removed, evaluated without
/// cancellation. Returns `(amplitude, phase)`.
#[inline]
pub(crate) fn exact_field_relative(
    xt: f64,
    yt: f64,
    z: f64,
    dist: f64,
    k: f64,
    x: f64,
    y: f64,
) -> (f64, f64) {
    let dx = x - xt;
    let r = dx * dx + (y - yt).powi(2) + z * z;
    let excess = (x * x - 2.0 * x * xt + y * y - 2.0 * y * yt) / (r.sqrt() + dist);
    let amp = (z * (dx * dx + z * z)).sqrt() / (r * r.sqrt().sqrt());
    (amp, -k * excess)
}

/// Fresnel (second-order) approximation for a broadside transmitter at `z`.
pub fn fresnel_field_broadside(z: f64, wavelength: f64, x: f64, y: f64) -> Complex64 {
    let phase = -wavenumber(wavelength) * (z + (x * x + y * y) / (2.0 * z));
    Complex64::from_polar(inv_sqrt_4pi() / z, phase)
}

/// Fresnel approximation expanded around the transmitter distance `d`,
/// valid for any direction.
pub fn fresnel_field_nonbroadside(tx: &TxGeometry, wavelength: f64, x: f64, y: f64) -> Complex64 {
    let (xt, yt, z) = tx.position();
    let d = tx.dist();
    let phase = -wavenumber(wavelength) * (d + (x * x + y * y - 2.0 * (x * xt + y * yt)) / (2.0 * d));
    Complex64::from_polar(inv_sqrt_4pi() / z, phase)
}

/// Point the receive array is focused on.
///
/// The injected phase is the conjugate of the second-order expansion of the
/// distance to a point at range `distance` along direction `(u_x, u_y)`:
/// `2π/λ · (−(x u_x + y u_y) + (x² + y² − (x u_x + y u_y)²) / (2F))`.
/// For a broadside focus this is `2π/λ · (x² + y²) / (2F)`. An infinite
/// range leaves only the linear steering term. A spherical focal point
/// instead conjugates the exact distance `k (r − F)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FocalPoint {
    distance: f64,
    ux: f64,
    uy: f64,
    #[serde(default)]
    spherical: bool,
}

impl FocalPoint {
    pub fn broadside(distance: f64) -> Result<Self> {
        Self::steered(distance, 0.0, 0.0)
    }

    pub fn far_field() -> Self {
        Self {
            distance: f64::INFINITY,
            ux: 0.0,
            uy: 0.0,
            spherical: false,
        }
    }

    pub fn steered(distance: f64, azimuth: f64, elevation: f64) -> Result<Self> {
        if distance.is_nan() || distance <= 0.0 {
            return Err(Error::invalid("focus", format!("must be > 0 or infinite, got {distance}")));
        }
        for (name, angle) in [("focus azimuth", azimuth), ("focus elevation", elevation)] {
            if !angle.is_finite() || angle.abs() >= FRAC_PI_2 {
                return Err(Error::invalid(name, format!("|{angle}| must be < π/2")));
            }
        }
        Ok(Self {
            distance,
            ux: azimuth.sin() * elevation.cos(),
            uy: elevation.sin(),
            spherical: false,
        })
    }

    /// Focal point whose filter matches the exact spherical wavefront.
    pub fn spherical(distance: f64, azimuth: f64, elevation: f64) -> Result<Self> {
        Ok(Self {
            spherical: true,
            ..Self::steered(distance, azimuth, elevation)?
        })
    }

    pub fn is_spherical(&self) -> bool {
        self.spherical
    }

    /// Focus at range `distance` in the direction of `tx`.
    pub fn toward(tx: &TxGeometry, distance: f64) -> Result<Self> {
        Self::steered(distance, tx.azimuth(), tx.elevation())
    }

    pub fn distance(&self) -> f64 {
        self.distance
    }

    pub fn direction(&self) -> (f64, f64) {
        (self.ux, self.uy)
    }

    pub fn is_broadside(&self) -> bool {
        self.ux == 0.0 && self.uy == 0.0
    }

    /// Injected phase in radians at `(x, y)`.
    #[inline]
    pub fn phase(&self, wavelength: f64, x: f64, y: f64) -> f64 {
        let proj = x * self.ux + y * self.uy;
        if self.spherical && self.distance.is_finite() {
            let f = self.distance;
            let uz = (1.0 - self.ux * self.ux - self.uy * self.uy).sqrt();
            let (dx, dy, dz) = (x - f * self.ux, y - f * self.uy, f * uz);
            let r = (dx * dx + dy * dy + dz * dz).sqrt();
            // r − F without cancellation.
            return wavenumber(wavelength) * (x * x + y * y - 2.0 * f * proj) / (r + f);
        }
        let quad = if self.distance.is_finite() {
            (x * x + y * y - proj * proj) / (2.0 * self.distance)
        } else {
            0.0
        };
        wavenumber(wavelength) * (quad - proj)
    }
}

/// Unit-modulus matched-filter weight at `(x, y)`.
pub fn matched_filter_phase(focus: &FocalPoint, wavelength: f64, x: f64, y: f64) -> Complex64 {
    Complex64::from_polar(1.0, focus.phase(wavelength, x, y))
}

/// Tensor Gauss–Legendre settings for integrals over elements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSpec {
    /// Points per axis per element.
    pub order: usize,
    /// Re-evaluate at doubled order to estimate the error.
    pub refine: bool,
    /// Accepted absolute change between the two passes.
    pub tol: f64,
    /// Maximum number of panel-halving steps when the estimate is too large.
    pub max_subdivisions: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            order: 8,
            refine: true,
            tol: 1e-8,
            max_subdivisions: 3,
        }
    }
}

impl QuadratureSpec {
    pub fn fixed(order: usize) -> Self {
        Self {
            order,
            refine: false,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.order < 2 {
            return Err(Error::invalid("quadrature order", "must be at least 2"));
        }
        if self.refine {
            positive("quadrature tol", self.tol)?;
        }
        Ok(())
    }

    /// Runs `eval` with `panels` sub-panels per element at `order` points,
    /// doubling the order and then halving panels until two successive
    /// passes agree within `tol`.
    pub(crate) fn converge<T, F>(&self, mut eval: F, diff: impl Fn(&T, &T) -> f64) -> Result<T>
    where
        F: FnMut(&GaussLegendre, usize) -> Result<T>,
    {
        self.validate()?;
        let rule = GaussLegendre::new(self.order)?;
        let first = eval(&rule, 1)?;
        if !self.refine {
            return Ok(first);
        }
        let fine = GaussLegendre::new(2 * self.order)?;
        let mut prev = first;
        let mut panels = 1;
        let mut estimate = f64::INFINITY;
        for _ in 0..=self.max_subdivisions {
            let next = eval(&fine, panels)?;
            estimate = diff(&prev, &next);
            if estimate <= self.tol {
                return Ok(next);
            }
            prev = next;
            panels *= 2;
        }
        Err(Error::QuadratureFailure {
            estimate,
            subdivisions: self.max_subdivisions,
        })
    }
}

/// Which field expression feeds channel coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum FieldModel {
    #[default]
    Fresnel,
    Exact,
}

/// Field at `(x, y)` under `model`.
pub fn field(model: FieldModel, tx: &TxGeometry, wavelength: f64, x: f64, y: f64) -> Result<Complex64> {
    match model {
        FieldModel::Exact => exact_field(tx, wavelength, x, y),
        FieldModel::Fresnel if tx.is_broadside() => Ok(fresnel_field_broadside(tx.dist(), wavelength, x, y)),
        FieldModel::Fresnel => Ok(fresnel_field_nonbroadside(tx, wavelength, x, y)),
    }
}

/// Channel response `h = A^(-1/2) ∫ E dx dy` of element `(n, m)`, 1-based.
pub fn element_channel(
    arr: &RectArray,
    n: usize,
    m: usize,
    tx: &TxGeometry,
    model: FieldModel,
    quad: &QuadratureSpec,
) -> Result<Complex64> {
    let (xc, yc) = arr.element_center(n, m)?;
    let (w, h) = (arr.elem_w(), arr.elem_h());
    let lambda = arr.wavelength();
    let scale = 1.0 / arr.elem_area().sqrt();
    let value = quad.converge(
        |rule, panels| {
            let px = crate::quadrature::composite(rule, xc - w / 2.0, xc + w / 2.0, panels);
            let py = crate::quadrature::composite(rule, yc - h / 2.0, yc + h / 2.0, panels);
            let mut acc = Complex64::new(0.0, 0.0);
            for &(x, wx) in &px {
                for &(y, wy) in &py {
                    acc += field(model, tx, lambda, x, y)? * (wx * wy);
                }
            }
            Ok(acc * scale)
        },
        |a, b| (a - b).norm() / b.norm().max(f64::MIN_POSITIVE),
    )?;
    Ok(value)
}

/// Euclidean distance from `tx` to the center of element `(n, m)`.
pub fn distance_exact(arr: &RectArray, n: usize, m: usize, tx: &TxGeometry) -> Result<f64> {
    let (x, y) = arr.element_center(n, m)?;
    let (xt, yt, z) = tx.position();
    Ok(((x - xt).powi(2) + (y - yt).powi(2) + z * z).sqrt())
}

/// First-order expansion around the broadside range `z`:
/// `z(1 + ((x − x_t)² + (y − y_t)²) / (2z²))`.
pub fn distance_taylor_direct(arr: &RectArray, n: usize, m: usize, tx: &TxGeometry) -> Result<f64> {
    let (x, y) = arr.element_center(n, m)?;
    Ok(taylor_direct(tx, x, y))
}

/// First-order expansion around the range `d`:
/// `d + (x² + y² − 2(x x_t + y y_t)) / (2d)`.
pub fn distance_taylor_indirect(arr: &RectArray, n: usize, m: usize, tx: &TxGeometry) -> Result<f64> {
    let (x, y) = arr.element_center(n, m)?;
    Ok(taylor_indirect(tx, x, y))
}

fn taylor_direct(tx: &TxGeometry, x: f64, y: f64) -> f64 {
    let (xt, yt, z) = tx.position();
    z * (1.0 + ((x - xt).powi(2) + (y - yt).powi(2)) / (2.0 * z * z))
}

fn taylor_indirect(tx: &TxGeometry, x: f64, y: f64) -> f64 {
    let (xt, yt, _) = tx.position();
    let d = tx.dist();
    d + (x * x + y * y - 2.0 * (x * xt + y * yt)) / (2.0 * d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaylorVariant {
    Direct,
    Indirect,
}

/// Mean over all element centers of `|exact − approximate|` distance, meters.
pub fn mean_abs_distance_error(arr: &RectArray, tx: &TxGeometry, variant: TaylorVariant) -> f64 {
    let (xt, yt, z) = tx.position();
    let mut total = 0.0;
    for x in arr.axis_centers(arr.elem_w()) {
        for y in arr.axis_centers(arr.elem_h()) {
            let exact = ((x - xt).powi(2) + (y - yt).powi(2) + z * z).sqrt();
            let approx = match variant {
                TaylorVariant::Direct => taylor_direct(tx, x, y),
                TaylorVariant::Indirect => taylor_indirect(tx, x, y),
            };
            total += (exact - approx).abs();
        }
    }
    total / arr.n_elements() as f64
}
