//! Aperture geometry: generalized rectangular arrays, circular apertures and
//! transmitter placement.

use crate::error::{positive, Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Reactive near-field boundary as a multiple of the aperture length.
pub const REACTIVE_LIMIT_FACTOR: f64 = 1.2;

pub fn wavelength_from_carrier(carrier_hz: f64) -> Result<f64> {
    Ok(SPEED_OF_LIGHT / positive("carrier_hz", carrier_hz)?)
}

/// Which quantity is held fixed when the element aspect ratio changes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Sizing {
    /// Diagonal `D` of a single element, meters.
    FixedElementDiagonal(f64),
    /// Total aperture area `N·w·ℓ`, square meters.
    FixedApertureArea(f64),
    /// Aperture diagonal `√N·D`, meters.
    FixedApertureLength(f64),
}

/// Uniform planar array of `n_per_side × n_per_side` rectangular elements
/// whose width is `eta` times their height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectArray {
    n_per_side: usize,
    eta: f64,
    elem_diag: f64,
    elem_h: f64,
    elem_w: f64,
    wavelength: f64,
}

/// The four distances that organize the radiative near-field of an array.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayDistances {
    /// Fraunhofer distance of one element, `2D²/λ`.
    pub d_f: f64,
    /// Fraunhofer distance of the array, `N·d_f`.
    pub d_fa: f64,
    /// Distance beyond which amplitude variation over the aperture is negligible, `2D√N`.
    pub d_b: f64,
    /// Largest focus with a finite 3 dB beam depth.
    pub bd_limit: f64,
}

impl RectArray {
    pub fn new(n_per_side: usize, eta: f64, sizing: Sizing, wavelength: f64) -> Result<Self> {
        if n_per_side == 0 {
            return Err(Error::invalid("n_per_side", "must be at least 1"));
        }
        let eta = positive("eta", eta)?;
        let wavelength = positive("wavelength", wavelength)?;
        let n = (n_per_side * n_per_side) as f64;
        let elem_diag = match sizing {
            Sizing::FixedElementDiagonal(d) => positive("element diagonal", d)?,
            Sizing::FixedApertureArea(area) => {
                let area = positive("aperture area", area)?;
                (area * (1.0 + eta * eta) / (n * eta)).sqrt()
            }
            Sizing::FixedApertureLength(len) => positive("aperture length", len)? / n.sqrt(),
        };
        let elem_h = elem_diag / (1.0 + eta * eta).sqrt();
        Ok(Self {
            n_per_side,
            eta,
            elem_diag,
            elem_h,
            elem_w: eta * elem_h,
            wavelength,
        })
    }

    /// Builds an array directly from element width and height.
    pub fn from_element_sides(
        n_per_side: usize,
        elem_w: f64,
        elem_h: f64,
        wavelength: f64,
    ) -> Result<Self> {
        if n_per_side == 0 {
            return Err(Error::invalid("n_per_side", "must be at least 1"));
        }
        let elem_w = positive("element width", elem_w)?;
        let elem_h = positive("element height", elem_h)?;
        Ok(Self {
            n_per_side,
            eta: elem_w / elem_h,
            elem_diag: elem_w.hypot(elem_h),
            elem_h,
            elem_w,
            wavelength: positive("wavelength", wavelength)?,
        })
    }

    pub fn n_per_side(&self) -> usize {
        self.n_per_side
    }
    pub fn n_elements(&self) -> usize {
        self.n_per_side * self.n_per_side
    }
    pub fn eta(&self) -> f64 {
        self.eta
    }
    pub fn elem_diag(&self) -> f64 {
        self.elem_diag
    }
    pub fn elem_h(&self) -> f64 {
        self.elem_h
    }
    pub fn elem_w(&self) -> f64 {
        self.elem_w
    }
    pub fn elem_area(&self) -> f64 {
        self.elem_w * self.elem_h
    }
    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }
    pub fn aperture_width(&self) -> f64 {
        self.n_per_side as f64 * self.elem_w
    }
    pub fn aperture_height(&self) -> f64 {
        self.n_per_side as f64 * self.elem_h
    }
    pub fn aperture_length(&self) -> f64 {
        self.n_per_side as f64 * self.elem_diag
    }
    pub fn aperture_area(&self) -> f64 {
        self.n_elements() as f64 * self.elem_area()
    }

    pub fn fraunhofer_distance(&self) -> f64 {
        2.0 * self.elem_diag * self.elem_diag / self.wavelength
    }
    pub fn array_fraunhofer_distance(&self) -> f64 {
        self.n_elements() as f64 * self.fraunhofer_distance()
    }
    pub fn uniform_amplitude_distance(&self) -> f64 {
        2.0 * self.aperture_length()
    }
    /// Start of the radiative near-field, `1.2·D_array`.
    pub fn reactive_limit(&self) -> f64 {
        REACTIVE_LIMIT_FACTOR * self.aperture_length()
    }

    pub fn characteristic_distances(&self, a3db: f64) -> Result<ArrayDistances> {
        let a3db = positive("a3db", a3db)?;
        let d_fa = self.array_fraunhofer_distance();
        Ok(ArrayDistances {
            d_f: self.fraunhofer_distance(),
            d_fa,
            d_b: self.uniform_amplitude_distance(),
            bd_limit: d_fa / (4.0 * a3db * (1.0 + self.eta * self.eta)),
        })
    }

    /// Center `(x_n, y_m)` of element `(n, m)`, both indices 1-based.
    pub fn element_center(&self, n: usize, m: usize) -> Result<(f64, f64)> {
        let size = self.n_per_side;
        if n == 0 || m == 0 || n > size || m > size {
            return Err(Error::IndexOutOfRange { n, m, size });
        }
        let mid = (size as f64 + 1.0) / 2.0;
        Ok((
            (n as f64 - mid) * self.elem_w,
            (m as f64 - mid) * self.elem_h,
        ))
    }

    /// Element-center offsets along one axis, indexed from 0.
    pub(crate) fn axis_centers(&self, pitch: f64) -> impl Iterator<Item = f64> {
        let mid = (self.n_per_side as f64 - 1.0) / 2.0;
        (0..self.n_per_side).map(move |i| (i as f64 - mid) * pitch)
    }

    /// Broadside-equivalent array seen from azimuth `phi`: width shrinks by
    /// `cos φ`, height is unchanged.
    pub fn project(&self, azimuth: f64) -> Result<Self> {
        if !azimuth.is_finite() || azimuth.abs() >= FRAC_PI_2 {
            return Err(Error::DegenerateProjection(azimuth));
        }
        Self::from_element_sides(
            self.n_per_side,
            self.elem_w * azimuth.cos(),
            self.elem_h,
            self.wavelength,
        )
    }
}

/// Continuous circular aperture of radius `R`.
///
/// Distances are reported in units of the Fraunhofer distance of the element
/// of a matched rectangular array with `reference_elements` elements and the
/// same aperture length `2R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircArray {
    radius: f64,
    wavelength: f64,
    reference_elements: usize,
}

impl CircArray {
    pub const DEFAULT_REFERENCE_ELEMENTS: usize = 10_000;

    pub fn new(radius: f64, wavelength: f64) -> Result<Self> {
        Self::with_reference(radius, wavelength, Self::DEFAULT_REFERENCE_ELEMENTS)
    }

    pub fn with_reference(radius: f64, wavelength: f64, reference_elements: usize) -> Result<Self> {
        if reference_elements == 0 {
            return Err(Error::invalid("reference_elements", "must be at least 1"));
        }
        Ok(Self {
            radius: positive("radius", radius)?,
            wavelength: positive("wavelength", wavelength)?,
            reference_elements,
        })
    }

    /// Circle inscribed in the diagonal of `arr`: `R = D_array / 2`.
    pub fn matched_to(arr: &RectArray) -> Self {
        Self {
            radius: arr.aperture_length() / 2.0,
            wavelength: arr.wavelength(),
            reference_elements: arr.n_elements(),
        }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }
    pub fn area(&self) -> f64 {
        std::f64::consts::PI * self.radius * self.radius
    }
    pub fn aperture_length(&self) -> f64 {
        2.0 * self.radius
    }
    pub fn uniform_amplitude_distance(&self) -> f64 {
        2.0 * self.aperture_length()
    }
    pub fn reactive_limit(&self) -> f64 {
        REACTIVE_LIMIT_FACTOR * self.aperture_length()
    }
    pub fn fraunhofer_reference(&self) -> f64 {
        let d = self.aperture_length() / (self.reference_elements as f64).sqrt();
        2.0 * d * d / self.wavelength
    }
}

/// Transmitter at distance `dist` from the array center, seen under azimuth
/// `φ` and elevation `θ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TxGeometry {
    dist: f64,
    azimuth: f64,
    elevation: f64,
}

impl TxGeometry {
    pub fn new(dist: f64, azimuth: f64, elevation: f64) -> Result<Self> {
        let dist = positive("distance", dist)?;
        for (name, angle) in [("azimuth", azimuth), ("elevation", elevation)] {
            if !angle.is_finite() || angle.abs() >= FRAC_PI_2 {
                return Err(Error::invalid(name, format!("|{angle}| must be < π/2")));
            }
        }
        Ok(Self {
            dist,
            azimuth,
            elevation,
        })
    }

    pub fn broadside(z: f64) -> Result<Self> {
        Self::new(z, 0.0, 0.0)
    }

    pub fn dist(&self) -> f64 {
        self.dist
    }
    pub fn azimuth(&self) -> f64 {
        self.azimuth
    }
    pub fn elevation(&self) -> f64 {
        self.elevation
    }

    /// Direction cosines `(x_t/d, y_t/d)` in the aperture plane.
    pub fn direction(&self) -> (f64, f64) {
        (
            self.azimuth.sin() * self.elevation.cos(),
            self.elevation.sin(),
        )
    }

    /// Cartesian position `(x_t, y_t, z)`.
    pub fn position(&self) -> (f64, f64, f64) {
        let (ux, uy) = self.direction();
        (
            self.dist * ux,
            self.dist * uy,
            self.dist * self.elevation.cos() * self.azimuth.cos(),
        )
    }

    pub fn is_broadside(&self) -> bool {
        self.azimuth == 0.0 && self.elevation == 0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lambda() -> f64 {
        wavelength_from_carrier(3e9).unwrap()
    }

    #[test]
    fn default_preset_distances() {
        let l = lambda();
        let arr = RectArray::new(100, 1.0, Sizing::FixedElementDiagonal(l / 4.0), l).unwrap();
        let rel = |a: f64, b: f64| ((a - b) / b).abs();
        assert!(rel(arr.aperture_length(), 25.0 * l) < 1e-12);
        assert!(rel(arr.fraunhofer_distance(), l / 8.0) < 1e-12);
        assert!(rel(arr.array_fraunhofer_distance(), 1250.0 * l) < 1e-12);
        assert!(rel(arr.uniform_amplitude_distance(), 50.0 * l) < 1e-12);
        assert!(rel(arr.uniform_amplitude_distance(), 400.0 * arr.fraunhofer_distance()) < 1e-12);
    }

    #[test]
    fn element_sides_respect_ratio_and_diagonal() {
        let arr = RectArray::new(10, 3.5, Sizing::FixedElementDiagonal(0.02), 0.1).unwrap();
        assert!(((arr.elem_w() / arr.elem_h()) - 3.5).abs() < 1e-12 * 3.5);
        let d2 = arr.elem_w().powi(2) + arr.elem_h().powi(2);
        assert!((d2 - 0.02f64.powi(2)).abs() < 1e-12 * 0.02f64.powi(2));
    }

    #[test]
    fn fixed_area_sizing_matches_diagonal_formula() {
        let l = lambda();
        let area = 1e4 * l * l / 32.0;
        let eta = 2.5;
        let arr = RectArray::new(100, eta, Sizing::FixedApertureArea(area), l).unwrap();
        let expected = (area * (1.0 + eta * eta) / eta).sqrt();
        assert!((arr.aperture_length() - expected).abs() < 1e-12 * expected);
        assert!((arr.aperture_area() - area).abs() < 1e-12 * area);
    }

    #[test]
    fn single_element_degenerates() {
        let arr = RectArray::new(1, 1.0, Sizing::FixedElementDiagonal(0.3), 0.1).unwrap();
        assert_eq!(arr.aperture_length(), 0.3);
        assert_eq!(arr.element_center(1, 1).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(RectArray::new(0, 1.0, Sizing::FixedElementDiagonal(0.1), 0.1).is_err());
        assert!(RectArray::new(4, -1.0, Sizing::FixedElementDiagonal(0.1), 0.1).is_err());
        assert!(RectArray::new(4, 1.0, Sizing::FixedApertureArea(f64::NAN), 0.1).is_err());
        assert!(RectArray::new(4, 1.0, Sizing::FixedElementDiagonal(0.1), 0.0).is_err());
        assert!(TxGeometry::new(1.0, FRAC_PI_2, 0.0).is_err());
        assert!(TxGeometry::new(0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn element_centers() {
        let l = lambda();
        let arr = RectArray::new(101, 1.0, Sizing::FixedElementDiagonal(l / 4.0), l).unwrap();
        assert_eq!(arr.element_center(51, 51).unwrap(), (0.0, 0.0));
        assert!(arr.element_center(0, 3).is_err());
        assert!(arr.element_center(3, 102).is_err());

        let arr = RectArray::new(100, 1.0, Sizing::FixedElementDiagonal(l / 4.0), l).unwrap();
        let w = l / (4.0 * 2f64.sqrt());
        let (x, y) = arr.element_center(1, 1).unwrap();
        assert!((x + 49.5 * w).abs() < 1e-15 && (y + 49.5 * w).abs() < 1e-15);

        let (mut sx, mut sy) = (0.0, 0.0);
        for n in 1..=100 {
            for m in 1..=100 {
                let (x, y) = arr.element_center(n, m).unwrap();
                sx += x;
                sy += y;
            }
        }
        let tol = 1e-9 * arr.aperture_length();
        assert!(sx.abs() < tol && sy.abs() < tol);
    }

    #[test]
    fn projection() {
        let l = lambda();
        let arr = RectArray::new(100, 1.0, Sizing::FixedElementDiagonal(l / 4.0), l).unwrap();
        assert_eq!(arr.project(0.0).unwrap(), arr);
        let p = arr.project(std::f64::consts::FRAC_PI_3).unwrap();
        assert!((p.eta() - 0.5).abs() < 1e-12);
        assert_eq!(p.elem_h(), arr.elem_h());
        let near_endfire = arr.project(FRAC_PI_2 - 1e-9).unwrap();
        assert!((near_endfire.aperture_length() - arr.aperture_height()).abs() < 1e-9);
        assert!(matches!(arr.project(FRAC_PI_2), Err(Error::DegenerateProjection(_))));
    }

    #[test]
    fn tx_position_components() {
        let tx = TxGeometry::new(10.0, 0.3, 0.2).unwrap();
        let (x, y, z) = tx.position();
        assert!((x - 10.0 * 0.3f64.sin() * 0.2f64.cos()).abs() < 1e-14);
        assert!((y - 10.0 * 0.2f64.sin()).abs() < 1e-14);
        assert!((z - 10.0 * 0.2f64.cos() * 0.3f64.cos()).abs() < 1e-14);
        assert!(((x * x + y * y + z * z).sqrt() - 10.0).abs() < 1e-12);
    }
}
