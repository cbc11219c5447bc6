//! JSON experiment configuration: quantities with explicit units, sweep
//! grids, and the geometry block.

use crate::error::{Error, Result};
use crate::geometry::{wavelength_from_carrier, CircArray, RectArray, Sizing};
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

fn bad(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn split_number(s: &str) -> Result<(f64, &str)> {
    let s = s.trim();
    let end = s
        .char_indices()
        .find(|&(i, c)| {
            !(c.is_ascii_digit() || c == '.' || c == '+' || c == '-'
                || ((c == 'e' || c == 'E') && i > 0 && s[i + 1..].starts_with(|n: char| n.is_ascii_digit() || n == '-' || n == '+')))
        })
        .map(|(i, _)| i)
        .unwrap_or(s.len());
    let value = s[..end]
        .parse::<f64>()
        .map_err(|_| bad(format!("`{s}`: expected a number followed by a unit")))?;
    Ok((value, s[end..].trim()))
}

macro_rules! string_quantity {
    ($ty:ty) => {
        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(de::Error::custom)
            }
        }
        impl Serialize for $ty {
            fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }
    };
}

/// Distance with an explicit unit: `m`, `lambda`, `dF` (element Fraunhofer
/// distance), `dB` (uniform-amplitude distance `2D√N`) or `dFA` (array Fraunhofer distance),
/// or `inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distance {
    Meters(f64),
    Wavelengths(f64),
    Fraunhofer(f64),
    UniformAmplitude(f64),
    ArrayFraunhofer(f64),
    Infinite,
}

/// Reference distances used to resolve relative units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceUnits {
    pub wavelength: f64,
    pub d_f: f64,
    pub d_b: f64,
    pub d_fa: f64,
}

impl DistanceUnits {
    pub fn of_rect(arr: &RectArray) -> Self {
        Self {
            wavelength: arr.wavelength(),
            d_f: arr.fraunhofer_distance(),
            d_b: arr.uniform_amplitude_distance(),
            d_fa: arr.array_fraunhofer_distance(),
        }
    }

    pub fn of_circ(circ: &CircArray) -> Self {
        Self {
            wavelength: circ.wavelength(),
            d_f: circ.fraunhofer_reference(),
            d_b: circ.uniform_amplitude_distance(),
            d_fa: 2.0 * circ.aperture_length().powi(2) / circ.wavelength(),
        }
    }
}

impl Distance {
    pub fn meters(&self, units: &DistanceUnits) -> f64 {
        match *self {
            Distance::Meters(v) => v,
            Distance::Wavelengths(v) => v * units.wavelength,
            Distance::Fraunhofer(v) => v * units.d_f,
            Distance::UniformAmplitude(v) => v * units.d_b,
            Distance::ArrayFraunhofer(v) => v * units.d_fa,
            Distance::Infinite => f64::INFINITY,
        }
    }

    /// Resolves to a finite, positive length.
    pub fn finite(&self, units: &DistanceUnits, name: &str) -> Result<f64> {
        let v = self.meters(units);
        if v.is_finite() && v > 0.0 {
            Ok(v)
        } else {
            Err(bad(format!("{name}: `{self}` must resolve to a finite distance > 0")))
        }
    }
}

impl FromStr for Distance {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("inf") {
            return Ok(Distance::Infinite);
        }
        let (v, unit) = split_number(s)?;
        match unit {
            "m" => Ok(Distance::Meters(v)),
            "lambda" => Ok(Distance::Wavelengths(v)),
            "dF" => Ok(Distance::Fraunhofer(v)),
            "dB" => Ok(Distance::UniformAmplitude(v)),
            "dFA" => Ok(Distance::ArrayFraunhofer(v)),
            "" => Err(bad(format!("`{s}`: distance needs a unit (m, lambda, dF, dB or dFA)"))),
            other => Err(bad(format!("`{s}`: unknown distance unit `{other}`"))),
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Meters(v) => write!(f, "{v}m"),
            Distance::Wavelengths(v) => write!(f, "{v}lambda"),
            Distance::Fraunhofer(v) => write!(f, "{v}dF"),
            Distance::UniformAmplitude(v) => write!(f, "{v}dB"),
            Distance::ArrayFraunhofer(v) => write!(f, "{v}dFA"),
            Distance::Infinite => write!(f, "inf"),
        }
    }
}

string_quantity!(Distance);

/// Length in `m` or wavelengths (`lambda`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Length {
    Meters(f64),
    Wavelengths(f64),
}

impl Length {
    pub fn meters(&self, wavelength: f64) -> f64 {
        match *self {
            Length::Meters(v) => v,
            Length::Wavelengths(v) => v * wavelength,
        }
    }
}

impl FromStr for Length {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match split_number(s)? {
            (v, "m") => Ok(Length::Meters(v)),
            (v, "lambda") => Ok(Length::Wavelengths(v)),
            _ => Err(bad(format!("`{s}`: length needs unit m or lambda"))),
        }
    }
}

impl fmt::Display for Length {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Length::Meters(v) => write!(f, "{v}m"),
            Length::Wavelengths(v) => write!(f, "{v}lambda"),
        }
    }
}

string_quantity!(Length);

/// Area in `m2` or square wavelengths (`lambda2`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Area {
    SquareMeters(f64),
    SquareWavelengths(f64),
}

impl Area {
    pub fn square_meters(&self, wavelength: f64) -> f64 {
        match *self {
            Area::SquareMeters(v) => v,
            Area::SquareWavelengths(v) => v * wavelength * wavelength,
        }
    }
}

impl FromStr for Area {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match split_number(s)? {
            (v, "m2") => Ok(Area::SquareMeters(v)),
            (v, "lambda2") => Ok(Area::SquareWavelengths(v)),
            _ => Err(bad(format!("`{s}`: area needs unit m2 or lambda2"))),
        }
    }
}

impl fmt::Display for Area {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Area::SquareMeters(v) => write!(f, "{v}m2"),
            Area::SquareWavelengths(v) => write!(f, "{v}lambda2"),
        }
    }
}

string_quantity!(Area);

/// Angle given as radians (number) or as a string such as `"pi/16"`,
/// `"-3pi/8"`, `"0.2rad"` or `"15deg"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
pub struct Angle(pub f64);

impl FromStr for Angle {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Some(deg) = t.strip_suffix("deg") {
            let v: f64 = deg.trim().parse().map_err(|_| bad(format!("`{s}`: bad angle")))?;
            return Ok(Angle(v.to_radians()));
        }
        if let Some(pos) = t.find("pi") {
            let coef = match t[..pos].trim() {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c.parse::<f64>().map_err(|_| bad(format!("`{s}`: bad angle")))?,
            };
            let den = match t[pos + 2..].trim() {
                "" => 1.0,
                rest => rest
                    .strip_prefix('/')
                    .and_then(|d| d.trim().parse::<f64>().ok())
                    .ok_or_else(|| bad(format!("`{s}`: bad angle")))?,
            };
            return Ok(Angle(coef * PI / den));
        }
        let v = t.strip_suffix("rad").unwrap_or(t).trim();
        v.parse().map(Angle).map_err(|_| bad(format!("`{s}`: bad angle")))
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Angle(v)),
            Raw::Text(s) => s.parse().map_err(de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

/// Sweep grid: explicit `values`, or `start`/`stop`/`points` with linear or
/// logarithmic spacing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid<T> {
    Values {
        values: Vec<T>,
    },
    Range {
        start: T,
        stop: T,
        points: usize,
        #[serde(default)]
        spacing: Spacing,
    },
}

impl<T: Copy> Grid<T> {
    pub fn resolve(&self, name: &str, to_f64: impl Fn(&T) -> Result<f64>) -> Result<Vec<f64>> {
        let out = match self {
            Grid::Values { values } => values.iter().map(&to_f64).collect::<Result<Vec<_>>>()?,
            Grid::Range { start, stop, points, spacing } => {
                let (a, b) = (to_f64(start)?, to_f64(stop)?);
                if *points == 0 {
                    return Err(bad(format!("{name}: empty sweep grid")));
                }
                match spacing {
                    Spacing::Linear => crate::gain::lin_grid(a, b, *points),
                    Spacing::Log => crate::gain::log_grid(a, b, *points),
                }
                .map_err(|e| bad(format!("{name}: {e}")))?
            }
        };
        if out.is_empty() {
            return Err(bad(format!("{name}: empty sweep grid")));
        }
        if out.iter().any(|v| !v.is_finite()) {
            return Err(bad(format!("{name}: grid values must be finite")));
        }
        Ok(out)
    }

    pub fn range(start: T, stop: T, points: usize, spacing: Spacing) -> Self {
        Grid::Range { start, stop, points, spacing }
    }
}

impl Grid<Distance> {
    pub fn meters(&self, name: &str, units: &DistanceUnits) -> Result<Vec<f64>> {
        let v = self.resolve(name, |d| d.finite(units, name))?;
        if v.windows(2).any(|w| w[1] <= w[0]) {
            return Err(bad(format!("{name}: distances must be strictly increasing")));
        }
        Ok(v)
    }
}

impl Grid<Angle> {
    pub fn radians(&self, name: &str) -> Result<Vec<f64>> {
        self.resolve(name, |a| Ok(a.0))
    }
}

impl Grid<f64> {
    pub fn positive(&self, name: &str) -> Result<Vec<f64>> {
        let v = self.resolve(name, |&x| Ok(x))?;
        if v.iter().any(|&x| x <= 0.0) {
            return Err(bad(format!("{name}: values must be > 0")));
        }
        Ok(v)
    }
}

impl Grid<usize> {
    pub fn counts(&self, name: &str) -> Result<Vec<usize>> {
        let v = self.resolve(name, |&x| Ok(x as f64))?;
        Ok(v.iter().map(|&x| x.round() as usize).collect())
    }
}

/// How element sizes follow the aspect ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "value", rename_all = "kebab-case")]
pub enum SizingConfig {
    ElementDiagonal(Length),
    ApertureArea(Area),
    ApertureLength(Length),
}

impl SizingConfig {
    pub fn resolve(&self, wavelength: f64) -> Sizing {
        match *self {
            SizingConfig::ElementDiagonal(l) => Sizing::FixedElementDiagonal(l.meters(wavelength)),
            SizingConfig::ApertureArea(a) => Sizing::FixedApertureArea(a.square_meters(wavelength)),
            SizingConfig::ApertureLength(l) => Sizing::FixedApertureLength(l.meters(wavelength)),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            SizingConfig::ElementDiagonal(_) => "element-diagonal",
            SizingConfig::ApertureArea(_) => "aperture-area",
            SizingConfig::ApertureLength(_) => "aperture-length",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub n_per_side: usize,
    #[serde(default = "one")]
    pub eta: f64,
    pub sizing: SizingConfig,
    pub carrier_hz: f64,
}

fn one() -> f64 {
    1.0
}

impl GeometryConfig {
    pub fn wavelength(&self) -> Result<f64> {
        wavelength_from_carrier(self.carrier_hz)
    }

    pub fn array(&self) -> Result<RectArray> {
        self.array_with_eta(self.eta)
    }

    pub fn array_with_eta(&self, eta: f64) -> Result<RectArray> {
        let l = self.wavelength()?;
        RectArray::new(self.n_per_side, eta, self.sizing.resolve(l), l)
    }

    pub fn array_with_sizing(&self, eta: f64, sizing: &SizingConfig) -> Result<RectArray> {
        let l = self.wavelength()?;
        RectArray::new(self.n_per_side, eta, sizing.resolve(l), l)
    }
}
