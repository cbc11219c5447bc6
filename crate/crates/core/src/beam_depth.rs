//! 3 dB beam depth: the half-power defocus solver, closed-form depths and
//! finite-depth limits, numeric extraction from sampled profiles, and the
//! null and sidelobe catalog of the circular aperture.

use crate::error::{positive, Error, Result};
use crate::fresnel::sinc2_half_power_argument;
use crate::gain::{analytic_gain_circ, analytic_gain_rect, to_db, GainProfile};
use crate::geometry::{CircArray, RectArray};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Default tolerance on the half-power gain used by the closed forms.
pub const A3DB_TOL: f64 = 1e-12;

/// Smallest `a > 0` with `analytic_gain_rect(eta, a) = 0.5`.
pub fn solve_a3db(eta: f64, tol: f64) -> Result<f64> {
    let eta = positive("eta", eta)?;
    let tol = positive("tol", tol)?;
    let gain = |a: f64| analytic_gain_rect(eta, a);
    let mut lo = 0.0;
    let mut hi = 0.1 / eta.max(1.0).powi(2);
    while gain(hi) >= 0.5 {
        lo = hi;
        hi *= 1.05;
        if hi > 1e12 {
            return Err(Error::Bracketing(eta));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if gain(mid) >= 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    let root = 0.5 * (lo + hi);
    if (gain(root) - 0.5).abs() > tol {
        return Err(Error::Bracketing(eta));
    }
    Ok(root)
}

/// Circular half-power coefficient `2 x / π`, where `sinc²(x) = 1/2`
/// (≈ 0.886).
pub fn circ_half_power_coefficient() -> f64 {
    2.0 * sinc2_half_power_argument() / PI
}

/// Half-power interval around a focus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamDepthResult {
    pub focus: f64,
    pub z_lo: f64,
    /// Infinite when the focus lies beyond `finite_limit`.
    pub z_hi: f64,
    pub depth: f64,
    pub finite_limit: f64,
    /// False when the focus is closer than the uniform-amplitude distance, where the
    /// closed forms lose accuracy.
    pub within_validity: bool,
}

impl BeamDepthResult {
    pub fn is_infinite(&self) -> bool {
        self.z_hi.is_infinite()
    }

    fn from_curvature(focus: f64, width: f64, within_validity: bool) -> Self {
        let inv_f = 1.0 / focus;
        let z_lo = 1.0 / (inv_f + width);
        let z_hi = if width < inv_f {
            1.0 / (inv_f - width)
        } else {
            f64::INFINITY
        };
        Self {
            focus,
            z_lo,
            z_hi,
            depth: z_hi - z_lo,
            finite_limit: 1.0 / width,
            within_validity,
        }
    }
}

fn rect_width(arr: &RectArray, a3db: f64) -> f64 {
    4.0 * a3db * (1.0 + arr.eta().powi(2)) / arr.array_fraunhofer_distance()
}

/// Closed-form 3 dB beam depth of a rectangular array focused at `focus`.
pub fn bd_rect(arr: &RectArray, focus: f64) -> Result<BeamDepthResult> {
    bd_rect_with(arr, focus, solve_a3db(arr.eta(), A3DB_TOL)?)
}

/// As [`bd_rect`] with a precomputed half-power defocus.
pub fn bd_rect_with(arr: &RectArray, focus: f64, a3db: f64) -> Result<BeamDepthResult> {
    let focus = positive("focus", focus)?;
    let a3db = positive("a3db", a3db)?;
    Ok(BeamDepthResult::from_curvature(
        focus,
        rect_width(arr, a3db),
        focus >= arr.uniform_amplitude_distance(),
    ))
}

/// Focus beyond which the rectangular beam depth is infinite.
pub fn finite_bd_limit_rect(arr: &RectArray) -> Result<f64> {
    Ok(1.0 / rect_width(arr, solve_a3db(arr.eta(), A3DB_TOL)?))
}

/// Closed-form 3 dB beam depth of a circular aperture.
pub fn bd_circ(circ: &CircArray, focus: f64) -> Result<BeamDepthResult> {
    let focus = positive("focus", focus)?;
    let width = circ_half_power_coefficient() * circ.wavelength() / circ.radius().powi(2);
    Ok(BeamDepthResult::from_curvature(
        focus,
        width,
        focus >= circ.uniform_amplitude_distance(),
    ))
}

pub fn finite_bd_limit_circ(circ: &CircArray) -> f64 {
    circ.radius().powi(2) / (circ_half_power_coefficient() * circ.wavelength())
}

/// Outcome of a half-power search on a sampled profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NumericBeamDepth {
    Interval { z_lo: f64, z_hi: f64 },
    /// Gain stays above half power beyond the focus out to the grid end.
    Infinite { z_lo: f64 },
    /// No bracketing crossing on the grid.
    Undetermined,
}

impl NumericBeamDepth {
    pub fn depth(&self) -> Option<f64> {
        match *self {
            NumericBeamDepth::Interval { z_lo, z_hi } => Some(z_hi - z_lo),
            NumericBeamDepth::Infinite { .. } => Some(f64::INFINITY),
            NumericBeamDepth::Undetermined => None,
        }
    }
}

pub type GainFn<'a> = &'a dyn Fn(f64) -> Result<f64>;

/// Half-power interval of `profile` around its peak.
///
/// Crossings are bracketed by consecutive samples and refined by bisection
/// on `gain` to 1e-4 relative, or linearly interpolated when `gain` is
/// `None`. An upper side that never drops counts as infinite only if the
/// grid reaches `100 · finite_limit`.
pub fn numeric_bd(profile: &GainProfile, gain: Option<GainFn>, finite_limit: Option<f64>) -> Result<NumericBeamDepth> {
    let s = profile.samples();
    let (imax, &(_, gmax)) = s
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .expect("profile is non-empty");
    if gmax < 0.9 {
        return Ok(NumericBeamDepth::Undetermined);
    }
    let mut peak = gmax;
    if let Some(g) = gain {
        let lo = s[imax.saturating_sub(1)].0;
        let hi = s[(imax + 1).min(s.len() - 1)].0;
        peak = peak.max(golden_max(|z| g(z).unwrap_or(f64::NEG_INFINITY), lo, hi, 1e-9 * hi)?.1);
    }
    let half = 0.5 * peak;
    let crossing = |i: usize, j: usize| -> Result<f64> {
        let (za, ga) = s[i];
        let (zb, gb) = s[j];
        match gain {
            Some(g) => bisect_crossing(g, za, zb, ga - half, half),
            None => Ok(za + (half - ga) * (zb - za) / (gb - ga)),
        }
    };
    let lower = (1..=imax).rev().find(|&i| s[i - 1].1 < half);
    let z_lo = match lower {
        Some(i) => crossing(i - 1, i)?,
        None => return Ok(NumericBeamDepth::Undetermined),
    };
    match (imax..s.len() - 1).find(|&i| s[i + 1].1 < half) {
        Some(i) => Ok(NumericBeamDepth::Interval {
            z_lo,
            z_hi: crossing(i, i + 1)?,
        }),
        None => match finite_limit {
            Some(limit) if s[s.len() - 1].0 >= 100.0 * limit => Ok(NumericBeamDepth::Infinite { z_lo }),
            _ => Ok(NumericBeamDepth::Undetermined),
        },
    }
}

fn bisect_crossing(g: GainFn, mut a: f64, mut b: f64, fa: f64, half: f64) -> Result<f64> {
    let sign_a = fa > 0.0;
    while (b - a).abs() > 1e-6 * a.abs().max(b.abs()) {
        let mid = 0.5 * (a + b);
        if (g(mid)? - half > 0.0) == sign_a {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<(f64, f64)> {
    if !(hi >= lo) {
        return Err(Error::invalid("golden search", "needs hi >= lo"));
    }
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        }
    }
    let x = 0.5 * (lo + hi);
    Ok((x, f(x)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LobeKind {
    Null,
    LobePeak,
}

impl LobeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            LobeKind::Null => "null",
            LobeKind::LobePeak => "lobe-peak",
        }
    }
}

/// A null or sidelobe peak of the circular gain along range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LobeEntry {
    pub index: usize,
    pub kind: LobeKind,
    pub l_value: f64,
    pub z_eff: f64,
    /// Range in front of the focus.
    pub z_near: f64,
    /// Range behind the focus, when one exists.
    pub z_far: Option<f64>,
    pub gain_db: f64,
}

/// Nulls at `l = 1..=k_max` and the sidelobe peak following each.
pub fn circ_lobe_catalog(circ: &CircArray, focus: f64, k_max: usize) -> Result<Vec<LobeEntry>> {
    let focus = positive("focus", focus)?;
    if k_max == 0 {
        return Err(Error::invalid("k_max", "must be at least 1"));
    }
    let r2 = circ.radius().powi(2);
    let lambda = circ.wavelength();
    let entry = |index: usize, kind: LobeKind, l: f64, gain_db: f64| {
        let z_eff = r2 / (2.0 * lambda * l);
        let far = 1.0 / focus - 1.0 / z_eff;
        LobeEntry {
            index,
            kind,
            l_value: l,
            z_eff,
            z_near: 1.0 / (1.0 / focus + 1.0 / z_eff),
            z_far: (far > 0.0).then(|| 1.0 / far),
            gain_db,
        }
    };
    let mut out = Vec::with_capacity(2 * k_max);
    for k in 1..=k_max {
        out.push(entry(k, LobeKind::Null, k as f64, f64::NEG_INFINITY));
        let (l, g) = golden_max(analytic_gain_circ, k as f64, k as f64 + 1.0, 1e-12)?;
        out.push(entry(k, LobeKind::LobePeak, l, to_db(g)));
    }
    Ok(out)
}
