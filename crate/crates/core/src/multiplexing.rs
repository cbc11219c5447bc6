//! Distance-domain multiplexing: focal-point planning on non-overlapping
//! 3 dB intervals, channel matrices, MMSE precoding and sum rates.

use crate::beam_depth::{bd_rect_with, finite_bd_limit_rect, solve_a3db, A3DB_TOL};
use crate::error::{positive, Error, Result};
use crate::field::{element_channel, field, FieldModel, QuadratureSpec};
use crate::geometry::{RectArray, TxGeometry};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::RngExt;
use rand_pcg::Pcg64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub type CMatrix = DMatrix<Complex64>;

/// Focal points with their half-power intervals, nearest user last.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementPlan {
    pub focal_points: Vec<f64>,
    pub intervals: Vec<(f64, f64)>,
}

impl PlacementPlan {
    pub fn len(&self) -> usize {
        self.focal_points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.focal_points.is_empty()
    }

    pub fn users(&self) -> Result<Vec<TxGeometry>> {
        self.focal_points.iter().map(|&f| TxGeometry::broadside(f)).collect()
    }
}

/// Greedy outside-in placement: the first interval ends at `z_max`, each
/// following interval ends where the previous one begins, and planning
/// stops once a focus would fall below `z_min` or `max_users` is reached.
pub fn plan_focal_points(arr: &RectArray, z_min: f64, z_max: f64, max_users: usize) -> Result<PlacementPlan> {
    let z_min = positive("z_min", z_min)?;
    let z_max = positive("z_max", z_max)?;
    let mut plan = PlacementPlan {
        focal_points: Vec::new(),
        intervals: Vec::new(),
    };
    if z_max <= z_min || max_users == 0 {
        return Ok(plan);
    }
    let limit = finite_bd_limit_rect(arr)?;
    if z_max > limit * (1.0 + 1e-12) {
        return Err(Error::invalid(
            "z_max",
            format!("{z_max} m exceeds the finite beam-depth limit {limit} m"),
        ));
    }
    let a3db = solve_a3db(arr.eta(), A3DB_TOL)?;
    let half_width = 1.0 / limit;
    let mut upper = 1.0 / z_max;
    while plan.len() < max_users {
        let focus = 1.0 / (upper + half_width);
        if focus < z_min {
            break;
        }
        let bd = bd_rect_with(arr, focus, a3db)?;
        plan.focal_points.push(focus);
        plan.intervals.push((bd.z_lo, bd.z_hi.min(z_max)));
        upper += 2.0 * half_width;
    }
    Ok(plan)
}

/// How each element integrates the field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Integration {
    /// Field at the element center times the element area.
    #[default]
    Midpoint,
    Quadrature(QuadratureSpec),
}

/// Scale applied to channel coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelScale {
    /// `h = A^(-1/2) ∫ E`, the physical response of each element.
    Physical,
    /// Physical response times `sqrt(4π) z / sqrt(A)`, so a midpoint Fresnel
    /// channel has unit-modulus entries.
    #[default]
    UnitFarField,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct ChannelOptions {
    pub field: FieldModel,
    pub integration: Integration,
    pub scale: ChannelScale,
}

/// `N × K` channel matrix, row `(n − 1)·√N + (m − 1)` for element `(n, m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix(pub CMatrix);

impl ChannelMatrix {
    pub fn users(&self) -> usize {
        self.0.ncols()
    }

    pub fn elements(&self) -> usize {
        self.0.nrows()
    }

    pub fn gram(&self) -> CMatrix {
        self.0.adjoint() * &self.0
    }
}

fn column_scale(arr: &RectArray, tx: &TxGeometry, scale: ChannelScale) -> f64 {
    match scale {
        ChannelScale::Physical => 1.0,
        ChannelScale::UnitFarField => (4.0 * PI).sqrt() * tx.position().2 / arr.elem_area().sqrt(),
    }
}

/// Assembles the channel matrix for `users`. Per-user failures are reported
/// with the user index.
pub fn build_channel_matrix(arr: &RectArray, users: &[TxGeometry], opts: &ChannelOptions) -> Result<ChannelMatrix> {
    if users.is_empty() {
        return Err(Error::invalid("users", "need at least one user"));
    }
    let side = arr.n_per_side();
    let n = arr.n_elements();
    let columns = crate::gain::sweep_values(users, |_, tx| {
        if tx.dist() < arr.reactive_limit() {
            return Err(Error::ReactiveNearField {
                distance: tx.dist(),
                minimum: arr.reactive_limit(),
            });
        }
        let s = column_scale(arr, tx, opts.scale);
        let sqrt_a = arr.elem_area().sqrt();
        let mut col = Vec::with_capacity(n);
        for i in 1..=side {
            for j in 1..=side {
                let h = match opts.integration {
                    Integration::Midpoint => {
                        let (x, y) = arr.element_center(i, j)?;
                        field(opts.field, tx, arr.wavelength(), x, y)? * sqrt_a
                    }
                    Integration::Quadrature(q) => element_channel(arr, i, j, tx, opts.field, &q)?,
                };
                col.push(h * s);
            }
        }
        if col.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite("channel column"));
        }
        Ok(col)
    })?;
    Ok(ChannelMatrix(CMatrix::from_fn(n, users.len(), |r, c| columns[c][r])))
}

/// Gram matrix `HᴴH` of the midpoint Fresnel channel, using the separable
/// form of the Fresnel phase; costs `O(K² √N)`.
pub fn fresnel_gram(arr: &RectArray, users: &[TxGeometry], scale: ChannelScale) -> Result<CMatrix> {
    let k = 2.0 * PI / arr.wavelength();
    let xs: Vec<f64> = arr.axis_centers(arr.elem_w()).collect();
    let ys: Vec<f64> = arr.axis_centers(arr.elem_h()).collect();
    let amp: Vec<f64> = users
        .iter()
        .map(|tx| {
            let physical = arr.elem_area().sqrt() / ((4.0 * PI).sqrt() * tx.position().2);
            physical * column_scale(arr, tx, scale)
        })
        .collect();
    // conj(a_i(x)) a_j(x) with a(x) = exp(-jk(x²/(2d) − x u)).
    let axis = |pts: &[f64], ci: f64, ui: f64, cj: f64, uj: f64| -> Complex64 {
        let (dc, du) = (ci - cj, ui - uj);
        pts.iter()
            .map(|&x| Complex64::from_polar(1.0, k * (x * x * dc - x * du)))
            .sum()
    };
    let kk = users.len();
    let mut g = CMatrix::zeros(kk, kk);
    for i in 0..kk {
        for j in i..kk {
            let (ui, uj) = (&users[i], &users[j]);
            let (uxi, uyi) = ui.direction();
            let (uxj, uyj) = uj.direction();
            let (ci, cj) = (0.5 / ui.dist(), 0.5 / uj.dist());
            let v = Complex64::from_polar(amp[i] * amp[j], k * (ui.dist() - uj.dist()))
                * axis(&xs, ci, uxi, cj, uxj)
                * axis(&ys, ci, uyi, cj, uyj);
            g[(i, j)] = v;
            g[(j, i)] = v.conj();
        }
    }
    Ok(g)
}

/// Power normalization of the MMSE precoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PrecoderNorm {
    /// `α = 1 / ‖H (HᴴH + I)⁻¹‖_F`: unit total transmit power.
    #[default]
    Precoder,
    /// `α = 1 / ‖H‖_F`.
    Channel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Precoder {
    pub w: CMatrix,
    pub alpha: f64,
}

fn regularized_inverse(gram: &CMatrix) -> Result<CMatrix> {
    let k = gram.nrows();
    let reg = gram + CMatrix::identity(k, k);
    let chol = reg.cholesky().ok_or(Error::Solve("HᴴH + I is not positive definite"))?;
    Ok(chol.inverse())
}

/// `W = α H (HᴴH + I)⁻¹`, solving only the `K × K` system.
pub fn mmse_precoder(h: &ChannelMatrix, norm: PrecoderNorm) -> Result<Precoder> {
    if h.users() > h.elements() {
        return Err(Error::DimensionMismatch(format!(
            "{} users exceed {} elements",
            h.users(),
            h.elements()
        )));
    }
    if h.0.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::NonFinite("channel matrix"));
    }
    let x = regularized_inverse(&h.gram())?;
    let unscaled = &h.0 * x;
    let denom = match norm {
        PrecoderNorm::Precoder => unscaled.norm(),
        PrecoderNorm::Channel => h.0.norm(),
    };
    let alpha = 1.0 / denom;
    if !alpha.is_finite() {
        return Err(Error::NonFinite("precoder normalization"));
    }
    Ok(Precoder {
        w: unscaled * Complex64::new(alpha, 0.0),
        alpha,
    })
}

/// Per-user SINR from the `K × K` effective channel `M = HᴴW`, where
/// `M[(k, j)] = h_kᴴ w_j`.
pub fn sinrs_from_effective(m: &CMatrix, powers: &[f64]) -> Result<Vec<f64>> {
    let k = m.nrows();
    if m.ncols() != k || powers.len() != k {
        return Err(Error::DimensionMismatch(format!(
            "{} powers for a {}x{} effective channel",
            powers.len(),
            m.nrows(),
            m.ncols()
        )));
    }
    if powers.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
        return Err(Error::invalid("powers", "must be finite and >= 0"));
    }
    Ok((0..k)
        .map(|u| {
            let signal = powers[u] * m[(u, u)].norm_sqr();
            let interference: f64 = (0..k)
                .filter(|&j| j != u)
                .map(|j| powers[j] * m[(u, j)].norm_sqr())
                .sum();
            signal / (interference + 1.0)
        })
        .collect())
}

pub fn sinrs(h: &ChannelMatrix, w: &Precoder, powers: &[f64]) -> Result<Vec<f64>> {
    if w.w.nrows() != h.elements() || w.w.ncols() != h.users() {
        return Err(Error::DimensionMismatch("precoder and channel shapes differ".into()));
    }
    sinrs_from_effective(&(h.0.adjoint() * &w.w), powers)
}

/// Achievable sum rate in bit/s/Hz.
pub fn sum_rate(h: &ChannelMatrix, w: &Precoder, powers: &[f64]) -> Result<f64> {
    Ok(sinrs(h, w, powers)?.iter().map(|s| (1.0 + s).log2()).sum())
}

/// Sum rate under MMSE precoding computed from the Gram matrix alone:
/// `HᴴW = α G (G + I)⁻¹` and `‖H (G + I)⁻¹‖_F² = tr(X G X)`.
pub fn sum_rate_from_gram(gram: &CMatrix, powers: &[f64], norm: PrecoderNorm) -> Result<f64> {
    let x = regularized_inverse(gram)?;
    let gx = gram * &x;
    let denom_sq = match norm {
        PrecoderNorm::Precoder => (&x * &gx).trace().re,
        PrecoderNorm::Channel => gram.trace().re,
    };
    let alpha = 1.0 / denom_sq.sqrt();
    if !alpha.is_finite() {
        return Err(Error::NonFinite("precoder normalization"));
    }
    let m = gx * Complex64::new(alpha, 0.0);
    Ok(sinrs_from_effective(&m, powers)?.iter().map(|s| (1.0 + s).log2()).sum())
}

pub fn snr_db_to_power(snr_db: f64) -> f64 {
    10f64.powf(snr_db / 10.0)
}

/// Sum rate for broadside users at `distances`, all transmitting at `snr_db`.
pub fn broadside_sum_rate(arr: &RectArray, distances: &[f64], snr_db: f64, opts: &RateOptions) -> Result<f64> {
    let users: Vec<TxGeometry> = distances.iter().map(|&d| TxGeometry::broadside(d)).collect::<Result<_>>()?;
    users_sum_rate(arr, &users, snr_db, opts)
}

/// Sum rate for arbitrary users, using the separable Gram path when the
/// channel model allows it.
pub fn users_sum_rate(arr: &RectArray, users: &[TxGeometry], snr_db: f64, opts: &RateOptions) -> Result<f64> {
    let powers = vec![snr_db_to_power(snr_db); users.len()];
    let ch = &opts.channel;
    if ch.field == FieldModel::Fresnel && ch.integration == Integration::Midpoint {
        for tx in users {
            if tx.dist() < arr.reactive_limit() {
                return Err(Error::ReactiveNearField {
                    distance: tx.dist(),
                    minimum: arr.reactive_limit(),
                });
            }
        }
        return sum_rate_from_gram(&fresnel_gram(arr, users, ch.scale)?, &powers, opts.precoder_norm);
    }
    let h = build_channel_matrix(arr, users, ch)?;
    let w = mmse_precoder(&h, opts.precoder_norm)?;
    sum_rate(&h, &w, &powers)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct RateOptions {
    pub channel: ChannelOptions,
    pub precoder_norm: PrecoderNorm,
}

/// Distribution of random user ranges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Placement {
    /// Uniform in `1/z`, i.e. uniform in the defocus variable that sets
    /// beam depth.
    #[default]
    UniformInverseDistance,
    /// Uniform in `z`.
    UniformDistance,
}

impl Placement {
    pub fn as_str(&self) -> &'static str {
        match self {
            Placement::UniformInverseDistance => "uniform-inverse-distance",
            Placement::UniformDistance => "uniform-distance",
        }
    }

    fn sample(&self, rng: &mut Pcg64, z_min: f64, z_max: f64) -> f64 {
        let u: f64 = rng.random();
        match self {
            Placement::UniformDistance => z_min + u * (z_max - z_min),
            Placement::UniformInverseDistance => 1.0 / (1.0 / z_max + u * (1.0 / z_min - 1.0 / z_max)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloConfig {
    pub users: usize,
    pub z_min: f64,
    pub z_max: f64,
    pub n_trials: usize,
    pub snr_db: f64,
    pub seed: u64,
    pub placement: Placement,
    pub rate: RateOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloResult {
    pub mean: f64,
    pub stderr: f64,
    pub max: f64,
    pub n_trials: usize,
}

/// Mean sum rate over random broadside placements. Trial `t` draws from PCG64
/// stream `t` seeded with `seed`, so results do not depend on scheduling.
pub fn monte_carlo_sum_rate(arr: &RectArray, cfg: &MonteCarloConfig) -> Result<MonteCarloResult> {
    if cfg.n_trials == 0 {
        return Err(Error::invalid("n_trials", "must be at least 1"));
    }
    if cfg.users == 0 {
        return Err(Error::invalid("users", "must be at least 1"));
    }
    let z_min = positive("z_min", cfg.z_min)?;
    let z_max = positive("z_max", cfg.z_max)?;
    if z_max < z_min {
        return Err(Error::invalid("region", "z_max must be >= z_min"));
    }
    let trials: Vec<usize> = (0..cfg.n_trials).collect();
    let rates = crate::gain::sweep_values(&trials, |_, &t| {
        let mut rng = Pcg64::new(cfg.seed as u128, t as u128);
        let distances: Vec<f64> = (0..cfg.users)
            .map(|_| cfg.placement.sample(&mut rng, z_min, z_max))
            .collect();
        broadside_sum_rate(arr, &distances, cfg.snr_db, &cfg.rate)
    })?;
    let n = rates.len() as f64;
    let mean = rates.iter().sum::<f64>() / n;
    let var = if rates.len() > 1 {
        rates.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(MonteCarloResult {
        mean,
        stderr: (var / n).sqrt(),
        max: rates.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        n_trials: cfg.n_trials,
    })
}
