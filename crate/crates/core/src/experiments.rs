//! Experiment runner. Each experiment turns a validated configuration into
//! one CSV table; distances are reported in multiples of the element
//! Fraunhofer distance of the array under study.

use crate::beam_depth::{bd_rect, circ_lobe_catalog, finite_bd_limit_rect, solve_a3db, A3DB_TOL};
use crate::config::{Angle, Distance, DistanceUnits, GeometryConfig, Grid, Length, SizingConfig};
use crate::error::{Error, Result};
use crate::field::{mean_abs_distance_error, FocalPoint, QuadratureSpec, TaylorVariant};
use crate::gain::{
    analytic_gain_circ, analytic_gain_rect, analytic_gain_steered_tx, circ_parameter, defocus_parameter,
    exact_array_gain, exact_circ_gain, fmt, projected_gain_approx, sweep_values, to_db, DiskQuadrature,
};
use crate::geometry::{CircArray, RectArray, TxGeometry};
use crate::multiplexing::{
    monte_carlo_sum_rate, plan_focal_points, users_sum_rate, MonteCarloConfig, Placement, PlacementPlan, RateOptions,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;
use std::io::Write;
use std::path::PathBuf;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    GainProfile,
    BdVsEta,
    BdVsPhi,
    A3dbCurve,
    FiniteLimitCurve,
    CircularGain,
    LobeCatalog,
    DistanceError,
    ProjectionError,
    MultiplexPlan,
    SumRateVsSnr,
    SumRateVsUsers,
    SumRateVsEta,
    SumRateVsPhi,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::GainProfile => "gain-profile",
            ExperimentKind::BdVsEta => "bd-vs-eta",
            ExperimentKind::BdVsPhi => "bd-vs-phi",
            ExperimentKind::A3dbCurve => "a3db-curve",
            ExperimentKind::FiniteLimitCurve => "finite-limit-curve",
            ExperimentKind::CircularGain => "circular-gain",
            ExperimentKind::LobeCatalog => "lobe-catalog",
            ExperimentKind::DistanceError => "distance-error",
            ExperimentKind::ProjectionError => "projection-error",
            ExperimentKind::MultiplexPlan => "multiplex-plan",
            ExperimentKind::SumRateVsSnr => "sum-rate-vs-snr",
            ExperimentKind::SumRateVsUsers => "sum-rate-vs-users",
            ExperimentKind::SumRateVsEta => "sum-rate-vs-eta",
            ExperimentKind::SumRateVsPhi => "sum-rate-vs-phi",
        }
    }
}

fn default_geometry() -> GeometryConfig {
    serde_json::from_str(
        r#"{"n_per_side":100,"eta":1,"sizing":{"mode":"element-diagonal","value":"0.25lambda"},"carrier_hz":3e9}"#,
    )
    .expect("built-in geometry")
}

fn default_seed() -> u64 {
    42
}

/// Top-level configuration file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default = "default_geometry")]
    pub geometry: GeometryConfig,
    /// Experiment-specific parameters, checked when the experiment runs.
    #[serde(default)]
    pub params: serde_json::Value,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }
}

/// Header plus formatted rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    /// Writes the version comment line followed by the CSV body.
    pub fn write_csv<W: Write>(&self, mut out: W, kind: ExperimentKind, preset: Option<&str>) -> Result<()> {
        writeln!(
            out,
            "# nearfield-bd v{VERSION} experiment={} preset={}",
            kind.as_str(),
            preset.unwrap_or("custom")
        )?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn params<T: DeserializeOwned>(value: &serde_json::Value) -> Result<T> {
    let value = if value.is_null() {
        serde_json::Value::Object(Default::default())
    } else {
        value.clone()
    };
    serde_json::from_value(value).map_err(|e| Error::Config(format!("params: {e}")))
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn focus_distance(d: &Distance, units: &DistanceUnits) -> Result<f64> {
    let v = d.meters(units);
    if v > 0.0 {
        Ok(v)
    } else {
        Err(config_err(format!("focus: `{d}` must be > 0 or inf")))
    }
}

fn check_azimuths(name: &str, values: &[f64]) -> Result<()> {
    if let Some(v) = values.iter().find(|v| v.abs() >= FRAC_PI_2) {
        return Err(config_err(format!("{name}: |{v}| must be < pi/2")));
    }
    Ok(())
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt).unwrap_or_default()
}

/// Runs the configured experiment.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Table> {
    let g = &cfg.geometry;
    let p = &cfg.params;
    match cfg.experiment {
        ExperimentKind::GainProfile => gain_profile(g, params(p)?),
        ExperimentKind::BdVsEta => bd_vs_eta(g, params(p)?),
        ExperimentKind::BdVsPhi => bd_vs_phi(g, params(p)?),
        ExperimentKind::A3dbCurve => a3db_curve(params(p)?),
        ExperimentKind::FiniteLimitCurve => finite_limit_curve(g, params(p)?),
        ExperimentKind::CircularGain => circular_gain(g, params(p)?),
        ExperimentKind::LobeCatalog => lobe_catalog(g, params(p)?),
        ExperimentKind::DistanceError => distance_error(g, params(p)?),
        ExperimentKind::ProjectionError => projection_error(g, params(p)?),
        ExperimentKind::MultiplexPlan => multiplex_plan(g, params(p)?),
        ExperimentKind::SumRateVsSnr => sum_rate_vs_snr(g, cfg.seed, params(p)?),
        ExperimentKind::SumRateVsUsers => sum_rate_vs_users(g, cfg.seed, params(p)?),
        ExperimentKind::SumRateVsEta => sum_rate_vs_eta(g, cfg.seed, params(p)?),
        ExperimentKind::SumRateVsPhi => sum_rate_vs_phi(g, cfg.seed, params(p)?),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
enum ProfileKind {
    Exact,
    Analytic,
    #[default]
    Both,
}

/// Phase profile of the receive filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
enum FilterShape {
    /// Second-order (Fresnel) expansion of the distance to the focus.
    #[default]
    SecondOrder,
    /// Exact distance to the focus.
    Spherical,
}

impl FilterShape {
    fn focal_point(self, distance: f64, azimuth: f64, elevation: f64) -> Result<FocalPoint> {
        match self {
            FilterShape::SecondOrder => FocalPoint::steered(distance, azimuth, elevation),
            FilterShape::Spherical => FocalPoint::spherical(distance, azimuth, elevation),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GainProfileParams {
    #[serde(default)]
    azimuth: Angle,
    #[serde(default)]
    elevation: Angle,
    focus: Distance,
    /// Point the filter at the transmitter direction instead of broadside.
    #[serde(default)]
    steer_focus: bool,
    #[serde(default)]
    filter: FilterShape,
    distances: Grid<Distance>,
    #[serde(default)]
    kind: ProfileKind,
    #[serde(default)]
    quadrature: QuadratureSpec,
}

fn gain_profile(g: &GeometryConfig, p: GainProfileParams) -> Result<Table> {
    let arr = g.array()?;
    let units = DistanceUnits::of_rect(&arr);
    let zs = p.distances.meters("distances", &units)?;
    let focus = focus_distance(&p.focus, &units)?;
    let (az, el) = (p.azimuth.0, p.elevation.0);
    p.quadrature.validate()?;
    TxGeometry::new(zs[0], az, el)?;
    if p.steer_focus && el != 0.0 {
        return Err(config_err("steer_focus supports azimuth only; set elevation to 0"));
    }
    let filter = if p.steer_focus {
        p.filter.focal_point(focus, az, el)?
    } else {
        p.filter.focal_point(focus, 0.0, 0.0)?
    };
    let projected = if p.steer_focus { Some(arr.project(az)?) } else { None };

    let analytic = |tx: &TxGeometry| -> f64 {
        match &projected {
            Some(proj) => analytic_gain_rect(proj.eta(), defocus_parameter(proj, tx.dist(), focus)),
            None if tx.is_broadside() => analytic_gain_rect(arr.eta(), defocus_parameter(&arr, tx.dist(), focus)),
            None => analytic_gain_steered_tx(&arr, tx, focus),
        }
    };
    let values = sweep_values(&zs, |_, &z| {
        let tx = TxGeometry::new(z, az, el)?;
        let exact = match p.kind {
            ProfileKind::Analytic => None,
            ProfileKind::Both if z < arr.reactive_limit() => None,
            _ => Some(exact_array_gain(&arr, &tx, &filter, &p.quadrature)?),
        };
        let closed = (p.kind != ProfileKind::Exact).then(|| analytic(&tx));
        Ok((exact, closed))
    })?;

    let d_f = arr.fraunhofer_distance();
    let mut t = match p.kind {
        ProfileKind::Both => Table::new(&["distance_over_dF", "gain", "analytic_gain"]),
        _ => Table::new(&["distance_over_dF", "gain"]),
    };
    for (z, (exact, closed)) in zs.iter().zip(values) {
        let mut row = vec![fmt(z / d_f)];
        match p.kind {
            ProfileKind::Exact => row.push(opt(exact)),
            ProfileKind::Analytic => row.push(opt(closed)),
            ProfileKind::Both => row.extend([opt(exact), opt(closed)]),
        }
        t.rows.push(row);
    }
    Ok(t)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BdVsEtaParams {
    etas: Grid<f64>,
    /// Defaults to the geometry block's sizing.
    #[serde(default)]
    sizings: Option<Vec<SizingConfig>>,
    focus: Distance,
}

fn bd_vs_eta(g: &GeometryConfig, p: BdVsEtaParams) -> Result<Table> {
    let etas = p.etas.positive("etas")?;
    let sizings = p.sizings.unwrap_or_else(|| vec![g.sizing]);
    if sizings.is_empty() {
        return Err(config_err("sizings: empty list"));
    }
    let mut items = Vec::new();
    for s in &sizings {
        for &eta in &etas {
            let arr = g.array_with_sizing(eta, s)?;
            let focus = p.focus.finite(&DistanceUnits::of_rect(&arr), "focus")?;
            items.push((s.label(), arr, focus));
        }
    }
    let results = sweep_values(&items, |_, (_, arr, focus)| bd_rect(arr, *focus))?;
    let mut t = Table::new(&["eta", "F_over_dF", "bd_over_dF", "finite", "sizing"]);
    for ((label, arr, focus), bd) in items.iter().zip(results) {
        let d_f = arr.fraunhofer_distance();
        t.rows.push(vec![
            fmt(arr.eta()),
            fmt(focus / d_f),
            fmt(bd.depth / d_f),
            (!bd.is_infinite()).to_string(),
            label.to_string(),
        ]);
    }
    Ok(t)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BdVsPhiParams {
    /// Defaults to the geometry block's aspect ratio.
    #[serde(default)]
    etas: Option<Vec<f64>>,
    azimuths: Grid<Angle>,
    focus: Distance,
}

fn bd_vs_phi(g: &GeometryConfig, p: BdVsPhiParams) -> Result<Table> {
    let phis = p.azimuths.radians("azimuths")?;
    check_azimuths("azimuths", &phis)?;
    let etas = p.etas.unwrap_or_else(|| vec![g.eta]);
    let mut items = Vec::new();
    for &eta in &etas {
        let arr = g.array_with_eta(eta)?;
        let focus = p.focus.finite(&DistanceUnits::of_rect(&arr), "focus")?;
        for &phi in &phis {
            items.push((arr, phi, focus));
        }
    }
    let results = sweep_values(&items, |_, (arr, phi, focus)| bd_rect(&arr.project(*phi)?, *focus))?;
    let mut t = Table::new(&["eta", "phi", "F_over_dF", "bd_over_dF", "finite"]);
    for ((arr, phi, focus), bd) in items.iter().zip(results) {
        let d_f = arr.fraunhofer_distance();
        t.rows.push(vec![
            fmt(arr.eta()),
            fmt(*phi),
            fmt(focus / d_f),
            fmt(bd.depth / d_f),
            (!bd.is_infinite()).to_string(),
        ]);
    }
    Ok(t)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EtaParams {
    etas: Grid<f64>,
}

fn a3db_curve(p: EtaParams) -> Result<Table> {
    let etas = p.etas.positive("etas")?;
    let values = sweep_values(&etas, |_, &eta| solve_a3db(eta, A3DB_TOL))?;
    let mut t = Table::new(&["eta", "a3db", "a3db_times_1_plus_eta2"]);
    for (eta, a) in etas.iter().zip(values) {
        t.rows.push(vec![fmt(*eta), fmt(a), fmt(a * (1.0 + eta * eta))]);
    }
    Ok(t)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FiniteLimitParams {
    etas: Grid<f64>,
    #[serde(default)]
    sizings: Option<Vec<SizingConfig>>,
}

fn finite_limit_curve(g: &GeometryConfig, p: FiniteLimitParams) -> Result<Table> {
    let etas = p.etas.positive("etas")?;
    let sizings = p.sizings.unwrap_or_else(|| vec![g.sizing]);
    let mut items = Vec::new();
    for s in &sizings {
        for &eta in &etas {
            items.push((s.label(), g.array_with_sizing(eta, s)?));
        }
    }
    let limits = sweep_values(&items, |_, (_, arr)| finite_bd_limit_rect(arr))?;
    let mut t = Table::new(&["eta", "sizing", "limit_over_dF", "limit_over_dFA", "limit_m"]);
    for ((label, arr), limit) in items.iter().zip(limits) {
        t.rows.push(vec![
            fmt(arr.eta()),
            label.to_string(),
            fmt(limit / arr.fraunhofer_distance()),
            fmt(limit / arr.array_fraunhofer_distance()),
            fmt(limit),
        ]);
    }
    Ok(t)
}

fn circ_array(g: &GeometryConfig, radius: &Length, reference: Option<usize>) -> Result<CircArray> {
    let lambda = g.wavelength()?;
    CircArray::with_reference(
        radius.meters(lambda),
        lambda,
        reference.unwrap_or(g.n_per_side * g.n_per_side),
    )
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CircularGainParams {
    radius: Length,
    /// Element count of the reference array that sets the `dF` unit;
    /// defaults to the geometry block's element count.
    #[serde(default)]
    reference_elements: Option<usize>,
    focus: Distance,
    distances: Grid<Distance>,
    #[serde(default)]
    kind: ProfileKind,
    #[serde(default)]
    quadrature: DiskQuadrature,
}

fn circular_gain(g: &GeometryConfig, p: CircularGainParams) -> Result<Table> {
    let circ = circ_array(g, &p.radius, p.reference_elements)?;
    let units = DistanceUnits::of_circ(&circ);
    let zs = p.distances.meters("distances", &units)?;
    let focus = focus_distance(&p.focus, &units)?;
    let filter = FocalPoint::broadside(focus)?;
    let values = sweep_values(&zs, |_, &z| {
        let exact = match p.kind {
            ProfileKind::Analytic => None,
            ProfileKind::Both if z < circ.reactive_limit() => None,
            _ => Some(exact_circ_gain(&circ, z, &filter, &p.quadrature)?),
        };
        let closed = (p.kind != ProfileKind::Exact).then(|| analytic_gain_circ(circ_parameter(&circ, z, focus)));
        Ok((exact, closed))
    })?;
    let d_f = circ.fraunhofer_reference();
    let mut t = match p.kind {
        ProfileKind::Both => Table::new(&["distance_over_dF", "gain", "analytic_gain", "gain_db"]),
        _ => Table::new(&["distance_over_dF", "gain", "gain_db"]),
    };
    for (z, (exact, closed)) in zs.iter().zip(values) {
        let main = if p.kind == ProfileKind::Analytic { closed } else { exact };
        let mut row = vec![fmt(z / d_f), opt(main)];
        if p.kind == ProfileKind::Both {
            row.push(opt(closed));
        }
        row.push(opt(main.map(to_db)));
        t.rows.push(row);
    }
    Ok(t)
}

fn three() -> usize {
    3
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LobeCatalogParams {
    radius: Length,
    #[serde(default)]
    reference_elements: Option<usize>,
    focus: Distance,
    #[serde(default = "three")]
    k_max: usize,
}

fn lobe_catalog(g: &GeometryConfig, p: LobeCatalogParams) -> Result<Table> {
    let circ = circ_array(g, &p.radius, p.reference_elements)?;
    let focus = p.focus.finite(&DistanceUnits::of_circ(&circ), "focus")?;
    if p.k_max == 0 {
        return Err(config_err("k_max: must be at least 1"));
    }
    let d_f = circ.fraunhofer_reference();
    let mut t = Table::new(&["k", "kind", "l", "z_over_dF", "gain_db", "side"]);
    for e in circ_lobe_catalog(&circ, focus, p.k_max)? {
        let sides = [("near", Some(e.z_near)), ("far", e.z_far)];
        for (side, z) in sides {
            if let Some(z) = z {
                t.rows.push(vec![
                    e.index.to_string(),
                    e.kind.as_str().to_string(),
                    fmt(e.l_value),
                    fmt(z / d_f),
                    fmt(e.gain_db),
                    side.to_string(),
                ]);
            }
        }
    }
    Ok(t)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DistanceErrorParams {
    distance: Distance,
    azimuths: Grid<Angle>,
}

fn distance_error(g: &GeometryConfig, p: DistanceErrorParams) -> Result<Table> {
    let arr = g.array()?;
    let d = p.distance.finite(&DistanceUnits::of_rect(&arr), "distance")?;
    let phis = p.azimuths.radians("azimuths")?;
    check_azimuths("azimuths", &phis)?;
    let values = sweep_values(&phis, |_, &phi| {
        let tx = TxGeometry::new(d, phi, 0.0)?;
        Ok((
            mean_abs_distance_error(&arr, &tx, TaylorVariant::Direct),
            mean_abs_distance_error(&arr, &tx, TaylorVariant::Indirect),
        ))
    })?;
    let mut t = Table::new(&["phi", "direct", "indirect"]);
    for (phi, (direct, indirect)) in phis.iter().zip(values) {
        t.rows.push(vec![fmt(*phi), fmt(direct), fmt(indirect)]);
    }
    Ok(t)
}

/// Either a distance sweep at one azimuth or an azimuth sweep at one
/// distance.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProjectionErrorParams {
    focus: Distance,
    #[serde(default)]
    distances: Option<Grid<Distance>>,
    #[serde(default)]
    azimuth: Option<Angle>,
    #[serde(default)]
    azimuths: Option<Grid<Angle>>,
    #[serde(default)]
    distance: Option<Distance>,
    #[serde(default)]
    filter: FilterShape,
    #[serde(default)]
    quadrature: QuadratureSpec,
}

fn projection_error(g: &GeometryConfig, p: ProjectionErrorParams) -> Result<Table> {
    let arr = g.array()?;
    let units = DistanceUnits::of_rect(&arr);
    let focus = p.focus.finite(&units, "focus")?;
    p.quadrature.validate()?;
    let points: Vec<(f64, f64)> = match (&p.distances, p.azimuth, &p.azimuths, p.distance) {
        (Some(ds), Some(phi), None, None) => {
            ds.meters("distances", &units)?.into_iter().map(|d| (d, phi.0)).collect()
        }
        (None, None, Some(phis), Some(d)) => {
            let d = d.finite(&units, "distance")?;
            phis.radians("azimuths")?.into_iter().map(|phi| (d, phi)).collect()
        }
        _ => return Err(config_err("give either `distances` with `azimuth`, or `azimuths` with `distance`")),
    };
    let phis: Vec<f64> = points.iter().map(|p| p.1).collect();
    check_azimuths("azimuths", &phis)?;
    let values = sweep_values(&points, |_, &(d, phi)| {
        let tx = TxGeometry::new(d, phi, 0.0)?;
        let exact = exact_array_gain(&arr, &tx, &p.filter.focal_point(focus, phi, 0.0)?, &p.quadrature)?;
        let approx = match p.filter {
            FilterShape::SecondOrder => projected_gain_approx(&arr, &tx, focus, &p.quadrature)?,
            FilterShape::Spherical => exact_array_gain(
                &arr.project(phi)?,
                &TxGeometry::broadside(d)?,
                &FocalPoint::spherical(focus, 0.0, 0.0)?,
                &p.quadrature,
            )?,
        };
        Ok((exact, approx))
    })?;
    let d_f = arr.fraunhofer_distance();
    let mut t = Table::new(&["distance_over_dF", "phi", "exact", "projected", "abs_error"]);
    for ((d, phi), (exact, approx)) in points.iter().zip(values) {
        t.rows.push(vec![fmt(d / d_f), fmt(*phi), fmt(exact), fmt(approx), fmt((exact - approx).abs())]);
    }
    Ok(t)
}

/// Range interval served by the multiplexing experiments.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct Region {
    near: Distance,
    far: Distance,
}

impl Default for Region {
    fn default() -> Self {
        Self {
            near: Distance::UniformAmplitude(1.0),
            far: Distance::ArrayFraunhofer(0.1),
        }
    }
}

impl Region {
    fn resolve(&self, arr: &RectArray) -> Result<(f64, f64)> {
        let units = DistanceUnits::of_rect(arr);
        let near = self.near.finite(&units, "region.near")?;
        let far = self.far.finite(&units, "region.far")?;
        if far < near {
            return Err(config_err("region: far must not be closer than near"));
        }
        Ok((near, far))
    }
}

fn max_users_default() -> usize {
    64
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PlanParams {
    #[serde(default)]
    region: Region,
    #[serde(default = "max_users_default")]
    max_users: usize,
}

fn multiplex_plan(g: &GeometryConfig, p: PlanParams) -> Result<Table> {
    let arr = g.array()?;
    let (near, far) = p.region.resolve(&arr)?;
    let plan = plan_focal_points(&arr, near, far, p.max_users)?;
    let d_f = arr.fraunhofer_distance();
    let mut t = Table::new(&["k", "F_over_dF", "zlo_over_dF", "zhi_over_dF"]);
    for (i, (f, (lo, hi))) in plan.focal_points.iter().zip(&plan.intervals).enumerate() {
        t.rows.push(vec![(i + 1).to_string(), fmt(f / d_f), fmt(lo / d_f), fmt(hi / d_f)]);
    }
    Ok(t)
}

fn five() -> usize {
    5
}

fn trials_default() -> usize {
    1000
}

fn yes() -> bool {
    true
}

const RATE_HEADER: [&str; 7] = ["snr_db", "k_users", "placement", "mean_rate", "stderr", "n_trials", "seed"];

fn rate_row(snr: f64, k: usize, placement: &str, mean: f64, stderr: f64, n: usize, seed: u64) -> Vec<String> {
    vec![
        fmt(snr),
        k.to_string(),
        placement.to_string(),
        fmt(mean),
        fmt(stderr),
        n.to_string(),
        seed.to_string(),
    ]
}

fn planned_rate(arr: &RectArray, plan: &PlacementPlan, snr_db: f64, rate: &RateOptions) -> Result<f64> {
    if plan.is_empty() {
        return Ok(0.0);
    }
    users_sum_rate(arr, &plan.users()?, snr_db, rate)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SumRateVsSnrParams {
    snr_db: Grid<f64>,
    #[serde(default = "five")]
    users: usize,
    #[serde(default)]
    region: Region,
    #[serde(default = "trials_default")]
    n_trials: usize,
    #[serde(default)]
    placement: Placement,
    #[serde(default)]
    rate: RateOptions,
    /// Also report users at the planned focal points.
    #[serde(default = "yes")]
    planned: bool,
}

fn check_trials(users: usize, n_trials: usize) -> Result<()> {
    if users == 0 {
        return Err(config_err("users: must be at least 1"));
    }
    if n_trials == 0 {
        return Err(config_err("n_trials: must be at least 1"));
    }
    Ok(())
}

fn sum_rate_vs_snr(g: &GeometryConfig, seed: u64, p: SumRateVsSnrParams) -> Result<Table> {
    let arr = g.array()?;
    let (near, far) = p.region.resolve(&arr)?;
    let snrs = p.snr_db.resolve("snr_db", |&x| Ok(x))?;
    check_trials(p.users, p.n_trials)?;
    let plan = if p.planned {
        Some(plan_focal_points(&arr, near, far, p.users)?)
    } else {
        None
    };
    let mut t = Table::new(&RATE_HEADER);
    for (i, &snr) in snrs.iter().enumerate() {
        let wrap = |e| Error::Sweep { failures: vec![(i, e)] };
        if let Some(plan) = &plan {
            let r = planned_rate(&arr, plan, snr, &p.rate).map_err(wrap)?;
            t.rows.push(rate_row(snr, plan.len(), "planned", r, 0.0, 1, seed));
        }
        let mc = MonteCarloConfig {
            users: p.users,
            z_min: near,
            z_max: far,
            n_trials: p.n_trials,
            snr_db: snr,
            seed,
            placement: p.placement,
            rate: p.rate,
        };
        let res = monte_carlo_sum_rate(&arr, &mc).map_err(wrap)?;
        t.rows.push(rate_row(snr, p.users, p.placement.as_str(), res.mean, res.stderr, res.n_trials, seed));
    }
    Ok(t)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SumRateVsUsersParams {
    users: Grid<usize>,
    snr_db: f64,
    #[serde(default)]
    region: Region,
    #[serde(default = "trials_default")]
    n_trials: usize,
    #[serde(default)]
    placement: Placement,
    #[serde(default)]
    rate: RateOptions,
    #[serde(default = "yes")]
    planned: bool,
}

fn sum_rate_vs_users(g: &GeometryConfig, seed: u64, p: SumRateVsUsersParams) -> Result<Table> {
    let arr = g.array()?;
    let (near, far) = p.region.resolve(&arr)?;
    let counts = p.users.counts("users")?;
    for &k in &counts {
        check_trials(k, p.n_trials)?;
    }
    if !p.snr_db.is_finite() {
        return Err(config_err("snr_db: must be finite"));
    }
    let mut t = Table::new(&RATE_HEADER);
    for (i, &k) in counts.iter().enumerate() {
        let wrap = |e| Error::Sweep { failures: vec![(i, e)] };
        if p.planned {
            let plan = plan_focal_points(&arr, near, far, k)?;
            let r = planned_rate(&arr, &plan, p.snr_db, &p.rate).map_err(wrap)?;
            t.rows.push(rate_row(p.snr_db, plan.len(), "planned", r, 0.0, 1, seed));
        }
        let mc = MonteCarloConfig {
            users: k,
            z_min: near,
            z_max: far,
            n_trials: p.n_trials,
            snr_db: p.snr_db,
            seed,
            placement: p.placement,
            rate: p.rate,
        };
        let res = monte_carlo_sum_rate(&arr, &mc).map_err(wrap)?;
        t.rows.push(rate_row(p.snr_db, k, p.placement.as_str(), res.mean, res.stderr, res.n_trials, seed));
    }
    Ok(t)
}

/// Planned-placement sweep. The region is resolved against the geometry
/// block's array and its far end is clipped to each swept array's finite
/// beam-depth limit.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PlannedSweepParams<T> {
    #[serde(alias = "etas", alias = "azimuths")]
    values: Grid<T>,
    snr_db: f64,
    #[serde(default)]
    region: Region,
    #[serde(default = "max_users_default")]
    max_users: usize,
    #[serde(default)]
    rate: RateOptions,
}

fn planned_sweep<F>(values: &[f64], seed: u64, snr_db: f64, label: &'static str, eval: F) -> Result<Table>
where
    F: Fn(usize, f64) -> Result<(usize, f64)> + Sync,
{
    let results = sweep_values(values, |i, &v| eval(i, v))?;
    let mut header = vec![label];
    header.extend(RATE_HEADER);
    let mut t = Table::new(&header);
    for (v, (k, r)) in values.iter().zip(results) {
        let mut row = vec![fmt(*v)];
        row.extend(rate_row(snr_db, k, "planned", r, 0.0, 1, seed));
        t.rows.push(row);
    }
    Ok(t)
}

fn clipped_plan(arr: &RectArray, near: f64, far: f64, max_users: usize) -> Result<PlacementPlan> {
    plan_focal_points(arr, near, far.min(finite_bd_limit_rect(arr)?), max_users)
}

fn sum_rate_vs_eta(g: &GeometryConfig, seed: u64, p: PlannedSweepParams<f64>) -> Result<Table> {
    let (near, far) = p.region.resolve(&g.array()?)?;
    let etas = p.values.positive("etas")?;
    let arrays = etas.iter().map(|&eta| g.array_with_eta(eta)).collect::<Result<Vec<_>>>()?;
    planned_sweep(&etas, seed, p.snr_db, "eta", |i, _| {
        let plan = clipped_plan(&arrays[i], near, far, p.max_users)?;
        Ok((plan.len(), planned_rate(&arrays[i], &plan, p.snr_db, &p.rate)?))
    })
}

fn sum_rate_vs_phi(g: &GeometryConfig, seed: u64, p: PlannedSweepParams<Angle>) -> Result<Table> {
    let arr = g.array()?;
    let (near, far) = p.region.resolve(&arr)?;
    let phis = p.values.radians("azimuths")?;
    check_azimuths("azimuths", &phis)?;
    planned_sweep(&phis, seed, p.snr_db, "phi", |_, phi| {
        let plan = clipped_plan(&arr.project(phi)?, near, far, p.max_users)?;
        if plan.is_empty() {
            return Ok((0, 0.0));
        }
        let users = plan
            .focal_points
            .iter()
            .map(|&f| TxGeometry::new(f, phi, 0.0))
            .collect::<Result<Vec<_>>>()?;
        Ok((plan.len(), users_sum_rate(&arr, &users, p.snr_db, &p.rate)?))
    })
}
