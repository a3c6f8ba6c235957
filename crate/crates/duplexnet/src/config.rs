//! Experiment files. Every section is optional and falls back to the
//! defaults below; dB-valued keys end in `_db` and accept `-inf`.

use std::path::{Path, PathBuf};

use duplexnet_core::analytic::SpecialCaseParams;
use duplexnet_core::composite::{CompositeMix, CompositeNetwork};
use duplexnet_core::model::db_to_linear;
use duplexnet_core::montecarlo::threegpp::ThreeGppParams;
use duplexnet_core::montecarlo::{AntennaModel, Association, Geometry, Orientation, SimSettings, Window};
use duplexnet_core::{AntennaSystem, NetworkConfig, QuadratureSpec, Scenario, SuppressionMode};
use serde::Deserialize;

use crate::error::RunError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JobKind {
    OutageSweep,
    LiSweep,
    DensitySweep,
    CompositeSurface,
    ThroughputSurface,
    Optimize,
    Validate,
    FigurePreset,
}

impl JobKind {
    pub fn label(self) -> &'static str {
        match self {
            JobKind::OutageSweep => "outage-sweep",
            JobKind::LiSweep => "li-sweep",
            JobKind::DensitySweep => "density-sweep",
            JobKind::CompositeSurface => "composite-surface",
            JobKind::ThroughputSurface => "throughput-surface",
            JobKind::Optimize => "optimize",
            JobKind::Validate => "validate",
            JobKind::FigurePreset => "figure-preset",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    Analytic,
    Mc,
    Both,
}

impl Engine {
    pub fn analytic(self) -> bool {
        self != Engine::Mc
    }

    pub fn mc(self) -> bool {
        self != Engine::Analytic
    }
}

/// Which analytic expression evaluates an outage point, and which simulation
/// geometry the matching MC run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    /// Full Laplace-transform integrals; MC with exact geometry.
    General,
    /// Side-lobe special case at the configured `M`; MC with guard zones.
    Special,
    /// `M → ∞` limit; MC with guard zones and side-lobe gains.
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PropagationModel {
    PowerLaw,
    #[serde(rename = "3gpp")]
    ThreeGpp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisName {
    Rate,
    SigmaL2Db,
    Lambda,
    M,
    #[serde(rename = "p_2n")]
    P2n,
    PU,
}

impl AxisName {
    pub fn label(self) -> &'static str {
        match self {
            AxisName::Rate => "rate",
            AxisName::SigmaL2Db => "sigma_l2_db",
            AxisName::Lambda => "lambda",
            AxisName::M => "m",
            AxisName::P2n => "p_2n",
            AxisName::PU => "p_u",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub name: AxisName,
    #[serde(default)]
    pub values: Vec<f64>,
    /// `[start, stop, count]`, evenly spaced.
    pub linspace: Option<(f64, f64, usize)>,
    /// `[start, stop, count]`, evenly spaced in log₁₀.
    pub logspace: Option<(f64, f64, usize)>,
}

impl Axis {
    pub fn new(name: AxisName, values: Vec<f64>) -> Self {
        Self {
            name,
            values,
            linspace: None,
            logspace: None,
        }
    }

    pub fn points(&self) -> Result<Vec<f64>, RunError> {
        let spaced = |(a, b, n): (f64, f64, usize)| -> Vec<f64> {
            if n == 1 {
                return vec![a];
            }
            (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
        };
        let vals = match (self.values.is_empty(), self.linspace, self.logspace) {
            (false, None, None) => self.values.clone(),
            (true, Some(l), None) => spaced(l),
            (true, None, Some(l)) => spaced(l).into_iter().map(|x| 10f64.powf(x)).collect(),
            _ => {
                return Err(RunError::config(format!(
                    "axis {} needs exactly one of values, linspace, logspace",
                    self.name.label()
                )))
            }
        };
        if vals.is_empty() {
            return Err(RunError::config(format!("axis {} is empty", self.name.label())));
        }
        Ok(vals)
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JobSection {
    pub kind: JobKind,
    pub scenarios: Vec<String>,
    pub engine: Engine,
    pub seed: u64,
    pub realizations: u64,
    pub output: Option<PathBuf>,
    pub preset: Option<String>,
    pub workers: Option<usize>,
}

impl Default for JobSection {
    fn default() -> Self {
        Self {
            kind: JobKind::OutageSweep,
            scenarios: vec!["2D".into(), "3D".into(), "2U".into(), "3U".into()],
            engine: Engine::Analytic,
            seed: 1,
            realizations: 10_000,
            output: None,
            preset: None,
            workers: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkSection {
    pub lambda: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub uplink_alpha1: f64,
    pub uplink_alpha2: f64,
    pub p_b_db: f64,
    pub p_u_db: f64,
    pub sigma_n2_db: f64,
    pub sigma_l2_db: f64,
    pub rate: f64,
    /// Loopback power at the BS when it differs from `p_b`.
    pub bs_li_power_db: Option<f64>,
}

impl Default for NetworkSection {
    fn default() -> Self {
        Self {
            lambda: 1e-2,
            alpha1: 4.0,
            alpha2: 4.0,
            uplink_alpha1: 4.0,
            uplink_alpha2: 3.0,
            p_b_db: 0.0,
            p_u_db: 0.0,
            sigma_n2_db: f64::NEG_INFINITY,
            sigma_l2_db: -30.0,
            rate: 1.0,
            bs_li_power_db: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suppression {
    Clamped,
    Raw,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AntennaSection {
    /// Sector count of both BSs and users unless overridden.
    pub sectors: u32,
    pub m_b: Option<u32>,
    pub m_u: Option<u32>,
    pub gamma: f64,
    pub gamma_b: Option<f64>,
    pub gamma_u: Option<f64>,
    pub theta_max: f64,
    pub suppression: Suppression,
}

impl Default for AntennaSection {
    fn default() -> Self {
        Self {
            sectors: 1,
            m_b: None,
            m_u: None,
            gamma: 0.2,
            gamma_b: None,
            gamma_u: None,
            theta_max: 2.0 * std::f64::consts::PI / 3.0,
            suppression: Suppression::Clamped,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyticSection {
    pub route: Route,
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl Default for AnalyticSection {
    fn default() -> Self {
        let q = QuadratureSpec::default();
        Self {
            route: Route::General,
            rel_tol: q.rel_tol,
            abs_tol: q.abs_tol,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeometryKey {
    Exact,
    GuardZone,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrientationKey {
    Geometric,
    CaseSampling,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MonteCarloSection {
    pub model: PropagationModel,
    /// Expected BS count in the window; ignored when `window_radius` is set.
    pub window_nodes: f64,
    pub window_radius: Option<f64>,
    /// Overrides the geometry implied by the analytic route.
    pub geometry: Option<GeometryKey>,
    pub orientation: OrientationKey,
    pub tail_correction: bool,
    /// Dense user field with nearest-BS association instead of the
    /// independent-PPP user model.
    pub association: bool,
    pub user_density_ratio: f64,
}

impl Default for MonteCarloSection {
    fn default() -> Self {
        Self {
            model: PropagationModel::PowerLaw,
            window_nodes: duplexnet_core::montecarlo::DEFAULT_WINDOW_NODES,
            window_radius: None,
            geometry: None,
            orientation: OrientationKey::Geometric,
            tail_correction: true,
            association: false,
            user_density_ratio: Association::default().user_density_ratio,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompositeSection {
    pub p_2n: f64,
    pub p_u: f64,
}

impl Default for CompositeSection {
    fn default() -> Self {
        Self { p_2n: 0.5, p_u: 1.0 }
    }
}

/// Pico-cell model. `rate` and `sigma_l2_db` come from the `network` section
/// and grid; densities are per km².
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThreeGppSection {
    pub lambda_per_km2: f64,
    pub p_b_dbm: f64,
    pub p_u_dbm: f64,
    pub noise_figure_db: f64,
    pub bandwidth_hz: f64,
    pub min_distance_km: f64,
    pub window_km: f64,
    pub force_los: bool,
}

impl Default for ThreeGppSection {
    fn default() -> Self {
        let p = ThreeGppParams::default();
        Self {
            lambda_per_km2: p.lambda_per_km2,
            p_b_dbm: p.p_b_dbm,
            p_u_dbm: p.p_u_dbm,
            noise_figure_db: p.noise_figure_db,
            bandwidth_hz: p.bandwidth_hz,
            min_distance_km: p.min_distance_km,
            window_km: p.window_km,
            force_los: p.force_los,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSpec {
    pub job: JobSection,
    pub network: NetworkSection,
    pub antenna: AntennaSection,
    pub analytic: AnalyticSection,
    pub montecarlo: MonteCarloSection,
    pub composite: CompositeSection,
    pub threegpp: ThreeGppSection,
    pub grid: Vec<Axis>,
}

/// One cell of the parameter grid. `p_2n` and `p_u` only matter to the
/// composite jobs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub rate: f64,
    pub sigma_l2_db: f64,
    pub lambda: f64,
    pub m: u32,
    pub p_2n: f64,
    pub p_u: f64,
}

impl std::fmt::Display for GridPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "rate={} sigma_l2_db={} lambda={} m={} p_2n={} p_u={}",
            self.rate, self.sigma_l2_db, self.lambda, self.m, self.p_2n, self.p_u
        )
    }
}

impl ExperimentSpec {
    pub fn from_toml(text: &str) -> Result<Self, RunError> {
        toml::from_str(text).map_err(|e| RunError::config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RunError::config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn scenarios(&self) -> Result<Vec<Scenario>, RunError> {
        if self.job.scenarios.is_empty() {
            return Err(RunError::config("job.scenarios is empty"));
        }
        self.job
            .scenarios
            .iter()
            .map(|s| s.parse::<Scenario>().map_err(|e| RunError::config(e.to_string())))
            .collect()
    }

    fn base_point(&self) -> GridPoint {
        GridPoint {
            rate: self.network.rate,
            sigma_l2_db: self.network.sigma_l2_db,
            lambda: self.network.lambda,
            m: self.antenna.m_b.unwrap_or(self.antenna.sectors),
            p_2n: self.composite.p_2n,
            p_u: self.composite.p_u,
        }
    }

    /// Cartesian product of the grid axes in file order, the last axis
    /// varying fastest.
    pub fn grid_points(&self) -> Result<Vec<GridPoint>, RunError> {
        let mut seen = Vec::new();
        let mut points = vec![self.base_point()];
        for axis in &self.grid {
            if seen.contains(&axis.name) {
                return Err(RunError::config(format!("axis {} appears twice", axis.name.label())));
            }
            seen.push(axis.name);
            let values = axis.points()?;
            let mut next = Vec::with_capacity(points.len() * values.len());
            for p in &points {
                for &v in &values {
                    next.push(set_axis(*p, axis.name, v)?);
                }
            }
            points = next;
        }
        Ok(points)
    }

    pub fn has_axis(&self, name: AxisName) -> bool {
        self.grid.iter().any(|a| a.name == name)
    }

    pub fn quadrature(&self) -> QuadratureSpec {
        QuadratureSpec::default().with_tolerances(self.analytic.rel_tol, self.analytic.abs_tol)
    }

    /// Link configuration at `point` for `scenario`'s direction.
    pub fn network_config(&self, point: &GridPoint, uplink: bool) -> Result<NetworkConfig, RunError> {
        let n = &self.network;
        let (a1, a2) = if uplink {
            (n.uplink_alpha1, n.uplink_alpha2)
        } else {
            (n.alpha1, n.alpha2)
        };
        let cfg = NetworkConfig {
            lambda: point.lambda,
            alpha1: a1,
            alpha2: a2,
            p_b: db_to_linear(n.p_b_db),
            p_u: db_to_linear(n.p_u_db),
            sigma_n2: db_to_linear(n.sigma_n2_db),
            sigma_l2: db_to_linear(point.sigma_l2_db),
            rate: point.rate,
            bs_li_power: n.bs_li_power_db.map(db_to_linear),
        };
        cfg.validate().map_err(|e| RunError::config(format!("{e} at {point}")))?;
        Ok(cfg)
    }

    pub fn antennas(&self, point: &GridPoint) -> Result<AntennaSystem, RunError> {
        let a = &self.antenna;
        let ant = AntennaSystem {
            m_b: point.m,
            m_u: if self.has_axis(AxisName::M) {
                point.m
            } else {
                a.m_u.unwrap_or(a.sectors)
            },
            gamma_b: a.gamma_b.unwrap_or(a.gamma),
            gamma_u: a.gamma_u.unwrap_or(a.gamma),
            theta_max: a.theta_max,
            suppression: match a.suppression {
                Suppression::Clamped => SuppressionMode::Clamped,
                Suppression::Raw => SuppressionMode::Raw,
            },
        };
        ant.validate().map_err(|e| RunError::config(format!("{e} at {point}")))?;
        Ok(ant)
    }

    pub fn special(&self, point: &GridPoint) -> Result<SpecialCaseParams, RunError> {
        let ant = self.antennas(point)?;
        let sp = match self.analytic.route {
            Route::Asymptotic => SpecialCaseParams::new_asymptotic(ant.gamma_b),
            _ => SpecialCaseParams::new(ant.m_b, ant.gamma_b),
        }
        .map_err(|e| RunError::config(format!("{e} at {point}")))?;
        Ok(sp.with_theta_max(ant.theta_max).with_suppression(ant.suppression))
    }

    pub fn composite_network(&self, point: &GridPoint) -> Result<CompositeNetwork, RunError> {
        let down = self.network_config(point, false)?;
        let up = self.network_config(point, true)?;
        let ant = self.antennas(point)?;
        let mut net = CompositeNetwork::new(down, up, ant).map_err(|e| RunError::config(format!("{e} at {point}")))?;
        net.quad = self.quadrature();
        Ok(net)
    }

    pub fn mix(&self, point: &GridPoint) -> Result<CompositeMix, RunError> {
        CompositeMix::new(point.p_2n, point.p_u).map_err(|e| RunError::config(format!("{e} at {point}")))
    }

    /// Simulation settings for the configured route and overrides.
    pub fn sim_settings(&self, point: &GridPoint) -> SimSettings {
        let mc = &self.montecarlo;
        let mut s = match self.analytic.route {
            Route::General => SimSettings::default(),
            Route::Special => SimSettings::special(Some(point.m)),
            Route::Asymptotic => SimSettings::special(None),
        };
        s.window = match mc.window_radius {
            Some(r) => Window::Radius(r),
            None => Window::ExpectedNodes(mc.window_nodes),
        };
        if let Some(g) = mc.geometry {
            s.geometry = match g {
                GeometryKey::Exact => Geometry::Exact,
                GeometryKey::GuardZone => Geometry::GuardZone,
            };
        }
        if self.analytic.route == Route::Asymptotic {
            s.antenna_model = AntennaModel::SideLobeOnly;
        }
        s.orientation = match mc.orientation {
            OrientationKey::Geometric => Orientation::Geometric,
            OrientationKey::CaseSampling => Orientation::CaseSampling,
        };
        s.tail_correction = mc.tail_correction;
        if mc.association {
            s.association = Some(Association {
                user_density_ratio: mc.user_density_ratio,
            });
        }
        s
    }

    pub fn threegpp(&self, point: &GridPoint) -> Result<ThreeGppParams, RunError> {
        let t = &self.threegpp;
        let p = ThreeGppParams {
            lambda_per_km2: t.lambda_per_km2,
            p_b_dbm: t.p_b_dbm,
            p_u_dbm: t.p_u_dbm,
            noise_figure_db: t.noise_figure_db,
            bandwidth_hz: t.bandwidth_hz,
            sigma_l2_db: point.sigma_l2_db,
            rate: point.rate,
            min_distance_km: t.min_distance_km,
            window_km: t.window_km,
            force_los: t.force_los,
            ..ThreeGppParams::default()
        };
        p.validate().map_err(|e| RunError::config(format!("{e} at {point}")))?;
        Ok(p)
    }

    /// Checks everything that can be checked without evaluating a point.
    pub fn validate(&self) -> Result<(), RunError> {
        if self.job.kind == JobKind::FigurePreset && self.job.preset.is_none() {
            return Err(RunError::config("figure-preset jobs need job.preset"));
        }
        if self.job.kind == JobKind::Validate || self.job.kind == JobKind::FigurePreset {
            return Ok(());
        }
        if self.job.engine.mc() && self.job.realizations < duplexnet_core::montecarlo::MIN_REALIZATIONS {
            return Err(RunError::config(format!(
                "job.realizations must be at least {}",
                duplexnet_core::montecarlo::MIN_REALIZATIONS
            )));
        }
        match self.job.kind {
            JobKind::LiSweep if !self.has_axis(AxisName::SigmaL2Db) => {
                return Err(RunError::config("li-sweep needs a sigma_l2_db axis"))
            }
            JobKind::DensitySweep if !self.has_axis(AxisName::Lambda) => {
                return Err(RunError::config("density-sweep needs a lambda axis"))
            }
            JobKind::Optimize if self.job.engine == Engine::Mc => {
                return Err(RunError::config("optimize is analytic only"))
            }
            _ => {}
        }
        let composite = matches!(
            self.job.kind,
            JobKind::CompositeSurface | JobKind::ThroughputSurface | JobKind::Optimize
        );
        let threegpp = self.montecarlo.model == PropagationModel::ThreeGpp;
        if threegpp && (composite || self.job.engine.analytic()) {
            return Err(RunError::config(
                "the 3gpp model has no analytic counterpart; use engine = \"mc\" with an outage job",
            ));
        }
        let scenarios = if composite { Vec::new() } else { self.scenarios()? };
        for p in self.grid_points()? {
            if composite {
                self.composite_network(&p)?;
                self.mix(&p)?;
                continue;
            }
            self.antennas(&p)?;
            if threegpp {
                self.threegpp(&p)?;
                continue;
            }
            for sc in &scenarios {
                self.network_config(&p, sc.is_uplink())?;
            }
            if self.analytic.route != Route::General {
                self.special(&p)?;
            }
            if self.job.engine.mc() {
                self.sim_settings(&p)
                    .validate(p.lambda)
                    .map_err(|e| RunError::config(format!("{e} at {p}")))?;
            }
        }
        Ok(())
    }
}

fn set_axis(mut p: GridPoint, name: AxisName, v: f64) -> Result<GridPoint, RunError> {
    match name {
        AxisName::Rate => p.rate = v,
        AxisName::SigmaL2Db => p.sigma_l2_db = v,
        AxisName::Lambda => p.lambda = v,
        AxisName::P2n => p.p_2n = v,
        AxisName::PU => p.p_u = v,
        AxisName::M => {
            if !(v >= 1.0 && v.fract() == 0.0 && v <= u32::MAX as f64) {
                return Err(RunError::config(format!("m must be a positive integer, got {v}")));
            }
            p.m = v as u32;
        }
    }
    Ok(p)
}
