//! Monte Carlo simulation of Poisson networks.
//!
//! Each realization places the typical receiver at the origin, draws its
//! serving link, the interfering BS and user fields inside a disk window, and
//! every fading, orientation and loopback variable. Realization `i` uses its
//! own ChaCha8 streams keyed by `(seed, i)`, so estimates are bit-identical
//! however realizations are scheduled across workers.

mod sample;
pub mod threegpp;

use alloc::format;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::analytic::{OutageEstimate, Scenario};
use crate::composite::{CompositeMix, CompositeNetwork, Link};
use crate::math::{self, PI};
use crate::model::{AntennaSystem, NetworkConfig, NodeKind};
use crate::Error;

pub use sample::{sample_realization, Interferer, LoopbackDraw, NetworkRealization, ServingLink};
pub(crate) use sample::sample_with;

/// Smallest realization count accepted by the estimators.
pub const MIN_REALIZATIONS: u64 = 100;

/// Expected BS count of the default window: radius 100 at `λ = 10⁻²`.
pub const DEFAULT_WINDOW_NODES: f64 = 100.0 * PI;

/// Master seed from which every per-realization stream is derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedPolicy {
    pub master: u64,
}

impl SeedPolicy {
    pub fn new(master: u64) -> Self {
        Self { master }
    }

    /// Generator for one random process of realization `index`. The key holds
    /// `(master, index)` verbatim, so distinct pairs never share a stream.
    pub fn rng(&self, index: u64, process: u64) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.master.to_le_bytes());
        key[8..16].copy_from_slice(&index.to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(process);
        rng
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Window {
    Radius(f64),
    /// Radius chosen so the window holds this many BSs on average.
    ExpectedNodes(f64),
}

/// Which interferers are kept near the typical receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Geometry {
    /// Mirrors the general expressions: on the downlink every other BS lies
    /// beyond the serving BS and, at a two-node user, the nearest user is
    /// removed; on the uplink the nearest other BS is removed and out-of-cell
    /// users at distance `d` are kept with probability `1 − e^{−λπd²}`.
    #[default]
    Exact,
    /// Mirrors the equal-parameter special cases: BSs and two-node downlink
    /// users lie beyond the serving distance, other user fields are
    /// homogeneous over the whole window.
    GuardZone,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AntennaModel {
    #[default]
    Sectorized,
    /// Many-sector limit: the serving link has unit gain, interferers arrive
    /// through side lobes only (`γ_i γ_j`), and a three-node BS's sector
    /// offset is continuous.
    SideLobeOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orientation {
    /// Cases follow from positions and lobe directions.
    #[default]
    Geometric,
    /// Cases are drawn directly with probabilities `1/M_i` and `1/M_j`.
    CaseSampling,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Association {
    /// `λ'/λ` of the dense user field.
    pub user_density_ratio: f64,
}

impl Default for Association {
    fn default() -> Self {
        Self {
            user_density_ratio: 20.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSettings {
    pub window: Window,
    pub geometry: Geometry,
    pub antenna_model: AntennaModel,
    pub orientation: Orientation,
    /// Adds the mean interference from beyond the window,
    /// `2πλPḡ w^{2−α}/(α−2)` per field.
    pub tail_correction: bool,
    /// Draws the typical cell's architecture and thins uplink users.
    pub mix: Option<CompositeMix>,
    pub association: Option<Association>,
}

impl Default for SimSettings {
    fn default() -> Self {
        Self {
            window: Window::ExpectedNodes(DEFAULT_WINDOW_NODES),
            geometry: Geometry::Exact,
            antenna_model: AntennaModel::Sectorized,
            orientation: Orientation::Geometric,
            tail_correction: true,
            mix: None,
            association: None,
        }
    }
}

impl SimSettings {
    /// Settings matching the composite expressions: guard zones, side-lobe
    /// interference only, and Bernoulli architectures.
    pub fn composite(mix: CompositeMix) -> Self {
        Self {
            geometry: Geometry::GuardZone,
            antenna_model: AntennaModel::SideLobeOnly,
            mix: Some(mix),
            ..Self::default()
        }
    }

    /// Settings matching the special-case expressions with `M` sectors
    /// (`sectors = None` for the many-sector limit).
    pub fn special(sectors: Option<u32>) -> Self {
        Self {
            geometry: Geometry::GuardZone,
            antenna_model: if sectors.is_some() {
                AntennaModel::Sectorized
            } else {
                AntennaModel::SideLobeOnly
            },
            ..Self::default()
        }
    }

    pub fn window_radius(&self, lambda: f64) -> f64 {
        match self.window {
            Window::Radius(r) => r,
            Window::ExpectedNodes(n) => math::sqrt(n / (lambda * PI)),
        }
    }

    pub fn validate(&self, lambda: f64) -> Result<(), Error> {
        let w = self.window_radius(lambda);
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::config(format!("window radius must be positive, got {w}")));
        }
        if let Some(mix) = self.mix {
            mix.validate()?;
        }
        if let Some(a) = self.association {
            if !(a.user_density_ratio >= 1.0 && a.user_density_ratio.is_finite()) {
                return Err(Error::config(format!(
                    "user density ratio must be at least 1, got {}",
                    a.user_density_ratio
                )));
            }
        }
        Ok(())
    }
}

/// SINR of one realization. A receiver with nothing but its desired signal
/// has unbounded SINR and is never in outage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sinr {
    Finite(f64),
    Unbounded,
}

impl Sinr {
    /// `log₂(1 + SINR) < R`, i.e. `SINR < τ`.
    pub fn is_outage(self, tau: f64) -> bool {
        match self {
            Sinr::Finite(v) => v < tau,
            Sinr::Unbounded => false,
        }
    }
}

/// Large-scale gain of a link at squared distance `d2`.
pub(crate) trait Propagation {
    fn path_gain(&self, rx: NodeKind, tx: NodeKind, d2: f64, los_draw: f64, shadow_draw: f64) -> f64;
}

/// `d^{−α}` with `α₁` on BS↔user links and `α₂` otherwise.
pub(crate) struct PowerLaw {
    pub alpha1: f64,
    pub alpha2: f64,
}

impl Propagation for PowerLaw {
    fn path_gain(&self, rx: NodeKind, tx: NodeKind, d2: f64, _: f64, _: f64) -> f64 {
        let alpha = if rx == tx { self.alpha2 } else { self.alpha1 };
        inverse_power(d2, alpha)
    }
}

/// `(d²)^{−α/2}` with shortcuts for the common exponents.
fn inverse_power(d2: f64, alpha: f64) -> f64 {
    if alpha == 4.0 {
        1.0 / (d2 * d2)
    } else if alpha == 3.0 {
        1.0 / (d2 * math::sqrt(d2))
    } else {
        math::powf(d2, -alpha / 2.0)
    }
}

/// Antenna gains seen by one receiver kind.
struct GainTable {
    desired: f64,
    bs: [f64; 4],
    users: [f64; 4],
    bs_mean: f64,
    users_mean: f64,
}

impl GainTable {
    fn new(ant: &AntennaSystem, model: AntennaModel, rx: NodeKind) -> Self {
        match model {
            AntennaModel::Sectorized => {
                let bs = ant.thinning(rx, NodeKind::Bs, 1.0);
                let users = ant.thinning(rx, NodeKind::User, 1.0);
                Self {
                    desired: ant.main_gain(NodeKind::Bs) * ant.main_gain(NodeKind::User),
                    bs: bs.entries.map(|e| e.power_gain),
                    users: users.entries.map(|e| e.power_gain),
                    bs_mean: bs.mean_gain(),
                    users_mean: users.mean_gain(),
                }
            }
            AntennaModel::SideLobeOnly => {
                let g = ant.side_lobe_ratio(rx);
                let bs = g * ant.gamma_b;
                let users = g * ant.gamma_u;
                Self {
                    desired: 1.0,
                    bs: [bs; 4],
                    users: [users; 4],
                    bs_mean: bs,
                    users_mean: users,
                }
            }
        }
    }

    fn gain(&self, kind: NodeKind, case: u8) -> f64 {
        let i = usize::from(case - 1);
        match kind {
            NodeKind::Bs => self.bs[i],
            NodeKind::User => self.users[i],
        }
    }
}

/// Loopback power gain, before the `σℓ²`-scaled draw.
fn loopback_gain(scenario: Scenario, ant: &AntennaSystem, model: AntennaModel, theta: f64) -> f64 {
    let rx = scenario.receiver();
    match (model, scenario) {
        (AntennaModel::Sectorized, Scenario::ThreeNodeUp) => {
            let (g, h) = ant.link_gains(NodeKind::Bs);
            if theta == 0.0 {
                g * g
            } else {
                g * h * ant.suppression_factor(theta)
            }
        }
        (AntennaModel::Sectorized, _) => {
            let g = ant.main_gain(rx);
            g * g
        }
        (AntennaModel::SideLobeOnly, Scenario::ThreeNodeUp) => ant.gamma_b * ant.suppression_factor(theta),
        (AntennaModel::SideLobeOnly, _) => 1.0,
    }
}

/// Mean interference from nodes beyond the window radius.
fn tail_interference(real: &NetworkRealization, cfg: &NetworkConfig, gains: &GainTable) -> f64 {
    let w2 = real.window_radius * real.window_radius;
    let rx = real.scenario.receiver();
    let field = |kind: NodeKind, density: f64, power: f64, mean_gain: f64| {
        let alpha = if kind == rx { cfg.alpha2 } else { cfg.alpha1 };
        2.0 * PI * density * power * mean_gain * math::powf(w2, 1.0 - alpha / 2.0) / (alpha - 2.0)
    };
    field(NodeKind::Bs, cfg.lambda, cfg.p_b, gains.bs_mean)
        + field(NodeKind::User, cfg.lambda * real.user_activity, cfg.p_u, gains.users_mean)
}

/// SINR of `real` with power-law path loss.
pub fn sinr_sample(real: &NetworkRealization, cfg: &NetworkConfig, ant: &AntennaSystem, settings: &SimSettings) -> Sinr {
    let law = PowerLaw {
        alpha1: cfg.alpha1,
        alpha2: cfg.alpha2,
    };
    sinr_with(real, cfg, ant, settings, &law)
}

pub(crate) fn sinr_with(
    real: &NetworkRealization,
    cfg: &NetworkConfig,
    ant: &AntennaSystem,
    settings: &SimSettings,
    prop: &impl Propagation,
) -> Sinr {
    let scenario = real.scenario;
    let rx = scenario.receiver();
    let (serving_kind, serving_power) = if scenario.is_uplink() {
        (NodeKind::User, cfg.p_u)
    } else {
        (NodeKind::Bs, cfg.p_b)
    };
    let gains = GainTable::new(ant, settings.antenna_model, rx);
    let s = &real.serving;
    let desired = serving_power
        * gains.desired
        * s.fading
        * prop.path_gain(rx, serving_kind, s.distance * s.distance, s.los_draw, s.shadow_draw);

    let mut denom = cfg.sigma_n2;
    for i in &real.interferers {
        let power = match i.kind {
            NodeKind::Bs => cfg.p_b,
            NodeKind::User => cfg.p_u,
        };
        denom += power * gains.gain(i.kind, i.case) * i.fading * prop.path_gain(rx, i.kind, i.distance2, i.los_draw, i.shadow_draw);
    }
    if settings.tail_correction {
        denom += tail_interference(real, cfg, &gains);
    }
    if let Some(lb) = real.loopback {
        let power = if scenario.is_uplink() { cfg.bs_li_power() } else { cfg.p_u };
        denom += power * loopback_gain(scenario, ant, settings.antenna_model, lb.theta) * lb.gain;
    }
    if denom > 0.0 {
        Sinr::Finite(desired / denom)
    } else {
        Sinr::Unbounded
    }
}

fn check_inputs(cfg: &NetworkConfig, ant: &AntennaSystem, settings: &SimSettings, n: u64) -> Result<(), Error> {
    cfg.validate()?;
    ant.validate()?;
    settings.validate(cfg.lambda)?;
    if n < MIN_REALIZATIONS {
        return Err(Error::config(format!(
            "at least {MIN_REALIZATIONS} realizations are required, got {n}"
        )));
    }
    Ok(())
}

/// Outage indicator of realization `index`. Summing these over
/// `0..n` in any order reproduces [`estimate_outage_mc_with`].
pub fn outage_indicator(
    scenario: Scenario,
    cfg: &NetworkConfig,
    ant: &AntennaSystem,
    settings: &SimSettings,
    seeds: &SeedPolicy,
    index: u64,
) -> bool {
    let real = sample_realization(scenario, cfg, ant, settings, seeds, index);
    sinr_sample(&real, cfg, ant, settings).is_outage(cfg.tau())
}

/// Outage estimate from `n` realizations with the default settings.
pub fn estimate_outage_mc(
    scenario: Scenario,
    cfg: &NetworkConfig,
    ant: &AntennaSystem,
    n: u64,
    seed: u64,
) -> Result<OutageEstimate, Error> {
    estimate_outage_mc_with(scenario, cfg, ant, &SimSettings::default(), n, seed)
}

pub fn estimate_outage_mc_with(
    scenario: Scenario,
    cfg: &NetworkConfig,
    ant: &AntennaSystem,
    settings: &SimSettings,
    n: u64,
    seed: u64,
) -> Result<OutageEstimate, Error> {
    check_inputs(cfg, ant, settings, n)?;
    let seeds = SeedPolicy::new(seed);
    let outages = (0..n)
        .filter(|&i| outage_indicator(scenario, cfg, ant, settings, &seeds, i))
        .count() as u64;
    Ok(OutageEstimate::monte_carlo(outages, n))
}

/// Settings and scenario that simulate `link` of a composite network.
pub fn composite_job(
    net: &CompositeNetwork,
    link: Link,
    mix: &CompositeMix,
) -> Result<(Scenario, NetworkConfig, SimSettings), Error> {
    net.validate()?;
    mix.validate()?;
    let scenario = match link {
        Link::Downlink => Scenario::TwoNodeDown,
        Link::Uplink => Scenario::TwoNodeUp,
    };
    Ok((scenario, *net.config(link), SimSettings::composite(*mix)))
}

/// `Π_d` or `Π_u` by simulation: each realization's typical cell is two-node
/// with probability `p_2n`, and each other cell's uplink user transmits with
/// probability `q`.
pub fn estimate_composite_mc(
    net: &CompositeNetwork,
    link: Link,
    mix: &CompositeMix,
    n: u64,
    seed: u64,
) -> Result<OutageEstimate, Error> {
    let (scenario, cfg, settings) = composite_job(net, link, mix)?;
    estimate_outage_mc_with(scenario, &cfg, &net.antennas, &settings, n, seed)
}
