//! Pico-cell validation model: per-link LOS draws, LOS/NLOS path loss and
//! lognormal shadowing, with distances in kilometres and powers in mW.
//!
//! User↔user links use the BS↔BS law, the only other peer-to-peer law the
//! model provides. Sectorized antenna gains are applied unchanged.

use alloc::format;

use super::{sample_with, sinr_with, Geometry, Propagation, SeedPolicy, SimSettings, Window, MIN_REALIZATIONS};
use crate::analytic::{OutageEstimate, Scenario};
use crate::math;
use crate::model::{db_to_linear, AntennaSystem, NetworkConfig, NodeKind};
use crate::Error;

/// Thermal noise density in dBm/Hz.
const THERMAL_NOISE_DBM_HZ: f64 = -174.0;

/// Path gain `10^{intercept/10} r^{−exponent}` with `r` in km.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawDb {
    pub intercept_db: f64,
    pub exponent: f64,
}

impl PowerLawDb {
    pub const fn new(intercept_db: f64, exponent: f64) -> Self {
        Self { intercept_db, exponent }
    }

    fn linear(&self) -> (f64, f64) {
        (db_to_linear(self.intercept_db), self.exponent)
    }
}

/// Parameters in the units they are usually quoted in. Converted once by
/// [`ThreeGppParams::model`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeGppParams {
    /// BSs per km². 10/km² is 0.1 per hectare.
    pub lambda_per_km2: f64,
    pub p_b_dbm: f64,
    pub p_u_dbm: f64,
    pub noise_figure_db: f64,
    pub bandwidth_hz: f64,
    /// Residual loopback relative to the node's own transmit power.
    pub sigma_l2_db: f64,
    pub rate: f64,
    /// `p_LOS(r) = 0.5 − min{0.5, a e^{−b/r}} + min{0.5, a e^{−r/c}}` with
    /// `(a, b, c)` here.
    pub los_coefficients: (f64, f64, f64),
    /// BS↔BS LOS below the breakpoint.
    pub bs_bs_los_near: PowerLawDb,
    /// BS↔BS LOS beyond the breakpoint.
    pub bs_bs_los_far: PowerLawDb,
    pub breakpoint_km: f64,
    pub bs_bs_nlos: PowerLawDb,
    pub bs_user_los: PowerLawDb,
    pub bs_user_nlos: PowerLawDb,
    pub shadow_bs_bs_db: f64,
    pub shadow_los_db: f64,
    pub shadow_nlos_db: f64,
    /// Links shorter than this are evaluated at this distance.
    pub min_distance_km: f64,
    pub window_km: f64,
    /// Treat every link as LOS.
    pub force_los: bool,
}

impl Default for ThreeGppParams {
    fn default() -> Self {
        Self {
            lambda_per_km2: 10.0,
            p_b_dbm: 24.0,
            p_u_dbm: 23.0,
            noise_figure_db: 5.0,
            bandwidth_hz: 10e6,
            sigma_l2_db: -30.0,
            rate: 1.0,
            los_coefficients: (5.0, 0.156, 0.03),
            bs_bs_los_near: PowerLawDb::new(-98.4, 2.0),
            bs_bs_los_far: PowerLawDb::new(-101.9, 4.0),
            breakpoint_km: 2.0 / 3.0,
            bs_bs_nlos: PowerLawDb::new(-169.4, 4.0),
            bs_user_los: PowerLawDb::new(-103.8, 2.09),
            bs_user_nlos: PowerLawDb::new(-145.4, 3.75),
            shadow_bs_bs_db: 6.0,
            shadow_los_db: 3.0,
            shadow_nlos_db: 4.0,
            min_distance_km: 0.01,
            window_km: 3.2,
            force_los: false,
        }
    }
}

impl ThreeGppParams {
    pub fn noise_dbm(&self) -> f64 {
        THERMAL_NOISE_DBM_HZ + 10.0 * math::log10(self.bandwidth_hz) + self.noise_figure_db
    }

    pub fn validate(&self) -> Result<(), Error> {
        let positive = [
            ("lambda_per_km2", self.lambda_per_km2),
            ("bandwidth_hz", self.bandwidth_hz),
            ("breakpoint_km", self.breakpoint_km),
            ("min_distance_km", self.min_distance_km),
            ("window_km", self.window_km),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [
            ("shadow_bs_bs_db", self.shadow_bs_bs_db),
            ("shadow_los_db", self.shadow_los_db),
            ("shadow_nlos_db", self.shadow_nlos_db),
            ("rate", self.rate),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::config(format!("{name} must be non-negative, got {v}")));
            }
        }
        let (a, b, c) = self.los_coefficients;
        if !(a >= 0.0 && b > 0.0 && c > 0.0) {
            return Err(Error::config("LOS coefficients must be (a ≥ 0, b > 0, c > 0)"));
        }
        Ok(())
    }

    pub fn model(&self) -> Result<ThreeGppModel, Error> {
        self.validate()?;
        let dbm = |x: f64| db_to_linear(x);
        let cfg = NetworkConfig {
            lambda: self.lambda_per_km2,
            alpha1: 4.0,
            alpha2: 4.0,
            p_b: dbm(self.p_b_dbm),
            p_u: dbm(self.p_u_dbm),
            sigma_n2: dbm(self.noise_dbm()),
            sigma_l2: db_to_linear(self.sigma_l2_db),
            rate: self.rate,
            bs_li_power: None,
        };
        cfg.validate()?;
        let ln10_over_10 = core::f64::consts::LN_10 / 10.0;
        Ok(ThreeGppModel {
            cfg,
            los_coefficients: self.los_coefficients,
            bs_bs_los_near: self.bs_bs_los_near.linear(),
            bs_bs_los_far: self.bs_bs_los_far.linear(),
            breakpoint: self.breakpoint_km,
            bs_bs_nlos: self.bs_bs_nlos.linear(),
            bs_user_los: self.bs_user_los.linear(),
            bs_user_nlos: self.bs_user_nlos.linear(),
            shadow_bs_bs: self.shadow_bs_bs_db * ln10_over_10,
            shadow_los: self.shadow_los_db * ln10_over_10,
            shadow_nlos: self.shadow_nlos_db * ln10_over_10,
            min_distance: self.min_distance_km,
            window: self.window_km,
            force_los: self.force_los,
        })
    }
}

/// Linear form of [`ThreeGppParams`]. Shadowing spreads are stored as natural
/// log-amplitudes, so a standard normal `z` contributes `e^{σz}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeGppModel {
    /// Density, powers (mW), noise (mW), loopback variance and rate.
    pub cfg: NetworkConfig,
    los_coefficients: (f64, f64, f64),
    bs_bs_los_near: (f64, f64),
    bs_bs_los_far: (f64, f64),
    breakpoint: f64,
    bs_bs_nlos: (f64, f64),
    bs_user_los: (f64, f64),
    bs_user_nlos: (f64, f64),
    shadow_bs_bs: f64,
    shadow_los: f64,
    shadow_nlos: f64,
    min_distance: f64,
    window: f64,
    force_los: bool,
}

fn law((k, e): (f64, f64), r: f64) -> f64 {
    k * math::powf(r, -e)
}

impl ThreeGppModel {
    pub fn los_probability(&self, r: f64) -> f64 {
        if self.force_los {
            return 1.0;
        }
        let (a, b, c) = self.los_coefficients;
        let p = 0.5 - (a * math::exp(-b / r)).min(0.5) + (a * math::exp(-r / c)).min(0.5);
        p.clamp(0.0, 1.0)
    }

    /// Mean path gain (no shadowing) of a link of length `r` km.
    pub fn path_gain_mean(&self, peer_to_peer: bool, los: bool, r: f64) -> f64 {
        let r = r.max(self.min_distance);
        match (peer_to_peer, los) {
            (true, true) if r < self.breakpoint => law(self.bs_bs_los_near, r),
            (true, true) => law(self.bs_bs_los_far, r),
            (true, false) => law(self.bs_bs_nlos, r),
            (false, true) => law(self.bs_user_los, r),
            (false, false) => law(self.bs_user_nlos, r),
        }
    }

    pub fn settings(&self) -> SimSettings {
        SimSettings {
            window: Window::Radius(self.window),
            geometry: Geometry::Exact,
            tail_correction: false,
            ..SimSettings::default()
        }
    }
}

impl Propagation for ThreeGppModel {
    fn path_gain(&self, rx: NodeKind, tx: NodeKind, d2: f64, los_draw: f64, shadow_draw: f64) -> f64 {
        let r = math::sqrt(d2);
        let peer = rx == tx;
        let los = los_draw < self.los_probability(r.max(self.min_distance));
        let spread = match (peer, los) {
            (true, _) => self.shadow_bs_bs,
            (false, true) => self.shadow_los,
            (false, false) => self.shadow_nlos,
        };
        self.path_gain_mean(peer, los, r) * math::exp(spread * shadow_draw)
    }
}

pub fn estimate_outage_3gpp(
    scenario: Scenario,
    params: &ThreeGppParams,
    ant: &AntennaSystem,
    n: u64,
    seed: u64,
) -> Result<OutageEstimate, Error> {
    let model = params.model()?;
    ant.validate()?;
    if n < MIN_REALIZATIONS {
        return Err(Error::config(format!(
            "at least {MIN_REALIZATIONS} realizations are required, got {n}"
        )));
    }
    let seeds = SeedPolicy::new(seed);
    let outages = (0..n)
        .filter(|&i| outage_indicator_3gpp(scenario, &model, ant, &seeds, i))
        .count() as u64;
    Ok(OutageEstimate::monte_carlo(outages, n))
}

/// Per-realization indicator behind [`estimate_outage_3gpp`].
pub fn outage_indicator_3gpp(
    scenario: Scenario,
    model: &ThreeGppModel,
    ant: &AntennaSystem,
    seeds: &SeedPolicy,
    index: u64,
) -> bool {
    let settings = model.settings();
    let real = sample_with(scenario, &model.cfg, ant, &settings, seeds, index, true);
    sinr_with(&real, &model.cfg, ant, &settings, model).is_outage(model.cfg.tau())
}
