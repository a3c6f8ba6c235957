//! Equal-parameter special cases: `M_b = M_u = M`, `γ_b = γ_u = γ`,
//! `P_b = P_u` and no noise. Interferers are kept beyond the serving distance
//! `r`, and uplink user fields are treated as homogeneous, which turns every
//! transform into `exp(−𝒢 λπr²)` for a scalar `𝒢`.

use alloc::format;

use super::{radial_average, OutageEstimate, Scenario};
use crate::math::{self, PI};
use crate::model::{sector_offsets, AntennaSystem, NetworkConfig, SuppressionMode};
use crate::specfun::{csc2pi_unchecked, hyp_f_times, integrate_finite, QuadratureEstimate, QuadratureSpec};
use crate::Error;

const ROUTE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialCaseParams {
    /// `None` is the limit `M → ∞`, where only side lobes interfere.
    pub sectors: Option<u32>,
    pub gamma: f64,
    /// `Λᵢ`: fraction of interferers in each orientation case.
    pub weights: [f64; 4],
    /// `Γᵢ`: link gain of each case relative to the main-lobe pair.
    pub gains: [f64; 4],
    pub theta_max: f64,
    pub suppression: SuppressionMode,
    pub equal_sectors: bool,
    pub equal_side_lobes: bool,
    pub equal_powers: bool,
    pub noiseless: bool,
}

impl SpecialCaseParams {
    pub fn new(m: u32, gamma: f64) -> Result<Self, Error> {
        if m == 0 {
            return Err(Error::config("sector count must be at least 1"));
        }
        Self::build(Some(m), gamma)
    }

    pub fn new_asymptotic(gamma: f64) -> Result<Self, Error> {
        Self::build(None, gamma)
    }

    fn build(sectors: Option<u32>, gamma: f64) -> Result<Self, Error> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::config(format!("side-lobe ratio must lie in [0, 1], got {gamma}")));
        }
        let weights = match sectors {
            Some(m) => {
                let m = f64::from(m);
                let m2 = m * m;
                [1.0 / m2, (m - 1.0) / m2, (m - 1.0) / m2, (m - 1.0) * (m - 1.0) / m2]
            }
            None => [0.0, 0.0, 0.0, 1.0],
        };
        Ok(Self {
            sectors,
            gamma,
            weights,
            gains: [1.0, gamma, gamma, gamma * gamma],
            theta_max: 2.0 * PI / 3.0,
            suppression: SuppressionMode::Clamped,
            equal_sectors: true,
            equal_side_lobes: true,
            equal_powers: true,
            noiseless: true,
        })
    }

    /// Reads the antenna system and records which of the equal-parameter
    /// assumptions hold. Evaluators refuse to run unless all of them do.
    pub fn from_config(cfg: &NetworkConfig, ant: &AntennaSystem) -> Result<Self, Error> {
        let mut p = Self::new(ant.m_b, ant.gamma_b)?;
        p.record(cfg, ant);
        p.equal_sectors = ant.m_b == ant.m_u;
        Ok(p)
    }

    /// As [`from_config`](Self::from_config) in the limit of many sectors.
    pub fn asymptotic(cfg: &NetworkConfig, ant: &AntennaSystem) -> Result<Self, Error> {
        let mut p = Self::new_asymptotic(ant.gamma_b)?;
        p.record(cfg, ant);
        Ok(p)
    }

    fn record(&mut self, cfg: &NetworkConfig, ant: &AntennaSystem) {
        self.theta_max = ant.theta_max;
        self.suppression = ant.suppression;
        self.equal_side_lobes = ant.gamma_b == ant.gamma_u;
        self.equal_powers = cfg.p_b == cfg.p_u;
        self.noiseless = cfg.sigma_n2 == 0.0;
    }

    pub fn with_theta_max(mut self, theta_max: f64) -> Self {
        self.theta_max = theta_max;
        self
    }

    pub fn with_suppression(mut self, mode: SuppressionMode) -> Self {
        self.suppression = mode;
        self
    }

    /// Same parameters with `M → ∞`.
    pub fn asymptotic_limit(&self) -> Self {
        Self {
            sectors: None,
            weights: [0.0, 0.0, 0.0, 1.0],
            ..*self
        }
    }

    pub fn require(&self) -> Result<(), Error> {
        let checks = [
            (self.equal_sectors, "BSs and users must have the same sector count"),
            (self.equal_side_lobes, "BSs and users must have the same side-lobe ratio"),
            (self.equal_powers, "BSs and users must transmit with the same power"),
            (self.noiseless, "noise variance must be zero"),
        ];
        match checks.iter().find(|(ok, _)| !ok) {
            Some((_, msg)) => Err(Error::config(format!("special-case evaluation needs equal parameters: {msg}"))),
            None => Ok(()),
        }
    }

    fn terms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.weights.iter().copied().zip(self.gains.iter().copied()).filter(|(w, _)| *w > 0.0)
    }

    /// `𝒢` of the two-node downlink at serving distance `r`.
    pub fn g_2d(&self, cfg: &NetworkConfig, r: f64) -> f64 {
        self.g(Scenario::TwoNodeDown, cfg, r)
    }

    /// `𝒢` shared by both uplink architectures.
    pub fn g_uplink(&self, cfg: &NetworkConfig, r: f64) -> f64 {
        self.g(Scenario::TwoNodeUp, cfg, r)
    }

    /// `𝒢` of the three-node downlink, whose intra-cell uplink user may sit
    /// anywhere.
    pub fn g_3d(&self, cfg: &NetworkConfig, r: f64) -> f64 {
        self.g(Scenario::ThreeNodeDown, cfg, r)
    }

    pub fn g(&self, scenario: Scenario, cfg: &NetworkConfig, r: f64) -> f64 {
        let (bs, users) = self.g_terms(scenario, cfg, r);
        1.0 + 2.0 * (bs + users)
    }

    /// BS-field and user-field parts of `𝒢 = 1 + 2(bs + users)`.
    pub fn g_terms(&self, scenario: Scenario, cfg: &NetworkConfig, r: f64) -> (f64, f64) {
        let (a1, a2) = (cfg.alpha1, cfg.alpha2);
        let tau = cfg.tau();
        let mut bs = 0.0;
        let mut users = 0.0;
        match scenario {
            Scenario::TwoNodeDown => {
                let c = path_ratio(cfg, r);
                for (w, g) in self.terms() {
                    bs += w * hyp_f_times(a1, g * tau) / (a1 - 2.0);
                    users += w * hyp_f_times(a2, c * g * tau) / (a2 - 2.0);
                }
            }
            Scenario::ThreeNodeDown => {
                let spread = if a1 == a2 { 1.0 } else { math::powf(r, 2.0 * a1 / a2 - 2.0) };
                let k = PI * spread / a2 * csc2pi_unchecked(a2);
                for (w, g) in self.terms() {
                    bs += w * hyp_f_times(a1, g * tau) / (a1 - 2.0);
                    users += w * k * math::powf(g * tau, 2.0 / a2);
                }
            }
            Scenario::TwoNodeUp | Scenario::ThreeNodeUp => {
                let c = path_ratio(cfg, r);
                let k = PI / a1 * csc2pi_unchecked(a1);
                for (w, g) in self.terms() {
                    users += w * k * math::powf(g * tau, 2.0 / a1);
                    bs += w * hyp_f_times(a2, c * g * tau) / (a2 - 2.0);
                }
            }
        }
        (bs, users)
    }
}

/// `r^{α₁−α₂}`, exactly 1 when the exponents agree.
fn path_ratio(cfg: &NetworkConfig, r: f64) -> f64 {
    if cfg.alpha1 == cfg.alpha2 {
        1.0
    } else {
        math::powf(r, cfg.alpha1 - cfg.alpha2)
    }
}

/// `k = σℓ² τ r^{α₁}` scaled by the ratio of loopback power to serving power.
pub(crate) fn loopback_load(scenario: Scenario, cfg: &NetworkConfig, r: f64) -> f64 {
    let ratio = if scenario.is_uplink() {
        cfg.bs_li_power() / cfg.p_u
    } else {
        cfg.p_u / cfg.p_b
    };
    ratio * cfg.sigma_l2 * cfg.tau() * math::powf(r, cfg.alpha1)
}

/// Loopback transform in the special case with load `k = σℓ²τr^{α₁}`.
pub fn li_factor_special(
    scenario: Scenario,
    k: f64,
    special: &SpecialCaseParams,
    quad: &QuadratureSpec,
) -> Result<f64, Error> {
    if k == 0.0 || scenario == Scenario::ThreeNodeDown {
        return Ok(1.0);
    }
    if scenario != Scenario::ThreeNodeUp {
        return Ok(1.0 / (1.0 + k));
    }
    let gk = special.gamma * k;
    match special.sectors {
        None => li_factor_asymptotic_3u(gk, special.theta_max, special.suppression, quad),
        Some(m) => {
            let mut sum = 1.0 / (1.0 + k);
            for theta in sector_offsets(m).skip(1) {
                sum += 1.0 / (1.0 + gk * special.suppression.factor(theta, special.theta_max));
            }
            Ok(sum / f64::from(m))
        }
    }
}

/// `(1/2π) ∫_{−π}^{π} dθ / (1 + x f(θ))`, the loopback transform of a BS with
/// infinitely many sectors at side-lobe load `x = γk`.
pub fn li_factor_asymptotic_3u(
    x: f64,
    theta_max: f64,
    mode: SuppressionMode,
    quad: &QuadratureSpec,
) -> Result<f64, Error> {
    if x == 0.0 {
        return Ok(1.0);
    }
    let f = |t: f64| 1.0 / (1.0 + x * mode.factor(t, theta_max));
    // The clamp starts to bind at |θ| = 2θmax.
    let knee = 2.0 * theta_max;
    let total = if mode == SuppressionMode::Clamped && knee < PI {
        integrate_finite(f, 0.0, knee, quad)? + integrate_finite(f, knee, PI, quad)?
    } else {
        integrate_finite(f, 0.0, PI, quad)?
    };
    Ok(total / PI)
}

/// `1 − ∫₀^∞ e^{−𝒢(r) u} ℒ_ℓ(r) du` by quadrature.
fn special_integral(
    scenario: Scenario,
    cfg: &NetworkConfig,
    special: &SpecialCaseParams,
    quad: &QuadratureSpec,
) -> Result<OutageEstimate, Error> {
    let success = special_success_with(scenario, cfg, special, quad, |r| special.g(scenario, cfg, r))?;
    OutageEstimate::from_success(success)
}

/// `∫₀^∞ e^{−𝒢(r) u} ℒ_ℓ(r) du` for an arbitrary `𝒢`.
pub(crate) fn special_success_with(
    scenario: Scenario,
    cfg: &NetworkConfig,
    special: &SpecialCaseParams,
    quad: &QuadratureSpec,
    g: impl Fn(f64) -> f64,
) -> Result<QuadratureEstimate, Error> {
    let inner = quad.inner();
    radial_average(cfg, quad, |u, r| {
        let tail = math::exp(-(g(r) - 1.0) * u);
        if tail == 0.0 {
            return Ok(0.0);
        }
        Ok(tail * li_factor_special(scenario, loopback_load(scenario, cfg, r), special, &inner)?)
    })
}

fn special_outage(
    scenario: Scenario,
    cfg: &NetworkConfig,
    special: &SpecialCaseParams,
    quad: &QuadratureSpec,
) -> Result<OutageEstimate, Error> {
    cfg.validate()?;
    special.require()?;
    if cfg.tau() == 0.0 {
        return OutageEstimate::closed_form(0.0);
    }
    let no_loopback = cfg.sigma_l2 == 0.0 || scenario == Scenario::ThreeNodeDown;
    if no_loopback && cfg.alpha1 == cfg.alpha2 {
        return OutageEstimate::closed_form(1.0 - 1.0 / special.g(scenario, cfg, 1.0));
    }
    special_integral(scenario, cfg, special, quad)
}

/// Outage of an FD-mode node (2D, 2U or 3U) with interferers kept beyond the
/// serving distance.
pub fn outage_approx_fd(
    scenario: Scenario,
    cfg: &NetworkConfig,
    special: &SpecialCaseParams,
    quad: &QuadratureSpec,
) -> Result<OutageEstimate, Error> {
    if scenario == Scenario::ThreeNodeDown {
        return Err(Error::config("the three-node downlink has no loopback; use outage_3d_special"));
    }
    special_outage(scenario, cfg, special, quad)
}

/// Three-node downlink outage. With equal exponents the closed form
/// `1 − 1/𝒢_3D` is returned after checking it against the quadrature route.
pub fn outage_3d_special(
    cfg: &NetworkConfig,
    special: &SpecialCaseParams,
    quad: &QuadratureSpec,
) -> Result<OutageEstimate, Error> {
    cfg.validate()?;
    special.require()?;
    if cfg.tau() == 0.0 {
        return OutageEstimate::closed_form(0.0);
    }
    let integral = special_integral(Scenario::ThreeNodeDown, cfg, special, quad)?;
    if cfg.alpha1 != cfg.alpha2 {
        return Ok(integral);
    }
    let closed = OutageEstimate::closed_form(1.0 - 1.0 / special.g_3d(cfg, 1.0))?;
    check_routes("closed form", "quadrature", closed.value, integral.value)?;
    Ok(closed)
}

/// Special-case outage by quadrature alone, skipping any closed form.
pub fn outage_special_quadrature(
    scenario: Scenario,
    cfg: &NetworkConfig,
    special: &SpecialCaseParams,
    quad: &QuadratureSpec,
) -> Result<OutageEstimate, Error> {
    cfg.validate()?;
    special.require()?;
    if cfg.tau() == 0.0 {
        return OutageEstimate::closed_form(0.0);
    }
    special_integral(scenario, cfg, special, quad)
}

/// Outage with `M → ∞`, where interference arrives only through side lobes
/// and the three-node BS averages its loopback over a continuum of angles.
pub fn outage_asymptotic(
    scenario: Scenario,
    cfg: &NetworkConfig,
    special: &SpecialCaseParams,
    quad: &QuadratureSpec,
) -> Result<OutageEstimate, Error> {
    special_outage(scenario, cfg, &special.asymptotic_limit(), quad)
}

/// Outage for `α₁ = α₂ = 4` through the closed-form `𝒴` constants. Without
/// loopback this is `1 − 1/𝒴`; otherwise the one-dimensional integral over
/// `υ = r²` is evaluated.
pub fn outage_alpha4_closed(
    scenario: Scenario,
    cfg: &NetworkConfig,
    special: &SpecialCaseParams,
    quad: &QuadratureSpec,
) -> Result<OutageEstimate, Error> {
    if cfg.alpha1 != 4.0 || cfg.alpha2 != 4.0 {
        return Err(Error::domain(
            "outage_alpha4_closed",
            format!("needs α₁ = α₂ = 4, got ({}, {})", cfg.alpha1, cfg.alpha2),
        ));
    }
    if scenario == Scenario::ThreeNodeDown {
        return Err(Error::config("the three-node downlink has no loopback; use outage_3d_special"));
    }
    cfg.validate()?;
    special.require()?;
    let tau = cfg.tau();
    if tau == 0.0 {
        return OutageEstimate::closed_form(0.0);
    }
    let y = match scenario {
        Scenario::TwoNodeDown => {
            1.0 + 2.0 * special.terms().map(|(w, g)| w * hyp_f_times(4.0, g * tau)).sum::<f64>()
        }
        _ => {
            1.0 + special
                .terms()
                .map(|(w, g)| w * (PI / 2.0 * math::sqrt(tau * g) + hyp_f_times(4.0, g * tau)))
                .sum::<f64>()
        }
    };
    if cfg.sigma_l2 == 0.0 {
        return OutageEstimate::closed_form(1.0 - 1.0 / y);
    }
    let inner = quad.inner();
    let success = radial_average(cfg, quad, |u, _| {
        let tail = math::exp(-(y - 1.0) * u);
        if tail == 0.0 {
            return Ok(0.0);
        }
        let upsilon = u / (cfg.lambda * PI);
        let k = loopback_load(scenario, cfg, 1.0) * upsilon * upsilon;
        Ok(tail * li_factor_special(scenario, k, special, &inner)?)
    })?;
    OutageEstimate::from_success(success)
}

fn check_routes(route_a: &'static str, route_b: &'static str, a: f64, b: f64) -> Result<(), Error> {
    let scale = a.abs().max(b.abs());
    if (a - b).abs() <= ROUTE_TOLERANCE * scale.max(f64::MIN_POSITIVE) {
        Ok(())
    } else {
        Err(Error::RouteMismatch {
            route_a,
            route_b,
            value_a: a,
            value_b: b,
        })
    }
}
