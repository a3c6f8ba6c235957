//! Outage probability from the stochastic-geometry expressions.
//!
//! The typical receiver sits at the origin and its serving node at distance
//! `r` with density `2πλr e^{−λπr²}`. All outer integrals are taken over
//! `u = λπr²`, so `P = 1 − ∫₀^∞ e^{−u} · (transforms at r(u)) du`.

mod laplace;
mod special;

use core::fmt;
use core::str::FromStr;

use alloc::string::String;

use crate::math;
use crate::model::{AntennaSystem, NetworkConfig, NodeKind};
use crate::specfun::{integrate_fallible, Domain, QuadratureEstimate, QuadratureSpec};
use crate::Error;

pub use laplace::{
    laplace_interference_bs_down, laplace_interference_bs_up, laplace_interference_user_2d,
    laplace_interference_user_3d, laplace_interference_user_3u, laplace_li_2node, laplace_li_3u,
};
pub(crate) use special::special_success_with;
pub use special::{
    li_factor_asymptotic_3u, li_factor_special, outage_3d_special, outage_alpha4_closed, outage_approx_fd,
    outage_asymptotic, outage_special_quadrature, SpecialCaseParams,
};

/// Architecture and link direction of the typical receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scenario {
    /// Two-node downlink: FD user receiving from an FD BS.
    TwoNodeDown,
    /// Two-node uplink: FD BS receiving from an FD user.
    TwoNodeUp,
    /// Three-node downlink: HD user receiving from an FD BS.
    ThreeNodeDown,
    /// Three-node uplink: FD BS receiving from an HD user.
    ThreeNodeUp,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [
        Scenario::TwoNodeDown,
        Scenario::ThreeNodeDown,
        Scenario::TwoNodeUp,
        Scenario::ThreeNodeUp,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Scenario::TwoNodeDown => "2D",
            Scenario::TwoNodeUp => "2U",
            Scenario::ThreeNodeDown => "3D",
            Scenario::ThreeNodeUp => "3U",
        }
    }

    pub fn is_uplink(self) -> bool {
        matches!(self, Scenario::TwoNodeUp | Scenario::ThreeNodeUp)
    }

    pub fn is_two_node(self) -> bool {
        matches!(self, Scenario::TwoNodeDown | Scenario::TwoNodeUp)
    }

    /// The HD downlink user is the only receiver without loopback.
    pub fn has_loopback(self) -> bool {
        self != Scenario::ThreeNodeDown
    }

    pub fn receiver(self) -> NodeKind {
        if self.is_uplink() {
            NodeKind::Bs
        } else {
            NodeKind::User
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_uppercase().as_str() {
            "2D" => Ok(Scenario::TwoNodeDown),
            "2U" => Ok(Scenario::TwoNodeUp),
            "3D" => Ok(Scenario::ThreeNodeDown),
            "3U" => Ok(Scenario::ThreeNodeUp),
            _ => Err(Error::config(alloc::format!("unknown scenario {s:?}; expected 2D, 2U, 3D or 3U"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Quadrature,
    ClosedForm,
    MonteCarlo,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Quadrature => "quadrature",
            Method::ClosedForm => "closed-form",
            Method::MonteCarlo => "monte-carlo",
        }
    }
}

/// Slack allowed outside `[0, 1]` before a probability is treated as wrong
/// rather than rounded.
pub const PROBABILITY_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageEstimate {
    pub value: f64,
    pub method: Method,
    pub std_error: Option<f64>,
    pub n_realizations: Option<u64>,
    pub error_bound: Option<f64>,
}

impl OutageEstimate {
    pub fn closed_form(raw: f64) -> Result<Self, Error> {
        Ok(Self {
            value: clamp_probability(raw)?,
            method: Method::ClosedForm,
            std_error: None,
            n_realizations: None,
            error_bound: None,
        })
    }

    pub fn quadrature(raw: f64, error_bound: f64) -> Result<Self, Error> {
        Ok(Self {
            value: clamp_probability(raw)?,
            method: Method::Quadrature,
            std_error: None,
            n_realizations: None,
            error_bound: Some(error_bound),
        })
    }

    /// `1 − ∫…` from a quadrature estimate of the success probability.
    pub(crate) fn from_success(success: QuadratureEstimate) -> Result<Self, Error> {
        Self::quadrature(1.0 - success.value, success.error)
    }

    pub fn monte_carlo(outages: u64, n: u64) -> Self {
        let p = outages as f64 / n as f64;
        Self {
            value: p,
            method: Method::MonteCarlo,
            std_error: Some(math::sqrt(p * (1.0 - p) / n as f64)),
            n_realizations: Some(n),
            error_bound: None,
        }
    }

    pub fn success(&self) -> f64 {
        1.0 - self.value
    }
}

pub fn clamp_probability(raw: f64) -> Result<f64, Error> {
    if !raw.is_finite() || !(-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&raw) {
        return Err(Error::ProbabilityOutOfRange { value: raw });
    }
    Ok(raw.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EvalOptions {
    pub quad: QuadratureSpec,
}

/// Distance to the serving node at `u = λπr²`.
pub(crate) fn radius_at(cfg: &NetworkConfig, u: f64) -> f64 {
    math::sqrt(u / (cfg.lambda * math::PI))
}

/// `∫₀^∞ e^{−u} g(u, r(u)) du`. `g` is skipped once `e^{−u}` underflows.
pub(crate) fn radial_average(
    cfg: &NetworkConfig,
    quad: &QuadratureSpec,
    mut g: impl FnMut(f64, f64) -> Result<f64, Error>,
) -> Result<QuadratureEstimate, Error> {
    integrate_fallible(
        |u| {
            let w = math::exp(-u);
            if w == 0.0 {
                return Ok(0.0);
            }
            Ok(w * g(u, radius_at(cfg, u))?)
        },
        Domain::SemiInfinite { a: 0.0 },
        quad,
    )
}

/// `s = τ r^{α₁} / (P G_b G_u)` with `P` the serving transmitter's power.
pub fn laplace_argument(scenario: Scenario, r: f64, cfg: &NetworkConfig, ant: &AntennaSystem) -> f64 {
    let p = if scenario.is_uplink() { cfg.p_u } else { cfg.p_b };
    let g = ant.main_gain(NodeKind::Bs) * ant.main_gain(NodeKind::User);
    cfg.tau() * math::powf(r, cfg.alpha1) / (p * g)
}

pub fn outage(scenario: Scenario, cfg: &NetworkConfig, ant: &AntennaSystem) -> Result<OutageEstimate, Error> {
    outage_with(scenario, cfg, ant, &EvalOptions::default())
}

/// Full outage probability with every interference field and the loopback
/// term in its general form.
pub fn outage_with(
    scenario: Scenario,
    cfg: &NetworkConfig,
    ant: &AntennaSystem,
    opts: &EvalOptions,
) -> Result<OutageEstimate, Error> {
    cfg.validate()?;
    ant.validate()?;
    let tau = cfg.tau();
    if tau == 0.0 {
        return OutageEstimate::closed_form(0.0);
    }
    let inner = opts.quad.inner();
    let success = radial_average(cfg, &opts.quad, |_, r| {
        let s = laplace_argument(scenario, r, cfg, ant);
        let mut acc = math::exp(-s * cfg.sigma_n2);
        match scenario {
            Scenario::TwoNodeDown | Scenario::ThreeNodeDown => {
                acc *= laplace_interference_bs_down(r, tau, cfg, ant);
                if scenario == Scenario::TwoNodeDown {
                    acc *= laplace_li_2node(s, cfg, ant, NodeKind::User);
                    if acc == 0.0 {
                        return Ok(0.0);
                    }
                    acc *= laplace_interference_user_2d(s, cfg, ant, &inner)?;
                } else {
                    acc *= laplace_interference_user_3d(s, cfg, ant);
                }
            }
            Scenario::TwoNodeUp | Scenario::ThreeNodeUp => {
                acc *= if scenario == Scenario::TwoNodeUp {
                    laplace_li_2node(s, cfg, ant, NodeKind::Bs)
                } else {
                    laplace_li_3u(s, cfg, ant)
                };
                if acc == 0.0 {
                    return Ok(0.0);
                }
                acc *= laplace_interference_user_3u(s, cfg, ant, &inner)?;
                if acc == 0.0 {
                    return Ok(0.0);
                }
                acc *= laplace_interference_bs_up(s, cfg, ant, &inner)?;
            }
        }
        Ok(acc)
    })?;
    OutageEstimate::from_success(success)
}

/// Human-readable summary used by error messages and logs.
pub fn describe(scenario: Scenario, cfg: &NetworkConfig, ant: &AntennaSystem) -> String {
    alloc::format!(
        "{scenario} R={} λ={} σℓ²={:.3e} M_b={} M_u={}",
        cfg.rate, cfg.lambda, cfg.sigma_l2, ant.m_b, ant.m_u
    )
}

#[cfg(test)]
mod tests;
