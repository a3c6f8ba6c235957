//! Composite networks in which each cell runs the two-node architecture with
//! probability `p_2n` and the three-node architecture otherwise.
//!
//! Evaluated in the many-sector limit under the equal-parameter assumptions,
//! where a field of uplink users is thinned to density `qλ` with
//! `q = p_u p_2n + p_3n`. The downlink needs `α₁ = α₂`; the uplink takes its
//! own exponent pair, conventionally `(4, 3)`.
//!
//! The success optimizers use a 201-point grid followed by golden-section
//! refinement instead of projected gradient ascent: the feasible set is an
//! interval, and a global grid cannot stall in a local optimum.

use alloc::format;

use crate::analytic::{special_success_with, OutageEstimate, Scenario, SpecialCaseParams};
use crate::math::{self, PI};
use crate::model::{AntennaSystem, NetworkConfig};
use crate::specfun::{csc2pi_unchecked, hyp_f_unchecked, QuadratureSpec};
use crate::Error;

const GRID_POINTS: usize = 201;
const GOLDEN_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompositeMix {
    /// Fraction of cells using the two-node architecture.
    pub p_2n: f64,
    /// Fraction of time FD users spend transmitting in the uplink.
    pub p_u: f64,
}

impl CompositeMix {
    pub fn new(p_2n: f64, p_u: f64) -> Result<Self, Error> {
        let mix = Self { p_2n, p_u };
        mix.validate()?;
        Ok(mix)
    }

    pub fn p_3n(&self) -> f64 {
        1.0 - self.p_2n
    }

    /// `q = p_u p_2n + p_3n`: probability that a cell has an active uplink user.
    pub fn uplink_activity(&self) -> f64 {
        self.p_u * self.p_2n + self.p_3n()
    }

    pub fn validate(&self) -> Result<(), Error> {
        for (name, v) in [("p_2n", self.p_2n), ("p_u", self.p_u)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::config(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Link {
    Downlink,
    Uplink,
}

/// Downlink and uplink configurations of one composite network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompositeNetwork {
    pub downlink: NetworkConfig,
    pub uplink: NetworkConfig,
    pub antennas: AntennaSystem,
    pub quad: QuadratureSpec,
}

impl CompositeNetwork {
    pub fn new(downlink: NetworkConfig, uplink: NetworkConfig, antennas: AntennaSystem) -> Result<Self, Error> {
        let net = Self {
            downlink,
            uplink,
            antennas,
            quad: QuadratureSpec::default(),
        };
        net.validate()?;
        Ok(net)
    }

    /// `base` with `α = 4` on the downlink and `(α₁, α₂) = (4, 3)` on the uplink.
    pub fn standard(base: NetworkConfig, antennas: AntennaSystem) -> Result<Self, Error> {
        Self::new(base.with_alphas(4.0, 4.0), base.with_alphas(4.0, 3.0), antennas)
    }

    /// Applies `f` to both link configurations.
    pub fn map_configs(mut self, f: impl Fn(NetworkConfig) -> NetworkConfig) -> Self {
        self.downlink = f(self.downlink);
        self.uplink = f(self.uplink);
        self
    }

    pub fn validate(&self) -> Result<(), Error> {
        self.downlink.validate()?;
        self.uplink.validate()?;
        self.antennas.validate()?;
        if self.downlink.alpha1 != self.downlink.alpha2 {
            return Err(Error::config(format!(
                "composite downlink needs α₁ = α₂, got ({}, {})",
                self.downlink.alpha1, self.downlink.alpha2
            )));
        }
        if self.downlink.lambda != self.uplink.lambda || self.downlink.rate != self.uplink.rate {
            return Err(Error::config("downlink and uplink must share density and rate"));
        }
        self.special(Link::Downlink)?;
        self.special(Link::Uplink)?;
        Ok(())
    }

    pub fn config(&self, link: Link) -> &NetworkConfig {
        match link {
            Link::Downlink => &self.downlink,
            Link::Uplink => &self.uplink,
        }
    }

    fn special(&self, link: Link) -> Result<SpecialCaseParams, Error> {
        let sp = SpecialCaseParams::asymptotic(self.config(link), &self.antennas)?;
        sp.require()?;
        Ok(sp)
    }

    fn gamma(&self) -> f64 {
        self.antennas.gamma_b
    }
}

/// Outage of a typical two-node receiver, a typical three-node receiver, and
/// their mixture `Π = p_2n P'_2 + p_3n P'_3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArchitectureOutage {
    pub two_node: f64,
    pub three_node: f64,
    pub mixed: f64,
}

impl ArchitectureOutage {
    fn mix(two_node: f64, three_node: f64, mix: &CompositeMix) -> Self {
        Self {
            two_node,
            three_node,
            mixed: mix.p_2n * two_node + mix.p_3n() * three_node,
        }
    }
}

/// Success probability `∫ e^{−(𝒢−1)u} ℒ_ℓ du` with the user field scaled by `q`.
fn scaled_success(
    scenario: Scenario,
    cfg: &NetworkConfig,
    special: &SpecialCaseParams,
    q: f64,
    quad: &QuadratureSpec,
) -> Result<f64, Error> {
    let est = special_success_with(scenario, cfg, special, quad, |r| {
        let (bs, users) = special.g_terms(scenario, cfg, r);
        1.0 + 2.0 * (bs + q * users)
    })?;
    Ok(OutageEstimate::from_success(est)?.success())
}

pub fn composite_outage_downlink(net: &CompositeNetwork, mix: &CompositeMix) -> Result<ArchitectureOutage, Error> {
    net.validate()?;
    mix.validate()?;
    let cfg = &net.downlink;
    if cfg.tau() == 0.0 {
        return Ok(ArchitectureOutage::mix(0.0, 0.0, mix));
    }
    let sp = net.special(Link::Downlink)?;
    let q = mix.uplink_activity();
    let p2 = 1.0 - scaled_success(Scenario::TwoNodeDown, cfg, &sp, q, &net.quad)?;
    let (bs, users) = sp.g_terms(Scenario::ThreeNodeDown, cfg, 1.0);
    let p3 = OutageEstimate::closed_form(1.0 - 1.0 / (1.0 + 2.0 * (bs + q * users)))?.value;
    Ok(ArchitectureOutage::mix(p2, p3, mix))
}

pub fn composite_outage_uplink(net: &CompositeNetwork, mix: &CompositeMix) -> Result<ArchitectureOutage, Error> {
    net.validate()?;
    mix.validate()?;
    let cfg = &net.uplink;
    if cfg.tau() == 0.0 {
        return Ok(ArchitectureOutage::mix(0.0, 0.0, mix));
    }
    let sp = net.special(Link::Uplink)?;
    let q = mix.uplink_activity();
    let p2 = 1.0 - scaled_success(Scenario::TwoNodeUp, cfg, &sp, q, &net.quad)?;
    let p3 = 1.0 - scaled_success(Scenario::ThreeNodeUp, cfg, &sp, q, &net.quad)?;
    Ok(ArchitectureOutage::mix(p2, p3, mix))
}

pub fn composite_outage(net: &CompositeNetwork, link: Link, mix: &CompositeMix) -> Result<ArchitectureOutage, Error> {
    match link {
        Link::Downlink => composite_outage_downlink(net, mix),
        Link::Uplink => composite_outage_uplink(net, mix),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputResult {
    /// Bits per channel use per unit area.
    pub throughput: f64,
    pub downlink_success: f64,
    pub uplink_success: f64,
    pub mix: CompositeMix,
}

/// `T = λ log₂(1+τ) [(1 − Π_d) + q (1 − Π_u)]`.
pub fn throughput(net: &CompositeNetwork, mix: &CompositeMix) -> Result<ThroughputResult, Error> {
    let down = composite_outage_downlink(net, mix)?;
    let up = composite_outage_uplink(net, mix)?;
    let cfg = &net.downlink;
    let rate = cfg.lambda * math::log2(1.0 + cfg.tau());
    let (ds, us) = (1.0 - down.mixed, 1.0 - up.mixed);
    Ok(ThroughputResult {
        throughput: rate * (ds + mix.uplink_activity() * us),
        downlink_success: ds,
        uplink_success: us,
        mix: *mix,
    })
}

/// The pieces of the `p_u = 1` throughput, which is affine in `p_2n`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct FullActivityTerms {
    /// `λ log₂(1+τ)`.
    scale: f64,
    /// `2 / (1 + (4π/α)(τγ²)^{2/α} csc(2π/α) + 𝒢_2D)`, the three-node downlink success.
    three_down: f64,
    two_down: f64,
    two_up: f64,
    three_up: f64,
}

fn full_activity_terms(net: &CompositeNetwork) -> Result<FullActivityTerms, Error> {
    net.validate()?;
    let down = &net.downlink;
    let up = &net.uplink;
    let tau = down.tau();
    let scale = down.lambda * math::log2(1.0 + tau);
    if tau == 0.0 {
        return Ok(FullActivityTerms {
            scale,
            three_down: 1.0,
            two_down: 1.0,
            two_up: 1.0,
            three_up: 1.0,
        });
    }
    let a = down.alpha1;
    let g2 = net.gamma() * net.gamma();
    let g_2d = 1.0 + 4.0 * tau * g2 / (a - 2.0) * hyp_f_unchecked(a, g2 * tau);
    let three_down = 2.0 / (1.0 + 4.0 * PI / a * math::powf(tau * g2, 2.0 / a) * csc2pi_unchecked(a) + g_2d);

    let sd = net.special(Link::Downlink)?;
    let two_down = special_success_with(Scenario::TwoNodeDown, down, &sd, &net.quad, |_| g_2d)?.value;
    let su = net.special(Link::Uplink)?;
    let g_up = |r: f64| su.g_uplink(up, r);
    let two_up = special_success_with(Scenario::TwoNodeUp, up, &su, &net.quad, g_up)?.value;
    let three_up = special_success_with(Scenario::ThreeNodeUp, up, &su, &net.quad, g_up)?.value;
    Ok(FullActivityTerms {
        scale,
        three_down,
        two_down,
        two_up,
        three_up,
    })
}

/// Throughput at `p_u = 1` written out term by term:
/// `λ log₂(1+τ) [(1−p) S_3D + p S_2D + p S_2U + (1−p) S_3U]`.
pub fn throughput_expanded(net: &CompositeNetwork, p_2n: f64) -> Result<f64, Error> {
    CompositeMix::new(p_2n, 1.0)?;
    let t = full_activity_terms(net)?;
    let p = p_2n;
    Ok(t.scale * ((1.0 - p) * t.three_down + p * t.two_down + p * t.two_up + (1.0 - p) * t.three_up))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum {
    pub p_2n: f64,
    pub value: f64,
}

/// `argmax_{p_2n} (1 − Π)` for the chosen link at fixed `p_u`.
pub fn optimize_p2n_success(link: Link, net: &CompositeNetwork, p_u: f64) -> Result<Optimum, Error> {
    CompositeMix::new(0.0, p_u)?;
    let objective = |p: f64| -> Result<f64, Error> {
        let mix = CompositeMix { p_2n: p, p_u };
        Ok(1.0 - composite_outage(net, link, &mix)?.mixed)
    };
    maximize_on_unit_interval(objective)
}

/// Coarse grid, then golden-section search inside the bracket around the best
/// grid point. The better of the two is returned.
pub fn maximize_on_unit_interval(f: impl Fn(f64) -> Result<f64, Error>) -> Result<Optimum, Error> {
    let step = 1.0 / (GRID_POINTS - 1) as f64;
    let mut best = Optimum {
        p_2n: 0.0,
        value: f64::NEG_INFINITY,
    };
    let mut best_index = 0;
    for i in 0..GRID_POINTS {
        let p = i as f64 * step;
        let v = f(p)?;
        if v > best.value {
            best = Optimum { p_2n: p, value: v };
            best_index = i;
        }
    }
    let lo = best_index.saturating_sub(1) as f64 * step;
    let hi = ((best_index + 1).min(GRID_POINTS - 1)) as f64 * step;
    let refined = golden_section_max(&f, lo, hi, GOLDEN_TOLERANCE)?;
    Ok(if refined.value > best.value { refined } else { best })
}

fn golden_section_max(f: &impl Fn(f64) -> Result<f64, Error>, mut a: f64, mut b: f64, tol: f64) -> Result<Optimum, Error> {
    let ratio = (math::sqrt(5.0) - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc >= fd {
        Optimum { p_2n: c, value: fc }
    } else {
        Optimum { p_2n: d, value: fd }
    })
}

/// Outcome of the bang-bang throughput rule at `p_u = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputDecision {
    /// 1 (all cells two-node) or 0 (all three-node).
    pub p_2n: f64,
    pub throughput: f64,
    /// `S_2D + S_2U − S_3U`, the gain per unit `p_2n` before the downlink cost.
    pub lhs: f64,
    /// `S_3D`, the downlink success given up per unit `p_2n`.
    pub rhs: f64,
}

/// Since throughput at `p_u = 1` is affine in `p_2n`, the optimum sits at an
/// end point: 1 when `S_2D + S_2U − S_3U > S_3D`, else 0.
pub fn optimize_p2n_throughput(net: &CompositeNetwork) -> Result<ThroughputDecision, Error> {
    let t = full_activity_terms(net)?;
    let lhs = t.two_down + t.two_up - t.three_up;
    let rhs = t.three_down;
    let p = if lhs > rhs { 1.0 } else { 0.0 };
    let value = throughput(net, &CompositeMix { p_2n: p, p_u: 1.0 })?.throughput;
    Ok(ThroughputDecision {
        p_2n: p,
        throughput: value,
        lhs,
        rhs,
    })
}

/// Grid argmax of throughput over `p_2n`, first maximum on ties.
pub fn throughput_grid_argmax(net: &CompositeNetwork, p_u: f64, points: usize) -> Result<Optimum, Error> {
    let mut best = Optimum {
        p_2n: 0.0,
        value: f64::NEG_INFINITY,
    };
    for i in 0..points {
        let p = i as f64 / (points - 1) as f64;
        let v = throughput(net, &CompositeMix { p_2n: p, p_u })?.throughput;
        if v > best.value {
            best = Optimum { p_2n: p, value: v };
        }
    }
    Ok(best)
}
