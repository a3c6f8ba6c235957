//! Laplace transforms of the loopback term and of each interference field.

use crate::math::{self, PI};
use crate::model::{sector_offsets, AntennaSystem, NetworkConfig, NodeKind, ThinningTable};
use crate::specfun::{csc2pi_unchecked, hyp_f_times, integrate_fallible, Domain, QuadratureSpec};
use crate::Error;

/// Loopback at a two-node receiver: `1/(1 + s P G² σℓ²)`, where `(P, G)`
/// belong to the receiving node itself.
pub fn laplace_li_2node(s: f64, cfg: &NetworkConfig, ant: &AntennaSystem, receiver: NodeKind) -> f64 {
    let (p, g) = match receiver {
        NodeKind::User => (cfg.p_u, ant.main_gain(NodeKind::User)),
        NodeKind::Bs => (cfg.bs_li_power(), ant.main_gain(NodeKind::Bs)),
    };
    1.0 / (1.0 + s * p * g * g * cfg.sigma_l2)
}

/// Loopback at a three-node BS, averaged over the angle between its transmit
/// and receive sectors: `θ = 0` with probability `1/M_b`, otherwise the
/// side-lobe path attenuated by passive suppression.
pub fn laplace_li_3u(s: f64, cfg: &NetworkConfig, ant: &AntennaSystem) -> f64 {
    let (g, h) = ant.link_gains(NodeKind::Bs);
    let base = s * cfg.bs_li_power() * cfg.sigma_l2;
    if base == 0.0 {
        return 1.0;
    }
    let mut sum = 1.0 / (1.0 + base * g * g);
    for theta in sector_offsets(ant.m_b).skip(1) {
        sum += 1.0 / (1.0 + base * g * h * ant.suppression_factor(theta));
    }
    sum / f64::from(ant.m_b)
}

/// BSs interfering at a downlink user, all beyond the serving distance `r`.
pub fn laplace_interference_bs_down(r: f64, tau: f64, cfg: &NetworkConfig, ant: &AntennaSystem) -> f64 {
    let table = ant.thinning(NodeKind::User, NodeKind::Bs, cfg.lambda);
    bs_down_with(r, tau, cfg.alpha1, &table)
}

pub(crate) fn bs_down_with(r: f64, tau: f64, alpha: f64, table: &ThinningTable) -> f64 {
    if tau == 0.0 || r == 0.0 {
        return 1.0;
    }
    let g1 = table.entries[0].power_gain;
    let sum: f64 = table
        .iter()
        .filter(|e| e.density > 0.0)
        .map(|e| e.density * hyp_f_times(alpha, e.power_gain / g1 * tau))
        .sum();
    math::exp(-2.0 * PI * r * r / (alpha - 2.0) * sum)
}

/// `πρ² Σᵢ 2λᵢ/(α−2) · yᵢ F(α, yᵢ)` with `yᵢ = cᵢ/ρ^α`: the PGFL exponent of a
/// field whose nearest point is at least `ρ` away.
pub(crate) fn beyond_exponent(rho2: f64, coeffs: &[(f64, f64); 4], alpha: f64) -> f64 {
    let b = 1.0 - 2.0 / alpha;
    let mut sum = 0.0;
    for &(density, c) in coeffs {
        if density == 0.0 || c == 0.0 {
            continue;
        }
        let y = c / math::powf(rho2, alpha / 2.0);
        let term = if y.is_finite() && y < 1e200 {
            rho2 * hyp_f_times(alpha, y)
        } else {
            // ρ² y F(α, y) → c^{2/α} bπ / sin(πb) as ρ → 0.
            math::powf(c, 2.0 / alpha) * b * PI / math::sin(PI * b)
        };
        sum += 2.0 * density / (alpha - 2.0) * term;
    }
    PI * sum
}

/// Nearest-neighbour average over the protection radius `ρ` of a field of
/// density `λ` (`cfg.lambda`): `∫₀^∞ e^{−v − E(ρ(v))} dv`, `v = λπρ²`.
fn nearest_neighbour_average(
    cfg: &NetworkConfig,
    coeffs: &[(f64, f64); 4],
    alpha: f64,
    quad: &QuadratureSpec,
) -> Result<f64, Error> {
    if coeffs.iter().all(|&(d, c)| d == 0.0 || c == 0.0) {
        return Ok(1.0);
    }
    let scale = 1.0 / (cfg.lambda * PI);
    let est = integrate_fallible(
        |v| {
            let w = math::exp(-v);
            if w == 0.0 {
                return Ok(0.0);
            }
            Ok(w * math::exp(-beyond_exponent(v * scale, coeffs, alpha)))
        },
        Domain::SemiInfinite { a: 0.0 },
        quad,
    )?;
    Ok(est.value)
}

fn coefficients(table: &ThinningTable, sp: f64) -> [(f64, f64); 4] {
    table.entries.map(|e| (e.density, sp * e.power_gain))
}

/// Uplink users interfering at a two-node downlink user; the nearest one lies
/// at a nearest-neighbour distance `ρ`.
pub fn laplace_interference_user_2d(
    s: f64,
    cfg: &NetworkConfig,
    ant: &AntennaSystem,
    quad: &QuadratureSpec,
) -> Result<f64, Error> {
    if s == 0.0 {
        return Ok(1.0);
    }
    let table = ant.thinning(NodeKind::User, NodeKind::User, cfg.lambda);
    nearest_neighbour_average(cfg, &coefficients(&table, s * cfg.p_u), cfg.alpha2, quad)
}

/// Uplink users interfering at a three-node downlink user, including the
/// intra-cell user, so the field covers the whole plane.
pub fn laplace_interference_user_3d(s: f64, cfg: &NetworkConfig, ant: &AntennaSystem) -> f64 {
    if s == 0.0 {
        return 1.0;
    }
    let table = ant.thinning(NodeKind::User, NodeKind::User, cfg.lambda);
    let a = cfg.alpha2;
    let k = 2.0 * PI * PI / a * csc2pi_unchecked(a);
    let sum: f64 = table
        .iter()
        .map(|e| e.density * math::powf(s * cfg.p_u * e.power_gain, 2.0 / a))
        .sum();
    math::exp(-k * sum)
}

/// Other BSs interfering at an uplink BS, the nearest at a nearest-neighbour
/// distance.
pub fn laplace_interference_bs_up(
    s: f64,
    cfg: &NetworkConfig,
    ant: &AntennaSystem,
    quad: &QuadratureSpec,
) -> Result<f64, Error> {
    if s == 0.0 {
        return Ok(1.0);
    }
    let table = ant.thinning(NodeKind::Bs, NodeKind::Bs, cfg.lambda);
    nearest_neighbour_average(cfg, &coefficients(&table, s * cfg.p_b), cfg.alpha2, quad)
}

/// Out-of-cell uplink users interfering at an uplink BS. Each sub-field has
/// density `λᵢ(1 − e^{−πλx²})` at distance `x`, which removes the users that
/// would be closer to this BS than to their own.
pub fn laplace_interference_user_3u(
    s: f64,
    cfg: &NetworkConfig,
    ant: &AntennaSystem,
    quad: &QuadratureSpec,
) -> Result<f64, Error> {
    if s == 0.0 {
        return Ok(1.0);
    }
    let table = ant.thinning(NodeKind::Bs, NodeKind::User, cfg.lambda);
    let a = cfg.alpha1;
    let homogeneous = 2.0 * PI / a * csc2pi_unchecked(a);
    let mut exponent = 0.0;
    for e in table.iter().filter(|e| e.density > 0.0) {
        let c = s * cfg.p_u * e.power_gain;
        if c == 0.0 {
            continue;
        }
        let full = homogeneous * math::powf(c, 2.0 / a);
        let near = inner_user_correction(c, cfg.lambda, a, quad)?;
        exponent += PI * e.density * (full - near).max(0.0);
    }
    Ok(math::exp(-exponent))
}

/// `∫₀^∞ c e^{−πλz}/(c + z^{α/2}) dz`, evaluated over `w = πλz`.
pub(crate) fn inner_user_correction(c: f64, lambda: f64, alpha: f64, quad: &QuadratureSpec) -> Result<f64, Error> {
    let k = 1.0 / (PI * lambda);
    let est = integrate_fallible(
        |w| {
            let e = math::exp(-w);
            if e == 0.0 {
                return Ok(0.0);
            }
            Ok(c * e / (c + math::powf(w * k, alpha / 2.0)))
        },
        Domain::SemiInfinite { a: 0.0 },
        quad,
    )?;
    Ok(k * est.value)
}
