//! Physical-layer model: network parameters, sectorized antenna gains, the
//! four-way orientation thinning of interferer fields, and the passive
//! loopback-suppression profile.

use alloc::format;

use crate::math::{self, PI, TAU};
use crate::Error;

pub use crate::math::{db_to_linear, linear_to_db};

/// Which end of a cellular link a node sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Bs,
    User,
}

/// Physical parameters shared by every scenario. Powers and variances are
/// linear; convert dB values with [`db_to_linear`] before storing them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkConfig {
    /// BS density (points per unit area).
    pub lambda: f64,
    /// Path-loss exponent of BS↔user links.
    pub alpha1: f64,
    /// Path-loss exponent of user↔user and BS↔BS links.
    pub alpha2: f64,
    pub p_b: f64,
    pub p_u: f64,
    pub sigma_n2: f64,
    /// Residual loopback variance after active cancellation.
    pub sigma_l2: f64,
    /// Target rate in bits per channel use.
    pub rate: f64,
    /// Transmit power that loops back into a full-duplex BS receiver. `None`
    /// uses the BS's own power `p_b`.
    pub bs_li_power: Option<f64>,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self {
            lambda: 1e-2,
            alpha1: 4.0,
            alpha2: 4.0,
            p_b: 1.0,
            p_u: 1.0,
            sigma_n2: 0.0,
            sigma_l2: 0.0,
            rate: 1.0,
            bs_li_power: None,
        }
    }
}

impl NetworkConfig {
    /// SINR threshold `2^R − 1`, always derived from the rate.
    pub fn tau(&self) -> f64 {
        math::exp2(self.rate) - 1.0
    }

    pub fn bs_li_power(&self) -> f64 {
        self.bs_li_power.unwrap_or(self.p_b)
    }

    pub fn with_rate(mut self, rate: f64) -> Self {
        self.rate = rate;
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_alphas(mut self, alpha1: f64, alpha2: f64) -> Self {
        self.alpha1 = alpha1;
        self.alpha2 = alpha2;
        self
    }

    pub fn with_sigma_l2(mut self, sigma_l2: f64) -> Self {
        self.sigma_l2 = sigma_l2;
        self
    }

    /// `-inf` dB maps to perfect cancellation.
    pub fn with_sigma_l2_db(self, db: f64) -> Self {
        self.with_sigma_l2(db_to_linear(db))
    }

    pub fn validate(&self) -> Result<(), Error> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(format!("{name} must be positive and finite, got {v}")))
            }
        };
        let non_negative = |name: &str, v: f64| {
            if v >= 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(format!("{name} must be non-negative and finite, got {v}")))
            }
        };
        positive("lambda", self.lambda)?;
        positive("p_b", self.p_b)?;
        positive("p_u", self.p_u)?;
        non_negative("sigma_n2", self.sigma_n2)?;
        non_negative("sigma_l2", self.sigma_l2)?;
        non_negative("rate", self.rate)?;
        if let Some(p) = self.bs_li_power {
            positive("bs_li_power", p)?;
        }
        for (name, a) in [("alpha1", self.alpha1), ("alpha2", self.alpha2)] {
            if !(a > 2.0 && a.is_finite()) {
                return Err(Error::config(format!("{name} must exceed 2, got {a}")));
            }
        }
        Ok(())
    }
}

/// Shape of the passive loopback-suppression factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SuppressionMode {
    /// `min{1, exp(cos θmax − cos(|θ| − θmax))}`.
    #[default]
    Clamped,
    /// The bare exponential, which may exceed 1 for small `θmax`.
    Raw,
}

impl SuppressionMode {
    pub fn factor(self, theta: f64, theta_max: f64) -> f64 {
        let raw = suppression_exponential(theta, theta_max);
        match self {
            SuppressionMode::Clamped => raw.min(1.0),
            SuppressionMode::Raw => raw,
        }
    }
}

/// Sector counts and side-lobe levels at both ends of a link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntennaSystem {
    pub m_b: u32,
    pub m_u: u32,
    pub gamma_b: f64,
    pub gamma_u: f64,
    /// Angle between transmit and receive sectors of maximum passive suppression.
    pub theta_max: f64,
    pub suppression: SuppressionMode,
}

impl Default for AntennaSystem {
    fn default() -> Self {
        Self::symmetric(1, 0.2)
    }
}

impl AntennaSystem {
    /// Same sector count and side-lobe ratio at BSs and users, `θmax = 2π/3`.
    pub fn symmetric(m: u32, gamma: f64) -> Self {
        Self {
            m_b: m,
            m_u: m,
            gamma_b: gamma,
            gamma_u: gamma,
            theta_max: 2.0 * PI / 3.0,
            suppression: SuppressionMode::Clamped,
        }
    }

    pub fn with_theta_max(mut self, theta_max: f64) -> Self {
        self.theta_max = theta_max;
        self
    }

    pub fn validate(&self) -> Result<(), Error> {
        antenna_gains(self.m_b, self.gamma_b)?;
        antenna_gains(self.m_u, self.gamma_u)?;
        check_theta_max(self.theta_max)
    }

    pub fn sectors(&self, kind: NodeKind) -> u32 {
        match kind {
            NodeKind::Bs => self.m_b,
            NodeKind::User => self.m_u,
        }
    }

    pub fn side_lobe_ratio(&self, kind: NodeKind) -> f64 {
        match kind {
            NodeKind::Bs => self.gamma_b,
            NodeKind::User => self.gamma_u,
        }
    }

    /// `(G, H)` as used on links: an omnidirectional node has no side lobe, so
    /// both gains are 1.
    pub fn link_gains(&self, kind: NodeKind) -> (f64, f64) {
        let m = self.sectors(kind);
        let (g, h) = gains_unchecked(m, self.side_lobe_ratio(kind));
        if m == 1 {
            (1.0, 1.0)
        } else {
            (g, h)
        }
    }

    pub fn main_gain(&self, kind: NodeKind) -> f64 {
        self.link_gains(kind).0
    }

    /// Table of the four interferer sub-fields seen by a `receiver` from
    /// transmitters of kind `transmitter`.
    pub fn thinning(&self, receiver: NodeKind, transmitter: NodeKind, lambda: f64) -> ThinningTable {
        ThinningTable::build(
            self.sectors(receiver),
            self.link_gains(receiver),
            self.sectors(transmitter),
            self.link_gains(transmitter),
            lambda,
        )
    }

    pub fn suppression_factor(&self, theta: f64) -> f64 {
        self.suppression.factor(theta, self.theta_max)
    }
}

/// Main- and side-lobe gains of an `m`-sector antenna with side-lobe ratio
/// `gamma`: `G = m / (1 + γ(m − 1))`, `H = γG`.
pub fn antenna_gains(m: u32, gamma: f64) -> Result<(f64, f64), Error> {
    if m == 0 {
        return Err(Error::config("sector count must be at least 1"));
    }
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::config(format!("side-lobe ratio must lie in [0, 1], got {gamma}")));
    }
    Ok(gains_unchecked(m, gamma))
}

fn gains_unchecked(m: u32, gamma: f64) -> (f64, f64) {
    let m = f64::from(m);
    let g = m / (1.0 + gamma * (m - 1.0));
    (g, gamma * g)
}

/// One orientation case of an interferer field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThinningEntry {
    /// 1: towards the receiver, inside its main sector; 2: away, inside;
    /// 3: towards, outside; 4: away, outside.
    pub case_index: u8,
    pub density: f64,
    pub power_gain: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThinningTable {
    pub entries: [ThinningEntry; 4],
}

impl ThinningTable {
    /// Receiver with `m_i` sectors, transmitter with `m_j`.
    pub fn new(m_i: u32, gamma_i: f64, m_j: u32, gamma_j: f64, lambda: f64) -> Result<Self, Error> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::config(format!("lambda must be positive, got {lambda}")));
        }
        let gi = antenna_gains(m_i, gamma_i)?;
        let gj = antenna_gains(m_j, gamma_j)?;
        let link = |m: u32, g: (f64, f64)| if m == 1 { (1.0, 1.0) } else { g };
        Ok(Self::build(m_i, link(m_i, gi), m_j, link(m_j, gj), lambda))
    }

    fn build(m_i: u32, (g_i, h_i): (f64, f64), m_j: u32, (g_j, h_j): (f64, f64), lambda: f64) -> Self {
        let mi = f64::from(m_i);
        let mj = f64::from(m_j);
        let base = lambda / (mi * mj);
        let entry = |case_index, density, power_gain| ThinningEntry {
            case_index,
            density,
            power_gain,
        };
        Self {
            entries: [
                entry(1, base, g_i * g_j),
                entry(2, base * (mj - 1.0), g_i * h_j),
                entry(3, base * (mi - 1.0), g_j * h_i),
                entry(4, base * (mi - 1.0) * (mj - 1.0), h_i * h_j),
            ],
        }
    }

    pub fn total_density(&self) -> f64 {
        self.entries.iter().map(|e| e.density).sum()
    }

    /// Density-weighted mean power gain of a random interferer.
    pub fn mean_gain(&self) -> f64 {
        let total = self.total_density();
        self.entries.iter().map(|e| e.density * e.power_gain).sum::<f64>() / total
    }

    pub fn gain(&self, case_index: u8) -> f64 {
        self.entries[usize::from(case_index - 1)].power_gain
    }

    pub fn iter(&self) -> impl Iterator<Item = &ThinningEntry> {
        self.entries.iter()
    }
}

/// Free-function form of [`ThinningTable::new`].
pub fn thinning_table(m_i: u32, gamma_i: f64, m_j: u32, gamma_j: f64, lambda: f64) -> Result<ThinningTable, Error> {
    ThinningTable::new(m_i, gamma_i, m_j, gamma_j, lambda)
}

fn check_theta_max(theta_max: f64) -> Result<(), Error> {
    if theta_max > 0.0 && theta_max <= PI {
        Ok(())
    } else {
        Err(Error::config(format!("theta_max must lie in (0, π], got {theta_max}")))
    }
}

fn suppression_exponential(theta: f64, theta_max: f64) -> f64 {
    math::exp(math::cos(theta_max) - math::cos(math::abs(theta) - theta_max))
}

/// Fraction of loopback power left after passive suppression when the
/// transmit and receive sectors are `theta` apart.
///
/// The profile is 1 at `θ = 0`, symmetric in `θ`, and smallest at
/// `|θ| = θmax`. Small `θmax` makes the exponential exceed 1 over most of the
/// circle, hence the clamp. Continuous in `θ`; restricting to the sector grid
/// is the caller's job.
pub fn passive_suppression(theta: f64, theta_max: f64) -> Result<f64, Error> {
    check_theta_max(theta_max)?;
    Ok(SuppressionMode::Clamped.factor(theta, theta_max))
}

/// Angular offsets between an `m`-sector BS's transmit and receive sectors:
/// the multiples of `2π/m` in `[-π, π)`, starting with 0.
pub fn sector_offsets(m: u32) -> impl Iterator<Item = f64> {
    let step = TAU / f64::from(m.max(1));
    (0..m.max(1)).map(move |k| {
        let theta = step * f64::from(k);
        if theta >= PI {
            theta - TAU
        } else {
            theta
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn gains_examples() {
        assert_eq!(antenna_gains(1, 0.2).unwrap(), (1.0, 0.2));
        let (g, h) = antenna_gains(4, 0.2).unwrap();
        assert!(close(g, 2.5, 1e-15) && close(h, 0.5, 1e-15));
        let (g, h) = antenna_gains(8, 0.2).unwrap();
        assert!(close(g, 10.0 / 3.0, 1e-15) && close(h, 2.0 / 3.0, 1e-15));
    }

    #[test]
    fn gains_reject_bad_input() {
        assert!(antenna_gains(0, 0.2).is_err());
        assert!(antenna_gains(4, -0.1).is_err());
        assert!(antenna_gains(4, 1.5).is_err());
        assert!(antenna_gains(4, f64::NAN).is_err());
    }

    #[test]
    fn omni_links_have_unit_gain() {
        let ant = AntennaSystem::symmetric(1, 0.2);
        assert_eq!(ant.link_gains(NodeKind::Bs), (1.0, 1.0));
        let t = thinning_table(1, 0.2, 1, 0.2, 0.01).unwrap();
        let d: Vec<f64> = t.iter().map(|e| e.density).collect();
        assert_eq!(d, [0.01, 0.0, 0.0, 0.0]);
        assert!(t.iter().all(|e| e.power_gain == 1.0));
    }

    #[test]
    fn thinning_table_examples() {
        let t = thinning_table(4, 0.2, 2, 0.2, 0.01).unwrap();
        let d: Vec<f64> = t.iter().map(|e| e.density).collect();
        for (got, want) in d.iter().zip([0.00125, 0.00125, 0.00375, 0.00375]) {
            assert!(close(*got, want, 1e-14), "{d:?}");
        }
        assert!(close(t.total_density(), 0.01, 1e-14));

        let t = thinning_table(8, 0.2, 8, 0.2, 0.01).unwrap();
        assert!(close(t.gain(1), 100.0 / 9.0, 1e-14));
        assert!(close(t.gain(4), 4.0 / 9.0, 1e-14));
        assert!(close(t.gain(2), t.gain(3), 1e-14));
    }

    #[test]
    fn suppression_examples() {
        let tm = 2.0 * PI / 3.0;
        assert_eq!(passive_suppression(0.0, tm).unwrap(), 1.0);
        assert!(close(passive_suppression(tm, tm).unwrap(), (-1.5f64).exp(), 1e-14));
        assert_eq!(passive_suppression(PI, PI / 3.0).unwrap(), 1.0);
        assert!(SuppressionMode::Raw.factor(PI, PI / 3.0) > 2.7);
        assert!(passive_suppression(0.3, 0.0).is_err());
        assert!(passive_suppression(0.3, 3.5).is_err());
    }

    #[test]
    fn sector_offsets_cover_the_circle() {
        let v: Vec<f64> = sector_offsets(4).collect();
        assert_eq!(v, [0.0, PI / 2.0, -PI, -PI / 2.0]);
        assert_eq!(sector_offsets(1).collect::<Vec<_>>(), [0.0]);
        assert!(sector_offsets(7).all(|t| (-PI..PI).contains(&t)));
    }

    #[test]
    fn isotropic_side_lobes() {
        for m in 1..=16 {
            let (g, h) = antenna_gains(m, 1.0).unwrap();
            assert!(close(g, 1.0, 1e-15) && close(h, 1.0, 1e-15));
        }
    }

    #[test]
    fn densities_sum_to_lambda_over_sweep() {
        for mi in 1..=16 {
            for mj in 1..=16 {
                let t = thinning_table(mi, 0.3, mj, 0.1, 0.01).unwrap();
                assert!((t.total_density() - 0.01).abs() <= 1e-12);
                assert!(t.iter().all(|e| e.density >= 0.0 && e.power_gain >= 0.0));
            }
        }
    }

    #[test]
    fn grid_minimum_is_nearest_to_theta_max() {
        let tm = 2.0 * PI / 3.0;
        for m in 2..=24u32 {
            let offsets: Vec<f64> = sector_offsets(m).collect();
            let best = offsets
                .iter()
                .copied()
                .min_by(|a, b| passive_suppression(*a, tm).unwrap().total_cmp(&passive_suppression(*b, tm).unwrap()))
                .unwrap();
            let nearest = offsets.iter().map(|t| (t.abs() - tm).abs()).fold(f64::INFINITY, f64::min);
            assert!(((best.abs() - tm).abs() - nearest).abs() < 1e-12, "m={m}");
        }
    }

    proptest! {
        #[test]
        fn suppression_is_symmetric(theta in -PI..PI, tm in 0.01..PI) {
            let a = passive_suppression(theta, tm).unwrap();
            let b = passive_suppression(-theta, tm).unwrap();
            prop_assert!((a - b).abs() <= 1e-15);
            prop_assert!(a > 0.0 && a <= 1.0);
        }

        #[test]
        fn main_gain_monotone_in_sectors(m in 1u32..64, gamma in 0.0..0.999f64) {
            let (g0, _) = antenna_gains(m, gamma).unwrap();
            let (g1, _) = antenna_gains(m + 1, gamma).unwrap();
            prop_assert!(g1 >= g0);
        }
    }
}
