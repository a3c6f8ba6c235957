//! Drawing network realizations around a typical receiver at the origin.
//!
//! Every Poisson field is generated in order of distance: the `k`-th point
//! sits where the cumulative area `λπd²` reaches a sum of `k` unit
//! exponentials. Counts inside the window are then Poisson, nearest points
//! come first, and enlarging the window only appends points, so estimates at
//! two window sizes share their inner realization.

use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use super::{AntennaModel, Association, Geometry, Orientation, SeedPolicy, SimSettings};
use crate::analytic::Scenario;
use crate::math::{self, PI, TAU};
use crate::model::{sector_offsets, AntennaSystem, NetworkConfig, NodeKind};

pub(crate) mod stream {
    pub const SERVING: u64 = 0;
    pub const BS_FIELD: u64 = 1;
    pub const USER_FIELD: u64 = 2;
    pub const ARCHITECTURE: u64 = 3;
    pub const DENSE_USERS: u64 = 4;
    pub const FADING: u64 = 5;
}

/// The link between the typical receiver and its counterpart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServingLink {
    pub distance: f64,
    /// Direction of the counterpart seen from the origin; the receiver's main
    /// lobe is centred on it.
    pub bearing: f64,
    /// Unit-mean exponential power fading.
    pub fading: f64,
    /// Uniform draw compared with the LOS probability (3GPP model only).
    pub los_draw: f64,
    /// Standard normal shadowing draw (3GPP model only).
    pub shadow_draw: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interferer {
    pub kind: NodeKind,
    pub distance2: f64,
    /// Direction of the interferer seen from the origin.
    pub bearing: f64,
    /// Centre of the interferer's transmit main lobe.
    pub boresight: f64,
    /// Orientation case 1–4, see [`ThinningEntry`](crate::model::ThinningEntry).
    pub case: u8,
    pub fading: f64,
    pub los_draw: f64,
    pub shadow_draw: f64,
}

impl Interferer {
    pub fn position(&self) -> (f64, f64) {
        let d = math::sqrt(self.distance2);
        (d * math::cos(self.bearing), d * math::sin(self.bearing))
    }
}

/// Loopback at the typical receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopbackDraw {
    /// Exponential with mean `σℓ²`.
    pub gain: f64,
    /// Offset between the transmit and receive sectors.
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkRealization {
    /// Architecture actually drawn for the typical cell.
    pub scenario: Scenario,
    pub window_radius: f64,
    pub serving: ServingLink,
    pub interferers: Vec<Interferer>,
    /// `None` for a half-duplex receiver.
    pub loopback: Option<LoopbackDraw>,
    /// Fraction of far-away users that transmit, used by the tail correction.
    pub user_activity: f64,
}

impl NetworkRealization {
    pub fn count(&self, kind: NodeKind) -> usize {
        self.interferers.iter().filter(|i| i.kind == kind).count()
    }

    /// Interfering nodes of `kind` as planar coordinates.
    pub fn points(&self, kind: NodeKind) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.interferers.iter().filter(move |i| i.kind == kind).map(Interferer::position)
    }
}

/// Poisson field of density `λ` revealed in order of distance from the origin.
struct RadialPpp {
    lambda_pi: f64,
    area: f64,
    limit: f64,
}

impl RadialPpp {
    fn new(lambda: f64, radius: f64) -> Self {
        let lambda_pi = lambda * PI;
        Self {
            lambda_pi,
            area: 0.0,
            limit: lambda_pi * radius * radius,
        }
    }

    /// Squared distance of the next point, or `None` past the window.
    fn next(&mut self, rng: &mut ChaCha8Rng) -> Option<f64> {
        let step: f64 = rng.sample(Exp1);
        self.area += step;
        (self.area <= self.limit).then(|| self.area / self.lambda_pi)
    }
}

fn angle(rng: &mut ChaCha8Rng) -> f64 {
    rng.random::<f64>() * TAU - PI
}

fn exp1(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(Exp1)
}

/// Orientation case from the receiver's main lobe (centred on `rx_boresight`)
/// and the interferer's transmit lobe (centred on `tx_boresight`).
fn geometric_case(bearing: f64, rx_boresight: f64, m_rx: u32, tx_boresight: f64, m_tx: u32) -> u8 {
    let in_main = math::abs(math::wrap_angle(bearing - rx_boresight)) <= PI / f64::from(m_rx);
    let towards = math::abs(math::wrap_angle(bearing + PI - tx_boresight)) <= PI / f64::from(m_tx);
    case_index(in_main, towards)
}

fn case_index(in_main: bool, towards: bool) -> u8 {
    match (in_main, towards) {
        (true, true) => 1,
        (true, false) => 2,
        (false, true) => 3,
        (false, false) => 4,
    }
}

struct Builder<'a> {
    ant: &'a AntennaSystem,
    settings: &'a SimSettings,
    receiver: NodeKind,
    rx_boresight: f64,
    propagation_draws: bool,
    interferers: Vec<Interferer>,
}

impl Builder<'_> {
    /// Draws orientation, fading and propagation state for a node at
    /// `(distance2, bearing)` whose transmit lobe points at `boresight`.
    fn push(&mut self, rng: &mut ChaCha8Rng, kind: NodeKind, distance2: f64, bearing: f64, boresight: f64) {
        let fading = exp1(rng);
        let m_rx = self.ant.sectors(self.receiver);
        let m_tx = self.ant.sectors(kind);
        let case = match self.settings.orientation {
            Orientation::Geometric => geometric_case(bearing, self.rx_boresight, m_rx, boresight, m_tx),
            Orientation::CaseSampling => {
                let in_main = rng.random::<f64>() * f64::from(m_rx) < 1.0;
                let towards = rng.random::<f64>() * f64::from(m_tx) < 1.0;
                case_index(in_main, towards)
            }
        };
        let (los_draw, shadow_draw) = self.propagation(rng);
        self.interferers.push(Interferer {
            kind,
            distance2,
            bearing,
            boresight,
            case,
            fading,
            los_draw,
            shadow_draw,
        });
    }

    fn propagation(&self, rng: &mut ChaCha8Rng) -> (f64, f64) {
        if self.propagation_draws {
            (rng.random::<f64>(), rng.sample(StandardNormal))
        } else {
            (0.0, 0.0)
        }
    }

    fn push_random(&mut self, rng: &mut ChaCha8Rng, kind: NodeKind, distance2: f64) {
        let bearing = angle(rng);
        let boresight = angle(rng);
        self.push(rng, kind, distance2, bearing, boresight);
    }
}

fn typical_scenario(scenario: Scenario, settings: &SimSettings, seeds: &SeedPolicy, index: u64) -> Scenario {
    let Some(mix) = settings.mix else {
        return scenario;
    };
    let mut rng = seeds.rng(index, stream::ARCHITECTURE);
    let two_node = rng.random::<f64>() < mix.p_2n;
    match (scenario.is_uplink(), two_node) {
        (false, true) => Scenario::TwoNodeDown,
        (false, false) => Scenario::ThreeNodeDown,
        (true, true) => Scenario::TwoNodeUp,
        (true, false) => Scenario::ThreeNodeUp,
    }
}

fn loopback(scenario: Scenario, cfg: &NetworkConfig, ant: &AntennaSystem, settings: &SimSettings, rng: &mut ChaCha8Rng) -> Option<LoopbackDraw> {
    if !scenario.has_loopback() {
        return None;
    }
    let gain = cfg.sigma_l2 * exp1(rng);
    let theta = if scenario != Scenario::ThreeNodeUp {
        0.0
    } else {
        match settings.antenna_model {
            AntennaModel::Sectorized => {
                let k = rng.random_range(0..ant.m_b);
                sector_offsets(ant.m_b).nth(k as usize).unwrap_or(0.0)
            }
            AntennaModel::SideLobeOnly => angle(rng),
        }
    };
    Some(LoopbackDraw { gain, theta })
}

/// One realization for `index` under `seeds`.
pub fn sample_realization(
    scenario: Scenario,
    cfg: &NetworkConfig,
    ant: &AntennaSystem,
    settings: &SimSettings,
    seeds: &SeedPolicy,
    index: u64,
) -> NetworkRealization {
    sample_with(scenario, cfg, ant, settings, seeds, index, false)
}

pub(crate) fn sample_with(
    scenario: Scenario,
    cfg: &NetworkConfig,
    ant: &AntennaSystem,
    settings: &SimSettings,
    seeds: &SeedPolicy,
    index: u64,
    propagation_draws: bool,
) -> NetworkRealization {
    let scenario = typical_scenario(scenario, settings, seeds, index);
    if let Some(assoc) = settings.association {
        return sample_associated(scenario, cfg, ant, settings, assoc, seeds, index, propagation_draws);
    }
    let w = settings.window_radius(cfg.lambda);
    let activity = settings.mix.map_or(1.0, |m| m.uplink_activity());
    let lambda_pi = cfg.lambda * PI;

    let mut serving_rng = seeds.rng(index, stream::SERVING);
    let mut bs_rng = seeds.rng(index, stream::BS_FIELD);
    let mut user_rng = seeds.rng(index, stream::USER_FIELD);

    let mut bs_field = RadialPpp::new(cfg.lambda, w);
    let serving_d2 = if scenario.is_uplink() {
        exp1(&mut serving_rng) / lambda_pi
    } else {
        // The nearest BS serves; the rest of the field lies beyond it.
        bs_field.next(&mut bs_rng).unwrap_or_else(|| exp1(&mut serving_rng) / lambda_pi)
    };
    let bearing = angle(&mut serving_rng);
    let fading = exp1(&mut serving_rng);
    let loopback = loopback(scenario, cfg, ant, settings, &mut serving_rng);

    let mut b = Builder {
        ant,
        settings,
        receiver: scenario.receiver(),
        rx_boresight: bearing,
        propagation_draws,
        interferers: Vec::new(),
    };
    let (los_draw, shadow_draw) = b.propagation(&mut serving_rng);
    let serving = ServingLink {
        distance: math::sqrt(serving_d2),
        bearing,
        fading,
        los_draw,
        shadow_draw,
    };

    // Interfering BSs.
    let mut skipped_nearest = false;
    while let Some(d2) = bs_field.next(&mut bs_rng) {
        if scenario.is_uplink() {
            let drop = match settings.geometry {
                Geometry::Exact => !core::mem::replace(&mut skipped_nearest, true),
                Geometry::GuardZone => d2 <= serving_d2,
            };
            if drop {
                continue;
            }
        }
        b.push_random(&mut bs_rng, NodeKind::Bs, d2);
    }

    // Interfering uplink users.
    let mut user_field = RadialPpp::new(cfg.lambda, w);
    let mut skipped_nearest = false;
    while let Some(d2) = user_field.next(&mut user_rng) {
        let keep = match (scenario, settings.geometry) {
            (Scenario::ThreeNodeDown, _) => true,
            (Scenario::TwoNodeDown, Geometry::Exact) => core::mem::replace(&mut skipped_nearest, true),
            (Scenario::TwoNodeDown, Geometry::GuardZone) => d2 > serving_d2,
            (_, Geometry::Exact) => user_rng.random::<f64>() >= math::exp(-lambda_pi * d2),
            (_, Geometry::GuardZone) => true,
        };
        let active = activity >= 1.0 || user_rng.random::<f64>() < activity;
        if keep && active {
            b.push_random(&mut user_rng, NodeKind::User, d2);
        }
    }

    NetworkRealization {
        scenario,
        window_radius: w,
        serving,
        interferers: b.interferers,
        loopback,
        user_activity: activity,
    }
}

#[derive(Clone, Copy)]
struct Point {
    x: f64,
    y: f64,
}

impl Point {
    fn polar(d2: f64, bearing: f64) -> Self {
        let d = math::sqrt(d2);
        Self {
            x: d * math::cos(bearing),
            y: d * math::sin(bearing),
        }
    }

    fn dist2(self, o: Point) -> f64 {
        let (dx, dy) = (self.x - o.x, self.y - o.y);
        dx * dx + dy * dy
    }

    fn norm2(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    fn bearing(self) -> f64 {
        math::atan2(self.y, self.x)
    }

    fn direction_to(self, o: Point) -> f64 {
        math::atan2(o.y - self.y, o.x - self.x)
    }
}

/// Association mode: a dense user field of density `ratio·λ` is attached to
/// the nearest BS, and every cell picks one of its users uniformly as the
/// same-channel uplink transmitter. BS transmit lobes point at that user and
/// user lobes at their own BS. Cost grows with the product of user and BS
/// counts, so this mode suits probing runs rather than full sweeps.
#[allow(clippy::too_many_arguments)]
fn sample_associated(
    scenario: Scenario,
    cfg: &NetworkConfig,
    ant: &AntennaSystem,
    settings: &SimSettings,
    assoc: Association,
    seeds: &SeedPolicy,
    index: u64,
    propagation_draws: bool,
) -> NetworkRealization {
    let w = settings.window_radius(cfg.lambda);
    let activity = settings.mix.map_or(1.0, |m| m.uplink_activity());
    let mut serving_rng = seeds.rng(index, stream::SERVING);
    let mut bs_rng = seeds.rng(index, stream::BS_FIELD);
    let mut dense_rng = seeds.rng(index, stream::DENSE_USERS);
    let mut fade_rng = seeds.rng(index, stream::FADING);

    // BS 0 is the typical cell's BS: the nearest PPP point on the downlink,
    // an extra BS at the origin on the uplink.
    let mut bs = Vec::new();
    if scenario.is_uplink() {
        bs.push(Point { x: 0.0, y: 0.0 });
    }
    let mut field = RadialPpp::new(cfg.lambda, w);
    while let Some(d2) = field.next(&mut bs_rng) {
        bs.push(Point::polar(d2, angle(&mut bs_rng)));
    }
    if bs.is_empty() {
        let d2 = exp1(&mut serving_rng) / (cfg.lambda * PI);
        bs.push(Point::polar(d2, angle(&mut serving_rng)));
    }

    // One uniformly chosen user per cell by reservoir sampling.
    let mut chosen: Vec<Option<Point>> = alloc::vec![None; bs.len()];
    let mut members = alloc::vec![0u32; bs.len()];
    let mut users = RadialPpp::new(assoc.user_density_ratio * cfg.lambda, w);
    while let Some(d2) = users.next(&mut dense_rng) {
        let u = Point::polar(d2, angle(&mut dense_rng));
        let mut cell = 0;
        let mut best = f64::INFINITY;
        for (j, b) in bs.iter().enumerate() {
            let d = u.dist2(*b);
            if d < best {
                best = d;
                cell = j;
            }
        }
        members[cell] += 1;
        if dense_rng.random_range(0..members[cell]) == 0 {
            chosen[cell] = Some(u);
        }
    }

    let origin = Point { x: 0.0, y: 0.0 };
    let (serving_point, typical_cell) = if scenario.is_uplink() {
        let p = chosen[0].unwrap_or_else(|| {
            let d2 = exp1(&mut serving_rng) / (cfg.lambda * PI);
            Point::polar(d2, angle(&mut serving_rng))
        });
        (p, 0)
    } else {
        (bs[0], 0)
    };
    let bearing = serving_point.bearing();
    let fading = exp1(&mut serving_rng);
    let loopback = loopback(scenario, cfg, ant, settings, &mut serving_rng);
    let mut b = Builder {
        ant,
        settings,
        receiver: scenario.receiver(),
        rx_boresight: bearing,
        propagation_draws,
        interferers: Vec::new(),
    };
    let (los_draw, shadow_draw) = b.propagation(&mut serving_rng);
    let serving = ServingLink {
        distance: math::sqrt(serving_point.norm2()),
        bearing,
        fading,
        los_draw,
        shadow_draw,
    };

    for (j, p) in bs.iter().enumerate() {
        if j == typical_cell {
            continue;
        }
        let target = chosen[j].map_or_else(|| angle(&mut fade_rng), |u| p.direction_to(u));
        b.push(&mut fade_rng, NodeKind::Bs, p.norm2(), p.bearing(), target);
    }
    for (j, u) in chosen.iter().enumerate() {
        let Some(u) = *u else { continue };
        // The typical cell's own uplink user is the receiver (2D) or the
        // served user (uplink); only the three-node downlink hears it.
        if j == typical_cell && scenario != Scenario::ThreeNodeDown {
            continue;
        }
        if activity < 1.0 && fade_rng.random::<f64>() >= activity {
            continue;
        }
        let d2 = u.dist2(origin);
        if d2 == 0.0 {
            continue;
        }
        b.push(&mut fade_rng, NodeKind::User, d2, u.bearing(), u.direction_to(bs[j]));
    }

    NetworkRealization {
        scenario,
        window_radius: w,
        serving,
        interferers: b.interferers,
        loopback,
        user_activity: activity,
    }
}
