//! Acceptance suite: oracle agreement, analytic vs simulation, and the
//! qualitative orderings the model is expected to reproduce.
//!
//! Each criterion records a fingerprint of every number it computed. Wall
//! time is kept out of the fingerprint, which is what the determinism
//! criterion compares across worker counts.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use duplexnet_core::analytic::{
    outage, outage_3d_special, outage_alpha4_closed, outage_approx_fd, outage_asymptotic, outage_special_quadrature,
    SpecialCaseParams,
};
use duplexnet_core::composite::{
    optimize_p2n_throughput, throughput, throughput_grid_argmax, CompositeMix, CompositeNetwork,
};
use duplexnet_core::montecarlo::threegpp::ThreeGppParams;
use duplexnet_core::montecarlo::SimSettings;
use duplexnet_core::{AntennaSystem, Error, NetworkConfig, QuadratureSpec, Scenario};

use crate::csvio::Row;
use crate::engine::{mc_outage, mc_outage_3gpp, Pool};
use crate::error::RunError;

pub const REALIZATIONS: u64 = 10_000;
pub const DETERMINISM_WORKERS: [usize; 3] = [1, 4, 16];
const GAMMA: f64 = 0.2;

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub fingerprint: Vec<f64>,
    pub elapsed: Duration,
}

impl CriterionOutcome {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {} [{:.1} s] {}: {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.elapsed.as_secs_f64(),
            self.title,
            self.detail
        )
    }

    fn same_fingerprint(&self, other: &CriterionOutcome) -> bool {
        self.id == other.id
            && self.passed == other.passed
            && self.fingerprint.len() == other.fingerprint.len()
            && self
                .fingerprint
                .iter()
                .zip(&other.fingerprint)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SuiteReport {
    pub outcomes: Vec<CriterionOutcome>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn get(&self, id: u8) -> Option<&CriterionOutcome> {
        self.outcomes.iter().find(|o| o.id == id)
    }

    pub fn table(&self) -> String {
        let mut s = String::new();
        for o in &self.outcomes {
            s.push_str(&o.line());
            s.push('\n');
        }
        let failed: Vec<String> = self
            .outcomes
            .iter()
            .filter(|o| !o.passed)
            .map(|o| o.id.to_string())
            .collect();
        if failed.is_empty() {
            s.push_str(&format!("all {} criteria passed\n", self.outcomes.len()));
        } else {
            s.push_str(&format!("failed: {}\n", failed.join(", ")));
        }
        s
    }

    pub fn rows(&self, seed: u64) -> Vec<Row> {
        self.outcomes
            .iter()
            .map(|o| Row {
                job: "validate".into(),
                scenario: String::new(),
                engine: String::new(),
                metric: format!("criterion_{}", o.id),
                rate: None,
                sigma_l2_db: None,
                lambda: None,
                m: None,
                p_2n: None,
                p_u: None,
                value: if o.passed { 1.0 } else { 0.0 },
                std_error: None,
                error_bound: None,
                n_realizations: None,
                seed: Some(seed),
                wall_time_s: o.elapsed.as_secs_f64(),
            })
            .collect()
    }
}

/// Every criterion except determinism, in order.
pub const COMPUTED: [u8; 9] = [1, 2, 3, 4, 5, 6, 7, 8, 10];

pub fn title(id: u8) -> &'static str {
    match id {
        1 => "closed-form anchor 1 - 1/(1 + 3pi/4)",
        2 => "analytic vs Monte Carlo grid",
        3 => "density independence without loopback",
        4 => "convergence to perfect cancellation with density",
        5 => "architecture ordering",
        6 => "passive suppression gain at M -> inf",
        7 => "composite optimizer anchors",
        8 => "throughput affine in p_2n",
        9 => "determinism across worker counts",
        10 => "3GPP pico-cell ordering",
        _ => "unknown",
    }
}

fn limit(id: u8) -> Option<Duration> {
    match id {
        1 => Some(Duration::from_secs(60)),
        2 => Some(Duration::from_secs(30 * 60)),
        10 => Some(Duration::from_secs(10 * 60)),
        _ => None,
    }
}

/// What a criterion body returns before timing is attached.
struct Verdict {
    passed: bool,
    detail: String,
    fingerprint: Vec<f64>,
}

fn numerical(what: impl std::fmt::Display) -> impl FnOnce(Error) -> RunError {
    move |e| RunError::numerical(what, e)
}

pub fn run_criterion(id: u8, pool: &Pool, seed: u64) -> Result<CriterionOutcome, RunError> {
    let start = Instant::now();
    let v = match id {
        1 => anchor(pool, seed)?,
        2 => cross_validation(pool, seed)?,
        3 => density_independence()?,
        4 => perfect_cancellation_convergence()?,
        5 => architecture_ordering(pool)?,
        6 => passive_suppression_gain()?,
        7 => optimizer_anchors()?,
        8 => throughput_linearity()?,
        10 => threegpp_ordering(pool, seed)?,
        _ => return Err(RunError::config(format!("no computed criterion {id}"))),
    };
    let elapsed = start.elapsed();
    let mut passed = v.passed;
    let mut detail = v.detail;
    if let Some(max) = limit(id) {
        if elapsed > max {
            passed = false;
            detail.push_str(&format!("; exceeded the {} s limit", max.as_secs()));
        }
    }
    Ok(CriterionOutcome {
        id,
        title: title(id),
        passed,
        detail,
        fingerprint: v.fingerprint,
        elapsed,
    })
}

pub fn run_computed(pool: &Pool, seed: u64) -> Result<Vec<CriterionOutcome>, RunError> {
    COMPUTED.iter().map(|&id| run_criterion(id, pool, seed)).collect()
}

/// Re-runs the computed criteria at each worker count in `workers` and
/// compares against `reference`, which was produced with
/// `reference_workers`.
pub fn determinism(
    reference: &[CriterionOutcome],
    reference_workers: usize,
    workers: &[usize],
    seed: u64,
) -> Result<CriterionOutcome, RunError> {
    let start = Instant::now();
    let mut mismatches = Vec::new();
    let mut checked = vec![reference_workers];
    for &w in workers {
        if checked.contains(&w) {
            continue;
        }
        checked.push(w);
        let pool = Pool::new(Some(w))?;
        let rerun = run_computed(&pool, seed)?;
        for (a, b) in reference.iter().zip(&rerun) {
            if !a.same_fingerprint(b) {
                mismatches.push(format!("criterion {} at {w} workers", a.id));
            }
        }
    }
    checked.sort_unstable();
    let passed = mismatches.is_empty();
    let detail = if passed {
        format!(
            "{} numbers bit-identical across {:?} workers",
            reference.iter().map(|o| o.fingerprint.len()).sum::<usize>(),
            checked
        )
    } else {
        format!("differs: {}", mismatches.join(", "))
    };
    Ok(CriterionOutcome {
        id: 9,
        title: title(9),
        passed,
        detail,
        fingerprint: Vec::new(),
        elapsed: start.elapsed(),
    })
}

/// Runs criteria 1–10 on `pool`, then re-runs them at the other worker
/// counts for the determinism check.
pub fn validate_all(pool: &Pool, seed: u64) -> Result<SuiteReport, RunError> {
    let mut outcomes = run_computed(pool, seed)?;
    let det = determinism(&outcomes, pool.workers(), &DETERMINISM_WORKERS, seed)?;
    let pos = outcomes.iter().position(|o| o.id > 9).unwrap_or(outcomes.len());
    outcomes.insert(pos, det);
    Ok(SuiteReport { outcomes })
}

fn base() -> NetworkConfig {
    NetworkConfig::default()
}

fn link_config(scenario: Scenario, rate: f64, sigma_l2_db: f64) -> NetworkConfig {
    let (a1, a2) = if scenario.is_uplink() { (4.0, 3.0) } else { (4.0, 4.0) };
    base().with_alphas(a1, a2).with_rate(rate).with_sigma_l2_db(sigma_l2_db)
}

fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

fn anchor(pool: &Pool, seed: u64) -> Result<Verdict, RunError> {
    let cfg = base().with_rate(1.0).with_sigma_l2(0.0);
    let ant = AntennaSystem::symmetric(1, GAMMA);
    let sp = SpecialCaseParams::new(1, GAMMA).map_err(numerical("M=1"))?;
    let quad = QuadratureSpec::default();
    let exact = 1.0 - 1.0 / (1.0 + 3.0 * PI / 4.0);
    let closed = outage_3d_special(&cfg, &sp, &quad).map_err(numerical("3D closed form"))?.value;
    let special = outage_special_quadrature(Scenario::ThreeNodeDown, &cfg, &sp, &quad)
        .map_err(numerical("3D special-case quadrature"))?
        .value;
    let general = outage(Scenario::ThreeNodeDown, &cfg, &ant)
        .map_err(numerical("3D general quadrature"))?
        .value;
    let mc = pool
        .install(|| mc_outage(Scenario::ThreeNodeDown, &cfg, &ant, &SimSettings::default(), REALIZATIONS, seed))
        .map_err(numerical("3D Monte Carlo"))?;
    let se = mc.std_error.unwrap_or(0.0);
    let routes = [exact, closed, special, general];
    let worst = routes
        .iter()
        .flat_map(|a| routes.iter().map(move |b| rel_gap(*a, *b)))
        .fold(0.0, f64::max);
    let mc_gap = (mc.value - exact).abs();
    Ok(Verdict {
        passed: worst <= 1e-6 && mc_gap <= 3.0 * se,
        detail: format!(
            "closed {closed:.8}, special {special:.8}, general {general:.8} vs {exact:.8} (worst rel {worst:.1e}); MC {:.4} ± {se:.4}",
            mc.value
        ),
        fingerprint: vec![closed, special, general, mc.value, se],
    })
}

fn cross_validation(pool: &Pool, seed: u64) -> Result<Verdict, RunError> {
    let mut points = Vec::new();
    for sc in Scenario::ALL {
        for rate in [0.1, 1.0, 4.0] {
            for sigma in [f64::NEG_INFINITY, -30.0] {
                for m in [1u32, 4, 8] {
                    points.push((sc, rate, sigma, m));
                }
            }
        }
    }
    let results = pool.map(&points, |&(sc, rate, sigma, m)| {
        let cfg = link_config(sc, rate, sigma);
        let ant = AntennaSystem::symmetric(m, GAMMA);
        let at = format!("{sc} R={rate} sigma_l2_db={sigma} M={m}");
        let a = outage(sc, &cfg, &ant).map_err(numerical(&at))?.value;
        let mc = mc_outage(sc, &cfg, &ant, &SimSettings::default(), REALIZATIONS, seed).map_err(numerical(&at))?;
        Ok::<_, RunError>((a, mc.value, mc.std_error.unwrap_or(0.0), at))
    });
    let mut fingerprint = Vec::new();
    let mut failures = Vec::new();
    let mut worst = (0.0, String::new());
    for ((sc, ..), r) in points.iter().zip(results) {
        let (a, m, se, at) = r?;
        fingerprint.extend([a, m, se]);
        let tol = if sc.is_uplink() { 0.03_f64 } else { 0.02 }.max(3.0 * se);
        let gap = (a - m).abs();
        if gap > worst.0 {
            worst = (gap, at.clone());
        }
        if gap > tol {
            failures.push(format!("{at}: {a:.4} vs {m:.4}"));
        }
    }
    let detail = format!(
        "{}/{} points within tolerance; worst gap {:.4} at {}{}",
        points.len() - failures.len(),
        points.len(),
        worst.0,
        worst.1,
        if failures.is_empty() {
            String::new()
        } else {
            format!("; failing {}", failures.join("; "))
        }
    );
    Ok(Verdict {
        passed: failures.is_empty(),
        detail,
        fingerprint,
    })
}

fn density_independence() -> Result<Verdict, RunError> {
    let quad = QuadratureSpec::default();
    let lambdas = [1e-3, 1e-2, 1e-1];
    let mut params = Vec::new();
    for m in [1u32, 4, 8] {
        params.push((format!("M={m}"), SpecialCaseParams::new(m, GAMMA).map_err(numerical("M"))?));
    }
    params.push(("M=inf".into(), SpecialCaseParams::new_asymptotic(GAMMA).map_err(numerical("M=inf"))?));
    let mut worst = 0.0_f64;
    let mut fingerprint = Vec::new();
    for (label, sp) in &params {
        for sc in Scenario::ALL {
            let mut vals = Vec::new();
            for &lambda in &lambdas {
                let cfg = base().with_lambda(lambda).with_rate(1.0).with_sigma_l2(0.0);
                let at = format!("{sc} {label} lambda={lambda}");
                let v = match sc {
                    Scenario::ThreeNodeDown => outage_3d_special(&cfg, sp, &quad),
                    _ => outage_approx_fd(sc, &cfg, sp, &quad),
                }
                .map_err(numerical(at))?
                .value;
                vals.push(v);
            }
            let spread = vals.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
                - vals.iter().fold(f64::INFINITY, |a, &b| a.min(b));
            worst = worst.max(spread);
            fingerprint.extend(vals);
        }
    }
    // The 𝒴-constant route at α = 4 must agree with the closed forms too.
    let cfg = base().with_rate(1.0).with_sigma_l2(0.0);
    let sp = &params[1].1;
    for sc in [Scenario::TwoNodeDown, Scenario::TwoNodeUp, Scenario::ThreeNodeUp] {
        let y = outage_alpha4_closed(sc, &cfg, sp, &quad).map_err(numerical(sc))?.value;
        let c = outage_approx_fd(sc, &cfg, sp, &quad).map_err(numerical(sc))?.value;
        worst = worst.max((y - c).abs());
        fingerprint.push(y);
    }
    Ok(Verdict {
        passed: worst <= 1e-9,
        detail: format!("largest spread across lambda {worst:.1e}"),
        fingerprint,
    })
}

fn perfect_cancellation_convergence() -> Result<Verdict, RunError> {
    let ant = AntennaSystem::symmetric(8, GAMMA);
    let lambda = 0.5;
    let mut gaps = [0.0; 2];
    let mut fingerprint = Vec::new();
    for (i, sc) in [Scenario::ThreeNodeUp, Scenario::TwoNodeUp].into_iter().enumerate() {
        let cfg = link_config(sc, 0.1, -10.0).with_lambda(lambda);
        let at = format!("{sc} lambda={lambda}");
        let with_li = outage(sc, &cfg, &ant).map_err(numerical(&at))?.value;
        let perfect = outage(sc, &cfg.with_sigma_l2(0.0), &ant).map_err(numerical(&at))?.value;
        gaps[i] = with_li - perfect;
        fingerprint.extend([with_li, perfect]);
    }
    let three_ok = gaps[0].abs() <= 0.02;
    let two_ok = gaps[1] >= 0.02;
    Ok(Verdict {
        passed: three_ok && two_ok,
        detail: format!(
            "M=8, R=0.1, sigma_l2=-10 dB, lambda=0.5: 3U gap {:.4} (needs <= 0.02, {}), 2U gap {:.4} (needs >= 0.02, {})",
            gaps[0],
            if three_ok { "ok" } else { "fails" },
            gaps[1],
            if two_ok { "ok" } else { "fails" }
        ),
        fingerprint,
    })
}

fn architecture_ordering(pool: &Pool) -> Result<Verdict, RunError> {
    let rates: Vec<f64> = (0..15).map(|i| 0.5 + 0.25 * i as f64).collect();
    let mut points = Vec::new();
    for m in [4u32, 8] {
        for &r in &rates {
            points.push((m, r));
        }
    }
    let results = pool.map(&points, |&(m, r)| {
        let ant = AntennaSystem::symmetric(m, GAMMA);
        let eval = |sc: Scenario, sigma: f64| {
            outage(sc, &link_config(sc, r, sigma), &ant)
                .map(|o| o.value)
                .map_err(numerical(format!("{sc} M={m} R={r} sigma_l2_db={sigma}")))
        };
        Ok::<_, RunError>([
            eval(Scenario::TwoNodeDown, -30.0)?,
            eval(Scenario::ThreeNodeDown, -30.0)?,
            eval(Scenario::TwoNodeUp, -30.0)?,
            eval(Scenario::ThreeNodeUp, -30.0)?,
            eval(Scenario::TwoNodeUp, f64::NEG_INFINITY)?,
            eval(Scenario::ThreeNodeUp, f64::NEG_INFINITY)?,
        ])
    });
    let mut fingerprint = Vec::new();
    let mut failures = Vec::new();
    let mut equal_gap = 0.0_f64;
    let mut min_margin = (f64::INFINITY, f64::INFINITY);
    for (&(m, r), res) in points.iter().zip(results) {
        let [d2, d3, u2, u3, u2p, u3p] = res?;
        fingerprint.extend([d2, d3, u2, u3, u2p, u3p]);
        min_margin = (min_margin.0.min(d2 - d3), min_margin.1.min(u2 - u3));
        if d3 >= d2 {
            failures.push(format!("3D >= 2D at M={m} R={r}"));
        }
        if u3 >= u2 {
            failures.push(format!("3U >= 2U at M={m} R={r}"));
        }
        equal_gap = equal_gap.max((u2p - u3p).abs());
    }
    if equal_gap > 1e-6 {
        failures.push(format!("2U and 3U differ by {equal_gap:.1e} without loopback"));
    }
    Ok(Verdict {
        passed: failures.is_empty(),
        detail: format!(
            "smallest margins 2D-3D {:.4}, 2U-3U {:.4}; 2U vs 3U without loopback {:.1e}{}",
            min_margin.0,
            min_margin.1,
            equal_gap,
            if failures.is_empty() {
                String::new()
            } else {
                format!("; {}", failures.join("; "))
            }
        ),
        fingerprint,
    })
}

fn passive_suppression_gain() -> Result<Verdict, RunError> {
    let cfg = link_config(Scenario::ThreeNodeUp, 0.1, -20.0);
    let sp = SpecialCaseParams::new_asymptotic(GAMMA).map_err(numerical("M=inf"))?;
    let quad = QuadratureSpec::default();
    let without = outage_asymptotic(Scenario::TwoNodeUp, &cfg, &sp, &quad)
        .map_err(numerical("2U M=inf"))?
        .value;
    let with = outage_asymptotic(Scenario::ThreeNodeUp, &cfg, &sp, &quad)
        .map_err(numerical("3U M=inf"))?
        .value;
    let reduction = (without - with) / without;
    Ok(Verdict {
        passed: (reduction - 0.40).abs() <= 0.10,
        detail: format!(
            "R=0.1, sigma_l2=-20 dB: without suppression {without:.4}, with {with:.4}, reduction {:.1}% (needs 30-50%)",
            100.0 * reduction
        ),
        fingerprint: vec![without, with],
    })
}

fn composite(lambda: f64) -> Result<CompositeNetwork, RunError> {
    let cfg = base().with_lambda(lambda).with_rate(1.0).with_sigma_l2_db(-30.0);
    CompositeNetwork::standard(cfg, AntennaSystem::symmetric(8, GAMMA)).map_err(|e| RunError::config(e.to_string()))
}

fn optimizer_anchors() -> Result<Verdict, RunError> {
    let mut fingerprint = Vec::new();
    let mut parts = Vec::new();
    let mut passed = true;
    for (lambda, want) in [(1e-1, 1.0), (1e-2, 0.0)] {
        let net = composite(lambda)?;
        let at = format!("lambda={lambda}");
        let d = optimize_p2n_throughput(&net).map_err(numerical(&at))?;
        let grid = throughput_grid_argmax(&net, 1.0, 201).map_err(numerical(&at))?;
        let ok = d.p_2n == want && grid.p_2n == d.p_2n;
        passed &= ok;
        parts.push(format!(
            "lambda={lambda}: p_2n*={} (grid {}, want {want}) lhs {:.4} rhs {:.4}",
            d.p_2n, grid.p_2n, d.lhs, d.rhs
        ));
        fingerprint.extend([d.p_2n, d.throughput, d.lhs, d.rhs, grid.p_2n, grid.value]);
    }
    Ok(Verdict {
        passed,
        detail: parts.join("; "),
        fingerprint,
    })
}

fn throughput_linearity() -> Result<Verdict, RunError> {
    let xs = [0.0, 0.25, 0.5, 0.75, 1.0];
    let mut worst = 0.0_f64;
    let mut fingerprint = Vec::new();
    for lambda in [1e-2, 1e-1] {
        let net = composite(lambda)?;
        let mut ys = Vec::new();
        for &p in &xs {
            let mix = CompositeMix::new(p, 1.0).map_err(|e| RunError::config(e.to_string()))?;
            ys.push(
                throughput(&net, &mix)
                    .map_err(numerical(format!("lambda={lambda} p_2n={p}")))?
                    .throughput,
            );
        }
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        let slope = sxy / sxx;
        let resid = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (y - (my + slope * (x - mx))).abs())
            .fold(0.0, f64::max);
        worst = worst.max(resid / my.abs());
        fingerprint.extend(ys);
    }
    Ok(Verdict {
        passed: worst < 1e-8,
        detail: format!("largest relative residual of the line fit {worst:.1e}"),
        fingerprint,
    })
}

fn threegpp_ordering(pool: &Pool, seed: u64) -> Result<Verdict, RunError> {
    let mut points = Vec::new();
    for rate in [1.0, 2.0, 4.0] {
        for m in [4u32, 8] {
            for pair in [
                (Scenario::TwoNodeDown, Scenario::ThreeNodeDown),
                (Scenario::TwoNodeUp, Scenario::ThreeNodeUp),
            ] {
                points.push((rate, m, pair));
            }
        }
    }
    let results = pool.map(&points, |&(rate, m, (two, three))| {
        let params = ThreeGppParams {
            rate,
            ..ThreeGppParams::default()
        };
        let ant = AntennaSystem::symmetric(m, GAMMA);
        let run = |sc: Scenario| {
            mc_outage_3gpp(sc, &params, &ant, REALIZATIONS, seed).map_err(numerical(format!("3GPP {sc} R={rate} M={m}")))
        };
        Ok::<_, RunError>((run(two)?, run(three)?))
    });
    let mut fingerprint = Vec::new();
    let mut failures = Vec::new();
    let mut summary = Vec::new();
    for (&(rate, m, (two, three)), res) in points.iter().zip(results) {
        let (a, b) = res?;
        let (sa, sb) = (a.std_error.unwrap_or(0.0), b.std_error.unwrap_or(0.0));
        fingerprint.extend([a.value, sa, b.value, sb]);
        let slack = 3.0 * (sa * sa + sb * sb).sqrt();
        summary.push(format!("{two}/{three} R={rate} M={m}: {:.3}/{:.3}", a.value, b.value));
        if b.value > a.value + slack {
            failures.push(format!("{three} above {two} at R={rate} M={m}"));
        }
    }
    Ok(Verdict {
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("{} pairs ordered; {}", points.len(), summary.join(", "))
        } else {
            failures.join("; ")
        },
        fingerprint,
    })
}
