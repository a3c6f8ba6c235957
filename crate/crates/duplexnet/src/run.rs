//! Turns an [`ExperimentSpec`] into CSV rows. Grid points are evaluated on
//! the worker pool and collected back in grid order.

use std::time::Instant;

use duplexnet_core::analytic::{
    outage_3d_special, outage_approx_fd, outage_asymptotic, outage_with, EvalOptions,
};
use duplexnet_core::composite::{
    composite_outage, optimize_p2n_success, optimize_p2n_throughput, throughput, Link,
};
use duplexnet_core::montecarlo::composite_job;
use duplexnet_core::{Error, OutageEstimate, Scenario};

use crate::config::{ExperimentSpec, GridPoint, JobKind, PropagationModel, Route};
use crate::csvio::Row;
use crate::engine::{mc_outage, mc_outage_3gpp, Pool};
use crate::error::RunError;
use crate::presets::preset;
use crate::validate::{validate_all, SuiteReport};

#[derive(Debug, Clone, Default)]
pub struct RunOutput {
    pub rows: Vec<Row>,
    /// Present for `validate` jobs.
    pub report: Option<SuiteReport>,
}

/// Replaces a `figure-preset` experiment by the preset it names, keeping the
/// job-level overrides (engine, seed, realizations, output, workers).
pub fn expand(spec: &ExperimentSpec) -> Result<ExperimentSpec, RunError> {
    if spec.job.kind != JobKind::FigurePreset {
        return Ok(spec.clone());
    }
    let name = spec
        .job
        .preset
        .as_deref()
        .ok_or_else(|| RunError::config("figure-preset jobs need job.preset"))?;
    let mut out = preset(name)?;
    out.job.seed = spec.job.seed;
    out.job.realizations = spec.job.realizations;
    out.job.output.clone_from(&spec.job.output);
    out.job.workers = spec.job.workers;
    Ok(out)
}

pub fn run(spec: &ExperimentSpec, pool: &Pool) -> Result<RunOutput, RunError> {
    let spec = expand(spec)?;
    spec.validate()?;
    if spec.job.kind == JobKind::Validate {
        let report = validate_all(pool, spec.job.seed)?;
        return Ok(RunOutput {
            rows: report.rows(spec.job.seed),
            report: Some(report),
        });
    }
    let points = spec.grid_points()?;
    let tasks: Vec<Task> = match spec.job.kind {
        JobKind::CompositeSurface | JobKind::ThroughputSurface | JobKind::Optimize => {
            let links = links(&spec)?;
            points
                .iter()
                .map(|&point| Task {
                    point,
                    target: Target::Composite(links.clone()),
                })
                .collect()
        }
        _ => {
            let scenarios = spec.scenarios()?;
            points
                .iter()
                .flat_map(|&point| {
                    scenarios.iter().map(move |&sc| Task {
                        point,
                        target: Target::Outage(sc),
                    })
                })
                .collect()
        }
    };
    let results = pool.map(&tasks, |t| {
        let start = Instant::now();
        let mut rows = evaluate(&spec, t)?;
        let wall = start.elapsed().as_secs_f64();
        for r in &mut rows {
            r.wall_time_s = wall;
        }
        Ok::<_, RunError>(rows)
    });
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    Ok(RunOutput { rows, report: None })
}

#[derive(Debug, Clone)]
enum Target {
    Outage(Scenario),
    Composite(Vec<Link>),
}

#[derive(Debug, Clone)]
struct Task {
    point: GridPoint,
    target: Target,
}

/// Links a composite job covers. Link names and scenario labels are both
/// accepted; `2D`/`3D` select the downlink and `2U`/`3U` the uplink.
fn links(spec: &ExperimentSpec) -> Result<Vec<Link>, RunError> {
    let mut out = Vec::new();
    for s in &spec.job.scenarios {
        let link = match s.trim().to_ascii_lowercase().as_str() {
            "downlink" | "2d" | "3d" => Link::Downlink,
            "uplink" | "2u" | "3u" => Link::Uplink,
            other => return Err(RunError::config(format!("unknown link {other:?}"))),
        };
        if !out.contains(&link) {
            out.push(link);
        }
    }
    if out.is_empty() {
        out = vec![Link::Downlink, Link::Uplink];
    }
    Ok(out)
}

fn link_label(link: Link) -> &'static str {
    match link {
        Link::Downlink => "downlink",
        Link::Uplink => "uplink",
    }
}

fn failure(point: &GridPoint, what: &str) -> impl FnOnce(Error) -> RunError {
    let at = format!("{what} {point}");
    move |e| match e {
        Error::InvalidConfig(msg) => RunError::config(format!("{msg} at {at}")),
        e => RunError::numerical(at, e),
    }
}

struct RowBuilder<'a> {
    spec: &'a ExperimentSpec,
    point: GridPoint,
    composite: bool,
}

impl RowBuilder<'_> {
    fn row(&self, scenario: &str, engine: &str, metric: &str, value: f64) -> Row {
        let asymptotic = self.spec.analytic.route == Route::Asymptotic && !self.composite;
        let threegpp = self.spec.montecarlo.model == PropagationModel::ThreeGpp;
        Row {
            job: self.spec.job.kind.label().into(),
            scenario: scenario.into(),
            engine: engine.into(),
            metric: metric.into(),
            rate: Some(self.point.rate),
            sigma_l2_db: Some(self.point.sigma_l2_db),
            lambda: Some(if threegpp {
                self.spec.threegpp.lambda_per_km2
            } else {
                self.point.lambda
            }),
            m: if asymptotic || self.composite { None } else { Some(self.point.m) },
            p_2n: self.composite.then_some(self.point.p_2n),
            p_u: self.composite.then_some(self.point.p_u),
            value,
            std_error: None,
            error_bound: None,
            n_realizations: None,
            seed: None,
            wall_time_s: 0.0,
        }
    }

    fn estimate(&self, scenario: &str, engine: &str, metric: &str, est: &OutageEstimate) -> Row {
        let mut r = self.row(scenario, engine, metric, est.value);
        r.std_error = est.std_error;
        r.error_bound = est.error_bound;
        r.n_realizations = est.n_realizations;
        if est.n_realizations.is_some() {
            r.seed = Some(self.spec.job.seed);
        }
        r
    }
}

fn evaluate(spec: &ExperimentSpec, task: &Task) -> Result<Vec<Row>, RunError> {
    match &task.target {
        Target::Outage(sc) => evaluate_outage(spec, &task.point, *sc),
        Target::Composite(links) => match spec.job.kind {
            JobKind::CompositeSurface => evaluate_composite(spec, &task.point, links),
            JobKind::ThroughputSurface => evaluate_throughput(spec, &task.point),
            _ => evaluate_optimize(spec, &task.point),
        },
    }
}

fn evaluate_outage(spec: &ExperimentSpec, point: &GridPoint, sc: Scenario) -> Result<Vec<Row>, RunError> {
    let b = RowBuilder {
        spec,
        point: *point,
        composite: false,
    };
    let label = sc.label();
    let ant = spec.antennas(point)?;
    let n = spec.job.realizations;
    let seed = spec.job.seed;
    let mut rows = Vec::new();
    if spec.montecarlo.model == PropagationModel::ThreeGpp {
        let params = spec.threegpp(point)?;
        let est = mc_outage_3gpp(sc, &params, &ant, n, seed).map_err(failure(point, label))?;
        rows.push(b.estimate(label, "mc-3gpp", "outage", &est));
        return Ok(rows);
    }
    let cfg = spec.network_config(point, sc.is_uplink())?;
    if spec.job.engine.analytic() {
        let quad = spec.quadrature();
        let est = match spec.analytic.route {
            Route::General => outage_with(sc, &cfg, &ant, &EvalOptions { quad }),
            Route::Special => {
                let sp = spec.special(point)?;
                match sc {
                    Scenario::ThreeNodeDown => outage_3d_special(&cfg, &sp, &quad),
                    _ => outage_approx_fd(sc, &cfg, &sp, &quad),
                }
            }
            Route::Asymptotic => outage_asymptotic(sc, &cfg, &spec.special(point)?, &quad),
        }
        .map_err(failure(point, label))?;
        rows.push(b.estimate(label, "analytic", "outage", &est));
    }
    if spec.job.engine.mc() {
        let settings = spec.sim_settings(point);
        let est = mc_outage(sc, &cfg, &ant, &settings, n, seed).map_err(failure(point, label))?;
        rows.push(b.estimate(label, "mc", "outage", &est));
    }
    Ok(rows)
}

fn mc_composite(spec: &ExperimentSpec, point: &GridPoint, link: Link) -> Result<OutageEstimate, RunError> {
    let net = spec.composite_network(point)?;
    let mix = spec.mix(point)?;
    let (sc, cfg, mut settings) = composite_job(&net, link, &mix).map_err(failure(point, link_label(link)))?;
    settings.window = spec.sim_settings(point).window;
    settings.tail_correction = spec.montecarlo.tail_correction;
    mc_outage(sc, &cfg, &net.antennas, &settings, spec.job.realizations, spec.job.seed)
        .map_err(failure(point, link_label(link)))
}

fn evaluate_composite(spec: &ExperimentSpec, point: &GridPoint, links: &[Link]) -> Result<Vec<Row>, RunError> {
    let b = RowBuilder {
        spec,
        point: *point,
        composite: true,
    };
    let net = spec.composite_network(point)?;
    let mix = spec.mix(point)?;
    let mut rows = Vec::new();
    for &link in links {
        let label = link_label(link);
        if spec.job.engine.analytic() {
            let o = composite_outage(&net, link, &mix).map_err(failure(point, label))?;
            rows.push(b.row(label, "analytic", "outage_two_node", o.two_node));
            rows.push(b.row(label, "analytic", "outage_three_node", o.three_node));
            rows.push(b.row(label, "analytic", "outage_mixed", o.mixed));
        }
        if spec.job.engine.mc() {
            let est = mc_composite(spec, point, link)?;
            rows.push(b.estimate(label, "mc", "outage_mixed", &est));
        }
    }
    Ok(rows)
}

fn evaluate_throughput(spec: &ExperimentSpec, point: &GridPoint) -> Result<Vec<Row>, RunError> {
    let b = RowBuilder {
        spec,
        point: *point,
        composite: true,
    };
    let net = spec.composite_network(point)?;
    let mix = spec.mix(point)?;
    let mut rows = Vec::new();
    if spec.job.engine.analytic() {
        let t = throughput(&net, &mix).map_err(failure(point, "throughput"))?;
        rows.push(b.row("composite", "analytic", "throughput", t.throughput));
        rows.push(b.row("composite", "analytic", "downlink_success", t.downlink_success));
        rows.push(b.row("composite", "analytic", "uplink_success", t.uplink_success));
    }
    if spec.job.engine.mc() {
        let d = mc_composite(spec, point, Link::Downlink)?;
        let u = mc_composite(spec, point, Link::Uplink)?;
        let scale = net.downlink.lambda * net.downlink.rate;
        let q = mix.uplink_activity();
        let value = scale * ((1.0 - d.value) + q * (1.0 - u.value));
        let (sd, su) = (d.std_error.unwrap_or(0.0), u.std_error.unwrap_or(0.0));
        let mut r = b.row("composite", "mc", "throughput", value);
        r.std_error = Some(scale * (sd * sd + q * q * su * su).sqrt());
        r.n_realizations = d.n_realizations;
        r.seed = Some(spec.job.seed);
        rows.push(r);
        let success = |est: &OutageEstimate| OutageEstimate {
            value: est.success(),
            ..*est
        };
        rows.push(b.estimate("composite", "mc", "downlink_success", &success(&d)));
        rows.push(b.estimate("composite", "mc", "uplink_success", &success(&u)));
    }
    Ok(rows)
}

fn evaluate_optimize(spec: &ExperimentSpec, point: &GridPoint) -> Result<Vec<Row>, RunError> {
    let b = RowBuilder {
        spec,
        point: *point,
        composite: true,
    };
    let net = spec.composite_network(point)?;
    let d = optimize_p2n_throughput(&net).map_err(failure(point, "throughput optimizer"))?;
    let mut rows = vec![
        b.row("composite", "analytic", "p_2n_star", d.p_2n),
        b.row("composite", "analytic", "throughput_at_star", d.throughput),
        b.row("composite", "analytic", "decision_lhs", d.lhs),
        b.row("composite", "analytic", "decision_rhs", d.rhs),
    ];
    for link in [Link::Downlink, Link::Uplink] {
        let label = link_label(link);
        let o = optimize_p2n_success(link, &net, point.p_u).map_err(failure(point, label))?;
        rows.push(b.row(label, "analytic", "p_2n_star_success", o.p_2n));
        rows.push(b.row(label, "analytic", "success_at_star", o.value));
    }
    // p_2n is the output here, not an input.
    for r in &mut rows {
        r.p_2n = None;
    }
    Ok(rows)
}
