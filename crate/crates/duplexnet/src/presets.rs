//! Fixed parameterizations of the published figures. Shared defaults:
//! `λ = 10⁻²`, `γ = 0.2`, `θmax = 2π/3`, α = 4 on the downlink and
//! `(α₁, α₂) = (4, 3)` on the uplink, 10⁴ realizations per MC point.

use crate::config::{Axis, AxisName, Engine, ExperimentSpec, JobKind, PropagationModel};
use crate::error::RunError;

pub const NAMES: [&str; 17] = [
    "composite-down-30db",
    "composite-down-0db",
    "composite-up-30db",
    "composite-up-0db",
    "throughput-sparse",
    "throughput-dense",
    "fig5a",
    "fig5b",
    "fig6a",
    "fig6b",
    "fig6c",
    "fig7",
    "fig8",
    "fig10",
    "optimize-dense",
    "optimize-sparse",
    "validate",
];

fn unit_grid(n: usize) -> Vec<f64> {
    (0..=n).map(|i| i as f64 / n as f64).collect()
}

fn rates() -> Vec<f64> {
    let mut r = vec![0.1];
    r.extend((1..=16).map(|i| 0.5 * i as f64));
    r
}

fn spec(kind: JobKind, scenarios: &[&str], engine: Engine) -> ExperimentSpec {
    let mut s = ExperimentSpec::default();
    s.job.kind = kind;
    s.job.scenarios = scenarios.iter().map(|x| x.to_string()).collect();
    s.job.engine = engine;
    s
}

fn rate_sweep(scenarios: &[&str], sigma_l2_db: f64) -> ExperimentSpec {
    let mut s = spec(JobKind::OutageSweep, scenarios, Engine::Both);
    s.network.sigma_l2_db = sigma_l2_db;
    s.grid = vec![
        Axis::new(AxisName::M, vec![1.0, 4.0, 8.0]),
        Axis::new(AxisName::Rate, rates()),
    ];
    s
}

fn composite_surface(sigma_l2_db: f64, uplink: bool) -> ExperimentSpec {
    let mut s = spec(JobKind::CompositeSurface, &[], Engine::Analytic);
    s.network.sigma_l2_db = sigma_l2_db;
    s.job.scenarios = vec![if uplink { "uplink" } else { "downlink" }.into()];
    s.grid = vec![
        Axis::new(AxisName::PU, unit_grid(20)),
        Axis::new(AxisName::P2n, unit_grid(20)),
    ];
    s
}

fn throughput_surface(lambda: f64) -> ExperimentSpec {
    let mut s = spec(JobKind::ThroughputSurface, &[], Engine::Analytic);
    s.network.lambda = lambda;
    s.grid = vec![
        Axis::new(AxisName::PU, unit_grid(20)),
        Axis::new(AxisName::P2n, unit_grid(20)),
    ];
    s
}

fn optimize(lambda: f64) -> ExperimentSpec {
    let mut s = spec(JobKind::Optimize, &[], Engine::Analytic);
    s.network.lambda = lambda;
    s.composite.p_u = 1.0;
    s
}

/// The experiment a preset expands to.
pub fn preset(name: &str) -> Result<ExperimentSpec, RunError> {
    let s = match name {
        "composite-down-30db" => composite_surface(-30.0, false),
        "composite-down-0db" => composite_surface(0.0, false),
        "composite-up-30db" => composite_surface(-30.0, true),
        "composite-up-0db" => composite_surface(0.0, true),
        "throughput-sparse" => throughput_surface(1e-2),
        "throughput-dense" => throughput_surface(1e-1),
        "fig5a" => rate_sweep(&["2D", "3D"], f64::NEG_INFINITY),
        "fig5b" => rate_sweep(&["2D", "3D"], -30.0),
        "fig6a" => rate_sweep(&["2U", "3U"], f64::NEG_INFINITY),
        "fig6b" => rate_sweep(&["2U", "3U"], -10.0),
        "fig6c" => rate_sweep(&["2U", "3U"], -30.0),
        "fig7" => {
            let mut s = spec(JobKind::LiSweep, &["2U", "3U"], Engine::Analytic);
            s.network.rate = 0.1;
            s.grid = vec![
                Axis::new(AxisName::M, vec![1.0, 4.0, 8.0]),
                Axis {
                    linspace: Some((-50.0, 10.0, 25)),
                    ..Axis::new(AxisName::SigmaL2Db, Vec::new())
                },
            ];
            s
        }
        "fig8" => {
            let mut s = spec(JobKind::DensitySweep, &["2U", "3U"], Engine::Analytic);
            s.network.rate = 0.1;
            s.network.sigma_l2_db = -10.0;
            s.grid = vec![
                Axis::new(AxisName::M, vec![1.0, 4.0, 8.0]),
                Axis {
                    logspace: Some((-3.0, 1.0, 17)),
                    ..Axis::new(AxisName::Lambda, Vec::new())
                },
            ];
            s
        }
        "fig10" => {
            let mut s = spec(JobKind::OutageSweep, &["2D", "3D", "2U", "3U"], Engine::Mc);
            s.montecarlo.model = PropagationModel::ThreeGpp;
            s.grid = vec![
                Axis::new(AxisName::M, vec![4.0, 8.0]),
                Axis::new(AxisName::Rate, (1..=8).map(|i| 0.5 * i as f64).collect()),
            ];
            s
        }
        "optimize-dense" => optimize(1e-1),
        "optimize-sparse" => optimize(1e-2),
        "validate" => spec(JobKind::Validate, &[], Engine::Both),
        other => {
            return Err(RunError::config(format!(
                "unknown preset {other:?}; known presets: {}",
                NAMES.join(", ")
            )))
        }
    };
    Ok(s)
}
