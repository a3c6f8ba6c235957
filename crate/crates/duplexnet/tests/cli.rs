use std::path::Path;
use std::process::Command;

use duplexnet::config::ExperimentSpec;
use duplexnet::csvio::read_rows_from_path;
use duplexnet::{run, Pool};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_duplexnet"));
    for (k, _) in std::env::vars() {
        if k.starts_with("DUPLEXNET_") {
            c.env_remove(k);
        }
    }
    c
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn optimize_reports_two_node_when_dense() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("opt.csv");
    let status = bin()
        .args(["--preset", "optimize-dense", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let rows = read_rows_from_path(&out).unwrap();
    let star = rows
        .iter()
        .find(|r| r.metric == "p_2n_star" && r.scenario == "composite")
        .unwrap();
    assert_eq!(star.value, 1.0);
    assert_eq!(star.lambda, Some(0.1));
}

#[test]
fn config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", "[network]\nalpha1 = 1.5\n");
    let out = bin().arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("configuration error"));
    assert_eq!(bin().output().unwrap().status.code(), Some(1));
    assert_eq!(bin().args(["--preset", "nope"]).output().unwrap().status.code(), Some(1));
}

#[test]
fn numerical_failures_exit_with_two_and_name_the_point() {
    let dir = tempfile::tempdir().unwrap();
    // An absolute tolerance no quadrature can meet.
    let cfg = write(
        dir.path(),
        "tight.toml",
        "[job]\nscenarios = [\"2U\"]\n[analytic]\nrel_tol = 0.0\nabs_tol = 0.0\n[[grid]]\nname = \"rate\"\nvalues = [1.0, 2.5]\n",
    );
    let out = bin().arg("--config").arg(&cfg).output().unwrap();
    let err = String::from_utf8_lossy(&out.stderr);
    assert_eq!(out.status.code(), Some(2), "{err}");
    assert!(err.contains("rate=1") && err.contains("2U"), "{err}");
}

#[test]
fn environment_overrides_flags_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("env.csv");
    let cfg = write(
        dir.path(),
        "mc.toml",
        "[job]\nscenarios = [\"3D\"]\nengine = \"mc\"\n[antenna]\nsectors = 4\n",
    );
    let status = bin()
        .arg("--config")
        .arg(&cfg)
        .env("DUPLEXNET_SEED", "42")
        .env("DUPLEXNET_REALIZATIONS", "300")
        .env("DUPLEXNET_OUT", &out)
        .env("DUPLEXNET_WORKERS", "2")
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let rows = read_rows_from_path(&out).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].seed, Some(42));
    assert_eq!(rows[0].n_realizations, Some(300));
    assert_eq!(rows[0].engine, "mc");
}

fn small_sweep(seed: u64) -> ExperimentSpec {
    let mut spec = ExperimentSpec::from_toml(
        r#"
        [job]
        scenarios = ["2D", "3U"]
        engine = "both"
        realizations = 2000

        [network]
        sigma_l2_db = -30.0

        [[grid]]
        name = "m"
        values = [1, 4]

        [[grid]]
        name = "rate"
        values = [0.5, 2.0]
        "#,
    )
    .unwrap();
    spec.job.seed = seed;
    spec
}

#[test]
fn output_does_not_depend_on_worker_count() {
    let spec = small_sweep(5);
    let a = run(&spec, &Pool::new(Some(1)).unwrap()).unwrap().rows;
    let b = run(&spec, &Pool::new(Some(3)).unwrap()).unwrap().rows;
    assert_eq!(a.len(), 16);
    assert!(a.iter().zip(&b).all(|(x, y)| x.same_content(y)));
}

#[test]
fn reseeding_moves_mc_points_within_three_standard_errors() {
    let pool = Pool::new(None).unwrap();
    let a = run(&small_sweep(1), &pool).unwrap().rows;
    let b = run(&small_sweep(2), &pool).unwrap().rows;
    for (x, y) in a.iter().zip(&b).filter(|(x, _)| x.engine == "mc") {
        let se = (x.std_error.unwrap().powi(2) + y.std_error.unwrap().powi(2)).sqrt();
        assert!((x.value - y.value).abs() < 3.0 * se, "{x:?} vs {y:?}");
        assert_ne!(x.seed, y.seed);
    }
}

#[test]
fn figure_preset_job_expands_with_overrides() {
    let spec = ExperimentSpec::from_toml(
        "[job]\nkind = \"figure-preset\"\npreset = \"optimize-sparse\"\nseed = 9\n",
    )
    .unwrap();
    let rows = run(&spec, &Pool::new(Some(1)).unwrap()).unwrap().rows;
    let star = rows.iter().find(|r| r.metric == "p_2n_star").unwrap();
    assert_eq!(star.value, 0.0);
    assert_eq!(star.job, "optimize");
}

#[test]
fn composite_and_throughput_surfaces_have_both_engines() {
    let spec = ExperimentSpec::from_toml(
        r#"
        [job]
        kind = "throughput-surface"
        engine = "both"
        realizations = 2000

        [[grid]]
        name = "p_2n"
        values = [0.0, 1.0]
        "#,
    )
    .unwrap();
    let rows = run(&spec, &Pool::new(None).unwrap()).unwrap().rows;
    for p in [0.0, 1.0] {
        let pick = |engine: &str| {
            rows.iter()
                .find(|r| r.metric == "throughput" && r.engine == engine && r.p_2n == Some(p))
                .unwrap()
                .clone()
        };
        let (a, m) = (pick("analytic"), pick("mc"));
        let se = m.std_error.unwrap();
        assert!((a.value - m.value).abs() < 4.0 * se, "p_2n={p}: {} vs {} ± {se}", a.value, m.value);
    }
    let mut spec = spec;
    spec.job.kind = duplexnet::JobKind::CompositeSurface;
    spec.job.scenarios = vec!["uplink".into()];
    let rows = run(&spec, &Pool::new(None).unwrap()).unwrap().rows;
    assert!(rows.iter().all(|r| r.scenario == "uplink"));
    assert_eq!(rows.iter().filter(|r| r.engine == "mc").count(), 2);
}
