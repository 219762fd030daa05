use std::path::Path;

use adagibbs::harness::{
    emit_plot_data, run_experiment, CounterexampleParams, Experiment, ExperimentConfig, OptimalScanParams,
    RunManifest,
};

fn configs_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs"))
}

fn read_column(path: &Path, column: &str) -> Vec<f64> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let idx = r.headers().unwrap().iter().position(|h| h == column).unwrap();
    r.records().map(|rec| rec.unwrap()[idx].parse().unwrap()).collect()
}

#[test]
fn shipped_configs_parse_and_validate() {
    let mut n = 0;
    for entry in std::fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let c = ExperimentConfig::load(&path).unwrap();
            c.validate().unwrap();
            n += 1;
        }
    }
    assert!(n >= 8);
}

#[test]
fn lazy_variance_default_passes_and_manifest_roundtrips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::load(&configs_dir().join("lazy_variance.toml")).unwrap();
    let m = run_experiment(&cfg, dir.path()).unwrap();
    assert!(m.passed(), "{:?}", m.checks);
    for f in &m.outputs {
        assert!(dir.path().join(f).is_file(), "{}", f.display());
    }
    let back = RunManifest::read(&dir.path().join("manifest.json")).unwrap();
    assert_eq!(back, m);
    assert!(back.digest_matches().unwrap());
    let reloaded = ExperimentConfig::load(&dir.path().join("config.toml")).unwrap();
    assert_eq!(reloaded.digest().unwrap(), m.config_digest);
}

#[test]
fn same_config_gives_identical_outputs() {
    let cfg = ExperimentConfig::load(&configs_dir().join("lipschitz.toml")).unwrap();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let ma = run_experiment(&cfg, a.path()).unwrap();
    let mb = run_experiment(&cfg, b.path()).unwrap();
    assert_eq!(ma.outputs, mb.outputs);
    for f in &ma.outputs {
        let (x, y) = (std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap());
        assert!(x == y, "{} differs", f.display());
    }
    assert_eq!(ma.checks, mb.checks);
    assert_eq!(ma.config_digest, mb.config_digest);
}

#[test]
fn edited_manifest_config_fails_digest_check() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::load(&configs_dir().join("geometric_gap.toml")).unwrap();
    let mut m = run_experiment(&cfg, dir.path()).unwrap();
    m.config.seed += 1;
    assert!(!m.digest_matches().unwrap());
}

#[test]
fn config_errors_name_the_field() {
    let unknown = ExperimentConfig::from_toml_str("kind = \"counterexample\"\nseed = 1\nn_stepz = 10\n").unwrap_err();
    assert!(unknown.to_string().contains("n_stepz"), "{unknown}");

    let cfg = ExperimentConfig::new(
        1,
        Experiment::OptimalScan(OptimalScanParams {
            epsilon: 0.9,
            ..Default::default()
        }),
    );
    let e = run_experiment(&cfg, tempfile::tempdir().unwrap().path()).unwrap_err();
    assert!(e.to_string().contains("epsilon"), "{e}");
}

#[test]
fn output_path_that_is_a_file_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("taken");
    std::fs::write(&blocker, "not a directory").unwrap();
    let cfg = ExperimentConfig::load(&configs_dir().join("geometric_gap.toml")).unwrap();
    assert!(run_experiment(&cfg, &blocker).is_err());
    assert!(run_experiment(&cfg, &blocker.join("below")).is_err());
}

#[test]
fn counterexample_writes_traces_and_plot_series() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::new(
        404,
        Experiment::Counterexample(CounterexampleParams {
            n_steps: 20_000,
            n_runs: 20,
            trace_every: 100,
            adaptive_min_final: 200.0,
            control_max_final: 50.0,
            min_passing: 16,
        }),
    );
    let m = run_experiment(&cfg, dir.path()).unwrap();
    assert!(m.passed(), "{:?}", m.checks);
    let traces = std::fs::read_dir(dir.path().join("traces")).unwrap().count();
    assert_eq!(traces, 40);
    assert!(dir.path().join("summary.csv").is_file());

    let adaptive = read_column(&dir.path().join("plot_adaptive.csv"), "x_1");
    let control = read_column(&dir.path().join("plot_control.csv"), "x_1");
    let q = adaptive.len() / 4;
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    assert!(mean(&adaptive[3 * q..]) > mean(&adaptive[q..2 * q]) + 100.0);
    assert!(*adaptive.last().unwrap() > 200.0);
    assert!(control.iter().all(|x| *x < 500.0));

    let out = dir.path().join("xy.csv");
    let rows = emit_plot_data(&dir.path().join("plot_adaptive.csv"), "step", "x_1", &out).unwrap();
    assert_eq!(rows, adaptive.len());
}
