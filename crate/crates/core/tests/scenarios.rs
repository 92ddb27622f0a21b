use std::path::PathBuf;
use std::process::Command;
use viscoshell::material::Material;
use viscoshell::scenario::config::{CaseConfig, ScenarioConfig};
use viscoshell::scenario::output::run_case;
use viscoshell::scenario::run::{run_point, run_with, Row};
use viscoshell::solver::SolverOptions;

fn config_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn config(name: &str) -> ScenarioConfig {
    ScenarioConfig::load(&config_dir().join(format!("{name}.toml"))).unwrap()
}

fn sigma_gap(a: &[Row], b: &[Row]) -> f64 {
    assert_eq!(a.len(), b.len());
    let scale = a.iter().map(|r| r.sigma.abs().max()).fold(0.0, f64::max);
    a.iter().zip(b).map(|(p, q)| (p.sigma - q.sigma).abs().max()).fold(0.0, f64::max) / scale
}

#[test]
fn one_element_membrane_matches_point_driver() {
    let tight = SolverOptions { tol: 1e-14, tol_dx: 1e-15, ..Default::default() };
    for name in ["pure_shear_relaxation", "pure_dilatation", "creep"] {
        let cfg = config(name);
        let CaseConfig::Membrane { program, .. } = &cfg.case else { panic!("{name} is not a membrane case") };
        let program = program.to_program(cfg.time.t_end).unwrap();
        let fe = run_with(&cfg, tight).unwrap();
        let point = run_point(name, &program, &cfg.material, cfg.time.dt, cfg.time.t_end).unwrap();
        let gap = sigma_gap(&fe.rows, &point.rows);
        assert!(gap <= 1e-10, "{name}: relative stress gap {gap:e}");
        for (p, q) in fe.rows.iter().zip(&point.rows) {
            assert!((p.j - q.j).abs() <= 1e-10 && (p.dissipation - q.dissipation).abs() <= 1e-10 * (1.0 + q.dissipation));
        }
    }
}

fn loop_gaps(rows: &[Row], steps_per_cycle: usize) -> Vec<f64> {
    let cycles = (rows.len() - 1) / steps_per_cycle;
    (0..cycles - 1)
        .map(|k| {
            (0..steps_per_cycle)
                .map(|j| (rows[k * steps_per_cycle + j].sigma[(1, 1)] - rows[(k + 1) * steps_per_cycle + j].sigma[(1, 1)]).abs())
                .fold(0.0, f64::max)
        })
        .collect()
}

#[test]
fn first_cycle_is_offset_and_later_cycles_coincide() {
    let cfg = config("cyclic_loading");
    let out = viscoshell::scenario::run::run(&cfg).unwrap();
    let peak = out.rows.iter().map(|r| r.sigma[(1, 1)].abs()).fold(0.0, f64::max);
    let gaps = loop_gaps(&out.rows, 1000);
    assert_eq!(gaps.len(), 9);
    assert!(gaps[0] > 1e-2 * peak, "first loop offset {:e}", gaps[0]);
    assert!(gaps[8] < 1e-3 * peak && gaps[8] < 1e-2 * gaps[0], "{gaps:?}");
}

#[test]
fn elastic_cycles_retrace_the_same_curve() {
    let mut cfg = config("cyclic_loading");
    cfg.material = Material::elastic(cfg.material.elastic.clone());
    cfg.time.t_end = 16.0;
    let out = viscoshell::scenario::run::run(&cfg).unwrap();
    // loading on [0, T/4] and unloading on [T/4, T/2] pass the same displacements
    for j in 0..=250 {
        let (up, down) = (&out.rows[j], &out.rows[500 - j]);
        assert!((up.drive - down.drive).abs() < 1e-12);
        assert!((up.sigma - down.sigma).abs().max() < 1e-12);
    }
    assert!(gaps_all_zero(&loop_gaps(&out.rows, 1000)));
    assert_eq!(out.summary.final_dissipation, 0.0);
}

fn gaps_all_zero(g: &[f64]) -> bool {
    g.iter().all(|&x| x < 1e-12)
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    for name in ["pure_shear_relaxation", "pure_bending"] {
        let mut cfg = config(name);
        cfg.time.t_end = cfg.time.t_end.min(0.5);
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let (_, pa) = run_case(&cfg, a.path()).unwrap();
        let (_, pb) = run_case(&cfg, b.path()).unwrap();
        assert_eq!(std::fs::read(&pa).unwrap(), std::fs::read(&pb).unwrap());
        let summary = |d: &std::path::Path| std::fs::read(d.join(format!("{name}_summary.toml"))).unwrap();
        assert_eq!(summary(a.path()), summary(b.path()));
    }
}

#[test]
fn every_bundled_config_validates_and_round_trips() {
    let mut n = 0;
    for entry in std::fs::read_dir(config_dir()).unwrap() {
        let path = entry.unwrap().path();
        let cfg = ScenarioConfig::load(&path).unwrap();
        cfg.validate().unwrap();
        let again = ScenarioConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(cfg, again, "{}", path.display());
        assert_eq!(path.file_stem().unwrap().to_str().unwrap(), cfg.name);
        n += 1;
    }
    assert!(n >= 13);
}

fn cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_viscoshell")).args(args).output().unwrap()
}

#[test]
fn negative_time_step_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config_dir().join("pure_shear_relaxation.toml");
    let out = cli(&["run", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap(), "--dt", "-0.1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("time.dt"));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);

    let bad = dir.path().join("bad.toml");
    let text = std::fs::read_to_string(&cfg).unwrap().replace("dt = 0.1", "dt = -0.1");
    std::fs::write(&bad, text).unwrap();
    let out = cli(&["run", "--config", bad.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("o").exists());
}

#[test]
fn cli_writes_series_and_reports_missing_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config_dir().join("pure_shear_relaxation.toml");
    let out = cli(&["run", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap(), "--tend", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("pure_shear_relaxation.csv")).unwrap();
    assert!(csv.starts_with("t,drive,"));
    assert_eq!(csv.lines().count(), 12);
    let out = cli(&["point", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap(), "--tend", "1"]);
    assert!(out.status.success());
    assert!(dir.path().join("pure_shear_relaxation_point.csv").exists());
    let out = cli(&["run", "--config", "/nonexistent/config.toml"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn convergence_study_without_oracle_is_rejected() {
    let cfg = config("creep");
    assert!(matches!(
        viscoshell::scenario::study::convergence_study(&cfg),
        Err(viscoshell::Error::UnsupportedStudy(_))
    ));
}
