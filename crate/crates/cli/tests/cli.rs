use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rdm_cli::{emit_plot_data, parse_config, run, HarnessError, Manifest, SeedSource};

fn rdm(args: &[&str], dir: &Path, env_seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rdm"));
    cmd.args(args).arg("--out").arg(dir).env_remove("SEED_OVERRIDE");
    if let Some(s) = env_seed {
        cmd.env("SEED_OVERRIDE", s);
    }
    cmd.output().unwrap()
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("run.toml");
    fs::write(&path, text).unwrap();
    path
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn without_wall_time(text: &str) -> String {
    text.lines().filter(|l| !l.starts_with("wall_time_s")).collect::<Vec<_>>().join("\n")
}

#[test]
fn bad_grid_size_reports_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "experiment = \"evolve\"\n[grid]\nn = 100\n");
    let out = rdm(&["evolve", "--config", cfg.to_str().unwrap()], &tmp.path().join("o"), None);
    assert_eq!(out.status.code(), Some(2));
    let err: toml::Table = toml::from_str(&stderr(&out)).unwrap();
    assert_eq!(err["error"]["kind"].as_str(), Some("validation"));
    assert_eq!(err["error"]["field"].as_str(), Some("grid.n"));
    assert!(!tmp.path().join("o").exists());
}

#[test]
fn typo_key_reports_line_and_column() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "experiment = \"fourbox\"\n\n[gird]\nn = 64\n");
    let out = rdm(&["fourbox", "--config", cfg.to_str().unwrap()], &tmp.path().join("o"), None);
    assert_eq!(out.status.code(), Some(2));
    let err: toml::Table = toml::from_str(&stderr(&out)).unwrap();
    assert_eq!(err["error"]["kind"].as_str(), Some("parse"));
    assert_eq!(err["error"]["line"].as_integer(), Some(3));
    assert!(err["error"]["message"].as_str().unwrap().contains("gird"));
}

#[test]
fn typo_inside_a_section_is_rejected() {
    let err = parse_config("experiment = \"sample\"\n[sample]\nmembers = 4\nmember = 2\n", None).unwrap_err();
    assert!(matches!(err, HarnessError::Parse { line: 4, .. }), "{err:?}");
}

#[test]
fn sample_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b, c) = (tmp.path().join("a"), tmp.path().join("b"), tmp.path().join("c"));
    for d in [&a, &b] {
        assert!(rdm(&["sample", "--seed", "99"], d, None).status.success());
    }
    assert!(rdm(&["sample", "--seed", "100"], &c, None).status.success());
    for f in ["trajectory.csv", "density.csv", "plot/trajectory_scatter.csv", "plot/density_overlay.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let ma = fs::read_to_string(a.join("manifest.toml")).unwrap();
    let mb = fs::read_to_string(b.join("manifest.toml")).unwrap();
    assert_eq!(without_wall_time(&ma), without_wall_time(&mb));
    assert_ne!(fs::read(a.join("trajectory.csv")).unwrap(), fs::read(c.join("trajectory.csv")).unwrap());
}

#[test]
fn seed_flag_beats_env_beats_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "seed = 5\n[sample]\ndraws_per_snapshot = 100\n");
    let cfg = cfg.to_str().unwrap();
    let seed_of = |dir: &Path| Manifest::load(dir).unwrap();
    let cases = [
        (vec!["sample", "--config", cfg], None, 5, SeedSource::Config),
        (vec!["sample", "--config", cfg], Some("6"), 6, SeedSource::Env),
        (vec!["sample", "--config", cfg, "--seed", "7"], Some("6"), 7, SeedSource::Flag),
    ];
    for (i, (args, env, seed, source)) in cases.into_iter().enumerate() {
        let dir = tmp.path().join(i.to_string());
        assert!(rdm(&args, &dir, env).status.success());
        let m = seed_of(&dir);
        assert_eq!((m.seed, m.seed_source, m.config.seed), (seed, source, seed));
    }
    let bad = rdm(&["sample", "--config", cfg], &tmp.path().join("bad"), Some("abc"));
    assert_eq!(bad.status.code(), Some(2));
    assert!(stderr(&bad).contains("SEED_OVERRIDE"));
}

#[test]
fn fourbox_manifest_records_completeness() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "experiment = \"fourbox\"\n[grid]\nn = 128\n[time]\nt_final = 0.4\n",
    );
    let dir = tmp.path().join("o");
    let out = rdm(&["fourbox", "--config", cfg.to_str().unwrap()], &dir, None);
    assert!(out.status.success(), "{}", stderr(&out));
    let m = Manifest::load(&dir).unwrap();
    let check = m.checks.iter().find(|c| c.name == "branch_completeness").unwrap();
    assert!(check.passed);
    assert!(m.passed && m.failures.is_empty());
    assert_eq!(m.config.grid.n, 128);
    let centers = fs::read_to_string(dir.join("plot/box_centers.csv")).unwrap();
    let header = centers.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "t,center_A1,center_A2,center_B1,center_B2");
    assert_eq!(centers.lines().filter(|l| !l.starts_with('#')).count(), 1 + 11);
}

#[test]
fn convergence_ratio_column_sits_in_band() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("o");
    assert!(rdm(&["convergence"], &dir, None).status.success());
    let text = fs::read_to_string(dir.join("convergence.csv")).unwrap();
    let mut rows = text.lines();
    assert_eq!(rows.next(), Some("rung,n,dx,spacing,residual,ratio"));
    let ratios: Vec<f64> = rows.filter_map(|l| l.rsplit(',').next().unwrap().parse().ok()).collect();
    assert_eq!(ratios.len(), 2);
    for r in ratios {
        assert!((3.5..=4.5).contains(&r), "{r}");
    }
}

#[test]
fn failed_check_exits_nonzero_with_failure_list() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "[reconstruct]\ntolerance = 1e-300\n");
    let dir = tmp.path().join("o");
    let out = rdm(&["reconstruct", "--config", cfg.to_str().unwrap()], &dir, None);
    assert_eq!(out.status.code(), Some(1));
    let report: toml::Table = toml::from_str(&stderr(&out)).unwrap();
    let failures: Vec<&str> = report["failures"].as_array().unwrap().iter().filter_map(|v| v.as_str()).collect();
    assert_eq!(failures, ["component_phase"]);
    let m = Manifest::load(&dir).unwrap();
    assert!(!m.passed);
    assert_eq!(m.failures, ["component_phase"]);
}

#[test]
fn plot_tables_project_the_run_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("o");
    let mut config = rdm_cli::default_config(rdm_cli::Experiment::Sample);
    config.sample.as_mut().unwrap().draws_per_snapshot = 50;
    run(&config, SeedSource::Config, &dir).unwrap();
    let written = emit_plot_data(&dir).unwrap();
    assert_eq!(written.len(), 2);

    let scatter = fs::read_to_string(dir.join("plot/trajectory_scatter.csv")).unwrap();
    let body: Vec<&str> = scatter.lines().skip_while(|l| l.starts_with('#')).collect();
    assert_eq!(body[0], "t,x");
    let source = fs::read_to_string(dir.join("trajectory.csv")).unwrap();
    for (plot, src) in body[1..].iter().zip(source.lines().skip(1)) {
        let f: Vec<&str> = src.split(',').collect();
        assert_eq!(*plot, format!("{},{}", f[1], f[3]));
    }
    assert_eq!(body.len(), source.lines().count());

    let overlay = fs::read_to_string(dir.join("plot/density_overlay.csv")).unwrap();
    assert!(overlay.lines().any(|l| l == "t,x,rho_hat,psi2,stderr"));
}

#[test]
fn plotting_without_artifacts_fails() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(matches!(emit_plot_data(tmp.path()), Err(HarnessError::MissingArtifact(_))));

    let dir = tmp.path().join("o");
    let config = rdm_cli::default_config(rdm_cli::Experiment::Convergence);
    run(&config, SeedSource::Config, &dir).unwrap();
    fs::remove_file(dir.join("convergence.csv")).unwrap();
    match emit_plot_data(&dir) {
        Err(HarnessError::MissingArtifact(p)) => assert!(p.ends_with("convergence.csv")),
        other => panic!("{other:?}"),
    }
    let out = Command::new(env!("CARGO_BIN_EXE_rdm")).args(["plot"]).arg(&dir).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("missing_artifact"));
}

#[test]
fn every_experiment_passes_its_own_checks_with_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    for e in ["evolve", "sample", "reconstruct", "contrast", "convergence"] {
        let dir = tmp.path().join(e);
        let out = rdm(&[e], &dir, None);
        assert!(out.status.success(), "{e}: {}", stderr(&out));
        let m = Manifest::load(&dir).unwrap();
        assert!(!m.checks.is_empty() && m.passed, "{e}");
        for a in &m.artifacts {
            assert!(dir.join(a).is_file(), "{e}: {a}");
        }
    }
}
