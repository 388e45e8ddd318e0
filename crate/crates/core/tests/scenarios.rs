use std::f64::consts::FRAC_PI_2;
use std::process::Command;

use decoherence_lab::experiments::{compute_scenario, run_scenario, Scenario, ScenarioConfig};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_decoherence-lab"))
}

#[test]
fn dfs_singlet_fidelity_is_constant_in_z() {
    let c = ScenarioConfig::new(Scenario::DfsDemo);
    let rec = compute_scenario(&c).unwrap();
    for f in rec.column("singlet_fidelity").unwrap() {
        assert!((f - 1.0).abs() < 1e-12, "{f}");
    }
}

#[test]
fn dfs_triplet_fidelity_averages_to_half_in_x() {
    let mut c = ScenarioConfig::new(Scenario::DfsDemo);
    c.basis_theta = FRAC_PI_2;
    c.n_env = 20;
    c.t_max = 50.0;
    c.steps = 5000;
    let rec = compute_scenario(&c).unwrap();
    let t = rec.column("t").unwrap();
    let f = rec.column("triplet_fidelity").unwrap();
    let late: Vec<f64> = t.iter().zip(&f).filter(|(t, _)| **t >= 5.0).map(|(_, f)| *f).collect();
    let mean = late.iter().sum::<f64>() / late.len() as f64;
    assert!((mean - 0.5).abs() <= 0.02, "{mean}");
    for s in rec.column("singlet_fidelity").unwrap() {
        assert!((s - 1.0).abs() < 1e-10);
    }
}

#[test]
fn coherence_at_hundred_spins() {
    let mut c = ScenarioConfig::new(Scenario::CoherenceVsN);
    c.n_env = 100;
    let rec = compute_scenario(&c).unwrap();
    let v = *rec.column("coherence").unwrap().last().unwrap();
    assert!((1e-18..=1e-13).contains(&v), "{v}");
    assert_eq!(rec.column("n").unwrap().last().copied(), Some(100.0));
}

#[test]
fn finite_vs_infinite_columns() {
    let mut c = ScenarioConfig::new(Scenario::FiniteVsInfinite);
    c.t_max = 1.0;
    c.steps = 4;
    let rec = compute_scenario(&c).unwrap();
    assert_eq!(rec.header, ["t", "finite", "infinite"]);
    assert_eq!(rec.column("infinite").unwrap()[4], (-0.8f64).exp());
}

#[test]
fn dm_topography_two_qubit_central_element() {
    let mut c = ScenarioConfig::new(Scenario::DmTopography2q);
    c.steps = 40;
    let rec = compute_scenario(&c).unwrap();
    assert_eq!(rec.header.len(), 1 + 32);
    for v in rec.column("re_01_10").unwrap() {
        assert!((v - 0.25).abs() < 1e-12);
    }
}

#[test]
fn output_file_matches_record() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = ScenarioConfig::new(Scenario::SurfaceNT);
    c.n_env = 4;
    c.steps = 10;
    c.out_path = dir.path().join("surface.csv");
    let rec = run_scenario(&c).unwrap();
    assert_eq!(std::fs::read_to_string(&c.out_path).unwrap(), rec.to_csv());
}

#[test]
fn cli_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "scenario = \"ensemble_average\"\nn_env = 30\nruns = 5\nsteps = 100\nseed = 9\n").unwrap();
    let mut outputs = Vec::new();
    for (k, threads) in ["1", "4"].iter().enumerate() {
        let out = dir.path().join(format!("o{k}.csv"));
        let status = bin()
            .env("RAYON_NUM_THREADS", threads)
            .args(["run", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let text = String::from_utf8(outputs[0].clone()).unwrap();
    assert!(text.starts_with("# decoherence-lab v1, scenario=ensemble_average, seed=9, observable=magnitude\n"));
}

#[test]
fn cli_flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "scenario = \"coherence_vs_t\"\nsteps = 3\nobservable = \"magnitude\"\n").unwrap();
    let out = dir.path().join("o.csv");
    let status = bin()
        .args(["coherence_vs_t", "--observable", "real_part", "--steps", "5", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.lines().next().unwrap().ends_with("observable=real_part"));
    assert_eq!(text.lines().count(), 2 + 6);
}

#[test]
fn cli_errors_are_one_line() {
    let out = bin().args(["run", "--scenario", "coherence_vs_t", "--steps", "0"]).output().unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("error: kind=config msg="));

    let out = bin().args(["bell_table", "--nonsense"]).output().unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("error: kind=usage"));

    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["bell_table", "--out"])
        .arg(dir.path().join("missing").join("x.csv"))
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8(out.stderr).unwrap().starts_with("error: kind=io"));
}

#[test]
fn cli_version_reports_schema() {
    let out = bin().arg("--version").output().unwrap();
    assert!(out.status.success());
    let v = String::from_utf8(out.stdout).unwrap();
    assert_eq!(v.trim(), format!("decoherence-lab schema v{}", decoherence_lab::experiments::SCHEMA_VERSION));
}
