//! Scenario runners and the CSV artifact they produce.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::Path;
use std::time::{Duration, Instant};

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::bath;
use crate::closed_form::{self, EnvSpin, EnvironmentSpec, Observable, TwoQubitEnvSpec};
use crate::coupling;
use crate::error::{LabError, Result};
use crate::experiments::config::{Scenario, ScenarioConfig};
use crate::experiments::rng::{self, LabRng};
use crate::spin::{self, BasisAngle, DensityMatrix, QubitState, TwoQubitState};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    fn write_to(&self, out: &mut String) {
        match self {
            Cell::Int(v) => write!(out, "{v}"),
            Cell::Float(v) => write!(out, "{v:.16e}"),
            Cell::Text(s) => write!(out, "{s}"),
        }
        .expect("writing to a String");
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(v) => Some(*v as f64),
            Cell::Float(v) => Some(*v),
            Cell::Text(_) => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub config: ScenarioConfig,
    pub run_seeds: Vec<u64>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub wall_time: Duration,
}

impl RunRecord {
    pub fn to_csv(&self) -> String {
        let c = &self.config;
        let mut out = format!(
            "# decoherence-lab v{SCHEMA_VERSION}, scenario={}, seed={}, observable={}\n",
            c.scenario.name(),
            c.seed,
            c.observable.name()
        );
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            for (k, cell) in row.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                cell.write_to(&mut out);
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())
            .map_err(|e| LabError::Io(format!("cannot write {}: {e}", path.display())))
    }

    /// Values of a named numeric column.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.header.iter().position(|h| h == name)?;
        self.rows.iter().map(|r| r.get(k).and_then(Cell::as_f64)).collect()
    }
}

/// Computes the scenario and writes its CSV to `config.out_path`.
pub fn run_scenario(config: &ScenarioConfig) -> Result<RunRecord> {
    let record = compute_scenario(config)?;
    record.write_csv(&config.out_path)?;
    Ok(record)
}

/// Computes the scenario without touching the filesystem.
pub fn compute_scenario(config: &ScenarioConfig) -> Result<RunRecord> {
    config.validate()?;
    let start = Instant::now();
    let (header, rows, run_seeds) = match config.scenario {
        Scenario::CoherenceVsN => coherence_vs_n(config)?,
        Scenario::CoherenceVsT => coherence_vs_t(config)?,
        Scenario::SurfaceNT => surface_n_t(config)?,
        Scenario::FiniteVsInfinite => finite_vs_infinite(config)?,
        Scenario::EnsembleAverage => ensemble_average(config)?,
        Scenario::DmTopography1q => dm_topography_1q(config)?,
        Scenario::DmTopography2q => dm_topography_2q(config)?,
        Scenario::BellTable => bell_table(config)?,
        Scenario::DfsDemo => dfs_demo(config)?,
        Scenario::ReduceDemo => reduce_demo(config)?,
    };
    Ok(RunRecord {
        config: config.clone(),
        run_seeds,
        header,
        rows,
        wall_time: start.elapsed(),
    })
}

type Table = (Vec<String>, Vec<Vec<Cell>>, Vec<u64>);

fn names(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|s| s.to_string()).collect()
}

fn environment(config: &ScenarioConfig, run: u64) -> Result<EnvironmentSpec> {
    let mut rng = LabRng::for_run(config.seed, run);
    rng::sample_environment_with(&mut rng, config.n_env, config.sampling, config.lam, config.coupling_norm)
}

fn observed_series(env: &EnvironmentSpec, times: &[f64], obs: Observable) -> Result<Vec<f64>> {
    Ok(closed_form::coherence_series(env, times)?.observed(obs))
}

fn coherence_vs_n(config: &ScenarioConfig) -> Result<Table> {
    let env = environment(config, 0)?;
    let rows = (0..=config.n_env)
        .into_par_iter()
        .map(|n| {
            let r = closed_form::coherence_factor(&env.prefix(n), 1.0)?;
            Ok(vec![
                n.into(),
                config.observable.apply(r).into(),
                closed_form::average_coherence_estimate(n).into(),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((names(&["n", "coherence", "estimate"]), rows, vec![config.seed]))
}

fn coherence_vs_t(config: &ScenarioConfig) -> Result<Table> {
    let env = environment(config, 0)?;
    let times = config.time_grid();
    let values = observed_series(&env, &times, config.observable)?;
    let rows = times.iter().zip(values).map(|(&t, v)| vec![t.into(), v.into()]).collect();
    Ok((names(&["t", "coherence"]), rows, vec![config.seed]))
}

fn surface_n_t(config: &ScenarioConfig) -> Result<Table> {
    let env = environment(config, 0)?;
    let times = config.time_grid();
    let blocks = (0..=config.n_env)
        .into_par_iter()
        .map(|n| {
            let values = observed_series(&env.prefix(n), &times, config.observable)?;
            Ok(times
                .iter()
                .zip(values)
                .map(|(&t, v)| vec![n.into(), t.into(), v.into()])
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((names(&["n", "t", "coherence"]), blocks.concat(), vec![config.seed]))
}

fn finite_vs_infinite(config: &ScenarioConfig) -> Result<Table> {
    let env = environment(config, 0)?;
    let times = config.time_grid();
    let values = observed_series(&env, &times, config.observable)?;
    let rows = times
        .iter()
        .zip(values)
        .map(|(&t, v)| Ok(vec![t.into(), v.into(), bath::analytic_coherence(t, config.lam)?.into()]))
        .collect::<Result<Vec<_>>>()?;
    Ok((names(&["t", "finite", "infinite"]), rows, vec![config.seed]))
}

fn ensemble_average(config: &ScenarioConfig) -> Result<Table> {
    let times = config.time_grid();
    let envs = (0..config.runs as u64).map(|r| environment(config, r)).collect::<Result<Vec<_>>>()?;
    let series = envs
        .par_iter()
        .map(|env| observed_series(env, &times, config.observable))
        .collect::<Result<Vec<_>>>()?;
    let mut header = vec!["t".to_string()];
    header.extend((0..config.runs).map(|r| format!("run_{r}")));
    header.push("mean".into());
    header.push("infinite".into());
    let mut rows = Vec::with_capacity(times.len());
    for (k, &t) in times.iter().enumerate() {
        let mut row: Vec<Cell> = vec![t.into()];
        let mut sum = 0.0;
        for s in &series {
            sum += s[k];
            row.push(s[k].into());
        }
        row.push((sum / config.runs as f64).into());
        row.push(bath::analytic_coherence(t, config.lam)?.into());
        rows.push(row);
    }
    let seeds = (0..config.runs as u64).map(|r| config.seed.wrapping_add(r)).collect();
    Ok((header, rows, seeds))
}

fn density_header(dim: usize) -> Vec<String> {
    let bits = if dim == 2 { 1 } else { 2 };
    let label = |k: usize| format!("{k:0bits$b}");
    let mut h = vec!["t".to_string()];
    for i in 0..dim {
        for j in 0..dim {
            h.push(format!("re_{}_{}", label(i), label(j)));
            h.push(format!("im_{}_{}", label(i), label(j)));
        }
    }
    h
}

fn density_row(t: f64, rho: &DensityMatrix) -> Vec<Cell> {
    let mut row: Vec<Cell> = vec![t.into()];
    for i in 0..rho.dim() {
        for j in 0..rho.dim() {
            let z = rho.get(i, j);
            row.push(z.re.into());
            row.push(z.im.into());
        }
    }
    row
}

/// Random couplings with every environment spin in |0⟩.
fn z_eigenstate_environment(config: &ScenarioConfig) -> Vec<EnvSpin> {
    let mut rng = LabRng::new(config.seed);
    rng::sample_couplings(&mut rng, config.n_env, config.lam, QubitState::zero())
}

fn dm_topography_1q(config: &ScenarioConfig) -> Result<Table> {
    let env = EnvironmentSpec::z_basis(z_eigenstate_environment(config));
    let sys = QubitState::plus();
    let rows = config
        .time_grid()
        .par_iter()
        .map(|&t| Ok(density_row(t, &closed_form::single_qubit_rdm(&sys, &env, t)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok((density_header(2), rows, vec![config.seed]))
}

fn dm_topography_2q(config: &ScenarioConfig) -> Result<Table> {
    let env = TwoQubitEnvSpec::collective(z_eigenstate_environment(config), BasisAngle::Z);
    let sys = TwoQubitState::uniform();
    let rows = config
        .time_grid()
        .par_iter()
        .map(|&t| Ok(density_row(t, &closed_form::two_qubit_rdm(&sys, &env, t)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok((density_header(4), rows, vec![config.seed]))
}

fn bell_table(config: &ScenarioConfig) -> Result<Table> {
    let states = [
        ("beta_00", TwoQubitState::bell_00()),
        ("beta_01", TwoQubitState::bell_01()),
        ("beta_10", TwoQubitState::bell_10()),
        ("beta_11", TwoQubitState::bell_11()),
    ];
    let mut rows = Vec::with_capacity(4 * (config.steps + 1));
    for k in 0..=config.steps {
        let theta = k as f64 * TAU / config.steps as f64;
        for (name, s) in &states {
            let a = spin::rotate_two_qubit(s, BasisAngle(theta)).amps();
            let mut row: Vec<Cell> = vec![theta.into(), (*name).into()];
            row.extend(a.iter().map(|z| Cell::from(z.re)));
            rows.push(row);
        }
    }
    Ok((names(&["theta", "state", "c00", "c01", "c10", "c11"]), rows, vec![]))
}

fn central(rho: &DensityMatrix, initial: C64) -> C64 {
    rho.get(1, 2) / initial
}

fn dfs_demo(config: &ScenarioConfig) -> Result<Table> {
    let base = environment(config, 0)?;
    let env = TwoQubitEnvSpec::collective(base.spins().to_vec(), BasisAngle(config.basis_theta));
    let singlet = TwoQubitState::singlet();
    let triplet = TwoQubitState::triplet();
    let s0 = singlet.amps()[1] * singlet.amps()[2].conj();
    let t0 = triplet.amps()[1] * triplet.amps()[2].conj();
    let obs = config.observable;
    let rows = config
        .time_grid()
        .par_iter()
        .map(|&t| {
            let rs = closed_form::two_qubit_rdm_any_basis(&singlet, &env, t)?;
            let rt = closed_form::two_qubit_rdm_any_basis(&triplet, &env, t)?;
            Ok(vec![
                t.into(),
                spin::fidelity(&singlet, &rs)?.into(),
                spin::fidelity(&triplet, &rt)?.into(),
                obs.apply(central(&rs, s0)).into(),
                obs.apply(central(&rt, t0)).into(),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((
        names(&["t", "singlet_fidelity", "triplet_fidelity", "singlet_central", "triplet_central"]),
        rows,
        vec![config.seed],
    ))
}

fn reduce_demo(config: &ScenarioConfig) -> Result<Table> {
    let mut rng = LabRng::new(config.seed);
    let h = rng::sample_coupling_matrix(&mut rng, config.n_env + 1, config.lam);
    let reduced = coupling::many_to_one_reduce(&h)?;
    let arrow = reduced.arrowhead();
    let (_, spec_orig) = coupling::diagonalize_hermitian(&h)?;
    let (_, spec_arrow) = coupling::diagonalize_hermitian(&arrow)?;

    let mut rows = Vec::new();
    for (kind, m) in [("original", &h), ("arrowhead", &arrow)] {
        for i in 0..m.n() {
            for j in 0..m.n() {
                let z = m.get(i, j);
                rows.push(vec![kind.into(), i.into(), j.into(), z.re.into(), z.im.into()]);
            }
        }
    }
    for (kind, spec) in [("spectrum_original", &spec_orig), ("spectrum_arrowhead", &spec_arrow)] {
        for (k, &e) in spec.iter().enumerate() {
            rows.push(vec![kind.into(), k.into(), k.into(), e.into(), 0.0.into()]);
        }
    }
    Ok((names(&["kind", "i", "j", "re", "im"]), rows, vec![config.seed]))
}
