use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use decoherence_lab::experiments::{run_scenario, ConfigOverrides, Scenario};
use decoherence_lab::LabError;

#[derive(Parser)]
#[command(name = "decoherence-lab", version = "schema v1", about = "Spin-bath decoherence scenarios as CSV")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
#[command(rename_all = "snake_case")]
enum Command {
    /// Run the scenario named in the config file or by --scenario.
    Run(RunArgs),
    /// Coherence at t = 1 against environment size.
    CoherenceVsN(CommonArgs),
    /// Coherence over time for a fixed environment.
    CoherenceVsT(CommonArgs),
    /// Coherence over the (n, t) grid.
    #[command(name = "surface_n_t")]
    SurfaceNT(CommonArgs),
    /// Finite environment next to the Gaussian-bath limit.
    FiniteVsInfinite(CommonArgs),
    /// Mean over `runs` seeded environments.
    EnsembleAverage(CommonArgs),
    /// All single-qubit density matrix entries over time.
    #[command(name = "dm_topography_1q")]
    DmTopography1q(CommonArgs),
    /// All two-qubit density matrix entries over time.
    #[command(name = "dm_topography_2q")]
    DmTopography2q(CommonArgs),
    /// Bell-state coefficients in a rotated basis.
    BellTable(CommonArgs),
    /// Singlet and triplet fidelity under a collective environment.
    DfsDemo(CommonArgs),
    /// Arrowhead reduction of a random coupling matrix.
    ReduceDemo(CommonArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    scenario: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Default)]
struct CommonArgs {
    /// Flat key = value config file
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n_env: Option<usize>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "lambda")]
    lam: Option<f64>,
    #[arg(long)]
    runs: Option<usize>,
    /// complex_square | real_unit | balanced
    #[arg(long)]
    sampling: Option<String>,
    /// magnitude | real_part
    #[arg(long)]
    observable: Option<String>,
    #[arg(long = "theta", allow_negative_numbers = true)]
    basis_theta: Option<f64>,
    #[arg(long = "out")]
    out_path: Option<PathBuf>,
    /// per_spin | aggregate
    #[arg(long)]
    coupling_norm: Option<String>,
}

impl CommonArgs {
    fn overrides(self, scenario: Option<String>) -> (Option<PathBuf>, ConfigOverrides) {
        (
            self.config,
            ConfigOverrides {
                scenario,
                n_env: self.n_env,
                t_max: self.t_max,
                steps: self.steps,
                seed: self.seed,
                lam: self.lam,
                runs: self.runs,
                sampling: self.sampling,
                observable: self.observable,
                basis_theta: self.basis_theta,
                coupling_norm: self.coupling_norm,
                out_path: self.out_path,
            },
        )
    }
}

fn split(command: Command) -> (Option<Scenario>, CommonArgs, Option<String>) {
    use Command::*;
    match command {
        Run(a) => (None, a.common, a.scenario),
        CoherenceVsN(a) => (Some(Scenario::CoherenceVsN), a, None),
        CoherenceVsT(a) => (Some(Scenario::CoherenceVsT), a, None),
        SurfaceNT(a) => (Some(Scenario::SurfaceNT), a, None),
        FiniteVsInfinite(a) => (Some(Scenario::FiniteVsInfinite), a, None),
        EnsembleAverage(a) => (Some(Scenario::EnsembleAverage), a, None),
        DmTopography1q(a) => (Some(Scenario::DmTopography1q), a, None),
        DmTopography2q(a) => (Some(Scenario::DmTopography2q), a, None),
        BellTable(a) => (Some(Scenario::BellTable), a, None),
        DfsDemo(a) => (Some(Scenario::DfsDemo), a, None),
        ReduceDemo(a) => (Some(Scenario::ReduceDemo), a, None),
    }
}

fn execute(cli: Cli) -> Result<(), LabError> {
    let (fixed, common, named) = split(cli.command);
    let (file, flags) = common.overrides(named.or(fixed.map(|s| s.name().to_string())));
    let base = match file {
        Some(p) => ConfigOverrides::from_file(&p)?,
        None => ConfigOverrides::default(),
    };
    if let (Some(s), Some(f)) = (fixed, base.scenario.as_deref()) {
        if f.replace('-', "_") != s.name() {
            return Err(LabError::Config(format!(
                "config file names scenario '{f}' but the subcommand is '{}'",
                s.name()
            )));
        }
    }
    let config = base.merged(flags).resolve()?;
    let record = run_scenario(&config)?;
    eprintln!(
        "wrote {} ({} rows, {:.3}s)",
        config.out_path.display(),
        record.rows.len(),
        record.wall_time.as_secs_f64()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => e.exit(),
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("error: kind=usage msg={first}");
            return ExitCode::from(2);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: kind={} msg={}", e.kind(), e.to_string().replace('\n', " "));
            ExitCode::FAILURE
        }
    }
}
