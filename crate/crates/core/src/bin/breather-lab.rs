use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use breather_lab::config::{load_config, ExperimentConfig, ModelKind, OutputKind};
use breather_lab::creutz::equivalence_check;
use breather_lab::experiment::{default_workers, evolve_model, critical_gamma, run_experiment, RunRecord};
use breather_lab::hermitian::plateau_metric;
use breather_lab::lattice::StateVector;
use breather_lab::output;
use breather_lab::{figures, phase_heatmap, Error, Result};

#[derive(Parser)]
#[command(name = "breather-lab", version, about = "Topological end breathers in a nonlinear nonreciprocal SSH chain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single time evolution with the outputs listed in the config.
    Evolve(Common),
    /// Parameter sweep along the config's `sweep` axis.
    Sweep(Common),
    /// Eigenvalues of the linear chain with gamma_1 = gammas, others gamma0.
    Spectrum(Common),
    /// Closed-form end-defect quantities.
    Defect(Common),
    /// Chain vs Creutz-ladder intensity deviation.
    CreutzCheck(Common),
    /// Plateau metric and phase maps of the reciprocal and nonreciprocal chains.
    HermitianCompare(Common),
    /// The full reference figure set.
    Figures(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    tfinal: Option<f64>,
}

impl Common {
    fn workers(&self) -> usize {
        self.workers.filter(|&k| k > 0).unwrap_or_else(default_workers)
    }

    fn apply_overrides(&self, mut c: ExperimentConfig) -> Result<ExperimentConfig> {
        if let Some(dt) = self.dt {
            c.dt = dt;
        }
        if let Some(t) = self.tfinal {
            c.t_final = t;
            if c.window.1 > t {
                let span = c.window.1 - c.window.0;
                c.window = ((t - span).max(0.0), t);
            }
        }
        c.validate()?;
        Ok(c)
    }

    fn load(&self) -> Result<ExperimentConfig> {
        let path = self
            .config
            .as_deref()
            .ok_or_else(|| Error::Config {
                path: "--config".into(),
                message: "this subcommand needs a config file".into(),
            })?;
        self.apply_overrides(load_config(path)?)
    }
}

fn print_record(record: &RunRecord) {
    println!("{}", serde_json::to_string_pretty(record).expect("record serializes"));
}

fn finish(record: &RunRecord) -> Result<bool> {
    print_record(record);
    Ok(!record.blow_up)
}

fn cmd_run(common: &Common, want_sweep: bool, force: Option<OutputKind>) -> Result<bool> {
    let mut c = common.load()?;
    if want_sweep && c.sweep.is_none() {
        return Err(Error::Config {
            path: "sweep".into(),
            message: "the sweep subcommand needs a `sweep` axis".into(),
        });
    }
    if !want_sweep {
        c.sweep = None;
    }
    if let Some(kind) = force {
        c.outputs = vec![kind];
    }
    finish(&run_experiment(&c, &common.out, common.workers())?)
}

fn cmd_creutz(common: &Common) -> Result<bool> {
    let c = common.load()?;
    let s0 = StateVector::single_site(c.params.n_cells, c.i_in)?;
    let deviation = equivalence_check(&c.params, &s0, c.t_final, c.dt)?;
    std::fs::create_dir_all(&common.out)?;
    let path = common.out.join(format!("{}-creutz.csv", c.name));
    output::write_table_file(
        &path,
        &["t_final".into(), "dt".into(), "max_relative_deviation".into()],
        &[vec![output::fmt_f64(c.t_final), output::fmt_f64(c.dt), output::fmt_f64(deviation)]],
    )?;
    println!(
        "{}",
        json!({ "max_relative_deviation": deviation, "output": path })
    );
    Ok(true)
}

fn compare_one(c: &ExperimentConfig, model: ModelKind, out: &Path) -> Result<(f64, Option<String>)> {
    let run = evolve_model(model, &c.params, c.i_in, c.t_final, c.dt, c.effective_stride())?;
    let traj = &run.trajectory;
    let tag = match model {
        ModelKind::Hermitian => "hermitian",
        _ => "nonreciprocal",
    };
    let map = phase_heatmap(traj, &c.params, critical_gamma(model, &c.params));
    let (h, rows) = output::heatmap_table(&map);
    output::write_table_file(&out.join(format!("{}-{tag}-heatmap.csv", c.name)), &h, &rows)?;
    let metric = plateau_metric(traj, traj.t_end())?;
    Ok((metric, run.blow_up.map(|e| e.to_string())))
}

fn cmd_hermitian(common: &Common) -> Result<bool> {
    let c = common.load()?;
    std::fs::create_dir_all(&common.out)?;
    let (herm, herm_err) = compare_one(&c, ModelKind::Hermitian, &common.out)?;
    let (nonrec, nonrec_err) = compare_one(&c, ModelKind::Nonreciprocal, &common.out)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&json!({
            "plateau_metric_hermitian": herm,
            "plateau_metric_nonreciprocal": nonrec,
            "blow_up_hermitian": herm_err,
            "blow_up_nonreciprocal": nonrec_err,
        }))
        .expect("json")
    );
    Ok(herm_err.is_none() && nonrec_err.is_none())
}

fn cmd_figures(common: &Common) -> Result<bool> {
    let configs = match &common.config {
        Some(path) => vec![load_config(path)?],
        None => figures::suite(),
    };
    let mut ok = true;
    for c in configs {
        let c = common.apply_overrides(c)?;
        eprintln!("running {}", c.name);
        let record = run_experiment(&c, &common.out, common.workers())?;
        ok &= !record.blow_up;
        print_record(&record);
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Evolve(c) => cmd_run(c, false, None),
        Command::Sweep(c) => cmd_run(c, true, None),
        Command::Spectrum(c) => cmd_run(c, false, Some(OutputKind::Spectrum)),
        Command::Defect(c) => cmd_run(c, false, Some(OutputKind::Defect)),
        Command::CreutzCheck(c) => cmd_creutz(c),
        Command::HermitianCompare(c) => cmd_hermitian(c),
        Command::Figures(c) => cmd_figures(c),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: integration blew up; partial outputs were written");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}
