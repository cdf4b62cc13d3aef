//! Orchestration of single runs and sweeps, and their on-disk artifacts.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::{ExperimentConfig, ModelKind, OutputKind, Spacing, SweepAxis};
use crate::creutz::{to_creutz, CreutzModel};
use crate::evolve::{
    averaged_observables, extract_period, integrate_model_partial, phase_heatmap,
    AveragedObservables, PartialRun, PhaseMap, Trajectory,
};
use crate::hermitian::{hermitian_gamma_c, ReciprocalModel};
use crate::lattice::{GammaProfile, LatticeParams, NonreciprocalModel, StateVector};
use crate::output::{self, fmt_f64, fmt_opt};
use crate::spectral::{
    analytic_defect, build_linear_model, eigensolve, linear_period, DefectSolution, SpectralResult,
};
use crate::svg::{self, Axes, Scale, Series};
use crate::{Error, Result};

/// Worker count from the environment or the machine.
pub fn default_workers() -> usize {
    std::env::var("BREATHER_LAB_WORKERS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&k| k > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Single-site excitation `sqrt(i_in)` on the first site, in the layout of
/// the chosen model.
pub fn initial_state(model: ModelKind, n_cells: usize, i_in: f64) -> Result<StateVector> {
    let s = StateVector::single_site(n_cells, i_in)?;
    match model {
        ModelKind::Creutz => StateVector::new(to_creutz(&s).interleaved()),
        _ => Ok(s),
    }
}

/// The critical value for the phase map of each model.
pub fn critical_gamma(model: ModelKind, params: &LatticeParams) -> f64 {
    match model {
        ModelKind::Hermitian => hermitian_gamma_c(params),
        _ => params.gamma_c(),
    }
}

pub fn evolve_model(
    model: ModelKind,
    params: &LatticeParams,
    i_in: f64,
    t_final: f64,
    dt: f64,
    stride: usize,
) -> Result<PartialRun> {
    params.validate()?;
    let s0 = initial_state(model, params.n_cells, i_in)?;
    match model {
        ModelKind::Nonreciprocal => {
            integrate_model_partial(NonreciprocalModel(*params), &s0, t_final, dt, stride)
        }
        ModelKind::Hermitian => {
            integrate_model_partial(ReciprocalModel(*params), &s0, t_final, dt, stride)
        }
        ModelKind::Creutz => integrate_model_partial(CreutzModel(*params), &s0, t_final, dt, stride),
    }
}

/// Static profile `gamma_1 = gamma_s`, `gamma_2 = gamma_2`, rest `gamma_0`.
pub fn two_cell_profile(params: &LatticeParams, gamma_2: f64) -> Result<GammaProfile> {
    let mut g = vec![params.gamma0; params.n_cells];
    g[0] = params.gammas;
    if params.n_cells > 1 {
        g[1] = gamma_2;
    }
    GammaProfile::new(g, params.kappa)
}

#[derive(Clone, Debug)]
pub struct SingleResult {
    pub trajectory: Option<Trajectory>,
    pub averages: Option<AveragedObservables>,
    /// Outer `None`: not requested or not computable.
    pub period: Option<Option<f64>>,
    pub heatmap: Option<PhaseMap>,
    pub spectrum: Option<SpectralResult>,
    pub defect: Option<DefectSolution>,
    pub max_total_intensity: f64,
    pub blow_up: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub i_in: f64,
    pub edge_fraction: Option<f64>,
    pub total_fraction: Option<f64>,
    pub gamma_bar_1: Option<f64>,
    pub gamma_bar_2: Option<f64>,
    pub period: Option<f64>,
    pub linear_period: Option<f64>,
    pub max_total_intensity: f64,
    pub blow_up: bool,
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub rows: Vec<SweepRow>,
}

#[derive(Clone, Debug)]
pub enum ExperimentResult {
    Single(Box<SingleResult>),
    Sweep(SweepResult),
}

impl ExperimentResult {
    pub fn blew_up(&self) -> bool {
        match self {
            ExperimentResult::Single(s) => s.blow_up.is_some(),
            ExperimentResult::Sweep(s) => s.rows.iter().any(|r| r.blow_up),
        }
    }

    pub fn max_total_intensity(&self) -> f64 {
        match self {
            ExperimentResult::Single(s) => s.max_total_intensity,
            ExperimentResult::Sweep(s) => s
                .rows
                .iter()
                .map(|r| r.max_total_intensity)
                .fold(0.0, f64::max),
        }
    }
}

fn check_linear_outputs(config: &ExperimentConfig) -> Result<()> {
    let linear = config.wants(OutputKind::Spectrum) || config.wants(OutputKind::Defect);
    if linear && config.model == ModelKind::Hermitian {
        return Err(Error::config(
            "outputs",
            "spectrum and defect outputs are defined for the nonreciprocal chain",
        ));
    }
    Ok(())
}

fn run_single(config: &ExperimentConfig) -> Result<SingleResult> {
    check_linear_outputs(config)?;
    let p = config.params;
    let mut result = SingleResult {
        trajectory: None,
        averages: None,
        period: None,
        heatmap: None,
        spectrum: None,
        defect: None,
        max_total_intensity: 0.0,
        blow_up: None,
    };

    if config.outputs.iter().any(|o| o.needs_trajectory()) {
        let run = evolve_model(
            config.model,
            &p,
            config.i_in,
            config.t_final,
            config.dt,
            config.effective_stride(),
        )?;
        let traj = run.trajectory;
        result.max_total_intensity = traj.max_total_intensity();
        result.blow_up = run.blow_up.map(|e| e.to_string());
        let complete = result.blow_up.is_none();
        let (w0, w1) = config.window;
        if config.wants(OutputKind::Averages) && complete {
            result.averages = Some(averaged_observables(&traj, &p, w0, w1)?);
        }
        if config.wants(OutputKind::Period) && complete {
            result.period = Some(extract_period(&traj, 0, w0)?);
        }
        if config.wants(OutputKind::Heatmap) {
            result.heatmap = Some(phase_heatmap(&traj, &p, critical_gamma(config.model, &p)));
        }
        if config.wants(OutputKind::Trajectory) {
            result.trajectory = Some(traj);
        }
    }
    if config.wants(OutputKind::Spectrum) {
        let profile = GammaProfile::end_defect(p.n_cells, p.kappa, p.gammas, p.gamma0)?;
        result.spectrum = Some(eigensolve(&build_linear_model(p.kappa, p.nu, &profile)?)?);
    }
    if config.wants(OutputKind::Defect) {
        result.defect = Some(analytic_defect(p.kappa, p.nu, p.gammas, p.gamma0)?);
    }
    Ok(result)
}

/// One sweep point; a blow-up is recorded in the row, other failures abort.
pub fn sweep_point(config: &ExperimentConfig, axis: &SweepAxis, value: f64) -> Result<SweepRow> {
    let (p, i_in) = config.at_point(axis.param, value);
    let run = evolve_model(
        config.model,
        &p,
        i_in,
        config.t_final,
        config.dt,
        config.effective_stride(),
    )?;
    let traj = &run.trajectory;
    let mut row = SweepRow {
        value,
        i_in,
        edge_fraction: None,
        total_fraction: None,
        gamma_bar_1: None,
        gamma_bar_2: None,
        period: None,
        linear_period: None,
        max_total_intensity: traj.max_total_intensity(),
        blow_up: run.blow_up.is_some(),
    };
    if row.blow_up {
        return Ok(row);
    }
    let (w0, w1) = config.window;
    let avg = averaged_observables(traj, &p, w0, w1)?;
    row.edge_fraction = Some(avg.edge_fraction());
    if i_in > 0.0 {
        row.total_fraction = Some(avg.i_bar_total / i_in);
    }
    row.gamma_bar_1 = avg.gamma_bar_cells.first().copied();
    row.gamma_bar_2 = avg.gamma_bar_cells.get(1).copied();
    row.period = extract_period(traj, 0, w0)?;
    if config.model != ModelKind::Hermitian && p.n_cells > 1 {
        let g2 = avg.gamma_bar_cells[1];
        row.linear_period = two_cell_profile(&p, g2)
            .and_then(|prof| linear_period(p.kappa, p.nu, &prof))
            .ok()
            .flatten();
    }
    Ok(row)
}

fn run_sweep(config: &ExperimentConfig, axis: &SweepAxis, workers: usize) -> Result<SweepResult> {
    let values = axis.values();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Domain(format!("worker pool: {e}")))?;
    let rows = pool.install(|| {
        values
            .par_iter()
            .map(|&v| sweep_point(config, axis, v))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(SweepResult { axis: *axis, rows })
}

/// Computes everything the config asks for without touching the disk.
pub fn execute(config: &ExperimentConfig, workers: usize) -> Result<ExperimentResult> {
    config.validate()?;
    match &config.sweep {
        Some(axis) => Ok(ExperimentResult::Sweep(run_sweep(config, axis, workers)?)),
        None => Ok(ExperimentResult::Single(Box::new(run_single(config)?))),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutputFile {
    pub kind: String,
    pub path: PathBuf,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunRecord {
    pub config: Value,
    pub outputs: Vec<OutputFile>,
    pub wall_seconds: f64,
    pub max_total_intensity: f64,
    pub blow_up: bool,
    pub blow_up_message: Option<String>,
    pub summary: Map<String, Value>,
}

fn put_table(
    dir: &Path,
    name: &str,
    kind: &str,
    table: (Vec<String>, Vec<Vec<String>>),
    files: &mut Vec<OutputFile>,
) -> Result<()> {
    let path = dir.join(format!("{name}-{kind}.csv"));
    output::write_table_file(&path, &table.0, &table.1)?;
    files.push(OutputFile {
        kind: kind.to_string(),
        path,
    });
    Ok(())
}

fn put_svg(dir: &Path, name: &str, kind: &str, svg: String, files: &mut Vec<OutputFile>) -> Result<()> {
    let path = dir.join(format!("{name}-{kind}.svg"));
    std::fs::write(&path, svg)?;
    files.push(OutputFile {
        kind: kind.to_string(),
        path,
    });
    Ok(())
}

fn emit_single(
    config: &ExperimentConfig,
    r: &SingleResult,
    dir: &Path,
    files: &mut Vec<OutputFile>,
) -> Result<()> {
    let name = config.name.as_str();
    if let Some(traj) = &r.trajectory {
        put_table(dir, name, "trajectory", output::trajectory_table(traj, config.amplitudes), files)?;
        let series: Vec<Series> = (0..traj.n_cells().min(4))
            .map(|c| Series {
                label: ["I_1", "I_2", "I_3", "I_4"][c],
                points: traj
                    .times()
                    .iter()
                    .copied()
                    .zip(traj.cell_series(c).unwrap_or_default())
                    .collect(),
            })
            .collect();
        let axes = Axes {
            title: name,
            x_label: "t",
            y_label: "I_n",
            x_scale: Scale::Linear,
            y_scale: Scale::Log,
        };
        put_svg(dir, name, "trajectory", svg::line_plot(&axes, &series), files)?;
    }
    if let Some(avg) = &r.averages {
        put_table(dir, name, "averages", output::averages_table(avg), files)?;
        let series = [Series {
            label: "I_bar_n",
            points: avg
                .i_bar_cells
                .iter()
                .enumerate()
                .map(|(c, &i)| ((c + 1) as f64, i))
                .collect(),
        }];
        let axes = Axes {
            title: name,
            x_label: "cell",
            y_label: "time-averaged intensity",
            x_scale: Scale::Linear,
            y_scale: Scale::Log,
        };
        put_svg(dir, name, "averages", svg::line_plot(&axes, &series), files)?;
    }
    if let Some(period) = r.period {
        let table = (
            vec!["cell".to_string(), "period".to_string()],
            vec![vec!["1".to_string(), fmt_opt(period)]],
        );
        put_table(dir, name, "period", table, files)?;
    }
    if let Some(map) = &r.heatmap {
        put_table(dir, name, "heatmap", output::heatmap_table(map), files)?;
        let rows: Vec<&[u8]> = map.rows().collect();
        put_svg(dir, name, "heatmap", svg::heatmap(name, &map.times, map.n_cells, &rows), files)?;
    }
    if let Some(spec) = &r.spectrum {
        put_table(dir, name, "spectrum", output::spectrum_table(spec), files)?;
        let series = [Series {
            label: "E",
            points: spec
                .eigenvalues
                .iter()
                .enumerate()
                .map(|(k, &e)| (k as f64, e))
                .collect(),
        }];
        let axes = Axes {
            title: name,
            x_label: "index",
            y_label: "E",
            x_scale: Scale::Linear,
            y_scale: Scale::Linear,
        };
        put_svg(dir, name, "spectrum", svg::line_plot(&axes, &series), files)?;
    }
    if let Some(sol) = &r.defect {
        put_table(dir, name, "defect", output::defect_table(sol), files)?;
    }
    Ok(())
}

pub fn sweep_table(s: &SweepResult) -> (Vec<String>, Vec<Vec<String>>) {
    let header = [
        s.axis.param.as_str(),
        "i_in",
        "i_bar_1_over_i_bar",
        "i_bar_over_i_in",
        "gamma_bar_1",
        "gamma_bar_2",
        "period",
        "linear_period",
        "max_total_intensity",
        "blow_up",
    ]
    .iter()
    .map(|h| h.to_string())
    .collect();
    let rows = s
        .rows
        .iter()
        .map(|r| {
            vec![
                fmt_f64(r.value),
                fmt_f64(r.i_in),
                fmt_opt(r.edge_fraction),
                fmt_opt(r.total_fraction),
                fmt_opt(r.gamma_bar_1),
                fmt_opt(r.gamma_bar_2),
                fmt_opt(r.period),
                fmt_opt(r.linear_period),
                fmt_f64(r.max_total_intensity),
                u8::from(r.blow_up).to_string(),
            ]
        })
        .collect();
    (header, rows)
}

fn emit_sweep(config: &ExperimentConfig, s: &SweepResult, dir: &Path, files: &mut Vec<OutputFile>) -> Result<()> {
    let name = config.name.as_str();
    put_table(dir, name, "sweep", sweep_table(s), files)?;
    let x_scale = match s.axis.spacing {
        Spacing::Log => Scale::Log,
        Spacing::Linear => Scale::Linear,
    };
    let pick = |f: fn(&SweepRow) -> Option<f64>| -> Vec<(f64, f64)> {
        s.rows
            .iter()
            .filter_map(|r| f(r).map(|y| (r.value, y)))
            .collect()
    };
    let fractions = [
        Series {
            label: "I_bar_1 / I_bar",
            points: pick(|r| r.edge_fraction),
        },
        Series {
            label: "I_bar / I_in",
            points: pick(|r| r.total_fraction),
        },
    ];
    let axes = Axes {
        title: name,
        x_label: s.axis.param.as_str(),
        y_label: "fraction",
        x_scale,
        y_scale: Scale::Linear,
    };
    put_svg(dir, name, "sweep", svg::line_plot(&axes, &fractions), files)?;
    let periods = [
        Series {
            label: "breather",
            points: pick(|r| r.period),
        },
        Series {
            label: "linear T_d",
            points: pick(|r| r.linear_period),
        },
    ];
    let axes = Axes {
        title: name,
        x_label: s.axis.param.as_str(),
        y_label: "period",
        x_scale,
        y_scale: Scale::Linear,
    };
    put_svg(dir, name, "sweep-period", svg::line_plot(&axes, &periods), files)
}

/// Writes `<name>-<output>.{csv,svg}` into `dir` and returns what was written.
pub fn emit_outputs(config: &ExperimentConfig, result: &ExperimentResult, dir: &Path) -> Result<Vec<OutputFile>> {
    std::fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    match result {
        ExperimentResult::Single(r) => emit_single(config, r, dir, &mut files)?,
        ExperimentResult::Sweep(s) => emit_sweep(config, s, dir, &mut files)?,
    }
    Ok(files)
}

fn summary(result: &ExperimentResult) -> Map<String, Value> {
    let mut m = Map::new();
    let num = |x: f64| json!(x);
    match result {
        ExperimentResult::Single(r) => {
            if let Some(avg) = &r.averages {
                m.insert("edge_fraction".into(), num(avg.edge_fraction()));
                m.insert("i_bar_total".into(), num(avg.i_bar_total));
            }
            if let Some(p) = r.period {
                m.insert("period".into(), json!(p));
            }
            if let Some(spec) = &r.spectrum {
                m.insert("defect_energy".into(), json!(spec.defect_energy()));
                m.insert("in_gap_count".into(), json!(spec.in_gap_indices().len()));
            }
            if let Some(sol) = &r.defect {
                m.insert("e_d".into(), json!(sol.e_d));
                m.insert("r".into(), num(sol.r));
                m.insert("norm_sq".into(), json!(sol.norm_sq));
            }
        }
        ExperimentResult::Sweep(s) => {
            m.insert("points".into(), json!(s.rows.len()));
        }
    }
    m
}

/// Executes, writes the artifacts and `<name>-record.json`.
///
/// A blow-up does not fail the call: the record is flagged and whatever was
/// computed before it is written.
pub fn run_experiment(config: &ExperimentConfig, out_dir: &Path, workers: usize) -> Result<RunRecord> {
    let start = Instant::now();
    let result = execute(config, workers)?;
    let mut outputs = emit_outputs(config, &result, out_dir)?;
    let blow_up_message = match &result {
        ExperimentResult::Single(r) => r.blow_up.clone(),
        ExperimentResult::Sweep(s) => s
            .rows
            .iter()
            .find(|r| r.blow_up)
            .map(|r| format!("blow-up at sweep value {}", r.value)),
    };
    let record_path = out_dir.join(format!("{}-record.json", config.name));
    outputs.push(OutputFile {
        kind: "record".into(),
        path: record_path.clone(),
    });
    let record = RunRecord {
        config: config.to_json_value(),
        outputs,
        wall_seconds: start.elapsed().as_secs_f64(),
        max_total_intensity: result.max_total_intensity(),
        blow_up: result.blew_up(),
        blow_up_message,
        summary: summary(&result),
    };
    let text = serde_json::to_string_pretty(&record).expect("record serializes");
    std::fs::write(&record_path, text + "\n")?;
    Ok(record)
}
