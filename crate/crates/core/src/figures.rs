//! Built-in configurations for the reference figure set.

use std::f64::consts::SQRT_2;

use crate::config::{ExperimentConfig, ModelKind, OutputKind, Spacing, SweepAxis, SweepParam};
use crate::lattice::LatticeParams;

pub const N_CELLS: usize = 100;
pub const I_IN: f64 = 1e3;

/// `sqrt(7) / 2`.
pub fn gamma_s_breather() -> f64 {
    7f64.sqrt() / 2.0
}

fn params(kappa: f64, gamma0: f64, gammas: f64) -> LatticeParams {
    LatticeParams::new(N_CELLS, kappa, 1.0, gamma0, gammas, 1.0).expect("reference parameters are valid")
}

/// Linear decay: `gamma_s` below the critical value.
pub fn decay() -> LatticeParams {
    params(SQRT_2, 0.0, 0.5)
}

/// Steady end mode: `gamma_0` above `gamma_0^c`.
pub fn steady() -> LatticeParams {
    params(SQRT_2, 1.2, gamma_s_breather())
}

/// End breather.
pub fn breather() -> LatticeParams {
    params(SQRT_2, 0.0, gamma_s_breather())
}

/// Reciprocal comparison chain.
pub fn hermitian() -> LatticeParams {
    params(2.0, 0.0, gamma_s_breather())
}

/// The input-intensity sweep used for the transition and period-jump plots:
/// 25 log-spaced points over `[10, 1e4]`.
pub fn intensity_sweep_axis() -> SweepAxis {
    SweepAxis {
        param: SweepParam::IIn,
        min: 10.0,
        max: 1e4,
        count: 25,
        spacing: Spacing::Log,
    }
}

pub fn suite() -> Vec<ExperimentConfig> {
    let evolve_outputs = vec![
        OutputKind::Trajectory,
        OutputKind::Averages,
        OutputKind::Period,
        OutputKind::Heatmap,
    ];
    let single = |name: &str, model, p| {
        let mut c = ExperimentConfig::new(name, model, p, I_IN);
        c.outputs = evolve_outputs.clone();
        c
    };
    let mut sweep = ExperimentConfig::new("intensity-sweep", ModelKind::Nonreciprocal, breather(), I_IN);
    sweep.sweep = Some(intensity_sweep_axis());
    let mut linear = ExperimentConfig::new("linear-defect", ModelKind::Nonreciprocal, breather(), I_IN);
    linear.outputs = vec![OutputKind::Spectrum, OutputKind::Defect];

    vec![
        single("decay", ModelKind::Nonreciprocal, decay()),
        single("steady", ModelKind::Nonreciprocal, steady()),
        single("breather", ModelKind::Nonreciprocal, breather()),
        sweep,
        linear,
        single("hermitian", ModelKind::Hermitian, hermitian()),
        single("creutz", ModelKind::Creutz, breather()),
    ]
}
