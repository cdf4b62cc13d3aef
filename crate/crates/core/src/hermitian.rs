//! Reciprocal (Hermitian) nonlinear SSH chain used as a contrast model.
//!
//! Both intracell directions carry `kappa - gamma_n` with `gamma_n` from the
//! same saturable law, so the flow conserves the total intensity. Its
//! topological transition sits at `gamma_c = kappa - nu`.

use num_complex::Complex64 as C64;

use crate::evolve::{Dynamics, Trajectory};
use crate::lattice::{LatticeParams, StateVector};
use crate::{Error, Result};

/// Cells (1-based) whose successor ratios enter [`plateau_metric`].
pub const PLATEAU_CELLS: std::ops::RangeInclusive<usize> = 2..=10;

/// `kappa - nu`.
pub fn hermitian_gamma_c(params: &LatticeParams) -> f64 {
    params.kappa - params.nu
}

/// Reciprocal stencil for per-cell `gammas`.
pub fn apply_reciprocal_frozen(kappa: f64, nu: f64, gammas: &[f64], psi: &[C64], out: &mut [C64]) {
    let n = gammas.len();
    debug_assert_eq!(psi.len(), 2 * n);
    debug_assert_eq!(out.len(), 2 * n);
    for (cell, &g) in gammas.iter().enumerate() {
        let (a, b) = (2 * cell, 2 * cell + 1);
        let k = kappa - g;
        let mut oa = k * psi[b];
        let mut ob = k * psi[a];
        if cell > 0 {
            oa += nu * psi[a - 1];
        }
        if cell + 1 < n {
            ob += nu * psi[b + 1];
        }
        out[a] = oa;
        out[b] = ob;
    }
}

fn apply_reciprocal_into(params: &LatticeParams, psi: &[C64], out: &mut [C64]) {
    let n = params.n_cells;
    let (kappa, nu) = (params.kappa, params.nu);
    for cell in 0..n {
        let (a, b) = (2 * cell, 2 * cell + 1);
        let k = kappa - params.gamma_unchecked(psi[a].norm_sqr() + psi[b].norm_sqr());
        let mut oa = k * psi[b];
        let mut ob = k * psi[a];
        if cell > 0 {
            oa += nu * psi[a - 1];
        }
        if cell + 1 < n {
            ob += nu * psi[b + 1];
        }
        out[a] = oa;
        out[b] = ob;
    }
}

pub fn apply_reciprocal_hamiltonian(params: &LatticeParams, state: &StateVector) -> Result<StateVector> {
    params.check_len(state.len())?;
    let mut out = vec![C64::new(0.0, 0.0); state.len()];
    apply_reciprocal_into(params, state.amplitudes(), &mut out);
    StateVector::new(out)
}

#[derive(Clone, Copy, Debug)]
pub struct ReciprocalModel(pub LatticeParams);

impl Dynamics for ReciprocalModel {
    fn dim(&self) -> usize {
        self.0.n_sites()
    }

    fn apply(&self, psi: &[C64], out: &mut [C64]) {
        apply_reciprocal_into(&self.0, psi, out)
    }
}

/// Median of `I_{n+1} / I_n` over 1-based cells `n = 2..=10` at the sample
/// nearest `t_eval`. A ratio with `I_n = 0` counts as 0.
///
/// Close to 1 for a flat tail, far below 1 for exponential localization.
pub fn plateau_metric(traj: &Trajectory, t_eval: f64) -> Result<f64> {
    let need = PLATEAU_CELLS.end() + 1;
    if traj.n_cells() < need {
        return Err(Error::Domain(format!(
            "plateau metric needs at least {need} cells, got {}",
            traj.n_cells()
        )));
    }
    let intensities = traj.intensities_at(traj.sample_near(t_eval)?);
    Ok(plateau_metric_of(&intensities))
}

pub(crate) fn plateau_metric_of(intensities: &[f64]) -> f64 {
    let mut ratios: Vec<f64> = PLATEAU_CELLS
        .map(|n| {
            let (lo, hi) = (intensities[n - 1], intensities[n]);
            if lo > 0.0 {
                hi / lo
            } else {
                0.0
            }
        })
        .collect();
    ratios.sort_by(f64::total_cmp);
    ratios[ratios.len() / 2]
}
