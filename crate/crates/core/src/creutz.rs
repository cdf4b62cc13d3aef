//! Unitary image of the chain as a two-leg Creutz ladder.
//!
//! Each cell is rotated by `U = exp(-i sigma_x pi/4) = [[1, -i], [-i, 1]] / sqrt(2)`:
//!
//! ```text
//! phi_c = (psi_a - i psi_b) / sqrt(2)     psi_a = (phi_c + i phi_d) / sqrt(2)
//! phi_d = (-i psi_a + psi_b) / sqrt(2)    psi_b = (i phi_c + phi_d) / sqrt(2)
//! ```
//!
//! The nonreciprocal part of the intracell hopping becomes balanced on-site
//! gain `+i gamma_n` on leg c and loss `-i gamma_n` on leg d; the rungs carry
//! `kappa`, neighbouring cells couple through `+-i nu/2` along each leg and
//! `nu/2` diagonally. `|phi_c|^2 + |phi_d|^2 = I_n` exactly, so `gamma_n`
//! is the same function of the state in both pictures.

use num_complex::Complex64 as C64;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::evolve::{step_grid, Dynamics, Rk4};
use crate::lattice::{cell_intensities_of, LatticeParams, NonreciprocalModel, StateVector};
use crate::{Error, Result};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Leg amplitudes of the ladder, one pair per cell.
#[derive(Clone, Debug, PartialEq)]
pub struct CreutzState {
    pub phi_c: Vec<C64>,
    pub phi_d: Vec<C64>,
}

impl CreutzState {
    pub fn new(phi_c: Vec<C64>, phi_d: Vec<C64>) -> Result<Self> {
        if phi_c.is_empty() || phi_c.len() != phi_d.len() {
            return Err(Error::Dimension {
                expected: phi_c.len().max(1),
                got: phi_d.len(),
            });
        }
        Ok(CreutzState { phi_c, phi_d })
    }

    pub fn n_cells(&self) -> usize {
        self.phi_c.len()
    }

    /// `|phi_c_n|^2 + |phi_d_n|^2`.
    pub fn cell_intensities(&self) -> Vec<f64> {
        self.phi_c
            .iter()
            .zip(&self.phi_d)
            .map(|(c, d)| c.norm_sqr() + d.norm_sqr())
            .collect()
    }

    /// `[c_1, d_1, c_2, d_2, ...]`, the layout used by [`CreutzModel`].
    pub fn interleaved(&self) -> Vec<C64> {
        self.phi_c
            .iter()
            .zip(&self.phi_d)
            .flat_map(|(&c, &d)| [c, d])
            .collect()
    }

    pub fn from_interleaved(v: &[C64]) -> Result<Self> {
        if v.is_empty() || !v.len().is_multiple_of(2) {
            return Err(Error::Domain(format!(
                "interleaved ladder state needs a positive even length, got {}",
                v.len()
            )));
        }
        let phi_c = v.iter().step_by(2).copied().collect();
        let phi_d = v.iter().skip(1).step_by(2).copied().collect();
        Ok(CreutzState { phi_c, phi_d })
    }
}

pub fn to_creutz(state: &StateVector) -> CreutzState {
    let mut phi_c = Vec::with_capacity(state.n_cells());
    let mut phi_d = Vec::with_capacity(state.n_cells());
    for cell in state.amplitudes().chunks_exact(2) {
        let (a, b) = (cell[0], cell[1]);
        phi_c.push(FRAC_1_SQRT_2 * (a - I * b));
        phi_d.push(FRAC_1_SQRT_2 * (b - I * a));
    }
    CreutzState { phi_c, phi_d }
}

pub fn from_creutz(cstate: &CreutzState) -> Result<StateVector> {
    let amps = cstate
        .phi_c
        .iter()
        .zip(&cstate.phi_d)
        .flat_map(|(&c, &d)| [FRAC_1_SQRT_2 * (c + I * d), FRAC_1_SQRT_2 * (I * c + d)])
        .collect();
    StateVector::new(amps)
}

/// `H' phi` on the interleaved layout for per-cell `gammas`.
pub fn apply_creutz_frozen(kappa: f64, nu: f64, gammas: &[f64], phi: &[C64], out: &mut [C64]) {
    let n = gammas.len();
    debug_assert_eq!(phi.len(), 2 * n);
    debug_assert_eq!(out.len(), 2 * n);
    let h = 0.5 * nu;
    for (cell, &g) in gammas.iter().enumerate() {
        let (ci, di) = (2 * cell, 2 * cell + 1);
        let (c, d) = (phi[ci], phi[di]);
        let mut oc = kappa * d + I * g * c;
        let mut od = kappa * c - I * g * d;
        if cell + 1 < n {
            let (cr, dr) = (phi[ci + 2], phi[di + 2]);
            oc += h * (dr - I * cr);
            od += h * (cr + I * dr);
        }
        if cell > 0 {
            let (cl, dl) = (phi[ci - 2], phi[di - 2]);
            oc += h * (dl + I * cl);
            od += h * (cl - I * dl);
        }
        out[ci] = oc;
        out[di] = od;
    }
}

fn apply_creutz_nonlinear(params: &LatticeParams, phi: &[C64], out: &mut [C64]) {
    let gammas: Vec<f64> = cell_intensities_of(phi)
        .into_iter()
        .map(|i| params.gamma_unchecked(i))
        .collect();
    apply_creutz_frozen(params.kappa, params.nu, &gammas, phi, out);
}

/// `H'(phi) phi` with `gamma_n` from the ladder intensities.
pub fn apply_creutz_hamiltonian(params: &LatticeParams, cstate: &CreutzState) -> Result<CreutzState> {
    if cstate.n_cells() != params.n_cells || cstate.phi_d.len() != params.n_cells {
        return Err(Error::Dimension {
            expected: params.n_cells,
            got: cstate.n_cells(),
        });
    }
    let phi = cstate.interleaved();
    let mut out = vec![C64::new(0.0, 0.0); phi.len()];
    apply_creutz_nonlinear(params, &phi, &mut out);
    CreutzState::from_interleaved(&out)
}

/// Time-stepping adapter for the ladder on the interleaved layout.
#[derive(Clone, Copy, Debug)]
pub struct CreutzModel(pub LatticeParams);

impl Dynamics for CreutzModel {
    fn dim(&self) -> usize {
        self.0.n_sites()
    }

    fn apply(&self, psi: &[C64], out: &mut [C64]) {
        apply_creutz_nonlinear(&self.0, psi, out)
    }
}

/// Largest per-cell intensity mismatch between the chain and its ladder
/// image, evolved side by side with the same RK4 steps, relative to
/// `max(I_total(0), f64::MIN_POSITIVE)`.
pub fn equivalence_check(
    params: &LatticeParams,
    initial: &StateVector,
    t_final: f64,
    dt: f64,
) -> Result<f64> {
    params.validate()?;
    params.check_len(initial.len())?;
    let (n_steps, h) = step_grid(t_final, dt)?;
    let scale = initial.norm_sqr().max(f64::MIN_POSITIVE);

    let mut psi = initial.amplitudes().to_vec();
    let mut phi = to_creutz(initial).interleaved();
    let mut rk_chain = Rk4::new(NonreciprocalModel(*params));
    let mut rk_ladder = Rk4::new(CreutzModel(*params));
    let limit = crate::evolve::BLOW_UP_FACTOR * initial.norm_sqr();

    let mut worst: f64 = 0.0;
    for step in 1..=n_steps {
        rk_chain.step(&mut psi, h);
        rk_ladder.step(&mut phi, h);
        let a = cell_intensities_of(&psi);
        let b = cell_intensities_of(&phi);
        let total: f64 = a.iter().sum();
        if !total.is_finite() || total > limit {
            return Err(Error::BlowUp {
                time: step as f64 * h,
                total,
                limit,
            });
        }
        for (x, y) in a.iter().zip(&b) {
            worst = worst.max((x - y).abs());
        }
    }
    Ok(worst / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::apply_frozen;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn column_matrix(dim: usize, f: impl Fn(&[C64], &mut [C64])) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(dim, dim);
        let mut e = vec![c(0.0, 0.0); dim];
        let mut out = vec![c(0.0, 0.0); dim];
        for j in 0..dim {
            e[j] = c(1.0, 0.0);
            f(&e, &mut out);
            for i in 0..dim {
                m[(i, j)] = out[i];
            }
            e[j] = c(0.0, 0.0);
        }
        m
    }

    fn block_u(n_cells: usize) -> DMatrix<C64> {
        let s = FRAC_1_SQRT_2;
        let mut u = DMatrix::zeros(2 * n_cells, 2 * n_cells);
        for k in 0..n_cells {
            let (a, b) = (2 * k, 2 * k + 1);
            u[(a, a)] = c(s, 0.0);
            u[(a, b)] = c(0.0, -s);
            u[(b, a)] = c(0.0, -s);
            u[(b, b)] = c(s, 0.0);
        }
        u
    }

    #[test]
    fn basis_state_splits_evenly() {
        let s = StateVector::from_real(&[1.0, 0.0]).unwrap();
        let cs = to_creutz(&s);
        assert_relative_eq!(cs.phi_c[0].norm_sqr(), 0.5, max_relative = 1e-15);
        assert_relative_eq!(cs.phi_d[0].norm_sqr(), 0.5, max_relative = 1e-15);
    }

    #[test]
    fn unitarity_of_rotation() {
        let u = block_u(1);
        let id = &u * u.adjoint();
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((id[(i, j)] - c(expect, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn conjugated_operator_matches_stencil() {
        let gammas = [1.3, 0.2, 0.0, 0.9];
        let (kappa, nu) = (1.7, 0.8);
        let n = gammas.len();
        let h = column_matrix(2 * n, |p, o| {
            let mut tmp = vec![c(0.0, 0.0); 2 * n];
            apply_frozen(kappa, nu, &gammas, p, &mut tmp);
            o.copy_from_slice(&tmp);
        });
        let hp = column_matrix(2 * n, |p, o| apply_creutz_frozen(kappa, nu, &gammas, p, o));
        let u = block_u(n);
        let expect = &u * h * u.adjoint();
        for i in 0..2 * n {
            for j in 0..2 * n {
                assert!((hp[(i, j)] - expect[(i, j)]).norm() < 1e-12, "({i}, {j})");
            }
        }
    }

    #[test]
    fn onsite_block_is_gain_loss() {
        let gammas = [0.6, 1.1];
        let hp = column_matrix(4, |p, o| apply_creutz_frozen(1.5, 1.0, &gammas, p, o));
        for (k, &g) in gammas.iter().enumerate() {
            let (a, b) = (2 * k, 2 * k + 1);
            assert_eq!(hp[(a, a)], c(0.0, g));
            assert_eq!(hp[(b, b)], c(0.0, -g));
            // trace of the anti-Hermitian on-site part vanishes
            assert_eq!(hp[(a, a)] + hp[(b, b)], c(0.0, 0.0));
            assert_eq!(hp[(a, b)], c(1.5, 0.0));
            assert_eq!(hp[(b, a)], c(1.5, 0.0));
        }
    }

    #[test]
    fn onsite_term_on_leg_c() {
        let p = LatticeParams::new(3, 2f64.sqrt(), 1.0, 0.0, 7f64.sqrt() / 2.0, 1.0).unwrap();
        let mut cs = CreutzState::new(vec![c(0.0, 0.0); 3], vec![c(0.0, 0.0); 3]).unwrap();
        cs.phi_c[0] = c(1.0, 0.0);
        let out = apply_creutz_hamiltonian(&p, &cs).unwrap();
        let g = p.gamma_of_intensity(1.0).unwrap();
        assert_relative_eq!(out.phi_c[0].im, g, max_relative = 1e-15);
        assert_eq!(out.phi_c[0].re, 0.0);
    }

    #[test]
    fn zero_maps_to_zero() {
        let p = LatticeParams::new(2, 1.5, 1.0, 0.1, 0.9, 1.0).unwrap();
        let z = to_creutz(&StateVector::zeros(2));
        let out = apply_creutz_hamiltonian(&p, &z).unwrap();
        assert!(out.interleaved().iter().all(|x| *x == c(0.0, 0.0)));
        let wrong = to_creutz(&StateVector::zeros(3));
        assert!(matches!(
            apply_creutz_hamiltonian(&p, &wrong),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn round_trip_and_intensity() {
        let s = StateVector::new(vec![c(0.3, -1.0), c(2.0, 0.5), c(-0.1, 0.2), c(0.0, 7.0)])
            .unwrap();
        let cs = to_creutz(&s);
        let back = from_creutz(&cs).unwrap();
        for (x, y) in s.amplitudes().iter().zip(back.amplitudes()) {
            assert!((x - y).norm() <= 1e-15 * x.norm().max(1.0));
        }
        for (x, y) in cell_intensities_of(s.amplitudes()).iter().zip(cs.cell_intensities()) {
            assert_relative_eq!(*x, y, max_relative = 1e-15);
        }
    }

    #[test]
    fn short_equivalence_run() {
        let p = LatticeParams::new(8, 2f64.sqrt(), 1.0, 0.0, 7f64.sqrt() / 2.0, 1.0).unwrap();
        let s0 = StateVector::single_site(8, 1e3).unwrap();
        let dev = equivalence_check(&p, &s0, 2.0, 1e-3).unwrap();
        assert!(dev < 1e-10, "deviation {dev}");
    }
}
