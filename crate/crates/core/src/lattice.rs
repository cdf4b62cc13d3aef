//! The nonlinear nonreciprocal two-site-per-cell chain.
//!
//! Sites are stored 0-based: cell `n` (0-based) owns sites `2n` and `2n + 1`.
//! Within a cell the hopping from the second site to the first is
//! `kappa + gamma_n` and the reverse is `kappa - gamma_n`; neighbouring cells
//! couple reciprocally through `nu`. The chain is open at both ends.
//!
//! `gamma_n` saturates with the cell intensity
//! `I_n = |psi_{2n}|^2 + |psi_{2n+1}|^2`:
//!
//! ```text
//! gamma_n = gamma_s - (gamma_s - gamma_0) / (1 + I_n / I_s)
//! ```
//!
//! Units: hbar = 1, energies in units of `nu`, time in units of `1 / nu`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::evolve::Dynamics;
use crate::{Error, Result};

/// Physical constants of one model instance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeParams {
    pub n_cells: usize,
    pub kappa: f64,
    pub nu: f64,
    pub gamma0: f64,
    pub gammas: f64,
    pub i_sat: f64,
}

impl LatticeParams {
    pub fn new(
        n_cells: usize,
        kappa: f64,
        nu: f64,
        gamma0: f64,
        gammas: f64,
        i_sat: f64,
    ) -> Result<Self> {
        let params = LatticeParams {
            n_cells,
            kappa,
            nu,
            gamma0,
            gammas,
            i_sat,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        let all = [self.kappa, self.nu, self.gamma0, self.gammas, self.i_sat];
        if all.iter().any(|x| !x.is_finite()) {
            return bad("all parameters must be finite".into());
        }
        if self.n_cells == 0 {
            return bad("n_cells must be positive".into());
        }
        if self.nu <= 0.0 {
            return bad(format!("nu = {} must be > 0", self.nu));
        }
        if self.kappa <= self.nu {
            return bad(format!(
                "kappa = {} must exceed nu = {}",
                self.kappa, self.nu
            ));
        }
        if !(0.0 <= self.gamma0 && self.gamma0 <= self.gammas && self.gammas <= self.kappa) {
            return bad(format!(
                "need 0 <= gamma0 <= gammas <= kappa, got gamma0 = {}, gammas = {}, kappa = {}",
                self.gamma0, self.gammas, self.kappa
            ));
        }
        if self.i_sat <= 0.0 {
            return bad(format!("i_sat = {} must be > 0", self.i_sat));
        }
        Ok(())
    }

    pub fn n_sites(&self) -> usize {
        2 * self.n_cells
    }

    /// Critical nonreciprocity `sqrt(kappa^2 - nu^2)` of the finite open chain.
    pub fn gamma_c(&self) -> f64 {
        (self.kappa * self.kappa - self.nu * self.nu).sqrt()
    }

    /// Saturable hopping law. Errors on negative or non-finite intensity.
    pub fn gamma_of_intensity(&self, intensity: f64) -> Result<f64> {
        if !(intensity >= 0.0) || intensity.is_infinite() {
            return Err(Error::Domain(format!(
                "intensity must be finite and >= 0, got {intensity}"
            )));
        }
        Ok(self.gamma_unchecked(intensity))
    }

    #[inline]
    pub(crate) fn gamma_unchecked(&self, intensity: f64) -> f64 {
        self.gammas - (self.gammas - self.gamma0) / (1.0 + intensity / self.i_sat)
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n_sites() {
            return Err(Error::Dimension {
                expected: self.n_sites(),
                got: len,
            });
        }
        Ok(())
    }
}

pub fn gamma_of_intensity(params: &LatticeParams, intensity: f64) -> Result<f64> {
    params.gamma_of_intensity(intensity)
}

/// 2N complex site amplitudes at one instant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateVector(Vec<C64>);

impl StateVector {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() || !amplitudes.len().is_multiple_of(2) {
            return Err(Error::Domain(format!(
                "state length must be a positive even number, got {}",
                amplitudes.len()
            )));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("state has non-finite amplitudes".into()));
        }
        Ok(StateVector(amplitudes))
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(n_cells: usize) -> Self {
        StateVector(vec![C64::new(0.0, 0.0); 2 * n_cells])
    }

    /// `psi_j = sqrt(intensity) * delta_{j,1}`: the leftmost site excited.
    pub fn single_site(n_cells: usize, intensity: f64) -> Result<Self> {
        if !(intensity >= 0.0) || !intensity.is_finite() {
            return Err(Error::Domain(format!(
                "input intensity must be finite and >= 0, got {intensity}"
            )));
        }
        let mut s = Self::zeros(n_cells.max(1));
        s.0[0] = C64::new(intensity.sqrt(), 0.0);
        Ok(s)
    }

    /// Wraps integrator output, which is checked separately.
    pub(crate) fn from_vec_unchecked(amplitudes: Vec<C64>) -> Self {
        StateVector(amplitudes)
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<C64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn n_cells(&self) -> usize {
        self.0.len() / 2
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Per-cell intensities `I_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct CellIntensities(pub Vec<f64>);

impl CellIntensities {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }
}

pub fn cell_intensities(state: &StateVector) -> CellIntensities {
    CellIntensities(cell_intensities_of(state.amplitudes()))
}

pub(crate) fn cell_intensities_of(psi: &[C64]) -> Vec<f64> {
    psi.chunks_exact(2)
        .map(|c| c[0].norm_sqr() + c[1].norm_sqr())
        .collect()
}

/// A static per-cell assignment of `gamma_n`, each in `[0, kappa)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaProfile(Vec<f64>);

impl GammaProfile {
    pub fn new(values: Vec<f64>, kappa: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("gamma profile must be non-empty".into()));
        }
        for (cell, &gamma) in values.iter().enumerate() {
            if !(gamma >= 0.0 && gamma < kappa) {
                return Err(Error::SingularTransform { cell, gamma, kappa });
            }
        }
        Ok(GammaProfile(values))
    }

    /// `gamma_1 = gamma_d`, every other cell at `gamma_0`.
    pub fn end_defect(n_cells: usize, kappa: f64, gamma_d: f64, gamma_0: f64) -> Result<Self> {
        let mut values = vec![gamma_0; n_cells];
        if let Some(first) = values.first_mut() {
            *first = gamma_d;
        }
        Self::new(values, kappa)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn n_cells(&self) -> usize {
        self.0.len()
    }
}

/// Writes `H psi` for per-cell hoppings `gammas` (frozen, no intensity
/// dependence) into `out`.
pub fn apply_frozen(kappa: f64, nu: f64, gammas: &[f64], psi: &[C64], out: &mut [C64]) {
    let n = gammas.len();
    debug_assert_eq!(psi.len(), 2 * n);
    debug_assert_eq!(out.len(), 2 * n);
    for (cell, &g) in gammas.iter().enumerate() {
        let (a, b) = (2 * cell, 2 * cell + 1);
        let mut oa = (kappa + g) * psi[b];
        let mut ob = (kappa - g) * psi[a];
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

/// Stencil with `gamma_n` evaluated from the intensities of `psi` itself.
#[inline]
fn apply_nonlinear_into(params: &LatticeParams, psi: &[C64], out: &mut [C64]) {
    let n = params.n_cells;
    let (kappa, nu) = (params.kappa, params.nu);
    for cell in 0..n {
        let (a, b) = (2 * cell, 2 * cell + 1);
        let g = params.gamma_unchecked(psi[a].norm_sqr() + psi[b].norm_sqr());
        let mut oa = (kappa + g) * psi[b];
        let mut ob = (kappa - g) * psi[a];
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

/// `H(psi) psi` with the hoppings taken from the state's own intensities.
pub fn apply_hamiltonian(params: &LatticeParams, state: &StateVector) -> Result<StateVector> {
    params.check_len(state.len())?;
    let mut out = vec![C64::new(0.0, 0.0); state.len()];
    apply_nonlinear_into(params, state.amplitudes(), &mut out);
    Ok(StateVector(out))
}

/// `C psi` with `C = diag(-1, 1, -1, 1, ...)`.
pub fn chiral_apply(state: &StateVector) -> StateVector {
    let mut out = state.0.clone();
    for z in out.iter_mut().step_by(2) {
        *z = -*z;
    }
    StateVector(out)
}

/// Time-stepping adapter for the nonreciprocal nonlinear chain.
#[derive(Clone, Copy, Debug)]
pub struct NonreciprocalModel(pub LatticeParams);

impl Dynamics for NonreciprocalModel {
    fn dim(&self) -> usize {
        self.0.n_sites()
    }

    fn apply(&self, psi: &[C64], out: &mut [C64]) {
        apply_nonlinear_into(&self.0, psi, out)
    }
}

/// The linear chain with a static gamma profile.
#[derive(Clone, Debug)]
pub struct FrozenModel {
    pub kappa: f64,
    pub nu: f64,
    pub gammas: Vec<f64>,
}

impl Dynamics for FrozenModel {
    fn dim(&self) -> usize {
        2 * self.gammas.len()
    }

    fn apply(&self, psi: &[C64], out: &mut [C64]) {
        apply_frozen(self.kappa, self.nu, &self.gammas, psi, out)
    }
}
