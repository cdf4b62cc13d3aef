//! Effective linear model with a static gamma profile.
//!
//! The nonreciprocal chain `H_l` is similar to a Hermitian SSH chain `H_h`
//! with intracell hoppings `sqrt(kappa^2 - gamma_n^2)`:
//!
//! ```text
//! H_l = S H_h S^-1,  S = diag[1, b1, b1, b1 b2, b1 b2, ...],
//! b_n = sqrt((kappa - gamma_n) / (kappa + gamma_n))
//! ```
//!
//! so the spectrum is real and eigenvectors of `H_l` are `S v` for the
//! orthonormal eigenvectors `v` of `H_h`. `b_n <= 1` piles every eigenvector
//! of `H_l` up against the left end (skin effect).
//!
//! For an end defect (`gamma_1 = gamma_d`, all other cells `gamma_0`) the
//! in-gap pair `+-E_d` and its eigenvectors are known in closed form; see
//! [`analytic_defect`].

mod tridiag;

pub use tridiag::{symmetric_tridiagonal_eigen, MAX_ITERATIONS};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

use crate::lattice::{chiral_apply, FrozenModel, GammaProfile, StateVector};
use crate::{Error, Result};

/// Eigenvalues closer than this (in units of `nu`) to the bulk band edge
/// are not counted as in-gap.
pub const IN_GAP_MARGIN: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct LinearModel {
    pub kappa: f64,
    pub nu: f64,
    pub profile: GammaProfile,
    pub h_l: DMatrix<f64>,
    pub h_h: DMatrix<f64>,
    pub s_diag: Vec<f64>,
    pub beta: Vec<f64>,
}

impl LinearModel {
    pub fn n_cells(&self) -> usize {
        self.profile.n_cells()
    }

    pub fn n_sites(&self) -> usize {
        2 * self.n_cells()
    }

    /// Off-diagonal of the tridiagonal `H_h`.
    pub fn hermitian_off_diagonal(&self) -> Vec<f64> {
        (0..self.n_sites() - 1)
            .map(|j| self.h_h[(j, j + 1)])
            .collect()
    }

    /// `|kappa_bulk - nu|`, with the bulk taken from the last cell.
    pub fn bulk_gap(&self) -> f64 {
        let g = *self.profile.values().last().unwrap();
        ((self.kappa * self.kappa - g * g).sqrt() - self.nu).abs()
    }

    pub fn frozen(&self) -> FrozenModel {
        FrozenModel {
            kappa: self.kappa,
            nu: self.nu,
            gammas: self.profile.values().to_vec(),
        }
    }
}

pub fn build_linear_model(kappa: f64, nu: f64, profile: &GammaProfile) -> Result<LinearModel> {
    if !(kappa > 0.0 && kappa.is_finite()) || !(nu > 0.0 && nu.is_finite()) {
        return Err(Error::Domain(format!(
            "kappa = {kappa} and nu = {nu} must be finite and positive"
        )));
    }
    for (cell, &gamma) in profile.values().iter().enumerate() {
        if !(gamma >= 0.0 && gamma < kappa) {
            return Err(Error::SingularTransform { cell, gamma, kappa });
        }
    }
    let gammas = profile.values();
    let n = gammas.len();
    let dim = 2 * n;
    let mut h_l = DMatrix::zeros(dim, dim);
    let mut h_h = DMatrix::zeros(dim, dim);
    let mut beta = Vec::with_capacity(n);
    let mut s_diag = Vec::with_capacity(dim);
    s_diag.push(1.0);
    let mut prod = 1.0;

    for (cell, &g) in gammas.iter().enumerate() {
        let (a, b) = (2 * cell, 2 * cell + 1);
        h_l[(a, b)] = kappa + g;
        h_l[(b, a)] = kappa - g;
        let k_eff = ((kappa - g) * (kappa + g)).sqrt();
        h_h[(a, b)] = k_eff;
        h_h[(b, a)] = k_eff;
        if cell + 1 < n {
            for m in [&mut h_l, &mut h_h] {
                m[(b, b + 1)] = nu;
                m[(b + 1, b)] = nu;
            }
        }
        let bn = ((kappa - g) / (kappa + g)).sqrt();
        beta.push(bn);
        prod *= bn;
        s_diag.push(prod);
        if cell + 1 < n {
            s_diag.push(prod);
        }
    }

    Ok(LinearModel {
        kappa,
        nu,
        profile: profile.clone(),
        h_l,
        h_h,
        s_diag,
        beta,
    })
}

#[derive(Clone, Debug)]
pub struct SpectralResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Columns: orthonormal eigenvectors of `H_h`.
    pub eigenvectors_h: DMatrix<f64>,
    /// Columns: `S v`, unit L2 norm, largest-magnitude entry positive.
    pub eigenvectors_l: DMatrix<f64>,
    pub in_gap: Vec<bool>,
}

impl SpectralResult {
    pub fn in_gap_indices(&self) -> Vec<usize> {
        (0..self.eigenvalues.len()).filter(|&k| self.in_gap[k]).collect()
    }

    /// Smallest positive in-gap eigenvalue.
    pub fn defect_energy(&self) -> Option<f64> {
        self.in_gap_indices()
            .into_iter()
            .map(|k| self.eigenvalues[k])
            .filter(|&e| e > 0.0)
            .min_by(f64::total_cmp)
    }

    /// Index of the eigenpair with energy `defect_energy()`.
    pub fn defect_index(&self) -> Option<usize> {
        let e = self.defect_energy()?;
        self.eigenvalues.iter().position(|&x| x == e)
    }
}

fn fix_sign(col: &mut [f64]) {
    let (mut big, mut idx) = (0.0, 0);
    for (j, x) in col.iter().enumerate() {
        if x.abs() > big {
            big = x.abs();
            idx = j;
        }
    }
    if col[idx] < 0.0 {
        col.iter_mut().for_each(|x| *x = -*x);
    }
}

pub fn eigensolve(model: &LinearModel) -> Result<SpectralResult> {
    let dim = model.n_sites();
    let diag = vec![0.0; dim];
    let (eigenvalues, mut vh) = symmetric_tridiagonal_eigen(&diag, &model.hermitian_off_diagonal())?;
    let mut vl = DMatrix::zeros(dim, dim);
    for k in 0..dim {
        let mut col: Vec<f64> = vh.column(k).iter().copied().collect();
        fix_sign(&mut col);
        vh.set_column(k, &nalgebra::DVector::from_column_slice(&col));

        let mut mapped: Vec<f64> = col.iter().zip(&model.s_diag).map(|(v, s)| v * s).collect();
        let norm = mapped.iter().map(|x| x * x).sum::<f64>().sqrt();
        mapped.iter_mut().for_each(|x| *x /= norm);
        fix_sign(&mut mapped);
        vl.set_column(k, &nalgebra::DVector::from_column_slice(&mapped));
    }
    let edge = model.bulk_gap() - IN_GAP_MARGIN * model.nu;
    let in_gap = eigenvalues.iter().map(|e| e.abs() < edge).collect();
    Ok(SpectralResult {
        eigenvalues,
        eigenvectors_h: vh,
        eigenvectors_l: vl,
        in_gap,
    })
}

/// `T_d = pi / E_d` of a static profile, `None` without an in-gap pair.
pub fn linear_period(kappa: f64, nu: f64, profile: &GammaProfile) -> Result<Option<f64>> {
    let spec = eigensolve(&build_linear_model(kappa, nu, profile)?)?;
    Ok(spec.defect_energy().map(|e| PI / e))
}

/// Closed-form end-defect solution for `gamma_1 = gamma_d`, `gamma_{n>1} =
/// gamma_0`.
///
/// All dimensionless quantities (`a`, `b`, `r`, `norm_sq`, `weight`) are
/// evaluated with `kappa` and the gammas measured in units of `nu`; energies,
/// hoppings and thresholds are returned in the caller's units.
///
/// The amplitude on the first site of cell 2 is `a = -kappa_d / (kappa_0^2 -
/// kappa_d^2)` (in units of `nu`). Its sign follows from the second row of
/// `H_h psi = E psi`, `E b = kappa_d + a` with `b = E / kappa_d`; the defect
/// tail alternates in sign from cell to cell with ratio `-1/r`.
#[derive(Clone, Debug, PartialEq)]
pub struct DefectSolution {
    pub kappa: f64,
    pub nu: f64,
    pub gamma_d: f64,
    pub gamma_0: f64,
    pub kappa_d: f64,
    pub kappa_0: f64,
    /// Inverse per-cell decay factor of the defect tail.
    pub r: f64,
    /// `sqrt(kappa^2 - nu^2)`, the transition of a semi-infinite domain.
    pub gamma_c: f64,
    /// Present when `kappa_0^2 - kappa_d^2 > nu^2`.
    pub b: Option<f64>,
    pub a: Option<f64>,
    pub e_d: Option<f64>,
    pub period: Option<f64>,
    /// Present when additionally `r > 1`.
    pub norm_sq: Option<f64>,
    pub weight: Option<f64>,
    /// Minimum `gamma_s` at fixed `gamma_0 = self.gamma_0`.
    pub gamma_sc: Option<f64>,
    /// Maximum `gamma_0` at fixed `gamma_s = self.gamma_d`.
    pub gamma_0c: Option<f64>,
    /// Maximum `kappa_s` at fixed `kappa_0 = self.kappa_0`.
    pub kappa_sc: Option<f64>,
    /// Minimum `kappa_0` at fixed `kappa_s = self.kappa_d`.
    pub kappa_0c: Option<f64>,
}

/// The subset of a [`DefectSolution`] that exists only for a normalizable
/// end state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalizedDefect {
    pub a: f64,
    pub b: f64,
    pub r: f64,
    pub e_d: f64,
    pub norm_sq: f64,
    pub weight: f64,
    pub period: f64,
}

impl DefectSolution {
    pub fn is_localized(&self) -> bool {
        self.norm_sq.is_some()
    }

    pub fn localized(&self) -> Result<LocalizedDefect> {
        match (self.a, self.b, self.e_d, self.norm_sq, self.weight, self.period) {
            (Some(a), Some(b), Some(e_d), Some(norm_sq), Some(weight), Some(period)) => {
                Ok(LocalizedDefect {
                    a,
                    b,
                    r: self.r,
                    e_d,
                    norm_sq,
                    weight,
                    period,
                })
            }
            _ if self.b.is_none() => Err(Error::NoBoundState {
                gap_sq: (self.kappa_0.powi(2) - self.kappa_d.powi(2)) / self.nu.powi(2),
            }),
            _ => Err(Error::NotLocalized { r: self.r }),
        }
    }
}

/// `N^2` from the rational closed form in units of `nu`. Agrees with the
/// geometric series `1 + (a^2 + b^2) / (1 - r^-2)` whenever `r > 1`.
pub fn norm_sq_closed_form(kappa: f64, gamma_d: f64, gamma_0: f64) -> f64 {
    let (k2, d2, z2) = (kappa * kappa, gamma_d * gamma_d, gamma_0 * gamma_0);
    2.0 * (d2 - z2) * (1.0 - d2 + z2) / (k2 - d2 * d2 - z2 * z2 - z2 * (1.0 - 2.0 * d2))
}

pub fn analytic_defect(kappa: f64, nu: f64, gamma_d: f64, gamma_0: f64) -> Result<DefectSolution> {
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(Error::Domain(format!("nu = {nu} must be > 0")));
    }
    if !(0.0 <= gamma_0 && gamma_0 < gamma_d && gamma_d < kappa) || !kappa.is_finite() {
        return Err(Error::Domain(format!(
            "need 0 <= gamma_0 < gamma_d < kappa, got gamma_0 = {gamma_0}, gamma_d = {gamma_d}, kappa = {kappa}"
        )));
    }
    // everything below in units of nu
    let k = kappa / nu;
    let gd = gamma_d / nu;
    let g0 = gamma_0 / nu;
    let kd = (k * k - gd * gd).sqrt();
    let k0 = (k * k - g0 * g0).sqrt();
    let r = k0 - kd * kd / k0;
    let gap_sq = k0 * k0 - kd * kd;

    let (mut a, mut b, mut e_d, mut period, mut norm_sq, mut weight) =
        (None, None, None, None, None, None);
    if gap_sq > 1.0 {
        let bb = (1.0 - 1.0 / gap_sq).sqrt();
        let aa = -kd / gap_sq;
        let e = kd * bb * nu;
        a = Some(aa);
        b = Some(bb);
        e_d = Some(e);
        period = Some(PI / e);
        if r > 1.0 {
            let n2 = 1.0 + (bb * bb + aa * aa) / (1.0 - r.powi(-2));
            norm_sq = Some(n2);
            weight = Some(2.0 / n2);
        }
    }

    let radicand = |x: f64| if x >= 0.0 { Some(x.sqrt()) } else { None };
    let gamma_sc = radicand(g0 * g0 + (k * k - g0 * g0).sqrt()).map(|x| x * nu);
    let gamma_0c = radicand(k * k - gd * gd + 0.25)
        .and_then(|inner| radicand(gd * gd - 0.5 - inner))
        .map(|x| x * nu);
    let kappa_sc = radicand(k0 * k0 - k0).map(|x| x * nu);
    let kappa_0c = Some((0.5 + (kd * kd + 0.25).sqrt()) * nu);

    Ok(DefectSolution {
        kappa,
        nu,
        gamma_d,
        gamma_0,
        kappa_d: kd * nu,
        kappa_0: k0 * nu,
        r,
        gamma_c: (kappa * kappa - nu * nu).max(0.0).sqrt(),
        b,
        a,
        e_d,
        period,
        norm_sq,
        weight,
        gamma_sc,
        gamma_0c,
        kappa_sc,
        kappa_0c,
    })
}

/// The real, normalized in-gap eigenvectors `(Psi_+, Psi_-)` of `H_h` at
/// energies `+E_d` and `-E_d`, truncated to `n_cells` cells.
///
/// `Psi_+ = N^-1 (1, b, a, -b/r, -a/r, b/r^2, a/r^2, ...)` and
/// `Psi_- = C Psi_+`.
pub fn analytic_defect_states(
    sol: &DefectSolution,
    n_cells: usize,
) -> Result<(StateVector, StateVector)> {
    let loc = sol.localized()?;
    if n_cells == 0 {
        return Err(Error::Domain("n_cells must be positive".into()));
    }
    let inv_n = loc.norm_sq.sqrt().recip();
    let q = -1.0 / loc.r;
    let mut plus = vec![0.0; 2 * n_cells];
    plus[0] = 1.0;
    plus[1] = loc.b;
    let mut tail = 1.0;
    for cell in 1..n_cells {
        plus[2 * cell] = loc.a * tail;
        tail *= q;
        plus[2 * cell + 1] = loc.b * tail;
    }
    plus.iter_mut().for_each(|x| *x *= inv_n);
    let plus = StateVector::from_real(&plus)?;
    let minus = chiral_apply(&plus);
    Ok((plus, minus))
}

/// Two-level approximation of the linear evolution from `psi(0) = (1, 0, ...)`:
///
/// ```text
/// psi(t) = sum_+- c_+- exp(-+ i E_d t) S Psi_+-,   c_+- = +-1/N
/// ```
///
/// i.e. `2/N^2 cos(E_d t)` times the odd-site profile of `N Psi_+` and
/// `-2i/N^2 sin(E_d t)` times its even-site profile, both mapped by `S`.
pub fn rabi_evolution(sol: &DefectSolution, model: &LinearModel, t: f64) -> Result<StateVector> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("t = {t} must be finite and >= 0")));
    }
    let loc = sol.localized()?;
    let (plus, minus) = analytic_defect_states(sol, model.n_cells())?;
    let inv_n = loc.norm_sq.sqrt().recip();
    let phase = C64::new(0.0, -loc.e_d * t).exp();
    let out = plus
        .amplitudes()
        .iter()
        .zip(minus.amplitudes())
        .zip(&model.s_diag)
        .map(|((p, m), s)| inv_n * s * (phase * p - phase.conj() * m))
        .collect();
    StateVector::new(out)
}
