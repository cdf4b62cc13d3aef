//! Fixed-step RK4 integration of `i dpsi/dt = H(psi) psi` and the observables
//! derived from trajectories: windowed time averages, breather period, and
//! the local-phase map `Theta(gamma_n(t) - gamma_c)`.

use num_complex::Complex64 as C64;

use crate::lattice::{cell_intensities_of, LatticeParams, NonreciprocalModel, StateVector};
use crate::{Error, Result};

/// Abort threshold for the divergence guard, relative to the initial total
/// intensity.
pub const BLOW_UP_FACTOR: f64 = 1e12;

/// Default time step in units of `1 / nu`.
pub const DEFAULT_DT: f64 = 1e-3;

/// Minimum number of stored samples per run when the stride is defaulted.
pub const DEFAULT_SAMPLES: usize = 2000;

/// Default averaging window and transient cutoff, in units of `1 / nu`.
pub const DEFAULT_WINDOW: (f64, f64) = (50.0, 100.0);

/// A (possibly nonlinear) Hamiltonian action on a flat amplitude vector.
///
/// `apply` writes `H(psi) psi` into `out`; both slices have length `dim()`.
/// Consecutive pairs of amplitudes form one cell.
pub trait Dynamics: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, psi: &[C64], out: &mut [C64]);
}

impl<D: Dynamics + ?Sized> Dynamics for &D {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn apply(&self, psi: &[C64], out: &mut [C64]) {
        (**self).apply(psi, out)
    }
}

/// Classical RK4 for `dpsi/dt = -i H(psi) psi`, with `H` re-evaluated at
/// every stage state.
pub struct Rk4<D> {
    model: D,
    h1: Vec<C64>,
    h2: Vec<C64>,
    h3: Vec<C64>,
    h4: Vec<C64>,
    stage: Vec<C64>,
}

impl<D: Dynamics> Rk4<D> {
    pub fn new(model: D) -> Self {
        let n = model.dim();
        let zero = vec![C64::new(0.0, 0.0); n];
        Rk4 {
            model,
            h1: zero.clone(),
            h2: zero.clone(),
            h3: zero.clone(),
            h4: zero.clone(),
            stage: zero,
        }
    }

    pub fn model(&self) -> &D {
        &self.model
    }

    pub fn step(&mut self, psi: &mut [C64], dt: f64) {
        // k = -i h, so psi + c*dt*k = psi - i*c*dt*h
        let half = C64::new(0.0, -0.5 * dt);
        let full = C64::new(0.0, -dt);

        self.model.apply(psi, &mut self.h1);
        for ((s, p), h) in self.stage.iter_mut().zip(psi.iter()).zip(&self.h1) {
            *s = p + half * h;
        }
        self.model.apply(&self.stage, &mut self.h2);
        for ((s, p), h) in self.stage.iter_mut().zip(psi.iter()).zip(&self.h2) {
            *s = p + half * h;
        }
        self.model.apply(&self.stage, &mut self.h3);
        for ((s, p), h) in self.stage.iter_mut().zip(psi.iter()).zip(&self.h3) {
            *s = p + full * h;
        }
        self.model.apply(&self.stage, &mut self.h4);

        let sixth = C64::new(0.0, -dt / 6.0);
        for (j, p) in psi.iter_mut().enumerate() {
            *p += sixth * (self.h1[j] + 2.0 * (self.h2[j] + self.h3[j]) + self.h4[j]);
        }
    }
}

/// Time-sampled states of one run.
#[derive(Clone, Debug)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<StateVector>,
    sample_stride: usize,
    max_total_intensity: f64,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, states: Vec<StateVector>, sample_stride: usize) -> Result<Self> {
        if times.is_empty() || times.len() != states.len() {
            return Err(Error::Domain(format!(
                "trajectory needs matching non-empty times/states, got {} and {}",
                times.len(),
                states.len()
            )));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain("trajectory times must be strictly increasing".into()));
        }
        let len = states[0].len();
        if let Some(bad) = states.iter().find(|s| s.len() != len) {
            return Err(Error::Dimension {
                expected: len,
                got: bad.len(),
            });
        }
        let max_total_intensity = states
            .iter()
            .map(StateVector::norm_sqr)
            .fold(0.0, f64::max);
        Ok(Trajectory {
            times,
            states,
            sample_stride: sample_stride.max(1),
            max_total_intensity,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    pub fn sample_stride(&self) -> usize {
        self.sample_stride
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn n_cells(&self) -> usize {
        self.states[0].n_cells()
    }

    pub fn t_start(&self) -> f64 {
        self.times[0]
    }

    pub fn t_end(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// Largest total intensity seen at any integrator step.
    pub fn max_total_intensity(&self) -> f64 {
        self.max_total_intensity
    }

    pub fn intensities_at(&self, sample: usize) -> Vec<f64> {
        cell_intensities_of(self.states[sample].amplitudes())
    }

    /// `I_cell(t)` over all samples.
    pub fn cell_series(&self, cell: usize) -> Result<Vec<f64>> {
        if cell >= self.n_cells() {
            return Err(Error::Domain(format!(
                "cell index {cell} out of range for {} cells",
                self.n_cells()
            )));
        }
        Ok(self
            .states
            .iter()
            .map(|s| {
                let a = s.amplitudes();
                a[2 * cell].norm_sqr() + a[2 * cell + 1].norm_sqr()
            })
            .collect())
    }

    pub fn total_series(&self) -> Vec<f64> {
        self.states.iter().map(StateVector::norm_sqr).collect()
    }

    /// Index of the sample closest to `t`; `t` must lie within the run.
    pub fn sample_near(&self, t: f64) -> Result<usize> {
        let tol = 1e-9 * self.t_end().abs().max(1.0);
        if !(t >= self.t_start() - tol && t <= self.t_end() + tol) {
            return Err(Error::Domain(format!(
                "t = {t} outside trajectory range [{}, {}]",
                self.t_start(),
                self.t_end()
            )));
        }
        let idx = self.times.partition_point(|&x| x < t);
        Ok(match idx {
            0 => 0,
            i if i >= self.len() => self.len() - 1,
            i if (self.times[i] - t) < (t - self.times[i - 1]) => i,
            i => i - 1,
        })
    }
}

/// A run that may have been cut short by the divergence guard.
#[derive(Debug)]
pub struct PartialRun {
    pub trajectory: Trajectory,
    pub blow_up: Option<Error>,
}

/// Stride that keeps at least [`DEFAULT_SAMPLES`] samples.
pub fn default_stride(n_steps: usize) -> usize {
    (n_steps / DEFAULT_SAMPLES).max(1)
}

/// Step count and effective step so that an integer number of steps lands
/// exactly on `t_final`.
pub fn step_grid(t_final: f64, dt: f64) -> Result<(usize, f64)> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Domain(format!("dt must be > 0, got {dt}")));
    }
    if !(t_final >= dt) || !t_final.is_finite() {
        return Err(Error::Domain(format!(
            "t_final = {t_final} must be finite and >= dt = {dt}"
        )));
    }
    let n_steps = (t_final / dt).round().max(1.0) as usize;
    Ok((n_steps, t_final / n_steps as f64))
}

/// Integrates any [`Dynamics`] and keeps whatever was computed before a
/// blow-up.
pub fn integrate_model_partial<D: Dynamics>(
    model: D,
    initial: &StateVector,
    t_final: f64,
    dt: f64,
    stride: usize,
) -> Result<PartialRun> {
    if initial.len() != model.dim() {
        return Err(Error::Dimension {
            expected: model.dim(),
            got: initial.len(),
        });
    }
    if stride == 0 {
        return Err(Error::Domain("stride must be >= 1".into()));
    }
    let (n_steps, h) = step_grid(t_final, dt)?;

    let mut psi = initial.amplitudes().to_vec();
    let initial_total = initial.norm_sqr();
    let limit = BLOW_UP_FACTOR * initial_total;
    let mut max_total = initial_total;

    let cap = n_steps / stride + 2;
    let mut times = Vec::with_capacity(cap);
    let mut states = Vec::with_capacity(cap);
    times.push(0.0);
    states.push(initial.clone());

    let mut rk = Rk4::new(model);
    let mut blow_up = None;
    for step in 1..=n_steps {
        rk.step(&mut psi, h);
        let t = if step == n_steps { t_final } else { step as f64 * h };
        let total: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if !total.is_finite() || total > limit {
            blow_up = Some(Error::BlowUp { time: t, total, limit });
            break;
        }
        max_total = max_total.max(total);
        if step % stride == 0 || step == n_steps {
            times.push(t);
            states.push(StateVector::from_vec_unchecked(psi.clone()));
        }
    }

    Ok(PartialRun {
        trajectory: Trajectory {
            times,
            states,
            sample_stride: stride,
            max_total_intensity: max_total,
        },
        blow_up,
    })
}

pub fn integrate_model<D: Dynamics>(
    model: D,
    initial: &StateVector,
    t_final: f64,
    dt: f64,
    stride: usize,
) -> Result<Trajectory> {
    let run = integrate_model_partial(model, initial, t_final, dt, stride)?;
    match run.blow_up {
        Some(e) => Err(e),
        None => Ok(run.trajectory),
    }
}

/// Evolves `initial` under the nonreciprocal nonlinear Hamiltonian.
pub fn integrate(
    params: &LatticeParams,
    initial: &StateVector,
    t_final: f64,
    dt: f64,
    stride: usize,
) -> Result<Trajectory> {
    params.validate()?;
    params.check_len(initial.len())?;
    integrate_model(NonreciprocalModel(*params), initial, t_final, dt, stride)
}

/// Windowed time averages of `I_n` and `gamma_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct AveragedObservables {
    pub i_bar_cells: Vec<f64>,
    pub i_bar_total: f64,
    pub gamma_bar_cells: Vec<f64>,
    pub window: (f64, f64),
}

impl AveragedObservables {
    /// `I_bar_1 / I_bar`, zero when the lattice is empty.
    pub fn edge_fraction(&self) -> f64 {
        if self.i_bar_total > 0.0 {
            self.i_bar_cells[0] / self.i_bar_total
        } else {
            0.0
        }
    }
}

/// Trapezoidal averages over the samples in `[t_start, t_end]`, with
/// `gamma_n(t)` evaluated sample-by-sample from the saturable law.
pub fn averaged_observables(
    traj: &Trajectory,
    params: &LatticeParams,
    t_start: f64,
    t_end: f64,
) -> Result<AveragedObservables> {
    if !(t_end > t_start) {
        return Err(Error::Domain(format!(
            "empty averaging window [{t_start}, {t_end}]"
        )));
    }
    let tol = 1e-9 * t_end.abs().max(1.0);
    if t_start < traj.t_start() - tol || t_end > traj.t_end() + tol {
        return Err(Error::Domain(format!(
            "window [{t_start}, {t_end}] outside trajectory range [{}, {}]",
            traj.t_start(),
            traj.t_end()
        )));
    }
    let idx: Vec<usize> = (0..traj.len())
        .filter(|&i| traj.times[i] >= t_start - tol && traj.times[i] <= t_end + tol)
        .collect();
    if idx.len() < 2 {
        return Err(Error::Domain(format!(
            "window [{t_start}, {t_end}] contains fewer than two samples"
        )));
    }

    let n = traj.n_cells();
    let mut i_acc = vec![0.0; n];
    let mut g_acc = vec![0.0; n];
    let mut prev: Option<(f64, Vec<f64>, Vec<f64>)> = None;
    for &k in &idx {
        let t = traj.times[k];
        let i_now = traj.intensities_at(k);
        let g_now: Vec<f64> = i_now.iter().map(|&x| params.gamma_unchecked(x)).collect();
        if let Some((t_prev, i_prev, g_prev)) = &prev {
            let w = 0.5 * (t - t_prev);
            for c in 0..n {
                i_acc[c] += w * (i_prev[c] + i_now[c]);
                g_acc[c] += w * (g_prev[c] + g_now[c]);
            }
        }
        prev = Some((t, i_now, g_now));
    }
    let span = traj.times[*idx.last().unwrap()] - traj.times[idx[0]];
    let i_bar_cells: Vec<f64> = i_acc.iter().map(|x| x / span).collect();
    let gamma_bar_cells = g_acc.iter().map(|x| x / span).collect();
    Ok(AveragedObservables {
        i_bar_total: i_bar_cells.iter().sum(),
        i_bar_cells,
        gamma_bar_cells,
        window: (t_start, t_end),
    })
}

/// Peaks must rise at least this fraction of the post-transient range above
/// their surroundings.
pub const PEAK_PROMINENCE: f64 = 0.01;
/// Peak spacings with a larger relative standard deviation are aperiodic.
pub const MAX_SPACING_SPREAD: f64 = 0.2;

/// Mean spacing between prominent local maxima of `values` for
/// `t > t_transient`; `None` with fewer than three peaks or irregular spacing.
pub fn extract_period_series(times: &[f64], values: &[f64], t_transient: f64) -> Option<f64> {
    let peaks = peak_times(times, values, t_transient);
    if peaks.len() < 3 {
        return None;
    }
    let gaps: Vec<f64> = peaks.windows(2).map(|w| w[1] - w[0]).collect();
    let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
    let var = gaps.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / gaps.len() as f64;
    if var.sqrt() / mean > MAX_SPACING_SPREAD {
        return None;
    }
    Some(mean)
}

/// Times of the prominent local maxima of `values` for `t > t_transient`.
pub fn peak_times(times: &[f64], values: &[f64], t_transient: f64) -> Vec<f64> {
    let start = times.partition_point(|&t| t <= t_transient);
    let (t, y) = (&times[start..], &values[start..]);
    prominent_peaks(y).into_iter().map(|i| t[i]).collect()
}

fn prominent_peaks(y: &[f64]) -> Vec<usize> {
    if y.len() < 3 {
        return Vec::new();
    }
    let lo = y.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min_prominence = PEAK_PROMINENCE * (hi - lo);
    if !(hi > lo) {
        return Vec::new();
    }
    (1..y.len() - 1)
        .filter(|&i| y[i] > y[i - 1] && y[i] > y[i + 1])
        .filter(|&i| prominence(y, i) >= min_prominence)
        .collect()
}

/// Height of `y[i]` above the higher of the two lowest points reached before
/// climbing to a higher sample (or the series end) on either side.
fn prominence(y: &[f64], i: usize) -> f64 {
    let peak = y[i];
    let mut left_min = peak;
    for &v in y[..i].iter().rev() {
        if v > peak {
            break;
        }
        left_min = left_min.min(v);
    }
    let mut right_min = peak;
    for &v in &y[i + 1..] {
        if v > peak {
            break;
        }
        right_min = right_min.min(v);
    }
    peak - left_min.max(right_min)
}

/// Breather period from `I_cell(t)` after `t_transient`.
pub fn extract_period(traj: &Trajectory, cell: usize, t_transient: f64) -> Result<Option<f64>> {
    let series = traj.cell_series(cell)?;
    Ok(extract_period_series(traj.times(), &series, t_transient))
}

/// `Theta(gamma_n(t) - gamma_crit)` per sample and cell, with `Theta(0) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseMap {
    pub times: Vec<f64>,
    pub n_cells: usize,
    data: Vec<u8>,
}

impl PhaseMap {
    pub fn get(&self, sample: usize, cell: usize) -> u8 {
        self.data[sample * self.n_cells + cell]
    }

    pub fn row(&self, sample: usize) -> &[u8] {
        &self.data[sample * self.n_cells..(sample + 1) * self.n_cells]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u8]> {
        self.data.chunks_exact(self.n_cells)
    }

    /// First time each cell enters the nontrivial phase.
    pub fn onset_times(&self) -> Vec<Option<f64>> {
        (0..self.n_cells)
            .map(|c| {
                (0..self.times.len())
                    .find(|&s| self.get(s, c) == 1)
                    .map(|s| self.times[s])
            })
            .collect()
    }

    /// Cells in the nontrivial phase at one sample.
    pub fn active_cells(&self, sample: usize) -> Vec<usize> {
        self.row(sample)
            .iter()
            .enumerate()
            .filter(|(_, &v)| v == 1)
            .map(|(c, _)| c)
            .collect()
    }
}

pub fn phase_heatmap(traj: &Trajectory, params: &LatticeParams, gamma_crit: f64) -> PhaseMap {
    let n = traj.n_cells();
    let mut data = Vec::with_capacity(n * traj.len());
    for s in 0..traj.len() {
        for i in traj.intensities_at(s) {
            data.push(u8::from(params.gamma_unchecked(i) > gamma_crit));
        }
    }
    PhaseMap {
        times: traj.times.clone(),
        n_cells: n,
        data,
    }
}
