//! KdV evolution `q_t + q_xxx + q q_x = 0` and the linear semigroups `e^{tL}`,
//! `e^{tL₁}` about a cnoidal wave.
//!
//! All flows are stepped by the integrating-factor RK4 scheme on the
//! non-negative modes of real fields: the dispersive phase `ψ(k) = k³ − a k`
//! is applied exactly and RK4 handles the remaining (quadratic or
//! wave-coupling) term.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use serde::{Deserialize, Serialize};

use crate::cnoidal::CnoidalWave;
use crate::error::{Error, Result};
use crate::fourier::{padded_product, FourierField, Grid};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const BLOW_UP_FACTOR: f64 = 10.0;
/// Accuracy budget `dt · N³` above which a configuration warning is issued.
pub const C_STAB: f64 = 2.8;

/// Real coupling `γ` of the wave operator `(Pu)_k = iγ Σ (Φ_{k₁}/k₁) Φ_{k₂} u_{k₃}`
/// that closes the normal-form identity for KdV.
pub const P_COUPLING: f64 = 1.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Dealias {
    /// zero the top third of the spectrum before forming products
    Truncate23,
    /// exact products on a grid padded by 3/2
    #[default]
    Pad32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub n: usize,
    pub dt: f64,
    pub t_end: f64,
    #[serde(default)]
    pub dealias: Dealias,
    /// store a sample every this many steps (t = 0 and t = T are always stored)
    #[serde(default = "never")]
    pub monitor_every: usize,
}

fn never() -> usize {
    usize::MAX
}

impl SolverConfig {
    pub fn new(n: usize, dt: f64, t_end: f64) -> Self {
        Self {
            n,
            dt,
            t_end,
            dealias: Dealias::Pad32,
            monitor_every: usize::MAX,
        }
    }

    pub fn with_monitor(mut self, every: usize) -> Self {
        self.monitor_every = every.max(1);
        self
    }

    pub fn with_dealias(mut self, d: Dealias) -> Self {
        self.dealias = d;
        self
    }

    /// Validates the configuration and returns advisory warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        if self.n < 8 {
            return Err(Error::invalid(format!(
                "truncation N = {} is below 8",
                self.n
            )));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid(format!(
                "time step {} must be positive",
                self.dt
            )));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::invalid(format!(
                "horizon {} must be nonnegative",
                self.t_end
            )));
        }
        let mut warnings = Vec::new();
        let budget = self.dt * (self.n as f64).powi(3);
        if budget > C_STAB {
            warnings.push(format!(
                "dt·N³ = {budget:.3e} exceeds {C_STAB}: fast modes are under-resolved by the RK4 stages"
            ));
        }
        Ok(warnings)
    }

    /// `(steps, effective dt)`; the step is shrunk so that `T` is hit exactly.
    fn steps(&self) -> (usize, f64) {
        if self.t_end == 0.0 {
            return (0, self.dt);
        }
        let steps = (self.t_end / self.dt * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        (steps, self.t_end / steps as f64)
    }
}

/// Sampled solution of one of the flows.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<FourierField>,
    /// mode 0 at each sample
    pub momentum: Vec<f64>,
    /// `(‖q(t)‖₂² − ‖q(0)‖₂²) / ‖q(0)‖₂²` (zero when `q(0) = 0`)
    pub energy_drift: Vec<f64>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> &FourierField {
        self.states
            .last()
            .expect("trajectory has at least one sample")
    }

    pub fn max_energy_drift(&self) -> f64 {
        self.energy_drift.iter().fold(0.0, |m, d| m.max(d.abs()))
    }

    /// Writes `index.json`, one `state_NNNNN.json` per sample and
    /// `conservation.csv` (t, momentum, energy_drift) into `dir`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let files: Vec<String> = (0..self.len())
            .map(|i| format!("state_{i:05}.json"))
            .collect();
        for (f, q) in files.iter().zip(&self.states) {
            fs::write(dir.join(f), serde_json::to_string(q)?)?;
        }
        let index = TrajectoryIndex {
            times: self.times.clone(),
            files,
            momentum: self.momentum.clone(),
            energy_drift: self.energy_drift.clone(),
            warnings: self.warnings.clone(),
        };
        fs::write(
            dir.join("index.json"),
            serde_json::to_string_pretty(&index)?,
        )?;
        let mut w = csv::Writer::from_path(dir.join("conservation.csv"))?;
        w.write_record(["t", "momentum", "energy_drift"])?;
        for i in 0..self.len() {
            w.serialize((self.times[i], self.momentum[i], self.energy_drift[i]))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let index: TrajectoryIndex =
            serde_json::from_str(&fs::read_to_string(dir.join("index.json"))?)?;
        if index.files.len() != index.times.len() {
            return Err(Error::invalid(
                "trajectory index lists a different number of files and times",
            ));
        }
        let states = index
            .files
            .iter()
            .map(|f| Ok(serde_json::from_str(&fs::read_to_string(dir.join(f))?)?))
            .collect::<Result<Vec<FourierField>>>()?;
        Ok(Self {
            times: index.times,
            states,
            momentum: index.momentum,
            energy_drift: index.energy_drift,
            warnings: index.warnings,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct TrajectoryIndex {
    times: Vec<f64>,
    files: Vec<String>,
    momentum: Vec<f64>,
    energy_drift: Vec<f64>,
    #[serde(default)]
    warnings: Vec<String>,
}

/// Transforms between non-negative modes of a real field and an `M`-point
/// real grid.
pub(crate) struct HalfSpectrum {
    m: usize,
    forward: Arc<dyn RealToComplex<f64>>,
    inverse: Arc<dyn ComplexToReal<f64>>,
    pub(crate) buf: Vec<f64>,
    spec: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl HalfSpectrum {
    pub(crate) fn new(m: usize) -> Self {
        let mut planner = RealFftPlanner::<f64>::new();
        let forward = planner.plan_fft_forward(m);
        let inverse = planner.plan_fft_inverse(m);
        let len = forward.get_scratch_len().max(inverse.get_scratch_len());
        Self {
            m,
            forward,
            inverse,
            buf: vec![0.0; m],
            spec: vec![ZERO; m / 2 + 1],
            scratch: vec![ZERO; len],
        }
    }

    /// Fills `buf` with samples of `Σ_{|k|<=n} w_k e^{ikx_j}` where `w` holds
    /// modes `0..=n`, `n < M/2`.
    pub(crate) fn synthesize(&mut self, w: &[Complex64]) {
        self.spec.iter_mut().for_each(|b| *b = ZERO);
        self.spec[..w.len()].copy_from_slice(w);
        self.spec[0].im = 0.0;
        self.inverse
            .process_with_scratch(&mut self.spec, &mut self.buf, &mut self.scratch)
            .expect("buffer sizes match the plan");
    }

    /// Overwrites `out[k]`, `k < out.len()`, with modes of the samples in `buf`.
    pub(crate) fn analyze(&mut self, out: &mut [Complex64]) {
        self.forward
            .process_with_scratch(&mut self.buf, &mut self.spec, &mut self.scratch)
            .expect("buffer sizes match the plan");
        let scale = 1.0 / self.m as f64;
        for (o, s) in out.iter_mut().zip(&self.spec) {
            *o = s * scale;
        }
    }
}

/// The non-dispersive part of a flow, evaluated on non-negative modes.
pub(crate) trait Forcing {
    fn eval(&mut self, w: &[Complex64], out: &mut [Complex64]);
}

/// `-(ik/2)(w²)_k`, the KdV quadratic term.
pub(crate) struct Quadratic {
    grid: HalfSpectrum,
    cutoff: usize,
    input: Vec<Complex64>,
}

impl Quadratic {
    pub(crate) fn new(n: usize, dealias: Dealias) -> Self {
        let (cutoff, m) = match dealias {
            Dealias::Pad32 => (n, (3 * n + 1).next_power_of_two()),
            Dealias::Truncate23 => (2 * n / 3, (2 * n + 2).next_power_of_two()),
        };
        Self {
            grid: HalfSpectrum::new(m),
            cutoff,
            input: vec![ZERO; cutoff + 1],
        }
    }
}

impl Forcing for Quadratic {
    fn eval(&mut self, w: &[Complex64], out: &mut [Complex64]) {
        self.input.copy_from_slice(&w[..=self.cutoff]);
        self.grid.synthesize(&self.input);
        self.grid.buf.iter_mut().for_each(|b| *b *= *b);
        let cut = self.cutoff;
        self.grid.analyze(&mut out[..=cut]);
        out[0] = ZERO;
        for (k, o) in out.iter_mut().enumerate().take(cut + 1).skip(1) {
            *o *= Complex64::new(0.0, -0.5 * k as f64);
        }
        out[cut + 1..].iter_mut().for_each(|o| *o = ZERO);
    }
}

/// `(Pu)_k = iγ Σ (Φ_{k₁}/k₁) Φ_{k₂} u_{k₃}` with the inner pair `Φ * u`
/// truncated to `|k₂ + k₃| <= N`; mode 0 of the output is zeroed.
pub(crate) struct WaveCoupling {
    grid: HalfSpectrum,
    phi: Vec<f64>,
    phi_int: Vec<f64>,
    inner: Vec<Complex64>,
    gamma: f64,
}

impl WaveCoupling {
    pub(crate) fn new(phi: &FourierField, n: usize, gamma: f64) -> Self {
        let m = (3 * n + 1).next_power_of_two();
        let mut grid = HalfSpectrum::new(m);
        let phi = phi.resized(n).without_mean();
        let half = |f: &FourierField| (0..=n as i64).map(|k| f.get(k)).collect::<Vec<_>>();
        grid.synthesize(&half(&phi));
        let phi_s = grid.buf.clone();
        let anti = phi.antiderivative().expect("mean removed");
        grid.synthesize(&half(&anti));
        let anti_s = grid.buf.clone();
        Self {
            grid,
            phi: phi_s,
            phi_int: anti_s,
            inner: vec![ZERO; n + 1],
            gamma,
        }
    }
}

impl Forcing for WaveCoupling {
    fn eval(&mut self, w: &[Complex64], out: &mut [Complex64]) {
        // Φ_k / k = i (Φ₋₁)_k, so (Pu) = iγ · i Φ₋₁ · trunc(Φ u) = -γ Φ₋₁ trunc(Φ u)
        self.grid.synthesize(w);
        for (b, p) in self.grid.buf.iter_mut().zip(&self.phi) {
            *b *= p;
        }
        self.grid.analyze(&mut self.inner);
        self.grid.synthesize(&self.inner);
        for (b, p) in self.grid.buf.iter_mut().zip(&self.phi_int) {
            *b *= -self.gamma * p;
        }
        self.grid.analyze(out);
        out[0] = ZERO;
    }
}

/// `G u − mean(G u)` with `G` given on the grid.
pub(crate) struct GridMultiplier {
    grid: HalfSpectrum,
    g: Vec<f64>,
}

impl GridMultiplier {
    pub(crate) fn new(g: &FourierField, n: usize) -> Self {
        let m = (g.n() + 2 * n + 1).next_power_of_two();
        let mut grid = HalfSpectrum::new(m);
        let half: Vec<Complex64> = (0..=g.n() as i64).map(|k| g.get(k)).collect();
        grid.synthesize(&half);
        let g = grid.buf.clone();
        Self { grid, g }
    }
}

impl Forcing for GridMultiplier {
    fn eval(&mut self, w: &[Complex64], out: &mut [Complex64]) {
        self.grid.synthesize(w);
        for (b, g) in self.grid.buf.iter_mut().zip(&self.g) {
            *b *= g;
        }
        self.grid.analyze(out);
        out[0] = ZERO;
    }
}

/// Integrating-factor RK4 on `w_t = iψ w + F(w)` over non-negative modes.
pub(crate) struct IfRk4 {
    e_half: Vec<Complex64>,
    e_full: Vec<Complex64>,
    h: f64,
    k1: Vec<Complex64>,
    k2: Vec<Complex64>,
    k3: Vec<Complex64>,
    k4: Vec<Complex64>,
    tmp: Vec<Complex64>,
}

impl IfRk4 {
    /// `h` may be negative (backward integration).
    pub(crate) fn new(psi: &[f64], h: f64) -> Self {
        let e_half: Vec<Complex64> = psi
            .iter()
            .map(|&p| Complex64::from_polar(1.0, p * h / 2.0))
            .collect();
        let e_full = psi
            .iter()
            .map(|&p| Complex64::from_polar(1.0, p * h))
            .collect();
        let len = psi.len();
        Self {
            e_half,
            e_full,
            h,
            k1: vec![ZERO; len],
            k2: vec![ZERO; len],
            k3: vec![ZERO; len],
            k4: vec![ZERO; len],
            tmp: vec![ZERO; len],
        }
    }

    pub(crate) fn step(&mut self, w: &mut [Complex64], f: &mut impl Forcing) {
        let h = self.h;
        f.eval(w, &mut self.k1);
        for i in 0..w.len() {
            self.tmp[i] = self.e_half[i] * (w[i] + 0.5 * h * self.k1[i]);
        }
        f.eval(&self.tmp, &mut self.k2);
        for i in 0..w.len() {
            self.tmp[i] = self.e_half[i] * w[i] + 0.5 * h * self.k2[i];
        }
        f.eval(&self.tmp, &mut self.k3);
        for i in 0..w.len() {
            self.tmp[i] = self.e_full[i] * w[i] + self.e_half[i] * h * self.k3[i];
        }
        f.eval(&self.tmp, &mut self.k4);
        for i in 0..w.len() {
            w[i] = self.e_full[i] * w[i]
                + h / 6.0
                    * (self.e_full[i] * self.k1[i]
                        + 2.0 * self.e_half[i] * (self.k2[i] + self.k3[i])
                        + self.k4[i]);
        }
    }
}

fn half_modes(f: &FourierField, n: usize) -> Vec<Complex64> {
    (0..=n as i64).map(|k| f.get(k)).collect()
}

fn energy(mean: f64, w: &[Complex64]) -> f64 {
    mean * mean + 2.0 * w.iter().skip(1).map(|c| c.norm_sqr()).sum::<f64>()
}

fn to_field(mean: f64, w: &[Complex64]) -> FourierField {
    let mut modes = w.to_vec();
    modes[0] = Complex64::new(mean, 0.0);
    FourierField::from_nonnegative(&modes).expect("non-empty")
}

/// `ψ(k) = k³ − a k` for `k = 0..=n`.
pub fn dispersion(n: usize, a: f64) -> Vec<f64> {
    (0..=n)
        .map(|k| {
            let k = k as f64;
            k * k * k - a * k
        })
        .collect()
}

/// Steps `w` (mean-zero part, non-negative modes) and samples the full state
/// `mean + w`. The run aborts once `‖w‖₂` exceeds `BLOW_UP_FACTOR` times the
/// analytic bound `e^{rate·|t|}‖w₀‖₂` (`rate = 0` for norm-conserving flows).
pub(crate) fn integrate(
    mean: f64,
    mut w: Vec<Complex64>,
    psi: &[f64],
    forcing: &mut impl Forcing,
    cfg: &SolverConfig,
    rate: f64,
    warnings: Vec<String>,
) -> Result<Trajectory> {
    let (steps, h) = cfg.steps();
    integrate_steps(
        mean,
        &mut w,
        psi,
        forcing,
        steps,
        h,
        cfg.monitor_every,
        rate,
        warnings,
    )
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn integrate_steps(
    mean: f64,
    w: &mut [Complex64],
    psi: &[f64],
    forcing: &mut impl Forcing,
    steps: usize,
    h: f64,
    monitor_every: usize,
    rate: f64,
    warnings: Vec<String>,
) -> Result<Trajectory> {
    let e0 = energy(mean, w);
    let norm0 = e0.sqrt();
    let drift = |w: &[Complex64]| {
        if e0 > 0.0 {
            (energy(mean, w) - e0) / e0
        } else {
            0.0
        }
    };
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![to_field(mean, w)],
        momentum: vec![mean],
        energy_drift: vec![0.0],
        warnings,
    };
    let mut stepper = IfRk4::new(psi, h);
    for step in 1..=steps {
        stepper.step(w, forcing);
        let t = step as f64 * h;
        let norm = energy(mean, w).sqrt();
        if !norm.is_finite()
            || (norm0 > 0.0 && norm > BLOW_UP_FACTOR * norm0 * (rate * t.abs()).exp())
        {
            return Err(Error::BlowUp {
                t,
                growth: norm / norm0,
            });
        }
        if step % monitor_every == 0 || step == steps {
            traj.times.push(t);
            traj.states.push(to_field(mean, w));
            traj.momentum.push(mean);
            traj.energy_drift.push(drift(w));
        }
    }
    Ok(traj)
}

/// Pseudospectral KdV solve from `q0`. The mean of `q0` is carried exactly
/// and enters the dispersion as the drift `ψ(k) = k³ − ⟨q₀⟩ k`.
pub fn evolve_kdv(q0: &FourierField, cfg: &SolverConfig) -> Result<Trajectory> {
    let warnings = cfg.validate()?;
    if q0.hermitian_defect() > 1e-12 * q0.l2_norm().max(1.0) {
        return Err(Error::invalid(
            "initial datum is not real (Hermitian defect)",
        ));
    }
    let mean = q0.mean();
    let mut w = half_modes(q0, cfg.n);
    w[0] = ZERO;
    let psi = dispersion(cfg.n, mean);
    let mut forcing = Quadratic::new(cfg.n, cfg.dealias);
    integrate(mean, w, &psi, &mut forcing, cfg, 0.0, warnings)
}

/// KdV from `q0` over a signed time `t` with `steps` equal steps; returns the
/// final state only. Used for local re-integration around a sample.
pub fn kdv_propagate(
    q0: &FourierField,
    t: f64,
    steps: usize,
    dealias: Dealias,
) -> Result<FourierField> {
    let n = q0.n();
    let mean = q0.mean();
    let mut w = half_modes(q0, n);
    w[0] = ZERO;
    let psi = dispersion(n, mean);
    let mut forcing = Quadratic::new(n, dealias);
    let steps = steps.max(1);
    let traj = integrate_steps(
        mean,
        &mut w,
        &psi,
        &mut forcing,
        steps,
        t / steps as f64,
        usize::MAX,
        0.0,
        Vec::new(),
    )?;
    Ok(traj.last().clone())
}

/// Resonance-free linear flow `u_t = Lu + Pu` from `u0` over a signed time
/// `t` with `steps` equal steps; `phi` is the mean-zero wave part, `a` its
/// mean. Final state only.
pub fn l1_propagate(
    u0: &FourierField,
    phi: &FourierField,
    a: f64,
    gamma: f64,
    t: f64,
    steps: usize,
) -> Result<FourierField> {
    u0.require_mean_zero()?;
    let n = u0.n();
    let psi = dispersion(n, a);
    let mut forcing = WaveCoupling::new(phi, n, gamma);
    let rate = l2_growth_rate(&build_g_with(&phi.resized(n), gamma)?);
    let mut w = half_modes(u0, n);
    let steps = steps.max(1);
    let traj = integrate_steps(
        0.0,
        &mut w,
        &psi,
        &mut forcing,
        steps,
        t / steps as f64,
        usize::MAX,
        rate,
        Vec::new(),
    )?;
    Ok(traj.last().clone())
}

/// `q(x, t) ↦ q(x − ct, t) + c` applied sample by sample, i.e. mode `k` is
/// multiplied by `e^{−ikct}` and the mean is raised by `c`.
pub fn galilean_shift(traj: &Trajectory, c: f64) -> Trajectory {
    let states: Vec<FourierField> = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(&t, q)| {
            let mut s = q.map_modes(|k, v| v * Complex64::from_polar(1.0, -(k as f64) * c * t));
            s.set(0, (q.mean() + c).into());
            s
        })
        .collect();
    let momentum = states.iter().map(|s| s.mean()).collect();
    let e0 = states[0].l2_norm().powi(2);
    let energy_drift = states
        .iter()
        .map(|s| {
            if e0 > 0.0 {
                (s.l2_norm().powi(2) - e0) / e0
            } else {
                0.0
            }
        })
        .collect();
    Trajectory {
        times: traj.times.clone(),
        states,
        momentum,
        energy_drift,
        warnings: traj.warnings.clone(),
    }
}

/// Airy flow `e^{tL}`, `L = −∂³ − a∂`: mode `k` gains the phase `e^{iψ(k)t}`.
pub fn airy_flow(g: &FourierField, t: f64, a: f64) -> FourierField {
    g.map_modes(|k, c| {
        let k = k as f64;
        c * Complex64::from_polar(1.0, (k * k * k - a * k) * t)
    })
}

fn check_pair(u: &FourierField, phi: &FourierField) -> Result<()> {
    u.require_mean_zero()?;
    phi.require_mean_zero()
}

/// `(Pu)_k = iγ Σ_{k₁+k₂+k₃=k} (Φ_{k₁}/k₁) Φ_{k₂} u_{k₃}` for `k ≠ 0`,
/// `(Pu)_0 = 0`, with `γ` = [`P_COUPLING`].
pub fn apply_p(u: &FourierField, phi: &FourierField) -> Result<FourierField> {
    apply_p_with(u, phi, P_COUPLING)
}

pub fn apply_p_with(u: &FourierField, phi: &FourierField, gamma: f64) -> Result<FourierField> {
    check_pair(u, phi)?;
    let phi = phi.resized(u.n());
    // Φ_k / k = i (Φ₋₁)_k keeps every factor real-valued
    let anti = phi.antiderivative()?;
    let mut out = anti.convolve(&phi.convolve(u)?)?.scale(-gamma);
    out.set(0, ZERO);
    Ok(out)
}

/// `G = −γ Φ Φ₋₁` with `Φ₋₁` the mean-zero antiderivative, returned exactly
/// at truncation `2N` (its mean is kept).
pub fn build_g(phi: &FourierField) -> Result<FourierField> {
    build_g_with(phi, P_COUPLING)
}

pub fn build_g_with(phi: &FourierField, gamma: f64) -> Result<FourierField> {
    let anti = phi.antiderivative()?;
    Ok(padded_product(phi, &anti, 2 * phi.n()).scale(-gamma))
}

/// `P u` evaluated on the space side as `G u − mean(G u)`.
pub fn apply_p_grid(u: &FourierField, g: &FourierField) -> Result<FourierField> {
    u.require_mean_zero()?;
    let mut out = padded_product(g, u, u.n());
    out.set(0, ZERO);
    Ok(out)
}

/// Growth rate `‖G‖_∞ + ‖G‖₂` bounding `‖e^{tL₁}‖` on mean-zero `L²`.
pub fn l2_growth_rate(g: &FourierField) -> f64 {
    sup_norm(g) + g.l2_norm()
}

/// Growth rate `‖G‖_∞ + ‖G''‖_∞ / 2` bounding `‖e^{tL₁}‖` on mean-zero `H¹`.
pub fn h1_growth_rate(g: &FourierField) -> f64 {
    sup_norm(g) + 0.5 * sup_norm(&g.derivative().derivative())
}

fn sup_norm(f: &FourierField) -> f64 {
    let m = (8 * f.n() + 8).next_power_of_two();
    Grid::new(m)
        .synthesize(f)
        .iter()
        .map(|c| c.re.abs())
        .fold(0.0, f64::max)
}

/// `e^{tL₁} g` with `L₁ = L + P`, `L = −∂³ − ⟨φ⟩∂`, stepped in integrating
/// factor variables with the wave coupling evaluated in Fourier form.
pub fn modified_flow(
    g: &FourierField,
    wave: &CnoidalWave,
    cfg: &SolverConfig,
) -> Result<Trajectory> {
    modified_flow_with(g, wave, cfg, P_COUPLING)
}

pub fn modified_flow_with(
    g: &FourierField,
    wave: &CnoidalWave,
    cfg: &SolverConfig,
    gamma: f64,
) -> Result<Trajectory> {
    let warnings = cfg.validate()?;
    g.require_mean_zero()?;
    let psi = dispersion(cfg.n, wave.mean);
    let mut forcing = WaveCoupling::new(&wave.phi, cfg.n, gamma);
    let rate = l2_growth_rate(&build_g_with(&wave.phi_at(cfg.n), gamma)?);
    integrate(
        0.0,
        half_modes(g, cfg.n),
        &psi,
        &mut forcing,
        cfg,
        rate,
        warnings,
    )
}

/// Same flow with the coupling applied on the space side as
/// `u ↦ G u − mean(G u)`; an independent representation of the generator.
pub fn modified_flow_grid(
    g: &FourierField,
    wave: &CnoidalWave,
    cfg: &SolverConfig,
    gamma: f64,
) -> Result<Trajectory> {
    let warnings = cfg.validate()?;
    g.require_mean_zero()?;
    let psi = dispersion(cfg.n, wave.mean);
    let gfield = build_g_with(&wave.phi_at(cfg.n), gamma)?;
    let mut forcing = GridMultiplier::new(&gfield, cfg.n);
    integrate(
        0.0,
        half_modes(g, cfg.n),
        &psi,
        &mut forcing,
        cfg,
        l2_growth_rate(&gfield),
        warnings,
    )
}
