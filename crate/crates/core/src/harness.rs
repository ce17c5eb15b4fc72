//! Superposition experiments: high-frequency data on a cnoidal background,
//! comparison of the nonlinear evolution with the Airy and wave-coupled
//! linear flows, exponential growth fits and suite orchestration.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cnoidal::{build_cnoidal, CnoidalWave};
use crate::error::{Error, Result};
use crate::fourier::{FourierField, SobolevIndex};
use crate::kdv::{airy_flow, evolve_kdv, galilean_shift, modified_flow, SolverConfig};

/// Tolerance of the period match used to build the background wave.
pub const WAVE_TOL: f64 = 1e-12;
/// Absolute error level below which samples are treated as solver noise.
pub const SOLVER_FLOOR: f64 = 1e-8;
/// Minimum number of samples above `10 × floor` for a growth fit.
pub const MIN_FIT_SAMPLES: usize = 4;

/// Random data on the band `N₀ ≤ |k| ≤ 2N₀`: unit moduli with independent
/// uniform phases, `g₀ = 0`, normalized to `‖g‖₂ = 1`. Returns `g` and
/// `ε = ‖g‖_{Ḣ^{−s}}`.
pub fn generate_hf_data(n0: usize, s: f64, seed: u64, n: usize) -> Result<(FourierField, f64)> {
    if n0 == 0 || 2 * n0 > n {
        return Err(Error::invalid(format!(
            "band [{n0}, {}] does not fit in truncation {n}",
            2 * n0
        )));
    }
    let s = SobolevIndex::theorem(s)?.value();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = FourierField::zeros(n);
    for k in n0..=2 * n0 {
        let theta = rng.random_range(0.0..std::f64::consts::TAU);
        g.set(k as i64, Complex64::from_polar(1.0, theta));
    }
    let g = g.scale(1.0 / g.l2_norm());
    let eps = g.hom_norm(s);
    Ok((g, eps))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveParams {
    pub a: f64,
    #[serde(default)]
    pub c: f64,
}

impl Default for WaveParams {
    fn default() -> Self {
        Self { a: 8.0, c: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub s: f64,
    /// lower edge `N₀` of the band `[N₀, 2N₀]`
    pub n0: usize,
    pub seed: u64,
    #[serde(default)]
    pub wave: WaveParams,
    pub solver: SolverConfig,
    /// largest step of the `e^{tL₁}` evolution (defaults to `solver.dt`)
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linear_dt: Option<f64>,
    /// directory receiving `record.json` and `series.csv`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl ExperimentSpec {
    /// Solver configuration of the linear flow: the largest multiple of
    /// `solver.dt` not above `linear_dt` that divides `monitor_every`, so both
    /// flows are sampled at the same times.
    pub fn linear_solver(&self) -> SolverConfig {
        let cfg = self.solver;
        let Some(ldt) = self.linear_dt else {
            return cfg;
        };
        if cfg.monitor_every == usize::MAX {
            return cfg;
        }
        let max_stride = ((ldt / cfg.dt) * (1.0 + 1e-12)).floor().max(1.0) as usize;
        let stride = (1..=max_stride.min(cfg.monitor_every))
            .rev()
            .find(|d| cfg.monitor_every % d == 0)
            .unwrap_or(1);
        SolverConfig {
            dt: cfg.dt * stride as f64,
            monitor_every: cfg.monitor_every / stride,
            ..cfg
        }
    }

    pub fn validate(&self) -> Result<()> {
        SobolevIndex::theorem(self.s)?;
        if self.n0 < 4 {
            return Err(Error::invalid(format!("N0 = {} is below 4", self.n0)));
        }
        if 4 * self.n0 > self.solver.n {
            return Err(Error::invalid(format!(
                "band edge 2N0 = {} exceeds N/2 = {}",
                2 * self.n0,
                self.solver.n / 2
            )));
        }
        self.solver.validate().map(|_| ())
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }
}

/// Exponential model `err(t) ≈ C₁ e^{C₂ t} ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GrowthFit {
    Fitted {
        c1: f64,
        c2: f64,
        /// RMS residual of the log-linear fit
        residual: f64,
        samples: usize,
    },
    /// too few samples above the noise floor; the bound holds trivially
    Vacuous,
}

impl GrowthFit {
    pub fn rate(&self) -> Option<f64> {
        match *self {
            GrowthFit::Fitted { c2, .. } => Some(c2),
            GrowthFit::Vacuous => None,
        }
    }

    pub fn prefactor(&self) -> Option<f64> {
        match *self {
            GrowthFit::Fitted { c1, .. } => Some(c1),
            GrowthFit::Vacuous => None,
        }
    }
}

/// Least-squares fit of `log(err/ε)` against `t` over the samples with
/// `err > 10 · floor`.
pub fn fit_exponential(t: &[f64], err: &[f64], eps: f64, floor: f64) -> GrowthFit {
    let pts: Vec<(f64, f64)> = t
        .iter()
        .zip(err)
        .filter(|(_, &e)| e > 10.0 * floor)
        .map(|(&t, &e)| (t, (e / eps).ln()))
        .collect();
    if pts.len() < MIN_FIT_SAMPLES || eps <= 0.0 {
        return GrowthFit::Vacuous;
    }
    let m = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let stt: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    if stt == 0.0 {
        return GrowthFit::Vacuous;
    }
    let c2 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum::<f64>() / stt;
    let b = my - c2 * mt;
    let residual = (pts
        .iter()
        .map(|p| (p.1 - b - c2 * p.0).powi(2))
        .sum::<f64>()
        / m)
        .sqrt();
    GrowthFit::Fitted {
        c1: b.exp(),
        c2,
        residual,
        samples: pts.len(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthFits {
    pub err_l: GrowthFit,
    pub err_l1: GrowthFit,
    pub gap: GrowthFit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub spec: ExperimentSpec,
    pub eps: f64,
    pub times: Vec<f64>,
    /// `‖q − φ − e^{tL}g‖₂`
    pub err_l: Vec<f64>,
    /// `‖q − φ − e^{tL₁}g‖₂`
    pub err_l1: Vec<f64>,
    /// `‖e^{tL₁}g − e^{tL}g‖₂`
    pub gap: Vec<f64>,
    pub energy_drift: Vec<f64>,
    pub fits: GrowthFits,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl ExperimentRecord {
    pub fn final_err_l(&self) -> f64 {
        *self.err_l.last().unwrap_or(&0.0)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Writes `record.json` and `series.csv` into `dir`.
    pub fn persist(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("record.json"), self.to_json()?)?;
        let mut w = csv::Writer::from_path(dir.join("series.csv"))?;
        w.write_record(["t", "err_L", "err_L1", "gap", "energy_drift"])?;
        for i in 0..self.times.len() {
            w.serialize((
                self.times[i],
                self.err_l[i],
                self.err_l1[i],
                self.gap[i],
                self.energy_drift[i],
            ))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Fits for all three error series of a record.
pub fn fit_growth(record: &ExperimentRecord) -> GrowthFits {
    fit_growth_with(record, SOLVER_FLOOR)
}

pub fn fit_growth_with(record: &ExperimentRecord, floor: f64) -> GrowthFits {
    let fit = |e: &[f64]| fit_exponential(&record.times, e, record.eps, floor);
    GrowthFits {
        err_l: fit(&record.err_l),
        err_l1: fit(&record.err_l1),
        gap: fit(&record.gap),
    }
}

fn translate(f: &FourierField, shift: f64) -> FourierField {
    f.map_modes(|k, v| v * Complex64::from_polar(1.0, k as f64 * shift))
}

/// Runs one experiment from prepared data `g`.
///
/// A moving wave (`c ≠ 0`) travels as `φ(x + ct)`; it is evolved in the
/// frame where it is stationary (background `φ + c`) and brought back with
/// the Galilean shift, so all comparisons are made in the original frame.
pub fn run_with_data(
    spec: &ExperimentSpec,
    wave: &CnoidalWave,
    g: &FourierField,
    eps: f64,
) -> Result<ExperimentRecord> {
    let cfg = spec.solver;
    let n = cfg.n;
    let c = spec.wave.c;
    let mut q0 = &wave.profile(n) + g;
    q0.set(0, (wave.mean + c).into());
    let moving = evolve_kdv(&q0, &cfg)?;
    let lab = if c == 0.0 {
        moving
    } else {
        galilean_shift(&moving, -c)
    };

    let mut frame = wave.clone();
    frame.mean += c;
    let lin1 = modified_flow(g, &frame, &spec.linear_solver())?;
    if lin1.times.len() != lab.times.len() {
        return Err(Error::invalid(
            "linear and nonlinear flows are sampled at different times",
        ));
    }
    let phi = wave.profile(n);
    let mut rec = ExperimentRecord {
        spec: spec.clone(),
        eps,
        times: lab.times.clone(),
        err_l: Vec::with_capacity(lab.len()),
        err_l1: Vec::with_capacity(lab.len()),
        gap: Vec::with_capacity(lab.len()),
        energy_drift: lab.energy_drift.clone(),
        fits: GrowthFits {
            err_l: GrowthFit::Vacuous,
            err_l1: GrowthFit::Vacuous,
            gap: GrowthFit::Vacuous,
        },
        warnings: lab.warnings.clone(),
    };
    for (i, &t) in lab.times.iter().enumerate() {
        let u = &lab.states[i] - &translate(&phi, c * t);
        let el = translate(&airy_flow(g, t, frame.mean), c * t);
        let el1 = translate(&lin1.states[i], c * t);
        rec.err_l.push((&u - &el).l2_norm());
        rec.err_l1.push((&u - &el1).l2_norm());
        rec.gap.push((&el1 - &el).l2_norm());
    }
    rec.fits = fit_growth(&rec);
    Ok(rec)
}

/// Builds the wave and data of `spec`, runs the experiment and persists the
/// record when `spec.out` is set.
pub fn run_superposition(spec: &ExperimentSpec) -> Result<ExperimentRecord> {
    spec.validate()?;
    let wave = build_cnoidal(spec.wave.a, spec.wave.c, WAVE_TOL)?;
    let (g, eps) = generate_hf_data(spec.n0, spec.s, spec.seed, spec.solver.n)?;
    let rec = run_with_data(spec, &wave, &g, eps)?;
    if let Some(dir) = &spec.out {
        rec.persist(dir)?;
    }
    Ok(rec)
}

/// The experiment matrix and shared settings of a suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    #[serde(default)]
    pub matrix: Matrix,
    #[serde(default)]
    pub wave: WaveParams,
    pub solver: SolverConfig,
    #[serde(default)]
    pub schedule: Schedule,
    #[serde(default)]
    pub thresholds: Thresholds,
}

/// Per-cell time stepping.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schedule {
    /// number of equal sample intervals on `[0, T]`; overrides
    /// `solver.monitor_every`
    pub samples: Option<usize>,
    /// step budget `B`: each cell uses `dt ≤ B / (4N₀)³`, resolving the phases
    /// of the quadratic products of the band
    pub band_budget: Option<f64>,
    /// largest step of the linear flow
    pub linear_dt: Option<f64>,
}

impl Schedule {
    /// Solver configuration for band `N₀` and horizon `T`.
    pub fn solver(&self, base: &SolverConfig, n0: usize, t_end: f64) -> SolverConfig {
        let mut dt = base.dt;
        if let Some(b) = self.band_budget {
            dt = dt.min(b / (4.0 * n0 as f64).powi(3));
        }
        match self.samples {
            Some(m) if m > 0 && t_end > 0.0 => {
                let per = (t_end / (m as f64 * dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
                SolverConfig {
                    t_end,
                    dt: t_end / (m * per) as f64,
                    monitor_every: per,
                    ..*base
                }
            }
            _ => SolverConfig { t_end, dt, ..*base },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Matrix {
    #[serde(default)]
    pub s: Vec<f64>,
    #[serde(default)]
    pub n0: Vec<usize>,
    #[serde(default)]
    pub seeds: Vec<u64>,
    /// horizons; each overrides `solver.t_end`
    #[serde(default)]
    pub t_end: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    /// allowed max/min of `err_L(T)/ε` over cells of equal `(s, T)`
    pub ratio_spread: f64,
    /// allowed relative deviation of per-level fit constants from their mean
    pub fit_stability: f64,
    /// bound on `err_L(0)` and `gap(0)`
    pub initial_tol: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            ratio_spread: 3.0,
            fit_stability: 0.25,
            initial_tol: 1e-12,
        }
    }
}

impl SuiteConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&fs::read_to_string(path)?)
    }

    /// All cells in matrix order (`s`, `N₀`, seed, `T`).
    pub fn cells(&self) -> Vec<ExperimentSpec> {
        let mut out = Vec::new();
        for &s in &self.matrix.s {
            for &n0 in &self.matrix.n0 {
                for &seed in &self.matrix.seeds {
                    for &t_end in &self.matrix.t_end {
                        out.push(ExperimentSpec {
                            s,
                            n0,
                            seed,
                            wave: self.wave,
                            solver: self.schedule.solver(&self.solver, n0, t_end),
                            linear_dt: self.schedule.linear_dt,
                            out: None,
                        });
                    }
                }
            }
        }
        out
    }
}

pub fn cell_name(spec: &ExperimentSpec) -> String {
    format!(
        "s{}-n{:03}-seed{}-T{}",
        spec.s, spec.n0, spec.seed, spec.solver.t_end
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct CellOutcome {
    pub name: String,
    pub spec: ExperimentSpec,
    pub record: Option<ExperimentRecord>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteSummary {
    pub cells: Vec<CellOutcome>,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl SuiteSummary {
    pub fn records(&self) -> impl Iterator<Item = &ExperimentRecord> {
        self.cells.iter().filter_map(|c| c.record.as_ref())
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record([
            "cell", "s", "n0", "seed", "t_end", "eps", "err_L_T", "err_L1_T", "gap_T", "ratio",
            "c1", "c2", "gap_c1", "gap_c2", "status",
        ])?;
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        for c in &self.cells {
            let s = &c.spec;
            let mut row = vec![
                c.name.clone(),
                s.s.to_string(),
                s.n0.to_string(),
                s.seed.to_string(),
                s.solver.t_end.to_string(),
            ];
            match &c.record {
                Some(r) => {
                    let last = |v: &[f64]| v.last().copied().unwrap_or(0.0).to_string();
                    row.extend([
                        r.eps.to_string(),
                        last(&r.err_l),
                        last(&r.err_l1),
                        last(&r.gap),
                        (r.final_err_l() / r.eps).to_string(),
                        opt(r.fits.err_l.prefactor()),
                        opt(r.fits.err_l.rate()),
                        opt(r.fits.gap.prefactor()),
                        opt(r.fits.gap.rate()),
                        "ok".into(),
                    ]);
                }
                None => {
                    row.extend(std::iter::repeat_n(String::new(), 9));
                    row.push(format!("error: {}", c.error.as_deref().unwrap_or("")));
                }
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Largest relative deviation of `xs` from their mean.
pub fn relative_spread(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    xs.iter()
        .map(|x| (x / mean - 1.0).abs())
        .fold(0.0, f64::max)
}

/// Per-`N₀` means of a fitted constant over the records of one `(s, T)` group;
/// `None` if any record lacks a fit.
fn level_means<'a>(
    recs: &[&'a ExperimentRecord],
    pick: impl Fn(&'a ExperimentRecord) -> Option<f64>,
) -> Option<Vec<f64>> {
    let mut levels: Vec<usize> = recs.iter().map(|r| r.spec.n0).collect();
    levels.sort_unstable();
    levels.dedup();
    levels
        .iter()
        .map(|&n0| {
            let vals: Option<Vec<f64>> = recs
                .iter()
                .filter(|r| r.spec.n0 == n0)
                .map(|r| pick(r))
                .collect();
            vals.map(|v| v.iter().sum::<f64>() / v.len() as f64)
        })
        .collect()
}

/// Acceptance checks over completed cells, grouped by `(s, T)`.
pub fn evaluate(cells: &[CellOutcome], th: &Thresholds) -> Vec<Check> {
    let mut checks = Vec::new();
    let failed: Vec<&str> = cells
        .iter()
        .filter(|c| c.error.is_some())
        .map(|c| c.name.as_str())
        .collect();
    checks.push(Check {
        name: "cells completed".into(),
        pass: failed.is_empty(),
        detail: if failed.is_empty() {
            format!("{} cells", cells.len())
        } else {
            format!("failed: {}", failed.join(", "))
        },
    });
    let recs: Vec<&ExperimentRecord> = cells.iter().filter_map(|c| c.record.as_ref()).collect();
    let start = recs
        .iter()
        .map(|r| r.err_l[0].max(r.err_l1[0]).max(r.gap[0]))
        .fold(0.0, f64::max);
    checks.push(Check {
        name: "zero initial error".into(),
        pass: start <= th.initial_tol,
        detail: format!("max at t=0: {start:.3e}"),
    });

    let mut groups: Vec<(f64, f64)> = Vec::new();
    for r in &recs {
        let key = (r.spec.s, r.spec.solver.t_end);
        if !groups.contains(&key) {
            groups.push(key);
        }
    }
    for (s, t) in groups {
        let g: Vec<&ExperimentRecord> = recs
            .iter()
            .copied()
            .filter(|r| r.spec.s == s && r.spec.solver.t_end == t)
            .collect();
        let ratios: Vec<f64> = g.iter().map(|r| r.final_err_l() / r.eps).collect();
        let hi = ratios.iter().copied().fold(f64::MIN, f64::max);
        let lo = ratios.iter().copied().fold(f64::MAX, f64::min);
        checks.push(Check {
            name: format!("err_L(T)/eps spread (s={s}, T={t})"),
            pass: hi / lo <= th.ratio_spread,
            detail: format!(
                "range [{lo:.4}, {hi:.4}], max/min {:.3} (limit {})",
                hi / lo,
                th.ratio_spread
            ),
        });
        let stable = |label: &str, pick: &dyn Fn(&ExperimentRecord) -> Option<f64>| -> Check {
            match level_means(&g, |r| pick(r)) {
                Some(m) => {
                    let spread = relative_spread(&m);
                    Check {
                        name: format!("{label} stability (s={s}, T={t})"),
                        pass: spread <= th.fit_stability,
                        detail: format!(
                            "per-level {m:.4?}, spread {:.1}% (limit {:.0}%)",
                            100.0 * spread,
                            100.0 * th.fit_stability
                        ),
                    }
                }
                None => Check {
                    name: format!("{label} stability (s={s}, T={t})"),
                    pass: false,
                    detail: "fit vacuous in some cell".into(),
                },
            }
        };
        checks.push(stable("err_L rate C2", &|r| r.fits.err_l.rate()));
        checks.push(stable("gap rate C2", &|r| r.fits.gap.rate()));
        checks.push(stable("gap prefactor C1", &|r| r.fits.gap.prefactor()));
    }
    checks
}

/// Runs every cell of `cfg` on a pool of `jobs` workers, isolates per-cell
/// failures, and writes per-cell records plus `summary.csv` and
/// `summary.json` under `out` when given.
pub fn run_suite(cfg: &SuiteConfig, out: Option<&Path>, jobs: usize) -> Result<SuiteSummary> {
    let cells = cfg.cells();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::invalid(e.to_string()))?;
    let outcomes: Vec<CellOutcome> = pool.install(|| {
        cells
            .into_par_iter()
            .map(|mut spec| {
                let name = cell_name(&spec);
                spec.out = out.map(|d| d.join(&name));
                let result = run_superposition(&spec);
                spec.out = None;
                match result {
                    Ok(mut r) => {
                        r.spec.out = None;
                        CellOutcome {
                            name,
                            spec,
                            record: Some(r),
                            error: None,
                        }
                    }
                    Err(e) => CellOutcome {
                        name,
                        spec,
                        record: None,
                        error: Some(e.to_string()),
                    },
                }
            })
            .collect()
    });
    let checks = evaluate(&outcomes, &cfg.thresholds);
    let summary = SuiteSummary {
        pass: checks.iter().all(|c| c.pass),
        cells: outcomes,
        checks,
    };
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        summary.write_csv(&dir.join("summary.csv"))?;
        let verdict = serde_json::json!({ "pass": summary.pass, "checks": summary.checks });
        fs::write(
            dir.join("verdict.json"),
            serde_json::to_string_pretty(&verdict)?,
        )?;
    }
    Ok(summary)
}

/// Convenience for building the `(wave, g, ε)` triple of a spec without
/// running it.
pub fn prepare(spec: &ExperimentSpec) -> Result<(CnoidalWave, FourierField, f64)> {
    spec.validate()?;
    let wave = build_cnoidal(spec.wave.a, spec.wave.c, WAVE_TOL)?;
    let (g, eps) = generate_hf_data(spec.n0, spec.s, spec.seed, spec.solver.n)?;
    Ok((wave, g, eps))
}

/// Trajectory-free summary of a record for quick inspection.
pub fn describe(rec: &ExperimentRecord) -> String {
    format!(
        "{}: eps = {:.4}, err_L(T) = {:.4e}, err_L1(T) = {:.4e}, gap(T) = {:.4e}, err_L(T)/eps = {:.4}",
        cell_name(&rec.spec),
        rec.eps,
        rec.final_err_l(),
        rec.err_l1.last().copied().unwrap_or(0.0),
        rec.gap.last().copied().unwrap_or(0.0),
        rec.final_err_l() / rec.eps
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n0: usize, seed: u64) -> ExperimentSpec {
        ExperimentSpec {
            s: 0.25,
            n0,
            seed,
            wave: WaveParams::default(),
            solver: SolverConfig::new(32, 2e-5, 0.02).with_monitor(100),
            linear_dt: None,
            out: None,
        }
    }

    #[test]
    fn data_is_normalized_and_banded() {
        let (g, eps) = generate_hf_data(8, 0.25, 3, 32).unwrap();
        assert!((g.l2_norm() - 1.0).abs() < 1e-14);
        assert_eq!(g.get(0), Complex64::new(0.0, 0.0));
        for k in 0..=32i64 {
            let inside = (8..=16).contains(&k);
            assert_eq!(g.get(k).norm() > 0.0, inside, "mode {k}");
        }
        assert!(16f64.powf(-0.25) <= eps + 1e-15 && eps <= 8f64.powf(-0.25) + 1e-15);
        assert_eq!(g.hermitian_defect(), 0.0);
    }

    #[test]
    fn data_is_deterministic() {
        let a = generate_hf_data(8, 0.25, 11, 64).unwrap().0;
        let b = generate_hf_data(8, 0.25, 11, 64).unwrap().0;
        let c = generate_hf_data(8, 0.25, 12, 64).unwrap().0;
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn band_violation_is_rejected() {
        assert!(generate_hf_data(20, 0.25, 0, 32).is_err());
        assert!(generate_hf_data(0, 0.25, 0, 32).is_err());
        assert!(generate_hf_data(8, 0.5, 0, 32).is_err());
    }

    #[test]
    fn spec_invariants() {
        assert!(spec(8, 0).validate().is_ok());
        assert!(spec(3, 0).validate().is_err());
        assert!(spec(9, 0).validate().is_err());
        let mut bad = spec(8, 0);
        bad.s = 0.0;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn exact_exponential_is_recovered() {
        let t: Vec<f64> = (0..=10).map(|i| i as f64 * 0.1).collect();
        let eps = 0.3;
        let err: Vec<f64> = t.iter().map(|t| 3.0 * (2.0 * t).exp() * eps).collect();
        match fit_exponential(&t, &err, eps, SOLVER_FLOOR) {
            GrowthFit::Fitted {
                c1,
                c2,
                residual,
                samples,
            } => {
                assert!((c1 - 3.0).abs() < 1e-6);
                assert!((c2 - 2.0).abs() < 1e-6);
                assert!(residual < 1e-12);
                assert_eq!(samples, 11);
            }
            GrowthFit::Vacuous => panic!("expected a fit"),
        }
    }

    #[test]
    fn floor_level_errors_are_vacuous() {
        let t = [0.0, 0.25, 0.5, 0.75, 1.0];
        assert_eq!(
            fit_exponential(&t, &[0.0, 1e-9, 2e-9, 1e-9, 3e-9], 0.5, SOLVER_FLOOR),
            GrowthFit::Vacuous
        );
        assert_eq!(
            fit_exponential(&t[..3], &[1.0, 2.0, 3.0], 0.5, SOLVER_FLOOR),
            GrowthFit::Vacuous
        );
    }

    #[test]
    fn zero_perturbation_gives_vacuous_fit() {
        let s = spec(8, 0);
        let wave = build_cnoidal(8.0, 0.0, WAVE_TOL).unwrap();
        let g = FourierField::zeros(32);
        let rec = run_with_data(&s, &wave, &g, 0.0).unwrap();
        assert!(rec.err_l.iter().all(|&e| e < SOLVER_FLOOR));
        assert_eq!(rec.fits.err_l, GrowthFit::Vacuous);
        assert_eq!(rec.fits.gap, GrowthFit::Vacuous);
    }

    #[test]
    fn record_starts_at_zero_and_is_deterministic() {
        let a = run_superposition(&spec(8, 5)).unwrap();
        let b = run_superposition(&spec(8, 5)).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        assert!(a.err_l[0] < 1e-14 && a.err_l1[0] < 1e-14 && a.gap[0] == 0.0);
        assert!(a
            .err_l
            .iter()
            .chain(&a.err_l1)
            .chain(&a.gap)
            .all(|&e| e >= 0.0));
        assert_eq!(a.times.len(), 11);
    }

    #[test]
    fn moving_wave_matches_stationary_frame() {
        let mut s = spec(8, 2);
        s.wave = WaveParams { a: 8.0, c: 0.5 };
        let rec = run_superposition(&s).unwrap();
        assert!(rec.err_l[0] < 1e-13);
        let wave = build_cnoidal(8.0, 0.5, WAVE_TOL).unwrap();
        let (g, _) = generate_hf_data(8, 0.25, 2, 32).unwrap();
        let mut q0 = &wave.profile(32) + &g;
        q0.set(0, (wave.mean + 0.5).into());
        let direct = evolve_kdv(&q0, &s.solver).unwrap();
        let lab = galilean_shift(&direct, -0.5);
        let t = *lab.times.last().unwrap();
        let expected = (&(lab.last() - &translate(&wave.profile(32), 0.5 * t))
            - &translate(&airy_flow(&g, t, wave.mean + 0.5), 0.5 * t))
            .l2_norm();
        assert!((rec.final_err_l() - expected).abs() < 1e-12);
    }

    #[test]
    fn linear_step_divides_sampling() {
        let mut s = spec(8, 0);
        s.linear_dt = Some(9e-5);
        let lin = s.linear_solver();
        assert_eq!(lin.monitor_every, 25);
        assert!((lin.dt - 8e-5).abs() < 1e-18);
        let a = run_superposition(&spec(8, 4)).unwrap();
        let mut coarse = spec(8, 4);
        coarse.linear_dt = Some(1e-4);
        let b = run_superposition(&coarse).unwrap();
        assert_eq!(a.times, b.times);
        assert_eq!(a.err_l, b.err_l);
        for (x, y) in a.gap.iter().zip(&b.gap) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn schedule_aligns_samples_across_bands() {
        let base = SolverConfig::new(256, 1e-4, 1.0);
        let sch = Schedule {
            samples: Some(20),
            band_budget: Some(4.0),
            linear_dt: None,
        };
        for n0 in [16, 32, 64] {
            let cfg = sch.solver(&base, n0, 1.0);
            assert!(cfg.dt <= 4.0 / (4.0 * n0 as f64).powi(3));
            assert!((cfg.dt * (20 * cfg.monitor_every) as f64 - 1.0).abs() < 1e-12);
        }
        let plain = Schedule::default().solver(&base, 16, 0.5);
        assert_eq!((plain.dt, plain.t_end), (1e-4, 0.5));
    }

    #[test]
    fn empty_suite_succeeds() {
        let cfg = SuiteConfig::from_toml("[solver]\nn = 32\ndt = 1e-4\nt_end = 0.1\n").unwrap();
        let sum = run_suite(&cfg, None, 1).unwrap();
        assert!(sum.cells.is_empty());
        assert!(sum.pass);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = SuiteConfig::from_toml("[solver]\nn = 32\ndt = 1e-4\nt_end = 0.1\ndtt = 3\n");
        assert!(matches!(err, Err(Error::Config(_))));
        let err = SuiteConfig::from_toml(
            "[matrix]\nseed = [1]\n[solver]\nn = 32\ndt = 1e-4\nt_end = 0.1\n",
        );
        assert!(err.is_err());
    }

    #[test]
    fn failing_cell_is_isolated() {
        let text = "[matrix]\ns = [0.25]\nn0 = [4, 20]\nseeds = [1]\nt_end = [0.01]\n[solver]\nn = 32\ndt = 2e-5\nt_end = 0.01\nmonitor_every = 100\n";
        let cfg = SuiteConfig::from_toml(text).unwrap();
        let sum = run_suite(&cfg, None, 2).unwrap();
        assert_eq!(sum.cells.len(), 2);
        assert!(sum.cells[0].record.is_some());
        assert!(sum.cells[1].error.is_some());
        assert!(!sum.pass);
    }
}
