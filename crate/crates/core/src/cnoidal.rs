//! 2π-periodic cnoidal waves.
//!
//! A traveling wave `q = f(x - ct)` of `q_t + q_xxx + q q_x = 0` satisfies,
//! after one integration, the oscillator `f'' + W'(f) = 0` with
//! `W(f) = f³/6 + c f²/2 - a f`. Here `c` is the parameter of that ODE in the
//! integrated form `a - c f = f²/2 + f''`; the profile then propagates as
//! `φ(x + ct)`, so the physical speed is `-c`. All constructions default to
//! the stationary case `c = 0`.
//!
//! Two independent constructions are provided: shooting on the period map
//! ([`build_cnoidal`]) and the Jacobi closed form ([`cnoidal_from_roots`]).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::elliptic::{complete_k, jacobi_sn_cn_dn};
use crate::error::{Error, Result};
use crate::fourier::{FourierField, Grid};

const TWO_PI: f64 = 2.0 * PI;

/// Truncation at which wave coefficients are stored.
pub const WAVE_MODES: usize = 256;
/// Grid on which waves are sampled and certified.
pub const WAVE_SAMPLES: usize = 1024;
/// Shooting step count per 2π of evolution.
pub const SHOOTING_STEPS: usize = 4096;
const TAYLOR_ORDER: usize = 8;

/// Equilibria of the potential and the small-oscillation period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialData {
    /// local maximum of `W` (saddle of the oscillator)
    pub f_minus: f64,
    /// local minimum of `W` (center)
    pub f_plus: f64,
    /// `2π / (c² + 2a)^{1/4}`
    pub t0: f64,
}

/// `W(f)`
pub fn potential(a: f64, c: f64, f: f64) -> f64 {
    f * f * f / 6.0 + c * f * f / 2.0 - a * f
}

/// `W'(f)`
pub fn potential_slope(a: f64, c: f64, f: f64) -> f64 {
    f * f / 2.0 + c * f - a
}

pub fn potential_data(a: f64, c: f64) -> Result<PotentialData> {
    let disc = c * c + 2.0 * a;
    if disc <= 0.0 {
        return Err(Error::NoOscillatoryRegime(disc));
    }
    let r = disc.sqrt();
    Ok(PotentialData {
        f_minus: -r - c,
        f_plus: r - c,
        t0: TWO_PI / r.sqrt(),
    })
}

/// Upper turning point of the separatrix orbit: the other root of
/// `W(f) = W(f_-)`.
pub fn separatrix_top(a: f64, c: f64) -> Result<f64> {
    let p = potential_data(a, c)?;
    // roots of f³ + 3c f² - 6a f - 6E sum to -3c; f_- is a double root
    Ok(-3.0 * c - 2.0 * p.f_minus)
}

/// Real roots `r1 <= r2 <= r3` of `W(f) = W(f0)` for an `f0` inside the well.
/// `2(E - W(f)) = (1/3)(f - r1)(f - r2)(r3 - f)`.
pub fn turning_roots(a: f64, c: f64, f0: f64) -> Result<[f64; 3]> {
    check_in_well(a, c, f0)?;
    // f³ + 3c f² - 6a f - 6E = (f - f0)(f² + p f + q)
    let p = f0 + 3.0 * c;
    let q = -6.0 * a + f0 * p;
    let disc = p * p - 4.0 * q;
    if disc < 0.0 {
        return Err(Error::DivergentOrbit {
            f0,
            lo: f64::NAN,
            hi: f64::NAN,
        });
    }
    let sq = disc.sqrt();
    // stable quadratic roots
    let t = -0.5 * (p + p.signum() * sq);
    let (x1, x2) = if t != 0.0 {
        (t, q / t)
    } else {
        (0.5 * sq, -0.5 * sq)
    };
    let mut r = [f0, x1, x2];
    r.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(r)
}

fn check_in_well(a: f64, c: f64, f0: f64) -> Result<PotentialData> {
    let p = potential_data(a, c)?;
    let top = separatrix_top(a, c)?;
    if !(f0 > p.f_minus && f0 < top) || f0 == p.f_plus {
        return Err(Error::DivergentOrbit {
            f0,
            lo: p.f_minus,
            hi: top,
        });
    }
    Ok(p)
}

/// Scaled Taylor coefficients `X_n = f^{(n)}(t) hⁿ / n!` of the oscillator
/// `f'' = a - c f - f²/2` through `(f, f')`.
fn taylor_step(a: f64, c: f64, f: f64, g: f64, h: f64) -> [f64; TAYLOR_ORDER + 1] {
    let mut x = [0.0; TAYLOR_ORDER + 1];
    x[0] = f;
    x[1] = g * h;
    for n in 0..=TAYLOR_ORDER - 2 {
        let conv: f64 = (0..=n).map(|j| x[j] * x[n - j]).sum();
        let forcing = if n == 0 { a } else { 0.0 };
        x[n + 2] = h * h * (forcing - c * x[n] - 0.5 * conv) / ((n + 1) * (n + 2)) as f64;
    }
    x
}

fn poly(x: &[f64], tau: f64) -> f64 {
    x.iter().rev().fold(0.0, |acc, &c| acc * tau + c)
}

/// `h · f'(t + τh)`
fn poly_slope(x: &[f64], tau: f64) -> f64 {
    x.iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(0.0, |acc, (n, &c)| acc * tau + n as f64 * c)
}

fn poly_curv(x: &[f64], tau: f64) -> f64 {
    x.iter()
        .enumerate()
        .skip(2)
        .rev()
        .fold(0.0, |acc, (n, &c)| acc * tau + (n * (n - 1)) as f64 * c)
}

/// Period of the orbit of `f'' + W'(f) = 0` through the turning point
/// `(f0, 0)`, by fixed-step 8th-order Taylor integration to the opposite
/// turning point (half period) with polynomial event location.
pub fn orbit_period(a: f64, c: f64, f0: f64) -> Result<f64> {
    orbit_period_with_step(a, c, f0, TWO_PI / SHOOTING_STEPS as f64)
}

pub fn orbit_period_with_step(a: f64, c: f64, f0: f64, h: f64) -> Result<f64> {
    let p = check_in_well(a, c, f0)?;
    let max_time = 1e4 * p.t0;
    let (mut f, mut g, mut t) = (f0, 0.0, 0.0);
    // f'' has the sign of -W'(f0); f' leaves zero with that sign
    let leaving = -potential_slope(a, c, f0).signum();
    while t < max_time {
        let x = taylor_step(a, c, f, g, h);
        let g_end = poly_slope(&x, 1.0) / h;
        if g_end * leaving <= 0.0 && t > 0.0 || (t == 0.0 && g_end * leaving < 0.0) {
            // locate f'(τ) = 0 on the step polynomial
            let (mut lo, mut hi) = (0.0, 1.0);
            let mut tau = {
                let s0 = poly_slope(&x, 0.0);
                let s1 = poly_slope(&x, 1.0);
                (s0 / (s0 - s1)).clamp(0.0, 1.0)
            };
            for _ in 0..60 {
                let s = poly_slope(&x, tau);
                if s * leaving > 0.0 {
                    lo = tau;
                } else {
                    hi = tau;
                }
                let d = poly_curv(&x, tau);
                let next = tau - s / d;
                let next = if next > lo && next < hi {
                    next
                } else {
                    0.5 * (lo + hi)
                };
                if (next - tau).abs() < 1e-16 {
                    tau = next;
                    break;
                }
                tau = next;
            }
            return Ok(2.0 * (t + tau * h));
        }
        f = poly(&x, 1.0);
        g = g_end;
        t += h;
    }
    Err(Error::DivergentOrbit {
        f0,
        lo: p.f_minus,
        hi: separatrix_top(a, c)?,
    })
}

/// Period from the energy integral, `T = 4√3 ∫₀^{π/2} dθ / √(f(θ) - r1)` with
/// `f(θ) = r2 + (r3 - r2) sin²θ`, by the trapezoid rule (the integrand is
/// smooth and π-periodic, so convergence is geometric).
pub fn orbit_period_quadrature(a: f64, c: f64, f0: f64) -> Result<f64> {
    let [r1, r2, r3] = turning_roots(a, c, f0)?;
    let n = 4096;
    let h = PI / n as f64;
    let sum: f64 = (0..n)
        .map(|j| {
            let s = (j as f64 * h).sin();
            1.0 / (r2 + (r3 - r2) * s * s - r1).sqrt()
        })
        .sum();
    // ∫₀^{π/2} = half of the full-period trapezoid sum over [0, π)
    Ok(4.0 * 3f64.sqrt() * 0.5 * h * sum)
}

/// Closed-form period `4√3 K(k) / √(r3 - r1)`, `k² = (r3 - r2)/(r3 - r1)`.
pub fn orbit_period_elliptic(a: f64, c: f64, f0: f64) -> Result<f64> {
    let [r1, r2, r3] = turning_roots(a, c, f0)?;
    let k = ((r3 - r2) / (r3 - r1)).sqrt();
    Ok(4.0 * 3f64.sqrt() * complete_k(k)? / (r3 - r1).sqrt())
}

/// A certified 2π-periodic traveling wave.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CnoidalWave {
    /// integration constant of `a - c f = f²/2 + f''`
    pub a: f64,
    /// ODE speed parameter (physical speed is `-c`)
    pub c: f64,
    /// spatial mean `⟨φ⟩`
    pub mean: f64,
    /// mean-zero part `Φ = φ - ⟨φ⟩`
    pub phi: FourierField,
    /// value at the turning point `x = 0`
    pub f0: f64,
    pub roots: Option<[f64; 3]>,
    /// period of the underlying orbit
    pub period: f64,
    /// sup-norm of `a - c φ - φ²/2 - φ''` on the sampling grid
    pub residual: f64,
    /// fitted `|Φ_k| <= A e^{-σ|k|}`
    pub decay: DecayFit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub amplitude: f64,
    pub rate: f64,
    /// largest `k` used in the fit (coefficients above the rounding floor)
    pub k_max: i64,
}

impl CnoidalWave {
    /// `Φ` truncated (or extended) to `N`.
    pub fn phi_at(&self, n: usize) -> FourierField {
        self.phi.resized(n)
    }

    /// Full profile `φ = ⟨φ⟩ + Φ` at truncation `N`.
    pub fn profile(&self, n: usize) -> FourierField {
        let mut f = self.phi_at(n);
        f.set(0, self.mean.into());
        f
    }

    /// Sup-norm of the pre-integration form `f''' + f f' + c f'` evaluated
    /// spectrally on the sampling grid, from the modes above the rounding
    /// floor (`|k| <= decay.k_max`); the floor noise would otherwise be
    /// amplified by `k³`.
    pub fn third_order_residual(&self) -> f64 {
        let prof = self
            .profile(self.decay.k_max.max(1) as usize)
            .resized(WAVE_MODES);
        let grid = Grid::new(WAVE_SAMPLES);
        let f = grid.synthesize(&prof);
        let d1 = grid.synthesize(&prof.derivative());
        let d3 = grid.synthesize(&prof.derivative().derivative().derivative());
        f.iter()
            .zip(&d1)
            .zip(&d3)
            .map(|((f, d1), d3)| (d3.re + f.re * d1.re + self.c * d1.re).abs())
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Sup-norm over the grid of `a - c φ - φ²/2 - φ''`, with `φ''` spectral.
pub fn stationary_residual(a: f64, c: f64, profile: &FourierField, m: usize) -> f64 {
    let grid = Grid::new(m);
    let f = grid.synthesize(profile);
    let d2 = grid.synthesize(&profile.derivative().derivative());
    f.iter()
        .zip(&d2)
        .map(|(f, d2)| (a - c * f.re - 0.5 * f.re * f.re - d2.re).abs())
        .fold(0.0, f64::max)
}

fn fit_decay(phi: &FourierField) -> DecayFit {
    let n = phi.n() as i64;
    let peak = (1..=n).map(|k| phi.get(k).norm()).fold(0.0, f64::max);
    let floor = 1e-13 * peak;
    let pts: Vec<(f64, f64)> = (1..=n)
        .map(|k| (k, phi.get(k).norm()))
        .take_while(|&(_, v)| v > floor)
        .map(|(k, v)| (k as f64, v.ln()))
        .collect();
    if pts.len() < 2 {
        return DecayFit {
            amplitude: peak,
            rate: f64::INFINITY,
            k_max: pts.len() as i64,
        };
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    // lift the line so that it bounds every fitted point
    let lift = pts
        .iter()
        .map(|p| p.1 - (my + slope * (p.0 - mx)))
        .fold(f64::NEG_INFINITY, f64::max);
    DecayFit {
        amplitude: (my - slope * mx + lift).exp(),
        rate: -slope,
        k_max: pts.last().unwrap().0 as i64,
    }
}

/// Samples the orbit through `(f0, 0)` at `x_j = 2πj/M`, `j = 0..M`.
fn sample_orbit(a: f64, c: f64, f0: f64, m: usize) -> Vec<f64> {
    let per_sample = SHOOTING_STEPS.div_ceil(m);
    let h = TWO_PI / (m * per_sample) as f64;
    let (mut f, mut g) = (f0, 0.0);
    let mut out = Vec::with_capacity(m);
    for _ in 0..m {
        out.push(f);
        for _ in 0..per_sample {
            let x = taylor_step(a, c, f, g, h);
            f = poly(&x, 1.0);
            g = poly_slope(&x, 1.0) / h;
        }
    }
    out
}

fn wave_from_samples(
    a: f64,
    c: f64,
    f0: f64,
    period: f64,
    roots: Option<[f64; 3]>,
    samples: &[f64],
) -> Result<CnoidalWave> {
    let full = FourierField::from_grid(samples, WAVE_MODES)?;
    let mean = full.mean();
    let phi = full.without_mean();
    let residual = stationary_residual(a, c, &full, samples.len());
    Ok(CnoidalWave {
        a,
        c,
        mean,
        decay: fit_decay(&phi),
        phi,
        f0,
        roots,
        period,
        residual,
    })
}

/// Shoots for the turning point `f0 ∈ (f_+, separatrix)` whose orbit has
/// period 2π, then samples and certifies the wave.
///
/// The period map is bracketed by bisection down to a width of `1e-3` and
/// then polished by Newton iteration with a central-difference slope until
/// `|T(f0) - 2π| < tol`.
pub fn build_cnoidal(a: f64, c: f64, tol: f64) -> Result<CnoidalWave> {
    let p = potential_data(a, c)?;
    if p.t0 >= TWO_PI {
        return Err(Error::PeriodTooLong { t0: p.t0 });
    }
    let top = separatrix_top(a, c)?;
    let scale = top - p.f_plus;
    let miss = |f0: f64| orbit_period(a, c, f0).map(|t| t - TWO_PI);

    let mut lo = p.f_plus + 1e-9 * scale;
    let mut hi = top - 1e-9 * scale;
    let (m_lo, m_hi) = (miss(lo)?, miss(hi)?);
    if m_lo >= 0.0 || m_hi <= 0.0 {
        return Err(Error::NotBracketed {
            lo: m_lo + TWO_PI,
            hi: m_hi + TWO_PI,
            target: TWO_PI,
        });
    }
    while hi - lo > 1e-3 {
        let mid = 0.5 * (lo + hi);
        if miss(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let mut f0 = 0.5 * (lo + hi);
    let mut err = miss(f0)?;
    for _ in 0..50 {
        if err.abs() < tol {
            break;
        }
        if err < 0.0 {
            lo = f0;
        } else {
            hi = f0;
        }
        let d = 1e-6 * scale;
        let slope = (miss(f0 + d)? - miss(f0 - d)?) / (2.0 * d);
        let mut next = f0 - err / slope;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        f0 = next;
        err = miss(f0)?;
    }
    if err.abs() >= tol {
        return Err(Error::NoConvergence(err));
    }

    let samples = sample_orbit(a, c, f0, WAVE_SAMPLES);
    let roots = turning_roots(a, c, f0).ok();
    wave_from_samples(a, c, f0, err + TWO_PI, roots, &samples)
}

/// Jacobi closed form `φ(z) = β₂ + (β₃ - β₂) cn²(√((β₃ - β₁)/12) z; k)`,
/// `k² = (β₃ - β₂)/(β₃ - β₁)`, sampled on `[0, 2π)`.
///
/// The roots fix the ODE constants: `c = -(β₁ + β₂ + β₃)/3` (so the physical
/// speed is `(β₁ + β₂ + β₃)/3`) and `a = -(β₁β₂ + β₁β₃ + β₂β₃)/6`. The wave is
/// 2π-periodic only if the roots are matched to that period; the residual is
/// certified with analytic derivatives and does not rely on periodicity.
pub fn cnoidal_from_roots(b1: f64, b2: f64, b3: f64) -> Result<CnoidalWave> {
    if !(b1 < b2 && b2 < b3) {
        return Err(Error::UnsortedRoots(b1, b2, b3));
    }
    let k = ((b3 - b2) / (b3 - b1)).sqrt();
    let m = k * k;
    let alpha = ((b3 - b1) / 12.0).sqrt();
    let amp = b3 - b2;
    let c = -(b1 + b2 + b3) / 3.0;
    let a = -(b1 * b2 + b1 * b3 + b2 * b3) / 6.0;

    let mut samples = Vec::with_capacity(WAVE_SAMPLES);
    let mut residual: f64 = 0.0;
    for j in 0..WAVE_SAMPLES {
        let z = TWO_PI * j as f64 / WAVE_SAMPLES as f64;
        let (sn, cn, dn) = jacobi_sn_cn_dn(alpha * z, k)?;
        let f = b2 + amp * cn * cn;
        let f2 = -2.0
            * amp
            * alpha
            * alpha
            * (cn * cn * dn * dn - sn * sn * dn * dn - m * sn * sn * cn * cn);
        residual = residual.max((a - c * f - 0.5 * f * f - f2).abs());
        samples.push(f);
    }
    let period = 2.0 * complete_k(k)? / alpha;
    let full = FourierField::from_grid(&samples, WAVE_MODES)?;
    let phi = full.without_mean();
    Ok(CnoidalWave {
        a,
        c,
        mean: full.mean(),
        decay: fit_decay(&phi),
        phi,
        f0: b3,
        roots: Some([b1, b2, b3]),
        period,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn potential_examples() {
        let p = potential_data(8.0, 0.0).unwrap();
        assert_eq!((p.f_minus, p.f_plus), (-4.0, 4.0));
        assert!((p.t0 - PI).abs() < 1e-15);
        let p = potential_data(0.5, 0.0).unwrap();
        assert!((p.t0 - TWO_PI).abs() < 1e-15);
        assert!(matches!(
            potential_data(-1.0, 1.0),
            Err(Error::NoOscillatoryRegime(_))
        ));
    }

    #[test]
    fn curvature_at_center_by_finite_differences() {
        for (a, c) in [(8.0, 0.0), (1.0, 0.7), (3.0, -1.2)] {
            let p = potential_data(a, c).unwrap();
            let h = 1e-5;
            let w2 = (potential_slope(a, c, p.f_plus + h) - potential_slope(a, c, p.f_plus - h))
                / (2.0 * h);
            assert!((w2 - (c * c + 2.0 * a).sqrt()).abs() < 1e-9);
            assert!(potential_slope(a, c, p.f_plus).abs() < 1e-12);
            assert!(potential_slope(a, c, p.f_minus).abs() < 1e-12);
        }
    }

    #[test]
    fn small_oscillation_limit() {
        let p = potential_data(8.0, 0.0).unwrap();
        let t = orbit_period(8.0, 0.0, p.f_plus + 1e-4).unwrap();
        assert!((t - p.t0).abs() < 1e-3 * p.t0);
    }

    #[test]
    fn period_increases_toward_separatrix() {
        let (a, c) = (8.0, 0.0);
        let p = potential_data(a, c).unwrap();
        let top = separatrix_top(a, c).unwrap();
        let mut last = p.t0;
        for j in 1..40 {
            let f0 = p.f_plus + (top - p.f_plus) * j as f64 / 40.0;
            let t = orbit_period(a, c, f0).unwrap();
            assert!(t > last, "period not increasing at f0 = {f0}");
            last = t;
        }
    }

    #[test]
    fn period_oracles_agree() {
        for (a, c, f0) in [
            (8.0, 0.0, 6.0),
            (8.0, 0.0, 7.5),
            (2.0, 0.5, 2.5),
            (8.0, 0.0, 1.0),
        ] {
            let ode = orbit_period(a, c, f0).unwrap();
            let quad = orbit_period_quadrature(a, c, f0).unwrap();
            let ell = orbit_period_elliptic(a, c, f0).unwrap();
            assert!((ode - quad).abs() < 1e-9, "{a} {c} {f0}: {ode} vs {quad}");
            assert!((ell - quad).abs() < 1e-11);
        }
    }

    #[test]
    fn step_halving_is_consistent() {
        let h = TWO_PI / SHOOTING_STEPS as f64;
        let t1 = orbit_period_with_step(8.0, 0.0, 7.0, h).unwrap();
        let t2 = orbit_period_with_step(8.0, 0.0, 7.0, h / 2.0).unwrap();
        assert!((t1 - t2).abs() < 1e-12);
    }

    #[test]
    fn outside_the_well_diverges() {
        assert!(matches!(
            orbit_period(8.0, 0.0, 8.5),
            Err(Error::DivergentOrbit { .. })
        ));
        assert!(matches!(
            orbit_period(8.0, 0.0, -5.0),
            Err(Error::DivergentOrbit { .. })
        ));
    }

    #[test]
    fn too_shallow_well_is_rejected() {
        assert!(matches!(
            build_cnoidal(0.4, 0.0, 1e-12),
            Err(Error::PeriodTooLong { .. })
        ));
    }

    #[test]
    fn degenerate_amplitude() {
        let w = cnoidal_from_roots(-3.0, 1.0, 1.0 + 1e-6).unwrap();
        assert!(w.phi.l1_norm() < 2e-6);
        assert!((w.mean - 1.0).abs() < 2e-6);
        assert!(matches!(
            cnoidal_from_roots(1.0, 0.0, 2.0),
            Err(Error::UnsortedRoots(..))
        ));
    }

    #[test]
    fn shooting_builds_certified_even_wave() {
        let w = build_cnoidal(8.0, 0.0, 1e-12).unwrap();
        assert!((w.period - TWO_PI).abs() < 1e-12);
        assert!(w.residual < 1e-8, "residual {}", w.residual);
        let worst_im = w.phi.modes().map(|(_, c)| c.im.abs()).fold(0.0, f64::max);
        assert!(worst_im < 1e-10);
        assert!(w.phi.is_mean_zero());
        assert!(w.decay.rate > 0.0);
        for k in 1..=w.decay.k_max {
            let bound = w.decay.amplitude * (-w.decay.rate * k as f64).exp();
            assert!(w.phi.get(k).norm() <= bound * (1.0 + 1e-12));
        }
    }

    #[test]
    fn closed_form_matches_shooting() {
        let w = build_cnoidal(8.0, 0.0, 1e-12).unwrap();
        let [r1, r2, r3] = w.roots.unwrap();
        let z = cnoidal_from_roots(r1, r2, r3).unwrap();
        assert!((z.a - 8.0).abs() < 1e-12 && z.c.abs() < 1e-12);
        assert!(
            z.residual < 1e-8,
            "{:?} {} {}",
            w.roots,
            z.residual,
            w.residual
        );
        assert!((z.period - TWO_PI).abs() < 1e-10);
        let grid = Grid::new(WAVE_SAMPLES);
        let d = grid.synthesize(&(&w.profile(WAVE_MODES) - &z.profile(WAVE_MODES)));
        let sup = d.iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(sup < 1e-8, "sup difference {sup}");
    }

    #[test]
    fn closed_form_residual_is_flat_for_unmatched_roots() {
        let z = cnoidal_from_roots(-2.0, 0.5, 3.0).unwrap();
        assert!(z.residual < 1e-8);
    }

    #[test]
    fn pre_integration_form_vanishes() {
        for a in [1.0, 8.0] {
            let w = build_cnoidal(a, 0.0, 1e-12).unwrap();
            assert!(w.third_order_residual() < 1e-7);
        }
    }
}
