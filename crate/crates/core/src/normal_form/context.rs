use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cnoidal::CnoidalWave;
use crate::error::{Error, Result};
use crate::fourier::FourierField;
use crate::kdv::P_COUPLING;

use super::sums::Modes;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Wave data and evaluation time shared by all operators.
#[derive(Debug, Clone)]
pub struct NFContext {
    phi: FourierField,
    a: f64,
    t: f64,
}

impl NFContext {
    /// `phi` must be mean-zero; its truncation fixes `N`.
    pub fn new(phi: &FourierField, a: f64, t: f64) -> Result<Self> {
        phi.require_mean_zero()?;
        if phi.n() == 0 {
            return Err(Error::invalid("truncation must be at least 1"));
        }
        Ok(Self {
            phi: phi.clone(),
            a,
            t,
        })
    }

    pub fn from_wave(wave: &CnoidalWave, n: usize, t: f64) -> Self {
        Self {
            phi: wave.phi_at(n),
            a: wave.mean,
            t,
        }
    }

    pub fn at_time(&self, t: f64) -> Self {
        Self { t, ..self.clone() }
    }

    pub fn n(&self) -> usize {
        self.phi.n()
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn phi(&self) -> &FourierField {
        &self.phi
    }

    pub fn psi(&self, k: i64) -> f64 {
        let k = k as f64;
        k * k * k - self.a * k
    }

    /// `S_k(t) = Φ_k e^{−iψ(k)t}`.
    pub fn s(&self, k: i64) -> Complex64 {
        self.phi.get(k) * Complex64::from_polar(1.0, -self.psi(k) * self.t)
    }

    /// `∂_t S_k = −iψ(k) S_k`.
    pub fn dt_s(&self, k: i64) -> Complex64 {
        -I * self.psi(k) * self.s(k)
    }

    pub fn s_field(&self) -> FourierField {
        self.phi.map_modes(|k, _| self.s(k))
    }

    pub fn dt_s_field(&self) -> FourierField {
        self.phi.map_modes(|k, _| self.dt_s(k))
    }

    /// `v_k = u_k e^{−iψ(k)t}`.
    pub fn to_v(&self, u: &FourierField) -> FourierField {
        u.map_modes(|k, c| c * Complex64::from_polar(1.0, -self.psi(k) * self.t))
    }

    /// `u_k = v_k e^{iψ(k)t}`.
    pub fn to_u(&self, v: &FourierField) -> FourierField {
        v.map_modes(|k, c| c * Complex64::from_polar(1.0, self.psi(k) * self.t))
    }

    pub(crate) fn check(&self, v: &FourierField) -> Result<()> {
        if v.n() != self.n() {
            return Err(Error::TruncationMismatch(v.n(), self.n()));
        }
        v.require_mean_zero()
    }

    pub(crate) fn s_modes(&self) -> Modes {
        Modes::from_fn(self.n(), |k| self.s(k))
    }

    pub(crate) fn dt_s_modes(&self) -> Modes {
        Modes::from_fn(self.n(), |k| self.dt_s(k))
    }

    /// `e^{iσk³t}` for `|k| ≤ N`.
    pub(crate) fn twist(&self, sigma: f64) -> Modes {
        Modes::from_fn(self.n(), |k| {
            let k = k as f64;
            Complex64::from_polar(1.0, sigma * k * k * k * self.t)
        })
    }
}

/// Which `j` are excluded from the resonant sum in `R_{1,3}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum R13Condition {
    /// `|j| ≠ |k|`
    AbsoluteK,
    /// `|j| ≠ k` (only `j = ±k` with `k > 0` removed)
    SignedK,
}

/// Coefficient multipliers relative to the reference forms documented on
/// each operator, plus the phase sign of the quartic/quintic sums
/// (`−1` for `e^{−iψ̃t}`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Convention {
    pub name: String,
    pub k: Complex64,
    pub b1: Complex64,
    pub b2: Complex64,
    pub l0: Complex64,
    pub r11: Complex64,
    pub r12: Complex64,
    pub r13: Complex64,
    pub r14: Complex64,
    pub r2: Complex64,
    pub r3: Complex64,
    pub r4: Complex64,
    pub r5: Complex64,
    pub r6: Complex64,
    pub quartic_phase: f64,
    pub r13_condition: R13Condition,
    /// `γ` of the resonance-free flow `∂_t v = iγ Σ e S S v / k₁`.
    pub coupling: f64,
    pub d: Complex64,
    pub e1a: Complex64,
    pub e1b: Complex64,
    pub e2: Complex64,
    pub e3: Complex64,
    pub e4: Complex64,
    pub quintic_phase: f64,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

impl Convention {
    /// All multipliers one: the forms obtained by carrying out the
    /// differentiation by parts on the truncated system.
    pub fn derived() -> Self {
        let one = c(1.0);
        Self {
            name: "derived".into(),
            k: one,
            b1: one,
            b2: one,
            l0: one,
            r11: one,
            r12: one,
            r13: one,
            r14: one,
            r2: one,
            r3: one,
            r4: one,
            r5: one,
            r6: one,
            quartic_phase: -1.0,
            r13_condition: R13Condition::AbsoluteK,
            coupling: P_COUPLING,
            d: one,
            e1a: one,
            e1b: one,
            e2: one,
            e3: one,
            e4: one,
            quintic_phase: -1.0,
        }
    }

    /// Coefficients in their printed form, without re-derivation.
    pub fn printed() -> Self {
        let m = Complex64::new(0.0, -1.5);
        Self {
            name: "printed".into(),
            k: c(1.0),
            b1: c(1.0),
            b2: c(-2.0),
            l0: c(2.0),
            r11: c(-2.0),
            r12: c(2.0),
            r13: c(-2.0),
            r14: c(2.0),
            r2: c(-1.0),
            r3: c(2.0),
            r4: c(-2.0),
            r5: c(-2.0),
            r6: c(-2.0),
            quartic_phase: 1.0,
            r13_condition: R13Condition::SignedK,
            coupling: 2.0 / 3.0,
            d: m,
            e1a: c(1.0),
            e1b: c(0.0),
            e2: c(1.0),
            e3: m,
            e4: m,
            quintic_phase: 1.0,
        }
    }

    pub fn with_r13(mut self, cond: R13Condition) -> Self {
        if cond != self.r13_condition {
            self.name = format!("{}/{:?}", self.name, cond);
        }
        self.r13_condition = cond;
        self
    }

    /// `c = iγ`.
    pub(crate) fn flow_coefficient(&self) -> Complex64 {
        Complex64::new(0.0, self.coupling)
    }
}
