//! Truncated Fourier representation of real 2π-periodic functions.
//!
//! A field of truncation `N` stores the coefficients `u_k` for `k = -N..=N`
//! of `u(x) = Σ_k u_k e^{ikx}`. Norms use the plain coefficient convention
//! `‖u‖₂ = (Σ|u_k|²)^{1/2}`; the integral norm on `[0, 2π]` is `√(2π)` times
//! larger.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Sobolev regularity index, range-checked for the context it is used in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SobolevIndex(f64);

impl SobolevIndex {
    /// Index for the high-frequency experiments, `0 < s < 1/2`.
    pub fn theorem(s: f64) -> Result<Self> {
        if s > 0.0 && s < 0.5 {
            Ok(Self(s))
        } else {
            Err(Error::SobolevRange {
                s,
                range: "(0, 1/2)",
            })
        }
    }

    /// Index for semigroup estimates, `-1 <= s <= 1`.
    pub fn semigroup(s: f64) -> Result<Self> {
        if (-1.0..=1.0).contains(&s) {
            Ok(Self(s))
        } else {
            Err(Error::SobolevRange {
                s,
                range: "[-1, 1]",
            })
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SobolevVariant {
    /// weight `(1 + k²)^{-s/2}`
    Inhomogeneous,
    /// weight `|k|^{-s}` over `k ≠ 0`; mean-zero fields only
    Homogeneous,
}

/// Coefficients `u_k`, `|k| <= N`, of a real 2π-periodic function.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierField {
    n: usize,
    coeffs: Vec<Complex64>,
}

impl FourierField {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            coeffs: vec![ZERO; 2 * n + 1],
        }
    }

    /// Builds a field from the non-negative modes `0..=N`; negative modes are
    /// filled in by conjugation and the imaginary part of mode 0 is dropped.
    pub fn from_nonnegative(modes: &[Complex64]) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::invalid("at least mode 0 is required"));
        }
        let n = modes.len() - 1;
        let mut field = Self::zeros(n);
        field.set(0, Complex64::new(modes[0].re, 0.0));
        for (k, &c) in modes.iter().enumerate().skip(1) {
            field.set(k as i64, c);
        }
        Ok(field)
    }

    /// Builds a field from the full coefficient vector ordered `-N..=N`.
    /// Rejects input that is not Hermitian-symmetric to rounding.
    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() % 2 == 0 {
            return Err(Error::invalid(
                "coefficient vector must have odd length 2N+1",
            ));
        }
        let n = coeffs.len() / 2;
        let field = Self { n, coeffs };
        let scale = field.l2_norm().max(1.0);
        if field.hermitian_defect() > 1e-12 * scale {
            return Err(Error::invalid("coefficients are not Hermitian-symmetric"));
        }
        Ok(field)
    }

    /// Wraps a `-N..=N` coefficient vector without the symmetry check, so
    /// that operator outputs keep any asymmetry for inspection.
    pub(crate) fn from_coeffs_unchecked(coeffs: Vec<Complex64>) -> Self {
        debug_assert!(coeffs.len() % 2 == 1);
        Self {
            n: coeffs.len() / 2,
            coeffs,
        }
    }

    /// Single real frequency pair: `u_k = c`, `u_{-k} = conj(c)`.
    pub fn mode(n: usize, k: i64, c: Complex64) -> Self {
        let mut f = Self::zeros(n);
        f.set(k, c);
        f
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Coefficients ordered `-N..=N`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `u_k`, zero outside the truncation.
    #[inline]
    pub fn get(&self, k: i64) -> Complex64 {
        let n = self.n as i64;
        if k.abs() > n {
            ZERO
        } else {
            self.coeffs[(k + n) as usize]
        }
    }

    /// Sets `u_k = c` and `u_{-k} = conj(c)`. Setting mode 0 keeps only the real part.
    pub fn set(&mut self, k: i64, c: Complex64) {
        let n = self.n as i64;
        assert!(k.abs() <= n, "mode {k} outside truncation {n}");
        if k == 0 {
            self.coeffs[n as usize] = Complex64::new(c.re, 0.0);
        } else {
            self.coeffs[(k + n) as usize] = c;
            self.coeffs[(n - k) as usize] = c.conj();
        }
    }

    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let n = self.n as i64;
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (i as i64 - n, c))
    }

    pub fn mean(&self) -> f64 {
        self.get(0).re
    }

    pub fn is_mean_zero(&self) -> bool {
        self.get(0) == ZERO
    }

    pub fn require_mean_zero(&self) -> Result<()> {
        if self.is_mean_zero() {
            Ok(())
        } else {
            Err(Error::NotMeanZero(self.get(0)))
        }
    }

    /// Copy with mode 0 set to zero.
    pub fn without_mean(&self) -> Self {
        let mut out = self.clone();
        out.coeffs[self.n] = ZERO;
        out
    }

    /// Largest `|u_{-k} - conj(u_k)|`, including `|Im u_0|`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.n as i64;
        (0..=n)
            .map(|k| (self.get(-k) - self.get(k).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Re-imposes exact Hermitian symmetry by averaging conjugate pairs.
    pub fn symmetrize(&mut self) {
        let n = self.n as i64;
        for k in 0..=n {
            let c = 0.5 * (self.get(k) + self.get(-k).conj());
            self.set(k, c);
        }
    }

    /// Truncates or zero-extends to a new `N`.
    pub fn resized(&self, n: usize) -> Self {
        let mut out = Self::zeros(n);
        let m = n.min(self.n) as i64;
        for k in -m..=m {
            out.coeffs[(k + n as i64) as usize] = self.get(k);
        }
        out
    }

    /// Applies a per-mode multiplier `m(k)`; the caller keeps `m(-k) = conj(m(k))`.
    pub fn map_modes(&self, m: impl Fn(i64, Complex64) -> Complex64) -> Self {
        let n = self.n as i64;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| m(i as i64 - n, c))
            .collect();
        Self { n: self.n, coeffs }
    }

    pub fn scale(&self, a: f64) -> Self {
        self.map_modes(|_, c| c * a)
    }

    /// `(Σ_k |u_k|²)^{1/2}`
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `(Σ_k w(k)² |u_k|²)^{1/2}`
    pub fn weighted_l2(&self, w: impl Fn(i64) -> f64) -> f64 {
        self.modes()
            .map(|(k, c)| {
                let wk = w(k);
                wk * wk * c.norm_sqr()
            })
            .sum::<f64>()
            .sqrt()
    }

    /// `Σ_k w(k) |u_k|`
    pub fn weighted_l1(&self, w: impl Fn(i64) -> f64) -> f64 {
        self.modes().map(|(k, c)| w(k) * c.norm()).sum()
    }

    pub fn l1_norm(&self) -> f64 {
        self.weighted_l1(|_| 1.0)
    }

    /// Negative-order Sobolev norm `‖u‖_{H^{-s}}`.
    pub fn sobolev_norm(&self, s: f64, variant: SobolevVariant) -> Result<f64> {
        match variant {
            SobolevVariant::Inhomogeneous => {
                Ok(self.weighted_l2(|k| (1.0 + (k * k) as f64).powf(-0.5 * s)))
            }
            SobolevVariant::Homogeneous => {
                self.require_mean_zero()?;
                Ok(self.weighted_l2(|k| {
                    if k == 0 {
                        0.0
                    } else {
                        (k.abs() as f64).powf(-s)
                    }
                }))
            }
        }
    }

    /// Homogeneous `‖u_k / |k|^s‖_{ℓ²}` over `k ≠ 0`, ignoring mode 0.
    pub fn hom_norm(&self, s: f64) -> f64 {
        self.weighted_l2(|k| {
            if k == 0 {
                0.0
            } else {
                (k.abs() as f64).powf(-s)
            }
        })
    }

    /// `Σ_k conj(u_k) w_k`, i.e. `(1/2π)∫ u w dx` for real fields.
    pub fn inner(&self, other: &Self) -> Complex64 {
        let n = self.n.min(other.n) as i64;
        (-n..=n).map(|k| self.get(k).conj() * other.get(k)).sum()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(Error::TruncationMismatch(self.n, other.n))
        }
    }

    /// Truncated convolution `(u*w)_k = Σ_{m+n=k, |m|,|n|<=N} u_n w_m` for `|k| <= N`,
    /// evaluated exactly (no aliasing) on a padded grid.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(padded_product(self, other, self.n))
    }

    /// `u'`, i.e. `ik u_k`.
    pub fn derivative(&self) -> Self {
        self.map_modes(|k, c| c * Complex64::new(0.0, k as f64))
    }

    /// Mean-zero antiderivative: `u_k / (ik)` for `k ≠ 0`, zero mean.
    pub fn antiderivative(&self) -> Result<Self> {
        self.require_mean_zero()?;
        Ok(self.map_modes(|k, c| {
            if k == 0 {
                ZERO
            } else {
                c / Complex64::new(0.0, k as f64)
            }
        }))
    }

    /// Point evaluation `Σ_k u_k e^{ikx}` (real part).
    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = self.get(0).re;
        for k in 1..=self.n as i64 {
            let e = Complex64::from_polar(1.0, k as f64 * x);
            acc += 2.0 * (self.get(k) * e).re;
        }
        acc
    }

    /// Samples at `x_j = 2πj/M`. Requires `M >= 2N + 2`.
    pub fn to_grid(&self, m: usize) -> Result<Vec<f64>> {
        let need = 2 * self.n + 2;
        if m < need {
            return Err(Error::GridTooSmall { m, n: self.n, need });
        }
        let grid = Grid::new(m);
        Ok(grid.synthesize(self).iter().map(|c| c.re).collect())
    }

    /// Inverse of [`to_grid`](Self::to_grid): coefficients `|k| <= N` of the
    /// trigonometric interpolant of real samples on `x_j = 2πj/M`.
    pub fn from_grid(samples: &[f64], n: usize) -> Result<Self> {
        let m = samples.len();
        let need = 2 * n + 2;
        if m < need {
            return Err(Error::GridTooSmall { m, n, need });
        }
        let grid = Grid::new(m);
        let buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Ok(grid.analyze(buf, n))
    }

    pub fn to_record(&self) -> FieldRecord {
        FieldRecord {
            n: self.n,
            mean_zero: self.is_mean_zero(),
            coeffs: (0..=self.n as i64)
                .map(|k| {
                    let c = self.get(k);
                    (k, c.re, c.im)
                })
                .collect(),
        }
    }

    pub fn from_record(rec: &FieldRecord) -> Result<Self> {
        let mut f = Self::zeros(rec.n);
        for &(k, re, im) in &rec.coeffs {
            if k < 0 || k as usize > rec.n {
                return Err(Error::invalid(format!("mode {k} outside 0..={}", rec.n)));
            }
            f.set(k, Complex64::new(re, im));
        }
        if rec.mean_zero && !f.is_mean_zero() {
            return Err(Error::NotMeanZero(f.get(0)));
        }
        Ok(f)
    }
}

/// Serialized form: `[k, re, im]` triples for `k = 0..=N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldRecord {
    pub n: usize,
    pub mean_zero: bool,
    pub coeffs: Vec<(i64, f64, f64)>,
}

impl Serialize for FourierField {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_record().serialize(s)
    }
}

impl<'de> Deserialize<'de> for FourierField {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rec = FieldRecord::deserialize(d)?;
        Self::from_record(&rec).map_err(serde::de::Error::custom)
    }
}

impl Add for &FourierField {
    type Output = FourierField;
    fn add(self, rhs: &FourierField) -> FourierField {
        assert_eq!(self.n, rhs.n, "truncation mismatch");
        FourierField {
            n: self.n,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &FourierField {
    type Output = FourierField;
    fn sub(self, rhs: &FourierField) -> FourierField {
        assert_eq!(self.n, rhs.n, "truncation mismatch");
        FourierField {
            n: self.n,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul<f64> for &FourierField {
    type Output = FourierField;
    fn mul(self, rhs: f64) -> FourierField {
        self.scale(rhs)
    }
}

/// Planned forward/inverse transforms on an `M`-point grid `x_j = 2πj/M`.
#[derive(Clone)]
pub struct Grid {
    m: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Grid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Grid").field("m", &self.m).finish()
    }
}

impl Grid {
    pub fn new(m: usize) -> Self {
        let (forward, inverse) = PLANNER.with(|p| {
            let mut p = p.borrow_mut();
            (p.plan_fft_forward(m), p.plan_fft_inverse(m))
        });
        Self {
            m,
            forward,
            inverse,
        }
    }

    /// Smallest power of two that multiplies two band-`N` fields without
    /// aliasing into `|k| <= N`.
    pub fn padded_for(n: usize) -> Self {
        Self::new((3 * n + 1).next_power_of_two().max(4))
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.m).map(move |j| 2.0 * PI * j as f64 / self.m as f64)
    }

    /// Complex samples `Σ_k u_k e^{ikx_j}`.
    pub fn synthesize(&self, u: &FourierField) -> Vec<Complex64> {
        let m = self.m as i64;
        let mut buf = vec![ZERO; self.m];
        for (k, c) in u.modes() {
            buf[k.rem_euclid(m) as usize] += c;
        }
        self.inverse.process(&mut buf);
        buf
    }

    /// Modes `|k| <= n` of the interpolant of the samples (buffer is consumed).
    pub fn analyze(&self, mut buf: Vec<Complex64>, n: usize) -> FourierField {
        assert_eq!(buf.len(), self.m);
        self.forward.process(&mut buf);
        let m = self.m as i64;
        let scale = 1.0 / self.m as f64;
        let mut out = FourierField::zeros(n);
        for k in -(n as i64)..=n as i64 {
            out.coeffs[(k + n as i64) as usize] = buf[k.rem_euclid(m) as usize] * scale;
        }
        out.symmetrize();
        out
    }

    /// Pointwise product of two fields, projected onto `|k| <= n_out`.
    /// Exact when `M > max(N_u + N_w + n_out)` style aliasing bounds hold.
    pub fn product(&self, u: &FourierField, w: &FourierField, n_out: usize) -> FourierField {
        let a = self.synthesize(u);
        let b = self.synthesize(w);
        let prod: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        self.analyze(prod, n_out)
    }
}

pub(crate) fn padded_product(u: &FourierField, w: &FourierField, n_out: usize) -> FourierField {
    let need = u.n + w.n + n_out + 1;
    Grid::new(need.next_power_of_two().max(4)).product(u, w, n_out)
}
