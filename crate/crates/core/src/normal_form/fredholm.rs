//! `K̃u_k = −Σ_{k₁+k₂=k} Φ_{k₁} u_{k₂} / (3k₁k₂)` as a dense operator on the
//! modes `I`, and the spectrum of `I + K̃` in `H^{−s}`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::fourier::FourierField;

use super::sums::in_range;

fn index(k: i64, n: i64) -> usize {
    if k < 0 {
        (k + n) as usize
    } else {
        (k + n - 1) as usize
    }
}

/// Matrix of `K̃` on `I = {1 ≤ |k| ≤ N}` ordered `−N..−1, 1..N`. `Φ_{k₁}` is
/// read up to `|k₁| ≤ 2N` from `phi` (zero beyond its truncation).
pub fn ktilde_matrix(phi: &FourierField, n: usize) -> DMatrix<Complex64> {
    let ni = n as i64;
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for k in in_range(ni) {
        for k2 in in_range(ni) {
            let k1 = k - k2;
            if k1 != 0 {
                m[(index(k, ni), index(k2, ni))] = -phi.get(k1) / (3 * k1 * k2) as f64;
            }
        }
    }
    m
}

#[derive(Debug, Clone, Serialize)]
pub struct FredholmReport {
    pub n: usize,
    pub s: f64,
    /// smallest singular value of `I + K̃` on `H^{−s}`
    pub sigma_min: f64,
    pub sigma_max: f64,
    /// `‖K̃‖_{H^{−s}→H^{−s}}`
    pub ktilde_norm: f64,
    /// `2‖Φ‖₂`
    pub bound: f64,
}

/// Singular values in the `|k|^{−s}`-weighted basis, where `H^{−s}` is
/// isometric to `ℓ²`: `W(I+K̃)W^{−1}` with `W = diag(|k|^{−s})`.
pub fn fredholm_report(phi: &FourierField, n: usize, s: f64) -> FredholmReport {
    let ni = n as i64;
    let mut kt = ktilde_matrix(phi, n);
    for k in in_range(ni) {
        for k2 in in_range(ni) {
            let w = (k2.abs() as f64 / k.abs() as f64).powf(s);
            kt[(index(k, ni), index(k2, ni))] *= w;
        }
    }
    let knorm = kt.clone().singular_values().max();
    let op = DMatrix::<Complex64>::identity(2 * n, 2 * n) + kt;
    let sv = op.singular_values();
    FredholmReport {
        n,
        s,
        sigma_min: sv.min(),
        sigma_max: sv.max(),
        ktilde_norm: knorm,
        bound: 2.0 * phi.l2_norm(),
    }
}
