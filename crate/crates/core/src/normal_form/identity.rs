//! Finite-difference checks of the two differentiation-by-parts identities
//! along computed trajectories. Each sample is re-integrated locally over
//! `±h`, so the probe step is independent of the trajectory's sampling.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::FourierField;
use crate::kdv::{kdv_propagate, l1_propagate, Dealias, Trajectory};

use super::context::{Convention, NFContext};
use super::operators::{apply_b, apply_d, apply_e, apply_k, apply_l0, apply_r};

/// Default largest substep of the local re-integration.
pub const PROBE_SUBSTEP: f64 = 2.5e-7;

/// Residual of one identity at every trajectory sample.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub dt_probe: f64,
    pub times: Vec<f64>,
    /// `‖FD − rhs‖₂ / ‖rhs‖₂` (zero when both sides vanish)
    pub residuals: Vec<f64>,
    pub abs_residuals: Vec<f64>,
    pub rhs_norms: Vec<f64>,
}

impl IdentityReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, &r| m.max(r))
    }
}

/// Least-squares slope of `log r` against `log h`.
pub fn fit_order(h: &[f64], r: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = h
        .iter()
        .zip(r)
        .filter(|(_, &r)| r > 0.0)
        .map(|(&h, &r)| (h.ln(), r.ln()))
        .collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn check_probe(traj: &Trajectory, ctx: &NFContext, dt_probe: f64) -> Result<()> {
    if traj.is_empty() {
        return Err(Error::invalid("empty trajectory"));
    }
    if !(dt_probe > 0.0 && dt_probe.is_finite()) {
        return Err(Error::invalid("dt_probe must be positive"));
    }
    if let Some(q) = traj.states.iter().find(|q| q.n() != ctx.n()) {
        return Err(Error::TruncationMismatch(q.n(), ctx.n()));
    }
    let min_gap = traj
        .times
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    if 2.0 * dt_probe > min_gap {
        return Err(Error::invalid(format!(
            "trajectory too coarse for dt_probe = {dt_probe}: samples {min_gap} apart need 2·dt_probe below the spacing"
        )));
    }
    Ok(())
}

fn substeps(h: f64, max_sub: f64) -> usize {
    (h / max_sub).ceil().max(1.0) as usize
}

fn residual(fd: &FourierField, rhs: &FourierField) -> (f64, f64, f64) {
    let abs = (fd - rhs).l2_norm();
    let norm = rhs.l2_norm();
    let rel = if norm > 0.0 {
        abs / norm
    } else if abs == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    (rel, abs, norm)
}

fn run(
    traj: &Trajectory,
    h: f64,
    mut probe: impl FnMut(&FourierField, f64) -> Result<(FourierField, FourierField)>,
) -> Result<IdentityReport> {
    let mut rep = IdentityReport {
        dt_probe: h,
        times: Vec::new(),
        residuals: Vec::new(),
        abs_residuals: Vec::new(),
        rhs_norms: Vec::new(),
    };
    for (&t, q) in traj.times.iter().zip(&traj.states) {
        let (fd, rhs) = probe(q, t)?;
        let (rel, abs, norm) = residual(&fd, &rhs);
        rep.times.push(t);
        rep.residuals.push(rel);
        rep.abs_residuals.push(abs);
        rep.rhs_norms.push(norm);
    }
    Ok(rep)
}

/// `v + K(v) + B(v)` at time `t` from the perturbation `u`.
fn dbp_lhs(u: &FourierField, ctx: &NFContext, t: f64, conv: &Convention) -> Result<FourierField> {
    let c = ctx.at_time(t);
    let v = c.to_v(u);
    let k = apply_k(&v, &c, conv)?;
    let b = apply_b(&v, &c, conv)?.total();
    Ok(&(&v + &k) + &b)
}

fn fd(plus: &FourierField, minus: &FourierField, h: f64) -> FourierField {
    (plus - minus).map_modes(|_, c| c / (2.0 * h))
}

/// Checks `∂ₜ[v + K + B] = L₀ + 𝓡` by central differences along a full KdV
/// trajectory `q = φ + u`, re-integrating each sample over `±dt_probe`.
pub fn verify_dbp_identity(
    traj: &Trajectory,
    ctx: &NFContext,
    dt_probe: f64,
    conv: &Convention,
) -> Result<IdentityReport> {
    verify_dbp_identity_at(traj, ctx, dt_probe, conv, PROBE_SUBSTEP)
}

pub fn verify_dbp_identity_at(
    traj: &Trajectory,
    ctx: &NFContext,
    h: f64,
    conv: &Convention,
    max_sub: f64,
) -> Result<IdentityReport> {
    check_probe(traj, ctx, h)?;
    let phi = ctx.phi().clone();
    let a = ctx.a();
    let strip = |q: &FourierField| -> Result<FourierField> {
        if (q.mean() - a).abs() > 1e-10 * a.abs().max(1.0) {
            return Err(Error::invalid("trajectory mean differs from the wave mean"));
        }
        Ok(q.map_modes(|k, c| {
            if k == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                c - phi.get(k)
            }
        }))
    };
    let m = substeps(h, max_sub);
    run(traj, h, |q, t| {
        let qp = kdv_propagate(q, h, m, Dealias::Pad32)?;
        let qm = kdv_propagate(q, -h, m, Dealias::Pad32)?;
        let lhs_p = dbp_lhs(&strip(&qp)?, ctx, t + h, conv)?;
        let lhs_m = dbp_lhs(&strip(&qm)?, ctx, t - h, conv)?;
        let c = ctx.at_time(t);
        let v = c.to_v(&strip(q)?);
        let rhs = &apply_l0(&v, &c, conv)? + &apply_r(&v, &c, conv)?.total();
        Ok((fd(&lhs_p, &lhs_m, h), rhs))
    })
}

/// Checks `∂ₜ(v + D(v)) = E(v)` along a trajectory of `u_t = Lu + Pu` with
/// coupling `conv.coupling`.
pub fn verify_d_identity(
    traj: &Trajectory,
    ctx: &NFContext,
    dt_probe: f64,
    conv: &Convention,
) -> Result<IdentityReport> {
    verify_d_identity_at(traj, ctx, dt_probe, conv, PROBE_SUBSTEP)
}

pub fn verify_d_identity_at(
    traj: &Trajectory,
    ctx: &NFContext,
    h: f64,
    conv: &Convention,
    max_sub: f64,
) -> Result<IdentityReport> {
    check_probe(traj, ctx, h)?;
    let (phi, a, gamma) = (ctx.phi().clone(), ctx.a(), conv.coupling);
    let m = substeps(h, max_sub);
    let lhs = |u: &FourierField, t: f64| -> Result<FourierField> {
        let c = ctx.at_time(t);
        let v = c.to_v(u);
        Ok(&v + &apply_d(&v, &c, conv)?)
    };
    run(traj, h, |u, t| {
        let up = l1_propagate(u, &phi, a, gamma, h, m)?;
        let um = l1_propagate(u, &phi, a, gamma, -h, m)?;
        let c = ctx.at_time(t);
        let v = c.to_v(u);
        let rhs = apply_e(&v, &c, conv)?.total();
        Ok((fd(&lhs(&up, t + h)?, &lhs(&um, t - h)?, h), rhs))
    })
}
