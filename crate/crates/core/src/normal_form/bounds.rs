//! Measured operator norms against explicit constant chains.
//!
//! For every trial `v` each row records the measured norm `M(v)`, the chain
//! value `B(v)` (an explicit product of `ℓ¹`/`ℓ²` norms of `S` and `v`), and
//! the ratio `M(v) / ‖v‖^p_{H^{−s}}`. The row constant `C` bounds
//! `B(v) / ‖v‖^p_{H^{−s}}` uniformly on `‖v‖₂ ≤ 1`, using
//! `‖v/k‖₂ ≤ ‖v‖_{H^{−s}}` and `‖v/k‖₁ ≤ C_s ‖v‖_{H^{−s}}` with
//! `C_s = (Σ_{0<|k|≤N} |k|^{−2(1−s)})^{1/2}`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fourier::FourierField;

use super::context::{Convention, NFContext};
use super::operators::{apply_b, apply_d, apply_e, apply_k, apply_l0, apply_r};
use super::sums::{in_range, in_set};

/// Amplitude law of the random test fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SupportLaw {
    /// all of `1 ≤ k ≤ N`
    FlatBand,
    /// `N/2 < k ≤ N`
    HighBand,
    /// amplitude `∝ k^{−1}` on `1 ≤ k ≤ N`
    PowerLaw,
}

impl SupportLaw {
    pub const ALL: [SupportLaw; 3] = [
        SupportLaw::FlatBand,
        SupportLaw::HighBand,
        SupportLaw::PowerLaw,
    ];
}

/// Mean-zero field with `‖v‖₂ = 1`, independent uniform phases and random
/// amplitudes following `law`.
pub fn random_unit_field(n: usize, law: SupportLaw, seed: u64) -> FourierField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = FourierField::zeros(n);
    for k in 1..=n {
        let w = match law {
            SupportLaw::FlatBand => 1.0,
            SupportLaw::HighBand if 2 * k > n => 1.0,
            SupportLaw::HighBand => 0.0,
            SupportLaw::PowerLaw => 1.0 / k as f64,
        };
        let amp = w * rng.random_range(0.5..1.0);
        let th = rng.random_range(0.0..2.0 * PI);
        f.set(k as i64, Complex64::from_polar(amp, th));
    }
    let norm = f.l2_norm();
    f.scale(1.0 / norm)
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundRow {
    pub name: String,
    /// norm in which the operator is measured: `"l2"` or `"H^-s"`
    pub norm: &'static str,
    /// power of `‖v‖_{H^{−s}}` in the ratio
    pub degree: i32,
    pub max_ratio: f64,
    pub constant: f64,
    /// trials with `M(v) > B(v)`
    pub chain_violations: usize,
    /// `max M(v) / B(v)`
    pub max_chain_fraction: f64,
}

impl BoundRow {
    pub fn holds(&self) -> bool {
        self.chain_violations == 0 && self.max_ratio <= self.constant
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub n: usize,
    pub s: f64,
    pub t: f64,
    pub trials: usize,
    pub seed: u64,
    pub rows: Vec<BoundRow>,
}

impl BoundReport {
    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(BoundRow::holds)
    }

    pub fn row(&self, name: &str) -> Option<&BoundRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "name,norm,degree,max_ratio,constant,chain_violations,max_chain_fraction\n",
        );
        for r in &self.rows {
            out += &format!(
                "{},{},{},{:e},{:e},{},{:e}\n",
                r.name,
                r.norm,
                r.degree,
                r.max_ratio,
                r.constant,
                r.chain_violations,
                r.max_chain_fraction
            );
        }
        out
    }
}

/// Norms of `S` entering the chains.
struct SNorms {
    s_l1: f64,
    s_l2: f64,
    s_over_k_l1: f64,
    s_over_k_l2: f64,
    ks_l1: f64,
    ks_l2: f64,
    k2s_l1: f64,
    psi_s_l1: f64,
    psi_s_over_k_l1: f64,
    s_sq_over_k: f64,
    s_interp: f64,
    inv_k_l2: f64,
    c_s: f64,
    xi: f64,
}

fn inv(k: i64) -> f64 {
    if k == 0 {
        0.0
    } else {
        1.0 / k.abs() as f64
    }
}

/// `Ξ = sup_{k₄} Σ_{k₁,k₂,k₃} |k₁|^{2s} ω²` for the weights of `R₆`.
fn xi(n: i64, s: f64) -> f64 {
    let mut best: f64 = 0.0;
    for k4 in in_range(n) {
        let mut acc = 0.0;
        for k1 in in_range(n) {
            for k2 in in_range(n) {
                for k3 in in_range(n) {
                    let k = k1 + k2 + k3 + k4;
                    let p = k3 + k4;
                    if !in_set(k, n) || !in_set(p, n) {
                        continue;
                    }
                    let mut w = 0.0;
                    if in_set(k1 + k2, n) && k1 + p != 0 && k2 + p != 0 {
                        w += 1.0 / 36.0 / ((k1 + k2) * (k1 + p) * (k2 + p)).abs() as f64;
                    }
                    if k1 + k2 != 0 && k1 + p != 0 && in_set(k2 + p, n) {
                        w += p.abs() as f64
                            / 18.0
                            / (k1 * (k1 + k2) * (k1 + p) * (k2 + p)).abs() as f64;
                    }
                    acc += (k1.abs() as f64).powf(2.0 * s) * w * w;
                }
            }
        }
        best = best.max(acc);
    }
    best
}

impl SNorms {
    fn new(ctx: &NFContext, s: f64) -> Self {
        let sf = ctx.s_field();
        let n = ctx.n() as i64;
        let psi_s = sf.map_modes(|k, c| c * ctx.psi(k));
        let kf = |k: i64| k.abs() as f64;
        Self {
            s_l1: sf.l1_norm(),
            s_l2: sf.l2_norm(),
            s_over_k_l1: sf.weighted_l1(inv),
            s_over_k_l2: sf.weighted_l2(inv),
            ks_l1: sf.weighted_l1(kf),
            ks_l2: sf.weighted_l2(kf),
            k2s_l1: sf.weighted_l1(|k| kf(k) * kf(k)),
            psi_s_l1: psi_s.l1_norm(),
            psi_s_over_k_l1: psi_s.weighted_l1(inv),
            s_sq_over_k: sf.modes().map(|(k, c)| c.norm_sqr() * inv(k)).sum(),
            s_interp: sf.weighted_l1(|k| inv(k).powf(1.0 - s)) * sf.weighted_l1(|k| kf(k).powf(s)),
            inv_k_l2: in_range(n).map(|k| inv(k).powi(2)).sum::<f64>().sqrt(),
            c_s: in_range(n)
                .map(|k| inv(k).powf(2.0 * (1.0 - s)))
                .sum::<f64>()
                .sqrt(),
            xi: xi(n, s),
        }
    }
}

/// One measurement: `(row, measured, chain, degree, constant, norm)`.
type Sample = (&'static str, f64, f64);

struct RowSpec {
    name: &'static str,
    norm: &'static str,
    degree: i32,
    constant: f64,
}

fn hm(f: &FourierField, s: f64) -> f64 {
    f.hom_norm(s)
}

/// Explicit-constant table over `trials` random unit fields at the context
/// time, under `conv`.
pub fn bound_report(
    ctx: &NFContext,
    s: f64,
    trials: usize,
    seed: u64,
    conv: &Convention,
) -> Result<BoundReport> {
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    if !(0.0..1.0).contains(&s) {
        return Err(Error::SobolevRange { s, range: "[0, 1)" });
    }
    let sn = SNorms::new(ctx, s);
    let c = conv.flow_coefficient();
    let third = c.norm() / 3.0;
    let b1c = conv.b1.norm() / 6.0;
    let b2c = conv.b2.norm() / 18.0;
    let l0c = conv.l0.norm() / 3.0;
    let dc = conv.d.norm() * third;
    let e3c = conv.e3.norm() * third;
    let e4c = conv.e4.norm() * third * c.norm();
    let n_s = (ctx.n() as f64).powf(s);
    let w_l2 = 1.0 + 2.0 * sn.s_l2;

    let r_consts = [
        conv.r11.norm() * 0.5,
        conv.r12.norm() / 6.0 * sn.s_l1,
        conv.r13.norm() / 3.0 * sn.s_l2,
        conv.r14.norm() / 3.0 * sn.s_over_k_l2 * sn.ks_l2,
        conv.r2.norm() / 3.0 * sn.psi_s_over_k_l1,
        conv.r3.norm() / 3.0 * sn.c_s * sn.s_l1,
        conv.r4.norm() / 9.0 * sn.psi_s_l1 * sn.c_s,
        conv.r5.norm() * 8.0 / 18.0 * sn.inv_k_l2 * sn.k2s_l1 * sn.c_s * w_l2,
        conv.r6.norm() * sn.xi.sqrt() * w_l2,
    ];
    let specs = [
        RowSpec {
            name: "K",
            norm: "l2",
            degree: 1,
            constant: conv.k.norm() / 3.0 * sn.s_over_k_l1,
        },
        RowSpec {
            name: "B",
            norm: "l2",
            degree: 2,
            constant: b1c * sn.c_s + b2c * (1.5 * sn.c_s * sn.c_s + 4.0 * sn.ks_l1 * sn.c_s),
        },
        RowSpec {
            name: "L0",
            norm: "H^-s",
            degree: 1,
            constant: l0c * 3f64.powf(s) * sn.s_interp,
        },
        RowSpec {
            name: "L0 l2",
            norm: "l2",
            degree: 1,
            constant: l0c * sn.s_over_k_l1 * sn.s_l1 * n_s,
        },
        RowSpec {
            name: "L0 l2 (2/3)",
            norm: "l2",
            degree: 1,
            constant: 2.0 / 3.0 * sn.s_over_k_l1 * sn.s_l1 * n_s,
        },
        RowSpec {
            name: "R",
            norm: "l2",
            degree: 1,
            constant: r_consts.iter().sum(),
        },
        RowSpec {
            name: "D",
            norm: "l2",
            degree: 1,
            constant: 2.0 * dc * sn.s_l1 * sn.s_l1,
        },
        RowSpec {
            name: "D (1/3)",
            norm: "l2",
            degree: 1,
            constant: sn.s_l1 * sn.s_l1 / 3.0,
        },
        RowSpec {
            name: "E",
            norm: "l2",
            degree: 1,
            constant: c.norm()
                * (conv.e1a.norm() * sn.s_l2 * sn.s_l2
                    + conv.e1b.norm() * sn.s_sq_over_k * n_s
                    + conv.e2.norm() * sn.s_over_k_l2 * sn.ks_l2)
                + 4.0 * e3c * sn.psi_s_l1 * sn.s_l1
                + 4.0 * e4c * sn.s_l1.powi(3) * sn.ks_l1,
        },
    ];

    let per_trial: Vec<Result<(f64, Vec<Sample>)>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let law = SupportLaw::ALL[i % 3];
            let v = random_unit_field(ctx.n(), law, seed.wrapping_add(i as u64));
            let vh = hm(&v, s);
            let v2 = v.l2_norm();
            let v_k2 = v.weighted_l2(inv);
            let v_k1 = v.weighted_l1(inv);
            let w2 = (&v + &ctx.s_field().scale(2.0)).l2_norm();

            let k = apply_k(&v, ctx, conv)?;
            let b = apply_b(&v, ctx, conv)?;
            let l0 = apply_l0(&v, ctx, conv)?;
            let r = apply_r(&v, ctx, conv)?;
            let d = apply_d(&v, ctx, conv)?;
            let e = apply_e(&v, ctx, conv)?;

            let b_chain =
                b1c * v_k1 * v_k2 + b2c * (1.5 * v_k1 * v_k1 * v2 + 4.0 * sn.ks_l1 * v_k1 * v_k2);
            let l0_l2 = l0.l2_norm();
            let r_chain = conv.r11.norm() * 0.5 * v2 * v2 * v_k2
                + conv.r12.norm() / 6.0 * sn.s_l1 * v2 * v_k2
                + conv.r13.norm() / 3.0 * v2 * sn.s_l2 * v_k2
                + conv.r14.norm() / 3.0 * sn.s_over_k_l2 * sn.ks_l2 * v_k2
                + conv.r2.norm() / 3.0 * sn.psi_s_over_k_l1 * v_k2
                + conv.r3.norm() / 3.0 * v_k1 * sn.s_l1 * v2
                + conv.r4.norm() / 9.0 * sn.psi_s_l1 * v_k1 * v2
                + conv.r5.norm() * 8.0 / 18.0 * sn.inv_k_l2 * sn.k2s_l1 * v_k1 * w2 * v2
                + conv.r6.norm() * sn.xi.sqrt() * vh * v2 * v2 * w2;
            let e_chain = c.norm()
                * (conv.e1a.norm() * sn.s_l2 * sn.s_l2 * v_k2
                    + conv.e1b.norm() * sn.s_sq_over_k * v2
                    + conv.e2.norm() * sn.s_over_k_l2 * sn.ks_l2 * v_k2)
                + 4.0 * e3c * sn.psi_s_l1 * sn.s_l1 * v_k2
                + 4.0 * e4c * sn.s_l1.powi(3) * sn.ks_l1 * v_k2;
            let samples = vec![
                (
                    "K",
                    k.l2_norm(),
                    conv.k.norm() / 3.0 * sn.s_over_k_l1 * v_k2,
                ),
                ("B", b.total().l2_norm(), b_chain),
                ("L0", hm(&l0, s), l0c * 3f64.powf(s) * sn.s_interp * vh),
                ("L0 l2", l0_l2, l0c * sn.s_over_k_l1 * sn.s_l1 * v2),
                (
                    "L0 l2 (2/3)",
                    l0_l2,
                    2.0 / 3.0 * sn.s_over_k_l1 * sn.s_l1 * v2,
                ),
                ("R", r.total().l2_norm(), r_chain),
                ("D", d.l2_norm(), 2.0 * dc * sn.s_l1 * sn.s_l1 * v_k2),
                ("D (1/3)", d.l2_norm(), sn.s_l1 * sn.s_l1 / 3.0 * v_k2),
                ("E", e.total().l2_norm(), e_chain),
            ];
            Ok((vh, samples))
        })
        .collect();

    let mut rows: Vec<BoundRow> = specs
        .iter()
        .map(|sp| BoundRow {
            name: sp.name.into(),
            norm: sp.norm,
            degree: sp.degree,
            max_ratio: 0.0,
            constant: sp.constant,
            chain_violations: 0,
            max_chain_fraction: 0.0,
        })
        .collect();
    for res in per_trial {
        let (vh, samples) = res?;
        for (row, (_, measured, chain)) in rows.iter_mut().zip(samples) {
            row.max_ratio = row.max_ratio.max(measured / vh.powi(row.degree));
            let frac = if chain > 0.0 { measured / chain } else { 0.0 };
            row.max_chain_fraction = row.max_chain_fraction.max(frac);
            if measured > chain * (1.0 + 1e-12) {
                row.chain_violations += 1;
            }
        }
    }
    Ok(BoundReport {
        n: ctx.n(),
        s,
        t: ctx.t(),
        trials,
        seed,
        rows,
    })
}
