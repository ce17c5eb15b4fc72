//! Closed-form operators. Reference forms (multiplier one), with all indices
//! in `I`, `Π = (k₁+k₂)(k₂+k₃)(k₃+k₁)`, `e₂ = e^{−3ikk₁k₂t}`, `e₃ = e^{−3iΠt}`:
//!
//! ```text
//! K   = −1/3  Σ e₂ S₁v₂ / (k₁k₂)
//! B₁  = −1/6  Σ e₂ v₁v₂ / (k₁k₂)
//! B₂  =  1/18 Σ' e₃ (v₁+S₁)v₂v₃ / (k₁Π)        k₁+k₂ ≠ 0, k₁+k₃ ≠ 0, k₂+k₃ ∈ I
//! L₀  =  i/3  Σ e₃ S₁S₂v₃ / k₁                 |k₂+k₃| ≤ N
//! R₂  = −1/3  Σ e₂ ∂ₜS₁ v₂ / (k₁k₂)
//! R₃  =  i/3  Σ e₃ v₁S₂v₃ / k₁                 k₂+k₃ ∈ I
//! R₄  =  1/18 Σ' e₃ ∂ₜS₁ v₂v₃ / (k₁Π)
//! ```
//!
//! and the resonant and quartic terms documented on [`RTerms`].

use num_complex::Complex64;

use crate::error::Result;
use crate::fourier::FourierField;

use super::context::{Convention, NFContext, R13Condition};
use super::sums::{in_range, in_set, pair_sums, sum2, sum3, Modes, ZERO};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Untwisted and twisted inputs at one time.
pub(crate) struct Frame {
    pub n: i64,
    pub v: Modes,
    pub s: Modes,
    /// `e^{ik³t}`
    pub tw: Modes,
    pub vt: Modes,
    pub st: Modes,
    pub dst: Modes,
}

impl Frame {
    pub fn new(v: &FourierField, ctx: &NFContext) -> Result<Self> {
        ctx.check(v)?;
        let v = Modes::from_field(v);
        let s = ctx.s_modes();
        let ds = ctx.dt_s_modes();
        let tw = ctx.twist(1.0);
        Ok(Self {
            n: ctx.n() as i64,
            vt: &v * &tw,
            st: &s * &tw,
            dst: &ds * &tw,
            v,
            s,
            tw,
        })
    }

    /// Multiplies mode `k` by `e^{−ik³t}`.
    pub fn untwist(&self, m: Modes) -> Modes {
        m.zip(&self.tw, |a, t| a * t.conj())
    }

    /// `(input twist, output twist)` for a quartic/quintic phase sign `σ`:
    /// `e^{iσψ̃t} = e^{iσk³t} Π e^{−iσk_j³t}`.
    pub fn twist_for(&self, sigma: f64) -> (Modes, Modes) {
        let conj = self.tw.zip(&self.tw, |a, _| a.conj());
        if sigma < 0.0 {
            (self.tw.clone(), conj)
        } else {
            (conj, self.tw.clone())
        }
    }
}

fn pi3(k1: i64, k2: i64, k3: i64) -> i64 {
    (k1 + k2) * (k2 + k3) * (k3 + k1)
}

pub(crate) fn k_raw(f: &Frame) -> Modes {
    let m = sum2(f.n, |k1, k2| f.st.at(k1) * f.vt.at(k2) / (k1 * k2) as f64);
    f.untwist(m).scale(re(-1.0 / 3.0))
}

pub(crate) fn b1_raw(f: &Frame) -> Modes {
    let m = sum2(f.n, |k1, k2| f.vt.at(k1) * f.vt.at(k2) / (k1 * k2) as f64);
    f.untwist(m).scale(re(-1.0 / 6.0))
}

/// `Σ' x₁ v₂ v₃ / (k₁Π)` over the nonresonant set of `B₂` and `R₄`.
fn nr_cubic(f: &Frame, x: &Modes) -> Modes {
    let n = f.n;
    let m = sum3(n, |k1, k2, k3| {
        if k1 + k2 == 0 || k1 + k3 == 0 || !in_set(k2 + k3, n) {
            return ZERO;
        }
        x.at(k1) * f.vt.at(k2) * f.vt.at(k3) / (k1 * pi3(k1, k2, k3)) as f64
    });
    f.untwist(m)
}

pub(crate) fn b2_raw(f: &Frame) -> Modes {
    let x = &f.vt + &f.st;
    nr_cubic(f, &x).scale(re(1.0 / 18.0))
}

/// `Σ_{|k₂+k₃|≤N} x₁ y₂ z₃ / k₁`, untwisted.
fn cubic_over_k1(f: &Frame, x: &Modes, y: &Modes, z: &Modes, allow_zero_pair: bool) -> Modes {
    let n = f.n;
    let m = sum3(n, |k1, k2, k3| {
        let p = k2 + k3;
        if p.abs() > n || (p == 0 && !allow_zero_pair) {
            return ZERO;
        }
        x.at(k1) * y.at(k2) * z.at(k3) / k1 as f64
    });
    f.untwist(m)
}

pub(crate) fn l0_raw(f: &Frame) -> Modes {
    cubic_over_k1(f, &f.st, &f.st, &f.vt, true).scale(I / 3.0)
}

/// Resonant pieces of the cubic terms.
pub(crate) fn r1_raw(f: &Frame, cond: R13Condition) -> [Modes; 4] {
    let n = f.n;
    let (v, s) = (&f.v, &f.s);
    let mut r11 = Modes::zeros(n as usize);
    let mut r12 = Modes::zeros(n as usize);
    let mut r13 = Modes::zeros(n as usize);
    let mut r14 = Modes::zeros(n as usize);
    let full: Complex64 = in_range(n).map(|j| s.at(j) * v.at(-j)).sum();
    for k in in_range(n) {
        let kf = k as f64;
        let diag = (2 * k).abs() <= n;
        let mut vv = ZERO;
        let mut sv = ZERO;
        for j in in_range(n) {
            if !in_set(k - j, n) {
                continue;
            }
            if j.abs() != k.abs() {
                vv += v.at(j).norm_sqr() / j as f64;
            }
            let keep = match cond {
                R13Condition::AbsoluteK => j.abs() != k.abs(),
                R13Condition::SignedK => j.abs() != k,
            };
            if keep {
                sv += s.at(j) * v.at(-j) / j as f64;
            }
        }
        let vk = v.at(k);
        let mut a = 2.0 * vk * vv;
        if diag {
            a -= vk.norm_sqr() * vk / kf;
            r12.set(k, -I / 6.0 * s.at(-k) * vk * vk / kf);
        }
        r11.set(k, I / 6.0 * a);
        r13.set(k, I / 3.0 * vk * sv);
        r14.set(k, -I / 3.0 * s.at(k) / kf * full);
    }
    [r11, r12, r13, r14]
}

pub(crate) fn r2_raw(f: &Frame) -> Modes {
    let m = sum2(f.n, |k1, k2| f.dst.at(k1) * f.vt.at(k2) / (k1 * k2) as f64);
    f.untwist(m).scale(re(-1.0 / 3.0))
}

pub(crate) fn r3_raw(f: &Frame) -> Modes {
    cubic_over_k1(f, &f.vt, &f.st, &f.vt, false).scale(I / 3.0)
}

pub(crate) fn r4_raw(f: &Frame) -> Modes {
    nr_cubic(f, &f.dst).scale(re(1.0 / 18.0))
}

/// `(R₅, R₆)` with quartic phase sign `sigma`.
pub(crate) fn quartic_raw(f: &Frame, sigma: f64) -> (Modes, Modes) {
    let n = f.n;
    let (tin, tout) = f.twist_for(sigma);
    let v = &f.v * &tin;
    let s = &f.s * &tin;
    let w = &v + &s.scale(re(2.0));
    let wp = pair_sums(&w, &v);
    let r5 = sum3(n, |k1, k2, p| {
        if k1 + k2 == 0 || k1 + p == 0 || !in_set(k2 + p, n) {
            return ZERO;
        }
        let den = (k1 * (k1 + k2) * (k2 + p) * (k1 + p)) as f64;
        s.at(k1) * v.at(k2) * wp.at(p) * (p as f64 / den)
    });
    let r6 = sum3(n, |k1, k2, p| {
        let vvw = v.at(k1) * v.at(k2) * wp.at(p);
        let mut acc = ZERO;
        if in_set(k1 + k2, n) && k1 + p != 0 && k2 + p != 0 {
            acc += vvw * (-1.0 / 36.0 / ((k1 + k2) * (k1 + p) * (k2 + p)) as f64);
        }
        if k1 + k2 != 0 && k1 + p != 0 && in_set(k2 + p, n) {
            let den = (k1 * (k1 + k2) * (k1 + p) * (k2 + p)) as f64;
            acc += vvw * (-(p as f64) / 18.0 / den);
        }
        acc
    });
    let r5 = (&r5 * &tout).scale(-I / 18.0);
    let r6 = (&r6 * &tout).scale(I);
    (r5, r6)
}

/// `K(v)`.
pub fn apply_k(v: &FourierField, ctx: &NFContext, conv: &Convention) -> Result<FourierField> {
    let f = Frame::new(v, ctx)?;
    Ok(k_raw(&f).scale(conv.k).to_field())
}

/// The two parts of `B(v)`.
#[derive(Debug, Clone)]
pub struct BTerms {
    pub b1: FourierField,
    pub b2: FourierField,
}

impl BTerms {
    pub fn total(&self) -> FourierField {
        &self.b1 + &self.b2
    }
}

pub fn apply_b(v: &FourierField, ctx: &NFContext, conv: &Convention) -> Result<BTerms> {
    let f = Frame::new(v, ctx)?;
    Ok(BTerms {
        b1: b1_raw(&f).scale(conv.b1).to_field(),
        b2: b2_raw(&f).scale(conv.b2).to_field(),
    })
}

pub fn apply_l0(v: &FourierField, ctx: &NFContext, conv: &Convention) -> Result<FourierField> {
    let f = Frame::new(v, ctx)?;
    Ok(l0_raw(&f).scale(conv.l0).to_field())
}

/// Components of `𝓡(v)`. Reference forms:
///
/// ```text
/// R₁₁ = i/6 [ −[|2k|≤N] |v_k|² v_k / k + 2 v_k Σ_{|j|≠|k|, k−j∈I} |v_j|² / j ]
/// R₁₂ = −i/6 [|2k|≤N] S_{−k} v_k² / k
/// R₁₃ = i/3 v_k Σ_{j∉{±k}, k−j∈I} S_j v_{−j} / j
/// R₁₄ = −i/3 (S_k / k) Σ_j S_j v_{−j}
/// R₅  = −i/18 Σ_b e^{−iψ̃t} (k₃+k₄) S₁v₂(v₃+2S₃)v₄ / (k₁(k₁+k₂)(k₂+k₃+k₄)(k₁+k₃+k₄))
/// R₆  = −i/36 Σ_a e^{−iψ̃t} v₁v₂(v₃+2S₃)v₄ / ((k₁+k₂)(k₁+k₃+k₄)(k₂+k₃+k₄))
///       −i/18 Σ_b e^{−iψ̃t} (k₃+k₄) v₁v₂(v₃+2S₃)v₄ / (k₁(k₁+k₂)(k₁+k₃+k₄)(k₂+k₃+k₄))
/// ```
///
/// `Σ_b`: `k₁+k₂ ≠ 0`, `k₁+k₃+k₄ ≠ 0`, `k₂+k₃+k₄ ∈ I`, `k₃+k₄ ∈ I`;
/// `Σ_a`: `k₁+k₂ ∈ I`, `k₃+k₄ ∈ I`, `k₁+k₃+k₄ ≠ 0`, `k₂+k₃+k₄ ≠ 0`.
/// The sums over `j` containing `|v_j|²` and `S_j v_{−j}` would cancel in
/// pairs without truncation; only the unpaired `j` survive.
#[derive(Debug, Clone)]
pub struct RTerms {
    pub r11: FourierField,
    pub r12: FourierField,
    pub r13: FourierField,
    pub r14: FourierField,
    pub r2: FourierField,
    pub r3: FourierField,
    pub r4: FourierField,
    pub r5: FourierField,
    pub r6: FourierField,
}

impl RTerms {
    pub fn r1(&self) -> FourierField {
        &(&self.r11 + &self.r12) + &(&self.r13 + &self.r14)
    }

    pub fn total(&self) -> FourierField {
        let mut t = self.r1();
        for r in [&self.r2, &self.r3, &self.r4, &self.r5, &self.r6] {
            t = &t + r;
        }
        t
    }

    pub fn named(&self) -> [(&'static str, &FourierField); 9] {
        [
            ("R11", &self.r11),
            ("R12", &self.r12),
            ("R13", &self.r13),
            ("R14", &self.r14),
            ("R2", &self.r2),
            ("R3", &self.r3),
            ("R4", &self.r4),
            ("R5", &self.r5),
            ("R6", &self.r6),
        ]
    }
}

pub fn apply_r(v: &FourierField, ctx: &NFContext, conv: &Convention) -> Result<RTerms> {
    let f = Frame::new(v, ctx)?;
    let [r11, r12, r13, r14] = r1_raw(&f, conv.r13_condition);
    let (r5, r6) = quartic_raw(&f, conv.quartic_phase);
    Ok(RTerms {
        r11: r11.scale(conv.r11).to_field(),
        r12: r12.scale(conv.r12).to_field(),
        r13: r13.scale(conv.r13).to_field(),
        r14: r14.scale(conv.r14).to_field(),
        r2: r2_raw(&f).scale(conv.r2).to_field(),
        r3: r3_raw(&f).scale(conv.r3).to_field(),
        r4: r4_raw(&f).scale(conv.r4).to_field(),
        r5: r5.scale(conv.r5).to_field(),
        r6: r6.scale(conv.r6).to_field(),
    })
}

/// `Σ*` of the resonance-free flow: `|k₂+k₃| ≤ N`, `Π ≠ 0`.
fn star_sum(f: &Frame, g: impl Fn(i64, i64, i64) -> Complex64) -> Modes {
    let n = f.n;
    sum3(n, |k1, k2, k3| {
        let p = pi3(k1, k2, k3);
        if (k2 + k3).abs() > n || p == 0 {
            return ZERO;
        }
        g(k1, k2, k3) / (k1 * p) as f64
    })
}

/// `D(v) = −(ic/3) Σ* e₃ S₁S₂v₃ / (k₁Π)`, `c = iγ`.
pub fn apply_d(v: &FourierField, ctx: &NFContext, conv: &Convention) -> Result<FourierField> {
    let f = Frame::new(v, ctx)?;
    let c = conv.flow_coefficient();
    let m = star_sum(&f, |k1, k2, k3| f.st.at(k1) * f.st.at(k2) * f.vt.at(k3));
    Ok(f.untwist(m).scale(-I * c / 3.0 * conv.d).to_field())
}

/// Components of `E(v)` for the resonance-free flow `∂ₜv = c Σ e₃ S₁S₂v₃/k₁`:
///
/// ```text
/// E₁ₐ = c S_k Σ_{j≠k, |k−j|≤N} S_j v_{−j} / j
/// E₁ᵦ = c v_k Σ_{|j|≠|k|, |k−j|≤N} S_j S_{−j} / j
/// E₂  = c (S_k / k) Σ_j S_j v_{−j}
/// E₃  = −(ic/3) Σ* e₃ ∂ₜ(S₁S₂) v₃ / (k₁Π)
/// E₄  = −(ic/3) c Σ* e^{−iψ̃t} S₁S₂S_aS_b v_d / (k₁ a Π),  k₃ = a+b+d, |b+d| ≤ N
/// ```
#[derive(Debug, Clone)]
pub struct ETerms {
    pub e1a: FourierField,
    pub e1b: FourierField,
    pub e2: FourierField,
    pub e3: FourierField,
    pub e4: FourierField,
}

impl ETerms {
    pub fn total(&self) -> FourierField {
        let mut t = &self.e1a + &self.e1b;
        for e in [&self.e2, &self.e3, &self.e4] {
            t = &t + e;
        }
        t
    }

    pub fn named(&self) -> [(&'static str, &FourierField); 5] {
        [
            ("E1a", &self.e1a),
            ("E1b", &self.e1b),
            ("E2", &self.e2),
            ("E3", &self.e3),
            ("E4", &self.e4),
        ]
    }
}

pub fn apply_e(v: &FourierField, ctx: &NFContext, conv: &Convention) -> Result<ETerms> {
    let f = Frame::new(v, ctx)?;
    let n = f.n;
    let c = conv.flow_coefficient();
    let (v_, s) = (&f.v, &f.s);
    let mut e1a = Modes::zeros(n as usize);
    let mut e1b = Modes::zeros(n as usize);
    let mut e2 = Modes::zeros(n as usize);
    let full: Complex64 = in_range(n).map(|j| s.at(j) * v_.at(-j)).sum();
    for k in in_range(n) {
        let mut a = ZERO;
        let mut b = ZERO;
        for j in in_range(n) {
            if (k - j).abs() > n {
                continue;
            }
            if j != k {
                a += s.at(j) * v_.at(-j) / j as f64;
            }
            if j.abs() != k.abs() {
                b += s.at(j) * s.at(-j) / j as f64;
            }
        }
        e1a.set(k, c * s.at(k) * a);
        e1b.set(k, c * v_.at(k) * b);
        e2.set(k, c * s.at(k) / k as f64 * full);
    }
    let pre = -I * c / 3.0;
    let e3 = star_sum(&f, |k1, k2, k3| {
        (f.dst.at(k1) * f.st.at(k2) + f.st.at(k1) * f.dst.at(k2)) * f.vt.at(k3)
    });
    let e3 = f.untwist(e3).scale(pre);

    let (tin, tout) = f.twist_for(conv.quintic_phase);
    let st = s * &tin;
    let vt = v_ * &tin;
    let z = sum3(n, |a, b, d| {
        if (b + d).abs() > n {
            return ZERO;
        }
        st.at(a) * st.at(b) * vt.at(d) / a as f64
    });
    let e4 = star_sum(&f, |k1, k2, k3| st.at(k1) * st.at(k2) * z.at(k3));
    let e4 = (&e4 * &tout).scale(pre * c);

    Ok(ETerms {
        e1a: e1a.scale(conv.e1a).to_field(),
        e1b: e1b.scale(conv.e1b).to_field(),
        e2: e2.scale(conv.e2).to_field(),
        e3: e3.scale(conv.e3).to_field(),
        e4: e4.scale(conv.e4).to_field(),
    })
}
