//! Mechanical re-derivation of the normal form at small `N`.
//!
//! `−Σ e₂ (v₁+2S₁)v₂ / (6k₁k₂)` is differentiated by the product rule, each
//! `∂ₜv` is replaced by the right-hand side of the `v` equation, and the
//! resulting cubic monomials are classified by which factors are `S`
//! (`Y₁`: vvv, `Y₂`: Svv, `Y₃`: vSv, `Y₄`: SSv; `Y₅` carries `∂ₜS`).
//! Resonance is decided on the integer phase. Nonresonant `Y₁`, `Y₂` tuples
//! are integrated by parts once more with `∂ₜ` of the monomial evaluated
//! numerically. Nothing here shares code with the closed forms.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::FourierField;

use super::context::{Convention, NFContext};
use super::operators::{apply_b, apply_d, apply_e, apply_k, apply_l0, apply_r, RTerms};
use super::sums::{in_range, in_set, Modes, ZERO};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Largest truncation accepted by the mechanical oracle.
pub const ORACLE_MAX_N: usize = 16;

fn phase(omega: i64, t: f64) -> Complex64 {
    Complex64::from_polar(1.0, -(omega as f64) * t)
}

/// Direct nested sums with per-tuple phases, reference forms only.
pub mod direct {
    use super::*;

    fn setup(v: &FourierField, ctx: &NFContext) -> Result<(i64, Modes, Modes, Modes)> {
        ctx.check(v)?;
        Ok((
            ctx.n() as i64,
            Modes::from_field(v),
            ctx.s_modes(),
            ctx.dt_s_modes(),
        ))
    }

    fn pi3(k1: i64, k2: i64, k3: i64) -> i64 {
        (k1 + k2) * (k2 + k3) * (k3 + k1)
    }

    fn cube(k: i64) -> i64 {
        k * k * k
    }

    fn triple(n: i64, mut f: impl FnMut(i64, i64, i64, i64) -> Complex64) -> FourierField {
        let mut out = Modes::zeros(n as usize);
        for k in in_range(n) {
            let mut acc = ZERO;
            for k1 in in_range(n) {
                for k2 in in_range(n) {
                    let k3 = k - k1 - k2;
                    if in_set(k3, n) {
                        acc += f(k, k1, k2, k3);
                    }
                }
            }
            out.set(k, acc);
        }
        out.to_field()
    }

    fn pair(n: i64, mut f: impl FnMut(i64, i64, i64) -> Complex64) -> FourierField {
        let mut out = Modes::zeros(n as usize);
        for k in in_range(n) {
            let mut acc = ZERO;
            for k1 in in_range(n) {
                let k2 = k - k1;
                if in_set(k2, n) {
                    acc += f(k, k1, k2);
                }
            }
            out.set(k, acc);
        }
        out.to_field()
    }

    pub fn k(v: &FourierField, ctx: &NFContext) -> Result<FourierField> {
        let (n, v, s, _) = setup(v, ctx)?;
        let t = ctx.t();
        Ok(pair(n, |k, k1, k2| {
            -phase(3 * k * k1 * k2, t) * s.at(k1) * v.at(k2) / (3 * k1 * k2) as f64
        }))
    }

    pub fn b1(v: &FourierField, ctx: &NFContext) -> Result<FourierField> {
        let (n, v, _, _) = setup(v, ctx)?;
        let t = ctx.t();
        Ok(pair(n, |k, k1, k2| {
            -phase(3 * k * k1 * k2, t) * v.at(k1) * v.at(k2) / (6 * k1 * k2) as f64
        }))
    }

    pub fn r2(v: &FourierField, ctx: &NFContext) -> Result<FourierField> {
        let (n, v, _, ds) = setup(v, ctx)?;
        let t = ctx.t();
        Ok(pair(n, |k, k1, k2| {
            -phase(3 * k * k1 * k2, t) * ds.at(k1) * v.at(k2) / (3 * k1 * k2) as f64
        }))
    }

    fn nr(n: i64, k1: i64, k2: i64, k3: i64) -> bool {
        k1 + k2 != 0 && k1 + k3 != 0 && in_set(k2 + k3, n)
    }

    pub fn b2(v: &FourierField, ctx: &NFContext) -> Result<FourierField> {
        let (n, v, s, _) = setup(v, ctx)?;
        let t = ctx.t();
        Ok(triple(n, |_, k1, k2, k3| {
            if !nr(n, k1, k2, k3) {
                return ZERO;
            }
            let p = pi3(k1, k2, k3);
            phase(3 * p, t) * (v.at(k1) + s.at(k1)) * v.at(k2) * v.at(k3) / (18 * k1 * p) as f64
        }))
    }

    pub fn r4(v: &FourierField, ctx: &NFContext) -> Result<FourierField> {
        let (n, v, _, ds) = setup(v, ctx)?;
        let t = ctx.t();
        Ok(triple(n, |_, k1, k2, k3| {
            if !nr(n, k1, k2, k3) {
                return ZERO;
            }
            let p = pi3(k1, k2, k3);
            phase(3 * p, t) * ds.at(k1) * v.at(k2) * v.at(k3) / (18 * k1 * p) as f64
        }))
    }

    pub fn l0(v: &FourierField, ctx: &NFContext) -> Result<FourierField> {
        let (n, v, s, _) = setup(v, ctx)?;
        let t = ctx.t();
        Ok(triple(n, |_, k1, k2, k3| {
            if (k2 + k3).abs() > n {
                return ZERO;
            }
            I / 3.0 * phase(3 * pi3(k1, k2, k3), t) * s.at(k1) * s.at(k2) * v.at(k3) / k1 as f64
        }))
    }

    pub fn r3(v: &FourierField, ctx: &NFContext) -> Result<FourierField> {
        let (n, v, s, _) = setup(v, ctx)?;
        let t = ctx.t();
        Ok(triple(n, |_, k1, k2, k3| {
            if !in_set(k2 + k3, n) {
                return ZERO;
            }
            I / 3.0 * phase(3 * pi3(k1, k2, k3), t) * v.at(k1) * s.at(k2) * v.at(k3) / k1 as f64
        }))
    }

    /// `(R₅, R₆)` as explicit four-fold sums with phase `e^{iσψ̃t}`.
    pub fn quartic(
        v: &FourierField,
        ctx: &NFContext,
        sigma: f64,
    ) -> Result<(FourierField, FourierField)> {
        let (n, v, s, _) = setup(v, ctx)?;
        let t = ctx.t();
        let mut r5 = Modes::zeros(n as usize);
        let mut r6 = Modes::zeros(n as usize);
        for k in in_range(n) {
            let (mut a5, mut a6) = (ZERO, ZERO);
            for k1 in in_range(n) {
                for k2 in in_range(n) {
                    for k3 in in_range(n) {
                        let k4 = k - k1 - k2 - k3;
                        let p = k3 + k4;
                        if !in_set(k4, n) || !in_set(p, n) {
                            continue;
                        }
                        let psi = cube(k) - cube(k1) - cube(k2) - cube(k3) - cube(k4);
                        let e = Complex64::from_polar(1.0, sigma * psi as f64 * t);
                        let w3 = v.at(k3) + 2.0 * s.at(k3);
                        let tail = e * w3 * v.at(k4);
                        let cb = k1 + k2 != 0 && k1 + p != 0 && in_set(k2 + p, n);
                        let ca = in_set(k1 + k2, n) && k1 + p != 0 && k2 + p != 0;
                        if cb {
                            let den = (k1 * (k1 + k2) * (k2 + p) * (k1 + p)) as f64;
                            a5 += -I / 18.0 * p as f64 / den * s.at(k1) * v.at(k2) * tail;
                            a6 += -I / 18.0 * p as f64 / den * v.at(k1) * v.at(k2) * tail;
                        }
                        if ca {
                            let den = ((k1 + k2) * (k1 + p) * (k2 + p)) as f64;
                            a6 += -I / 36.0 / den * v.at(k1) * v.at(k2) * tail;
                        }
                    }
                }
            }
            r5.set(k, a5);
            r6.set(k, a6);
        }
        Ok((r5.to_field(), r6.to_field()))
    }

    fn star(n: i64, k1: i64, k2: i64, k3: i64) -> bool {
        (k2 + k3).abs() <= n && pi3(k1, k2, k3) != 0
    }

    pub fn d(v: &FourierField, ctx: &NFContext, c: Complex64) -> Result<FourierField> {
        let (n, v, s, _) = setup(v, ctx)?;
        let t = ctx.t();
        Ok(triple(n, |_, k1, k2, k3| {
            if !star(n, k1, k2, k3) {
                return ZERO;
            }
            let p = pi3(k1, k2, k3);
            -I * c / 3.0 * phase(3 * p, t) * s.at(k1) * s.at(k2) * v.at(k3) / (k1 * p) as f64
        }))
    }

    pub fn e3(v: &FourierField, ctx: &NFContext, c: Complex64) -> Result<FourierField> {
        let (n, v, s, ds) = setup(v, ctx)?;
        let t = ctx.t();
        Ok(triple(n, |_, k1, k2, k3| {
            if !star(n, k1, k2, k3) {
                return ZERO;
            }
            let p = pi3(k1, k2, k3);
            let dss = ds.at(k1) * s.at(k2) + s.at(k1) * ds.at(k2);
            -I * c / 3.0 * phase(3 * p, t) * dss * v.at(k3) / (k1 * p) as f64
        }))
    }

    /// Explicit five-fold quintic sum with phase `e^{iσψ̃t}`.
    pub fn e4(v: &FourierField, ctx: &NFContext, c: Complex64, sigma: f64) -> Result<FourierField> {
        let (n, v, s, _) = setup(v, ctx)?;
        let t = ctx.t();
        let mut out = Modes::zeros(n as usize);
        for k in in_range(n) {
            let mut acc = ZERO;
            for k1 in in_range(n) {
                for k2 in in_range(n) {
                    let k3 = k - k1 - k2;
                    if !in_set(k3, n) || !star(n, k1, k2, k3) {
                        continue;
                    }
                    let outer = s.at(k1) * s.at(k2) / (k1 * pi3(k1, k2, k3)) as f64;
                    for a in in_range(n) {
                        for b in in_range(n) {
                            let d = k3 - a - b;
                            if !in_set(d, n) || (b + d).abs() > n {
                                continue;
                            }
                            let psi = cube(k) - cube(k1) - cube(k2) - cube(a) - cube(b) - cube(d);
                            let e = Complex64::from_polar(1.0, sigma * psi as f64 * t);
                            acc += e * outer * s.at(a) * s.at(b) * v.at(d) / a as f64;
                        }
                    }
                }
            }
            out.set(k, -I * c / 3.0 * c * acc);
        }
        Ok(out.to_field())
    }
}

/// `∂ₜv_k = −(ik/2) Σ e^{−3ikk₁k₂t} (v₁ + 2S₁) v₂`.
pub fn v_rhs(v: &FourierField, ctx: &NFContext) -> Result<FourierField> {
    ctx.check(v)?;
    Ok(v_rhs_modes(&Modes::from_field(v), &ctx.s_modes(), ctx.t()).to_field())
}

fn v_rhs_modes(v: &Modes, s: &Modes, t: f64) -> Modes {
    let n = v.n;
    let mut out = Modes::zeros(n as usize);
    for k in in_range(n) {
        let mut acc = ZERO;
        for k1 in in_range(n) {
            let k2 = k - k1;
            if in_set(k2, n) {
                acc += phase(3 * k * k1 * k2, t) * (v.at(k1) + 2.0 * s.at(k1)) * v.at(k2);
            }
        }
        out.set(k, -I * (k as f64) / 2.0 * acc);
    }
    out
}

/// Right-hand side of the resonance-free flow, `c Σ_{|k₂+k₃|≤N} e₃ S₁S₂v₃ / k₁`.
fn l1_rhs_modes(v: &Modes, s: &Modes, t: f64, c: Complex64) -> Modes {
    let n = v.n;
    let mut out = Modes::zeros(n as usize);
    for k in in_range(n) {
        let mut acc = ZERO;
        for k1 in in_range(n) {
            for k2 in in_range(n) {
                let k3 = k - k1 - k2;
                if in_set(k3, n) && (k2 + k3).abs() <= n {
                    let om = 3 * (k1 + k2) * (k2 + k3) * (k3 + k1);
                    acc += phase(om, t) * s.at(k1) * s.at(k2) * v.at(k3) / k1 as f64;
                }
            }
        }
        out.set(k, c * acc);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Kind {
    V,
    S,
}

/// Accumulator for one monomial class.
#[derive(Default)]
struct Class {
    all: Option<Modes>,
    res: Option<Modes>,
    /// `Σ coef e X / (−iΩ)` over nonresonant tuples
    anti: Option<Modes>,
    /// `−Σ coef e ∂ₜX / (−iΩ)` over nonresonant tuples
    rest: Option<Modes>,
}

fn bump(slot: &mut Option<Modes>, n: i64, k: i64, val: Complex64) {
    let m = slot.get_or_insert_with(|| Modes::zeros(n as usize));
    m.set(k, m.at(k) + val);
}

fn get(slot: &Option<Modes>, n: i64) -> Modes {
    slot.clone().unwrap_or_else(|| Modes::zeros(n as usize))
}

/// Everything the mechanical expansion produces.
struct Expansion {
    /// `∂ₜ[v + K + B₁]` by the product rule, before any regrouping
    lhs: Modes,
    /// `−Σ e₂ (v₁+2S₁)v₂ / (6k₁k₂)`
    kb1: Modes,
    y5: Modes,
    classes: HashMap<[Kind; 3], Class>,
}

fn expand(v: &Modes, ctx: &NFContext, integrate: bool) -> Expansion {
    let n = v.n;
    let t = ctx.t();
    let s = ctx.s_modes();
    let ds = ctx.dt_s_modes();
    let dv = v_rhs_modes(v, &s, t);
    let field = |kind: Kind, k: i64| match kind {
        Kind::V => v.at(k),
        Kind::S => s.at(k),
    };
    let dfield = |kind: Kind, k: i64| match kind {
        Kind::V => dv.at(k),
        Kind::S => ds.at(k),
    };
    let mut classes: HashMap<[Kind; 3], Class> = HashMap::new();
    let mut kb1 = Modes::zeros(n as usize);
    let mut lhs = dv.clone();
    let mut y5 = Modes::zeros(n as usize);

    let mut push = |k: i64, kinds: [Kind; 3], idx: [i64; 3], coef: Complex64, omega: i64| {
        let x: Complex64 = (0..3).map(|j| field(kinds[j], idx[j])).product();
        let e = phase(omega, t);
        let cls = classes.entry(kinds).or_default();
        bump(&mut cls.all, n, k, coef * e * x);
        if omega == 0 {
            bump(&mut cls.res, n, k, coef * x);
            return;
        }
        if !integrate {
            return;
        }
        let mut dx = ZERO;
        for j in 0..3 {
            let mut term = dfield(kinds[j], idx[j]);
            for (i, (&kind, &m)) in kinds.iter().zip(&idx).enumerate() {
                if i != j {
                    term *= field(kind, m);
                }
            }
            dx += term;
        }
        let w = -I * omega as f64;
        bump(&mut cls.anti, n, k, coef * e * x / w);
        bump(&mut cls.rest, n, k, -coef * e * dx / w);
    };

    for k in in_range(n) {
        for k1 in in_range(n) {
            let k2 = k - k1;
            if !in_set(k2, n) {
                continue;
            }
            let om2 = 3 * k * k1 * k2;
            let e2 = phase(om2, t);
            let pre = -1.0 / (6 * k1 * k2) as f64;
            let w1 = v.at(k1) + 2.0 * s.at(k1);
            let dw1 = dv.at(k1) + 2.0 * ds.at(k1);
            kb1.set(k, kb1.at(k) + pre * e2 * w1 * v.at(k2));
            let dt_e2 = -I * om2 as f64 * e2;
            lhs.set(
                k,
                lhs.at(k) + pre * (dt_e2 * w1 * v.at(k2) + e2 * (dw1 * v.at(k2) + w1 * dv.at(k2))),
            );
            y5.set(k, y5.at(k) + pre * e2 * 2.0 * ds.at(k1) * v.at(k2));

            // ∂ₜv₂ inside (v₁ + 2S₁) ∂ₜv₂
            for a in in_range(n) {
                let b = k2 - a;
                if !in_set(b, n) {
                    continue;
                }
                let om = om2 + 3 * k2 * a * b;
                let c = pre * (-I * k2 as f64 / 2.0);
                use Kind::{S, V};
                push(k, [V, V, V], [k1, a, b], c, om);
                push(k, [V, S, V], [k1, a, b], 2.0 * c, om);
                push(k, [S, V, V], [k1, a, b], 2.0 * c, om);
                push(k, [S, S, V], [k1, a, b], 4.0 * c, om);
            }
            // ∂ₜv₁ inside (∂ₜv₁) v₂, with v₂ as the outer factor
            for a in in_range(n) {
                let b = k1 - a;
                if !in_set(b, n) {
                    continue;
                }
                let om = om2 + 3 * k1 * a * b;
                let c = pre * (-I * k1 as f64 / 2.0);
                use Kind::{S, V};
                push(k, [V, V, V], [k2, a, b], c, om);
                push(k, [V, S, V], [k2, a, b], 2.0 * c, om);
            }
        }
    }
    Expansion {
        lhs,
        kb1,
        y5,
        classes,
    }
}

/// One closed-form term against its mechanically derived counterpart.
#[derive(Debug, Clone, Serialize)]
pub struct TermComparison {
    pub name: String,
    pub oracle_norm: f64,
    pub closed_norm: f64,
    pub abs_diff: f64,
    pub rel_diff: f64,
}

impl TermComparison {
    fn new(name: &str, oracle: &Modes, closed: &FourierField) -> Self {
        let closed = Modes::from_field(closed);
        let abs_diff = (oracle - &closed).l2();
        let scale = oracle.l2().max(closed.l2());
        Self {
            name: name.into(),
            oracle_norm: oracle.l2(),
            closed_norm: closed.l2(),
            abs_diff,
            rel_diff: if scale > 0.0 { abs_diff / scale } else { 0.0 },
        }
    }
}

/// Closed-form terms at one `(v, t)` together with the term-by-term
/// comparison against the mechanical derivation.
#[derive(Debug, Clone)]
pub struct NormalFormReport {
    pub convention: Convention,
    pub k: FourierField,
    pub b1: FourierField,
    pub b2: FourierField,
    pub l0: FourierField,
    pub r: RTerms,
    pub d: FourierField,
    pub e: super::ETerms,
    /// `‖∂ₜ[v+K+B₁] − ΣY_j‖₂`, consistency of the expansion itself
    pub expansion_residual: f64,
    pub comparisons: Vec<TermComparison>,
    /// relative `ℓ²` gap between oracle total and closed-form `L₀ + 𝓡`
    pub total_residual: f64,
    /// comparisons for the resonance-free flow: `E₁ₐ+E₁ᵦ+E₂`, `D`, `E₃+E₄`
    pub flow_comparisons: Vec<TermComparison>,
}

impl NormalFormReport {
    /// Terms whose relative discrepancy exceeds `tol`.
    pub fn divergent(&self, tol: f64) -> Vec<&TermComparison> {
        self.comparisons
            .iter()
            .filter(|c| c.rel_diff > tol)
            .collect()
    }

    pub fn closes(&self, tol: f64) -> bool {
        self.total_residual <= tol && self.divergent(tol).is_empty()
    }
}

/// Mechanical derivation for the resonance-free flow: returns the resonant
/// part, `−Σ e X/(−iΩ)`, and `−Σ e ∂ₜX/(−iΩ)` with `∂ₜv` from the flow.
fn expand_flow(v: &Modes, ctx: &NFContext, c: Complex64) -> (Modes, Modes, Modes) {
    let n = v.n;
    let t = ctx.t();
    let s = ctx.s_modes();
    let ds = ctx.dt_s_modes();
    let dv = l1_rhs_modes(v, &s, t, c);
    let mut res = Modes::zeros(n as usize);
    let mut d = Modes::zeros(n as usize);
    let mut rest = Modes::zeros(n as usize);
    for k in in_range(n) {
        let (mut r, mut dd, mut q) = (ZERO, ZERO, ZERO);
        for k1 in in_range(n) {
            for k2 in in_range(n) {
                let k3 = k - k1 - k2;
                if !in_set(k3, n) || (k2 + k3).abs() > n {
                    continue;
                }
                let om = 3 * (k1 + k2) * (k2 + k3) * (k3 + k1);
                let coef = c / k1 as f64;
                let x = s.at(k1) * s.at(k2) * v.at(k3);
                if om == 0 {
                    r += coef * x;
                    continue;
                }
                let e = phase(om, t);
                let dx = ds.at(k1) * s.at(k2) * v.at(k3)
                    + s.at(k1) * ds.at(k2) * v.at(k3)
                    + s.at(k1) * s.at(k2) * dv.at(k3);
                let w = -I * om as f64;
                dd -= coef * e * x / w;
                q -= coef * e * dx / w;
            }
        }
        res.set(k, r);
        d.set(k, dd);
        rest.set(k, q);
    }
    (res, d, rest)
}

/// Re-derives the decomposition mechanically and compares it with the closed
/// forms under `conv`. Requires `N ≤ 16`.
pub fn oracle_dbp(
    v: &FourierField,
    ctx: &NFContext,
    conv: &Convention,
) -> Result<NormalFormReport> {
    ctx.check(v)?;
    if ctx.n() > ORACLE_MAX_N {
        return Err(Error::invalid(format!(
            "mechanical oracle is limited to N <= {ORACLE_MAX_N}, got {}",
            ctx.n()
        )));
    }
    let n = ctx.n() as i64;
    let vm = Modes::from_field(v);
    let ex = expand(&vm, ctx, true);
    use Kind::{S, V};
    let class = |k: [Kind; 3]| ex.classes.get(&k);
    let part = |k: [Kind; 3], f: fn(&Class) -> &Option<Modes>| {
        class(k)
            .map(|c| get(f(c), n))
            .unwrap_or_else(|| Modes::zeros(n as usize))
    };
    let y1_res = part([V, V, V], |c| &c.res);
    let y2_res = part([S, V, V], |c| &c.res);
    let y3 = part([V, S, V], |c| &c.all);
    let y4 = part([S, S, V], |c| &c.all);
    let m3 = part([S, V, V], |c| &c.anti);
    let n3 = part([V, V, V], |c| &c.anti);
    let m4 = part([S, V, V], |c| &c.rest);
    let n4 = part([V, V, V], |c| &c.rest);

    let mut ysum = &ex.y5 + &y3;
    for key in [[V, V, V], [S, V, V], [S, S, V]] {
        ysum = &ysum + &part(key, |c| &c.all);
    }
    let expansion_residual = (&ex.lhs - &ysum).l2();

    let k = apply_k(v, ctx, conv)?;
    let b = apply_b(v, ctx, conv)?;
    let l0 = apply_l0(v, ctx, conv)?;
    let r = apply_r(v, ctx, conv)?;
    let d = apply_d(v, ctx, conv)?;
    let e = apply_e(v, ctx, conv)?;

    let b2_oracle = (&m3 + &n3).scale(Complex64::new(-1.0, 0.0));
    let comparisons = vec![
        TermComparison::new("K+B1", &ex.kb1, &(&k + &b.b1)),
        TermComparison::new("B2", &b2_oracle, &b.b2),
        TermComparison::new("L0+R14", &y4, &(&l0 + &r.r14)),
        TermComparison::new("R11", &y1_res, &r.r11),
        TermComparison::new("R12+R13", &y2_res, &(&r.r12 + &r.r13)),
        TermComparison::new("R2", &ex.y5, &r.r2),
        TermComparison::new("R3", &y3, &r.r3),
        TermComparison::new("R4+R5", &m4, &(&r.r4 + &r.r5)),
        TermComparison::new("R6", &n4, &r.r6),
    ];
    let oracle_total = {
        let mut t = &y4 + &y1_res;
        for m in [&y2_res, &ex.y5, &y3, &m4, &n4] {
            t = &t + m;
        }
        t
    };
    let closed_total = &l0 + &r.total();
    let total = TermComparison::new("total", &oracle_total, &closed_total);

    let c = conv.flow_coefficient();
    let (res, d_or, rest) = expand_flow(&vm, ctx, c);
    let flow_comparisons = vec![
        TermComparison::new("E1+E2", &res, &(&(&e.e1a + &e.e1b) + &e.e2)),
        TermComparison::new("D", &d_or, &d),
        TermComparison::new("E3+E4", &rest, &(&e.e3 + &e.e4)),
    ];

    Ok(NormalFormReport {
        convention: conv.clone(),
        k,
        b1: b.b1,
        b2: b.b2,
        l0,
        r,
        d,
        e,
        expansion_residual,
        comparisons,
        total_residual: total.rel_diff,
        flow_comparisons,
    })
}

/// Outcome of trying every candidate convention on the same data.
#[derive(Debug, Clone)]
pub struct ConventionChoice {
    pub chosen: Convention,
    pub reports: Vec<NormalFormReport>,
}

impl ConventionChoice {
    pub fn report(&self) -> &NormalFormReport {
        self.reports
            .iter()
            .find(|r| r.convention == self.chosen)
            .expect("chosen convention has a report")
    }
}

/// Runs [`oracle_dbp`] under the derived and printed conventions (the
/// latter with both `R₁₃` conditions) and keeps the one with the smallest
/// total residual.
pub fn resolve_convention(v: &FourierField, ctx: &NFContext) -> Result<ConventionChoice> {
    use super::context::R13Condition;
    let candidates = [
        Convention::derived(),
        Convention::derived().with_r13(R13Condition::SignedK),
        Convention::printed(),
        Convention::printed().with_r13(R13Condition::AbsoluteK),
    ];
    let reports = candidates
        .iter()
        .map(|c| oracle_dbp(v, ctx, c))
        .collect::<Result<Vec<_>>>()?;
    let best = reports
        .iter()
        .min_by(|a, b| a.total_residual.total_cmp(&b.total_residual))
        .expect("non-empty candidate list");
    Ok(ConventionChoice {
        chosen: best.convention.clone(),
        reports,
    })
}
